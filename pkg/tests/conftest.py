import random
from pathlib import Path

import pytest

from projgraft.cli import seed_from_env
from projgraft.moebius import Circle
from projgraft.foldgraph import random_blowup
from projgraft.graftcalc import presentation_from_marking
from projgraft.schottky import SchottkyGroup, standard_fuchsian

FIXTURES = Path(__file__).parent / "fixtures"


def rank2_group() -> SchottkyGroup:
    return SchottkyGroup.build([(Circle(-6, 1), Circle(-2, 1)), (Circle(2, 1), Circle(6, 1))])


def rank1_group() -> SchottkyGroup:
    return SchottkyGroup.build([(Circle(-2, 1), Circle(2, 1))])


@pytest.fixture
def rank2():
    return rank2_group()


@pytest.fixture
def rank1():
    return rank1_group()


@pytest.fixture
def rng():
    return random.Random(seed_from_env())


@pytest.fixture
def fixtures():
    return FIXTURES


def random_presentation(g: int, rng: random.Random, unfolds: int = 3):
    """Zero-arc presentation over a random degree->=2 blowup of rose(g)."""
    group = rank2_group() if g == 2 else standard_fuchsian(g)
    marking = random_blowup(g, unfolds, rng, min_degree=2)
    return presentation_from_marking(group, marking)


ACCEPTANCE: list[str] = []


def record(number: int, name: str, ok: bool, detail: str) -> None:
    """Log one acceptance line; repeated in the terminal summary."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number} {name}: {detail}"
    print(line)
    ACCEPTANCE.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
