"""Classical Schottky groups from circle pairings.

Generator ``i`` (1-based) sends the source circle of pair ``i`` onto its
destination circle and the exterior of the source into the destination disk.
Words are tuples of letters ``(index, sign)``.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    AmbiguousClassification,
    CapExceeded,
    CirclesOverlap,
    InputError,
    NestingViolation,
    NonClassicalPairing,
    NonRealCenters,
    PairingMismatch,
)
from .moebius import (
    DEFAULT_TOL,
    Circle,
    MapClass,
    MoebiusMap,
    SpherePoint,
    apply_circle,
    circle_distance,
    circumcircles,
    classify,
    compose,
    from_circle_pairing,
    trace_squared_gap,
)

DEFAULT_DEPTH = 10
DEFAULT_MAX_WORDS = 10**6

Letter = tuple[int, int]


@dataclass(frozen=True)
class GroupWord:
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        letters = tuple((int(i), int(s)) for i, s in self.letters)
        for i, s in letters:
            if i < 1 or s not in (1, -1):
                raise ValueError(f"bad letter {(i, s)!r}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "GroupWord":
        """Parse ``"g1 g2^-1 g1^3"``; ``"e"`` or ``""`` is the empty word."""
        letters: list[Letter] = []
        text = text.strip()
        if text in ("", "e", "1"):
            return cls(())
        for token in text.split():
            m = re.fullmatch(r"g(\d+)(?:\^(-?\d+))?", token)
            if not m:
                raise InputError(token, detail=f"cannot parse word token {token!r}")
            index, power = int(m.group(1)), int(m.group(2) or 1)
            if index < 1:
                raise InputError(token, detail="generator indices start at 1")
            sign = 1 if power > 0 else -1
            letters.extend([(index, sign)] * abs(power))
        return cls(tuple(letters))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return reduce(GroupWord(self.letters + other.letters))

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple((i, -s) for i, s in reversed(self.letters)))

    def is_reduced(self) -> bool:
        return all(a[0] != b[0] or a[1] == b[1] for a, b in zip(self.letters, self.letters[1:]))

    def __str__(self):
        if not self.letters:
            return "e"
        return " ".join(f"g{i}" if s == 1 else f"g{i}^-1" for i, s in self.letters)


def reduce(word) -> GroupWord:
    letters = word.letters if isinstance(word, GroupWord) else tuple(word)
    stack: list[Letter] = []
    for i, s in letters:
        if stack and stack[-1] == (i, -s):
            stack.pop()
        else:
            stack.append((i, s))
    return GroupWord(tuple(stack))


def letters_of_rank(g: int) -> list[Letter]:
    return sorted((i, s) for i in range(1, g + 1) for s in (1, -1))


def word_count(g: int, max_len: int) -> int:
    """Number of reduced words of length <= max_len in the free group of rank g."""
    return 1 + sum(2 * g * (2 * g - 1) ** k for k in range(max_len))


@dataclass(frozen=True)
class SchottkyGroup:
    rank: int
    generators: tuple[MoebiusMap, ...]
    pairing: tuple[tuple[Circle, Circle], ...]
    fuchsian: bool = True
    tol: float = DEFAULT_TOL
    _letter_maps: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        maps = {}
        for i, gen in enumerate(self.generators, start=1):
            maps[(i, 1)] = gen
            maps[(i, -1)] = gen.inverse()
        object.__setattr__(self, "_letter_maps", maps)

    @classmethod
    def build(cls, pairings: Sequence, fuchsian: bool = True, tol: float = DEFAULT_TOL, verify: bool = True):
        """Build from ``[(src, dst), ...]`` and run the ping-pong checks.

        ``verify=False`` skips the geometric checks; the result may then fail
        to be Schottky, which :func:`all_loxodromic_check` will expose.
        """
        pairing = tuple((src, dst) for src, dst in pairings)
        if not pairing:
            raise ValueError("need at least one circle pair")
        for k, (src, dst) in enumerate(pairing):
            if not (isinstance(src, Circle) and isinstance(dst, Circle)):
                raise NonClassicalPairing(k, detail="pairing curves must be round circles")
        gens = tuple(from_circle_pairing(src, dst, fuchsian, tol) for src, dst in pairing)
        group = cls(len(pairing), gens, pairing, fuchsian, tol)
        if verify:
            group.verify()
        return group

    def circles(self) -> list[Circle]:
        """The 2g pairing circles in the order src_1, dst_1, src_2, ..."""
        return [c for pair in self.pairing for c in pair]

    def verify(self) -> None:
        circles = self.circles()
        if self.fuchsian:
            for k, c in enumerate(circles):
                if abs(c.center.imag) > self.tol:
                    raise NonRealCenters(k, detail=f"center {c.center!r} is off the real axis")
        for i in range(len(circles)):
            for j in range(i + 1, len(circles)):
                ci, cj = circles[i], circles[j]
                gap = abs(ci.center - cj.center) - ci.radius - cj.radius
                if not gap > self.tol:
                    raise CirclesOverlap(i, j, detail=f"gap {gap:.6g}")
        for k, ((src, dst), gen) in enumerate(zip(self.pairing, self.generators)):
            image = apply_circle(gen, src, self.tol)
            scale = max(1.0, abs(dst.center) + dst.radius)
            if circle_distance(image, dst) > self.tol * scale:
                raise PairingMismatch(k + 1, detail=f"image {image} differs from {dst}")
            # infinity is exterior to src, so it has to land inside dst
            if not dst.contains(gen.apply(SpherePoint.infinity()), tol=-self.tol * scale):
                raise PairingMismatch(k + 1, detail="exterior of src is not sent into dst")
            if self.fuchsian and max(abs(e.imag) for e in gen.entries) > self.tol:
                raise PairingMismatch(k + 1, detail="fuchsian generator has non-real entries")

    def letter_map(self, letter: Letter) -> MoebiusMap:
        return self._letter_maps[letter]

    def range_disk(self, letter: Letter) -> Circle:
        """Disk containing the image of everything outside the inverse letter's disk."""
        src, dst = self.pairing[letter[0] - 1]
        return dst if letter[1] == 1 else src


def standard_fuchsian(g: int) -> SchottkyGroup:
    """Rank-g fuchsian group pairing C(-(4k-2), 1) with C(4k-2, 1), k = 1..g."""
    if g < 1:
        raise ValueError("rank must be at least 1")
    pairs = [(Circle(complex(-(4 * k - 2), 0), 1.0), Circle(complex(4 * k - 2, 0), 1.0)) for k in range(1, g + 1)]
    return SchottkyGroup.build(pairs, fuchsian=True)


def evaluate(group: SchottkyGroup, word) -> MoebiusMap:
    word = word if isinstance(word, GroupWord) else GroupWord(tuple(word))
    m = MoebiusMap.identity()
    for letter in word:
        if letter[0] > group.rank:
            raise ValueError(f"letter {letter} exceeds rank {group.rank}")
        m = compose(m, group.letter_map(letter))
    return m


def _check_cap(count: int, max_words: int, what: str) -> None:
    if count > max_words:
        raise CapExceeded(detail=f"{what} needs {count} words, cap is {max_words}")


def enumerate_reduced_words(group_or_rank, max_len: int, max_words: int = DEFAULT_MAX_WORDS) -> Iterator[GroupWord]:
    """All reduced words of length <= max_len, breadth first, lexicographic within a length."""
    g = group_or_rank.rank if isinstance(group_or_rank, SchottkyGroup) else int(group_or_rank)
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    _check_cap(word_count(g, max_len), max_words, f"max_len={max_len}")
    letters = letters_of_rank(g)
    level: list[tuple[Letter, ...]] = [()]
    yield GroupWord(())
    for _ in range(max_len):
        nxt = []
        for w in level:
            for s in letters:
                if w and w[-1] == (s[0], -s[1]):
                    continue
                nxt.append(w + (s,))
        for w in nxt:
            yield GroupWord(w)
        level = nxt


def _words_with_matrices(group: SchottkyGroup, max_len: int, max_words: int):
    _check_cap(word_count(group.rank, max_len), max_words, f"max_len={max_len}")
    letters = letters_of_rank(group.rank)
    mats = {s: group.letter_map(s).as_array() for s in letters}
    level = [((), np.eye(2, dtype=complex))]
    for _ in range(max_len):
        nxt = []
        for w, m in level:
            for s in letters:
                if w and w[-1] == (s[0], -s[1]):
                    continue
                nxt.append((w + (s,), m @ mats[s]))
        yield from nxt
        level = nxt


@dataclass
class LoxodromicReport:
    words_checked: int
    violations: list = field(default_factory=list)
    min_gap: float = float("inf")

    @property
    def ok(self) -> bool:
        return not self.violations


def all_loxodromic_check(group: SchottkyGroup, max_len: int, tol: float | None = None,
                         max_words: int = DEFAULT_MAX_WORDS) -> LoxodromicReport:
    """Classify every nonempty reduced word up to ``max_len``.

    Violations are ``(word, class_name, tr^2)`` triples.
    """
    tol = group.tol if tol is None else tol
    report = LoxodromicReport(0)
    for letters, mat in _words_with_matrices(group, max_len, max_words):
        m = MoebiusMap.from_matrix(mat)
        report.words_checked += 1
        report.min_gap = min(report.min_gap, trace_squared_gap(m))
        try:
            kind = classify(m, tol)
        except AmbiguousClassification:
            kind = None
        if kind is not MapClass.LOXODROMIC:
            name = "Ambiguous" if kind is None else kind.value
            report.violations.append((GroupWord(letters), name, m.trace() ** 2))
    return report


def in_fundamental_domain(group: SchottkyGroup, p) -> bool:
    """Closed fundamental domain: outside or on every pairing circle."""
    p = SpherePoint.of(p)
    if p.is_infinity():
        return True
    z = p.to_complex()
    return all(abs(z - c.center) >= c.radius - group.tol for c in group.circles())


# -- limit set ---------------------------------------------------------------


@dataclass
class DiskLevel:
    words: list  # tuples of letters
    centers: np.ndarray
    radii: np.ndarray
    parents: np.ndarray  # index into the previous level, -1 for roots


@dataclass(frozen=True)
class DiskNode:
    word: GroupWord
    disk: Circle
    depth: int
    parent: int


@dataclass
class DiskTree:
    """Nested image disks; ``levels[k]`` holds the words of length ``k + 1``."""

    levels: list

    @property
    def depth(self) -> int:
        return len(self.levels)

    def node(self, depth: int, index: int) -> DiskNode:
        lvl = self.levels[depth - 1]
        return DiskNode(GroupWord(lvl.words[index]), Circle(lvl.centers[index], lvl.radii[index]),
                        depth, int(lvl.parents[index]))

    def nodes(self, depth: int) -> Iterator[DiskNode]:
        for i in range(len(self.levels[depth - 1].words)):
            yield self.node(depth, i)

    def roots(self) -> list[DiskNode]:
        return list(self.nodes(1))

    def leaves(self) -> DiskLevel:
        return self.levels[-1]

    def size(self) -> int:
        return sum(len(lvl.words) for lvl in self.levels)


def nesting_violations(tree: DiskTree, slack: float = 1e-9) -> int:
    """Number of non-root disks not contained in their parent disk (up to ``slack``)."""
    bad = 0
    for k in range(1, tree.depth):
        child, parent = tree.levels[k], tree.levels[k - 1]
        pc = parent.centers[child.parents]
        pr = parent.radii[child.parents]
        excess = np.abs(child.centers - pc) + child.radii - pr
        bad += int(np.count_nonzero(~(excess <= slack)))
    return bad


_ROOTS_OF_UNITY = np.exp(2j * np.pi * np.arange(3) / 3)


def _image_disks(m: MoebiusMap, centers: np.ndarray, radii: np.ndarray):
    a, b, c, d = m.entries
    if c != 0:
        pole = -d / c
        if np.any(np.abs(pole - centers) <= radii):
            raise NestingViolation(detail="a disk contains the pole of a generator")
    pts = centers[:, None] + radii[:, None] * _ROOTS_OF_UNITY[None, :]
    img = (a * pts + b) / (c * pts + d)
    with np.errstate(divide="ignore", invalid="ignore"):
        cen, rad = circumcircles(img[:, 0], img[:, 1], img[:, 2])
    if not (np.all(np.isfinite(cen)) and np.all(np.isfinite(rad))):
        raise NestingViolation(detail="image disk degenerated numerically")
    return cen, rad


def limit_set_approx(group: SchottkyGroup, depth: int, max_words: int = DEFAULT_MAX_WORDS,
                     workers: int = 1, slack: float = 1e-9):
    """Disk tree to ``depth`` and its leaf-disk centers.

    The disk of ``w s`` is ``evaluate(w)`` applied to the range disk of ``s``.
    It is computed as ``t(disk(u))`` for ``w s = t u``, which only ever applies
    a single generator to a small disk. Subtrees are grouped by first letter;
    with ``workers > 1`` they are expanded concurrently and merged in letter
    order, so the output does not depend on ``workers``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    g = group.rank
    _check_cap(word_count(g, depth) - 1, max_words, f"depth={depth}")
    letters = letters_of_rank(g)
    roots = [group.range_disk(s) for s in letters]
    levels = [DiskLevel(
        words=[(s,) for s in letters],
        centers=np.array([c.center for c in roots], dtype=complex),
        radii=np.array([c.radius for c in roots], dtype=float),
        parents=np.full(len(letters), -1, dtype=np.int64),
    )]
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for _ in range(depth - 1):
            prev = levels[-1]
            prev_index = {w: i for i, w in enumerate(prev.words)}
            first = np.array([w[0][0] * 2 + (w[0][1] > 0) for w in prev.words])

            def expand(t, prev=prev, first=first):
                inv_code = t[0] * 2 + (t[1] < 0)
                sel = np.nonzero(first != inv_code)[0]
                cen, rad = _image_disks(group.letter_map(t), prev.centers[sel], prev.radii[sel])
                return [(t,) + prev.words[i] for i in sel], cen, rad

            parts = list(pool.map(expand, letters)) if pool else [expand(t) for t in letters]
            words = [w for part in parts for w in part[0]]
            lvl = DiskLevel(
                words=words,
                centers=np.concatenate([p[1] for p in parts]),
                radii=np.concatenate([p[2] for p in parts]),
                parents=np.array([prev_index[w[:-1]] for w in words], dtype=np.int64),
            )
            levels.append(lvl)
    finally:
        if pool:
            pool.shutdown()
    tree = DiskTree(levels)
    bad = nesting_violations(tree, slack)
    if bad:
        raise NestingViolation(detail=f"{bad} disks escape their parents at slack {slack}")
    points = [SpherePoint.of(z) for z in tree.leaves().centers]
    return tree, points
