"""Numeric branched covers of the sphere by rational maps.

Polynomials are ascending numpy coefficient arrays (``c[k]`` multiplies
``z**k``). Fibres over a loop are tracked sample by sample, with roots from
companion-matrix eigenvalues and an assignment step between samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import linear_sum_assignment

from .errors import (
    BranchValueTooClose,
    InvalidRationalMap,
    MatchingAmbiguous,
    ParseError,
    RootFindingFailure,
    WindingAmbiguous,
)
from .moebius import SpherePoint, chordal_distance_array

COPRIME_TOL = 1e-10
CLUSTER_RADIUS = 1e-2
RESIDUAL_TOL = 1e-8
MAX_REFINE_DEPTH = 12
HUNGARIAN_MAX_DEGREE = 8


def _trim(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0:
        return np.zeros(1, dtype=complex)
    nz = np.nonzero(np.abs(c) > 1e-14 * scale)[0]
    return c[: nz[-1] + 1].copy()


def _deg(c: np.ndarray) -> int:
    return len(c) - 1 if np.any(c) else -1


def _sylvester(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    m, n = _deg(p), _deg(q)
    size = m + n
    s = np.zeros((size, size), dtype=complex)
    pd, qd = p[::-1], q[::-1]  # descending
    for i in range(n):
        s[i, i:i + m + 1] = pd
    for i in range(m):
        s[n + i, i:i + n + 1] = qd
    return s


def resultant(p, q) -> complex:
    """Resultant of two polynomials after scaling each to unit max-norm."""
    p, q = _trim(p), _trim(q)
    p = p / np.max(np.abs(p))
    q = q / np.max(np.abs(q))
    if _deg(p) == 0 or _deg(q) == 0:
        return complex(p[0] ** max(_deg(q), 0) * q[0] ** max(_deg(p), 0)) if (_deg(p) == 0 and _deg(q) == 0) \
            else complex((p[0] if _deg(p) == 0 else q[0]) ** max(_deg(p), _deg(q)))
    return complex(np.linalg.det(_sylvester(p, q)))


@dataclass(frozen=True, eq=False)
class RationalMap:
    num: np.ndarray
    den: np.ndarray = field(default_factory=lambda: np.ones(1, dtype=complex))

    def __post_init__(self):
        num, den = _trim(self.num), _trim(self.den)
        if not np.any(den):
            raise InvalidRationalMap(detail="zero denominator")
        if not np.any(num):
            raise InvalidRationalMap(detail="constant map")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        if self.degree < 1:
            raise InvalidRationalMap(detail="constant map")
        if min(_deg(num), _deg(den)) >= 1 and abs(resultant(num, den)) <= COPRIME_TOL:
            raise InvalidRationalMap(detail="numerator and denominator share a root")

    @classmethod
    def polynomial(cls, coeffs) -> "RationalMap":
        return cls(np.asarray(coeffs, dtype=complex))

    @property
    def degree(self) -> int:
        return max(_deg(self.num), _deg(self.den))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = P.polyval(z, self.num) / P.polyval(z, self.den)
        return out

    def value_at_infinity(self) -> complex:
        dp, dq = _deg(self.num), _deg(self.den)
        if dp > dq:
            return complex(math.inf, 0.0)
        if dp < dq:
            return 0j
        return complex(self.num[-1] / self.den[-1])

    def fibre_polynomial(self, w: complex) -> np.ndarray:
        """Ascending coefficients of ``p - w q`` padded to length ``d + 1``."""
        d = self.degree
        c = np.zeros(d + 1, dtype=complex)
        c[: len(self.num)] += self.num
        c[: len(self.den)] -= w * self.den
        return c

    def __repr__(self):
        return f"RationalMap(num={self.num.tolist()}, den={self.den.tolist()})"


def structure_extension_map(p_prime: complex, d: int) -> RationalMap:
    """``(z - p')**d + p'``."""
    if d < 1:
        raise ValueError("degree must be at least 1")
    c = P.polypow(np.array([-p_prime, 1], dtype=complex), d)
    c = np.asarray(c, dtype=complex)
    c[0] += p_prime
    return RationalMap.polynomial(c)


# -- roots -----------------------------------------------------------------------


def companion_roots(coeffs) -> np.ndarray:
    """Roots of one ascending polynomial via its companion matrix."""
    c = _trim(coeffs)
    n = _deg(c)
    if n < 1:
        return np.zeros(0, dtype=complex)
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    return np.linalg.eigvals(comp)


def batched_roots(coeff_rows: np.ndarray) -> np.ndarray:
    """Roots of many ascending polynomials of equal degree with nonzero leading terms."""
    coeff_rows = np.asarray(coeff_rows, dtype=complex)
    m, n1 = coeff_rows.shape
    n = n1 - 1
    comp = np.zeros((m, n, n), dtype=complex)
    if n > 1:
        comp[:, 1:, :-1] = np.eye(n - 1)
    comp[:, :, -1] = -coeff_rows[:, :-1] / coeff_rows[:, -1:]
    return np.linalg.eigvals(comp)


def _scaled_residual(c: np.ndarray, z: complex) -> float:
    num = abs(P.polyval(z, c))
    den = float(np.sum(np.abs(c) * np.abs(z) ** np.arange(len(c))))
    return num / den if den > 0 else 0.0


def _polish(c: np.ndarray, z: complex, iters: int = 30) -> complex:
    dc = P.polyder(c) if len(c) > 1 else np.zeros(1)
    for _ in range(iters):
        fv, dv = P.polyval(z, c), P.polyval(z, dc)
        if dv == 0:
            break
        step = fv / dv
        z = z - step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return z


def roots_with_multiplicity(c, radius: float = CLUSTER_RADIUS) -> list[tuple[complex, int]]:
    """Distinct roots with multiplicities, clustering the raw eigenvalues.

    A cluster of ``m`` raw roots is accepted as one root of multiplicity ``m``
    when the ``m-1``-th derivative has a simple root there (found by Newton)
    and all lower derivatives vanish to ``RESIDUAL_TOL``. Otherwise the cluster
    is split with a smaller radius.
    """
    c = _trim(c)
    raw = companion_roots(c)
    return _resolve(c, list(raw), radius, depth=0)


def _clusters(points: list[complex], radius: float) -> list[list[complex]]:
    groups: list[list[complex]] = []
    for z in sorted(points, key=lambda z: (z.real, z.imag)):
        for g in groups:
            if any(abs(z - y) <= radius * max(1.0, abs(y)) for y in g):
                g.append(z)
                break
        else:
            groups.append([z])
    # merge transitively linked groups
    merged = True
    while merged:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if any(abs(a - b) <= radius * max(1.0, abs(b)) for a in groups[i] for b in groups[j]):
                    groups[i] += groups.pop(j)
                    merged = True
                    break
            if merged:
                break
    return groups


def _resolve(c: np.ndarray, points: list[complex], radius: float, depth: int) -> list[tuple[complex, int]]:
    out = []
    for group in _clusters(points, radius):
        m = len(group)
        z0 = complex(np.mean(group))
        deriv = c
        for _ in range(m - 1):
            deriv = P.polyder(deriv)
        z0 = _polish(deriv, z0)
        ok = True
        lower = c
        for _ in range(m):
            if _scaled_residual(lower, z0) > RESIDUAL_TOL:
                ok = False
                break
            lower = P.polyder(lower)
        if ok:
            out.append((z0, m))
        elif m > 1 and depth < 6:
            out.extend(_resolve(c, group, radius / 10, depth + 1))
        else:
            raise RootFindingFailure(detail=f"residual at {z0:.6g} exceeds {RESIDUAL_TOL}")
    return out


# -- ramification ------------------------------------------------------------------


def _order_at_zero(c: np.ndarray, tol: float) -> int:
    scale = np.max(np.abs(c))
    nz = np.nonzero(np.abs(c) > tol * scale)[0]
    return int(nz[0]) if nz.size else len(c)


def index_at_infinity(f: RationalMap) -> int:
    dp, dq = _deg(f.num), _deg(f.den)
    if dp != dq:
        return abs(dp - dq)
    # f(1/w) - f(inf) = (b P~(w) - a Q~(w)) / (b Q~(w)) with reversed coefficients
    a, b = f.num[-1], f.den[-1]
    d = dp
    pr = np.zeros(d + 1, dtype=complex)
    qr = np.zeros(d + 1, dtype=complex)
    pr[: len(f.num)] = f.num[::-1]
    qr[: len(f.den)] = f.den[::-1]
    return _order_at_zero(b * pr - a * qr, 1e-12)


def critical_polynomial(f: RationalMap) -> np.ndarray:
    """``p' q - p q'``."""
    return _trim(P.polysub(P.polymul(P.polyder(f.num), f.den), P.polymul(f.num, P.polyder(f.den))))


def ramification_profile(f: RationalMap) -> list[tuple[SpherePoint, int]]:
    """Ramified points with their indices; infinity comes last."""
    w = critical_polynomial(f)
    profile = []
    if _deg(w) >= 1:
        for z, m in roots_with_multiplicity(w):
            profile.append((z, m + 1))
    profile.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    out = [(SpherePoint.of(z), e) for z, e in profile]
    e_inf = index_at_infinity(f)
    if e_inf >= 2:
        out.append((SpherePoint.infinity(), e_inf))
    return out


def rh_verify(f: RationalMap, profile=None) -> bool:
    if profile is None:
        profile = ramification_profile(f)
    return sum(e - 1 for _, e in profile) == 2 * (f.degree - 1)


def branch_values(f: RationalMap) -> list[SpherePoint]:
    out = []
    for p, _ in ramification_profile(f):
        if p.is_infinity():
            v = f.value_at_infinity()
        else:
            v = complex(f(p.to_complex()))
        out.append(SpherePoint.of(v))
    return out


# -- loops and their preimages --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LoopTrace:
    """Closed sampled loop: ``points[-1]`` repeats ``points[0]`` up to error."""

    points: np.ndarray
    param: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @classmethod
    def circle(cls, center: complex, radius: float, n: int) -> "LoopTrace":
        def param(t):
            return center + radius * np.exp(2j * np.pi * np.asarray(t, dtype=float))
        pts = param(np.arange(n + 1) / n)
        pts[-1] = pts[0]
        return cls(pts, param)

    def __len__(self):
        return len(self.points)

    @property
    def closure_error(self) -> float:
        return float(chordal_distance_array(self.points[:1], self.points[-1:])[0])

    @property
    def max_gap(self) -> float:
        return float(np.max(chordal_distance_array(self.points[:-1], self.points[1:]))) if len(self) > 1 else 0.0

    def at(self, t: float) -> complex:
        if self.param is not None:
            return complex(self.param(np.array([t]))[0])
        n = len(self.points) - 1
        x = t * n
        k = min(int(math.floor(x)), n - 1)
        s = x - k
        return complex((1 - s) * self.points[k] + s * self.points[k + 1])

    def sphere_points(self) -> list[SpherePoint]:
        return [SpherePoint.of(z) for z in self.points]


@dataclass(frozen=True)
class PreimageResult:
    components: list
    monodromy: tuple[int, ...]  # strand i ends where strand monodromy[i] starts
    step_permutations: list     # per base step: raw root index i at sample k continues as [i] at k+1
    samples: int

    def __len__(self):
        return len(self.components)


def _match(old: np.ndarray, new: np.ndarray) -> np.ndarray:
    """``perm[i]`` = index in ``new`` continuing ``old[i]``."""
    d = len(old)
    if d <= HUNGARIAN_MAX_DEGREE:
        cost = chordal_distance_array(old[:, None], new[None, :])
        _, cols = linear_sum_assignment(cost)
        return cols
    perm = np.empty(d, dtype=int)
    free = set(range(d))
    for i in range(d):
        j = min(free, key=lambda j: abs(old[i] - new[j]))
        perm[i] = j
        free.remove(j)
    return perm


def _min_gap(roots: np.ndarray) -> float:
    if len(roots) < 2:
        return math.inf
    diff = np.abs(roots[:, None] - roots[None, :])
    diff[np.diag_indices(len(roots))] = math.inf
    return float(diff.min())


def _cycles(perm: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = perm[j]
        out.append(cyc)
    return out


def preimage_loop(f: RationalMap, loop: LoopTrace, n_samples: Optional[int] = None,
                  margin: float = 1e-6) -> PreimageResult:
    """Lift a loop through ``f`` and group the lifts into closed components."""
    if n_samples is not None and n_samples != len(loop) - 1:
        ts = np.arange(n_samples + 1) / n_samples
        base = np.array([loop.at(t) for t in ts[:-1]] + [loop.at(0.0)])
    else:
        ts = np.linspace(0.0, 1.0, len(loop))
        base = np.asarray(loop.points, dtype=complex).copy()
        base[-1] = base[0]
    if np.any(~np.isfinite(base)):
        raise BranchValueTooClose(detail="loop passes through infinity")

    crit = [v for v in branch_values(f)]
    for v in crit:
        dist = chordal_distance_array(base, np.full(len(base), v.to_complex()))
        if np.min(dist) <= margin:
            raise BranchValueTooClose(repr(v), detail=f"loop comes within {np.min(dist):.3g}")
    f_inf = f.value_at_infinity()
    if math.isfinite(f_inf.real):
        dist = np.abs(base - f_inf)
        if np.min(dist) <= margin * max(1.0, abs(f_inf)):
            raise BranchValueTooClose("f(inf)", detail="a lift would pass through infinity")

    d = f.degree
    rows = np.array([f.fibre_polynomial(w) for w in base])
    if np.any(np.abs(rows[:, -1]) <= 1e-14 * np.max(np.abs(rows), axis=1)):
        raise RootFindingFailure(detail="fibre polynomial lost its leading term")
    roots = batched_roots(rows)

    rows_out = [roots[0]]
    base_rows = [0]
    for k in range(len(base) - 1):
        rows_out.extend(_track(f, loop, ts[k], ts[k + 1], rows_out[-1], roots[k + 1], 0))
        base_rows.append(len(rows_out) - 1)
    track = np.array(rows_out)  # (rows, d); column i follows strand i

    # strand order at each base sample against the raw eigenvalue order there
    to_raw = [_match(track[r], roots[k]) for k, r in enumerate(base_rows)]
    perms = []
    for k in range(len(base) - 1):
        inv_k = np.empty(d, dtype=int)
        inv_k[to_raw[k]] = np.arange(d)
        perms.append(tuple(int(to_raw[k + 1][inv_k[i]]) for i in range(d)))

    # the last sample repeats the first, so strand ends are a permutation of starts
    ends = _match(track[0], track[-1])  # strand ends[i] ends where strand i starts
    monodromy = np.empty(d, dtype=int)
    monodromy[ends] = np.arange(d)
    monodromy = tuple(int(x) for x in monodromy)

    components = []
    for cyc in _cycles(monodromy):
        pts = np.concatenate([track[:-1, i] for i in cyc] + [track[:1, cyc[0]]])
        pts[-1] = track[-1, cyc[-1]]
        components.append(LoopTrace(pts))
    return PreimageResult(components, monodromy, perms, len(base) - 1)


def _track(f: RationalMap, loop: LoopTrace, t0: float, t1: float, old: np.ndarray, new_raw: np.ndarray,
           depth: int) -> list[np.ndarray]:
    """Continue ``old`` (strand-ordered roots at ``t0``) to ``t1``.

    Halves the step until the smallest root gap is at least three times the
    largest root displacement. Returns the strand-ordered rows after ``t0``.
    """
    new = new_raw[_match(old, new_raw)]
    step = float(np.max(np.abs(new - old))) if len(old) else 0.0
    gap = min(_min_gap(old), _min_gap(new))
    if gap >= 3 * step:
        return [new]
    if depth >= MAX_REFINE_DEPTH:
        raise MatchingAmbiguous(f"{t0:.6g}", detail=f"gap {gap:.3g} against step {step:.3g}")
    tm = 0.5 * (t0 + t1)
    mid_raw = companion_roots(f.fibre_polynomial(loop.at(tm)))
    first = _track(f, loop, t0, tm, old, mid_raw, depth + 1)
    return first + _track(f, loop, tm, t1, first[-1], new_raw, depth + 1)


def winding_number(trace: LoopTrace, point: complex) -> float:
    z = np.asarray(trace.points, dtype=complex) - point
    ang = np.angle(z[1:] / z[:-1])
    return float(np.sum(ang) / (2 * np.pi))


def windings(trace: LoopTrace, marked: Sequence, tol: float = 1e-9) -> list[int]:
    """Integer winding of ``trace`` around each marked point; infinity counts as 0."""
    out = []
    for m in marked:
        m = SpherePoint.of(m)
        if m.is_infinity():
            out.append(0)
            continue
        z = m.to_complex()
        if np.min(np.abs(trace.points - z)) <= tol:
            raise WindingAmbiguous(repr(m), detail="loop passes through a marked point")
        w = winding_number(trace, z)
        k = round(w)
        if abs(w - k) > 0.1:
            raise WindingAmbiguous(repr(m), detail=f"winding {w:.3f}")
        out.append(int(k))
    return out


def is_essential(trace: LoopTrace, marked: Sequence, tol: float = 1e-9) -> bool:
    """Both complementary disks of the loop contain a marked point."""
    if not marked:
        return False
    w = windings(trace, marked, tol)
    inside = sum(1 for k in w if k != 0)
    return 0 < inside < len(w)


def essential_part(components: Sequence[LoopTrace], marked: Sequence, tol: float = 1e-9) -> list[LoopTrace]:
    return [c for c in components if is_essential(c, marked, tol)]


# -- map expressions ------------------------------------------------------------------

_Rat = tuple[np.ndarray, np.ndarray]


class _Parser:
    """Recursive descent over ``z``, ``i``, numbers, ``+ - * / ^`` and parentheses.

    A number directly followed by ``i`` is imaginary; juxtaposition multiplies.
    """

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, pos: Optional[int] = None):
        raise ParseError(self.pos if pos is None else pos, message)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> _Rat:
        if not self.text.strip():
            self.error("empty expression")
        value = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return value

    def expr(self) -> _Rat:
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self.term()
            value = _add(value, rhs) if op == "+" else _add(value, _neg(rhs))
        return value

    def term(self) -> _Rat:
        value = self.unary()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                value = _mul(value, self.unary())
            elif ch == "/":
                self.pos += 1
                at = self.pos
                rhs = self.unary()
                if not np.any(_trim(rhs[0])):
                    self.error("division by zero", at)
                value = _mul(value, (rhs[1], rhs[0]))
            elif ch and (ch in "z(i" or ch.isdigit() or ch == "."):
                value = _mul(value, self.power())
            else:
                return value

    def unary(self) -> _Rat:
        ch = self.peek()
        if ch == "-":
            self.pos += 1
            return _neg(self.unary())
        if ch == "+":
            self.pos += 1
            return self.unary()
        return self.power()

    def power(self) -> _Rat:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            self.skip()
            start = self.pos
            sign = 1
            if self.peek() == "-":
                sign = -1
                self.pos += 1
                self.skip()
            digits = start_digits = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == start_digits:
                self.error("exponent must be an integer", start)
            n = int(self.text[digits:self.pos]) * sign
            return _pow(base, n)
        return base

    def atom(self) -> _Rat:
        ch = self.peek()
        start = self.pos
        if ch == "(":
            self.pos += 1
            value = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return value
        if ch == "z":
            self.pos += 1
            return (np.array([0, 1], dtype=complex), np.ones(1, dtype=complex))
        if ch == "i":
            self.pos += 1
            return (np.array([1j]), np.ones(1, dtype=complex))
        if ch.isdigit() or ch == ".":
            while self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] == "."):
                self.pos += 1
            if self.pos < len(self.text) and self.text[self.pos] in "eE":
                j = self.pos + 1
                if j < len(self.text) and self.text[j] in "+-":
                    j += 1
                if j < len(self.text) and self.text[j].isdigit():
                    self.pos = j
                    while self.pos < len(self.text) and self.text[self.pos].isdigit():
                        self.pos += 1
            try:
                x = float(self.text[start:self.pos])
            except ValueError:
                self.error(f"bad number {self.text[start:self.pos]!r}", start)
            if self.pos < len(self.text) and self.text[self.pos] == "i":
                self.pos += 1
                return (np.array([1j * x]), np.ones(1, dtype=complex))
            return (np.array([complex(x)]), np.ones(1, dtype=complex))
        if not ch:
            self.error("unexpected end of expression")
        self.error(f"unexpected {ch!r}")


def _add(a: _Rat, b: _Rat) -> _Rat:
    return (P.polyadd(P.polymul(a[0], b[1]), P.polymul(b[0], a[1])), P.polymul(a[1], b[1]))


def _neg(a: _Rat) -> _Rat:
    return (-np.asarray(a[0]), a[1])


def _mul(a: _Rat, b: _Rat) -> _Rat:
    return (P.polymul(a[0], b[0]), P.polymul(a[1], b[1]))


def _pow(a: _Rat, n: int) -> _Rat:
    if n < 0:
        a, n = (a[1], a[0]), -n
    return (P.polypow(a[0], n) if n else np.ones(1, dtype=complex),
            P.polypow(a[1], n) if n else np.ones(1, dtype=complex))


def _cancel_monomial(num: np.ndarray, den: np.ndarray) -> _Rat:
    """Divide out a common power of ``z``; other common factors are left to the coprimality check."""
    num, den = _trim(num), _trim(den)
    k = min(_order_at_zero(num, 1e-14), _order_at_zero(den, 1e-14))
    return num[k:], den[k:]


def parse_map(text: str) -> RationalMap:
    num, den = _Parser(text).parse()
    num, den = _cancel_monomial(np.asarray(num, dtype=complex), np.asarray(den, dtype=complex))
    lead = den[-1]
    return RationalMap(num / lead, den / lead)


def parse_point(text: str) -> SpherePoint:
    """A sphere point: ``inf`` or a constant expression such as ``1-2i``."""
    if text.strip().lower() in ("inf", "infinity"):
        return SpherePoint.infinity()
    num, den = _Parser(text).parse()
    num, den = _trim(num), _trim(den)
    if _deg(num) > 0 or _deg(den) > 0:
        raise ParseError(0, f"{text!r} is not a constant")
    return SpherePoint.of(complex(num[0] / den[0]))
