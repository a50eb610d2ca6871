"""Certified evaluation of scheme limit functions and their relatives."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from . import chains
from .chains import Scheme, children, rect_at, scheme_gH
from .errors import EnumerationLimitExceeded


@dataclass(frozen=True)
class Enclosure:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi

    def subset_of(self, other: "Enclosure") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def hull(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def scaled(self, factor) -> "Enclosure":
        a, b = self.lo * factor, self.hi * factor
        return Enclosure(min(a, b), max(a, b))


ZERO = Enclosure(Fraction(0), Fraction(0))


def eval_enclosure(s: Scheme, t, k: int) -> Enclosure:
    r = rect_at(s, t, k)
    return Enclosure(r.y, r.top)


def eval(s: Scheme, t, tol) -> Fraction:
    """Midpoint of the first enclosure no wider than ``2 * tol``."""
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = 0
    while s.heights(k) > 2 * tol:
        k += 1
    return eval_enclosure(s, t, k).mid


def pinned_value(s: Scheme, t, k: int) -> Fraction:
    """Exact value of the limit function at a level-``k`` boundary ``t``."""
    t = Fraction(t)
    r = rect_at(s, t, k)
    if t == r.x:
        return r.entry
    if t == r.right:
        return r.exit
    raise ValueError(f"{t} is not a level-{k} boundary")


# --- zeros and the clipped function -----------------------------------------

@dataclass(frozen=True)
class ZeroBounds:
    first: Enclosure
    last: Enclosure


@lru_cache(maxsize=64)
def first_last_zero(s: Scheme, k: int) -> ZeroBounds:
    """Horizontal enclosures of the smallest and largest zero.

    The left end of the first enclosure is the left edge of the leftmost
    level-``k`` box whose span meets 0; its right end is the first boundary
    whose pinned value is not positive, which an intermediate-value argument
    turns into an upper bound. The last zero is handled symmetrically.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if not (s.root.entry > 0 > s.root.exit):
        raise ValueError("the root chain must start above and end below zero")
    lo = _scan_zero(s, k, from_left=True)
    hi = _scan_zero(s, k, from_left=False)
    return ZeroBounds(lo, hi)


def _scan_zero(s: Scheme, k: int, from_left: bool) -> Enclosure:
    # Depth-first over boxes meeting 0, in left-to-right (or reverse) order.
    # The first box reached at level k gives the outer end; the first pinned
    # sign change at or after it gives the inner end.
    outer = None
    stack = [s.root]
    while stack:
        r = stack.pop()
        if not (r.y <= 0 <= r.top):
            continue
        if r.level == k:
            outer = r
            break
        kids = list(children(s, r))
        stack.extend(kids if not from_left else reversed(kids))
    if outer is None:
        raise ValueError("no box meets zero")
    r = outer
    while True:
        if from_left and r.exit <= 0:
            return Enclosure(outer.x, r.right)
        if not from_left and r.entry >= 0:
            return Enclosure(r.x, outer.right)
        if from_left:
            if r.right == 1:
                raise ValueError("no sign change found")
            r = rect_at(s, r.right, k)
        else:
            if r.x == 0:
                raise ValueError("no sign change found")
            r = rect_at(s, r.x - r.w / 2, k)


def g_clipped(t, k: int) -> Enclosure:
    """gH between its extreme zeros and 0 outside, at certification depth ``k``."""
    t = Fraction(t)
    s = scheme_gH()
    inner = eval_enclosure(s, t, k)
    if k < 1:
        return inner.hull(ZERO)
    z = first_last_zero(s, k)
    if z.first.hi <= t <= z.last.lo:
        return inner
    if t < z.first.lo or t > z.last.hi:
        return ZERO
    return inner.hull(ZERO)


# --- Hölder moduli ----------------------------------------------------------

@dataclass(frozen=True)
class HolderCert:
    j: int
    beta: Fraction
    alpha: float
    constant: float


def holder_constant(j: int, beta) -> HolderCert:
    beta = Fraction(beta)
    if j < 2 or not 0 < beta < 1:
        raise ValueError("need j >= 2 and 0 < beta < 1")
    alpha = -math.log(beta) / math.log(j)
    q = j ** -alpha
    return HolderCert(j, beta, alpha, 2 * (j - 1) * q / (1 - q) + j)


def _sample_boundaries(s: Scheme, k: int, budget: int) -> list[Fraction]:
    # Every boundary of the first level, then the boundaries of one subtree
    # per level: the box around the middle of the interval.
    pts: set[Fraction] = set()
    parent = s.root
    for level in range(1, k + 1):
        if s.subdivision(level) + 1 > budget:
            raise EnumerationLimitExceeded(f"level {level} boundary sample exceeds budget")
        for c in children(s, parent):
            pts.add(c.x)
        pts.add(parent.right)
        parent = rect_at(s, (parent.x + parent.right) / 2, level)
    return sorted(pts)


def empirical_holder(s: Scheme, alpha: float, k: int, budget: int = 5_000_000):
    """Largest ``|g(x) - g(y)| / |x - y|**alpha`` over sampled pinned boundaries.

    Returns ``(ratio, (x, y))`` so the maximizing pair can be inspected.
    """
    pts = _sample_boundaries(s, k, budget)
    if len(pts) * (len(pts) - 1) // 2 > budget:
        raise EnumerationLimitExceeded(f"{len(pts)} sample points give too many pairs")
    values = {}
    for p in pts:
        level = _boundary_level(s, p, k)
        values[p] = pinned_value(s, p, level)
    best, pair = 0.0, None
    for a, b in combinations(pts, 2):
        r = float(abs(values[b] - values[a])) / float(b - a) ** alpha
        if r > best:
            best, pair = r, (a, b)
    return best, pair


def _boundary_level(s: Scheme, t: Fraction, k: int) -> int:
    for level in range(k + 1):
        if (t / s.width(level)).denominator == 1:
            return level
    raise ValueError(f"{t} is not a boundary up to level {k}")


# --- Cantor staircase and the obstacle function -----------------------------

def cantor_staircase(t) -> Fraction:
    """Exact Cantor function value, resolving periodic ternary tails."""
    u = Fraction(t)
    if not 0 <= u <= 1:
        raise ValueError(f"t={t} outside [0, 1]")
    value, scale = Fraction(0), Fraction(1, 2)
    seen: dict[Fraction, tuple[Fraction, Fraction]] = {}
    while True:
        if u == 1:
            return value + 2 * scale
        if u in seen:
            v0, s0 = seen[u]
            return v0 + (value - v0) / (1 - scale / s0)
        seen[u] = (value, scale)
        digit = math.floor(3 * u)
        if digit == 1:
            return value + scale
        if digit == 2:
            value += scale
        u = 3 * u - digit
        scale /= 2


def cantor_digits(t, depth: int):
    """Classify ``t`` against the middle-thirds construction.

    Returns ``("gap", k, local)`` when ``t`` lies in an open depth-``k`` gap,
    with ``local`` its affine coordinate in ``(0, 1)`` inside that gap;
    ``("cantor", None, None)`` when ``t`` is certified in the Cantor set;
    ``("unknown", None, None)`` if neither is decided within ``depth`` levels.
    """
    u = Fraction(t)
    seen = set()
    for k in range(1, depth + 1):
        if u in seen or u in (0, 1):
            return "cantor", None, None
        seen.add(u)
        if Fraction(1, 3) < u < Fraction(2, 3):
            return "gap", k, 3 * u - 1
        u = 3 * u if u <= Fraction(1, 3) else 3 * u - 2
    if u in seen or u in (0, 1):
        return "cantor", None, None
    return "unknown", None, None


def theta(t, K: int) -> Enclosure:
    """Enclosure of the obstacle function built from scaled copies of g."""
    kind, k, local = cantor_digits(t, K)
    if kind == "cantor":
        return ZERO
    if kind == "gap":
        return g_clipped(local, K - k).scaled(Fraction(1, 2 ** k))
    bound = Fraction(5, 2 ** K)
    return Enclosure(-bound, bound)


__all__ = [
    "Enclosure", "HolderCert", "ZeroBounds", "eval_enclosure", "eval", "pinned_value",
    "first_last_zero", "g_clipped", "holder_constant", "empirical_holder",
    "cantor_staircase", "cantor_digits", "theta", "chains",
]
