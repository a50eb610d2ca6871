"""Constructive permeation of piecewise-linear graphs."""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .bv import Constant, Linear, PiecewiseFn, variation
from .errors import ConstantPieceEncountered

INFINITE = math.inf


def _require_pw_linear(g: PiecewiseFn) -> None:
    if not g.is_continuous():
        raise ValueError("g must be continuous piecewise linear")


def linear_intervals(g: PiecewiseFn) -> int:
    """Minimal number of intervals on which ``g`` is linear."""
    _require_pw_linear(g)
    bp = g.breakpoints
    slopes = [(p.right - p.left) / (bp[i + 1] - bp[i]) for i, p in enumerate(g.pieces)]
    return 1 + sum(1 for a, b in zip(slopes, slopes[1:]) if a != b)


def indicatrix(g: PiecewiseFn, y) -> int | float:
    """Number of solutions of ``g(t) = y``; ``INFINITE`` on a constant level."""
    _require_pw_linear(g)
    y = Fraction(y)
    count = sum(1 for v in g.values if v == y)
    for p in g.pieces:
        if isinstance(p, Constant):
            if p.value == y:
                return INFINITE
        elif min(p.left, p.right) < y < max(p.left, p.right):
            count += 1
    return count


@dataclass(frozen=True)
class Intersections:
    points: tuple[Fraction, ...]
    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    @property
    def finite(self) -> bool:
        return not self.intervals

    @property
    def count(self) -> int | float:
        return len(self.points) if self.finite else INFINITE


def intersections(f: PiecewiseFn, g: PiecewiseFn) -> Intersections:
    """Exact ``{t : f(t) = g(t)}`` for two piecewise functions on one domain."""
    if (f.a, f.b) != (g.a, g.b):
        raise ValueError("f and g must share a domain")
    xs = sorted(set(f.breakpoints) | set(g.breakpoints))
    points, spans = [], []
    for x in xs:
        if f(x) == g(x):
            points.append(x)
    for a, b in zip(xs, xs[1:]):
        dl = f.limit(a, +1) - g.limit(a, +1)
        dr = f.limit(b, -1) - g.limit(b, -1)
        if dl == 0 and dr == 0:
            spans.append((a, b))
        elif dl * dr < 0:
            points.append(a + (b - a) * dl / (dl - dr))
    return Intersections(tuple(sorted(set(points))), tuple(spans))


@dataclass(frozen=True)
class PermeationWitness:
    f: PiecewiseFn
    variation: Fraction
    intersections: Intersections
    level: Fraction | None = None  # y0 for the two-jump construction


def _simplest_in(lo: Fraction, hi: Fraction, avoid: set[Fraction], centre: Fraction) -> Fraction:
    """Smallest-denominator rational in ``(lo, hi)`` outside ``avoid``.

    Ties go to the value nearest ``centre``, then to the larger value.
    """
    q = 1
    while True:
        first = math.floor(lo * q) + 1
        last = math.ceil(hi * q) - 1
        cands = [Fraction(p, q) for p in range(first, last + 1) if math.gcd(p, q) == 1]
        cands = [c for c in cands if c not in avoid]
        if cands:
            return min(cands, key=lambda c: (abs(c - centre), -c))
        q += 1


def permeate_bv(g: PiecewiseFn, y, delta) -> PermeationWitness:
    """Two-jump function through level ``y0`` near ``y`` with variation below ``delta``."""
    _require_pw_linear(g)
    y, delta = Fraction(y), Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    avoid = {p.value for p in g.pieces if isinstance(p, Constant)}
    avoid |= {g.values[0], g.values[-1]}
    y0 = _simplest_in(y - delta / 2, y + delta / 2, avoid, y)
    a, b = g.a, g.b
    f = PiecewiseFn((a, b), (Constant(y0),), (y, y))
    return PermeationWitness(f, variation(f), intersections(f, g), y0)


def _slopes_at(g: PiecewiseFn, t: Fraction) -> tuple[Fraction | None, Fraction | None]:
    bp = g.breakpoints
    i = bisect_right(bp, t) - 1
    def slope(j):
        if 0 <= j < len(g.pieces):
            p = g.pieces[j]
            return (p.right - p.left) / (bp[j + 1] - bp[j])
        return None
    if bp[i] == t:
        return slope(i - 1), slope(i)
    return slope(i), slope(i)


def _first_hit(g: PiecewiseFn, after: Fraction, level: Fraction, rho: Fraction) -> Fraction | None:
    """Least ``t > after`` with ``|level - g(t)| = rho``."""
    bp = g.breakpoints
    targets = (level - rho, level + rho)
    for j in range(max(bisect_right(bp, after) - 1, 0), len(g.pieces)):
        x0, x1 = bp[j], bp[j + 1]
        p = g.pieces[j]
        best = None
        for target in targets:
            # linear and nonconstant: exactly one solution on the line
            t = x0 + (target - p.left) * (x1 - x0) / (p.right - p.left)
            if x0 <= t <= x1 and t > after and (best is None or t < best):
                best = t
        if best is not None:
            return best
    return None


def permeate_typical(g: PiecewiseFn, y, rho) -> PermeationWitness:
    """Piecewise-constant ``f`` with ``f(a) = y`` staying ``rho`` away from ``g`` after ``a``.

    ``f`` switches sides of the tube whenever ``g`` reaches it, using the
    slope just right of the hitting time; at a turning point of ``g`` it
    keeps its level.
    """
    _require_pw_linear(g)
    if any(isinstance(p, Constant) for p in g.pieces):
        raise ConstantPieceEncountered("every piece of g must be nonconstant")
    y, rho = Fraction(y), Fraction(rho)
    if rho <= 0:
        raise ValueError("rho must be positive")
    g0 = g.values[0]
    if not g0 - rho <= y <= g0 + rho:
        level = y
    elif y >= g0:
        level = y + 2 * rho
    else:
        level = y - 2 * rho
    times, levels = [g.a], [level]
    t = g.a
    while True:
        hit = _first_hit(g, t, level, rho)
        if hit is None or hit >= g.b:
            times.append(g.b)
            break
        left, right = _slopes_at(g, hit)
        times.append(hit)
        if left is not None and (left > 0) != (right > 0):
            pass  # turning point: keep the level
        elif right < 0:
            level += 2 * rho
        else:
            level -= 2 * rho
        levels.append(level)
        t = hit
    f = _left_continuous_steps(y, times, levels)
    return PermeationWitness(f, variation(f), intersections(f, g))


def _left_continuous_steps(start, times, levels) -> PiecewiseFn:
    """``start`` at ``times[0]``, then ``levels[i]`` on ``(times[i], times[i+1]]``."""
    bp, pieces, values = [times[0]], [], [start]
    for i, lv in enumerate(levels):
        if pieces and pieces[-1].value == lv:
            bp[-1] = times[i + 1]  # unchanged level: drop the breakpoint
            continue
        pieces.append(Constant(lv))
        bp.append(times[i + 1])
        values.append(lv)
    return PiecewiseFn(tuple(bp), tuple(pieces), tuple(values))


def check_tube(f: PiecewiseFn, g: PiecewiseFn, rho) -> bool:
    """``|f(t) - g(t)| >= rho`` for every ``t`` in ``(a, b]``."""
    rho = Fraction(rho)
    if (f.a, f.b) != (g.a, g.b):
        raise ValueError("f and g must share a domain")
    xs = sorted(set(f.breakpoints) | set(g.breakpoints))
    for x in xs[1:]:
        if abs(f(x) - g(x)) < rho:
            return False
    for a, b in zip(xs, xs[1:]):
        dl = f.limit(a, +1) - g.limit(a, +1)
        dr = f.limit(b, -1) - g.limit(b, -1)
        if not (min(dl, dr) >= rho or max(dl, dr) <= -rho):
            return False
    return True


def tube_bound(g: PiecewiseFn, rho) -> Fraction:
    """``2 (v + 1) rho``, the variation allowance of :func:`permeate_typical`."""
    return 2 * (linear_intervals(g) + 1) * Fraction(rho)


__all__ = [
    "INFINITE", "Intersections", "PermeationWitness", "Linear", "linear_intervals",
    "indicatrix", "intersections", "permeate_bv", "permeate_typical", "check_tube",
    "tube_bound",
]
