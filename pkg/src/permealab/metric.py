"""Cantor-set obstacle: affine copies, path-metric brackets, staircase checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .bv import Length, Polyline
from .errors import NoSeparatingGap
from .funcs import cantor_digits, cantor_staircase

THIRD = Fraction(1, 3)


@dataclass(frozen=True)
class AffineMap:
    scale_x: Fraction
    scale_y: Fraction
    shift_x: Fraction = Fraction(0)
    shift_y: Fraction = Fraction(0)

    def __call__(self, x, y=0) -> tuple[Fraction, Fraction]:
        return (self.scale_x * Fraction(x) + self.shift_x,
                self.scale_y * Fraction(y) + self.shift_y)

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """``self after inner``."""
        return AffineMap(self.scale_x * inner.scale_x, self.scale_y * inner.scale_y,
                         self.scale_x * inner.shift_x + self.shift_x,
                         self.scale_y * inner.shift_y + self.shift_y)


LEFT = AffineMap(THIRD, Fraction(1, 2))                      # (x/3, y/2)
RIGHT = AffineMap(THIRD, Fraction(1, 2), Fraction(2, 3))     # ((2+x)/3, y/2)


def cantor_map(n: int) -> AffineMap:
    """Compose one contraction per binary digit of ``n``, lowest digit outermost."""
    if n < 1:
        raise ValueError("n must be at least 1")
    out = AffineMap(Fraction(1), Fraction(1))
    for k in range(n.bit_length()):
        out = out.compose(LEFT if (n >> k) & 1 else RIGHT)
    return out


def map_depth(n: int) -> int:
    return n.bit_length()


@dataclass(frozen=True)
class Gap:
    lo: Fraction
    hi: Fraction
    depth: int
    copy: AffineMap  # sends the base segment (1, 2) x {0} onto this gap


@dataclass(frozen=True)
class ObstacleApprox:
    level: int
    gaps: tuple[Gap, ...]
    boxes: tuple[tuple[Fraction, Fraction], ...]

    def max_height(self, depth: int) -> Fraction:
        return Fraction(5, 2 ** depth)


def obstacle(K: int) -> ObstacleApprox:
    if K < 1:
        raise ValueError("K must be at least 1")
    gaps = []
    for n in range(1, 2 ** K):
        m = cantor_map(n)
        gaps.append(Gap(m(1)[0], m(2)[0], map_depth(n), m))
    gaps.sort(key=lambda g: g.lo)
    boxes = [(Fraction(0), Fraction(1))]
    for _ in range(K):
        boxes = [b for lo, hi in boxes
                 for b in ((lo, lo + (hi - lo) / 3), (hi - (hi - lo) / 3, hi))]
    return ObstacleApprox(K, tuple(gaps), tuple(boxes))


def c_certificate() -> Fraction:
    """Rational lower bound for the extra length of an admissible detour."""
    c = Fraction(2, 5)
    assert (1 + c) ** 2 <= 2, "certificate must not exceed sqrt(2) - 1"
    return c


def is_cantor_point(t, depth: int = 10_000) -> bool:
    return cantor_digits(t, depth)[0] == "cantor"


def separating_depth(t1, t2) -> int:
    """Depth of the shallowest gap strictly between two Cantor points."""
    a, b = Fraction(t1), Fraction(t2)
    if a > b:
        a, b = b, a
    if a == b:
        raise NoSeparatingGap("points coincide")
    for t in (a, b):
        if not is_cantor_point(t):
            raise NoSeparatingGap(f"{t} is not a certified Cantor point")
    k = 1
    while True:
        if b <= THIRD:
            a, b = 3 * a, 3 * b
        elif a >= 2 * THIRD:
            a, b = 3 * a - 2, 3 * b - 2
        else:
            return k
        k += 1


def lower_bound(t1, t2, k: int | None = None) -> Fraction:
    """``(1/2)^k * c`` for the depth ``k`` of the separating gap."""
    depth = separating_depth(t1, t2)
    if k is not None and k != depth:
        raise NoSeparatingGap(f"no depth-{k} gap separates {t1} and {t2}")
    return c_certificate() / 2 ** depth


def _shallowest_gap_meeting(t1: Fraction, t2: Fraction) -> int:
    """Least depth of a gap meeting the open interval ``(t1, t2)``."""
    lo, hi, k = t1, t2, 1
    while True:
        if lo < 2 * THIRD and hi > THIRD:
            return k
        if hi <= THIRD:
            lo, hi = 3 * lo, 3 * hi
        else:
            lo, hi = 3 * lo - 2, 3 * hi - 2
        k += 1


@dataclass(frozen=True)
class MetricBound:
    lower: Fraction
    upper: Fraction
    witness_path: Polyline | None = None

    @property
    def ok(self) -> bool:
        return self.lower <= self.upper


def upper_path(t1, t2, K: int) -> MetricBound:
    """Over-the-bump path: up at ``t1``, across above the obstacle, down at ``t2``.

    Clearance is the height bound ``5 * 2^-k`` of the shallowest gap copy
    meeting ``(t1, t2)``, plus a margin ``2^-K``. The path meets the obstacle
    only on its two vertical legs, each a single point.
    """
    t1, t2 = Fraction(t1), Fraction(t2)
    if t1 > t2:
        t1, t2 = t2, t1
    if t1 == t2:
        return MetricBound(Fraction(0), Fraction(0), None)
    depth = _shallowest_gap_meeting(t1, t2)
    clearance = Fraction(5, 2 ** depth) + Fraction(1, 2 ** K)
    path = Polyline(((t1, Fraction(0)), (t1, clearance), (t2, clearance), (t2, Fraction(0))))
    length = (t2 - t1) + 2 * clearance
    try:
        lower = lower_bound(t1, t2)
    except NoSeparatingGap:
        lower = Fraction(0)
    return MetricBound(lower, length, path)


@dataclass(frozen=True)
class StaircaseRow:
    t1: Fraction
    t2: Fraction
    k: int | None
    lower: Fraction
    upper: Fraction
    staircase_diff: Fraction
    allowed: Fraction
    euclidean_ratio: Fraction | None

    @property
    def ok(self) -> bool:
        return self.staircase_diff <= self.allowed and self.lower <= self.upper


@dataclass
class StaircaseReport:
    rows: list[StaircaseRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)


def staircase_lipschitz_report(pairs: Iterable[Sequence], K: int) -> StaircaseReport:
    """Cantor-function increments against ``(2/c) * lower_bound`` per pair."""
    c = c_certificate()
    report = StaircaseReport()
    for t1, t2 in pairs:
        t1, t2 = Fraction(t1), Fraction(t2)
        diff = abs(cantor_staircase(t2) - cantor_staircase(t1))
        if t1 == t2:
            report.rows.append(StaircaseRow(t1, t2, None, Fraction(0), Fraction(0),
                                            diff, Fraction(0), None))
            continue
        k = separating_depth(t1, t2)
        lower = lower_bound(t1, t2, k)
        upper = upper_path(t1, t2, K).upper
        report.rows.append(StaircaseRow(t1, t2, k, lower, upper, diff, 2 / c * lower,
                                        diff / abs(t2 - t1)))
    return report


def euclidean_ratios(kmax: int) -> list[Fraction]:
    """``|c(3^-k) - c(0)| / 3^-k`` for ``k = 1..kmax``; grows like ``(3/2)^k``."""
    return [cantor_staircase(Fraction(1, 3 ** k)) * 3 ** k for k in range(1, kmax + 1)]


def minkowski_holds(p: Polyline) -> bool:
    """``length(p) >= sqrt(dx_total^2 + V(p_2)^2)``, decided exactly."""
    dx = p.vertices[-1][0] - p.vertices[0][0]
    v2 = p.coordinate_variation(1)
    return p.length() >= Length.sqrt(dx * dx + v2 * v2)


__all__ = [
    "AffineMap", "LEFT", "RIGHT", "cantor_map", "map_depth", "Gap", "ObstacleApprox",
    "obstacle", "c_certificate", "is_cantor_point", "separating_depth", "lower_bound",
    "MetricBound", "upper_path", "StaircaseRow", "StaircaseReport",
    "staircase_lipschitz_report", "euclidean_ratios", "minkowski_holds",
]
