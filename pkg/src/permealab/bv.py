"""Variation and graph length of regulated piecewise functions and polylines."""

from __future__ import annotations

import json
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import NotUnfrayed, ZeroHorizontalExtent


# --- exact lengths ------------------------------------------------------------

def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


class Length:
    """``rational + sum(coeff * sqrt(key))`` with pairwise independent keys.

    Keys are positive non-square integers and no two keys share a square
    class, so the representation is zero exactly when every part vanishes.
    """

    __slots__ = ("rational", "terms")

    def __init__(self, rational=0, terms: dict[int, Fraction] | None = None):
        self.rational = Fraction(rational)
        self.terms: dict[int, Fraction] = {}
        for key, coeff in (terms or {}).items():
            self._add_sqrt(key, Fraction(coeff))

    @classmethod
    def sqrt(cls, value) -> "Length":
        value = Fraction(value)
        if value < 0:
            raise ValueError("negative radicand")
        out = cls()
        out._add_sqrt(value.numerator * value.denominator, Fraction(1, value.denominator))
        return out

    @classmethod
    def hypot(cls, dx, dy) -> "Length":
        dx, dy = Fraction(dx), Fraction(dy)
        if dx == 0 or dy == 0:
            return cls(abs(dx) + abs(dy))
        return cls.sqrt(dx * dx + dy * dy)

    def _add_sqrt(self, key: int, coeff: Fraction) -> None:
        if coeff == 0 or key == 0:
            return
        root = math.isqrt(key)
        if root * root == key:
            self.rational += coeff * root
            return
        for other in list(self.terms):
            prod = key * other
            r = math.isqrt(prod)
            if r * r == prod:
                # sqrt(key) = r / other * sqrt(other); keep the smaller radicand
                merged = self.terms.pop(other) + coeff * Fraction(r, other)
                if merged:
                    small = min(key, other)
                    self.terms[small] = merged * Fraction(r, key) if small == key else merged
                return
        self.terms[key] = coeff

    def copy(self) -> "Length":
        out = Length(self.rational)
        out.terms = dict(self.terms)
        return out

    def __add__(self, other) -> "Length":
        other = _as_length(other)
        if other is NotImplemented:
            return other
        out = self.copy()
        out.rational += other.rational
        for key, coeff in other.terms.items():
            out._add_sqrt(key, coeff)
        return out

    __radd__ = __add__

    def __neg__(self) -> "Length":
        out = Length(-self.rational)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other) -> "Length":
        return self + (-_as_length(other))

    def __rsub__(self, other) -> "Length":
        return _as_length(other) - self

    def __mul__(self, factor) -> "Length":
        factor = Fraction(factor)
        out = Length(self.rational * factor)
        out.terms = {k: c * factor for k, c in self.terms.items() if c * factor}
        return out

    __rmul__ = __mul__

    def times_sqrt(self, n: int) -> "Length":
        """Multiply by ``sqrt(n)`` for a positive integer ``n``."""
        out = Length()
        out._add_sqrt(n, self.rational)
        for key, coeff in self.terms.items():
            out._add_sqrt(key * n, coeff)
        return out

    def is_zero(self) -> bool:
        return self.rational == 0 and not self.terms

    def enclosure(self, digits: int = 30) -> tuple[Fraction, Fraction]:
        """Rational bounds ``lo <= self <= hi`` from integer square roots."""
        scale = 10 ** digits
        lo = hi = self.rational
        for key, coeff in self.terms.items():
            r = math.isqrt(key * scale * scale)
            a, b = Fraction(r, scale), Fraction(r + 1, scale)
            if coeff > 0:
                lo, hi = lo + coeff * a, hi + coeff * b
            else:
                lo, hi = lo + coeff * b, hi + coeff * a
        return lo, hi

    def sign(self) -> int:
        if self.is_zero():
            return 0
        digits = 20
        while True:
            lo, hi = self.enclosure(digits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            digits *= 2

    def _cmp(self, other) -> int:
        return (self - _as_length(other)).sign()

    def __eq__(self, other) -> bool:
        other = _as_length(other)
        if other is NotImplemented:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.rational, tuple(sorted(self.terms.items()))))

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __float__(self) -> float:
        lo, hi = self.enclosure(20)
        return float((lo + hi) / 2)

    def __repr__(self) -> str:
        return f"Length({self})"

    def __str__(self) -> str:
        parts = [str(self.rational)] if self.rational or not self.terms else []
        for key, coeff in sorted(self.terms.items()):
            parts.append(f"{coeff}*sqrt({key})")
        return " + ".join(parts)

    def to_json(self) -> dict:
        lo, hi = self.enclosure(15)
        return {
            "rational": str(self.rational),
            "sqrt_terms": [[str(c), str(k)] for k, c in sorted(self.terms.items())],
            "decimal": float(self),
            "enclosure": [str(lo), str(hi)],
        }


def _as_length(v):
    if isinstance(v, Length):
        return v
    if isinstance(v, (int, Fraction)):
        return Length(v)
    return NotImplemented


# --- piecewise functions ------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    value: Fraction

    @property
    def left(self) -> Fraction:
        return self.value

    @property
    def right(self) -> Fraction:
        return self.value


@dataclass(frozen=True)
class Linear:
    left: Fraction
    right: Fraction


Piece = Union[Constant, Linear]


def _piece(left, right) -> Piece:
    left, right = Fraction(left), Fraction(right)
    return Constant(left) if left == right else Linear(left, right)


@dataclass(frozen=True)
class PiecewiseFn:
    """Regulated function with constant or linear pieces between breakpoints.

    ``values[i]`` is the function value at ``breakpoints[i]``; one-sided
    limits come from the adjacent pieces.
    """

    breakpoints: tuple[Fraction, ...]
    pieces: tuple[Piece, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        bp = tuple(Fraction(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        object.__setattr__(self, "pieces", tuple(
            _piece(p.left, p.right) for p in self.pieces))
        if len(bp) < 2 or any(a >= b for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing, at least two")
        if len(self.pieces) != len(bp) - 1 or len(self.values) != len(bp):
            raise ValueError("need one piece per interval and one value per breakpoint")

    # construction helpers
    @classmethod
    def constant(cls, c, a=0, b=1) -> "PiecewiseFn":
        c = Fraction(c)
        return cls((a, b), (Constant(c),), (c, c))

    @classmethod
    def from_points(cls, points: Iterable[Sequence]) -> "PiecewiseFn":
        """Continuous piecewise-linear interpolant through ``points``."""
        pts = [(Fraction(x), Fraction(y)) for x, y in points]
        return cls(tuple(p[0] for p in pts),
                   tuple(_piece(a[1], b[1]) for a, b in zip(pts, pts[1:])),
                   tuple(p[1] for p in pts))

    @classmethod
    def step(cls, levels: Sequence, jumps: Sequence, a=0, b=1,
             right_continuous: bool = True) -> "PiecewiseFn":
        """Piecewise constant with ``levels[i]`` between consecutive jump points."""
        bp = (Fraction(a), *map(Fraction, jumps), Fraction(b))
        lv = [Fraction(v) for v in levels]
        vals = [lv[0]]
        for i in range(1, len(bp) - 1):
            vals.append(lv[i] if right_continuous else lv[i - 1])
        vals.append(lv[-1])
        return cls(bp, tuple(Constant(v) for v in lv), tuple(vals))

    @property
    def a(self) -> Fraction:
        return self.breakpoints[0]

    @property
    def b(self) -> Fraction:
        return self.breakpoints[-1]

    def left_limit(self, i: int) -> Fraction | None:
        return None if i == 0 else self.pieces[i - 1].right

    def right_limit(self, i: int) -> Fraction | None:
        return None if i == len(self.pieces) else self.pieces[i].left

    def triple(self, i: int):
        return self.left_limit(i), self.values[i], self.right_limit(i)

    def __call__(self, t) -> Fraction:
        t = Fraction(t)
        bp = self.breakpoints
        if not bp[0] <= t <= bp[-1]:
            raise ValueError(f"{t} outside [{bp[0]}, {bp[-1]}]")
        i = bisect_left(bp, t)
        if i < len(bp) and bp[i] == t:
            return self.values[i]
        return _interp(self.pieces[i - 1], bp[i - 1], bp[i], t)

    def limit(self, t, side: int) -> Fraction:
        """One-sided limit: ``side=-1`` from the left, ``+1`` from the right."""
        t = Fraction(t)
        bp = self.breakpoints
        i = bisect_left(bp, t)
        if i < len(bp) and bp[i] == t:
            lim = self.left_limit(i) if side < 0 else self.right_limit(i)
            return self.values[i] if lim is None else lim
        return self(t)

    def is_continuous(self) -> bool:
        return all(self.values[i] == v for i in range(len(self.values))
                   for v in (self.left_limit(i), self.right_limit(i)) if v is not None)

    def is_unfrayed(self) -> bool:
        for i in range(len(self.values)):
            lo, v, hi = self.triple(i)
            lims = [x for x in (lo, hi) if x is not None]
            if len(lims) == 2 and not min(lims) <= v <= max(lims):
                return False
        return True

    def jumps_at(self, t) -> bool:
        t = Fraction(t)
        i = bisect_left(self.breakpoints, t)
        if i == len(self.breakpoints) or self.breakpoints[i] != t:
            return False
        return any(lim is not None and lim != self.values[i]
                   for lim in (self.left_limit(i), self.right_limit(i)))

    def restrict(self, lo, hi) -> "PiecewiseFn":
        lo, hi = Fraction(lo), Fraction(hi)
        if not self.a <= lo < hi <= self.b:
            raise ValueError(f"[{lo}, {hi}] not inside [{self.a}, {self.b}]")
        bp = self.breakpoints
        i0, i1 = bisect_right(bp, lo), bisect_left(bp, hi)
        inner = list(range(i0, i1))
        pts = [lo] + [bp[i] for i in inner] + [hi]
        vals = [self(lo)] + [self.values[i] for i in inner] + [self(hi)]
        pieces = []
        for x0, x1 in zip(pts, pts[1:]):
            j = bisect_right(bp, x0) - 1
            p, a, b = self.pieces[j], bp[j], bp[j + 1]
            pieces.append(_piece(_interp(p, a, b, x0), _interp(p, a, b, x1)))
        return PiecewiseFn(tuple(pts), tuple(pieces), tuple(vals))

    # serialization
    def to_json(self) -> dict:
        return {
            "breakpoints": [str(b) for b in self.breakpoints],
            "pieces": [
                {"kind": "constant", "value": str(p.value)} if isinstance(p, Constant)
                else {"kind": "linear", "left": str(p.left), "right": str(p.right)}
                for p in self.pieces
            ],
            "values": [str(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PiecewiseFn":
        pieces = []
        for p in data["pieces"]:
            if p["kind"] == "constant":
                pieces.append(Constant(Fraction(p["value"])))
            elif p["kind"] == "linear":
                pieces.append(_piece(p["left"], p["right"]))
            else:
                raise ValueError(f"unknown piece kind {p['kind']!r}")
        return cls(tuple(map(Fraction, data["breakpoints"])), tuple(pieces),
                   tuple(map(Fraction, data["values"])))


def _interp(p: Piece, a: Fraction, b: Fraction, t: Fraction) -> Fraction:
    if isinstance(p, Constant):
        return p.value
    return p.left + (p.right - p.left) * (t - a) / (b - a)


def variation(f: PiecewiseFn) -> Fraction:
    total = sum((abs(p.right - p.left) for p in f.pieces), Fraction(0))
    for i, v in enumerate(f.values):
        for lim in (f.left_limit(i), f.right_limit(i)):
            if lim is not None:
                total += abs(v - lim)
    return total


def variation_on(f: PiecewiseFn, lo, hi) -> Fraction:
    """Variation of ``f`` restricted to the closed interval ``[lo, hi]``."""
    return variation(f.restrict(lo, hi))


def graph_length(f: PiecewiseFn) -> Length:
    out = Length()
    bp = f.breakpoints
    for i, p in enumerate(f.pieces):
        out = out + Length.hypot(bp[i + 1] - bp[i], p.right - p.left)
    jumps = Fraction(0)
    for i, v in enumerate(f.values):
        for lim in (f.left_limit(i), f.right_limit(i)):
            if lim is not None:
                jumps += abs(v - lim)
    return out + jumps


def left_limit_version(f: PiecewiseFn) -> PiecewiseFn:
    """``t -> f(t-)``, keeping ``f(a)`` at the left end."""
    values = [f.values[0]] + [f.left_limit(i) for i in range(1, len(f.values))]
    return PiecewiseFn(f.breakpoints, f.pieces, tuple(values))


@dataclass(frozen=True)
class FunctionInequalities:
    variation: Fraction
    length: Length
    extent: Fraction

    @property
    def ok(self) -> bool:
        upper = self.extent + self.variation
        return self.variation <= self.length <= upper and upper <= self.length.times_sqrt(2)


def function_inequalities(f: PiecewiseFn) -> FunctionInequalities:
    """``V <= l <= (b - a) + V <= sqrt(2) * l``."""
    return FunctionInequalities(variation(f), graph_length(f), f.b - f.a)


# --- polylines ----------------------------------------------------------------

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Polyline:
    vertices: tuple[Point, ...]  # one vertex is the constant path

    def __post_init__(self):
        verts = tuple((Fraction(x), Fraction(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not verts:
            raise ValueError("a polyline needs at least one vertex")
        if any(p == q for p, q in zip(verts, verts[1:])):
            raise ValueError("consecutive vertices must differ")

    @classmethod
    def through(cls, points: Iterable[Sequence]) -> "Polyline":
        """Build from points, dropping consecutive repeats."""
        out: list[Point] = []
        for x, y in points:
            p = (Fraction(x), Fraction(y))
            if not out or out[-1] != p:
                out.append(p)
        return cls(tuple(out))

    def length(self) -> Length:
        out = Length()
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            out = out + Length.hypot(x1 - x0, y1 - y0)
        return out

    def coordinate_variation(self, j: int) -> Fraction:
        return sum((abs(q[j] - p[j]) for p, q in zip(self.vertices, self.vertices[1:])),
                   Fraction(0))

    def to_json(self) -> dict:
        return {"vertices": [[str(x), str(y)] for x, y in self.vertices]}

    @classmethod
    def from_json(cls, data: dict) -> "Polyline":
        return cls(tuple((Fraction(x), Fraction(y)) for x, y in data["vertices"]))


def rectify_monotone(p: Polyline) -> Polyline:
    """Replace the first coordinate by its running maximum.

    On each maximal interval where the running maximum is constant the second
    coordinate is interpolated linearly, which turns every excursion back to
    the left (and every vertical stretch) into one straight vertical segment.
    """
    verts = p.vertices
    out: list[Point] = [verts[0]]
    top = verts[0][0]
    stuck_from: Point | None = None  # point where the current flat stretch began
    for prev, cur in zip(verts, verts[1:]):
        if stuck_from is None:
            if cur[0] > top:
                out.append(cur)
                top = cur[0]
            else:
                stuck_from = prev
            continue
        if cur[0] > top:
            # leave the flat stretch where the segment recrosses x = top
            if prev[0] == top:
                exit_pt = prev
            else:
                lam = (top - prev[0]) / (cur[0] - prev[0])
                exit_pt = (top, prev[1] + lam * (cur[1] - prev[1]))
            out.append(exit_pt)
            out.append(cur)
            top = cur[0]
            stuck_from = None
    if stuck_from is not None:
        out.append((top, verts[-1][1]))
    return Polyline.through(out)


def path_to_function(p: Polyline) -> PiecewiseFn:
    """Unfrayed function whose connected graph is the image of ``p``.

    Vertical runs must be monotone (the polyline is an arc there). An interior
    vertical run ``y0 -> y1`` becomes a right-continuous jump; a run of three
    points keeps the middle one as the value.
    """
    verts = p.vertices
    if any(q[0] < r[0] for r, q in zip(verts, verts[1:])):
        raise ValueError("first coordinate must be nondecreasing")
    if verts[0][0] == verts[-1][0]:
        raise ZeroHorizontalExtent("all vertices share one first coordinate")
    groups: list[tuple[Fraction, list[Fraction]]] = []
    for x, y in verts:
        if groups and groups[-1][0] == x:
            groups[-1][1].append(y)
        else:
            groups.append((x, [y]))
    last = len(groups) - 1
    values = []
    for gi, (x, ys) in enumerate(groups):
        steps = [b - a for a, b in zip(ys, ys[1:])]
        if any(s1 * s2 < 0 for s1, s2 in zip(steps, steps[1:])):
            raise ValueError(f"vertical run at x={x} backtracks; not an arc")
        if len(ys) > 3:
            ys[1:-1] = [ys[-2]]
        if gi == 0:
            values.append(ys[0])
        elif gi == last:
            values.append(ys[-1])
        else:
            values.append(ys[1] if len(ys) == 3 else ys[-1])
        if gi in (0, last) and len(ys) == 3:
            raise ValueError(f"end run at x={x} cannot carry two jumps")
    pieces = tuple(_piece(groups[i][1][-1], groups[i + 1][1][0]) for i in range(last))
    return PiecewiseFn(tuple(g[0] for g in groups), pieces, tuple(values))


def function_to_path(f: PiecewiseFn) -> Polyline:
    if not f.is_unfrayed():
        raise NotUnfrayed("value outside the hull of its one-sided limits")
    pts: list[Point] = []
    for i, x in enumerate(f.breakpoints):
        lo, v, hi = f.triple(i)
        for y in (lo, v, hi):
            if y is not None:
                pts.append((x, y))
    return Polyline.through(pts)


@dataclass(frozen=True)
class LengthVariationReport:
    v1: Fraction
    v2: Fraction
    length: Length
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"V1": str(self.v1), "V2": str(self.v2), "length": self.length.to_json(),
                "checks": self.checks, "ok": self.ok}


def length_variation_report(p: Polyline) -> LengthVariationReport:
    v1, v2, ell = p.coordinate_variation(0), p.coordinate_variation(1), p.length()
    checks = {
        "V1 <= length": v1 <= ell,
        "V2 <= length": v2 <= ell,
        "length <= V1 + V2": ell <= v1 + v2,
        "V1 + V2 <= sqrt2 * length": ell.times_sqrt(2) >= v1 + v2,
    }
    return LengthVariationReport(v1, v2, ell, checks)


def load(path_or_data) -> Union[PiecewiseFn, Polyline]:
    """Read a function or polyline from a JSON file path or parsed dict."""
    if isinstance(path_or_data, dict):
        data = path_or_data
    else:
        with open(path_or_data) as fh:
            data = json.load(fh)
    if "vertices" in data:
        return Polyline.from_json(data)
    if "points" in data:
        return PiecewiseFn.from_points(data["points"])
    return PiecewiseFn.from_json(data)
