"""Nested chains of rectangles, addressed lazily by index paths.

A scheme never materializes a full level. Every rectangle is computed on
demand by walking the orientation pattern from the root.
"""

from __future__ import annotations

import enum
import re
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Sequence

from .errors import EnumerationLimitExceeded, IndexOutOfPattern


class Orientation(enum.Enum):
    ASCENDING = "Ascending"
    DESCENDING = "Descending"

    @property
    def sign(self) -> int:
        return 1 if self is Orientation.ASCENDING else -1

    def flipped(self) -> "Orientation":
        if self is Orientation.ASCENDING:
            return Orientation.DESCENDING
        return Orientation.ASCENDING


ASC = Orientation.ASCENDING
DESC = Orientation.DESCENDING


@dataclass(frozen=True)
class Rect:
    x: Fraction
    y: Fraction
    w: Fraction
    h: Fraction
    orient: Orientation
    entry: Fraction
    exit: Fraction
    level: int
    index: int
    path: tuple[int, ...]

    @property
    def right(self) -> Fraction:
        return self.x + self.w

    @property
    def top(self) -> Fraction:
        return self.y + self.h

    def orientation_ok(self) -> bool:
        quarter = self.h / 4
        if self.orient is ASC:
            return self.entry == self.y + quarter and self.exit == self.y + 3 * quarter
        return self.entry == self.y + 3 * quarter and self.exit == self.y + quarter


Run = tuple[int, Orientation]


@dataclass(frozen=True)
class Scheme:
    """Generator for a nested sequence of rectangle chains.

    ``pattern(parent_orientation, level)`` returns the runs of children at
    ``level`` (the children of a level ``level - 1`` rectangle).
    """

    name: str
    heights: Callable[[int], Fraction]
    subdivision: Callable[[int], int]
    pattern: Callable[[Orientation, int], tuple[Run, ...]]
    root: Rect
    descriptor: dict = field(default_factory=dict, compare=False)

    def __hash__(self) -> int:
        return hash(self.name)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Scheme) and self.name == other.name \
            and self.descriptor == other.descriptor

    def width(self, level: int) -> Fraction:
        return _width(self, level)


@dataclass
class _Layout:
    runs: tuple[Run, ...]
    starts: list[int]   # 0-based position of each run's first child
    offsets: list[int]  # signed half-height steps accumulated before each run
    total: int


@lru_cache(maxsize=256)
def _layout(s: Scheme, orient: Orientation, level: int) -> _Layout:
    runs = s.pattern(orient, level)
    starts, offsets = [], []
    pos = off = 0
    for length, o in runs:
        starts.append(pos)
        offsets.append(off)
        pos += length
        off += o.sign * length
    return _Layout(runs, starts, offsets, pos)


@lru_cache(maxsize=256)
def _width(s: Scheme, level: int) -> Fraction:
    w = Fraction(1)
    for k in range(1, level + 1):
        w /= s.subdivision(k)
    return w


def _make_rect(x, w, h, orient, entry, level, index, path) -> Rect:
    half = h / 2
    if orient is ASC:
        y = entry - h / 4
        exit_ = entry + half
    else:
        y = entry - 3 * h / 4
        exit_ = entry - half
    return Rect(x, y, w, h, orient, entry, exit_, level, index, path)


def child(s: Scheme, parent: Rect, n: int) -> Rect:
    """The ``n``-th child (1-based) of ``parent``."""
    level = parent.level + 1
    d = s.subdivision(level)
    if not 1 <= n <= d:
        raise IndexOutOfPattern(f"index {n} outside 1..{d} at level {level}")
    lay = _layout(s, parent.orient, level)
    r = bisect_right(lay.starts, n - 1) - 1
    orient = lay.runs[r][1]
    steps = lay.offsets[r] + orient.sign * (n - 1 - lay.starts[r])
    h = s.heights(level)
    w = _width(s, level)
    entry = parent.entry + steps * h / 2
    return _make_rect(parent.x + (n - 1) * w, w, h, orient, entry, level,
                      (parent.index - 1) * d + n, parent.path + (n,))


def children(s: Scheme, parent: Rect) -> Iterator[Rect]:
    """All children of ``parent`` in order, walking the runs incrementally."""
    level = parent.level + 1
    d = s.subdivision(level)
    h = s.heights(level)
    w = _width(s, level)
    half, quarter = h / 2, h / 4
    entry = parent.entry
    n = 0
    base = (parent.index - 1) * d
    for length, orient in s.pattern(parent.orient, level):
        step = half if orient is ASC else -half
        low = quarter if orient is ASC else 3 * quarter
        for _ in range(length):
            n += 1
            exit_ = entry + step
            yield Rect(parent.x + (n - 1) * w, entry - low, w, h, orient, entry,
                       exit_, level, base + n, parent.path + (n,))
            entry = exit_


def run_segments(s: Scheme, parent: Rect):
    """Yield ``(first_position, length, orientation, offset)`` per run.

    Positions are 0-based within the parent; ``offset`` counts the signed
    half-height steps between the parent's entry and the run's first entry.
    """
    lay = _layout(s, parent.orient, parent.level + 1)
    for (length, orient), start, off in zip(lay.runs, lay.starts, lay.offsets):
        yield start, length, orient, off


def rectangle(s: Scheme, path: Sequence[int]) -> Rect:
    r = s.root
    for n in path:
        r = child(s, r, n)
    return r


def locate(s: Scheme, t, k: int) -> tuple[int, ...]:
    return rect_at(s, t, k).path


def rect_at(s: Scheme, t, k: int) -> Rect:
    """Level-``k`` rectangle containing ``t``; the larger index wins on ties."""
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise ValueError(f"t={t} outside [0, 1]")
    r = s.root
    for level in range(1, k + 1):
        d = s.subdivision(level)
        n = min(int((t - r.x) / _width(s, level)) + 1, d)
        r = child(s, r, n)
    return r


# --- built-in schemes -------------------------------------------------------

def _root() -> Rect:
    return _make_rect(Fraction(0), Fraction(1), Fraction(10), DESC,
                      Fraction(5, 2), 0, 1, ())


def _tenfold_heights(k: int) -> Fraction:
    return Fraction(10, 10 ** k)


def _strip_pattern(lead: int, runs: int, run_length: int, tail: int):
    def pattern(orient: Orientation, level: int) -> tuple[Run, ...]:
        first, other = orient, orient.flipped()
        out = [(lead, first)]
        out += [(run_length, other if i % 2 == 0 else first) for i in range(runs(level))]
        out.append((tail, other))
        return tuple(out)
    return pattern


_gh_pattern = lru_cache(maxsize=None)(_strip_pattern(14, lambda k: 12, 18, 4))
_gc_pattern = lru_cache(maxsize=None)(_strip_pattern(14, lambda k: 100 ** k, 18, 4))


def scheme_gH() -> Scheme:
    return _GH


def scheme_gC() -> Scheme:
    return _GC


_GH = Scheme("gH", _tenfold_heights, lambda k: 234, _gh_pattern, _root(),
             {"name": "gH", "heights": "10*10^-k", "subdivision": "234", "pattern": "gH"})
_GC = Scheme("gC", _tenfold_heights, lambda k: 18 * 100 ** k + 18, _gc_pattern, _root(),
             {"name": "gC", "heights": "10*10^-k", "subdivision": "18*100^k+18",
              "pattern": "gC"})

BUILTIN = {"gH": _GH, "gC": _GC}


def get_scheme(name: str) -> Scheme:
    try:
        return BUILTIN[name]
    except KeyError:
        raise ValueError(f"unknown scheme {name!r}; expected one of {sorted(BUILTIN)}") from None


# --- descriptors ------------------------------------------------------------

_POWER_FORM = re.compile(r"^\s*(\d+)\s*\*\s*(\d+)\s*\^\s*-k\s*$")


def _parse_heights(text: str) -> Callable[[int], Fraction]:
    m = _POWER_FORM.match(text)
    if not m:
        raise ValueError(f"unsupported heights formula {text!r}; use 'a*b^-k'")
    a, b = int(m.group(1)), int(m.group(2))
    return lambda k: Fraction(a, b ** k)


def _parse_orientation(tag: str) -> Orientation:
    tag = tag.strip().lower()
    if tag in ("a", "asc", "ascending"):
        return ASC
    if tag in ("d", "desc", "descending"):
        return DESC
    raise ValueError(f"unknown orientation {tag!r}")


def scheme_from_descriptor(desc: dict) -> Scheme:
    """Build a scheme from its JSON descriptor.

    ``pattern`` is ``"gH"``, ``"gC"`` or a table
    ``{"descending": [[14, "D"], ...], "ascending": [...]}`` reused at every
    level. ``subdivision`` may be a list indexed by level (1-based) and is
    otherwise taken from the pattern.
    """
    name = desc.get("name", "custom")
    pattern_id = desc.get("pattern")
    if pattern_id in BUILTIN and set(desc) <= {"name", "heights", "subdivision", "pattern"} \
            and desc.get("heights", "10*10^-k") == "10*10^-k":
        return BUILTIN[pattern_id]
    heights = _parse_heights(desc.get("heights", "10*10^-k")) \
        if isinstance(desc.get("heights", ""), str) else _list_heights(desc["heights"])
    if pattern_id == "gH":
        pattern = _gh_pattern
    elif pattern_id == "gC":
        pattern = _gc_pattern
    elif isinstance(pattern_id, dict):
        table = {
            DESC: tuple((int(n), _parse_orientation(o)) for n, o in pattern_id["descending"]),
            ASC: tuple((int(n), _parse_orientation(o)) for n, o in pattern_id["ascending"]),
        }

        def pattern(orient, level, _t=table):
            return _t[orient]
    else:
        raise ValueError(f"unsupported pattern {pattern_id!r}")
    sub = desc.get("subdivision")
    if isinstance(sub, list):
        def subdivision(k, _s=tuple(int(v) for v in sub)):
            return _s[k - 1]
    else:
        def subdivision(k):
            return sum(n for n, _ in pattern(DESC, k))
    return Scheme(name, heights, subdivision, pattern, _root(), dict(desc))


def _list_heights(values):
    vals = tuple(Fraction(v) for v in values)
    return lambda k: vals[k]


# --- validation -------------------------------------------------------------

@dataclass
class ValidationReport:
    ok: bool
    levels: int
    parents_checked: int = 0
    children_checked: int = 0
    violation: str | None = None
    level: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _mirror(r: Rect) -> Rect:
    return _make_rect(r.x, r.w, r.h, r.orient.flipped(), r.y + r.h - (r.entry - r.y),
                      r.level, r.index, r.path)


def validate(s: Scheme, k: int, limit: int = 5_000_000) -> ValidationReport:
    """Check tiling, step sizes, chain continuity and nesting up to level ``k``.

    One representative parent of each orientation is checked per level.
    """
    report = ValidationReport(True, k)

    def fail(kind, level, detail):
        report.ok, report.violation, report.level, report.detail = False, kind, level, detail
        return report

    reps = {DESC: s.root, ASC: _mirror(s.root)} if s.root.orient is DESC \
        else {ASC: s.root, DESC: _mirror(s.root)}
    for level in range(1, k + 1):
        d = s.subdivision(level)
        if d < 2:
            return fail("Subdivision", level, f"d={d} < 2")
        if s.heights(level) >= s.heights(level - 1):
            return fail("NestingHeight", level,
                        f"h_{level}={s.heights(level)} >= h_{level - 1}={s.heights(level - 1)}")
        if 2 * len(s.pattern(DESC, level)) > limit:
            raise EnumerationLimitExceeded(f"level {level} has too many runs per parent")
        next_reps: dict[Orientation, Rect] = {}
        for orient in (DESC, ASC):
            parent = reps[orient]
            if sum(n for n, _ in s.pattern(orient, level)) != d:
                return fail("PatternLength", level, f"runs do not sum to {d}")
            report.parents_checked += 1
            prev = None
            # Within a run entries move monotonically, so the run's end
            # children carry its vertical extremes.
            for start, length, _, _ in run_segments(s, parent):
                first = child(s, parent, start + 1)
                last = child(s, parent, start + length) if length > 1 else first
                report.children_checked += length
                for c in (first, last):
                    if not c.orientation_ok():
                        return fail("Orientation", level, f"child {c.path}")
                    if abs(c.exit - c.entry) > c.h:
                        return fail("StepHeight", level, f"child {c.path}")
                    if c.y < parent.y or c.top > parent.top:
                        return fail("Nesting", level, f"child {c.path} leaves parent span")
                if last.x - first.x != (length - 1) * first.w:
                    return fail("Tiling", level, f"run starting at {first.path}")
                if prev is None:
                    if first.x != parent.x or first.entry != parent.entry:
                        return fail("ChainContinuity", level, f"first child of {parent.path}")
                elif first.x != prev.right or first.entry != prev.exit:
                    return fail("ChainContinuity", level, f"child {first.path}")
                next_reps.setdefault(first.orient, first)
                prev = last
            if prev.right != parent.right or prev.exit != parent.exit:
                return fail("ChainContinuity", level, f"last child of {parent.path}")
        for orient in (DESC, ASC):
            if orient not in next_reps:
                next_reps[orient] = _mirror(next_reps[orient.flipped()])
        reps = next_reps
    return report
