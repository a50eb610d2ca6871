"""Up/down crossings of scheme rectangles and the good-crossing tree.

Children are never scanned one by one where ``f`` is constant: each run of
the orientation pattern moves entries by a fixed half-height step, so the
children a constant value can cross (or whose box it meets) are found by
solving a linear inequality per run. Only children whose closed interval
contains a breakpoint of ``f`` are classified directly, plus every child
over a linear piece.
"""

from __future__ import annotations

import enum
import json
import math
import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .bv import Constant, PiecewiseFn, variation, variation_on
from .chains import ASC, DESC, Rect, Scheme, child, children, run_segments
from .errors import DomainMismatch, EnumerationLimitExceeded, VerificationFailed

DEFAULT_BUDGET = 5_000_000


class Kind(enum.Enum):
    NONE = "None"
    UP = "Up"
    DOWN = "Down"


@dataclass(frozen=True)
class Crossing:
    kind: Kind
    good: bool
    local_variation: Fraction | None
    edge_jump: bool = False  # f jumps exactly at one of the rectangle's edges


def classify(f: PiecewiseFn, r: Rect) -> Crossing:
    if r.x < f.a or r.right > f.b:
        raise DomainMismatch(f"rectangle x-range [{r.x}, {r.right}] outside [{f.a}, {f.b}]")
    left, right = f(r.x), f(r.right)
    kind = Kind.NONE
    if r.orient is DESC and left <= r.entry and right >= r.exit:
        kind = Kind.UP
    elif r.orient is ASC and left >= r.entry and right <= r.exit:
        kind = Kind.DOWN
    edge = f.jumps_at(r.x) or f.jumps_at(r.right)
    if kind is Kind.NONE:
        return Crossing(kind, False, None, edge)
    v = variation_on(f, r.x, r.right)
    return Crossing(kind, v < Fraction(1, 10 ** r.level), v, edge)


# --- pruned child scans -------------------------------------------------------

def _run_window(num: int, den: int, lo_q: int, hi_q: int,
                off: int, sign: int) -> tuple[int, int]:
    """Positions ``i`` whose entry lies in the window around a constant.

    Units are quarter-heights relative to the parent's entry: the constant
    sits at ``num / den`` and the entry of position ``i`` at
    ``2 * (off + sign * i)``; the window is ``[lo_q, hi_q]`` around the
    constant.
    """
    lo = num + lo_q * den
    hi = num + hi_q * den
    step = 2 * den
    base = 2 * off * den
    if sign > 0:
        return -((base - lo) // step), (hi - base) // step
    return -((hi - base) // step), (base - lo) // step


# Entry windows, in quarter-heights around the constant, for each mode.
_WINDOWS = {
    ("cross", DESC): (0, 2),
    ("cross", ASC): (-2, 0),
    ("cover", DESC): (-1, 3),
    ("cover", ASC): (-3, 1),
}


def _scan(f: PiecewiseFn, s: Scheme, parent: Rect, mode: str,
          budget: list[int]) -> Iterator[tuple[int, bool]]:
    """Yield ``(child_index, certain)`` for children that may hit ``f``.

    ``certain`` children lie over a constant piece and hit by construction;
    the others must be checked explicitly. Children not yielded cannot hit.
    """
    level = parent.level + 1
    d = s.subdivision(level)
    w = s.width(level)
    quarter = s.heights(level) / 4
    bp = f.breakpoints
    x0, x1 = parent.x, parent.right

    special: set[int] = set()
    for b in bp[bisect_left(bp, x0):bisect_right(bp, x1)]:
        u = (b - x0) / w
        n = math.floor(u)  # 0-based position whose closed interval holds b
        special.update(p for p in (n - 1, n) if 0 <= p < d and (p == n or u == n))

    runs = list(run_segments(s, parent))
    starts = [r[0] for r in runs]
    j0 = max(bisect_right(bp, x0) - 1, 0)
    j1 = min(bisect_left(bp, x1), len(f.pieces))
    for j in range(j0, j1):
        u = (bp[j] - x0) / w
        v = (bp[j + 1] - x0) / w
        i_lo = max(math.floor(u) + 1, 0)
        i_hi = min(math.ceil(v) - 2, d - 1)
        if i_lo > i_hi:
            continue
        piece = f.pieces[j]
        if not isinstance(piece, Constant):
            budget[0] -= i_hi - i_lo + 1
            if budget[0] < 0:
                raise EnumerationLimitExceeded("linear piece scan exceeds node budget")
            for i in range(i_lo, i_hi + 1):
                yield i + 1, False
            continue
        delta = (piece.value - parent.entry) / quarter
        num, den = delta.numerator, delta.denominator
        r = bisect_right(starts, i_lo) - 1
        while r < len(runs) and runs[r][0] <= i_hi:
            start, length, orient, lay_off = runs[r]
            lo_off, hi_off = _WINDOWS[(mode, orient)]
            a, b = _run_window(num, den, lo_off, hi_off, lay_off, orient.sign)
            a = max(a, 0, i_lo - start)
            b = min(b, length - 1, i_hi - start)
            for i in range(a, b + 1):
                yield start + i + 1, True
            r += 1
    for p in sorted(special):
        yield p + 1, False


def _graph_meets(f: PiecewiseFn, x0: Fraction, x1: Fraction,
                 y0: Fraction, y1: Fraction) -> bool:
    """Does the closure of the graph of ``f`` over ``[x0, x1]`` meet ``[y0, y1]``?"""
    bp = f.breakpoints
    ranges = []
    for i in range(bisect_left(bp, x0), bisect_right(bp, x1)):
        for v in f.triple(i):
            if v is not None:
                ranges.append((v, v))
    ranges.append((f.limit(x0, -1), f.limit(x0, -1)))
    ranges.append((f.limit(x1, +1), f.limit(x1, +1)))
    j0 = max(bisect_right(bp, x0) - 1, 0)
    j1 = min(bisect_left(bp, x1), len(f.pieces))
    for j in range(j0, j1):
        a, b = max(bp[j], x0), min(bp[j + 1], x1)
        if a >= b:
            continue
        lo, hi = f.limit(a, +1), f.limit(b, -1)
        ranges.append((min(lo, hi), max(lo, hi)))
    return any(lo <= y1 and hi >= y0 for lo, hi in ranges)


# --- trees --------------------------------------------------------------------

@dataclass
class CrossTree:
    node: tuple[int, ...]
    rect: Rect
    crossing: Crossing
    children: list["CrossTree"] = field(default_factory=list)
    xi: int | None = None  # None: not expanded

    def walk(self) -> Iterator["CrossTree"]:
        stack = [self]
        while stack:
            t = stack.pop()
            yield t
            stack.extend(reversed(t.children))

    @property
    def depth(self) -> int:
        """Number of expanded levels below this node."""
        d, t = 0, self
        while t.xi is not None:
            d += 1
            if not t.children:
                break
            t = t.children[0]
        return d


@dataclass
class GoodTree:
    root: CrossTree
    scheme: Scheme
    depth: int
    leaves_materialized: bool
    nodes: int
    edge_jumps: list[tuple[int, ...]] = field(default_factory=list)
    f: PiecewiseFn | None = None

    def level_nodes(self, level: int) -> list[CrossTree]:
        out = [self.root]
        for _ in range(level):
            out = [c for t in out for c in t.children]
        return out

    def to_json(self) -> dict:
        rows = []
        for t in self.root.walk():
            rows.append({"path": list(t.node), "kind": t.crossing.kind.value,
                         "good": t.crossing.good, "xi": t.xi})
        return {"scheme": self.scheme.name, "depth": self.depth,
                "edge_jumps": [list(p) for p in self.edge_jumps], "nodes": rows}


def _check_domain(f: PiecewiseFn, s: Scheme) -> None:
    if f.a > s.root.x or f.b < s.root.right:
        raise DomainMismatch(f"f is defined on [{f.a}, {f.b}], scheme needs "
                             f"[{s.root.x}, {s.root.right}]")


def _good_children(f, s, parent, budget, materialize, edges):
    """Good-crossed children of ``parent``, or just their count."""
    out, count = [], 0
    seen = set()
    for n, certain in _scan(f, s, parent, "cross", budget):
        if n in seen:
            continue
        seen.add(n)
        if certain:
            count += 1
            if materialize:
                r = child(s, parent, n)
                out.append(CrossTree(r.path, r, Crossing(
                    Kind.UP if r.orient is DESC else Kind.DOWN, True, Fraction(0))))
            continue
        r = child(s, parent, n)
        c = classify(f, r)
        if c.edge_jump:
            edges.append(r.path)
        if c.good:
            count += 1
            if materialize:
                out.append(CrossTree(r.path, r, c))
    out.sort(key=lambda t: t.node)
    return out, count


def good_tree(f: PiecewiseFn, s: Scheme, depth: int, budget: int = DEFAULT_BUDGET,
              materialize_leaves: bool = True) -> GoodTree:
    """Expand good crossings level by level down to ``depth``.

    With ``materialize_leaves=False`` the deepest level is only counted,
    which keeps wide schemes within budget; ``xi`` is still exact.
    """
    _check_domain(f, s)
    remaining = [budget]
    root = CrossTree((), s.root, classify(f, s.root))
    edges: list[tuple[int, ...]] = []
    frontier = [root]
    nodes, ratio = 1, None
    for level in range(1, depth + 1):
        last = level == depth
        if ratio is not None:
            # geometric projection over the levels still to come
            projected, width = nodes, len(frontier)
            for _ in range(level, depth + 1):
                width *= ratio
                projected += width
                if projected > budget:
                    raise EnumerationLimitExceeded(
                        f"depth {depth} projected to exceed the node budget of {budget}"
                        f" (observed branching {ratio:.1f} at level {level - 1})")
        nxt = []
        for t in frontier:
            kids, count = _good_children(f, s, t.rect, remaining,
                                         materialize_leaves or not last, edges)
            t.children, t.xi = kids, count
            nodes += count
            remaining[0] -= count
            if remaining[0] < 0:
                raise EnumerationLimitExceeded(f"node budget of {budget} exceeded")
            nxt.extend(kids)
        ratio = len(nxt) / len(frontier) if frontier and nxt else ratio
        frontier = nxt
    return GoodTree(root, s, depth, materialize_leaves, nodes, edges, f)


def branching_threshold(s: Scheme, level: int) -> int:
    """Least good-child count owed by a good node whose children sit at ``level``."""
    if s.name == "gC":
        return 100 ** level - 10
    return 2


def branching_failures(t: GoodTree) -> list[tuple[tuple[int, ...], int, int]]:
    out = []
    for node in t.root.walk():
        if node.xi is None:
            continue
        need = branching_threshold(t.scheme, node.rect.level + 1)
        if node.xi < need:
            out.append((node.node, node.xi, need))
    return out


def verify_branching(t: GoodTree, s: Scheme | None = None) -> bool:
    if s is not None and s != t.scheme:
        raise ValueError("tree was built for a different scheme")
    return not branching_failures(t)


# --- covering counts ----------------------------------------------------------

def covering_bound(k: int, v) -> Fraction:
    return 42 ** k * (1 + Fraction(v) / 16)


def cover_counts(f: PiecewiseFn, s: Scheme, k: int,
                 budget: int = DEFAULT_BUDGET) -> list[int]:
    """``[m_0, ..., m_k]``: level-``l`` boxes meeting the closed graph of ``f``."""
    _check_domain(f, s)
    remaining = [budget]
    r0 = s.root
    frontier = [r0] if _graph_meets(f, r0.x, r0.right, r0.y, r0.top) else []
    counts = [len(frontier)]
    for level in range(1, k + 1):
        last = level == k
        nxt, count = [], 0
        for parent in frontier:
            seen = set()
            for n, certain in _scan(f, s, parent, "cover", remaining):
                if n in seen:
                    continue
                seen.add(n)
                if certain:
                    count += 1
                    if not last:
                        nxt.append(child(s, parent, n))
                    continue
                r = child(s, parent, n)
                if _graph_meets(f, r.x, r.right, r.y, r.top):
                    count += 1
                    if not last:
                        nxt.append(r)
        remaining[0] -= count
        if remaining[0] < 0:
            raise EnumerationLimitExceeded(f"node budget of {budget} exceeded")
        counts.append(count)
        frontier = nxt
    return counts


def cover_count(f: PiecewiseFn, s: Scheme, k: int, budget: int = DEFAULT_BUDGET) -> int:
    """Level-``k`` box count; raises if the covering bound fails while ``V <= 1``."""
    m = cover_counts(f, s, k, budget)[-1]
    v = variation(f)
    if s.name == "gH" and v <= 1 and m > covering_bound(k, v):
        raise VerificationFailed(f"m_{k}={m} exceeds 42^{k}(1+V/16) with V={v}")
    return m


def census(f: PiecewiseFn, s: Scheme, parent: Rect) -> list[tuple[Rect, Crossing]]:
    """Classify every child of ``parent`` directly; the unpruned reference."""
    return [(r, classify(f, r)) for r in children(s, parent)]


def nongood_variation(f: PiecewiseFn, s: Scheme, parent: Rect) -> tuple[int, Fraction]:
    """Count and summed local variation of crossed but non-good children."""
    n, total = 0, Fraction(0)
    for _, c in census(f, s, parent):
        if c.kind is not Kind.NONE and not c.good:
            n += 1
            total += c.local_variation
    return n, total


# --- adversaries --------------------------------------------------------------

def random_attacker(rng: random.Random, s: Scheme | None = None,
                    max_jumps: int = 8) -> PiecewiseFn:
    """Piecewise-constant ``f`` with ``f(0) = 0`` and variation below 1.

    Jump locations mix uniform points, exact level-1/2 boundaries and tight
    clusters inside one level-2 rectangle, so edge coincidences and
    concentrated variation both occur.
    """
    d1 = s.subdivision(1) if s is not None else 234
    d2 = s.subdivision(2) if s is not None else 234
    m = rng.randint(1, max_jumps)
    total = Fraction(rng.randint(1, 999), 1000)
    cuts = sorted(rng.randint(1, 10 ** 6 - 1) for _ in range(m - 1))
    parts = [Fraction(b - a, 10 ** 6) * total for a, b in zip([0] + cuts, cuts + [10 ** 6])]
    style = rng.choice(("uniform", "boundary", "cluster"))
    xs: set[Fraction] = set()
    while len(xs) < m:
        if style == "uniform":
            x = Fraction(rng.randint(1, 10 ** 6 - 1), 10 ** 6)
        elif style == "boundary":
            if rng.random() < 0.5:
                x = Fraction(rng.randint(1, d1 - 1), d1)
            else:
                x = Fraction(rng.randint(1, d1 * d2 - 1), d1 * d2)
        else:
            base = Fraction(rng.randint(0, d1 * d2 - 1), d1 * d2)
            x = base + Fraction(rng.randint(1, 999), 1000 * d1 * d2)
        if 0 < x < 1:
            xs.add(x)
    levels = [Fraction(0)]
    for p in parts:
        levels.append(levels[-1] + (p if rng.random() < 0.5 else -p))
    pts = sorted(xs)
    bp = (Fraction(0), *pts, Fraction(1))
    vals = [Fraction(0)]
    for i in range(1, len(bp) - 1):
        vals.append(levels[i] if rng.random() < 0.5 else levels[i - 1])
    vals.append(levels[-1])
    return PiecewiseFn(bp, tuple(Constant(v) for v in levels), tuple(vals))


def tree_json(t: GoodTree) -> str:
    return json.dumps(t.to_json(), sort_keys=True)
