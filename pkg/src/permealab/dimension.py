"""Mass distribution on good-crossing trees and box-counting estimates."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bv import PiecewiseFn
from .chains import Scheme
from .crossings import DEFAULT_BUDGET, CrossTree, GoodTree, _good_children, cover_counts
from .errors import DegenerateInput, EnumerationLimitExceeded, ZeroXi


@dataclass
class MassNode:
    tree: CrossTree
    nu: Fraction
    children: list["MassNode"] = field(default_factory=list)

    @property
    def level(self) -> int:
        return self.tree.rect.level


@dataclass
class MassTree:
    root: MassNode
    source: GoodTree

    @property
    def depth(self) -> int:
        return self.source.depth

    def level_masses(self, level: int) -> list[tuple[Fraction, int]]:
        """``(nu, multiplicity)`` pairs covering every good node at ``level``.

        Unmaterialized leaves share their parent's mass equally.
        """
        if not 0 <= level <= self.depth:
            raise ValueError(f"level {level} outside the tree depth {self.depth}")
        nodes = [self.root]
        for _ in range(level - 1 if level else 0):
            nodes = [c for n in nodes for c in n.children]
        if level == 0:
            return [(self.root.nu, 1)]
        if self.source.leaves_materialized or level < self.depth:
            return [(c.nu, 1) for n in nodes for c in n.children]
        return [(n.nu / n.tree.xi, n.tree.xi) for n in nodes if n.tree.xi]

    def total(self, level: int) -> Fraction:
        return sum((nu * m for nu, m in self.level_masses(level)), Fraction(0))


def mass_tree(t: GoodTree) -> MassTree:
    root = MassNode(t.root, Fraction(1))
    stack = [root]
    while stack:
        node = stack.pop()
        xi = node.tree.xi
        if xi is None:
            continue
        if xi == 0:
            raise ZeroXi(f"good node {node.tree.node} has no good children")
        share = node.nu / xi
        node.children = [MassNode(c, share) for c in node.tree.children]
        stack.extend(node.children)
    return MassTree(root, t)


def k_s(s) -> int:
    """Least ``k`` with ``log(100^k - 10) / log(18 * 100^k + 18) > s``.

    Decided without logarithms: ``(100^k - 10)^q > (18 * 100^k + 18)^p``
    for ``s = p/q``.
    """
    s = Fraction(s)
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    p, q = s.numerator, s.denominator
    k = 0
    while True:
        low = 100 ** k - 10
        if low > 1 and low ** q > (18 * 100 ** k + 18) ** p:
            return k
        k += 1


def _mass_within(nu: Fraction, const: int, width: Fraction, s: Fraction) -> bool:
    """Exact test of ``nu <= const * width**s``."""
    p, q = s.numerator, s.denominator
    return nu.numerator ** q * width.denominator ** p <= \
        const ** q * width.numerator ** p * nu.denominator ** q


def verify_mass_bound(m: MassTree, s, level: int) -> bool:
    """``nu <= 21^(k_s - 1) * |F|^s`` for every node at ``level``."""
    s = Fraction(s)
    masses = m.level_masses(level)
    if not masses:
        return True
    const = 21 ** (k_s(s) - 1)
    width = m.source.scheme.width(level)
    return _mass_within(max(nu for nu, _ in masses), const, width, s)


@dataclass(frozen=True)
class WindowCheck:
    ok: bool
    constant: int
    windows: int
    violation: tuple[int, int] | None = None  # 1-based child positions

    def __bool__(self) -> bool:
        return self.ok


def md_lower_bound(m: MassTree, s, level: int, budget: int = DEFAULT_BUDGET) -> WindowCheck:
    """Check ``nu(U) <= 3 * 21^k_s * |U|^s`` over windows of consecutive boxes.

    Windows run over the children of one representative parent: the root at
    level 1, the leftmost good node of level ``level - 1`` deeper down. All
    good siblings carry equal mass, so for each count ``c`` only the
    shortest window holding ``c`` good children needs checking.
    """
    s = Fraction(s)
    if not 1 <= level <= m.depth:
        raise ValueError(f"level {level} outside 1..{m.depth}")
    parents = [m.root]
    for _ in range(level - 1):
        parents = [c for p in parents for c in p.children]
    parent = next((p for p in parents if p.tree.xi), None)
    const = 3 * 21 ** k_s(s)
    if parent is None:
        return WindowCheck(True, const, 0)
    if parent.children:
        positions = [c.tree.node[-1] for c in parent.children]
    else:
        kids, _ = _good_children(m.source.f, m.source.scheme, parent.tree.rect,
                                 [budget], True, [])
        positions = [c.node[-1] for c in kids]
    g = len(positions)
    if g * (g + 1) // 2 > budget:
        raise EnumerationLimitExceeded(f"{g} good children give too many windows")
    nu = parent.nu / g
    w = m.source.scheme.width(level)
    checked = 0
    for c in range(1, g + 1):
        span, at = min((positions[a + c - 1] - positions[a] + 1, a) for a in range(g - c + 1))
        checked += g - c + 1
        if not _mass_within(c * nu, const, span * w, s):
            return WindowCheck(False, const, checked, (positions[at], positions[at + c - 1]))
    return WindowCheck(True, const, checked)


def branching_certificate(branching: int, subdivision: int, s) -> bool:
    """Masses ``branching^-l`` stay below widths ``subdivision^-l`` to the power s."""
    s = Fraction(s)
    return subdivision ** s.numerator <= branching ** s.denominator


# --- box counting -------------------------------------------------------------

@dataclass(frozen=True)
class BoxCount:
    level: int
    count: int | Fraction
    width: Fraction


def _log(v) -> float:
    v = Fraction(v)
    return math.log(v.numerator) - math.log(v.denominator)


def box_dim(counts: Sequence[BoxCount]) -> float:
    """Least-squares slope of ``log count`` against ``log(1/width)``."""
    usable = [c for c in counts if c.count > 0]
    if not usable:
        raise DegenerateInput("all counts are zero")
    if len({c.width for c in usable}) < 2:
        raise DegenerateInput("need at least two distinct widths with nonzero counts")
    xs = [-_log(c.width) for c in usable]
    ys = [_log(c.count) for c in usable]
    return statistics.linear_regression(xs, ys).slope


def box_counts(f: PiecewiseFn, s: Scheme, levels: int,
               budget: int = DEFAULT_BUDGET) -> list[BoxCount]:
    counts = cover_counts(f, s, levels, budget)
    return [BoxCount(k, c, s.width(k)) for k, c in enumerate(counts)]


def running_slopes(counts: Sequence[BoxCount]) -> list[float | None]:
    out: list[float | None] = []
    for i in range(len(counts)):
        try:
            out.append(box_dim(counts[: i + 1]))
        except DegenerateInput:
            out.append(None)
    return out
