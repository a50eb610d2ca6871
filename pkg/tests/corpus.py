"""Seeded random inputs shared by the property tests and the acceptance run."""

import random
from fractions import Fraction as F

from permealab.bv import Constant, PiecewiseFn, Polyline, _piece


def _q(rng, lo=-4, hi=4, den=8):
    return F(rng.randint(lo * den, hi * den), den)


def random_polyline(rng: random.Random, max_vertices: int = 9) -> Polyline:
    n = rng.randint(2, max_vertices)
    pts = [(_q(rng), _q(rng))]
    while len(pts) < n:
        style = rng.random()
        x, y = pts[-1]
        if style < 0.2:
            p = (x, _q(rng))            # vertical step
        elif style < 0.35:
            p = (_q(rng), y)            # horizontal step
        else:
            p = (_q(rng), _q(rng))
        if p != pts[-1]:
            pts.append(p)
    return Polyline(tuple(pts))


def random_unfrayed(rng: random.Random, max_pieces: int = 6) -> PiecewiseFn:
    """Piecewise-linear with jumps; each value lies between its one-sided limits."""
    m = rng.randint(1, max_pieces)
    xs = sorted({F(rng.randint(1, 63), 64) for _ in range(m - 1)})
    bp = (F(0), *xs, F(1))
    pieces = []
    for _ in range(len(bp) - 1):
        if rng.random() < 0.4:
            pieces.append(Constant(_q(rng)))
        else:
            pieces.append(_piece(_q(rng), _q(rng)))
    values = [pieces[0].left]
    for i in range(1, len(bp) - 1):
        lo, hi = sorted((pieces[i - 1].right, pieces[i].left))
        values.append(rng.choice((lo, hi, (lo + hi) / 2)))
    values.append(pieces[-1].right)
    return PiecewiseFn(bp, tuple(pieces), tuple(values))


def random_pw_linear(rng: random.Random, max_pieces: int = 6, allow_flat: bool = False) -> PiecewiseFn:
    """Continuous piecewise-linear g on [0, 1]."""
    m = rng.randint(1, max_pieces)
    xs = sorted({F(rng.randint(1, 31), 32) for _ in range(m - 1)})
    bp = (F(0), *xs, F(1))
    ys = [_q(rng, -2, 2)]
    for _ in range(len(bp) - 1):
        y = _q(rng, -2, 2)
        while y == ys[-1] and not allow_flat:
            y = _q(rng, -2, 2)
        ys.append(y)
    return PiecewiseFn.from_points(zip(bp, ys))
