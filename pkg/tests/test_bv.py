import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from corpus import random_polyline, random_unfrayed
from permealab import bv
from permealab.bv import Constant, Length, Linear, PiecewiseFn, Polyline
from permealab.errors import NotUnfrayed, ZeroHorizontalExtent

STEP = PiecewiseFn.step([0, 1], [F(1, 2)])
IDENTITY = PiecewiseFn.from_points([(0, 0), (1, 1)])


# --- Length -------------------------------------------------------------------

def test_length_merges_square_classes():
    assert Length.sqrt(8) == Length.sqrt(2) * 2
    assert Length.sqrt(8) + Length.sqrt(2) == Length.sqrt(18)
    assert Length.sqrt(4) == 2
    assert (Length.sqrt(2) - Length.sqrt(2)).is_zero()


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=0, max_value=50, max_denominator=30),
       st.fractions(min_value=0, max_value=50, max_denominator=30))
def test_length_order_matches_squares(a, b):
    assert (Length.sqrt(a) < Length.sqrt(b)) == (a < b)
    assert (Length.sqrt(a) == Length.sqrt(b)) == (a == b)


def test_length_sign_of_close_values():
    # sqrt(2) + sqrt(3) vs sqrt(10): 3.1462... vs 3.1623...
    assert Length.sqrt(2) + Length.sqrt(3) < Length.sqrt(10)
    lo, hi = (Length.sqrt(2) + 1).enclosure(20)
    assert lo <= F(24142135623730950488, 10 ** 19) <= hi


# --- functions ----------------------------------------------------------------

def test_variation_examples():
    assert bv.variation(STEP) == 1
    assert bv.variation(IDENTITY) == 1
    tube = PiecewiseFn((F(0), F(1, 4), F(1)), (Constant(F(1, 2)), Constant(F(0))),
                       (F(0), F(1, 2), F(0)))
    assert bv.variation(tube) == 1


def test_graph_length_examples():
    assert bv.graph_length(PiecewiseFn.constant(0)) == 1
    assert bv.graph_length(STEP) == 2
    assert bv.graph_length(IDENTITY) == Length.sqrt(2)


def test_variation_counts_value_excursions():
    spike = PiecewiseFn((F(0), F(1, 2), F(1)), (Constant(F(0)), Constant(F(0))),
                        (F(0), F(1), F(0)))
    assert bv.variation(spike) == 2
    assert not spike.is_unfrayed()
    assert bv.variation(bv.left_limit_version(spike)) == 0


def test_left_limit_version():
    assert bv.left_limit_version(IDENTITY) == IDENTITY
    lc = PiecewiseFn.step([0, 1], [F(1, 2)], right_continuous=False)
    assert bv.left_limit_version(lc) == lc
    assert bv.left_limit_version(STEP) == lc


def test_restrict():
    part = IDENTITY.restrict(F(1, 4), F(3, 4))
    assert (part.a, part.b) == (F(1, 4), F(3, 4))
    assert bv.variation(part) == F(1, 2)


def test_json_roundtrip():
    f = random_unfrayed(random.Random(3))
    assert PiecewiseFn.from_json(f.to_json()) == f


@pytest.mark.parametrize("seed", range(30))
def test_function_inequalities_random(seed):
    f = random_unfrayed(random.Random(seed))
    assert bv.function_inequalities(f).ok


# --- polylines ----------------------------------------------------------------

def test_rectify_identity_on_monotone():
    p = Polyline(((0, 0), (1, 1), (2, 0)))
    assert bv.rectify_monotone(p) == p


def test_rectify_backtrack_example():
    p = Polyline(((0, 0), (1, 1), (F(1, 2), 2), (1, 3)))
    r = bv.rectify_monotone(p)
    assert r.vertices == ((0, 0), (1, 1), (1, 3))
    assert r.length() == Length.sqrt(2) + 2
    assert p.length() > r.length()
    assert abs(float(p.length()) - 3.650) < 1e-3


def test_rectify_pure_backtrack_collapses_to_point():
    r = bv.rectify_monotone(Polyline(((0, 0), (-1, 2), (-2, 0))))
    assert r.vertices == ((0, 0),)
    assert r.length() == 0


def test_path_to_function_step():
    p = Polyline(((0, 0), (F(1, 2), 0), (F(1, 2), 1), (1, 1)))
    f = bv.path_to_function(p)
    assert f == STEP
    assert bv.variation(f) == 1 and bv.graph_length(f) == 2


def test_path_to_function_horizontal_and_errors():
    assert bv.path_to_function(Polyline(((0, 3), (1, 3)))) == PiecewiseFn.constant(3)
    with pytest.raises(ZeroHorizontalExtent):
        bv.path_to_function(Polyline(((0, 0), (0, 1))))
    with pytest.raises(ValueError):
        bv.path_to_function(Polyline(((0, 0), (1, 0), (1, 2), (1, 1), (2, 1))))


def test_function_to_path_examples():
    assert bv.function_to_path(PiecewiseFn.constant(0)).vertices == ((0, 0), (1, 0))
    assert len(bv.function_to_path(STEP).vertices) == 4  # three segments
    spike = PiecewiseFn((F(0), F(1, 2), F(1)), (Constant(F(0)), Constant(F(0))),
                        (F(0), F(1), F(0)))
    with pytest.raises(NotUnfrayed):
        bv.function_to_path(spike)


def test_l_shape_equality_case():
    rep = bv.length_variation_report(Polyline(((0, 0), (1, 0), (1, 1))))
    assert rep.ok and rep.length == rep.v1 + rep.v2 == 2


@pytest.mark.parametrize("seed", range(50))
def test_rectification_properties(seed):
    p = random_polyline(random.Random(seed))
    r = bv.rectify_monotone(p)
    assert r.length() <= p.length()
    assert r.coordinate_variation(1) <= p.coordinate_variation(1)
    assert bv.rectify_monotone(r) == r
    assert all(a[0] <= b[0] for a, b in zip(r.vertices, r.vertices[1:]))


@pytest.mark.parametrize("seed", range(50))
def test_function_path_roundtrip(seed):
    f = random_unfrayed(random.Random(seed))
    p = bv.function_to_path(f)
    assert p.coordinate_variation(1) == bv.variation(f)
    assert p.length() == bv.graph_length(f)
    g = bv.path_to_function(p)
    assert bv.variation(g) == bv.variation(f)
    assert bv.graph_length(g) == bv.graph_length(f)
    # a value equal to a one-sided limit is invisible in the graph
    assert bv.function_to_path(g) == p


def test_load_variants(tmp_path):
    import json
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"points": [["0", "0"], ["1", "1/2"]]}))
    assert bv.load(str(path)) == PiecewiseFn.from_points([(0, 0), (1, F(1, 2))])
    assert isinstance(bv.load({"vertices": [["0", "0"], ["1", "1"]]}), Polyline)
    assert bv.load(STEP.to_json()) == STEP
