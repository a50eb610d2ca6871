from fractions import Fraction as F

import pytest

from permealab import chains
from permealab.chains import ASC, DESC, scheme_gC, scheme_gH
from permealab.errors import IndexOutOfPattern


def test_subdivisions_and_heights():
    assert scheme_gH().subdivision(1) == 234
    assert scheme_gH().heights(1) == 1
    assert scheme_gC().subdivision(1) == 1818
    assert scheme_gC().subdivision(2) == 180018


def test_level_one_chain_has_234_rects(gh):
    kids = list(chains.children(gh, gh.root))
    assert len(kids) == 234
    assert [k.index for k in kids] == list(range(1, 235))
    exits = {k.index: k.exit for k in kids}
    assert exits[14] == F(-9, 2)
    assert exits[32] == F(9, 2)
    assert exits[234] == F(-5, 2)


def test_gc_exit_14():
    assert chains.rectangle(scheme_gC(), [14]).exit == F(-9, 2)


def test_rectangle_five(gh):
    r = chains.rectangle(gh, [5])
    assert (r.x, r.w, r.orient, r.entry, r.exit, r.y, r.h) == \
        (F(4, 234), F(1, 234), DESC, F(1, 2), F(0), F(-1, 4), F(1))


def test_root_and_rect_117(gh):
    root = chains.rectangle(gh, [])
    assert (root.x, root.right, root.y, root.top) == (0, 1, -5, 5)
    assert chains.rectangle(gh, [117]).exit == -2


def test_locate_max_index_rule(gh):
    assert chains.locate(gh, 0, 1) == (1,)
    assert chains.locate(gh, F(1, 2), 1) == (118,)
    assert chains.locate(gh, 1, 2) == (234, 234)


def test_child_out_of_range(gh):
    with pytest.raises(IndexOutOfPattern):
        chains.child(gh, gh.root, 235)
    with pytest.raises(IndexOutOfPattern):
        chains.child(gh, gh.root, 0)


def test_chain_is_continuous_and_nested(gh):
    parent = chains.rectangle(gh, [40])
    kids = list(chains.children(gh, parent))
    assert kids[0].entry == parent.entry and kids[-1].exit == parent.exit
    for a, b in zip(kids, kids[1:]):
        assert a.exit == b.entry and a.right == b.x
    for k in kids:
        assert k.orientation_ok()
        assert parent.y <= k.y and k.top <= parent.top


def test_ascending_parent_mirrors_pattern(gh):
    asc = next(r for r in chains.children(gh, gh.root) if r.orient is ASC)
    kids = list(chains.children(gh, asc))
    assert [k.orient for k in kids[:14]] == [ASC] * 14
    assert kids[14].orient is DESC


def test_run_segments_cover_subdivision(gh):
    segs = list(chains.run_segments(gh, gh.root))
    assert sum(length for _, length, _, _ in segs) == 234
    assert segs[0][1:3] == (14, DESC)
    assert segs[-1][1:3] == (4, ASC)


def test_validate_builtin():
    assert chains.validate(scheme_gH(), 3).ok
    assert chains.validate(scheme_gC(), 1).ok


@pytest.mark.slow
def test_validate_gc_level_two():
    assert chains.validate(scheme_gC(), 2).ok


def test_validate_flags_growing_heights():
    bad = chains.scheme_from_descriptor(
        {"name": "grow", "heights": [10, 20, 20], "pattern": "gH"})
    rep = chains.validate(bad, 1)
    assert not rep and rep.violation == "NestingHeight"


def test_descriptor_roundtrip_to_builtin():
    s = chains.scheme_from_descriptor({"name": "gH", "heights": "10*10^-k", "pattern": "gH"})
    assert s is scheme_gH()
