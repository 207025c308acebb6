import random

from hypothesis import given, settings, strategies as st

from pid_linker.config import DedupConfig
from pid_linker.dedup import suppress_duplicates
from pid_linker.geometry import Point, Segment

from conftest import hseg, vseg


def test_width_double_collapses():
    out, report = suppress_duplicates([hseg(0, 0, 100, id=1), hseg(0, 3, 100, id=2)])
    assert out == [Segment(1, Point(0, 1.5), Point(100, 1.5))]
    assert report.replaced == {2: 1} and report.survivors == [1]


def test_offset_too_large():
    segs = [hseg(0, 0, 100, id=1), hseg(0, 20, 100, id=2)]
    out, report = suppress_duplicates(segs)
    assert out == segs and report.replaced == {}


def test_collinear_extension_is_not_a_duplicate():
    segs = [hseg(0, 0, 100, id=1), hseg(95, 3, 200, id=2)]
    out, report = suppress_duplicates(segs)
    assert out == segs and report.replaced == {}


def test_bundle_of_three_collapses_to_one():
    segs = [hseg(0, 0, 100, id=5), hseg(0, 2, 100, id=3), hseg(10, 4, 90, id=9)]
    out, report = suppress_duplicates(segs)
    assert [s.id for s in out] == [3]
    lo, hi = out[0].extent
    assert (lo, hi) == (0, 100)
    # length-weighted mean of 0, 2, 4 with weights 100, 100, 80
    assert abs(out[0].axis_coord - (0 * 100 + 2 * 100 + 4 * 80) / 280) < 1e-12
    assert report.replaced == {5: 3, 9: 3}


def test_vertical_and_horizontal_never_merge():
    segs = [hseg(0, 50, 100, id=1), vseg(50, 0, 100, id=2)]
    out, _ = suppress_duplicates(segs)
    assert out == segs


def test_growth_can_create_new_duplicates():
    # 1 and 2 merge into a longer stroke that then overlaps 3 enough
    segs = [hseg(0, 0, 60, id=1), hseg(40, 1, 100, id=2), hseg(70, 2, 130, id=3)]
    cfg = DedupConfig(max_offset=6, min_overlap_ratio=0.5)
    out, report = suppress_duplicates(segs, cfg)
    again, report2 = suppress_duplicates(out, cfg)
    assert again == out and report2.replaced == {}


@st.composite
def bundles(draw):
    n = draw(st.integers(1, 14))
    segs = []
    for i in range(n):
        horizontal = draw(st.booleans())
        a = draw(st.integers(0, 150))
        b = a + draw(st.integers(1, 100))
        c = draw(st.integers(0, 30))
        segs.append(Segment.horizontal(i + 1, a, b, c) if horizontal
                    else Segment.vertical(i + 1, c, a, b))
    return segs


@settings(max_examples=200, deadline=None)
@given(bundles(), st.randoms(use_true_random=False))
def test_dedup_properties(segs, rnd):
    out, report = suppress_duplicates(segs)
    ids = [s.id for s in segs]
    assert len(out) <= len(segs)
    assert set(report.survivors) <= set(ids)
    assert [s.id for s in out] == sorted(s.id for s in out)
    assert not set(report.replaced) & set(report.survivors)
    assert set(report.replaced.values()) <= set(report.survivors)
    # idempotent
    again, rep2 = suppress_duplicates(out)
    assert again == out and rep2.replaced == {}
    # input-order invariant
    shuffled = list(segs)
    rnd.shuffle(shuffled)
    out2, report2 = suppress_duplicates(shuffled)
    assert out2 == out and report2 == report
    # grid and brute force agree
    assert suppress_duplicates(segs, index="brute") == (out, report)


def test_well_separated_input_unchanged():
    rng = random.Random(4)
    segs = [hseg(0, 10 * k, rng.randint(20, 200), id=k + 1) for k in range(20)]
    out, report = suppress_duplicates(segs)
    assert out == segs and report.replaced == {}
