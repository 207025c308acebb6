import json

import pytest
from hypothesis import given, settings, strategies as st

from pid_linker.errors import (
    MalformedDocument,
    MissingField,
    NonPositiveDpi,
    SceneValidationError,
    TypeMismatch,
)
from pid_linker.geometry import Point, Segment, endpoint_gap, point_segment_distance
from pid_linker.scene import (
    DetectedSymbol,
    UpscaleWarning,
    dump_scene,
    normalize_resolution,
    parse_scene,
    prepare_scene,
    validate_scene,
)
from pid_linker.synthetic import SynthSpec, generate

from conftest import hseg, make_scene

MINIMAL = {"sheet_id": "s1", "dpi": 200, "width": 100, "height": 80,
           "symbols": [], "segments": []}


def doc(**changes):
    d = dict(MINIMAL)
    d.update(changes)
    return json.dumps(d)


class TestParse:
    def test_minimal(self):
        scene = parse_scene(doc())
        assert scene.symbols == () and scene.segments == ()
        assert scene.sheet_id == "s1" and scene.dpi == 200

    def test_missing_dpi(self):
        d = dict(MINIMAL)
        del d["dpi"]
        with pytest.raises(MissingField) as exc:
            parse_scene(json.dumps(d))
        assert exc.value.path == "dpi"

    def test_three_coordinates(self):
        with pytest.raises(TypeMismatch) as exc:
            parse_scene(doc(segments=[{"id": 1, "p1": [0, 0], "p2": [1, 2, 3]}]))
        assert exc.value.path == "segments[0].p2"

    def test_malformed(self):
        with pytest.raises(MalformedDocument):
            parse_scene(b"{not json")

    def test_wrong_type_names_path(self):
        with pytest.raises(TypeMismatch) as exc:
            parse_scene(doc(symbols=[{"id": "x", "class_label": "pump",
                                      "bbox": [0, 0, 1, 1], "tag_text": None}]))
        assert exc.value.path == "symbols[0].id"

    def test_unknown_fields_round_trip(self):
        text = doc(source="cv-v3", segments=[{"id": 4, "p1": [1, 2], "p2": [9, 2],
                                              "score": 0.9}])
        scene = parse_scene(text)
        again = json.loads(dump_scene(scene))
        assert again["source"] == "cv-v3"
        assert again["segments"][0]["score"] == 0.9


def test_round_trip_identity_on_generated_scenes():
    for seed in range(5):
        scene, _ = generate(SynthSpec(seed=seed, jitter_sigma=1.0, clutter_count=3))
        assert parse_scene(dump_scene(scene)) == scene
        assert dump_scene(parse_scene(dump_scene(scene))) == dump_scene(scene)


class TestValidate:
    def test_duplicate_segment_ids(self):
        scene = make_scene([hseg(0, 0, 10, id=7), hseg(0, 50, 10, id=7)])
        report = validate_scene(scene)
        assert [(i.code, i.item_id) for i in report.errors] == [("DuplicateId", 7)]

    def test_clean_scene(self):
        scene = make_scene([hseg(0, 0, 10, id=1)], [(1, (20, 20, 40, 40))])
        assert validate_scene(scene).issues == []

    def test_off_axis_strict_vs_lenient(self):
        scene = make_scene([Segment(3, Point(0, 0), Point(100, 100))])
        strict = validate_scene(scene, strict=True)
        assert [(i.code, i.item_id) for i in strict.errors] == [("NotAxisAligned", 3)]
        lenient = validate_scene(scene)
        assert lenient.ok and lenient.codes() == ["NotAxisAligned"]

    def test_out_of_bounds_and_degenerate(self):
        scene = make_scene([Segment(1, Point(5, 5), Point(5, 5)),
                            hseg(-3, 10, 20, id=2)], width=100, height=100)
        codes = {(i.code, i.item_id) for i in validate_scene(scene).errors}
        assert codes == {("DegenerateSegment", 1), ("CoordinateOutOfBounds", 2)}

    def test_namespaces_are_independent(self):
        scene = make_scene([hseg(0, 0, 10, id=1)], [(1, (20, 20, 40, 40))])
        assert validate_scene(scene).ok

    def test_prepare_raises(self):
        scene = make_scene([hseg(0, 0, 10, id=7), hseg(0, 50, 10, id=7)])
        with pytest.raises(SceneValidationError):
            prepare_scene(scene)


class TestNormalize:
    def test_downscale(self):
        scene = make_scene([Segment(1, Point(800, 400), Point(900, 400))], dpi=400,
                           width=2000, height=2000)
        out = normalize_resolution(scene)
        assert out.dpi == 200 and out.segments[0].p1 == Point(400, 200)
        assert out.width == 1000

    def test_identity(self):
        scene = make_scene([hseg(0, 0, 10, id=1)])
        assert normalize_resolution(scene) is scene

    def test_upscale_warns(self):
        scene = make_scene([Segment(1, Point(100, 50), Point(150, 50))], dpi=100)
        with pytest.warns(UpscaleWarning):
            out = normalize_resolution(scene)
        assert out.segments[0].p1 == Point(200, 100)

    def test_bad_dpi(self):
        with pytest.raises(NonPositiveDpi):
            normalize_resolution(make_scene(dpi=0))

    def test_bbox_scaled_ids_kept(self):
        scene = make_scene(symbols=[DetectedSymbol(9, "tank", (10, 20, 30, 40), "T-1")], dpi=400)
        sym = normalize_resolution(scene).symbols[0]
        assert sym.bbox == (5, 10, 15, 20) and sym.id == 9 and sym.tag_text == "T-1"


dpis = st.sampled_from([50, 100, 200, 400, 800, 1600])
quiet_upscale = pytest.mark.filterwarnings("ignore::pid_linker.scene.UpscaleWarning")


@quiet_upscale
@settings(max_examples=50, deadline=None)
@given(dpis)
def test_normalize_idempotent(dpi):
    scene, _ = generate(SynthSpec(seed=dpi, n_symbols=4, n_lines=3))
    once = normalize_resolution(scene.replace(dpi=dpi))
    assert normalize_resolution(once) == once


@quiet_upscale
@settings(max_examples=30, deadline=None)
@given(dpis, st.integers(0, 2 ** 32))
def test_normalize_preserves_tolerance_relations(dpi, seed):
    # power-of-two scale factors keep the comparison exact in floating point
    scene, _ = generate(SynthSpec(seed=seed, n_symbols=4, n_lines=3, jitter_sigma=1.0))
    scene = prepare_scene(scene).replace(dpi=dpi)
    out = normalize_resolution(scene)
    k = 200 / dpi
    eps = 10.0
    before, after = scene.segments, out.segments
    for i in range(len(before)):
        for j in range(i + 1, len(before)):
            assert (endpoint_gap(before[i], before[j]) <= eps) == \
                (endpoint_gap(after[i], after[j]) <= eps * k)
            d0, _ = point_segment_distance(before[i].p1, before[j])
            d1, _ = point_segment_distance(after[i].p1, after[j])
            assert (d0 <= eps) == (d1 <= eps * k)
