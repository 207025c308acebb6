import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from pid_linker.errors import EmptyBatch, UniverseMismatch
from pid_linker.evaluation import GroundTruth, Metrics, batch_evaluate, pairwise_metrics
from pid_linker.merge import MergedLineMap

from oracles import enumerated_metrics

lm = MergedLineMap.from_groups
A, B, C = 11, 12, 13


def test_identity():
    m = pairwise_metrics(lm([[1, 2], [3]]), lm([[1, 2], [3]]))
    assert (m.precision, m.recall, m.f1, m.exact_accuracy) == (1.0, 1.0, 1.0, 1.0)


def test_split_line():
    m = pairwise_metrics(lm([[A, B], [C]]), GroundTruth(lm([[A, B, C]])))
    assert m.counts == (1, 0, 2)
    assert m.precision == 1.0 and m.recall == pytest.approx(1 / 3)
    assert m.f1 == pytest.approx(0.5) and m.exact_accuracy == 0.0


def test_false_join():
    m = pairwise_metrics(lm([[A, B]]), lm([[A], [B]]))
    assert m.counts == (0, 1, 0)
    assert (m.precision, m.recall, m.f1) == (0.0, 1.0, 0.0)


def test_pruned_segments_cost_recall():
    m = pairwise_metrics(lm([[A, B]]), lm([[A, B, C]]))
    assert m.counts == (1, 0, 2)


def test_unknown_prediction_ids():
    with pytest.raises(UniverseMismatch):
        pairwise_metrics(lm([[1, 99]]), lm([[1]]))


def test_batch():
    with pytest.raises(EmptyBatch):
        batch_evaluate([])
    case = (lm([[A, B], [C]]), lm([[A, B, C]]))
    assert batch_evaluate([case]).pooled == pairwise_metrics(*case)
    perfect = (lm([[1, 2]]), lm([[1, 2]]))
    pooled = batch_evaluate([perfect, perfect]).pooled
    assert (pooled.precision, pooled.recall, pooled.f1, pooled.exact_accuracy) == (1, 1, 1, 1)


def test_batch_micro_pools_counts():
    cases = [(lm([[1, 2], [3]]), lm([[1, 2, 3]])), (lm([[1, 2, 3]]), lm([[1], [2], [3]]))]
    report = batch_evaluate(cases, names=["a", "b"])
    assert report.pooled.counts == (1, 3, 2)
    assert [name for name, _ in report.rows] == ["a", "b"]
    doc = json.loads(report.to_json())
    assert doc["pooled"]["tp"] == 1 and [c["case"] for c in doc["cases"]] == ["a", "b"]
    assert report.table().splitlines()[-1].startswith("POOLED")


def test_truth_document_round_trip():
    truth = GroundTruth(lm([[1, 2], [3]]), ((1, 1), (2, 2)))
    assert GroundTruth.from_dict(json.loads(json.dumps(truth.to_dict()))) == truth


@st.composite
def partitions(draw):
    n = draw(st.integers(1, 25))
    ids = list(range(1, n + 1))
    labels = draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))
    other = draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))

    def groups(lab):
        out = {}
        for i, k in zip(ids, lab):
            out.setdefault(k, []).append(i)
        return list(out.values())
    return groups(labels), groups(other)


@settings(max_examples=200, deadline=None)
@given(partitions(), st.randoms(use_true_random=False))
def test_metric_properties(parts, rnd):
    p_groups, t_groups = parts
    m = pairwise_metrics(lm(p_groups), lm(t_groups))
    p, r, f1 = enumerated_metrics(p_groups, t_groups)
    assert (m.precision, m.recall) == pytest.approx((p, r))
    assert m.f1 == pytest.approx(f1)

    swapped = pairwise_metrics(lm(t_groups), lm(p_groups))
    assert (swapped.precision, swapped.recall) == (m.recall, m.precision)

    # relabeling line ids and segment ids together changes nothing
    ids = sorted(i for g in p_groups for i in g)
    perm = dict(zip(ids, rnd.sample(range(1000, 2000), len(ids))))
    relabel = lambda gs: lm([[perm[i] for i in g] for g in gs])
    moved = pairwise_metrics(relabel(p_groups), relabel(t_groups))
    assert moved == m
    keyed = MergedLineMap({k * 7 + 100: v for k, v in lm(p_groups).items()})
    assert pairwise_metrics(keyed, lm(t_groups)).counts == m.counts

    if m.exact_accuracy == 1.0:
        assert m.f1 == 1.0


def test_metrics_consistency():
    rng = random.Random(0)
    for _ in range(50):
        tp, fp, fn = rng.randint(0, 9), rng.randint(0, 9), rng.randint(0, 9)
        m = Metrics(tp, fp, fn)
        if m.precision + m.recall:
            assert m.f1 == pytest.approx(2 * m.precision * m.recall / (m.precision + m.recall))
