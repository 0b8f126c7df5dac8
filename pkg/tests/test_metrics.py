import pytest

from problr.metrics import (
    HISTOGRAM_BUCKETS,
    SentenceStat,
    ambiguity_histogram,
    apb,
    expected_analyses,
    geig_evaluate,
)


def test_apb_examples():
    assert apb([SentenceStat(5, 1), SentenceStat(9, 1)]) == 1.0
    assert apb([SentenceStat(2, 4), SentenceStat(3, 8)]) == pytest.approx(2.0)


def test_apb_skips_failures_and_timeouts():
    stats = [SentenceStat(2, 4), SentenceStat(7, 0), SentenceStat(4, 99, True)]
    assert apb(stats) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        apb([SentenceStat(3, 0)])


def test_apb_duplication_invariant():
    stats = [SentenceStat(3, 5), SentenceStat(10, 200), SentenceStat(4, 1)]
    assert apb(stats * 3) == pytest.approx(apb(stats))
    assert apb(list(reversed(stats))) == pytest.approx(apb(stats))


def test_expected_analyses():
    assert 96 <= expected_analyses(1.256, 20.1) <= 98
    assert 125 <= expected_analyses(1.239, 22.6) <= 127
    assert expected_analyses(1.0, 30) == 1.0


def test_histogram():
    stats = [
        SentenceStat(3, 0),
        SentenceStat(4, 1),
        SentenceStat(6, 9),
        SentenceStat(8, 10),
        SentenceStat(10, 12000),
        SentenceStat(12, 10**6),
        SentenceStat(30, 0, True),
    ]
    h = ambiguity_histogram(stats)
    assert set(h) == set(HISTOGRAM_BUCKETS) | {"total"}
    assert h["fail"] == (1, 3.0)
    assert h["1-9"] == (2, 5.0)
    assert h["10-99"] == (1, 8.0)
    assert h["100-999"] == (0, None)
    assert h["10K-99K"] == (1, 10.0)
    assert h["100K+"] == (1, 12.0)
    assert h["timeout"] == (1, 30.0)
    assert h["total"][0] == len(stats)
    assert sum(h[b][0] for b in HISTOGRAM_BUCKETS) == len(stats)


def test_geig_fixture_single():
    rep = geig_evaluate([{(0, 2), (0, 3)}], [[{(1, 3), (0, 3)}]], k=1)
    assert rep.recall == 0.5 and rep.precision == 0.5
    assert rep.crossings == 1.0 and rep.min_crossing == 1


def test_geig_identical():
    g = [{(0, 2), (2, 5)}, {(1, 4)}]
    rep = geig_evaluate(g, [[s] for s in g])
    assert (rep.recall, rep.precision, rep.crossings, rep.min_crossing) == (1.0, 1.0, 0.0, 0)


def test_geig_top_k_equal_weighting():
    gold = [{(0, 2), (0, 3)}]
    cands = [[{(0, 2), (0, 3)}, {(1, 3), (0, 3)}, {(1, 3)}]]
    rep = geig_evaluate(gold, cands, k=3)
    # matched (2 + 1 + 0)/3, found (2 + 2 + 1)/3, gold 2
    assert rep.recall == pytest.approx(0.5)
    assert rep.precision == pytest.approx(3 / 5)
    assert rep.crossings == pytest.approx(2 / 3)
    assert rep.min_crossing == 0
    # only the first two count with k=2
    rep2 = geig_evaluate(gold, cands, k=2)
    assert rep2.recall == pytest.approx(0.75) and rep2.precision == pytest.approx(0.75)


def test_geig_micro_average_and_failures():
    gold = [{(0, 2)}, {(0, 2), (2, 4), (0, 3)}, {(1, 3)}]
    cands = [[{(0, 2)}], [{(0, 2), (1, 3)}], []]
    rep = geig_evaluate(gold, cands)
    assert rep.recall == pytest.approx(2 / 5)
    assert rep.precision == pytest.approx(2 / 3)
    # the candidate (1,3) crosses gold (2,4) and (0,2); it counts once
    assert rep.crossings == pytest.approx(1 / 2)
    assert rep.min_crossing == 1
    assert rep.per_sentence[2] is None


def test_geig_shortfall_uses_available():
    rep = geig_evaluate([{(0, 2)}], [[{(0, 2)}]], k=3)
    assert rep.recall == 1.0


def test_geig_errors():
    with pytest.raises(ValueError):
        geig_evaluate([{(0, 1)}], [])
    with pytest.raises(ValueError):
        geig_evaluate([], [], k=0)
