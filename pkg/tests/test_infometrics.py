import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from infosig.counts import CountTable
from infosig.infometrics import (
    METRICS,
    UndefinedMetricError,
    entropy,
    joint_mi,
    mutual_information,
    signature,
)

TOL = 1e-9
triples = st.lists(st.tuples(st.integers(0, 7), st.integers(0, 4), st.integers(0, 7)), min_size=1, max_size=200)


def _table(xs):
    return CountTable.from_triples(xs)


def test_entropy_spot_values():
    assert entropy({k: 1 for k in range(8)}) == 3.0
    assert entropy({"x": 4}) == 0.0
    assert entropy({"a": 3, "b": 1}) == pytest.approx(0.8112781244591328, abs=1e-12)


def test_entropy_empty_is_an_error():
    with pytest.raises(UndefinedMetricError):
        entropy({})
    with pytest.raises(UndefinedMetricError):
        signature(CountTable())
    with pytest.raises(UndefinedMetricError):
        mutual_information({}, {}, {})


def test_mutual_information_spot_values():
    indep = {(x, y): 1 for x in (0, 1) for y in (0, 1)}
    assert mutual_information(indep, {0: 2, 1: 2}, {0: 2, 1: 2}) == 0.0
    diag = {(k, k): 1 for k in range(4)}
    assert mutual_information(diag, {k: 1 for k in range(4)}, {k: 1 for k in range(4)}) == 2.0
    j = {(0, 0): 2, (0, 1): 1, (1, 0): 1, (1, 1): 2}
    assert mutual_information(j, {0: 3, 1: 3}, {0: 3, 1: 3}) == pytest.approx(0.0817041659455105, abs=1e-12)


def test_joint_mi_deterministic_dynamics():
    t = _table([(s, a, (s + 2 * a) % 5) for s in range(5) for a in range(3)])
    assert joint_mi(t) == pytest.approx(entropy(t.c_snext), abs=1e-12)


def test_joint_mi_product_counts():
    t = _table([(s, a, sn) for s in range(3) for a in range(2) for sn in range(4)])
    assert joint_mi(t) == pytest.approx(0.0, abs=1e-12)


def test_joint_mi_random_against_oracle():
    rng = np.random.default_rng(17)
    raw = list(zip(rng.integers(0, 5, 200).tolist(), rng.integers(0, 3, 200).tolist(),
                   rng.integers(0, 5, 200).tolist()))
    ss, aa, nn = zip(*raw)
    expected = oracles.entropy(list(zip(ss, aa))) + oracles.entropy(list(nn)) - oracles.entropy(raw)
    assert joint_mi(_table(raw)) == pytest.approx(expected, abs=1e-12)


def test_single_repeated_triple_is_all_zero():
    sig = signature(_table([(3, 1, 4)] * 10))
    assert all(v == 0.0 for v in sig.metrics().values())


def test_copy_chain_is_one_bit_everywhere():
    sig = signature(_table([(0, 0, 0), (1, 1, 1)] * 5), step_index=10)
    assert all(v == 1.0 for v in sig.metrics().values())
    assert sig.support == (2, 2, 2)
    assert sig.step_index == 10


def test_signature_to_dict():
    d = signature(_table([(0, 1, 2)]), 5, window=7).to_dict()
    assert d["n"] == 1 and d["window"] == 7 and d["support"] == [1, 1, 1]
    assert set(METRICS) <= set(d)


def test_entropy_rejects_negative_counts():
    with pytest.raises(ValueError):
        entropy({0: 3, 1: -1})


@given(triples)
def test_matches_oracle(xs):
    got = signature(_table(xs)).metrics()
    ref = oracles.signature(xs)
    for k in METRICS:
        assert got[k] == pytest.approx(ref[k], abs=1e-12)


@given(triples)
def test_bounds_and_chain(xs):
    s = signature(_table(xs))
    assert min(s.metrics().values()) >= -TOL
    assert s.mi_sa <= min(s.h_s, s.h_a) + TOL
    assert s.mi_asnext <= min(s.h_a, s.h_snext) + TOL
    assert s.mi_ssnext <= min(s.h_s, s.h_snext) + TOL
    assert s.mi_sa_snext >= max(s.mi_ssnext, s.mi_asnext) - TOL
    us, ua, usn = s.support
    assert s.h_s <= math.log2(us) + TOL
    assert s.h_a <= math.log2(ua) + TOL
    assert s.h_snext <= math.log2(usn) + TOL


@given(triples, st.integers(2, 100))
def test_scaling_is_exact(xs, k):
    t = _table(xs)
    assert signature(t.scaled(k)).metrics() == signature(t).metrics()


@given(triples, st.permutations(range(8)), st.permutations(range(5)))
def test_relabeling_is_exact(xs, ps, pa):
    t = _table(xs)
    moved = t.relabeled(lambda s: ps[s] * 31 + 1000, lambda a: pa[a])
    assert signature(moved).metrics() == signature(t).metrics()


@given(triples)
def test_repeatable(xs):
    assert signature(_table(xs)) == signature(_table(list(xs)))
