"""Acceptance criteria, each at its stated tolerance.

Every test records a PASS/FAIL line that the terminal summary prints.
"""

import filecmp
import time

import numpy as np
import pytest

import _criteria
import oracles
from infosig import io_cli, monitor, simlab
from infosig.counts import CountTable
from infosig.infometrics import METRICS, entropy, signature

pytestmark = pytest.mark.acceptance


def _random_table(rng, max_s=50, max_a=20, max_sn=50, max_n=10_000):
    ns, na, nsn = rng.integers(1, max_s + 1), rng.integers(1, max_a + 1), rng.integers(1, max_sn + 1)
    n = int(rng.integers(1, max_n + 1))
    trip = np.stack([rng.integers(0, ns, n), rng.integers(0, na, n), rng.integers(0, nsn, n)], axis=1)
    keys, counts = np.unique(trip, axis=0, return_counts=True)
    t = CountTable()
    for (s, a, sn), c in zip(keys.tolist(), counts.tolist()):
        t.add(s, a, sn, c)
    return t


def test_c1_estimator_identities():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst_id, worst_neg, worst_chain = 0.0, 0.0, 0.0
    for _ in range(1000):
        t = _random_table(rng)
        sig = signature(t)
        hs, ha, hsn = entropy(t.c_s), entropy(t.c_a), entropy(t.c_snext)
        expand = {
            "mi_sa": hs + ha - entropy(t.c_sa),
            "mi_asnext": ha + hsn - entropy(t.c_asnext),
            "mi_ssnext": hs + hsn - entropy(t.c_ssnext),
            "mi_sa_snext": entropy(t.c_sa) + hsn - entropy(t.c_sasnext),
        }
        for k, v in expand.items():
            worst_id = max(worst_id, abs(getattr(sig, k) - v))
        worst_neg = max(worst_neg, -min(sig.metrics().values()))
        worst_chain = max(worst_chain, max(sig.mi_ssnext, sig.mi_asnext) - sig.mi_sa_snext)
    elapsed = time.perf_counter() - t0
    ok = worst_id <= 1e-9 and worst_neg <= 1e-9 and worst_chain <= 1e-9 and elapsed < 30
    _criteria.record("C1 estimator identities", ok,
                     f"identity err {worst_id:.1e}, min metric {-worst_neg:.1e}, "
                     f"chain slack {worst_chain:.1e}, {elapsed:.1f}s")
    assert worst_id <= 1e-9
    assert worst_neg <= 1e-9
    assert worst_chain <= 1e-9
    assert elapsed < 30


def test_c2_oracle_equivalence():
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 400))
        ns, na = int(rng.integers(1, 12)), int(rng.integers(1, 6))
        triples = list(zip(rng.integers(0, ns, n).tolist(), rng.integers(0, na, n).tolist(),
                           rng.integers(0, ns, n).tolist()))
        got = signature(CountTable.from_triples(triples)).metrics()
        ref = oracles.signature(triples)
        worst = max(worst, max(abs(got[k] - ref[k]) for k in METRICS))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 10
    _criteria.record("C2 oracle equivalence", ok, f"max |diff| {worst:.1e} bits, {elapsed:.1f}s")
    assert worst <= 1e-12
    assert elapsed < 10


def test_c3_analytic_spot_values():
    uniform = entropy({k: 1 for k in range(8)})
    bij = signature(CountTable.from_triples([(k, k, 0) for k in range(4)])).mi_sa
    mixed = signature(CountTable.from_triples([(0, 0, 0)] * 2 + [(0, 1, 0), (1, 0, 0)] + [(1, 1, 0)] * 2)).mi_sa
    ok = uniform == 3.0 and bij == 2.0 and abs(mixed - 0.081704) <= 1e-6
    _criteria.record("C3 analytic spot values", ok,
                     f"H(U8)={uniform!r}, bijection={bij!r}, mixed={mixed:.6f}")
    assert uniform == 3.0
    assert bij == 2.0
    assert mixed == pytest.approx(0.081704, abs=1e-6)


@pytest.mark.slow
def test_c4_learning_signature_shape():
    seeds = (0, 1, 2, 3, 4)
    lines, ok = [], True
    for seed in seeds:
        t0 = time.perf_counter()
        res = simlab.run_training(seed, 200_000, preset="learning")
        sigs = io_cli.analyze(res.log, io_cli.RunConfig(boundary=5000), "cumulative")
        elapsed = time.perf_counter() - t0
        msa = [s.mi_sa for s in sigs]
        ha = [s.h_a for s in sigs]
        mj = [s.mi_sa_snext for s in sigs]
        peak = int(np.argmax(mj))
        a = msa[-1] >= 2 * msa[0]
        b = ha[-1] < max(ha)
        c = 0 < peak < len(mj) - 1
        ok &= a and b and c and elapsed < 300
        lines.append(f"seed {seed}: ratio {msa[-1] / msa[0]:.2f}, H(A) {max(ha):.2f}->{ha[-1]:.2f}, "
                     f"MI(S,A;S') peak {peak}/{len(mj) - 1}, {elapsed:.0f}s")
    _criteria.record("C4 learning signature shape", ok, "; ".join(lines))
    assert ok, lines


def _scenario(i):
    return ("none", "obs", "act")[i % 3]


@pytest.mark.slow
def test_c5_differential_diagnosis():
    cfg = io_cli.RunConfig(stream="true", thresholds=monitor.DESK_THRESHOLDS)
    expected = {"none": monitor.NOMINAL, "obs": monitor.SENSOR, "act": monitor.ACTUATOR}
    t0 = time.perf_counter()
    correct, false_alarms, rows = 0, 0, []
    for i in range(20):
        fault = _scenario(i)
        agent = simlab.train_agent(100 + i)
        log = simlab.run_deployment(2000 + i, agent, 20_000, simlab.deployment_noise(fault, 0.1))
        base = io_cli.build_baseline(log, cfg, 8000, 10_000)
        rep = io_cli.run_diagnosis(log, base, cfg)
        correct += rep.verdict == expected[fault]
        false_alarms += fault == "none" and rep.verdict != monitor.NOMINAL
        rows.append(f"{fault}:{rep.verdict}")
    elapsed = time.perf_counter() - t0
    ok = correct >= 18 and false_alarms == 0 and elapsed < 300
    _criteria.record("C5 differential diagnosis", ok,
                     f"{correct}/20 correct, {false_alarms} nominal flagged, {elapsed:.0f}s")
    assert false_alarms == 0, rows
    assert correct >= 18, rows
    assert elapsed < 300


def _severity(log):
    cfg = io_cli.RunConfig()
    sigs = io_cli.analyze(log, cfg, "sliding")
    base = monitor.capture_baseline([s for s in sigs if 8000 <= s.step_index <= 10_000])
    return monitor.severity([monitor.delta(s, base) for s in sigs if s.step_index > base.end_step])


@pytest.fixture(scope="module")
def severities():
    out = {}
    for seed in range(5):
        agent = simlab.train_agent(seed)
        for fault, s2 in (("act", 0.1), ("act", 1.0), ("obs", 0.1)):
            log = simlab.run_deployment(1000 + seed, agent, 20_000, simlab.deployment_noise(fault, s2))
            out[seed, fault, s2] = _severity(log)
    return out


def _fmt(sev, seed):
    return (f"seed {seed}: act0.1 {sev[seed, 'act', 0.1]:.2f}, act1.0 {sev[seed, 'act', 1.0]:.2f}, "
            f"obs0.1 {sev[seed, 'obs', 0.1]:.2f}")


@pytest.mark.slow
def test_c6a_severity_grows_with_actuator_noise(severities):
    ok = all(severities[s, "act", 1.0] > severities[s, "act", 0.1] for s in range(5))
    _criteria.record("C6a severity act 1.0 > act 0.1", ok, "; ".join(_fmt(severities, s) for s in range(5)))
    assert ok


@pytest.mark.slow
def test_c6b_sensor_fault_deeper_than_actuator(severities):
    ok = all(severities[s, "obs", 0.1] > severities[s, "act", 0.1] for s in range(5))
    _criteria.record("C6b severity obs 0.1 > act 0.1", ok, "; ".join(_fmt(severities, s) for s in range(5)))
    assert ok


def _pipeline(root):
    run = [
        ["simulate-train", "--seed", "3", "--steps", "30000", "--preset", "deployment",
         "--out", str(root / "train.jsonl"), "--policy-out", str(root / "policy.npz")],
        ["simulate-deploy", "--seed", "7", "--policy", str(root / "policy.npz"), "--steps", "16000",
         "--fault", "obs", "--onset", "8000", "--out", str(root / "deploy.jsonl")],
        ["analyze", "--log", str(root / "deploy.jsonl"), "--mode", "sliding", "--out", str(root / "sig.csv")],
        ["analyze", "--log", str(root / "train.jsonl"), "--mode", "cumulative", "--out", str(root / "cum.csv")],
        ["baseline", "--log", str(root / "deploy.jsonl"), "--from-step", "4000", "--to-step", "8000",
         "--out", str(root / "base.json")],
        ["diagnose", "--log", str(root / "deploy.jsonl"), "--baseline", str(root / "base.json"),
         "--out", str(root / "report.json")],
    ]
    for argv in run:
        assert io_cli.cli_main(argv) == 0, argv


def test_c7_determinism_and_formats(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    _pipeline(a)
    _pipeline(b)
    capsys.readouterr()
    names = ["train.jsonl", "deploy.jsonl", "sig.csv", "cum.csv", "base.json", "report.json"]
    same = all(filecmp.cmp(a / n, b / n, shallow=False) for n in names)
    errors = 0
    parsed = 0
    for name in ("train.jsonl", "deploy.jsonl"):
        try:
            parsed += sum(1 for _ in io_cli.parse_log(a / name))
        except ValueError:
            errors += 1
    ok = same and errors == 0 and parsed == 46_000
    _criteria.record("C7 determinism and formats", ok,
                     f"{len(names)} artifacts identical: {same}, {parsed} records re-parsed, {errors} errors")
    assert same
    assert errors == 0
    assert parsed == 46_000


def test_c8_invariance():
    rng = np.random.default_rng(808)
    scale_ok = relabel_ok = True
    for _ in range(100):
        t = _random_table(rng, 30, 12, 30, 3000)
        ref = signature(t).metrics()
        k = int(rng.integers(2, 50))
        scale_ok &= signature(t.scaled(k)).metrics() == ref
    for _ in range(100):
        t = _random_table(rng, 30, 12, 30, 3000)
        ref = signature(t).metrics()
        ps, pa = rng.permutation(1000), rng.permutation(343)
        relabel_ok &= signature(t.relabeled(lambda s: int(ps[s]), lambda a: int(pa[a]))).metrics() == ref
    _criteria.record("C8 invariance", scale_ok and relabel_ok,
                     f"scaling exact: {scale_ok}, relabeling exact: {relabel_ok}")
    assert scale_ok
    assert relabel_ok
