import json
import math

import numpy as np
import pytest

from unate.boolfn import ContractError, TruthTable, generate
from unate.claims import claim2, verify_claims
from unate.cli import main
from unate.harness import (
    ExperimentConfig,
    baseline_edge_tester,
    baseline_sample_count,
    fit_query_exponent,
    run_baseline_edge_tester,
    run_experiment,
    sweep,
    wilson_interval,
)
from unate.rng import Rng, trial_seed

XOR = {"family": "xor_pair", "n": 6, "params": {"i": 0, "j": 1}}


def test_wilson_interval_reference_values():
    lo, hi = wilson_interval(470, 500)
    assert lo == pytest.approx(0.9204, abs=5e-4)
    assert hi == pytest.approx(0.9556, abs=5e-4)
    assert wilson_interval(0, 10)[0] == 0
    lo2, _ = wilson_interval(470, 500, one_sided=False)
    assert lo2 < lo


def test_trial_seed_mixing():
    seeds = {trial_seed(7, t) for t in range(1000)}
    assert len(seeds) == 1000
    assert trial_seed(7, 3) == trial_seed(7, 3) != trial_seed(8, 3)


def test_experiment_report_fields_and_reproducibility():
    cfg = ExperimentConfig(function=XOR, epsilon=0.2, trials=20, seed=5)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a.to_json(include_timing=False) == b.to_json(include_timing=False)
    assert a.to_csv(include_timing=False) == b.to_csv(include_timing=False)
    agg = a.aggregates()
    assert agg["certified_distance_min"] == "1/4"
    assert agg["reject_rate"] == a.rejections / 20
    assert agg["all_within_ceiling"] and agg["all_witnesses_verified"]
    for t in a.trials:
        assert t.loop_queries + t.mono_queries == t.queries > 0
    obj = json.loads(a.to_json())
    assert obj["config"]["epsilon"] == 0.2 and len(obj["trials"]) == 20


def test_parallel_workers_match_serial():
    cfg = dict(function={"family": "parity", "n": 6}, epsilon=0.3, trials=12, seed=1)
    serial = run_experiment(ExperimentConfig(**cfg))
    par = run_experiment(ExperimentConfig(**cfg, workers=2))
    assert serial.to_json(include_timing=False) == par.to_json(include_timing=False).replace(
        '"workers": 2', '"workers": 1')


def test_multiple_function_seeds_are_certified():
    cfg = ExperimentConfig(function={"family": "random_unate", "n": 6}, epsilon=0.1,
                           function_seeds=[0, 1, 2], trials=6)
    rep = run_experiment(cfg)
    assert set(rep.certified_distance) == {0, 1, 2}
    assert rep.rejections == 0
    assert [t.function_seed for t in rep.trials] == [0, 1, 2, 0, 1, 2]


def test_truth_table_input():
    f = generate(XOR, 0)
    cfg = ExperimentConfig(function=f.to_json_obj(), epsilon=0.2, trials=5)
    assert run_experiment(cfg).certified_distance[0] == pytest.approx(0.25)


def test_config_errors_before_trials():
    with pytest.raises(ContractError):
        run_experiment(ExperimentConfig(function={"family": "majority", "n": 26}, epsilon=0.1))
    with pytest.raises(ContractError):
        run_experiment(ExperimentConfig(function={"family": "nope", "n": 3}, epsilon=0.1))
    with pytest.raises(ContractError):
        run_experiment(ExperimentConfig(function={"family": "majority", "n": 3}, epsilon=0.1,
                                        tester="monotone", directions="uu"))
    with pytest.raises(ContractError):
        ExperimentConfig(function=XOR, epsilon=0.2, trials=0)
    with pytest.raises(ContractError):
        ExperimentConfig(function=XOR, epsilon=0.2, tester="other")


def test_certificate_skipped_above_cap():
    cfg = ExperimentConfig(function={"family": "parity", "n": 13}, epsilon=0.3, trials=2)
    assert run_experiment(cfg).certified_distance[0] is None


def test_monotone_experiment():
    cfg = ExperimentConfig(function={"family": "majority", "n": 5}, epsilon=0.1, tester="monotone", trials=10)
    rep = run_experiment(cfg)
    assert rep.rejections == 0
    assert all(t.queries == 2 * 250 and t.within_ceiling for t in rep.trials)


# ------------------------------------------------------------------ baseline

def test_baseline_budget_and_one_sidedness():
    q = baseline_sample_count(6, 0.2)
    assert q == math.ceil(5 * 6 ** 1.5 / 0.2)
    rep = run_baseline_edge_tester(ExperimentConfig(
        function={"family": "random_unate", "n": 6}, epsilon=0.2, function_seeds=list(range(10)), trials=30))
    assert rep.rejections == 0
    assert all(t.queries == 2 * q for t in rep.trials)


def test_baseline_rejects_xor():
    rep = run_baseline_edge_tester(ExperimentConfig(function=XOR, epsilon=0.2, trials=100))
    assert rep.reject_rate >= 0.9 and rep.all_witnesses_verified
    assert rep.config["tester"] == "baseline"


def test_baseline_witness_is_conflict():
    f = generate(XOR, 0)
    v = baseline_edge_tester(f, 0.2, Rng(0))
    assert v.rejected
    w = v.witness
    assert w.first.coordinate == w.second.coordinate
    assert w.check(f.fresh())


# -------------------------------------------------------------------- sweeps

def test_fit_query_exponent_recovers_n_log_n():
    ns = [6, 8, 10, 12]
    assert fit_query_exponent(ns, [3 * n * math.log2(n) for n in ns]) == pytest.approx(1.0)
    assert fit_query_exponent(ns, [n ** 2 * math.log2(n) for n in ns]) == pytest.approx(2.0)
    with pytest.raises(ContractError):
        fit_query_exponent([1, 2], [1, 2])


def test_sweep_rows():
    res = sweep({"family": "parity"}, [4, 6], [0.3, 0.4], trials=5, certify=False)
    assert [(r["n"], r["epsilon"]) for r in res.rows] == [(4, 0.3), (6, 0.3), (4, 0.4), (6, 0.4)]
    assert set(res.exponents) == {0.3, 0.4}
    assert res.to_csv().splitlines()[0].startswith("n,epsilon")


# ---------------------------------------------------------------- claim suites

def test_verify_claims_quick():
    results = verify_claims(n_max=8, quick=True)
    assert len(results) == 7
    assert all(r.passed for r in results), [r.line() for r in results]


def test_claim2_is_not_vacuous():
    _, st = claim2(500, 4, seed=3)
    assert st.nonzero_cvar > 50
    assert st.max_bad_over_8c > 0


# ----------------------------------------------------------------------- CLI

def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_cli_test_unate(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, cap = run_cli(capsys, "test-unate", "--spec", json.dumps(XOR), "--epsilon", "0.2",
                        "--trials", "5", "--out", str(out))
    assert code == 0
    agg = json.loads(cap.out)
    assert agg["rejections"] == 5
    assert json.loads(out.read_text())["aggregates"] == agg


def test_cli_spec_from_file_and_csv(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"family": "random_unate", "n": 5}))
    out = tmp_path / "r.csv"
    code, cap = run_cli(capsys, "test-unate", "--spec", str(spec), "--epsilon", "0.3",
                        "--trials", "3", "--function-seeds", "0:3", "--format", "csv", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("index,seed,function_seed") and len(lines) == 4


def test_cli_test_monotone_and_baseline(capsys):
    code, cap = run_cli(capsys, "test-monotone", "--spec", '{"family":"anti_dictator","n":4,"params":{"i":0}}',
                        "--directions", "duuu", "--epsilon", "0.2", "--trials", "3")
    assert code == 0 and json.loads(cap.out)["rejections"] == 0
    code, cap = run_cli(capsys, "baseline-edge", "--spec", json.dumps(XOR), "--epsilon", "0.2", "--trials", "3")
    assert code == 0 and json.loads(cap.out)["rejections"] == 3


def test_cli_exact_distance(capsys, tmp_path):
    code, cap = run_cli(capsys, "exact-distance", "--spec", '{"family":"parity","n":4}')
    assert code == 0
    assert json.loads(cap.out)["distance"] == "5/16"
    w = tmp_path / "w.json"
    code, cap = run_cli(capsys, "exact-distance", "--spec", '{"family":"parity","n":3}',
                        "--target", "monotone", "--directions", "udu", "--out", str(w))
    res = json.loads(cap.out)
    assert res["witness_path"] == str(w) and res["directions"] == "udu"
    assert TruthTable.load(w).n == 3


def test_cli_sweep(capsys):
    code, cap = run_cli(capsys, "sweep", "--spec-template", '{"family":"parity"}', "--n", "4,6",
                        "--epsilon", "0.3", "--trials", "3", "--no-certify")
    assert code == 0 and "fitted exponent" in cap.out


def test_cli_verify_claims(capsys):
    code, cap = run_cli(capsys, "verify-claims", "--quick", "--n-max", "6")
    assert code == 0
    assert cap.out.count("[PASS]") == 7


def test_cli_usage_errors(capsys):
    code, cap = run_cli(capsys, "test-unate", "--spec", "{not json", "--epsilon", "0.2")
    assert code == 2 and "error" in cap.err
    code, _ = run_cli(capsys, "test-unate", "--spec", json.dumps(XOR), "--epsilon", "1.5")
    assert code == 2
    with pytest.raises(SystemExit):
        main(["no-such-command"])
