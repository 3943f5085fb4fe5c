"""Experiment runner: rejection rates, query accounting, sweeps and reports."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from statistics import NormalDist
from typing import Mapping, Sequence

import numpy as np

from .boolfn import (
    MAX_TABLE_DIM,
    ContractError,
    EdgeWitness,
    FunctionSpec,
    Oracle,
    TruthTable,
    all_up,
    generate,
    parse_directions,
)
from .exact import MINCUT_CAP, UNATE_CAP, distance_to_monotone, distance_to_unate
from .rng import Rng, trial_seed
from .testers import (
    ACCEPT,
    OrientationConflict,
    TesterConfig,
    Verdict,
    edge_monotonicity_tester,
    mono_sample_count,
    reject,
    run_unateness_tester,
    verify_witness,
    _exact,
)

TESTERS = ("unate", "monotone", "baseline")
BASELINE_CONSTANT = 5


def wilson_interval(successes: int, trials: int, confidence: float = 0.95,
                    one_sided: bool = True) -> tuple[float, float]:
    """Wilson score bounds. One-sided uses the upper ``confidence`` quantile for each side."""
    if trials <= 0:
        return 0.0, 1.0
    tail = 1 - confidence if one_sided else (1 - confidence) / 2
    z = NormalDist().inv_cdf(1 - tail)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = p + z * z / (2 * trials)
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    return max(0.0, (centre - half) / denom), min(1.0, (centre + half) / denom)


# ------------------------------------------------------------ baseline tester

def baseline_sample_count(n: int, epsilon) -> int:
    return math.ceil(BASELINE_CONSTANT * n * math.sqrt(n) / float(_exact(epsilon)))


def baseline_edge_tester(f: Oracle, epsilon, rng: Rng, q: int | None = None) -> Verdict:
    """Non-adaptive edge tester for unateness.

    Samples ceil(5 n^1.5 / epsilon) uniform edges, keeps the first influential
    edge of each orientation per coordinate, and rejects when some coordinate
    has seen both.
    """
    n = f.n
    if q is None:
        q = baseline_sample_count(n, epsilon)
    seen: list[dict] = [{} for _ in range(n)]
    conflict = None
    for _ in range(q):
        i = rng.below(n)
        lower = rng.bits(n) & ~(1 << i)
        a, b = f(lower), f(lower | (1 << i))
        if a != b and conflict is None:
            e = EdgeWitness(lower, i, a, b)
            seen[i].setdefault(e.orientation, e)
            if len(seen[i]) == 2:
                conflict = OrientationConflict(*seen[i].values())
    return ACCEPT if conflict is None else reject(conflict)


# ---------------------------------------------------------------- experiments

@dataclass
class ExperimentConfig:
    function: dict  # FunctionSpec JSON, or a truth-table JSON with "table_hex"
    epsilon: float
    tester: str = "unate"
    function_seeds: list[int] = field(default_factory=lambda: [0])
    trials: int = 100
    seed: int = 0
    c: float = 0.01
    m: int | None = None
    mono_queries: int | None = None
    directions: str | None = None
    workers: int = 1
    certify: bool = True

    def __post_init__(self):
        if self.tester not in TESTERS:
            raise ContractError(f"unknown tester {self.tester!r}; pick one of {TESTERS}")
        if self.trials < 1:
            raise ContractError("trials must be >= 1")
        if not 0 < self.epsilon < 1:
            raise ContractError("epsilon must lie in (0, 1)")
        if not self.function_seeds:
            raise ContractError("need at least one function seed")
        if self.tester == "unate":
            self.tester_config()

    @property
    def n(self) -> int:
        return int(self.function["n"])

    def tester_config(self) -> TesterConfig:
        return TesterConfig(self.epsilon, self.c, self.m, self.mono_queries, self.seed)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping) -> "ExperimentConfig":
        return cls(**d)


@dataclass
class TrialRecord:
    index: int
    seed: int
    function_seed: int
    outcome: str
    queries: int
    loop_queries: int
    mono_queries: int
    t_size: int
    within_ceiling: bool
    witness_verified: bool | None
    witness: dict | None = None
    wall_time: float = 0.0


@dataclass
class ExperimentReport:
    config: dict
    trials: list[TrialRecord]
    certified_distance: dict[int, Fraction | None]

    @property
    def rejections(self) -> int:
        return sum(t.outcome == "reject" for t in self.trials)

    @property
    def reject_rate(self) -> float:
        return self.rejections / len(self.trials)

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.rejections, len(self.trials))

    @property
    def query_counts(self) -> np.ndarray:
        return np.array([t.queries for t in self.trials])

    @property
    def min_certified_distance(self) -> Fraction | None:
        vals = list(self.certified_distance.values())
        if not vals or any(v is None for v in vals):
            return None
        return min(vals)

    @property
    def all_witnesses_verified(self) -> bool:
        return all(t.witness_verified for t in self.trials if t.outcome == "reject")

    @property
    def all_within_ceiling(self) -> bool:
        return all(t.within_ceiling for t in self.trials)

    def aggregates(self) -> dict:
        q = self.query_counts
        lo, hi = self.wilson
        d = self.min_certified_distance
        return {
            "trials": len(self.trials),
            "rejections": self.rejections,
            "reject_rate": self.reject_rate,
            "wilson95_lower": lo,
            "wilson95_upper": hi,
            "query_mean": float(q.mean()),
            "query_max": int(q.max()),
            "all_within_ceiling": self.all_within_ceiling,
            "all_witnesses_verified": self.all_witnesses_verified,
            "certified_distance_min": None if d is None else str(d),
        }

    def to_json_obj(self, include_timing: bool = True) -> dict:
        trials = []
        for t in self.trials:
            row = asdict(t)
            if not include_timing:
                row.pop("wall_time")
            trials.append(row)
        return {
            "config": self.config,
            "aggregates": self.aggregates(),
            "certified_distance": {str(k): None if v is None else str(v)
                                   for k, v in self.certified_distance.items()},
            "trials": trials,
        }

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_json_obj(include_timing), indent=2, sort_keys=True)

    def to_csv(self, include_timing: bool = True) -> str:
        cols = [k for k in TrialRecord.__dataclass_fields__ if k != "witness"]
        if not include_timing:
            cols.remove("wall_time")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for t in self.trials:
            w.writerow([getattr(t, c) for c in cols])
        return buf.getvalue()

    def write(self, path: str | Path, fmt: str = "json") -> None:
        text = self.to_json() if fmt == "json" else self.to_csv()
        Path(path).write_text(text)


def load_function(obj: Mapping, seed: int = 0) -> TruthTable:
    if "table_hex" in obj:
        return TruthTable.from_json_obj(obj)
    return generate(FunctionSpec.from_json_obj(obj), seed)


def _directions(cfg: ExperimentConfig, n: int):
    return parse_directions(cfg.directions, n) if cfg.directions else all_up(n)


def certify(cfg: ExperimentConfig, f: TruthTable) -> Fraction | None:
    """Exact distance of ``f`` to the class the tester targets, when within caps."""
    if not cfg.certify:
        return None
    if cfg.tester == "monotone":
        if f.n > MINCUT_CAP:
            return None
        return distance_to_monotone(f, _directions(cfg, f.n)).distance
    if f.n > UNATE_CAP:
        return None
    return distance_to_unate(f).distance


def _run_trials(cfg_dict: dict, tables: dict[int, bytes], indices: Sequence[int]) -> list[TrialRecord]:
    cfg = ExperimentConfig.from_dict(cfg_dict)
    n = cfg.n
    seeds = cfg.function_seeds
    out = []
    for t in indices:
        fseed = seeds[t % len(seeds)]
        f = TruthTable(n, tables[fseed])
        seed = trial_seed(cfg.seed, t)
        rng = Rng(seed)
        start = time.perf_counter()
        if cfg.tester == "unate":
            tc = cfg.tester_config()
            run = run_unateness_tester(f, tc, rng)
            verdict, loop_q, mono_q, t_size = run.verdict, run.loop_queries, run.mono_queries, len(run.coordinates)
            ceiling = tc.query_ceiling(n, t_size)
        elif cfg.tester == "monotone":
            B = _directions(cfg, n)
            q = cfg.mono_queries if cfg.mono_queries is not None else mono_sample_count(n, cfg.epsilon)
            verdict = edge_monotonicity_tester(f, range(n), B, cfg.epsilon, rng, q=q)
            loop_q, mono_q, t_size, ceiling = 0, f.queries, n, 2 * q
        else:
            q = cfg.mono_queries if cfg.mono_queries is not None else baseline_sample_count(n, cfg.epsilon)
            verdict = baseline_edge_tester(f, cfg.epsilon, rng, q=q)
            loop_q, mono_q, t_size, ceiling = 0, f.queries, n, 2 * q
        elapsed = time.perf_counter() - start
        assert loop_q + mono_q == f.queries
        verified = verify_witness(f.fresh(), verdict) if verdict.rejected else None
        exact_budget = cfg.tester != "unate"
        out.append(TrialRecord(
            index=t, seed=seed, function_seed=fseed, outcome=verdict.outcome.value,
            queries=f.queries, loop_queries=loop_q, mono_queries=mono_q, t_size=t_size,
            within_ceiling=(f.queries == ceiling) if exact_budget else (f.queries <= ceiling),
            witness_verified=verified,
            witness=None if verdict.witness is None else verdict.witness.to_dict(),
            wall_time=elapsed,
        ))
    return out


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run ``cfg.trials`` independent trials; trial t uses function seed
    ``function_seeds[t % len]`` and PRNG seed ``trial_seed(cfg.seed, t)``."""
    n = cfg.n
    if not 1 <= n <= MAX_TABLE_DIM:
        raise ContractError(f"n={n} outside the truth-table range [1, {MAX_TABLE_DIM}]")
    if cfg.tester == "monotone" and cfg.directions:
        parse_directions(cfg.directions, n)
    tables, certified = {}, {}
    for s in dict.fromkeys(cfg.function_seeds):
        f = load_function(cfg.function, s)
        tables[s] = f.values
        certified[s] = certify(cfg, f)

    indices = list(range(cfg.trials))
    cfg_dict = cfg.to_dict()
    if cfg.workers > 1:
        chunks = [indices[i::cfg.workers] for i in range(cfg.workers)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            parts = pool.map(_run_trials, [cfg_dict] * len(chunks), [tables] * len(chunks), chunks)
            records = sorted((r for part in parts for r in part), key=lambda r: r.index)
    else:
        records = _run_trials(cfg_dict, tables, indices)
    return ExperimentReport(cfg_dict, records, certified)


def run_baseline_edge_tester(cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.tester != "baseline":
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), "tester": "baseline"})
    return run_experiment(cfg)


# --------------------------------------------------------------------- sweeps

def fit_query_exponent(ns: Sequence[int], queries: Sequence[float]) -> float:
    """Least-squares slope of log(queries / log2 n) against log n."""
    ns = np.asarray(ns, dtype=float)
    q = np.asarray(queries, dtype=float)
    if len(ns) < 2 or (ns < 2).any():
        raise ContractError("need at least two dimensions, each >= 2")
    slope, _ = np.polyfit(np.log(ns), np.log(q / np.log2(ns)), 1)
    return float(slope)


@dataclass
class SweepResult:
    rows: list[dict]
    exponents: dict[float, float]
    reports: list[ExperimentReport]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows)
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"rows": self.rows,
                           "exponents": {str(k): v for k, v in self.exponents.items()}},
                          indent=2, sort_keys=True)


def sweep(template: Mapping, ns: Sequence[int], epsilons: Sequence[float], **overrides) -> SweepResult:
    """Run one experiment per (n, epsilon); ``template`` is a FunctionSpec JSON
    whose dimension is replaced by each n."""
    spec = FunctionSpec.from_json_obj({**template, "n": template.get("n", ns[0])})
    rows, reports = [], []
    for eps in epsilons:
        for n in ns:
            cfg = ExperimentConfig(function=spec.with_n(n).to_json_obj(), epsilon=eps, **overrides)
            rep = run_experiment(cfg)
            reports.append(rep)
            agg = rep.aggregates()
            rows.append({"n": n, "epsilon": eps, **{k: agg[k] for k in (
                "trials", "reject_rate", "wilson95_lower", "query_mean", "query_max",
                "all_within_ceiling", "certified_distance_min")}})
    exps = {}
    if len(ns) >= 2 and min(ns) >= 2:
        for eps in epsilons:
            sel = [r for r in rows if r["epsilon"] == eps]
            exps[eps] = fit_query_exponent([r["n"] for r in sel], [r["query_max"] for r in sel])
    return SweepResult(rows, exps, reports)
