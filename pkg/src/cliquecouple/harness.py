"""Seeded Monte Carlo experiments, parameter schedules and their outputs."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any

from .coupling import (
    CouplingConfig,
    CouplingResult,
    derive_pi,
    diagnose_failure,
    is_sound,
    run_coupling,
    run_coupling_lazy_equivalence,
)
from .errors import CliqueCoupleError, ConfigError, InvalidConstants, OutOfRange
from .graphs import PatternGraph, enumerate_copies, find_factor_direct, load_pattern, sample_gnp
from .hypergraph import to_hypergraph
from .matching import perfect_matching, run_factor_pipeline
from .rng import RandomStream, trial_stream

CSV_VERSION = 1
ROUNDING_DENOMINATOR = 10**6
KINDS = ("couple", "scan", "oracle", "matching", "factor", "classify")
PAIR_REPORT_LIMIT = 2000
MARGINAL_COPY_LIMIT = 500


def parse_fraction(value: Any, name: str = "value") -> Fraction:
    """Exact rational from an int, a "a/b" string or a decimal string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or value is None:
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if isinstance(value, float):
        raise ConfigError(f"{name}: write floats as strings (e.g. \"0.85\") to keep them exact")
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{name}: cannot parse {value!r} as a rational") from None


def _rounded(x: float) -> Fraction:
    return Fraction(x).limit_denominator(ROUNDING_DENOMINATOR)


# --- schedules ---------------------------------------------------------------

def schedule_parameters(kind: str, pattern: PatternGraph, n: int, constants: dict) -> dict[str, Fraction]:
    """Concrete (p, pi, c) for a growth schedule at size n.

    ``balanced``: p = (log n)^a_exp n^(-1/d1) with d1 a_exp > 2,
    pi = C_const log n n^-(r-1) and c = 2 pi / p^s.  p and c are rounded to
    the nearest rational with denominator at most 10^6 and pi is then set to
    c p^s / 2 exactly, so the three values stay consistent.

    ``clique``: p = n^(-2/r + epsilon) and pi = (1 - beta) p^s, for complete
    patterns; epsilon is a free exponent.

    Both also report ``p0 = ((aut/r) n^(-r+1) log n)^(1/s)``.
    """
    r, s, d1 = pattern.r, pattern.s, pattern.d1
    if n < max(r, 2):
        raise OutOfRange(f"n={n} is smaller than the pattern")
    log_n = math.log(n)
    p0 = _rounded((pattern.aut_count / r * n ** (-r + 1) * log_n) ** (1 / s))
    if kind == "balanced":
        a_exp = parse_fraction(constants.get("a_exp", "1.01"), "a_exp")
        c_const = parse_fraction(constants.get("C_const", 1), "C_const")
        if d1 * a_exp <= 2:
            raise InvalidConstants(f"d1*a_exp = {d1 * a_exp} must exceed 2")
        if c_const <= 0:
            raise InvalidConstants("C_const must be positive")
        p_raw = log_n ** float(a_exp) * n ** (-1 / float(d1))
        if not 0 < p_raw <= 1:
            raise OutOfRange(f"p = {p_raw:.6g} is not a probability at n={n}")
        p = _rounded(p_raw)
        if p == 0:
            raise OutOfRange(f"p rounds to 0 at n={n}")
        pi_raw = float(c_const) * log_n * n ** (-(r - 1))
        c_raw = 2 * pi_raw / float(p) ** s
        if not 0 < c_raw <= 1:
            raise OutOfRange(f"c = {c_raw:.6g} leaves (0,1] at n={n}")
        c = _rounded(c_raw)
        if c == 0:
            raise OutOfRange(f"c rounds to 0 at n={n}")
        return {"p": p, "pi": c * p**s / 2, "c": c, "p0": p0}
    if kind == "clique":
        if not pattern.is_complete:
            raise InvalidConstants("the clique schedule needs a complete pattern")
        eps = parse_fraction(constants.get("epsilon", 0), "epsilon")
        beta = parse_fraction(constants.get("beta", "1/2"), "beta")
        p_raw = n ** (-2 / r + float(eps))
        if not 0 < p_raw <= 1:
            raise OutOfRange(f"p = {p_raw:.6g} is not a probability at n={n}")
        p = _rounded(p_raw)
        return {"p": p, "pi": derive_pi(pattern, p, beta=beta), "c": Fraction(1), "p0": p0}
    raise ConfigError(f"unknown schedule {kind!r}")


# --- configuration -------------------------------------------------------------

@dataclass
class ExperimentConfig:
    """One experiment, loadable from a JSON object with the same keys.

    ``p`` is a literal rational (``"1/2"``, ``"0.85"``) or the name of a
    schedule (``"balanced"`` or ``"clique"``), in which case ``constants``
    feeds :func:`schedule_parameters`.  ``pi`` overrides the density
    derived from ``mode`` and the constants.
    """

    kind: str = "couple"
    pattern: str = "K3"
    n: int = 6
    p: str = "1/2"
    mode: str = "plain"
    constants: dict = field(default_factory=dict)
    pi: str | None = None
    trials: int = 100
    seed: int = 0
    jobs: int = 1
    out: str | None = None
    copy_order: str = "canonical"
    delta_cap: int | None = None
    lazy: bool = False
    record_steps: bool = True
    trace_trials: int = 1
    p_grid: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.mode not in ("plain", "thinned"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.trials < 0 or self.jobs < 1:
            raise ConfigError("trials must be >= 0 and jobs >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file {path} not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    def pattern_graph(self) -> PatternGraph:
        return load_pattern(self.pattern)

    def coupling_config(self, p_override: Fraction | None = None) -> CouplingConfig:
        pattern = self.pattern_graph()
        k = self.constants
        thinning = None
        if p_override is not None:
            p = p_override
        elif self.p in ("balanced", "clique"):
            sched = schedule_parameters(self.p, pattern, self.n, k)
            p = sched["p"]
            if self.pi is None:
                if self.p == "balanced":
                    return self._make(pattern, p, sched["pi"], sched["c"])
                return self._make(pattern, p, sched["pi"], None)
        else:
            p = parse_fraction(self.p, "p")
        if self.mode == "thinned":
            thinning = parse_fraction(k["c"], "c") if "c" in k else None
        if self.pi is not None:
            pi = parse_fraction(self.pi, "pi")
        elif self.mode == "plain":
            pi = derive_pi(pattern, p, beta=parse_fraction(k.get("beta", "1/2"), "beta"))
        else:
            m_f = k.get("m_f")
            a = parse_fraction(k["a"], "a") if "a" in k else None
            pi = derive_pi(pattern, p, "thinned", a=a, c=thinning, m_f=m_f)
            if thinning is None:
                thinning = Fraction(1, 2 * (int(m_f) + 1))
        return self._make(pattern, p, pi, thinning)

    def _make(self, pattern, p, pi, thinning) -> CouplingConfig:
        if self.mode == "plain":
            thinning = None
        elif thinning is None:
            raise InvalidConstants("thinned mode needs c")
        return CouplingConfig(self.n, pattern, p, pi, thinning, self.copy_order, self.delta_cap)

    def slack_threshold(self, cc: CouplingConfig) -> Fraction | None:
        """Q_j must exceed this for a failing step to be possible."""
        ps = cc.p ** cc.pattern.s
        if ps == 0:
            return None
        ratio = cc.pi / ps
        if cc.thinning is None:
            return 1 - ratio
        c = cc.thinning
        return (c - ratio) / (c * c)


# --- trials --------------------------------------------------------------------

@dataclass
class TrialRecord:
    trial: int
    seed: int
    failed: bool = False
    deadly_step: int | None = None
    diagnosis: str = ""
    deadly_q: str = ""
    q_exceeds_slack: bool | None = None
    h_edges: int = 0
    g_edges: int = 0
    h_copies: tuple[int, ...] = ()
    sound: bool = True
    bound_violations: int = 0
    inclusion_violations: int = 0
    dangerous_steps: int = 0
    b1: bool = False
    b2: bool = False
    matching_found: bool | None = None
    factor_found: bool | None = None
    factor_direct: bool | None = None
    error: str = ""
    runtime: float = field(default=0.0, compare=False)

    CSV_FIELDS = (
        "trial", "seed", "failed", "deadly_step", "diagnosis", "deadly_q", "q_exceeds_slack",
        "h_edges", "g_edges", "h_copies", "sound", "bound_violations", "inclusion_violations",
        "dangerous_steps", "b1", "b2", "matching_found", "factor_found", "factor_direct", "error",
    )

    def csv_row(self) -> list[str]:
        out = []
        for name in self.CSV_FIELDS:
            v = getattr(self, name)
            if v is None:
                out.append("")
            elif isinstance(v, bool):
                out.append("1" if v else "0")
            elif isinstance(v, tuple):
                out.append(" ".join(map(str, v)))
            else:
                out.append(str(v))
        return out


def _check_steps(rec: TrialRecord, result: CouplingResult) -> None:
    pi = result.config.pi
    for s in result.step_records:
        if s.lower_bound > s.pi_j:
            rec.bound_violations += 1
        if s.inclusion_probability != pi:
            rec.inclusion_violations += 1
        if s.klass != "normal":
            rec.dangerous_steps += 1


def _fill_from_result(rec: TrialRecord, cfg: ExperimentConfig, cc: CouplingConfig, result: CouplingResult) -> None:
    index = {c.edges: i for i, c in enumerate(enumerate_copies(cc.pattern, cc.n))}
    rec.failed = result.failed
    rec.deadly_step = result.deadly_step
    rec.h_edges = len(result.H.f_edges)
    rec.g_edges = result.G.edge_count
    rec.h_copies = tuple(sorted(index[c.edges] for c in result.H.f_edges))
    rec.sound = result.failed or is_sound(result)
    rec.b1, rec.b2 = result.b1_flag, result.b2_flag
    _check_steps(rec, result)
    if result.failed:
        diag = diagnose_failure(result)
        rec.diagnosis = diag.kind
        if diag.kind == "unexplained":
            slack = cfg.slack_threshold(cc)
            if diag.q_j is not None:
                rec.deadly_q = str(diag.q_j)
                rec.q_exceeds_slack = slack is not None and diag.q_j > slack
            else:
                rec.q_exceeds_slack = None


def run_trial(cfg: ExperimentConfig, trial: int, cc: CouplingConfig | None = None) -> tuple[TrialRecord, list[dict]]:
    """One seeded trial; module errors are recorded, never raised."""
    rec = TrialRecord(trial=trial, seed=cfg.seed)
    trace: list[dict] = []
    start = time.perf_counter()
    try:
        cc = cc or cfg.coupling_config()
        rng = trial_stream(cfg.seed, trial)
        if cfg.kind == "factor":
            outcome = run_factor_pipeline(cc, rng, record_steps=cfg.record_steps)
            result = outcome.result
            rec.factor_found = outcome.success
            if not result.failed:
                rec.matching_found = outcome.matching is not None
            if outcome.success:
                rec.factor_direct = find_factor_direct(result.G, cc.pattern) is not None
        else:
            runner = run_coupling_lazy_equivalence if cfg.lazy else run_coupling
            result = runner(cc, rng, record_steps=cfg.record_steps)
        _fill_from_result(rec, cfg, cc, result)
        if trial < cfg.trace_trials:
            trace = [dict(s.as_json(), trial=trial) for s in result.step_records]
    except CliqueCoupleError as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
    rec.runtime = time.perf_counter() - start
    return rec, trace


def _trial_batch(args: tuple[ExperimentConfig, list[int]]) -> list[tuple[TrialRecord, list[dict]]]:
    cfg, trials = args
    cc = cfg.coupling_config()
    return [run_trial(cfg, t, cc) for t in trials]


def _map_trials(cfg: ExperimentConfig, worker, trials: list[int], jobs: int) -> list:
    if jobs <= 1 or len(trials) < 2:
        return worker((cfg, trials))
    chunk = max(1, math.ceil(len(trials) / (jobs * 4)))
    batches = [trials[i:i + chunk] for i in range(0, len(trials), chunk)]
    out = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(worker, [(cfg, b) for b in batches]):
            out.extend(part)
    return out


# --- aggregation ---------------------------------------------------------------

def rate(count: int, total: int) -> dict:
    if total == 0:
        return {"count": count, "total": 0, "rate": None, "se": None}
    q = count / total
    return {"count": count, "total": total, "rate": q, "se": math.sqrt(q * (1 - q) / total)}


def marginal_table(records: list[TrialRecord], n_copies: int, pi: Fraction, labels: list[str]) -> dict:
    """Per-copy inclusion frequencies and pairwise co-occurrence, each as a z-score against pi."""
    ok = [r for r in records if not r.error]
    T = len(ok)
    if T == 0 or n_copies == 0 or n_copies > MARGINAL_COPY_LIMIT:
        return {"trials": T, "hyperedges": [], "pairs": {}}
    counts = [0] * n_copies
    pair_counts: dict[tuple[int, int], int] = {}
    for r in ok:
        hs = r.h_copies
        for i in hs:
            counts[i] += 1
        for a in range(len(hs)):
            for b in range(a + 1, len(hs)):
                key = (hs[a], hs[b])
                pair_counts[key] = pair_counts.get(key, 0) + 1
    pf = float(pi)
    sd1 = math.sqrt(pf * (1 - pf) / T) if 0 < pf < 1 else 0.0
    p2 = pf * pf
    sd2 = math.sqrt(p2 * (1 - p2) / T) if 0 < p2 < 1 else 0.0
    hyper = []
    for i in range(n_copies):
        freq = counts[i] / T
        z = (freq - pf) / sd1 if sd1 else (0.0 if freq == pf else math.inf)
        hyper.append({"copy": i, "vertices": labels[i], "count": counts[i], "freq": freq, "z": z})
    max_pair_z = 0.0
    beyond = []
    n_pairs = n_copies * (n_copies - 1) // 2
    for a in range(n_copies):
        for b in range(a + 1, n_copies):
            c = pair_counts.get((a, b), 0)
            freq = c / T
            z = (freq - p2) / sd2 if sd2 else (0.0 if freq == p2 else math.inf)
            if abs(z) > abs(max_pair_z):
                max_pair_z = z
            if abs(z) > 4 and len(beyond) < PAIR_REPORT_LIMIT:
                beyond.append({"pair": [a, b], "count": c, "z": z})
    return {
        "trials": T,
        "pi": str(pi),
        "sigma_single": sd1,
        "sigma_pair": sd2,
        "hyperedges": hyper,
        "max_abs_z_single": max((abs(h["z"]) for h in hyper), default=0.0),
        "pairs": {"checked": n_pairs, "max_z": max_pair_z, "beyond_4_sigma": beyond},
    }


def summarize(cfg: ExperimentConfig, cc: CouplingConfig | None, records: list[TrialRecord]) -> dict:
    T = len(records)
    ok = [r for r in records if not r.error]
    failed = [r for r in ok if r.failed]
    summary: dict[str, Any] = {
        "csv_version": CSV_VERSION,
        "config": json.loads(cfg.to_json()),
        "trials": T,
        "errors": sum(1 for r in records if r.error),
        "failure": rate(len(failed), len(ok)),
        "diagnosis": {k: sum(1 for r in failed if r.diagnosis == k) for k in ("B1", "B2", "unexplained")},
        "unexplained_without_large_q": sum(1 for r in failed if r.diagnosis == "unexplained" and not r.q_exceeds_slack),
        "soundness_violations": sum(1 for r in ok if not r.sound),
        "bound_violations": sum(r.bound_violations for r in ok),
        "inclusion_violations": sum(r.inclusion_violations for r in ok),
        "dangerous_steps": sum(r.dangerous_steps for r in ok),
        "avoidable_configuration": rate(sum(1 for r in ok if r.b2), len(ok)),
        "max_degree_event": rate(sum(1 for r in ok if r.b1), len(ok)),
    }
    if cc is not None:
        summary["parameters"] = {
            "p": str(cc.p), "pi": str(cc.pi), "c": None if cc.thinning is None else str(cc.thinning),
            "delta": cc.delta, "slack_threshold": str(cfg.slack_threshold(cc)),
        }
        copies = enumerate_copies(cc.pattern, cc.n)
        labels = [" ".join(map(str, c.vertex_image)) for c in copies]
        summary["marginals"] = marginal_table(records, len(copies), cc.pi, labels)
    if cfg.kind == "factor":
        summary["factor"] = rate(sum(1 for r in ok if r.factor_found), len(ok))
        summary["matching_given_not_failed"] = rate(
            sum(1 for r in ok if r.matching_found), sum(1 for r in ok if not r.failed))
        summary["factor_direct_confirmed"] = sum(1 for r in ok if r.factor_direct)
    return summary


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: list[TrialRecord]
    summary: dict
    trace: list[dict]

    def csv_text(self) -> str:
        return records_csv(self.records)


def records_csv(records: list[TrialRecord]) -> str:
    buf = io.StringIO()
    buf.write(f"# cliquecouple trials v{CSV_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TrialRecord.CSV_FIELDS)
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run cfg.trials seeded trials (in cfg.jobs processes) and aggregate them.

    Trial t always uses the stream (seed, t), and results are collected in
    trial order, so outputs do not depend on the number of processes.
    """
    if cfg.kind not in ("couple", "factor"):
        raise ConfigError(f"run_experiment handles couple and factor experiments, not {cfg.kind!r}")
    cc = cfg.coupling_config()
    if cfg.kind == "factor" and cc.n % cc.pattern.r:
        raise ConfigError(f"|F|={cc.pattern.r} does not divide n={cc.n}")
    pairs = _map_trials(cfg, _trial_batch, list(range(cfg.trials)), cfg.jobs)
    records = [rec for rec, _ in pairs]
    trace = [row for _, rows in pairs for row in rows]
    return ExperimentReport(cfg, records, summarize(cfg, cc, records), trace)


def write_outputs(report: ExperimentReport, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "trials.csv", out / "summary.json", out / "trace.jsonl"]
    paths[0].write_text(report.csv_text())
    paths[1].write_text(json.dumps(report.summary, sort_keys=True, indent=2) + "\n")
    paths[2].write_text("".join(json.dumps(row, sort_keys=True) + "\n" for row in report.trace))
    return paths


# --- threshold scan --------------------------------------------------------------

@dataclass
class ScanRow:
    p: Fraction
    trials: int
    direct: dict
    pipeline: dict
    pipeline_errors: int


def _scan_batch(args: tuple[ExperimentConfig, list[tuple[int, int]]]) -> list[tuple[int, int, bool, bool | None]]:
    cfg, jobs = args
    pattern = cfg.pattern_graph()
    grid = [parse_fraction(p, "p_grid entry") for p in cfg.p_grid]
    out = []
    for gi, t in jobs:
        p = grid[gi]
        G = sample_gnp(cfg.n, p, RandomStream(cfg.seed, t, 0))
        direct = find_factor_direct(G, pattern) is not None
        try:
            cc = cfg.coupling_config(p_override=p)
            piped: bool | None = run_factor_pipeline(cc, RandomStream(cfg.seed, t, 1)).success
        except CliqueCoupleError:
            piped = None
        out.append((gi, t, direct, piped))
    return out


def threshold_scan(cfg: ExperimentConfig) -> list[ScanRow]:
    """Direct factor rate and pipeline success rate across a grid of p.

    Trial t draws G from the same stream at every grid point, so the graphs
    are monotone in p along a trial.
    """
    if not cfg.p_grid:
        raise ConfigError("scan needs a non-empty p_grid")
    pattern = cfg.pattern_graph()
    if cfg.n % pattern.r:
        raise ConfigError(f"|F|={pattern.r} does not divide n={cfg.n}")
    grid = [parse_fraction(p, "p_grid entry") for p in cfg.p_grid]
    if any(not 0 <= p <= 1 for p in grid):
        raise InvalidConstants("grid values must lie in [0,1]")
    work = [(gi, t) for gi in range(len(grid)) for t in range(cfg.trials)]
    results = _map_trials(cfg, _scan_batch, work, cfg.jobs)
    rows = []
    for gi, p in enumerate(grid):
        mine = [x for x in results if x[0] == gi]
        piped = [x[3] for x in mine if x[3] is not None]
        rows.append(ScanRow(
            p=p, trials=len(mine),
            direct=rate(sum(1 for x in mine if x[2]), len(mine)),
            pipeline=rate(sum(1 for x in piped if x), len(piped)),
            pipeline_errors=len(mine) - len(piped),
        ))
    return rows


def scan_csv(rows: list[ScanRow]) -> str:
    buf = io.StringIO()
    buf.write(f"# cliquecouple scan v{CSV_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "trials", "direct_rate", "direct_se", "pipeline_rate", "pipeline_se", "pipeline_errors"])
    for r in rows:
        w.writerow([str(r.p), r.trials, _fmt(r.direct["rate"]), _fmt(r.direct["se"]),
                    _fmt(r.pipeline["rate"]), _fmt(r.pipeline["se"]), r.pipeline_errors])
    return buf.getvalue()


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def matching_exists(result: CouplingResult) -> bool:
    return perfect_matching(to_hypergraph(result.H)) is not None
