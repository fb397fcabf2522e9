"""Acceptance criteria, one pass/fail line each.

Run with pytest (the lines are printed in the terminal summary) or directly:
``python tests/test_acceptance.py``.  The Monte Carlo runs are cached per
process so criteria that aggregate over them do not repeat work.
"""

from __future__ import annotations

import math
import os
import sys
import tempfile
import time
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from pathlib import Path

import pytest

from cliquecouple.conditional import ConditionalQuery, brute_force_conditional, conditional_probability
from cliquecouple.coupling import CouplingConfig, derive_pi
from cliquecouple.graphs import complete_graph, cycle_graph, enumerate_copies, find_factor_direct, is_nice, sample_gnp
from cliquecouple.harness import ExperimentConfig, run_experiment, scan_csv, threshold_scan, write_outputs
from cliquecouple.matching import factor_via_coupling, run_factor_pipeline, verify_certificate
from cliquecouple.oracles import (
    EnumerationSpec,
    verify_balance_connectivity,
    verify_bd_inequality,
    verify_lemma2,
    verify_r3_exception,
)
from cliquecouple.rng import RandomStream, trial_stream

JOBS = max(1, os.cpu_count() or 1)

HISTORY_SEED = 101
MARGINAL_SEED = 202
FACTOR_SEED = 303
DIAGNOSIS_SEED = 404
ORACLE_SEED = 505
DETERMINISM_SEED = 606

# Frozen pilot at the diagnosis parameters (seed 9001, 10^4 trials): 0 failures.
# Ceiling = observed rate + 5 sigma, with the rate floored at 1/T inside sigma
# so that a zero-failure pilot still gives a nonzero allowance.
PILOT_FAILURES = 0
PILOT_TRIALS = 10_000
_pilot_rate = PILOT_FAILURES / PILOT_TRIALS
_floored = max(_pilot_rate, 1 / PILOT_TRIALS)
PILOT_FAILURE_RATE_CEILING = _pilot_rate + 5 * math.sqrt(_floored * (1 - _floored) / PILOT_TRIALS)


# --- shared Monte Carlo runs -----------------------------------------------------

@lru_cache(maxsize=None)
def thinned_triangle_run():
    cfg = ExperimentConfig(pattern="K3", n=6, p="1/2", mode="thinned", constants={"a": "0.2", "c": "0.5"},
                           trials=20_000, seed=MARGINAL_SEED, jobs=JOBS, trace_trials=0)
    return run_experiment(cfg)


@lru_cache(maxsize=None)
def plain_k4_run():
    cfg = ExperimentConfig(pattern="K4", n=7, p="1/4", constants={"beta": "1/2"},
                           trials=10_000, seed=DIAGNOSIS_SEED, jobs=JOBS, trace_trials=0)
    return run_experiment(cfg)


def _naive_perfect_matching(vertex_sets, n: int, r: int) -> bool:
    distinct = sorted(set(vertex_sets), key=sorted)
    return any(len(frozenset().union(*c)) == n for c in combinations(distinct, n // r))


@lru_cache(maxsize=None)
def factor_run():
    """Pipeline trials at n=8, K4, p=0.85, beta=1/2, with every check recorded per trial."""
    k4 = complete_graph(4)
    p = Fraction(17, 20)
    cc = CouplingConfig(8, k4, p, derive_pi(k4, p, beta=Fraction(1, 2)))
    rows = []
    for t in range(1000):
        out = run_factor_pipeline(cc, trial_stream(FACTOR_SEED, t), record_steps=True)
        res = out.result
        steps = res.step_records
        rows.append({
            "failed": res.failed,
            "success": out.success,
            "cert_ok": out.certificate is not None and verify_certificate(out.certificate),
            "direct": out.success and find_factor_direct(res.G, k4) is not None,
            "pm_naive": (not res.failed) and _naive_perfect_matching([c.vertices for c in res.H.f_edges], 8, 4),
            "sound": res.failed or all(c.edges <= res.G.edges for c in res.H.f_edges),
            "bound_violations": sum(1 for s in steps if s.lower_bound > s.pi_j),
            "inclusion_violations": sum(1 for s in steps if s.inclusion_probability != cc.pi),
            "steps": len(steps),
        })
    same = all(factor_via_coupling(cc, trial_stream(FACTOR_SEED, t)) == run_factor_pipeline(
        cc, trial_stream(FACTOR_SEED, t)).certificate for t in range(20))
    return cc, rows, same


def _records_of_runs():
    return [("thinned K3", thinned_triangle_run().records), ("plain K4", plain_k4_run().records)]


# --- criteria ----------------------------------------------------------------------

def _random_history(pattern, n, p, rng: RandomStream):
    copies = enumerate_copies(pattern, n)
    G = sample_gnp(n, p, rng)
    order = list(range(len(copies)))
    rng.shuffle(order)
    cut = rng.randbelow(len(order))
    Y = [copies[i].edges for i in order[:cut] if copies[i].edges <= G.edges]
    N = [copies[i].edges for i in order[:cut] if not copies[i].edges <= G.edges]
    target = copies[order[cut]].edges
    return ConditionalQuery.from_history(target, Y, N, p)


def criterion_1():
    start = time.perf_counter()
    checked = nontrivial = 0
    for pattern, n, p in ((complete_graph(3), 6, Fraction(1, 2)), (complete_graph(4), 7, Fraction(1, 4))):
        for i in range(200):
            q = _random_history(pattern, n, p, RandomStream(HISTORY_SEED, n, i))
            fast, slow = conditional_probability(q), brute_force_conditional(q)
            if fast != slow:
                return False, f"n={n} history {i}: engine {fast} != enumeration {slow}"
            checked += 1
            nontrivial += fast != p ** len(q.target_set)
    elapsed = time.perf_counter() - start
    ok = elapsed < 300
    return ok, f"{checked} histories equal ({nontrivial} differ from the unconditioned value), {elapsed:.1f}s"


def criterion_2():
    rep = thinned_triangle_run()
    m = rep.summary["marginals"]
    pi = Fraction(m["pi"])
    singles = max(abs(h["z"]) for h in m["hyperedges"])
    pairs = abs(m["pairs"]["max_z"])
    ok = (pi == Fraction(1, 40) and len(m["hyperedges"]) == 20 and rep.summary["errors"] == 0
          and singles <= 4 and pairs <= 4)
    return ok, (f"pi={pi}, T={m['trials']}, max |z| single={singles:.2f}, "
                f"pair={pairs:.2f} over {m['pairs']['checked']} pairs")


def criterion_3():
    bad = []
    total = 0
    for name, records in _records_of_runs():
        total += len(records)
        bad += [f"{name} trial {r.trial}" for r in records if r.error or (not r.failed and not r.sound)]
    _, rows, _ = factor_run()
    total += len(rows)
    bad += [f"factor trial {i}" for i, r in enumerate(rows) if not r["sound"]]
    return not bad, f"{total} trials, violations: {bad[:5] or 'none'}"


def criterion_4():
    bounds = inclusion = 0
    steps = 0
    for name, records in _records_of_runs():
        bounds += sum(r.bound_violations for r in records)
        inclusion += sum(r.inclusion_violations for r in records)
    runs = (thinned_triangle_run(), plain_k4_run())
    for rep in runs:
        cc = rep.config.coupling_config()
        steps += len(rep.records) * len(enumerate_copies(cc.pattern, cc.n))
        assert rep.config.record_steps
    _, rows, _ = factor_run()
    bounds += sum(r["bound_violations"] for r in rows)
    inclusion += sum(r["inclusion_violations"] for r in rows)
    steps += sum(r["steps"] for r in rows)
    return bounds == 0 and inclusion == 0, (
        f"{steps} steps, lower-bound violations {bounds}, inclusion-probability violations {inclusion}")


def criterion_5():
    start = time.perf_counter()
    exhaustive = verify_lemma2(EnumerationSpec(4, 3, 10))
    rnd = verify_lemma2(EnumerationSpec(4, 6, 19, mode="random", count=100_000, seed=ORACLE_SEED))
    elapsed = time.perf_counter() - start
    ok = exhaustive.ok and rnd.ok and rnd.instances_checked == 100_000 and elapsed < 900
    return ok, (f"exhaustive {exhaustive.instances_checked} classes, random {rnd.instances_checked}, "
                f"counterexamples {len(exhaustive.counterexamples) + len(rnd.counterexamples)}, {elapsed:.0f}s")


def criterion_6():
    rep = verify_r3_exception(EnumerationSpec(3, 4, 9))
    d = rep.details
    ok = rep.ok and d["witnessed"] == d["extra_triangles"]
    return ok, (f"{rep.instances_checked} classes, {d['avoidable_free']} avoidable-free, "
                f"{d['extra_triangles']} extra triangles, {d['witnessed']} witnessed")


def criterion_7():
    parts = []
    ok = True
    for r in range(3, 9):
        rep = verify_bd_inequality(r, seed=ORACLE_SEED)
        eq = rep.details["equality_cases"]
        ok &= rep.ok and all(set(ms) == {r - 1} for ms in eq)
        parts.append(f"r={r}:{rep.instances_checked}/{len(rep.counterexamples)}")
    return ok, "multisets/violations " + " ".join(parts)


def criterion_8():
    cliques = {r: is_nice(complete_graph(r)) for r in range(3, 7)}
    others = {"C4": is_nice(cycle_graph(4)), "C5": is_nice(cycle_graph(5))}
    atlas = verify_balance_connectivity(7)
    ok = (all(v == (4 <= r <= 6) for r, v in cliques.items()) and not any(others.values()) and atlas.ok)
    return ok, (f"nice K3..K6={[cliques[r] for r in range(3, 7)]}, C4/C5={list(others.values())}, "
                f"{atlas.instances_checked} graphs, {len(atlas.counterexamples)} violations")


def criterion_9():
    _, rows, same = factor_run()
    successes = sum(r["success"] for r in rows)
    expected = sum((not r["failed"]) and r["pm_naive"] for r in rows)
    certs = all(r["cert_ok"] and r["direct"] for r in rows if r["success"])
    ok = certs and same and successes == expected
    return ok, f"{len(rows)} trials, pipeline successes {successes}, not-failed with matching {expected}"


def criterion_10():
    rep = plain_k4_run()
    failed = [r for r in rep.records if r.failed]
    bad = [r.trial for r in failed
           if not (r.diagnosis in ("B1", "B2") or (r.diagnosis == "unexplained" and r.q_exceeds_slack is True))]
    f = rep.summary["failure"]
    diag = rep.summary["diagnosis"]
    ceiling = PILOT_FAILURE_RATE_CEILING
    ok = not bad and f["rate"] <= ceiling
    return ok, (f"failure rate {f['rate']:.5f} (se {f['se']:.5f}, ceiling {ceiling:.6f}), "
                f"B1={diag['B1']} B2={diag['B2']} unexplained={diag['unexplained']}, misclassified {bad[:5]}")


def criterion_11():
    configs = [
        ExperimentConfig(pattern="K4", n=7, p="1/4", trials=300, seed=DETERMINISM_SEED),
        ExperimentConfig(kind="factor", pattern="K4", n=8, p="0.85", trials=200, seed=DETERMINISM_SEED),
        ExperimentConfig(pattern="K3", n=6, p="1/2", mode="thinned", constants={"a": "0.2", "c": "0.5"},
                         trials=300, seed=DETERMINISM_SEED),
    ]
    mismatches = []
    with tempfile.TemporaryDirectory() as tmp:
        for i, cfg in enumerate(configs):
            blobs = []
            for k, jobs in enumerate((1, 1, 8)):
                cfg.jobs = jobs
                out = Path(tmp) / f"{i}_{k}"
                write_outputs(run_experiment(cfg), out)
                blobs.append((out / "trials.csv").read_bytes())
            if len(set(blobs)) != 1:
                mismatches.append(f"{cfg.kind} {cfg.pattern}")
    scan = ExperimentConfig(kind="scan", pattern="K3", n=6, trials=50, seed=DETERMINISM_SEED,
                            p_grid=["1/4", "1/2", "3/4"])
    texts = set()
    for jobs in (1, 8):
        scan.jobs = jobs
        texts.add(scan_csv(threshold_scan(scan)).encode())
    if len(texts) != 1:
        mismatches.append("scan")
    return not mismatches, f"{len(configs)} experiments and 1 scan at jobs 1, 1, 8; mismatches {mismatches or 'none'}"


CRITERIA = [
    (1, "exact conditional equals enumeration", criterion_1),
    (2, "marginals of H within 4 sigma", criterion_2),
    (3, "coupling soundness", criterion_3),
    (4, "lower bound and inclusion probability", criterion_4),
    (5, "no extra K4 in avoidable-free hypergraphs", criterion_5),
    (6, "every extra triangle lies on a clean 3-cycle", criterion_6),
    (7, "intersection-size inequality", criterion_7),
    (8, "classifier table", criterion_8),
    (9, "pipeline cross-check", criterion_9),
    (10, "failure diagnosis", criterion_10),
    (11, "determinism across job counts", criterion_11),
]


def run_criterion(number: int) -> tuple[bool, str]:
    _, title, fn = CRITERIA[number - 1]
    start = time.perf_counter()
    ok, detail = fn()
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}: {detail} ({time.perf_counter() - start:.1f}s)"
    return ok, line


@pytest.mark.slow
@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number):
    from conftest import ACCEPTANCE_LINES

    ok, line = run_criterion(number)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    failures = 0
    for number, _, _ in CRITERIA:
        ok, line = run_criterion(number)
        print(line, flush=True)
        failures += not ok
    sys.exit(1 if failures else 0)
