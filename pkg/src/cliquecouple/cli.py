"""Command-line entry point: ``cliquecouple <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .coupling import diagnose_failure, run_coupling
from .errors import BudgetError, CliqueCoupleError, ConfigError
from .graphs import load_pattern
from .harness import (
    ExperimentConfig,
    run_experiment,
    scan_csv,
    threshold_scan,
    write_outputs,
)
from .hypergraph import FGraph, Hypergraph
from .matching import perfect_matching
from .oracles import (
    EXHAUSTIVE_CAPS,
    EnumerationSpec,
    LemmaReport,
    bound_MF,
    classifier_table,
    verify_balance_connectivity,
    verify_bd_inequality,
    verify_lemma2,
    verify_lemma8,
    verify_mbd,
    verify_r3_exception,
)
from .rng import trial_stream

WITNESS_LIMIT = 20

CHECKS = {
    "clique-extras": "no extra K_r copies in avoidable-free r-graphs (r >= 4)",
    "triangle-cycles": "every extra triangle in an avoidable-free 3-graph lies on a clean 3-cycle",
    "pair-count": "intersection-size inequality for covering the pairs of K_r",
    "copy-witness": "extra F-copies in avoidable-free F-graphs and their witnesses",
    "extra-copy-bound": "lower bound on extra copies meeting one F-edge",
    "subgraph-density": "strict density gap for proper subgraphs of F",
    "balance": "strictly 1-balanced implies 2-connected on small graphs",
}


def _experiment_config(args, kind: str) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig(kind=kind)
    cfg = replace(cfg, kind=kind)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    if args.jobs is not None:
        cfg = replace(cfg, jobs=args.jobs)
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    return cfg


def _print_summary(summary: dict) -> None:
    f = summary["failure"]
    print(f"trials: {summary['trials']}  errors: {summary['errors']}")
    if f["rate"] is not None:
        print(f"failure rate: {f['rate']:.6f} (se {f['se']:.6f})")
    print("diagnosis: " + ", ".join(f"{k}={v}" for k, v in summary["diagnosis"].items()))
    print(f"soundness violations: {summary['soundness_violations']}  "
          f"bound violations: {summary['bound_violations']}  "
          f"inclusion violations: {summary['inclusion_violations']}")
    m = summary.get("marginals", {})
    if m.get("hyperedges"):
        print(f"max |z| single: {m['max_abs_z_single']:.3f}  max |z| pair: {abs(m['pairs']['max_z']):.3f}")
    if "factor" in summary and summary["factor"]["rate"] is not None:
        print(f"factor success: {summary['factor']['rate']:.6f} (se {summary['factor']['se']:.6f})")


def cmd_experiment(args, kind: str) -> int:
    cfg = _experiment_config(args, kind)
    report = run_experiment(cfg)
    _print_summary(report.summary)
    if cfg.out:
        paths = write_outputs(report, cfg.out)
        written = 0
        for rec in report.records:
            if written >= WITNESS_LIMIT:
                break
            if rec.diagnosis == "B2":
                cc = cfg.coupling_config()
                diag = diagnose_failure(run_coupling(cc, trial_stream(cfg.seed, rec.trial)))
                if diag.witness is not None:
                    path = Path(cfg.out) / f"witness_trial{rec.trial}.hyp"
                    path.write_text(f"# avoidable configuration at step {diag.step}\n" + diag.witness.to_text())
                    paths.append(path)
                    written += 1
        for p in paths:
            print(f"wrote {p}")
    return 0


def cmd_scan(args) -> int:
    cfg = _experiment_config(args, "scan")
    text = scan_csv(threshold_scan(cfg))
    sys.stdout.write(text)
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "scan.csv").write_text(text)
        (out / "summary.json").write_text(cfg.to_json() + "\n")
    return 0


def _oracle_report(args) -> tuple[LemmaReport | None, str]:
    check = args.check
    if check in ("clique-extras", "triangle-cycles"):
        r = args.r or (4 if check == "clique-extras" else 3)
        default_e, default_v = EXHAUSTIVE_CAPS.get(r, (6, None)) if args.mode == "exhaustive" else (6, None)
        max_e = args.max_hyperedges or default_e
        max_v = args.max_vertices or default_v or max_e * (r - 1) + 1
        spec = EnumerationSpec(r, max_e, max_v, mode=args.mode, count=args.count, seed=args.seed)
        rep = verify_lemma2(spec) if check == "clique-extras" else verify_r3_exception(spec)
        return rep, rep.to_text()
    if check == "pair-count":
        if args.r is None:
            raise ConfigError("--r is required for the pair-count check")
        rep = verify_bd_inequality(args.r, random_checks=args.count, seed=args.seed)
        return rep, rep.to_text()
    if check == "balance":
        rep = verify_balance_connectivity(args.max_vertices or 7)
        return rep, rep.to_text()
    pattern = load_pattern(args.pattern or "K4")
    if check == "copy-witness":
        max_e = args.max_hyperedges or 5
        spec = EnumerationSpec(pattern.r, max_e, args.max_vertices or max(pattern.r, min(3 * pattern.r, 12)),
                               mode="random", count=args.count, seed=args.seed)
        rep = verify_lemma8(pattern, spec)
        return rep, rep.to_text()
    if check == "subgraph-density":
        rep = verify_mbd(pattern)
        return rep, rep.to_text()
    if check == "extra-copy-bound":
        res = bound_MF(pattern, budget=args.budget, seed=args.seed)
        text = (f"check: extra-copy-bound-{pattern.name}\nlower_bound: {res.lower_bound}\n"
                f"certified_zero: {str(res.certified_zero).lower()}\n"
                f"decorations_checked: {res.decorations_checked}\nexhaustive: {str(res.exhaustive).lower()}\n"
                f"counterexamples: {len(res.counterexamples)}\n")
        rep = LemmaReport(f"extra-copy-bound-{pattern.name}", res.decorations_checked, res.counterexamples)
        if res.witness is not None and args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "mf_witness.fgraph").write_text(
                f"# F-edge {res.witness_edge} meets {res.lower_bound} extra copies\n" + res.witness.to_text())
        return rep, text
    raise ConfigError(f"unknown check {check!r}")


def cmd_oracle(args) -> int:
    rep, text = _oracle_report(args)
    sys.stdout.write(text)
    if args.out and rep is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text)
        for i, ce in enumerate(rep.counterexamples[:WITNESS_LIMIT]):
            w = ce.witness
            if isinstance(w, Hypergraph):
                (out / f"counterexample_{i}.hyp").write_text(w.to_text())
            elif isinstance(w, FGraph):
                (out / f"counterexample_{i}.fgraph").write_text(w.to_text())
            elif w is not None:
                (out / f"counterexample_{i}.graph").write_text(w.to_text())
    return 0 if rep is None or rep.ok else 1


def cmd_matching(args) -> int:
    try:
        text = Path(args.hypergraph).read_text()
    except FileNotFoundError:
        raise ConfigError(f"hypergraph file {args.hypergraph} not found") from None
    try:
        H = Hypergraph.from_text(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    m = perfect_matching(H)
    out = "none\n" if m is None else m.to_text()
    sys.stdout.write(out)
    if args.out:
        Path(args.out).write_text(out)
    return 0


def cmd_classify(args) -> int:
    rows = classifier_table([load_pattern(p) for p in args.patterns])
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    cols = ["pattern", "r", "s", "d1", "one_balanced", "strictly_one_balanced", "two_connected",
            "three_connected", "edge_swap_rigid", "nice"]
    print("\t".join(cols))
    for row in rows:
        print("\t".join(str(row[c]).lower() if isinstance(row[c], bool) else str(row[c]) for c in cols))
    return 0


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cliquecouple", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("couple", "Monte Carlo runs of the coupling"),
                            ("factor", "coupling, matching and factor pipeline"),
                            ("scan", "factor rates across a grid of p")):
        _add_run_flags(sub.add_parser(name, help=help_text))
    o = sub.add_parser("oracle", help="exhaustive and randomized structure checks",
                      epilog="checks: " + "; ".join(f"{k}: {v}" for k, v in CHECKS.items()))
    o.add_argument("--check", required=True, choices=list(CHECKS))
    o.add_argument("--r", type=int)
    o.add_argument("--mode", choices=["exhaustive", "random"], default="exhaustive")
    o.add_argument("--max-hyperedges", type=int)
    o.add_argument("--max-vertices", type=int)
    o.add_argument("--count", type=int, default=1000)
    o.add_argument("--pattern")
    o.add_argument("--budget", type=int, default=5000)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out")
    m = sub.add_parser("matching", help="perfect matching of a hypergraph file")
    m.add_argument("hypergraph")
    m.add_argument("--out")
    c = sub.add_parser("classify", help="classify pattern graphs")
    c.add_argument("patterns", nargs="+", help="names (K4, C5, petersen, ...) or graph files")
    c.add_argument("--json", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("couple", "factor"):
            return cmd_experiment(args, args.command)
        if args.command == "scan":
            return cmd_scan(args)
        if args.command == "oracle":
            return cmd_oracle(args)
        if args.command == "matching":
            return cmd_matching(args)
        return cmd_classify(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except CliqueCoupleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
