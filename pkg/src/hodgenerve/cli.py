"""Command-line front door.

Exit codes: 0 when every audit passes, 2 on an audit failure, 1 on a usage
or configuration error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report as rp
from .config import ConfigError, ExperimentConfig, load_config
from .pipeline import (compare_torus, eps_dir, run_nets, run_pipeline, treves_report,
                       whitney_check, write_comparison)

EXIT_OK, EXIT_USAGE, EXIT_AUDIT = 0, 1, 2


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    if args.out:
        cfg = cfg.with_out(Path(args.out).resolve())
    return cfg


def _out(args, cfg: ExperimentConfig | None) -> Path:
    if cfg is not None:
        return cfg.out_dir()
    return Path(args.out or "reports")


def cmd_net(args) -> int:
    cfg = _load(args)
    summary = run_nets(cfg)
    rp.write_metadata(cfg.out_dir(), "net")
    bad = any(r.get("separation_violations") or r.get("uncovered") for r in summary["nets"])
    aborted = any(r["status"] == "aborted" for r in summary["nets"])
    for r in summary["nets"]:
        print(f"eps={r['epsilon']!r}: " + (r.get("error") or f"|X|={r['n_centers']}"))
    return EXIT_AUDIT if bad or aborted else EXIT_OK


def _sweep(args, parts, name) -> int:
    cfg = _load(args)
    results, summary = run_pipeline(cfg, parts=parts)
    rp.write_metadata(cfg.out_dir(), name)
    for r in results:
        if r.aborted:
            print(f"eps={r.epsilon!r}: aborted ({r.error})")
        else:
            status = "pass" if r.passed else "FAIL " + ",".join(sorted({a.bound for a in r.audits if not a.passed}))
            print(f"eps={r.epsilon!r}: |X|={r.n_centers} counts={list(r.stats.counts)} "
                  f"nu={r.stats.nu} betti={r.bettis} audits={status}")
    if summary["aborted"] or not summary["all_audits_pass"]:
        return EXIT_AUDIT
    return EXIT_OK


def cmd_nerve(args) -> int:
    return _sweep(args, ("nerve",), "nerve")


def cmd_spectrum(args) -> int:
    return _sweep(args, ("nerve", "spectrum"), "spectrum")


def cmd_audit(args) -> int:
    return _sweep(args, ("nerve", "spectrum", "audit"), "audit")


def cmd_treves(args) -> int:
    cfg = _load(args) if args.config else None
    out = _out(args, cfg)
    seed = cfg.seed if cfg else args.seed
    rep = treves_report(args.m, seed=seed, n_random=args.random)
    cx = rep["counterexample"]
    rp.write_csv(out / "counterexample.csv", rp.COUNTEREXAMPLE_CSV_HEADER,
                 [(cx["m"], cx["ratio"].numerator, cx["ratio"].denominator)])
    rp.write_json(out / "counterexample.json", {k: v for k, v in cx.items()})
    rp.write_json(out / "audits.json", [a.as_dict() for a in rep["audits"]])
    rp.write_metadata(out, "treves")
    print(f"m={cx['m']}: ||BAv||^2/||Av||^2 = {cx['ratio']} (expected {cx['expected_ratio']}), "
          f"exceeds {cx['linear_reference']:g}: {cx['exceeds_linear']}")
    return EXIT_OK if rep["passed"] else EXIT_AUDIT


def cmd_whitney(args) -> int:
    cfg = _load(args)
    out = cfg.out_dir()
    ok = True
    for i, eps in enumerate(cfg.epsilon):
        res = whitney_check(cfg, i)
        d = eps_dir(out, eps)
        rp.write_csv(d / "residual_study.csv", rp.STUDY_CSV_HEADER,
                     ((r.check, r.N, r.residual, r.observed_order) for r in res["study"]))
        rp.write_json(d / "whitney.json", {
            "epsilon": eps, "n_centers": res["n_centers"], "order_ok": res["order_ok"],
            "partition_defect": res["partition_defect"], "support_leak": res["support_leak"],
            "pass": res["passed"]})
        rp.write_json(d / "audits.json", [a.as_dict() for a in res["audits"]])
        nerve, pou = res["nerve"], res["pou"]
        if nerve.size(1):
            from .whitney import whitney_form
            rp.write_text(d / "whitney_form_q1.txt", whitney_form(nerve, nerve.S(1)[0], pou).dump())
        orders = ", ".join(f"{k}={v}" for k, v in res["order_ok"].items())
        print(f"eps={eps!r}: orders ok [{orders}] leak={res['support_leak']:.3g} "
              f"pass={res['passed']}")
        ok &= res["passed"]
    rp.write_metadata(out, "whitney-check")
    return EXIT_OK if ok else EXIT_AUDIT


def cmd_compare(args) -> int:
    cfg = _load(args)
    rows, band = compare_torus(cfg)
    out = cfg.out_dir()
    write_comparison(out, rows, band)
    rp.write_metadata(out, "compare-torus")
    print(f"band: min={band['min_ratio']:.6g} max={band['max_ratio']:.6g} "
          f"spread={band['spread']:.6g} betti_match={band['betti_match']}")
    return EXIT_OK if band["betti_match"] and band["all_positive"] else EXIT_AUDIT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hodgenerve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, config_required=True):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", required=config_required, help="experiment config (INI)")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.set_defaults(func=func)
        return p

    add("net", cmd_net, "build epsilon-nets")
    add("nerve", cmd_nerve, "build nerves and export them")
    add("spectrum", cmd_spectrum, "Laplacian spectra and Betti numbers")
    add("audit", cmd_audit, "full pipeline with every bound audit")
    p = add("treves", cmd_treves, "right-inverse counterexample and audits", config_required=False)
    p.add_argument("--m", type=int, required=True, help="size of the bidiagonal matrix")
    p.add_argument("--random", type=int, default=0, help="number of random sign matrices to audit")
    p.add_argument("--seed", type=int, default=0)
    add("whitney-check", cmd_whitney, "Whitney identities on the torus grid")
    add("compare-torus", cmd_compare, "compare nerve and flat-torus spectra")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
