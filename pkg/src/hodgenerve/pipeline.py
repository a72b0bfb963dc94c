"""End-to-end runs over an epsilon sweep, and the torus eigenvalue comparison."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import report as rp
from .bounds import (BoundReport, delta_norm_audit, lower_bound_audit, rayleigh_audit,
                     coboundary_sparsity_ok)
from .cochains import coboundary_matrix, delta_squared
from .config import ExperimentConfig
from .geometry import ChartError, FlatTorus
from .net import build_epsilon_net, net_violations
from .nerve import Nerve, NerveStats, build_nerve, nerve_stats
from .spectra import (BettiMismatch, SpectrumReport, betti, laplacian_spectrum,
                      spectral_pairing_error, torus_hodge_spectrum)

PAIRING_TOL = 1e-8


@dataclass
class EpsilonResult:
    epsilon: float
    error: str | None = None
    n_centers: int = 0
    nerve: Nerve | None = None
    stats: NerveStats | None = None
    spectra: list[SpectrumReport] = field(default_factory=list)
    audits: list[BoundReport] = field(default_factory=list)

    @property
    def aborted(self) -> bool:
        return self.error is not None

    @property
    def bettis(self) -> list[int]:
        return [s.betti for s in self.spectra]

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.audits)

    def summary(self) -> dict:
        out = {"epsilon": self.epsilon, "status": "aborted" if self.aborted else "ok"}
        if self.aborted:
            out["error"] = self.error
            return out
        out.update({
            "n_centers": self.n_centers,
            "nu": self.stats.nu,
            "counts": list(self.stats.counts),
            "betti": self.bettis,
            "audits_pass": self.passed,
            "failed_audits": [a.bound for a in self.audits if not a.passed],
        })
        return out


def _rng(config: ExperimentConfig, index: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, index])


def _structural_audits(nerve: Nerve, qmax: int) -> list[BoundReport]:
    out = []
    stats = nerve_stats(nerve)
    for q in range(qmax + 1):
        if not nerve.has(q + 2):
            break
        D = delta_squared(nerve, q)
        worst = int(abs(D).max()) if D.nnz else 0
        out.append(BoundReport("complex_identity", float(worst), -math.inf, worst == 0,
                               {"q": q}, {"nnz": int(D.nnz)}))
    for q in range(qmax + 1):
        if not nerve.has(q + 1):
            break
        K = max(stats.nu, q + 2)
        ok = coboundary_sparsity_ok(nerve, q, stats.nu)
        d = coboundary_matrix(nerve, q)
        worst = int(max(d.row_nnz().max(initial=0), d.col_nnz().max(initial=0)))
        out.append(BoundReport("delta_sparsity", float(worst), math.log(K), ok, {"q": q, "K": K}))
    for q, (c, b, ok) in enumerate(zip(stats.counts, stats.cardinality_bounds, stats.cardinality_ok)):
        out.append(BoundReport("simplex_count", float(c), math.log(b) if b > 0 else -math.inf, ok,
                               {"q": q, "nu": stats.nu, "n_vertices": stats.n_vertices}))
    return out


def run_epsilon(config: ExperimentConfig, index: int) -> EpsilonResult:
    """Net, nerve, spectra for q = 0..qmax and every audit, for one epsilon."""
    eps = config.epsilon[index]
    res = EpsilonResult(eps)
    space = config.build_space()
    try:
        net = build_epsilon_net(space, eps, config.resolution)
        # one degree beyond qmax so that delta_qmax, hence Delta_qmax, is complete
        nerve = build_nerve(space, net, config.qmax + 1, guard_radius=config.guard_radius)
    except (ChartError, ValueError) as exc:
        res.error = str(exc)
        return res
    res.n_centers = len(net)
    res.nerve = nerve
    res.stats = nerve_stats(nerve)
    nu = res.stats.nu
    rng = _rng(config, index)
    for q in range(config.qmax + 1):
        spectrum_report = laplacian_spectrum(nerve, q)
        try:
            betti(nerve, q, spectrum=spectrum_report)
            mismatch = None
        except BettiMismatch as exc:
            mismatch = str(exc)
        res.spectra.append(spectrum_report)
        res.audits.append(BoundReport("betti_rank_nullity", float(spectrum_report.betti), -math.inf, mismatch is None,
                                      {"q": q}, {"error": mismatch} if mismatch else {}))
        err = spectral_pairing_error(spectrum_report)
        res.audits.append(BoundReport("spectral_pairing", err, math.log(PAIRING_TOL), err <= PAIRING_TOL,
                                      {"q": q}))
        res.audits.append(delta_norm_audit(nerve, q, nu))
        res.audits.append(rayleigh_audit(nerve, q, config.trials, rng, nu))
        res.audits.append(lower_bound_audit(nerve, q, spectrum_report.coexact, nu))
    res.audits.extend(_structural_audits(nerve, config.qmax))
    return res


def run_sweep(config: ExperimentConfig) -> list[EpsilonResult]:
    idx = list(range(len(config.epsilon)))
    if config.workers > 1 and len(idx) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(run_epsilon, [config] * len(idx), idx))
    return [run_epsilon(config, i) for i in idx]


def eps_dir(out: Path, eps: float) -> Path:
    return Path(out) / f"eps_{eps!r}"


def write_nerve(out: Path, nerve: Nerve, stats: NerveStats, with_matrices: bool = True) -> None:
    rp.write_json(out / "nerve.json", rp.nerve_json(nerve, stats))
    rp.write_csv(out / "nerve.csv", rp.NERVE_CSV_HEADER, rp.nerve_csv_rows(nerve))
    rp.write_json(out / "stats.json", stats.as_dict())
    if with_matrices:
        for q in range(nerve.qmax):
            rp.write_text(out / f"delta_q{q}.txt", rp.matrix_text(coboundary_matrix(nerve, q)))


def write_spectra(out: Path, spectra: list[SpectrumReport]) -> None:
    for s in spectra:
        rp.write_json(out / f"spectrum_q{s.q}.json", s.as_dict())
        rp.write_csv(out / f"spectrum_q{s.q}.csv", rp.SPECTRUM_CSV_HEADER, rp.spectrum_csv_rows(s))


def run_pipeline(config: ExperimentConfig, out: Path | None = None,
                 parts=("nerve", "spectrum", "audit")) -> tuple[list[EpsilonResult], dict]:
    """Run the sweep and write the report bundle; returns results and summary."""
    out = Path(out) if out is not None else config.out_dir()
    results = run_sweep(config)
    for r in results:
        if r.aborted:
            continue
        d = eps_dir(out, r.epsilon)
        if "nerve" in parts:
            write_nerve(d, r.nerve, r.stats)
        if "spectrum" in parts:
            write_spectra(d, r.spectra)
        if "audit" in parts:
            rp.write_json(d / "audits.json", [a.as_dict() for a in r.audits])
    summary = {
        "config": config.as_dict(),
        "epsilons": [r.summary() for r in results],
        "betti_rows": {repr(r.epsilon): r.bettis for r in results if not r.aborted},
        "all_audits_pass": all(r.passed for r in results if not r.aborted),
        "aborted": [r.epsilon for r in results if r.aborted],
    }
    rp.write_json(out / "summary.json", summary)
    return results, summary


def run_nets(config: ExperimentConfig, out: Path | None = None) -> dict:
    out = Path(out) if out is not None else config.out_dir()
    space = config.build_space()
    rows = []
    for eps in config.epsilon:
        try:
            net = build_epsilon_net(space, eps, config.resolution)
        except ValueError as exc:
            rows.append({"epsilon": eps, "status": "aborted", "error": str(exc)})
            continue
        viol = net_violations(net)
        d = eps_dir(out, eps)
        rp.write_json(d / "net.json", {"epsilon": eps, "resolution": config.resolution,
                                        "centers": [list(map(float, c.coords)) for c in net.centers]})
        rp.write_csv(d / "net.csv", ("index", "coords"),
                     ((i, " ".join(repr(float(x)) for x in c.coords)) for i, c in enumerate(net.centers)))
        rows.append({"epsilon": eps, "status": "ok", "n_centers": len(net),
                     "separation_violations": len(viol["separation"]),
                     "uncovered": len(viol["uncovered"])})
    summary = {"config": config.as_dict(), "nets": rows}
    rp.write_json(out / "summary.json", summary)
    return summary


@dataclass(frozen=True)
class ComparisonRow:
    epsilon: float
    k: int
    lambda_X: float
    lambda_M: float
    ratio: float | None
    harmonic_flag: int

    def as_csv(self) -> tuple:
        return (self.epsilon, self.k, self.lambda_X, self.lambda_M,
                "" if self.ratio is None else self.ratio, self.harmonic_flag)


def _compare_one(config: ExperimentConfig, index: int):
    eps = config.epsilon[index]
    space = config.build_space()
    p = config.p
    net = build_epsilon_net(space, eps, config.resolution)
    nerve = build_nerve(space, net, p + 1, guard_radius=config.guard_radius)
    # the full Laplacian, not just its coexact half, is what the smooth
    # Hodge spectrum is compared against
    spectrum_report = laplacian_spectrum(nerve, p)
    bX = betti(nerve, p, spectrum=spectrum_report)
    lam_X = spectrum_report.eigenvalues
    n_pos = len(lam_X) - bX
    kcap = min(config.k_max, n_pos)
    analytic = torus_hodge_spectrum(*space.lengths, p, max(kcap, 1))
    bM = analytic.zero_multiplicity
    rows = []
    # harmonic rows: both sides zero, excluded from the band; flag 2 marks a
    # zero that only one side has
    for i in range(max(bX, bM)):
        lx = float(lam_X[i]) if i < bX else math.nan
        lm = 0.0 if i < bM else math.nan
        rows.append(ComparisonRow(eps, 0, lx, lm, None, 1 if (i < bX and i < bM) else 2))
    for k in range(1, kcap + 1):
        lx = float(lam_X[bX + k - 1])
        lm = float(analytic.positive[k - 1])
        rows.append(ComparisonRow(eps, k, lx, lm, lm / lx if lx > 0 and lm > 0 else None, 0))
    info = {"epsilon": eps, "n_centers": len(net), "betti_X": bX, "betti_M": bM,
            "betti_match": bX == bM, "k_cap": kcap, "n_positive": n_pos}
    return rows, info


def band_summary(rows: list[ComparisonRow], infos: list[dict]) -> dict:
    ratios = [r.ratio for r in rows if r.harmonic_flag == 0 and r.ratio is not None]
    if ratios:
        lo, hi = min(ratios), max(ratios)
        spread = hi / lo
    else:
        lo = hi = spread = math.nan
    per_eps = []
    for info in infos:
        rr = [r.ratio for r in rows if r.epsilon == info["epsilon"] and r.harmonic_flag == 0 and r.ratio]
        per_eps.append({**info, "min_ratio": min(rr, default=math.nan), "max_ratio": max(rr, default=math.nan)})
    return {"min_ratio": lo, "max_ratio": hi, "spread": spread,
            "all_positive": all(r > 0 for r in ratios) and bool(ratios),
            "betti_match": all(i["betti_match"] for i in infos),
            "per_epsilon": per_eps}


def compare_torus(config: ExperimentConfig) -> tuple[list[ComparisonRow], dict]:
    space = config.build_space()
    if not isinstance(space, FlatTorus) or space.dim != 2:
        raise ValueError("compare-torus needs a flat 2-torus")
    idx = list(range(len(config.epsilon)))
    if config.workers > 1 and len(idx) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_compare_one, [config] * len(idx), idx))
    else:
        parts = [_compare_one(config, i) for i in idx]
    rows = [r for rs, _ in parts for r in rs]
    infos = [info for _, info in parts]
    return rows, band_summary(rows, infos)


def write_comparison(out: Path, rows: list[ComparisonRow], band: dict) -> None:
    rp.write_csv(out / "comparison.csv", rp.COMPARISON_CSV_HEADER, (r.as_csv() for r in rows))
    rp.write_json(out / "band.json", band)
    rp.write_text(out / "band.gp", rp.gnuplot_script("comparison.csv"))


ORDER_MIN = 0.9
PARTITION_TOL = 1e-12
LEAK_TOL = 1e-10


def whitney_check(config: ExperimentConfig, index: int = 0) -> dict:
    """Residual study, partition and support checks, and the Whitney norm
    audit on the torus net for one epsilon."""
    from .whitney import (build_partition, residual_study, support_leak, whitney_norm_audit,
                          ordered_whitney_form)
    space = config.build_space()
    if not isinstance(space, FlatTorus) or space.dim != 2:
        raise ValueError("whitney-check needs a flat 2-torus")
    eps = config.epsilon[index]
    net = build_epsilon_net(space, eps, config.resolution)
    nerve = build_nerve(space, net, 3, guard_radius=config.guard_radius)
    study = residual_study(space, net, nerve, config.grids, seed=config.seed)
    checks = {}
    for row in study:
        if not math.isnan(row.observed_order):
            checks[row.check] = row.observed_order >= ORDER_MIN
    partition, leak = {}, 0.0
    pou = None
    for N in config.grids:
        pou = build_partition(space, net, N)
        total = sum(f.components[0] for f in pou.phi)
        partition[N] = float(np.abs(total - 1.0).max())
    for q in range(3):
        for I in nerve.S(q):
            leak = max(leak, support_leak(ordered_whitney_form(pou, I), pou, I))
    rng = _rng(config, index)
    audits = [whitney_norm_audit(nerve, pou, q, config.trials, rng) for q in (0, 1)]
    passed = (all(checks.values()) and max(partition.values()) <= PARTITION_TOL
              and leak <= LEAK_TOL and all(a.passed for a in audits))
    return {"epsilon": eps, "n_centers": len(net), "study": study, "order_ok": checks,
            "partition_defect": partition, "support_leak": leak, "audits": audits,
            "pou": pou, "nerve": nerve, "passed": passed}


def treves_report(m: int, seed: int = 0, n_random: int = 0) -> dict:
    """The bidiagonal counterexample for ``m`` plus optional random audits."""
    from .bounds import (gram_minor_audit, random_sign_matrix, treves_counterexample,
                         treves_norm_audit, treves_operator, bidiagonal)
    cx = treves_counterexample(m)
    inst = treves_operator(bidiagonal(m))
    audits = [treves_norm_audit(inst)]
    if inst.r <= 10:
        audits.append(gram_minor_audit(inst, 3))
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        n, mm = int(rng.integers(1, 17)), int(rng.integers(1, 17))
        k = int(rng.integers(1, 5))
        A = random_sign_matrix(rng, n, mm, k)
        ri = treves_operator(A, k)
        audits.append(treves_norm_audit(ri))
        if ri.r <= 10:
            audits.append(gram_minor_audit(ri, 3))
    return {"counterexample": cx, "audits": audits,
            "passed": cx["exact_match"] and all(a.passed for a in audits)}
