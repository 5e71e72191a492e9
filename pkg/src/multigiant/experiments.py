"""Analytic predictions checked against simulated configuration-model graphs."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .branching import build_offspring_law, extinction_fixed_point
from .configuration import sample_configuration, sample_simple
from .degrees import DegreeSequence, DegreeSpec, interpolate, realize_sequence, validate_spec
from .exploration import explore_components
from .meanmatrix import build_mean_matrix, check_irreducible, perron_eigenpair
from .rng import child

TRIAL_COLUMNS = ("trial", "n", "seed", "largest_size", "largest_fraction", "second_size")
SUMMARY_COLUMNS = ("n", "trials", "mean_fraction", "std_fraction", "band", "mean_second",
                   "max_second", "second_log_ratio", "min_part_fraction", "max_largest",
                   "largest_omega_ratio", "mean_components", "mean_attempts")


@dataclass
class TrialResult:
    trial: int
    n: int
    seed: int
    largest_size: int
    largest_fraction: float
    second_size: int
    largest_part_counts: Tuple[int, ...]
    part_sizes: Tuple[int, ...]
    num_components: int
    attempts: int = 1

    def row(self) -> list:
        return [self.trial, self.n, self.seed, self.largest_size, repr(self.largest_fraction),
                self.second_size, *self.largest_part_counts, self.num_components, self.attempts]


def trial_header(parts: int) -> List[str]:
    return [*TRIAL_COLUMNS, *(f"largest_part_{i}" for i in range(1, parts + 1)),
            "num_components", "attempts"]


def run_trial(seq: DegreeSequence, trial: int, seed: int, simple: bool = False,
              max_attempts: int = 1000) -> TrialResult:
    """Sample one graph from stream ``graph/<trial>`` and explore it."""
    rng = child(seed, f"graph/{trial}")
    if simple:
        g, attempts = sample_simple(seq, rng, max_attempts)
    else:
        g, attempts = sample_configuration(seq, rng), 1
    census = explore_components(g, rng).census
    part_sizes = tuple(int(x) for x in np.bincount(g.vertex_part - 1, minlength=seq.parts))
    return TrialResult(trial, seq.n, seed, census.largest_size, census.largest_fraction,
                       census.second_size, census.largest_part_counts, part_sizes,
                       census.num_components, attempts)


def run_trials(seq: DegreeSequence, trials: int, seed: int, simple: bool = False,
               max_attempts: int = 1000, workers: int = 1) -> List[TrialResult]:
    def one(t):
        return run_trial(seq, t, seed, simple, max_attempts)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(trials)))
    return [one(t) for t in range(trials)]


def trials_csv(results: Sequence[TrialResult], parts: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(trial_header(parts))
    for r in results:
        w.writerow(r.row())
    return buf.getvalue()


@dataclass
class ExperimentPlan:
    spec: DegreeSpec
    n_grid: Tuple[int, ...]
    trials: int
    seed: int = 0
    simple: bool = False
    spec_path: Optional[str] = None
    out: Optional[str] = None
    max_attempts: int = 1000
    workers: int = 1
    band_floor: float = 0.02
    second_log_max: float = 30.0
    part_floor: float = 0.01
    subcritical_max_fraction: float = 0.01
    omega_ratio_max: float = 5.0
    tol: float = 1e-12

    def __post_init__(self):
        self.n_grid = tuple(int(n) for n in self.n_grid)
        if not self.n_grid or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError(f"n grid must be non-empty and strictly increasing: {self.n_grid}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class SizeSummary:
    n: int
    trials: int
    mean_fraction: float
    std_fraction: float
    band: float
    mean_second: float
    max_second: int
    second_log_ratio: float
    min_part_fraction: float
    max_largest: int
    largest_omega_ratio: float
    mean_components: float
    mean_attempts: float

    def row(self) -> list:
        out = []
        for name in SUMMARY_COLUMNS:
            v = getattr(self, name)
            out.append(repr(v) if isinstance(v, float) else v)
        return out


def summarize(results: Sequence[TrialResult], omega: int, band_floor: float = 0.02) -> SizeSummary:
    n = results[0].n
    frac = np.array([r.largest_fraction for r in results])
    std = float(np.std(frac, ddof=1)) if len(frac) > 1 else 0.0
    logn = math.log(n) if n > 1 else 1.0
    max_second = max(r.second_size for r in results)
    min_part = min(
        (c / s for r in results for c, s in zip(r.largest_part_counts, r.part_sizes) if s),
        default=0.0)
    max_largest = max(r.largest_size for r in results)
    return SizeSummary(
        n=n,
        trials=len(results),
        mean_fraction=float(frac.mean()),
        std_fraction=std,
        band=max(band_floor, 3 * std / math.sqrt(len(results))),
        mean_second=float(np.mean([r.second_size for r in results])),
        max_second=int(max_second),
        second_log_ratio=max_second / logn,
        min_part_fraction=float(min_part),
        max_largest=int(max_largest),
        largest_omega_ratio=max_largest / (max(omega, 1) ** 2 * logn),
        mean_components=float(np.mean([r.num_components for r in results])),
        mean_attempts=float(np.mean([r.attempts for r in results])),
    )


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class VerdictReport:
    spec_path: Optional[str]
    irreducible: bool
    components: List[List[Tuple[int, int]]]
    gamma: Optional[float] = None
    regime: Optional[str] = None
    eta: Optional[float] = None
    summaries: List[SizeSummary] = field(default_factory=list)
    checks: List[Check] = field(default_factory=list)
    verdict: str = "PASS"

    @property
    def passed(self) -> bool:
        return self.verdict in ("PASS", "CRITICAL", "NOT_IRREDUCIBLE")

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for s in self.summaries:
            w.writerow(s.row())
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "spec": self.spec_path,
            "irreducible": self.irreducible,
            "components": [[list(p) for p in c] for c in self.components],
            "gamma": self.gamma,
            "regime": self.regime,
            "eta": self.eta,
            "per_n": [dict(zip(SUMMARY_COLUMNS, (getattr(s, k) for k in SUMMARY_COLUMNS)))
                      for s in self.summaries],
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "verdict": self.verdict,
        }


def _supercritical_checks(plan: ExperimentPlan, eta: float, summaries: List[SizeSummary]) -> List[Check]:
    last = summaries[-1]
    checks = [Check(
        "giant_fraction",
        abs(last.mean_fraction - eta) <= last.band,
        f"n={last.n}: mean largest fraction {last.mean_fraction:.6f} vs eta {eta:.6f}, "
        f"band {last.band:.4f}")]
    ratios = [s.second_log_ratio for s in summaries]
    ok = all(r <= plan.second_log_max for r in ratios) and all(
        b <= ratios[0] for b in ratios[1:])
    checks.append(Check(
        "second_component_log",
        ok,
        "max second / log n per n: " + ", ".join(f"{s.n}:{r:.3f}" for s, r in zip(summaries, ratios))
        + f" (fitted constant {ratios[0]:.3f}, ceiling {plan.second_log_max})"))
    worst = min(s.min_part_fraction for s in summaries)
    checks.append(Check(
        "giant_covers_every_part",
        worst >= plan.part_floor,
        f"smallest per-part share of the largest component {worst:.4f} (floor {plan.part_floor})"))
    return checks


def _subcritical_checks(plan: ExperimentPlan, summaries: List[SizeSummary]) -> List[Check]:
    fr = [s.mean_fraction for s in summaries]
    last = summaries[-1]
    checks = [
        Check("largest_fraction_decreasing", all(b < a for a, b in zip(fr, fr[1:])),
              "mean largest fraction per n: " + ", ".join(
                  f"{s.n}:{s.mean_fraction:.6f}" for s in summaries)),
        Check("largest_fraction_small", last.mean_fraction < plan.subcritical_max_fraction,
              f"n={last.n}: {last.mean_fraction:.6f} < {plan.subcritical_max_fraction}"),
        Check("largest_omega_log_ratio",
              all(s.largest_omega_ratio <= plan.omega_ratio_max for s in summaries),
              "max largest / (omega^2 log n) per n: " + ", ".join(
                  f"{s.n}:{s.largest_omega_ratio:.4f}" for s in summaries)
              + f" (heuristic ceiling {plan.omega_ratio_max}; no constant is known)"),
    ]
    return checks


def run_verdict(plan: ExperimentPlan) -> VerdictReport:
    """Analytic regime and giant fraction, then simulation checks per regime.

    Degenerate (reducible) specs and the critical case report analytic
    information only.
    """
    report = validate_spec(plan.spec)
    if not report.ok:
        raise ValueError("invalid spec: " + "; ".join(report.errors))
    M = build_mean_matrix(plan.spec)
    irr = check_irreducible(M)
    out = VerdictReport(plan.spec_path, irr.irreducible, irr.components)
    if not irr.irreducible:
        out.verdict = "NOT_IRREDUCIBLE"
        return out
    spectral = perron_eigenpair(M)
    out.gamma, out.regime = spectral.gamma, spectral.regime
    out.eta = extinction_fixed_point(build_offspring_law(plan.spec), tol=plan.tol).eta
    if spectral.regime == "critical":
        out.verdict = "CRITICAL"
        return out
    for n in plan.n_grid:
        seq = realize_sequence(plan.spec, n)
        results = run_trials(seq, plan.trials, plan.seed, plan.simple, plan.max_attempts, plan.workers)
        out.summaries.append(summarize(results, seq.omega, plan.band_floor))
    if spectral.regime == "supercritical":
        out.checks = _supercritical_checks(plan, out.eta, out.summaries)
    else:
        out.checks = _subcritical_checks(plan, out.summaries)
    out.verdict = "PASS" if all(c.passed for c in out.checks) else "FAIL"
    return out


def run_sweep(spec_a: DegreeSpec, spec_b: DegreeSpec, grid: Sequence, n_grid: Sequence[int],
              trials: int, seed: int = 0, simple: bool = False, workers: int = 1,
              max_attempts: int = 1000) -> str:
    """CSV of ``param, gamma, regime, eta`` and the mean largest fraction at
    each n, along the mixture ``(1 - t) a + t b``."""
    n_grid = [int(n) for n in n_grid]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["param", "gamma", "regime", "eta", *(f"fraction_n{n}" for n in n_grid), "error"])
    for t in grid:
        spec = interpolate(spec_a, spec_b, t)
        try:
            M = build_mean_matrix(spec)
            spectral = perron_eigenpair(M)
            eta = extinction_fixed_point(build_offspring_law(spec)).eta
            fracs = []
            for n in n_grid:
                seq = realize_sequence(spec, n)
                res = run_trials(seq, trials, seed, simple, max_attempts, workers)
                fracs.append(repr(float(np.mean([r.largest_fraction for r in res]))))
        except (ValueError, RuntimeError) as exc:
            w.writerow([str(t), "", "", "", *([""] * len(n_grid)), str(exc)])
            continue
        w.writerow([str(t), repr(spectral.gamma), spectral.regime, repr(eta), *fracs, ""])
    return buf.getvalue()
