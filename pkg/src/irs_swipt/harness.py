"""Monte-Carlo experiment runner: sweeps, baselines, and result files.

An experiment sweeps one scenario parameter over a list of values, runs a
number of independent trials per value for each requested method, and
collects one TrialResult per (value, trial, method).  Trials infeasible for
the harvest threshold score a weighted sum rate of zero.  Per-trial seeds
are derived from a stable hash so results reproduce across runs, platforms,
and worker counts.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .bcd import SolveReport, bcd_solve
from .errors import SolverError
from .feasibility import feasibility_check, spread_streams
from .scenario import ChannelSet, Geometry, SystemConfig, generate_scenario

EXPERIMENTS = (
    "max-harvest-vs-distance",
    "convergence",
    "wsr-vs-M",
    "wsr-vs-Qbar",
    "wsr-vs-alphaIRS",
    "wsr-vs-xER",
    "wsr-vs-xIR",
)
METHODS = ("bcd", "fixed-phase", "no-irs")
HARVEST_ONLY = "max-harvest-vs-distance"


@dataclass
class ExperimentSpec:
    """One sweep definition: what to vary, how often, and with which methods."""

    experiment: str
    sweep: list[float]
    trials: int = 20
    seed_base: int = 0
    methods: tuple[str, ...] = ("bcd", "fixed-phase", "no-irs")
    config: SystemConfig = field(default_factory=SystemConfig)
    geometry: Geometry = field(default_factory=Geometry)
    record_timings: bool = True

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; "
                             f"expected one of {EXPERIMENTS}")
        if not self.sweep:
            raise ValueError("sweep must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        self.methods = tuple(self.methods)
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; expected subset of {METHODS}")
        if self.experiment == HARVEST_ONLY and "fixed-phase" in self.methods:
            raise ValueError("fixed-phase does not apply to the harvest sweep")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        d = dict(d)
        if "config" in d:
            d["config"] = SystemConfig.from_dict(d["config"])
        if "geometry" in d:
            d["geometry"] = Geometry.from_dict(d["geometry"])
        if "methods" in d:
            d["methods"] = tuple(d["methods"])
        d["sweep"] = [float(x) for x in d["sweep"]]
        return cls(**d)

    def to_dict(self) -> dict:
        from dataclasses import asdict
        d = asdict(self)
        d["methods"] = list(self.methods)
        return d


@dataclass
class TrialResult:
    """One method run at one sweep point."""

    experiment: str
    sweep_value: float
    method: str
    seed: int
    feasible: bool
    wsr_bits: float         # zero when the trial is infeasible
    q_watts: float
    iterations: int
    wall_time_s: float

    CSV_FIELDS = ("experiment", "sweep_value", "method", "seed", "feasible",
                  "wsr_bits", "q_watts", "iterations", "wall_time_s")

    def to_row(self) -> list[str]:
        return [self.experiment, f"{self.sweep_value:.17g}", self.method,
                str(self.seed), str(bool(self.feasible)).lower(),
                f"{self.wsr_bits:.17g}", f"{self.q_watts:.17g}",
                str(self.iterations), f"{self.wall_time_s:.17g}"]

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.CSV_FIELDS}


def derive_seed(seed_base: int, sweep_index: int, trial_index: int,
                method: str) -> int:
    """Stable per-trial seed from a SHA-256 of the trial coordinates."""
    key = f"{seed_base}|{sweep_index}|{trial_index}|{method}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def apply_sweep(experiment: str, config: SystemConfig, geometry: Geometry,
                value: float) -> tuple[SystemConfig, Geometry]:
    """Bind one sweep value to the scenario parameters it controls."""
    if experiment in ("max-harvest-vs-distance", "wsr-vs-xER"):
        return config, geometry.with_er_center(float(value))
    if experiment in ("wsr-vs-M", "convergence"):
        return replace(config, n_elements=int(value)), geometry
    if experiment == "wsr-vs-Qbar":
        return replace(config, eh_threshold=float(value)), geometry
    if experiment == "wsr-vs-alphaIRS":
        return config, replace(geometry, alpha_bs_irs=float(value),
                               alpha_irs_er=float(value),
                               alpha_irs_ir=float(value))
    if experiment == "wsr-vs-xIR":
        return config, replace(geometry, ir_center=float(value))
    raise ValueError(f"unknown experiment {experiment!r}")


def solve_with_init(channels: ChannelSet, config: SystemConfig,
                    eps: float = 1e-4, n_max: int = 50) -> SolveReport:
    """Feasibility check followed by the full joint solve."""
    feasible, f0, phi0, q0 = feasibility_check(channels, config)
    if not feasible:
        return SolveReport(wsr_trajectory=[(0, 0.0)], f=f0, phi=phi0,
                           feasible=False, iterations_used=0)
    f0 = spread_streams(f0, channels, config, phi0)
    return bcd_solve(channels, config, (f0, phi0), eps=eps, n_max=n_max)


def run_no_irs(channels: ChannelSet, config: SystemConfig,
               eps: float = 1e-4, n_max: int = 50) -> SolveReport:
    """Baseline without the IRS: reflected links zeroed, phase block inert."""
    return solve_with_init(channels.without_irs(), config, eps=eps, n_max=n_max)


def run_fixed_phase(channels: ChannelSet, config: SystemConfig,
                    eps: float = 1e-4, n_max: int = 50) -> SolveReport:
    """Baseline with phases frozen at the feasibility-check solution."""
    feasible, f0, phi0, q0 = feasibility_check(channels, config)
    if not feasible:
        return SolveReport(wsr_trajectory=[(0, 0.0)], f=f0, phi=phi0,
                           feasible=False, iterations_used=0)
    f0 = spread_streams(f0, channels, config, phi0)
    return bcd_solve(channels, config, (f0, phi0), eps=eps, n_max=n_max,
                     optimize_phase=False)


def _max_harvest(channels: ChannelSet, config: SystemConfig,
                 with_irs: bool) -> tuple[bool, float]:
    """Best weighted harvest found by the alternation, run to its stall point."""
    if not with_irs:
        channels = channels.without_irs()
    unreachable = replace(config, eh_threshold=float("inf"))
    _, _, _, q = feasibility_check(channels, unreachable)
    return q >= config.eh_threshold, q


def run_trial(spec: ExperimentSpec, sweep_index: int, trial_index: int,
              method: str) -> TrialResult:
    """Run one (sweep value, trial, method) cell of the experiment grid."""
    value = spec.sweep[sweep_index]
    config, geometry = apply_sweep(spec.experiment, spec.config,
                                   spec.geometry, value)
    seed = derive_seed(spec.seed_base, sweep_index, trial_index, method)
    t0 = time.perf_counter()
    channels = generate_scenario(config, geometry, seed)

    if spec.experiment == HARVEST_ONLY:
        feasible, q = _max_harvest(channels, config, with_irs=(method != "no-irs"))
        wsr, iters = 0.0, 0
    else:
        runner = {"bcd": solve_with_init, "fixed-phase": run_fixed_phase,
                  "no-irs": run_no_irs}[method]
        try:
            report = runner(channels, config)
            feasible = report.feasible
            wsr = report.wsr_bits if feasible else 0.0
            iters = report.iterations_used
            q = _trial_harvest(report, channels, config, method)
        except SolverError:
            feasible, wsr, iters, q = False, 0.0, 0, 0.0

    wall = time.perf_counter() - t0 if spec.record_timings else 0.0
    return TrialResult(experiment=spec.experiment, sweep_value=float(value),
                       method=method, seed=seed, feasible=feasible,
                       wsr_bits=wsr, q_watts=q, iterations=iters,
                       wall_time_s=wall)


def _trial_harvest(report: SolveReport, channels: ChannelSet,
                   config: SystemConfig, method: str) -> float:
    from .metrics import effective_channels, harvested_power_quadratic
    if not report.feasible:
        return 0.0
    chans = channels.without_irs() if method == "no-irs" else channels
    eff = effective_channels(chans, report.phi, config)
    return harvested_power_quadratic(report.f, eff.g)


def _trial_cell(args):
    spec_dict, si, ti, method = args
    spec = ExperimentSpec.from_dict(spec_dict)
    return (si, ti, method), run_trial(spec, si, ti, method)


def run_experiment(spec: ExperimentSpec, threads: int = 1) -> list[TrialResult]:
    """Run the full grid; partial failures never abort the sweep.

    Results come back ordered by (sweep index, trial, method) regardless of
    worker scheduling.
    """
    cells = [(si, ti, method)
             for si in range(len(spec.sweep))
             for ti in range(spec.trials)
             for method in spec.methods]
    if threads <= 1:
        results = {cell: run_trial(spec, *cell) for cell in cells}
    else:
        spec_dict = spec.to_dict()
        with ProcessPoolExecutor(max_workers=threads) as pool:
            pairs = pool.map(_trial_cell,
                             [(spec_dict, si, ti, m) for si, ti, m in cells])
            results = dict(pairs)
    return [results[cell] for cell in sorted(results)]


def summarize(results: list[TrialResult]) -> dict[tuple[float, str], dict]:
    """Mean/std of WSR and harvest per (sweep value, method)."""
    import numpy as np
    groups: dict[tuple[float, str], list[TrialResult]] = {}
    for r in results:
        groups.setdefault((r.sweep_value, r.method), []).append(r)
    out = {}
    for key, rs in sorted(groups.items()):
        wsr = np.array([r.wsr_bits for r in rs])
        q = np.array([r.q_watts for r in rs])
        out[key] = {
            "trials": len(rs),
            "wsr_mean": float(wsr.mean()),
            "wsr_std": float(wsr.std()),
            "q_mean": float(q.mean()),
            "q_std": float(q.std()),
            "feasible_frac": float(np.mean([r.feasible for r in rs])),
        }
    return out


def emit_results(results: list[TrialResult], format: str = "csv",
                 path: str | Path = "results.csv",
                 spec: ExperimentSpec | None = None) -> Path:
    """Write trial records to a CSV table or a JSON document.

    CSV holds one row per trial with full double precision; JSON mirrors the
    records and embeds the spec for provenance.
    """
    if not results:
        raise ValueError("no results to emit")
    path = Path(path)
    if format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(TrialResult.CSV_FIELDS)
            for r in results:
                writer.writerow(r.to_row())
    elif format == "json":
        doc = {"records": [r.to_dict() for r in results]}
        if spec is not None:
            doc["spec"] = spec.to_dict()
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format {format!r}; expected csv or json")
    return path


def load_experiment_spec(path: str | Path) -> ExperimentSpec:
    """Read an experiment spec file (JSON, keys matching ExperimentSpec)."""
    with open(path) as fh:
        raw = json.load(fh)
    return ExperimentSpec.from_dict(raw)
