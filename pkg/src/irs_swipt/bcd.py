"""Outer block-coordinate descent: precoders, phases, decoders, weights.

Each full sweep updates F by the SCA precoder solver, phi by the MM phase
solver, then U and W in closed form.  Every block can only improve the
weighted-MMSE surrogate, and after the U/W updates the surrogate equals the
true weighted sum rate, so the rate trajectory is non-decreasing and every
iterate stays feasible.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError
from .linalg import frob_sq, herm, hermitian_solve, hermitianize
from .metrics import (effective_channels, harvested_power_quadratic,
                      weighted_sum_rate)
from .phase import phase_solve
from .precoder import sca_precoder_solve
from .scenario import ChannelSet, SystemConfig

log = logging.getLogger(__name__)

BCD_EPS = 1e-4
BCD_MAX_ITER = 50
MAX_CONSECUTIVE_FAILURES = 3


@dataclass
class SolveReport:
    """Outcome of one BCD run."""

    wsr_trajectory: list[tuple[int, float]]     # (outer iteration, WSR bits)
    f: np.ndarray                               # final precoders
    phi: np.ndarray                             # final phases
    feasible: bool
    iterations_used: int
    precoder_inner_iters: list[int] = field(default_factory=list)
    phase_inner_iters: list[int] = field(default_factory=list)
    power_trajectory: list[float] = field(default_factory=list)
    harvest_trajectory: list[float] = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def wsr_bits(self) -> float:
        return self.wsr_trajectory[-1][1] if self.wsr_trajectory else 0.0

    def to_dict(self) -> dict:
        return {
            "wsr_trajectory": [[int(i), float(r)] for i, r in self.wsr_trajectory],
            "wsr_bits": self.wsr_bits,
            "precoders_real": np.real(self.f).tolist(),
            "precoders_imag": np.imag(self.f).tolist(),
            "phases_real": np.real(self.phi).tolist(),
            "phases_imag": np.imag(self.phi).tolist(),
            "feasible": bool(self.feasible),
            "iterations_used": int(self.iterations_used),
            "precoder_inner_iters": [int(n) for n in self.precoder_inner_iters],
            "phase_inner_iters": [int(n) for n in self.phase_inner_iters],
            "power_trajectory": [float(p) for p in self.power_trajectory],
            "harvest_trajectory": [float(q) for q in self.harvest_trajectory],
            "wall_time_s": float(self.wall_time_s),
        }


def update_decoders(f: np.ndarray, phi: np.ndarray, channels: ChannelSet,
                    config: SystemConfig) -> np.ndarray:
    """MMSE receivers U_k = (sum_m Hbar F_m F_m^H Hbar^H + sigma2 I)^-1 Hbar F_k."""
    eff = effective_channels(channels, phi, config)
    sigma2 = config.noise_power_ir
    u = np.empty((config.n_irs, config.n_ir_antennas, config.n_streams),
                 dtype=complex)
    for k in range(config.n_irs):
        hbar = eff.hbar[k]
        cov = sigma2 * np.eye(config.n_ir_antennas, dtype=complex)
        for m in range(config.n_irs):
            hf = hbar @ f[m]
            cov += hf @ herm(hf)
        u[k] = hermitian_solve(cov, hbar @ f[k])
    return u


def update_weights(f: np.ndarray, phi: np.ndarray, u: np.ndarray,
                   channels: ChannelSet, config: SystemConfig) -> np.ndarray:
    """W_k = inverse of the MMSE error covariance at the optimal decoder."""
    eff = effective_channels(channels, phi, config)
    sigma2 = config.noise_power_ir
    d = config.n_streams
    w = np.empty((config.n_irs, d, d), dtype=complex)
    for k in range(config.n_irs):
        hbar = eff.hbar[k]
        cov = sigma2 * np.eye(config.n_ir_antennas, dtype=complex)
        for m in range(config.n_irs):
            hf = hbar @ f[m]
            cov += hf @ herm(hf)
        hf_k = hbar @ f[k]
        e_star = np.eye(d, dtype=complex) - herm(hf_k) @ hermitian_solve(cov, hf_k)
        e_star = hermitianize(e_star)
        w[k] = hermitianize(hermitian_solve(e_star, np.eye(d, dtype=complex)))
    return w


def _check_init(f, phi, channels, config):
    eff = effective_channels(channels, phi, config)
    power = frob_sq(f)
    harvest = harvested_power_quadratic(f, eff.g)
    if power > config.power_budget * (1.0 + 1e-6):
        raise ValueError("initial precoders exceed the power budget")
    if harvest < config.eh_threshold * (1.0 - 1e-6):
        raise ValueError("initial point violates the harvest constraint")
    if config.n_elements and np.max(np.abs(np.abs(phi) - 1.0)) > 1e-9:
        raise ValueError("initial phases are not unit-modulus")


def bcd_solve(channels: ChannelSet, config: SystemConfig,
              init: tuple[np.ndarray, np.ndarray], eps: float = BCD_EPS,
              n_max: int = BCD_MAX_ITER, optimize_phase: bool = True,
              inner_eps: float | None = None) -> SolveReport:
    """Run block coordinate descent from a feasible (F, phi) pair.

    A failed inner solve keeps the previous block value and continues; after
    MAX_CONSECUTIVE_FAILURES failed sweeps in a row the run aborts.
    optimize_phase=False freezes phi (fixed-phase baseline).  inner_eps
    overrides both inner solvers' relative tolerances (convergence studies).
    """
    t0 = time.perf_counter()
    f, phi = init
    f = np.asarray(f, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    _check_init(f, phi, channels, config)

    report = SolveReport(wsr_trajectory=[], f=f, phi=phi, feasible=True,
                         iterations_used=0)

    def track(iteration):
        _, wsr_bits = weighted_sum_rate(f, phi, channels, config)
        eff = effective_channels(channels, phi, config)
        report.wsr_trajectory.append((iteration, wsr_bits))
        report.power_trajectory.append(frob_sq(f))
        report.harvest_trajectory.append(harvested_power_quadratic(f, eff.g))
        return wsr_bits

    track(0)
    u = update_decoders(f, phi, channels, config)
    w = update_weights(f, phi, u, channels, config)

    inner_kw = {} if inner_eps is None else {"eps": inner_eps}
    failures = 0
    for n in range(1, n_max + 1):
        failed = False
        try:
            f_new, prec_traj = sca_precoder_solve(u, w, phi, channels, f,
                                                  config, **inner_kw)
            f = f_new
            report.precoder_inner_iters.append(len(prec_traj) - 1)
        except SolverError as exc:
            log.warning("precoder block failed at sweep %d: %s", n, exc)
            failed = True

        if optimize_phase and config.n_elements:
            try:
                phi_new, phase_traj = phase_solve(u, w, f, channels, phi,
                                                  config, **inner_kw)
                phi = phi_new
                report.phase_inner_iters.append(len(phase_traj) - 1)
            except SolverError as exc:
                log.warning("phase block failed at sweep %d: %s", n, exc)
                failed = True

        u = update_decoders(f, phi, channels, config)
        w = update_weights(f, phi, u, channels, config)

        failures = failures + 1 if failed else 0
        if failures >= MAX_CONSECUTIVE_FAILURES:
            report.f, report.phi = f, phi
            report.iterations_used = n
            report.wall_time_s = time.perf_counter() - t0
            raise SolverError(
                f"{failures} consecutive failed BCD sweeps; last WSR "
                f"{report.wsr_bits:.6f} bit/s/Hz")

        wsr_bits = track(n)
        report.iterations_used = n
        prev = report.wsr_trajectory[-2][1]
        if abs(wsr_bits - prev) < eps * max(abs(wsr_bits), 1e-30):
            break

    report.f, report.phi = f, phi
    report.wall_time_s = time.perf_counter() - t0
    return report
