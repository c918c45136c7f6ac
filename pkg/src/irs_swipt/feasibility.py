"""Feasibility check: maximize harvested power over (F, phi) by alternation.

The harvest maximization splits cleanly: for fixed phases, the optimal
precoder is rank-one energy beamforming along the top eigenvector of the
harvest matrix G, giving Q = lambda_max(G) * P_T; for fixed precoders, one
SCA ascent step aligns the phases with the linearized harvest gradient.
Both steps can only increase Q.  The alternation stops as soon as Q clears
the threshold (the problem is then feasible and the point initializes the
BCD solver), or when Q stalls.
"""

from __future__ import annotations

import numpy as np

from .linalg import frob_sq, max_eigpair
from .metrics import EffectiveChannels, effective_channels, \
    harvested_power_quadratic
from .phase import PhaseQcqpData, assemble_eh_qcqp
from .scenario import ChannelSet, SystemConfig

FEAS_MAX_ITER = 200
STALL_RTOL = 1e-8


def max_eh_precoder(eff: EffectiveChannels,
                    config: SystemConfig) -> tuple[np.ndarray, float]:
    """Energy beamforming: split P_T equally over IRs along G's top eigenvector.

    Returns (F, Q) with Q = lambda_max(G) * P_T and sum_k ||F_k||^2 = P_T.
    """
    chi, b = max_eigpair(eff.g)
    f = np.zeros((config.n_irs, config.n_bs_antennas, config.n_streams),
                 dtype=complex)
    amp = np.sqrt(config.power_budget / config.n_irs)
    for k in range(config.n_irs):
        f[k, :, 0] = amp * b
    return f, chi * config.power_budget


def max_eh_phase_step(data: PhaseQcqpData,
                      phi_anchor: np.ndarray) -> np.ndarray:
    """One SCA ascent step on the harvest objective: align with its
    linearization g* + Upsilon anchor.  Zero entries map to phase 1."""
    w = data.g.conj() + data.upsilon @ phi_anchor
    return np.exp(1j * np.angle(w))


def spread_streams(f: np.ndarray, channels: ChannelSet, config: SystemConfig,
                   phi: np.ndarray, mix: float = 1.0) -> np.ndarray:
    """Move power into the zero stream columns of an energy-beamforming
    precoder, aiming for an equal split across streams.

    The closed-form decoder/weight/precoder updates all preserve exactly-zero
    precoder columns, so starting the joint solver from the rank-one harvest
    maximizer would pin every user to a single stream.  Mixing in orthogonal
    directions (backing off whenever the harvest constraint would break)
    unlocks the remaining streams without losing feasibility; a full-strength
    mix also converges measurably faster than a faint perturbation, which
    leaves the solver crawling out of the near-rank-one saddle.
    """
    d = config.n_streams
    if d == 1 or not np.any(np.abs(f)):
        return f
    eff = effective_channels(channels, phi, config)
    power = frob_sq(f)
    qbar = config.eh_threshold

    # orthonormal completion of the active column(s), per user
    def mixed(delta):
        out = np.array(f, copy=True)
        for k in range(config.n_irs):
            q_basis, _ = np.linalg.qr(np.column_stack(
                [f[k], np.eye(config.n_bs_antennas, d, dtype=complex)]))
            col_power = frob_sq(f[k]) / d
            for j in range(1, d):
                if np.linalg.norm(out[k, :, j]) == 0.0:
                    out[k, :, j] = np.sqrt(delta * col_power) * q_basis[:, j]
        return out * np.sqrt(power / frob_sq(out))

    delta = mix
    while delta > 1e-12:
        candidate = mixed(delta)
        if harvested_power_quadratic(candidate, eff.g) >= qbar:
            return candidate
        delta /= 4.0
    return f


def feasibility_check(channels: ChannelSet, config: SystemConfig,
                      n_max: int = FEAS_MAX_ITER
                      ) -> tuple[bool, np.ndarray, np.ndarray, float]:
    """Alternate energy beamforming and phase ascent until the harvest
    threshold is reached or progress stalls.

    Returns (feasible, F, phi, Q_achieved); when feasible, (F, phi) is a
    valid starting point for the joint solver.
    """
    qbar = config.eh_threshold
    phi = np.ones(config.n_elements, dtype=complex)
    f, q = max_eh_precoder(effective_channels(channels, phi, config), config)
    best = (f, phi, q)
    if q >= qbar:
        return True, f, phi, q

    for _ in range(n_max):
        if config.n_elements:
            data = assemble_eh_qcqp(f, channels, config)
            phi = max_eh_phase_step(data, phi)
        f, q_new = max_eh_precoder(effective_channels(channels, phi, config),
                                   config)
        if q_new > best[2]:
            best = (f, phi, q_new)
        if q_new >= qbar:
            return True, f, phi, q_new
        if config.n_elements == 0 or abs(q_new - q) <= STALL_RTOL * max(q_new, 1e-300):
            q = q_new
            break
        q = q_new

    f, phi, q = best
    return False, f, phi, q
