"""Precoder block: SCA around a convex quadratic subproblem solved in
closed form through Lagrangian duality.

With the decoders U, weights W, and phases fixed, the precoder update
minimizes

    z(F) = sum_k tr(F_k^H A F_k) - 2 Re sum_k tr(L_k^H F_k),
    A = sum_m omega_m Hbar_m^H U_m W_m U_m^H Hbar_m,
    L_k = omega_k Hbar_k^H U_k W_k,

subject to the power budget and the harvest constraint.  The non-convex
harvest quadratic is replaced by its first-order lower bound at the anchor
F^(n), which turns each iteration into a convex problem whose solution is

    F_k(lambda, mu) = (A + lambda I)^+ (L_k + mu G F_k^(n)),

with mu set by the linearized-harvest slackness and lambda found by
bisection on the transmit power, which is non-increasing in lambda.
The pseudoinverse is applied in the eigenbasis of A, computed once and
reused across all bisection evaluations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BracketError, InfeasibleDirectionError
from .linalg import frob_sq, herm, hermitianize
from .metrics import EffectiveChannels, effective_channels, harvested_power_quadratic
from .scenario import ChannelSet, SystemConfig

log = logging.getLogger(__name__)

BISECTION_EPS = 1e-8
SCA_EPS = 1e-6
SCA_MAX_ITER = 100
MAX_DOUBLINGS = 60
EIG_CUTOFF = 1e-12  # relative threshold below which eigen-directions map to zero


@dataclass
class EigenCache:
    """Eigendecomposition of A: basis @ diag(values) @ basis^H."""

    basis: np.ndarray   # (N_B, N_B) unitary
    values: np.ndarray  # (N_B,) non-negative


@dataclass
class QuadraticData:
    """Assembled subproblem: quadratic form, linear terms, and anchor."""

    a: np.ndarray           # (N_B, N_B) Hermitian PSD
    lin: np.ndarray         # (K_I, N_B, d), L_k
    g: np.ndarray           # (N_B, N_B) harvest quadratic
    f_anchor: np.ndarray    # (K_I, N_B, d)
    q_tilde: float          # linearized harvest right-hand side
    eig: EigenCache
    lin_proj: np.ndarray    # basis^H @ L_k
    gfa: np.ndarray         # G @ F_anchor_k
    gfa_proj: np.ndarray    # basis^H @ (G F_anchor_k)

    def with_anchor(self, f_anchor: np.ndarray,
                    eh_threshold: float) -> "QuadraticData":
        """Re-anchor the harvest linearization, reusing A and its eigenbasis."""
        gfa = np.einsum("ij,kjd->kid", self.g, f_anchor)
        q_tilde = eh_threshold + float(
            sum(np.real(np.vdot(f_anchor[k], gfa[k])) for k in range(len(gfa))))
        gfa_proj = np.einsum("ij,kjd->kid", herm(self.eig.basis), gfa)
        return QuadraticData(a=self.a, lin=self.lin, g=self.g,
                             f_anchor=f_anchor, q_tilde=q_tilde, eig=self.eig,
                             lin_proj=self.lin_proj, gfa=gfa, gfa_proj=gfa_proj)


class PrecoderIterate(NamedTuple):
    objective: float    # z(F)
    power: float        # sum_k ||F_k||_F^2
    harvest: float      # true weighted harvested power


def build_quadratic(u: np.ndarray, w: np.ndarray, eff: EffectiveChannels,
                    f_anchor: np.ndarray, config: SystemConfig,
                    eh_threshold: float | None = None) -> QuadraticData:
    """Assemble A, the linear terms, the harvest anchor data, and the
    eigenbasis cache for the precoder subproblem."""
    n_b = config.n_bs_antennas
    a = np.zeros((n_b, n_b), dtype=complex)
    lin = np.empty_like(f_anchor)
    for k in range(config.n_irs):
        hu = herm(eff.hbar[k]) @ u[k]                       # (N_B, d)
        a += config.rate_weights[k] * hu @ w[k] @ herm(hu)
        lin[k] = config.rate_weights[k] * hu @ w[k]
    a = hermitianize(a)
    vals, basis = np.linalg.eigh(a)
    eig = EigenCache(basis=basis, values=np.maximum(vals, 0.0))
    qbar = config.eh_threshold if eh_threshold is None else eh_threshold
    data = QuadraticData(a=a, lin=lin, g=eff.g, f_anchor=f_anchor,
                         q_tilde=0.0, eig=eig,
                         lin_proj=np.einsum("ij,kjd->kid", herm(basis), lin),
                         gfa=np.empty_like(f_anchor),
                         gfa_proj=np.empty_like(f_anchor))
    return data.with_anchor(f_anchor, qbar)


def _shift_inverse(lam: float, data: QuadraticData) -> np.ndarray:
    """Diagonal of (A + lambda I)^+ in the cached eigenbasis."""
    den = data.eig.values + lam
    cutoff = EIG_CUTOFF * max(float(den.max()), 1e-300)
    return np.where(den > cutoff, 1.0 / np.maximum(den, cutoff), 0.0)


def precoder_closed_form(lam: float, mu: float,
                         data: QuadraticData) -> np.ndarray:
    """F_k = (A + lambda I)^+ (L_k + mu G F_anchor_k) via the eigenbasis."""
    inv = _shift_inverse(lam, data)
    rhs = data.lin_proj + mu * data.gfa_proj
    return np.einsum("ij,kjd->kid", data.eig.basis, inv[None, :, None] * rhs)


def compute_mu(lam: float, data: QuadraticData) -> float:
    """Harvest multiplier: zero if the mu = 0 solution already meets the
    linearized constraint, otherwise the value that makes it tight."""
    inv = _shift_inverse(lam, data)
    c0 = 0.0
    den = 0.0
    for k in range(len(data.lin)):
        c0 += 2.0 * float(np.real(np.vdot(data.gfa_proj[k],
                                          inv[:, None] * data.lin_proj[k])))
        den += 2.0 * float(np.real(np.vdot(data.gfa_proj[k],
                                           inv[:, None] * data.gfa_proj[k])))
    if c0 >= data.q_tilde:
        return 0.0
    gfa_norm = np.sqrt(sum(frob_sq(x) for x in data.gfa))
    scale = np.linalg.norm(data.g) * np.sqrt(max(frob_sq(data.f_anchor), 1e-300))
    if den <= 0.0 or gfa_norm <= 1e-13 * max(scale, 1e-300):
        raise InfeasibleDirectionError(
            "harvest constraint binds but G F_anchor is numerically zero")
    return (data.q_tilde - c0) / den


def power_of_lambda(lam: float, data: QuadraticData) -> float:
    """Transmit power of the mu-adjusted closed-form solution at lambda."""
    mu = compute_mu(lam, data)
    inv = _shift_inverse(lam, data)
    rhs = data.lin_proj + mu * data.gfa_proj
    return float(np.sum(np.abs(inv[None, :, None] * rhs) ** 2))


def dual_bisection(data: QuadraticData, p_t: float,
                   eps: float = BISECTION_EPS
                   ) -> tuple[np.ndarray, float, float]:
    """Solve the convex subproblem by bisection on the power multiplier.

    Returns (F, lambda, mu).  If the unconstrained solution already fits the
    budget, lambda = 0; otherwise lambda is bisected until the bracket is
    tighter than eps (relative) and the low-power side is returned, so the
    power constraint holds.
    """
    if power_of_lambda(0.0, data) <= p_t:
        mu = compute_mu(0.0, data)
        return precoder_closed_form(0.0, mu, data), 0.0, mu

    lam_u = 1.0
    doublings = 0
    while power_of_lambda(lam_u, data) > p_t:
        lam_u *= 2.0
        doublings += 1
        if doublings > MAX_DOUBLINGS:
            raise BracketError("could not bracket the power multiplier")
    lam_l = lam_u / 2.0 if doublings > 0 else 0.0

    p_at_u = power_of_lambda(lam_u, data)
    for _ in range(256):
        bracket_done = lam_u - lam_l <= eps * max(1.0, lam_u)
        if bracket_done and p_t - p_at_u <= 1e-8 * p_t:
            break
        mid = 0.5 * (lam_l + lam_u)
        if mid <= lam_l or mid >= lam_u:    # float resolution exhausted
            break
        p_mid = power_of_lambda(mid, data)
        if p_mid >= p_t:
            lam_l = mid
        else:
            lam_u, p_at_u = mid, p_mid
    mu = compute_mu(lam_u, data)
    return precoder_closed_form(lam_u, mu, data), lam_u, mu


def sca_objective(f: np.ndarray, data: QuadraticData) -> float:
    """z(F) = sum_k tr(F_k^H A F_k) - 2 Re sum_k tr(L_k^H F_k)."""
    z = 0.0
    for k in range(len(f)):
        z += float(np.real(np.vdot(f[k], data.a @ f[k])))
        z -= 2.0 * float(np.real(np.vdot(data.lin[k], f[k])))
    return z


def sca_precoder_solve(u: np.ndarray, w: np.ndarray, phi: np.ndarray,
                       channels: ChannelSet, f_init: np.ndarray,
                       config: SystemConfig, eps: float = SCA_EPS,
                       n_max: int = SCA_MAX_ITER
                       ) -> tuple[np.ndarray, list[PrecoderIterate]]:
    """Iterate the harvest linearization to a KKT point of the precoder block.

    f_init must satisfy both the power budget and the true harvest
    constraint; every iterate then stays feasible and z is non-increasing.
    """
    eff = effective_channels(channels, phi, config)
    p_t = config.power_budget
    qbar = config.eh_threshold
    q0 = harvested_power_quadratic(f_init, eff.g)
    if frob_sq(f_init) > p_t * (1.0 + 1e-6):
        raise ValueError("f_init exceeds the power budget")
    if q0 < qbar * (1.0 - 1e-6):
        raise ValueError("f_init violates the harvest constraint")
    if qbar > 0.0 and q0 <= qbar * (1.0 + 1e-9):
        # Strict feasibility is needed for zero duality gap; back the
        # threshold off by a relative 1e-9 when the start meets it exactly.
        log.info("initial harvest meets the threshold with equality; "
                 "relaxing it by 1e-9 relative")
        qbar = qbar * (1.0 - 1e-9)

    f = f_init
    data = build_quadratic(u, w, eff, f, config, eh_threshold=qbar)
    trajectory = [PrecoderIterate(sca_objective(f, data), frob_sq(f), q0)]
    for _ in range(n_max):
        f_new, _, _ = dual_bisection(data, p_t)
        z_new = sca_objective(f_new, data)
        q_new = harvested_power_quadratic(f_new, eff.g)
        trajectory.append(PrecoderIterate(z_new, frob_sq(f_new), q_new))
        z_prev = trajectory[-2].objective
        f = f_new
        data = data.with_anchor(f, qbar)
        if abs(z_new - z_prev) < eps * max(abs(z_new), 1e-30):
            break
    return f, trajectory
