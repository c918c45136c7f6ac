"""Rates, MSE matrices, harvested power, and the weighted-MMSE surrogate.

Conventions:

    F      (K_I, N_B, d)   precoders, one per IR
    phi    (M,)            unit-modulus reflection coefficients
    U      (K_I, N_I, d)   linear decoders
    W      (K_I, d, d)     Hermitian PD weight matrices

Rates are computed in nats; the bit conversion happens only at reporting
boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import frob_sq, herm, hermitianize, logdet_pd
from .scenario import ChannelSet, SystemConfig

LN2 = float(np.log(2.0))


@dataclass
class EffectiveChannels:
    """Direct-plus-reflected composites for the current phase vector."""

    hbar: np.ndarray    # (K_I, N_I, N_B), H_b[k] + H_r[k] diag(phi) Z
    gbar: np.ndarray    # (K_E, N_E, N_B)
    g: np.ndarray       # (N_B, N_B) Hermitian PSD harvest quadratic


def effective_channels(channels: ChannelSet, phi: np.ndarray,
                       config: SystemConfig) -> EffectiveChannels:
    """Compose the effective IR/ER channels and the harvest matrix G.

    G = sum_l alpha_l * eta * gbar_l^H gbar_l, so the weighted harvested
    power is tr(sum_k F_k^H G F_k).
    """
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (config.n_elements,):
        raise ValueError(f"phi has shape {phi.shape}, expected ({config.n_elements},)")
    phi_z = phi[:, None] * channels.z                       # diag(phi) @ Z
    hbar = channels.h_b + channels.h_r @ phi_z
    gbar = channels.g_b + channels.g_r @ phi_z
    alphas = np.asarray(config.eh_weights)
    g = np.zeros((config.n_bs_antennas, config.n_bs_antennas), dtype=complex)
    for el in range(config.n_ers):
        g += alphas[el] * config.eh_efficiency * herm(gbar[el]) @ gbar[el]
    return EffectiveChannels(hbar=hbar, gbar=gbar, g=hermitianize(g))


def _interference_cov(k: int, f: np.ndarray, hbar_k: np.ndarray,
                      sigma2: float) -> np.ndarray:
    """J_k = sum_{m != k} Hbar_k F_m F_m^H Hbar_k^H + sigma2 I."""
    n_i = hbar_k.shape[0]
    j = sigma2 * np.eye(n_i, dtype=complex)
    for m in range(f.shape[0]):
        if m == k:
            continue
        hf = hbar_k @ f[m]
        j += hf @ herm(hf)
    return j


def user_rate(k: int, f: np.ndarray, eff: EffectiveChannels,
              sigma2_ir: float) -> float:
    """Achievable rate of IR k in nats: log|I + Hbar F_k F_k^H Hbar^H J_k^-1|.

    Evaluated as logdet(J_k + S_k) - logdet(J_k) with both factors Hermitian
    PD (sigma2_ir > 0), so no explicit inverse is formed.
    """
    if sigma2_ir <= 0.0:
        raise ValueError("noise power must be strictly positive")
    hbar_k = eff.hbar[k]
    j = _interference_cov(k, f, hbar_k, sigma2_ir)
    hf = hbar_k @ f[k]
    total = j + hf @ herm(hf)
    return max(0.0, logdet_pd(total) - logdet_pd(j))


def weighted_sum_rate(f: np.ndarray, phi: np.ndarray, channels: ChannelSet,
                      config: SystemConfig) -> tuple[float, float]:
    """Weighted sum rate over all IRs, returned as (nats, bits)."""
    eff = effective_channels(channels, phi, config)
    nats = 0.0
    for k in range(config.n_irs):
        nats += config.rate_weights[k] * user_rate(k, f, eff, config.noise_power_ir)
    return nats, nats / LN2


def harvested_power(f: np.ndarray, eff: EffectiveChannels,
                    config: SystemConfig) -> tuple[np.ndarray, float]:
    """Per-ER harvested powers Q_l and their weighted sum Q.

    Q_l = eta * tr(sum_k Gbar_l F_k F_k^H Gbar_l^H); the weighted sum equals
    tr(sum_k F_k^H G F_k), and both forms agree to rounding.
    """
    per_er = np.empty(config.n_ers)
    for el in range(config.n_ers):
        q = 0.0
        for k in range(config.n_irs):
            q += frob_sq(eff.gbar[el] @ f[k])
        per_er[el] = config.eh_efficiency * q
    weighted = float(np.dot(config.eh_weights, per_er))
    return per_er, weighted


def harvested_power_quadratic(f: np.ndarray, g: np.ndarray) -> float:
    """Weighted harvested power in the quadratic form tr(sum_k F_k^H G F_k)."""
    return float(sum(np.real(np.trace(herm(fk) @ g @ fk)) for fk in f))


def mse_matrix(k: int, f: np.ndarray, u: np.ndarray, eff: EffectiveChannels,
               sigma2_ir: float) -> np.ndarray:
    """Symbol-estimation error covariance of IR k for decoder U_k.

    E_k = (U^H Hbar F_k - I)(.)^H + sum_{m != k} U^H Hbar F_m F_m^H Hbar^H U
          + sigma2 U^H U.
    """
    hbar_k = eff.hbar[k]
    uh = herm(u[k])
    d = f.shape[2]
    delta = uh @ hbar_k @ f[k] - np.eye(d, dtype=complex)
    e = delta @ herm(delta) + sigma2_ir * (uh @ u[k])
    for m in range(f.shape[0]):
        if m == k:
            continue
        x = uh @ hbar_k @ f[m]
        e += x @ herm(x)
    return hermitianize(e)


def wmmse_objective(w: np.ndarray, u: np.ndarray, f: np.ndarray,
                    phi: np.ndarray, channels: ChannelSet,
                    config: SystemConfig) -> float:
    """Weighted-MMSE surrogate sum_k omega_k (log|W_k| - tr(W_k E_k) + d).

    Equals the weighted sum rate in nats once U and W are set to their
    closed-form optima.  Raises on singular (non-PD) W_k.
    """
    eff = effective_channels(channels, phi, config)
    d = config.n_streams
    total = 0.0
    for k in range(config.n_irs):
        try:
            logdet_w = logdet_pd(w[k])
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"W[{k}] is not positive definite") from exc
        e_k = mse_matrix(k, f, u, eff, config.noise_power_ir)
        total += config.rate_weights[k] * (
            logdet_w - float(np.real(np.trace(w[k] @ e_k))) + d)
    return total


def total_power(f: np.ndarray) -> float:
    """Transmit power sum_k ||F_k||_F^2."""
    return frob_sq(f)
