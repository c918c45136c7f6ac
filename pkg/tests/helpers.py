"""Shared instance builders and independent oracles for the test suite.

Everything here deliberately avoids the library's solver code paths: the
oracles recompute quantities from their definitions (explicit diagonal
matrices, eigen/SVD decompositions, exhaustive grids, projected gradient)
so that agreement with the production implementations is meaningful.
"""

import numpy as np

from irs_swipt import (ChannelSet, SystemConfig, update_decoders,
                       update_weights)
from irs_swipt.linalg import herm


def crandn(rng, *shape, scale=1.0):
    """i.i.d. complex Gaussian entries with E|x|^2 = scale^2."""
    return scale * (rng.standard_normal(shape)
                    + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def unit_phases(rng, m):
    return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, m))


def bench_config(n_bs=4, n_ir=2, n_er=2, k_i=2, k_e=2, d=2, m=6,
                 p_t=10.0, qbar=0.0, sigma2=1.0, eta=0.5,
                 rate_weights=(), eh_weights=()):
    """Unit-scale configuration for randomized algebraic tests."""
    return SystemConfig(
        n_bs_antennas=n_bs, n_ir_antennas=n_ir, n_er_antennas=n_er,
        n_irs=k_i, n_ers=k_e, n_streams=d, n_elements=m,
        power_budget=p_t, eh_threshold=qbar, eh_efficiency=eta,
        rate_weights=rate_weights, eh_weights=eh_weights,
        noise_power_ir=sigma2, noise_power_er=sigma2)


def random_channels(rng, config, scale=1.0):
    """Channel matrices with i.i.d. unit-power entries (no geometry)."""
    m, nb = config.n_elements, config.n_bs_antennas
    return ChannelSet(
        z=crandn(rng, m, nb, scale=scale),
        h_b=crandn(rng, config.n_irs, config.n_ir_antennas, nb, scale=scale),
        h_r=crandn(rng, config.n_irs, config.n_ir_antennas, m, scale=scale),
        g_b=crandn(rng, config.n_ers, config.n_er_antennas, nb, scale=scale),
        g_r=crandn(rng, config.n_ers, config.n_er_antennas, m, scale=scale))


def random_precoders(rng, config, power=None):
    """Random precoders scaled to total power (defaults to the budget)."""
    f = crandn(rng, config.n_irs, config.n_bs_antennas, config.n_streams)
    target = config.power_budget if power is None else power
    return f * np.sqrt(target / max(np.sum(np.abs(f) ** 2), 1e-300))


def wmmse_state(rng, config, channels=None, phi=None, f=None):
    """A consistent (channels, phi, F, U, W) tuple around a random point."""
    if channels is None:
        channels = random_channels(rng, config)
    if phi is None:
        phi = unit_phases(rng, config.n_elements)
    if f is None:
        f = random_precoders(rng, config)
    u = update_decoders(f, phi, channels, config)
    w = update_weights(f, phi, u, channels, config)
    return channels, phi, f, u, w


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def effective_channel_direct(h_b, h_r, phi, z):
    """Composite channel via an explicit diagonal matrix product."""
    return h_b + h_r @ np.diag(phi) @ z


def wsr_direct(f, phi, channels, config):
    """Weighted sum rate in nats from determinant ratios, no library calls."""
    sigma2 = config.noise_power_ir
    total = 0.0
    for k in range(config.n_irs):
        hbar = effective_channel_direct(channels.h_b[k], channels.h_r[k],
                                        phi, channels.z)
        j = sigma2 * np.eye(config.n_ir_antennas, dtype=complex)
        for mth in range(config.n_irs):
            if mth != k:
                hf = hbar @ f[mth]
                j += hf @ herm(hf)
        hf = hbar @ f[k]
        sign, logdet_full = np.linalg.slogdet(j + hf @ herm(hf))
        sign2, logdet_j = np.linalg.slogdet(j)
        total += config.rate_weights[k] * float(np.real(logdet_full - logdet_j))
    return total


def wsr_gradient(f, phi, channels, config):
    """Analytic conjugate gradient of the weighted sum rate w.r.t. F.

    d WSR = 2 Re <grad_k, dF_k>; used to validate finite differences of the
    production rate evaluation.
    """
    sigma2 = config.noise_power_ir
    k_i = config.n_irs
    hbars = [effective_channel_direct(channels.h_b[k], channels.h_r[k],
                                      phi, channels.z) for k in range(k_i)]
    grad = np.zeros_like(f)
    for m in range(k_i):
        hbar = hbars[m]
        j = sigma2 * np.eye(config.n_ir_antennas, dtype=complex)
        for i in range(k_i):
            if i != m:
                hf = hbar @ f[i]
                j += hf @ herm(hf)
        hf_m = hbar @ f[m]
        omega = j + hf_m @ herm(hf_m)
        om = config.rate_weights[m]
        omega_inv_h = np.linalg.solve(omega, hbar)
        j_inv_h = np.linalg.solve(j, hbar)
        for k in range(k_i):
            grad[k] += om * herm(hbar) @ omega_inv_h @ f[k]
            if k != m:
                grad[k] -= om * herm(hbar) @ j_inv_h @ f[k]
    return grad


def waterfill_capacity(hbar, sigma2, p_total):
    """Single-user MIMO capacity (nats) by water-filling over the eigenmodes."""
    gains = np.linalg.svd(hbar, compute_uv=False) ** 2 / sigma2
    gains = np.sort(gains[gains > 1e-30])[::-1]
    for r in range(len(gains), 0, -1):
        g = gains[:r]
        level = (p_total + np.sum(1.0 / g)) / r
        powers = level - 1.0 / g
        if powers[-1] >= -1e-12:
            return float(np.sum(np.log1p(np.maximum(powers, 0.0) * g)))
    return 0.0


def project_ball_halfspace(x, radius, a, c):
    """Euclidean projection onto {||y|| <= radius} cut by {Re<a, y> >= c}.

    Arrays are treated as vectors in the real inner product Re<u, v>.
    """
    def ip(u, v):
        return float(np.real(np.vdot(u, v)))

    na2 = ip(a, a)
    nx = np.sqrt(ip(x, x))
    if na2 <= 0.0:
        if c > 1e-12:
            raise ValueError("empty constraint set")
        return x if nx <= radius else x * (radius / nx)
    if ip(a, x) >= c and nx <= radius:
        return x
    y = x + max(0.0, (c - ip(a, x)) / na2) * a
    if np.sqrt(ip(y, y)) <= radius * (1.0 + 1e-12):
        return y
    y = x * (radius / max(nx, 1e-300))
    if ip(a, y) >= c - 1e-12 * max(1.0, abs(c)):
        return y
    # Both constraints active: project onto the rim where the plane
    # Re<a, y> = c cuts the sphere of the given radius.
    ahat = a / np.sqrt(na2)
    offset = c / np.sqrt(na2)
    if offset > radius * (1.0 + 1e-9):
        raise ValueError("ball and halfspace do not intersect")
    rim = np.sqrt(max(radius ** 2 - offset ** 2, 0.0))
    x_perp = x - ip(ahat, x) * ahat
    npx = np.sqrt(ip(x_perp, x_perp))
    if npx < 1e-300:
        return offset * ahat
    return offset * ahat + rim * x_perp / npx


def pg_quadratic_solver(a_mat, lin, gfa, q_tilde, p_t, f_start,
                        iters=20000):
    """Accelerated projected gradient for the convex precoder subproblem.

    minimize   sum_k tr(F_k^H A F_k) - 2 Re sum_k tr(L_k^H F_k)
    subject to sum_k ||F_k||^2 <= p_t,  2 Re sum_k <G F_anchor_k, F_k> >= q_tilde
    """
    lip = max(float(np.linalg.eigvalsh(a_mat)[-1]), 1e-9)
    step = 1.0 / lip
    radius = np.sqrt(p_t)

    def objective(f):
        val = 0.0
        for k in range(len(f)):
            val += float(np.real(np.vdot(f[k], a_mat @ f[k])))
            val -= 2.0 * float(np.real(np.vdot(lin[k], f[k])))
        return val

    f = project_ball_halfspace(f_start, radius, gfa, q_tilde / 2.0)
    y = f.copy()
    t = 1.0
    best = (objective(f), f)
    for _ in range(iters):
        grad = np.einsum("ij,kjd->kid", a_mat, y) - lin
        f_new = project_ball_halfspace(y - step * grad, radius, gfa,
                                       q_tilde / 2.0)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = f_new + ((t - 1.0) / t_new) * (f_new - f)
        f, t = f_new, t_new
        val = objective(f)
        if val < best[0]:
            best = (val, f)
    return best[1], best[0]


def phase_grid_best(q, w, q_hat, points=720):
    """Exhaustive search of the M = 2 priced subproblem on a phase grid.

    Returns the best feasible value of 2 Re{phi^H q} over the grid, or None
    if no grid point satisfies 2 Re{phi^H w} >= q_hat.
    """
    theta = np.arange(points) * 2.0 * np.pi / points
    e = np.exp(1j * theta)
    obj = 2.0 * np.real(np.conj(e)[:, None] * q[0] + np.conj(e)[None, :] * q[1])
    slack = 2.0 * np.real(np.conj(e)[:, None] * w[0] + np.conj(e)[None, :] * w[1])
    feasible = slack >= q_hat
    if not feasible.any():
        return None
    return float(obj[feasible].max())


def harvest_direct(f, phi, channels, config):
    """Weighted harvested power from the per-ER definition, no library calls."""
    total = 0.0
    for el in range(config.n_ers):
        gbar = effective_channel_direct(channels.g_b[el], channels.g_r[el],
                                        phi, channels.z)
        q_l = 0.0
        for k in range(config.n_irs):
            q_l += float(np.real(np.vdot(gbar @ f[k], gbar @ f[k])))
        total += config.eh_weights[el] * config.eh_efficiency * q_l
    return total
