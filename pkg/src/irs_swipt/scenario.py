"""System configuration, node geometry, and channel realization.

The downlink has one BS, K_I multi-antenna information receivers (IRs),
K_E multi-antenna energy receivers (ERs), and an IRS with M passive
reflective elements.  Five channel families connect them:

    z          (M, N_B)        BS -> IRS
    h_b[k]     (N_I, N_B)      BS -> IR k
    h_r[k]     (N_I, M)        IRS -> IR k
    g_b[l]     (N_E, N_B)      BS -> ER l
    g_r[l]     (N_E, M)        IRS -> ER l

Large-scale fading follows a log-distance power law; small-scale fading is
Rician for the short links around the BS/IRS/ER cluster and Rayleigh for the
distant IR links.  Every matrix has unit average entry power before the
path-loss scaling is applied.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SystemConfig:
    """Scalar system parameters (antenna counts, powers, weights, noise)."""

    n_bs_antennas: int = 4          # N_B
    n_ir_antennas: int = 2          # N_I
    n_er_antennas: int = 2          # N_E
    n_irs: int = 2                  # K_I
    n_ers: int = 4                  # K_E
    n_streams: int = 2              # d per IR
    n_elements: int = 50            # M reflective elements
    power_budget: float = 10.0      # P_T, watts
    eh_threshold: float = 2e-4      # min weighted harvested power, watts
    eh_efficiency: float = 0.5      # RF-to-DC efficiency in (0, 1]
    rate_weights: tuple[float, ...] = ()    # omega_k, defaults to all-ones
    eh_weights: tuple[float, ...] = ()      # alpha_l, defaults to all-ones
    noise_power_ir: float = 1e-13   # watts (-160 dBm/Hz over 1 MHz)
    noise_power_er: float = 1e-13   # watts; unused by the linear EH model
    bandwidth: float = 1e6          # Hz
    rician_factor: float = 3.0      # beta for the Rician links
    antenna_spacing_ratio: float = 0.5  # element spacing over wavelength

    def __post_init__(self):
        if not self.rate_weights:
            object.__setattr__(self, "rate_weights", (1.0,) * self.n_irs)
        if not self.eh_weights:
            object.__setattr__(self, "eh_weights", (1.0,) * self.n_ers)
        ints = {
            "n_bs_antennas": self.n_bs_antennas,
            "n_ir_antennas": self.n_ir_antennas,
            "n_er_antennas": self.n_er_antennas,
            "n_irs": self.n_irs,
            "n_ers": self.n_ers,
            "n_streams": self.n_streams,
        }
        for name, value in ints.items():
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.n_elements < 0 or int(self.n_elements) != self.n_elements:
            raise ValueError("n_elements must be a non-negative integer")
        if not 1 <= self.n_streams <= min(self.n_bs_antennas, self.n_ir_antennas):
            raise ValueError("need 1 <= n_streams <= min(n_bs_antennas, n_ir_antennas)")
        if not 0.0 < self.eh_efficiency <= 1.0:
            raise ValueError("eh_efficiency must be in (0, 1]")
        for name in ("power_budget", "noise_power_ir", "noise_power_er", "bandwidth"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.eh_threshold < 0.0:
            raise ValueError("eh_threshold must be non-negative")
        if self.rician_factor < 0.0:
            raise ValueError("rician_factor must be non-negative")
        if len(self.rate_weights) != self.n_irs:
            raise ValueError("rate_weights length must equal n_irs")
        if len(self.eh_weights) != self.n_ers:
            raise ValueError("eh_weights length must equal n_ers")
        if any(w <= 0.0 for w in self.rate_weights + self.eh_weights):
            raise ValueError("all rate/eh weights must be strictly positive")

    @classmethod
    def from_dict(cls, d: dict) -> "SystemConfig":
        d = dict(d)
        for key in ("rate_weights", "eh_weights"):
            if key in d and d[key] is not None:
                d[key] = tuple(float(x) for x in d[key])
        return cls(**d)


@dataclass(frozen=True)
class Geometry:
    """Planar node layout and per-link path-loss model.

    The BS sits at the origin.  ERs are scattered uniformly over a disk
    centered at ``er_center`` on the x axis, IRs over a disk at ``ir_center``,
    and the IRS hangs just above the ER cluster by default.
    """

    bs_position: tuple[float, float] = (0.0, 0.0)
    er_center: float = 5.0          # x_ER, meters
    er_radius: float = 1.0
    ir_center: float = 400.0        # x_IR, meters
    ir_radius: float = 4.0
    irs_position: tuple[float, float] | None = None  # defaults to (er_center, 2)
    alpha_bs_irs: float = 2.2
    alpha_irs_er: float = 2.2
    alpha_irs_ir: float = 2.4
    alpha_bs_ir: float = 3.6
    alpha_bs_er: float = 3.6
    pl0_db: float = -30.0           # reference path loss at d0, dB
    d0: float = 1.0                 # reference distance, meters

    def __post_init__(self):
        if self.irs_position is None:
            object.__setattr__(self, "irs_position", (self.er_center, 2.0))
        object.__setattr__(self, "bs_position", tuple(map(float, self.bs_position)))
        object.__setattr__(self, "irs_position", tuple(map(float, self.irs_position)))
        for name in ("er_center", "ir_center", "er_radius", "ir_radius"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")
        if self.d0 <= 0.0:
            raise ValueError("d0 must be strictly positive")

    @classmethod
    def from_dict(cls, d: dict) -> "Geometry":
        d = dict(d)
        for key in ("bs_position", "irs_position"):
            if key in d and d[key] is not None:
                d[key] = tuple(float(x) for x in d[key])
        return cls(**d)

    def with_er_center(self, x_er: float) -> "Geometry":
        """Move the ER cluster, keeping the IRS directly above it."""
        return replace(self, er_center=x_er, irs_position=(x_er, self.irs_position[1]))


@dataclass
class ChannelSet:
    """One realization of the five channel families."""

    z: np.ndarray       # (M, N_B)
    h_b: np.ndarray     # (K_I, N_I, N_B)
    h_r: np.ndarray     # (K_I, N_I, M)
    g_b: np.ndarray     # (K_E, N_E, N_B)
    g_r: np.ndarray     # (K_E, N_E, M)

    def validate(self, config: SystemConfig) -> None:
        m, nb = config.n_elements, config.n_bs_antennas
        expect = {
            "z": (m, nb),
            "h_b": (config.n_irs, config.n_ir_antennas, nb),
            "h_r": (config.n_irs, config.n_ir_antennas, m),
            "g_b": (config.n_ers, config.n_er_antennas, nb),
            "g_r": (config.n_ers, config.n_er_antennas, m),
        }
        for name, shape in expect.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            if arr.size and not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")

    def without_irs(self) -> "ChannelSet":
        """Copy with all IRS-related links zeroed (No-IRS baseline)."""
        return ChannelSet(
            z=np.zeros_like(self.z),
            h_b=self.h_b.copy(),
            h_r=np.zeros_like(self.h_r),
            g_b=self.g_b.copy(),
            g_r=np.zeros_like(self.g_r),
        )


def path_loss_linear(distance: float, exponent: float, pl0_db: float = -30.0,
                     d0: float = 1.0) -> float:
    """Linear power gain of the log-distance path-loss law.

    Returns 10**(pl0_db/10) * (distance/d0)**(-exponent).
    """
    if distance <= 0.0:
        raise ValueError("distance must be strictly positive")
    if d0 <= 0.0:
        raise ValueError("d0 must be strictly positive")
    return float(10.0 ** (pl0_db / 10.0) * (distance / d0) ** (-exponent))


def steering_vector(n: int, angle: float, spacing_ratio: float = 0.5) -> np.ndarray:
    """Uniform-linear-array response: entry m is exp(j*2*pi*spacing*m*sin(angle))."""
    if n < 1:
        raise ValueError("array size must be at least 1")
    m = np.arange(n)
    return np.exp(1j * TWO_PI * spacing_ratio * m * np.sin(angle))


def rician_channel(rows: int, cols: int, beta: float, aoa: float, aod: float,
                   rng: np.random.Generator,
                   spacing_ratio: float = 0.5) -> np.ndarray:
    """Unit-average-power Rician fading matrix.

    sqrt(beta/(beta+1)) * a_rows(aoa) a_cols(aod)^H + sqrt(1/(beta+1)) * N,
    with N i.i.d. standard complex Gaussian.  beta = 0 reduces to Rayleigh.
    """
    if beta < 0.0:
        raise ValueError("Rician factor must be non-negative")
    if rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=complex)
    los = np.outer(steering_vector(rows, aoa, spacing_ratio),
                   steering_vector(cols, aod, spacing_ratio).conj())
    nlos = (rng.standard_normal((rows, cols))
            + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)
    return np.sqrt(beta / (beta + 1.0)) * los + np.sqrt(1.0 / (beta + 1.0)) * nlos


def _disk_points(rng: np.random.Generator, center_x: float, radius: float,
                 count: int) -> np.ndarray:
    """Uniform points over a disk (sqrt-radius sampling), shape (count, 2)."""
    r = radius * np.sqrt(rng.random(count))
    theta = TWO_PI * rng.random(count)
    return np.column_stack((center_x + r * np.cos(theta), r * np.sin(theta)))


def _rician_link(rng, rows, cols, beta, spacing) -> np.ndarray:
    aoa = rng.uniform(0.0, TWO_PI)
    aod = rng.uniform(0.0, TWO_PI)
    return rician_channel(rows, cols, beta, aoa, aod, rng, spacing)


def _rayleigh_link(rng, rows, cols) -> np.ndarray:
    return rician_channel(rows, cols, 0.0, 0.0, 0.0, rng)


def generate_scenario(config: SystemConfig, geometry: Geometry,
                      seed: int) -> ChannelSet:
    """Draw node positions and all channel matrices for one trial.

    Deterministic given (config, geometry, seed): positions are drawn first
    (ERs then IRs), then the links in the fixed order z, h_b, h_r, g_b, g_r.
    """
    rng = np.random.default_rng(seed)
    m, nb = config.n_elements, config.n_bs_antennas
    ni, ne = config.n_ir_antennas, config.n_er_antennas
    beta, spacing = config.rician_factor, config.antenna_spacing_ratio

    bs = np.asarray(geometry.bs_position)
    irs = np.asarray(geometry.irs_position)
    er_pos = _disk_points(rng, geometry.er_center, geometry.er_radius, config.n_ers)
    ir_pos = _disk_points(rng, geometry.ir_center, geometry.ir_radius, config.n_irs)

    def gain(a, b, alpha):
        dist = float(np.hypot(*(a - b)))
        if dist <= 0.0:
            raise ValueError("node placement produced a zero-length link")
        return np.sqrt(path_loss_linear(dist, alpha, geometry.pl0_db, geometry.d0))

    # Short links around the BS/IRS/ER cluster are Rician; the distant IR
    # links (from both the BS and the IRS) are Rayleigh.
    z = gain(bs, irs, geometry.alpha_bs_irs) * _rician_link(rng, m, nb, beta, spacing)

    h_b = np.empty((config.n_irs, ni, nb), dtype=complex)
    h_r = np.empty((config.n_irs, ni, m), dtype=complex)
    for k in range(config.n_irs):
        h_b[k] = gain(bs, ir_pos[k], geometry.alpha_bs_ir) * _rayleigh_link(rng, ni, nb)
    for k in range(config.n_irs):
        h_r[k] = gain(irs, ir_pos[k], geometry.alpha_irs_ir) * _rayleigh_link(rng, ni, m)

    g_b = np.empty((config.n_ers, ne, nb), dtype=complex)
    g_r = np.empty((config.n_ers, ne, m), dtype=complex)
    for el in range(config.n_ers):
        g_b[el] = gain(bs, er_pos[el], geometry.alpha_bs_er) * _rician_link(
            rng, ne, nb, beta, spacing)
    for el in range(config.n_ers):
        g_r[el] = gain(irs, er_pos[el], geometry.alpha_irs_er) * _rician_link(
            rng, ne, m, beta, spacing)

    channels = ChannelSet(z=z, h_b=h_b, h_r=h_r, g_b=g_b, g_r=g_r)
    channels.validate(config)
    return channels


def load_scenario(path: str | Path) -> tuple[SystemConfig, Geometry, int]:
    """Read a scenario file: JSON with "config", "geometry", optional "seed"."""
    with open(path) as fh:
        raw = json.load(fh)
    config = SystemConfig.from_dict(raw.get("config", {}))
    geometry = Geometry.from_dict(raw.get("geometry", {}))
    seed = int(raw.get("seed", 0))
    return config, geometry, seed
