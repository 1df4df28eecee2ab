"""Bivariate log-Gaussian intensities observed at the UAV and at the RC.

The interferer density seen by each receiver is ``exp(g)`` with ``g`` Gaussian.
Only the two observation points are modelled, so the Gaussian process reduces
to a 2-D normal vector whose correlation decays exponentially with the
horizontal UAV-RC separation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def spatial_correlation(d, k0: float):
    """Correlation ``exp(-k0 * d)`` of the two log-intensities.

    Accepts a scalar or an array of distances in metres.
    """
    if k0 < 0:
        raise ValueError(f"correlation decay rate must be >= 0, got {k0}")
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr < 0):
        raise ValueError("distance must be >= 0")
    if d_arr.ndim == 0:
        return math.exp(-k0 * float(d_arr))
    return np.exp(-k0 * d_arr)


def mu0_from_mean(lambda_bar: float, sigma0_sq: float) -> float:
    """Gaussian mean that makes ``E[exp(g)] == lambda_bar``."""
    if lambda_bar <= 0:
        raise ValueError(f"mean density must be > 0, got {lambda_bar}")
    return math.log(lambda_bar) - 0.5 * sigma0_sq


@dataclass(frozen=True)
class LgcpParams:
    """Log-Gaussian intensity parameters.

    Attributes:
        lambda_bar: mean interferer density, nodes/m^2.
        sigma0_sq: variance of the log-intensity.
        k0: decay rate of the log-intensity correlation, 1/m.
        mu0: mean of the log-intensity (derived).
    """

    lambda_bar: float
    sigma0_sq: float = 1.0
    k0: float = 0.05
    mu0: float = field(init=False)

    def __post_init__(self):
        if not self.lambda_bar > 0:
            raise ValueError(f"lambda_bar must be > 0, got {self.lambda_bar}")
        if self.sigma0_sq < 0:
            raise ValueError(f"sigma0_sq must be >= 0, got {self.sigma0_sq}")
        if self.k0 < 0:
            raise ValueError(f"k0 must be >= 0, got {self.k0}")
        object.__setattr__(self, "mu0", mu0_from_mean(self.lambda_bar, self.sigma0_sq))

    @classmethod
    def from_mu0(cls, mu0: float, sigma0_sq: float, k0: float = 0.05) -> "LgcpParams":
        return cls(math.exp(mu0 + 0.5 * sigma0_sq), sigma0_sq, k0)

    @property
    def sigma0(self) -> float:
        return math.sqrt(self.sigma0_sq)


@dataclass(frozen=True)
class IntensityPair:
    lambda_ul: float
    lambda_dl: float


def mean_intensity(params: LgcpParams) -> float:
    return math.exp(params.mu0 + 0.5 * params.sigma0_sq)


def intensity_second_moment(params: LgcpParams) -> float:
    """``E[lambda_ul^2]`` (identical for the DL density)."""
    return params.lambda_bar**2 * math.exp(params.sigma0_sq)


def intensity_cross_moment(params: LgcpParams, d: float) -> float:
    """``E[lambda_ul * lambda_dl]`` at horizontal separation ``d``."""
    xi = spatial_correlation(d, params.k0)
    return params.lambda_bar**2 * math.exp(params.sigma0_sq * xi)


def log_intensities(params: LgcpParams, d, z_ul, z_dl):
    """Map independent standard normals to correlated log-intensities.

    Uses the closed-form Cholesky factor of the 2x2 covariance
    ``sigma0_sq * [[1, xi], [xi, 1]]``. At ``xi == 1`` the two outputs are
    bit-identical.
    """
    xi = spatial_correlation(d, params.k0)
    s = params.sigma0
    ortho = np.sqrt(np.maximum(1.0 - xi * xi, 0.0))
    g_ul = params.mu0 + s * z_ul
    g_dl = params.mu0 + s * (xi * z_ul + ortho * z_dl)
    return g_ul, g_dl


def sample_intensity_pair(params: LgcpParams, d: float, rng: np.random.Generator) -> IntensityPair:
    """Draw one correlated (UL, DL) intensity pair."""
    if params.sigma0_sq == 0.0:
        return IntensityPair(params.lambda_bar, params.lambda_bar)
    z = rng.standard_normal(2)
    g_ul, g_dl = log_intensities(params, d, z[0], z[1])
    return IntensityPair(float(np.exp(g_ul)), float(np.exp(g_dl)))
