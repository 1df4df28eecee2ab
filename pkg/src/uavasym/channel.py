"""Air-to-ground LoS probability, free-space path gain and Rayleigh fading."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def watts_to_dbm(w):
    return 10.0 * np.log10(w) + 30.0


@dataclass(frozen=True)
class LosEnvParams:
    """Urban environment parameters for the LoS models.

    ``gamma_env`` (m), ``delta`` and ``beta_env`` (buildings per km^2) feed the
    exact building-statistics model; ``mu_fit`` and ``kappa_fit`` feed the
    break-point approximation. The defaults for the first three are the ITU-R
    urban values and are only used by the exact model.
    """

    gamma_env: float = 15.0
    delta: float = 0.3
    beta_env: float = 500.0
    mu_fit: float = 0.625
    kappa_fit: float = 1.38

    def __post_init__(self):
        for name in ("gamma_env", "delta", "beta_env", "mu_fit", "kappa_fit"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class LinkBudget:
    """Interferer-to-receiver link constants, gains linear."""

    p_tx: float
    g_tx: float
    g_rx: float
    freq: float
    eta_los_ul: float = 2.0
    eta_nlos_ul: float = 3.0
    eta_nlos_dl: float = 3.0

    def __post_init__(self):
        if self.eta_los_ul != 2.0:
            raise ValueError("the closed forms require a LoS exponent of exactly 2")
        if self.eta_nlos_ul <= 2.0 or self.eta_nlos_dl <= 2.0:
            raise ValueError("NLoS path-loss exponents must exceed 2")

    @property
    def kernel(self) -> float:
        """Received power per unit fading at 1 m for a unit exponent (W)."""
        return self.p_tx * self.g_tx * self.g_rx * SPEED_OF_LIGHT**2 / ((4 * math.pi) ** 2 * self.freq**2)

    @property
    def beta(self) -> float:
        """``2*pi*kernel``; the prefactor of the Campbell integrals."""
        return 2 * math.pi * self.kernel


def los_probability_exact(h: float, r: float, env: LosEnvParams) -> float:
    """Building-statistics LoS probability at altitude ``h`` and ground range ``r``.

    ``beta_env`` is converted from buildings/km^2 to buildings/m^2 so that
    ``r * sqrt(delta * beta)`` is dimensionless with ``r`` in metres.
    """
    if h <= 0:
        raise ValueError(f"altitude must be > 0, got {h}")
    if r < 0:
        raise ValueError(f"ground range must be >= 0, got {r}")
    m = math.floor(r * math.sqrt(env.delta * env.beta_env * 1e-6) - 1.0)
    if m < 0:
        return 1.0
    n = np.arange(m + 1)
    heights = h - (n + 0.5) * h / (m + 1)
    return float(np.prod(1.0 - np.exp(-(heights**2) / (2 * env.gamma_env**2))))


def los_probability_breakpoint(R, h: float, env: LosEnvParams, R0: float | None = None):
    """Break-point LoS probability: 1 up to ``kappa*h``, exponential decay beyond.

    ``R`` is the 3-D distance (scalar or array). When ``R0`` is given, distances
    below it are rejected.
    """
    if h <= 0:
        raise ValueError(f"altitude must be > 0, got {h}")
    R_arr = np.asarray(R, dtype=float)
    if R0 is not None and np.any(R_arr < R0):
        raise ValueError("3-D distance below the minimum R0")
    bp = env.kappa_fit * h
    p = np.exp(-(env.mu_fit / h) * np.maximum(R_arr - bp, 0.0))
    return float(p) if p.ndim == 0 else p


def path_gain(R, eta: float, budget: LinkBudget):
    """Mean received power from one interferer at distance ``R`` (W)."""
    R_arr = np.asarray(R, dtype=float)
    if np.any(R_arr <= 0):
        raise ValueError("distance must be > 0")
    g = budget.kernel / R_arr**eta
    return float(g) if g.ndim == 0 else g


def sample_fading(rng: np.random.Generator, size=None):
    """Unit-mean exponential power fading."""
    return rng.exponential(1.0, size)
