"""Closed-form interference moments and their quadrature oracles.

All closed forms integrate the interferer field out to infinity. The
quadrature oracles accept a finite outer radius so that Monte-Carlo runs over
a bounded annulus can be compared without truncation bias.

Note on the covariance: as the UAV-RC correlation vanishes the factor
``exp(sigma0_sq * xi)`` tends to one, so ``Cov(I_ul, I_dl)`` tends to zero
(not to one). The functions here follow the algebra.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .channel import los_probability_breakpoint
from .config import SystemConfig
from .intensity import LgcpParams, spatial_correlation


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def upper_incomplete_gamma(s: float, a: float) -> float:
    """Upper incomplete gamma ``Gamma(s, a)`` for any real ``s`` and ``a > 0``.

    Non-positive orders are reached by downward recurrence
    ``Gamma(s, a) = (Gamma(s+1, a) - a**s * exp(-a)) / s`` starting from
    ``E1(a)`` (integer ``s``) or from the regularised gamma at the fractional
    part of ``s``.
    """
    if not a > 0:
        raise ValueError(f"lower limit must be > 0, got {a}")
    if s > 0:
        return float(special.gammaincc(s, a) * special.gamma(s))
    if s == int(s):
        base, val = 0.0, float(special.exp1(a))
    else:
        base = s - math.floor(s)
        val = float(special.gammaincc(base, a) * special.gamma(base))
    order = base
    while order - s > 0.5:
        order -= 1.0
        val = (val - a**order * math.exp(-a)) / order
    return val


@dataclass(frozen=True)
class MomentSet:
    e_i_ul: float
    e_i_dl: float
    var_i_dl: float
    e_prod: float
    cov: float
    rho_closed: float

    @property
    def mean_ratio(self) -> float:
        return self.e_i_ul / self.e_i_dl


def ul_integral(cfg: SystemConfig, branch: str | None = None) -> float:
    """Closed form of ``int_{R0}^inf R^(1-eta_x) [LoS/NLoS weighted] dR``.

    ``branch`` forces ``"near"`` (kappa*H >= R0) or ``"far"`` (kappa*H < R0);
    by default it is picked from the geometry.
    """
    H = cfg.altitude
    mu, kappa = cfg.los_mu, cfg.los_kappa
    eta = cfg.eta_nlos_ul
    R0 = cfg.R0
    bp = kappa * H
    if branch is None:
        branch = "near" if bp >= R0 else "far"
    lower = mu * kappa if branch == "near" else mu * R0 / H
    start = bp if branch == "near" else R0
    emk = math.exp(mu * kappa)
    total = (
        emk * upper_incomplete_gamma(0.0, lower)
        - emk * (mu / H) ** (eta - 2) * upper_incomplete_gamma(2 - eta, lower)
        + start ** (2 - eta) / (eta - 2)
    )
    if branch == "near":
        total += math.log(bp / R0)
    elif branch != "far":
        raise ValueError(f"unknown branch {branch!r}")
    return total


def dl_integral(cfg: SystemConfig, r_max: float = math.inf) -> float:
    """``int_{r0}^{r_max} r^(1-eta) dr`` for the DL NLoS exponent."""
    eta = cfg.eta_nlos_dl
    return (cfg.r0 ** (2 - eta) - r_max ** (2 - eta)) / (eta - 2)


def expected_i_ul(cfg: SystemConfig, lgcp: LgcpParams | None = None) -> float:
    lgcp = lgcp or cfg.lgcp
    return cfg.beta_ul * lgcp.lambda_bar * ul_integral(cfg)


def expected_i_dl(cfg: SystemConfig, lgcp: LgcpParams | None = None, r_max: float = math.inf) -> float:
    lgcp = lgcp or cfg.lgcp
    return cfg.beta_dl * lgcp.lambda_bar * dl_integral(cfg, r_max)


def var_i_dl(cfg: SystemConfig, lgcp: LgcpParams | None = None, r_max: float = math.inf) -> float:
    """DL interference variance: Campbell shot-noise term plus intensity-fluctuation term.

    A finite ``r_max`` gives the same expression over the truncated annulus.
    """
    lgcp = lgcp or cfg.lgcp
    eta = cfg.eta_nlos_dl
    b = cfg.beta_dl
    shot = b**2 * lgcp.lambda_bar / math.pi * (cfg.r0 ** (2 - 2 * eta) - r_max ** (2 - 2 * eta)) / (2 * eta - 2)
    fluct = b**2 * lgcp.lambda_bar**2 * math.expm1(lgcp.sigma0_sq) * dl_integral(cfg, r_max) ** 2
    return shot + fluct


def mean_product(cfg: SystemConfig, lgcp: LgcpParams | None = None, d: float = 0.0) -> float:
    lgcp = lgcp or cfg.lgcp
    xi = spatial_correlation(d, lgcp.k0)
    return (
        cfg.beta_ul * cfg.beta_dl * lgcp.lambda_bar**2 * math.exp(lgcp.sigma0_sq * xi)
        * dl_integral(cfg) * ul_integral(cfg)
    )


def cov_ul_dl(cfg: SystemConfig, lgcp: LgcpParams | None = None, d: float = 0.0) -> float:
    # E[I_ul I_dl] - E[I_ul]E[I_dl], written with expm1 to keep precision as xi -> 0
    lgcp = lgcp or cfg.lgcp
    xi = spatial_correlation(d, lgcp.k0)
    return expected_i_ul(cfg, lgcp) * expected_i_dl(cfg, lgcp) * math.expm1(lgcp.sigma0_sq * xi)


def rho_closed_form(cfg: SystemConfig, lgcp: LgcpParams | None = None, d: float = 0.0) -> float:
    """Second-order Taylor approximation of ``E[I_ul / I_dl]``."""
    return moments(cfg, lgcp, d).rho_closed


def moments(cfg: SystemConfig, lgcp: LgcpParams | None = None, d: float = 0.0) -> MomentSet:
    lgcp = lgcp or cfg.lgcp
    e_ul = expected_i_ul(cfg, lgcp)
    e_dl = expected_i_dl(cfg, lgcp)
    if not e_dl > 0:
        raise ValueError("E[I_dl] must be positive")
    var = var_i_dl(cfg, lgcp)
    cov = cov_ul_dl(cfg, lgcp, d)
    rho = e_ul / e_dl + e_ul * var / e_dl**3 - cov / e_dl**2
    return MomentSet(e_ul, e_dl, var, mean_product(cfg, lgcp, d), cov, rho)


def asymmetry_gap_db(cfg: SystemConfig, lgcp: LgcpParams | None = None, d: float = 0.0) -> float:
    """``rho_closed`` in dB minus ``E[I_ul]/E[I_dl]`` in dB."""
    m = moments(cfg, lgcp, d)
    return 10 * math.log10(m.rho_closed) - 10 * math.log10(m.mean_ratio)


def _quad(func, lo, hi, points=None, epsrel=1e-12):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(func, lo, hi, points=points, epsabs=0.0, epsrel=epsrel, limit=500)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quad on [{lo}, {hi}] did not converge: {exc}") from exc
    if not math.isfinite(val) or err > 1e3 * epsrel * abs(val):
        raise QuadratureError(f"quad on [{lo}, {hi}]: value={val!r} abserr={err!r}")
    return val


def quadrature_oracle_i_ul(
    cfg: SystemConfig,
    r_max: float = math.inf,
    los_prob=None,
    lgcp: LgcpParams | None = None,
) -> float:
    """Numerically integrate the UL Campbell integral in the 3-D distance.

    The ground-range Jacobian ``r dr = R dR`` is exact. ``los_prob`` replaces the
    break-point LoS model when given (a callable of ``R``). Relative tolerance
    is 1e-12 per sub-interval; a non-converging integral raises
    :class:`QuadratureError`.
    """
    lgcp = lgcp or cfg.lgcp
    H = cfg.altitude
    if los_prob is None:
        env = cfg.env

        def los_prob(R):
            return los_probability_breakpoint(R, H, env)

    eta_l, eta_n = cfg.eta_los_ul, cfg.eta_nlos_ul
    R0 = cfg.R0
    R_hi = math.hypot(r_max, H) if math.isfinite(r_max) else math.inf

    def integrand(R):
        p = los_prob(R)
        return R ** (1 - eta_l) * p + R ** (1 - eta_n) * (1 - p)

    cuts = [R0]
    bp = cfg.los_kappa * H
    if R0 < bp < R_hi:
        cuts.append(bp)
    if math.isfinite(R_hi):
        cuts.append(R_hi)
    else:
        # finite stretch past the break point before the infinite tail
        cuts.append(max(cuts[-1], R0) * 50)
    total = sum(_quad(integrand, lo, hi) for lo, hi in zip(cuts, cuts[1:]))
    if not math.isfinite(R_hi):
        total += _quad(integrand, cuts[-1], math.inf)
    return cfg.beta_ul * lgcp.lambda_bar * total


def quadrature_oracle_i_dl(cfg: SystemConfig, r_max: float = math.inf, lgcp: LgcpParams | None = None) -> float:
    lgcp = lgcp or cfg.lgcp
    eta = cfg.eta_nlos_dl
    val = _quad(lambda r: r ** (1 - eta), cfg.r0, r_max)
    return cfg.beta_dl * lgcp.lambda_bar * val


def truncated_cov(cfg: SystemConfig, lgcp: LgcpParams | None = None, d: float = 0.0,
                  r_max: float | None = None) -> float:
    """Covariance over the finite simulation annulus (quadrature means)."""
    lgcp = lgcp or cfg.lgcp
    r_max = cfg.r_max if r_max is None else r_max
    xi = spatial_correlation(d, lgcp.k0)
    return (
        quadrature_oracle_i_ul(cfg, r_max, lgcp=lgcp)
        * quadrature_oracle_i_dl(cfg, r_max, lgcp=lgcp)
        * math.expm1(lgcp.sigma0_sq * xi)
    )
