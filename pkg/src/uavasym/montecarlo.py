"""Snapshot simulation of correlated UL/DL aggregate interference.

Each snapshot draws a correlated (UL, DL) intensity pair, then two independent
Poisson fields on the annulus ``[r0, r_max]``: one around the UAV's ground
projection (UL, LoS/NLoS per interferer) and one around the RC (DL, NLoS).

Random streams
--------------
Batch runs use counter-based Philox streams keyed by the master seed:

* stream 0, one generator for the whole run, yields a ``(trials, 4)`` block of
  uniforms per trial (two log-intensity normals, two Poisson counts via the
  inverse CDF);
* streams 1 and 2, one generator per trial, yield the UL and DL interferer
  uniforms, interleaved per interferer.

Trial ``t`` therefore depends only on ``(seed, t)``: results do not depend on
the worker count, and reusing a seed across sweep points gives common random
numbers (a small change in intensity adds or removes a few interferers while
the rest stay put).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .channel import los_probability_breakpoint
from .config import SystemConfig
from .intensity import LgcpParams, log_intensities, sample_intensity_pair

_STREAM_INTENSITY, _STREAM_UL, _STREAM_DL = 0, 1, 2
_HALF_ULP = 2.0**-54


@dataclass(frozen=True)
class InterferenceSample:
    i_ul: float
    i_dl: float
    n_ul: int
    n_dl: int


@dataclass(frozen=True)
class SnapshotBatch:
    """Per-trial arrays, ordered by trial index."""

    i_ul: np.ndarray
    i_dl: np.ndarray
    n_ul: np.ndarray
    n_dl: np.ndarray
    lambda_ul: np.ndarray
    lambda_dl: np.ndarray

    def __len__(self):
        return len(self.i_dl)


@dataclass(frozen=True)
class RatioEstimate:
    rho_mc: float
    mean_ratio: float
    ci_halfwidth: float
    trials: int
    excluded: int = 0


@dataclass(frozen=True)
class CovEstimate:
    cov: float
    se: float
    trials: int


def annulus_area(cfg: SystemConfig) -> float:
    return math.pi * (cfg.r_max**2 - cfg.r0**2)


def _inv_pow(x2: np.ndarray, eta: float) -> np.ndarray:
    """``x**-eta`` given ``x**2``; fast paths for the usual exponents."""
    if eta == 2.0:
        return 1.0 / x2
    if eta == 3.0:
        return 1.0 / (x2 * np.sqrt(x2))
    if eta == 4.0:
        return 1.0 / (x2 * x2)
    return x2 ** (-0.5 * eta)


def _ground_r2(cfg: SystemConfig, u: np.ndarray) -> np.ndarray:
    # squared radius uniform in area over the annulus
    return cfg.r0**2 + u * (cfg.r_max**2 - cfg.r0**2)


def ul_interference(cfg: SystemConfig, u: np.ndarray) -> float:
    """Aggregate UL power from an ``(n, 3)`` block of uniforms.

    Columns: ground radius, LoS draw, fading (inverse CDF of Exp(1)).
    """
    if len(u) == 0:
        return 0.0
    H = cfg.altitude
    R2 = _ground_r2(cfg, u[:, 0]) + H * H
    p_los = los_probability_breakpoint(np.sqrt(R2), H, cfg.env)
    los = u[:, 1] < p_los
    gain = np.where(los, _inv_pow(R2, cfg.eta_los_ul), _inv_pow(R2, cfg.eta_nlos_ul))
    fading = -np.log1p(-u[:, 2])
    return cfg.ul_budget.kernel * float(np.dot(gain, fading))


def dl_interference(cfg: SystemConfig, u: np.ndarray) -> float:
    """Aggregate DL power from an ``(n, 2)`` block of uniforms (radius, fading)."""
    if len(u) == 0:
        return 0.0
    gain = _inv_pow(_ground_r2(cfg, u[:, 0]), cfg.eta_nlos_dl)
    fading = -np.log1p(-u[:, 1])
    return cfg.dl_budget.kernel * float(np.dot(gain, fading))


def sample_snapshot(cfg: SystemConfig, lgcp: LgcpParams | None, d: float,
                    rng: np.random.Generator) -> InterferenceSample:
    """One (I_ul, I_dl) snapshot drawn entirely from ``rng``."""
    lgcp = lgcp or cfg.lgcp
    pair = sample_intensity_pair(lgcp, d, rng)
    area = annulus_area(cfg)
    n_ul = int(rng.poisson(pair.lambda_ul * area))
    n_dl = int(rng.poisson(pair.lambda_dl * area))
    i_ul = ul_interference(cfg, rng.random((n_ul, 3)))
    i_dl = dl_interference(cfg, rng.random((n_dl, 2)))
    return InterferenceSample(i_ul, i_dl, n_ul, n_dl)


def _stream(seed: int, stream: int, trial: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, stream, trial]))


def draw_intensities(lgcp: LgcpParams, d: float, trials: int, seed: int, area: float):
    """Per-trial intensities and Poisson counts from stream 0."""
    u = _stream(seed, _STREAM_INTENSITY).random((trials, 4)) + _HALF_ULP
    z = special.ndtri(u[:, :2])
    g_ul, g_dl = log_intensities(lgcp, d, z[:, 0], z[:, 1])
    lam_ul, lam_dl = np.exp(g_ul), np.exp(g_dl)
    n_ul = stats.poisson.ppf(u[:, 2], lam_ul * area).astype(np.int64)
    n_dl = stats.poisson.ppf(u[:, 3], lam_dl * area).astype(np.int64)
    return lam_ul, lam_dl, n_ul, n_dl


def _run_chunk(cfg, seed, trial_ids, n_ul, n_dl, uplink, downlink):
    i_ul = np.zeros(len(trial_ids))
    i_dl = np.zeros(len(trial_ids))
    for k, t in enumerate(trial_ids):
        if uplink:
            i_ul[k] = ul_interference(cfg, _stream(seed, _STREAM_UL, t).random((n_ul[k], 3)))
        if downlink:
            i_dl[k] = dl_interference(cfg, _stream(seed, _STREAM_DL, t).random((n_dl[k], 2)))
    return i_ul, i_dl


def simulate(cfg: SystemConfig, lgcp: LgcpParams | None = None, d: float = 0.0,
             trials: int | None = None, seed: int | None = None, workers: int = 1,
             uplink: bool = True, downlink: bool = True) -> SnapshotBatch:
    """Run ``trials`` independent snapshots at UAV-RC distance ``d``.

    Disabling a link leaves its interference column at zero. Because trial
    streams are keyed by ``(seed, trial)``, a link that does not depend on the
    swept parameter (DL on altitude, UL on distance) is bit-identical across
    sweep points and can be simulated once.
    """
    lgcp = lgcp or cfg.lgcp
    trials = cfg.trials if trials is None else trials
    seed = cfg.seed if seed is None else seed
    if trials < 1:
        raise ValueError("trials must be >= 1")
    lam_ul, lam_dl, n_ul, n_dl = draw_intensities(lgcp, d, trials, seed, annulus_area(cfg))
    ids = np.arange(trials)
    if workers <= 1 or trials < 2 * workers:
        i_ul, i_dl = _run_chunk(cfg, seed, ids, n_ul, n_dl, uplink, downlink)
    else:
        parts = np.array_split(ids, 4 * workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, cfg, seed, p, n_ul[p], n_dl[p], uplink, downlink)
                       for p in parts]
            results = [f.result() for f in futures]
        i_ul = np.concatenate([r[0] for r in results])
        i_dl = np.concatenate([r[1] for r in results])
    return SnapshotBatch(i_ul, i_dl, n_ul, n_dl, lam_ul, lam_dl)


def ratio_from_batch(batch: SnapshotBatch) -> RatioEstimate:
    ok = batch.i_dl > 0
    excluded = int(np.count_nonzero(~ok))
    ratio = batch.i_ul[ok] / batch.i_dl[ok]
    n = len(ratio)
    if n < 2:
        raise ValueError("fewer than two snapshots with non-zero DL interference")
    rho = math.fsum(ratio) / n
    se = float(np.std(ratio, ddof=1)) / math.sqrt(n)
    mean_ratio = math.fsum(batch.i_ul[ok]) / math.fsum(batch.i_dl[ok])
    return RatioEstimate(rho, mean_ratio, 1.96 * se, n, excluded)


def cov_from_batch(batch: SnapshotBatch) -> CovEstimate:
    n = len(batch)
    if n < 2:
        raise ValueError("need at least two snapshots")
    x = batch.i_ul - math.fsum(batch.i_ul) / n
    y = batch.i_dl - math.fsum(batch.i_dl) / n
    prod = x * y
    return CovEstimate(math.fsum(prod) / (n - 1), float(np.std(prod, ddof=1)) / math.sqrt(n), n)


def mean_se(values: np.ndarray) -> tuple[float, float]:
    n = len(values)
    return math.fsum(values) / n, float(np.std(values, ddof=1)) / math.sqrt(n)


def estimate_ratio(cfg: SystemConfig, lgcp: LgcpParams | None = None, d: float = 0.0,
                   trials: int | None = None, seed: int | None = None, workers: int = 1) -> RatioEstimate:
    trials = cfg.trials if trials is None else trials
    if trials < 2:
        raise ValueError("trials must be >= 2")
    return ratio_from_batch(simulate(cfg, lgcp, d, trials, seed, workers))


def estimate_cov(cfg: SystemConfig, lgcp: LgcpParams | None = None, d: float = 0.0,
                 trials: int | None = None, seed: int | None = None, workers: int = 1) -> CovEstimate:
    trials = cfg.trials if trials is None else trials
    if trials < 2:
        raise ValueError("trials must be >= 2")
    return cov_from_batch(simulate(cfg, lgcp, d, trials, seed, workers))
