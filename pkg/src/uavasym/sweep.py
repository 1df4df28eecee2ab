"""Parameter sweeps over altitude and UAV-RC distance, plus the walk demo.

Every sweep point reuses the master seed, so neighbouring points share random
numbers and trends are not masked by independent noise.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import moments
from .channel import watts_to_dbm
from .config import SystemConfig
from .intensity import spatial_correlation
from .mobility import UavState, random_walk
from .montecarlo import _stream, cov_from_batch, mean_se, ratio_from_batch, simulate

CSV_COLUMNS = (
    "axis_value", "rho_mc", "rho_mc_ci", "rho_closed", "mean_ratio_mc", "mean_ratio_closed",
    "e_iul_dbm", "e_idl_dbm", "var_idl_db", "cov_mc", "cov_closed", "n_trials",
)
WALK_COLUMNS = ("step", "x", "y", "d", "xi", "cov_closed", "rho_closed")
_STREAM_WALK = 3


def _db(x: float) -> float | None:
    return 10.0 * math.log10(x) if x > 0 else None


def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _version_string() -> str:
    try:
        rev = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"], capture_output=True, text=True, timeout=5,
            cwd=Path(__file__).parent,
        ).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        rev = ""
    return f"{__version__}+{rev}" if rev else __version__


@dataclass
class SweepResult:
    axis: str
    values: list[float]
    records: list[dict]
    metadata: dict = field(default_factory=dict)
    columns: tuple[str, ...] = CSV_COLUMNS

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.records], dtype=float)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for rec in self.records:
            w.writerow([_fmt(rec[c]) for c in self.columns])
        return buf.getvalue()

    def write(self, out_dir: str | Path, stem: str) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
        csv_path.write_text(self.csv_text())
        json_path.write_text(json.dumps({"metadata": self.metadata, "records": self.records}, indent=2) + "\n")
        return csv_path, json_path


def point_record(cfg: SystemConfig, d: float, axis_value: float, trials: int, seed: int,
                 workers: int = 1, batch=None) -> dict:
    """Closed-form and Monte-Carlo quantities at one (altitude, distance) point."""
    if batch is None:
        batch = simulate(cfg, d=d, trials=trials, seed=seed, workers=workers)
    ratio = ratio_from_batch(batch)
    cov = cov_from_batch(batch)
    m = moments(cfg, d=d)
    e_ul_mc, _ = mean_se(batch.i_ul)
    e_dl_mc, _ = mean_se(batch.i_dl)
    return {
        "axis_value": float(axis_value),
        "altitude": cfg.altitude,
        "distance": float(d),
        "rho_mc": ratio.rho_mc,
        "rho_mc_ci": ratio.ci_halfwidth,
        "rho_closed": m.rho_closed,
        "mean_ratio_mc": ratio.mean_ratio,
        "mean_ratio_closed": m.mean_ratio,
        "rho_mc_db": _db(ratio.rho_mc),
        "rho_closed_db": _db(m.rho_closed),
        "mean_ratio_mc_db": _db(ratio.mean_ratio),
        "mean_ratio_closed_db": _db(m.mean_ratio),
        "e_iul_w": m.e_i_ul,
        "e_idl_w": m.e_i_dl,
        "e_iul_dbm": float(watts_to_dbm(m.e_i_ul)),
        "e_idl_dbm": float(watts_to_dbm(m.e_i_dl)),
        "e_iul_mc_w": e_ul_mc,
        "e_idl_mc_w": e_dl_mc,
        "e_iul_mc_dbm": float(watts_to_dbm(e_ul_mc)) if e_ul_mc > 0 else None,
        "e_idl_mc_dbm": float(watts_to_dbm(e_dl_mc)) if e_dl_mc > 0 else None,
        "var_idl_w2": m.var_i_dl,
        "var_idl_db": _db(m.var_i_dl),
        "cov_mc": cov.cov,
        "cov_mc_se": cov.se,
        "cov_closed": m.cov,
        "cov_closed_db": _db(m.cov),
        "cov_mc_db": _db(cov.cov),
        "n_trials": ratio.trials,
        "excluded": ratio.excluded,
    }


def _run(cfg, axis, values, make_point, workers, progress):
    if len(values) == 0:
        raise ValueError(f"empty {axis} list")
    t0 = time.perf_counter()
    records = []
    first = None
    for k, v in enumerate(values):
        point_cfg, d = make_point(v)
        if first is None:
            batch = first = simulate(point_cfg, d=d, trials=cfg.trials, seed=cfg.seed, workers=workers)
        elif axis == "altitude":
            batch = simulate(point_cfg, d=d, trials=cfg.trials, seed=cfg.seed, workers=workers, downlink=False)
            batch = dataclasses.replace(batch, i_dl=first.i_dl)
        else:
            batch = simulate(point_cfg, d=d, trials=cfg.trials, seed=cfg.seed, workers=workers, uplink=False)
            batch = dataclasses.replace(batch, i_ul=first.i_ul)
        records.append(point_record(point_cfg, d, v, cfg.trials, cfg.seed, batch=batch))
        if progress:
            progress(f"{axis}={v:g} done ({k + 1}/{len(values)})")
    meta = {
        "axis": axis,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "config_sha256": cfg.digest(),
        "config": cfg.to_dict(),
        "version": _version_string(),
        "wall_time_s": time.perf_counter() - t0,
        "power_units": "W and dBm (10*log10(W)+30); var_idl_db and cov_*_db are 10*log10 of W^2",
    }
    return SweepResult(axis, [float(v) for v in values], records, meta)


def run_altitude_sweep(cfg: SystemConfig, h_values, d_fixed: float, workers: int = 1,
                       progress=None) -> SweepResult:
    if any(h <= 0 for h in h_values):
        raise ValueError("altitudes must be > 0")
    res = _run(cfg, "altitude", list(h_values), lambda h: (cfg.with_(altitude=float(h)), d_fixed),
               workers, progress)
    res.metadata["fixed_distance"] = d_fixed
    return res


def run_distance_sweep(cfg: SystemConfig, d_values, h_fixed: float, workers: int = 1,
                       progress=None) -> SweepResult:
    if any(d < 0 for d in d_values):
        raise ValueError("distances must be >= 0")
    point_cfg = cfg.with_(altitude=float(h_fixed))
    res = _run(cfg, "distance", list(d_values), lambda d: (point_cfg, float(d)), workers, progress)
    res.metadata["fixed_altitude"] = h_fixed
    return res


def run_walk_demo(cfg: SystemConfig, steps: int, seed: int | None = None) -> SweepResult:
    """Random-walk trajectory with the induced correlation and closed-form moments."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    seed = cfg.seed if seed is None else seed
    state = UavState((0, 0), cfg.altitude, cfg.walk_step, cfg.d_max)
    path = random_walk(state, steps, _stream(seed, _STREAM_WALK))
    xy = path * cfg.walk_step
    d = np.hypot(xy[:, 0], xy[:, 1])
    xi = spatial_correlation(d, cfg.k0)
    m0 = moments(cfg, d=0.0)
    cov = m0.e_i_ul * m0.e_i_dl * np.expm1(cfg.sigma0_sq * xi)
    rho = m0.e_i_ul / m0.e_i_dl + m0.e_i_ul * m0.var_i_dl / m0.e_i_dl**3 - cov / m0.e_i_dl**2
    records = [
        {"step": t, "x": float(xy[t, 0]), "y": float(xy[t, 1]), "d": float(d[t]), "xi": float(xi[t]),
         "cov_closed": float(cov[t]), "rho_closed": float(rho[t])}
        for t in range(steps + 1)
    ]
    meta = {
        "axis": "step",
        "seed": seed,
        "steps": steps,
        "config_sha256": cfg.digest(),
        "config": cfg.to_dict(),
        "version": _version_string(),
        "max_distance": float(d.max()),
    }
    return SweepResult("step", list(range(steps + 1)), records, meta, WALK_COLUMNS)


def axis_values(lo: float, hi: float, step: float) -> list[float]:
    """Inclusive arithmetic grid ``lo, lo+step, ..., <= hi``."""
    if step <= 0:
        raise ValueError("step must be > 0")
    if hi < lo:
        raise ValueError("max must be >= min")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + k * step for k in range(n)]
