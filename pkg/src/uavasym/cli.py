"""Command-line runner.

Exit codes: 0 success, 2 usage or config error, 3 numeric failure (including
a failed ``validate`` check).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import analytic as an
from . import montecarlo as mc
from .config import REDUCED_LAMBDA_BAR, ConfigError, SystemConfig, load_config
from .sweep import axis_values, run_altitude_sweep, run_distance_sweep, run_walk_demo

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key = value config file")
    p.add_argument("--trials", type=int, help="Monte-Carlo snapshots per point")
    p.add_argument("--seed", type=int, help="master random seed")
    p.add_argument("--out", type=Path, help="output directory (default: results)")
    p.add_argument("--stdout", action="store_true", help="write the CSV to standard output")
    p.add_argument("--workers", type=int, default=1, help="worker processes for trials")
    p.add_argument("--reduced-density", action="store_true",
                   help=f"override lambda_bar with {REDUCED_LAMBDA_BAR:g} nodes/m^2 for quick runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavasym", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("altitude-sweep", help="rho_I and covariance versus UAV altitude")
    _common(p)
    p.add_argument("--h-min", type=float, default=30.0)
    p.add_argument("--h-max", type=float, default=120.0)
    p.add_argument("--h-step", type=float, default=10.0)
    p.add_argument("--fixed-d", type=float, default=30.0, help="UAV-RC horizontal distance, m")

    p = sub.add_parser("distance-sweep", help="rho_I and covariance versus UAV-RC distance")
    _common(p)
    p.add_argument("--d-min", type=float, default=0.0)
    p.add_argument("--d-max", type=float, default=100.0)
    p.add_argument("--d-step", type=float, default=10.0)
    p.add_argument("--fixed-h", type=float, default=30.0, help="UAV altitude, m")

    p = sub.add_parser("walk-demo", help="random-walk trajectory with induced correlation")
    _common(p)
    p.add_argument("--steps", type=int, default=100)

    p = sub.add_parser("validate", help="closed-form vs quadrature vs Monte-Carlo checks")
    _common(p)

    p = sub.add_parser("show-config", help="print the effective configuration")
    _common(p)
    return parser


def effective_config(args) -> SystemConfig:
    cfg = load_config(args.config) if args.config else SystemConfig()
    changes = {}
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.reduced_density:
        changes["lambda_bar"] = REDUCED_LAMBDA_BAR
    return cfg.with_(**changes) if changes else cfg


def _emit(result, args, stem: str) -> None:
    if args.stdout:
        sys.stdout.write(result.csv_text())
    if args.out is not None or not args.stdout:
        csv_path, json_path = result.write(args.out or Path("results"), stem)
        _progress(f"wrote {csv_path} and {json_path}")


def validation_checks(cfg: SystemConfig, trials: int | None = None):
    """Yield ``(name, passed, detail)`` rows for the consistency table."""
    for H in (21.0, 30.0, 60.0, 90.0, 120.0):
        c = cfg.with_(altitude=H)
        closed, quad = an.expected_i_ul(c), an.quadrature_oracle_i_ul(c)
        rel = abs(closed - quad) / quad
        yield f"E[I_ul] closed vs quadrature, H={H:g}", rel <= 1e-6, f"rel={rel:.2e}"
    closed, quad = an.expected_i_dl(cfg), an.quadrature_oracle_i_dl(cfg)
    rel = abs(closed - quad) / quad
    yield "E[I_dl] closed vs quadrature", rel <= 1e-6, f"rel={rel:.2e}"

    kappa = cfg.los_kappa
    if kappa > 1:
        c = cfg.with_(altitude=cfg.r0 / math.sqrt(kappa**2 - 1))
        near, far = an.ul_integral(c, "near"), an.ul_integral(c, "far")
        rel = abs(near - far) / abs(far)
        yield "E[I_ul] branch continuity at kappa*H = R0", rel <= 1e-9, f"rel={rel:.2e}"

    from scipy import integrate

    for s in (0.0, -1.0, 1.0):
        for a in (0.1, 0.8625, 5.0):
            ref, _ = integrate.quad(lambda x: x ** (s - 1) * math.exp(-x), a, math.inf,
                                    epsabs=0.0, epsrel=1e-13, limit=500)
            rel = abs(an.upper_incomplete_gamma(s, a) - ref) / ref
            yield f"Gamma({s:g}, {a:g}) vs quadrature", rel <= 1e-10, f"rel={rel:.2e}"

    mc_cfg = cfg.with_(lambda_bar=min(cfg.lambda_bar, REDUCED_LAMBDA_BAR))
    n = trials or min(mc_cfg.trials, 4000)
    for H in (30.0, 60.0, 120.0):
        c = mc_cfg.with_(altitude=H)
        batch = mc.simulate(c, d=30.0, trials=n, seed=c.seed)
        for name, vals, oracle in (
            ("I_ul", batch.i_ul, an.quadrature_oracle_i_ul(c, c.r_max)),
            ("I_dl", batch.i_dl, an.quadrature_oracle_i_dl(c, c.r_max)),
        ):
            m, se = mc.mean_se(vals)
            z = (m - oracle) / se
            yield f"MC mean {name} vs truncated oracle, H={H:g}", abs(z) <= 3, f"z={z:+.2f}"
    batch = mc.simulate(mc_cfg, d=0.0, trials=n, seed=mc_cfg.seed)
    cov = mc.cov_from_batch(batch)
    ref = an.truncated_cov(mc_cfg, d=0.0)
    z = (cov.cov - ref) / cov.se
    yield "MC Cov(I_ul, I_dl) vs truncated closed form, d=0", abs(z) <= 3, f"z={z:+.2f}"


def cmd_validate(cfg: SystemConfig, args) -> int:
    rows = []
    for name, ok, detail in validation_checks(cfg, args.trials):
        rows.append((name, ok, detail))
        _progress(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    width = max(len(r[0]) for r in rows)
    out = sys.stdout
    out.write(f"{'check'.ljust(width)}  result  detail\n")
    for name, ok, detail in rows:
        out.write(f"{name.ljust(width)}  {'PASS' if ok else 'FAIL':6}  {detail}\n")
    failed = sum(not ok for _, ok, _ in rows)
    out.write(f"{len(rows) - failed}/{len(rows)} checks passed\n")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = effective_config(args)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if args.verb == "show-config":
            sys.stdout.write(cfg.dumps())
        elif args.verb == "altitude-sweep":
            hs = axis_values(args.h_min, args.h_max, args.h_step)
            _emit(run_altitude_sweep(cfg, hs, args.fixed_d, args.workers, _progress), args, "altitude_sweep")
        elif args.verb == "distance-sweep":
            ds = axis_values(args.d_min, args.d_max, args.d_step)
            _emit(run_distance_sweep(cfg, ds, args.fixed_h, args.workers, _progress), args, "distance_sweep")
        elif args.verb == "walk-demo":
            _emit(run_walk_demo(cfg, args.steps), args, "walk_demo")
        elif args.verb == "validate":
            return cmd_validate(cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (an.QuadratureError, ArithmeticError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
