"""System configuration: radio constants, LGCP/LoS parameters, run controls.

Config files are flat ``key = value`` text (``#`` comments allowed). Every key
is optional and falls back to the default below; unknown keys are rejected.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, fields
from functools import cached_property
from pathlib import Path

from .channel import LinkBudget, LosEnvParams, db_to_linear
from .intensity import LgcpParams


class ConfigError(ValueError):
    """Invalid or unknown configuration value."""


# key -> help text; order is the order used when writing a config back out
KEY_DOCS = {
    "r0": "minimum horizontal interferer distance, m",
    "p_tx_interferer": "interferer transmit power, W",
    "p_tx_rc": "RC transmit power, W",
    "p_tx_uav": "UAV transmit power, W",
    "g_interferer_dbi": "interferer antenna gain, dBi",
    "g_rc_dbi": "RC antenna gain, dBi",
    "g_uav_dbi": "UAV antenna gain, dBi",
    "eta_los_ul": "UL LoS path-loss exponent",
    "eta_nlos_ul": "UL NLoS path-loss exponent",
    "eta_nlos_dl": "DL NLoS path-loss exponent",
    "freq_hz": "carrier frequency, Hz",
    "lambda_bar": "mean interferer density, nodes/m^2",
    "r_max": "outer radius of the simulated interferer annulus, m",
    "sigma0_sq": "log-intensity variance (model leaves this open)",
    "k0": "log-intensity correlation decay rate, 1/m (model leaves this open)",
    "los_mu": "break-point LoS decay fit",
    "los_kappa": "break-point LoS distance fit",
    "los_gamma": "building height scale, m (ITU-R urban default)",
    "los_delta": "built-up area ratio (ITU-R urban default)",
    "los_beta": "building density, buildings/km^2 (ITU-R urban default)",
    "altitude": "UAV altitude H, m",
    "walk_step": "random-walk grid spacing, m (model leaves this open)",
    "d_max": "maximum UAV-RC horizontal distance, m (model leaves this open)",
    "trials": "Monte-Carlo snapshots per sweep point",
    "seed": "master random seed",
}

REDUCED_LAMBDA_BAR = 2e-4


@dataclass(frozen=True)
class SystemConfig:
    r0: float = 20.0
    p_tx_interferer: float = 0.1
    p_tx_rc: float = 0.1
    p_tx_uav: float = 0.1
    g_interferer_dbi: float = 3.0
    g_rc_dbi: float = 6.0
    g_uav_dbi: float = 6.0
    eta_los_ul: float = 2.0
    eta_nlos_ul: float = 3.0
    eta_nlos_dl: float = 3.0
    freq_hz: float = 3.5e9
    lambda_bar: float = 0.02
    r_max: float = 3000.0
    sigma0_sq: float = 1.0
    k0: float = 0.05
    los_mu: float = 0.625
    los_kappa: float = 1.38
    los_gamma: float = 15.0
    los_delta: float = 0.3
    los_beta: float = 500.0
    altitude: float = 30.0
    walk_step: float = 10.0
    d_max: float = 100.0
    trials: int = 1000
    seed: int = 2024

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.type == "int":
                if isinstance(v, float) and v.is_integer():
                    object.__setattr__(self, f.name, int(v))
                elif not isinstance(v, int) or isinstance(v, bool):
                    raise ConfigError(f"{f.name} must be an integer, got {v!r}")
            elif not math.isfinite(float(v)):
                raise ConfigError(f"{f.name} must be finite, got {v!r}")
        if self.r0 <= 1.0:
            raise ConfigError("r0 must exceed 1 m")
        if self.r_max <= self.r0:
            raise ConfigError("r_max must exceed r0")
        if self.altitude <= 0:
            raise ConfigError("altitude must be > 0")
        if self.trials < 1 or self.seed < 0:
            raise ConfigError("trials must be >= 1 and seed >= 0")
        if self.walk_step <= 0 or self.d_max <= 0:
            raise ConfigError("walk_step and d_max must be > 0")
        try:
            self.lgcp, self.env, self.ul_budget, self.dl_budget
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def with_(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    @cached_property
    def lgcp(self) -> LgcpParams:
        return LgcpParams(self.lambda_bar, self.sigma0_sq, self.k0)

    @cached_property
    def env(self) -> LosEnvParams:
        return LosEnvParams(self.los_gamma, self.los_delta, self.los_beta, self.los_mu, self.los_kappa)

    @cached_property
    def ul_budget(self) -> LinkBudget:
        return LinkBudget(
            self.p_tx_interferer,
            db_to_linear(self.g_interferer_dbi),
            db_to_linear(self.g_uav_dbi),
            self.freq_hz,
            self.eta_los_ul,
            self.eta_nlos_ul,
            self.eta_nlos_dl,
        )

    @cached_property
    def dl_budget(self) -> LinkBudget:
        return LinkBudget(
            self.p_tx_interferer,
            db_to_linear(self.g_interferer_dbi),
            db_to_linear(self.g_rc_dbi),
            self.freq_hz,
            self.eta_los_ul,
            self.eta_nlos_ul,
            self.eta_nlos_dl,
        )

    @property
    def beta_ul(self) -> float:
        return self.ul_budget.beta

    @property
    def beta_dl(self) -> float:
        return self.dl_budget.beta

    @property
    def R0(self) -> float:
        """Minimum 3-D UAV-interferer distance."""
        return math.hypot(self.altitude, self.r0)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def dumps(self) -> str:
        lines = []
        for key in KEY_DOCS:
            lines.append(f"# {KEY_DOCS[key]}")
            lines.append(f"{key} = {getattr(self, key)!r}")
        return "\n".join(lines) + "\n"


_FIELD_TYPES = {f.name: f.type for f in fields(SystemConfig)}


def parse_config(text: str, base: SystemConfig | None = None) -> SystemConfig:
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",)
    )
    parser.optionxform = str
    try:
        parser.read_string("[system]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if parser.sections() != ["system"]:
        raise ConfigError("config must be flat key = value pairs without sections")
    values = {}
    for key, raw in parser.items("system"):
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key: {key!r}")
        try:
            values[key] = int(raw) if _FIELD_TYPES[key] == "int" else float(raw)
        except ValueError:
            raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return dataclasses.replace(base or SystemConfig(), **values)


def load_config(path: str | Path) -> SystemConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
