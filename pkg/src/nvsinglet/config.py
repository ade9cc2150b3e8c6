"""Run configuration: the rate ledger plus run options, read from TOML.

Example::

    [rates]
    gamma_rad_mhz = 66.0
    sigma_s_mhz_per_mw = 0.3

    [scenario]
    lambda_s_nm = 660.0
    curve = "red"

    [run]
    out_dir = "out"
    stride_us = 0.01
    workers = 4
    plot = false
"""

from __future__ import annotations

import dataclasses
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .photophysics import DEFAULT_RATES, ModelRates, Scenario

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

RATE_KEYS = {
    "gamma_rad": "gamma_rad_mhz",
    "gamma_isc0": "gamma_isc0_mhz",
    "gamma_isc1": "gamma_isc1_mhz",
    "gamma_s": "gamma_s_mhz",
    "beta_s0": "beta_s0",
    "gamma_n": "gamma_n_mhz",
    "sigma_abs_minus": "sigma_abs_minus_mhz_per_mw",
    "sigma_abs_zero": "sigma_abs_zero_mhz_per_mw",
    "sigma_ion": "sigma_ion_mhz_per_mw",
    "sigma_rec": "sigma_rec_mhz_per_mw",
    "sigma_stim": "sigma_stim_mhz_per_mw",
    "sigma_s": "sigma_s_mhz_per_mw",
}
_RUN_KEYS = {"out_dir", "stride_us", "workers", "plot"}
_SCENARIO_KEYS = {"lambda_s_nm", "curve"}


class ConfigError(ValueError):
    def __init__(self, key_path: str, message: str):
        super().__init__(f"{key_path}: {message}")
        self.key_path = key_path


@dataclass(frozen=True)
class RunConfig:
    rates: ModelRates = DEFAULT_RATES
    scenario: Scenario | None = None
    out_dir: Path = Path("out")
    stride: float = 0.01
    workers: int = 1
    plot: bool = False
    filled: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not (isinstance(self.workers, int) and self.workers >= 1):
            raise ConfigError("run.workers", f"must be an integer >= 1, got {self.workers!r}")
        if not self.stride > 0:
            raise ConfigError("run.stride_us", f"must be positive, got {self.stride!r}")
        object.__setattr__(self, "out_dir", Path(self.out_dir))

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)


def _number(value, key_path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key_path, f"expected a number, got {value!r}")
    return float(value)


def _table(data, name):
    table = data.get(name, {})
    if not isinstance(table, dict):
        raise ConfigError(name, "expected a table")
    return table


def _unknown(table, allowed, prefix):
    for key in table:
        if key not in allowed:
            raise ConfigError(f"{prefix}.{key}", "unknown key")


def parse_config(data: dict) -> RunConfig:
    for key in data:
        if key not in ("rates", "scenario", "run"):
            raise ConfigError(key, "unknown section")

    rates_table = _table(data, "rates")
    _unknown(rates_table, set(RATE_KEYS.values()), "rates")
    values, filled = {}, []
    for name, key in RATE_KEYS.items():
        path = f"rates.{key}"
        if key in rates_table:
            v = _number(rates_table[key], path)
            if v < 0:
                raise ConfigError(path, f"{name} must be non-negative, got {v!r}")
            values[name] = v
        else:
            values[name] = getattr(DEFAULT_RATES, name)
            filled.append(key)
    for key in filled:
        log.warning("rates.%s not set; using default %r", key, values[_field_for(key)])
    try:
        rates = ModelRates(**values)
    except ValueError as exc:
        raise ConfigError("rates", str(exc)) from exc

    scen_table = _table(data, "scenario")
    _unknown(scen_table, _SCENARIO_KEYS, "scenario")
    scenario = None
    if scen_table:
        if "lambda_s_nm" not in scen_table:
            raise ConfigError("scenario.lambda_s_nm", "required when [scenario] is present")
        try:
            scenario = Scenario(
                _number(scen_table["lambda_s_nm"], "scenario.lambda_s_nm"),
                scen_table.get("curve", "red"),
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("scenario", str(exc)) from exc

    run = _table(data, "run")
    _unknown(run, _RUN_KEYS, "run")
    kwargs = {}
    if "out_dir" in run:
        if not isinstance(run["out_dir"], str):
            raise ConfigError("run.out_dir", "expected a string path")
        kwargs["out_dir"] = Path(run["out_dir"])
    if "stride_us" in run:
        kwargs["stride"] = _number(run["stride_us"], "run.stride_us")
    if "workers" in run:
        if isinstance(run["workers"], bool) or not isinstance(run["workers"], int):
            raise ConfigError("run.workers", f"expected an integer, got {run['workers']!r}")
        kwargs["workers"] = run["workers"]
    if "plot" in run:
        if not isinstance(run["plot"], bool):
            raise ConfigError("run.plot", "expected true or false")
        kwargs["plot"] = run["plot"]
    return RunConfig(rates=rates, scenario=scenario, filled=tuple(filled), **kwargs)


def _field_for(key: str) -> str:
    return next(name for name, k in RATE_KEYS.items() if k == key)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc}") from exc
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"malformed TOML: {exc}") from exc
    return parse_config(data)


def dump_rates(rates: ModelRates) -> str:
    """The ledger as a ``[rates]`` TOML table."""
    lines = ["[rates]"]
    for name, key in RATE_KEYS.items():
        lines.append(f"{key} = {getattr(rates, name)!r}")
    return "\n".join(lines) + "\n"


def banner(config: RunConfig) -> str:
    r = config.rates
    tau_s_ns = 1e3 / r.gamma_s if r.gamma_s > 0 else float("inf")
    parts = [
        f"gamma_rad={r.gamma_rad:g} MHz",
        f"isc={r.gamma_isc0:g}/{r.gamma_isc1:g} MHz",
        f"tau_s={tau_s_ns:.0f} ns",
        f"sigma_ion={r.sigma_ion:g}",
        f"sigma_rec={r.sigma_rec:g}",
        f"sigma_s={r.sigma_s:g} MHz/mW",
    ]
    return "rate ledger: " + ", ".join(parts)
