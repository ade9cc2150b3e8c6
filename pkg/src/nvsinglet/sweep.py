"""Parameter sweeps producing paired red/blue curves, and the full figure suite."""

from __future__ import annotations

import enum
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .observables import CurvePoint, ObservableChannel, extract
from .photophysics import (
    Curve,
    LaserField,
    LaserMode,
    LaserRole,
    ModelRates,
    Regime,
    Scenario,
    classify_regime,
)
from .sequence import (
    DEFAULT_DELAY_US,
    INIT_DURATION_US,
    IONIZATION_POWER_MW,
    IONIZATION_PULSE_US,
    POPULATION_PULSE_US,
    POPULATION_WAVELENGTH_NM,
    READOUT_DURATION_US,
    READOUT_POWER_MW,
    SETTLE_DURATION_US,
    default_population_power,
    default_sequence,
    run_sequence,
)


class SweepAxis(str, enum.Enum):
    POPULATION_POWER = "population_power"
    IONIZATION_POWER = "ionization_power"
    SINGLET_CROSS_SECTION = "singlet_cross_section"
    DELAY = "delay"
    IONIZATION_DURATION = "ionization_duration"

    @property
    def unit(self) -> str:
        return _AXIS_UNITS[self]

    def default_grid(self) -> np.ndarray:
        if self in (SweepAxis.POPULATION_POWER, SweepAxis.IONIZATION_POWER):
            return np.geomspace(0.01, 30.0, 24)
        if self is SweepAxis.SINGLET_CROSS_SECTION:
            return np.geomspace(0.01, 3.0, 24)
        if self is SweepAxis.DELAY:
            return np.linspace(0.0, 1.5, 32)
        return np.geomspace(0.001, 1.0, 32)


_AXIS_UNITS = {
    SweepAxis.POPULATION_POWER: "mW",
    SweepAxis.IONIZATION_POWER: "mW",
    SweepAxis.SINGLET_CROSS_SECTION: "MHz/mW",
    SweepAxis.DELAY: "us",
    SweepAxis.IONIZATION_DURATION: "us",
}


@dataclass(frozen=True)
class FigureSpec:
    """One figure: a regime, a readout channel and the two threshold hypotheses.

    ``lambda_s_red`` sits at or above the ionization wavelength (singlet
    ionized), ``lambda_s_blue`` below it.
    """

    regime: Regime
    channel: ObservableChannel
    lambda_s_red: float
    lambda_s_blue: float
    ionization_wavelength: float
    ionization_power: float = IONIZATION_POWER_MW
    population_power: float | None = None
    delay: float = DEFAULT_DELAY_US
    ionization_duration: float = IONIZATION_PULSE_US
    pulsed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        object.__setattr__(self, "channel", ObservableChannel(self.channel))
        if not self.lambda_s_red >= self.ionization_wavelength > self.lambda_s_blue:
            raise ValueError(
                "need lambda_s_red >= ionization wavelength > lambda_s_blue, got "
                f"{self.lambda_s_red}, {self.ionization_wavelength}, {self.lambda_s_blue}"
            )
        if classify_regime(self.ionization_wavelength) is not self.regime:
            raise ValueError(
                f"{self.ionization_wavelength} nm does not lie in the {self.regime.value} regime"
            )

    @property
    def name(self) -> str:
        return f"{self.channel.value}_{self.regime.value}"

    @property
    def effective_population_power(self) -> float:
        if self.population_power is None:
            return default_population_power(self.regime)
        return self.population_power

    def scenario(self, curve: Curve | str) -> Scenario:
        curve = Curve(curve)
        lam = self.lambda_s_red if curve is Curve.RED else self.lambda_s_blue
        return Scenario(lam, curve)

    def with_channel(self, channel) -> FigureSpec:
        return replace(self, channel=ObservableChannel(channel))


# ionization wavelength, lambda_s for the red curve, lambda_s for the blue curve
REGIME_WAVELENGTHS = {
    Regime.RED: (650.0, 660.0, 640.0),
    Regime.ORANGE: (600.0, 610.0, 590.0),
    Regime.GREEN: (550.0, 560.0, 540.0),
    Regime.BLUE: (510.0, 520.0, 500.0),
}


def default_figure_spec(regime, channel=ObservableChannel.POPULATION, **overrides) -> FigureSpec:
    regime = Regime(regime)
    wl, red, blue = REGIME_WAVELENGTHS[regime]
    fields = {"lambda_s_red": red, "lambda_s_blue": blue, "ionization_wavelength": wl}
    fields.update(overrides)
    return FigureSpec(regime=regime, channel=channel, **fields)


def default_figure_specs() -> list[FigureSpec]:
    return [
        default_figure_spec(regime, channel)
        for channel in ObservableChannel
        for regime in Regime
    ]


def build_point(spec: FigureSpec, rates: ModelRates, axis=None, x=None):
    """Sequence and rate ledger for one grid value (or the unswept default)."""
    ion_power = spec.ionization_power
    pop_power = spec.effective_population_power
    delay = spec.delay
    duration = spec.ionization_duration
    if axis is not None:
        axis = SweepAxis(axis)
        x = float(x)
        if axis is SweepAxis.POPULATION_POWER:
            pop_power = x
        elif axis is SweepAxis.IONIZATION_POWER:
            ion_power = x
        elif axis is SweepAxis.SINGLET_CROSS_SECTION:
            rates = rates.replace(sigma_s=x)
        elif axis is SweepAxis.DELAY:
            delay = x
        else:
            duration = x
    mode = LaserMode.SHORT_PULSED if spec.pulsed else LaserMode.CONTINUOUS
    laser = LaserField(spec.ionization_wavelength, ion_power, mode, LaserRole.IONIZATION)
    seq = default_sequence(
        spec.regime, laser, None,
        population_power=pop_power, delay=delay, ionization_duration=duration,
    )
    return seq, rates


def evaluate(spec: FigureSpec, rates: ModelRates, axis=None, x=None) -> tuple[float, float]:
    """(red-curve, blue-curve) observable for one grid value."""
    seq, r = build_point(spec, rates, axis, x)
    out = []
    for curve in (Curve.RED, Curve.BLUE):
        report = run_sequence(seq, r, scenario=spec.scenario(curve))
        out.append(extract(report, spec.channel))
    return out[0], out[1]


def _evaluate_task(task):
    spec, rates, axis, x = task
    try:
        return evaluate(spec, rates, axis, x)
    except Exception as exc:
        raise RuntimeError(f"{spec.name}/{axis.value} failed at x={x!r}: {exc}") from exc


def _map(tasks, workers: int):
    if workers <= 1 or len(tasks) < 2:
        return [_evaluate_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def sweep(
    axis: SweepAxis | str,
    spec: FigureSpec,
    rates: ModelRates,
    grid=None,
    workers: int = 1,
) -> list[CurvePoint]:
    axis = SweepAxis(axis)
    grid = axis.default_grid() if grid is None else np.asarray(grid, dtype=float)
    tasks = [(spec, rates, axis, float(x)) for x in grid]
    values = _map(tasks, workers)
    return [
        CurvePoint.from_values(x, yr, yb, spec.channel)
        for x, (yr, yb) in zip(grid, values)
    ]


# --- figure suite ----------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def curve_csv(points, axis: SweepAxis, spec: FigureSpec, curve: Curve) -> str:
    lam = spec.lambda_s_red if curve is Curve.RED else spec.lambda_s_blue
    lines = [
        f"# axis={axis.value}",
        f"# unit={axis.unit}",
        f"# regime={spec.regime.value}",
        f"# channel={spec.channel.value}",
        f"# curve={curve.value}",
        f"# lambda_s_nm={_fmt(lam)}",
        f"# ionization_wavelength_nm={_fmt(spec.ionization_wavelength)}",
        "x,y",
    ]
    for pt in points:
        y = pt.y_red if curve is Curve.RED else pt.y_blue
        lines.append(f"{_fmt(pt.x)},{_fmt(y)}")
    return "\n".join(lines) + "\n"


def read_curve_csv(path) -> tuple[dict, np.ndarray, np.ndarray]:
    meta, xs, ys = {}, [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key] = val
            elif line and line != "x,y":
                x, y = line.split(",")
                xs.append(float(x))
                ys.append(float(y))
    return meta, np.array(xs), np.array(ys)


def curve_filename(spec: FigureSpec, axis: SweepAxis, curve: Curve) -> str:
    return f"{spec.channel.value}_{spec.regime.value}_{axis.value}_{curve.value}.csv"


def _spec_record(spec: FigureSpec) -> dict:
    return {
        "regime": spec.regime.value,
        "channel": spec.channel.value,
        "ionization_wavelength_nm": spec.ionization_wavelength,
        "ionization_power_mw": spec.ionization_power,
        "ionization_mode": "short_pulsed" if spec.pulsed else "continuous",
        "ionization_duration_us": spec.ionization_duration,
        "population_wavelength_nm": POPULATION_WAVELENGTH_NM,
        "population_power_mw": spec.effective_population_power,
        "population_pulse_us": POPULATION_PULSE_US,
        "delay_us": spec.delay,
        "init_duration_us": INIT_DURATION_US,
        "settle_duration_us": SETTLE_DURATION_US,
        "readout_power_mw": READOUT_POWER_MW,
        "readout_duration_us": READOUT_DURATION_US,
    }


def figure_suite(
    rates: ModelRates,
    out_dir,
    workers: int = 1,
    specs: list[FigureSpec] | None = None,
    axes=None,
) -> dict:
    """Write every curve CSV plus ``manifest.json``; returns the manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not os.access(out_dir, os.W_OK):
        raise PermissionError(f"output directory {out_dir} is not writable")
    specs = default_figure_specs() if specs is None else list(specs)
    axes = list(SweepAxis) if axes is None else [SweepAxis(a) for a in axes]

    tasks, index = [], []
    for spec in specs:
        for axis in axes:
            grid = axis.default_grid()
            index.append((spec, axis, grid, len(tasks)))
            tasks.extend((spec, rates, axis, float(x)) for x in grid)
    values = _map(tasks, workers)

    curves = []
    for spec, axis, grid, start in index:
        points = [
            CurvePoint.from_values(x, *values[start + i], spec.channel)
            for i, x in enumerate(grid)
        ]
        for curve in Curve:
            name = curve_filename(spec, axis, curve)
            path = out_dir / name
            try:
                path.write_text(curve_csv(points, axis, spec, curve), encoding="utf-8")
            except OSError as exc:
                raise OSError(f"could not write {path}: {exc}") from exc
            lam = spec.lambda_s_red if curve is Curve.RED else spec.lambda_s_blue
            curves.append({
                "file": name,
                "figure": spec.name,
                "axis": axis.value,
                "unit": axis.unit,
                "curve": curve.value,
                "lambda_s_nm": lam,
                "points": len(grid),
                **_spec_record(spec),
            })

    manifest = {"rates": rates.as_dict(), "curves": curves}
    path = out_dir / "manifest.json"
    try:
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
    return manifest
