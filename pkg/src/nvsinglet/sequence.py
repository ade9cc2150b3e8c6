"""Pulse sequences: representation, default construction, execution and text I/O."""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .generator import build_generator
from .photophysics import (
    POPULATION_WAVELENGTH_NM,
    LaserField,
    LaserMode,
    LaserRole,
    Level,
    ModelRates,
    Regime,
    Scenario,
    StateVector,
    classify_regime,
)
from .propagator import SegmentResult, propagate, propagate_numeric

READOUT_POWER_MW = 0.1
READOUT_DURATION_US = 1.0
INIT_DURATION_US = 3.0
SETTLE_DURATION_US = 1.0
POPULATION_PULSE_US = 0.03
DEFAULT_DELAY_US = 0.03
IONIZATION_PULSE_US = 0.1
IONIZATION_POWER_MW = 5.0


def default_population_power(regime: Regime) -> float:
    # blue-range lasers leave the singlet alone during population, so it is pumped harder
    return 5.0 if Regime(regime) is Regime.BLUE else 2.0


def _check_duration(name, value):
    if not (np.isfinite(value) and value >= 0):
        raise ValueError(f"{name} must be a non-negative duration, got {value!r}")


@dataclass(frozen=True)
class Initialize:
    laser: LaserField
    duration: float = INIT_DURATION_US
    settle: float = SETTLE_DURATION_US

    def __post_init__(self):
        _check_duration("duration", self.duration)
        _check_duration("settle", self.settle)


@dataclass(frozen=True)
class PiPulse:
    pass


@dataclass(frozen=True)
class Pulse:
    laser: LaserField
    duration: float
    collect_pc: bool = False

    def __post_init__(self):
        _check_duration("duration", self.duration)


@dataclass(frozen=True)
class Delay:
    duration: float

    def __post_init__(self):
        _check_duration("duration", self.duration)


@dataclass(frozen=True)
class Readout:
    laser: LaserField
    duration: float = READOUT_DURATION_US

    def __post_init__(self):
        _check_duration("duration", self.duration)


SequenceStep = Union[Initialize, PiPulse, Pulse, Delay, Readout]


@dataclass(frozen=True)
class PulseSequence:
    steps: tuple
    scenario: Scenario | None = None

    def __post_init__(self):
        steps = tuple(self.steps)
        object.__setattr__(self, "steps", steps)
        if not steps:
            raise ValueError("a pulse sequence needs at least one step")
        if sum(isinstance(s, Pulse) and s.collect_pc for s in steps) > 1:
            raise ValueError("at most one step may collect photocurrent")
        pis = [i for i, s in enumerate(steps) if isinstance(s, PiPulse)]
        pulses = [i for i, s in enumerate(steps) if isinstance(s, Pulse)]
        if pis and pulses and max(pis) > min(pulses):
            raise ValueError("the pi pulse must precede every laser pulse")

    def with_scenario(self, scenario: Scenario) -> PulseSequence:
        return dataclasses.replace(self, scenario=scenario)

    @property
    def collect_index(self) -> int | None:
        for i, s in enumerate(self.steps):
            if isinstance(s, Pulse) and s.collect_pc:
                return i
        return None


def default_sequence(
    regime: Regime,
    ionization_laser: LaserField,
    scenario: Scenario | None,
    *,
    population_power: float | None = None,
    delay: float = DEFAULT_DELAY_US,
    ionization_duration: float = IONIZATION_PULSE_US,
) -> PulseSequence:
    """Six-step sequence: initialize, pi, populate, delay, ionize, read out."""
    regime = Regime(regime)
    actual = classify_regime(ionization_laser.wavelength_nm)
    if actual is not regime:
        raise ValueError(
            f"ionization wavelength {ionization_laser.wavelength_nm} nm is in the "
            f"{actual.value} regime, not {regime.value}"
        )
    if population_power is None:
        population_power = default_population_power(regime)
    green = LaserField(POPULATION_WAVELENGTH_NM, population_power)
    ion = ionization_laser.replace(role=LaserRole.IONIZATION)
    steps = (
        Initialize(green, INIT_DURATION_US, SETTLE_DURATION_US),
        PiPulse(),
        Pulse(green, POPULATION_PULSE_US),
        Delay(delay),
        Pulse(ion, ionization_duration, collect_pc=True),
        Readout(
            LaserField(POPULATION_WAVELENGTH_NM, READOUT_POWER_MW, role=LaserRole.READOUT),
            READOUT_DURATION_US,
        ),
    )
    return PulseSequence(steps, scenario)


def apply_pi_pulse(state: StateVector) -> StateVector:
    p = state.p.copy()
    p[Level.G0], p[Level.G1] = state.p[Level.G1], state.p[Level.G0]
    return state.with_populations(p)


class SequenceExecutionError(RuntimeError):
    def __init__(self, index: int, step, cause: Exception):
        super().__init__(f"step {index} ({type(step).__name__}) failed: {cause}")
        self.index = index
        self.step = step


@dataclass(frozen=True)
class SequenceReport:
    final_state: StateVector
    pre_readout_state: StateVector
    segments: tuple
    total_pc: float
    readout_photons: float
    has_collect_step: bool
    trajectory: list = field(default_factory=list)

    @property
    def nv_minus_fraction(self) -> float:
        return self.pre_readout_state.nv_minus


def run_sequence(
    seq: PulseSequence,
    rates: ModelRates,
    initial: StateVector | None = None,
    *,
    scenario: Scenario | None = None,
    method: str = "expm",
    step: float = 1e-4,
    stride: float | None = None,
) -> SequenceReport:
    """Execute ``seq`` step by step.

    ``scenario`` overrides the sequence's own.  ``method`` selects exact
    propagation ("expm") or the fixed-step RK4 oracle ("rk4" with ``step``).
    """
    scenario = scenario or seq.scenario
    if scenario is None:
        raise ValueError("no scenario given and the sequence carries none")
    if method not in ("expm", "rk4"):
        raise ValueError(f"unknown propagation method {method!r}")

    state = initial if initial is not None else StateVector.uniform()
    t = 0.0
    segments = []
    trajectory = []
    total_pc = 0.0
    photons = 0.0
    pre_readout = state

    def run(st, lasers, duration):
        g = build_generator(rates, lasers, scenario)
        if method == "rk4":
            if duration == 0:
                return SegmentResult(st)
            return propagate_numeric(st, g, duration, min(step, duration))
        return propagate(st, g, duration, stride=stride, t0=t)

    for i, s in enumerate(seq.steps):
        try:
            if isinstance(s, PiPulse):
                state = apply_pi_pulse(state)
                res = SegmentResult(state)
            elif isinstance(s, Initialize):
                first = run(state, [s.laser], s.duration)
                t += s.duration
                trajectory.extend(first.trajectory)
                second = run(first.final, [], s.settle)
                res = SegmentResult(
                    second.final,
                    first.delta_q + second.delta_q,
                    first.delta_f + second.delta_f,
                    first.trajectory + second.trajectory,
                )
                trajectory.extend(second.trajectory)
                t += s.settle
                state = res.final
            else:
                lasers = [] if isinstance(s, Delay) else [s.laser]
                res = run(state, lasers, s.duration)
                trajectory.extend(res.trajectory)
                t += s.duration
                state = res.final
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            raise SequenceExecutionError(i, s, exc) from exc
        segments.append(res)
        if isinstance(s, Pulse) and s.collect_pc:
            total_pc += res.delta_q
        if isinstance(s, Readout):
            photons += res.delta_f
        else:
            pre_readout = state

    return SequenceReport(
        final_state=state,
        pre_readout_state=pre_readout,
        segments=tuple(segments),
        total_pc=total_pc,
        readout_photons=photons,
        has_collect_step=seq.collect_index is not None,
        trajectory=trajectory,
    )


# --- text format -----------------------------------------------------------

_TIME_UNITS = {"ns": 1e-3, "us": 1.0, "µs": 1.0, "μs": 1.0, "ms": 1e3, "s": 1e6}
_POWER_UNITS = {"uW": 1e-3, "µW": 1e-3, "μW": 1e-3, "mW": 1.0, "W": 1e3}
_QUANTITY = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)([^\d.].*)?$")


class SequenceParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _quantity(token: str, kind: str, line_no: int) -> float:
    m = _QUANTITY.match(token)
    if not m:
        raise SequenceParseError(line_no, f"cannot read {kind} from {token!r}")
    value, unit = float(m.group(1)), (m.group(2) or "")
    if not unit:
        raise SequenceParseError(line_no, f"{kind} {token!r} is missing a unit suffix")
    if kind == "duration":
        scale = _TIME_UNITS.get(unit)
    elif kind == "power":
        scale = _POWER_UNITS.get(unit)
    else:
        scale = 1.0 if unit == "nm" else None
    if scale is None:
        raise SequenceParseError(line_no, f"unknown {kind} unit {unit!r} in {token!r}")
    return value * scale


def parse_quantity(token: str, kind: str) -> float:
    """Read ``"594nm"``, ``"5mW"`` or ``"30ns"`` into base units (nm, mW, us)."""
    try:
        return _quantity(token, kind, 0)
    except SequenceParseError as exc:
        raise ValueError(str(exc).removeprefix("line 0: ")) from None


def _split_options(tokens, allowed, line_no):
    positional, options = [], {}
    for tok in tokens:
        if "=" in tok:
            key, _, val = tok.partition("=")
            if key not in allowed:
                raise SequenceParseError(line_no, f"unknown option {key!r}")
            if key in options:
                raise SequenceParseError(line_no, f"option {key!r} given twice")
            options[key] = val
        else:
            positional.append(tok)
    return positional, options


def _expect(positional, n, keyword, line_no):
    if len(positional) != n:
        raise SequenceParseError(
            line_no, f"{keyword!r} takes {n} arguments, got {len(positional)}"
        )


def parse_sequence(text: str) -> PulseSequence:
    """Parse the line-oriented sequence format.

    ::

        init 532nm 2mW 3us settle=1us
        pi
        pulse 532nm 2mW 30ns
        delay 30ns
        pulse 650nm 5mW 100ns collect=pc
        readout 532nm 100uW 1us

    An optional ``scenario 660nm red`` line attaches a threshold hypothesis,
    and ``mode=pulsed`` marks a short-pulsed laser.
    """
    steps = []
    scenario = None
    collect_line = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *rest = line.split()
        keyword = keyword.lower()
        try:
            if keyword == "pi":
                _expect(rest, 0, keyword, line_no)
                steps.append(PiPulse())
            elif keyword == "delay":
                _expect(rest, 1, keyword, line_no)
                steps.append(Delay(_quantity(rest[0], "duration", line_no)))
            elif keyword == "scenario":
                if scenario is not None:
                    raise SequenceParseError(line_no, "scenario given twice")
                if len(rest) not in (1, 2):
                    raise SequenceParseError(line_no, "'scenario' takes a wavelength and a curve label")
                scenario = Scenario(
                    _quantity(rest[0], "wavelength", line_no),
                    rest[1] if len(rest) == 2 else "red",
                )
            elif keyword in ("init", "pulse", "readout"):
                allowed = {
                    "init": {"settle", "mode"},
                    "pulse": {"collect", "mode"},
                    "readout": {"mode"},
                }[keyword]
                pos, opts = _split_options(rest, allowed, line_no)
                _expect(pos, 3, keyword, line_no)
                wl = _quantity(pos[0], "wavelength", line_no)
                power = _quantity(pos[1], "power", line_no)
                duration = _quantity(pos[2], "duration", line_no)
                mode = opts.get("mode", LaserMode.CONTINUOUS.value)
                if mode == "pulsed":
                    mode = LaserMode.SHORT_PULSED.value
                if mode not in ("continuous", "cw", LaserMode.SHORT_PULSED.value):
                    raise SequenceParseError(line_no, f"unknown laser mode {mode!r}")
                mode = LaserMode.CONTINUOUS if mode == "cw" else LaserMode(mode)
                if keyword == "init":
                    settle = _quantity(opts["settle"], "duration", line_no) if "settle" in opts else SETTLE_DURATION_US
                    steps.append(Initialize(LaserField(wl, power, mode), duration, settle))
                elif keyword == "readout":
                    steps.append(Readout(LaserField(wl, power, mode, LaserRole.READOUT), duration))
                else:
                    collect = opts.get("collect")
                    if collect not in (None, "pc"):
                        raise SequenceParseError(line_no, f"unknown collect target {collect!r}")
                    if collect and collect_line is not None:
                        raise SequenceParseError(
                            line_no, f"collect=pc already set on line {collect_line}"
                        )
                    if collect:
                        collect_line = line_no
                    role = LaserRole.IONIZATION if collect else LaserRole.POPULATION
                    steps.append(Pulse(LaserField(wl, power, mode, role), duration, bool(collect)))
            else:
                raise SequenceParseError(line_no, f"unknown keyword {keyword!r}")
        except SequenceParseError:
            raise
        except ValueError as exc:
            raise SequenceParseError(line_no, str(exc)) from exc
    try:
        return PulseSequence(tuple(steps), scenario)
    except ValueError as exc:
        raise SequenceParseError(0, str(exc)) from exc


def _num(x: float) -> str:
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def _laser_tokens(laser: LaserField) -> list[str]:
    return [f"{_num(laser.wavelength_nm)}nm", f"{_num(laser.power_mw)}mW"]


def _mode_token(laser: LaserField) -> list[str]:
    return ["mode=pulsed"] if laser.pulsed else []


def format_sequence(seq: PulseSequence) -> str:
    """Render ``seq`` in the text format (base units, exact round trip)."""
    lines = []
    if seq.scenario is not None:
        lines.append(f"scenario {_num(seq.scenario.lambda_s_nm)}nm {seq.scenario.curve.value}")
    for s in seq.steps:
        if isinstance(s, PiPulse):
            lines.append("pi")
        elif isinstance(s, Delay):
            lines.append(f"delay {_num(s.duration)}us")
        elif isinstance(s, Initialize):
            lines.append(" ".join(
                ["init", *_laser_tokens(s.laser), f"{_num(s.duration)}us",
                 f"settle={_num(s.settle)}us", *_mode_token(s.laser)]
            ))
        elif isinstance(s, Pulse):
            tokens = ["pulse", *_laser_tokens(s.laser), f"{_num(s.duration)}us"]
            if s.collect_pc:
                tokens.append("collect=pc")
            lines.append(" ".join(tokens + _mode_token(s.laser)))
        elif isinstance(s, Readout):
            lines.append(" ".join(
                ["readout", *_laser_tokens(s.laser), f"{_num(s.duration)}us", *_mode_token(s.laser)]
            ))
    return "\n".join(lines) + "\n"
