"""Level scheme, rate ledger, lasers and wavelength gating for the NV center.

Units throughout the package: time in microseconds, rates in MHz, laser power
in mW and optical cross sections in MHz/mW (a laser-induced rate is the cross
section times the power).
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass

import numpy as np

HC_EV_NM = 1239.84193

NV_MINUS_ZPL_NM = 637.0
NV_ZERO_ZPL_NM = 575.0
POPULATION_WAVELENGTH_NM = 532.0
IONIZATION_RANGE_NM = (477.0, 674.0)


class Level(enum.IntEnum):
    """Index of each population in a state vector."""

    G0 = 0  # NV- triplet ground, m_s = 0
    G1 = 1  # NV- triplet ground, m_s = +-1 (lumped)
    E0 = 2  # NV- triplet excited, m_s = 0
    E1 = 3  # NV- triplet excited, m_s = +-1 (lumped)
    S = 4  # NV- singlet metastable (1E, with 1A lumped in)
    N0 = 5  # NV0 ground
    N1 = 6  # NV0 excited


N_LEVELS = len(Level)
NV_MINUS_LEVELS = (Level.G0, Level.G1, Level.E0, Level.E1, Level.S)
NV_ZERO_LEVELS = (Level.N0, Level.N1)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Level populations plus the two running accumulators.

    ``q_acc`` is collected photocurrent charge and ``f_acc`` radiated photons,
    both in arbitrary units.
    """

    p: np.ndarray
    q_acc: float = 0.0
    f_acc: float = 0.0

    def __post_init__(self):
        p = np.array(self.p, dtype=float).reshape(-1)
        if p.shape != (N_LEVELS,):
            raise ValueError(f"expected {N_LEVELS} populations, got {p.shape[0]}")
        if not np.all(np.isfinite(p)):
            raise ValueError("populations must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def uniform(cls) -> StateVector:
        return cls(np.full(N_LEVELS, 1.0 / N_LEVELS))

    @classmethod
    def pure(cls, level: Level) -> StateVector:
        p = np.zeros(N_LEVELS)
        p[level] = 1.0
        return cls(p)

    @property
    def nv_minus(self) -> float:
        return float(self.p[list(NV_MINUS_LEVELS)].sum())

    @property
    def nv_zero(self) -> float:
        return float(self.p[list(NV_ZERO_LEVELS)].sum())

    def __getitem__(self, level: Level) -> float:
        return float(self.p[level])

    def with_populations(self, p) -> StateVector:
        return StateVector(p, self.q_acc, self.f_acc)

    def same_as(self, other: StateVector) -> bool:
        """Bitwise equality of populations and accumulators."""
        return (
            np.array_equal(self.p, other.p)
            and self.q_acc == other.q_acc
            and self.f_acc == other.f_acc
        )

    def __repr__(self):
        pops = ", ".join(f"{lv.name}={v:.6g}" for lv, v in zip(Level, self.p))
        return f"StateVector({pops}, q_acc={self.q_acc:.6g}, f_acc={self.f_acc:.6g})"


@dataclass(frozen=True)
class ModelRates:
    """Rate ledger for the seven-level model.

    Spontaneous rates are in MHz, optical cross sections in MHz/mW.
    """

    gamma_rad: float = 66.0
    gamma_isc0: float = 8.0
    gamma_isc1: float = 55.0
    gamma_s: float = 4.5
    beta_s0: float = 0.9
    gamma_n: float = 52.0
    sigma_abs_minus: float = 30.0
    sigma_abs_zero: float = 30.0
    sigma_ion: float = 2.5
    sigma_rec: float = 2.0
    sigma_stim: float = 30.0
    sigma_s: float = 0.3

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if not np.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value!r}")
            if value < 0:
                raise ValueError(f"{f.name} must be non-negative, got {value!r}")
        if self.beta_s0 > 1:
            raise ValueError(f"beta_s0 must lie in [0, 1], got {self.beta_s0!r}")
        if not self.gamma_isc1 > self.gamma_isc0:
            raise ValueError(
                "gamma_isc1 must exceed gamma_isc0 (spin-selective intersystem crossing)"
            )

    @property
    def singlet_lifetime(self) -> float:
        """1/gamma_s in microseconds."""
        return 1.0 / self.gamma_s if self.gamma_s > 0 else float("inf")

    def replace(self, **changes) -> ModelRates:
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


DEFAULT_RATES = ModelRates()


class LaserMode(str, enum.Enum):
    CONTINUOUS = "continuous"
    SHORT_PULSED = "short_pulsed"


class LaserRole(str, enum.Enum):
    POPULATION = "population"
    IONIZATION = "ionization"
    READOUT = "readout"


@dataclass(frozen=True)
class LaserField:
    wavelength_nm: float
    power_mw: float
    mode: LaserMode = LaserMode.CONTINUOUS
    role: LaserRole = LaserRole.POPULATION

    def __post_init__(self):
        object.__setattr__(self, "mode", LaserMode(self.mode))
        object.__setattr__(self, "role", LaserRole(self.role))
        if not (np.isfinite(self.wavelength_nm) and self.wavelength_nm > 0):
            raise ValueError(f"wavelength must be positive, got {self.wavelength_nm!r}")
        if not (np.isfinite(self.power_mw) and self.power_mw >= 0):
            raise ValueError(f"laser power must be non-negative, got {self.power_mw!r}")
        lo, hi = IONIZATION_RANGE_NM
        if self.role is LaserRole.IONIZATION and not lo <= self.wavelength_nm <= hi:
            raise ValueError(
                f"ionization wavelength {self.wavelength_nm} nm outside [{lo:g}, {hi:g}] nm"
            )

    @property
    def pulsed(self) -> bool:
        return self.mode is LaserMode.SHORT_PULSED

    def replace(self, **changes) -> LaserField:
        return dataclasses.replace(self, **changes)


class Regime(str, enum.Enum):
    RED = "red"
    ORANGE = "orange"
    GREEN = "green"
    BLUE = "blue"

    @property
    def bounds_nm(self) -> tuple[float, float]:
        """(short, long) wavelength edges; the long edge is exclusive except for Red."""
        return _REGIME_BOUNDS[self]


_REGIME_BOUNDS = {
    Regime.RED: (NV_MINUS_ZPL_NM, 674.0),
    Regime.ORANGE: (NV_ZERO_ZPL_NM, NV_MINUS_ZPL_NM),
    Regime.GREEN: (POPULATION_WAVELENGTH_NM, NV_ZERO_ZPL_NM),
    Regime.BLUE: (477.0, POPULATION_WAVELENGTH_NM),
}


class Curve(str, enum.Enum):
    RED = "red"
    BLUE = "blue"


@dataclass(frozen=True)
class Scenario:
    """Hypothesised singlet ionization threshold.

    A laser ionizes the singlet iff its wavelength is at or below
    ``lambda_s_nm``.
    """

    lambda_s_nm: float
    curve: Curve = Curve.RED

    def __post_init__(self):
        object.__setattr__(self, "curve", Curve(self.curve))
        if not (np.isfinite(self.lambda_s_nm) and self.lambda_s_nm > 0):
            raise ValueError(f"lambda_s must be positive, got {self.lambda_s_nm!r}")

    def ionizes_singlet(self, wavelength_nm: float) -> bool:
        return wavelength_nm <= self.lambda_s_nm

    @property
    def threshold_ev(self) -> float:
        return photon_energy_ev(self.lambda_s_nm)


def photon_energy_ev(wavelength_nm: float) -> float:
    if not wavelength_nm > 0:
        raise ValueError(f"wavelength must be positive, got {wavelength_nm!r}")
    return HC_EV_NM / wavelength_nm


def classify_regime(wavelength_nm: float) -> Regime:
    """Map an ionization wavelength onto its regime.

    The ZPL boundaries (637, 575) and 532 nm belong to the shorter-wavelength
    regime.
    """
    lo, hi = IONIZATION_RANGE_NM
    if not lo <= wavelength_nm <= hi:
        raise ValueError(
            f"wavelength {wavelength_nm} nm outside the ionization range [{lo:g}, {hi:g}] nm"
        )
    if wavelength_nm > NV_MINUS_ZPL_NM:
        return Regime.RED
    if wavelength_nm > NV_ZERO_ZPL_NM:
        return Regime.ORANGE
    if wavelength_nm > POPULATION_WAVELENGTH_NM:
        return Regime.GREEN
    return Regime.BLUE


class Channel(str, enum.Enum):
    PUMP_MINUS = "pump_minus"
    PUMP_ZERO = "pump_zero"
    IONIZE_EXCITED = "ionize_excited"
    RECOMBINE = "recombine"
    STIM_EMIT = "stim_emit"
    IONIZE_SINGLET = "ionize_singlet"


def channel_active(channel: Channel | str, laser: LaserField, scenario: Scenario) -> bool:
    channel = Channel(channel)
    wl = laser.wavelength_nm
    if channel is Channel.PUMP_MINUS:
        return wl <= NV_MINUS_ZPL_NM
    if channel is Channel.PUMP_ZERO:
        return wl <= NV_ZERO_ZPL_NM
    if channel is Channel.STIM_EMIT:
        return wl > NV_MINUS_ZPL_NM
    if channel in (Channel.IONIZE_EXCITED, Channel.RECOMBINE):
        # ps pulses are too short for excited-state ionization or recombination
        return not laser.pulsed
    return scenario.ionizes_singlet(wl)
