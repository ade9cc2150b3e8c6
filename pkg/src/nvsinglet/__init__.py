"""Charge-state dynamics of the NV center under multi-color pulse sequences.

A seven-level rate model (triplet ground/excited pairs, the lumped singlet,
and the neutral ground/excited states) is propagated exactly through
piecewise-constant laser steps, with ionization and recombination tracked as
an integrated photocurrent.
"""

from .generator import GeneratorMatrix, build_generator, dark_generator
from .observables import ObservableChannel, contrast, extract
from .photophysics import (
    DEFAULT_RATES,
    Curve,
    LaserField,
    LaserMode,
    LaserRole,
    Level,
    ModelRates,
    Regime,
    Scenario,
    StateVector,
    classify_regime,
    photon_energy_ev,
)
from .propagator import propagate, propagate_numeric, steady_state
from .sequence import (
    PulseSequence,
    default_sequence,
    format_sequence,
    parse_sequence,
    run_sequence,
)
from .sweep import FigureSpec, SweepAxis, default_figure_spec, figure_suite, sweep

__version__ = "0.1.0"
