"""Rate-generator assembly for a set of simultaneously active lasers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .photophysics import (
    N_LEVELS,
    Channel,
    LaserField,
    Level,
    ModelRates,
    Scenario,
    channel_active,
)

G0, G1, E0, E1, S, N0, N1 = Level


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Markov generator over the seven populations (``dp/dt = m @ p``).

    ``m[i, j]`` is the rate from level j into level i, so every column sums
    to zero.  ``charge_flux`` and ``photon_flux`` are the per-level rates that
    feed the photocurrent and fluorescence accumulators.
    """

    m: np.ndarray
    charge_flux: np.ndarray
    photon_flux: np.ndarray

    def __post_init__(self):
        for name in ("m", "charge_flux", "photon_flux"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def augmented(self) -> np.ndarray:
        """9x9 matrix with the two accumulators appended as absorbing rows."""
        a = np.zeros((N_LEVELS + 2, N_LEVELS + 2))
        a[:N_LEVELS, :N_LEVELS] = self.m
        a[N_LEVELS, :N_LEVELS] = self.charge_flux
        a[N_LEVELS + 1, :N_LEVELS] = self.photon_flux
        return a

    def rate(self, src: Level, dst: Level) -> float:
        return float(self.m[dst, src])

    def max_rate(self) -> float:
        return float(np.max(np.abs(np.diag(self.m)))) if self.m.size else 0.0

    def min_nonzero_rate(self) -> float:
        off = self.m - np.diag(np.diag(self.m))
        nz = off[off > 0]
        return float(nz.min()) if nz.size else 0.0


class _Builder:
    def __init__(self):
        self.m = np.zeros((N_LEVELS, N_LEVELS))
        self.q = np.zeros(N_LEVELS)
        self.f = np.zeros(N_LEVELS)

    def add(self, src, dst, rate):
        self.m[dst, src] += rate

    def finish(self) -> GeneratorMatrix:
        m = self.m.copy()
        np.fill_diagonal(m, 0.0)
        m -= np.diag(m.sum(axis=0))
        return GeneratorMatrix(m, self.q, self.f)


def build_generator(
    rates: ModelRates,
    lasers: Iterable[LaserField] = (),
    scenario: Scenario | None = None,
) -> GeneratorMatrix:
    """Assemble the generator for ``lasers`` shining together.

    With no lasers only the spontaneous channels remain.  ``scenario`` may be
    omitted only in darkness.
    """
    lasers = list(lasers)
    if lasers and scenario is None:
        raise ValueError("a scenario is required to gate singlet ionization")

    b = _Builder()
    b.add(E0, G0, rates.gamma_rad)
    b.add(E1, G1, rates.gamma_rad)
    b.add(E0, S, rates.gamma_isc0)
    b.add(E1, S, rates.gamma_isc1)
    b.add(S, G0, rates.beta_s0 * rates.gamma_s)
    b.add(S, G1, (1.0 - rates.beta_s0) * rates.gamma_s)
    b.add(N1, N0, rates.gamma_n)
    b.f[E0] += rates.gamma_rad
    b.f[E1] += rates.gamma_rad

    for laser in lasers:
        p = laser.power_mw
        if not (np.isfinite(p) and p >= 0):
            raise ValueError(f"laser power must be non-negative, got {p!r}")
        if channel_active(Channel.PUMP_MINUS, laser, scenario):
            b.add(G0, E0, rates.sigma_abs_minus * p)
            b.add(G1, E1, rates.sigma_abs_minus * p)
        if channel_active(Channel.STIM_EMIT, laser, scenario):
            b.add(E0, G0, rates.sigma_stim * p)
            b.add(E1, G1, rates.sigma_stim * p)
        if channel_active(Channel.IONIZE_EXCITED, laser, scenario):
            k = rates.sigma_ion * p
            b.add(E0, N0, k)
            b.add(E1, N0, k)
            b.q[E0] += k
            b.q[E1] += k
        if channel_active(Channel.IONIZE_SINGLET, laser, scenario):
            k = rates.sigma_s * p
            b.add(S, N0, k)
            b.q[S] += k
        if channel_active(Channel.PUMP_ZERO, laser, scenario):
            b.add(N0, N1, rates.sigma_abs_zero * p)
        if channel_active(Channel.RECOMBINE, laser, scenario):
            half = 0.5 * rates.sigma_rec * p
            b.add(N1, G0, half)
            b.add(N1, G1, half)

    return b.finish()


def dark_generator(rates: ModelRates) -> GeneratorMatrix:
    return build_generator(rates, ())
