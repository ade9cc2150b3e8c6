"""Curve fits and closed-form timescales used to read the simulated curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .photophysics import Channel, LaserField, ModelRates, Scenario, channel_active


def excited_lifetime(rates: ModelRates) -> float:
    """Longest spontaneous triplet excited-state lifetime (the m_s=0 branch), us."""
    return 1.0 / (rates.gamma_rad + rates.gamma_isc0)


def effective_singlet_lifetime(
    rates: ModelRates, laser: LaserField, scenario: Scenario
) -> float:
    """Singlet lifetime while ``laser`` is on.

    Population leaving the singlet lands in the triplet ground state, gets
    pumped and can be shelved back into the singlet before it is ionized.
    Only the fraction that does not return counts as a loss, on top of any
    direct singlet ionization.
    """
    p = laser.power_mw
    ion = rates.sigma_ion * p if channel_active(Channel.IONIZE_EXCITED, laser, scenario) else 0.0
    pumped = channel_active(Channel.PUMP_MINUS, laser, scenario) and p > 0
    if pumped:
        back0 = rates.gamma_isc0 / (rates.gamma_isc0 + ion)
        back1 = rates.gamma_isc1 / (rates.gamma_isc1 + ion)
        returned = rates.beta_s0 * back0 + (1 - rates.beta_s0) * back1
    else:
        returned = 0.0
    loss = rates.gamma_s * (1.0 - returned)
    if channel_active(Channel.IONIZE_SINGLET, laser, scenario):
        loss += rates.sigma_s * p
    return 1.0 / loss if loss > 0 else float("inf")


def triplet_two_step_time(rates: ModelRates, laser: LaserField) -> float:
    """Depletion time of the pumped m_s=+-1 triplet pair.

    Ground and excited states sit in quasi-equilibrium under pumping; the pair
    drains through excited-state ionization and intersystem crossing.
    """
    p = laser.power_mw
    pump = rates.sigma_abs_minus * p
    ion = 0.0 if laser.pulsed else rates.sigma_ion * p
    exit_rate = ion + rates.gamma_isc1
    excited_fraction = pump / (pump + rates.gamma_rad + exit_rate)
    k = excited_fraction * exit_rate
    return 1.0 / k if k > 0 else float("inf")


def fit_tail_exponential(x, y) -> tuple[float, float]:
    """Unweighted least squares of log(y) on x; returns (tau, amplitude)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("tail fit needs strictly positive values")
    slope, intercept = np.polyfit(x, np.log(y), 1)
    if slope >= 0:
        raise ValueError("tail is not decaying")
    return -1.0 / slope, float(np.exp(intercept))


@dataclass(frozen=True)
class DoubleExponential:
    a_fast: float
    tau_fast: float
    a_slow: float
    tau_slow: float
    rms: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.a_fast * np.exp(-t / self.tau_fast) + self.a_slow * np.exp(-t / self.tau_slow)


def _two_exp(t, a1, k1, a2, k2):
    return a1 * np.exp(-k1 * t) + a2 * np.exp(-k2 * t)


def fit_double_exponential(t, y) -> DoubleExponential:
    """Fit ``y = a_f exp(-t/tau_f) + a_s exp(-t/tau_s)`` from several starts."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    span = t.max() - t[t > 0].min() if np.any(t > 0) else 1.0
    base = 1.0 / max(t.max(), 1e-12)
    best = None
    for kf in base * np.array([10.0, 30.0, 100.0, 300.0, 1000.0]):
        for ks in base * np.array([0.3, 1.0, 3.0, 10.0]):
            if ks >= kf:
                continue
            p0 = [y[0] / 2, kf, y[0] / 2, ks]
            try:
                popt, _ = curve_fit(
                    _two_exp, t, y, p0=p0,
                    bounds=([0, 0, 0, 0], [np.inf, np.inf, np.inf, np.inf]),
                    maxfev=5000,
                )
            except (RuntimeError, ValueError):
                continue
            sse = float(np.sum((_two_exp(t, *popt) - y) ** 2))
            if best is None or sse < best[0]:
                best = (sse, popt)
    if best is None:
        raise RuntimeError(f"double exponential fit failed over span {span}")
    sse, (a1, k1, a2, k2) = best
    if k1 < k2:
        a1, k1, a2, k2 = a2, k2, a1, k1
    return DoubleExponential(a1, 1.0 / k1, a2, 1.0 / k2, float(np.sqrt(sse / t.size)))
