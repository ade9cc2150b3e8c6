import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvsinglet.photophysics import (
    Channel,
    LaserField,
    LaserMode,
    LaserRole,
    Level,
    ModelRates,
    Regime,
    Scenario,
    StateVector,
    channel_active,
    classify_regime,
    photon_energy_ev,
)

from strategies import lasers, wavelengths


@pytest.mark.parametrize("wl, ev, tol", [(637, 1.95, 0.005), (674, 1.84, 0.005), (477, 2.60, 0.01)])
def test_energy_anchors(wl, ev, tol):
    assert photon_energy_ev(wl) == pytest.approx(ev, abs=tol)


def test_energy_rejects_nonpositive():
    for bad in (0.0, -532.0):
        with pytest.raises(ValueError):
            photon_energy_ev(bad)


@given(st.floats(1.0, 2000.0), st.floats(1e-6, 100.0))
def test_energy_strictly_decreasing(wl, dwl):
    assert photon_energy_ev(wl + dwl) < photon_energy_ev(wl)


@pytest.mark.parametrize("wl, regime", [
    (650, Regime.RED), (600, Regime.ORANGE), (550, Regime.GREEN), (500, Regime.BLUE),
    (674, Regime.RED), (477, Regime.BLUE),
    # boundaries belong to the shorter-wavelength regime
    (637, Regime.ORANGE), (575, Regime.GREEN), (532, Regime.BLUE),
])
def test_classify_regime(wl, regime):
    assert classify_regime(wl) is regime


@pytest.mark.parametrize("wl", [700, 476.9, 674.01])
def test_classify_out_of_range_names_bounds(wl):
    with pytest.raises(ValueError, match="477.*674"):
        classify_regime(wl)


def test_regime_partition_sampled():
    rng = np.random.default_rng(0)
    for wl in rng.uniform(477, 674, 10_000):
        regime = classify_regime(wl)
        lo, hi = regime.bounds_nm
        assert lo <= wl <= hi
    eps = 1e-9
    for b in (532.0, 575.0, 637.0):
        assert classify_regime(b - eps) is not classify_regime(b + eps)


def test_gating_examples():
    any_scen = Scenario(600.0)
    assert not channel_active(Channel.PUMP_MINUS, LaserField(650, 5), any_scen)
    assert channel_active(Channel.STIM_EMIT, LaserField(650, 5), any_scen)
    assert channel_active(Channel.IONIZE_SINGLET, LaserField(532, 1), Scenario(600.0))
    assert not channel_active(Channel.IONIZE_EXCITED, LaserField(580, 5, LaserMode.SHORT_PULSED), any_scen)
    assert not channel_active(Channel.RECOMBINE, LaserField(580, 5, LaserMode.SHORT_PULSED), any_scen)
    assert channel_active(Channel.IONIZE_SINGLET, LaserField(580, 5, LaserMode.SHORT_PULSED), any_scen)
    assert channel_active(Channel.PUMP_ZERO, LaserField(575, 1), any_scen)
    assert not channel_active(Channel.PUMP_ZERO, LaserField(576, 1), any_scen)


def test_unknown_channel_rejected():
    with pytest.raises(ValueError):
        channel_active("teleport", LaserField(532, 1), Scenario(600.0))


@given(lasers(), st.floats(400.0, 700.0), st.floats(0.0, 100.0))
def test_singlet_gate_monotone_in_threshold(laser, lam, raise_by):
    if channel_active(Channel.IONIZE_SINGLET, laser, Scenario(lam)):
        assert channel_active(Channel.IONIZE_SINGLET, laser, Scenario(lam + raise_by))


@given(wavelengths)
@settings(max_examples=200)
def test_singlet_gate_matches_threshold_energy(wl):
    scen = Scenario(600.0)
    active = channel_active(Channel.IONIZE_SINGLET, LaserField(wl, 1.0), scen)
    assert active == (photon_energy_ev(wl) >= scen.threshold_ev)


def test_laser_validation():
    with pytest.raises(ValueError):
        LaserField(532, -1.0)
    with pytest.raises(ValueError):
        LaserField(0.0, 1.0)
    with pytest.raises(ValueError, match="ionization wavelength"):
        LaserField(700, 1.0, role=LaserRole.IONIZATION)
    # outside the ionization range is fine for other roles
    LaserField(700, 1.0)


def test_rates_validation():
    with pytest.raises(ValueError, match="sigma_s"):
        ModelRates(sigma_s=-1.0)
    with pytest.raises(ValueError, match="beta_s0"):
        ModelRates(beta_s0=1.5)
    with pytest.raises(ValueError):
        ModelRates(gamma_isc0=60.0, gamma_isc1=55.0)
    assert ModelRates().singlet_lifetime == pytest.approx(1 / 4.5)


def test_state_vector():
    s = StateVector.pure(Level.N1)
    assert s.nv_zero == 1.0 and s.nv_minus == 0.0
    assert StateVector.uniform().nv_minus == pytest.approx(5 / 7)
    with pytest.raises(ValueError):
        s.p[0] = 1.0
    with pytest.raises(ValueError):
        StateVector(np.ones(6))
