"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from nvsinglet.photophysics import IONIZATION_RANGE_NM, Curve, LaserField, LaserMode, ModelRates, Scenario

# zero, or something a lab could tell apart from zero
rate = st.one_of(st.just(0.0), st.floats(1e-3, 200.0))
cross_section = st.one_of(st.just(0.0), st.floats(1e-3, 50.0))


@st.composite
def model_rates(draw):
    isc0 = draw(st.one_of(st.just(0.0), st.floats(1e-3, 50.0)))
    return ModelRates(
        gamma_rad=draw(rate),
        gamma_isc0=isc0,
        gamma_isc1=isc0 + draw(st.floats(0.01, 100.0)),
        gamma_s=draw(st.one_of(st.just(0.0), st.floats(1e-3, 50.0))),
        beta_s0=draw(st.one_of(st.sampled_from([0.0, 1.0]), st.floats(1e-3, 1.0))),
        gamma_n=draw(rate),
        sigma_abs_minus=draw(cross_section),
        sigma_abs_zero=draw(cross_section),
        sigma_ion=draw(cross_section),
        sigma_rec=draw(cross_section),
        sigma_stim=draw(cross_section),
        sigma_s=draw(cross_section),
    )


wavelengths = st.floats(*IONIZATION_RANGE_NM)
powers = st.one_of(st.just(0.0), st.floats(1e-3, 30.0))
modes = st.sampled_from(list(LaserMode))


@st.composite
def lasers(draw):
    return LaserField(draw(wavelengths), draw(powers), draw(modes))


@st.composite
def scenarios(draw):
    return Scenario(draw(st.floats(400.0, 700.0)), draw(st.sampled_from(list(Curve))))
