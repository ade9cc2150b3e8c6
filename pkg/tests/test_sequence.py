import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvsinglet import sequence as seqmod
from nvsinglet.photophysics import (
    DEFAULT_RATES,
    Curve,
    LaserField,
    LaserMode,
    LaserRole,
    Level,
    Regime,
    Scenario,
    StateVector,
)
from nvsinglet.propagator import PropagationError
from nvsinglet.sequence import (
    Delay,
    Initialize,
    PiPulse,
    Pulse,
    PulseSequence,
    Readout,
    SequenceExecutionError,
    SequenceParseError,
    apply_pi_pulse,
    default_sequence,
    format_sequence,
    parse_quantity,
    parse_sequence,
    run_sequence,
)

RED = Scenario(660.0, Curve.RED)
BLUE = Scenario(640.0, Curve.BLUE)


def red_sequence(**kw):
    return default_sequence(Regime.RED, LaserField(650, 5.0), RED, **kw)


def test_default_sequence_shape():
    seq = red_sequence()
    kinds = [type(s) for s in seq.steps]
    assert kinds == [Initialize, PiPulse, Pulse, Delay, Pulse, Readout]
    init, _, pop, delay, ion, readout = seq.steps
    assert init.laser.wavelength_nm == 532 and init.duration == 3.0 and init.settle == 1.0
    assert pop.laser.power_mw == 2.0 and pop.duration == 0.03
    assert delay.duration == 0.03
    assert ion.collect_pc and ion.duration == 0.1 and ion.laser.role is LaserRole.IONIZATION
    assert readout.laser.power_mw == 0.1 and readout.duration == 1.0


def test_blue_regime_population_power():
    seq = default_sequence(Regime.BLUE, LaserField(510, 5.0), Scenario(520.0))
    assert seq.steps[0].laser.power_mw == 5.0 and seq.steps[2].laser.power_mw == 5.0


def test_regime_mismatch_rejected():
    with pytest.raises(ValueError, match="orange"):
        default_sequence(Regime.RED, LaserField(600, 5.0), RED)


def test_sequence_invariants():
    laser = LaserField(532, 1.0)
    with pytest.raises(ValueError):
        PulseSequence(())
    with pytest.raises(ValueError, match="pi pulse"):
        PulseSequence((Pulse(laser, 0.1), PiPulse()))
    with pytest.raises(ValueError, match="at most one"):
        PulseSequence((Pulse(laser, 0.1, True), Pulse(laser, 0.1, True)))
    with pytest.raises(ValueError):
        Delay(-0.1)


def test_pi_pulse_examples():
    p = np.zeros(7)
    p[Level.G0], p[Level.G1] = 0.9, 0.1
    s = StateVector(p, q_acc=0.2, f_acc=0.3)
    flipped = apply_pi_pulse(s)
    assert flipped[Level.G0] == 0.1 and flipped[Level.G1] == 0.9
    assert flipped.q_acc == 0.2 and flipped.f_acc == 0.3
    p = np.array([0.2, 0.1, 0.1, 0.1, 0.3, 0.1, 0.1])
    assert apply_pi_pulse(StateVector(p))[Level.S] == 0.3


@given(st.lists(st.floats(0, 1), min_size=7, max_size=7).filter(lambda w: sum(w) > 0))
def test_pi_pulse_involution_and_trace(w):
    s = StateVector(np.array(w) / sum(w))
    once = apply_pi_pulse(s)
    assert apply_pi_pulse(once).same_as(s)
    assert once.p.sum() == s.p.sum()


def test_zero_power_sequence_is_null():
    dark = LaserField(532, 0.0)
    seq = PulseSequence((
        Initialize(dark), Pulse(dark, 0.03), Delay(0.03),
        Pulse(LaserField(650, 0.0, role=LaserRole.IONIZATION), 0.1, True), Readout(dark),
    ), RED)
    start = StateVector.pure(Level.G0)
    report = run_sequence(seq, DEFAULT_RATES, start)
    np.testing.assert_array_equal(report.final_state.p, start.p)
    assert report.total_pc == 0.0


def test_red_curve_loses_more_population():
    seq = red_sequence()
    red = run_sequence(seq, DEFAULT_RATES, scenario=RED)
    blue = run_sequence(seq, DEFAULT_RATES, scenario=BLUE)
    assert red.nv_minus_fraction < blue.nv_minus_fraction
    assert red.total_pc > blue.total_pc


def test_long_delay_empties_singlet():
    def gap(delay):
        seq = red_sequence(delay=delay)
        return (run_sequence(seq, DEFAULT_RATES, scenario=BLUE).nv_minus_fraction
                - run_sequence(seq, DEFAULT_RATES, scenario=RED).nv_minus_fraction)

    assert gap(10 * DEFAULT_RATES.singlet_lifetime) < 0.1 * gap(0.03)


def test_pre_readout_state_precedes_readout():
    report = run_sequence(red_sequence(), DEFAULT_RATES)
    assert not report.pre_readout_state.same_as(report.final_state)
    assert report.readout_photons > 0
    assert report.nv_minus_fraction == report.pre_readout_state.nv_minus


def test_scenario_override_and_missing():
    seq = red_sequence().with_scenario(None)
    with pytest.raises(ValueError, match="scenario"):
        run_sequence(seq, DEFAULT_RATES)
    assert run_sequence(seq, DEFAULT_RATES, scenario=BLUE).total_pc > 0


def _split_pulse(seq, idx):
    s = seq.steps[idx]
    halves = (Pulse(s.laser, s.duration / 2, False), Pulse(s.laser, s.duration / 2, s.collect_pc))
    return PulseSequence(seq.steps[:idx] + halves + seq.steps[idx + 1:], seq.scenario)


@pytest.mark.parametrize("idx", [2, 4])
def test_pulse_splitting_invariance(idx):
    seq = red_sequence()
    whole = run_sequence(seq, DEFAULT_RATES)
    split = run_sequence(_split_pulse(seq, idx), DEFAULT_RATES)
    np.testing.assert_allclose(split.final_state.p, whole.final_state.p, atol=1e-9, rtol=0)
    if idx == 2:
        assert split.total_pc == pytest.approx(whole.total_pc, abs=1e-9)


@pytest.mark.parametrize("stride", [None, 0.5, 0.01, 0.003])
def test_pc_independent_of_stride(stride):
    seq = red_sequence()
    ref = run_sequence(seq, DEFAULT_RATES).total_pc
    assert run_sequence(seq, DEFAULT_RATES, stride=stride).total_pc == ref


def test_trajectory_is_time_ordered():
    report = run_sequence(red_sequence(), DEFAULT_RATES, stride=0.05)
    times = [t for t, _ in report.trajectory]
    assert times[0] == 0.0
    assert times[-1] == pytest.approx(3 + 1 + 0.03 + 0.03 + 0.1 + 1)
    assert np.all(np.diff(times) >= 0)


def test_execution_error_names_step(monkeypatch):
    def boom(*a, **k):
        raise PropagationError("overflow")

    monkeypatch.setattr(seqmod, "propagate", boom)
    with pytest.raises(SequenceExecutionError) as info:
        run_sequence(red_sequence(), DEFAULT_RATES)
    assert info.value.index == 0 and "Initialize" in str(info.value)


# --- text format ---------------------------------------------------------

def test_parse_examples():
    assert parse_sequence("delay 30ns").steps == (Delay(0.03),)
    (p,) = parse_sequence("pulse 532nm 2mW 30ns").steps
    assert p == Pulse(LaserField(532, 2.0), 0.03)


def test_parse_full_file():
    text = """
    # comment line
    scenario 660nm red
    init 532nm 2mW 3us settle=1us
    pi
    pulse 532nm 2mW 30ns
    delay 30ns   # trailing comment
    pulse 650nm 5mW 100ns collect=pc
    readout 532nm 100uW 1us
    """
    seq = parse_sequence(text)
    assert seq == red_sequence()


@pytest.mark.parametrize("text, line, match", [
    ("pi\nwiggle 3us", 2, "unknown keyword"),
    ("delay 30", 1, "missing a unit"),
    ("pulse 532nm 2mw 30ns", 1, "unknown power unit"),
    ("pulse 532nm 2mW 30ns collect=pc\npulse 650nm 5mW 100ns collect=pc", 2, "line 1"),
    ("pulse 532nm 2mW", 1, "takes 3 arguments"),
    ("pulse 532nm 2mW 3us colour=red", 1, "unknown option"),
    ("pulse 532nm 2mW 3us mode=strobe", 1, "unknown laser mode"),
    ("delay -3us", 1, "non-negative"),
    ("pulse 700nm 5mW 100ns collect=pc", 1, "ionization wavelength"),
])
def test_parse_errors_carry_line(text, line, match):
    with pytest.raises(SequenceParseError, match=match) as info:
        parse_sequence(text)
    assert info.value.line_no == line


def test_parse_units_and_modes():
    (p,) = parse_sequence("pulse 650nm 500uW 0.1us collect=pc mode=pulsed").steps
    assert p.laser.power_mw == pytest.approx(0.5) and p.laser.mode is LaserMode.SHORT_PULSED
    assert parse_quantity("1.5W", "power") == 1500.0
    assert parse_quantity("2ms", "duration") == 2000.0
    with pytest.raises(ValueError, match="unit"):
        parse_quantity("594", "wavelength")


@pytest.mark.parametrize("regime, wl, lam", [
    (Regime.RED, 650, 660), (Regime.ORANGE, 600, 610), (Regime.GREEN, 550, 560), (Regime.BLUE, 510, 520),
])
def test_round_trip_defaults(regime, wl, lam):
    seq = default_sequence(regime, LaserField(wl, 5.0), Scenario(lam))
    text = format_sequence(seq)
    again = parse_sequence(text)
    assert again == seq
    assert format_sequence(again) == text


durations = st.floats(0.0, 10.0, allow_subnormal=False)
lasers_txt = st.builds(
    LaserField, st.floats(477, 674), st.floats(0.0, 30.0, allow_subnormal=False), st.sampled_from(list(LaserMode))
)


@st.composite
def random_sequences(draw):
    steps = []
    if draw(st.booleans()):
        steps.append(Initialize(draw(lasers_txt), draw(durations), draw(durations)))
    if draw(st.booleans()):
        steps.append(PiPulse())
    collect_at = draw(st.integers(-1, 3))
    for i in range(draw(st.integers(0, 4))):
        if draw(st.booleans()):
            steps.append(Delay(draw(durations)))
        collect = i == collect_at
        laser = draw(lasers_txt)
        if collect:
            laser = laser.replace(role=LaserRole.IONIZATION)
        steps.append(Pulse(laser, draw(durations), collect))
    steps.append(Readout(draw(lasers_txt).replace(role=LaserRole.READOUT), draw(durations)))
    scen = draw(st.none() | st.builds(Scenario, st.floats(400, 700), st.sampled_from(list(Curve))))
    return PulseSequence(tuple(steps), scen)


@given(random_sequences())
@settings(max_examples=100)
def test_round_trip_random(seq):
    again = parse_sequence(format_sequence(seq))
    assert again == seq
