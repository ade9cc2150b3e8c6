"""Command-line entry point: ``nvsinglet {simulate,sweep,figures,steady}``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .config import RunConfig, banner, load_config
from .generator import build_generator
from .observables import ObservableChannel, nv_minus_population, nv_zero_population
from .photophysics import Curve, LaserField, LaserMode, Level, Scenario
from .propagator import steady_state
from .sequence import (
    Pulse,
    PulseSequence,
    parse_quantity,
    parse_sequence,
    run_sequence,
)
from .sweep import (
    Regime,
    SweepAxis,
    curve_csv,
    curve_filename,
    default_figure_spec,
    figure_suite,
    sweep,
)

log = logging.getLogger("nvsinglet")


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--config", type=Path, help="TOML run configuration")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--workers", type=int, help="parallel worker processes")
    p.add_argument("--seed", type=int, help="reserved; the model is deterministic")
    p.add_argument("--plot", action="store_true", help="also write PNG line plots")
    return p


def _scenario_flags(p: argparse.ArgumentParser):
    p.add_argument("--lambda-s-red", type=float, metavar="NM",
                   help="threshold for the red curve (singlet ionized)")
    p.add_argument("--lambda-s-blue", type=float, metavar="NM",
                   help="threshold for the blue curve (singlet not ionized)")
    p.add_argument("--pulsed", action="store_true",
                   help="treat the ionization laser as short-pulsed")


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="nvsinglet",
        description="NV charge-state pulse-sequence simulator",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[common], help="run a sequence file")
    sim.add_argument("sequence", type=Path)
    _scenario_flags(sim)

    sw = sub.add_parser("sweep", parents=[common], help="sweep one axis for one regime")
    sw.add_argument("axis", choices=[a.value for a in SweepAxis])
    sw.add_argument("--regime", required=True, choices=[r.value for r in Regime])
    sw.add_argument("--channel", default="population", choices=[c.value for c in ObservableChannel])
    sw.add_argument("--lambda-ion", type=float, metavar="NM")
    _scenario_flags(sw)

    sub.add_parser("figures", parents=[common], help="write the full curve suite")

    st = sub.add_parser("steady", parents=[common], help="CW steady-state populations")
    st.add_argument("wavelength", help="e.g. 594nm")
    st.add_argument("power", help="e.g. 5mW")
    _scenario_flags(st)
    return parser


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    changes = {}
    if getattr(args, "out", None) is not None:
        changes["out_dir"] = args.out
    if getattr(args, "workers", None) is not None:
        changes["workers"] = args.workers
    if getattr(args, "plot", False):
        changes["plot"] = True
    return cfg.replace(**changes) if changes else cfg


def _scenarios(args, fallback: Scenario | None) -> list[Scenario]:
    out = []
    if args.lambda_s_red is not None:
        out.append(Scenario(args.lambda_s_red, Curve.RED))
    if args.lambda_s_blue is not None:
        out.append(Scenario(args.lambda_s_blue, Curve.BLUE))
    if not out and fallback is not None:
        out.append(fallback)
    return out


def _pulsed_sequence(seq: PulseSequence) -> PulseSequence:
    idx = seq.collect_index
    if idx is None:
        raise ValueError("--pulsed needs a pulse with collect=pc")
    steps = list(seq.steps)
    s = steps[idx]
    steps[idx] = Pulse(s.laser.replace(mode=LaserMode.SHORT_PULSED), s.duration, True)
    return dataclasses.replace(seq, steps=tuple(steps))


def cmd_simulate(args, cfg: RunConfig) -> int:
    seq = parse_sequence(args.sequence.read_text(encoding="utf-8"))
    if args.pulsed:
        seq = _pulsed_sequence(seq)
    scenarios = _scenarios(args, seq.scenario or cfg.scenario)
    if not scenarios:
        raise ValueError("no scenario: give --lambda-s-red/--lambda-s-blue, a 'scenario' line or [scenario] in the config")
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for scen in scenarios:
        report = run_sequence(seq, cfg.rates, scenario=scen, stride=cfg.stride)
        tag = scen.curve.value
        summary = {
            "curve": tag,
            "lambda_s_nm": scen.lambda_s_nm,
            "nv_minus": nv_minus_population(report),
            "nv_zero": nv_zero_population(report),
            "pc": report.total_pc,
            "readout_photons": report.readout_photons,
            "final_populations": {lv.name: float(report.final_state.p[lv]) for lv in Level},
            "pre_readout_populations": {lv.name: float(report.pre_readout_state.p[lv]) for lv in Level},
            "steps": [
                {"step": type(s).__name__, "delta_q": r.delta_q, "delta_f": r.delta_f}
                for s, r in zip(seq.steps, report.segments)
            ],
        }
        (cfg.out_dir / f"simulate_{tag}.json").write_text(
            json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        rows = ["t_us," + ",".join(lv.name for lv in Level) + ",q_acc,f_acc"]
        for t, st in report.trajectory:
            rows.append(",".join([repr(t), *map(repr, map(float, st.p)), repr(st.q_acc), repr(st.f_acc)]))
        (cfg.out_dir / f"trajectory_{tag}.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
        print(
            f"{tag:>4}  lambda_s={scen.lambda_s_nm:g} nm  NV-={summary['nv_minus']:.6f}  "
            f"NV0={summary['nv_zero']:.6f}  PC={summary['pc']:.6g} AU"
        )
    return 0


def cmd_sweep(args, cfg: RunConfig) -> int:
    regime = Regime(args.regime)
    changes = {"pulsed": bool(args.pulsed)}
    if args.lambda_ion is not None:
        changes["ionization_wavelength"] = args.lambda_ion
    if args.lambda_s_red is not None:
        changes["lambda_s_red"] = args.lambda_s_red
    if args.lambda_s_blue is not None:
        changes["lambda_s_blue"] = args.lambda_s_blue
    spec = default_figure_spec(regime, args.channel, **changes)
    axis = SweepAxis(args.axis)
    points = sweep(axis, spec, cfg.rates, workers=cfg.workers)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for curve in Curve:
        path = cfg.out_dir / curve_filename(spec, axis, curve)
        path.write_text(curve_csv(points, axis, spec, curve), encoding="utf-8")
        log.info("wrote %s", path)
    return 0


def cmd_figures(args, cfg: RunConfig) -> int:
    manifest = figure_suite(cfg.rates, cfg.out_dir, workers=cfg.workers)
    log.info("wrote %d curves and manifest.json to %s", len(manifest["curves"]), cfg.out_dir)
    if cfg.plot:
        from .plotting import plot_figures

        plot_figures(cfg.out_dir, manifest)
    return 0


def cmd_steady(args, cfg: RunConfig) -> int:
    wl = parse_quantity(args.wavelength, "wavelength")
    power = parse_quantity(args.power, "power")
    mode = LaserMode.SHORT_PULSED if args.pulsed else LaserMode.CONTINUOUS
    laser = LaserField(wl, power, mode)
    # without any hypothesis the laser is assumed to ionize the singlet
    scenarios = _scenarios(args, cfg.scenario) or [Scenario(wl, Curve.RED)]
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    rows = ["curve,lambda_s_nm," + ",".join(lv.name for lv in Level) + ",nv_minus,nv_zero,degenerate"]
    for scen in scenarios:
        res = steady_state(build_generator(cfg.rates, [laser], scen))
        st = res.state
        rows.append(",".join([
            scen.curve.value, repr(scen.lambda_s_nm), *map(repr, map(float, st.p)),
            repr(st.nv_minus), repr(st.nv_zero), str(res.degenerate).lower(),
        ]))
        print(
            f"{scen.curve.value:>4}  {wl:g} nm {power:g} mW  lambda_s={scen.lambda_s_nm:g} nm  "
            f"NV-={st.nv_minus:.6f}  NV0={st.nv_zero:.6f}"
        )
    (cfg.out_dir / "steady.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "figures": cmd_figures,
    "steady": cmd_steady,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = _config(args)
        print(banner(cfg), file=sys.stderr)
        return COMMANDS[args.command](args, cfg)
    except (ValueError, OSError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
