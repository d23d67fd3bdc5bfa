"""Scenario files, command-line verbs, and trace/report emission.

Scenario files are YAML with a one-to-one mapping onto
:class:`~travelbeam.sim.Scenario`; every physical quantity carries its
unit in the key name, unknown keys are rejected, and all defaults echo
back into the run report so any result can be reproduced from the report
alone. Outputs are deterministic byte-for-byte for a fixed scenario file
and seed.

Exit codes: 0 success, 2 validation error, 3 runtime/geometry error,
4 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .beamforming import BeamSpec, Strategy
from .channel import RadioConfig, ScattererField
from .doppler import (
    DopplerParams,
    brute_force_optimal_offset,
    optimal_pointing,
    ula_halfwidth,
    worst_case_spread,
)
from .geometry import GeometryError, Point2, Trajectory, UlaGeometry
from .sim import (
    CoherenceReport,
    MonteCarloReport,
    RandomField,
    Scenario,
    SnrTrace,
    coherence_report,
    monte_carlo,
    run_trajectory,
)

SCHEMA_VERSION = 1

DEFAULT_CARRIER_GHZ = 10.0
DEFAULT_UE_SPEED_MPS = 30.0
DEFAULT_ES_OVER_N0_DB = 30.0
DEFAULT_UE_ELEMENTS = 4
DEFAULT_BS_ELEMENTS = 128
DEFAULT_BS_CENTER = (10.0, 0.0)
DEFAULT_SCATTERER_COUNT = 20
# symmetric about the default UE broadside (+y) so every steering offset
# finds scattering in its lobe; forward of the UE, clear of both arrays
DEFAULT_SCATTERER_REGION = (-4.0, 4.0, 0.5, 8.0)
DEFAULT_NUM_STEPS = 200
DEFAULT_THRESHOLD_DB = 3.0
DEFAULT_MONOSTATIC_RCS = 0.5
DEFAULT_EXCLUSION_RADIUS_M = 0.5

_STRATEGY_NAMES = {s.value: s for s in Strategy}


class ScenarioError(ValueError):
    """A scenario file failed validation."""


@dataclass
class ScenarioDocument:
    """A fully resolved scenario file: scenario, top-level seed, options."""

    scenario: Scenario
    seed: int
    plot: bool


@dataclass
class RunReport:
    tool_version: str
    seed: int
    scenario: dict
    traces_csv: str
    threshold_db: float
    coherence: CoherenceReport


# ---------------------------------------------------------------------------
# scenario parsing

def _expect_map(value, ctx: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ScenarioError(f"{ctx}: expected a mapping, got {type(value).__name__}")
    return value


def _reject_unknown(mapping: dict, allowed: tuple[str, ...], ctx: str) -> None:
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ScenarioError(
            f"{ctx}: unknown key(s) {unknown}; allowed keys: {sorted(allowed)}"
        )


def _get_number(mapping: dict, key: str, ctx: str, default: float) -> float:
    value = mapping.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{ctx}.{key}: expected a number, got {value!r}")
    return float(value)


def _get_int(mapping: dict, key: str, ctx: str, default: int) -> int:
    value = mapping.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{ctx}.{key}: expected an integer, got {value!r}")
    return value


def _get_bool(mapping: dict, key: str, ctx: str, default: bool) -> bool:
    value = mapping.get(key, default)
    if not isinstance(value, bool):
        raise ScenarioError(f"{ctx}.{key}: expected a boolean, got {value!r}")
    return value


def _get_point(mapping: dict, key: str, ctx: str, default: tuple[float, float]) -> Point2:
    value = mapping.get(key, list(default))
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
    ):
        raise ScenarioError(f"{ctx}.{key}: expected [x_m, y_m], got {value!r}")
    return Point2(float(value[0]), float(value[1]))


def _parse_strategy(entry, index: int) -> BeamSpec:
    ctx = f"strategies[{index}]"
    entry = _expect_map(entry, ctx)
    _reject_unknown(entry, ("strategy", "theta_ue_rad", "backlobe_suppressed", "gamma_rad"), ctx)
    name = entry.get("strategy")
    if name not in _STRATEGY_NAMES:
        raise ScenarioError(
            f"{ctx}.strategy: expected one of {sorted(_STRATEGY_NAMES)}, got {name!r}"
        )
    strategy = _STRATEGY_NAMES[name]
    theta_ue = None
    if "theta_ue_rad" in entry:
        theta_ue = _get_number(entry, "theta_ue_rad", ctx, 0.0)
    gamma = None
    if "gamma_rad" in entry:
        gamma = _get_number(entry, "gamma_rad", ctx, 0.0)
    backlobe = _get_bool(entry, "backlobe_suppressed", ctx, True)
    try:
        return BeamSpec(
            strategy=strategy,
            theta_ue=theta_ue,
            backlobe_suppressed=backlobe,
            gamma=gamma,
        )
    except ValueError as exc:
        raise ScenarioError(f"{ctx}: {exc}") from exc


def _default_strategies() -> list[BeamSpec]:
    return [
        BeamSpec(strategy=Strategy.OMNIDIRECTIONAL),
        BeamSpec(strategy=Strategy.TRAVEL_AXIS),
        BeamSpec(strategy=Strategy.DOMINANT_EIGENMODE),
    ]


def _parse_scatterers(mapping: dict, ctx: str, default_seed: int):
    _reject_unknown(mapping, ("positions_m", "monostatic_rcs", "random"), ctx)
    if "random" in mapping and "positions_m" in mapping:
        raise ScenarioError(f"{ctx}: give either positions_m or random, not both")
    if "positions_m" in mapping:
        raw = mapping["positions_m"]
        if not isinstance(raw, (list, tuple)) or not raw:
            raise ScenarioError(f"{ctx}.positions_m: expected a non-empty list of [x, y]")
        positions = []
        for i, pair in enumerate(raw):
            positions.append(
                _get_point({"p": pair}, "p", f"{ctx}.positions_m[{i}]", (0.0, 0.0))
            )
        rcs = _get_number(mapping, "monostatic_rcs", ctx, DEFAULT_MONOSTATIC_RCS)
        return ScattererField(positions=tuple(positions), monostatic_rcs=rcs)
    random = _expect_map(mapping.get("random"), f"{ctx}.random")
    _reject_unknown(
        random,
        ("count", "region_m", "seed", "monostatic_rcs", "exclusion_radius_m"),
        f"{ctx}.random",
    )
    region_raw = random.get("region_m", list(DEFAULT_SCATTERER_REGION))
    if (
        not isinstance(region_raw, (list, tuple))
        or len(region_raw) != 4
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in region_raw)
    ):
        raise ScenarioError(
            f"{ctx}.random.region_m: expected [xmin, xmax, ymin, ymax], got {region_raw!r}"
        )
    return RandomField(
        count=_get_int(random, "count", f"{ctx}.random", DEFAULT_SCATTERER_COUNT),
        region=tuple(float(v) for v in region_raw),
        seed=_get_int(random, "seed", f"{ctx}.random", default_seed),
        monostatic_rcs=_get_number(
            random, "monostatic_rcs", f"{ctx}.random", DEFAULT_MONOSTATIC_RCS
        ),
        exclusion_radius=_get_number(
            random, "exclusion_radius_m", f"{ctx}.random", DEFAULT_EXCLUSION_RADIUS_M
        ),
    )


def parse_scenario_dict(doc: dict) -> ScenarioDocument:
    """Validate a scenario mapping and materialize every default."""
    doc = _expect_map(doc, "scenario")
    _reject_unknown(
        doc,
        (
            "schema_version",
            "seed",
            "radio",
            "ue_array",
            "bs_array",
            "trajectory",
            "scatterers",
            "strategies",
            "drop_threshold_db",
            "output",
        ),
        "scenario",
    )
    version = _get_int(doc, "schema_version", "scenario", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioError(
            f"scenario.schema_version: unsupported version {version}, expected {SCHEMA_VERSION}"
        )
    seed = _get_int(doc, "seed", "scenario", 0)

    radio_map = _expect_map(doc.get("radio"), "radio")
    _reject_unknown(
        radio_map, ("carrier_frequency_ghz", "ue_speed_mps", "es_over_n0_db"), "radio"
    )
    carrier_ghz = _get_number(radio_map, "carrier_frequency_ghz", "radio", DEFAULT_CARRIER_GHZ)
    if carrier_ghz <= 0:
        raise ScenarioError(f"radio.carrier_frequency_ghz: must be > 0, got {carrier_ghz}")
    ue_speed = _get_number(radio_map, "ue_speed_mps", "radio", DEFAULT_UE_SPEED_MPS)
    es_n0 = _get_number(radio_map, "es_over_n0_db", "radio", DEFAULT_ES_OVER_N0_DB)
    try:
        radio = RadioConfig(
            carrier_frequency_hz=carrier_ghz * 1e9,
            ue_speed=ue_speed,
            es_over_n0_db=es_n0,
        )
    except ValueError as exc:
        raise ScenarioError(f"radio: {exc}") from exc
    half_wavelength = 0.5 * radio.wavelength

    trajectory_map = _expect_map(doc.get("trajectory"), "trajectory")
    _reject_unknown(
        trajectory_map,
        ("origin_m", "theta_mov_rad", "step_length_m", "num_steps"),
        "trajectory",
    )
    origin = _get_point(trajectory_map, "origin_m", "trajectory", (0.0, 0.0))
    theta_mov = _get_number(trajectory_map, "theta_mov_rad", "trajectory", 0.0)
    step_length = _get_number(
        trajectory_map, "step_length_m", "trajectory", radio.wavelength / 20.0
    )
    num_steps = _get_int(trajectory_map, "num_steps", "trajectory", DEFAULT_NUM_STEPS)

    ue_map = _expect_map(doc.get("ue_array"), "ue_array")
    _reject_unknown(ue_map, ("num_elements", "spacing_m", "broadside_angle_rad"), "ue_array")
    bs_map = _expect_map(doc.get("bs_array"), "bs_array")
    _reject_unknown(
        bs_map, ("num_elements", "spacing_m", "center_m", "broadside_angle_rad"), "bs_array"
    )
    try:
        ue_array = UlaGeometry(
            num_elements=_get_int(ue_map, "num_elements", "ue_array", DEFAULT_UE_ELEMENTS),
            spacing=_get_number(ue_map, "spacing_m", "ue_array", half_wavelength),
            center=origin,
            broadside_angle=_get_number(
                ue_map, "broadside_angle_rad", "ue_array", math.pi / 2
            ),
        )
        bs_array = UlaGeometry(
            num_elements=_get_int(bs_map, "num_elements", "bs_array", DEFAULT_BS_ELEMENTS),
            spacing=_get_number(bs_map, "spacing_m", "bs_array", half_wavelength),
            center=_get_point(bs_map, "center_m", "bs_array", DEFAULT_BS_CENTER),
            broadside_angle=_get_number(bs_map, "broadside_angle_rad", "bs_array", math.pi),
        )
        trajectory = Trajectory(
            origin=origin,
            theta_mov=theta_mov,
            step_length=step_length,
            num_steps=num_steps,
            ue_speed=radio.ue_speed,
        )
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc

    scatterers = _parse_scatterers(
        _expect_map(doc.get("scatterers"), "scatterers"), "scatterers", seed
    )

    if "strategies" in doc:
        raw_strategies = doc["strategies"]
        if not isinstance(raw_strategies, list):
            raise ScenarioError("strategies: expected a list")
        strategies = [_parse_strategy(e, i) for i, e in enumerate(raw_strategies)]
    else:
        strategies = _default_strategies()

    for spec in strategies:
        if spec.strategy is Strategy.TRAVEL_AXIS and abs(theta_mov) > math.pi / 2:
            raise ScenarioError(
                f"travel_axis strategy needs |theta_mov| <= pi/2, got {theta_mov}"
            )

    output_map = _expect_map(doc.get("output"), "output")
    _reject_unknown(output_map, ("plot",), "output")
    plot = _get_bool(output_map, "plot", "output", False)

    threshold = _get_number(doc, "drop_threshold_db", "scenario", DEFAULT_THRESHOLD_DB)
    try:
        scenario = Scenario(
            radio=radio,
            ue_array=ue_array,
            bs_array=bs_array,
            scatterers=scatterers,
            trajectory=trajectory,
            strategies=tuple(strategies),
            drop_threshold_db=threshold,
        )
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    return ScenarioDocument(scenario=scenario, seed=seed, plot=plot)


def load_scenario_document(path: str | Path) -> ScenarioDocument:
    """Read and validate a scenario file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ScenarioError(f"{path}: YAML parse error{where}: {exc}") from exc
    if doc is None:
        doc = {}
    return parse_scenario_dict(doc)


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario file and return the validated Scenario."""
    return load_scenario_document(path).scenario


def scenario_to_dict(document: ScenarioDocument) -> dict:
    """Echo a resolved scenario as a mapping that reloads identically."""
    scenario = document.scenario
    radio = scenario.radio
    scatterers = scenario.scatterers
    if isinstance(scatterers, RandomField):
        scatterers_dict = {
            "random": {
                "count": scatterers.count,
                "region_m": [float(v) for v in scatterers.region],
                "seed": scatterers.seed,
                "monostatic_rcs": scatterers.monostatic_rcs,
                "exclusion_radius_m": scatterers.exclusion_radius,
            }
        }
    else:
        scatterers_dict = {
            "positions_m": [[p.x, p.y] for p in scatterers.positions],
            "monostatic_rcs": scatterers.monostatic_rcs,
        }
    strategies = []
    for spec in scenario.strategies:
        entry: dict = {"strategy": spec.strategy.value}
        if spec.theta_ue is not None:
            entry["theta_ue_rad"] = spec.theta_ue
        entry["backlobe_suppressed"] = spec.backlobe_suppressed
        if spec.gamma is not None:
            entry["gamma_rad"] = spec.gamma
        strategies.append(entry)
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": document.seed,
        "radio": {
            "carrier_frequency_ghz": radio.carrier_frequency_hz / 1e9,
            "ue_speed_mps": radio.ue_speed,
            "es_over_n0_db": radio.es_over_n0_db,
        },
        "ue_array": {
            "num_elements": scenario.ue_array.num_elements,
            "spacing_m": scenario.ue_array.spacing,
            "broadside_angle_rad": scenario.ue_array.broadside_angle,
        },
        "bs_array": {
            "num_elements": scenario.bs_array.num_elements,
            "spacing_m": scenario.bs_array.spacing,
            "center_m": [scenario.bs_array.center.x, scenario.bs_array.center.y],
            "broadside_angle_rad": scenario.bs_array.broadside_angle,
        },
        "trajectory": {
            "origin_m": [scenario.trajectory.origin.x, scenario.trajectory.origin.y],
            "theta_mov_rad": scenario.trajectory.theta_mov,
            "step_length_m": scenario.trajectory.step_length,
            "num_steps": scenario.trajectory.num_steps,
        },
        "scatterers": scatterers_dict,
        "strategies": strategies,
        "drop_threshold_db": scenario.drop_threshold_db,
        "output": {"plot": document.plot},
    }


# ---------------------------------------------------------------------------
# output emission

def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_yaml(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yaml.safe_dump(payload, fh, sort_keys=True, default_flow_style=False)


def _coherence_payload(report: CoherenceReport) -> dict:
    return {
        entry.label: {
            "snr0_db": entry.snr0_db,
            "coherence_distance_m": entry.coherence_distance_m,
            "reached": entry.coherence_distance_m is not None,
        }
        for entry in report.entries
    }


def _render_traces_svg(traces: list[SnrTrace], path: Path) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for trace in traces:
        ax.plot(
            [d * 1e3 for d in trace.displacements],
            trace.snr_db,
            label=trace.strategy.label,
        )
    ax.set_xlabel("UE displacement [mm]")
    ax.set_ylabel("post-combining SNR [dB]")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def cmd_run(document: ScenarioDocument, out_dir: str | Path) -> RunReport:
    """Run one trajectory and write the trace CSV plus the run report."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = document.scenario
    traces = run_trajectory(scenario)
    report = coherence_report(traces, scenario.drop_threshold_db)

    header = ["step", "displacement_m"] + [f"snr_db_{t.strategy.label}" for t in traces]
    rows = [
        [k, traces[0].displacements[k]] + [t.snr_db[k] for t in traces]
        for k in range(scenario.trajectory.num_steps)
    ]
    _write_csv(out / "trace.csv", header, rows)

    run_report = RunReport(
        tool_version=__version__,
        seed=document.seed,
        scenario=scenario_to_dict(document),
        traces_csv="trace.csv",
        threshold_db=scenario.drop_threshold_db,
        coherence=report,
    )
    _write_yaml(
        out / "report.yaml",
        {
            "tool_version": run_report.tool_version,
            "seed": run_report.seed,
            "scenario": run_report.scenario,
            "traces_csv": run_report.traces_csv,
            "threshold_db": run_report.threshold_db,
            "coherence": _coherence_payload(report),
        },
    )
    if document.plot:
        _render_traces_svg(traces, out / "snr_traces.svg")
    return run_report


def cmd_doppler(params: DopplerParams, grid_size: int, out_dir: str | Path) -> dict:
    """Export the spread-vs-offset profile and both optimum estimates."""
    if grid_size < 3:
        raise ScenarioError(f"--grid must be >= 3, got {grid_size}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid_step = math.pi / (grid_size - 1)
    grid = np.linspace(-math.pi / 2, math.pi / 2, grid_size)
    # seam rows at +-gamma are always present so the two branches can be
    # compared at the exact boundary
    thetas = sorted(set(float(t) for t in grid) | {-params.gamma, params.gamma})
    rows = []
    for theta in thetas:
        result = worst_case_spread(theta, params)
        rows.append([theta, result.spread_hz, result.branch.value])
    _write_csv(out / "doppler.csv", ["theta_rad", "spread_hz", "branch"], rows)

    bf_offset, bf_spread = brute_force_optimal_offset(params, grid_size)
    payload = {
        "tool_version": __version__,
        "params": {
            "ue_speed_mps": params.ue_speed,
            "carrier_frequency_ghz": params.carrier_frequency_hz / 1e9,
            "gamma_rad": params.gamma,
            "theta_mov_rad": params.theta_mov,
        },
        "grid_size": grid_size,
        "grid_step_rad": grid_step,
        "closed_form": {
            "optimal_offset_rad": 0.0,
            "optimal_theta_ue_rad": optimal_pointing(params),
            "spread_at_optimum_hz": worst_case_spread(0.0, params).spread_hz,
        },
        "brute_force": {
            "optimal_offset_rad": bf_offset,
            "spread_at_optimum_hz": bf_spread,
        },
    }
    _write_yaml(out / "doppler_report.yaml", payload)
    return payload


def cmd_montecarlo(
    document: ScenarioDocument,
    trials: int,
    master_seed: int,
    out_dir: str | Path,
) -> MonteCarloReport:
    """Run the Monte Carlo sweep and write the distribution report."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not isinstance(document.scenario.scatterers, RandomField):
        raise ScenarioError("montecarlo requires a scenario with random scatterers")
    report = monte_carlo(document.scenario, trials=trials, master_seed=master_seed)
    rows = [
        [s.label, s.median_m, s.q25_m, s.q75_m, s.reached, s.not_reached]
        for s in report.per_strategy
    ]
    _write_csv(
        out / "montecarlo.csv",
        ["strategy", "median_m", "q25_m", "q75_m", "reached", "not_reached"],
        rows,
    )
    _write_yaml(
        out / "montecarlo_report.yaml",
        {
            "tool_version": __version__,
            "scenario": scenario_to_dict(document),
            "trials": report.trials,
            "master_seed": report.master_seed,
            "threshold_db": report.threshold_db,
            "failed_trials": report.failed_trials,
            "per_strategy": {
                s.label: {
                    "median_m": s.median_m,
                    "q25_m": s.q25_m,
                    "q75_m": s.q75_m,
                    "reached": s.reached,
                    "not_reached": s.not_reached,
                }
                for s in report.per_strategy
            },
        },
    )
    return report


# ---------------------------------------------------------------------------
# argument parsing and dispatch

def _doppler_params_from(document: ScenarioDocument | None) -> DopplerParams:
    if document is None:
        return DopplerParams(
            ue_speed=DEFAULT_UE_SPEED_MPS,
            carrier_frequency_hz=DEFAULT_CARRIER_GHZ * 1e9,
            gamma=math.pi / 6,
            theta_mov=0.0,
        )
    scenario = document.scenario
    gammas = [s.gamma for s in scenario.strategies if s.gamma is not None]
    gamma = gammas[0] if gammas else ula_halfwidth(scenario.ue_array.num_elements)
    return DopplerParams(
        ue_speed=scenario.radio.ue_speed,
        carrier_frequency_hz=scenario.radio.carrier_frequency_hz,
        gamma=gamma,
        theta_mov=scenario.trajectory.theta_mov,
    )


def _apply_overrides(document: ScenarioDocument, args) -> ScenarioDocument:
    scenario = document.scenario
    seed = document.seed
    if getattr(args, "seed", None) is not None:
        seed = args.seed
        if isinstance(scenario.scatterers, RandomField):
            scenario = replace(
                scenario, scatterers=replace(scenario.scatterers, seed=args.seed)
            )
        elif args.command == "run":
            raise ScenarioError("--seed requires a scenario with random scatterers")
    if getattr(args, "threshold_db", None) is not None:
        if not args.threshold_db > 0:
            raise ScenarioError(f"--threshold-db must be > 0, got {args.threshold_db}")
        scenario = replace(scenario, drop_threshold_db=args.threshold_db)
    return ScenarioDocument(scenario=scenario, seed=seed, plot=document.plot)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="travelbeam",
        description="Link-level study of UE beamforming strategies under mobility",
    )
    parser.add_argument("--version", action="version", version=f"travelbeam {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one trajectory and emit SNR traces")
    run.add_argument("--scenario", required=True, help="scenario YAML file")
    run.add_argument("--out", default="out", help="output directory (default: out)")
    run.add_argument("--seed", type=int, default=None, help="override the scatterer seed")
    run.add_argument(
        "--threshold-db", dest="threshold_db", type=float, default=None,
        help="override the coherence drop threshold",
    )

    doppler = sub.add_parser("doppler", help="export worst-case Doppler spread vs offset")
    doppler.add_argument("--scenario", default=None, help="derive parameters from a scenario")
    doppler.add_argument("--out", default="out", help="output directory (default: out)")
    doppler.add_argument("--grid", type=int, default=1001, help="grid points (default: 1001)")

    mc = sub.add_parser("montecarlo", help="coherence statistics over random fields")
    mc.add_argument("--scenario", required=True, help="scenario YAML file")
    mc.add_argument("--out", default="out", help="output directory (default: out)")
    mc.add_argument("--trials", type=int, default=100, help="number of trials (default: 100)")
    mc.add_argument("--seed", type=int, default=None, help="master seed (default: scenario seed)")
    mc.add_argument(
        "--threshold-db", dest="threshold_db", type=float, default=None,
        help="override the coherence drop threshold",
    )

    validate = sub.add_parser("validate", help="validate a scenario file and echo it")
    validate.add_argument("--scenario", required=True, help="scenario YAML file")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            document = _apply_overrides(load_scenario_document(args.scenario), args)
            report = cmd_run(document, args.out)
            for entry in report.coherence.entries:
                distance = (
                    f"{entry.coherence_distance_m * 1e3:.3f} mm"
                    if entry.coherence_distance_m is not None
                    else "not reached"
                )
                print(f"{entry.label}: snr0 = {entry.snr0_db:.2f} dB, "
                      f"-{report.threshold_db:g} dB at {distance}")
            return 0
        if args.command == "doppler":
            document = (
                load_scenario_document(args.scenario) if args.scenario else None
            )
            payload = cmd_doppler(_doppler_params_from(document), args.grid, args.out)
            bf = payload["brute_force"]
            print(
                "closed-form optimal offset: 0.0 rad; brute force: "
                f"{bf['optimal_offset_rad']:.6f} rad "
                f"(spread {bf['spread_at_optimum_hz']:.3f} Hz)"
            )
            return 0
        if args.command == "montecarlo":
            if args.trials < 1:
                raise ScenarioError(f"--trials must be >= 1, got {args.trials}")
            document = _apply_overrides(load_scenario_document(args.scenario), args)
            master_seed = args.seed if args.seed is not None else document.seed
            report = cmd_montecarlo(document, args.trials, master_seed, args.out)
            for stats in report.per_strategy:
                print(
                    f"{stats.label}: median = {stats.median_m * 1e3:.3f} mm "
                    f"(q25 {stats.q25_m * 1e3:.3f}, q75 {stats.q75_m * 1e3:.3f}, "
                    f"not reached {stats.not_reached}/{report.trials})"
                )
            return 0
        if args.command == "validate":
            document = load_scenario_document(args.scenario)
            print(yaml.safe_dump(scenario_to_dict(document), sort_keys=True), end="")
            return 0
        raise AssertionError(f"unhandled command {args.command}")
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:  # includes ScenarioError
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
