"""Trajectory-level SNR evolution and coherence-distance experiments.

One run steps the UE along its trajectory, synthesizes the composite
channel at every step, and evaluates each beamforming strategy with its
UE weights and its t = 0 MRC combiner both held fixed: the resulting SNR
trace shows how quickly each strategy's link decays with displacement.
Coherence distance is the displacement of the first drop of
``threshold_db`` below the t = 0 SNR. Monte Carlo repeats the experiment
over randomized scatterer fields.

The closed-form spread analysis assumes rich scattering in every
main-lobe direction. Sparse fields break that correspondence: a beam
pointed at empty space decorrelates on sidelobe leakage alone, and a
single dominant path never decorrelates. Keep enough scatterers around
the travel axis (the default random region does) when comparing
simulation against the analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .beamforming import BeamSpec, Strategy, gain_mask_for, mrc_combiner, post_snr, ue_weights
from .channel import RadioConfig, ScattererField, assemble_channel, build_h2
from .geometry import GeometryError, Point2, Trajectory, UlaGeometry, ue_position_at


@dataclass(frozen=True)
class RandomField:
    """Uniform random scatterers in a rectangle, minus exclusion disks.

    The rectangle is (xmin, xmax, ymin, ymax) in meters; samples closer
    than ``exclusion_radius`` to either array center are rejected and
    redrawn. Deterministic for a fixed ``seed``.
    """

    count: int
    region: tuple[float, float, float, float]
    seed: int
    monostatic_rcs: float = 0.5
    exclusion_radius: float = 0.5

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        xmin, xmax, ymin, ymax = self.region
        if not (xmax > xmin and ymax > ymin):
            raise ValueError(f"empty region {self.region}")


@dataclass(frozen=True)
class Scenario:
    """Everything one trajectory experiment needs."""

    radio: RadioConfig
    ue_array: UlaGeometry
    bs_array: UlaGeometry
    scatterers: ScattererField | RandomField
    trajectory: Trajectory
    strategies: tuple[BeamSpec, ...]
    drop_threshold_db: float = 3.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategies", tuple(self.strategies))
        if len(self.strategies) < 1:
            raise ValueError("at least one beamforming strategy is required")
        labels = [s.label for s in self.strategies]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate strategy labels: {labels}")
        if not self.drop_threshold_db > 0:
            raise ValueError(
                f"drop_threshold_db must be > 0, got {self.drop_threshold_db}"
            )


@dataclass
class SnrTrace:
    """Per-strategy SNR along the trajectory; displacements in meters."""

    strategy: BeamSpec
    displacements: list[float]
    snr_db: list[float]
    snr0_db: float


@dataclass
class StrategyCoherence:
    label: str
    snr0_db: float
    coherence_distance_m: float | None  # None when the drop is never reached


@dataclass
class CoherenceReport:
    threshold_db: float
    entries: list[StrategyCoherence]


@dataclass
class StrategyStats:
    label: str
    median_m: float
    q25_m: float
    q75_m: float
    reached: int
    not_reached: int


@dataclass
class MonteCarloReport:
    trials: int
    master_seed: int
    threshold_db: float
    failed_trials: int
    per_strategy: list[StrategyStats]


def materialize_scatterers(scenario: Scenario) -> ScattererField:
    """Resolve a scenario's scatterers, sampling a RandomField if needed."""
    field = scenario.scatterers
    if isinstance(field, ScattererField):
        return field
    rng = np.random.default_rng(field.seed)
    xmin, xmax, ymin, ymax = field.region
    centers = (scenario.ue_array.center, scenario.bs_array.center)
    points: list[Point2] = []
    attempts = 0
    max_attempts = 10000 * field.count
    while len(points) < field.count:
        if attempts >= max_attempts:
            raise GeometryError(
                f"could not place {field.count} scatterers in {field.region} "
                f"outside the {field.exclusion_radius} m exclusion disks"
            )
        attempts += 1
        x = rng.uniform(xmin, xmax)
        y = rng.uniform(ymin, ymax)
        if any(math.hypot(x - c.x, y - c.y) < field.exclusion_radius for c in centers):
            continue
        points.append(Point2(x, y))
    return ScattererField(positions=tuple(points), monostatic_rcs=field.monostatic_rcs)


def run_trajectory(scenario: Scenario) -> list[SnrTrace]:
    """SNR traces for every strategy of the scenario.

    Per strategy: the UE weights are fixed up front (eigenmode
    transmission derives them from the full t = 0 channel with unit
    gains), the BS combiner is matched to the t = 0 effective channel,
    and both stay frozen while the UE moves. Gain masks and scatterer
    amplitudes are recomputed at every step because both depend on the
    current UE position.
    """
    field = materialize_scatterers(scenario)
    radio = scenario.radio
    trajectory = scenario.trajectory
    bs_array = scenario.bs_array
    h2 = build_h2(bs_array, field, radio)
    steps = list(range(trajectory.num_steps))
    ue_arrays = [ue_position_at(trajectory, scenario.ue_array, k) for k in steps]
    displacements = [trajectory.displacement_at(k) for k in steps]

    h0_unmasked = None
    if any(s.strategy is Strategy.DOMINANT_EIGENMODE for s in scenario.strategies):
        h0_unmasked = assemble_channel(
            field, ue_arrays[0], bs_array, radio,
            np.ones(field.num_scatterers), h2=h2,
        ).h

    traces = []
    for spec in scenario.strategies:
        w_ue = ue_weights(spec, trajectory, scenario.ue_array.num_elements, h0=h0_unmasked)
        w_bs = None
        snr_db = []
        for k in steps:
            mask = gain_mask_for(spec, ue_arrays[k], field)
            snapshot = assemble_channel(
                field, ue_arrays[k], bs_array, radio, mask,
                h2=h2, displacement=displacements[k],
            )
            if k == 0:
                w_bs = mrc_combiner(snapshot.h @ w_ue).w_bs
            snr_db.append(post_snr(w_bs, snapshot.h, w_ue, radio))
        traces.append(
            SnrTrace(
                strategy=spec,
                displacements=list(displacements),
                snr_db=snr_db,
                snr0_db=snr_db[0],
            )
        )
    return traces


def coherence_distance(trace: SnrTrace, threshold_db: float) -> float | None:
    """Displacement of the first drop of ``threshold_db`` below SNR(0).

    Linear interpolation between the first pair of samples straddling
    the target level; None when the trace never drops that far.
    """
    if not trace.snr_db:
        raise ValueError("empty trace")
    target = trace.snr0_db - threshold_db
    for k in range(1, len(trace.snr_db)):
        if trace.snr_db[k] <= target:
            prev, curr = trace.snr_db[k - 1], trace.snr_db[k]
            d_prev, d_curr = trace.displacements[k - 1], trace.displacements[k]
            if math.isinf(curr):
                return d_curr
            frac = (prev - target) / (prev - curr)
            return d_prev + frac * (d_curr - d_prev)
    return None


def coherence_report(traces: list[SnrTrace], threshold_db: float) -> CoherenceReport:
    entries = [
        StrategyCoherence(
            label=t.strategy.label,
            snr0_db=t.snr0_db,
            coherence_distance_m=coherence_distance(t, threshold_db),
        )
        for t in traces
    ]
    return CoherenceReport(threshold_db=threshold_db, entries=entries)


def monte_carlo(scenario: Scenario, trials: int, master_seed: int) -> MonteCarloReport:
    """Coherence-distance distribution over randomized scatterer fields.

    Trial ``i`` re-seeds the scenario's RandomField with
    ``master_seed + i``, so a report is reproducible from
    (scenario, trials, master_seed) alone and trial 0 of master seed s
    equals a single run with seed s. Traces that never reach the drop
    enter the quantiles as +inf; trials with degenerate geometry are
    counted and skipped.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not isinstance(scenario.scatterers, RandomField):
        raise ValueError("monte_carlo requires a scenario with a RandomField")
    labels = [s.label for s in scenario.strategies]
    distances: dict[str, list[float]] = {label: [] for label in labels}
    failed = 0
    for trial in range(trials):
        trial_field = replace(scenario.scatterers, seed=master_seed + trial)
        trial_scenario = replace(scenario, scatterers=trial_field)
        try:
            traces = run_trajectory(trial_scenario)
        except GeometryError:
            failed += 1
            continue
        for label, trace in zip(labels, traces):
            d = coherence_distance(trace, scenario.drop_threshold_db)
            distances[label].append(d if d is not None else math.inf)
    if failed == trials:
        raise GeometryError(f"all {trials} Monte Carlo trials failed")

    per_strategy = []
    for label in labels:
        values = np.array(distances[label])
        # order-statistic quantiles stay finite-arithmetic even when
        # not-reached (+inf) entries dominate
        q25, median, q75 = np.quantile(values, [0.25, 0.5, 0.75], method="lower")
        reached = int(np.isfinite(values).sum())
        per_strategy.append(
            StrategyStats(
                label=label,
                median_m=float(median),
                q25_m=float(q25),
                q75_m=float(q75),
                reached=reached,
                not_reached=len(values) - reached,
            )
        )
    return MonteCarloReport(
        trials=trials,
        master_seed=master_seed,
        threshold_db=scenario.drop_threshold_db,
        failed_trials=failed,
        per_strategy=per_strategy,
    )
