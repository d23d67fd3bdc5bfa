"""Tests for trajectory runs, coherence extraction and Monte Carlo sweeps."""

import math
from dataclasses import replace

import numpy as np
import pytest

from travelbeam.beamforming import BeamSpec, Strategy, gain_mask_for, ue_weights
from travelbeam.channel import (
    RadioConfig,
    ScattererField,
    bistatic_alpha,
    nusw_gain,
)
from travelbeam.geometry import GeometryError, Point2, Trajectory, UlaGeometry, ue_position_at
from travelbeam.sim import (
    RandomField,
    Scenario,
    SnrTrace,
    coherence_distance,
    coherence_report,
    materialize_scatterers,
    monte_carlo,
    run_trajectory,
)

RADIO = RadioConfig(carrier_frequency_hz=10e9)
LAMBDA = RADIO.wavelength


def make_scenario(
    scatterers,
    strategies,
    ue_broadside=math.pi / 2,
    num_steps=20,
    theta_mov=0.0,
    num_ue=4,
    num_bs=16,
):
    origin = Point2(0.0, 0.0)
    return Scenario(
        radio=RADIO,
        ue_array=UlaGeometry(num_ue, LAMBDA / 2, origin, ue_broadside),
        bs_array=UlaGeometry(num_bs, LAMBDA / 2, Point2(10.0, 0.0), math.pi),
        scatterers=scatterers,
        trajectory=Trajectory(origin, theta_mov, LAMBDA / 20, num_steps, 30.0),
        strategies=tuple(strategies),
    )


FIELD = ScattererField(
    (Point2(0.5, 3.0), Point2(-1.0, 2.0), Point2(1.5, 4.0), Point2(-0.3, 5.0)),
    monostatic_rcs=0.5,
)


def test_scenario_validation():
    with pytest.raises(ValueError):
        make_scenario(FIELD, [])
    with pytest.raises(ValueError):
        make_scenario(FIELD, [BeamSpec(Strategy.TRAVEL_AXIS), BeamSpec(Strategy.TRAVEL_AXIS)])
    with pytest.raises(ValueError):
        replace(make_scenario(FIELD, [BeamSpec(Strategy.TRAVEL_AXIS)]), drop_threshold_db=0.0)


def test_static_trajectory_single_point():
    scenario = make_scenario(FIELD, [BeamSpec(Strategy.TRAVEL_AXIS)], num_steps=1)
    (trace,) = run_trajectory(scenario)
    assert trace.displacements == [0.0]
    assert len(trace.snr_db) == 1
    assert trace.snr0_db == trace.snr_db[0]


def test_snr0_equals_mrc_bound_for_every_strategy():
    scenario = make_scenario(
        FIELD,
        [
            BeamSpec(Strategy.OMNIDIRECTIONAL),
            BeamSpec(Strategy.TRAVEL_AXIS),
            BeamSpec(Strategy.DOMINANT_EIGENMODE),
        ],
        num_steps=4,
    )
    from travelbeam.channel import assemble_channel, build_h2

    traces = run_trajectory(scenario)
    h2 = build_h2(scenario.bs_array, FIELD, RADIO)
    h0_ones = assemble_channel(
        FIELD, scenario.ue_array, scenario.bs_array, RADIO, np.ones(4), h2=h2
    ).h
    for trace in traces:
        spec = trace.strategy
        w = ue_weights(spec, scenario.trajectory, 4, h0=h0_ones)
        mask = gain_mask_for(spec, scenario.ue_array, FIELD)
        h0 = assemble_channel(
            FIELD, scenario.ue_array, scenario.bs_array, RADIO, mask, h2=h2
        ).h
        expected = RADIO.es_over_n0_linear * np.linalg.norm(h0 @ w) ** 2
        assert 10 ** (trace.snr0_db / 10) == pytest.approx(expected, rel=1e-10)


def test_single_path_scalar_chain_oracle():
    # hand-rolled 1x1 chain: |h2 * alpha_k * h1_k| drives the whole trace
    scatterer = Point2(1.5, 2.0)
    field = ScattererField((scatterer,), monostatic_rcs=0.5)
    scenario = make_scenario(
        field, [BeamSpec(Strategy.OMNIDIRECTIONAL)], num_steps=6, num_ue=1, num_bs=1
    )
    (trace,) = run_trajectory(scenario)
    bs_center = scenario.bs_array.center
    h2 = nusw_gain(bs_center, scatterer, LAMBDA)
    for k in range(6):
        ue_k = ue_position_at(scenario.trajectory, scenario.ue_array, k).center
        h1 = nusw_gain(scatterer, ue_k, LAMBDA)
        alpha = bistatic_alpha(scatterer, ue_k, bs_center, 0.5)
        expected_db = RADIO.es_over_n0_db + 20 * math.log10(abs(h2 * alpha * h1))
        assert trace.snr_db[k] == pytest.approx(expected_db, rel=1e-10)


def test_eigenmode_step0_never_loses():
    rng = np.random.default_rng(61)
    for trial in range(10):
        pts = tuple(
            Point2(rng.uniform(-3, 3), rng.uniform(1.0, 6.0)) for _ in range(8)
        )
        field = ScattererField(pts, monostatic_rcs=0.5)
        scenario = make_scenario(
            field,
            [
                BeamSpec(Strategy.OMNIDIRECTIONAL),
                BeamSpec(Strategy.TRAVEL_AXIS, backlobe_suppressed=False),
                BeamSpec(Strategy.STEERED_AT, theta_ue=0.5, backlobe_suppressed=False),
                BeamSpec(Strategy.DOMINANT_EIGENMODE),
            ],
            num_steps=2,
        )
        traces = {t.strategy.strategy: t.snr0_db for t in run_trajectory(scenario)}
        top = traces.pop(Strategy.DOMINANT_EIGENMODE)
        for snr0 in traces.values():
            assert top >= snr0 - 1e-9


def test_fixed_beam_determinism():
    scenario = make_scenario(
        RandomField(count=6, region=(-2.0, 2.0, 1.0, 5.0), seed=3),
        [BeamSpec(Strategy.TRAVEL_AXIS), BeamSpec(Strategy.OMNIDIRECTIONAL)],
        num_steps=15,
    )
    first = run_trajectory(scenario)
    second = run_trajectory(scenario)
    for a, b in zip(first, second):
        assert a.snr_db == b.snr_db
        assert a.displacements == b.displacements


def test_gain_mask_recomputed_as_scatterer_falls_behind():
    # one scatterer barely ahead: travel-axis loses it mid-trajectory
    scatterer = Point2(2.0, 0.02)
    field = ScattererField((scatterer,), monostatic_rcs=0.5)
    scenario = make_scenario(field, [BeamSpec(Strategy.TRAVEL_AXIS)], num_steps=60)
    front = gain_mask_for(
        BeamSpec(Strategy.TRAVEL_AXIS),
        ue_position_at(scenario.trajectory, scenario.ue_array, 0),
        field,
    )
    back = gain_mask_for(
        BeamSpec(Strategy.TRAVEL_AXIS),
        ue_position_at(scenario.trajectory, scenario.ue_array, 59),
        field,
    )
    assert front[0] == math.sqrt(2.0)
    assert back[0] == 0.0
    (trace,) = run_trajectory(scenario)
    assert math.isfinite(trace.snr_db[0])
    assert trace.snr_db[-1] == -math.inf


def test_zero_effective_channel_raises_geometry_error():
    # the only scatterer is behind the array: travel-axis estimates nothing
    field = ScattererField((Point2(0.0, -3.0),), monostatic_rcs=0.5)
    scenario = make_scenario(field, [BeamSpec(Strategy.TRAVEL_AXIS)], num_steps=3)
    with pytest.raises(GeometryError):
        run_trajectory(scenario)


# ---------------------------------------------------------------------------
# coherence distance

def flat_trace(levels, step=0.001):
    return SnrTrace(
        strategy=BeamSpec(Strategy.OMNIDIRECTIONAL),
        displacements=[k * step for k in range(len(levels))],
        snr_db=list(levels),
        snr0_db=levels[0],
    )


def test_constant_trace_never_reaches():
    assert coherence_distance(flat_trace([5.0] * 10), 3.0) is None


def test_two_sample_interpolation():
    trace = flat_trace([0.0, -6.0])
    assert coherence_distance(trace, 3.0) == pytest.approx(0.0005, rel=1e-12)


def test_synthetic_quadratic_crossing():
    # snr(d) = 10 - 500 d^2 crosses -3 dB at sqrt(3/500)
    step = 0.005
    levels = [10.0 - 500.0 * (k * step) ** 2 for k in range(40)]
    trace = flat_trace(levels, step)
    exact = math.sqrt(3.0 / 500.0)
    estimate = coherence_distance(trace, 3.0)
    assert estimate is not None
    assert abs(estimate - exact) < step


def test_exact_sample_hit():
    trace = flat_trace([0.0, -3.0, -9.0])
    assert coherence_distance(trace, 3.0) == pytest.approx(0.001, rel=1e-12)


def test_coherence_report_labels():
    scenario = make_scenario(
        FIELD, [BeamSpec(Strategy.OMNIDIRECTIONAL), BeamSpec(Strategy.TRAVEL_AXIS)]
    )
    report = coherence_report(run_trajectory(scenario), 3.0)
    assert [e.label for e in report.entries] == ["omnidirectional", "travel_axis"]


# ---------------------------------------------------------------------------
# random fields and Monte Carlo

def test_random_field_is_deterministic_and_respects_bounds():
    scenario = make_scenario(
        RandomField(count=25, region=(-2.0, 2.0, 1.0, 5.0), seed=42),
        [BeamSpec(Strategy.TRAVEL_AXIS)],
    )
    a = materialize_scatterers(scenario)
    b = materialize_scatterers(scenario)
    assert a.positions == b.positions
    assert len(a.positions) == 25
    for p in a.positions:
        assert -2.0 <= p.x <= 2.0 and 1.0 <= p.y <= 5.0
        assert p.distance_to(scenario.ue_array.center) >= 0.5
        assert p.distance_to(scenario.bs_array.center) >= 0.5


def test_random_field_impossible_region_raises():
    scenario = make_scenario(
        RandomField(count=2, region=(-0.1, 0.1, 0.0, 0.2), seed=1),
        [BeamSpec(Strategy.TRAVEL_AXIS)],
    )
    with pytest.raises(GeometryError):
        materialize_scatterers(scenario)


def test_explicit_field_passes_through():
    scenario = make_scenario(FIELD, [BeamSpec(Strategy.TRAVEL_AXIS)])
    assert materialize_scatterers(scenario) is FIELD


def test_monte_carlo_requires_random_field():
    scenario = make_scenario(FIELD, [BeamSpec(Strategy.TRAVEL_AXIS)])
    with pytest.raises(ValueError):
        monte_carlo(scenario, trials=2, master_seed=0)


def test_monte_carlo_deterministic():
    scenario = make_scenario(
        RandomField(count=8, region=(-2.0, 2.0, 1.0, 5.0), seed=0),
        [BeamSpec(Strategy.OMNIDIRECTIONAL), BeamSpec(Strategy.TRAVEL_AXIS)],
        num_steps=30,
    )
    assert monte_carlo(scenario, 5, 7) == monte_carlo(scenario, 5, 7)


def test_monte_carlo_single_trial_matches_direct_run():
    scenario = make_scenario(
        RandomField(count=8, region=(-2.0, 2.0, 1.0, 5.0), seed=0),
        [BeamSpec(Strategy.OMNIDIRECTIONAL), BeamSpec(Strategy.TRAVEL_AXIS)],
        num_steps=30,
    )
    master = 99
    report = monte_carlo(scenario, trials=1, master_seed=master)
    direct = replace(scenario, scatterers=replace(scenario.scatterers, seed=master))
    traces = run_trajectory(direct)
    for stats, trace in zip(report.per_strategy, traces):
        d = coherence_distance(trace, scenario.drop_threshold_db)
        expected = d if d is not None else math.inf
        assert stats.median_m == expected
        assert stats.q25_m == expected
        assert stats.q75_m == expected


def test_monte_carlo_counts_unreached():
    # a huge threshold is never crossed: every trial lands in not_reached
    scenario = replace(
        make_scenario(
            RandomField(count=8, region=(-2.0, 2.0, 1.0, 5.0), seed=0),
            [BeamSpec(Strategy.OMNIDIRECTIONAL)],
            num_steps=10,
        ),
        drop_threshold_db=500.0,
    )
    report = monte_carlo(scenario, trials=3, master_seed=0)
    stats = report.per_strategy[0]
    assert stats.not_reached == 3
    assert stats.median_m == math.inf
