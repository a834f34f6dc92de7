import numpy as np
import pytest

import handeye.simulate as sim
from handeye import quaternion as quat
from handeye.errors import DegenerateRotationError, ZeroTranslationError
from handeye.geometry import RigidMotion, camera_motion, compose, invert, rotation_angle, rotation_axis
from handeye.simulate import (
    Distribution,
    Formulation,
    NoiseModel,
    NoiseTargets,
    Scenario,
    default_scenario,
    derive_hand_motions,
    error_stats,
    motion_count_sweep,
    noise_sweep,
    perspective_scenario,
    perturb,
)
from handeye.solvers import HandEyeSolution, Method, solve_closed_form

from conftest import random_motion, random_rotation


def _solution(rotation_matrix, translation):
    return HandEyeSolution(
        quat.from_rotation_matrix(rotation_matrix), translation, 0.0, 0.0, Method.CLOSED_FORM
    )


# ---------------------------------------------------------------------------
# scenarios and hand-motion derivation

def test_derive_hand_motions_identity_truth(rng):
    scenario = default_scenario(3, seed=5)
    identity_scenario = Scenario(RigidMotion.identity(), scenario.camera_poses)
    b_motions = derive_hand_motions(identity_scenario)
    poses = scenario.camera_poses
    for i, b in enumerate(b_motions):
        a = camera_motion(poses[i], poses[i + 1])
        assert np.allclose(b.matrix, a.matrix, atol=1e-9)


def test_derive_hand_motions_degenerate_scenario(rng):
    pose = random_motion(rng)
    scenario = Scenario(random_motion(rng, 100.0), (pose, pose, pose))
    with pytest.raises(DegenerateRotationError) as err:
        derive_hand_motions(scenario)
    assert err.value.index == 0


def test_scenario_constraints_solve_back_to_truth():
    for seed in range(10):
        scenario = default_scenario(3, seed)
        rng = sim._generator(seed, 0, 0)
        cons = sim.trial_constraints(scenario, Distribution.GAUSSIAN, 0.0, 0.0, rng)
        sol = solve_closed_form(cons)
        assert np.linalg.norm(sol.rotation_matrix - scenario.ground_truth.rotation) < 1e-8
        rel = np.linalg.norm(sol.translation - scenario.ground_truth.translation)
        assert rel / np.linalg.norm(scenario.ground_truth.translation) < 1e-8


def test_default_scenario_shape_and_norms():
    scenario = default_scenario(2, seed=0)
    assert len(scenario.camera_poses) == 3
    assert scenario.formulation is Formulation.CLASSICAL
    assert np.linalg.norm(scenario.ground_truth.translation) == pytest.approx(157.0, abs=1e-9)
    with pytest.raises(ValueError):
        default_scenario(1, seed=0)


def test_default_scenario_geometry_guarantees():
    # motion angles, axis separations, and pose distances over many seeds
    limit = np.cos(np.radians(15.0) - 1e-12)
    for seed in range(1000):
        scenario = default_scenario(3, seed)
        axes = []
        for i in range(1, len(scenario.camera_poses)):
            motion = camera_motion(scenario.camera_poses[i - 1], scenario.camera_poses[i])
            angle = rotation_angle(motion.rotation)
            assert np.radians(20.0) - 1e-9 <= angle <= np.radians(90.0) + 1e-9
            axes.append(rotation_axis(motion.rotation))
        for i in range(len(axes)):
            for j in range(i + 1, len(axes)):
                assert abs(axes[i] @ axes[j]) <= limit
        for pose in scenario.camera_poses:
            assert 300.0 - 1e-6 <= np.linalg.norm(pose.translation) <= 800.0 + 1e-6


def test_default_scenario_prefix_property():
    small = default_scenario(2, seed=42)
    large = default_scenario(7, seed=42)
    for i in range(3):
        assert np.allclose(
            small.camera_poses[i].matrix, large.camera_poses[i].matrix, atol=1e-15
        )


def test_perspective_scenario_equivalent_truth():
    for seed in range(20):
        classical = default_scenario(3, seed)
        persp = perspective_scenario(3, seed)
        assert persp.formulation is Formulation.PERSPECTIVE
        recovered = compose(classical.camera_poses[0], persp.ground_truth)
        assert np.allclose(recovered.matrix, classical.ground_truth.matrix, atol=1e-9)
        reduced = sim.camera_relative_motions(persp)
        for i, motion in enumerate(reduced):
            expected = compose(invert(classical.camera_poses[0]), classical.camera_poses[i + 1])
            assert np.allclose(motion.matrix, expected.matrix, atol=1e-7)


# ---------------------------------------------------------------------------
# perturbation

def test_perturb_zero_level_returns_same_object(rng):
    motion = random_motion(rng)
    noise = NoiseModel(Distribution.GAUSSIAN, 0.0, NoiseTargets.ROTATION_AND_TRANSLATION, 0)
    out = perturb(motion, noise, sim._generator(0))
    assert out is motion


def test_perturb_rotation_only_keeps_translation(rng):
    motion = random_motion(rng)
    noise = NoiseModel(Distribution.GAUSSIAN, 0.05, NoiseTargets.ROTATION, 0)
    out = perturb(motion, noise, sim._generator(1))
    assert np.array_equal(out.translation, motion.translation)
    assert not np.allclose(out.rotation, motion.rotation, atol=1e-12)


def test_perturb_preserves_rotation_angle(rng):
    noise = NoiseModel(Distribution.UNIFORM, 0.08, NoiseTargets.ROTATION_AND_TRANSLATION, 0)
    stream = sim._generator(3)
    for _ in range(50):
        motion = random_motion(rng)
        out = perturb(motion, noise, stream)
        assert rotation_angle(out.rotation) == pytest.approx(
            rotation_angle(motion.rotation), abs=1e-9
        )
        assert np.linalg.norm(rotation_axis(out.rotation)) == pytest.approx(1.0, abs=1e-12)


def test_perturb_requires_defined_axis(rng):
    noise = NoiseModel(Distribution.GAUSSIAN, 0.05, NoiseTargets.ROTATION, 0)
    with pytest.raises(DegenerateRotationError):
        perturb(RigidMotion.identity(), noise, sim._generator(0))


def test_noise_calibration_gaussian():
    # level 0.06 means standard deviation 0.03
    samples = sim._noise_samples(sim._generator(7), Distribution.GAUSSIAN, 0.06, 100000)
    assert abs(samples.std() - 0.03) / 0.03 < 0.02
    assert abs(samples.mean()) < 0.001


def test_noise_calibration_uniform():
    # level is the full width: std = level / sqrt(12), support inside +-level/2
    samples = sim._noise_samples(sim._generator(8), Distribution.UNIFORM, 0.06, 100000)
    expected = 0.06 / np.sqrt(12.0)
    assert abs(samples.std() - expected) / expected < 0.02
    assert np.abs(samples).max() <= 0.03


def test_translation_noise_scales_with_nominal(rng):
    motion = random_motion(rng, 100.0)
    noise = NoiseModel(Distribution.GAUSSIAN, 0.02, NoiseTargets.ROTATION_AND_TRANSLATION, 0)
    deltas = []
    stream = sim._generator(11)
    for _ in range(2000):
        out = perturb(motion, noise, stream, translation_scale=500.0)
        deltas.append(out.translation - motion.translation)
    std = np.array(deltas).std()
    assert abs(std - 0.01 * 500.0) / (0.01 * 500.0) < 0.05


# ---------------------------------------------------------------------------
# error statistics

def test_error_stats_exact_estimates(rng):
    truth = random_motion(rng, 100.0)
    sols = [_solution(truth.rotation, truth.translation) for _ in range(5)]
    e_rot, e_tr = error_stats(sols, truth)
    # the quaternion round trip of the stored rotation costs a few ulp
    assert e_rot == pytest.approx(0.0, abs=1e-12)
    assert e_tr == 0.0


def test_error_stats_half_turn_offset(rng):
    # R~ = diag(1,-1,-1) R differs from R by exactly sqrt(8) in Frobenius norm
    truth = random_motion(rng, 100.0)
    flipped = np.diag([1.0, -1.0, -1.0]) @ truth.rotation
    sols = [_solution(flipped, truth.translation)]
    e_rot, e_tr = error_stats(sols, truth)
    assert e_rot == pytest.approx(np.sqrt(8.0), rel=1e-12)
    assert e_tr == 0.0


def test_error_stats_translation_homogeneity(rng):
    truth = random_motion(rng, 100.0)
    offset = rng.normal(size=3)
    once = [_solution(truth.rotation, truth.translation + offset)]
    twice = [_solution(truth.rotation, truth.translation + 2 * offset)]
    assert error_stats(twice, truth)[1] == pytest.approx(2 * error_stats(once, truth)[1], rel=1e-12)


def test_error_stats_rejects_zero_translation(rng):
    truth = RigidMotion(random_rotation(rng), np.zeros(3))
    with pytest.raises(ZeroTranslationError):
        error_stats([_solution(truth.rotation, truth.translation)], truth)
    with pytest.raises(ValueError):
        error_stats([], random_motion(rng))


# ---------------------------------------------------------------------------
# sweeps

def test_noise_sweep_zero_level_recovers_exactly():
    scenario = default_scenario(2, seed=0)
    noise = NoiseModel(Distribution.GAUSSIAN, 0.0, NoiseTargets.ROTATION_AND_TRANSLATION, 0)
    report = noise_sweep(scenario, [0.0], noise, trials=2)
    assert len(report.rows) == 3
    for row in report.rows:
        assert row.e_rot <= 1e-8
        assert row.e_tr <= 1e-8
        assert row.failed_trials == 0
    assert report.t_norm == pytest.approx(157.0, abs=1e-9)


def test_noise_sweep_deterministic():
    scenario = default_scenario(2, seed=1)
    noise = NoiseModel(Distribution.UNIFORM, 0.04, NoiseTargets.ROTATION_AND_TRANSLATION, 9)
    first = noise_sweep(scenario, [0.02, 0.04], noise, trials=20)
    second = noise_sweep(scenario, [0.02, 0.04], noise, trials=20)
    assert first == second


def test_noise_sweep_methods_see_identical_data():
    # dropping methods must not change the remaining rows
    scenario = default_scenario(2, seed=2)
    noise = NoiseModel(Distribution.GAUSSIAN, 0.05, NoiseTargets.ROTATION_AND_TRANSLATION, 3)
    full = noise_sweep(scenario, [0.05], noise, trials=25)
    only_tsai = noise_sweep(scenario, [0.05], noise, trials=25, methods=[Method.TSAI_LENZ])
    tsai_row = [r for r in full.rows if r.method is Method.TSAI_LENZ][0]
    assert tsai_row == only_tsai.rows[0]


def test_noise_sweep_nonlinear_leads_at_high_noise():
    scenario = default_scenario(2, seed=0)
    noise = NoiseModel(Distribution.GAUSSIAN, 0.0, NoiseTargets.ROTATION_AND_TRANSLATION, 0)
    report = noise_sweep(scenario, [0.06], noise, trials=150)
    by_method = {row.method: row for row in report.rows}
    nl = by_method[Method.NONLINEAR]
    for other in (Method.TSAI_LENZ, Method.CLOSED_FORM):
        assert nl.e_rot <= by_method[other].e_rot
        assert nl.e_tr <= by_method[other].e_tr


def test_motion_count_sweep_zero_noise_single_trial():
    report = motion_count_sweep(
        lambda n: default_scenario(n, 4), [2, 3], rot_level=0.0, trans_level=0.0, trials=1
    )
    for row in report.rows:
        assert row.e_rot <= 1e-8
        assert row.e_tr <= 1e-8


def test_motion_count_sweep_row_layout():
    report = motion_count_sweep(
        lambda n: default_scenario(n, 4), [2, 4], trials=5, seed=1
    )
    assert [int(r.sweep_var) for r in report.rows] == [2, 2, 2, 4, 4, 4]
    assert report.trials == 5
