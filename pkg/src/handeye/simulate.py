"""Monte-Carlo stability harness for the three solvers.

A :class:`Scenario` fixes a ground-truth hand-eye transform and a set of
camera poses (or raw perspective matrices); the hand motions are derived
from them, so the noise-free problem is exactly consistent.  The harness
perturbs the relative camera and hand motions, re-solves with every
method on the same perturbed data, and reports RMS rotation and relative
translation errors against the ground truth.

Noise is a ratio: a rotation axis is a unit vector, so each of its
components receives a sample of the stated level directly; translation
components receive level times the nominal translation magnitude of the
scenario (mean motion translation norm over both sides).  ``level`` is
the full width of the uniform window and twice the standard deviation of
the Gaussian.

Reproducibility contract: all randomness comes from Philox (counter-based,
64-bit) streams keyed by (seed, stream id); trial (i, j) of a sweep uses
spawn key (i, j); Gaussian samples are Box-Muller transforms of uniform
pairs.  Reports are therefore bit-identical for identical seeds, and each
trial's stream is independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from . import quaternion as quat
from .errors import CalibrationError, DegenerateRotationError, ZeroTranslationError
from .geometry import (
    MIN_ROTATION_ANGLE,
    Intrinsics,
    MotionConstraint,
    PerspectiveMatrix,
    RigidMotion,
    camera_motion,
    compose,
    invert,
    motion_constraint,
    reduced_motion,
    rotation_angle,
    rotation_axis,
)
from .solvers import HandEyeSolution, Method, SOLVERS

DEFAULT_METHODS = (Method.TSAI_LENZ, Method.CLOSED_FORM, Method.NONLINEAR)

# Default nominal length of the ground-truth translation, in mm.
GROUND_TRUTH_TRANSLATION_MM = 157.0

# Camera-pose generator parameters (mm / rad): the camera stays inside a
# working shell around the calibration target while the motion between
# consecutive positions keeps a healthy rotation and a modest travel.
_POSE_DISTANCE = (300.0, 800.0)
_START_DISTANCE = (450.0, 650.0)
_CENTER_STEP = (230.0, 390.0)
_MOTION_ANGLE = (np.radians(20.0), np.radians(90.0))
_MIN_AXIS_SEPARATION = np.radians(15.0)


class Distribution(str, Enum):
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"


class NoiseTargets(str, Enum):
    ROTATION = "rotation"
    ROTATION_AND_TRANSLATION = "rotation-translation"


class Formulation(str, Enum):
    CLASSICAL = "classical"
    PERSPECTIVE = "perspective"


@dataclass(frozen=True)
class NoiseModel:
    """Noise configuration: distribution, ratio level, what it perturbs."""

    distribution: Distribution = Distribution.GAUSSIAN
    level: float = 0.0
    targets: NoiseTargets = NoiseTargets.ROTATION_AND_TRANSLATION
    seed: int = 0

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("noise level must be non-negative")


@dataclass(frozen=True, eq=False)
class Scenario:
    """Ground truth plus the camera side of every position.

    ``camera_poses`` holds RigidMotion entries for the classical
    formulation and PerspectiveMatrix entries for the perspective one;
    ``ground_truth`` is the transform the corresponding formulation
    estimates.
    """

    ground_truth: RigidMotion
    camera_poses: tuple
    formulation: Formulation = Formulation.CLASSICAL


@dataclass(frozen=True)
class ReportRow:
    sweep_var: float
    method: Method
    e_rot: float
    e_tr: float
    failed_trials: int


@dataclass(frozen=True)
class StabilityReport:
    """Per-sweep-point, per-method error statistics."""

    rows: tuple[ReportRow, ...]
    trials: int
    t_norm: float  # ground-truth translation magnitude, mm


# ---------------------------------------------------------------------------
# random streams

def _generator(seed: int, *stream: int) -> np.random.Generator:
    root = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=stream)
    return np.random.Generator(np.random.Philox(root))


def _noise_samples(
    rng: np.random.Generator, distribution: Distribution, level: float, size: int
) -> np.ndarray:
    """Zero-centered samples at the stated ratio level.

    Uniform: width ``level`` (support [-level/2, +level/2]).  Gaussian:
    standard deviation ``level / 2``, via Box-Muller on uniform pairs.
    """
    if level == 0.0:
        return np.zeros(size)
    if distribution == Distribution.UNIFORM:
        return level * (rng.random(size) - 0.5)
    u1 = rng.random(size)
    u2 = rng.random(size)
    return 0.5 * level * np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)


def _random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    while True:
        v = _noise_samples(rng, Distribution.GAUSSIAN, 2.0, 3)
        norm = np.linalg.norm(v)
        if norm > 1e-9:
            return v / norm


def _random_unit_quaternion(rng: np.random.Generator) -> np.ndarray:
    while True:
        q = _noise_samples(rng, Distribution.GAUSSIAN, 2.0, 4)
        norm = np.linalg.norm(q)
        if norm > 1e-9:
            return quat.canonicalize(q / norm)


def _uniform_in(rng: np.random.Generator, lo: float, hi: float) -> float:
    return lo + (hi - lo) * float(rng.random())


# ---------------------------------------------------------------------------
# perturbation and error statistics

def _perturb(
    motion: RigidMotion,
    distribution: Distribution,
    rot_level: float,
    trans_level: float,
    rng: np.random.Generator,
    translation_scale: float,
) -> RigidMotion:
    if rot_level == 0.0 and trans_level == 0.0:
        return motion
    rot = motion.rotation
    if rot_level > 0.0:
        axis = rotation_axis(rot)
        angle = rotation_angle(rot)
        noisy = axis + _noise_samples(rng, distribution, rot_level, 3)
        norm = np.linalg.norm(noisy)
        if norm > 1e-12:
            axis = noisy / norm
        rot = quat.to_rotation_matrix(quat.from_axis_angle(axis, angle))
    t = motion.translation
    if trans_level > 0.0:
        t = t + _noise_samples(rng, distribution, trans_level * translation_scale, 3)
    return RigidMotion(rot, t)


def perturb(
    motion: RigidMotion,
    noise: NoiseModel,
    rng: np.random.Generator,
    translation_scale: float | None = None,
) -> RigidMotion:
    """Perturbed copy of a relative motion.

    The rotation axis gets one sample of ``noise.level`` per component and
    is renormalized (a non-unit axis defines no rotation); the angle is
    untouched.  Translation components get samples of ``noise.level`` times
    ``translation_scale`` when the noise targets include translation;
    the scale defaults to the motion's own translation norm when no
    scenario-wide nominal value is supplied.  A zero level returns the
    motion unchanged.
    """
    if translation_scale is None:
        translation_scale = float(np.linalg.norm(motion.translation))
    trans_level = (
        noise.level if noise.targets == NoiseTargets.ROTATION_AND_TRANSLATION else 0.0
    )
    return _perturb(motion, noise.distribution, noise.level, trans_level, rng, translation_scale)


def error_stats(
    estimates: Sequence[HandEyeSolution], truth: RigidMotion
) -> tuple[float, float]:
    """RMS Frobenius rotation error and RMS relative translation error."""
    if not estimates:
        raise ValueError("at least one estimate is required")
    t_norm = float(np.linalg.norm(truth.translation))
    if t_norm == 0.0:
        raise ZeroTranslationError("relative translation error undefined for zero translation")
    rot_sq = [
        float(np.sum((sol.rotation_matrix - truth.rotation) ** 2)) for sol in estimates
    ]
    tr_sq = [
        float(np.sum((sol.translation - truth.translation) ** 2)) for sol in estimates
    ]
    return float(np.sqrt(np.mean(rot_sq))), float(np.sqrt(np.mean(tr_sq))) / t_norm


# ---------------------------------------------------------------------------
# scenarios

def camera_relative_motions(scenario: Scenario) -> list[RigidMotion]:
    """The camera-side motions the solvers will see.

    Classical scenarios pair consecutive positions; perspective scenarios
    reduce every matrix against the first one.
    """
    poses = scenario.camera_poses
    if scenario.formulation == Formulation.CLASSICAL:
        return [camera_motion(poses[i - 1], poses[i]) for i in range(1, len(poses))]
    return [reduced_motion(poses[0], poses[i]) for i in range(1, len(poses))]


def derive_hand_motions(scenario: Scenario) -> list[RigidMotion]:
    """Hand motions exactly consistent with the scenario's ground truth."""
    x = scenario.ground_truth
    x_inv = invert(x)
    out = []
    for i, a in enumerate(camera_relative_motions(scenario)):
        if rotation_angle(a.rotation) < MIN_ROTATION_ANGLE:
            raise DegenerateRotationError(f"camera motion {i} is near identity", index=i)
        out.append(compose(x_inv, compose(a, x)))
    return out


def default_scenario(n: int, seed: int) -> Scenario:
    """Random classical scenario with ``n`` motions (n + 1 camera poses).

    The ground-truth translation has magnitude 157 mm and a uniformly
    random rotation.  Camera poses keep the camera 300-800 mm from the
    calibration frame; consecutive motions rotate by 20-90 degrees about
    axes pairwise separated by at least 15 degrees and travel 230-390 mm.
    Deterministic per seed, and scenarios with the same seed share their
    leading motions.
    """
    if n < 2:
        raise ValueError(f"need at least 2 motions, got {n}")
    rng = _generator(seed)
    truth = RigidMotion(
        quat.to_rotation_matrix(_random_unit_quaternion(rng)),
        GROUND_TRUTH_TRANSLATION_MM * _random_unit_vector(rng),
    )
    rot = quat.to_rotation_matrix(_random_unit_quaternion(rng))
    center = _random_unit_vector(rng) * _uniform_in(rng, *_START_DISTANCE)
    poses = [RigidMotion(rot, -rot @ center)]
    axes: list[np.ndarray] = []
    for _ in range(n):
        while True:
            axis = _random_unit_vector(rng)
            if all(
                np.arccos(min(1.0, abs(float(axis @ a)))) >= _MIN_AXIS_SEPARATION
                for a in axes
            ):
                break
        axes.append(axis)
        angle = _uniform_in(rng, *_MOTION_ANGLE)
        step_rot = quat.to_rotation_matrix(quat.from_axis_angle(axis, angle))
        while True:
            candidate = center + _random_unit_vector(rng) * _uniform_in(rng, *_CENTER_STEP)
            if _POSE_DISTANCE[0] <= np.linalg.norm(candidate) <= _POSE_DISTANCE[1]:
                break
        center = candidate
        rot = step_rot @ rot
        poses.append(RigidMotion(rot, -rot @ center))
    return Scenario(truth, tuple(poses), Formulation.CLASSICAL)


def random_intrinsics(rng: np.random.Generator) -> Intrinsics:
    return Intrinsics(
        focal_u=_uniform_in(rng, 900.0, 1600.0),
        focal_v=_uniform_in(rng, 900.0, 1600.0),
        center_u=_uniform_in(rng, 240.0, 520.0),
        center_v=_uniform_in(rng, 240.0, 520.0),
    )


def perspective_scenario(n: int, seed: int) -> Scenario:
    """Perspective twin of ``default_scenario(n, seed)``.

    Camera poses are identical; each is composed with one random pin-hole
    intrinsic block, and the ground truth becomes the first-pose-relative
    transform the perspective formulation estimates.
    """
    base = default_scenario(n, seed)
    intr = random_intrinsics(_generator(seed, 1))
    matrices = tuple(PerspectiveMatrix.from_pinhole(intr, pose) for pose in base.camera_poses)
    truth = compose(invert(base.camera_poses[0]), base.ground_truth)
    return Scenario(truth, matrices, Formulation.PERSPECTIVE)


# ---------------------------------------------------------------------------
# sweeps

def nominal_translation(scenario: Scenario) -> float:
    """Mean motion translation magnitude over both sides, mm."""
    a_motions = camera_relative_motions(scenario)
    b_motions = derive_hand_motions(scenario)
    total = sum(
        np.linalg.norm(a.translation) + np.linalg.norm(b.translation)
        for a, b in zip(a_motions, b_motions)
    )
    return float(total) / (2 * len(a_motions))


def trial_constraints(
    scenario: Scenario,
    distribution: Distribution,
    rot_level: float,
    trans_level: float,
    rng: np.random.Generator,
) -> list[MotionConstraint]:
    """One trial's constraint list: every motion independently perturbed.

    Each (camera, hand) motion pair consumes its noise samples in a fixed
    order, so the list is a pure function of the rng stream.
    """
    a_motions = camera_relative_motions(scenario)
    b_motions = derive_hand_motions(scenario)
    scale = nominal_translation(scenario)
    out = []
    for a, b in zip(a_motions, b_motions):
        noisy_a = _perturb(a, distribution, rot_level, trans_level, rng, scale)
        noisy_b = _perturb(b, distribution, rot_level, trans_level, rng, scale)
        out.append(motion_constraint(noisy_a, noisy_b))
    return out


def _sweep(
    points, distribution: Distribution, trials: int, seed: int, methods
) -> list[ReportRow]:
    rows = []
    for index, (sweep_var, scenario, rot_level, trans_level) in enumerate(points):
        a_motions = camera_relative_motions(scenario)
        b_motions = derive_hand_motions(scenario)
        scale = nominal_translation(scenario)
        collected: dict[Method, list[HandEyeSolution]] = {m: [] for m in methods}
        failed = {m: 0 for m in methods}
        for j in range(trials):
            rng = _generator(seed, index, j)
            constraints = []
            for a, b in zip(a_motions, b_motions):
                noisy_a = _perturb(a, distribution, rot_level, trans_level, rng, scale)
                noisy_b = _perturb(b, distribution, rot_level, trans_level, rng, scale)
                constraints.append(motion_constraint(noisy_a, noisy_b))
            for m in methods:
                try:
                    collected[m].append(SOLVERS[m](constraints))
                except CalibrationError:
                    failed[m] += 1
        for m in methods:
            if collected[m]:
                e_rot, e_tr = error_stats(collected[m], scenario.ground_truth)
            else:
                e_rot = e_tr = float("nan")
            rows.append(ReportRow(float(sweep_var), m, e_rot, e_tr, failed[m]))
    return rows


def noise_sweep(
    scenario: Scenario,
    levels: Sequence[float],
    noise: NoiseModel,
    trials: int,
    methods: Sequence[Method] = DEFAULT_METHODS,
) -> StabilityReport:
    """Error statistics versus noise level.

    For each level, ``trials`` independent trials perturb every camera and
    hand motion, rebuild the constraints once, and hand the same noisy
    data to every method.  Trials a solver rejects are excluded from the
    RMS and counted in ``failed_trials``.
    """
    if trials < 1:
        raise ValueError("at least one trial is required")
    points = [
        (
            level,
            scenario,
            level,
            level if noise.targets == NoiseTargets.ROTATION_AND_TRANSLATION else 0.0,
        )
        for level in levels
    ]
    rows = _sweep(points, noise.distribution, trials, noise.seed, tuple(methods))
    t_norm = float(np.linalg.norm(scenario.ground_truth.translation))
    return StabilityReport(tuple(rows), trials, t_norm)


def motion_count_sweep(
    scenario_family: Callable[[int], Scenario],
    counts: Sequence[int],
    rot_level: float = 0.06,
    trans_level: float = 0.02,
    trials: int = 1000,
    distribution: Distribution = Distribution.GAUSSIAN,
    seed: int = 0,
    methods: Sequence[Method] = DEFAULT_METHODS,
) -> StabilityReport:
    """Error statistics versus the number of motions, at fixed noise.

    Defaults follow the worst-case study design: Gaussian noise at 6% on
    rotation axes and 2% on translations.
    """
    if trials < 1:
        raise ValueError("at least one trial is required")
    points = [(n, scenario_family(n), rot_level, trans_level) for n in counts]
    rows = _sweep(points, distribution, trials, seed, tuple(methods))
    t_norm = float(np.linalg.norm(points[0][1].ground_truth.translation)) if points else 0.0
    return StabilityReport(tuple(rows), trials, t_norm)
