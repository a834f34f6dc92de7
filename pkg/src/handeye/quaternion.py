"""Quaternion algebra used to represent and estimate rotations.

Quaternions are numpy arrays ``[w, x, y, z]`` with the scalar part first.
A 3-vector embeds as the purely imaginary quaternion ``[0, x, y, z]``.
All functions are pure and broadcast over leading batch dimensions, so a
``(n, 4)`` array of quaternions is as valid an argument as a single one.

The two 4x4 operators ``q_matrix`` and ``w_matrix`` turn multiplication
into matrix products::

    qmul(r, q) == q_matrix(r) @ q == w_matrix(q) @ r

and satisfy ``q_matrix(r).T @ q_matrix(r) == (r . r) * I`` (same for
``w_matrix``).  Rotation of a vector v by a unit quaternion is the
sandwich product q * v * conj(q).
"""

from __future__ import annotations

import numpy as np

from .errors import NotARotationError

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])

# Flips the sign of the imaginary parts; conjugation as a matrix.
_CONJ = np.diag([1.0, -1.0, -1.0, -1.0])


def embed(v) -> np.ndarray:
    """Embed 3-vector(s) as purely imaginary quaternion(s)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (4,))
    out[..., 1:] = v
    return out


def q_matrix(r) -> np.ndarray:
    """4x4 matrix of left-multiplication by r: q_matrix(r) @ q = qmul(r, q)."""
    r = np.asarray(r, dtype=float)
    w, x, y, z = r[..., 0], r[..., 1], r[..., 2], r[..., 3]
    rows = (
        (w, -x, -y, -z),
        (x, w, -z, y),
        (y, z, w, -x),
        (z, -y, x, w),
    )
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


def w_matrix(r) -> np.ndarray:
    """4x4 matrix of right-multiplication by r: w_matrix(r) @ q = qmul(q, r)."""
    r = np.asarray(r, dtype=float)
    w, x, y, z = r[..., 0], r[..., 1], r[..., 2], r[..., 3]
    rows = (
        (w, -x, -y, -z),
        (x, w, z, -y),
        (y, -z, w, x),
        (z, y, -x, w),
    )
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


def qmul(r, q) -> np.ndarray:
    """Quaternion product r * q (Hamilton convention)."""
    r = np.asarray(r, dtype=float)
    q = np.asarray(q, dtype=float)
    rw, rx, ry, rz = r[..., 0], r[..., 1], r[..., 2], r[..., 3]
    qw, qx, qy, qz = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        (
            rw * qw - rx * qx - ry * qy - rz * qz,
            rw * qx + rx * qw + ry * qz - rz * qy,
            rw * qy - rx * qz + ry * qw + rz * qx,
            rw * qz + rx * qy - ry * qx + rz * qw,
        ),
        axis=-1,
    )


def conjugate(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def dot(r, q) -> np.ndarray:
    return np.sum(np.asarray(r, dtype=float) * np.asarray(q, dtype=float), axis=-1)


def norm2(q) -> np.ndarray:
    """Squared norm q . q."""
    return dot(q, q)


def canonicalize(q) -> np.ndarray:
    """Fix the q/-q ambiguity: w >= 0, ties broken by the first nonzero
    imaginary component being positive.  Single quaternion only."""
    q = np.asarray(q, dtype=float)
    if q[0] != 0.0:
        return q if q[0] > 0.0 else -q
    for c in q[1:]:
        if c != 0.0:
            return q if c > 0.0 else -q
    return q


def as_unit(q, tol: float = 1e-12) -> np.ndarray:
    """Validate unit norm and return the canonical-sign representative.

    Raises ValueError when |q.q - 1| > tol; does not renormalize.
    """
    q = np.asarray(q, dtype=float)
    err = abs(float(norm2(q)) - 1.0)
    if err > tol:
        raise ValueError(f"quaternion norm off unity by {err:.3e}")
    return canonicalize(q)


def rotate_vector(q, v) -> np.ndarray:
    """Rotate 3-vector(s) v by unit quaternion q via q * v * conj(q).

    The sandwich of a purely imaginary quaternion is purely imaginary, so
    the real part is dropped.
    """
    return qmul(qmul(q, embed(v)), conjugate(q))[..., 1:]


def to_rotation_matrix(q) -> np.ndarray:
    """3x3 rotation matrix of a unit quaternion (lower block of
    w_matrix(q).T @ q_matrix(q))."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    ww, xx, yy, zz = w * w, x * x, y * y, z * z
    rows = (
        (ww + xx - yy - zz, 2 * (x * y - w * z), 2 * (x * z + w * y)),
        (2 * (x * y + w * z), ww - xx + yy - zz, 2 * (y * z - w * x)),
        (2 * (x * z - w * y), 2 * (y * z + w * x), ww - xx - yy + zz),
    )
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


def from_rotation_matrix(m, tol: float = 1e-6) -> np.ndarray:
    """Canonical-sign unit quaternion of a rotation matrix.

    Branches on the largest of (trace, diagonal entries), which keeps the
    divisor away from zero for every rotation angle.

    Raises NotARotationError when ``m`` is farther than ``tol`` from
    orthonormal (Frobenius) or has non-positive determinant.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise NotARotationError(f"expected 3x3 matrix, got {m.shape}")
    residual = np.linalg.norm(m.T @ m - np.eye(3))
    if residual > tol:
        raise NotARotationError(f"orthonormality residual {residual:.3e} > {tol:.1e}")
    if np.linalg.det(m) <= 0.0:
        raise NotARotationError("determinant is not positive")

    t = m[0, 0] + m[1, 1] + m[2, 2]
    if t >= max(m[0, 0], m[1, 1], m[2, 2]):
        s = 2.0 * np.sqrt(1.0 + t)
        q = np.array(
            [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        )
    elif m[0, 0] >= max(m[1, 1], m[2, 2]):
        s = 2.0 * np.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2])
        q = np.array(
            [(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
        )
    elif m[1, 1] >= m[2, 2]:
        s = 2.0 * np.sqrt(1.0 - m[0, 0] + m[1, 1] - m[2, 2])
        q = np.array(
            [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s]
        )
    else:
        s = 2.0 * np.sqrt(1.0 - m[0, 0] - m[1, 1] + m[2, 2])
        q = np.array(
            [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s]
        )
    return canonicalize(q / np.linalg.norm(q))


def from_axis_angle(axis, angle: float) -> np.ndarray:
    """Unit quaternion rotating by ``angle`` (rad) about unit ``axis``."""
    axis = np.asarray(axis, dtype=float)
    half = 0.5 * float(angle)
    q = np.concatenate(([np.cos(half)], np.sin(half) * axis))
    return canonicalize(q / np.linalg.norm(q))


def axis_angle(q) -> tuple[np.ndarray, float]:
    """(unit axis, angle in [0, pi]) of a canonical unit quaternion.

    The axis of the identity rotation is undefined; (1, 0, 0) is returned.
    """
    q = canonicalize(np.asarray(q, dtype=float))
    s = np.linalg.norm(q[1:])
    angle = 2.0 * np.arctan2(s, q[0])
    if s == 0.0:
        return np.array([1.0, 0.0, 0.0]), 0.0
    return q[1:] / s, float(angle)
