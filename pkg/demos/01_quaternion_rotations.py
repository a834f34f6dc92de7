"""Tour of the quaternion layer: operators, products, rotations.

Run:  python demos/01_quaternion_rotations.py
"""

import numpy as np

from handeye import quaternion as quat

np.set_printoptions(precision=4, suppress=True)

# A quaternion is a plain numpy array [w, x, y, z].  Multiplication can be
# written as a matrix product in two ways: q_matrix(r) multiplies from the
# left, w_matrix(q) from the right.
r = np.array([1.0, 2.0, 3.0, 4.0])
q = np.array([0.5, -1.0, 0.25, 2.0])

print("r * q           =", quat.qmul(r, q))
print("q_matrix(r) @ q =", quat.q_matrix(r) @ q)
print("w_matrix(q) @ r =", quat.w_matrix(q) @ r)

# Both operators are scaled-orthogonal: their Gram matrix is (r . r) I.
print("\nq_matrix(r)^T q_matrix(r) =")
print(quat.q_matrix(r).T @ quat.q_matrix(r))
print("with r . r =", quat.norm2(r))

# The product norm multiplies, which is what makes the least-squares
# rotation estimation tricks work.
print("\n|r*q|^2 =", quat.norm2(quat.qmul(r, q)), "= |r|^2 |q|^2 =",
      quat.norm2(r) * quat.norm2(q))

# A unit quaternion rotates vectors by the sandwich product.
half_turn_xy = quat.from_axis_angle(np.array([0.0, 0.0, 1.0]), np.pi / 2)
print("\n90 degrees about z applied to x:", quat.rotate_vector(half_turn_xy, [1.0, 0, 0]))

# Rotation matrices round-trip through the quaternion representation.
rng = np.random.default_rng(0)
u = rng.normal(size=4)
u /= np.linalg.norm(u)
m = quat.to_rotation_matrix(u)
print("\nrandom unit quaternion:", quat.canonicalize(u))
print("recovered from its matrix:", quat.from_rotation_matrix(m))
print("matrix orthonormality residual:", np.linalg.norm(m.T @ m - np.eye(3)))
