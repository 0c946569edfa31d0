"""Bubble family, rotations, wedge calculus and pointwise identities.

The bubble through scale lam and centre a is the rotated stereographic
image R * pi(lam (xi - a)); it solves Delta u = 2 u_x ^ u_y on the plane.
All formulas here are closed forms; the Laplacian is derived separately
from the value formula so the PDE identity can be checked non-circularly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .quadrature import plane_radial_integral

ORTHO_TOL = 1e-12

#: Fundamental-cell integral int |xi|^2 (1+|xi|^2)^-3 = pi/2 (see constant_a0).
A0 = np.pi / 2

#: Energy of a single bubble for the free functional on the plane,
#: (1/2)*8*pi - (2/3)*4*pi.
BUBBLE_ENERGY = 4 * np.pi / 3


def stereographic(xi):
    """Stereographic projection R^2 -> S^2; (0,0) maps to the south pole."""
    xi = np.asarray(xi, dtype=float)
    x, y = xi[..., 0], xi[..., 1]
    s = 1.0 + x * x + y * y
    return np.stack([2 * x / s, 2 * y / s, (x * x + y * y - 1.0) / s], axis=-1)


def check_rotation(r):
    """Validate an SO(3) matrix (orthogonality and det within 1e-12)."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        raise InvalidInputError("rotation must be a 3x3 matrix")
    if np.max(np.abs(r.T @ r - np.eye(3))) > ORTHO_TOL:
        raise InvalidInputError("matrix is not orthogonal within tolerance")
    if abs(np.linalg.det(r) - 1.0) > ORTHO_TOL:
        raise InvalidInputError("matrix does not have determinant +1")
    return r


@dataclass(frozen=True)
class BubbleParams:
    """One bubble: centre a, scale lam > 0, orientation R in SO(3)."""

    center: np.ndarray
    scale: float
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "rotation",
                           check_rotation(np.asarray(self.rotation, dtype=float)))
        if not self.scale > 0:
            raise InvalidInputError("bubble scale must be positive")


def _local(b, xi):
    xi = np.asarray(xi, dtype=float)
    dx = xi[..., 0] - b.center[0]
    dy = xi[..., 1] - b.center[1]
    s = 1.0 + b.scale**2 * (dx * dx + dy * dy)
    return dx, dy, s


def bubble_value(b, xi):
    """R * pi(lam (xi - a))."""
    dx, dy, s = _local(b, xi)
    lam = b.scale
    v = np.stack([2 * lam * dx / s, 2 * lam * dy / s, 1.0 - 2.0 / s], axis=-1)
    return v @ b.rotation.T


def bubble_derivatives(b, xi):
    """(d/dx, d/dy) of the bubble, each a 3-vector field."""
    dx, dy, s = _local(b, xi)
    lam = b.scale
    s2 = s * s
    vx = np.stack([
        2 * lam * (1.0 + lam**2 * (dy * dy - dx * dx)) / s2,
        -4 * lam**3 * dx * dy / s2,
        4 * lam**2 * dx / s2,
    ], axis=-1)
    vy = np.stack([
        -4 * lam**3 * dx * dy / s2,
        2 * lam * (1.0 + lam**2 * (dx * dx - dy * dy)) / s2,
        4 * lam**2 * dy / s2,
    ], axis=-1)
    return vx @ b.rotation.T, vy @ b.rotation.T


def wedge_xy(b, xi):
    """Closed-form delta_x ^ delta_y."""
    dx, dy, s = _local(b, xi)
    lam = b.scale
    s3 = s**3
    w = np.stack([
        -8 * lam**3 * dx / s3,
        -8 * lam**3 * dy / s3,
        4 * lam**2 * (1.0 - lam**2 * (dx * dx + dy * dy)) / s3,
    ], axis=-1)
    return w @ b.rotation.T


def bubble_laplacian(b, xi):
    """Componentwise Laplacian, derived directly from the value formula.

    Independent of the first-derivative table and of wedge_xy, so
    comparing it against 2 * wedge_xy genuinely tests the PDE.
    """
    dx, dy, s = _local(b, xi)
    lam = b.scale
    s3 = s**3
    lap = np.stack([
        -16 * lam**3 * dx / s3,
        -16 * lam**3 * dy / s3,
        8 * lam**2 * (1.0 - lam**2 * (dx * dx + dy * dy)) / s3,
    ], axis=-1)
    return lap @ b.rotation.T


def pohozaev_residual(v_x, v_y, xi):
    """sum_i (xi . grad v_i)(v_x ^ v_y)_i for first derivatives at xi.

    Vanishes identically for every smooth field: xi.grad v lies in the
    span of v_x, v_y, which is orthogonal to their cross product.
    """
    v_x = np.asarray(v_x, dtype=float)
    v_y = np.asarray(v_y, dtype=float)
    xi = np.asarray(xi, dtype=float)
    radial = xi[..., :1] * v_x + xi[..., 1:2] * v_y
    return np.sum(radial * np.cross(v_x, v_y), axis=-1)


def constant_a0(tol=1e-12):
    """Quadrature of int_{R^2} |xi|^2 / (1+|xi|^2)^3 (analytically pi/2)."""
    value, _ = plane_radial_integral(
        lambda r: r**2 / (1.0 + r**2) ** 3, tol=tol)
    return value


def identity_integral_zero(tol=1e-11):
    """Quadrature of int_{R^2} (1-|xi|^2) / (1+|xi|^2)^3 (analytically 0)."""
    value, _ = plane_radial_integral(
        lambda r: (1.0 - r**2) / (1.0 + r**2) ** 3, tol=tol)
    return value


# -- rotation parametrization -------------------------------------------------
#
# The chart is smooth near the identity: R is the identity at
# (theta, psi, phi) = (pi/2, 0, 0) and the three partial derivatives of
# R^{-1} there are the standard skew generators.

CHART_CENTER = (np.pi / 2, 0.0, 0.0)

AXIS_FLIP = np.array([[1.0, 0.0, 0.0],
                      [0.0, 0.0, -1.0],
                      [0.0, 1.0, 0.0]])


def chart_matrix(theta, psi, phi):
    """The inverse-rotation matrix of the chart at (theta, psi, phi)."""
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    cf, sf = np.cos(phi), np.sin(phi)
    return np.array([
        [cp * cf - ct * sf * sp, cp * sf + ct * cf * sp, sp * st],
        [-st * sf, st * cf, -ct],
        [-sp * cf - ct * sf * cp, -sp * sf + ct * cf * cp, cp * st],
    ])


def chart_matrix_derivatives(theta, psi, phi):
    """Partial derivatives of chart_matrix in (theta, psi, phi)."""
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    cf, sf = np.cos(phi), np.sin(phi)
    d_theta = np.array([
        [st * sf * sp, -st * cf * sp, sp * ct],
        [-ct * sf, ct * cf, st],
        [st * sf * cp, -st * cf * cp, cp * ct],
    ])
    d_psi = np.array([
        [-sp * cf - ct * sf * cp, -sp * sf + ct * cf * cp, cp * st],
        [0.0, 0.0, 0.0],
        [-cp * cf + ct * sf * sp, -cp * sf - ct * cf * sp, -sp * st],
    ])
    d_phi = np.array([
        [-cp * sf - ct * cf * sp, cp * cf - ct * sf * sp, 0.0],
        [-st * cf, -st * sf, 0.0],
        [sp * sf - ct * cf * cp, -sp * cf - ct * sf * cp, 0.0],
    ])
    return d_theta, d_psi, d_phi


def rotation_from_angles(angles):
    """Rotation R whose inverse is the chart matrix; identity at the centre."""
    theta, psi, phi = angles
    return chart_matrix(theta, psi, phi).T


def angles_from_rotation(r):
    """Invert rotation_from_angles near the chart centre."""
    m = np.asarray(r).T
    theta = np.arccos(np.clip(-m[1, 2], -1.0, 1.0))
    phi = np.arctan2(-m[1, 0], m[1, 1])
    psi = np.arctan2(m[0, 2], m[2, 2])
    return theta, psi, phi


def rotation_relative(base, angles):
    """R solving R^{-1} base = chart_matrix(angles); equals base at centre."""
    base = np.asarray(base, dtype=float)
    return base @ chart_matrix(*angles).T


def angles_relative(base, r):
    """Chart coordinates of r relative to base (inverse of rotation_relative)."""
    m = np.asarray(r).T @ np.asarray(base)
    theta = np.arccos(np.clip(-m[1, 2], -1.0, 1.0))
    phi = np.arctan2(-m[1, 0], m[1, 1])
    psi = np.arctan2(m[0, 2], m[2, 2])
    return theta, psi, phi


def rotation_aligning(v):
    """Minimal rotation sending (0,0,-1) to the unit vector v.

    Tie-break at the antipode v = (0,0,1): rotation by pi about the
    x-axis.  Deterministic so sphere configurations are reproducible.
    """
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise InvalidInputError("alignment target must be a unit vector")
    south = np.array([0.0, 0.0, -1.0])
    c = float(np.dot(south, v))
    axis = np.cross(south, v)
    s = np.linalg.norm(axis)
    if s < 1e-14:
        if c > 0:
            return np.eye(3)
        return np.diag([1.0, -1.0, -1.0])
    axis = axis / s
    k = np.array([[0.0, -axis[2], axis[1]],
                  [axis[2], 0.0, -axis[0]],
                  [-axis[1], axis[0], 0.0]])
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)
