"""Multi-sphere construction: concentrated data, boxes, Newton and degree.

Pipeline: choose unit target centres v_j (spheres through the origin),
align rotations with v_j = R_j (0,0,-1), build the strongly concentrated
boundary datum as a sum of rotated Kelvin-type data anchored at k points
near the boundary, and locate the critical configuration of the reduced
energy inside per-bubble boxes by damped Newton on the analytic
gradient.  The degree certificate combines boundary positivity of
<grad, chi - anchor> on sampled box faces with positive-definiteness of
the Hessian at the interior zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import DiskDomain
from .energy import (Configuration, PrecomposedDatum, RotatedDatum, SumDatum,
                     _sigma_and_gradient, g_omega)
from .errors import (CertificateFailureError, InvalidInputError,
                     SearchFailureError)
from .geometry import (BubbleParams, CHART_CENTER, rotation_aligning,
                       rotation_relative)


# -- closed forms around one concentrated datum --------------------------------

def g_omega_value(omega, xi):
    """Closed form of the concentrated datum on the closed disk."""
    return g_omega(omega).value(np.asarray(xi, dtype=float))


def d_rinv_g_omega(omega, angles, xi):
    """d_{R^{-1}} g_omega at xi for the chart rotation at ``angles``.

    Two-term closed form: with u = ((1-wx)^2 - w^2 y^2)/D^2 and
    v = (1-wx) w y / D^2, D = (1-wx)^2 + w^2 y^2,

        c1(angles) u + 2 c2(angles) v,

    where c1 = M11 + M22 and c2 = M12 - M21 for the chart matrix M.
    Reduces to 2 d(g_omega)_1/dx at the chart centre.
    """
    theta, psi, phi = angles
    x, y = np.asarray(xi, dtype=float)[..., 0], np.asarray(xi, dtype=float)[..., 1]
    dd = (1.0 - omega * x) ** 2 + (omega * y) ** 2
    u = ((1.0 - omega * x) ** 2 - omega**2 * y**2) / dd**2
    v = (1.0 - omega * x) * omega * y / dd**2
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(psi), np.sin(psi)
    cf, sf = np.cos(phi), np.sin(phi)
    c1 = cp * cf - ct * sf * sp + st * cf
    c2 = cp * sf + ct * cf * sp + st * sf
    return c1 * u + 2.0 * c2 * v


def chart_energy(omega, eps, x, y, lam, theta, psi, phi):
    """F_{D, g_omega} in chart coordinates (no 8 A0 prefactor).

    (1/lam^2) H_tilde(x, y) - (eps/lam) d_{R^{-1}} g_omega(x, y); the
    anchor (omega, 0, 2/eps, pi/2, 0, 0) is exactly critical and the
    Hessian there is 2 eps^2/(1-omega^2)^2 times matrix_a.
    """
    ht = 2.0 / (1.0 - x * x - y * y) ** 2
    d = d_rinv_g_omega(omega, (theta, psi, phi), np.array([x, y]))
    return ht / lam**2 - (eps / lam) * d


def matrix_a(omega, eps):
    """The 6x6 chart Hessian profile at the anchor (positive definite)."""
    if not 0.0 < omega < 1.0:
        raise InvalidInputError("omega must lie in (0, 1)")
    one = 1.0 - omega**2
    diag_xy = 1.0 / one + 3.0 * omega**2 / one**2
    a = np.zeros((6, 6))
    a[0, 0] = a[1, 1] = diag_xy
    a[0, 2] = a[2, 0] = -0.5 * eps * omega / one
    a[2, 2] = eps**2 / 8.0
    a[3, 3] = a[4, 4] = 0.25
    a[5, 5] = 0.5
    a[1, 5] = a[5, 1] = -omega / one
    return a


def _rot_z(beta):
    c, s = np.cos(beta), np.sin(beta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


# -- construction data types ---------------------------------------------------

@dataclass(frozen=True)
class SphereConfig:
    """Unit sphere centres with their aligning rotations."""

    centers: np.ndarray
    rotations: tuple

    @classmethod
    def from_targets(cls, targets):
        targets = np.asarray(targets, dtype=float)
        norms = np.linalg.norm(targets, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-10):
            raise InvalidInputError("sphere centres must be unit vectors")
        rots = tuple(rotation_aligning(v) for v in targets)
        return cls(targets, rots)


@dataclass(frozen=True)
class BoxTmu:
    """Per-bubble box: positions within mu(1-omega^2) of the anchor,
    lam within mu/eps of 2/eps, chart angles within mu of the centre."""

    anchor_position: np.ndarray
    omega: float
    eps: float
    mu: float

    @property
    def half_widths(self):
        pos = self.mu * (1.0 - self.omega**2)
        return np.array([pos, pos, self.mu / self.eps,
                         self.mu, self.mu, self.mu])

    @property
    def center(self):
        return np.array([self.anchor_position[0], self.anchor_position[1],
                         2.0 / self.eps, *CHART_CENTER])

    def contains(self, chi, slack=0.0):
        return bool(np.all(np.abs(chi - self.center)
                           <= self.half_widths * (1.0 + slack)))


@dataclass(frozen=True)
class ConstructionParams:
    """Inputs of the multi-sphere construction.

    omega close to 1 is the regime the certificate expects (documented
    recommendation, not enforced).
    """

    k: int
    omega: float
    eps: float
    mu: float
    targets: SphereConfig

    def __post_init__(self):
        if self.k < 1 or len(self.targets.centers) != self.k:
            raise InvalidInputError("targets must supply k unit centres")
        if not 0.0 < self.omega < 1.0:
            raise InvalidInputError("omega must lie in (0, 1)")
        if not (self.eps > 0 and self.mu > 0):
            raise InvalidInputError("eps and mu must be positive")

    @property
    def anchors(self):
        j = np.arange(1, self.k + 1)
        beta = 2.0 * np.pi * j / self.k
        return self.omega * np.stack([np.cos(beta), np.sin(beta)], axis=-1)

    @property
    def base_rotations(self):
        """Chart anchors R_j = (aligning rotation) . (z-rotation by -beta_j).

        The datum summand j is precomposed with the planar rotation by
        -beta_j; rotating the plane acts on the sphere as a z-axis
        rotation, so the critical bubble orientation carries that factor.
        It stabilizes the south pole, hence the limiting sphere centre is
        still the target v_j.
        """
        out = []
        for j in range(1, self.k + 1):
            beta = 2.0 * np.pi * j / self.k
            out.append(self.targets.rotations[j - 1] @ _rot_z(-beta))
        return out

    def boxes(self):
        return [BoxTmu(anchor, self.omega, self.eps, self.mu)
                for anchor in self.anchors]


def build_g_k_omega(params):
    """The concentrated boundary datum: sum of rotated, arg-rotated copies.

    Summand j is R_j g_omega evaluated at the argument rotated by
    -2 pi j / k, so its concentration anchor is
    omega (cos 2 pi j/k, sin 2 pi j/k).
    """
    parts = []
    for j in range(1, params.k + 1):
        beta = 2.0 * np.pi * j / params.k
        parts.append(RotatedDatum(params.targets.rotations[j - 1],
                                  PrecomposedDatum(g_omega(params.omega),
                                                   beta)))
    return SumDatum(parts)


# -- Newton search and degree certificate --------------------------------------

def _chi_split(chi, k):
    chi = np.asarray(chi, dtype=float).reshape(k, 6)
    positions = [chi[i, :2] for i in range(k)]
    lams = [chi[i, 2] for i in range(k)]
    angles = [tuple(chi[i, 3:]) for i in range(k)]
    return positions, lams, angles


def _grad_flat(eps, chi, bases, domain, datum, k):
    positions, lams, angles = _chi_split(chi, k)
    value, blocks = _sigma_and_gradient(eps, positions, lams, bases, angles,
                                        domain, datum)
    flat = np.empty(6 * k)
    for i, blk in enumerate(blocks):
        flat[6 * i:6 * i + 2] = blk["position"]
        flat[6 * i + 2] = blk["scale"]
        flat[6 * i + 3:6 * i + 6] = blk["angles"]
    return value, flat


def _fd_jacobian(grad_fn, chi, scale_steps):
    n = len(chi)
    jac = np.empty((n, n))
    for m in range(n):
        h = scale_steps[m]
        e = np.zeros(n)
        e[m] = h
        jac[:, m] = (grad_fn(chi + e) - grad_fn(chi - e)) / (2.0 * h)
    return jac


@dataclass
class DegreeCertificate:
    """Numerical content of the degree argument on the boxes."""

    boundary_margin: float
    boundary_samples: int
    hessian_min_eigenvalue: float
    hessian_symmetry_defect: float
    gradient_norm: float
    passed: bool
    per_block_margins: list = field(default_factory=list)

    def to_dict(self):
        return {
            "boundary_margin": self.boundary_margin,
            "boundary_samples": self.boundary_samples,
            "hessian_min_eigenvalue": self.hessian_min_eigenvalue,
            "hessian_symmetry_defect": self.hessian_symmetry_defect,
            "gradient_norm": self.gradient_norm,
            "per_block_margins": list(map(float, self.per_block_margins)),
            "pass": bool(self.passed),
        }


def find_critical_configuration(params, domain=None, datum=None,
                                grad_tol=1e-10, max_iter=60,
                                face_points_per_dim=3, strict_boundary=True):
    """Damped Newton on the 6k gradient from the box anchors.

    Returns (Configuration, DegreeCertificate, info dict).  Raises
    SearchFailureError if Newton stalls or an iterate leaves its box,
    CertificateFailureError if a sampled face violates positivity (only
    when ``strict_boundary``).
    """
    domain = domain or DiskDomain()
    datum = datum or build_g_k_omega(params)
    k = params.k
    eps = params.eps
    bases = params.base_rotations
    boxes = params.boxes()
    center = np.concatenate([b.center for b in boxes])

    def grad(chi):
        return _grad_flat(eps, chi, bases, domain, datum, k)[1]

    steps = np.where(np.arange(6 * k) % 6 == 2,
                     1e-6 * center, 1e-6)
    chi = center.copy()
    gval = grad(chi)
    trajectory = [chi.copy()]
    for _ in range(max_iter):
        if np.linalg.norm(gval) < grad_tol:
            break
        jac = _fd_jacobian(grad, chi, steps)
        try:
            step = np.linalg.solve(jac, -gval)
        except np.linalg.LinAlgError as exc:
            raise SearchFailureError(f"singular Newton system: {exc}",
                                     trajectory)
        damping = 1.0
        base_norm = np.linalg.norm(gval)
        for _ in range(40):
            cand = chi + damping * step
            gnew = grad(cand)
            if np.linalg.norm(gnew) < base_norm:
                break
            damping *= 0.5
        else:
            raise SearchFailureError("Newton damping stalled", trajectory)
        chi, gval = cand, gnew
        trajectory.append(chi.copy())
        for i, box in enumerate(boxes):
            if not box.contains(chi[6 * i:6 * i + 6]):
                raise SearchFailureError(
                    f"iterate left box {i}", trajectory)
    else:
        raise SearchFailureError(
            f"no convergence in {max_iter} Newton steps "
            f"(|grad| = {np.linalg.norm(gval):.3e})", trajectory)

    # certificate: per-block boundary positivity on sampled faces
    margins = []
    n_samples = 0
    worst = np.inf
    for i, box in enumerate(boxes):
        blk = slice(6 * i, 6 * i + 6)
        block_worst = np.inf
        for face_dim in range(6):
            for side in (-1.0, 1.0):
                for point in _face_points(box, face_dim, side,
                                          face_points_per_dim):
                    cand = chi.copy()
                    cand[blk] = point
                    gface = grad(cand)[blk]
                    val = float(gface @ (point - box.center))
                    n_samples += 1
                    if val < block_worst:
                        block_worst = val
                    if val <= 0.0 and strict_boundary:
                        raise CertificateFailureError(i, point, val)
        margins.append(block_worst)
        worst = min(worst, block_worst)

    jac = _fd_jacobian(grad, chi, steps)
    sym_defect = float(np.max(np.abs(jac - jac.T))
                       / max(np.max(np.abs(jac)), 1e-300))
    hess = 0.5 * (jac + jac.T)
    eigs = np.linalg.eigvalsh(hess)
    cert = DegreeCertificate(
        boundary_margin=float(worst),
        boundary_samples=n_samples,
        hessian_min_eigenvalue=float(eigs[0]),
        hessian_symmetry_defect=sym_defect,
        gradient_norm=float(np.linalg.norm(gval)),
        passed=bool(worst > 0 and eigs[0] > 0
                    and np.linalg.norm(gval) < grad_tol),
        per_block_margins=margins,
    )

    positions, lams, angles = _chi_split(chi, k)
    bubbles = [BubbleParams(positions[i], lams[i],
                            rotation_relative(bases[i], angles[i]))
               for i in range(k)]
    cbar = max(10.0, 2.0 / min(1.0 - np.hypot(*p) for p in positions) + 1.0,
               max(lams) * eps + 1.0)
    config = Configuration(epsilon=eps, bubbles=bubbles, cbar=cbar)
    info = {"iterations": len(trajectory) - 1,
            "chi": chi, "trajectory": trajectory,
            "hessian_eigenvalues": eigs}
    return config, cert, info


def _face_points(box, face_dim, side, per_dim):
    """Tensor samples of one face of the box (fixed coordinate at a wall)."""
    center = box.center
    widths = box.half_widths
    axes = []
    for d in range(6):
        if d == face_dim:
            axes.append(np.array([center[d] + side * widths[d]]))
        else:
            frac = np.linspace(-1.0, 1.0, per_dim)
            axes.append(center[d] + frac * widths[d])
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def limiting_spheres(config, base_rotations=None):
    """Sphere centres R_j (0,0,-1) of the configuration's bubbles."""
    south = np.array([0.0, 0.0, -1.0])
    centers = np.array([b.rotation @ south for b in config.bubbles])
    return centers


def center_deviation(config, targets):
    """max_j |R_j(0,0,-1) - v_j| against the target sphere centres."""
    centers = limiting_spheres(config)
    return float(np.max(np.linalg.norm(
        centers - np.asarray(targets, dtype=float), axis=1)))
