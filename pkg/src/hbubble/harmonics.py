"""Linearized bubble operator on vector spherical harmonics.

The linearization of the plane H-system around the fundamental bubble,
viewed on the sphere, is

    Gamma(F) = Delta_{S^2} F - (2/sin phi)(F_theta ^ x_phi + x_theta ^ F_phi)

with x the identity embedding.  Gamma preserves each degree-n block of
vector spherical harmonics; this module assembles the real block
matrices from a closed-form ladder action (derived from the associated
Legendre recurrences), cross-validates them against a quadrature
discretization of the defining formula, and classifies the kernel:
dimension 3 at n = 0, 3 at n = 1 (skew fields), 3 at n = 2 (radial
quadratic fields), and 0 from degree 4 on, giving the nine-parameter
kernel family in total.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .geometry import bubble_derivatives, BubbleParams


def legendre_p(n, k, x):
    """Associated Legendre P_n^k with the (-1)^k phase, 0 <= k <= n.

    Upward recurrence in n at fixed k:
        P_k^k = (-1)^k (2k-1)!! (1-x^2)^{k/2},
        P_{k+1}^k = x (2k+1) P_k^k,
        (n-k) P_n^k = x (2n-1) P_{n-1}^k - (n+k-1) P_{n-2}^k.
    """
    if k < 0 or k > n:
        raise InvalidInputError("need 0 <= k <= n")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise InvalidInputError("argument must lie in [-1, 1]")
    pkk = np.ones_like(x)
    for m in range(1, k + 1):
        pkk = pkk * (-(2 * m - 1)) * np.sqrt(np.maximum(1.0 - x * x, 0.0))
    if n == k:
        return pkk
    pk1 = x * (2 * k + 1) * pkk
    if n == k + 1:
        return pk1
    pm2, pm1 = pkk, pk1
    for m in range(k + 2, n + 1):
        pm = (x * (2 * m - 1) * pm1 - (m + k - 1) * pm2) / (m - k)
        pm2, pm1 = pm1, pm
    return pm1


def legendre_p_dphi(n, k, phi):
    """d/dphi of P_n^k(cos phi): P_n^{k+1}(cos phi) + k cot(phi) P_n^k."""
    c = np.cos(phi)
    out = legendre_p(n, k + 1, c) if k + 1 <= n else np.zeros_like(c)
    if k:
        out = out + k * (c / np.sin(phi)) * legendre_p(n, k, c)
    return out


def norm_constant(n, k):
    """c_{n,k} = sqrt((2n+1)/(4 pi)) sqrt((n-k)!/(n+k)!)."""
    if k < 0 or k > n:
        raise InvalidInputError("need 0 <= k <= n")
    log_ratio = 0.0
    for m in range(n - k + 1, n + k + 1):
        log_ratio -= np.log(m)
    return np.sqrt((2 * n + 1) / (4 * np.pi)) * np.exp(0.5 * log_ratio)


def norm_constants(n, k):
    """(c_{n,k}, d_{n,k}, e_{n,k}) with the stated sqrt(3/2) n bounds.

    d = c_{n,k}/c_{n,k+1} = sqrt((n-k)(n+k+1)),
    e = (n-k)(n+k+1) c_{n,k}/c_{n,k-1}.
    """
    c = norm_constant(n, k)
    d = np.sqrt((n - k) * (n + k + 1)) if k < n else 0.0
    e = (n - k) * (n + k + 1) / np.sqrt((n + k) * (n - k + 1)) if k >= 1 \
        else 0.0
    return c, d, e


def _ladder_up(n, j):
    # coefficient sqrt((n-j)(n+j+1)) raising P^j -> P^{j+1}
    return np.sqrt(max((n - j) * (n + j + 1), 0))


def _ladder_down(n, j):
    # coefficient sqrt((n+j)(n-j+1)) lowering P^j -> P^{j-1}
    return np.sqrt(max((n + j) * (n - j + 1), 0))


def _wedge_coeffs(n, k):
    """(D+, D-, E+, E-) so that for f = Y_{n,k}:

        f_theta cot sin - f_phi cos = D+ Y_{k+1} + D- Y_{k-1},
        f_theta cot cos + f_phi sin = E+ Y_{k+1} + E- Y_{k-1}.

    Derived from the two Legendre recurrences; the lowering coefficient
    is sqrt((n+k)(n-k+1)) (the raising coefficient shifted by one).
    """
    if k >= 1:
        dp, dm = _ladder_up(n, k), _ladder_down(n, k)
        return -0.5 * dp, 0.5 * dm, -0.5j * dp, -0.5j * dm
    if k == 0:
        d0 = _ladder_up(n, 0)
        return -0.5 * d0, -0.5 * d0, -0.5j * d0, 0.5j * d0
    m = -k
    dp, dm = _ladder_up(n, m), _ladder_down(n, m)
    return 0.5 * dm, -0.5 * dp, 0.5j * dm, 0.5j * dp


def gamma_block_complex(n):
    """Matrix of Gamma on span{e_j Y_{n,k}}, complex basis.

    Index layout: (component j, order k) -> j (2n+1) + (k + n).
    """
    size = 3 * (2 * n + 1)
    mat = np.zeros((size, size), dtype=complex)

    def idx(j, k):
        return j * (2 * n + 1) + (k + n)

    def add(col, j, k, coef):
        if -n <= k <= n and coef != 0:
            mat[idx(j, k), col] += coef

    lap = -n * (n + 1)
    for k in range(-n, n + 1):
        dplus, dminus, eplus, eminus = _wedge_coeffs(n, k)
        col = idx(0, k)
        add(col, 0, k, lap)
        add(col, 1, k, -2.0 * (1j * k))
        add(col, 2, k + 1, -2.0 * dplus)
        add(col, 2, k - 1, -2.0 * dminus)
        col = idx(1, k)
        add(col, 1, k, lap)
        add(col, 0, k, -2.0 * (-1j * k))
        add(col, 2, k + 1, -2.0 * (-eplus))
        add(col, 2, k - 1, -2.0 * (-eminus))
        col = idx(2, k)
        add(col, 2, k, lap)
        add(col, 0, k + 1, -2.0 * (-dplus))
        add(col, 0, k - 1, -2.0 * (-dminus))
        add(col, 1, k + 1, -2.0 * eplus)
        add(col, 1, k - 1, -2.0 * eminus)
    return mat


def _real_basis_transform(n):
    """Unitary T with real basis = complex basis . T (scalar part).

    Real order: k = 0, then (cos, sin) pairs for k = 1..n.
    """
    m = 2 * n + 1
    t = np.zeros((m, m), dtype=complex)
    t[n, 0] = 1.0
    col = 1
    inv = 1.0 / np.sqrt(2.0)
    for k in range(1, n + 1):
        t[n + k, col] = inv
        t[n - k, col] = inv
        t[n + k, col + 1] = -1j * inv
        t[n - k, col + 1] = 1j * inv
        col += 2
    return t


@dataclass(frozen=True)
class HarmonicBlock:
    """Real matrix of Gamma on the degree-n vector harmonics."""

    degree: int
    matrix: np.ndarray

    @property
    def size(self):
        return self.matrix.shape[0]


def gamma_block(n):
    """Assemble the real degree-n block from the closed-form ladder action."""
    cm = gamma_block_complex(n)
    t1 = _real_basis_transform(n)
    t = np.kron(np.eye(3, dtype=complex), t1)
    real = t.conj().T @ cm @ t
    defect = float(np.max(np.abs(real.imag)))
    if defect > 1e-10:
        raise InvalidInputError(
            f"block assembly produced non-real entries ({defect:.2e})")
    return HarmonicBlock(n, real.real)


# -- quadrature cross-check -----------------------------------------------------

def _sphere_grid(n_phi=64, n_theta=128):
    c, w = np.polynomial.legendre.leggauss(n_phi)
    phi = np.arccos(c)
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    wfull = np.outer(w, np.full(n_theta, 2 * np.pi / n_theta))
    return phi, theta, wfull


def _real_scalar_basis(n, phi, theta):
    """Values and (theta, phi) derivatives of the real degree-n harmonics."""
    c = np.cos(phi)
    fields = []
    p0 = legendre_p(n, 0, c)
    dp0 = legendre_p_dphi(n, 0, phi)
    c0 = norm_constant(n, 0)
    one_t = np.ones_like(theta)
    fields.append((c0 * np.outer(p0, one_t),
                   np.zeros((len(phi), len(theta))),
                   c0 * np.outer(dp0, one_t)))
    for k in range(1, n + 1):
        ck = norm_constant(n, k) * np.sqrt(2.0)
        pk = legendre_p(n, k, c)
        dpk = legendre_p_dphi(n, k, phi)
        cos_t, sin_t = np.cos(k * theta), np.sin(k * theta)
        fields.append((ck * np.outer(pk, cos_t),
                       -k * ck * np.outer(pk, sin_t),
                       ck * np.outer(dpk, cos_t)))
        fields.append((ck * np.outer(pk, sin_t),
                       k * ck * np.outer(pk, cos_t),
                       ck * np.outer(dpk, sin_t)))
    return fields


def _wedge_pointwise(j, f_theta, f_phi, phi, theta):
    """(1/sin phi)(F_theta ^ x_phi + x_theta ^ F_phi) for F = e_j f."""
    sin_p = np.sin(phi)[:, None]
    cot = (np.cos(phi) / np.sin(phi))[:, None]
    cos_t, sin_t = np.cos(theta)[None, :], np.sin(theta)[None, :]
    zero = np.zeros_like(f_theta)
    if j == 0:
        return (zero, f_theta, f_theta * cot * sin_t - f_phi * cos_t)
    if j == 1:
        return (-f_theta, zero, -f_theta * cot * cos_t - f_phi * sin_t)
    return (-f_theta * cot * sin_t + f_phi * cos_t,
            f_theta * cot * cos_t + f_phi * sin_t, zero)


def gamma_block_quadrature(n, n_phi=64, n_theta=128):
    """Degree-n block by projecting the defining formula onto the basis."""
    phi, theta, w = _sphere_grid(n_phi, n_theta)
    basis = _real_scalar_basis(n, phi, theta)
    m = 2 * n + 1
    size = 3 * m
    mat = np.zeros((size, size))
    lap = -n * (n + 1)
    for j in range(3):
        for s, (val, d_t, d_p) in enumerate(basis):
            col = j * m + s
            wedge = _wedge_pointwise(j, d_t, d_p, phi, theta)
            for i in range(3):
                img = -2.0 * wedge[i]
                if i == j:
                    img = img + lap * val
                for srow, (bval, _, _) in enumerate(basis):
                    mat[i * m + srow, col] = np.sum(w * bval * img)
    return mat


def off_block_coupling(n, m_other, n_phi=64, n_theta=128):
    """Max projection of Gamma(degree-n basis) onto degree-m harmonics."""
    phi, theta, w = _sphere_grid(n_phi, n_theta)
    basis = _real_scalar_basis(n, phi, theta)
    other = _real_scalar_basis(m_other, phi, theta)
    worst = 0.0
    for j in range(3):
        for val, d_t, d_p in basis:
            wedge = _wedge_pointwise(j, d_t, d_p, phi, theta)
            for i in range(3):
                img = -2.0 * wedge[i]
                for bval, _, _ in other:
                    worst = max(worst, abs(float(np.sum(w * bval * img))))
    return worst


# -- kernel and spectrum --------------------------------------------------------

def kernel_dimension(n, tol=1e-8):
    """Nullspace dimension of the degree-n block at threshold tol * s_max."""
    block = gamma_block(n)
    sv = np.linalg.svd(block.matrix, compute_uv=False)
    smax = sv[0] if len(sv) else 0.0
    if smax == 0.0:
        return block.size
    return int(np.sum(sv < tol * smax))


def kernel_margin(n, tol=1e-8):
    """(dimension, smallest nonzero singular value) of the degree-n block."""
    block = gamma_block(n)
    sv = np.linalg.svd(block.matrix, compute_uv=False)
    smax = sv[0] if len(sv) else 0.0
    if smax == 0.0:
        return block.size, 0.0
    dim = int(np.sum(sv < tol * smax))
    nonzero = sv[sv >= tol * smax]
    return dim, float(nonzero[-1]) if len(nonzero) else 0.0


def kernel_field(c, skew, radial):
    """Member of the nine-parameter kernel family on the sphere.

    w(x) = c + A x + (radial . x) x with A the skew matrix built from
    ``skew`` = (alpha, beta, gamma):
        A = [[0, alpha, beta], [-alpha, 0, gamma], [-beta, -gamma, 0]].
    """
    c = np.asarray(c, dtype=float)
    alpha, beta, gamma = skew
    radial = np.asarray(radial, dtype=float)
    a = np.array([[0.0, alpha, beta],
                  [-alpha, 0.0, gamma],
                  [-beta, -gamma, 0.0]])

    def w(x):
        x = np.asarray(x, dtype=float)
        return c + x @ a.T + (x @ radial)[..., None] * x

    def dw(x):
        x = np.asarray(x, dtype=float)
        return a + np.outer(x, radial) + (x @ radial) * np.eye(3)

    return w, dw


def verify_polynomial_kernel(c, skew, radial, n_points=100, step=1e-4,
                             seed=7):
    """Max planar residual of the linearized equation for a kernel field.

    Pulls the sphere field back through the stereographic chart and
    checks Delta w = 2 (w_x ^ delta_y + delta_x ^ w_y) pointwise, with
    the Laplacian by central differences of the analytic first
    derivatives.
    """
    from .geometry import stereographic

    w, dw = kernel_field(c, skew, radial)
    bubble = BubbleParams((0.0, 0.0), 1.0)

    def w_derivs(pts):
        dx, dy = bubble_derivatives(bubble, pts)
        jac = [dw(stereographic(p)) for p in np.atleast_2d(pts)]
        wx = np.array([j @ d for j, d in zip(jac, np.atleast_2d(dx))])
        wy = np.array([j @ d for j, d in zip(jac, np.atleast_2d(dy))])
        return wx, wy

    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.5, 1.5, size=(n_points, 2))
    worst = 0.0
    for p in pts:
        lap = np.zeros(3)
        for axis in range(2):
            e = np.zeros(2)
            e[axis] = step
            wp = w_derivs((p + e)[None, :])[axis][0]
            wm = w_derivs((p - e)[None, :])[axis][0]
            lap += (wp - wm) / (2 * step)
        dx, dy = bubble_derivatives(bubble, p)
        wx, wy = w_derivs(p[None, :])
        rhs = 2.0 * (np.cross(wx[0], dy) + np.cross(dx, wy[0]))
        worst = max(worst, float(np.max(np.abs(lap - rhs))))
    return worst


def delta_direction_vector(n=1):
    """Real-basis coefficients of the bubble direction (identity field)."""
    if n != 1:
        raise InvalidInputError("the bubble direction lives in degree 1")
    scale = np.sqrt(4 * np.pi / 3.0)
    vec = np.zeros(9)
    vec[0 * 3 + 1] = -scale        # x1 = -scale * (k=1, cos)
    vec[1 * 3 + 2] = -scale        # x2 = -scale * (k=1, sin)
    vec[2 * 3 + 0] = scale         # x3 =  scale * (k=0)
    return vec


def spectral_gap_check(n_max, kernel_tol=1e-8):
    """Quadratic form -<v, Gamma v> weighted by the Dirichlet norm.

    Per degree block 1..n_max, reports the spectrum of
    -sym(Gamma_n)/(n(n+1)): kernel directions sit at 0, every other
    direction is positive except the single bubble direction in degree
    one, whose weighted value is negative.
    """
    report = {"blocks": {}, "delta_direction_value": None}
    for n in range(1, n_max + 1):
        block = gamma_block(n).matrix
        sym_defect = float(np.max(np.abs(block - block.T)))
        form = -0.5 * (block + block.T) / (n * (n + 1))
        eigs = np.linalg.eigvalsh(form)
        scale = np.max(np.abs(eigs)) if len(eigs) else 1.0
        kernel = int(np.sum(np.abs(eigs) < kernel_tol * max(scale, 1.0)))
        positive = eigs[eigs > kernel_tol * max(scale, 1.0)]
        negative = eigs[eigs < -kernel_tol * max(scale, 1.0)]
        report["blocks"][n] = {
            "kernel_count": kernel,
            "min_positive": float(positive[0]) if len(positive) else None,
            "negative": [float(e) for e in negative],
            "symmetry_defect": sym_defect,
        }
        if n == 1:
            v = delta_direction_vector()
            val = float(v @ form @ v) / float(v @ v)
            report["delta_direction_value"] = val
    return report


def appendix_inequality_check(n):
    """Whether degree n passes the scalar kernel bound n+1 <= sqrt(18+sqrt(24))."""
    if n < 1:
        raise InvalidInputError("the bound is stated for n >= 1")
    return bool(n + 1 <= np.sqrt(18.0 + np.sqrt(24.0)))


def kernel_bound_value():
    """The constant sqrt(18 + sqrt 24) ~ 4.785."""
    return float(np.sqrt(18.0 + np.sqrt(24.0)))
