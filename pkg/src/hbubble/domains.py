"""Green's function data on the disk, conformal images, and harmonic extension.

Conventions.  The Green's function is G(a, xi) = -log|a - xi| - H(a, xi);
h1 = dH/da1, h2 = dH/da2 are harmonic in xi with the Kelvin boundary
traces; the concentration function is
H_tilde(a) = (d h1/dx + d h2/dy) at xi = a.

On the disk H(a, xi) = -log|1 - conj(a) xi|, so everything below is exact
complex arithmetic.  A simply connected domain is handled through a
supplied conformal map f onto the disk; the identity
H_tilde = 2 e^{2 H(a,a)} = 2 |f'(a)|^2 / (1 - |f(a)|^2)^2 holds there,
and the two sides are computed independently and checked against each
other by the tests rather than trusted individually.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SingularInputError, UnsupportedDomainError

DEFAULT_INTERIOR_MARGIN = 0.05   # standing assumption dist(a, boundary) >= tau0
COINCIDENCE_CUTOFF = 1e-6


def _c(p):
    """(x, y) pair (or complex) to complex."""
    if isinstance(p, complex):
        return p
    p = np.asarray(p, dtype=float)
    return complex(p[..., 0], p[..., 1])


class DiskDomain:
    """The unit disk."""

    variant = "disk"

    def contains(self, a):
        return abs(_c(a)) < 1.0

    def map_to_disk(self, z):
        return z

    def dmap(self, z):
        return 1.0

    def d2map(self, z):
        return 0.0

    def d3map(self, z):
        return 0.0


class ConformalDomain:
    """Simply connected domain given by a conformal map f onto the disk.

    ``f`` and ``fprime`` are callables on complex numbers; optional higher
    derivatives enable analytic position gradients of the Green data.
    ``contains`` defaults to |f(z)| < 1.
    """

    variant = "simply-connected"

    def __init__(self, f, fprime, f2=None, f3=None, contains=None):
        self._f = f
        self._f1 = fprime
        self._f2 = f2
        self._f3 = f3
        self._contains = contains

    def contains(self, a):
        z = _c(a)
        if self._contains is not None:
            return self._contains(z)
        return abs(self._f(z)) < 1.0

    def map_to_disk(self, z):
        return self._f(z)

    def dmap(self, z):
        return self._f1(z)

    def d2map(self, z):
        if self._f2 is None:
            h = 1e-5
            return (self._f1(z + h) - self._f1(z - h)) / (2 * h)
        return self._f2(z)

    def d3map(self, z):
        if self._f3 is None:
            h = 1e-4
            return (self.d2map(z + h) - self.d2map(z - h)) / (2 * h)
        return self._f3(z)


def mobius_domain(c, alpha=0.0):
    """Disk automorphism f(z) = e^{i alpha} (z - c)/(1 - conj(c) z).

    Useful as a nontrivial conformal model of the disk itself.
    """
    c = complex(c)
    if abs(c) >= 1.0:
        raise InvalidInputError("Mobius parameter must lie inside the disk")
    phase = np.exp(1j * alpha)
    cbar = np.conj(c)
    one = 1.0 - abs(c) ** 2

    def f(z):
        return phase * (z - c) / (1.0 - cbar * z)

    def f1(z):
        return phase * one / (1.0 - cbar * z) ** 2

    def f2(z):
        return phase * 2.0 * cbar * one / (1.0 - cbar * z) ** 3

    def f3(z):
        return phase * 6.0 * cbar**2 * one / (1.0 - cbar * z) ** 4

    return ConformalDomain(f, f1, f2, f3, contains=lambda z: abs(z) < 1.0)


class AnnulusDomain:
    """Round annulus 1/rho < |xi| < rho; Green data via deck-series."""

    variant = "annulus"

    def __init__(self, rho, terms=None):
        if not rho > 1.0:
            raise InvalidInputError("annulus modulus rho must exceed 1")
        self.rho = float(rho)
        self.terms = terms

    def contains(self, a):
        r = abs(_c(a))
        return 1.0 / self.rho < r < self.rho


def _require_interior(domain, a, name="point"):
    if not domain.contains(a):
        raise InvalidInputError(f"{name} {a!r} is outside the domain")


def _require_margin(domain, a, tau0):
    from .energy import boundary_distance

    if boundary_distance(domain, np.asarray(a, dtype=float)) < tau0:
        raise InvalidInputError(
            f"point {a!r} is within the interior margin tau0 = {tau0} "
            "of the boundary")


@dataclass(frozen=True)
class GreenData:
    """Bundle of the Green data at a pole/point pair."""

    green: float
    regular_part: float
    h1: float
    h2: float
    h3: float
    h_tilde: float


def green_data(domain, a, xi):
    """All Green quantities of the pair (a, xi) in one structure."""
    h1, h2, h3 = h_functions(domain, a, xi)
    return GreenData(
        green=green_function(domain, a, xi),
        regular_part=regular_part(domain, a, xi),
        h1=h1, h2=h2, h3=h3,
        h_tilde=h_tilde(domain, a))


def regular_part(domain, a, xi):
    """Regular part H(a, xi) of the Green's function."""
    _require_interior(domain, a, "pole")
    _require_interior(domain, xi, "point")
    za, zx = _c(a), _c(xi)
    if domain.variant == "disk":
        return -np.log(abs(1.0 - np.conj(za) * zx))
    if domain.variant == "simply-connected":
        fa, fx = domain.map_to_disk(za), domain.map_to_disk(zx)
        base = -np.log(abs(1.0 - np.conj(fa) * fx))
        if abs(zx - za) < COINCIDENCE_CUTOFF:
            # removable singularity: log|f(xi)-f(a)| - log|xi-a| -> log|f'|,
            # evaluated at the midpoint for second-order accuracy
            return base + np.log(abs(domain.dmap(0.5 * (za + zx))))
        return base + np.log(abs(fx - fa)) - np.log(abs(zx - za))
    raise UnsupportedDomainError(
        "regular_part is available on disk and simply connected domains")


def green_function(domain, a, xi):
    """G(a, xi) = -log|a - xi| - H(a, xi)."""
    za, zx = _c(a), _c(xi)
    if za == zx:
        raise SingularInputError("Green's function needs a != xi")
    return -np.log(abs(za - zx)) - regular_part(domain, a, xi)


def _dh_da(domain, a, xi):
    """Wirtinger derivative q = dH/da (complex); h1 = 2 Re q, h2 = -2 Im q."""
    za, zx = _c(a), _c(xi)
    if domain.variant == "disk":
        return 0.5 * np.conj(zx) / (1.0 - za * np.conj(zx))
    fa, fx = domain.map_to_disk(za), domain.map_to_disk(zx)
    f1a = domain.dmap(za)
    term1 = 0.5 * np.conj(fx) * f1a / (1.0 - fa * np.conj(fx))
    if abs(zx - za) < COINCIDENCE_CUTOFF:
        # f'(a)/(f(a)-f(xi)) - 1/(a-xi) -> f''(a)/(2 f'(a))
        reg = 0.5 * domain.d2map(za) / f1a
        return term1 + 0.5 * reg
    term2 = 0.5 * f1a / (fa - fx)
    term3 = -0.5 / (za - zx)
    return term1 + term2 + term3


def h_functions(domain, a, xi, tau0=DEFAULT_INTERIOR_MARGIN):
    """(h1, h2, h3) at (a, xi); the pole keeps the margin tau0 inside.

    h1, h2 come from analytic differentiation of the regular part; h3 is
    the harmonic extension of 1/|xi - a|^2, provided on the disk only
    (it enters the expansions only at lower order).
    """
    if domain.variant == "annulus":
        raise UnsupportedDomainError(
            "h-functions are not provided on the annulus; "
            "use the deck-series concentration function instead")
    _require_interior(domain, a, "pole")
    _require_margin(domain, a, tau0)
    q = _dh_da(domain, a, xi)
    h1 = 2.0 * q.real
    h2 = -2.0 * q.imag
    if domain.variant == "disk":
        h3 = h3_disk(a, xi)
    else:
        h3 = np.nan
    return h1, h2, h3


def h3_disk(a, xi):
    """Harmonic extension of the boundary datum 1/|xi - a|^2 on the disk.

    Closed form by reflecting the boundary identity
    1/(xi - a) = conj(xi) / (1 - a conj(xi)) on |xi| = 1.
    """
    za, zx = _c(a), _c(xi)
    one = 1.0 - abs(za) ** 2
    val = (za * np.conj(zx) / (1.0 - za * np.conj(zx))
           + 1.0 / (1.0 - np.conj(za) * zx))
    return val.real / one


def h3_disk_quadrature(a, xi, n=512):
    """h3 by Poisson-kernel quadrature of its boundary datum (oracle route)."""
    from .poisson import harmonic_extension_disk

    za = _c(a)

    def datum(theta):
        z = np.exp(1j * theta)
        return (1.0 / np.abs(z - za) ** 2)[:, None]

    return float(harmonic_extension_disk(datum, xi, n)[0])


def robin_gradients(domain, a, xi):
    """2x2 matrix [[dh1/dx, dh1/dy], [dh2/dx, dh2/dy]] at (a, xi).

    Valid on disk and simply connected domains; xi may equal a (the
    singular pieces cancel in the limit, leaving the Schwarzian term).
    """
    if domain.variant == "annulus":
        raise UnsupportedDomainError("h-function derivatives need a Green "
                                     "representation; unsupported on annulus")
    za, zx = _c(a), _c(xi)
    fa, fx = domain.map_to_disk(za), domain.map_to_disk(zx)
    f1a, f1x = domain.dmap(za), domain.dmap(zx)
    q_anti = 0.5 * f1a * np.conj(f1x) / (1.0 - fa * np.conj(fx)) ** 2
    if abs(zx - za) < COINCIDENCE_CUTOFF:
        f1 = domain.dmap(za)
        f2 = domain.d2map(za)
        f3 = domain.d3map(za)
        q_holo = 0.5 * (f3 / (6.0 * f1) - (f2 / f1) ** 2 / 4.0)
    else:
        q_holo = 0.5 * (f1a * f1x / (fa - fx) ** 2 - 1.0 / (za - zx) ** 2)
    p, q = q_holo, q_anti
    dh1dx = 2.0 * (p + q).real
    dh1dy = -2.0 * (p - q).imag
    dh2dx = -2.0 * (p + q).imag
    dh2dy = -2.0 * (p - q).real
    return np.array([[dh1dx, dh1dy], [dh2dx, dh2dy]])


def h_tilde(domain, a):
    """Concentration function H_tilde(a) = (dh1/dx + dh2/dy)|_{xi=a}."""
    _require_interior(domain, a)
    za = _c(a)
    if domain.variant == "disk":
        return 2.0 / (1.0 - abs(za) ** 2) ** 2
    if domain.variant == "simply-connected":
        fa = domain.map_to_disk(za)
        f1 = domain.dmap(za)
        return 2.0 * abs(f1) ** 2 / (1.0 - abs(fa) ** 2) ** 2
    from .annulus import AnnulusSeries
    series = AnnulusSeries(domain.rho, domain.terms)
    return series.h_tilde(abs(za))


def h_tilde_gradient(domain, a):
    """Planar gradient of H_tilde at a (closed form)."""
    _require_interior(domain, a)
    za = _c(a)
    if domain.variant == "disk":
        g = 8.0 * za / (1.0 - abs(za) ** 2) ** 3
        return np.array([g.real, g.imag])
    if domain.variant == "simply-connected":
        fa = domain.map_to_disk(za)
        f1 = domain.dmap(za)
        f2 = domain.d2map(za)
        one = 1.0 - abs(fa) ** 2
        d_a = 2.0 * (f2 * np.conj(f1) / one**2
                     + 2.0 * abs(f1) ** 2 * f1 * np.conj(fa) / one**3)
        return np.array([2.0 * d_a.real, -2.0 * d_a.imag])
    from .annulus import AnnulusSeries
    series = AnnulusSeries(domain.rho, domain.terms)
    r = abs(za)
    if r == 0.0:
        raise InvalidInputError("annulus point must be off the origin")
    d_r = series.h_tilde_radial_derivative(r)
    e = za / r
    return np.array([d_r * e.real, d_r * e.imag])


def green_grad_derivatives(domain, a, b):
    """Second Green derivatives pairing with bubble orientations.

    Returns (dG1/dx, dG1/dy, dG2/dx, dG2/dy) at (a, b) in the sign
    convention for which
        (sigma1^2 - sigma2^2)/|sigma|^4 + dh1/dx(a, b) = dG1/dx(a, b)
    and its three companions hold (sigma = b - a).  Computed from the
    Wirtinger second derivatives s = d2G/da dxi, t = d2G/da dconj(xi),
    transported through the conformal map where present.
    """
    za, zb = _c(a), _c(b)
    if za == zb:
        raise SingularInputError("green_grad_derivatives needs a != b")
    _require_interior(domain, a)
    _require_interior(domain, b)
    if domain.variant == "annulus":
        raise UnsupportedDomainError("no Green representation on the annulus")
    fa, fb = domain.map_to_disk(za), domain.map_to_disk(zb)
    f1a, f1b = domain.dmap(za), domain.dmap(zb)
    s = -0.5 * f1a * f1b / (fa - fb) ** 2
    t = -0.5 * f1a * np.conj(f1b) / (1.0 - fa * np.conj(fb)) ** 2
    dg1dx = -2.0 * (s + t).real
    dg1dy = 2.0 * (s - t).imag
    dg2dx = 2.0 * (s + t).imag
    dg2dy = 2.0 * (s - t).real
    return dg1dx, dg1dy, dg2dx, dg2dy


def harmonic_radius(domain, a):
    """exp(-H(a, a))."""
    _require_interior(domain, a)
    za = _c(a)
    if domain.variant == "disk":
        return 1.0 - abs(za) ** 2
    if domain.variant == "simply-connected":
        fa = domain.map_to_disk(za)
        return (1.0 - abs(fa) ** 2) / abs(domain.dmap(za))
    from .annulus import AnnulusSeries
    series = AnnulusSeries(domain.rho, domain.terms)
    return np.exp(-0.5 * np.log(series.robin_exp(abs(za)) / 2.0))


def hyperbolic_radius(domain, a):
    """|g'(w)| (1 - |w|^2) for the covering map g of the disk onto the domain."""
    _require_interior(domain, a)
    za = _c(a)
    if domain.variant == "disk":
        return 1.0 - abs(za) ** 2
    if domain.variant == "simply-connected":
        fa = domain.map_to_disk(za)
        return (1.0 - abs(fa) ** 2) / abs(domain.dmap(za))
    from .annulus import AnnulusSeries
    series = AnnulusSeries(domain.rho, domain.terms)
    return series.hyperbolic_radius(abs(za))


def radii(domain, a):
    """(harmonic radius, hyperbolic radius) at a."""
    return harmonic_radius(domain, a), hyperbolic_radius(domain, a)
