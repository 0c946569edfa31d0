"""Harmonic extension on the unit disk from sampled boundary data.

The extension uses the n-point trapezoid discretization of the Poisson
kernel, resummed in Fourier modes: with real data g(theta_j) on a
uniform grid,

    u(z) = chat_0 + sum_{m=1}^{n/2-1} 2 Re( chat_m z^m ),

which is stable for all |z| <= 1 (unlike evaluating the kernel sum near
the boundary) and spectrally accurate for smooth data.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError


class FourierExtension:
    """Harmonic extension of R^d-valued boundary data on the unit circle."""

    def __init__(self, boundary, n=512):
        """``boundary(theta)`` maps an angle array (m,) to values (m, d)."""
        if n < 8:
            raise InvalidInputError("need at least 8 boundary nodes")
        theta = 2 * np.pi * np.arange(n) / n
        data = np.asarray(boundary(theta), dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        self.n = n
        self.dim = data.shape[1]
        coef = np.fft.rfft(data, axis=0) / n       # modes 0 .. n/2, shape (h+1, d)
        self.mean = coef[0].real
        self.modes = coef[1: n // 2]               # z^1 .. z^{n/2-1}

    def value(self, xi):
        """Extension value at points xi (.., 2) -> (.., dim)."""
        z = self._to_complex(xi)
        val = np.broadcast_to(self.mean, z.shape + (self.dim,)).copy()
        zpow = np.ones_like(z)
        for c in self.modes:
            zpow = zpow * z
            val += 2.0 * np.real(zpow[..., None] * c)
        return val

    def gradient(self, xi):
        """(d/dx, d/dy) of the extension, each (.., dim)."""
        z = self._to_complex(xi)
        dh = np.zeros(z.shape + (self.dim,), dtype=complex)
        zpow = np.ones_like(z)
        for m, c in enumerate(self.modes, start=1):
            dh += m * zpow[..., None] * c
            zpow = zpow * z
        return 2.0 * dh.real, -2.0 * dh.imag

    def second(self, xi):
        """(d2/dx2, d2/dxdy, d2/dy2) of the extension, each (.., dim)."""
        z = self._to_complex(xi)
        d2h = np.zeros(z.shape + (self.dim,), dtype=complex)
        zpow = np.ones_like(z)            # z^{m-2} for the mode m below
        for m, c in enumerate(self.modes, start=1):
            if m < 2:
                continue
            d2h += m * (m - 1) * zpow[..., None] * c
            zpow = zpow * z
        uxx = 2.0 * d2h.real
        uxy = -2.0 * d2h.imag
        return uxx, uxy, -uxx

    @staticmethod
    def _to_complex(xi):
        xi = np.asarray(xi, dtype=float)
        z = xi[..., 0] + 1j * xi[..., 1]
        if np.any(np.abs(z) > 1.0 + 1e-12):
            raise InvalidInputError("harmonic extension evaluated outside the disk")
        return z


def harmonic_extension_disk(boundary, xi, n=512):
    """Poisson-trapezoid harmonic extension of ``boundary`` evaluated at xi."""
    ext = FourierExtension(boundary, n)
    return ext.value(np.asarray(xi, dtype=float))


def bubble_harmonic_part(bubble, n=512):
    """FourierExtension matching a bubble's boundary trace on the unit circle.

    This is the function phi with P delta = delta - phi.
    """
    from .geometry import bubble_value

    def boundary(theta):
        pts = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return bubble_value(bubble, pts)

    return FourierExtension(boundary, n)


def bubble_boundary_correction(bubble, xi, n=512):
    """(phi(xi), asymptotic model of phi(xi)) for a bubble on the disk.

    The model is R (2 h1/lam, 2 h2/lam, 1 - 2 h3/lam^2) with the
    h-functions at (a, xi); the difference shrinks like o(1/lam),
    o(1/lam), o(1/lam^2) componentwise.
    """
    from .domains import DiskDomain, h_functions

    phi = bubble_harmonic_part(bubble, n).value(np.asarray(xi, dtype=float))
    disk = DiskDomain()
    xi = np.asarray(xi, dtype=float)
    lam = bubble.scale
    if xi.ndim == 1:
        h1, h2, h3 = h_functions(disk, bubble.center, xi)
        model = np.array([2 * h1 / lam, 2 * h2 / lam, 1.0 - 2 * h3 / lam**2])
    else:
        model = np.empty(xi.shape[:-1] + (3,))
        flat = xi.reshape(-1, 2)
        out = model.reshape(-1, 3)
        for i, p in enumerate(flat):
            h1, h2, h3 = h_functions(disk, bubble.center, p)
            out[i] = (2 * h1 / lam, 2 * h2 / lam, 1.0 - 2 * h3 / lam**2)
    return phi, model @ bubble.rotation.T
