import numpy as np
import pytest
from numpy.testing import assert_allclose

from hbubble.energy import g_omega
from hbubble.errors import InvalidInputError
from hbubble.geometry import BubbleParams, bubble_value
from hbubble.poisson import (FourierExtension, bubble_boundary_correction,
                             bubble_harmonic_part, harmonic_extension_disk)

from conftest import random_rotation


class TestHarmonicExtension:
    def test_constant_data(self, rng):
        ext = FourierExtension(
            lambda th: np.tile([1.5, -2.0, 0.25], (len(th), 1)), 64)
        for _ in range(10):
            p = rng.uniform(-0.7, 0.7, 2)
            if np.hypot(*p) >= 1:
                continue
            assert_allclose(ext.value(p), [1.5, -2.0, 0.25], atol=1e-14)

    def test_coordinate_data(self, rng):
        ext = FourierExtension(
            lambda th: np.stack([np.cos(th), np.sin(th),
                                 np.zeros_like(th)], axis=-1), 128)
        for _ in range(10):
            p = rng.uniform(-0.7, 0.7, 2)
            assert_allclose(ext.value(p), [p[0], p[1], 0.0], atol=1e-13)

    def test_matches_concentrated_datum_closed_form(self, rng):
        omega = 0.6
        g = g_omega(omega)

        def boundary(th):
            pts = np.stack([np.cos(th), np.sin(th)], axis=-1)
            return g.value(pts)

        for _ in range(10):
            p = rng.uniform(-0.6, 0.6, 2)
            val = harmonic_extension_disk(boundary, p, 512)
            assert np.max(np.abs(val - g.value(p))) < 1e-10

    def test_radial_limit_reproduces_boundary(self):
        g = g_omega(0.4)
        ext = FourierExtension(
            lambda th: g.value(np.stack([np.cos(th), np.sin(th)], -1)), 512)
        for th in 2 * np.pi * np.arange(64) / 64:
            p = (1.0 - 1e-9) * np.array([np.cos(th), np.sin(th)])
            trace = g.value(np.array([np.cos(th), np.sin(th)]))
            assert np.max(np.abs(ext.value(p) - trace)) < 1e-6

    def test_gradient_and_second_match_fd(self, rng):
        g = g_omega(0.5)
        ext = FourierExtension(
            lambda th: g.value(np.stack([np.cos(th), np.sin(th)], -1)), 256)
        p = np.array([0.3, -0.2])
        h = 1e-6
        gx, gy = ext.gradient(p)
        fdx = (ext.value(p + [h, 0]) - ext.value(p - [h, 0])) / (2 * h)
        fdy = (ext.value(p + [0, h]) - ext.value(p - [0, h])) / (2 * h)
        assert np.max(np.abs(gx - fdx)) < 1e-8
        assert np.max(np.abs(gy - fdy)) < 1e-8
        hxx, hxy, hyy = ext.second(p)
        assert np.max(np.abs(hxx + hyy)) < 1e-10  # harmonic
        fdxx = (ext.gradient(p + [h, 0])[0] - ext.gradient(p - [h, 0])[0]) \
            / (2 * h)
        assert np.max(np.abs(hxx - fdxx)) < 1e-7

    def test_outside_disk_rejected(self):
        ext = FourierExtension(lambda th: np.cos(th)[:, None], 64)
        with pytest.raises(InvalidInputError):
            ext.value(np.array([1.5, 0.0]))


class TestBubbleCorrection:
    def test_far_field_limit(self):
        # phi -> (0,0,1) with |phi - (0,0,1)| <= C/lam
        b = BubbleParams((0.0, 0.0), 200.0)
        phi = bubble_harmonic_part(b).value(np.array([0.5, 0.2]))
        assert np.linalg.norm(phi - [0, 0, 1]) < 5.0 / 200.0

    def test_asymptotic_model_ratio(self):
        # component errors shrink like o(1/lam), o(1/lam), o(1/lam^2)
        xi = np.array([0.45, -0.3])
        errs = []
        for lam in (20.0, 40.0, 80.0):
            b = BubbleParams((0.1, 0.05), lam)
            phi, model = bubble_boundary_correction(b, xi)
            errs.append(np.abs(phi - model))
        errs = np.array(errs)
        # scaled errors lam * e1, lam * e2, lam^2 * e3 all decreasing
        lams = np.array([20.0, 40.0, 80.0])
        for comp, power in ((0, 1), (1, 1), (2, 2)):
            scaled = errs[:, comp] * lams**power
            assert scaled[2] < scaled[0]

    def test_first_component_matches_h1(self):
        lam = 40.0
        b = BubbleParams((0.0, 0.0), lam)
        xi = np.array([0.4, 0.1])
        phi, model = bubble_boundary_correction(b, xi)
        assert abs(phi[0] - model[0]) < 0.2 * abs(model[0])

    def test_rotation_equivariance(self, rng):
        lam = 25.0
        r = random_rotation(rng)
        xi = np.array([0.3, -0.4])
        phi_plain = bubble_harmonic_part(
            BubbleParams((0.1, 0.0), lam)).value(xi)
        phi_rot = bubble_harmonic_part(
            BubbleParams((0.1, 0.0), lam, r)).value(xi)
        assert_allclose(phi_rot, r @ phi_plain, atol=1e-12)

    def test_boundary_trace_matches_bubble(self):
        b = BubbleParams((0.2, -0.1), 30.0)
        ext = bubble_harmonic_part(b, 512)
        for th in 2 * np.pi * np.arange(16) / 16:
            p = np.array([np.cos(th), np.sin(th)]) * (1 - 1e-10)
            assert np.max(np.abs(ext.value(p) - bubble_value(b, p))) < 1e-8
