import numpy as np
import pytest
from numpy.testing import assert_allclose

from hbubble.domains import (AnnulusDomain, DiskDomain, green_function,
                             green_grad_derivatives, h3_disk,
                             h3_disk_quadrature, h_functions, h_tilde,
                             h_tilde_gradient, mobius_domain, radii,
                             regular_part, robin_gradients)
from hbubble.errors import (InvalidInputError, SingularInputError,
                            UnsupportedDomainError)


@pytest.fixture
def disk():
    return DiskDomain()


@pytest.fixture
def mobius():
    return mobius_domain(0.3 + 0.2j, 0.7)


def random_interior(rng, radius=0.75):
    while True:
        p = rng.uniform(-radius, radius, 2)
        if np.hypot(*p) < radius:
            return p


class TestRegularPart:
    def test_center_pole_vanishes(self, disk, rng):
        for _ in range(10):
            xi = random_interior(rng)
            assert abs(regular_part(disk, (0.0, 0.0), xi)) < 1e-15

    def test_diagonal_closed_form(self, disk):
        a = (0.5, 0.0)
        h = regular_part(disk, a, a)
        assert abs(h - (-np.log(0.75))) < 1e-14
        assert abs(np.exp(2 * h) - 1.0 / (1 - 0.25) ** 2) < 1e-13

    def test_mobius_transport_matches_disk(self, disk, mobius, rng):
        # a Mobius automorphism models the same domain: H(a,a) must agree
        for _ in range(10):
            a = random_interior(rng, 0.6)
            assert abs(regular_part(mobius, a, a)
                       - regular_part(disk, a, a)) < 1e-10

    def test_near_coincidence_continuity(self, mobius):
        a = np.array([0.21, -0.14])
        h_lim = regular_part(mobius, a, a)
        h_near = regular_part(mobius, a, a + [2e-6, 1e-6])
        assert abs(h_lim - h_near) < 1e-6

    def test_outside_rejected(self, disk):
        with pytest.raises(InvalidInputError):
            regular_part(disk, (1.5, 0.0), (0.0, 0.0))


class TestHFunctions:
    def test_center_pole_traces(self, disk, rng):
        # h1(0, xi) = x, h2(0, xi) = y
        for _ in range(20):
            xi = random_interior(rng)
            h1, h2, h3 = h_functions(disk, (0.0, 0.0), xi)
            assert abs(h1 - xi[0]) < 1e-13
            assert abs(h2 - xi[1]) < 1e-13
            assert abs(h3 - 1.0) < 1e-13

    def test_boundary_trace(self, disk):
        a = np.array([0.31, -0.12])
        for th in 2 * np.pi * np.arange(64) / 64:
            xi = np.array([np.cos(th), np.sin(th)])
            h1, h2, _ = h_functions(disk, a, xi * (1 - 1e-12))
            d2 = np.sum((xi - a) ** 2)
            assert abs(h1 - (xi[0] - a[0]) / d2) < 1e-8
            assert abs(h2 - (xi[1] - a[1]) / d2) < 1e-8

    def test_harmonicity(self, disk):
        a = np.array([0.2, 0.35])
        xi = np.array([-0.3, 0.1])
        h = 1e-4
        for idx in range(2):
            lap = 0.0
            for axis in range(2):
                e = np.zeros(2)
                e[axis] = h
                lap += (h_functions(disk, a, xi + e)[idx]
                        - 2 * h_functions(disk, a, xi)[idx]
                        + h_functions(disk, a, xi - e)[idx]) / h**2
            assert abs(lap) < 1e-6

    def test_matches_fd_of_regular_part(self, disk, mobius, rng):
        for domain in (disk, mobius):
            a = np.array([0.25, -0.15])
            xi = np.array([-0.2, 0.3])
            h = 1e-6
            h1, h2, _ = h_functions(domain, a, xi)
            fd1 = (regular_part(domain, a + [h, 0], xi)
                   - regular_part(domain, a - [h, 0], xi)) / (2 * h)
            fd2 = (regular_part(domain, a + [0, h], xi)
                   - regular_part(domain, a - [0, h], xi)) / (2 * h)
            assert abs(h1 - fd1) < 1e-6
            assert abs(h2 - fd2) < 1e-6

    def test_h3_quadrature_matches_closed_form(self, rng):
        for _ in range(10):
            a = random_interior(rng, 0.6)
            xi = random_interior(rng, 0.8)
            assert abs(h3_disk(a, xi)
                       - h3_disk_quadrature(a, xi)) < 1e-10

    def test_annulus_unsupported(self):
        with pytest.raises(UnsupportedDomainError):
            h_functions(AnnulusDomain(2.0), (1.2, 0.0), (1.3, 0.0))


class TestHTilde:
    def test_disk_center(self, disk):
        assert abs(h_tilde(disk, (0.0, 0.0)) - 2.0) < 1e-15

    def test_blowup_toward_boundary(self, disk):
        values = [h_tilde(disk, (r, 0.0)) for r in (0.0, 0.3, 0.6, 0.9)]
        assert all(v2 > v1 for v1, v2 in zip(values, values[1:]))

    def test_robin_identity_disk(self, disk, rng):
        for _ in range(50):
            a = random_interior(rng, 0.9)
            lhs = h_tilde(disk, a)
            rhs = 2.0 * np.exp(2.0 * regular_part(disk, a, a))
            assert abs(lhs - rhs) < 1e-10

    def test_robin_identity_mobius(self, mobius, rng):
        for _ in range(20):
            a = random_interior(rng, 0.6)
            lhs = h_tilde(mobius, a)
            rhs = 2.0 * np.exp(2.0 * regular_part(mobius, a, a))
            assert abs(lhs - rhs) < 1e-10

    def test_conformal_map_independence(self, disk, rng):
        maps = [mobius_domain(0.3 + 0.2j, 0.7),
                mobius_domain(-0.1 + 0.05j, -1.2)]
        for _ in range(10):
            a = random_interior(rng, 0.6)
            vals = [h_tilde(m, a) for m in maps] + [h_tilde(disk, a)]
            assert max(vals) - min(vals) < 1e-10

    def test_gradient_matches_fd(self, disk, mobius, rng):
        for domain in (disk, mobius):
            a = np.array([0.2, -0.3])
            g = h_tilde_gradient(domain, a)
            h = 1e-6
            fd = [(h_tilde(domain, a + e) - h_tilde(domain, a - e)) / (2 * h)
                  for e in (np.array([h, 0]), np.array([0, h]))]
            assert_allclose(g, fd, rtol=1e-6, atol=1e-8)

    def test_boundary_rejected(self, disk):
        with pytest.raises(InvalidInputError):
            h_tilde(disk, (1.0, 0.0))


class TestGreenGradDerivatives:
    def test_identities_against_h_functions(self, disk, mobius, rng):
        for domain in (disk, mobius):
            a = np.array([-0.3, 0.0])
            b = np.array([0.3, 0.0])
            g1x, g1y, g2x, g2y = green_grad_derivatives(domain, a, b)
            rh = robin_gradients(domain, a, b)
            s = b - a
            s4 = np.sum(s**2) ** 2
            assert abs((s[0]**2 - s[1]**2) / s4 + rh[0, 0] - g1x) < 1e-8
            assert abs(2 * s[0] * s[1] / s4 + rh[0, 1] - g1y) < 1e-8
            assert abs(2 * s[0] * s[1] / s4 + rh[1, 0] - g2x) < 1e-8
            assert abs((s[1]**2 - s[0]**2) / s4 + rh[1, 1] - g2y) < 1e-8

    def test_axis_swap_symmetry(self, disk):
        a, b = np.array([-0.3, 0.1]), np.array([0.25, 0.2])
        g1x, _, _, g2y = green_grad_derivatives(disk, a, b)
        # swapping the roles of the axes maps dG1/dx <-> dG2/dy
        swap = lambda p: np.array([p[1], p[0]])
        s1x, _, _, s2y = green_grad_derivatives(disk, swap(a), swap(b))
        assert abs(g1x - s2y) < 1e-12
        assert abs(g2y - s1x) < 1e-12

    def test_fd_oracle(self, disk):
        a, b = np.array([0.2, -0.1]), np.array([-0.3, 0.25])
        vals = green_grad_derivatives(disk, a, b)
        h = 1e-4

        def g(aa, bb):
            return green_function(disk, aa, bb)

        fd = []
        for i in range(2):
            for j in range(2):
                ea, eb = np.zeros(2), np.zeros(2)
                ea[i] = h
                eb[j] = h
                second = (g(a + ea, b + eb) - g(a + ea, b - eb)
                          - g(a - ea, b + eb) + g(a - ea, b - eb)) / (4 * h * h)
                fd.append(-second)
        assert_allclose(vals, [fd[0], fd[1], fd[2], fd[3]], atol=1e-5)

    def test_coincident_points_rejected(self, disk):
        with pytest.raises(SingularInputError):
            green_grad_derivatives(disk, (0.1, 0.1), (0.1, 0.1))


class TestRadii:
    def test_disk_center(self, disk):
        assert_allclose(radii(disk, (0.0, 0.0)), (1.0, 1.0))

    def test_disk_closed_form(self, disk, rng):
        for _ in range(20):
            a = random_interior(rng, 0.9)
            r_har, r_hyp = radii(disk, a)
            expected = 1.0 - np.sum(np.asarray(a) ** 2)
            assert abs(r_har - expected) < 1e-13
            assert abs(r_hyp - expected) < 1e-13

    def test_mobius_radii_agree(self, mobius, rng):
        for _ in range(20):
            a = random_interior(rng, 0.6)
            r_har, r_hyp = radii(mobius, a)
            assert abs(r_har - r_hyp) < 1e-10


def test_green_function_symmetry(disk=DiskDomain()):
    a, b = (0.3, -0.2), (-0.1, 0.4)
    assert abs(green_function(disk, a, b) - green_function(disk, b, a)) < 1e-13
