import numpy as np
import pytest

from hbubble.errors import AccuracyError
from hbubble.quadrature import (composite_disk_grid, disk_grid,
                                local_patch_grid, merge_grids,
                                plane_integral, plane_radial_integral)


class TestPlaneIntegrals:
    def test_gaussian(self):
        val, err = plane_radial_integral(lambda r: np.exp(-r * r))
        assert abs(val - np.pi) < 1e-11

    def test_bubble_decay_integrand(self):
        val, _ = plane_radial_integral(lambda r: 1.0 / (1 + r * r) ** 2)
        assert abs(val - np.pi) < 1e-11

    def test_anisotropic(self):
        val, _ = plane_integral(lambda x, y: x * x * np.exp(-x * x - y * y))
        assert abs(val - np.pi / 2) < 1e-10

    def test_accuracy_error_raised(self):
        with pytest.raises(AccuracyError):
            # integrand decays too slowly for the requested tolerance
            plane_radial_integral(lambda r: 1.0 / (1.0 + r) ** 2.0001,
                                  tol=1e-13)


class TestDiskGrids:
    def test_polynomial_exactness(self):
        # Gauss property: radial polynomials integrate exactly
        g = disk_grid(24, 32)
        r2 = np.sum(g.points**2, axis=-1)
        assert abs(g.integrate(np.ones(len(r2))) - np.pi) < 1e-12
        assert abs(g.integrate(r2) - np.pi / 2) < 1e-12
        assert abs(g.integrate(r2**10) - 2 * np.pi / 22) < 1e-12

    def test_offcenter_grid_covers_disk(self):
        g = disk_grid(48, 96, center=(0.3, -0.2))
        assert abs(g.integrate(np.ones(len(g.points))) - np.pi) < 1e-10
        assert np.all(np.sum(g.points**2, axis=-1) <= 1.0 + 1e-12)
        x = g.points[:, 0]
        assert abs(g.integrate(x * x) - np.pi / 4) < 1e-8

    def test_local_patch(self):
        g = local_patch_grid((0.2, 0.1), 0.3, 32, 64)
        assert abs(g.integrate(np.ones(len(g.points)))
                   - np.pi * 0.09) < 1e-12

    def test_composite_partition_of_unity(self):
        # the pieces sum to a quadrature over D; the smooth bump limits
        # the rate, so check both the absolute error at production
        # resolution and the refinement convergence
        errors = {}
        for res in ((96, 192, 48, 96), (192, 384, 96, 192)):
            merged = merge_grids(composite_disk_grid(
                [(0.3, 0.0), (-0.3, 0.0)], n_r=res[0], n_theta=res[1],
                patch_n_r=res[2], patch_n_theta=res[3]))
            errors[res[0]] = abs(
                merged.integrate(np.ones(len(merged.points))) - np.pi)
        assert errors[192] < 1e-8
        assert errors[192] < errors[96] / 10
        x = merged.points[:, 0]
        y = merged.points[:, 1]
        assert abs(merged.integrate(x * x + y * y) - np.pi / 2) < 1e-8
        smooth = np.exp(-3 * ((x - 0.3) ** 2 + y**2))
        direct = disk_grid(256, 512)
        ref = direct.integrate(np.exp(
            -3 * ((direct.points[:, 0] - 0.3) ** 2
                  + direct.points[:, 1] ** 2)))
        assert abs(merged.integrate(smooth) - ref) < 1e-8
