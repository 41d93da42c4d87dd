"""Numeric tensor-calculus kernel against frozen values, a symbolic oracle and
its own invariants."""

import dataclasses
import math

import numpy as np
import pytest

from tubedynamo import (
    ChartPoint,
    DegenerateMetricError,
    DegeneratePlaneError,
    DomainError,
    MetricSpec,
    christoffel,
    commutator,
    covariant_derivative,
    curvature_bundle,
    euclidean_metric,
    gauss_curvature_2d,
    polar_metric,
    sectional_curvature,
    sphere_metric,
)

from _oracles import christoffel_sym, lambdify_rank3, lambdify_rank4, riemann_down_sym


def cylinder_metric():
    """Straight tube chart (r, theta, s): diag(1, r^2, 1)."""
    return MetricSpec(
        dim=3,
        evaluate=lambda x, t: np.diag([1.0, x[0] ** 2, 1.0]),
        domain=lambda x: x[0] > 0,
    )


class TestChristoffel:
    def test_euclidean_all_zero(self):
        ch = christoffel(euclidean_metric(3), (0.3, -1.2, 2.5))
        assert np.max(np.abs(ch.gamma)) < 1e-12

    def test_polar_frozen_values(self):
        ch = christoffel(polar_metric(), (2.0, 0.7))
        assert ch.gamma[0, 1, 1] == pytest.approx(-2.0, abs=1e-9)
        assert ch.gamma[1, 0, 1] == pytest.approx(0.5, abs=1e-9)
        zero_mask = np.ones((2, 2, 2), dtype=bool)
        zero_mask[0, 1, 1] = zero_mask[1, 0, 1] = zero_mask[1, 1, 0] = False
        assert np.max(np.abs(ch.gamma[zero_mask])) < 1e-9

    def test_polar_against_symbolic_oracle(self):
        import sympy as sp

        r, th = sp.symbols("r theta", positive=True)
        oracle = lambdify_rank3(christoffel_sym(sp.diag(1, r**2), (r, th)), (r, th))
        spec = dataclasses.replace(polar_metric(), partials=None)
        for point in [(0.5, 0.1), (1.7, 2.0), (3.2, -0.4)]:
            got = christoffel(spec, point).gamma
            assert np.allclose(got, oracle(*point), atol=1e-8)

    def test_cylinder_frozen_values(self):
        ch = christoffel(cylinder_metric(), (1.0, 0.2, 0.9))
        assert ch.gamma[0, 1, 1] == pytest.approx(-1.0, abs=1e-9)
        assert ch.gamma[1, 0, 1] == pytest.approx(1.0, abs=1e-9)

    def test_symmetry_in_lower_indices(self):
        ch = christoffel(sphere_metric(1.0), (1.1, 0.3))
        assert np.allclose(ch.gamma, ch.gamma.transpose(0, 2, 1), atol=1e-12)

    def test_degenerate_metric_rejected(self):
        bad = MetricSpec(dim=2, evaluate=lambda x, t: np.diag([1.0, 0.0]))
        with pytest.raises(DegenerateMetricError):
            christoffel(bad, (0.5, 0.5))

    def test_point_outside_domain_rejected(self):
        with pytest.raises(DomainError):
            christoffel(polar_metric(), (-1.0, 0.0))


class TestCurvatureBundle:
    def test_flat_3d_annihilation(self):
        b = curvature_bundle(euclidean_metric(3), (0.1, 0.2, 0.3))
        assert np.max(np.abs(b.riemann_down)) < 1e-8
        assert np.max(np.abs(b.ricci)) < 1e-8
        assert abs(b.scalar) < 1e-8

    def test_sphere_r1212(self):
        x1 = 0.9
        b = curvature_bundle(sphere_metric(1.0), (x1, 1.0))
        assert b.riemann_down[0, 1, 0, 1] == pytest.approx(math.sin(x1) ** 2, rel=1e-8)

    def test_sphere_is_einstein(self):
        # Ricci = g for the unit sphere, scalar curvature 2.
        pt = (1.2, 0.4)
        b = curvature_bundle(sphere_metric(1.0), pt)
        assert np.allclose(b.ricci, b.metric, atol=1e-8)
        assert b.scalar == pytest.approx(2.0, abs=1e-8)

    def test_sphere_against_symbolic_oracle(self):
        import sympy as sp

        x1, x2 = sp.symbols("x1 x2", positive=True)
        oracle = lambdify_rank4(riemann_down_sym(sp.diag(1, sp.sin(x1) ** 2), (x1, x2)), (x1, x2))
        spec = dataclasses.replace(sphere_metric(1.0), partials=None)
        for point in [(0.6, 0.0), (1.4, 2.2), (2.3, 5.0)]:
            got = curvature_bundle(spec, point).riemann_down
            assert np.allclose(got, oracle(*point), atol=1e-7)

    def test_riemann_symmetries_and_bianchi(self):
        # round 3-sphere: curvature of order one in every index slot
        def three_sphere(x, t):
            return np.diag([1.0, math.sin(x[0]) ** 2, (math.sin(x[0]) * math.sin(x[1])) ** 2])

        spec = MetricSpec(
            dim=3,
            evaluate=three_sphere,
            domain=lambda x: 0 < x[0] < math.pi and 0 < x[1] < math.pi,
        )
        rng = np.random.default_rng(3)
        for _ in range(4):
            pt = (rng.uniform(0.5, 2.5), rng.uniform(0.5, 2.5), rng.uniform(0, 2 * math.pi))
            b = curvature_bundle(spec, pt)
            rd = b.riemann_down
            scale = max(np.max(np.abs(rd)), 1e-30)
            assert np.max(np.abs(rd + rd.transpose(0, 1, 3, 2))) / scale < 1e-6
            assert np.max(np.abs(rd + rd.transpose(1, 0, 2, 3))) / scale < 1e-6
            assert np.max(np.abs(rd - rd.transpose(2, 3, 0, 1))) / scale < 1e-6
            ru = b.riemann_up
            bianchi = ru + ru.transpose(0, 3, 1, 2) + ru.transpose(0, 2, 3, 1)
            assert np.max(np.abs(bianchi)) / scale < 1e-6
            assert np.allclose(b.ricci, b.ricci.T, atol=1e-12)

    def test_constant_metric_is_flat(self):
        const = np.array([[2.0, 0.3, 0.0], [0.3, 1.5, 0.1], [0.0, 0.1, 0.8]])
        spec = MetricSpec(dim=3, evaluate=lambda x, t: const.copy())
        b = curvature_bundle(spec, (0.4, -0.2, 1.0))
        assert np.max(np.abs(b.riemann_down)) < 1e-8

    def test_analytic_partials_agree_with_pure_fd(self):
        with_partials = sphere_metric(1.0)
        pure_fd = dataclasses.replace(with_partials, partials=None)
        for pt in [(0.8, 0.1), (1.9, 3.0)]:
            a = curvature_bundle(with_partials, pt)
            b = curvature_bundle(pure_fd, pt)
            scale = max(np.max(np.abs(a.riemann_down)), 1e-30)
            assert np.max(np.abs(a.riemann_down - b.riemann_down)) / scale < 1e-5

    def test_stencil_out_of_domain(self):
        # metric still comfortably positive-definite, but the domain boundary
        # sits closer than the second-derivative stencil radius
        spec = dataclasses.replace(polar_metric(), partials=None)
        with pytest.raises(DomainError):
            curvature_bundle(spec, (1e-4, 0.0))

    def test_tube_3d_metric_is_flat(self):
        # the full twisted-tube 3D metric is Euclidean space in tube
        # coordinates, so its whole curvature bundle vanishes for any
        # curvature/torsion profile
        from tubedynamo import TubeParams, tube_metric_3d

        spec = tube_metric_3d(TubeParams(kappa=1.0, tau=0.3, r0=0.1, mode="thick"))
        b = curvature_bundle(spec, (0.4, 1.0, 2.0))
        assert np.max(np.abs(b.riemann_down)) < 1e-8


class TestSectionalCurvature:
    def test_flat_zero(self):
        k = sectional_curvature(euclidean_metric(3), (0, 0, 0), (1, 0, 0), (0, 1, 0))
        assert abs(k) < 1e-10

    def test_unit_sphere_is_one(self):
        k = sectional_curvature(sphere_metric(1.0), (1.0, 0.5), (1, 0), (0, 1))
        assert k == pytest.approx(1.0, abs=1e-8)

    def test_radius_a_sphere(self):
        k = sectional_curvature(sphere_metric(2.0), (1.0, 0.5), (1, 0), (0, 1))
        assert k == pytest.approx(0.25, abs=1e-8)

    def test_scaling_invariance(self):
        spec = sphere_metric(1.0)
        pt = (1.3, 0.2)
        k1 = sectional_curvature(spec, pt, (1, 0), (0, 1))
        k2 = sectional_curvature(spec, pt, (2, 0), (0, 3))
        assert k1 == pytest.approx(k2, abs=1e-8)

    def test_plane_invariance_under_basis_change(self):
        spec = sphere_metric(1.0)
        pt = (1.3, 0.2)
        rng = np.random.default_rng(11)
        x, y = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        k_ref = sectional_curvature(spec, pt, x, y)
        for _ in range(5):
            a, b, c, d = rng.uniform(-2, 2, size=4)
            if abs(a * d - b * c) < 0.1:
                continue
            k = sectional_curvature(spec, pt, a * x + b * y, c * x + d * y)
            assert k == pytest.approx(k_ref, abs=1e-8)

    def test_parallel_vectors_rejected(self):
        with pytest.raises(DegeneratePlaneError):
            sectional_curvature(euclidean_metric(2), (0, 0), (1, 1), (2, 2))


class TestGaussCurvature:
    def test_flat(self):
        assert abs(gauss_curvature_2d(euclidean_metric(2), (0.3, 0.4))) < 1e-10

    def test_unit_sphere(self):
        assert gauss_curvature_2d(sphere_metric(1.0), (1.0, 2.0)) == pytest.approx(1.0, abs=1e-8)

    def test_equals_sectional_in_2d(self):
        spec = sphere_metric(1.5)
        pt = (0.8, 0.3)
        kg = gauss_curvature_2d(spec, pt)
        ks = sectional_curvature(spec, pt, (1, 0), (0, 1))
        assert kg == pytest.approx(ks, abs=1e-8)

    def test_requires_dim_2(self):
        with pytest.raises(ValueError):
            gauss_curvature_2d(euclidean_metric(3), (0, 0, 0))


class TestVectorFieldOps:
    def test_commutator_constant_fields(self):
        x = lambda p: np.array([1.0, 2.0, -1.0])
        y = lambda p: np.array([0.5, 0.0, 3.0])
        out = commutator(x, y, (0.1, 0.2, 0.3))
        assert np.max(np.abs(out.array)) < 1e-10

    def test_commutator_radial_with_r_dtheta(self):
        x = lambda p: np.array([1.0, 0.0, 0.0])
        y = lambda p: np.array([0.0, p[0], 0.0])
        out = commutator(x, y, (1.0, 0.5, 0.0))
        assert np.allclose(out.array, [0.0, 1.0, 0.0], atol=1e-9)

    def test_commutator_antisymmetry(self):
        def x(p):
            return np.array([p[1] ** 2, math.sin(p[0]), p[0] * p[1]])

        def y(p):
            return np.array([p[0], math.cos(p[1]), 1.0])

        pt = (0.7, -0.4, 1.1)
        xy = commutator(x, y, pt).array
        yx = commutator(y, x, pt).array
        assert np.allclose(xy, -yx, atol=1e-9)

    def test_covariant_flat_constant_is_zero(self):
        out = covariant_derivative(
            (1.0, 1.0), lambda p: np.array([2.0, -3.0]), (0.1, 0.2), euclidean_metric(2)
        )
        assert np.max(np.abs(out.array)) < 1e-10

    def test_covariant_flat_reduces_to_directional(self):
        def y_field(p):
            return np.array([p[0] ** 2, p[0] * p[1]])

        pt = (0.8, 0.5)
        out = covariant_derivative((1.0, 2.0), y_field, pt, euclidean_metric(2))
        # (X.nabla)Y with X=(1,2): [2*x, y + 2*x] at (0.8, 0.5)
        assert np.allclose(out.array, [1.6, 2.1], atol=1e-8)

    def test_covariant_polar_theta_theta(self):
        out = covariant_derivative(
            (0.0, 1.0), lambda p: np.array([0.0, 1.0]), (1.0, 0.3), polar_metric()
        )
        assert np.allclose(out.array, [-1.0, 0.0], atol=1e-8)


class TestChartPoint:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            ChartPoint.of(1.0, math.nan)

    def test_dim(self):
        assert ChartPoint.of(1.0, 2.0, 3.0).dim == 3
