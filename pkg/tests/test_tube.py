"""Twisted-tube geometry: twist quadrature, metric constructors, closed forms."""

import math

import numpy as np
import pytest

from tubedynamo import (
    FlowField,
    SingularityError,
    TabulatedProfile,
    TubeParams,
    analytic_gauss,
    analytic_r1212,
    analytic_sectional,
    curvature_bundle,
    frenet_frame_helix,
    gauss_curvature_2d,
    incompressibility_residual,
    negative_gauss_condition,
    riemann_xyy_tube,
    stretch_coefficient,
    surface_r1212,
    tube_metric_3d,
    tube_surface_metric,
    twist_angle,
    twist_state,
)


def thick(kappa=1.0, tau=0.0, r0=0.1):
    return TubeParams(kappa=kappa, tau=tau, r0=r0, mode="thick")


class TestTwistAngle:
    def test_zero_torsion_identity(self):
        assert twist_angle(thick(tau=0.0), 1.0, 17.3) == 1.0

    def test_constant_torsion(self):
        assert twist_angle(thick(tau=0.5), 0.0, 2.0) == pytest.approx(-1.0, abs=1e-12)

    def test_linear_torsion_profile(self):
        params = TubeParams(kappa=1.0, tau=lambda u: u, r0=0.1, mode="thick")
        assert twist_angle(params, 0.0, 2.0) == pytest.approx(-2.0, abs=1e-9)

    def test_negative_s(self):
        params = TubeParams(kappa=1.0, tau=lambda u: u, r0=0.1, mode="thick")
        # integral of u from 0 to -2 is +2, so theta = -2
        assert twist_angle(params, 0.0, -2.0) == pytest.approx(-2.0, abs=1e-9)

    def test_additivity_for_constant_torsion(self):
        params = thick(tau=0.7)
        th_r = 0.3
        s1, s2 = 1.1, 2.4
        total = twist_angle(params, th_r, s1 + s2) - th_r
        parts = (twist_angle(params, th_r, s1) - th_r) + (twist_angle(params, th_r, s2) - th_r)
        assert total == pytest.approx(parts, abs=1e-10)

    def test_tabulated_profile_quadrature(self):
        # table samples of tau(u) = u; the spline reproduces it exactly
        grid = np.linspace(-1.0, 4.0, 21)
        params = TubeParams(
            kappa=1.0, tau=TabulatedProfile(tuple(grid), tuple(grid)), r0=0.1, mode="thick"
        )
        assert twist_angle(params, 0.0, 2.0) == pytest.approx(-2.0, abs=1e-9)

    def test_non_finite_torsion_rejected(self):
        params = TubeParams(kappa=1.0, tau=lambda u: math.nan, r0=0.1, mode="thick")
        with pytest.raises(ValueError):
            twist_angle(params, 0.0, 1.0)

    def test_twist_state(self):
        st = twist_state(thick(tau=0.5), 1.0, 2.0)
        assert st.theta_r == 1.0
        assert st.theta == pytest.approx(0.0, abs=1e-12)


class TestTubeMetric3D:
    def test_straight_tube_is_cylindrical(self):
        spec = tube_metric_3d(thick(kappa=0.0))
        g = spec.evaluate(np.array([1.7, 0.3, 5.0]), 0.0)
        assert np.allclose(g, np.diag([1.0, 1.7**2, 1.0]))

    def test_thin_mode_unit_axial_coefficient(self):
        spec = tube_metric_3d(TubeParams(kappa=2.0, tau=1.0, r0=0.1, mode="thin"))
        g = spec.evaluate(np.array([0.4, 1.0, 2.0]), 0.0)
        assert g[2, 2] == 1.0

    def test_axial_coefficient_value(self):
        spec = tube_metric_3d(thick(kappa=1.0))
        g = spec.evaluate(np.array([0.3, 0.0, 0.0]), 0.0)
        assert g[2, 2] == pytest.approx(0.49, abs=1e-15)

    def test_domain_excludes_degenerate_stretch(self):
        spec = tube_metric_3d(thick(kappa=1.0))
        assert not spec.domain(np.array([1.0, 0.0, 0.0]))   # K = 0
        assert spec.domain(np.array([0.5, 0.0, 0.0]))       # K = 0.5
        assert not spec.domain(np.array([-0.1, 0.0, 0.0]))  # r <= 0

    def test_positive_definite_on_domain(self):
        spec = tube_metric_3d(thick(kappa=1.0, tau=0.4))
        rng = np.random.default_rng(5)
        for _ in range(20):
            x = np.array([rng.uniform(0.05, 0.8), rng.uniform(0, 2 * math.pi), rng.uniform(0, 4)])
            if spec.domain(x):
                assert np.linalg.eigvalsh(spec.evaluate(x, 0.0))[0] > 0


class TestTubeSurfaceMetric:
    def test_straight_tube(self):
        spec = tube_surface_metric(thick(kappa=0.0, r0=0.5))
        g = spec.evaluate(np.array([0.3, 2.0]), 0.0)
        assert np.allclose(g, np.diag([0.25, 1.0]))

    def test_frozen_value(self):
        spec = tube_surface_metric(thick(kappa=1.0, r0=0.5))
        g = spec.evaluate(np.array([0.0, 0.0]), 0.0)
        assert np.allclose(g, np.diag([0.25, 0.25]))

    def test_domain_false_at_degeneracy(self):
        # r0 kappa cos(theta) = 1 at theta = 0
        spec = tube_surface_metric(thick(kappa=2.0, r0=0.5))
        assert not spec.domain(np.array([0.0, 0.0]))
        assert spec.domain(np.array([math.pi, 0.0]))

    def test_requires_positive_radius(self):
        with pytest.raises(ValueError):
            tube_surface_metric(thick(r0=0.0))


class TestClosedFormCurvatures:
    def test_r1212_zero_cases(self):
        assert analytic_r1212(thick(kappa=0.0), 1.0, 0.3) == 0.0
        assert analytic_r1212(thick(kappa=1.0), 1.0, math.pi / 2) == pytest.approx(0.0, abs=1e-16)

    def test_r1212_frozen_value(self):
        assert analytic_r1212(thick(kappa=1.0, r0=0.5), 0.0, 0.0) == pytest.approx(-0.5)
        assert surface_r1212(thick(kappa=1.0, r0=0.5), 0.0, 0.0) == pytest.approx(-0.25)

    def test_surface_r1212_matches_numeric_kernel(self):
        params = thick(kappa=1.3, r0=0.1)
        spec = tube_surface_metric(params)
        for theta_r, s in [(0.0, 0.0), (0.8, 1.4), (2.5, 3.0)]:
            bundle = curvature_bundle(spec, (theta_r, s))
            expected = surface_r1212(params, s, theta_r)
            assert bundle.riemann_down[0, 1, 0, 1] == pytest.approx(expected, rel=1e-6)

    def test_closed_form_scale_is_exactly_r0(self):
        params = thick(kappa=0.7, r0=0.05)
        assert surface_r1212(params, 1.0, 0.4) == pytest.approx(
            params.r0 * analytic_r1212(params, 1.0, 0.4), rel=1e-15
        )

    def test_gauss_thin_frozen_value(self):
        params = TubeParams(kappa=1.0, tau=0.0, r0=0.1, mode="thin")
        assert analytic_gauss(params, 0.0, 0.0) == pytest.approx(-10.0)

    def test_gauss_zero_at_quarter_turn(self):
        params = TubeParams(kappa=1.0, tau=0.0, r0=0.1, mode="thin")
        assert analytic_gauss(params, 0.0, math.pi / 2) == pytest.approx(0.0, abs=1e-15)

    def test_gauss_thick_formula(self):
        params = thick(kappa=1.0, r0=0.5)
        k = stretch_coefficient(params, 0.5, 0.0, 0.0)
        assert analytic_gauss(params, 0.0, 0.0) == pytest.approx(-1.0 * k * 1.0 / 0.5)

    def test_gauss_zero_radius_rejected(self):
        with pytest.raises(ValueError):
            analytic_gauss(thick(r0=0.0), 0.0, 0.0)

    def test_gauss_negativity_sign_law(self):
        params = TubeParams(kappa=1.0, tau=0.0, r0=0.1, mode="thin")
        for theta in np.linspace(0.0, 2 * math.pi, 17):
            kg = analytic_gauss(params, 0.0, theta)
            assert (kg < 0) == negative_gauss_condition(params, theta)

    def test_negative_gauss_condition_cases(self):
        assert negative_gauss_condition(TubeParams(kappa=1.0, tau=0.0, mode="thin"), 0.0)
        assert not negative_gauss_condition(TubeParams(kappa=1.0, tau=0.0, mode="thin"), math.pi)
        # same-sign clause: negative curvature with cos(theta) < 0
        assert negative_gauss_condition(TubeParams(kappa=-1.0, tau=0.0, mode="thin"), math.pi)

    def test_paper_det_convention_factor_is_k_squared(self):
        # closed-form Gauss (r0^2 normalization) vs true Gauss (det g = r0^2 K^2):
        # the ratio is exactly K^2
        params = thick(kappa=1.0, r0=0.1)
        spec = tube_surface_metric(params)
        for theta_r, s in [(0.4, 0.9), (2.0, 2.5)]:
            kg_true = gauss_curvature_2d(spec, (theta_r, s))
            kg_closed = analytic_gauss(params, s, theta_r)
            k = stretch_coefficient(params, params.r0, theta_r, s)
            assert kg_closed / kg_true == pytest.approx(k * k, rel=1e-6)


class TestFlowExpressions:
    def test_riemann_xyy_zero_velocities(self):
        out = riemann_xyy_tube(FlowField(), thick(tau=1.0), 0.5, 0.0)
        assert np.max(np.abs(out)) == 0.0

    def test_riemann_xyy_sin_zero(self):
        out = riemann_xyy_tube(FlowField(vtheta=2.0, vs=0.0), thick(tau=1.0), 0.0, 0.0)
        assert out[0] == 0.0 and out[1] == 0.0

    def test_riemann_xyy_frozen_value(self):
        out = riemann_xyy_tube(
            FlowField(vtheta=1.0, vs=2.0), thick(kappa=1.0, tau=1.0), math.pi / 2, 0.0
        )
        assert np.allclose(out, [1.0, -1.0, 2.0])

    def test_riemann_xyy_zero_torsion_rejected(self):
        with pytest.raises(SingularityError):
            riemann_xyy_tube(FlowField(vtheta=1.0, vs=1.0), thick(tau=0.0), 0.0, 0.0)

    def test_sectional_zero_at_quarter_turn(self):
        k = analytic_sectional(thick(kappa=1.0), FlowField(vs=2.0), -0.5, math.pi / 2, 0.0)
        assert k == pytest.approx(0.0, abs=1e-16)

    def test_sectional_frozen_value(self):
        k = analytic_sectional(thick(kappa=1.0), FlowField(vs=2.0), -0.5, 0.0, 0.0)
        assert k == pytest.approx(-1.0)

    def test_sectional_odd_in_perturbation(self):
        params = thick(kappa=1.0)
        flow = FlowField(vs=2.0)
        assert analytic_sectional(params, flow, 0.5, 0.3, 0.0) == pytest.approx(
            -analytic_sectional(params, flow, -0.5, 0.3, 0.0)
        )

    def test_sectional_zero_velocity_rejected(self):
        with pytest.raises(SingularityError):
            analytic_sectional(thick(), FlowField(vs=0.0), 1.0, 0.0, 0.0)

    def test_incompressibility_zero_flow(self):
        res = incompressibility_residual(FlowField(vtheta=0.0), thick(tau=0.5), (0.3, 0.2, 1.0))
        assert res == pytest.approx(0.0, abs=1e-12)

    def test_incompressibility_exact_closure_solution(self):
        params = thick(kappa=1.0, tau=0.5)
        r, theta_r, s = 0.3, 0.7, 1.0
        theta = twist_angle(params, theta_r, s)
        c = params.kappa_at(s) * params.tau_at(s) * r * math.sin(theta)
        flow = FlowField(vtheta=lambda u: math.exp(c * u))
        res = incompressibility_residual(flow, params, (r, theta_r, s))
        assert abs(res) < 1e-8

    def test_incompressibility_constant_profile(self):
        # coefficient kappa tau r sin(theta) = 0.3 with vtheta = 1
        params = thick(kappa=1.0, tau=0.6)
        r = 1.0
        theta_r = math.asin(0.5)  # tau * r * sin = 0.6 * 0.5 = 0.3 at s = 0
        res = incompressibility_residual(FlowField(vtheta=1.0), params, (r, theta_r, 0.0))
        assert res == pytest.approx(-0.3, abs=1e-9)


class TestFrenetFrame:
    def test_helix_frame_orthonormal(self):
        for s in (0.0, 0.7, 3.1):
            fr = frenet_frame_helix(1.0, 0.5, s)
            m = fr.matrix
            assert np.max(np.abs(m @ m.T - np.eye(3))) < 1e-12

    def test_circle_frame(self):
        fr = frenet_frame_helix(2.0, 0.0, 0.0)
        assert np.allclose(fr.t_vec, [0.0, 1.0, 0.0], atol=1e-12)
        assert np.allclose(fr.n_vec, [-1.0, 0.0, 0.0], atol=1e-12)
        assert np.allclose(fr.b_vec, [0.0, 0.0, 1.0], atol=1e-12)

    def test_rejects_non_orthonormal(self):
        from tubedynamo import FrenetFrame

        with pytest.raises(ValueError):
            FrenetFrame(t_vec=(1, 0, 0), n_vec=(1, 0, 0), b_vec=(0, 0, 1))


class TestFlowFieldRecord:
    def test_regime_notes(self):
        assert FlowField(vr=0.1, vs=0.0).regime_notes() == (
            "radial-flow-not-compressive",
            "axial-flow-not-dominant",
        )
        assert FlowField(vr=-0.1, vs=2.0, vtheta=0.1).regime_notes() == ()

    def test_profile_velocities(self):
        flow = FlowField(vr=lambda r: -0.1 * r, vtheta=lambda s: math.sin(s))
        assert flow.vr_at(2.0) == pytest.approx(-0.2)
        assert flow.vtheta_at(math.pi / 2) == pytest.approx(1.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            FlowField(vs=math.inf)

    def test_tube_params_validation(self):
        with pytest.raises(ValueError):
            TubeParams(kappa=1.0, tau=0.0, r0=-0.5)
        with pytest.raises(ValueError):
            TubeParams(kappa=1.0, tau=0.0, mode="fat")
