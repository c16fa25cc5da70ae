"""Invariant ladder: closed-form cylinders/spheres/Enneper, invariances."""

import math

import numpy as np
import pytest

from mobiuslab import catalog
from mobiuslab.errors import DomainError, SingularImmersionError
from mobiuslab.invariants import (
    SurfacePatch,
    calapso_potential,
    conformal_hopf,
    first_fundamental,
    fubini_forms,
    hopf_coefficient,
    invariant_ladder,
    invert_patch,
    mean_and_gauss,
    mobius_area,
    mobius_curvature,
    mobius_metric,
    mobius_metric_metrical,
    schwarzian,
    schwarzian_derivative_of_map,
    second_fundamental,
    similarity_ratio,
    transform_patch_similarity,
    umbilic_mask,
    unit_normal,
)
from mobiuslab.numgrid import ConformalChart, make_field


@pytest.fixture(scope="module")
def cylinder():
    return invariant_ladder(catalog.get("cylinder").patch(64))


@pytest.fixture(scope="module")
def sphere():
    return invariant_ladder(catalog.get("sphere").patch(64))


@pytest.fixture(scope="module")
def enneper():
    return invariant_ladder(catalog.get("enneper").patch(64))


class TestFirstFundamental:
    def test_cylinder_flat_conformal(self, cylinder):
        assert np.max(np.abs(cylinder.omega.values)) <= 1e-12
        assert cylinder.conformality_residual <= 1e-10

    def test_dilated_plane(self):
        patch = catalog.get("plane").patch(32)
        dilated = transform_patch_similarity(patch, 2.0, np.eye(3), np.zeros(3))
        omega, res = first_fundamental(dilated)
        assert np.max(np.abs(np.exp(omega.real_values) - 4.0)) <= 1e-12
        assert res <= 1e-12

    def test_enneper_conformal_factor(self, enneper):
        chart = enneper.patch.chart
        X, Y = chart.mesh()
        want = (1.0 + X**2 + Y**2) ** 2
        assert np.max(np.abs(np.exp(enneper.omega.real_values) - want)) <= 1e-10

    def test_singular_immersion_detected(self):
        chart = ConformalChart(0, 0, 0.1, 0.1, 8, 8)
        values = np.zeros((3, 8, 8))
        with pytest.raises(SingularImmersionError):
            first_fundamental(SurfacePatch(chart, values))


class TestSecondFundamental:
    def test_cylinder(self, cylinder):
        patch = cylinder.patch
        n1, n2, n3 = unit_normal(patch)
        Y = patch.chart.mesh()[1]
        assert np.max(np.abs(n1.real_values + np.cos(Y))) <= 1e-12
        assert np.max(np.abs(n2.real_values + np.sin(Y))) <= 1e-12
        assert np.max(np.abs(n3.real_values)) <= 1e-12
        L, M, N = second_fundamental(patch)
        assert np.max(np.abs(L.real_values)) <= 1e-12
        assert np.max(np.abs(M.real_values)) <= 1e-12
        assert np.max(np.abs(N.real_values - 1.0)) <= 1e-12

    def test_plane_vanishes(self):
        L, M, N = second_fundamental(catalog.get("plane").patch(16))
        for f in (L, M, N):
            assert np.max(np.abs(f.values)) <= 1e-12

    def test_sphere_umbilic(self, sphere):
        # L/E = N/G and M = 0 for the round sphere
        patch = sphere.patch
        L, M, N = second_fundamental(patch)
        e_om = np.exp(sphere.omega.real_values)
        assert np.max(np.abs(L.real_values / e_om - N.real_values / e_om)) <= 1e-10
        assert np.max(np.abs(M.real_values)) <= 1e-10


class TestCurvatures:
    def test_cylinder(self, cylinder):
        assert np.max(np.abs(cylinder.H.real_values - 0.5)) <= 1e-12
        assert np.max(np.abs(cylinder.K.real_values)) <= 1e-12
        assert np.max(np.abs(cylinder.Q.values + 0.25)) <= 1e-12
        assert np.max(np.abs(cylinder.h.real_values - 0.5)) <= 1e-12
        assert np.max(np.abs(cylinder.kappa.values + 0.25)) <= 1e-12

    def test_sphere(self, sphere):
        assert np.max(np.abs(sphere.H.real_values - 1.0)) <= 1e-10
        assert np.max(np.abs(sphere.K.real_values - 1.0)) <= 1e-10
        assert np.max(np.abs(sphere.Q.values)) <= 1e-10
        assert np.max(np.abs(sphere.kappa.values)) <= 1e-10

    def test_enneper_minimal(self, enneper):
        assert np.max(np.abs(enneper.H.real_values)) <= 1e-8
        assert np.max(np.abs(np.abs(enneper.Q.values) - 1.0)) <= 1e-10

    def test_calapso_consistency(self, cylinder, enneper):
        # h e^{omega/2} = 2 |kappa| e^{omega/2} ... i.e. h^2 e^omega = 4|kappa|^2
        for lad in (cylinder, enneper):
            lhs = lad.h.real_values**2 * np.exp(lad.omega.real_values)
            rhs = 4.0 * np.abs(lad.kappa.values) ** 2
            assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(rhs))


class TestSchwarzian:
    def test_cylinder_constant(self, cylinder):
        mask = cylinder.patch.chart.interior_mask(2)
        assert np.max(np.abs(cylinder.c.values + 0.25)[mask]) <= 1e-10

    def test_plane_zero(self):
        lad = invariant_ladder(catalog.get("plane").patch(16))
        assert np.max(np.abs(lad.c.values)) <= 1e-12

    def test_enneper_closed_form(self, enneper):
        chart = enneper.patch.chart
        want = catalog.get("enneper").closed("c", chart)
        mask = chart.interior_mask(2)
        assert np.max(np.abs(enneper.c.values - want)[mask]) <= 1e-4


class TestSchwarzianDerivativeOfMap:
    def chart(self):
        return ConformalChart(1.0, 0.5, 0.05, 0.05, 32, 32)

    def test_affine_zero(self):
        chart = self.chart()
        f = make_field(chart, (2.0 + 1j) * chart.z() + 3.0)
        s, masked = schwarzian_derivative_of_map(f)
        keep = chart.interior_mask(4) & ~masked
        assert np.max(np.abs(s.values[keep])) <= 1e-9

    def test_inversion_is_moebius(self):
        chart = self.chart()
        f = make_field(chart, 1.0 / chart.z())
        s, masked = schwarzian_derivative_of_map(f)
        keep = chart.interior_mask(4) & ~masked
        assert np.max(np.abs(s.values[keep])) <= 1e-4

    def test_exponential(self):
        chart = self.chart()
        f = make_field(chart, np.exp(chart.z()))
        s, masked = schwarzian_derivative_of_map(f)
        keep = chart.interior_mask(4) & ~masked
        assert np.max(np.abs(s.values[keep] + 0.5)) <= 1e-7


class TestMobiusMetric:
    def test_two_routes_agree(self, cylinder, enneper):
        for lad in (cylinder, enneper):
            a = mobius_metric(lad.kappa).real_values
            b = mobius_metric_metrical(lad.h, lad.omega).real_values
            assert np.max(np.abs(a - b)) <= 1e-10 * max(1.0, np.max(np.abs(a)))

    def test_cylinder_value(self, cylinder):
        assert np.max(np.abs(mobius_metric(cylinder.kappa).real_values - 0.25)) <= 1e-12

    def test_sphere_fully_masked(self, sphere):
        factor = mobius_metric(sphere.kappa)
        assert umbilic_mask(factor).all()

    def test_umbilic_point_detected(self):
        # monkey saddle: isolated planar umbilic at the origin
        entry = catalog.make_graph_surface("x**3 - 3*x*y**2", name="monkey")
        lad = invariant_ladder(entry.patch(33))
        masked = umbilic_mask(mobius_metric(lad.kappa))
        assert masked[16, 16]
        assert not masked.all()


class TestMobiusCurvature:
    def test_constant_factor_flat(self):
        chart = ConformalChart(0, 0, 0.05, 0.05, 32, 32)
        factor = make_field(chart, np.full(chart.shape, 0.25), kind="real")
        km, masked = mobius_curvature(factor)
        assert not masked.any()
        keep = chart.interior_mask(2)
        assert np.max(np.abs(km.values[keep])) <= 1e-10

    def test_round_metric_curvature_one(self):
        chart = ConformalChart(-1, -1, 2 / 63, 2 / 63, 64, 64)
        X, Y = chart.mesh()
        factor = make_field(chart, 4.0 / (1.0 + X**2 + Y**2) ** 2, kind="real")
        km, masked = mobius_curvature(factor)
        keep = chart.interior_mask(2) & ~masked
        assert np.max(np.abs(km.values[keep] - 1.0)) <= 5e-6

    def test_logspiral_cylinder_constant_negative(self):
        lad = invariant_ladder(catalog.get("logspiral_cylinder").patch(128))
        km, masked = mobius_curvature(mobius_metric(lad.kappa))
        keep = lad.patch.chart.interior_mask(4) & ~masked
        vals = km.values.real[keep]
        assert np.max(np.abs(vals + 0.36)) <= 1e-6  # -4 c1^2 with c1 = 0.3


class TestMobiusArea:
    def test_sphere_zero(self, sphere):
        assert abs(sphere.mobius_area()) <= 1e-10

    def test_cylinder_quarter_strip(self, cylinder):
        # (H^2 - K) e^omega = 1/4 over [0,1] x [0, 2pi)
        assert abs(cylinder.mobius_area() - math.pi / 2.0) <= 1e-12

    def test_inversion_invariance(self):
        patch = catalog.get("cylinder").patch(128)
        lad = invariant_ladder(patch)
        lad_inv = invariant_ladder(invert_patch(patch))
        a0, a1 = lad.mobius_area(), lad_inv.mobius_area()
        assert abs(a0 - a1) <= 1e-3 * abs(a0)


class TestFubiniForms:
    def test_cylinder_components(self, cylinder):
        factor, (xx, xy, yy) = fubini_forms(
            cylinder.h, cylinder.omega, cylinder.L, cylinder.M_coef, cylinder.N, cylinder.H
        )
        assert np.max(np.abs(xx.real_values + 0.25)) <= 1e-12
        assert np.max(np.abs(xy.real_values)) <= 1e-12
        assert np.max(np.abs(yy.real_values - 0.25)) <= 1e-12

    def test_trace_free(self, cylinder, enneper):
        for lad in (cylinder, enneper):
            _, (xx, _xy, yy) = fubini_forms(lad.h, lad.omega, lad.L, lad.M_coef, lad.N, lad.H)
            trace = np.exp(-lad.omega.real_values) * (xx.real_values + yy.real_values)
            assert np.max(np.abs(trace)) <= 1e-10

    def test_sphere_vanishes(self, sphere):
        _, comps = fubini_forms(sphere.h, sphere.omega, sphere.L, sphere.M_coef, sphere.N, sphere.H)
        for f in comps:
            assert np.max(np.abs(f.values)) <= 1e-8


class TestSimilarityInvariance:
    def transform(self, patch, s=2.5, angle=0.7):
        R = np.array(
            [
                [math.cos(angle), -math.sin(angle), 0.0],
                [math.sin(angle), math.cos(angle), 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
        return transform_patch_similarity(patch, s, R, np.array([1.0, -2.0, 3.0]))

    def test_ratio_invariant(self, cylinder):
        lad1 = invariant_ladder(self.transform(cylinder.patch))
        r0, m0 = similarity_ratio(cylinder.H, cylinder.K)
        r1, m1 = similarity_ratio(lad1.H, lad1.K)
        assert not m0.any() and not m1.any()
        assert np.max(np.abs(r0.real_values - r1.real_values)) <= 1e-8

    def test_cylinder_ratio_zero_sphere_one(self, cylinder, sphere):
        r, _ = similarity_ratio(cylinder.H, cylinder.K)
        assert np.max(np.abs(r.real_values)) <= 1e-10
        r, _ = similarity_ratio(sphere.H, sphere.K)
        assert np.max(np.abs(r.real_values - 1.0)) <= 1e-9

    def test_mobius_factor_invariant(self, enneper):
        lad1 = invariant_ladder(self.transform(enneper.patch))
        f0 = mobius_metric(enneper.kappa).real_values
        f1 = mobius_metric(lad1.kappa).real_values
        assert np.max(np.abs(f0 - f1)) <= 1e-8

    def test_kappa_invariant_under_dilation(self, cylinder):
        dilated = transform_patch_similarity(cylinder.patch, 3.0, np.eye(3), np.zeros(3))
        lad1 = invariant_ladder(dilated)
        assert np.max(np.abs(lad1.kappa.values - cylinder.kappa.values)) <= 1e-10


class TestMobiusInvariance:
    def test_factor_invariant_under_inversion(self):
        patch = catalog.get("cylinder").patch(128)
        f0 = mobius_metric(invariant_ladder(patch).kappa).real_values
        f1 = mobius_metric(invariant_ladder(invert_patch(patch)).kappa).real_values
        assert np.max(np.abs(f0 - f1)) <= 1e-2
        # with chain-ruled suppliers the agreement is actually pointwise
        assert np.max(np.abs(f0 - f1)) <= 1e-10

    def test_inversion_requires_avoiding_origin(self):
        patch = catalog.get("plane").patch(17)  # odd grid hits the origin exactly
        with pytest.raises(DomainError):
            invert_patch(patch)
