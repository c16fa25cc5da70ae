"""Lightcone lifts, Hill decomposition, central sphere congruence."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mobiuslab import catalog
from mobiuslab.errors import DomainError
from mobiuslab.invariants import invariant_ladder
from mobiuslab.lightcone import (
    central_sphere_congruence,
    euclidean_lift,
    hill_decomposition,
    mink_dot,
    normalized_lift,
    sphere_mean_curvature_vector,
)
from mobiuslab.numgrid import dx_values, dy_values


def basis(k):
    e = np.zeros(5)
    e[k] = 1.0
    return e


class TestMinkDot:
    def test_signature(self):
        assert mink_dot(basis(0), basis(0)) == -1.0
        assert mink_dot(basis(1), basis(1)) == 1.0
        assert mink_dot(np.array([1.0, 1, 0, 0, 0]), np.array([1.0, 1, 0, 0, 0])) == 0.0

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-10, 10), min_size=10, max_size=10))
    def test_bilinear_symmetric(self, vals):
        a = np.array(vals[:5])
        b = np.array(vals[5:])
        assert mink_dot(a, b) == pytest.approx(mink_dot(b, a), abs=1e-9)
        assert mink_dot(2.0 * a, b) == pytest.approx(2.0 * mink_dot(a, b), rel=1e-12, abs=1e-9)


class TestEuclideanLift:
    def test_point_values(self):
        patch = catalog.get("plane").patch(17)
        lift = euclidean_lift(patch)
        j, i = 8, 8  # (0, 0, 0)
        assert np.allclose(lift.vectors[j, i], [0.5, 0, 0, 0, 0.5])

    def test_unit_x_point(self):
        # x = (1, 0, 0) -> (1, 1, 0, 0, 0)
        patch = catalog.get("cylinder").patch(16)  # F(0, 0) = (1, 0, 0)
        lift = euclidean_lift(patch)
        assert np.allclose(lift.vectors[0, 0], [1.0, 1.0, 0.0, 0.0, 0.0])

    def test_null_and_future(self):
        for name in ("cylinder", "enneper", "sphere"):
            lift = euclidean_lift(catalog.get(name).patch(32))
            norms = mink_dot(lift.vectors, lift.vectors)
            scale2 = np.max(np.sum(lift.vectors**2, axis=-1))
            assert np.max(np.abs(norms)) <= 1e-12 * max(1.0, scale2)
            assert np.min(lift.vectors[..., 0]) >= 0.5


class TestNormalizedLift:
    def lift_dz(self, lift):
        comps = np.moveaxis(lift.vectors, -1, 0)
        dz = 0.5 * (dx_values(comps, lift.chart) - 1j * dy_values(comps, lift.chart))
        return np.moveaxis(dz, 0, -1)

    def test_plane_identity(self):
        patch = catalog.get("plane").patch(16)
        psi = normalized_lift(patch)
        phi = euclidean_lift(patch)
        assert np.max(np.abs(psi.vectors - phi.vectors)) <= 1e-12

    def test_dilated_plane_half(self):
        from mobiuslab.invariants import transform_patch_similarity

        patch = transform_patch_similarity(catalog.get("plane").patch(16), 2.0, np.eye(3), np.zeros(3))
        psi = normalized_lift(patch)
        phi = euclidean_lift(patch)
        assert np.max(np.abs(psi.vectors - 0.5 * phi.vectors)) <= 1e-12

    @pytest.mark.parametrize("name", ["cylinder", "enneper", "logspiral_cylinder"])
    def test_normalization(self, name):
        patch = catalog.get(name).patch(128)
        psi = normalized_lift(patch)
        dz = self.lift_dz(psi)
        keep = patch.chart.interior_mask(2)
        assert np.max(np.abs(mink_dot(dz, np.conj(dz)) - 0.5)[keep]) <= 1e-4
        assert np.max(np.abs(mink_dot(dz, dz))[keep]) <= 1e-4

    def test_nonconformal_rejected(self):
        with pytest.raises(DomainError):
            normalized_lift(catalog.get("saddle").patch(32))


class TestHillDecomposition:
    def test_sphere_umbilic(self):
        psi = normalized_lift(catalog.get("sphere").patch(64))
        hill = hill_decomposition(psi)
        keep = psi.chart.interior_mask(2)
        assert np.max(hill.kappa_norm.real_values[keep]) <= 1e-4

    def test_cylinder_quarter(self):
        patch = catalog.get("cylinder").patch(128)
        hill = hill_decomposition(normalized_lift(patch))
        keep = patch.chart.interior_mask(2)
        assert np.max(np.abs(hill.kappa_norm.real_values - 0.25)[keep]) <= 1e-4

    @pytest.mark.parametrize("name", ["cylinder", "enneper", "logspiral_cylinder"])
    def test_tangential_components_vanish(self, name):
        patch = catalog.get(name).patch(128)
        psi = normalized_lift(patch)
        hill = hill_decomposition(psi)
        keep = patch.chart.interior_mask(2)
        comps = np.moveaxis(psi.vectors, -1, 0)
        psi_z = np.moveaxis(
            0.5 * (dx_values(comps, psi.chart) - 1j * dy_values(comps, psi.chart)), 0, -1
        )
        assert np.max(np.abs(mink_dot(hill.kappa_vec, psi.vectors))[keep]) <= 1e-4
        assert np.max(np.abs(mink_dot(hill.kappa_vec, psi_z))[keep]) <= 1e-4

    @pytest.mark.parametrize("name", ["cylinder", "enneper"])
    def test_hill_c_matches_metrical_schwarzian(self, name):
        patch = catalog.get(name).patch(128)
        lad = invariant_ladder(patch)
        hill = hill_decomposition(normalized_lift(patch))
        keep = patch.chart.interior_mask(4)
        assert np.max(np.abs(hill.c.values - lad.c.values)[keep]) <= 1e-3

    def test_psi_hat_constraints(self):
        patch = catalog.get("enneper").patch(128)
        psi = normalized_lift(patch)
        hill = hill_decomposition(psi)
        keep = patch.chart.interior_mask(2)
        assert np.max(np.abs(mink_dot(hill.psi_hat, hill.psi_hat))[keep]) <= 1e-4
        assert np.max(np.abs(mink_dot(hill.psi_hat, psi.vectors) + 1.0)[keep]) <= 1e-4


class TestCentralSphere:
    @pytest.mark.parametrize("name", ["cylinder", "enneper", "logspiral_cylinder"])
    def test_de_sitter_membership(self, name):
        patch = catalog.get(name).patch(64)
        S = central_sphere_congruence(patch)
        assert np.max(np.abs(mink_dot(S, S) - 1.0)) <= 1e-8

    def test_incidence_and_tangency(self):
        patch = catalog.get("cylinder").patch(64)
        S = central_sphere_congruence(patch)
        phi = euclidean_lift(patch).vectors
        assert np.max(np.abs(mink_dot(S, phi))) <= 1e-12
        # tangency against the lifted coordinate frame
        from mobiuslab.lightcone import _dphi_of

        dphi_x = _dphi_of(patch.values, patch.d(1, 0))
        dphi_y = _dphi_of(patch.values, patch.d(0, 1))
        assert np.max(np.abs(mink_dot(S, dphi_x))) <= 1e-12
        assert np.max(np.abs(mink_dot(S, dphi_y))) <= 1e-12

    def test_sphere_congruence_constant(self):
        S = central_sphere_congruence(catalog.get("sphere").patch(32))
        drift = np.max(np.abs(S - S[0, 0]))
        assert drift <= 1e-10

    @pytest.mark.parametrize("name,n,tol", [("cylinder", 128, 1e-2), ("enneper", 128, 1e-2)])
    def test_pullback_is_mobius_metric(self, name, n, tol):
        patch = catalog.get(name).patch(n)
        lad = invariant_ladder(patch)
        S = central_sphere_congruence(patch)
        comps = np.moveaxis(S, -1, 0)
        Sx = np.moveaxis(dx_values(comps, patch.chart), 0, -1)
        Sy = np.moveaxis(dy_values(comps, patch.chart), 0, -1)
        want = (lad.H.real_values**2 - lad.K.real_values) * np.exp(lad.omega.real_values)
        keep = patch.chart.interior_mask(2)
        scale = max(float(np.max(np.abs(want[keep]))), 1e-12)
        assert np.max(np.abs(mink_dot(Sx, Sx) - want)[keep]) / scale <= tol
        assert np.max(np.abs(mink_dot(Sy, Sy) - want)[keep]) / scale <= tol
        assert np.max(np.abs(mink_dot(Sx, Sy))[keep]) / scale <= tol

    def test_pullback_improves_under_refinement(self):
        errs = []
        for n in (64, 128):
            patch = catalog.get("enneper").patch(n)
            lad = invariant_ladder(patch)
            S = central_sphere_congruence(patch)
            comps = np.moveaxis(S, -1, 0)
            Sx = np.moveaxis(dx_values(comps, patch.chart), 0, -1)
            want = (lad.H.real_values**2 - lad.K.real_values) * np.exp(lad.omega.real_values)
            keep = patch.chart.interior_mask(2)
            errs.append(np.max(np.abs(mink_dot(Sx, Sx) - want)[keep]))
        assert errs[1] <= errs[0] / 3.0


class TestSphereMeanCurvatureVector:
    def test_parallel_gives_zero(self):
        v = basis(1)
        out = sphere_mean_curvature_vector(v, 3.0 * v)
        assert np.max(np.abs(out)) <= 1e-12

    def test_timelike_section(self):
        # v = e1, v0 = e0: H = -e0 + e1
        out = sphere_mean_curvature_vector(basis(1), basis(0))
        assert np.allclose(out, -basis(0) + basis(1))

    def test_spacelike_section(self):
        # v = e1, v0 = e2: H = -e2 - e1
        out = sphere_mean_curvature_vector(basis(1), basis(2))
        assert np.allclose(out, -basis(2) - basis(1))

    def test_non_unit_rejected(self):
        with pytest.raises(DomainError):
            sphere_mean_curvature_vector(2.0 * basis(1), basis(0))
