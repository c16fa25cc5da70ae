"""Minkowski R^5_1 machinery: lightcone lifts and the mean-curvature sphere.

Vectors are numpy arrays whose last axis has length 5, paired by the
Lorentz product <a, b> = -a0 b0 + a1 b1 + ... + a4 b4.  A Euclidean surface
x in R^3 lifts to the future lightcone via the paraboloid section

    phi(x) = ((1 + |x|^2)/2, x1, x2, x3, (1 - |x|^2)/2),

which satisfies <phi, phi> = 0 and phi0 >= 1/2.  The normalized lift
psi = e^{-omega/2} phi has <d psi, d psi> = dz dzbar and obeys the
inhomogeneous Hill equation psi_zz + (c/2) psi = kappa_vec with kappa_vec
normal-bundle valued; |kappa_vec| equals |Q| e^{-omega/2}.

The central sphere congruence is S = H phi + dphi(n); it lies in the de
Sitter quadric <S, S> = 1 and pulls the quadric metric back to
(H^2 - K) I, the Moebius metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularImmersionError, UmbilicFrameError
from .invariants import SurfacePatch, first_fundamental, _normal_values, mean_and_gauss
from .numgrid import (
    ConformalChart,
    dx_values,
    dy_values,
    dzz_values,
    dzzbar_values,
    make_field,
    ScalarField,
)

MINK_SIGNS = np.array([-1.0, 1.0, 1.0, 1.0, 1.0])


def mink_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray | float:
    """Lorentz scalar product over the last axis (complex-bilinear)."""
    a = np.asarray(a)
    b = np.asarray(b)
    out = np.einsum("...k,...k,k->...", a, b, MINK_SIGNS)
    return out if out.ndim else out.item()


@dataclass(frozen=True)
class LiftField:
    """One lightcone vector per node; lift_kind is 'euclidean' or 'normalized'."""

    chart: ConformalChart
    vectors: np.ndarray  # (ny, nx, 5)
    lift_kind: str

    def __post_init__(self):
        if self.vectors.shape != (self.chart.ny, self.chart.nx, 5):
            raise DomainError("lift must have shape (ny, nx, 5)")
        if self.lift_kind not in ("euclidean", "normalized"):
            raise DomainError(f"unknown lift kind {self.lift_kind!r}")
        norms = mink_dot(self.vectors, self.vectors)
        scale2 = max(1.0, float(np.max(np.sum(self.vectors**2, axis=-1))))
        if float(np.max(np.abs(norms))) > 1e-10 * scale2:
            raise DomainError("lift leaves the lightcone")
        if float(np.min(self.vectors[..., 0])) <= 0.0:
            raise DomainError("lift leaves the future lightcone (psi0 <= 0)")


def euclidean_lift(patch: SurfacePatch) -> LiftField:
    """phi = ((1+|x|^2)/2, x, (1-|x|^2)/2) per node."""
    x = patch.values
    r2 = np.einsum("k...,k...->...", x, x)
    vec = np.empty((patch.chart.ny, patch.chart.nx, 5))
    vec[..., 0] = 0.5 * (1.0 + r2)
    vec[..., 1] = x[0]
    vec[..., 2] = x[1]
    vec[..., 3] = x[2]
    vec[..., 4] = 0.5 * (1.0 - r2)
    return LiftField(patch.chart, vec, "euclidean")


def normalized_lift(patch: SurfacePatch, conformality_tol: float = 1e-3) -> LiftField:
    """psi = e^{-omega/2} phi, making <psi_z, psi_zbar> = 1/2.

    The lift metric factor equals the surface conformal factor, so the
    scaling is pointwise; requires the patch to be conformal.
    """
    omega, residual = first_fundamental(patch)
    if residual > conformality_tol:
        raise DomainError(
            f"patch is not conformal enough for a normalized lift (residual {residual:.3e})"
        )
    mu = np.exp(-0.5 * omega.real_values)
    if not np.all(np.isfinite(mu)):
        raise SingularImmersionError("degenerate lift metric")
    phi = euclidean_lift(patch)
    return LiftField(patch.chart, phi.vectors * mu[..., None], "normalized")


@dataclass(frozen=True)
class HillDecomposition:
    """Output of the Hill-equation split psi_zz = -(c/2) psi + kappa_vec."""

    c: ScalarField
    kappa_vec: np.ndarray  # (ny, nx, 5) complex
    kappa_norm: ScalarField
    psi_hat: np.ndarray  # (ny, nx, 5) real


def hill_decomposition(psi: LiftField) -> HillDecomposition:
    """Split psi_zz against the canonical dual lift.

    psi_hat = 2 psi_zzbar + 2 <psi_zzbar, psi_zzbar> psi is the unique null
    vector with <psi_hat, psi> = -1 orthogonal to psi_z and psi_zbar that
    also kills kappa_vec; then c = 2 <psi_zz, psi_hat> and
    kappa_vec = psi_zz + (c/2) psi.
    """
    if psi.lift_kind != "normalized":
        raise DomainError("hill_decomposition requires a normalized lift")
    chart = psi.chart
    comps = np.moveaxis(psi.vectors, -1, 0)  # (5, ny, nx)

    psi_x = dx_values(comps, chart)
    psi_y = dy_values(comps, chart)
    # frame degeneracy: the tangent Gram block is the identity for an exact
    # normalized lift, so a collapsing determinant flags dependent vectors
    gxx = np.einsum("k...,k...,k->...", psi_x, psi_x, MINK_SIGNS)
    gyy = np.einsum("k...,k...,k->...", psi_y, psi_y, MINK_SIGNS)
    gxy = np.einsum("k...,k...,k->...", psi_x, psi_y, MINK_SIGNS)
    if float(np.min(gxx * gyy - gxy**2)) < 1e-8:
        raise UmbilicFrameError("lift frame degenerates (psi, psi_z, psi_zbar dependent)")

    psi_zz = np.moveaxis(dzz_values(comps, chart), 0, -1)
    psi_zzbar = np.moveaxis(dzzbar_values(comps, chart), 0, -1).real

    alpha = mink_dot(psi_zzbar, psi_zzbar)
    psi_hat = 2.0 * psi_zzbar + 2.0 * alpha[..., None] * psi.vectors

    c_vals = 2.0 * mink_dot(psi_zz, psi_hat)
    kappa_vec = psi_zz + 0.5 * c_vals[..., None] * psi.vectors
    norm2 = mink_dot(kappa_vec, np.conj(kappa_vec)).real
    kappa_norm = np.sqrt(np.clip(norm2, 0.0, None))
    return HillDecomposition(
        c=make_field(chart, c_vals),
        kappa_vec=kappa_vec,
        kappa_norm=make_field(chart, kappa_norm, kind="real"),
        psi_hat=psi_hat,
    )


def _dphi_of(x: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Differential of the paraboloid lift applied to an R^3 vector field."""
    xv = np.einsum("k...,k...->...", x, v)
    out = np.empty(x.shape[1:] + (5,))
    out[..., 0] = xv
    out[..., 1] = v[0]
    out[..., 2] = v[1]
    out[..., 3] = v[2]
    out[..., 4] = -xv
    return out


def central_sphere_congruence(patch: SurfacePatch) -> np.ndarray:
    """S = H phi + dphi(n): the mean-curvature sphere, <S, S> = 1."""
    H, _K = mean_and_gauss(patch)
    phi = euclidean_lift(patch).vectors
    n = _normal_values(patch)
    return H.real_values[..., None] * phi + _dphi_of(patch.values, n)


def sphere_mean_curvature_vector(v: np.ndarray, v0: np.ndarray, unit_tol: float = 1e-10) -> np.ndarray:
    """Mean curvature vector of the 2-sphere v (in the v0 conic section).

    H_v = -v0_perp - <v0_perp, v0_perp> v with v0_perp = v0 - <v0, v> v.
    """
    v = np.asarray(v, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if abs(mink_dot(v, v) - 1.0) > unit_tol:
        raise DomainError("v must be a unit spacelike vector, <v, v> = 1")
    v0_perp = v0 - mink_dot(v0, v) * v
    return -v0_perp - mink_dot(v0_perp, v0_perp) * v
