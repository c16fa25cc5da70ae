"""Invariant ladder of a sampled conformal immersion.

From a SurfacePatch F: chart -> R^3 this module computes the metrical data
(omega, H, K, Q), the similarity invariants (K/H^2, principal directions),
and the Moebius invariants (h, kappa, c, Moebius metric/curvature/area,
Fubini forms).  Key formulas in a conformal chart:

    e^omega = 2 <F_z, F_zbar>
    Q       = <F_zz, n>
    h       = sqrt(H^2 - K)                (Calapso potential)
    kappa   = Q e^{-omega/2}               (conformal Hopf coefficient)
    c       = omega_zz - (omega_z)^2 / 2 + 2 H Q       (Schwarzian)
    I_M     = 4 |kappa|^2 dz dzbar = h^2 e^omega dz dzbar.

Orientation convention: n = F_x x F_y normalized.  Flipping orientation
negates H and Q and leaves |kappa| unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tolerances
from .errors import (
    ChartMismatchError,
    DomainError,
    InconsistentCurvatureError,
    SingularImmersionError,
)
from .numgrid import (
    ConformalChart,
    ScalarField,
    dx_values,
    dy_values,
    dxx_values,
    dyy_values,
    dz_values,
    dzz_values,
    dzzbar_values,
    make_field,
)

IMMERSION_FLOOR = 1e-10


@dataclass(frozen=True)
class SurfacePatch:
    """Immersion sampled on a chart, optionally with analytic derivatives.

    values has shape (3, ny, nx).  derivs maps (a, b) -> d^a_x d^b_y F with
    the same shape, for 1 <= a + b <= max order supplied.
    """

    chart: ConformalChart
    values: np.ndarray
    derivs: dict[tuple[int, int], np.ndarray] | None = None
    name: str = ""

    def __post_init__(self):
        if self.values.shape != (3, self.chart.ny, self.chart.nx):
            raise DomainError(f"immersion values must have shape (3, ny, nx), got {self.values.shape}")

    def has_derivs_to(self, order: int) -> bool:
        if self.derivs is None:
            return False
        need = [(a, b) for a in range(order + 1) for b in range(order + 1) if 1 <= a + b <= order]
        return all(k in self.derivs for k in need)

    def d(self, a: int, b: int) -> np.ndarray:
        """d^a_x d^b_y F, analytic when supplied, stencils otherwise."""
        if a == 0 and b == 0:
            return self.values
        if self.derivs is not None and (a, b) in self.derivs:
            return self.derivs[(a, b)]
        # stencil fallback, dedicated second-derivative stencils per axis
        if a >= 2:
            return dxx_values(self.d(a - 2, b), self.chart)
        if a == 1:
            return dx_values(self.d(0, b), self.chart)
        if b >= 2:
            return dyy_values(self.d(0, b - 2), self.chart)
        return dy_values(self.values, self.chart)

    def fz(self) -> np.ndarray:
        return 0.5 * (self.d(1, 0) - 1j * self.d(0, 1))

    def fzbar(self) -> np.ndarray:
        return 0.5 * (self.d(1, 0) + 1j * self.d(0, 1))

    def fzz(self) -> np.ndarray:
        return 0.25 * (self.d(2, 0) - self.d(0, 2) - 2j * self.d(1, 1))


@dataclass(frozen=True)
class MetricalData:
    """The triple (omega, H, Q) deformed by the similarity families."""

    omega: ScalarField
    H: ScalarField
    Q: ScalarField
    stamp: object = None

    def __post_init__(self):
        if self.H.chart != self.omega.chart or self.Q.chart != self.omega.chart:
            raise ChartMismatchError("metrical data fields live on different charts")
        if not np.all(np.isfinite(self.omega.values)):
            raise DomainError("omega must be finite everywhere")

    @property
    def chart(self) -> ConformalChart:
        return self.omega.chart


@dataclass(frozen=True)
class ConformalData:
    """The pair (kappa, c), optionally with a quadratic differential q."""

    kappa: ScalarField
    c: ScalarField
    q: ScalarField | None = None
    stamp: object = None

    def __post_init__(self):
        if self.c.chart != self.kappa.chart:
            raise ChartMismatchError("conformal data fields live on different charts")
        if self.q is not None and self.q.chart != self.kappa.chart:
            raise ChartMismatchError("q lives on a different chart")

    @property
    def chart(self) -> ConformalChart:
        return self.kappa.chart


def _dot3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("k...,k...->...", a, b)


def first_fundamental(patch: SurfacePatch) -> tuple[ScalarField, float]:
    """(omega, conformality residual); e^omega = 2<F_z, F_zbar>."""
    fz = patch.fz()
    e_omega = 2.0 * _dot3(fz, np.conj(fz)).real
    if np.min(e_omega) <= IMMERSION_FLOOR:
        j, i = np.unravel_index(int(np.argmin(e_omega)), e_omega.shape)
        raise SingularImmersionError(f"degenerate immersion at node (i={i}, j={j})")
    residual = float(np.max(np.abs(_dot3(fz, fz)) / e_omega))
    omega = make_field(patch.chart, np.log(e_omega), kind="real")
    return omega, residual


def unit_normal(patch: SurfacePatch) -> tuple[ScalarField, ScalarField, ScalarField]:
    """n = F_x x F_y / |F_x x F_y|, one real field per component."""
    n = _normal_values(patch)
    return tuple(make_field(patch.chart, n[k], kind="real") for k in range(3))


def _normal_values(patch: SurfacePatch) -> np.ndarray:
    fx = patch.d(1, 0)
    fy = patch.d(0, 1)
    n = np.cross(fx, fy, axis=0)
    norm = np.sqrt(_dot3(n, n))
    if np.min(norm) <= IMMERSION_FLOOR:
        j, i = np.unravel_index(int(np.argmin(norm)), norm.shape)
        raise SingularImmersionError(f"vanishing normal at node (i={i}, j={j})")
    return n / norm


def second_fundamental(patch: SurfacePatch) -> tuple[ScalarField, ScalarField, ScalarField]:
    """(L, M, N) = (<F_xx, n>, <F_xy, n>, <F_yy, n>)."""
    n = _normal_values(patch)
    L = _dot3(patch.d(2, 0), n)
    M = _dot3(patch.d(1, 1), n)
    N = _dot3(patch.d(0, 2), n)
    mk = lambda v: make_field(patch.chart, v, kind="real")
    return mk(L), mk(M), mk(N)


def mean_and_gauss(patch: SurfacePatch) -> tuple[ScalarField, ScalarField]:
    """H = (L+N)/(2 e^omega), K = (LN - M^2)/e^{2 omega}."""
    omega, _ = first_fundamental(patch)
    L, M, N = second_fundamental(patch)
    e_om = np.exp(omega.real_values)
    H = (L.real_values + N.real_values) / (2.0 * e_om)
    K = (L.real_values * N.real_values - M.real_values**2) / e_om**2
    return make_field(patch.chart, H, kind="real"), make_field(patch.chart, K, kind="real")


def hopf_coefficient(patch: SurfacePatch) -> ScalarField:
    """Q = <F_zz, n> = (L - N - 2iM)/4."""
    n = _normal_values(patch)
    Q = _dot3(patch.fzz(), n)
    return make_field(patch.chart, Q)


def calapso_potential(H: ScalarField, K: ScalarField) -> ScalarField:
    """h = sqrt(max(H^2 - K, 0)); raises if H^2 - K is significantly negative."""
    diff = H.real_values**2 - K.real_values
    s = max(1.0, float(np.max(np.abs(diff))))
    if float(np.min(diff)) < -1e-6 * s:
        raise InconsistentCurvatureError(f"H^2 - K reaches {np.min(diff):.3e}")
    return make_field(H.chart, np.sqrt(np.clip(diff, 0.0, None)), kind="real")


def conformal_hopf(Q: ScalarField, omega: ScalarField) -> ScalarField:
    """kappa = Q e^{-omega/2}."""
    if Q.chart != omega.chart:
        raise ChartMismatchError("Q and omega on different charts")
    return make_field(Q.chart, Q.values * np.exp(-0.5 * omega.real_values))


def schwarzian(omega: ScalarField, H: ScalarField, Q: ScalarField) -> ScalarField:
    """c = omega_zz - (omega_z)^2/2 + 2HQ, stencil-evaluated."""
    chart = omega.chart
    om = omega.values
    om_z = dz_values(om, chart)
    om_zz = dzz_values(om, chart)
    c = om_zz - 0.5 * om_z**2 + 2.0 * H.values * Q.values
    return make_field(chart, c)


def schwarzian_derivative_of_map(f: ScalarField, crit_tol: float = 1e-8):
    """S_z(f) = (f_zz/f_z)_z - (f_zz/f_z)^2 / 2 for holomorphic samples.

    Returns (field, mask); nodes with |f_z| <= crit_tol are masked (NaN).
    """
    chart = f.chart
    fz = dz_values(f.values, chart)
    fzz = dzz_values(f.values, chart)
    good = np.abs(fz) > crit_tol
    ratio = np.where(good, fzz / np.where(good, fz, 1.0), 0.0)
    s = dz_values(ratio, chart) - 0.5 * ratio**2
    s = np.where(good, s, np.nan + 0j)
    return ScalarField(chart, s, "complex"), ~good


def mobius_metric(kappa: ScalarField) -> ScalarField:
    """Conformal factor 4|kappa|^2 of the Moebius metric."""
    return make_field(kappa.chart, 4.0 * np.abs(kappa.values) ** 2, kind="real")


def mobius_metric_metrical(h: ScalarField, omega: ScalarField) -> ScalarField:
    """Same factor by the metrical route h^2 e^omega."""
    if h.chart != omega.chart:
        raise ChartMismatchError("h and omega on different charts")
    vals = h.real_values**2 * np.exp(omega.real_values)
    return make_field(h.chart, vals, kind="real")


def umbilic_mask(mobius_factor: ScalarField) -> np.ndarray:
    """True where the node is masked as umbilic (factor below threshold)."""
    vals = mobius_factor.real_values
    threshold = tolerances.UMBILIC_REL * max(float(np.median(vals)), 1e-12)
    return vals < threshold


def mobius_curvature(mobius_factor: ScalarField) -> tuple[ScalarField, np.ndarray]:
    """K_M = -(2/lam) d_z d_zbar log(lam); umbilic nodes masked (NaN).

    Returns (K_M field with NaN at masked nodes, mask array).
    """
    masked = umbilic_mask(mobius_factor)
    lam = mobius_factor.real_values
    safe = np.where(masked, 1.0, lam)
    km = -2.0 / safe * dzzbar_values(np.log(safe), mobius_factor.chart).real
    km = np.where(masked, np.nan, km).astype(complex)
    return ScalarField(mobius_factor.chart, km, "complex"), masked


def mobius_area(H: ScalarField, K: ScalarField, omega: ScalarField, chart: ConformalChart) -> float:
    """Quadrature of (H^2 - K) e^omega dx dy over the chart.

    Trapezoid weights on non-periodic axes (grids include both endpoints),
    plain sums on periodic axes.
    """
    integrand = (H.real_values**2 - K.real_values) * np.exp(omega.real_values)
    wx = np.ones(chart.nx)
    wy = np.ones(chart.ny)
    if not chart.periodic_x:
        wx[0] = wx[-1] = 0.5
    if not chart.periodic_y:
        wy[0] = wy[-1] = 0.5
    return float(wy @ integrand @ wx) * chart.dx * chart.dy


def fubini_forms(
    h: ScalarField,
    omega: ScalarField,
    L: ScalarField,
    M_coef: ScalarField,
    N: ScalarField,
    H: ScalarField,
):
    """(I_M factor, (xx, xy, yy) components of II_M = h (II - H I))."""
    factor = mobius_metric_metrical(h, omega)
    e_om = np.exp(omega.real_values)
    hv = h.real_values
    xx = hv * (L.real_values - H.real_values * e_om)
    xy = hv * M_coef.real_values
    yy = hv * (N.real_values - H.real_values * e_om)
    mk = lambda v: make_field(omega.chart, v, kind="real")
    return factor, (mk(xx), mk(xy), mk(yy))


def similarity_ratio(H: ScalarField, K: ScalarField, h_tol: float = 1e-8):
    """K/H^2 with minimal-surface nodes masked.  Returns (field, mask)."""
    Hv = H.real_values
    masked = np.abs(Hv) <= h_tol
    ratio = np.where(masked, np.nan, K.real_values / np.where(masked, 1.0, Hv) ** 2)
    return make_field(H.chart, np.where(masked, 0.0, ratio), kind="real"), masked


# --------------------------------------------------------------------------
# bundled ladder
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantLadder:
    """Every invariant the workbench derives from one patch."""

    patch: SurfacePatch
    omega: ScalarField
    conformality_residual: float
    H: ScalarField
    K: ScalarField
    Q: ScalarField
    h: ScalarField
    kappa: ScalarField
    c: ScalarField
    L: ScalarField
    M_coef: ScalarField
    N: ScalarField

    def metrical(self) -> MetricalData:
        return MetricalData(self.omega, self.H, self.Q)

    def conformal(self, q: ScalarField | None = None) -> ConformalData:
        return ConformalData(self.kappa, self.c, q)

    def mobius_factor(self) -> ScalarField:
        return mobius_metric(self.kappa)

    def mobius_area(self) -> float:
        return mobius_area(self.H, self.K, self.omega, self.patch.chart)


def invariant_ladder(patch: SurfacePatch) -> InvariantLadder:
    omega, residual = first_fundamental(patch)
    L, M, N = second_fundamental(patch)
    H, K = mean_and_gauss(patch)
    Q = hopf_coefficient(patch)
    h = calapso_potential(H, K)
    kappa = conformal_hopf(Q, omega)
    c = schwarzian(omega, H, Q)
    return InvariantLadder(patch, omega, residual, H, K, Q, h, kappa, c, L, M, N)


# --------------------------------------------------------------------------
# ambient transformations (similarity and unit-sphere inversion)
# --------------------------------------------------------------------------

def transform_patch_similarity(
    patch: SurfacePatch, s: float, R: np.ndarray, b: np.ndarray
) -> SurfacePatch:
    """Apply x -> s R x + b; derivative suppliers transform linearly."""
    if s <= 0:
        raise DomainError("similarity scale must be positive")
    R = np.asarray(R, dtype=float)
    b = np.asarray(b, dtype=float)
    apply = lambda v: s * np.einsum("ab,b...->a...", R, v)
    values = apply(patch.values) + b.reshape(3, 1, 1)
    derivs = None
    if patch.derivs is not None:
        derivs = {k: apply(v) for k, v in patch.derivs.items()}
    return SurfacePatch(patch.chart, values, derivs, name=f"{patch.name}+similarity")


def invert_patch(patch: SurfacePatch) -> SurfacePatch:
    """Compose with unit-sphere inversion x -> x/|x|^2 (patch must avoid 0).

    Chain-rules analytic derivatives through order 2; third-order suppliers
    are dropped (stencil fallback covers them if ever needed).
    """
    x = patch.values
    r2 = np.einsum("k...,k...->...", x, x)
    if np.min(r2) <= 1e-12:
        raise DomainError("patch passes through the inversion center")
    values = x / r2

    if patch.derivs is None:
        return SurfacePatch(patch.chart, values, None, name=f"{patch.name}+inverted")

    eye = np.eye(3)
    # J[a,b] = d(x_a/r^2)/dx_b ; Hess[a,b,c] = second derivatives of the map
    J = eye.reshape(3, 3, 1, 1) / r2 - 2.0 * np.einsum("a...,b...->ab...", x, x) / r2**2
    Hess = (
        -2.0
        * (
            np.einsum("ab,c...->abc...", eye, x)
            + np.einsum("ac,b...->abc...", eye, x)
            + np.einsum("bc,a...->abc...", eye, x)
        )
        / r2**2
        + 8.0 * np.einsum("a...,b...,c...->abc...", x, x, x) / r2**3
    )

    def push1(v):
        return np.einsum("ab...,b...->a...", J, v)

    def push2(vv, u, w):
        return np.einsum("ab...,b...->a...", J, vv) + np.einsum(
            "abc...,b...,c...->a...", Hess, u, w
        )

    fx, fy = patch.d(1, 0), patch.d(0, 1)
    derivs = {
        (1, 0): push1(fx),
        (0, 1): push1(fy),
        (2, 0): push2(patch.d(2, 0), fx, fx),
        (1, 1): push2(patch.d(1, 1), fx, fy),
        (0, 2): push2(patch.d(0, 2), fy, fy),
    }
    return SurfacePatch(patch.chart, values, derivs, name=f"{patch.name}+inverted")
