"""Deformation families acting on invariant data.

Families operate on (kappa, c, q) or (omega, H, Q) triples and never on the
embedded surface; the preserved quantities are checked as residuals by the
callers.  Implemented maps:

    T-transform            c -> c + r                (kappa real, unchanged)
    constrained Willmore   kappa -> lam kappa, c -> c + (lam^2 - 1) q,
                           q -> lam^2 q,   |lam| = 1
    similarity family      e^omega -> |lam|^2 e^omega, H -> H/|lam|,
                           Q -> lam Q     (|lam| = |holomorphic|)
    Bonnet branch          the above with lam = e^{i theta} constant
    HIMC family            with w = 1 + 2 i h t, h holomorphic, 1/H = h + hbar:
                           e^omega -> e^omega/|w|^4, H -> H |w|^2, Q -> Q / w^2

For the constrained-Willmore family the quadratic differential picks up the
phase twice (q -> lam^2 q); with a single-phase rotation the defect
Re((lambar - 1) qbar kappa) would survive, with lam^2 the equation is
preserved identically.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import tolerances
from .errors import DomainError, PoleOfFamilyError
from .invariants import ConformalData, MetricalData
from .numgrid import ScalarField, dzbar_values, dzzbar_values, make_field
from .residuals import ResidualReport, _reduce, gauss_codazzi

UNIT_MODULUS_TOL = 1e-12


@dataclass(frozen=True)
class DeformationStamp:
    """Provenance record attached to deformed data."""

    family: str
    parameter: object
    parent_checksum: str
    report: ResidualReport | None = None


def _checksum(*arrays: np.ndarray) -> str:
    digest = hashlib.sha256()
    for a in arrays:
        digest.update(np.ascontiguousarray(a).tobytes())
    return digest.hexdigest()[:16]


def _conformal_checksum(cd: ConformalData) -> str:
    arrays = [cd.kappa.values, cd.c.values]
    if cd.q is not None:
        arrays.append(cd.q.values)
    return _checksum(*arrays)


def _metrical_checksum(md: MetricalData) -> str:
    return _checksum(md.omega.values, md.H.values, md.Q.values)


# --------------------------------------------------------------------------
# conformal families
# --------------------------------------------------------------------------

def t_transform(cd: ConformalData, r: float) -> ConformalData:
    """c -> c + r on isothermic data; kappa is untouched."""
    k = cd.kappa.values
    scale_k = max(1.0, float(np.max(np.abs(k))))
    if float(np.max(np.abs(k.imag))) > tolerances.ISOTHERMIC_IMAG * scale_k:
        raise DomainError(
            "t_transform needs isothermic data: only surfaces with a real "
            "conformal Hopf coefficient admit a kappa-preserving family"
        )
    stamp = DeformationStamp("t_transform", float(r), _conformal_checksum(cd))
    c_new = make_field(cd.chart, cd.c.values + float(r))
    return ConformalData(cd.kappa, c_new, cd.q, stamp=stamp)


def constrained_willmore_family(cd: ConformalData, lam: complex) -> ConformalData:
    """kappa -> lam kappa, c -> c + (lam^2 - 1) q, q -> lam^2 q, |lam| = 1."""
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > UNIT_MODULUS_TOL:
        raise DomainError(f"family parameter must be unimodular, got |lam| = {abs(lam)}")
    stamp = DeformationStamp("constrained_willmore", lam, _conformal_checksum(cd))
    kappa_new = make_field(cd.chart, lam * cd.kappa.values)
    if cd.q is None:
        return ConformalData(kappa_new, cd.c, None, stamp=stamp)
    c_new = make_field(cd.chart, cd.c.values + (lam * lam - 1.0) * cd.q.values)
    q_new = make_field(cd.chart, lam * lam * cd.q.values)
    return ConformalData(kappa_new, c_new, q_new, stamp=stamp)


# --------------------------------------------------------------------------
# metrical families
# --------------------------------------------------------------------------

def _lambda_values(md: MetricalData, lam) -> np.ndarray:
    if isinstance(lam, ScalarField):
        if lam.chart != md.chart:
            raise DomainError("lambda field lives on a different chart")
        vals = lam.values
    else:
        vals = np.asarray(lam, dtype=complex)
        if vals.ndim == 0:
            vals = np.full(md.chart.shape, complex(vals))
    if vals.shape != md.chart.shape:
        raise DomainError("lambda must be a scalar or a field on the data chart")
    if float(np.min(np.abs(vals))) <= 0.0:
        raise DomainError("lambda vanishes at a node")
    return vals


def metrical_deform(md: MetricalData, lam) -> MetricalData:
    """e^omega -> |lam|^2 e^omega, H -> H/|lam|, Q -> lam Q.

    The stamp carries the residual of (log|lam|^2)_zzbar, which must vanish
    for the deformed triple to stay integrable (|lam| must be the modulus
    of a holomorphic function).
    """
    vals = _lambda_values(md, lam)
    mod2 = np.abs(vals) ** 2
    harmonic_defect = dzzbar_values(np.log(mod2), md.chart).real
    report = _reduce("harmonicity", harmonic_defect, md.chart)
    stamp = DeformationStamp("metrical_lambda", vals, _metrical_checksum(md), report=report)
    omega_new = make_field(md.chart, md.omega.values + np.log(mod2), kind="real")
    H_new = make_field(md.chart, md.H.values / np.sqrt(mod2), kind="real")
    Q_new = make_field(md.chart, vals * md.Q.values)
    return MetricalData(omega_new, H_new, Q_new, stamp=stamp)


def bonnet_family_check(md: MetricalData, theta: float, profile: str = "default"):
    """Rotate Q by e^{i theta} and report Gauss-Codazzi of the result.

    Gauss is always preserved (|Q| fixed); Codazzi survives iff
    H_z (e^{i theta} - 1) = 0, i.e. the data is CMC.
    """
    lam = complex(np.cos(theta), np.sin(theta))
    deformed = metrical_deform(md, lam)
    reports = gauss_codazzi(deformed, profile=profile)
    return deformed, reports


def gauss_curvature_algebraic(md: MetricalData) -> np.ndarray:
    """K = H^2 - 4 |Q|^2 e^{-2 omega}, the Gauss-equation elimination of K.

    Pointwise-algebraic, so deformation-preservation checks are exact.
    """
    e_om = np.exp(md.omega.real_values)
    return md.H.real_values**2 - 4.0 * np.abs(md.Q.values) ** 2 / e_om**2


def gauss_curvature_intrinsic(md: MetricalData) -> np.ndarray:
    """K = -2 e^{-omega} omega_zzbar (stencil diagnostic, not exact)."""
    om = md.omega.real_values
    return -2.0 * np.exp(-om) * dzzbar_values(om, md.chart).real


def mobius_factor_metrical(md: MetricalData) -> np.ndarray:
    """(H^2 - K) e^omega = 4 |Q|^2 e^{-omega} via the algebraic K."""
    return 4.0 * np.abs(md.Q.values) ** 2 / np.exp(md.omega.real_values)


def himc_family(md: MetricalData, h_field: ScalarField, t: float, pole_tol: float = 1e-8) -> MetricalData:
    """Associated family of a HIMC surface, parameter t, 1/H = h + hbar.

    With w = 1 + 2 i h t:  e^omega -> e^omega / |w|^4, H -> H |w|^2,
    Q -> Q / w^2, so kappa picks up the unimodular factor wbar/w and the
    Moebius factor 4 |Q|^2 e^{-omega} is untouched.
    """
    if h_field.chart != md.chart:
        raise DomainError("h field lives on a different chart")
    h = h_field.values
    w = 1.0 + 2.0j * h * float(t)
    wmod2 = np.abs(w) ** 2
    if float(np.min(wmod2)) <= pole_tol**2:
        j, i = np.unravel_index(int(np.argmin(wmod2)), wmod2.shape)
        raise PoleOfFamilyError(f"1 + 2iht vanishes at node (i={i}, j={j})")
    holo_defect = np.abs(dzbar_values(h, md.chart))
    report = _reduce("holomorphy", holo_defect, md.chart)
    stamp = DeformationStamp("himc", float(t), _metrical_checksum(md), report=report)
    omega_new = make_field(md.chart, md.omega.values - 2.0 * np.log(wmod2), kind="real")
    H_new = make_field(md.chart, md.H.values * wmod2, kind="real")
    Q_new = make_field(md.chart, md.Q.values / (w * w))
    return MetricalData(omega_new, H_new, Q_new, stamp=stamp)


def harmonic_conjugate_half(H: ScalarField) -> ScalarField:
    """Holomorphic h with 1/H = h + hbar on a simply connected chart.

    Re h = 1/(2H) pointwise; Im h is recovered by path integration of the
    Cauchy-Riemann differential along grid lines from the chart origin.
    Convenience for callers without a closed-form h.
    """
    chart = H.chart
    re_h = 0.5 / H.real_values
    if not np.all(np.isfinite(re_h)):
        raise DomainError("H vanishes; 1/(2H) is not a valid potential")
    from .numgrid import dx_values, dy_values
    ux = dx_values(re_h, chart)
    uy = dy_values(re_h, chart)
    # v_y = u_x, v_x = -u_y; integrate v along the first row, then columns
    im_h = np.zeros_like(re_h)
    dx, dy = chart.dx, chart.dy
    row = np.concatenate([[0.0], np.cumsum(0.5 * (-uy[0, 1:] - uy[0, :-1]) * dx)])
    im_h[0, :] = row
    col = 0.5 * (ux[1:, :] + ux[:-1, :]) * dy
    im_h[1:, :] = row[None, :] + np.cumsum(col, axis=0)
    return make_field(chart, re_h + 1j * im_h)
