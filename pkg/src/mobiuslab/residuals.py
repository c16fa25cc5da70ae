"""Structural equations evaluated as pointwise residual fields.

Every report reduces a residual field over the unmasked nodes to
(max_abs, l2) and compares max_abs against a named tolerance from the
tolerance table.  Masks combine a boundary collar on non-periodic charts
(wider for residuals that differentiate already-stencilled fields) with
operation-specific masks (umbilic, zero mean curvature).

Equations covered, in the conventions of the invariants module:

    Gauss               omega_zzbar + H^2 e^omega / 2 - 2 |Q|^2 e^{-omega} = 0
    Codazzi             Q_zbar - H_z e^omega / 2 = 0
    conformal Gauss     c_zbar / 2 - (3 kappabar_z kappa + kappabar kappa_z) = 0
    conformal Codazzi   Im(kappa_zbarzbar + cbar kappa / 2) = 0
    isothermic form     c_zbar = 4 (kappa^2)_z   (kappa real)
    Willmore            kappa_zbarzbar + cbar kappa / 2 = 0
    constrained W.      kappa_zbarzbar + cbar kappa / 2 = Re(qbar kappa)
    HIMC                H_zzbar - 2 |H_z|^2 / H = 0   (i.e. 1/H harmonic)
    special isothermic  4 e^omega |grad H|^2 + m^2 + 2Am + 2BH + 2Cl + D = 0
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import tolerances
from .errors import ChartMismatchError, DomainError
from .invariants import ConformalData, MetricalData
from .numgrid import (
    ScalarField,
    dx_values,
    dy_values,
    dz_values,
    dzbar_values,
    dzbarzbar_values,
    dzzbar_values,
)


@dataclass(frozen=True)
class ResidualReport:
    """Reduction of a residual field over its unmasked nodes."""

    name: str
    max_abs: float
    l2: float
    mask_fraction: float
    tolerance: float
    passed: bool
    n_unmasked: int
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "max_abs": self.max_abs,
            "l2": self.l2,
            "mask_fraction": self.mask_fraction,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "n_unmasked": self.n_unmasked,
            **({"extra": self.extra} if self.extra else {}),
        }


def _reduce(
    name: str,
    values: np.ndarray,
    chart,
    profile: str = "default",
    extra_mask: np.ndarray | None = None,
    extra: dict | None = None,
    collar: int | None = None,
) -> ResidualReport:
    keep = chart.interior_mask(tolerances.collar(name) if collar is None else collar)
    if extra_mask is not None:
        keep = keep & ~extra_mask
    kept = np.abs(values[keep])
    n_kept = int(kept.size)
    max_abs = float(np.max(kept)) if n_kept else 0.0
    l2 = float(np.sqrt(np.sum(kept**2))) if n_kept else 0.0
    tol = tolerances.tol(name, n=min(chart.nx, chart.ny), profile=profile)
    return ResidualReport(
        name=name,
        max_abs=max_abs,
        l2=l2,
        mask_fraction=1.0 - n_kept / chart.n_nodes,
        tolerance=tol,
        passed=max_abs <= tol,
        n_unmasked=n_kept,
        extra=extra or {},
    )


# --------------------------------------------------------------------------
# metrical ladder
# --------------------------------------------------------------------------

def gauss_codazzi(md: MetricalData, profile: str = "default") -> tuple[ResidualReport, ResidualReport]:
    chart = md.chart
    om = md.omega.real_values
    e_om = np.exp(om)
    Hv = md.H.values
    Qv = md.Q.values
    gauss = dzzbar_values(om, chart).real + 0.5 * (Hv.real**2) * e_om - 2.0 * np.abs(Qv) ** 2 / e_om
    codazzi = dzbar_values(Qv, chart) - 0.5 * dz_values(Hv, chart) * e_om
    return (
        _reduce("gauss", gauss, chart, profile),
        _reduce("codazzi", codazzi, chart, profile),
    )


# --------------------------------------------------------------------------
# conformal ladder
# --------------------------------------------------------------------------

def conformal_gauss_codazzi(cd: ConformalData, profile: str = "default") -> tuple[ResidualReport, ResidualReport]:
    chart = cd.chart
    k = cd.kappa.values
    c = cd.c.values
    kbar_z = dz_values(np.conj(k), chart)
    k_z = dz_values(k, chart)
    gauss = 0.5 * dzbar_values(c, chart) - (3.0 * kbar_z * k + np.conj(k) * k_z)
    codazzi = (dzbarzbar_values(k, chart) + 0.5 * np.conj(c) * k).imag
    return (
        _reduce("conformal_gauss", gauss, chart, profile),
        _reduce("conformal_codazzi", codazzi, chart, profile),
    )


def isothermic_form_residual(cd: ConformalData, profile: str = "default") -> ResidualReport:
    """c_zbar - 4 (kappa^2)_z, plus the max |Im kappa| non-isothermic signal."""
    chart = cd.chart
    k = cd.kappa.values
    imag_defect = float(np.max(np.abs(k.imag)))
    res = dzbar_values(cd.c.values, chart) - 4.0 * dz_values(k * k, chart)
    report = _reduce(
        "isothermic_form", res, chart, profile,
        extra={"max_imag_kappa": imag_defect},
    )
    scale_k = max(1.0, float(np.max(np.abs(k))))
    if imag_defect > tolerances.ISOTHERMIC_IMAG * scale_k:
        report = replace(report, passed=False)
    return report


def willmore_field(cd: ConformalData) -> np.ndarray:
    """The complex Willmore operator kappa_zbarzbar + cbar kappa / 2."""
    return dzbarzbar_values(cd.kappa.values, cd.chart) + 0.5 * np.conj(cd.c.values) * cd.kappa.values


def willmore_residual(cd: ConformalData, profile: str = "default") -> ResidualReport:
    return _reduce("willmore", willmore_field(cd), cd.chart, profile)


def constrained_willmore_residual(cd: ConformalData, profile: str = "default") -> ResidualReport:
    """Residual of the constrained equation; q = None counts as q = 0."""
    chart = cd.chart
    w = willmore_field(cd)
    extra = {}
    if cd.q is not None:
        qv = cd.q.values
        w = w - (np.conj(qv) * cd.kappa.values).real
        extra["max_q_antiholomorphy"] = float(np.max(np.abs(dzbar_values(qv, chart))))
    return _reduce("constrained_willmore", w, chart, profile, extra=extra)


def fit_constant_q(cd: ConformalData) -> complex:
    """Least-squares constant q minimizing |willmore_field - Re(qbar kappa)|."""
    w = willmore_field(cd).real.ravel()
    k = cd.kappa.values.ravel()
    design = np.stack([k.real, k.imag], axis=1)
    sol, *_ = np.linalg.lstsq(design, w, rcond=None)
    return complex(sol[0], sol[1])


# --------------------------------------------------------------------------
# similarity ladder
# --------------------------------------------------------------------------

def himc_residual(H: ScalarField, profile: str = "default", h_floor: float = 1e-8) -> ResidualReport:
    """H_zzbar - 2|H_z|^2/H; also reports max |(1/H)_zzbar| where defined."""
    chart = H.chart
    Hv = H.real_values
    masked = np.abs(Hv) <= h_floor
    safe = np.where(masked, 1.0, Hv)
    Hz = dz_values(Hv, chart)
    res = dzzbar_values(Hv, chart) - 2.0 * np.abs(Hz) ** 2 / safe
    res = np.where(masked, 0.0, res)
    inv_lap = np.abs(dzzbar_values(1.0 / safe, chart))
    keep = chart.interior_mask(tolerances.collar("himc")) & ~masked
    extra = {"max_inv_H_laplacian": float(np.max(inv_lap[keep])) if keep.any() else 0.0}
    return _reduce("himc", res, chart, profile, extra_mask=masked, extra=extra)


def _special_terms(md: MetricalData) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(grad term, m, H, l) of the special-isothermic equation.

    l = 2 e^omega sqrt(H^2 - K) = 4|Q| via the Gauss identity; the gradient
    term 4 e^omega |grad H|^2 uses the metric gradient, so it reduces to
    4 (H_x^2 + H_y^2).
    """
    chart = md.chart
    Hv = md.H.real_values
    Hx = dx_values(Hv, chart)
    Hy = dy_values(Hv, chart)
    grad_term = 4.0 * (Hx**2 + Hy**2)
    ell = 4.0 * np.abs(md.Q.values)
    m = -Hv * ell
    return grad_term, m, Hv, ell


def special_isothermic_residual(
    md: MetricalData, A: float, B: float, C: float, D: float, profile: str = "default"
) -> ResidualReport:
    grad_term, m, Hv, ell = _special_terms(md)
    res = grad_term + m**2 + 2.0 * A * m + 2.0 * B * Hv + 2.0 * C * ell + D
    return _reduce("special_isothermic", res, md.chart, profile,
                   extra={"A": A, "B": B, "C": C, "D": D})


def fit_special_isothermic(md: MetricalData, profile: str = "default"):
    """Least-squares (A, B, C, D); returns (A, B, C, D, report, cond)."""
    grad_term, m, Hv, ell = _special_terms(md)
    keep = md.chart.interior_mask(tolerances.collar("special_isothermic"))
    design = np.stack([m[keep], Hv[keep], ell[keep], np.ones(int(keep.sum()))], axis=1)
    target = -(grad_term[keep] + m[keep] ** 2)
    sol, _res, rank, svals = np.linalg.lstsq(design, target, rcond=None)
    cond = float(svals[0] / svals[-1]) if svals[-1] > 0 else np.inf
    A, B, C = sol[0] / 2.0, sol[1] / 2.0, sol[2] / 2.0
    D = sol[3]
    report = special_isothermic_residual(md, A, B, C, D, profile)
    report = replace(report, extra={**report.extra, "cond": cond, "rank": int(rank)})
    return A, B, C, D, report, cond


# --------------------------------------------------------------------------
# classification verdicts
# --------------------------------------------------------------------------

def classification_verdict(report: ResidualReport, report_coarse: ResidualReport | None = None) -> str:
    """pass / fail / insufficient-resolution.

    A failing residual that is still dropping at better than 2.5x per
    refinement (against a half-resolution run) is resolution-limited, not
    structurally nonzero.
    """
    if report.passed:
        return "pass"
    if report_coarse is not None and report.max_abs > 0:
        rate = report_coarse.max_abs / report.max_abs
        if rate >= 2.5 and report.max_abs <= 3.0 * report.tolerance:
            return "insufficient-resolution"
    return "fail"
