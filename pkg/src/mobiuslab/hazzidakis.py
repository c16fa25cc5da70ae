"""Hazzidakis equation for Bonnet surfaces and the flat-case diagnostics.

The mean curvature along the adapted coordinate s obeys the third-order ODE

    [ (H_ss/H_s)_s - H_s ] R(s)^2 = 2 - H^2/H_s,      H_s < 0,

with type coefficient R_A = sin(2s)/2, R_B = sinh(2s)/2 or R_C = s, and the
Hopf modulus is |Q| = 1/R(s)^2.  Solved for the highest derivative:

    H_sss = H_s [ (2 - H^2/H_s)/R^2 + H_s ] + H_ss^2 / H_s.

Along solutions the Moebius curvature is K_M = (log|H_s|)_ss / H_s, and the
constant-K_M family is exactly H = -2/(K_M s) with K_M < 0 (flat surfaces).
Integration is classic fixed-step RK4 with event detection on H_s >= -1e-8,
|R| <= 1e-8 and |H_sss| > 1e12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DomainError, ValidityWindowError

TYPES = ("A", "B", "C")

HS_EVENT = -1e-8
R_EVENT = 1e-8
BLOWUP_EVENT = 1e12


def R_of_type(s, kind: str):
    """Type coefficient R_A = sin(2s)/2, R_B = sinh(2s)/2, R_C = s."""
    s = np.asarray(s, dtype=float)
    if kind == "A":
        out = np.sin(2.0 * s) / 2.0
    elif kind == "B":
        out = np.sinh(2.0 * s) / 2.0
    elif kind == "C":
        out = s
    else:
        raise DomainError(f"unknown Bonnet type {kind!r}; expected one of {TYPES}")
    return out if out.ndim else float(out)


def _R_derivatives(s: np.ndarray, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """(R', R'') for the quadrature of the conformal factor."""
    if kind == "A":
        return np.cos(2.0 * s), -2.0 * np.sin(2.0 * s)
    if kind == "B":
        return np.cosh(2.0 * s), 2.0 * np.sinh(2.0 * s)
    return np.ones_like(s), np.zeros_like(s)


def hazzidakis_rhs(s: float, H: float, H_s: float, H_ss: float, kind: str) -> float:
    """H_sss from the equation; requires H_s < 0 and R(s) != 0."""
    if H_s >= 0.0:
        raise ValidityWindowError(f"H_s = {H_s} >= 0 at s = {s}")
    R = R_of_type(s, kind)
    if abs(R) <= R_EVENT:
        raise ValidityWindowError(f"R({s}) = {R} vanishes")
    return H_s * ((2.0 - H * H / H_s) / (R * R) + H_s) + H_ss * H_ss / H_s


def eq_residual(s, H, H_s, H_ss, H_sss, kind: str):
    """Defect of the equation for given derivative samples (vectorized)."""
    s = np.asarray(s, dtype=float)
    R = R_of_type(s, kind)
    lhs = (H_sss / H_s - (H_ss / H_s) ** 2 - H_s) * R * R
    return lhs - (2.0 - H * H / H_s)


@dataclass(frozen=True)
class HazzidakisSolution:
    """Fixed-step solution samples, truncated at the first event."""

    kind: str
    s: np.ndarray
    H: np.ndarray
    H_s: np.ndarray
    H_ss: np.ndarray
    stop_reason: str | None = None

    @property
    def n(self) -> int:
        return self.s.shape[0]

    def H_sss(self) -> np.ndarray:
        R = R_of_type(self.s, self.kind)
        return self.H_s * ((2.0 - self.H**2 / self.H_s) / (R * R) + self.H_s) + self.H_ss**2 / self.H_s


def _rk4_step(s: float, y: np.ndarray, h: float, kind: str) -> np.ndarray:
    def f(si: float, yi: np.ndarray) -> np.ndarray:
        return np.array([yi[1], yi[2], hazzidakis_rhs(si, yi[0], yi[1], yi[2], kind)])

    k1 = f(s, y)
    k2 = f(s + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(s + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(s + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    kind: str,
    s0: float,
    H0: float,
    H_s0: float,
    H_ss0: float,
    s_end: float,
    step: float,
) -> HazzidakisSolution:
    """Classic RK4 with fixed step and event truncation."""
    if kind not in TYPES:
        raise DomainError(f"unknown Bonnet type {kind!r}")
    if step <= 0:
        raise DomainError("step must be positive")
    h = step if s_end >= s0 else -step
    n_steps = int(round(abs(s_end - s0) / step))
    if n_steps < 1:
        raise DomainError("empty integration window")
    # immediate validity
    hazzidakis_rhs(s0, H0, H_s0, H_ss0, kind)

    s_list = [s0]
    y_list = [np.array([H0, H_s0, H_ss0], dtype=float)]
    stop_reason = None
    s, y = s0, y_list[0]
    for k in range(n_steps):
        try:
            y_next = _rk4_step(s, y, h, kind)
        except ValidityWindowError as exc:
            stop_reason = str(exc)
            break
        s_next = s0 + (k + 1) * h
        if y_next[1] >= HS_EVENT:
            stop_reason = f"H_s reached {y_next[1]:.3e} at s = {s_next:.6g}"
            break
        if abs(R_of_type(s_next, kind)) <= R_EVENT:
            stop_reason = f"R vanished at s = {s_next:.6g}"
            break
        try:
            if abs(hazzidakis_rhs(s_next, *y_next, kind)) > BLOWUP_EVENT:
                stop_reason = f"H_sss exceeded {BLOWUP_EVENT:.0e} at s = {s_next:.6g}"
                break
        except ValidityWindowError as exc:
            stop_reason = str(exc)
            break
        s, y = s_next, y_next
        s_list.append(s)
        y_list.append(y)
    ys = np.array(y_list)
    return HazzidakisSolution(
        kind=kind,
        s=np.array(s_list),
        H=ys[:, 0],
        H_s=ys[:, 1],
        H_ss=ys[:, 2],
        stop_reason=stop_reason,
    )


def mobius_curvature_along(sol: HazzidakisSolution) -> np.ndarray:
    """K_M = (log|H_s|)_ss / H_s = (H_sss/H_s - (H_ss/H_s)^2) / H_s."""
    H_sss = sol.H_sss()
    return (H_sss / sol.H_s - (sol.H_ss / sol.H_s) ** 2) / sol.H_s


def flat_bonnet_solution(K_M: float, s) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """H = -2/(K_M s) and derivatives; the constant-Moebius-curvature family."""
    if K_M >= 0:
        raise DomainError(f"flat Bonnet solutions need K_M < 0, got {K_M}")
    s = np.asarray(s, dtype=float)
    if np.any(s == 0.0):
        raise DomainError("s = 0 is outside the validity window")
    a = -2.0 / K_M
    H = a / s
    H_s = -a / s**2
    H_ss = 2.0 * a / s**3
    if s.ndim == 0:
        return float(H), float(H_s), float(H_ss)
    return H, H_s, H_ss


def hopf_modulus_along(sol: HazzidakisSolution) -> np.ndarray:
    """|Q(s)| = 1/R(s)^2."""
    R = R_of_type(sol.s, sol.kind)
    return 1.0 / (R * R)


def ratio_diagnostic(sol: HazzidakisSolution, e_omega0: float = 1.0):
    """K/H^2 reconstructed from (H, H_s, |Q|).  Returns (ratio, valid mask).

    Q is taken real (Q = -1/R^2) on the line, so the Codazzi relation
    Q_s = H_s e^omega / 2 pins the log-derivative of the conformal factor:

        omega_s = Q_ss/Q_s - H_ss/H_s = R''/R' - 3 R'/R - H_ss/H_s,

    integrated from e^omega(s0) = e_omega0 (one quadrature; the default 1
    is the flat-consistent value for the canonical window s0 = 1, K_M = -1).
    Then K = H^2 - 4 |Q|^2 e^{-2 omega}; its sign and size depend on the
    initial factor but the constancy of K/H^2 along exact solutions does
    not.  Nodes with R' ~ 0 are masked.
    """
    if e_omega0 <= 0:
        raise DomainError("initial conformal factor must be positive")
    s = sol.s
    R = R_of_type(s, sol.kind)
    Rp, Rpp = _R_derivatives(s, sol.kind)
    valid = np.abs(Rp) > 1e-8
    Rp_safe = np.where(valid, Rp, 1.0)
    omega_s = Rpp / Rp_safe - 3.0 * Rp / R - sol.H_ss / sol.H_s
    omega = math.log(e_omega0) + cumulative_trapezoid(omega_s, sol.s, initial=0.0)
    absQ = 1.0 / (R * R)
    K = sol.H**2 - 4.0 * absQ**2 * np.exp(-2.0 * omega)
    ratio = K / sol.H**2
    return np.where(valid, ratio, np.nan), valid


def flat_consistent_factor(sol: HazzidakisSolution) -> float:
    """Initial e^omega making K vanish at s0 if the solution is flat:
    e^omega(s0) = 2 |Q(s0)| / |H(s0)|."""
    absQ0 = float(hopf_modulus_along(sol)[0])
    return 2.0 * absQ0 / abs(float(sol.H[0]))


def fit_inverse_linear(sol: HazzidakisSolution) -> tuple[float, float]:
    """Best a for H = a/s; returns (a, max relative defect)."""
    inv_s = 1.0 / sol.s
    a = float(np.dot(sol.H, inv_s) / np.dot(inv_s, inv_s))
    defect = float(np.max(np.abs(sol.H - a * inv_s)) / np.max(np.abs(sol.H)))
    return a, defect


def flat_verdict(sol: HazzidakisSolution, km_tol: float = 1e-4, fit_tol: float = 1e-4) -> bool:
    """True iff K_M is constant and H matches the flat family a/s."""
    km = mobius_curvature_along(sol)
    km_const = float(np.std(km)) <= km_tol * max(1.0, abs(float(np.mean(km))))
    _a, defect = fit_inverse_linear(sol)
    return km_const and defect <= fit_tol
