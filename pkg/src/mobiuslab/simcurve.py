"""Similarity geometry of plane curves and their time evolution.

For a locally convex curve (kappa_E > 0) the angle function
s = int kappa_E dsigma is the similarity-invariant parameter, and
kappa_S = (kappa_E)_sigma / kappa_E^2 the similarity curvature: constant
exactly for log-spirals (kappa_S != 0) and circles (kappa_S = 0).

The similarity frame F = (T, N) with T = gamma_s, N = T_s + kappa_S T obeys

    F^{-1} dF/ds = [[-u, -1], [1, -u]],      u = kappa_S,

and under the curve evolution that preserves s the curvature obeys

    u_t = f_sss - 2 u f_ss - (3 u_s - u^2 - 1) f_s - (u_ss - 2 u u_s) f + a u_s,

which for f = -1, a = 0 is the Burgers equation u_t = u_ss - 2 u u_s.
Burgers is integrated by RK4 method-of-lines; u = -phi_s/phi with
phi_t = phi_ss gives exact reference solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline

from .errors import (
    BlowupError,
    DegenerateFrameError,
    DomainError,
    InflectionError,
    StepSizeError,
)

EUCLIDEAN = "euclidean_arclength"
SIMILARITY = "similarity_arclength"

REGULARITY_FLOOR = 1e-8
UNIT_SPEED_TOL = 1e-6
BURGERS_CFL = 0.4


# --------------------------------------------------------------------------
# 1-D stencils, 4th order everywhere (one-sided closures at open ends)
# --------------------------------------------------------------------------

def _d1(a: np.ndarray, h: float, closed: bool) -> np.ndarray:
    if closed:
        return (
            -np.roll(a, -2, 0) + 8.0 * np.roll(a, -1, 0)
            - 8.0 * np.roll(a, 1, 0) + np.roll(a, 2, 0)
        ) / (12.0 * h)
    out = np.empty_like(a)
    out[2:-2] = (-a[4:] + 8.0 * a[3:-1] - 8.0 * a[1:-3] + a[:-4]) / (12.0 * h)
    out[0] = (-25.0 * a[0] + 48.0 * a[1] - 36.0 * a[2] + 16.0 * a[3] - 3.0 * a[4]) / (12.0 * h)
    out[1] = (-3.0 * a[0] - 10.0 * a[1] + 18.0 * a[2] - 6.0 * a[3] + a[4]) / (12.0 * h)
    out[-2] = (3.0 * a[-1] + 10.0 * a[-2] - 18.0 * a[-3] + 6.0 * a[-4] - a[-5]) / (12.0 * h)
    out[-1] = (25.0 * a[-1] - 48.0 * a[-2] + 36.0 * a[-3] - 16.0 * a[-4] + 3.0 * a[-5]) / (12.0 * h)
    return out


def _d2(a: np.ndarray, h: float, closed: bool) -> np.ndarray:
    h2 = h * h
    if closed:
        return (
            -np.roll(a, -2, 0) + 16.0 * np.roll(a, -1, 0) - 30.0 * a
            + 16.0 * np.roll(a, 1, 0) - np.roll(a, 2, 0)
        ) / (12.0 * h2)
    out = np.empty_like(a)
    out[2:-2] = (-a[4:] + 16.0 * a[3:-1] - 30.0 * a[2:-2] + 16.0 * a[1:-3] - a[:-4]) / (12.0 * h2)
    out[0] = (45.0 * a[0] - 154.0 * a[1] + 214.0 * a[2] - 156.0 * a[3] + 61.0 * a[4] - 10.0 * a[5]) / (12.0 * h2)
    out[1] = (10.0 * a[0] - 15.0 * a[1] - 4.0 * a[2] + 14.0 * a[3] - 6.0 * a[4] + a[5]) / (12.0 * h2)
    out[-2] = (10.0 * a[-1] - 15.0 * a[-2] - 4.0 * a[-3] + 14.0 * a[-4] - 6.0 * a[-5] + a[-6]) / (12.0 * h2)
    out[-1] = (45.0 * a[-1] - 154.0 * a[-2] + 214.0 * a[-3] - 156.0 * a[-4] + 61.0 * a[-5] - 10.0 * a[-6]) / (12.0 * h2)
    return out


# --------------------------------------------------------------------------
# curve containers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PlaneCurveSamples:
    """Plane curve on a uniform parameter grid.

    kind is 'euclidean_arclength' (sigma) or 'similarity_arclength' (s);
    gamma has shape (n, 2).
    """

    kind: str
    spacing: float
    gamma: np.ndarray
    closed: bool

    def __post_init__(self):
        if self.kind not in (EUCLIDEAN, SIMILARITY):
            raise DomainError(f"unknown curve parametrization {self.kind!r}")
        if self.gamma.ndim != 2 or self.gamma.shape[1] != 2:
            raise DomainError("gamma must have shape (n, 2)")
        if self.spacing <= 0:
            raise DomainError("spacing must be positive")
        speed = np.linalg.norm(self.velocity(), axis=1)
        if float(np.min(speed)) <= REGULARITY_FLOOR:
            raise DomainError("curve is not regular: |gamma'| vanishes")
        if self.kind == EUCLIDEAN and float(np.max(np.abs(speed - 1.0))) > UNIT_SPEED_TOL:
            raise DomainError("euclidean_arclength curve is not unit speed")

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    def velocity(self) -> np.ndarray:
        return _d1(self.gamma, self.spacing, self.closed)

    def acceleration(self) -> np.ndarray:
        return _d2(self.gamma, self.spacing, self.closed)


@dataclass(frozen=True)
class SimCurvatureState:
    """Similarity-curvature samples on a uniform periodic s grid."""

    u: np.ndarray
    t: float
    s_period: float

    def __post_init__(self):
        if self.u.ndim != 1:
            raise DomainError("u must be a 1-D sample array")
        if self.s_period <= 0:
            raise DomainError("s_period must be positive")
        if not np.all(np.isfinite(self.u)):
            raise DomainError("u must be finite")

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def ds(self) -> float:
        return self.s_period / self.n

    def s_coords(self) -> np.ndarray:
        return self.ds * np.arange(self.n)


@dataclass(frozen=True)
class SimFrame:
    """Similarity frame vectors, one (T, N) pair per node."""

    T: np.ndarray
    N: np.ndarray


# --------------------------------------------------------------------------
# invariants
# --------------------------------------------------------------------------

def euclidean_curvature(curve: PlaneCurveSamples) -> np.ndarray:
    """kappa_E = det(gamma', gamma'') for a unit-speed curve."""
    if curve.kind != EUCLIDEAN:
        raise DomainError("euclidean_curvature requires an arclength-parametrized curve")
    v = curve.velocity()
    a = curve.acceleration()
    return v[:, 0] * a[:, 1] - v[:, 1] * a[:, 0]


def _require_convex(kappa_e: np.ndarray) -> None:
    if float(np.min(kappa_e)) <= 0.0:
        k = int(np.argmin(kappa_e))
        raise InflectionError(f"kappa_E <= 0 at node {k}; angle parameter undefined")


def angle_parameter(curve: PlaneCurveSamples) -> np.ndarray:
    """s = int kappa_E dsigma (cumulative trapezoid, s[0] = 0)."""
    kappa_e = euclidean_curvature(curve)
    _require_convex(kappa_e)
    return cumulative_trapezoid(kappa_e, dx=curve.spacing, initial=0.0)


def similarity_curvature(curve: PlaneCurveSamples) -> np.ndarray:
    """kappa_S samples; works in either parametrization.

    sigma-kind: (kappa_E)_sigma / kappa_E^2.  s-kind: since gamma_s = T and
    T_s = -u T + N with N orthogonal to T, u = -<gamma_ss, gamma_s>/|gamma_s|^2.
    """
    if curve.kind == EUCLIDEAN:
        kappa_e = euclidean_curvature(curve)
        _require_convex(kappa_e)
        return _d1(kappa_e, curve.spacing, curve.closed) / kappa_e**2
    v = curve.velocity()
    a = curve.acceleration()
    speed2 = np.einsum("ij,ij->i", v, v)
    return -np.einsum("ij,ij->i", a, v) / speed2


def sim_frame(curve: PlaneCurveSamples) -> SimFrame:
    """T = gamma_s, N = T_s + kappa_S T on an s-parametrized curve."""
    if curve.kind != SIMILARITY:
        raise DomainError("sim_frame requires a similarity-arclength curve")
    T = curve.velocity()
    u = similarity_curvature(curve)
    N = _d1(T, curve.spacing, curve.closed) + u[:, None] * T
    return SimFrame(T=T, N=N)


def frenet_residual(
    frame: SimFrame, u: np.ndarray, spacing: float, closed: bool = False, collar: int = 6
) -> float:
    """max node-wise mismatch between F^{-1} F_s and [[-u, -1], [1, -u]].

    On open curves the frame itself comes from repeated one-sided stencils,
    so a `collar` of end nodes is excluded from the max (same convention as
    the chart collars).
    """
    T, N = frame.T, frame.N
    det = T[:, 0] * N[:, 1] - T[:, 1] * N[:, 0]
    if float(np.min(np.abs(det))) < 1e-12:
        raise DegenerateFrameError("similarity frame is singular")
    Ts = _d1(T, spacing, closed)
    Ns = _d1(N, spacing, closed)
    # columns of F^{-1} F_s via Cramer's rule
    a11 = (Ts[:, 0] * N[:, 1] - Ts[:, 1] * N[:, 0]) / det
    a21 = (T[:, 0] * Ts[:, 1] - T[:, 1] * Ts[:, 0]) / det
    a12 = (Ns[:, 0] * N[:, 1] - Ns[:, 1] * N[:, 0]) / det
    a22 = (T[:, 0] * Ns[:, 1] - T[:, 1] * Ns[:, 0]) / det
    res = np.stack([a11 + u, a12 + 1.0, a21 - 1.0, a22 + u])
    if not closed and collar > 0:
        res = res[:, collar:-collar]
    return float(np.max(np.abs(res)))


# --------------------------------------------------------------------------
# reconstruction
# --------------------------------------------------------------------------

def reconstruct_curve(
    u: np.ndarray,
    ds: float,
    periodic: bool = True,
    initial_point: tuple[float, float] = (0.0, 0.0),
    initial_frame: tuple[tuple[float, float], tuple[float, float]] = ((1.0, 0.0), (0.0, 1.0)),
) -> PlaneCurveSamples:
    """Integrate the Frenet system F_s = F A(u), gamma_s = T with RK4.

    u holds samples at s = 0, ds, ..., (n-1) ds; a cubic spline (periodic
    when requested) supplies half-step values.  Returns an s-parametrized
    open curve with n+1 samples covering [0, n ds].
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    steps = n if periodic else n - 1
    s_nodes = ds * np.arange(steps + 1)
    if periodic:
        spline = CubicSpline(ds * np.arange(n + 1), np.append(u, u[0]), bc_type="periodic")
    else:
        spline = CubicSpline(ds * np.arange(n), u, bc_type="natural")

    def rhs(state: np.ndarray, uval: float) -> np.ndarray:
        T = state[0:2]
        N = state[2:4]
        dT = -uval * T + N
        dN = -T - uval * N
        return np.concatenate([dT, dN, T])

    state = np.array([*initial_frame[0], *initial_frame[1], *initial_point], dtype=float)
    gamma = np.empty((steps + 1, 2))
    gamma[0] = state[4:6]
    for k in range(steps):
        s0 = s_nodes[k]
        u0 = float(spline(s0))
        um = float(spline(s0 + 0.5 * ds))
        u1 = float(spline(s0 + ds))
        k1 = rhs(state, u0)
        k2 = rhs(state + 0.5 * ds * k1, um)
        k3 = rhs(state + 0.5 * ds * k2, um)
        k4 = rhs(state + ds * k3, u1)
        state = state + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        gamma[k + 1] = state[4:6]
    return PlaneCurveSamples(kind=SIMILARITY, spacing=ds, gamma=gamma, closed=False)


def spiral_center(curve: PlaneCurveSamples) -> np.ndarray:
    """Per-node center estimate gamma + (uT + N)/(1 + u^2).

    Constant along exact log-spirals and circles (the frame contracts
    toward the fixed point of the similarity flow).
    """
    if curve.kind != SIMILARITY:
        raise DomainError("spiral_center requires a similarity-arclength curve")
    frame = sim_frame(curve)
    u = similarity_curvature(curve)
    return curve.gamma + (u[:, None] * frame.T + frame.N) / (1.0 + u**2)[:, None]


# --------------------------------------------------------------------------
# time evolution
# --------------------------------------------------------------------------

def evolution_rhs(state: SimCurvatureState, f, a: float = 0.0) -> np.ndarray:
    """u_t for the s-preserving curve flow with tangential data (f, a)."""
    u = state.u
    ds = state.ds
    u_s = _d1(u, ds, True)
    u_ss = _d2(u, ds, True)
    if np.isscalar(f):
        return -(u_ss - 2.0 * u * u_s) * float(f) + a * u_s
    f = np.asarray(f, dtype=float)
    f_s = _d1(f, ds, True)
    f_ss = _d2(f, ds, True)
    f_sss = _d1(f_ss, ds, True)
    return (
        f_sss
        - 2.0 * u * f_ss
        - (3.0 * u_s - u**2 - 1.0) * f_s
        - (u_ss - 2.0 * u * u_s) * f
        + a * u_s
    )


def _burgers_rhs_raw(u: np.ndarray, ds: float) -> np.ndarray:
    """u_ss - 2 u u_s with the rolls shared between both stencils."""
    up1 = np.roll(u, -1)
    um1 = np.roll(u, 1)
    up2 = np.roll(u, -2)
    um2 = np.roll(u, 2)
    u_s = (-up2 + 8.0 * up1 - 8.0 * um1 + um2) / (12.0 * ds)
    u_ss = (-up2 + 16.0 * up1 - 30.0 * u + 16.0 * um1 - um2) / (12.0 * ds * ds)
    return u_ss - 2.0 * u * u_s


def burgers_rhs(state: SimCurvatureState) -> np.ndarray:
    """u_t = u_ss - 2 u u_s (the flow with f = -1, a = 0)."""
    return evolution_rhs(state, -1.0, 0.0)


def burgers_evolve(state: SimCurvatureState, dt: float, n_steps: int) -> SimCurvatureState:
    """RK4 method-of-lines for the Burgers flow."""
    ds = state.ds
    if dt > BURGERS_CFL * ds * ds:
        raise StepSizeError(f"dt = {dt:.3e} exceeds stability bound {BURGERS_CFL} ds^2 = {BURGERS_CFL * ds * ds:.3e}")
    u = state.u.copy()
    t = state.t
    for _ in range(n_steps):
        k1 = _burgers_rhs_raw(u, ds)
        k2 = _burgers_rhs_raw(u + 0.5 * dt * k1, ds)
        k3 = _burgers_rhs_raw(u + 0.5 * dt * k2, ds)
        k4 = _burgers_rhs_raw(u + dt * k3, ds)
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(u)):
            raise BlowupError(f"non-finite values after t = {t:.6g}")
        t += dt
    return SimCurvatureState(u=u, t=t, s_period=state.s_period)


def stable_step(ds: float, margin: float = 0.9) -> float:
    return margin * BURGERS_CFL * ds * ds


def cole_hopf_state(n: int, t: float, A: float = 2.0, k: float = 1.0, s_period: float = 2.0 * math.pi) -> SimCurvatureState:
    """Exact Burgers solution u = -phi_s/phi with phi = A + e^{-k^2 t} cos(ks).

    phi solves the heat equation, so u solves u_t = u_ss - 2 u u_s exactly;
    A > 1 keeps phi positive.
    """
    if A <= 1.0:
        raise DomainError("need A > 1 so that phi stays positive")
    s = s_period * np.arange(n) / n
    decay = math.exp(-k * k * t)
    phi = A + decay * np.cos(k * s)
    phi_s = -k * decay * np.sin(k * s)
    return SimCurvatureState(u=-phi_s / phi, t=t, s_period=s_period)


@dataclass(frozen=True)
class ConsistencyReport:
    """Geometric self-consistency of a Burgers run."""

    t_end: float
    frenet_residual_initial: float
    frenet_residual_final: float
    mean_initial: float
    mean_final: float
    curvature_roundtrip_initial: float
    curvature_roundtrip_final: float


def geometric_consistency(state: SimCurvatureState, t_end: float, dt: float | None = None) -> ConsistencyReport:
    """Evolve u, reconstruct representative curves at both ends, measure back."""
    if dt is None:
        dt = stable_step(state.ds)
    n_steps = max(1, int(math.ceil(t_end / dt)))
    dt = t_end / n_steps
    final = burgers_evolve(state, dt, n_steps)

    def checks(st: SimCurvatureState) -> tuple[float, float]:
        curve = reconstruct_curve(st.u, st.ds, periodic=True)
        frame = sim_frame(curve)
        u_curve = similarity_curvature(curve)
        res = frenet_residual(frame, u_curve, curve.spacing, closed=False)
        spline = CubicSpline(st.ds * np.arange(st.n + 1), np.append(st.u, st.u[0]), bc_type="periodic")
        expected = spline(curve.spacing * np.arange(curve.n))
        roundtrip = float(np.max(np.abs(u_curve - expected)[4:-4]))
        return res, roundtrip

    res0, round0 = checks(state)
    res1, round1 = checks(final)
    return ConsistencyReport(
        t_end=final.t,
        frenet_residual_initial=res0,
        frenet_residual_final=res1,
        mean_initial=float(np.mean(state.u)),
        mean_final=float(np.mean(final.u)),
        curvature_roundtrip_initial=round0,
        curvature_roundtrip_final=round1,
    )
