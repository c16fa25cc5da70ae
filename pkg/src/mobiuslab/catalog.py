"""Closed-form test surfaces and curves with analytic derivative suppliers.

Entries are defined symbolically and differentiated with sympy, so every
patch carries exact derivative arrays through third order, and the closed
forms (omega, H, K, Q, h, kappa, c, ...) are evaluated pointwise rather
than by stencils.  Orientation everywhere follows n = F_x x F_y.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import sympy as sp

from .errors import DomainError
from .invariants import SurfacePatch
from .numgrid import ConformalChart

_X, _Y = sp.symbols("x y", real=True)

_DERIV_KEYS = [
    (1, 0), (0, 1),
    (2, 0), (1, 1), (0, 2),
    (3, 0), (2, 1), (1, 2), (0, 3),
]


def _lambdify(expr) -> Callable:
    fn = sp.lambdify((_X, _Y), expr, modules="numpy")

    def evaluate(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        out = np.asarray(fn(X, Y))
        if out.shape != X.shape:
            out = np.broadcast_to(out, X.shape).copy()
        return out

    return evaluate


def _patch_builder(f_exprs) -> Callable[[ConformalChart], SurfacePatch]:
    """Compile symbolic (F1, F2, F3) into a patch factory with derivatives."""
    value_fns = [_lambdify(e) for e in f_exprs]
    deriv_fns = {
        key: [_lambdify(sp.diff(e, _X, key[0], _Y, key[1])) for e in f_exprs]
        for key in _DERIV_KEYS
    }

    def build(chart: ConformalChart, name: str = "") -> SurfacePatch:
        X, Y = chart.mesh()
        values = np.stack([fn(X, Y).astype(float) for fn in value_fns])
        derivs = {
            key: np.stack([fn(X, Y).astype(float) for fn in fns])
            for key, fns in deriv_fns.items()
        }
        return SurfacePatch(chart, values, derivs, name=name)

    return build


@dataclass(frozen=True)
class CatalogEntry:
    """A named surface with chart recommendation, suppliers and flags."""

    name: str
    flags: frozenset[str]
    chart_factory: Callable[[int], ConformalChart]
    patch_factory: Callable[[ConformalChart, str], SurfacePatch]
    closed_forms: dict[str, Callable[[ConformalChart], np.ndarray]]
    notes: str = ""
    approximate: bool = False

    def chart(self, n: int = 128) -> ConformalChart:
        return self.chart_factory(n)

    def patch(self, n: int = 128) -> SurfacePatch:
        if _entries().get(self.name) is self:
            return _cached_patch(self.name, n)
        return self.patch_factory(self.chart_factory(n), self.name)

    def closed(self, name: str, chart: ConformalChart) -> np.ndarray:
        return self.closed_forms[name](chart)

    def has_closed(self, name: str) -> bool:
        return name in self.closed_forms


def _const(value: complex) -> Callable[[ConformalChart], np.ndarray]:
    def evaluate(chart: ConformalChart) -> np.ndarray:
        return np.full(chart.shape, value)

    return evaluate


def _from_expr(expr) -> Callable[[ConformalChart], np.ndarray]:
    fn = _lambdify(expr)

    def evaluate(chart: ConformalChart) -> np.ndarray:
        X, Y = chart.mesh()
        return fn(X, Y)

    return evaluate


# --------------------------------------------------------------------------
# surface entries
# --------------------------------------------------------------------------

def make_cylinder(radius: float = 1.0) -> CatalogEntry:
    """Circular cylinder F = (r cos(y/r), r sin(y/r), x).

    Both coordinate directions are unit-speed, so omega = 0 for every r.
    Closed forms: H = 1/(2r), K = 0, Q = -1/(4r), h = 1/(2r), c = -1/(4r^2).
    """
    if radius <= 0:
        raise DomainError("cylinder radius must be positive")
    r = sp.Float(radius)
    exprs = (r * sp.cos(_Y / r), r * sp.sin(_Y / r), _X)

    def chart_factory(n: int) -> ConformalChart:
        return ConformalChart(
            x_min=0.0, y_min=0.0,
            dx=1.0 / (n - 1), dy=2.0 * math.pi * radius / n,
            nx=n, ny=n, periodic_x=False, periodic_y=True,
        )

    closed = {
        "omega": _const(0.0),
        "H": _const(1.0 / (2.0 * radius)),
        "K": _const(0.0),
        "Q": _const(-1.0 / (4.0 * radius)),
        "h": _const(1.0 / (2.0 * radius)),
        "kappa": _const(-1.0 / (4.0 * radius)),
        "c": _const(-1.0 / (4.0 * radius**2)),
        "mobius_factor": _const(1.0 / (4.0 * radius**2)),
    }
    return CatalogEntry(
        name="cylinder",
        flags=frozenset({"cmc", "isothermic", "bonnet"}),
        chart_factory=chart_factory,
        patch_factory=_patch_builder(exprs),
        closed_forms=closed,
        notes=f"radius={radius}; chart periodic along the profile circle",
    )


def make_round_sphere(radius: float = 1.0) -> CatalogEntry:
    """Round sphere in stereographic conformal parametrization.

    With n = F_x x F_y the normal points toward the center, giving
    H = 1/r, K = 1/r^2, Q = 0 (totally umbilic).
    """
    if radius <= 0:
        raise DomainError("sphere radius must be positive")
    r = sp.Float(radius)
    D = 1 + _X**2 + _Y**2
    exprs = (2 * r * _X / D, 2 * r * _Y / D, r * (_X**2 + _Y**2 - 1) / D)

    def chart_factory(n: int) -> ConformalChart:
        return ConformalChart(
            x_min=-1.0, y_min=-1.0,
            dx=2.0 / (n - 1), dy=2.0 / (n - 1),
            nx=n, ny=n,
        )

    e_omega = 4 * r**2 / D**2
    closed = {
        "omega": _from_expr(sp.log(e_omega)),
        "H": _const(1.0 / radius),
        "K": _const(1.0 / radius**2),
        "Q": _const(0.0),
        "h": _const(0.0),
        "kappa": _const(0.0),
        "mobius_factor": _const(0.0),
    }
    return CatalogEntry(
        name="sphere",
        flags=frozenset({"cmc", "umbilic"}),
        chart_factory=chart_factory,
        patch_factory=_patch_builder(exprs),
        closed_forms=closed,
        notes=f"radius={radius}; normal points toward the center",
    )


def make_enneper() -> CatalogEntry:
    """Enneper minimal surface, standard isothermal chart.

    F = Re(z - z^3/3, i(z + z^3/3), z^2); e^omega = (1+|z|^2)^2, H = 0,
    Q = -1 (constant), kappa = -1/(1+|z|^2) real, so the chart is
    isothermic without any phase rotation.
    """
    z = _X + sp.I * _Y
    exprs = (
        sp.re(z - z**3 / 3),
        sp.re(sp.I * (z + z**3 / 3)),
        sp.re(z**2),
    )

    def chart_factory(n: int) -> ConformalChart:
        return ConformalChart(
            x_min=-1.0, y_min=-1.0,
            dx=2.0 / (n - 1), dy=2.0 / (n - 1),
            nx=n, ny=n,
        )

    zz = 1 + _X**2 + _Y**2
    zbar2 = (_X - sp.I * _Y) ** 2
    closed = {
        "omega": _from_expr(2 * sp.log(zz)),
        "H": _const(0.0),
        "K": _from_expr(-4 / zz**4),
        "Q": _const(-1.0),
        "h": _from_expr(2 / zz**2),
        "kappa": _from_expr(-1 / zz),
        "c": _from_expr(-4 * zbar2 / zz**2),
        "mobius_factor": _from_expr(4 / zz**2),
    }
    return CatalogEntry(
        name="enneper",
        flags=frozenset({"minimal", "isothermic", "willmore"}),
        chart_factory=chart_factory,
        patch_factory=_patch_builder(exprs),
        closed_forms=closed,
        notes="chart [-1,1]^2 avoids large |z|",
    )


def make_logspiral_cylinder(c1: float = 0.3, c2: float = 1.0) -> CatalogEntry:
    """Cylinder over the arclength-parametrized log-spiral with kappa_S = c1.

    The spiral has 1/kappa_E = c2 - c1*sigma; the ruled chart (x along the
    rulings, y = sigma) is flat with omega = 0, H = kappa_E/2, Q = -kappa_E/4,
    and 1/H = 2(c2 - c1 y) = h + conj(h) for the holomorphic h = c2 + i c1 z.
    The Moebius curvature is the constant -4 c1^2.
    """
    if c1 == 0:
        raise DomainError("c1 must be nonzero for a log-spiral")
    if c2 <= 0:
        raise DomainError("c2 must be positive")
    b = -c1
    a = c2 / math.sqrt(1.0 + c1 * c1)
    theta = sp.log(1 - sp.Float(c1) * _Y / sp.Float(c2)) / sp.Float(b)
    rad = sp.Float(a) * sp.exp(sp.Float(b) * theta)
    exprs = (rad * sp.cos(theta), rad * sp.sin(theta), _X)

    sigma_max = 0.6 * c2 / abs(c1)

    def chart_factory(n: int) -> ConformalChart:
        return ConformalChart(
            x_min=0.0, y_min=0.0,
            dx=1.0 / (n - 1), dy=sigma_max / (n - 1),
            nx=n, ny=n,
        )

    kappa_e = 1 / (sp.Float(c2) - sp.Float(c1) * _Y)
    closed = {
        "omega": _const(0.0),
        "H": _from_expr(kappa_e / 2),
        "K": _const(0.0),
        "Q": _from_expr(-kappa_e / 4),
        "h": _from_expr(kappa_e / 2),
        "kappa": _from_expr(-kappa_e / 4),
        "mobius_factor": _from_expr(kappa_e**2 / 4),
        "KM": _const(-4.0 * c1 * c1),
        "inv_H_holomorphic_part": _from_expr(sp.Float(c2) + sp.I * sp.Float(c1) * (_X + sp.I * _Y)),
    }
    return CatalogEntry(
        name="logspiral_cylinder",
        flags=frozenset({"flat", "bonnet", "himc", "isothermic"}),
        chart_factory=chart_factory,
        patch_factory=_patch_builder(exprs),
        closed_forms=closed,
        notes=f"c1={c1}, c2={c2}; chart keeps c2 - c1*sigma > 0",
    )


def make_graph_surface(height: str | sp.Expr, chart_factory=None, name: str = "graph") -> CatalogEntry:
    """Monge patch (x, y, f(x, y)); generally non-conformal.

    Entries built here are marked approximate and should only feed checks
    that do not require conformality (negative controls).
    """
    f = sp.sympify(height, locals={"x": _X, "y": _Y})
    exprs = (_X, _Y, f)

    if chart_factory is None:
        def chart_factory(n: int) -> ConformalChart:
            return ConformalChart(
                x_min=-0.3, y_min=-0.3,
                dx=0.6 / (n - 1), dy=0.6 / (n - 1),
                nx=n, ny=n,
            )

    closed = {}
    if f == 0:
        closed = {
            "omega": _const(0.0), "H": _const(0.0), "K": _const(0.0),
            "Q": _const(0.0), "h": _const(0.0), "kappa": _const(0.0),
            "c": _const(0.0), "mobius_factor": _const(0.0),
        }
    flags = frozenset({"umbilic", "flat", "minimal"}) if f == 0 else frozenset({"approximate"})
    return CatalogEntry(
        name=name,
        flags=flags,
        chart_factory=chart_factory,
        patch_factory=_patch_builder(exprs),
        closed_forms=closed,
        notes=f"height = {f}",
        approximate=(f != 0),
    )


# --------------------------------------------------------------------------
# plane curves
# --------------------------------------------------------------------------

def make_circle(R: float, n: int = 512):
    """Arclength-parametrized circle; kappa_E = 1/R, kappa_S = 0."""
    from .simcurve import PlaneCurveSamples

    if R <= 0:
        raise DomainError("circle radius must be positive")
    sigma = 2.0 * math.pi * R * np.arange(n) / n
    gamma = np.stack([R * np.cos(sigma / R), R * np.sin(sigma / R)], axis=1)
    return PlaneCurveSamples(
        kind="euclidean_arclength",
        spacing=2.0 * math.pi * R / n,
        gamma=gamma,
        closed=True,
    )


def make_logspiral_curve(c1: float, c2: float, n: int = 512, sigma_max: float | None = None):
    """Arclength log-spiral with kappa_E = 1/(c2 - c1 sigma), kappa_S = c1.

    The parameter domain is bounded by sigma < c2/c1 (curvature blowup).
    """
    from .simcurve import PlaneCurveSamples

    if c1 == 0:
        raise DomainError("c1 must be nonzero; use make_circle for c1 = 0")
    if c2 <= 0:
        raise DomainError("c2 must be positive")
    limit = c2 / c1 if c1 > 0 else math.inf
    if sigma_max is None:
        sigma_max = 0.6 * c2 / abs(c1)
    if sigma_max >= limit:
        raise DomainError(f"sigma_max must stay below c2/c1 = {limit}")
    b = -c1
    a = c2 / math.sqrt(1.0 + c1 * c1)
    sigma = np.linspace(0.0, sigma_max, n)
    theta = np.log(1.0 - c1 * sigma / c2) / b
    r = a * np.exp(b * theta)
    gamma = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)
    return PlaneCurveSamples(
        kind="euclidean_arclength",
        spacing=float(sigma[1] - sigma[0]),
        gamma=gamma,
        closed=False,
    )


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _entries() -> dict[str, CatalogEntry]:
    return {
        "cylinder": make_cylinder(1.0),
        "sphere": make_round_sphere(1.0),
        "enneper": make_enneper(),
        "logspiral_cylinder": make_logspiral_cylinder(0.3, 1.0),
        "plane": make_graph_surface(0, name="plane"),
        "saddle": make_graph_surface("x*y", name="saddle"),
    }


def names() -> list[str]:
    return sorted(_entries().keys())


def get(name: str) -> CatalogEntry:
    try:
        return _entries()[name]
    except KeyError:
        raise DomainError(f"unknown catalog entry {name!r}; have {names()}") from None


@functools.lru_cache(maxsize=64)
def _cached_patch(name: str, n: int) -> SurfacePatch:
    entry = _entries()[name]
    return entry.patch_factory(entry.chart_factory(n), name)
