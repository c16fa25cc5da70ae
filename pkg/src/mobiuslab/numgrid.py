"""Discrete complex calculus on rectangular charts.

Fields live on a ConformalChart: node (i, j) carries the complex coordinate
z = (x_min + i*dx) + 1j*(y_min + j*dy).  Values are stored as complex arrays
of shape (ny, nx) indexed [j, i]; real fields are tagged, not stored
separately.

Stencils: 4th-order centered in the interior,
    f'_i  = (-f_{i+2} + 8 f_{i+1} - 8 f_{i-1} + f_{i-2}) / (12 h)
    f''_i = (-f_{i+2} + 16 f_{i+1} - 30 f_i + 16 f_{i-1} - f_{i-2}) / (12 h^2)
with 2nd-order one-sided/centered closures in a 2-node collar at
non-periodic boundaries.  Periodic directions wrap.  Comparisons against
analytic values should exclude the collar on non-periodic charts.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ChartMismatchError, DomainError

REAL_KIND_RTOL = 1e-12


@dataclass(frozen=True)
class ConformalChart:
    """Rectangular grid in the complex coordinate plane."""

    x_min: float
    y_min: float
    dx: float
    dy: float
    nx: int
    ny: int
    periodic_x: bool = False
    periodic_y: bool = False

    def __post_init__(self):
        if self.dx <= 0 or self.dy <= 0:
            raise DomainError(f"spacings must be positive, got dx={self.dx}, dy={self.dy}")
        if self.nx < 8 or self.ny < 8:
            raise DomainError(f"node counts must be >= 8, got nx={self.nx}, ny={self.ny}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def n_nodes(self) -> int:
        return self.nx * self.ny

    def x_coords(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.nx)

    def y_coords(self) -> np.ndarray:
        return self.y_min + self.dy * np.arange(self.ny)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) arrays of shape (ny, nx)."""
        return np.meshgrid(self.x_coords(), self.y_coords())

    def z(self) -> np.ndarray:
        X, Y = self.mesh()
        return X + 1j * Y

    def interior_mask(self, collar: int = 2) -> np.ndarray:
        """Boolean (ny, nx) mask, False inside a collar at non-periodic edges."""
        mask = np.ones(self.shape, dtype=bool)
        if collar > 0:
            if not self.periodic_x:
                mask[:, :collar] = False
                mask[:, -collar:] = False
            if not self.periodic_y:
                mask[:collar, :] = False
                mask[-collar:, :] = False
        return mask


@dataclass(frozen=True)
class ScalarField:
    """Complex samples on a chart; kind is 'real' or 'complex'."""

    chart: ConformalChart
    values: np.ndarray
    kind: str = "complex"

    def __post_init__(self):
        if self.values.shape != self.chart.shape:
            raise DomainError(
                f"values shape {self.values.shape} does not match chart {self.chart.shape}"
            )
        if self.kind not in ("real", "complex"):
            raise DomainError(f"unknown field kind {self.kind!r}")
        if self.kind == "real":
            bound = REAL_KIND_RTOL * max(1.0, float(np.max(np.abs(self.values))))
            worst = float(np.max(np.abs(self.values.imag)))
            if worst > bound:
                raise DomainError(
                    f"real-kind field has imaginary part {worst:.3e} > {bound:.3e}"
                )

    @property
    def real_values(self) -> np.ndarray:
        return self.values.real


def make_field(chart: ConformalChart, values: np.ndarray, kind: str | None = None) -> ScalarField:
    """Wrap an array as a ScalarField; kind=None autodetects real fields."""
    values = np.asarray(values, dtype=complex)
    if kind is None:
        bound = REAL_KIND_RTOL * max(1.0, float(np.max(np.abs(values))))
        kind = "real" if float(np.max(np.abs(values.imag))) <= bound else "complex"
    return ScalarField(chart, values, kind)


def scale(f: ScalarField | np.ndarray) -> float:
    """Tolerance scale max(1, max|f|), the convention used everywhere."""
    v = f.values if isinstance(f, ScalarField) else np.asarray(f)
    return max(1.0, float(np.max(np.abs(v))))


# --------------------------------------------------------------------------
# axis-generic stencils on raw arrays
# --------------------------------------------------------------------------

def diff1(a: np.ndarray, h: float, axis: int, periodic: bool) -> np.ndarray:
    """First derivative along `axis`."""
    if periodic:
        ap2 = np.roll(a, -2, axis=axis)
        ap1 = np.roll(a, -1, axis=axis)
        am1 = np.roll(a, 1, axis=axis)
        am2 = np.roll(a, 2, axis=axis)
        return (-ap2 + 8.0 * ap1 - 8.0 * am1 + am2) / (12.0 * h)
    w = np.moveaxis(a, axis, -1)
    out = np.empty_like(w)
    out[..., 2:-2] = (-w[..., 4:] + 8.0 * w[..., 3:-1] - 8.0 * w[..., 1:-3] + w[..., :-4]) / (12.0 * h)
    out[..., 0] = (-3.0 * w[..., 0] + 4.0 * w[..., 1] - w[..., 2]) / (2.0 * h)
    out[..., 1] = (w[..., 2] - w[..., 0]) / (2.0 * h)
    out[..., -2] = (w[..., -1] - w[..., -3]) / (2.0 * h)
    out[..., -1] = (3.0 * w[..., -1] - 4.0 * w[..., -2] + w[..., -3]) / (2.0 * h)
    return np.moveaxis(out, -1, axis)


def diff2(a: np.ndarray, h: float, axis: int, periodic: bool) -> np.ndarray:
    """Second derivative along `axis`."""
    h2 = h * h
    if periodic:
        ap2 = np.roll(a, -2, axis=axis)
        ap1 = np.roll(a, -1, axis=axis)
        am1 = np.roll(a, 1, axis=axis)
        am2 = np.roll(a, 2, axis=axis)
        return (-ap2 + 16.0 * ap1 - 30.0 * a + 16.0 * am1 - am2) / (12.0 * h2)
    w = np.moveaxis(a, axis, -1)
    out = np.empty_like(w)
    out[..., 2:-2] = (
        -w[..., 4:] + 16.0 * w[..., 3:-1] - 30.0 * w[..., 2:-2] + 16.0 * w[..., 1:-3] - w[..., :-4]
    ) / (12.0 * h2)
    out[..., 0] = (2.0 * w[..., 0] - 5.0 * w[..., 1] + 4.0 * w[..., 2] - w[..., 3]) / h2
    out[..., 1] = (w[..., 0] - 2.0 * w[..., 1] + w[..., 2]) / h2
    out[..., -2] = (w[..., -3] - 2.0 * w[..., -2] + w[..., -1]) / h2
    out[..., -1] = (2.0 * w[..., -1] - 5.0 * w[..., -2] + 4.0 * w[..., -3] - w[..., -4]) / h2
    return np.moveaxis(out, -1, axis)


# axis 1 is x (columns), axis 0 is y (rows)

def dx_values(a: np.ndarray, chart: ConformalChart) -> np.ndarray:
    return diff1(a, chart.dx, -1, chart.periodic_x)


def dy_values(a: np.ndarray, chart: ConformalChart) -> np.ndarray:
    return diff1(a, chart.dy, -2, chart.periodic_y)


def dxx_values(a: np.ndarray, chart: ConformalChart) -> np.ndarray:
    return diff2(a, chart.dx, -1, chart.periodic_x)


def dyy_values(a: np.ndarray, chart: ConformalChart) -> np.ndarray:
    return diff2(a, chart.dy, -2, chart.periodic_y)


def dz_values(a: np.ndarray, chart: ConformalChart) -> np.ndarray:
    return 0.5 * (dx_values(a, chart) - 1j * dy_values(a, chart))


def dzbar_values(a: np.ndarray, chart: ConformalChart) -> np.ndarray:
    return 0.5 * (dx_values(a, chart) + 1j * dy_values(a, chart))


def laplacian_values(a: np.ndarray, chart: ConformalChart) -> np.ndarray:
    return dxx_values(a, chart) + dyy_values(a, chart)


def dzz_values(a: np.ndarray, chart: ConformalChart) -> np.ndarray:
    """d_z^2 = (d_xx - d_yy)/4 - (i/2) d_x d_y, with dedicated 2nd stencils."""
    mixed = dx_values(dy_values(a, chart), chart)
    return 0.25 * (dxx_values(a, chart) - dyy_values(a, chart)) - 0.5j * mixed


def dzbarzbar_values(a: np.ndarray, chart: ConformalChart) -> np.ndarray:
    mixed = dx_values(dy_values(a, chart), chart)
    return 0.25 * (dxx_values(a, chart) - dyy_values(a, chart)) + 0.5j * mixed


def dzzbar_values(a: np.ndarray, chart: ConformalChart) -> np.ndarray:
    """d_z d_zbar = Laplacian / 4."""
    return 0.25 * laplacian_values(a, chart)


# --------------------------------------------------------------------------
# field-level wrappers
# --------------------------------------------------------------------------

def _same_chart(f: ScalarField, g: ScalarField) -> None:
    if f.chart != g.chart:
        raise ChartMismatchError("fields live on different charts")


def _wrap(f: ScalarField, values: np.ndarray, real_op: bool) -> ScalarField:
    kind = f.kind if real_op else "complex"
    if kind == "real":
        values = values.real.astype(complex)
    return ScalarField(f.chart, values, kind)


def d_x(f: ScalarField) -> ScalarField:
    return _wrap(f, dx_values(f.values, f.chart), real_op=True)


def d_y(f: ScalarField) -> ScalarField:
    return _wrap(f, dy_values(f.values, f.chart), real_op=True)


def d_z(f: ScalarField) -> ScalarField:
    return _wrap(f, dz_values(f.values, f.chart), real_op=False)


def d_zbar(f: ScalarField) -> ScalarField:
    return _wrap(f, dzbar_values(f.values, f.chart), real_op=False)


def laplacian(f: ScalarField) -> ScalarField:
    return _wrap(f, laplacian_values(f.values, f.chart), real_op=True)


def d_zz(f: ScalarField) -> ScalarField:
    return _wrap(f, dzz_values(f.values, f.chart), real_op=False)


def d_zbarzbar(f: ScalarField) -> ScalarField:
    return _wrap(f, dzbarzbar_values(f.values, f.chart), real_op=False)


def d_zzbar(f: ScalarField) -> ScalarField:
    return _wrap(f, dzzbar_values(f.values, f.chart), real_op=True)


# --------------------------------------------------------------------------
# CSV dumps (shared by every module's CLI output)
# --------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return f"{v:.17g}"


def dump_field_csv(f: ScalarField, path) -> None:
    """Field dump: header i,j,x,y,re,im; j outer, i inner."""
    xs = f.chart.x_coords()
    ys = f.chart.y_coords()
    with open(path, "w") as fh:
        fh.write("i,j,x,y,re,im\n")
        for j in range(f.chart.ny):
            for i in range(f.chart.nx):
                v = f.values[j, i]
                fh.write(
                    f"{i},{j},{_fmt(xs[i])},{_fmt(ys[j])},{_fmt(v.real)},{_fmt(v.imag)}\n"
                )


def dump_minkvec_csv(chart: ConformalChart, vecs: np.ndarray, path) -> None:
    """Minkowski vector field dump: header i,j,c0,c1,c2,c3,c4."""
    if vecs.shape != (chart.ny, chart.nx, 5):
        raise DomainError(f"expected shape {(chart.ny, chart.nx, 5)}, got {vecs.shape}")
    with open(path, "w") as fh:
        fh.write("i,j,c0,c1,c2,c3,c4\n")
        for j in range(chart.ny):
            for i in range(chart.nx):
                comps = ",".join(_fmt(float(c)) for c in vecs[j, i])
                fh.write(f"{i},{j},{comps}\n")
