"""Named tolerance table for residual and classification checks.

All residual tolerances are anchored at a 128^2 grid and scale like
tol(n) = tol_128 * (128/n)^2, matching the 2nd-order boundary closures that
dominate coarse-grid error.  Profiles rescale every threshold at once.
"""

from __future__ import annotations

BASE_GRID = 128

PROFILES = {"strict": 0.3, "default": 1.0, "coarse": 10.0}

# residual max-norm tolerances at the base grid
BASE_TOLS = {
    "gauss": 1e-2,
    "codazzi": 1e-2,
    "conformal_gauss": 1e-2,
    "conformal_codazzi": 1e-2,
    "isothermic_form": 1e-2,
    "willmore": 1e-2,
    "constrained_willmore": 1e-2,
    "himc": 1e-2,
    "special_isothermic": 1e-2,
    # deformation-input diagnostics: (log|lambda|^2)_zzbar and q/h holomorphy
    "harmonicity": 1e-6,
    "holomorphy": 1e-6,
}

# boundary-collar width masked per residual on non-periodic charts; one
# extra derivative of an already-stencilled field widens the dirty collar
# by two nodes, so the deeper ladders mask more.
COLLARS = {
    "gauss": 2,
    "codazzi": 2,
    "conformal_gauss": 4,
    "conformal_codazzi": 2,
    "isothermic_form": 4,
    "willmore": 2,
    "constrained_willmore": 2,
    "himc": 2,
    "special_isothermic": 2,
    "harmonicity": 2,
    "holomorphy": 2,
}

# non-residual thresholds (not grid-scaled)
CONFORMALITY_ANALYTIC = 1e-6
CONFORMALITY_FD = 1e-3
LADDER_IDENTITY = 1e-10
HILL_VS_METRICAL = 1e-3
UMBILIC_REL = 1e-8
ISOTHERMIC_IMAG = 1e-8


def tol(name: str, n: int = BASE_GRID, profile: str = "default") -> float:
    """Scaled tolerance for residual `name` at an n x n grid."""
    base = BASE_TOLS[name]
    factor = PROFILES[profile]
    return base * factor * (BASE_GRID / n) ** 2


def collar(name: str) -> int:
    return COLLARS[name]
