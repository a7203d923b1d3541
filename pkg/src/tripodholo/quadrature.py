"""Quadrature over control paths.

Function-backed paths get adaptive quadrature; spline-backed (grid) paths
get composite Simpson on a midpoint-refined copy of their native grid, which
matches the spline's own accuracy.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate

#: Interior breakpoints of the piecewise path families.
_LUNE_BREAKS = (0.25, 0.5, 0.75)


def integrate_path(path, f, rel_tol: float = 1e-10) -> float:
    """Integral of f(s) over [0, 1] along the given path."""
    if path.grid is not None:
        s = _refine(path.grid)
        return float(integrate.simpson(f(s), x=s))
    points = _LUNE_BREAKS if path.name == "lune" else None
    val, _ = integrate.quad(
        lambda s: float(f(np.asarray(s))),
        0.0,
        1.0,
        epsabs=1e-12,
        epsrel=rel_tol,
        limit=400,
        points=points,
    )
    return float(val)


def _refine(grid: np.ndarray) -> np.ndarray:
    """Insert midpoints so Simpson sees an even number of fine intervals."""
    g = np.asarray(grid, dtype=float)
    mids = 0.5 * (g[:-1] + g[1:])
    out = np.empty(g.size + mids.size)
    out[0::2] = g
    out[1::2] = mids
    return out
