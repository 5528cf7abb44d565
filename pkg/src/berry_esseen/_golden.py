"""Golden-section search, vectorized over independent brackets."""

from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class ConvergenceError(RuntimeError):
    """An optimizer ran out of its iteration budget."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def golden_section(func, lo, hi, tol=1e-10, max_iter=300):
    """Minimize ``func`` on each bracket ``[lo_i, hi_i]``.

    ``func`` maps an array of abscissae to an array of values of the same
    shape. Iteration stops once every bracket is narrower than
    ``tol * max(1, |x|)``.

    Returns
    -------
    x, fx : ndarray
        Best abscissa seen per bracket and its value.
    iterations : int
    """
    lo = np.array(lo, dtype=float, ndmin=1)
    hi = np.array(hi, dtype=float, ndmin=1)
    if np.any(hi < lo):
        raise ValueError("golden_section needs lo <= hi")
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc = func(c)
    fd = func(d)
    it = 0
    while np.any(hi - lo > tol * np.maximum(1.0, np.abs(0.5 * (lo + hi)))):
        if it >= max_iter:
            raise ConvergenceError(
                f"golden-section search did not converge in {max_iter} iterations",
                {"iterations": it, "max_width": float(np.max(hi - lo))},
            )
        it += 1
        left = fc < fd
        # left: keep [lo, d] and old c becomes d; else keep [c, hi] and old d becomes c
        lo, hi = np.where(left, lo, c), np.where(left, d, hi)
        probe = np.where(left, hi - INV_PHI * (hi - lo), lo + INV_PHI * (hi - lo))
        fp = func(probe)
        c, d, fc, fd = (
            np.where(left, probe, d),
            np.where(left, c, probe),
            np.where(left, fp, fd),
            np.where(left, fc, fp),
        )
    x = np.where(fc < fd, c, d)
    fx = np.minimum(fc, fd)
    return x, fx, it


def grid_then_golden(func, grid, tol=1e-10, max_iter=300):
    """Global scan on ``grid`` (1-D, sorted) followed by golden refinement in
    the cell pair around the best grid point.

    Returns ``(x, fx, iterations, grid_index)``. The grid minimum is kept if
    refinement does not improve on it.
    """
    grid = np.asarray(grid, dtype=float)
    vals = func(grid)
    i = int(np.nanargmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    x, fx, it = golden_section(func, [lo], [hi], tol=tol, max_iter=max_iter)
    if fx[0] <= vals[i]:
        return float(x[0]), float(fx[0]), it, i
    return float(grid[i]), float(vals[i]), it, i
