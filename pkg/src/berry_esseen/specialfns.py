"""Scalar special functions: Gaussian densities, the Mills ratio and its
infimum transform, the derivative-mass constants ``c_r`` and Gaussian radial
moments.

Every routine here is pure. Vectorized entry points accept numpy arrays and
return arrays of the broadcast shape; scalar input gives a Python float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import hermite_e
from scipy import integrate, special

SQRT_2PI = math.sqrt(2.0 * math.pi)
LOG_2 = math.log(2.0)
R0 = math.sqrt(math.pi / 2.0)  # Mills ratio at zero

_SERIES_MAX_TERMS = 20000
_CF_MAX_ITER = 20000
_GAMMA_EPS = 4e-16
_SERIES_CHUNK = 32


@dataclass(frozen=True)
class Quadrature:
    """Tolerances handed to adaptive quadrature (``scipy.integrate.quad``)."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def quad(self, func, a, b, **kwargs):
        return integrate.quad(
            func, a, b, epsabs=self.abs_tol, epsrel=self.rel_tol,
            limit=self.max_subdivisions, **kwargs,
        )


@dataclass(frozen=True)
class MillsEval:
    """Mills ratio ``R(x)`` together with ``R'(x) = x R(x) - 1``."""

    x: float
    value: float
    derivative: float


def _scalar_or_array(out):
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def gaussian_density(x, d=None):
    """Standard ``d``-variate Gaussian density at ``x``.

    A scalar ``x`` is read as the Euclidean norm of the point; an array is
    read as a point (or a stack of points along the last axis). ``d``
    defaults to the length of the point, or 1 for a scalar.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        sq = x * x
        dim = 1 if d is None else d
    else:
        sq = np.sum(x * x, axis=-1)
        dim = x.shape[-1] if d is None else d
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    return _scalar_or_array(np.exp(-0.5 * sq - 0.5 * dim * math.log(2 * math.pi)))


def phi(x):
    """Univariate standard normal density, elementwise."""
    x = np.asarray(x, dtype=float)
    return _scalar_or_array(np.exp(-0.5 * x * x) / SQRT_2PI)


def mills(x):
    """Mills ratio ``e^{x^2/2} int_x^inf e^{-z^2/2} dz``, vectorized.

    Evaluated as ``sqrt(pi/2) erfcx(x/sqrt 2)`` so that large ``x`` neither
    overflows nor cancels.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("Mills ratio is only provided for x >= 0")
    return _scalar_or_array(R0 * special.erfcx(x / math.sqrt(2.0)))


def mills_ratio(x: float) -> MillsEval:
    value = mills(float(x))
    return MillsEval(x=float(x), value=value, derivative=x * value - 1.0)


def _mills_slope(x):
    # R'(x) = x R(x) - 1, strictly increasing from -1 to 0
    return x * mills(x) - 1.0


def inf_mills_argmin(y):
    """Minimizer ``x >= 0`` of ``x*y + R(x)``, by bisection on ``R'(x) = -y``.

    Vectorized over ``y``. The bracket starts at ``[0, 40]`` and is widened
    for tiny ``y`` where the root sits near ``1/sqrt(y)``.
    """
    y = np.asarray(y, dtype=float)
    if np.any(~(y > 0)):
        raise ValueError("inf_mills needs y > 0")
    y1 = np.atleast_1d(y)
    x = np.zeros_like(y1)
    inner = y1 < 1.0
    if np.any(inner):
        yy = y1[inner]
        lo = np.zeros_like(yy)
        hi = np.maximum(40.0, 4.0 / np.sqrt(yy))
        # widen until R'(hi) >= -y
        while True:
            short = _mills_slope(hi) + yy < 0
            if not np.any(short):
                break
            hi = np.where(short, 2.0 * hi, hi)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = _mills_slope(mid) + yy < 0
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= 1e-12 * np.maximum(1.0, hi)):
                break
        x[inner] = 0.5 * (lo + hi)
    return _scalar_or_array(x.reshape(y.shape))


def inf_mills(y):
    """``I(y) = inf_{x >= 0} (x y + R(x))``.

    For ``y >= 1`` the infimum sits at ``x = 0`` because ``R' >= -1``.

    >>> round(inf_mills(1.0), 7)
    1.2533141
    """
    x = inf_mills_argmin(y)
    return _scalar_or_array(np.asarray(x) * np.asarray(y, dtype=float) + mills(x))


def _phi_derivative(r, z):
    # phi^{(r)}(z) = (-1)^r He_r(z) phi(z)
    coef = np.zeros(r + 1)
    coef[r] = 1.0
    return (-1) ** r * hermite_e.hermeval(z, coef) * phi(z)


def c_constant(r: int) -> float:
    """``c_r = int |phi^{(r)}|`` for ``r in {0, 1, 2, 3}``.

    Closed form: total variation of ``phi^{(r-1)}`` across the sign changes
    of ``phi^{(r)}``, i.e. the real zeros of the Hermite polynomial
    ``He_r``.
    """
    if r not in (0, 1, 2, 3):
        raise ValueError(f"c_r is provided for r in 0..3, got {r!r}")
    if r == 0:
        return 1.0
    coef = np.zeros(r + 1)
    coef[r] = 1.0
    roots = np.sort(hermite_e.hermeroots(coef).real)
    # phi^{(r-1)} vanishes at +-inf
    values = [0.0] + [float(_phi_derivative(r - 1, z)) for z in roots] + [0.0]
    return float(sum(abs(b - a) for a, b in zip(values[:-1], values[1:])))


def c_constant_quadrature(r: int, quadrature: Quadrature | None = None) -> float:
    """Adaptive-quadrature oracle for :func:`c_constant`."""
    if r < 0:
        raise ValueError("order must be non-negative")
    q = quadrature or Quadrature()
    coef = np.zeros(r + 1)
    coef[r] = 1.0
    cuts = [-np.inf] + (sorted(hermite_e.hermeroots(coef).real) if r else []) + [np.inf]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, _ = q.quad(lambda z: abs(_phi_derivative(r, z)), a, b)
        total += val
    return total


def log_lower_gamma(a, x):
    """Log of the (unregularized) lower incomplete gamma ``gamma(a, x)``.

    Series below ``x < a + 1``; above it the upper tail comes from a Lentz
    continued fraction and is subtracted from ``Gamma(a)`` in log space.
    Vectorized over ``x`` (``a`` scalar or broadcastable).
    """
    a, x = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(x, dtype=float))
    if np.any(a <= 0) or np.any(x < 0):
        raise ValueError("log_lower_gamma needs a > 0 and x >= 0")
    out = np.full(a.shape, -np.inf)
    pos = x > 0
    use_series = pos & (x < a + 1.0)
    use_cf = pos & ~use_series
    if np.any(use_series):
        out[use_series] = _log_gamma_series(a[use_series], x[use_series])
    if np.any(use_cf):
        aa, xx = a[use_cf], x[use_cf]
        lg = special.gammaln(aa)
        log_upper = _log_upper_gamma_cf(aa, xx)
        out[use_cf] = lg + np.log1p(-np.exp(log_upper - lg))
    return _scalar_or_array(out)


def _log_gamma_series(a, x):
    # gamma(a, x) = x^a e^{-x} sum_n x^n / (a (a+1) ... (a+n))
    # terms are generated _SERIES_CHUNK at a time; ratios x/(a+n) < 1 here, so
    # summing a few terms past convergence only adds negligible mass
    term = 1.0 / a
    total = term.copy()
    steps = np.arange(1, _SERIES_CHUNK + 1)
    active = np.ones(a.shape, dtype=bool)
    n = 0
    while np.any(active) and n < _SERIES_MAX_TERMS:
        idx = np.flatnonzero(active)
        ratios = x[idx, None] / (a[idx, None] + n + steps)
        chunk = term[idx, None] * np.cumprod(ratios, axis=1)
        total[idx] += chunk.sum(axis=1)
        term[idx] = chunk[:, -1]
        n += _SERIES_CHUNK
        active[idx] = term[idx] > total[idx] * _GAMMA_EPS
    if np.any(active):
        raise ArithmeticError("incomplete gamma series did not converge")
    return a * np.log(x) - x + np.log(total)


def _log_upper_gamma_cf(a, x):
    # modified Lentz for Gamma(a, x) = e^{-x} x^a / (x + 1 - a - 1(1-a)/(x + 3 - a - ...))
    tiny = 1e-300
    b = x + 1.0 - a
    c = np.full(a.shape, 1.0 / tiny)
    dd = 1.0 / b
    h = dd.copy()
    active = np.ones(a.shape, dtype=bool)
    i = 0
    while np.any(active) and i < _CF_MAX_ITER:
        i += 1
        an = -i * (i - a)
        b = b + 2.0
        dd = an * dd + b
        dd = np.where(np.abs(dd) < tiny, tiny, dd)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        dd = 1.0 / dd
        delta = dd * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > _GAMMA_EPS
    if np.any(active):
        raise ArithmeticError("incomplete gamma continued fraction did not converge")
    return a * np.log(x) - x + np.log(h)


def log_radial_moment(d, r):
    """``log int_0^r t^{d-1} e^{-t^2/2} dt``; ``r = inf`` gives the full moment."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    a = 0.5 * d
    base = (a - 1.0) * LOG_2
    finite = np.isfinite(r)
    out = np.full(r.shape, base + special.gammaln(a))
    if np.any(finite):
        out[finite] = base + np.atleast_1d(log_lower_gamma(a, 0.5 * r[finite] ** 2))
    return _scalar_or_array(out)


def radial_moment(d, r):
    """``int_0^r t^{d-1} e^{-t^2/2} dt = 2^{d/2-1} gamma(d/2, r^2/2)``."""
    return _scalar_or_array(np.exp(log_radial_moment(d, r)))
