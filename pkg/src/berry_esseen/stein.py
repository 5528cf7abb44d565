"""Stein operator, Slepian interpolation and the derivative pairing bound.

``U_alpha f(w) = E f(w cos(alpha) + Z sin(alpha))`` interpolates between
``f`` (``alpha = 0``) and its Gaussian mean (``alpha = pi/2``). For a sum
``W`` with unit variance the interpolation gives::

    E f(W) - N(0,1){f} = -int_0^{pi/2} E[S U_alpha f(W)] tan(alpha) d(alpha)

with ``S g(w) = g''(w) - w g'(w)``. Integrating by parts in the Gaussian
variable removes the derivatives of ``f``, leaving a bounded integrand on
``[0, pi/2]`` (see :func:`slepian_integrand`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import hermite_e, legendre
from scipy import special

from . import specialfns as sf
from ._golden import ConvergenceError


@lru_cache(maxsize=32)
def _hermite_rule(n):
    # probabilists' Gauss-Hermite, weights normalized to the N(0,1) law
    z, w = hermite_e.hermegauss(n)
    return z, w / sf.SQRT_2PI


@lru_cache(maxsize=32)
def _legendre_rule(n, lo, hi):
    x, w = legendre.leggauss(n)
    return lo + (hi - lo) * (x + 1) / 2, w * (hi - lo) / 2


@dataclass(frozen=True)
class SmoothTestFunction:
    """A test function with its half-oscillation ``M0* = (sup f - inf f)/2``.

    ``evaluator`` maps points of shape ``(..., d)`` to values of shape
    ``(...)``. ``gradient`` and ``laplacian`` are optional analytic
    derivatives; when absent, finite differences are used.
    """

    evaluator: object
    m0: float
    d: int = 1
    smooth: bool = True
    name: str = "f"
    gradient: object = None
    laplacian: object = None
    breakpoints: tuple = ()

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    @classmethod
    def univariate(cls, fn, m0, name="f", derivative=None, second=None, smooth=True,
                   breakpoints=()):
        """Wrap a scalar function of one variable."""
        grad = None if derivative is None else (lambda x: derivative(x[..., 0])[..., None])
        lap = None if second is None else (lambda x: second(x[..., 0]))
        return cls(lambda x: fn(x[..., 0]), m0, 1, smooth, name, grad, lap, tuple(breakpoints))

    def on_line(self):
        """Scalar view for ``d = 1``."""
        return lambda t: self.evaluator(np.asarray(t, dtype=float)[..., None])


def sine(shift=0.0):
    """``sin(x + shift)``; odd (and so trivially centred) when ``shift = 0``."""
    return SmoothTestFunction.univariate(
        lambda x: np.sin(x + shift), 1.0, f"sin{shift:+g}" if shift else "sin",
        lambda x: np.cos(x + shift), lambda x: -np.sin(x + shift))


def tanh_cubic(shift=0.0):
    """``tanh((x - shift)^3)``: a cubic clipped smoothly to ``(-1, 1)``."""
    return SmoothTestFunction.univariate(
        lambda x: np.tanh((x - shift) ** 3), 1.0,
        f"tanh_cubic{shift:+g}" if shift else "tanh_cubic")


def gaussian_bump(center=0.0):
    """``exp(-(x - center)^2)``: an analytic bump with range ``(0, 1]``."""
    return SmoothTestFunction.univariate(
        lambda x: np.exp(-(x - center) ** 2), 0.5, f"bump{center:+g}" if center else "bump",
        lambda x: -2 * (x - center) * np.exp(-(x - center) ** 2),
        lambda x: (4 * (x - center) ** 2 - 2) * np.exp(-(x - center) ** 2))


def constant(c=1.0, d=1):
    return SmoothTestFunction(lambda x: np.full(x.shape[:-1], float(c)), 0.0, d, True, "const",
                              lambda x: np.zeros(x.shape), lambda x: np.zeros(x.shape[:-1]))


def identity():
    """``f(x) = x``; unbounded, so ``M0*`` is infinite."""
    return SmoothTestFunction.univariate(lambda x: x, math.inf, "identity",
                                         np.ones_like, np.zeros_like)


@dataclass(frozen=True)
class DiscreteSum:
    """``W = sum_i eps_i / sqrt(n)`` for ``n`` Rademacher signs."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def atoms(self):
        k = np.arange(self.n + 1)
        return (2 * k - self.n) / math.sqrt(self.n)

    @property
    def weights(self):
        k = np.arange(self.n + 1)
        return np.exp(special.gammaln(self.n + 1) - special.gammaln(k + 1)
                      - special.gammaln(self.n - k + 1) - self.n * math.log(2.0))

    def exact_moments(self):
        """Mean and variance as exact rationals."""
        total = 2 ** self.n
        mean = Fraction(sum(math.comb(self.n, k) * (2 * k - self.n) for k in range(self.n + 1)),
                        total)
        second = Fraction(sum(math.comb(self.n, k) * (2 * k - self.n) ** 2
                              for k in range(self.n + 1)), total * self.n)
        return mean, second - mean ** 2

    def expect(self, fn):
        return float(np.dot(self.weights, fn(self.atoms)))


def gaussian_mean(f, nodes=128):
    """``N(0, I_d){f}`` by product Gauss-Hermite."""
    return u_alpha(f, math.pi / 2, np.zeros(f.d), nodes)


def u_alpha(f, alpha, w, nodes=64):
    """``int f(w cos(alpha) + z sin(alpha)) phi_d(z) dz`` for ``d`` in {1, 2}."""
    if f.d not in (1, 2):
        raise ValueError("u_alpha supports d in {1, 2}")
    if nodes < 32:
        raise ValueError("u_alpha needs at least 32 nodes")
    w = np.asarray(w, dtype=float).reshape(f.d)
    c, s = math.cos(alpha), math.sin(alpha)
    if alpha == 0:
        return float(f(w))
    z, wt = _hermite_rule(nodes)
    if alpha == math.pi / 2:
        c = 0.0
    if f.d == 1:
        return float(np.dot(wt, f((w[0] * c + s * z)[:, None])))
    zz = np.stack(np.meshgrid(z, z, indexing="ij"), axis=-1)
    vals = f(w * c + s * zz)
    return float(wt @ vals @ wt)


def _fd_derivatives(f, w, step):
    d = w.size
    g = np.empty(d)
    lap = 0.0
    f0 = float(f(w))
    for i in range(d):
        e = np.zeros(d)
        e[i] = step
        fp, fm = float(f(w + e)), float(f(w - e))
        g[i] = (fp - fm) / (2 * step)
        lap += (fp - 2 * f0 + fm) / step ** 2
    return g, lap


def stein_apply(g, w, step=1e-5):
    """``Laplacian g(w) - <grad g(w), w>``.

    Uses the analytic derivatives attached to ``g`` when present, otherwise
    central differences with the given step.
    """
    w = np.asarray(w, dtype=float).reshape(g.d)
    if g.gradient is not None and g.laplacian is not None:
        grad, lap = np.asarray(g.gradient(w)), float(g.laplacian(w))
    else:
        grad, lap = _fd_derivatives(g, w, step)
    return lap - float(np.dot(grad, w))


def slepian_integrand(f, alpha, w, nodes=128):
    """``E[S U_alpha f(w)] tan(alpha)`` written without derivatives of ``f``.

    With ``c = cos(alpha)``, ``s = sin(alpha)``::

        S U_alpha f(w) tan(alpha) = (c/s) E[f(wc + sZ)(Z^2 - 1)] - w E[f(wc + sZ) Z]

    which vanishes as ``alpha -> 0`` and tends to ``-w E f'(Z)`` at
    ``alpha = pi/2``. ``alpha`` and ``w`` broadcast.
    """
    alpha = np.asarray(alpha, dtype=float)[..., None, None]
    w = np.asarray(w, dtype=float)[None, :, None]
    z, wt = _hermite_rule(nodes)
    c, s = np.cos(alpha), np.sin(alpha)
    vals = f.on_line()(w * c + s * z)
    second = np.sum(vals * (z * z - 1) * wt, axis=-1)
    first = np.sum(vals * z * wt, axis=-1)
    return (c / s)[..., 0] * second - w[..., 0] * first


@dataclass(frozen=True)
class SlepianCheck:
    lhs: float
    rhs: float
    gap: float
    alpha_nodes: int


def slepian_identity_check(f, W, alpha_nodes=64, tol=1e-10, max_nodes=2048, z_nodes=128):
    """Both sides of the interpolation identity at ``d = 1``.

    ``lhs`` uses the exact binomial law of ``W``; ``rhs`` integrates
    :func:`slepian_integrand` over ``alpha`` by Gauss-Legendre, doubling the
    node count until two successive rules agree to ``tol``.
    """
    if f.d != 1:
        raise ValueError("slepian_identity_check is for d = 1")
    if W.n > 20:
        raise ValueError("n must be <= 20")
    lhs = W.expect(f.on_line()) - gaussian_mean(f, 2 * z_nodes)
    partial = []
    n = alpha_nodes
    prev = None
    while n <= max_nodes:
        a, wa = _legendre_rule(n, 0.0, math.pi / 2)
        integrand = slepian_integrand(f, a, W.atoms, z_nodes)
        val = -float(wa @ integrand @ W.weights)
        partial.append((n, val))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return SlepianCheck(lhs, val, abs(lhs - val), n)
        prev = val
        n *= 2
    raise ConvergenceError("alpha quadrature did not settle", {"partial": partial})


def _pairing_kernel(r, t):
    # (-1)^r He_r(t) phi(t); the directional r-th derivative of phi along a unit vector
    coef = np.zeros(r + 1)
    coef[r] = 1.0
    return (-1) ** r * hermite_e.hermeval(t, coef) * np.exp(-0.5 * t * t) / sf.SQRT_2PI


@dataclass(frozen=True)
class PairingCheck:
    integral: float
    bound: float

    @property
    def ok(self):
        return abs(self.integral) <= self.bound * (1 + 1e-8)


def derivative_pairing_check(f, r, u, d=None, quadrature=None):
    """``int f <grad^r phi_d, u^{(x) r}>`` against ``c_r M0*(f) |u|^r``.

    The kernel is ``|u|^r`` times the ``r``-th derivative of ``phi`` along
    ``u/|u|``: ``(-1)^r He_r(<z, u>/|u|) phi_d(z)``. In 1-D the integral uses
    adaptive quadrature on ``[-12, 12]`` with ``f``'s breakpoints; in 2-D it
    is taken in coordinates along and across ``u``, Gauss-Hermite across and
    adaptive along.
    """
    d = f.d if d is None else d
    if d not in (1, 2) or d != f.d:
        raise ValueError("pairing check supports d in {1, 2} matching f")
    if r not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    u = np.asarray(u, dtype=float).reshape(d)
    norm = float(np.linalg.norm(u))
    if norm > 10:
        raise ValueError("|u| must be <= 10")
    bound = sf.c_constant(r) * f.m0 * norm ** r
    if norm == 0:
        return PairingCheck(0.0, bound)
    q = quadrature or sf.Quadrature(abs_tol=1e-13, rel_tol=1e-11, max_subdivisions=500)
    e = u / norm
    if d == 1:
        g = f.on_line()
        pts = sorted(e[0] * b for b in f.breakpoints if -12 < b < 12)

        def integrand(t):
            return float(g(e[0] * t)) * _pairing_kernel(r, t)

        val, _ = q.quad(integrand, -12.0, 12.0, points=pts or None)
    else:
        perp = np.array([-e[1], e[0]])
        s_nodes, s_w = _hermite_rule(96)

        def integrand(t):
            pts2 = t * e + s_nodes[:, None] * perp
            return float(np.dot(s_w, f(pts2))) * _pairing_kernel(r, t)

        pts = sorted(f.breakpoints) if f.breakpoints else None
        val, _ = q.quad(integrand, -12.0, 12.0, points=pts)
    return PairingCheck(norm ** r * val, bound)


def pairing_suite(count=100, seed=0):
    """Random bounded test functions: steps, sinusoids and clipped polynomials.

    Returns ``[(f, r, u)]``; about a fifth of the cases are two-dimensional
    sinusoids, whose integrand is smooth across the direction ``u``.
    """
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(count):
        r = int(rng.integers(1, 4))
        kind = i % 5
        if kind == 0:
            cut = float(rng.normal())
            lo, hi = sorted(rng.normal(size=2) * 2)
            f = SmoothTestFunction.univariate(
                lambda x, c=cut, a=lo, b=hi: np.where(x < c, a, b), (hi - lo) / 2,
                "step", smooth=False, breakpoints=(cut,))
        elif kind == 1:
            k, ph, amp = rng.uniform(0.2, 4.0), rng.uniform(0, 2 * np.pi), rng.uniform(0.5, 2)
            f = SmoothTestFunction.univariate(
                lambda x, k=k, ph=ph, a=amp: a * np.sin(k * x + ph), amp, "sinusoid")
        elif kind == 2:
            coefs = rng.normal(size=4)
            clip = rng.uniform(0.5, 3.0)
            kinks = [z.real for lvl in (clip, -clip)
                     for z in np.roots(coefs - np.array([0, 0, 0, lvl]))
                     if abs(z.imag) < 1e-12]
            f = SmoothTestFunction.univariate(
                lambda x, c=coefs, m=clip: np.clip(np.polyval(c, x), -m, m), clip,
                "clipped_poly", smooth=False, breakpoints=tuple(sorted(kinks)))
        elif kind == 3:
            edges = np.sort(rng.normal(size=3) * 1.5)
            levels = rng.uniform(-1, 1, 4)
            f = SmoothTestFunction.univariate(
                lambda x, e=edges, v=levels: v[np.searchsorted(e, x)],
                float(np.ptp(levels)) / 2, "staircase", smooth=False, breakpoints=tuple(edges))
        else:
            kv = rng.normal(size=2)
            ph = rng.uniform(0, 2 * np.pi)
            f = SmoothTestFunction(lambda x, k=kv, p=ph: np.sin(x @ k + p), 1.0, 2, True, "sinusoid2d")
        u = rng.normal(size=f.d)
        u *= rng.uniform(0.1, 3.0) / np.linalg.norm(u)
        cases.append((f, r, u))
    return cases


def sign_function():
    return SmoothTestFunction.univariate(np.sign, 1.0, "sign", smooth=False, breakpoints=(0.0,))


def stein_mean_by_quadrature(g, quadrature=None):
    """``E[S g(Z)]`` for ``Z ~ N(0,1)`` by adaptive quadrature."""
    q = quadrature or sf.Quadrature()
    val, _ = q.quad(lambda t: stein_apply(g, [t]) * float(sf.phi(t)), -np.inf, np.inf)
    return val


__all__ = [
    "SmoothTestFunction", "DiscreteSum", "SlepianCheck", "PairingCheck",
    "u_alpha", "gaussian_mean", "stein_apply", "slepian_integrand",
    "slepian_identity_check", "derivative_pairing_check", "pairing_suite",
    "sine", "tanh_cubic", "gaussian_bump", "constant", "identity", "sign_function",
    "stein_mean_by_quadrature",
]
