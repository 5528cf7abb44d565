"""Berry-Esseen constants from the smoothing/induction bootstrap.

Two master inequalities bound the constant ``K``:

* affine-closed classes (closed under symmetric linear maps with smallest
  eigenvalue at least one)::

      K <= max{1/beta, c3/(2 sigma^3) + gamma* sqrt(2(1+kappa) c1 c3) (3/sigma + 24/sigma^3)}

* general classes (translations and scalings only), with a free ``gamma0``::

      K <= max{1/(beta gamma0), c3/(2 sigma^3 gamma0)
               + sqrt(2(1+kappa) c1 c3) (3/sigma^2 + 24/sigma^4)}

where ``sigma = sqrt(1 - beta^{2/3})``. The rounded headline forms replace the
coefficients by 50 and 53.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import specialfns as sf
from .perimeter import perimeter_upper_bound_linear

BETA_STAR = 1.0 / 27.0
AFFINE_COEFFICIENT = 50.0
GENERAL_COEFFICIENT = 53.0
CONVEX_SLOPE = 42.0
CONVEX_INTERCEPT = 16.0

C1 = sf.c_constant(1)
C3 = sf.c_constant(3)


def _check_beta(beta_star):
    if not 0.0 < beta_star < 1.0:
        raise ValueError("beta_star must lie in (0, 1)")


def _check_nonneg(name, value):
    if not value >= 0.0:
        raise ValueError(f"{name} must be non-negative")


def sigma_star(beta_star=BETA_STAR):
    """``sqrt(1 - beta^{2/3})``; the cube root keeps ``sigma(1/27)**2 == 8/9``."""
    _check_beta(beta_star)
    return math.sqrt(1.0 - np.cbrt(beta_star) ** 2)


def affine_coefficient(beta_star=BETA_STAR):
    """Exact value behind the rounded coefficient 50."""
    s = sigma_star(beta_star)
    return math.sqrt(2.0 * C1 * C3) * (3.0 / s + 24.0 / s ** 3)


def general_coefficient(beta_star=BETA_STAR):
    """Exact value behind the rounded coefficient 53."""
    s = sigma_star(beta_star)
    return math.sqrt(2.0 * C1 * C3) * (3.0 / s ** 2 + 24.0 / s ** 4)


def remainder_term(beta_star=BETA_STAR):
    """``c3 / (2 sigma^3)``, rounded up to 1 in the headline forms."""
    return C3 / (2.0 * sigma_star(beta_star) ** 3)


@dataclass
class ConstantBundle:
    """Every intermediate of one constant evaluation, for audit."""

    beta_star: float
    sigma_star: float
    c1: float
    c3: float
    kappa: float
    gamma_star: float
    gamma0: float | None
    k_value: float
    form: str
    branches: dict = field(default_factory=dict)
    exact_coefficient: float = float("nan")
    rounded_coefficient: float = float("nan")
    rounded_value: float = float("nan")

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))


def k_bound_affine(gamma_star, kappa, beta_star=BETA_STAR):
    """Constant for affine-closed classes."""
    _check_nonneg("gamma_star", gamma_star)
    _check_nonneg("kappa", kappa)
    s = sigma_star(beta_star)
    second = remainder_term(beta_star) + gamma_star * math.sqrt(
        2.0 * (1.0 + kappa) * C1 * C3) * (3.0 / s + 24.0 / s ** 3)
    return max(1.0 / beta_star, second)


def k_bound_general(gamma_star, kappa, beta_star=BETA_STAR, gamma0=None):
    """``K(beta, gamma0)`` for classes closed under translations and scalings.

    ``gamma_star`` does not enter this expression directly; it is kept in the
    signature so the call mirrors :func:`k_bound_affine`. ``gamma0``
    defaults to ``gamma_star``.
    """
    _check_nonneg("gamma_star", gamma_star)
    _check_nonneg("kappa", kappa)
    if gamma0 is None:
        gamma0 = gamma_star
    if not gamma0 > 0:
        raise ValueError("gamma0 must be positive")
    s = sigma_star(beta_star)
    first = 1.0 / (beta_star * gamma0)
    second = remainder_term(beta_star) / gamma0 + math.sqrt(
        2.0 * (1.0 + kappa) * C1 * C3) * (3.0 / s ** 2 + 24.0 / s ** 4)
    return max(first, second)


def k_general(gamma_star, kappa, beta_star=BETA_STAR):
    """Set-probability constant ``gamma* K(beta, gamma*)`` for general classes.

    ``gamma* = 0`` is taken as the limit ``max{1/beta, c3/(2 sigma^3)}``.
    """
    _check_nonneg("gamma_star", gamma_star)
    _check_nonneg("kappa", kappa)
    s = sigma_star(beta_star)
    return max(1.0 / beta_star, remainder_term(beta_star) + gamma_star * math.sqrt(
        2.0 * (1.0 + kappa) * C1 * C3) * (3.0 / s ** 2 + 24.0 / s ** 4))


def rounded_affine(gamma_star, kappa):
    return max(27.0, 1.0 + AFFINE_COEFFICIENT * gamma_star * math.sqrt(1.0 + kappa))


def rounded_general(gamma_star, kappa):
    return max(27.0, 1.0 + GENERAL_COEFFICIENT * gamma_star * math.sqrt(1.0 + kappa))


def constant_bundle(gamma_star, kappa, beta_star=BETA_STAR, affine=True):
    """Evaluate a constant and package it with its intermediates."""
    s = sigma_star(beta_star)
    if affine:
        k = k_bound_affine(gamma_star, kappa, beta_star)
        coef = affine_coefficient(beta_star)
        rounded_coef, rounded = AFFINE_COEFFICIENT, rounded_affine(gamma_star, kappa)
        gamma0 = None
    else:
        k = k_general(gamma_star, kappa, beta_star)
        coef = general_coefficient(beta_star)
        rounded_coef, rounded = GENERAL_COEFFICIENT, rounded_general(gamma_star, kappa)
        gamma0 = gamma_star
    branches = {
        "inverse_beta": 1.0 / beta_star,
        "remainder": remainder_term(beta_star),
        "gamma_term": gamma_star * math.sqrt(1.0 + kappa) * coef,
    }
    return ConstantBundle(
        beta_star=beta_star, sigma_star=s, c1=C1, c3=C3, kappa=kappa,
        gamma_star=gamma_star, gamma0=gamma0, k_value=k,
        form="affine" if affine else "general", branches=branches,
        exact_coefficient=coef, rounded_coefficient=rounded_coef,
        rounded_value=rounded,
    )


def coefficient_certificates(beta_star=BETA_STAR):
    """The numeric steps that justify the rounded coefficients 1, 50 and 53."""
    rem = remainder_term(beta_star)
    aff = affine_coefficient(beta_star)
    gen = general_coefficient(beta_star)
    return {
        "remainder": rem,
        "remainder_ok": rem <= 1.0,
        "affine": aff,
        "affine_ok": aff <= AFFINE_COEFFICIENT,
        "general": gen,
        "general_ok": gen <= GENERAL_COEFFICIENT,
    }


@dataclass(frozen=True)
class ConvexConstant:
    d: int
    value: float
    headline: float

    @property
    def dominated(self):
        return self.value <= self.headline


def convex_class_constant(d):
    """Constant for all measurable convex sets in dimension ``d``.

    Plugs the affine perimeter bound ``0.59 d^{1/4} + 0.21`` into the rounded
    affine form with ``kappa = 1`` and compares with ``42 d^{1/4} + 16``.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    value = max(27.0, 1.0 + AFFINE_COEFFICIENT * math.sqrt(2.0)
                * float(perimeter_upper_bound_linear(d)))
    headline = CONVEX_SLOPE * d ** 0.25 + CONVEX_INTERCEPT
    return ConvexConstant(d=int(d), value=value, headline=headline)


def beta_sweep(gamma_star, kappa, betas, affine=True):
    """``[(beta, K)]`` for exploring thresholds other than 1/27."""
    fn = k_bound_affine if affine else k_general
    return [(float(b), fn(gamma_star, kappa, float(b))) for b in betas]
