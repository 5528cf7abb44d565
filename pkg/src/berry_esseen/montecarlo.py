"""Desk-scale checks of the multivariate Berry-Esseen bound.

``W = sum_i X_i`` is built from independent mean-zero summands whose
covariances add up to the identity. ``P(W in A)`` is computed exactly by
lattice enumeration when the support is small and by seeded Monte Carlo
otherwise, then compared with the Gaussian measure of ``A`` over a finite
grid of test sets. The Berry-Esseen bound covers the supremum over the whole class, so
a grid supremum below the bound is a valid one-sided check.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special, stats
from scipy.stats import qmc

from . import constants
from .geometry import Ball, Empty, FullSpace, HalfSpace, IntervalUnion, TestSet, \
    interval_union_perimeter_bound, testset_from_json
from .specialfns import phi

KINDS = ("rademacher-axes", "uniform-sphere", "two-point")
EXACT_LIMIT = 2 ** 20
Z99 = float(stats.norm.ppf(0.995))
WORKERS_ENV = "BERRY_ESSEEN_WORKERS"


@dataclass(frozen=True)
class SummandSpec:
    """Law of the summands.

    ``rademacher-axes`` and ``two-point`` put summand ``i`` on coordinate
    axis ``i mod d`` with a standardized two-valued sign scaled by
    ``1/sqrt(m_j)``, ``m_j`` being the number of summands on axis ``j``.
    ``uniform-sphere`` uses ``sqrt(d/n)`` times a uniform unit vector.
    ``p`` is the probability of the positive value in ``two-point``.
    """

    kind: str
    n: int
    d: int = 1
    p: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown summand kind {self.kind!r}")
        if self.d < 1 or self.n < 1:
            raise ValueError("n and d must be >= 1")
        if self.kind != "uniform-sphere" and self.n < self.d:
            raise ValueError("axis summands need n >= d")
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")

    @property
    def axis_counts(self):
        base, extra = divmod(self.n, self.d)
        return [base + (j < extra) for j in range(self.d)]

    @property
    def _p(self):
        return 0.5 if self.kind == "rademacher-axes" else self.p

    @property
    def two_values(self):
        """Standardized values ``(positive, negative)`` of one axis sign."""
        p = self._p
        return math.sqrt((1 - p) / p), -math.sqrt(p / (1 - p))

    @property
    def sign_third_moment(self):
        p = self._p
        return (p * p + (1 - p) ** 2) / math.sqrt(p * (1 - p))

    @property
    def lyapunov_sum(self):
        """``sum_i E|X_i|^3`` in closed form."""
        if self.kind == "uniform-sphere":
            return self.d ** 1.5 / math.sqrt(self.n)
        return self.sign_third_moment * sum(m ** -0.5 for m in self.axis_counts)

    def covariance_sum(self):
        """``sum_i Var(X_i)``, accumulated summand by summand."""
        cov = np.zeros((self.d, self.d))
        if self.kind == "uniform-sphere":
            per = np.eye(self.d) * (self.d / self.n) / self.d
            for _ in range(self.n):
                cov += per
            return cov
        a, b = self.two_values
        p = self._p
        var = p * a * a + (1 - p) * b * b
        for j, m in enumerate(self.axis_counts):
            for _ in range(m):
                cov[j, j] += var / m
        return cov

    @property
    def atom_count(self):
        if self.kind == "uniform-sphere":
            return math.inf
        return math.prod(m + 1 for m in self.axis_counts)

    def to_json(self):
        return asdict(self)


def _validate_sets(sets, d):
    for s in sets:
        if not isinstance(s, TestSet):
            raise ValueError(f"not a test set: {s!r}")
        if isinstance(s, IntervalUnion) and d != 1:
            raise ValueError("interval unions need d = 1")
        if s.dim != d:
            raise ValueError(f"set of dimension {s.dim} in a d = {d} simulation")


@dataclass(frozen=True)
class SimulationConfig:
    spec: SummandSpec
    sets: tuple
    samples: int = 100_000
    seed: int = 0
    exact: bool | None = None
    chunk: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        if not self.sets:
            raise ValueError("no test sets")
        _validate_sets(self.sets, self.spec.d)
        if self.exact and self.spec.atom_count > EXACT_LIMIT:
            raise ValueError("exact enumeration needs at most 2^20 atoms")
        if not self.use_exact and self.samples < 10_000:
            raise ValueError("Monte Carlo needs at least 10^4 samples")

    @property
    def use_exact(self):
        if self.exact is None:
            return self.spec.atom_count <= EXACT_LIMIT
        return bool(self.exact)

    def to_json(self):
        return json.dumps({
            "spec": self.spec.to_json(), "sets": [s.to_json() for s in self.sets],
            "samples": self.samples, "seed": self.seed, "exact": self.exact,
            "chunk": self.chunk,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text) if isinstance(text, str) else text
        return cls(
            spec=SummandSpec(**obj["spec"]),
            sets=tuple(testset_from_json(s) for s in obj["sets"]),
            samples=int(obj.get("samples", 100_000)), seed=int(obj.get("seed", 0)),
            exact=obj.get("exact"), chunk=obj.get("chunk"),
        )


@dataclass
class SimulationReport:
    spec: dict
    method: str
    samples: int
    seed: int
    lyapunov_sum: float
    k_constant: float
    bound: float
    grid_sup: float
    sup_halfwidth: float
    conservative_sup: float
    verdict: str
    rows: list = field(default_factory=list)

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["set", "probability", "normal", "error", "halfwidth"])
        for r in self.rows:
            writer.writerow([json.dumps(r["set"], sort_keys=True), repr(r["probability"]),
                             repr(r["normal"]), repr(r["error"]), repr(r["halfwidth"])])
        return buf.getvalue()


# Gaussian measures

def normal_measure_with_error(test_set, d=None, points=2 ** 17, reps=8, seed=0):
    """``(N(0, I_d){A}, standard error)``; the error is zero for closed forms.

    Off-centre balls use ``reps`` independently scrambled Sobol sequences of
    ``points`` points each.
    """
    d = test_set.dim if d is None else d
    if isinstance(test_set, Empty):
        return 0.0, 0.0
    if isinstance(test_set, FullSpace):
        return 1.0, 0.0
    if isinstance(test_set, HalfSpace):
        return float(special.ndtr(test_set.level)), 0.0
    if isinstance(test_set, IntervalUnion):
        return float(np.sum(special.ndtr(test_set.ends) - special.ndtr(test_set.starts))), 0.0
    if isinstance(test_set, Ball):
        if not np.any(np.asarray(test_set.center)):
            return float(special.gammainc(d / 2, test_set.radius ** 2 / 2)), 0.0
        seeds = np.random.SeedSequence(seed).spawn(reps)
        est = []
        for ss in seeds:
            u = qmc.Sobol(d, scramble=True, seed=np.random.default_rng(ss)).random(points)
            z = special.ndtri(np.clip(u, 1e-300, 1 - 1e-16))
            est.append(np.mean(test_set.contains(z)))
        est = np.asarray(est)
        return float(est.mean()), float(est.std(ddof=1) / math.sqrt(reps))
    raise ValueError(f"no Gaussian measure for {type(test_set).__name__}")


def normal_measure(test_set, d=None):
    return normal_measure_with_error(test_set, d)[0]


# constants per family

def family_constant(sets, d):
    """Largest class constant needed by the sets in ``sets``.

    Half-spaces form an affine-closed class with maximal perimeter
    ``phi(0)``; balls fall under the convex-set constant; interval unions use
    the general form with their perimeter bound and ``kappa = 1/2``.
    """
    ks = []
    for s in sets:
        if isinstance(s, HalfSpace):
            ks.append(constants.k_bound_affine(phi(0.0), 1.0))
        elif isinstance(s, Ball):
            ks.append(constants.convex_class_constant(d).value)
        elif isinstance(s, IntervalUnion):
            ks.append(constants.k_general(interval_union_perimeter_bound(s.delta), 0.5))
    return max(ks) if ks else constants.BETA_STAR ** -1


# sampling

def _axis_lattice(spec):
    a, b = spec.two_values
    axes, probs = [], []
    for m in spec.axis_counts:
        k = np.arange(m + 1)
        axes.append((k * a + (m - k) * b) / math.sqrt(m))
        probs.append(stats.binom.pmf(k, m, spec._p))
    return axes, probs


def _exact_probabilities(spec, sets):
    axes, probs = _axis_lattice(spec)
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, spec.d)
    w = probs[0]
    for pr in probs[1:]:
        w = np.multiply.outer(w, pr)
    w = w.reshape(-1)
    return [float(np.dot(w, s.contains(pts))) for s in sets]


def _chunk_size(spec, requested):
    if requested:
        return int(requested)
    if spec.kind == "uniform-sphere":
        return max(1024, 2 ** 22 // (spec.n * spec.d))
    return 2 ** 16


def _draw(spec, rng, size):
    if spec.kind == "uniform-sphere":
        v = rng.standard_normal((size, spec.n, spec.d))
        v /= np.linalg.norm(v, axis=-1, keepdims=True)
        return v.sum(axis=1) * math.sqrt(spec.d / spec.n)
    a, b = spec.two_values
    cols = []
    for m in spec.axis_counts:
        k = rng.binomial(m, spec._p, size)
        cols.append((k * a + (m - k) * b) / math.sqrt(m))
    return np.stack(cols, axis=-1)


def _count_chunk(spec, sets, seed_seq, size):
    rng = np.random.Generator(np.random.Philox(seed_seq))
    w = _draw(spec, rng, size)
    return np.array([np.count_nonzero(s.contains(w)) for s in sets], dtype=np.int64)


def _mc_counts(config):
    size = _chunk_size(config.spec, config.chunk)
    n_chunks = -(-config.samples // size)
    sizes = [size] * (n_chunks - 1) + [config.samples - size * (n_chunks - 1)]
    seqs = np.random.SeedSequence(config.seed).spawn(n_chunks)
    workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    args = [(config.spec, config.sets, s, m) for s, m in zip(seqs, sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _count_chunk(*a), args))
    else:
        parts = [_count_chunk(*a) for a in args]
    return np.sum(parts, axis=0)


def wilson_interval(successes, trials, z=Z99):
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z / denom * np.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return centre - half, centre + half


def run_simulation(config):
    """Grid-sup error of ``P(W in A)`` against ``N(0, I_d){A}`` with its bound.

    The verdict passes when every set's error minus its 99% half-width is
    at most ``K * lyapunov_sum``. Reports are deterministic given the seed.
    """
    spec, sets = config.spec, config.sets
    normals = [normal_measure_with_error(s, spec.d) for s in sets]
    if config.use_exact:
        probs = np.array(_exact_probabilities(spec, sets))
        half = np.zeros(len(sets))
        method, samples = "exact", int(spec.atom_count)
    else:
        counts = _mc_counts(config)
        probs = counts / config.samples
        lo, hi = wilson_interval(counts, config.samples)
        half = np.maximum(probs - lo, hi - probs)
        method, samples = "monte-carlo", int(config.samples)
    rows = []
    for s, p, h, (nv, ne) in zip(sets, probs, half, normals):
        hw = float(h + Z99 * ne)
        rows.append({"set": s.to_json(), "probability": float(p), "normal": nv,
                     "error": abs(float(p) - nv), "halfwidth": hw})
    errors = np.array([r["error"] for r in rows])
    widths = np.array([r["halfwidth"] for r in rows])
    i = int(np.argmax(errors))
    k = family_constant(sets, spec.d)
    beta = spec.lyapunov_sum
    conservative = float(np.max(np.maximum(errors - widths, 0.0)))
    return SimulationReport(
        spec=spec.to_json(), method=method, samples=samples, seed=config.seed,
        lyapunov_sum=beta, k_constant=k, bound=k * beta, grid_sup=float(errors[i]),
        sup_halfwidth=float(widths[i]), conservative_sup=conservative,
        verdict="pass" if conservative <= k * beta else "fail", rows=rows,
    )


def halfspace_grid(d, count, seed=0, levels=(-2.0, 2.0)):
    """``count`` half-spaces with random normals and evenly spread levels."""
    rng = np.random.default_rng(seed)
    out = []
    for t in np.linspace(*levels, count):
        v = rng.standard_normal(d)
        out.append(HalfSpace(v / np.linalg.norm(v), float(t)))
    return out


def halfline_grid():
    """The 512 half-lines ``(-inf, t]`` with ``t`` in ``{-4, -4 + 1/64, ..., 4 - 1/64}``."""
    return [HalfSpace((1.0,), t) for t in np.arange(-256, 256) / 64]


def origin_ball_grid(d, radii):
    return [Ball(np.zeros(d), float(r)) for r in radii]


# annulus inequality

@dataclass
class AnnulusReport:
    set: dict
    sigma: float
    mu: list
    gamma_star_bound: float
    method: str
    rows: list = field(default_factory=list)

    @property
    def ok(self):
        return all(r["ok"] for r in self.rows)

    @property
    def witnesses(self):
        return [r for r in self.rows if not r["ok"]]

    def to_json(self):
        return json.dumps({**asdict(self), "ok": self.ok}, sort_keys=True)


def _ball_probability_cmc(ball, mu, sigma, z):
    # P(|mu + sigma Z - c| <= R) conditioning on all but the last coordinate
    c = np.asarray(ball.center)
    u = mu[:-1] - c[:-1] + sigma * z
    rem = ball.radius ** 2 - np.sum(u * u, axis=1)
    r = np.sqrt(np.maximum(rem, 0.0))
    lo = (c[-1] - r - mu[-1]) / sigma
    hi = (c[-1] + r - mu[-1]) / sigma
    return np.where(rem > 0, special.ndtr(hi) - special.ndtr(lo), 0.0)


def _exact_probability(test_set, mu, sigma):
    if isinstance(test_set, Empty):
        return 0.0
    if isinstance(test_set, HalfSpace):
        shift = float(np.dot(test_set.normal, mu))
        return float(special.ndtr((test_set.level - shift) / sigma))
    if isinstance(test_set, IntervalUnion):
        return float(np.sum(special.ndtr((test_set.ends - mu[0]) / sigma)
                            - special.ndtr((test_set.starts - mu[0]) / sigma)))
    if isinstance(test_set, Ball) and test_set.dim == 1:
        c, r = test_set.center[0], test_set.radius
        return float(special.ndtr((c + r - mu[0]) / sigma) - special.ndtr((c - r - mu[0]) / sigma))
    return None


def annulus_inequality_check(test_set, sigma, mu, eps_grid, gamma_star_bound,
                             samples=200_000, seed=0):
    """Outer and inner annulus masses under ``N(mu, sigma^2 I)`` against
    ``gamma* eps / sigma``.

    Half-spaces and one-dimensional sets are exact; balls in ``d >= 2`` use
    conditional Monte Carlo (exact in the last coordinate) with common random
    numbers across ``eps``, and a 99% margin is added to the bound.
    """
    if not 0 < sigma <= 1:
        raise ValueError("sigma must lie in (0, 1]")
    d = test_set.dim
    mu = np.asarray(mu, dtype=float).reshape(d)
    exact = _exact_probability(test_set, mu, sigma) is not None
    z = None
    if not exact:
        if not isinstance(test_set, Ball):
            raise ValueError(f"no annulus estimator for {type(test_set).__name__}")
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        z = rng.standard_normal((samples, d - 1))

    def prob(s):
        if exact:
            return _exact_probability(s, mu, sigma), None
        if isinstance(s, Empty):
            return 0.0, np.zeros(samples)
        v = _ball_probability_cmc(s, mu, sigma, z)
        return float(v.mean()), v

    base, base_v = prob(test_set)
    rows = []
    for e in eps_grid:
        e = float(e)
        bound = gamma_star_bound * e / sigma
        row = {"epsilon": e, "bound": bound}
        for name, other, sign in (("outer", test_set.offset(e), 1.0),
                                  ("inner", test_set.offset(-e), -1.0)):
            p, v = prob(other)
            mass = sign * (p - base)
            margin = 0.0 if exact else Z99 * float(np.std(sign * (v - base_v), ddof=1)) / math.sqrt(samples)
            row[name] = mass
            row[name + "_margin"] = margin
            row[name + "_ratio"] = mass * sigma / e
        row["ok"] = bool(row["outer"] <= bound + row["outer_margin"]
                         and row["inner"] <= bound + row["inner_margin"])
        rows.append(row)
    return AnnulusReport(set=test_set.to_json(), sigma=float(sigma), mu=mu.tolist(),
                         gamma_star_bound=float(gamma_star_bound),
                         method="exact" if exact else "conditional-mc", rows=rows)
