"""Test-set classes with generalized signed distances, offsets and smoothing.

Each set ``A`` carries a function ``rho_A`` that is non-positive on ``A`` and
non-negative off it. Offsets are the sublevel sets
``A^{t|rho} = {x : rho_A(x) <= t}``; smoothing composes ``rho`` with the
piecewise quadratic :func:`smoothing_g`.

For convex variants ``rho`` is the signed Euclidean distance. For unions of
intervals on the line, ``rho`` is linear outside the hull, a parabolic bridge
across each gap and a tent of slope one half inside each interval (see
:class:`IntervalUnion`).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import special

from .specialfns import SQRT_2PI

_TOL = 1e-9


def _points(x, d):
    """Coerce ``x`` to shape ``(..., d)``; in 1-D a bare array means scalars."""
    x = np.asarray(x, dtype=float)
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        return x[..., None]
    if x.shape[-1] != d:
        raise ValueError(f"expected points with last axis {d}, got shape {x.shape}")
    return x


def _out(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


class TestSet:
    """Common interface; concrete variants are frozen dataclasses."""

    __test__ = False  # keep pytest from collecting this as a test class
    kind = "abstract"
    kappa = 0.0

    def rho(self, x):
        raise NotImplementedError

    def contains(self, x):
        raise NotImplementedError

    def offset(self, t):
        raise NotImplementedError

    def translate(self, y):
        raise NotImplementedError

    def scale(self, q):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError

    def seams(self):
        """Points where ``rho`` is not differentiable."""
        return np.empty((0, self.dim))


@dataclass(frozen=True)
class Empty(TestSet):
    dim: int = 1
    kind = "empty"

    def rho(self, x):
        return _out(np.full(_points(x, self.dim).shape[:-1], np.inf))

    def contains(self, x):
        return np.zeros(_points(x, self.dim).shape[:-1], dtype=bool)

    def offset(self, t):
        return self

    def translate(self, y):
        return self

    def scale(self, q):
        return self

    def to_json(self):
        return {"type": "empty", "dim": self.dim}


@dataclass(frozen=True)
class FullSpace(TestSet):
    dim: int = 1
    kind = "full"

    def rho(self, x):
        return _out(np.full(_points(x, self.dim).shape[:-1], -np.inf))

    def contains(self, x):
        return np.ones(_points(x, self.dim).shape[:-1], dtype=bool)

    def offset(self, t):
        return self

    def translate(self, y):
        return self

    def scale(self, q):
        return self

    def to_json(self):
        return {"type": "full", "dim": self.dim}


@dataclass(frozen=True)
class HalfSpace(TestSet):
    """``{x : <normal, x> <= level}`` with a unit normal."""

    normal: tuple
    level: float
    kind = "halfspace"
    kappa = 1.0

    def __post_init__(self):
        n = tuple(float(v) for v in np.atleast_1d(self.normal))
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "level", float(self.level))
        if abs(math.hypot(*n) - 1.0) > 1e-12:
            raise ValueError("half-space normal must have unit length")

    @property
    def dim(self):
        return len(self.normal)

    def offset(self, t):
        return HalfSpace(self.normal, self.level + t)

    def rho(self, x):
        return _out(_points(x, self.dim) @ np.asarray(self.normal) - self.level)

    def gradient(self, x):
        p = _points(x, self.dim)
        return np.broadcast_to(np.asarray(self.normal), p.shape).copy()

    def contains(self, x):
        return _points(x, self.dim) @ np.asarray(self.normal) <= self.level

    def translate(self, y):
        return HalfSpace(self.normal, self.level + float(np.dot(self.normal, np.ravel(y))))

    def scale(self, q):
        return HalfSpace(self.normal, q * self.level)

    def to_json(self):
        return {"type": "halfspace", "normal": list(self.normal), "offset": self.level}


@dataclass(frozen=True)
class Ball(TestSet):
    center: tuple
    radius: float
    kind = "ball"
    kappa = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in np.atleast_1d(self.center)))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    @property
    def dim(self):
        return len(self.center)

    def rho(self, x):
        p = _points(x, self.dim)
        return _out(np.linalg.norm(p - np.asarray(self.center), axis=-1) - self.radius)

    def gradient(self, x):
        v = _points(x, self.dim) - np.asarray(self.center)
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    def contains(self, x):
        p = _points(x, self.dim)
        return np.sum((p - np.asarray(self.center)) ** 2, axis=-1) <= self.radius ** 2

    def offset(self, t):
        # a radius-zero ball is a single point; treated as empty
        r = self.radius + t
        return Ball(self.center, r) if r > 0 else Empty(self.dim)

    def translate(self, y):
        return Ball(np.asarray(self.center) + np.asarray(y, dtype=float), self.radius)

    def scale(self, q):
        return Ball(q * np.asarray(self.center), q * self.radius)

    def seams(self):
        return np.asarray(self.center)[None, :]

    def to_json(self):
        return {"type": "ball", "center": list(self.center), "radius": self.radius}


def _midpoint_gap(intervals):
    mids = [(a + b) / 2 for a, b in intervals]
    return min((b - a for a, b in zip(mids[:-1], mids[1:])), default=math.inf)


@dataclass(frozen=True)
class IntervalUnion(TestSet):
    """Disjoint closed intervals on the line with midpoints ``delta`` apart.

    ``rho`` is ``a_1 - x`` left of the hull, ``x - b_n`` right of it,
    ``((L/2)^2 - (x - m)^2) / L`` across a gap of length ``L`` and midpoint
    ``m``, and ``-(h - |x - c|) / 2`` inside an interval of half-length ``h``
    and centre ``c``. The factor one half inside the intervals makes erosion
    by ``rho`` level ``-e`` equal to Euclidean erosion by ``2e``.
    """

    intervals: tuple
    delta: float
    kind = "interval_union"
    kappa = 0.5
    dim = 1

    def __post_init__(self):
        iv = tuple((float(a), float(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", iv)
        object.__setattr__(self, "delta", float(self.delta))
        if not iv:
            raise ValueError("an interval union needs at least one interval")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        for a, b in iv:
            if not a < b:
                raise ValueError(f"degenerate interval [{a}, {b}]")
        for (_, b), (a, _) in zip(iv[:-1], iv[1:]):
            if not b < a:
                raise ValueError("intervals must be sorted and disjoint")
        if _midpoint_gap(iv) < self.delta * (1 - 1e-12):
            raise ValueError("interval midpoints closer than delta")

    @property
    def starts(self):
        return np.array([a for a, _ in self.intervals])

    @property
    def ends(self):
        return np.array([b for _, b in self.intervals])

    def rho(self, x):
        x = _points(x, 1)[..., 0]
        a, b = self.starts, self.ends
        j = np.searchsorted(a, x, side="right") - 1
        jc = np.clip(j, 0, len(a) - 1)
        jn = np.clip(j + 1, 0, len(a) - 1)
        inside = (j >= 0) & (x <= b[jc])
        left = j < 0
        right = (j == len(a) - 1) & ~inside
        gap = ~(inside | left | right)
        out = np.empty_like(x)
        out[left] = a[0] - x[left]
        out[right] = x[right] - b[-1]
        ai, bi = a[jc[inside]], b[jc[inside]]
        out[inside] = -0.5 * ((bi - ai) / 2 - np.abs(x[inside] - (ai + bi) / 2))
        lo, hi = b[jc[gap]], a[jn[gap]]
        length = hi - lo
        out[gap] = ((length / 2) ** 2 - (x[gap] - (lo + hi) / 2) ** 2) / length
        return _out(out)

    def gradient(self, x):
        x = _points(x, 1)[..., 0]
        a, b = self.starts, self.ends
        j = np.searchsorted(a, x, side="right") - 1
        jc = np.clip(j, 0, len(a) - 1)
        jn = np.clip(j + 1, 0, len(a) - 1)
        inside = (j >= 0) & (x <= b[jc])
        left = j < 0
        right = (j == len(a) - 1) & ~inside
        gap = ~(inside | left | right)
        g = np.empty_like(x)
        g[left] = -1.0
        g[right] = 1.0
        c = (a[jc[inside]] + b[jc[inside]]) / 2
        g[inside] = 0.5 * np.sign(x[inside] - c)
        lo, hi = b[jc[gap]], a[jn[gap]]
        g[gap] = -2.0 * (x[gap] - (lo + hi) / 2) / (hi - lo)
        return g[..., None]

    def contains(self, x):
        x = _points(x, 1)[..., 0]
        a, b = self.starts, self.ends
        j = np.searchsorted(a, x, side="right") - 1
        return (j >= 0) & (x <= b[np.clip(j, 0, len(a) - 1)])

    def offset(self, t):
        """Sublevel set at level ``t``.

        Erosion (``t < 0``) shrinks every interval by ``2|t|`` per side and
        drops those that vanish. Dilation moves hull ends by ``t`` and gap
        ends by ``L/2 - sqrt(L^2/4 - tL)``; a gap closes once ``t >= L/4``.
        The returned ``delta`` is the smaller of this set's ``delta`` and the
        realized midpoint spacing.
        """
        t = float(t)
        if t < 0:
            s = -2.0 * t
            iv = [(a + s, b - s) for a, b in self.intervals if b - a > 2 * s]
            if not iv:
                return Empty(1)
        elif t == 0:
            return self
        else:
            iv = [[self.intervals[0][0] - t, self.intervals[0][1]]]
            for (_, b), (a, b2) in zip(self.intervals[:-1], self.intervals[1:]):
                length = a - b
                if t >= length / 4:
                    iv[-1][1] = b2
                else:
                    e = length / 2 - math.sqrt(length * length / 4 - t * length)
                    iv[-1][1] = b + e
                    iv.append([a - e, b2])
            iv[-1][1] += t
        return IntervalUnion(tuple(map(tuple, iv)), min(self.delta, _midpoint_gap(iv)))

    def translate(self, y):
        y = float(np.asarray(y, dtype=float).reshape(-1)[0])
        return IntervalUnion(tuple((a + y, b + y) for a, b in self.intervals), self.delta)

    def scale(self, q):
        return IntervalUnion(tuple((q * a, q * b) for a, b in self.intervals), self.delta)

    def seams(self):
        pts = [v for a, b in self.intervals for v in (a, (a + b) / 2, b)]
        return np.asarray(pts)[:, None]

    def to_json(self):
        return {"type": "interval_union", "intervals": [list(p) for p in self.intervals],
                "delta": self.delta}


# the set used to illustrate the interval construction
FIGURE_SET = IntervalUnion(((-2.0, 0.0), (2.0, 5.0)), 4.5)


def testset_from_json(obj):
    """Inverse of ``TestSet.to_json``."""
    kind = obj.get("type")
    if kind == "halfspace":
        return HalfSpace(obj["normal"], obj["offset"])
    if kind == "ball":
        return Ball(obj["center"], obj["radius"])
    if kind == "interval_union":
        return IntervalUnion(tuple(tuple(p) for p in obj["intervals"]), obj["delta"])
    if kind == "empty":
        return Empty(int(obj.get("dim", 1)))
    if kind == "full":
        return FullSpace(int(obj.get("dim", 1)))
    raise ValueError(f"unknown test-set type {kind!r}")


def rho(test_set, x):
    return test_set.rho(x)


def offset_set(test_set, t):
    return test_set.offset(t)


def rho_gradient(test_set, x, step=1e-6):
    """Central finite-difference gradient of ``rho``; shape ``(..., d)``."""
    p = _points(x, test_set.dim)
    grads = []
    for i in range(test_set.dim):
        e = np.zeros(test_set.dim)
        e[i] = step
        grads.append((np.asarray(test_set.rho(p + e)) - np.asarray(test_set.rho(p - e))) / (2 * step))
    return np.stack(grads, axis=-1)


# smoothing

def smoothing_g(u):
    """C^1 step from 1 (``u <= 0``) to 0 (``u >= 1``) with ``|g'| <= 2``, ``|g''| <= 4``."""
    u = np.asarray(u, dtype=float)
    out = np.where(u <= 0.5, 1.0 - 2.0 * u * u, 2.0 * (1.0 - u) ** 2)
    out = np.where(u <= 0, 1.0, np.where(u >= 1, 0.0, out))
    return _out(out)


def smoothing_g_prime(u):
    u = np.asarray(u, dtype=float)
    out = np.where(u <= 0.5, -4.0 * u, -4.0 * (1.0 - u))
    return _out(np.where((u <= 0) | (u >= 1), 0.0, out))


def smoothing_g_inverse(v):
    """Inverse of :func:`smoothing_g` on ``(0, 1)``."""
    v = np.asarray(v, dtype=float)
    if np.any((v <= 0) | (v >= 1)):
        raise ValueError("g^{-1} is defined on (0, 1)")
    return _out(np.where(v >= 0.5, np.sqrt((1.0 - v) / 2.0), 1.0 - np.sqrt(v / 2.0)))


@dataclass(frozen=True)
class SmoothingProfile:
    test_set: TestSet
    epsilon: float
    sign: str = "outer"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.sign not in ("outer", "inner"):
            raise ValueError("sign must be 'outer' or 'inner'")

    @property
    def base(self):
        """Set whose ``rho`` feeds ``g``: ``A`` itself, or ``A^{-eps|rho}``."""
        if self.sign == "outer":
            return self.test_set
        return self.test_set.offset(-self.epsilon)

    @property
    def bounds(self):
        """Certified ``(M1, M2)`` budgets ``2/eps`` and ``4(1+kappa)/eps^2``."""
        e = self.epsilon
        return 2.0 / e, 4.0 * (1.0 + self.test_set.kappa) / (e * e)


def smooth_indicator(profile, x):
    """``g(rho_B(x)/eps)`` with ``B`` the profile base; zero if ``B`` is empty."""
    base = profile.base
    if isinstance(base, Empty):
        return _out(np.zeros(_points(x, profile.test_set.dim).shape[:-1]))
    return smoothing_g(np.asarray(base.rho(x)) / profile.epsilon)


def _unit_vectors(rng, n, d):
    v = rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sample_near_boundary(test_set, width, n, rng):
    """Points within about ``width`` of the boundary of ``test_set``."""
    d = test_set.dim
    if isinstance(test_set, HalfSpace):
        z = rng.standard_normal((n, d))
        nv = np.asarray(test_set.normal)
        shift = test_set.level + rng.uniform(-width, width, n) - z @ nv
        return z + shift[:, None] * nv
    if isinstance(test_set, Ball):
        r = np.abs(test_set.radius + rng.uniform(-width, width, n))
        return np.asarray(test_set.center) + _unit_vectors(rng, n, d) * r[:, None]
    if isinstance(test_set, IntervalUnion):
        ends = np.concatenate([test_set.starts, test_set.ends])
        x = rng.choice(ends, n) + rng.uniform(-width, width, n)
        return x[:, None]
    raise TypeError(f"cannot sample near {type(test_set).__name__}")


class LipschitzEstimate(tuple):
    """``(m1, m2)`` sampled Lipschitz constants of ``f`` and ``grad f``."""

    def __new__(cls, m1, m2):
        return super().__new__(cls, (m1, m2))

    m1 = property(lambda self: self[0])
    m2 = property(lambda self: self[1])


def _fd_gradient(f, x, step):
    d = x.shape[-1]
    cols = []
    for i in range(d):
        e = np.zeros(d)
        e[i] = step
        cols.append((f(x + e) - f(x - e)) / (2 * step))
    return np.stack(cols, axis=-1)


def lipschitz_probe(profile, samples=2000, seed=0):
    """Sampled ``M1`` and ``M2`` of the smoothed indicator.

    Base points are drawn across the smoothing band, partners at distances
    log-uniform in ``[1e-3 eps, eps]``. Gradients are central differences
    with step ``1e-6 eps``. Pairs within 1e-8 of a seam of ``rho`` are
    rejected.
    """
    if samples < 1000:
        raise ValueError("lipschitz_probe needs at least 1000 samples")
    rng = np.random.default_rng(seed)
    eps = profile.epsilon
    A = profile.test_set
    d = A.dim
    x = sample_near_boundary(A, 2.0 * eps, samples, rng)
    dist = eps * 10.0 ** rng.uniform(-3.0, 0.0, samples)
    y = x + _unit_vectors(rng, samples, d) * dist[:, None]
    seams = A.seams()
    if isinstance(profile.base, TestSet) and not isinstance(profile.base, Empty):
        seams = np.concatenate([seams, profile.base.seams()])
    if len(seams):
        near = np.zeros(samples, dtype=bool)
        for s in seams:
            near |= np.linalg.norm(x - s, axis=1) < 1e-8
            near |= np.linalg.norm(y - s, axis=1) < 1e-8
        x, y, dist = x[~near], y[~near], dist[~near]

    def f(z):
        return np.asarray(smooth_indicator(profile, z))

    step = 1e-6 * eps
    m1 = np.max(np.abs(f(x) - f(y)) / dist)
    gx, gy = _fd_gradient(f, x, step), _fd_gradient(f, y, step)
    m2 = np.max(np.linalg.norm(gx - gy, axis=1) / dist)
    return LipschitzEstimate(float(m1), float(m2))


# assumption audit

@dataclass
class CheckTally:
    checked: int = 0
    violations: int = 0
    worst: float = 0.0
    witness: dict | None = None

    def record(self, excess, witnesses):
        """``excess > 0`` marks a violation; ``witnesses(i)`` describes entry ``i``."""
        excess = np.asarray(excess, dtype=float)
        self.checked += excess.size
        bad = excess > 0
        self.violations += int(np.count_nonzero(bad))
        if np.any(bad):
            i = int(np.argmax(excess))
            if excess[i] > self.worst:
                self.worst = float(excess[i])
                self.witness = witnesses(i)


AUDITED = ("A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8")


@dataclass
class AuditReport:
    trials: int
    seed: int
    kappa_override: float | None
    checks: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks[k].violations == 0 for k in AUDITED if k in self.checks)

    def violations(self, name):
        return self.checks[name].violations

    def to_dict(self):
        return {"trials": self.trials, "seed": self.seed,
                "kappa_override": self.kappa_override,
                "checks": {k: asdict(v) for k, v in self.checks.items()}, "ok": self.ok}


def _window(A, n, rng):
    """Random points spread over a neighbourhood of ``A``."""
    if isinstance(A, HalfSpace):
        z = 2.0 * rng.standard_normal((n, A.dim))
        return z + A.level * np.asarray(A.normal)
    if isinstance(A, Ball):
        return np.asarray(A.center) + (A.radius + 1.0) * rng.standard_normal((n, A.dim))
    lo, hi = A.intervals[0][0], A.intervals[-1][1]
    pad = 0.5 * (hi - lo) + 1.0
    return rng.uniform(lo - pad, hi + pad, n)[:, None]


def _scale_of(A):
    if isinstance(A, Ball):
        return A.radius
    if isinstance(A, IntervalUnion):
        return max(b - a for a, b in A.intervals) / 2
    return 2.0


def _segment_positive(A, x, y):
    """Whether the segment ``[x, y]`` stays inside ``{rho > 0}``."""
    if isinstance(A, HalfSpace):
        return np.ones(len(x), dtype=bool)
    if isinstance(A, Ball):
        c = np.asarray(A.center)
        v = y - x
        s = np.clip(np.sum((c - x) * v, axis=1) / np.maximum(np.sum(v * v, axis=1), 1e-300), 0, 1)
        closest = x + s[:, None] * v
        return np.linalg.norm(closest - c, axis=1) > A.radius
    lo, hi = np.minimum(x, y)[:, 0], np.maximum(x, y)[:, 0]
    ok = np.ones(len(x), dtype=bool)
    for a, b in A.intervals:
        ok &= ~((lo <= b) & (hi >= a))
    return ok


def _audit_set(A, n, rng, kappa, tally):
    d = A.dim
    x = _window(A, n, rng)
    near = rng.random(n) < 0.5
    y = np.where(near[:, None], x + 0.1 * _scale_of(A) * rng.standard_normal((n, d)), _window(A, n, rng))
    rx, ry = np.asarray(A.rho(x)), np.asarray(A.rho(y))
    desc = A.to_json()

    def wit(**kw):
        return lambda i: {"set": desc, **{k: np.asarray(v)[i].tolist() for k, v in kw.items()}}

    # A4: sign convention against an independent membership test
    inside = A.contains(x)
    tally["A4"].record(np.where(inside, rx, -rx) - _TOL, wit(x=x, rho=rx))

    # A5 and A6 (with A1: translates and scalings q >= 1 stay in the class)
    shifts = 2.0 * rng.standard_normal((n, d))
    qs = np.exp(rng.uniform(0.0, math.log(4.0), n))
    ex5, ex6 = np.empty(n), np.empty(n)
    a1 = np.zeros(n)
    for i in range(n):
        try:
            At, Aq = A.translate(shifts[i]), A.scale(qs[i])
        except ValueError:
            a1[i] = 1.0
            continue
        ex5[i] = abs(float(At.rho(x[i] + shifts[i])) - rx[i]) - _TOL * (1 + abs(rx[i]))
        ex6[i] = abs(float(Aq.rho(qs[i] * x[i]))) - qs[i] * abs(rx[i]) - _TOL * (1 + qs[i] * abs(rx[i]))
    tally["A1"].record(a1, wit(shift=shifts, q=qs))
    tally["A5"].record(np.where(a1 > 0, -1.0, ex5), wit(x=x, shift=shifts))
    tally["A6"].record(np.where(a1 > 0, -1.0, ex6), wit(x=x, q=qs))

    # A7: non-expansive on {rho >= 0}
    dist = np.linalg.norm(x - y, axis=1)
    both = (rx >= 0) & (ry >= 0)
    tally["A7"].record(np.abs(rx - ry)[both] - dist[both] - _TOL,
                       lambda i: wit(x=x[both], y=y[both])(i))

    # A8: gradient modulus on {rho > 0}, finite-difference gradients
    pos = (rx > 1e-6) & (ry > 1e-6) & (dist > 0)
    xp, yp = x[pos], y[pos]
    h = np.minimum(1e-6, 0.1 * np.minimum(rx[pos], ry[pos]))[:, None]
    gx = np.stack([(A.rho(xp + h * e) - A.rho(xp - h * e)) / (2 * h[:, 0]) for e in np.eye(d)], -1)
    gy = np.stack([(A.rho(yp + h * e) - A.rho(yp - h * e)) / (2 * h[:, 0]) for e in np.eye(d)], -1)
    lhs = np.linalg.norm(gx - gy, axis=1)
    rhs = kappa * dist[pos] / np.minimum(rx[pos], ry[pos])
    ex8 = lhs - rhs * (1 + 1e-6) - 1e-7
    w8 = wit(x=xp, y=yp, lhs=lhs, rhs=rhs)
    tally["A8"].record(ex8, w8)
    seg = _segment_positive(A, xp, yp)
    tally["A8-segment"].record(ex8[seg], lambda i: wit(x=xp[seg], y=yp[seg], lhs=lhs[seg], rhs=rhs[seg])(i))

    # A2: offsets stay in the class and match the sublevel set of rho
    scale = _scale_of(A)
    ts = rng.uniform(-1.2 * scale, 1.2 * scale, n)
    ex2 = np.empty(n)
    for i in range(n):
        B = A.offset(ts[i])
        member = isinstance(B, (Empty, FullSpace)) or (type(B) is type(A) and (
            not isinstance(A, IntervalUnion) or B.delta >= A.delta * (1 - 1e-12)))
        inB = bool(np.asarray(B.contains(x[i])).reshape(-1)[0])
        agree = inB == (rx[i] <= ts[i]) or abs(rx[i] - ts[i]) < _TOL
        ex2[i] = 0.0 if (member and agree) else 1.0
    tally["A2"].record(ex2 - 0.5, wit(x=x, t=ts))

    # A3: {rho_{A^{-e}} < e} lies inside A whenever A^{-e} is non-empty
    es = rng.uniform(0.0, 1.2 * scale, n)
    ex3 = np.full(n, -1.0)
    probes = np.empty((n, d))
    for i in range(n):
        B = A.offset(-es[i])
        if isinstance(B, Empty):
            probes[i] = x[i]
            continue
        z = sample_near_boundary(B, 2.0 * es[i], 1, rng)[0]
        probes[i] = z
        if float(np.asarray(B.rho(z)).reshape(-1)[0]) < es[i] - _TOL:
            ex3[i] = 0.0 if bool(np.asarray(A.contains(z)).reshape(-1)[0]) else 1.0
    tally["A3"].record(ex3 - 0.5, wit(z=probes, epsilon=es))


def assumption_audit(set_family, trials=10_000, seed=0, kappa_override=None):
    """Randomized property checks of the set-class assumptions.

    ``trials`` samples are spread over the family. ``kappa_override``
    replaces each set's ``kappa`` in the gradient-modulus check, e.g. to run
    a negative control. Besides the literal gradient-modulus check (``A8``),
    the report carries ``A8-segment``, the same inequality restricted to
    pairs whose connecting segment stays in ``{rho > 0}``.
    """
    if trials < 1000:
        raise ValueError("assumption_audit needs at least 1000 trials")
    family = list(set_family)
    if not family:
        raise ValueError("empty set family")
    rng = np.random.default_rng(seed)
    tally = {k: CheckTally() for k in AUDITED + ("A8-segment",)}
    counts = np.bincount(rng.integers(0, len(family), trials), minlength=len(family))
    for A, n in zip(family, counts):
        if n:
            kappa = A.kappa if kappa_override is None else kappa_override
            _audit_set(A, int(n), rng, kappa, tally)
    return AuditReport(trials=trials, seed=seed, kappa_override=kappa_override, checks=tally)


def random_family(kind, count, seed=0, d=2):
    """Random members of one variant; interval families start with ``FIGURE_SET``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        if kind == "halfspace":
            out.append(HalfSpace(_unit_vectors(rng, 1, d)[0], rng.normal()))
        elif kind == "ball":
            out.append(Ball(0.5 * rng.standard_normal(d), rng.uniform(0.3, 3.0)))
        elif kind == "interval_union":
            delta = rng.uniform(0.5, 3.0)
            k = int(rng.integers(1, 6))
            mids = rng.uniform(-3.0, 0.0) + np.concatenate(
                [[0.0], np.cumsum(delta + rng.exponential(delta / 2, k - 1))])
            gaps = np.diff(mids)
            room = np.minimum(np.concatenate([[np.inf], gaps]), np.concatenate([gaps, [np.inf]]))
            room = np.where(np.isfinite(room), room, 2 * delta)
            half = 0.45 * room * rng.uniform(0.1, 1.0, k)
            out.append(IntervalUnion(tuple(zip(mids - half, mids + half)), delta))
        else:
            raise ValueError(f"unknown family {kind!r}")
    if kind == "interval_union" and out:
        out[0] = FIGURE_SET
    return out


# interval-union perimeter

def interval_union_perimeter_bound(delta):
    """Upper bound ``16/sqrt(2 pi) + 4/delta`` on the generalized perimeter."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    return 16.0 / SQRT_2PI + 4.0 / delta


def _interval_mass(test_set, mu=0.0, sigma=1.0):
    if isinstance(test_set, Empty):
        return 0.0
    a, b = test_set.starts, test_set.ends
    return float(np.sum(special.ndtr((b - mu) / sigma) - special.ndtr((a - mu) / sigma)))


def interval_union_annulus_ratios(test_set, eps_grid, mu=0.0, sigma=1.0):
    """Rows ``(eps, outer/eps, inner/eps)`` of ``N(mu, sigma^2)`` annulus masses."""
    base = _interval_mass(test_set, mu, sigma)
    rows = []
    for e in eps_grid:
        outer = _interval_mass(test_set.offset(e), mu, sigma) - base
        inner = base - _interval_mass(test_set.offset(-e), mu, sigma)
        rows.append((float(e), outer / e, inner / e))
    return rows


def interval_union_annulus_sup(test_set, eps_grid):
    return max(max(o, i) for _, o, i in interval_union_annulus_ratios(test_set, eps_grid))
