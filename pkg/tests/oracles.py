"""Independent reference computations.

Nothing here imports the package. Values are computed with mpmath at 30
digits or by brute force, and the results are frozen in ``frozen.py``;
``test_oracles.py`` re-derives them so the frozen numbers stay reproducible.
"""

import math

import mpmath as mp
import numpy as np
from scipy import integrate, special

mp.mp.dps = 30


def mills(x):
    # second form: int_0^inf exp(-t x - t^2/2) dt
    return mp.quad(lambda t: mp.exp(-t * x - t * t / 2), [0, mp.inf])


def inf_mills_grid(y, hi=20.0, n=2_000_001):
    """Dense grid on [0, hi] followed by a local mpmath refinement."""
    x = np.linspace(0.0, hi, n)
    vals = x * y + math.sqrt(math.pi / 2) * special.erfcx(x / math.sqrt(2))
    i = int(np.argmin(vals))
    if i == 0:
        return float(mills(0))
    f = lambda t: t * y + mills(t)
    xm = mp.findroot(lambda t: mp.diff(f, t), x[i])
    return float(f(xm))


def c_quad(r):
    he = {0: lambda z: 1, 1: lambda z: z, 2: lambda z: z * z - 1, 3: lambda z: z ** 3 - 3 * z}[r]
    roots = {0: [], 1: [0], 2: [-1, 1], 3: [-mp.sqrt(3), 0, mp.sqrt(3)]}[r]
    pts = [-mp.inf] + roots + [mp.inf]
    return float(mp.quad(lambda z: abs(he(z)) * mp.npdf(z), pts))


def radial_moment(d, r):
    return float(mp.quad(lambda t: t ** (d - 1) * mp.exp(-t * t / 2), [0, r]))


def xi1_quad(r, d, p):
    """From the mass form ``int_0^r + (1-p) int_r^inf`` rearranged."""
    inner = mp.quad(lambda t: t ** (d - 1) * mp.exp(-t * t / 2), [0, r])
    outer = mp.quad(lambda t: t ** (d - 1) * mp.exp(-t * t / 2), [r, mp.inf])
    total = inner + outer
    return float(mp.exp(r * r / 2) / r ** (d - 1) * ((1 - p) * total + p * inner))


def gamma_bar_brute(d, p_values, r_values):
    """Brute-force grid over (r, p) using scipy.special.gammainc."""
    a = d / 2
    r = np.asarray(r_values)[None, :]
    p = np.asarray(p_values)[:, None]
    full = 2 ** (a - 1) * special.gamma(a)
    inner = full * special.gammainc(a, r * r / 2)
    h = np.exp(r * r / 2) / r ** d * ((1 - p) / p * full + inner)
    m = h.min(axis=1)
    if np.any(p_values == 1.0):
        m = np.where(np.asarray(p_values) == 1.0, np.minimum(m, 1.0 / d), m)
    x = np.linspace(0, 40, 400_001)
    R = math.sqrt(math.pi / 2) * special.erfcx(x / math.sqrt(2))
    I = np.array([np.min(x * mm + R) for mm in m])
    g = 1.0 / (np.asarray(p_values) * I)
    return float(g.min()), float(np.asarray(p_values)[np.argmin(g)])


def k_of_p_grid(p, n=1_000_001):
    x = np.linspace(0, 1, n)
    vals = (1 - p) / p * math.sqrt(2 * math.pi) * np.exp(x * x / 2) + \
        math.sqrt(math.pi / 2) * special.erfcx(x / math.sqrt(2))
    return float(vals.min())


def binomial_halfline_sup(n, levels):
    """Exact sup |P(S_n/sqrt n <= t) - Phi(t)| over ``levels`` with integer arithmetic."""
    atoms = [(2 * k - n) / math.sqrt(n) for k in range(n + 1)]
    best = 0.0
    for t in levels:
        count = sum(math.comb(n, k) for k in range(n + 1) if atoms[k] <= t)
        prob = mp.mpf(count) / 2 ** n
        best = max(best, float(abs(prob - mp.ncdf(t))))
    return best


def ball_annulus_ratio(d, r, eps):
    """(1/eps) N(0, I_d){r < |x| <= r + eps} via mpmath incomplete gamma."""
    a = mp.mpf(d) / 2
    hi = mp.gammainc(a, 0, (r + eps) ** 2 / 2, regularized=True)
    lo = mp.gammainc(a, 0, mp.mpf(r) ** 2 / 2, regularized=True)
    return float((hi - lo) / eps)


def interval_mass_quad(intervals):
    return sum(integrate.quad(lambda z: math.exp(-z * z / 2) / math.sqrt(2 * math.pi), a, b,
                              epsabs=1e-14, epsrel=1e-13)[0] for a, b in intervals)


def nearest_point_ball(center, radius, x, cloud=200_000, seed=0):
    """Signed distance to a ball from a random boundary point cloud."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((cloud, len(center)))
    pts = np.asarray(center) + radius * v / np.linalg.norm(v, axis=1, keepdims=True)
    dist = np.min(np.linalg.norm(pts - x, axis=1))
    inside = np.linalg.norm(np.asarray(x) - center) <= radius
    return -dist if inside else dist


def figure_rho(x):
    """The two-interval example written out branch by branch."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    left, right = x < -2, x > 5
    bridge = (x > 0) & (x < 2)
    in1 = (x >= -2) & (x <= 0)
    in2 = (x >= 2) & (x <= 5)
    out[left] = -2 - x[left]
    out[right] = x[right] - 5
    out[bridge] = 0.5 * (1 - (x[bridge] - 1) ** 2)
    out[in1] = -0.5 * (1 - np.abs(x[in1] + 1))
    out[in2] = -0.5 * (1.5 - np.abs(x[in2] - 3.5))
    return out


def sublevel_intervals(rho, t, lo=-12.0, hi=12.0, step=1e-5):
    """Endpoints of ``{rho <= t}`` from a dense scan refined by bisection."""
    from scipy.optimize import brentq
    x = np.arange(lo, hi + step, step)
    inside = rho(x) <= t
    flips = np.flatnonzero(np.diff(inside.astype(int)))
    f = lambda z: float(rho(np.array([z]))[0]) - t
    ends = [brentq(f, x[i], x[i + 1], xtol=1e-14) for i in flips]
    if inside[0] or inside[-1]:
        raise ValueError("sublevel set reaches the scan window")
    return list(zip(ends[0::2], ends[1::2]))


def figure_annulus_sup(eps_grid):
    base = interval_mass_quad([(-2, 0), (2, 5)])
    best = 0.0
    for e in eps_grid:
        outer = interval_mass_quad(sublevel_intervals(figure_rho, e)) - base
        inner_set = sublevel_intervals(figure_rho, -e) if e < 0.75 else []
        inner = base - interval_mass_quad(inner_set)
        best = max(best, outer / e, inner / e)
    return best
