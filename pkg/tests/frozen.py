"""Reference values produced by ``oracles.py`` and frozen here.

Regenerate with the calls noted next to each value; ``test_oracles.py``
checks that the oracles still reproduce them.
"""

import math

# oracles.mills(x): mpmath quadrature of int_0^inf exp(-t x - t^2/2) dt
MILLS = {1.0: 0.6556795424187984, 10.0: 0.09902859647173193}

# oracles.inf_mills_grid(y): dense grid on [0, 20] plus mpmath refinement
INF_MILLS = {0.5: 1.1229908081086122, 0.25: 0.8892920997551895}

# oracles.c_quad(r): mpmath quadrature of |phi^{(r)}| split at the roots of He_r
C_R = {0: 1.0, 1: 0.7978845608028654, 2: 0.9678828980765734, 3: 1.5100130001304772}

# oracles.radial_moment(5, 2.0)
RADIAL_5_2 = 1.6941700746552468

# oracles.xi1_quad(1.0, 3, 0.5)
XI1_1_3_HALF = 1.2385259058518472

# oracles.k_of_p_grid(0.72): 10^6 + 1 point grid on [0, 1]
K_072 = 1.9809345192066161

# oracles.gamma_bar_brute(10, [0.72], geomspace(1e-3, sqrt(20) + 10, 10^4))
GAMMA_BAR_10_072 = 1.246323821920211
# same r grid, p = linspace(0.001, 1, 1000)
GAMMA_BAR_10_BRUTE = 1.17842787669115

# oracles.binomial_halfline_sup(n, arange(-256, 256) / 64)
BINOMIAL_SUP = {100: 0.039794618693589384, 400: 0.019934650981896465}

# oracles.ball_annulus_ratio(d, r, eps)
BALL_ANNULUS = {(3, math.sqrt(2), 1e-3): 0.587050457045946,
                (3, 1.0, 1e-4): 0.48396564449731944}

# oracles.interval_mass_quad([(-2, 0), (2, 5)])
FIGURE_MASS = 0.4999997133484282

# oracles.sublevel_intervals(figure_rho, -0.45)
FIGURE_EROSION_045 = ((-1.1, -0.9), (2.9, 4.1))

# oracles.figure_annulus_sup([2^-k for k = 1..12])
FIGURE_ANNULUS_SUP = 1.0138513979673007
