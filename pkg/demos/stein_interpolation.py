"""Slepian interpolation and the derivative pairing bound at ``d = 1``.

Both sides of the interpolation identity are computed for a few smooth test
functions and Rademacher sums, then the pairing bound is checked on a random
suite and on the sign function, where it is attained.

Run with ``python3 demos/stein_interpolation.py``.
"""

from berry_esseen import stein as S


def main():
    for f in (S.sine(0.3), S.tanh_cubic(0.4), S.gaussian_bump(0.5)):
        for n in (4, 8, 12):
            c = S.slepian_identity_check(f, S.DiscreteSum(n))
            print(f"{f.name:>16} n={n:>2}: lhs {c.lhs:+.6e} rhs {c.rhs:+.6e} gap {c.gap:.1e}")

    ratios = []
    for f, r, u in S.pairing_suite(100, seed=0):
        chk = S.derivative_pairing_check(f, r, u)
        ratios.append(abs(chk.integral) / chk.bound)
    print(f"pairing suite: max |integral| / bound = {max(ratios):.4f}")
    sign = S.derivative_pairing_check(S.sign_function(), 1, [1.0])
    print(f"sign function, r=1: integral {sign.integral:.10f}, bound {sign.bound:.10f}")


if __name__ == "__main__":
    main()
