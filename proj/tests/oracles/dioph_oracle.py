"""Independent brute-force oracle for Diophantine constants and divisor sums.

Uses mpmath at 50 digits; the values printed here are frozen into the C++ tests.
"""
import itertools
import mpmath as mp

mp.mp.dps = 50


def c0_scan(omega, gamma, sigma, kmax):
    best = None
    m = len(omega)
    for k in itertools.product(range(-kmax, kmax + 1), repeat=m):
        if all(v == 0 for v in k):
            continue
        a = sum(ki * wi for ki, wi in zip(k, omega)) * gamma
        d = abs(a - mp.nint(a))
        val = d * mp.mpf(max(abs(v) for v in k)) ** sigma
        if best is None or val < best[0]:
            best = (val, k, d)
    return best


def divisor_sum(omega, gamma, nu):
    m = len(omega)
    total = mp.mpf(0)
    for k in itertools.product(range(-nu, nu + 1), repeat=m):
        if all(v == 0 for v in k):
            continue
        for l in range(-nu, nu + 1):
            if sum(abs(v) for v in k) + abs(l) > nu:
                continue
            a = sum(ki * wi for ki, wi in zip(k, omega)) * gamma + l
            total += 1 / a**2
    return total


if __name__ == "__main__":
    s2 = mp.sqrt(2)
    # 1-D scan: only k > 0 needed by symmetry.
    best = None
    for k in range(1, 10001):
        a = k * s2
        v = abs(a - mp.nint(a)) * k
        if best is None or v < best[0]:
            best = (v, k)
    print("m=1 sqrt2 sigma=1 K=1e4:", mp.nstr(best[0], 20), "at k", best[1])
    best = None
    for k in range(1, 10001):
        a = k * s2
        v = abs(a - mp.nint(a)) * mp.mpf(k) ** mp.mpf("1.01")
        if best is None or v < best[0]:
            best = (v, k)
    print("m=1 sqrt2 sigma=1.01 K=1e4:", mp.nstr(best[0], 20), "at k", best[1])
    # tail behaviour toward the Markov constant
    best = None
    for k in range(3, 10001):
        a = k * s2
        v = abs(a - mp.nint(a)) * k
        if best is None or v < best[0]:
            best = (v, k)
    print("m=1 sqrt2 sigma=1 k>=3:", mp.nstr(best[0], 20), "at k", best[1])
    b = c0_scan([mp.mpf(1), s2], mp.sqrt(3) - 1, mp.mpf("2.01"), 200)
    print("m=2 (1,sqrt2) gamma=sqrt3-1 sigma=2.01 K=200:", mp.nstr(b[0], 20), b[1], mp.nstr(b[2], 20))
    for nu in (1, 5, 10, 50):
        print("divisor_sum nu=%d:" % nu, mp.nstr(divisor_sum([mp.mpf(1)], s2, nu), 20))
