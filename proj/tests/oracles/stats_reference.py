"""Independent reference values for the statistics tests (scipy based).

Run once; the printed numbers are frozen into tests/unit/stats_test.cpp and
the acceptance suite.
"""
import math

from scipy import stats


def steiger_z(r13, r23, r12, n):
    # Steiger (1980) Z* with pooled r-bar in the asymptotic covariance.
    z13, z23 = math.atanh(r13), math.atanh(r23)
    rbar = (r13 + r23) / 2.0
    psi = r12 * (1 - 2 * rbar**2) - 0.5 * rbar**2 * (1 - 2 * rbar**2 - r12**2)
    c = psi / (1 - rbar**2) ** 2
    z = (z13 - z23) * math.sqrt(n - 3) / math.sqrt(2 - 2 * c)
    return z, 2 * stats.norm.sf(abs(z))


def power(n, d, alpha, tails):
    df = 2 * n - 2
    nc = d * math.sqrt(n / 2.0)
    if tails == 1:
        tc = stats.t.ppf(1 - alpha, df)
        return stats.nct.sf(tc, df, nc)
    tc = stats.t.ppf(1 - alpha / 2, df)
    return stats.nct.sf(tc, df, nc) + stats.nct.cdf(-tc, df, nc)


def min_n(d, alpha, target, tails):
    n = 2
    while power(n, d, alpha, tails) < target:
        n += 1
    return n


if __name__ == "__main__":
    print("steiger(.5,.19,.3,3358) =", steiger_z(0.5, 0.19, 0.3, 3358))
    for tails in (1, 2):
        n = min_n(0.5, 0.05, 0.80, tails)
        print(f"tails={tails} min_n={n} power(n-1)={power(n-1,.5,.05,tails)!r} power(n)={power(n,.5,.05,tails)!r}")
    for d in (0.2, 0.8, 1.0, 2.0):
        print(f"d={d} one={min_n(d,.05,.8,1)} two={min_n(d,.05,.8,2)}")
    for t, df, nc in [(1.5, 10, 1.0), (-0.7, 5, 0.5), (2.0, 100, 2.5), (3.0, 30, -1.0), (0.0, 3, 2.0), (1.6577, 100, 3.5355)]:
        print(f"nct.cdf({t},{df},{nc}) = {stats.nct.cdf(t, df, nc)!r}")
    for t, df in [(2.0, 5), (-1.3, 12), (0.5, 1)]:
        print(f"t.cdf({t},{df}) = {stats.t.cdf(t, df)!r}")
    for r in (0.10, 0.11, 0.13, 0.14, 0.17, 0.176):
        tt = r * math.sqrt(348) / math.sqrt(1 - r * r)
        print(f"r={r} n=350 p={2*stats.t.sf(tt, 348)!r}")
    print("fisher_ind(.5,.19,3358,3358) =", (math.atanh(.5) - math.atanh(.19)) / math.sqrt(2 / 3355))
    # pooled t from summaries
    for m1, s1, n1, m2, s2, n2 in [(.31, .56, 61, -.29, .93, 66), (.22, .93, 68, -.22, .66, 67)]:
        sp = math.sqrt(((n1 - 1) * s1**2 + (n2 - 1) * s2**2) / (n1 + n2 - 2))
        d = (m1 - m2) / sp
        t = d / math.sqrt(1 / n1 + 1 / n2)
        se = math.sqrt((n1 + n2) / (n1 * n2) + d * d / (2 * (n1 + n2)))
        print(f"t={t!r} d={d!r} p1={stats.t.sf(t, n1+n2-2)!r} p2={2*stats.t.sf(t, n1+n2-2)!r} ci=({d-1.959963984540054*se!r},{d+1.959963984540054*se!r})")
