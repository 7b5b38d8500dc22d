#!/usr/bin/env python3
"""Independent reference values for the C++ test suites.

Every number frozen into tests/*.cpp that is not a closed form comes from
this script. The routes here (quadrature, brute-force series, Monte Carlo,
scipy/mpmath) share no code with the library.

Run:  python3 tests/oracles/compute_oracles.py
"""
import math

import mpmath as mp
import numpy as np
from scipy import integrate, optimize, stats

mp.mp.dps = 40


def normal_tail_quad(z):
    """P(Z > z) by adaptive quadrature of the standard normal density."""
    f = lambda t: math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)
    val, _ = integrate.quad(f, z, 40.0, epsabs=1e-15, epsrel=1e-14, limit=200)
    return val


def section(title):
    print()
    print("==", title)


section("normal tail / inverse")
q = normal_tail_quad(1.2816)
print("normal_tail(1.2816)        =", repr(q))
zinv = optimize.bisect(lambda z: normal_tail_quad(z) - 0.1, 0.0, 5.0, xtol=1e-15)
print("normal_tail_inv(0.1)       =", repr(zinv))

section("noncentral chi-square k=2, lambda=4")
t10 = -2.0 * math.log(0.1)
exact = float(mp.quad(lambda s: 0.5 * mp.exp(-(s + 4) / 2) * mp.besseli(0, mp.sqrt(4 * s)), [t10, mp.inf]))
print("chisq_tail(2,4,4.60517..)  =", repr(exact), " (quadrature of the ncx2 density)")
print("  scipy ncx2.sf            =", repr(stats.ncx2.sf(t10, 2, 4)))
rng = np.random.default_rng(20240601)
draws = 10_000_000
hits = 0
for _ in range(10):
    z = rng.standard_normal((draws // 10, 2))
    z[:, 0] += 2.0
    hits += int(np.count_nonzero((z * z).sum(axis=1) > t10))
p_mc = hits / draws
se = math.sqrt(p_mc * (1 - p_mc) / draws)
print("  MC 1e7 draws             =", p_mc, "+/- 3se", 3 * se)
tstar = optimize.brentq(lambda t: stats.ncx2.sf(t, 2, 4) - 0.1, 1.0, 40.0, xtol=1e-14)
print("chisq_tail_inv(2,4,0.1)    =", repr(tstar))
print("  MC check: P(X > t*)      =", end=" ")
z = np.random.default_rng(7).standard_normal((2_000_000, 2))
z[:, 0] += 2.0
print(np.mean((z * z).sum(axis=1) > tstar))

section("misc noncentral chi-square values")
for (k, lam, t) in [(5, 3, None), (3, 10.0, 12.0), (10, 50.0, 40.0), (1, 0.5, 2.0), (50, 200.0, 300.0), (2, 1640.0, 1700.0)]:
    if t is None:
        continue
    val = float(mp.quad(lambda s: 0.5 * mp.exp(-(s + lam) / 2) * (s / lam) ** (mp.mpf(k) / 4 - mp.mpf(1) / 2)
                        * mp.besseli(mp.mpf(k) / 2 - 1, mp.sqrt(lam * s)), [t, t + 50, mp.inf]))
    print(f"chisq_tail(k={k}, lam={lam}, t={t}) = {val!r}   scipy {stats.ncx2.sf(t, k, lam)!r}")

section("normal approximation to the chi-square quantile, lambda = 0, p = 0.1")
for k in (10, 100, 1000):
    approx = math.sqrt(2 * k) * zinv + k
    gap = abs(stats.chi2.sf(approx, k) - 0.1)
    print(f"k={k}: approx={approx!r} prob-gap={gap!r}")

section("Bessel / von Mises-Fisher")
def i1_series(x):
    s = mp.mpf(0)
    for m in range(200):
        s += (mp.mpf(x) / 2) ** (2 * m + 1) / (mp.factorial(m) * mp.factorial(m + 1))
    return s
print("log I_1(2) (series)        =", repr(float(mp.log(i1_series(2)))))
print("log I_0.5(1)               =", repr(float(mp.log(mp.sqrt(2 / mp.pi) * mp.sinh(1)))))
for order, tau in [(0, 50.0), (3.5, 0.01), (10, 1e4), (31, 500.0), (0.5, 700.0), (2.5, 30.0)]:
    print(f"log I_{order}({tau})            =", repr(float(mp.log(mp.besseli(order, tau)))))

def log_ck(k, tau):
    nu = mp.mpf(k) / 2 - 1
    return float((nu) * mp.log(tau) - (mp.mpf(k) / 2) * mp.log(2 * mp.pi) - mp.log(mp.besseli(nu, tau)))
print("log c_3(1)                 =", repr(log_ck(3, 1)))
print("log c_3(2)                 =", repr(log_ck(3, 2)))
print("log c_3 closed form at 1   =", repr(float(mp.log(1 / (4 * mp.pi * mp.sinh(1))))))
print("log c_2(0) limit           =", repr(-math.log(2 * math.pi)))
print("log c_3(0) limit           =", repr(-math.log(4 * math.pi)))
print("log c_10(7.5)              =", repr(log_ck(10, 7.5)))

# Lemma 1 radius: k=3, Delta=2, rho=1, |x|=2, T=0.5.
# target = log T + log c_3(Delta*rho*|x|) ; solve c_3(Delta*r) = target with closed form
c3 = lambda tau: mp.log(tau / (4 * mp.pi * mp.sinh(tau)))
target = mp.log(0.5) + c3(mp.mpf(4))
tau = mp.findroot(lambda s: c3(s) - target, 5)
print("bayes radius (k=3,D=2,rho=1,|x|=2,T=0.5) =", repr(float(tau / 2)))

section("detector curves")
lrt = stats.norm.sf(2 - zinv)
print("lrt p_md(delta=2, pfa=0.1) =", repr(lrt))
print("glrt p_md(k=2,d=2,0.1)     =", repr(1 - stats.ncx2.sf(t10, 2, 4)))
for k, d in [(8, 3)]:
    thr = stats.chi2.isf(0.1, k)
    print(f"glrt p_md(k={k},d={d},0.1)   =", repr(1 - stats.ncx2.sf(thr, k, d * d)))


def umm_pmd_quadrature(pfa, delta, rho, k, npts=200000, seed=3):
    """Miss probability of the training rule averaged over X ~ N(mu1, I/rho).
    Conditional on X the two noncentralities are tied by the angle; evaluate
    by MC over X in numpy as an independent route."""
    r = np.random.default_rng(seed)
    x = r.standard_normal((npts, k)) / math.sqrt(rho)
    x[:, 0] += delta
    th0 = (rho * rho) * (x * x).sum(axis=1)
    m1 = np.zeros(k); m1[0] = delta
    th1 = ((rho * x + m1) ** 2).sum(axis=1)
    thr = stats.ncx2.isf(pfa, k, th0)
    vals = 1.0 - stats.ncx2.sf(thr, k, th1)
    return vals.mean(), vals.std(ddof=1) / math.sqrt(npts)

for rho in (1, 5, 20):
    m, s = umm_pmd_quadrature(0.1, 2.0, rho, 2)
    print(f"umm_pmd(0.1, 2, rho={rho}, 2) = {m!r} +/- {s!r}")

section("region radii, Fig. 2 setting")
for rho in (0, 1, 5, 20):
    print(f"rho={rho}: radius = {math.sqrt(stats.ncx2.isf(0.1, 2, 4 * rho * rho)) if rho else math.sqrt(t10)!r}")

section("asymptotics")
E = lambda D, rho, k: D * D * (1 + 2 * rho) / math.sqrt(2 * k * (1 + 2 * rho) + 4 * (1 + rho) ** 2 * D * D)
print("hardness(2,0,2)            =", repr(E(2, 0, 2)))
print("hardness(4,0,128)          =", repr(E(4, 0, 128)))
print("allocate E_n(a=10,k=100,rho=1) =", repr(10 * 3 / (2 * math.sqrt(200 * 3 + 8 * 10))))
# smallest n with hardness(sqrt(n)*1, 0, 128) >= 1 : n^2 = 2k + 4n  -> n = 2 + sqrt(4 + 2k)
root = optimize.brentq(lambda n: E(math.sqrt(n), 0, 128) - 1, 1, 1000, xtol=1e-14)
print("blocklength root (k=128)   =", repr(root), "ceil", math.ceil(root))

section("high-dimension gap, rho = 0, d^2 = sqrt(2k), p_fa = 0.1")
for k in (128, 500, 1000, 2000, 5000):
    d2 = math.sqrt(2 * k)
    thr = stats.chi2.isf(0.1, k)
    pmd = 1 - stats.ncx2.sf(thr, k, d2)
    e = E(math.sqrt(d2), 0, k)
    pmd_curve = stats.norm.sf(e - zinv)
    # Chebyshev distance to the curve Q^-1(a)+Q^-1(b)=e
    f = lambda s: max(abs(0.1 - stats.norm.sf(s)), abs(pmd - stats.norm.sf(e - s)))
    res = optimize.minimize_scalar(f, bounds=(zinv - 1, zinv + 1), method="bounded", options={"xatol": 1e-12})
    print(f"k={k}: E={e:.6f} exact pmd={pmd:.6f} curve pmd={pmd_curve:.6f} "
          f"vertical gap={abs(pmd - pmd_curve):.6f} chebyshev gap={res.fun:.6f}")

section("discrete / AR")
p = np.array([1 / 3, 1 / 3, 1 / 3])
pe = np.array([0.5, 0.3, 0.2])
print("pearson                    =", repr(30 * float(((pe - p) ** 2 / p).sum())))
phi1, phi2, s2 = 0.5, -0.3, 1.0
g0 = (1 - phi2) * s2 / ((1 + phi2) * ((1 - phi2) ** 2 - phi1 ** 2))
g1 = phi1 * g0 / (1 - phi2)
g2 = phi1 * g1 + phi2 * g0
print("AR(2) (0.5,-0.3) gamma0..2 =", repr(g0), repr(g1), repr(g2))
r = np.random.default_rng(11)
nsim = 1_000_000
e = r.standard_normal(nsim + 1000)
y = np.zeros_like(e)
for t in range(2, len(e)):
    y[t] = phi1 * y[t - 1] + phi2 * y[t - 2] + e[t]
y = y[1000:]
emp = [float(np.mean(y[: len(y) - h] * y[h:])) for h in range(3)]
print("AR(2) MC autocov           =", emp)
