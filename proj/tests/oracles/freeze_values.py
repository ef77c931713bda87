"""Independent high-precision reference values for the C++ tests.

Run with mpmath/scipy installed; prints the constants frozen in
tests/oracles/frozen.hpp.
"""
import itertools
import math

import mpmath as mp
from scipy import special, stats

mp.mp.dps = 40




def concentration(c, nodes=60):
    import numpy as np
    x, w = np.polynomial.legendre.leggauss(nodes)
    d = x[:, None] - x[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(d == 0, c / math.pi, np.sin(c * d) / (math.pi * d))
    sw = np.sqrt(w)
    a = sw[:, None] * k * sw[None, :]
    return float(np.linalg.eigvalsh(a)[-1])


def gauss_pmf(sigma, delta, m):
    sigma = mp.mpf(sigma)
    delta = mp.mpf(delta)
    cdf = lambda x: (1 + mp.erf(x / (sigma * mp.sqrt(2)))) / 2
    lo, hi = -m // 2, m // 2 - 1
    p = []
    for k in range(lo, hi + 1):
        a = -mp.inf if k == lo else (k - mp.mpf(1) / 2) * delta
        b = mp.inf if k == hi else (k + mp.mpf(1) / 2) * delta
        p.append(cdf(b) - cdf(a))
    return p


def h_max(p):
    return 2 * mp.log(sum(mp.sqrt(x) for x in p), 2)


def h_min(p):
    return -mp.log(max(p), 2)


def c_precise(dq, dp):
    return concentration(dq * dp / 8)


print("lambda0(1) =", repr(concentration(1.0)))
for c in (0.01, 0.5, 2.0, 5.0):
    print(f"lambda0({c}) =", repr(concentration(c)))

delta = 0.0155607
cv = c_precise(delta, delta)
print("c(delta) precise =", repr(cv), " -log2 =", repr(-math.log2(cv)))
print("c(delta) leading =", repr(delta * delta / (4 * math.pi)))
c2 = c_precise(14.45e-3, 14.45e-3)
print("c(14.45e-3) precise =", repr(c2), " -log2 =", repr(-math.log2(c2)))

p = gauss_pmf(1.0, delta, 4096)
hm, hn = h_max(p), h_min(p)
print("vacuum H_max =", mp.nstr(hm, 15), " H_min =", mp.nstr(hn, 15))
print("vacuum H_low precise =", mp.nstr(-mp.log(cv, 2) - hm, 15))

for db, loss in ((5.0, 0.0), (3.0, 0.33)):
    t = 1 - loss
    vc = t * 10 ** (-db / 10) + loss
    pc = gauss_pmf(math.sqrt(vc), delta, 4096)
    hl = -mp.log(cv, 2) - h_max(pc)
    print(f"squeezed {db} dB loss {loss}: H_low =", mp.nstr(hl, 15), " gain =",
          mp.nstr(hl / (-mp.log(cv, 2) - hm) - 1, 6))

print("h_max(.25,.25,.5) =", mp.nstr(h_max([mp.mpf(1) / 4, mp.mpf(1) / 4, mp.mpf(1) / 2]), 15))


def bayes_uniform(counts):
    m, n = len(counts), sum(counts)
    s = sum(mp.gamma(c + mp.mpf(3) / 2) / mp.gamma(c + 1) for c in counts)
    return 2 * mp.log(mp.gamma(n + m) / mp.gamma(n + m + mp.mpf(1) / 2) * s, 2)


print("bayes_up (0,0) =", mp.nstr(bayes_uniform([0, 0]), 15))
print("bayes_up (4,0) =", mp.nstr(bayes_uniform([4, 0]), 15))
print("bayes_up (0,) =", mp.nstr(bayes_uniform([0]), 15))
K = 2
pp = [mp.mpf(c + K) / (4 + 2 * K) for c in (3, 1)]
print("bayes_pp (3,1) K=2 =", mp.nstr(h_max(pp), 15))

print("secure_length =", math.floor(16000 * 7.0 - 2 * math.log2(1e10)))
print("monobit 60/40 =", repr(math.erfc(20 / 10 / math.sqrt(2))))

# Reference 100-bit sequence (binary expansion of pi) and the four tests.
eps = ("1100100100001111110110101010001000100001011010001100"
       "001000110100110001001100011001100010100010111000")
bits = [int(b) for b in eps]
n = len(bits)
s = sum(2 * b - 1 for b in bits)
print("nist monobit =", repr(math.erfc(abs(s) / math.sqrt(n) / math.sqrt(2))))
M = 10
N = n // M
chi = 4 * M * sum((sum(bits[i * M:(i + 1) * M]) / M - 0.5) ** 2 for i in range(N))
print("nist block_frequency M=10 =", repr(float(special.gammaincc(N / 2, chi / 2))))
pi_ = sum(bits) / n
v = 1 + sum(bits[i] != bits[i + 1] for i in range(n - 1))
print("nist runs =", repr(math.erfc(abs(v - 2 * n * pi_ * (1 - pi_)) / (2 * math.sqrt(2 * n) * pi_ * (1 - pi_)))))
z = max(abs(x) for x in itertools.accumulate(2 * b - 1 for b in bits))
Phi = stats.norm.cdf
s1 = sum(Phi((4 * k + 1) * z / math.sqrt(n)) - Phi((4 * k - 1) * z / math.sqrt(n))
         for k in range(int((-n / z + 1) / 4), int((n / z - 1) / 4) + 1))
s2 = sum(Phi((4 * k + 3) * z / math.sqrt(n)) - Phi((4 * k + 1) * z / math.sqrt(n))
         for k in range(int((-n / z - 3) / 4), int((n / z - 1) / 4) + 1))
print("nist cusum forward =", repr(1 - s1 + s2))

lo = stats.beta.ppf(0.005, 990, 11)
hi = stats.beta.ppf(0.995, 991, 10)
print("clopper-pearson =", repr(lo), repr(hi))
print("erf(1/sqrt2) =", repr(math.erf(1 / math.sqrt(2))))
