"""Independent reference values for the unit tests (mpmath, 30 digits).

Run: python3 tests/oracles/oracles.py
The printed numbers are pasted into the doctest files as frozen constants.
"""
from mpmath import mp, mpf, quad, sin, cos, exp, pi, erf, sqrt, log

mp.dps = 30
R = mpf(1)


def normalised(shape):
    z = quad(shape, [0, R])
    return lambda r: shape(r) / (2 * z)


def gauss(c, s):
    mass = (erf((R - c) / (s * sqrt(2))) - erf(-c / (s * sqrt(2)))) / 2
    return lambda r: exp(-((r - c) / s) ** 2 / 2) / (s * sqrt(2 * pi) * mass)


xi = mpf("0.25")
kernels = {
    "uniform": normalised(lambda r: mpf(1)),
    "exponential": normalised(lambda r: exp(-r / xi)),
    "peak": normalised(lambda r: (r / xi) * exp(-(r / xi) ** 2 / 2)),
}
g1, g2 = gauss(mpf("0.05"), mpf("0.02")), gauss(mpf("0.8"), mpf("0.02"))
kernels["twopoint"] = normalised(lambda r: mpf(8) / 18 * g1(r) + mpf(1) / 18 * g2(r))


def pts(name):
    return [0, mpf("0.05"), mpf("0.8"), R] if name == "twopoint" else [0, R]


def M(w, name, n, L):
    return quad(lambda r: sin(2 * pi * n * r / L) * w(r), pts(name))


def c1(w, name):
    return quad(lambda r: r * w(r), pts(name))


for name, w in kernels.items():
    print(f"{name}: omega(0.5) = {mp.nstr(w(mpf('0.5')), 20)}")
    print(f"{name}: c = {mp.nstr(c1(w, name), 20)}")
    for L in (3, 5):
        for n in (1, 2, 3):
            print(f"{name}: L={L} M_{n} = {mp.nstr(M(w, name, n, L), 20)}")

w = kernels["uniform"]
for L in (3, 5, 10):
    for n in (1, 2):
        Mn, M2n = M(w, "uniform", n, L), M(w, "uniform", 2 * n, L)
        an = n * pi / (L * Mn)
        a3 = (pi * n / L) ** 3 / (4 * Mn ** 2 * (2 * Mn - M2n))
        b = (pi * n / L) ** 2 / (2 * (2 * Mn ** 2 - Mn * M2n))
        print(f"uniform L={L} n={n}: alpha_n = {mp.nstr(an, 20)} alpha3 = {mp.nstr(a3, 20)}"
              f" projected = {mp.nstr(a3 * (Mn - M2n) / Mn, 20)} b = {mp.nstr(b, 20)}")
        lam = [(2 * k * pi / L) ** 2 * (mpf(n) / k * M(w, "uniform", k, L) / Mn - 1) for k in (1, 2, 3)]
        print(f"  lambda_1..3 = {[mp.nstr(x, 20) for x in lam]}")

# no-flux first-order profile, uniform kernel, L = 5, ubar = 1
c = c1(w, "uniform")
L = mpf(5)
u0 = -c * (L - R) / L
G = lambda t: quad(w, [t, R])
for x in ("0", "0.25", "0.5", "1", "2.5"):
    x = mpf(x)
    y = min(x, L - x)
    val = u0 + (quad(lambda s: G(abs(R - 2 * s)), [0, y]) if y < R else c)
    print(f"u1({x}) = {mp.nstr(val, 20)}")

# exponential kernel plateau at L = 5, ubar = 2
we = kernels["exponential"]
ce = c1(we, "exponential")
print(f"exponential plateau L=5 ubar=2: {mp.nstr(4 * R * ce / 5, 20)}"
      f" boundary {mp.nstr(-4 * ce * 4 / 5, 20)}")

# entropy of u = ubar on a periodic domain: L*(D ubar ln ubar - alpha ubar^2 c)
for ub in ("1", "2"):
    ub = mpf(ub)
    print(f"entropy ubar={ub} L=5 D=1 alpha=1: {mp.nstr(5 * (ub * log(ub) - ub ** 2 * c), 20)}")
