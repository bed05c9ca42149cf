# Mass of y^k |f|^2 dx dy / y^2 over (a, b) x (t1, inf), normalized by the Petersson
# norm, for the one-dimensional weights 12 and 26 (f = Delta, Delta E4^2 E6), by
# direct 2-D quadrature from integer q-expansions. Slow (~minutes).
import sys
import mpmath as mp

mp.mp.dps = 25
NT = 80


def series_mul(a, b):
    c = [0] * NT
    for i, x in enumerate(a):
        if x:
            for j in range(NT - i):
                c[i + j] += x * b[j]
    return c


def sigma(n, e):
    return sum(d**e for d in range(1, n + 1) if n % d == 0)


E4 = [1] + [240 * sigma(n, 3) for n in range(1, NT)]
E6 = [1] + [-504 * sigma(n, 5) for n in range(1, NT)]
D = [0, 1] + [0] * (NT - 2)
for n in range(1, NT):
    for _ in range(24):
        D = [D[i] - (D[i - n] if i >= n else 0) for i in range(NT)]

FORMS = {12: D, 26: series_mul(series_mul(series_mul(D, E4), E4), E6)}


def f(coeffs, z):
    q = mp.exp(2j * mp.pi * z)
    return mp.fsum(c * q**n for n, c in enumerate(coeffs) if c)


def integral(k, x0, x1, lower):
    c = FORMS[k]
    return mp.quad(lambda x: mp.quad(lambda y: y ** (k - 2) * abs(f(c, x + 1j * y)) ** 2, [lower(x), 1.2, 2, 4, 10]),
                   [x0, (x0 + x1) / 2, x1])


if __name__ == "__main__":
    k = int(sys.argv[1])
    a, b, t1 = (mp.mpf(s) for s in sys.argv[2:5])
    norm = 2 * integral(k, 0, mp.mpf(1) / 2, lambda x: mp.sqrt(1 - x * x))
    mass = integral(k, a, b, lambda x: t1)
    print(mp.nstr(norm, 20), mp.nstr(mass / norm, 20))
