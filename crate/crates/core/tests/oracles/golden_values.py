"""Extended-precision oracle for the frozen golden values in the Rust tests.

Evaluates the closed-form expressions with mpmath at 50 significant digits,
independently of the f64 evaluation order used in the crate. Re-run with
`python3 golden_values.py` to regenerate.
"""
import mpmath as mp

mp.mp.dps = 50

E1 = mp.mpf(0)
E2 = mp.mpf(102697)
D0 = mp.mpf(1)

ROWS = {
    "a": (mp.mpf(250), mp.mpf(25), mp.mpf("1.25e7"), mp.mpf("-0.052")),
    "b": (mp.mpf(250), mp.mpf(9), mp.mpf("1.25e7"), mp.mpf("-0.144")),
    "c": (mp.mpf(300), mp.mpf("0.25"), mp.mpf("1.15e7"), mp.mpf("-5.170")),
    "d": (mp.mpf(250), mp.mpf("0.09"), mp.mpf("1.05e7"), mp.mpf("-14.281")),
}


def b1(c1_sq):
    return -1 / (4 * mp.pi * c1_sq)


def t1(z, row):
    _, c1_sq, d, b2 = row
    zeta = mp.mpc(z) - E1
    n = (d**2 + zeta**2) / zeta**2
    den = (-mp.pi * 1j + mp.log(zeta / D0) + d**2 * mp.log(d / D0) / zeta**2
           - mp.pi * d / (2 * zeta) - (b2 / b1(c1_sq)) * n)
    return b1(c1_sq) * n / den


def bracket_naive(w, row):
    _, c1_sq, d, b2 = row
    r = b2 / b1(c1_sq)
    return mp.log(w / D0) + d**2 / w**2 * mp.log(d / D0) - mp.pi * d / (2 * w) - r * (d**2 + w**2) / w**2


def terms(w, row):
    im_lambda, c1_sq, d, b2 = row
    r = b2 / b1(c1_sq)
    bb = bracket_naive(w, row)
    f = (d**2 + w**2) / (4 * mp.pi * c1_sq * w**4) / (mp.pi**2 + bb**2)
    de = 0 - f * (w**2 * mp.log(w / D0) + d**2 * mp.log(d / D0) - mp.pi / 2 * d * w - r * (d**2 + w**2))
    g = 2 * (im_lambda + mp.pi * w**2 * f)
    return f, de, g


def density(w, row):
    f, de, g = terms(w, row)
    return f / (2 * mp.pi) / ((w + E1 - E2 - de)**2 + g**2 / 4)


def kernel(z, row):
    _, c1_sq, d, _ = row
    zeta = mp.mpc(z) - E1
    g = lambda w: w**2 / (d**2 + w**2) / (zeta - w)**2
    return 4 * mp.pi * c1_sq * mp.quad(g, [0, d, 10 * d, mp.inf])


def show(name, v):
    if isinstance(v, mp.mpc):
        print(f"{name}: re = {mp.nstr(v.real, 20)}, im = {mp.nstr(v.imag, 20)}")
    else:
        print(f"{name}: {mp.nstr(v, 20)}")


if __name__ == "__main__":
    show("t1 row c, z = e2 + 100i", t1(E2 + 100j, ROWS["c"]))
    f, de, g = terms(mp.mpf(102697), ROWS["a"])
    show("f row a, w = 102697", f)
    show("delta_e row a, w = 102697", de)
    show("gamma row a, w = 102697", g)
    show("density row a, w = e2 - e1", density(E2 - E1, ROWS["a"]))
    for k, row in ROWS.items():
        show(f"bracket row {k}, w = 102697", bracket_naive(mp.mpf(102697), row))
        show(f"bracket row {k}, w = 97697", bracket_naive(mp.mpf(97697), row))
    a = ROWS["a"]
    show("kernel row a, z = e1 + i d", kernel(E1 + 1j * a[2], a))
    show("kernel row a, z = e1 + 1e3 i d", kernel(E1 + 1e3j * a[2], a))
