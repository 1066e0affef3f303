"""Independent high-precision reference values frozen into the unit tests.

Run with `python3 tests/oracles/oracles.py`; every printed value appears
verbatim in a test file.
"""
import mpmath as mp

mp.mp.dps = 40


def chi(alpha, x, cp, cm):
    sgn = mp.sign(x)
    if alpha == 1:
        return mp.mpc(0.5 * mp.pi * (cp + cm), sgn * (cp - cm) * mp.log(abs(x)))
    g = mp.gamma(2 - alpha) / (1 - alpha)
    return g * mp.mpc((cp + cm) * mp.cos(mp.pi * alpha / 2), -sgn * (cp - cm) * mp.sin(mp.pi * alpha / 2))


def stable_cf(alpha, x, cp, cm):
    return mp.exp(-abs(x) ** alpha * chi(alpha, x, cp, cm))


def standard(alpha, cp, cm):
    if alpha == 1:
        return 0.5 * mp.pi * (cp + cm), (cp - cm) / (cp + cm)
    s_a = (cp + cm) * mp.gamma(2 - alpha) * mp.cos(mp.pi * alpha / 2) / (1 - alpha)
    return s_a ** (1 / mp.mpf(alpha)), (cp - cm) / (cp + cm)


def show(name, v):
    if isinstance(v, mp.mpc):
        print(f"{name} = {mp.nstr(v.real, 17)} {mp.nstr(v.imag, 17)}")
    else:
        print(f"{name} = {mp.nstr(v, 17)}")


def pdf_quad(f, a, b):
    return mp.quad(f, [a, b])


if __name__ == "__main__":
    a = mp.mpf
    show("chi(0.8, 1.3, 0.7, 0.3)", chi(a("0.8"), a("1.3"), a("0.7"), a("0.3")))
    show("chi(0.8, -1.3, 0.7, 0.3)", chi(a("0.8"), a("-1.3"), a("0.7"), a("0.3")))
    show("chi(1.5, 2, 1, 0.3)", chi(a("1.5"), a(2), a(1), a("0.3")))
    show("chi(1, 2, 0.7, 0.3)", chi(1, a(2), a("0.7"), a("0.3")))
    show("chi(1, -0.5, 0.2, 0.6)", chi(1, a("-0.5"), a("0.2"), a("0.6")))
    show("psi(0.8, 1, 0.7, 0.3)", stable_cf(a("0.8"), a(1), a("0.7"), a("0.3")))
    show("psi(1.5, -0.5, 1, 0.3)", stable_cf(a("1.5"), a("-0.5"), a(1), a("0.3")))
    for alpha, cp, cm in [("0.5", "1", "0"), ("1.5", "1", "0.3"), ("1", "0.5", "0.5")]:
        s, b = standard(1 if alpha == "1" else a(alpha), a(cp), a(cm))
        show(f"sigma({alpha},{cp},{cm})", s)
        show(f"beta({alpha},{cp},{cm})", b)
    # Student-t tail constant 2 G((v+1)/2) v^(v/2 - 1) / (sqrt(pi) G(v/2)).
    for v in [3, a("1.5")]:
        c = 2 * mp.gamma((v + 1) / 2) * v ** (v / 2 - 1) / (mp.sqrt(mp.pi) * mp.gamma(v / 2))
        show(f"student_t tail constant dof={v}", c)
        # Check the asymptotics directly: x^v P(|T| > x) at a large x.
        x = a(10) ** 6
        tail = 2 * mp.quad(lambda t: mp.gamma((v + 1) / 2) / (mp.sqrt(v * mp.pi) * mp.gamma(v / 2))
                           * (1 + t * t / v) ** (-(v + 1) / 2), [x, mp.inf])
        show(f"  x^v P(|T|>x) at 1e6", x ** v * tail)
    # E|T|^s for Student-t(dof=5), s = 1.5.
    v, s = a(5), a("1.5")
    m = v ** (s / 2) * mp.gamma((s + 1) / 2) * mp.gamma((v - s) / 2) / (mp.sqrt(mp.pi) * mp.gamma(v / 2))
    show("E|T_5|^1.5", m)
    show("E|Z|^1.5", 2 ** (s / 2) * mp.gamma((s + 1) / 2) / mp.sqrt(mp.pi))
    # E (0.5 Z^2)^0.7
    k = a("0.7")
    show("E(0.5 Z^2)^0.7", a("0.5") ** k * 2 ** k * mp.gamma(k + a("0.5")) / mp.sqrt(mp.pi))
    # Kesten index of A = 0.5 Z^2 (ARCH(1) with alpha1 = 0.5): solve E A^k = 1.
    g = lambda k: a("0.5") ** k * 2 ** k * mp.gamma(k + a("0.5")) / mp.sqrt(mp.pi) - 1
    show("kesten ARCH(1) alpha1=0.5", mp.findroot(g, 2))
    # Exact b(d) for the moving average c = [1, 1] over Pareto(alpha=0.8, p=1, q=0).
    al = a("0.8")
    for d in [1, 2, 3, 16]:
        show(f"b_plus MA[1,1] d={d}", (2 + (d - 1) * 2 ** al) / 2)
    # sas moving average c = [1, 1], alpha = 1.2: sum |s_j(d)|^a / sum |c_j|^a.
    al = a("1.2")
    for d in [1, 2, 4]:
        show(f"b_plus_sas d={d}", (2 + (d - 1) * 2 ** al) / 2)
    # MA [1, -0.5, 2] over Pareto(alpha=1.3, p=0.6, q=0.4), d = 2.
    al, p, q = a("1.3"), a("0.6"), a("0.4")
    c = [a(1), a("-0.5"), a(2)]
    sums = [a(1), a("0.5"), a("1.5"), a(2)]
    den = sum(abs(x) ** al for x in c)
    bp = sum((p if x > 0 else q) * abs(x) ** al for x in sums) / den
    bm = sum((q if x > 0 else p) * abs(x) ** al for x in sums) / den
    show("b MA[1,-0.5,2] d=2 plus", bp)
    show("b MA[1,-0.5,2] d=2 minus", bm)
    # Log-volatility variance of ARMA(1,1) phi=0.6 theta=0.3 sd=0.5:
    # sd^2 (1 + 2 phi theta + theta^2) / (1 - phi^2).
    phi, th, sd = a("0.6"), a("0.3"), a("0.5")
    show("arma11 variance", sd ** 2 * (1 + 2 * phi * th + th ** 2) / (1 - phi ** 2))
    # KS critical value coefficient at level 1e-3.
    show("ks coefficient 1e-3", mp.sqrt(-mp.log(a("0.0005")) / 2))
    # Max CF gap on the default grid between psi_0.5(1,0) and psi_1.5(1,0).
    grid = [a(v) for v in ["0.25", "0.5", "1", "2", "4"]]
    gap = max(abs(stable_cf(a("0.5"), x, 1, 0) - stable_cf(a("1.5"), x, 1, 0)) for x in grid)
    show("max cf gap alpha 0.5 vs 1.5", gap)
