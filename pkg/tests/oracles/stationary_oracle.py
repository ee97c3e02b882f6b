"""Symbolic pin reactions for the uniform load, derived with sympy.

Solves the pinned equilibrium u'''' = 24 on (-pi, pi) exactly: a quartic
particular integral plus one cubic per span, matched C2 at the pins, hinged
at the ends.  Prints the third-derivative jumps alpha(a, b), beta(a, b) and
their values on a grid, for freezing into tests.

    python3 tests/oracles/stationary_oracle.py
"""

import sympy as sp

x, a, b = sp.symbols("x a b", real=True)
pi = sp.pi


def solve_uniform():
    # u = x^4 + span cubic; u'''' = 24
    cs = sp.symbols("c0:12")
    spans = []
    for i in range(3):
        c = cs[4 * i : 4 * i + 4]
        spans.append(x**4 + c[0] + c[1] * x + c[2] * x**2 + c[3] * x**3)
    left, mid, right = spans
    eqs = [
        left.subs(x, -pi),
        sp.diff(left, x, 2).subs(x, -pi),
        left.subs(x, -b * pi),
        mid.subs(x, -b * pi),
        mid.subs(x, a * pi),
        right.subs(x, a * pi),
        right.subs(x, pi),
        sp.diff(right, x, 2).subs(x, pi),
    ]
    for p, lo, hi in ((-b * pi, left, mid), (a * pi, mid, right)):
        for k in (1, 2):
            eqs.append(sp.diff(hi - lo, x, k).subs(x, p))
    sol = sp.solve(eqs, cs, dict=True)[0]
    jump_right = sp.diff(right - mid, x, 3).subs(sol)
    jump_left = sp.diff(mid - left, x, 3).subs(sol)
    return sp.simplify(jump_right), sp.simplify(jump_left)


def main():
    alpha, beta = solve_uniform()
    print("alpha(a,b) =", sp.factor(alpha))
    print("beta(a,b)  =", sp.factor(beta))
    sym = sp.simplify(beta.subs(b, a) - 3 * (1 + a) * (a**2 - 5) * pi / ((1 - a) * (2 * a + 1)))
    print("symmetric-case residue vs closed form:", sym)
    swap = sp.simplify(alpha - beta.subs({a: b, b: a}, simultaneous=True))
    print("reflection identity alpha(a,b) - beta(b,a):", swap)
    for av, bv in [(sp.Rational(1, 2), sp.Rational(1, 2)), (sp.Rational(3, 10), sp.Rational(7, 10)),
                   (sp.Rational(14, 25), sp.Rational(2, 5)), (sp.Rational(2, 3), sp.Rational(1, 4))]:
        al = alpha.subs({a: av, b: bv})
        be = beta.subs({a: av, b: bv})
        print(f"a={av} b={bv}: alpha={sp.nsimplify(al)} = {float(al):.15f}, beta={float(be):.15f}")


if __name__ == "__main__":
    main()
