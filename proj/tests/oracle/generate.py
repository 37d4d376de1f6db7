"""Independent oracle for the frozen reference values in tests/oracle_values.hpp.

Run from the repository root: python3 tests/oracle/generate.py > tests/oracle_values.hpp
Uses mpmath and sympy only; nothing here calls the C++ library.
"""
import mpmath as mp
import sympy as sp

mp.mp.dps = 30


def cube_inverse_distance():
    # ∫_{[-1/2,1/2]^3} dy/|y| = 3 ∫∫_{[0,1]^2} (1 + s² + t²)^{-1/2} ds dt by the pyramid reduction.
    inner = mp.quad(lambda s, t: 1 / mp.sqrt(1 + s * s + t * t), [0, 1], [0, 1])
    return 3 * inner


def epstein_z3_half():
    # Σ' |n|^{-1} over Z³ by Ewald splitting, analytically continued.
    acc = mp.mpf(-3)
    R = 6
    for i in range(-R, R + 1):
        for j in range(-R, R + 1):
            for k in range(-R, R + 1):
                n2 = i * i + j * j + k * k
                if n2 == 0:
                    continue
                x = mp.pi * n2
                acc += mp.gammainc(mp.mpf(1) / 2, x) / mp.sqrt(x) + mp.exp(-x) / x
    return acc


def dyadic(alpha):
    return 1 / (mp.power(2, alpha) - 1)


def navier_stokes_mode():
    x, y, z = sp.symbols("x y z", real=True)
    A, B, C = sp.Rational(3, 4), sp.Rational(-1, 2), sp.Rational(1, 3)
    u = [A * sp.sin(x) * sp.cos(y) + B * sp.sin(z), -A * sp.cos(x) * sp.sin(y), C * sp.sin(x)]
    X = [x, y, z]
    src = sum(sp.diff(u[i] * u[j], X[i], X[j]) for i in range(3) for j in range(3))
    src = sp.expand(sp.expand_trig(sp.simplify(src)))
    # -Δp = src; src is a trigonometric polynomial, solve mode by mode via Fourier on [0, 2π)³.
    src_exp = sp.expand(src.rewrite(sp.exp))
    p = 0
    for term in sp.Add.make_args(src_exp):
        coeff, osc = term.as_independent(x, y, z)
        arg = sp.expand(sp.log(osc).expand(force=True) / sp.I) if osc != 1 else 0
        kk = [sp.diff(arg, v) for v in X]
        ksq = sum(c * c for c in kk)
        if ksq == 0:
            continue
        p += coeff * osc / ksq
    p = sp.simplify(sp.re(sp.expand_complex(p)))
    lap = lambda f: sum(sp.diff(f, v, 2) for v in X)
    du = [lap(u[i]) - sum(sp.diff(u[i] * u[j], X[j]) for j in range(3)) - sp.diff(p, X[i]) for i in range(3)]
    # residual check of the pressure solve
    assert sp.simplify(-lap(p) - src) == 0
    return u, p, du, X


def main():
    print("#pragma once")
    print("// Generated by tests/oracle/generate.py (mpmath, sympy). Do not edit by hand.")
    print("namespace oracle {")
    print(f"constexpr double kUnitCubeInverseDistance = {mp.nstr(cube_inverse_distance(), 17)};")
    print(f"constexpr double kLatticeCorrection = {mp.nstr(-epstein_z3_half(), 17)};")
    for a, name in [(mp.mpf("0.1"), "01"), (mp.mpf("0.5"), "05"), (mp.mpf(1), "1")]:
        print(f"constexpr double kDyadicLimit{name} = {mp.nstr(dyadic(a), 17)};")
    print(f"constexpr double kQnLower = {mp.nstr(1 / (mp.power(2, 1.5) * mp.exp(0.25)), 17)};")
    print(f"constexpr double kShellLower = {mp.nstr(1 / (mp.power(2, 4.5) * mp.e), 17)};")
    print(f"constexpr double kShellUpper = {mp.nstr(mp.exp(-mp.mpf(1) / 32), 17)};")
    u, p, du, X = navier_stokes_mode()
    # Values at grid nodes of the N = 16 box of side 2π: node (i, j, k) sits at 2π(i, j, k)/16.
    nodes = [(1, 2, 3), (5, 0, 11), (9, 14, 7), (12, 6, 2)]
    print("// u = (3/4 sin x cos y - 1/2 sin z, -3/4 cos x sin y, 1/3 sin x), d = 0 on [0, 2π)³ sampled at N = 16.")
    print("struct ModeSample { int i, j, k; double p, du[3]; };")
    print("constexpr ModeSample kNavierStokesMode[] = {")
    for (i, j, k) in nodes:
        sub = {X[0]: 2 * sp.pi * i / 16, X[1]: 2 * sp.pi * j / 16, X[2]: 2 * sp.pi * k / 16}
        pv = sp.N(p.subs(sub), 20)
        dv = [sp.N(c.subs(sub), 20) for c in du]
        print(f"    {{{i}, {j}, {k}, {pv}, {{{dv[0]}, {dv[1]}, {dv[2]}}}}},")
    print("};")
    print("}  // namespace oracle")


if __name__ == "__main__":
    main()
