"""Symbolic reference values for the zoo fixtures.

Run once before building; the printed numbers are frozen into the C++ tests.
Everything here is computed from the defining functions with sympy, without
going through the foot-point distance machinery: on the boundary the Hessian
of the signed distance equals P Hess(rho) P / |grad rho| (P the tangent
projector), which is what the oracle uses.
"""
import mpmath as mp
import sympy as sp

mp.mp.dps = 30
x1, y1, x2, y2 = X = sp.symbols("x1 y1 x2 y2", real=True)
U = [sp.Matrix([sp.Rational(1, 2), -sp.I / 2, 0, 0]),
     sp.Matrix([0, 0, sp.Rational(1, 2), -sp.I / 2])]
Jm = sp.Matrix([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])


def worm_rho():
    t = sp.log(x2**2 + y2**2)
    # profile vanishes on Sigma's interior; its jets there are identically 0
    return (x1 + sp.cos(t))**2 + (y1 + sp.sin(t))**2 - 1


def quartic_rho():
    return (x1**2 + y1**2)**2 + x2**2 + y2**2 - 1


def shape_data(rho):
    g = sp.Matrix([sp.diff(rho, v) for v in X])
    H = sp.hessian(rho, X)
    gn = sp.sqrt(sum(c**2 for c in g))
    n = g / gn
    P = sp.eye(4) - n * n.T
    Hd = P * H * P / gn
    NR = (n - sp.I * Jm * n) / 2
    return n, Hd, NR


def rep(coeffs):
    return coeffs[0] * U[0] + coeffs[1] * U[1]


def herm(A, H, B):
    return (A.T * H * B.conjugate())[0, 0]


def num(expr, pt):
    return complex(sp.N(expr.subs(dict(zip(X, pt))), 25))


def worm_values():
    rho = worm_rho()
    n, Hd, NR = shape_data(rho)
    L = rep([0, 1])
    h = herm(NR, Hd, L)  # Hess_delta(N, d/dz2) as an ambient extension
    # third term: directional derivative of h along L (tangent on Sigma)
    T3 = sum(L[a] * sp.diff(h, X[a]) for a in range(4))
    out = {}
    for (r, a) in [(1.0, 0.0), (1.3, 0.7), (0.8, -2.1)]:
        pt = (0.0, 0.0, r * mp.cos(a), r * mp.sin(a))
        w = complex(r * mp.cos(a), r * mp.sin(a))
        out[(r, a)] = (num(h, pt), num(T3, pt), -1j / (2 * w.conjugate()))
    return h, out


def worm_period():
    # theta = Re(h) dx + Im(h) dy on the core circle w = e^{i a}
    rho = worm_rho()
    n, Hd, NR = shape_data(rho)
    h = herm(NR, Hd, rep([0, 1]))
    f = sp.lambdify(X, h, "mpmath")

    def integrand(a):
        w = mp.e**(1j * a)
        hv = f(0, 0, w.real, w.imag)
        dw = 1j * w
        return mp.re(hv) * mp.re(dw) + mp.im(hv) * mp.im(dw)

    return mp.quad(integrand, [0, 2 * mp.pi])


def quartic_third():
    rho = quartic_rho()
    A = rep([1, 0])
    val = 0
    for a in range(4):
        for b in range(4):
            for c in range(4):
                val += sp.diff(rho, X[a], X[b], X[c]) * A[a] * A[b] * sp.conjugate(A[c])
    return num(val, (1, 0, 0, 0))


def quartic_real_form():
    rho = quartic_rho()
    n, Hd, NR = shape_data(rho)
    V = Jm * n
    accel = Jm * Hd * V  # nabla_V V
    res = []
    for t in [0.0, 1.1, 2.5]:
        pt = (0, 0, mp.cos(t), mp.sin(t))
        dt = sp.Matrix([0, 0, -sp.sin(t), sp.cos(t)])
        res.append(num(-(accel.T * dt)[0, 0] / 4, pt))
    return res


if __name__ == "__main__":
    h, vals = worm_values()
    for k, (hv, t3, closed) in vals.items():
        print("worm point", k, "h =", hv, "closed-form", closed, "T3 =", t3)
    print("worm core period =", worm_period())
    print("quartic third contraction at (1,0) =", quartic_third())
    print("quartic real-form components =", quartic_real_form())
