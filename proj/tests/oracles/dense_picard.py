#!/usr/bin/env python3
"""Brute-force reference values for the equilibrium exposure problem.

Independent of the C++ solver: plain Picard on a dense uniform grid with
cumulative trapezoid integrals, plus an adaptive ODE integration of the
same fixed point as a second route. Prints the values frozen into
tests/test_helpers.hpp.
"""
import numpy as np
from scipy.integrate import solve_ivp

P1 = dict(r=0.03, mu=0.08, sigma=0.2, gamma=2.0, delta=0.0, rho=0.0,
          beta=1.0, income=0.2, T=1.0, x0=1.0)


def tail_trapezoid(t, g):
    """int_{t_i}^{T} g ds for every node i."""
    dt = np.diff(t)
    seg = 0.5 * dt * (g[:-1] + g[1:])
    out = np.zeros_like(g)
    out[:-1] = np.cumsum(seg[::-1])[::-1]
    return out


def picard(p, n, tol=1e-12, max_iter=1000):
    t = np.linspace(0.0, p["T"], n + 1)
    k = (p["mu"] - p["r"]) / (p["sigma"] ** 2 * p["gamma"])
    pi = np.ones_like(t)
    for it in range(max_iter):
        g_u = (p["r"] - p["delta"]) + (p["mu"] - p["r"]) * pi + p["sigma"] ** 2 * pi ** 2
        g_v = p["sigma"] ** 2 * pi ** 2
        u = tail_trapezoid(t, g_u)
        v = tail_trapezoid(t, g_v)
        nxt = k * (np.exp(-u) + p["gamma"] * np.exp(-v) - p["gamma"])
        if np.max(np.abs(nxt - pi)) <= tol:
            break
        pi = nxt
    g_u = (p["r"] - p["delta"]) + (p["mu"] - p["r"]) * pi + p["sigma"] ** 2 * pi ** 2
    g_v = p["sigma"] ** 2 * pi ** 2
    u = tail_trapezoid(t, g_u)
    v = tail_trapezoid(t, g_v)
    a = np.exp(tail_trapezoid(t, (p["r"] - p["delta"]) + (p["mu"] - p["r"]) * pi))
    f = np.exp(2.0 * tail_trapezoid(t, (p["r"] - p["delta"]) + (p["mu"] - p["r"]) * pi
                                    + 0.5 * p["sigma"] ** 2 * pi ** 2))
    return t, pi, a, f, it


def ode_route(p):
    k = (p["mu"] - p["r"]) / (p["sigma"] ** 2 * p["gamma"])

    def rhs(s, y):
        u, v = y
        pi = k * (np.exp(-u) + p["gamma"] * np.exp(-v) - p["gamma"])
        return [-((p["r"] - p["delta"]) + (p["mu"] - p["r"]) * pi + p["sigma"] ** 2 * pi ** 2),
                -(p["sigma"] ** 2 * pi ** 2)]

    sol = solve_ivp(rhs, (p["T"], 0.0), [0.0, 0.0], rtol=1e-13, atol=1e-15)
    u, v = sol.y[:, -1]
    pi = k * (np.exp(-u) + p["gamma"] * np.exp(-v) - p["gamma"])
    return pi, np.exp(u - v), np.exp(2 * (u - v) + v)


def pipeline(p, n, inv_marginal, utility):
    t, pi, a, f, it = picard(p, n)
    m = a + 0.5 * p["gamma"] * (a * a - f)
    c = inv_marginal(m / p["beta"])
    # K(t_i) = int_{t_i}^T e^{-r(s-t_i)} (l - c) ds, brute force per node at t=0
    g = p["income"] - c
    K0 = np.trapezoid(np.exp(-p["r"] * t) * g, t)
    w0 = np.trapezoid(np.exp(-p["rho"] * t) * utility(c), t)
    Z0 = p["x0"] + K0
    F0 = a[0] * Z0 - 0.5 * p["gamma"] * (f[0] - a[0] ** 2) * Z0 + p["beta"] * w0
    dollar = (p["mu"] - p["r"]) / (p["sigma"] ** 2 * p["gamma"] * f[0]) * (
        a[0] + p["gamma"] * (a[0] ** 2 - f[0])) * Z0
    return dict(pi0=pi[0], a0=a[0], f0=f[0], m0=m[0], c0=c[0], K0=K0, w0=w0, F0=F0,
                dollar0=dollar, y0=a[0] * Z0, z0=f[0] * Z0 * Z0, iters=it,
                piT=pi[-1], pi_half=pi[len(pi) // 2], a_half=a[len(a) // 2],
                f_half=f[len(f) // 2])


def main():
    np.set_printoptions(precision=17)
    log_inv = lambda y: 1.0 / y
    log_u = np.log
    pow_inv = lambda y: y ** (-1.0 / 2.0)
    pow_u = lambda c: c ** (-1.0) / (-1.0)

    for name, inv, u in (("log", log_inv, log_u), ("power eta=2", pow_inv, pow_u)):
        res = pipeline(P1, 10000, inv, u)
        print(f"P1 {name} (n=10000 trapezoid Picard):")
        for k, v in res.items():
            print(f"  {k:8s} = {v!r}")
    pi, a, f = ode_route(P1)
    print("P1 adaptive ODE route at t=0:")
    print(f"  pi0 = {pi!r}\n  a0 = {a!r}\n  f0 = {f!r}")


if __name__ == "__main__":
    main()
