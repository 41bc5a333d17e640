"""Test problems for ``-lap(u) = f`` with Dirichlet data ``g_D = u``.

Every callable takes an ``n x 2`` array of points. ``Du`` returns an
``n x 2`` array of gradients.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

BUMP_CENTER = (0.5, 0.117)
BUMP_SHARPNESS = 1000.0


@dataclass(frozen=True)
class PdeData:
    uexact: Callable
    Du: Callable
    f: Callable
    g_D: Callable
    name: str = "custom"


def _xy(p):
    p = np.asarray(p, dtype=float)
    return p[..., 0], p[..., 1]


def benchmark_gaussian_bump():
    """``u = x y (1-x) (1-y) exp(-1000((x-0.5)^2 + (y-0.117)^2))``.

    The solution factors as ``A(x) B(y)``, so ``lap(u) = A'' B + A B''``.
    """
    x0, y0 = BUMP_CENTER
    c = BUMP_SHARPNESS

    def factor(t, t0):
        g = np.exp(-c * (t - t0) ** 2)
        a = t * (1 - t)
        da = 1 - 2 * t
        dg = -2 * c * (t - t0)  # g' / g
        d2g = dg**2 - 2 * c  # g'' / g
        val = a * g
        d1 = (da + a * dg) * g
        d2 = (-2 + 2 * da * dg + a * d2g) * g
        return val, d1, d2

    def u(p):
        x, y = _xy(p)
        return factor(x, x0)[0] * factor(y, y0)[0]

    def Du(p):
        x, y = _xy(p)
        A, dA, _ = factor(x, x0)
        B, dB, _ = factor(y, y0)
        return np.stack([dA * B, A * dB], axis=-1)

    def f(p):
        x, y = _xy(p)
        A, _, d2A = factor(x, x0)
        B, _, d2B = factor(y, y0)
        return -(d2A * B + A * d2B)

    return PdeData(uexact=u, Du=Du, f=f, g_D=u, name="gaussian-bump")


def sine_problem():
    """``u = sin(pi x) sin(pi y)`` on the unit square."""
    pi = np.pi

    def u(p):
        x, y = _xy(p)
        return np.sin(pi * x) * np.sin(pi * y)

    def Du(p):
        x, y = _xy(p)
        return np.stack([pi * np.cos(pi * x) * np.sin(pi * y), pi * np.sin(pi * x) * np.cos(pi * y)], -1)

    def f(p):
        return 2 * pi**2 * u(p)

    return PdeData(uexact=u, Du=Du, f=f, g_D=u, name="sine")


def polynomial_problem(k=1):
    """``u = (1 + x + 2y)^k``, a polynomial of total degree `k`."""
    k = int(k)
    if k < 0:
        raise ValueError("degree must be non-negative")

    def s(p):
        x, y = _xy(p)
        return 1.0 + x + 2.0 * y

    def u(p):
        return s(p) ** k

    def Du(p):
        d = k * s(p) ** (k - 1) if k else np.zeros_like(s(p))
        return np.stack([d, 2.0 * d], axis=-1)

    def f(p):
        if k < 2:
            return np.zeros_like(s(p))
        return -5.0 * k * (k - 1) * s(p) ** (k - 2)

    return PdeData(uexact=u, Du=Du, f=f, g_D=u, name=f"polynomial-{k}")


def problem_from_expression(u_expr, f_expr=None, name="custom"):
    """Build a problem from a sympy-readable expression ``u(x, y)``.

    ``f`` defaults to ``-lap(u)``.
    """
    import sympy

    x, y = sympy.symbols("x y")
    u = sympy.sympify(u_expr, locals={"x": x, "y": y})
    ux, uy = sympy.diff(u, x), sympy.diff(u, y)
    f = -(sympy.diff(u, x, 2) + sympy.diff(u, y, 2)) if f_expr is None else sympy.sympify(f_expr)
    free = (u.free_symbols | f.free_symbols) - {x, y}
    if free:
        raise ValueError(f"unknown symbol(s) {sorted(map(str, free))} in problem definition")

    def vectorize(expr):
        fn = sympy.lambdify((x, y), expr, "numpy")

        def call(p):
            px, py = _xy(p)
            return np.broadcast_to(np.asarray(fn(px, py), dtype=float), px.shape).copy()

        return call

    uf, uxf, uyf, ff = map(vectorize, (u, ux, uy, f))

    def Du(p):
        return np.stack([uxf(p), uyf(p)], axis=-1)

    return PdeData(uexact=uf, Du=Du, f=ff, g_D=uf, name=name)


def load_problem_file(path):
    """Read a JSON problem file ``{"u": "<expr>", "f": "<expr>"?}``."""
    data = json.loads(Path(path).read_text())
    if "u" not in data:
        raise ValueError(f"{path}: problem file needs a 'u' expression")
    return problem_from_expression(data["u"], data.get("f"), name=data.get("name", Path(path).stem))


PROBLEMS = {
    "gaussian-bump": benchmark_gaussian_bump,
    "sine": sine_problem,
    "polynomial": polynomial_problem,
}
