"""Stieltjes-type inversion: functionals ``integral psi dmu`` from ``Im q`` near the boundary.

For each ``y`` in a decreasing schedule the plane integral

    F(y) = integral psi(x) Im q(x1 + i y, x2 + i y) dx

is computed by nested adaptive quadrature, and ``F`` is extrapolated polynomially to
``y = 0``.  The limit equals ``integral psi dmu`` for functions in the
Herglotz-Nevanlinna class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .quadrature import QuadratureConfig, nested_plane

__all__ = [
    "TestFunction",
    "test_function",
    "TEST_FUNCTIONS",
    "InversionConfig",
    "InversionResult",
    "stieltjes_functional",
    "truncation_radius",
    "combine",
]


def _w(x):
    return 1.0 / (1.0 + x * x)


@dataclass(frozen=True)
class TestFunction:
    """Scalar ``psi`` with ``|psi(x)| <= C / ((1 + x1**2)(1 + x2**2))``.

    ``factors`` lists ``(coef, f1, f2)`` with ``psi = sum coef f1(x1) f2(x2)``.
    """

    __test__ = False  # not a pytest class

    name: str
    params: dict
    factors: tuple = field(repr=False)
    bound: float = 1.0
    breakpoints: tuple = ()

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        out = 0.0
        for c, f1, f2 in self.factors:
            out = out + c * f1(x1) * f2(x2)
        return out

    def check_bound(self, n: int = 801, span: float = 1e3) -> float:
        """Largest sampled value of ``|psi| W / C``; at most 1 for a valid bound."""
        u = np.linspace(-math.atan(span), math.atan(span), n)
        x = np.unique(np.concatenate([np.tan(u), np.asarray(self.breakpoints, dtype=float)]))
        a, b = np.meshgrid(x, x)
        return float(np.max(np.abs(self(a, b)) * (1 + a * a) * (1 + b * b)) / self.bound)


def _canonical_weight() -> TestFunction:
    return TestFunction("canonical_weight", {}, ((1.0, _w, _w),), 1.0)


def _gaussian_weighted(sigma: float = 1.0) -> TestFunction:
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    g = lambda x: np.exp(-(x / sigma) ** 2) * _w(x)
    return TestFunction("gaussian_weighted", {"sigma": sigma}, ((1.0, g, g),), 1.0)


def _bump_constant(c: float) -> float:
    # max over x of (1 + x**2) / (1 + (x - c)**2)
    return 1.0 + 0.5 * c * c + abs(c) * math.sqrt(1.0 + 0.25 * c * c)


def _rational_bump(center=(0.0, 0.0)) -> TestFunction:
    c1, c2 = (float(v) for v in center)
    f1 = lambda x: 1.0 / (1.0 + (x - c1) ** 2)
    f2 = lambda x: 1.0 / (1.0 + (x - c2) ** 2)
    return TestFunction("rational_bump", {"center": [c1, c2]}, ((1.0, f1, f2),),
                        _bump_constant(c1) * _bump_constant(c2), (c1, c2))


TEST_FUNCTIONS = {
    "canonical_weight": _canonical_weight,
    "gaussian_weighted": _gaussian_weighted,
    "rational_bump": _rational_bump,
}


def test_function(name: str, params: Optional[dict] = None) -> TestFunction:
    """Registry lookup; the declared bound is verified by sampling."""
    try:
        factory = TEST_FUNCTIONS[name]
    except KeyError:
        raise KeyError(f"unknown test function {name!r}") from None
    psi = factory(**(params or {}))
    ratio = psi.check_bound()
    if ratio > 1.0 + 1e-9:
        raise ValueError(f"{name}: sampled |psi| W exceeds the declared bound by {ratio:.6g}x")
    return psi


test_function.__test__ = False


def combine(coefs, psis, name: str = "combination") -> TestFunction:
    """Linear combination of test functions (bound is the triangle-inequality sum)."""
    factors = tuple((c * k, f1, f2) for c, p in zip(coefs, psis) for k, f1, f2 in p.factors)
    bps = tuple(b for p in psis for b in p.breakpoints)
    return TestFunction(name, {"coefs": list(coefs), "terms": [p.name for p in psis]}, factors,
                        float(sum(abs(c) * p.bound for c, p in zip(coefs, psis))), bps)


@dataclass(frozen=True)
class InversionConfig:
    quad: QuadratureConfig = QuadratureConfig(abs_tol=1e-7, rel_tol=1e-5, max_refinements=30)
    y_exponents: tuple = tuple(range(1, 11))
    n_last: int = 4
    degree: int = 3
    # extrapolation is flagged unstable when the error exceeds this fraction
    instability: float = 1e-2

    @property
    def ys(self) -> np.ndarray:
        return 2.0 ** -np.asarray(self.y_exponents, dtype=float)


@dataclass(frozen=True)
class InversionResult:
    estimate: float
    error_estimate: float
    converged: bool
    ys: tuple
    values: tuple

    def __iter__(self):
        yield self.estimate
        yield self.error_estimate


def truncation_radius(bound: float, abs_tol: float) -> float:
    """``R`` with ``integral_{outside [-R, R]^2} C / W <= 0.1 abs_tol``."""
    return 4.0 * math.pi * bound / (0.1 * abs_tol)


def _extrapolate(y, f, n_last, degree):
    y, f = np.asarray(y[-n_last:]), np.asarray(f[-n_last:])
    hi = np.polyval(np.polyfit(y, f, min(degree, y.size - 1)), 0.0)
    lo_deg = max(min(degree, y.size - 1) - 1, 0)
    lo = np.polyval(np.polyfit(y[1:], f[1:], lo_deg), 0.0) if y.size > 1 else hi
    return float(hi), float(abs(hi - lo))


def stieltjes_functional(q_im: Callable, psi: TestFunction,
                         cfg: InversionConfig = InversionConfig()) -> InversionResult:
    """Estimate ``integral psi dmu`` from ``q_im(x1, x2, y1, y2) = Im q(x1 + i y1, x2 + i y2)``.

    ``q_im`` must accept broadcastable arrays.  All ``y`` levels are
    integrated together by nested adaptive quadrature over ``[-R, R]**2``.
    """
    ys = cfg.ys
    if np.any(np.diff(ys) >= 0):
        raise ValueError("y schedule must be strictly decreasing")
    R = truncation_radius(psi.bound, cfg.quad.abs_tol)
    fn = lambda x1, x2, b: psi(x1, x2) * q_im(x1, x2, ys[b], ys[b])
    bp = np.array([psi.breakpoints], dtype=float) if psi.breakpoints else None
    res = nested_plane(fn, ys.size, (-R, R, -R, R), cfg.quad, bp, bp)
    values = res.value.real
    estimate, extrap_err = _extrapolate(ys, values, cfg.n_last, cfg.degree)
    error = extrap_err + float(np.max(res.error[-cfg.n_last:]))
    stable = error <= cfg.instability * max(abs(estimate), cfg.quad.abs_tol)
    converged = bool(np.all(res.converged) and stable)
    return InversionResult(estimate, error, converged, tuple(ys.tolist()), tuple(values.tolist()))
