"""Registry of named closed-form densities used by structured measures.

Measure files refer to densities by name plus numeric parameters, never by
code, so that CLI runs are reproducible.  One-dimensional densities know
their breakpoints and the power of their growth at infinity; planar
densities optionally expose a factorisation ``sum_j a_j(t1) * b_j(t2)``
which lets integration against separable integrands run as 1-D quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Density1D",
    "Density2D",
    "density_1d",
    "density_2d",
    "DENSITIES_1D",
    "DENSITIES_2D",
    "UnknownDensityError",
]


class UnknownDensityError(KeyError):
    pass


@dataclass(frozen=True)
class Density1D:
    name: str
    params: dict
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    breakpoints: tuple = ()
    # density ~ |t|**tail_power as |t| -> inf; -inf for faster than any power
    tail_power: float = 0.0

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))

    def to_dict(self) -> dict:
        return {"name": self.name, "params": dict(self.params)}


@dataclass(frozen=True)
class Density2D:
    name: str
    params: dict
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False, compare=False)
    factors: Optional[tuple] = field(default=None, repr=False, compare=False)
    breakpoints1: tuple = ()
    breakpoints2: tuple = ()

    def __call__(self, t1, t2):
        return self.fn(np.asarray(t1, dtype=float), np.asarray(t2, dtype=float))

    def to_dict(self) -> dict:
        return {"name": self.name, "params": dict(self.params)}


def _poly(coeffs):
    c = np.asarray(coeffs, dtype=float)
    return lambda t: np.polynomial.polynomial.polyval(t, c)


def _degree(coeffs) -> int:
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    return len(c) - 1


def _constant(value: float = 1.0) -> Density1D:
    return Density1D("constant", {"value": value},
                     lambda t: np.full(np.shape(t), float(value)), (), 0.0)


def _sqrt_abs(scale: float = 1.0) -> Density1D:
    return Density1D("sqrt_abs", {"scale": scale},
                     lambda t: scale * np.sqrt(np.abs(t)), (0.0,), 0.5)


def _polynomial(coeffs) -> Density1D:
    coeffs = [float(c) for c in coeffs]
    p = _poly(coeffs)
    return Density1D("polynomial", {"coeffs": coeffs}, p, (),
                     float(max(_degree(coeffs), 0)) if any(coeffs) else -math.inf)


def _rational(num, den) -> Density1D:
    num = [float(c) for c in num]
    den = [float(c) for c in den]
    roots = np.polynomial.polynomial.polyroots(den) if _degree(den) > 0 else []
    if any(abs(r.imag) < 1e-12 for r in np.atleast_1d(roots)):
        raise ValueError("rational density: denominator has a real root")
    p, q = _poly(num), _poly(den)
    return Density1D("rational", {"num": num, "den": den}, lambda t: p(t) / q(t), (),
                     float(_degree(num) - _degree(den)))


def _gaussian(center: float = 0.0, width: float = 1.0, height: float = 1.0) -> Density1D:
    return Density1D("gaussian", {"center": center, "width": width, "height": height},
                     lambda t: height * np.exp(-((t - center) / width) ** 2),
                     (float(center),), -math.inf)


def _lorentzian(center: float = 0.0, width: float = 1.0, height: float = 1.0) -> Density1D:
    return Density1D("lorentzian", {"center": center, "width": width, "height": height},
                     lambda t: height * width ** 2 / ((t - center) ** 2 + width ** 2),
                     (float(center),), -2.0)


DENSITIES_1D = {
    "constant": _constant,
    "sqrt_abs": _sqrt_abs,
    "polynomial": _polynomial,
    "rational": _rational,
    "gaussian": _gaussian,
    "lorentzian": _lorentzian,
}


def density_1d(name: str, params: Optional[dict] = None) -> Density1D:
    try:
        factory = DENSITIES_1D[name]
    except KeyError:
        raise UnknownDensityError(f"unknown 1-D density {name!r}") from None
    return factory(**(params or {}))


def _constant2(value: float = 1.0) -> Density2D:
    return Density2D("constant", {"value": value},
                     lambda a, b: np.full(np.broadcast(a, b).shape, float(value)),
                     ((_constant(value), _constant(1.0)),))


def _sqrt_abs_product(scale: float = 1.0) -> Density2D:
    return Density2D("sqrt_abs_product", {"scale": scale},
                     lambda a, b: scale * np.sqrt(np.abs(a * b)),
                     ((_sqrt_abs(scale), _sqrt_abs(1.0)),), (0.0,), (0.0,))


def _product(d1: dict, d2: dict) -> Density2D:
    f = density_1d(d1["name"], d1.get("params"))
    g = density_1d(d2["name"], d2.get("params"))
    return Density2D("product", {"d1": f.to_dict(), "d2": g.to_dict()},
                     lambda a, b: f(a) * g(b), ((f, g),), f.breakpoints, g.breakpoints)


def _gaussian2d(sigma: float = 1.0, height: float = 1.0) -> Density2D:
    return Density2D("gaussian2d", {"sigma": sigma, "height": height},
                     lambda a, b: height * np.exp(-(a * a + b * b) / sigma ** 2),
                     ((_gaussian(0.0, sigma, height), _gaussian(0.0, sigma, 1.0)),),
                     (0.0,), (0.0,))


def _inverse_quadratic(scale: float = 1.0) -> Density2D:
    # deliberately not factorisable: exercises planar cubature
    return Density2D("inverse_quadratic", {"scale": scale},
                     lambda a, b: scale / (1.0 + a * a + b * b), None, (0.0,), (0.0,))


DENSITIES_2D = {
    "constant": _constant2,
    "sqrt_abs_product": _sqrt_abs_product,
    "product": _product,
    "gaussian2d": _gaussian2d,
    "inverse_quadratic": _inverse_quadratic,
}


def density_2d(name: str, params: Optional[dict] = None) -> Density2D:
    try:
        factory = DENSITIES_2D[name]
    except KeyError:
        raise UnknownDensityError(f"unknown planar density {name!r}") from None
    return factory(**(params or {}))
