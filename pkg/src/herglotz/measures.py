"""Structured positive measures on the line, the plane and the torus.

A :class:`Measure2D` is a finite sum of components (atoms, products of 1-D
measures, densities carried by a line, planar densities on unions of boxes).
Integration dispatches per component; separable integrands against product
or factorised components reduce to 1-D quadrature.

The torus side uses the angle ``s = pi + 2 arctan(t)``, i.e.
``exp(i s) = (t - i) / (t + i)``, under which ``dt = (1 + t**2) / 2 ds``.
"""

from __future__ import annotations

import ast
import json
import math
import operator
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import jsonschema
import numpy as np

from .densities import Density1D, Density2D, UnknownDensityError, density_1d, density_2d
from .quadrature import (Factor, Integrand2D, QuadratureConfig, QuadratureError,
                         QuadResult, SeparableIntegrand, cubature_plane, merge_peaks,
                         quad_line)

__all__ = [
    "Atom1D", "Lebesgue1D", "DensityPiece1D", "Measure1D",
    "Atom2D", "Product", "Line", "PlanarDensity", "Measure2D",
    "TorusMeasure",
    "MeasureSchemaError", "DivergenceError",
    "parse_measure", "measure_to_document",
    "integrate", "integrate_batch", "growth_functional", "total_mass", "atom_at",
    "plane_to_torus", "angle_of", "point_of_angle", "weight_factor",
    "NAMED_SUPPORTS",
]

INF = math.inf
TWO_PI = 2.0 * math.pi


class MeasureSchemaError(ValueError):
    """Measure document does not conform to the schema."""


class DivergenceError(ArithmeticError):
    """A quantity required to be finite (growth functional, mass) diverges."""


def angle_of(t):
    """Torus angle of a real point: ``exp(i s) = (t - i)/(t + i)``, ``s in (0, 2 pi)``."""
    return np.pi + 2.0 * np.arctan(t)


def point_of_angle(s):
    return -1.0 / np.tan(0.5 * np.asarray(s, dtype=float))


def weight_factor(t):
    """``1 / (1 + t**2)``."""
    return 1.0 / (1.0 + t * t)


def _positive_samples(lo, hi, n=257):
    u = np.linspace(np.arctan(lo), np.arctan(hi), n + 2)[1:-1]
    return np.tan(u)


def _check_density_sign(values, what):
    values = np.asarray(values, dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values < -1e-12 * max(1.0, np.max(np.abs(values)))):
        raise ValueError(f"{what}: density is negative or not finite on its support")


# ---------------------------------------------------------------------------
# one dimension


@dataclass(frozen=True)
class Atom1D:
    location: float
    weight: float

    def __post_init__(self):
        if not self.weight >= 0:
            raise ValueError(f"atom weight must be non-negative, got {self.weight}")


@dataclass(frozen=True)
class Lebesgue1D:
    scale: float = 1.0
    lo: float = -INF
    hi: float = INF

    def __post_init__(self):
        if not self.scale >= 0:
            raise ValueError(f"Lebesgue scale must be non-negative, got {self.scale}")
        if not self.hi > self.lo:
            raise ValueError("Lebesgue support must be a non-empty interval")


@dataclass(frozen=True)
class DensityPiece1D:
    density: Density1D
    lo: float = -INF
    hi: float = INF

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("density support must be a non-empty interval")
        _check_density_sign(self.density(_positive_samples(self.lo, self.hi)),
                            f"density {self.density.name!r}")


def _density_mass(density: Density1D, lo: float, hi: float, cfg) -> float:
    unbounded = math.isinf(lo) or math.isinf(hi)
    if unbounded and density.tail_power >= -1.0:
        return INF
    res = quad_line(lambda t, b: density(t), 1, lo, hi, cfg, density.breakpoints or None)
    if not res.converged[0]:
        return INF
    return float(res.value[0].real)


@dataclass(frozen=True)
class Measure1D:
    components: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    def integrate_factor(self, factor, nbatch: int, cfg: QuadratureConfig) -> QuadResult:
        value = np.zeros(nbatch, dtype=complex)
        error = np.zeros(nbatch)
        ok = np.ones(nbatch, dtype=bool)
        idx = np.arange(nbatch)
        peaks = getattr(factor, "peaks", None)
        for comp in self.components:
            if isinstance(comp, Atom1D):
                if comp.weight:
                    value += comp.weight * np.asarray(factor(np.full(nbatch, comp.location), idx))
                continue
            if isinstance(comp, Lebesgue1D):
                if comp.scale == 0:
                    continue
                res = quad_line(factor, nbatch, comp.lo, comp.hi, cfg, peaks)
                scale = comp.scale
            else:
                dens = comp.density
                res = quad_line(lambda t, b, f=factor, d=dens: f(t, b) * d(t), nbatch,
                                comp.lo, comp.hi, cfg,
                                merge_peaks(peaks, np.array([dens.breakpoints], dtype=float)))
                scale = 1.0
            value += scale * res.value
            error += scale * res.error
            ok &= res.converged
        return QuadResult(value, error, ok)

    def total_mass(self, cfg: QuadratureConfig = QuadratureConfig()) -> float:
        mass = 0.0
        for comp in self.components:
            if isinstance(comp, Atom1D):
                mass += comp.weight
            elif isinstance(comp, Lebesgue1D):
                if comp.scale > 0:
                    mass += comp.scale * (comp.hi - comp.lo)
            else:
                mass += _density_mass(comp.density, comp.lo, comp.hi, cfg)
        return mass

    def atom_weight(self, x: float) -> float:
        return sum(c.weight for c in self.components
                   if isinstance(c, Atom1D) and c.location == x)

    def atoms(self):
        return [(c.location, c.weight) for c in self.components
                if isinstance(c, Atom1D) and c.weight > 0]

    @property
    def is_zero(self) -> bool:
        return all((isinstance(c, (Atom1D,)) and c.weight == 0)
                   or (isinstance(c, Lebesgue1D) and c.scale == 0)
                   for c in self.components)


# ---------------------------------------------------------------------------
# two dimensions


@dataclass(frozen=True)
class Atom2D:
    point: tuple
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "point", (float(self.point[0]), float(self.point[1])))
        if not self.weight >= 0:
            raise ValueError(f"atom weight must be non-negative, got {self.weight}")


@dataclass(frozen=True)
class Product:
    m1: Measure1D
    m2: Measure1D


@dataclass(frozen=True)
class Line:
    """Density ``g(t1) dt1`` carried by the line ``t2 = slope * t1 + intercept``."""

    slope: float
    intercept: float
    density: Density1D
    lo: float = -INF
    hi: float = INF

    def __post_init__(self):
        _check_density_sign(self.density(_positive_samples(self.lo, self.hi)),
                            f"line density {self.density.name!r}")


NAMED_SUPPORTS = {
    "all": ((-INF, INF, -INF, INF),),
    "t1*t2<0": ((-INF, 0.0, 0.0, INF), (0.0, INF, -INF, 0.0)),
    "t1*t2>0": ((0.0, INF, 0.0, INF), (-INF, 0.0, -INF, 0.0)),
    "t1<0": ((-INF, 0.0, -INF, INF),),
    "t1>0": ((0.0, INF, -INF, INF),),
    "t2<0": ((-INF, INF, -INF, 0.0),),
    "t2>0": ((-INF, INF, 0.0, INF),),
}


@dataclass(frozen=True)
class PlanarDensity:
    """Planar density restricted to a union of disjoint axis-aligned boxes."""

    density: Density2D
    boxes: tuple = NAMED_SUPPORTS["all"]
    support_name: Optional[str] = "all"

    def __post_init__(self):
        object.__setattr__(self, "boxes", tuple(tuple(float(v) for v in b) for b in self.boxes))
        for x0, x1, y0, y1 in self.boxes:
            s1 = _positive_samples(x0, x1, 33)
            s2 = _positive_samples(y0, y1, 33)
            a, b = np.meshgrid(s1, s2)
            _check_density_sign(self.density(a, b), f"planar density {self.density.name!r}")


Component2D = Union[Atom2D, Product, Line, PlanarDensity]


def _sum_results(results, nbatch):
    value = np.zeros(nbatch, dtype=complex)
    error = np.zeros(nbatch)
    ok = np.ones(nbatch, dtype=bool)
    for r in results:
        value += r.value
        error += r.error
        ok &= r.converged
    return QuadResult(value, error, ok)


def _product_of(r1: QuadResult, r2: QuadResult, coef) -> QuadResult:
    value = coef * r1.value * r2.value
    error = np.abs(coef) * (np.abs(r1.value) * r2.error + np.abs(r2.value) * r1.error
                            + r1.error * r2.error)
    return QuadResult(value, error, r1.converged & r2.converged)


def _pieces(m: Measure1D):
    """Continuous pieces of a 1-D measure as (weight function or None, lo, hi, scale, breakpoints)."""
    for c in m.components:
        if isinstance(c, Lebesgue1D) and c.scale > 0:
            yield None, c.lo, c.hi, c.scale, ()
        elif isinstance(c, DensityPiece1D):
            yield c.density, c.lo, c.hi, 1.0, c.density.breakpoints


def _bp(*parts):
    return merge_peaks(*[p if p is None or np.ndim(p) == 2 else np.array([p], dtype=float)
                         for p in parts])


@dataclass(frozen=True)
class Measure2D:
    components: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    def __add__(self, other: "Measure2D") -> "Measure2D":
        return Measure2D(self.components + other.components)

    @property
    def is_zero(self) -> bool:
        return len(self.components) == 0

    # -- integration -------------------------------------------------------

    def integrate(self, integrand, cfg: QuadratureConfig = QuadratureConfig()) -> QuadResult:
        nbatch = integrand.nbatch
        return _sum_results([self._integrate_component(c, integrand, cfg)
                             for c in self.components], nbatch)

    def _integrate_component(self, comp, g, cfg) -> QuadResult:
        n = g.nbatch
        idx = np.arange(n)
        if isinstance(comp, Atom2D):
            v = comp.weight * np.asarray(g(np.full(n, comp.point[0]), np.full(n, comp.point[1]), idx),
                                         dtype=complex)
            return QuadResult(v, np.zeros(n), np.ones(n, bool))
        if isinstance(comp, Product):
            if isinstance(g, SeparableIntegrand):
                return _sum_results([
                    _product_of(comp.m1.integrate_factor(f1, n, cfg),
                                comp.m2.integrate_factor(f2, n, cfg), coef)
                    for coef, f1, f2 in g.terms], n)
            return self._product_general(comp, g, cfg)
        if isinstance(comp, Line):
            a, c, dens = comp.slope, comp.intercept, comp.density
            extra = None
            if g.peaks2 is not None and a != 0:
                extra = (np.asarray(g.peaks2, dtype=float) - c) / a
            fn = lambda t, b: g(t, a * t + c, b) * dens(t)
            return quad_line(fn, n, comp.lo, comp.hi, cfg,
                             _bp(g.peaks1, extra, dens.breakpoints))
        if isinstance(comp, PlanarDensity):
            dens = comp.density
            results = []
            for x0, x1, y0, y1 in comp.boxes:
                if isinstance(g, SeparableIntegrand) and dens.factors is not None:
                    for alpha, beta in dens.factors:
                        for coef, f1, f2 in g.terms:
                            r1 = quad_line(lambda t, b, f=f1, w=alpha: f(t, b) * w(t), n, x0, x1, cfg,
                                           _bp(f1.peaks, alpha.breakpoints))
                            r2 = quad_line(lambda t, b, f=f2, w=beta: f(t, b) * w(t), n, y0, y1, cfg,
                                           _bp(f2.peaks, beta.breakpoints))
                            results.append(_product_of(r1, r2, coef))
                else:
                    fn = lambda t1, t2, b: g(t1, t2, b) * dens(t1, t2)
                    results.append(cubature_plane(fn, n, (x0, x1, y0, y1), cfg,
                                                  _bp(g.peaks1, dens.breakpoints1),
                                                  _bp(g.peaks2, dens.breakpoints2)))
            return _sum_results(results, n)
        raise TypeError(f"unknown measure component {comp!r}")

    def _product_general(self, comp: Product, g, cfg) -> QuadResult:
        n = g.nbatch
        idx = np.arange(n)
        results = []
        for x1, w1 in comp.m1.atoms():
            for x2, w2 in comp.m2.atoms():
                v = w1 * w2 * np.asarray(g(np.full(n, x1), np.full(n, x2), idx), dtype=complex)
                results.append(QuadResult(v, np.zeros(n), np.ones(n, bool)))
            for dens, lo, hi, scale, bps in _pieces(comp.m2):
                fn = (lambda t, b, x=x1, d=dens: g(np.full_like(t, x), t, b)
                      * (1.0 if d is None else d(t)))
                r = quad_line(fn, n, lo, hi, cfg, _bp(g.peaks2, bps))
                results.append(QuadResult(w1 * scale * r.value, w1 * scale * r.error, r.converged))
        for dens1, lo1, hi1, s1, bps1 in _pieces(comp.m1):
            for x2, w2 in comp.m2.atoms():
                fn = (lambda t, b, x=x2, d=dens1: g(t, np.full_like(t, x), b)
                      * (1.0 if d is None else d(t)))
                r = quad_line(fn, n, lo1, hi1, cfg, _bp(g.peaks1, bps1))
                results.append(QuadResult(w2 * s1 * r.value, w2 * s1 * r.error, r.converged))
            for dens2, lo2, hi2, s2, bps2 in _pieces(comp.m2):
                def fn(t1, t2, b, d1=dens1, d2=dens2):
                    out = g(t1, t2, b)
                    if d1 is not None:
                        out = out * d1(t1)
                    if d2 is not None:
                        out = out * d2(t2)
                    return out
                r = cubature_plane(fn, n, (lo1, hi1, lo2, hi2), cfg,
                                   _bp(g.peaks1, bps1), _bp(g.peaks2, bps2))
                results.append(QuadResult(s1 * s2 * r.value, s1 * s2 * r.error, r.converged))
        return _sum_results(results, n)

    # -- structure ---------------------------------------------------------

    def atoms(self):
        out = []
        for c in self.components:
            if isinstance(c, Atom2D) and c.weight > 0:
                out.append((c.point, c.weight))
            elif isinstance(c, Product):
                for x1, w1 in c.m1.atoms():
                    for x2, w2 in c.m2.atoms():
                        out.append(((x1, x2), w1 * w2))
        return out

    def atom_weight(self, point) -> float:
        p1, p2 = float(point[0]), float(point[1])
        total = 0.0
        for c in self.components:
            if isinstance(c, Atom2D) and c.point == (p1, p2):
                total += c.weight
            elif isinstance(c, Product):
                total += c.m1.atom_weight(p1) * c.m2.atom_weight(p2)
        return total

    def total_mass(self, cfg: QuadratureConfig = QuadratureConfig()) -> float:
        mass = 0.0
        for c in self.components:
            if isinstance(c, Atom2D):
                mass += c.weight
            elif isinstance(c, Product):
                m1 = c.m1.total_mass(cfg)
                m2 = c.m2.total_mass(cfg)
                mass += 0.0 if (m1 == 0 or m2 == 0) else m1 * m2
            elif isinstance(c, Line):
                mass += _density_mass(c.density, c.lo, c.hi, cfg)
            else:
                mass += _planar_mass(c, cfg)
        return mass


def _planar_mass(c: PlanarDensity, cfg) -> float:
    total = 0.0
    for x0, x1, y0, y1 in c.boxes:
        if c.density.factors is not None:
            for alpha, beta in c.density.factors:
                ma = _density_mass(alpha, x0, x1, cfg)
                mb = _density_mass(beta, y0, y1, cfg)
                total += 0.0 if (ma == 0 or mb == 0) else ma * mb
        else:
            res = cubature_plane(lambda a, b, _: c.density(a, b), 1, (x0, x1, y0, y1), cfg,
                                 _bp(None, c.density.breakpoints1), _bp(None, c.density.breakpoints2))
            if not res.converged[0]:
                return INF
            total += float(res.value[0].real)
    return total


# ---------------------------------------------------------------------------
# public operations


def _as_integrand(g, nbatch=1):
    if isinstance(g, (SeparableIntegrand, Integrand2D)):
        return g
    return Integrand2D(lambda t1, t2, b: g(t1, t2), 1)


def integrate_batch(mu: Measure2D, g, cfg: QuadratureConfig = QuadratureConfig()) -> QuadResult:
    """Integrate a (possibly batched) integrand; non-convergence is reported, not raised."""
    return mu.integrate(_as_integrand(g), cfg)


def integrate(mu: Measure2D, g, cfg: QuadratureConfig = QuadratureConfig()):
    """Integral of ``g`` against ``mu``.

    ``g`` is a vectorised callable ``g(t1, t2)`` or a batched
    :class:`SeparableIntegrand` / :class:`Integrand2D`.  Returns a complex
    scalar for a plain callable, an array for batched integrands.

    Raises
    ------
    QuadratureError
        If adaptive refinement does not converge, which is also how a
        non-admissible (too slowly decaying) integrand shows up.
    """
    res = integrate_batch(mu, g, cfg)
    res.raise_if_failed("integrate")
    if isinstance(g, (SeparableIntegrand, Integrand2D)):
        return res.value
    return complex(res.value[0])


def _unit_weight():
    w = Factor(lambda t, b: weight_factor(t))
    return SeparableIntegrand(1, ((np.ones(1), w, w),))


def growth_functional(mu: Measure2D, cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """``integral dmu / ((1 + t1**2)(1 + t2**2))``; ``math.inf`` when divergent."""
    for c in mu.components:
        if isinstance(c, Product):
            for m in (c.m1, c.m2):
                for p in m.components:
                    if (isinstance(p, DensityPiece1D) and p.density.tail_power >= 1.0
                            and (math.isinf(p.lo) or math.isinf(p.hi))):
                        return INF
    res = integrate_batch(mu, _unit_weight(), cfg)
    if not res.converged[0]:
        return INF
    return float(res.value[0].real)


def total_mass(mu: Measure2D, cfg: QuadratureConfig = QuadratureConfig()) -> float:
    return mu.total_mass(cfg)


def atom_at(mu: Measure2D, point) -> float:
    return mu.atom_weight(point)


# ---------------------------------------------------------------------------
# torus


def _lebesgue_circle(scale):
    return Measure1D((Lebesgue1D(scale, 0.0, TWO_PI),)) if scale > 0 else Measure1D()


@dataclass(frozen=True)
class TorusMeasure:
    """Finite positive measure on ``[0, 2 pi)**2``.

    ``edge1`` lives on ``{0} x (0, 2 pi)`` (a measure in ``s2``), ``edge2`` on
    ``(0, 2 pi) x {0}`` (a measure in ``s1``).  ``interior`` holds components
    given directly in angle coordinates; ``plane`` is a measure on the plane
    transported with density ``4 / ((1 + t1**2)(1 + t2**2))``.
    """

    corner_weight: float = 0.0
    edge1: Measure1D = field(default_factory=Measure1D)
    edge2: Measure1D = field(default_factory=Measure1D)
    interior: Measure2D = field(default_factory=Measure2D)
    plane: Optional[Measure2D] = None

    def __post_init__(self):
        if not self.corner_weight >= 0:
            raise ValueError("corner weight must be non-negative")

    def integrate(self, integrand, cfg: QuadratureConfig = QuadratureConfig()) -> QuadResult:
        g = _as_integrand(integrand)
        n = g.nbatch
        idx = np.arange(n)
        results = []
        if self.corner_weight:
            v = self.corner_weight * np.asarray(g(np.zeros(n), np.zeros(n), idx), dtype=complex)
            results.append(QuadResult(v, np.zeros(n), np.ones(n, bool)))
        results.append(self.edge1.integrate_factor(
            Factor(lambda s, b: g(np.zeros_like(s), s, b), g.peaks2), n, cfg))
        results.append(self.edge2.integrate_factor(
            Factor(lambda s, b: g(s, np.zeros_like(s), b), g.peaks1), n, cfg))
        results.append(self.interior.integrate(g, cfg))
        if self.plane is not None:
            results.append(self.plane.integrate(_pull_back(g), cfg))
        return _sum_results(results, n)

    def total_mass(self, cfg: QuadratureConfig = QuadratureConfig()) -> float:
        mass = (self.corner_weight + self.edge1.total_mass(cfg) + self.edge2.total_mass(cfg)
                + self.interior.total_mass(cfg))
        if self.plane is not None:
            mass += 4.0 * growth_functional(self.plane, cfg)
        return mass

    def interior_atoms(self):
        out = list(self.interior.atoms())
        if self.plane is not None:
            for (t1, t2), w in self.plane.atoms():
                out.append(((float(angle_of(t1)), float(angle_of(t2))),
                            4.0 * w * weight_factor(t1) * weight_factor(t2)))
        return out


def _angle_peaks(peaks):
    if peaks is None:
        return None
    p = np.asarray(peaks, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where((p > 0) & (p < TWO_PI), point_of_angle(np.clip(p, 1e-300, None)), np.nan)


def _pull_back(g):
    """Express an angle-coordinate integrand on the plane, including the 4/W factor."""
    if isinstance(g, SeparableIntegrand):
        def lift(f):
            return Factor(lambda t, b, f=f: f(angle_of(t), b) * 2.0 * weight_factor(t),
                          _angle_peaks(f.peaks))
        return SeparableIntegrand(g.nbatch, tuple((c, lift(f1), lift(f2)) for c, f1, f2 in g.terms))
    return Integrand2D(
        lambda t1, t2, b: g(angle_of(t1), angle_of(t2), b) * 4.0 * weight_factor(t1) * weight_factor(t2),
        g.nbatch, _angle_peaks(g.peaks1), _angle_peaks(g.peaks2))


def plane_to_torus(mu: Measure2D, b1: float = 0.0, b2: float = 0.0,
                   cfg: QuadratureConfig = QuadratureConfig()) -> TorusMeasure:
    """Transport representation data on the plane to the torus.

    The interior is the push-forward of ``4/W dmu``; the edges carry
    ``2 pi b1`` and ``2 pi b2`` times Lebesgue measure; the corner is empty.
    """
    if b1 < 0 or b2 < 0:
        raise ValueError("b1 and b2 must be non-negative")
    if math.isinf(growth_functional(mu, cfg)):
        raise DivergenceError("growth functional of the measure diverges")
    return TorusMeasure(0.0, _lebesgue_circle(TWO_PI * b1), _lebesgue_circle(TWO_PI * b2),
                        Measure2D(), mu)


# ---------------------------------------------------------------------------
# documents

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "e": math.e, "inf": math.inf}
_FUNCS = {"sqrt": math.sqrt}


def _number(x) -> float:
    """Numbers may be JSON numbers or short constant expressions such as ``"pi**2"``."""
    if x is None:
        raise MeasureSchemaError("missing number")
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return float(x)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise MeasureSchemaError(f"unsupported numeric expression {x!r}")

    try:
        return float(ev(ast.parse(str(x).replace("^", "**"), mode="eval")))
    except SyntaxError:
        raise MeasureSchemaError(f"bad numeric expression {x!r}") from None


def _bound(x, default):
    if x is None:
        return default
    return _number(x)


def _params(p):
    if isinstance(p, dict):
        return {k: _params(v) for k, v in p.items()}
    if isinstance(p, list):
        return [_params(v) for v in p]
    if isinstance(p, str):
        return _number(p)
    if isinstance(p, (int, float)) and not isinstance(p, bool):
        return float(p)
    return p


_NUM = {"type": ["number", "string"]}
_BOUND = {"type": ["number", "string", "null"]}
_SUPPORT_1D = {"type": "array", "items": _BOUND, "minItems": 2, "maxItems": 2}
_DENSITY_REF = {
    "type": "object",
    "required": ["name"],
    "properties": {"name": {"type": "string"}, "params": {"type": "object"}},
    "additionalProperties": False,
}
_KIND_1D = {
    "atom": {"required": ["kind", "location", "weight"],
             "properties": {"kind": {}, "location": _NUM, "weight": _NUM}},
    "lebesgue": {"required": ["kind"],
                 "properties": {"kind": {}, "scale": _NUM, "support": _SUPPORT_1D}},
    "density": {"required": ["kind", "density"],
                "properties": {"kind": {}, "density": _DENSITY_REF, "support": _SUPPORT_1D}},
}
_MEASURE = {
    "type": "object",
    "required": ["components"],
    "properties": {"components": {"type": "array", "items": {"type": "object",
                                                             "required": ["kind"]}}},
}
_KIND_2D = {
    "atom": {"required": ["kind", "point", "weight"],
             "properties": {"kind": {}, "weight": _NUM,
                            "point": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}}},
    "product": {"required": ["kind", "m1", "m2"],
                "properties": {"kind": {}, "m1": _MEASURE, "m2": _MEASURE}},
    "line": {"required": ["kind", "slope", "intercept", "density"],
             "properties": {"kind": {}, "slope": _NUM, "intercept": _NUM,
                            "density": _DENSITY_REF, "support": _SUPPORT_1D}},
    "planar_density": {"required": ["kind", "density"],
                       "properties": {"kind": {}, "density": _DENSITY_REF,
                                      "support": {"oneOf": [
                                          {"type": "string", "enum": sorted(NAMED_SUPPORTS)},
                                          {"type": "array", "items": {
                                              "type": "array", "items": _BOUND,
                                              "minItems": 4, "maxItems": 4}}]}}},
}


def _validate(doc, schema, where):
    schema = dict(schema, type="object", additionalProperties=False)
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise MeasureSchemaError(f"{where}: {exc.message}") from None


def _parse_1d(doc, where) -> Measure1D:
    _validate(doc, _MEASURE, where)
    comps = []
    for i, c in enumerate(doc["components"]):
        here = f"{where}.components[{i}]"
        kind = c.get("kind")
        if kind not in _KIND_1D:
            raise MeasureSchemaError(f"{here}: unknown 1-D component kind {kind!r}")
        _validate(c, _KIND_1D[kind], here)
        lo, hi = c.get("support", [None, None])
        lo, hi = _bound(lo, -INF), _bound(hi, INF)
        if kind == "atom":
            comps.append(Atom1D(_number(c["location"]), _number(c["weight"])))
        elif kind == "lebesgue":
            comps.append(Lebesgue1D(_number(c.get("scale", 1.0)), lo, hi))
        else:
            d = c["density"]
            comps.append(DensityPiece1D(density_1d(d["name"], _params(d.get("params", {}))), lo, hi))
    return Measure1D(tuple(comps))


def parse_measure(document) -> Measure2D:
    """Build a :class:`Measure2D` from a JSON document (``str``) or decoded ``dict``.

    Raises
    ------
    MeasureSchemaError
        Schema violation or malformed number.
    ValueError
        Negative weights, scales or densities.
    UnknownDensityError
        Density name not in the registry.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise MeasureSchemaError(f"not valid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise MeasureSchemaError("measure document must be an object")
    _validate({"components": document.get("components")} if "components" in document else document,
              _MEASURE, "measure")
    comps = []
    for i, c in enumerate(document["components"]):
        here = f"components[{i}]"
        kind = c.get("kind")
        if kind not in _KIND_2D:
            raise MeasureSchemaError(f"{here}: unknown component kind {kind!r}")
        _validate(c, _KIND_2D[kind], here)
        if kind == "atom":
            comps.append(Atom2D((_number(c["point"][0]), _number(c["point"][1])), _number(c["weight"])))
        elif kind == "product":
            comps.append(Product(_parse_1d(c["m1"], here + ".m1"), _parse_1d(c["m2"], here + ".m2")))
        elif kind == "line":
            lo, hi = c.get("support", [None, None])
            d = c["density"]
            comps.append(Line(_number(c["slope"]), _number(c["intercept"]),
                              density_1d(d["name"], _params(d.get("params", {}))),
                              _bound(lo, -INF), _bound(hi, INF)))
        else:
            d = c["density"]
            support = c.get("support", "all")
            if isinstance(support, str):
                boxes, name = NAMED_SUPPORTS[support], support
            else:
                boxes = tuple((_bound(b[0], -INF), _bound(b[1], INF), _bound(b[2], -INF),
                               _bound(b[3], INF)) for b in support)
                name = None
            comps.append(PlanarDensity(density_2d(d["name"], _params(d.get("params", {}))),
                                       boxes, name))
    return Measure2D(tuple(comps))


def _enc(x: float):
    if math.isinf(x):
        return None
    return x


def _doc_1d(m: Measure1D) -> dict:
    out = []
    for c in m.components:
        if isinstance(c, Atom1D):
            out.append({"kind": "atom", "location": c.location, "weight": c.weight})
        elif isinstance(c, Lebesgue1D):
            out.append({"kind": "lebesgue", "scale": c.scale, "support": [_enc(c.lo), _enc(c.hi)]})
        else:
            out.append({"kind": "density", "density": c.density.to_dict(),
                        "support": [_enc(c.lo), _enc(c.hi)]})
    return {"components": out}


def measure_to_document(mu: Measure2D) -> dict:
    """Inverse of :func:`parse_measure` (numbers are emitted as plain floats)."""
    out = []
    for c in mu.components:
        if isinstance(c, Atom2D):
            out.append({"kind": "atom", "point": list(c.point), "weight": c.weight})
        elif isinstance(c, Product):
            out.append({"kind": "product", "m1": _doc_1d(c.m1), "m2": _doc_1d(c.m2)})
        elif isinstance(c, Line):
            out.append({"kind": "line", "slope": c.slope, "intercept": c.intercept,
                        "density": c.density.to_dict(), "support": [_enc(c.lo), _enc(c.hi)]})
        else:
            support = c.support_name if c.support_name else [[_enc(v) for v in b] for b in c.boxes]
            out.append({"kind": "planar_density", "density": c.density.to_dict(), "support": support})
    return {"components": out}
