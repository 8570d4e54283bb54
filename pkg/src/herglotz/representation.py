"""Functions given by representation data, and the inverse problem of
reading ``a``, ``b1``, ``b2`` (and the constants at zero) off a black box.

A two-variable function in the Herglotz-Nevanlinna class is

    q(z) = a + b1 z1 + b2 z2 + (1/pi**2) * integral K(z, t) dmu(t)

and its one-variable counterpart is

    q(z) = a + b z + (1/pi) * integral (1/(t - z) - t/(1 + t**2)) dmu(t).

Evaluation is batched: every function here accepts scalars or arrays of
points and integrates all of them in one adaptive pass per chunk.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import LimitEstimate, StolzSchedule, nontangential_limit
from .kernels import kernel_peaks, disk_kernel_integrand, kernel_integrand, poisson_integrand
from .measures import (Measure1D, Measure2D, TorusMeasure, growth_functional,
                       plane_to_torus)
from .quadrature import Factor, QuadratureConfig, QuadResult

__all__ = [
    "HNRepresentation",
    "HNRepresentation1D",
    "DiskRepresentation",
    "evaluate",
    "evaluate_im_poisson",
    "evaluate_with_error",
    "oned_evaluate",
    "disk_evaluate",
    "rep_to_disk",
    "as_function",
    "extract_a",
    "extract_b",
    "extract_c",
    "set_threads",
]

PI2 = math.pi ** 2
CHUNK = 512
_THREADS = max(1, int(os.environ.get("HERGLOTZ_THREADS", "1") or 1))


def set_threads(n: int) -> None:
    """Number of worker threads used to integrate independent point chunks."""
    global _THREADS
    if n < 1:
        raise ValueError("thread count must be at least 1")
    _THREADS = int(n)


@dataclass(frozen=True)
class HNRepresentation:
    """Data ``(a, b1, b2, mu)``.  No certification happens on construction."""

    a: float = 0.0
    b1: float = 0.0
    b2: float = 0.0
    mu: Measure2D = field(default_factory=Measure2D)

    def __post_init__(self):
        if not (self.b1 >= 0 and self.b2 >= 0):
            raise ValueError("b1 and b2 must be non-negative")
        if not math.isfinite(self.a):
            raise ValueError("a must be a finite real number")

    def growth(self, cfg: QuadratureConfig = QuadratureConfig()) -> float:
        return growth_functional(self.mu, cfg)


@dataclass(frozen=True)
class HNRepresentation1D:
    a: float = 0.0
    b: float = 0.0
    mu: Measure1D = field(default_factory=Measure1D)

    def __post_init__(self):
        if not self.b >= 0:
            raise ValueError("b must be non-negative")


@dataclass(frozen=True)
class DiskRepresentation:
    """``f(w) = i im_f00 + (1/(4 pi**2)) integral disk_kernel(w, s) dnu(s)``."""

    im_f00: float = 0.0
    nu: TorusMeasure = field(default_factory=TorusMeasure)


def _points(z):
    z1, z2 = z
    z1, z2 = np.broadcast_arrays(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))
    if np.any(z1.imag <= 0) or np.any(z2.imag <= 0):
        raise ValueError("evaluation points must lie in the bi-upper half-plane")
    return z1, z2


def _chunked(build, mu, z1, z2, cfg) -> QuadResult:
    flat1, flat2 = z1.ravel(), z2.ravel()
    n = flat1.size
    value = np.zeros(n, dtype=complex)
    error = np.zeros(n)
    ok = np.ones(n, dtype=bool)
    if mu.is_zero:
        return QuadResult(value, error, ok)
    slices = [slice(i, i + CHUNK) for i in range(0, n, CHUNK)]
    run = lambda sl: mu.integrate(build(flat1[sl], flat2[sl]), cfg)
    if _THREADS > 1 and len(slices) > 1:
        with ThreadPoolExecutor(_THREADS) as pool:
            results = list(pool.map(run, slices))
    else:
        results = map(run, slices)
    # results come back in chunk order whatever the scheduling
    for sl, r in zip(slices, results):
        value[sl], error[sl], ok[sl] = r.value, r.error, r.converged
    return QuadResult(value, error, ok)


def _shape(x, like):
    x = np.asarray(x).reshape(like.shape)
    return x[()] if x.ndim == 0 else x


def evaluate_with_error(rep: HNRepresentation, z, cfg: QuadratureConfig = QuadratureConfig()):
    """Like :func:`evaluate` but returns ``(value, error_estimate, converged)`` arrays."""
    z1, z2 = _points(z)
    r = _chunked(kernel_integrand, rep.mu, z1, z2, cfg)
    value = rep.a + rep.b1 * z1.ravel() + rep.b2 * z2.ravel() + r.value / PI2
    return _shape(value, z1), _shape(r.error / PI2, z1), _shape(r.converged, z1)


def evaluate(rep: HNRepresentation, z, cfg: QuadratureConfig = QuadratureConfig()):
    """``q(z1, z2)`` from representation data; ``z = (z1, z2)``, scalars or arrays.

    Raises
    ------
    QuadratureError
        If any point fails to converge.
    """
    z1, z2 = _points(z)
    r = _chunked(kernel_integrand, rep.mu, z1, z2, cfg)
    r.raise_if_failed("evaluate")
    value = rep.a + rep.b1 * z1.ravel() + rep.b2 * z2.ravel() + r.value / PI2
    return _shape(value, z1)


def evaluate_im_poisson(rep: HNRepresentation, z, cfg: QuadratureConfig = QuadratureConfig(),
                        strict: bool = True):
    """``Im q`` through the Poisson kernel; non-negative by construction.

    With ``strict=False`` unconverged points return their best estimate
    instead of raising (useful inside an outer integral that tolerates noise).
    """
    z1, z2 = _points(z)
    r = _chunked(poisson_integrand, rep.mu, z1, z2, cfg)
    if strict:
        r.raise_if_failed("evaluate_im_poisson")
    value = rep.b1 * z1.ravel().imag + rep.b2 * z2.ravel().imag + r.value.real / PI2
    return _shape(value, z1)


def as_function(rep: HNRepresentation, cfg: QuadratureConfig = QuadratureConfig()):
    """Black-box view ``q(z1, z2)`` of a representation."""
    return lambda z1, z2: evaluate(rep, (z1, z2), cfg)


def _oned_factor(z):
    # 1/(t - z) - t/(1 + t**2) = (1 + t z) / ((t - z)(1 + t**2))
    return Factor(lambda t, b: (1.0 + t * z[b]) / ((t - z[b]) * (1.0 + t * t)), kernel_peaks(z))


def oned_evaluate(rep1: HNRepresentation1D, z, cfg: QuadratureConfig = QuadratureConfig()):
    """One-variable representation ``a + b z + (1/pi) integral (...) dmu``."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("evaluation points must lie in the upper half-plane")
    flat = z.ravel()
    r = rep1.mu.integrate_factor(_oned_factor(flat), flat.size, cfg)
    r.raise_if_failed("oned_evaluate")
    return _shape(rep1.a + rep1.b * flat + r.value / math.pi, z)


def disk_evaluate(drep: DiskRepresentation, w, cfg: QuadratureConfig = QuadratureConfig()):
    """``f(w1, w2)`` on the bidisk; ``w = (w1, w2)``."""
    w1, w2 = np.broadcast_arrays(np.asarray(w[0], dtype=complex), np.asarray(w[1], dtype=complex))
    if np.any(np.abs(w1) >= 1) or np.any(np.abs(w2) >= 1):
        raise ValueError("evaluation points must lie in the open bidisk")
    f1, f2 = w1.ravel(), w2.ravel()
    value = np.empty(f1.size, dtype=complex)
    for i in range(0, f1.size, CHUNK):
        sl = slice(i, i + CHUNK)
        r = drep.nu.integrate(disk_kernel_integrand(f1[sl], f2[sl]), cfg)
        r.raise_if_failed("disk_evaluate")
        value[sl] = r.value
    return _shape(1j * drep.im_f00 + value / (4.0 * PI2), w1)


def rep_to_disk(rep: HNRepresentation, cfg: QuadratureConfig = QuadratureConfig()) -> DiskRepresentation:
    """Disk data with ``q(z) = i f(cayley(z1), cayley(z2))``."""
    return DiskRepresentation(-rep.a, plane_to_torus(rep.mu, rep.b1, rep.b2, cfg))


# ---------------------------------------------------------------------------
# extraction from black boxes


def extract_a(q: Callable[[complex, complex], complex]) -> float:
    """``a = Re q(i, i)``."""
    return float(np.real(q(1j, 1j)))


def _slice(q, axis: int, anchor: complex):
    if axis == 1:
        return lambda z: q(z, anchor)
    if axis == 2:
        return lambda z: q(anchor, z)
    raise ValueError("axis must be 1 or 2")


def extract_b(q, axis: int, anchor: complex = 1j,
              schedule: StolzSchedule = StolzSchedule(), tol: float = 1e-6) -> LimitEstimate:
    """Non-tangential limit of ``q(z, anchor)/z`` (axis 1) or ``q(anchor, z)/z`` (axis 2)."""
    return nontangential_limit(_slice(q, axis, anchor), "infinity", schedule, tol)


def extract_c(q, axis: int, anchor: complex = 1j,
              schedule: StolzSchedule = StolzSchedule(), tol: float = 1e-6) -> LimitEstimate:
    """Non-tangential limit of ``z q(z, anchor)`` (axis 1) or ``z q(anchor, z)`` (axis 2) at 0."""
    return nontangential_limit(_slice(q, axis, anchor), "zero", schedule, tol)
