"""Half-plane / disk geometry and non-tangential limits.

The Cayley map ``z -> (z - i)/(z + i)`` takes the upper half-plane onto the
unit disk.  Limits "at infinity" or "at 0" are estimated along a ray inside a
Stolz sector ``theta <= arg z <= pi - theta`` by sampling on a geometric
radius schedule and fitting ``L + c/r`` to the tail of the samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "cayley",
    "inverse_cayley",
    "StolzSchedule",
    "LimitEstimate",
    "extrapolate_limit",
    "nontangential_limit",
]

_EPS = np.finfo(float).eps


class DomainError(ValueError):
    """Argument outside the domain of a map."""


def cayley(z, boundary: bool = False):
    """``(z - i) / (z + i)``.

    With ``boundary=True`` real arguments are accepted as well and land on
    the unit circle minus ``1``.
    """
    z = np.asarray(z, dtype=complex)
    im = z.imag
    bad = im < 0 if boundary else im <= 0
    if np.any(bad) or np.any(np.isnan(z)):
        raise DomainError("cayley: argument must lie in the upper half-plane"
                          + (" or on the real line" if boundary else ""))
    w = (z - 1j) / (z + 1j)
    return w[()] if w.ndim == 0 else w


def inverse_cayley(w, boundary: bool = False):
    """``i (1 + w) / (1 - w)``; ``boundary=True`` admits ``|w| = 1``, ``w != 1``."""
    w = np.asarray(w, dtype=complex)
    r = np.abs(w)
    bad = (r > 1.0 + 1e-12) if boundary else (r >= 1.0)
    if np.any(bad) or np.any(w == 1.0) or np.any(np.isnan(w)):
        raise DomainError("inverse_cayley: argument must lie in the open unit disk"
                          + (" or on the circle minus 1" if boundary else ""))
    z = 1j * (1.0 + w) / (1.0 - w)
    return z[()] if z.ndim == 0 else z


@dataclass(frozen=True)
class StolzSchedule:
    """Points ``r e^{i direction}`` on a Stolz ray.

    Attributes
    ----------
    theta : aperture; the ray must satisfy ``theta <= direction <= pi - theta``.
    radii : strictly increasing positive radii.
    direction : ray angle, vertical by default.
    """

    theta: float = math.pi / 4
    radii: tuple = field(default_factory=lambda: tuple(2.0 ** k for k in range(41)))
    direction: float = math.pi / 2

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if not 0 < self.theta <= math.pi / 2:
            raise ValueError("theta must lie in (0, pi/2]")
        if not self.theta - 1e-15 <= self.direction <= math.pi - self.theta + 1e-15:
            raise ValueError("direction lies outside the Stolz sector")
        r = np.asarray(self.radii)
        if r.size < 2 or np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValueError("radii must be positive and strictly increasing")

    @classmethod
    def geometric(cls, kmin: int = 0, kmax: int = 40, base: float = 2.0,
                  theta: float = math.pi / 4, direction: float = math.pi / 2):
        return cls(theta, tuple(base ** k for k in range(kmin, kmax + 1)), direction)

    def with_direction(self, direction: float) -> "StolzSchedule":
        return StolzSchedule(self.theta, self.radii, direction)

    @property
    def unit(self) -> complex:
        return complex(math.cos(self.direction), math.sin(self.direction))

    def points(self, toward: str = "infinity") -> np.ndarray:
        """Sample points approaching ``infinity`` (``|z| = r``) or ``zero`` (``|z| = 1/r``)."""
        r = np.asarray(self.radii)
        if toward == "infinity":
            return r * self.unit
        if toward == "zero":
            return self.unit / r
        raise ValueError(f"unknown approach {toward!r}")


@dataclass(frozen=True)
class LimitEstimate:
    value: complex
    error_estimate: float
    converged: bool
    samples_used: int
    diverged: bool = False

    def to_dict(self) -> dict:
        v = complex(self.value)
        return {"re": v.real, "im": v.imag, "error_estimate": self.error_estimate,
                "converged": self.converged, "samples_used": self.samples_used,
                "diverged": self.diverged}


_TAIL_MODELS = ((1.0,), (0.5, 1.0))


def _fit(r, g, powers=(1.0,)):
    """Least-squares ``g ~ L + sum_p c_p r**(-p)``; returns ``L``."""
    a = np.stack([np.ones_like(r)] + [r ** -p for p in powers], axis=1)
    # columns are scaled so the system is well conditioned
    scale = np.abs(a).max(axis=0)
    scale[scale == 0] = 1.0
    coef, *_ = np.linalg.lstsq(a / scale, g.astype(complex), rcond=None)
    return coef[0] / scale[0]


def extrapolate_limit(r: Sequence[float], g: Sequence[complex], tol: float = 1e-6,
                      window: int = 8, n_windows: int = 3) -> LimitEstimate:
    """Limit of ``g(r)`` as ``r -> inf`` from samples on increasing ``r``.

    The value is the ``L + c/r`` fit on the last ``window`` samples; the error
    estimate is the spread of ``L`` over the last ``n_windows`` windows plus a
    rounding floor.  Non-finite samples truncate the sequence.
    """
    r = np.asarray(r, dtype=float)
    g = np.asarray(g, dtype=complex)
    finite = np.isfinite(g)
    if not finite.all():
        stop = int(np.argmin(finite))
        r, g = r[:stop], g[:stop]
    n = g.size
    if n >= 5:
        tail = np.abs(g[-5:])
        if np.all(np.diff(tail) > 0) and tail[-1] >= 1.5 * tail[0] and tail[0] > 0:
            return LimitEstimate(complex(math.inf, 0.0), math.inf, False, n, True)
    if n < 2:
        return LimitEstimate(complex(g[-1]) if n else complex(math.nan), math.inf, False, n)
    w = min(window, n)
    ends = [n - k for k in range(n_windows) if n - k - w >= 0] or [n]
    floor = 64 * _EPS * float(np.max(np.abs(g[-w:])))
    best = None
    # L + c/r first; algebraic-branch tails (sqrt) decay like r**-1/2
    for powers in _TAIL_MODELS:
        fits = [_fit(r[e - w:e], g[e - w:e], powers) for e in ends]
        value = complex(fits[0])
        err = float(max(abs(f - value) for f in fits) + floor)
        est = LimitEstimate(value, err, bool(err <= tol and len(fits) > 1), n)
        if est.converged:
            return est
        if best is None or err < best.error_estimate:
            best = est
    return best


def nontangential_limit(f: Callable[[complex], complex], mode: str = "infinity",
                        schedule: StolzSchedule = StolzSchedule(),
                        tol: float = 1e-6) -> LimitEstimate:
    """Non-tangential limit of ``f(z)/z`` at infinity or of ``z f(z)`` at zero.

    Parameters
    ----------
    f : scalar function on the upper half-plane.
    mode : ``"infinity"`` for ``f(z)/z`` as ``z -> inf``, ``"zero"`` for
        ``z f(z)`` as ``z -> 0``.
    """
    r = np.asarray(schedule.radii)
    if mode == "infinity":
        z = schedule.points("infinity")
        g = np.array([complex(f(complex(p))) / p for p in z])
    elif mode == "zero":
        z = schedule.points("zero")
        g = np.array([p * complex(f(complex(p))) for p in z])
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return extrapolate_limit(r, g, tol)
