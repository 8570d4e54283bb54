"""Kernels of the two-variable representation.

Pointwise kernels accept broadcastable arrays.  The ``*_integrand``
builders return batched :class:`~herglotz.quadrature.SeparableIntegrand`
objects, one batch entry per evaluation point, which is how measures are
integrated efficiently.

Notation: ``W(t) = (1 + t1**2)(1 + t2**2)`` and

    A(z, t) = 1/(t - z) - 1/(t + i) = (z + i) / ((t - z)(t + i)).

The product form of ``A`` avoids cancellation for large ``|t|``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import Factor, SeparableIntegrand

__all__ = [
    "KernelPoint",
    "kernel_K",
    "poisson_P",
    "nevanlinna_integrand",
    "disk_kernel",
    "kernel_integrand",
    "poisson_integrand",
    "nevanlinna_condition_integrand",
    "weight_integrand",
    "disk_kernel_integrand",
    "moment_integrand",
    "psi_integrand",
    "kernel_peaks",
]

I = 1j


@dataclass(frozen=True)
class KernelPoint:
    """A point ``z`` of the bi-upper half-plane paired with a real point ``t``."""

    z1: complex
    z2: complex
    t1: float
    t2: float

    def __post_init__(self):
        if not (complex(self.z1).imag > 0 and complex(self.z2).imag > 0):
            raise ValueError("KernelPoint requires Im z1 > 0 and Im z2 > 0")

    @property
    def args(self):
        return complex(self.z1), complex(self.z2), float(self.t1), float(self.t2)


def _args(p, z2, t1, t2):
    if isinstance(p, KernelPoint):
        return p.args
    return p, z2, t1, t2


def _a(z, t):
    return (z + I) / ((t - z) * (t + I))


def _w(t):
    return 1.0 / (1.0 + t * t)


def kernel_K(p, z2=None, t1=None, t2=None):
    """``-(i/2) A(z1, t1) A(z2, t2) - i / W(t)``.

    Called either with a :class:`KernelPoint` or as ``kernel_K(z1, z2, t1, t2)``
    with broadcastable arrays.
    """
    z1, z2, t1, t2 = _args(p, z2, t1, t2)
    z1, z2 = np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex)
    t1, t2 = np.asarray(t1, dtype=float), np.asarray(t2, dtype=float)
    return -0.5 * I * _a(z1, t1) * _a(z2, t2) - I * _w(t1) * _w(t2)


def _p1(z, t):
    return z.imag / np.abs(t - z) ** 2


def poisson_P(p, z2=None, t1=None, t2=None):
    """Poisson kernel ``Im z1 Im z2 / (|t1 - z1|**2 |t2 - z2|**2)``."""
    z1, z2, t1, t2 = _args(p, z2, t1, t2)
    z1, z2 = np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex)
    return _p1(z1, np.asarray(t1, dtype=float)) * _p1(z2, np.asarray(t2, dtype=float))


def _b1(z1, t):
    zc = np.conj(z1)
    return (zc + I) / ((t - zc) * (t + I))


def _b2(z2, t):
    return (z2 - I) / ((t - z2) * (t - I))


def nevanlinna_integrand(p, z2=None, t1=None, t2=None):
    """``Re[(1/(t1 - conj z1) - 1/(t1 + i)) (1/(t2 - z2) - 1/(t2 - i))]``."""
    z1, z2, t1, t2 = _args(p, z2, t1, t2)
    z1, z2 = np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex)
    return np.real(_b1(z1, np.asarray(t1, dtype=float)) * _b2(z2, np.asarray(t2, dtype=float)))


def disk_kernel(w1, w2, s1, s2):
    """``2 / ((1 - w1 e^{-i s1})(1 - w2 e^{-i s2})) - 1``."""
    w1, w2 = np.asarray(w1, dtype=complex), np.asarray(w2, dtype=complex)
    return 2.0 / ((1.0 - w1 * np.exp(-I * np.asarray(s1, dtype=float)))
                  * (1.0 - w2 * np.exp(-I * np.asarray(s2, dtype=float)))) - 1.0


# ---------------------------------------------------------------------------
# batched separable integrands


_LADDER = 8.0 ** np.arange(1, 16)


def kernel_peaks(z):
    """Breakpoints where factors built from ``1/(t - z)`` vary fastest.

    Besides ``Re z`` and ``Re z +- Im z`` there are two geometric ladders on
    which such factors behave like ``1/t``: offsets ``Im z * 8**k`` around
    ``Re z`` when ``Im z`` is small, and ``+-8**k`` up to ``|z|`` when ``z`` is
    far out.  Each ladder segment then needs only a few panels.
    """
    z = np.asarray(z, dtype=complex).ravel()
    x, y = z.real, np.abs(z.imag)
    far = np.where(_LADDER[None, :] < np.abs(z)[:, None], _LADDER[None, :], np.nan)
    off = y[:, None] * _LADDER[None, :]
    off = np.where(off < 4.0 * np.maximum(np.abs(x), 1.0)[:, None], off, np.nan)
    return np.concatenate([np.stack([x, x - y, x + y], axis=1),
                           far, -far, x[:, None] - off, x[:, None] + off], axis=1)


def _ones(n):
    return np.ones(n, dtype=complex)


def _flat(z):
    return np.atleast_1d(np.asarray(z, dtype=complex)).ravel()


def kernel_integrand(z1, z2) -> SeparableIntegrand:
    """``t -> K(z, t)`` for each ``(z1[k], z2[k])``."""
    z1, z2 = np.broadcast_arrays(_flat(z1), _flat(z2))
    n = z1.size
    f1 = Factor(lambda t, b: _a(z1[b], t), kernel_peaks(z1))
    f2 = Factor(lambda t, b: _a(z2[b], t), kernel_peaks(z2))
    w = Factor(lambda t, b: _w(t))
    return SeparableIntegrand(n, ((-0.5 * I * _ones(n), f1, f2), (-I * _ones(n), w, w)))


def poisson_integrand(z1, z2) -> SeparableIntegrand:
    z1, z2 = np.broadcast_arrays(_flat(z1), _flat(z2))
    n = z1.size
    f1 = Factor(lambda t, b: _p1(z1[b], t), kernel_peaks(z1))
    f2 = Factor(lambda t, b: _p1(z2[b], t), kernel_peaks(z2))
    return SeparableIntegrand(n, ((_ones(n), f1, f2),))


def nevanlinna_condition_integrand(z1, z2) -> SeparableIntegrand:
    """Real part written as half the sum of the product and its conjugate."""
    z1, z2 = np.broadcast_arrays(_flat(z1), _flat(z2))
    n = z1.size
    f1 = Factor(lambda t, b: _b1(z1[b], t), kernel_peaks(z1))
    f2 = Factor(lambda t, b: _b2(z2[b], t), kernel_peaks(z2))
    g1 = Factor(lambda t, b: np.conj(_b1(z1[b], t)), kernel_peaks(z1))
    g2 = Factor(lambda t, b: np.conj(_b2(z2[b], t)), kernel_peaks(z2))
    return SeparableIntegrand(n, ((0.5 * _ones(n), f1, f2), (0.5 * _ones(n), g1, g2)))


def weight_integrand(n: int = 1) -> SeparableIntegrand:
    """``1 / W(t)``."""
    w = Factor(lambda t, b: _w(t))
    return SeparableIntegrand(n, ((_ones(n), w, w),))


def _angle_peak(w):
    w = np.asarray(w, dtype=complex).ravel()
    return np.mod(np.angle(w), 2 * np.pi)[:, None]


def disk_kernel_integrand(w1, w2) -> SeparableIntegrand:
    """``s -> disk_kernel(w, s)`` on the torus, batched over ``w``."""
    w1, w2 = np.broadcast_arrays(_flat(w1), _flat(w2))
    n = w1.size
    d1 = Factor(lambda s, b: 1.0 / (1.0 - w1[b] * np.exp(-I * s)), _angle_peak(w1))
    d2 = Factor(lambda s, b: 1.0 / (1.0 - w2[b] * np.exp(-I * s)), _angle_peak(w2))
    one = Factor(lambda s, b: np.ones_like(s, dtype=complex))
    return SeparableIntegrand(n, ((2.0 * _ones(n), d1, d2), (-_ones(n), one, one)))


def moment_integrand(m1, m2) -> SeparableIntegrand:
    """``s -> exp(i m1 s1) exp(i m2 s2)``, batched over index pairs."""
    m1, m2 = np.broadcast_arrays(np.atleast_1d(np.asarray(m1, dtype=float)).ravel(),
                                 np.atleast_1d(np.asarray(m2, dtype=float)).ravel())
    n = m1.size
    e1 = Factor(lambda s, b: np.exp(I * m1[b] * s))
    e2 = Factor(lambda s, b: np.exp(I * m2[b] * s))
    return SeparableIntegrand(n, ((_ones(n), e1, e2),))


def psi_integrand(psi) -> SeparableIntegrand:
    """Wrap a test function exposing ``factors`` as a single-entry integrand."""
    terms = tuple((np.array([c], dtype=complex),
                   Factor(lambda t, b, f=f: f(t)), Factor(lambda t, b, g=g: g(t)))
                  for c, f, g in psi.factors)
    return SeparableIntegrand(1, terms)
