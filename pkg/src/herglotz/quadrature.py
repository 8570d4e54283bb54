"""Batched adaptive Gauss-Kronrod quadrature on the real line and plane.

Every interval is split at -1, 0, 1 and any caller supplied breakpoints.
Each piece is compactified with the tangent substitution: ``t = tan(u)`` on
``[-1, 1]`` and ``t = +-cot(v)`` on the tails, so that ``|dt| = (1 + t**2) du``
everywhere and an integrand bounded by ``C / (1 + t**2)`` becomes bounded.
The tail form keeps full precision as ``|t| -> inf``.  A cubic smoothstep
grading is applied inside each piece to absorb algebraic endpoint
singularities (square-root densities, slowly decaying tails).

Integrands are evaluated in batches: ``fn(t, b)`` receives node locations
``t`` and the batch index ``b`` of each node, so a single call can integrate
hundreds of related integrands (e.g. one kernel per evaluation point).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "QuadResult",
    "Factor",
    "SeparableIntegrand",
    "Integrand2D",
    "quad_line",
    "cubature_plane",
    "nested_plane",
    "merge_peaks",
]

# Gauss-Kronrod 7/15 (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[13, 11, 9]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]

_MID, _RIGHT, _LEFT = 0, 1, 2
_NODE_CHUNK = 2_000_000


class QuadratureError(ArithmeticError):
    """Adaptive refinement did not reach the requested tolerance."""


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-7
    max_refinements: int = 24
    max_nodes: int = 40_000_000

    def scaled(self, factor: float) -> "QuadratureConfig":
        return QuadratureConfig(self.abs_tol * factor, self.rel_tol * factor,
                                self.max_refinements, self.max_nodes)


@dataclass
class QuadResult:
    value: np.ndarray
    error: np.ndarray
    converged: np.ndarray

    def raise_if_failed(self, what: str = "integral") -> None:
        if not np.all(self.converged):
            bad = np.flatnonzero(~self.converged)
            raise QuadratureError(
                f"{what}: no convergence for {bad.size} of {self.converged.size} "
                f"batch entries (first index {bad[0]}, error estimate "
                f"{self.error[bad[0]]:.3g})")


@dataclass(frozen=True)
class Factor:
    """One-dimensional factor ``fn(t, b)`` of a separable integrand.

    ``peaks`` holds, per batch entry, locations where the factor varies on a
    short scale; they become quadrature breakpoints.
    """

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    peaks: Optional[np.ndarray] = None

    def __call__(self, t, b):
        return self.fn(t, b)


@dataclass(frozen=True)
class SeparableIntegrand:
    """Sum of ``coef * f(t1) * g(t2)`` terms, one coefficient per batch entry."""

    nbatch: int
    terms: tuple

    def __call__(self, t1, t2, b):
        out = 0.0
        for coef, f1, f2 in self.terms:
            out = out + coef[b] * f1(t1, b) * f2(t2, b)
        return out

    @property
    def peaks1(self):
        return merge_peaks(*(f1.peaks for _, f1, _ in self.terms))

    @property
    def peaks2(self):
        return merge_peaks(*(f2.peaks for _, _, f2 in self.terms))


@dataclass(frozen=True)
class Integrand2D:
    """General (non-separable) batched integrand ``fn(t1, t2, b)``."""

    fn: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    nbatch: int = 1
    peaks1: Optional[np.ndarray] = None
    peaks2: Optional[np.ndarray] = None

    def __call__(self, t1, t2, b):
        return self.fn(t1, t2, b)


def merge_peaks(*peaks):
    parts = [np.atleast_2d(np.asarray(p, dtype=float)) for p in peaks if p is not None]
    if not parts:
        return None
    n = max(p.shape[0] for p in parts)
    parts = [np.broadcast_to(p, (n, p.shape[1])) for p in parts]
    return np.concatenate(parts, axis=1)


# ---------------------------------------------------------------------------
# segments and coordinate maps


def _segments(nbatch: int, lo: float, hi: float, breakpoints) -> tuple:
    """Split ``[lo, hi]`` per batch entry; returns flat arrays (b, kind, c0, c1)."""
    fixed = np.array([lo, hi, -1.0, 0.0, 1.0])
    pts = np.broadcast_to(fixed, (nbatch, fixed.size))
    if breakpoints is not None:
        bp = np.atleast_2d(np.asarray(breakpoints, dtype=float))
        bp = np.broadcast_to(bp, (nbatch, bp.shape[1]))
        pts = np.concatenate([pts, bp], axis=1)
    pts = np.array(pts, dtype=float)
    outside = (pts < lo) | (pts > hi) | ~np.isfinite(pts)
    outside &= ~((pts == lo) | (pts == hi))
    pts[outside] = np.nan
    pts.sort(axis=1)
    dup = np.zeros_like(pts, dtype=bool)
    dup[:, 1:] = pts[:, 1:] == pts[:, :-1]
    pts[dup] = np.nan
    pts.sort(axis=1)

    p, q = pts[:, :-1], pts[:, 1:]
    valid = ~np.isnan(p) & ~np.isnan(q) & (q > p)
    b = np.broadcast_to(np.arange(nbatch)[:, None], p.shape)[valid]
    p, q = p[valid], q[valid]

    kind = np.full(p.shape, _MID)
    kind[p >= 1.0] = _RIGHT
    kind[q <= -1.0] = _LEFT
    with np.errstate(divide="ignore"):
        c0 = np.where(kind == _MID, np.arctan(p),
                      np.where(kind == _RIGHT, np.arctan(1.0 / q), np.arctan(-1.0 / p)))
        c1 = np.where(kind == _MID, np.arctan(q),
                      np.where(kind == _RIGHT, np.arctan(1.0 / p), np.arctan(-1.0 / q)))
    return b, kind, c0, c1


def _map_nodes(kind, c0, c1, w0, w1):
    """Nodes and Jacobians for panels ``[w0, w1]`` of graded segments.

    Returns arrays of shape (npanel, 15).
    """
    half = 0.5 * (w1 - w0)
    w = (0.5 * (w0 + w1))[:, None] + half[:, None] * NODES
    s = w * w * (3.0 - 2.0 * w)
    ds = 6.0 * w * (1.0 - w)
    width = (c1 - c0)[:, None]
    c = c0[:, None] + width * s
    mid = (kind == _MID)[:, None]
    sin_c, cos_c = np.sin(c), np.cos(c)
    # middle: t = tan c; tails: t = +-cot c.  In both, 1 + t**2 = 1/den**2
    num = np.where(mid, sin_c, cos_c)
    den = np.where(mid, cos_c, sin_c)
    inv = 1.0 / den
    sign = np.where(kind == _LEFT, -1.0, 1.0)[:, None]
    t = sign * num * inv
    jac = inv * inv * (width * half[:, None]) * ds
    return t, jac


def _eval_panels(fn, b, kind, c0, c1, w0, w1):
    n = b.size
    kr = np.empty(n, dtype=complex)
    ga = np.empty(n, dtype=complex)
    step = max(1, _NODE_CHUNK // 15)
    for i in range(0, n, step):
        sl = slice(i, i + step)
        t, jac = _map_nodes(kind[sl], c0[sl], c1[sl], w0[sl], w1[sl])
        bb = np.broadcast_to(b[sl, None], t.shape)
        vals = np.asarray(fn(t, bb), dtype=complex) * jac
        vals = np.where(jac == 0.0, 0.0, vals)
        kr[sl] = vals @ KRONROD_WEIGHTS
        ga[sl] = vals @ GAUSS_WEIGHTS
    return kr, np.abs(kr - ga)


def _batch_sum(b, x, nbatch):
    if np.iscomplexobj(x):
        return (np.bincount(b, x.real, nbatch) + 1j * np.bincount(b, x.imag, nbatch))
    return np.bincount(b, x, nbatch)


def quad_line(fn, nbatch: int = 1, lo: float = -np.inf, hi: float = np.inf,
              cfg: QuadratureConfig = QuadratureConfig(), breakpoints=None) -> QuadResult:
    """Integrate ``fn(t, b)`` over ``[lo, hi]`` for every batch index ``b``.

    Global adaptive bisection: while the summed error estimate of a batch
    entry exceeds its tolerance, every panel whose error exceeds
    ``tol / n_panels`` is bisected.  An entry fails when a panel that needs
    splitting is already ``cfg.max_refinements`` levels deep.
    """
    if hi <= lo:
        zero = np.zeros(nbatch)
        return QuadResult(zero.astype(complex), zero, np.ones(nbatch, bool))
    b, kind, c0, c1 = _segments(nbatch, lo, hi, breakpoints)
    w0 = np.zeros(b.size)
    w1 = np.ones(b.size)
    depth = np.zeros(b.size, dtype=int)
    val, err = _eval_panels(fn, b, kind, c0, c1, w0, w1)
    failed = np.zeros(nbatch, bool)
    nodes_used = 15 * b.size

    while True:
        total = _batch_sum(b, val, nbatch)
        etot = _batch_sum(b, err, nbatch)
        count = np.bincount(b, minlength=nbatch)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total))
        done = etot <= tol
        active = ~done & ~failed
        if not active.any():
            break
        split = active[b] & (err > tol[b] / np.maximum(count[b], 1))
        too_deep = split & (depth >= cfg.max_refinements)
        if too_deep.any():
            failed[np.unique(b[too_deep])] = True
            split &= ~failed[b]
        if nodes_used + 30 * np.count_nonzero(split) > cfg.max_nodes:
            failed |= active
            break
        if not split.any():
            break
        keep = ~split
        sb, sk, s0, s1 = b[split], kind[split], c0[split], c1[split]
        sw0, sw1, sd = w0[split], w1[split], depth[split] + 1
        mid = 0.5 * (sw0 + sw1)
        nb = np.concatenate([sb, sb])
        nk = np.concatenate([sk, sk])
        n0 = np.concatenate([s0, s0])
        n1 = np.concatenate([s1, s1])
        nw0 = np.concatenate([sw0, mid])
        nw1 = np.concatenate([mid, sw1])
        nd = np.concatenate([sd, sd])
        nval, nerr = _eval_panels(fn, nb, nk, n0, n1, nw0, nw1)
        nodes_used += 15 * nb.size
        b = np.concatenate([b[keep], nb])
        kind = np.concatenate([kind[keep], nk])
        c0 = np.concatenate([c0[keep], n0])
        c1 = np.concatenate([c1[keep], n1])
        w0 = np.concatenate([w0[keep], nw0])
        w1 = np.concatenate([w1[keep], nw1])
        depth = np.concatenate([depth[keep], nd])
        val = np.concatenate([val[keep], nval])
        err = np.concatenate([err[keep], nerr])

    total = _batch_sum(b, val, nbatch)
    etot = _batch_sum(b, err, nbatch)
    tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total))
    return QuadResult(total, etot, (etot <= tol) & ~failed)


# ---------------------------------------------------------------------------
# plane


def _eval_cells(fn, cells):
    (b, k1, a1, e1, u0, u1, k2, a2, e2, v0, v1) = cells
    n = b.size
    kk = np.empty(n, dtype=complex)
    err1 = np.empty(n)
    err2 = np.empty(n)
    step = max(1, _NODE_CHUNK // 225)
    for i in range(0, n, step):
        sl = slice(i, i + step)
        t1, j1 = _map_nodes(k1[sl], a1[sl], e1[sl], u0[sl], u1[sl])
        t2, j2 = _map_nodes(k2[sl], a2[sl], e2[sl], v0[sl], v1[sl])
        T1 = np.broadcast_to(t1[:, :, None], t1.shape + (15,))
        T2 = np.broadcast_to(t2[:, None, :], t1.shape + (15,))
        bb = np.broadcast_to(b[sl, None, None], T1.shape)
        jac = j1[:, :, None] * j2[:, None, :]
        vals = np.asarray(fn(T1, T2, bb), dtype=complex) * jac
        vals = np.where(jac == 0.0, 0.0, vals)
        inner_k = vals @ KRONROD_WEIGHTS
        inner_g = vals @ GAUSS_WEIGHTS
        r_kk = inner_k @ KRONROD_WEIGHTS
        r_gk = inner_k @ GAUSS_WEIGHTS
        r_kg = inner_g @ KRONROD_WEIGHTS
        kk[sl] = r_kk
        err1[sl] = np.abs(r_kk - r_gk)
        err2[sl] = np.abs(r_kk - r_kg)
    return kk, err1, err2


def cubature_plane(fn, nbatch: int = 1,
                   box: Sequence[float] = (-np.inf, np.inf, -np.inf, np.inf),
                   cfg: QuadratureConfig = QuadratureConfig(),
                   breakpoints1=None, breakpoints2=None) -> QuadResult:
    """Integrate ``fn(t1, t2, b)`` over an axis-aligned box.

    Tensor-product Gauss-Kronrod cells on the compactified, graded
    coordinates; a cell is bisected along the axis that contributes the
    larger part of its error estimate.
    """
    x0, x1, y0, y1 = box
    if x1 <= x0 or y1 <= y0:
        zero = np.zeros(nbatch)
        return QuadResult(zero.astype(complex), zero, np.ones(nbatch, bool))
    sb1 = _segments(nbatch, x0, x1, breakpoints1)
    sb2 = _segments(nbatch, y0, y1, breakpoints2)
    cols = [[] for _ in range(11)]
    for bi in range(nbatch):
        m1 = sb1[0] == bi
        m2 = sb2[0] == bi
        n1, n2 = np.count_nonzero(m1), np.count_nonzero(m2)
        rep1 = [np.repeat(a[m1], n2) for a in sb1[1:]]
        rep2 = [np.tile(a[m2], n1) for a in sb2[1:]]
        n = n1 * n2
        cols[0].append(np.full(n, bi))
        for j, arr in enumerate(rep1):
            cols[1 + j].append(arr)
        cols[4].append(np.zeros(n))
        cols[5].append(np.ones(n))
        for j, arr in enumerate(rep2):
            cols[6 + j].append(arr)
        cols[9].append(np.zeros(n))
        cols[10].append(np.ones(n))
    cells = [np.concatenate(c) for c in cols]
    d1 = np.zeros(cells[0].size, dtype=int)
    d2 = np.zeros(cells[0].size, dtype=int)
    val, e1, e2 = _eval_cells(fn, cells)
    failed = np.zeros(nbatch, bool)
    nodes_used = 225 * cells[0].size

    while True:
        b = cells[0]
        err = e1 + e2
        total = _batch_sum(b, val, nbatch)
        etot = _batch_sum(b, err, nbatch)
        count = np.bincount(b, minlength=nbatch)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total))
        active = ~(etot <= tol) & ~failed
        if not active.any():
            break
        split = active[b] & (err > tol[b] / np.maximum(count[b], 1))
        axis1 = e1 >= e2
        axis1 = np.where(d1 >= cfg.max_refinements, False, axis1)
        axis1 = np.where(d2 >= cfg.max_refinements, True, axis1)
        too_deep = split & (d1 >= cfg.max_refinements) & (d2 >= cfg.max_refinements)
        if too_deep.any():
            failed[np.unique(b[too_deep])] = True
            split &= ~failed[b]
        if nodes_used + 450 * np.count_nonzero(split) > cfg.max_nodes:
            failed |= active
            break
        if not split.any():
            break
        keep = ~split
        new = []
        new_d1, new_d2 = [], []
        for along1 in (True, False):
            sel = split & (axis1 == along1)
            if not sel.any():
                continue
            c = [a[sel] for a in cells]
            lo_i, hi_i = (4, 5) if along1 else (9, 10)
            mid = 0.5 * (c[lo_i] + c[hi_i])
            left = list(c)
            right = list(c)
            left[hi_i] = mid
            right[lo_i] = mid
            new.append(left)
            new.append(right)
            dd1, dd2 = d1[sel] + along1, d2[sel] + (not along1)
            new_d1 += [dd1, dd1]
            new_d2 += [dd2, dd2]
        ncells = [np.concatenate([part[j] for part in new]) for j in range(11)]
        nval, ne1, ne2 = _eval_cells(fn, ncells)
        nodes_used += 225 * ncells[0].size
        cells = [np.concatenate([cells[j][keep], ncells[j]]) for j in range(11)]
        d1 = np.concatenate([d1[keep]] + new_d1)
        d2 = np.concatenate([d2[keep]] + new_d2)
        val = np.concatenate([val[keep], nval])
        e1 = np.concatenate([e1[keep], ne1])
        e2 = np.concatenate([e2[keep], ne2])

    b = cells[0]
    total = _batch_sum(b, val, nbatch)
    etot = _batch_sum(b, e1 + e2, nbatch)
    tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total))
    return QuadResult(total, etot, (etot <= tol) & ~failed)


def nested_plane(fn, nbatch: int = 1,
                 box: Sequence[float] = (-np.inf, np.inf, -np.inf, np.inf),
                 cfg: QuadratureConfig = QuadratureConfig(),
                 breakpoints1=None, breakpoints2=None) -> QuadResult:
    """Iterated adaptive quadrature of ``fn(t1, t2, b)`` over a box.

    Every outer node ``t1`` gets its own adaptive inner integral in ``t2``,
    all of them batched together.  Unlike :func:`cubature_plane` this
    resolves ridges that are not parallel to an axis at logarithmic cost.
    The inner integrand is scaled by ``1 + t1**2`` so a single absolute
    tolerance is meaningful for all outer nodes.
    """
    x0, x1, y0, y1 = box
    inner_failed = np.zeros(nbatch, dtype=bool)
    # inner refinement is cheap (a ridge only splits the panels that hold
    # it), so it may go much deeper than the outer one
    inner_cfg = QuadratureConfig(0.1 * cfg.abs_tol, 0.1 * cfg.rel_tol,
                                 max(cfg.max_refinements, 60), cfg.max_nodes)
    bp2 = None if breakpoints2 is None else np.atleast_2d(np.asarray(breakpoints2, dtype=float))

    def outer(t1, b):
        shape = t1.shape
        tt, bb = t1.ravel(), b.ravel()
        inner_bp = None if bp2 is None else np.broadcast_to(bp2, (nbatch, bp2.shape[1]))[bb]
        scale = 1.0 + tt * tt
        res = quad_line(lambda t2, k: fn(tt[k], t2, bb[k]) * scale[k], tt.size,
                        y0, y1, inner_cfg, inner_bp)
        if not res.converged.all():
            inner_failed[np.unique(bb[~res.converged])] = True
        return (res.value / scale).reshape(shape)

    res = quad_line(outer, nbatch, x0, x1, cfg, breakpoints1)
    return QuadResult(res.value, res.error, res.converged & ~inner_failed)
