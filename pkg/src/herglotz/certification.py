"""Checks of candidate representation data against the two-variable theory.

* growth: the weighted mass ``integral dmu / W`` is finite;
* Nevanlinna condition: the mixed real-part integral vanishes, checked on a
  finite grid of points (the verdict is therefore *sampled*);
* torus moments: ``integral e^{i m1 s1} e^{i m2 s2} dnu = 0`` for
  ``m1 m2 < 0`` after transport to the torus;
* boundary structure of ``nu``: empty corner, Lebesgue edges;
* atoms and total mass, both from the data and through limits of ``q``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .geometry import LimitEstimate, StolzSchedule, extrapolate_limit
from .kernels import moment_integrand, nevanlinna_condition_integrand
from .measures import (Lebesgue1D, Measure1D, Measure2D, TorusMeasure,
                       growth_functional, plane_to_torus, total_mass)
from .quadrature import QuadratureConfig
from .representation import HNRepresentation, as_function

__all__ = [
    "CertConfig",
    "CertReport",
    "default_grid",
    "check_growth",
    "check_nevanlinna",
    "nevanlinna_residuals",
    "check_disk_moments",
    "check_boundary_structure",
    "mass_via_limit",
    "atom_via_limit",
    "certify_all",
]

PI2 = math.pi ** 2
GRID_RE = (-2.0, -1.0, 0.0, 1.0, 2.0)
GRID_IM = (0.5, 1.0, 2.0, 4.0)


def default_grid(re: Sequence[float] = GRID_RE, im: Sequence[float] = GRID_IM):
    """All pairs ``(z1, z2)`` with ``Re`` in ``re`` and ``Im`` in ``im`` per coordinate.

    Returns two flat complex arrays (400 points with the defaults).
    """
    c = (np.asarray(re, dtype=float)[:, None] + 1j * np.asarray(im, dtype=float)[None, :]).ravel()
    z1, z2 = np.meshgrid(c, c, indexing="ij")
    return z1.ravel(), z2.ravel()


@dataclass(frozen=True)
class CertConfig:
    quad: QuadratureConfig = QuadratureConfig()
    nevanlinna_tol: float = 1e-6
    moment_tol: float = 1e-8
    max_order: int = 5
    grid_re: tuple = GRID_RE
    grid_im: tuple = GRID_IM
    atom_schedule: StolzSchedule = StolzSchedule.geometric(0, 30)
    atom_tol: float = 1e-3


# ---------------------------------------------------------------------------
# individual checks


def check_growth(mu: Measure2D, cfg: QuadratureConfig = QuadratureConfig()):
    """``(growth value, passed)``; a divergent value is ``inf`` and fails."""
    value = growth_functional(mu, cfg)
    return value, math.isfinite(value)


def nevanlinna_residuals(mu: Measure2D, z1, z2, cfg: QuadratureConfig = QuadratureConfig()):
    """Per-point residuals ``integral Re[...] dmu`` and convergence flags."""
    z1, z2 = np.broadcast_arrays(np.atleast_1d(np.asarray(z1, dtype=complex)),
                                 np.atleast_1d(np.asarray(z2, dtype=complex)))
    if mu.is_zero:
        return np.zeros(z1.size), np.ones(z1.size, dtype=bool)
    r = mu.integrate(nevanlinna_condition_integrand(z1.ravel(), z2.ravel()), cfg)
    return r.value.real, r.converged


def check_nevanlinna(mu: Measure2D, grid=None, cfg: QuadratureConfig = QuadratureConfig(),
                     tol: float = 1e-6, growth: Optional[float] = None):
    """``(max |residual|, passed)`` over ``grid = (z1, z2)``.

    The verdict compares against ``tol * max(1, growth)``; a grid point whose
    quadrature fails counts as an infinite residual.
    """
    z1, z2 = default_grid() if grid is None else grid
    res, ok = nevanlinna_residuals(mu, z1, z2, cfg)
    res = np.where(ok, np.abs(res), np.inf)
    if growth is None:
        growth = growth_functional(mu, cfg)
    worst = float(np.max(res)) if res.size else 0.0
    return worst, bool(worst <= tol * max(1.0, growth))


def _moment_pairs(max_order: int):
    return [(m1, m2) for m1 in range(-max_order, max_order + 1)
            for m2 in range(-max_order, max_order + 1) if m1 * m2 < 0]


def check_disk_moments(nu: TorusMeasure, max_order: int = 5,
                       cfg: QuadratureConfig = QuadratureConfig(), tol: float = 1e-8):
    """Mixed-sign Fourier moments of ``nu`` up to ``max_order``.

    Returns ``(residuals, passed)`` where ``residuals`` maps ``(m1, m2)`` to
    the complex moment; the verdict requires ``|moment| <= tol * mass``.
    """
    pairs = _moment_pairs(max_order)
    m = np.array(pairs, dtype=float)
    r = nu.integrate(moment_integrand(m[:, 0], m[:, 1]), cfg)
    mass = nu.total_mass(cfg)
    values = np.where(r.converged, r.value, np.nan)
    residuals = {p: complex(v) for p, v in zip(pairs, values)}
    worst = float(np.max(np.abs(values))) if values.size else 0.0
    passed = bool(np.all(r.converged) and worst <= tol * mass)
    return residuals, passed


def _edge_constant(edge: Measure1D):
    """``e`` if ``edge`` is ``e`` times Lebesgue on ``(0, 2 pi)``, else ``None``."""
    e = 0.0
    for c in edge.components:
        if isinstance(c, Lebesgue1D) and c.lo <= 0.0 and c.hi >= 2 * math.pi:
            e += c.scale
        elif isinstance(c, Lebesgue1D) and c.scale == 0:
            continue
        else:
            return None
    return e


def check_boundary_structure(nu: TorusMeasure, cfg: QuadratureConfig = QuadratureConfig()) -> dict:
    """Corner and edge structure of a torus measure."""
    e1, e2 = _edge_constant(nu.edge1), _edge_constant(nu.edge2)
    return {
        "corner_zero": nu.corner_weight == 0,
        "edges_lebesgue": e1 is not None and e2 is not None,
        "e1": e1,
        "e2": e2,
    }


def mass_via_limit(q: Callable[[complex, complex], complex],
                   schedule: StolzSchedule = StolzSchedule(), tol: float = 1e-8) -> LimitEstimate:
    """``lim y**2 Im q(iy, iy)`` as ``y -> inf``; equals ``mu(R^2) / pi**2`` when ``b1 = b2 = 0``.

    A divergent sequence is reported with ``diverged=True`` and value ``inf``.
    """
    y = np.asarray(schedule.radii)
    g = np.array([yy * yy * np.imag(q(1j * yy, 1j * yy)) for yy in y], dtype=complex)
    return extrapolate_limit(y, g, tol)


def atom_via_limit(q: Callable[[complex, complex], complex], point,
                   schedule: StolzSchedule = StolzSchedule(), tol: float = 1e-6) -> LimitEstimate:
    """``mu({point})`` as ``2 pi**2 i lim (z1 - p1)(z2 - p2) q(z1, z2)``.

    Both variables approach the point together along ``p_j + eps e^{i alpha}``
    with ``eps = 1/r`` and ``alpha = schedule.direction``.
    """
    p1, p2 = float(point[0]), float(point[1])
    r = np.asarray(schedule.radii)
    d = schedule.unit / r
    g = np.array([dd * dd * complex(q(p1 + dd, p2 + dd)) for dd in d])
    est = extrapolate_limit(r, 2.0 * PI2 * 1j * g, tol * 2.0 * PI2)
    return LimitEstimate(est.value, est.error_estimate, est.converged and not est.diverged,
                         est.samples_used, est.diverged)


# ---------------------------------------------------------------------------
# aggregate


def _num(x):
    if isinstance(x, complex):
        return [_num(x.real), _num(x.imag)]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, str) else k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _jsonable(obj.item())
    if isinstance(obj, (complex, np.complexfloating)):
        return _num(complex(obj))
    if isinstance(obj, float):
        return _num(obj)
    return obj


@dataclass
class CertReport:
    growth_value: float
    nevanlinna_max_residual: float
    nevanlinna_normalized: float
    nevanlinna_grid: list
    nevanlinna_residuals: list
    moment_residuals: dict
    structural_flags: dict
    total_mass: float
    verdict: dict
    torus_mass: float = math.nan
    tolerances: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(self.verdict.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["moment_residuals"] = {f"{m1},{m2}": v for (m1, m2), v in self.moment_residuals.items()}
        d["all_pass"] = self.all_pass
        return _jsonable(d)

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def certify_all(target: Union[HNRepresentation, Measure2D], cfg: CertConfig = CertConfig(),
                q: Optional[Callable] = None) -> CertReport:
    """Run every applicable check on a representation or a bare measure.

    For a bare measure ``a = b1 = b2 = 0`` is assumed.  ``q`` is the black box
    used for the atom spot checks; it defaults to the function the data
    represents.
    """
    rep = target if isinstance(target, HNRepresentation) else HNRepresentation(0.0, 0.0, 0.0, target)
    mu = rep.mu
    qc = cfg.quad
    notes = []

    growth, growth_ok = check_growth(mu, qc)
    z1, z2 = default_grid(cfg.grid_re, cfg.grid_im)
    if growth_ok:
        res, ok = nevanlinna_residuals(mu, z1, z2, qc)
        res = np.where(ok, np.abs(res), np.inf)
        worst = float(np.max(res))
        normalized = worst / max(1.0, growth)
        nev_ok = normalized <= cfg.nevanlinna_tol
        if not np.all(ok):
            notes.append(f"nevanlinna: quadrature failed at {int(np.sum(~ok))} grid points")
    else:
        res = np.full(z1.size, np.nan)
        worst = normalized = math.inf
        nev_ok = False
        notes.append("nevanlinna: skipped, growth functional diverges")
    notes.append("nevanlinna verdict is sampled on a finite grid")

    moments, moments_ok, torus_mass = {}, False, math.nan
    flags = {"corner_zero": False, "edges_lebesgue": False, "e1": None, "e2": None}
    if growth_ok:
        nu = plane_to_torus(mu, rep.b1, rep.b2, qc)
        moments, moments_ok = check_disk_moments(nu, cfg.max_order, qc, cfg.moment_tol)
        torus_mass = nu.total_mass(qc)
        flags = check_boundary_structure(nu, qc)
    else:
        notes.append("moments and boundary structure: skipped, no finite torus measure")

    atoms = mu.atoms()
    spots = []
    black_box = q if q is not None else as_function(rep, qc)
    for point in [(0.0, 0.0)] + [p for p, _ in atoms[:4]]:
        try:
            est = atom_via_limit(black_box, point, cfg.atom_schedule)
            spots.append({"point": list(point), "limit": est.value,
                          "error_estimate": est.error_estimate, "converged": est.converged})
        except ArithmeticError as exc:
            spots.append({"point": list(point), "error": str(exc)})
    atomless = not atoms and all(s.get("converged") and abs(s["limit"]) <= cfg.atom_tol
                                 for s in spots)
    flags["atomless"] = atomless
    flags["atomless_spot_checks"] = spots

    mass = total_mass(mu, qc)
    verdict = {
        "growth": growth_ok,
        "nevanlinna": bool(nev_ok),
        "moments": moments_ok,
        "corner_zero": bool(flags["corner_zero"]),
        "edges_lebesgue": bool(flags["edges_lebesgue"]),
        "atomless": atomless,
    }
    flags["finite_mass_contradiction"] = bool(0 < mass < math.inf and all(verdict.values()))
    if flags["finite_mass_contradiction"]:
        notes.append("all conditions pass yet the total mass is finite and positive, "
                     "which no representing measure can have")

    return CertReport(
        growth_value=growth,
        nevanlinna_max_residual=worst,
        nevanlinna_normalized=normalized,
        nevanlinna_grid=[[complex(a), complex(b)] for a, b in zip(z1, z2)],
        nevanlinna_residuals=[float(v) for v in res],
        moment_residuals=moments,
        structural_flags=flags,
        total_mass=mass,
        verdict=verdict,
        torus_mass=torus_mass,
        tolerances={"nevanlinna": cfg.nevanlinna_tol, "moments": cfg.moment_tol,
                    "max_order": cfg.max_order, "atom": cfg.atom_tol,
                    "quad_abs_tol": qc.abs_tol, "quad_rel_tol": qc.rel_tol},
        notes=notes,
    )
