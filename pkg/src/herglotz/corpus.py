"""Closed-form test functions with known representation data.

Every entry couples a black-box ``q(z1, z2)`` with its data ``(a, b1, b2, mu)``
(the measure is stored as a JSON document and parsed on access, so the
corpus also exercises the measure schema).

ex3 note: the measure of ``1 + (2 + sqrt z1)(3 + sqrt z2)`` has one-variable
weights ``3 sqrt(-t1)`` and ``2 sqrt(-t2)`` on the negative half-axes.
Written with an extra factor ``pi`` in front of those two terms the data
misses the closed form by a wide margin; that variant is kept as
``printed_rep`` and :func:`fit_component_scalars` recovers the factor.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .kernels import kernel_integrand
from .measures import Atom1D, Measure1D, Measure2D, parse_measure
from .quadrature import QuadratureConfig
from .representation import HNRepresentation, HNRepresentation1D, oned_evaluate

__all__ = [
    "CorpusEntry",
    "CORPUS_IDS",
    "corpus_entry",
    "fit_component_scalars",
]

PI2 = math.pi ** 2
SQRT2 = math.sqrt(2.0)


def _lebesgue():
    return {"components": [{"kind": "lebesgue", "scale": 1}]}


def _half_sqrt(scale):
    return {"components": [{"kind": "density", "support": [None, 0],
                            "density": {"name": "sqrt_abs", "params": {"scale": scale}}}]}


def _ex3_document(s1, s2):
    return {"components": [
        {"kind": "product", "m1": _half_sqrt(s1), "m2": _lebesgue()},
        {"kind": "product", "m1": _lebesgue(), "m2": _half_sqrt(s2)},
        {"kind": "planar_density", "support": "t1*t2<0",
         "density": {"name": "sqrt_abs_product", "params": {"scale": 1}}},
    ]}


DOCUMENTS = {
    "ex1": {"components": [{"kind": "product", "m1": _lebesgue(),
                            "m2": {"components": [{"kind": "atom", "location": 0, "weight": "pi"}]}}]},
    "ex2": {"components": [{"kind": "line", "slope": -1, "intercept": 0,
                            "density": {"name": "polynomial",
                                        "params": {"coeffs": ["pi", "2*pi", "pi"]}}}]},
    "ex3": _ex3_document(3, 2),
    "ex3_printed": _ex3_document("3*pi", "2*pi"),
    "delta_counterexample": {"components": [{"kind": "atom", "point": [0, 0], "weight": "pi**2"}]},
    "const_real": {"components": []},
    "one_var_embed": {"components": [{"kind": "product", "m1": _lebesgue(),
                                      "m2": {"components": [{"kind": "atom", "location": 0,
                                                             "weight": "pi"}]}}]},
}


def _q_ex1(z1, z2):
    return -1.0 / np.asarray(z2, dtype=complex) + 0.0 * np.asarray(z1)


def _q_ex2(z1, z2):
    z1, z2 = np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex)
    return 2.0 + z1 + (z1 * z2 + z2 - z1 - 1.0) / (z1 + z2)


def _q_ex3(z1, z2):
    # numpy's complex sqrt is the principal branch, cut along the negative reals
    z1, z2 = np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex)
    return 1.0 + (2.0 + np.sqrt(z1)) * (3.0 + np.sqrt(z2))


def _q_delta(z1, z2):
    z1, z2 = np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex)
    return 1j * (z1 + 1j) * (z2 + 1j) / (2.0 * z1 * z2) - 1j


def _q_const(z1, z2):
    return 5.0 + 0.0 * np.asarray(z1, dtype=complex) * np.asarray(z2, dtype=complex)


_ONE_VAR = HNRepresentation1D(0.0, 0.0, Measure1D((Atom1D(0.0, math.pi),)))


def _q_embed(z1, z2):
    return oned_evaluate(_ONE_VAR, z2) + 0.0 * np.asarray(z1, dtype=complex)


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    description: str
    closed_form: Callable
    a: float
    b1: float
    b2: float
    document: dict = field(repr=False)
    herglotz: bool = True
    notes: dict = field(default_factory=dict)
    printed_document: Optional[dict] = field(default=None, repr=False)

    @property
    def mu(self) -> Measure2D:
        return parse_measure(copy.deepcopy(self.document))

    @property
    def rep(self) -> HNRepresentation:
        return HNRepresentation(self.a, self.b1, self.b2, self.mu)

    @property
    def printed_rep(self) -> Optional[HNRepresentation]:
        if self.printed_document is None:
            return None
        return HNRepresentation(self.a, self.b1, self.b2,
                                parse_measure(copy.deepcopy(self.printed_document)))

    def __call__(self, z1, z2):
        return self.closed_form(z1, z2)


_ENTRIES = {
    "ex1": dict(description="q = -1/z2", closed_form=_q_ex1, a=0.0, b1=0.0, b2=0.0,
                notes={"a": 0.0, "b1": 0.0, "b2": 0.0, "c1": 0.0, "c2": -1.0,
                       "growth": PI2, "total_mass": math.inf}),
    "ex2": dict(description="q = 2 + z1 + (z1 z2 + z2 - z1 - 1)/(z1 + z2)", closed_form=_q_ex2,
                a=2.0, b1=1.0, b2=0.0,
                notes={"a": 2.0, "b1": 1.0, "b2": 0.0, "c1": 0.0, "c2": 0.0,
                       "growth": PI2, "total_mass": math.inf,
                       "measure": "density pi (1 + t)**2 dt on the line t2 = -t1"}),
    "ex3": dict(description="q = 1 + (2 + sqrt z1)(3 + sqrt z2)", closed_form=_q_ex3,
                a=7.0 + 5.0 / SQRT2, b1=0.0, b2=0.0,
                notes={"a": 7.0 + 5.0 / SQRT2, "b1": 0.0, "b2": 0.0, "c1": 0.0, "c2": 0.0,
                       "growth": PI2 * (1.0 + 5.0 / SQRT2), "total_mass": math.inf,
                       "printed_scalars": [3 * math.pi, 2 * math.pi, 1.0],
                       "corrected_scalars": [3.0, 2.0, 1.0]}),
    "delta_counterexample": dict(description="q = i(z1 + i)(z2 + i)/(2 z1 z2) - i",
                                 closed_form=_q_delta, a=0.0, b1=0.0, b2=0.0, herglotz=False,
                                 notes={"atom_at_origin": PI2, "nevanlinna_at_2i_2i": PI2 / 4}),
    "const_real": dict(description="q = 5", closed_form=_q_const, a=5.0, b1=0.0, b2=0.0,
                       notes={"a": 5.0, "b1": 0.0, "b2": 0.0, "c1": 0.0, "c2": 0.0,
                              "total_mass": 0.0}),
    "one_var_embed": dict(description="q(z1, z2) = q1(z2), q1 the one-variable function of "
                                      "(0, 0, pi delta_0)",
                          closed_form=_q_embed, a=0.0, b1=0.0, b2=0.0,
                          notes={"a": 0.0, "b1": 0.0, "b2": 0.0, "c1": 0.0, "c2": -1.0,
                                 "one_variable_measure": "pi delta_0"}),
}

CORPUS_IDS = tuple(_ENTRIES)


def corpus_entry(id: str) -> CorpusEntry:
    """Look up a corpus entry by id (see :data:`CORPUS_IDS`)."""
    try:
        fields = _ENTRIES[id]
    except KeyError:
        raise KeyError(f"unknown corpus id {id!r}; known: {', '.join(CORPUS_IDS)}") from None
    printed = DOCUMENTS["ex3_printed"] if id == "ex3" else None
    return CorpusEntry(id=id, document=DOCUMENTS[id], printed_document=printed, **fields)


def fit_component_scalars(rep: HNRepresentation, q: Callable, z1, z2,
                          cfg: QuadratureConfig = QuadratureConfig()):
    """Real scalars ``s_k`` minimising ``|q - a - b.z - sum_k s_k I_k|`` on the points.

    ``I_k(z) = (1/pi**2) integral K(z, t) dmu_k(t)`` is the contribution of the
    ``k``-th measure component.  Returns ``(scalars, max residual)``.
    """
    z1 = np.asarray(z1, dtype=complex).ravel()
    z2 = np.asarray(z2, dtype=complex).ravel()
    target = np.asarray(q(z1, z2), dtype=complex) - rep.a - rep.b1 * z1 - rep.b2 * z2
    cols = []
    for comp in rep.mu.components:
        r = Measure2D((comp,)).integrate(kernel_integrand(z1, z2), cfg)
        r.raise_if_failed("fit_component_scalars")
        cols.append(r.value / PI2)
    a = np.stack(cols, axis=1)
    a_real = np.concatenate([a.real, a.imag])
    t_real = np.concatenate([target.real, target.imag])
    s, *_ = np.linalg.lstsq(a_real, t_real, rcond=None)
    resid = float(np.max(np.abs(a @ s - target)))
    return s, resid
