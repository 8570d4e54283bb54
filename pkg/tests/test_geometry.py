import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from herglotz.geometry import (DomainError, StolzSchedule, cayley, extrapolate_limit,
                               inverse_cayley, nontangential_limit)

upper = st.complex_numbers(max_magnitude=1e4).filter(lambda z: z.imag > 1e-3)


@settings(max_examples=200, deadline=None)
@given(upper)
def test_cayley_round_trip(z):
    w = cayley(z)
    assert abs(w) < 1
    assert inverse_cayley(w) == pytest.approx(z, rel=1e-8, abs=1e-8)


def test_cayley_values():
    assert cayley(1j) == 0
    assert cayley(0.0, boundary=True) == pytest.approx(-1)
    assert inverse_cayley(-1.0, boundary=True) == pytest.approx(0)


@pytest.mark.parametrize("z", [0.0, -1j, 2 - 0.5j, complex("nan")])
def test_cayley_domain(z):
    with pytest.raises(DomainError):
        cayley(z)


@pytest.mark.parametrize("w", [1.0, 2.0, 1j])
def test_inverse_cayley_domain(w):
    with pytest.raises(DomainError):
        inverse_cayley(w)
    if w == 1.0:
        with pytest.raises(DomainError):
            inverse_cayley(w, boundary=True)


def test_schedule_validation():
    with pytest.raises(ValueError):
        StolzSchedule(direction=0.1)
    with pytest.raises(ValueError):
        StolzSchedule(radii=(1.0, 1.0))
    s = StolzSchedule.geometric(0, 3)
    np.testing.assert_allclose(s.points("zero"), 1j / np.array([1, 2, 4, 8]))


def test_extrapolation_of_algebraic_tail():
    r = 2.0 ** np.arange(41)
    est = extrapolate_limit(r, 3.0 + 2.0 / r + 5.0 / r ** 2)
    assert est.converged
    assert est.value == pytest.approx(3.0, abs=1e-9)


def test_extrapolation_of_sqrt_tail():
    r = 2.0 ** np.arange(41)
    est = extrapolate_limit(r, 1.0 + 1.0 / np.sqrt(r))
    assert est.converged and est.value == pytest.approx(1.0, abs=1e-6)


def test_divergence_detected():
    r = 2.0 ** np.arange(20)
    est = extrapolate_limit(r, np.sqrt(r) + 1.0)
    assert est.diverged and not est.converged
    assert est.value.real == math.inf


def test_slow_divergence_is_not_converged():
    r = 2.0 ** np.arange(41)
    assert not extrapolate_limit(r, np.log(r + 1.0)).converged


def test_non_finite_samples_truncate():
    r = 2.0 ** np.arange(12)
    g = 1.0 + 1.0 / r
    g[-2:] = np.nan
    est = extrapolate_limit(r, g)
    assert est.samples_used == 10


def test_nontangential_limits():
    f = lambda z: 2.0 * z + 1.0 - 1.0 / z
    assert nontangential_limit(f, "infinity").value == pytest.approx(2.0, abs=1e-9)
    assert nontangential_limit(f, "zero").value == pytest.approx(-1.0, abs=1e-9)
    slanted = StolzSchedule(direction=math.pi / 4)
    assert nontangential_limit(f, "infinity", slanted).value == pytest.approx(2.0, abs=1e-9)
    with pytest.raises(ValueError):
        nontangential_limit(f, "sideways")


def test_limit_estimate_serialises():
    d = extrapolate_limit(2.0 ** np.arange(10), np.ones(10)).to_dict()
    assert d["converged"] and d["re"] == pytest.approx(1.0) and d["im"] == 0.0
