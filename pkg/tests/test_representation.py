import math

import numpy as np
import pytest

from herglotz import representation
from herglotz.corpus import corpus_entry
from herglotz.densities import density_1d
from herglotz.geometry import cayley
from herglotz.measures import Atom1D, DensityPiece1D, Lebesgue1D, Measure1D, Measure2D
from herglotz.representation import (HNRepresentation, HNRepresentation1D, as_function, disk_evaluate,
                                     evaluate, evaluate_im_poisson, evaluate_with_error, extract_a,
                                     extract_b, extract_c, oned_evaluate, rep_to_disk)

# mpmath.quad at 30 digits of (1/pi) int_{-inf}^0 sqrt(-t) (1/(t - z) - t/(1 + t^2)) dt, z = 0.3 + 0.7i
SQRT_CAUCHY_REFERENCE = 0.0214456570724945979765280014414 + 0.480404678675380297796097682321j


def random_points(rng, n=40):
    z1 = rng.uniform(-3, 3, n) + 1j * rng.uniform(0.1, 5, n)
    z2 = rng.uniform(-3, 3, n) + 1j * rng.uniform(0.1, 5, n)
    return z1, z2


def test_one_variable_dirac_gives_minus_inverse():
    rep = HNRepresentation1D(0.0, 0.0, Measure1D((Atom1D(0.0, math.pi),)))
    z = np.array([1j, 2 + 0.1j, -5 + 3j])
    np.testing.assert_allclose(oned_evaluate(rep, z), -1 / z, rtol=1e-13)


def test_one_variable_lebesgue_gives_i():
    rep = HNRepresentation1D(0.0, 0.0, Measure1D((Lebesgue1D(),)))
    assert oned_evaluate(rep, 0.4 + 2j) == pytest.approx(1j, abs=1e-9)


def test_one_variable_sqrt_density_reference():
    mu = Measure1D((DensityPiece1D(density_1d("sqrt_abs"), -math.inf, 0.0),))
    assert oned_evaluate(HNRepresentation1D(0.0, 0.0, mu), 0.3 + 0.7j) == pytest.approx(
        SQRT_CAUCHY_REFERENCE, abs=1e-9)
    rep = HNRepresentation1D(1 / math.sqrt(2), 0.0, mu)
    z = np.array([0.3 + 0.7j, -4 + 0.01j, 100 + 1j])
    np.testing.assert_allclose(oned_evaluate(rep, z), np.sqrt(z), rtol=1e-8)


@pytest.mark.parametrize("entry_id", ["ex1", "ex2", "ex3", "delta_counterexample",
                                      "const_real", "one_var_embed"])
def test_random_points_match_closed_form(entry_id, rng):
    e = corpus_entry(entry_id)
    z1, z2 = random_points(rng)
    np.testing.assert_allclose(evaluate(e.rep, (z1, z2)), e(z1, z2), atol=1e-6, rtol=1e-8)


@pytest.mark.parametrize("z1, z2", [(2.0 ** 30 * 1j, 1j), (1j, 2.0 ** -30 * 1j),
                                    (2.0 ** 20 * (1 + 1j), 3 + 2.0 ** -20 * 1j)])
def test_extreme_points(z1, z2):
    e = corpus_entry("ex2")
    assert evaluate(e.rep, (z1, z2)) == pytest.approx(e(z1, z2), rel=1e-7)


def test_poisson_route_is_imaginary_part(rng):
    e = corpus_entry("ex3")
    z1, z2 = random_points(rng, 20)
    np.testing.assert_allclose(evaluate_im_poisson(e.rep, (z1, z2)),
                               evaluate(e.rep, (z1, z2)).imag, atol=1e-7)
    assert np.all(evaluate_im_poisson(e.rep, (z1, z2)) > 0)


def test_error_estimates_and_shapes(grid):
    e = corpus_entry("ex1")
    z1, z2 = grid
    v, err, ok = evaluate_with_error(e.rep, (z1.reshape(20, 20), z2.reshape(20, 20)))
    assert v.shape == err.shape == ok.shape == (20, 20)
    assert ok.all()
    assert np.all(np.abs(v - e(z1, z2).reshape(20, 20)) <= np.maximum(err, 1e-12) * 10)
    assert np.ndim(evaluate(e.rep, (1j, 1j))) == 0


def test_points_outside_domain_rejected():
    with pytest.raises(ValueError):
        evaluate(corpus_entry("ex1").rep, (1j, 0.0))


def test_negative_linear_terms_rejected():
    with pytest.raises(ValueError):
        HNRepresentation(0.0, -1.0, 0.0, Measure2D())


@pytest.mark.parametrize("entry_id", ["ex1", "ex2", "delta_counterexample"])
def test_disk_round_trip(entry_id, grid):
    rep = corpus_entry(entry_id).rep
    drep = rep_to_disk(rep)
    z1, z2 = grid
    lhs = evaluate(rep, (z1, z2))
    rhs = 1j * disk_evaluate(drep, (cayley(z1), cayley(z2)))
    np.testing.assert_allclose(lhs, rhs, atol=1e-8)


def test_extraction_from_closed_forms():
    q = corpus_entry("ex2").closed_form
    assert extract_a(q) == pytest.approx(2.0)
    assert extract_b(q, 1).value == pytest.approx(1.0, abs=1e-9)
    assert extract_b(q, 2, 1 + 2j).value == pytest.approx(0.0, abs=1e-9)
    assert extract_c(corpus_entry("ex1").closed_form, 2).value == pytest.approx(-1.0, abs=1e-9)
    with pytest.raises(ValueError):
        extract_b(q, 3)


def test_threaded_chunks_are_identical(grid):
    rep = corpus_entry("ex3").rep
    z1, z2 = np.tile(grid[0], 3), np.tile(grid[1], 3)
    serial = evaluate(rep, (z1, z2))
    representation.set_threads(3)
    try:
        threaded = evaluate(rep, (z1, z2))
    finally:
        representation.set_threads(1)
    assert np.array_equal(serial, threaded)


def test_as_function_black_box():
    q = as_function(corpus_entry("ex1").rep)
    assert q(1j, 2j) == pytest.approx(0.5j, abs=1e-9)


@pytest.mark.parametrize("entry_id, axis, expected", [
    ("ex1", 2, -1.0), ("ex1", 1, 0.0), ("one_var_embed", 2, -1.0), ("ex3", 1, 0.0), ("ex2", 2, 0.0),
])
def test_constants_at_zero_are_non_positive_and_anchor_free(entry_id, axis, expected):
    q = corpus_entry(entry_id).closed_form
    values = [extract_c(q, axis, anchor).value for anchor in (1j, 1 + 2j, -3 + 0.5j)]
    for v in values:
        assert v.real <= 1e-9
        assert v == pytest.approx(expected, abs=1e-6)
