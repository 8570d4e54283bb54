import math

import numpy as np
import pytest

from herglotz.corpus import corpus_entry
from herglotz.inversion import (InversionConfig, TEST_FUNCTIONS, combine, stieltjes_functional,
                                test_function, truncation_radius)
from herglotz.kernels import psi_integrand
from herglotz.measures import integrate
from herglotz.quadrature import QuadratureConfig
from herglotz.representation import evaluate_im_poisson

PSIS = [("canonical_weight", {}), ("gaussian_weighted", {}), ("rational_bump", {"center": [1, 0]})]
HERGLOTZ_IDS = ["ex1", "ex2", "ex3", "const_real", "one_var_embed"]


def closed_form_im(entry):
    return lambda x1, x2, y1, y2: np.imag(entry(x1 + 1j * y1, x2 + 1j * y2))


def reference(entry, psi):
    if entry.mu.is_zero:
        return 0.0
    return float(integrate(entry.mu, psi_integrand(psi))[0].real)


def test_registry_bounds():
    for name, params in PSIS:
        psi = test_function(name, params)
        assert psi.check_bound() <= 1.0 + 1e-12
    # sampled maximisation of (1 + x^2)/(1 + (x - 1)^2) is (3 + sqrt 5)/2
    assert test_function("rational_bump", {"center": [1, 0]}).bound == pytest.approx(
        (3 + math.sqrt(5)) / 2)


def test_registry_errors():
    with pytest.raises(KeyError):
        test_function("top_hat")
    with pytest.raises(ValueError):
        test_function("gaussian_weighted", {"sigma": -1})
    assert set(TEST_FUNCTIONS) == {name for name, _ in PSIS}


def test_truncation_radius_controls_tail():
    # outside [-R, R]^2 the tail of C/W is below 4 C pi / R
    r = truncation_radius(2.0, 1e-6)
    assert 4 * math.pi * 2.0 / r <= 0.1 * 1e-6 * (1 + 1e-12)


@pytest.mark.parametrize("entry_id", HERGLOTZ_IDS)
@pytest.mark.parametrize("name, params", PSIS)
def test_closed_form_recovery(entry_id, name, params):
    e = corpus_entry(entry_id)
    psi = test_function(name, params)
    est = stieltjes_functional(closed_form_im(e), psi)
    ref = reference(e, psi)
    assert est.converged
    assert est.estimate == pytest.approx(ref, rel=1e-4, abs=1e-6)


@pytest.mark.parametrize("entry_id", ["ex1", "ex3"])
def test_non_negative_for_non_negative_psi(entry_id):
    e = corpus_entry(entry_id)
    for name, params in PSIS:
        assert stieltjes_functional(closed_form_im(e), test_function(name, params)).estimate >= -1e-6


def test_linearity(rng):
    e = corpus_entry("ex2")
    psis = [test_function(n, p) for n, p in PSIS]
    single = {p.name: stieltjes_functional(closed_form_im(e), p).estimate for p in psis}
    for _ in range(2):
        i, j = rng.choice(len(psis), 2, replace=False)
        c = rng.uniform(-1, 1, 2)
        mix = combine(c, [psis[i], psis[j]])
        est = stieltjes_functional(closed_form_im(e), mix).estimate
        expected = c[0] * single[psis[i].name] + c[1] * single[psis[j].name]
        # normalised by the combined bound
        assert abs(est - expected) / mix.bound <= 1e-6


def test_schedule_must_decrease():
    with pytest.raises(ValueError):
        stieltjes_functional(lambda *a: 0.0, test_function("canonical_weight"),
                             InversionConfig(y_exponents=(3, 2, 1)))


def test_result_unpacks():
    est, err = stieltjes_functional(closed_form_im(corpus_entry("ex1")), test_function("canonical_weight"))
    assert est == pytest.approx(math.pi ** 2, rel=1e-6) and err < 1e-4


# Poisson-route oracle equivalence; looser quadrature since the target is 2%
ORACLE_CFG = InversionConfig(quad=QuadratureConfig(1e-4, 1e-3, 30))
INNER = QuadratureConfig(1e-7, 1e-5)


@pytest.mark.parametrize("entry_id", ["ex1", "ex2", "ex3", "const_real", "delta_counterexample"])
@pytest.mark.parametrize("name, params", PSIS)
def test_oracle_equivalence_through_poisson(entry_id, name, params):
    e = corpus_entry(entry_id)
    rep = e.rep
    psi = test_function(name, params)
    q_im = lambda x1, x2, y1, y2: evaluate_im_poisson(rep, (x1 + 1j * y1, x2 + 1j * y2), INNER,
                                                      strict=False)
    est = stieltjes_functional(q_im, psi, ORACLE_CFG)
    ref = reference(e, psi)
    assert abs(est.estimate - ref) <= 0.02 * abs(ref) + 1e-9
