import math

import numpy as np
import pytest

from herglotz.corpus import CORPUS_IDS, corpus_entry, fit_component_scalars
from herglotz.representation import HNRepresentation1D, evaluate, oned_evaluate
from herglotz.measures import Atom1D, Measure1D


def test_ids():
    assert set(CORPUS_IDS) == {"ex1", "ex2", "ex3", "delta_counterexample", "const_real",
                               "one_var_embed"}
    with pytest.raises(KeyError):
        corpus_entry("ex4")


def test_closed_form_spot_values():
    assert corpus_entry("ex2")(1j, 1j) == pytest.approx(2 + 2j)
    assert corpus_entry("ex3")(1j, 1j).real == pytest.approx(7 + 5 / math.sqrt(2))
    assert corpus_entry("delta_counterexample")(1j, 1j) == pytest.approx(1j)
    assert corpus_entry("const_real")(3 + 1j, 1j) == 5


@pytest.mark.parametrize("entry_id", [i for i in CORPUS_IDS if i != "delta_counterexample"])
def test_herglotz_entries_have_non_negative_imaginary_part(entry_id, grid):
    assert np.all(corpus_entry(entry_id)(*grid).imag >= -1e-15)


def test_herglotz_flags():
    assert not corpus_entry("delta_counterexample").herglotz
    assert all(corpus_entry(i).herglotz for i in CORPUS_IDS if i != "delta_counterexample")


def test_one_variable_restriction_of_ex1(grid):
    # -1/z as a one-variable function has measure pi delta_0; in two variables it is lambda x pi delta_0
    one = HNRepresentation1D(0.0, 0.0, Measure1D((Atom1D(0.0, math.pi),)))
    z1, z2 = grid
    np.testing.assert_allclose(evaluate(corpus_entry("ex1").rep, (z1, z2)), oned_evaluate(one, z2),
                               atol=1e-8)
    np.testing.assert_allclose(corpus_entry("one_var_embed")(z1, z2), -1 / z2, rtol=1e-12)


def test_ex3_printed_scalars_recovered():
    e = corpus_entry("ex3")
    z1 = np.array([1j, -1 + 0.5j, 2 + 2j, 0.3 + 3j])
    z2 = np.array([2j, 1 + 1j, -2 + 0.7j, 0.5j])
    s, resid = fit_component_scalars(e.printed_rep, e.closed_form, z1, z2)
    np.testing.assert_allclose(s, [1 / math.pi, 1 / math.pi, 1.0], rtol=1e-8)
    assert resid < 1e-8
    s, resid = fit_component_scalars(e.rep, e.closed_form, z1, z2)
    np.testing.assert_allclose(s, [1.0, 1.0, 1.0], rtol=1e-8)


def test_entries_are_immutable():
    e = corpus_entry("ex1")
    with pytest.raises(AttributeError):
        e.a = 1.0
    assert corpus_entry("ex1").document == e.document


def test_notes_hold_extraction_targets():
    n = corpus_entry("ex2").notes
    assert (n["a"], n["b1"], n["b2"]) == (2.0, 1.0, 0.0)
    assert corpus_entry("ex3").notes["corrected_scalars"] == [3.0, 2.0, 1.0]
