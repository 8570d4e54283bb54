import json
import math

import numpy as np
import pytest

from herglotz.certification import (CertConfig, atom_via_limit, certify_all, check_boundary_structure,
                                    check_disk_moments, check_growth, check_nevanlinna, default_grid,
                                    mass_via_limit)
from herglotz.corpus import corpus_entry
from herglotz.measures import (Atom1D, Atom2D, Lebesgue1D, Measure1D, Measure2D, TorusMeasure,
                               parse_measure, plane_to_torus)
from herglotz.representation import HNRepresentation

PI2 = math.pi ** 2


def test_default_grid_layout():
    z1, z2 = default_grid()
    assert z1.shape == z2.shape == (400,)
    assert np.all(z1.imag > 0) and np.all(z2.imag > 0)
    assert len(set(zip(z1, z2))) == 400


def test_growth_check():
    assert check_growth(corpus_entry("ex1").mu) == (pytest.approx(PI2), True)
    wide = Measure2D((Atom2D((0, 0), 1.0),)) + parse_measure(
        {"components": [{"kind": "planar_density", "density": {"name": "constant"}}]})
    value, ok = check_growth(wide)
    assert value == pytest.approx(1.0 + PI2) and ok


def test_nevanlinna_holds_for_product_with_atom():
    worst, ok = check_nevanlinna(corpus_entry("ex1").mu)
    assert ok and worst < 1e-12


def test_nevanlinna_fails_for_single_atom():
    mu = corpus_entry("delta_counterexample").mu
    worst, ok = check_nevanlinna(mu, (np.array([2j]), np.array([2j])))
    assert not ok
    assert worst == pytest.approx(PI2 / 4, abs=1e-10)


def test_single_atom_has_negative_imaginary_part_somewhere(grid):
    q = corpus_entry("delta_counterexample")
    assert np.min(q(*grid).imag) < 0


def test_moments_of_transported_product_vanish():
    nu = plane_to_torus(corpus_entry("ex1").mu)
    residuals, ok = check_disk_moments(nu, 5)
    assert ok
    assert len(residuals) == 50   # m1 m2 < 0, |m| <= 5


def test_moments_of_torus_atom():
    nu = TorusMeasure(interior=Measure2D((Atom2D((math.pi, math.pi), 4 * PI2),)))
    residuals, ok = check_disk_moments(nu, 5)
    assert not ok
    assert residuals[(1, -1)] == pytest.approx(4 * PI2, abs=1e-10)
    # e^{-i(m1 + m2) pi} = (-1)^(m1 + m2)
    assert residuals[(2, -1)] == pytest.approx(-4 * PI2, abs=1e-10)


def test_boundary_structure():
    flags = check_boundary_structure(plane_to_torus(Measure2D(), 1.0, 0.0))
    assert flags["corner_zero"] and flags["edges_lebesgue"]
    assert flags["e1"] == pytest.approx(2 * math.pi)
    bad = TorusMeasure(corner_weight=1.0, edge1=Measure1D((Atom1D(1.0, 1.0),)))
    flags = check_boundary_structure(bad)
    assert not flags["corner_zero"] and not flags["edges_lebesgue"]
    partial = TorusMeasure(edge2=Measure1D((Lebesgue1D(1.0, 0.0, 1.0),)))
    assert not check_boundary_structure(partial)["edges_lebesgue"]


def test_mass_limits():
    assert mass_via_limit(corpus_entry("ex1").closed_form).diverged
    est = mass_via_limit(corpus_entry("const_real").closed_form)
    assert est.converged and abs(est.value) <= 1e-8
    # the -i/W part of the kernel keeps Im q(iy, iy) near -1/2 for a lone atom
    assert mass_via_limit(corpus_entry("delta_counterexample").closed_form).diverged


def test_atom_limits():
    assert atom_via_limit(corpus_entry("delta_counterexample").closed_form, (0, 0)).value == \
        pytest.approx(PI2, abs=1e-6)
    for entry_id in ("ex1", "ex2", "ex3"):
        est = atom_via_limit(corpus_entry(entry_id).closed_form, (0, 0))
        assert abs(est.value) <= 1e-3


@pytest.mark.parametrize("entry_id", ["ex1", "ex2", "ex3", "const_real", "one_var_embed"])
def test_corpus_certifies(entry_id):
    e = corpus_entry(entry_id)
    report = certify_all(e.rep, q=e.closed_form)
    assert report.all_pass, report.verdict
    assert not report.structural_flags["finite_mass_contradiction"]


def test_counterexample_report():
    e = corpus_entry("delta_counterexample")
    report = certify_all(e.rep, q=e.closed_form)
    assert not report.verdict["nevanlinna"]
    assert not report.verdict["moments"]
    assert not report.verdict["atomless"]
    assert report.verdict["growth"]
    assert report.total_mass == pytest.approx(PI2)
    doc = json.loads(report.to_json())
    assert doc["all_pass"] is False
    assert doc["moment_residuals"]["1,-1"][0] == pytest.approx(4 * PI2)


def test_divergent_growth_is_reported():
    mu = parse_measure({"components": [{"kind": "product",
                                        "m1": {"components": [{"kind": "lebesgue"}]},
                                        "m2": {"components": [{"kind": "density", "density": {
                                            "name": "polynomial", "params": {"coeffs": [1, 0, 1]}}}]}}]})
    report = certify_all(mu, q=lambda a, b: 1j + 0 * a)
    assert not report.verdict["growth"]
    assert report.growth_value == math.inf
    assert json.loads(report.to_json())["growth_value"] == "inf"


def test_sampled_grid_is_configurable():
    cfg = CertConfig(grid_re=(0.0,), grid_im=(1.0,))
    report = certify_all(corpus_entry("ex1").rep, cfg)
    assert len(report.nevanlinna_grid) == 1
