"""Acceptance criteria, one test each.

Every test prints a ``[PASS]`` / ``[FAIL]`` line (run with ``-s`` to see them
inline; they are also kept in the captured output of the report).
"""

import io
import math
import time

import numpy as np
import pytest

from herglotz.certification import (atom_via_limit, check_disk_moments, check_nevanlinna,
                                    mass_via_limit)
from herglotz.cli import run_cli
from herglotz.corpus import corpus_entry, fit_component_scalars
from herglotz.geometry import cayley
from herglotz.inversion import combine, stieltjes_functional, test_function
from herglotz.kernels import kernel_K, nevanlinna_integrand, poisson_P
from herglotz.measures import Atom2D, Measure2D, TorusMeasure, plane_to_torus
from herglotz.representation import (as_function, disk_evaluate, evaluate, evaluate_im_poisson,
                                     extract_a, extract_b, extract_c, rep_to_disk)

PI2 = math.pi ** 2


def check(label, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, f"{label}: {detail}"


def test_criterion_1_kernel_decomposition():
    rng = np.random.default_rng(1)
    n = 100_000
    t0 = time.perf_counter()
    z1 = rng.uniform(-3, 3, n) + 1j * rng.uniform(0.1, 5, n)
    z2 = rng.uniform(-3, 3, n) + 1j * rng.uniform(0.1, 5, n)
    t1, t2 = rng.uniform(-50, 50, n), rng.uniform(-50, 50, n)
    diff = np.imag(kernel_K(z1, z2, t1, t2)) - (poisson_P(z1, z2, t1, t2)
                                                - 0.5 * nevanlinna_integrand(z1, z2, t1, t2))
    worst = float(np.max(np.abs(diff)))
    dt = time.perf_counter() - t0
    check("criterion 1 kernel decomposition", worst <= 1e-12 and dt < 5,
          f"max |Im K - (P - Nev/2)| = {worst:.3e} (tol 1e-12), {dt:.2f}s (limit 5s)")


def test_criterion_2_example_ex1(grid):
    t0 = time.perf_counter()
    e = corpus_entry("ex1")
    z1, z2 = grid
    err = float(np.max(np.abs(evaluate(e.rep, (z1, z2)) + 1 / z2)))
    q = as_function(e.rep)
    a = extract_a(q)
    bs = [extract_b(q, axis, anchor).value for axis in (1, 2) for anchor in (1j, 1 + 2j)]
    c2 = extract_c(q, 2).value
    dt = time.perf_counter() - t0
    ok = (err <= 1e-6 and abs(a) <= 1e-6 and all(abs(b) <= 1e-3 for b in bs)
          and abs(c2 + 1) <= 1e-3 and dt < 60)
    check("criterion 2 ex1 end-to-end", ok,
          f"grid err {err:.2e} (1e-6); a = {a:.2e}; max |b| = {max(map(abs, bs)):.2e} (1e-3); "
          f"c2 = {c2.real:.9f} (-1 +- 1e-3); {dt:.1f}s (60s)")


def test_criterion_3_example_ex2(grid):
    t0 = time.perf_counter()
    e = corpus_entry("ex2")
    z1, z2 = grid
    err = float(np.max(np.abs(evaluate(e.rep, (z1, z2)) - e(z1, z2))))
    q = as_function(e.rep)
    a = extract_a(q)
    b1 = extract_b(q, 1).value
    b2 = extract_b(q, 2).value
    dt = time.perf_counter() - t0
    ok = (err <= 1e-5 and abs(a - 2) <= 1e-4 and abs(b1 - 1) <= 1e-3 and abs(b2) <= 1e-3
          and dt < 120)
    check("criterion 3 ex2 end-to-end", ok,
          f"grid err {err:.2e} (1e-5); a = {a:.8f}; b1 = {b1.real:.8f}; b2 = {b2.real:.2e}; "
          f"{dt:.1f}s (120s)")


def test_criterion_4_example_ex3(grid):
    e = corpus_entry("ex3")
    z1, z2 = grid
    a = extract_a(e.closed_form)
    q = as_function(e.rep)
    b1, b2 = extract_b(q, 1).value, extract_b(q, 2).value
    err = float(np.max(np.abs(evaluate(e.rep, (z1, z2)) - e(z1, z2))))
    ok = (abs(a - (7 + 5 / math.sqrt(2))) <= 1e-6 and abs(b1) <= 1e-3 and abs(b2) <= 1e-3
          and err <= 1e-4)
    check("criterion 4 ex3 extraction and evaluation (weights 3 sqrt(-t), 2 sqrt(-t))", ok,
          f"a = {a:.12f} (7 + 5/sqrt 2 +- 1e-6); b1 = {b1.real:.2e}; b2 = {b2.real:.2e}; "
          f"grid err {err:.2e} (1e-4)")


def test_criterion_4_printed_normalization(grid):
    """The weights written with an extra pi must either pass at 1e-4 or be reported."""
    e = corpus_entry("ex3")
    z1, z2 = grid
    err = float(np.max(np.abs(evaluate(e.printed_rep, (z1, z2)) - e(z1, z2))))
    if err <= 1e-4:
        check("criterion 4 printed normalization", True, f"grid err {err:.2e}")
        return
    scalars, resid = fit_component_scalars(e.printed_rep, e.closed_form, z1[::7], z2[::7])
    print(f"[DISCREPANCY] criterion 4 printed normalization: grid err {err:.3g} > 1e-4; "
          f"best-fit scalar per component {np.array2string(scalars, precision=10)} "
          f"(1/pi = {1 / math.pi:.10f}), fit residual {resid:.2e}")
    # the discrepancy must be exactly the stray pi on the two product terms
    np.testing.assert_allclose(scalars, [1 / math.pi, 1 / math.pi, 1.0], rtol=1e-6)
    pytest.xfail("notation discrepancy: printed weights carry an extra factor pi; "
                 f"fitted scalars {scalars.round(10).tolist()}")


def test_criterion_5_nevanlinna_discrimination():
    t0 = time.perf_counter()
    details, ok = [], True
    for entry_id in ("ex1", "ex2", "ex3"):
        mu = corpus_entry(entry_id).mu
        worst, passed = check_nevanlinna(mu, tol=1e-6)
        details.append(f"{entry_id} raw max {worst:.2e}")
        ok &= passed
    worst, failed_as_expected = check_nevanlinna(corpus_entry("delta_counterexample").mu,
                                                 (np.array([2j]), np.array([2j])))
    ok &= (not failed_as_expected) and abs(worst - PI2 / 4) <= 1e-8
    dt = time.perf_counter() - t0
    ok &= dt < 300
    check("criterion 5 Nevanlinna condition", ok,
          "; ".join(details) + f"; delta at (2i,2i) = {worst:.10f} (pi^2/4 = {PI2 / 4:.10f}); "
          f"{dt:.1f}s (300s)")


def test_criterion_6_disk_consistency(grid):
    z1, z2 = grid
    errs = {}
    for entry_id in ("ex1", "delta_counterexample"):
        rep = corpus_entry(entry_id).rep
        f = disk_evaluate(rep_to_disk(rep), (cayley(z1), cayley(z2)))
        errs[entry_id] = float(np.max(np.abs(evaluate(rep, (z1, z2)) - 1j * f)))
    nu = plane_to_torus(corpus_entry("ex1").mu)
    _, moments_ok = check_disk_moments(nu, 5, tol=1e-8)
    atom = TorusMeasure(interior=Measure2D((Atom2D((math.pi, math.pi), 4 * PI2),)))
    residuals, atom_ok = check_disk_moments(atom, 5, tol=1e-8)
    m = residuals[(1, -1)]
    ok = (all(v <= 1e-6 for v in errs.values()) and moments_ok and not atom_ok
          and abs(m - 4 * PI2) <= 1e-10)
    check("criterion 6 disk-side consistency", ok,
          f"round trip ex1 {errs['ex1']:.2e}, delta {errs['delta_counterexample']:.2e} (1e-6); "
          f"ex1 moments pass: {moments_ok}; 4pi^2 delta moment (1,-1) = {m.real:.12f} "
          f"(4pi^2 = {4 * PI2:.12f})")


def test_criterion_7_stieltjes_inversion():
    t0 = time.perf_counter()
    rep = corpus_entry("ex1").rep
    q_im = lambda x1, x2, y1, y2: evaluate_im_poisson(rep, (x1 + 1j * y1, x2 + 1j * y2))
    est = stieltjes_functional(q_im, test_function("canonical_weight"))
    rel = abs(est.estimate / PI2 - 1)

    # linearity and non-negativity on the closed form of ex1
    q = corpus_entry("ex1")
    closed = lambda x1, x2, y1, y2: np.imag(q(x1 + 1j * y1, x2 + 1j * y2))
    psis = [test_function("canonical_weight"), test_function("gaussian_weighted"),
            test_function("rational_bump", {"center": [1, 0]})]
    single = [stieltjes_functional(closed, p).estimate for p in psis]
    rng = np.random.default_rng(7)
    lin_err = 0.0
    for _ in range(2):
        i, j = rng.choice(3, 2, replace=False)
        c = rng.uniform(-1, 1, 2)
        mix = combine(c, [psis[i], psis[j]])
        got = stieltjes_functional(closed, mix).estimate
        lin_err = max(lin_err, abs(got - c[0] * single[i] - c[1] * single[j]) / mix.bound)
    dt = time.perf_counter() - t0
    ok = rel <= 0.01 and lin_err <= 1e-6 and min(single) >= -1e-6 and dt < 120
    check("criterion 7 Stieltjes inversion", ok,
          f"estimate {est.estimate:.9f} +- {est.error_estimate:.1e} vs pi^2, rel {rel:.1e} (1%); "
          f"linearity {lin_err:.1e} (1e-6); min estimate {min(single):.4f} (>= -1e-6); "
          f"{dt:.1f}s (120s)")


def test_criterion_8_atoms_and_mass():
    atoms = {i: atom_via_limit(corpus_entry(i).closed_form, (0, 0)) for i in
             ("ex1", "ex2", "delta_counterexample")}
    mass_ex1 = mass_via_limit(corpus_entry("ex1").closed_form)
    mass_const = mass_via_limit(corpus_entry("const_real").closed_form)
    ok = (abs(atoms["ex1"].value) <= 1e-3 and abs(atoms["ex2"].value) <= 1e-3
          and abs(atoms["delta_counterexample"].value - PI2) <= 1e-4
          and mass_ex1.diverged and abs(mass_const.value) <= 1e-8)
    check("criterion 8 atomlessness and mass limits", ok,
          f"atom ex1 {abs(atoms['ex1'].value):.1e}, ex2 {abs(atoms['ex2'].value):.1e} (1e-3); "
          f"counterexample {atoms['delta_counterexample'].value.real:.10f} (pi^2 +- 1e-4); "
          f"mass ex1 diverged: {mass_ex1.diverged}; mass q=5: {abs(mass_const.value):.1e} (1e-8)")


def test_criterion_9_determinism():
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        code = run_cli(["corpus", "run", "ex1", "--seed", "42"], stdout=buf)
        outs.append((code, buf.getvalue()))
    ok = outs[0] == outs[1] and outs[0][0] == 0
    check("criterion 9 determinism", ok,
          f"two runs of `corpus run ex1 --seed 42`: identical = {outs[0] == outs[1]}, "
          f"{len(outs[0][1])} bytes, exit {outs[0][0]}")
