import numpy as np
import pytest

from bimodcat.algebra import MultiMatrixAlgebra
from bimodcat.bimodule import canonical_bimodule
from bimodcat.coherence import (CHECK_FAMILIES, CheckResult, check_duality_square,
                                check_involution_hexagon, check_m_assoc,
                                check_m_unit, check_naturality_suite,
                                check_pentagon, check_triangle, exit_code,
                                run_suite)
from bimodcat.instances import InstanceSpec, Limits, generate
from bimodcat.linalg import random_unitary
from bimodcat.tensor import KIND_LEFT, KIND_RIGHT

KINDS = (KIND_LEFT, KIND_RIGHT)


def _bim(rng, a_blocks, b_blocks, mult):
    a = MultiMatrixAlgebra(a_blocks)
    b = MultiMatrixAlgebra(b_blocks)
    mult = np.asarray(mult)
    d = sum(n * int(mult[k, l]) * m
            for k, n in enumerate(a.blocks) for l, m in enumerate(b.blocks))
    return canonical_bimodule(a, b, mult, basis_unitary=random_unitary(rng, d))


def _chain(rng):
    a = MultiMatrixAlgebra((2,))
    b = MultiMatrixAlgebra((1, 2))
    x = _bim(rng, (2,), (1, 2), [[1, 1]])
    y = _bim(rng, (1, 2), (2,), [[1], [1]])
    z = _bim(rng, (2,), (2,), [[1]])
    return x, y, z


def test_individual_checks_pass():
    rng = np.random.default_rng(0)
    x, y, z = _chain(rng)
    for kind in KINDS:
        assert check_triangle(kind, x, y).passed
        assert check_involution_hexagon(kind, x, y, z).passed
        assert check_duality_square(kind, x, y).passed
    assert check_m_unit(x).passed
    assert check_m_assoc(x, y, z).passed
    for r in check_naturality_suite(x, y, z, rng):
        assert r.passed


def test_pentagon_passes():
    rng = np.random.default_rng(1)
    x, y, z = _chain(rng)
    for kind in KINDS:
        r = check_pentagon(kind, z, x, y, z)
        assert r.passed
        assert r.defect <= r.tol


def test_degenerate_zero_dimension():
    rng = np.random.default_rng(2)
    zero = _bim(rng, (1,), (2,), [[0]])
    other = _bim(rng, (2,), (2,), [[1]])
    assert zero.dim == 0
    r = check_triangle(KIND_LEFT, zero, _bim(rng, (2,), (2,), [[1]]))
    assert r.degenerate and r.passed and r.defect == 0.0
    assert check_m_unit(zero).degenerate


def test_mutation_breaks_checks():
    rng = np.random.default_rng(3)
    x, y, z = _chain(rng)
    mut_rng = np.random.default_rng(99)
    r = check_triangle(KIND_LEFT, x, y, mutation=("assoc", mut_rng, 1e-3))
    assert not r.passed and r.defect > r.tol
    r = check_m_unit(x, mutation=("m", mut_rng, 1e-3))
    assert not r.passed
    r = check_duality_square(KIND_RIGHT, x, y, mutation=("c", mut_rng, 1e-3))
    assert not r.passed
    # a mutation naming an edge the check does not use leaves it passing
    r = check_triangle(KIND_LEFT, x, y, mutation=("c", mut_rng, 1e-3))
    assert r.passed


def test_run_suite_report_structure_and_determinism():
    spec = generate(7, limits=Limits())
    rep1 = run_suite(spec)
    rep2 = run_suite(spec)
    assert rep1 == rep2
    names = [c["name"] for c in rep1["checks"]]
    assert names == sorted(names)
    assert set(names) <= set(CHECK_FAMILIES)
    s = rep1["summary"]
    assert s["total"] == len(names)
    assert s["passed"] == s["total"]
    assert s["errors"] == 0
    assert s["maxDefect"] <= 1e-9 * 1e3  # scale-aware per-check tolerances
    assert exit_code(rep1) == 0


def test_run_suite_subset_and_jobs():
    spec = generate(8, limits=Limits())
    rep = run_suite(spec, suite=["m-unit", "triangle-left"])
    names = {c["name"] for c in rep["checks"]}
    assert names == {"m-unit", "triangle-left"}
    rep_par = run_suite(spec, jobs=4)
    assert rep_par == run_suite(spec)


def test_run_suite_mutation_failures_and_exit_codes():
    spec = generate(9, limits=Limits(min_mult=1))
    mut = ("assoc", np.random.default_rng(5), 1e-3)
    rep = run_suite(spec, mutation=mut,
                    suite=["triangle-left", "pentagon-left"])
    assert rep["summary"]["passed"] < rep["summary"]["total"]
    assert exit_code(rep) == 1


def test_guarded_errors_reported():
    # chain whose middle algebras do not match: tensor construction raises,
    # the suite keeps going and records an error result
    rng = np.random.default_rng(10)
    x = _bim(rng, (2,), (2,), [[1]])
    y = _bim(rng, (1,), (2,), [[1]])   # left algebra mismatch with x's right
    spec = InstanceSpec.__new__(InstanceSpec)
    object.__setattr__(spec, "seed", 0)
    object.__setattr__(spec, "limits", Limits())
    object.__setattr__(spec, "algebras", (x.left_algebra, x.right_algebra,
                                          y.right_algebra))
    object.__setattr__(spec, "bimodules", (x, y))
    object.__setattr__(spec, "morphisms", ())
    rep = run_suite(spec, suite=["triangle-left", "duality-left", "m-unit"])
    by_name = {c["name"]: c for c in rep["checks"]}
    assert by_name["m-unit"]["passed"]
    assert not by_name["duality-left"]["passed"]
    assert by_name["duality-left"]["error"]
    assert rep["summary"]["errors"] >= 1
    assert exit_code(rep) == 2


def test_empty_instance_gives_empty_report():
    spec = InstanceSpec(seed=0, limits=Limits(), algebras=(), bimodules=())
    rep = run_suite(spec)
    assert rep["checks"] == []
    assert exit_code(rep) == 0


def test_check_result_as_dict():
    r = CheckResult(name="x", defect=1.0, tol=2.0, passed=True, dims=(1, 2))
    d = r.as_dict()
    assert d == {"name": "x", "defect": 1.0, "tol": 2.0, "passed": True,
                 "dims": [1, 2], "degenerate": False, "error": ""}
