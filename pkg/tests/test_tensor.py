import numpy as np
import pytest

from bimodcat.algebra import MultiMatrixAlgebra, standard_form
from bimodcat.bimodule import (Morphism, canonical_bimodule, matrix_extension,
                               multiplicity_matrix, random_morphism_matrix)
from bimodcat.linalg import op_norm, random_unitary
from bimodcat.tensor import (KIND_LEFT, KIND_RIGHT, WellDefinednessError,
                             associator, induced_map, left_unitor, m_iso,
                             m_standard, morphism_tensor, right_unitor, tensor,
                             tensor_left, tensor_matrix_extension_iso,
                             tensor_morphisms, tensor_right, unit_isos)

KINDS = (KIND_LEFT, KIND_RIGHT)


def _bim(rng, a_blocks, b_blocks, mult):
    a = MultiMatrixAlgebra(a_blocks)
    b = MultiMatrixAlgebra(b_blocks)
    mult = np.asarray(mult)
    d = sum(n * int(mult[k, l]) * m
            for k, n in enumerate(a.blocks) for l, m in enumerate(b.blocks))
    return canonical_bimodule(a, b, mult, basis_unitary=random_unitary(rng, d))


def test_middle_algebra_mismatch():
    rng = np.random.default_rng(0)
    x = _bim(rng, (2,), (2,), [[1]])
    y = _bim(rng, (3,), (2,), [[1]])
    for kind in KINDS:
        with pytest.raises(ValueError):
            tensor(kind, x, y)


def test_row_times_column_is_one_dimensional():
    # C^2 as a C-M2 bimodule tensored with C^2 as M2-C: one-dimensional result
    rng = np.random.default_rng(1)
    row = _bim(rng, (1,), (2,), [[1]])
    col = _bim(rng, (2,), (1,), [[1]])
    for kind in KINDS:
        tp = tensor(kind, row, col)
        assert tp.dim == 1
        assert tp.result.validate() < 1e-10


def test_multiplicity_matrices_multiply():
    rng = np.random.default_rng(2)
    x = _bim(rng, (2, 1), (1, 2), [[1, 1], [0, 2]])
    y = _bim(rng, (1, 2), (2,), [[1], [1]])
    pred = multiplicity_matrix(x) @ multiplicity_matrix(y)
    for kind in KINDS:
        tp = tensor(kind, x, y)
        assert np.array_equal(multiplicity_matrix(tp.result), pred)
        assert tp.result.validate() < 1e-9


def test_quotient_section_identities():
    rng = np.random.default_rng(3)
    x = _bim(rng, (2,), (1, 2), [[1, 1]])
    y = _bim(rng, (1, 2), (2,), [[1], [1]])
    for kind in KINDS:
        tp = tensor(kind, x, y)
        assert op_norm(tp.quotient @ tp.section - np.eye(tp.dim)) < 1e-10
        # Q^H Q equals the Gram matrix on the positive part
        recon = tp.quotient.conj().T @ tp.quotient
        assert op_norm(recon - tp.gram) < 1e-9 * max(1.0, op_norm(tp.gram))
        if tp.kernel.size:
            assert op_norm(tp.gram @ tp.kernel) < 1e-7 * max(1.0, op_norm(tp.gram))


def test_unit_isos_are_unitary_morphisms():
    rng = np.random.default_rng(4)
    x = _bim(rng, (2,), (1, 2), [[2, 1]])
    for kind in KINDS:
        l, r = unit_isos(kind, x)
        for f in (l, r):
            assert f.is_morphism()
            assert f.unitary_defect() < 1e-10


def test_unitors_agree_on_standard_square():
    b = MultiMatrixAlgebra((1, 2))
    l2 = standard_form(b).bimodule
    for kind in KINDS:
        tp = tensor(kind, l2, l2)
        assert op_norm(left_unitor(tp) - right_unitor(tp)) < 1e-10


def test_associator_unitary_morphism():
    rng = np.random.default_rng(5)
    x = _bim(rng, (2,), (1, 2), [[1, 1]])
    y = _bim(rng, (1, 2), (2,), [[1], [1]])
    z = _bim(rng, (2,), (2,), [[1]])
    for kind in KINDS:
        t_xy = tensor(kind, x, y)
        t_yz = tensor(kind, y, z)
        t_xy_z = tensor(kind, t_xy.result, z)
        t_x_yz = tensor(kind, x, t_yz.result)
        a = associator(t_xy, t_xy_z, t_yz, t_x_yz)
        assert op_norm(a.conj().T @ a - np.eye(a.shape[1])) < 1e-9
        assert Morphism(t_xy_z.result, t_x_yz.result, a).is_morphism()


def test_tensor_morphisms_functorial():
    rng = np.random.default_rng(6)
    x = _bim(rng, (2,), (2,), [[2]])
    y = _bim(rng, (2,), (1, 1), [[1, 1]])
    f1 = random_morphism_matrix(x, x, rng)
    f2 = random_morphism_matrix(x, x, rng)
    g = random_morphism_matrix(y, y, rng)
    for kind in KINDS:
        tp = tensor(kind, x, y)
        t1 = tensor_morphisms(tp, tp, f1, g)
        t2 = tensor_morphisms(tp, tp, f2, np.eye(y.dim))
        t12 = tensor_morphisms(tp, tp, f1 @ f2, g)
        assert op_norm(t1 @ t2 - t12) < 1e-9
        # identity tensor identity is the identity
        ident = tensor_morphisms(tp, tp, np.eye(x.dim), np.eye(y.dim))
        assert op_norm(ident - np.eye(tp.dim)) < 1e-10


def test_induced_map_rejects_kernel_violation():
    rng = np.random.default_rng(7)
    row = _bim(rng, (1,), (2,), [[1]])
    col = _bim(rng, (2,), (1,), [[1]])
    tp = tensor_left(row, col)
    assert tp.kernel.shape[1] > 0
    bad = random_unitary(rng, tp.alg_dim)   # generic map ignores the kernel
    with pytest.raises(WellDefinednessError):
        induced_map(tp, tp, bad)


def test_matrix_extension_iso():
    rng = np.random.default_rng(8)
    x = _bim(rng, (2,), (1, 2), [[1, 1]])
    y = _bim(rng, (1, 2), (2,), [[1], [1]])
    for kind in KINDS:
        mat, tp_ext, ext_res = tensor_matrix_extension_iso(x, y, 2, 2, kind)
        assert op_norm(mat.conj().T @ mat - np.eye(mat.shape[1])) < 1e-9
        assert Morphism(tp_ext.result, ext_res, mat).is_morphism()
        assert ext_res.dim == 4 * tensor(kind, x, y).dim


def test_zero_multiplicity_product_is_zero_dimensional():
    # the product multiplicity is exactly zero: the Gram matrix is pure
    # rounding noise and must rank to 0, not 1
    rng = np.random.default_rng(11)
    x = _bim(rng, (1,), (2, 1), [[0, 1]])
    y = _bim(rng, (2, 1), (1,), [[1], [0]])
    assert (multiplicity_matrix(x) @ multiplicity_matrix(y)).sum() == 0
    for kind in KINDS:
        tp = tensor(kind, x, y)
        assert tp.dim == 0
        assert tp.result.dim == 0


def test_m_standard_unitary_and_scalar_case():
    for blocks in [(1,), (2,), (1, 2)]:
        b = MultiMatrixAlgebra(blocks)
        m, _, _ = m_standard(b, 2, 2)
        assert op_norm(m.conj().T @ m - np.eye(m.shape[1])) < 1e-10
    one = MultiMatrixAlgebra((1,))
    m, _, _ = m_standard(one, 1, 1)
    assert m.shape == (1, 1)
    assert abs(m[0, 0] - 1.0) < 1e-12


def test_m_iso_unitary_morphism_and_realization_independent():
    rng = np.random.default_rng(9)
    x = _bim(rng, (2,), (1, 2), [[1, 1]])
    y = _bim(rng, (1, 2), (2,), [[1], [1]])
    tpl, tpr = tensor_left(x, y), tensor_right(x, y)
    m = m_iso(x, y, tp_left=tpl, tp_right=tpr)
    assert op_norm(m.conj().T @ m - np.eye(m.shape[1])) < 1e-9
    assert Morphism(tpl.result, tpr.result, m).is_morphism()
    for seed in range(3):
        rng2 = np.random.default_rng(100 + seed)
        m2 = m_iso(x, y, tp_left=tpl, tp_right=tpr,
                   right_rotation=random_unitary(rng2, x.dim),
                   left_rotation=random_unitary(rng2, y.dim))
        assert op_norm(m - m2) < 1e-9


def test_m_iso_agrees_with_standard_on_square():
    b = MultiMatrixAlgebra((1, 2))
    l2 = standard_form(b).bimodule
    m_direct = m_iso(l2, l2)
    m_std, _, _ = m_standard(b, 1, 1)
    assert op_norm(m_direct - m_std) < 1e-10


def test_morphism_tensor_wrapper():
    rng = np.random.default_rng(10)
    x = _bim(rng, (2,), (2,), [[1]])
    y = _bim(rng, (2,), (1,), [[1]])
    f = Morphism(x, x, random_morphism_matrix(x, x, rng))
    g = Morphism(y, y, random_morphism_matrix(y, y, rng))
    for kind in KINDS:
        tp = tensor(kind, x, y)
        fg = morphism_tensor(tp, tp, f, g)
        assert fg.is_morphism()
