import numpy as np
import pytest

from bimodcat.linalg import (fix_phases, map_from_spanning, op_norm, psd_eig,
                             psd_inv_sqrt, psd_rank, psd_sqrt, random_unitary,
                             scale_tol, small_rotation)


def test_psd_eig_descending_and_clipped():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    g = a @ a.conj().T
    w, v = psd_eig(g)
    assert np.all(np.diff(w) <= 1e-12)
    assert np.all(w >= 0)
    assert op_norm((v * w) @ v.conj().T - g) < 1e-10 * max(1.0, op_norm(g))


def test_psd_sqrt_inverse_pair():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    g = a @ a.conj().T + np.eye(4)
    s = psd_sqrt(g)
    assert op_norm(s @ s - g) < 1e-9 * op_norm(g)
    si = psd_inv_sqrt(g)
    assert op_norm(s @ si - np.eye(4)) < 1e-9


def test_psd_rank_with_kernel():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    assert psd_rank(a @ a.conj().T) == 3


def test_random_unitary_and_small_rotation():
    rng = np.random.default_rng(3)
    u = random_unitary(rng, 6)
    assert op_norm(u @ u.conj().T - np.eye(6)) < 1e-12
    r = small_rotation(rng, 6, 1e-3)
    assert op_norm(r @ r.conj().T - np.eye(6)) < 1e-12
    assert 1e-5 < op_norm(r - np.eye(6)) < 1e-2


def test_fix_phases_deterministic():
    rng = np.random.default_rng(4)
    v = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=4))
    assert np.allclose(fix_phases(v * phases), fix_phases(v))


def test_scale_tol_floor_and_growth():
    assert scale_tol(base=1e-9) >= 1e-12
    assert scale_tol(10.0, 10.0, base=1e-9) == pytest.approx(1e-7)


def test_map_from_spanning_consistency():
    rng = np.random.default_rng(5)
    src = rng.standard_normal((3, 8)) + 1j * rng.standard_normal((3, 8))
    m = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    got = map_from_spanning(src, m @ src)
    assert op_norm(got - m) < 1e-9 * max(1.0, op_norm(m))
    # inconsistent targets (not the graph of a linear map) are rejected
    bad = m @ src
    bad[:, 0] += 1.0
    with pytest.raises(ValueError):
        map_from_spanning(src, bad)
