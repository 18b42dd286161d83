"""Shared dense linear algebra helpers.

Everything here works on complex128 numpy arrays.  Rank decisions use a
single scale-aware threshold policy (``RANK_EPS`` relative to the largest
eigenvalue / singular value) so that all modules agree on what counts as
zero.
"""

from __future__ import annotations

import numpy as np

#: relative eigenvalue / singular value threshold for rank decisions
RANK_EPS = 1e-10

#: base relative tolerance for numerical identity checks
DEFAULT_TOL = 1e-9

#: absolute floor for tolerances
TOL_FLOOR = 1e-12


def crandn(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """Standard complex Gaussian array."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def op_norm(m: np.ndarray) -> float:
    """Operator (spectral) norm; 0 for empty matrices."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def scale_tol(*norms: float, base: float = DEFAULT_TOL) -> float:
    """Scale-aware tolerance: base times the product of the given norms.

    Each factor enters as max(1, norm) so that contractive maps do not
    shrink the tolerance; the result is floored at ``TOL_FLOOR``.
    """
    t = base
    for n in norms:
        t *= max(1.0, n)
    return max(t, TOL_FLOOR)


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first significantly nonzero entry is real positive.

    Deterministic tie-breaking for eigen/qr bases reproducible across runs.
    """
    if vectors.size == 0:
        return vectors
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        idx = int(np.argmax(mags > top * 1e-8))
        phase = col[idx] / abs(col[idx])
        out[:, j] = col / phase
    return out


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def psd_eig(m: np.ndarray):
    """Eigendecomposition of a Hermitian PSD matrix, descending order, fixed phases.

    Returns (eigenvalues, eigenvectors); tiny negative eigenvalues are clipped.
    """
    if m.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    w, v = np.linalg.eigh(hermitize(m))
    order = np.argsort(w)[::-1]
    w = np.clip(w[order], 0.0, None)
    v = fix_phases(v[:, order])
    return w, v


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = psd_eig(m)
    return (v * np.sqrt(w)) @ v.conj().T


def psd_inv_sqrt(m: np.ndarray) -> np.ndarray:
    """Inverse square root on the range; pseudo-inverse below the rank threshold."""
    w, v = psd_eig(m)
    inv = np.zeros_like(w)
    if w.size:
        keep = w > RANK_EPS * max(w[0], 0.0) if w[0] > 0 else np.zeros_like(w, bool)
        inv[keep] = 1.0 / np.sqrt(w[keep])
    return (v * inv) @ v.conj().T


def psd_rank(m: np.ndarray, scale: float = 0.0) -> int:
    """Numerical rank; ``scale`` sets an absolute eigenvalue floor."""
    w, _ = psd_eig(m)
    if w.size == 0 or w[0] == 0.0:
        return 0
    return int(np.count_nonzero(w > RANK_EPS * max(w[0], scale)))


def range_projection(m: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the range of a matrix."""
    if m.size == 0:
        return np.zeros_like(m)
    u, s, _ = np.linalg.svd(m)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros_like(m)
    u = u[:, s > RANK_EPS * s[0]]
    return u @ u.conj().T


def null_space_hermitian(normal: np.ndarray, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of a PSD normal matrix.

    ``normal`` is typically sum_u K_u^H K_u for a stack of constraint maps K_u;
    ``scale`` overrides the largest eigenvalue as the rank reference.
    """
    if normal.shape[0] == 0:
        return np.zeros((0, 0), dtype=complex)
    w, v = np.linalg.eigh(hermitize(normal))
    ref = scale if scale is not None else max(float(w[-1]), 0.0)
    if ref == 0.0:
        return fix_phases(np.eye(normal.shape[0], dtype=complex))
    keep = w < RANK_EPS * ref
    return fix_phases(v[:, keep])


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish random unitary via QR of a complex Gaussian, deterministic phases."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    q, r = np.linalg.qr(crandn(rng, n, n))
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return fix_phases(q)


def small_rotation(rng: np.random.Generator, n: int, eps: float) -> np.ndarray:
    """Unitary close to the identity: V diag(exp(i*eps*theta)) V^H."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    v = random_unitary(rng, n)
    theta = rng.uniform(-1.0, 1.0, size=n)
    return (v * np.exp(1j * eps * theta)) @ v.conj().T


def map_from_spanning(src_cols: np.ndarray, tgt_cols: np.ndarray,
                      tol: float = 1e-7) -> np.ndarray:
    """Linear map M with M @ src_cols == tgt_cols, columns spanning the source.

    Raises ValueError when the columns are inconsistent (no linear map exists
    within ``tol`` relative residual).
    """
    if src_cols.shape[0] == 0:
        return np.zeros((tgt_cols.shape[0], 0), dtype=complex)
    m = tgt_cols @ np.linalg.pinv(src_cols, rcond=RANK_EPS)
    scale = max(op_norm(tgt_cols), 1.0)
    resid = op_norm(m @ src_cols - tgt_cols)
    if resid > tol * scale:
        raise ValueError(
            f"spanning-family data does not define a linear map (residual {resid:.3e})")
    return m
