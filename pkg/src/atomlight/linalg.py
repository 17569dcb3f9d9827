"""
Dense symmetric-matrix helpers used by the covariance formalism.

All routines take and return plain ``numpy`` arrays.  Symmetric inputs are
symmetrized on entry so that round-off asymmetry never leaks into an
eigendecomposition.
"""

import numpy as np

from .errors import InvalidInput

#: relative cutoff below which eigenvalues count as zero in :func:`pseudoinverse`
PINV_RCOND = 1e-12


def _as_symmetric(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("matrix has non-finite entries")
    return 0.5 * (a + a.T)


def _as_antisymmetric(b):
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise InvalidInput("matrix has non-finite entries")
    return 0.5 * (b - b.T)


def symmetrize(a):
    """Return ``(a + a.T) / 2``."""
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + a.T)


def matrix_abs(a):
    """
    Matrix absolute value ``V |D| V^T`` of a real symmetric matrix.

    Parameters
    ----------
    a : (n, n) array_like
        Real symmetric matrix.

    Returns
    -------
    ndarray
        Symmetric positive-semidefinite matrix commuting with ``a``.
    """
    a = _as_symmetric(a)
    w, v = np.linalg.eigh(a)
    return symmetrize((v * np.abs(w)) @ v.T)


def antisymmetric_abs(b):
    """
    Absolute value ``|iB|`` of the Hermitian matrix ``iB`` for real antisymmetric ``B``.

    ``(iB)^2 = B^T B`` is real symmetric PSD, so ``|iB| = sqrt(B^T B)`` can be
    computed with a real eigendecomposition.  The result is real symmetric.
    """
    b = _as_antisymmetric(b)
    w, v = np.linalg.eigh(symmetrize(b.T @ b))
    # round-off in B^T B is amplified by the square root; drop it
    floor = 8 * b.shape[0] * np.finfo(float).eps * (w[-1] if w.size else 0.0)
    w = np.sqrt(np.where(w > floor, w, 0.0))
    return symmetrize((v * w) @ v.T)


def pseudoinverse(a, rcond=PINV_RCOND):
    """
    Moore-Penrose pseudoinverse of a real symmetric matrix.

    Eigenvalues with ``|w| < rcond * max|w|`` are treated as exactly zero.
    An all-zero matrix maps to the zero matrix.
    """
    a = _as_symmetric(a)
    w, v = np.linalg.eigh(a)
    wmax = np.max(np.abs(w)) if w.size else 0.0
    if wmax == 0.0:
        return np.zeros_like(a)
    keep = np.abs(w) >= rcond * wmax
    winv = np.zeros_like(w)
    winv[keep] = 1.0 / w[keep]
    return symmetrize((v * winv) @ v.T)


def min_eigenvalue(a):
    """Smallest eigenvalue of a real symmetric matrix."""
    a = _as_symmetric(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(a)[0])


def is_psd(a, tol=0.0):
    """True iff the smallest eigenvalue of symmetric ``a`` is at least ``-tol``."""
    if tol < 0:
        raise InvalidInput("tol must be non-negative")
    return min_eigenvalue(a) >= -tol


def hermitian_min_eigenvalue(sym, antisym):
    """
    Smallest eigenvalue of the Hermitian matrix ``sym + i*antisym``.

    Uses the real embedding ``[[S, -B], [B, S]]``, whose spectrum is that of
    ``S + iB`` with every eigenvalue doubled.
    """
    s = _as_symmetric(sym)
    b = _as_antisymmetric(antisym)
    if s.shape != b.shape:
        raise InvalidInput(f"shape mismatch {s.shape} vs {b.shape}")
    if s.size == 0:
        return 0.0
    big = np.block([[s, -b], [b, s]])
    return float(np.linalg.eigvalsh(big)[0])


def is_hermitian_psd(sym, antisym, tol=0.0):
    """True iff ``sym + i*antisym`` is positive semidefinite up to ``-tol``."""
    if tol < 0:
        raise InvalidInput("tol must be non-negative")
    return hermitian_min_eigenvalue(sym, antisym) >= -tol


def epsilon2():
    """The 2x2 antisymmetric symbol ``[[0, 1], [-1, 0]]``."""
    return np.array([[0.0, 1.0], [-1.0, 0.0]])
