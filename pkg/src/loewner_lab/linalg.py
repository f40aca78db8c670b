"""Dense symmetric linear algebra.

Matrices are plain ``numpy`` arrays. :func:`check_symmetric` is the single
entry point that validates and freezes them; every other function here
accepts anything it accepts. Most routines also take a stack of matrices
with shape ``(..., n, n)``.

The eigensolver is a cyclic Jacobi method vectorised over the stack axis.
Converged members of a stack receive identity rotations, so a matrix gets
bit-identical results whether it is decomposed alone or in a batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import InputError

#: Relative tolerance used for PSD decisions throughout the package.
DEFAULT_TOL = 1e-9
#: Inputs whose asymmetry exceeds this (relative to ``1 + ||A||_F``) are rejected.
SYMMETRY_TOL = 1e-12

_JACOBI_TOL = 1e-13
_JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class PsdVerdict:
    """Outcome of a PSD test.

    ``witness`` is a unit eigenvector for ``min_eigenvalue``; it is filled
    in whether or not the matrix passes.
    """

    is_psd: bool
    min_eigenvalue: float
    witness: np.ndarray

    def __bool__(self) -> bool:
        return self.is_psd


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def check_symmetric(A, *, copy: bool = True) -> np.ndarray:
    """Validate ``A`` (or a stack of matrices) and return a read-only symmetric copy.

    The result is ``(A + A^T) / 2``, which is exactly symmetric in floating
    point. Inputs that are not square, contain non-finite entries, or are
    visibly asymmetric raise :class:`InputError`.
    """
    a = np.array(A, dtype=float, copy=copy)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise InputError(f"expected square matrix, got shape {a.shape}")
    if a.shape[-1] < 1:
        raise InputError("matrix dimension must be at least 1")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    at = np.swapaxes(a, -1, -2)
    asym = np.max(np.abs(a - at), axis=(-2, -1))
    scale = 1.0 + frobenius(a)
    if np.any(asym > SYMMETRY_TOL * scale):
        raise InputError(f"matrix is not symmetric (max asymmetry {np.max(asym):.3g})")
    return _frozen((a + at) / 2.0)


def frobenius(A) -> np.ndarray | float:
    a = np.asarray(A, dtype=float)
    out = np.sqrt(np.sum(a * a, axis=(-2, -1)))
    return float(out) if out.ndim == 0 else out


def _jacobi(a: np.ndarray, vectors: bool):
    """Cyclic Jacobi on a stack ``a`` of shape (B, n, n); ``a`` is overwritten."""
    nb, n, _ = a.shape
    v = np.broadcast_to(np.eye(n), (nb, n, n)).copy() if vectors else None
    if n == 1:
        return a[:, :, 0].copy(), v
    scale = 1.0 + np.sqrt(np.sum(a * a, axis=(1, 2)))
    iu = np.triu_indices(n, 1)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.sqrt(2.0 * np.sum(a[:, iu[0], iu[1]] ** 2, axis=1))
        active = off > _JACOBI_TOL * scale
        if not active.any():
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                rot = active & (apq != 0.0)
                if not rot.any():
                    continue
                safe = np.where(rot, apq, 1.0)
                theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(theta == 0.0, 1.0, t)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                c = np.where(rot, c, 1.0)[:, None]
                s = np.where(rot, s, 0.0)[:, None]
                # columns p, q
                ap = a[:, :, p].copy()
                aq = a[:, :, q]
                a[:, :, p] = c * ap - s * aq
                a[:, :, q] = s * ap + c * aq
                # rows p, q
                ap = a[:, p, :].copy()
                aq = a[:, q, :]
                a[:, p, :] = c * ap - s * aq
                a[:, q, :] = s * ap + c * aq
                if vectors:
                    vp = v[:, :, p].copy()
                    vq = v[:, :, q]
                    v[:, :, p] = c * vp - s * vq
                    v[:, :, q] = s * vp + c * vq
    return a.diagonal(axis1=1, axis2=2).copy(), v


def eigen_sym(A) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending.

    Works on stacks too: eigenvalues then have shape ``(..., n)`` and
    eigenvectors ``(..., n, n)`` with eigenvectors as columns.
    """
    a = check_symmetric(A)
    lead = a.shape[:-2]
    n = a.shape[-1]
    work = np.array(a.reshape(-1, n, n))
    w, v = _jacobi(work, vectors=True)
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return EigenDecomposition(
        _frozen(w.reshape(lead + (n,))), _frozen(v.reshape(lead + (n, n)))
    )


def eigvals_sym(A) -> np.ndarray:
    """Ascending eigenvalues only; cheaper than :func:`eigen_sym` on large stacks."""
    a = check_symmetric(A)
    lead = a.shape[:-2]
    n = a.shape[-1]
    w, _ = _jacobi(np.array(a.reshape(-1, n, n)), vectors=False)
    return np.sort(w, axis=1).reshape(lead + (n,))


def min_eigenvalues(stack) -> np.ndarray:
    return eigvals_sym(stack)[..., 0]


def psd_threshold(A, tol: float = DEFAULT_TOL) -> np.ndarray | float:
    """Eigenvalues below ``-psd_threshold(A, tol)`` count as negative."""
    return tol * (1.0 + frobenius(A))


def is_psd(A, tol: float = DEFAULT_TOL) -> PsdVerdict:
    if tol < 0:
        raise InputError("tol must be nonnegative")
    dec = eigen_sym(A)
    if dec.eigenvalues.ndim != 1:
        raise InputError("is_psd expects a single matrix; use min_eigenvalues for stacks")
    lam = float(dec.eigenvalues[0])
    return PsdVerdict(lam >= -psd_threshold(A, tol), lam, dec.eigenvectors[:, 0].copy())


def _same_shape(A, B) -> tuple[np.ndarray, np.ndarray]:
    a = check_symmetric(A)
    b = check_symmetric(B)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def loewner_geq(A, B, tol: float = DEFAULT_TOL) -> PsdVerdict:
    """Test ``A >= B`` in the Loewner order, i.e. ``A - B`` PSD."""
    a, b = _same_shape(A, B)
    return is_psd(a - b, tol)


def hadamard(A, B) -> np.ndarray:
    a, b = _same_shape(A, B)
    return _frozen(a * b)


def numeric_rank(A, tol: float = DEFAULT_TOL) -> int:
    if tol <= 0:
        raise InputError("tol must be positive")
    w = eigvals_sym(A)
    return int(np.sum(np.abs(w) > psd_threshold(A, tol)))


def pad_direct_sum(A, m: int) -> np.ndarray:
    """Block-diagonal ``A ⊕ 0_{m×m}``."""
    if m < 0:
        raise InputError("padding size must be nonnegative")
    a = check_symmetric(A)
    n = a.shape[-1]
    out = np.zeros(a.shape[:-2] + (n + m, n + m))
    out[..., :n, :n] = a
    return _frozen(out)


def pad_to(A, n: int) -> np.ndarray:
    a = np.asarray(A)
    if a.shape[-1] > n:
        raise InputError(f"cannot pad a {a.shape[-1]}x{a.shape[-1]} matrix down to {n}")
    return pad_direct_sum(a, n - a.shape[-1])


def gram(vectors: Sequence[Sequence[float]], n: int | None = None) -> np.ndarray:
    """``sum_i v_i v_i^T``; ``n`` is required when ``vectors`` is empty."""
    vs = [np.asarray(v, dtype=float).ravel() for v in vectors]
    if not vs:
        if n is None:
            raise InputError("gram of an empty list needs an explicit dimension")
        return _frozen(np.zeros((n, n)))
    dim = vs[0].size
    if any(v.size != dim for v in vs) or (n is not None and n != dim):
        raise InputError("gram vectors must share one dimension")
    if not all(np.all(np.isfinite(v)) for v in vs):
        raise InputError("gram vectors must be finite")
    g = np.stack(vs, axis=1)
    out = g @ g.T
    return _frozen((out + out.T) / 2.0)


def ones(n: int) -> np.ndarray:
    return _frozen(np.ones((n, n)))
