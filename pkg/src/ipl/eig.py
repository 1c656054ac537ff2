"""Dense real-symmetric eigendecomposition with verified residuals.

``eig_sym`` wraps LAPACK (numpy.linalg.eigh) behind a fixed deterministic
sign convention and always populates residual metadata.  ``jacobi_eigh``
is a small self-contained cyclic Jacobi solver kept as an independent
reference so that no external library has to be trusted for correctness
checks; it is slow and intended for matrices up to ~50x50.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, SymmetryViolationError, ValidationError

#: relative symmetry tolerance accepted on input matrices
SYMMETRY_RTOL = 1e-12

#: residual / orthogonality budget of a decomposition, relative to ||H||
RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with orthonormal eigenvectors.

    ``eigenvectors[:, i]`` pairs with ``eigenvalues[i]``.  ``max_residual``
    is max_i ||H v_i - E_i v_i||_2 and ``max_orthogonality_defect`` is
    ||V^T V - I||_max, both computed at construction time.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    max_residual: float
    max_orthogonality_defect: float

    @property
    def dim(self) -> int:
        return self.eigenvalues.size


def _validate_symmetric(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 1:
        raise ValidationError("matrix must be square with dimension >= 1")
    if not np.all(np.isfinite(h)):
        raise ValidationError("matrix contains non-finite entries")
    scale = max(np.abs(h).max(), 1.0)
    defect = np.abs(h - h.T).max()
    if defect > SYMMETRY_RTOL * scale:
        raise SymmetryViolationError(
            f"matrix is not symmetric: defect {defect:.3e} exceeds "
            f"{SYMMETRY_RTOL:.0e} * {scale:.3e}"
        )
    return h


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of every column positive.

    Ties break towards the lowest index, so the output is reproducible
    bit-for-bit for identical input.
    """
    v = np.array(vectors, dtype=float, copy=True)
    lead = np.argmax(np.abs(v), axis=0)
    flip = v[lead, np.arange(v.shape[1])] < 0.0
    v[:, flip] *= -1.0
    return v


def eig_sym(matrix) -> EigenSystem:
    """Full spectrum of a dense real symmetric matrix.

    Eigenvalues ascending, eigenvectors orthonormal under the fixed sign
    convention.  Raises ``ConsistencyError`` if the decomposition misses
    the residual budget (which would indicate a broken LAPACK build).
    """
    h = _validate_symmetric(matrix)
    h = 0.5 * (h + h.T)  # exact symmetrization of roundoff-level asymmetry
    w, v = np.linalg.eigh(h)
    v = fix_signs(v)
    residual = float(np.linalg.norm(h @ v - v * w, axis=0).max(initial=0.0))
    defect = float(np.abs(v.T @ v - np.eye(w.size)).max(initial=0.0))
    scale = max(float(np.abs(w).max(initial=0.0)), 1.0)
    if residual > RESIDUAL_RTOL * scale or defect > RESIDUAL_RTOL:
        raise ConsistencyError(
            f"eigendecomposition failed self-check: residual {residual:.3e}, "
            f"orthogonality defect {defect:.3e}"
        )
    return EigenSystem(w, v, residual, defect)


def eigen_residuals(matrix, system: EigenSystem) -> float:
    """Recompute max_i ||H v_i - E_i v_i||_2 for an existing decomposition."""
    h = np.asarray(matrix, dtype=float)
    if h.shape != (system.dim, system.dim):
        raise ValidationError("matrix and eigensystem dimensions disagree")
    r = h @ system.eigenvectors - system.eigenvectors * system.eigenvalues
    return float(np.linalg.norm(r, axis=0).max(initial=0.0))


def jacobi_eigh(matrix, tol: float = 1e-14, max_sweeps: int = 60):
    """Cyclic Jacobi rotations, shift-free; reference solver for small matrices.

    Returns (eigenvalues ascending, eigenvectors) under the same sign
    convention as ``eig_sym``.
    """
    a = _validate_symmetric(matrix).copy()
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.abs(a).max(), 1.0)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                idx = [p, q]
                a[idx, :] = rot.T @ a[idx, :]
                a[:, idx] = a[:, idx] @ rot
                v[:, idx] = v[:, idx] @ rot
    else:
        raise ConsistencyError("jacobi sweep limit reached before convergence")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], fix_signs(v[:, order])
