"""Dense linear algebra for tiny symmetric matrices.

Everything here operates on matrices of order <= 4: the Gram matrices of
the 2x2 and 3x3 data matrices that drive the piecewise trajectory
formulas.  The eigensolver is a cyclic Jacobi iteration, which for these
sizes converges in a handful of sweeps and needs no external machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-12
MAX_SWEEPS = 60


@dataclass(frozen=True)
class SymEig:
    """Spectral factorization A = basis @ diag(eigenvalues) @ basis.T.

    eigenvalues are sorted non-increasing; basis columns are the matching
    orthonormal eigenvectors with a deterministic sign convention (the
    largest-magnitude entry of each column is non-negative).
    """

    eigenvalues: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def sym_eig(a: np.ndarray, max_sweeps: int = MAX_SWEEPS) -> SymEig:
    """Eigendecompose a small symmetric matrix by cyclic Jacobi rotations.

    Raises ValueError for non-square, oversized, or non-symmetric input and
    RuntimeError if the off-diagonal mass fails to vanish within the sweep
    budget (which does not happen for the PSD Gram matrices we feed it).
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if not 2 <= n <= 4:
        raise ValueError(f"matrix order must be in 2..4, got {n}")
    asym = np.max(np.abs(a - a.T))
    if asym > SYMMETRY_TOL:
        raise ValueError(f"matrix is not symmetric: max |A - A^T| = {asym:.3e}")

    m = 0.5 * (a + a.T)
    v = np.eye(n)
    scale = np.max(np.abs(m)) or 1.0
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off = max(off, abs(m[p, q]))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if abs(apq) <= 1e-18 * scale:
                    continue
                theta = 0.5 * (m[q, q] - m[p, p]) / apq
                t = np.sign(theta) / (abs(theta) + np.hypot(1.0, theta))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                m = rot.T @ m @ rot
                m[p, q] = m[q, p] = 0.0
                v = v @ rot
    else:
        raise RuntimeError(f"Jacobi sweeps did not converge in {max_sweeps} sweeps")

    eigvals = np.diag(m).copy()
    order = np.argsort(-eigvals, kind="stable")
    eigvals = eigvals[order]
    v = v[:, order]
    # Deterministic signs: force the largest-magnitude entry of each
    # eigenvector non-negative.
    for j in range(n):
        k = int(np.argmax(np.abs(v[:, j])))
        if v[k, j] < 0:
            v[:, j] = -v[:, j]
    return SymEig(eigenvalues=eigvals, basis=v)


def expm_sym_action(eig: SymEig, t: float, vec: np.ndarray) -> np.ndarray:
    """Apply exp(-t A) to a vector using the spectral data of A, t >= 0."""
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (eig.dim,):
        raise ValueError(f"vector shape {vec.shape} does not match order {eig.dim}")
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    u = eig.basis
    return u @ (np.exp(-eig.eigenvalues * t) * (u.T @ vec))


def solve_linear(a: np.ndarray, b: np.ndarray, cond_max: float = 1e12) -> np.ndarray:
    """Solve A x = b for a well-conditioned square A.

    Rejects matrices whose 2-norm condition estimate exceeds cond_max; the
    estimate is attached to the error for diagnosis.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if b.shape != (a.shape[0],):
        raise ValueError(f"rhs shape {b.shape} does not match matrix {a.shape}")
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > cond_max:
        raise ValueError(f"matrix is singular or ill-conditioned (cond ~ {cond:.3e})")
    return np.linalg.solve(a, b)
