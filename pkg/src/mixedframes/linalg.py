"""Dense double-precision linear algebra used by every other module.

All matrices are 2-D ``numpy.ndarray`` objects with dtype complex128 in
row-major element order.  The inner product convention throughout the
package is

    <x, y> = sum_k x_k * conj(y_k)

i.e. linear in the *first* argument.  Every function here is pure: inputs
are never mutated and identical inputs produce bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonFiniteError,
    NumericalFailureError,
    ZeroVectorError,
)

# LAPACK's QR eigenvalue iteration budget is roughly 30 sweeps per
# eigenvalue; we cap the admitted order instead of the iteration count.
MAX_EIG_ORDER = 64


def inner(x, y):
    """<x, y> = sum x_k conj(y_k), linear in the first argument."""
    return complex(np.vdot(np.asarray(y), np.asarray(x)))


def ensure_finite(a, what="array"):
    a = np.asarray(a)
    if not np.all(np.isfinite(a.view(np.float64) if a.dtype == np.complex128 else a)):
        raise NonFiniteError(f"{what} contains NaN or Inf entries")
    return a


def as_matrix(a, what="matrix"):
    """Validate and normalize a dense matrix to complex128."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatchError(f"{what} must be 2-D with positive shape, got {m.shape}")
    ensure_finite(m, what)
    return m


def matmul(a, b):
    a = as_matrix(a, "left factor")
    b = as_matrix(b, "right factor")
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatchError(
            f"inner dimensions disagree: {a.shape} x {b.shape}"
        )
    return a @ b


def adjoint(a):
    """Conjugate transpose."""
    return as_matrix(a, "matrix").conj().T.copy()


def trace(a):
    a = as_matrix(a, "matrix")
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"trace needs a square matrix, got {a.shape}")
    return complex(np.trace(a))


def frobenius_norm(a):
    return float(np.linalg.norm(np.asarray(a)))


@dataclass(frozen=True)
class EigenResult:
    """Spectrum of a general (non-Hermitian) matrix.

    ``values`` holds all eigenvalues with multiplicity, sorted by
    descending real part, then descending imaginary part.  ``vectors``
    holds the matching unit-norm right eigenvectors as columns.
    ``backward_residual`` is max_k ||A v_k - lambda_k v_k|| / (1 + ||A||_F).
    """

    values: np.ndarray
    vectors: np.ndarray | None
    backward_residual: float

    @property
    def spectral_radius(self):
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def _pair_conjugates(values, pair_tol):
    """Force the spectrum of a real matrix into exact conjugate pairs.

    Positive-imaginary eigenvalues are greedily matched with their nearest
    conjugate partner; each matched pair is replaced by (avg, conj(avg)).
    """
    values = values.copy()
    pos = [i for i, v in enumerate(values) if v.imag > pair_tol]
    neg = [i for i, v in enumerate(values) if v.imag < -pair_tol]
    for i in pos:
        if not neg:
            break
        j = min(neg, key=lambda k: abs(values[k] - np.conj(values[i])))
        neg.remove(j)
        avg = 0.5 * (values[i] + np.conj(values[j]))
        values[i] = avg
        values[j] = np.conj(avg)
    # anything left with tiny imaginary part is a real eigenvalue
    small = np.abs(values.imag) <= pair_tol
    values[small] = values[small].real
    return values


def _sort_spectrum(values, vectors):
    order = np.lexsort((-values.imag, -values.real))
    values = values[order]
    if vectors is not None:
        vectors = vectors[:, order]
    return values, vectors


def eig_general(a, tol=1e-9):
    """Full eigendecomposition of a general square matrix of order <= 64.

    Real input matrices get a post-hoc symmetrization pass so their
    spectra come out in exact conjugate pairs.  Raises
    NumericalFailureError (carrying the residual) if the backward residual
    exceeds ``tol * (1 + ||A||_F)`` or the QR iteration fails to converge.
    """
    a = as_matrix(a, "matrix")
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"eig_general needs a square matrix, got {a.shape}")
    if n > MAX_EIG_ORDER:
        raise DimensionMismatchError(f"matrix order {n} exceeds supported maximum {MAX_EIG_ORDER}")

    is_real = not np.any(a.imag)
    try:
        if is_real:
            values, vectors = np.linalg.eig(a.real)
        else:
            values, vectors = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:  # QR iteration did not converge
        raise NumericalFailureError(f"eigensolver failed to converge: {exc}", residual=np.inf) from exc

    values = np.asarray(values, dtype=np.complex128)
    vectors = np.asarray(vectors, dtype=np.complex128)

    norm_a = frobenius_norm(a)
    if is_real:
        values = _pair_conjugates(values, pair_tol=0.0)

    values, vectors = _sort_spectrum(values, vectors)

    residual = 0.0
    for k in range(n):
        r = float(np.linalg.norm(a @ vectors[:, k] - values[k] * vectors[:, k]))
        residual = max(residual, r)
    residual /= 1.0 + norm_a
    if residual > tol:
        raise NumericalFailureError(
            f"eigendecomposition residual {residual:.3e} exceeds tolerance {tol:.3e}",
            residual=residual,
        )
    return EigenResult(values=values, vectors=vectors, backward_residual=residual)


def orthonormal_span_basis(vectors, rank_tol=1e-12):
    """Orthonormal basis of span(vectors) by pivoted modified Gram-Schmidt.

    A vector whose residual after projection onto the selected basis is
    <= rank_tol * max(1, ||v||) counts as dependent.  Returns
    ``(basis, rank)`` where ``basis`` has shape (rank, dim).
    """
    vecs = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
    if not vecs:
        return np.zeros((0, 0), dtype=np.complex128), 0
    dim = vecs[0].size
    for v in vecs:
        if v.size != dim:
            raise DimensionMismatchError("all vectors must share one dimension")
        ensure_finite(v, "span vector")

    residuals = [v.copy() for v in vecs]
    thresholds = [rank_tol * max(1.0, float(np.linalg.norm(v))) for v in vecs]
    alive = list(range(len(vecs)))
    basis = []
    while alive:
        pick = max(alive, key=lambda i: np.linalg.norm(residuals[i]))
        r = residuals[pick]
        if np.linalg.norm(r) <= thresholds[pick]:
            break
        # second projection pass guards against loss of orthogonality
        for q in basis:
            r = r - np.vdot(q, r) * q
        q = r / np.linalg.norm(r)
        basis.append(q)
        alive.remove(pick)
        for i in alive:
            residuals[i] = residuals[i] - np.vdot(q, residuals[i]) * q
        if len(basis) == dim:
            break
    if basis:
        return np.array(basis), len(basis)
    return np.zeros((0, dim), dtype=np.complex128), 0


def lstsq_scalar(target, direction):
    """The c minimizing ||target - c * direction||.

    Closed form: c = <target, direction> / <direction, direction>.
    """
    t = ensure_finite(np.asarray(target, dtype=np.complex128).ravel(), "target")
    d = ensure_finite(np.asarray(direction, dtype=np.complex128).ravel(), "direction")
    if t.size != d.size:
        raise DimensionMismatchError("target and direction dimensions differ")
    denom = np.vdot(d, d).real
    if denom == 0.0:
        raise ZeroVectorError("least-squares direction is the zero vector")
    return complex(np.vdot(d, t) / denom)


def cluster_complex(values, radius):
    """Single-linkage clustering of complex numbers at the given radius.

    Returns a list of index lists.  Two values land in one cluster iff
    they are connected by a chain of steps each of length <= radius.
    """
    values = np.asarray(values, dtype=np.complex128)
    n = values.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= radius:
                parent[find(i)] = find(j)

    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda idx: min(idx))
