"""Numerical linear algebra for small dense tensors under an arbitrary metric.

Inner products, orthonormalization, subspace projections, operator adjoints
and commutators over a fixed chart basis. Every function here is pure; values
are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, RankDeficient, SingularMetric

TOL_ORTHO = 1e-10
TOL_IDENTITY = 1e-10
TOL_SYMMETRY = 1e-10
EPS_PD = 1e-12
EPS_RANK = 1e-12


@dataclass(frozen=True)
class Metric:
    """A symmetric positive-definite bilinear form given by its matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"metric matrix must be square, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise SingularMetric("metric matrix has non-finite entries")
        asym = np.max(np.abs(m - m.T)) if m.size else 0.0
        if asym > TOL_SYMMETRY * max(1.0, np.max(np.abs(m))):
            raise SingularMetric(f"metric matrix asymmetric by {asym:g}")
        m = 0.5 * (m + m.T)
        if np.min(np.linalg.eigvalsh(m)) <= EPS_PD:
            raise SingularMetric("metric matrix is not positive definite")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.asarray(u) @ self.matrix @ np.asarray(v))

    def norm(self, u: np.ndarray) -> float:
        return float(np.sqrt(max(self.inner(u, u), 0.0)))

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.matrix)


@dataclass(frozen=True)
class SubspaceBasis:
    """A list of vectors spanning a subspace, with the metric they live under."""

    vectors: np.ndarray
    metric: Metric

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        if v.shape[1] != self.metric.dim:
            raise DimensionMismatch(
                f"vectors of dim {v.shape[1]} under metric of dim {self.metric.dim}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("basis vectors contain non-finite entries")
        object.__setattr__(self, "vectors", v)

    def gram(self) -> np.ndarray:
        return self.vectors @ self.metric.matrix @ self.vectors.T


@dataclass(frozen=True)
class OrthonormalFrame:
    """Vectors that are orthonormal with respect to the carried metric."""

    vectors: np.ndarray
    metric: Metric

    def __post_init__(self):
        object.__setattr__(
            self, "vectors", np.atleast_2d(np.asarray(self.vectors, dtype=float))
        )

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def gram(self) -> np.ndarray:
        return self.vectors @ self.metric.matrix @ self.vectors.T

    def orthonormality_defect(self) -> float:
        g = self.gram()
        return float(np.max(np.abs(g - np.eye(g.shape[0])))) if g.size else 0.0


def _mgs_pass(vectors: np.ndarray, g: np.ndarray, eps_rank: float) -> np.ndarray:
    out = vectors.copy()
    k = out.shape[0]
    for i in range(k):
        v = out[i]
        for j in range(i):
            v = v - (out[j] @ g @ v) * out[j]
        nn = float(v @ g @ v)
        if nn <= eps_rank:
            raise RankDeficient(f"vector {i} collapses during orthonormalization")
        out[i] = v / np.sqrt(nn)
    return out


def gram_schmidt(basis: SubspaceBasis, eps_rank: float = EPS_RANK) -> OrthonormalFrame:
    """Orthonormalize a basis under its metric.

    Modified Gram-Schmidt with one re-orthogonalization pass; the first output
    vector is the normalized first input vector, and the span is preserved.
    """
    g = basis.metric.matrix
    gram = basis.gram()
    if gram.shape[0] and np.linalg.det(gram) <= eps_rank:
        raise RankDeficient("Gram determinant below rank threshold")
    out = _mgs_pass(basis.vectors, g, eps_rank)
    out = _mgs_pass(out, g, eps_rank)
    return OrthonormalFrame(out, basis.metric)


def _complete_with_standard_basis(
    seed_vectors: np.ndarray, metric: Metric, ambient_dim: int, eps_rank: float
) -> tuple[np.ndarray, list[int]]:
    """Extend metric-orthonormal seed vectors to a full frame.

    Candidates are the ambient standard basis vectors taken in index order;
    near-dependent candidates are skipped. Returns the added vectors and the
    indices that were kept, so callers can rebuild the same completion at
    nearby points (a frozen pivot set keeps the resulting field smooth).
    """
    g = metric.matrix
    frame = [v for v in seed_vectors]
    added = []
    pivots = []
    for idx in range(ambient_dim):
        if len(frame) == ambient_dim:
            break
        v = np.zeros(ambient_dim)
        v[idx] = 1.0
        for _ in range(2):
            for u in frame:
                v = v - (u @ g @ v) * u
        nn = float(v @ g @ v)
        if nn <= max(eps_rank, 1e-8):
            continue
        v = v / np.sqrt(nn)
        frame.append(v)
        added.append(v)
        pivots.append(idx)
    if len(frame) != ambient_dim:
        raise RankDeficient("could not complete frame to the ambient dimension")
    return np.array(added), pivots


def orthogonal_complement(
    basis: SubspaceBasis, ambient_dim: int, eps_rank: float = EPS_RANK
) -> OrthonormalFrame:
    """Orthonormal frame of the metric-orthogonal complement of span(basis).

    Deterministic: the complement is completed from the ambient standard basis
    in index order and then orthonormalized.
    """
    if basis.vectors.shape[0] >= ambient_dim:
        raise RankDeficient("basis already spans the ambient space")
    if basis.vectors.shape[1] != ambient_dim:
        raise DimensionMismatch("basis vectors do not live in the ambient space")
    seed = gram_schmidt(basis, eps_rank=eps_rank).vectors
    added, _ = _complete_with_standard_basis(seed, basis.metric, ambient_dim, eps_rank)
    return OrthonormalFrame(added, basis.metric)


def complement_with_pivots(
    basis: SubspaceBasis, ambient_dim: int, eps_rank: float = EPS_RANK
) -> tuple[OrthonormalFrame, list[int]]:
    """Like orthogonal_complement but also returns the kept pivot indices."""
    if basis.vectors.shape[0] >= ambient_dim:
        raise RankDeficient("basis already spans the ambient space")
    seed = gram_schmidt(basis, eps_rank=eps_rank).vectors
    added, pivots = _complete_with_standard_basis(
        seed, basis.metric, ambient_dim, eps_rank
    )
    return OrthonormalFrame(added, basis.metric), pivots


def complement_from_pivots(
    seed_frame: np.ndarray, metric: Metric, pivots: list[int], eps_rank: float = EPS_RANK
) -> np.ndarray:
    """Rebuild a complement frame using a previously frozen pivot set."""
    g = metric.matrix
    frame = [v for v in seed_frame]
    added = []
    n = metric.dim
    for idx in pivots:
        v = np.zeros(n)
        v[idx] = 1.0
        for _ in range(2):
            for u in frame:
                v = v - (u @ g @ v) * u
        nn = float(v @ g @ v)
        if nn <= eps_rank:
            raise RankDeficient("frozen pivot degenerated at this point")
        v = v / np.sqrt(nn)
        frame.append(v)
        added.append(v)
    return np.array(added)


def project(v: np.ndarray, frame: OrthonormalFrame) -> np.ndarray:
    """Metric-orthogonal projection of v onto the span of an orthonormal frame."""
    g = frame.metric.matrix
    coeffs = frame.vectors @ g @ np.asarray(v, dtype=float)
    return coeffs @ frame.vectors


def adjoint(op: np.ndarray, g_src: Metric, g_dst: Metric) -> np.ndarray:
    """Metric adjoint of a linear operator between two inner-product spaces.

    For A mapping the source to the destination, returns the map A* with
    g_dst(A x, y) = g_src(x, A* y) for all x, y.
    """
    a = np.asarray(op, dtype=float)
    if a.shape != (g_dst.dim, g_src.dim):
        raise DimensionMismatch(
            f"operator shape {a.shape} incompatible with metrics "
            f"({g_dst.dim}, {g_src.dim})"
        )
    return np.linalg.solve(g_src.matrix, a.T @ g_dst.matrix)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix commutator ab - ba."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch("commutator needs two square matrices of equal size")
    return a @ b - b @ a
