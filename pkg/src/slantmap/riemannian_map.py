"""Riemannian maps between coordinate charts.

Differentials, kernel/range orthogonal splittings, the second fundamental
form of the map, shape operators, and numerical verification of the Gauss
and Ricci equations. All frames and tensors are snapshots at a single base
point; vector fields needed for differentiation are the constant-coefficient
extensions of the frame vectors (the results are extension-independent, and
constant extensions minimize differentiation error).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import null_space

from ._numdiff import directional_derivative, mixed_second_directional
from .errors import (
    DimensionMismatch,
    IsometryViolation,
    DualityViolation,
    RankOutOfRange,
)
from .frame_algebra import Metric, SubspaceBasis, complement_from_pivots, complement_with_pivots, gram_schmidt
from .kenmotsu import AlmostContactStructure
from .manifold import MetricField, christoffel_at, riemann_tensor_at

STEP_JACOBIAN = 1e-6
STEP_HESSIAN = 1e-4
STEP_NORMAL_FIELD = 1e-4
STEP_NORMAL_CONNECTION = 1e-3
TOL_ISOMETRY = 1e-9
TOL_RANK = 1e-9
TOL_SFF_SYMMETRY = 1e-8
TOL_DUALITY = 1e-6
TOL_RANGE_COMPONENT = 1e-6


@dataclass(frozen=True)
class RiemannianMapInstance:
    """A map between charts with its differential and a base point."""

    source: MetricField
    target: AlmostContactStructure
    chart_map: Callable[[np.ndarray], np.ndarray]
    base_point: np.ndarray
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    is_linear: bool = False
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "base_point", np.asarray(self.base_point, dtype=float))
        if self.base_point.shape != (self.source.dim,):
            raise DimensionMismatch("base point does not match the source dimension")

    def map_at(self, q) -> np.ndarray:
        return np.asarray(self.chart_map(np.asarray(q, dtype=float)), dtype=float)

    def jacobian_at(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(q), dtype=float)
        cols = [
            directional_derivative(self.chart_map, q, e, h=STEP_JACOBIAN, order=2)
            for e in np.eye(self.source.dim)
        ]
        return np.stack(cols, axis=1)


@dataclass(frozen=True)
class MapFrames:
    """Orthonormal frames of the four splittings at the base point.

    horizontal rows e_i span the metric-orthogonal complement of the kernel,
    vertical rows span the kernel, range_frame rows are the pushed vectors
    F_* e_i, and normal_frame rows span the orthogonal complement of the
    range in the target tangent space. When the Reeb vector lies in the
    range, the last horizontal vector maps exactly onto it.
    """

    horizontal: np.ndarray
    vertical: np.ndarray
    range_frame: np.ndarray
    normal_frame: np.ndarray
    normal_pivots: tuple
    xi_in_range: bool
    point: np.ndarray
    image_point: np.ndarray
    g1: Metric
    g2: Metric
    jacobian_matrix: np.ndarray
    canonical: bool = False

    @property
    def rank(self) -> int:
        return self.horizontal.shape[0]

    @property
    def normal_dim(self) -> int:
        return self.normal_frame.shape[0]

    def isometry_defect(self) -> float:
        gram = self.range_frame @ self.g2.matrix @ self.range_frame.T
        return float(np.max(np.abs(gram - np.eye(self.rank))))


@dataclass(frozen=True)
class SffTensor:
    """Second-fundamental-form data of the map at the base point.

    zeta[a, i, j] are the normal-frame coefficients; vectors[i, j] is the full
    ambient value on the frame pair (e_i, e_j), kept so that checks pair the
    complete vectors rather than assuming perpendicularity to the range.
    """

    zeta: np.ndarray
    vectors: np.ndarray
    symmetry_defect: float
    range_component: float

    @property
    def rank(self) -> int:
        return self.zeta.shape[1]

    @property
    def normal_dim(self) -> int:
        return self.zeta.shape[0]

    def to_descriptor(self, m: int | None = None) -> dict:
        r = self.rank
        m_total = (m if m is not None else r + self.normal_dim)
        return {
            "schema_version": 1,
            "r": r,
            "m": m_total,
            "values": [[[float(v) for v in row] for row in mat] for mat in self.zeta],
        }


@dataclass(frozen=True)
class ShapeOperator:
    """Shape operator for one normal direction, in range-frame coordinates."""

    matrix: np.ndarray
    normal_index: int
    duality_defect: float


def differential_at(inst: RiemannianMapInstance, p=None) -> tuple[np.ndarray, int]:
    """Jacobian of the chart map at p and its numerical rank."""
    p = inst.base_point if p is None else np.asarray(p, dtype=float)
    jac = inst.jacobian_at(p)
    svals = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.sum(svals > TOL_RANK))
    m_src, m_tgt = inst.source.dim, inst.target.dim
    if not 0 < rank < min(m_src, m_tgt):
        raise RankOutOfRange(
            f"rank {rank} outside the open interval (0, {min(m_src, m_tgt)})"
        )
    return jac, rank


def _mgs_collect(vectors: np.ndarray, g: np.ndarray, count: int, eps: float = 1e-9) -> np.ndarray:
    """Orthonormalize, skipping near-dependent vectors, until count survive."""
    out: list[np.ndarray] = []
    for v in vectors:
        w = v.astype(float).copy()
        for _ in range(2):
            for u in out:
                w = w - (u @ g @ w) * u
        nn = float(w @ g @ w)
        if nn <= eps:
            continue
        out.append(w / np.sqrt(nn))
        if len(out) == count:
            break
    if len(out) != count:
        raise RankOutOfRange("could not assemble the requested frame size")
    return np.array(out)


def build_frames(
    inst: RiemannianMapInstance,
    tol_isometry: float = TOL_ISOMETRY,
) -> MapFrames:
    """Construct the four mutually consistent frames at the base point."""
    p = inst.base_point
    jac, rank = differential_at(inst)
    fp = inst.map_at(p)
    g1 = inst.source.metric_at(p)
    g2 = inst.target.metric.metric_at(fp)
    m_src = inst.source.dim

    kernel = null_space(jac, rcond=None)  # (m_src, k), Euclidean basis of ker
    if kernel.shape[1] == 0:
        raise RankOutOfRange("kernel is trivial")
    vertical = gram_schmidt(SubspaceBasis(kernel.T, g1)).vectors

    # horizontal space: g1-orthogonal complement of the kernel
    h_basis = null_space(kernel.T @ g1.matrix, rcond=None).T  # (r, m_src)
    if h_basis.shape[0] != rank:
        raise RankOutOfRange("horizontal dimension does not match the rank")

    xi = inst.target.xi_at(fp)
    sol, *_ = np.linalg.lstsq(jac, xi, rcond=None)
    xi_residual = float(np.linalg.norm(jac @ sol - xi))
    xi_norm = float(np.sqrt(max(xi @ g2.matrix @ xi, 0.0)))
    xi_in_range = xi_residual < 1e-8 * max(1.0, xi_norm)

    if xi_in_range:
        # g1-horizontal part of the preimage, placed last in the frame
        sol_h = sol - (vertical @ g1.matrix @ sol) @ vertical
        stacked = np.vstack([sol_h, h_basis])
        frame = _mgs_collect(stacked, g1.matrix, rank)
        frame = np.vstack([frame[1:], frame[:1]])
    else:
        frame = _mgs_collect(h_basis, g1.matrix, rank)

    range_frame = (jac @ frame.T).T
    gram = range_frame @ g2.matrix @ range_frame.T
    defect = float(np.max(np.abs(gram - np.eye(rank))))
    if defect > tol_isometry:
        raise IsometryViolation(
            f"pushed frame fails orthonormality by {defect:g} (not a Riemannian map here)"
        )

    normal, pivots = complement_with_pivots(SubspaceBasis(range_frame, g2), inst.target.dim)
    return MapFrames(
        horizontal=frame,
        vertical=vertical,
        range_frame=range_frame,
        normal_frame=normal.vectors,
        normal_pivots=tuple(pivots),
        xi_in_range=xi_in_range,
        point=p,
        image_point=fp,
        g1=g1,
        g2=g2,
        jacobian_matrix=jac,
    )


def _sff_vector(
    inst: RiemannianMapInstance,
    frames: MapFrames,
    gamma_src: np.ndarray,
    gamma_tgt: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
) -> np.ndarray:
    """Ambient value of the map's second fundamental form on (x, y)."""
    jac = frames.jacobian_matrix
    jx, jy = jac @ x, jac @ y
    value = np.einsum("kij,i,j->k", gamma_tgt, jx, jy)
    if not inst.source.is_constant:
        value = value - jac @ np.einsum("kij,i,j->k", gamma_src, x, y)
    if not inst.is_linear:
        value = value + mixed_second_directional(
            inst.chart_map, frames.point, x, y, h=STEP_HESSIAN
        )
    return value


def second_fundamental_form(inst: RiemannianMapInstance, frames: MapFrames) -> SffTensor:
    """Normal-frame coefficients of the second fundamental form on the frame pairs."""
    r = frames.rank
    m = inst.target.dim
    gamma_src = (
        np.zeros((inst.source.dim,) * 3)
        if inst.source.is_constant
        else christoffel_at(inst.source, frames.point).coefficients
    )
    gamma_tgt = (
        np.zeros((m, m, m))
        if inst.target.metric.is_constant and inst.is_linear
        else christoffel_at(inst.target.metric, frames.image_point).coefficients
    )
    vectors = np.zeros((r, r, m))
    for i in range(r):
        for j in range(i, r):
            v = _sff_vector(inst, frames, gamma_src, gamma_tgt, frames.horizontal[i], frames.horizontal[j])
            vectors[i, j] = v
            if j != i:
                w = _sff_vector(inst, frames, gamma_src, gamma_tgt, frames.horizontal[j], frames.horizontal[i])
                vectors[j, i] = w
    zeta = np.einsum("am,mn,ijn->aij", frames.normal_frame, frames.g2.matrix, vectors)
    sym = float(np.max(np.abs(zeta - np.swapaxes(zeta, 1, 2)))) if zeta.size else 0.0
    range_comp = float(
        np.max(np.abs(np.einsum("km,mn,ijn->ijk", frames.range_frame, frames.g2.matrix, vectors)))
    )
    return SffTensor(zeta=zeta, vectors=vectors, symmetry_defect=sym, range_component=range_comp)


def make_normal_frame_field(inst: RiemannianMapInstance, frames: MapFrames):
    """Smooth extension q -> normal frame rows at q, with frozen pivots.

    The pushed horizontal frame is re-orthonormalized under the target metric
    at F(q) and completed with the pivot set selected at the base point, so
    the field is smooth wherever the pivots stay admissible.
    """
    e_rows = frames.horizontal

    def field(q: np.ndarray) -> np.ndarray:
        fq = inst.map_at(q)
        g2q = Metric(inst.target.metric.matrix_at(fq))
        pushed = (inst.jacobian_at(q) @ e_rows.T).T
        seed = gram_schmidt(SubspaceBasis(pushed, g2q)).vectors
        return complement_from_pivots(seed, g2q, list(frames.normal_pivots))

    return field


def _pullback_derivative(
    inst: RiemannianMapInstance,
    frames: MapFrames,
    w_field: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    at: np.ndarray,
    h: float,
) -> np.ndarray:
    """Pullback covariant derivative of a field along F, in direction x at `at`."""
    d = directional_derivative(w_field, at, x, h=h, order=2)
    fq = inst.map_at(at)
    gamma = christoffel_at(inst.target.metric, fq).coefficients
    jx = inst.jacobian_at(at) @ x
    return d + np.einsum("kij,i,j->k", gamma, jx, np.asarray(w_field(at), dtype=float))


def shape_operator(
    inst: RiemannianMapInstance,
    frames: MapFrames,
    sff: SffTensor,
    normal_index: int,
    tol: float = TOL_DUALITY,
) -> ShapeOperator:
    """Shape operator for one normal frame direction, via two independent routes.

    Route one reads the matrix straight off the second-fundamental-form
    coefficients (the duality pairing); route two differentiates the extended
    normal frame field and takes minus the tangential part. The two must
    agree within tolerance.
    """
    alpha = normal_index
    dual = sff.zeta[alpha]

    normal_field = make_normal_frame_field(inst, frames)

    def v_field(q, _a=alpha):
        return normal_field(q)[_a]

    r = frames.rank
    derived = np.zeros((r, r))
    g2 = frames.g2.matrix
    for i in range(r):
        nabla = _pullback_derivative(
            inst, frames, v_field, frames.horizontal[i], frames.point, STEP_NORMAL_FIELD
        )
        derived[i] = -(frames.range_frame @ g2 @ nabla)
    defect = float(np.max(np.abs(derived - dual)))
    if defect > tol:
        raise DualityViolation(
            f"shape operator routes disagree by {defect:g} for normal index {alpha}"
        )
    return ShapeOperator(matrix=dual, normal_index=alpha, duality_defect=defect)


def commutator_pairing(sff: SffTensor, a: int, b: int) -> np.ndarray:
    """Matrix of g2([S_b, S_a] F_* e_i, F_* e_j) over the range frame.

    With symmetric coefficient matrices Z_a, Z_b this pairing equals
    (Z_a Z_b - Z_b Z_a)[i, j].
    """
    za, zb = sff.zeta[a], sff.zeta[b]
    return za @ zb - zb @ za


def gauss_equation_check(
    inst: RiemannianMapInstance,
    frames: MapFrames,
    sff: SffTensor,
    indices: tuple[int, int, int, int],
    target_tensor: np.ndarray | None = None,
    source_tensor: np.ndarray | None = None,
) -> float:
    """Residual of the Gauss equation on one horizontal frame quadruple.

    Curvatures of source and target are evaluated independently of the
    second-fundamental-form data, so a small residual is a genuine check.
    Precomputed lowered curvature tensors may be passed in to amortize work
    across quadruples.
    """
    i, j, k, l = indices
    g2 = frames.g2.matrix
    if target_tensor is None:
        target_tensor = riemann_tensor_at(inst.target.metric, frames.image_point)
    fe = frames.range_frame
    lhs = float(
        fe[l] @ g2 @ np.einsum("lijk,i,j,k->l", target_tensor, fe[i], fe[j], fe[k])
    )
    if inst.source.is_constant:
        src_term = 0.0
    else:
        if source_tensor is None:
            source_tensor = riemann_tensor_at(inst.source, frames.point)
        e = frames.horizontal
        g1 = frames.g1.matrix
        src_term = float(
            e[l] @ g1 @ np.einsum("lijk,i,j,k->l", source_tensor, e[i], e[j], e[k])
        )
    pair_ik_jl = float(sff.vectors[i, k] @ g2 @ sff.vectors[j, l])
    pair_jk_il = float(sff.vectors[j, k] @ g2 @ sff.vectors[i, l])
    rhs = src_term + pair_ik_jl - pair_jk_il
    return abs(lhs - rhs)


def normal_curvature_pairing(
    inst: RiemannianMapInstance,
    frames: MapFrames,
    indices: tuple[int, int, int, int],
    h_outer: float = STEP_NORMAL_CONNECTION,
    h_inner: float = STEP_NORMAL_FIELD,
) -> float:
    """g2(R_perp(F_* e_i, F_* e_j) v_a, v_b) by differentiating the normal connection.

    The normal connection is the normal projection of the pullback derivative
    of the extended normal frame field; the constant-coefficient frame
    extensions commute, so no bracket term appears.
    """
    i, j, a, b = indices
    normal_field = make_normal_frame_field(inst, frames)

    def v_field(q, _a=a):
        return normal_field(q)[_a]

    def normal_project(q, vec):
        fq = inst.map_at(q)
        g2q = inst.target.metric.matrix_at(fq)
        normals = normal_field(q)
        return (normals @ g2q @ vec) @ normals

    def w_field_factory(direction):
        x = frames.horizontal[direction]

        def w_field(q):
            nabla = _pullback_derivative(inst, frames, v_field, x, q, h_inner)
            return normal_project(q, nabla)

        return w_field

    w_j = w_field_factory(j)
    w_i = w_field_factory(i)
    term_ij = normal_project(
        frames.point,
        _pullback_derivative(inst, frames, w_j, frames.horizontal[i], frames.point, h_outer),
    )
    term_ji = normal_project(
        frames.point,
        _pullback_derivative(inst, frames, w_i, frames.horizontal[j], frames.point, h_outer),
    )
    value = term_ij - term_ji
    g2 = frames.g2.matrix
    return float(frames.normal_frame[b] @ g2 @ value)


def ricci_equation_check(
    inst: RiemannianMapInstance,
    frames: MapFrames,
    sff: SffTensor,
    indices: tuple[int, int, int, int],
    target_tensor: np.ndarray | None = None,
) -> tuple[float, float]:
    """Residual of the Ricci equation on (e_i, e_j, v_a, v_b).

    Returns (residual, normal_curvature_pairing). The normal curvature is
    computed honestly from the normal connection, the ambient side from the
    target curvature tensor, and the commutator side from the shape
    operators; the three must reconcile.
    """
    i, j, a, b = indices
    g2 = frames.g2.matrix
    if target_tensor is None:
        target_tensor = riemann_tensor_at(inst.target.metric, frames.image_point)
    lhs = float(
        frames.normal_frame[b]
        @ g2
        @ np.einsum(
            "lijk,i,j,k->l",
            target_tensor,
            frames.range_frame[i],
            frames.range_frame[j],
            frames.normal_frame[a],
        )
    )
    rperp = normal_curvature_pairing(inst, frames, (i, j, a, b))
    comm = float(commutator_pairing(sff, a, b)[i, j])
    return abs(lhs - (rperp + comm)), rperp
