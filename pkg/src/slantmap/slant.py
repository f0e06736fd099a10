"""Slant analysis of the range of a Riemannian map into an almost-contact target.

The structure tensor splits over the range/normal decomposition into four
blocks. Restricted to the range (minus the Reeb direction when that lies in
the range), minus the square of the tangential block is symmetric positive
semidefinite with spectrum in [0, 1]; its eigenvalues are the squared cosines
of the slant angles and its eigenspaces are the slant distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ClusterAmbiguity, PreconditionUnverified, Unclassifiable
from .frame_algebra import Metric
from .manifold import riemann_tensor_at
from .riemannian_map import (
    MapFrames,
    RiemannianMapInstance,
    SffTensor,
    commutator_pairing,
)

CLUSTER_GAP = 1e-6
ANGLE_ATOL = 1e-8


@dataclass(frozen=True)
class TangentialNormalSplit:
    """Block decomposition of the structure tensor over range and normal frames.

    All blocks act on coordinate vectors. tangential[j, i] is the j-th range
    coordinate of the structure image of the i-th range frame vector;
    to_normal, to_range and normal_block are the analogous blocks for the
    remaining three corners.
    """

    tangential: np.ndarray        # range -> range      (r, r)
    to_normal: np.ndarray         # range -> normal     (q, r)
    to_range: np.ndarray          # normal -> range     (r, q)
    normal_block: np.ndarray      # normal -> normal    (q, q)
    split_defect: float
    xi_in_range: bool


@dataclass(frozen=True)
class SlantProfile:
    """Slant angles with multiplicities and eigenspace frames."""

    angles: tuple                  # radians, one per cluster, in report order
    multiplicities: tuple          # eigenspace dimensions
    eigenvalues: tuple             # clustered squared cosines
    coord_bases: tuple             # per cluster: (mult, r) coords in the range frame
    range_bases: tuple             # per cluster: (mult, m) ambient vectors
    xi_location: str               # "in-range" | "in-range-perp"
    rank: int
    spectrum_asymmetry: float
    even_multiplicities: bool

    @property
    def xi_in_range(self) -> bool:
        return self.xi_location == "in-range"

    @property
    def r(self) -> int:
        return self.rank

    @property
    def theta1(self) -> float:
        return self.angles[0]

    @property
    def theta2(self) -> float:
        return self.angles[1] if len(self.angles) > 1 else 0.0

    @property
    def r1(self) -> float:
        return self.multiplicities[0] / 2.0

    @property
    def r2(self) -> float:
        return self.multiplicities[1] / 2.0 if len(self.angles) > 1 else 0.0

    def slant_sum(self) -> float:
        """Sum of half-multiplicities weighted by squared angle cosines."""
        return float(
            sum((m / 2.0) * math.cos(a) ** 2 for a, m in zip(self.angles, self.multiplicities))
        )

    def to_dict(self) -> dict:
        return {
            "angles": [float(a) for a in self.angles],
            "multiplicities": [int(m) for m in self.multiplicities],
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "xi_location": self.xi_location,
            "rank": int(self.rank),
            "even_multiplicities": bool(self.even_multiplicities),
        }


@dataclass(frozen=True)
class MapClass:
    """A row of the classification table matched by a slant profile."""

    label: str
    angles: tuple
    multiplicities: tuple
    parity_ok: bool

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "angles": [float(a) for a in self.angles],
            "multiplicities": [int(m) for m in self.multiplicities],
            "parity_ok": bool(self.parity_ok),
        }


def pq_decompose(inst: RiemannianMapInstance, frames: MapFrames) -> TangentialNormalSplit:
    """Split the structure tensor over the range and normal frames at the image point."""
    psi = inst.target.psi_at(frames.image_point)
    g2 = frames.g2.matrix
    rg, rp = frames.range_frame, frames.normal_frame

    img_range = (psi @ rg.T).T          # structure images of range frame vectors
    img_normal = (psi @ rp.T).T
    tangential = (rg @ g2 @ img_range.T)        # [j, i] = g2(psi rg_i, rg_j)
    to_normal = (rp @ g2 @ img_range.T)         # [a, i]
    to_range = (rg @ g2 @ img_normal.T)         # [j, a]
    normal_block = (rp @ g2 @ img_normal.T)     # [b, a]

    # the four blocks must reassemble the structure images exactly
    rebuilt_r = tangential.T @ rg + to_normal.T @ rp
    rebuilt_n = to_range.T @ rg + normal_block.T @ rp
    defect = max(
        float(np.max(np.abs(rebuilt_r - img_range))) if img_range.size else 0.0,
        float(np.max(np.abs(rebuilt_n - img_normal))) if img_normal.size else 0.0,
    )
    return TangentialNormalSplit(
        tangential=tangential,
        to_normal=to_normal,
        to_range=to_range,
        normal_block=normal_block,
        split_defect=defect,
        xi_in_range=frames.xi_in_range,
    )


def _cluster_sorted(values: np.ndarray, gap: float) -> list[np.ndarray]:
    order = np.argsort(values)
    clusters: list[list[int]] = [[order[0]]]
    for idx in order[1:]:
        if values[idx] - values[clusters[-1][-1]] <= gap:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    return [np.array(c) for c in clusters]


def slant_spectrum(
    split: TangentialNormalSplit,
    frames: MapFrames,
    cluster_gap: float = CLUSTER_GAP,
) -> SlantProfile:
    """Angle spectrum of the range from the tangential block.

    Eigenvalues of minus the squared tangential block on the range (excluding
    the Reeb direction when it sits in the range) are clustered into at most
    two slant angles; each angle is reported as arccos of the square root of
    its eigenvalue.
    """
    r = frames.rank
    active = list(range(r - 1)) if frames.xi_in_range else list(range(r))
    p_op = split.tangential.T  # acts on range coordinates
    p_res = p_op[np.ix_(active, active)]
    m2 = -(p_res @ p_res)
    asym = float(np.max(np.abs(m2 - m2.T))) if m2.size else 0.0
    m2 = 0.5 * (m2 + m2.T)
    eigvals, eigvecs = np.linalg.eigh(m2)
    eigvals = np.clip(eigvals, 0.0, 1.0)

    clusters = _cluster_sorted(eigvals, cluster_gap)
    if len(clusters) > 2:
        raise ClusterAmbiguity(
            f"{len(clusters)} eigenvalue clusters; not a two-angle slant structure"
        )

    records = []
    for cluster in clusters:
        lam = float(np.mean(eigvals[cluster]))
        coords_res = eigvecs[:, cluster].T          # (mult, len(active))
        coords = np.zeros((coords_res.shape[0], r))
        coords[:, active] = coords_res
        ambient = coords @ frames.range_frame
        support = np.sum(ambient**2, axis=0)
        first_support = int(np.argmax(support > 1e-10 * max(1.0, float(support.max()))))
        records.append(
            {
                "lambda": lam,
                "angle": math.acos(math.sqrt(lam)) if lam < 1.0 else 0.0,
                "coords": coords,
                "ambient": ambient,
                "order_key": (first_support, lam),
            }
        )
    records.sort(key=lambda rec: rec["order_key"])

    multiplicities = tuple(rec["coords"].shape[0] for rec in records)
    return SlantProfile(
        angles=tuple(rec["angle"] for rec in records),
        multiplicities=multiplicities,
        eigenvalues=tuple(rec["lambda"] for rec in records),
        coord_bases=tuple(rec["coords"] for rec in records),
        range_bases=tuple(rec["ambient"] for rec in records),
        xi_location="in-range" if frames.xi_in_range else "in-range-perp",
        rank=r,
        spectrum_asymmetry=asym,
        even_multiplicities=all(m % 2 == 0 for m in multiplicities),
    )


def slant_distribution_identities(
    split: TangentialNormalSplit,
    frames: MapFrames,
    profile: SlantProfile,
    psi: np.ndarray | None = None,
) -> dict:
    """Residuals of the five slant-distribution identities on the frame pairs.

    For a unit vector in a distribution of angle theta: the range part of the
    structure image of its normal part scales by sin^2(theta); the normal
    parts cancel; and the three pairings scale by cos^2, sin^2 and
    sin^2 cos^2 of theta respectively.
    """
    g2 = frames.g2.matrix
    rg, rp = frames.range_frame, frames.normal_frame
    p_op, q_op = split.tangential.T, split.to_normal.T
    phi_op, omega_op = split.to_range.T, split.normal_block.T
    psi_sq = None
    if psi is not None:
        psi_sq = psi @ psi
    worst = {k: 0.0 for k in ("phi_q", "qp_plus_omega_q", "tangential_pairing", "normal_pairing", "omega_pairing")}

    for angle, coords in zip(profile.angles, profile.coord_bases):
        cos2, sin2 = math.cos(angle) ** 2, math.sin(angle) ** 2
        for c in coords:
            v = c @ rg
            qv = q_op @ c
            phi_qv = (phi_op @ qv) @ rg
            if psi_sq is not None:
                psi2v = psi_sq @ v
            else:
                # structure square on a range vector orthogonal to the Reeb field
                psi2v = -v
            worst["phi_q"] = max(worst["phi_q"], float(np.max(np.abs(phi_qv - sin2 * psi2v))))
            resid2 = q_op @ (p_op @ c) + omega_op @ qv
            worst["qp_plus_omega_q"] = max(
                worst["qp_plus_omega_q"], float(np.max(np.abs(resid2))) if resid2.size else 0.0
            )
        for ci in coords:
            for cj in coords:
                vi, vj = ci @ rg, cj @ rg
                if psi is not None:
                    psi_pair = float((psi @ vi) @ g2 @ (psi @ vj))
                else:
                    psi_pair = float(vi @ g2 @ vj)
                pvi, pvj = (p_op @ ci) @ rg, (p_op @ cj) @ rg
                qvi, qvj = (q_op @ ci) @ rp, (q_op @ cj) @ rp
                worst["tangential_pairing"] = max(
                    worst["tangential_pairing"],
                    abs(float(pvi @ g2 @ pvj) - cos2 * psi_pair),
                )
                worst["normal_pairing"] = max(
                    worst["normal_pairing"],
                    abs(float(qvi @ g2 @ qvj) - sin2 * psi_pair),
                )
                oqi = (omega_op @ (q_op @ ci)) @ rp
                oqj = (omega_op @ (q_op @ cj)) @ rp
                worst["omega_pairing"] = max(
                    worst["omega_pairing"],
                    abs(float(oqi @ g2 @ oqj) - sin2 * cos2 * psi_pair),
                )
    return worst


def _angle_kind(angle: float, atol: float = ANGLE_ATOL) -> str:
    if angle <= atol:
        return "zero"
    if abs(angle - math.pi / 2.0) <= atol:
        return "right"
    return "interior"


def classify(profile: SlantProfile) -> MapClass:
    """Label the profile by the classification table of slant-angle patterns."""
    kinds = [_angle_kind(a) for a in profile.angles]
    parity_ok = profile.even_multiplicities
    if len(kinds) == 1:
        label = {"zero": "invariant", "right": "anti-invariant", "interior": "proper-slant"}[kinds[0]]
    elif len(kinds) == 2:
        pattern = frozenset(kinds) if kinds[0] != kinds[1] else None
        if pattern == frozenset(("zero", "right")):
            label = "semi-invariant"
        elif pattern == frozenset(("zero", "interior")):
            label = "semi-slant"
        elif pattern == frozenset(("right", "interior")):
            label = "hemi-slant"
        elif kinds[0] == kinds[1] == "interior":
            label = "bi-slant-proper"
        else:
            raise Unclassifiable(f"angle pattern {kinds} matches no table row")
    else:
        raise Unclassifiable(f"{len(kinds)} angle clusters cannot be classified")
    return MapClass(
        label=label,
        angles=profile.angles,
        multiplicities=profile.multiplicities,
        parity_ok=parity_ok,
    )


def canonical_frames(
    inst: RiemannianMapInstance,
    frames: MapFrames,
    split: TangentialNormalSplit,
    profile: SlantProfile,
) -> MapFrames:
    """Reorder the horizontal frame so slant blocks are contiguous and paired.

    Within each distribution of angle theta < pi/2 the frame is arranged in
    pairs (e, sec(theta) * tangential-image of e); the Reeb preimage, when it
    exists, stays last. The pushed frame remains orthonormal because the
    reordering acts by an orthogonal matrix on range coordinates.
    """
    r = frames.rank
    p_op = split.tangential.T
    ordered: list[np.ndarray] = []
    for angle, coords in zip(profile.angles, profile.coord_bases):
        remaining = [c.copy() for c in coords]
        cos_t = math.cos(angle)
        while remaining:
            c = remaining.pop(0)
            c = c / np.linalg.norm(c)
            ordered.append(c)
            if cos_t > 1e-8 and remaining:
                d = p_op @ c
                d = d - (d @ c) * c
                nn = np.linalg.norm(d)
                if nn > 1e-10:
                    d = d / nn
                    ordered.append(d)
                    new_remaining = []
                    for w in remaining:
                        w = w - (w @ c) * c - (w @ d) * d
                        if np.linalg.norm(w) > 1e-8:
                            new_remaining.append(w / np.linalg.norm(w))
                    remaining = new_remaining
    if frames.xi_in_range:
        xi_coord = np.zeros(r)
        xi_coord[r - 1] = 1.0
        ordered.append(xi_coord)
    coords = np.array(ordered)
    if coords.shape != (r, r):
        raise Unclassifiable("canonical reordering did not produce a full frame")
    horizontal = coords @ frames.horizontal
    range_frame = coords @ frames.range_frame
    return MapFrames(
        horizontal=horizontal,
        vertical=frames.vertical,
        range_frame=range_frame,
        normal_frame=frames.normal_frame,
        normal_pivots=frames.normal_pivots,
        xi_in_range=frames.xi_in_range,
        point=frames.point,
        image_point=frames.image_point,
        g1=frames.g1,
        g2=frames.g2,
        jacobian_matrix=frames.jacobian_matrix,
        canonical=True,
    )


def normal_bundle_geodesy_defect(inst: RiemannianMapInstance, frames: MapFrames) -> float:
    """Tangential part of ambient derivatives of normal directions along normals.

    Zero (to tolerance) means the normal distribution is totally geodesic at
    the image point under constant-coefficient extensions.
    """
    from .manifold import christoffel_at

    gamma = christoffel_at(inst.target.metric, frames.image_point).coefficients
    g2 = frames.g2.matrix
    worst = 0.0
    for va in frames.normal_frame:
        for vb in frames.normal_frame:
            deriv = np.einsum("kij,i,j->k", gamma, va, vb)
            tang = frames.range_frame @ g2 @ deriv
            worst = max(worst, float(np.max(np.abs(tang))) if tang.size else 0.0)
    return worst


def _general_commutator_pairing(sff: SffTensor, v1_coords, v2_coords, u1_coords, u2_coords) -> float:
    """g2([S_V2, S_V1] U1, U2) for arbitrary normal V and range U coordinate vectors."""
    z1 = np.einsum("a,aij->ij", v1_coords, sff.zeta)
    z2 = np.einsum("a,aij->ij", v2_coords, sff.zeta)
    m = z1 @ z2 - z2 @ z1
    return float(u1_coords @ m @ u2_coords)


def range_perp_curvature_identity(
    inst: RiemannianMapInstance,
    frames: MapFrames,
    split: TangentialNormalSplit,
    sff: SffTensor,
    indices: tuple[int, int, int, int],
    assert_geodesic: bool = False,
    target_tensor: np.ndarray | None = None,
    geodesy_tol: float = 1e-6,
) -> dict:
    """Residual of the normal-part curvature identity on a horizontal quadruple.

    The normal-bundle curvature pairings are taken through the Ricci-equation
    rearrangement (ambient block minus shape-operator commutator), which the
    Ricci-equation check validates independently; the residual here therefore
    measures the tangential/normal cross-term cancellation and the ambient
    curvature relation, the content this identity adds.
    """
    defect = normal_bundle_geodesy_defect(inst, frames)
    if defect > geodesy_tol and not assert_geodesic:
        raise PreconditionUnverified(
            f"normal bundle fails the totally-geodesic diagnostic by {defect:g}"
        )
    if target_tensor is None:
        target_tensor = riemann_tensor_at(inst.target.metric, frames.image_point)
    g2 = frames.g2.matrix
    lowered = np.einsum("hl,lijk->hijk", g2, target_tensor)

    def r_pair(u, v, w, z) -> float:
        return float(np.einsum("hijk,i,j,k,h->", lowered, u, v, w, z))

    i, j, k, l = indices
    rg, rp = frames.range_frame, frames.normal_frame
    p_op, q_op = split.tangential.T, split.to_normal.T

    def coord(idx):
        c = np.zeros(frames.rank)
        c[idx] = 1.0
        return c

    cx, cy, cz, ch = (coord(t) for t in indices)
    qx, qy = (q_op @ cx) @ rp, (q_op @ cy) @ rp
    qz, qh = (q_op @ cz) @ rp, (q_op @ ch) @ rp
    px_c, py_c = p_op @ cx, p_op @ cy
    px, py = px_c @ rg, py_c @ rg
    fx, fy = rg[i], rg[j]

    lhs = r_pair(qx, qy, qz, qh)

    # normal-bundle curvature via the validated rearrangement
    qz_n, qh_n = q_op @ cz, q_op @ ch
    rperp_full = r_pair(fx, fy, qz, qh) - _general_commutator_pairing(sff, qz_n, qh_n, cx, cy)
    rperp_p = r_pair(px, py, qz, qh) - _general_commutator_pairing(sff, qz_n, qh_n, px_c, py_c)
    comm_full = _general_commutator_pairing(sff, qz_n, qh_n, cx, cy)
    comm_p = _general_commutator_pairing(sff, qz_n, qh_n, px_c, py_c)
    g_terms = -float(qy @ g2 @ qz) * float(qx @ g2 @ qh) + float(qx @ g2 @ qz) * float(
        qy @ g2 @ qh
    )
    rhs = rperp_full - rperp_p + comm_full - comm_p + g_terms
    return {
        "residual": abs(lhs - rhs),
        "geodesy_defect": defect,
        "geodesic_asserted": assert_geodesic,
        "lhs": lhs,
        "rhs": rhs,
    }


def range_perp_ricci_contraction(
    inst: RiemannianMapInstance,
    frames: MapFrames,
    split: TangentialNormalSplit,
    sff: SffTensor,
    x_index: int,
    z_index: int,
    target_tensor: np.ndarray | None = None,
    mu_tol: float = 1e-8,
) -> dict:
    """Normal-bundle Ricci contraction of the curvature identity.

    Contracts the identity over an orthonormal basis of the normal bundle in
    the outer slots; requires the normal parts of the structure images to
    span the whole normal bundle (trivial complementary distribution), which
    lets every normal basis vector be written as the normal part of a pushed
    horizontal vector. Intended for totally geodesic instances, where the
    shape-operator terms vanish.
    """
    q_op = split.to_normal.T
    qdim = frames.normal_dim
    svals = np.linalg.svd(q_op, compute_uv=False) if q_op.size else np.array([])
    mu_rank = int(np.sum(svals > mu_tol))
    if mu_rank < qdim:
        raise PreconditionUnverified(
            f"complementary normal distribution is nontrivial (rank {mu_rank} < {qdim})"
        )
    if target_tensor is None:
        target_tensor = riemann_tensor_at(inst.target.metric, frames.image_point)
    g2 = frames.g2.matrix
    lowered = np.einsum("hl,lijk->hijk", g2, target_tensor)

    def r_pair(u, v, w, z) -> float:
        return float(np.einsum("hijk,i,j,k,h->", lowered, u, v, w, z))

    rg, rp = frames.range_frame, frames.normal_frame
    p_op = split.tangential.T
    r = frames.rank
    cy = np.zeros(r)
    cy[x_index] = 1.0
    cz = np.zeros(r)
    cz[z_index] = 1.0
    v1 = (q_op @ cy) @ rp
    v2 = (q_op @ cz) @ rp
    v2_n = q_op @ cz

    lhs = 0.0
    rhs_curv = 0.0
    for beta in range(qdim):
        w = rp[beta]
        lhs += r_pair(w, v1, v2, w)
        # horizontal preimage of this normal direction through the normal part
        u, *_ = np.linalg.lstsq(q_op, np.eye(qdim)[beta], rcond=None)
        fu = u @ rg
        pu = (p_op @ u) @ rg
        py = (p_op @ cy) @ rg
        w_n = np.eye(qdim)[beta]
        rhs_curv += r_pair(fu, cy @ rg, v2, w) - _general_commutator_pairing(sff, v2_n, w_n, u, cy)
        rhs_curv -= r_pair(pu, py, v2, w) - _general_commutator_pairing(
            sff, v2_n, w_n, p_op @ u, p_op @ cy
        )
        rhs_curv += _general_commutator_pairing(sff, v2_n, w_n, u, cy)
        rhs_curv -= _general_commutator_pairing(sff, v2_n, w_n, p_op @ u, p_op @ cy)
    rhs = rhs_curv + (1.0 - frames.g2.dim + r) * float(v1 @ g2 @ v2)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "residual": abs(lhs - rhs),
        "mu_rank": mu_rank,
        "normal_dim": qdim,
    }
