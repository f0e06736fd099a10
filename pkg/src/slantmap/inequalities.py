"""Curvature invariants and the optimal inequalities they satisfy.

Everything in this module is algebra on second-fundamental-form coefficient
arrays, slant data and a space-form parameter: no differentiation happens
here. Each inequality check reports left side, right side, slack and an
equality diagnostic; the slacks decompose into explicitly nonnegative pieces
(sums of squares, the matrix-commutator inequality slack, the constrained
quadratic-form minimum), and those decompositions are exposed so the bounds
are never trusted as black boxes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateDimension,
    DimensionMismatch,
    IncompatibleParameters,
    InternalInconsistency,
)

DEFAULT_SLACK_TOL = 1e-9
DEFAULT_CASORATI_ROTATIONS = 200


# ---------------------------------------------------------------------------
# frame geometry shared by the checks


@dataclass(frozen=True)
class SyntheticProfile:
    """A two-distribution slant profile given by its parameters."""

    r1: int
    r2: int
    theta1: float
    theta2: float
    xi_in_range: bool

    @property
    def r(self) -> int:
        return 2 * self.r1 + 2 * self.r2 + (1 if self.xi_in_range else 0)

    def slant_sum(self) -> float:
        return self.r1 * math.cos(self.theta1) ** 2 + self.r2 * math.cos(self.theta2) ** 2


@dataclass(frozen=True)
class FrameGeometry:
    """Reeb components and structure pairings of an orthonormal range frame.

    eta[i] is the Reeb component of the i-th pushed frame vector and
    psi_pair[i, j] the metric pairing of the structure image of the i-th with
    the j-th. These two arrays are all the frame data the inequality checks
    consume.
    """

    eta: np.ndarray
    psi_pair: np.ndarray
    xi_in_range: bool

    def __post_init__(self):
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=float))
        object.__setattr__(self, "psi_pair", np.asarray(self.psi_pair, dtype=float))
        if self.psi_pair.shape != (self.eta.shape[0],) * 2:
            raise DimensionMismatch("frame geometry arrays disagree on the rank")

    @property
    def rank(self) -> int:
        return self.eta.shape[0]

    def eta_square_sum(self) -> float:
        return float(np.sum(self.eta**2))

    def psi_square_sum(self) -> float:
        return float(np.sum(self.psi_pair**2))

    def psi_row_square(self, index: int) -> float:
        return float(np.sum(self.psi_pair[index] ** 2))


def canonical_geometry(profile: SyntheticProfile) -> FrameGeometry:
    """Frame geometry of the canonical paired frame for a synthetic profile."""
    r = profile.r
    psi = np.zeros((r, r))
    slot = 0
    for count, theta in ((profile.r1, profile.theta1), (profile.r2, profile.theta2)):
        for _ in range(count):
            c = math.cos(theta)
            psi[slot, slot + 1] = c
            psi[slot + 1, slot] = -c
            slot += 2
    eta = np.zeros(r)
    if profile.xi_in_range:
        eta[r - 1] = 1.0
    return FrameGeometry(eta=eta, psi_pair=psi, xi_in_range=profile.xi_in_range)


def geometry_from_frames(structure, frames) -> FrameGeometry:
    """Frame geometry read off a numeric map instance at its base point."""
    psi = structure.psi_at(frames.image_point)
    xi = structure.xi_at(frames.image_point)
    g2 = frames.g2.matrix
    rg = frames.range_frame
    images = (psi @ rg.T).T
    return FrameGeometry(
        eta=rg @ g2 @ xi,
        psi_pair=images @ g2 @ rg.T,
        xi_in_range=frames.xi_in_range,
    )


# ---------------------------------------------------------------------------
# invariants


@dataclass(frozen=True)
class CurvatureInvariants:
    """Ricci values on the frame, scalar curvature and its normalizations."""

    ric: np.ndarray
    tau: float
    rho: float
    tau_perp: float | None = None
    rho_perp: float | None = None

    def with_normal(self, tau_perp: float, rho_perp: float) -> "CurvatureInvariants":
        return CurvatureInvariants(self.ric, self.tau, self.rho, tau_perp, rho_perp)


def horizontal_invariants(curvature_pairing, frame_vectors) -> CurvatureInvariants:
    """Ricci and scalar curvature of the horizontal space from a curvature oracle.

    curvature_pairing(x, y, z, w) must return the metric pairing of the
    curvature of (x, y, z) with w for source tangent vectors.
    """
    frame = np.atleast_2d(np.asarray(frame_vectors, dtype=float))
    r = frame.shape[0]
    ric = np.zeros(r)
    for x in range(r):
        ric[x] = sum(
            curvature_pairing(frame[i], frame[x], frame[x], frame[i])
            for i in range(r)
            if i != x
        )
    tau = sum(
        curvature_pairing(frame[i], frame[j], frame[j], frame[i])
        for i in range(r)
        for j in range(i + 1, r)
    )
    rho = 2.0 * tau / (r * (r - 1)) if r >= 2 else 0.0
    return CurvatureInvariants(ric=ric, tau=float(tau), rho=float(rho))


def sff_stats(zeta: np.ndarray) -> tuple[float, np.ndarray, float]:
    """Squared norm, trace vector over the normal frame, and squared trace norm."""
    z = np.asarray(zeta, dtype=float)
    norm2 = float(np.sum(z**2))
    trace = np.einsum("aii->a", z)
    return norm2, trace, float(np.sum(trace**2))


def assemble_invariants_from_gauss(c: float, geom: FrameGeometry, zeta: np.ndarray) -> CurvatureInvariants:
    """Invariants obtained by summing the pulled-back space-form curvature
    relation over frame pairs; the route the closed identities are checked
    against."""
    z = np.asarray(zeta, dtype=float)
    r = geom.rank
    eta2 = geom.eta**2
    diag = np.einsum("aii->ai", z)
    diag_prod = np.einsum("ai,aj->ij", diag, diag)
    sq = np.einsum("aij,aij->ij", z, z)
    k_pair = (
        0.25 * (c - 3.0)
        + 0.25 * (c + 1.0) * (-eta2[:, None] - eta2[None, :] + 3.0 * geom.psi_pair**2)
        + diag_prod
        - sq
    )
    np.fill_diagonal(k_pair, 0.0)
    ric = k_pair.sum(axis=0)
    tau = 0.5 * float(k_pair.sum())
    rho = 2.0 * tau / (r * (r - 1)) if r >= 2 else 0.0
    return CurvatureInvariants(ric=ric, tau=tau, rho=rho)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of a single inequality check."""

    name: str
    lhs: float
    rhs: float
    slack: float
    holds: bool
    tolerance: float
    equality_diag: dict = field(default_factory=dict)
    informational: bool = False
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "slack": float(self.slack),
            "holds": bool(self.holds),
            "tolerance": float(self.tolerance),
            "equality_diag": {k: _plain(v) for k, v in sorted(self.equality_diag.items())},
            "informational": bool(self.informational),
            "meta": {k: _plain(v) for k, v in sorted(self.meta.items())},
        }


def _plain(value):
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in sorted(value.items())}
    return value


def _report(name, lhs, rhs, tol, equality_diag=None, informational=False, meta=None) -> InequalityReport:
    slack = rhs - lhs
    return InequalityReport(
        name=name,
        lhs=float(lhs),
        rhs=float(rhs),
        slack=float(slack),
        holds=bool(slack >= -tol),
        tolerance=float(tol),
        equality_diag=equality_diag or {},
        informational=informational,
        meta=meta or {},
    )


# ---------------------------------------------------------------------------
# scalar identity and Ricci bound


def scalar_identity_value(c: float, geom: FrameGeometry, zeta: np.ndarray) -> float:
    """Closed-form value of twice the horizontal scalar curvature."""
    z = np.asarray(zeta, dtype=float)
    r = geom.rank
    norm2, _, trace_norm2 = sff_stats(z)
    return (
        0.25 * (c - 3.0) * r * (r - 1)
        + 0.25 * (c + 1.0) * (-2.0 * (r - 1) * geom.eta_square_sum() + 3.0 * geom.psi_square_sum())
        - norm2
        + trace_norm2
    )


def scalar_identity_check(c: float, geom: FrameGeometry, zeta: np.ndarray, tau: float) -> float:
    """Residual between the closed scalar identity and an independently
    assembled scalar curvature."""
    return abs(scalar_identity_value(c, geom, zeta) - 2.0 * tau)


def ricci_bound_sum_of_squares(zeta: np.ndarray, x_index: int = 0) -> float:
    """The nonnegative quantity dropped by the Ricci upper bound, on the
    4-Ricci scale: per normal direction, the square of (twice the chosen
    diagonal entry minus the trace) plus four times the squared off-row."""
    z = np.asarray(zeta, dtype=float)
    trace = np.einsum("aii->a", z)
    first = np.sum((2.0 * z[:, x_index, x_index] - trace) ** 2)
    row = np.sum(z[:, x_index, :] ** 2) - np.sum(z[:, x_index, x_index] ** 2)
    return float(first + 4.0 * row)


def chen_ricci_check(
    c: float,
    geom: FrameGeometry,
    zeta: np.ndarray,
    invariants: CurvatureInvariants,
    x_index: int = 0,
    tol: float = DEFAULT_SLACK_TOL,
) -> InequalityReport:
    """Upper bound on four times the Ricci curvature of a unit horizontal vector.

    The right side carries the squared trace of the second fundamental form
    and the structure pairings of the chosen frame vector; the slack equals
    the explicit sum of squares dropped in the derivation. A frame vector
    with a Reeb component beyond tolerance downgrades the verdict to
    informational.
    """
    z = np.asarray(zeta, dtype=float)
    r = geom.rank
    eta_x = float(geom.eta[x_index])
    _, _, trace_norm2 = sff_stats(z)
    rhs = (
        (c - 3.0) * (r - 1)
        - (c + 1.0) * (geom.eta_square_sum() + (r - 2) * eta_x**2)
        + trace_norm2
        + 3.0 * (c + 1.0) * geom.psi_row_square(x_index)
    )
    lhs = 4.0 * float(invariants.ric[x_index])
    sos = ricci_bound_sum_of_squares(z, x_index)
    trace = np.einsum("aii->a", z)
    off_row = np.delete(z[:, x_index, :], x_index, axis=1)
    # equality patterns with the two printed index ranges kept separate
    pattern_full = {
        "off_row_max": float(np.max(np.abs(off_row))) if off_row.size else 0.0,
        "half_trace_gap": float(np.max(np.abs(z[:, x_index, x_index] - 0.5 * trace)))
        if trace.size
        else 0.0,
    }
    short = np.delete(z[:, x_index, : r - 1], x_index, axis=1) if r > 1 else off_row
    diag_short = np.einsum("aii->a", z[:, : r - 1, : r - 1]) - z[:, x_index, x_index]
    pattern_short = {
        "off_row_max": float(np.max(np.abs(short))) if short.size else 0.0,
        "diag_sum_gap": float(np.max(np.abs(z[:, x_index, x_index] - diag_short)))
        if trace.size
        else 0.0,
    }
    all_equal_branch = {
        "zeta_max": float(np.max(np.abs(z))) if z.size else 0.0,
        "rank_three_diag_gap": float(np.max(np.abs(z[:, 0, 0] - z[:, 1, 1])))
        if (r >= 2 and z.size)
        else 0.0,
    }
    return _report(
        "chen-ricci",
        lhs,
        rhs,
        tol,
        equality_diag={
            "sum_of_squares": sos,
            "pattern_full_trace": pattern_full,
            "pattern_short_trace": pattern_short,
            "total_equality_branch": all_equal_branch,
        },
        informational=not (abs(eta_x) <= 1e-8),
        meta={"x_index": x_index, "c": c, "rank": r},
    )


# ---------------------------------------------------------------------------
# matrix commutator inequality and the normal scalar curvature


def lu_terms(zetas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Left and right sides of the symmetric-matrix commutator inequality,
    batched over the leading axis of (N, q, r, r) coefficient arrays."""
    z = np.asarray(zetas, dtype=float)
    if z.ndim == 3:
        z = z[None]
    n, q, r, _ = z.shape
    diag = np.einsum("nqii->nqi", z)
    sum_d = diag.sum(axis=-1)
    sum_d2 = np.sum(diag**2, axis=-1)
    pair_diag = (r * sum_d2 - sum_d**2).sum(axis=-1)
    total_sq = np.einsum("nqij,nqij->nq", z, z)
    off = 0.5 * (total_sq - sum_d2)
    rhs = pair_diag + 2.0 * r * off.sum(axis=-1)
    prod = np.einsum("naij,nbjk->nabik", z, z)
    comm = prod - np.swapaxes(prod, 1, 2)
    comm_sq = 0.25 * np.einsum("nabik,nabik->n", comm, comm)
    lhs = 2.0 * r * np.sqrt(comm_sq)
    return lhs, rhs


def lu_inequality_check(zeta: np.ndarray, tol: float = DEFAULT_SLACK_TOL) -> InequalityReport:
    """The commutator inequality for one symmetric coefficient array."""
    lhs, rhs = lu_terms(np.asarray(zeta, dtype=float)[None])
    return _report("lu-commutator", float(lhs[0]), float(rhs[0]), tol, meta={"rank": zeta.shape[-1]})


def normal_scalar(zeta: np.ndarray, agreement_tol: float = 1e-10) -> tuple[float, float]:
    """Normal scalar curvature and its normalization from the coefficients.

    Computed twice: from shape-operator matrix commutators, and from the
    explicit coefficient contraction. The two published forms are equivalent
    and must agree to tolerance.
    """
    z = np.asarray(zeta, dtype=float)
    q, r = z.shape[0], z.shape[1]
    if r < 2:
        raise DegenerateDimension("normal scalar curvature needs rank at least 2")
    total = 0.0
    for a in range(q):
        for b in range(a + 1, q):
            comm = z[a] @ z[b] - z[b] @ z[a]
            total += 0.5 * float(np.sum(comm**2))
    # independent route: the printed index contraction
    inner = np.einsum("ajk,bik->abij", z, z) - np.einsum("aik,bjk->abij", z, z)
    iu = np.triu_indices(r, k=1)
    au = np.triu_indices(q, k=1)
    total_idx = float(np.sum(inner[au[0], au[1]][:, iu[0], iu[1]] ** 2))
    if abs(total - total_idx) > agreement_tol * max(1.0, abs(total)):
        raise InternalInconsistency(
            f"normal scalar routes disagree: {total:g} vs {total_idx:g}"
        )
    tau_perp = math.sqrt(total)
    rho_perp = 2.0 * tau_perp / (r * (r - 1))
    return tau_perp, rho_perp


# ---------------------------------------------------------------------------
# the scalar + normal-scalar bound


def _slant_tail(c: float, r: int, slant_sum: float, eta_square_sum: float) -> float:
    tail = 3.0 * (c + 1.0) * slant_sum / (2.0 * r * (r - 1))
    tail -= (c + 1.0) * eta_square_sum / (2.0 * r)
    return tail


def ddvv_check(
    c: float,
    geom: FrameGeometry,
    zeta: np.ndarray,
    invariants: CurvatureInvariants,
    tol: float = DEFAULT_SLACK_TOL,
    row_label: str | None = None,
) -> InequalityReport:
    """Bound on normalized scalar plus normalized normal scalar curvature.

    The slack equals the commutator-inequality slack divided by r^2 (r - 1)
    plus an exactly cancelling trace rearrangement; the decomposition is
    recorded in the equality diagnostic.
    """
    z = np.asarray(zeta, dtype=float)
    r = geom.rank
    if r < 2:
        raise DegenerateDimension("the bound needs rank at least 2")
    _, _, trace_norm2 = sff_stats(z)
    tau_perp, rho_perp = normal_scalar(z)
    lhs = rho_perp + invariants.rho
    rhs = (
        trace_norm2 / r**2
        + 0.25 * (c - 3.0)
        + _slant_tail(c, r, 0.5 * geom.psi_square_sum(), geom.eta_square_sum())
    )
    lu_lhs, lu_rhs = lu_terms(z[None])
    lu_slack = float(lu_rhs[0] - lu_lhs[0])
    diag = {
        "lu_slack_normalized": lu_slack / (r**2 * (r - 1)),
        "lu_slack": lu_slack,
    }
    meta = {"c": c, "rank": r, "tau_perp": tau_perp}
    if row_label:
        meta["row"] = row_label
    return _report("ddvv", lhs, rhs, tol, equality_diag=diag, meta=meta)


# ---------------------------------------------------------------------------
# Casorati curvatures


@dataclass(frozen=True)
class CasoratiSet:
    """Casorati curvature, its hyperplane restriction and the two normalized
    extremized forms; the extrema are over probed hyperplanes and therefore
    bound the true ones from the safe side."""

    c_total: float
    c_hyperplane: float
    delta: float
    delta_hat: float
    inf_hyperplane: float
    sup_hyperplane: float
    probe_count: int
    probed_bound_only: bool = True

    def to_dict(self) -> dict:
        return {
            "c_total": float(self.c_total),
            "c_hyperplane": float(self.c_hyperplane),
            "delta": float(self.delta),
            "delta_hat": float(self.delta_hat),
            "inf_hyperplane": float(self.inf_hyperplane),
            "sup_hyperplane": float(self.sup_hyperplane),
            "probe_count": int(self.probe_count),
            "probed_bound_only": bool(self.probed_bound_only),
        }


def haar_rotations(r: int, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic batch of Haar-distributed rotations of size r."""
    rng = np.random.default_rng(seed)
    qs = []
    for _ in range(count):
        a = rng.standard_normal((r, r))
        q, rr = np.linalg.qr(a)
        q = q * np.sign(np.diag(rr))
        qs.append(q)
    return np.array(qs)


def restricted_square_sum(zeta: np.ndarray, basis: np.ndarray) -> float:
    """Sum of squared coefficients restricted to the span of basis rows."""
    z = np.asarray(zeta, dtype=float)
    b = np.asarray(basis, dtype=float)
    m = np.einsum("ai,qij,bj->qab", b, z, b)
    return float(np.sum(m**2))


def casorati_curvatures(
    zeta: np.ndarray,
    hyperplane: list[int] | None = None,
    n_rotations: int = DEFAULT_CASORATI_ROTATIONS,
    seed: int = 0,
) -> CasoratiSet:
    """Casorati curvature data for one coefficient array.

    The hyperplane extrema are probed over all coordinate hyperplanes plus a
    deterministic batch of random rotations; the probe optimum over- and
    under-estimates the true infimum and supremum respectively, which only
    ever weakens the right sides of the bounds they feed.
    """
    z = np.asarray(zeta, dtype=float)
    q, r = z.shape[0], z.shape[1]
    if r < 2:
        raise DegenerateDimension("Casorati curvature needs rank at least 2")
    total_sq = float(np.sum(z**2))
    c_total = total_sq / r

    def coord_restricted(drop: int) -> float:
        keep = [i for i in range(r) if i != drop]
        sub = z[np.ix_(range(q), keep, keep)]
        return float(np.sum(sub**2))

    values = [coord_restricted(k) / (r - 1) for k in range(r)]
    if n_rotations > 0:
        rot = haar_rotations(r, n_rotations, seed=seed)
        for qmat in rot:
            basis = qmat[:, : r - 1].T
            m = np.einsum("ai,qij,bj->qab", basis, z, basis)
            values.append(float(np.sum(m**2)) / (r - 1))
    inf_cl, sup_cl = min(values), max(values)

    if hyperplane is None:
        keep = list(range(r - 1))
    else:
        keep = list(hyperplane)
    sub = z[np.ix_(range(q), keep, keep)]
    c_hyper = float(np.sum(sub**2)) / len(keep)

    delta = 0.5 * c_total + (r + 1) / (2.0 * r) * inf_cl
    delta_hat = 2.0 * c_total - (2.0 * r - 1) / (2.0 * r) * sup_cl
    return CasoratiSet(
        c_total=c_total,
        c_hyperplane=c_hyper,
        delta=delta,
        delta_hat=delta_hat,
        inf_hyperplane=inf_cl,
        sup_hyperplane=sup_cl,
        probe_count=r + max(0, n_rotations),
    )


def casorati_quadratic_lower(zeta: np.ndarray) -> float:
    """The nonnegative quadratic polynomial behind the first Casorati bound,
    for the coordinate hyperplane spanned by the leading frame vectors."""
    z = np.asarray(zeta, dtype=float)
    r = z.shape[1]
    total = 0.0
    for mat in z:
        lead = mat[: r - 1, : r - 1]
        off_lead = float(np.sum(np.triu(lead, k=1) ** 2))
        column = float(np.sum(mat[: r - 1, r - 1] ** 2))
        d = np.append(np.diag(lead), mat[r - 1, r - 1])
        cross = float(np.sum(np.triu(np.outer(d, d), k=1)))
        total += (
            2.0 * (r + 1) * off_lead
            + (r + 1) * column
            + r * float(np.sum(d[:-1] ** 2))
            + 0.5 * (r - 1) * d[-1] ** 2
            - 2.0 * cross
        )
    return total


def casorati_quadratic_upper(zeta: np.ndarray) -> float:
    """The nonnegative quadratic polynomial behind the second Casorati bound."""
    z = np.asarray(zeta, dtype=float)
    r = z.shape[1]
    total = 0.0
    for mat in z:
        lead = mat[: r - 1, : r - 1]
        off_lead = float(np.sum(np.triu(lead, k=1) ** 2))
        column = float(np.sum(mat[: r - 1, r - 1] ** 2))
        d = np.append(np.diag(lead), mat[r - 1, r - 1])
        cross = float(np.sum(np.triu(np.outer(d, d), k=1)))
        total += (
            0.5 * (2.0 * r - 1) * 2.0 * off_lead
            + 2.0 * (2.0 * r - 1) * column
            + 0.5 * (2.0 * r - 3) * float(np.sum(d[:-1] ** 2))
            + 2.0 * (r - 1) * d[-1] ** 2
            - 2.0 * cross
        )
    return total


def constrained_quadratic_minimum(
    b: float, d: float, k: float, n: int, verify: bool = False, seed: int = 0
) -> tuple[np.ndarray, float]:
    """Global minimizer of the constrained quadratic form.

    f(x) = b * sum_{i<n} x_i^2 + d * x_n^2 - 2 * sum_{i<j} x_i x_j on the
    hyperplane sum(x) = k, under the compatibility condition
    d = (n - 1) / (b - n + 2). On the hyperplane f + k^2 is a positive
    diagonal form, so the critical point is the strict global minimum; with
    compatibility the minimum value is zero for every k.
    """
    if b <= 0 or d <= 0:
        raise IncompatibleParameters("both quadratic coefficients must be positive")
    if n < 2:
        raise IncompatibleParameters("need at least two variables")
    if b - n + 2 <= 0:
        raise IncompatibleParameters("compatibility denominator must be positive")
    expected_d = (n - 1) / (b - n + 2)
    if abs(d - expected_d) > 1e-12 * max(1.0, abs(d)):
        raise IncompatibleParameters(
            f"compatibility fails: d = {d:g}, required {expected_d:g}"
        )
    x = np.full(n, k / (b + 1.0))
    x[n - 1] = k / (d + 1.0)
    value = quadratic_form_value(x, b, d)
    if verify:
        x_num, f_num = minimize_trace_constrained_pgd(b, d, k, n, seed=seed)
        if np.max(np.abs(x_num - x)) > 1e-8 or abs(f_num - value) > 1e-8:
            raise InternalInconsistency("closed form and numerical minimizer disagree")
    return x, float(value)


def quadratic_form_value(x: np.ndarray, b: float, d: float) -> float:
    x = np.asarray(x, dtype=float)
    s = float(np.sum(x))
    sum_sq = float(np.sum(x**2))
    cross = 0.5 * (s * s - sum_sq)
    return float(b * np.sum(x[:-1] ** 2) + d * x[-1] ** 2 - 2.0 * cross)


def minimize_trace_constrained_pgd(
    b: float,
    d: float,
    k: float,
    n: int,
    starts: int = 50,
    iterations: int = 4000,
    seed: int = 0,
) -> tuple[np.ndarray, float]:
    """Projected gradient descent for the constrained quadratic form.

    Independent numerical route used to validate the closed-form minimizer:
    random starts on the hyperplane, gradient steps, re-projection.
    """
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-2.0 * abs(k) - 1.0, 2.0 * abs(k) + 1.0, size=(starts, n))
    xs += (k - xs.sum(axis=1, keepdims=True)) / n
    coeff = np.full(n, b)
    coeff[n - 1] = d
    step = 1.0 / (2.0 * (max(b, d) + n))
    for _ in range(iterations):
        s = xs.sum(axis=1, keepdims=True)
        grad = 2.0 * coeff * xs - 2.0 * (s - xs)
        grad -= grad.mean(axis=1, keepdims=True)  # tangent to the hyperplane
        xs -= step * grad
    values = np.array([quadratic_form_value(x, b, d) for x in xs])
    best = int(np.argmin(values))
    return xs[best], float(values[best])


def casorati_bounds(
    c: float,
    geom: FrameGeometry,
    zeta: np.ndarray,
    invariants: CurvatureInvariants,
    casorati: CasoratiSet | None = None,
    tol: float = DEFAULT_SLACK_TOL,
    n_rotations: int = DEFAULT_CASORATI_ROTATIONS,
    seed: int = 0,
    row_label: str | None = None,
) -> tuple[InequalityReport, InequalityReport]:
    """The two normalized-Casorati upper bounds on the normalized scalar curvature."""
    z = np.asarray(zeta, dtype=float)
    r = geom.rank
    if r < 3:
        raise DegenerateDimension("the Casorati bounds need rank at least 3")
    if casorati is None:
        casorati = casorati_curvatures(z, n_rotations=n_rotations, seed=seed)
    tail = 0.25 * (c - 3.0) + _slant_tail(
        c, r, 0.5 * geom.psi_square_sum(), geom.eta_square_sum()
    )
    lhs = invariants.rho
    diag = np.einsum("aii->a", z)
    lead = diag[:, : r - 1]
    lead_spread = float(np.max(np.abs(lead - lead.mean(axis=1, keepdims=True)))) if lead.size else 0.0
    off = z - np.einsum("ij,aj->aij", np.eye(r), diag)
    equality = {
        "lead_diagonal_spread": lead_spread,
        "off_diagonal_max": float(np.max(np.abs(off))) if off.size else 0.0,
        "last_to_lead_ratio_gap": float(np.max(np.abs(z[:, r - 1, r - 1] - 2.0 * lead.mean(axis=1))))
        if lead.size
        else 0.0,
        "quadratic_lower": casorati_quadratic_lower(z),
        "quadratic_upper": casorati_quadratic_upper(z),
    }
    if geom.xi_in_range:
        equality["reeb_diagonal_max"] = float(np.max(np.abs(z[:, r - 1, r - 1]))) if z.size else 0.0
    meta = {"c": c, "rank": r}
    if row_label:
        meta["row"] = row_label
    rep_delta = _report(
        "casorati-delta", lhs, casorati.delta + tail, tol, equality_diag=equality, meta=meta
    )
    rep_hat = _report(
        "casorati-delta-hat", lhs, casorati.delta_hat + tail, tol, equality_diag=equality, meta=meta
    )
    return rep_delta, rep_hat


# ---------------------------------------------------------------------------
# corollary table rows


COROLLARY_ROWS = (
    "invariant",
    "anti-invariant",
    "semi-invariant",
    "proper-slant",
    "semi-slant",
    "hemi-slant",
)


def general_bound_tail(
    c: float, r: int, r1: float, r2: float, theta1: float, theta2: float, xi_in_range: bool
) -> float:
    """Slant tail of the general bounds, shared by both inequality families."""
    slant_sum = r1 * math.cos(theta1) ** 2 + r2 * math.cos(theta2) ** 2
    return _slant_tail(c, r, slant_sum, 1.0 if xi_in_range else 0.0)


def corollary_row_tail(label: str, c: float, r: int, r1: float, r2: float, theta2: float, xi_in_range: bool) -> float:
    """Simplified closed form of the slant tail for one classification row.

    Each value is the general tail under the row's constraints; equality with
    the substituted general expression is part of the test contract.
    """
    cp = c + 1.0
    if xi_in_range:
        if label == "invariant":
            return cp / (4.0 * r)
        if label == "anti-invariant":
            return -cp / (2.0 * r)
        if label == "semi-invariant":
            return cp / (2.0 * r) * (3.0 * r1 / (r - 1) - 1.0)
        if label == "proper-slant":
            return cp * (3.0 * math.cos(theta2) ** 2 - 2.0) / (4.0 * r)
        if label == "semi-slant":
            return cp / (2.0 * r) * (3.0 * (r1 + r2 * math.cos(theta2) ** 2) / (r - 1) - 1.0)
        if label == "hemi-slant":
            return cp / (2.0 * r) * (3.0 * r2 * math.cos(theta2) ** 2 / (r - 1) - 1.0)
    else:
        if label == "invariant":
            return 3.0 * cp / (4.0 * (r - 1))
        if label == "anti-invariant":
            return 0.0
        if label == "semi-invariant":
            return 3.0 * cp * r1 / (2.0 * r * (r - 1))
        if label == "proper-slant":
            return 3.0 * cp * math.cos(theta2) ** 2 / (4.0 * (r - 1))
        if label == "semi-slant":
            return 3.0 * cp * (r1 + r2 * math.cos(theta2) ** 2) / (2.0 * r * (r - 1))
        if label == "hemi-slant":
            return 3.0 * cp * r2 * math.cos(theta2) ** 2 / (2.0 * r * (r - 1))
    raise KeyError(f"unknown corollary row {label!r}")


def corollary_row_profile(label: str, xi_in_range: bool, rng: np.random.Generator) -> SyntheticProfile:
    """Random admissible profile parameters for one classification row."""
    interior = lambda: float(rng.uniform(0.15, math.pi / 2 - 0.15))
    halves = int(rng.integers(2, 5))
    if label == "invariant":
        return SyntheticProfile(0, halves, 0.0, 0.0, xi_in_range)
    if label == "anti-invariant":
        return SyntheticProfile(0, halves, 0.0, math.pi / 2, xi_in_range)
    if label == "semi-invariant":
        r1 = int(rng.integers(1, halves))
        return SyntheticProfile(r1, halves - r1, 0.0, math.pi / 2, xi_in_range)
    if label == "proper-slant":
        return SyntheticProfile(0, halves, 0.0, interior(), xi_in_range)
    if label == "semi-slant":
        r1 = int(rng.integers(1, halves))
        return SyntheticProfile(r1, halves - r1, 0.0, interior(), xi_in_range)
    if label == "hemi-slant":
        r1 = int(rng.integers(1, halves))
        return SyntheticProfile(r1, halves - r1, math.pi / 2, interior(), xi_in_range)
    raise KeyError(f"unknown corollary row {label!r}")


def match_corollary_row(profile: SyntheticProfile, atol: float = 1e-8) -> str | None:
    """Classification-table row matched by a synthetic profile, if any."""
    def kind(theta):
        if theta <= atol:
            return "zero"
        if abs(theta - math.pi / 2) <= atol:
            return "right"
        return "interior"

    if profile.r1 == 0 or profile.r2 == 0:
        theta = profile.theta2 if profile.r1 == 0 else profile.theta1
        return {"zero": "invariant", "right": "anti-invariant", "interior": "proper-slant"}[kind(theta)]
    pair = (kind(profile.theta1), kind(profile.theta2))
    if pair == ("zero", "right"):
        return "semi-invariant"
    if pair == ("zero", "interior"):
        return "semi-slant"
    if pair == ("right", "interior"):
        return "hemi-slant"
    if pair == ("interior", "interior"):
        return None  # proper bi-slant: the general bound applies unchanged
    return None
