"""Seeded randomized falsification sweeps over synthetic instances.

Instances are generated in per-shape batches; batch g draws its random
substream from (seed, g), so results do not depend on how the batches are
scheduled and merge deterministically by instance index. All checks are
vectorized; any negative slack beyond tolerance becomes a finding carrying
full reproduction data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .inequalities import DEFAULT_SLACK_TOL, haar_rotations, lu_terms

LU_SHAPES = tuple((r, q) for r in (3, 4, 5) for q in (1, 2, 3))
FULL_SHAPES = tuple((r, q) for r in (3, 4, 5, 7) for q in (1, 2, 3))
ENDPOINT_MASS = 0.1


@dataclass
class SweepOutcome:
    """Aggregated result of one randomized sweep."""

    count: int
    findings: list = field(default_factory=list)
    min_slack: dict = field(default_factory=dict)
    max_residual: dict = field(default_factory=dict)

    def record_slack(self, check: str, slacks: np.ndarray, base_index: int, tol: float, extra=None):
        if slacks.size == 0:
            return
        worst = float(np.min(slacks))
        if check not in self.min_slack or worst < self.min_slack[check]:
            self.min_slack[check] = worst
        bad = np.nonzero(slacks < -tol)[0]
        for idx in bad:
            finding = {
                "check": check,
                "index": int(base_index + idx),
                "slack": float(slacks[idx]),
            }
            if extra:
                finding.update(extra)
            self.findings.append(finding)

    def record_residual(self, check: str, residuals: np.ndarray, base_index: int, tol: float):
        if residuals.size == 0:
            return
        worst = float(np.max(residuals))
        if check not in self.max_residual or worst > self.max_residual[check]:
            self.max_residual[check] = worst
        bad = np.nonzero(residuals > tol)[0]
        for idx in bad:
            self.findings.append(
                {"check": check, "index": int(base_index + idx), "residual": float(residuals[idx])}
            )

    def to_dict(self) -> dict:
        return {
            "count": int(self.count),
            "findings": list(self.findings),
            "min_slack": {k: float(v) for k, v in sorted(self.min_slack.items())},
            "max_residual": {k: float(v) for k, v in sorted(self.max_residual.items())},
        }


def _batch_sizes(total: int, groups: int) -> list[int]:
    base, rem = divmod(total, groups)
    return [base + (1 if g < rem else 0) for g in range(groups)]


def random_symmetric_batch(rng: np.random.Generator, count: int, q: int, r: int) -> np.ndarray:
    raw = rng.uniform(-1.0, 1.0, size=(count, q, r, r))
    return 0.5 * (raw + np.swapaxes(raw, 2, 3))


def _random_angles(rng: np.random.Generator, count: int) -> np.ndarray:
    """Angles uniform on [0, pi/2] with extra mass on both endpoints."""
    u = rng.random(count)
    angles = rng.uniform(0.0, math.pi / 2.0, size=count)
    angles[u < ENDPOINT_MASS] = 0.0
    angles[(u >= ENDPOINT_MASS) & (u < 2 * ENDPOINT_MASS)] = math.pi / 2.0
    return angles


def _random_profile_batch(rng: np.random.Generator, count: int, r: int):
    """Vectorized profile parameters for a fixed rank.

    Odd rank forces the Reeb field into the range, even rank into its
    complement; the remaining half-dimension splits uniformly.
    """
    xi_in_range = r % 2 == 1
    halves = (r - 1) // 2 if xi_in_range else r // 2
    r1 = rng.integers(0, halves + 1, size=count)
    r2 = halves - r1
    theta1 = _random_angles(rng, count)
    theta2 = _random_angles(rng, count)
    theta1[r1 == 0] = 0.0
    theta2[r2 == 0] = 0.0
    return xi_in_range, r1, r2, theta1, theta2


def _psi_pair_batch(r1, r2, theta1, theta2, r: int) -> np.ndarray:
    """Canonical paired-frame structure pairings, batched."""
    count = r1.shape[0]
    psi = np.zeros((count, r, r))
    halves = (r1 + r2)[0] if count else 0
    for slot in range(int(halves)):
        theta = np.where(slot < r1, theta1, theta2)
        c = np.cos(theta)
        psi[:, 2 * slot, 2 * slot + 1] = c
        psi[:, 2 * slot + 1, 2 * slot] = -c
    return psi


def _assembled_pair_curvature(c, eta2, psi, zeta):
    """Batched frame-pair sectional values from the pulled-back curvature relation."""
    diag = np.einsum("nqii->nqi", zeta)
    diag_prod = np.einsum("nqi,nqj->nij", diag, diag)
    sq = np.einsum("nqij,nqij->nij", zeta, zeta)
    k = (
        0.25 * (c - 3.0)[:, None, None]
        + 0.25 * (c + 1.0)[:, None, None]
        * (-eta2[:, :, None] - eta2[:, None, :] + 3.0 * psi**2)
        + diag_prod
        - sq
    )
    idx = np.arange(k.shape[1])
    k[:, idx, idx] = 0.0
    return k


def falsification_sweep(
    n_instances: int,
    seed: int,
    tol: float = DEFAULT_SLACK_TOL,
    shapes: tuple = FULL_SHAPES,
    lu_kernel=None,
    identity_tol: float = 1e-9,
    casorati_rotations: int = 50,
    run_casorati: bool = True,
) -> SweepOutcome:
    """Random (c, profile, zeta) instances through every algebraic check.

    The commutator inequality, the Ricci bound with its sum-of-squares slack,
    the scalar + normal-scalar bound and the two Casorati bounds are all
    published theorems for this data; any finding is an engine defect.
    lu_kernel is a test-only hook replacing the commutator-inequality kernel,
    used to prove the harness can see injected violations.
    """
    outcome = SweepOutcome(count=n_instances)
    if n_instances <= 0:
        return outcome
    kernel = lu_kernel if lu_kernel is not None else lu_terms
    sizes = _batch_sizes(n_instances, len(shapes))
    base_index = 0
    for group, ((r, q), size) in enumerate(zip(shapes, sizes)):
        if size == 0:
            continue
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(group,)))
        zeta = random_symmetric_batch(rng, size, q, r)
        c = rng.uniform(-5.0, 5.0, size=size)
        xi_in_range, r1, r2, theta1, theta2 = _random_profile_batch(rng, size, r)
        psi = _psi_pair_batch(r1, r2, theta1, theta2, r)
        eta = np.zeros((size, r))
        if xi_in_range:
            eta[:, r - 1] = 1.0
        eta2 = eta**2
        eta_sum = eta2.sum(axis=1)
        slant_sum = r1 * np.cos(theta1) ** 2 + r2 * np.cos(theta2) ** 2

        # commutator inequality
        lu_lhs, lu_rhs = kernel(zeta)
        outcome.record_slack("lu", lu_rhs - lu_lhs, base_index, tol)

        # invariants assembled from the curvature relation
        k_pair = _assembled_pair_curvature(c, eta2, psi, zeta)
        tau = 0.5 * k_pair.sum(axis=(1, 2))
        rho = 2.0 * tau / (r * (r - 1))
        ric0 = k_pair[:, :, 0].sum(axis=1)

        # closed scalar identity against the assembly
        norm2 = np.einsum("nqij,nqij->n", zeta, zeta)
        trace = np.einsum("nqii->nq", zeta)
        trace_norm2 = np.einsum("nq,nq->n", trace, trace)
        psi_sq_sum = np.einsum("nij,nij->n", psi, psi)
        closed = (
            0.25 * (c - 3.0) * r * (r - 1)
            + 0.25 * (c + 1.0) * (-2.0 * (r - 1) * eta_sum + 3.0 * psi_sq_sum)
            - norm2
            + trace_norm2
        )
        outcome.record_residual("scalar-identity", np.abs(closed - 2.0 * tau), base_index, identity_tol)

        # Ricci bound for the first frame vector, slack against its sum of squares
        psi_row = np.sum(psi[:, 0, :] ** 2, axis=1)
        rhs_ric = (
            (c - 3.0) * (r - 1)
            - (c + 1.0) * eta_sum
            + trace_norm2
            + 3.0 * (c + 1.0) * psi_row
        )
        slack_ric = rhs_ric - 4.0 * ric0
        sos = np.sum((2.0 * zeta[:, :, 0, 0] - trace) ** 2, axis=1) + 4.0 * (
            np.sum(zeta[:, :, 0, :] ** 2, axis=(1, 2)) - np.sum(zeta[:, :, 0, 0] ** 2, axis=1)
        )
        outcome.record_slack("chen-ricci", slack_ric, base_index, tol)
        outcome.record_residual("chen-ricci-sos", np.abs(slack_ric - sos), base_index, identity_tol)

        # scalar + normal scalar bound
        prod = np.einsum("naij,nbjk->nabik", zeta, zeta)
        comm = prod - np.swapaxes(prod, 1, 2)
        comm_sq = 0.25 * np.einsum("nabik,nabik->n", comm, comm)
        rho_perp = 2.0 * np.sqrt(comm_sq) / (r * (r - 1))
        rhs_ddvv = (
            trace_norm2 / r**2
            + 0.25 * (c - 3.0)
            - (c + 1.0) * eta_sum / (2.0 * r)
            + 3.0 * (c + 1.0) * slant_sum / (2.0 * r * (r - 1))
        )
        slack_ddvv = rhs_ddvv - (rho_perp + rho)
        outcome.record_slack("ddvv", slack_ddvv, base_index, tol)
        lu_decomp = (lu_rhs - lu_lhs) / (r**2 * (r - 1))
        outcome.record_residual(
            "ddvv-slack-decomposition", np.abs(slack_ddvv - lu_decomp), base_index, identity_tol
        )

        # Casorati bounds
        if run_casorati and r >= 3:
            c_total = norm2 / r
            sub_sums = []
            for drop in range(r):
                keep = [i for i in range(r) if i != drop]
                sub = zeta[np.ix_(range(size), range(q), keep, keep)]
                sub_sums.append(np.einsum("nqij,nqij->n", sub, sub))
            stacked = np.stack(sub_sums, axis=1) / (r - 1)
            inf_cl = stacked.min(axis=1)
            sup_cl = stacked.max(axis=1)
            if casorati_rotations > 0:
                rotations = haar_rotations(r, casorati_rotations, seed=seed + 31 * group)
                for qmat in rotations:
                    basis = qmat[:, : r - 1]
                    m = np.einsum("ia,nqij,jb->nqab", basis.T, zeta, basis.T)
                    val = np.einsum("nqab,nqab->n", m, m) / (r - 1)
                    inf_cl = np.minimum(inf_cl, val)
                    sup_cl = np.maximum(sup_cl, val)
            delta = 0.5 * c_total + (r + 1) / (2.0 * r) * inf_cl
            delta_hat = 2.0 * c_total - (2.0 * r - 1) / (2.0 * r) * sup_cl
            tail = rhs_ddvv - trace_norm2 / r**2  # shared slant tail plus (c-3)/4
            outcome.record_slack("casorati-delta", delta + tail - rho, base_index, tol)
            outcome.record_slack("casorati-delta-hat", delta_hat + tail - rho, base_index, tol)

        base_index += size
    return outcome


def lu_sweep(
    n_instances: int,
    seed: int,
    shapes: tuple = LU_SHAPES,
    tol: float = DEFAULT_SLACK_TOL,
    lu_kernel=None,
) -> SweepOutcome:
    """The commutator inequality alone over random coefficient batches."""
    outcome = SweepOutcome(count=n_instances)
    if n_instances <= 0:
        return outcome
    kernel = lu_kernel if lu_kernel is not None else lu_terms
    sizes = _batch_sizes(n_instances, len(shapes))
    base_index = 0
    for group, ((r, q), size) in enumerate(zip(shapes, sizes)):
        if size == 0:
            continue
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(group,)))
        zeta = random_symmetric_batch(rng, size, q, r)
        lhs, rhs = kernel(zeta)
        outcome.record_slack("lu", rhs - lhs, base_index, tol, extra={"shape": [r, q]})
        base_index += size
    return outcome


def flipped_lu_kernel(zetas: np.ndarray):
    """Test-only corrupted kernel: the commutator term enters with the wrong sign."""
    lhs, rhs = lu_terms(zetas)
    return lhs, -rhs
