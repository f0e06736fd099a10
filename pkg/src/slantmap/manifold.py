"""Coordinate-chart Riemannian geometry evaluated pointwise.

A metric field is a function from chart points to metric matrices, optionally
with analytic first partials. Levi-Civita connection coefficients, directional
covariant derivatives and the Riemann curvature tensor are produced by the
standard coordinate formulas; all derivatives that the field cannot supply
analytically are taken by central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._numdiff import directional_derivative, partial_derivatives
from .errors import SingularMetric
from .frame_algebra import Metric

# Step for first partials of the metric (second-order stencil) and for the
# nested derivative of the connection coefficients inside the curvature
# formula. The nested level uses a fourth-order stencil: a second-order one
# at any workable step cannot reach the residual tolerances the warped model
# fixtures are required to meet.
STEP_METRIC = 1e-4
STEP_CONNECTION = 1e-3
STEP_VECTOR_FIELD = 1e-4


@dataclass(frozen=True)
class MetricField:
    """A smooth field of metric matrices over a coordinate chart.

    components(p) must return the (dim, dim) matrix of the metric at p.
    partials(p), when supplied, must return the (dim, dim, dim) array of
    coordinate derivatives indexed as [k, i, j] = d_k g_ij.
    """

    dim: int
    components: Callable[[np.ndarray], np.ndarray]
    partials: Optional[Callable[[np.ndarray], np.ndarray]] = None
    step: float = STEP_METRIC
    is_constant: bool = False
    name: str = ""

    @property
    def derivative_mode(self) -> str:
        return "analytic" if self.partials is not None else "finite-difference"

    def metric_at(self, p) -> Metric:
        g = np.asarray(self.components(np.asarray(p, dtype=float)), dtype=float)
        return Metric(g)

    def matrix_at(self, p) -> np.ndarray:
        return np.asarray(self.components(np.asarray(p, dtype=float)), dtype=float)

    def partials_at(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.is_constant:
            return np.zeros((self.dim, self.dim, self.dim))
        if self.partials is not None:
            return np.asarray(self.partials(p), dtype=float)
        return partial_derivatives(self.components, p, h=self.step, order=2)


def constant_metric_field(matrix, name: str = "") -> MetricField:
    m = np.asarray(matrix, dtype=float)
    Metric(m)  # validate once
    dim = m.shape[0]
    return MetricField(
        dim=dim,
        components=lambda p, _m=m: _m,
        partials=lambda p, _d=np.zeros((dim, dim, dim)): _d,
        is_constant=True,
        name=name,
    )


@dataclass(frozen=True)
class ChristoffelTable:
    """Connection coefficients at a point, indexed [k, i, j] for the upper index k."""

    coefficients: np.ndarray
    point: np.ndarray

    def lower_symmetry_defect(self) -> float:
        c = self.coefficients
        return float(np.max(np.abs(c - np.swapaxes(c, 1, 2))))


@dataclass(frozen=True)
class CurvatureValue:
    """The vector R(X, Y)Z at a point, with the inputs recorded."""

    value: np.ndarray
    point: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray


def christoffel_at(field: MetricField, p) -> ChristoffelTable:
    """Levi-Civita connection coefficients at p.

    Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij).
    """
    p = np.asarray(p, dtype=float)
    g = field.matrix_at(p)
    dg = field.partials_at(p)
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise SingularMetric(f"metric not invertible at {p}") from exc
    # bracket[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
    bracket = (
        np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg
    )
    gamma = 0.5 * np.einsum("kl,lij->kij", ginv, bracket)
    return ChristoffelTable(gamma, p)


def covariant_derivative(
    field: MetricField,
    p,
    x: np.ndarray,
    y_field: Callable[[np.ndarray], np.ndarray],
    h: float = STEP_VECTOR_FIELD,
) -> np.ndarray:
    """Covariant derivative of the vector field y along x at p."""
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    dy = directional_derivative(y_field, p, x, h=h, order=2)
    gamma = christoffel_at(field, p).coefficients
    return dy + np.einsum("kij,i,j->k", gamma, x, np.asarray(y_field(p), dtype=float))


def riemann_tensor_at(field: MetricField, p, h: float = STEP_CONNECTION) -> np.ndarray:
    """Full curvature tensor at p, indexed [l, i, j, k] with R(e_i, e_j) e_k = R^l_ijk e_l.

    Computed from the connection-coefficient derivative formula
    R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik
              + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik,
    one differentiation level fewer than nesting covariant derivatives.
    """
    p = np.asarray(p, dtype=float)
    n = field.dim
    if field.is_constant:
        return np.zeros((n, n, n, n))
    gamma = christoffel_at(field, p).coefficients

    def gamma_at(q: np.ndarray) -> np.ndarray:
        return christoffel_at(field, q).coefficients

    dgamma = partial_derivatives(gamma_at, p, h=h, order=4)  # [a, l, j, k]
    r = (
        np.einsum("iljk->lijk", dgamma)
        - np.einsum("jlik->lijk", dgamma)
        + np.einsum("lim,mjk->lijk", gamma, gamma)
        - np.einsum("ljm,mik->lijk", gamma, gamma)
    )
    return r


def riemann_at(field: MetricField, p, x, y, z, h: float = STEP_CONNECTION) -> CurvatureValue:
    """The curvature vector R(x, y)z at p."""
    r = riemann_tensor_at(field, p, h=h)
    value = np.einsum(
        "lijk,i,j,k->l",
        r,
        np.asarray(x, dtype=float),
        np.asarray(y, dtype=float),
        np.asarray(z, dtype=float),
    )
    return CurvatureValue(value, np.asarray(p, dtype=float), np.asarray(x), np.asarray(y), np.asarray(z))


def curvature_pairing_tensor(field: MetricField, p, h: float = STEP_CONNECTION) -> np.ndarray:
    """Fully lowered curvature tensor R_hijk = g(R(e_i, e_j) e_k, e_h)."""
    r = riemann_tensor_at(field, p, h=h)
    g = field.matrix_at(p)
    return np.einsum("hl,lijk->hijk", g, r)


def make_curvature_oracle(field: MetricField, p, h: float = STEP_CONNECTION):
    """Callable (x, y, z, w) -> g(R(x, y)z, w) with the tensor evaluated once at p."""
    lowered = curvature_pairing_tensor(field, p, h=h)

    def oracle(x, y, z, w) -> float:
        return float(
            np.einsum(
                "hijk,i,j,k,h->",
                lowered,
                np.asarray(x, dtype=float),
                np.asarray(y, dtype=float),
                np.asarray(z, dtype=float),
                np.asarray(w, dtype=float),
            )
        )

    return oracle


def verify_partials(field: MetricField, probes, h: float = 1e-5) -> float:
    """Max deviation of supplied analytic partials from central differences."""
    if field.partials is None:
        return 0.0
    worst = 0.0
    for p in np.atleast_2d(np.asarray(probes, dtype=float)):
        fd = partial_derivatives(field.components, p, h=h, order=2)
        worst = max(worst, float(np.max(np.abs(fd - field.partials_at(p)))))
    return worst
