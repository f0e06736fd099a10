"""Fixture gallery: worked examples and warped-model map instances.

The two constant-metric examples reproduce published worked data. Their
printed metrics are internally inconsistent (one garbled term, and
coefficients that contradict the claimed slant angles and the isometry
condition), so the stored coefficients are the unique repair under which the
map is a Riemannian map at the base point and the slant spectrum returns the
claimed angles; the repair is flagged on the structure so reports carry the
caveat. Structure checks on these fixtures are recorded as data, never
asserted.

The warped-model fixtures are certified: genuine Kenmotsu targets, with maps
that are Riemannian on a whole neighborhood, so every curvature identity is
a theorem for them and residuals bound numerical error only.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import FixtureMissing
from .kenmotsu import AlmostContactStructure, build_warped_kenmotsu
from .manifold import MetricField, constant_metric_field
from .riemannian_map import RiemannianMapInstance


def _psi_from_pairs(n: int, pairs: list[tuple[int, int]]) -> np.ndarray:
    """Structure matrix sending the first index of each pair to the second."""
    psi = np.zeros((n, n))
    for a, b in pairs:
        psi[b, a] = 1.0
        psi[a, b] = -1.0
    return psi


def example_one_structure() -> AlmostContactStructure:
    """Seven-dimensional constant-metric structure of the first worked example.

    Chart order (u1, u2, u3, v1, v2, v3, w). Stored metric diagonal
    (1, 8/27, 20/27, 1/2, 1/2, 1, 1): the (v1, v2) entries are forced by the
    isometry condition together with the right-angle claim, the (u2, u3)
    entries by the isometry condition together with the first claimed angle.
    Flagged unverified against the garbled printed metric.
    """
    diag = np.array([1.0, 8.0 / 27.0, 20.0 / 27.0, 0.5, 0.5, 1.0, 1.0])
    metric = constant_metric_field(np.diag(diag), name="example-1-metric")
    psi = _psi_from_pairs(7, [(0, 1), (2, 5), (3, 4)])
    xi = np.zeros(7)
    xi[6] = 1.0
    low = np.zeros(7)
    high = np.ones(7)
    low[6], high[6] = 0.1, 1.1
    return AlmostContactStructure(
        dim=7,
        metric=metric,
        psi=psi,
        xi=xi,
        eta=xi.copy(),
        probe_low=low,
        probe_high=high,
        name="example-1",
        notes=("metric coefficients reconstructed; printed source garbled",),
    )


def example_one_instance() -> RiemannianMapInstance:
    """Linear rank-4 map of the first worked example, base point at w = 1."""
    a = np.zeros((7, 7))
    a[0, 0] = 1.0
    a[1, 2], a[1, 3] = 1.0, -1.0 / math.sqrt(2.0)
    a[2, 2], a[2, 3] = 1.0 / math.sqrt(2.0), -0.5
    a[3, 4], a[3, 5] = -1.0 / math.sqrt(3.0), 1.0
    a[4, 4], a[4, 5] = 1.0 / math.sqrt(6.0), -1.0 / math.sqrt(2.0)
    a[6, 6] = 1.0
    base = np.zeros(7)
    base[6] = 1.0
    return RiemannianMapInstance(
        source=constant_metric_field(np.eye(7), name="flat-7"),
        target=example_one_structure(),
        chart_map=lambda x, _a=a: _a @ x,
        jacobian=lambda x, _a=a: _a,
        base_point=base,
        is_linear=True,
        name="example-1",
    )


EXAMPLE_ONE_ANGLES = (math.acos(2.0 / 3.0), math.pi / 2.0)


def example_two_structure(beta: float = 1.0, gamma: float = 1.0) -> AlmostContactStructure:
    """Nine-dimensional constant-metric structure of the second worked example."""
    s = 0.5 / (beta**2 + gamma**2)
    diag = np.array([1.0, 1.0, 0.5, 0.5, 1.0, 1.0, s, s, 1.0])
    metric = constant_metric_field(np.diag(diag), name="example-2-metric")
    psi = _psi_from_pairs(9, [(0, 2), (1, 3), (4, 6), (5, 7)])
    xi = np.zeros(9)
    xi[8] = 1.0
    low = np.zeros(9)
    high = np.ones(9)
    low[8], high[8] = 0.1, 1.1
    return AlmostContactStructure(
        dim=9,
        metric=metric,
        psi=psi,
        xi=xi,
        eta=xi.copy(),
        probe_low=low,
        probe_high=high,
        name="example-2",
        notes=("constant-coefficient metric; connection conditions recorded as data",),
    )


def example_two_instance(
    alpha: float = math.pi / 6.0, beta: float = 1.0, gamma: float = 1.0
) -> RiemannianMapInstance:
    """Linear rank-5 map of the second worked example."""
    a = np.zeros((9, 9))
    a[0, 0] = 1.0
    a[2, 2], a[2, 3] = math.sin(alpha), -math.sin(alpha)
    a[3, 2], a[3, 3] = math.cos(alpha), -math.cos(alpha)
    a[5, 5] = 1.0
    a[6, 6], a[6, 7] = beta, beta
    a[7, 6], a[7, 7] = gamma, gamma
    a[8, 8] = 1.0
    base = np.zeros(9)
    base[8] = 1.0
    return RiemannianMapInstance(
        source=constant_metric_field(np.eye(9), name="flat-9"),
        target=example_two_structure(beta, gamma),
        chart_map=lambda x, _a=a: _a @ x,
        jacobian=lambda x, _a=a: _a,
        base_point=base,
        is_linear=True,
        name="example-2",
    )


def example_two_angles(alpha: float, beta: float, gamma: float) -> tuple[float, float]:
    return (
        math.acos(math.sin(alpha)),
        math.acos(gamma / math.sqrt(beta**2 + gamma**2)),
    )


def _warped_source_field(fiber_dim: int) -> MetricField:
    """Warped-product source chart: flat fiber scaled by exp(2t), t last."""
    n = fiber_dim + 1

    def components(p, _n=n):
        g = np.eye(_n) * math.exp(2.0 * p[_n - 1])
        g[_n - 1, _n - 1] = 1.0
        return g

    def partials(p, _n=n):
        dg = np.zeros((_n, _n, _n))
        dg[_n - 1] = np.eye(_n) * (2.0 * math.exp(2.0 * p[_n - 1]))
        dg[_n - 1, _n - 1, _n - 1] = 0.0
        return dg

    return MetricField(dim=n, components=components, partials=partials, name=f"warped-source-{n}")


def warped_bislant_instance(
    theta1: float = math.acos(0.6),
    theta2: float = math.acos(1.0 / 3.0),
    kernel_dim: int = 2,
    w0: float = 0.7,
) -> RiemannianMapInstance:
    """Totally geodesic bi-slant map into the nine-dimensional warped model.

    The source is a warped product with the same radial coordinate; the map
    carries the fiber isometrically onto a mixed u/v subspace whose mixing
    angles are the two slant angles, and the radial direction onto the Reeb
    field. Riemannian everywhere, second fundamental form identically zero,
    Reeb field in the range, trivial complementary normal distribution.
    """
    target = build_warped_kenmotsu(4)
    fiber = 4 + kernel_dim
    source = _warped_source_field(fiber)
    m_src = fiber + 1

    b = np.zeros((8, 4))
    b[0, 0] = 1.0
    b[4, 1], b[1, 1] = math.cos(theta1), math.sin(theta1)
    b[2, 2] = 1.0
    b[6, 3], b[3, 3] = math.cos(theta2), math.sin(theta2)

    a = np.zeros((9, m_src))
    a[0:8, 0:4] = b
    a[8, m_src - 1] = 1.0
    base = np.full(m_src, 0.2)
    base[m_src - 1] = w0
    return RiemannianMapInstance(
        source=source,
        target=target,
        chart_map=lambda x, _a=a: _a @ x,
        jacobian=lambda x, _a=a: _a,
        base_point=base,
        is_linear=True,
        name="warped-bislant",
    )


def slice_affine_instance(
    seed: int,
    m: int = 2,
    rank: int = 3,
    kernel_dim: int = 2,
    w0: float = 0.6,
) -> RiemannianMapInstance:
    """Random affine map from a flat chart onto a constant-radial slice.

    The image lies in a slice of the warped model, where the target metric is
    constant along the image, so the isometry condition holds on a whole
    neighborhood and the Gauss and Ricci equations are theorems for the
    instance. The Reeb field is normal; the slice is umbilic, so the second
    fundamental form is minus the identity in the Reeb normal direction.
    """
    if rank > 2 * m:
        raise ValueError("rank cannot exceed the slice dimension")
    rng = np.random.default_rng(seed)
    target = build_warped_kenmotsu(m)
    m_src = rank + kernel_dim
    m_tgt = 2 * m + 1

    y_block = np.linalg.qr(rng.standard_normal((2 * m, rank)))[0] * math.exp(-w0)
    r_block = np.linalg.qr(rng.standard_normal((m_src, rank)))[0]
    a = np.zeros((m_tgt, m_src))
    a[: 2 * m, :] = y_block @ r_block.T
    offset = np.zeros(m_tgt)
    offset[m_tgt - 1] = w0
    base = rng.uniform(-0.3, 0.3, size=m_src)
    return RiemannianMapInstance(
        source=constant_metric_field(np.eye(m_src), name=f"flat-{m_src}"),
        target=target,
        chart_map=lambda x, _a=a, _o=offset: _a @ x + _o,
        jacobian=lambda x, _a=a: _a,
        base_point=base,
        is_linear=True,
        name=f"slice-affine-{seed}",
    )


GALLERY = {
    "example-1": {"kind": "map", "build": example_one_instance, "expected_angles": EXAMPLE_ONE_ANGLES, "assert_structure": False},
    "example-2": {
        "kind": "map",
        "build": example_two_instance,
        "expected_angles": example_two_angles(math.pi / 6.0, 1.0, 1.0),
        "assert_structure": False,
    },
    "warped-kenmotsu-m1": {"kind": "structure", "build": lambda: build_warped_kenmotsu(1)},
    "warped-kenmotsu-m2": {"kind": "structure", "build": lambda: build_warped_kenmotsu(2)},
    "warped-bislant": {
        "kind": "map",
        "build": warped_bislant_instance,
        "expected_angles": (math.acos(0.6), math.acos(1.0 / 3.0)),
        "assert_structure": True,
    },
    "slice-affine": {
        "kind": "map",
        "build": lambda: slice_affine_instance(seed=11, m=3, rank=4, kernel_dim=2),
        "expected_angles": None,
        "assert_structure": True,
    },
}


def fixture_ids() -> list[str]:
    return sorted(GALLERY)


def get_fixture(name: str) -> dict:
    try:
        return GALLERY[name]
    except KeyError as exc:
        raise FixtureMissing(f"unknown fixture {name!r}; known: {fixture_ids()}") from exc
