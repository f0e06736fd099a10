"""Finite-difference stencils shared by the geometry modules.

All stencils are central. `order=2` is the classic two-point stencil,
`order=4` the five-point one; the latter is used for the nested derivative
level inside curvature computations, where second-order truncation error
would dominate the reported residuals.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


def directional_derivative(
    f: Callable[[np.ndarray], np.ndarray],
    p: np.ndarray,
    v: np.ndarray,
    h: float = 1e-4,
    order: int = 2,
) -> np.ndarray:
    """Derivative of f along v at p, for scalar-, vector- or matrix-valued f."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if order == 2:
        return (np.asarray(f(p + h * v)) - np.asarray(f(p - h * v))) / (2.0 * h)
    if order == 4:
        f1 = np.asarray(f(p + h * v))
        f2 = np.asarray(f(p + 2.0 * h * v))
        m1 = np.asarray(f(p - h * v))
        m2 = np.asarray(f(p - 2.0 * h * v))
        return (-f2 + 8.0 * f1 - 8.0 * m1 + m2) / (12.0 * h)
    raise ValueError(f"unsupported stencil order {order}")


def partial_derivatives(
    f: Callable[[np.ndarray], np.ndarray],
    p: np.ndarray,
    h: float = 1e-4,
    order: int = 2,
) -> np.ndarray:
    """All coordinate partials of f at p, stacked along a new leading axis."""
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    eye = np.eye(n)
    return np.stack(
        [directional_derivative(f, p, eye[i], h=h, order=order) for i in range(n)]
    )


def mixed_second_directional(
    f: Callable[[np.ndarray], np.ndarray],
    p: np.ndarray,
    u: np.ndarray,
    v: np.ndarray,
    h: float = 1e-4,
) -> np.ndarray:
    """Mixed second derivative of f along (u, v) at p."""
    p = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    pp = np.asarray(f(p + h * u + h * v))
    pm = np.asarray(f(p + h * u - h * v))
    mp = np.asarray(f(p - h * u + h * v))
    mm = np.asarray(f(p - h * u - h * v))
    return (pp - pm - mp + mm) / (4.0 * h * h)
