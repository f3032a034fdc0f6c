"""Pointwise complex-differential operators on chart evaluators.

Wirtinger derivatives are assembled from real central differences on the
underlying (x, y) coordinate pairs: log-densities are real-valued rather
than holomorphic, so complex-step differentiation does not apply. Every
operator accepts batched coordinate arrays of shape (..., n) and calls the
evaluator once per stencil node, vectorized over the whole batch.

Conventions
-----------
* coordinates: complex ndarray, last axis indexes the n holomorphic
  coordinates of one chart.
* d/dz^i  = (d/dx^i - i d/dy^i) / 2,   d/dzbar^j = (d/dx^j + i d/dy^j) / 2.
* The Ricci coefficient matrix of a log-density f is
  R[i, j] = - d^2 f / dz^i dzbar^j,  Hermitian for real f.
* The top-degree density of the Ricci form is n! * det(R), measured
  against the Euclidean top form prod_i (i dz^i ^ dzbar^i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import DifferentiationQualityError, EvaluationError

if TYPE_CHECKING:
    from .geometry import ChartPoint, VectorFieldSpec, VolumeFormSpec

# central first-derivative stencils: (offsets in units of h, weights in 1/h)
_STENCILS = {
    2: ((-1.0, 1.0), (-0.5, 0.5)),
    4: ((-2.0, -1.0, 1.0, 2.0), (1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0)),
}

DEFAULT_HERMITICITY_TOL = 1e-6
DEFAULT_IMAG_TOL = 1e-6


@dataclass(frozen=True)
class DifferentiationScheme:
    """Step size and order of the real central-difference stencils."""

    step: float = 1e-3
    order: int = 4

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if self.order not in _STENCILS:
            raise ValueError(f"order must be one of {sorted(_STENCILS)}, got {self.order}")


DEFAULT_SCHEME = DifferentiationScheme()


@dataclass(frozen=True)
class RicciEvaluation:
    """Ricci coefficient matrix of a volume density at one chart point."""

    matrix: np.ndarray
    point: "ChartPoint"
    hermiticity_residual: float
    step_used: float = 0.0
    step_shrunk: bool = False


def _resolve_step(scheme: DifferentiationScheme, step):
    return scheme.step if step is None else step


def _real_derivative(fn, coords, axis, direction, scheme, step):
    """Directional central difference along one real coordinate.

    direction is 1.0 for the x-part and 1j for the y-part of complex axis
    `axis`. `step` may be a scalar or an array broadcastable to the batch
    shape (per-point shrunken steps near chart boundaries).
    """
    offsets, weights = _STENCILS[scheme.order]
    acc = None
    for o, w in zip(offsets, weights):
        shifted = np.array(coords)
        shifted[..., axis] = shifted[..., axis] + (o * step) * direction
        term = (w / step) * np.asarray(fn(shifted))
        acc = term if acc is None else acc + term
    return acc


def holomorphic_derivative(fn, coords, scheme=DEFAULT_SCHEME, axis=0, step=None):
    """d fn / dz^axis at each point of `coords`."""
    h = _resolve_step(scheme, step)
    dx = _real_derivative(fn, coords, axis, 1.0, scheme, h)
    dy = _real_derivative(fn, coords, axis, 1.0j, scheme, h)
    return 0.5 * (dx - 1.0j * dy)


def antiholomorphic_derivative(fn, coords, scheme=DEFAULT_SCHEME, axis=0, step=None):
    """d fn / dzbar^axis at each point of `coords`."""
    h = _resolve_step(scheme, step)
    dx = _real_derivative(fn, coords, axis, 1.0, scheme, h)
    dy = _real_derivative(fn, coords, axis, 1.0j, scheme, h)
    return 0.5 * (dx + 1.0j * dy)


def wirtinger_gradient_at(fn, coords, scheme=DEFAULT_SCHEME, step=None):
    """All holomorphic derivatives (d fn / dz^1, ..., d fn / dz^n).

    Returns an array of shape coords.shape: component i is the derivative
    along complex axis i.
    """
    n = coords.shape[-1]
    parts = [holomorphic_derivative(fn, coords, scheme, i, step) for i in range(n)]
    return np.stack(parts, axis=-1)


def mixed_hessian(fn, coords, scheme=DEFAULT_SCHEME, step=None):
    """H[..., i, j] = d^2 fn / dz^i dzbar^j by nested stencils."""
    n = coords.shape[-1]
    h = _resolve_step(scheme, step)
    cols = []
    for j in range(n):
        def dbar_j(c, _j=j):
            return antiholomorphic_derivative(fn, c, scheme, _j, step=h)

        col = [holomorphic_derivative(dbar_j, coords, scheme, i, step=h) for i in range(n)]
        cols.append(np.stack(col, axis=-1))
    return np.stack(cols, axis=-1)


def ricci_from_log_density(log_density, coords, scheme=DEFAULT_SCHEME, step=None):
    """Ricci coefficient matrix R = -(mixed Hessian of log a), shape (..., n, n)."""
    return -mixed_hessian(log_density, coords, scheme, step)


def hermiticity_residual(matrix):
    """Per-point max-entry deviation of a matrix batch from Hermiticity."""
    dev = np.abs(matrix - np.conj(np.swapaxes(matrix, -1, -2)))
    return dev.max(axis=(-2, -1))


def ricci_field(log_density, coords, scheme=DEFAULT_SCHEME, step=None, exact=None):
    """Ricci matrix batch; an exact closed-form evaluator short-circuits the stencils."""
    if exact is not None:
        return np.asarray(exact(coords))
    return ricci_from_log_density(log_density, coords, scheme, step)


def ricci_top_field(
    log_density,
    coords,
    scheme=DEFAULT_SCHEME,
    step=None,
    exact=None,
    herm_tol=DEFAULT_HERMITICITY_TOL,
    imag_tol=DEFAULT_IMAG_TOL,
):
    """Top-degree Ricci density n! * det(R) as a real batch.

    The raw matrix must be Hermitian within `herm_tol` wherever it is
    finite; it is then symmetrized before the determinant so the result is
    real up to rounding. Non-finite points propagate as NaN (the quadrature
    layer decides whether to drop them).
    """
    R = ricci_field(log_density, coords, scheme, step, exact)
    res = hermiticity_residual(R)
    scale = np.abs(R).max(axis=(-2, -1))
    bad = res > herm_tol * np.maximum(1.0, scale)
    if np.any(bad):
        worst = float(np.nanmax(np.where(bad, res, 0.0)))
        raise DifferentiationQualityError(
            f"Ricci matrix Hermiticity residual {worst:.3e} exceeds tolerance "
            f"{herm_tol:.1e}; refine the differentiation scheme"
        )
    R = 0.5 * (R + np.conj(np.swapaxes(R, -1, -2)))
    det = np.linalg.det(R)
    det_scale = np.maximum(1.0, np.abs(det))
    stray = np.abs(det.imag) > imag_tol * det_scale
    if np.any(stray):
        worst = float(np.nanmax(np.where(stray, np.abs(det.imag), 0.0)))
        raise DifferentiationQualityError(
            f"determinant of symmetrized Ricci matrix has imaginary part {worst:.3e}"
        )
    n = coords.shape[-1]
    return math.factorial(n) * det.real


def divergence_field(components, log_density, coords, scheme=DEFAULT_SCHEME, step=None):
    """Divergence of a holomorphic field against a volume density.

    Returns sum_i dX^i/dz^i + sum_i X^i * d(log a)/dz^i for the chart
    evaluators `components` (coords -> (..., n)) and `log_density`
    (coords -> (...)).
    """
    n = coords.shape[-1]
    h = _resolve_step(scheme, step)
    holo = None
    for i in range(n):
        def comp_i(c, _i=i):
            return np.asarray(components(c))[..., _i]

        d = holomorphic_derivative(comp_i, coords, scheme, i, step=h)
        holo = d if holo is None else holo + d
    grad = wirtinger_gradient_at(log_density, coords, scheme, step=h)
    values = np.asarray(components(coords))
    return holo + np.einsum("...i,...i->...", values, grad)


# ---------------------------------------------------------------------------
# pointwise operations on ChartPoint / spec objects
# ---------------------------------------------------------------------------


def _point_batch(p: "ChartPoint"):
    return np.asarray(p.coords, dtype=complex)[None, :]


def _chart_step(chart, coords, scheme):
    """Per-point step, shrunk so nested stencils stay inside the chart.

    Nested order-4 stencils reach 4h from the base point; a factor-5 margin
    keeps every node strictly interior.
    """
    if chart is None or chart.boundary_clearance is None:
        return scheme.step, False
    clearance = np.asarray(chart.boundary_clearance(coords), dtype=float)
    step = np.minimum(scheme.step, clearance / 5.0)
    return step, bool(np.any(step < scheme.step))


def wirtinger_gradient(fn, p: "ChartPoint", scheme=DEFAULT_SCHEME):
    """Holomorphic gradient (d fn/dz^1, ..., d fn/dz^n) at a single chart point."""
    g = wirtinger_gradient_at(fn, _point_batch(p), scheme)[0]
    if not np.all(np.isfinite(g)):
        raise EvaluationError(f"non-finite evaluation on stencil around {p}")
    return g


def ricci_matrix(vol: "VolumeFormSpec", p: "ChartPoint", scheme=DEFAULT_SCHEME, chart=None):
    """Ricci coefficient matrix of `vol` at `p` as a RicciEvaluation.

    Uses the closed-form evaluator registered on the volume form when one
    exists for this chart; otherwise nested Wirtinger stencils.
    """
    coords = _point_batch(p)
    exact = (vol.exact_ricci or {}).get(p.chart_id)
    step, shrunk = _chart_step(chart, coords, scheme)
    R = ricci_field(vol.log_density[p.chart_id], coords, scheme, step=step, exact=exact)[0]
    if not np.all(np.isfinite(R)):
        raise EvaluationError(f"non-finite Ricci stencil around {p}")
    res = float(hermiticity_residual(R[None, ...])[0])
    used = float(np.min(step)) if not np.isscalar(step) else float(step)
    return RicciEvaluation(matrix=R, point=p, hermiticity_residual=res,
                           step_used=used, step_shrunk=shrunk)


def divergence(x: "VectorFieldSpec", vol: "VolumeFormSpec", p: "ChartPoint",
               scheme=DEFAULT_SCHEME, chart=None) -> complex:
    """Divergence of the field `x` against `vol` at a single chart point."""
    coords = _point_batch(p)
    step, _ = _chart_step(chart, coords, scheme)
    val = divergence_field(x.components[p.chart_id], vol.log_density[p.chart_id],
                           coords, scheme, step=step)[0]
    if not np.isfinite(val):
        raise EvaluationError(f"non-finite divergence stencil around {p}")
    return complex(val)


def ricci_top_density(vol: "VolumeFormSpec", p: "ChartPoint", scheme=DEFAULT_SCHEME,
                      chart=None, herm_tol=DEFAULT_HERMITICITY_TOL,
                      imag_tol=DEFAULT_IMAG_TOL) -> float:
    """n! * det(R) at a single chart point (see ricci_top_field)."""
    coords = _point_batch(p)
    exact = (vol.exact_ricci or {}).get(p.chart_id)
    step, _ = _chart_step(chart, coords, scheme)
    val = ricci_top_field(vol.log_density[p.chart_id], coords, scheme, step=step,
                          exact=exact, herm_tol=herm_tol, imag_tol=imag_tol)[0]
    if not np.isfinite(val):
        raise EvaluationError(f"non-finite Ricci density around {p}")
    return float(val)
