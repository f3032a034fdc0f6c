"""Chart-based descriptions of explicit compact complex manifolds.

A manifold is presented as a covering space with a chart atlas, a deck
group acting by explicit holomorphic maps, a positive character of that
group, and one designated integration chart whose fundamental domain
covers the quotient up to measure zero. Volume forms are stored through
their per-chart log-densities so positivity is structural; vector fields
through their per-chart holomorphic components. Membership contracts
(automorphy of a volume form, deck invariance and holomorphy of a field)
are verified by deterministic sampling rather than symbolically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from . import calculus
from .errors import DomainError, EvaluationError
from .quadrature import IntegrationDomain

DEFAULT_SAMPLES = 256
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class ChartPoint:
    """A point given by holomorphic coordinates in a named chart."""

    chart_id: str
    coords: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(complex(c) for c in self.coords))


@dataclass(frozen=True)
class Chart:
    """One coordinate chart: a containment predicate over C^n coordinates.

    `boundary_clearance`, when present, returns the per-point distance to
    the chart boundary so finite-difference stencils can shrink their step
    instead of leaving the domain.
    """

    chart_id: str
    dim: int
    contains: Callable[[np.ndarray], np.ndarray]
    boundary_clearance: Optional[Callable[[np.ndarray], np.ndarray]] = None
    description: str = ""


@dataclass(frozen=True)
class Transition:
    """Holomorphic coordinate change between two overlapping charts."""

    source: str
    target: str
    apply: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    sample_overlap: Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class DeckGenerator:
    """A deck transformation with its explicit inverse and Jacobian."""

    name: str
    apply: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class DeckGroupSpec:
    generators: tuple[DeckGenerator, ...] = ()
    description: str = ""


@dataclass(frozen=True)
class Character:
    """Homomorphism from the deck group to the positive reals.

    Stored as the values on the generators; the value on a word is the
    product over its letters.
    """

    generator_values: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name, value in self.generator_values.items():
            if not value > 0:
                raise ValueError(f"character value on '{name}' must be positive, got {value}")

    def value(self, generator: str) -> float:
        return float(self.generator_values[generator])

    def value_on_word(self, word: Sequence[tuple[str, int]]) -> float:
        out = 1.0
        for name, power in word:
            out *= self.generator_values[name] ** power
        return out


TRIVIAL_CHARACTER = Character({})


@dataclass(frozen=True)
class VolumeFormSpec:
    """An automorphic volume form given by per-chart log-densities.

    `exact_ricci` optionally maps chart ids to closed-form evaluators of
    the Ricci coefficient matrix; charts without an entry fall back to
    numerical differentiation.
    """

    name: str
    log_density: Mapping[str, Callable[[np.ndarray], np.ndarray]]
    character: Character = TRIVIAL_CHARACTER
    exact_ricci: Optional[Mapping[str, Callable[[np.ndarray], np.ndarray]]] = None


@dataclass(frozen=True)
class VectorFieldSpec:
    """A deck-invariant holomorphic vector field via per-chart components."""

    name: str
    components: Mapping[str, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class ManifoldSpec:
    """Atlas, deck group and fundamental integration domain of one manifold."""

    name: str
    dimension: int
    atlas: tuple[Chart, ...]
    deck_group: DeckGroupSpec
    fundamental_domain: IntegrationDomain
    integration_chart: str
    transitions: tuple[Transition, ...] = ()

    def __post_init__(self):
        ids = [c.chart_id for c in self.atlas]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate chart ids in atlas: {ids}")
        if self.integration_chart not in ids:
            raise ValueError(f"integration chart '{self.integration_chart}' not in atlas")
        for c in self.atlas:
            if c.dim != self.dimension:
                raise ValueError(
                    f"chart '{c.chart_id}' has dimension {c.dim}, expected {self.dimension}")

    def chart(self, chart_id: str) -> Chart:
        for c in self.atlas:
            if c.chart_id == chart_id:
                return c
        raise KeyError(f"no chart '{chart_id}' on manifold '{self.name}'")


@dataclass(frozen=True)
class CheckReport:
    """Outcome of a sampled verification: worst residual and pass flag."""

    max_residual: float
    passed: bool
    tol: float
    samples: int
    residuals: Mapping[str, float] = field(default_factory=dict)


def sample_domain_points(m: ManifoldSpec, samples: int, seed: int = 0) -> np.ndarray:
    """Deterministic sample of chart coordinates from the fundamental domain."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    dom = m.fundamental_domain
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in dom.box])
    hi = np.array([b[1] for b in dom.box])
    collected = []
    total = 0
    while total < samples:
        draw = rng.uniform(lo, hi, size=(max(samples, 64), len(dom.box)))
        pts = dom.to_chart(draw)
        if dom.indicator is not None:
            pts = pts[np.asarray(dom.indicator(pts), dtype=bool)]
        collected.append(pts)
        total += len(pts)
    return np.concatenate(collected, axis=0)[:samples]


def _require_finite(values, what):
    if not np.all(np.isfinite(values)):
        raise EvaluationError(f"non-finite {what}")


def _require_in_chart(chart: Chart, coords, what):
    inside = np.asarray(chart.contains(coords), dtype=bool)
    if not np.all(inside):
        raise DomainError(f"{what} outside chart '{chart.chart_id}'")


def verify_automorphic(vol: VolumeFormSpec, m: ManifoldSpec,
                       samples: int = DEFAULT_SAMPLES, tol: float = DEFAULT_TOL,
                       seed: int = 0) -> CheckReport:
    """Check gamma*Omega = chi(gamma) Omega on sampled points.

    For each deck generator the residual is
    |log a(gamma p) + log|det d gamma|^2 - log a(p) - log chi(gamma)|,
    which vanishes exactly when the volume form is automorphic for its
    character.
    """
    pts = sample_domain_points(m, samples, seed)
    chart = m.chart(m.integration_chart)
    _require_in_chart(chart, pts, "sample point")
    logd = vol.log_density[chart.chart_id]
    base = np.asarray(logd(pts), dtype=float)
    _require_finite(base, f"log-density of '{vol.name}'")
    residuals = {}
    worst = 0.0
    for g in m.deck_group.generators:
        image = np.asarray(g.apply(pts))
        _require_in_chart(chart, image, f"image under '{g.name}'")
        shifted = np.asarray(logd(image), dtype=float)
        _require_finite(shifted, f"log-density of '{vol.name}' at deck images")
        jac = np.asarray(g.jacobian(pts))
        log_jac2 = 2.0 * np.log(np.abs(np.linalg.det(jac)))
        r = float(np.max(np.abs(
            shifted + log_jac2 - base - math.log(vol.character.value(g.name)))))
        residuals[g.name] = r
        worst = max(worst, r)
    return CheckReport(worst, worst <= tol, tol, samples, residuals)


def verify_invariant_field(x: VectorFieldSpec, m: ManifoldSpec,
                           samples: int = DEFAULT_SAMPLES, tol: float = DEFAULT_TOL,
                           seed: int = 0,
                           scheme: calculus.DifferentiationScheme = calculus.DEFAULT_SCHEME,
                           ) -> CheckReport:
    """Check deck invariance d gamma(X(p)) = X(gamma p) and holomorphy of X.

    Holomorphy is measured as the largest antiholomorphic Wirtinger
    derivative of any component along any axis (the Cauchy-Riemann
    residual). Both residuals are taken relative to 1 + |X| at the sample
    point, so fields of polynomial growth on noncompact integration charts
    are judged by their local scale.
    """
    pts = sample_domain_points(m, samples, seed)
    chart = m.chart(m.integration_chart)
    comps = x.components[chart.chart_id]
    values = np.asarray(comps(pts))
    _require_finite(values, f"components of '{x.name}'")
    scale = 1.0 + np.abs(values).max(axis=-1)

    invariance = 0.0
    for g in m.deck_group.generators:
        image = np.asarray(g.apply(pts))
        _require_in_chart(chart, image, f"image under '{g.name}'")
        pushed = np.einsum("...ij,...j->...i", np.asarray(g.jacobian(pts)), values)
        there = np.asarray(comps(image))
        gap = np.abs(pushed - there).max(axis=-1) / scale
        invariance = max(invariance, float(np.max(gap)))

    n = m.dimension
    cauchy_riemann = 0.0
    for i in range(n):
        def comp_i(c, _i=i):
            return np.asarray(comps(c))[..., _i]

        for j in range(n):
            dbar = calculus.antiholomorphic_derivative(comp_i, pts, scheme, axis=j)
            _require_finite(dbar, f"Cauchy-Riemann stencil of '{x.name}'")
            cauchy_riemann = max(cauchy_riemann, float(np.max(np.abs(dbar) / scale)))

    worst = max(invariance, cauchy_riemann)
    return CheckReport(worst, worst <= tol, tol, samples,
                       {"deck_invariance": invariance, "cauchy_riemann": cauchy_riemann})


def deck_group_report(m: ManifoldSpec, samples: int = DEFAULT_SAMPLES,
                      tol: float = DEFAULT_TOL, seed: int = 0,
                      scheme: calculus.DifferentiationScheme = calculus.DEFAULT_SCHEME,
                      ) -> CheckReport:
    """Check generator/inverse composition and holomorphy of the deck maps.

    Residuals are relative to 1 + |p| (resp. 1 + |gamma(p)|) at the sample.
    """
    pts = sample_domain_points(m, samples, seed)
    scale = 1.0 + np.abs(pts).max(axis=-1)
    identity = 0.0
    cauchy_riemann = 0.0
    residuals = {}
    for g in m.deck_group.generators:
        image = np.asarray(g.apply(pts))
        image_scale = 1.0 + np.abs(image).max(axis=-1)
        round_trip = np.asarray(g.inverse(image))
        r_id = float(np.max(np.abs(round_trip - pts).max(axis=-1) / scale))
        r_cr = 0.0
        for i in range(m.dimension):
            def comp_i(c, _i=i):
                return np.asarray(g.apply(c))[..., _i]

            for j in range(m.dimension):
                dbar = calculus.antiholomorphic_derivative(comp_i, pts, scheme, axis=j)
                r_cr = max(r_cr, float(np.max(np.abs(dbar) / image_scale)))
        residuals[g.name] = max(r_id, r_cr)
        identity = max(identity, r_id)
        cauchy_riemann = max(cauchy_riemann, r_cr)
    worst = max(identity, cauchy_riemann)
    return CheckReport(worst, worst <= tol, tol, samples,
                       {"inverse_composition": identity, "cauchy_riemann": cauchy_riemann})


def verify_volume_transitions(vol: VolumeFormSpec, m: ManifoldSpec,
                              samples: int = DEFAULT_SAMPLES, tol: float = 1e-10,
                              seed: int = 0) -> CheckReport:
    """Check that per-chart log-densities describe one global volume form.

    On an overlap, a_source(z) = a_target(T(z)) * |det dT(z)|^2.
    Transitions whose charts lack a registered density are skipped.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    residuals = {}
    for tr in m.transitions:
        if tr.source not in vol.log_density or tr.target not in vol.log_density:
            continue
        pts = tr.sample_overlap(rng, samples)
        src = np.asarray(vol.log_density[tr.source](pts), dtype=float)
        mapped = np.asarray(tr.apply(pts))
        tgt = np.asarray(vol.log_density[tr.target](mapped), dtype=float)
        log_jac2 = 2.0 * np.log(np.abs(np.linalg.det(np.asarray(tr.jacobian(pts)))))
        _require_finite(src, "source log-density")
        _require_finite(tgt, "target log-density")
        r = float(np.max(np.abs(src - tgt - log_jac2)))
        residuals[f"{tr.source}->{tr.target}"] = r
        worst = max(worst, r)
    return CheckReport(worst, worst <= tol, tol, samples, residuals)


def verify_field_transitions(x: VectorFieldSpec, m: ManifoldSpec,
                             samples: int = DEFAULT_SAMPLES, tol: float = 1e-10,
                             seed: int = 0) -> CheckReport:
    """Check components transform by the transition Jacobian across overlaps."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    residuals = {}
    for tr in m.transitions:
        if tr.source not in x.components or tr.target not in x.components:
            continue
        pts = tr.sample_overlap(rng, samples)
        src = np.asarray(x.components[tr.source](pts))
        pushed = np.einsum("...ij,...j->...i", np.asarray(tr.jacobian(pts)), src)
        tgt = np.asarray(x.components[tr.target](np.asarray(tr.apply(pts))))
        r = float(np.max(np.abs(pushed - tgt)))
        residuals[f"{tr.source}->{tr.target}"] = r
        worst = max(worst, r)
    return CheckReport(worst, worst <= tol, tol, samples, residuals)
