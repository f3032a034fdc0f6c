"""Built-in manifolds, volume forms, vector fields and fixed-point data.

Four bundles ship with the package:

* ``cp1``  - the projective line through its two affine charts. The
  rotation-invariant density 1/(1+|z|^2)^2 and a bump-perturbed variant,
  with the three global holomorphic fields.
* ``hopf`` - the Hopf surface (C^2 minus 0) / (z -> 2z), integration over
  the annulus 1 <= |z1|^2+|z2|^2 <= 2 in smooth polar coordinates. Ships
  the cone density r^-4 (trivial character), the Lebesgue density
  (character value 16 = |det of the doubling map|^2) and a deck-invariant
  angular perturbation of r^-4.
* ``hopf-blowup`` - fixed-point data only: the Hopf surface blown up at an
  interior point, for the lift of z1 d/dz1. Its zero set is one isolated
  nondegenerate point on the exceptional curve (linearization weights 1
  and -1) plus an elliptic curve with trivial tangent degree whose normal
  bundle is dual to the exceptional class.
* ``blcp2`` - stretch example, fixed-point data only: the projective plane
  blown up at one fixed point of a circle action whose linearization there
  is -identity, so the exceptional curve is fixed pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional

import numpy as np

from .geometry import (
    Character,
    Chart,
    DeckGenerator,
    DeckGroupSpec,
    ManifoldSpec,
    Transition,
    TRIVIAL_CHARACTER,
    VectorFieldSpec,
    VolumeFormSpec,
)
from .localization import FixedPointData, ZeroComponent
from .quadrature import IntegrationDomain, QuadratureSpec

RADIAL_CUTOFF = 1.0e4
# FS-type integrands decay like |z|^-4, so the mass beyond the cutoff is
# bounded by C / cutoff^2 with C below 4*pi for every registered density.
PLANE_TAIL_BOUND = 2.0e-7


@dataclass(frozen=True)
class ExampleBundle:
    """Immutable collection of everything known about one example."""

    name: str
    manifold: Optional[ManifoldSpec]
    volumes: Mapping[str, VolumeFormSpec]
    fields: Mapping[str, VectorFieldSpec]
    fixed_point_data: Optional[FixedPointData]
    fixed_point_field: Optional[str]
    default_quadrature: Optional[QuadratureSpec]
    notes: str


def _abs2(z):
    return z.real * z.real + z.imag * z.imag


# ---------------------------------------------------------------------------
# projective line
# ---------------------------------------------------------------------------


def _plane_domain() -> IntegrationDomain:
    u_max = math.atan(RADIAL_CUTOFF)

    def chart_map(pts):
        radius = np.tan(pts[..., 0])
        return (radius * np.exp(1j * pts[..., 1]))[..., None]

    def measure_map(pts):
        t = np.tan(pts[..., 0])
        return t * (1.0 + t * t)

    return IntegrationDomain(
        box=((0.0, u_max), (0.0, 2.0 * math.pi)),
        chart_map=chart_map,
        measure_map=measure_map,
        tail_bound=PLANE_TAIL_BOUND,
    )


def _fs_log_density(coords):
    return -2.0 * np.log1p(_abs2(coords[..., 0]))


def _fs_exact_ricci(coords):
    r = 2.0 / (1.0 + _abs2(coords[..., 0])) ** 2
    return r[..., None, None].astype(complex)


def _bump(z):
    return np.exp(-_abs2(z - 1.0))


def _bump_at_inverse(w):
    """bump(1/w) extended by zero through w = 0."""
    safe = np.where(w == 0, 1.0, w)
    with np.errstate(over="ignore"):
        value = np.exp(-_abs2(1.0 / safe - 1.0))
    return np.where(w == 0, 0.0, value)


def _fs_bump_log_density_affine(coords):
    z = coords[..., 0]
    return _bump(z) - 2.0 * np.log1p(_abs2(z))


def _fs_bump_log_density_inf(coords):
    w = coords[..., 0]
    return _bump_at_inverse(w) - 2.0 * np.log1p(_abs2(w))


def _fs_bump_exact_ricci(coords):
    z = coords[..., 0]
    r = _bump(z) * (1.0 - _abs2(z - 1.0)) + 2.0 / (1.0 + _abs2(z)) ** 2
    return r[..., None, None].astype(complex)


def _inversion_overlap(rng, samples):
    radius = rng.uniform(0.3, 3.0, samples)
    angle = rng.uniform(0.0, 2.0 * math.pi, samples)
    return (radius * np.exp(1j * angle))[..., None]


@lru_cache(maxsize=None)
def _cp1_bundle() -> ExampleBundle:
    def everywhere(coords):
        return np.ones(coords.shape[:-1], dtype=bool)

    affine = Chart("affine", 1, everywhere, description="z around the origin")
    affine_inf = Chart("affine-inf", 1, everywhere, description="w = 1/z around infinity")

    def invert(coords):
        return 1.0 / coords

    def invert_jacobian(coords):
        return (-1.0 / coords[..., 0] ** 2)[..., None, None]

    transitions = (
        Transition("affine", "affine-inf", invert, invert_jacobian, _inversion_overlap),
        Transition("affine-inf", "affine", invert, invert_jacobian, _inversion_overlap),
    )

    manifold = ManifoldSpec(
        name="cp1",
        dimension=1,
        atlas=(affine, affine_inf),
        deck_group=DeckGroupSpec(description="trivial covering"),
        fundamental_domain=_plane_domain(),
        integration_chart="affine",
        transitions=transitions,
    )

    volumes = {
        "fs": VolumeFormSpec(
            name="fs",
            log_density={"affine": _fs_log_density, "affine-inf": _fs_log_density},
            character=TRIVIAL_CHARACTER,
            exact_ricci={"affine": _fs_exact_ricci, "affine-inf": _fs_exact_ricci},
        ),
        "fs-bump": VolumeFormSpec(
            name="fs-bump",
            log_density={"affine": _fs_bump_log_density_affine,
                         "affine-inf": _fs_bump_log_density_inf},
            character=TRIVIAL_CHARACTER,
            exact_ricci={"affine": _fs_bump_exact_ricci},
        ),
    }

    def linear_field(coords):
        return coords

    def constant_field(coords):
        return np.ones_like(coords)

    def quadratic_field(coords):
        return coords ** 2

    def minus_linear(coords):
        return -coords

    def minus_quadratic(coords):
        return -coords ** 2

    def minus_constant(coords):
        return -np.ones_like(coords)

    fields = {
        "z-ddz": VectorFieldSpec("z-ddz", {"affine": linear_field,
                                           "affine-inf": minus_linear}),
        "ddz": VectorFieldSpec("ddz", {"affine": constant_field,
                                       "affine-inf": minus_quadratic}),
        "z2-ddz": VectorFieldSpec("z2-ddz", {"affine": quadratic_field,
                                             "affine-inf": minus_constant}),
    }

    fixed_points = FixedPointData(
        label="projective line, field z d/dz",
        manifold_dim=1,
        components=(
            ZeroComponent("zero at the origin", 0, Fraction(1), (Fraction(1),)),
            ZeroComponent("zero at infinity", 0, Fraction(-1), (Fraction(-1),)),
        ),
    )

    return ExampleBundle(
        name="cp1",
        manifold=manifold,
        volumes=volumes,
        fields=fields,
        fixed_point_data=fixed_points,
        fixed_point_field="z-ddz",
        default_quadrature=QuadratureSpec(points_per_axis=16, refinement_levels=3),
        notes=("Projective line via the affine chart, compactified by the polar "
               "substitution z = tan(u) e^{i theta} with radial cutoff "
               f"|z| <= {RADIAL_CUTOFF:g} (declared tail bound {PLANE_TAIL_BOUND:g}). "
               "Both densities are smooth positive representatives of the same "
               "curvature class; the three fields span the global holomorphic "
               "fields of the line."),
    )


# ---------------------------------------------------------------------------
# Hopf surface
# ---------------------------------------------------------------------------


def _hopf_domain() -> IntegrationDomain:
    def chart_map(pts):
        s, phi = pts[..., 0], pts[..., 1]
        z1 = s * np.cos(phi) * np.exp(1j * pts[..., 2])
        z2 = s * np.sin(phi) * np.exp(1j * pts[..., 3])
        return np.stack([z1, z2], axis=-1)

    def measure_map(pts):
        s, phi = pts[..., 0], pts[..., 1]
        return s ** 3 * np.cos(phi) * np.sin(phi)

    return IntegrationDomain(
        box=((1.0, math.sqrt(2.0)), (0.0, 0.5 * math.pi),
             (0.0, 2.0 * math.pi), (0.0, 2.0 * math.pi)),
        chart_map=chart_map,
        measure_map=measure_map,
    )


def _hopf_r2(coords):
    return _abs2(coords[..., 0]) + _abs2(coords[..., 1])


def _r4_log_density(coords):
    return -2.0 * np.log(_hopf_r2(coords))


def _r4_exact_ricci(coords):
    r2 = _hopf_r2(coords)
    outer = np.einsum("...i,...j->...ij", np.conj(coords), coords)
    eye = np.eye(coords.shape[-1], dtype=complex)
    return 2.0 * (eye / r2[..., None, None] - outer / (r2 ** 2)[..., None, None])


def _lebesgue_log_density(coords):
    return np.zeros(coords.shape[:-1])


def _lebesgue_exact_ricci(coords):
    n = coords.shape[-1]
    return np.zeros(coords.shape[:-1] + (n, n), dtype=complex)


def _angular_bump(coords):
    # deck-invariant (numerator and r^3 both scale by 8 under z -> 2z) but
    # carries fiber phase weight 1, so its Hessian is not pulled back from
    # the base and the perturbed Ricci matrix is no longer degenerate
    r3 = _hopf_r2(coords) ** 1.5
    return (coords[..., 0] ** 2 * np.conj(coords[..., 1])).real / r3


def _r4_bump_log_density(coords):
    return _angular_bump(coords) - 2.0 * np.log(_hopf_r2(coords))


@lru_cache(maxsize=None)
def _hopf_bundle() -> ExampleBundle:
    def punctured_contains(coords):
        return _hopf_r2(coords) > 0.0

    def clearance(coords):
        return np.sqrt(_hopf_r2(coords))

    chart = Chart("punctured", 2, punctured_contains, boundary_clearance=clearance,
                  description="C^2 minus the origin")

    def double(coords):
        return 2.0 * coords

    def halve(coords):
        return 0.5 * coords

    def double_jacobian(coords):
        eye = np.eye(2, dtype=complex)
        return np.broadcast_to(eye, coords.shape[:-1] + (2, 2))

    deck = DeckGroupSpec(
        generators=(DeckGenerator("double", double, halve,
                                  lambda c: 2.0 * double_jacobian(c)),),
        description="infinite cyclic group of doublings",
    )

    manifold = ManifoldSpec(
        name="hopf",
        dimension=2,
        atlas=(chart,),
        deck_group=deck,
        fundamental_domain=_hopf_domain(),
        integration_chart="punctured",
    )

    volumes = {
        "r4": VolumeFormSpec(
            name="r4",
            log_density={"punctured": _r4_log_density},
            character=Character({"double": 1.0}),
            exact_ricci={"punctured": _r4_exact_ricci},
        ),
        "lebesgue": VolumeFormSpec(
            name="lebesgue",
            log_density={"punctured": _lebesgue_log_density},
            character=Character({"double": 16.0}),
            exact_ricci={"punctured": _lebesgue_exact_ricci},
        ),
        "r4-bump": VolumeFormSpec(
            name="r4-bump",
            log_density={"punctured": _r4_bump_log_density},
            character=Character({"double": 1.0}),
        ),
    }

    def x1(coords):
        out = np.zeros_like(coords)
        out[..., 0] = coords[..., 0]
        return out

    def x2(coords):
        out = np.zeros_like(coords)
        out[..., 1] = coords[..., 1]
        return out

    def radial(coords):
        return coords

    fields = {
        "x1": VectorFieldSpec("x1", {"punctured": x1}),
        "x2": VectorFieldSpec("x2", {"punctured": x2}),
        "radial": VectorFieldSpec("radial", {"punctured": radial}),
    }

    return ExampleBundle(
        name="hopf",
        manifold=manifold,
        volumes=volumes,
        fields=fields,
        fixed_point_data=None,
        fixed_point_field=None,
        default_quadrature=QuadratureSpec(points_per_axis=8, refinement_levels=2),
        notes=("Hopf surface (C^2 minus 0)/(z -> 2z), integrated over the annulus "
               "1 <= |z1|^2+|z2|^2 <= 2 through smooth polar coordinates "
               "(s, phi, theta1, theta2) with Lebesgue factor s^3 cos(phi) sin(phi). "
               "The r^-4 density descends from the cone metric over the round "
               "3-sphere and has everywhere-degenerate Ricci matrix; the Lebesgue "
               "density is automorphic for the character value 16 = |det(2 Id)|^2; "
               "the angular perturbation Re(z1^2 conj(z2))/r^3 is deck-invariant."),
    )


# ---------------------------------------------------------------------------
# localization-only bundles
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _hopf_blowup_bundle() -> ExampleBundle:
    data = FixedPointData(
        label="one-point blow-up of the Hopf surface, field x1",
        manifold_dim=2,
        components=(
            ZeroComponent("isolated zero (1:0) on the exceptional curve",
                          0, Fraction(0), (Fraction(1), Fraction(-1))),
            ZeroComponent("elliptic curve (proper transform of z1 = 0)",
                          1, Fraction(1), (Fraction(1),),
                          Fraction(0), (Fraction(-1),)),
        ),
    )
    return ExampleBundle(
        name="hopf-blowup",
        manifold=None,
        volumes={},
        fields={},
        fixed_point_data=data,
        fixed_point_field="x1",
        default_quadrature=None,
        notes=("Blow-up of the Hopf surface at an interior point on the z1 = 0 "
               "locus, with the lift of x1 = z1 d/dz1. Around the isolated zero "
               "the lifted field reads zeta1 d/dzeta1 - zeta2 d/dzeta2, so the "
               "linearization is diag(1, -1) with trace 0, and the zero does not "
               "contribute. The curve component is elliptic (tangent degree 0), "
               "carries linearization diag(0, 1) hence trace 1 and normal weight 1, "
               "and its normal bundle is minus the exceptional class (degree -1). "
               "Residue sum: -2."),
    )


@lru_cache(maxsize=None)
def _blcp2_bundle() -> ExampleBundle:
    data = FixedPointData(
        label="one-point blow-up of the projective plane, circle action",
        manifold_dim=2,
        components=(
            ZeroComponent("line missing the blown-up point",
                          1, Fraction(1), (Fraction(1),),
                          Fraction(2), (Fraction(1),)),
            ZeroComponent("exceptional curve (pointwise fixed)",
                          1, Fraction(-1), (Fraction(-1),),
                          Fraction(2), (Fraction(-1),)),
        ),
    )
    return ExampleBundle(
        name="blcp2",
        manifold=None,
        volumes={},
        fields={},
        fixed_point_data=data,
        fixed_point_field="z1-ddz1",
        default_quadrature=None,
        notes=("Stretch example, derived from localization only: blow up the "
               "projective plane at the fixed point where the circle action "
               "lifting z1 d/dz1 linearizes as minus the identity, so the "
               "exceptional curve is fixed pointwise with normal weight -1. "
               "The invariant line elsewhere keeps normal degree +1 and weight 1. "
               "Residue sum: 4, a nonzero obstruction; the unblown plane's data "
               "(same line plus an isolated point of trace -2 and weights "
               "(-1, -1)) sums to zero."),
    )


_BUILDERS = {
    "cp1": _cp1_bundle,
    "hopf": _hopf_bundle,
    "hopf-blowup": _hopf_blowup_bundle,
    "blcp2": _blcp2_bundle,
}


def registry_names() -> tuple[str, ...]:
    return tuple(_BUILDERS)


def registry_get(name: str) -> ExampleBundle:
    """Return the immutable bundle registered under `name`."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        known = ", ".join(sorted(_BUILDERS))
        raise ValueError(f"unknown example '{name}'; known examples: {known}") from None
    return builder()
