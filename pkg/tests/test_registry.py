"""Registered bundles: membership contracts, datasets, cross-checks."""

import math

import numpy as np
import pytest

from holoinv import (
    QuadratureSpec,
    component_contribution_parts,
    fixed_point_data_from_dict,
    fixed_point_data_to_dict,
    integrate_invariant_density,
    localization_sum,
    registry_get,
    registry_names,
    unnormalized_invariant,
    verify_automorphic,
    verify_invariant_field,
)
from holoinv import calculus


def test_names():
    names = registry_names()
    assert set(names) >= {"cp1", "hopf", "hopf-blowup"}


def test_unknown_name_rejected():
    with pytest.raises(ValueError, match="unknown example"):
        registry_get("torus")


def test_bundles_are_cached():
    assert registry_get("cp1") is registry_get("cp1")


@pytest.mark.parametrize("name", ["cp1", "hopf"])
def test_every_volume_is_automorphic(name):
    bundle = registry_get(name)
    for vol in bundle.volumes.values():
        rep = verify_automorphic(vol, bundle.manifold, samples=256, tol=1e-8)
        assert rep.passed, (name, vol.name, rep.max_residual)
        assert rep.max_residual < 1e-12


@pytest.mark.parametrize("name", ["cp1", "hopf"])
def test_every_field_is_invariant_and_holomorphic(name):
    bundle = registry_get(name)
    for fld in bundle.fields.values():
        rep = verify_invariant_field(fld, bundle.manifold, samples=256, tol=1e-8)
        assert rep.passed, (name, fld.name, rep.residuals)


def test_exact_ricci_evaluators_match_stencils():
    # guards the closed forms shipped with the bundles
    cp1 = registry_get("cp1")
    rng = np.random.default_rng(11)
    z = rng.uniform(-2, 2, (40, 1)) + 1j * rng.uniform(-2, 2, (40, 1))
    for name in ("fs", "fs-bump"):
        vol = cp1.volumes[name]
        numeric = calculus.ricci_from_log_density(vol.log_density["affine"], z)
        assert np.max(np.abs(numeric - vol.exact_ricci["affine"](z))) < 1e-7

    hopf = registry_get("hopf")
    w = rng.uniform(0.8, 1.4, (40, 2)) * np.exp(1j * rng.uniform(0, 6.28, (40, 2)))
    for name in ("r4", "lebesgue"):
        vol = hopf.volumes[name]
        numeric = calculus.ricci_from_log_density(vol.log_density["punctured"], w)
        assert np.max(np.abs(numeric - vol.exact_ricci["punctured"](w))) < 1e-7


def test_blowup_dataset_reproduces_intermediates(hopf_blowup):
    data = hopf_blowup.fixed_point_data
    isolated, curve = data.components
    assert component_contribution_parts(isolated, 2)[2] == 0
    numerator, inverted, value = component_contribution_parts(curve, 2)
    assert [int(c) for c in numerator.coeffs] == [1, -3]
    assert [int(c) for c in inverted.coeffs] == [1, 1]
    assert value == -2
    assert localization_sum(data) == -2
    assert unnormalized_invariant(data) == pytest.approx(
        -2.0 * (2.0 * math.pi) ** 2 / 3.0)


def test_blowup_dataset_exports_to_wire_format(hopf_blowup):
    payload = fixed_point_data_to_dict(hopf_blowup.fixed_point_data)
    assert payload["manifold_dim"] == 2
    assert localization_sum(fixed_point_data_from_dict(payload)) == -2


def test_cp1_localization_matches_direct(cp1):
    from holoinv import invariant_direct

    assert localization_sum(cp1.fixed_point_data) == 0
    res = invariant_direct(cp1.manifold, cp1.volumes["fs"],
                           cp1.fields[cp1.fixed_point_field],
                           q=cp1.default_quadrature)
    assert abs(res.value) <= max(1e-6, res.error_estimate)


def test_blcp2_stretch_dataset():
    bundle = registry_get("blcp2")
    assert bundle.manifold is None
    assert localization_sum(bundle.fixed_point_data) == 4


def test_hopf_radial_divergence_free(hopf):
    from holoinv import ChartPoint, divergence

    val = divergence(hopf.fields["radial"], hopf.volumes["r4"],
                     ChartPoint("punctured", (0.8, 0.9j)))
    assert abs(val) < 1e-10


def test_curvature_mass_independent_of_density(cp1):
    # both densities represent the same curvature class, whose total mass
    # over the line is 2 * (2 pi) against the conventions used here
    for name in ("fs", "fs-bump"):
        vol = cp1.volumes[name]

        def density(z, _vol=vol):
            return 2.0 * calculus.ricci_top_field(
                _vol.log_density["affine"], z,
                exact=(_vol.exact_ricci or {}).get("affine"))

        res = integrate_invariant_density(cp1.manifold, density,
                                          QuadratureSpec(16, "gauss-legendre", 3))
        assert abs(res.value - 4.0 * math.pi) < 1e-4, name


def test_hopf_curvature_mass_vanishes(hopf):
    # the surface has no degree-four cohomology, so the squared curvature
    # form integrates to zero for every registered density
    for name in ("r4", "r4-bump"):
        vol = hopf.volumes[name]

        def density(z, _vol=vol):
            return 4.0 * calculus.ricci_top_field(
                _vol.log_density["punctured"], z,
                exact=(_vol.exact_ricci or {}).get("punctured"))

        res = integrate_invariant_density(hopf.manifold, density,
                                          hopf.default_quadrature or QuadratureSpec())
        assert abs(res.value) < 1e-6, name


def test_localization_only_bundles_have_no_atlas(hopf_blowup):
    assert hopf_blowup.manifold is None
    assert hopf_blowup.volumes == {}
    assert hopf_blowup.fields == {}
    assert hopf_blowup.fixed_point_field == "x1"


def test_notes_present():
    for name in registry_names():
        assert registry_get(name).notes
