"""Membership contracts: automorphy, deck invariance, chart consistency."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from holoinv import (
    Character,
    Chart,
    DeckGenerator,
    DeckGroupSpec,
    DomainError,
    IntegrationDomain,
    ManifoldSpec,
    VectorFieldSpec,
    VolumeFormSpec,
    deck_group_report,
    sample_domain_points,
    verify_automorphic,
    verify_field_transitions,
    verify_invariant_field,
    verify_volume_transitions,
)


def _abs2(z):
    return z.real * z.real + z.imag * z.imag


# --- automorphy ------------------------------------------------------------


def test_r4_closed_form_scaling(hopf):
    # a(2z) * |det d(2 id)|^2 = a(z): with a = r^-4 both sides agree exactly
    rng = np.random.default_rng(0)
    z = rng.uniform(0.7, 1.4, (64, 2)) * np.exp(1j * rng.uniform(0, 6.28, (64, 2)))
    a = 1.0 / (_abs2(z).sum(-1)) ** 2
    a2 = 1.0 / (_abs2(2.0 * z).sum(-1)) ** 2
    assert np.max(np.abs(a2 * 16.0 - a)) < 1e-15 * np.max(a)


def test_hopf_r4_automorphic_trivial_character(hopf):
    rep = verify_automorphic(hopf.volumes["r4"], hopf.manifold, samples=256, tol=1e-8)
    assert rep.passed
    assert rep.max_residual < 1e-12


def test_hopf_lebesgue_character_sixteen(hopf):
    # |det d(2 id)|^2 = 2^4 = 16 rescales the flat volume form
    rep = verify_automorphic(hopf.volumes["lebesgue"], hopf.manifold)
    assert rep.passed
    assert rep.max_residual < 1e-12


def test_hopf_bump_automorphic(hopf):
    rep = verify_automorphic(hopf.volumes["r4-bump"], hopf.manifold)
    assert rep.passed and rep.max_residual < 1e-12


def test_wrong_character_fails(hopf):
    wrong = VolumeFormSpec("flat-wrong",
                           hopf.volumes["lebesgue"].log_density,
                           Character({"double": 1.0}))
    rep = verify_automorphic(wrong, hopf.manifold)
    assert not rep.passed
    assert abs(rep.max_residual - math.log(16.0)) < 1e-12


def test_trivial_deck_group_passes_with_zero_residual(cp1):
    for vol in cp1.volumes.values():
        rep = verify_automorphic(vol, cp1.manifold)
        assert rep.passed
        assert rep.max_residual == 0.0


# --- field membership ------------------------------------------------------


def test_linear_field_commutes_with_scaling(hopf):
    rep = verify_invariant_field(hopf.fields["x1"], hopf.manifold)
    assert rep.passed
    assert rep.residuals["deck_invariance"] < 1e-12


def test_zero_field_passes_exactly(hopf):
    zero = VectorFieldSpec("zero", {"punctured": lambda c: np.zeros_like(c)})
    rep = verify_invariant_field(zero, hopf.manifold)
    assert rep.passed
    assert rep.max_residual == 0.0


def test_antiholomorphic_component_fails(hopf):
    def bad(coords):
        out = np.zeros_like(coords)
        out[..., 0] = np.conj(coords[..., 0])
        return out

    rep = verify_invariant_field(VectorFieldSpec("zbar", {"punctured": bad}),
                                 hopf.manifold)
    assert not rep.passed
    assert rep.residuals["cauchy_riemann"] > 1e-2


# --- character -------------------------------------------------------------


def test_character_rejects_nonpositive_values():
    with pytest.raises(ValueError):
        Character({"g": 0.0})
    with pytest.raises(ValueError):
        Character({"g": -2.0})


def test_character_empty_word_is_one():
    chi = Character({"g": 16.0})
    assert chi.value_on_word([]) == 1.0
    assert chi.value_on_word([("g", 1), ("g", -1)]) == 1.0


@given(
    values=st.lists(st.integers(min_value=-6, max_value=6), min_size=1, max_size=3),
    splits=st.data(),
)
def test_character_homomorphism_on_words(values, splits):
    # power-of-two values make every float product exact, so the
    # homomorphism law holds bit-for-bit on words of bounded length
    names = [f"g{i}" for i in range(len(values))]
    chi = Character({n: 2.0 ** k for n, k in zip(names, values)})
    letters = st.tuples(st.sampled_from(names), st.sampled_from((-1, 1)))
    w1 = splits.draw(st.lists(letters, max_size=4))
    w2 = splits.draw(st.lists(letters, max_size=4))
    assert chi.value_on_word(w1 + w2) == chi.value_on_word(w1) * chi.value_on_word(w2)


# --- chart transitions -----------------------------------------------------


def test_volume_transitions_cp1(cp1):
    for vol in cp1.volumes.values():
        rep = verify_volume_transitions(vol, cp1.manifold, tol=1e-10)
        assert rep.passed, (vol.name, rep.residuals)


def test_field_transitions_cp1(cp1):
    for fld in cp1.fields.values():
        rep = verify_field_transitions(fld, cp1.manifold, tol=1e-10)
        assert rep.passed, (fld.name, rep.residuals)


def test_deck_group_report(hopf, cp1):
    rep = deck_group_report(hopf.manifold)
    assert rep.passed
    rep2 = deck_group_report(cp1.manifold)
    assert rep2.passed and rep2.max_residual == 0.0


# --- sampling and domains --------------------------------------------------


def test_sampling_is_deterministic(hopf):
    a = sample_domain_points(hopf.manifold, 100, seed=3)
    b = sample_domain_points(hopf.manifold, 100, seed=3)
    assert np.array_equal(a, b)
    c = sample_domain_points(hopf.manifold, 100, seed=4)
    assert not np.array_equal(a, c)


def test_sampling_lands_in_annulus(hopf):
    pts = sample_domain_points(hopf.manifold, 500, seed=0)
    r2 = _abs2(pts).sum(-1)
    assert np.all(r2 >= 1.0 - 1e-12) and np.all(r2 <= 2.0 + 1e-12)


def test_sample_count_validation(hopf):
    with pytest.raises(ValueError):
        sample_domain_points(hopf.manifold, 0)


def test_domain_error_when_generator_leaves_chart():
    disc = Chart("disc", 1, lambda c: np.abs(c[..., 0]) < 1.0)
    shift = DeckGenerator(
        "shift",
        lambda c: c + 2.0,
        lambda c: c - 2.0,
        lambda c: np.ones(c.shape[:-1] + (1, 1), dtype=complex),
    )
    m = ManifoldSpec(
        name="disc-shift",
        dimension=1,
        atlas=(disc,),
        deck_group=DeckGroupSpec((shift,)),
        fundamental_domain=IntegrationDomain(box=((-0.5, 0.5), (-0.5, 0.5))),
        integration_chart="disc",
    )
    flat = VolumeFormSpec("flat", {"disc": lambda c: np.zeros(c.shape[:-1])},
                          Character({"shift": 1.0}))
    with pytest.raises(DomainError):
        verify_automorphic(flat, m)


def test_manifold_validation():
    disc = Chart("disc", 1, lambda c: np.abs(c[..., 0]) < 1.0)
    with pytest.raises(ValueError):
        ManifoldSpec("bad", 1, (disc,), DeckGroupSpec(),
                     IntegrationDomain(box=((0, 1), (0, 1))),
                     integration_chart="elsewhere")
    wrong_dim = Chart("disc2", 2, lambda c: np.abs(c[..., 0]) < 1.0)
    with pytest.raises(ValueError):
        ManifoldSpec("bad2", 1, (disc, wrong_dim), DeckGroupSpec(),
                     IntegrationDomain(box=((0, 1), (0, 1))),
                     integration_chart="disc")
