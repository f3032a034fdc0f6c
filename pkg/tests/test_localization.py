"""Exact residue arithmetic: ring laws, contributions, wire format."""

import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from holoinv import (
    CohomologyClass,
    FixedPointData,
    NonInvertibleClassError,
    NonsingularityError,
    ZeroComponent,
    class_inverse,
    class_mul,
    class_pow,
    component_contribution,
    component_contribution_parts,
    fixed_point_data_from_dict,
    fixed_point_data_to_dict,
    load_fixed_point_data,
    localization_sum,
    rescale_field,
    unnormalized_invariant,
)


def cls(*coeffs):
    return CohomologyClass(tuple(Fraction(c) for c in coeffs))


# --- truncated ring --------------------------------------------------------


def test_mul_truncates_top_degree():
    assert class_mul(cls(1, -1), cls(1, 1)) == cls(1, 0)


def test_cube_of_one_minus_t():
    # (1 - t)^3 = 1 - 3t in the degree-1 ring
    assert class_pow(cls(1, -1), 3) == cls(1, -3)


def test_mul_by_constant():
    assert class_mul(cls(1, 2), cls(3, 0)) == cls(3, 6)


def test_inverse_of_one_minus_t():
    assert class_inverse(cls(1, -1)) == cls(1, 1)


def test_inverse_of_one():
    assert class_inverse(cls(1, 0)) == cls(1, 0)


def test_inverse_verified_by_multiplication():
    a = cls(2, 4)
    inv = class_inverse(a)
    assert class_mul(a, inv) == cls(1, 0)
    assert inv == cls(Fraction(1, 2), -1)


def test_inverse_requires_unit_constant_term():
    with pytest.raises(NonInvertibleClassError):
        class_inverse(cls(0, 1))


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        class_mul(cls(1, 0), cls(1, 0, 0))


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def classes(dim=None):
    dims = st.just(dim) if dim is not None else st.integers(0, 4)
    return dims.flatmap(lambda d: st.lists(
        rationals, min_size=d + 1, max_size=d + 1).map(
            lambda c: CohomologyClass(tuple(c))))


@given(st.integers(0, 3).flatmap(lambda d: st.tuples(classes(d), classes(d))))
def test_mul_commutative(pair):
    a, b = pair
    assert class_mul(a, b) == class_mul(b, a)


@given(st.integers(0, 3).flatmap(lambda d: st.tuples(classes(d), classes(d), classes(d))))
def test_mul_associative(triple):
    a, b, c = triple
    assert class_mul(class_mul(a, b), c) == class_mul(a, class_mul(b, c))


@given(classes())
def test_inverse_round_trip(a):
    if a.coeffs[0] == 0:
        return
    one = CohomologyClass.constant(1, a.dim)
    assert class_mul(a, class_inverse(a)) == one
    assert class_inverse(class_inverse(a)) == a


# --- component contributions -----------------------------------------------


def test_isolated_zero_with_traceless_linearization_does_not_contribute():
    comp = ZeroComponent("isolated", 0, Fraction(0), (Fraction(1), Fraction(-1)))
    assert component_contribution(comp, 2) == 0


def test_curve_component_value_minus_two():
    comp = ZeroComponent("curve", 1, Fraction(1), (Fraction(1),),
                         Fraction(0), (Fraction(-1),))
    numerator, inverted, value = component_contribution_parts(comp, 2)
    assert numerator == cls(1, -3)
    assert inverted == cls(1, 1)
    assert value == -2


def test_simple_point_residue():
    # hand residue for the linear field on the line fixing the origin
    comp = ZeroComponent("origin", 0, Fraction(1), (Fraction(1),))
    assert component_contribution(comp, 1) == 1


def test_zero_numerator_guard():
    comp = ZeroComponent("guard", 0, Fraction(0), (Fraction(1), Fraction(1)))
    assert component_contribution(comp, 2) == 0


def test_ambient_dimension_guard():
    comp = ZeroComponent("curve", 1, Fraction(1), ())
    with pytest.raises(ValueError):
        component_contribution(comp, 0)


# --- fixed point data ------------------------------------------------------


def test_blowup_dataset_headline(hopf_blowup):
    assert localization_sum(hopf_blowup.fixed_point_data) == -2


def test_unnormalized_value(hopf_blowup):
    expected = -2.0 * (2.0 * math.pi) ** 2 / 3.0
    assert unnormalized_invariant(hopf_blowup.fixed_point_data) == pytest.approx(
        expected, abs=1e-12)


def test_projective_line_dataset_cancels(cp1):
    assert localization_sum(cp1.fixed_point_data) == 0


def test_unblown_plane_dataset_cancels():
    # the plane carries a canonical metric of constant curvature, so the
    # residues of any of its global fields must cancel: line contributes 8,
    # the remaining isolated point -8
    line = ZeroComponent("line", 1, Fraction(1), (Fraction(1),),
                         Fraction(2), (Fraction(1),))
    point = ZeroComponent("point", 0, Fraction(-2), (Fraction(-1), Fraction(-1)))
    data = FixedPointData("plane, linear field", 2, (line, point))
    assert component_contribution(line, 2) == 8
    assert component_contribution(point, 2) == -8
    assert localization_sum(data) == 0


def test_residue_sum_is_linear_in_the_field(hopf_blowup, cp1):
    # scaling the field scales traces and normal weights; the residue sum
    # is degree-one homogeneous (numerator degree n+1 minus n-d from the
    # denominator minus d from the pairing)
    for data in (hopf_blowup.fixed_point_data, cp1.fixed_point_data):
        base = localization_sum(data)
        for c in (Fraction(2), Fraction(-1), Fraction(1, 3), Fraction(-5, 7)):
            assert localization_sum(rescale_field(data, c)) == c * base


def test_rescale_rejects_zero():
    comp = ZeroComponent("p", 0, Fraction(1), (Fraction(1),))
    data = FixedPointData("d", 1, (comp,))
    with pytest.raises(ValueError):
        rescale_field(data, 0)


# --- validation ------------------------------------------------------------


def test_zero_weight_rejected_with_nonsingularity_message():
    with pytest.raises(NonsingularityError, match="nonsingular"):
        ZeroComponent("bad", 0, Fraction(1), (Fraction(0),))


def test_high_dimensional_component_rejected():
    with pytest.raises(ValueError, match="dimension"):
        ZeroComponent("surface", 2, Fraction(1), (Fraction(1),))


def test_weight_count_must_match_codimension():
    comp = ZeroComponent("p", 0, Fraction(1), (Fraction(1),))
    with pytest.raises(ValueError, match="normal weights"):
        FixedPointData("d", 2, (comp,))


def test_point_component_rejects_curvature_data():
    with pytest.raises(ValueError):
        ZeroComponent("p", 0, Fraction(1), (Fraction(1),), Fraction(1))
    with pytest.raises(ValueError):
        ZeroComponent("p", 0, Fraction(1), (Fraction(1),),
                      Fraction(0), (Fraction(2),))


def test_empty_components_rejected():
    with pytest.raises(ValueError):
        FixedPointData("d", 2, ())


# --- wire format -----------------------------------------------------------


def test_json_round_trip(hopf_blowup):
    payload = fixed_point_data_to_dict(hopf_blowup.fixed_point_data)
    text = json.dumps(payload)
    back = fixed_point_data_from_dict(json.loads(text))
    assert back == hopf_blowup.fixed_point_data
    assert localization_sum(back) == -2


def test_json_parses_fraction_strings_and_integers():
    data = fixed_point_data_from_dict({
        "label": "mixed",
        "manifold_dim": 1,
        "components": [{"name": "p", "dim": 0, "trace_L": "1/2",
                        "normal_weights": [2]}],
    })
    assert data.components[0].trace_L == Fraction(1, 2)
    assert localization_sum(data) == Fraction(1, 8)


def test_json_rejects_floats():
    with pytest.raises(ValueError, match="rationals"):
        fixed_point_data_from_dict({
            "label": "bad", "manifold_dim": 1,
            "components": [{"name": "p", "dim": 0, "trace_L": 0.5,
                            "normal_weights": [1]}],
        })


def test_json_zero_weight_message(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "label": "bad", "manifold_dim": 1,
        "components": [{"name": "p", "dim": 0, "trace_L": 1,
                        "normal_weights": ["0/3"]}],
    }))
    with pytest.raises(NonsingularityError, match="nonsingular"):
        load_fixed_point_data(path)


def test_load_from_file(tmp_path, hopf_blowup):
    path = tmp_path / "data.json"
    path.write_text(json.dumps(fixed_point_data_to_dict(hopf_blowup.fixed_point_data)))
    assert localization_sum(load_fixed_point_data(path)) == -2
