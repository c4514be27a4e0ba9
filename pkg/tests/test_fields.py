# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
import pytest

from pident.algebra import IdealGens, ideals_equal, polynomial_ring, rational_function_field
from pident.common import PidentError
from pident.fields import FieldDesc, fields_equal, intersect, is_subfield, member

_RATES = rational_function_field(("k1", "k2"))
_K1, _K2 = _RATES.gens
_SYMMETRIC = FieldDesc.of([_K1 * _K2, _K1 + _K2])


def test_can_describe_field():
    field_desc = FieldDesc.of([_K1 + _K2, _RATES(3), _K1 + _K2, _K1 * _K2])
    assert field_desc.ambient == ("k1", "k2")
    assert len(field_desc) == 2
    assert str(field_desc) == "QQ(k1 + k2, k1*k2)"
    assert FieldDesc.rationals().is_rationals


@pytest.mark.parametrize(
    "value, expected",
    [
        (_K1 + _K2, True),
        (_K1**2 + _K2**2, True),
        ((_K1 + 1) * (_K2 + 1), True),
        (_K1 / _K2 + _K2 / _K1, True),
        (_RATES(7) / 3, True),
        (_K1, False),
        (_K1 - _K2, False),
        (_K1 / _K2, False),
    ],
)
def test_can_check_membership_in_symmetric_field(value, expected):
    assert member(value, _SYMMETRIC) == expected


def test_can_check_membership_in_rationals():
    assert member(_RATES(5), FieldDesc.rationals())
    assert not member(_K1, FieldDesc(("k1", "k2")))


def test_can_check_membership_with_relations():
    ring = polynomial_ring(["x", "y"])
    x, y = ring.gens
    field = rational_function_field(("x", "y"))
    field_x, field_y = field.gens
    assert not member(field_y, FieldDesc(("x", "y"), (field_x,)))
    assert member(field_y, FieldDesc(("x", "y"), (field_x,), (y - x**2,)))
    assert member(field_x * field_y, FieldDesc(("x", "y"), (), (y - 2, x - 3)))


def test_can_compare_fields():
    assert fields_equal(_SYMMETRIC, FieldDesc.of([_K1**2 + _K2**2, _K1 + _K2]))
    assert not fields_equal(_SYMMETRIC, FieldDesc.of([_K1, _K2]))
    assert is_subfield(_SYMMETRIC, FieldDesc.of([_K1, _K2]))
    assert not is_subfield(FieldDesc.of([_K1, _K2]), _SYMMETRIC)


def test_can_intersect_fields_with_trace():
    field = rational_function_field(("a", "b", "x"))
    a, b, x = field.gens
    trace = []
    result = intersect(FieldDesc(("a", "b"), (a, b)), FieldDesc(("x", "a", "b"), (x, a * x + b)), trace=trace)
    assert result.is_rationals
    assert [label for label, _ in trace] == ["P", "J1", "I2", "J2", "I3"]
    label_to_ideal = dict(trace)
    z_ring = label_to_ideal["P"].ring
    z1, z2, z3 = z_ring.gens
    assert ideals_equal(label_to_ideal["J1"], IdealGens(z_ring, (z1 - z_ring(a), z2 - z_ring(b))))
    assert ideals_equal(label_to_ideal["I2"], IdealGens(z_ring, (z1 * z_ring(x) + z2 - z_ring(a * x + b),)))
    assert label_to_ideal["J2"].is_zero


def test_can_intersect_parameter_field_with_symmetric_field():
    field = rational_function_field(("k1", "k2", "t"))
    k1, k2, t = field.gens
    result = intersect(FieldDesc(("k1", "k2"), (k1, k2)), FieldDesc.of([k1 + k2, k1 * k2, t]))
    assert fields_equal(result, FieldDesc.of([k1 + k2, k1 * k2]))


def test_fails_on_intersecting_field_with_relations():
    ring = polynomial_ring(["x"])
    with pytest.raises(PidentError, match="relations"):
        intersect(_SYMMETRIC, FieldDesc(("x",), (), (ring.gens[0] - 1,)))
