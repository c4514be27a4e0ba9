# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
import pytest

from pident.common import JetOverflowError, ModelSemanticError, ModelSyntaxError
from pident.differential import DiffVar
from pident.expression import parse_expression
from pident.model import (
    JetPoint,
    ODEModel,
    format_model,
    gen_appendix,
    lie_substitute,
    parse_model,
    read_model,
    replicate,
    total_derivative,
)
from tests._common import model_path

_DECAY_TEXT = """\
model decay  # comment
states: x
params: k

x' = -k*x
y = x
"""


def test_can_read_model(two_compartment: ODEModel):
    assert two_compartment.name == "two_compartment"
    assert two_compartment.states == ("x1", "x2")
    assert two_compartment.params == ("a01", "a21", "a12")
    assert two_compartment.inputs == ()
    assert two_compartment.outputs == ("y",)
    field = two_compartment.field
    assert two_compartment.state_rhs("x2") == parse_expression("a21*x1 - a12*x2", field)


def test_can_format_model():
    assert format_model(parse_model(_DECAY_TEXT)) == "model decay\nstates: x\nparams: k\nx' = -x*k\ny = x\n"


@pytest.mark.parametrize("name", ["two_compartment", "slow_fast", "forced_decay", "constant_state"])
def test_can_parse_formatted_model(name):
    model = read_model(model_path(name))
    assert parse_model(format_model(model)) == model


def test_can_parse_formatted_product_denominator():
    model = parse_model("model scaled\nstates: x\nparams: a, b\nx' = x/(a*b)\ny = (x - 1)/(a*b^2)\n")
    text = format_model(model)
    assert "x' = x/(a*b)\n" in text
    assert parse_model(text) == model


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("states: x\n", 1, 1),
        ("model decay\nstates: x\nparams: k\nx' = -k*x $\ny = x\n", 4, 11),
        ("model decay\nstates: x, , z\nparams: k\n", 2, 12),
        ("model decay\nstates: x\nparams: k\nx' = -k*x\nstates: z\n", 5, 1),
        ("model decay\nstates: x\nparams: k\nx' = -k*(x\ny = x\n", 4, 11),
        ("model decay\nstates: x\nparams: k\nx' := -k\n", 4, 1),
        ("", 1, 1),
    ],
)
def test_fails_on_broken_model_syntax(text, line, column):
    with pytest.raises(ModelSyntaxError) as error_info:
        parse_model(text, "broken.model")
    assert (error_info.value.line, error_info.value.column) == (line, column)
    assert str(error_info.value).startswith(f"broken.model:{line}:{column}: ")


@pytest.mark.parametrize(
    "text, message",
    [
        ("model decay\nstates: x\nparams: k\ny = x\n", "missing: x"),
        ("model decay\nstates: x\nparams: k\nx' = -k*z\ny = x\n", 'unknown symbol "z"'),
        ("model decay\nstates: x\nparams: k\nz' = 1\nx' = 1\ny = x\n", '"z"'),
        ("model decay\nstates: x\nparams: k\nx' = 1\nk = x\n", "clashes"),
        ("model decay\nstates: x\nparams: x\nx' = 1\ny = x\n", "clashes"),
        ("model decay\nstates: x\nparams: k\nx' = 1\n", "at least one output"),
        ("model decay\nstates: x\nx' = 1\ny = x\n", '"params:"'),
        ("model decay\nstates: x\nparams: k\nx' = 1\ny = x\ny = k\n", "duplicate"),
    ],
)
def test_fails_on_broken_model_semantics(text, message):
    with pytest.raises(ModelSemanticError, match=message):
        parse_model(text)


def test_can_compute_total_derivative(forced_decay: ODEModel):
    jet_point = JetPoint(forced_decay, 2)
    field = jet_point.field
    assert jet_point.value(DiffVar("y", 1)) == parse_expression("-k*x + b*u", field)
    assert jet_point.value(DiffVar("y", 2)) == parse_expression("k^2*x - k*b*u + b*u'", field)
    assert jet_point.value(DiffVar("u", 2)) == parse_expression("u''", field)
    assert total_derivative(parse_expression("u*x", field), forced_decay, 2) == parse_expression(
        "u'*x + u*(-k*x + b*u)", field
    )


def test_fails_on_input_derivative_beyond_jet_cap(forced_decay: ODEModel):
    with pytest.raises(JetOverflowError):
        lie_substitute(forced_decay, 3, jet_cap=2)
    with pytest.raises(JetOverflowError):
        JetPoint(forced_decay, 1).value(DiffVar("y", 2))


def test_can_replicate_model(two_compartment: ODEModel):
    replicated = replicate(two_compartment, 2)
    assert replicated.name == "two_compartment_x2"
    assert replicated.states == ("x1#1", "x2#1", "x1#2", "x2#2")
    assert replicated.outputs == ("y#1", "y#2")
    assert replicated.params == two_compartment.params
    assert replicated.state_rhs("x2#2") == parse_expression("a21*x1#2 - a12*x2#2", replicated.field)
    assert replicated.output_rhs("y#1") == parse_expression("x2#1", replicated.field)
    assert parse_model(format_model(replicated)) == replicated


def test_can_generate_appendix_models():
    smallest = gen_appendix(2, 1)
    assert smallest.states == ("x1", "x2")
    assert smallest.params == ("c1", "c2")
    assert smallest.state_rhs("x1") == parse_expression("c1 + c2*x2", smallest.field)
    assert smallest.state_rhs("x2") == smallest.field.zero
    chained = gen_appendix(3, 2)
    assert chained.states == ("x1", "x2", "x2_1", "x3")
    assert chained.state_rhs("x2") == parse_expression("x2_1", chained.field)
    assert chained.outputs == ("y1", "y2", "y3")
    assert parse_model(format_model(chained)) == chained


def test_fails_on_broken_appendix_parameters():
    with pytest.raises(ModelSemanticError, match="at most"):
        gen_appendix(2, 3)
    with pytest.raises(ModelSemanticError, match="at least 1"):
        gen_appendix(0, 1)
