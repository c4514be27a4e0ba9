# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
import pytest

from pident.algebra import format_ratfunc
from pident.common import ModelSemanticError, ProlongationBudgetError, Settings
from pident.differential import DiffVar, Ranking
from pident.ioequations import IOEquations, decompose, io_equations
from pident.model import JetPoint, ODEModel, replicate


def test_can_compute_two_compartment_equation(two_compartment_equations: IOEquations):
    assert two_compartment_equations.formatted() == ["y'' + (a01 + a21 + a12)*y' + a01*a12*y"]
    assert two_compartment_equations.depth == 2
    assert two_compartment_equations.ranking == Ranking.default(["y"])


def test_can_decompose_equations(two_compartment_equations: IOEquations):
    (terms,) = decompose(two_compartment_equations)
    diff_ring = two_compartment_equations.diff_ring
    assert terms.s == 2
    assert terms.monomials == (diff_ring.jet(DiffVar("y", 1)), diff_ring.jet(DiffVar("y")))
    assert terms.rest == diff_ring.jet(DiffVar("y", 2))
    assert len(terms.all_monomials) == 3


def test_can_compute_equations_that_vanish_on_the_model(two_compartment_equations: IOEquations):
    jet_point = JetPoint(two_compartment_equations.model, two_compartment_equations.diff_ring.jet_cap)
    for polynomial in two_compartment_equations.polynomials:
        assert not jet_point.substitute(polynomial, two_compartment_equations.diff_ring)


def test_can_compute_equations_with_input(forced_decay: ODEModel):
    equations = io_equations(forced_decay)
    assert equations.ranking.descriptor == ["y", "u"]
    assert equations.formatted() == ["y' + k*y - b*u"]
    (terms,) = decompose(equations)
    assert terms.s == 2


def test_can_compute_equations_with_elimination_ranking(degenerate_wronskian: ODEModel):
    equations = io_equations(degenerate_wronskian, Ranking.from_text("y2,y1"))
    assert equations.formatted() == ["y2 - theta*y1 - theta^2", "y1'"]
    assert [terms.s for terms in decompose(equations)] == [2, 0]


def test_fails_on_ranking_that_misses_outputs(two_compartment: ODEModel):
    with pytest.raises(ModelSemanticError, match="missing: y"):
        io_equations(two_compartment, Ranking.from_text("z"))


def test_fails_on_exhausted_prolongation(two_compartment: ODEModel):
    with pytest.raises(ProlongationBudgetError, match="number of states 2"):
        io_equations(two_compartment, settings=Settings(max_prolongation=1))


def _coefficient_texts(equations: IOEquations) -> set[str]:
    return {format_ratfunc(coefficient) for terms in decompose(equations) for coefficient in terms.coefficients}


@pytest.mark.parametrize("name", ["two_compartment", "constant_state", "two_parameter_offset"])
@pytest.mark.parametrize("experiment_count", [1, 2])
def test_can_keep_coefficients_of_replicated_model(name, experiment_count, request):
    model = request.getfixturevalue(name)
    equations = io_equations(model)
    replicated_equations = io_equations(replicate(model, experiment_count))
    assert len(replicated_equations) == experiment_count * len(equations)
    assert _coefficient_texts(replicated_equations) == _coefficient_texts(equations)
