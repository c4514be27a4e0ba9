# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
import pytest

from pident.algebra import rational_function_field
from pident.common import RankMethod, SelfCheckError, Settings
from pident.differential import Ranking
from pident.fields import FieldDesc, fields_equal
from pident.ioequations import IOEquations, io_equations
from pident.model import ODEModel, gen_appendix
from pident.multiexp import MultiExpReport, experiment_bound, multiexp_field
from pident.wronskian import wronskian_jet_cap


def test_can_compute_bound_of_empty_report():
    assert MultiExpReport(FieldDesc.rationals(), ()).bound == 1
    assert MultiExpReport(FieldDesc.rationals(), ((3, 1), (0, 0))).bound == 3


def test_can_compute_multi_experiment_field(two_compartment_equations: IOEquations):
    a01, a21, a12 = rational_function_field(("a01", "a21", "a12")).gens
    result = multiexp_field(two_compartment_equations)
    assert result.ambient == ("a01", "a21", "a12")
    assert fields_equal(result, FieldDesc.of([a01 + a21 + a12, a01 * a12]))


def test_can_compute_two_compartment_bound(two_compartment_equations: IOEquations):
    report = experiment_bound(two_compartment_equations)
    assert report.per_equation == ((2, 2),)
    assert report.bound == 1


def test_can_compute_bound_for_offset(two_parameter_offset: ODEModel):
    mu1, mu2 = rational_function_field(("mu1", "mu2")).gens
    report = experiment_bound(io_equations(two_parameter_offset))
    assert report.bound == 2
    assert fields_equal(report.field, FieldDesc.of([mu1, mu2]))


def test_can_compute_bound_for_degenerate_wronskian(degenerate_wronskian: ODEModel):
    (theta,) = rational_function_field(("theta",)).gens
    report = experiment_bound(io_equations(degenerate_wronskian, Ranking.from_text("y2,y1")))
    assert report.per_equation == ((2, 1), (0, 0))
    assert report.bound == 2
    assert fields_equal(report.field, FieldDesc.of([theta]))


@pytest.mark.slow
@pytest.mark.parametrize("n, h", [(2, 1), (2, 2), (3, 2), (3, 3)])
def test_can_compute_bound_of_appendix_models(n, h):
    model = gen_appendix(n, h)
    report = experiment_bound(io_equations(model))
    assert report.bound == n - h + 1
    assert fields_equal(report.field, FieldDesc.of(list(rational_function_field(model.params).gens)))


@pytest.mark.slow
def test_can_compute_slow_fast_bound(slow_fast: ODEModel):
    k1, k2, eB = rational_function_field(("k1", "k2", "eB")).gens
    report = experiment_bound(io_equations(slow_fast, Ranking.from_text("y2,y1,y3,y4")))
    assert report.per_equation == ((3, 2), (2, 2), (0, 0), (0, 0))
    assert report.bound == 2
    assert fields_equal(report.field, FieldDesc.of([k1, k2, eB]))


def test_fails_on_rank_above_monomial_count(two_compartment_equations: IOEquations, monkeypatch):
    monkeypatch.setattr("pident.multiexp.wronskian_ranks", lambda *_: [(1, 2)])
    with pytest.raises(SelfCheckError, match="rank 2 exceeds"):
        experiment_bound(two_compartment_equations)


@pytest.mark.slow
def test_can_compute_slow_fast_bound_with_default_ranking(slow_fast: ODEModel):
    k1, k2, eB = rational_function_field(("k1", "k2", "eB")).gens
    equations = io_equations(slow_fast)
    assert wronskian_jet_cap(equations) > equations.diff_ring.jet_cap
    report = experiment_bound(equations, Settings(rank_method=RankMethod.PROBABILISTIC))
    assert fields_equal(report.field, FieldDesc.of([k1, k2, eB]))
