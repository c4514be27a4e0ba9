# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
"""
Identifiability pipeline and its reports: input-output equations, the field
of single-experiment identifiable functions, the multi-experiment field and
the experiment bound.
"""
import json
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from pident.algebra import IdealGens, rational_function_field
from pident.common import BudgetExhaustedError, SelfCheckError, Settings, log
from pident.differential import Ranking
from pident.expression import parse_expression
from pident.fields import FieldDesc, fields_equal, intersect, is_subfield, member
from pident.ioequations import IOEquations, io_equations
from pident.model import JetPoint, ODEModel, copy_name, replicate
from pident.multiexp import MultiExpReport, experiment_bound, multiexp_field
from pident.wronskian import WronskianReport, f_field, wronskian_jet_cap


class ReportScope(Enum):
    """Parts of the pipeline to compute."""

    IO = "io"
    MULTI = "multi"
    FULL = "full"

    @property
    def has_single_experiment(self) -> bool:
        """
        >>> ReportScope.FULL.has_single_experiment
        True
        >>> ReportScope.MULTI.has_single_experiment
        False
        """
        return self == ReportScope.FULL

    @property
    def has_multi_experiment(self) -> bool:
        return self != ReportScope.IO


def parameter_field(model: ODEModel) -> FieldDesc:
    """The field ``ℚ(params)``."""
    field_of_params = rational_function_field(model.params)
    return FieldDesc(model.params, tuple(field_of_params.gens))


@dataclass(frozen=True)
class SingleExperiment:
    equations: IOEquations
    f_field: FieldDesc
    wronskians: WronskianReport
    field: FieldDesc


def single_experiment(
    model: ODEModel,
    ranking: Optional[Ranking] = None,
    settings: Settings = Settings(),
    trace: Optional[list[tuple[str, IdealGens]]] = None,
    equations: Optional[IOEquations] = None,
    jet_point: Optional[JetPoint] = None,
) -> SingleExperiment:
    """
    Field of single-experiment identifiable functions of ``model``: the
    intersection of ``ℚ(params)`` with the field of the input-output
    equations.
    """
    if equations is None:
        equations = io_equations(model, ranking, settings)
    equations_field, wronskians = f_field(equations, jet_point)
    log.info("intersecting parameter field with %s", equations_field)
    result = intersect(parameter_field(model), equations_field, settings.budget, trace)
    log.info('single-experiment identifiable functions of "%s": %s', model.name, result)
    return SingleExperiment(equations, equations_field, wronskians, result)


def _replicated_ranking(ranking: Optional[Ranking], experiment_count: int) -> Optional[Ranking]:
    if ranking is None:
        return None
    return Ranking(
        [copy_name(name, experiment) for name in block]
        for experiment in range(1, experiment_count + 1)
        for block in ranking.blocks
    )


@dataclass(frozen=True)
class ReplicationReport:
    """Single-experiment field of the replicated model compared with the multi-experiment field."""

    experiment_count: int
    model_name: str
    single_experiment: FieldDesc
    multi_experiment: FieldDesc
    is_consistent: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "experiments": self.experiment_count,
            "model": self.model_name,
            "single_experiment": self.single_experiment.formatted(),
            "consistent": self.is_consistent,
        }


def replication_check(
    model: ODEModel,
    settings: Settings = Settings(),
    ranking: Optional[Ranking] = None,
    multi_experiment: Optional[MultiExpReport] = None,
) -> ReplicationReport:
    """
    Single-experiment field of ``model`` replicated as often as the
    experiment bound requires, compared with the multi-experiment field.
    """
    if multi_experiment is None:
        multi_experiment = experiment_bound(io_equations(model, ranking, settings), settings)
    experiment_count = multi_experiment.bound
    state_count = experiment_count * len(model.states)
    if state_count > settings.replication_state_limit:
        raise BudgetExhaustedError(
            f"replicated model would have {state_count} states but the limit is {settings.replication_state_limit}"
        )
    replicated = replicate(model, experiment_count)
    log.info('checking replicated model "%s" with %d experiments', replicated.name, experiment_count)
    replicated_field = single_experiment(replicated, _replicated_ranking(ranking, experiment_count), settings).field
    is_consistent = fields_equal(replicated_field, multi_experiment.field, settings.budget)
    if is_consistent:
        log.info("replicated single-experiment field matches the multi-experiment field")
    else:
        log.warning(
            "replicated single-experiment field %s differs from multi-experiment field %s",
            replicated_field,
            multi_experiment.field,
        )
    return ReplicationReport(experiment_count, replicated.name, replicated_field, multi_experiment.field, is_consistent)


@dataclass
class IdentReport:
    """Results of the pipeline; parts that were not computed are ``None``."""

    model: str
    ranking: list[str]
    io_equations: list[str]
    per_equation: Optional[list[tuple[int, int]]] = None
    f_field: Optional[list[str]] = None
    single_experiment: Optional[list[str]] = None
    multi_experiment: Optional[list[str]] = None
    bound: Optional[int] = None
    meta: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.model,
            "ranking": self.ranking,
            "io_equations": self.io_equations,
            "per_equation": (
                None if self.per_equation is None else [{"s": s, "r": r} for s, r in self.per_equation]
            ),
            "f_field": self.f_field,
            "single_experiment": self.single_experiment,
            "multi_experiment": self.multi_experiment,
            "bound": self.bound,
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        def field_text(generators: list[str]) -> str:
            return "QQ(" + ", ".join(generators) + ")"

        lines = [f"model: {self.model}", f"ranking: {'; '.join(self.ranking)}", "input-output equations:"]
        lines.extend(f"  {equation}" for equation in self.io_equations)
        if self.per_equation is not None:
            pairs = ", ".join(f"({s}, {r})" for s, r in self.per_equation)
            lines.append(f"(s, r) per equation: {pairs}")
        if self.f_field is not None:
            lines.append(f"field of input-output equations: {field_text(self.f_field)}")
        if self.single_experiment is not None:
            lines.append(f"single-experiment identifiable: {field_text(self.single_experiment)}")
        if self.multi_experiment is not None:
            lines.append(f"multi-experiment identifiable: {field_text(self.multi_experiment)}")
        if self.bound is not None:
            lines.append(f"experiment bound: {self.bound}")
        replication = self.meta.get("replication")
        if replication is not None:
            lines.append(
                f"replicated {replication['experiments']} times: {field_text(replication['single_experiment'])}, "
                + ("consistent" if replication["consistent"] else "inconsistent")
            )
        for entry in self.meta.get("trace", []):
            lines.append(f"{entry['label']} = ({', '.join(entry['ideal'])})")
        if self.meta.get("ms") is not None:
            lines.append(f"time: {self.meta['ms']} ms")
        return "\n".join(lines) + "\n"


def _check_single_in_multi(single: FieldDesc, multi: FieldDesc, settings: Settings):
    if not is_subfield(single, multi, settings.budget):
        raise SelfCheckError(f"single-experiment field {single} is not contained in multi-experiment field {multi}")


def _budget_stats(settings: Settings, equations: IOEquations, wronskian_cap: Optional[int]) -> dict[str, Any]:
    budget = settings.budget
    return {
        "max_degree": budget.max_degree,
        "max_basis": budget.max_basis,
        "jet_cap": equations.diff_ring.jet_cap,
        "wronskian_jet_cap": wronskian_cap,
        "depth": equations.depth,
        "largest_degree": budget.usage.largest_degree,
        "largest_basis": budget.usage.largest_basis,
    }


def build_report(
    model: ODEModel,
    scope: ReportScope = ReportScope.FULL,
    ranking: Optional[Ranking] = None,
    settings: Settings = Settings(),
    with_trace: bool = False,
    with_timing: bool = False,
    with_replication: bool = False,
) -> IdentReport:
    start_time = time.monotonic()
    settings = settings.with_budget(settings.budget.with_fresh_usage())
    equations = io_equations(model, ranking, settings)
    result = IdentReport(
        model.name,
        equations.ranking.descriptor,
        equations.formatted(),
        meta={"seed": settings.seed, "method": settings.rank_method.value, "ms": None},
    )
    jet_point = JetPoint(model, wronskian_jet_cap(equations)) if scope.has_multi_experiment else None
    multi_experiment = None
    if scope.has_multi_experiment:
        multi_experiment = experiment_bound(equations, settings, jet_point)
        result.per_equation = list(multi_experiment.per_equation)
        result.multi_experiment = multi_experiment.field.formatted()
        result.bound = multi_experiment.bound
    if scope.has_single_experiment:
        trace: Optional[list[tuple[str, IdealGens]]] = [] if with_trace else None
        single = single_experiment(model, settings=settings, trace=trace, equations=equations, jet_point=jet_point)
        result.f_field = single.f_field.formatted()
        result.single_experiment = single.field.formatted()
        _check_single_in_multi(single.field, multi_experiment.field, settings)
        if trace is not None:
            result.meta["trace"] = [{"label": label, "ideal": ideal.formatted()} for label, ideal in trace]
    if with_replication:
        result.meta["replication"] = replication_check(model, settings, ranking, multi_experiment).to_dict()
    result.meta["budget"] = _budget_stats(settings, equations, None if jet_point is None else jet_point.jet_cap)
    if with_timing:
        result.meta["ms"] = int((time.monotonic() - start_time) * 1000)
    return result


def check_function(
    model: ODEModel,
    text: str,
    multi: bool = False,
    ranking: Optional[Ranking] = None,
    settings: Settings = Settings(),
) -> bool:
    """
    True if the parameter function described by ``text`` is identifiable
    from one experiment or, with ``multi``, from several experiments.
    """
    function = parse_expression(text, rational_function_field(model.params))
    equations = io_equations(model, ranking, settings)
    if multi:
        target = multiexp_field(equations)
    else:
        target = single_experiment(model, settings=settings, equations=equations).field
    result = member(function, target, settings.budget)
    log.info(
        'function "%s" %s %s-experiment identifiable',
        text,
        "is" if result else "is not",
        "multi" if multi else "single",
    )
    return result

