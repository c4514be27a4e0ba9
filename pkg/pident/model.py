# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
"""
Rational ODE models with parameters, inputs and outputs, their model file
format and the substitution of output derivatives by rational functions of
states, parameters and input derivatives.
"""
import re
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Optional

from sympy.polys.fields import FracElement, FracField
from sympy.polys.polyerrors import GeneratorsError
from sympy.polys.rings import PolyElement

from pident.algebra import format_ratfunc, rational_function_field, symbol_names
from pident.common import ExpressionError, JetOverflowError, ModelSemanticError, ModelSyntaxError, PidentError
from pident.differential import DiffRing, DiffVar
from pident.expression import parse_expression

#: Name of a model, state, parameter, input or output.
NAME_PATTERN = r"[A-Za-z_][A-Za-z0-9_]*(?:#[0-9]+)?"

_NAME_REGEX = re.compile(rf"{NAME_PATTERN}$")
_COMMENT_REGEX = re.compile(r"(?<![A-Za-z0-9_])#.*$|#(?![0-9]).*$")
_HEADER_REGEX = re.compile(rf"model\s+(?P<name>{NAME_PATTERN})\s*$")
_SECTION_REGEX = re.compile(r"(?P<section>states|params|inputs)\s*:(?P<names>.*)$")
_EQUATION_REGEX = re.compile(rf"(?P<name>{NAME_PATTERN})(?P<prime>')?\s*=(?P<expression>.*)$")


@dataclass(frozen=True)
class ODEModel:
    """
    System ``x' = f(x, params, inputs)``, ``y = g(x, params, inputs)`` with
    rational right hand sides in :py:attr:`field`.
    """

    name: str
    states: tuple[str, ...]
    params: tuple[str, ...]
    inputs: tuple[str, ...]
    state_equations: tuple[FracElement, ...]
    outputs: tuple[str, ...]
    output_equations: tuple[FracElement, ...]

    def __post_init__(self):
        if not _NAME_REGEX.match(self.name):
            raise ModelSemanticError(f"model name must be an identifier but is: {self.name!r}")
        seen = set()
        for kind, names in (
            ("state", self.states),
            ("parameter", self.params),
            ("input", self.inputs),
            ("output", self.outputs),
        ):
            for name in names:
                if not _NAME_REGEX.match(name):
                    raise ModelSemanticError(f"{kind} name must be an identifier but is: {name!r}")
                if name in seen:
                    raise ModelSemanticError(f'{kind} "{name}" clashes with an earlier declaration')
                seen.add(name)
        if not self.states:
            raise ModelSemanticError(f'model "{self.name}" must have at least one state')
        if not self.outputs:
            raise ModelSemanticError(f'model "{self.name}" must have at least one output')
        if len(self.state_equations) != len(self.states):
            raise ModelSemanticError(
                f"model must have {len(self.states)} state equations but has {len(self.state_equations)}"
            )
        if len(self.output_equations) != len(self.outputs):
            raise ModelSemanticError(
                f"model must have {len(self.outputs)} output equations but has {len(self.output_equations)}"
            )
        field = self.field
        object.__setattr__(self, "state_equations", tuple(_in_field(rhs, field) for rhs in self.state_equations))
        object.__setattr__(self, "output_equations", tuple(_in_field(rhs, field) for rhs in self.output_equations))

    @property
    def field(self) -> FracField:
        """Field ``ℚ(states, params, inputs)`` of all right hand sides."""
        return rational_function_field(self.states + self.params + self.inputs)

    def state_rhs(self, state: str) -> FracElement:
        return self.state_equations[self.states.index(state)]

    def output_rhs(self, output: str) -> FracElement:
        return self.output_equations[self.outputs.index(output)]

    def common_denominator(self) -> tuple[list[PolyElement], list[PolyElement], PolyElement]:
        """
        Numerators ``F`` of the state equations, ``G`` of the output
        equations and their common denominator ``Q``.
        """
        equations = self.state_equations + self.output_equations
        denominator = self.field.ring.one
        for rhs in equations:
            denominator = denominator.lcm(rhs.denom)
        numerators = [rhs.numer * denominator.exquo(rhs.denom) for rhs in equations]
        state_count = len(self.states)
        return numerators[:state_count], numerators[state_count:], denominator


def _in_field(value: FracElement, field: FracField) -> FracElement:
    try:
        return value.set_field(field)
    except GeneratorsError as error:
        raise ModelSemanticError(f"right hand side must only use states, parameters and inputs: {error}") from error


def _names(text: str, line_number: int, column: int, source: Optional[str]) -> tuple[str, ...]:
    result = []
    offset = 0
    for part in text.split(","):
        name = part.strip()
        name_column = column + offset + len(part) - len(part.lstrip())
        if not name:
            if text.strip():
                raise ModelSyntaxError(line_number, name_column, "name must not be empty", source)
        elif not _NAME_REGEX.match(name):
            raise ModelSyntaxError(line_number, name_column, f"name must be an identifier but is: {name!r}", source)
        else:
            result.append(name)
        offset += len(part) + 1
    return tuple(result)


def parse_model(text: str, source: Optional[str] = None) -> ODEModel:
    """
    Model described by ``text`` in the model file format, for example:

    >>> model = parse_model('''
    ... model decay
    ... states: x
    ... params: k
    ... x' = -k*x
    ... y = x
    ... ''')
    >>> model.states, model.outputs
    (('x',), ('y',))
    """
    name = None
    section_to_names: dict[str, tuple[str, ...]] = {}
    state_to_equation: dict[str, tuple[int, int, str]] = {}
    output_to_equation: dict[str, tuple[int, int, str]] = {}
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = _COMMENT_REGEX.sub("", raw_line).rstrip()
        stripped = line.lstrip()
        if not stripped:
            continue
        column = len(line) - len(stripped) + 1
        if name is None:
            header_match = _HEADER_REGEX.match(stripped)
            if header_match is None:
                raise ModelSyntaxError(line_number, column, 'model must start with "model <name>"', source)
            name = header_match.group("name")
            continue
        section_match = _SECTION_REGEX.match(stripped)
        if section_match is not None:
            section = section_match.group("section")
            if section in section_to_names:
                raise ModelSyntaxError(line_number, column, f'section "{section}:" must occur only once', source)
            if state_to_equation or output_to_equation:
                raise ModelSyntaxError(
                    line_number, column, f'section "{section}:" must precede all equations', source
                )
            names_column = column + section_match.start("names")
            section_to_names[section] = _names(section_match.group("names"), line_number, names_column, source)
            continue
        equation_match = _EQUATION_REGEX.match(stripped)
        if equation_match is None:
            raise ModelSyntaxError(
                line_number, column, "line must be a section, \"<state>' = <expr>\" or \"<output> = <expr>\"", source
            )
        equation_name = equation_match.group("name")
        expression_column = column + equation_match.start("expression")
        equation = (line_number, expression_column, equation_match.group("expression"))
        target = state_to_equation if equation_match.group("prime") else output_to_equation
        if equation_name in state_to_equation or equation_name in output_to_equation:
            raise ModelSemanticError(f'{source or "model"}:{line_number}: duplicate equation for "{equation_name}"')
        target[equation_name] = equation
    if name is None:
        raise ModelSyntaxError(1, 1, 'model must start with "model <name>"', source)
    for required_section in ("states", "params"):
        if required_section not in section_to_names:
            raise ModelSemanticError(f'model "{name}" must declare section "{required_section}:"')
    states = section_to_names["states"]
    params = section_to_names["params"]
    inputs = section_to_names.get("inputs", ())
    declared = states + params + inputs
    for index, declared_name in enumerate(declared):
        if declared_name in declared[:index]:
            raise ModelSemanticError(f'"{declared_name}" clashes with an earlier declaration')
    for state_name in state_to_equation:
        if state_name not in states:
            raise ModelSemanticError(f'derivative of "{state_name}" requires it to be declared as state')
    missing_states = [state for state in states if state not in state_to_equation]
    if missing_states:
        raise ModelSemanticError(f"every state needs an equation; missing: {', '.join(missing_states)}")
    for output_name in output_to_equation:
        if output_name in states + params + inputs:
            raise ModelSemanticError(f'output "{output_name}" clashes with a declared name')
    field = rational_function_field(states + params + inputs)
    state_equations = tuple(_parsed_rhs(*state_to_equation[state], field, source) for state in states)
    outputs = tuple(output_to_equation)
    output_equations = tuple(_parsed_rhs(*output_to_equation[output], field, source) for output in outputs)
    return ODEModel(name, states, params, inputs, state_equations, outputs, output_equations)


def _parsed_rhs(line_number: int, column: int, text: str, field: FracField, source: Optional[str]) -> FracElement:
    try:
        return parse_expression(text, field)
    except ExpressionError as error:
        error_column = column + error.column - 1
        if error.semantic:
            raise ModelSemanticError(
                f"{source or 'model'}:{line_number}:{error_column}: {error.base_message}"
            ) from error
        raise ModelSyntaxError(line_number, error_column, error.base_message, source) from error


def read_model(path) -> ODEModel:
    with open(path, encoding="utf-8") as model_file:
        return parse_model(model_file.read(), str(path))


def format_model(model: ODEModel) -> str:
    """Canonical model file text; :py:func:`parse_model` reads it back to an equal model."""
    lines = [
        f"model {model.name}",
        f"states: {', '.join(model.states)}",
        f"params: {', '.join(model.params)}".rstrip(),
    ]
    if model.inputs:
        lines.append(f"inputs: {', '.join(model.inputs)}")
    lines.extend(f"{state}' = {format_ratfunc(rhs)}" for state, rhs in zip(model.states, model.state_equations))
    lines.extend(f"{output} = {format_ratfunc(rhs)}" for output, rhs in zip(model.outputs, model.output_equations))
    return "\n".join(lines) + "\n"


def _input_jet_names(inputs: Iterable[str], jet_cap: int) -> list[str]:
    return [DiffVar(name, order).name for name in inputs for order in range(jet_cap + 1)]


def jet_field(model: ODEModel, jet_cap: int) -> FracField:
    """Field ``ℚ(states, params, input jets)`` in which output derivatives are expressed."""
    return rational_function_field(model.states + model.params + tuple(_input_jet_names(model.inputs, jet_cap)))


def total_derivative(value: FracElement, model: ODEModel, jet_cap: int) -> FracElement:
    """
    Derivative of ``value`` along the model: states are differentiated by
    their equations and the input jet ``u^(k)`` by ``u^(k+1)``.
    """
    field = jet_field(model, jet_cap)
    value = value.set_field(field)
    gens = dict(zip(symbol_names(field), field.gens))
    result = field.zero
    for state, rhs in zip(model.states, model.state_equations):
        partial = value.diff(gens[state])
        if partial:
            result += partial * rhs.set_field(field)
    for input_name in model.inputs:
        for order in range(jet_cap + 1):
            partial = value.diff(gens[DiffVar(input_name, order).name])
            if not partial:
                continue
            if order == jet_cap:
                raise JetOverflowError(
                    f"derivative of {DiffVar(input_name, order)} exceeds jet cap {jet_cap}; consider a larger --jet-cap"
                )
            result += partial * gens[DiffVar(input_name, order + 1).name]
    return result


class JetPoint:
    """
    Output derivatives ``y^(k)`` expressed as rational functions of states,
    parameters and input jets by repeated total differentiation.
    """

    def __init__(self, model: ODEModel, jet_cap: int):
        self.model = model
        self.jet_cap = jet_cap
        self.field = jet_field(model, jet_cap)
        self._gens = dict(zip(symbol_names(self.field), self.field.gens))
        self._values: dict[DiffVar, FracElement] = {
            DiffVar(output): rhs.set_field(self.field) for output, rhs in zip(model.outputs, model.output_equations)
        }

    def value(self, variable: DiffVar) -> FracElement:
        if variable.order > self.jet_cap:
            raise JetOverflowError(f"derivative {variable} exceeds jet cap {self.jet_cap}; consider a larger --jet-cap")
        if variable.base in self.model.inputs:
            return self._gens[variable.name]
        result = self._values.get(variable)
        if result is None:
            if variable.base not in self.model.outputs:
                raise PidentError(f"cannot substitute unknown differential variable: {variable}")
            previous = self.value(DiffVar(variable.base, variable.order - 1))
            result = total_derivative(previous, self.model, self.jet_cap)
            self._values[variable] = result
        return result

    def values(self, depth: int) -> dict[DiffVar, FracElement]:
        return {
            DiffVar(name, order): self.value(DiffVar(name, order))
            for name in self.model.outputs + self.model.inputs
            for order in range(depth + 1)
        }

    def substitute(self, f: PolyElement, diff_ring: DiffRing) -> FracElement:
        """Value of the differential polynomial ``f`` modulo the model equations."""
        jet_values = [None] * diff_ring.jet_count
        for jet in diff_ring.occurring_jets(f):
            jet_values[diff_ring.index(jet)] = self.value(jet)
        param_values = [self._gens[param] for param in diff_ring.params]
        powers: dict[tuple[int, int], FracElement] = {}

        def power(index: int, exponent: int) -> FracElement:
            key = (index, exponent)
            result = powers.get(key)
            if result is None:
                base = jet_values[index] if index < diff_ring.jet_count else param_values[index - diff_ring.jet_count]
                result = base**exponent
                powers[key] = result
            return result

        result = self.field.zero
        for monomial, coefficient in f.iterterms():
            term = self.field(coefficient)
            for index, exponent in enumerate(monomial):
                if exponent:
                    term *= power(index, exponent)
            result += term
        return result


def lie_substitute(model: ODEModel, depth: int, jet_cap: Optional[int] = None) -> JetPoint:
    """:py:class:`JetPoint` of ``model`` with all output derivatives up to ``depth`` computed."""
    jet_cap = depth if jet_cap is None else jet_cap
    if depth > jet_cap:
        raise JetOverflowError(f"depth {depth} exceeds jet cap {jet_cap}; consider a larger --jet-cap")
    result = JetPoint(model, jet_cap)
    result.values(depth)
    return result


def _renamed(value: FracElement, target: FracField, name_map: dict[str, str]) -> FracElement:
    source_names = symbol_names(value.field)
    target_names = symbol_names(target)
    index_map = [target_names.index(name_map.get(name, name)) for name in source_names]

    def renamed_polynomial(polynomial: PolyElement) -> PolyElement:
        terms = {}
        for monomial, coefficient in polynomial.iterterms():
            target_monomial = [0] * len(target_names)
            for source_index, exponent in enumerate(monomial):
                target_monomial[index_map[source_index]] += exponent
            terms[tuple(target_monomial)] = coefficient
        return target.ring.from_dict(terms)

    return target.new(renamed_polynomial(value.numer), renamed_polynomial(value.denom))


def copy_name(name: str, experiment: int) -> str:
    """
    Name of ``name`` in experiment ``experiment`` of a replicated model.

    >>> copy_name("x1", 2)
    'x1#2'
    """
    return f"{name}#{experiment}"


def replicate(model: ODEModel, experiment_count: int) -> ODEModel:
    """
    Model of ``experiment_count`` independent experiments that share the
    parameters; states, inputs and outputs of experiment ``i`` get the
    suffix ``#i``.
    """
    if experiment_count < 1:
        raise PidentError(f"number of experiments must be at least 1 but is {experiment_count}")
    experiments = range(1, experiment_count + 1)
    states = tuple(copy_name(state, i) for i in experiments for state in model.states)
    inputs = tuple(copy_name(name, i) for i in experiments for name in model.inputs)
    outputs = tuple(copy_name(output, i) for i in experiments for output in model.outputs)
    target = rational_function_field(states + model.params + inputs)
    state_equations = []
    output_equations = []
    for i in experiments:
        name_map = {name: copy_name(name, i) for name in model.states + model.inputs}
        state_equations.extend(_renamed(rhs, target, name_map) for rhs in model.state_equations)
        output_equations.extend(_renamed(rhs, target, name_map) for rhs in model.output_equations)
    return ODEModel(
        f"{model.name}_x{experiment_count}",
        states,
        model.params,
        inputs,
        tuple(state_equations),
        outputs,
        tuple(output_equations),
    )


def gen_appendix(n: int, h: int) -> ODEModel:
    """
    Benchmark model with ``n`` outputs where ``x1' = c1 + c2*x2 + ... + cn*xn``,
    ``x_i`` has vanishing ``h``-th derivative for ``2 <= i <= h`` (as a chain
    of ``h`` first order states) and is constant for ``i > h``, and ``y_i = x_i``.
    """
    if n < 1 or h < 1:
        raise ModelSemanticError(f"n and h must be at least 1 but are n={n}, h={h}")
    if h > n:
        raise ModelSemanticError(f"h must be at most n but is h={h}, n={n}")
    states = []
    params = tuple(f"c{i}" for i in range(1, n + 1))
    for i in range(1, n + 1):
        states.append(f"x{i}")
        if 2 <= i <= h:
            states.extend(f"x{i}_{k}" for k in range(1, h))
    field = rational_function_field(tuple(states) + params)
    gens = dict(zip(symbol_names(field), field.gens))
    state_to_rhs = {"x1": gens["c1"] + sum((gens[f"c{i}"] * gens[f"x{i}"] for i in range(2, n + 1)), field.zero)}
    for i in range(2, n + 1):
        chain = [f"x{i}"] + ([f"x{i}_{k}" for k in range(1, h)] if i <= h else [])
        for state, next_state in zip(chain, chain[1:]):
            state_to_rhs[state] = gens[next_state]
        state_to_rhs[chain[-1]] = field.zero
    return ODEModel(
        f"appendix_n{n}_h{h}",
        tuple(states),
        params,
        (),
        tuple(state_to_rhs[state] for state in states),
        tuple(f"y{i}" for i in range(1, n + 1)),
        tuple(gens[f"x{i}"] for i in range(1, n + 1)),
    )
