# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
"""
Wronskians of the monomials of input-output equations, the field of
constants generated by their reduced row echelon forms and the Wronskian
ranks that bound the number of experiments.
"""
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Optional

from sympy.polys.fields import FracElement, FracField
from sympy.polys.rings import PolyElement

from pident.algebra import (
    IdealGens,
    Matrix,
    format_polynomial,
    format_ratfunc,
    polynomial_ring,
    rank_probabilistic,
    rank_symbolic,
    ratfunc_in,
    rref,
    saturate,
    symbol_names,
    used_variable_indices,
)
from pident.common import UNLIMITED_TIME_BUDGET, Budget, RankMethod, SelfCheckError, Settings, log
from pident.differential import AutoreducedSet, DiffRing
from pident.fields import FieldDesc, member
from pident.ioequations import IOEquations, decompose
from pident.model import JetPoint, total_derivative

#: Largest number of columns for which a probabilistic rank is compared with the symbolic one.
CROSS_CHECK_COLUMN_LIMIT = 6


@dataclass(frozen=True)
class EquationWronskian:
    """Wronskian of the monomials of one equation and its reduced row echelon form."""

    equation: PolyElement
    monomials: tuple[PolyElement, ...]
    matrix: Matrix
    reduced: Matrix
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def nonleading(self) -> list[FracElement]:
        """Entries of the nonzero rows of :py:attr:`reduced` outside the pivot columns, row by row."""
        column_count = len(self.monomials)
        return [
            self.reduced[row][column]
            for row, pivot in enumerate(self.pivots)
            for column in range(pivot + 1, column_count)
            if column not in self.pivots and self.reduced[row][column]
        ]


@dataclass(frozen=True)
class WronskianReport:
    equations: tuple[EquationWronskian, ...]

    @property
    def ranks(self) -> list[int]:
        return [equation.rank for equation in self.equations]

    def __iter__(self):
        return iter(self.equations)

    def __len__(self):
        return len(self.equations)


def monomials_of(diff_ring: DiffRing, f: PolyElement) -> list[PolyElement]:
    """
    Monomials in the jets of ``f``, an element of :py:attr:`DiffRing.ring`
    or :py:attr:`DiffRing.monic_ring`, sorted by increasing monomial order.
    """
    param_padding = (0,) * len(diff_ring.params)
    jet_monomials = {monomial[: diff_ring.jet_count] for monomial in f.itermonoms()}
    return [
        diff_ring.ring.from_dict({jet_monomial + param_padding: 1})
        for jet_monomial in sorted(jet_monomials, key=diff_ring.monic_ring.order)
    ]


def kernel_vector(diff_ring: DiffRing, monic: PolyElement, monomials: Sequence[PolyElement], field: FracField):
    """Coefficients of the monic equation ``monic`` at ``monomials`` as elements of ``field``."""
    coefficients = dict(monic.iterterms())
    result = []
    for monomial in monomials:
        coefficient = coefficients.get(monomial.LM[: diff_ring.jet_count])
        result.append(field.zero if coefficient is None else ratfunc_in(coefficient, field))
    return result


def _derivatives(diff_ring: DiffRing, f: PolyElement, count: int) -> list[PolyElement]:
    result = [f]
    for _ in range(count - 1):
        result.append(diff_ring.derive(result[-1]))
    return result


def wronskian_with(
    diff_ring: DiffRing, functions: Sequence[PolyElement], evaluate: Callable[[PolyElement], FracElement]
) -> Matrix:
    """Square matrix with entry ``(k, j)`` the evaluated ``k``-th derivative of ``functions[j]``."""
    count = len(functions)
    columns = [[evaluate(derivative) for derivative in _derivatives(diff_ring, f, count)] for f in functions]
    return [[column[row] for column in columns] for row in range(count)]


def wronskian(monomials: Sequence[PolyElement], jet_point: JetPoint, diff_ring: DiffRing) -> Matrix:
    """
    Wronskian of ``monomials`` with the output derivatives replaced by their
    values along the model of ``jet_point``.
    """
    return wronskian_with(diff_ring, monomials, lambda derivative: jet_point.substitute(derivative, diff_ring))


def wronskian_jet_cap(equations: IOEquations) -> int:
    """
    Smallest jet cap at least the one of ``equations`` that allows one
    derivative of every equation per further monomial.
    """
    diff_ring = equations.diff_ring
    result = diff_ring.jet_cap
    for polynomial in equations.polynomials:
        order = max((jet.order for jet in diff_ring.occurring_jets(polynomial)), default=0)
        result = max(result, order + len(monomials_of(diff_ring, polynomial)) - 1)
    return result


def _with_wronskian_jet_cap(equations: IOEquations, jet_point: Optional[JetPoint]) -> tuple[IOEquations, JetPoint]:
    jet_cap = wronskian_jet_cap(equations)
    if jet_point is None or jet_point.jet_cap < jet_cap:
        log.debug("computing Wronskians with jet cap %d", jet_cap)
        jet_point = JetPoint(equations.model, jet_cap)
    return equations.with_jet_cap(jet_point.jet_cap), jet_point


def _check_annihilates(matrix: Matrix, vector: Sequence[FracElement], equation: str):
    for row in matrix:
        value = sum((entry * coefficient for entry, coefficient in zip(row, vector)), vector[0].field.zero)
        if value:
            raise SelfCheckError(
                f"Wronskian does not annihilate the coefficients of {equation}: {format_ratfunc(value)}"
            )


def _check_constant(generator: FracElement, jet_point: JetPoint):
    derivative = total_derivative(generator, jet_point.model, jet_point.jet_cap)
    if derivative:
        raise SelfCheckError(f"field generator {format_ratfunc(generator)} is not constant along the model")


def f_field(equations: IOEquations, jet_point: Optional[JetPoint] = None) -> tuple[FieldDesc, WronskianReport]:
    """
    Field generated by the nonleading entries of the reduced row echelon
    forms of the Wronskians of the monomials of every equation, together
    with the Wronskians themselves. Every Wronskian is checked to annihilate
    the coefficients of its equation and every generator to be constant
    along the model.
    """
    equations, jet_point = _with_wronskian_jet_cap(equations, jet_point)
    diff_ring = equations.diff_ring
    generators = []
    equation_wronskians = []
    for polynomial, monic in zip(equations.polynomials, equations.monic):
        monomials = monomials_of(diff_ring, polynomial)
        matrix = wronskian(monomials, jet_point, diff_ring)
        _check_annihilates(
            matrix, kernel_vector(diff_ring, monic, monomials, jet_point.field), format_polynomial(monic)
        )
        reduced, pivots = rref(matrix)
        equation_wronskian = EquationWronskian(monic, tuple(monomials), matrix, reduced, pivots)
        log.debug(
            "Wronskian of %s has %d columns and rank %d", format_polynomial(monic), len(monomials), len(pivots)
        )
        equation_wronskians.append(equation_wronskian)
        generators.extend(equation_wronskian.nonleading)
    result = FieldDesc(symbol_names(jet_point.field), tuple(generators))
    for generator in result.generators:
        _check_constant(generator, jet_point)
    log.info("field of the input-output equations has %d generators", len(result))
    return result, WronskianReport(tuple(equation_wronskians))


def _reduced_row_echelon(matrix: Matrix, simplify: Callable[[FracElement], FracElement]) -> tuple[Matrix, tuple]:
    """
    Gauss-Jordan elimination in which every entry is passed through
    ``simplify`` so that entries equal to zero in the residue field become 0.
    """
    rows = [[simplify(entry) for entry in row] for row in matrix]
    pivots = []
    pivot_row = 0
    column_count = len(rows[0]) if rows else 0
    for column in range(column_count):
        candidate = next((index for index in range(pivot_row, len(rows)) if rows[index][column]), None)
        if candidate is None:
            continue
        rows[pivot_row], rows[candidate] = rows[candidate], rows[pivot_row]
        pivot = rows[pivot_row][column]
        rows[pivot_row] = [simplify(entry / pivot) for entry in rows[pivot_row]]
        for index, row in enumerate(rows):
            factor = row[column]
            if index != pivot_row and factor:
                rows[index] = [simplify(entry - factor * other) for entry, other in zip(row, rows[pivot_row])]
        pivots.append(column)
        pivot_row += 1
    return rows, tuple(pivots)


def _relations(reduction: AutoreducedSet, budget: Budget) -> list[PolyElement]:
    """Generators of the algebraic ideal of ``reduction`` saturated at its initials and separants."""
    diff_ring = reduction.diff_ring
    elements = list(reduction.elements)
    if not elements:
        return []
    factors = [diff_ring.initial(element) for element in elements] + [
        diff_ring.separant(element) for element in elements
    ]
    names = symbol_names(diff_ring.ring)
    used_names = [names[index] for index in used_variable_indices(elements + factors)]
    ring = polynomial_ring(used_names)
    product = ring.one
    for factor in factors:
        product *= factor.set_ring(ring)
    saturated = saturate(IdealGens(ring, tuple(element.set_ring(ring) for element in elements)), product, budget)
    return list(saturated.gens)


def f_field_from_charset(
    equations: AutoreducedSet, reduction: AutoreducedSet, budget: Budget = UNLIMITED_TIME_BUDGET
) -> FieldDesc:
    """
    Like :py:func:`f_field` for a characteristic set ``equations`` that is
    not derived from a model: the Wronskian entries are Ritt reduced with
    respect to ``reduction``, which has to be the characteristic set of a
    prime differential ideal. The result lives in the residue field of that
    ideal and carries its relations; generators that are rational constants
    there are dropped.
    """
    diff_ring = equations.diff_ring
    field = diff_ring.fraction_field

    def reduced(value: FracElement) -> FracElement:
        if not value:
            return value
        remainder, hpower = diff_ring.ritt_reduce(value.numer.set_ring(diff_ring.ring), reduction)
        if not remainder:
            return field.zero
        return ratfunc_in(remainder, field) / (ratfunc_in(hpower, field) * ratfunc_in(value.denom, field))

    generators = []
    for element in equations.elements:
        monomials = monomials_of(diff_ring, element)
        matrix = wronskian_with(diff_ring, monomials, lambda derivative: ratfunc_in(derivative, field))
        reduced_matrix, pivots = _reduced_row_echelon(matrix, reduced)
        equation_wronskian = EquationWronskian(element, tuple(monomials), matrix, reduced_matrix, pivots)
        log.debug("Wronskian of %s has rank %d", format_polynomial(element), equation_wronskian.rank)
        generators.extend(equation_wronskian.nonleading)
    relations = _relations(reduction, budget)
    constants = FieldDesc(symbol_names(field), (), tuple(relations))
    generators = [generator for generator in generators if not member(generator, constants, budget)]
    return FieldDesc(symbol_names(field), tuple(generators), tuple(relations))


def _rank(matrix: Matrix, settings: Settings) -> int:
    if settings.rank_method == RankMethod.SYMBOLIC:
        return rank_symbolic(matrix)
    result = rank_probabilistic(matrix, settings.seed, settings.trials)
    if len(matrix) <= CROSS_CHECK_COLUMN_LIMIT:
        symbolic_rank = rank_symbolic(matrix)
        if symbolic_rank != result:
            log.warning("probabilistic rank %d differs from symbolic rank %d", result, symbolic_rank)
    return result


def wronskian_ranks(
    equations: IOEquations, settings: Settings = Settings(), jet_point: Optional[JetPoint] = None
) -> list[tuple[int, int]]:
    """
    Pairs ``(s, r)`` per equation with ``s`` the number of monomials with
    nonconstant coefficients and ``r`` the rank of their Wronskian along the
    model; ``r`` is 0 for ``s = 0``.
    """
    equations, jet_point = _with_wronskian_jet_cap(equations, jet_point)
    diff_ring = equations.diff_ring
    result = []
    for terms in decompose(equations):
        settings.budget.check()
        rank = _rank(wronskian(terms.monomials, jet_point, diff_ring), settings) if terms.monomials else 0
        result.append((terms.s, rank))
    log.info("Wronskian ranks (s, r) per equation: %s", result)
    return result
