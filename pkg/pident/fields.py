# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
"""
Finitely generated subfields of rational function fields over ℚ:
membership, intersection and equality.
"""
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Optional

from sympy.polys.domains import QQ
from sympy.polys.fields import FracElement, FracField
from sympy.polys.rings import PolyElement, PolyRing

from pident.algebra import (
    IdealGens,
    eliminate,
    format_ratfunc,
    groebner,
    ideals_equal,
    is_constant,
    occurring_symbols,
    polynomial_ring,
    ratfunc_in,
    rational_function_field,
    symbol_names,
)
from pident.common import UNLIMITED_TIME_BUDGET, Budget, BudgetExhaustedError, PidentError, SelfCheckError, log

_SATURATION_SYMBOL = "%w"


def _tag(name: str) -> str:
    return f"%V_{name}"


@dataclass(frozen=True)
class FieldDesc:
    """
    Subfield of ``ℚ(ambient)`` generated by ``generators``. Constant
    generators are dropped and duplicates removed, so ``ℚ`` itself has no
    generators.

    With ``relations``, the ambient is the fraction field of
    ``ℚ[ambient]/(relations)`` instead, which requires the relations to
    generate a prime ideal. Generators then only stand for their residue
    classes.
    """

    ambient: tuple[str, ...]
    generators: tuple[FracElement, ...] = ()
    relations: tuple[PolyElement, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ambient", tuple(self.ambient))
        field = self.field
        cleaned = []
        for generator in self.generators:
            generator = ratfunc_in(generator, field)
            if not is_constant(generator) and generator not in cleaned:
                cleaned.append(generator)
        object.__setattr__(self, "generators", tuple(cleaned))
        object.__setattr__(
            self, "relations", tuple(relation.set_ring(field.ring) for relation in self.relations if relation)
        )

    @classmethod
    def of(
        cls,
        generators: Sequence[FracElement],
        ambient: Optional[Sequence[str]] = None,
        relations: Sequence[PolyElement] = (),
    ) -> "FieldDesc":
        """Field generated by ``generators`` inside the union of their fields or ``ambient``."""
        if ambient is None:
            ambient = []
            for value in list(generators) + list(relations):
                for name in symbol_names(value.field if isinstance(value, FracElement) else value.ring):
                    if name not in ambient:
                        ambient.append(name)
        return cls(tuple(ambient), tuple(generators), tuple(relations))

    @classmethod
    def rationals(cls) -> "FieldDesc":
        return cls(())

    @property
    def field(self) -> FracField:
        """The ambient rational function field."""
        return rational_function_field(self.ambient)

    @property
    def is_rationals(self) -> bool:
        return not self.generators

    def formatted(self) -> list[str]:
        return [format_ratfunc(generator) for generator in self.generators]

    def __len__(self):
        return len(self.generators)

    def __str__(self):
        return "QQ(" + ", ".join(self.formatted()) + ")"


def _unified_ambient(*ambients: Iterable[str]) -> tuple[str, ...]:
    result = []
    for ambient in ambients:
        for name in ambient:
            if name not in result:
                result.append(name)
    return tuple(result)


def _numerator_and_denominator_in(value: FracElement, ring: PolyRing) -> tuple[PolyElement, PolyElement]:
    return value.numer.set_ring(ring), value.denom.set_ring(ring)


def member(value: FracElement, field_desc: FieldDesc, budget: Budget = UNLIMITED_TIME_BUDGET) -> bool:
    """
    True if ``value`` is a rational function of the generators of
    ``field_desc``. The generators ``g_i`` and ``value`` get tag variables
    ``T_i`` and ``T_0``; after eliminating the ambient variables from
    ``den(g_i)*T_i - num(g_i)``, ``den(value)*T_0 - num(value)`` (saturated
    at the denominators), ``value`` is a member if and only if the basis
    contains an element that is linear in ``T_0`` with a coefficient that
    is no relation between the ``T_i`` alone. The relations of
    ``field_desc`` join the ideal unchanged.
    """
    ambient = _unified_ambient(field_desc.ambient, symbol_names(value.field))
    field = rational_function_field(ambient)
    value = ratfunc_in(value, field)
    if is_constant(value):
        return True
    generators = [ratfunc_in(generator, field) for generator in field_desc.generators]
    relations = [relation.set_ring(field.ring) for relation in field_desc.relations]
    if not generators and not relations:
        return False
    variables = occurring_symbols([value] + generators + [field.new(relation) for relation in relations])
    tags = [f"%T{index}" for index in range(len(generators) + 1)]
    ring = polynomial_ring(
        variables + [_SATURATION_SYMBOL] + tags,
        QQ,
        (("grevlex", len(variables) + 1), ("grevlex", 1), ("grevlex", len(generators))),
    )
    gens = dict(zip(symbol_names(ring), ring.gens))
    polynomials = [relation.set_ring(ring) for relation in relations]
    denominator_product = ring.one
    for tag, element in zip(tags, [value] + generators):
        numerator, denominator = _numerator_and_denominator_in(element, ring)
        polynomials.append(denominator * gens[tag] - numerator)
        denominator_product *= denominator
    if not denominator_product.is_ground:
        polynomials.append(gens[_SATURATION_SYMBOL] * denominator_product - 1)
    basis = eliminate(IdealGens(ring, tuple(polynomials)), variables + [_SATURATION_SYMBOL], budget)
    value_tag_index = 0
    tag_relations = [g for g in basis.gens if g.degree(value_tag_index) <= 0]
    for g in basis.gens:
        if g.degree(value_tag_index) == 1:
            coefficient = g.coeff_wrt(value_tag_index, 1)
            remainder = coefficient.rem(tag_relations) if tag_relations else coefficient
            if remainder:
                return True
    return False


def fields_equal(first: FieldDesc, second: FieldDesc, budget: Budget = UNLIMITED_TIME_BUDGET) -> bool:
    return all(member(generator, second, budget) for generator in first.generators) and all(
        member(generator, first, budget) for generator in second.generators
    )


def is_subfield(first: FieldDesc, second: FieldDesc, budget: Budget = UNLIMITED_TIME_BUDGET) -> bool:
    return all(member(generator, second, budget) for generator in first.generators)


class _IntersectionContext:
    """
    Polynomial rings for ideals in ``K[Z]`` with ``K = ℚ(variables)`` and
    one tag ``Z_i`` per variable.
    """

    def __init__(self, variables: Sequence[str], budget: Budget):
        self.variables = list(variables)
        self.budget = budget
        self.coefficient_field = rational_function_field(tuple(self.variables))
        self.domain = self.coefficient_field.to_domain()
        self.z_names = [f"%Z{index}" for index in range(1, len(self.variables) + 1)]
        self.z_ring = polynomial_ring(self.z_names, self.domain)
        self.v_names = [_tag(name) for name in self.variables]
        self.contraction_ring = polynomial_ring(
            self.v_names + [_SATURATION_SYMBOL] + self.z_names,
            self.domain,
            (("grevlex", len(self.v_names) + 1), ("grevlex", len(self.z_names))),
        )
        self._coefficient_ring = self.coefficient_field.ring

    def point_ideal(self) -> IdealGens:
        """The ideal ``(Z_1 - v_1, ..., Z_r - v_r)``."""
        gens = [z - self.z_ring(v) for z, v in zip(self.z_ring.gens, self.coefficient_field.gens)]
        return IdealGens(self.z_ring, tuple(gens))

    def _tagged(self, polynomial: PolyElement) -> PolyElement:
        """``polynomial(v)`` as ``polynomial(V)`` in the contraction ring."""
        ring = self.contraction_ring
        width = ring.ngens
        terms = {}
        for monomial, coefficient in polynomial.iterterms():
            terms[tuple(monomial) + (0,) * (width - len(monomial))] = coefficient
        return ring.from_dict(terms, QQ)

    def _z_polynomial_with_tagged_coefficients(self, f: PolyElement) -> tuple[PolyElement, PolyElement]:
        """``f`` with coefficients ``c(v)`` replaced by ``c(V)`` after clearing the denominators ``d(V)``."""
        ring = self.contraction_ring
        z_offset = len(self.v_names) + 1
        denominator = self._coefficient_ring.one
        for coefficient in f.itercoeffs():
            denominator = denominator.lcm(coefficient.denom)
        result = ring.zero
        for monomial, coefficient in f.iterterms():
            numerator = coefficient.numer * denominator.exquo(coefficient.denom)
            z_monomial = (0,) * z_offset + tuple(monomial)
            result += self._tagged(numerator).mul_monom(z_monomial)
        return result, self._tagged(denominator)

    def contract(self, ideal: IdealGens, generators: Sequence[FracElement]) -> IdealGens:
        """
        Ideal of ``K[Z]`` generated by the elements of ``ideal`` whose
        coefficients are in the field generated by ``generators``.
        """
        if ideal.is_zero or ideal.is_unit:
            return ideal
        ring = self.contraction_ring
        gens = dict(zip(symbol_names(ring), ring.gens))
        polynomials = []
        denominator_product = ring.one
        for f in ideal.gens:
            polynomial, denominator = self._z_polynomial_with_tagged_coefficients(f)
            polynomials.append(polynomial)
            denominator_product *= denominator
        for generator in generators:
            numerator = self._tagged(generator.numer)
            denominator = self._tagged(generator.denom)
            polynomials.append(denominator * ring(generator) - numerator)
            denominator_product *= denominator
        if not denominator_product.is_ground:
            polynomials.append(gens[_SATURATION_SYMBOL] * denominator_product - 1)
        eliminated = eliminate(
            IdealGens(ring, tuple(polynomials)), self.v_names + [_SATURATION_SYMBOL], self.budget
        )
        return IdealGens(self.z_ring, tuple(g.set_ring(self.z_ring) for g in eliminated.gens))

    def coefficients(self, ideal: IdealGens) -> list[FracElement]:
        result = []
        for g in groebner(ideal, self.budget).gens:
            for coefficient in g.itercoeffs():
                result.append(self.coefficient_field(coefficient))
        return result


def intersect(
    first: FieldDesc,
    second: FieldDesc,
    budget: Budget = UNLIMITED_TIME_BUDGET,
    trace: Optional[list[tuple[str, IdealGens]]] = None,
) -> FieldDesc:
    """
    Generators of the intersection of two fields, at least one of which has
    to be algebraically closed in the ambient field. Starting at the ideal of
    the generic point, the ideal is alternately contracted to polynomials
    with coefficients in ``first`` and in ``second`` until it stabilizes;
    the coefficients of its reduced Gröbner basis generate the intersection.
    Every ideal of the chain is appended to ``trace`` if given.
    """
    if first.relations or second.relations:
        raise PidentError("cannot intersect fields with relations")
    ambient = _unified_ambient(first.ambient, second.ambient)
    if first.is_rationals or second.is_rationals:
        return FieldDesc(ambient)
    field = rational_function_field(ambient)
    first_generators = [ratfunc_in(generator, field) for generator in first.generators]
    second_generators = [ratfunc_in(generator, field) for generator in second.generators]
    variables = occurring_symbols(first_generators + second_generators)
    context = _IntersectionContext(variables, budget)
    first_generators = [ratfunc_in(generator, context.coefficient_field) for generator in first_generators]
    second_generators = [ratfunc_in(generator, context.coefficient_field) for generator in second_generators]

    def traced(label: str, ideal: IdealGens) -> IdealGens:
        ideal = groebner(ideal, budget)
        log.debug("intersection ideal %s = %s", label, ideal)
        if trace is not None:
            trace.append((label, ideal))
        return ideal

    max_iterations = len(variables) + 1
    i_ideal = traced("P", context.point_ideal())
    j_ideal = traced("J1", context.contract(i_ideal, first_generators))
    result = None
    for iteration in range(2, max_iterations + 2):
        budget.check()
        next_i_ideal = traced(f"I{iteration}", context.contract(j_ideal, second_generators))
        if ideals_equal(next_i_ideal, j_ideal, budget):
            result = next_i_ideal
            break
        next_j_ideal = traced(f"J{iteration}", context.contract(next_i_ideal, first_generators))
        if ideals_equal(next_j_ideal, next_i_ideal, budget):
            result = next_j_ideal
            break
        j_ideal = next_j_ideal
    if result is None:
        raise BudgetExhaustedError(f"intersection did not stabilize within {max_iterations} iterations")
    intersection = FieldDesc(ambient, tuple(context.coefficients(result)))
    for generator in intersection.generators:
        if not member(generator, first, budget) or not member(generator, second, budget):
            raise SelfCheckError(
                f"intersection generator {format_ratfunc(generator)} is not in both fields {first} and {second}"
            )
    return intersection
