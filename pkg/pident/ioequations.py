# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
"""
Input-output equations of an ODE model: the monic characteristic
presentation of the model's differential ideal restricted to outputs and
inputs, and the decomposition of each equation into monomials and
coefficients.
"""
from dataclasses import dataclass
from typing import Optional

from sympy.polys.fields import FracElement
from sympy.polys.rings import PolyElement

from pident.algebra import (
    IdealGens,
    format_polynomial,
    groebner,
    is_constant,
    polynomial_ring,
    symbol_names,
)
from pident.common import ProlongationBudgetError, SelfCheckError, Settings, log
from pident.differential import (
    AutoreducedSet,
    Comparison,
    DiffRing,
    Ranking,
    characteristic_set,
    compare_autoreduced,
    strip_factors,
)
from pident.model import JetPoint, ODEModel

_SATURATION_SYMBOL = "%w"


@dataclass(frozen=True)
class EquationTerms:
    """
    Decomposition ``p = c_1*f_1 + ... + c_s*f_s + f_{s+1}`` of a monic
    equation into monomials ``f_i`` with nonconstant coefficients ``c_i``
    and the part ``f_{s+1}`` collecting all terms with rational coefficients.
    """

    monomials: tuple[PolyElement, ...]
    coefficients: tuple[FracElement, ...]
    rest: PolyElement

    @property
    def s(self) -> int:
        return len(self.monomials)

    @property
    def all_monomials(self) -> tuple[PolyElement, ...]:
        return self.monomials + (self.rest,)


@dataclass(frozen=True)
class IOEquations:
    """
    Input-output equations sorted by decreasing rank of their leaders.
    :py:attr:`polynomials` are the equations in :py:attr:`DiffRing.ring` and
    :py:attr:`monic` the same equations normalized over the parameter field.
    """

    model: ODEModel
    diff_ring: DiffRing
    characteristic_set: AutoreducedSet
    depth: int

    @property
    def ranking(self) -> Ranking:
        return self.diff_ring.ranking

    @property
    def polynomials(self) -> tuple[PolyElement, ...]:
        return tuple(reversed(self.characteristic_set.elements))

    @property
    def monic(self) -> tuple[PolyElement, ...]:
        return tuple(self.diff_ring.to_monic(p) for p in self.polynomials)

    def formatted(self) -> list[str]:
        return [format_polynomial(p) for p in self.monic]

    def with_jet_cap(self, jet_cap: int) -> "IOEquations":
        """The same equations in a :py:class:`DiffRing` with jets up to ``jet_cap``."""
        if jet_cap <= self.diff_ring.jet_cap:
            return self
        diff_ring = DiffRing(self.ranking, jet_cap, self.diff_ring.params)
        elements = tuple(element.set_ring(diff_ring.ring) for element in self.characteristic_set)
        return IOEquations(self.model, diff_ring, AutoreducedSet(diff_ring, elements), self.depth)

    def __len__(self):
        return len(self.characteristic_set)


def _eliminant(model: ODEModel, diff_ring: DiffRing, jet_point: JetPoint, depth: int, budget) -> list[PolyElement]:
    """
    Generators of the polynomial relations between output and input jets up
    to order ``depth``, obtained by eliminating the states from the
    prolonged output equations.
    """
    eliminated_names = list(model.states)
    jets = [jet for jet in diff_ring.jets if jet.order <= depth]
    numerators_and_denominators = []
    for jet in jets:
        if jet.base in model.outputs:
            value = jet_point.value(jet)
            numerators_and_denominators.append((jet, value.numer, value.denom))
    denominator_lcm = jet_point.field.ring.one
    for _, _, denominator in numerators_and_denominators:
        denominator_lcm = denominator_lcm.lcm(denominator)
    if not denominator_lcm.is_ground:
        eliminated_names.append(_SATURATION_SYMBOL)
    ring = polynomial_ring(
        eliminated_names + [jet.name for jet in jets] + list(model.params),
        blocks=(("grevlex", len(eliminated_names)), ("lex", len(jets)), ("grevlex", len(model.params))),
    )
    gens = dict(zip(symbol_names(ring), ring.gens))
    generators = [
        gens[jet.name] * denominator.set_ring(ring) - numerator.set_ring(ring)
        for jet, numerator, denominator in numerators_and_denominators
    ]
    if not denominator_lcm.is_ground:
        generators.append(gens[_SATURATION_SYMBOL] * denominator_lcm.set_ring(ring) - 1)
    basis = groebner(IdealGens(ring, tuple(generators)), budget)
    eliminated_count = len(eliminated_names)
    result = [
        g.set_ring(diff_ring.ring)
        for g in basis.gens
        if all(not any(monomial[:eliminated_count]) for monomial in g.itermonoms())
    ]
    log.debug("eliminant at depth %d has %d of %d basis elements", depth, len(result), len(basis.gens))
    return result


def _candidate(model: ODEModel, diff_ring: DiffRing, jet_point: JetPoint, depth: int, budget):
    eliminant = _eliminant(model, diff_ring, jet_point, depth, budget)
    return eliminant, strip_factors(characteristic_set(diff_ring, eliminant, budget))


def _vanishes(candidate: AutoreducedSet, jet_point: JetPoint) -> bool:
    return all(not jet_point.substitute(element, candidate.diff_ring) for element in candidate.elements)


def _reduces_to_zero(candidate: AutoreducedSet, eliminant: list[PolyElement]) -> bool:
    return all(not candidate.diff_ring.ritt_reduce(f, candidate)[0] for f in eliminant)


def io_equations(model: ODEModel, ranking: Optional[Ranking] = None, settings: Settings = Settings()) -> IOEquations:
    """
    Input-output equations of ``model`` with respect to ``ranking`` (default:
    outputs above inputs, orderly in each block). The prolongation depth
    starts at the number of states and increases until the candidate is
    verified: it is autoreduced, vanishes on the model, reduces all
    eliminated relations to 0 and has the same rank one order deeper.
    """
    if ranking is None:
        ranking = Ranking.default(model.outputs, model.inputs)
    ranking.check_covers(model.outputs + model.inputs)
    state_count = len(model.states)
    jet_cap = settings.jet_cap_for(state_count)
    max_depth = min(settings.max_prolongation_for(state_count), jet_cap - 1)
    diff_ring = DiffRing(ranking, jet_cap, model.params)
    jet_point = JetPoint(model, jet_cap)
    budget = settings.budget
    depth = state_count
    log.info('computing input-output equations of "%s" with ranking %s', model.name, ranking.descriptor)
    if max_depth < state_count:
        raise ProlongationBudgetError(
            f"prolongation budget exhausted: maximum depth {max_depth} is below the number of states {state_count}"
        )
    eliminant, candidate = _candidate(model, diff_ring, jet_point, depth, budget)
    while True:
        budget.check()
        next_eliminant, next_candidate = _candidate(model, diff_ring, jet_point, depth + 1, budget)
        is_stable = compare_autoreduced(candidate, next_candidate) == Comparison.EQUAL
        log.debug(
            "candidate at depth %d: %s; %s at depth %d",
            depth,
            candidate.formatted(),
            "stable" if is_stable else "not stable",
            depth + 1,
        )
        if is_stable:
            if not _vanishes(candidate, jet_point):
                raise SelfCheckError(
                    f"input-output candidate at depth {depth} does not vanish on the model: {candidate.formatted()}"
                )
            if not _reduces_to_zero(candidate, eliminant):
                raise SelfCheckError(
                    f"input-output candidate at depth {depth} does not reduce all relations: {candidate.formatted()}"
                )
            result = IOEquations(model, diff_ring, candidate, depth)
            log.info("found %d input-output equations at depth %d", len(result), depth)
            return result
        depth += 1
        if depth > max_depth:
            raise ProlongationBudgetError(
                f"prolongation budget exhausted: input-output equations could not be verified up to depth {max_depth}",
                [format_polynomial(diff_ring.to_monic(p)) for p in reversed(next_candidate.elements)],
            )
        eliminant, candidate = next_eliminant, next_candidate


def decompose(equations: IOEquations) -> list[EquationTerms]:
    """
    Split every monic equation into the monomials with nonconstant
    coefficients and the sum of all terms with rational coefficients. The
    monomials are sorted by decreasing monomial order.
    """
    diff_ring = equations.diff_ring
    param_padding = (0,) * len(diff_ring.params)
    result = []
    for monic in equations.monic:
        monomials = []
        coefficients = []
        rest_terms = {}
        for jet_monomial, coefficient in monic.terms():
            monomial = jet_monomial + param_padding
            if is_constant(coefficient):
                rest_terms[monomial] = _rational(coefficient)
            else:
                monomials.append(diff_ring.ring.from_dict({monomial: 1}))
                coefficients.append(coefficient)
        result.append(EquationTerms(tuple(monomials), tuple(coefficients), diff_ring.ring.from_dict(rest_terms)))
    return result


def _rational(coefficient):
    if isinstance(coefficient, FracElement):
        return coefficient.numer.LC / coefficient.denom.LC
    return coefficient
