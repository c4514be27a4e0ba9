# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
"""
Differential polynomials over the parameter field: jets of differential
variables, rankings, leaders, Ritt reduction and autoreduced sets.

A differential polynomial is a :py:class:`sympy.polys.rings.PolyElement` of
:py:attr:`DiffRing.ring`, whose variables are the jets ``y, y', y'', ...``
of the ranked variables up to the jet cap followed by the parameters. The
parameters are constants of the derivation.
"""
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing

from pident.algebra import (
    format_polynomial,
    polynomial_gcd,
    polynomial_ring,
    rational_function_field,
    symbol_names,
)
from pident.common import ConstantPolynomialError, JetOverflowError, ModelSemanticError, PidentError, log
from pident.expression import parse_expression

Rank = tuple[tuple[int, int, int], int]


@dataclass(frozen=True)
class DiffVar:
    """The ``order``-th derivative of the differential variable ``base``."""

    base: str
    order: int = 0

    @property
    def name(self) -> str:
        """
        Name of the jet variable, for example:

        >>> DiffVar("y1", 3).name
        "y1'''"
        """
        return self.base + "'" * self.order

    def derivative(self, times: int = 1) -> "DiffVar":
        return DiffVar(self.base, self.order + times)

    def __str__(self):
        return self.name


class Comparison(Enum):
    LESS = "<"
    EQUAL = "="
    GREATER = ">"


class Ranking:
    """
    Ranking of differential variables given as blocks from high to low.
    Every variable of an earlier block ranks above every derivative of a
    later block. Inside a block the ranking is orderly: higher derivatives
    rank higher, and for equal orders the earlier variable ranks higher.
    """

    def __init__(self, blocks: Iterable[Iterable[str]]):
        self.blocks = tuple(tuple(block) for block in blocks if block)
        if not self.blocks:
            raise PidentError("ranking must contain at least one variable")
        self._name_to_block_and_position = {}
        for block_index, block in enumerate(self.blocks):
            for position, name in enumerate(block):
                if name in self._name_to_block_and_position:
                    raise ModelSemanticError(f'variable "{name}" must occur only once in ranking')
                self._name_to_block_and_position[name] = (block_index, position)

    @classmethod
    def default(cls, outputs: Sequence[str], inputs: Sequence[str] = ()) -> "Ranking":
        """Outputs above inputs, orderly inside each of the two blocks."""
        return cls([outputs, inputs])

    @classmethod
    def elimination(cls, names: Sequence[str]) -> "Ranking":
        """Elimination ranking with ``names`` from high to low."""
        return cls([name] for name in names)

    @classmethod
    def from_text(cls, text: str) -> "Ranking":
        """
        Elimination ranking from a comma separated list.

        >>> Ranking.from_text("y2, y1,y3").descriptor
        ['y2', 'y1', 'y3']
        """
        names = [name.strip() for name in text.split(",")]
        if not all(names):
            raise ModelSemanticError(f"ranking must be a comma separated list of names but is: {text!r}")
        return cls.elimination(names)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(name for block in self.blocks for name in block)

    @property
    def descriptor(self) -> list[str]:
        """One entry per block, orderly blocks as comma separated names."""
        return [",".join(block) for block in self.blocks]

    def check_covers(self, names: Iterable[str]):
        expected = set(names)
        actual = set(self.variables)
        if actual != expected:
            missing = sorted(expected - actual)
            unknown = sorted(actual - expected)
            details = []
            if missing:
                details.append(f"missing: {', '.join(missing)}")
            if unknown:
                details.append(f"unknown: {', '.join(unknown)}")
            raise ModelSemanticError(f"ranking must list every output and input exactly once; {'; '.join(details)}")

    def key(self, variable: DiffVar) -> tuple[int, int, int]:
        """
        Sort key: a larger key means a higher rank.

        >>> ranking = Ranking([["y1", "y2"], ["u"]])
        >>> ranking.key(DiffVar("y2", 1)) > ranking.key(DiffVar("y1", 0))
        True
        >>> ranking.key(DiffVar("y1", 0)) > ranking.key(DiffVar("u", 5))
        True
        """
        block_index, position = self._name_to_block_and_position[variable.base]
        return -block_index, variable.order, -position

    def __eq__(self, other):
        return isinstance(other, Ranking) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return f"{self.__class__.__name__}({[list(block) for block in self.blocks]!r})"


class DiffRing:
    """
    Polynomial ring ``ℚ[jets, params]`` with the jets of all ranked variables
    up to ``jet_cap`` sorted by decreasing rank. The monomial order is lex on
    the jets followed by grevlex on the parameters, so the leading monomial
    of a polynomial starts with its leader.
    """

    def __init__(self, ranking: Ranking, jet_cap: int, params: Sequence[str] = ()):
        if jet_cap < 0:
            raise PidentError(f"jet cap must be at least 0 but is {jet_cap}")
        self.ranking = ranking
        self.jet_cap = jet_cap
        self.params = tuple(params)
        jets = [DiffVar(base, order) for base in ranking.variables for order in range(jet_cap + 1)]
        jets.sort(key=ranking.key, reverse=True)
        self.jets = tuple(jets)
        self.jet_count = len(jets)
        self._jet_to_index = {jet: index for index, jet in enumerate(jets)}
        self.ring = polynomial_ring(
            [jet.name for jet in jets] + list(self.params),
            QQ,
            (("lex", self.jet_count), ("grevlex", len(self.params))),
        )
        self.fraction_field = rational_function_field(symbol_names(self.ring))
        self.coefficient_field = rational_function_field(self.params) if self.params else None
        coefficient_domain = self.coefficient_field.to_domain() if self.params else QQ
        self.monic_ring = PolyRing(self.ring.symbols[: self.jet_count], coefficient_domain, lex)

    def __repr__(self):
        return f"{self.__class__.__name__}({self.ranking!r}, jet_cap={self.jet_cap}, params={self.params!r})"

    def index(self, variable: DiffVar) -> int:
        try:
            return self._jet_to_index[variable]
        except KeyError:
            if variable.base in self.ranking.variables:
                raise JetOverflowError(
                    f"derivative {variable} exceeds jet cap {self.jet_cap}; consider a larger --jet-cap"
                ) from None
            raise PidentError(f"unknown differential variable: {variable}") from None

    def jet(self, variable: DiffVar) -> PolyElement:
        return self.ring.gens[self.index(variable)]

    def param(self, name: str) -> PolyElement:
        return self.ring.gens[self.jet_count + self.params.index(name)]

    def occurring_jets(self, f: PolyElement) -> list[DiffVar]:
        """Jets occurring in ``f`` from high to low rank."""
        used = set()
        for monomial in f.itermonoms():
            used.update(index for index in range(self.jet_count) if monomial[index])
        return [self.jets[index] for index in sorted(used)]

    def derive(self, f: PolyElement, times: int = 1) -> PolyElement:
        """Total derivative with parameters as constants."""
        result = f
        for _ in range(times):
            result = self._derive_once(result)
        return result

    def _derive_once(self, f: PolyElement) -> PolyElement:
        terms: dict[tuple[int, ...], object] = {}
        for monomial, coefficient in f.iterterms():
            for index in range(self.jet_count):
                exponent = monomial[index]
                if not exponent:
                    continue
                derivative_index = self.index(self.jets[index].derivative())
                derived = list(monomial)
                derived[index] -= 1
                derived[derivative_index] += 1
                derived_monomial = tuple(derived)
                terms[derived_monomial] = terms.get(derived_monomial, QQ.zero) + coefficient * exponent
        return self.ring.from_dict({monomial: value for monomial, value in terms.items() if value})

    def leader(self, f: PolyElement) -> DiffVar:
        if f:
            leading_monomial = f.LM
            for index in range(self.jet_count):
                if leading_monomial[index]:
                    return self.jets[index]
        raise ConstantPolynomialError(f"cannot compute leader of constant: {format_polynomial(f)}")

    def degree(self, f: PolyElement, variable: DiffVar) -> int:
        return max(f.degree(self.index(variable)), 0)

    def initial(self, f: PolyElement) -> PolyElement:
        leader = self.leader(f)
        index = self.index(leader)
        return f.coeff_wrt(index, f.degree(index))

    def separant(self, f: PolyElement) -> PolyElement:
        return f.diff(self.jet(self.leader(f)))

    def rank(self, f: PolyElement) -> Rank:
        leader = self.leader(f)
        return self.ranking.key(leader), self.degree(f, leader)

    def is_reduced(self, f: PolyElement, g: PolyElement) -> bool:
        """True if ``f`` is reduced with respect to ``g``."""
        leader = self.leader(g)
        for jet in self.occurring_jets(f):
            if jet.base == leader.base and jet.order > leader.order:
                return False
        return self.degree(f, leader) < self.degree(g, leader)

    def is_autoreduced(self, polynomials: Sequence[PolyElement]) -> bool:
        for index, f in enumerate(polynomials):
            if f.is_ground or not self.occurring_jets(f):
                return False
            for other_index, g in enumerate(polynomials):
                if index != other_index and not self.is_reduced(f, g):
                    return False
        return True

    def ritt_reduce(self, f: PolyElement, autoreduced: "AutoreducedSet") -> tuple[PolyElement, PolyElement]:
        """
        Remainder ``r`` of ``f`` reduced with respect to every element of
        ``autoreduced`` together with ``h``, a product of initials and
        separants, such that ``h*f - r`` is in the differential ideal of
        ``autoreduced``.
        """
        base_to_element = {self.leader(element).base: element for element in autoreduced.elements}
        remainder = f
        hpower = self.ring.one
        while remainder:
            step = self._reduction_step(remainder, base_to_element)
            if step is None:
                break
            jet, divisor, multiplier = step
            index = self.index(jet)
            exponent = remainder.degree(index) - divisor.degree(index) + 1
            remainder = remainder.prem(divisor, index)
            hpower *= multiplier**exponent
        return remainder, hpower

    def _reduction_step(self, f: PolyElement, base_to_element: dict[str, PolyElement]):
        for jet in self.occurring_jets(f):
            element = base_to_element.get(jet.base)
            if element is None:
                continue
            leader = self.leader(element)
            if jet.order > leader.order:
                return jet, self.derive(element, jet.order - leader.order), self.separant(element)
            if jet.order == leader.order and self.degree(f, jet) >= self.degree(element, leader):
                return jet, element, self.initial(element)
        return None

    def param_content(self, f: PolyElement) -> PolyElement:
        """Greatest common divisor of the parameter polynomials that are the coefficients of the jet monomials."""
        coefficients: dict[tuple[int, ...], dict[tuple[int, ...], object]] = {}
        for monomial, coefficient in f.iterterms():
            jet_part = monomial[: self.jet_count]
            param_part = (0,) * self.jet_count + monomial[self.jet_count :]
            coefficients.setdefault(jet_part, {})[param_part] = coefficient
        return polynomial_gcd([self.ring.from_dict(terms) for terms in coefficients.values()])

    def without_param_content(self, f: PolyElement) -> PolyElement:
        if not f:
            return f
        content = self.param_content(f)
        result = f.exquo(content) if not content.is_ground else f
        return result.monic()

    def to_monic(self, f: PolyElement) -> PolyElement:
        """
        ``f`` as a polynomial in the jets over ``ℚ(params)`` divided by the
        coefficient of its highest jet monomial.
        """
        jet_to_param_terms: dict[tuple[int, ...], dict[tuple[int, ...], object]] = {}
        for monomial, coefficient in f.iterterms():
            jet_to_param_terms.setdefault(monomial[: self.jet_count], {})[monomial[self.jet_count :]] = coefficient
        if self.coefficient_field is None:
            terms = {jets: param_terms[()] for jets, param_terms in jet_to_param_terms.items()}
        else:
            coefficient_ring = self.coefficient_field.ring
            terms = {
                jets: self.coefficient_field.new(coefficient_ring.from_dict(param_terms))
                for jets, param_terms in jet_to_param_terms.items()
            }
        return self.monic_ring.from_dict(terms).monic()

    def from_monic(self, p: PolyElement) -> PolyElement:
        """Element of :py:attr:`ring` proportional to ``p`` with polynomial coefficients."""
        if self.coefficient_field is None:
            return self.ring.from_dict({jets + (): coefficient for jets, coefficient in p.iterterms()})
        denominator = self.coefficient_field.ring.one
        for coefficient in p.itercoeffs():
            denominator = denominator.lcm(coefficient.denom)
        terms: dict[tuple[int, ...], object] = {}
        for jets, coefficient in p.iterterms():
            numerator = coefficient.numer * denominator.exquo(coefficient.denom)
            for param_monomial, value in numerator.iterterms():
                terms[jets + param_monomial] = value
        return self.ring.from_dict(terms)

    def parsed(self, text: str) -> PolyElement:
        """Differential polynomial from its text, for example ``"y1^2 + y2' - 1"``."""
        value = parse_expression(text, self.fraction_field)
        if not value.denom.is_ground:
            raise PidentError(f"differential polynomial must not have a non constant denominator: {text}")
        return value.numer.set_ring(self.ring).quo_ground(value.denom.LC)


def compare_ranks(first: Sequence[Rank], second: Sequence[Rank]) -> Comparison:
    """
    Compare autoreduced sets given as their ranks in increasing order. If all
    matched ranks are equal, the longer set is the lower one.

    >>> compare_ranks([((0, 1, 0), 1)], [((0, 2, 0), 1)])
    <Comparison.LESS: '<'>
    >>> compare_ranks([((0, 1, 0), 1), ((0, 0, -1), 1)], [((0, 1, 0), 1)])
    <Comparison.LESS: '<'>
    """
    for first_rank, second_rank in zip(first, second):
        if first_rank < second_rank:
            return Comparison.LESS
        if first_rank > second_rank:
            return Comparison.GREATER
    if len(first) > len(second):
        return Comparison.LESS
    if len(first) < len(second):
        return Comparison.GREATER
    return Comparison.EQUAL


@dataclass(frozen=True)
class AutoreducedSet:
    """Autoreduced set of differential polynomials sorted by increasing rank."""

    diff_ring: DiffRing
    elements: tuple[PolyElement, ...]

    def __post_init__(self):
        elements = tuple(sorted(self.elements, key=lambda f: (self.diff_ring.rank(f), format_polynomial(f))))
        if not self.diff_ring.is_autoreduced(elements):
            raise PidentError(
                "polynomials must be autoreduced: " + "; ".join(format_polynomial(element) for element in elements)
            )
        object.__setattr__(self, "elements", elements)

    @property
    def ranks(self) -> list[Rank]:
        return [self.diff_ring.rank(element) for element in self.elements]

    @property
    def leaders(self) -> list[DiffVar]:
        return [self.diff_ring.leader(element) for element in self.elements]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def formatted(self) -> list[str]:
        return [format_polynomial(element) for element in self.elements]


def compare_autoreduced(first: AutoreducedSet, second: AutoreducedSet) -> Comparison:
    return compare_ranks(first.ranks, second.ranks)


def basic_set(diff_ring: DiffRing, polynomials: Iterable[PolyElement]) -> AutoreducedSet:
    """
    Autoreduced subset of lowest rank among ``polynomials`` found by
    repeatedly picking the lowest ranked candidate reduced with respect to
    all elements picked so far.
    """
    candidates = []
    for f in polynomials:
        if not f:
            continue
        if not diff_ring.occurring_jets(f):
            raise PidentError(f"differential ideal contains the nonzero constant {format_polynomial(f)}")
        candidates.append(f)
    candidates.sort(key=lambda f: (diff_ring.rank(f), format_polynomial(f)))
    chosen: list[PolyElement] = []
    for candidate in candidates:
        if all(diff_ring.is_reduced(candidate, element) for element in chosen):
            chosen.append(candidate)
    return AutoreducedSet(diff_ring, tuple(chosen))


def characteristic_set(diff_ring: DiffRing, polynomials: Iterable[PolyElement], budget=None) -> AutoreducedSet:
    """
    Basic set of the pool ``polynomials`` closed under Ritt reduction: every
    pool element reduces to 0 with respect to the result.
    """
    pool = []
    for f in polynomials:
        normalized = diff_ring.without_param_content(f)
        if normalized and normalized not in pool:
            pool.append(normalized)
    round_count = 0
    while True:
        if budget is not None:
            budget.check()
        round_count += 1
        result = basic_set(diff_ring, pool)
        new_elements = []
        for f in pool:
            if f in result.elements:
                continue
            remainder, _ = diff_ring.ritt_reduce(f, result)
            remainder = diff_ring.without_param_content(remainder)
            if remainder and remainder not in pool and remainder not in new_elements:
                new_elements.append(remainder)
        if not new_elements:
            log.debug("characteristic set with %d elements after %d rounds", len(result), round_count)
            return result
        pool.extend(new_elements)


def strip_factors(autoreduced: AutoreducedSet) -> AutoreducedSet:
    """
    Remove from every element its parameter content and every factor that
    only depends on variables which are not leaders of the set.
    """
    diff_ring = autoreduced.diff_ring
    leader_bases = {leader.base for leader in autoreduced.leaders}
    result = []
    for element in autoreduced.elements:
        f = diff_ring.without_param_content(element)
        leader_index = diff_ring.index(diff_ring.leader(f))
        coefficients = [f.coeff_wrt(leader_index, degree) for degree in range(f.degree(leader_index) + 1)]
        common_factor = polynomial_gcd([c for c in coefficients if c])
        factor_leaders = {jet.base for jet in diff_ring.occurring_jets(common_factor)} & leader_bases
        if not common_factor.is_ground and not factor_leaders:
            f = f.exquo(common_factor)
        result.append(f.monic())
    return AutoreducedSet(diff_ring, tuple(result))


def parse_diffpolys(text: str, diff_ring: DiffRing) -> AutoreducedSet:
    """
    Autoreduced set from differential polynomials separated by new lines or
    ``;``, for example ``"y1^2 + y2^2 + y3; y2' - 1; y3' - 1"``.
    """
    parts = [part.strip() for line in text.splitlines() for part in line.split(";")]
    return AutoreducedSet(diff_ring, tuple(diff_ring.parsed(part) for part in parts if part))

