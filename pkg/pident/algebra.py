# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
"""
Exact commutative algebra on top of :py:mod:`sympy.polys`: block orders,
a budgeted Buchberger algorithm, elimination, saturation and linear algebra
over rational function fields.
"""
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

from sympy import Symbol
from sympy.polys.domains import QQ, FractionField
from sympy.polys.fields import FracElement, FracField
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import MonomialOrder, monomial_key
from sympy.polys.rings import PolyElement, PolyRing

from pident.common import UNLIMITED_TIME_BUDGET, Budget, PidentError, log

#: Orders that may be used inside a block.
BLOCK_ORDER_NAMES = ("lex", "grlex", "grevlex")

_MAX_EVALUATION_ATTEMPTS = 20
_RANDOM_BOUND = 2**31

Block = tuple[str, int]
RatFunc = FracElement
Matrix = list[list[FracElement]]


class BlockOrder(MonomialOrder):
    """
    Product of monomial orders on consecutive blocks of variables. Blocks
    that come first dominate, which turns the order into an elimination
    order for the variables in the leading blocks.

    >>> order = BlockOrder((("grevlex", 2), ("lex", 1)))
    >>> order((1, 0, 0)) > order((0, 0, 5))
    True
    """

    alias = "block"
    is_global = True

    def __init__(self, blocks: Iterable[Block]):
        self.blocks = tuple((name, size) for name, size in blocks if size > 0)
        for name, _ in self.blocks:
            if name not in BLOCK_ORDER_NAMES:
                raise ValueError(f"block order must be one of {BLOCK_ORDER_NAMES} but is: {name!r}")
        self._orders = []
        start = 0
        for name, size in self.blocks:
            self._orders.append((monomial_key(name), start, start + size))
            start += size

    def __call__(self, monomial):
        return tuple(order(monomial[start:end]) for order, start, end in self._orders)

    def __repr__(self):
        return f"{self.__class__.__name__}({self.blocks!r})"

    def __str__(self):
        return " > ".join(f"{name}({size})" for name, size in self.blocks)

    def __eq__(self, other):
        return isinstance(other, BlockOrder) and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.__class__, self.blocks))


def blocks_of(order: MonomialOrder, ngens: int) -> tuple[Block, ...]:
    if isinstance(order, BlockOrder):
        return order.blocks
    return ((str(order), ngens),)


def block_order(blocks: Iterable[Block]) -> MonomialOrder:
    """Simplest order for ``blocks``: a plain order if only one block remains."""
    result = BlockOrder(blocks)
    if len(result.blocks) == 1:
        return monomial_key(result.blocks[0][0])
    return result


def polynomial_ring(symbols: Sequence[str], domain=QQ, blocks: Optional[Iterable[Block]] = None) -> PolyRing:
    blocks = blocks if blocks is not None else (("grevlex", len(symbols)),)
    return PolyRing([Symbol(name) for name in symbols], domain, block_order(blocks))


@lru_cache(maxsize=None)
def rational_function_field(symbols: tuple[str, ...]) -> FracField:
    """Field ℚ(symbols) used for all rational functions over the same variables."""
    return FracField([Symbol(name) for name in symbols], QQ)


def symbol_names(ring_or_field: Union[PolyRing, FracField]) -> tuple[str, ...]:
    return tuple(str(symbol) for symbol in ring_or_field.symbols)


def total_degree(f: PolyElement) -> int:
    return max((sum(monomial) for monomial in f.itermonoms()), default=0)


def used_variable_indices(polynomials: Iterable[PolyElement]) -> list[int]:
    """Sorted indices of the ring variables occurring in any of ``polynomials``."""
    result = set()
    for f in polynomials:
        for monomial in f.itermonoms():
            result.update(index for index, exponent in enumerate(monomial) if exponent)
    return sorted(result)


def polynomial_gcd(polynomials: Sequence[PolyElement]) -> PolyElement:
    """
    Monic greatest common divisor of nonzero polynomials of one ring, computed
    in the smaller ring of the variables that actually occur.
    """
    ring = polynomials[0].ring
    used = used_variable_indices(polynomials)
    if not used:
        return ring.one
    names = symbol_names(ring)
    compact_ring = polynomial_ring([names[index] for index in used], ring.domain)
    result = compact_ring.zero
    for f in polynomials:
        result = result.gcd(f.set_ring(compact_ring))
        if result.is_ground:
            return ring.one
    return result.monic().set_ring(ring)


def is_constant(value) -> bool:
    """True if ``value`` (polynomial, rational function or ground element) is a rational constant."""
    if isinstance(value, FracElement):
        return value.numer.is_ground and value.denom.is_ground
    if isinstance(value, PolyElement):
        return value.is_ground
    return True


def occurring_symbols(values: Sequence[FracElement]) -> list[str]:
    """Names of the variables that actually occur in ``values`` of one field, in field order."""
    if not values:
        return []
    names = symbol_names(values[0].field)
    parts = [part for value in values for part in (value.numer, value.denom)]
    return [names[index] for index in used_variable_indices(parts)]


def common_field(values: Iterable[RatFunc]) -> FracField:
    """Rational function field over the union of the variables of all ``values``."""
    names = []
    for value in values:
        for name in symbol_names(value.field):
            if name not in names:
                names.append(name)
    return rational_function_field(tuple(names))


def ratfunc_in(value, field: FracField) -> RatFunc:
    """``value`` converted into ``field``, which has to provide all variables of ``value``."""
    if isinstance(value, FracElement):
        return value.set_field(field)
    if isinstance(value, PolyElement):
        return field.new(value.set_ring(field.ring))
    return field.ground_new(value)


def ratfunc_numer_in(value: RatFunc, ring: PolyRing) -> tuple[PolyElement, PolyElement]:
    """Numerator and denominator of ``value`` converted into ``ring``."""
    return value.numer.set_ring(ring), value.denom.set_ring(ring)


@dataclass(frozen=True)
class IdealGens:
    """Generators of an ideal in a polynomial ring; duplicates and zeros are dropped."""

    ring: PolyRing
    gens: tuple[PolyElement, ...]

    def __post_init__(self):
        cleaned = []
        for generator in self.gens:
            if generator.ring != self.ring:
                generator = generator.set_ring(self.ring)
            if generator and generator not in cleaned:
                cleaned.append(generator)
        object.__setattr__(self, "gens", tuple(cleaned))

    @classmethod
    def of(cls, gens: Sequence[PolyElement]) -> "IdealGens":
        if not gens:
            raise PidentError("cannot derive the ring of an ideal without generators")
        return cls(gens[0].ring, tuple(gens))

    @property
    def is_zero(self) -> bool:
        return not self.gens

    @property
    def is_unit(self) -> bool:
        return any(generator.is_ground for generator in self.gens)

    def reduce(self, f: PolyElement) -> PolyElement:
        """Remainder of ``f`` modulo the generators; a normal form if they are a Gröbner basis."""
        return f.rem(list(self.gens)) if self.gens else f

    def contains(self, f: PolyElement) -> bool:
        """Membership test, only valid if the generators are a Gröbner basis."""
        return not self.reduce(f)

    def formatted(self) -> list[str]:
        return [format_polynomial(generator) for generator in self.gens]

    def __str__(self):
        return "(" + ", ".join(self.formatted()) + ")"


def _s_polynomial(f: PolyElement, g: PolyElement) -> PolyElement:
    ring = f.ring
    lcm = ring.monomial_lcm(f.LM, g.LM)
    return f.mul_monom(ring.monomial_div(lcm, f.LM)) - g.mul_monom(ring.monomial_div(lcm, g.LM))


class _PairQueue:
    """Critical pairs with Gebauer-Möller pruning and sugar selection."""

    def __init__(self, ring: PolyRing):
        self._ring = ring
        self._pairs: dict[tuple[int, int], tuple[int, tuple]] = {}

    def __bool__(self):
        return bool(self._pairs)

    def __len__(self):
        return len(self._pairs)

    def pop(self) -> tuple[int, int, int]:
        i, j = min(self._pairs, key=lambda pair: (self._pairs[pair], pair))
        sugar, _ = self._pairs.pop((i, j))
        return i, j, sugar

    def update(self, basis: list[PolyElement], sugars: list[int], new_index: int):
        ring = self._ring
        lcm = ring.monomial_lcm
        mul = ring.monomial_mul
        div = ring.monomial_div
        new_lm = basis[new_index].LM
        leading_monomials = [g.LM for g in basis]

        # Drop old pairs whose lcm is strictly divisible by the new leading monomial.
        for i, j in list(self._pairs):
            pair_lcm = lcm(leading_monomials[i], leading_monomials[j])
            if (
                div(pair_lcm, new_lm) is not None
                and pair_lcm != lcm(leading_monomials[i], new_lm)
                and pair_lcm != lcm(leading_monomials[j], new_lm)
            ):
                del self._pairs[(i, j)]

        lcm_to_indices: dict[tuple, list[int]] = {}
        for i in range(new_index):
            lcm_to_indices.setdefault(lcm(leading_monomials[i], new_lm), []).append(i)
        minimal_lcms = []
        for pair_lcm in sorted(lcm_to_indices, key=ring.order):
            if all(div(pair_lcm, other) is None for other in minimal_lcms):
                minimal_lcms.append(pair_lcm)
        for pair_lcm in minimal_lcms:
            indices = lcm_to_indices[pair_lcm]
            # Product criterion: coprime leading monomials yield an S-polynomial reducing to 0.
            if any(pair_lcm == mul(leading_monomials[i], new_lm) for i in indices):
                continue
            i = min(indices)
            sugar = max(
                sugars[i] + sum(pair_lcm) - sum(leading_monomials[i]),
                sugars[new_index] + sum(pair_lcm) - sum(new_lm),
            )
            self._pairs[(i, new_index)] = (sugar, ring.order(pair_lcm))


def _minimal_and_reduced(basis: list[PolyElement]) -> list[PolyElement]:
    if not basis:
        return []
    ring = basis[0].ring
    minimal = []
    for f in sorted(basis, key=lambda g: ring.order(g.LM)):
        if all(ring.monomial_div(f.LM, g.LM) is None for g in minimal):
            minimal.append(f)
    result = []
    for index, f in enumerate(minimal):
        others = minimal[:index] + minimal[index + 1 :]
        reduced = f.rem(others) if others else f
        result.append(reduced.monic())
    return sorted(result, key=lambda g: ring.order(g.LM))


def groebner(
    ideal: IdealGens, budget: Budget = UNLIMITED_TIME_BUDGET, order: Optional[MonomialOrder] = None
) -> IdealGens:
    """
    Reduced Gröbner basis of ``ideal``, sorted by increasing leading monomial.
    If ``order`` is given, the basis is computed in a clone of the ring using
    that monomial order.
    """
    ring = ideal.ring if order is None else ideal.ring.clone(order=order)
    generators = [generator.set_ring(ring).monic() for generator in ideal.gens]
    if not generators:
        return IdealGens(ring, ())
    basis: list[PolyElement] = []
    sugars: list[int] = []
    pairs = _PairQueue(ring)
    for generator in generators:
        if generator.is_ground:
            return IdealGens(ring, (ring.one,))
        reduced = generator.rem(basis) if basis else generator
        if reduced:
            basis.append(reduced.monic())
            budget.check_basis_size(len(basis))
            sugars.append(total_degree(generator))
            pairs.update(basis, sugars, len(basis) - 1)
    reduction_count = 0
    while pairs:
        budget.check()
        i, j, sugar = pairs.pop()
        remainder = _s_polynomial(basis[i], basis[j]).rem(basis)
        reduction_count += 1
        if not remainder:
            continue
        if remainder.is_ground:
            return IdealGens(ring, (ring.one,))
        budget.check_degree(total_degree(remainder))
        basis.append(remainder.monic())
        budget.check_basis_size(len(basis))
        sugars.append(sugar)
        pairs.update(basis, sugars, len(basis) - 1)
    result = _minimal_and_reduced(basis)
    log.debug(
        "groebner basis with %d elements after %d reductions in %d variables", len(result), reduction_count, ring.ngens
    )
    return IdealGens(ring, tuple(result))


def _split_ring(ring: PolyRing, drop: Sequence[str]) -> tuple[PolyRing, PolyRing, list[str]]:
    names = symbol_names(ring)
    unknown = [name for name in drop if name not in names]
    if unknown:
        raise PidentError(f"cannot eliminate variables missing from the ring: {', '.join(unknown)}")
    keep = [name for name in names if name not in drop]
    keep_blocks = _restricted_blocks(ring, keep)
    elimination_ring = polynomial_ring(list(drop) + keep, ring.domain, (("grevlex", len(drop)),) + keep_blocks)
    keep_ring = polynomial_ring(keep, ring.domain, keep_blocks)
    return elimination_ring, keep_ring, keep


def _restricted_blocks(ring: PolyRing, keep: Sequence[str]) -> tuple[Block, ...]:
    names = symbol_names(ring)
    keep_set = set(keep)
    result = []
    start = 0
    for name, size in blocks_of(ring.order, ring.ngens):
        kept_size = sum(1 for symbol in names[start : start + size] if symbol in keep_set)
        if kept_size:
            result.append((name, kept_size))
        start += size
    return tuple(result)


def eliminate(ideal: IdealGens, drop: Sequence[str], budget: Budget = UNLIMITED_TIME_BUDGET) -> IdealGens:
    """
    Reduced Gröbner basis of the intersection of ``ideal`` with the subring
    without the variables ``drop``. The subring keeps the order of the
    remaining variables of the original ring.
    """
    elimination_ring, keep_ring, _ = _split_ring(ideal.ring, drop)
    basis = groebner(IdealGens(elimination_ring, tuple(g.set_ring(elimination_ring) for g in ideal.gens)), budget)
    drop_count = len(drop)
    kept = [g for g in basis.gens if not any(monomial[:drop_count] != (0,) * drop_count for monomial in g.itermonoms())]
    return IdealGens(keep_ring, tuple(g.set_ring(keep_ring) for g in kept))


def fresh_symbol(ring: PolyRing, base: str) -> str:
    names = set(symbol_names(ring))
    result = base
    suffix = 0
    while result in names:
        suffix += 1
        result = f"{base}{suffix}"
    return result


def saturate(ideal: IdealGens, f: PolyElement, budget: Budget = UNLIMITED_TIME_BUDGET) -> IdealGens:
    """Generators of ``ideal : f^∞`` using an auxiliary variable ``w`` with ``w*f - 1``."""
    if not f:
        raise PidentError("cannot saturate at the zero polynomial")
    ring = ideal.ring
    w_name = fresh_symbol(ring, "%w")
    extended_ring = polynomial_ring(
        [w_name] + list(symbol_names(ring)), ring.domain, (("grevlex", 1),) + blocks_of(ring.order, ring.ngens)
    )
    w = extended_ring.gens[0]
    generators = [g.set_ring(extended_ring) for g in ideal.gens] + [w * f.set_ring(extended_ring) - 1]
    result = eliminate(IdealGens(extended_ring, tuple(generators)), [w_name], budget)
    return IdealGens(ring, tuple(g.set_ring(ring) for g in result.gens))


def ideals_equal(first: IdealGens, second: IdealGens, budget: Budget = UNLIMITED_TIME_BUDGET) -> bool:
    """Equality of ideals in the same ring by comparing reduced Gröbner bases."""
    return groebner(first, budget).gens == groebner(second, budget).gens


def s_polynomials_reduce_to_zero(basis: IdealGens) -> bool:
    """Buchberger criterion: every S-polynomial of ``basis`` reduces to 0 modulo ``basis``."""
    gens = list(basis.gens)
    return all(
        not _s_polynomial(gens[i], gens[j]).rem(gens) for i in range(len(gens)) for j in range(i + 1, len(gens))
    )


def _matrix_domain(matrix: Matrix):
    return FractionField(matrix[0][0].field)


def rref(matrix: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """
    Reduced row echelon form of a matrix of rational functions over one
    field together with the pivot columns. Pivots are 1 and the leftmost
    nonzero column is used first.
    """
    if not matrix or not matrix[0]:
        return [list(row) for row in matrix], ()
    domain = _matrix_domain(matrix)
    reduced, pivots = DomainMatrix.from_list(matrix, domain).rref()
    return reduced.to_list(), tuple(pivots)


def _rows_without_denominators(matrix: Matrix) -> list[list[PolyElement]]:
    result = []
    for row in matrix:
        common_denominator = row[0].field.ring.one
        for entry in row:
            common_denominator = common_denominator.lcm(entry.denom)
        result.append([entry.numer * common_denominator.exquo(entry.denom) for entry in row])
    return result


def rank_symbolic(matrix: Matrix) -> int:
    """Exact rank using fraction-free Gauss-Jordan elimination over the polynomial ring."""
    if not matrix or not matrix[0]:
        return 0
    ring = matrix[0][0].field.ring
    polynomial_matrix = DomainMatrix.from_list(_rows_without_denominators(matrix), ring.to_domain())
    _, _, pivots = polynomial_matrix.rref_den(method="FF")
    return len(pivots)


def evaluate_ratfunc(value: RatFunc, point: Sequence[int]):
    """Value of ``value`` at ``point`` (one integer per field variable) or ``None`` on a pole."""
    if value.field.ngens == 0:
        return QQ.convert(value.numer.LC) / QQ.convert(value.denom.LC)
    denominator = value.denom(*point)
    if not denominator:
        return None
    return QQ.convert(value.numer(*point)) / QQ.convert(denominator)


def rank_probabilistic(matrix: Matrix, seed: int, trials: int) -> int:
    """
    Lower bound for the rank: the maximum rank of ``trials`` specializations
    at random integer points in [-2^31, 2^31] that avoid poles.
    """
    if trials < 1:
        raise PidentError(f"trials must be at least 1 but is {trials}")
    if not matrix or not matrix[0]:
        return 0
    generator = random.Random(seed)
    variable_count = matrix[0][0].field.ngens
    result = 0
    for _ in range(trials):
        for _ in range(_MAX_EVALUATION_ATTEMPTS):
            point = [generator.randint(-_RANDOM_BOUND, _RANDOM_BOUND) for _ in range(variable_count)]
            values = [[evaluate_ratfunc(entry, point) for entry in row] for row in matrix]
            if all(value is not None for row in values for value in row):
                break
        else:
            raise PidentError(
                f"cannot find an evaluation point without poles after {_MAX_EVALUATION_ATTEMPTS} attempts"
            )
        result = max(result, DomainMatrix.from_list(values, QQ).rank())
    return result


def _format_rational(value) -> str:
    numerator = int(value.numerator)
    denominator = int(value.denominator)
    return str(numerator) if denominator == 1 else f"{numerator}/{denominator}"


def _format_monomial(symbols: Sequence[str], monomial: Sequence[int]) -> str:
    factors = []
    for name, exponent in zip(symbols, monomial):
        if exponent == 1:
            factors.append(name)
        elif exponent > 1:
            factors.append(f"{name}^{exponent}")
    return "*".join(factors)


def _format_denominator(denominator: PolyElement) -> str:
    """Text of a denominator, in parentheses unless it is a single name or number."""
    result = format_polynomial(denominator)
    if any(operator in result for operator in " */-"):
        result = f"({result})"
    return result


def _format_coefficient(value) -> tuple[bool, str]:
    """Sign and text of a coefficient; the text is empty for 1."""
    if isinstance(value, FracElement):
        if is_constant(value):
            return _format_coefficient(QQ.convert(value.numer.LC) / QQ.convert(value.denom.LC))
        numerator_text = format_polynomial(value.numer)
        if value.denom == 1:
            text = numerator_text if len(value.numer) == 1 else f"({numerator_text})"
        else:
            denominator_text = _format_denominator(value.denom)
            if len(value.numer) > 1:
                numerator_text = f"({numerator_text})"
            text = f"{numerator_text}/{denominator_text}"
        if text.startswith("-") and len(value.numer) == 1:
            return True, text[1:]
        return False, text
    value = QQ.convert(value)
    negative = value < 0
    magnitude = -value if negative else value
    return negative, "" if magnitude == 1 else _format_rational(magnitude)


def format_polynomial(f: PolyElement) -> str:
    """
    Canonical text: terms sorted by decreasing monomial order, ``^`` for
    exponents and explicit ``*``.

    >>> from sympy.polys.rings import ring
    >>> _, x, y = ring("x,y", QQ)
    >>> format_polynomial(2*x**2*y - y + QQ(1, 2))
    '2*x^2*y - y + 1/2'
    """
    if not f:
        return "0"
    symbols = symbol_names(f.ring)
    parts = []
    for monomial, coefficient in f.terms():
        negative, coefficient_text = _format_coefficient(coefficient)
        monomial_text = _format_monomial(symbols, monomial)
        if coefficient_text and monomial_text:
            term = f"{coefficient_text}*{monomial_text}"
        else:
            term = coefficient_text or monomial_text or "1"
        if not parts:
            parts.append(f"-{term}" if negative else term)
        else:
            parts.append(f"- {term}" if negative else f"+ {term}")
    return " ".join(parts)


def format_ratfunc(value: RatFunc) -> str:
    """
    Canonical text of a rational function.

    >>> field = rational_function_field(("a", "b"))
    >>> format_ratfunc(field.new(field.ring.gens[0] + 1, field.ring.gens[1]))
    '(a + 1)/b'
    """
    if value.denom == 1:
        return format_polynomial(value.numer)
    numerator_text = format_polynomial(value.numer)
    denominator_text = _format_denominator(value.denom)
    if len(value.numer) > 1 or numerator_text.startswith("-"):
        numerator_text = f"({numerator_text})"
    return f"{numerator_text}/{denominator_text}"
