# Copyright (c) 2020, Thomas Aglassinger.
# All rights reserved. Distributed under the BSD License.
import random

import pytest
from sympy.polys.domains import QQ
from sympy.polys.groebnertools import groebner as sympy_groebner

from pident.algebra import (
    BlockOrder,
    IdealGens,
    block_order,
    blocks_of,
    eliminate,
    format_polynomial,
    format_ratfunc,
    groebner,
    ideals_equal,
    is_constant,
    occurring_symbols,
    polynomial_gcd,
    polynomial_ring,
    rank_probabilistic,
    rank_symbolic,
    ratfunc_in,
    rational_function_field,
    rref,
    s_polynomials_reduce_to_zero,
    saturate,
)
from pident.common import Budget, BudgetExhaustedError, PidentError


def test_can_order_blocks():
    order = BlockOrder((("lex", 1), ("grevlex", 2), ("lex", 0)))
    assert order.blocks == (("lex", 1), ("grevlex", 2))
    assert order((1, 0, 0)) > order((0, 3, 3))
    assert str(order) == "lex(1) > grevlex(2)"
    assert order == BlockOrder((("lex", 1), ("grevlex", 2)))
    assert hash(order) == hash(BlockOrder((("lex", 1), ("grevlex", 2))))


def test_fails_on_unknown_block_order():
    with pytest.raises(ValueError, match="revlex"):
        BlockOrder((("revlex", 2),))


def test_can_simplify_single_block_order():
    assert not isinstance(block_order((("lex", 3), ("grevlex", 0))), BlockOrder)
    assert blocks_of(block_order((("grevlex", 1), ("lex", 2))), 3) == (("grevlex", 1), ("lex", 2))


def test_can_compute_groebner_basis_like_sympy():
    ring = polynomial_ring(["x", "y", "z"])
    x, y, z = ring.gens
    generators = (x**2 + y * z - 2, x * y - z**2 + 1, y**2 - x * z)
    basis = groebner(IdealGens(ring, generators))
    expected = sympy_groebner(list(generators), ring)
    assert set(basis.gens) == {g.monic() for g in expected}
    assert s_polynomials_reduce_to_zero(basis)


def test_can_detect_unit_ideal():
    ring = polynomial_ring(["x", "y"])
    x, y = ring.gens
    basis = groebner(IdealGens(ring, (x * y - 1, x)))
    assert basis.is_unit
    assert basis.gens == (ring.one,)


def test_fails_on_exhausted_basis_budget():
    ring = polynomial_ring(["x", "y", "z"])
    x, y, z = ring.gens
    with pytest.raises(BudgetExhaustedError):
        groebner(IdealGens(ring, (x**3 - y * z, y**3 - x * z, z**3 - x * y, x * y * z - 1)), Budget(max_basis=3))


def test_can_eliminate_parameter():
    ring = polynomial_ring(["t", "x", "y"])
    t, x, y = ring.gens
    result = eliminate(IdealGens(ring, (x - t**2, y - t**3)), ["t"])
    assert result.formatted() == ["x^3 - y^2"]


def test_fails_on_eliminating_unknown_variable():
    ring = polynomial_ring(["x"])
    with pytest.raises(PidentError, match="missing"):
        eliminate(IdealGens(ring, (ring.gens[0],)), ["t"])


def test_can_saturate():
    ring = polynomial_ring(["x", "y"])
    x, y = ring.gens
    assert saturate(IdealGens(ring, (x * y, x**2 * y**2)), x).formatted() == ["y"]
    assert saturate(IdealGens(ring, (x * y,)), y + 1).formatted() == ["x*y"]


def test_can_compare_ideals():
    ring = polynomial_ring(["x", "y"])
    x, y = ring.gens
    assert ideals_equal(IdealGens(ring, (x + y, x - y)), IdealGens(ring, (x, y)))
    assert not ideals_equal(IdealGens(ring, (x + y,)), IdealGens(ring, (x, y)))


def test_can_compute_polynomial_gcd():
    ring = polynomial_ring(["x", "y"])
    x, _ = ring.gens
    assert polynomial_gcd([x**2 - 1, x**2 + 2 * x + 1]) == x + 1
    assert polynomial_gcd([ring(3), ring(6)]) == ring.one


def test_can_compute_rref_and_ranks():
    field = rational_function_field(("a",))
    a = field.gens[0]
    singular = [[a, a**2], [field.one, a]]
    reduced, pivots = rref(singular)
    assert pivots == (0,)
    assert reduced == [[field.one, a], [field.zero, field.zero]]
    assert rank_symbolic(singular) == 1
    assert rank_probabilistic(singular, seed=0, trials=3) == 1
    regular = [[a, field.one], [field.one, a]]
    assert rank_symbolic(regular) == 2
    assert rank_probabilistic(regular, seed=1, trials=2) == 2


def test_fails_on_probabilistic_rank_without_trials():
    field = rational_function_field(("a",))
    with pytest.raises(PidentError, match="trials"):
        rank_probabilistic([[field.gens[0]]], seed=0, trials=0)


def test_can_inspect_rational_functions():
    field = rational_function_field(("a", "b", "c"))
    a, _, c = field.gens
    assert is_constant(field(3) / 4)
    assert not is_constant(a / c)
    assert occurring_symbols([a + 1, field.one / c]) == ["a", "c"]
    ring = polynomial_ring(["c", "a"])
    assert ratfunc_in(ring.gens[0] * ring.gens[1], field) == a * c


def test_can_format_polynomials_and_rational_functions():
    ring = polynomial_ring(["x", "y"])
    x, y = ring.gens
    assert format_polynomial(ring.zero) == "0"
    assert format_polynomial(-x * y + 3) == "-x*y + 3"
    field = rational_function_field(("a", "b"))
    a, b = field.gens
    assert format_ratfunc(a**2 / b**3) == "a^2/b^3"
    a, b, c = rational_function_field(("a", "b", "c")).gens
    assert format_ratfunc(a / (b * c)) == "a/(b*c)"
    assert format_ratfunc((a + 1) / (b * c**2)) == "(a + 1)/(b*c^2)"
    assert format_ratfunc(a / (b + c)) == "a/(b + c)"
    ring = polynomial_ring(["y"], a.field.to_domain())
    assert format_polynomial(ring.from_dict({(1,): a / (b * c), (0,): (a + b) / c})) == "a/(b*c)*y + (a + b)/c"


def _random_polynomial(rng: random.Random, ring, term_count: int, max_degree: int):
    terms = {}
    for _ in range(term_count):
        exponents = [0] * ring.ngens
        for _ in range(rng.randint(0, max_degree)):
            exponents[rng.randrange(ring.ngens)] += 1
        terms[tuple(exponents)] = QQ(rng.choice([-3, -2, -1, 1, 2, 3]))
    return ring.from_dict(terms)


def _random_ideal(seed: int) -> IdealGens:
    rng = random.Random(seed)
    ring = polynomial_ring(["x", "y", "z"])
    generator_count = rng.randint(2, 3)
    generators = []
    while len(generators) < generator_count:
        generator = _random_polynomial(rng, ring, rng.randint(1, 3), 2)
        if generator:
            generators.append(generator)
    return IdealGens(ring, tuple(generators))


def _random_matrix(seed: int):
    rng = random.Random(seed)
    field = rational_function_field(("a", "b"))
    a, b = field.gens
    row_count, column_count = rng.randint(1, 4), rng.randint(1, 4)
    result = []
    for _ in range(row_count):
        if result and rng.random() < 0.3:
            first, second = rng.choice(result), rng.choice(result)
            factor = rng.choice([field.one, a, b + 1])
            result.append([x + factor * y for x, y in zip(first, second)])
        else:
            result.append(
                [rng.choice([field.zero, field.one, a, b, a * b - 1, field(rng.randint(-5, 5)) / (a + 1)])]
                + [rng.choice([field.zero, a - b, b**2, field(2)]) for _ in range(column_count - 1)]
            )
    return result


@pytest.mark.parametrize("seed", range(100))
def test_can_compute_groebner_basis_of_random_ideal(seed):
    ideal = _random_ideal(seed)
    basis = groebner(ideal)
    assert groebner(basis).gens == basis.gens
    assert all(basis.contains(generator) for generator in ideal.gens)
    assert s_polynomials_reduce_to_zero(basis)


@pytest.mark.parametrize("seed", range(100))
def test_can_saturate_random_ideal_to_superset(seed):
    ideal = _random_ideal(seed)
    x, y, z = ideal.ring.gens
    f = random.Random(seed).choice([x, y + 1, x * z - 2, x + y + z])
    saturated = groebner(saturate(ideal, f))
    assert all(saturated.contains(generator) for generator in ideal.gens)


@pytest.mark.parametrize("seed", range(100))
def test_can_compute_rref_of_random_matrix(seed):
    matrix = _random_matrix(seed)
    field = matrix[0][0].field
    reduced, pivots = rref(matrix)
    nonzero_rows = [row for row in reduced if any(row)]
    assert len(nonzero_rows) == len(pivots) == rank_symbolic(matrix)
    for row_index, pivot in enumerate(pivots):
        assert [row[pivot] for row in nonzero_rows] == [
            field.one if index == row_index else field.zero for index in range(len(nonzero_rows))
        ]
    for row in matrix:
        combination = [field.zero] * len(row)
        for pivot, reduced_row in zip(pivots, nonzero_rows):
            combination = [entry + row[pivot] * reduced_entry for entry, reduced_entry in zip(combination, reduced_row)]
        assert combination == list(row)
    for reduced_row in nonzero_rows:
        assert rank_symbolic(matrix + [reduced_row]) == len(pivots)


@pytest.mark.parametrize("seed", range(100))
def test_can_bound_probabilistic_rank_of_random_matrix(seed):
    matrix = _random_matrix(seed)
    symbolic_rank = rank_symbolic(matrix)
    assert rank_probabilistic(matrix, seed=seed, trials=1) <= symbolic_rank
    assert rank_probabilistic(matrix, seed=seed, trials=3) <= symbolic_rank
