import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppcomp.algebra import (
    FinAlgebra,
    OperationTable,
    all_operations,
    is_idempotent,
    polymorphisms,
    pp_definability_check,
    preserves,
    projection,
    subpower_closure,
)
from ppcomp.errors import BudgetExceededError, ValidationError
from ppcomp.parsing import parse_structure

from conftest import random_structure


def oracle_closure(algebra, seed, include_diagonal=True):
    """Brute-force subpower closure: repeatedly apply every operation
    coordinatewise to every tuple of current members until stable."""
    arity = len(next(iter(seed)))
    current = set(seed)
    if include_diagonal:
        current |= {(a,) * arity for a in algebra.universe}
    while True:
        added = set()
        for op in algebra.operations.values():
            for rows in itertools.product(current, repeat=op.arity):
                new = tuple(
                    op(*(row[i] for row in rows)) for i in range(arity)
                )
                if new not in current:
                    added.add(new)
        if not added:
            return frozenset(current)
        current |= added


def test_operation_table_totality():
    with pytest.raises(ValidationError):
        OperationTable(1, {("0",): "0"}).check_total(("0", "1"))


def test_projection_is_idempotent():
    algebra = FinAlgebra(
        "A", ("0", "1"), {"p": projection(("0", "1"), 2, 0)}
    )
    assert is_idempotent(algebra)


def test_preserves_projection_always():
    rel = frozenset({("0", "1"), ("1", "0")})
    for i in range(3):
        assert preserves(projection(("0", "1"), 3, i), rel)


def test_preserves_counterexample():
    # Negation does not preserve the singleton {(1,)}.
    neg = OperationTable(1, {("0",): "1", ("1",): "0"})
    assert not preserves(neg, frozenset({("1",)}))
    assert preserves(neg, frozenset({("0",), ("1",)}))


def test_all_operations_count():
    assert len(list(all_operations(("0", "1"), 1))) == 4
    assert len(list(all_operations(("0", "1"), 2))) == 16


def test_all_operations_budget():
    with pytest.raises(BudgetExceededError):
        list(all_operations(tuple(str(i) for i in range(10)), 3, budget=100))


def test_polymorphism_counts_known():
    # A structure with no relations is preserved by everything.
    free = parse_structure("structure B { universe = {0,1} }")
    assert len(polymorphisms(free, 2)) == 16
    # The order relation on {0,1} is preserved exactly by the monotone
    # binary operations, and there are 6 of those.
    order = parse_structure(
        "structure B { universe = {0,1} relation L/2 = {(0,0),(0,1),(1,1)} }"
    )
    assert len(polymorphisms(order, 2)) == 6


def test_polymorphisms_contain_projections(rng):
    for _ in range(10):
        structure = random_structure(rng, size=2)
        polys = set(polymorphisms(structure, 2))
        for i in range(2):
            assert projection(structure.universe, 2, i) in polys


def test_subpower_closure_matches_oracle():
    # A two-element semilattice algebra.
    meet = OperationTable(
        2,
        {
            ("0", "0"): "0",
            ("0", "1"): "0",
            ("1", "0"): "0",
            ("1", "1"): "1",
        },
    )
    algebra = FinAlgebra("S", ("0", "1"), {"meet": meet})
    seed = frozenset({("0", "1"), ("1", "0")})
    assert subpower_closure(algebra, seed) == oracle_closure(algebra, seed)


def test_subpower_closure_pure_set_adds_only_diagonal():
    algebra = FinAlgebra("P", ("0", "1", "2"), {})
    seed = frozenset({("0", "1")})
    assert subpower_closure(algebra, seed) == seed | {
        ("0", "0"),
        ("1", "1"),
        ("2", "2"),
    }


def test_subpower_closure_idempotent():
    meet = OperationTable(
        2,
        {
            ("0", "0"): "0",
            ("0", "1"): "0",
            ("1", "0"): "0",
            ("1", "1"): "1",
        },
    )
    algebra = FinAlgebra("S", ("0", "1"), {"meet": meet})
    seed = frozenset({("0", "1", "1"), ("1", "0", "1")})
    once = subpower_closure(algebra, seed)
    assert subpower_closure(algebra, once) == once


def test_subpower_closure_monotone():
    algebra = FinAlgebra("P", ("0", "1"), {})
    small = subpower_closure(algebra, frozenset({("0", "1")}))
    big = subpower_closure(algebra, frozenset({("0", "1"), ("1", "0")}))
    assert small <= big


def test_subpower_closure_empty_seed_needs_arity():
    algebra = FinAlgebra("P", ("0", "1"), {})
    with pytest.raises(ValidationError):
        subpower_closure(algebra, frozenset())
    closed = subpower_closure(algebra, frozenset(), arity=2)
    assert closed == frozenset({("0", "0"), ("1", "1")})


def test_pp_definability_check_refutes():
    # Over the empty-signature structure every operation is a
    # polymorphism, so any non-trivial relation is refuted.
    free = parse_structure("structure B { universe = {0,1} }")
    status, counterexample = pp_definability_check(
        free, frozenset({("1",)}), arity_bound=1
    )
    assert status == "not_definable"
    assert counterexample is not None
    assert not preserves(counterexample, frozenset({("1",)}))


def test_pp_definability_check_undetermined():
    order = parse_structure(
        "structure B { universe = {0,1} relation L/2 = {(0,0),(0,1),(1,1)} }"
    )
    # L itself is preserved by all of its own polymorphisms.
    status, _ = pp_definability_check(order, order.relation("L"), arity_bound=2)
    assert status == "undetermined_up_to_bound"


@settings(max_examples=30, deadline=None)
@given(st.randoms(use_true_random=False))
def test_random_unary_polymorphisms_preserve_all_relations(pyrng):
    structure = random_structure(pyrng, size=2)
    for f in polymorphisms(structure, 1):
        for _, (_, rel) in sorted(structure.relations.items()):
            assert preserves(f, rel)
