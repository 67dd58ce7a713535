"""Finite algebras, preservation tests, polymorphism enumeration, and
subpower closure.

Polymorphism enumeration is bounded-arity with an explicit budget; full
completeness of the pp-definability test would need arities as large as
the number of tuples of the tested relation, which is out of reach, so
that test is a semi-decision.
"""

import itertools
from dataclasses import dataclass, field

from .errors import BudgetExceededError, ValidationError

DEFAULT_TABLE_BUDGET = 1_000_000


@dataclass(frozen=True)
class OperationTable:
    """A total finitary operation given by its table."""

    arity: int
    table: dict  # maps arity-tuples of elements to elements

    def __call__(self, *args):
        return self.table[args]

    def __hash__(self):
        return hash((self.arity, tuple(sorted(self.table.items()))))

    def check_total(self, universe):
        members = set(universe)
        expected = set(itertools.product(universe, repeat=self.arity))
        if set(self.table) != expected:
            raise ValidationError("operation table is not total over the universe")
        for out in self.table.values():
            if out not in members:
                raise ValidationError(f"operation output {out!r} outside universe")
        return self


@dataclass(frozen=True)
class FinAlgebra:
    """A finite algebra: universe plus named basic operations."""

    name: str
    universe: tuple
    operations: dict = field(default_factory=dict)  # symbol -> OperationTable

    def __post_init__(self):
        if not self.universe:
            raise ValidationError(f"algebra {self.name}: empty universe")
        for sym, op in self.operations.items():
            op.check_total(self.universe)


def projection(universe, arity, index):
    table = {
        args: args[index] for args in itertools.product(universe, repeat=arity)
    }
    return OperationTable(arity, table)


def preserves(f, relation, universe=None):
    """True iff applying f coordinatewise to any arity(f) tuples of the
    relation lands back in the relation."""
    rel = list(relation)
    if not rel:
        return True
    width = len(rel[0])
    for rows in itertools.product(rel, repeat=f.arity):
        image = tuple(f(*(row[i] for row in rows)) for i in range(width))
        if image not in relation:
            return False
    return True


def all_operations(universe, arity, budget=DEFAULT_TABLE_BUDGET):
    """Yield every arity-ary operation on the universe in lexicographic
    table order."""
    inputs = list(itertools.product(universe, repeat=arity))
    count = len(universe) ** len(inputs)
    if count > budget:
        raise BudgetExceededError(
            f"{count} candidate tables of arity {arity} exceed budget {budget}"
        )
    for outputs in itertools.product(universe, repeat=len(inputs)):
        yield OperationTable(arity, dict(zip(inputs, outputs)))


def polymorphisms(structure, arity, budget=DEFAULT_TABLE_BUDGET):
    """All arity-ary operations preserving every relation of the structure,
    in lexicographic table order."""
    if arity < 1:
        raise ValidationError("polymorphism arity must be >= 1")
    relations = [rel for _, (_, rel) in sorted(structure.relations.items())]
    result = []
    for f in all_operations(structure.universe, arity, budget):
        if all(preserves(f, rel) for rel in relations):
            result.append(f)
    return result


def subpower_closure(algebra, seed, include_diagonal=True, arity=None):
    """Least superset of the seed tuples (plus constant tuples when
    requested) closed under coordinatewise application of every basic
    operation; computed by fixpoint iteration."""
    seed = set(seed)
    widths = {len(t) for t in seed}
    if arity is not None:
        widths.add(arity)
    if len(widths) > 1:
        raise ValidationError("seed tuples have mixed arities")
    if not widths:
        raise ValidationError("cannot infer arity from an empty seed")
    (width,) = widths
    closed = set(seed)
    if include_diagonal:
        closed |= {(a,) * width for a in algebra.universe}
    ops = list(algebra.operations.values())
    frontier = set(closed)
    while frontier:
        new = set()
        for f in ops:
            # every argument slot mixes old and frontier tuples; it is
            # enough to require at least one frontier argument
            pool = list(closed)
            for rows in itertools.product(pool, repeat=f.arity):
                if not any(r in frontier for r in rows):
                    continue
                image = tuple(f(*(row[i] for row in rows)) for i in range(width))
                if image not in closed:
                    new.add(image)
        closed |= new
        frontier = new
    return frozenset(closed)


def pp_definability_check(structure, relation, arity_bound, budget=DEFAULT_TABLE_BUDGET):
    """Search for a polymorphism of the structure violating the relation.

    Returns ("not_definable", witness) when some polymorphism of arity
    <= arity_bound fails to preserve the relation, otherwise
    ("undetermined_up_to_bound", None).
    """
    for arity in range(1, arity_bound + 1):
        for f in polymorphisms(structure, arity, budget):
            if not preserves(f, relation):
                return ("not_definable", f)
    return ("undetermined_up_to_bound", None)


def is_idempotent(algebra):
    """True iff every basic operation fixes all constant tuples.

    Basic operations suffice: composition preserves idempotence.
    """
    for op in algebra.operations.values():
        for a in algebra.universe:
            if op(*((a,) * op.arity)) != a:
                return False
    return True
