"""Core value types: relational structures, pp-formulas, assignments, verdicts.

All values are immutable after construction and safe to share between
threads.  Structures and formulas validate their invariants eagerly so
that downstream code can assume well-formedness.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import ValidationError

# A relation is a frozenset of equal-length tuples of element names.
Relation = frozenset

PRODUCT_SEP = "|"  # reserved separator for product-element names
FRESH_PREFIX = "_q"  # reserved prefix for machine-generated bound variables


@dataclass(frozen=True)
class Equality:
    left: str
    right: str

    def variables(self):
        return (self.left, self.right)

    def __str__(self):
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class Atom:
    symbol: str
    args: tuple

    def variables(self):
        return self.args

    def __str__(self):
        return f"{self.symbol}({', '.join(self.args)})"


AtomLike = Union[Equality, Atom]


@dataclass(frozen=True)
class RelStructure:
    """A finite relational structure: named universe plus named relations.

    ``relations`` maps each relation symbol to a pair ``(arity, tuples)``.
    """

    name: str
    universe: tuple
    relations: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.universe:
            raise ValidationError(f"structure {self.name}: empty universe")
        if len(set(self.universe)) != len(self.universe):
            raise ValidationError(f"structure {self.name}: duplicate universe elements")
        members = set(self.universe)
        for sym, (arity, tuples) in self.relations.items():
            for t in tuples:
                if len(t) != arity:
                    raise ValidationError(
                        f"structure {self.name}: tuple {t} does not match arity "
                        f"{arity} of {sym}"
                    )
                for e in t:
                    if e not in members:
                        raise ValidationError(
                            f"structure {self.name}: unknown element {e!r} in {sym}"
                        )

    def signature(self):
        return {sym: arity for sym, (arity, _) in self.relations.items()}

    def relation(self, symbol):
        return self.relations[symbol][1]

    def element_index(self, e):
        return self.universe.index(e)


@dataclass(frozen=True)
class PPFormula:
    """A primitive positive formula in canonical variable order.

    Free variables come first, bound variables after; every atom variable
    must be declared in one of the two lists.
    """

    name: str
    free_vars: tuple
    bound_vars: tuple
    atoms: tuple

    def __post_init__(self):
        free, bound = set(self.free_vars), set(self.bound_vars)
        if len(free) != len(self.free_vars) or len(bound) != len(self.bound_vars):
            raise ValidationError(f"formula {self.name}: duplicate variable declaration")
        both = free & bound
        if both:
            raise ValidationError(
                f"formula {self.name}: variable both free and bound: {sorted(both)}"
            )
        declared = free | bound
        for a in self.atoms:
            for v in a.variables():
                if v not in declared:
                    raise ValidationError(
                        f"formula {self.name}: undeclared variable {v!r} in {a}"
                    )

    @property
    def all_vars(self):
        """Canonical variable sequence x_1..x_n: free first, then bound."""
        return self.free_vars + self.bound_vars

    def validate_signature(self, signature):
        for a in self.atoms:
            if isinstance(a, Atom):
                if a.symbol not in signature:
                    raise ValidationError(
                        f"formula {self.name}: unknown symbol {a.symbol!r}"
                    )
                if len(a.args) != signature[a.symbol]:
                    raise ValidationError(
                        f"formula {self.name}: {a.symbol} expects "
                        f"{signature[a.symbol]} arguments, got {len(a.args)}"
                    )
        return self


@dataclass(frozen=True)
class SortedPPFormula(PPFormula):
    """Two-sorted pp-formula over the ternary signature {R}.

    Each variable carries sort 1 or 2; equalities relate same-sort
    variables and every R-atom has sort pattern (1, 2, 2).
    """

    sorts: dict = field(default_factory=dict)

    def __post_init__(self):
        super().__post_init__()
        for v in self.all_vars:
            if self.sorts.get(v) not in (1, 2):
                raise ValidationError(
                    f"formula {self.name}: variable {v!r} has no sort annotation"
                )
        for a in self.atoms:
            if isinstance(a, Equality):
                if self.sorts[a.left] != self.sorts[a.right]:
                    raise ValidationError(
                        f"formula {self.name}: equality {a} mixes sorts"
                    )
            else:
                if a.symbol != "R" or len(a.args) != 3:
                    raise ValidationError(
                        f"formula {self.name}: only ternary R atoms allowed, got {a}"
                    )
                pattern = tuple(self.sorts[v] for v in a.args)
                if pattern != (1, 2, 2):
                    raise ValidationError(
                        f"formula {self.name}: atom {a} has sort pattern {pattern}, "
                        "expected (1, 2, 2)"
                    )

    def vars_of_sort(self, sort, only_free=False):
        pool = self.free_vars if only_free else self.all_vars
        return tuple(v for v in pool if self.sorts[v] == sort)


@dataclass(frozen=True)
class Assignment:
    """A map from variable names to element names."""

    bindings: dict

    def __getitem__(self, var):
        return self.bindings[var]

    def __contains__(self, var):
        return var in self.bindings

    def __hash__(self):
        return hash(tuple(sorted(self.bindings.items())))

    def domain(self):
        return frozenset(self.bindings)

    def check_domain(self, variables):
        if self.domain() != frozenset(variables):
            raise ValidationError(
                f"assignment domain {sorted(self.domain())} does not match "
                f"declared variables {list(variables)}"
            )
        return self

    def restrict(self, variables):
        return Assignment({v: self.bindings[v] for v in variables})

    def extend(self, var, value):
        new = dict(self.bindings)
        new[var] = value
        return Assignment(new)

    def __str__(self):
        return ", ".join(f"{v}={e}" for v, e in sorted(self.bindings.items()))


@dataclass(frozen=True)
class Verdict:
    """Yes/no decision; a no carries a replayable witness."""

    answer: str  # "yes" | "no"
    witness: Optional[object] = None

    def __post_init__(self):
        if self.answer not in ("yes", "no"):
            raise ValidationError(f"verdict answer must be yes/no, got {self.answer!r}")

    @property
    def is_yes(self):
        return self.answer == "yes"

    @staticmethod
    def yes():
        return Verdict("yes")

    @staticmethod
    def no(witness=None):
        return Verdict("no", witness)


def split_product_element(e, k):
    """Split a product-element name "a|b|..." into its k components."""
    parts = e.split(PRODUCT_SEP)
    if len(parts) != k or any(not p for p in parts):
        raise ValidationError(f"element {e!r} is not a {k}-component product name")
    return tuple(parts)


def join_product_element(parts):
    return PRODUCT_SEP.join(parts)
