"""Semantics of pp-formulas over finite structures, plain and two-sorted,
and the equivalence/containment deciders.

Everything here is exhaustive search; the decided problems are
Pi^p_2-complete in general, so expect exponential worst-case behaviour.
A variable-count guard (default 16 total variables) protects against
accidental blowups and can be raised per call.
"""

import itertools

from .errors import BudgetExceededError, ValidationError
from .model import Assignment, Atom, Equality, Verdict

DEFAULT_VAR_BUDGET = 16


def _check_budget(phi, budget):
    total = len(phi.all_vars)
    if total > budget:
        raise BudgetExceededError(
            f"formula {phi.name} has {total} variables, budget is {budget}"
        )


def _atom_holds(structure, env, atom):
    if isinstance(atom, Equality):
        return env[atom.left] == env[atom.right]
    return tuple(env[v] for v in atom.args) in structure.relation(atom.symbol)


def satisfies(structure, assignment, phi, budget=DEFAULT_VAR_BUDGET):
    """True iff some extension of the assignment to the bound variables
    makes every atom hold; backtracking search over the bound variables."""
    phi.validate_signature(structure.signature())
    assignment.check_domain(phi.free_vars)
    _check_budget(phi, budget)
    env = dict(assignment.bindings)

    def backtrack(remaining):
        ready = [
            a
            for a in phi.atoms
            if all(v in env for v in a.variables())
        ]
        if not all(_atom_holds(structure, env, a) for a in ready):
            return False
        if not remaining:
            return True
        var = remaining[0]
        for e in structure.universe:
            env[var] = e
            if backtrack(remaining[1:]):
                del env[var]
                return True
            del env[var]
        return False

    return backtrack(list(phi.bound_vars))


def all_assignments(universe, variables):
    """Assignments of the variables into the universe, lexicographic in
    (variable order, universe order)."""
    for values in itertools.product(universe, repeat=len(variables)):
        yield Assignment(dict(zip(variables, values)))


def solution_set(structure, phi, budget=DEFAULT_VAR_BUDGET):
    """All satisfying assignments of the free variables, in lexicographic
    order."""
    return [
        f
        for f in all_assignments(structure.universe, phi.free_vars)
        if satisfies(structure, f, phi, budget)
    ]


def solution_relation(structure, phi, budget=DEFAULT_VAR_BUDGET):
    """The solution set as a relation whose columns follow free_vars."""
    return frozenset(
        tuple(f[v] for v in phi.free_vars)
        for f in solution_set(structure, phi, budget)
    )


def _check_same_free(phi, psi):
    if phi.free_vars != psi.free_vars:
        raise ValidationError(
            f"formulas {phi.name} and {psi.name} have different free variables"
        )


def decide_ppeq(structure, phi, psi, budget=DEFAULT_VAR_BUDGET):
    """Equivalence: equal solution sets.  A no-verdict's witness is the
    lexicographically least assignment in the symmetric difference."""
    _check_same_free(phi, psi)
    for f in all_assignments(structure.universe, phi.free_vars):
        if satisfies(structure, f, phi, budget) != satisfies(structure, f, psi, budget):
            return Verdict.no(f)
    return Verdict.yes()


def decide_ppcon(structure, phi, psi, budget=DEFAULT_VAR_BUDGET):
    """Containment: solutions of phi are solutions of psi.  Witness is the
    least assignment satisfying phi but not psi."""
    _check_same_free(phi, psi)
    for f in all_assignments(structure.universe, phi.free_vars):
        if satisfies(structure, f, phi, budget) and not satisfies(
            structure, f, psi, budget
        ):
            return Verdict.no(f)
    return Verdict.yes()


def reduce_con_to_eq(phi, psi):
    """Map a containment instance (phi, psi) to the equivalence instance
    (phi, phi & psi)."""
    from .transform import conjoin

    return (phi, conjoin(phi, psi))


# ---------------------------------------------------------------------------
# Two-sorted evaluation over pentagon structures


def _sorted_universe(p2, sort):
    return p2.B if sort == 1 else p2.C


def satisfies_sorted(p2, assignment, phi, budget=DEFAULT_VAR_BUDGET):
    """Two-sorted analogue of satisfies: sort-1 variables range over the
    first universe, sort-2 over the second."""
    assignment.check_domain(phi.free_vars)
    _check_budget(phi, budget)
    for v in phi.free_vars:
        if assignment[v] not in _sorted_universe(p2, phi.sorts[v]):
            raise ValidationError(
                f"assignment maps {v!r} outside its sort-{phi.sorts[v]} universe"
            )
    env = dict(assignment.bindings)

    def holds(a):
        if isinstance(a, Equality):
            return env[a.left] == env[a.right]
        return tuple(env[v] for v in a.args) in p2.R

    def backtrack(remaining):
        ready = [a for a in phi.atoms if all(v in env for v in a.variables())]
        if not all(holds(a) for a in ready):
            return False
        if not remaining:
            return True
        var = remaining[0]
        for e in _sorted_universe(p2, phi.sorts[var]):
            env[var] = e
            if backtrack(remaining[1:]):
                del env[var]
                return True
            del env[var]
        return False

    return backtrack(list(phi.bound_vars))


def sorted_assignments(p2, phi, variables=None):
    variables = phi.free_vars if variables is None else variables
    pools = [_sorted_universe(p2, phi.sorts[v]) for v in variables]
    for values in itertools.product(*pools):
        yield Assignment(dict(zip(variables, values)))


def decide_entailment_sorted(phi, psi, p2_list, budget=DEFAULT_VAR_BUDGET):
    """Entailment of sorted formulas over every listed two-sorted pentagon
    structure; a no-witness records the failing structure index and
    assignment."""
    _check_same_free(phi, psi)
    for v in phi.free_vars:
        if phi.sorts[v] != psi.sorts[v]:
            raise ValidationError(f"free variable {v!r} has different sorts")
    for index, p2 in enumerate(p2_list):
        for f in sorted_assignments(p2, phi):
            if satisfies_sorted(p2, f, phi, budget) and not satisfies_sorted(
                p2, f, psi, budget
            ):
                return Verdict.no((index, f))
    return Verdict.yes()
