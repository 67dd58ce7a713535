"""The unary-type reduction pipeline: derive D/E relations from an
algebra-plus-trace package, rewrite boolean pp-formulas onto the derived
target structure, and verify the transfer equivalences by brute force.

The algebra/trace pair is an input, never discovered here; the package
validator enforces every consequence we can check and refuses silently
invalid packages.
"""

import itertools
from dataclasses import dataclass

from .algebra import subpower_closure
from .errors import BudgetExceededError, ValidationError
from .evaluate import (
    all_assignments,
    satisfies,
    solution_relation,
)
from .model import Assignment, Atom, Equality, PPFormula, RelStructure

BOOLEAN_UNIVERSE = ("0", "1")


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    failures: tuple

    def __str__(self):
        if self.ok:
            return "ok"
        return "FAILED:\n" + "\n".join("  - " + f for f in self.failures)


@dataclass(frozen=True)
class UnaryTypePackage:
    """An algebra with a designated two-element trace, a boolean source
    structure, and the derived D/E relations over the algebra."""

    algebra: object  # FinAlgebra
    trace: tuple  # (image of boolean 0, image of boolean 1)
    source: RelStructure  # boolean structure, universe ("0", "1")
    d_relations: dict  # source symbol -> frozenset of closed tuples
    e_relations: dict  # n -> frozenset (n = 1..|A|)
    target: RelStructure

    @property
    def k(self):
        return len(self.algebra.universe)

    def d_symbol(self, source_symbol):
        return f"D_{source_symbol}"

    def e_symbol(self, n):
        return f"E{n}"

    def embed(self, boolean_element):
        return self.trace[int(boolean_element)]

    def embed_assignment(self, f):
        return Assignment({v: self.embed(e) for v, e in f.bindings.items()})


def build_package(algebra, trace, source):
    """Compute the D/E relations by subpower closure and validate the
    trace-restriction identities; reports failures instead of guessing."""
    trace = tuple(trace)
    if len(trace) != 2 or len(set(trace)) != 2:
        raise ValidationError("trace must consist of two distinct elements")
    if any(t not in algebra.universe for t in trace):
        raise ValidationError("trace elements must belong to the algebra universe")
    if tuple(source.universe) != BOOLEAN_UNIVERSE:
        raise ValidationError("source structure must have universe {0, 1}")
    embed = {b: trace[int(b)] for b in BOOLEAN_UNIVERSE}

    d_relations = {}
    for sym, (arity, tuples) in source.relations.items():
        for c in BOOLEAN_UNIVERSE:
            if (c,) * arity not in tuples:
                raise ValidationError(
                    f"source relation {sym} misses the constant tuple on {c}"
                )
        seed = {tuple(embed[e] for e in t) for t in tuples}
        d_relations[sym] = subpower_closure(algebra, seed, include_diagonal=True)

    k = len(algebra.universe)
    e_relations = {}
    for n in range(1, k + 1):
        seed = set(itertools.product(trace, repeat=n))
        e_relations[n] = subpower_closure(algebra, seed, include_diagonal=True)

    failures = []
    trace_set = set(trace)
    for sym, (arity, tuples) in source.relations.items():
        boolean_slice = {
            t for t in d_relations[sym] if set(t) <= trace_set
        }
        expected = {tuple(embed[e] for e in t) for t in tuples}
        if boolean_slice != expected:
            failures.append(
                f"D relation for {sym} restricted to the trace differs from the source"
            )
    for n in range(1, k + 1):
        boolean_slice = {t for t in e_relations[n] if set(t) <= trace_set}
        if boolean_slice != set(itertools.product(trace, repeat=n)):
            failures.append(f"E{n} restricted to the trace is not the full power")
    if failures:
        raise ValidationError(
            "package validation failed: " + "; ".join(failures)
        )

    relations = {
        f"D_{sym}": (arity, d_relations[sym])
        for sym, (arity, _) in source.relations.items()
    }
    relations.update(
        {f"E{n}": (n, e_relations[n]) for n in range(1, k + 1)}
    )
    target = RelStructure(f"{algebra.name}_target", algebra.universe, relations)
    return UnaryTypePackage(algebra, trace, source, d_relations, e_relations, target)


def en_atoms(variables, k, e_symbol=lambda n: f"E{n}"):
    """Atoms pp-defining the E relation on the given variables: a single
    E_n atom when n <= k, otherwise one E_k atom per increasing
    k-subsequence (polynomial in n for fixed k)."""
    n = len(variables)
    if n == 0:
        return ()
    if n <= k:
        return (Atom(e_symbol(n), tuple(variables)),)
    return tuple(
        Atom(e_symbol(k), combo)
        for combo in itertools.combinations(tuple(variables), k)
    )


def en_pp_definition(n, k):
    """The E_n relation as a pp-formula over E_1..E_k with free variables
    x1..xn."""
    if n < 1 or k < 1:
        raise ValidationError("n and k must be positive")
    variables = tuple(f"x{i}" for i in range(1, n + 1))
    return PPFormula(f"E{n}_def", variables, (), en_atoms(variables, k))


def transform_formula(phi, pkg):
    """Rewrite a boolean-source formula onto the package target: source
    atoms become D atoms and the E conjunct over all variables (free and
    bound, canonical order) is appended."""
    phi.validate_signature(pkg.source.signature())
    atoms = tuple(
        a if isinstance(a, Equality) else Atom(pkg.d_symbol(a.symbol), a.args)
        for a in phi.atoms
    )
    atoms += en_atoms(phi.all_vars, pkg.k, pkg.e_symbol)
    return PPFormula(phi.name + "_u", phi.free_vars, phi.bound_vars, atoms)


def reduce_ppcon_pair(phi, psi, pkg):
    """Transform a containment instance over the boolean source into one
    over the package target, preserving the verdict."""
    if phi.free_vars != psi.free_vars:
        raise ValidationError("the two formulas must share free variables")
    return (transform_formula(phi, pkg), transform_formula(psi, pkg))


def verify_transfer(pkg, phi, budget=14):
    """Brute-force check of the two transfer equivalences for one formula:

    (a) boolean assignments satisfy phi on the source iff their embeddings
        satisfy the transformed formula on the target;
    (b) the target solution relation of the transformed formula equals the
        subpower closure (with diagonal) of the embedded boolean solution
        relation.

    Returns a report listing any counterexamples verbatim.
    """
    if len(phi.all_vars) > budget:
        raise BudgetExceededError(f"formula {phi.name} exceeds sweep budget")
    phi_t = transform_formula(phi, pkg)
    failures = []

    for g in all_assignments(BOOLEAN_UNIVERSE, phi.free_vars):
        on_source = satisfies(pkg.source, g, phi)
        on_target = satisfies(pkg.target, pkg.embed_assignment(g), phi_t)
        if on_source != on_target:
            failures.append(
                f"(a) assignment {g}: source={on_source} target={on_target}"
            )

    m = len(phi.free_vars)
    if m == 0:
        # sentence: the closure-side statement degenerates to truth equality
        source_true = satisfies(pkg.source, Assignment({}), phi)
        target_true = satisfies(pkg.target, Assignment({}), phi_t)
        if source_true != target_true:
            failures.append(
                f"(b) sentence truth differs: source={source_true} target={target_true}"
            )
    else:
        boolean_solutions = {
            tuple(pkg.embed(e) for e in t)
            for t in solution_relation(pkg.source, phi)
        }
        closure = subpower_closure(
            pkg.algebra, boolean_solutions, include_diagonal=True, arity=m
        )
        target_solutions = solution_relation(pkg.target, phi_t)
        for t in sorted(closure ^ target_solutions):
            side = "closure only" if t in closure else "target only"
            failures.append(f"(b) tuple {t}: {side}")

    return VerificationReport(not failures, tuple(failures))
