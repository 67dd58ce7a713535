"""The non-congruence-modular reduction pipeline: DNF tautology, the
translation of lattice terms into sorted pp-formulas over two-sorted
pentagon structures, and the translation of sorted pp-formulas into
plain pp-formulas over an amalgam structure, with brute-force
verification of the correctness laws.
"""

import itertools
from dataclasses import dataclass, field

from .algebra import preserves
from .errors import BudgetExceededError, ValidationError
from .evaluate import (
    all_assignments,
    satisfies,
    satisfies_sorted,
    sorted_assignments,
)
from .lattice import (
    EquivRelation,
    Join,
    Meet,
    Var,
    decompose_pentagon,
    eval_lattice_term,
    is_congruence,
    is_interesting,
    pentagon_two_sorted,
    sublattice_generated,
    term_variables,
    validate_pentagon,
)
from .model import (
    Assignment,
    Atom,
    Equality,
    PPFormula,
    RelStructure,
    SortedPPFormula,
    Verdict,
)
from .unary import VerificationReport

DNF_VAR_GUARD = 20


# ---------------------------------------------------------------------------
# DNF tautology


@dataclass(frozen=True)
class DNFFormula:
    """Disjunction of conjunctions of literals; a literal is a pair
    (variable, polarity)."""

    disjuncts: tuple

    def __post_init__(self):
        if not self.disjuncts or any(not d for d in self.disjuncts):
            raise ValidationError("DNF needs at least one non-empty disjunct")
        if not self.variables:
            raise ValidationError("DNF has no variables")

    @property
    def variables(self):
        out = []
        for d in self.disjuncts:
            for v, _ in d:
                if v not in out:
                    out.append(v)
        return tuple(out)

    def evaluate(self, valuation):
        return any(
            all(valuation[v] == pos for v, pos in d) for d in self.disjuncts
        )


def decide_dnf_tautology(dnf, guard=DNF_VAR_GUARD):
    """Truth-table sweep; a no-verdict carries the least falsifying
    valuation (False before True, variables in first-appearance order)."""
    variables = dnf.variables
    if len(variables) > guard:
        raise BudgetExceededError(
            f"{len(variables)} DNF variables exceed the guard of {guard}"
        )
    for values in itertools.product((False, True), repeat=len(variables)):
        valuation = dict(zip(variables, values))
        if not dnf.evaluate(valuation):
            return Verdict.no(valuation)
    return Verdict.yes()


# ---------------------------------------------------------------------------
# Lattice terms -> sorted pp-formulas


def chain_length(pentagons):
    """Maximum second-coordinate size |C| over the pentagon family; the
    number of composition rounds needed to realize joins exactly."""
    if not pentagons:
        raise ValidationError("need at least one pentagon")
    return max(len(decompose_pentagon(p).C) for p in pentagons)


def term_to_sorted_formula(t, pentagons, name=None, variables=None):
    """Translate a lattice term into a sorted pp-formula over {R}.

    The output has the term's variables as sort-1 free variables plus two
    sort-2 free endpoints y1, y2.  Meets share the endpoints; a join of k
    arguments is realized as a chain of fresh sort-2 variables with
    chain_length(pentagons) composition rounds.  ``variables`` may name a
    superset of the term's variables to pad the free-variable list (so a
    pair of translated formulas shares one signature).
    """
    m = chain_length(pentagons)
    xs = term_variables(t)
    if variables is not None:
        missing = set(xs) - set(variables)
        if missing:
            raise ValidationError(
                f"variables {sorted(missing)} of the term are not listed"
            )
        xs = tuple(variables)
    if {"y1", "y2"} & set(xs):
        raise ValidationError("term variables may not be named y1 or y2")
    counter = itertools.count(1)
    bound = []
    atoms = []

    def build(term, left, right):
        if isinstance(term, Var):
            atoms.append(Atom("R", (term.name, left, right)))
            return
        if isinstance(term, Meet):
            for a in term.args:
                build(a, left, right)
            return
        k = len(term.args)
        z = {(0, k): left, (m, k): right}
        for i in range(1, m + 1):
            for j in range(1, k + 1):
                if (i, j) not in z:
                    fresh = f"_z{next(counter)}"
                    z[(i, j)] = fresh
                    bound.append(fresh)
        for i in range(1, m + 1):
            build(term.args[0], z[(i - 1, k)], z[(i, 1)])
            for j in range(2, k + 1):
                build(term.args[j - 1], z[(i, j - 1)], z[(i, j)])

    build(t, "y1", "y2")
    sorts = {v: 1 for v in xs}
    sorts.update({"y1": 2, "y2": 2})
    sorts.update({v: 2 for v in bound})
    return SortedPPFormula(
        name or "term_fml",
        xs + ("y1", "y2"),
        tuple(bound),
        tuple(atoms),
        sorts=sorts,
    )


def pentagon_generators(pentagon):
    """The generated sublattice K and the per-B generator map alpha_b."""
    dec = decompose_pentagon(pentagon)
    lattice = sublattice_generated(list(dec.alphas))
    return dec, lattice


def verify_term_translation(t, pentagon, pentagons=None, budget=16):
    """Exhaustive check that the translated formula realizes the term:
    for every choice of first-sort values and endpoint pair, the formula
    holds on the two-sorted pentagon structure iff the endpoints are
    related by the term evaluated at the induced generators."""
    pentagons = pentagons or [pentagon]
    dec, lattice = pentagon_generators(pentagon)
    p2 = pentagon_two_sorted(dec)
    phi = term_to_sorted_formula(t, pentagons)
    xs = term_variables(t)
    if len(phi.all_vars) > budget:
        raise BudgetExceededError("translated formula exceeds the sweep budget")
    failures = []
    for bs in itertools.product(p2.B, repeat=len(xs)):
        g = dict(zip(xs, bs))
        value = eval_lattice_term(
            t, {x: dec.alpha_b[b] for x, b in g.items()}, lattice
        )
        for c, c2 in itertools.product(p2.C, repeat=2):
            f = Assignment({**g, "y1": c, "y2": c2})
            holds = satisfies_sorted(p2, f, phi, budget)
            related = value.related(c, c2)
            if holds != related:
                failures.append(
                    f"b-assignment {g}, endpoints ({c},{c2}): "
                    f"formula={holds} term={related}"
                )
    return VerificationReport(not failures, tuple(failures))


def reduce_term_pair(t, t_prime, pentagons):
    """Translate a term-inequality instance to a sorted-entailment
    instance; entailment over each two-sorted pentagon holds iff the
    inequality holds under all assignments into that pentagon's
    generators.  Both outputs share one free-variable list: the union of
    the two terms' variables in order of first appearance."""
    shared = list(term_variables(t))
    shared.extend(
        v for v in term_variables(t_prime) if v not in shared
    )
    return (
        term_to_sorted_formula(t, pentagons, name="lhs", variables=shared),
        term_to_sorted_formula(t_prime, pentagons, name="rhs", variables=shared),
    )


def sorted_formula_size(phi):
    return len(phi.atoms)


def size_bound(d, n, l_const, b_const, e_const):
    """Recursive size bound: u(0, n) = L*n and u(d+1, n) = B*n*u(d, n) + E."""
    value = l_const * n
    for _ in range(d):
        value = b_const * n * value + e_const
    return value


# ---------------------------------------------------------------------------
# Amalgam packages and sorted -> plain translation


@dataclass(frozen=True)
class AmalgamPackage:
    """An algebra with congruences alpha < beta, gamma, an interesting
    pentagon family living inside it, and the D relations covering
    exactly the tuples contained in a common pentagon carrier."""

    algebra: object  # FinAlgebra
    alpha: EquivRelation
    beta: EquivRelation
    gamma: EquivRelation
    pentagons: tuple
    d_base: dict  # k -> frozenset of k-tuples, for k = 1..cutoff
    cutoff: int
    target: RelStructure = field(default=None)

    def __post_init__(self):
        if self.target is None:
            relations = {
                "alpha": (2, self.alpha.pairs()),
                "beta": (2, self.beta.pairs()),
                "gamma": (2, self.gamma.pairs()),
            }
            for k in range(1, self.cutoff + 1):
                relations[f"D{k}"] = (k, frozenset(self.d_base[k]))
            object.__setattr__(
                self,
                "target",
                RelStructure(
                    f"{self.algebra.name}_amalgam", self.algebra.universe, relations
                ),
            )

    def carriers(self):
        return [set(p.carrier) for p in self.pentagons]


def covered_relation(pentagons, universe, k):
    """The k-ary relation of tuples whose entries share a pentagon
    carrier."""
    carriers = [set(p.carrier) for p in pentagons]
    return frozenset(
        t
        for t in itertools.product(universe, repeat=k)
        if any(set(t) <= c for c in carriers)
    )


def build_amalgam(algebra, alpha, beta, gamma, pentagons, cutoff):
    d_base = {
        k: covered_relation(pentagons, algebra.universe, k)
        for k in range(1, cutoff + 1)
    }
    pkg = AmalgamPackage(
        algebra, alpha, beta, gamma, tuple(pentagons), d_base, cutoff
    )
    report = validate_amalgam(pkg)
    if not report.ok:
        raise ValidationError(str(report))
    return pkg


def validate_amalgam(pkg, check_axiom4=True):
    """Check every package invariant; returns a report listing all
    failures rather than stopping at the first."""
    from .lattice import join_via_product, meet

    failures = []
    universe = pkg.algebra.universe
    zero = EquivRelation.zero(universe)
    if not (pkg.alpha.leq(pkg.beta) and pkg.alpha != pkg.beta):
        failures.append("alpha is not strictly below beta")
    if meet([pkg.gamma, pkg.beta]) != zero:
        failures.append("gamma meet beta is not the identity relation")
    if join_via_product([pkg.alpha, pkg.gamma]) != join_via_product(
        [pkg.beta, pkg.gamma]
    ):
        failures.append("alpha join gamma differs from beta join gamma")
    for name, rel in (("alpha", pkg.alpha), ("beta", pkg.beta), ("gamma", pkg.gamma)):
        if not is_congruence(pkg.algebra, rel):
            failures.append(f"{name} is not compatible with the operations")
    interesting = False
    for p in pkg.pentagons:
        carrier = set(p.carrier)
        if not carrier <= set(universe):
            failures.append(f"pentagon {p.name}: carrier not inside the universe")
            continue
        for name, global_rel, local_rel in (
            ("alpha", pkg.alpha, p.alpha),
            ("beta", pkg.beta, p.beta),
            ("gamma", pkg.gamma, p.gamma),
        ):
            restricted = EquivRelation.from_pairs(
                p.carrier,
                [q for q in global_rel.pairs() if q[0] in carrier and q[1] in carrier],
            )
            if restricted != local_rel:
                failures.append(
                    f"pentagon {p.name}: {name} is not the restriction of the "
                    "global relation"
                )
        status, axiom = validate_pentagon(p, check_axiom4=check_axiom4)
        if status != "ok":
            failures.append(f"pentagon {p.name}: axiom {axiom} fails")
            continue
        if is_interesting(decompose_pentagon(p))[0] == "yes":
            interesting = True
    if not interesting:
        failures.append("no pentagon in the family is interesting")
    for k in range(1, pkg.cutoff + 1):
        if k not in pkg.d_base:
            failures.append(f"D{k} is missing")
            continue
        expected = covered_relation(pkg.pentagons, universe, k)
        if frozenset(pkg.d_base[k]) != expected:
            failures.append(f"D{k} differs from the pentagon-covered tuples")
        for op in pkg.algebra.operations.values():
            if not preserves(op, frozenset(pkg.d_base[k])):
                failures.append(f"D{k} is not compatible with the operations")
                break
    return VerificationReport(not failures, tuple(failures))


def delta_pp_definition(k, cutoff):
    """The D_k relation as a pp-formula over D_1..D_cutoff with free
    variables x1..xk: a single atom when k <= cutoff, otherwise one
    D_cutoff atom per increasing cutoff-subsequence."""
    if k < 1:
        raise ValidationError("k must be positive")
    variables = tuple(f"x{i}" for i in range(1, k + 1))
    return PPFormula(f"D{k}_def", variables, (), delta_atoms(variables, cutoff))


def delta_atoms(variables, cutoff):
    n = len(variables)
    if n == 0:
        return ()
    if n <= cutoff:
        return (Atom(f"D{n}", tuple(variables)),)
    return tuple(
        Atom(f"D{cutoff}", combo)
        for combo in itertools.combinations(tuple(variables), cutoff)
    )


def sorted_to_pp(phi, pkg):
    """Translate a sorted pp-formula over {R} into a plain pp-formula over
    the amalgam target.

    Every variable z is primed to z_p; sort-1 equalities become beta
    atoms, sort-2 equalities gamma atoms, and each R-atom becomes the
    five-atom pattern with two fresh witnesses.  A D conjunct over all
    primed variables plus all fresh witnesses is appended, and the fresh
    existentials come first.
    """

    def prime(v):
        return f"{v}_p"

    counter = itertools.count(1)
    fresh = []
    atoms = []
    for a in phi.atoms:
        if isinstance(a, Equality):
            sym = "beta" if phi.sorts[a.left] == 1 else "gamma"
            atoms.append(Atom(sym, (prime(a.left), prime(a.right))))
        else:
            x, y, y2 = a.args
            w1, w2 = f"_w{next(counter)}", f"_w{next(counter)}"
            fresh.extend([w1, w2])
            atoms.extend(
                [
                    Atom("beta", (w1, prime(x))),
                    Atom("beta", (w2, prime(x))),
                    Atom("gamma", (w1, prime(y))),
                    Atom("gamma", (w2, prime(y2))),
                    Atom("alpha", (w1, w2)),
                ]
            )
    delta_args = tuple(prime(v) for v in phi.all_vars) + tuple(fresh)
    atoms.extend(delta_atoms(delta_args, pkg.cutoff))
    result = PPFormula(
        phi.name + "_pp",
        tuple(prime(v) for v in phi.free_vars),
        tuple(fresh) + tuple(prime(v) for v in phi.bound_vars),
        tuple(atoms),
    )
    return result.validate_signature(pkg.target.signature())


def reduce_sorted_pair(phi, psi, pkg):
    """Translate a sorted-entailment instance to a plain containment
    instance over the amalgam target."""
    if phi.free_vars != psi.free_vars:
        raise ValidationError("the two formulas must share free variables")
    return (sorted_to_pp(phi, pkg), sorted_to_pp(psi, pkg))


def _decompositions(pkg):
    return [decompose_pentagon(p) for p in pkg.pentagons]


def _match_sorted(g, phi, dec):
    """The sorted assignment matching g on a pentagon: first-sort
    variables take the beta-coordinate, second-sort the gamma-coordinate."""
    bindings = {}
    for v in phi.free_vars:
        element = g[f"{v}_p"]
        bi, ci = dec.coords[element]
        bindings[v] = bi if phi.sorts[v] == 1 else ci
    return Assignment(bindings)


def verify_matching(pkg, phi, budget=14):
    """Brute-force both directions of the matching law for one sorted
    formula: satisfying assignments of the translated formula live inside
    a pentagon carrier and project to satisfying sorted assignments, and
    conversely every assignment matching a sorted solution satisfies the
    translated formula."""
    phi_pp = sorted_to_pp(phi, pkg)
    if len(phi_pp.all_vars) > budget:
        raise BudgetExceededError("translated formula exceeds the sweep budget")
    decs = _decompositions(pkg)
    p2s = [pentagon_two_sorted(d) for d in decs]
    failures = []

    for g in all_assignments(pkg.target.universe, phi_pp.free_vars):
        if not satisfies(pkg.target, g, phi_pp):
            continue
        values = set(g.bindings.values())
        matched = False
        for dec, p2 in zip(decs, p2s):
            if not values <= set(dec.pentagon.carrier):
                continue
            f = _match_sorted(g, phi, dec)
            if satisfies_sorted(p2, f, phi):
                matched = True
                break
        if not matched:
            failures.append(
                f"solution {g} of the translated formula has no matching "
                "sorted solution on any pentagon"
            )

    for index, (dec, p2) in enumerate(zip(decs, p2s)):
        for f in sorted_assignments(p2, phi):
            if not satisfies_sorted(p2, f, phi):
                continue
            pools = []
            for v in phi.free_vars:
                if phi.sorts[v] == 1:
                    pools.append(
                        [
                            e
                            for e in dec.pentagon.carrier
                            if dec.coords[e][0] == f[v]
                        ]
                    )
                else:
                    pools.append(
                        [
                            e
                            for e in dec.pentagon.carrier
                            if dec.coords[e][1] == f[v]
                        ]
                    )
            for values in itertools.product(*pools):
                g = Assignment(
                    dict(zip((f"{v}_p" for v in phi.free_vars), values))
                )
                if not satisfies(pkg.target, g, phi_pp):
                    failures.append(
                        f"pentagon {index}: sorted solution {f} has a matching "
                        f"assignment {g} that fails the translated formula"
                    )
    return VerificationReport(not failures, tuple(failures))
