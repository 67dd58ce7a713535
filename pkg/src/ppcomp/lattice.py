"""Equivalence relations, congruences, finite lattices, pentagons, and
lattice terms.

Equivalence relations are stored as canonical partitions (blocks ordered
by least carrier element); joins go through the relational-product
formula join = (theta_1 o ... o theta_k)^m so that the output is exact
and deterministic.
"""

import itertools
import warnings
from dataclasses import dataclass, field

from .errors import BudgetExceededError, ValidationError
from .model import Verdict

CONGRUENCE_LATTICE_GUARD = 8
TERM_INEQ_LATTICE_GUARD = 12
TERM_INEQ_VAR_GUARD = 4


def _canonical_blocks(carrier, blocks):
    index = {e: i for i, e in enumerate(carrier)}
    canon = tuple(
        sorted(
            (tuple(sorted(b, key=index.get)) for b in blocks),
            key=lambda b: index[b[0]],
        )
    )
    return canon


@dataclass(frozen=True)
class EquivRelation:
    """An equivalence relation on a finite carrier, stored as a partition."""

    carrier: tuple
    blocks: tuple  # tuple of tuples, canonical order

    def __post_init__(self):
        seen = [e for b in self.blocks for e in b]
        if sorted(map(str, seen)) != sorted(map(str, self.carrier)) or len(seen) != len(
            set(seen)
        ):
            raise ValidationError("blocks do not partition the carrier")
        if any(not b for b in self.blocks):
            raise ValidationError("empty block")

    @staticmethod
    def from_blocks(carrier, blocks):
        return EquivRelation(tuple(carrier), _canonical_blocks(tuple(carrier), blocks))

    @staticmethod
    def from_pairs(carrier, pairs):
        parent = {e: e for e in carrier}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in pairs:
            parent[find(a)] = find(b)
        groups = {}
        for e in carrier:
            groups.setdefault(find(e), []).append(e)
        return EquivRelation.from_blocks(carrier, groups.values())

    @staticmethod
    def zero(carrier):
        return EquivRelation.from_blocks(carrier, [[e] for e in carrier])

    @staticmethod
    def one(carrier):
        return EquivRelation.from_blocks(carrier, [list(carrier)])

    def block_of(self, e):
        for b in self.blocks:
            if e in b:
                return b
        raise KeyError(e)

    def related(self, a, b):
        return b in self.block_of(a)

    def pairs(self):
        return frozenset(
            (a, b) for block in self.blocks for a in block for b in block
        )

    def leq(self, other):
        """Refinement order: every block of self sits inside a block of other."""
        return all(set(b) <= set(other.block_of(b[0])) for b in self.blocks)

    def __str__(self):
        return "{" + ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


def _check_carrier(thetas):
    carriers = {t.carrier for t in thetas}
    if len(carriers) != 1:
        raise ValidationError("equivalence relations have different carriers")
    return thetas[0].carrier


def compose(theta, theta_prime):
    """Relational product: pairs (a, b) with a theta c and c theta' b."""
    _check_carrier([theta, theta_prime])
    out = set()
    for a, c in theta.pairs():
        for b in theta_prime.block_of(c):
            out.add((a, b))
    return frozenset(out)


def _compose_rels(rel1, rel2):
    right = {}
    for c, b in rel2:
        right.setdefault(c, []).append(b)
    return frozenset((a, b) for a, c in rel1 for b in right.get(c, ()))


def join_via_product(thetas):
    """Join of equivalence relations as the |carrier|-fold power of their
    composition."""
    thetas = list(thetas)
    carrier = _check_carrier(thetas)
    m = len(carrier)
    comp = thetas[0].pairs()
    for t in thetas[1:]:
        comp = _compose_rels(comp, t.pairs())
    power = comp
    for _ in range(m - 1):
        power = _compose_rels(power, comp)
    return EquivRelation.from_pairs(carrier, power)


def meet(thetas):
    thetas = list(thetas)
    carrier = _check_carrier(thetas)
    common = set(thetas[0].pairs())
    for t in thetas[1:]:
        common &= t.pairs()
    return EquivRelation.from_pairs(carrier, common)


def congruence_generated(algebra, pairs):
    """Least equivalence relation containing the pairs and compatible with
    every basic operation; fixpoint of unary-polynomial translation plus
    equivalence closure."""
    current = EquivRelation.from_pairs(algebra.universe, pairs)
    ops = list(algebra.operations.values())
    while True:
        new_pairs = set(current.pairs())
        for f in ops:
            for a, b in current.pairs():
                if a == b:
                    continue
                for pos in range(f.arity):
                    others = itertools.product(
                        algebra.universe, repeat=f.arity - 1
                    )
                    for rest in others:
                        left = rest[:pos] + (a,) + rest[pos:]
                        right = rest[:pos] + (b,) + rest[pos:]
                        new_pairs.add((f(*left), f(*right)))
        nxt = EquivRelation.from_pairs(algebra.universe, new_pairs)
        if nxt == current:
            return current
        current = nxt


def all_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partial in all_partitions(rest):
        for i in range(len(partial)):
            yield partial[:i] + [[first] + partial[i]] + partial[i + 1 :]
        yield [[first]] + partial


def is_congruence(algebra, theta):
    """Compatibility of theta (as a binary relation) with every operation."""
    rel = theta.pairs()
    for f in algebra.operations.values():
        for rows in itertools.product(list(rel), repeat=f.arity):
            image = (
                f(*(r[0] for r in rows)),
                f(*(r[1] for r in rows)),
            )
            if image not in rel:
                return False
    return True


@dataclass
class FiniteLattice:
    """A finite lattice with lazily memoized meet/join tables."""

    elements: tuple
    meet_fn: callable
    join_fn: callable
    _meet_cache: dict = field(default_factory=dict, repr=False)
    _join_cache: dict = field(default_factory=dict, repr=False)

    def meet(self, x, y):
        key = (x, y)
        if key not in self._meet_cache:
            self._meet_cache[key] = self.meet_fn(x, y)
        return self._meet_cache[key]

    def join(self, x, y):
        key = (x, y)
        if key not in self._join_cache:
            self._join_cache[key] = self.join_fn(x, y)
        return self._join_cache[key]

    def leq(self, x, y):
        return self.meet(x, y) == x

    def check_axioms(self):
        """Commutativity, associativity, absorption on all tuples; closure
        of the element set under both operations."""
        es = self.elements
        for x, y in itertools.product(es, repeat=2):
            if self.meet(x, y) not in es or self.join(x, y) not in es:
                raise ValidationError("element set not closed under meet/join")
            if self.meet(x, y) != self.meet(y, x) or self.join(x, y) != self.join(y, x):
                raise ValidationError("commutativity fails")
            if self.meet(x, self.join(x, y)) != x or self.join(x, self.meet(x, y)) != x:
                raise ValidationError("absorption fails")
        for x, y, z in itertools.product(es, repeat=3):
            if self.meet(self.meet(x, y), z) != self.meet(x, self.meet(y, z)):
                raise ValidationError("meet associativity fails")
            if self.join(self.join(x, y), z) != self.join(x, self.join(y, z)):
                raise ValidationError("join associativity fails")
        return self

    @staticmethod
    def of_equiv_relations(rels):
        rels = tuple(rels)
        return FiniteLattice(
            rels,
            lambda x, y: meet([x, y]),
            lambda x, y: join_via_product([x, y]),
        )

    @staticmethod
    def chain(n):
        """The n-element chain 0 < 1 < ... < n-1."""
        return FiniteLattice(tuple(range(n)), min, max)


def congruence_lattice(algebra):
    """All congruences of the algebra, as a lattice under intersection and
    the relational-product join."""
    if len(algebra.universe) > CONGRUENCE_LATTICE_GUARD:
        raise BudgetExceededError(
            f"congruence lattice guarded at |A| <= {CONGRUENCE_LATTICE_GUARD}"
        )
    congruences = []
    for blocks in all_partitions(algebra.universe):
        theta = EquivRelation.from_blocks(algebra.universe, blocks)
        if is_congruence(algebra, theta):
            congruences.append(theta)
    return FiniteLattice.of_equiv_relations(congruences)


def check_modular_law(lattice):
    """Check x <= y implies x v (y ^ z) = y ^ (x v z) over all triples.

    Returns ("modular", None) or ("witness", (x, y, z)) with the first
    violating triple in element order.
    """
    es = lattice.elements
    for x in es:
        for y in es:
            if not lattice.leq(x, y):
                continue
            for z in es:
                left = lattice.join(x, lattice.meet(y, z))
                right = lattice.meet(y, lattice.join(x, z))
                if left != right:
                    return ("witness", (x, y, z))
    return ("modular", None)


@dataclass(frozen=True)
class Pentagon:
    """A carrier with three equivalence relations alpha <= beta, gamma."""

    name: str
    carrier: tuple
    alpha: EquivRelation
    beta: EquivRelation
    gamma: EquivRelation


def validate_pentagon(pent, check_axiom4=True):
    """Check the defining axioms in order:
    1. alpha <= beta
    2. beta ^ gamma = 0
    3. beta o gamma = 1
    4. alpha v gamma = 1  (skippable; unused by the reductions)

    Returns ("ok", None) or ("failed", axiom_number).
    """
    carrier = pent.carrier
    for rel in (pent.alpha, pent.beta, pent.gamma):
        if rel.carrier != carrier:
            raise ValidationError("pentagon relations must share the carrier")
    if not pent.alpha.leq(pent.beta):
        return ("failed", 1)
    if meet([pent.beta, pent.gamma]) != EquivRelation.zero(carrier):
        return ("failed", 2)
    full = {(a, b) for a in carrier for b in carrier}
    if compose(pent.beta, pent.gamma) != frozenset(full):
        return ("failed", 3)
    if check_axiom4:
        if join_via_product([pent.alpha, pent.gamma]) != EquivRelation.one(carrier):
            return ("failed", 4)
    return ("ok", None)


@dataclass(frozen=True)
class PentagonDecomposition:
    """Product coordinates of a pentagon: carrier = B x C with B the
    beta-classes and C the gamma-classes."""

    pentagon: Pentagon
    B: tuple  # beta-classes (tuples of carrier elements)
    C: tuple  # gamma-classes
    coords: dict  # carrier element -> (index into B, index into C)
    alpha_b: dict  # index into B -> EquivRelation on range(len(C))
    blocks: tuple  # groups of B-indices with equal alpha_b
    alphas: tuple  # distinct alpha_b values, one per block

    def element_at(self, b_index, c_index):
        for p, (bi, ci) in self.coords.items():
            if (bi, ci) == (b_index, c_index):
                return p
        raise KeyError((b_index, c_index))


def decompose_pentagon(pent, check_axiom4=True):
    status, axiom = validate_pentagon(pent, check_axiom4=check_axiom4)
    if status != "ok":
        raise ValidationError(f"pentagon {pent.name}: axiom {axiom} fails")
    B = pent.beta.blocks
    C = pent.gamma.blocks
    b_of = {e: i for i, b in enumerate(B) for e in b}
    c_of = {e: i for i, c in enumerate(C) for e in c}
    coords = {e: (b_of[e], c_of[e]) for e in pent.carrier}
    if len(set(coords.values())) != len(pent.carrier) or len(pent.carrier) != len(
        B
    ) * len(C):
        raise ValidationError(f"pentagon {pent.name}: coordinates are not a bijection")
    c_carrier = tuple(range(len(C)))
    inverse = {v: k for k, v in coords.items()}
    alpha_b = {}
    for bi in range(len(B)):
        rel_pairs = [
            (ci, cj)
            for ci in c_carrier
            for cj in c_carrier
            if pent.alpha.related(inverse[(bi, ci)], inverse[(bi, cj)])
        ]
        alpha_b[bi] = EquivRelation.from_pairs(c_carrier, rel_pairs)
    blocks, alphas = [], []
    for bi in range(len(B)):
        if alpha_b[bi] in alphas:
            blocks[alphas.index(alpha_b[bi])].append(bi)
        else:
            alphas.append(alpha_b[bi])
            blocks.append([bi])
    return PentagonDecomposition(
        pent, B, C, coords, alpha_b, tuple(map(tuple, blocks)), tuple(alphas)
    )


def is_interesting(dec):
    """First pair of block indices (j, k) with alpha_j strictly below
    alpha_k; ("no", None) when no comparable pair exists."""
    for j, k in itertools.product(range(len(dec.alphas)), repeat=2):
        if j == k:
            continue
        if dec.alphas[j].leq(dec.alphas[k]) and dec.alphas[j] != dec.alphas[k]:
            return ("yes", (j, k))
    return ("no", None)


@dataclass(frozen=True)
class Pentagon2Sorted:
    """Two-sorted view of a pentagon: sorts B and C plus the ternary
    relation R(b, c, c') holding when (c, c') is in the relation induced
    by b."""

    B: tuple
    C: tuple
    R: frozenset  # triples over B x C x C

    def __post_init__(self):
        for b in self.B:
            for c in self.C:
                if (b, c, c) not in self.R:
                    raise ValidationError("R misses a reflexive triple")
        for b in self.B:
            fiber = [(c, c2) for (b2, c, c2) in self.R if b2 == b]
            EquivRelation.from_pairs(self.C, fiber).pairs()
            sym = {(y, x) for x, y in fiber}
            closure = EquivRelation.from_pairs(self.C, fiber).pairs()
            if set(fiber) != set(closure) or sym != set(fiber):
                raise ValidationError("an R fiber is not an equivalence relation")


def pentagon_two_sorted(dec):
    b_sort = tuple(range(len(dec.B)))
    c_sort = tuple(range(len(dec.C)))
    triples = frozenset(
        (b, c, c2)
        for b in b_sort
        for c in c_sort
        for c2 in c_sort
        if dec.alpha_b[b].related(c, c2)
    )
    return Pentagon2Sorted(b_sort, c_sort, triples)


def sublattice_generated(gens):
    """Closure of the generators under meet and the relational-product
    join; the result need not contain the bounds of Eq(C)."""
    gens = list(gens)
    _check_carrier(gens)
    closed = list(dict.fromkeys(gens))
    changed = True
    while changed:
        changed = False
        for x, y in itertools.product(list(closed), repeat=2):
            for cand in (meet([x, y]), join_via_product([x, y])):
                if cand not in closed:
                    closed.append(cand)
                    changed = True
    return FiniteLattice.of_equiv_relations(closed)


# ---------------------------------------------------------------------------
# Lattice terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Meet:
    args: tuple


@dataclass(frozen=True)
class Join:
    args: tuple


def term_depth(t):
    if isinstance(t, Var):
        return 0
    return 1 + max(term_depth(a) for a in t.args)


def term_leaves(t):
    if isinstance(t, Var):
        return 1
    return sum(term_leaves(a) for a in t.args)


def term_variables(t):
    if isinstance(t, Var):
        return (t.name,)
    out = []
    for a in t.args:
        for v in term_variables(a):
            if v not in out:
                out.append(v)
    return tuple(out)


def eval_lattice_term(t, assignment, lattice):
    """Bottom-up evaluation of a term under an assignment into the lattice."""
    if isinstance(t, Var):
        if t.name not in assignment:
            raise ValidationError(f"unbound term variable {t.name!r}")
        return assignment[t.name]
    values = [eval_lattice_term(a, assignment, lattice) for a in t.args]
    fold = lattice.meet if isinstance(t, Meet) else lattice.join
    result = values[0]
    for v in values[1:]:
        result = fold(result, v)
    return result


def decide_term_ineq(t, t_prime, lattices, subsets=None):
    """Decide whether t <= t' under every assignment into each lattice
    (or into its designated generator subset when given)."""
    variables = tuple(
        dict.fromkeys(term_variables(t) + term_variables(t_prime))
    )
    if max(term_depth(t), term_depth(t_prime)) > 4:
        warnings.warn("term depth exceeds 4; deciding anyway", stacklevel=2)
    for index, lattice in enumerate(lattices):
        pool = lattice.elements if subsets is None else tuple(subsets[index])
        if len(lattice.elements) > TERM_INEQ_LATTICE_GUARD and len(
            variables
        ) > TERM_INEQ_VAR_GUARD:
            raise BudgetExceededError(
                "term inequality sweep over a large lattice with many variables"
            )
        for values in itertools.product(pool, repeat=len(variables)):
            g = dict(zip(variables, values))
            if not lattice.leq(
                eval_lattice_term(t, g, lattice),
                eval_lattice_term(t_prime, g, lattice),
            ):
                return Verdict.no((index, g))
    return Verdict.yes()
