import itertools

import pytest

from ppcomp.algebra import FinAlgebra, OperationTable
from ppcomp.errors import BudgetExceededError, ValidationError
from ppcomp.lattice import (
    EquivRelation,
    FiniteLattice,
    Join,
    Meet,
    Pentagon,
    Var,
    all_partitions,
    check_modular_law,
    compose,
    congruence_generated,
    congruence_lattice,
    decide_term_ineq,
    decompose_pentagon,
    eval_lattice_term,
    is_congruence,
    is_interesting,
    join_via_product,
    meet,
    pentagon_two_sorted,
    sublattice_generated,
    term_depth,
    term_leaves,
    term_variables,
)

CARRIER = ("0", "1", "2", "3")


def oracle_join(thetas):
    """Join of equivalence relations as the transitive closure of the
    union of their pair sets, computed with a plain reachability sweep."""
    carrier = thetas[0].carrier
    adj = {a: {a} for a in carrier}
    for theta in thetas:
        for a, b in theta.pairs():
            adj[a].add(b)
    pairs = set()
    for start in carrier:
        seen = {start}
        frontier = [start]
        while frontier:
            node = frontier.pop()
            for nxt in adj[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        pairs.update((start, x) for x in seen)
    return EquivRelation.from_pairs(carrier, pairs)


def test_equiv_relation_canonical_blocks():
    a = EquivRelation.from_blocks(CARRIER, [["1", "0"], ["3", "2"]])
    b = EquivRelation.from_pairs(CARRIER, [("0", "1"), ("2", "3")])
    assert a == b
    assert a.blocks == (("0", "1"), ("2", "3"))


def test_equiv_relation_rejects_bad_blocks():
    with pytest.raises(ValidationError):
        EquivRelation.from_blocks(CARRIER, [["0", "1"], ["1", "2"], ["3"]])
    with pytest.raises(ValidationError):
        EquivRelation.from_blocks(CARRIER, [["0", "1"]])


def test_zero_one_and_leq():
    zero = EquivRelation.zero(CARRIER)
    one = EquivRelation.one(CARRIER)
    mid = EquivRelation.from_blocks(CARRIER, [["0", "1"], ["2"], ["3"]])
    assert zero.leq(mid) and mid.leq(one)
    assert not one.leq(mid)


def test_compose_is_relational_composition():
    a = EquivRelation.from_blocks(CARRIER, [["0", "1"], ["2"], ["3"]])
    b = EquivRelation.from_blocks(CARRIER, [["1", "2"], ["0"], ["3"]])
    composed = compose(a, b)
    assert ("0", "2") in composed
    assert ("2", "0") not in composed  # composition need not be symmetric


def test_join_via_product_matches_oracle_random(rng):
    for _ in range(200):
        size = rng.randint(2, 6)
        carrier = tuple(str(i) for i in range(size))
        k = rng.randint(1, 4)
        thetas = []
        for _ in range(k):
            pairs = [
                (a, b)
                for a in carrier
                for b in carrier
                if rng.random() < 0.2
            ]
            thetas.append(EquivRelation.from_pairs(carrier, pairs))
        assert join_via_product(thetas) == oracle_join(thetas)


def test_meet_is_intersection():
    a = EquivRelation.from_blocks(CARRIER, [["0", "1", "2"], ["3"]])
    b = EquivRelation.from_blocks(CARRIER, [["0", "1"], ["2", "3"]])
    assert meet([a, b]) == EquivRelation.from_blocks(
        CARRIER, [["0", "1"], ["2"], ["3"]]
    )


def _z4_algebra():
    add1 = OperationTable(
        1, {("0",): "1", ("1",): "2", ("2",): "3", ("3",): "0"}
    )
    return FinAlgebra("Z4", CARRIER, {"s": add1})


def test_congruence_generated_cyclic():
    algebra = _z4_algebra()
    # Identifying 0 with 2 under the successor forces 1 ~ 3.
    theta = congruence_generated(algebra, [("0", "2")])
    assert theta == EquivRelation.from_blocks(CARRIER, [["0", "2"], ["1", "3"]])
    assert is_congruence(algebra, theta)


def test_all_partitions_count():
    # Bell numbers: 1, 1, 2, 5, 15.
    assert sum(1 for _ in all_partitions(("a",))) == 1
    assert sum(1 for _ in all_partitions(("a", "b", "c"))) == 5
    assert sum(1 for _ in all_partitions(CARRIER)) == 15


def test_congruence_lattice_of_cyclic_group_shape():
    lattice = congruence_lattice(_z4_algebra())
    # Con(Z4) is the three-element chain 0 < {02|13} < 1.
    assert len(lattice.elements) == 3
    lattice.check_axioms()
    assert check_modular_law(lattice)[0] == "modular"


def test_congruence_lattice_guard():
    big = FinAlgebra("P9", tuple(str(i) for i in range(9)), {})
    with pytest.raises(BudgetExceededError):
        congruence_lattice(big)


def test_pure_set_4_nonmodular_with_replayable_witness():
    lattice = congruence_lattice(FinAlgebra("P4", CARRIER, {}))
    status, witness = check_modular_law(lattice)
    assert status == "witness"
    x, y, z = witness
    assert lattice.leq(x, y)
    left = lattice.join(x, lattice.meet(y, z))
    right = lattice.meet(y, lattice.join(x, z))
    assert left != right
    # Deterministic: re-running yields the same witness.
    assert check_modular_law(lattice)[1] == witness


def test_chain_lattices_modular():
    for n in range(1, 6):
        assert check_modular_law(FiniteLattice.chain(n))[0] == "modular"


def test_validate_pentagon_axioms(pent4):
    from ppcomp.lattice import validate_pentagon

    assert validate_pentagon(pent4) == ("ok", None)
    broken = Pentagon(
        "bad",
        pent4.carrier,
        alpha=pent4.beta,  # alpha = beta violates strictness downstream
        beta=pent4.beta,
        gamma=pent4.gamma,
    )
    assert validate_pentagon(broken) == ("ok", None)  # axioms 1-4 still hold
    nonzero_meet = Pentagon(
        "bad2",
        pent4.carrier,
        alpha=pent4.alpha,
        beta=EquivRelation.one(pent4.carrier),
        gamma=pent4.gamma,
    )
    assert validate_pentagon(nonzero_meet) == ("failed", 2)


def test_validate_pentagon_axiom4_skippable(pent4):
    from ppcomp.lattice import validate_pentagon

    no_join = Pentagon(
        "nj",
        pent4.carrier,
        alpha=EquivRelation.zero(pent4.carrier),
        beta=EquivRelation.zero(pent4.carrier),
        gamma=pent4.gamma,
    )
    assert validate_pentagon(no_join)[0] == "failed"
    assert validate_pentagon(no_join, check_axiom4=False)[0] == "failed"


def test_decompose_pentagon(pent4):
    dec = decompose_pentagon(pent4)
    assert len(dec.B) == 2 and len(dec.C) == 2
    assert dec.alpha_b[0] == EquivRelation.zero(tuple(range(len(dec.C))))
    assert dec.alpha_b[1] == EquivRelation.one(tuple(range(len(dec.C))))
    assert is_interesting(dec) == ("yes", (0, 1))


def test_pentagon_two_sorted_relation_size(pent4):
    p2 = pentagon_two_sorted(decompose_pentagon(pent4))
    # b0 contributes the diagonal pairs (2), b1 all pairs (4).
    assert len(p2.R) == 6


def test_sublattice_generated_no_forced_bounds(pent4):
    dec = decompose_pentagon(pent4)
    lattice = sublattice_generated(list(dec.alphas))
    assert set(lattice.elements) == set(dec.alphas)
    lattice.check_axioms()


def test_term_helpers():
    t = Join((Var("x1"), Meet((Var("x2"), Var("x1")))))
    assert term_depth(t) == 2
    assert term_leaves(t) == 3
    assert term_variables(t) == ("x1", "x2")


def oracle_eval(t, assignment, lattice):
    if isinstance(t, Var):
        return assignment[t.name]
    values = [oracle_eval(a, assignment, lattice) for a in t.args]
    out = values[0]
    for v in values[1:]:
        out = lattice.meet(out, v) if isinstance(t, Meet) else lattice.join(out, v)
    return out


def test_eval_lattice_term_matches_oracle(rng, pent4):
    dec = decompose_pentagon(pent4)
    lattice = sublattice_generated(list(dec.alphas))

    def random_term(depth):
        if depth == 0 or rng.random() < 0.3:
            return Var(rng.choice(("x1", "x2", "x3")))
        cls = rng.choice((Meet, Join))
        return cls(tuple(random_term(depth - 1) for _ in range(2)))

    for _ in range(100):
        t = random_term(3)
        g = {v: rng.choice(lattice.elements) for v in ("x1", "x2", "x3")}
        assert eval_lattice_term(t, g, lattice) == oracle_eval(t, g, lattice)


def test_decide_term_ineq_basic(pent4):
    dec = decompose_pentagon(pent4)
    lattice = sublattice_generated(list(dec.alphas))
    t = Meet((Var("x1"), Var("x2")))
    t_up = Join((Var("x1"), Var("x2")))
    assert decide_term_ineq(t, t_up, [lattice]).answer == "yes"
    v = decide_term_ineq(t_up, t, [lattice])
    assert v.answer == "no"
    index, g = v.witness
    assert index == 0
    lhs = eval_lattice_term(t_up, g, lattice)
    rhs = eval_lattice_term(t, g, lattice)
    assert not lhs.leq(rhs)


def test_decide_term_ineq_generator_restriction(pent4):
    dec = decompose_pentagon(pent4)
    lattice = sublattice_generated(list(dec.alphas))
    gens = tuple(dec.alpha_b[b] for b in range(len(dec.B)))
    full = decide_term_ineq(Var("x1"), Var("x2"), [lattice])
    restricted = decide_term_ineq(
        Var("x1"), Var("x2"), [lattice], subsets=[gens]
    )
    assert full.answer == restricted.answer == "no"
