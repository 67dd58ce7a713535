"""Shared fixtures and seeded random instance generators."""

import itertools
import random

import pytest

from ppcomp.model import Atom, Equality, PPFormula, RelStructure
from ppcomp.reference import (
    pure_set_package,
    shipped_amalgam,
    shipped_pentagon,
)


def random_structure(rng, size=2, max_relations=2, max_arity=2, name="B"):
    universe = tuple(str(i) for i in range(size))
    relations = {}
    for i in range(rng.randint(1, max_relations)):
        arity = rng.randint(1, max_arity)
        tuples = [
            t
            for t in itertools.product(universe, repeat=arity)
            if rng.random() < 0.5
        ]
        relations[f"R{i}"] = (arity, frozenset(tuples))
    return RelStructure(name, universe, relations)


def random_formula(rng, structure, max_free=3, max_bound=3, max_atoms=4, name="phi"):
    n_free = rng.randint(0, max_free)
    n_bound = rng.randint(0, max_bound)
    free = tuple(f"x{i}" for i in range(1, n_free + 1))
    bound = tuple(f"w{i}" for i in range(1, n_bound + 1))
    variables = free + bound
    atoms = []
    for _ in range(rng.randint(0, max_atoms)):
        if variables and rng.random() < 0.15:
            atoms.append(Equality(rng.choice(variables), rng.choice(variables)))
            continue
        sym = rng.choice(sorted(structure.relations))
        arity = structure.relations[sym][0]
        if not variables:
            continue
        atoms.append(
            Atom(sym, tuple(rng.choice(variables) for _ in range(arity)))
        )
    return PPFormula(name, free, bound, tuple(atoms))


def random_formula_pair(rng, structure, max_free=3, max_bound=3, max_atoms=4):
    """Two formulas over the same structure sharing a free-variable tuple."""
    phi = random_formula(rng, structure, max_free, max_bound, max_atoms, "phi")
    while True:
        psi = random_formula(rng, structure, max_free, max_bound, max_atoms, "psi")
        if psi.free_vars == phi.free_vars:
            return phi, psi


@pytest.fixture(scope="session")
def pure_set_pkg():
    return pure_set_package()


@pytest.fixture(scope="session")
def pent4():
    return shipped_pentagon()


@pytest.fixture(scope="session")
def amalgam4():
    return shipped_amalgam()


@pytest.fixture
def rng():
    return random.Random(20260825)
