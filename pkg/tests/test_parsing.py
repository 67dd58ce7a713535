import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ppcomp.errors import ParseError, ValidationError
from ppcomp.model import Atom, Equality, PPFormula
from ppcomp.parsing import (
    parse_algebra,
    parse_dnf,
    parse_lattice_term,
    parse_pentagon,
    parse_pp_formula,
    parse_sorted_formula,
    parse_structure,
    print_algebra,
    print_dnf,
    print_formula,
    print_lattice_term,
    print_pentagon,
    print_structure,
)

from conftest import random_formula, random_structure

STRUCT = """
structure B {
  universe = {0, 1, 2}
  relation E/2 = {(0,0), (1,1), (2,2)}
  relation U/1 = {(0)}
}
"""


def test_parse_structure():
    s = parse_structure(STRUCT)
    assert s.name == "B"
    assert s.universe == ("0", "1", "2")
    assert s.relations["E"] == (
        2,
        frozenset({("0", "0"), ("1", "1"), ("2", "2")}),
    )
    assert s.relations["U"] == (1, frozenset({("0",)}))


def test_structure_round_trip():
    s = parse_structure(STRUCT)
    assert parse_structure(print_structure(s)) == s


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as exc:
        parse_structure("structure B {\n  universe = {0, ?}\n}")
    assert exc.value.line == 2


def test_parse_formula():
    phi = parse_pp_formula("phi(x, y) := exists w . E(x, w) & w = y")
    assert phi.free_vars == ("x", "y")
    assert phi.bound_vars == ("w",)
    assert phi.atoms == (Atom("E", ("x", "w")), Equality("w", "y"))


def test_parse_formula_empty_conjunction():
    phi = parse_pp_formula("phi(x) := true")
    assert phi.atoms == ()


def test_parse_formula_against_signature():
    with pytest.raises(ValidationError):
        parse_pp_formula("phi(x) := E(x)", {"E": 2})


def test_parse_formula_rejects_reserved_names():
    with pytest.raises(ParseError):
        parse_pp_formula("phi(_x) := true")
    parse_pp_formula("phi(_x) := true", allow_reserved=True)


def test_parse_formula_rejects_free_bound_clash():
    with pytest.raises((ParseError, ValidationError)):
        parse_pp_formula("phi(x) := exists x . E(x, x)")


def test_parse_sorted_formula():
    phi = parse_sorted_formula(
        "phi(b@1, y1@2, y2@2) := exists z@2 . R(b, y1, z) & R(b, z, y2)"
    )
    assert phi.sorts == {"b": 1, "y1": 2, "y2": 2, "z": 2}


def test_parse_pentagon_round_trip():
    text = """
    pentagon P {
      set = {a, b, c, d}
      alpha = {{a}, {b}, {c, d}}
      beta = {{a, b}, {c, d}}
      gamma = {{a, c}, {b, d}}
    }
    """
    p = parse_pentagon(text)
    assert parse_pentagon(print_pentagon(p)) == p


def test_parse_algebra_round_trip():
    text = """
    algebra A {
      universe = {0, 1}
      op f/2 = {(0,0): 0, (0,1): 1, (1,0): 1, (1,1): 1}
    }
    """
    a = parse_algebra(text)
    assert a.operations["f"].arity == 2
    assert a.operations["f"]("0", "1") == "1"
    assert parse_algebra(print_algebra(a)) == a


def test_parse_lattice_term():
    t = parse_lattice_term("(x1 v (x2 ^ x3))")
    assert parse_lattice_term(print_lattice_term(t)) == t
    with pytest.raises(ParseError):
        parse_lattice_term("(x1 v x2 ^ x3)")  # mixed operators need parens
    with pytest.raises(ParseError):
        parse_lattice_term("(v ^ x1)")  # "v" is the join keyword


def test_parse_dnf_round_trip():
    d = parse_dnf("(x & !y) | (!x)")
    assert parse_dnf(print_dnf(d)) == d
    assert d.variables == ("x", "y")


def test_formula_print_parse_round_trip_manual():
    phi = PPFormula(
        "phi",
        ("x", "y"),
        ("w",),
        (Atom("E", ("x", "w")), Equality("w", "y")),
    )
    assert parse_pp_formula(print_formula(phi)) == phi


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_structure_round_trip_property(pyrng):
    s = random_structure(pyrng, size=pyrng.randint(1, 4), max_relations=3)
    assert parse_structure(print_structure(s)) == s


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_formula_round_trip_property(pyrng):
    s = random_structure(pyrng, size=2)
    phi = random_formula(pyrng, s)
    assert parse_pp_formula(print_formula(phi)) == phi


@settings(max_examples=40, deadline=None)
@given(
    st.text(alphabet=string.printable, max_size=80).filter(
        lambda t: t.strip() and not t.lstrip().startswith("structure")
    )
)
def test_structure_parser_rejects_noise(text):
    with pytest.raises(ParseError):
        parse_structure(text)
