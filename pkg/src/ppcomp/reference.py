"""Shipped reference inputs: the pure-set unary-type package on three
elements and the four-element interesting pentagon with its amalgam.

These are the smallest inputs on which every verification sweep in the
package is checkable and non-vacuous.
"""

from .algebra import FinAlgebra
from .cm import build_amalgam
from .lattice import EquivRelation, Pentagon
from .model import RelStructure
from .unary import build_package


def pure_set_algebra(size=3, name=None):
    universe = tuple(str(i) for i in range(size))
    return FinAlgebra(name or f"pureset{size}", universe, {})


def boolean_source():
    """A boolean structure with one binary relation containing exactly the
    constant tuples."""
    return RelStructure(
        "C",
        ("0", "1"),
        {"C1": (2, frozenset({("0", "0"), ("1", "1")}))},
    )


def pure_set_package():
    """The reference unary-type package: the pure set on {0, 1, 2} with
    trace {0, 1}."""
    return build_package(pure_set_algebra(3), ("0", "1"), boolean_source())


def shipped_pentagon():
    """The four-element interesting pentagon: carrier B x C with |B| = |C|
    = 2, beta/gamma the coordinate kernels, and alpha relating exactly one
    gamma-fiber of the second beta-class."""
    carrier = ("p00", "p01", "p10", "p11")
    return Pentagon(
        "pent4",
        carrier,
        alpha=EquivRelation.from_blocks(carrier, [["p00"], ["p01"], ["p10", "p11"]]),
        beta=EquivRelation.from_blocks(carrier, [["p00", "p01"], ["p10", "p11"]]),
        gamma=EquivRelation.from_blocks(carrier, [["p00", "p10"], ["p01", "p11"]]),
    )


def shipped_amalgam():
    """The reference amalgam: the shipped pentagon as full carrier of a
    pure-set algebra, D_k the full powers, cutoff 4."""
    pent = shipped_pentagon()
    algebra = FinAlgebra("amalg4", pent.carrier, {})
    return build_amalgam(
        algebra, pent.alpha, pent.beta, pent.gamma, [pent], cutoff=4
    )
