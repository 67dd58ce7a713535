"""Structure and formula transformations: conjunction with capture-free
renaming, constant expansion, and flattening of power structures."""

from .errors import ValidationError
from .model import (
    Atom,
    Equality,
    FRESH_PREFIX,
    PPFormula,
    RelStructure,
    split_product_element,
)


def fresh_names(count, taken, prefix=FRESH_PREFIX):
    """Deterministic fresh variable names: the reserved prefix plus a
    counter, skipping anything already taken."""
    out = []
    i = 1
    while len(out) < count:
        cand = f"{prefix}{i}"
        if cand not in taken:
            out.append(cand)
        i += 1
    return out


def rename_variables(phi, mapping):
    def sub(v):
        return mapping.get(v, v)

    atoms = tuple(
        Equality(sub(a.left), sub(a.right))
        if isinstance(a, Equality)
        else Atom(a.symbol, tuple(sub(v) for v in a.args))
        for a in phi.atoms
    )
    return PPFormula(
        phi.name,
        tuple(sub(v) for v in phi.free_vars),
        tuple(sub(v) for v in phi.bound_vars),
        atoms,
    )


def conjoin(phi, psi):
    """Conjunction with identical free variables; the bound variables of
    psi are renamed apart from everything in phi."""
    if phi.free_vars != psi.free_vars:
        raise ValidationError(
            f"conjoin: free variables differ ({phi.free_vars} vs {psi.free_vars})"
        )
    taken = set(phi.all_vars) | set(psi.all_vars)
    fresh = fresh_names(len(psi.bound_vars), taken)
    renamed = rename_variables(psi, dict(zip(psi.bound_vars, fresh)))
    return PPFormula(
        f"{phi.name}_and_{psi.name}",
        phi.free_vars,
        phi.bound_vars + renamed.bound_vars,
        phi.atoms + renamed.atoms,
    )


def expand_with_constants(structure):
    """Add one fresh unary singleton relation per universe element.

    Not idempotent: applying it twice adds a second batch of singletons.
    """
    relations = dict(structure.relations)
    for e in structure.universe:
        base = "sgl_" + str(e).replace("|", "_")
        sym = base
        counter = 1
        while sym in relations:
            counter += 1
            sym = f"{base}_{counter}"
        relations[sym] = (1, frozenset({(e,)}))
    return RelStructure(structure.name + "_const", structure.universe, relations)


def power_flatten(structure, k):
    """Flatten a structure over k-tuple product elements: each m-ary
    relation becomes km-ary by splitting every coordinate into its k
    components."""
    if k < 1:
        raise ValidationError("power_flatten: k must be >= 1")
    base = []
    for e in structure.universe:
        for part in split_product_element(e, k):
            if part not in base:
                base.append(part)
    relations = {}
    for sym, (arity, tuples) in structure.relations.items():
        flat = frozenset(
            tuple(
                part
                for e in t
                for part in split_product_element(e, k)
            )
            for t in tuples
        )
        relations[sym] = (arity * k, flat)
    return RelStructure(structure.name + "_flat", tuple(base), relations)


def power_flatten_formula(phi, k):
    """Replace each variable v by coordinates v__1..v__k; equalities become
    k coordinatewise equalities and atom arities multiply by k."""
    if k < 1:
        raise ValidationError("power_flatten_formula: k must be >= 1")

    def coords(v):
        return tuple(f"{v}__{i}" for i in range(1, k + 1))

    new_free = tuple(c for v in phi.free_vars for c in coords(v))
    new_bound = tuple(c for v in phi.bound_vars for c in coords(v))
    if len(set(new_free + new_bound)) != len(new_free + new_bound):
        raise ValidationError("coordinate variable names collide")
    atoms = []
    for a in phi.atoms:
        if isinstance(a, Equality):
            atoms.extend(
                Equality(l, r) for l, r in zip(coords(a.left), coords(a.right))
            )
        else:
            atoms.append(Atom(a.symbol, tuple(c for v in a.args for c in coords(v))))
    return PPFormula(phi.name + "_flat", new_free, new_bound, tuple(atoms))


def split_assignment(assignment, k):
    """Split a product-valued assignment into the coordinate assignment
    used by flattened formulas."""
    from .model import Assignment

    bindings = {}
    for v, e in assignment.bindings.items():
        for i, part in enumerate(split_product_element(e, k), start=1):
            bindings[f"{v}__{i}"] = part
    return Assignment(bindings)
