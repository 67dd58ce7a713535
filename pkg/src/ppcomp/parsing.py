"""Text grammars for structures, algebras, formulas, pentagons, lattice
terms, and DNF formulas, with matching printers.

All grammars are whitespace-insensitive and treat '#' as a comment-to-
end-of-line marker.  Element names may not contain '|' (reserved for
product elements) and user variables may not start with '_' (reserved
for machine-generated names) unless explicitly allowed.
"""

import re

from .algebra import FinAlgebra, OperationTable
from .errors import ParseError, ValidationError
from .lattice import EquivRelation, Join, Meet, Pentagon, Var
from .model import Atom, Equality, PPFormula, RelStructure, SortedPPFormula

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<assign>:=)
  | (?P<ident>[A-Za-z0-9_]+)
  | (?P<sym>[{}(),=/.:@&!|^])
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "value", "line", "column")

    def __init__(self, kind, value, line, column):
        self.kind = kind
        self.value = value
        self.line = line
        self.column = column


def _tokenize(text):
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            tokens.append(_Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def at_end(self):
        return self.pos >= len(self.tokens)

    def error(self, message):
        tok = self.peek()
        if tok is None:
            raise ParseError(message + " (at end of input)")
        raise ParseError(message + f", got {tok.value!r}", tok.line, tok.column)

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def accept(self, value):
        tok = self.peek()
        if tok is not None and tok.value == value:
            self.pos += 1
            return True
        return False

    def expect(self, value):
        if not self.accept(value):
            self.error(f"expected {value!r}")

    def ident(self, what="identifier"):
        tok = self.peek()
        if tok is None or tok.kind != "ident":
            self.error(f"expected {what}")
        self.pos += 1
        return tok.value

    def element(self):
        """An element name, possibly a '|'-joined product name."""
        parts = [self.ident("element name")]
        while self.accept("|"):
            parts.append(self.ident("element name"))
        return "|".join(parts)

    def element_set(self):
        self.expect("{")
        out = []
        if not self.accept("}"):
            out.append(self.element())
            while self.accept(","):
                out.append(self.element())
            self.expect("}")
        return out

    def element_tuple(self):
        self.expect("(")
        out = []
        if not self.accept(")"):
            out.append(self.element())
            while self.accept(","):
                out.append(self.element())
            self.expect(")")
        return tuple(out)

    def finished(self):
        if not self.at_end():
            self.error("trailing input")


# ---------------------------------------------------------------------------
# Structures


def parse_structure(text):
    p = _Parser(text)
    p.expect("structure")
    name = p.ident("structure name")
    p.expect("{")
    p.expect("universe")
    p.expect("=")
    universe = p.element_set()
    relations = {}
    while p.accept("relation"):
        sym = p.ident("relation symbol")
        p.expect("/")
        arity = int(p.ident("arity"))
        p.expect("=")
        p.expect("{")
        tuples = set()
        if not p.accept("}"):
            tuples.add(p.element_tuple())
            while p.accept(","):
                tuples.add(p.element_tuple())
            p.expect("}")
        if sym in relations:
            raise ParseError(f"duplicate relation symbol {sym!r}")
        relations[sym] = (arity, frozenset(tuples))
    p.expect("}")
    p.finished()
    return RelStructure(name, tuple(universe), relations)


def print_structure(structure):
    lines = [f"structure {structure.name} {{"]
    lines.append(
        "  universe = {" + ", ".join(str(e) for e in structure.universe) + "}"
    )
    for sym, (arity, tuples) in structure.relations.items():
        body = ", ".join(
            "(" + ", ".join(t) + ")" for t in sorted(tuples)
        )
        lines.append(f"  relation {sym}/{arity} = {{{body}}}")
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Algebras


def parse_algebra(text):
    p = _Parser(text)
    p.expect("algebra")
    name = p.ident("algebra name")
    p.expect("{")
    p.expect("universe")
    p.expect("=")
    universe = p.element_set()
    operations = {}
    while p.accept("op"):
        sym = p.ident("operation symbol")
        p.expect("/")
        arity = int(p.ident("arity"))
        p.expect("=")
        p.expect("{")
        table = {}
        while not p.accept("}"):
            if table:
                p.expect(",")
                if p.accept("}"):  # trailing comma
                    break
            args = p.element_tuple()
            p.expect(":")
            out = p.element()
            if len(args) != arity:
                raise ParseError(
                    f"operation {sym}: entry {args} does not match arity {arity}"
                )
            table[args] = out
        if sym in operations:
            raise ParseError(f"duplicate operation symbol {sym!r}")
        operations[sym] = OperationTable(arity, table)
    p.expect("}")
    p.finished()
    return FinAlgebra(name, tuple(universe), operations)


def print_algebra(algebra):
    lines = [f"algebra {algebra.name} {{"]
    lines.append("  universe = {" + ", ".join(algebra.universe) + "}")
    for sym, op in algebra.operations.items():
        entries = ", ".join(
            "(" + ", ".join(args) + "): " + out
            for args, out in sorted(op.table.items())
        )
        lines.append(f"  op {sym}/{op.arity} = {{{entries}}}")
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Formulas


def _variable(p, sorts, allow_reserved):
    name = p.ident("variable")
    if name.startswith("_") and not allow_reserved:
        raise ParseError(f"variable {name!r} uses the reserved '_' prefix")
    if p.accept("@"):
        sort = int(p.ident("sort"))
        if sort not in (1, 2):
            raise ParseError(f"variable {name!r}: sort must be 1 or 2")
        if sorts.get(name, sort) != sort:
            raise ParseError(f"variable {name!r} annotated with two sorts")
        sorts[name] = sort
    return name


def _parse_formula_body(text, allow_reserved):
    p = _Parser(text)
    p.accept("formula")
    name = p.ident("formula name")
    sorts = {}
    p.expect("(")
    free = []
    if not p.accept(")"):
        free.append(_variable(p, sorts, allow_reserved))
        while p.accept(","):
            free.append(_variable(p, sorts, allow_reserved))
        p.expect(")")
    p.expect(":=")
    bound = []
    if p.accept("exists"):
        bound.append(_variable(p, sorts, allow_reserved))
        while p.accept(","):
            bound.append(_variable(p, sorts, allow_reserved))
        p.expect(".")
    atoms = []
    if not p.accept("true"):
        atoms.append(_parse_atom(p, sorts, allow_reserved))
        while p.accept("&"):
            atoms.append(_parse_atom(p, sorts, allow_reserved))
    p.finished()
    return name, tuple(free), tuple(bound), tuple(atoms), sorts


def _parse_atom(p, sorts, allow_reserved):
    first = _variable(p, sorts, allow_reserved)
    if p.accept("="):
        right = _variable(p, sorts, allow_reserved)
        return Equality(first, right)
    p.expect("(")
    args = []
    if not p.accept(")"):
        args.append(_variable(p, sorts, allow_reserved))
        while p.accept(","):
            args.append(_variable(p, sorts, allow_reserved))
        p.expect(")")
    return Atom(first, tuple(args))


def parse_pp_formula(text, signature=None, allow_reserved=False):
    name, free, bound, atoms, sorts = _parse_formula_body(text, allow_reserved)
    if sorts:
        raise ParseError("sort annotations are only allowed in sorted formulas")
    phi = PPFormula(name, free, bound, atoms)
    if signature is not None:
        phi.validate_signature(signature)
    return phi


def parse_sorted_formula(text, allow_reserved=False):
    name, free, bound, atoms, sorts = _parse_formula_body(text, allow_reserved)
    declared = set(free) | set(bound)
    missing = declared - set(sorts)
    if missing:
        raise ParseError(f"variables without sort annotation: {sorted(missing)}")
    return SortedPPFormula(name, free, bound, atoms, sorts=sorts)


def print_formula(phi):
    def var(v):
        if isinstance(phi, SortedPPFormula):
            return f"{v}@{phi.sorts[v]}"
        return v

    head = f"formula {phi.name}({', '.join(var(v) for v in phi.free_vars)}) := "
    body = ""
    if phi.bound_vars:
        body += "exists " + ", ".join(var(v) for v in phi.bound_vars) + " . "
    if phi.atoms:
        body += " & ".join(str(a) for a in phi.atoms)
    else:
        body += "true"
    return head + body


# ---------------------------------------------------------------------------
# Pentagons


def _block_set(p):
    p.expect("{")
    blocks = []
    while not p.accept("}"):
        if blocks:
            p.expect(",")
        blocks.append(p.element_set())
    return blocks


def parse_pentagon(text):
    p = _Parser(text)
    p.expect("pentagon")
    name = p.ident("pentagon name")
    p.expect("{")
    p.expect("set")
    p.expect("=")
    carrier = tuple(p.element_set())
    parts = {}
    for key in ("alpha", "beta", "gamma"):
        p.expect(key)
        p.expect("=")
        parts[key] = EquivRelation.from_blocks(carrier, _block_set(p))
    p.expect("}")
    p.finished()
    return Pentagon(name, carrier, parts["alpha"], parts["beta"], parts["gamma"])


def print_pentagon(pent):
    def rel(r):
        return "{" + ", ".join("{" + ", ".join(b) + "}" for b in r.blocks) + "}"

    return (
        f"pentagon {pent.name} {{\n"
        f"  set = {{{', '.join(pent.carrier)}}}\n"
        f"  alpha = {rel(pent.alpha)}\n"
        f"  beta = {rel(pent.beta)}\n"
        f"  gamma = {rel(pent.gamma)}\n"
        "}"
    )


# ---------------------------------------------------------------------------
# Lattice terms: t := v | (t ^ t ...) | (t v t ...)


def parse_lattice_term(text):
    p = _Parser(text)
    term = _parse_term(p)
    p.finished()
    return term


def _parse_term(p):
    if p.accept("("):
        args = [_parse_term(p)]
        op = None
        while not p.accept(")"):
            tok = p.peek()
            if tok is None:
                p.error("unterminated term")
            if tok.value not in ("^", "v"):
                p.error("expected '^' or 'v'")
            if op is None:
                op = tok.value
            elif op != tok.value:
                p.error("mixed '^' and 'v' inside one level; parenthesize")
            p.next()
            args.append(_parse_term(p))
        if op is None:
            return args[0]
        return Meet(tuple(args)) if op == "^" else Join(tuple(args))
    name = p.ident("term variable")
    if name == "v":
        raise ParseError("'v' is the join operator and cannot name a variable")
    return Var(name)


def print_lattice_term(t):
    if isinstance(t, Var):
        return t.name
    op = " ^ " if isinstance(t, Meet) else " v "
    return "(" + op.join(print_lattice_term(a) for a in t.args) + ")"


# ---------------------------------------------------------------------------
# DNF formulas: (x & !y) | (!x)


def parse_dnf(text):
    from .cm import DNFFormula

    p = _Parser(text)
    disjuncts = [_parse_disjunct(p)]
    while p.accept("|"):
        disjuncts.append(_parse_disjunct(p))
    p.finished()
    return DNFFormula(tuple(disjuncts))


def _parse_disjunct(p):
    wrapped = p.accept("(")
    literals = [_parse_literal(p)]
    while p.accept("&"):
        literals.append(_parse_literal(p))
    if wrapped:
        p.expect(")")
    return tuple(literals)


def _parse_literal(p):
    positive = not p.accept("!")
    name = p.ident("variable")
    return (name, positive)


def print_dnf(dnf):
    parts = []
    for disjunct in dnf.disjuncts:
        lits = " & ".join(("" if pos else "!") + v for v, pos in disjunct)
        parts.append(f"({lits})")
    return " | ".join(parts)
