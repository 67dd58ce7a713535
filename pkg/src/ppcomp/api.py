"""Text-in, report-out handlers shared by the CLI and the HTTP service.

Every handler takes raw grammar texts plus options and returns a plain
dict ready for JSON serialization; parse/validation problems raise the
package exceptions, which the front ends map to exit codes or HTTP
statuses.
"""

import itertools

from . import cm, unary
from .algebra import polymorphisms
from .errors import BudgetExceededError, ValidationError
from .evaluate import (
    DEFAULT_VAR_BUDGET,
    decide_entailment_sorted,
    decide_ppcon,
    decide_ppeq,
)
from .lattice import (
    Pentagon,
    check_modular_law,
    congruence_lattice,
    decide_term_ineq,
    decompose_pentagon,
    pentagon_two_sorted,
    sublattice_generated,
    validate_pentagon,
)
from .model import Assignment
from .parsing import (
    parse_algebra,
    parse_dnf,
    parse_lattice_term,
    parse_pentagon,
    parse_pp_formula,
    parse_sorted_formula,
    parse_structure,
    print_formula,
)

SCHEMA = "ppcomp/1"

ANALYZE_POLY_ARITY = 2
ANALYZE_CONGRUENCE_CAP = 20


def _json_safe(value):
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


def render_witness(witness):
    if witness is None:
        return None
    if isinstance(witness, Assignment):
        return {k: _json_safe(v) for k, v in sorted(witness.bindings.items())}
    if isinstance(witness, dict):
        return {k: _json_safe(v) for k, v in sorted(witness.items())}
    if isinstance(witness, tuple) and len(witness) == 2:
        index, inner = witness
        return {"index": index, "assignment": render_witness(inner)}
    return str(witness)


def _verdict_report(command, verdict):
    return {
        "schema": SCHEMA,
        "command": command,
        "verdict": verdict.answer,
        "witness": render_witness(verdict.witness),
    }


def run_ppeq(structure_text, phi_text, psi_text, budget=DEFAULT_VAR_BUDGET):
    structure = parse_structure(structure_text)
    sig = structure.signature()
    phi = parse_pp_formula(phi_text, sig, allow_reserved=True)
    psi = parse_pp_formula(psi_text, sig, allow_reserved=True)
    return _verdict_report("ppeq", decide_ppeq(structure, phi, psi, budget))


def run_ppcon(structure_text, phi_text, psi_text, budget=DEFAULT_VAR_BUDGET):
    structure = parse_structure(structure_text)
    sig = structure.signature()
    phi = parse_pp_formula(phi_text, sig, allow_reserved=True)
    psi = parse_pp_formula(psi_text, sig, allow_reserved=True)
    return _verdict_report("ppcon", decide_ppcon(structure, phi, psi, budget))


def _pentagon_structures(pentagon_texts):
    pentagons = [parse_pentagon(t) for t in pentagon_texts]
    decs = [decompose_pentagon(p) for p in pentagons]
    return pentagons, decs, [pentagon_two_sorted(d) for d in decs]


def run_entail(phi_text, psi_text, pentagon_texts, budget=DEFAULT_VAR_BUDGET):
    phi = parse_sorted_formula(phi_text, allow_reserved=True)
    psi = parse_sorted_formula(psi_text, allow_reserved=True)
    _, _, p2s = _pentagon_structures(pentagon_texts)
    return _verdict_report(
        "entail", decide_entailment_sorted(phi, psi, p2s, budget)
    )


def run_dnf(dnf_text, guard=cm.DNF_VAR_GUARD):
    verdict = cm.decide_dnf_tautology(parse_dnf(dnf_text), guard)
    return _verdict_report("dnf", verdict)


def run_latineq(lhs_text, rhs_text, pentagon_texts, generators_only=False):
    lhs = parse_lattice_term(lhs_text)
    rhs = parse_lattice_term(rhs_text)
    _, decs, _ = _pentagon_structures(pentagon_texts)
    lattices = [sublattice_generated(list(d.alphas)) for d in decs]
    subsets = None
    if generators_only:
        subsets = [
            tuple(d.alpha_b[b] for b in range(len(d.B))) for d in decs
        ]
    verdict = decide_term_ineq(lhs, rhs, lattices, subsets)
    return _verdict_report("latineq", verdict)


def run_analyze(text, poly_arity=ANALYZE_POLY_ARITY):
    stripped = text.lstrip()
    if stripped.startswith("structure"):
        structure = parse_structure(text)
        counts = {
            arity: len(polymorphisms(structure, arity))
            for arity in range(1, poly_arity + 1)
        }
        return {
            "schema": SCHEMA,
            "command": "analyze",
            "kind": "structure",
            "universe_size": len(structure.universe),
            "relation_count": len(structure.relations),
            "polymorphism_counts": counts,
        }
    algebra = parse_algebra(text)
    lattice = congruence_lattice(algebra)
    modular, witness = check_modular_law(lattice)
    pentagon_triples = []
    if len(lattice.elements) <= ANALYZE_CONGRUENCE_CAP:
        for a, b, g in itertools.product(lattice.elements, repeat=3):
            pent = Pentagon("con", algebra.universe, a, b, g)
            if validate_pentagon(pent)[0] == "ok" and a != b:
                pentagon_triples.append([str(a), str(b), str(g)])
    return {
        "schema": SCHEMA,
        "command": "analyze",
        "kind": "algebra",
        "universe_size": len(algebra.universe),
        "congruence_count": len(lattice.elements),
        "congruences": [str(c) for c in lattice.elements],
        "modular": modular == "modular",
        "modularity_witness": [str(x) for x in witness] if witness else None,
        "pentagon_triples": pentagon_triples,
    }


# ---------------------------------------------------------------------------
# Packages


def load_unary_package(payload):
    """Payload keys: algebra (text), trace (pair), source (text)."""
    algebra = parse_algebra(payload["algebra"])
    source = parse_structure(payload["source"])
    return unary.build_package(algebra, tuple(payload["trace"]), source)


def load_amalgam_package(payload):
    """Payload keys: algebra (text), pentagons (list of texts), cutoff;
    alpha/beta/gamma as lists of blocks."""
    algebra = parse_algebra(payload["algebra"])
    from .lattice import EquivRelation

    def rel(key):
        return EquivRelation.from_blocks(algebra.universe, payload[key])

    pentagons = [parse_pentagon(t) for t in payload["pentagons"]]
    return cm.build_amalgam(
        algebra,
        rel("alpha"),
        rel("beta"),
        rel("gamma"),
        pentagons,
        int(payload["cutoff"]),
    )


def run_validate(kind, payload):
    if kind == "pentagon":
        pent = parse_pentagon(payload["pentagon"])
        status, axiom = validate_pentagon(
            pent, check_axiom4=not payload.get("skip_axiom4", False)
        )
        return {
            "schema": SCHEMA,
            "command": "validate",
            "kind": kind,
            "ok": status == "ok",
            "failures": [] if status == "ok" else [f"axiom {axiom} fails"],
        }
    if kind == "unary":
        try:
            load_unary_package(payload)
            ok, failures = True, []
        except ValidationError as exc:
            ok, failures = False, [str(exc)]
        return {
            "schema": SCHEMA,
            "command": "validate",
            "kind": kind,
            "ok": ok,
            "failures": failures,
        }
    if kind == "amalgam":
        algebra = parse_algebra(payload["algebra"])
        from .lattice import EquivRelation

        def rel(key):
            return EquivRelation.from_blocks(algebra.universe, payload[key])

        pentagons = [parse_pentagon(t) for t in payload["pentagons"]]
        cutoff = int(payload["cutoff"])
        d_base = {
            k: cm.covered_relation(pentagons, algebra.universe, k)
            for k in range(1, cutoff + 1)
        }
        pkg = cm.AmalgamPackage(
            algebra, rel("alpha"), rel("beta"), rel("gamma"), tuple(pentagons),
            d_base, cutoff,
        )
        report = cm.validate_amalgam(pkg)
        return {
            "schema": SCHEMA,
            "command": "validate",
            "kind": kind,
            "ok": report.ok,
            "failures": list(report.failures),
        }
    raise ValidationError(f"unknown validation kind {kind!r}")


# ---------------------------------------------------------------------------
# Reduction pipelines


def run_reduce(pipeline, payload, verify=False, budget=DEFAULT_VAR_BUDGET):
    if pipeline == "unary":
        return _reduce_unary(payload, verify, budget)
    if pipeline == "latterm":
        return _reduce_latterm(payload, verify, budget)
    if pipeline == "sorted":
        return _reduce_sorted(payload, verify, budget)
    raise ValidationError(f"unknown pipeline {pipeline!r}")


def _report(pipeline, outputs, verification):
    return {
        "schema": SCHEMA,
        "command": "reduce",
        "pipeline": pipeline,
        "outputs": outputs,
        "verification": verification,
    }


def _reduce_unary(payload, verify, budget):
    pkg = load_unary_package(payload["package"])
    sig = pkg.source.signature()
    phi = parse_pp_formula(payload["phi"], sig, allow_reserved=True)
    psi = parse_pp_formula(payload["psi"], sig, allow_reserved=True)
    phi_t, psi_t = unary.reduce_ppcon_pair(phi, psi, pkg)
    verification = None
    if verify:
        failures = []
        for f, rep in (
            (phi, unary.verify_transfer(pkg, phi)),
            (psi, unary.verify_transfer(pkg, psi)),
        ):
            if not rep.ok:
                failures.extend(f"{f.name}: {x}" for x in rep.failures)
        before = decide_ppcon(pkg.source, phi, psi, budget)
        after = decide_ppcon(pkg.target, phi_t, psi_t, budget)
        if before.answer != after.answer:
            failures.append(
                f"containment verdict changed: {before.answer} -> {after.answer}"
            )
        verification = {"ok": not failures, "failures": failures}
    return _report(
        "unary",
        {"phi": print_formula(phi_t), "psi": print_formula(psi_t)},
        verification,
    )


def _reduce_latterm(payload, verify, budget):
    pentagons = [parse_pentagon(t) for t in payload["pentagons"]]
    lhs = parse_lattice_term(payload["lhs"])
    rhs = parse_lattice_term(payload["rhs"])
    phi, psi = cm.reduce_term_pair(lhs, rhs, pentagons)
    verification = None
    if verify:
        failures = []
        decs = [decompose_pentagon(p) for p in pentagons]
        p2s = [pentagon_two_sorted(d) for d in decs]
        lattices = [sublattice_generated(list(d.alphas)) for d in decs]
        subsets = [tuple(d.alpha_b[b] for b in range(len(d.B))) for d in decs]
        entail = decide_entailment_sorted(phi, psi, p2s, budget)
        ineq = decide_term_ineq(lhs, rhs, lattices, subsets)
        if entail.answer != ineq.answer:
            failures.append(
                f"entailment {entail.answer} disagrees with generator-level "
                f"inequality {ineq.answer}"
            )
        verification = {
            "ok": not failures,
            "failures": failures,
            "entailment": entail.answer,
        }
    return _report(
        "latterm",
        {"phi": print_formula(phi), "psi": print_formula(psi)},
        verification,
    )


def _reduce_sorted(payload, verify, budget):
    pkg = load_amalgam_package(payload["package"])
    phi = parse_sorted_formula(payload["phi"], allow_reserved=True)
    psi = parse_sorted_formula(payload["psi"], allow_reserved=True)
    phi_pp, psi_pp = cm.reduce_sorted_pair(phi, psi, pkg)
    verification = None
    if verify:
        failures = []
        for f, rep in (
            (phi, cm.verify_matching(pkg, phi)),
            (psi, cm.verify_matching(pkg, psi)),
        ):
            if not rep.ok:
                failures.extend(f"{f.name}: {x}" for x in rep.failures)
        p2s = [
            pentagon_two_sorted(decompose_pentagon(p)) for p in pkg.pentagons
        ]
        before = decide_entailment_sorted(phi, psi, p2s, budget)
        after = decide_ppcon(pkg.target, phi_pp, psi_pp, budget)
        if before.answer != after.answer:
            failures.append(
                f"entailment verdict changed: {before.answer} -> {after.answer}"
            )
        verification = {"ok": not failures, "failures": failures}
    return _report(
        "sorted",
        {"phi": print_formula(phi_pp), "psi": print_formula(psi_pp)},
        verification,
    )
