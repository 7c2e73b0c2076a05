"""Semantic integration: alignment diagrams of theories fused by colimit.

Symbols of every kind (atoms, variables, functions, relations) are quotiented
with the finite-set colimit of `cat_engine`. A merged class is named after its
least origin `node:symbol`, using the bare symbol unless two classes would share
it, in which case the qualified origin is used.
"""
import collections
import itertools
import logging
from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any
import sys

if sys.version_info >= (3, 11):
    from typing import Self
else:  # pragma: no cover
    from typing_extensions import Self

from iffkit.cat_engine import Diagram, FinGraph, FinSetMap, FinSetObj, colimit
from iffkit.iffkit_types import IffError, LawReport
from iffkit.institution import (
    FolMorphism,
    Institution,
    InstitutionError,
    InvalidMorphism,
    SignatureMap,
    Theory,
    TheoryMorphism,
    check_theory_morphism,
    is_consistent,
    load_theory_file,
)
from iffkit.sexpr import MalformedForm, SAtom, atom_text, atoms, expect_list, pairs, read, section
from iffkit.termlang import ExpressionLanguage, FOLLanguage, TermError, TermLanguage, TermLanguageMorphism

logger = logging.getLogger("iffkit")

Origin = tuple[Hashable, str]


class IntegrationError(IffError):
    pass


class IncompatibleVariables(IntegrationError):
    pass


class ArityConflict(IntegrationError):
    pass


@dataclass(eq=True, frozen=True)
class AlignmentDiagram:
    inst: Institution
    shape: FinGraph
    theories: Mapping[Hashable, Theory] = field(hash=False)
    morphisms: Mapping[Hashable, Any] = field(hash=False)
    id: str = "fused"

    def __post_init__(self: Self) -> None:
        for n in self.shape.nodes:
            if n not in self.theories:
                raise IntegrationError(f"node {n!r} has no theory")
        for e in self.shape.edges:
            if e not in self.morphisms:
                raise IntegrationError(f"edge {e!r} has no signature morphism")
            ends = self.inst.morphism_ends(self.morphisms[e])
            if ends != (self.theories[self.shape.src[e]].signature, self.theories[self.shape.tgt[e]].signature):
                raise InvalidMorphism(f"morphism on edge {e!r} does not join its node signatures")

    def edge_morphism(self: Self, e: Hashable) -> TheoryMorphism:
        return TheoryMorphism(self.theories[self.shape.src[e]], self.theories[self.shape.tgt[e]],
                              self.morphisms[e])


@dataclass(eq=True, frozen=True)
class SignatureColimit:
    signature: Any
    injections: Mapping[Hashable, Any] = field(hash=False)
    provenance: Mapping[str, tuple[Origin, ...]] = field(hash=False)


@dataclass(eq=True, frozen=True)
class FusionResult:
    theory: Theory
    injections: Mapping[Hashable, TheoryMorphism] = field(hash=False)
    provenance: Mapping[str, tuple[Origin, ...]] = field(hash=False)
    consistent: bool = True


# --- per-institution views of signatures as sorted symbol sets ---

def _parts(inst: Institution, sig: Any) -> dict[str, frozenset[str]]:
    match sig:
        case frozenset():
            return {"atom": sig}
        case TermLanguage():
            return {"var": sig.variables, "function": sig.symbols}
        case FOLLanguage():
            return {"var": sig.variables, "function": sig.term_part.symbols,
                    "relation": sig.expr_part.symbols}
    raise InstitutionError(f"{inst.name}: unsupported signature {sig!r}")


def _morphism_parts(sigma: Any) -> dict[str, Mapping[str, str]]:
    match sigma:
        case SignatureMap():
            return {"atom": sigma.table}
        case TermLanguageMorphism():
            return {"var": sigma.vars, "function": sigma.syms}
        case FolMorphism():
            return {"var": sigma.term.vars, "function": sigma.term.syms, "relation": sigma.rels}
    raise InstitutionError(f"unsupported signature morphism {sigma!r}")


def _arities(sig: Any, kind: str) -> Mapping[str, frozenset[str]]:
    match sig, kind:
        case TermLanguage(), "function":
            return sig.arity
        case FOLLanguage(), "function":
            return sig.term_part.arity
        case FOLLanguage(), "relation":
            return sig.expr_part.arity
    return {}


def make_morphism(inst: Institution, source: Any, target: Any, sym_map: Mapping[str, str],
                  var_map: Mapping[str, str]|None = None) -> Any:
    """A signature morphism from flat symbol and variable maps."""
    try:
        match source:
            case frozenset():
                return SignatureMap.of(source, target, sym_map)
            case TermLanguage():
                return TermLanguageMorphism.of(source, target, var_map or {v: v for v in source.variables},
                                               sym_map)
            case FOLLanguage():
                term = TermLanguageMorphism.of(source.term_part, target.term_part,
                                               var_map or {v: v for v in source.variables},
                                               {f: sym_map[f] for f in source.term_part.symbols})
                return FolMorphism(source, target, term,
                                   tuple((r, sym_map[r]) for r in source.expr_part.symbols))
    except KeyError as e:
        raise InvalidMorphism(f"symbol {e} is not mapped") from None
    except TermError as e:
        raise InvalidMorphism(str(e)) from e
    raise InstitutionError(f"{inst.name}: unsupported signature {source!r}")


# --- colimits of signatures ---

def _quotient(shape: FinGraph, sets: Mapping[Hashable, frozenset[str]],
              maps: Mapping[Hashable, Mapping[str, str]]) -> dict[Origin, Hashable]:
    objects = {n: FinSetObj(sets[n]) for n in shape.nodes}
    d = Diagram(shape, objects, {e: FinSetMap.of(objects[shape.src[e]], objects[shape.tgt[e]], maps[e])
                                 for e in shape.edges})
    cocone = colimit(d)
    return {(n, x): cocone.legs[n](x) for n in shape.nodes for x in objects[n].elements}


def _origin_key(o: Origin) -> tuple[str, str]:
    return str(o[0]), o[1]


def _class_names(quotients: Mapping[str, dict[Origin, Hashable]]) -> tuple[dict[tuple[str, Hashable], str],
                                                                          dict[str, tuple[Origin, ...]]]:
    members: dict[tuple[str, Hashable], list[Origin]] = collections.defaultdict(list)
    for kind, q in quotients.items():
        for origin, rep in q.items():
            members[kind, rep].append(origin)
    least = {c: min(ms, key=_origin_key) for c, ms in members.items()}
    plain = collections.Counter(sym for _, sym in least.values())
    names = {c: sym if plain[sym] == 1 else f"{node}:{sym}" for c, (node, sym) in least.items()}
    provenance = {names[c]: tuple(sorted(ms, key=_origin_key)) for c, ms in members.items()}
    return names, dict(sorted(provenance.items()))


def signature_colimit(inst: Institution, shape: FinGraph, signatures: Mapping[Hashable, Any],
                      morphisms: Mapping[Hashable, Any], id: str = "fused") -> SignatureColimit:
    for e in shape.edges:
        if inst.morphism_ends(morphisms[e]) != (signatures[shape.src[e]], signatures[shape.tgt[e]]):
            raise InvalidMorphism(f"morphism on edge {e!r} does not join its node signatures")

    node_parts = {n: _parts(inst, signatures[n]) for n in shape.nodes}
    edge_parts = {e: _morphism_parts(morphisms[e]) for e in shape.edges}
    kinds = list(next(iter(node_parts.values()))) if node_parts else ["atom"]
    quotients = {k: _quotient(shape, {n: node_parts[n][k] for n in shape.nodes},
                              {e: edge_parts[e][k] for e in shape.edges})
                 for k in kinds}
    names, provenance = _class_names(quotients)

    def name(kind: str, n: Hashable, x: str) -> str:
        return names[kind, quotients[kind][n, x]]

    if "var" in quotients:
        # variables must stay in bijection with every node's variables
        var_classes: dict[Hashable, list[Origin]] = collections.defaultdict(list)
        for origin, rep in quotients["var"].items():
            var_classes[rep].append(origin)
        expected = sorted(map(str, shape.nodes))
        for rep, origins in var_classes.items():
            if sorted(str(n) for n, _ in origins) != expected:
                raise IncompatibleVariables(f"variable class {names['var', rep]} does not meet every "
                                            f"node exactly once: {sorted(origins, key=_origin_key)}")

    arities: dict[str, dict[str, frozenset[str]]] = {}
    for kind in kinds:
        if kind in ("function", "relation"):
            table: dict[str, frozenset[str]] = {}
            for n in shape.nodes:
                for f, a in _arities(signatures[n], kind).items():
                    g = name(kind, n, f)
                    transported = frozenset(name("var", n, v) for v in a)
                    if table.setdefault(g, transported) != transported:
                        raise ArityConflict(f"'{g}' receives arities {sorted(table[g])} and {sorted(transported)}")
            arities[kind] = table

    all_names = {kind: sorted({name(kind, n, x) for n in shape.nodes for x in node_parts[n][kind]})
                 for kind in kinds}
    signature: Any
    match kinds:
        case ["atom"]:
            signature = frozenset(all_names["atom"])
        case ["var", "function"]:
            signature = TermLanguage.of(all_names["var"], arities["function"], id)
        case ["var", "function", "relation"]:
            variables = all_names["var"]
            signature = FOLLanguage(frozenset(variables), TermLanguage.of(variables, arities["function"], id),
                                    ExpressionLanguage.of(variables, arities["relation"], id))
        case _:
            raise InstitutionError(f"{inst.name}: unsupported signature parts {kinds}")

    injections = {}
    for n in shape.nodes:
        parts = node_parts[n]
        sym_map = {x: name(k, n, x) for k in kinds if k != "var" for x in parts[k]}
        var_map = {x: name("var", n, x) for x in parts.get("var", ())}
        injections[n] = make_morphism(inst, signatures[n], signature, sym_map, var_map or None)
    return SignatureColimit(signature, injections, provenance)


# --- fusion ---

def fuse(d: AlignmentDiagram, size_bound: int = 3) -> FusionResult:
    inst = d.inst
    sc = signature_colimit(inst, d.shape, {n: t.signature for n, t in d.theories.items()}, d.morphisms, d.id)
    axioms = frozenset(inst.translate(sc.injections[n], a)
                       for n in d.shape.nodes for a in d.theories[n].axioms)
    theory = Theory(sc.signature, axioms, d.id)
    injections = {n: TheoryMorphism(d.theories[n], theory, sc.injections[n]) for n in d.shape.nodes}
    consistent = is_consistent(inst, theory, size_bound)
    if not consistent:
        logger.warning(f"fused theory {d.id} has no models of size <= {size_bound}")
    return FusionResult(theory, injections, sc.provenance, consistent)


def _is_cocone(inst: Institution, d: AlignmentDiagram, legs: Mapping[Hashable, Any]) -> bool:
    return all(inst.compose(legs[d.shape.tgt[e]], d.morphisms[e]) == legs[d.shape.src[e]]
               for e in d.shape.edges)


def _cocones(inst: Institution, d: AlignmentDiagram, vertex: Any) -> Iterable[tuple[Any, ...]]:
    nodes = d.shape.nodes
    choices = [list(inst.morphisms(d.theories[n].signature, vertex)) for n in nodes]
    for legs in itertools.product(*choices):
        if _is_cocone(inst, d, dict(zip(nodes, legs))):
            yield legs


def verify_fusion_universal(d: AlignmentDiagram, result: FusionResult, bound: int = 4,
                            size_bound: int = 2) -> bool:
    """Every cocone into a signature of at most `bound` symbols factors through
    the fused signature by exactly one morphism, which is also a theory morphism
    into the theory the cocone induces."""
    inst = d.inst
    nodes = d.shape.nodes
    colim = result.theory.signature
    if set(result.injections) != set(nodes):
        return False
    inj = {n: result.injections[n].sig_morphism for n in nodes}
    if any(inst.morphism_ends(inj[n]) != (d.theories[n].signature, colim) for n in nodes):
        return False
    if not _is_cocone(inst, d, inj):
        logger.debug("injections do not commute with the alignment")
        return False

    for vertex in inst.test_signatures(bound, colim):
        factored: dict[tuple[Any, ...], list[Any]] = collections.defaultdict(list)
        for u in inst.morphisms(colim, vertex):
            factored[tuple(inst.compose(u, inj[n]) for n in nodes)].append(u)
        for legs in _cocones(inst, d, vertex):
            mediators = factored.get(legs, [])
            if len(mediators) != 1:
                logger.debug(f"{len(mediators)} mediators into {vertex}")
                return False
            induced = Theory(vertex, frozenset(inst.translate(leg, a)
                                               for n, leg in zip(nodes, legs) for a in d.theories[n].axioms))
            u = mediators[0]
            if {inst.translate(u, a) for a in result.theory.axioms} <= induced.axioms:
                continue
            if not check_theory_morphism(inst, TheoryMorphism(result.theory, induced, u), None, size_bound):
                logger.debug(f"mediator into {vertex} is not a theory morphism")
                return False
    return True


def validate_alignment(d: AlignmentDiagram, depth: int = 2, size_bound: int = 3) -> LawReport:
    """Every edge morphism must be a theory morphism at the bounds."""
    report = LawReport()
    for e in d.shape.edges:
        report.checked += 1
        try:
            if not check_theory_morphism(d.inst, d.edge_morphism(e), depth, size_bound):
                report.add("edge-morphism", f"{e}: a translated axiom is not entailed by the target")
        except InvalidMorphism as ex:
            report.add("edge-morphism", f"{e}: {ex}")
    return report


# --- alignment files ---

def load_alignment(text: str, file: str = "<string>", base: str|Path|None = None) -> AlignmentDiagram:
    """Reads `(alignment [id] (institution i) (node id file)... (edge from to (sig-map ...) [(var-map ...)])...)`.

    Theory files are resolved relative to `base`, by default the alignment file's directory.
    """
    base_dir = Path(base) if base is not None else Path(file).parent
    nodes = read(text, file)
    if len(nodes) != 1:
        raise MalformedForm(f"{file}: expected one (alignment ...) form")
    form = expect_list(nodes[0], "alignment")
    align_id = atom_text(form.items[1]) if len(form.items) > 1 and isinstance(form.items[1], SAtom) else "fused"
    inst_node = section(form, "institution")
    inst_name = atoms(inst_node)[0] if inst_node is not None and atoms(inst_node) else None

    theories: dict[Hashable, Theory] = {}
    inst: Institution|None = None
    edges: dict[Hashable, tuple[Hashable, Hashable]] = {}
    edge_forms = {}
    for item in form.items[1:]:
        if isinstance(item, SAtom):
            continue
        sub = expect_list(item)
        match sub.head:
            case "institution":
                pass
            case "node":
                node_id, path = atoms(expect_list(sub, "node", 3))[:2]
                if node_id in theories:
                    raise MalformedForm(f"duplicate node '{node_id}'", sub.span)
                node_inst, theory = load_theory_file(base_dir / path)
                if inst_name is not None and node_inst.name != inst_name:
                    raise MalformedForm(f"node '{node_id}' is in {node_inst.name}, not {inst_name}", sub.span)
                if inst is not None and node_inst is not inst:
                    raise MalformedForm(f"node '{node_id}' mixes institutions", sub.span)
                inst = node_inst
                theories[node_id] = theory
            case "edge":
                expect_list(sub, "edge", 3)
                src, tgt = atom_text(sub.items[1]), atom_text(sub.items[2])
                edge_id = f"{src}->{tgt}"
                k = 1
                while edge_id in edges:
                    k += 1
                    edge_id = f"{src}->{tgt}#{k}"
                edges[edge_id] = (src, tgt)
                edge_forms[edge_id] = sub
            case _:
                raise MalformedForm(f"unexpected ({sub.head} ...) in an alignment", sub.span)

    if inst is None:
        raise MalformedForm(f"{file}: an alignment needs at least one node", form.span)

    morphisms = {}
    for edge_id, (src, tgt) in edges.items():
        sub = edge_forms[edge_id]
        if src not in theories or tgt not in theories:
            raise MalformedForm(f"edge {edge_id} joins unknown nodes", sub.span)
        sig_map = section(sub, "sig-map", 3)
        var_map = section(sub, "var-map", 3)
        try:
            morphisms[edge_id] = make_morphism(inst, theories[src].signature, theories[tgt].signature,
                                               dict(pairs(sig_map)) if sig_map is not None else {},
                                               dict(pairs(var_map)) if var_map is not None else None)
        except InstitutionError as e:
            raise MalformedForm(f"edge {edge_id}: {e}", sub.span) from e

    return AlignmentDiagram(inst, FinGraph.of(theories, edges), theories, morphisms, align_id)


def load_alignment_file(path: str|Path) -> AlignmentDiagram:
    path = Path(path)
    return load_alignment(path.read_text(encoding="utf-8"), str(path))


def dump_provenance(result: FusionResult) -> str:
    lines = ["(provenance"]
    for name, origins in result.provenance.items():
        lines.append(f"  ({name}" + "".join(f" ({node} {sym})" for node, sym in origins) + ")")
    return "\n".join(lines) + ")\n"
