"""Classifications, infomorphisms, concept lattices and local logics."""
import itertools
import logging
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import TYPE_CHECKING, Any
import sys

if sys.version_info >= (3, 11):
    from typing import Self
else:  # pragma: no cover
    from typing_extensions import Self

from iffkit.iffkit_types import IffError, LawReport
from iffkit.iffkit_utils import powerset
from iffkit.sexpr import MalformedForm, atom_text, atoms, expect_list, pairs, read, section

if TYPE_CHECKING:
    from iffkit.institution import Institution

logger = logging.getLogger("iffkit")


class ClassificationError(IffError):
    pass


@dataclass(eq=True, frozen=True)
class Classification:
    """Tokens and types keep their input order; it fixes the lectic order."""
    tokens: tuple[Hashable, ...]
    types: tuple[Hashable, ...]
    incidence: frozenset[tuple[Hashable, Hashable]]
    id: str = field(default="", compare=False, hash=False)

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "incidence", frozenset(self.incidence))
        if len(set(self.tokens)) != len(self.tokens) or len(set(self.types)) != len(self.types):
            raise ClassificationError(f"{self.id}: repeated token or type")
        tokens, types = set(self.tokens), set(self.types)
        for a, t in self.incidence:
            if a not in tokens or t not in types:
                raise ClassificationError(f"{self.id}: incidence ({a}, {t}) outside the carriers")

    @classmethod
    def of(cls, tokens: Iterable[Hashable], types: Iterable[Hashable],
           incidence: Iterable[tuple[Hashable, Hashable]], id: str = "") -> Self:
        return cls(tuple(tokens), tuple(types), frozenset(incidence), id)

    def holds(self: Self, token: Hashable, typ: Hashable) -> bool:
        return (token, typ) in self.incidence

    @cached_property
    def _rows(self: Self) -> dict[Hashable, frozenset[Hashable]]:
        rows: dict[Hashable, set[Hashable]] = {a: set() for a in self.tokens}
        for a, t in self.incidence:
            rows[a].add(t)
        return {a: frozenset(ts) for a, ts in rows.items()}

    @cached_property
    def _columns(self: Self) -> dict[Hashable, frozenset[Hashable]]:
        cols: dict[Hashable, set[Hashable]] = {t: set() for t in self.types}
        for a, t in self.incidence:
            cols[t].add(a)
        return {t: frozenset(a) for t, a in cols.items()}

    def row(self: Self, token: Hashable) -> frozenset[Hashable]:
        return self._rows[token]

    def column(self: Self, typ: Hashable) -> frozenset[Hashable]:
        return self._columns[typ]


def intent(c: Classification, tokens: Iterable[Hashable]) -> frozenset[Hashable]:
    """Types incident to every given token."""
    result = frozenset(c.types)
    for a in tokens:
        result &= c.row(a)
    return result


def extent(c: Classification, types: Iterable[Hashable]) -> frozenset[Hashable]:
    """Tokens incident to every given type."""
    result = frozenset(c.tokens)
    for t in types:
        result &= c.column(t)
    return result


@dataclass(eq=True, frozen=True)
class FormalConcept:
    extent: frozenset[Hashable]
    intent: frozenset[Hashable]


class ConceptLattice:
    """Concepts in lectic order, ordered by extent inclusion."""

    def __init__(self, classification: Classification, concepts: Iterable[FormalConcept]) -> None:
        self.classification = classification
        self.concepts = tuple(concepts)
        self._by_extent = {k.extent: k for k in self.concepts}

    def __len__(self) -> int:
        return len(self.concepts)

    def __iter__(self) -> Iterator[FormalConcept]:
        return iter(self.concepts)

    def __contains__(self, k: object) -> bool:
        return k in self._by_extent.values()

    def leq(self, a: FormalConcept, b: FormalConcept) -> bool:
        return a.extent <= b.extent

    def _from_extent(self, ext: frozenset[Hashable]) -> FormalConcept:
        c = self.classification
        closed = extent(c, intent(c, ext))
        return self._by_extent.get(closed) or FormalConcept(closed, intent(c, closed))

    def meet(self, a: FormalConcept, b: FormalConcept) -> FormalConcept:
        return self._from_extent(a.extent & b.extent)

    def join(self, a: FormalConcept, b: FormalConcept) -> FormalConcept:
        c = self.classification
        return self._from_extent(extent(c, a.intent & b.intent))

    @property
    def top(self) -> FormalConcept:
        return self._from_extent(frozenset(self.classification.tokens))

    @property
    def bottom(self) -> FormalConcept:
        return self._from_extent(extent(self.classification, self.classification.types))


def _next_closure(items: list[Hashable], close: Callable[[frozenset[Hashable]], frozenset[Hashable]]
                  ) -> Iterator[frozenset[Hashable]]:
    """Closed sets of `close` in lectic order over `items`."""
    position = {x: i for i, x in enumerate(items)}
    current = close(frozenset())
    yield current
    everything = frozenset(items)
    while current != everything:
        for i in range(len(items) - 1, -1, -1):
            m = items[i]
            if m in current:
                continue
            prefix = frozenset(x for x in current if position[x] < i)
            candidate = close(prefix | {m})
            if all(position[x] >= i for x in candidate - current):
                current = candidate
                yield current
                break
        else:
            return


def concepts(c: Classification) -> ConceptLattice:
    """All formal concepts, by next-closure over tokens in input order."""
    found = []
    for ext in _next_closure(list(c.tokens), lambda x: extent(c, intent(c, x))):
        found.append(FormalConcept(ext, intent(c, ext)))
    return ConceptLattice(c, found)


def check_lattice_laws(lattice: ConceptLattice) -> LawReport:
    report = LawReport()
    ks = lattice.concepts
    for a, b in itertools.product(ks, repeat=2):
        report.checked += 1
        m, j = lattice.meet(a, b), lattice.join(a, b)
        if m not in lattice or j not in lattice:
            report.add("closure", f"meet or join of {a} and {b} is not a concept")
        if m != lattice.meet(b, a) or j != lattice.join(b, a):
            report.add("commutativity", f"{a}, {b}")
        if lattice.meet(j, a) != a or lattice.join(m, a) != a:
            report.add("absorption", f"{a}, {b}")
        if not (lattice.leq(m, a) and lattice.leq(m, b) and lattice.leq(a, j) and lattice.leq(b, j)):
            report.add("bounds", f"{a}, {b}")
    for a, b, c in itertools.product(ks, repeat=3):
        if lattice.meet(a, lattice.meet(b, c)) != lattice.meet(lattice.meet(a, b), c):
            report.add("meet-associativity", f"{a}, {b}, {c}")
        if lattice.join(a, lattice.join(b, c)) != lattice.join(lattice.join(a, b), c):
            report.add("join-associativity", f"{a}, {b}, {c}")
    if ks and not all(lattice.leq(lattice.bottom, k) and lattice.leq(k, lattice.top) for k in ks):
        report.add("bounded", "top or bottom is not extremal")
    return report


# --- infomorphisms and bonds ---

@dataclass(eq=True, frozen=True)
class Infomorphism:
    """A: types go forward to B, tokens come back from B."""
    source: Classification
    target: Classification
    type_map: Mapping[Hashable, Hashable] = field(hash=False)
    token_map: Mapping[Hashable, Hashable] = field(hash=False)


def check_infomorphism(i: Infomorphism) -> bool:
    a, b = i.source, i.target
    if set(i.type_map) != set(a.types) or set(i.token_map) != set(b.tokens):
        raise ClassificationError("infomorphism maps are not total")
    for tok in b.tokens:
        for typ in a.types:
            if a.holds(i.token_map[tok], typ) != b.holds(tok, i.type_map[typ]):
                logger.debug(f"fundamental property fails at token {tok!r}, type {typ!r}")
                return False
    return True


def identity_infomorphism(c: Classification) -> Infomorphism:
    return Infomorphism(c, c, {t: t for t in c.types}, {a: a for a in c.tokens})


def compose_infomorphisms(g: Infomorphism, f: Infomorphism) -> Infomorphism:
    """g after f, for f: A -> B and g: B -> C."""
    if f.target != g.source:
        raise ClassificationError("infomorphisms are not composable")
    return Infomorphism(f.source, g.target,
                        {t: g.type_map[f.type_map[t]] for t in f.source.types},
                        {c: f.token_map[g.token_map[c]] for c in g.target.tokens})


def check_bond(a: Classification, b: Classification,
               relation: Iterable[tuple[Hashable, Hashable]]) -> bool:
    """A bond relates tokens of `a` to types of `b`; every row is an intent of `b`
    and every column an extent of `a`."""
    rel = frozenset(relation)
    if any(x not in a.tokens or t not in b.types for x, t in rel):
        return False
    for x in a.tokens:
        row = frozenset(t for y, t in rel if y == x)
        if intent(b, extent(b, row)) != row:
            return False
    for t in b.types:
        col = frozenset(y for y, s in rel if s == t)
        if extent(a, intent(a, col)) != col:
            return False
    return True


# --- truth classification ---

def truth_classification(inst: "Institution", sig: Any, model_bound: int, sentence_depth: int,
                         sentences: Iterable[Any]|None = None) -> Classification:
    """Models of `sig` as tokens, sentences as types, satisfaction as incidence."""
    models = list(inst.models(sig, model_bound))
    if not models:
        logger.warning(f"{inst.name}: no models within bound {model_bound}")
    sens = list(dict.fromkeys(sentences if sentences is not None
                              else inst.sentences(sig, sentence_depth)))
    incidence = {(m, s) for m in models for s in sens if inst.satisfies(sig, m, s)}
    return Classification(tuple(models), tuple(sens), frozenset(incidence), f"truth({inst.name})")


# --- local logics ---

@dataclass(eq=True, frozen=True)
class Sequent:
    antecedent: frozenset[Hashable]
    consequent: frozenset[Hashable]

    def holds_for(self: Self, state: frozenset[Hashable]) -> bool:
        return not self.antecedent <= state or bool(self.consequent & state)


@dataclass(eq=True, frozen=True)
class LocalLogic:
    classification: Classification
    constraints: frozenset[Sequent]
    normal_tokens: frozenset[Hashable]


@dataclass(eq=True, frozen=True)
class LogicCheck:
    sound: bool
    complete: bool


def sequents(types: Iterable[Hashable]) -> Iterator[Sequent]:
    types = list(types)
    for gamma in powerset(types):
        for delta in powerset(t for t in types if t not in gamma):
            yield Sequent(gamma, delta)


def check_local_logic(logic: LocalLogic, type_bound: int = 6) -> LogicCheck:
    """Sound: normal tokens satisfy every constraint. Complete: every sequent the
    normal tokens satisfy holds in every type state satisfying the constraints."""
    c = logic.classification
    normal = [c.row(a) for a in c.tokens if a in logic.normal_tokens]
    sound = all(s.holds_for(row) for s in logic.constraints for row in normal)

    if len(c.types) > type_bound:
        raise ClassificationError(f"{len(c.types)} types exceed the completeness bound {type_bound}")
    states = [s for s in powerset(c.types) if all(k.holds_for(s) for k in logic.constraints)]
    complete = all(all(seq.holds_for(s) for s in states)
                   for seq in sequents(c.types)
                   if all(seq.holds_for(row) for row in normal))
    return LogicCheck(sound, complete)


# --- context files ---

def load_classification(text: str, file: str = "<string>") -> Classification:
    nodes = read(text, file)
    if len(nodes) != 1:
        raise MalformedForm(f"{file}: expected one (classification ...) form")
    form = expect_list(nodes[0], "classification", 2)
    tokens_node, types_node = section(form, "tokens", 2), section(form, "types", 2)
    if tokens_node is None or types_node is None:
        raise MalformedForm("classification needs (tokens ...) and (types ...)", form.span)
    incidence_node = section(form, "incidence", 2)
    incidence = pairs(incidence_node) if incidence_node is not None else []
    try:
        return Classification.of(atoms(tokens_node), atoms(types_node), incidence,
                                 atom_text(form.items[1]))
    except ClassificationError as e:
        raise MalformedForm(str(e), form.span) from e


def load_classification_file(path: str|Path) -> Classification:
    path = Path(path)
    return load_classification(path.read_text(encoding="utf-8"), str(path))


def dump_concepts(lattice: ConceptLattice, token_text: Callable[[Any], str] = str,
                  type_text: Callable[[Any], str] = str) -> str:
    c = lattice.classification
    lines = []
    for k in lattice:
        ext = " ".join(token_text(a) for a in c.tokens if a in k.extent)
        inte = " ".join(type_text(t) for t in c.types if t in k.intent)
        lines.append(f"(concept ({' '.join(filter(None, ['extent', ext]))}) "
                     f"({' '.join(filter(None, ['intent', inte]))}))")
    return "".join(f"{line}\n" for line in lines)
