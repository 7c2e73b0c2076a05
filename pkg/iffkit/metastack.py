"""Leveled sets, functions and relations, and the three fundamental generic
relations (subset, restriction, abridgment) linking adjacent metalevels.

Carriers are finite; a level is a tag saying which relations may cross it.
"""
import logging
from collections.abc import Hashable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import TypeAlias
import sys

if sys.version_info >= (3, 11):
    from typing import Self
else:  # pragma: no cover
    from typing_extensions import Self

from iffkit.iffkit_types import IffError
from iffkit.iffkit_utils import ordered
from iffkit.registry import Kind, Metalevel, Registry, TermRef
from iffkit.sexpr import (
    MalformedForm, Node, ParseError, SAtom, SList, atom_text, expect_list, lst, pairs, read, to_text,
)

logger = logging.getLogger("iffkit")

Element: TypeAlias = Hashable


class MetastackError(IffError):
    pass


class LevelMismatch(MetastackError):
    pass


class NotASubset(MetastackError):
    pass


class ImageEscapesTarget(MetastackError):
    pass


# Kernel symbol -> (IFF-UR term, kind); the 30 terms of the generic kernel.
KERNEL_CORRESPONDENCE: dict[str, tuple[str, Kind]] = {
    "thing": ("thing", Kind.SET),
    "Obj": ("object", Kind.SET),
    "Mor": ("morphism", Kind.SET),
    "Mor×Mor": ("morphism-morphism", Kind.SET),
    "Rel": ("relation", Kind.SET),
    "Sub": ("subordinate", Kind.SET),
    "∂0": ("source", Kind.FUNCTION),
    "∂1": ("target", Kind.FUNCTION),
    "ρ": ("mor2rel", Kind.FUNCTION),
    "μ0": ("morphism0", Kind.FUNCTION),
    "μ1": ("morphism1", Kind.FUNCTION),
    "∘": ("composition", Kind.FUNCTION),
    "1": ("identity", Kind.FUNCTION),
    "o0": ("object0", Kind.FUNCTION),
    "o1": ("object1", Kind.FUNCTION),
    "ε": ("extent", Kind.FUNCTION),
    "π0": ("projection0", Kind.FUNCTION),
    "π1": ("projection1", Kind.FUNCTION),
    "λ": ("lesser", Kind.FUNCTION),
    "γ": ("greater", Kind.FUNCTION),
    "ι": ("inclusion", Kind.FUNCTION),
    "δ": ("reflex", Kind.FUNCTION),
    "≤": ("subobject", Kind.RELATION),
    "⊥": ("disjoint", Kind.RELATION),
    "≅": ("isomorphic", Kind.RELATION),
    "⌊": ("restriction", Kind.RELATION),
    "◁": ("abridgment", Kind.RELATION),
    "Mono": ("monomorphism", Kind.RELATION),
    "Epi": ("epimorphism", Kind.RELATION),
    "Iso": ("isomorphism", Kind.RELATION),
}


def check_kernel(registry: Registry, path: tuple[str, ...] = ("ur",)) -> list[str]:
    """Differences between the kernel table and the IFF-UR vocabulary in `registry`."""
    key = (Metalevel.UR, path)
    problems = []
    for symbol, (term, kind) in KERNEL_CORRESPONDENCE.items():
        entry = registry.entries.get(TermRef(key, term))
        if entry is None:
            problems.append(f"{symbol}: '{term}' missing")
        elif entry.kind is not kind:
            problems.append(f"{symbol}: '{term}' is a {entry.kind}, expected {kind}")
    expected = {term for term, _ in KERNEL_CORRESPONDENCE.values()}
    for entry in registry.entries_of(key):
        if entry.term not in expected:
            problems.append(f"'{entry.term}' is not a kernel term")
    return problems


def _level(value: Metalevel|int) -> Metalevel:
    try:
        level = Metalevel(value)
    except ValueError:
        raise LevelMismatch(f"no metalevel {value!r}") from None
    if level < Metalevel.SML:
        raise LevelMismatch("the object level holds no metastack data")
    return level


@dataclass(eq=True, frozen=True)
class LeveledSet:
    level: Metalevel
    elements: frozenset[Element]
    id: str = field(default="", compare=False, hash=False)

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "level", _level(self.level))
        object.__setattr__(self, "elements", frozenset(self.elements))

    def __contains__(self: Self, x: Element) -> bool:
        return x in self.elements

    def __iter__(self: Self) -> Iterator[Element]:
        return iter(ordered(self.elements))

    def __len__(self: Self) -> int:
        return len(self.elements)


@dataclass(eq=True, frozen=True)
class LeveledFunction:
    """A function between same-level sets; `domain` is set for partial functions."""
    level: Metalevel
    source: LeveledSet
    target: LeveledSet
    graph: frozenset[tuple[Element, Element]]
    domain: frozenset[Element]|None = None
    id: str = field(default="", compare=False, hash=False)

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "level", _level(self.level))
        object.__setattr__(self, "graph", frozenset(self.graph))
        if self.source.level != self.level or self.target.level != self.level:
            raise LevelMismatch(f"function {self.id or ''} at level {self.level.alias} "
                                f"joins sets at {self.source.level.alias} and {self.target.level.alias}")

        table = dict(self.graph)
        if len(table) != len(self.graph):
            raise MetastackError(f"function {self.id} assigns two images to one element")
        defined = self.source.elements if self.domain is None else self.domain
        if not defined <= self.source.elements:
            raise NotASubset(f"function {self.id} has a domain outside its source")
        if set(table) != defined:
            raise MetastackError(f"function {self.id} is not defined exactly on its domain")
        if escaped := {y for y in table.values() if y not in self.target}:
            raise ImageEscapesTarget(f"function {self.id} maps into {ordered(escaped)} outside its target")

    @classmethod
    def of(cls, level: Metalevel|int, source: LeveledSet, target: LeveledSet,
           mapping: Mapping[Element, Element], partial: bool = False, id: str = "") -> Self:
        return cls(Metalevel(level), source, target, frozenset(mapping.items()),
                   frozenset(mapping) if partial else None, id)

    @property
    def table(self: Self) -> dict[Element, Element]:
        return dict(self.graph)

    @property
    def total(self: Self) -> bool:
        return self.domain is None or self.domain == self.source.elements

    def __call__(self: Self, x: Element) -> Element:
        for a, b in self.graph:
            if a == x:
                return b
        raise KeyError(x)


@dataclass(eq=True, frozen=True)
class LeveledRelation:
    level: Metalevel
    left: LeveledSet
    right: LeveledSet
    extent: frozenset[tuple[Element, Element]]
    id: str = field(default="", compare=False, hash=False)

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "level", _level(self.level))
        object.__setattr__(self, "extent", frozenset(self.extent))
        if self.left.level != self.level or self.right.level != self.level:
            raise LevelMismatch(f"relation {self.id} joins sets at other levels")
        for x, y in self.extent:
            if x not in self.left or y not in self.right:
                raise NotASubset(f"relation {self.id} holds ({x}, {y}) outside its carriers")

    def projection0(self: Self) -> LeveledFunction:
        ext = LeveledSet(self.level, frozenset(self.extent))
        return LeveledFunction.of(self.level, ext, self.left, {p: p[0] for p in self.extent})

    def projection1(self: Self) -> LeveledFunction:
        ext = LeveledSet(self.level, frozenset(self.extent))
        return LeveledFunction.of(self.level, ext, self.right, {p: p[1] for p in self.extent})


Leveled: TypeAlias = LeveledSet|LeveledFunction|LeveledRelation


def _adjacent(lower: Leveled, upper: Leveled) -> None:
    if upper.level != lower.level + 1:
        raise LevelMismatch(f"expected levels k and k+1, got {lower.level.alias} and {upper.level.alias}")


def is_subobject(lower: LeveledSet, upper: LeveledSet) -> bool:
    _adjacent(lower, upper)
    return lower.elements <= upper.elements


def is_restriction(f_k: LeveledFunction, f_k1: LeveledFunction) -> bool:
    """True when the inclusion square from f_k to f_k1 commutes."""
    _adjacent(f_k, f_k1)
    if not (f_k.source.elements <= f_k1.source.elements
            and f_k.target.elements <= f_k1.target.elements):
        return False
    upper = f_k1.table
    return all(x in upper and upper[x] == y for x, y in f_k.graph)


def is_abridgment(r_k: LeveledRelation, r_k1: LeveledRelation) -> bool:
    """True when r_k is the full subrelation of r_k1 induced on its carriers."""
    _adjacent(r_k, r_k1)
    if not (r_k.left.elements <= r_k1.left.elements
            and r_k.right.elements <= r_k1.right.elements):
        return False
    induced = {(x, y) for x, y in r_k1.extent if x in r_k.left and y in r_k.right}
    return r_k.extent == induced


# --- specialization one level down ---

def _down(data: Leveled, level: Metalevel|int|None = None) -> Metalevel:
    target = data.level - 1 if level is None else _level(level)
    if target < Metalevel.SML:
        raise LevelMismatch(f"cannot specialize below {data.level.alias}")
    if target >= data.level:
        raise LevelMismatch(f"cannot specialize {data.level.alias} data to {Metalevel(target).alias}")
    return Metalevel(target)


def _subset(chosen: Iterable[Element], carrier: LeveledSet, what: str) -> frozenset[Element]:
    chosen = frozenset(chosen)
    if not chosen <= carrier.elements:
        raise NotASubset(f"{what} {ordered(chosen - carrier.elements)} not in the carrier")
    return chosen


def specialize_set(s: LeveledSet, subset: Iterable[Element],
                   level: Metalevel|int|None = None) -> LeveledSet:
    return LeveledSet(_down(s, level), _subset(subset, s, "elements"), s.id)


def specialize_function(f: LeveledFunction, source: Iterable[Element],
                        target: Iterable[Element],
                        level: Metalevel|int|None = None) -> LeveledFunction:
    level = _down(f, level)
    src = LeveledSet(level, _subset(source, f.source, "source elements"))
    tgt = LeveledSet(level, _subset(target, f.target, "target elements"))
    table = f.table
    kept = {x: table[x] for x in src.elements if x in table}
    if escaped := ordered(x for x, y in kept.items() if y not in tgt):
        raise ImageEscapesTarget(f"images of {escaped} fall outside the chosen target")
    return LeveledFunction.of(level, src, tgt, kept, partial=not f.total, id=f.id)


def specialize_relation(r: LeveledRelation, left: Iterable[Element],
                        right: Iterable[Element],
                        level: Metalevel|int|None = None) -> LeveledRelation:
    level = _down(r, level)
    lft = LeveledSet(level, _subset(left, r.left, "left elements"))
    rgt = LeveledSet(level, _subset(right, r.right, "right elements"))
    extent = frozenset((x, y) for x, y in r.extent if x in lft and y in rgt)
    return LeveledRelation(level, lft, rgt, extent, r.id)


def specialize(data: Leveled, *subsets: Iterable[Element], level: Metalevel|int|None = None) -> Leveled:
    """One subset for a set, source and target subsets for a function,
    left and right subsets for a relation.

    The result sits one level down unless `level` names a lower one.
    """
    match data, subsets:
        case LeveledSet(), (chosen,):
            return specialize_set(data, chosen, level)
        case LeveledFunction(), (source, target):
            return specialize_function(data, source, target, level)
        case LeveledRelation(), (left, right):
            return specialize_relation(data, left, right, level)
    raise TypeError(f"cannot specialize {type(data).__name__} with {len(subsets)} subset(s)")


# --- composition and the partial-function conversions ---

def identity(s: LeveledSet) -> LeveledFunction:
    return LeveledFunction.of(s.level, s, s, {x: x for x in s.elements})


def compose(g: LeveledFunction, f: LeveledFunction) -> LeveledFunction:
    """g after f."""
    if f.level != g.level:
        raise LevelMismatch("composition across levels")
    if f.target.elements != g.source.elements:
        raise MetastackError(f"{g.id or 'g'} does not start where {f.id or 'f'} ends")
    ft, gt = f.table, g.table
    mapping = {x: gt[y] for x, y in ft.items() if y in gt}
    partial = not (f.total and g.total)
    return LeveledFunction.of(f.level, f.source, g.target, mapping, partial=partial)


def pfn2ftn(f: LeveledFunction) -> LeveledFunction:
    """The total function obtained by restricting a partial one to its domain."""
    if f.total:
        return f
    assert f.domain is not None
    source = LeveledSet(f.level, f.domain)
    return LeveledFunction.of(f.level, source, f.target, f.table, id=f.id)


def function_graph(f: LeveledFunction) -> LeveledRelation:
    """The relation of a (possibly partial) function: mor2rel."""
    return LeveledRelation(f.level, f.source, f.target, f.graph, f.id)


def pfn2rel(f: LeveledFunction) -> LeveledRelation:
    return function_graph(f)


@dataclass(eq=True, frozen=True)
class FunctorialityCase:
    """A composable pair at level k, its counterpart at k+1, and optionally the
    level-k composite to test (computed when absent)."""
    lower: tuple[LeveledFunction, LeveledFunction]
    upper: tuple[LeveledFunction, LeveledFunction]
    lower_composite: LeveledFunction|None = None


def verify_inclusion_functoriality(cases: Iterable[FunctorialityCase]) -> bool:
    for case in cases:
        (f_k, g_k), (f_k1, g_k1) = case.lower, case.upper
        _adjacent(f_k, f_k1)
        _adjacent(g_k, g_k1)

        composite = case.lower_composite or compose(g_k, f_k)
        if not is_restriction(composite, compose(g_k1, f_k1)):
            logger.debug(f"composite of {g_k.id} and {f_k.id} does not restrict")
            return False
        for lower_set, upper_set in ((f_k.source, f_k1.source), (f_k.target, f_k1.target),
                                     (g_k.target, g_k1.target)):
            if not is_restriction(identity(lower_set), identity(upper_set)):
                return False
    return True


# --- corpus format ---

def _elements(node: Node) -> frozenset[str]:
    items = expect_list(node, min_items=0).items
    return frozenset(atom_text(i) for i in items)


def load_leveled(text: str, file: str = "<string>") -> dict[str, Leveled]:
    """Reads `(set ...)`, `(function ...)` and `(relation ...)` forms; later forms
    refer to sets by id."""
    store: dict[str, Leveled] = {}

    def carrier(node: Node) -> LeveledSet:
        name = atom_text(node)
        if not isinstance(s := store.get(name), LeveledSet):
            raise MalformedForm(f"'{name}' is not a previously defined set", node.span)
        return s

    for node in read(text, file):
        form = expect_list(node)
        try:
            match form.head:
                case "set":
                    expect_list(form, "set", 4)
                    _, level, id, elems = form.items
                    data: Leveled = LeveledSet(Metalevel.parse(atom_text(level)), _elements(elems),
                                               atom_text(id))
                case "function":
                    expect_list(form, "function", 6)
                    level, id, src, tgt, graph = form.items[1:6]
                    partial = any(atom_text(x) == "partial" for x in form.items[6:])
                    data = LeveledFunction.of(Metalevel.parse(atom_text(level)), carrier(src),
                                              carrier(tgt), dict(pairs(graph)), partial,
                                              atom_text(id))
                case "relation":
                    expect_list(form, "relation", 6)
                    level, id, left, right, extent = form.items[1:6]
                    data = LeveledRelation(Metalevel.parse(atom_text(level)), carrier(left),
                                           carrier(right), frozenset(pairs(extent)), atom_text(id))
                case _:
                    raise MalformedForm(f"unknown leveled form '{form.head}'", form.span)
        except ParseError:
            raise
        except IffError as e:
            raise MalformedForm(str(e), form.span) from e
        store[data.id] = data

    return store


def load_leveled_file(path: str|Path) -> dict[str, Leveled]:
    path = Path(path)
    return load_leveled(path.read_text(encoding="utf-8"), str(path))


def _pair_list(graph: Iterable[tuple[Element, Element]]) -> SList:
    return SList(tuple(lst(str(x), str(y)) for x, y in ordered(graph)))


def dump_leveled(data: Iterable[Leveled]) -> str:
    forms = []
    for d in data:
        match d:
            case LeveledSet():
                forms.append(lst("set", d.level.alias, d.id, SList(tuple(SAtom(str(x)) for x in d))))
            case LeveledFunction():
                extra = ("partial",) if d.domain is not None else ()
                forms.append(lst("function", d.level.alias, d.id, d.source.id, d.target.id,
                                 _pair_list(d.graph), *extra))
            case LeveledRelation():
                forms.append(lst("relation", d.level.alias, d.id, d.left.id, d.right.id,
                                 _pair_list(d.extent)))
    return "".join(to_text(f) + "\n" for f in forms)
