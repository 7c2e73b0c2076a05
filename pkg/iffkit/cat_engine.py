"""Finite categories, functors and natural transformations, and finite limits
and colimits in FinSet.

Law checks are exhaustive unless a sample size is given. Lazily materialized
categories (Lawvere fragments) implement `Category` and may report some
composable pairs as boundary pairs, which the checks skip.
"""
import itertools
import logging
import random
from collections import defaultdict
from collections.abc import Hashable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from iffkit.iffkit_types import StrEnum
from typing import Any, Protocol
import sys

if sys.version_info >= (3, 11):
    from typing import Self
else:  # pragma: no cover
    from typing_extensions import Self

from iffkit.iffkit_types import IffError, LawReport
from iffkit.iffkit_utils import all_maps, ordered, sort_key
from iffkit.union_find import UnionFind

logger = logging.getLogger("iffkit")


class CategoryError(IffError):
    pass


class UnknownMorphism(CategoryError):
    pass


class NotACone(CategoryError):
    pass


class ComponentMissing(CategoryError):
    pass


class IllFormed(CategoryError):
    pass


class Category(Protocol):
    def objects(self) -> Iterable[Any]: ...
    def morphisms(self) -> Iterable[Any]: ...
    def source(self, m: Any) -> Any: ...
    def target(self, m: Any) -> Any: ...
    def identity(self, o: Any) -> Any: ...
    def compose(self, g: Any, f: Any) -> Any: ...
    def is_boundary(self, g: Any, f: Any) -> bool: ...


@dataclass(eq=True, frozen=True)
class FinGraph:
    nodes: tuple[Hashable, ...]
    edges: tuple[Hashable, ...] = ()
    src: Mapping[Hashable, Hashable] = field(default_factory=dict, hash=False)
    tgt: Mapping[Hashable, Hashable] = field(default_factory=dict, hash=False)

    def __post_init__(self: Self) -> None:
        for e in self.edges:
            if self.src.get(e) not in self.nodes or self.tgt.get(e) not in self.nodes:
                raise IllFormed(f"edge {e!r} does not join two nodes")

    @classmethod
    def of(cls, nodes: Iterable[Hashable], edges: Mapping[Hashable, tuple[Hashable, Hashable]]|None = None) -> Self:
        """Builds a graph from `edge -> (source node, target node)`."""
        edges = edges or {}
        return cls(tuple(nodes), tuple(edges),
                   {e: s for e, (s, _) in edges.items()},
                   {e: t for e, (_, t) in edges.items()})


@dataclass(eq=True, frozen=True)
class FinCategory:
    """A finite category given by explicit tables; `comp` maps (g, f) to g∘f."""
    objs: tuple[Hashable, ...]
    mors: tuple[Hashable, ...]
    src: Mapping[Hashable, Hashable] = field(hash=False)
    tgt: Mapping[Hashable, Hashable] = field(hash=False)
    comp: Mapping[tuple[Hashable, Hashable], Hashable] = field(hash=False)
    ids: Mapping[Hashable, Hashable] = field(hash=False)

    def __post_init__(self: Self) -> None:
        known = set(self.mors)
        for m in self.mors:
            if self.src.get(m) not in self.objs or self.tgt.get(m) not in self.objs:
                raise IllFormed(f"morphism {m!r} lacks a source or target object")
        for o in self.objs:
            if self.ids.get(o) not in known:
                raise IllFormed(f"object {o!r} lacks an identity")

    def objects(self: Self) -> Iterable[Hashable]:
        return self.objs

    def morphisms(self: Self) -> Iterable[Hashable]:
        return self.mors

    def source(self: Self, m: Hashable) -> Hashable:
        if m not in self.src:
            raise UnknownMorphism(f"unknown morphism {m!r}")
        return self.src[m]

    def target(self: Self, m: Hashable) -> Hashable:
        if m not in self.tgt:
            raise UnknownMorphism(f"unknown morphism {m!r}")
        return self.tgt[m]

    def identity(self: Self, o: Hashable) -> Hashable:
        return self.ids[o]

    def compose(self: Self, g: Hashable, f: Hashable) -> Hashable:
        if (g, f) not in self.comp:
            raise IllFormed(f"no composite for {g!r} after {f!r}")
        return self.comp[(g, f)]

    def is_boundary(self: Self, g: Hashable, f: Hashable) -> bool:
        return False


def hom(c: Category, a: Any, b: Any) -> list[Any]:
    return [m for m in c.morphisms() if c.source(m) == a and c.target(m) == b]


def check_category_laws(c: Category, sample: int|None = None, seed: int = 0) -> LawReport:
    """Typing, identity and associativity laws over composable pairs and triples.

    With `sample`, that many random triples are checked instead of all of them.
    """
    report = LawReport()
    mors = list(c.morphisms())
    known = set(mors)
    by_source: dict[Any, list[Any]] = defaultdict(list)
    for m in mors:
        by_source[c.source(m)].append(m)

    for o in c.objects():
        i = c.identity(o)
        if c.source(i) != o or c.target(i) != o:
            report.add("identity-typing", f"identity of {o!r} is {i!r}")

    composites: dict[tuple[Any, Any], Any] = {}

    def composite(g: Any, f: Any) -> Any:
        """g∘f, or None for a boundary pair or a missing composite."""
        if (g, f) in composites:
            return composites[(g, f)]
        composites[(g, f)] = None
        if c.is_boundary(g, f):
            return None
        try:
            h = c.compose(g, f)
        except CategoryError as e:
            report.add("composition-total", str(e))
            return None
        report.checked += 1
        composites[(g, f)] = h
        if h not in known:
            report.add("composition-closed", f"{g!r} after {f!r} gives unknown {h!r}")
        elif c.source(h) != c.source(f) or c.target(h) != c.target(g):
            report.add("composition-typing", f"{g!r} after {f!r} gives {h!r}")
        return h

    def check_units(f: Any) -> None:
        left = composite(c.identity(c.target(f)), f)
        if left is not None and left != f:
            report.add("left-identity", f"id after {f!r} gives {left!r}")
        right = composite(f, c.identity(c.source(f)))
        if right is not None and right != f:
            report.add("right-identity", f"{f!r} after id gives {right!r}")

    def check_triple(f: Any, g: Any, h: Any) -> None:
        gf, hg = composite(g, f), composite(h, g)
        if gf is None or hg is None:
            return
        lhs, rhs = composite(h, gf), composite(hg, f)
        if lhs is not None and rhs is not None and lhs != rhs:
            report.add("associativity", f"({h!r} {g!r} {f!r}): {lhs!r} != {rhs!r}")

    if isinstance(c, FinCategory):
        for (g, f) in c.comp:
            if c.source(g) != c.target(f):
                report.add("composition-domain", f"composite given for non-composable {g!r}, {f!r}")

    if sample is None:
        for f in mors:
            check_units(f)
            for g in by_source[c.target(f)]:
                composite(g, f)
                for h in by_source[c.target(g)]:
                    check_triple(f, g, h)
    elif mors:
        rng = random.Random(seed)
        for f in rng.sample(mors, min(sample, len(mors))):
            check_units(f)
        for _ in range(sample):
            f = rng.choice(mors)
            if not (gs := by_source[c.target(f)]):
                continue
            g = rng.choice(gs)
            if not (hs := by_source[c.target(g)]):
                continue
            check_triple(f, g, rng.choice(hs))

    return report


@dataclass(eq=True, frozen=True)
class MorphismClass:
    mono: bool
    epi: bool
    iso: bool


def classify_morphism(c: FinCategory, m: Hashable) -> MorphismClass:
    if m not in c.src:
        raise UnknownMorphism(f"unknown morphism {m!r}")
    a, b = c.source(m), c.target(m)

    def cancels(pairs: Iterable[tuple[Hashable, Hashable]], side: str) -> bool:
        for g, h in pairs:
            mg = c.compose(m, g) if side == "left" else c.compose(g, m)
            mh = c.compose(m, h) if side == "left" else c.compose(h, m)
            if mg == mh and g != h:
                return False
        return True

    mono = all(cancels(itertools.product(hom(c, x, a), repeat=2), "left") for x in c.objs)
    epi = all(cancels(itertools.product(hom(c, b, y), repeat=2), "right") for y in c.objs)
    iso = any(c.compose(m, n) == c.identity(b) and c.compose(n, m) == c.identity(a)
              for n in hom(c, b, a))
    return MorphismClass(mono, epi, iso)


# --- functors and natural transformations ---

@dataclass(eq=True, frozen=True)
class FinFunctor:
    source: Category
    target: Category
    on_objects: Mapping[Any, Any] = field(hash=False)
    on_morphisms: Mapping[Any, Any] = field(hash=False)

    def obj(self: Self, o: Any) -> Any:
        return self.on_objects[o]

    def mor(self: Self, m: Any) -> Any:
        return self.on_morphisms[m]


def check_functor(F: FinFunctor) -> LawReport:
    report = LawReport()
    C, D = F.source, F.target
    for o in C.objects():
        if o not in F.on_objects:
            report.add("functor-total", f"object {o!r} unmapped")
    for m in C.morphisms():
        if m not in F.on_morphisms:
            report.add("functor-total", f"morphism {m!r} unmapped")
    if not report.lawful:
        return report

    for m in C.morphisms():
        report.checked += 1
        fm = F.mor(m)
        if D.source(fm) != F.obj(C.source(m)) or D.target(fm) != F.obj(C.target(m)):
            report.add("functor-typing", f"{m!r} maps to {fm!r}")
    for o in C.objects():
        if F.mor(C.identity(o)) != D.identity(F.obj(o)):
            report.add("functor-identity", f"identity of {o!r} not preserved")

    by_source: dict[Any, list[Any]] = defaultdict(list)
    for m in C.morphisms():
        by_source[C.source(m)].append(m)
    for f in C.morphisms():
        for g in by_source[C.target(f)]:
            if C.is_boundary(g, f) or D.is_boundary(F.mor(g), F.mor(f)):
                continue
            if F.mor(C.compose(g, f)) != D.compose(F.mor(g), F.mor(f)):
                report.add("functor-composition", f"{g!r} after {f!r} not preserved")
    return report


def compose_functors(G: FinFunctor, F: FinFunctor) -> FinFunctor:
    """G after F."""
    return FinFunctor(F.source, G.target,
                      {o: G.obj(F.obj(o)) for o in F.source.objects()},
                      {m: G.mor(F.mor(m)) for m in F.source.morphisms()})


def identity_functor(c: Category) -> FinFunctor:
    return FinFunctor(c, c, {o: o for o in c.objects()}, {m: m for m in c.morphisms()})


@dataclass(eq=True, frozen=True)
class FinNatTrans:
    source_functor: FinFunctor
    target_functor: FinFunctor
    components: Mapping[Any, Any] = field(hash=False)


def check_naturality(n: FinNatTrans) -> bool:
    F, G = n.source_functor, n.target_functor
    if F.source is not G.source and F.source != G.source:
        raise IllFormed("functors have different source categories")
    if F.target is not G.target and F.target != G.target:
        raise IllFormed("functors have different target categories")
    C, D = F.source, F.target

    for o in C.objects():
        if o not in n.components:
            raise ComponentMissing(f"no component at {o!r}")
        eta = n.components[o]
        if D.source(eta) != F.obj(o) or D.target(eta) != G.obj(o):
            logger.debug(f"component at {o!r} has the wrong type")
            return False

    for m in C.morphisms():
        a, b = C.source(m), C.target(m)
        if D.compose(G.mor(m), n.components[a]) != D.compose(n.components[b], F.mor(m)):
            logger.debug(f"naturality square for {m!r} does not commute")
            return False
    return True


def identity_transformation(F: FinFunctor) -> FinNatTrans:
    return FinNatTrans(F, F, {o: F.target.identity(F.obj(o)) for o in F.source.objects()})


# --- finite sets ---

@dataclass(eq=True, frozen=True)
class FinSetObj:
    elements: frozenset[Hashable] = frozenset()

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "elements", frozenset(self.elements))

    @classmethod
    def of(cls, *elements: Hashable) -> Self:
        return cls(frozenset(elements))

    def __iter__(self: Self) -> Iterator[Hashable]:
        return iter(ordered(self.elements))

    def __len__(self: Self) -> int:
        return len(self.elements)

    def __contains__(self: Self, x: Hashable) -> bool:
        return x in self.elements

    def __repr__(self: Self) -> str:
        return "{" + ", ".join(map(repr, self)) + "}"


@dataclass(eq=True, frozen=True)
class FinSetMap:
    source: FinSetObj
    target: FinSetObj
    pairs: frozenset[tuple[Hashable, Hashable]]
    _table: dict[Hashable, Hashable] = field(init=False, compare=False, hash=False, repr=False)

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        table = dict(self.pairs)
        if len(table) != len(self.pairs) or set(table) != self.source.elements:
            raise IllFormed("map is not total and single-valued on its source")
        if any(y not in self.target for y in table.values()):
            raise IllFormed("map leaves its target")
        object.__setattr__(self, "_table", table)

    @classmethod
    def of(cls, source: FinSetObj, target: FinSetObj, mapping: Mapping[Hashable, Hashable]) -> Self:
        return cls(source, target, frozenset(mapping.items()))

    def __call__(self: Self, x: Hashable) -> Hashable:
        return self._table[x]

    @property
    def table(self: Self) -> dict[Hashable, Hashable]:
        return dict(self._table)

    def __repr__(self: Self) -> str:
        return "{" + ", ".join(f"{x!r}->{self(x)!r}" for x in self.source) + "}"


def identity_map(s: FinSetObj) -> FinSetMap:
    return FinSetMap.of(s, s, {x: x for x in s.elements})


def compose_maps(g: FinSetMap, f: FinSetMap) -> FinSetMap:
    """g after f."""
    if f.target != g.source:
        raise IllFormed("maps are not composable")
    return FinSetMap.of(f.source, g.target, {x: g(f(x)) for x in f.source.elements})


def all_finset_maps(a: FinSetObj, b: FinSetObj) -> Iterator[FinSetMap]:
    for m in all_maps(list(a), list(b)):
        yield FinSetMap.of(a, b, m)


def _category_from_maps(objs: Iterable[FinSetObj], maps: Iterable[FinSetMap]) -> FinCategory:
    objs = tuple(dict.fromkeys(objs))
    mors = tuple(dict.fromkeys(maps))
    comp = {(g, f): compose_maps(g, f) for f in mors for g in mors if f.target == g.source}
    return FinCategory(objs, mors,
                       {m: m.source for m in mors}, {m: m.target for m in mors},
                       comp, {o: identity_map(o) for o in objs})


def finset_category(sets: Iterable[FinSetObj]) -> FinCategory:
    """The full subcategory of FinSet on `sets`: every map between them."""
    sets = list(dict.fromkeys(sets))
    return _category_from_maps(sets, (m for a in sets for b in sets for m in all_finset_maps(a, b)))


def category_of_maps(maps: Iterable[FinSetMap]) -> FinCategory:
    """The closure of `maps` and their identities under composition."""
    found = set(maps)
    objs = {m.source for m in found} | {m.target for m in found}
    found |= {identity_map(o) for o in objs}
    frontier = set(found)
    while frontier:
        new = {compose_maps(g, f) for f in found for g in found if f.target == g.source} - found
        found |= new
        frontier = new
    return _category_from_maps(ordered(objs), ordered(found))


# --- diagrams, limits and colimits ---

@dataclass(eq=True, frozen=True)
class Diagram:
    shape: FinGraph
    objects: Mapping[Hashable, FinSetObj] = field(hash=False)
    maps: Mapping[Hashable, FinSetMap] = field(hash=False)

    def __post_init__(self: Self) -> None:
        for n in self.shape.nodes:
            if n not in self.objects:
                raise IllFormed(f"node {n!r} has no set")
        for e in self.shape.edges:
            m = self.maps.get(e)
            if m is None:
                raise IllFormed(f"edge {e!r} has no map")
            if m.source != self.objects[self.shape.src[e]] or m.target != self.objects[self.shape.tgt[e]]:
                raise IllFormed(f"map on edge {e!r} does not match its endpoints")


class ConeKind(StrEnum):
    LIMIT = "limit"
    COLIMIT = "colimit"


@dataclass(eq=True, frozen=True)
class Cone:
    """A cone (limit) or cocone (colimit): an apex with one leg per node."""
    apex: FinSetObj
    legs: Mapping[Hashable, FinSetMap] = field(hash=False)


def compatible_families(d: Diagram) -> list[tuple[Hashable, ...]]:
    """Node-indexed families (in node order) agreeing along every edge."""
    nodes = d.shape.nodes
    index = {n: i for i, n in enumerate(nodes)}
    families = []
    for family in itertools.product(*(list(d.objects[n]) for n in nodes)):
        if all(d.maps[e](family[index[d.shape.src[e]]]) == family[index[d.shape.tgt[e]]]
               for e in d.shape.edges):
            families.append(family)
    return families


def limit(d: Diagram) -> Cone:
    nodes = d.shape.nodes
    apex = FinSetObj(frozenset(compatible_families(d)))
    legs = {n: FinSetMap.of(apex, d.objects[n], {fam: fam[i] for fam in apex.elements})
            for i, n in enumerate(nodes)}
    return Cone(apex, legs)


def _classes(d: Diagram) -> UnionFind[tuple[Hashable, Hashable]]:
    index = {n: i for i, n in enumerate(d.shape.nodes)}
    uf: UnionFind[tuple[Hashable, Hashable]] = UnionFind(
        key=lambda p: (index[p[0]], sort_key(p[1])))
    for n in d.shape.nodes:
        for x in d.objects[n].elements:
            uf.make_set((n, x))
    for e in d.shape.edges:
        s, t = d.shape.src[e], d.shape.tgt[e]
        for x in d.objects[s].elements:
            uf.union((s, x), (t, d.maps[e](x)))
    return uf


def colimit(d: Diagram) -> Cone:
    """Quotient of the disjoint union; each class is named by its least (node, element)."""
    uf = _classes(d)
    apex = FinSetObj(frozenset(uf.classes()))
    legs = {n: FinSetMap.of(d.objects[n], apex, {x: uf.find((n, x)) for x in d.objects[n].elements})
            for n in d.shape.nodes}
    return Cone(apex, legs)


def _commutes(d: Diagram, cone: Cone, kind: ConeKind) -> bool:
    for e in d.shape.edges:
        s, t, m = d.shape.src[e], d.shape.tgt[e], d.maps[e]
        if kind is ConeKind.LIMIT:
            if any(m(cone.legs[s](a)) != cone.legs[t](a) for a in cone.apex.elements):
                return False
        elif any(cone.legs[t](m(x)) != cone.legs[s](x) for x in d.objects[s].elements):
            return False
    return True


def _legs_typed(d: Diagram, cone: Cone, kind: ConeKind) -> bool:
    for n in d.shape.nodes:
        leg = cone.legs.get(n)
        if leg is None:
            logger.debug(f"no leg for node {n!r}")
            return False
        ends = (cone.apex, d.objects[n]) if kind is ConeKind.LIMIT else (d.objects[n], cone.apex)
        if (leg.source, leg.target) != ends:
            raise NotACone(f"leg at {n!r} has the wrong endpoints")
    return True


def verify_universal_property(d: Diagram, apex: FinSetObj, legs: Mapping[Hashable, FinSetMap],
                              kind: ConeKind|str, bound: int = 4, exhaustive: bool = False) -> bool:
    """True iff every (co)cone with an apex of at most `bound` elements has exactly
    one mediating map into (out of) `apex`.

    Mediator counts factor over apex elements, so by default they are computed
    per family (class) rather than per map; `exhaustive` enumerates every
    (co)cone and every candidate map instead.
    """
    kind = ConeKind(kind)
    cone = Cone(apex, legs)
    if not _legs_typed(d, cone, kind):
        return False
    if not _commutes(d, cone, kind):
        raise NotACone(f"legs do not commute with the diagram ({kind})")

    if exhaustive:
        return _verify_brute(d, cone, kind, bound)
    if kind is ConeKind.LIMIT:
        return _verify_limit(d, cone, bound)
    return _verify_colimit(d, cone, bound)


def _family_of(d: Diagram, cone: Cone, a: Hashable) -> tuple[Hashable, ...]:
    return tuple(cone.legs[n](a) for n in d.shape.nodes)


def _verify_limit(d: Diagram, cone: Cone, bound: int) -> bool:
    # a cone from X is a map X -> families; mediators count prod |preimage(c(x))|
    preimages: dict[tuple[Hashable, ...], int] = {f: 0 for f in compatible_families(d)}
    for a in cone.apex.elements:
        preimages[_family_of(d, cone, a)] += 1
    if bound >= 1 and any(count != 1 for count in preimages.values()):
        logger.debug(f"mediator counts per family: {sorted(preimages.values())}")
        return False
    return True


def _verify_colimit(d: Diagram, cone: Cone, bound: int) -> bool:
    # a cocone into Y is a map classes -> Y; a mediator is fixed on apex elements hit
    # by one class, free (n choices) on unhit ones, and impossible when two classes
    # hit the same element and the cocone separates them
    classes = _classes(d).classes()
    hit: dict[Hashable, set[Hashable]] = {a: set() for a in cone.apex.elements}
    for rep, members in classes.items():
        n, x = members[0]
        hit[cone.legs[n](x)].add(rep)

    for n in range(0, bound + 1):
        if n == 0 and classes:
            continue    # no cocone into the empty set
        for classes_hitting in hit.values():
            if not classes_hitting and n != 1:
                return False
            if len(classes_hitting) > 1 and n >= 2:
                return False
    return True


def _verify_brute(d: Diagram, cone: Cone, kind: ConeKind, bound: int) -> bool:
    apex = list(cone.apex)
    for n in range(bound + 1):
        test = list(range(n))
        if kind is ConeKind.LIMIT:
            families = compatible_families(d)
            for assign in all_maps(test, families):
                count = sum(all(_family_of(d, cone, u[x]) == assign[x] for x in test)
                            for u in all_maps(test, apex))
                if count != 1:
                    return False
        else:
            classes = _classes(d)
            reps = list(classes.classes())
            for assign in all_maps(reps, test):
                count = 0
                for u in all_maps(apex, test):
                    count += all(u[cone.legs[node](x)] == assign[classes.find((node, x))]
                                 for node in d.shape.nodes for x in d.objects[node].elements)
                if count != 1:
                    return False
    return True


# --- convenience diagrams ---

def product_diagram(a: FinSetObj, b: FinSetObj) -> Diagram:
    return Diagram(FinGraph.of(("a", "b")), {"a": a, "b": b}, {})


def pullback_diagram(f: FinSetMap, g: FinSetMap) -> Diagram:
    if f.target != g.target:
        raise IllFormed("pullback maps need a common target")
    shape = FinGraph.of(("a", "b", "c"), {"f": ("a", "c"), "g": ("b", "c")})
    return Diagram(shape, {"a": f.source, "b": g.source, "c": f.target}, {"f": f, "g": g})


def equalizer_diagram(f: FinSetMap, g: FinSetMap) -> Diagram:
    if (f.source, f.target) != (g.source, g.target):
        raise IllFormed("equalizer maps must be parallel")
    shape = FinGraph.of(("a", "b"), {"f": ("a", "b"), "g": ("a", "b")})
    return Diagram(shape, {"a": f.source, "b": f.target}, {"f": f, "g": g})


def coequalizer_diagram(f: FinSetMap, g: FinSetMap) -> Diagram:
    return equalizer_diagram(f, g)


def pushout_diagram(f: FinSetMap, g: FinSetMap) -> Diagram:
    """The span b <-f- a -g-> c."""
    if f.source != g.source:
        raise IllFormed("pushout maps need a common source")
    shape = FinGraph.of(("a", "b", "c"), {"f": ("a", "b"), "g": ("a", "c")})
    return Diagram(shape, {"a": f.source, "b": f.target, "c": g.target}, {"f": f, "g": g})


# --- exponents ---

def product(a: FinSetObj, b: FinSetObj) -> tuple[FinSetObj, FinSetMap, FinSetMap]:
    p = FinSetObj(frozenset(itertools.product(a.elements, b.elements)))
    return (p, FinSetMap.of(p, a, {xy: xy[0] for xy in p.elements}),
            FinSetMap.of(p, b, {xy: xy[1] for xy in p.elements}))


def _as_element(m: Mapping[Hashable, Hashable], a: FinSetObj) -> tuple[tuple[Hashable, Hashable], ...]:
    return tuple((x, m[x]) for x in a)


def exponent(a: FinSetObj, b: FinSetObj) -> tuple[FinSetObj, FinSetMap]:
    """All maps a -> b (each an ordered tuple of pairs) and evaluation exp×a -> b."""
    exp = FinSetObj(frozenset(_as_element(m, a) for m in all_maps(list(a), list(b))))
    prod, _, _ = product(exp, a)
    ev = FinSetMap.of(prod, b, {(fn, x): dict(fn)[x] for fn, x in prod.elements})
    return exp, ev


def curry(h: FinSetMap, c: FinSetObj, a: FinSetObj, b: FinSetObj) -> FinSetMap:
    exp, _ = exponent(a, b)
    return FinSetMap.of(c, exp, {z: _as_element({x: h((z, x)) for x in a.elements}, a)
                                 for z in c.elements})


def uncurry(k: FinSetMap, a: FinSetObj, b: FinSetObj) -> FinSetMap:
    prod, _, _ = product(k.source, a)
    return FinSetMap.of(prod, b, {(z, x): dict(k(z))[x] for z, x in prod.elements})


def verify_currying(c: FinSetObj, a: FinSetObj, b: FinSetObj) -> bool:
    """Currying is a bijection hom(c×a, b) -> hom(c, b^a)."""
    prod, _, _ = product(c, a)
    exp, _ = exponent(a, b)
    curried = set()
    for h in all_finset_maps(prod, b):
        k = curry(h, c, a, b)
        if uncurry(k, a, b) != h:
            return False
        curried.add(k)
    return len(curried) == len(exp) ** len(c)
