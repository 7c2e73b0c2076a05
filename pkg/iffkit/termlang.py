"""Term languages with indicia arities, terms, term tuples and substitution,
Lawvere fragments, and the FOL language pullback.

Direction convention: a Lawvere morphism I -> J is a J-indexed tuple of terms
whose variables lie in I. Composing s: I -> J with r: J -> K substitutes the
entries of s into the entries of r.
"""
import itertools
import logging
import random
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import TypeAlias
import sys

if sys.version_info >= (3, 11):
    from typing import Self
else:  # pragma: no cover
    from typing_extensions import Self

from iffkit.cat_engine import (
    FinCategory,
    FinFunctor,
    FinNatTrans,
    FinSetMap,
    FinSetObj,
    category_of_maps,
)
from iffkit.iffkit_types import IffError, LawReport
from iffkit.iffkit_utils import powerset
from iffkit.sexpr import (
    MalformedForm, Node, SAtom, SList, atom_text, atoms, expect_list, read, section,
)

logger = logging.getLogger("iffkit")

Indicia: TypeAlias = frozenset[str]


class TermError(IffError):
    pass


class IndexMismatch(TermError):
    pass


class NotABijection(TermError):
    pass


class VariableMismatch(TermError):
    pass


class ArityViolation(TermError):
    pass


@dataclass(eq=True, frozen=True)
class _ArityTable:
    variables: frozenset[str]
    arities: frozenset[tuple[str, Indicia]]
    id: str = field(default="", compare=False, hash=False)

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "variables", frozenset(self.variables))
        object.__setattr__(self, "arities", frozenset((f, frozenset(a)) for f, a in self.arities))
        if len(self.arity) != len(self.arities):
            raise ArityViolation(f"{self.id}: a symbol has two arities")
        for f, a in self.arities:
            if not a <= self.variables:
                raise ArityViolation(f"{self.id}: arity of '{f}' is not a set of variables")
            if f in self.variables:
                raise ArityViolation(f"{self.id}: '{f}' is both a symbol and a variable")

    @classmethod
    def of(cls, variables: Iterable[str], arity: Mapping[str, Iterable[str]], id: str = "") -> Self:
        return cls(frozenset(variables), frozenset((f, frozenset(a)) for f, a in arity.items()), id)

    @cached_property
    def arity(self: Self) -> dict[str, Indicia]:
        return dict(self.arities)

    @property
    def symbols(self: Self) -> frozenset[str]:
        return frozenset(self.arity)


class TermLanguage(_ArityTable):
    """Variables V, function symbols F and their indicia arities F -> P(V)."""


class ExpressionLanguage(_ArityTable):
    """Variables and relation symbols with indicia arities."""

    @property
    def relation_symbols(self: Self) -> frozenset[str]:
        return self.symbols


# --- terms ---

@dataclass(eq=True, frozen=True)
class Var:
    name: str

    def __str__(self: Self) -> str:
        return self.name


@dataclass(eq=True, frozen=True)
class App:
    """f applied to a tuple indexed by arity(f); args are sorted by index."""
    symbol: str
    args: tuple[tuple[str, "Term"], ...] = ()

    @classmethod
    def of(cls, symbol: str, args: Mapping[str, "Term"]|None = None) -> Self:
        return cls(symbol, tuple(sorted((args or {}).items())))

    @property
    def index(self: Self) -> Indicia:
        return frozenset(j for j, _ in self.args)

    def __str__(self: Self) -> str:
        return print_term(self)


Term: TypeAlias = Var|App


def term_arity(t: Term) -> Indicia:
    """The variables occurring in `t`."""
    match t:
        case Var(name):
            return frozenset({name})
        case App(_, args):
            return frozenset().union(*(term_arity(a) for _, a in args))
    raise TypeError(f"not a term: {t!r}")


def depth(t: Term) -> int:
    match t:
        case Var():
            return 0
        case App(_, args):
            return 1 + max((depth(a) for _, a in args), default=0)
    raise TypeError(f"not a term: {t!r}")


def check_term(lang: TermLanguage, t: Term) -> None:
    match t:
        case Var(name):
            if name not in lang.variables:
                raise ArityViolation(f"'{name}' is not a variable of {lang.id or 'the language'}")
        case App(f, args):
            if f not in lang.arity:
                raise ArityViolation(f"'{f}' is not a symbol of {lang.id or 'the language'}")
            if t.index != lang.arity[f]:
                raise ArityViolation(f"'{f}' applied to {sorted(t.index)}, arity is {sorted(lang.arity[f])}")
            for _, a in args:
                check_term(lang, a)


def print_term(t: Term) -> str:
    """Positional form: arguments in sorted index order; nullary symbols bare."""
    match t:
        case Var(name):
            return name
        case App(f, ()):
            return f
        case App(f, args):
            return f"({f} {' '.join(print_term(a) for _, a in args)})"
    raise TypeError(f"not a term: {t!r}")


@dataclass(eq=True, frozen=True)
class TermTuple:
    """A morphism domain -> index: one term over `domain` per index variable."""
    domain: Indicia
    entries: tuple[tuple[str, Term], ...]

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "domain", frozenset(self.domain))
        for j, t in self.entries:
            if not term_arity(t) <= self.domain:
                raise IndexMismatch(f"entry {j}={print_term(t)} leaves the domain {sorted(self.domain)}")

    @classmethod
    def of(cls, domain: Iterable[str], entries: Mapping[str, Term]) -> Self:
        return cls(frozenset(domain), tuple(sorted(entries.items())))

    @cached_property
    def table(self: Self) -> dict[str, Term]:
        return dict(self.entries)

    @property
    def index(self: Self) -> Indicia:
        return frozenset(self.table)

    def __getitem__(self: Self, j: str) -> Term:
        return self.table[j]

    def __str__(self: Self) -> str:
        body = " ".join(f"{j}:={print_term(t)}" for j, t in self.entries)
        return f"<{','.join(sorted(self.domain))}|{body}>"


def identity_tuple(indicia: Iterable[str]) -> TermTuple:
    i = frozenset(indicia)
    return TermTuple.of(i, {v: Var(v) for v in i})


def projection_tuple(domain: Iterable[str], index: Iterable[str]) -> TermTuple:
    """The variable projection domain -> index, for index within domain."""
    d, j = frozenset(domain), frozenset(index)
    if not j <= d:
        raise IndexMismatch(f"cannot project {sorted(d)} onto {sorted(j)}")
    return TermTuple.of(d, {v: Var(v) for v in j})


def singleton_tuple(j: str, t: Term, domain: Iterable[str]|None = None) -> TermTuple:
    return TermTuple.of(term_arity(t) if domain is None else domain, {j: t})


def substitute(t: Term, s: TermTuple) -> Term:
    if not term_arity(t) <= s.index:
        raise IndexMismatch(f"{print_term(t)} uses {sorted(term_arity(t) - s.index)} not indexed by the tuple")
    return _subst(t, s.table)


def _subst(t: Term, table: Mapping[str, Term]) -> Term:
    match t:
        case Var(name):
            return table[name]
        case App(f, args):
            return App(f, tuple((j, _subst(a, table)) for j, a in args))
    raise TypeError(f"not a term: {t!r}")


Substitution: TypeAlias = Callable[[Term, TermTuple], Term]


def tuple_compose(s: TermTuple, r: TermTuple, subst: Substitution = substitute) -> TermTuple:
    """s: I -> J then r: J -> K, giving I -> K."""
    if r.domain != s.index:
        raise IndexMismatch(f"cannot compose: {sorted(s.index)} != {sorted(r.domain)}")
    return TermTuple.of(s.domain, {k: subst(t, s) for k, t in r.entries})


def tuple_depth(s: TermTuple) -> int:
    return max((depth(t) for _, t in s.entries), default=0)


# --- enumeration ---

def terms(lang: TermLanguage, over: Iterable[str], max_depth: int) -> list[Term]:
    """Every term with variables in `over` and depth at most `max_depth`,
    by depth and then symbol order."""
    over = sorted(over)
    levels: list[list[Term]] = [[Var(v) for v in over]]
    found: list[Term] = list(levels[0])
    for d in range(1, max_depth + 1):
        shallower = found
        new: list[Term] = []
        for f in sorted(lang.symbols):
            index = sorted(lang.arity[f])
            for args in itertools.product(shallower, repeat=len(index)):
                t = App(f, tuple(zip(index, args)))
                if depth(t) == d:
                    new.append(t)
        found = found + new
    return found


def tuples(lang: TermLanguage, domain: Iterable[str], index: Iterable[str], max_depth: int) -> Iterator[TermTuple]:
    domain, index = frozenset(domain), sorted(index)
    candidates = terms(lang, domain, max_depth)
    for entries in itertools.product(candidates, repeat=len(index)):
        yield TermTuple(domain, tuple(zip(index, entries)))


class LawvereFragment:
    """law(L) restricted to term tuples of depth at most `depth`.

    Morphisms are enumerated on demand. A composable pair whose composite is
    deeper than `depth` is a boundary pair and has no materialized composite.
    """

    def __init__(self, lang: TermLanguage, depth: int) -> None:
        if depth < 0:
            raise ValueError("depth must be non-negative")
        self.lang = lang
        self.depth = depth
        self._terms: dict[Indicia, list[Term]] = {}

    def objects(self) -> list[Indicia]:
        return list(powerset(sorted(self.lang.variables)))

    def terms_over(self, indicia: Indicia) -> list[Term]:
        if indicia not in self._terms:
            self._terms[indicia] = terms(self.lang, indicia, self.depth)
        return self._terms[indicia]

    def hom(self, a: Indicia, b: Indicia) -> Iterator[TermTuple]:
        index = sorted(b)
        for entries in itertools.product(self.terms_over(a), repeat=len(index)):
            yield TermTuple(a, tuple(zip(index, entries)))

    def hom_size(self, a: Indicia, b: Indicia) -> int:
        return len(self.terms_over(a)) ** len(b)

    def morphisms(self) -> Iterator[TermTuple]:
        for a in self.objects():
            for b in self.objects():
                yield from self.hom(a, b)

    def source(self, m: TermTuple) -> Indicia:
        return m.domain

    def target(self, m: TermTuple) -> Indicia:
        return m.index

    def identity(self, o: Indicia) -> TermTuple:
        return identity_tuple(o)

    def compose(self, g: TermTuple, f: TermTuple) -> TermTuple:
        """g after f."""
        return tuple_compose(f, g)

    def is_boundary(self, g: TermTuple, f: TermTuple) -> bool:
        return tuple_depth(tuple_compose(f, g)) > self.depth

    def boundary_pairs(self) -> Iterator[tuple[TermTuple, TermTuple]]:
        for f in self.morphisms():
            for b in self.objects():
                for g in self.hom(f.index, b):
                    if self.is_boundary(g, f):
                        yield g, f

    def contains(self, m: TermTuple) -> bool:
        return tuple_depth(m) <= self.depth and all(
            term_arity(t) <= m.domain for _, t in m.entries)

    def materialize(self) -> FinCategory:
        """An explicit table; boundary pairs are left out of the composition."""
        mors = tuple(self.morphisms())
        comp = {}
        for f in mors:
            for g in mors:
                if g.domain == f.index and not self.is_boundary(g, f):
                    comp[(g, f)] = self.compose(g, f)
        objs = tuple(self.objects())
        return _PartialCategory(objs, mors, {m: m.domain for m in mors}, {m: m.index for m in mors},
                                comp, {o: identity_tuple(o) for o in objs})


class _PartialCategory(FinCategory):
    def is_boundary(self, g: object, f: object) -> bool:
        return (g, f) not in self.comp


def lawvere_fragment(lang: TermLanguage, depth: int) -> LawvereFragment:
    return LawvereFragment(lang, depth)


# --- language morphisms ---

@dataclass(eq=True, frozen=True)
class TermLanguageMorphism:
    source: TermLanguage
    target: TermLanguage
    var_map: tuple[tuple[str, str], ...]
    sym_map: tuple[tuple[str, str], ...]

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "var_map", tuple(sorted(dict(self.var_map).items())))
        object.__setattr__(self, "sym_map", tuple(sorted(dict(self.sym_map).items())))
        vm, sm = self.vars, self.syms
        if set(vm) != self.source.variables or set(vm.values()) != self.target.variables \
                or len(set(vm.values())) != len(vm):
            raise NotABijection("variable map is not a bijection between the variable sets")
        if set(sm) != self.source.symbols or not set(sm.values()) <= self.target.symbols:
            raise ArityViolation("symbol map is not a function between the symbol sets")
        for f, g in sm.items():
            if frozenset(vm[v] for v in self.source.arity[f]) != self.target.arity[g]:
                raise ArityViolation(f"'{f}' -> '{g}' does not preserve arity")

    @classmethod
    def of(cls, source: TermLanguage, target: TermLanguage,
           var_map: Mapping[str, str], sym_map: Mapping[str, str]) -> Self:
        return cls(source, target, tuple(var_map.items()), tuple(sym_map.items()))

    @cached_property
    def vars(self: Self) -> dict[str, str]:
        return dict(self.var_map)

    @cached_property
    def syms(self: Self) -> dict[str, str]:
        return dict(self.sym_map)


def identity_morphism(lang: TermLanguage) -> TermLanguageMorphism:
    return TermLanguageMorphism.of(lang, lang, {v: v for v in lang.variables},
                                   {f: f for f in lang.symbols})


def compose_morphisms(n: TermLanguageMorphism, m: TermLanguageMorphism) -> TermLanguageMorphism:
    """n after m."""
    if m.target != n.source:
        raise VariableMismatch("language morphisms are not composable")
    return TermLanguageMorphism.of(m.source, n.target,
                                   {v: n.vars[w] for v, w in m.vars.items()},
                                   {f: n.syms[g] for f, g in m.syms.items()})


def apply_morphism(m: TermLanguageMorphism, t: Term|TermTuple) -> Term|TermTuple:
    """Renames variables and symbols; tuples are reindexed along the variable map."""
    if isinstance(t, TermTuple):
        return TermTuple.of((m.vars[v] for v in t.domain),
                            {m.vars[j]: _rename(m, e) for j, e in t.entries})
    return _rename(m, t)


def _rename(m: TermLanguageMorphism, t: Term) -> Term:
    match t:
        case Var(name):
            return Var(m.vars[name])
        case App(f, args):
            return App.of(m.syms[f], {m.vars[j]: _rename(m, a) for j, a in args})
    raise TypeError(f"not a term: {t!r}")


def map_fragment(m: TermLanguageMorphism, fragment: LawvereFragment) -> FinFunctor:
    """law(m) on a materialized fragment, into the same-depth fragment of the target."""
    source = fragment.materialize()
    target = LawvereFragment(m.target, fragment.depth).materialize()
    return FinFunctor(
        source, target,
        {o: frozenset(m.vars[v] for v in o) for o in source.objs},
        {s: apply_morphism(m, s) for s in source.mors},
    )


# --- coproducts ---

def coproduct_languages(l1: TermLanguage, l2: TermLanguage
                        ) -> tuple[TermLanguage, TermLanguageMorphism, TermLanguageMorphism]:
    """Symbols tagged `inl.f` / `inr.g` over the shared variables."""
    if l1.variables != l2.variables:
        raise VariableMismatch("coproduct languages must share their variables")
    arity = {f"inl.{f}": a for f, a in l1.arity.items()} | {f"inr.{g}": a for g, a in l2.arity.items()}
    coproduct = TermLanguage.of(l1.variables, arity, f"{l1.id}+{l2.id}")
    same = {v: v for v in l1.variables}
    inl = TermLanguageMorphism.of(l1, coproduct, same, {f: f"inl.{f}" for f in l1.symbols})
    inr = TermLanguageMorphism.of(l2, coproduct, same, {g: f"inr.{g}" for g in l2.symbols})
    return coproduct, inl, inr


def copair(coproduct: TermLanguage, m1: TermLanguageMorphism, m2: TermLanguageMorphism) -> TermLanguageMorphism:
    """The mediator out of a coproduct built by `coproduct_languages`."""
    if m1.vars != m2.vars or m1.target != m2.target:
        raise VariableMismatch("copaired morphisms must agree on variables and target")
    syms = {f"inl.{f}": g for f, g in m1.syms.items()} | {f"inr.{f}": g for f, g in m2.syms.items()}
    return TermLanguageMorphism.of(coproduct, m1.target, m1.vars, syms)


# --- the monad laws ---

def check_term_monad_laws(lang: TermLanguage, depth: int, subst: Substitution = substitute,
                          sample: int|None = None, seed: int = 0) -> LawReport:
    """Unit and associativity laws of substitution over terms of bounded depth.

    Exhaustive unless `sample` is given, in which case that many random
    associativity triples are drawn.
    """
    report = LawReport()
    V = lang.variables
    all_terms = terms(lang, V, depth)

    for t in all_terms:
        report.checked += 1
        if (u := subst(t, identity_tuple(V))) != t:
            report.add("left-unit", f"{print_term(t)} becomes {print_term(u)}")
    for v in sorted(V):
        for t in all_terms:
            report.checked += 1
            if (u := subst(Var(v), singleton_tuple(v, t, V))) != t:
                report.add("right-unit", f"{v} := {print_term(t)} gives {print_term(u)}")

    def associative(t: Term, s: TermTuple, r: TermTuple) -> None:
        report.checked += 1
        lhs = subst(subst(t, s), r)
        rhs = subst(t, tuple_compose(r, s, subst))
        if lhs != rhs:
            report.add("associativity", f"{print_term(t)} with {s} then {r}: "
                                        f"{print_term(lhs)} != {print_term(rhs)}")

    # s: V -> V and r: V -> V, both depth-bounded
    if sample is None:
        all_tuples = list(tuples(lang, V, V, depth))
        for t in all_terms:
            for s in all_tuples:
                for r in all_tuples:
                    associative(t, s, r)
    elif all_terms:
        rng = random.Random(seed)
        index = sorted(V)
        for _ in range(sample):
            s = TermTuple(V, tuple((j, rng.choice(all_terms)) for j in index))
            r = TermTuple(V, tuple((j, rng.choice(all_terms)) for j in index))
            associative(rng.choice(all_terms), s, r)
    return report


# --- expression and FOL languages ---

@dataclass(eq=True, frozen=True)
class FOLLanguage:
    variables: frozenset[str]
    term_part: TermLanguage
    expr_part: ExpressionLanguage
    # canonical variable -> the expression language's original variable
    expr_renaming: tuple[tuple[str, str], ...] = ()

    def __post_init__(self: Self) -> None:
        if not (self.term_part.variables == self.expr_part.variables == self.variables):
            raise VariableMismatch("term and expression parts must share the variables")
        if self.term_part.symbols & self.expr_part.symbols:
            raise ArityViolation("function and relation symbols overlap")

    @property
    def expr_projection(self: Self) -> dict[str, str]:
        return dict(self.expr_renaming) or {v: v for v in self.variables}


def pullback_fol(e: ExpressionLanguage, t: TermLanguage, var_bijection: Mapping[str, str]) -> FOLLanguage:
    """Identifies the expression variables with the term variables along `var_bijection`."""
    if set(var_bijection) != e.variables or set(var_bijection.values()) != t.variables \
            or len(set(var_bijection.values())) != len(var_bijection):
        raise NotABijection("variable map is not a bijection")
    renamed = ExpressionLanguage.of(
        t.variables, {r: {var_bijection[v] for v in a} for r, a in e.arity.items()}, e.id)
    return FOLLanguage(t.variables, t, renamed,
                       tuple(sorted((w, v) for v, w in var_bijection.items())))


@dataclass(eq=True, frozen=True)
class Equation:
    over: Indicia
    lhs: Term
    rhs: Term

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "over", frozenset(self.over))
        if not (term_arity(self.lhs) | term_arity(self.rhs)) <= self.over:
            raise ArityViolation(f"equation {print_term(self.lhs)} = {print_term(self.rhs)} "
                                 f"uses variables outside {sorted(self.over)}")

    def __str__(self: Self) -> str:
        return f"(equation (over {' '.join(sorted(self.over))}) {print_term(self.lhs)} {print_term(self.rhs)})"


@dataclass(eq=True, frozen=True)
class EquationalPresentation:
    language: TermLanguage
    equations: tuple[Equation, ...] = ()

    def __post_init__(self: Self) -> None:
        for eq in self.equations:
            check_term(self.language, eq.lhs)
            check_term(self.language, eq.rhs)


# --- the category of term languages and the arity transformation ---

def term_language_category(languages: Iterable[TermLanguage],
                           morphisms: Iterable[TermLanguageMorphism]) -> FinCategory:
    """Languages with the given morphisms closed under composition."""
    langs = list(dict.fromkeys(languages))
    found = set(morphisms) | {identity_morphism(lang) for lang in langs}
    frontier = set(found)
    while frontier:
        new = {compose_morphisms(n, m) for m in found for n in found if m.target == n.source} - found
        found |= new
        frontier = new
    mors = tuple(sorted(found, key=lambda m: (m.source.id, m.target.id, m.var_map, m.sym_map)))
    comp = {(n, m): compose_morphisms(n, m) for m in mors for n in mors if m.target == n.source}
    return FinCategory(tuple(langs), mors, {m: m.source for m in mors}, {m: m.target for m in mors},
                       comp, {lang: identity_morphism(lang) for lang in langs})


def _symbols_set(lang: TermLanguage) -> FinSetObj:
    return FinSetObj(lang.symbols)


def _indicia_set(lang: TermLanguage) -> FinSetObj:
    return FinSetObj(frozenset(powerset(lang.variables)))


def arity_transformation(languages: FinCategory) -> FinNatTrans:
    """The arity natural transformation ftn => P∘var over a category of term
    languages, with FinSet as target."""
    ftn_maps = {m: FinSetMap.of(_symbols_set(m.source), _symbols_set(m.target), m.syms)
                for m in languages.mors}
    indicia_maps = {m: FinSetMap.of(_indicia_set(m.source), _indicia_set(m.target),
                                    {i: frozenset(m.vars[v] for v in i) for i in powerset(m.source.variables)})
                    for m in languages.mors}
    components = {lang: FinSetMap.of(_symbols_set(lang), _indicia_set(lang), lang.arity)
                  for lang in languages.objs}
    finset = category_of_maps([*ftn_maps.values(), *indicia_maps.values(), *components.values()])
    ftn = FinFunctor(languages, finset, {lang: _symbols_set(lang) for lang in languages.objs}, ftn_maps)
    indicia = FinFunctor(languages, finset, {lang: _indicia_set(lang) for lang in languages.objs},
                         indicia_maps)
    return FinNatTrans(ftn, indicia, components)


# --- language files ---

def term_from_node(lang: TermLanguage, node: Node) -> Term:
    """Positional syntax: `(f a b)` fills arity(f) in sorted order; a bare atom is
    a variable when it is one, otherwise a nullary symbol."""
    if isinstance(node, SAtom):
        if node.text in lang.variables:
            return Var(node.text)
        if lang.arity.get(node.text) == frozenset():
            return App(node.text)
        raise MalformedForm(f"'{node.text}' is neither a variable nor a constant", node.span)

    form = expect_list(node)
    f = atom_text(form.items[0])
    if f not in lang.arity:
        raise MalformedForm(f"unknown symbol '{f}'", form.span)
    index = sorted(lang.arity[f])
    if len(form.items) - 1 != len(index):
        raise MalformedForm(f"'{f}' takes {len(index)} argument(s)", form.span)
    return App(f, tuple(zip(index, (term_from_node(lang, n) for n in form.items[1:]))))


def _language(form: SList) -> EquationalPresentation:
    lang_id = atom_text(form.items[1])
    vars_node = section(form, "vars", start=2)
    variables = atoms(vars_node) if vars_node is not None else []
    arity: dict[str, list[str]] = {}
    for item in form.items[2:]:
        sub = expect_list(item)
        if sub.head == "symbol":
            expect_list(sub, "symbol", 2)
            arity_node = section(sub, "arity", start=2)
            arity[atom_text(sub.items[1])] = atoms(arity_node) if arity_node is not None else []
    try:
        lang = TermLanguage.of(variables, arity, lang_id)
    except TermError as e:
        raise MalformedForm(str(e), form.span) from e

    equations = []
    for item in form.items[2:]:
        sub = expect_list(item)
        if sub.head == "equation":
            expect_list(sub, "equation", 4)
            over, lhs, rhs = sub.items[1:4]
            try:
                equations.append(Equation(frozenset(atoms(expect_list(over, "over", 1))),
                                          term_from_node(lang, lhs), term_from_node(lang, rhs)))
            except TermError as e:
                raise MalformedForm(str(e), sub.span) from e
        elif sub.head not in ("vars", "symbol"):
            raise MalformedForm(f"unexpected ({sub.head} ...) in a term language", sub.span)
    return EquationalPresentation(lang, tuple(equations))


def load_languages(text: str, file: str = "<string>") -> dict[str, EquationalPresentation]:
    result = {}
    for node in read(text, file):
        form = expect_list(node, "term-language", 2)
        pres = _language(form)
        result[pres.language.id] = pres
    return result


def load_languages_file(path: str|Path) -> dict[str, EquationalPresentation]:
    path = Path(path)
    return load_languages(path.read_text(encoding="utf-8"), str(path))


def dump_language(pres: EquationalPresentation) -> str:
    lang = pres.language
    parts = [f"(term-language {lang.id}", f"  (vars {' '.join(sorted(lang.variables))})"]
    for f in sorted(lang.symbols):
        parts.append(f"  (symbol {f} ({' '.join(['arity', *sorted(lang.arity[f])])}))")
    parts.extend(f"  {eq}" for eq in pres.equations)
    return "\n".join(parts) + ")\n"
