"""Institutions: signatures and their morphisms, sentences, models, reducts and
satisfaction, with theories, entailment and closure on top.

Three instances are provided: PROP (propositional, exact), EQN (equational
logic over term languages) and TinyFOL (universally closed atoms and equations).
Model enumeration is bounded, so EQN and TinyFOL entailment holds only up to
the model bound.
"""
import itertools
import logging
from abc import ABC, abstractmethod
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cache, cached_property
from pathlib import Path
from typing import Any, ClassVar, TypeAlias
import sys

if sys.version_info >= (3, 11):
    from typing import Self
else:  # pragma: no cover
    from typing_extensions import Self

from iffkit.ifca import ConceptLattice, concepts, truth_classification
from iffkit.iffkit_types import IffError, LawReport
from iffkit.iffkit_utils import all_bijections, powerset
from iffkit.metalang import (
    And,
    Atom,
    Iff,
    Implies,
    MetaSentence,
    Not,
    Or,
    QualifiedName,
    print_canonical,
    sentence_from_sexpr,
)
from iffkit.sexpr import (
    MalformedForm, Node, SList, atom_text, atoms, expect_list, read, section,
)
from iffkit.termlang import (
    App,
    Equation,
    ExpressionLanguage,
    FOLLanguage,
    Term,
    TermError,
    TermLanguage,
    TermLanguageMorphism,
    Var,
    apply_morphism,
    compose_morphisms,
    depth as term_depth,
    identity_morphism,
    print_term,
    term_from_node,
    terms,
)

logger = logging.getLogger("iffkit")


class InstitutionError(IffError):
    pass


class TooLarge(InstitutionError):
    pass


class InvalidMorphism(InstitutionError):
    pass


class BadSentence(InstitutionError):
    pass


class Institution(ABC):
    """The institution contract; enumerators are bounded so every check is finite."""
    name: ClassVar[str]
    exact: ClassVar[bool] = False      # whether bounded entailment is exact

    @abstractmethod
    def identity(self, sig: Any) -> Any: ...

    @abstractmethod
    def compose(self, tau: Any, sigma: Any) -> Any:
        """tau after sigma."""

    @abstractmethod
    def morphism_ends(self, sigma: Any) -> tuple[Any, Any]: ...

    @abstractmethod
    def morphisms(self, source: Any, target: Any) -> Iterator[Any]: ...

    @abstractmethod
    def sentences(self, sig: Any, depth: int) -> Iterator[Any]: ...

    @abstractmethod
    def translate(self, sigma: Any, sentence: Any) -> Any: ...

    @abstractmethod
    def models(self, sig: Any, bound: int) -> Iterator[Any]: ...

    @abstractmethod
    def reduct(self, sigma: Any, model: Any) -> Any: ...

    @abstractmethod
    def satisfies(self, sig: Any, model: Any, sentence: Any) -> bool: ...

    @abstractmethod
    def test_signatures(self, bound: int, like: Any) -> Iterator[Any]:
        """Signatures of size at most `bound` usable as cocone vertices next to `like`."""

    @abstractmethod
    def symbols(self, sig: Any) -> list[str]: ...

    # --- theory file support ---

    @abstractmethod
    def load_signature(self, node: SList) -> Any: ...

    @abstractmethod
    def dump_signature(self, sig: Any) -> str: ...

    @abstractmethod
    def load_sentence(self, sig: Any, node: Node) -> Any: ...

    @abstractmethod
    def sentence_text(self, sentence: Any) -> str: ...

    @abstractmethod
    def sentence_depth(self, sentence: Any) -> int:
        """Nesting depth, measured the way `sentences` bounds it."""

    def __repr__(self) -> str:
        return self.name


# --- PROP ---

PropSignature: TypeAlias = frozenset[str]
PropModel: TypeAlias = frozenset[str]

TRUE = And(())
FALSE = Or(())


@dataclass(eq=True, frozen=True)
class SignatureMap:
    """A function between finite symbol sets."""
    source: frozenset[str]
    target: frozenset[str]
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "pairs", tuple(sorted(dict(self.pairs).items())))
        if set(self.table) != self.source or not set(self.table.values()) <= self.target:
            raise InvalidMorphism(f"not a map {sorted(self.source)} -> {sorted(self.target)}")

    @classmethod
    def of(cls, source: Iterable[str], target: Iterable[str], mapping: Mapping[str, str]) -> Self:
        return cls(frozenset(source), frozenset(target), tuple(mapping.items()))

    @cached_property
    def table(self: Self) -> dict[str, str]:
        return dict(self.pairs)

    def __call__(self: Self, p: str) -> str:
        return self.table[p]


def prop_atom(p: str) -> Atom:
    return Atom(QualifiedName.parse(p))


@cache
def _prop_sentences(sig: PropSignature, depth: int) -> tuple[MetaSentence, ...]:
    if depth == 0:
        return (*(prop_atom(p) for p in sorted(sig)), TRUE, FALSE)
    below = _prop_sentences(sig, depth - 1)
    new: list[MetaSentence] = [Not(s) for s in below if prop_depth(s) == depth - 1]
    for a, b in itertools.product(below, repeat=2):
        if max(prop_depth(a), prop_depth(b)) == depth - 1:
            new.extend((And((a, b)), Or((a, b)), Implies(a, b), Iff(a, b)))
    return below + tuple(new)


def prop_depth(s: MetaSentence) -> int:
    match s:
        case Atom():
            return 0
        case And(()) | Or(()):
            return 0
        case Not(body):
            return 1 + prop_depth(body)
        case And(parts) | Or(parts):
            return 1 + max(prop_depth(p) for p in parts)
        case Implies(a, b) | Iff(a, b):
            return 1 + max(prop_depth(a), prop_depth(b))
    raise BadSentence(f"not a propositional sentence: {print_canonical(s)}")


def prop_atoms(s: MetaSentence) -> frozenset[str]:
    match s:
        case Atom(pred, ()):
            return frozenset({str(pred)})
        case Not(body):
            return prop_atoms(body)
        case And(parts) | Or(parts):
            return frozenset().union(*map(prop_atoms, parts))
        case Implies(a, b) | Iff(a, b):
            return prop_atoms(a) | prop_atoms(b)
    raise BadSentence(f"not a propositional sentence: {print_canonical(s)}")


def _holds(model: PropModel, s: MetaSentence) -> bool:
    match s:
        case Atom(pred, ()):
            return str(pred) in model
        case Not(body):
            return not _holds(model, body)
        case And(parts):
            return all(_holds(model, p) for p in parts)
        case Or(parts):
            return any(_holds(model, p) for p in parts)
        case Implies(a, b):
            return not _holds(model, a) or _holds(model, b)
        case Iff(a, b):
            return _holds(model, a) == _holds(model, b)
    raise BadSentence(f"not a propositional sentence: {print_canonical(s)}")


def _rename_atoms(s: MetaSentence, rename: Callable[[str], str]) -> MetaSentence:
    match s:
        case Atom(pred, ()):
            return prop_atom(rename(str(pred)))
        case Not(body):
            return Not(_rename_atoms(body, rename))
        case And(parts):
            return And(tuple(_rename_atoms(p, rename) for p in parts))
        case Or(parts):
            return Or(tuple(_rename_atoms(p, rename) for p in parts))
        case Implies(a, b):
            return Implies(_rename_atoms(a, rename), _rename_atoms(b, rename))
        case Iff(a, b):
            return Iff(_rename_atoms(a, rename), _rename_atoms(b, rename))
    raise BadSentence(f"not a propositional sentence: {print_canonical(s)}")


class Prop(Institution):
    """Atom sets, functions between them, and truth-table semantics.

    Sentences are metashell sentences built from atoms with not, and, or,
    implies and iff; `(and)` and `(or)` are the constants true and false.
    Models are the sets of true atoms; the model bound does not apply.
    """
    name = "prop"
    exact = True

    def identity(self, sig: PropSignature) -> SignatureMap:
        return SignatureMap.of(sig, sig, {p: p for p in sig})

    def compose(self, tau: SignatureMap, sigma: SignatureMap) -> SignatureMap:
        if sigma.target != tau.source:
            raise InvalidMorphism("signature maps are not composable")
        return SignatureMap.of(sigma.source, tau.target, {p: tau(sigma(p)) for p in sigma.source})

    def morphism_ends(self, sigma: SignatureMap) -> tuple[PropSignature, PropSignature]:
        return sigma.source, sigma.target

    def morphisms(self, source: PropSignature, target: PropSignature) -> Iterator[SignatureMap]:
        src = sorted(source)
        for images in itertools.product(sorted(target), repeat=len(src)):
            yield SignatureMap(frozenset(source), frozenset(target), tuple(zip(src, images)))

    def sentences(self, sig: PropSignature, depth: int) -> Iterator[MetaSentence]:
        yield from _prop_sentences(frozenset(sig), depth)

    def translate(self, sigma: SignatureMap, sentence: MetaSentence) -> MetaSentence:
        return _rename_atoms(sentence, sigma)

    def models(self, sig: PropSignature, bound: int = 0) -> Iterator[PropModel]:
        yield from powerset(sorted(sig))

    def reduct(self, sigma: SignatureMap, model: PropModel) -> PropModel:
        return frozenset(p for p in sigma.source if sigma(p) in model)

    def satisfies(self, sig: PropSignature, model: PropModel, sentence: MetaSentence) -> bool:
        return _holds(model, sentence)

    def test_signatures(self, bound: int, like: Any = None) -> Iterator[PropSignature]:
        for n in range(bound + 1):
            yield frozenset(f"s{i}" for i in range(n))

    def symbols(self, sig: PropSignature) -> list[str]:
        return sorted(sig)

    def load_signature(self, node: SList) -> PropSignature:
        sig = frozenset(atoms(node))
        for p in sig:
            QualifiedName.parse(p, node.span)
        return sig

    def dump_signature(self, sig: PropSignature) -> str:
        return " ".join(["(signature", *sorted(sig)]) + ")"

    def load_sentence(self, sig: PropSignature, node: Node) -> MetaSentence:
        s = sentence_from_sexpr(node)
        try:
            used = prop_atoms(s)
        except BadSentence as e:
            raise MalformedForm(str(e), node.span) from e
        if not used <= sig:
            raise MalformedForm(f"atoms {sorted(used - sig)} are not in the signature", node.span)
        return s

    def sentence_text(self, sentence: MetaSentence) -> str:
        return print_canonical(sentence)

    def sentence_depth(self, sentence: MetaSentence) -> int:
        return prop_depth(sentence)


# --- EQN ---

Key: TypeAlias = tuple[tuple[str, int], ...]


@dataclass(eq=True, frozen=True)
class Algebra:
    """Carrier 0..size-1 with one table per symbol, keyed by sorted (index, value) pairs."""
    size: int
    tables: tuple[tuple[str, tuple[tuple[Key, int], ...]], ...]

    @cached_property
    def ops(self: Self) -> dict[str, dict[Key, int]]:
        return {f: dict(t) for f, t in self.tables}

    def op(self: Self, f: str, args: Mapping[str, int]) -> int:
        return self.ops[f][tuple(sorted(args.items()))]

    def __str__(self: Self) -> str:
        return f"A{self.size}" + "".join(
            f"[{f}:{','.join(str(v) for _, v in t)}]" for f, t in self.tables)


@dataclass(eq=True, frozen=True)
class Structure(Algebra):
    """An algebra plus, per relation symbol, the argument keys where it holds."""
    relations: tuple[tuple[str, frozenset[Key]], ...] = ()

    @cached_property
    def rels(self: Self) -> dict[str, frozenset[Key]]:
        return dict(self.relations)

    def holds(self: Self, r: str, args: Mapping[str, int]) -> bool:
        return tuple(sorted(args.items())) in self.rels[r]


def _keys(index: Iterable[str], size: int) -> list[Key]:
    index = sorted(index)
    return [tuple(zip(index, values)) for values in itertools.product(range(size), repeat=len(index))]


def _tables(arity: Mapping[str, frozenset[str]], size: int) -> Iterator[tuple[tuple[str, tuple[tuple[Key, int], ...]], ...]]:
    symbols = sorted(arity)
    keys = {f: _keys(arity[f], size) for f in symbols}
    per_symbol = [
        [tuple(zip(keys[f], values)) for values in itertools.product(range(size), repeat=len(keys[f]))]
        for f in symbols
    ]
    for choice in itertools.product(*per_symbol):
        yield tuple(zip(symbols, choice))


def evaluate(algebra: Algebra, t: Term, env: Mapping[str, int]) -> int:
    match t:
        case Var(name):
            return env[name]
        case App(f, args):
            return algebra.op(f, {j: evaluate(algebra, a, env) for j, a in args})
    raise TypeError(f"not a term: {t!r}")


def _environments(variables: Iterable[str], size: int) -> Iterator[dict[str, int]]:
    vs = sorted(variables)
    for values in itertools.product(range(size), repeat=len(vs)):
        yield dict(zip(vs, values))


def _reindex(key: Key, var_map: Mapping[str, str]) -> Key:
    return tuple(sorted((var_map[j], v) for j, v in key))


def _reduct_tables(sigma: TermLanguageMorphism, algebra: Algebra) -> tuple[tuple[str, tuple[tuple[Key, int], ...]], ...]:
    tables = []
    for f in sorted(sigma.source.symbols):
        keys = _keys(sigma.source.arity[f], algebra.size)
        g = sigma.syms[f]
        tables.append((f, tuple((k, algebra.ops[g][_reindex(k, sigma.vars)]) for k in keys)))
    return tuple(tables)


def _arity_preserving(src: Mapping[str, frozenset[str]], tgt: Mapping[str, frozenset[str]],
                      var_map: Mapping[str, str]) -> Iterator[dict[str, str]]:
    symbols = sorted(src)
    options = [[g for g in sorted(tgt) if tgt[g] == frozenset(var_map[v] for v in src[f])]
               for f in symbols]
    for images in itertools.product(*options):
        yield dict(zip(symbols, images))


def _language_node(head: str, lang: TermLanguage|ExpressionLanguage) -> list[str]:
    return [f"({' '.join([head, f, '(' + ' '.join(['arity', *sorted(lang.arity[f])]) + ')'])})"
            for f in sorted(lang.symbols)]


def _language_from(node: SList, kinds: tuple[str, ...]) -> tuple[list[str], dict[str, dict[str, list[str]]]]:
    vars_node = section(node, "vars")
    variables = atoms(vars_node) if vars_node is not None else []
    found: dict[str, dict[str, list[str]]] = {k: {} for k in kinds}
    for item in node.items[1:]:
        sub = expect_list(item)
        if sub.head == "vars":
            continue
        if sub.head not in kinds:
            raise MalformedForm(f"unexpected ({sub.head} ...) in a signature", sub.span)
        expect_list(sub, sub.head, 2)
        arity_node = section(sub, "arity", 2)
        found[sub.head][atom_text(sub.items[1])] = atoms(arity_node) if arity_node is not None else []
    return variables, found


class Eqn(Institution):
    """Term languages, their morphisms, equations and finite algebras."""
    name = "eqn"

    def identity(self, sig: TermLanguage) -> TermLanguageMorphism:
        return identity_morphism(sig)

    def compose(self, tau: TermLanguageMorphism, sigma: TermLanguageMorphism) -> TermLanguageMorphism:
        return compose_morphisms(tau, sigma)

    def morphism_ends(self, sigma: TermLanguageMorphism) -> tuple[TermLanguage, TermLanguage]:
        return sigma.source, sigma.target

    def morphisms(self, source: TermLanguage, target: TermLanguage) -> Iterator[TermLanguageMorphism]:
        for var_map in all_bijections(sorted(source.variables), sorted(target.variables)):
            for sym_map in _arity_preserving(source.arity, target.arity, var_map):
                yield TermLanguageMorphism.of(source, target, var_map, sym_map)

    def sentences(self, sig: TermLanguage, depth: int) -> Iterator[Equation]:
        ts = terms(sig, sig.variables, depth)
        for lhs, rhs in itertools.product(ts, repeat=2):
            yield Equation(sig.variables, lhs, rhs)

    def translate(self, sigma: TermLanguageMorphism, sentence: Equation) -> Equation:
        lhs, rhs = apply_morphism(sigma, sentence.lhs), apply_morphism(sigma, sentence.rhs)
        assert isinstance(lhs, (Var, App)) and isinstance(rhs, (Var, App))
        return Equation(frozenset(sigma.vars[v] for v in sentence.over), lhs, rhs)

    def models(self, sig: TermLanguage, bound: int) -> Iterator[Algebra]:
        for size in range(1, bound + 1):
            for tables in _tables(sig.arity, size):
                yield Algebra(size, tables)

    def reduct(self, sigma: TermLanguageMorphism, model: Algebra) -> Algebra:
        return Algebra(model.size, _reduct_tables(sigma, model))

    def satisfies(self, sig: TermLanguage, model: Algebra, sentence: Equation) -> bool:
        return all(evaluate(model, sentence.lhs, env) == evaluate(model, sentence.rhs, env)
                   for env in _environments(sentence.over, model.size))

    def test_signatures(self, bound: int, like: TermLanguage) -> Iterator[TermLanguage]:
        variables = sorted(like.variables)
        indicia = list(powerset(variables))
        for n in range(bound + 1):
            for arities in itertools.product(indicia, repeat=n):
                yield TermLanguage.of(variables, {f"s{i}": a for i, a in enumerate(arities)}, f"test{n}")

    def symbols(self, sig: TermLanguage) -> list[str]:
        return sorted(sig.symbols)

    def load_signature(self, node: SList) -> TermLanguage:
        variables, found = _language_from(node, ("symbol",))
        try:
            return TermLanguage.of(variables, found["symbol"])
        except TermError as e:
            raise MalformedForm(str(e), node.span) from e

    def dump_signature(self, sig: TermLanguage) -> str:
        return " ".join(["(signature", f"(vars{''.join(' ' + v for v in sorted(sig.variables))})",
                         *_language_node("symbol", sig)]) + ")"

    def load_sentence(self, sig: TermLanguage, node: Node) -> Equation:
        form = expect_list(node, "=", 3)
        if len(form.items) != 3:
            raise MalformedForm("an equation has two sides", form.span)
        lhs, rhs = (term_from_node(sig, n) for n in form.items[1:])
        return Equation(sig.variables, lhs, rhs)

    def sentence_text(self, sentence: Equation) -> str:
        return f"(= {print_term(sentence.lhs)} {print_term(sentence.rhs)})"

    def sentence_depth(self, sentence: Equation) -> int:
        return max(term_depth(sentence.lhs), term_depth(sentence.rhs))


# --- TinyFOL ---

@dataclass(eq=True, frozen=True)
class FolAtom:
    relation: str
    args: tuple[tuple[str, Term], ...] = ()


@dataclass(eq=True, frozen=True)
class FolEquation:
    lhs: Term
    rhs: Term


FolSentence: TypeAlias = FolAtom|FolEquation


@dataclass(eq=True, frozen=True)
class FolMorphism:
    source: FOLLanguage
    target: FOLLanguage
    term: TermLanguageMorphism
    rel_map: tuple[tuple[str, str], ...]

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "rel_map", tuple(sorted(dict(self.rel_map).items())))
        if self.term.source != self.source.term_part or self.term.target != self.target.term_part:
            raise InvalidMorphism("term morphism does not join the term parts")
        src, tgt = self.source.expr_part, self.target.expr_part
        rels = self.rels
        if set(rels) != src.symbols or not set(rels.values()) <= tgt.symbols:
            raise InvalidMorphism("relation map is not a function between relation symbols")
        for r, s in rels.items():
            if frozenset(self.term.vars[v] for v in src.arity[r]) != tgt.arity[s]:
                raise InvalidMorphism(f"'{r}' -> '{s}' does not preserve arity")

    @cached_property
    def rels(self: Self) -> dict[str, str]:
        return dict(self.rel_map)


def _fol_language(variables: Iterable[str], functions: Mapping[str, Iterable[str]],
                  relations: Mapping[str, Iterable[str]], id: str = "") -> FOLLanguage:
    vs = frozenset(variables)
    return FOLLanguage(vs, TermLanguage.of(vs, functions, id), ExpressionLanguage.of(vs, relations, id))


class TinyFol(Institution):
    """Unsorted FOL restricted to universally closed atoms and equations."""
    name = "fol"

    def identity(self, sig: FOLLanguage) -> FolMorphism:
        return FolMorphism(sig, sig, identity_morphism(sig.term_part),
                           tuple((r, r) for r in sig.expr_part.symbols))

    def compose(self, tau: FolMorphism, sigma: FolMorphism) -> FolMorphism:
        if sigma.target != tau.source:
            raise InvalidMorphism("FOL morphisms are not composable")
        return FolMorphism(sigma.source, tau.target, compose_morphisms(tau.term, sigma.term),
                           tuple((r, tau.rels[s]) for r, s in sigma.rels.items()))

    def morphism_ends(self, sigma: FolMorphism) -> tuple[FOLLanguage, FOLLanguage]:
        return sigma.source, sigma.target

    def morphisms(self, source: FOLLanguage, target: FOLLanguage) -> Iterator[FolMorphism]:
        for var_map in all_bijections(sorted(source.variables), sorted(target.variables)):
            for fun_map in _arity_preserving(source.term_part.arity, target.term_part.arity, var_map):
                term = TermLanguageMorphism.of(source.term_part, target.term_part, var_map, fun_map)
                for rel_map in _arity_preserving(source.expr_part.arity, target.expr_part.arity, var_map):
                    yield FolMorphism(source, target, term, tuple(rel_map.items()))

    def sentences(self, sig: FOLLanguage, depth: int) -> Iterator[FolSentence]:
        ts = terms(sig.term_part, sig.variables, depth)
        for lhs, rhs in itertools.product(ts, repeat=2):
            yield FolEquation(lhs, rhs)
        for r in sorted(sig.expr_part.symbols):
            index = sorted(sig.expr_part.arity[r])
            for args in itertools.product(ts, repeat=len(index)):
                yield FolAtom(r, tuple(zip(index, args)))

    def translate(self, sigma: FolMorphism, sentence: FolSentence) -> FolSentence:
        def rename(t: Term) -> Term:
            u = apply_morphism(sigma.term, t)
            assert isinstance(u, (Var, App))
            return u
        match sentence:
            case FolEquation(lhs, rhs):
                return FolEquation(rename(lhs), rename(rhs))
            case FolAtom(r, args):
                return FolAtom(sigma.rels[r], tuple(sorted((sigma.term.vars[j], rename(a)) for j, a in args)))
        raise BadSentence(f"not a TinyFOL sentence: {sentence!r}")

    def sentence_depth(self, sentence: FolSentence) -> int:
        match sentence:
            case FolEquation(lhs, rhs):
                return max(term_depth(lhs), term_depth(rhs))
            case FolAtom(_, args):
                return max((term_depth(a) for _, a in args), default=0)
        raise BadSentence(f"not a TinyFOL sentence: {sentence!r}")

    def models(self, sig: FOLLanguage, bound: int) -> Iterator[Structure]:
        rels = sorted(sig.expr_part.symbols)
        for size in range(1, bound + 1):
            extents = [list(powerset(_keys(sig.expr_part.arity[r], size))) for r in rels]
            for tables in _tables(sig.term_part.arity, size):
                for choice in itertools.product(*extents):
                    yield Structure(size, tables, tuple(zip(rels, choice)))

    def reduct(self, sigma: FolMorphism, model: Structure) -> Structure:
        relations = []
        for r in sorted(sigma.source.expr_part.symbols):
            s = sigma.rels[r]
            keys = _keys(sigma.source.expr_part.arity[r], model.size)
            relations.append((r, frozenset(k for k in keys if _reindex(k, sigma.term.vars) in model.rels[s])))
        return Structure(model.size, _reduct_tables(sigma.term, model), tuple(relations))

    def satisfies(self, sig: FOLLanguage, model: Structure, sentence: FolSentence) -> bool:
        for env in _environments(sig.variables, model.size):
            match sentence:
                case FolEquation(lhs, rhs):
                    if evaluate(model, lhs, env) != evaluate(model, rhs, env):
                        return False
                case FolAtom(r, args):
                    if not model.holds(r, {j: evaluate(model, a, env) for j, a in args}):
                        return False
        return True

    def test_signatures(self, bound: int, like: FOLLanguage) -> Iterator[FOLLanguage]:
        variables = sorted(like.variables)
        indicia = list(powerset(variables))
        for n in range(bound + 1):
            for k in range(n + 1):
                for arities in itertools.product(indicia, repeat=n):
                    yield _fol_language(variables,
                                        {f"f{i}": a for i, a in enumerate(arities[:k])},
                                        {f"r{i}": a for i, a in enumerate(arities[k:])}, f"test{n}")

    def symbols(self, sig: FOLLanguage) -> list[str]:
        return sorted(sig.term_part.symbols | sig.expr_part.symbols)

    def load_signature(self, node: SList) -> FOLLanguage:
        variables, found = _language_from(node, ("function", "relation"))
        try:
            return _fol_language(variables, found["function"], found["relation"])
        except TermError as e:
            raise MalformedForm(str(e), node.span) from e

    def dump_signature(self, sig: FOLLanguage) -> str:
        return " ".join(["(signature", f"(vars{''.join(' ' + v for v in sorted(sig.variables))})",
                         *_language_node("function", sig.term_part),
                         *_language_node("relation", sig.expr_part)]) + ")"

    def load_sentence(self, sig: FOLLanguage, node: Node) -> FolSentence:
        form = expect_list(node)
        if form.head == "=" and len(form.items) == 3:
            lhs, rhs = (term_from_node(sig.term_part, n) for n in form.items[1:])
            return FolEquation(lhs, rhs)
        r = atom_text(form.items[0])
        if r not in sig.expr_part.arity:
            raise MalformedForm(f"unknown relation '{r}'", form.span)
        index = sorted(sig.expr_part.arity[r])
        if len(form.items) - 1 != len(index):
            raise MalformedForm(f"'{r}' takes {len(index)} argument(s)", form.span)
        return FolAtom(r, tuple(zip(index, (term_from_node(sig.term_part, n) for n in form.items[1:]))))

    def sentence_text(self, sentence: FolSentence) -> str:
        match sentence:
            case FolEquation(lhs, rhs):
                return f"(= {print_term(lhs)} {print_term(rhs)})"
            case FolAtom(r, ()):
                return f"({r})"
            case FolAtom(r, args):
                return f"({r} {' '.join(print_term(a) for _, a in args)})"
        raise BadSentence(f"not a TinyFOL sentence: {sentence!r}")


PROP = Prop()
EQN = Eqn()
TINYFOL = TinyFol()
INSTITUTIONS: dict[str, Institution] = {i.name: i for i in (PROP, EQN, TINYFOL)}


def institution(name: str) -> Institution:
    if name not in INSTITUTIONS:
        raise InstitutionError(f"unknown institution '{name}'; expected one of {sorted(INSTITUTIONS)}")
    return INSTITUTIONS[name]


# --- satisfaction and functoriality checks ---

def _limited(items: Iterable[Any], limit: int|None) -> Iterable[Any]:
    return items if limit is None else itertools.islice(items, limit)


def check_satisfaction_condition(inst: Institution, sigma: Any, depth: int, size_bound: int,
                                 sentence_limit: int|None = None) -> LawReport:
    """reduct(sigma)(M') |= e iff M' |= translate(sigma)(e), over enumerated M' and e."""
    report = LawReport()
    source, target = inst.morphism_ends(sigma)
    sens = list(_limited(inst.sentences(source, depth), sentence_limit))
    translated = [inst.translate(sigma, e) for e in sens]
    for m in inst.models(target, size_bound):
        reduced = inst.reduct(sigma, m)
        for e, te in zip(sens, translated):
            report.checked += 1
            if inst.satisfies(source, reduced, e) != inst.satisfies(target, m, te):
                report.add("satisfaction-condition", f"model {m} and sentence {inst.sentence_text(e)}")
    return report


def check_translation_functoriality(inst: Institution, sigma: Any, tau: Any, depth: int,
                                    sentence_limit: int|None = None) -> LawReport:
    """translate(id) = id and translate(tau∘sigma) = translate(tau)∘translate(sigma)."""
    report = LawReport()
    source, _ = inst.morphism_ends(sigma)
    ident = inst.identity(source)
    both = inst.compose(tau, sigma)
    for e in _limited(inst.sentences(source, depth), sentence_limit):
        report.checked += 1
        if inst.translate(ident, e) != e:
            report.add("translation-identity", inst.sentence_text(e))
        if inst.translate(both, e) != inst.translate(tau, inst.translate(sigma, e)):
            report.add("translation-composition", inst.sentence_text(e))
    return report


def check_reduct_functoriality(inst: Institution, sigma: Any, tau: Any, size_bound: int) -> LawReport:
    """Reducts along identities are identities and reduct(tau∘sigma) = reduct(sigma)∘reduct(tau)."""
    report = LawReport()
    _, middle = inst.morphism_ends(sigma)
    _, target = inst.morphism_ends(tau)
    both = inst.compose(tau, sigma)
    for m in inst.models(target, size_bound):
        report.checked += 1
        if inst.reduct(inst.identity(target), m) != m:
            report.add("reduct-identity", str(m))
        if inst.reduct(both, m) != inst.reduct(sigma, inst.reduct(tau, m)):
            report.add("reduct-composition", str(m))
    return report


# --- theories ---

@dataclass(eq=True, frozen=True)
class Theory:
    signature: Any
    axioms: frozenset[Any]
    id: str = field(default="", compare=False, hash=False)

    def __post_init__(self: Self) -> None:
        object.__setattr__(self, "axioms", frozenset(self.axioms))


@dataclass(eq=True, frozen=True)
class ClosedTheory:
    signature: Any
    sentences: frozenset[Any]


@dataclass(eq=True, frozen=True)
class TheoryMorphism:
    source: Theory
    target: Theory
    sig_morphism: Any


_approximate_warned: set[str] = set()


def theory_models(inst: Institution, theory: Theory, size_bound: int) -> list[Any]:
    if not inst.exact and inst.name not in _approximate_warned:
        _approximate_warned.add(inst.name)
        logger.warning(f"{inst.name}: entailment is checked on models of size <= {size_bound} only")
    return [m for m in inst.models(theory.signature, size_bound)
            if all(inst.satisfies(theory.signature, m, a) for a in theory.axioms)]


def entails(inst: Institution, theory: Theory, sentence: Any, size_bound: int) -> bool:
    return all(inst.satisfies(theory.signature, m, sentence)
               for m in theory_models(inst, theory, size_bound))


def is_consistent(inst: Institution, theory: Theory, size_bound: int) -> bool:
    return bool(theory_models(inst, theory, size_bound))


def closure(inst: Institution, theory: Theory, depth: int, size_bound: int) -> ClosedTheory:
    models = theory_models(inst, theory, size_bound)
    if not models:
        logger.warning(f"{theory.id or 'theory'} has no models; its closure is every sentence")
    sig = theory.signature
    return ClosedTheory(sig, frozenset(s for s in inst.sentences(sig, depth)
                                       if all(inst.satisfies(sig, m, s) for m in models)))


def check_theory_morphism(inst: Institution, tm: TheoryMorphism, depth: int|None, size_bound: int) -> bool:
    """Every translated source axiom lies in the target's closure at `depth`.

    A translated axiom deeper than `depth` is outside that closure; `None`
    leaves the depth unbounded. Membership is decided by entailment over the
    models within `size_bound`.
    """
    source, target = inst.morphism_ends(tm.sig_morphism)
    if source != tm.source.signature or target != tm.target.signature:
        raise InvalidMorphism("signature morphism does not join the theories' signatures")
    translated = [inst.translate(tm.sig_morphism, a) for a in tm.source.axioms]
    if depth is not None:
        for s in translated:
            if inst.sentence_depth(s) > depth:
                logger.debug(f"{inst.sentence_text(s)} is deeper than {depth}")
                return False
    models = theory_models(inst, tm.target, size_bound)
    return all(all(inst.satisfies(target, m, s) for m in models) for s in translated)


def identity_theory_morphism(inst: Institution, theory: Theory) -> TheoryMorphism:
    return TheoryMorphism(theory, theory, inst.identity(theory.signature))


# --- the lattice of theories (PROP) ---

class TheoryLattice:
    """Closed theories at one PROP signature, each named by its closed model set.

    Theories are ordered by inclusion; meet is intersection of theories, join the
    closure of their union.
    """

    def __init__(self, sig: PropSignature, depth: int) -> None:
        self.signature = sig
        self.depth = depth
        self.models = list(PROP.models(sig))
        self.sentences = list(PROP.sentences(sig, depth))
        self.masks = [sum(1 << i for i, m in enumerate(self.models) if _holds(m, s))
                      for s in self.sentences]
        distinct = set(self.masks)
        full = (1 << len(self.models)) - 1

        def close(mask: int) -> int:
            result = full
            for d in distinct:
                if d & mask == mask:
                    result &= d
            return result

        self._close = close
        self.elements = sorted({close(mask) for mask in range(full + 1)}, key=lambda m: (bin(m).count("1"), m))

    def __len__(self) -> int:
        return len(self.elements)

    def theory(self, element: int) -> ClosedTheory:
        return ClosedTheory(self.signature, frozenset(
            s for s, mask in zip(self.sentences, self.masks) if mask & element == element))

    def model_set(self, element: int) -> frozenset[PropModel]:
        return frozenset(m for i, m in enumerate(self.models) if element >> i & 1)

    def leq(self, a: int, b: int) -> bool:
        """Theory inclusion: fewer sentences means more models."""
        return a & b == b

    def meet(self, a: int, b: int) -> int:
        return self._close(a | b)

    def join(self, a: int, b: int) -> int:
        return a & b


def lattice_of_theories(inst: Institution, sig: Iterable[str], depth: int) -> TheoryLattice:
    if not isinstance(inst, Prop):
        raise InstitutionError("the lattice of theories is enumerated for PROP only")
    sig = frozenset(sig)
    if len(sig) > 3:
        raise TooLarge(f"{len(sig)} atoms; at most 3 are enumerable")
    return TheoryLattice(sig, depth)


def check_theory_lattice(lattice: TheoryLattice) -> LawReport:
    report = LawReport()
    els = lattice.elements
    for a, b in itertools.product(els, repeat=2):
        report.checked += 1
        m, j = lattice.meet(a, b), lattice.join(a, b)
        if m not in els or j not in els:
            report.add("closure", f"{a:b} {b:b}")
        if lattice.meet(a, j) != a or lattice.join(a, m) != a:
            report.add("absorption", f"{a:b} {b:b}")
        if m != lattice.meet(b, a) or j != lattice.join(b, a):
            report.add("commutativity", f"{a:b} {b:b}")
    for a, b, c in itertools.product(els, repeat=3):
        if lattice.meet(a, lattice.meet(b, c)) != lattice.meet(lattice.meet(a, b), c):
            report.add("meet-associativity", f"{a:b} {b:b} {c:b}")
        if lattice.join(a, lattice.join(b, c)) != lattice.join(lattice.join(a, b), c):
            report.add("join-associativity", f"{a:b} {b:b} {c:b}")
    return report


def truth_lattice(inst: Institution, sig: Any, depth: int, size_bound: int) -> ConceptLattice:
    """Concepts of the truth classification; extents are model sets, intents closed theories."""
    return concepts(truth_classification(inst, sig, size_bound, depth))


# --- institution morphisms ---

@dataclass(eq=True, frozen=True)
class InstitutionMorphism:
    """Signatures and sentences go forward, models come back."""
    source: Institution
    target: Institution
    signature_map: Callable[[Any], Any]
    sentence_map: Callable[[Any, Any], Any]
    model_map: Callable[[Any, Any], Any]


def check_institution_morphism(im: InstitutionMorphism, signatures: Iterable[Any], depth: int,
                               size_bound: int) -> LawReport:
    report = LawReport()
    for sig in signatures:
        image = im.signature_map(sig)
        sens = list(im.source.sentences(sig, depth))
        for m in im.target.models(image, size_bound):
            back = im.model_map(sig, m)
            for e in sens:
                report.checked += 1
                if im.source.satisfies(sig, back, e) != im.target.satisfies(image, m, im.sentence_map(sig, e)):
                    report.add("satisfaction-square", f"{m} and {im.source.sentence_text(e)}")
    return report


def _eqn_to_fol_signature(lang: TermLanguage) -> FOLLanguage:
    return FOLLanguage(lang.variables, lang, ExpressionLanguage.of(lang.variables, {}, lang.id))


EQN_TO_FOL = InstitutionMorphism(
    EQN, TINYFOL,
    _eqn_to_fol_signature,
    lambda lang, eq: FolEquation(eq.lhs, eq.rhs),
    lambda lang, structure: Algebra(structure.size, structure.tables),
)


# --- theory files ---

def load_theory(text: str, file: str = "<string>") -> tuple[Institution, Theory]:
    nodes = read(text, file)
    if len(nodes) != 1:
        raise MalformedForm(f"{file}: expected one (theory ...) form")
    form = expect_list(nodes[0], "theory", 2)
    inst_node = section(form, "institution", 2)
    inst = institution(atoms(inst_node)[0] if inst_node is not None and atoms(inst_node) else "prop")
    sig_node = section(form, "signature", 2)
    if sig_node is None:
        raise MalformedForm("theory needs a (signature ...)", form.span)
    sig = inst.load_signature(sig_node)
    axioms_node = section(form, "axioms", 2)
    axioms = [inst.load_sentence(sig, n) for n in (axioms_node.items[1:] if axioms_node else ())]
    return inst, Theory(sig, frozenset(axioms), atom_text(form.items[1]))


def load_theory_file(path: str|Path) -> tuple[Institution, Theory]:
    path = Path(path)
    return load_theory(path.read_text(encoding="utf-8"), str(path))


def dump_theory(inst: Institution, theory: Theory) -> str:
    axioms = sorted(inst.sentence_text(a) for a in theory.axioms)
    lines = [f"(theory {theory.id or 'anonymous'}",
             f"  (institution {inst.name})",
             f"  {inst.dump_signature(theory.signature)}",
             "  (axioms" + "".join(f"\n    {a}" for a in axioms) + "))"]
    return "\n".join(lines) + "\n"
