"""The metashell: a lisp-like first order language with restricted quantification.

Sentences are read with the shared s-expression reader (`iffkit.sexpr`) and
converted into an immutable AST. Heads drawn from `KEYWORDS` are connectives,
quantifiers or equality; any other head is an atom predicate.
"""
import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from pathlib import Path
from typing import TypeAlias
import sys

if sys.version_info >= (3, 11):
    from typing import Self
else:  # pragma: no cover
    from typing_extensions import Self

from iffkit.iffkit_types import SourceSpan
from iffkit.sexpr import (
    EmptyInput,
    MalformedForm,
    Node,
    ParseError,
    SAtom,
    SList,
    UnbalancedParen,
    read,
    read_file,
)

__all__ = [
    "KEYWORDS", "QualifiedName", "Variable", "Constant", "Application", "Tuple",
    "Atom", "Equal", "Not", "And", "Or", "Implies", "Iff", "Forall", "Exists", "Binding",
    "ParseError", "UnbalancedParen", "UnknownHead", "BadVariable", "BadIdentifier",
    "MalformedForm", "UnguardedBinding", "EmptyInput",
    "parse_sentence", "parse_text", "parse_file", "print_canonical", "free_variables",
    "validate", "lint_categorical_design", "constants",
]

KEYWORDS = frozenset({"and", "or", "implies", "iff", "not", "forall", "exists", "="})

_SEGMENT = re.compile(r"[a-z0-9-]+")
_SPECIAL_PREFIX = re.compile(r"[A-Z0-9-]*[A-Z][A-Z0-9-]*(?:\.[A-Z0-9-]+)*")
_VARIABLE = re.compile(r"\?[a-z0-9][a-z0-9-]*")


class UnknownHead(ParseError):
    pass


class BadVariable(ParseError):
    pass


class BadIdentifier(ParseError):
    pass


class UnguardedBinding(ParseError):
    pass


@dataclass(eq=True, frozen=True)
class QualifiedName:
    prefix_path: tuple[str, ...]
    local: str
    raw: str = field(default="", compare=False, hash=False)

    @property
    def prefix(self: Self) -> str:
        return ".".join(self.prefix_path)

    @property
    def special(self: Self) -> bool:
        """True for uppercase (backward compatible) prefixes such as `SET.LIM.PBK`."""
        return bool(self.prefix_path) and self.prefix.isupper()

    def __str__(self: Self) -> str:
        return f"{self.prefix}:{self.local}" if self.prefix_path else self.local

    @staticmethod
    def parse(text: str, span: SourceSpan|None = None) -> "QualifiedName":
        prefix, sep, local = text.rpartition(":")
        if not _SEGMENT.fullmatch(local):
            raise BadIdentifier(f"bad identifier '{text}'", span)
        if not sep:
            return QualifiedName((), local, text)
        if _SPECIAL_PREFIX.fullmatch(prefix):
            return QualifiedName(tuple(prefix.split(".")), local, text)
        segments = tuple(prefix.split("."))
        if not all(_SEGMENT.fullmatch(s) for s in segments):
            raise BadIdentifier(f"bad namespace prefix '{prefix}'", span)
        return QualifiedName(segments, local, text)

    @staticmethod
    def of(text: str) -> "QualifiedName":
        return QualifiedName.parse(text)


# --- terms ---

@dataclass(eq=True, frozen=True)
class Variable:
    name: str
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self: Self) -> None:
        if not _VARIABLE.fullmatch(self.name):
            raise BadVariable(f"bad variable '{self.name}'", self.span)


@dataclass(eq=True, frozen=True)
class Constant:
    name: QualifiedName
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)


@dataclass(eq=True, frozen=True)
class Application:
    head: QualifiedName
    args: tuple["MetaTerm", ...]
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self: Self) -> None:
        if not self.args:
            raise MalformedForm(f"application of '{self.head}' needs an argument", self.span)


@dataclass(eq=True, frozen=True)
class Tuple:
    items: tuple["MetaTerm", ...]
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)


MetaTerm: TypeAlias = Variable|Constant|Application|Tuple


# --- sentences ---

@dataclass(eq=True, frozen=True)
class Atom:
    pred: QualifiedName
    args: tuple[MetaTerm, ...] = ()
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self: Self) -> None:
        if not self.pred.prefix_path and self.pred.local in KEYWORDS:
            raise UnknownHead(f"'{self.pred}' is a keyword, not a predicate", self.span)


@dataclass(eq=True, frozen=True)
class Equal:
    lhs: MetaTerm
    rhs: MetaTerm
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)


@dataclass(eq=True, frozen=True)
class Not:
    body: "MetaSentence"
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)


@dataclass(eq=True, frozen=True)
class And:
    parts: tuple["MetaSentence", ...]
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)


@dataclass(eq=True, frozen=True)
class Or:
    parts: tuple["MetaSentence", ...]
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)


@dataclass(eq=True, frozen=True)
class Implies:
    lhs: "MetaSentence"
    rhs: "MetaSentence"
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)


@dataclass(eq=True, frozen=True)
class Iff:
    lhs: "MetaSentence"
    rhs: "MetaSentence"
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)


@dataclass(eq=True, frozen=True)
class Binding:
    var: str
    guard: "MetaSentence"

    def __post_init__(self: Self) -> None:
        if not _VARIABLE.fullmatch(self.var):
            raise BadVariable(f"bad bound variable '{self.var}'")


@dataclass(eq=True, frozen=True)
class Forall:
    bindings: tuple[Binding, ...]
    body: "MetaSentence"
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self: Self) -> None:
        if not self.bindings:
            raise MalformedForm("'forall' needs a binding list", self.span)


@dataclass(eq=True, frozen=True)
class Exists:
    bindings: tuple[Binding, ...]
    body: "MetaSentence"
    span: SourceSpan|None = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self: Self) -> None:
        if not self.bindings:
            raise MalformedForm("'exists' needs a binding list", self.span)


MetaSentence: TypeAlias = Atom|Equal|Not|And|Or|Implies|Iff|Forall|Exists

_CONNECTIVE_NAMES: dict[type, str] = {
    Not: "not", And: "and", Or: "or", Implies: "implies", Iff: "iff",
    Forall: "forall", Exists: "exists",
}


# --- conversion from s-expressions ---

def _name(node: SAtom) -> QualifiedName:
    return QualifiedName.parse(node.text, node.span)


def term_from_sexpr(node: Node) -> MetaTerm:
    if isinstance(node, SAtom):
        if node.text.startswith("?"):
            if not _VARIABLE.fullmatch(node.text):
                raise BadVariable(f"bad variable '{node.text}'", node.span)
            return Variable(node.text, node.span)
        return Constant(_name(node), node.span)

    if node.bracket == "[":
        return Tuple(tuple(term_from_sexpr(n) for n in node.items), node.span)

    if not node.items:
        raise MalformedForm("empty application", node.span)
    head = node.items[0]
    if not isinstance(head, SAtom) or head.text.startswith("?"):
        raise UnknownHead("application head must be a function name", head.span)
    if len(node.items) < 2:
        raise MalformedForm(f"application of '{head.text}' needs an argument", node.span)
    return Application(_name(head), tuple(term_from_sexpr(n) for n in node.items[1:]), node.span)


def _arity(node: SList, n: int) -> None:
    if len(node.items) - 1 != n:
        raise MalformedForm(f"'{node.head}' takes {n} argument(s), got {len(node.items) - 1}",
                            node.span)


def _bindings(node: SList, form: Node) -> tuple[Binding, ...]:
    if not isinstance(form, SList) or form.bracket != "(" or not form.items:
        raise MalformedForm(f"'{node.head}' needs a binding list", form.span)
    if len(form.items) % 2:
        raise MalformedForm("bindings must alternate variable and guard", form.span)

    result = []
    for var_node, guard_node in zip(form.items[::2], form.items[1::2]):
        if not isinstance(var_node, SAtom) or not _VARIABLE.fullmatch(var_node.text):
            raise BadVariable(f"bad bound variable '{var_node}'", var_node.span)
        guard = sentence_from_sexpr(guard_node)
        if var_node.text not in free_variables(guard):
            raise UnguardedBinding(f"guard does not mention {var_node.text}", guard_node.span)
        result.append(Binding(var_node.text, guard))
    return tuple(result)


def sentence_from_sexpr(node: Node) -> MetaSentence:
    if isinstance(node, SAtom):
        if node.text in KEYWORDS or node.text.startswith("?"):
            raise MalformedForm(f"'{node.text}' is not a sentence", node.span)
        return Atom(_name(node), (), node.span)

    if node.bracket == "[":
        raise MalformedForm("a tuple is not a sentence", node.span)
    if not node.items:
        raise MalformedForm("empty form", node.span)

    head = node.items[0]
    if not isinstance(head, SAtom):
        raise UnknownHead("head position holds a list", head.span)
    args = node.items[1:]

    match head.text:
        case "not":
            _arity(node, 1)
            return Not(sentence_from_sexpr(args[0]), node.span)
        case "and":
            return And(tuple(sentence_from_sexpr(a) for a in args), node.span)
        case "or":
            return Or(tuple(sentence_from_sexpr(a) for a in args), node.span)
        case "implies":
            _arity(node, 2)
            return Implies(sentence_from_sexpr(args[0]), sentence_from_sexpr(args[1]), node.span)
        case "iff":
            _arity(node, 2)
            return Iff(sentence_from_sexpr(args[0]), sentence_from_sexpr(args[1]), node.span)
        case "=":
            _arity(node, 2)
            return Equal(term_from_sexpr(args[0]), term_from_sexpr(args[1]), node.span)
        case "forall" | "exists":
            _arity(node, 2)
            bindings = _bindings(node, args[0])
            body = sentence_from_sexpr(args[1])
            cls = Forall if head.text == "forall" else Exists
            return cls(bindings, body, node.span)

    try:
        pred = _name(head)
    except BadIdentifier:
        raise UnknownHead(f"unknown head '{head.text}'", head.span) from None
    return Atom(pred, tuple(term_from_sexpr(a) for a in args), node.span)


# --- public parsing entry points ---

def parse_sentence(text: str, file: str = "<string>") -> MetaSentence:
    nodes = read(text, file)
    if not nodes:
        raise EmptyInput("no sentence in input")
    if len(nodes) > 1:
        raise MalformedForm("more than one sentence", nodes[1].span)
    return sentence_from_sexpr(nodes[0])


def parse_text(text: str, file: str = "<string>") -> list[MetaSentence]:
    return [sentence_from_sexpr(n) for n in read(text, file)]


def parse_file(path: str|Path) -> list[MetaSentence]:
    return [sentence_from_sexpr(n) for n in read_file(path)]


# --- printing ---

def print_term(t: MetaTerm) -> str:
    match t:
        case Variable(name):
            return name
        case Constant(name):
            return str(name)
        case Application(head, args):
            return f"({head} {' '.join(print_term(a) for a in args)})"
        case Tuple(items):
            return f"[{' '.join(print_term(i) for i in items)}]"
    raise TypeError(f"not a term: {t!r}")


def _join(head: str, parts: Iterable[str]) -> str:
    return "(" + " ".join([head, *parts]) + ")"


def print_canonical(s: MetaSentence) -> str:
    match s:
        case Atom(pred, args):
            return _join(str(pred), map(print_term, args)) if args else str(pred)
        case Equal(lhs, rhs):
            return _join("=", (print_term(lhs), print_term(rhs)))
        case Not(body):
            return _join("not", (print_canonical(body),))
        case And(parts) | Or(parts):
            return _join(_CONNECTIVE_NAMES[type(s)], map(print_canonical, parts))
        case Implies(lhs, rhs) | Iff(lhs, rhs):
            return _join(_CONNECTIVE_NAMES[type(s)], (print_canonical(lhs), print_canonical(rhs)))
        case Forall(bindings, body) | Exists(bindings, body):
            binds = " ".join(f"{b.var} {print_canonical(b.guard)}" for b in bindings)
            return _join(_CONNECTIVE_NAMES[type(s)], (f"({binds})", print_canonical(body)))
    raise TypeError(f"not a sentence: {s!r}")


# --- analysis ---

def term_variables(t: MetaTerm) -> frozenset[str]:
    match t:
        case Variable(name):
            return frozenset({name})
        case Constant():
            return frozenset()
        case Application(_, items) | Tuple(items):
            return frozenset().union(*(term_variables(i) for i in items))
    raise TypeError(f"not a term: {t!r}")


def free_variables(s: MetaSentence) -> frozenset[str]:
    match s:
        case Atom(_, args):
            return frozenset().union(*(term_variables(a) for a in args))
        case Equal(lhs, rhs):
            return term_variables(lhs) | term_variables(rhs)
        case Not(body):
            return free_variables(body)
        case And(parts) | Or(parts):
            return frozenset().union(*(free_variables(p) for p in parts))
        case Implies(lhs, rhs) | Iff(lhs, rhs):
            return free_variables(lhs) | free_variables(rhs)
        case Forall(bindings, body) | Exists(bindings, body):
            bound = {b.var for b in bindings}
            inner = free_variables(body).union(*(free_variables(b.guard) for b in bindings))
            return inner - bound
    raise TypeError(f"not a sentence: {s!r}")


def subsentences(s: MetaSentence) -> Iterator[MetaSentence]:
    yield s
    match s:
        case Not(body):
            yield from subsentences(body)
        case And(parts) | Or(parts):
            for p in parts:
                yield from subsentences(p)
        case Implies(lhs, rhs) | Iff(lhs, rhs):
            yield from subsentences(lhs)
            yield from subsentences(rhs)
        case Forall(bindings, body) | Exists(bindings, body):
            for b in bindings:
                yield from subsentences(b.guard)
            yield from subsentences(body)


def _term_names(t: MetaTerm) -> Iterator[QualifiedName]:
    match t:
        case Constant(name):
            yield name
        case Application(head, args):
            yield head
            for a in args:
                yield from _term_names(a)
        case Tuple(items):
            for i in items:
                yield from _term_names(i)


def constants(s: MetaSentence) -> Iterator[QualifiedName]:
    """Every predicate, function head and constant name referenced, in order."""
    for sub in subsentences(s):
        match sub:
            case Atom(pred, args):
                yield pred
                for a in args:
                    yield from _term_names(a)
            case Equal(lhs, rhs):
                yield from _term_names(lhs)
                yield from _term_names(rhs)


@dataclass(eq=True, frozen=True)
class Issue:
    kind: str
    detail: str
    span: SourceSpan|None = None


def validate(s: MetaSentence) -> list[Issue]:
    """Restricted quantification and closedness checks for constructed ASTs."""
    issues = []
    for sub in subsentences(s):
        if isinstance(sub, (Forall, Exists)):
            for b in sub.bindings:
                if b.var not in free_variables(b.guard):
                    issues.append(Issue("unguarded-binding", f"guard does not mention {b.var}",
                                        sub.span))
    if free := free_variables(s):
        issues.append(Issue("open-sentence", "free " + " ".join(sorted(free)), s.span))
    return issues


# --- categorical design lint ---

@dataclass(eq=True, frozen=True)
class ComplianceRecord:
    index: int
    span: SourceSpan|None
    compliant: bool
    offending: tuple[str, ...]


@dataclass
class ComplianceReport:
    records: list[ComplianceRecord] = field(default_factory=list)

    @property
    def compliant_count(self: Self) -> int:
        return sum(r.compliant for r in self.records)

    @property
    def ratio(self: Self) -> float:
        if not self.records:
            return 1.0
        return self.compliant_count / len(self.records)


def lint_categorical_design(sentences: Iterable[MetaSentence]) -> ComplianceReport:
    """Flags sentences using variables, quantifiers or connectives.

    Compliant sentences are atoms and equations over variable-free terms.
    """
    report = ComplianceReport()
    for i, s in enumerate(sentences):
        offending: list[str] = []
        for sub in subsentences(s):
            if (name := _CONNECTIVE_NAMES.get(type(sub))) and name not in offending:
                offending.append(name)
        offending.extend(sorted(v for v in _all_variables(s) if v not in offending))
        compliant = isinstance(s, (Atom, Equal)) and not offending
        report.records.append(ComplianceRecord(i, s.span, compliant, tuple(offending)))
    return report


def _all_variables(s: MetaSentence) -> set[str]:
    found: set[str] = set()
    for sub in subsentences(s):
        match sub:
            case Atom(_, args):
                found.update(*(term_variables(a) for a in args))
            case Equal(lhs, rhs):
                found |= term_variables(lhs) | term_variables(rhs)
            case Forall(bindings, _) | Exists(bindings, _):
                found.update(b.var for b in bindings)
    return found
