"""Metalevels, namespaces, vocabularies and conceptual warrant.

A namespace lives at one of five metalevels and is named by a dotted path of
concept segments. It can be written four ways: general (`lrg.cat`), numeric
(`2.cat`), bare (`cat`, via the concept's common level) and special (`CAT`).
"""
import logging
import re
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from enum import IntEnum

from iffkit.iffkit_types import StrEnum
from pathlib import Path
from typing import TypeAlias
import sys

if sys.version_info >= (3, 11):
    from typing import Self
else:  # pragma: no cover
    from typing_extensions import Self

from iffkit.iffkit_types import IffError
from iffkit.metalang import KEYWORDS, MetaSentence, QualifiedName, constants

logger = logging.getLogger("iffkit")

_SEGMENT = re.compile(r"[a-z0-9-]+")
_SPECIAL = re.compile(r"[A-Z0-9-]*[A-Z][A-Z0-9-]*(?:\.[A-Z0-9-]+)*")


class RegistryError(IffError):
    pass


class DuplicateNamespace(RegistryError):
    pass


class SpecialPrefixClash(RegistryError):
    pass


class UnknownPrefix(RegistryError):
    pass


class NoCommonLevel(RegistryError):
    pass


class AmbiguousPrefix(RegistryError):
    pass


class UnknownNamespace(RegistryError):
    pass


class DuplicateEntry(RegistryError):
    pass


class FormatError(RegistryError):
    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class Metalevel(IntEnum):
    OBJ = 0
    SML = 1
    LRG = 2
    VLRG = 3
    UR = 4

    @property
    def alias(self: Self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "Metalevel":
        """Accepts either the alias (`lrg`) or the numeric form (`2`)."""
        if text.isdigit():
            if int(text) > cls.UR:
                raise UnknownPrefix(f"metalevel {text} out of range 0..4")
            return cls(int(text))
        for level in cls:
            if level.alias == text:
                return level
        raise UnknownPrefix(f"unknown metalevel '{text}'")


LEVEL_ALIASES = {level.alias: level for level in Metalevel}


class Kind(StrEnum):
    SET = "set"
    FUNCTION = "function"
    RELATION = "relation"


NamespaceKey: TypeAlias = tuple[Metalevel, tuple[str, ...]]


@dataclass(eq=True, frozen=True)
class Namespace:
    level: Metalevel
    path: tuple[str, ...]
    special_prefixes: frozenset[str] = field(default=frozenset(), compare=False, hash=False)
    deprecated: bool = field(default=False, compare=False, hash=False)

    @property
    def key(self: Self) -> NamespaceKey:
        return (self.level, self.path)

    @property
    def concept(self: Self) -> str:
        return self.path[0]

    @property
    def prefix(self: Self) -> str:
        return ".".join((self.level.alias, *self.path))

    @property
    def numeric_prefix(self: Self) -> str:
        return ".".join((str(int(self.level)), *self.path))

    def __str__(self: Self) -> str:
        return self.prefix


@dataclass(eq=True, frozen=True)
class TermRef:
    namespace: NamespaceKey
    term: str|None   # None: cited by a sentence with no local term

    def __str__(self: Self) -> str:
        level, path = self.namespace
        return ".".join((level.alias, *path)) + (f":{self.term}" if self.term else "")


@dataclass
class VocabularyEntry:
    namespace: NamespaceKey
    term: str
    kind: Kind
    uses: set[TermRef] = field(default_factory=set)

    @property
    def ref(self: Self) -> TermRef:
        return TermRef(self.namespace, self.term)


@dataclass(eq=True, frozen=True)
class VocabularyCounts:
    sets: int = 0
    functions: int = 0
    relations: int = 0

    @property
    def total(self: Self) -> int:
        return self.sets + self.functions + self.relations

    def as_dict(self: Self) -> dict[str, int]:
        return {"sets": self.sets, "functions": self.functions,
                "relations": self.relations, "total": self.total}


@dataclass(eq=True, frozen=True)
class MetaOntology:
    """A named group of namespaces at one level, such as IFF-UR or TCO."""
    name: str
    level: Metalevel
    namespaces: tuple[NamespaceKey, ...]


def _split_path(text: str) -> tuple[str, ...]:
    path = tuple(text.split("."))
    if not all(_SEGMENT.fullmatch(s) for s in path):
        raise RegistryError(f"bad namespace path '{text}'")
    return path


class Registry:
    def __init__(self) -> None:
        self.namespaces: dict[NamespaceKey, Namespace] = {}
        self.specials: dict[str, NamespaceKey] = {}
        self.common: dict[str, Metalevel] = {}
        self.entries: dict[TermRef, VocabularyEntry] = {}
        self.ontologies: dict[str, MetaOntology] = {}

    # --- namespaces ---

    def register_namespace(self, level: Metalevel|int|str, path: Iterable[str]|str,
                           special_prefixes: Iterable[str] = ()) -> Namespace:
        level = Metalevel.parse(level) if isinstance(level, str) else Metalevel(level)
        path = _split_path(path) if isinstance(path, str) else tuple(path)
        if not path or not all(_SEGMENT.fullmatch(s) for s in path):
            raise RegistryError(f"bad namespace path {path!r}")

        specials = frozenset(special_prefixes)
        for sp in specials:
            if not _SPECIAL.fullmatch(sp):
                raise RegistryError(f"special prefix '{sp}' must be uppercase")
            if sp in self.specials:
                raise SpecialPrefixClash(f"special prefix '{sp}' already names "
                                         f"{self.namespaces[self.specials[sp]]}")

        if (level, path) in self.namespaces:
            raise DuplicateNamespace(f"namespace {'.'.join((level.alias, *path))} already registered")

        ns = Namespace(level, path, specials)
        self.namespaces[ns.key] = ns
        for sp in specials:
            self.specials[sp] = ns.key
        return ns

    def set_common_level(self, concept: str, level: Metalevel|int|str) -> None:
        level = Metalevel.parse(level) if isinstance(level, str) else Metalevel(level)
        if concept in self.common and self.common[concept] != level:
            raise RegistryError(f"'{concept}' already has common level {self.common[concept].alias}")
        self.common[concept] = level

    def deprecate(self, ns: Namespace|NamespaceKey) -> Namespace:
        key = ns.key if isinstance(ns, Namespace) else ns
        if key not in self.namespaces:
            raise UnknownNamespace(f"unknown namespace {key}")
        self.namespaces[key] = replace(self.namespaces[key], deprecated=True)
        return self.namespaces[key]

    def register_ontology(self, name: str, level: Metalevel|int|str,
                          paths: Iterable[Iterable[str]|str]) -> MetaOntology:
        level = Metalevel.parse(level) if isinstance(level, str) else Metalevel(level)
        keys = []
        for p in paths:
            path = _split_path(p) if isinstance(p, str) else tuple(p)
            if (level, path) not in self.namespaces:
                raise UnknownNamespace(f"{name}: no namespace {'.'.join((level.alias, *path))}")
            keys.append((level, path))
        onto = MetaOntology(name, level, tuple(keys))
        self.ontologies[name] = onto
        return onto

    def namespace(self, key: NamespaceKey) -> Namespace:
        if key not in self.namespaces:
            raise UnknownNamespace(f"unknown namespace {key}")
        return self.namespaces[key]

    def resolve(self, surface_prefix: str) -> Namespace:
        """Resolves any of the four surface forms to its namespace."""
        if _SPECIAL.fullmatch(surface_prefix):
            if surface_prefix not in self.specials:
                raise UnknownPrefix(f"unknown special prefix '{surface_prefix}'")
            return self._found(self.specials[surface_prefix], surface_prefix)

        segments = tuple(surface_prefix.split("."))
        if not all(_SEGMENT.fullmatch(s) for s in segments):
            raise UnknownPrefix(f"malformed prefix '{surface_prefix}'")
        first, rest = segments[0], segments[1:]

        if first.isdigit():
            level = Metalevel.parse(first)
            if not rest or (level, rest) not in self.namespaces:
                raise UnknownPrefix(f"no namespace '{surface_prefix}'")
            return self._found((level, rest), surface_prefix)

        candidates: set[NamespaceKey] = set()
        if first in LEVEL_ALIASES and rest:
            if (key := (LEVEL_ALIASES[first], rest)) in self.namespaces:
                candidates.add(key)
        if first in self.common:
            if (key := (self.common[first], segments)) in self.namespaces:
                candidates.add(key)

        if len(candidates) > 1:
            raise AmbiguousPrefix(f"'{surface_prefix}' names "
                                  + " and ".join(str(self.namespaces[k]) for k in sorted(candidates)))
        if candidates:
            return self._found(candidates.pop(), surface_prefix)

        if first not in self.common and any(path == segments for _, path in self.namespaces):
            raise NoCommonLevel(f"'{first}' has no common level; qualify '{surface_prefix}' with one")
        raise UnknownPrefix(f"no namespace '{surface_prefix}'")

    def _found(self, key: NamespaceKey, surface: str) -> Namespace:
        ns = self.namespaces[key]
        if ns.deprecated:
            logger.warning(f"namespace {ns} (written '{surface}') is deprecated")
        return ns

    # --- vocabulary ---

    def add_entry(self, ns: Namespace|NamespaceKey, term: str, kind: Kind|str) -> VocabularyEntry:
        key = ns.key if isinstance(ns, Namespace) else ns
        if key not in self.namespaces:
            raise UnknownNamespace(f"unknown namespace {key}")
        if not _SEGMENT.fullmatch(term):
            raise RegistryError(f"bad term '{term}'")
        ref = TermRef(key, term)
        if ref in self.entries:
            raise DuplicateEntry(f"{ref} already registered")
        entry = VocabularyEntry(key, term, Kind(kind))
        self.entries[ref] = entry
        return entry

    def remove_entry(self, ns: Namespace|NamespaceKey, term: str) -> None:
        key = ns.key if isinstance(ns, Namespace) else ns
        ref = TermRef(key, term)
        if ref not in self.entries:
            raise UnknownPrefix(f"no term {ref}")
        del self.entries[ref]
        for e in self.entries.values():
            e.uses.discard(ref)

    def entries_of(self, ns: Namespace|NamespaceKey) -> list[VocabularyEntry]:
        key = ns.key if isinstance(ns, Namespace) else ns
        return [e for e in self.entries.values() if e.namespace == key]

    def lookup_term(self, term: str) -> VocabularyEntry:
        """Unqualified lookup; a term defined in two namespaces is ambiguous."""
        found = [e for e in self.entries.values() if e.term == term]
        if len(found) > 1:
            raise AmbiguousPrefix(f"'{term}' is defined in "
                                  + ", ".join(str(e.ref) for e in sorted(found, key=_entry_order)))
        if not found:
            raise UnknownPrefix(f"no namespace defines '{term}'")
        return found[0]

    def entry(self, name: QualifiedName|str) -> VocabularyEntry:
        qn = QualifiedName.parse(name) if isinstance(name, str) else name
        if not qn.prefix_path:
            return self.lookup_term(qn.local)
        ns = self.resolve(qn.prefix)
        if (ref := TermRef(ns.key, qn.local)) not in self.entries:
            raise UnknownPrefix(f"{ns} has no term '{qn.local}'")
        return self.entries[ref]

    def metalanguage(self, level: Metalevel|int) -> frozenset[str]:
        """Terms available to axiomatize level `level`: everything at that level
        or above, plus the metashell keywords."""
        names = {str(e.ref) for e in self.entries.values() if e.namespace[0] >= level}
        return frozenset(names | KEYWORDS)


def _entry_order(e: VocabularyEntry) -> tuple:
    return (e.namespace[0], e.namespace[1], e.term)


def vocabulary_report(registry: Registry, ns: Namespace|NamespaceKey) -> VocabularyCounts:
    key = ns.key if isinstance(ns, Namespace) else ns
    if key not in registry.namespaces:
        raise UnknownNamespace(f"unknown namespace {key}")
    entries = registry.entries_of(key)
    return VocabularyCounts(
        sets=sum(e.kind is Kind.SET for e in entries),
        functions=sum(e.kind is Kind.FUNCTION for e in entries),
        relations=sum(e.kind is Kind.RELATION for e in entries),
    )


# --- conceptual warrant ---

class Warrant(StrEnum):
    USABLE = "usable"
    SUPPORTING = "supporting"
    BOTH = "both"
    ORPHAN = "orphan"


@dataclass
class WarrantReport:
    status: dict[TermRef, Warrant] = field(default_factory=dict)

    def with_status(self: Self, warrant: Warrant) -> list[TermRef]:
        return [ref for ref, w in self.status.items() if w is warrant]

    @property
    def orphans(self: Self) -> list[TermRef]:
        return self.with_status(Warrant.ORPHAN)

    def counts(self: Self) -> dict[Warrant, int]:
        return {w: len(self.with_status(w)) for w in Warrant}


def warrant_check(registry: Registry) -> WarrantReport:
    report = WarrantReport()
    for entry in sorted(registry.entries.values(), key=_entry_order):
        level = entry.namespace[0]
        supporting = any(u.namespace == entry.namespace and u.term is not None and u.term != entry.term
                         for u in entry.uses)
        usable = any(u.namespace != entry.namespace and u.namespace[0] <= level
                     for u in entry.uses)
        if supporting and usable:
            report.status[entry.ref] = Warrant.BOTH
        elif usable:
            report.status[entry.ref] = Warrant.USABLE
        elif supporting:
            report.status[entry.ref] = Warrant.SUPPORTING
        else:
            report.status[entry.ref] = Warrant.ORPHAN
    return report


def scan_sentences(registry: Registry, ns: Namespace, sentences: Iterable[MetaSentence]) -> int:
    """Adds use edges for sentences written in namespace `ns`; returns the edge count.

    Every local term of a sentence cites every other entry the sentence mentions.
    Names that resolve to no entry are skipped.
    """
    added = 0
    for s in sentences:
        referenced: dict[TermRef, VocabularyEntry] = {}
        for qn in constants(s):
            if (e := _scan_lookup(registry, ns, qn)) is not None:
                referenced[e.ref] = e

        locals_ = [ref.term for ref in referenced if ref.namespace == ns.key] or [None]
        for citing in locals_:
            by = TermRef(ns.key, citing)
            for ref, e in referenced.items():
                if ref != by and by not in e.uses:
                    e.uses.add(by)
                    added += 1
    return added


def _scan_lookup(registry: Registry, ns: Namespace, qn: QualifiedName) -> VocabularyEntry|None:
    try:
        if not qn.prefix_path:
            if (local := TermRef(ns.key, qn.local)) in registry.entries:
                return registry.entries[local]
            return registry.lookup_term(qn.local)
        return registry.entry(qn)
    except AmbiguousPrefix as e:
        logger.warning(f"{ns}: {e}")
    except RegistryError:
        logger.debug(f"{ns}: '{qn}' is not in the vocabulary")
    return None


# --- vocabulary files ---

def _specials(tokens: list[str]) -> tuple[list[str], list[str]]:
    rest, specials = [], []
    for t in tokens:
        if t.startswith("special="):
            specials.extend(s for s in t.removeprefix("special=").split(",") if s)
        else:
            rest.append(t)
    return rest, specials


def parse_vocabulary(text: str, registry: Registry|None = None) -> Registry:
    registry = registry if registry is not None else Registry()

    for lineno, line in enumerate(text.splitlines(), 1):
        tokens, specials = _specials(line.split("#", 1)[0].split())
        if not tokens and not specials:
            continue
        try:
            match tokens:
                case ["common", concept, level]:
                    registry.set_common_level(concept, level)
                case ["namespace", level, path]:
                    registry.register_namespace(level, path, specials)
                case ["deprecated", level, path]:
                    registry.deprecate((Metalevel.parse(level), _split_path(path)))
                case ["ontology", name, level, *paths] if paths:
                    registry.register_ontology(name, level, paths)
                case [level, path, term, kind]:
                    key = (Metalevel.parse(level), _split_path(path))
                    if key not in registry.namespaces:
                        registry.register_namespace(*key, specials)
                    elif not set(specials) <= registry.namespaces[key].special_prefixes:
                        raise RegistryError(f"special prefixes of {path} differ from its registration")
                    try:
                        registry.add_entry(key, term, Kind(kind))
                    except ValueError:
                        raise RegistryError(f"unknown kind '{kind}'") from None
                case _:
                    raise RegistryError(f"cannot read '{line.strip()}'")
        except RegistryError as e:
            raise FormatError(str(e), lineno) from e

    return registry


def load_vocabulary(path: str|Path, registry: Registry|None = None) -> Registry:
    return parse_vocabulary(Path(path).read_text(encoding="utf-8"), registry)


def dump_vocabulary(registry: Registry) -> str:
    """Canonical text form; loading it back dumps to the same text."""
    lines = []
    for concept, level in sorted(registry.common.items()):
        lines.append(f"common {concept} {level.alias}")
    for key in sorted(registry.namespaces):
        ns = registry.namespaces[key]
        special = f" special={','.join(sorted(ns.special_prefixes))}" if ns.special_prefixes else ""
        lines.append(f"namespace {ns.level.alias} {'.'.join(ns.path)}{special}")
    for key in sorted(registry.namespaces):
        if registry.namespaces[key].deprecated:
            lines.append(f"deprecated {key[0].alias} {'.'.join(key[1])}")
    for name, onto in sorted(registry.ontologies.items()):
        paths = " ".join(".".join(p) for _, p in onto.namespaces)
        lines.append(f"ontology {name} {onto.level.alias} {paths}")
    for e in sorted(registry.entries.values(), key=_entry_order):
        lines.append(f"{e.namespace[0].alias} {'.'.join(e.namespace[1])} {e.term} {e.kind}")
    return "".join(f"{line}\n" for line in lines)
