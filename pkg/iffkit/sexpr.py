"""Shared s-expression reader and printer.

Every iffkit file format (metashell sentences, leveled data, languages,
classifications, theories, alignments) is read through here: `( ... )` lists,
`[ ... ]` tuples, atoms, and `;` comments running to end of line.
"""
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import TypeAlias
import sys

if sys.version_info >= (3, 11):
    from typing import Self
else:  # pragma: no cover
    from typing_extensions import Self

import parsy as p

from iffkit.iffkit_types import IffError, SourceSpan

_SPACE = p.regex(r"(?:\s|;[^\n]*)*")
_TOKEN = p.regex(r"[()\[\]]|[^\s()\[\];]+").mark()
_TOKENS = _SPACE >> (_TOKEN << _SPACE).many()

_CLOSERS = {"(": ")", "[": "]"}


class ParseError(IffError):
    def __init__(self, message: str, span: SourceSpan|None = None) -> None:
        super().__init__(f"{span}: {message}" if span else message)
        self.span = span


class UnbalancedParen(ParseError):
    pass


class EmptyInput(ParseError):
    pass


class MalformedForm(ParseError):
    pass


@dataclass(eq=True, frozen=True)
class SAtom:
    text: str
    span: SourceSpan|None = field(default=None, compare=False, hash=False)

    def __str__(self: Self) -> str:
        return self.text


@dataclass(eq=True, frozen=True)
class SList:
    items: tuple["Node", ...]
    bracket: str = "("
    span: SourceSpan|None = field(default=None, compare=False, hash=False)

    @property
    def head(self: Self) -> str|None:
        if self.items and isinstance(self.items[0], SAtom):
            return self.items[0].text
        return None

    def __str__(self: Self) -> str:
        return to_text(self)


Node: TypeAlias = SAtom|SList


class _Positions:
    """Converts parsy's 0-based (line, column) marks to offsets and spans."""
    def __init__(self, text: str, file: str) -> None:
        self.file = file
        self.line_starts = [0] + [i + 1 for i, c in enumerate(text) if c == "\n"]

    def offset(self, mark: tuple[int, int]) -> int:
        return self.line_starts[mark[0]] + mark[1]

    def span(self, start: tuple[int, int], end: tuple[int, int]) -> SourceSpan:
        return SourceSpan(self.file, start[0] + 1, start[1] + 1,
                          max(1, self.offset(end) - self.offset(start)))


def read(text: str, file: str = "<string>") -> list[Node]:
    """Reads every top-level form in `text`."""
    pos = _Positions(text, file)
    tokens = _TOKENS.parse(text)

    result: list[Node] = []
    # each open frame: (bracket, start mark, items)
    stack: list[tuple[str, tuple[int, int], list[Node]]] = []

    for start, tok, end in tokens:
        if tok in _CLOSERS:
            stack.append((tok, start, []))
        elif tok in (")", "]"):
            if not stack:
                raise UnbalancedParen(f"unexpected '{tok}'", pos.span(start, end))
            bracket, open_mark, items = stack.pop()
            if _CLOSERS[bracket] != tok:
                raise UnbalancedParen(f"'{bracket}' closed by '{tok}'", pos.span(start, end))
            node: Node = SList(tuple(items), bracket, pos.span(open_mark, end))
            (stack[-1][2] if stack else result).append(node)
        else:
            atom = SAtom(tok, pos.span(start, end))
            (stack[-1][2] if stack else result).append(atom)

    if stack:
        bracket, open_mark, _ = stack[0]
        raise UnbalancedParen(f"'{bracket}' is never closed",
                              pos.span(open_mark, (open_mark[0], open_mark[1] + 1)))

    return result


def read_one(text: str, file: str = "<string>") -> Node:
    nodes = read(text, file)
    if not nodes:
        raise EmptyInput("no form found", None)
    if len(nodes) > 1:
        raise MalformedForm("expected a single form", nodes[1].span)
    return nodes[0]


def read_file(path: str|Path) -> list[Node]:
    path = Path(path)
    return read(path.read_text(encoding="utf-8"), str(path))


def to_text(node: Node) -> str:
    if isinstance(node, SAtom):
        return node.text
    close = _CLOSERS[node.bracket]
    return node.bracket + " ".join(to_text(n) for n in node.items) + close


def lst(*items: Node|str, bracket: str = "(") -> SList:
    """Builds a list node; plain strings become atoms."""
    return SList(tuple(SAtom(i) if isinstance(i, str) else i for i in items), bracket)


# --- helpers for the record-style file formats ---

def expect_list(node: Node, head: str|None = None, min_items: int = 1) -> SList:
    if not isinstance(node, SList) or node.bracket != "(":
        raise MalformedForm(f"expected a list{f' ({head} ...)' if head else ''}", node.span)
    if head is not None and node.head != head:
        raise MalformedForm(f"expected ({head} ...), found {to_text(node)[:40]}", node.span)
    if len(node.items) < min_items:
        raise MalformedForm(f"({node.head} ...) needs at least {min_items - 1} argument(s)", node.span)
    return node


def atom_text(node: Node) -> str:
    if not isinstance(node, SAtom):
        raise MalformedForm("expected an atom", node.span)
    return node.text


def atoms(node: Node) -> list[str]:
    """The atoms of a flat list, e.g. `(tokens a b c)` -> [a, b, c]."""
    lst_node = expect_list(node)
    return [atom_text(n) for n in lst_node.items[1:]]


def section(node: SList, head: str, start: int = 1) -> SList|None:
    for item in node.items[start:]:
        if isinstance(item, SList) and item.head == head:
            return item
    return None


def pairs(node: Node) -> list[tuple[str, str]]:
    """A list of two-atom lists: `((x y) (z w))` or `(head (x y) ...)`."""
    lst_node = expect_list(node, min_items=0)
    items: Sequence[Node] = lst_node.items
    if lst_node.head is not None:
        items = items[1:]
    result = []
    for item in items:
        pair = expect_list(item, min_items=2)
        if len(pair.items) != 2:
            raise MalformedForm("expected a pair", pair.span)
        result.append((atom_text(pair.items[0]), atom_text(pair.items[1])))
    return result
