import pytest

from iffkit.iffkit_types import SourceSpan
from iffkit.sexpr import (
    EmptyInput,
    MalformedForm,
    SAtom,
    SList,
    UnbalancedParen,
    atoms,
    expect_list,
    lst,
    pairs,
    read,
    read_one,
    section,
    to_text,
)


def test_read_nested():
    node = read_one("(a (b c) [d e])")
    assert isinstance(node, SList)
    assert node.head == "a"
    assert node.items[1] == lst("b", "c")
    assert node.items[2] == lst("d", "e", bracket="[")
    assert to_text(node) == "(a (b c) [d e])"


def test_read_comments_and_whitespace():
    nodes = read("; header\n(x)  ; trailing\n\n  y\n")
    assert nodes == [lst("x"), SAtom("y")]


def test_spans():
    nodes = read("(a)\n  (b c)", "f.iff")
    assert nodes[1].span == SourceSpan("f.iff", 2, 3, 5)
    assert str(nodes[1].span) == "f.iff:2:3"
    assert nodes[1].items[1].span == SourceSpan("f.iff", 2, 6, 1)


def test_unbalanced():
    with pytest.raises(UnbalancedParen):
        read("(a (b)")

    with pytest.raises(UnbalancedParen):
        read("a)")

    with pytest.raises(UnbalancedParen):
        read("(a]")


def test_read_one_errors():
    with pytest.raises(EmptyInput):
        read_one("  ; nothing\n")

    with pytest.raises(MalformedForm):
        read_one("(a) (b)")


def test_record_helpers():
    form = read_one("(classification c (tokens a b) (incidence (a t) (b u)))")
    assert expect_list(form, "classification", 2) is form
    tokens = section(form, "tokens", 2)
    assert tokens is not None and atoms(tokens) == ["a", "b"]
    assert pairs(section(form, "incidence")) == [("a", "t"), ("b", "u")]
    assert section(form, "types") is None

    with pytest.raises(MalformedForm):
        expect_list(form, "theory")

    with pytest.raises(MalformedForm):
        pairs(read_one("((a b c))"))
