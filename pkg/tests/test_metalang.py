import random
import textwrap

import pytest

from iffkit.iffkit_utils import corpus_dir
from iffkit.metalang import (
    And,
    Application,
    Atom,
    BadIdentifier,
    BadVariable,
    Binding,
    Constant,
    Equal,
    Exists,
    Forall,
    MalformedForm,
    QualifiedName,
    Tuple,
    UnbalancedParen,
    UnguardedBinding,
    UnknownHead,
    Variable,
    constants,
    free_variables,
    lint_categorical_design,
    parse_file,
    parse_sentence,
    parse_text,
    print_canonical,
    validate,
)
from iffkit.suites import random_sentence, sentence_depth


def test_qualified_names():
    qn = QualifiedName.parse("vlrg.set:collection")
    assert qn.prefix_path == ("vlrg", "set")
    assert qn.local == "collection"
    assert str(qn) == "vlrg.set:collection"
    assert not qn.special

    special = QualifiedName.parse("SET.LIM.PBK:pullback")
    assert special.special
    assert special.prefix == "SET.LIM.PBK"

    assert QualifiedName.parse("object") == QualifiedName((), "object")

    with pytest.raises(BadIdentifier):
        QualifiedName.parse("Object")

    with pytest.raises(BadIdentifier):
        QualifiedName.parse("set.Lim:object")


def test_parse_atom_sentence():
    s = parse_sentence("(ur:object collection)")
    assert s == Atom(QualifiedName.of("ur:object"), (Constant(QualifiedName.of("collection")),))
    assert print_canonical(s) == "(ur:object collection)"


def test_parse_terms():
    s = parse_sentence("(= (vlrg.ftn:composition [mu lrg.gph.mor:target]) graph)")
    assert isinstance(s, Equal)
    assert isinstance(s.lhs, Application)
    assert isinstance(s.lhs.args[0], Tuple)
    assert s.rhs == Constant(QualifiedName.of("graph"))


def test_parse_quantifier():
    s = parse_sentence("(forall (?c (collection ?c)) (ur:object ?c))")
    assert isinstance(s, Forall)
    assert s.bindings[0].var == "?c"
    assert free_variables(s) == frozenset()
    assert free_variables(s.body) == frozenset({"?c"})
    assert print_canonical(s) == "(forall (?c (collection ?c)) (ur:object ?c))"


def test_empty_connectives():
    assert parse_sentence("(and)") == And(())
    assert print_canonical(And(())) == "(and)"


@pytest.mark.parametrize("text, error", [
    ("(a (b)", UnbalancedParen),
    ("(forall (?x (object ?y)) (thing ?x))", UnguardedBinding),
    ("(forall (x (object x)) (thing x))", BadVariable),
    ("(implies a)", MalformedForm),
    ("((a) b)", UnknownHead),
    ("(Thing x)", UnknownHead),
    ("(p ?X)", BadVariable),
    ("[a b]", MalformedForm),
])
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_sentence(text)


def test_error_carries_location():
    with pytest.raises(UnguardedBinding) as e:
        parse_sentence("(forall\n  (?x (object ?y))\n  (thing ?x))", "t.iff")
    assert e.value.span is not None
    assert (e.value.span.file, e.value.span.line) == ("t.iff", 2)


def test_validate_open_sentence():
    s = parse_sentence("(collection ?c)")
    assert [i.kind for i in validate(s)] == ["open-sentence"]
    assert validate(parse_sentence("(collection class)")) == []


def test_constants():
    s = parse_sentence("(forall (?c (collection ?c)) (ur:object (f ?c)))")
    assert [str(n) for n in constants(s)] == ["collection", "ur:object", "f"]


def test_lint():
    sentences = parse_text(textwrap.dedent("""\
        (= underlying graph)
        (vlrg.ftn:function mu)
        (not (class class))
        (forall (?c (collection ?c)) (ur:object ?c))
        (= (f ?x) g)
        """))
    report = lint_categorical_design(sentences)
    assert [r.compliant for r in report.records] == [True, True, False, False, False]
    assert report.records[2].offending == ("not",)
    assert report.records[3].offending == ("forall", "?c")
    assert report.records[4].offending == ("?x",)
    assert report.compliant_count == 2
    assert report.ratio == pytest.approx(0.4)


def test_corpus_round_trip():
    paths = sorted(corpus_dir().glob("*.iff"))
    assert len(paths) == 6
    for path in paths:
        for s in parse_file(path):
            text = print_canonical(s)
            assert parse_sentence(text) == s
            assert print_canonical(parse_sentence(text)) == text


def test_corpus_counts_and_compliance():
    corpus = corpus_dir()
    assert len(parse_file(corpus / "ur.iff")) == 1
    assert len(parse_file(corpus / "tco.iff")) == 3
    assert len(parse_file(corpus / "uco.iff")) == 3

    cat = parse_file(corpus / "cat.iff")
    assert len(cat) == 20
    assert lint_categorical_design(cat).ratio == 1.0

    iso = lint_categorical_design(parse_file(corpus / "set-metashell.iff"))
    assert [r.compliant for r in iso.records] == [False]
    assert {"forall", "exists", "iff"} <= set(iso.records[0].offending)


def test_unprintable_asts_cannot_be_built():
    c = Constant(QualifiedName.of("c"))
    for keyword in ("and", "or", "not", "implies", "iff", "forall", "exists"):
        with pytest.raises(UnknownHead):
            Atom(QualifiedName.parse(keyword), (c,))

    with pytest.raises(MalformedForm):
        Application(QualifiedName.of("f"), ())

    guard = Atom(QualifiedName.of("object"), (Variable("?x"),))
    body = Atom(QualifiedName.of("thing"), (Variable("?x"),))
    with pytest.raises(MalformedForm):
        Forall((), body)
    with pytest.raises(MalformedForm):
        Exists((), body)

    with pytest.raises(BadVariable):
        Variable("x")
    with pytest.raises(BadVariable):
        Binding("x", guard)

    assert print_canonical(Forall((Binding("?x", guard),), body)) == "(forall (?x (object ?x)) (thing ?x))"


def test_keywords_are_names_in_term_position():
    s = Atom(QualifiedName.of("p"), (Constant(QualifiedName.of("and")),
                                     Application(QualifiedName.of("not"), (Variable("?x"),))))
    assert print_canonical(s) == "(p and (not ?x))"
    assert parse_sentence(print_canonical(s)) == s
    assert Atom(QualifiedName.of("ur:and")) == parse_sentence("ur:and")


@pytest.mark.parametrize("seed", range(20))
def test_random_round_trip(seed):
    rng = random.Random(seed)
    for _ in range(50):
        s = random_sentence(rng, 6)
        assert sentence_depth(s) <= 6
        text = print_canonical(s)
        assert parse_sentence(text) == s
        assert print_canonical(parse_sentence(text)) == text
