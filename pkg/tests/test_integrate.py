import textwrap

import pytest

from iffkit.cat_engine import FinGraph
from iffkit.iffkit_utils import corpus_dir
from iffkit.institution import EQN, PROP, SignatureMap, Theory, TheoryMorphism, load_theory_file, prop_atom
from iffkit.integrate import (
    AlignmentDiagram,
    FusionResult,
    IncompatibleVariables,
    IntegrationError,
    dump_provenance,
    fuse,
    load_alignment,
    load_alignment_file,
    make_morphism,
    signature_colimit,
    validate_alignment,
    verify_fusion_universal,
)
from iffkit.metalang import parse_sentence
from iffkit.sexpr import MalformedForm
from iffkit.termlang import TermLanguage


@pytest.fixture
def span():
    return load_alignment_file(corpus_dir() / "span.align")


def test_span_fusion(span):
    result = fuse(span)
    assert result.theory.id == "span"
    assert result.theory.signature == {"p", "q", "r"}
    assert result.theory.axioms == {prop_atom("p"), parse_sentence("(implies q r)")}
    assert result.consistent
    assert result.provenance == {
        "p": (("t1", "p"),),
        "q": (("t0", "q"), ("t1", "q"), ("t2", "q")),
        "r": (("t2", "r"),),
    }
    assert dump_provenance(result) == textwrap.dedent("""\
        (provenance
          (p (t1 p))
          (q (t0 q) (t1 q) (t2 q))
          (r (t2 r)))
        """)


def test_span_fusion_is_universal(span):
    result = fuse(span)
    assert verify_fusion_universal(span, result, bound=3)


def test_padded_fusion_is_not_universal(span):
    result = fuse(span)
    padded = frozenset(result.theory.signature | {"s"})
    theory = Theory(padded, result.theory.axioms, "padded")
    injections = {n: TheoryMorphism(t, theory, SignatureMap.of(t.signature, padded, {x: x for x in t.signature}))
                  for n, t in span.theories.items()}
    assert not verify_fusion_universal(span, FusionResult(theory, injections, {}), bound=2)


def test_fusion_is_deterministic(span):
    assert fuse(span) == fuse(load_alignment_file(corpus_dir() / "span.align"))


def test_name_clash_uses_origin():
    a, b = frozenset({"x"}), frozenset({"x"})
    shape = FinGraph.of(["a", "b"], {})
    sc = signature_colimit(PROP, shape, {"a": a, "b": b}, {})
    assert sc.signature == {"a:x", "b:x"}
    assert sc.injections["b"]("x") == "b:x"


def test_eqn_fusion():
    a = TermLanguage.of({"x"}, {"f": {"x"}}, "a")
    b = TermLanguage.of({"y"}, {"g": {"y"}, "c": set()}, "b")
    shape = FinGraph.of(["a", "b"], {"e": ("a", "b")})
    sigma = make_morphism(EQN, a, b, {"f": "g"}, {"x": "y"})
    d = AlignmentDiagram(EQN, shape, {"a": Theory(a, frozenset()), "b": Theory(b, frozenset())}, {"e": sigma})

    result = fuse(d, size_bound=2)
    assert result.theory.signature == TermLanguage.of({"x"}, {"f": {"x"}, "c": set()})
    assert result.provenance["x"] == (("a", "x"), ("b", "y"))
    assert result.consistent


def test_incompatible_variables():
    lang = TermLanguage.of({"x", "y"}, {}, "l")
    shape = FinGraph.of(["a", "b"], {"same": ("a", "b"), "swap": ("a", "b")})
    morphisms = {"same": make_morphism(EQN, lang, lang, {}, {"x": "x", "y": "y"}),
                 "swap": make_morphism(EQN, lang, lang, {}, {"x": "y", "y": "x"})}
    with pytest.raises(IncompatibleVariables):
        signature_colimit(EQN, shape, {"a": lang, "b": lang}, morphisms)


def test_validate_alignment():
    _, t0 = load_theory_file(corpus_dir() / "t0.thy")
    _, t1 = load_theory_file(corpus_dir() / "t1.thy")
    collapse = SignatureMap.of(t1.signature, t0.signature, {"p": "q", "q": "q"})
    d = AlignmentDiagram(PROP, FinGraph.of(["t1", "t0"], {"down": ("t1", "t0")}), {"t0": t0, "t1": t1},
                         {"down": collapse})
    report = validate_alignment(d)
    assert report.laws_violated() == {"edge-morphism"}


def test_span_alignment_is_valid(span):
    assert validate_alignment(span).lawful


def test_diagram_errors():
    _, t0 = load_theory_file(corpus_dir() / "t0.thy")
    with pytest.raises(IntegrationError):
        AlignmentDiagram(PROP, FinGraph.of(["t0", "t1"], {}), {"t0": t0}, {})


@pytest.mark.parametrize("text", [
    "(alignment bad (node t0 t0.thy) (edge t0 t9))",
    "(alignment empty (institution prop))",
    "(alignment bad (node t1 t1.thy) (node t0 t0.thy) (edge t1 t0 (sig-map (p q))))",
    "(alignment bad (node t0 t0.thy) (node t0 t0.thy))",
    "(alignment bad (institution eqn) (node t0 t0.thy))",
    "(alignment bad (node t0 t0.thy) (frob))",
])
def test_alignment_file_errors(text):
    with pytest.raises(MalformedForm):
        load_alignment(text, base=corpus_dir())
