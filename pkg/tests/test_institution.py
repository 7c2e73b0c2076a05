import random
import textwrap

import pytest

from iffkit.iffkit_utils import corpus_dir
from iffkit.institution import (
    EQN,
    EQN_TO_FOL,
    FALSE,
    PROP,
    TINYFOL,
    TRUE,
    InstitutionError,
    InvalidMorphism,
    SignatureMap,
    Theory,
    TheoryMorphism,
    TooLarge,
    check_institution_morphism,
    check_reduct_functoriality,
    check_satisfaction_condition,
    check_theory_lattice,
    check_theory_morphism,
    closure,
    dump_theory,
    entails,
    identity_theory_morphism,
    institution,
    is_consistent,
    lattice_of_theories,
    load_theory,
    load_theory_file,
    prop_atom,
    theory_models,
    truth_lattice,
)
from iffkit.metalang import Implies, parse_sentence
from iffkit.sexpr import MalformedForm, read_one
from iffkit.termlang import TermLanguage, TermLanguageMorphism


def fs(*items):
    return frozenset(items)


p, q = prop_atom("p"), prop_atom("q")


def test_prop_sentences():
    assert list(PROP.sentences(fs("p"), 0)) == [p, TRUE, FALSE]
    assert PROP.satisfies(fs("p"), fs(), parse_sentence("(implies p q)"))
    assert not PROP.satisfies(fs("p"), fs("p"), parse_sentence("(implies p q)"))
    assert list(PROP.models(fs("q", "p"))) == [fs(), fs("p"), fs("q"), fs("p", "q")]


def test_prop_satisfaction_condition():
    sigma = SignatureMap.of("pq", "r", {"p": "r", "q": "r"})
    report = check_satisfaction_condition(PROP, sigma, 2, 0)
    assert report.lawful and report.checked > 0

    tau = SignatureMap.of("r", "st", {"r": "t"})
    assert check_reduct_functoriality(PROP, sigma, tau, 0).lawful
    assert PROP.reduct(sigma, fs("r")) == fs("p", "q")
    assert PROP.translate(tau, prop_atom("r")) == prop_atom("t")

    with pytest.raises(InvalidMorphism):
        SignatureMap.of("pq", "r", {"p": "r"})

    with pytest.raises(InvalidMorphism):
        PROP.compose(sigma, tau)


@pytest.fixture
def unary():
    return TermLanguage.of({"x"}, {"s": {"x"}}, "unary")


def test_eqn_satisfaction_condition(unary):
    two = TermLanguage.of({"y"}, {"t": {"y"}, "u": {"y"}}, "two")
    for sigma in EQN.morphisms(unary, two):
        assert check_satisfaction_condition(EQN, sigma, 1, 2).lawful
    assert len(list(EQN.morphisms(unary, two))) == 2


def test_eqn_algebra_counts(unary):
    # n ** n tables for s at carrier size n
    assert len(list(EQN.models(unary, 2))) == 1 + 4


def test_eqn_to_fol_square(unary):
    report = check_institution_morphism(EQN_TO_FOL, [unary], 1, 2)
    assert report.lawful and report.checked > 0


FOL_THEORY = textwrap.dedent("""\
    (theory fixed
      (institution fol)
      (signature (vars x) (function s (arity x)) (relation r (arity x)))
      (axioms (r x) (= (s x) x)))
    """)


def test_tinyfol():
    inst, theory = load_theory(FOL_THEORY)
    assert inst is TINYFOL
    sig = theory.signature
    assert check_satisfaction_condition(TINYFOL, TINYFOL.identity(sig), 1, 2).lawful

    models = theory_models(TINYFOL, theory, 2)
    assert [m.size for m in models] == [1, 2]
    assert entails(TINYFOL, theory, TINYFOL.load_sentence(sig, read_one("(r (s x))")), 2)
    fixed_point = TINYFOL.load_sentence(sig, read_one("(= (s x) x)"))
    related = Theory(sig, {a for a in theory.axioms if a != fixed_point})
    assert not entails(TINYFOL, related, fixed_point, 2)


def test_theories():
    inst, theory = load_theory(textwrap.dedent("""\
        (theory demo
          (institution prop)
          (signature p q)
          (axioms p (implies p q)))
        """))
    assert inst is PROP
    assert theory.axioms == {p, Implies(p, q)}
    assert entails(PROP, theory, q, 0)
    assert not entails(PROP, theory, parse_sentence("(not q)"), 0)
    assert is_consistent(PROP, theory, 0)
    assert not is_consistent(PROP, Theory(theory.signature, theory.axioms | {FALSE}), 0)
    assert closure(PROP, theory, 0, 0).sentences == {p, q, TRUE}

    assert dump_theory(PROP, theory) == textwrap.dedent("""\
        (theory demo
          (institution prop)
          (signature p q)
          (axioms
            (implies p q)
            p))
        """)
    assert load_theory(dump_theory(PROP, theory))[1] == theory


def test_theory_file_errors():
    with pytest.raises(MalformedForm):
        load_theory("(theory t (signature p) (axioms q))")

    with pytest.raises(MalformedForm):
        load_theory("(theory t (axioms))")

    with pytest.raises(InstitutionError):
        institution("modal")


def test_theory_morphisms():
    _, source = load_theory("(theory s (signature p q) (axioms p (implies p q)))")
    strong = Theory(fs("a", "b", "c"), {prop_atom("a"), prop_atom("b")})
    weak = Theory(fs("a", "b", "c"), {prop_atom("a")})
    sigma = SignatureMap.of("pq", "abc", {"p": "a", "q": "b"})

    assert check_theory_morphism(PROP, TheoryMorphism(source, strong, sigma), 2, 0)
    assert not check_theory_morphism(PROP, TheoryMorphism(source, weak, sigma), 2, 0)
    assert check_theory_morphism(PROP, identity_theory_morphism(PROP, source), 2, 0)

    with pytest.raises(InvalidMorphism):
        check_theory_morphism(PROP, TheoryMorphism(strong, source, sigma), 2, 0)

    assert not check_theory_morphism(PROP, TheoryMorphism(source, strong, sigma), 0, 0)
    assert PROP.sentence_depth(parse_sentence("(implies a (not b))")) == 2


def test_lattice_of_theories():
    lattice = lattice_of_theories(PROP, "pq", 2)
    assert len(lattice) == 16
    assert check_theory_lattice(lattice).lawful

    inconsistent, valid = lattice.elements[0], lattice.elements[-1]
    assert lattice.model_set(inconsistent) == set()
    assert len(lattice.model_set(valid)) == 4
    assert lattice.leq(valid, inconsistent)
    assert FALSE in lattice.theory(inconsistent).sentences
    assert lattice.theory(valid).sentences == {s for s in PROP.sentences(fs("p", "q"), 2)
                                            if all(PROP.satisfies(fs(), m, s) for m in PROP.models(fs("p", "q")))}

    assert len(lattice_of_theories(PROP, "", 0)) == 2

    with pytest.raises(TooLarge):
        lattice_of_theories(PROP, "pqrs", 1)

    with pytest.raises(InstitutionError):
        lattice_of_theories(EQN, "p", 1)


def test_truth_lattice_reverses_theory_order():
    sig = fs("p")
    concepts = truth_lattice(PROP, sig, 1, 0)
    theories = lattice_of_theories(PROP, sig, 1)
    assert len(concepts) == len(theories) == 4

    by_models = {theories.model_set(e): e for e in theories.elements}
    for k in concepts:
        element = by_models[k.extent]
        assert theories.theory(element).sentences == k.intent
    for a in concepts:
        for b in concepts:
            assert concepts.leq(a, b) == theories.leq(by_models[b.extent], by_models[a.extent])


def test_corpus_theories():
    inst, t2 = load_theory_file(corpus_dir() / "t2.thy")
    assert inst is PROP
    assert t2.id == "t2"
    assert len(theory_models(PROP, t2, 0)) == 3


def test_eqn_theory_round_trip():
    text = textwrap.dedent("""\
        (theory idem
          (institution eqn)
          (signature (vars x) (symbol s (arity x)))
          (axioms
            (= (s (s x)) (s x))))
        """)
    inst, theory = load_theory(text)
    assert inst is EQN
    assert dump_theory(EQN, theory) == text
    assert is_consistent(EQN, theory, 2)

    sigma = TermLanguageMorphism.of(theory.signature, theory.signature, {"x": "x"}, {"s": "s"})
    assert check_theory_morphism(EQN, TheoryMorphism(theory, theory, sigma), 2, 2)
    # the axiom has depth 2, so it lies outside the depth-1 closure
    assert not check_theory_morphism(EQN, TheoryMorphism(theory, theory, sigma), 1, 2)
    assert check_theory_morphism(EQN, TheoryMorphism(theory, theory, sigma), None, 2)


def _random_prop_theory(rng, sig, depth):
    sentences = list(PROP.sentences(sig, depth))
    return Theory(sig, frozenset(rng.sample(sentences, rng.randint(0, 3))))


@pytest.mark.parametrize("seed", range(15))
def test_closure_is_idempotent(seed):
    rng = random.Random(seed)
    sig = fs("p", "q")
    theory = _random_prop_theory(rng, sig, 1)
    closed = closure(PROP, theory, 1, 0)
    assert theory.axioms <= closed.sentences
    assert closure(PROP, Theory(sig, closed.sentences), 1, 0) == closed


@pytest.mark.parametrize("seed", range(15))
def test_entailment_is_monotone(seed):
    rng = random.Random(seed)
    sig = fs("p", "q")
    smaller = _random_prop_theory(rng, sig, 1)
    larger = Theory(sig, smaller.axioms | _random_prop_theory(rng, sig, 1).axioms)
    for s in PROP.sentences(sig, 1):
        if entails(PROP, smaller, s, 0):
            assert entails(PROP, larger, s, 0)
