import random
import textwrap

import pytest

from iffkit.ifca import (
    Classification,
    ClassificationError,
    FormalConcept,
    Infomorphism,
    LocalLogic,
    Sequent,
    check_bond,
    check_infomorphism,
    check_lattice_laws,
    check_local_logic,
    compose_infomorphisms,
    concepts,
    dump_concepts,
    extent,
    identity_infomorphism,
    intent,
    load_classification,
    load_classification_file,
    truth_classification,
)
from iffkit.iffkit_utils import corpus_dir, powerset
from iffkit.institution import PROP, prop_atom
from iffkit.sexpr import MalformedForm


def fs(*items):
    return frozenset(items)


@pytest.fixture
def diamond():
    return load_classification_file(corpus_dir() / "diamond.ctx")


def test_diamond(diamond):
    lattice = concepts(diamond)
    assert [k.extent for k in lattice] == [fs(), fs("b"), fs("a"), fs("a", "b")]
    assert lattice.top == FormalConcept(fs("a", "b"), fs())
    assert lattice.bottom == FormalConcept(fs(), fs("t1", "t2"))
    assert check_lattice_laws(lattice).lawful

    assert dump_concepts(lattice) == textwrap.dedent("""\
        (concept (extent) (intent t1 t2))
        (concept (extent b) (intent t2))
        (concept (extent a) (intent t1))
        (concept (extent a b) (intent))
        """)


def test_meet_and_join(diamond):
    lattice = concepts(diamond)
    a, b = lattice.concepts[2], lattice.concepts[1]
    assert lattice.meet(a, b) == lattice.bottom
    assert lattice.join(a, b) == lattice.top
    assert lattice.leq(lattice.bottom, a) and not lattice.leq(a, b)


def _random_classification(rng):
    tokens = [f"g{i}" for i in range(rng.randint(0, 5))]
    types = [f"m{i}" for i in range(rng.randint(0, 5))]
    incidence = {(g, m) for g in tokens for m in types if rng.random() < 0.5}
    return Classification.of(tokens, types, incidence)


def _lectic_key(c, ext):
    return tuple(a in ext for a in c.tokens)


@pytest.mark.parametrize("seed", range(30))
def test_next_closure_matches_brute_force(seed):
    c = _random_classification(random.Random(seed))
    lattice = concepts(c)

    brute = {extent(c, intent(c, x)) for x in powerset(c.tokens)}
    found = [k.extent for k in lattice]
    assert set(found) == brute
    assert len(found) == len(brute)
    assert found == sorted(found, key=lambda e: _lectic_key(c, e))
    assert all(k.intent == intent(c, k.extent) for k in lattice)
    assert check_lattice_laws(lattice).lawful


def test_classification_errors():
    with pytest.raises(ClassificationError):
        Classification.of(["a", "a"], ["t"], [])

    with pytest.raises(ClassificationError):
        Classification.of(["a"], ["t"], [("a", "u")])

    with pytest.raises(MalformedForm):
        load_classification("(classification c (tokens a) (types t) (incidence (b t)))")

    with pytest.raises(MalformedForm):
        load_classification("(classification c (tokens a))")


@pytest.fixture
def pair():
    return Classification.of(["u"], ["s1", "s2"], [("u", "s1")], "pair")


def test_infomorphisms(diamond, pair):
    f = Infomorphism(diamond, pair, {"t1": "s1", "t2": "s2"}, {"u": "a"})
    assert check_infomorphism(f)
    assert not check_infomorphism(Infomorphism(diamond, pair, f.type_map, {"u": "b"}))

    assert compose_infomorphisms(f, identity_infomorphism(diamond)) == f
    assert compose_infomorphisms(identity_infomorphism(pair), f) == f
    assert check_infomorphism(identity_infomorphism(diamond))

    with pytest.raises(ClassificationError):
        compose_infomorphisms(f, f)

    with pytest.raises(ClassificationError):
        check_infomorphism(Infomorphism(diamond, pair, {"t1": "s1"}, {"u": "a"}))


def test_bonds(diamond):
    assert check_bond(diamond, diamond, diamond.incidence)
    assert not check_bond(diamond, diamond, {("a", "t3")})

    both = Classification.of(["u"], ["s1", "s2"], [("u", "s1"), ("u", "s2")])
    assert not check_bond(diamond, both, {("a", "s1")})


def test_local_logic(diamond):
    either = Sequent(fs(), fs("t1", "t2"))
    not_both = Sequent(fs("t1", "t2"), fs())
    normal = fs("a", "b")

    assert check_local_logic(LocalLogic(diamond, fs(either, not_both), normal)).complete
    assert check_local_logic(LocalLogic(diamond, fs(either, not_both), normal)).sound

    weak = check_local_logic(LocalLogic(diamond, fs(either), normal))
    assert weak.sound and not weak.complete

    wrong = check_local_logic(LocalLogic(diamond, fs(Sequent(fs("t1"), fs("t2"))), normal))
    assert not wrong.sound

    with pytest.raises(ClassificationError):
        check_local_logic(LocalLogic(diamond, fs(), normal), type_bound=1)


def test_sequent_holds_for():
    s = Sequent(fs("p"), fs("q", "r"))
    assert s.holds_for(fs())
    assert s.holds_for(fs("p", "r"))
    assert not s.holds_for(fs("p"))


def test_truth_classification():
    p = prop_atom("p")
    c = truth_classification(PROP, fs("p"), 0, 0, [p])
    assert c.tokens == (fs(), fs("p"))
    assert c.incidence == {(fs("p"), p)}
    assert len(concepts(c)) == 2


@pytest.mark.parametrize("seed", range(30))
def test_galois_laws(seed):
    rng = random.Random(seed)
    tokens = [f"g{i}" for i in range(rng.randint(0, 6))]
    types = [f"m{i}" for i in range(rng.randint(0, 6))]
    c = Classification.of(tokens, types, [(g, m) for g in tokens for m in types if rng.random() < 0.5])

    for _ in range(10):
        a2 = frozenset(g for g in c.tokens if rng.random() < 0.5)
        a1 = frozenset(g for g in a2 if rng.random() < 0.5)
        assert a2 <= extent(c, intent(c, a2))
        assert intent(c, a2) <= intent(c, a1)
        assert intent(c, extent(c, intent(c, a2))) == intent(c, a2)

        b2 = frozenset(m for m in c.types if rng.random() < 0.5)
        b1 = frozenset(m for m in b2 if rng.random() < 0.5)
        assert b2 <= intent(c, extent(c, b2))
        assert extent(c, b2) <= extent(c, b1)
        assert extent(c, intent(c, extent(c, b2))) == extent(c, b2)


def _random_infomorphism(rng, a, name):
    """An infomorphism out of `a` into a new classification built to satisfy it."""
    types = [f"{name}t{i}" for i in range(len(a.types) + rng.randint(0, 2))]
    type_map = dict(zip(a.types, rng.sample(types, len(a.types))))
    tokens = [f"{name}g{i}" for i in range(rng.randint(0, 4))] if a.tokens else []
    token_map = {b: rng.choice(a.tokens) for b in tokens}
    preimage = {t: s for s, t in type_map.items()}
    incidence = [(b, t) for b in tokens for t in types
                 if (a.holds(token_map[b], preimage[t]) if t in preimage else rng.random() < 0.5)]
    return Infomorphism(a, Classification.of(tokens, types, incidence, name), type_map, token_map)


@pytest.mark.parametrize("seed", range(30))
def test_composition_keeps_the_fundamental_property(seed):
    rng = random.Random(seed)
    a = _random_classification(rng)
    f = _random_infomorphism(rng, a, "b")
    g = _random_infomorphism(rng, f.target, "c")
    assert check_infomorphism(f) and check_infomorphism(g)

    gf = compose_infomorphisms(g, f)
    assert (gf.source, gf.target) == (a, g.target)
    assert check_infomorphism(gf)
