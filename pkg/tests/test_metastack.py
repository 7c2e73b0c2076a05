import random
import textwrap

import pytest

from iffkit.iffkit_utils import corpus_dir
from iffkit.metastack import (
    FunctorialityCase,
    ImageEscapesTarget,
    LeveledFunction,
    LeveledRelation,
    LeveledSet,
    LevelMismatch,
    NotASubset,
    check_kernel,
    compose,
    dump_leveled,
    function_graph,
    identity,
    is_abridgment,
    is_restriction,
    is_subobject,
    load_leveled,
    load_leveled_file,
    pfn2ftn,
    pfn2rel,
    specialize,
    verify_inclusion_functoriality,
)
from iffkit.registry import Metalevel, load_vocabulary


LRG, SML = Metalevel.LRG, Metalevel.SML


def lset(level, *elements, id=""):
    return LeveledSet(level, frozenset(elements), id)


def test_specialize_set():
    upper = lset(LRG, "a", "b", "c")
    lower = specialize(upper, {"a", "c"})
    assert lower == lset(SML, "a", "c")
    assert is_subobject(lower, upper)
    assert not is_subobject(lset(SML, "a", "d"), upper)

    with pytest.raises(NotASubset):
        specialize(upper, {"d"})


def test_specialize_function():
    a, b = lset(LRG, 1, 2, 3), lset(LRG, "x", "y")
    f = LeveledFunction.of(LRG, a, b, {1: "x", 2: "y", 3: "x"}, id="f")
    g = specialize(f, {1, 3}, {"x"})
    assert g.level is SML
    assert g.table == {1: "x", 3: "x"}
    assert is_restriction(g, f)

    with pytest.raises(ImageEscapesTarget):
        specialize(f, {1, 2}, {"x"})


def test_restriction_fails_on_disagreement():
    a, b = lset(LRG, 1, 2), lset(LRG, "x", "y")
    f = LeveledFunction.of(LRG, a, b, {1: "x", 2: "y"})
    g = LeveledFunction.of(SML, lset(SML, 1), lset(SML, "x", "y"), {1: "y"})
    assert not is_restriction(g, f)


def test_specialize_relation():
    a = lset(LRG, 1, 2, 3)
    r = LeveledRelation(LRG, a, a, frozenset({(1, 2), (2, 3), (3, 3)}))
    s = specialize(r, {2, 3}, {3})
    assert s.extent == {(2, 3), (3, 3)}
    assert is_abridgment(s, r)

    missing = LeveledRelation(SML, s.left, s.right, frozenset({(3, 3)}))
    assert not is_abridgment(missing, r)


def test_level_checks():
    with pytest.raises(LevelMismatch):
        is_subobject(lset(SML, 1), lset(Metalevel.VLRG, 1))

    with pytest.raises(LevelMismatch):
        specialize(lset(SML, 1), {1})

    with pytest.raises(LevelMismatch):
        LeveledFunction.of(LRG, lset(SML, 1), lset(LRG, 1), {1: 1})

    with pytest.raises(ImageEscapesTarget):
        LeveledFunction.of(LRG, lset(LRG, 1), lset(LRG, 2), {1: 3})


@pytest.mark.parametrize("seed", range(25))
def test_random_specializations(seed):
    rng = random.Random(seed)
    src = lset(LRG, *range(rng.randint(1, 6)))
    tgt = lset(LRG, *"abcde"[:rng.randint(1, 5)])
    f = LeveledFunction.of(LRG, src, tgt, {x: rng.choice(sorted(tgt.elements)) for x in src})
    r = LeveledRelation(LRG, src, tgt, frozenset(
        (x, y) for x in src for y in tgt if rng.random() < 0.4))

    chosen = {x for x in src if rng.random() < 0.6}
    image = {f(x) for x in chosen} | {y for y in tgt if rng.random() < 0.5}
    g = specialize(f, chosen, image)
    assert is_subobject(g.source, src)
    assert is_restriction(g, f)

    right = {y for y in tgt if rng.random() < 0.6}
    s = specialize(r, chosen, right)
    assert is_abridgment(s, r)

    # dropping one induced pair breaks the abridgment
    if s.extent:
        victim = sorted(s.extent, key=str)[0]
        broken = LeveledRelation(SML, s.left, s.right, s.extent - {victim})
        assert not is_abridgment(broken, r)


@pytest.mark.parametrize("seed", range(25))
def test_specialization_is_transitive(seed):
    rng = random.Random(seed)
    UR, VLRG = Metalevel.UR, Metalevel.VLRG

    def some(xs):
        return {x for x in xs if rng.random() < 0.6}

    src = lset(UR, *range(rng.randint(1, 6)))
    tgt = lset(UR, *"abcde"[:rng.randint(1, 5)])
    f = LeveledFunction.of(UR, src, tgt, {x: rng.choice(sorted(tgt.elements)) for x in src})
    r = LeveledRelation(UR, src, tgt, frozenset((x, y) for x in src for y in tgt if rng.random() < 0.4))

    s3 = some(src)
    t3 = {f(x) for x in s3} | some(tgt)
    s2 = some(s3)
    t2 = {f(x) for x in s2} | some(t3)
    stepwise = specialize(specialize(f, s3, t3), s2, t2)
    assert stepwise == specialize(f, s2, t2, level=LRG)
    assert stepwise.level is LRG

    l3, r3 = some(src), some(tgt)
    l2, r2 = some(l3), some(r3)
    assert specialize(specialize(r, l3, r3), l2, r2) == specialize(r, l2, r2, level=LRG)
    assert specialize(specialize(src, s3), s2) == specialize(src, s2, level=LRG)

    assert specialize(specialize(src, s3, level=VLRG), s2) == specialize(src, s2, level=LRG)

    with pytest.raises(LevelMismatch):
        specialize(src, s3, level=UR)


def test_metalevel_out_of_range():
    with pytest.raises(LevelMismatch):
        LeveledSet(5, frozenset({1}))
    with pytest.raises(LevelMismatch):
        LeveledSet(0, frozenset({1}))


def test_partial_functions():
    a, b = lset(SML, 1, 2, 3), lset(SML, "x")
    f = LeveledFunction.of(SML, a, b, {1: "x"}, partial=True)
    assert not f.total
    total = pfn2ftn(f)
    assert total.total and total.source.elements == {1}
    assert function_graph(f).extent == {(1, "x")}
    assert pfn2rel(f) == function_graph(f)


def test_compose_and_functoriality():
    a, b, c = lset(LRG, 1, 2), lset(LRG, "x", "y"), lset(LRG, "t", "u")
    f = LeveledFunction.of(LRG, a, b, {1: "x", 2: "y"})
    g = LeveledFunction.of(LRG, b, c, {"x": "t", "y": "u"})
    gf = compose(g, f)
    assert gf.table == {1: "t", 2: "u"}
    assert compose(identity(b), f) == f

    f_k = specialize(f, {1}, {"x"})
    g_k = specialize(g, {"x"}, {"t"})
    assert verify_inclusion_functoriality([FunctorialityCase((f_k, g_k), (f, g))])

    g_k2 = specialize(g, {"x"}, {"t", "u"})
    wrong = LeveledFunction.of(SML, f_k.source, g_k2.target, {1: "u"})
    assert not verify_inclusion_functoriality([FunctorialityCase((f_k, g_k2), (f, g), wrong)])


def test_file_format(tmp_path):
    text = textwrap.dedent("""\
        (set lrg a (1 2 3))
        (set lrg b (x y))
        (function lrg f a b ((1 x) (2 y) (3 x)))
        (relation lrg r a b ((1 y)))
        """)
    store = load_leveled(text)
    assert store["f"]("3") == "x"
    assert store["r"].extent == {("1", "y")}
    assert load_leveled(dump_leveled(store.values())) == store

    path = tmp_path / "sets.lvl"
    path.write_text(text)
    assert load_leveled_file(path) == store


def test_kernel_matches_vocabulary():
    assert check_kernel(load_vocabulary(corpus_dir() / "ur.vocab")) == []
