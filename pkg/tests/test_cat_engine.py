import random

import pytest

from iffkit.cat_engine import (
    ConeKind,
    FinCategory,
    FinFunctor,
    FinSetMap,
    FinSetObj,
    IllFormed,
    NotACone,
    category_of_maps,
    check_category_laws,
    check_functor,
    check_naturality,
    classify_morphism,
    coequalizer_diagram,
    colimit,
    compose_functors,
    compose_maps,
    equalizer_diagram,
    finset_category,
    identity_functor,
    identity_map,
    identity_transformation,
    limit,
    product_diagram,
    pullback_diagram,
    pushout_diagram,
    verify_currying,
    verify_universal_property,
)
from iffkit.suites import SuiteConfig, cat_engine_suite, component_count, random_diagram


def fmap(source, target, mapping):
    return FinSetMap.of(FinSetObj(frozenset(source)), FinSetObj(frozenset(target)), mapping)


def test_maps():
    f = fmap({1, 2}, {"x", "y"}, {1: "x", 2: "x"})
    g = fmap({"x", "y"}, {True}, {"x": True, "y": True})
    assert compose_maps(g, f).table == {1: True, 2: True}
    assert compose_maps(f, identity_map(f.source)) == f

    with pytest.raises(IllFormed):
        fmap({1, 2}, {"x"}, {1: "x"})

    with pytest.raises(IllFormed):
        fmap({1}, {"x"}, {1: "z"})

    with pytest.raises(IllFormed):
        compose_maps(f, g)


def test_pushout():
    f = fmap({0}, {0, 1}, {0: 0})
    g = fmap({0}, {0, 1}, {0: 0})
    d = pushout_diagram(f, g)
    cocone = colimit(d)
    assert len(cocone.apex) == 3
    assert cocone.legs["b"](0) == ("a", 0)
    assert cocone.legs["c"](1) == ("c", 1)
    assert verify_universal_property(d, cocone.apex, cocone.legs, "colimit")
    assert verify_universal_property(d, cocone.apex, cocone.legs, "colimit", bound=2, exhaustive=True)


def test_pullback():
    f = fmap({1, 2, 3}, {"x", "y"}, {1: "x", 2: "x", 3: "y"})
    g = fmap({"p", "q"}, {"x", "y"}, {"p": "x", "q": "y"})
    d = pullback_diagram(f, g)
    cone = limit(d)
    assert cone.apex.elements == {(1, "p", "x"), (2, "p", "x"), (3, "q", "y")}
    assert verify_universal_property(d, cone.apex, cone.legs, ConeKind.LIMIT)
    assert verify_universal_property(d, cone.apex, cone.legs, ConeKind.LIMIT, bound=2, exhaustive=True)


def test_product():
    d = product_diagram(FinSetObj.of(1, 2), FinSetObj.of("a", "b", "c"))
    assert len(limit(d).apex) == 6
    assert len(colimit(d).apex) == 5


def test_wrong_apexes_rejected():
    f = fmap({0}, {0, 1}, {0: 0})
    d = pushout_diagram(f, f)
    good = colimit(d)

    padded = FinSetObj(good.apex.elements | {"junk"})
    legs = {n: FinSetMap.of(leg.source, padded, leg.table) for n, leg in good.legs.items()}
    assert not verify_universal_property(d, padded, legs, "colimit")
    assert not verify_universal_property(d, padded, legs, "colimit", bound=2, exhaustive=True)

    point = FinSetObj.of("*")
    collapsed = {n: FinSetMap.of(d.objects[n], point, {x: "*" for x in d.objects[n]})
                 for n in d.shape.nodes}
    assert not verify_universal_property(d, point, collapsed, "colimit")

    cone = limit(d)
    doubled = FinSetObj(frozenset((tag, fam) for tag in "uv" for fam in cone.apex))
    dlegs = {n: FinSetMap.of(doubled, d.objects[n], {(t, fam): leg(fam) for t, fam in doubled.elements})
             for n, leg in cone.legs.items()}
    assert not verify_universal_property(d, doubled, dlegs, "limit")


def test_non_commuting_legs():
    f = fmap({0}, {0, 1}, {0: 0})
    g = fmap({0}, {0, 1}, {0: 1})
    d = pushout_diagram(f, g)
    apex = FinSetObj.of("l", "r")
    legs = {"a": fmap({0}, {"l", "r"}, {0: "l"}),
            "b": fmap({0, 1}, {"l", "r"}, {0: "l", 1: "r"}),
            "c": fmap({0, 1}, {"l", "r"}, {0: "r", 1: "r"})}
    with pytest.raises(NotACone):
        verify_universal_property(d, apex, legs, "colimit")


@pytest.mark.parametrize("seed", range(50))
def test_random_diagrams(seed):
    rng = random.Random(seed)
    for _ in range(10):
        d = random_diagram(rng)
        assert len(d.shape.nodes) <= 4
        assert all(1 <= len(s) <= 4 for s in d.objects.values())

        cocone = colimit(d)
        assert len(cocone.apex) == component_count(d)
        assert verify_universal_property(d, cocone.apex, cocone.legs, "colimit", bound=4)

        cone = limit(d)
        assert verify_universal_property(d, cone.apex, cone.legs, "limit", bound=4)


def test_cat_engine_suite():
    report = cat_engine_suite(SuiteConfig(cases=50))
    assert report.lawful
    assert report.checked >= 500


def test_finset_category_laws():
    c = finset_category([FinSetObj.of(0), FinSetObj.of(0, 1)])
    assert len(c.mors) == 8
    assert check_category_laws(c).lawful
    assert check_category_laws(c, sample=20, seed=1).lawful
    assert check_functor(identity_functor(c)).lawful
    assert check_naturality(identity_transformation(identity_functor(c)))


def test_category_of_maps_closes():
    swap = fmap({0, 1}, {0, 1}, {0: 1, 1: 0})
    c = category_of_maps([swap])
    assert len(c.mors) == 2
    assert check_category_laws(c).lawful


def _z2(bad=False):
    comp = {("id", "id"): "id", ("id", "m"): "m", ("m", "id"): "id" if bad else "m", ("m", "m"): "id"}
    return FinCategory(("A",), ("id", "m"), {"id": "A", "m": "A"}, {"id": "A", "m": "A"},
                       comp, {"A": "id"})


def test_broken_category():
    assert check_category_laws(_z2()).lawful
    assert "right-identity" in check_category_laws(_z2(bad=True)).laws_violated()


def test_broken_functor():
    c = _z2()
    F = FinFunctor(c, c, {"A": "A"}, {"id": "m", "m": "m"})
    assert "functor-identity" in check_functor(F).laws_violated()


def test_classify_morphisms():
    one, two = FinSetObj.of(0), FinSetObj.of(0, 1)
    c = finset_category([one, two])
    inject = FinSetMap.of(one, two, {0: 1})
    collapse = FinSetMap.of(two, one, {0: 0, 1: 0})

    assert classify_morphism(c, inject).mono and not classify_morphism(c, inject).epi
    assert classify_morphism(c, collapse).epi and not classify_morphism(c, collapse).mono
    assert classify_morphism(c, identity_map(two)).iso


def test_currying():
    assert verify_currying(FinSetObj.of(0, 1), FinSetObj.of("a"), FinSetObj.of("x", "y"))
    assert verify_currying(FinSetObj.of(0), FinSetObj.of("a", "b"), FinSetObj.of("x", "y"))


def test_equalizer_and_coequalizer():
    f = fmap({0}, {0, 1}, {0: 0})
    g = fmap({0}, {0, 1}, {0: 1})
    assert len(limit(equalizer_diagram(f, g)).apex) == 0
    assert len(colimit(coequalizer_diagram(f, g)).apex) == 1
    assert len(limit(equalizer_diagram(f, f)).apex) == 1

    with pytest.raises(IllFormed):
        equalizer_diagram(f, fmap({1}, {0, 1}, {1: 0}))


def test_compose_functors():
    c = _z2()
    flip = FinFunctor(c, c, {"A": "A"}, {"id": "id", "m": "m"})
    both = compose_functors(flip, identity_functor(c))
    assert both.on_morphisms == flip.on_morphisms
    assert check_functor(both).lawful
