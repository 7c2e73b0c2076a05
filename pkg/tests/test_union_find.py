import random

import pytest

from iffkit.union_find import UnionFind


def test_least_member_is_representative():
    uf = UnionFind("abcde")
    uf.union("d", "b")
    uf.union("e", "d")
    assert uf.find("e") == "b"
    uf.union("e", "a")
    assert uf.find("d") == "a"
    assert uf.classes() == {"a": ["a", "b", "d", "e"], "c": ["c"]}
    assert len(uf) == 2


def test_find_adds_singletons():
    uf: UnionFind[str] = UnionFind()
    assert uf.find("x") == "x"
    assert len(uf) == 1


def _components(nodes, edges):
    # breadth-first oracle
    adjacent = {n: set() for n in nodes}
    for a, b in edges:
        adjacent[a].add(b)
        adjacent[b].add(a)
    seen, result = set(), []
    for n in nodes:
        if n in seen:
            continue
        frontier, comp = [n], set()
        while frontier:
            x = frontier.pop()
            if x not in comp:
                comp.add(x)
                frontier.extend(adjacent[x] - comp)
        seen |= comp
        result.append(frozenset(comp))
    return set(result)


@pytest.mark.parametrize("seed", range(20))
def test_matches_components(seed):
    rng = random.Random(seed)
    nodes = [chr(ord("a") + i) for i in range(rng.randint(1, 10))]
    edges = [(rng.choice(nodes), rng.choice(nodes)) for _ in range(rng.randint(0, 8))]

    uf = UnionFind(nodes)
    for a, b in edges:
        uf.union(a, b)

    classes = uf.classes()
    assert {frozenset(members) for members in classes.values()} == _components(nodes, edges)
    assert all(rep == min(members) for rep, members in classes.items())
