from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morsesum.errors import AmbiguousGrouping, NotSeparable, PathNotUnique
from morsesum.fixtures import perfect_field_search
from morsesum.grouping import (
    group_critical_cells,
    is_cocycle,
    odd_components,
    parity_matrix,
    solid_torus,
    top_path_to,
)
from morsesum.morse import critical_cells
from oracles import rank_mod2
from conftest import cached_fixture


def _field(name, seed):
    L = cached_fixture(name)
    if "#" in name:
        return L, perfect_field_search(L.complex, seed=seed, summands=L)
    return L, perfect_field_search(L.complex, seed=seed)


@pytest.mark.parametrize("name, n", [("S2xS1", 1), ("T3", 3), ("S2xS1#T3", 4)])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_parity_matrix_is_nondegenerate(name, n, seed):
    # mod-2 intersection of H_1 and H_2 is a perfect pairing on a closed manifold
    L, V = _field(name, seed)
    data = parity_matrix(V, L.complex)
    assert len(data.ones) == len(data.twos) == n
    cols = [{a: data.matrix[(a, b)] for a in data.ones} for b in data.twos]
    assert rank_mod2(cols) == n
    assert len(data.rows()) == n and all(len(r) == n for r in data.rows())


@pytest.mark.parametrize("name", ["S2xS1", "T3"])
def test_one_cell_cochains_are_cocycles(name):
    L, V = _field(name, 0)
    data = parity_matrix(V, L.complex)
    for rep in data.reps.values():
        ok, bad = is_cocycle(rep, L.complex)
        assert ok, bad


@pytest.mark.parametrize("name", ["S2xS1", "T3"])
def test_solid_tori_around_critical_two_cells(name):
    L, V = _field(name, 1)
    X = L.complex
    (top,) = critical_cells(V, X)[3]
    for c2 in critical_cells(V, X)[2]:
        region = solid_torus(V, c2, X)
        assert region.torus_ok and region.euler == 0
        assert all(p.start == top for p in region.three_paths)
        region.core.validate(X)


def test_top_path_from_critical_cell_is_trivial():
    L, V = _field("S3", 0)
    X = L.complex
    (top,) = critical_cells(V, X)[3]
    p = top_path_to(V, X, top)
    assert p.start == top and p.end == top


def test_solid_torus_rejects_noncritical_cell():
    L, V = _field("S2xS1", 0)
    X = L.complex
    s, _ = min(V.pairs, key=lambda p: (X.dim(p[0]) != 2, p))
    with pytest.raises(PathNotUnique):
        solid_torus(V, s, X)


def test_prime_manifold_is_not_separable():
    L, V = _field("S2xS1", 0)
    with pytest.raises(NotSeparable):
        group_critical_cells(V, L.complex)
    L, V = _field("T3", 0)
    with pytest.raises(NotSeparable):
        group_critical_cells(V, L.complex)


def test_sphere_grouping_is_trivial():
    L, V = _field("S3", 0)
    g = group_critical_cells(V, L.complex)
    assert g.components == []
    assert g.side_A == {g.crit3} and g.side_B == {g.crit0}
    assert g.cells_A() == g.cells_B() == frozenset()


def test_two_components_are_grouped_automatically():
    L, V = _field("S2xS1#S2xS1", 0)
    X = L.complex
    g = group_critical_cells(V, X)
    assert len(g.components) == 2
    assert g.crit3 in g.side_A and g.crit0 in g.side_B
    mid = {c for d in (1, 2) for c in critical_cells(V, X)[d]}
    assert g.cells_A() | g.cells_B() == mid and not (g.cells_A() & g.cells_B())
    d = g.as_dict()
    assert d["critical_3_cell"] == g.crit3 and len(d["parity"]) == 4


def test_many_components_need_a_selector():
    L = cached_fixture("S2xS1#T3")
    X = L.complex
    V = next(
        W for s in range(20)
        if len(odd_components(parity_matrix(W := perfect_field_search(X, seed=s, summands=L), X))) > 2
    )
    with pytest.raises(AmbiguousGrouping) as err:
        group_critical_cells(V, X)
    assert len(err.value.details["components"]) > 2
    pick = [c for c in critical_cells(V, X).all()
            if X.dim(c) in (1, 2) and L.provenance[c] in L.meta["tags_B"]]
    g = group_critical_cells(V, X, choose=pick)
    assert g.cells_B() == frozenset(pick)
    g2 = group_critical_cells(V, X, choose=lambda comps: [i for i, c in enumerate(comps) if c & set(pick)])
    assert g2.side_B == g.side_B and g2.side_A == g.side_A


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["S2xS1#S2xS1", "S2xS1#T3", "T3#S2xS1"]), st.integers(0, 10_000))
def test_components_never_mix_summands(name, seed):
    L, V = _field(name, seed)
    for comp in odd_components(parity_matrix(V, L.complex)):
        assert len({L.provenance[c] for c in comp}) == 1
