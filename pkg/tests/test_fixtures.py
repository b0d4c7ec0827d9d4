from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morsesum.cellcomplex import Complex, check_closed_3manifold, euler_characteristic, surface_report
from morsesum.errors import FixtureError
from morsesum.fixtures import (
    SHARED,
    cancel_greedily,
    fixture,
    grid_torus,
    layered_product,
    perfect_field_search,
    random_collapse_field,
    sphere13,
    standard_triangulation,
)
from morsesum.morse import critical_cells, is_perfect
from oracles import betti_by_ranks, has_cycle, rank_rational
from conftest import cached_fixture


@pytest.mark.parametrize("name", ["S3", "S2xS1", "T3", "S3#S3", "S2xS1#S2xS1", "S2xS1#T3", "T3#S2xS1"])
def test_known_betti_agree_with_rank_oracle(name):
    L = cached_fixture(name)
    assert check_closed_3manifold(L.complex)
    assert betti_by_ranks(L.complex, rank_rational) == tuple(L.known_betti)


def test_connected_sum_counts():
    A, B = cached_fixture("S2xS1"), cached_fixture("T3")
    L = cached_fixture("S2xS1#T3")
    a, b = A.complex.counts(), B.complex.counts()
    # one tetrahedron removed from each, a triangle's closure (4, 6, 4) identified
    assert L.complex.counts() == (a[0] + b[0] - 4, a[1] + b[1] - 6, a[2] + b[2] - 4, a[3] + b[3] - 2)
    assert L.meta["betti_A"] == (1, 1, 1, 1) and L.meta["betti_B"] == (1, 3, 3, 1)
    assert sum(1 for t in L.provenance.values() if t == SHARED) == 4 + 6 + 4


def test_self_sum_renames_second_summand():
    L = cached_fixture("S2xS1#S2xS1")
    assert L.meta["tags_A"] == ["S2xS1"] and L.meta["tags_B"] == ["S2xS1'"]


def test_unknown_fixture():
    with pytest.raises(FixtureError):
        standard_triangulation("K3")


def test_twisted_bundle_betti():
    L = fixture("S2xS1~")
    assert tuple(L.known_betti) == (1, 1, 0, 0)


def test_layered_product_of_circle_is_torus():
    circle = [(0, 1), (1, 2), (0, 2)]
    X = Complex.from_simplices(layered_product(circle))
    rep = surface_report(X)
    assert rep.closed and rep.orientable and rep.genus == 1
    assert euler_characteristic(Complex.from_simplices(grid_torus(4))) == 0


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["S3", "S2xS1", "T3"]), st.integers(0, 10**6), st.floats(0, 0.5))
def test_random_collapse_fields_are_acyclic(name, seed, stop):
    X = cached_fixture(name).complex
    V = random_collapse_field(X, random.Random(seed), stop_prob=stop)
    V.check(X)
    assert not has_cycle(V, X)
    counts = critical_cells(V, X).counts(3)
    # weak Morse inequalities against the known Betti numbers
    b = cached_fixture(name).known_betti
    assert all(counts[k] >= b[k] for k in range(4))
    assert sum((-1) ** k * counts[k] for k in range(4)) == 0


def test_cancel_greedily_reaches_target_on_sphere():
    X = cached_fixture("S3").complex
    V = random_collapse_field(X, random.Random(5), stop_prob=0.3)
    W = cancel_greedily(V, X, (1, 0, 0, 1), random.Random(5))
    assert critical_cells(W, X).counts(3) == (1, 0, 0, 1)
    assert not has_cycle(W, X)


def test_summand_labels_must_match_complex():
    L = cached_fixture("S2xS1#T3")
    with pytest.raises(FixtureError):
        perfect_field_search(cached_fixture("T3").complex, summands=L)


def test_adapted_search_is_deterministic_and_perfect():
    L = cached_fixture("S2xS1#T3")
    V1 = perfect_field_search(L.complex, seed=7, summands=L)
    V2 = perfect_field_search(L.complex, seed=7, summands=L)
    assert V1 == V2 and is_perfect(V1, L.complex)


def test_sphere13_data():
    L = sphere13()
    X = L.complex
    assert X.counts() == (13, 33, 22)
    assert betti_by_ranks(X, rank_rational) == (1, 0, 1)
    assert not has_cycle(L.gradient, X)
    crit = critical_cells(L.gradient, X)
    assert crit.counts(2) == (1, 3, 4)
    assert X.labels[L.meta["critical"]["v9"]] == "v9"
