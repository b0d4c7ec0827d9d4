from __future__ import annotations

import pytest

from morsesum.cellcomplex import check_3manifold_with_boundary, euler_characteristic, extract_boundary
from morsesum.errors import PairingConflict, RepairLoopLimit
from morsesum.fixtures import perfect_field_search
from morsesum.grouping import group_critical_cells
from morsesum.morse import critical_cells
from morsesum.separation import (
    K,
    S,
    U,
    boundary_defects,
    build_separating_sphere,
    initial_region,
    prepare,
    region_interior,
    straddling,
)
from oracles import betti_by_ranks, has_cycle, rank_mod2
from conftest import cached_fixture


def _setup(name, seed=0):
    L = cached_fixture(name)
    X = L.complex
    V = perfect_field_search(X, seed=seed, summands=L)
    return L, X, V, group_critical_cells(V, X)


@pytest.fixture(scope="module")
def sum_of_spheres():
    L, X, V, g = _setup("S3#S3")
    return L, X, V, g, build_separating_sphere(V, g, X, check=True)


@pytest.fixture(scope="module")
def sum_of_bundles():
    L, X, V, g = _setup("S2xS1#S2xS1")
    return L, X, V, g, build_separating_sphere(V, g, X)


def test_interior_is_upward_closed_and_contains_seeds():
    L, X, V, g = _setup("S2xS1#S2xS1")
    seeds = g.side_A
    W = region_interior(V, X, seeds)
    assert seeds <= W
    for c in W:
        # cofaces of interior cells are interior unless they are a tail's head
        assert all(t in W for t in X.cofacets(c) if V.down(t) != c or V.up(c) == t)
    assert not (W & (g.side_B))


def test_initial_and_prepared_colors():
    L, X, V, g = _setup("S3#S3")
    st0 = initial_region(V, g, X)
    assert st0.stage == "initial"
    st1 = prepare(st0)
    Z = st1.complex
    assert set(st1.colors) == set(Z.cells(0))
    assert set(st1.colors.values()) <= {U, K}
    assert straddling(st1)
    assert not has_cycle(st1.field, Z)


def test_certificate_on_sum_of_spheres(sum_of_spheres):
    L, X, V, g, res = sum_of_spheres
    cert = res.certificate
    assert cert.ok and cert.euler == 2 and cert.closed and cert.connected and cert.orientable
    assert cert.critical_B == (1, 0, 0, 0)
    assert cert.chi_region_B == 1 and cert.chi_double_B == 0
    # independent look at the surface: homology of a 2-sphere
    assert betti_by_ranks(cert.surface, rank_mod2) == (1, 0, 1)
    assert not straddling(res.state)
    assert set(res.state.colors.values()) >= {S}


def test_checked_log_records_betti(sum_of_spheres):
    L, X, V, g, res = sum_of_spheres
    kinds = [e["kind"] for e in res.state.log]
    assert kinds[0] == "initial" and "prepare" in kinds and "cut" in kinds
    for e in res.state.log[1:]:
        assert tuple(e["betti"]) == (1, 0, 0, 1)
        assert e["acyclic"]


def test_sum_of_bundles_sides(sum_of_bundles):
    L, X, V, g, res = sum_of_bundles
    cert, RA, RB, Z, W = res
    assert cert.ok
    assert cert.critical_B == (1, 1, 1, 0)
    assert cert.critical_A == (0, 1, 1, 1)
    assert RA.cells | RB.cells == frozenset(Z.cells())
    assert RA.cells & RB.cells == frozenset(cert.surface.cells())
    for R in (RA, RB):
        assert check_3manifold_with_boundary(R.as_complex())
        assert euler_characteristic(extract_boundary(R)) == 2
    # the subdivided complex and transported field stay valid
    assert betti_by_ranks(Z, rank_mod2) == (1, 2, 2, 1)
    assert not has_cycle(W, Z)
    assert critical_cells(W, Z).counts(3) == critical_cells(V, X).counts(3)


def test_no_arrow_enters_the_region_from_the_sphere(sum_of_bundles):
    L, X, V, g, res = sum_of_bundles
    surface = frozenset(res.certificate.surface.cells())
    inner = res.region_A.cells - surface
    for s, t in res.field.pairs:
        assert not (s in surface and t in inner)


def test_local_strategy_and_loop_limit():
    L, X, V, g = _setup("S3#S3")
    assert boundary_defects(prepare(initial_region(V, g, X)))
    with pytest.raises(RepairLoopLimit) as err:
        build_separating_sphere(V, g, X, strategy="local", max_iter=0)
    assert err.value.details["remaining"]
    res = build_separating_sphere(V, g, X, strategy="local", max_iter=2)
    assert res.certificate.ok
    assert any(e["kind"].startswith("repair_") for e in res.state.log)


def test_unknown_strategy():
    L, X, V, g = _setup("S3#S3")
    with pytest.raises(ValueError):
        build_separating_sphere(V, g, X, strategy="nope")


def test_forced_grouping_of_prime_manifold_conflicts():
    L = cached_fixture("T3")
    X = L.complex
    V = perfect_field_search(X, seed=4)
    g = group_critical_cells(V, X, choose=lambda comps: [0] if len(comps) > 1 else [])
    assert len(g.components) > 1
    with pytest.raises(PairingConflict):
        build_separating_sphere(V, g, X)
