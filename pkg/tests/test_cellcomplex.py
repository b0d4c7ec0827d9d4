from __future__ import annotations

import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morsesum.cellcomplex import (
    Complex,
    Region,
    bisect_2cell,
    bisect_edge,
    build_complex,
    check_3manifold_with_boundary,
    check_closed_3manifold,
    double,
    euler_characteristic,
    extract_boundary,
    orient,
    stellar_subdivide,
    surface_report,
)
from morsesum.errors import (
    BoundaryMismatch,
    ChordEndpointsInvalid,
    DanglingFace,
    DuplicateCell,
    NonOrientable,
    SignError,
)
from morsesum.fixtures import SHARED, TETRA_BOUNDARY, fixture, grid_torus

SIMPLEX4_BOUNDARY = list(combinations(range(5), 4))


def square_cw():
    """A square as a CW complex: 4 vertices, 4 edges, one 2-cell."""
    d = [(0, 0, []), (0, 1, []), (0, 2, []), (0, 3, [])]
    d += [(1, 10, [(1, 1), (0, -1)]), (1, 11, [(2, 1), (1, -1)]),
          (1, 12, [(3, 1), (2, -1)]), (1, 13, [(0, 1), (3, -1)])]
    d += [(2, 20, [(10, 1), (11, 1), (12, 1), (13, 1)])]
    return build_complex(d)


# ----------------------------------------------------------------------
# construction and validation


def test_simplex_boundary_counts():
    X = Complex.from_simplices(SIMPLEX4_BOUNDARY)
    assert X.counts() == (5, 10, 10, 5)
    assert X.is_simplicial and X.dimension == 3
    assert X.boundary_squared_defects() == []


def test_build_complex_simplicial_descriptors():
    d = [(0, 0, []), (0, 1, []), (0, 2, []), (1, 3, [0, 1]), (1, 4, [1, 2]), (1, 5, [0, 2]),
         (2, 6, [0, 1, 2])]
    X = build_complex(d)
    assert X.is_simplicial
    assert X.vertices(6) == frozenset({0, 1, 2})
    assert euler_characteristic(X) == 1


def test_dangling_face_rejected():
    with pytest.raises(DanglingFace):
        build_complex([(0, 0, []), (1, 1, [(0, 1), (7, -1)])])


def test_wrong_sign_rejected():
    with pytest.raises(SignError):
        build_complex([(0, 0, []), (0, 1, []), (1, 2, [(0, 2), (1, -1)])])


def test_boundary_squared_nonzero_rejected():
    d = [(0, 0, []), (0, 1, []), (0, 2, []),
         (1, 3, [(1, 1), (0, -1)]), (1, 4, [(2, 1), (1, -1)]), (1, 5, [(2, 1), (0, -1)]),
         (2, 6, [(3, 1), (4, 1), (5, 1)])]
    with pytest.raises(SignError):
        build_complex(d)


def test_duplicate_cell_rejected():
    with pytest.raises(DuplicateCell):
        build_complex([(0, 0, []), (0, 0, [])])
    with pytest.raises(DuplicateCell):
        build_complex([(0, 0, []), (0, 1, []), (1, 2, [0, 1]), (1, 3, [0, 1])])


def test_cw_square_is_a_disk():
    X = square_cw()
    assert not X.is_simplicial
    assert euler_characteristic(X) == 1
    assert X.boundary_squared_defects() == []


# ----------------------------------------------------------------------
# queries


def test_closure_star_link_on_tetrahedron_boundary():
    X = Complex.from_simplices(TETRA_BOUNDARY)
    v0 = X.cell_of([0])
    assert X.closure([X.cell_of([0, 1, 2])]) == frozenset(
        X.cell_of(s) for k in (1, 2, 3) for s in combinations((0, 1, 2), k)
    )
    star = X.star(v0)
    assert star.counts() == (4, 6, 3)
    link = X.link(v0)
    assert {X.vertices(c) for c in link.cells} == {
        frozenset(s) for k in (1, 2) for s in combinations((1, 2, 3), k)
    }
    assert euler_characteristic(link) == 0  # a circle


def test_cofacets_and_incidence():
    X = Complex.from_simplices([(0, 1, 2)])
    e = X.cell_of([1, 2])
    t = X.cell_of([0, 1, 2])
    assert X.cofacets(e) == (t,)
    assert X.incidence(e, t) in (1, -1)
    assert X.incidence(X.cell_of([0]), t) == 0


def test_region_boundary_of_single_tetrahedron():
    X = Complex.from_simplices(SIMPLEX4_BOUNDARY)
    t = X.cells(3)[0]
    R = Region(X, X.closure([t]))
    S = extract_boundary(R)
    rep = surface_report(S)
    assert rep.is_sphere and rep.closed and rep.connected and rep.orientable
    assert S.counts() == (4, 6, 4)


def test_subcomplex_keeps_identifiers():
    X = Complex.from_simplices(SIMPLEX4_BOUNDARY)
    cells = X.closure([X.cells(3)[0]])
    Y = X.subcomplex(cells)
    assert set(Y.cells()) == set(cells)
    with pytest.raises(DanglingFace):
        X.subcomplex([X.cells(3)[0]])


# ----------------------------------------------------------------------
# manifold checks


@pytest.mark.parametrize("name", ["S3", "S2xS1", "T3", "S2xS1#T3"])
def test_fixtures_are_closed_manifolds(name):
    X = fixture(name).complex
    assert check_closed_3manifold(X)
    assert euler_characteristic(X) == 0


def test_cone_over_torus_is_not_a_manifold():
    cone = [tuple(t) + (99,) for t in grid_torus(3)]
    X = Complex.from_simplices(cone)
    rep = check_3manifold_with_boundary(X)
    assert not rep
    assert X.cell_of([99]) in rep.offenders["vertex"]


def test_torus_surface_report():
    rep = surface_report(Complex.from_simplices(grid_torus(3)))
    assert rep.euler == 0 and rep.genus == 1 and rep.orientable and not rep.is_sphere


def test_orientation_and_nonorientable_bundle():
    orient(fixture("S2xS1").complex)
    with pytest.raises(NonOrientable):
        orient(fixture("S2xS1~").complex)


def test_double_of_ball_has_euler_zero():
    X = Complex.from_simplices(SIMPLEX4_BOUNDARY)
    R = Region(X, X.closure(X.cells(3)[:2]))
    D = double(R)
    assert euler_characteristic(D) == 0
    assert 2 * euler_characteristic(R) - euler_characteristic(extract_boundary(R)) == 0


def test_double_rejects_dangling_triangle():
    X = Complex.from_simplices(SIMPLEX4_BOUNDARY)
    t = X.cells(3)[0]
    loose = next(c for c in X.cells(2) if c not in X.closure([t]))
    R = Region(X, X.closure([t, loose]))
    with pytest.raises(BoundaryMismatch):
        double(R)


# ----------------------------------------------------------------------
# subdivisions


def test_barycentric_subdivision_counts():
    X = Complex.from_simplices(SIMPLEX4_BOUNDARY)
    Z, tr = stellar_subdivide(X, X.cells())
    assert Z.counts() == (30, 150, 240, 120)
    assert check_closed_3manifold(Z)
    assert set(tr.apex) == {c for c in X.cells() if X.dim(c) > 0}


def test_trace_carriers_partition_old_cells():
    X = Complex.from_simplices(SIMPLEX4_BOUNDARY)
    targets = [X.cells(3)[0], X.cells(2)[0]]
    Z, tr = stellar_subdivide(X, targets)
    for old, new in tr.old_to_new.items():
        for c in new:
            assert tr.carrier[c] == old
    assert sum(len(v) for v in tr.old_to_new.values()) == len(Z)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_stellar_subdivision_preserves_euler_and_manifold(seed, n):
    X = Complex.from_simplices(SIMPLEX4_BOUNDARY)
    rng = random.Random(seed)
    targets = rng.sample([c for c in X.cells() if X.dim(c) > 0], n)
    Z, _ = stellar_subdivide(X, targets)
    assert euler_characteristic(Z) == euler_characteristic(X)
    assert check_closed_3manifold(Z)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_edge_bisection_preserves_euler(seed):
    X = fixture("S2xS1").complex
    e = random.Random(seed).choice(X.cells(1))
    Z, tr = bisect_edge(X, e)
    assert euler_characteristic(Z) == euler_characteristic(X)
    assert Z.counts()[0] == X.counts()[0] + 1


def test_cw_edge_and_chord_bisection():
    X = square_cw()
    Z, _ = bisect_edge(X, 10)
    assert Z.counts() == (5, 5, 1)
    assert euler_characteristic(Z) == 1
    Y, tr = bisect_2cell(X, 20, 0, 2)
    assert Y.counts() == (4, 5, 2)
    assert euler_characteristic(Y) == 1
    assert Y.boundary_squared_defects() == []


def test_chord_endpoint_errors():
    X = square_cw()
    with pytest.raises(ChordEndpointsInvalid):
        bisect_2cell(X, 20, 0, 0)
    with pytest.raises(ChordEndpointsInvalid):
        bisect_2cell(X, 20, 0, 1)
    with pytest.raises(ChordEndpointsInvalid):
        bisect_2cell(X, 10, 0, 2)


def test_connected_sum_provenance_covers_every_cell():
    L = fixture("S2xS1#T3")
    assert set(L.provenance) == set(L.complex.cells())
    shared = [c for c, t in L.provenance.items() if t == SHARED]
    assert sorted(L.complex.dim(c) for c in shared).count(2) == 4
    assert L.meta["tags_A"] == ["S2xS1"] and L.meta["tags_B"] == ["T3"]
