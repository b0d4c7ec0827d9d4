"""Finite regular cell complexes with signed incidences.

The simplicial flavour (every cell determined by its vertex set) is the
default; cells of a general regular CW complex can be given through their
signed facet lists.  Complexes are immutable: subdivisions return a new
complex together with a :class:`SubdivisionTrace`.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

from .errors import (
    BoundaryMismatch,
    ChordEndpointsInvalid,
    DanglingFace,
    DuplicateCell,
    NonOrientable,
    NotAnEdge,
    SignError,
    SubdivisionError,
    UnknownCell,
)


class Complex:
    """Dimension-indexed registry of cells with signed facet lists.

    ``verts`` maps each cell to its vertex set when the complex is
    simplicial; it is ``None`` for general CW complexes.
    """

    __slots__ = ("_dim", "_facets", "_verts", "_by_verts", "_cofacets", "labels", "_top")

    def __init__(
        self,
        dims: Mapping[int, int],
        facets: Mapping[int, tuple[tuple[int, int], ...]],
        verts: Mapping[int, frozenset] | None = None,
        labels: Mapping[int, str] | None = None,
        check: bool = True,
    ):
        self._dim = dict(dims)
        self._facets = {c: tuple(facets.get(c, ())) for c in self._dim}
        self._verts = dict(verts) if verts is not None else None
        self._by_verts = None
        if self._verts is not None:
            self._by_verts = {vs: c for c, vs in self._verts.items()}
        self._cofacets = None
        self.labels = dict(labels or {})
        self._top = max(self._dim.values(), default=-1)
        if check:
            self._validate()

    # ------------------------------------------------------------------
    # construction

    @classmethod
    def from_simplices(
        cls,
        simplices: Iterable[Iterable[int]],
        labels: Mapping[int, str] | None = None,
        ids: Mapping[frozenset, int] | None = None,
        next_id: int | None = None,
        check: bool = True,
    ) -> "Complex":
        """Build the simplicial complex generated by ``simplices``.

        Vertices are identified by their integer ids.  ``ids`` pins the
        identifiers of already-known vertex sets; every other cell receives
        a fresh id in order of (dimension, sorted vertex tuple).
        """
        all_sets: set[frozenset] = set()
        for s in simplices:
            s = frozenset(s)
            if not s:
                continue
            if s in all_sets:
                continue
            items = sorted(s)
            for k in range(1, len(items) + 1):
                for sub in combinations(items, k):
                    all_sets.add(frozenset(sub))
        ids = dict(ids or {})
        assigned: dict[frozenset, int] = {}
        used = set()
        for vs in all_sets:
            if len(vs) == 1:
                (v,) = vs
                if vs in ids and ids[vs] != v:
                    raise DuplicateCell(f"vertex {v} pinned to id {ids[vs]}")
                assigned[vs] = v
                used.add(v)
            elif vs in ids:
                assigned[vs] = ids[vs]
                used.add(ids[vs])
        if len(used) != len(assigned):
            raise DuplicateCell("identifier collision while assigning ids")
        counter = max([next_id or 0] + [u + 1 for u in used] + [u + 1 for u in ids.values()])
        for vs in sorted((v for v in all_sets if v not in assigned), key=lambda v: (len(v), sorted(v))):
            assigned[vs] = counter
            counter += 1
        dims = {}
        facets = {}
        verts = {}
        for vs, c in assigned.items():
            dims[c] = len(vs) - 1
            verts[c] = vs
            if len(vs) > 1:
                items = sorted(vs)
                facets[c] = tuple(
                    (assigned[frozenset(items[:i] + items[i + 1:])], -1 if i % 2 else 1)
                    for i in range(len(items))
                )
            else:
                facets[c] = ()
        return cls(dims, facets, verts, labels, check=check)

    def _validate(self) -> None:
        for c, fs in self._facets.items():
            d = self._dim[c]
            seen = set()
            for f, s in fs:
                if f not in self._dim:
                    raise DanglingFace(f"cell {c} references missing facet {f}", cell=c, facet=f)
                if self._dim[f] != d - 1:
                    raise DanglingFace(f"facet {f} of cell {c} has wrong dimension", cell=c, facet=f)
                if s not in (1, -1):
                    raise SignError(f"incidence sign {s} on ({f}, {c})", cell=c)
                if f in seen:
                    raise DuplicateCell(f"facet {f} listed twice in cell {c}", cell=c)
                seen.add(f)
            if d > 0 and len(fs) < 2:
                raise DanglingFace(f"cell {c} of dimension {d} has fewer than 2 facets", cell=c)
            if d == 0 and fs:
                raise DanglingFace(f"vertex {c} has facets", cell=c)
        bad = self.boundary_squared_defects()
        if bad:
            raise SignError(f"boundary of boundary is nonzero on cells {bad[:5]}", cells=bad)

    def boundary_squared_defects(self) -> list[int]:
        """Cells whose boundary has nonzero boundary."""
        bad = []
        for c, fs in self._facets.items():
            if self._dim[c] < 2:
                continue
            acc: dict[int, int] = defaultdict(int)
            for f, s in fs:
                for g, t in self._facets[f]:
                    acc[g] += s * t
            if any(acc.values()):
                bad.append(c)
        return sorted(bad)

    # ------------------------------------------------------------------
    # queries

    def __contains__(self, c) -> bool:
        return c in self._dim

    def __len__(self) -> int:
        return len(self._dim)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Complex):
            return NotImplemented
        return self._dim == other._dim and self._facets == other._facets

    def __hash__(self):
        return hash((len(self._dim), self._top))

    def __repr__(self) -> str:
        return f"Complex(counts={self.counts()})"

    @property
    def is_simplicial(self) -> bool:
        return self._verts is not None

    @property
    def dimension(self) -> int:
        return self._top

    def dim(self, c: int) -> int:
        try:
            return self._dim[c]
        except KeyError:
            raise UnknownCell(f"unknown cell {c}", cell=c) from None

    def cells(self, dim: int | None = None) -> list[int]:
        if dim is None:
            return sorted(self._dim)
        return sorted(c for c, d in self._dim.items() if d == dim)

    def counts(self) -> tuple[int, ...]:
        out = [0] * (self._top + 1)
        for d in self._dim.values():
            out[d] += 1
        return tuple(out)

    def signed_facets(self, c: int) -> tuple[tuple[int, int], ...]:
        self.dim(c)
        return self._facets[c]

    def facets(self, c: int) -> tuple[int, ...]:
        return tuple(f for f, _ in self.signed_facets(c))

    def incidence(self, face: int, c: int) -> int:
        for f, s in self._facets[c]:
            if f == face:
                return s
        return 0

    def _build_cofacets(self) -> None:
        co: dict[int, list] = {c: [] for c in self._dim}
        for c, fs in self._facets.items():
            for f, s in fs:
                co[f].append((c, s))
        self._cofacets = {c: tuple(sorted(v)) for c, v in co.items()}

    def signed_cofacets(self, c: int) -> tuple[tuple[int, int], ...]:
        if self._cofacets is None:
            self._build_cofacets()
        self.dim(c)
        return self._cofacets[c]

    def cofacets(self, c: int) -> tuple[int, ...]:
        return tuple(t for t, _ in self.signed_cofacets(c))

    def vertices(self, c: int) -> frozenset:
        """Vertex set of a cell (computed through facets for CW cells)."""
        if self._verts is not None:
            self.dim(c)
            return self._verts[c]
        out = set()
        stack = [c]
        while stack:
            x = stack.pop()
            if self._dim[x] == 0:
                out.add(x)
            else:
                stack.extend(self.facets(x))
        return frozenset(out)

    def cell_of(self, vertices: Iterable[int]) -> int | None:
        """Identifier of the simplex spanned by ``vertices`` (simplicial only)."""
        if self._by_verts is None:
            raise TypeError("cell_of requires a simplicial complex")
        return self._by_verts.get(frozenset(vertices))

    def next_id(self) -> int:
        return max(self._dim, default=-1) + 1

    def closure(self, cells: Iterable[int]) -> frozenset:
        out = set()
        stack = list(cells)
        while stack:
            x = stack.pop()
            if x in out:
                continue
            self.dim(x)
            out.add(x)
            stack.extend(f for f, _ in self._facets[x])
        return frozenset(out)

    def upward(self, cells: Iterable[int]) -> frozenset:
        """All cofaces (of every codimension) of the given cells, inclusive."""
        out = set()
        stack = list(cells)
        while stack:
            x = stack.pop()
            if x in out:
                continue
            out.add(x)
            stack.extend(self.cofacets(x))
        return frozenset(out)

    def star(self, c: int) -> "Region":
        """Closed star: the smallest subcomplex containing every coface of ``c``."""
        self.dim(c)
        return Region(self, self.closure(self.upward([c])))

    def link(self, c: int) -> "Region":
        """Cells of the closed star that do not meet the closure of ``c``."""
        near = self.closure([c])
        st = self.star(c).cells
        return Region(self, frozenset(x for x in st if not (self.closure([x]) & near)))

    def maximal_cells(self) -> list[int]:
        return [c for c in self.cells() if not self.cofacets(c)]

    def subcomplex(self, cells: Iterable[int]) -> "Complex":
        """Restriction to a face-closed set of cells, keeping identifiers."""
        cells = set(cells)
        for c in cells:
            for f in self.facets(c):
                if f not in cells:
                    raise DanglingFace(f"cell {c} has facet {f} outside the subcomplex", cell=c)
        verts = None if self._verts is None else {c: self._verts[c] for c in cells}
        return Complex(
            {c: self._dim[c] for c in cells},
            {c: self._facets[c] for c in cells},
            verts,
            {c: n for c, n in self.labels.items() if c in cells},
            check=False,
        )


@dataclass(frozen=True)
class Region:
    """A face-closed set of cells of a parent complex."""

    parent: Complex
    cells: frozenset

    def __post_init__(self):
        for c in self.cells:
            for f in self.parent.facets(c):
                if f not in self.cells:
                    raise DanglingFace(f"region not closed: {c} lacks facet {f}", cell=c)

    def __contains__(self, c) -> bool:
        return c in self.cells

    def __len__(self) -> int:
        return len(self.cells)

    def cells_of_dim(self, d: int) -> list[int]:
        return sorted(c for c in self.cells if self.parent.dim(c) == d)

    def counts(self) -> tuple[int, ...]:
        top = max((self.parent.dim(c) for c in self.cells), default=-1)
        out = [0] * (top + 1)
        for c in self.cells:
            out[self.parent.dim(c)] += 1
        return tuple(out)

    def as_complex(self) -> Complex:
        return self.parent.subcomplex(self.cells)

    def boundary(self) -> Complex:
        return extract_boundary(self)


@dataclass
class SubdivisionTrace:
    """Replacement record produced by every subdivision.

    ``old_to_new`` maps each cell of the old complex to the new cells that
    partition it (untouched cells map to themselves); ``carrier`` is the
    inverse map; ``new_cells`` lists created cells with their provenance.
    """

    old_to_new: dict[int, tuple[int, ...]] = field(default_factory=dict)
    carrier: dict[int, int] = field(default_factory=dict)
    new_cells: list[tuple[int, str]] = field(default_factory=list)
    apex: dict[int, int] = field(default_factory=dict)

    def then(self, other: "SubdivisionTrace") -> "SubdivisionTrace":
        """Compose with a later trace (self first)."""
        out = SubdivisionTrace()
        for old, mids in self.old_to_new.items():
            news = []
            for m in mids:
                news.extend(other.old_to_new.get(m, (m,)))
            out.old_to_new[old] = tuple(sorted(news))
        for new, mid in other.carrier.items():
            out.carrier[new] = self.carrier.get(mid, mid)
        out.new_cells = list(self.new_cells) + list(other.new_cells)
        out.apex = {**self.apex, **other.apex}
        return out


def build_complex(descriptors, labels: Mapping[int, str] | None = None) -> Complex:
    """Validated complex from ``(dim, id, facets)`` descriptors.

    ``facets`` is either a list of ``(facet_id, sign)`` pairs (CW flavour) or,
    when every descriptor of positive dimension gives a plain list of vertex
    ids, the complex is built as a simplicial complex.
    """
    descriptors = list(descriptors)
    dims: dict[int, int] = {}
    facets: dict[int, tuple] = {}
    simplicial = all(
        all(isinstance(x, int) for x in fs) for d, _, fs in descriptors if d > 0
    )
    for d, cid, fs in descriptors:
        if cid in dims:
            raise DuplicateCell(f"cell id {cid} defined twice", cell=cid)
        dims[cid] = d
        facets[cid] = tuple(fs)
    if simplicial:
        verts = {}
        for cid, d in dims.items():
            if d == 0:
                verts[cid] = frozenset([cid])
            else:
                vs = frozenset(facets[cid])
                for v in vs:
                    if dims.get(v) != 0:
                        raise DanglingFace(f"cell {cid} references missing vertex {v}", cell=cid)
                if len(vs) != d + 1:
                    raise DanglingFace(f"cell {cid} needs {d + 1} distinct vertices", cell=cid)
                verts[cid] = vs
        by_verts = {}
        for cid, vs in verts.items():
            if vs in by_verts:
                raise DuplicateCell(f"cells {by_verts[vs]} and {cid} span the same vertices", cell=cid)
            by_verts[vs] = cid
        signed = {}
        for cid, vs in verts.items():
            items = sorted(vs)
            row = []
            for i in range(len(items) if len(items) > 1 else 0):
                sub = frozenset(items[:i] + items[i + 1:])
                if sub not in by_verts:
                    raise DanglingFace(f"face {sorted(sub)} of cell {cid} is missing", cell=cid)
                row.append((by_verts[sub], -1 if i % 2 else 1))
            signed[cid] = tuple(row)
        return Complex(dims, signed, verts, labels)
    return Complex(dims, facets, None, labels)


def euler_characteristic(obj) -> int:
    """Alternating sum of cell counts of a complex, region or cell set."""
    if isinstance(obj, Complex):
        counts = obj.counts()
    elif isinstance(obj, Region):
        counts = obj.counts()
    else:
        raise TypeError("expected Complex or Region")
    return sum((-1) ** d * n for d, n in enumerate(counts))


# ----------------------------------------------------------------------
# manifold checks (simplicial links)


def _link_sets(X: Complex, c: int, within: frozenset | None = None) -> set[frozenset]:
    """The link of ``c`` as an abstract complex of vertex sets."""
    vs = X.vertices(c)
    out = set()
    for s in X.upward([c]):
        if s == c or (within is not None and s not in within):
            continue
        out.add(X.vertices(s) - vs)
    return out


def _components(nodes, adjacency) -> list[set]:
    seen = set()
    comps = []
    for n in nodes:
        if n in seen:
            continue
        comp = {n}
        seen.add(n)
        queue = deque([n])
        while queue:
            x = queue.popleft()
            for y in adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    queue.append(y)
        comps.append(comp)
    return comps


def _graph_kind(simplices: set[frozenset]) -> str:
    """Classify a 1-dimensional abstract complex as circle, arc or other."""
    edges = [s for s in simplices if len(s) == 2]
    verts = {v for s in simplices for v in s}
    if any(len(s) > 2 for s in simplices) or not edges:
        return "other"
    adj = defaultdict(set)
    for e in edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    if len(_components(verts, adj)) != 1:
        return "other"
    degrees = [len(adj[v]) for v in verts]
    if all(d == 2 for d in degrees):
        return "circle"
    if sorted(degrees)[:2] == [1, 1] and all(d == 2 for d in sorted(degrees)[2:]):
        return "arc"
    return "other"


def _surface_kind(simplices: set[frozenset]) -> str:
    """Classify a 2-dimensional abstract complex as sphere, disk or other."""
    tris = [s for s in simplices if len(s) == 3]
    if not tris or any(len(s) > 3 for s in simplices):
        return "other"
    edge_deg = defaultdict(int)
    for t in tris:
        for e in combinations(sorted(t), 2):
            edge_deg[frozenset(e)] += 1
    edges = {s for s in simplices if len(s) == 2}
    if edges != set(edge_deg):
        return "other"
    if any(d > 2 for d in edge_deg.values()):
        return "other"
    verts = {v for s in simplices for v in s}
    bounded = any(d == 1 for d in edge_deg.values())
    for v in verts:
        lk = {t - {v} for t in tris if v in t} | {frozenset()}
        lk = {x for x in lk if x}
        lk |= {frozenset([u]) for x in lk for u in x}
        kind = _graph_kind(lk)
        if kind == "other":
            return "other"
    adj = defaultdict(set)
    for e in edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    if len(_components(verts, adj)) != 1:
        return "other"
    chi = len(verts) - len(edges) + len(tris)
    if not bounded and chi == 2:
        return "sphere"
    if bounded and chi == 1:
        return "disk"
    return "other"


@dataclass
class ManifoldReport:
    ok: bool
    offenders: dict[str, list[int]]

    def __bool__(self) -> bool:
        return self.ok


def _manifold_report(X: Complex, cells: frozenset | None, with_boundary: bool) -> ManifoldReport:
    if not X.is_simplicial:
        raise TypeError("manifold checks require a simplicial complex")
    pool = cells if cells is not None else frozenset(X.cells())
    offenders: dict[str, list[int]] = {"not_pure": [], "triangle": [], "edge": [], "vertex": []}
    for c in sorted(pool):
        d = X.dim(c)
        if d < 3 and not any(X.dim(s) == 3 for s in X.upward([c]) if s in pool):
            offenders["not_pure"].append(c)
    for c in sorted(pool):
        d = X.dim(c)
        if d == 2:
            n = sum(1 for t in X.cofacets(c) if t in pool)
            if n > 2 or (n != 2 and not with_boundary):
                offenders["triangle"].append(c)
        elif d == 1:
            kind = _graph_kind(_link_sets(X, c, pool))
            if kind != "circle" and not (with_boundary and kind == "arc"):
                offenders["edge"].append(c)
        elif d == 0:
            kind = _surface_kind(_link_sets(X, c, pool))
            if kind != "sphere" and not (with_boundary and kind == "disk"):
                offenders["vertex"].append(c)
    ok = not any(offenders.values())
    return ManifoldReport(ok, {k: v for k, v in offenders.items() if v})


def check_closed_3manifold(X: Complex) -> ManifoldReport:
    return _manifold_report(X, None, with_boundary=False)


def check_3manifold_with_boundary(R: Region | Complex) -> ManifoldReport:
    if isinstance(R, Region):
        return _manifold_report(R.parent, R.cells, with_boundary=True)
    return _manifold_report(R, None, with_boundary=True)


# ----------------------------------------------------------------------
# orientation and boundaries


def orient(X: Complex, cells: Iterable[int] | None = None) -> dict[int, int]:
    """Coherent signs on the top cells of a pure complex.

    Two top cells sharing a codimension-1 face must induce opposite signs on
    it.  Raises :class:`NonOrientable` with a cycle of top cells whose
    gluings reverse orientation.
    """
    pool = frozenset(cells) if cells is not None else frozenset(X.cells())
    top = max((X.dim(c) for c in pool), default=-1)
    tops = sorted(c for c in pool if X.dim(c) == top)
    sign: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    for root in tops:
        if root in sign:
            continue
        sign[root] = 1
        parent[root] = None
        queue = deque([root])
        while queue:
            t = queue.popleft()
            for f, s in X.signed_facets(t):
                for u, r in X.signed_cofacets(f):
                    if u == t or u not in pool:
                        continue
                    want = -sign[t] * s * r
                    if u not in sign:
                        sign[u] = want
                        parent[u] = t
                        queue.append(u)
                    elif sign[u] != want:
                        raise NonOrientable(
                            f"orientation-reversing cycle through {t} and {u}",
                            certificate=_tree_cycle(parent, t, u),
                        )
    return sign


def _tree_cycle(parent, a, b) -> list[int]:
    def chain(x):
        out = []
        while x is not None:
            out.append(x)
            x = parent[x]
        return out

    pa, pb = chain(a), chain(b)
    common = set(pa) & set(pb)
    left = [x for x in pa if x not in common]
    right = [x for x in pb if x not in common]
    meet = next(x for x in pa if x in common)
    return left + [meet] + list(reversed(right))


def extract_boundary(R: Region | Complex) -> Complex:
    """Subcomplex generated by the 2-cells with exactly one 3-coface in ``R``."""
    if isinstance(R, Complex):
        R = Region(R, frozenset(R.cells()))
    X = R.parent
    faces = [
        c for c in R.cells
        if X.dim(c) == 2 and sum(1 for t in X.cofacets(c) if t in R.cells) == 1
    ]
    return X.subcomplex(X.closure(faces))


@dataclass
class SurfaceReport:
    euler: int
    connected: bool
    orientable: bool
    closed: bool
    genus: int | None

    @property
    def is_sphere(self) -> bool:
        return self.closed and self.connected and self.orientable and self.euler == 2


def surface_report(S: Complex) -> SurfaceReport:
    chi = euler_characteristic(S)
    cells = S.cells()
    adj = defaultdict(set)
    for c in cells:
        for f in S.facets(c):
            adj[c].add(f)
            adj[f].add(c)
    connected = len(_components(cells, adj)) == 1 if cells else False
    if S.is_simplicial:
        closed = _surface_closed(S)
    else:
        closed = all(len(S.cofacets(e)) == 2 for e in S.cells(1)) and bool(S.cells(2))
    try:
        orient(S)
        orientable = True
    except NonOrientable:
        orientable = False
    genus = (2 - chi) // 2 if (closed and connected and orientable) else None
    return SurfaceReport(chi, connected, orientable, closed, genus)


def _surface_closed(S: Complex) -> bool:
    if S.dimension != 2:
        return False
    for e in S.cells(1):
        if len(S.cofacets(e)) != 2:
            return False
    for v in S.cells(0):
        if _graph_kind(_link_sets(S, v)) != "circle":
            return False
    for c in S.cells():
        if S.dim(c) < 2 and not S.cofacets(c):
            return False
    return True


# ----------------------------------------------------------------------
# subdivision


def stellar_subdivide(
    X: Complex, targets: Iterable[int], provenance: str = "stellar"
) -> tuple[Complex, SubdivisionTrace]:
    """Stellar subdivision at each target simplex, highest dimension first.

    Every simplex containing a target is replaced by the join of a new apex
    vertex with the target's boundary and the remaining vertices.  The
    target set should be closed under cofaces for the result to be the
    partial derived subdivision at those simplices.
    """
    if not X.is_simplicial:
        raise SubdivisionError("stellar subdivision requires a simplicial complex")
    # subdividing at a vertex changes nothing
    order = sorted((c for c in set(targets) if X.dim(c) > 0), key=lambda c: (-X.dim(c), c))
    maximal = {X.vertices(c) for c in X.maximal_cells()}
    by_vertex: dict[int, set[frozenset]] = defaultdict(set)
    for s in maximal:
        for v in s:
            by_vertex[v].add(s)
    next_id = X.next_id()
    apex: dict[int, int] = {}
    for c in order:
        key = X.vertices(c)
        b = next_id
        next_id += 1
        apex[c] = b
        it = iter(key)
        hit = set(by_vertex[next(it)])
        for v in it:
            hit &= by_vertex[v]
        if not hit:
            raise SubdivisionError(f"simplex {c} vanished before its subdivision", cell=c)
        for s in hit:
            maximal.discard(s)
            for v in s:
                by_vertex[v].discard(s)
            rest = s - key
            for v in key:
                new = rest | (key - {v}) | {b}
                maximal.add(new)
                for u in new:
                    by_vertex[u].add(new)
    Y = Complex.from_simplices(
        maximal, labels=X.labels, ids=X._by_verts, next_id=next_id, check=False
    )
    carrier_of_vertex = {b: X.vertices(c) for c, b in apex.items()}
    trace = SubdivisionTrace(apex=dict(apex))
    groups: dict[int, list[int]] = defaultdict(list)
    for y in Y.cells():
        vs = Y.vertices(y)
        car = set()
        for v in vs:
            car |= carrier_of_vertex.get(v, {v})
        old = X.cell_of(car)
        trace.carrier[y] = old
        groups[old].append(y)
        if old != y:
            trace.new_cells.append((y, provenance))
    for old in X.cells():
        trace.old_to_new[old] = tuple(sorted(groups.get(old, ())))
    return Y, trace


def bisect_edge(X: Complex, e: int) -> tuple[Complex, SubdivisionTrace]:
    """Split an edge at a new midpoint vertex.

    Simplicial complexes get the stellar subdivision at the edge (every
    incident simplex is split); CW complexes keep their higher cells and
    only replace the edge in their facet lists.
    """
    if e not in X or X.dim(e) != 1:
        raise NotAnEdge(f"cell {e} is not an edge", cell=e)
    if X.is_simplicial:
        return stellar_subdivide(X, [e], provenance="bisect_edge")
    (a, sa), (b, sb) = X.signed_facets(e)
    m = X.next_id()
    e1, e2 = m + 1, m + 2
    dims = {c: X.dim(c) for c in X.cells() if c != e}
    facets = {c: X.signed_facets(c) for c in X.cells() if c != e}
    dims.update({m: 0, e1: 1, e2: 1})
    facets.update({m: (), e1: ((a, sa), (m, sb)), e2: ((m, sa), (b, sb))})
    for t, s in X.signed_cofacets(e):
        facets[t] = tuple(x for x in facets[t] if x[0] != e) + ((e1, s), (e2, s))
    Y = Complex(dims, facets, None, X.labels)
    trace = _cw_trace(X, {e: (e1, e2, m)}, "bisect_edge")
    trace.apex[e] = m
    return Y, trace


def bisect_2cell(X: Complex, c: int, entry_vertex: int, exit_vertex: int) -> tuple[Complex, SubdivisionTrace]:
    """Split a polygonal 2-cell along a chord between two boundary vertices.

    The endpoints must be distinct, non-adjacent vertices of the boundary
    cycle, so a simplicial triangle can never be bisected this way; the
    result is a CW complex.
    """
    if c not in X or X.dim(c) != 2:
        raise ChordEndpointsInvalid(f"cell {c} is not a 2-cell", cell=c)
    edges = X.signed_facets(c)
    ends = {f: X.facets(f) for f, _ in edges}
    bverts = {v for vs in ends.values() for v in vs}
    u, w = entry_vertex, exit_vertex
    if u == w or u not in bverts or w not in bverts:
        raise ChordEndpointsInvalid("chord endpoints must be distinct boundary vertices", cell=c)
    if any(set(vs) == {u, w} for vs in ends.values()):
        raise ChordEndpointsInvalid("chord endpoints are adjacent on the boundary", cell=c)
    adj = defaultdict(list)
    for f, vs in ends.items():
        adj[vs[0]].append(f)
        adj[vs[1]].append(f)
    # walk the boundary cycle from u in the direction of its first edge
    arcs = []
    for start_edge in sorted(adj[u])[:2]:
        arc = []
        here, edge = u, start_edge
        while True:
            arc.append(edge)
            a, b = ends[edge]
            here = b if a == here else a
            if here == w:
                break
            nxt = [f for f in adj[here] if f != edge]
            if len(nxt) != 1:
                raise ChordEndpointsInvalid("boundary of 2-cell is not a simple cycle", cell=c)
            edge = nxt[0]
        arcs.append(arc)
    sign_in_c = dict(edges)
    h = X.next_id()
    c1, c2 = h + 1, h + 2
    coeff_w = 0
    for f in arcs[0]:
        for v, s in X.signed_facets(f):
            if v == w:
                coeff_w += sign_in_c[f] * s
    alpha = coeff_w
    # chord boundary is w - u
    dims = {x: X.dim(x) for x in X.cells() if x != c}
    facets = {x: X.signed_facets(x) for x in X.cells() if x != c}
    dims.update({h: 1, c1: 2, c2: 2})
    facets[h] = ((u, -1), (w, 1))
    facets[c1] = tuple((f, sign_in_c[f]) for f in arcs[0]) + ((h, -alpha),)
    facets[c2] = tuple((f, sign_in_c[f]) for f in arcs[1]) + ((h, alpha),)
    for t, s in X.signed_cofacets(c):
        facets[t] = tuple(x for x in facets[t] if x[0] != c) + ((c1, s), (c2, s))
    Y = Complex(dims, facets, None, X.labels)
    return Y, _cw_trace(X, {c: (c1, c2, h)}, "bisect_2cell")


def _cw_trace(X: Complex, replaced: dict[int, tuple[int, ...]], provenance: str) -> SubdivisionTrace:
    trace = SubdivisionTrace()
    for x in X.cells():
        trace.old_to_new[x] = replaced.get(x, (x,))
        for y in trace.old_to_new[x]:
            trace.carrier[y] = x
    for news in replaced.values():
        for y in news:
            trace.new_cells.append((y, provenance))
    return trace


def double(R: Region) -> Complex:
    """Two copies of a 3-manifold region glued along its boundary by the identity."""
    X = R.parent
    bd = extract_boundary(R)
    bcells = set(bd.cells())
    for c in R.cells:
        if X.dim(c) == 2:
            n = sum(1 for t in X.cofacets(c) if t in R.cells)
            if n not in (1, 2):
                raise BoundaryMismatch(f"2-cell {c} has {n} cofaces in the region", cell=c)
            if (n == 1) != (c in bcells):
                raise BoundaryMismatch(f"2-cell {c} inconsistent with the boundary", cell=c)
    nxt = X.next_id()
    copy = {}
    for c in sorted(R.cells):
        if c not in bcells:
            copy[c] = nxt
            nxt += 1
    dims = {}
    facets = {}
    for c in R.cells:
        dims[c] = X.dim(c)
        facets[c] = X.signed_facets(c)
        if c in copy:
            dims[copy[c]] = X.dim(c)
            facets[copy[c]] = tuple((copy.get(f, f), s) for f, s in X.signed_facets(c))
    D = Complex(dims, facets, None, None)
    for e in D.cells(2):
        if len(D.cofacets(e)) != 2:
            raise BoundaryMismatch(f"doubled complex not closed at 2-cell {e}", cell=e)
    return D
