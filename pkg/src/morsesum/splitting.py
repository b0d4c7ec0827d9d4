"""Cap the two sides of a separating sphere and extend the field.

The side with the critical vertex is capped by a cone whose cells are
collapsed onto the sphere (one top cell of the cone stays critical); the
other side is capped by a cone whose apex is the new critical vertex.
"""
from __future__ import annotations

from dataclasses import dataclass

from .cellcomplex import Complex, Region, surface_report
from .errors import BoundaryCriticalCell, CyclicField, InvalidFunction, InwardArrow, NoCollapse, NotASphere
from .homology import BettiVector, betti
from .morse import (
    GradientField,
    MorseFunction,
    critical_cells,
    function_from_field,
    is_perfect,
    validate_acyclic,
    validate_morse_function,
)


@dataclass
class ConeDisk:
    """Cone ``base * apex`` inside ``complex``; ``cone_of[c]`` is the cell ``c * apex``."""

    base: Complex
    apex: int
    disk: Region
    cone_of: dict[int, int]
    complex: Complex


def _cone_complex(side: Complex, side_cells, surface_cells, apex: int | None = None):
    """Simplicial complex ``side ∪ cone(surface)`` keeping the ids of ``side``."""
    side_cells = set(side_cells)
    if apex is None:
        apex = max(side.cells()) + 1
    ids = {side.vertices(c): c for c in side_cells}
    simplices = [side.vertices(c) for c in side_cells if side.dim(c) == 3]
    simplices += [side.vertices(c) | {apex} for c in surface_cells if side.dim(c) == 2]
    ids[frozenset([apex])] = apex
    nxt = max(max(side.cells()) + 1, apex + 1)
    labels = {c: n for c, n in side.labels.items() if c in side_cells}
    labels[apex] = "omega"
    Z = Complex.from_simplices(simplices, labels=labels, ids=ids, next_id=nxt)
    return Z, apex


def cone_disk(S: Complex, apex: int | None = None) -> ConeDisk:
    rep = surface_report(S)
    if not rep.is_sphere:
        raise NotASphere(f"base surface has Euler characteristic {rep.euler}", euler=rep.euler)
    Z, apex = _cone_complex(S, S.cells(), S.cells(), apex)
    cone_of = {c: Z.cell_of(S.vertices(c) | {apex}) for c in S.cells()}
    cells = frozenset(Z.cells())
    return ConeDisk(S, apex, Region(Z, cells), cone_of, Z)


@dataclass
class SummandResult:
    manifold: Complex
    function: MorseFunction
    field: GradientField
    critical: tuple[int, ...]
    betti: BettiVector
    perfect: bool
    special: int
    cone: ConeDisk | None = None

    def as_dict(self) -> dict:
        return {
            "counts": list(self.manifold.counts()),
            "critical": list(self.critical),
            "betti": list(self.betti.b),
            "perfect": self.perfect,
            "special_cell": self.special,
        }


def _cone_parts(X: Complex, side_cells, surface_cells, apex: int | None = None):
    Z, apex = _cone_complex(X, side_cells, surface_cells, apex)
    cone_of = {c: Z.cell_of(X.vertices(c) | {apex}) for c in surface_cells}
    base = Region(X, frozenset(surface_cells)).as_complex()
    disk = Region(Z, frozenset(cone_of.values()) | set(surface_cells) | {apex})
    return Z, ConeDisk(base, apex, disk, cone_of, Z)


def extend_by_collapse(
    Z: Complex, V_base: GradientField, surface_cells, disk: ConeDisk, delta: int
) -> GradientField:
    """Pair every cone cell except ``delta`` by collapsing onto the surface."""
    crit = critical_cells(V_base, Z, set(Z.cells()) - set(disk.cone_of.values()) - {disk.apex})
    on_s = sorted(crit.all() & set(surface_cells))
    if on_s:
        raise BoundaryCriticalCell(f"critical cells {on_s[:6]} lie on the sphere", cells=on_s)
    cone = set(disk.cone_of.values()) | {disk.apex}
    rem = set(Z.cells()) - {delta}
    pairs = []
    progress = True
    while progress:
        progress = False
        for a in sorted(cone & rem):
            if a not in rem:
                continue
            cof = [b for b in Z.cofacets(a) if b in rem]
            if len(cof) != 1 or cof[0] not in cone:
                continue
            pairs.append((a, cof[0]))
            rem.discard(a)
            rem.discard(cof[0])
            progress = True
    left = sorted(cone & rem)
    if left:
        raise NoCollapse(f"{len(left)} cone cells could not be collapsed", cells=left[:10])
    return GradientField(V_base.pairs | frozenset(pairs))


def cap_with_top_cell(g: MorseFunction, delta: int, X: Complex) -> MorseFunction:
    vals = dict(g.values)
    vals[delta] = 1 + max(g.values[f] for f in X.facets(delta))
    return MorseFunction(vals)


def extend_by_cone(V_base: GradientField, disk: ConeDisk, region_cells) -> GradientField:
    """Rules: boundary-critical ``a`` pairs with ``a * apex``; a sphere pair ``(s, b)`` gives ``(s * apex, b * apex)``."""
    region_cells = set(region_cells)
    scells = set(disk.cone_of)
    pairs = set()
    for s, t in V_base.pairs:
        if s in scells and t in scells:
            pairs.add((s, t))
            pairs.add((disk.cone_of[s], disk.cone_of[t]))
        elif s in scells and t in region_cells:
            raise InwardArrow(f"arrow from sphere cell {s} into the region at {t}", cells=[s, t])
        elif s in region_cells and t in region_cells:
            pairs.add((s, t))
    paired = {c for p in pairs for c in p}
    for a in sorted(scells - paired):
        pairs.add((a, disk.cone_of[a]))
    return GradientField(frozenset(pairs))


def _summand(Z: Complex, V: GradientField, special: int, disk: ConeDisk, cap: int | None) -> SummandResult:
    ok, cyc = validate_acyclic(V, Z)
    if not ok:
        raise CyclicField("extended field has a closed path", cycle=cyc)
    g = function_from_field(V, Z)
    if cap is not None:
        g = cap_with_top_cell(g, cap, Z)
    rep = validate_morse_function(g, Z)
    if not rep.ok:
        raise InvalidFunction("extended function is not a discrete Morse function", violations=rep.violations)
    b = betti(Z)
    crit = critical_cells(V, Z).counts(Z.dimension)
    return SummandResult(Z, g, V, crit, b, is_perfect(V, Z, b), special, disk)


def split_and_extend(X: Complex, V: GradientField, region_A: Region, region_B: Region,
                     surface_cells=None) -> tuple[SummandResult, SummandResult]:
    """Return the summands ``(M1, M2)``.

    ``M1`` caps ``region_B`` (the side with the critical vertex) and has the
    cone top cell as its critical 3-cell; ``M2`` caps ``region_A`` and has
    the cone apex as its critical vertex.
    """
    if surface_cells is None:
        surface_cells = region_A.cells & region_B.cells
    surface_cells = frozenset(surface_cells)
    # M1: collapse the cone onto the sphere, leaving one top cell
    Z1, D1 = _cone_parts(X, region_B.cells, surface_cells)
    V1_base = GradientField(frozenset(p for p in V.pairs if p[0] in region_B.cells and p[1] in region_B.cells))
    tops = sorted(D1.cone_of[c] for c in surface_cells if X.dim(c) == 2)
    last = None
    M1 = None
    for delta in tops:
        try:
            V1 = extend_by_collapse(Z1, V1_base, surface_cells, D1, delta)
        except NoCollapse as exc:
            last = exc
            continue
        M1 = _summand(Z1, V1, delta, D1, delta)
        break
    if M1 is None:
        raise last or NoCollapse("no top cell of the cone admits a collapse")
    # M2: cone with a critical apex
    Z2, D2 = _cone_parts(X, region_A.cells, surface_cells)
    V2 = extend_by_cone(V, D2, region_A.cells - surface_cells)
    M2 = _summand(Z2, V2, D2.apex, D2, None)
    return M1, M2


def regions_from_surface(X: Complex, V: GradientField, surface_cells) -> tuple[Region, Region]:
    """The two sides ``(A, B)`` of a separating surface; ``B`` holds the critical vertex."""
    surface_cells = frozenset(surface_cells)
    top = X.dimension
    label: dict[int, int] = {}
    n = 0
    for start in X.cells(top):
        if start in label:
            continue
        label[start] = n
        stack = [start]
        while stack:
            t = stack.pop()
            for f in X.facets(t):
                if f in surface_cells:
                    continue
                for u in X.cofacets(f):
                    if u not in label:
                        label[u] = n
                        stack.append(u)
        n += 1
    if n != 2:
        raise NotASphere(f"surface cuts the complex into {n} pieces", pieces=n)
    sides = [X.closure([t for t, k in label.items() if k == i]) for i in range(2)]
    crit0 = critical_cells(V, X)[0]
    in_b = [i for i in range(2) if crit0 & (sides[i] - surface_cells)]
    if len(in_b) != 1:
        raise NotASphere("critical vertices lie on both sides of the surface or on it")
    b = in_b[0]
    return Region(X, frozenset(sides[1 - b])), Region(X, frozenset(sides[b]))
