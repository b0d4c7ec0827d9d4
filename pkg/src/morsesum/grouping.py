"""Assign the critical 1- and 2-cells of a perfect field to the two summands.

Each critical 2-cell ``c2`` determines a dual loop (the core of the solid
torus swept by the two top-dimensional paths ending at its cofaces).  Each
critical 1-cell ``c1`` determines a mod-2 cocycle: the number of 2-paths
from an edge down to ``c1``.  The cocycle evaluated on the core is the
intersection parity of the two dual classes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .cellcomplex import Complex, Region, euler_characteristic, extract_boundary, surface_report
from .errors import AmbiguousGrouping, NotATorus, NotSeparable, PathNotUnique
from .homology import DualOneCycle, Z2Chain, edge_realization, pair_cochain
from .morse import GradientField, VPath, ascending_counts, critical_cells, descending_counts


@dataclass
class SolidTorusRegion:
    c2: int
    three_paths: tuple[VPath, VPath]
    region: Region
    core: DualOneCycle
    torus_ok: bool
    euler: int


def top_path_to(V: GradientField, X: Complex, t: int) -> VPath:
    """The 3-path from the critical 3-cell ending at the 3-cell ``t``.

    Traced backwards: ``t`` is the head of the arrow from one of its 2-faces,
    whose other coface precedes it.  Returned as ``(root, g0, t1, g1, ..., t)``.
    """
    seq = [t]
    seen = {t}
    x = t
    while True:
        s = V.down(x)
        if s is None:
            break
        others = [y for y in X.cofacets(s) if y != x]
        if len(others) != 1:
            raise PathNotUnique(f"2-cell {s} does not have exactly two cofaces", cell=s)
        x = others[0]
        if x in seen:
            raise PathNotUnique(f"top-dimensional path through {t} is cyclic", cell=t)
        seen.add(x)
        seq[:0] = [x, s]
    return VPath(X.dimension, tuple(seq))


def solid_torus(V: GradientField, c2: int, X: Complex, strict: bool = False) -> SolidTorusRegion:
    cof = X.cofacets(c2)
    if len(cof) != 2:
        raise PathNotUnique(f"critical 2-cell {c2} does not have two cofaces", cell=c2)
    if V.partner(c2) is not None:
        raise PathNotUnique(f"cell {c2} is not critical", cell=c2)
    p1 = top_path_to(V, X, cof[0])
    p2 = top_path_to(V, X, cof[1])
    if p1.start != p2.start:
        raise PathNotUnique("the two top paths start at different critical cells", cell=c2)
    t1, g1 = list(p1.sequence[0::2]), list(p1.sequence[1::2])
    t2, g2 = list(p2.sequence[0::2]), list(p2.sequence[1::2])
    loop = t1 + t2[:0:-1]
    gates = g1 + [c2] + g2[::-1]
    core = DualOneCycle(tuple(loop), tuple(gates), marked=c2)
    core.validate(X)
    cells = X.closure(set(loop) | {c2})
    R = Region(X, cells)
    chi = euler_characteristic(R)
    ok = False
    if chi == 0:
        rep = surface_report(extract_boundary(R))
        ok = rep.closed and rep.connected and rep.orientable and rep.euler == 0
    if strict and not ok:
        raise NotATorus(f"region around critical 2-cell {c2} is not a solid torus", cell=c2)
    return SolidTorusRegion(c2, (p1, p2), R, core, ok, chi)


@dataclass
class OneCellRepresentative:
    """Dual data of a critical 1-cell.

    ``cochain`` is the support of the mod-2 cocycle (edges joined to ``c1``
    by an odd number of 2-paths); ``sheet`` is the mod-2 union of 2-cells on
    the 2-paths ending at ``c1``.
    """

    c1: int
    cochain: Z2Chain
    sheet: Z2Chain


def one_cell_representative(V: GradientField, c1: int, X: Complex) -> OneCellRepresentative:
    counts = ascending_counts(V, c1, X, modulus=2)
    cochain = Z2Chain(1, frozenset(e for e in counts if X.dim(e) == 1))
    sheet: set[int] = set()
    for e, n in counts.items():
        t = V.up(e)
        if t is not None:
            sheet ^= {t}
    return OneCellRepresentative(c1, cochain, Z2Chain(2, frozenset(sheet)))


def is_cocycle(rep: OneCellRepresentative, X: Complex) -> tuple[bool, list[int]]:
    """Mod-2 coboundary test of the cochain; returns offending 2-cells."""
    bad = []
    for t in X.cells(2):
        if sum(1 for e in X.facets(t) if e in rep.cochain.cells) % 2:
            bad.append(t)
    return not bad, bad


@dataclass
class ParityData:
    matrix: dict[tuple[int, int], int]
    ones: list[int]
    twos: list[int]
    cores: dict[int, SolidTorusRegion]
    reps: dict[int, OneCellRepresentative]

    def rows(self) -> list[list[int]]:
        return [[self.matrix[(a, b)] for b in self.twos] for a in self.ones]


def parity_matrix(V: GradientField, X: Complex) -> ParityData:
    crit = critical_cells(V, X)
    ones = sorted(crit[1])
    twos = sorted(crit[2])
    cores = {c: solid_torus(V, c, X) for c in twos}
    loops = {c: edge_realization(st.core, X) for c, st in cores.items()}
    reps = {c: one_cell_representative(V, c, X) for c in ones}
    matrix = {}
    for a in ones:
        for b in twos:
            matrix[(a, b)] = pair_cochain(reps[a].cochain.cells, loops[b])
    return ParityData(matrix, ones, twos, cores, reps)


@dataclass
class Grouping:
    """``side_A`` goes with the critical 3-cell, ``side_B`` with the critical vertex."""

    side_A: frozenset
    side_B: frozenset
    parity: dict[tuple[int, int], int]
    components: list[frozenset]
    crit3: int | None
    crit0: int | None
    flags: list[tuple[int, int, int]] = field(default_factory=list)

    def cells_A(self) -> frozenset:
        return frozenset(c for c in self.side_A if c not in (self.crit3, self.crit0))

    def cells_B(self) -> frozenset:
        return frozenset(c for c in self.side_B if c not in (self.crit3, self.crit0))

    def as_dict(self) -> dict:
        return {
            "side_A": sorted(self.side_A),
            "side_B": sorted(self.side_B),
            "critical_3_cell": self.crit3,
            "critical_0_cell": self.crit0,
            "components": [sorted(c) for c in self.components],
            "parity": [[a, b, v] for (a, b), v in sorted(self.parity.items())],
            "flags": [list(f) for f in self.flags],
        }


def odd_components(data: ParityData) -> list[frozenset]:
    adj: dict[int, set[int]] = {c: set() for c in data.ones + data.twos}
    for (a, b), v in data.matrix.items():
        if v:
            adj[a].add(b)
            adj[b].add(a)
    seen: set[int] = set()
    comps = []
    for c in sorted(adj):
        if c in seen:
            continue
        comp = {c}
        stack = [c]
        seen.add(c)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(frozenset(comp))
    return comps


Selector = Callable[[list[frozenset]], Iterable[int]] | Iterable[int] | None


def group_critical_cells(V: GradientField, X: Complex, choose: Selector = None,
                         data: ParityData | None = None) -> Grouping:
    """Partition critical 1- and 2-cells by the components of the odd-parity graph.

    ``choose`` selects the components that go to side B: either a callable
    returning component indices, or a collection of critical cell ids (every
    component containing one of them is selected).
    """
    crit = critical_cells(V, X)
    top = X.dimension
    crit3 = min(crit[top]) if crit[top] else None
    crit0 = min(crit[0]) if crit[0] else None
    if data is None:
        data = parity_matrix(V, X)
    comps = odd_components(data)
    if choose is not None:
        if callable(choose):
            picked = set(choose(comps))
        else:
            wanted = set(choose)
            picked = {i for i, comp in enumerate(comps) if comp & wanted}
        side_b = [comps[i] for i in sorted(picked)]
        side_a = [comps[i] for i in range(len(comps)) if i not in picked]
    elif not comps:
        side_a, side_b = [], []
    elif len(comps) == 1:
        raise NotSeparable("odd-parity graph is connected", components=[sorted(comps[0])])
    elif len(comps) == 2:
        a, b = sorted(comps, key=lambda c: (len(c), -min(c)))
        side_a, side_b = [a], [b]
    else:
        raise AmbiguousGrouping(
            f"{len(comps)} odd-parity components; a selector is required",
            components=[sorted(c) for c in comps],
        )
    A = frozenset().union(*side_a) if side_a else frozenset()
    B = frozenset().union(*side_b) if side_b else frozenset()
    if crit3 is not None:
        A = A | {crit3}
    if crit0 is not None:
        B = B | {crit0}
    flags = []
    for c2 in data.twos:
        counts = descending_counts(V, c2, X)
        for c1 in data.ones:
            n = counts.get(c1, 0)
            if n and not data.matrix[(c1, c2)] and ((c1 in A) != (c2 in A)):
                flags.append((c1, c2, n))
    return Grouping(A, B, data.matrix, comps, crit3, crit0, flags)
