"""Separate the summands of a perfect field by an embedded 2-sphere.

The region interior ``U`` is the set of cells lying above the critical
3-cell and the side-A critical cells in the order induced by the field
(faces below cofaces, arrow heads below their tails), closed under arrows.
It is open and never split by an arrow, so its complement ``K`` is a
subcomplex carrying the rest of the field.

Two subdivisions turn the frontier into a surface:

* ``prepare`` derives every cell of ``U`` (new vertices coloured ``U``,
  old vertices coloured by side), so a simplex lies in ``U`` exactly when
  it has a ``U`` vertex;
* ``cut`` derives the simplices having both a ``U`` and a ``K`` vertex
  (new vertices coloured ``S``).  After a full cut the frontier consists of
  ``S``-only simplices: the boundary of a derived neighbourhood of ``K``.

Arrows follow each subdivision: inside the open cell of a derived simplex
``x`` (the cone ``b_x * B_x`` over its subdivided boundary) the arrows are
lifted from a collapse of ``B_x`` minus one top cell, and the arrow at
``x`` itself moves to representatives ``rep(a) -> rep(x)``.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .cellcomplex import (
    Complex,
    Region,
    SubdivisionTrace,
    check_3manifold_with_boundary,
    double,
    euler_characteristic,
    extract_boundary,
    stellar_subdivide,
    surface_report,
)
from .errors import (
    ChiNotTwo,
    ComplexError,
    CyclicField,
    DisconnectedBoundary,
    PairingConflict,
    PreconditionFailed,
    RepairLoopLimit,
    SubdivisionError,
)
from .grouping import Grouping, top_path_to
from .homology import betti
from .morse import GradientField, VPath, ascending_counts, critical_cells, validate_acyclic

U, K, S = "U", "K", "S"


@dataclass
class SeparationState:
    complex: Complex
    field: GradientField
    region: Region
    colors: dict[int, str] = field(default_factory=dict)
    interior: frozenset = frozenset()
    trace: SubdivisionTrace | None = None
    log: list[dict] = field(default_factory=list)
    stage: str = "initial"
    grouping: Grouping | None = None
    # Betti vector every repair must preserve (checked when set)
    reference: tuple | None = None

    def kside(self) -> frozenset:
        """Cells of the complement side (closed)."""
        return frozenset(self.complex.cells()) - self.interior

    def frontier(self) -> frozenset:
        return self.region.cells - self.interior


@dataclass
class SphereCertificate:
    surface: Complex
    euler: int
    connected: bool
    orientable: bool
    closed: bool
    no_inward_arrows: bool
    inward_arrows: list[tuple[int, int]]
    chi_region_B: int
    chi_double_B: int
    chi_boundary: int
    critical_B: tuple[int, ...]
    critical_A: tuple[int, ...]
    manifold_A: bool
    manifold_B: bool

    @property
    def identities_ok(self) -> bool:
        """chi(M-M2) = 1, chi of its double = 0, and the double formula."""
        return (
            self.chi_region_B == 1
            and self.chi_double_B == 0
            and 2 * self.chi_region_B - self.chi_boundary == self.chi_double_B
        )

    @property
    def counts_ok(self) -> bool:
        m = self.critical_B
        return m[0] == 1 and m[-1] == 0 and m[1] == m[2]

    @property
    def ok(self) -> bool:
        return (
            self.identities_ok
            and self.counts_ok
            and self.euler == 2
            and self.connected
            and self.orientable
            and self.closed
            and self.no_inward_arrows
            and self.manifold_A
            and self.manifold_B
        )

    def as_dict(self) -> dict:
        return {
            "euler": self.euler,
            "connected": self.connected,
            "orientable": self.orientable,
            "closed": self.closed,
            "no_inward_arrows": self.no_inward_arrows,
            "ok": self.ok,
            "chi_M_minus_M2": self.chi_region_B,
            "chi_double_M_minus_M2": self.chi_double_B,
            "surface_counts": list(self.surface.counts()),
            "critical_M_minus_M2": list(self.critical_B),
            "critical_M_minus_M1": list(self.critical_A),
            "manifold_M_minus_M1": self.manifold_A,
            "manifold_M_minus_M2": self.manifold_B,
        }


# ----------------------------------------------------------------------
# the initial region


def _lower_neighbours(V: GradientField, X: Complex, x: int) -> list[int]:
    out = [f for f in X.facets(x) if V.up(f) != x]
    h = V.up(x)
    if h is not None:
        out.append(h)
    return out


def region_interior(V: GradientField, X: Complex, seeds) -> frozenset:
    """Cells above the seeds in the field order, closed under arrows."""
    upper: dict[int, list[int]] = defaultdict(list)
    for x in X.cells():
        for y in _lower_neighbours(V, X, x):
            upper[y].append(x)
    out: set[int] = set()
    stack = list(seeds)
    while stack:
        x = stack.pop()
        if x in out:
            continue
        out.add(x)
        stack.extend(upper[x])
        h = V.up(x)
        if h is not None and h not in out:
            stack.append(h)
        t = V.down(x)
        if t is not None and t not in out:
            stack.append(t)
    return frozenset(out)


def core_region_cells(V: GradientField, X: Complex, grouping: Grouping) -> frozenset:
    """Critical 3-cell, the 3-paths to side-A critical 2-cells and the 2-paths into side-A critical 1-cells."""
    cells = set()
    if grouping.crit3 is not None:
        cells.add(grouping.crit3)
    for c in grouping.cells_A():
        cells.add(c)
        if X.dim(c) == 2:
            for t in X.cofacets(c):
                cells.update(top_path_to(V, X, t).sequence)
        elif X.dim(c) == 1:
            for e in ascending_counts(V, c, X):
                cells.add(e)
                if V.up(e) is not None:
                    cells.add(V.up(e))
    return X.closure(cells)


def initial_region(V: GradientField, grouping: Grouping, X: Complex) -> SeparationState:
    seeds = set(grouping.cells_A())
    if grouping.crit3 is not None:
        seeds.add(grouping.crit3)
    inner = region_interior(V, X, seeds)
    crit = critical_cells(V, X).all()
    stray = sorted((inner & crit) - grouping.side_A)
    if stray:
        raise PairingConflict(
            f"critical cells {stray} of side B flow into the side-A region", cells=stray
        )
    R = Region(X, X.closure(inner))
    st = SeparationState(X, V, R, interior=inner, grouping=grouping)
    st.log.append({"kind": "initial", "interior": len(inner), "region": len(R.cells)})
    return st


# ----------------------------------------------------------------------
# field transport through a partial derived subdivision


def _greedy_collapse(Z: Complex, cells: set[int], keep: set[int]) -> list[tuple[int, int]] | None:
    """Collapse ``cells`` onto ``keep`` by free pairs; None when stuck."""
    rem = set(cells)
    pairs = []
    progress = True
    while progress and rem - keep:
        progress = False
        for a in sorted(rem - keep):
            if a not in rem:
                continue
            cof = [b for b in Z.cofacets(a) if b in rem]
            if len(cof) != 1 or cof[0] in keep:
                continue
            b = cof[0]
            pairs.append((a, b))
            rem.discard(a)
            rem.discard(b)
            progress = True
    if rem - keep:
        return None
    return pairs


def transport_field(
    X: Complex,
    W: GradientField,
    Z: Complex,
    trace: SubdivisionTrace,
    colors: dict[int, str] | None = None,
) -> tuple[GradientField, dict[int, int]]:
    """Carry ``W`` from ``X`` to its partial derived subdivision ``Z``.

    With ``colors`` given, the arrows respect the split into simplices with
    and without a ``U`` vertex.  Returns the new field and the
    representative of every derived cell.
    """
    derived = sorted(trace.apex, key=lambda c: (X.dim(c), c))
    has_u = (lambda c: any(colors.get(v) == U for v in Z.vertices(c))) if colors else None
    rep: dict[int, int] = {}
    pairs: set[tuple[int, int]] = set()
    T = set(derived)
    for s, t in W.pairs:
        if s not in T and t not in T:
            pairs.add((s, t))
    for x in derived:
        b = trace.apex[x]
        bx = set()
        for y in trace.old_to_new[x]:
            vs = Z.vertices(y)
            if b in vs and len(vs) > 1:
                bx.add(Z.cell_of(vs - {b}))
        top = X.dim(x) - 1
        tops = sorted(c for c in bx if Z.dim(c) == top)
        a = W.down(x)
        if a is not None:
            t0 = rep.get(a, a)
            if t0 not in bx:
                raise PairingConflict(f"representative of {a} is not on the boundary of {x}", cell=x)
        else:
            cand = [c for c in tops if has_u is None or has_u(c)]
            if not cand:
                raise PairingConflict(f"no admissible top cell in the boundary of {x}", cell=x)
            t0 = cand[0]
        lift = lambda c: Z.cell_of(Z.vertices(c) | {b})
        rep[x] = lift(t0)
        if has_u is None:
            L = None
            verts = sorted(c for c in bx if Z.dim(c) == 0 and c not in Z.closure([t0]))
            verts = verts or sorted(c for c in bx if Z.dim(c) == 0)
            chosen = None
            for v0 in verts:
                coll = _greedy_collapse(Z, bx - {t0}, {v0})
                if coll is not None:
                    chosen = (v0, coll)
                    break
            if chosen is None:
                raise PairingConflict(f"boundary of {x} does not collapse", cell=x)
            v0, coll = chosen
        else:
            L = {c for c in bx if not has_u(c)}
            coll = _greedy_collapse(Z, bx - {t0}, L)
            if coll is None:
                raise PairingConflict(f"boundary of {x} does not collapse onto its K part", cell=x)
            v0 = None
            for cand_v in sorted(c for c in L if Z.dim(c) == 0):
                more = _greedy_collapse(Z, L, {cand_v})
                if more is not None:
                    v0 = cand_v
                    coll = coll + more
                    break
            if v0 is None:
                raise PairingConflict(f"K part of the boundary of {x} does not collapse", cell=x)
        for p, q in coll:
            pairs.add((lift(p), lift(q)))
        pairs.add((b, lift(v0)))
        if a is not None:
            pairs.add((rep.get(a, a), rep[x]))
    return GradientField(frozenset(pairs)), rep


# ----------------------------------------------------------------------
# repairs


def _record(state: SeparationState, kind: str, targets, check: bool) -> None:
    entry = {"kind": kind, "targets": sorted(targets)[:20], "n_targets": len(targets),
             "counts": list(state.complex.counts())}
    if check:
        entry["betti"] = list(betti(state.complex).b)
        ok, cyc = validate_acyclic(state.field, state.complex)
        entry["acyclic"] = ok
        state.log.append(entry)
        if state.reference is not None and tuple(entry["betti"]) != tuple(state.reference):
            raise SubdivisionError(f"{kind} changed the Betti vector to {entry['betti']}", log=state.log)
        if not ok:
            raise CyclicField(f"{kind} produced a closed V-path", cycle=cyc)
        return
    state.log.append(entry)


def _colored_region(Z: Complex, colors: dict[int, str]) -> tuple[frozenset, Region]:
    inner = frozenset(c for c in Z.cells() if any(colors.get(v) == U for v in Z.vertices(c)))
    return inner, Region(Z, Z.closure(inner))


def prepare(state: SeparationState, check: bool = False) -> SeparationState:
    """Derive every cell of the region interior."""
    if state.stage != "initial":
        raise PreconditionFailed("state is already prepared")
    X, W = state.complex, state.field
    targets = [c for c in state.interior if X.dim(c) > 0]
    Z, tr = stellar_subdivide(X, targets, provenance="prepare")
    V, _ = transport_field(X, W, Z, tr)
    colors = {v: (U if v in state.interior else K) for v in X.cells(0)}
    for b in tr.apex.values():
        colors[b] = U
    inner, R = _colored_region(Z, colors)
    out = SeparationState(Z, V, R, colors, inner, tr, list(state.log), "prepared", state.grouping, state.reference)
    _record(out, "prepare", targets, check)
    return out


def straddling(state: SeparationState) -> frozenset:
    Z, col = state.complex, state.colors
    out = set()
    for c in Z.cells():
        if Z.dim(c) == 0:
            continue
        cs = {col[v] for v in Z.vertices(c)}
        if U in cs and K in cs:
            out.add(c)
    return frozenset(out)


def cut(state: SeparationState, targets=None, kind: str = "cut", check: bool = False) -> SeparationState:
    """Derive straddling simplices (all of them, or the up-closure of ``targets``)."""
    if state.stage == "initial":
        raise PreconditionFailed("prepare the state before cutting")
    X, W = state.complex, state.field
    strad = straddling(state)
    if targets is None:
        T = set(strad)
    else:
        T = set(X.upward([c for c in targets if c in strad])) & strad
    if not T:
        raise PreconditionFailed("no straddling simplices to cut")
    Z, tr = stellar_subdivide(X, T, provenance=kind)
    colors = dict(state.colors)
    for b in tr.apex.values():
        colors[b] = S
    V, _ = transport_field(X, W, Z, tr, colors)
    inner, R = _colored_region(Z, colors)
    trace = state.trace.then(tr) if state.trace is not None else tr
    out = SeparationState(Z, V, R, colors, inner, trace, list(state.log), "cut", state.grouping, state.reference)
    _record(out, kind, T, check)
    return out


def _local_targets(state: SeparationState, cells) -> set[int]:
    X = state.complex
    near: set[int] = set()
    for c in cells:
        near |= X.star(c).cells
    return near


def separate_along_2path(state: SeparationState, gamma: VPath, check: bool = False) -> SeparationState:
    """Cut around a 2-path lying between two parts of the region."""
    X = state.complex
    front = state.frontier()
    shared = [
        c for c in gamma.sequence
        if X.dim(c) == 2 and c in front and all(t in state.interior for t in X.cofacets(c))
    ]
    if not shared:
        raise PreconditionFailed("2-path is not shared by two parts of the region")
    return cut(state, _local_targets(state, gamma.sequence), kind="separate_2path", check=check)


def separate_along_1path(state: SeparationState, mu: VPath, check: bool = False) -> SeparationState:
    """Cut around a 1-path whose star lies in the region."""
    X = state.complex
    front = state.frontier()
    shared = [
        c for c in mu.sequence
        if X.dim(c) == 1 and c in front
        and all(t in state.interior for t in X.upward([c]) if X.dim(t) == 3)
    ]
    if not shared:
        raise PreconditionFailed("1-path is not shared by parts of the region")
    return cut(state, _local_targets(state, mu.sequence), kind="separate_1path", check=check)


def boundary_defects(state: SeparationState) -> list[tuple[str, int]]:
    """Frontier cells that keep it from being a 2-sphere of the right kind."""
    X = state.complex
    front = state.frontier()
    inner = state.interior
    out = []
    for c in sorted(front):
        d = X.dim(c)
        if d == 2 and all(t in inner for t in X.cofacets(c)):
            out.append(("shared_2path", c))
        elif d == 1 and all(t in inner for t in X.upward([c]) if X.dim(t) == 3):
            out.append(("shared_1path", c))
        elif d == 3:
            out.append(("solid_frontier", c))
    surf = extract_boundary(state.region)
    rep = check_3manifold_with_boundary(state.region)
    for kind, cells in rep.offenders.items():
        for c in cells:
            out.append(("non_manifold", c))
    crit = critical_cells(state.field, X)
    for c in sorted(crit.all() & front):
        out.append(("critical", c))
    bset = set(surf.cells())
    for c in sorted(front - bset):
        if not any(k == "shared_2path" and x == c for k, x in out):
            out.append(("off_surface", c))
    return out


def repair_boundary_cell(state: SeparationState, c: int, check: bool = False) -> SeparationState:
    kinds = {k for k, x in boundary_defects(state) if x == c}
    if not kinds:
        raise PreconditionFailed(f"cell {c} is a regular frontier cell")
    return cut(state, _local_targets(state, [c]), kind="repair_boundary", check=check)


# ----------------------------------------------------------------------
# certification


def certify(state: SeparationState) -> tuple[SphereCertificate, Region, Region]:
    X, V = state.complex, state.field
    RA = state.region
    kcells = state.kside()
    RB = Region(X, kcells)
    surf = extract_boundary(RA)
    rep = surface_report(surf)
    scells = set(surf.cells())
    inward = sorted((s, t) for s, t in V.pairs if s in scells and t in RA.cells and t not in scells)
    crit_b = critical_cells(V, X, kcells).counts(X.dimension)
    crit_a = critical_cells(V, X, state.interior).counts(X.dimension)
    chi_b = euler_characteristic(RB)
    try:
        chi_double = euler_characteristic(double(RB))
    except ComplexError:
        chi_double = None
    cert = SphereCertificate(
        surface=surf,
        euler=rep.euler,
        connected=rep.connected,
        orientable=rep.orientable,
        closed=rep.closed,
        no_inward_arrows=not inward,
        inward_arrows=inward[:20],
        chi_region_B=chi_b,
        chi_double_B=chi_double,
        chi_boundary=rep.euler,
        critical_B=crit_b,
        critical_A=crit_a,
        manifold_A=bool(check_3manifold_with_boundary(RA)),
        manifold_B=bool(check_3manifold_with_boundary(RB)),
    )
    return cert, RA, RB


@dataclass
class SeparationResult:
    certificate: SphereCertificate
    region_A: Region
    region_B: Region
    complex: Complex
    field: GradientField
    state: SeparationState

    def __iter__(self):
        return iter((self.certificate, self.region_A, self.region_B, self.complex, self.field))


def build_separating_sphere(
    V: GradientField,
    grouping: Grouping,
    X: Complex,
    strategy: str = "global",
    max_iter: int | None = None,
    check: bool = False,
) -> SeparationResult:
    """Subdivide until the region boundary is a 2-sphere and certify it.

    ``strategy="global"`` cuts every straddling simplex at once;
    ``"local"`` repairs one defect at a time (shared 2-paths, then shared
    1-paths, then other boundary cells) and finishes with a global cut of
    whatever straddles afterwards.
    """
    state = initial_region(V, grouping, X)
    if check:
        state.reference = tuple(betti(X).b)
    state = prepare(state, check=check)
    if max_iter is None:
        max_iter = 10 * len(X.cells(3))
    if strategy == "local":
        order = {"shared_2path": 0, "shared_1path": 1}
        for it in range(max_iter + 1):
            defects = boundary_defects(state)
            if not defects:
                break
            if it == max_iter:
                raise RepairLoopLimit(
                    f"repair loop did not settle after {max_iter} passes",
                    remaining=[list(d) for d in defects[:10]],
                )
            defects.sort(key=lambda d: (order.get(d[0], 2), d[1]))
            kind, c = defects[0]
            local = _local_targets(state, [c])
            if not (local & straddling(state)):
                break
            state = cut(state, local, kind=f"repair_{kind}", check=check)
        if straddling(state):
            state = cut(state, None, kind="cut_remaining", check=check)
    elif strategy == "global":
        state = cut(state, None, kind="cut", check=check)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    cert, RA, RB = certify(state)
    if not cert.closed or not cert.orientable:
        raise ChiNotTwo("separating surface is not a closed orientable surface", certificate=cert.as_dict())
    if not cert.connected:
        raise DisconnectedBoundary("separating surface is disconnected", certificate=cert.as_dict())
    if cert.euler != 2:
        raise ChiNotTwo(f"separating surface has Euler characteristic {cert.euler}", certificate=cert.as_dict())
    if not cert.no_inward_arrows:
        raise PairingConflict("arrows point from the sphere into the region", pairs=cert.inward_arrows)
    if not cert.ok:
        raise ChiNotTwo("Euler characteristic identities or critical counts fail", certificate=cert.as_dict())
    return SeparationResult(cert, RA, RB, state.complex, state.field, state)
