"""Test manifolds with known homology and perfect gradient fields."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .cellcomplex import Complex, orient
from .errors import FixtureError, GluingObstructed, NonOrientable, SearchExhausted
from .homology import BettiVector, betti
from .morse import GradientField, critical_cells, descending_counts, cancel_critical_pair

SHARED = "shared"


@dataclass
class LabeledManifold:
    name: str
    complex: Complex
    provenance: dict[int, str]
    known_betti: BettiVector
    # optional perfect field attached by the caller
    gradient: GradientField | None = None
    meta: dict = field(default_factory=dict)


# ----------------------------------------------------------------------
# product triangulations


def _staircase(bottom: list[int], top: list[int]) -> list[tuple[int, ...]]:
    """Staircase triangulation of a prism over an ordered simplex."""
    k = len(bottom)
    return [tuple(bottom[: i + 1]) + tuple(top[i:]) for i in range(k)]


def layered_product(base_facets, layers: int = 3, twist: dict[int, int] | None = None):
    """Triangulate ``base x S^1`` from ``layers`` copies of the base.

    Vertex ``(v, j)`` gets id ``j * n + index(v)``.  The last layer is
    glued back to the first through ``twist`` (a simplicial automorphism of
    the base, identity by default).
    """
    verts = sorted({v for f in base_facets for v in f})
    n = len(verts)
    idx = {v: i for i, v in enumerate(verts)}
    twist = twist or {}
    simplices = []
    for j in range(layers):
        nxt = (j + 1) % layers
        for f in base_facets:
            f = sorted(f, key=idx.__getitem__)
            bottom = [j * n + idx[v] for v in f]
            if nxt == 0:
                top = [idx[twist.get(v, v)] for v in f]
            else:
                top = [nxt * n + idx[v] for v in f]
            simplices.extend(_staircase(bottom, top))
    return simplices


def grid_torus(m: int = 3) -> list[tuple[int, int, int]]:
    """The ``m x m`` grid triangulation of the 2-torus (vertex ``i*m+j``)."""
    tris = []
    v = lambda i, j: (i % m) * m + (j % m)
    for i in range(m):
        for j in range(m):
            tris.append((v(i, j), v(i + 1, j), v(i + 1, j + 1)))
            tris.append((v(i, j), v(i, j + 1), v(i + 1, j + 1)))
    return tris


TETRA_BOUNDARY = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]


def standard_triangulation(name: str) -> LabeledManifold:
    """One of ``S3``, ``S2xS1``, ``T3``, or the non-orientable ``S2xS1~``."""
    if name == "S3":
        X = Complex.from_simplices(combinations(range(5), 4))
        b = (1, 0, 0, 1)
    elif name == "S2xS1":
        X = Complex.from_simplices(layered_product(TETRA_BOUNDARY))
        b = (1, 1, 1, 1)
    elif name == "T3":
        X = Complex.from_simplices(layered_product(grid_torus(3)))
        b = (1, 3, 3, 1)
    elif name == "S2xS1~":
        # reflection of the base sphere: the twisted bundle is non-orientable
        X = Complex.from_simplices(layered_product(TETRA_BOUNDARY, twist={0: 1, 1: 0}))
        return LabeledManifold(name, X, {c: name for c in X.cells()}, betti(X))
    else:
        raise FixtureError(f"unknown fixture {name!r}")
    orient(X)
    return LabeledManifold(name, X, {c: name for c in X.cells()}, BettiVector(b))


def connected_sum(A: LabeledManifold, B: LabeledManifold, tet_a: int | None = None,
                  tet_b: int | None = None) -> LabeledManifold:
    """Remove one tetrahedron from each and glue the two boundary spheres.

    B's vertices are shifted past A's; the gluing map is chosen so that the
    result carries a coherent orientation.
    """
    XA, XB = A.complex, B.complex
    ta = tet_a if tet_a is not None else max(XA.cells(3))
    tb = tet_b if tet_b is not None else min(XB.cells(3))
    off = max(XA.cells(0)) + 1
    va = sorted(XA.vertices(ta))
    vb = sorted(XB.vertices(tb))
    tags_a = set(A.provenance.values())
    rename = {}
    for t in set(B.provenance.values()):
        rename[t] = t if t not in tags_a or t == SHARED else t + "'"
    last_err = None
    for perm in ([0, 1, 2, 3], [1, 0, 2, 3]):
        glue = {vb[perm[i]]: va[i] for i in range(4)}
        mapv = lambda v: glue.get(v, v + off)
        simplices = [XA.vertices(c) for c in XA.cells(3) if c != ta]
        simplices += [frozenset(mapv(v) for v in XB.vertices(c)) for c in XB.cells(3) if c != tb]
        if len(set(simplices)) != len(simplices):
            raise GluingObstructed("gluing identifies two tetrahedra")
        X = Complex.from_simplices(simplices)
        try:
            orient(X)
        except NonOrientable as exc:
            last_err = exc
            continue
        prov: dict[int, str] = {}
        sphere = {X.cell_of(s) for k in range(1, 4) for s in combinations(va, k)}
        for c in XA.cells():
            if c == ta:
                continue
            prov[X.cell_of(XA.vertices(c))] = A.provenance.get(c, A.name)
        for c in XB.cells():
            if c == tb:
                continue
            prov[X.cell_of(frozenset(mapv(v) for v in XB.vertices(c)))] = rename[B.provenance.get(c, B.name)]
        for c in sphere:
            prov[c] = SHARED
        kb = tuple(
            A.known_betti[k] + B.known_betti[k] - (1 if k in (0, 3) else 0) for k in range(4)
        )
        meta = {
            "tags_A": sorted(tags_a - {SHARED}),
            "tags_B": sorted({rename[t] for t in B.provenance.values()} - {SHARED}),
            "betti_A": tuple(A.known_betti),
            "betti_B": tuple(B.known_betti),
        }
        return LabeledManifold(f"{A.name}#{B.name}", X, prov, BettiVector(kb), meta=meta)
    raise GluingObstructed(f"no orientable gluing found: {last_err}")


def fixture(name: str) -> LabeledManifold:
    """Standard names, or a ``#``-separated connected sum such as ``S2xS1#T3``."""
    parts = name.split("#")
    out = standard_triangulation(parts[0])
    for p in parts[1:]:
        out = connected_sum(out, standard_triangulation(p))
    return out


# ----------------------------------------------------------------------
# random fields


def random_collapse_field(X: Complex, rng: random.Random, stop_prob: float = 0.0,
                          phases: list[tuple[frozenset, int | None]] | None = None) -> GradientField:
    """Random discrete Morse field from a random collapse sequence.

    Repeatedly removes a random free face together with its unique coface;
    when stuck (or, with probability ``stop_prob``, at any step) a random
    maximal remaining cell is declared critical and removed.

    ``phases`` is an ordered list of ``(cells, first)``: the cells of each
    phase are removed before any later one is touched, starting with
    ``first`` (declared critical) when given.  Each phase must be closed
    under cofaces among the cells still present.
    """
    if phases is None:
        phases = [(frozenset(X.cells()), None)]
    alive = set(X.cells())
    n_co = {c: len(X.cofacets(c)) for c in alive}
    pairs = []

    def remove(c):
        alive.discard(c)
        for f in X.facets(c):
            n_co[f] -= 1
            if n_co[f] == 1 and f in current:
                free.append(f)

    for cells, first in phases:
        current = set(cells) & alive
        free = [c for c in current if n_co[c] == 1]
        if first is not None and first in alive:
            current.discard(first)
            remove(first)
        while current:
            pick = None
            if not (stop_prob and rng.random() < stop_prob):
                while free:
                    i = rng.randrange(len(free))
                    free[i], free[-1] = free[-1], free[i]
                    c = free.pop()
                    if c in current and n_co[c] == 1:
                        pick = c
                        break
            if pick is not None:
                (t,) = [t for t in X.cofacets(pick) if t in alive]
                pairs.append((pick, t))
                current.discard(t)
                current.discard(pick)
                remove(t)
                remove(pick)
                continue
            top = max(X.dim(c) for c in current if n_co[c] == 0)
            c = rng.choice(sorted(c for c in current if n_co[c] == 0 and X.dim(c) == top))
            current.discard(c)
            remove(c)
    return GradientField(frozenset(pairs))


def cancel_greedily(V: GradientField, X: Complex, target, rng: random.Random | None = None,
                    max_rounds: int = 1000, allowed=None) -> GradientField:
    """Cancel critical pairs joined by a unique V-path until counts reach ``target``.

    ``allowed(sigma, tau)`` may veto individual cancellations.
    """
    target = tuple(target)
    for _ in range(max_rounds):
        crit = critical_cells(V, X)
        counts = crit.counts(X.dimension)
        if counts == target:
            return V
        done = False
        dims = list(range(X.dimension - 1, -1, -1))
        if rng is not None:
            rng.shuffle(dims)
        for p in dims:
            if counts[p] <= target[p] or counts[p + 1] <= target[p + 1]:
                continue
            taus = sorted(crit[p + 1])
            if rng is not None:
                rng.shuffle(taus)
            for tau in taus:
                cnt = descending_counts(V, tau, X)
                sigmas = sorted(
                    s for s in crit[p] if cnt.get(s) == 1 and (allowed is None or allowed(s, tau))
                )
                if not sigmas:
                    continue
                sigma = sigmas[0] if rng is None else rng.choice(sigmas)
                V = cancel_critical_pair(V, sigma, tau, X)
                done = True
                break
            if done:
                break
        if not done:
            return V
    return V


def perfect_field_search(X: Complex, seed: int = 0, max_retries: int = 50,
                         betti_numbers=None, summands: LabeledManifold | None = None) -> GradientField:
    """Random collapse followed by greedy cancellation, reseeded until perfect.

    With ``summands`` (a labeled connected sum of ``X``) the field is built
    to respect the summands, see ``adapted_field_search``.
    """
    if summands is not None:
        if summands.complex is not X:
            raise FixtureError("summand labels belong to a different complex")
        return adapted_field_search(summands, seed, max_retries)
    target = tuple(betti_numbers if betti_numbers is not None else betti(X))
    for attempt in range(max_retries):
        rng = random.Random(f"{seed}:{attempt}")
        V = random_collapse_field(X, rng)
        V = cancel_greedily(V, X, target, rng)
        if critical_cells(V, X).counts(X.dimension) == target:
            return V
    raise SearchExhausted(f"no perfect field after {max_retries} attempts", seed=seed)


def adapted_field_search(L: LabeledManifold, seed: int = 0, max_retries: int = 50) -> GradientField:
    """Perfect field on a two-summand connected sum that respects the summands.

    The cells are processed in three parts: B (outside the closed A side),
    the open A side, and the gluing sphere S.  Each part is collapsed on
    its own; the open A side starts from a tetrahedron ``T`` next to a
    triangle ``t0`` of S, S starts from ``t0``, and finally ``t0`` is paired
    with ``T``.  Gradient flow then passes from B into S and from S into the
    A side only through ``t0``, so every critical cell's homology class
    lives in its own summand.  Cancellations never join two parts.
    """
    X = L.complex
    tags_a = set(L.meta.get("tags_A", ()))
    if not tags_a:
        raise FixtureError("adapted search needs a connected-sum fixture")
    sphere = frozenset(c for c in X.cells() if L.provenance[c] == SHARED)
    a_open = frozenset(c for c in X.cells() if L.provenance[c] in tags_a)
    b_open = frozenset(X.cells()) - sphere - a_open
    part = {c: 0 for c in b_open}
    part.update({c: 1 for c in a_open})
    part.update({c: 2 for c in sphere})
    target = tuple(L.known_betti)
    tris = sorted(c for c in sphere if X.dim(c) == 2)
    for attempt in range(max_retries):
        rng = random.Random(f"adapted:{seed}:{attempt}")
        t0 = rng.choice(tris)
        (T,) = [t for t in X.cofacets(t0) if t in a_open]
        V = random_collapse_field(X, rng, phases=[(b_open, None), (a_open, T), (sphere, t0)])
        V = GradientField(V.pairs | {(t0, T)})
        V = cancel_greedily(V, X, target, rng, allowed=lambda s, t: part[s] == part[t])
        if critical_cells(V, X).counts(X.dimension) == target:
            return V
    raise SearchExhausted(f"no adapted perfect field after {max_retries} attempts", seed=seed)


# ----------------------------------------------------------------------
# a gradient field on a 13-vertex sphere with critical cells
# v9; [v5,v6], [v1,v9], [v8,v12]; [v0,v1,v3], [v2,v8,v9], [v3,v4,v7], [v10,v11,v12]

SPHERE13_TRIANGLES = [
    (0, 1, 3), (0, 1, 11), (0, 3, 4), (0, 4, 7), (0, 5, 6), (0, 5, 12), (0, 6, 11),
    (0, 7, 12), (1, 2, 8), (1, 2, 9), (1, 3, 9), (1, 8, 12), (1, 10, 11), (1, 10, 12),
    (2, 8, 9), (3, 4, 7), (3, 7, 9), (5, 6, 11), (5, 11, 12), (7, 9, 12), (8, 9, 12),
    (10, 11, 12),
]
# vertex -> the edge it is paired with (a spanning tree rooted at v9)
SPHERE13_TREE = {
    0: (0, 3), 1: (1, 8), 2: (2, 9), 3: (3, 9), 4: (3, 4), 5: (0, 5), 6: (6, 11),
    7: (3, 7), 8: (8, 9), 10: (1, 10), 11: (1, 11), 12: (0, 12),
}
SPHERE13_CRITICAL = {
    "v9": (9,),
    "e1": (5, 6), "e2": (1, 9), "e3": (8, 12),
    "s1": (0, 1, 3), "s2": (2, 8, 9), "s3": (3, 4, 7), "s4": (10, 11, 12),
}


def sphere13() -> LabeledManifold:
    """The 13-vertex sphere with its gradient field; ``meta["critical"]`` names the critical cells."""
    X = Complex.from_simplices(SPHERE13_TRIANGLES, labels={v: f"v{v}" for v in range(13)})
    pairs = {(X.cell_of((v,)), X.cell_of(e)) for v, e in SPHERE13_TREE.items()}
    crit = {name: X.cell_of(vs) for name, vs in SPHERE13_CRITICAL.items()}
    used = {c for p in pairs for c in p} | set(crit.values())
    # orient each dual tree away from its critical triangle
    for name in ("s1", "s2", "s3", "s4"):
        stack = [crit[name]]
        seen = {crit[name]}
        while stack:
            t = stack.pop()
            for e in X.facets(t):
                if e in used:
                    continue
                (u,) = [s for s in X.cofacets(e) if s != t]
                if u in seen or u in used:
                    continue
                pairs.add((e, u))
                used |= {e, u}
                seen.add(u)
                stack.append(u)
    V = GradientField(frozenset(pairs))
    prov = {c: "S2" for c in X.cells()}
    return LabeledManifold("sphere13", X, prov, BettiVector((1, 0, 1)), gradient=V,
                           meta={"critical": crit})
