"""Integer and mod-2 chain computations.

Betti numbers are computed by eliminating unit-coefficient incidences
(an exact change of basis over the integers) and running a Smith normal
form on whatever small residual remains.
"""
from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

from .cellcomplex import Complex
from .errors import NotACycle


@dataclass
class BoundaryMatrix:
    k: int
    rows: list[int]
    cols: list[int]
    entries: dict[tuple[int, int], int]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * len(self.cols) for _ in self.rows]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out


def boundary_matrix(X: Complex, k: int) -> BoundaryMatrix:
    rows = X.cells(k - 1)
    cols = X.cells(k)
    ri = {c: i for i, c in enumerate(rows)}
    entries: dict[tuple[int, int], int] = {}
    for j, c in enumerate(cols):
        for f, s in X.signed_facets(c):
            key = (ri[f], j)
            entries[key] = entries.get(key, 0) + s
    return BoundaryMatrix(k, rows, cols, {key: v for key, v in entries.items() if v})


def matmul(A: list[list[int]], B: list[list[int]]) -> list[list[int]]:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][t] * B[t][j] for t in range(inner)) for j in range(cols)] for i in range(len(A))]


@dataclass
class SmithForm:
    factors: list[int]
    L: list[list[int]]
    D: list[list[int]]
    R: list[list[int]]


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A: list[list[int]]) -> SmithForm:
    """Smith normal form ``A = L D R`` with unimodular ``L`` and ``R``.

    Row operations applied to ``D`` are mirrored as inverse column
    operations on ``L`` and column operations as inverse row operations on
    ``R``, so the product identity holds at every step.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(r) for r in A]
    L = _identity(m)
    R = _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        for row in L:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        R[i], R[j] = R[j], R[i]

    def add_row(src, dst, q):
        # row_dst += q * row_src ; L <- L * E^-1 : col_src -= q * col_dst
        if q == 0:
            return
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        for row in L:
            row[src] -= q * row[dst]

    def add_col(src, dst, q):
        # col_dst += q * col_src ; R <- E^-1 * R : row_src -= q * row_dst
        if q == 0:
            return
        for row in D:
            row[dst] += q * row[src]
        R[src] = [a - q * b for a, b in zip(R[src], R[dst])]

    def negate_row(i):
        D[i] = [-a for a in D[i]]
        for row in L:
            row[i] = -row[i]

    t = 0
    while t < min(m, n):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = D[t][t]
            changed = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // p))
                    if D[i][t]:
                        swap_rows(t, i)
                        changed = True
                        break
            if changed:
                continue
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // p))
                    if D[t][j]:
                        swap_cols(t, j)
                        changed = True
                        break
            if changed:
                continue
            # pivot row and column are clear; enforce divisibility
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if D[t][t] < 0:
            negate_row(t)
        t += 1
    factors = [D[i][i] for i in range(min(m, n)) if D[i][i]]
    return SmithForm(factors, L, D, R)


@dataclass
class BettiVector:
    b: tuple[int, ...]
    torsion: dict[int, list[int]] = field(default_factory=dict)

    def __getitem__(self, k: int) -> int:
        return self.b[k] if 0 <= k < len(self.b) else 0

    def __iter__(self):
        return iter(self.b)

    def __eq__(self, other):
        if isinstance(other, BettiVector):
            return self.b == other.b and self.torsion == other.torsion
        return tuple(self.b) == tuple(other)

    def as_dict(self) -> dict:
        return {"betti": list(self.b), "torsion": {str(k): v for k, v in sorted(self.torsion.items())}}


def _reduce_chain_complex(X: Complex):
    """Eliminate pairs (sigma, tau) with unit incidence until none remain.

    Returns the residual boundary maps as ``bd[k][tau] = {sigma: coef}``.
    """
    top = X.dimension
    bd: list[dict[int, dict[int, int]]] = [dict() for _ in range(top + 2)]
    co: list[dict[int, set[int]]] = [defaultdict(set) for _ in range(top + 2)]
    for c in X.cells():
        k = X.dim(c)
        col: dict[int, int] = {}
        for f, s in X.signed_facets(c):
            col[f] = col.get(f, 0) + s
        col = {f: v for f, v in col.items() if v}
        bd[k][c] = col
        for f in col:
            co[k][f].add(c)
    # bottom-up, shortest column first: most eliminations are then
    # co-collapses (a column with a single entry) and create no fill-in
    for k in range(1, top + 1):
        cols = bd[k]
        rows = co[k]
        heap = [(len(col), tau) for tau, col in cols.items()]
        heapq.heapify(heap)
        while heap:
            n, tau = heapq.heappop(heap)
            col = cols.get(tau)
            if col is None or len(col) != n:
                continue
            units = [f for f, v in col.items() if v in (1, -1)]
            if not units:
                continue
            sigma = min(units, key=lambda f: (len(rows[f]), f))
            alpha = col[sigma]
            rest = {f: v for f, v in col.items() if f != sigma}
            for other in list(rows[sigma]):
                if other == tau:
                    continue
                ocol = cols[other]
                b = ocol.pop(sigma)
                q = b * alpha  # alpha^-1 == alpha for units
                for f, v in rest.items():
                    nv = ocol.get(f, 0) - q * v
                    if nv:
                        if f not in ocol:
                            rows[f].add(other)
                        ocol[f] = nv
                    elif f in ocol:
                        del ocol[f]
                        rows[f].discard(other)
                heapq.heappush(heap, (len(ocol), other))
            for f in col:
                rows[f].discard(tau)
            del rows[sigma]
            del cols[tau]
            # tau disappears from the rows of the next map up
            if k + 1 <= top:
                for rho in list(co[k + 1].get(tau, ())):
                    bd[k + 1][rho].pop(tau, None)
                co[k + 1].pop(tau, None)
            # sigma disappears from the columns of the map below
            if sigma in bd[k - 1]:
                for f in bd[k - 1][sigma]:
                    co[k - 1][f].discard(sigma)
                del bd[k - 1][sigma]
    return bd


def betti(X: Complex) -> BettiVector:
    top = X.dimension
    bd = _reduce_chain_complex(X)
    ranks = [0] * (top + 2)
    torsion: dict[int, list[int]] = {}
    for k in range(1, top + 1):
        cols = sorted(c for c, col in bd[k].items() if col)
        if not cols:
            continue
        rows = sorted({f for c in cols for f in bd[k][c]})
        ri = {f: i for i, f in enumerate(rows)}
        A = [[0] * len(cols) for _ in rows]
        for j, c in enumerate(cols):
            for f, v in bd[k][c].items():
                A[ri[f]][j] = v
        factors = smith_normal_form(A).factors
        ranks[k] = len(factors)
        tors = [abs(d) for d in factors if abs(d) > 1]
        if tors:
            torsion[k - 1] = tors
    sizes = [0] * (top + 1)
    for k in range(top + 1):
        sizes[k] = len(bd[k])
    b = tuple(sizes[k] - ranks[k] - ranks[k + 1] for k in range(top + 1))
    return BettiVector(b, torsion)


# ----------------------------------------------------------------------
# mod 2 chains


@dataclass(frozen=True)
class Z2Chain:
    dim: int
    cells: frozenset

    @classmethod
    def from_cells(cls, dim: int, cells: Iterable[int]) -> "Z2Chain":
        return cls(dim, frozenset(cells))

    def __add__(self, other: "Z2Chain") -> "Z2Chain":
        if other.dim != self.dim:
            raise ValueError("cannot add chains of different dimensions")
        return Z2Chain(self.dim, self.cells ^ other.cells)

    def check(self, X: Complex) -> None:
        for c in self.cells:
            if X.dim(c) != self.dim:
                raise ValueError(f"cell {c} does not have dimension {self.dim}")


def z2_boundary(chain: Z2Chain, X: Complex) -> Z2Chain:
    out: set[int] = set()
    for c in chain.cells:
        for f, s in X.signed_facets(c):
            out ^= {f}
    return Z2Chain(chain.dim - 1, frozenset(out))


def is_z2_cycle(chain: Z2Chain, X: Complex) -> tuple[bool, frozenset]:
    """Whether the mod-2 boundary vanishes, with the offending cells."""
    chain.check(X)
    if chain.dim == 0:
        return True, frozenset()
    bd = z2_boundary(chain, X).cells
    return not bd, bd


@dataclass(frozen=True)
class DualOneCycle:
    """Closed loop of 3-cells; ``gates[i]`` is shared by ``loop[i]`` and ``loop[i+1]``."""

    loop: tuple[int, ...]
    gates: tuple[int, ...]
    marked: int | None = None

    def validate(self, X: Complex) -> None:
        n = len(self.loop)
        if n == 0 or len(self.gates) != n:
            raise ValueError("a dual loop needs one gate per 3-cell")
        for i in range(n):
            a, b, g = self.loop[i], self.loop[(i + 1) % n], self.gates[i]
            if g not in X.facets(a) or g not in X.facets(b):
                raise ValueError(f"gate {g} is not shared by 3-cells {a} and {b}")
            if a == b:
                raise ValueError(f"gate {g} joins 3-cell {a} to itself")
        if self.marked is not None and self.marked not in self.gates:
            raise ValueError("the marked gate is not on the loop")


def intersection_parity(L: DualOneCycle, Z: Z2Chain, X: Complex) -> int:
    """Mod-2 count of passages of a dual loop through the 2-cells of a 2-cycle."""
    ok, bad = is_z2_cycle(Z, X)
    if not ok:
        raise NotACycle(f"chain has nonzero boundary on {sorted(bad)[:6]}", cells=sorted(bad))
    return sum(1 for g in L.gates if g in Z.cells) % 2


def edge_realization(L: DualOneCycle, X: Complex) -> Z2Chain:
    """Mod-2 edge loop homotopic to a dual loop.

    The loop crosses gate ``g_i`` near its lowest vertex ``w_i``; inside the
    3-cell between two gates it runs along the edge ``w_{i-1} w_i``.
    """
    n = len(L.loop)
    w = [min(X.vertices(g)) for g in L.gates]
    edges: set[int] = set()
    for i in range(n):
        a, b = w[i - 1], w[i]
        if a == b:
            continue
        e = _edge_between(X, a, b, L.loop[i])
        edges ^= {e}
    return Z2Chain(1, frozenset(edges))


def _edge_between(X: Complex, a: int, b: int, cell: int) -> int:
    if X.is_simplicial:
        e = X.cell_of((a, b))
        if e is not None:
            return e
    for c in X.closure([cell]):
        if X.dim(c) == 1 and set(X.facets(c)) == {a, b}:
            return c
    raise ValueError(f"vertices {a} and {b} are not joined by an edge in cell {cell}")


def pair_cochain(support: Iterable[int], chain: Z2Chain) -> int:
    """Evaluate a mod-2 cochain (given by its support) on a chain."""
    return len(set(support) & chain.cells) % 2
