"""Discrete Morse functions, gradient fields and V-paths."""
from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .cellcomplex import Complex
from .errors import CyclicField, InvalidField, InvalidFunction, MultiplePaths, NoPath


@dataclass(frozen=True)
class GradientField:
    """A set of arrows ``(sigma, tau)`` with ``sigma`` a facet of ``tau``."""

    pairs: frozenset

    def __post_init__(self):
        up: dict[int, int] = {}
        down: dict[int, int] = {}
        for s, t in self.pairs:
            if s in up or s in down:
                raise InvalidField(f"cell {s} appears in two arrows", cell=s)
            if t in up or t in down:
                raise InvalidField(f"cell {t} appears in two arrows", cell=t)
            up[s] = t
            down[t] = s
        object.__setattr__(self, "_up", up)
        object.__setattr__(self, "_down", down)

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> "GradientField":
        return cls(frozenset((int(s), int(t)) for s, t in pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, c) -> bool:
        return c in self._up or c in self._down

    def up(self, c: int) -> int | None:
        """The coface that ``c`` points to, if ``c`` is the tail of an arrow."""
        return self._up.get(c)

    def down(self, c: int) -> int | None:
        """The face pointing to ``c``, if ``c`` is the head of an arrow."""
        return self._down.get(c)

    def partner(self, c: int) -> int | None:
        return self._up.get(c, self._down.get(c))

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)

    def check(self, X: Complex) -> None:
        for s, t in self.pairs:
            if s not in X or t not in X:
                raise InvalidField(f"arrow ({s}, {t}) uses an unknown cell", cell=s)
            if s not in X.facets(t):
                raise InvalidField(f"{s} is not a facet of {t}", cell=s)

    def restrict(self, cells) -> "GradientField":
        cells = set(cells)
        return GradientField(frozenset(p for p in self.pairs if p[0] in cells and p[1] in cells))


@dataclass
class MorseFunction:
    values: dict[int, Fraction]

    def __getitem__(self, c: int) -> Fraction:
        return self.values[c]

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class MorseReport:
    ok: bool
    violations: list[tuple] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def validate_morse_function(f: MorseFunction | Mapping[int, Fraction], X: Complex) -> MorseReport:
    """Check the two at-most-one conditions at every cell.

    A violation is reported as ``(cell, "cofaces" | "faces", offenders)``.
    """
    vals = f.values if isinstance(f, MorseFunction) else f
    out = []
    missing = [c for c in X.cells() if c not in vals]
    if missing:
        out.append((missing[0], "undefined", tuple(missing[:10])))
    for c in X.cells():
        if c not in vals:
            continue
        low = tuple(t for t in X.cofacets(c) if t in vals and vals[t] <= vals[c])
        if len(low) > 1:
            out.append((c, "cofaces", low))
        high = tuple(s for s in X.facets(c) if s in vals and vals[s] >= vals[c])
        if len(high) > 1:
            out.append((c, "faces", high))
    return MorseReport(not out, out)


def field_from_function(f: MorseFunction | Mapping[int, Fraction], X: Complex) -> GradientField:
    rep = validate_morse_function(f, X)
    if not rep:
        raise InvalidFunction(f"not a discrete Morse function: {rep.violations[:3]}")
    vals = f.values if isinstance(f, MorseFunction) else f
    pairs = set()
    for t in X.cells():
        for s in X.facets(t):
            if vals[s] >= vals[t]:
                pairs.add((s, t))
    return GradientField(frozenset(pairs))


def function_from_field(V: GradientField, X: Complex) -> MorseFunction:
    """Rank in a stable topological order of the Hasse diagram with arrows reversed.

    Faces come before cofaces except along an arrow, where the head comes
    first; ties are broken by the smallest cell id.
    """
    indeg = {c: 0 for c in X.cells()}
    succ: dict[int, list[int]] = defaultdict(list)
    for t in X.cells():
        for s in X.facets(t):
            if V.up(s) == t:
                succ[t].append(s)
                indeg[s] += 1
            else:
                succ[s].append(t)
                indeg[t] += 1
    heap = [c for c, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    values: dict[int, Fraction] = {}
    while heap:
        c = heapq.heappop(heap)
        values[c] = Fraction(len(values))
        for n in succ[c]:
            indeg[n] -= 1
            if indeg[n] == 0:
                heapq.heappush(heap, n)
    if len(values) != len(indeg):
        ok, witness = validate_acyclic(V, X)
        raise CyclicField("gradient field contains a closed V-path", witness=witness)
    return MorseFunction(values)


def _successors(V: GradientField, X: Complex, s: int) -> list[int]:
    t = V.up(s)
    if t is None:
        return []
    return [f for f in X.facets(t) if f != s]


def validate_acyclic(V: GradientField, X: Complex) -> tuple[bool, list[int]]:
    """Whether no closed V-path exists; on failure a witness cycle of tails."""
    color: dict[int, int] = {}
    for root in sorted(V._up):
        if root in color:
            continue
        stack = [(root, iter(_successors(V, X, root)))]
        color[root] = 1
        path = [root]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                path.pop()
                continue
            st = color.get(nxt, 0)
            if st == 1:
                return False, path[path.index(nxt):]
            if st == 0:
                color[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(_successors(V, X, nxt))))
    return True, []


@dataclass
class CriticalSet:
    by_dim: dict[int, frozenset]

    def counts(self, top: int = 3) -> tuple[int, ...]:
        return tuple(len(self.by_dim.get(d, ())) for d in range(top + 1))

    def all(self) -> frozenset:
        out = set()
        for s in self.by_dim.values():
            out |= s
        return frozenset(out)

    def __getitem__(self, d: int) -> frozenset:
        return self.by_dim.get(d, frozenset())


def critical_cells(V: GradientField, X: Complex, cells: Iterable[int] | None = None) -> CriticalSet:
    pool = X.cells() if cells is None else cells
    out: dict[int, set] = defaultdict(set)
    for c in pool:
        if c not in V:
            out[X.dim(c)].add(c)
    return CriticalSet({d: frozenset(s) for d, s in out.items()})


def is_perfect(V: GradientField, X: Complex, betti_numbers=None) -> bool:
    if betti_numbers is None:
        from .homology import betti

        betti_numbers = betti(X)
    crit = critical_cells(V, X).counts(X.dimension)
    return tuple(crit) == tuple(betti_numbers)


@dataclass(frozen=True)
class VPath:
    """``sequence = (s0, t0, s1, t1, ..., sk)`` with ``(s_i, t_i)`` arrows."""

    dim: int
    sequence: tuple[int, ...]

    @property
    def start(self) -> int:
        return self.sequence[0]

    @property
    def end(self) -> int:
        return self.sequence[-1]

    @property
    def heads(self) -> tuple[int, ...]:
        return self.sequence[1::2]

    @property
    def tails(self) -> tuple[int, ...]:
        return self.sequence[0::2]


def descending_paths(V: GradientField, c: int, X: Complex, limit: int = 100000) -> set[VPath]:
    """Maximal V-paths of dimension ``dim(c)`` starting at facets of ``c``."""
    p = X.dim(c)
    out: set[VPath] = set()
    for s0 in X.facets(c):
        stack = [(s0,)]
        while stack:
            seq = stack.pop()
            s = seq[-1]
            t = V.up(s)
            if t is None:
                out.add(VPath(p, seq))
                if len(out) > limit:
                    raise ValueError("too many V-paths to enumerate")
                continue
            for f in X.facets(t):
                if f != s:
                    stack.append(seq + (t, f))
    return out


def ascending_paths_into(V: GradientField, c: int, X: Complex, limit: int = 100000) -> set[VPath]:
    """Maximal V-paths of dimension ``dim(c)+1`` whose last face step lands on ``c``."""
    p = X.dim(c)
    out: set[VPath] = set()

    def preds(x):
        res = []
        for t in X.cofacets(x):
            s = V.down(t)
            if s is not None and s != x:
                res.append((s, t))
        return res

    stack = [(s, t, c) for s, t in preds(c)]
    stack = [tuple(x) for x in stack]
    while stack:
        seq = stack.pop()
        ps = preds(seq[0])
        if not ps:
            out.add(VPath(p + 1, seq))
            if len(out) > limit:
                raise ValueError("too many V-paths to enumerate")
            continue
        for s, t in ps:
            stack.append((s, t) + seq)
    return out


def _topo_reachable(starts: Iterable[int], succ) -> list[int]:
    """Reachable nodes in topological order (graph assumed acyclic)."""
    seen = set()
    order = []
    for r in starts:
        if r in seen:
            continue
        seen.add(r)
        stack = [(r, iter(succ(r)))]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                order.append(node)
                stack.pop()
            elif nxt not in seen:
                seen.add(nxt)
                stack.append((nxt, iter(succ(nxt))))
    order.reverse()
    return order


def descending_counts(V: GradientField, c: int, X: Complex, modulus: int | None = None) -> dict[int, int]:
    """Number of V-paths from the facets of ``c`` reaching each face and arrow head."""
    succ = lambda s: _successors(V, X, s)
    counts: dict[int, int] = defaultdict(int)
    for f in X.facets(c):
        counts[f] += 1
    for s in _topo_reachable(X.facets(c), succ):
        n = counts[s]
        if modulus:
            n %= modulus
            counts[s] = n
        if not n:
            continue
        t = V.up(s)
        if t is None:
            continue
        counts[t] += n
        for f in X.facets(t):
            if f != s:
                counts[f] += n
    if modulus:
        return {k: v % modulus for k, v in counts.items() if v % modulus}
    return {k: v for k, v in counts.items() if v}


def ascending_counts(V: GradientField, c: int, X: Complex, modulus: int | None = None) -> dict[int, int]:
    """For each cell of dimension ``dim(c)``: number of V-paths from it to ``c``.

    ``c`` itself counts one (the empty path).
    """

    def preds(x):
        res = []
        for t in X.cofacets(x):
            s = V.down(t)
            if s is not None and s != x:
                res.append(s)
        return res

    counts: dict[int, int] = defaultdict(int)
    counts[c] = 1
    for x in _topo_reachable([c], preds):
        n = counts[x]
        if modulus:
            n %= modulus
            counts[x] = n
        if not n:
            continue
        for s in preds(x):
            counts[s] += n
    if modulus:
        return {k: v % modulus for k, v in counts.items() if v % modulus}
    return {k: v for k, v in counts.items() if v}


def descending_chain(V: GradientField, c: int, X: Complex):
    """Mod-2 chain of ``c`` and the arrow heads swept by its descending paths."""
    from .homology import Z2Chain

    p = X.dim(c)
    counts = descending_counts(V, c, X, modulus=2)
    return Z2Chain(p, frozenset([c]) | frozenset(k for k in counts if X.dim(k) == p))


@dataclass
class FlowReport:
    ok: bool
    violations: list[tuple] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def unique_flow_checks(V: GradientField, X: Complex) -> FlowReport:
    """(a) every vertex flows to the critical vertex; (b) top paths never merge."""
    crit = critical_cells(V, X)
    out = []
    verts0 = crit[0]
    if len(verts0) != 1:
        out.append(("critical_vertices", tuple(sorted(verts0))))
    target = min(verts0) if verts0 else None
    end_of: dict[int, int] = {}
    for v in X.cells(0):
        trail = []
        x = v
        while x not in end_of:
            trail.append(x)
            e = V.up(x)
            if e is None:
                end_of[x] = x
                break
            (nx,) = [f for f in X.facets(e) if f != x]
            x = nx
            if len(trail) > len(X):
                out.append(("cycle", v))
                break
        for y in trail:
            end_of[y] = end_of.get(x, x)
        if end_of[v] != target:
            out.append(("vertex_flow", v, end_of[v]))
    top = X.dimension
    for c in sorted(crit[top]):
        counts = descending_counts(V, c, X)
        for s, n in sorted(counts.items()):
            if X.dim(s) == top - 1 and n > 1:
                out.append(("merge", c, s, n))
    return FlowReport(not out, out)


def count_connecting_paths(V: GradientField, sigma: int, tau: int, X: Complex) -> int:
    """Number of V-paths from facets of ``tau`` to ``sigma`` (with multiplicity)."""
    counts = descending_counts(V, tau, X)
    return counts.get(sigma, 0)


def cancel_critical_pair(V: GradientField, sigma: int, tau: int, X: Complex) -> GradientField:
    """Reverse the unique V-path from ``tau`` down to ``sigma``."""
    if sigma in V or tau in V:
        raise InvalidField("both cells must be critical", cell=sigma if sigma in V else tau)
    if X.dim(tau) != X.dim(sigma) + 1:
        raise InvalidField("dimensions must differ by one", cell=tau)
    n = count_connecting_paths(V, sigma, tau, X)
    if n == 0:
        raise NoPath(f"no V-path from {tau} to {sigma}", cells=(sigma, tau))
    if n > 1:
        raise MultiplePaths(f"{n} V-paths from {tau} to {sigma}", cells=(sigma, tau), count=n)
    # walk back from sigma: its predecessor is the unique arrow head with a live path
    succ = lambda s: _successors(V, X, s)
    reach = set(_topo_reachable(X.facets(tau), succ))
    path = [sigma]
    x = sigma
    starts = set(X.facets(tau))
    while True:
        # with a unique connecting path, a reached facet of tau is its start
        if x in starts:
            break
        prev = None
        for t in X.cofacets(x):
            s = V.down(t)
            if s is not None and s != x and s in reach:
                prev = (s, t)
                break
        if prev is None:
            raise NoPath("lost the connecting path", cells=(sigma, tau))
        path[:0] = [prev[0], prev[1]]
        x = prev[0]
    pairs = set(V.pairs)
    # path = s0, t0, s1, ..., sigma
    tails = path[0::2]
    heads = path[1::2]
    for s, t in zip(tails, heads):
        pairs.discard((s, t))
    new_heads = [tau] + heads
    for s, t in zip(tails, new_heads):
        pairs.add((s, t))
    return GradientField(frozenset(pairs))

