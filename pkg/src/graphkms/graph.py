"""Finite directed multigraphs and their component structure.

The central object is :class:`DirectedGraph`, a finite vertex list together
with integer edge multiplicities.  The vertex matrix ``A`` is indexed so that
``A[v, w]`` counts the edges whose range is ``v`` and whose source is ``w``;
powers of ``A`` then count paths.  Everything downstream (spectral data, the
component order, hereditary and saturated vertex sets) hangs off this matrix
convention, so it is fixed here once and used unchanged everywhere else.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from ._scc import tarjan_sccs


class GraphParseError(ValueError):
    """Raised for malformed graph text; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


@dataclass(frozen=True)
class Edge:
    source: str
    range: str
    multiplicity: int = 1


@dataclass(frozen=True, eq=False)
class Component:
    """A strongly connected component with its spectral data attached.

    ``trivial`` means a single vertex with no loop edge; such a component has
    spectral radius zero and no Perron vector.  ``members`` is ordered by
    vertex declaration order.
    """

    id: int
    members: tuple[str, ...]
    trivial: bool
    spectral_radius: float
    period: int
    perron_vector: dict[str, float] | None


@dataclass(frozen=True, eq=False)
class VertexSet:
    """A set of vertices with its closure properties made explicit.

    ``hereditary``: every successor (along matrix rows) of a member is a
    member.  ``saturated``: every vertex that receives at least one edge, all
    of whose in-edge sources are members, is itself a member.  Vertices with
    no incoming edges are never forced in by saturation.
    """

    members: frozenset[str]
    hereditary: bool
    saturated: bool


class DirectedGraph:
    """Immutable finite directed multigraph with cached component analysis."""

    __slots__ = ("vertices", "edges", "index", "matrix", "_analysis_cache")

    def __init__(self, vertices, edges):
        vertices = tuple(vertices)
        if not vertices:
            raise ValueError("a graph needs at least one vertex")
        seen = set()
        for v in vertices:
            if not isinstance(v, str) or not v or any(c.isspace() for c in v):
                raise ValueError(f"bad vertex name: {v!r}")
            if v in seen:
                raise ValueError(f"duplicate vertex: {v}")
            seen.add(v)
        index = {v: i for i, v in enumerate(vertices)}
        norm = []
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(*e)
            if e.source not in index:
                raise ValueError(f"unknown vertex in edge: {e.source}")
            if e.range not in index:
                raise ValueError(f"unknown vertex in edge: {e.range}")
            if not isinstance(e.multiplicity, int) or e.multiplicity < 1:
                raise ValueError(f"edge multiplicity must be a positive integer: {e}")
            norm.append(e)
        n = len(vertices)
        matrix = np.zeros((n, n), dtype=np.int64)
        for e in norm:
            matrix[index[e.range], index[e.source]] += e.multiplicity
        matrix.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "_analysis_cache", None)

    def __setattr__(self, name, value):
        raise AttributeError("DirectedGraph is immutable")

    def __repr__(self):
        return f"DirectedGraph({len(self.vertices)} vertices, {len(self.edges)} edge lines)"

    # -- component analysis -------------------------------------------------

    def _analysis(self):
        cached = self._analysis_cache
        if cached is not None:
            return cached
        from . import spectral

        n = len(self.vertices)
        A = self.matrix
        succ = [list(np.nonzero(A[i])[0]) for i in range(n)]
        raw = tarjan_sccs(succ)
        # Tarjan emits components in reverse topological order: arcs between
        # distinct components always point at an earlier entry, so reach sets
        # can be accumulated in one forward pass.
        comp_of_raw = [0] * n
        for k, comp in enumerate(raw):
            for i in comp:
                comp_of_raw[i] = k
        reach_raw: list[frozenset[int]] = []
        for k, comp in enumerate(raw):
            acc = {k}
            for i in comp:
                for j in succ[i]:
                    acc |= reach_raw[comp_of_raw[j]] if comp_of_raw[j] != k else set()
            reach_raw.append(frozenset(acc))
        # Canonical ids: sort components by their smallest vertex index.
        order = sorted(range(len(raw)), key=lambda k: min(raw[k]))
        newid = {k: c for c, k in enumerate(order)}
        components = []
        comp_of = [0] * n
        for cid, k in enumerate(order):
            rows = sorted(raw[k])
            for i in rows:
                comp_of[i] = cid
            trivial = len(rows) == 1 and not A[rows[0], rows[0]]
            if trivial:
                radius, per, vec = 0.0, 0, None
            else:
                block = A[np.ix_(rows, rows)]
                data = spectral.analyze_irreducible(block)
                radius = data.radius
                per = data.period
                vec = {
                    self.vertices[i]: float(x)
                    for i, x in zip(rows, data.perron_vector)
                }
            components.append(
                Component(
                    id=cid,
                    members=tuple(self.vertices[i] for i in rows),
                    trivial=trivial,
                    spectral_radius=radius,
                    period=per,
                    perron_vector=vec,
                )
            )
        reach = [frozenset()] * len(raw)
        for k in range(len(raw)):
            reach[newid[k]] = frozenset(newid[j] for j in reach_raw[k])
        cached = (tuple(components), comp_of, tuple(reach))
        object.__setattr__(self, "_analysis_cache", cached)
        return cached

    @property
    def components(self) -> tuple[Component, ...]:
        return self._analysis()[0]

    def component_of(self, v: str) -> Component:
        comps, comp_of, _ = self._analysis()
        return comps[comp_of[self.index[v]]]

    def reachable_components(self, comp_id: int) -> frozenset[int]:
        """Ids of components D with C_id <= D, i.e. D talks to C_id."""
        return self._analysis()[2][comp_id]

    # -- vertex sets ---------------------------------------------------------

    def vertex_set(self, members) -> VertexSet:
        mem = frozenset(members)
        for v in mem:
            if v not in self.index:
                raise ValueError(f"unknown vertex: {v}")
        n = len(self.vertices)
        inside = np.zeros(n, dtype=bool)
        inside[[self.index[v] for v in mem]] = True
        A = self.matrix
        hereditary = not A[np.ix_(inside, ~inside)].any() if mem else True
        saturated = True
        for i in range(n):
            if inside[i]:
                continue
            row = A[i]
            if row.any() and not row[~inside].any():
                saturated = False
                break
        return VertexSet(members=mem, hereditary=hereditary, saturated=saturated)


def _members_of(s) -> frozenset[str]:
    if isinstance(s, VertexSet):
        return s.members
    if isinstance(s, str):
        raise TypeError("expected a collection of vertex names, not a single string")
    return frozenset(s)


# -- parsing ------------------------------------------------------------------


def parse_graph(text: str) -> DirectedGraph:
    """Parse the plain-text graph format.

    The first effective line is ``vertices: name1 name2 ...``; every further
    line is ``edge SRC DST [MULT]`` and contributes MULT (default 1) edges
    with source SRC and range DST.  ``#`` starts a comment.
    """
    vertices: list[str] | None = None
    edges: list[Edge] = []
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if vertices is None:
            if not line.startswith("vertices:"):
                raise GraphParseError("expected a 'vertices:' line first", lineno)
            names = line[len("vertices:"):].split()
            if not names:
                raise GraphParseError("empty vertex list", lineno)
            if len(set(names)) != len(names):
                raise GraphParseError("duplicate vertex name", lineno)
            vertices = names
            continue
        tokens = line.split()
        if tokens[0] != "edge":
            raise GraphParseError(f"unknown directive: {tokens[0]}", lineno)
        if len(tokens) not in (3, 4):
            raise GraphParseError("edge lines take 2 or 3 arguments", lineno)
        src, dst = tokens[1], tokens[2]
        for name in (src, dst):
            if name not in vertices:
                raise GraphParseError(f"unknown vertex: {name}", lineno)
        mult = 1
        if len(tokens) == 4:
            try:
                mult = int(tokens[3])
            except ValueError:
                mult = 0
            if mult < 1:
                raise GraphParseError(f"bad multiplicity: {tokens[3]}", lineno)
        edges.append(Edge(source=src, range=dst, multiplicity=mult))
    if vertices is None:
        raise GraphParseError("no 'vertices:' line found")
    return DirectedGraph(vertices, edges)


# -- basic operations ----------------------------------------------------------


def path_count(G: DirectedGraph, v: str, w: str, n: int) -> int:
    """Exact number of paths of length ``n`` with range ``v`` and source ``w``.

    Computed over Python integers, so the count never overflows.
    """
    if n < 0:
        raise ValueError("path length must be nonnegative")
    i, j = G.index[v], G.index[w]
    if n == 0:
        return 1 if i == j else 0
    size = len(G.vertices)
    base = [[int(x) for x in row] for row in G.matrix]

    def mul(X, Y):
        return [
            [sum(X[a][k] * Y[k][b] for k in range(size)) for b in range(size)]
            for a in range(size)
        ]

    result = None
    power = base
    m = n
    while m:
        if m & 1:
            result = power if result is None else mul(result, power)
        m >>= 1
        if m:
            power = mul(power, power)
    return result[i][j]


def strongly_connected_components(G: DirectedGraph) -> tuple[Component, ...]:
    return G.components


def talks_to(G: DirectedGraph, C: Component, D: Component) -> bool:
    """True when there is a path with range in C and source in D.

    This is the component order ``C <= D``; it is reflexive via the length
    zero paths at each vertex.
    """
    comps = G.components
    for comp in (C, D):
        if comp.id >= len(comps) or comps[comp.id].members != comp.members:
            raise ValueError("component does not belong to this graph")
    return D.id in G.reachable_components(C.id)


def seneta_order(G: DirectedGraph) -> tuple[Component, ...]:
    """Components ordered so the permuted vertex matrix is block upper triangular.

    Trivial components talking to no nontrivial component come first; after
    that, repeatedly a minimal remaining component.  Ties are broken by the
    smallest original vertex index, so the order is deterministic.
    """
    comps = G.components
    k = len(comps)
    reach = [G.reachable_components(i) for i in range(k)]
    below = [frozenset(j for j in range(k) if i in reach[j]) for i in range(k)]

    def key(i):
        return G.index[comps[i].members[0]]

    first = {
        i
        for i in range(k)
        if comps[i].trivial and not any(not comps[j].trivial for j in below[i])
    }
    ordered: list[int] = []
    for group in (first, set(range(k)) - first):
        remaining = set(group)
        while remaining:
            candidates = [i for i in remaining if not (below[i] & remaining - {i})]
            ordered.append(min(candidates, key=key))
            remaining.remove(ordered[-1])
    return tuple(comps[i] for i in ordered)


def hereditary_closure(G: DirectedGraph, S) -> VertexSet:
    """Smallest hereditary vertex set containing ``S``."""
    members = _members_of(S)
    A = G.matrix
    seen = {G.index[v] for v in members}
    work = list(seen)
    while work:
        i = work.pop()
        for j in np.nonzero(A[i])[0]:
            j = int(j)
            if j not in seen:
                seen.add(j)
                work.append(j)
    return G.vertex_set(G.vertices[i] for i in seen)


def saturation(G: DirectedGraph, H) -> VertexSet:
    """Smallest saturated hereditary set containing the hereditary set ``H``.

    A vertex is swallowed once it receives at least one edge and every one of
    its in-edge sources already lies inside; vertices with no incoming edges
    are never swallowed.
    """
    vs = H if isinstance(H, VertexSet) else G.vertex_set(_members_of(H))
    if not vs.hereditary:
        raise ValueError("saturation is only defined for hereditary sets")
    n = len(G.vertices)
    A = G.matrix
    inside = np.zeros(n, dtype=bool)
    inside[[G.index[v] for v in vs.members]] = True
    receives = A.any(axis=1)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if inside[i] or not receives[i]:
                continue
            if not A[i][~inside].any():
                inside[i] = True
                changed = True
    return G.vertex_set(v for i, v in enumerate(G.vertices) if inside[i])


def quotient_graph(G: DirectedGraph, H) -> DirectedGraph:
    """The graph on ``E^0 \\ H`` keeping the edges whose source survives.

    ``H`` must be hereditary, which guarantees the kept edges also have their
    range outside ``H``.
    """
    vs = H if isinstance(H, VertexSet) else G.vertex_set(_members_of(H))
    if not vs.hereditary:
        raise ValueError("quotients are only defined for hereditary sets")
    kept = [v for v in G.vertices if v not in vs.members]
    if not kept:
        raise ValueError("quotient by the full vertex set is empty")
    edges = [e for e in G.edges if e.source not in vs.members]
    return DirectedGraph(kept, edges)


def sources(G: DirectedGraph) -> frozenset[str]:
    """Vertices receiving no edges at all."""
    A = G.matrix
    return frozenset(v for i, v in enumerate(G.vertices) if not A[i].any())


def edge_instances(G: DirectedGraph) -> list[tuple[str, str, int]]:
    """Parallel edges expanded into distinct ``(source, range, copy)`` triples."""
    totals: dict[tuple[str, str], int] = {}
    for e in G.edges:
        key = (e.source, e.range)
        totals[key] = totals.get(key, 0) + e.multiplicity
    out = []
    for (s, r), total in totals.items():
        out.extend((s, r, k) for k in range(total))
    return out
