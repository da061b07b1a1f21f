"""Labeled d-regular graphs, switches, symmetric differences and encodings.

Vertices are the integers ``1..n``.  An edge is a tuple ``(u, v)`` with
``u < v``; graphs keep their edges as a sorted tuple so that equality,
hashing and serialization are all canonical.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .errors import (
    DegreeTooLarge,
    DuplicateEdge,
    EdgeAbsent,
    IncidentEdges,
    Loop,
    MismatchedParameters,
    NotRegular,
    ParityError,
    ParseError,
    VertexOutOfRange,
    WouldCreateMultiEdge,
)

Edge = tuple[int, int]

GREEN = "green"
YELLOW = "yellow"


def make_edge(u: int, v: int) -> Edge:
    """Return the canonical form of the unordered edge ``{u, v}``."""
    if u == v:
        raise Loop(f"loop at vertex {u}")
    return (u, v) if u < v else (v, u)


def check_parameters(n: int, d: int) -> None:
    if n < 1 or d < 0:
        raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    if (n * d) % 2:
        raise ParityError(f"n*d = {n * d} is odd")
    if d > n - 1:
        raise DegreeTooLarge(f"d={d} exceeds n-1={n - 1}")


@dataclass(frozen=True)
class RegularGraph:
    """A simple d-regular graph on ``{1, ..., n}``.

    Use :func:`build_graph` to construct one from untrusted input; the
    constructor itself only sorts the edges.
    """

    n: int
    d: int
    edges: tuple[Edge, ...] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def __contains__(self, e) -> bool:
        return e in self.edge_set

    def __len__(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> list[int]:
        return [b if a == v else a for a, b in self.edges if v in (a, b)]

    def complement(self) -> RegularGraph:
        present = self.edge_set
        missing = [
            (u, v)
            for u in range(1, self.n + 1)
            for v in range(u + 1, self.n + 1)
            if (u, v) not in present
        ]
        return RegularGraph(self.n, self.n - 1 - self.d, tuple(missing))

    def key(self) -> int:
        """Integer bitmask of the edge set; see :func:`edge_bit`."""
        k = 0
        for u, v in self.edges:
            k |= 1 << edge_bit(self.n, u, v)
        return k


def edge_bit(n: int, u: int, v: int) -> int:
    """Position of edge ``(u, v)``, ``u < v``, in the lexicographic list of all pairs."""
    # pairs (1,2),(1,3),...,(1,n),(2,3),...
    return (u - 1) * (2 * n - u) // 2 + (v - u - 1)


def build_graph(n: int, d: int, edges: Iterable) -> RegularGraph:
    """Validate ``edges`` as a simple d-regular graph on ``{1..n}``."""
    check_parameters(n, d)
    seen = set()
    for raw in edges:
        u, v = raw
        e = make_edge(int(u), int(v))
        if not (1 <= e[0] and e[1] <= n):
            raise VertexOutOfRange(f"edge {e} outside 1..{n}")
        if e in seen:
            raise DuplicateEdge(f"edge {e} listed twice")
        seen.add(e)
    deg = Counter()
    for u, v in seen:
        deg[u] += 1
        deg[v] += 1
    for x in range(1, n + 1):
        if deg[x] != d:
            raise NotRegular(f"vertex {x} has degree {deg[x]}, expected {d}")
    return RegularGraph(n, d, tuple(seen))


def circulant_start(n: int, d: int) -> RegularGraph:
    """Deterministic d-regular start state.

    Vertex ``i`` is joined to ``i +- 1, ..., i +- d//2`` (mod n), and to
    ``i + n/2`` when ``d`` is odd.
    """
    check_parameters(n, d)
    offsets = list(range(1, d // 2 + 1))
    if d % 2:
        offsets.append(n // 2)
    edges = set()
    for i in range(n):
        for k in offsets:
            edges.add(make_edge(i + 1, (i + k) % n + 1))
    return build_graph(n, d, edges)


def _same_parameters(*graphs: RegularGraph) -> None:
    first = graphs[0]
    for g in graphs[1:]:
        if (g.n, g.d) != (first.n, first.d):
            raise MismatchedParameters(
                f"graphs have (n, d) = {(first.n, first.d)} and {(g.n, g.d)}"
            )


def symmetric_difference(G: RegularGraph, Gp: RegularGraph) -> frozenset[Edge]:
    _same_parameters(G, Gp)
    return G.edge_set ^ Gp.edge_set


@dataclass(frozen=True)
class EdgeLabeling:
    """The encoding ``G + G' - Z``; only nonzero labels are stored."""

    labels: dict

    def __getitem__(self, e: Edge) -> int:
        return self.labels.get(e, 0)

    def bad_edges(self) -> list[Edge]:
        return sorted(e for e, lab in self.labels.items() if lab in (-1, 2))


def encode(G: RegularGraph, Gp: RegularGraph, Z: RegularGraph) -> EdgeLabeling:
    _same_parameters(G, Gp, Z)
    labels = {}
    for e in G.edge_set | Gp.edge_set | Z.edge_set:
        lab = (e in G) + (e in Gp) - (e in Z)
        if lab:
            labels[e] = lab
    return EdgeLabeling(labels)


@dataclass(frozen=True)
class ColoredDifference:
    """The symmetric difference H with edges coloured by membership in Z.

    ``green[v]`` and ``yellow[v]`` count the arcs of each colour at ``v``.
    """

    edges: frozenset
    color: dict
    green: dict
    yellow: dict

    @property
    def vertices(self) -> list[int]:
        return sorted(set(self.green) | set(self.yellow))

    def g(self, v: int) -> int:
        return self.green.get(v, 0)

    def y(self, v: int) -> int:
        return self.yellow.get(v, 0)

    def theta(self, v: int) -> int:
        return (self.g(v) + self.y(v)) // 2

    def incident(self, v: int) -> list[Edge]:
        return sorted(e for e in self.edges if v in e)

    def is_balanced(self) -> bool:
        return all(self.g(v) == self.y(v) for v in self.vertices)


def color_difference(H: Iterable[Edge], Z) -> ColoredDifference:
    """Colour each edge of ``H`` green if it lies in ``Z``, yellow otherwise.

    ``Z`` may be a :class:`RegularGraph` or any collection of edges.
    """
    z = Z.edge_set if isinstance(Z, RegularGraph) else frozenset(Z)
    H = frozenset(H)
    color = {}
    green, yellow = Counter(), Counter()
    for e in H:
        c = GREEN if e in z else YELLOW
        color[e] = c
        side = green if c == GREEN else yellow
        side[e[0]] += 1
        side[e[1]] += 1
    return ColoredDifference(H, color, dict(green), dict(yellow))


def switch_matchings(e1: Edge, e2: Edge) -> tuple[tuple[Edge, Edge], ...]:
    """The three perfect matchings on the endvertices of ``e1`` and ``e2``.

    The first one is ``{e1, e2}`` itself.
    """
    (a, b), (c, d) = e1, e2
    return (
        (e1, e2),
        (make_edge(a, c), make_edge(b, d)),
        (make_edge(a, d), make_edge(b, c)),
    )


@dataclass(frozen=True)
class SwitchMove:
    e1: Edge
    e2: Edge
    replacement: tuple[Edge, Edge]

    def __post_init__(self):
        if set(self.e1) & set(self.e2):
            raise IncidentEdges(f"{self.e1} and {self.e2} share an endpoint")
        if frozenset(self.replacement) not in {
            frozenset(m) for m in switch_matchings(self.e1, self.e2)
        }:
            raise ValueError(
                f"{self.replacement} is not a perfect matching of the endpoints "
                f"of {self.e1} and {self.e2}"
            )

    @property
    def is_identity(self) -> bool:
        return frozenset(self.replacement) == {self.e1, self.e2}

    def reverse(self) -> SwitchMove:
        r1, r2 = self.replacement
        return SwitchMove(r1, r2, (self.e1, self.e2))


def switch_edge_set(z: frozenset, move: SwitchMove) -> frozenset:
    """Apply ``move`` to a bare edge set, with the same checks as :func:`apply_switch`."""
    for e in (move.e1, move.e2):
        if e not in z:
            raise EdgeAbsent(f"edge {e} not present")
    if move.is_identity:
        return z
    for e in move.replacement:
        if e in z:
            raise WouldCreateMultiEdge(f"edge {e} already present")
    return (z - {move.e1, move.e2}) | frozenset(move.replacement)


def apply_switch(Z: RegularGraph, move: SwitchMove) -> RegularGraph:
    z = switch_edge_set(Z.edge_set, move)
    if z is Z.edge_set:
        return Z
    return RegularGraph(Z.n, Z.d, tuple(z))


def serialize_graph(G: RegularGraph) -> str:
    lines = [f"{G.n} {G.d}"]
    lines.extend(f"{u} {v}" for u, v in G.edges)
    return "\n".join(lines) + "\n"


def _read_records(text: str):
    """Yield (n, d, edges) for each record in an edge-list stream."""
    lines = [(i + 1, ln.split()) for i, ln in enumerate(text.splitlines())]
    lines = [(no, toks) for no, toks in lines if toks]
    pos = 0
    while pos < len(lines):
        no, toks = lines[pos]
        n, d = _ints(toks, no)
        if (n * d) % 2:
            raise ParityError(f"line {no}: n*d = {n * d} is odd")
        want = n * d // 2
        body = lines[pos + 1 : pos + 1 + want]
        edges = []
        for eno, etoks in body:
            u, v = _ints(etoks, eno)
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(f"vertex out of range 1..{n}", eno)
            edges.append((u, v))
        if len(body) < want:
            raise ParseError(f"expected {want} edge lines, found {len(body)}", no)
        yield n, d, edges
        pos += 1 + want


def _ints(toks, no):
    if len(toks) != 2:
        raise ParseError(f"expected two integers, got {' '.join(toks)!r}", no)
    try:
        return int(toks[0]), int(toks[1])
    except ValueError:
        raise ParseError(f"expected two integers, got {' '.join(toks)!r}", no) from None


def parse_graphs(text: str) -> list[RegularGraph]:
    """Parse one or more concatenated edge-list records."""
    return [build_graph(n, d, edges) for n, d, edges in _read_records(text)]


def parse_graph(text: str) -> RegularGraph:
    graphs = parse_graphs(text)
    if len(graphs) != 1:
        raise ParseError(f"expected exactly one graph, found {len(graphs)}")
    return graphs[0]
