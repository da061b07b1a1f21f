"""Pairings of a coloured symmetric difference, circuits and bad-pair accounting.

An arc is an edge of H seen from one of its endpoints, so at vertex ``v``
arcs are identified with the H-edges incident to ``v``.  A pairing is a
perfect matching of the arcs at every vertex.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import combinations, permutations, product
from math import comb, factorial, prod
from typing import Iterable, Iterator, Sequence

from .errors import LimitViolation, ParityError, TooLarge, Unbalanced
from .graph import GREEN, YELLOW, ColoredDifference, Edge

ENUMERATION_CAP = 10**7

MAX_INTERESTING = 4
MAX_BAD_VERTICES = 6
MAX_BAD_PAIRS = 14
MAX_PAIRS_PER_COLOUR = 2

ODD_CHORD = "odd-chord"
SHORTCUT = "shortcut"


def double_factorial(k: int) -> int:
    return prod(range(k, 0, -2)) if k > 0 else 1


def count_vertex_pairings(g: int, y: int) -> int:
    """Pairings of ``g`` green and ``y`` yellow arcs that never pair two minority arcs.

    With ``g - y = 2k >= 0`` this is ``C(g, 2k) * (2k-1)!! * y!``: choose
    the ``2k`` greens left over after every yellow has a green partner,
    match them among themselves, and match the rest to the yellows.
    """
    if g < 0 or y < 0:
        raise ValueError("arc counts must be non-negative")
    if (g + y) % 2:
        raise ParityError(f"g + y = {g + y} is odd")
    if g < y:
        g, y = y, g
    k2 = g - y
    return comb(g, k2) * double_factorial(k2 - 1) * factorial(y)


def perfect_matchings(items: Sequence) -> Iterator[list]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i in range(len(rest)):
        for m in perfect_matchings(rest[:i] + rest[i + 1 :]):
            yield [(first, rest[i])] + m


def _pair(e: Edge, f: Edge) -> tuple[Edge, Edge]:
    return (e, f) if e <= f else (f, e)


@dataclass(frozen=True)
class Pairing:
    """``pairs[v]`` is a sorted tuple of arc pairs at vertex ``v``."""

    pairs: dict

    def partner(self, v: int, e: Edge) -> Edge:
        for a, b in self.pairs[v]:
            if a == e:
                return b
            if b == e:
                return a
        raise KeyError((v, e))

    def __eq__(self, other):
        return isinstance(other, Pairing) and self.pairs == other.pairs

    def __hash__(self):
        return hash(tuple(sorted(self.pairs.items())))


def make_pairing(pairs_at: dict) -> Pairing:
    return Pairing({v: tuple(sorted(_pair(*p) for p in ps)) for v, ps in pairs_at.items()})


def check_pairing(H: ColoredDifference, psi: Pairing) -> None:
    """Raise ``ValueError`` unless every arc of H is matched exactly once."""
    for v in H.vertices:
        arcs = sorted(e for p in psi.pairs.get(v, ()) for e in p)
        if arcs != H.incident(v):
            raise ValueError(f"pairing at vertex {v} does not match the arcs of H")
    extra = set(psi.pairs) - set(H.vertices)
    if any(psi.pairs[v] for v in extra):
        raise ValueError(f"pairing has arcs at vertices outside H: {sorted(extra)}")


def pairing_from_circuits(circuits: Iterable[Sequence[int]]) -> Pairing:
    """The pairing that pairs consecutive edges of each closed walk."""
    at: dict = {}
    for walk in circuits:
        L = len(walk)
        for i in range(L):
            prev = _edge(walk[i - 1], walk[i])
            nxt = _edge(walk[i], walk[(i + 1) % L])
            at.setdefault(walk[i], []).append((prev, nxt))
    return make_pairing(at)


def _edge(u, v):
    return (u, v) if u < v else (v, u)


def vertex_matchings(greens: list, yellows: list, mode: str) -> list:
    if mode == "alternating":
        if len(greens) != len(yellows):
            raise Unbalanced(f"{len(greens)} green vs {len(yellows)} yellow arcs")
        return [list(zip(greens, perm)) for perm in permutations(yellows)]
    if mode != "allow_bad":
        raise ValueError(f"unknown mode {mode!r}")
    major, minor = (greens, yellows) if len(greens) >= len(yellows) else (yellows, greens)
    out = []
    for partners in combinations(major, len(minor)):
        left = [e for e in major if e not in partners]
        for perm in permutations(minor):
            mixed = list(zip(partners, perm))
            for same in perfect_matchings(left):
                out.append(mixed + same)
    return out


def pairing_count(H: ColoredDifference, mode: str = "alternating") -> int:
    total = 1
    for v in H.vertices:
        g, y = H.g(v), H.y(v)
        if mode == "alternating":
            if g != y:
                raise Unbalanced(f"vertex {v}: g={g}, y={y}")
            total *= factorial(g)
        else:
            total *= count_vertex_pairings(g, y)
    return total


def enumerate_pairings(
    H: ColoredDifference, mode: str = "alternating", cap: int = ENUMERATION_CAP
) -> Iterator[Pairing]:
    total = pairing_count(H, mode)
    if total > cap:
        raise TooLarge(f"{total} pairings exceeds the cap {cap}")
    verts = H.vertices
    choices = []
    for v in verts:
        arcs = H.incident(v)
        greens = [e for e in arcs if H.color[e] == GREEN]
        yellows = [e for e in arcs if H.color[e] == YELLOW]
        choices.append(vertex_matchings(greens, yellows, mode))
    for combo in product(*choices):
        yield make_pairing(dict(zip(verts, combo)))


@dataclass(frozen=True)
class Circuit:
    """Closed walk; ``edges[i]`` joins ``vertices[i]`` and ``vertices[i+1]`` (cyclically)."""

    vertices: tuple
    edges: tuple

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class CircuitDecomposition:
    circuits: tuple

    def __iter__(self):
        return iter(self.circuits)

    def __len__(self):
        return len(self.circuits)

    def lengths(self) -> list[int]:
        return [len(c) for c in self.circuits]


def _canonical(vs: list, es: list) -> Circuit:
    # start at the smallest vertex, leaving along its smallest incident edge
    L = len(es)
    m = min(vs)
    best = None
    for i in range(L):
        if vs[i] != m:
            continue
        fwd = (es[i], i, 1)
        bwd = (es[i - 1], i, -1)
        for cand in (fwd, bwd):
            if best is None or cand[0] < best[0]:
                best = cand
    _, i, direction = best
    if direction == 1:
        nv = [vs[(i + k) % L] for k in range(L)]
        ne = [es[(i + k) % L] for k in range(L)]
    else:
        nv = [vs[(i - k) % L] for k in range(L)]
        ne = [es[(i - 1 - k) % L] for k in range(L)]
    return Circuit(tuple(nv), tuple(ne))


def decompose_circuits(H: ColoredDifference, psi: Pairing) -> CircuitDecomposition:
    """Follow ``psi`` to split H into edge-disjoint closed walks.

    Each walk leaves a vertex through the arc paired with the arc it
    arrived on.  Output order is canonical: every circuit starts at its
    smallest vertex via its smallest edge there, and circuits are sorted
    by their smallest edge.
    """
    unused = set(H.edges)
    circuits = []
    while unused:
        first = min(unused)
        u, v = first
        vs, es = [u], [first]
        unused.discard(first)
        cur, arrived = v, first
        while True:
            nxt = psi.partner(cur, arrived)
            if cur == u and nxt == first:
                break
            vs.append(cur)
            es.append(nxt)
            unused.discard(nxt)
            cur = nxt[0] if nxt[1] == cur else nxt[1]
            arrived = nxt
        circuits.append(_canonical(vs, es))
    circuits.sort(key=lambda c: min(c.edges))
    return CircuitDecomposition(tuple(circuits))


@dataclass(frozen=True)
class BadPairReport:
    """Same-colour pairs of a pairing under the current colouring.

    ``per_vertex[v] = (yellow_yellow, green_green)`` for every vertex of H.
    """

    per_vertex: dict
    green: dict
    yellow: dict
    interesting: tuple  # ((edge, tag), ...)

    @property
    def bad_vertices(self) -> list[int]:
        return sorted(v for v, (yy, gg) in self.per_vertex.items() if yy or gg)

    @property
    def b(self) -> int:
        return sum(yy + gg for yy, gg in self.per_vertex.values())

    def counts(self) -> tuple[int, int, int]:
        """(interesting edges, bad vertices, bad pairs)."""
        return len(self.interesting), len(self.bad_vertices), self.b


def bad_pair_report(
    H: ColoredDifference,
    psi: Pairing,
    interesting: Sequence = (),
    check_limits: bool = True,
) -> BadPairReport:
    per_vertex = {}
    for v in H.vertices:
        yy = gg = 0
        for e, f in psi.pairs[v]:
            ce, cf = H.color[e], H.color[f]
            if ce == cf:
                if ce == GREEN:
                    gg += 1
                else:
                    yy += 1
        # every arc sits in one pair, so the colour surplus fixes gg - yy
        assert H.g(v) - H.y(v) == 2 * (gg - yy)
        per_vertex[v] = (yy, gg)
    report = BadPairReport(per_vertex, dict(H.green), dict(H.yellow), tuple(interesting))
    if check_limits:
        check_report_limits(report)
    return report


def check_report_limits(report: BadPairReport) -> None:
    problems = []
    if len(report.interesting) > MAX_INTERESTING:
        problems.append(f"{len(report.interesting)} interesting edges")
    if len(report.bad_vertices) > MAX_BAD_VERTICES:
        problems.append(f"{len(report.bad_vertices)} bad vertices")
    if report.b > MAX_BAD_PAIRS:
        problems.append(f"{report.b} bad pairs")
    for v, (yy, gg) in report.per_vertex.items():
        if yy > MAX_PAIRS_PER_COLOUR or gg > MAX_PAIRS_PER_COLOUR:
            problems.append(f"vertex {v} has {yy} yellow and {gg} green bad pairs")
    if problems:
        raise LimitViolation("; ".join(problems))


@dataclass(frozen=True)
class RatioCheck:
    n_state: int
    n_balanced: int
    b: int
    d: int
    within_b: bool
    within_14: bool

    @property
    def ok(self) -> bool:
        return self.within_b and self.within_14


def check_pairing_ratio(
    states: Sequence, d: int, enumerate_check: bool = False, cap: int = ENUMERATION_CAP
) -> list[RatioCheck]:
    """Check ``N_state <= d^b * N_balanced`` and ``<= d^14 * N_balanced``.

    ``N_state`` counts pairings with same-colour pairs allowed only to
    absorb a colour surplus; ``N_balanced`` is ``prod theta_v!``.  With
    ``enumerate_check`` the closed form is confirmed by enumeration.
    """
    out = []
    for H, report in states:
        n_state = pairing_count(H, "allow_bad")
        if n_state > cap:
            raise TooLarge(f"{n_state} pairings exceeds the cap {cap}")
        if enumerate_check:
            seen = sum(1 for _ in enumerate_pairings(H, "allow_bad", cap))
            if seen != n_state:
                raise AssertionError(f"enumerated {seen} pairings, formula gives {n_state}")
        n_bal = prod(factorial(H.theta(v)) for v in H.vertices)
        b = report.b
        out.append(
            RatioCheck(
                n_state,
                n_bal,
                b,
                d,
                n_state <= d**b * n_bal,
                n_state <= d**MAX_BAD_PAIRS * n_bal,
            )
        )
    return out


def report_csv(report: BadPairReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex", "g", "y", "yellow_yellow", "green_green"])
    for v in sorted(report.per_vertex):
        yy, gg = report.per_vertex[v]
        w.writerow([v, report.green.get(v, 0), report.yellow.get(v, 0), yy, gg])
    w.writerow([])
    w.writerow(["b", "interesting_edges", "bad_vertices"])
    w.writerow([report.b, len(report.interesting), len(report.bad_vertices)])
    return buf.getvalue()
