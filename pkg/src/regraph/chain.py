"""The lazy switch chain on d-regular graphs.

One step: with probability 1/2 hold.  Otherwise pick an unordered pair of
non-incident edges uniformly, pick one of the three perfect matchings of
their four endvertices uniformly (the matching equal to the pair itself
included), and replace the pair by that matching unless a multi-edge
would result.  Every off-diagonal transition therefore has probability
``1/(6M)`` where ``M`` is :func:`nonincident_pair_count`.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .errors import StateSpaceTooLarge, WouldCreateMultiEdge
from .graph import (
    RegularGraph,
    SwitchMove,
    apply_switch,
    build_graph,
    check_parameters,
    edge_bit,
    switch_matchings,
)

EXACT_LIMIT = 2000
MATRIX_CAP = 25_000
BATCH_BLOCK = 8192


def nonincident_pair_count(n: int, d: int) -> int:
    check_parameters(n, d)
    return comb(n * d // 2, 2) - n * comb(d, 2)


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def propose(Z: RegularGraph, rng: np.random.Generator) -> Optional[SwitchMove]:
    """Draw one proposal; ``None`` means the chain holds."""
    if rng.random() < 0.5:
        return None
    m = len(Z.edges)
    if nonincident_pair_count(Z.n, Z.d) == 0:
        return None
    edges = Z.edges
    while True:
        i, j = rng.integers(m, size=2)
        if i == j:
            continue
        e1, e2 = edges[i], edges[j]
        if e1[0] in e2 or e1[1] in e2:
            continue
        break
    r = int(rng.integers(3))
    return SwitchMove(e1, e2, switch_matchings(e1, e2)[r])


def step(Z: RegularGraph, rng: np.random.Generator) -> RegularGraph:
    move = propose(Z, rng)
    if move is None or move.is_identity:
        return Z
    try:
        return apply_switch(Z, move)
    except WouldCreateMultiEdge:
        return Z


def run(
    Z0: RegularGraph,
    steps: int,
    seed=None,
    callback: Optional[Callable[[int, RegularGraph], None]] = None,
    validate: bool = False,
) -> RegularGraph:
    """Run the chain for ``steps`` steps and return the final state.

    ``callback(t, Z)`` is called for ``t = 0..steps``.
    """
    rng = make_rng(seed)
    Z = Z0
    if callback is not None:
        callback(0, Z)
    for t in range(1, steps + 1):
        Z = step(Z, rng)
        if validate:
            build_graph(Z.n, Z.d, Z.edges)
        if callback is not None:
            callback(t, Z)
    return Z


def thread_count() -> int:
    """Worker threads allowed by ``REGRAPH_THREADS`` (0 or unset means auto)."""
    try:
        k = int(os.environ.get("REGRAPH_THREADS", "0"))
    except ValueError:
        k = 0
    return k if k > 0 else (os.cpu_count() or 1)


class BatchChains:
    """Many independent copies of the chain advanced together with numpy.

    Each copy keeps an edge array and an adjacency matrix.  The kernel is
    the same as :func:`step`; only the random stream differs.
    """

    def __init__(self, Z0: RegularGraph, chains: int, rng: np.random.Generator):
        self.n, self.d = Z0.n, Z0.d
        self.chains = chains
        self.rng = rng
        self.m = len(Z0.edges)
        self.M = nonincident_pair_count(Z0.n, Z0.d)
        base = np.array(Z0.edges, dtype=np.int64).reshape(self.m, 2)
        self.E = np.broadcast_to(base, (chains, self.m, 2)).copy()
        self.A = np.zeros((chains, self.n + 1, self.n + 1), dtype=bool)
        if self.m:
            rows = np.arange(chains)[:, None]
            self.A[rows, self.E[:, :, 0], self.E[:, :, 1]] = True
            self.A[rows, self.E[:, :, 1], self.E[:, :, 0]] = True

    def step(self) -> None:
        rng = self.rng
        move = rng.random(self.chains) >= 0.5
        if self.M == 0:
            return
        idx = np.flatnonzero(move)
        k = len(idx)
        i = np.empty(k, dtype=np.int64)
        j = np.empty(k, dtype=np.int64)
        todo = np.arange(k)
        while len(todo):
            ii = rng.integers(self.m, size=len(todo))
            jj = rng.integers(self.m, size=len(todo))
            e1 = self.E[idx[todo], ii]
            e2 = self.E[idx[todo], jj]
            ok = (ii != jj) & (e1[:, 0] != e2[:, 0]) & (e1[:, 0] != e2[:, 1])
            ok &= (e1[:, 1] != e2[:, 0]) & (e1[:, 1] != e2[:, 1])
            i[todo[ok]] = ii[ok]
            j[todo[ok]] = jj[ok]
            todo = todo[~ok]
        r = rng.integers(3, size=k)
        a, b = self.E[idx, i, 0], self.E[idx, i, 1]
        c, d = self.E[idx, j, 0], self.E[idx, j, 1]
        # r == 1: {ac, bd}; r == 2: {ad, bc}; r == 0: identity
        p1 = np.where(r == 1, c, d)
        p2 = np.where(r == 1, d, c)
        ok = (r != 0) & ~self.A[idx, a, p1] & ~self.A[idx, b, p2]
        idx, i, j = idx[ok], i[ok], j[ok]
        a, b, c, d, p1, p2 = a[ok], b[ok], c[ok], d[ok], p1[ok], p2[ok]
        self.A[idx, a, b] = self.A[idx, b, a] = False
        self.A[idx, c, d] = self.A[idx, d, c] = False
        self.A[idx, a, p1] = self.A[idx, p1, a] = True
        self.A[idx, b, p2] = self.A[idx, p2, b] = True
        self.E[idx, i, 0] = np.minimum(a, p1)
        self.E[idx, i, 1] = np.maximum(a, p1)
        self.E[idx, j, 0] = np.minimum(b, p2)
        self.E[idx, j, 1] = np.maximum(b, p2)

    def keys(self) -> np.ndarray:
        """Edge-bitmask key of every chain (see :meth:`RegularGraph.key`)."""
        n = self.n
        u, v = self.E[:, :, 0], self.E[:, :, 1]
        bits = (u - 1) * (2 * n - u) // 2 + (v - u - 1)
        if n * (n - 1) // 2 <= 63:
            return np.bitwise_or.reduce(np.left_shift(np.int64(1), bits), axis=1)
        return np.array([sum(1 << int(x) for x in row) for row in bits], dtype=object)

    def graphs(self) -> list[RegularGraph]:
        return [RegularGraph(self.n, self.d, tuple(map(tuple, row))) for row in self.E.tolist()]


def _block_sizes(chains: int) -> list[int]:
    sizes = [BATCH_BLOCK] * (chains // BATCH_BLOCK)
    if chains % BATCH_BLOCK:
        sizes.append(chains % BATCH_BLOCK)
    return sizes


def run_batch(
    Z0: RegularGraph,
    steps: int,
    chains: int,
    seed=None,
    observe: Optional[Callable[[int, int, BatchChains], None]] = None,
) -> list[BatchChains]:
    """Run ``chains`` independent copies from ``Z0`` for ``steps`` steps.

    Chains are split into fixed-size blocks, each seeded from
    ``SeedSequence(seed).spawn``, so the result does not depend on the
    number of worker threads.  ``observe(block, t, batch)`` is called for
    ``t = 0..steps``.
    """
    sizes = _block_sizes(chains)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))

    def work(b):
        batch = BatchChains(Z0, sizes[b], np.random.default_rng(seeds[b]))
        if observe is not None:
            observe(b, 0, batch)
        for t in range(1, steps + 1):
            batch.step()
            if observe is not None:
                observe(b, t, batch)
        return batch

    workers = min(thread_count(), len(sizes)) or 1
    if workers == 1:
        return [work(b) for b in range(len(sizes))]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(work, range(len(sizes))))


@dataclass(frozen=True)
class TransitionMatrix:
    """Exact kernel ``P = counts / denom`` over an ordered list of states.

    ``counts`` is a sparse integer matrix including the diagonal.
    """

    states: list
    counts: sp.csr_matrix
    denom: int

    def __len__(self) -> int:
        return len(self.states)

    @property
    def exact(self) -> bool:
        return len(self.states) <= EXACT_LIMIT

    def dense(self) -> np.ndarray:
        return self.counts.toarray() / self.denom

    def entry(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.counts[i, j]), self.denom)

    def rational(self) -> list[list[Fraction]]:
        c = self.counts.toarray()
        return [[Fraction(int(x), self.denom) for x in row] for row in c]


def transition_matrix(states: list, cap: int = MATRIX_CAP) -> TransitionMatrix:
    """Build the exact kernel over a complete list of states of one ``(n, d)``."""
    N = len(states)
    if N > cap:
        raise StateSpaceTooLarge(f"{N} states exceeds the matrix cap {cap}")
    if N == 0:
        raise ValueError("empty state list")
    n, d = states[0].n, states[0].d
    M = nonincident_pair_count(n, d)
    denom = 6 * M if M else 1
    keys = [G.key() for G in states]
    index = {k: i for i, k in enumerate(keys)}
    if len(index) != N:
        raise ValueError("duplicate states")
    bit = {}
    rows, cols, vals = [], [], []
    for i, G in enumerate(states):
        key = keys[i]
        edges = G.edges
        out = {}
        for p in range(len(edges)):
            e1 = edges[p]
            for q in range(p + 1, len(edges)):
                e2 = edges[q]
                if e1[0] in e2 or e1[1] in e2:
                    continue
                base = key ^ _bit(bit, n, e1) ^ _bit(bit, n, e2)
                for f1, f2 in switch_matchings(e1, e2)[1:]:
                    add = _bit(bit, n, f1) | _bit(bit, n, f2)
                    if key & add:
                        continue
                    j = index.get(base | add)
                    if j is None:
                        raise ValueError("state list is not closed under switches")
                    out[j] = out.get(j, 0) + 1
        total = sum(out.values())
        out[i] = out.get(i, 0) + denom - total
        for j, c in out.items():
            rows.append(i)
            cols.append(j)
            vals.append(c)
    counts = sp.csr_matrix((vals, (rows, cols)), shape=(N, N), dtype=np.int64)
    return TransitionMatrix(list(states), counts, denom)


def _bit(cache, n, e):
    b = cache.get(e)
    if b is None:
        b = cache[e] = 1 << edge_bit(n, *e)
    return b


__all__ = [
    "BatchChains",
    "TransitionMatrix",
    "make_rng",
    "nonincident_pair_count",
    "propose",
    "run",
    "run_batch",
    "step",
    "thread_count",
    "transition_matrix",
]
