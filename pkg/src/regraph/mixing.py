"""State-space enumeration, exact and empirical mixing, and the bound formulas."""

from __future__ import annotations

import math
from itertools import combinations
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .chain import TransitionMatrix, run_batch
from .errors import (
    MismatchedParameters,
    NotConnected,
    NumericalFailure,
    StateSpaceTooLarge,
)
from .graph import RegularGraph, check_parameters, circulant_start, serialize_graph

ENUMERATION_CAP = 10**6
# float TV values closer than this to eps are re-checked in exact arithmetic
BOUNDARY_SLACK = 1e-9


@dataclass(frozen=True)
class StateSpace:
    n: int
    d: int
    states: list
    index: dict  # edge-bitmask key -> position

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def position(self, G: RegularGraph) -> int:
        return self.index[G.key()]

    def by_serialization(self) -> dict:
        return {serialize_graph(G): i for i, G in enumerate(self.states)}


def enumerate_state_space(n: int, d: int, cap: int = ENUMERATION_CAP) -> StateSpace:
    """All labeled simple d-regular graphs on ``{1..n}``.

    Vertices are filled in increasing order; vertex ``v`` picks its
    remaining neighbours among higher vertices, so every graph is produced
    exactly once.
    """
    check_parameters(n, d)
    residual = [0] + [d] * n
    chosen: list = []
    states: list = []

    def fill(v):
        if v > n:
            if len(states) >= cap:
                raise StateSpaceTooLarge(f"more than {cap} states for (n, d) = ({n}, {d})")
            states.append(RegularGraph(n, d, tuple(chosen)))
            return
        need = residual[v]
        cands = [w for w in range(v + 1, n + 1) if residual[w] > 0]
        if need > len(cands):
            return
        for picks in combinations(cands, need):
            for w in picks:
                residual[w] -= 1
                chosen.append((v, w))
            # an unprocessed vertex can only gain partners among the other unprocessed ones
            if all(residual[u] <= n - v - 1 for u in range(v + 1, n + 1)):
                fill(v + 1)
            for w in picks:
                residual[w] += 1
                chosen.pop()

    fill(1)
    index = {G.key(): i for i, G in enumerate(states)}
    return StateSpace(n, d, states, index)


def complement_bijection_check(S1: StateSpace, S2: StateSpace) -> bool:
    """True iff edge complementation maps ``S1`` onto ``S2`` bijectively."""
    if S1.n != S2.n or S2.d != S1.n - 1 - S1.d:
        raise MismatchedParameters(
            f"({S2.n}, {S2.d}) is not the complement of ({S1.n}, {S1.d})"
        )
    if len(S1) != len(S2):
        return False
    images = set()
    for G in S1:
        k = G.complement().key()
        if k not in S2.index:
            return False
        images.add(k)
    return len(images) == len(S2)


def is_connected(P: TransitionMatrix) -> bool:
    ncomp, _ = connected_components(P.counts, directed=False)
    return ncomp == 1


def _max_tv(Pt: np.ndarray) -> float:
    N = Pt.shape[0]
    return float(0.5 * np.abs(Pt - 1.0 / N).sum(axis=1).max())


def tv_curve(P: TransitionMatrix, t_max: int, start: Optional[int] = None) -> np.ndarray:
    """TV distance to uniform for ``t = 0..t_max``.

    Worst case over start states by default, or from ``start`` only.
    """
    Pd = P.dense()
    N = len(P)
    if start is None:
        Pt = np.eye(N)
        out = [_max_tv(Pt)]
        for _ in range(t_max):
            Pt = Pt @ Pd
            out.append(_max_tv(Pt))
    else:
        row = np.zeros(N)
        row[start] = 1.0
        out = [0.5 * np.abs(row - 1.0 / N).sum()]
        for _ in range(t_max):
            row = row @ Pd
            out.append(0.5 * np.abs(row - 1.0 / N).sum())
    return np.array(out)


def max_tv_exact(P: TransitionMatrix, t: int) -> Fraction:
    """Worst-case TV distance after ``t`` steps, in rational arithmetic."""
    N = len(P)
    A = P.counts.toarray().astype(object)
    R = _int_matpow(A, t)
    D = P.denom**t
    worst = max(sum(abs(N * int(x) - D) for x in row) for row in R)
    return Fraction(worst, 2 * N * D)


def _int_matpow(A, t):
    N = A.shape[0]
    R = np.identity(N, dtype=object)
    R[:] = [[int(i == j) for j in range(N)] for i in range(N)]
    base = A
    while t:
        if t & 1:
            R = R.dot(base)
        t >>= 1
        if t:
            base = base.dot(base)
    return R


def exact_mixing_time(P: TransitionMatrix, eps, t_max: int = 100_000) -> int:
    """Smallest ``t`` with worst-case TV distance to uniform at most ``eps``.

    Powers are taken in double precision; when a TV value falls within
    ``BOUNDARY_SLACK`` of ``eps`` the decision is redone exactly.
    """
    eps_q = Fraction(eps)
    if not 0 < eps_q < 1:
        raise ValueError("eps must lie in (0, 1)")
    N = len(P)
    if N == 1:
        return 0
    if not is_connected(P):
        raise NotConnected("the switch graph on these states is disconnected")
    Pd = P.dense()
    Pt = np.eye(N)
    eps_f = float(eps_q)
    for t in range(t_max + 1):
        tv = _max_tv(Pt)
        if abs(tv - eps_f) < BOUNDARY_SLACK:
            if max_tv_exact(P, t) <= eps_q:
                return t
        elif tv < eps_f:
            return t
        Pt = Pt @ Pd
    raise NumericalFailure(f"TV distance still above {eps} after {t_max} steps")


def spectrum(P: TransitionMatrix) -> np.ndarray:
    """Eigenvalues of the symmetric kernel, in decreasing order."""
    try:
        w = np.linalg.eigvalsh(P.dense())
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    return w[::-1]


def spectral_gap(P: TransitionMatrix) -> float:
    if len(P) == 1:
        return 1.0
    return float(1.0 - spectrum(P)[1])


def empirical_tv_curve(
    n: int,
    d: int,
    ts: Sequence[int],
    chains: int,
    seed=None,
    space: Optional[StateSpace] = None,
) -> dict:
    """Empirical TV distance to uniform at each ``t`` in ``ts``.

    All chains start from :func:`circulant_start`; one pass of
    ``max(ts)`` steps records the end-state histogram at every requested
    ``t``.
    """
    if space is None:
        space = enumerate_state_space(n, d)
    N = len(space)
    wanted = set(int(t) for t in ts)
    hist = {t: np.zeros(N, dtype=np.int64) for t in wanted}
    lookup = space.index

    def observe(block, t, batch):
        if t in wanted:
            pos = np.fromiter((lookup[int(k)] for k in batch.keys()), dtype=np.int64)
            np.add.at(hist[t], pos, 1)

    run_batch(circulant_start(n, d), max(wanted), chains, seed, observe=observe)
    return {t: float(0.5 * np.abs(hist[t] / chains - 1.0 / N).sum()) for t in sorted(wanted)}


def empirical_tv(n: int, d: int, t: int, chains: int, seed=None, space=None) -> float:
    return empirical_tv_curve(n, d, [t], chains, seed, space)[t]


@dataclass(frozen=True)
class BoundsReport:
    n: int
    d: int
    eps: float
    theorem_bound: float
    old_bound: float
    flow_bound: Optional[float]
    load_bound: float
    # integer prefactors, so the d^8 ratio can be checked exactly
    theorem_prefactor: int = field(repr=False)
    old_prefactor: int = field(repr=False)

    @property
    def ratio(self) -> Optional[Fraction]:
        if self.old_prefactor == 0:
            return None
        return Fraction(self.theorem_prefactor, self.old_prefactor)


def theorem_bound(n: int, d: int, eps, omega_size: Optional[int] = None) -> BoundsReport:
    """Evaluate the mixing, flow and load bounds (natural logarithms).

    ``flow_bound`` needs ``|Omega|`` and is ``None`` without it.
    """
    eps = float(eps)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    dn = d * n
    log_term = (dn * math.log(dn) if dn > 0 else 0.0) + math.log(1.0 / eps)
    new_pre = d**23 * n**8
    old_pre = d**15 * n**8
    flow = None
    if omega_size:
        flow = float(Fraction(2 * d**20 * n**5, omega_size))
    return BoundsReport(
        n=n,
        d=d,
        eps=eps,
        theorem_bound=float(new_pre) * log_term,
        old_bound=float(old_pre) * log_term,
        flow_bound=flow,
        load_bound=float(2 * d**22 * n**7),
        theorem_prefactor=new_pre,
        old_prefactor=old_pre,
    )
