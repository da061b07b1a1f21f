from collections import Counter
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from scipy.stats import chisquare

from oracles import kernel_row, nonincident_pairs
from regraph.chain import (
    BatchChains,
    make_rng,
    nonincident_pair_count,
    propose,
    run,
    run_batch,
    step,
    transition_matrix,
)
from regraph.errors import ParityError, StateSpaceTooLarge
from regraph.graph import build_graph, circulant_start

K4 = build_graph(4, 3, list(combinations(range(1, 5), 2)))
CYCLE6 = circulant_start(6, 2)


@pytest.mark.parametrize("n, d", [(4, 3), (6, 2), (6, 3), (8, 3), (10, 1), (7, 4), (3, 2)])
def test_nonincident_pair_count_brute_force(n, d):
    G = circulant_start(n, d)
    assert nonincident_pair_count(n, d) == len(nonincident_pairs(G.edges))


def test_nonincident_pair_count_examples():
    assert nonincident_pair_count(4, 3) == 3
    assert nonincident_pair_count(6, 2) == 9
    assert nonincident_pair_count(10, 1) == 10
    with pytest.raises(ParityError):
        nonincident_pair_count(5, 3)


def test_propose_uniform_pairs_and_lazy():
    rng = make_rng(20261019)
    draws = 10**6
    pairs = Counter()
    holds = 0
    matchings = Counter()
    for _ in range(draws):
        mv = propose(CYCLE6, rng)
        if mv is None:
            holds += 1
            continue
        pairs[(mv.e1, mv.e2) if mv.e1 < mv.e2 else (mv.e2, mv.e1)] += 1
        matchings[mv.is_identity] += 1
    assert len(pairs) == 9
    assert chisquare(list(pairs.values())).pvalue > 1e-3
    # hold probability 1/2, 3 sigma
    assert abs(holds - draws / 2) < 3 * np.sqrt(draws / 4)
    moved = draws - holds
    assert abs(matchings[True] - moved / 3) < 3 * np.sqrt(moved * 2 / 9)


def test_k4_never_moves():
    rng = make_rng(1)
    Z = K4
    for _ in range(2000):
        Z = step(Z, rng)
    assert Z == K4


def test_no_valid_pair_holds():
    triangle = build_graph(3, 2, [(1, 2), (2, 3), (1, 3)])
    rng = make_rng(3)
    assert all(propose(triangle, rng) is None for _ in range(100))


def test_run_determinism_and_callback():
    seen = []
    a = run(circulant_start(8, 3), 300, seed=42, callback=lambda t, Z: seen.append(Z))
    b_seen = []
    b = run(circulant_start(8, 3), 300, seed=42, callback=lambda t, Z: b_seen.append(Z))
    assert a == b and seen == b_seen and len(seen) == 301
    assert run(CYCLE6, 0, seed=5) == CYCLE6
    run(circulant_start(10, 4), 500, seed=9, validate=True)


def _empirical_row_check(counts, P, i, trials):
    for j in range(len(P)):
        p = float(P.entry(i, j))
        se = np.sqrt(max(p * (1 - p), 1e-12) / trials)
        assert abs(counts.get(j, 0) / trials - p) <= 4 * se + 1e-12, (j, p)


def test_step_matches_kernel_row(space62, kernel62):
    i = space62.position(CYCLE6)
    rng = make_rng(7)
    trials = 10**6
    counts = Counter(space62.position(step(CYCLE6, rng)) for _ in range(trials))
    _empirical_row_check(counts, kernel62, i, trials)


def test_batch_step_matches_kernel_row(space63, kernel63):
    start = circulant_start(6, 3)
    i = space63.position(start)
    trials = 10**6
    batch = BatchChains(start, trials, make_rng(11))
    batch.step()
    counts = Counter(space63.index[int(k)] for k in batch.keys())
    _empirical_row_check(counts, kernel63, i, trials)


def test_batch_chains_stay_valid():
    for n, d in [(8, 3), (9, 4), (12, 5)]:
        batch = BatchChains(circulant_start(n, d), 200, make_rng(n))
        for _ in range(50):
            batch.step()
        for G in batch.graphs():
            build_graph(n, d, G.edges)
        assert [G.key() for G in batch.graphs()] == [int(k) for k in batch.keys()]


def test_run_batch_independent_of_thread_count(monkeypatch):
    keys = []
    for threads in ("1", "4"):
        monkeypatch.setenv("REGRAPH_THREADS", threads)
        out = run_batch(circulant_start(6, 3), 20, 20_000, seed=123)
        keys.append(np.concatenate([b.keys() for b in out]))
    assert np.array_equal(keys[0], keys[1])


@pytest.mark.parametrize("fixture", ["space62", "space63"])
def test_kernel_matches_definition(fixture, request):
    space = request.getfixturevalue(fixture)
    P = transition_matrix(space.states)
    for i, G in enumerate(space.states):
        row = kernel_row(G.edges)
        want = {space.index[_key(G.n, e)]: p for e, p in row.items()}
        for j in range(len(space)):
            assert P.entry(i, j) == want.get(j, 0)


def _key(n, edges):
    from regraph.graph import edge_bit

    return sum(1 << edge_bit(n, u, v) for u, v in edges)


def test_kernel_single_state():
    P = transition_matrix([K4])
    assert P.rational() == [[Fraction(1)]]


def test_kernel_62_entries(kernel62):
    R = kernel62.rational()
    assert len(R) == 70
    unit = Fraction(1, 6 * 9)
    for i in range(70):
        for j in range(70):
            if i != j:
                assert R[i][j] in (0, unit)
                assert R[i][j] == R[j][i]
        assert R[i][i] >= Fraction(1, 2)
        assert sum(R[i]) == 1


def test_kernel_cap():
    with pytest.raises(StateSpaceTooLarge):
        transition_matrix([CYCLE6] * 5, cap=4)
