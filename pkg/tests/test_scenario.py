from math import factorial

import pytest

from oracles import alternating_pairings
from regraph.errors import ScriptInvalid
from regraph.pairing import check_pairing, check_pairing_ratio, decompose_circuits, enumerate_pairings
from regraph.scenario import (
    EXPECTED,
    SCRIPT,
    VERTEX,
    build_scenario,
    checkpoint_csv,
    edge_name,
    initial_state,
    play,
    verify_checkpoints,
    without_stage,
)


@pytest.fixture(scope="module")
def sc():
    return build_scenario()


def test_shape(sc):
    assert len(sc.H) == 30
    assert len({v for e in sc.H for v in e}) == 21
    assert sc.dotted not in sc.H
    H = initial_state(sc).coloring
    thetas = {v: H.theta(v) for v in H.vertices}
    assert thetas[VERTEX["x0"]] == 5
    for name in ("x3", "x5", "x6", "x7", "x9"):
        assert thetas[VERTEX[name]] == 2
    assert sorted(thetas.values()).count(1) == 15
    assert H.is_balanced()


def test_initial_report_clean(sc):
    s = initial_state(sc)
    assert s.counts() == (0, 0, 0)


def test_initial_alternating_count(sc):
    H = initial_state(sc).coloring
    n = sum(1 for _ in enumerate_pairings(H))
    assert n == factorial(5) * factorial(2) ** 5 == 3840
    assert alternating_pairings(sorted(H.edges), H.color) == 3840


def test_scripted_pairing_circuits(sc):
    H = initial_state(sc).coloring
    check_pairing(H, sc.psi)
    dec = decompose_circuits(H, sc.psi)
    assert sorted(dec.lengths(), reverse=True) == [14, 4, 4, 4, 4]
    assert {frozenset(c.edges) for c in dec} == {
        frozenset((min(w[i], w[(i + 1) % len(w)]), max(w[i], w[(i + 1) % len(w)])) for i in range(len(w)))
        for w in sc.circuits
    }


def test_checkpoint_table():
    traj = play()
    assert [s.label for s in traj.checkpoints] == list(EXPECTED)
    assert [s.counts() for s in traj.checkpoints] == list(EXPECTED.values())


def test_interesting_edges_named():
    traj = play()
    fig4 = traj.checkpoints[2]
    assert sorted(edge_name(e) for e, _ in fig4.interesting) == ["x0-x3", "x0-x7", "x0-x9", "x5-x6"]
    fig5 = traj.checkpoints[3]
    assert sorted(edge_name(e) for e, _ in fig5.interesting) == ["x0-x3", "x0-x5", "x0-x9"]
    assert fig4.report.per_vertex[VERTEX["x0"]] == (2, 2)
    for name in ("x3", "x5", "x6", "x7", "x9"):
        assert fig4.report.per_vertex[VERTEX[name]] == (1, 1)


def test_every_state_within_limits():
    traj = play()
    for s in traj.states:
        inter, bad_v, b = s.counts()
        assert inter <= 4 and bad_v <= 6 and b <= 14
    assert max(s.report.b for s in traj.states) == 14


def test_ratio_at_checkpoints_with_enumeration():
    traj = play()
    checks = check_pairing_ratio(
        [(s.coloring, s.report) for s in traj.checkpoints], d=5, enumerate_check=True
    )
    assert all(c.ok for c in checks)


def test_final_state():
    traj = play()
    sc = traj.scenario
    final = traj.final
    assert final.z & sc.H == sc.Gp_side
    assert sc.dotted in final.z
    tail = traj.states[-4:]
    assert all(s.label == "final" and s.report.b == 0 for s in tail)


def test_replay_is_deterministic():
    a, b = play(), play()
    assert [s.z for s in a.states] == [s.z for s in b.states]
    assert checkpoint_csv(a) == checkpoint_csv(b)


def test_verification_passes():
    v = verify_checkpoints(play())
    assert v.ok, str(v)


def test_skipping_shortcut_restoration_fails_at_fig5():
    script = without_stage("fig5")
    with pytest.raises(ScriptInvalid):
        play(script=script)
    traj = play(script=script, strict=False)
    v = verify_checkpoints(traj)
    assert not v.ok
    assert v.first_failure() == "fig5"


def test_inapplicable_move_rejected():
    broken = (SCRIPT[1],) + SCRIPT  # phase 1 before the shortcut, then again
    with pytest.raises(ScriptInvalid):
        play(script=broken)


def test_csv():
    text = checkpoint_csv(play())
    lines = text.strip().splitlines()
    assert lines[0] == "label,interesting,bad_vertices,bad_pairs,ratio_ok"
    assert lines[3] == "fig4,4,6,14,true"
    assert len(lines) == 7
