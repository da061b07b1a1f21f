"""Scripted replay of a canonical-path segment that reaches 14 bad pairs.

The symmetric difference H is the union of five alternating circuits
through 21 named vertices, plus one extra edge ``x0 x5`` that lies in
both end graphs.  The long 14-edge circuit visits ``x0`` twice and is
processed first: a shortcut switch adds ``x0 x6`` and ``a x5`` and
removes ``x5 x6``, leaving the 12-cycle ``x0 x1 ... x11``.  That cycle is
then processed by five switches, each of which moves an odd chord
``x0 x_odd`` in or out of Z.  Four single switches finish the 4-cycles.

Only Z restricted to ``H + {x0 x5}`` is tracked; the rest of the host
graph never changes.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import LimitViolation, RegraphError, ScriptInvalid
from .graph import ColoredDifference, SwitchMove, color_difference, make_edge, switch_edge_set
from .pairing import (
    MAX_BAD_PAIRS,
    MAX_BAD_VERTICES,
    MAX_INTERESTING,
    ODD_CHORD,
    SHORTCUT,
    BadPairReport,
    Pairing,
    bad_pair_report,
    check_pairing_ratio,
    check_report_limits,
    pairing_from_circuits,
)

NAMES = [f"x{i}" for i in range(12)] + ["a", "u1", "u2", "w1", "w2", "v1", "v2", "z1", "z2"]
VERTEX = {name: i + 1 for i, name in enumerate(NAMES)}

# processing order; the bool says whether the first edge belongs to G (= initial Z)
CIRCUITS = [
    ("x0 a x5 x4 x3 x2 x1 x0 x11 x10 x9 x8 x7 x6", True),
    ("x0 x9 u1 u2", False),
    ("x0 w1 w2 x3", True),
    ("x0 x7 v1 v2", True),
    ("x5 x6 z1 z2", True),
]
DOTTED = ("x0", "x5")
RATIO_DEGREE = 5  # theta(x0) = 5 forces d >= 5

# (interesting edges, bad vertices, bad pairs) after each checkpoint
EXPECTED = {
    "fig2": (1, 2, 4),
    "fig3": (2, 4, 8),
    "fig4": (4, 6, 14),
    "fig5": (3, 4, 8),
    "fig6": (1, 2, 4),
    "fig7": (0, 0, 0),
}


def E(u: str, v: str):
    return make_edge(VERTEX[u], VERTEX[v])


def name(v: int) -> str:
    return NAMES[v - 1]


def edge_name(e) -> str:
    return f"{name(e[0])}-{name(e[1])}"


def switch(remove: str, add: str) -> SwitchMove:
    """``switch("x0 x1, x2 x3", "x0 x3, x1 x2")``."""
    r1, r2 = (E(*p.split()) for p in remove.split(","))
    a1, a2 = (E(*p.split()) for p in add.split(","))
    return SwitchMove(r1, r2, (a1, a2))


@dataclass(frozen=True)
class Stage:
    label: str
    moves: tuple
    checkpoint: bool = True
    # interesting edges are only tracked while the 2-circuit is processed
    in_long_circuit: bool = True


SCRIPT = (
    Stage("fig2", (switch("x0 a, x5 x6", "a x5, x0 x6"),)),  # shortcut
    Stage("fig3", (switch("x0 x1, x2 x3", "x0 x3, x1 x2"),)),  # phase 1
    Stage("fig4", (switch("x0 x7, x8 x9", "x0 x9, x7 x8"),)),  # phase 2
    Stage("fig5", (switch("x0 x5, x6 x7", "x0 x7, x5 x6"),)),
    Stage("fig6", (switch("x0 x3, x4 x5", "x0 x5, x3 x4"),)),
    Stage("fig7", (switch("x0 x9, x10 x11", "x0 x11, x9 x10"),)),  # phase 3
    Stage(
        "final",
        (
            switch("x9 u1, u2 x0", "x0 x9, u1 u2"),
            switch("x0 w1, w2 x3", "w1 w2, x0 x3"),
            switch("x0 x7, v1 v2", "x7 v1, x0 v2"),
            switch("x5 x6, z1 z2", "x6 z1, x5 z2"),
        ),
        checkpoint=False,
        in_long_circuit=False,
    ),
)

# chords of the 12-cycle at its start vertex x0, and the shortcut edge
CANDIDATES = (
    (E("x5", "x6"), SHORTCUT),
    (E("x0", "x3"), ODD_CHORD),
    (E("x0", "x5"), ODD_CHORD),
    (E("x0", "x7"), ODD_CHORD),
    (E("x0", "x9"), ODD_CHORD),
)


@dataclass(frozen=True)
class Scenario:
    """The fixed data of the example: H, both end graphs on H, and the pairing."""

    circuits: tuple  # vertex-id walks in processing order
    H: frozenset
    G_side: frozenset  # H-edges of G
    Gp_side: frozenset  # H-edges of G'
    dotted: tuple
    psi: Pairing

    @property
    def initial_z(self) -> frozenset:
        return self.G_side | {self.dotted}


@dataclass(frozen=True)
class ScenarioState:
    label: str
    z: frozenset
    interesting: tuple
    coloring: ColoredDifference = field(repr=False)
    report: BadPairReport = field(repr=False)

    def counts(self):
        return self.report.counts()


def build_scenario() -> Scenario:
    walks, G_side, H = [], set(), set()
    for text, first_in_G in CIRCUITS:
        walk = [VERTEX[s] for s in text.split()]
        walks.append(tuple(walk))
        for i in range(len(walk)):
            e = make_edge(walk[i], walk[(i + 1) % len(walk)])
            if e in H:
                raise ScriptInvalid(f"edge {edge_name(e)} lies on two circuits")
            H.add(e)
            if (i % 2 == 0) == first_in_G:
                G_side.add(e)
    return Scenario(
        circuits=tuple(walks),
        H=frozenset(H),
        G_side=frozenset(G_side),
        Gp_side=frozenset(H - G_side),
        dotted=E(*DOTTED),
        psi=pairing_from_circuits(walks),
    )


def _state(sc: Scenario, label: str, z: frozenset, tracking: bool) -> ScenarioState:
    start = sc.initial_z
    interesting = ()
    if tracking:
        interesting = tuple((e, tag) for e, tag in CANDIDATES if (e in z) != (e in start))
    coloring = color_difference(sc.H, z)
    report = bad_pair_report(coloring, sc.psi, interesting, check_limits=False)
    return ScenarioState(label, z, interesting, coloring, report)


def initial_state(sc: Optional[Scenario] = None) -> ScenarioState:
    sc = sc or build_scenario()
    return _state(sc, "fig1", sc.initial_z, True)


@dataclass
class Trajectory:
    scenario: Scenario
    checkpoints: list
    states: list  # every state after every move, in order
    error: Optional[str] = None

    @property
    def final(self) -> ScenarioState:
        return self.states[-1]


def play(
    scenario: Optional[Scenario] = None, script=SCRIPT, strict: bool = True
) -> Trajectory:
    """Replay ``script`` and record a checkpoint after each checkpoint stage.

    In strict mode any inapplicable move, structural-limit violation or
    checkpoint mismatch raises :class:`ScriptInvalid`.  Otherwise the
    replay stops at the first inapplicable move and the error is stored
    on the trajectory.
    """
    sc = scenario or build_scenario()
    state = initial_state(sc)
    traj = Trajectory(sc, [], [state])
    for stage in script:
        for move in stage.moves:
            try:
                z = switch_edge_set(state.z, move)
            except RegraphError as exc:
                msg = f"{stage.label}: cannot apply {move}: {exc}"
                if strict:
                    raise ScriptInvalid(msg) from exc
                traj.error = msg
                return traj
            state = _state(sc, stage.label, z, stage.in_long_circuit)
            traj.states.append(state)
            if strict:
                try:
                    check_report_limits(state.report)
                except LimitViolation as exc:
                    raise ScriptInvalid(f"{stage.label}: {exc}") from exc
        if stage.checkpoint:
            traj.checkpoints.append(state)
            if strict and stage.label in EXPECTED and state.counts() != EXPECTED[stage.label]:
                raise ScriptInvalid(
                    f"{stage.label}: got {state.counts()}, expected {EXPECTED[stage.label]}"
                )
    return traj


@dataclass
class Verification:
    lines: list  # (check name, passed, detail)

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.lines)

    def first_failure(self) -> Optional[str]:
        for check, passed, _ in self.lines:
            if not passed:
                return check
        return None

    def __str__(self):
        return "\n".join(
            f"{'PASS' if passed else 'FAIL'} {check}: {detail}" for check, passed, detail in self.lines
        )


def ratio_ok(state: ScenarioState, d: int = RATIO_DEGREE) -> bool:
    (check,) = check_pairing_ratio([(state.coloring, state.report)], d)
    return check.ok


def verify_checkpoints(traj: Trajectory) -> Verification:
    lines = []
    got = {s.label: s for s in traj.checkpoints}
    for label, want in EXPECTED.items():
        s = got.get(label)
        if s is None:
            lines.append((label, False, "checkpoint missing"))
        else:
            lines.append((label, s.counts() == want, f"got {s.counts()}, expected {want}"))
    for s in traj.checkpoints:
        lines.append((f"{s.label} ratio", ratio_ok(s), f"d={RATIO_DEGREE}, b={s.report.b}"))

    worst = max(traj.states, key=lambda s: s.report.b)
    lines.append(("max bad pairs", worst.report.b == MAX_BAD_PAIRS, f"{worst.report.b} at {worst.label}"))
    yy, gg = worst.report.per_vertex.get(VERTEX["x0"], (0, 0))
    lines.append(("x0 at maximum", (yy, gg) == (2, 2), f"{yy} yellow and {gg} green bad pairs"))

    over = [
        s.label
        for s in traj.states
        if len(s.interesting) > MAX_INTERESTING
        or len(s.report.bad_vertices) > MAX_BAD_VERTICES
        or s.report.b > MAX_BAD_PAIRS
    ]
    lines.append(("structural limits", not over, f"violations at {over}" if over else "all states"))

    sc = traj.scenario
    tail = [s for s in traj.states if s.label == "final"]
    lines.append(("final switches", len(tail) == 4 and all(s.report.b == 0 for s in tail),
                  f"{len(tail)} switches, bad pairs {[s.report.b for s in tail]}"))
    end = traj.final.z
    done = (end & sc.H) == sc.Gp_side and sc.dotted in end
    lines.append(("end state", done and traj.error is None, traj.error or "Z = G' on H, x0-x5 kept"))
    return Verification(lines)


def without_stage(label: str, script=SCRIPT):
    """Copy of ``script`` whose stage ``label`` performs no moves."""
    return tuple(replace(s, moves=()) if s.label == label else s for s in script)


def checkpoint_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "interesting", "bad_vertices", "bad_pairs", "ratio_ok"])
    for s in traj.checkpoints:
        w.writerow([s.label, *s.counts(), str(ratio_ok(s)).lower()])
    return buf.getvalue()
