"""Command-line entry point.

Exit codes: 0 success, 1 domain or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import chain, graph, mixing, pairing, scenario
from .errors import RegraphError, StateSpaceTooLarge


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _eps(text):
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"eps must lie in (0, 1), got {text}")
    return v


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_sample(args):
    Z = graph.circulant_start(args.n, args.d)
    rng = chain.make_rng(args.seed)
    burnin = args.steps if args.burnin is None else args.burnin
    Z = chain.run(Z, burnin, rng)
    records = []
    for _ in range(args.count):
        Z = chain.run(Z, args.steps, rng)
        records.append(graph.serialize_graph(Z))
    _emit("\n".join(records), args.out)


def cmd_enumerate(args):
    space = mixing.enumerate_state_space(args.n, args.d, cap=args.cap)
    if args.count_only:
        print(len(space))
        return
    _emit("\n".join(graph.serialize_graph(G) for G in space), args.out)
    print(f"{len(space)} states", file=sys.stderr)


def _kernel(n, d, cap):
    space = mixing.enumerate_state_space(n, d, cap=mixing.ENUMERATION_CAP)
    return space, chain.transition_matrix(space.states, cap=cap)


def cmd_mix(args):
    try:
        space, P = _kernel(args.n, args.d, args.cap)
    except StateSpaceTooLarge as exc:
        raise StateSpaceTooLarge(f"{exc}; lower n or d, or raise --cap") from exc
    tau = mixing.exact_mixing_time(P, args.eps)
    tmax = tau if args.tmax is None else args.tmax
    start = space.position(graph.circulant_start(args.n, args.d))
    summary = [f"states,{len(space)}", f"eps,{_fmt(args.eps)}", f"tau,{tau}"]
    if args.method == "exact":
        gap = mixing.spectral_gap(P)
        summary += [f"spectral_gap,{_fmt(gap)}", f"relaxation_time,{_fmt(1 / gap)}"]
        worst = mixing.tv_curve(P, tmax)
        from_start = mixing.tv_curve(P, tmax, start=start)
        rows = ["t,max_tv,start_tv"]
        rows += [f"{t},{_fmt(a)},{_fmt(b)}" for t, (a, b) in enumerate(zip(worst, from_start))]
        if args.spectrum:
            spec = mixing.spectrum(P)
            Path(args.spectrum).write_text(
                "index,eigenvalue\n" + "".join(f"{i},{_fmt(x)}\n" for i, x in enumerate(spec)),
                encoding="utf-8",
            )
    else:
        summary.append(f"chains,{args.chains}")
        curve = mixing.empirical_tv_curve(
            args.n, args.d, range(tmax + 1), args.chains, args.seed, space=space
        )
        rows = ["t,tv"] + [f"{t},{_fmt(v)}" for t, v in curve.items()]
    curve_text = "\n".join(rows) + "\n"
    if args.out:
        Path(args.out).write_text(curve_text, encoding="utf-8")
        print("\n".join(summary))
    else:
        print("\n".join(summary))
        print()
        sys.stdout.write(curve_text)


def _read(path):
    return graph.parse_graph(Path(path).read_text(encoding="utf-8"))


def cmd_analyze(args):
    G, Gp, Z = _read(args.g), _read(args.gprime), _read(args.z)
    H = graph.symmetric_difference(G, Gp)
    L = graph.encode(G, Gp, Z)
    colored = graph.color_difference(H, Z)
    bad = set(L.bad_edges())
    out = [f"# H: {len(H)} edges", "u,v,color"]
    out += [f"{u},{v},{colored.color[(u, v)]}" for u, v in sorted(H)]
    out += ["", "# encoding (nonzero labels)", "u,v,label,bad"]
    out += [f"{u},{v},{L[(u, v)]},{int((u, v) in bad)}" for u, v in sorted(L.labels)]
    out += ["", "# vertices", "vertex,g,y,theta"]
    out += [f"{v},{colored.g(v)},{colored.y(v)},{colored.theta(v)}" for v in colored.vertices]
    mode = "alternating" if colored.is_balanced() else "allow_bad"
    count = pairing.pairing_count(colored, mode)
    out += ["", "# pairings", f"mode,{mode}", f"count,{count}"]
    if args.pairings == "all":
        for k, psi in enumerate(pairing.enumerate_pairings(colored, mode, cap=args.cap)):
            circuits = pairing.decompose_circuits(colored, psi)
            report = pairing.bad_pair_report(colored, psi, check_limits=False)
            walks = " | ".join(" ".join(map(str, c.vertices)) for c in circuits)
            out.append(f"pairing {k}: b={report.b} bad_vertices={report.bad_vertices} circuits: {walks}")
    print("\n".join(out))


def cmd_bounds(args):
    omega = None
    try:
        omega = len(mixing.enumerate_state_space(args.n, args.d, cap=args.cap))
    except StateSpaceTooLarge:
        pass
    rep = mixing.theorem_bound(args.n, args.d, args.eps, omega)
    rows = ["name,value"]
    rows.append(f"theorem_bound,{_fmt(rep.theorem_bound)}")
    rows.append(f"old_bound,{_fmt(rep.old_bound)}")
    rows.append(
        f"flow_bound,{_fmt(rep.flow_bound)}" if omega else "flow_bound,2*d^20*n^5/|Omega|"
    )
    rows.append(f"load_bound,{_fmt(rep.load_bound)}")
    rows.append(f"ratio,{rep.ratio if rep.ratio is not None else 'undefined'}")
    if omega:
        rows.append(f"omega,{omega}")
    print("\n".join(rows))


def cmd_scenario(args):
    traj = scenario.play(strict=False)
    check = scenario.verify_checkpoints(traj)
    _emit(scenario.checkpoint_csv(traj), args.out)
    print(check, file=sys.stderr)
    return 0 if check.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regraph", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def nd(q):
        q.add_argument("--n", type=_positive, required=True)
        q.add_argument("--d", type=_nonneg, required=True)

    q = sub.add_parser("sample", help="sample graphs with the switch chain")
    nd(q)
    q.add_argument("--steps", type=_nonneg, required=True, help="steps between samples")
    q.add_argument("--seed", type=_nonneg, default=0)
    q.add_argument("--count", type=_positive, default=1)
    q.add_argument("--burnin", type=_nonneg, default=None, help="default: --steps")
    q.add_argument("--out")
    q.set_defaults(func=cmd_sample)

    q = sub.add_parser("enumerate", help="list every labeled d-regular graph")
    nd(q)
    q.add_argument("--cap", type=_positive, default=mixing.ENUMERATION_CAP)
    q.add_argument("--count-only", action="store_true")
    q.add_argument("--out")
    q.set_defaults(func=cmd_enumerate)

    q = sub.add_parser("mix", help="exact or empirical mixing diagnostics")
    nd(q)
    q.add_argument("--eps", type=_eps, default=0.25)
    q.add_argument("--method", choices=["exact", "empirical"], default="exact")
    q.add_argument("--chains", type=_positive, default=100_000)
    q.add_argument("--seed", type=_nonneg, default=0)
    q.add_argument("--tmax", type=_nonneg, default=None, help="default: tau(eps)")
    q.add_argument("--cap", type=_positive, default=chain.MATRIX_CAP)
    q.add_argument("--spectrum", help="also write the eigenvalues to this CSV")
    q.add_argument("--out")
    q.set_defaults(func=cmd_mix)

    q = sub.add_parser("analyze", help="H, encoding, colouring and pairings of three graphs")
    q.add_argument("--g", required=True)
    q.add_argument("--gprime", required=True)
    q.add_argument("--z", required=True)
    q.add_argument("--pairings", choices=["all", "count"], default="count")
    q.add_argument("--cap", type=_positive, default=10_000)
    q.set_defaults(func=cmd_analyze)

    q = sub.add_parser("bounds", help="evaluate the mixing, flow and load bounds")
    nd(q)
    q.add_argument("--eps", type=_eps, default=0.25)
    q.add_argument("--cap", type=_positive, default=100_000)
    q.set_defaults(func=cmd_bounds)

    q = sub.add_parser("scenario", help="replay the 14-bad-pair example")
    q.add_argument("--out")
    q.set_defaults(func=cmd_scenario)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except RegraphError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
