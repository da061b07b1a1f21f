import subprocess
import sys

import pytest

from regraph.cli import main
from regraph.graph import build_graph, parse_graphs, serialize_graph

CYCLE6 = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 6)]
TRIANGLES = [(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)]


def test_sample(tmp_path):
    out1, out2 = tmp_path / "a.txt", tmp_path / "b.txt"
    args = ["sample", "--n", "6", "--d", "3", "--steps", "100000", "--seed", "7", "--count", "3"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    graphs = parse_graphs(out1.read_text())
    assert len(graphs) == 3 and all((g.n, g.d) == (6, 3) for g in graphs)


def test_sample_parity_error(capsys):
    assert main(["sample", "--n", "5", "--d", "3", "--steps", "10"]) == 1
    assert "ParityError" in capsys.readouterr().err


def test_usage_errors_exit_2():
    for argv in (["bounds", "--n", "6", "--d", "3", "--eps", "1"], ["mix", "--n", "6"], []):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2


def test_mix_exact(capsys):
    assert main(["mix", "--n", "4", "--d", "3", "--method", "exact"]) == 0
    assert "tau,0" in capsys.readouterr().out
    assert main(["mix", "--n", "6", "--d", "2", "--eps", "0.25", "--method", "exact"]) == 0
    out = capsys.readouterr().out
    assert "tau,11" in out
    assert "t,max_tv,start_tv" in out


def test_mix_too_large(capsys):
    assert main(["mix", "--n", "8", "--d", "3", "--cap", "100"]) == 1
    assert "StateSpaceTooLarge" in capsys.readouterr().err


def test_mix_exact_vs_empirical(tmp_path):
    ex, em = tmp_path / "ex.csv", tmp_path / "em.csv"
    common = ["mix", "--n", "6", "--d", "2", "--eps", "0.25"]
    assert main(common + ["--method", "exact", "--out", str(ex), "--spectrum", str(tmp_path / "s.csv")]) == 0
    assert main(common + ["--method", "empirical", "--chains", "100000", "--seed", "3", "--out", str(em)]) == 0
    exact = [line.split(",") for line in ex.read_text().splitlines()[1:]]
    emp = [line.split(",") for line in em.read_text().splitlines()[1:]]
    assert len(exact) == len(emp) == 12
    for (t1, _, start), (t2, tv) in zip(exact, emp):
        assert t1 == t2
        assert abs(float(start) - float(tv)) < 0.05
    spec = (tmp_path / "s.csv").read_text().splitlines()
    assert spec[0] == "index,eigenvalue" and len(spec) == 71


def test_bounds(capsys):
    assert main(["bounds", "--n", "6", "--d", "3", "--eps", "0.25"]) == 0
    rows = dict(line.split(",") for line in capsys.readouterr().out.splitlines())
    assert rows["ratio"] == str(3**8)
    assert rows["omega"] == "70"
    assert float(rows["load_bound"]) == 2 * 3**22 * 6**7
    assert main(["bounds", "--n", "12", "--d", "5", "--cap", "10"]) == 0
    rows = dict(line.split(",") for line in capsys.readouterr().out.splitlines())
    assert rows["flow_bound"] == "2*d^20*n^5/|Omega|"
    assert rows["ratio"] == str(5**8)


def _write(tmp_path, name, edges, n=6, d=2):
    p = tmp_path / name
    p.write_text(serialize_graph(build_graph(n, d, edges)))
    return str(p)


def test_analyze(tmp_path, capsys):
    g = _write(tmp_path, "g.txt", TRIANGLES)
    gp = _write(tmp_path, "gp.txt", CYCLE6)
    assert main(["analyze", "--g", g, "--gprime", gp, "--z", g, "--pairings", "all"]) == 0
    out = capsys.readouterr().out
    assert "# H: 4 edges" in out
    assert "count,1" in out
    assert out.count("pairing 0:") == 1 and "pairing 1:" not in out
    section = out.split("# encoding (nonzero labels)\n")[1].split("\n\n")[0]
    rows = [line.split(",") for line in section.splitlines()[1:]]
    assert rows and all(bad == "0" for *_, bad in rows)


def test_analyze_flags_bad_edge(tmp_path, capsys):
    g = _write(tmp_path, "g.txt", TRIANGLES)
    gp = _write(tmp_path, "gp.txt", CYCLE6)
    # Z contains 1-4, which is in neither G nor G'
    z = _write(tmp_path, "z.txt", [(1, 4), (2, 5), (2, 3), (1, 3), (5, 6), (4, 6)])
    assert main(["analyze", "--g", g, "--gprime", gp, "--z", z]) == 0
    assert "1,4,-1,1" in capsys.readouterr().out


def test_analyze_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("6 2\n1 x\n")
    assert main(["analyze", "--g", str(bad), "--gprime", str(bad), "--z", str(bad)]) == 1
    assert "ParseError" in capsys.readouterr().err


def test_scenario_command(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["scenario", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 7
    assert max(int(r.split(",")[3]) for r in rows[1:]) == 14
    first = out.read_bytes()
    assert main(["scenario", "--out", str(out)]) == 0
    assert out.read_bytes() == first


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "regraph", "bounds", "--n", "6", "--d", "2"],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0 and "ratio,256" in r.stdout
