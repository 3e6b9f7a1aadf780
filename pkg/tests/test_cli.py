import csv
import json
import math

import pytest

from patterndiv.asrgraph import EdgeWeightedGraph, write_edgelist
from patterndiv.cli import main
from patterndiv.simharness import REPORT_HEADER


@pytest.fixture
def run(capsys):
    def invoke(*argv):
        code = main([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err
    return invoke


def write(path, text):
    path.write_text(text)
    return path


def graph_file(tmp_path, graph, name="g.txt", hint=0):
    path = tmp_path / name
    write_edgelist(graph, path, hint)
    return path


class TestSupports:
    def test_thirty_degree_spread(self, tmp_path, run):
        geo = write(tmp_path / "geo.csv",
                    f"id,theta_deg,distance_m,ring_radius_m\n0,0,1,{math.tan(math.radians(30))!r}\n")
        code, out, _ = run("supports", geo, "--M", 8)
        assert code == 0 and out == "0: 2,3,4,5,6\n"

    def test_empty_file(self, tmp_path, run):
        code, out, _ = run("supports", write(tmp_path / "geo.csv", ""))
        assert code == 0 and out == ""

    def test_negative_distance(self, tmp_path, run):
        code, _, err = run("supports", write(tmp_path / "geo.csv", "0,0,-5,30\n"))
        assert code == 2 and ":1:" in err

    @pytest.mark.parametrize("body", ["0,0,100\n", "0,abc,100,30\n", "0,0,100,30\n0,5,100,30\n"])
    def test_malformed(self, tmp_path, run, body):
        assert run("supports", write(tmp_path / "geo.csv", body))[0] == 2

    def test_missing_file(self, tmp_path, run):
        assert run("supports", tmp_path / "nope.csv")[0] == 2


class TestGraph:
    def test_edge_list(self, tmp_path, run):
        geo = write(tmp_path / "geo.csv", "0,0,100,30\n1,2,100,30\n2,-40,600,30\n")
        code, out, _ = run("graph", geo, "--M", 64, "--P", 3)
        lines = out.splitlines()
        assert code == 0 and lines[0] == "ewg 3 3"
        edges = {tuple(map(int, l.split()[:2])) for l in lines[1:]}
        assert (0, 1) in edges and not any(2 in e for e in edges)

    def test_ids_must_be_contiguous(self, tmp_path, run):
        assert run("graph", write(tmp_path / "geo.csv", "0,0,100,30\n5,2,100,30\n"))[0] == 2


class TestColor:
    def test_triangle(self, tmp_path, run, triangle):
        code, out, _ = run("color", graph_file(tmp_path, triangle), "--P", 2)
        assert code == 0
        assert out.splitlines() == ["0 0", "1 1", "2 1", "f 0.3", "phase2_bypassed false"]

    def test_edgeless(self, tmp_path, run):
        code, out, _ = run("color", graph_file(tmp_path, EdgeWeightedGraph(5, {})), "--P", 3)
        lines = out.splitlines()
        assert code == 0 and lines[:5] == [f"{g} 0" for g in range(5)]
        assert lines[5:] == ["f 0", "phase2_bypassed true"]

    def test_header_hint(self, tmp_path, run, four_vertex):
        code, out, _ = run("color", graph_file(tmp_path, four_vertex, hint=2))
        assert code == 0 and "f 0" in out.splitlines()

    def test_zero_patterns(self, tmp_path, run, triangle):
        assert run("color", graph_file(tmp_path, triangle), "--P", 0)[0] == 2

    def test_no_budget(self, tmp_path, run, triangle):
        assert run("color", graph_file(tmp_path, triangle))[0] == 2

    def test_bad_graph(self, tmp_path, run):
        code, _, err = run("color", write(tmp_path / "g.txt", "ewg 2 2\n0 0 0.5\n"), "--P", 2)
        assert code == 2 and "line 2" in err


class TestOracleCompare:
    def test_triangle(self, tmp_path, run, triangle):
        code, out, _ = run("oracle-compare", graph_file(tmp_path, triangle), "--P", 2)
        assert code == 0 and out.splitlines() == ["heuristic 0.3", "oracle 0.3", "gap 0"]

    def test_edgeless(self, tmp_path, run):
        code, out, _ = run("oracle-compare", graph_file(tmp_path, EdgeWeightedGraph(4, {})), "--P", 2)
        assert code == 0 and out.splitlines()[-1] == "gap 0"

    def test_over_cap(self, tmp_path, run):
        code, _, err = run("oracle-compare", graph_file(tmp_path, EdgeWeightedGraph(13, {})), "--P", 2)
        assert code == 3 and "cap" in err

    def test_raised_cap(self, tmp_path, run):
        g = graph_file(tmp_path, EdgeWeightedGraph(13, {}))
        assert run("oracle-compare", g, "--P", 2, "--oracle-cap", 13)[0] == 0


class TestSimulate:
    def config(self, tmp_path, **extra):
        data = {"Gvalues": [4], "trials": 2, "schemes": ["ewvc_pd", "greedy", "random"],
                "outputPath": str(tmp_path / "report.csv")}
        data.update(extra)
        return write(tmp_path / "cfg.json", json.dumps(data))

    def test_rows_per_scheme(self, tmp_path, run):
        code, out, _ = run("simulate", self.config(tmp_path))
        assert code == 0 and out.splitlines()[0] == "rows 3"
        with open(tmp_path / "report.csv", newline="") as fh:
            header, *rows = list(csv.reader(fh))
        assert header == REPORT_HEADER
        assert [r[0] for r in rows] == ["ewvc_pd", "greedy", "random"]

    def test_deterministic(self, tmp_path, run):
        cfg = self.config(tmp_path)
        texts = []
        for _ in range(2):
            assert run("simulate", cfg, "--seed", 11)[0] == 0
            with open(tmp_path / "report.csv", newline="") as fh:
                t = REPORT_HEADER.index("mean_solve_ns")
                texts.append([r[:t] + r[t + 1:] for r in csv.reader(fh)])
        assert texts[0] == texts[1]
        assert texts[0][1][-1] == "11"

    def test_per_trial(self, tmp_path, run):
        per = tmp_path / "trials.csv"
        assert run("simulate", self.config(tmp_path), "--per-trial", per)[0] == 0
        assert len(per.read_text().splitlines()) == 1 + 3 * 2

    def test_esa_over_cap(self, tmp_path, run):
        code, _, err = run("simulate", self.config(tmp_path, schemes=["esa"], Gvalues=[40]))
        assert code == 2 and "esa" in err

    def test_lists_every_violation(self, tmp_path, run):
        code, _, err = run("simulate", self.config(tmp_path, trials=0, Kg=0))
        assert code == 2 and "trials" in err and "Kg" in err

    def test_missing_config(self, tmp_path, run):
        assert run("simulate", tmp_path / "none.json")[0] == 2


class TestParser:
    def test_unknown_flag(self, tmp_path, run):
        with pytest.raises(SystemExit) as info:
            run("supports", "x.csv", "--bogus")
        assert info.value.code == 2

    def test_requires_subcommand(self, run):
        with pytest.raises(SystemExit) as info:
            run()
        assert info.value.code == 2
