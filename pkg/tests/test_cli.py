import csv
import io
import json
import subprocess
import sys

import pytest

from abcmin import cli
from abcmin.cli import main, read_config_file, resolve_config
from abcmin.tree import Tree


@pytest.fixture
def run(capsys, monkeypatch):
    for var in ("ABCM_JOBS", "ABCM_CACHE", "ABCM_CAP"):
        monkeypatch.delenv(var, raising=False)

    def _run(*argv):
        code = main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err
    return _run


@pytest.fixture
def p4(tmp_path):
    path = tmp_path / "p4.json"
    path.write_text(Tree.path(4).to_json())
    return path


class TestCompute:
    def test_p4(self, run, p4):
        code, out, _ = run("compute", "--input", str(p4))
        assert code == 0 and out.strip() == "2.1213203435596424"

    def test_human(self, run, p4):
        code, out, _ = run("--format", "human", "compute", "--input", str(p4))
        assert out.split() == ["n", "abc", "4", "2.12132"]

    def test_missing_file(self, run, tmp_path):
        code, _, err = run("compute", "--input", str(tmp_path / "nope.json"))
        assert code == 1 and err

    def test_bad_tree(self, run, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 3, "edges": [[0, 1]]}')
        assert run("compute", "--input", str(path))[0] == 1


class TestUsage:
    def test_no_command(self, run):
        assert run()[0] == 1

    def test_unknown_flag(self, run):
        assert run("compute", "--bogus")[0] == 1

    def test_flags_after_subcommand(self, run, p4):
        code, out, _ = run("compute", "--input", str(p4), "--format", "csv")
        assert code == 0 and out.splitlines() == ["n,abc", "4,2.1213203435596424"]


class TestGreedyAndGen:
    def test_greedy(self, run):
        code, out, _ = run("greedy", "--degrees", "3,3,1,1,1,1")
        data = json.loads(out)
        assert code == 0 and data["abc"] == pytest.approx(3.932653, abs=1e-6)

    def test_greedy_check(self, run):
        code, out, _ = run("greedy", "--degrees", "3,2,2,1,1,1", "--check")
        assert code == 0 and json.loads(out)["optimal"] is True

    def test_greedy_unrealizable(self, run):
        assert run("greedy", "--degrees", "3,3,1,1")[0] == 1

    def test_kragujevac(self, run):
        code, out, _ = run("gen", "kragujevac", "--branches", "B3:58,B3*:1")
        assert code == 0 and json.loads(out)["order"] == 415

    def test_enumerate_count(self, run):
        code, out, _ = run("gen", "enumerate", "--order", "10", "--count")
        assert json.loads(out)["count"] == 106

    def test_enumerate_directory(self, run, tmp_path):
        target = tmp_path / "trees"
        assert run("gen", "enumerate", "--order", "7", "--out", str(target))[0] == 0
        files = sorted(target.iterdir())
        assert len(files) == 11
        Tree.from_json(files[0].read_text())

    def test_enumerate_jsonl(self, run, tmp_path):
        target = tmp_path / "trees.jsonl"
        run("gen", "enumerate", "--order", "8", "--out", str(target))
        assert len(target.read_text().splitlines()) == 23

    def test_cap_exit(self, run):
        code, _, err = run("--cap", "9", "gen", "enumerate", "--order", "10", "--count")
        assert code == 3 and "cap" in err


class TestTransform:
    def test_input_file(self, run, tmp_path):
        from abcmin.transforms import host_T3
        t, a = host_T3(62, 63)
        path = tmp_path / "host.json"
        path.write_text(t.to_json())
        code, out, _ = run("transform", "--name", "T3", "--input", str(path), "--x", str(a["x"]), "--z", "0")
        data = json.loads(out)
        assert code == 0 and data["matched"] and data["relation"] == "eq"
        assert data["delta_exact"] == pytest.approx(-0.0000277276, abs=1e-9)
        assert Tree.from_dict(data["before"]).n == Tree.from_dict(data["after"]).n

    def test_host(self, run):
        code, out, _ = run("--format", "csv", "transform", "--name", "T6", "--host", "60")
        row = next(csv.DictReader(io.StringIO(out)))
        assert code == 0 and float(row["delta_exact"]) < 0

    def test_precondition(self, run):
        code, _, err = run("transform", "--name", "T3", "--host", "10,10", "--x", "0", "--z", "0")
        assert code == 1 and "precondition" in err.lower()


class TestGfunc:
    def test_eval(self, run):
        code, out, _ = run("gfunc", "eval", "--name", "g3", "--params", "62,63")
        assert float(out) == pytest.approx(-0.0000277276, abs=1e-9)

    def test_eval_domain(self, run):
        assert run("gfunc", "eval", "--name", "g3", "--params", "1,63")[0] == 1

    def test_roots(self, run):
        code, out, _ = run("gfunc", "roots", "--name", "g2_prop", "--bracket", "4,100")
        roots = json.loads(out)["roots"]
        assert len(roots) == 1 and roots[0]["root"] == pytest.approx(4.04954, abs=1e-4)

    def test_g6_even_roots(self, run):
        code, out, _ = run("gfunc", "roots", "--name", "g6_even", "--bracket", "4,200")
        assert json.loads(out)["roots"][0]["root"] == pytest.approx(59.5903, abs=1e-3)

    def test_table2_csv(self, run):
        code, out, _ = run("gfunc", "table2")
        assert code == 0
        assert out.splitlines()[0] == "dx,c,published,match"
        assert "\r" not in out
        assert [int(r["c"]) for r in csv.DictReader(io.StringIO(out))] == [3, 8, 17, 36, 87, 516]

    def test_envelope_pair(self, run):
        code, out, _ = run("gfunc", "envelope", "--a", "g12", "--b", "g22",
                           "--fix", "dx=48,dxi=47,k=dz-2", "--range", "48,60")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 13
        assert list(rows[0]) == ["dz", "fa", "fb", "min"]
        for r in rows:
            assert float(r["min"]) == min(float(r["fa"]), float(r["fb"])) < 0

    def test_sign_failure_exit(self, run):
        code, out, _ = run("gfunc", "sign", "--name", "g2_case1", "--grid", "dx=46;dy=46:10000",
                           "--limit-axis", "dy")
        assert code == 2 and json.loads(out)["certified"] is False

    def test_monotonicity(self, run):
        assert run("gfunc", "monotonicity", "--pred", "appendix-040")[0] == 0

    def test_list(self, run):
        code, out, _ = run("gfunc", "list")
        assert {r["name"] for r in json.loads(out)} >= {"g3", "g6_even", "appendix_g050"}


class TestSearch:
    def test_exhaustive_clean(self, run):
        code, out, _ = run("search", "exhaustive", "--order", "12")
        data = json.loads(out)
        assert code == 0 and data["ok"]

    def test_exhaustive_witness(self, run):
        code, out, _ = run("search", "exhaustive", "--order", "9")
        data = json.loads(out)
        assert code == 2 and data["witnesses"]

    def test_family(self, run):
        code, out, _ = run("search", "family", "--order", "161", "--branches", "B2,B3", "--allow-p3")
        data = json.loads(out)
        assert code == 0 and any("B2" in m for m in data["minima"])

    def test_conjecture_csv(self, run, tmp_path):
        target = tmp_path / "conj.csv"
        code, out, _ = run("search", "conjecture", "--from", "420", "--to", "425",
                           "--no-p3-hubs", "2", "--out", str(target))
        rows = list(csv.DictReader(io.StringIO(target.read_text())))
        assert code == 0 and [int(r["n"]) for r in rows] == list(range(420, 426))

    def test_conjecture_one_hub_fails(self, run):
        code, out, _ = run("search", "conjecture", "--from", "416", "--to", "416")
        assert code == 2 and json.loads(out)["p3_wins"] == [416]

    def test_cache(self, run, tmp_path):
        first = run("--cache", str(tmp_path), "search", "exhaustive", "--order", "10")
        second = run("--cache", str(tmp_path), "search", "exhaustive", "--order", "10")
        assert json.loads(first[1])["provenance"] == "computed"
        assert json.loads(second[1])["provenance"].startswith("cache:")
        assert json.loads(first[1])["minima"] == json.loads(second[1])["minima"]


class TestConfig:
    def test_precedence(self, tmp_path, monkeypatch):
        conf = tmp_path / "abcm.conf"
        conf.write_text("[run]\ncap = 11\njobs = 2  # comment\nformat = csv\n")
        args = cli.build_parser().parse_args(["--config", str(conf), "compute", "--input", "x"])
        cfg = resolve_config(args, environ={})
        assert (cfg.cap, cfg.jobs, cfg.format) == (11, 2, "csv")
        cfg = resolve_config(args, environ={"ABCM_CAP": "12"})
        assert cfg.cap == 12
        args = cli.build_parser().parse_args(["--config", str(conf), "--cap", "13", "compute", "--input", "x"])
        assert resolve_config(args, environ={"ABCM_CAP": "12"}).cap == 13

    def test_env_cap_and_flag_override(self, run, monkeypatch):
        monkeypatch.setenv("ABCM_CAP", "8")
        assert run("gen", "enumerate", "--order", "10", "--count")[0] == 3
        assert run("gen", "enumerate", "--order", "10", "--count", "--cap", "10")[0] == 0

    def test_bad_config_line(self, tmp_path):
        conf = tmp_path / "bad.conf"
        conf.write_text("nonsense\n")
        with pytest.raises(cli.UsageError):
            read_config_file(conf)

    def test_invalid_values(self, run):
        assert run("--jobs", "0", "gfunc", "list")[0] == 1


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["gfunc", "table1"],
        ["search", "family", "--order", "300", "--branches", "B2,B3", "--allow-p3", "--max-hubs", "2"],
        ["gen", "kragujevac", "--branches", "B3:4,B3*:1"],
    ])
    def test_byte_identical(self, argv):
        def once():
            return subprocess.run([sys.executable, "-m", "abcmin", *argv], capture_output=True).stdout
        a, b = once(), once()
        assert a and a == b

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "abcmin", "gfunc", "eval", "--name", "g5",
                               "--params", "62,63"], capture_output=True, text=True)
        assert proc.returncode == 0 and abs(float(proc.stdout)) < 1e-9
