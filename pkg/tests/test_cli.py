import csv
import json

import pytest

import fairksel as fk
from fairksel.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_instance(tmp_path, name, instance, sets=None):
    path = tmp_path / name
    fk.save_instance(instance, str(path), sets=sets)
    return str(path)


class TestGenCommand:
    def test_gen_gap_and_solve_oracle(self, tmp_path, capsys):
        path = str(tmp_path / "gap2.json")
        code, _, _ = run_cli(capsys, "gen", "--family", "gap", "--k", "2",
                             "-o", path)
        assert code == 0
        code, out, _ = run_cli(capsys, "solve", path, "--alg", "oracle")
        assert code == 0
        rep = json.loads(out)
        assert rep["value"] == 2
        assert rep["oracle"] == 2

    def test_gen_stdout(self, capsys):
        code, out, _ = run_cli(capsys, "gen", "--family", "path-cycle",
                               "--components", "path:3", "--k", "2")
        assert code == 0
        data = json.loads(out)
        assert data["m"] == 3


class TestSolveRouting:
    def test_auto_routes_delta2(self, tmp_path, capsys):
        inst = fk.gen_path_cycle([("path", 3)], k=2)
        path = write_instance(tmp_path, "p3.json", inst)
        code, out, _ = run_cli(capsys, "solve", path, "--alg", "auto")
        assert code == 0
        rep = json.loads(out)
        assert rep["algorithm"] == "delta2"
        assert rep["value"] in (1, 2)

    def test_auto_routes_laminar(self, tmp_path, capsys):
        sets, weights = fk.gen_random_laminar(6, 5, weight_range=(1, 9),
                                              seed=1, integer_weights=True)
        inst = fk.instance_from_sets(6, sets, 2, weights)
        path = write_instance(tmp_path, "lam.json", inst, sets=sets)
        code, out, _ = run_cli(capsys, "solve", path, "--alg", "auto")
        assert code == 0
        rep = json.loads(out)
        assert rep["algorithm"] == "laminar"
        assert rep["bound_ok"] is True

    def test_auto_routes_pipage(self, tmp_path, capsys):
        path = write_instance(tmp_path, "gap2.json", fk.gen_gap_instance(2))
        code, out, _ = run_cli(capsys, "solve", path, "--alg", "auto", "--seed", "7")
        assert code == 0
        rep = json.loads(out)
        assert rep["algorithm"] == "pipage"
        assert rep["value"] == 2  # every pair hits its own agent twice
        assert len(rep["chosen"]) == 2

    def test_value_recomputed_from_selection(self, tmp_path, capsys):
        inst = fk.gen_random_bipartite(6, 9, 3, 3, weight_range=(0.5, 3.0), seed=5)
        path = write_instance(tmp_path, "w.json", inst)
        code, out, _ = run_cli(capsys, "solve", path, "--alg", "lll", "--seed", "3")
        assert code == 0
        rep = json.loads(out)
        assert rep["value"] == pytest.approx(
            fk.max_disagreement(inst, rep["chosen"]))
        assert rep["feasible"] is True

    def test_exit_code_input_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 1, "m": 1, "k": 1, "adj": [[3]]}')
        code, _, err = run_cli(capsys, "solve", str(bad))
        assert code == 1
        assert "out of range" in err

    def test_exit_code_missing_file(self, capsys):
        code, _, _ = run_cli(capsys, "solve", "/nonexistent/x.json")
        assert code == 1

    def test_exit_code_solver_error(self, tmp_path, capsys):
        # independent rounding refuses weighted instances
        inst = fk.make_instance([[0], [1]], 2, 1, weights=[2, 3])
        path = write_instance(tmp_path, "w2.json", inst)
        code, _, err = run_cli(capsys, "solve", path, "--alg", "independent")
        assert code == 2
        assert "unit weights" in err

    def test_forced_laminar_on_crossing_sets(self, tmp_path, capsys):
        inst = fk.make_instance([[0], [0, 1], [1]], 2, 1)
        path = write_instance(tmp_path, "cross.json", inst)
        # candidate neighborhoods {0,1} and {1,2} cross: not laminar
        code, _, err = run_cli(capsys, "solve", path, "--alg", "laminar")
        assert code == 2
        assert "laminar" in err

    def test_preprocessing_only_instance(self, tmp_path, capsys):
        inst = fk.make_instance([], 3, 3)  # every candidate isolated
        path = write_instance(tmp_path, "iso.json", inst)
        code, out, _ = run_cli(capsys, "solve", path, "--alg", "pipage")
        assert code == 0
        rep = json.loads(out)
        assert rep["value"] == 0 and sorted(rep["chosen"]) == [0, 1, 2]


class TestLpCommand:
    def test_gap_lp(self, tmp_path, capsys):
        path = write_instance(tmp_path, "gap2.json", fk.gen_gap_instance(2))
        code, out, _ = run_cli(capsys, "lp", path)
        assert code == 0
        rep = json.loads(out)
        assert rep["t_star"] == 1.0
        assert max(rep["residuals"].values()) <= 1e-9
        assert len(rep["x"]) == 4

    def test_weighted_doubling_mode(self, tmp_path, capsys):
        inst = fk.make_instance([[0]], 1, 1, weights=[4])
        path = write_instance(tmp_path, "w4.json", inst)
        code, out, _ = run_cli(capsys, "lp", path)
        rep = json.loads(out)
        assert code == 0
        assert rep["mode"] == "weighted-doubling"
        assert rep["t_star"] == 4.0

    def test_zero_weight_shortcut_mode(self, tmp_path, capsys):
        inst = fk.make_instance([[0], [1]], 2, 1, weights=[0, 3])
        path = write_instance(tmp_path, "z.json", inst)
        code, out, _ = run_cli(capsys, "lp", path)
        rep = json.loads(out)
        assert rep["mode"] == "zero-weight-shortcut"
        assert rep["t_star"] == 0.0


class TestRoundCommand:
    def test_trials_csv_and_summary(self, tmp_path, capsys):
        path = write_instance(tmp_path, "gap2.json", fk.gen_gap_instance(2))
        csv_path = str(tmp_path / "trials.csv")
        code, out, _ = run_cli(capsys, "round", path, "--alg", "pipage",
                               "--seed", "1", "--trials", "300",
                               "--csv", csv_path)
        assert code == 0
        summary = json.loads(out)
        assert summary["trials"] == 300
        assert summary["feasibility_rate"] == 1.0
        with open(csv_path) as fh:
            rows = list(csv.DictReader(fh))
        cand = [r for r in rows if r["section"] == "candidate"]
        pairs = [r for r in rows if r["section"] == "pair"]
        assert len(cand) == 4
        assert len(pairs) == 6

    def test_lll_rows_always_feasible(self, tmp_path, capsys):
        inst = fk.gen_random_bipartite(5, 8, 3, 3, seed=21)
        path = write_instance(tmp_path, "r.json", inst)
        code, out, _ = run_cli(capsys, "round", path, "--alg", "lll",
                               "--seed", "0", "--trials", "50")
        summary = json.loads(out)
        assert summary["feasibility_rate"] == 1.0


class TestVerifyCommand:
    def test_gap_suite(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "gap")
        assert code == 0
        assert "PASS gap" in out

    def test_small_budget_suite(self, capsys, tmp_path):
        csv_path = str(tmp_path / "m.csv")
        code, out, _ = run_cli(capsys, "verify", "marginals",
                               "--trials", "2000", "--csv", csv_path)
        assert code == 0
        assert "PASS" in out


class TestBenchCommand:
    def test_grid_size_and_determinism(self, tmp_path, capsys):
        out1 = str(tmp_path / "b1.csv")
        out2 = str(tmp_path / "b2.csv")
        args = ["bench", "--families", "gap2,rb-d3", "--algorithms",
                "oracle,pipage,lll", "--seeds", "0,1"]
        code, _, _ = run_cli(capsys, *args, "-o", out1)
        assert code == 0
        code, _, _ = run_cli(capsys, *args, "-o", out2)
        assert code == 0

        def strip_millis(path):
            with open(path) as fh:
                rows = list(csv.DictReader(fh))
            for r in rows:
                r.pop("millis")
            return rows

        rows1, rows2 = strip_millis(out1), strip_millis(out2)
        assert rows1 == rows2
        assert len(rows1) == 2 * 3 * 2
        lll_rows = [r for r in rows1 if r["alg"] == "lll"]
        assert all(r["feasible"] == "True" for r in lll_rows)

    def test_unknown_family_recorded_not_fatal(self, tmp_path, capsys):
        out = str(tmp_path / "b.csv")
        code, _, err = run_cli(capsys, "bench", "--families", "gap2,doesnotexist",
                               "--algorithms", "oracle", "--seeds", "0", "-o", out)
        assert code == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 2
        bad = [r for r in rows if r["family"] == "doesnotexist"]
        assert bad[0]["value"] == ""
