import json

import numpy as np
import pytest

from recontree.cli import main
from recontree.tree import from_newick


def run(args):
    return main(args)


class TestDensity:
    def test_pendant_given_n_csv(self, tmp_path):
        out = tmp_path / "d.csv"
        assert run(["density", "--law", "pendant", "--lam", "1",
                    "--grid", "0:3:7", "-o", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# law: pendant | n")
        assert lines[1] == "s,pdf,cdf"
        rows = [l.split(",") for l in lines[2:]]
        assert len(rows) == 7
        # Yule pendant is Exp(2): pdf at 0 is 2
        assert float(rows[0][1]) == pytest.approx(2.0)

    def test_mixed_law_emits_atom_row(self, tmp_path):
        out = tmp_path / "d.csv"
        run(["density", "--law", "pendant", "--scenario", "given-n-age",
             "--n", "5", "--x1", "2", "--mu", "0.5", "--grid", "0:2:5",
             "-o", str(out)])
        last = out.read_text().splitlines()[-1].split(",")
        assert last[1] == "atom"
        assert float(last[2]) == pytest.approx(0.1)  # 2/(5*4)

    def test_raw_params_accepted(self, tmp_path):
        out = tmp_path / "d.csv"
        run(["density", "--law", "pendant", "--lam-hat", "2", "--mu-hat", "0.5",
             "--f", "0.5", "--grid", "0:2:5", "-o", str(out)])
        header = out.read_text().splitlines()[0]
        assert "lam_hat=2.0" in header and "lam=1.0" in header

    def test_rejects_mixed_param_styles(self):
        with pytest.raises(SystemExit):
            run(["density", "--law", "pendant", "--lam", "1", "--f", "0.5",
                 "--grid", "0:1:5"])

    def test_rejects_bad_grid(self):
        with pytest.raises(SystemExit):
            run(["density", "--law", "pendant", "--grid", "0:1"])

    def test_rejects_extinction_for_yule_law(self):
        with pytest.raises(SystemExit):
            run(["density", "--law", "diversity", "--scenario", "given-n",
                 "--n", "5", "--mu", "0.5", "--grid", "0:2:5"])

    def test_speciation_time_law(self, tmp_path):
        out = tmp_path / "d.csv"
        assert run(["density", "--law", "speciation-time", "--n", "6", "--k", "3",
                    "--x1", "2", "--mu", "0.5", "--grid", "0:2:9",
                    "-o", str(out)]) == 0


class TestSimulate:
    def test_ndjson_given_n(self, tmp_path):
        out = tmp_path / "trees.ndjson"
        assert run(["simulate", "--scenario", "given-n", "--n", "6",
                    "--reps", "5", "--seed", "42", "-o", str(out)]) == 0
        lines = [json.loads(l) for l in out.read_text().splitlines()]
        man = lines[0]["manifest"]
        assert man["seed"] == 42 and man["count"] == 5
        assert man["params"] == {"lam": 1.0, "mu": 0.0}
        for i, rec in enumerate(lines[1:]):
            assert set(rec) == {"id", "newick", "n", "x1", "seed", "stream_id"}
            assert rec["id"] == i and rec["n"] == 6
            t = from_newick(rec["newick"])
            assert t.n == 6
            assert t.mrca_age == pytest.approx(rec["x1"])

    def test_seed_reproducibility(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["simulate", "--scenario", "given-n-age", "--n", "5", "--x1",
                "1.5", "--mu", "0.4", "--reps", "3", "--seed", "7"]
        run(args + ["-o", str(a)])
        run(args + ["-o", str(b)])
        assert a.read_text() == b.read_text()

    def test_stream_id_changes_output(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        base = ["simulate", "--scenario", "given-age", "--x1", "1.0",
                "--reps", "3", "--seed", "7"]
        run(base + ["-o", str(a)])
        run(base + ["--stream-id", "1", "-o", str(b)])
        assert a.read_text() != b.read_text()

    def test_newick_format(self, tmp_path):
        out = tmp_path / "t.nwk"
        run(["simulate", "--scenario", "given-n", "--n", "4", "--reps", "2",
             "--seed", "1", "--format", "newick", "-o", str(out)])
        lines = out.read_text().splitlines()
        assert lines[0].startswith("[{")
        for l in lines[1:]:
            assert from_newick(l).n == 4

    def test_rejection_requires_raw(self):
        with pytest.raises(SystemExit, match="raw parameters"):
            run(["simulate", "--scenario", "rejection-given-age", "--x1", "1",
                 "--mu", "-0.5", "--reps", "1"])

    def test_rejection_given_age(self, tmp_path):
        out = tmp_path / "t.ndjson"
        assert run(["simulate", "--scenario", "rejection-given-age", "--x1", "1",
                    "--lam-hat", "1", "--mu-hat", "0", "--f", "1",
                    "--reps", "3", "--seed", "3", "-o", str(out)]) == 0
        recs = [json.loads(l) for l in out.read_text().splitlines()][1:]
        assert all(abs(r["x1"] - 1.0) < 1e-9 for r in recs)

    def test_given_n_rejects_extinction(self):
        with pytest.raises(SystemExit, match="pure birth"):
            run(["simulate", "--scenario", "given-n", "--n", "5",
                 "--mu", "0.5", "--reps", "1"])


class TestVerify:
    def test_single_check_json(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = run(["verify", "--check", "limit_constant", "--reps", "1000",
                    "--seed", "5", "-o", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["pass"] is True
        assert payload["seed"] == 5
        rep = payload["reports"][0]
        assert set(rep) == {"check", "n_samples", "seed", "ks", "moments",
                            "atom", "pass", "wall_time_s"}
        assert "PASS limit_constant" in capsys.readouterr().err

    def test_unknown_check_exit_2(self, capsys):
        assert run(["verify", "--check", "bogus", "--reps", "1000"]) == 2
        assert "valid names" in capsys.readouterr().err


class TestExpect:
    def test_text_table(self, capsys):
        assert run(["expect", "--lam", "1", "--n", "10", "--x1", "1"]) == 0
        text = capsys.readouterr().out
        assert "E[pendant | n]" in text
        assert "E[diversity | n=10]" in text
        assert "0.8158457" in text

    def test_json(self, capsys):
        assert run(["expect", "--format", "json", "--mu", "0.5"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["params"] == {"lam": 1.0, "mu": 0.5}
        # extinction set: Yule-only rows are absent
        assert "E[pendant | n]" in payload["values"]
        assert not any(k.startswith("E[diversity") for k in payload["values"])

    def test_env_seed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RECONTREE_SEED", "99")
        out = tmp_path / "t.ndjson"
        run(["simulate", "--scenario", "given-n", "--n", "3", "--reps", "1",
             "-o", str(out)])
        man = json.loads(out.read_text().splitlines()[0])["manifest"]
        assert man["seed"] == 99
