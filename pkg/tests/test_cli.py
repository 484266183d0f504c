"""Command-line front end, driven through ``main(argv)``."""
import json

import numpy as np
import pytest

from entropic_lp import ProblemInstance, extended_instance
from entropic_lp.ba import ReducedInstance, tile
from entropic_lp.cli import INNER_HEADER, OUTER_HEADER, THREADS_ENV, build_parser, main


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


@pytest.fixture
def ghn_file(tmp_path, capsys):
    path = tmp_path / "ghn.json"
    assert main(["generate", "--ghn", "-o", str(path)]) == 0
    capsys.readouterr()
    return path


class TestSolve:
    def test_ghn(self, capsys, ghn_file):
        code, out = _run(capsys, "solve", "--instance", str(ghn_file), "--eps-b", "1e-10", "--eps-f", "1e-12")
        report = json.loads(out.out)
        assert code == 0
        assert report["value"] == pytest.approx(0.18929, abs=1e-4)
        assert report["lambda"] == pytest.approx(0.39166, abs=1e-4)
        assert report["phase"] == "Active"

    def test_extended_generated(self, capsys):
        code, out = _run(capsys, "solve", "--generate", "extended", "--d", "10")
        assert code == 0
        assert json.loads(out.out)["outer_iterations"] == 33

    def test_non_positive_prior(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"p": [1.0, 0.0], "cost": np.ones((2, 2, 2)).tolist()}))
        code, out = _run(capsys, "solve", "--instance", str(bad))
        assert code == 2
        assert json.loads(out.out)["error"] == "NonPositivePrior"

    def test_malformed_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, out = _run(capsys, "solve", "--instance", str(bad))
        err = json.loads(out.out)
        assert code == 2 and err["error"] == "InputError" and err["exit_code"] == 2

    def test_missing_source(self, capsys):
        assert _run(capsys, "solve")[0] == 2

    def test_report_file_and_no_timing_reproducible(self, capsys, tmp_path, ghn_file):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            assert main(["solve", "--instance", str(ghn_file), "--no-timing", "--report", str(p)]) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()
        assert json.loads(paths[0].read_text())["elapsed_s"] == 0.0

    def test_numerical_failure_exit_code(self, capsys, ghn_file):
        code, out = _run(capsys, "solve", "--instance", str(ghn_file), "--max-outer", "3")
        assert code == 3
        assert json.loads(out.out)["error"] == "MaxOuterExceeded"


class TestTraces:
    def test_csv_and_paper_txt(self, capsys, tmp_path, ghn_file):
        trace = tmp_path / "run.csv"
        code, out = _run(capsys, "solve", "--instance", str(ghn_file), "--trace", str(trace),
                         "--no-timing", "--paper-txt")
        assert code == 0
        outer = trace.read_text().splitlines()
        assert outer[0] == ",".join(OUTER_HEADER)
        ks = [int(line.split(",")[0]) for line in outer[1:]]
        assert ks == list(range(1, 35))
        inner = (tmp_path / "run.inner.csv").read_text().splitlines()
        assert inner[0] == ",".join(INNER_HEADER)
        rows = [tuple(map(int, line.split(",")[:2])) for line in inner[1:]]
        assert rows == sorted(rows)
        assert rows[0][0] == 0
        for column in ("value", "lambda", "g"):
            lines = (tmp_path / f"run_{column}.txt").read_text().splitlines()
            assert len(lines) == 34
            assert len(lines[0].split()) == 2

    def test_trace_reproducible(self, capsys, tmp_path, ghn_file):
        for name in ("a", "b"):
            main(["solve", "--instance", str(ghn_file), "--trace", str(tmp_path / f"{name}.csv"), "--no-timing"])
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.inner.csv").read_bytes() == (tmp_path / "b.inner.csv").read_bytes()


class TestGenerate:
    def test_ghn(self, ghn_file, ghn):
        inst = ProblemInstance.load(ghn_file)
        np.testing.assert_array_equal(inst.cost, ghn.cost)

    def test_random_deterministic(self, capsys):
        _, first = _run(capsys, "generate", "--random", "--dims", "5,10,10", "--seed", "1")
        _, second = _run(capsys, "generate", "--random", "--dims", "5,10,10", "--seed", "1")
        assert first.out == second.out
        assert np.asarray(json.loads(first.out)["cost"]).shape == (10, 5, 10)

    def test_extended(self, capsys):
        _, out = _run(capsys, "generate", "--extended", "--d", "18")
        inst = ProblemInstance.from_dict(json.loads(out.out))
        assert inst.shape == (18, 18, 18)
        np.testing.assert_array_equal(inst.cost, extended_instance(18).cost)

    def test_kind_required(self, capsys):
        assert _run(capsys, "generate")[0] == 2

    def test_bad_dims(self, capsys):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["generate", "--random", "--dims", "5,10"])


class TestReproduce:
    def test_ghn_suite(self, capsys, tmp_path):
        path = tmp_path / "checks.json"
        code, out = _run(capsys, "reproduce", "--suite", "ghn", "--report", str(path))
        assert code == 0
        assert "FAIL" not in out.out
        assert "ghn.outer_iterations" in out.out
        assert all(row["passed"] for row in json.loads(path.read_text())["checks"])

    def test_random_suite_budget(self, capsys):
        code, out = _run(capsys, "reproduce", "--suite", "random", "--budget-seconds", "0")
        assert code == 0
        assert "skipped: budget" in out.out


class TestBa:
    @pytest.fixture
    def reduced(self):
        rng = np.random.default_rng(1)
        return ReducedInstance(np.full(4, 0.25), np.floor(rng.random((4, 3)) * 101) / 10, 2)

    def test_cross_check(self, capsys, tmp_path, reduced):
        path = tmp_path / "tiled.json"
        tile(reduced).save(path)
        code, out = _run(capsys, "ba", "--instance", str(path), "--cross-check")
        payload = json.loads(out.out)
        assert code == 0
        assert payload["cross_check"]["gap"] <= 1e-8
        assert "cross-check gap" in out.err

    def test_tile(self, capsys, tmp_path, reduced):
        path = tmp_path / "reduced.json"
        path.write_text(json.dumps(reduced.to_dict()))
        code, out = _run(capsys, "ba", "--tile", "--instance", str(path))
        payload = json.loads(out.out)
        assert code == 0
        assert np.asarray(payload["policy"]).shape == (4, 2, 3)
        assert np.asarray(payload["reduced_policy"]).shape == (4, 3)

    def test_not_reducible(self, capsys, ghn_file):
        code, out = _run(capsys, "ba", "--instance", str(ghn_file))
        assert code == 2
        assert json.loads(out.out)["error"] == "NotReducible"

    def test_tile_needs_instance(self, capsys):
        assert _run(capsys, "ba", "--tile")[0] == 2


def test_threads_env_default(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    args = build_parser().parse_args(["solve", "--generate", "ghn"])
    assert args.threads == 3
