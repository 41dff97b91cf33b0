import json
import math

import pytest

from nsdt.constants import ERROR_EXIT_CODE, STANDARD_MODEL_NAME, SUCCESS_EXIT_CODE, USAGE_EXIT_CODE
from nsdt.main import build_parser, run
from nsdt.metric import check_sd_system, load_metric_spec

HALF_PI = str(math.pi / 2)
EQUATOR = [HALF_PI, "0", HALF_PI, "0"]


class TestCheck:
    def test_flat_spec(self, spec_dir, capsys):
        assert run(["check", str(spec_dir / "flat.json")]) == SUCCESS_EXIT_CODE
        assert "all checks passed" in capsys.readouterr().out

    def test_worked_spec_fails(self, spec_dir, capsys):
        assert run(["check", str(spec_dir / "worked.json")]) == ERROR_EXIT_CODE
        out = capsys.readouterr().out
        assert "basic" in out
        assert "some checks failed" in out

    @pytest.mark.parametrize("name", ["broken.json", "missing.json", "bad-utf8.json"])
    def test_unreadable_spec(self, spec_dir, name, capsys):
        assert run(["check", str(spec_dir / name)]) == USAGE_EXIT_CODE
        assert "Error" in capsys.readouterr().out

    def test_json_report_is_byte_identical(self, spec_dir, capsys):
        argv = ["check", str(spec_dir / "worked.json"), "--report", "json", "--no-timings", "--seed", "42"]
        run(argv)
        first = capsys.readouterr().out
        run(argv)
        second = capsys.readouterr().out
        assert first == second
        data = json.loads(first)
        assert data["seed"] == 42
        assert data["checks"]["basic"]["status"] == "fail"

    def test_report_file(self, spec_dir, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert run(["check", str(spec_dir / "dw.json"), "--out", str(out), "--report", "json"]) == SUCCESS_EXIT_CODE
        data = json.loads(out.read_text())
        assert data["killing"]["dw_basic"] is True
        assert "seconds" in data["checks"]["sd"]

    def test_several_specs(self, spec_dir, capsys):
        argv = ["check", str(spec_dir / "flat.json"), str(spec_dir / "worked.json"), "--report", "json",
                "--no-timings", "--jobs", "2"]
        assert run(argv) == ERROR_EXIT_CODE
        data = json.loads(capsys.readouterr().out)
        assert [report["metric_id"] for report in data] == ["flat", "worked"]
        assert [report["passed"] for report in data] == [True, False]

    def test_jobs_must_be_positive(self, spec_dir, capsys):
        assert run(["check", str(spec_dir / "flat.json"), "--jobs", "0"]) == USAGE_EXIT_CODE

    def test_seed_from_environment(self, spec_dir, monkeypatch, capsys):
        monkeypatch.setenv("NSDT_SEED", "11")
        run(["check", str(spec_dir / "flat.json"), "--report", "json", "--no-timings"])
        assert json.loads(capsys.readouterr().out)["seed"] == 11


class TestGenerate:
    def test_writes_self_dual_specs(self, tmp_path, capsys):
        out = tmp_path / "specs"
        argv = ["generate", "--fiber-degree", "2", "--base-degree", "1", "--count", "3", "--seed", "42",
                "--out", str(out)]
        assert run(argv) == SUCCESS_EXIT_CODE
        names = sorted(path.name for path in out.iterdir())
        assert names == [f"sd-f2-b1-s42-{i:03d}.json" for i in range(3)]
        for name in names:
            spec = load_metric_spec(out / name)
            assert check_sd_system(*spec.metric.special).passed
        assert "Wrote 3 metric spec(s)" in capsys.readouterr().out

    def test_count_must_be_positive(self, tmp_path, capsys):
        assert run(["generate", "--count", "0", "--out", str(tmp_path)]) == USAGE_EXIT_CODE


class TestTrace:
    def test_equator_closes(self, tmp_path, capsys):
        csv_path = tmp_path / "trace.csv"
        argv = ["trace", "--metric", STANDARD_MODEL_NAME, "--init", *EQUATOR, "0", "1", "0", "1",
                "--out", str(csv_path)]
        assert run(argv) == SUCCESS_EXIT_CODE
        out = capsys.readouterr().out
        assert "closed, period ~ 6.2832" in out
        assert csv_path.exists()

    def test_missing_init_is_a_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["trace", "--metric", STANDARD_MODEL_NAME])
        assert exc.value.code == USAGE_EXIT_CODE

    def test_pole_without_rotation(self, capsys):
        argv = ["trace", "--metric", STANDARD_MODEL_NAME, "--init", "1e-9", "0", HALF_PI, "0", "1", "0", "0", "1",
                "--no-rotate", "--steps", "10"]
        assert run(argv) == ERROR_EXIT_CODE
        assert "ChartSingularity" in capsys.readouterr().out

    def test_non_null_path_warns(self, capsys):
        argv = ["trace", "--metric", STANDARD_MODEL_NAME, "--init", *EQUATOR, "0", "1", "0", "0", "--steps", "100"]
        assert run(argv) == SUCCESS_EXIT_CODE
        assert "Warning" in capsys.readouterr().out


class TestClassify:
    @pytest.mark.parametrize("v, w, kind", [
        (["1", "0", "-1", "0"], ["0", "1", "0", "1"], "Beta"),
        (["1", "0", "1", "0"], ["0", "1", "0", "1"], "Alpha"),
        (["1", "0", "0", "0"], ["0", "1", "0", "0"], "NotTotallyNull"),
    ])
    def test_equator_planes(self, v, w, kind, capsys):
        argv = ["classify", "--metric", STANDARD_MODEL_NAME, "--point", *EQUATOR, "--v", *v, "--w", *w]
        assert run(argv) == SUCCESS_EXIT_CODE
        assert kind in capsys.readouterr().out

    def test_special_form_spec(self, spec_dir, capsys):
        # d2 and d3 span an alpha-plane of every special-form metric
        argv = ["classify", "--metric", str(spec_dir / "worked.json"), "--point", "0.1", "0.2", "0.3", "0.4",
                "--v", "0", "0", "1", "0", "--w", "0", "0", "0", "1"]
        assert run(argv) == SUCCESS_EXIT_CODE
        assert "Alpha" in capsys.readouterr().out


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])