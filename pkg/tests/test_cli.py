import json
import math

import pytest
from typer.testing import CliRunner

from src.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, EXIT_RESOURCE, app, exit_code_for, run
from src.exceptions import (
    FixtureSyntaxError,
    NotFiniteColength,
    ResourceExceeded,
    UndefinedDimension,
    ValidationFailed,
)


@pytest.fixture
def fx(fixtures_dir):
    def _path(name):
        return str(fixtures_dir / name)

    return _path


@pytest.fixture(autouse=True)
def clear_env(monkeypatch):
    monkeypatch.delenv("LAD_MAX_TRUNCATION", raising=False)
    monkeypatch.delenv("LOG_FILE", raising=False)
    monkeypatch.delenv("LOG_LEVEL", raising=False)


def test_entropy_json_report(fx, capsys):
    code = run(["entropy", fx("example1.lad"), "--endo", "phi", "--max-iter", "4", "--format", "json"])
    assert code == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["length"] == [3, 9, 27, 81]
    assert report["exact_ratio"] == 3
    assert report["headline"] == pytest.approx(math.log(3))
    assert "base_length" not in report


def test_entropy_human_report_shows_exact_form(fx, capsys):
    assert run(["entropy", fx("example1.lad"), "--endo", "phi"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "log 3" in out
    assert "length=27" in out


def test_entropy_csv_report(fx, capsys):
    assert run(["entropy", fx("zerodim.lad"), "--endo", "sq", "--max-iter", "4", "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,length,naive,fekete,ratio"
    assert [line.split(",")[1] for line in lines[1:]] == ["2", "4", "8", "8"]
    assert lines[1].endswith(",")


def test_entropy_with_explicit_ideal(fx, capsys):
    code = run(
        ["entropy", fx("example1.lad"), "--endo", "psi", "--ideal", "(w, y)", "--max-iter", "3", "--format", "json"]
    )
    assert code == EXIT_OK
    assert json.loads(capsys.readouterr().out)["length"] == [180, 2700, 40500]


def test_check_empty_fixture(fx):
    assert run(["check", fx("empty.lad")]) == EXIT_OK


def test_check_example_fixture(fx, capsys):
    assert run(["check", fx("example1.lad"), "--format", "json"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    statuses = {(item["kind"], item["name"]): item["status"] for item in report["items"]}
    assert statuses[("ring", "S")] == "pass"
    assert statuses[("endo", "psi")] == "pass"
    assert statuses[("map", "f")] == "pass"
    assert report["flatness"][0]["dimension_check"] == "pass"
    assert report["flatness"][0]["method"] == "dimension-drop"


def test_check_reports_bad_endomorphism(tmp_path, capsys):
    path = tmp_path / "bad.lad"
    path.write_text("field 2\nring A vars x y\nendo e on A : x -> x^2, y -> 0\n")
    assert run(["check", str(path)]) == EXIT_INPUT
    assert "endo e: fail" in capsys.readouterr().out


def test_verify_additivity_on_example(fx, capsys):
    code = run(
        [
            "verify",
            "additivity",
            fx("example1.lad"),
            "--map",
            "f",
            "--q",
            "(y)",
            "--qprime",
            "(w)",
            "--max-iter",
            "3",
            "--format",
            "csv",
        ]
    )
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,lhs,rhs_factor_r,rhs_factor_fiber,passed"
    assert [line.split(",")[1] for line in lines[1:]] == ["12", "180", "2700", "40500"]
    assert all(line.endswith("True") for line in lines[1:])


def test_verify_additivity_human(fx, capsys):
    code = run(["verify", "additivity", fx("frobenius_pair.lad"), "--map", "f", "--q", "(y)", "--qprime", "(w)"])
    assert code == EXIT_OK
    assert "verified" in capsys.readouterr().out


def test_verify_additivity_without_assumptions(fx, capsys):
    code = run(["verify", "additivity", fx("nonflat.lad"), "--map", "f", "--q", "(x, y)", "--qprime", "()"])
    assert code == EXIT_INPUT
    assert "assume flat f" in capsys.readouterr().err


def test_verify_additivity_failure_exit_code(tmp_path, fixtures_dir):
    path = tmp_path / "forced.lad"
    path.write_text((fixtures_dir / "nonflat.lad").read_text() + "assume flat f\nassume cm S\n")
    code = run(["verify", "additivity", str(path), "--map", "f", "--q", "(x, y)", "--qprime", "()", "--max-iter", "2"])
    assert code == EXIT_FAILED


def test_verify_inequality(fx, tmp_path):
    out = tmp_path / "report.json"
    code = run(["verify", "inequality", fx("nonflat.lad"), "--map", "f", "--format", "json", "--output", str(out)])
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    assert [row["lhs"] for row in report["rows"]] == [3, 7, 15]


def test_ambiguous_endomorphism_needs_option(tmp_path, fixtures_dir, capsys):
    path = tmp_path / "two.lad"
    path.write_text((fixtures_dir / "frobenius_pair.lad").read_text() + "endo cube on R : y -> y^3\n")
    assert run(["verify", "inequality", str(path), "--map", "f"]) == EXIT_INPUT
    assert "--source-endo" in capsys.readouterr().err
    assert run(["verify", "inequality", str(path), "--map", "f", "--source-endo", "phi"]) == EXIT_OK


def test_length_dim_and_oracle(fx, capsys):
    assert run(["length", fx("example1.lad"), "--ring", "S", "--ideal", "(y, w)"]) == EXIT_OK
    assert "= 12" in capsys.readouterr().out
    assert run(["oracle-length", fx("example1.lad"), "--ring", "S", "--ideal", "(y, w)", "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert (report["length"], report["method"]) == (12, "oracle")
    assert run(["dim", fx("example1.lad"), "--ring", "S"]) == EXIT_OK
    assert capsys.readouterr().out.strip().endswith("= 2")


def test_truncation_cap_is_a_resource_error(fx):
    code = run(["length", fx("example1.lad"), "--ring", "S", "--ideal", "(y)", "--max-truncation", "12"])
    assert code == EXIT_RESOURCE


def test_truncation_cap_from_environment(fx, monkeypatch):
    monkeypatch.setenv("LAD_MAX_TRUNCATION", "12")
    assert run(["length", fx("example1.lad"), "--ring", "S", "--ideal", "(y)"]) == EXIT_RESOURCE


def test_syntax_error_exit_code(fx, capsys):
    assert run(["check", fx("broken.lad")]) == EXIT_INPUT
    assert "line 3" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["entropy", "missing.lad", "--endo", "phi"],
        ["entropy", "FIXTURE", "--endo", "nope"],
        ["entropy", "FIXTURE", "--endo", "phi", "--max-iter", "0"],
        ["entropy", "FIXTURE", "--endo", "phi", "--truncation", "cube"],
        ["length", "FIXTURE", "--ring", "S", "--ideal", "(y,"],
        ["frobnicate"],
    ],
)
def test_input_errors_exit_2(fx, argv):
    argv = [fx("example1.lad") if arg == "FIXTURE" else arg for arg in argv]
    assert run(argv) == EXIT_INPUT


@pytest.mark.parametrize(
    "exc, code",
    [
        (ResourceExceeded("cap"), EXIT_RESOURCE),
        (NotFiniteColength("cap"), EXIT_RESOURCE),
        (ValidationFailed("bad"), EXIT_INPUT),
        (UndefinedDimension("unit"), EXIT_INPUT),
        (FixtureSyntaxError("bad", line=1, column=1), EXIT_INPUT),
        (OSError("disk"), EXIT_INPUT),
    ],
)
def test_exit_code_mapping(exc, code):
    assert exit_code_for(exc) == code


def test_cli_runner_writes_entropy_report(fx, tmp_path):
    target = tmp_path / "entropy.json"
    result = CliRunner().invoke(
        app,
        [
            "entropy", fx("frobenius.lad"), "--endo", "frob", "--max-iter", "3",
            "--format", "json", "--output", str(target),
        ],
    )
    assert result.exit_code == EXIT_OK
    report = json.loads(target.read_text())
    assert report["length"] == [9, 81, 729]
    assert report["exact_ratio"] == 9


def test_cli_runner_reports_failed_additivity(tmp_path, fixtures_dir):
    path = tmp_path / "forced.lad"
    path.write_text((fixtures_dir / "nonflat.lad").read_text() + "assume flat f\nassume cm S\n")
    target = tmp_path / "additivity.csv"
    result = CliRunner().invoke(
        app,
        ["verify", "additivity", str(path), "--map", "f", "--q", "(x, y)", "--qprime", "()"]
        + ["--max-iter", "2", "--format", "csv", "--output", str(target)],
    )
    assert result.exit_code == EXIT_FAILED
    assert target.read_text().splitlines()[0].startswith("n,")


def test_usage_errors_are_reported_not_raised(capsys):
    assert run(["length", "missing.lad", "--ring", "S", "--ideal", "(y)"]) == EXIT_INPUT
    assert "missing.lad" in capsys.readouterr().err
    assert run(["frobnicate"]) == EXIT_INPUT
    assert "frobnicate" in capsys.readouterr().err


@pytest.mark.parametrize("output_format", ["json", "csv"])
def test_reports_are_byte_identical_across_runs(fx, capsys, output_format):
    argv = ["entropy", fx("hypersurface.lad"), "--endo", "frob", "--max-iter", "2", "--format", output_format]
    outputs = []
    for _ in range(2):
        assert run(argv) == EXIT_OK
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]
    assert outputs[0]
