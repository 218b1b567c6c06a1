"""Tests for the uniquant command line."""

import json
from pathlib import Path

import pytest

from uniquant.api import Settings, UniquantAPI
from uniquant.cli.interface import create_parser, run, settings_from_args
from uniquant.errors import InsufficientMass


def test_quantize_json_to_stdout(capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["quantize", "--gen", "twodirac:gap=1", "--n", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert sorted(c[0] for c in payload["centers"]) == [-0.5, 0.0]
    assert payload["n"] == 2
    assert set(payload["certificates"]) >= {"p", "coupling_bound", "closed_form_bound"}


def test_rate_curve_csv(tmp_path: Path) -> None:
    out = tmp_path / "curve.csv"
    code = run(["rate-curve", "--gen", "grid:d=2,m=10", "--n-grid", "4:12", "--format", "csv", "--out", str(out)])
    assert code == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "n,measured,coupling_bound,closed_form_bound,random_baseline,oracle_optimal"
    assert [int(line.split(",")[0]) for line in lines[1:]] == list(range(4, 13))


@pytest.mark.parametrize(
    "argv",
    [
        ["decompose", "--gen", "grid:d=2,m=7", "--n", "9", "--format", "csv"],
        ["quantize", "--gen", "sample:dist=gaussian,d=2,N=300", "--n", "16", "--p", "2"],
        ["classify", "--gen", "sample:dist=gaussian,d=3,N=120", "--n", "12"],
        ["wasserstein", "--gen", "grid:d=1,m=30", "--target-gen", "sample:dist=gaussian,N=50", "--p", "2"],
        ["rate-curve", "--gen", "grid:d=1,m=40", "--n-grid", "odd:3:11", "--random-baseline", "--oracle"],
    ],
)
def test_reruns_are_byte_identical(tmp_path: Path, argv: list[str]) -> None:
    first, second = tmp_path / "first.out", tmp_path / "second.out"
    assert run([*argv, "--seed", "7", "--out", str(first)]) == 0
    assert run([*argv, "--seed", "7", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_exit_codes(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert run(["quantize", "--gen", "twodirac:gap=1"]) == 2
    assert "needs --n" in capsys.readouterr().err
    assert run(["quantize", "--gen", "grid:d=x", "--n", "2"]) == 2
    assert run(["quantize", "--input", str(tmp_path / "missing.csv"), "--n", "2"]) == 2

    half = tmp_path / "half.json"
    half.write_text(json.dumps({"dim": 1, "atoms": [{"x": [0.0], "w": 0.5}]}), encoding="utf-8")
    assert run(["wasserstein", "--gen", "twodirac:gap=1", "--target", str(half)]) == 2
    assert run(["wasserstein", "--gen", "twodirac:gap=1", "--target", str(half), "--normalize"]) == 0


def test_numerical_failure_exit_code(monkeypatch: pytest.MonkeyPatch) -> None:
    def fail(*_args: object) -> None:
        msg = "no heavy cell"
        raise InsufficientMass(msg)

    monkeypatch.setattr("uniquant.api.main.decompose", fail)
    assert run(["decompose", "--gen", "twodirac:gap=1", "--n", "2"]) == 3


def test_parser_rejects_bad_flags() -> None:
    parser = create_parser()
    for argv in (
        ["quantize", "--gen", "twodirac:gap=1", "--n", "0"],
        ["quantize", "--gen", "twodirac:gap=1", "--p", "0.5"],
        ["quantize", "--gen", "twodirac:gap=1", "--input", "mu.csv"],
        ["classify", "--gen", "twodirac:gap=1", "--q", "3"],
        ["frobnicate"],
    ):
        with pytest.raises(SystemExit) as exc_info:
            parser.parse_args(argv)
        assert exc_info.value.code == 2


def test_config_file_with_flag_override(tmp_path: Path) -> None:
    config = tmp_path / "settings.json"
    UniquantAPI.save_settings(
        Settings(command="rate-curve", gen="twodirac:gap=1", n_grid="3:9", oracle=True, trials=4), config
    )
    args = create_parser().parse_args(["rate-curve", "--config", str(config), "--n-grid", "odd:3:7", "--p", "2"])
    settings = settings_from_args(args)
    assert settings.n_grid == "odd:3:7"
    assert settings.p == 2.0
    assert settings.oracle
    assert settings.trials == 4
    assert settings.gen == "twodirac:gap=1"


def test_bad_config_file(tmp_path: Path) -> None:
    config = tmp_path / "settings.json"
    config.write_text('{"command": "quantize", "colour": "blue"}', encoding="utf-8")
    assert run(["quantize", "--config", str(config)]) == 2
