from __future__ import annotations

import importlib
import json
from pathlib import Path

from typer.testing import CliRunner

from ribnet.cli.main import app
from ribnet.data.loader import shipped_text

runner = CliRunner()


def _strict(token: str) -> float:
    raise ValueError(f"non-standard JSON constant {token}")


def _report(output: str) -> dict:
    start = output.index("{")
    return json.loads(output[start:], parse_constant=_strict)


def test_cli_entrypoint_exists():
    mod = importlib.import_module("ribnet.cli.main")
    assert hasattr(mod, "app"), "Typer app 'app' missing in ribnet.cli.main"


class TestCommands:
    def test_validate_shipped(self) -> None:
        res = runner.invoke(app, ["validate", "ds-n2-l1", "--quiet"])
        assert res.exit_code == 0
        rep = _report(res.stdout)
        assert rep["passed"] is True
        assert rep["tool"] == "ribnet"
        assert len(rep["dataset_sha256"]) == 64
        assert rep["results"]["genus"] == 1

    def test_validate_truncated_file(self, tmp_path: Path) -> None:
        p = tmp_path / "broken.json"
        p.write_text(shipped_text("ds-n2-l1")[:120], encoding="utf-8")
        res = runner.invoke(app, ["validate", str(p), "--quiet"])
        assert res.exit_code == 2

    def test_missing_file_is_io_error(self, tmp_path: Path) -> None:
        res = runner.invoke(app, ["validate", str(tmp_path / "absent.json"), "--quiet"])
        assert res.exit_code == 3

    def test_transform_alpha_out_of_range(self) -> None:
        res = runner.invoke(app, ["transform", "ds-n2-l1", "--alpha", "3", "--quiet"])
        assert res.exit_code == 2

    def test_bad_tolerance_is_invalid_data(self) -> None:
        res = runner.invoke(app, ["omega", "ds-n2-l1", "--tol", "bogus=1", "--quiet"])
        assert res.exit_code == 2

    def test_omega_residue_table(self) -> None:
        res = runner.invoke(app, ["omega", "ds-n3-l2", "--quiet"])
        assert res.exit_code == 0
        rep = _report(res.stdout)
        r = rep["results"]["residues_r"]
        assert abs(r[0] - 1.5) < 1e-12
        assert abs(r[1] + 3.0) < 1e-12

    def test_transform_report_written(self, tmp_path: Path) -> None:
        out = tmp_path / "pair.json"
        res = runner.invoke(
            app,
            ["transform", "ds-n2-l1", "--alpha", "1", "--grid=-1,1,7", "-o", str(out), "-q"],
        )
        assert res.exit_code == 0
        rep = json.loads(out.read_text(encoding="utf-8"))
        assert rep["command"] == "transform"
        assert rep["results"]["alpha"] == 1
        assert rep["passed"] is True

    def test_verify_small_grid(self) -> None:
        res = runner.invoke(app, ["verify", "ds-n2-l1", "--grid=-1,1,9", "--seed", "3", "-q"])
        assert res.exit_code == 0
        rep = _report(res.stdout)
        assert rep["passed"] is True
        assert rep["seed"] == 3
        for key in ("omega", "orthogonality", "ribaucour", "lemma_identities", "closed_form"):
            assert rep["results"][key]["passed"] is True

    def test_verify_is_deterministic(self) -> None:
        args = ["verify", "ds-n2-l1", "--grid=-0.5,0.5,5", "--seed", "11", "-q"]
        first = runner.invoke(app, args)
        second = runner.invoke(app, args)
        assert first.exit_code == second.exit_code == 0
        assert first.stdout == second.stdout

    def test_verify_report_is_strict_json(self) -> None:
        res = runner.invoke(app, ["verify", "ds-n2-l1", "--grid=-1,1,5", "-q"])
        assert res.exit_code == 0, res.exception
        rep = _report(res.stdout)
        samples = rep["results"]["lemma_identities"]["samples"]
        assert samples
        assert all(row["passed"] is True for row in samples)
        grad = rep["results"]["gradient_oracle"]
        assert grad["samples"] > 0
        assert isinstance(grad["max_relative_error"], float)

    def test_synth_then_export(self, tmp_path: Path) -> None:
        net_file = tmp_path / "net.json"
        res = runner.invoke(
            app, ["synth", "ds-n2-l1", "--grid=-1,1,5", "-o", str(net_file), "-q"]
        )
        assert res.exit_code == 0
        assert net_file.exists()

        csv_file = tmp_path / "net.csv"
        res = runner.invoke(app, ["export", str(net_file), "-o", str(csv_file), "-f", "csv", "-q"])
        assert res.exit_code == 0
        header = csv_file.read_text(encoding="utf-8").splitlines()[0]
        assert header == "u0,u1,x0,x1,flagged"

        obj_file = tmp_path / "net.obj"
        res = runner.invoke(app, ["export", str(net_file), "-o", str(obj_file), "-f", "obj", "-q"])
        assert res.exit_code == 0
        assert "\nf " in obj_file.read_text(encoding="utf-8")
