from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

import ribnet
from ribnet.certify.suite import suite_passed, verify
from ribnet.config.settings import settings
from ribnet.config.tolerances import DEFAULT_TOLERANCES, Tolerances
from ribnet.core.errors import DatasetIOError, RibnetError
from ribnet.core.types import CommandName, ExportFormat, ReportEnvelope
from ribnet.curve.dual_graph import arithmetic_genus
from ribnet.curve.model import SpectralCurveData
from ribnet.curve.validate import validate_data
from ribnet.data.loader import dataset_sha256, load_dataset
from ribnet.export.adapters_csv import CsvNetAdapter
from ribnet.export.adapters_json import JsonNetAdapter
from ribnet.export.adapters_obj import ObjNetAdapter
from ribnet.net.grid import Grid, parse_grid
from ribnet.net.reports import conjugacy_report, orthogonality_report
from ribnet.net.synth import OrthogonalNet, synth_net
from ribnet.omega.differential import build_omega
from ribnet.ribaucour.cube import bianchi_cube
from ribnet.ribaucour.pair import ribaucour_pair
from ribnet.utils.progress import Progress
from ribnet.utils.status import status

EXIT_OK = 0
EXIT_CERTIFICATION = 1
EXIT_INVALID = 2
EXIT_IO = 3


class RunConfig(BaseModel):
    """One reproducible invocation: what to run, on which data, with which knobs."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dataset: str
    command: CommandName
    grid: Optional[str] = None
    tol: List[str] = Field(default_factory=list)
    output: Optional[Path] = None
    format: ExportFormat = "json"
    seed: int = Field(default_factory=lambda: settings.RIBNET_SEED)
    alpha: Optional[int] = None
    progress: Optional[bool] = None
    threads: Optional[int] = None

    def tolerances(self) -> Tolerances:
        return DEFAULT_TOLERANCES.with_overrides(self.tol)


def _envelope(
    config: RunConfig, sha: str, tol: Tolerances, passed: bool, results: Dict[str, Any]
) -> ReportEnvelope:
    return ReportEnvelope(
        tool="ribnet",
        version=ribnet.__version__,
        command=config.command,
        dataset_sha256=sha,
        seed=config.seed,
        passed=passed,
        tolerances=tol.model_dump(),
        results=results,
    )


def _plain(obj: Any) -> Any:
    """Numpy scalars and arrays as Python values; NaN and infinities as null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def _emit(config: RunConfig, envelope: ReportEnvelope, *, to_file: bool) -> None:
    text = json.dumps(_plain(envelope), indent=2, sort_keys=False, allow_nan=False)
    if to_file and config.output is not None:
        try:
            config.output.parent.mkdir(parents=True, exist_ok=True)
            config.output.write_text(text + "\n", encoding="utf-8")
        except OSError as e:
            raise DatasetIOError(f"cannot write report {config.output}: {e}") from e
        status(f"Wrote report -> {config.output}")
    else:
        print(text)


def _write_net(net: OrthogonalNet, path: Path, fmt: ExportFormat) -> Path:
    if fmt == "csv":
        return CsvNetAdapter.write(net, path)
    if fmt == "obj":
        return ObjNetAdapter.write(net, path)
    return JsonNetAdapter.write(net, path)


def _net_results(net: OrthogonalNet, tol: Tolerances) -> Tuple[bool, Dict[str, Any]]:
    orth = orthogonality_report(net, tol)
    conj = conjugacy_report(net, tol)
    real = net.max_imag <= tol.realness
    results = {
        "points": int(net.u.shape[0]),
        "flagged": int(net.flags.sum()),
        "orthogonality": orth.to_json_dict(),
        "conjugacy": conj.to_json_dict(),
        "max_imag": net.max_imag,
        "second_derivative_check": dict(net.fd_check),
    }
    return orth.passed and conj.passed and real, results


def _run_export(config: RunConfig, tol: Tolerances) -> Tuple[bool, str, Dict[str, Any], bool]:
    src = Path(config.dataset)
    try:
        sha = hashlib.sha256(src.read_bytes()).hexdigest()
    except OSError as e:
        raise DatasetIOError(f"cannot read net file {src}: {e}") from e
    net = JsonNetAdapter.read(src)
    if config.output is None:
        raise DatasetIOError("export needs --output")
    written = _write_net(net, config.output, config.format)
    status(f"Wrote {config.format} -> {written}")
    return True, sha, {"output": str(written), "format": config.format}, False


def _dispatch(config: RunConfig) -> Tuple[int, ReportEnvelope, bool]:
    tol = config.tolerances()
    prog = Progress(enabled=config.progress)
    if config.command == "export":
        passed, sha, results, to_file = _run_export(config, tol)
        return EXIT_OK, _envelope(config, sha, tol, passed, results), to_file

    S: SpectralCurveData = load_dataset(config.dataset)
    sha = dataset_sha256(S)
    status(f"Loaded {S.name or config.dataset}: n={S.n}, N={S.N}, l={S.l}")

    if config.command == "validate":
        report = validate_data(S)
        results: Dict[str, Any] = report.to_json_dict()
        if report.ok:
            results["genus"] = arithmetic_genus(S)
        code = EXIT_OK if report.ok else EXIT_INVALID
        return code, _envelope(config, sha, tol, report.ok, results), True

    report = validate_data(S)
    if not report.ok:
        env = _envelope(config, sha, tol, False, {"validation": report.to_json_dict()})
        return EXIT_INVALID, env, True

    grid: Optional[Grid] = parse_grid(config.grid, S.n) if config.grid else None

    if config.command == "omega":
        omega = build_omega(S, tol)
        return EXIT_OK, _envelope(config, sha, tol, True, omega.to_json_dict()), True

    if config.command == "synth":
        build_omega(S, tol)
        net = synth_net(S, grid, tol=tol, threads=config.threads, progress=prog,
                        seed=config.seed, label=S.name)
        passed, results = _net_results(net, tol)
        if config.output is not None:
            results["output"] = str(_write_net(net, config.output, config.format))
            status(f"Wrote {config.format} -> {results['output']}")
        code = EXIT_OK if passed else EXIT_CERTIFICATION
        return code, _envelope(config, sha, tol, passed, results), False

    if config.command == "transform":
        alpha = 1 if config.alpha is None else config.alpha
        rep = ribaucour_pair(S, alpha, grid, tol=tol, threads=config.threads, progress=prog,
                             seed=config.seed)
        code = EXIT_OK if rep.passed else EXIT_CERTIFICATION
        return code, _envelope(config, sha, tol, rep.passed, rep.to_json_dict()), True

    if config.command == "cube":
        cube = bianchi_cube(S, grid, tol=tol, threads=config.threads, progress=prog,
                            seed=config.seed)
        code = EXIT_OK if cube.passed else EXIT_CERTIFICATION
        return code, _envelope(config, sha, tol, cube.passed, cube.to_json_dict()), True

    checks = verify(S, grid, tol=tol, seed=config.seed, threads=config.threads, progress=prog)
    passed = suite_passed(checks)
    results = {name: r.to_json_dict() for name, r in checks.items()}
    code = EXIT_OK if passed else EXIT_CERTIFICATION
    return code, _envelope(config, sha, tol, passed, results), True


def run(config: RunConfig) -> int:
    """Execute one command; the return value is the process exit code."""
    try:
        code, envelope, to_file = _dispatch(config)
        _emit(config, envelope, to_file=to_file)
        return code
    except RibnetError as e:
        status(f"error ({type(e).__name__}): {e}")
        return e.exit_code
