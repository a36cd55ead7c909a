"""The full certification run behind ``ribnet verify``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ribnet.ba.system import BakerAkhiezerSystem
from ribnet.config.tolerances import DEFAULT_TOLERANCES, Tolerances
from ribnet.core.errors import DegeneratePoint, RibnetError, SingularSystem
from ribnet.curve.model import SpectralCurveData
from ribnet.curve.validate import validate_data
from ribnet.net.grid import Grid, GridAxis
from ribnet.net.reports import conjugacy_report, orthogonality_report
from ribnet.omega.differential import OmegaData, build_omega
from ribnet.ribaucour.closed_form import closed_form_l1, norm_identity_report
from ribnet.ribaucour.cube import bianchi_cube
from ribnet.ribaucour.pair import lemma_identities, random_regular_points
from ribnet.utils.progress import Progress
from ribnet.utils.status import status


def acceptance_grid(n: int) -> Grid:
    """33 points per axis up to n = 2, 17 beyond."""
    count = 33 if n <= 2 else 17
    return Grid(tuple(GridAxis(-1.0, 1.0, count) for _ in range(n)))


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    def to_json_dict(self) -> Dict[str, Any]:
        return {"passed": bool(self.passed), **self.details}


def _random_u(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    lo = np.array([min(a.start, a.stop) for a in grid.axes])
    hi = np.array([max(a.start, a.stop) for a in grid.axes])
    return rng.uniform(lo, hi)


def ba_checks(
    S: SpectralCurveData,
    grid: Grid,
    rng: np.random.Generator,
    tol: Tolerances,
    samples: int = 10,
) -> CheckResult:
    """Normalization, node matching, realness, linearity in d and the d = 0 case."""
    system = BakerAkhiezerSystem(S, tol)
    worst = {"normalization": 0.0, "node_matching": 0.0, "imaginary": 0.0,
             "linearity": 0.0, "zero_data": 0.0, "derivative_at_R": 0.0}
    m = len(S.R)
    for _ in range(samples):
        u = _random_u(grid, rng)
        try:
            sol = system.solve(u, S.d, order=1)
        except SingularSystem:
            continue
        for a in range(m):
            worst["normalization"] = max(
                worst["normalization"], abs(sol.value(S.physical_R(a)) - S.d[a])
            )
            for i in range(S.n):
                worst["derivative_at_R"] = max(
                    worst["derivative_at_R"], abs(sol.derivative(S.physical_R(a), i))
                )
        for node in S.nodes:
            va, vb = sol.value(node.branch_a), sol.value(node.branch_b)
            scale = max(abs(va), abs(vb), 1.0)
            worst["node_matching"] = max(worst["node_matching"], abs(va - vb) / scale)
        worst["imaginary"] = max(worst["imaginary"], sol.max_imag)

        d1 = rng.normal(size=m)
        d2 = rng.normal(size=m)
        a, b = rng.normal(size=2)
        w1 = system.solve(u, d1).coefficients
        w2 = system.solve(u, d2).coefficients
        w12 = system.solve(u, a * d1 + b * d2).coefficients
        scale = max(float(np.linalg.norm(w12)), 1.0)
        worst["linearity"] = max(
            worst["linearity"], float(np.linalg.norm(w12 - a * w1 - b * w2)) / scale
        )
        w0 = system.solve(u, np.zeros(m)).coefficients
        worst["zero_data"] = max(worst["zero_data"], float(np.linalg.norm(w0)))

    passed = (
        worst["normalization"] <= tol.certification
        and worst["node_matching"] <= tol.certification
        and worst["imaginary"] <= tol.realness
        and worst["linearity"] <= tol.certification
        and worst["zero_data"] < tol.delta_min
        and worst["derivative_at_R"] <= tol.certification
    )
    return CheckResult("baker_akhiezer", passed, worst)


def gradient_oracle(
    S: SpectralCurveData,
    grid: Grid,
    rng: np.random.Generator,
    tol: Tolerances,
    samples: int = 50,
) -> CheckResult:
    """Analytic d_i psi(u, Q) against central differences at random (u, Q, i)."""
    system = BakerAkhiezerSystem(S, tol)
    h = tol.gradient_step
    errors: List[float] = []
    attempts = 0
    while len(errors) < samples and attempts < 10 * samples:
        attempts += 1
        u = _random_u(grid, rng)
        (Q,) = random_regular_points(S, 1, rng)
        i = int(rng.integers(S.n))
        e = np.zeros(S.n)
        e[i] = h
        try:
            sol = system.solve(u, S.d, order=1)
            plus = system.solve(u + e, S.d).value(Q)
            minus = system.solve(u - e, S.d).value(Q)
        except SingularSystem:
            continue
        exact = sol.derivative(Q, i)
        fd = (plus - minus) / (2 * h)
        scale = max(abs(exact), abs(fd), 1e-4 * max(1.0, abs(sol.value(Q))))
        errors.append(abs(exact - fd) / scale)
    worst = float(max(errors)) if errors else None
    return CheckResult(
        "gradient_oracle",
        worst is not None and worst <= tol.gradient,
        {"samples": len(errors), "max_relative_error": worst},
    )


def verify(
    S: SpectralCurveData,
    grid: Optional[Grid] = None,
    *,
    tol: Optional[Tolerances] = None,
    seed: int = 0,
    threads: Optional[int] = None,
    progress: Optional[Progress] = None,
    lemma_samples: int = 10,
) -> Dict[str, CheckResult]:
    """Run every certification; one :class:`CheckResult` per identity family."""
    tol = tol or DEFAULT_TOLERANCES
    grid = grid or acceptance_grid(S.n)
    rng = np.random.default_rng(seed)
    results: Dict[str, CheckResult] = {}

    report = validate_data(S)
    results["validate"] = CheckResult("validate", report.ok, {"violations": report.codes})
    if not report.ok:
        return results

    status("Building Omega...")
    omega: OmegaData = build_omega(S, tol)
    results["omega"] = CheckResult(
        "omega",
        True,
        {
            "residues_r": list(omega.residues_r),
            "solution_space_dim": omega.solution_space_dim,
            "condition_number": omega.condition_number,
            **omega.certificate,
        },
    )

    status("Checking Baker-Akhiezer solutions...")
    results["baker_akhiezer"] = ba_checks(S, grid, rng, tol)
    results["gradient_oracle"] = gradient_oracle(S, grid, rng, tol)

    status(f"Building the Bianchi cube (l = {S.l}) on {grid.size} points per net...")
    cube = bianchi_cube(S, grid, omega=omega, tol=tol, threads=threads, progress=progress,
                        seed=seed)
    net = cube.nets[frozenset()]

    orth = orthogonality_report(net, tol)
    conj = conjugacy_report(net, tol)
    results["orthogonality"] = CheckResult("orthogonality", orth.passed, orth.to_json_dict())
    results["conjugacy"] = CheckResult("conjugacy", conj.passed, conj.to_json_dict())
    results["realness"] = CheckResult(
        "realness", net.max_imag <= tol.realness, {"max_imag": net.max_imag}
    )
    results["degenerate_points"] = CheckResult(
        "degenerate_points",
        net.flagged_fraction <= 1.0 - tol.pass_fraction,
        {"flagged_fraction": net.flagged_fraction},
    )
    results["second_derivatives"] = CheckResult(
        "second_derivatives",
        net.fd_check.get("max_relative_error", 0.0) <= tol.second_derivative,
        dict(net.fd_check),
    )
    norm = norm_identity_report(S, net, omega, tol)
    results["norm_identity"] = CheckResult("norm_identity", norm.passed, dict(norm.to_json_dict()))

    results["ribaucour"] = CheckResult(
        "ribaucour",
        not cube.failed_edges,
        {"edges": [r.to_json_dict() for r in cube.edge_reports.values()]},
    )
    results["bianchi_cube"] = CheckResult("bianchi_cube", cube.passed, cube.to_json_dict())

    lemma_rows: List[Dict[str, Any]] = []
    lemma_ok = True
    for alpha in range(1, S.l + 1):
        done = 0
        attempts = 0
        while done < lemma_samples and attempts < 5 * lemma_samples:
            attempts += 1
            u = tuple(float(v) for v in _random_u(grid, rng))
            try:
                rep = lemma_identities(S, alpha, u, omega=omega, seed=int(rng.integers(2**31)),
                                       tol=tol)
            except (DegeneratePoint, SingularSystem):
                continue
            lemma_rows.append(rep.to_json_dict())
            lemma_ok = lemma_ok and bool(rep.passed)
            done += 1
        lemma_ok = bool(lemma_ok and done == lemma_samples)
    results["lemma_identities"] = CheckResult("lemma_identities", lemma_ok, {"samples": lemma_rows})

    if S.l == 1:
        status("Checking the l = 1 inversion formula...")
        try:
            cf = closed_form_l1(S, grid, omega=omega, tol=tol, threads=threads,
                                progress=progress, seed=seed)
            results["closed_form"] = CheckResult("closed_form", cf.passed, cf.to_json_dict())
        except RibnetError as e:
            results["closed_form"] = CheckResult("closed_form", False, {"error": str(e)})
    return results


def suite_passed(results: Dict[str, CheckResult]) -> bool:
    return all(r.passed for r in results.values())
