from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from ribnet.config.tolerances import DEFAULT_TOLERANCES, Tolerances
from ribnet.core.errors import CollinearTriple, PreconditionViolated
from ribnet.curve.model import SpectralCurveData
from ribnet.net.grid import Grid, default_grid
from ribnet.net.reports import ResidualStats
from ribnet.net.synth import OrthogonalNet, synth_net, valid_indices
from ribnet.omega.differential import OmegaData, build_omega
from ribnet.ribaucour.circle import concircularity_check
from ribnet.ribaucour.pair import RibaucourReport, ribaucour_pair
from ribnet.ribaucour.swap import Subset, order_independent, subset_label, subsets, swap_sequence
from ribnet.utils.progress import Progress
from ribnet.utils.status import status

EdgeKey = Tuple[Subset, int]
FaceKey = Tuple[Subset, int, int]


@dataclass(frozen=True)
class FaceReport:
    """Concircularity of corresponding points on one family of quadrilaterals."""

    base: Subset
    alpha: int
    beta: int
    residuals: NDArray[np.float64]
    stats: ResidualStats
    pass_fraction: float

    @property
    def fraction_within(self) -> float:
        ok = np.isfinite(self.residuals)
        if not np.any(ok):
            return 0.0
        return float(np.mean(self.residuals[ok] <= self.stats.threshold))

    @property
    def passed(self) -> bool:
        return bool(self.fraction_within >= self.pass_fraction)

    def to_json_dict(self) -> dict:
        return {
            "base": subset_label(self.base),
            "alpha": self.alpha,
            "beta": self.beta,
            "fraction_within": self.fraction_within,
            "passed": self.passed,
            "residual": self.stats.to_json_dict(),
        }


@dataclass(frozen=True, eq=False)
class CubeReport:
    l: int
    data: Dict[Subset, SpectralCurveData]
    nets: Dict[Subset, OrthogonalNet]
    edge_reports: Dict[EdgeKey, RibaucourReport]
    faces: Dict[FaceKey, FaceReport] = field(default_factory=dict)
    path_independent: bool = True

    @property
    def failed_edges(self) -> List[EdgeKey]:
        return [k for k, r in self.edge_reports.items() if not r.passed]

    @property
    def passed(self) -> bool:
        return (
            self.path_independent
            and not self.failed_edges
            and all(f.passed for f in self.faces.values())
        )

    def to_json_dict(self) -> dict:
        return {
            "l": self.l,
            "nets": [subset_label(A) for A in self.nets],
            "path_independent": self.path_independent,
            "edges": [
                {"from": subset_label(A), "alpha": alpha, **rep.to_json_dict()}
                for (A, alpha), rep in self.edge_reports.items()
            ],
            "faces": [f.to_json_dict() for f in self.faces.values()],
            "passed": self.passed,
        }


def face_report(
    nets: Tuple[OrthogonalNet, OrthogonalNet, OrthogonalNet, OrthogonalNet],
    base: Subset,
    alpha: int,
    beta: int,
    tol: Tolerances,
) -> FaceReport:
    x, xa, xb, xab = nets
    M = x.u.shape[0]
    residuals = np.full(M, np.nan)
    for p in valid_indices(list(nets)):
        try:
            residuals[p] = concircularity_check(
                x.points[p], xa.points[p], xb.points[p], xab.points[p], tol=tol
            )
        except CollinearTriple:
            continue
    stats = ResidualStats.from_values(residuals, x.u, tol.concircularity)
    return FaceReport(base, alpha, beta, residuals, stats, tol.pass_fraction)


def bianchi_cube(
    S: SpectralCurveData,
    grid: Optional[Grid] = None,
    *,
    omega: Optional[OmegaData] = None,
    tol: Optional[Tolerances] = None,
    threads: Optional[int] = None,
    progress: Optional[Progress] = None,
    seed: int = 0,
) -> CubeReport:
    """All 2^l nets of the swap cube, every edge certified and every 2-face checked.

    Each vertex net is solved once and shared by the edges and faces that touch it.
    """
    if S.l < 1:
        raise PreconditionViolated("a Bianchi cube needs l >= 1")
    tol = tol or DEFAULT_TOLERANCES
    grid = grid or default_grid(S.n)
    omega = omega or build_omega(S, tol)

    vertices = subsets(S.l)
    data = {A: swap_sequence(S, sorted(A)) for A in vertices}
    path_independent = all(order_independent(S, A) for A in vertices)

    nets: Dict[Subset, OrthogonalNet] = {}
    for A in vertices:
        status(f"Solving net {subset_label(A)} on {grid.size} points")
        nets[A] = synth_net(data[A], grid, S.d, tol=tol, threads=threads, progress=progress,
                            seed=seed, label=subset_label(A))

    edges: Dict[EdgeKey, RibaucourReport] = {}
    for A in vertices:
        for alpha in range(1, S.l + 1):
            if alpha in A:
                continue
            B = A | {alpha}
            edges[(A, alpha)] = ribaucour_pair(
                data[A], alpha, grid, partner=data[B], omega=omega,
                net=nets[A], partner_net=nets[B], tol=tol, seed=seed,
            )
            verdict = "ok" if edges[(A, alpha)].passed else "FAILED"
            status(f"  edge {subset_label(A)} -> {subset_label(B)}: {verdict}")

    faces: Dict[FaceKey, FaceReport] = {}
    for A in vertices:
        free = [a for a in range(1, S.l + 1) if a not in A]
        for i, alpha in enumerate(free):
            for beta in free[i + 1 :]:
                quad = (nets[A], nets[A | {alpha}], nets[A | {beta}], nets[A | {alpha, beta}])
                faces[(A, alpha, beta)] = face_report(quad, A, alpha, beta, tol)

    return CubeReport(
        l=S.l,
        data=data,
        nets=nets,
        edge_reports=edges,
        faces=faces,
        path_independent=path_independent,
    )
