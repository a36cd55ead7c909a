"""The l = 1 inversion formula and the residue identity behind it.

Summing the residues of ``psi(u, Q) psi(u, sigma Q) Omega`` gives, for any data,

    x.x + 2 sum_{alpha <= l} r_alpha psi(R_alpha) psi(sigma R_alpha)
        + sum_{k > l} Res_{R_k} Omega * d_k^2 = 0.

With l = 1 and d = (1, 0, ..., 0) this pins phi_1 = -x.x / (2 r_1), and the swapped
net is the inversion x_1 = c x / (x.x) with c = -2 r_1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ribnet.ba.system import BASolution
from ribnet.config.tolerances import DEFAULT_TOLERANCES, Tolerances
from ribnet.core.errors import PreconditionViolated
from ribnet.curve.model import SpectralCurveData
from ribnet.net.grid import Grid
from ribnet.net.reports import ResidualStats
from ribnet.net.synth import OrthogonalNet, synth_net, valid_indices
from ribnet.omega.differential import OmegaData, build_omega
from ribnet.ribaucour.swap import swap_data
from ribnet.utils.progress import Progress


def norm_identity_residual(S: SpectralCurveData, sol: BASolution, omega: OmegaData) -> float:
    """Relative residual of the residue-sum identity for ``x.x`` at one solved point."""
    terms = [sum(sol.value(q).real ** 2 for q in S.Q)]
    for a in range(S.l):
        r = omega.residues_r[a]
        terms.append(2.0 * r * (sol.value(S.R[a]) * sol.value(S.sigma(S.R[a]))).real)
    for k, res in enumerate(omega.residues_fixed_r, start=S.l):
        terms.append(res * sol.value(S.R[k]).real ** 2)
    scale = max(abs(t) for t in terms)
    return 0.0 if scale == 0 else abs(sum(terms)) / scale


def norm_identity_report(
    S: SpectralCurveData, net: OrthogonalNet, omega: OmegaData, tol: Optional[Tolerances] = None
) -> ResidualStats:
    tol = tol or DEFAULT_TOLERANCES
    values = np.full(net.u.shape[0], np.nan)
    for p in np.flatnonzero(net.valid):
        values[p] = norm_identity_residual(S, net.solution(int(p)), omega)
    return ResidualStats.from_values(values, net.u, tol.lemma)


@dataclass(frozen=True)
class ClosedFormReport:
    c: float
    max_deviation: float
    norm_deviation: float
    phi_deviation: float
    points: int
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(max(self.max_deviation, self.norm_deviation, self.phi_deviation) <= self.threshold)

    def to_json_dict(self) -> dict:
        return {
            "c": self.c,
            "max_deviation": self.max_deviation,
            "norm_deviation": self.norm_deviation,
            "phi_deviation": self.phi_deviation,
            "points": self.points,
            "passed": self.passed,
        }

    def as_tuple(self) -> Tuple[float, float]:
        return self.c, self.max_deviation


def closed_form_l1(
    S: SpectralCurveData,
    grid: Optional[Grid] = None,
    *,
    omega: Optional[OmegaData] = None,
    tol: Optional[Tolerances] = None,
    threads: Optional[int] = None,
    progress: Optional[Progress] = None,
    seed: int = 0,
) -> ClosedFormReport:
    """Compare the swapped net with ``c x/(x.x)``, ``c = -2 r_1``, using d = (1, 0, ..., 0)."""
    tol = tol or DEFAULT_TOLERANCES
    if S.l != 1:
        raise PreconditionViolated(f"closed form needs l = 1 (got l = {S.l})")
    if len(S.R) != 1 + S.N or len(S.d) != 1 + S.N:
        raise PreconditionViolated("closed form needs l + N normalization points and values")
    d = (1.0,) + (0.0,) * S.N
    omega = omega or build_omega(S, tol)
    r1 = omega.residues_r[0]
    c = -2.0 * r1

    net = synth_net(S, grid, d, tol=tol, threads=threads, progress=progress, seed=seed,
                    label="x")
    swapped = synth_net(swap_data(S, 1), net.grid, d, tol=tol, threads=threads,
                        progress=progress, seed=seed, label="x_1")

    idx = valid_indices([net, swapped])
    x = net.points[idx]
    x1 = swapped.points[idx]
    xx = np.einsum("pk,pk->p", x, x)
    x1x1 = np.einsum("pk,pk->p", x1, x1)
    keep = xx > 0
    predicted = c * x[keep] / xx[keep, None]
    dev = np.linalg.norm(x1[keep] - predicted, axis=1) / np.linalg.norm(x1[keep], axis=1)
    norm_dev = np.abs(x1x1[keep] - c * c / xx[keep]) / x1x1[keep]

    phi = np.array(
        [net.solution(int(p)).value(S.opposite_R(0)).real for p in idx[keep]]
    )
    phi_pred = -xx[keep] / (2.0 * r1)
    phi_dev = np.abs(phi - phi_pred) / np.maximum(np.abs(phi), np.abs(phi_pred))

    def worst(a: np.ndarray) -> float:
        return float(np.max(a)) if a.size else 0.0

    return ClosedFormReport(
        c=float(c),
        max_deviation=worst(dev),
        norm_deviation=worst(norm_dev),
        phi_deviation=worst(phi_dev),
        points=int(np.sum(keep)),
        threshold=tol.closed_form,
    )
