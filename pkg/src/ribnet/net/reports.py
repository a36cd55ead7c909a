from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from ribnet.config.tolerances import DEFAULT_TOLERANCES, Tolerances
from ribnet.core.types import ResidualSummary
from ribnet.net.synth import OrthogonalNet

FloatArray = NDArray[np.float64]

_FLOOR = float(np.sqrt(np.finfo(np.float64).eps))


@dataclass(frozen=True)
class ResidualStats:
    max: float
    mean: float
    argmax: Optional[Tuple[float, ...]]
    count: int
    flagged: int
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.max <= self.threshold)

    def to_json_dict(self) -> ResidualSummary:
        return ResidualSummary(
            max=self.max, mean=self.mean, count=self.count, flagged=self.flagged, passed=self.passed
        )

    @classmethod
    def from_values(
        cls,
        values: FloatArray,
        u: FloatArray,
        threshold: float,
        *,
        flagged: int = 0,
    ) -> "ResidualStats":
        """``values`` aligned with ``u``; NaN entries count as flagged."""
        ok = np.isfinite(values)
        flagged += int(np.sum(~ok))
        if not np.any(ok):
            return cls(0.0, 0.0, None, 0, flagged, threshold)
        idx = np.flatnonzero(ok)
        best = idx[int(np.argmax(values[idx]))]
        return cls(
            max=float(values[best]),
            mean=float(np.mean(values[idx])),
            argmax=tuple(float(v) for v in u[best]),
            count=int(idx.size),
            flagged=flagged,
            threshold=threshold,
        )


def _safe_ratio(num: FloatArray, den: FloatArray) -> FloatArray:
    """Elementwise ratio; NaN (flagged) where the scale vanishes or is not finite."""
    out = np.full_like(num, np.nan)
    np.divide(num, den, out=out, where=den > 0)
    out[~np.isfinite(num) | ~np.isfinite(den)] = np.nan
    return out


@dataclass(frozen=True)
class OrthogonalityReport:
    overall: ResidualStats
    pairs: Dict[Tuple[int, int], ResidualStats] = field(default_factory=dict)
    per_point: Optional[FloatArray] = None

    @property
    def passed(self) -> bool:
        return self.overall.passed

    def to_json_dict(self) -> dict:
        return {
            "overall": self.overall.to_json_dict(),
            "pairs": {f"{i},{j}": s.to_json_dict() for (i, j), s in self.pairs.items()},
        }


@dataclass(frozen=True)
class ConjugacyReport:
    overall: ResidualStats
    pairs: Dict[Tuple[int, int], ResidualStats] = field(default_factory=dict)
    coefficients: Dict[Tuple[int, int], FloatArray] = field(default_factory=dict)
    per_point: Optional[FloatArray] = None

    @property
    def passed(self) -> bool:
        return self.overall.passed

    @property
    def empty(self) -> bool:
        return not self.pairs

    def to_json_dict(self) -> dict:
        return {
            "overall": self.overall.to_json_dict(),
            "pairs": {f"{i},{j}": s.to_json_dict() for (i, j), s in self.pairs.items()},
        }


def _pairs(n: int) -> List[Tuple[int, int]]:
    return list(combinations(range(n), 2))


def orthogonality_report(net: OrthogonalNet, tol: Optional[Tolerances] = None) -> OrthogonalityReport:
    """|d_i x . d_j x| / (|d_i x| |d_j x|) for every pair i < j at unflagged points."""
    tol = tol or DEFAULT_TOLERANCES
    flagged = int(np.sum(net.flags))
    dx = net.first_derivs[net.valid]
    u = net.u[net.valid]
    per_pair: Dict[Tuple[int, int], ResidualStats] = {}
    worst = np.zeros(dx.shape[0])
    for i, j in _pairs(net.n):
        a, b = dx[:, i, :], dx[:, j, :]
        res = _safe_ratio(
            np.abs(np.einsum("pk,pk->p", a, b)),
            np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1),
        )
        per_pair[(i, j)] = ResidualStats.from_values(res, u, tol.orthogonality, flagged=flagged)
        worst = np.maximum(worst, res)
    overall = ResidualStats.from_values(worst, u, tol.orthogonality, flagged=flagged)
    return OrthogonalityReport(overall, per_pair, worst)


def conjugacy_report(net: OrthogonalNet, tol: Optional[Tolerances] = None) -> ConjugacyReport:
    """Least-squares fit of d_i d_j x in span{d_i x, d_j x}; the fitted pair is (c^i_ij, c^j_ij)."""
    tol = tol or DEFAULT_TOLERANCES
    flagged = int(np.sum(net.flags))
    valid = net.valid
    dx = net.first_derivs[valid]
    d2x = net.second_derivs[valid]
    u = net.u[valid]
    per_pair: Dict[Tuple[int, int], ResidualStats] = {}
    coeffs: Dict[Tuple[int, int], FloatArray] = {}
    worst = np.zeros(dx.shape[0])
    for i, j in _pairs(net.n):
        B = np.stack([dx[:, i, :], dx[:, j, :]], axis=2)
        v = d2x[:, i, j, :]
        c = np.einsum("pab,pb->pa", np.linalg.pinv(B), v)
        fit_i = B[:, :, 0] * c[:, 0:1]
        fit_j = B[:, :, 1] * c[:, 1:2]
        resid = np.linalg.norm(v - fit_i - fit_j, axis=1)
        scale = np.maximum.reduce(
            [
                np.linalg.norm(v, axis=1),
                np.linalg.norm(fit_i, axis=1),
                np.linalg.norm(fit_j, axis=1),
                _FLOOR * np.maximum(np.linalg.norm(B[:, :, 0], axis=1), np.linalg.norm(B[:, :, 1], axis=1)),
            ]
        )
        res = _safe_ratio(resid, scale)
        per_pair[(i, j)] = ResidualStats.from_values(res, u, tol.conjugacy, flagged=flagged)
        coeffs[(i, j)] = c
        worst = np.maximum(worst, res)
    if not per_pair:
        empty = ResidualStats(0.0, 0.0, None, 0, flagged, tol.conjugacy)
        return ConjugacyReport(empty)
    overall = ResidualStats.from_values(worst, u, tol.conjugacy, flagged=flagged)
    return ConjugacyReport(overall, per_pair, coeffs, worst)
