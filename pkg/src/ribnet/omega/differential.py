"""The even differential Omega on a nodal rational curve.

On every component Omega pulls back to ``sum_p a_p dz/(z - p)`` over its finite
simple poles; a pole at infinity carries residue ``-sum_p a_p``. The unknowns of
the construction are the finite residues, and every defining condition (residue 1
at each Q, opposite residues across nodes, evenness, prescribed zeros) is linear
in them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import svd

from ribnet.config.tolerances import DEFAULT_TOLERANCES, Tolerances
from ribnet.core.errors import OmegaNotFound
from ribnet.curve.model import PointOnCurve, SpectralCurveData

ComplexArray = NDArray[np.complex128]


@dataclass(frozen=True)
class ComponentDifferential:
    """``Omega = numerator(z)/denominator(z) dz`` on one component, in its affine chart."""

    component_id: int
    poles: Tuple[PointOnCurve, ...]
    residues: Tuple[complex, ...]

    @property
    def finite_poles(self) -> List[complex]:
        return [p.z for p in self.poles if not p.is_infinite]

    @property
    def finite_residues(self) -> List[complex]:
        return [a for p, a in zip(self.poles, self.residues) if not p.is_infinite]

    @property
    def denominator(self) -> ComplexArray:
        """Coefficients, highest degree first."""
        return np.asarray(np.poly(self.finite_poles), dtype=np.complex128).reshape(-1)

    @property
    def numerator(self) -> ComplexArray:
        """Coefficients, highest degree first, with negligible leading terms dropped."""
        finite = self.finite_poles
        total = np.zeros(max(len(finite), 1), dtype=np.complex128)
        for k, a in enumerate(self.finite_residues):
            others = finite[:k] + finite[k + 1 :]
            part = np.asarray(np.poly(others), dtype=np.complex128).reshape(-1)
            total[len(total) - len(part) :] += a * part
        scale = float(np.max(np.abs(total))) if total.size else 0.0
        nz = np.flatnonzero(np.abs(total) > 1e-13 * scale)
        return total[nz[0] :] if nz.size else np.zeros(1, dtype=np.complex128)

    def value(self, z: complex) -> complex:
        """Coefficient of ``dz`` at an affine point."""
        return complex(np.polyval(self.numerator, z) / np.polyval(self.denominator, z))

    def residue_at(self, p: PointOnCurve) -> complex:
        """Residue read off the rational representation (``w = 1/z`` chart at infinity)."""
        num, den = self.numerator, self.denominator
        if p.is_infinite:
            deg_num, deg_den = len(num) - 1, len(den) - 1
            if not np.any(num) or deg_num < deg_den - 1:
                return 0j
            return complex(-num[0] / den[0])
        if p not in self.poles:
            return 0j
        return complex(np.polyval(num, p.z) / np.polyval(np.polyder(den), p.z))

    def order_at_infinity(self) -> int:
        num = self.numerator
        if not np.any(num):
            return 0
        return (len(self.denominator) - 1) - (len(num) - 1) - 2

    def divisor_degree(self) -> int:
        """#zeros - #poles with multiplicity; -2 for any nonzero differential on P^1."""
        num = self.numerator
        zeros = len(num) - 1 if np.any(num) else 0
        poles = len(self.denominator) - 1
        ord_inf = self.order_at_infinity()
        return zeros - poles + ord_inf

    def residue_sum(self) -> complex:
        finite = sum((self.residue_at(p) for p in self.poles if not p.is_infinite), 0j)
        return finite + self.residue_at(PointOnCurve.infinity(self.component_id))


@dataclass(frozen=True)
class OmegaData:
    components: Tuple[ComponentDifferential, ...]
    residues_r: Tuple[float, ...]
    residues_q: Tuple[complex, ...]
    residues_fixed_r: Tuple[float, ...]
    solution_space_dim: int
    rank: int
    condition_number: float
    system_residual: float
    certificate: Dict[str, float] = field(default_factory=dict)

    def on(self, component_id: int) -> ComponentDifferential:
        for c in self.components:
            if c.component_id == component_id:
                return c
        raise KeyError(component_id)

    def residue_at(self, p: PointOnCurve) -> complex:
        return self.on(p.component_id).residue_at(p)

    def to_json_dict(self) -> dict:
        return {
            "residues_r": list(self.residues_r),
            "residues_q": [z.real for z in self.residues_q],
            "residues_fixed_r": list(self.residues_fixed_r),
            "solution_space_dim": self.solution_space_dim,
            "rank": self.rank,
            "condition_number": self.condition_number,
            "system_residual": self.system_residual,
            "certificate": dict(self.certificate),
            "components": [
                {
                    "component": c.component_id,
                    "poles": [str(p) for p in c.poles],
                    "residues": [a.real for a in c.residues],
                    "numerator": [a.real for a in c.numerator],
                    "denominator": [a.real for a in c.denominator],
                }
                for c in self.components
            ],
        }


def _poles_by_component(S: SpectralCurveData) -> Dict[int, List[PointOnCurve]]:
    poles: Dict[int, List[PointOnCurve]] = {c.id: [] for c in S.components}
    marked: List[PointOnCurve] = list(S.Q) + list(S.R)
    marked += [S.sigma(S.R[a]) for a in range(S.l)]
    for node in S.nodes:
        marked += [node.branch_a, node.branch_b]
    for p in marked:
        if p not in poles[p.component_id]:
            poles[p.component_id].append(p)
    return poles


def _zeros_by_component(S: SpectralCurveData) -> Dict[int, List[PointOnCurve]]:
    zeros: Dict[int, List[PointOnCurve]] = {c.id: [] for c in S.components}
    for e in S.P:
        zeros[e.point.component_id].append(e.point)
    for g in S.gamma:
        for p in (g, S.sigma(g)):
            if p not in zeros[p.component_id]:
                zeros[p.component_id].append(p)
    return zeros


class _ResidueSystem:
    """Linear conditions on the finite residues of every component."""

    def __init__(self, S: SpectralCurveData) -> None:
        self.S = S
        self.poles = _poles_by_component(S)
        self.index: Dict[PointOnCurve, int] = {}
        for cid in sorted(self.poles):
            for p in self.poles[cid]:
                if not p.is_infinite:
                    self.index[p] = len(self.index)
        self.rows: List[ComplexArray] = []
        self.rhs: List[complex] = []

    @property
    def size(self) -> int:
        return len(self.index)

    def residue_row(self, p: PointOnCurve) -> ComplexArray:
        row = np.zeros(self.size, dtype=np.complex128)
        if p.is_infinite:
            if p in self.poles[p.component_id]:
                for q in self.poles[p.component_id]:
                    if not q.is_infinite:
                        row[self.index[q]] = -1.0
        elif p in self.index:
            row[self.index[p]] = 1.0
        return row

    def add(self, row: ComplexArray, value: complex = 0j) -> None:
        self.rows.append(row)
        self.rhs.append(value)

    def build(self) -> None:
        S = self.S
        for q in S.Q:
            self.add(self.residue_row(q), 1.0)
        for node in S.nodes:
            self.add(self.residue_row(node.branch_a) + self.residue_row(node.branch_b))
        seen: set[frozenset[PointOnCurve]] = set()
        for cid, plist in self.poles.items():
            for p in plist:
                pair = frozenset((p, S.sigma(p)))
                if len(pair) == 2 and pair not in seen:
                    seen.add(pair)
                    self.add(self.residue_row(p) - self.residue_row(S.sigma(p)))
        for cid, plist in self.poles.items():
            inf = PointOnCurve.infinity(cid)
            if inf not in plist:
                self.add(self._sum_row(cid))
        for cid, zlist in _zeros_by_component(S).items():
            for zeta in zlist:
                if zeta.is_infinite:
                    self.add(self._moment_row(cid))
                else:
                    self.add(self._zero_row(cid, zeta.z))

    def _finite(self, cid: int) -> List[PointOnCurve]:
        return [p for p in self.poles[cid] if not p.is_infinite]

    def _sum_row(self, cid: int) -> ComplexArray:
        row = np.zeros(self.size, dtype=np.complex128)
        for p in self._finite(cid):
            row[self.index[p]] = 1.0
        return row

    def _moment_row(self, cid: int) -> ComplexArray:
        row = np.zeros(self.size, dtype=np.complex128)
        for p in self._finite(cid):
            row[self.index[p]] = p.z
        return row

    def _zero_row(self, cid: int, zeta: complex) -> ComplexArray:
        row = np.zeros(self.size, dtype=np.complex128)
        for p in self._finite(cid):
            row[self.index[p]] = 1.0 / (zeta - p.z)
        return row


def build_omega(S: SpectralCurveData, tol: Optional[Tolerances] = None) -> OmegaData:
    """Solve for Omega and certify residues, evenness and per-component residue sums.

    Raises :class:`OmegaNotFound` when the conditions are inconsistent or force a
    required pole to vanish.
    """
    tol = tol or DEFAULT_TOLERANCES
    system = _ResidueSystem(S)
    system.build()
    if system.size == 0:
        raise OmegaNotFound("curve carries no poles for Omega")

    A = np.vstack(system.rows)
    b = np.asarray(system.rhs, dtype=np.complex128)
    U, s, Vh = svd(A, full_matrices=False)
    cutoff = tol.certification * (s[0] if s.size else 1.0)
    rank = int(np.sum(s > cutoff))
    if rank == 0:
        raise OmegaNotFound("residue conditions are degenerate")
    coeffs = (U[:, :rank].conj().T @ b) / s[:rank]
    x = Vh[:rank].conj().T @ coeffs
    residual = float(np.linalg.norm(A @ x - b) / max(1.0, float(np.linalg.norm(b))))
    if residual > tol.certification:
        raise OmegaNotFound(f"residue conditions are inconsistent (residual {residual:.3e})")

    comps: List[ComponentDifferential] = []
    for c in S.components:
        plist = system.poles[c.id]
        res = tuple(complex(system.residue_row(p) @ x) for p in plist)
        comps.append(ComponentDifferential(c.id, tuple(plist), res))
    omega_parts = {d.component_id: d for d in comps}

    def res_at(p: PointOnCurve) -> complex:
        return omega_parts[p.component_id].residue_at(p)

    cert: Dict[str, float] = {}
    cert["q_residue_error"] = max(abs(res_at(q) - 1.0) for q in S.Q) if S.Q else 0.0
    cert["r_pair_error"] = max(
        (abs(res_at(S.R[a]) - res_at(S.sigma(S.R[a]))) for a in range(S.l)), default=0.0
    )
    cert["node_residue_error"] = max(
        (abs(res_at(nd.branch_a) + res_at(nd.branch_b)) for nd in S.nodes), default=0.0
    )
    cert["component_residue_sum"] = max(abs(d.residue_sum()) for d in comps)
    cert["evenness_error"] = evenness_residual(S, comps)
    cert["imaginary_part"] = float(np.max(np.abs(x.imag))) if x.size else 0.0

    for key, limit in (
        ("q_residue_error", tol.certification),
        ("r_pair_error", tol.certification),
        ("node_residue_error", tol.certification),
        ("component_residue_sum", tol.residue_sum),
        ("evenness_error", tol.certification),
        ("imaginary_part", tol.realness),
    ):
        if cert[key] > limit:
            raise OmegaNotFound(f"Omega certificate failed: {key} = {cert[key]:.3e}")

    r = tuple(res_at(S.R[a]).real for a in range(S.l))
    r_fixed = tuple(res_at(S.R[k]).real for k in range(S.l, len(S.R)))
    for a, value in enumerate(r + r_fixed):
        if abs(value) <= tol.certification:
            raise OmegaNotFound(f"Omega has no pole at R{a + 1}")

    nonzero = s[s > cutoff]
    return OmegaData(
        components=tuple(comps),
        residues_r=r,
        residues_q=tuple(res_at(q) for q in S.Q),
        residues_fixed_r=r_fixed,
        solution_space_dim=int(system.size - rank),
        rank=rank,
        condition_number=float(nonzero[0] / nonzero[-1]),
        system_residual=residual,
        certificate=cert,
    )


def evenness_residual(
    S: SpectralCurveData,
    parts: Sequence[ComponentDifferential],
    samples: Sequence[float] = (0.37, -1.3, 2.9, 0.11),
) -> float:
    """Max relative mismatch of ``Omega`` and ``sigma^* Omega`` at sample points."""
    by_id = {d.component_id: d for d in parts}
    worst = 0.0
    for c in S.components:
        here = by_id[c.id]
        there = by_id[c.sigma_partner]
        for z in samples:
            w = complex(z) + 0.21j
            if c.self_paired:
                pulled = -there.value(-w) if c.sigma_is_negation else there.value(w)
            else:
                pulled = there.value(w)
            mine = here.value(w)
            scale = max(abs(mine), abs(pulled), 1e-300)
            worst = max(worst, abs(mine - pulled) / scale)
    return worst


def residues(omega: OmegaData) -> List[float]:
    """The residues r_1..r_l of Omega at the movable normalization points."""
    return list(omega.residues_r)
