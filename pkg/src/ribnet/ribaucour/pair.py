"""Ribaucour pairs x, x_alpha obtained by swapping R_alpha with sigma(R_alpha).

All identities are checked in the form valid for arbitrary real d, with d_alpha in
place of 1:

- reflection:   d_i x_alpha = lambda_i (d_i x - 2 (d_i x . dx)/(dx . dx) dx)
- scalar up:    d_i x . dx + r_alpha d_i phi_alpha (phi_alpha_alpha - d_alpha) = 0
- scalar down:  dx . dx - 2 r_alpha (phi_alpha - d_alpha)(phi_alpha_alpha - d_alpha) = 0
- coefficient:  d_i phi_alpha / (phi_alpha - d_alpha) = -2 (d_i x . dx)/(dx . dx)

where dx = x_alpha - x, phi_alpha = psi(sigma R_alpha) and phi_alpha_alpha = psi_alpha(R_alpha).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from ribnet.ba.system import BakerAkhiezerSystem, BASolution
from ribnet.config.tolerances import DEFAULT_TOLERANCES, Tolerances
from ribnet.core.errors import DegeneratePoint, PreconditionViolated
from ribnet.curve.model import PointOnCurve, SpectralCurveData
from ribnet.net.grid import Grid
from ribnet.net.reports import ResidualStats, conjugacy_report, orthogonality_report
from ribnet.net.synth import OrthogonalNet, synth_net, valid_indices
from ribnet.omega.differential import OmegaData, build_omega
from ribnet.ribaucour.swap import swap_data
from ribnet.utils.progress import Progress

FloatArray = NDArray[np.float64]


def _rel(a: float, b: float, *scales: float) -> float:
    """|a - b| relative to the largest magnitude among a, b and ``scales``."""
    scale = max(abs(a), abs(b), *(abs(s) for s in scales))
    return 0.0 if scale == 0 else abs(a - b) / scale


@dataclass(frozen=True)
class PairQuantities:
    """Everything the pair identities need at one parameter point."""

    x: FloatArray
    x_alpha: FloatArray
    dx: FloatArray
    dx_alpha: FloatArray
    xi0: NDArray[np.complex128]
    xi0_alpha: NDArray[np.complex128]
    phi: float
    phi_alpha_alpha: float
    dphi: FloatArray
    d_alpha: float
    r: float

    @property
    def delta(self) -> FloatArray:
        return self.x_alpha - self.x

    def degenerate(self, tol: Tolerances) -> bool:
        dd = float(self.delta @ self.delta)
        return (
            dd < tol.delta_min
            or abs(self.phi - self.d_alpha) < tol.phi_min
            or bool(np.any(np.abs(self.xi0) == 0))
        )


def pair_quantities(
    S: SpectralCurveData,
    alpha: int,
    sol: BASolution,
    sol_alpha: BASolution,
    r: float,
) -> PairQuantities:
    """Collect x, x_alpha, xi_0, phi and their u-derivatives from two solved systems."""
    a = alpha - 1
    if sol.first is None or sol_alpha.first is None:
        raise PreconditionViolated("pair quantities need first derivatives")
    n = S.n
    here: PointOnCurve = S.physical_R(a)
    there: PointOnCurve = S.opposite_R(a)
    x = np.array([sol.value(q) for q in S.Q]).real
    x_alpha = np.array([sol_alpha.value(q) for q in S.Q]).real
    dx = np.array([[sol.derivative(q, i) for q in S.Q] for i in range(n)]).real
    dx_alpha = np.array([[sol_alpha.derivative(q, i) for q in S.Q] for i in range(n)]).real
    return PairQuantities(
        x=x,
        x_alpha=x_alpha,
        dx=dx,
        dx_alpha=dx_alpha,
        xi0=np.array([sol.leading(i)[0] for i in range(n)]),
        xi0_alpha=np.array([sol_alpha.leading(i)[0] for i in range(n)]),
        phi=sol.value(there).real,
        phi_alpha_alpha=sol_alpha.value(here).real,
        dphi=np.array([sol.derivative(there, i) for i in range(n)]).real,
        d_alpha=float(sol.d[a]),
        r=float(r),
    )


def pointwise_residuals(q: PairQuantities) -> Dict[str, FloatArray]:
    """Relative residual of each pair identity, one entry per direction where it applies."""
    delta = q.delta
    dd = float(delta @ delta)
    nd = float(np.sqrt(dd))
    n = q.dx.shape[0]
    lam = (q.xi0_alpha / q.xi0).real
    out: Dict[str, FloatArray] = {k: np.zeros(n) for k in (
        "ribtrans", "lambda", "reflection", "scalar_up", "coef", "connection"
    )}
    lam_fit = np.zeros(n)
    a_phi = q.phi - q.d_alpha
    a_phaa = q.phi_alpha_alpha - q.d_alpha
    for i in range(n):
        di, dai = q.dx[i], q.dx_alpha[i]
        ndi = float(np.linalg.norm(di))
        h = di - 2.0 * (di @ delta) / dd * delta
        hh = float(h @ h)
        lam_fit[i] = 0.0 if hh == 0 else float(dai @ h) / hh
        err = float(np.linalg.norm(dai - lam[i] * h))
        scale = max(float(np.linalg.norm(dai)), abs(lam[i]) * float(np.sqrt(hh)))
        out["ribtrans"][i] = 0.0 if scale == 0 else err / scale
        out["lambda"][i] = _rel(lam[i], lam_fit[i])
        out["reflection"][i] = _rel(float(np.linalg.norm(dai)), abs(lam[i]) * ndi)
        up = float(di @ delta)
        out["scalar_up"][i] = _rel(up, -q.r * q.dphi[i] * a_phaa, ndi * nd)
        out["coef"][i] = _rel(q.dphi[i] / a_phi, -2.0 * up / dd, 2.0 * ndi / nd)
        lhs = complex(q.xi0[i]) * dai - complex(q.xi0_alpha[i]) * di
        rhs = complex(q.xi0_alpha[i]) * q.dphi[i] / a_phi * delta
        c_scale = max(
            float(np.linalg.norm(complex(q.xi0[i]) * dai)),
            float(np.linalg.norm(complex(q.xi0_alpha[i]) * di)),
            float(np.linalg.norm(rhs)),
        )
        out["connection"][i] = 0.0 if c_scale == 0 else float(np.linalg.norm(lhs - rhs)) / c_scale
    down = 2.0 * q.r * a_phi * a_phaa
    out["scalar_down"] = np.array([_rel(dd, down)])
    out["lambda_ratio"] = lam
    out["lambda_fit"] = lam_fit
    out["lambda_imag"] = np.abs((q.xi0_alpha / q.xi0).imag) / np.maximum(np.abs(lam), 1e-300)
    return out


_THRESHOLDS = {
    "ribtrans": "ribaucour",
    "lambda": "ribaucour",
    "reflection": "ribaucour",
    "scalar_up": "lemma",
    "scalar_down": "lemma",
    "coef": "lemma",
    "connection": "lemma",
}


@dataclass(frozen=True, eq=False)
class RibaucourReport:
    alpha: int
    u: FloatArray
    lambda_ratio: FloatArray
    lambda_fit: FloatArray
    residual_ribtrans: FloatArray
    residual_lambda: FloatArray
    residual_reflection: FloatArray
    residual_scalar_up: FloatArray
    residual_scalar_down: FloatArray
    residual_coef: FloatArray
    residual_connection: FloatArray
    phi_alpha: FloatArray
    phi_alpha_alpha: FloatArray
    degenerate: NDArray[np.bool_]
    flagged: NDArray[np.bool_]
    lambda_max_imag: float = 0.0
    identity: bool = False
    stats: Dict[str, ResidualStats] = field(default_factory=dict)
    net_checks: Dict[str, bool] = field(default_factory=dict)
    realness_limit: float = DEFAULT_TOLERANCES.realness

    @property
    def passed(self) -> bool:
        if self.identity:
            return True
        return (
            all(s.passed for s in self.stats.values())
            and all(self.net_checks.values())
            and self.lambda_max_imag <= self.realness_limit
        )

    @property
    def degenerate_count(self) -> int:
        return int(np.sum(self.degenerate))

    @classmethod
    def identity_pair(cls, alpha: int) -> "RibaucourReport":
        empty = np.zeros(0)
        none = np.zeros(0, dtype=bool)
        return cls(alpha, np.zeros((0, 0)), empty, empty, empty, empty, empty, empty,
                   empty, empty, empty, empty, empty, none, none, identity=True)

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "identity": self.identity,
            "passed": self.passed,
            "degenerate_points": self.degenerate_count,
            "flagged_points": int(np.sum(self.flagged)),
            "lambda_max_imag": self.lambda_max_imag,
            "residuals": {k: s.to_json_dict() for k, s in self.stats.items()},
            "nets": dict(self.net_checks),
        }


def ribaucour_pair(
    S: SpectralCurveData,
    alpha: int,
    grid: Optional[Grid] = None,
    *,
    partner: Optional[SpectralCurveData] = None,
    omega: Optional[OmegaData] = None,
    net: Optional[OrthogonalNet] = None,
    partner_net: Optional[OrthogonalNet] = None,
    tol: Optional[Tolerances] = None,
    threads: Optional[int] = None,
    progress: Optional[Progress] = None,
    seed: int = 0,
) -> RibaucourReport:
    """Certify that the nets of ``S`` and of its alpha-swap form a Ribaucour pair.

    ``partner`` defaults to ``swap_data(S, alpha)``; identical data short-circuits
    to the identity pair. Nets can be passed in to reuse solved grids.
    """
    tol = tol or DEFAULT_TOLERANCES
    expected = swap_data(S, alpha)
    if partner is not None and partner == S:
        return RibaucourReport.identity_pair(alpha)
    if partner is not None and partner != expected:
        raise PreconditionViolated(f"partner data is not the swap of R{alpha}")
    partner = expected
    omega = omega or build_omega(S, tol)
    r = omega.residues_r[alpha - 1]

    if net is None:
        net = synth_net(S, grid, tol=tol, threads=threads, progress=progress, seed=seed,
                        label="x")
    if partner_net is None:
        partner_net = synth_net(partner, net.grid, S.d, tol=tol, threads=threads,
                                progress=progress, seed=seed, label=f"x_{alpha}")
    if net.grid != partner_net.grid:
        raise PreconditionViolated("pair nets must share one grid")

    M, n = net.u.shape
    shared = set(valid_indices([net, partner_net]).tolist())
    flagged = np.array([p not in shared for p in range(M)])
    degenerate = np.zeros(M, dtype=bool)
    per_dir = {k: np.full((M, n), np.nan) for k in
               ("ribtrans", "lambda", "reflection", "scalar_up", "coef", "connection")}
    scalar_down = np.full(M, np.nan)
    lam_ratio = np.full((M, n), np.nan)
    lam_fit = np.full((M, n), np.nan)
    phi = np.full(M, np.nan)
    phi_aa = np.full(M, np.nan)
    lam_imag = 0.0
    for p in sorted(shared):
        q = pair_quantities(S, alpha, net.solution(p), partner_net.solution(p), r)
        phi[p], phi_aa[p] = q.phi, q.phi_alpha_alpha
        if q.degenerate(tol):
            degenerate[p] = True
            continue
        res = pointwise_residuals(q)
        for k in per_dir:
            per_dir[k][p] = res[k]
        scalar_down[p] = res["scalar_down"][0]
        lam_ratio[p], lam_fit[p] = res["lambda_ratio"], res["lambda_fit"]
        lam_imag = max(lam_imag, float(np.max(res["lambda_imag"])))

    stats: Dict[str, ResidualStats] = {}
    for k, arr in per_dir.items():
        worst = np.max(arr, axis=1)
        stats[k] = ResidualStats.from_values(worst, net.u, getattr(tol, _THRESHOLDS[k]))
    stats["scalar_down"] = ResidualStats.from_values(scalar_down, net.u, tol.lemma)

    net_checks = {
        "x_orthogonal": orthogonality_report(net, tol).passed,
        "x_conjugate": conjugacy_report(net, tol).passed,
        "x_alpha_orthogonal": orthogonality_report(partner_net, tol).passed,
        "x_alpha_conjugate": conjugacy_report(partner_net, tol).passed,
    }
    return RibaucourReport(
        alpha=alpha,
        u=net.u,
        lambda_ratio=lam_ratio,
        lambda_fit=lam_fit,
        residual_ribtrans=per_dir["ribtrans"],
        residual_lambda=per_dir["lambda"],
        residual_reflection=per_dir["reflection"],
        residual_scalar_up=per_dir["scalar_up"],
        residual_scalar_down=scalar_down,
        residual_coef=per_dir["coef"],
        residual_connection=per_dir["connection"],
        phi_alpha=phi,
        phi_alpha_alpha=phi_aa,
        degenerate=degenerate,
        flagged=flagged,
        lambda_max_imag=lam_imag,
        stats=stats,
        net_checks=net_checks,
        realness_limit=tol.realness,
    )


@dataclass(frozen=True)
class LemmaReport:
    alpha: int
    u: Tuple[float, ...]
    residual_connection: float
    residual_scalar_up: float
    residual_scalar_down: float
    residual_coef: float
    residual_phi_values: float
    sample_points: Tuple[PointOnCurve, ...]
    vanishing: bool = False
    threshold: float = DEFAULT_TOLERANCES.lemma

    @property
    def passed(self) -> bool:
        return bool(max(
            self.residual_connection,
            self.residual_scalar_up,
            self.residual_scalar_down,
            self.residual_coef,
            self.residual_phi_values,
        ) <= self.threshold)

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "u": list(self.u),
            "residual_connection": self.residual_connection,
            "residual_scalar_up": self.residual_scalar_up,
            "residual_scalar_down": self.residual_scalar_down,
            "residual_coef": self.residual_coef,
            "residual_phi_values": self.residual_phi_values,
            "vanishing": self.vanishing,
            "passed": self.passed,
        }


def random_regular_points(
    S: SpectralCurveData, count: int, rng: np.random.Generator, *, spread: float = 3.0
) -> List[PointOnCurve]:
    """Real points away from gamma, the essential points and the node branches."""
    avoid = [g for g in S.gamma] + [b for nd in S.nodes for b in (nd.branch_a, nd.branch_b)]
    out: List[PointOnCurve] = []
    while len(out) < count:
        c = S.components[int(rng.integers(len(S.components)))]
        z = float(rng.uniform(-spread, spread))
        p = PointOnCurve.at(c.id, z)
        if all(
            a.component_id != c.id or a.is_infinite or abs(a.z - z) > 1e-2 for a in avoid
        ):
            out.append(p)
    return out


def lemma_identities(
    S: SpectralCurveData,
    alpha: int,
    u: Tuple[float, ...],
    *,
    d: Optional[Tuple[float, ...]] = None,
    omega: Optional[OmegaData] = None,
    points: int = 20,
    seed: int = 0,
    tol: Optional[Tolerances] = None,
) -> LemmaReport:
    """Connection, scalar-up/down, coefficient and Phi-value identities at one u.

    Phi_{i,alpha} = xi^i_0 d_i psi_alpha - xi^i_{0,alpha} d_i psi is evaluated at
    ``points`` random real points of the curve for every direction i.
    """
    tol = tol or DEFAULT_TOLERANCES
    values = tuple(float(v) for v in (S.d if d is None else d))
    omega = omega or build_omega(S, tol)
    partner = swap_data(S, alpha)
    a = alpha - 1
    sol = BakerAkhiezerSystem(S, tol).solve(u, values, order=1)
    sol_a = BakerAkhiezerSystem(partner, tol).solve(u, values, order=1)
    rng = np.random.default_rng(seed)
    sample = random_regular_points(S, points, rng)

    if not any(values):
        worst = 0.0
        for p in sample:
            worst = max(worst, abs(sol.value(p)), abs(sol_a.value(p)))
            worst = max(worst, *(abs(sol.derivative(p, i)) for i in range(S.n)))
        worst = float(worst)
        return LemmaReport(alpha, tuple(u), worst, worst, worst, worst, worst,
                           tuple(sample), vanishing=True, threshold=tol.lemma)

    q = pair_quantities(S, alpha, sol, sol_a, omega.residues_r[a])
    if q.degenerate(tol):
        raise DegeneratePoint(f"pair degenerates at u={list(u)} (dx.dx or phi - d too small)")
    res = pointwise_residuals(q)
    a_phi = q.phi - q.d_alpha

    typical = [
        max(abs(q.xi0[i]) * float(np.linalg.norm(q.dx_alpha[i])),
            abs(q.xi0_alpha[i]) * float(np.linalg.norm(q.dx[i])))
        for i in range(S.n)
    ]
    connection = 0.0
    for p in sample:
        psi, psi_a = sol.value(p), sol_a.value(p)
        for i in range(S.n):
            left = q.xi0[i] * sol_a.derivative(p, i)
            right = q.xi0_alpha[i] * sol.derivative(p, i)
            rhs = q.xi0_alpha[i] * q.dphi[i] / a_phi * (psi_a - psi)
            scale = max(abs(left), abs(right), abs(rhs), typical[i])
            if scale > 0:
                connection = max(connection, float(abs(left - right - rhs) / scale))

    def Phi(point: PointOnCurve, i: int) -> complex:
        return complex(q.xi0[i] * sol_a.derivative(point, i) - q.xi0_alpha[i] * sol.derivative(point, i))

    here, there = S.physical_R(a), S.opposite_R(a)
    phi_values = 0.0
    for i in range(S.n):
        expect_here = complex(q.xi0[i] * sol_a.derivative(here, i))
        expect_there = complex(-q.xi0_alpha[i] * q.dphi[i])
        scale = max(abs(expect_here), abs(expect_there), typical[i], 1e-300)
        phi_values = max(phi_values, float(abs(Phi(here, i) - expect_here) / scale))
        phi_values = max(phi_values, float(abs(Phi(there, i) - expect_there) / scale))
        for k in range(len(S.R)):
            if k != a:
                phi_values = max(phi_values, float(abs(Phi(S.physical_R(k), i)) / scale))

    return LemmaReport(
        alpha=alpha,
        u=tuple(float(v) for v in u),
        residual_connection=float(max(connection, float(np.max(res["connection"])))),
        residual_scalar_up=float(np.max(res["scalar_up"])),
        residual_scalar_down=float(res["scalar_down"][0]),
        residual_coef=float(np.max(res["coef"])),
        residual_phi_values=float(phi_values),
        sample_points=tuple(sample),
        threshold=tol.lemma,
    )
