from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from ribnet.ba.system import BakerAkhiezerSystem, BASolution
from ribnet.config.tolerances import DEFAULT_TOLERANCES, Tolerances
from ribnet.core.errors import DegenerateGrid, PreconditionViolated, SingularSystem
from ribnet.curve.model import SpectralCurveData
from ribnet.net.grid import Grid, default_grid
from ribnet.utils.parallel import parallel_map
from ribnet.utils.progress import Progress

FloatArray = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class OrthogonalNet:
    """x(u) = (psi(u, Q_1), ..., psi(u, Q_{n+N})) sampled on a lattice.

    Arrays are indexed by flat grid point first: ``points[p, k]``,
    ``first_derivs[p, i, k]``, ``second_derivs[p, i, j, k]``. Flagged points hold NaN.
    """

    grid: Grid
    d: Tuple[float, ...]
    u: FloatArray
    points: FloatArray
    first_derivs: FloatArray
    second_derivs: FloatArray
    flags: NDArray[np.bool_]
    max_imag: float = 0.0
    solutions: Tuple[Optional[BASolution], ...] = ()
    fd_check: Dict[str, float] = field(default_factory=dict)
    label: str = ""

    @property
    def n(self) -> int:
        return int(self.u.shape[1])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def valid(self) -> NDArray[np.bool_]:
        return ~self.flags

    @property
    def flagged_fraction(self) -> float:
        return float(np.mean(self.flags)) if self.flags.size else 0.0

    def solution(self, index: int) -> BASolution:
        if not self.solutions or self.solutions[index] is None:
            raise PreconditionViolated(f"no stored solution at grid point {index}")
        sol = self.solutions[index]
        assert sol is not None
        return sol


def net_sample(sol: BASolution, S: SpectralCurveData) -> Tuple[FloatArray, FloatArray, FloatArray, float]:
    """x, dx, d2x and the largest imaginary part seen at one parameter point."""
    n, dim = S.n, S.dimension
    x = np.array([sol.value(q) for q in S.Q], dtype=np.complex128)
    dx = np.array([[sol.derivative(q, i) for q in S.Q] for i in range(n)], dtype=np.complex128)
    d2x = np.zeros((n, n, dim), dtype=np.complex128)
    for i in range(n):
        for j in range(i, n):
            d2x[i, j] = d2x[j, i] = [sol.second_derivative(q, i, j) for q in S.Q]
    imag = max(float(np.max(np.abs(a.imag))) for a in (x, dx, d2x))
    return x.real, dx.real, d2x.real, imag


def synth_net(
    S: SpectralCurveData,
    grid: Optional[Grid] = None,
    d: Optional[Sequence[float]] = None,
    *,
    tol: Optional[Tolerances] = None,
    system: Optional[BakerAkhiezerSystem] = None,
    threads: Optional[int] = None,
    progress: Optional[Progress] = None,
    seed: int = 0,
    fd_samples: int = 5,
    keep_solutions: bool = True,
    label: str = "",
) -> OrthogonalNet:
    """Sample the net of ``S`` with analytic first and second derivatives.

    Points where the Baker-Akhiezer system is singular are flagged; more than
    ``tol.degenerate_fraction`` flagged points raise :class:`DegenerateGrid`.
    """
    tol = tol or DEFAULT_TOLERANCES
    grid = grid or default_grid(S.n)
    if grid.n != S.n:
        raise PreconditionViolated(f"grid has {grid.n} axes, dataset has n = {S.n}")
    values = tuple(float(v) for v in (S.d if d is None else d))
    system = system or BakerAkhiezerSystem(S, tol)
    us = grid.points()

    def one(u: FloatArray) -> Optional[BASolution]:
        try:
            return system.solve(u, values, order=2)
        except SingularSystem:
            return None

    sols = parallel_map(one, list(us), threads=threads, progress=progress, desc=label or "synth")

    M, n, dim = us.shape[0], S.n, S.dimension
    points = np.full((M, dim), np.nan)
    first = np.full((M, n, dim), np.nan)
    second = np.full((M, n, n, dim), np.nan)
    flags = np.zeros(M, dtype=bool)
    max_imag = 0.0
    for p, sol in enumerate(sols):
        if sol is None:
            flags[p] = True
            continue
        x, dx, d2x, imag = net_sample(sol, S)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(dx)) and np.all(np.isfinite(d2x))):
            flags[p] = True
            continue
        points[p], first[p], second[p] = x, dx, d2x
        max_imag = max(max_imag, imag, sol.max_imag)

    if M and np.mean(flags) > tol.degenerate_fraction:
        raise DegenerateGrid(
            f"{int(flags.sum())} of {M} grid points are degenerate "
            f"(limit {tol.degenerate_fraction:.0%})"
        )

    net = OrthogonalNet(
        grid=grid,
        d=values,
        u=us,
        points=points,
        first_derivs=first,
        second_derivs=second,
        flags=flags,
        max_imag=max_imag,
        solutions=tuple(sols) if keep_solutions else (),
        label=label,
    )
    fd = second_derivative_check(net, S, system, tol=tol, samples=fd_samples, seed=seed)
    return replace(net, fd_check=fd)


def second_derivative_check(
    net: OrthogonalNet,
    S: SpectralCurveData,
    system: BakerAkhiezerSystem,
    *,
    tol: Optional[Tolerances] = None,
    samples: int = 5,
    seed: int = 0,
) -> Dict[str, float]:
    """Central differences of the analytic first derivatives against the stored second ones."""
    tol = tol or DEFAULT_TOLERANCES
    valid = np.flatnonzero(net.valid)
    if samples <= 0 or valid.size == 0:
        return {"samples": 0.0, "max_relative_error": 0.0}
    rng = np.random.default_rng(seed)
    picks = rng.choice(valid, size=min(samples, valid.size), replace=False)
    h = tol.gradient_step
    worst = 0.0
    for p in picks:
        u = net.u[p]
        fd = np.zeros_like(net.second_derivs[p])
        for j in range(S.n):
            e = np.zeros(S.n)
            e[j] = h
            _, dx_plus, _, _ = net_sample(system.solve(u + e, net.d, order=2), S)
            _, dx_minus, _, _ = net_sample(system.solve(u - e, net.d, order=2), S)
            fd[:, j] = (dx_plus - dx_minus) / (2 * h)
        exact = net.second_derivs[p]
        scale = max(float(np.linalg.norm(exact)), float(np.linalg.norm(fd)), 1e-300)
        worst = max(worst, float(np.linalg.norm(exact - fd)) / scale)
    return {"samples": float(len(picks)), "max_relative_error": worst}


def perturb_coordinate(
    net: OrthogonalNet,
    k: int,
    *,
    factor: float = 1.0,
    bilinear: float = 0.0,
) -> OrthogonalNet:
    """Multiply coordinate ``k`` by ``factor * (1 + bilinear * u_0 u_1)``.

    A constant factor keeps the net conjugate but breaks orthogonality; the
    bilinear factor also breaks conjugacy when n + N >= 3.
    """
    if not 0 <= k < net.dim:
        raise PreconditionViolated(f"coordinate {k} outside 0..{net.dim - 1}")
    if bilinear and net.n < 2:
        raise PreconditionViolated("bilinear perturbation needs n >= 2")
    M, n = net.u.shape
    g = np.full(M, factor)
    dg = np.zeros((M, n))
    d2g = np.zeros((M, n, n))
    if bilinear:
        u0, u1 = net.u[:, 0], net.u[:, 1]
        g = factor * (1.0 + bilinear * u0 * u1)
        dg[:, 0] = factor * bilinear * u1
        dg[:, 1] = factor * bilinear * u0
        d2g[:, 0, 1] = d2g[:, 1, 0] = factor * bilinear

    x = net.points[:, k]
    dx = net.first_derivs[:, :, k]
    d2x = net.second_derivs[:, :, :, k]
    points = net.points.copy()
    first = net.first_derivs.copy()
    second = net.second_derivs.copy()
    points[:, k] = g * x
    first[:, :, k] = dg * x[:, None] + g[:, None] * dx
    second[:, :, :, k] = (
        d2g * x[:, None, None]
        + dg[:, :, None] * dx[:, None, :]
        + dg[:, None, :] * dx[:, :, None]
        + g[:, None, None] * d2x
    )
    return replace(
        net,
        points=points,
        first_derivs=first,
        second_derivs=second,
        solutions=(),
        label=f"{net.label}~perturbed",
    )


def valid_indices(nets: List[OrthogonalNet]) -> NDArray[np.int64]:
    """Grid indices unflagged in every net (nets must share one grid)."""
    mask = np.ones(nets[0].flags.shape, dtype=bool)
    for net in nets:
        mask &= net.valid
    return np.flatnonzero(mask)
