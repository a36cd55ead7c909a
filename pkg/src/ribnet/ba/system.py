"""Baker-Akhiezer functions of a nodal rational curve.

On every component the rational part of psi is ``w0 + sum_m w_m b_m(z)`` with
``b_m = 1/(z - gamma_m)`` (``b_m = z`` when gamma_m sits at infinity). On the
component of P_j it is multiplied by ``exp(rho_j z u_j)``. Node matching and the
normalization values at the physical R points give a square system in the
stacked coefficients; only entries coming from points on P-components depend on u.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import lu_factor, lu_solve

from ribnet.config.tolerances import DEFAULT_TOLERANCES, Tolerances
from ribnet.core.errors import (
    DimensionMismatch,
    EvalAtEssentialSingularity,
    EvalAtPole,
    SingularSystem,
)
from ribnet.curve.model import PointOnCurve, SpectralCurveData

ComplexArray = NDArray[np.complex128]


@dataclass(frozen=True)
class Block:
    """Coefficient block of one component: ``[w0, w_1, ..., w_m]``."""

    component_id: int
    start: int
    gamma: Tuple[PointOnCurve, ...]
    essential: Optional[int] = None
    rho: float = 0.0

    @property
    def size(self) -> int:
        return 1 + len(self.gamma)

    @property
    def stop(self) -> int:
        return self.start + self.size

    def check(self, p: PointOnCurve) -> None:
        if p in self.gamma:
            raise EvalAtPole(f"{p} is a pole of psi")
        if self.essential is not None and p.is_infinite:
            raise EvalAtEssentialSingularity(f"{p} is the essential point P{self.essential + 1}")

    def basis(self, p: PointOnCurve) -> ComplexArray:
        self.check(p)
        out = np.ones(self.size, dtype=np.complex128)
        for m, g in enumerate(self.gamma, start=1):
            if g.is_infinite:
                out[m] = p.z
            else:
                out[m] = 0j if p.is_infinite else 1.0 / (p.z - g.z)
        return out

    def k(self, p: PointOnCurve) -> complex:
        """Local parameter ``k_j = rho_j z``; zero off P-components."""
        if self.essential is None:
            return 0j
        return self.rho * p.z


@dataclass(frozen=True)
class SystemLayout:
    blocks: Tuple[Block, ...]
    n: int

    @property
    def size(self) -> int:
        return sum(b.size for b in self.blocks)

    def block(self, component_id: int) -> Block:
        for b in self.blocks:
            if b.component_id == component_id:
                return b
        raise KeyError(component_id)

    def essential_block(self, j: int) -> Block:
        for b in self.blocks:
            if b.essential == j:
                return b
        raise KeyError(j)

    @classmethod
    def from_data(cls, S: SpectralCurveData) -> "SystemLayout":
        essential = {e.point.component_id: (j, e.rho) for j, e in enumerate(S.P)}
        blocks: List[Block] = []
        start = 0
        for c in S.components:
            gamma = tuple(g for g in S.gamma if g.component_id == c.id)
            j, rho = essential.get(c.id, (None, 0.0))
            blocks.append(Block(c.id, start, gamma, j, float(rho)))
            start += 1 + len(gamma)
        return cls(tuple(blocks), S.n)


@dataclass(frozen=True, eq=False)
class BASolution:
    """psi(u, .) at one parameter point, optionally with analytic u-derivatives.

    ``first[i]`` and ``second[i, k]`` are the derivatives of the stacked
    coefficient vector in the directions u_i and u_i u_k.
    """

    layout: SystemLayout
    u: Tuple[float, ...]
    d: Tuple[float, ...]
    coefficients: ComplexArray
    condition_number: float
    first: Optional[ComplexArray] = None
    second: Optional[ComplexArray] = None

    def prefactor(self, p: PointOnCurve) -> complex:
        b = self.layout.block(p.component_id)
        b.check(p)
        if b.essential is None:
            return 1 + 0j
        return cmath.exp(b.k(p) * self.u[b.essential])

    @property
    def exponential_prefactors(self) -> Dict[int, Tuple[int, float, float]]:
        """component id -> (j, rho_j, u_j) of the factor ``exp(rho_j z u_j)``."""
        return {
            b.component_id: (b.essential, b.rho, self.u[b.essential])
            for b in self.layout.blocks
            if b.essential is not None
        }

    def _rational(self, p: PointOnCurve, coeffs: ComplexArray) -> complex:
        b = self.layout.block(p.component_id)
        return complex(b.basis(p) @ coeffs[b.start : b.stop])

    def value(self, p: PointOnCurve) -> complex:
        return self.prefactor(p) * self._rational(p, self.coefficients)

    def derivative(self, p: PointOnCurve, i: int) -> complex:
        if self.first is None:
            raise ValueError("solution was computed without first derivatives")
        b = self.layout.block(p.component_id)
        E = self.prefactor(p)
        f = self._rational(p, self.coefficients)
        f_i = self._rational(p, self.first[i])
        dE = b.k(p) * E if b.essential == i else 0j
        return dE * f + E * f_i

    def second_derivative(self, p: PointOnCurve, i: int, k: int) -> complex:
        if self.first is None or self.second is None:
            raise ValueError("solution was computed without second derivatives")
        b = self.layout.block(p.component_id)
        E = self.prefactor(p)
        kz = b.k(p)
        f = self._rational(p, self.coefficients)
        f_i = self._rational(p, self.first[i])
        f_k = self._rational(p, self.first[k])
        f_ik = self._rational(p, self.second[i, k])
        dE_i = kz * E if b.essential == i else 0j
        dE_k = kz * E if b.essential == k else 0j
        dE_ik = kz * kz * E if b.essential == i == k else 0j
        return dE_ik * f + dE_i * f_k + dE_k * f_i + E * f_ik

    def leading(self, j: int) -> Tuple[complex, complex]:
        """(xi_0, xi_1) of the expansion ``exp(k_j u_j)(xi_0 + xi_1/k_j + ...)`` at P_j."""
        b = self.layout.essential_block(j)
        w = self.coefficients[b.start : b.stop]
        return complex(w[0]), complex(b.rho * np.sum(w[1:]))

    def leading_derivative(self, j: int, i: int) -> complex:
        """d xi_0^j / d u_i."""
        if self.first is None:
            raise ValueError("solution was computed without first derivatives")
        b = self.layout.essential_block(j)
        return complex(self.first[i, b.start])

    @property
    def max_imag(self) -> float:
        arrays = [self.coefficients] + [a for a in (self.first, self.second) if a is not None]
        return max(float(np.max(np.abs(a.imag))) if a.size else 0.0 for a in arrays)


@dataclass(frozen=True, eq=False)
class BADerivative:
    """d/du_i of psi: coefficient derivatives plus pointwise evaluation."""

    solution: BASolution
    direction: int

    @property
    def coefficients(self) -> ComplexArray:
        assert self.solution.first is not None
        return self.solution.first[self.direction]

    def value(self, p: PointOnCurve) -> complex:
        return self.solution.derivative(p, self.direction)

    def leading(self, j: int) -> complex:
        return self.solution.leading_derivative(j, self.direction)


class BakerAkhiezerSystem:
    """Precomputed linear system of one dataset; ``solve`` runs per parameter point."""

    def __init__(self, S: SpectralCurveData, tol: Optional[Tolerances] = None) -> None:
        self.S = S
        self.tol = tol or DEFAULT_TOLERANCES
        self.layout = SystemLayout.from_data(S)
        self.n_nodes = len(S.nodes)
        self.n_rows = self.n_nodes + len(S.R)
        size = self.layout.size
        if self.n_rows != size:
            raise DimensionMismatch(
                f"Baker-Akhiezer system is {self.n_rows}x{size}; "
                f"check #gamma = g+l+N-1 and the node list"
            )

        rows: List[Tuple[int, PointOnCurve, float]] = []
        for r, node in enumerate(S.nodes):
            rows.append((r, node.branch_a, 1.0))
            rows.append((r, node.branch_b, -1.0))
        for a in range(len(S.R)):
            rows.append((self.n_nodes + a, S.physical_R(a), 1.0))

        self._static = np.zeros((size, size), dtype=np.complex128)
        term_rows: List[int] = []
        term_vecs: List[ComplexArray] = []
        term_j: List[int] = []
        term_k: List[complex] = []
        for r, p, sign in rows:
            b = self.layout.block(p.component_id)
            vec = np.zeros(size, dtype=np.complex128)
            vec[b.start : b.stop] = sign * b.basis(p)
            if b.essential is None:
                self._static[r] += vec
            else:
                term_rows.append(r)
                term_vecs.append(vec)
                term_j.append(b.essential)
                term_k.append(b.k(p))
        self._rows = np.asarray(term_rows, dtype=np.int64)
        self._vecs = (
            np.vstack(term_vecs) if term_vecs else np.zeros((0, size), dtype=np.complex128)
        )
        self._j = np.asarray(term_j, dtype=np.int64)
        self._k = np.asarray(term_k, dtype=np.complex128)

    @property
    def exponential_rows(self) -> List[int]:
        return sorted(set(int(r) for r in self._rows))

    def _check_u(self, u: Sequence[float]) -> NDArray[np.float64]:
        arr = np.asarray(u, dtype=np.float64).reshape(-1)
        if arr.shape[0] != self.S.n:
            raise DimensionMismatch(f"u has length {arr.shape[0]}, expected n = {self.S.n}")
        return arr

    def _exp(self, u: NDArray[np.float64]) -> ComplexArray:
        return np.exp(self._k * u[self._j]) if self._j.size else np.zeros(0, np.complex128)

    def _place(self, factors: ComplexArray) -> ComplexArray:
        out = np.zeros_like(self._static)
        np.add.at(out, self._rows, factors[:, None] * self._vecs)
        return out

    def matrix(self, u: Sequence[float]) -> ComplexArray:
        arr = self._check_u(u)
        return self._static + self._place(self._exp(arr))

    def derivative_matrix(self, u: Sequence[float], i: int, order: int = 1) -> ComplexArray:
        """d^order A / du_i^order; mixed derivatives in distinct directions vanish."""
        arr = self._check_u(u)
        mask = (self._j == i).astype(np.float64)
        return self._place(mask * self._k**order * self._exp(arr))

    def rhs(self, d: Optional[Sequence[float]] = None) -> ComplexArray:
        values = self.S.d if d is None else tuple(d)
        if len(values) != len(self.S.R):
            raise DimensionMismatch(f"d has length {len(values)}, expected l+N = {len(self.S.R)}")
        b = np.zeros(self.n_rows, dtype=np.complex128)
        b[self.n_nodes :] = np.asarray(values, dtype=np.float64)
        return b

    def solve(
        self, u: Sequence[float], d: Optional[Sequence[float]] = None, *, order: int = 0
    ) -> BASolution:
        """Solve for psi(u, .); ``order`` 1 or 2 adds analytic u-derivatives."""
        arr = self._check_u(u)
        values = tuple(float(v) for v in (self.S.d if d is None else d))
        b = self.rhs(values)
        A = self.matrix(arr)
        cond = float(np.linalg.cond(A))
        if not np.isfinite(cond) or cond > self.tol.max_condition:
            raise SingularSystem(f"Baker-Akhiezer system singular at u={arr.tolist()} (cond={cond:.3e})")
        lu = lu_factor(A)
        w = lu_solve(lu, b)

        first = second = None
        n = self.S.n
        if order >= 1:
            A_i = [self.derivative_matrix(arr, i) for i in range(n)]
            first = np.stack([-lu_solve(lu, A_i[i] @ w) for i in range(n)])
            if order >= 2:
                second = np.zeros((n, n, w.shape[0]), dtype=np.complex128)
                for i in range(n):
                    for k in range(i, n):
                        t = A_i[i] @ first[k] + A_i[k] @ first[i]
                        if i == k:
                            t = t + self.derivative_matrix(arr, i, order=2) @ w
                        second[i, k] = second[k, i] = -lu_solve(lu, t)
        return BASolution(
            layout=self.layout,
            u=tuple(float(v) for v in arr),
            d=values,
            coefficients=w,
            condition_number=cond,
            first=first,
            second=second,
        )


def assemble_system(
    S: SpectralCurveData, u: Sequence[float], d: Optional[Sequence[float]] = None
) -> Tuple[ComplexArray, ComplexArray]:
    system = BakerAkhiezerSystem(S)
    return system.matrix(u), system.rhs(d)


def solve_psi(
    S: SpectralCurveData,
    u: Sequence[float],
    d: Optional[Sequence[float]] = None,
    *,
    order: int = 0,
    tol: Optional[Tolerances] = None,
) -> BASolution:
    return BakerAkhiezerSystem(S, tol).solve(u, d, order=order)


def eval_psi(sol: BASolution, p: PointOnCurve) -> complex:
    return sol.value(p)


def leading_coeffs(sol: BASolution, j: int) -> Tuple[complex, complex]:
    return sol.leading(j)


def partial_psi(
    S: SpectralCurveData,
    u: Sequence[float],
    d: Optional[Sequence[float]],
    i: int,
    *,
    tol: Optional[Tolerances] = None,
) -> BADerivative:
    if not 0 <= i < S.n:
        raise DimensionMismatch(f"direction {i} outside 0..{S.n - 1}")
    return BADerivative(BakerAkhiezerSystem(S, tol).solve(u, d, order=1), i)
