from __future__ import annotations

from typing import Tuple

import numpy as np
import pytest

from ribnet.ba.system import (
    BakerAkhiezerSystem,
    assemble_system,
    eval_psi,
    leading_coeffs,
    partial_psi,
    solve_psi,
)
from ribnet.config.tolerances import DEFAULT_TOLERANCES
from ribnet.core.errors import (
    DimensionMismatch,
    EvalAtEssentialSingularity,
    EvalAtPole,
    RibnetError,
    SingularSystem,
)
from ribnet.curve.model import PointOnCurve, SpectralCurveData
from ribnet.data.loader import SHIPPED, load_shipped
from ribnet.ribaucour.swap import swap_data

# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


def _two_lines_x(u: Tuple[float, float]) -> np.ndarray:
    """Exact net of the two-line curve: x = 2E/|E|^2 with E = (e^u0, e^u1)."""
    E = np.exp(np.asarray(u, dtype=float))
    return 2.0 * E / float(E @ E)


@pytest.fixture
def curve() -> SpectralCurveData:
    return load_shipped("ds-n2-l1")


@pytest.fixture
def system(curve: SpectralCurveData) -> BakerAkhiezerSystem:
    return BakerAkhiezerSystem(curve)


# ---------------------------------------------------------------------------
# Tests
# ---------------------------------------------------------------------------


class TestAssembly:
    """Shape and structure of the linear system."""

    @pytest.mark.parametrize("name, size", [("ds-n2-l1", 5), ("ds-n3-l2", 10), ("ds-n2-N1-l1", 8)])
    def test_square(self, name: str, size: int) -> None:
        S = load_shipped(name)
        A, b = assemble_system(S, (0.0,) * S.n)
        assert A.shape == (size, size)
        assert b.shape == (size,)

    def test_zero_data_rhs(self, curve: SpectralCurveData) -> None:
        _, b = assemble_system(curve, (0.3, -0.2), (0.0,))
        assert not np.any(b)

    def test_only_exponential_rows_move(self, system: BakerAkhiezerSystem) -> None:
        A = system.matrix((0.1, 0.2))
        B = system.matrix((-0.7, 0.9))
        moving = set(system.exponential_rows)
        for row in range(A.shape[0]):
            if row not in moving:
                np.testing.assert_array_equal(A[row], B[row])
        assert any(not np.allclose(A[row], B[row]) for row in moving)

    def test_bad_lengths(self, system: BakerAkhiezerSystem) -> None:
        with pytest.raises(DimensionMismatch):
            system.solve((0.0,))
        with pytest.raises(DimensionMismatch):
            system.rhs((1.0, 2.0))

    def test_condition_limit(self, curve: SpectralCurveData) -> None:
        tight = DEFAULT_TOLERANCES.with_overrides(["max_condition=1"])
        with pytest.raises(SingularSystem):
            solve_psi(curve, (0.2, 0.1), tol=tight)


class TestSolution:
    """psi at a parameter point: normalization, gluing and the exact net."""

    @pytest.mark.parametrize("name", SHIPPED)
    def test_normalization_and_nodes(self, name: str) -> None:
        S = load_shipped(name)
        rng = np.random.default_rng(1)
        for _ in range(5):
            u = tuple(rng.uniform(-1, 1, size=S.n))
            sol = solve_psi(S, u)
            for a in range(len(S.R)):
                assert abs(eval_psi(sol, S.physical_R(a)) - S.d[a]) < 1e-10
            for nd in S.nodes:
                va, vb = sol.value(nd.branch_a), sol.value(nd.branch_b)
                assert abs(va - vb) <= 1e-10 * max(1.0, abs(va))
            assert sol.max_imag < 1e-12

    @pytest.mark.parametrize("u", [(0.0, 0.0), (0.5, -0.25), (-1.0, 0.8)])
    def test_two_lines_closed_form(self, curve: SpectralCurveData, u: Tuple[float, float]) -> None:
        sol = solve_psi(curve, u)
        x = np.array([sol.value(q).real for q in curve.Q])
        np.testing.assert_allclose(x, _two_lines_x(u), rtol=1e-12)

    def test_leading_coefficients(self, curve: SpectralCurveData) -> None:
        sol = solve_psi(curve, (0.0, 0.0))
        for j in range(2):
            xi0, xi1 = leading_coeffs(sol, j)
            assert xi0 == pytest.approx(1.0)
            assert abs(xi1) < 1e-14

    def test_swapped_closed_form(self, curve: SpectralCurveData) -> None:
        u = (0.4, -0.3)
        sol = solve_psi(swap_data(curve, 1), u)
        x = np.array([sol.value(q).real for q in curve.Q])
        np.testing.assert_allclose(x, np.exp(u), rtol=1e-12)

    def test_linear_in_data(self) -> None:
        S = load_shipped("ds-n2-N1-l1")
        u = (0.3, -0.6)
        p = PointOnCurve.at(3, 0.25)
        a = solve_psi(S, u, (1.0, 0.0)).value(p)
        b = solve_psi(S, u, (0.0, 1.0)).value(p)
        both = solve_psi(S, u, (2.0, -3.0)).value(p)
        assert both == pytest.approx(2.0 * a - 3.0 * b, rel=1e-10)

    def test_zero_data(self, curve: SpectralCurveData) -> None:
        sol = solve_psi(curve, (0.2, 0.7), (0.0,), order=1)
        assert not np.any(sol.coefficients)
        assert sol.derivative(PointOnCurve.at(2, 3.0), 0) == 0

    def test_poles_and_essential_points(self, curve: SpectralCurveData) -> None:
        sol = solve_psi(curve, (0.1, 0.1))
        with pytest.raises(EvalAtPole):
            sol.value(curve.gamma[0])
        with pytest.raises(EvalAtEssentialSingularity):
            sol.value(curve.P[0].point)
        # infinity on a plain line is an ordinary point
        assert np.isfinite(sol.value(PointOnCurve.infinity(2)))

    def test_essential_point_checked_before_exponential(self, curve: SpectralCurveData) -> None:
        sol = solve_psi(curve, (0.2, 0.3), order=2)
        for j, e in enumerate(curve.P):
            with pytest.raises(EvalAtEssentialSingularity):
                eval_psi(sol, e.point)
            with pytest.raises(EvalAtEssentialSingularity):
                sol.derivative(e.point, j)
            with pytest.raises(EvalAtEssentialSingularity):
                sol.second_derivative(e.point, j, j)
        with pytest.raises(RibnetError):
            sol.derivative(curve.P[0].point, 1)


class TestDerivatives:
    """Analytic u-derivatives against the exact net and finite differences."""

    def test_exact_gradient(self, curve: SpectralCurveData) -> None:
        u = (0.3, -0.5)
        A, B = np.exp(2 * u[0]), np.exp(2 * u[1])
        x0 = _two_lines_x(u)[0]
        d0 = partial_psi(curve, u, None, 0)
        assert d0.value(curve.Q[0]).real == pytest.approx(x0 * (B - A) / (A + B), rel=1e-10)
        assert d0.leading(0).real == pytest.approx(x0 * (B - A) / (A + B), rel=1e-10)

    def test_vanishes_at_normalization(self) -> None:
        S = load_shipped("ds-n2-N1-l1")
        for i in range(S.n):
            d = partial_psi(S, (0.2, 0.4), None, i)
            for a in range(len(S.R)):
                assert abs(d.value(S.physical_R(a))) < 1e-10

    def test_bad_direction(self, curve: SpectralCurveData) -> None:
        with pytest.raises(DimensionMismatch):
            partial_psi(curve, (0.0, 0.0), None, 2)

    @pytest.mark.parametrize("name", SHIPPED)
    def test_finite_differences(self, name: str) -> None:
        S = load_shipped(name)
        system = BakerAkhiezerSystem(S)
        rng = np.random.default_rng(7)
        h = 1e-5
        u = rng.uniform(-0.8, 0.8, size=S.n)
        sol = system.solve(u, order=2)
        probe = PointOnCurve.at(S.components[-1].id, 2.5)
        for i in range(S.n):
            e = np.zeros(S.n)
            e[i] = h
            plus, minus = system.solve(u + e, order=1), system.solve(u - e, order=1)
            fd = (plus.value(probe) - minus.value(probe)) / (2 * h)
            assert sol.derivative(probe, i) == pytest.approx(fd, rel=1e-6, abs=1e-9)
            for k in range(S.n):
                fd2 = (plus.derivative(probe, k) - minus.derivative(probe, k)) / (2 * h)
                assert sol.second_derivative(probe, i, k) == pytest.approx(fd2, rel=1e-4, abs=1e-7)
