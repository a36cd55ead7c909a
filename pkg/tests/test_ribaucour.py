from __future__ import annotations

import json

import numpy as np
import pytest

from ribnet.core.errors import DegeneratePoint, IndexOutOfRange, PreconditionViolated
from ribnet.curve.model import SpectralCurveData
from ribnet.data.loader import SHIPPED, load_shipped
from ribnet.net.grid import default_grid
from ribnet.ribaucour.pair import RibaucourReport, lemma_identities, ribaucour_pair
from ribnet.ribaucour.swap import order_independent, subset_label, subsets, swap_data, swap_sequence

# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def curve() -> SpectralCurveData:
    return load_shipped("ds-n2-l1")


@pytest.fixture(scope="module")
def curve_n3() -> SpectralCurveData:
    return load_shipped("ds-n3-l2")


@pytest.fixture(scope="module")
def pair(curve: SpectralCurveData) -> RibaucourReport:
    return ribaucour_pair(curve, 1, default_grid(2, 7))


# ---------------------------------------------------------------------------
# Tests
# ---------------------------------------------------------------------------


class TestSwap:
    """Moving R_alpha to its sigma-image."""

    def test_involution(self, curve_n3: SpectralCurveData) -> None:
        for alpha in (1, 2):
            once = swap_data(curve_n3, alpha)
            assert once != curve_n3
            assert swap_data(once, alpha) == curve_n3

    def test_commute(self, curve_n3: SpectralCurveData) -> None:
        assert swap_sequence(curve_n3, [1, 2]) == swap_sequence(curve_n3, [2, 1])
        assert order_independent(curve_n3, frozenset({1, 2}))

    def test_out_of_range(self, curve: SpectralCurveData) -> None:
        for alpha in (0, 2):
            with pytest.raises(IndexOutOfRange):
                swap_data(curve, alpha)

    def test_fixed_points_never_move(self) -> None:
        S = load_shipped("ds-n2-N1-l1")
        swapped = swap_data(S, 1)
        assert swapped.physical_R(1) == S.physical_R(1)
        assert swapped.physical_R(0) == S.sigma(S.R[0])

    def test_subsets(self) -> None:
        assert subsets(2) == [frozenset(), frozenset({1}), frozenset({2}), frozenset({1, 2})]
        assert subset_label(frozenset()) == "S"
        assert subset_label(frozenset({2, 1})) == "S_12"


class TestPair:
    """Ribaucour certification of a net and its swapped partner."""

    def test_two_lines_certified(self, pair: RibaucourReport) -> None:
        assert pair.passed, {k: s.max for k, s in pair.stats.items()}
        assert all(pair.net_checks.values())
        # at u = (0, 0) the net and its partner meet: |E|^2 = 2
        assert pair.degenerate_count == 1
        assert pair.to_json_dict()["degenerate_points"] == 1

    def test_two_lines_lambda(self, pair: RibaucourReport) -> None:
        E2 = np.sum(np.exp(2.0 * pair.u), axis=1)
        ok = ~(pair.degenerate | pair.flagged)
        for i in range(2):
            np.testing.assert_allclose(pair.lambda_ratio[ok, i], E2[ok] / 2.0, rtol=1e-10)
            np.testing.assert_allclose(pair.lambda_fit[ok, i], E2[ok] / 2.0, rtol=1e-8)

    def test_phi_values(self, pair: RibaucourReport) -> None:
        E2 = np.sum(np.exp(2.0 * pair.u), axis=1)
        np.testing.assert_allclose(pair.phi_alpha, 2.0 / E2, rtol=1e-12)
        np.testing.assert_allclose(pair.phi_alpha_alpha, E2 / 2.0, rtol=1e-12)

    @pytest.mark.parametrize("name, alpha", [("ds-n3-l2", 1), ("ds-n3-l2", 2), ("ds-n2-N1-l1", 1)])
    def test_other_curves(self, name: str, alpha: int) -> None:
        S = load_shipped(name)
        rep = ribaucour_pair(S, alpha, default_grid(S.n, 5))
        assert rep.passed, {k: s.max for k, s in rep.stats.items()}
        assert rep.lambda_max_imag < 1e-10

    def test_identity_short_circuit(self, curve: SpectralCurveData) -> None:
        rep = ribaucour_pair(curve, 1, partner=curve)
        assert rep.identity
        assert rep.passed
        assert rep.to_json_dict()["identity"] is True

    def test_wrong_partner(self, curve_n3: SpectralCurveData) -> None:
        with pytest.raises(PreconditionViolated):
            ribaucour_pair(curve_n3, 1, partner=swap_data(curve_n3, 2))


class TestLemmaIdentities:
    """Pointwise identities at random parameter values."""

    @pytest.mark.parametrize("name", SHIPPED)
    def test_random_points(self, name: str) -> None:
        S = load_shipped(name)
        rng = np.random.default_rng(21)
        for alpha in range(1, S.l + 1):
            for _ in range(3):
                u = tuple(float(v) for v in rng.uniform(0.1, 0.9, size=S.n))
                rep = lemma_identities(S, alpha, u, seed=2)
                assert rep.passed, rep.to_json_dict()
                assert len(rep.sample_points) == 20

    def test_zero_data_vanishes(self, curve: SpectralCurveData) -> None:
        rep = lemma_identities(curve, 1, (0.3, 0.1), d=(0.0,))
        assert rep.vanishing
        assert rep.passed

    def test_report_holds_plain_python_values(self, curve: SpectralCurveData) -> None:
        rep = lemma_identities(curve, 1, (0.4, 0.2), seed=5)
        row = rep.to_json_dict()
        assert type(row["passed"]) is bool
        for key, value in row.items():
            if key.startswith("residual_"):
                assert type(value) is float, key
        json.dumps(row, allow_nan=False)

    def test_degenerate_point(self, curve: SpectralCurveData) -> None:
        with pytest.raises(DegeneratePoint):
            lemma_identities(curve, 1, (0.0, 0.0))
