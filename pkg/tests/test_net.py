from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest
from scipy.stats import ortho_group

from ribnet.config.tolerances import DEFAULT_TOLERANCES
from ribnet.core.errors import DegenerateGrid, InvalidDataError, PreconditionViolated
from ribnet.curve.model import SpectralCurveData
from ribnet.data.loader import load_shipped
from ribnet.net.grid import Grid, GridAxis, default_grid, parse_grid
from ribnet.net.reports import ResidualStats, conjugacy_report, orthogonality_report
from ribnet.net.synth import OrthogonalNet, perturb_coordinate, synth_net, valid_indices

# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


def _small_grid(n: int, count: int = 5) -> Grid:
    return default_grid(n, count)


def _rotated(net: OrthogonalNet, seed: int = 0) -> OrthogonalNet:
    Q = ortho_group.rvs(net.dim, random_state=seed)
    return replace(
        net,
        points=net.points @ Q.T,
        first_derivs=net.first_derivs @ Q.T,
        second_derivs=net.second_derivs @ Q.T,
    )


def _line_net() -> OrthogonalNet:
    """A one-parameter curve x(u) = (cos u, sin u)."""
    u = np.linspace(0.0, 1.0, 4)[:, None]
    c, s = np.cos(u[:, 0]), np.sin(u[:, 0])
    return OrthogonalNet(
        grid=Grid((GridAxis(0.0, 1.0, 4),)),
        d=(1.0,),
        u=u,
        points=np.stack([c, s], axis=1),
        first_derivs=np.stack([-s, c], axis=1)[:, None, :],
        second_derivs=np.stack([-c, -s], axis=1)[:, None, None, :],
        flags=np.zeros(4, dtype=bool),
    )


@pytest.fixture(scope="module")
def curve() -> SpectralCurveData:
    return load_shipped("ds-n2-l1")


@pytest.fixture(scope="module")
def net(curve: SpectralCurveData) -> OrthogonalNet:
    return synth_net(curve, _small_grid(2, 9))


@pytest.fixture(scope="module")
def net_n3() -> OrthogonalNet:
    return synth_net(load_shipped("ds-n3-l2"), _small_grid(3))


# ---------------------------------------------------------------------------
# Tests
# ---------------------------------------------------------------------------


class TestGrid:
    """Lattice construction and parsing."""

    def test_points_order(self) -> None:
        g = Grid((GridAxis(0.0, 1.0, 2), GridAxis(-1.0, 1.0, 3)))
        pts = g.points()
        assert pts.shape == (6, 2)
        np.testing.assert_array_equal(pts[0], [0.0, -1.0])
        np.testing.assert_array_equal(pts[1], [0.0, 0.0])
        np.testing.assert_array_equal(pts[3], [1.0, -1.0])

    def test_refined(self) -> None:
        g = default_grid(2, 5).refined()
        assert g.shape == (9, 9)
        assert g.axes[0].step == pytest.approx(0.25)

    def test_parse_single_axis_repeats(self) -> None:
        g = parse_grid("-0.5,0.5,3", 3)
        assert g.shape == (3, 3, 3)
        assert g.axes[2].start == -0.5

    def test_parse_default(self) -> None:
        assert parse_grid(None, 2).shape == (33, 33)

    @pytest.mark.parametrize("text", ["1,2", "a,b,3", "0,1,0", "0,1,3;0,1,3;0,1,3"])
    def test_parse_errors(self, text: str) -> None:
        with pytest.raises(InvalidDataError):
            parse_grid(text, 2)


class TestSynth:
    """Sampled nets and their exact values."""

    def test_exact_points(self, net: OrthogonalNet) -> None:
        E = np.exp(net.u)
        expected = 2.0 * E / np.sum(E * E, axis=1, keepdims=True)
        np.testing.assert_allclose(net.points, expected, rtol=1e-12)
        assert not net.flags.any()
        assert net.max_imag < 1e-10

    def test_shapes(self, net_n3: OrthogonalNet) -> None:
        assert net_n3.points.shape == (125, 3)
        assert net_n3.first_derivs.shape == (125, 3, 3)
        assert net_n3.second_derivs.shape == (125, 3, 3, 3)

    def test_second_derivative_check(self, net: OrthogonalNet, net_n3: OrthogonalNet) -> None:
        for sample in (net, net_n3):
            assert sample.fd_check["samples"] == 5
            assert sample.fd_check["max_relative_error"] < 1e-4

    def test_zero_data_is_zero_map(self, curve: SpectralCurveData) -> None:
        zero = synth_net(curve, _small_grid(2), (0.0,))
        assert not np.any(zero.points)
        assert not np.any(zero.first_derivs)

    def test_degenerate_grid(self, curve: SpectralCurveData) -> None:
        tight = DEFAULT_TOLERANCES.with_overrides(["max_condition=1"])
        with pytest.raises(DegenerateGrid):
            synth_net(curve, _small_grid(2, 3), tol=tight)

    def test_grid_must_match(self, curve: SpectralCurveData) -> None:
        with pytest.raises(PreconditionViolated):
            synth_net(curve, _small_grid(3, 2))

    def test_valid_indices(self, net: OrthogonalNet) -> None:
        flagged = replace(net, flags=np.arange(net.flags.size) % 2 == 0)
        idx = valid_indices([net, flagged])
        assert idx.tolist() == list(range(1, net.flags.size, 2))


class TestReports:
    """Orthogonality and conjugacy residuals with their negative controls."""

    def test_orthogonal(self, net: OrthogonalNet, net_n3: OrthogonalNet) -> None:
        for sample in (net, net_n3):
            rep = orthogonality_report(sample)
            assert rep.passed
            assert rep.overall.count == int(sample.valid.sum())

    def test_conjugate(self, net: OrthogonalNet, net_n3: OrthogonalNet) -> None:
        for sample in (net, net_n3):
            rep = conjugacy_report(sample)
            assert rep.passed
            assert not rep.empty
        assert len(conjugacy_report(net_n3).pairs) == 3

    def test_scaled_coordinate_breaks_orthogonality(self, net: OrthogonalNet, net_n3: OrthogonalNet) -> None:
        assert not orthogonality_report(perturb_coordinate(net, 0, factor=2.0)).passed
        scaled = perturb_coordinate(net_n3, 1, factor=1.5)
        assert not orthogonality_report(scaled).passed
        assert conjugacy_report(scaled).passed

    def test_bilinear_factor_breaks_conjugacy(self, net_n3: OrthogonalNet) -> None:
        bent = perturb_coordinate(net_n3, 0, bilinear=0.5)
        assert not conjugacy_report(bent).passed

    def test_perturb_bounds(self, net: OrthogonalNet) -> None:
        with pytest.raises(PreconditionViolated):
            perturb_coordinate(net, 5, factor=2.0)

    def test_rotation_invariance(self, net_n3: OrthogonalNet) -> None:
        turned = _rotated(net_n3, seed=4)
        a, b = orthogonality_report(net_n3), orthogonality_report(turned)
        assert abs(a.overall.max - b.overall.max) < 1e-12
        c, d = conjugacy_report(net_n3), conjugacy_report(turned)
        assert abs(c.overall.max - d.overall.max) < 1e-12

    def test_refinement_stable(self, curve: SpectralCurveData) -> None:
        coarse = synth_net(curve, _small_grid(2, 5))
        fine = synth_net(curve, _small_grid(2, 5).refined())
        for report in (orthogonality_report, conjugacy_report):
            assert report(fine).overall.max <= 10 * report(coarse).overall.max + 1e-14

    def test_one_parameter_net(self) -> None:
        line = _line_net()
        rep = conjugacy_report(line)
        assert rep.empty
        assert rep.passed
        assert orthogonality_report(line).passed

    def test_flagged_points_counted(self, net: OrthogonalNet) -> None:
        flags = np.zeros(net.flags.size, dtype=bool)
        flags[:3] = True
        rep = orthogonality_report(replace(net, flags=flags))
        assert rep.overall.flagged == 3
        assert rep.overall.count == net.flags.size - 3

    def test_vanishing_derivative_is_flagged(self, net: OrthogonalNet) -> None:
        dx = net.first_derivs.copy()
        dx[4, 0, :] = 0.0
        rep = orthogonality_report(replace(net, first_derivs=dx))
        assert rep.overall.flagged == 1
        assert rep.overall.count == net.flags.size - 1
        assert np.isnan(rep.per_point[4])


class TestResidualStats:
    def test_nan_is_flagged(self) -> None:
        u = np.array([[0.0], [1.0], [2.0]])
        s = ResidualStats.from_values(np.array([1e-9, np.nan, 3e-9]), u, 1e-8)
        assert s.flagged == 1
        assert s.count == 2
        assert s.max == pytest.approx(3e-9)
        assert s.argmax == (2.0,)
        assert s.passed
