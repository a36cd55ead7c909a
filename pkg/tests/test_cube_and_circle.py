from __future__ import annotations

import numpy as np
import pytest

from ribnet.core.errors import CollinearTriple, PreconditionViolated
from ribnet.curve.model import SpectralCurveData
from ribnet.data.loader import load_shipped
from ribnet.net.grid import default_grid
from ribnet.ribaucour.circle import circle_through, concircularity_check
from ribnet.ribaucour.cube import CubeReport, bianchi_cube

# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


def _on_circle(center: np.ndarray, e1: np.ndarray, e2: np.ndarray, radius: float, t: float) -> np.ndarray:
    return center + radius * (np.cos(t) * e1 + np.sin(t) * e2)


@pytest.fixture(scope="module")
def cube_n3() -> CubeReport:
    return bianchi_cube(load_shipped("ds-n3-l2"), default_grid(3, 5))


@pytest.fixture(scope="module")
def curve() -> SpectralCurveData:
    return load_shipped("ds-n2-l1")


# ---------------------------------------------------------------------------
# Tests
# ---------------------------------------------------------------------------


class TestCircle:
    """Circumscribed circles in the plane and in space."""

    def test_points_on_circle(self) -> None:
        rng = np.random.default_rng(3)
        for _ in range(20):
            center = rng.normal(size=4)
            basis, _ = np.linalg.qr(rng.normal(size=(4, 2)))
            e1, e2 = basis[:, 0], basis[:, 1]
            radius = float(rng.uniform(0.5, 3.0))
            t = rng.uniform(0, 2 * np.pi, size=4)
            pts = [_on_circle(center, e1, e2, radius, s) for s in t]
            assert concircularity_check(*pts) < 1e-12

    def test_random_points_off_circle(self) -> None:
        rng = np.random.default_rng(8)
        for _ in range(20):
            pts = rng.normal(size=(4, 3))
            assert concircularity_check(*pts) > 0

    def test_planar_circle(self) -> None:
        c = circle_through([1.0, 0.0], [0.0, 1.0], [-1.0, 0.0])
        np.testing.assert_allclose(c.center, [0.0, 0.0], atol=1e-15)
        assert c.radius == pytest.approx(1.0)
        assert c.distance([0.0, -1.0]) == pytest.approx(0.0, abs=1e-15)
        assert c.distance([0.0, 2.0]) == pytest.approx(1.0)

    def test_collinear(self) -> None:
        with pytest.raises(CollinearTriple):
            circle_through([0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0])
        with pytest.raises(CollinearTriple):
            concircularity_check([1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 2.0])


class TestCube:
    """Swap cubes of the shipped curves."""

    def test_single_edge(self, curve: SpectralCurveData) -> None:
        cube = bianchi_cube(curve, default_grid(2, 5))
        assert len(cube.nets) == 2
        assert len(cube.edge_reports) == 1
        assert cube.faces == {}
        assert cube.passed

    def test_square(self, cube_n3: CubeReport) -> None:
        assert len(cube_n3.nets) == 4
        assert len(cube_n3.edge_reports) == 4
        assert len(cube_n3.faces) == 1
        assert cube_n3.path_independent
        assert cube_n3.failed_edges == []

    def test_face_concircular(self, cube_n3: CubeReport) -> None:
        (face,) = cube_n3.faces.values()
        assert face.alpha == 1 and face.beta == 2
        assert face.fraction_within >= 0.9
        assert face.passed
        assert cube_n3.passed

    def test_json(self, cube_n3: CubeReport) -> None:
        out = cube_n3.to_json_dict()
        assert out["nets"] == ["S", "S_1", "S_2", "S_12"]
        assert len(out["edges"]) == 4
        assert out["passed"] is True

    def test_vertices_share_grid(self, cube_n3: CubeReport) -> None:
        grids = {net.grid for net in cube_n3.nets.values()}
        assert len(grids) == 1

    def test_vertex_data(self, cube_n3: CubeReport) -> None:
        top = cube_n3.data[frozenset({1, 2})]
        assert top.swap_state == (True, True)

    def test_needs_movable_points(self, curve: SpectralCurveData) -> None:
        from dataclasses import replace

        with pytest.raises(PreconditionViolated):
            bianchi_cube(replace(curve, l=0), default_grid(2, 3))
