from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ribnet.config.tolerances import DEFAULT_TOLERANCES, Tolerances
from ribnet.core.errors import CollinearTriple

FloatArray = NDArray[np.float64]


@dataclass(frozen=True)
class Circle:
    center: FloatArray
    radius: float
    # orthonormal basis of the plane of the circle, shape (2, dim)
    plane: FloatArray

    def distance(self, q: ArrayLike) -> float:
        v = np.asarray(q, dtype=np.float64) - self.center
        in_plane = self.plane @ v
        off_plane = v - self.plane.T @ in_plane
        radial = float(np.linalg.norm(in_plane)) - self.radius
        return float(np.hypot(np.linalg.norm(off_plane), radial))


def circle_through(
    p1: ArrayLike, p2: ArrayLike, p3: ArrayLike, *, tol: Optional[Tolerances] = None
) -> Circle:
    """Circumscribed circle of a triangle in any dimension >= 2."""
    tol = tol or DEFAULT_TOLERANCES
    c = np.asarray(p3, dtype=np.float64)
    a = np.asarray(p1, dtype=np.float64) - c
    b = np.asarray(p2, dtype=np.float64) - c
    aa, bb, ab = float(a @ a), float(b @ b), float(a @ b)
    det = aa * bb - ab * ab
    if aa == 0 or bb == 0 or det <= tol.collinear * aa * bb:
        raise CollinearTriple("first three points are collinear or coincide")
    s, t = np.linalg.solve(np.array([[aa, ab], [ab, bb]]), np.array([aa / 2, bb / 2]))
    center = c + s * a + t * b
    e1 = a / np.sqrt(aa)
    w = b - (b @ e1) * e1
    e2 = w / np.linalg.norm(w)
    return Circle(center, float(np.linalg.norm(center - c)), np.vstack([e1, e2]))


def concircularity_check(
    p: ArrayLike,
    p_a: ArrayLike,
    p_b: ArrayLike,
    p_ab: ArrayLike,
    *,
    tol: Optional[Tolerances] = None,
) -> float:
    """Distance of ``p_ab`` from the circle through ``p, p_a, p_b``, divided by its radius.

    Combines the out-of-plane offset and the radial offset; zero iff the four
    points are concircular.
    """
    circle = circle_through(p, p_a, p_b, tol=tol)
    return circle.distance(p_ab) / circle.radius
