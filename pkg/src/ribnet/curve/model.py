"""Immutable domain model of the algebraic-geometric data on a nodal rational curve.

Points are kept in normalized projective form ``(num, den)`` with ``den`` equal to
1 for affine points and 0 for the point at infinity; the ``"inf"`` symbol only
exists at the serialization boundary.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field, replace
from typing import Tuple, Union

from ribnet.core.errors import UnknownComponentError

INFINITY = "inf"

Coordinate = Union[complex, str]


@dataclass(frozen=True)
class PointOnCurve:
    component_id: int
    num: complex = 0j
    den: complex = 1 + 0j

    def __post_init__(self) -> None:
        num, den = complex(self.num), complex(self.den)
        if cmath.isnan(num) or cmath.isnan(den):
            raise ValueError("point coordinate is NaN")
        if cmath.isinf(num) and not cmath.isinf(den):
            num, den = 1 + 0j, 0j
        elif cmath.isinf(den) or (num == 0 and den == 0):
            raise ValueError("degenerate projective coordinate")
        elif den == 0:
            num = 1 + 0j
        elif den != 1:
            num, den = num / den, 1 + 0j
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def at(cls, component_id: int, coordinate: Coordinate) -> "PointOnCurve":
        if isinstance(coordinate, str):
            if coordinate != INFINITY:
                raise ValueError(f"unknown coordinate symbol {coordinate!r}")
            return cls(component_id, 1 + 0j, 0j)
        return cls(component_id, complex(coordinate), 1 + 0j)

    @classmethod
    def infinity(cls, component_id: int) -> "PointOnCurve":
        return cls(component_id, 1 + 0j, 0j)

    @property
    def is_infinite(self) -> bool:
        return self.den == 0

    @property
    def z(self) -> complex:
        """Affine coordinate; only defined away from infinity."""
        if self.is_infinite:
            raise ValueError("point at infinity has no affine coordinate")
        return self.num

    @property
    def coordinate(self) -> Coordinate:
        return INFINITY if self.is_infinite else self.num

    def negated(self) -> "PointOnCurve":
        return PointOnCurve(self.component_id, -self.num, self.den)

    def on(self, component_id: int) -> "PointOnCurve":
        return PointOnCurve(component_id, self.num, self.den)

    def __str__(self) -> str:
        c = self.coordinate
        shown = c if isinstance(c, str) else (f"{c.real:g}" if c.imag == 0 else f"{c:g}")
        return f"<{self.component_id}:{shown}>"


@dataclass(frozen=True)
class Component:
    id: int
    sigma_partner: int
    sigma_is_negation: bool = False

    @property
    def self_paired(self) -> bool:
        return self.sigma_partner == self.id


@dataclass(frozen=True)
class Node:
    branch_a: PointOnCurve
    branch_b: PointOnCurve

    @property
    def branches(self) -> frozenset[PointOnCurve]:
        return frozenset((self.branch_a, self.branch_b))


@dataclass(frozen=True)
class EssentialPoint:
    """A point P_j together with the scale of its local parameter k_j = rho_j * z."""

    point: PointOnCurve
    rho: float


@dataclass(frozen=True)
class SpectralCurveData:
    n: int
    N: int
    l: int
    components: Tuple[Component, ...]
    nodes: Tuple[Node, ...]
    P: Tuple[EssentialPoint, ...]
    Q: Tuple[PointOnCurve, ...]
    R: Tuple[PointOnCurve, ...]
    gamma: Tuple[PointOnCurve, ...]
    d: Tuple[float, ...]
    swap_state: Tuple[bool, ...]
    name: str = field(default="", compare=False)

    def component(self, component_id: int) -> Component:
        for c in self.components:
            if c.id == component_id:
                return c
        raise UnknownComponentError(f"unknown component id {component_id}")

    def has_component(self, component_id: int) -> bool:
        return any(c.id == component_id for c in self.components)

    def sigma(self, p: PointOnCurve) -> PointOnCurve:
        c = self.component(p.component_id)
        if not c.self_paired:
            return p.on(c.sigma_partner)
        return p.negated() if c.sigma_is_negation else p

    @property
    def genus(self) -> int:
        return len(self.nodes) - len(self.components) + 1

    @property
    def dimension(self) -> int:
        """Dimension n+N of the ambient Euclidean space."""
        return self.n + self.N

    def physical_R(self, alpha: int) -> PointOnCurve:
        """Point carrying the condition psi = d_alpha (alpha is 0-based here)."""
        p = self.R[alpha]
        if alpha < self.l and self.swap_state[alpha]:
            return self.sigma(p)
        return p

    def opposite_R(self, alpha: int) -> PointOnCurve:
        """The sigma-image of the physical normalization point, for alpha < l."""
        return self.sigma(self.physical_R(alpha))

    def essential_component(self, j: int) -> int:
        return self.P[j].point.component_id

    def with_d(self, d: Tuple[float, ...]) -> "SpectralCurveData":
        return replace(self, d=tuple(float(v) for v in d))
