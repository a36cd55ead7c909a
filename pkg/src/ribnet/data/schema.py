"""Wire models for dataset files (``"format": 1``)."""

from __future__ import annotations

from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from ribnet.curve.model import (
    INFINITY,
    Component,
    EssentialPoint,
    Node,
    PointOnCurve,
    SpectralCurveData,
)

WireCoordinate = Union[Tuple[float, float], Literal["inf"]]


class _Wire(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False, frozen=True)


class PointModel(_Wire):
    component: int
    coordinate: WireCoordinate

    def to_domain(self) -> PointOnCurve:
        c = self.coordinate
        if isinstance(c, str):
            return PointOnCurve.infinity(self.component)
        return PointOnCurve.at(self.component, complex(c[0], c[1]))

    @classmethod
    def from_domain(cls, p: PointOnCurve) -> "PointModel":
        if p.is_infinite:
            return cls(component=p.component_id, coordinate=INFINITY)
        return cls(component=p.component_id, coordinate=(p.num.real, p.num.imag))


class EssentialPointModel(PointModel):
    rho: float = 1.0

    def to_essential(self) -> EssentialPoint:
        return EssentialPoint(self.to_domain(), float(self.rho))


class ComponentModel(_Wire):
    id: int
    sigma_partner: int
    sigma_is_negation: bool = False


class NodeModel(_Wire):
    a: PointModel
    b: PointModel


class DatasetModel(_Wire):
    format: Literal[1]
    name: str = ""
    n: int = Field(ge=0)
    N: int = Field(ge=0)
    l: int = Field(ge=0)
    components: List[ComponentModel]
    nodes: List[NodeModel]
    P: List[EssentialPointModel]
    Q: List[PointModel]
    R: List[PointModel]
    gamma: List[PointModel]
    d: List[float]
    swap_state: Optional[List[bool]] = None

    def to_domain(self) -> SpectralCurveData:
        swap = self.swap_state if self.swap_state is not None else [False] * self.l
        return SpectralCurveData(
            n=self.n,
            N=self.N,
            l=self.l,
            components=tuple(
                Component(c.id, c.sigma_partner, c.sigma_is_negation) for c in self.components
            ),
            nodes=tuple(Node(nd.a.to_domain(), nd.b.to_domain()) for nd in self.nodes),
            P=tuple(p.to_essential() for p in self.P),
            Q=tuple(q.to_domain() for q in self.Q),
            R=tuple(r.to_domain() for r in self.R),
            gamma=tuple(g.to_domain() for g in self.gamma),
            d=tuple(float(v) for v in self.d),
            swap_state=tuple(bool(s) for s in swap),
            name=self.name,
        )

    @classmethod
    def from_domain(cls, S: SpectralCurveData) -> "DatasetModel":
        return cls(
            format=1,
            name=S.name,
            n=S.n,
            N=S.N,
            l=S.l,
            components=[
                ComponentModel(
                    id=c.id, sigma_partner=c.sigma_partner, sigma_is_negation=c.sigma_is_negation
                )
                for c in S.components
            ],
            nodes=[
                NodeModel(a=PointModel.from_domain(nd.branch_a), b=PointModel.from_domain(nd.branch_b))
                for nd in S.nodes
            ],
            P=[
                EssentialPointModel(**PointModel.from_domain(e.point).model_dump(), rho=e.rho)
                for e in S.P
            ],
            Q=[PointModel.from_domain(q) for q in S.Q],
            R=[PointModel.from_domain(r) for r in S.R],
            gamma=[PointModel.from_domain(g) for g in S.gamma],
            d=list(S.d),
            swap_state=list(S.swap_state),
        )
