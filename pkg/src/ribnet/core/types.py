from __future__ import annotations

from typing import Any, Dict, Literal, TypedDict

ExportFormat = Literal["csv", "json", "obj"]
CommandName = Literal["validate", "omega", "synth", "transform", "cube", "verify", "export"]


class ResidualSummary(TypedDict):
    max: float
    mean: float
    count: int
    flagged: int
    passed: bool


class ReportEnvelope(TypedDict):
    tool: str
    version: str
    command: str
    dataset_sha256: str
    seed: int
    passed: bool
    tolerances: Dict[str, float]
    results: Dict[str, Any]
