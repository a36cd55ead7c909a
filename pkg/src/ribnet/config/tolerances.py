"""Numeric thresholds shared by every certification step.

One frozen model so a run can be reproduced from the values printed in its
report. CLI overrides arrive as ``KEY=VAL`` strings.
"""

from __future__ import annotations

from typing import Iterable

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ribnet.core.errors import InvalidDataError


class Tolerances(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    certification: float = Field(1e-10, gt=0)
    residue_sum: float = Field(1e-12, gt=0)
    realness: float = Field(1e-10, gt=0)
    orthogonality: float = Field(1e-8, gt=0)
    conjugacy: float = Field(1e-6, gt=0)
    ribaucour: float = Field(1e-8, gt=0)
    lemma: float = Field(1e-8, gt=0)
    closed_form: float = Field(1e-10, gt=0)
    concircularity: float = Field(1e-6, gt=0)
    gradient: float = Field(1e-6, gt=0)
    gradient_step: float = Field(1e-5, gt=0)
    second_derivative: float = Field(1e-4, gt=0)
    max_condition: float = Field(1e12, gt=0)
    degenerate_fraction: float = Field(0.1, gt=0, le=1)
    pass_fraction: float = Field(0.9, gt=0, le=1)
    delta_min: float = Field(1e-14, gt=0)
    phi_min: float = Field(1e-12, gt=0)
    collinear: float = Field(1e-12, gt=0)

    def with_overrides(self, pairs: Iterable[str]) -> "Tolerances":
        """Return a copy with ``KEY=VAL`` overrides applied and re-validated."""
        update: dict[str, float] = {}
        for raw in pairs:
            key, sep, value = raw.partition("=")
            key = key.strip()
            if not sep or not key:
                raise InvalidDataError(f"tolerance override must look like KEY=VAL: {raw!r}")
            if key not in type(self).model_fields:
                raise InvalidDataError(f"unknown tolerance key: {key!r}")
            try:
                update[key] = float(value)
            except ValueError as e:
                raise InvalidDataError(f"tolerance {key} is not a number: {value!r}") from e
        try:
            return type(self).model_validate({**self.model_dump(), **update})
        except ValidationError as e:
            raise InvalidDataError(f"invalid tolerance override: {e}") from e


DEFAULT_TOLERANCES = Tolerances()
