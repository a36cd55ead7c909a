from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path
from typing import List, Union

from pydantic import ValidationError

from ribnet.core.errors import DatasetFormatError, DatasetIOError
from ribnet.curve.model import SpectralCurveData
from ribnet.data.schema import DatasetModel

SHIPPED = ("ds-n2-l1", "ds-n3-l2", "ds-n2-N1-l1")


def parse_dataset(text: str) -> SpectralCurveData:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise DatasetFormatError(f"dataset is not valid JSON: {e}") from e
    try:
        return DatasetModel.model_validate(raw).to_domain()
    except ValidationError as e:
        raise DatasetFormatError(f"dataset does not match format 1: {e}") from e
    except ValueError as e:
        raise DatasetFormatError(str(e)) from e


def load_dataset(path: Union[str, Path]) -> SpectralCurveData:
    """Read a dataset file, or a shipped dataset when ``path`` is one of :data:`SHIPPED`."""
    p = Path(path)
    if not p.exists() and str(path) in SHIPPED:
        return load_shipped(str(path))
    if not p.exists() and p.stem in SHIPPED and p.parent == Path("."):
        return load_shipped(p.stem)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetIOError(f"cannot read dataset {p}: {e}") from e
    return parse_dataset(text)


def load_shipped(name: str) -> SpectralCurveData:
    return parse_dataset(shipped_text(name))


def shipped_text(name: str) -> str:
    if name not in SHIPPED:
        raise DatasetIOError(f"no shipped dataset named {name!r}; known: {', '.join(SHIPPED)}")
    res = resources.files("ribnet.data").joinpath("datasets").joinpath(f"{name}.json")
    return res.read_text(encoding="utf-8")


def list_shipped() -> List[str]:
    return list(SHIPPED)


def dumps_dataset(S: SpectralCurveData, *, indent: Union[int, None] = 2) -> str:
    payload = DatasetModel.from_domain(S).model_dump(mode="json")
    return json.dumps(payload, ensure_ascii=False, indent=indent)


def dump_dataset(S: SpectralCurveData, path: Union[str, Path]) -> Path:
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(dumps_dataset(S), encoding="utf-8")
    except OSError as e:
        raise DatasetIOError(f"cannot write dataset {p}: {e}") from e
    return p


def dataset_sha256(S: SpectralCurveData) -> str:
    """Hash of the canonical (sorted, compact) JSON form of ``S``."""
    payload = DatasetModel.from_domain(S).model_dump(mode="json")
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
