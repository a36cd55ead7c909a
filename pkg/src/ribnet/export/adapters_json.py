from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
from numpy.typing import NDArray

from ribnet.core.errors import DatasetFormatError, ExportError
from ribnet.net.grid import Grid, GridAxis
from ribnet.net.synth import OrthogonalNet


def _nested(a: NDArray[np.float64]) -> Any:
    """ndarray -> nested lists with NaN as null."""
    obj = a.astype(object)
    obj[~np.isfinite(a)] = None
    return obj.tolist()


def _array(raw: Any, shape: tuple) -> NDArray[np.float64]:
    arr = np.array(raw, dtype=object)
    arr[arr == None] = np.nan  # noqa: E711
    return arr.astype(np.float64).reshape(shape)


@dataclass
class JsonNetAdapter:
    """
    Full net including derivatives; ``read`` restores it (without stored solutions).

    Output JSON schema:
    {
      "format": 1, "label": str, "d": [float],
      "grid": {"axes": [{"start", "stop", "count"}]},
      "u": [[float]], "points": [[float|null]],
      "first_derivs": [[[...]]], "second_derivs": [[[[...]]]],
      "flags": [bool], "max_imag": float
    }
    """

    @staticmethod
    def to_json_dict(net: OrthogonalNet) -> Dict[str, Any]:
        return {
            "format": 1,
            "label": net.label,
            "d": list(net.d),
            "grid": net.grid.to_json_dict(),
            "u": net.u.tolist(),
            "points": _nested(net.points),
            "first_derivs": _nested(net.first_derivs),
            "second_derivs": _nested(net.second_derivs),
            "flags": [bool(f) for f in net.flags],
            "max_imag": net.max_imag,
        }

    @staticmethod
    def dumps(net: OrthogonalNet, *, indent: Union[int, None] = None) -> str:
        payload = JsonNetAdapter.to_json_dict(net)
        return json.dumps(payload, ensure_ascii=False, separators=(",", ":"), indent=indent)

    @staticmethod
    def write(net: OrthogonalNet, path: Union[str, Path], *, indent: Union[int, None] = None) -> Path:
        p = Path(path)
        try:
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_text(JsonNetAdapter.dumps(net, indent=indent), encoding="utf-8")
        except OSError as e:
            raise ExportError(f"cannot write {p}: {e}") from e
        return p

    @staticmethod
    def from_json_dict(raw: Dict[str, Any]) -> OrthogonalNet:
        try:
            if raw.get("format") != 1:
                raise DatasetFormatError("net file must have format 1")
            axes = tuple(
                GridAxis(float(a["start"]), float(a["stop"]), int(a["count"]))
                for a in raw["grid"]["axes"]
            )
            u = np.array(raw["u"], dtype=np.float64)
            M, n = u.shape
            dim = len(raw["points"][0]) if raw["points"] else 0
            return OrthogonalNet(
                grid=Grid(axes),
                d=tuple(float(v) for v in raw["d"]),
                u=u,
                points=_array(raw["points"], (M, dim)),
                first_derivs=_array(raw["first_derivs"], (M, n, dim)),
                second_derivs=_array(raw["second_derivs"], (M, n, n, dim)),
                flags=np.array(raw["flags"], dtype=bool),
                max_imag=float(raw.get("max_imag", 0.0)),
                label=str(raw.get("label", "")),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DatasetFormatError(f"malformed net file: {e}") from e

    @staticmethod
    def read(path: Union[str, Path]) -> OrthogonalNet:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as e:
            raise ExportError(f"cannot read {p}: {e}") from e
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise DatasetFormatError(f"net file is not valid JSON: {e}") from e
        return JsonNetAdapter.from_json_dict(raw)
