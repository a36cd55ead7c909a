from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np

from ribnet.core.errors import ExportError
from ribnet.net.synth import OrthogonalNet


@dataclass
class ObjNetAdapter:
    """
    Wavefront OBJ of the coordinate lines and surfaces of a net with n <= 3.

    - every coordinate curve through the central grid point becomes an ``l`` polyline
    - for n >= 2 every coordinate surface through the central point (remaining
      parameters fixed) becomes a quad mesh of ``f`` faces
    Vertices are the ambient coordinates, zero-padded in the plane; nets in
    more than three ambient dimensions are rejected.
    Flagged grid points are left out together with the faces touching them.
    """

    @staticmethod
    def _vertex(net: OrthogonalNet, p: int) -> Tuple[float, float, float]:
        x = list(net.points[p]) + [0.0] * max(0, 3 - net.dim)
        return (float(x[0]), float(x[1]), float(x[2]))

    @staticmethod
    def lines(net: OrthogonalNet) -> str:
        if net.n > 3:
            raise ExportError(f"OBJ export supports n <= 3 (got n = {net.n})")
        if net.dim > 3:
            raise ExportError(f"OBJ vertices are 3D; the net lives in R^{net.dim}")
        shape = net.grid.shape
        center = tuple(c // 2 for c in shape)
        flat = np.arange(int(np.prod(shape))).reshape(shape)

        index: Dict[int, int] = {}
        out: List[str] = [f"# ribnet net {net.label or ''}".rstrip()]

        def vid(p: int) -> int:
            if p not in index:
                index[p] = len(index) + 1
                x, y, z = ObjNetAdapter._vertex(net, p)
                out.append(f"v {x:.17g} {y:.17g} {z:.17g}")
            return index[p]

        body: List[str] = []
        for axis in range(net.n):
            sl = list(center)
            sl[axis] = slice(None)  # type: ignore[call-overload]
            ids = [int(p) for p in flat[tuple(sl)]]
            run: List[int] = []
            body.append(f"o curve_u{axis}")
            for p in ids + [-1]:
                if p >= 0 and not net.flags[p]:
                    run.append(vid(p))
                    continue
                if len(run) >= 2:
                    body.append("l " + " ".join(str(v) for v in run))
                run = []

        for a, b in combinations(range(net.n), 2):
            sl = list(center)
            sl[a] = slice(None)  # type: ignore[call-overload]
            sl[b] = slice(None)  # type: ignore[call-overload]
            patch = flat[tuple(sl)]
            body.append(f"o surface_u{a}_u{b}")
            for i in range(patch.shape[0] - 1):
                for j in range(patch.shape[1] - 1):
                    quad = [int(patch[i, j]), int(patch[i + 1, j]),
                            int(patch[i + 1, j + 1]), int(patch[i, j + 1])]
                    if any(net.flags[p] for p in quad):
                        continue
                    body.append("f " + " ".join(str(vid(p)) for p in quad))
        return "\n".join(out + body) + "\n"

    @staticmethod
    def write(net: OrthogonalNet, path: Union[str, Path]) -> Path:
        p = Path(path)
        try:
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_text(ObjNetAdapter.lines(net), encoding="utf-8")
        except OSError as e:
            raise ExportError(f"cannot write {p}: {e}") from e
        return p
