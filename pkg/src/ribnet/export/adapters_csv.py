from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import pandas as pd

from ribnet.core.errors import ExportError
from ribnet.net.synth import OrthogonalNet


@dataclass
class CsvNetAdapter:
    """
    One row per grid point.

    Columns: u0..u{n-1}, x0..x{n+N-1}, flagged. Flagged rows keep their u values
    and leave the x columns empty.
    """

    @staticmethod
    def to_frame(net: OrthogonalNet) -> pd.DataFrame:
        data = {f"u{i}": net.u[:, i] for i in range(net.n)}
        data.update({f"x{k}": net.points[:, k] for k in range(net.dim)})
        df = pd.DataFrame(data)
        df["flagged"] = net.flags
        return df

    @staticmethod
    def dumps(net: OrthogonalNet) -> str:
        return CsvNetAdapter.to_frame(net).to_csv(index=False, float_format="%.17g")

    @staticmethod
    def write(net: OrthogonalNet, path: Union[str, Path]) -> Path:
        p = Path(path)
        try:
            p.parent.mkdir(parents=True, exist_ok=True)
            CsvNetAdapter.to_frame(net).to_csv(p, index=False, float_format="%.17g")
        except OSError as e:
            raise ExportError(f"cannot write {p}: {e}") from e
        return p
