from __future__ import annotations

from typing import Iterable, Optional, TypeVar, cast

from tqdm import tqdm

from ribnet.config.settings import settings

_T = TypeVar("_T")


class Progress:
    """
    tqdm bars for grid sweeps. A disabled instance hands the iterable back
    untouched; ``enabled=None`` follows RIBNET_PROGRESS.

    Usage:
        prog = Progress(enabled=True)
        for u in prog.iter(points, desc="x", total=len(points)):
            ...
    """

    def __init__(self, enabled: Optional[bool] = None, *, unit: str = "pt") -> None:
        self.enabled = settings.RIBNET_PROGRESS if enabled is None else bool(enabled)
        self.unit = unit

    def iter(
        self,
        iterable: Iterable[_T],
        *,
        desc: Optional[str] = None,
        total: Optional[int] = None,
    ) -> Iterable[_T]:
        if not self.enabled:
            return iterable
        # stderr, and cleared when the sweep ends so reports on stdout stay clean
        bar = tqdm(iterable, desc=desc, total=total, unit=self.unit, leave=False, dynamic_ncols=True)
        return cast(Iterable[_T], bar)
