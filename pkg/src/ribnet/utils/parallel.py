from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from ribnet.config.settings import settings
from ribnet.utils.progress import Progress

_T = TypeVar("_T")
_R = TypeVar("_R")


def worker_count(threads: Optional[int] = None) -> int:
    n = settings.RIBNET_THREADS if threads is None else threads
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, n)


def parallel_map(
    fn: Callable[[_T], _R],
    items: Sequence[_T],
    *,
    threads: Optional[int] = None,
    progress: Optional[Progress] = None,
    desc: Optional[str] = None,
) -> List[_R]:
    """Apply ``fn`` to every item; results come back in input order."""
    prog = progress or Progress(enabled=False)
    workers = min(worker_count(threads), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in prog.iter(items, desc=desc, total=len(items))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(prog.iter(pool.map(fn, items), desc=desc, total=len(items)))
