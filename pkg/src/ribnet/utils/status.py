from __future__ import annotations

import sys
from typing import Optional

from ribnet.config.settings import settings

_quiet: Optional[bool] = None


def set_quiet(flag: Optional[bool]) -> None:
    """Force status lines on/off; ``None`` falls back to RIBNET_QUIET."""
    global _quiet
    _quiet = flag


def status(msg: str) -> None:
    quiet = settings.RIBNET_QUIET if _quiet is None else _quiet
    if not quiet:
        print(msg, file=sys.stderr, flush=True)
