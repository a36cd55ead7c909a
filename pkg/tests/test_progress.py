from __future__ import annotations

from ribnet.utils.parallel import parallel_map
from ribnet.utils.progress import Progress


class TestProgress:
    """Bars wrap iteration without changing what is iterated."""

    def test_disabled_passes_through(self) -> None:
        items = [1, 2, 3]
        assert Progress(enabled=False).iter(items) is items

    def test_enabled_yields_items(self) -> None:
        assert list(Progress(enabled=True).iter(range(4), desc="t", total=4)) == [0, 1, 2, 3]

    def test_parallel_map_keeps_order_with_bar(self) -> None:
        out = parallel_map(lambda v: -v, list(range(20)), threads=3, progress=Progress(enabled=True))
        assert out == [-v for v in range(20)]
