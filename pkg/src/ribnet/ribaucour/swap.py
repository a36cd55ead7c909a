from __future__ import annotations

from dataclasses import replace
from itertools import combinations, permutations
from typing import FrozenSet, Iterable, List

from ribnet.core.errors import IndexOutOfRange
from ribnet.curve.model import SpectralCurveData

Subset = FrozenSet[int]


def swap_data(S: SpectralCurveData, alpha: int) -> SpectralCurveData:
    """Replace R_alpha by its sigma-image (1-based ``alpha``); toggling twice is the identity."""
    if not 1 <= alpha <= S.l:
        raise IndexOutOfRange(
            f"alpha = {alpha} is not a movable normalization point (valid: 1..{S.l})"
        )
    state = list(S.swap_state)
    state[alpha - 1] = not state[alpha - 1]
    return replace(S, swap_state=tuple(state))


def swap_sequence(S: SpectralCurveData, order: Iterable[int]) -> SpectralCurveData:
    out = S
    for alpha in order:
        out = swap_data(out, alpha)
    return out


def subsets(l: int) -> List[Subset]:
    """All subsets of {1..l}, ordered by size then lexicographically."""
    out: List[Subset] = [frozenset()]
    for size in range(1, l + 1):
        out += [frozenset(c) for c in combinations(range(1, l + 1), size)]
    return out


def subset_label(A: Subset) -> str:
    return "S" + ("_" + "".join(str(a) for a in sorted(A)) if A else "")


def order_independent(S: SpectralCurveData, A: Subset) -> bool:
    """Every order of swapping the members of ``A`` gives equal data values."""
    reference = swap_sequence(S, sorted(A))
    return all(swap_sequence(S, order) == reference for order in permutations(sorted(A)))
