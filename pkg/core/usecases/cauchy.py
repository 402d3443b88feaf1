"""Pair sampling and tail profiles shared by the Cauchy-style experiments."""

from typing import Iterable, List, Tuple

from core.domain.entities import CauchyProfile, PairValue
from core.exceptions import SequenceTooShortException

DEFAULT_MAX_PAIRS = 200


def sample_pairs(length: int, max_pairs: int = DEFAULT_MAX_PAIRS) -> List[Tuple[int, int]]:
    """All pairs i < j when few enough, else consecutive pairs plus pairs with the last member."""
    if length < 2:
        raise SequenceTooShortException(length, 2)
    total = length * (length - 1) // 2
    if total <= max_pairs:
        return [(i, j) for i in range(length) for j in range(i + 1, length)]
    pairs = {(i, i + 1) for i in range(length - 1)}
    pairs.update((i, length - 1) for i in range(length - 1))
    return sorted(pairs)


def tail_profile(length: int, values: Iterable[Tuple[int, int, float]]) -> CauchyProfile:
    """tail_sup[m] = max over sampled pairs with both indices >= m (0 when none)."""
    pairs = [PairValue(i=i, j=j, value=float(value)) for i, j, value in values]
    tail_sup = []
    for m in range(length):
        tail = [pair.value for pair in pairs if pair.i >= m]
        tail_sup.append(max(tail) if tail else 0.0)
    return CauchyProfile(pairs=pairs, tail_sup=tail_sup)
