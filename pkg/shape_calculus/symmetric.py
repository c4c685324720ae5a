"""
Elementary symmetric functions of eigenvalue clusters.
"""
from typing import Sequence

import numpy as np

from system.errors import InvalidParametersError


def elementary_symmetric(values: Sequence[float], s: int) -> float:
    """Sum of all s-fold products of ``values``.

    Uses the recurrence e_k <- e_k + x e_(k-1) over the values, which only
    adds products of equal sign for positive input.
    """
    values = np.asarray(values, dtype=float)
    if not 1 <= s <= values.size:
        raise InvalidParametersError(f"s must be in 1..{values.size}, got {s}")
    e = np.zeros(s + 1)
    e[0] = 1.0
    for x in values:
        e[1:] = e[1:] + x * e[:-1]
    return float(e[s])
