"""
Root scanning: sign changes on a uniform grid refined by Brent's method.
"""
import logging
from typing import Callable, List

import numpy as np
from scipy.optimize import brentq

from system.errors import InvalidParametersError, NonFiniteValueError

logger = logging.getLogger(__name__)

# brentq refuses relative tolerances below four machine epsilons
_MIN_RTOL = 4.0 * np.finfo(float).eps


def find_roots(f: Callable[[float], float], a: float, b: float,
               scan_steps: int, rel_tol: float, vectorized: bool = False) -> List[float]:
    """Locate the roots of f on [a, b] detected by sign changes.

    Args:
        f: Continuous real function
        a: Left end of the bracket
        b: Right end of the bracket
        scan_steps: Number of uniform subintervals, at least 2
        rel_tol: Relative tolerance of each refined root
        vectorized: Evaluate the scan grid with a single call of f

    Returns:
        Ascending list of roots, possibly empty
    """
    if not a < b:
        raise InvalidParametersError(f"Empty bracket [{a}, {b}]")
    if scan_steps < 2:
        raise InvalidParametersError(f"scan_steps must be at least 2, got {scan_steps}")

    grid = np.linspace(a, b, int(scan_steps) + 1)
    values = np.asarray(f(grid) if vectorized else [f(x) for x in grid], dtype=float)
    bad = ~np.isfinite(values)
    if np.any(bad):
        where = grid[np.argmax(bad)]
        raise NonFiniteValueError(f"Function is not finite at x={where:.17g}")

    rtol = max(rel_tol, _MIN_RTOL)
    roots = []
    for i in range(len(grid) - 1):
        left, right = values[i], values[i + 1]
        if left == 0.0:
            roots.append(float(grid[i]))
            continue
        if right == 0.0 or np.sign(left) == np.sign(right):
            continue
        root = brentq(lambda x: float(f(x)), grid[i], grid[i + 1], rtol=rtol, xtol=1e-300, maxiter=200)
        # a sign change across a pole would not shrink |f|
        if abs(float(f(root))) > max(abs(left), abs(right)):
            logger.debug(f"Discarding sign change across a discontinuity near {root:.6g}")
            continue
        roots.append(float(root))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))

    if not roots:
        logger.warning(f"No sign change of f detected on [{a:.6g}, {b:.6g}]")
    return sorted(set(roots))
