"""
Navier (hinged) rectangle in closed form.

sin(m pi x / a) sin(n pi y / b) is an eigenfunction with
lambda = mu^2 + tau mu, mu = pi^2 (m^2 / a^2 + n^2 / b^2). The stretch family
a = e^s, b = e^-s keeps the area fixed.
"""
import math
from typing import List, Tuple

from system.errors import InvalidParametersError


def rectangle_navier_spectrum(a: float, b: float, tau: float, count: int) -> List[Tuple[float, int, int]]:
    """The ``count`` smallest eigenvalues with their mode numbers.

    Args:
        a: First side
        b: Second side
        tau: Lateral tension
        count: Number of eigenvalues

    Returns:
        (lambda, m, n) ascending; ties keep ascending (m, n)
    """
    if a <= 0.0 or b <= 0.0:
        raise InvalidParametersError(f"Rectangle sides must be positive, got {a} x {b}")
    if tau < 0.0 or count < 1:
        raise InvalidParametersError(f"Need tau >= 0 and count >= 1, got {tau}, {count}")
    entries = []
    for m in range(1, count + 1):
        for n in range(1, count + 1):
            mu = math.pi ** 2 * (m ** 2 / a ** 2 + n ** 2 / b ** 2)
            entries.append((mu * mu + tau * mu, m, n))
    entries.sort()
    return entries[:count]


def stretch_branch(m: int, n: int, s: float, tau: float) -> Tuple[float, float, float]:
    """lambda_mn(s) and its first two s-derivatives on the stretch family."""
    pi2 = math.pi ** 2
    mu = pi2 * (m ** 2 * math.exp(-2.0 * s) + n ** 2 * math.exp(2.0 * s))
    d_mu = pi2 * (-2.0 * m ** 2 * math.exp(-2.0 * s) + 2.0 * n ** 2 * math.exp(2.0 * s))
    d2_mu = pi2 * (4.0 * m ** 2 * math.exp(-2.0 * s) + 4.0 * n ** 2 * math.exp(2.0 * s))
    return (mu * mu + tau * mu,
            (2.0 * mu + tau) * d_mu,
            2.0 * d_mu ** 2 + (2.0 * mu + tau) * d2_mu)


def stretch_spectrum(s: float, tau: float, count: int) -> List[Tuple[float, int, int]]:
    """Spectrum of the rectangle e^s x e^-s."""
    return rectangle_navier_spectrum(math.exp(s), math.exp(-s), tau, count)
