"""Closed-form subleading eigenvalues and depth thresholds for the sheltered-pair family.

All formulas are evaluated in exact rational arithmetic and converted to float
at the boundary, so large powers of q never cancel catastrophically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


def lambda_C(n: int, q: int = 2) -> float:
    """Subleading eigenvalue of the full five-gate period on n sites.

    ((q^2n - q^4) / (q^2n - q^2) * 1 / (q^2 + 1))^2, exact in rationals.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    qn = Fraction(q) ** (2 * n)
    val = (qn - q**4) / (qn - q**2) / (q**2 + 1)
    return float(val * val)


def lambda_Cprime(n: int, q: int = 2) -> float:
    """Subleading eigenvalue of the censored three-gate period.

    ((q^2 - 1) / (q^n - q^(2-n)))^2, exact in rationals.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    val = Fraction(q**2 - 1) / (Fraction(q) ** n - Fraction(q) ** (2 - n))
    return float(val * val)


def brickwork3_lambda(q1: int, q2: int, q3: int) -> float:
    """Subleading eigenvalue of the three-site brickwork with dims (q1, q2, q3)."""
    for q in (q1, q2, q3):
        if q < 2:
            raise ValueError(f"local dimension {q} < 2")
    num = Fraction((q1**2 - 1) * q2**2 * (q3**2 - 1))
    den = Fraction((q1**2 * q2**2 - 1) * (q2**2 * q3**2 - 1))
    return float(num / den)


@dataclass(frozen=True)
class DepthThreshold:
    """Depth and error bounds at which the censored circuit overtakes the full one."""

    depth: int
    eps_additive: float
    eps_multiplicative: float
    depth_specialized: int | None = None


def depth_threshold(
    n: int, t: int, q: int, lam: float, lam_prime: float
) -> DepthThreshold:
    """Smallest repetition count d with q^(2Nt) * lam'^d < lam^d, plus error bounds.

    d = 1 + floor(2Nt log q / log(lam / lam')); the additive bound is
    q^(2Nt) * lam'^d and the multiplicative bound is half of it.  For
    q = t = 2 a specialized display of the same threshold is evaluated as a
    cross-check; note its prefactor convention differs (8^N vs 16^N), which
    does not change the depth.
    """
    if not lam > lam_prime > 0:
        raise ValueError(
            f"no crossover at this N: need lam > lam_prime > 0, got {lam}, {lam_prime}"
        )
    d = 1 + math.floor(2 * n * t * math.log(q) / math.log(lam / lam_prime))
    eps_a = float(q) ** (2 * n * t) * lam_prime**d
    specialized = None
    if q == 2 and t == 2:
        inner = abs((1.0 - 16.0 * 4.0 ** (-n)) / 15.0)
        denom = 1.0 + math.log2(inner) / n
        specialized = 1 + math.floor(2.0 / denom)
    return DepthThreshold(d, eps_a, eps_a / 2.0, specialized)
