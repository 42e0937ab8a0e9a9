"""Self-improvement exponents for reverse-Holder weights.

Solves for the exponent q > p where ((q-p)/q) * (q/(q-1))**p * C crosses 1,
derives the integrability range [p, p0) with the tree-adjusted constant
k*c - k + 1, and provides the analytic constant of the power weight
u**(-alpha), used as a sharpness oracle.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

ROOT_CAP = 1e9
RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class ExponentResult:
    """Root of the self-improvement equation.

    p0 is +inf when C == 1 (the crossing never happens at finite q);
    residual is NaN in that case.
    """

    p: float
    C: float
    p0: float
    residual: float

    @property
    def finite(self) -> bool:
        return math.isfinite(self.p0)


def _log_f(q: float, p: float, C: float) -> float:
    # log of ((q-p)/q) * (q/(q-1))**p * C, kept in log space so the factor
    # (q/(q-1))**p cannot overflow for q near 1.
    return (
        math.log(q - p)
        - math.log(q)
        + p * (math.log(q) - math.log(q - 1.0))
        + math.log(C)
    )


def _warn_if_not_monotone(p: float, C: float, lo: float, hi: float) -> None:
    grid = np.linspace(lo, hi, 64)
    values = [_log_f(q, p, C) for q in grid]
    if np.any(np.diff(values) < -1e-9):
        warnings.warn(
            f"crossing function is not monotone on ({lo}, {hi}); "
            "reporting the smallest root found from the left",
            RuntimeWarning,
            stacklevel=3,
        )


def p0_solve(p: float, C: float) -> ExponentResult:
    """Smallest root q > p of ((q-p)/q) * (q/(q-1))**p * C = 1.

    Bracket expansion doubles the right end until the crossing function
    exceeds 1; past ROOT_CAP the root is classified as +inf, which covers
    C = 1 exactly (the function stays below 1 on every finite bracket).
    """
    if p <= 1:
        raise ValueError(f"base exponent must be > 1, got {p}")
    if C < 1:
        raise ValueError(f"constant must be >= 1, got {C}")
    lo = p + max(1e-12, p * 1e-12)
    while _log_f(lo, p, C) >= 0.0:  # push the left end into the negative region
        lo = p + (lo - p) / 16.0
    hi = max(2.0 * p, 4.0)
    while _log_f(hi, p, C) <= 0.0:
        hi *= 2.0
        if hi > ROOT_CAP:
            return ExponentResult(p=p, C=C, p0=math.inf, residual=math.nan)
    _warn_if_not_monotone(p, C, lo, hi)
    root = brentq(_log_f, lo, hi, args=(p, C), xtol=1e-15, rtol=8.9e-16, maxiter=200)
    residual = abs(math.exp(_log_f(root, p, C)) - 1.0)
    return ExponentResult(p=p, C=C, p0=float(root), residual=residual)


def improvement_range(p: float, c: float, k: int) -> ExponentResult:
    """Integrability range [p, p0) for a tree weight: p0_solve at k*c - k + 1."""
    if k < 2:
        raise ValueError(f"branching factor must be >= 2, got {k}")
    if c < 1:
        raise ValueError(f"constant must be >= 1, got {c}")
    return p0_solve(p, k * c - k + 1.0)


def power_weight_constant(alpha: float, p: float) -> float:
    """Exact prefix reverse-Holder constant of u**(-alpha) at exponent p.

    The prefix ratio of the power function is t-independent and equals
    (1-alpha)**p / (1-alpha*p); requires alpha*p < 1.
    """
    if p <= 1:
        raise ValueError(f"exponent must be > 1, got {p}")
    if not 0 < alpha or not alpha * p < 1:
        raise ValueError(f"need 0 < alpha and alpha*p < 1, got alpha={alpha}, p={p}")
    return (1.0 - alpha) ** p / (1.0 - alpha * p)
