"""Non-increasing rearrangement and prefix-interval constants.

The rearrangement of a tree weight is an exact step function on (0, 1]
whose breakpoints are integer multiples of the leaf measure.  Prefix
averages over (0, t] are exact piecewise-constant integrals, and the
reverse-Holder / Muckenhoupt constants over prefix intervals are computed
as a sup over t: every breakpoint is evaluated, and inside each step the
single interior stationary point of the ratio is solved in closed form
(the log-derivative equation there is linear in t).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .weight import DyadicWeight

T_SLACK = 1e-12


@dataclass(frozen=True)
class StepFunction:
    """Left-continuous, non-increasing step function on (0, 1].

    values[i] is taken on (breakpoints[i-1], breakpoints[i]], with an
    implicit leading breakpoint at 0; the last breakpoint is 1.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        bp = np.array(self.breakpoints, dtype=np.float64)
        vals = np.array(self.values, dtype=np.float64)
        if bp.ndim != 1 or bp.shape != vals.shape or bp.size == 0:
            raise ValueError("breakpoints and values must be equal-length 1-d arrays")
        if bp[0] <= 0 or np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing and positive")
        if abs(bp[-1] - 1.0) > T_SLACK:
            raise ValueError(f"last breakpoint must be 1, got {bp[-1]}")
        if np.any(vals < 0) or np.any(np.diff(vals) > 0):
            raise ValueError("values must be non-negative and non-increasing")
        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints, prepend=0.0)

    def __call__(self, t: float) -> float:
        """Value at t in (0, 1] (left-continuous)."""
        t = _check_t(t)
        i = int(np.searchsorted(self.breakpoints, t, side="left"))
        return float(self.values[i])


@dataclass(frozen=True)
class PrefixReport:
    """A sup-over-prefixes constant with the t attaining it.

    Ties are broken toward the largest t.
    """

    exponent: float
    constant: float
    witness_t: float


def _check_t(t: float) -> float:
    if not 0.0 < t <= 1.0 + T_SLACK:
        raise ValueError(f"t must lie in (0, 1], got {t}")
    return min(float(t), 1.0)


def rearrangement(weight: DyadicWeight) -> StepFunction:
    """Leaf values sorted descending, merged into maximal constant steps.

    Breakpoints are cumulative leaf counts divided by the leaf count, so
    level-set lengths of the result match level-set measures of the weight
    exactly.  The value-sort breaks ties by original leaf index.
    """
    n = weight.space.n_leaves
    order = np.argsort(-weight.values, kind="stable")
    sorted_vals = weight.values[order]
    ends = np.append(np.flatnonzero(np.diff(sorted_vals) != 0), n - 1)
    breakpoints = (ends + 1).astype(np.float64) / n
    return StepFunction(breakpoints=breakpoints, values=sorted_vals[ends])


def step_leaf_values(h: StepFunction, n_leaves: int) -> np.ndarray:
    """Expand a step function whose breakpoints sit on the grid j/n_leaves."""
    counts = np.rint(h.breakpoints * n_leaves).astype(int)
    if not np.allclose(counts / n_leaves, h.breakpoints, rtol=0, atol=1e-12):
        raise ValueError("breakpoints are not multiples of 1/n_leaves")
    return np.repeat(h.values, np.diff(counts, prepend=0))


def prefix_average(h: StepFunction, t: float, q: float = 1.0) -> float:
    """(1/t) * integral of h**q over (0, t], by exact step integration."""
    t = _check_t(t)
    if q < 0 and np.any(h.values == 0):
        raise ValueError("negative exponent requires strictly positive values")
    if t <= h.breakpoints[0]:
        # constant on (0, t]: avoid the v*t/t round trip, which can land an
        # ulp below v and make the prefix average undercut the top value
        return float((h.values[:1] ** q)[0])
    left = np.concatenate(([0.0], h.breakpoints[:-1]))
    seg = np.clip(np.minimum(h.breakpoints, t) - left, 0.0, None)
    powered = h.values if q == 1.0 else h.values ** q
    return float(np.dot(powered, seg)) / t


def _sup_with_ties(ts: np.ndarray, vals: np.ndarray) -> tuple[float, float]:
    """Max of vals with ties resolved toward the largest t."""
    order = np.argsort(ts, kind="stable")
    ts, vals = ts[order], vals[order]
    best = np.max(vals)
    idx = int(np.flatnonzero(vals == best)[-1])
    return float(best), float(ts[idx])


def prefix_rhi_constant(h: StepFunction, q: float) -> PrefixReport:
    """sup over t of prefix_average(h, t, q) / prefix_average(h, t, 1)**q."""
    if q <= 1:
        raise ValueError(f"exponent must be > 1, got {q}")
    if h.values[0] == 0:
        raise ValueError("function is identically zero")
    t = h.breakpoints
    v = h.values
    left = np.concatenate(([0.0], t[:-1]))
    w = t - left
    vq = v ** q
    c1 = np.cumsum(v * w)
    cq = np.cumsum(vq * w)
    ratio_bp = cq * t ** (q - 1.0) / c1 ** q

    # Interior stationary point of the ratio within each step, from the
    # linear-in-t log-derivative equation of N(t) * t**(q-1) / D(t)**q with
    # N, D affine continuations of the two cumulative integrals.
    alpha = (cq - vq * w) - vq * left
    beta = vq
    gamma = (c1 - v * w) - v * left
    delta = v
    denom = q * beta * gamma - alpha * delta
    with np.errstate(divide="ignore", invalid="ignore"):
        ts = (1.0 - q) * alpha * gamma / denom
    interior = np.isfinite(ts) & (ts > left) & (ts < t)
    ts = ts[interior]
    num = alpha[interior] + beta[interior] * ts
    den = gamma[interior] + delta[interior] * ts
    ratio_in = num * ts ** (q - 1.0) / den ** q

    constant, witness = _sup_with_ties(
        np.concatenate([t, ts]), np.concatenate([ratio_bp, ratio_in])
    )
    return PrefixReport(exponent=q, constant=constant, witness_t=witness)


def prefix_muckenhoupt_constant(h: StepFunction, p: float) -> PrefixReport:
    """sup over t of avg(h) * avg(h**(-1/(p-1)))**(p-1) over prefixes (0, t]."""
    if p <= 1:
        raise ValueError(f"exponent must be > 1, got {p}")
    if np.any(h.values == 0):
        raise ValueError("Muckenhoupt constant requires strictly positive values")
    m = -1.0 / (p - 1.0)
    t = h.breakpoints
    v = h.values
    left = np.concatenate(([0.0], t[:-1]))
    w = t - left
    vm = v ** m
    c1 = np.cumsum(v * w)
    cm = np.cumsum(vm * w)
    ratio_bp = c1 * cm ** (p - 1.0) / t ** p

    gamma1 = (c1 - v * w) - v * left
    delta1 = v
    gammam = (cm - vm * w) - vm * left
    deltam = vm
    denom = (1.0 - p) * delta1 * gammam - deltam * gamma1
    with np.errstate(divide="ignore", invalid="ignore"):
        ts = p * gamma1 * gammam / denom
    interior = np.isfinite(ts) & (ts > left) & (ts < t)
    ts = ts[interior]
    d1 = gamma1[interior] + delta1[interior] * ts
    dm = gammam[interior] + deltam[interior] * ts
    ratio_in = d1 * dm ** (p - 1.0) / ts ** p

    constant, witness = _sup_with_ties(
        np.concatenate([t, ts]), np.concatenate([ratio_bp, ratio_in])
    )
    return PrefixReport(exponent=p, constant=constant, witness_t=witness)


def ratio_curve(h: StepFunction, q: float, n_samples: int) -> np.ndarray:
    """Rows (t, R(t)) on a grid of all breakpoints plus a uniform fill."""
    if n_samples < 2:
        raise ValueError(f"need at least 2 samples, got {n_samples}")
    grid = np.unique(
        np.concatenate([np.linspace(1.0 / n_samples, 1.0, n_samples), h.breakpoints])
    )
    ratios = np.array([prefix_average(h, t, q) / prefix_average(h, t, 1.0) ** q for t in grid])
    return np.column_stack([grid, ratios])


def write_curve_csv(path, curve: np.ndarray) -> None:
    lines = ["t,ratio"]
    lines += [f"{t:.17g},{r:.17g}" for t, r in curve]
    from pathlib import Path

    Path(path).write_text("\n".join(lines) + "\n")
