"""Weights on a homogeneous tree.

Construction and generators, node averages at arbitrary exponents, the
reverse-Holder and Muckenhoupt constants over all tree nodes, the maximal
operator, and the weak-type (1,1) check.

Node integrals of value**q are accumulated child-to-parent, left to right,
so rounding error grows O(depth) per node and a recursive re-summation
reproduces every cached node sum bit for bit.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .tree import NodeId, TreeSpace

REL_TOL = 1e-12


@dataclass(frozen=True)
class RhiReport:
    """A sup-over-nodes constant with the node attaining it.

    Ties are broken toward the lowest level, then the lowest index.
    """

    exponent: float
    constant: float
    witness: NodeId


@dataclass(frozen=True)
class WeakTypeResult:
    threshold: float
    lhs: float
    rhs: float
    holds: bool


class DyadicWeight:
    """Non-negative leaf values on a TreeSpace with cached per-node sums.

    Immutable after construction: the value array is marked read-only and
    the per-exponent sum caches are append-only.
    """

    def __init__(self, space: TreeSpace, leaf_values) -> None:
        values = np.array(leaf_values, dtype=np.float64)
        if values.shape != (space.n_leaves,):
            raise ValueError(
                f"expected {space.n_leaves} leaf values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("leaf values must be finite")
        if np.any(values < 0):
            raise ValueError("leaf values must be non-negative")
        values.setflags(write=False)
        self.space = space
        self.values = values
        self._sums: dict[float, list[np.ndarray]] = {}

    @classmethod
    def from_leaves(cls, k: int, depth: int, values) -> "DyadicWeight":
        return cls(TreeSpace(k, depth), values)

    def level_sums(self, q: float = 1.0) -> list[np.ndarray]:
        """sums[level][i] = integral of value**q over node (level, i)."""
        key = float(q)
        cached = self._sums.get(key)
        if cached is not None:
            return cached
        if key < 0 and np.any(self.values == 0):
            raise ValueError("negative exponent requires strictly positive values")
        powered = self.values if key == 1.0 else self.values ** key
        sums = [powered * self.space.leaf_measure]
        k = self.space.k
        for _ in range(self.space.depth):
            child = sums[0].reshape(-1, k)
            acc = child[:, 0].copy()
            for j in range(1, k):  # left-to-right keeps the summation order reproducible
                acc += child[:, j]
            sums.insert(0, acc)
        for arr in sums:
            arr.setflags(write=False)
        self._sums[key] = sums
        return sums

    def level_averages(self, q: float = 1.0) -> list[np.ndarray]:
        """avgs[level][i] = average of value**q over node (level, i)."""
        k = float(self.space.k)
        return [s / k ** (-level) for level, s in enumerate(self.level_sums(q))]

    @property
    def total_integral(self) -> float:
        return float(self.level_sums(1.0)[0][0])

    def node_integral(self, node: NodeId, q: float = 1.0) -> float:
        self.space.validate(node)
        return float(self.level_sums(q)[node.level][node.index])

    def node_average(self, node: NodeId, q: float = 1.0) -> float:
        return self.node_integral(node, q) / self.space.node_measure(node)

    def _node_sup(self, per_level) -> tuple[float, NodeId]:
        best = -np.inf
        witness = self.space.root
        for level in range(self.space.depth + 1):
            arr = per_level(level)
            i = int(np.argmax(arr))
            if arr[i] > best:
                best = float(arr[i])
                witness = NodeId(level, i)
        return best, witness

    def dyadic_rhi_constant(self, p: float) -> RhiReport:
        """sup over all nodes I of avg(value**p, I) / avg(value, I)**p.

        Nodes with zero average carry an identically zero weight, where the
        inequality is trivial; they are skipped rather than producing 0/0.
        """
        if p <= 1:
            raise ValueError(f"exponent must be > 1, got {p}")
        if self.total_integral == 0:
            raise ValueError("weight is identically zero")
        s1 = self.level_averages(1.0)
        sp = self.level_averages(p)

        def ratios(level: int) -> np.ndarray:
            a1 = s1[level]
            with np.errstate(divide="ignore", invalid="ignore"):
                r = sp[level] / a1 ** p
            return np.where(a1 > 0, r, -np.inf)

        constant, witness = self._node_sup(ratios)
        return RhiReport(exponent=p, constant=constant, witness=witness)

    def dyadic_muckenhoupt_constant(self, p: float) -> RhiReport:
        """sup over all nodes of avg(value) * avg(value**(-1/(p-1)))**(p-1)."""
        if p <= 1:
            raise ValueError(f"exponent must be > 1, got {p}")
        if np.any(self.values == 0):
            raise ValueError("Muckenhoupt constant requires strictly positive values")
        a1 = self.level_averages(1.0)
        am = self.level_averages(-1.0 / (p - 1.0))

        def ratios(level: int) -> np.ndarray:
            return a1[level] * am[level] ** (p - 1.0)

        constant, witness = self._node_sup(ratios)
        return RhiReport(exponent=p, constant=constant, witness=witness)

    def maximal_function(self) -> np.ndarray:
        """Per leaf, the maximum average over all nodes containing it."""
        avgs = self.level_averages(1.0)
        running = avgs[0].copy()
        for level in range(1, self.space.depth + 1):
            running = np.maximum(np.repeat(running, self.space.k), avgs[level])
        return running

    def weak_type_check(self, threshold: float) -> WeakTypeResult:
        """mu({M > t}) against (1/t) * integral of the weight over {M > t}."""
        if threshold <= 0:
            raise ValueError(f"threshold must be > 0, got {threshold}")
        mask = self.maximal_function() > threshold
        lhs = float(np.count_nonzero(mask)) * self.space.leaf_measure
        rhs = float(self.values[mask].sum()) * self.space.leaf_measure / threshold
        holds = lhs <= rhs + REL_TOL * max(1.0, rhs)
        return WeakTypeResult(threshold=threshold, lhs=lhs, rhs=rhs, holds=holds)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def gen_constant(space: TreeSpace, value: float) -> DyadicWeight:
    if value < 0 or not np.isfinite(value):
        raise ValueError(f"value must be finite and non-negative, got {value}")
    return DyadicWeight(space, np.full(space.n_leaves, float(value)))


def gen_two_value(space: TreeSpace, first: float, second: float) -> DyadicWeight:
    """First half of the leaves at one value, the rest at the other."""
    n = space.n_leaves
    values = np.full(n, float(second))
    values[: n // 2] = float(first)
    return DyadicWeight(space, values)


def gen_power(space: TreeSpace, alpha: float) -> DyadicWeight:
    """Exact cell averages of u**(-alpha) over the leaf cells of [0, 1].

    The closed-form antiderivative u**(1-alpha)/(1-alpha) makes each cell
    average exact, and the cell integrals telescope to 1/(1-alpha).
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    n = space.n_leaves
    h = space.leaf_measure
    edges = np.arange(n + 1, dtype=np.float64) * h
    primitives = edges ** (1.0 - alpha)
    values = np.diff(primitives) / ((1.0 - alpha) * h)
    return DyadicWeight(space, values)


def gen_random(
    space: TreeSpace,
    seed: int,
    low: float = 1e-3,
    high: float = 1e3,
) -> DyadicWeight:
    """Log-uniform leaf values; deterministic for a fixed seed."""
    if not 0 < low <= high:
        raise ValueError(f"need 0 < low <= high, got [{low}, {high}]")
    rng = np.random.default_rng(seed)
    values = np.exp(rng.uniform(np.log(low), np.log(high), space.n_leaves))
    return DyadicWeight(space, values)


# ---------------------------------------------------------------------------
# Weight file format: {"k": int, "depth": int, "leaves": [reals]}
# ---------------------------------------------------------------------------

def save_weight(weight: DyadicWeight, path: str | Path) -> None:
    doc = {
        "k": weight.space.k,
        "depth": weight.space.depth,
        "leaves": [float(v) for v in weight.values],
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def load_weight(path: str | Path) -> DyadicWeight:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed weight file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"weight file {path} must hold an object")
    for field in ("k", "depth", "leaves"):
        if field not in doc:
            raise ValueError(f"weight file {path} is missing {field!r}")
    k, depth, leaves = doc["k"], doc["depth"], doc["leaves"]
    if not isinstance(k, int) or not isinstance(depth, int):
        raise ValueError("k and depth must be integers")
    if not isinstance(leaves, list):
        raise ValueError("leaves must be a list of reals")
    return DyadicWeight.from_leaves(k, depth, leaves)
