"""Independent oracles used by the test suite.

Everything here recomputes quantities from first principles: recursive
per-node summation, plain enumeration over nodes, and dense-grid sup
searches.  Powers and divisions go through numpy elementwise ops, which
are value-deterministic, so the node-enumeration oracle reproduces the
library's cached results bit for bit.
"""
from __future__ import annotations

import numpy as np

from treerhi import DyadicWeight, NodeId, StepFunction, TreeSpace
from treerhi.rearrange import prefix_average


def node_sum_oracle(leaf_integrals: np.ndarray, space: TreeSpace, node: NodeId):
    """Recursive left-to-right sum of leaf integrals under a node."""
    if node.level == space.depth:
        return leaf_integrals[node.index]
    acc = None
    for child in space.children(node):
        part = node_sum_oracle(leaf_integrals, space, child)
        acc = part if acc is None else acc + part
    return acc


def rhi_oracle(weight: DyadicWeight, p: float) -> tuple[float, NodeId]:
    """Brute-force sup of avg(phi**p)/avg(phi)**p over every node."""
    space = weight.space
    leaf1 = weight.values * space.leaf_measure
    leafp = (weight.values ** p) * space.leaf_measure
    best, witness = -np.inf, None
    for node in space.iter_nodes():
        measure = space.node_measure(node)
        a1 = node_sum_oracle(leaf1, space, node) / measure
        if a1 <= 0:
            continue
        ap = node_sum_oracle(leafp, space, node) / measure
        ratio = ap / (np.array([a1]) ** p)[0]
        if ratio > best:
            best, witness = ratio, node
    return float(best), witness


def muckenhoupt_oracle(weight: DyadicWeight, p: float) -> tuple[float, NodeId]:
    space = weight.space
    m = -1.0 / (p - 1.0)
    leaf1 = weight.values * space.leaf_measure
    leafm = (weight.values ** m) * space.leaf_measure
    best, witness = -np.inf, None
    for node in space.iter_nodes():
        measure = space.node_measure(node)
        a1 = node_sum_oracle(leaf1, space, node) / measure
        am = node_sum_oracle(leafm, space, node) / measure
        ratio = a1 * (np.array([am]) ** (p - 1.0))[0]
        if ratio > best:
            best, witness = ratio, node
    return float(best), witness


def maximal_oracle(weight: DyadicWeight) -> np.ndarray:
    """Per leaf, the max average over the ancestor chain, by direct walk."""
    space = weight.space
    out = np.empty(space.n_leaves)
    for leaf in range(space.n_leaves):
        node = NodeId(space.depth, leaf)
        best = -np.inf
        while True:
            best = max(best, weight.node_average(node))
            if node.level == 0:
                break
            node = space.father(node)
        out[leaf] = best
    return out


def dense_grid_prefix_sup(h: StepFunction, q: float, n: int = 100_000) -> float:
    """Dense-grid sup of the prefix reverse-Holder ratio."""
    grid = np.unique(np.concatenate([np.linspace(1.0 / n, 1.0, n), h.breakpoints]))
    best = -np.inf
    for t in grid:
        ratio = prefix_average(h, t, q) / prefix_average(h, t, 1.0) ** q
        best = max(best, ratio)
    return best


def dense_grid_muckenhoupt_sup(h: StepFunction, p: float, n: int = 100_000) -> float:
    m = -1.0 / (p - 1.0)
    grid = np.unique(np.concatenate([np.linspace(1.0 / n, 1.0, n), h.breakpoints]))
    best = -np.inf
    for t in grid:
        ratio = prefix_average(h, t, 1.0) * prefix_average(h, t, m) ** (p - 1.0)
        best = max(best, ratio)
    return best
