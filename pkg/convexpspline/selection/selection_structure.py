"""
    @file:              selection_structure.py
    @Author:            Convex P-spline contributors

    @Creation Date:     10/2026
    @Last modification: 10/2026

    @Description:       This file contains the SelectionStructure class, which describes the selection matrix F_alpha
                        associated with an index set alpha of active convexity constraints and its block partition.
"""

from dataclasses import dataclass
from typing import Iterable, List, Tuple

import numpy as np

from convexpspline.design.design_system import difference_matrix
from convexpspline.qp.problem import free_nodes, selection_matrix
from convexpspline.utils.exceptions import InvalidArgumentError
from convexpspline.utils.tools import as_index_set


@dataclass(frozen=True)
class SelectionBlock:
    """
    A diagonal block of F_alpha.

    Elements
    --------
    nodes : Tuple[int, int]
        First and last node (1-based, inclusive) of the block.
    free_nodes : Tuple[int, ...]
        Free nodes of the block, including both ends.
    gaps : Tuple[int, ...]
        Distances between consecutive free nodes of the block, each at least 2. Empty for a singleton block.
    """
    nodes: Tuple[int, int]
    free_nodes: Tuple[int, ...]
    gaps: Tuple[int, ...]

    @property
    def size(self) -> int:
        """
        Number m of nodes in the block.
        """
        return self.nodes[1] - self.nodes[0] + 1

    @property
    def w(self) -> int:
        """
        Number of gaps, i.e. the block of F_alpha has w + 1 rows.
        """
        return len(self.gaps)

    @property
    def node_range(self) -> range:
        return range(self.nodes[0], self.nodes[1] + 1)


@dataclass(frozen=True)
class SelectionStructure:
    """
    Selection matrix of an index set of active constraints.

    Elements
    --------
    alpha : Tuple[int, ...]
        1-based indices of active constraints, subset of 1..K_n - 1.
    K_n : int
        Number of intervals.
    free_nodes : Tuple[int, ...]
        Nodes 1 = i_1 < ... < i_l = K_n + 1 that are not basic.
    blocks : Tuple[SelectionBlock, ...]
        Disjoint partition of the nodes 1..K_n + 1.
    F_alpha : np.ndarray
        (l, K_n + 1) selection matrix, block diagonal along `blocks`.
    """
    alpha: Tuple[int, ...]
    K_n: int
    free_nodes: Tuple[int, ...]
    blocks: Tuple[SelectionBlock, ...]
    F_alpha: np.ndarray

    @property
    def ell(self) -> int:
        return len(self.free_nodes)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def basic_nodes(self) -> Tuple[int, ...]:
        return tuple(i + 1 for i in self.alpha)

    def null_space_residual(self) -> float:
        """
        max |(D2)_alpha F_alpha^T|, zero up to rounding.
        """
        if not self.alpha:
            return 0.0

        rows = np.asarray(self.alpha) - 1

        return float(np.max(np.abs(difference_matrix(self.K_n)[rows] @ self.F_alpha.T)))


def _partition(nodes: Tuple[int, ...]) -> Tuple[SelectionBlock, ...]:
    runs: List[List[int]] = [[nodes[0]]]
    for previous, current in zip(nodes[:-1], nodes[1:]):
        if current - previous == 1:
            runs.append([current])
        else:
            runs[-1].append(current)

    return tuple(
        SelectionBlock(
            nodes=(run[0], run[-1]),
            free_nodes=tuple(run),
            gaps=tuple(int(b - a) for a, b in zip(run[:-1], run[1:]))
        )
        for run in runs
    )


def build_selection(
        alpha: Iterable[int],
        K_n: int
) -> SelectionStructure:
    """
    Build the selection matrix F_alpha. The columns of F_alpha^T are the linear splines on the free nodes evaluated at
    the integers 1..K_n + 1, and the blocks are the maximal runs of nodes whose consecutive free nodes are at least
    two apart.

    Parameters
    ----------
    alpha : Iterable[int]
        1-based indices of active constraints, subset of 1..K_n - 1.
    K_n : int
        Number of intervals, at least 2.

    Returns
    -------
    selection : SelectionStructure
        Selection structure.
    """
    if K_n < 2:
        raise InvalidArgumentError(f"K_n must be at least 2, got {K_n}.")

    alpha = as_index_set(alpha, K_n - 1)
    nodes = free_nodes(alpha, K_n)

    return SelectionStructure(
        alpha=alpha,
        K_n=int(K_n),
        free_nodes=nodes,
        blocks=_partition(nodes),
        F_alpha=selection_matrix(alpha, K_n)
    )
