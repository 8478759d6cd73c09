"""Undirected simple graphs: dense adjacency + neighbor lists, subsets, connectivity."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

logger = logging.getLogger(__name__)


def node_subset(indices, n: int) -> np.ndarray:
    """Normalize an iterable of node ids into a sorted, duplicate-free index array.

    Raises InvalidInputError if any id falls outside [0, n).
    """
    idx = np.unique(np.asarray(list(indices), dtype=np.int64))
    if idx.size and (idx[0] < 0 or idx[-1] >= n):
        raise InvalidInputError(f"node ids must lie in [0, {n}), got range "
                                f"[{idx[0]}, {idx[-1]}]")
    return idx


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph.

    The dense 0/1 adjacency and the per-node neighbor lists are built together
    at construction time and never mutated.
    """

    adj: np.ndarray
    neighbors: tuple = field(repr=False)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def edge_count(self) -> int:
        return int(self.adj.sum()) // 2

    @classmethod
    def from_adjacency(cls, adj) -> "Graph":
        a = np.asarray(adj)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInputError("adjacency must be square")
        if not np.array_equal(a, a.T):
            raise InvalidInputError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise InvalidInputError("adjacency must have zero diagonal")
        a = (a != 0).astype(np.uint8)
        a.setflags(write=False)
        nbrs = tuple(np.flatnonzero(row) for row in a)
        return cls(adj=a, neighbors=nbrs)

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        adj = np.zeros((n, n), dtype=np.uint8)
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidInputError(f"edge ({i}, {j}) out of range for n={n}")
            if i == j:
                continue
            adj[i, j] = adj[j, i] = 1
        return cls.from_adjacency(adj)

    def degrees(self) -> np.ndarray:
        """Row sums of the adjacency matrix."""
        return self.adj.sum(axis=1, dtype=np.int64)

    def restrict(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Submatrix of the adjacency on the given sorted index sets."""
        if rows.size and (rows[0] < 0 or rows[-1] >= self.n):
            raise InvalidInputError("row indices out of range")
        if cols.size and (cols[0] < 0 or cols[-1] >= self.n):
            raise InvalidInputError("column indices out of range")
        return self.adj[np.ix_(rows, cols)]

    def induced_adjacency(self, s: np.ndarray) -> np.ndarray:
        return self.restrict(s, s)

    def is_connected(self, s: np.ndarray) -> bool:
        """Whether the subgraph induced by ``s`` is connected."""
        if s.size == 0:
            raise InvalidInputError("subset must be nonempty")
        return submatrix_is_connected(self.induced_adjacency(s))

    def connected_components(self) -> list:
        """Components as lists of node ids, largest first."""
        seen = np.zeros(self.n, dtype=bool)
        comps = []
        for start in range(self.n):
            if seen[start]:
                continue
            stack = [start]
            seen[start] = True
            comp = [start]
            while stack:
                u = stack.pop()
                for v in self.neighbors[u]:
                    if not seen[v]:
                        seen[v] = True
                        comp.append(v)
                        stack.append(v)
            comps.append(sorted(comp))
        comps.sort(key=len, reverse=True)
        return comps


def submatrix_is_connected(sub: np.ndarray) -> bool:
    """BFS by repeated boolean matrix rows; fast for small dense submatrices."""
    m = sub.shape[0]
    if m == 1:
        return True
    b = sub.astype(bool, copy=False)
    reached = np.zeros(m, dtype=bool)
    reached[0] = True
    frontier = reached.copy()
    while frontier.any():
        new = b[frontier].any(axis=0) & ~reached
        reached |= new
        frontier = new
    return bool(reached.all())


def load_edge_list(path) -> Graph:
    """Read a whitespace-separated edge list.

    Lines starting with ``#`` or ``%`` are comments.  Node ids may be 0- or
    1-based; files whose minimum id is 1 are shifted down.  Self-loops and
    duplicate edges are dropped (counted and logged).
    """
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line[0] in "#%":
                continue
            parts = line.split()
            if len(parts) < 2:
                raise InvalidInputError(f"{path}:{lineno}: expected two node ids, "
                                        f"got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise InvalidInputError(f"{path}:{lineno}: non-integer node id "
                                        f"in {line!r}") from exc
            edges.append((i, j))
    if not edges:
        raise InvalidInputError(f"{path}: no edges found")
    ids = np.array(edges)
    low = ids.min()
    if low == 1:
        ids -= 1
    elif low < 0:
        raise InvalidInputError(f"{path}: negative node id {low}")
    n = int(ids.max()) + 1
    self_loops = 0
    dupes = 0
    seen = set()
    adj = np.zeros((n, n), dtype=np.uint8)
    for i, j in ids:
        if i == j:
            self_loops += 1
            continue
        key = (min(i, j), max(i, j))
        if key in seen:
            dupes += 1
            continue
        seen.add(key)
        adj[i, j] = adj[j, i] = 1
    if self_loops or dupes:
        logger.warning("dropped %d self-loops and %d duplicate edges from %s",
                       self_loops, dupes, path)
    return Graph.from_adjacency(adj)
