"""Social graphs the households live on: generators, metrics, serialization.

Graphs are undirected, simple (no self-loops or multi-edges), and immutable
after construction, so they can be shared freely across threads. Node index
equals household index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path


class DisconnectedGraphError(ValueError):
    """Raised when a metric requires connectivity and the graph lacks it."""


class GraphSampleError(RuntimeError):
    """Raised when rejection sampling fails to produce an admissible graph."""


class SocialGraph:
    """Undirected simple graph in CSR-style adjacency form.

    Every node must have at least one neighbor; a household without anyone
    to compare against would never move.
    """

    __slots__ = ("n", "indptr", "indices")

    def __init__(self, n: int, edges: np.ndarray):
        """Build from an (m, 2) integer edge array (each undirected edge once)."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if n < 2:
            raise ValueError(f"graph needs at least 2 nodes, got {n}")
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loops are not allowed")
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        canon = lo * n + hi
        if np.unique(canon).size != canon.size:
            raise ValueError("duplicate edges are not allowed")
        heads = np.concatenate([edges[:, 0], edges[:, 1]])
        tails = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.lexsort((tails, heads))
        heads, tails = heads[order], tails[order]
        degrees = np.bincount(heads, minlength=n)
        if edges.size == 0 or degrees.min() == 0:
            isolated = int(np.argmin(degrees)) if edges.size else 0
            raise ValueError(f"node {isolated} has no neighbors")
        self.n = n
        self.indptr = np.concatenate([[0], np.cumsum(degrees)]).astype(np.int64)
        self.indices = tails.astype(np.int64)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def n_edges(self) -> int:
        return self.indices.size // 2

    def edges(self) -> np.ndarray:
        """All edges as an (m, 2) array with i < j, sorted."""
        out = []
        for i in range(self.n):
            for j in self.neighbors(i):
                if i < j:
                    out.append((i, int(j)))
        return np.asarray(out, dtype=np.int64)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SocialGraph)
            and self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def to_edge_list(self, path) -> None:
        """Write one '0-indexed i j' pair per line."""
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"# nodes {self.n}\n")
            for i, j in self.edges():
                fh.write(f"{i} {j}\n")

    @classmethod
    def from_edge_list(cls, path) -> "SocialGraph":
        n = None
        edges = []
        with open(path, encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    if line.startswith("# nodes"):
                        n = int(line.split()[2])
                    continue
                i, j = line.split()
                edges.append((int(i), int(j)))
        arr = np.asarray(edges, dtype=np.int64)
        if n is None:
            n = int(arr.max()) + 1
        return cls(n, arr)


def complete_graph(n: int) -> SocialGraph:
    """Every pair of the n nodes connected."""
    if n < 2:
        raise ValueError(f"complete graph needs n >= 2, got {n}")
    ii, jj = np.triu_indices(n, k=1)
    return SocialGraph(n, np.column_stack([ii, jj]))


def _gnp_edges(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    ii, jj = np.triu_indices(n, k=1)
    keep = rng.random(ii.size) < p
    return np.column_stack([ii[keep], jj[keep]])


def erdos_renyi(
    n: int,
    p: float,
    rng: np.random.Generator,
    *,
    require_connected: bool = False,
    max_attempts: int = 1000,
) -> SocialGraph:
    """G(n, p) sample, rejected until it has no isolated node.

    With ``require_connected`` the stricter full-connectivity policy is used
    instead. Raises GraphSampleError after ``max_attempts`` rejections.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}")
    for _ in range(max_attempts):
        edges = _gnp_edges(n, p, rng)
        if edges.size == 0:
            continue
        degrees = np.bincount(edges.ravel(), minlength=n)
        if degrees.min() == 0:
            continue
        graph = SocialGraph(n, edges)
        if require_connected and not is_connected(graph):
            continue
        return graph
    raise GraphSampleError(
        f"no admissible G({n}, {p}) sample in {max_attempts} attempts; "
        "p is likely too small for the no-isolated-node policy"
    )


def watts_strogatz(
    n: int, k_ring: int, p_rewire: float, rng: np.random.Generator
) -> SocialGraph:
    """Ring lattice of degree k_ring with each edge rewired with prob p_rewire."""
    if k_ring % 2 != 0 or not 2 <= k_ring < n:
        raise ValueError(f"k_ring must be even with 2 <= k_ring < n, got {k_ring}")
    if not 0.0 <= p_rewire <= 1.0:
        raise ValueError(f"p_rewire must be in [0, 1], got {p_rewire}")
    # Edge set as python set of (lo, hi); n is at most a few thousand here.
    edge_set = set()
    for offset in range(1, k_ring // 2 + 1):
        for i in range(n):
            j = (i + offset) % n
            edge_set.add((min(i, j), max(i, j)))
    # Rewire the clockwise edges in the standard order: offsets outward,
    # nodes in index order. The near endpoint is kept.
    for offset in range(1, k_ring // 2 + 1):
        for i in range(n):
            if rng.random() >= p_rewire:
                continue
            j = (i + offset) % n
            old = (min(i, j), max(i, j))
            if old not in edge_set:
                continue
            candidates = [
                m for m in range(n) if m != i and (min(i, m), max(i, m)) not in edge_set
            ]
            if not candidates:
                continue
            m = candidates[rng.integers(len(candidates))]
            edge_set.remove(old)
            edge_set.add((min(i, m), max(i, m)))
    return SocialGraph(n, np.asarray(sorted(edge_set), dtype=np.int64))


def mean_degree(graph: SocialGraph) -> float:
    """Average number of neighbors, 2*|E|/n."""
    return 2.0 * graph.n_edges / graph.n


def _distance_matrix(graph: SocialGraph) -> np.ndarray:
    data = np.ones(graph.indices.size, dtype=np.int8)
    adj = csr_matrix((data, graph.indices, graph.indptr), shape=(graph.n, graph.n))
    return shortest_path(adj, method="D", unweighted=True, directed=False)


def is_connected(graph: SocialGraph) -> bool:
    return bool(np.all(np.isfinite(_distance_matrix(graph))))


def avg_shortest_path(graph: SocialGraph) -> float:
    """Mean BFS hop distance over all ordered pairs i != j."""
    dist = _distance_matrix(graph)
    np.fill_diagonal(dist, 0.0)
    if not np.all(np.isfinite(dist)):
        i, j = np.argwhere(~np.isfinite(dist))[0]
        raise DisconnectedGraphError(f"no path from node {i} to node {j}")
    n = graph.n
    return float(dist.sum()) / (n * (n - 1))


@dataclass(frozen=True)
class TopologySpec:
    """Declarative graph recipe, sampled per run."""

    kind: str = "complete"  # complete | er | ws
    p: float = 0.1
    k_ring: int = 4
    p_rewire: float = 0.1
    require_connected: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("complete", "er", "ws"):
            raise ValueError(f"unknown topology kind {self.kind!r}")

    def sample(self, n: int, rng: np.random.Generator) -> SocialGraph:
        if self.kind == "complete":
            return complete_graph(n)
        if self.kind == "er":
            return erdos_renyi(
                n, self.p, rng, require_connected=self.require_connected
            )
        return watts_strogatz(n, self.k_ring, self.p_rewire, rng)
