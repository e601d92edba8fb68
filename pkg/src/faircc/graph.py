"""Complete signed graphs, clusterings, and the disagreement cost."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SignedGraph",
    "Clustering",
    "all_pairs",
    "pair_index",
    "correlation_cost",
    "correlation_cost_on_subset",
]


def all_pairs(n: int) -> list[tuple[int, int]]:
    """All unordered vertex pairs (u, v) with u < v, in lexicographic order."""
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def pair_index(u: int, v: int, n: int) -> int:
    """Position of pair (u, v) in the lexicographic ordering of all_pairs(n)."""
    if u > v:
        u, v = v, u
    if u == v or u < 0 or v >= n:
        raise ValueError(f"({u}, {v}) is not a vertex pair of a complete graph on {n} vertices")
    return u * (n - 1) - u * (u - 1) // 2 + (v - u - 1)


def normalize_pairs(pairs, n: int) -> set[tuple[int, int]]:
    """Validate an edge subset and normalize each pair to (min, max)."""
    out = set()
    for u, v in pairs:
        u, v = int(u), int(v)
        if u > v:
            u, v = v, u
        if u == v or u < 0 or v >= n:
            raise ValueError(f"({u}, {v}) is not a vertex pair of a complete graph on {n} vertices")
        out.add((u, v))
    return out


@dataclass(frozen=True, eq=False)
class SignedGraph:
    """Complete graph on n vertices with a +/- label on every unordered pair.

    ``pos`` is the symmetric boolean sign matrix: pos[u, v] is True for a
    positive (similar) pair. The diagonal is unused and kept False.
    """

    n: int
    pos: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.pos, dtype=bool)
        if self.n < 1:
            raise ValueError("a signed graph needs at least one vertex")
        if pos.shape != (self.n, self.n):
            raise ValueError(f"sign matrix must be {self.n}x{self.n}, got {pos.shape}")
        if not np.array_equal(pos, pos.T):
            raise ValueError("sign matrix must be symmetric")
        if pos.diagonal().any():
            raise ValueError("diagonal entries must be False (no self-pairs)")
        object.__setattr__(self, "pos", pos)
        pos.setflags(write=False)

    @classmethod
    def from_positive_pairs(cls, n: int, positive) -> "SignedGraph":
        """Build from the set of positive pairs; everything else is negative."""
        pos = np.zeros((n, n), dtype=bool)
        for u, v in normalize_pairs(positive, n):
            pos[u, v] = pos[v, u] = True
        return cls(n, pos)

    @classmethod
    def from_condensed(cls, n: int, signs) -> "SignedGraph":
        """Build from a boolean vector over all_pairs(n) (True = positive)."""
        signs = np.asarray(signs, dtype=bool)
        m = n * (n - 1) // 2
        if signs.shape != (m,):
            raise ValueError(f"expected {m} pair signs, got {signs.shape}")
        pos = np.zeros((n, n), dtype=bool)
        iu = np.triu_indices(n, k=1)
        pos[iu] = signs
        pos |= pos.T
        return cls(n, pos)

    @property
    def num_pairs(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def num_positive(self) -> int:
        return int(np.count_nonzero(self.condensed()))

    @property
    def num_negative(self) -> int:
        return self.num_pairs - self.num_positive

    def condensed(self) -> np.ndarray:
        """Signs as a boolean vector over all_pairs(n), True = positive."""
        iu = np.triu_indices(self.n, k=1)
        return self.pos[iu]

    def sign(self, u: int, v: int) -> int:
        """+1 for a positive pair, -1 for a negative pair."""
        if u == v:
            raise ValueError("no self-pairs in a complete signed graph")
        return 1 if self.pos[u, v] else -1

    def positive_pairs(self) -> list[tuple[int, int]]:
        iu, iv = np.triu_indices(self.n, k=1)
        keep = self.pos[iu, iv]
        return list(zip(iu[keep].tolist(), iv[keep].tolist()))

    def flipped(self) -> "SignedGraph":
        """The graph with every pair sign inverted."""
        pos = ~self.pos
        np.fill_diagonal(pos, False)
        return SignedGraph(self.n, pos)


@dataclass(frozen=True, eq=False)
class Clustering:
    """Partition of vertices 0..n-1 given by a cluster-id assignment.

    ``singletons`` marks the vertices emitted as degenerate singleton
    clusters; each of them must be alone in its cluster. Non-degenerate
    clusters are everything else (including deliberately carved size-1
    clusters, which are not listed in ``singletons``).
    """

    assignment: np.ndarray
    singletons: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        a = np.array(self.assignment, dtype=np.int64, copy=True)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("assignment must be a nonempty 1-d array of cluster ids")
        if a.min() < 0:
            raise ValueError("cluster ids must be nonnegative")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)
        sing = frozenset(int(v) for v in self.singletons)
        object.__setattr__(self, "singletons", sing)
        sizes = np.bincount(a)
        for v in sing:
            if not 0 <= v < a.size:
                raise ValueError(f"singleton vertex {v} out of range")
            if sizes[a[v]] != 1:
                raise ValueError(f"degenerate vertex {v} shares its cluster with others")

    @property
    def n(self) -> int:
        return int(self.assignment.size)

    @classmethod
    def from_blocks(cls, n: int, blocks, degenerate=()) -> "Clustering":
        """Build from explicit member lists; blocks must partition 0..n-1."""
        a = np.full(n, -1, dtype=np.int64)
        for cid, block in enumerate(blocks):
            for v in block:
                v = int(v)
                if not 0 <= v < n:
                    raise ValueError(f"vertex {v} out of range")
                if a[v] != -1:
                    raise ValueError(f"vertex {v} appears in two blocks")
                a[v] = cid
        if (a < 0).any():
            missing = np.flatnonzero(a < 0).tolist()
            raise ValueError(f"blocks do not cover vertices {missing}")
        return cls(a, frozenset(int(v) for v in degenerate))

    def blocks(self) -> list[np.ndarray]:
        """Clusters as sorted member arrays, ordered by cluster id."""
        return [np.flatnonzero(self.assignment == cid) for cid in np.unique(self.assignment)]

    def nondegenerate_blocks(self) -> list[np.ndarray]:
        return [b for b in self.blocks() if not (b.size == 1 and int(b[0]) in self.singletons)]

    def num_clusters(self) -> int:
        return int(np.unique(self.assignment).size)

    def to_dict(self) -> dict:
        return {
            "assignment": self.assignment.tolist(),
            "singletons": sorted(self.singletons),
        }


def correlation_cost(g: SignedGraph, c: Clustering) -> int:
    """Disagreements of a clustering: negative pairs inside clusters plus
    positive pairs across clusters."""
    if c.n != g.n:
        raise ValueError(f"clustering covers {c.n} vertices but graph has {g.n}")
    a = c.assignment
    iu = np.triu_indices(g.n, k=1)
    same = a[iu[0]] == a[iu[1]]
    pos = g.pos[iu]
    return int(np.count_nonzero(pos & ~same) + np.count_nonzero(~pos & same))


def correlation_cost_on_subset(g: SignedGraph, c: Clustering, pairs) -> int:
    """Disagreement count restricted to an edge subset.

    With the full pair set this equals correlation_cost; disjoint subsets
    add up.
    """
    if c.n != g.n:
        raise ValueError(f"clustering covers {c.n} vertices but graph has {g.n}")
    a = c.assignment
    total = 0
    for u, v in normalize_pairs(pairs, g.n):
        same = a[u] == a[v]
        if g.pos[u, v]:
            total += 0 if same else 1
        else:
            total += 1 if same else 0
    return total
