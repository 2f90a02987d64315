"""Graph representation and the independent-set structure of the cost landscape.

Graphs live on at most 24 nodes so that full state vectors of length 2**n
stay in desk memory.  Node subsets are plain Python ints used as bitmasks
(bit i set means node i is in the subset); there is no wrapper class.

Maximal independent sets are the local minima of the node-count cost
function, so most of this module is about enumerating and classifying them:
sizes, degeneracy classes, and pairs of equal-size sets two bit flips apart
(the pairs that couple at second order in the transverse field).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

MAX_NODES = 24


class GraphParseError(ValueError):
    """Malformed instance text; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with per-node neighbor bitmasks."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_NODES:
            raise ValueError(f"node count must be in [1, {MAX_NODES}], got {self.n}")
        if len(self.adj) != self.n:
            raise ValueError("adjacency length does not match node count")
        full = self.full_mask
        for i, row in enumerate(self.adj):
            if row & ~full:
                raise ValueError(f"adjacency of node {i} has bits beyond n")
            if row >> i & 1:
                raise ValueError(f"self-loop at node {i}")
            for j in _bits(row):
                if not self.adj[j] >> i & 1:
                    raise ValueError(f"adjacency not symmetric between {i} and {j}")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def degree(self, i: int) -> int:
        return self.adj[i].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        """Edges as (i, j) pairs with i < j, lexicographically sorted."""
        return [(i, j) for i in range(self.n) for j in _bits(self.adj[i]) if i < j]

    def is_independent(self, mask: int) -> bool:
        return all(self.adj[i] & mask == 0 for i in _bits(mask))

    def is_maximal_independent(self, mask: int) -> bool:
        """Independent, and every outside node has a neighbor inside."""
        if not self.is_independent(mask):
            return False
        outside = self.full_mask & ~mask
        return all(self.adj[i] & mask for i in _bits(outside))

    def violated_edges(self, mask: int) -> int:
        """Number of edges with both endpoints in the subset."""
        return sum((self.adj[i] & mask).bit_count() for i in _bits(mask)) // 2


def _bits(mask: int):
    """Yield the set bit positions of a mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def from_edges(n: int, edges) -> Graph:
    adj = [0] * n
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return Graph(n, tuple(adj))


def parse_graph(text: str) -> Graph:
    """Parse the plain-text instance format.

    Line 1 is the node count n; every following non-empty line is an edge
    "u v" with 0-based endpoints.  Lines starting with '#' are comments.
    Duplicate edge lines collapse to a single edge.
    """
    n = None
    adj: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError:
                raise GraphParseError(f"expected node count, got {line!r}", lineno) from None
            if not 1 <= n <= MAX_NODES:
                raise GraphParseError(f"node count must be in [1, {MAX_NODES}], got {n}", lineno)
            adj = [0] * n
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"non-integer endpoint in {line!r}", lineno) from None
        if u == v:
            raise GraphParseError(f"self-loop at node {u}", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"node index out of range in {line!r}", lineno)
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    if n is None:
        raise GraphParseError("empty instance", 1)
    return Graph(n, tuple(adj))


def generate_graph(kind: str, params: tuple[int | float, ...], seed: int | None = None) -> Graph:
    """Deterministic graph families plus seeded G(n, p).

    Kinds: empty(n), complete(n), cycle(n), complete_bipartite(a, b),
    split(k, m), random_gnp(n, p).  split(k, m) is a k-clique fully joined
    to an m-node independent set, a worst case rich in equal-size minima
    two bit flips apart.
    """
    if kind == "empty":
        (n,) = _int_params(kind, params, 1)
        return from_edges(n, [])
    if kind == "complete":
        (n,) = _int_params(kind, params, 1)
        return from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
    if kind == "cycle":
        (n,) = _int_params(kind, params, 1)
        if n < 3:
            raise ValueError("cycle needs at least 3 nodes")
        return from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "complete_bipartite":
        a, b = _int_params(kind, params, 2)
        if a < 1 or b < 1:
            raise ValueError("complete_bipartite parts must be nonempty")
        return from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])
    if kind == "split":
        k, m = _int_params(kind, params, 2)
        if k < 1 or m < 1:
            raise ValueError("split needs k >= 1 and m >= 1")
        edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
        edges += [(i, k + j) for i in range(k) for j in range(m)]
        return from_edges(k + m, edges)
    if kind == "random_gnp":
        if len(params) != 2:
            raise ValueError("random_gnp takes (n, p)")
        n, p = int(params[0]), float(params[1])
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"edge probability must be in [0, 1], got {p}")
        if seed is None:
            raise ValueError("random_gnp requires a seed")
        rng = random.Random(seed)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        return from_edges(n, edges)
    raise ValueError(f"unknown graph kind {kind!r}")


def _int_params(kind, params, count):
    if len(params) != count:
        raise ValueError(f"{kind} takes {count} parameter(s), got {len(params)}")
    return tuple(int(p) for p in params)


@dataclass(frozen=True)
class MinimaCatalog:
    """All maximal independent sets of a graph, classified.

    sets            masks, ascending by value
    sizes           popcounts, aligned with sets
    mis_size        size of the largest set(s)
    degeneracy_classes  (size, set-index tuple) groups, largest size first
    close_pairs     index pairs (i < j) at Hamming distance exactly 2;
                    such pairs always have equal size
    """

    sets: tuple[int, ...]
    sizes: tuple[int, ...]
    mis_size: int
    degeneracy_classes: tuple[tuple[int, tuple[int, ...]], ...]
    close_pairs: tuple[tuple[int, int], ...]

    def mis_states(self) -> tuple[int, ...]:
        return tuple(s for s, k in zip(self.sets, self.sizes) if k == self.mis_size)

    def local_states(self) -> tuple[int, ...]:
        return tuple(s for s, k in zip(self.sets, self.sizes) if k < self.mis_size)

    def close_partners(self, index: int) -> tuple[int, ...]:
        out = []
        for i, j in self.close_pairs:
            if i == index:
                out.append(j)
            elif j == index:
                out.append(i)
        return tuple(out)


def enumerate_maximal_independent_sets(g: Graph) -> MinimaCatalog:
    """Enumerate every maximal independent set with a pivoting recursion.

    A maximal independent set of g is a maximal clique of the complement,
    so this runs Bron-Kerbosch with pivoting on complement adjacency,
    entirely on bitmasks.
    """
    full = g.full_mask
    # complement adjacency, self excluded
    cadj = tuple((full ^ g.adj[i]) & ~(1 << i) for i in range(g.n))
    found: list[int] = []

    def expand(r: int, p: int, x: int):
        if p == 0 and x == 0:
            found.append(r)
            return
        pivot_pool = p | x
        pivot = max(_bits(pivot_pool), key=lambda u: (cadj[u] & p).bit_count())
        candidates = p & ~cadj[pivot]
        for v in _bits(candidates):
            bit = 1 << v
            expand(r | bit, p & cadj[v], x & cadj[v])
            p &= ~bit
            x |= bit

    expand(0, full, 0)
    found.sort()

    sizes = tuple(s.bit_count() for s in found)
    mis_size = max(sizes)
    by_size: dict[int, list[int]] = {}
    for idx, k in enumerate(sizes):
        by_size.setdefault(k, []).append(idx)
    classes = tuple(
        (k, tuple(by_size[k])) for k in sorted(by_size, reverse=True)
    )
    close = tuple(
        (i, j)
        for i in range(len(found))
        for j in range(i + 1, len(found))
        if (found[i] ^ found[j]).bit_count() == 2
    )
    return MinimaCatalog(tuple(found), sizes, mis_size, classes, close)


def degenerate_neighbors(g: Graph, s: int) -> list[int]:
    """Equal-size maximal independent sets exactly two flips from s.

    These are reached by removing one node i and adding a node j whose only
    neighbor inside s was i; the result must itself be maximal.
    """
    if not g.is_independent(s):
        raise ValueError("state is not an independent set")
    if not g.is_maximal_independent(s):
        raise ValueError("state is not maximal")
    out = []
    outside = g.full_mask & ~s
    for j in _bits(outside):
        inside = g.adj[j] & s
        if inside.bit_count() != 1:
            continue
        i = inside.bit_length() - 1
        t = (s & ~inside) | (1 << j)
        if g.is_maximal_independent(t):
            out.append(t)
    return sorted(set(out))


@dataclass(frozen=True)
class RepairPath:
    """Greedy descent record: visited states and the nodes removed."""

    states: tuple[int, ...]
    removed: tuple[int, ...]

    @property
    def result(self) -> int:
        return self.states[-1]


def greedy_repair(g: Graph, c: float, s: int) -> RepairPath:
    """Descend to an independent set by removing violating nodes.

    At each step the node with the most violated incident edges goes
    (ties to the lowest index), which strictly decreases the bilinear
    energy c * (violated edge count).  Demonstrates that the edge-penalty
    term alone has no local minima: any state reaches an independent set
    without the energy ever increasing.
    """
    if c <= 0:
        raise ValueError("penalty coefficient must be positive")
    states = [s]
    removed = []
    cur = s
    while g.violated_edges(cur) > 0:
        worst, worst_count = -1, 0
        for i in _bits(cur):
            k = (g.adj[i] & cur).bit_count()
            if k > worst_count:
                worst, worst_count = i, k
        cur &= ~(1 << worst)
        removed.append(worst)
        states.append(cur)
    return RepairPath(tuple(states), tuple(removed))
