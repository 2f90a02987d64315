"""Shared helpers: tiny named graphs and brute-force reference scans.

The reference scans here are written directly against the subset
definitions (independence, maximality, cost) so they share no code with
the package they check.
"""

from __future__ import annotations

import numpy as np
import pytest

from anticross import generate_graph, parse_graph


@pytest.fixture
def p3():
    return parse_graph("3\n0 1\n1 2")


@pytest.fixture
def k1():
    return generate_graph("empty", (1,))


@pytest.fixture
def k3():
    return generate_graph("complete", (3,))


@pytest.fixture
def c5():
    return generate_graph("cycle", (5,))


@pytest.fixture
def k23():
    # part {0, 1} joined to part {2, 3, 4}; MIS is the 3-side
    return generate_graph("complete_bipartite", (2, 3))


@pytest.fixture
def split72():
    # 7-clique (nodes 0..6) fully joined to independent pair {7, 8}
    return generate_graph("split", (7, 2))


def scan_masks(g):
    return range(1 << g.n)


def is_independent_ref(g, mask):
    return all(
        not (mask >> i & 1 and mask >> j & 1)
        for i in range(g.n)
        for j in range(g.n)
        if g.adj[i] >> j & 1
    )


def is_maximal_ref(g, mask):
    if not is_independent_ref(g, mask):
        return False
    for i in range(g.n):
        if not mask >> i & 1 and is_independent_ref(g, mask | (1 << i)):
            return False
    return True


def maximal_sets_ref(g):
    """All maximal independent sets by scanning every subset."""
    return sorted(m for m in scan_masks(g) if is_maximal_ref(g, m))


def energy_ref(g, c, mask):
    violations = sum(
        1
        for i in range(g.n)
        for j in range(i + 1, g.n)
        if g.adj[i] >> j & 1 and mask >> i & 1 and mask >> j & 1
    )
    return -bin(mask).count("1") + c * violations


def is_connected(g):
    seen, frontier = 1, [0]
    while frontier:
        u = frontier.pop()
        for v in range(g.n):
            if g.adj[u] >> v & 1 and not seen >> v & 1:
                seen |= 1 << v
                frontier.append(v)
    return seen == g.full_mask


def random_graph_stream(seed, n_lo=4, n_hi=8, p_lo=0.2, p_hi=0.85, connected_only=False):
    """Endless deterministic stream of random graphs."""
    rng = np.random.default_rng(seed)
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        p = float(rng.uniform(p_lo, p_hi))
        g = generate_graph("random_gnp", (n, p), seed=int(rng.integers(1 << 30)))
        if connected_only and not is_connected(g):
            continue
        yield g


def minima_all_doubly_covered(g, sets):
    """True when every node outside each maximal set has 2+ neighbors in it."""
    for s in sets:
        for i in range(g.n):
            if not s >> i & 1 and (g.adj[i] & s).bit_count() < 2:
                return False
    return True
