"""Cost function, spin Hamiltonian, and a matrix-free matvec for H(lam).

The classical cost of a node subset S is  -|S| + c * (edges inside S)
with penalty coefficient c > 1, so its minima are maximal independent sets
and its global minima are maximum independent sets.  Substituting
x_i -> (sigma^z_i + 1) / 2 turns the cost into a 2-local spin Hamiltonian

    H_P = sum_i h_i sigma^z_i + sum_{edges} (c/4) sigma^z_i sigma^z_j + offset

with h_i = deg(i) * c / 4 - 1/2 and offset = -n/2 + c * |edges| / 4.  The
constant offset is kept so the diagonal of H_P equals the classical cost
exactly, which lets every test compare spectra without shifting.

The transverse driver is H_B = -sum_i Delta_i sigma^x_i and the full
operator is H(lam) = H_P + lam * H_B, real symmetric for all lam.
State vectors are indexed by subset bitmask.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .graph import Graph


def classical_energy(g: Graph, c: float, s: int) -> float:
    """Cost of subset s: -popcount(s) + c * (violated edge count)."""
    return -s.bit_count() + c * g.violated_edges(s)


@dataclass(frozen=True)
class IsingProblem:
    """Field/coupling form of the cost function.

    Every edge carries the same coupling c/4; h is per node.  The offset
    makes diagonal matrix elements equal classical energies exactly.
    """

    h: tuple[float, ...]
    edges: tuple[tuple[int, int], ...]
    coupling: float
    c: float
    offset: float


def build_problem_hamiltonian(g: Graph, c: float) -> IsingProblem:
    if c <= 1:
        raise ValueError(f"penalty coefficient must exceed 1, got {c}")
    h = tuple(g.degree(i) * c / 4 - 0.5 for i in range(g.n))
    edges = tuple(g.edges())
    offset = -g.n / 2 + c * len(edges) / 4
    return IsingProblem(h, edges, c / 4, c, offset)


@dataclass(frozen=True)
class DriverField:
    """Per-node transverse amplitudes, all >= 0 with at least one > 0."""

    amplitudes: tuple[float, ...]

    def __post_init__(self):
        if any(a < 0 for a in self.amplitudes):
            raise ValueError("driver amplitudes must be non-negative")
        if not any(a > 0 for a in self.amplitudes):
            raise ValueError("at least one driver amplitude must be positive")

    @classmethod
    def uniform(cls, n: int, value: float = 1.0) -> "DriverField":
        return cls((value,) * n)

    @classmethod
    def from_mask(cls, n: int, mask: int, inside: float, outside: float = 1.0) -> "DriverField":
        return cls(tuple(inside if mask >> i & 1 else outside for i in range(n)))


@dataclass(frozen=True)
class AnnealInstance:
    """Graph + penalty coefficient + driver; H(lam) takes lam per call."""

    graph: Graph
    c: float
    driver: DriverField

    def __post_init__(self):
        if self.c <= 1:
            raise ValueError(f"penalty coefficient must exceed 1, got {self.c}")
        if len(self.driver.amplitudes) != self.graph.n:
            raise ValueError("driver length does not match node count")

    @property
    def dim(self) -> int:
        return 1 << self.graph.n


def diagonal_energies(g: Graph, c: float) -> np.ndarray:
    """Classical energies of all 2**n subsets, vectorized over masks."""
    masks = np.arange(1 << g.n, dtype=np.uint32)
    energies = -np.bitwise_count(masks).astype(np.float64)
    for i, j in g.edges():
        energies += c * ((masks >> i) & (masks >> j) & 1)
    return energies


def hamiltonian_matvec(inst: AnnealInstance, lam: float) -> Callable[[np.ndarray], np.ndarray]:
    """Closure computing H(lam) @ v without materializing the matrix.

    The diagonal holds classical energies; the driver contributes
    -lam * Delta_i * v[state with bit i flipped] for every node i, applied
    with strided reshapes instead of index gathers.
    """
    if lam < 0:
        raise ValueError("lam must be non-negative")
    diag = diagonal_energies(inst.graph, inst.c)
    amps = inst.driver.amplitudes
    n = inst.graph.n
    dim = 1 << n

    def matvec(v: np.ndarray) -> np.ndarray:
        if v.shape != (dim,):
            raise ValueError(f"state vector must have shape ({dim},), got {v.shape}")
        out = diag * v
        if lam > 0:
            for i in range(n):
                if amps[i] == 0.0:
                    continue
                flipped = v.reshape(-1, 2, 1 << i)[:, ::-1, :].reshape(dim)
                out -= lam * amps[i] * flipped
        return out

    return matvec


def apply_hamiltonian(inst: AnnealInstance, lam: float, v: np.ndarray) -> np.ndarray:
    """One-shot H(lam) @ v; use hamiltonian_matvec for repeated products."""
    return hamiltonian_matvec(inst, lam)(np.asarray(v, dtype=np.float64))


def flip_cost(g: Graph, c: float, s: int, i: int) -> float:
    """Energy change from toggling node i in state s.

    For an independent set this is 1 when i is in s, and c*d_i - 1 when it
    is not, d_i counting i's neighbors inside s.  A value of -1 (d_i = 0)
    means s is not maximal; d_i = 1 signals an equal-size minimum two flips
    away, where plain second-order formulas stop being reliable.
    """
    return classical_energy(g, c, s ^ (1 << i)) - classical_energy(g, c, s)


def flip_degree(g: Graph, s: int, i: int) -> int:
    """Number of neighbors of node i inside subset s."""
    return (g.adj[i] & s).bit_count()


__all__ = [
    "AnnealInstance",
    "DriverField",
    "IsingProblem",
    "apply_hamiltonian",
    "build_problem_hamiltonian",
    "classical_energy",
    "diagonal_energies",
    "flip_cost",
    "flip_degree",
    "hamiltonian_matvec",
]
