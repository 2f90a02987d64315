"""Independent brute-force and dense oracles used by the test suite.

Nothing here shares code with the modules under test: energies are
recomputed from edge lists with vectorized numpy arithmetic, Hamiltonians
are materialized as dense matrices element by element, and eigenvalues
come from full diagonalization.  Slow and simple on purpose; hard limits
keep everything at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .model import AnnealInstance

_FD_STEP = 1e-3
_DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class Landscape:
    """Exhaustive scan of all 2**n states.

    energies[m] is the cost of mask m; local_minima[m] is True when every
    single bit flip strictly raises the energy.
    """

    energies: np.ndarray
    local_minima: np.ndarray

    def minima_masks(self) -> list[int]:
        return [int(m) for m in np.flatnonzero(self.local_minima)]


def brute_force_landscape(g: Graph, c: float) -> Landscape:
    if g.n > 16:
        raise ValueError("brute force capped at 16 nodes")
    dim = 1 << g.n
    masks = np.arange(dim, dtype=np.uint32)
    energies = -np.bitwise_count(masks).astype(np.float64)
    for i in range(g.n):
        for j in range(i + 1, g.n):
            if g.adj[i] >> j & 1:
                energies += c * ((masks >> i) & (masks >> j) & 1)
    local = np.ones(dim, dtype=bool)
    for i in range(g.n):
        flipped = masks ^ (1 << i)
        local &= energies[flipped] > energies
    return Landscape(energies, local)


def dense_hamiltonian(inst: AnnealInstance, lam: float) -> np.ndarray:
    """Materialize H(lam) entry by entry from the cost function and driver."""
    g = inst.graph
    if g.n > 16:
        raise ValueError("dense oracle capped at 16 nodes")
    dim = 1 << g.n
    land = brute_force_landscape(g, inst.c)
    h = np.diag(land.energies)
    idx = np.arange(dim)
    for i in range(g.n):
        h[idx, idx ^ (1 << i)] -= lam * inst.driver.amplitudes[i]
    return h


def _select_tracked(eigvals, eigvecs, targets: list[int]) -> int:
    """Index of the eigenvalue adiabatically connected to the target span.

    Picks, among eigenvectors carrying more than half their weight in the
    span of the target basis states, the lowest one (the manifold bottom).
    Falls back to the maximal projection when the perturbation has already
    spread the states out.
    """
    weights = (eigvecs[targets, :] ** 2).sum(axis=0)
    heavy = np.flatnonzero(weights > 0.5)
    if heavy.size:
        return int(heavy[0])
    return int(np.argmax(weights))


def finite_difference_e2(inst: AnnealInstance, target: int | list[int], step: float = _FD_STEP) -> float:
    """Second-order energy coefficient by finite differences in lam.

    The spectrum is even in lam, so E(h) - E(0) = E2 h^2 + E4 h^4 + ...;
    one Richardson step on (E(h) - E(0)) / h^2 removes the h^2 error and
    leaves O(h^4) truncation.
    """
    targets = [target] if isinstance(target, int) else list(target)
    e0 = _tracked_energy(inst, 0.0, targets)

    def quotient(h: float) -> float:
        return (_tracked_energy(inst, h, targets) - e0) / h**2

    d1 = quotient(step)
    d2 = quotient(step / 2)
    return (4 * d2 - d1) / 3


def _tracked_energy(inst: AnnealInstance, lam: float, targets: list[int]) -> float:
    h = dense_hamiltonian(inst, lam)
    if lam == 0.0:
        return float(np.min(np.diag(h)[targets]))
    eigvals, eigvecs = np.linalg.eigh(h)
    k = _select_tracked(eigvals, eigvecs, targets)
    # ambiguity matters only when the tracked level itself is in a cluster
    for neighbor in (k - 1, k + 1):
        if 0 <= neighbor < eigvals.size and abs(eigvals[neighbor] - eigvals[k]) < 1e-10:
            raise ValueError(f"eigenvalue tracking ambiguous near level {k} at lam={lam}")
    return float(eigvals[k])


def rs_series(inst: AnnealInstance, target: int | list[int], max_order: int = 10) -> dict[int, float]:
    """Rayleigh-Schrodinger energy coefficients up to max_order.

    The unperturbed operator is diagonal, so the resolvent solve in the
    complement of the degenerate eigenspace is an exact componentwise
    division.  Non-degenerate levels use the standard recursion with
    intermediate normalization; a degenerate level gets the effective
    second-order matrix over its full equal-energy eigenspace, which is as
    far as the plain recursion is valid, so max_order caps at 2 there.
    Odd orders vanish identically and are returned as exact zeros.
    """
    g = inst.graph
    if g.n > 10:
        raise ValueError("series oracle capped at 10 nodes")
    if max_order > 10:
        raise ValueError("series oracle capped at order 10")
    targets = [target] if isinstance(target, int) else list(target)
    dim = 1 << g.n
    land = brute_force_landscape(g, inst.c)
    diag = land.energies
    e0 = float(diag[targets[0]])
    for t in targets:
        if abs(diag[t] - e0) > _DEGENERACY_TOL:
            raise ValueError("target states do not share an unperturbed energy")

    # full eigenspace: every basis state at the unperturbed energy
    space = np.flatnonzero(np.abs(diag - e0) <= _DEGENERACY_TOL)
    for a in space:
        for b in space:
            if a < b and int(a ^ b).bit_count() == 1:
                raise ValueError("degenerate eigenspace contains states one flip apart")

    v = np.zeros((dim, dim))
    idx = np.arange(dim)
    for i in range(g.n):
        v[idx, idx ^ (1 << i)] -= inst.driver.amplitudes[i]

    coeffs: dict[int, float] = {0: e0}
    if space.size > 1:
        if max_order > 2:
            raise ValueError("degenerate levels are supported to order 2 only")
        resolvent = np.zeros(dim)
        outside = np.abs(diag - e0) > _DEGENERACY_TOL
        resolvent[outside] = 1.0 / (e0 - diag[outside])
        w2 = (v[space, :] * resolvent[None, :]) @ v[:, space]
        eigvals = np.linalg.eigvalsh(w2)
        coeffs[1] = 0.0
        coeffs[2] = float(eigvals[0])
        return coeffs

    s = targets[0]
    resolvent = np.zeros(dim)
    outside = idx != s
    resolvent[outside] = 1.0 / (e0 - diag[outside])
    psi = {0: np.zeros(dim)}
    psi[0][s] = 1.0
    for q in range(1, max_order + 1):
        coeffs[q] = float(v[s, :] @ psi[q - 1])
        rhs = v @ psi[q - 1]
        for j in range(1, q + 1):
            rhs -= coeffs[j] * psi[q - j]
        psi[q] = resolvent * rhs
    return coeffs
