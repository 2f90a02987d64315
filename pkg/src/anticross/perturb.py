"""Perturbative corrections in the driver strength and crossing prediction.

Near the end of the anneal the driver term lam * H_B is a small
perturbation of the diagonal cost operator.  First-order corrections
vanish (the driver only flips single bits), so the leading behavior of
every minimum is second order:

    E(lam) = E0 - lam^2 * sum_i Delta_i^2 / B_i + O(lam^4)

with B_i the cost of flipping bit i.  Equal-size minima two flips apart
are degenerate and must be split with an effective coupling matrix
instead; its largest eigenvalue sets the energy of the lowest
superposition, and that is what can dive below the global minimum and
produce an avoided crossing at

    lam* = sqrt((m - m') / -(delta E2)).

The series coefficients grow like the Catalan numbers, which caps the
trustworthy window at lam < 1/2; predictions beyond that are flagged.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import factorial, sqrt

import numpy as np

from .graph import Graph, _bits
from .model import classical_energy, flip_cost, flip_degree

LAMBDA_CRITICAL = 0.5
ENERGY_DEGENERACY_TOL = 1e-9


class NotMaximalError(ValueError):
    """Second-order formulas require a maximal independent set."""


class DegeneratePartnerWarning(UserWarning):
    """Some flip has d_i = 1: an equal-size minimum sits two flips away,
    so the non-degenerate second-order value is unreliable."""


def _flip_costs(g: Graph, c: float, delta, s: int):
    """Per-node (amplitude, flip cost, inside-count) rows for state s."""
    rows = []
    for i in range(g.n):
        b = flip_cost(g, c, s, i)
        rows.append((delta[i], b, flip_degree(g, s, i)))
    return rows


def second_order_nondegenerate(g: Graph, c: float, delta, s: int) -> float:
    """Second-order energy coefficient -sum_i Delta_i^2 / B_i of a minimum."""
    if not g.is_independent(s):
        raise NotMaximalError("state is not an independent set")
    rows = _flip_costs(g, c, delta, s)
    if any(b <= 0 for _, b, _ in rows):
        raise NotMaximalError("state is not maximal: some flip cost is non-positive")
    if any(d == 1 for i, (_, _, d) in enumerate(rows) if not s >> i & 1):
        warnings.warn(
            "a flip with d_i = 1 exists; an equal-size minimum is two flips away",
            DegeneratePartnerWarning,
            stacklevel=2,
        )
    return -sum(a * a / b for a, b, _ in rows)


def energy_to_second_order(g: Graph, c: float, delta, s: int, lam: float) -> float:
    """E0 + lam^2 * E2 for a maximal independent set."""
    return classical_energy(g, c, s) + lam**2 * second_order_nondegenerate(g, c, delta, s)


def qth_order_coefficient(q: int, s: int) -> int:
    """Leading (order-s) part of the qth-order correction for an isolated minimum.

    Equals (-1)^(q/2) * C_{q/2-1} * s with C_k the Catalan numbers; the
    ratio of successive terms approaches 4, so the series converges for
    lam < 1/2.  Odd orders vanish because the driver changes parity.
    """
    if q % 2 == 1:
        raise ValueError("odd-order corrections vanish identically")
    if q < 2:
        raise ValueError("order must be at least 2")
    if s < 1:
        raise ValueError("set size must be at least 1")
    catalan = factorial(q - 2) // (factorial(q // 2 - 1) * factorial(q // 2))
    return (-1) ** (q // 2) * catalan * s


@dataclass(frozen=True)
class DegenerateManifold:
    """Basis states sharing an unperturbed energy.

    restricted=True is the minima-only manifold (each member a maximal
    independent set); restricted=False spans every basis state at that
    energy, which is exact second-order degenerate perturbation theory.
    Members must never be a single flip apart, otherwise first order
    would not vanish.
    """

    energy: float
    states: tuple[int, ...]
    restricted: bool

    def __post_init__(self):
        if not self.states:
            raise ValueError("manifold must contain at least one state")
        for a in self.states:
            for b in self.states:
                if a < b and (a ^ b).bit_count() == 1:
                    raise ValueError("manifold states one flip apart")

    @property
    def size(self) -> int:
        return len(self.states)


def minima_manifold(g: Graph, c: float, states) -> DegenerateManifold:
    """Restricted manifold from equal-size maximal independent sets."""
    states = tuple(sorted(states))
    for s in states:
        if not g.is_maximal_independent(s):
            raise ValueError(f"state {s:#x} is not a maximal independent set")
    energies = [classical_energy(g, c, s) for s in states]
    if max(energies) - min(energies) > ENERGY_DEGENERACY_TOL:
        raise ValueError("states do not share a classical energy")
    return DegenerateManifold(energies[0], states, restricted=True)


def full_manifold(g: Graph, c: float, energy: float) -> DegenerateManifold:
    """Unrestricted manifold: every basis state within tolerance of energy."""
    states = tuple(
        m for m in range(1 << g.n)
        if abs(classical_energy(g, c, m) - energy) <= ENERGY_DEGENERACY_TOL
    )
    return DegenerateManifold(energy, states, restricted=False)


@dataclass(frozen=True)
class EffectiveSecondOrder:
    """Degenerate second-order splitting data.

    a_matrix[k, k'] sums Delta_i * Delta_j / (E_intermediate - E0) over
    ordered two-flip paths from state k to state k' (there-and-back paths
    on the diagonal).  The lowest split energy is e2 = -(largest
    eigenvalue) and coefficients holds its unit eigenvector, entrywise
    positive whenever the path matrix is non-negative and connected.
    """

    a_matrix: np.ndarray
    coefficients: np.ndarray
    e2: float
    restricted: bool


def degenerate_effective_matrix(g: Graph, c: float, delta, manifold: DegenerateManifold) -> EffectiveSecondOrder:
    """Split a degenerate manifold at second order in the driver.

    Intermediates above the manifold contribute positively to the path
    matrix; in unrestricted mode intermediates below it enter with the
    opposite sign, as exact degenerate perturbation theory requires.
    """
    states = manifold.states
    index = {s: k for k, s in enumerate(states)}
    e0 = manifold.energy
    a = np.zeros((len(states), len(states)))
    for ka, sa in enumerate(states):
        for i in range(g.n):
            first = sa ^ (1 << i)
            b_first = classical_energy(g, c, first) - e0
            if abs(b_first) <= ENERGY_DEGENERACY_TOL:
                raise ValueError("intermediate state degenerate with the manifold")
            for j in range(g.n):
                kb = index.get(first ^ (1 << j))
                if kb is not None:
                    a[ka, kb] += delta[i] * delta[j] / b_first
    eigvals, eigvecs = np.linalg.eigh(a)
    coeff = eigvecs[:, -1]
    if coeff.sum() < 0:
        coeff = -coeff
    return EffectiveSecondOrder(a, coeff, -float(eigvals[-1]), manifold.restricted)


@dataclass(frozen=True)
class PredictedCrossing:
    """Perturbative level-crossing prediction between global and local minima.

    delta_e0 is the classical gap m - m'; delta_e2 the second-order gap
    coefficient.  A crossing at lam_star = sqrt(delta_e0 / -delta_e2) is
    predicted only when delta_e2 < 0, and trusted only within the series
    radius (lam_star < 1/2).
    """

    delta_e0: float
    delta_e2: float
    lambda_star: float | None
    within_radius: bool

    @property
    def crossing_predicted(self) -> bool:
        return self.lambda_star is not None


def predict_crossing(g: Graph, c: float, delta, mis_state: int, locals_manifold: DegenerateManifold) -> PredictedCrossing:
    """Compare the global minimum against a degenerate local manifold."""
    if not g.is_maximal_independent(mis_state):
        raise ValueError("global minimum is not a maximal independent set")
    m = mis_state.bit_count()
    local_sizes = {s.bit_count() for s in locals_manifold.states}
    if len(local_sizes) != 1:
        raise ValueError("local manifold mixes sizes")
    m_prime = local_sizes.pop()
    if m_prime >= m:
        raise ValueError("local minima must be strictly smaller than the global minimum")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegeneratePartnerWarning)
        e2_global = second_order_nondegenerate(g, c, delta, mis_state)
    e2_locals = degenerate_effective_matrix(g, c, delta, locals_manifold).e2
    delta_e0 = float(m - m_prime)
    delta_e2 = e2_locals - e2_global
    if delta_e2 < 0:
        lam_star = sqrt(delta_e0 / -delta_e2)
        return PredictedCrossing(delta_e0, delta_e2, lam_star, lam_star < LAMBDA_CRITICAL)
    return PredictedCrossing(delta_e0, delta_e2, None, False)


def predict_crossing_manifolds(
    g: Graph,
    c: float,
    delta,
    mis_manifold: DegenerateManifold,
    locals_manifold: DegenerateManifold,
) -> PredictedCrossing:
    """Crossing prediction when the global minimum is itself degenerate.

    Both sides get the effective-matrix treatment; the gap compares the
    bottoms of the two split manifolds.
    """
    m = mis_manifold.states[0].bit_count()
    m_prime = locals_manifold.states[0].bit_count()
    if m_prime >= m:
        raise ValueError("local minima must be strictly smaller than the global minimum")
    e2_global = degenerate_effective_matrix(g, c, delta, mis_manifold).e2
    e2_locals = degenerate_effective_matrix(g, c, delta, locals_manifold).e2
    delta_e0 = float(m - m_prime)
    delta_e2 = e2_locals - e2_global
    if delta_e2 < 0:
        lam_star = sqrt(delta_e0 / -delta_e2)
        return PredictedCrossing(delta_e0, delta_e2, lam_star, lam_star < LAMBDA_CRITICAL)
    return PredictedCrossing(delta_e0, delta_e2, None, False)


def sufficient_condition_F(g: Graph, delta, mis_state: int, locals_manifold: DegenerateManifold) -> float:
    """Crossing-elimination certificate, valid in the large-c regime.

    F = sum_{i in M} Delta_i^2
        - max_k [ sum_{i in M'_k} Delta_i^2 + sum over two-flip partner
                  minima (remove i, add j) of Delta_i * Delta_j ]

    Positive F guarantees a positive second-order gap coefficient for any
    superposition of the local minima, independent of how the degeneracy
    actually splits.  Only edge-respecting paths survive large c, so the
    partner sum runs over moves through independent intermediates.
    """
    if not locals_manifold.states:
        raise ValueError("no local minima supplied")
    gain = sum(delta[i] ** 2 for i in _bits(mis_state))
    worst = -np.inf
    states = locals_manifold.states
    for sa in states:
        load = sum(delta[i] ** 2 for i in _bits(sa))
        for sb in states:
            if sb == sa or (sa ^ sb).bit_count() != 2:
                continue
            i = (sa & ~sb).bit_length() - 1
            j = (sb & ~sa).bit_length() - 1
            load += delta[i] * delta[j]
        worst = max(worst, load)
    return float(gain - worst)
