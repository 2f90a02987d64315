"""Driver and penalty choices that remove predicted level crossings.

Three knobs, in increasing order of required knowledge:

  * scale_c: raise the edge penalty to n.  Kills every crossing whose
    minima are non-degenerate or further than two flips apart.
  * alpha_assignment: boost the driver on the global minimum's nodes.
    Certifiably positive gap coefficient, but needs the solution, so it
    is a diagnostic.
  * beta_assignment: damp the driver on the union of known local minima.
    Needs only the local minima, which suboptimal anneal runs reveal.

iterative_avoid automates the last one: sweep, look at which local minima
the ground state fell into past the swap, grow the damped set, repeat.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .graph import Graph, degenerate_neighbors, enumerate_maximal_independent_sets
from .model import AnnealInstance, DriverField
from .perturb import minima_manifold, sufficient_condition_F
from .spectrum import (
    CrossingObservation,
    default_grid,
    detect_anticrossing,
    eigensolve_lowest,
    sweep,
)

SAFETY_MARGIN = 0.05
VISIT_WEIGHT_THRESHOLD = 0.1


@dataclass(frozen=True)
class StrategyOutcome:
    """A produced driver/penalty pair with its certificate.

    certificate is the worst crossing-elimination value over all global
    minima and degenerate local classes (positive means no second-order
    crossing can occur); None when the strategy cannot certify.
    """

    driver: DriverField
    c: float
    certificate: float | None
    rationale: str


def scale_c(g: Graph) -> float:
    """Penalty coefficient n; clamps at the legal minimum for tiny graphs."""
    if g.n <= 1:
        warnings.warn("penalty must exceed 1; clamping", stacklevel=2)
        return 1.0 + 1e-6
    return float(g.n)


def _local_classes(g: Graph, c: float):
    catalog = enumerate_maximal_independent_sets(g)
    classes = [
        minima_manifold(g, c, [catalog.sets[i] for i in indices])
        for size, indices in catalog.degeneracy_classes
        if size < catalog.mis_size
    ]
    return catalog, classes


def _certificate(g: Graph, delta, mis_states, classes) -> float | None:
    """Worst crossing-elimination value over global minima and local classes."""
    if not classes or not mis_states:
        return None
    return min(
        sufficient_condition_F(g, delta, mis, cls)
        for mis in mis_states
        for cls in classes
    )


def _positive_or_none(cert: float | None) -> float | None:
    return cert if cert is not None and cert > 0 else None


def alpha_assignment(g: Graph, mis_state: int, margin: float = 0.01, c: float | None = None) -> StrategyOutcome:
    """Boost the driver on the solution's nodes.

    alpha = (1 + margin) * ((n - m') + sqrt((n - m')^2 + 8 (m' - 1))) / 4
    with m' the largest local-minimum size; amplitudes are alpha inside the
    global minimum and 1 elsewhere.  Assumes the solution is known.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    if not g.is_maximal_independent(mis_state):
        raise ValueError("supplied state is not a maximal independent set")
    c_eff = scale_c(g) if c is None else c
    catalog, classes = _local_classes(g, c_eff)
    if mis_state.bit_count() != catalog.mis_size:
        raise ValueError("supplied state is not a maximum independent set")
    if not classes:
        return StrategyOutcome(DriverField.uniform(g.n), c_eff, None, "no local minima")
    m_prime = max(cls.states[0].bit_count() for cls in classes)
    n = g.n
    alpha = (1 + margin) * ((n - m_prime) + sqrt((n - m_prime) ** 2 + 8 * (m_prime - 1))) / 4
    driver = DriverField.from_mask(n, mis_state, inside=alpha, outside=1.0)
    cert = _certificate(g, driver.amplitudes, (mis_state,), classes)
    return StrategyOutcome(
        driver, c_eff, _positive_or_none(cert), f"alpha assignment, alpha={alpha:.6g}"
    )


def beta_assignment(
    g: Graph,
    locals_union: int,
    size_hint: tuple[int, int] | None = None,
    beta: float | None = None,
    c: float | None = None,
) -> StrategyOutcome:
    """Damp the driver on the union of known local minima.

    With hint (m, p) = (global minimum size, overlap of the union with
    the global minimum), any beta below sqrt((m - p) / (n - p)) works as
    long as m > p.  Without a hint the conservative (1 - eps) / sqrt(n)
    is always below that threshold when m > p.  An explicit beta
    overrides both.
    """
    if locals_union == 0:
        raise ValueError("union of local minima is empty")
    n = g.n
    c_eff = scale_c(g) if c is None else c
    rationale = ""
    hint_degenerate = False
    if size_hint is not None:
        m, p = size_hint
        if m <= p:
            hint_degenerate = True
            chosen = beta if beta is not None else (1 - SAFETY_MARGIN) / sqrt(n)
            rationale = "m = p; assignment may not eliminate all such crossings"
        else:
            bound = sqrt((m - p) / (n - p))
            chosen = beta if beta is not None else (1 - SAFETY_MARGIN) * bound
            if chosen >= bound:
                rationale = f"beta {chosen:.6g} not below bound {bound:.6g}"
    else:
        chosen = beta if beta is not None else (1 - SAFETY_MARGIN) / sqrt(n)
    driver = DriverField.from_mask(n, locals_union, inside=chosen, outside=1.0)
    catalog, classes = _local_classes(g, c_eff)
    cert = None if hint_degenerate else _certificate(
        g, driver.amplitudes, catalog.mis_states(), classes
    )
    if not rationale:
        rationale = f"beta assignment, beta={chosen:.6g}"
    return StrategyOutcome(driver, c_eff, _positive_or_none(cert), rationale)


@dataclass(frozen=True)
class AvoidRound:
    """One sweep of the check-inspect-damp loop (index 0 = initial check)."""

    index: int
    driver: DriverField
    certificate: float | None
    observation: CrossingObservation
    visited_locals: tuple[int, ...]
    damped_union: int


@dataclass(frozen=True)
class AvoidResult:
    outcome: StrategyOutcome
    rounds: tuple[AvoidRound, ...]
    success: bool

    @property
    def adjustments(self) -> int:
        return sum(1 for r in self.rounds if r.visited_locals)


def iterative_avoid(
    inst: AnnealInstance,
    budget: int = 4,
    lam_grid=None,
    k: int = 4,
    seed: int = 0,
) -> AvoidResult:
    """Remove a character swap by repeatedly damping visited local minima.

    Each check sweeps the exact spectrum with the current driver.  If the
    ground state swaps to local-minima character, the local minima holding
    noticeable weight just past the swap (and their equal-size neighbors
    two flips away, found by local search) join the damped union, and the
    conservative beta assignment is reapplied.  budget caps the number of
    damping adjustments; an instance with no initial swap uses zero.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    g = inst.graph
    grid = default_grid() if lam_grid is None else np.asarray(lam_grid, dtype=np.float64)
    catalog, classes = _local_classes(g, inst.c)
    mis_states = catalog.mis_states()
    local_states = catalog.local_states()

    driver = inst.driver
    damped = 0
    rounds: list[AvoidRound] = []
    adjustments = 0
    while True:
        cur = AnnealInstance(g, inst.c, driver)
        trace = sweep(cur, grid, k=k, mis_states=mis_states, local_states=local_states, seed=seed)
        obs = detect_anticrossing(trace, cur, seed=seed)
        cert = _certificate(g, driver.amplitudes, mis_states, classes)
        if not obs.swap:
            rounds.append(AvoidRound(len(rounds), driver, cert, obs, (), damped))
            rationale = (
                "no crossing" if adjustments == 0
                else "beta assignment after damping visited minima"
            )
            outcome = StrategyOutcome(driver, inst.c, _positive_or_none(cert), rationale)
            return AvoidResult(outcome, tuple(rounds), True)
        if adjustments >= budget:
            rounds.append(AvoidRound(len(rounds), driver, cert, obs, (), damped))
            outcome = StrategyOutcome(
                driver, inst.c, None, "budget exhausted with crossing still present"
            )
            return AvoidResult(outcome, tuple(rounds), False)

        visited = _visited_locals(cur, trace, obs, local_states, k=k, seed=seed)
        expanded = set(visited)
        for s in visited:
            expanded.update(degenerate_neighbors(g, s))
        new_damped = damped
        for s in expanded:
            new_damped |= s
        if new_damped == damped:
            rounds.append(AvoidRound(len(rounds), driver, cert, obs, tuple(sorted(visited)), damped))
            outcome = StrategyOutcome(
                driver, inst.c, None, "crossing present but no local minima identifiable"
            )
            return AvoidResult(outcome, tuple(rounds), False)
        damped = new_damped
        rounds.append(AvoidRound(len(rounds), driver, cert, obs, tuple(sorted(visited)), damped))
        driver = beta_assignment(g, damped, c=inst.c).driver
        adjustments += 1


def _visited_locals(inst, trace, obs, local_states, k, seed):
    """Local minima dominating the ground state just past the swap.

    Weights are normalized within the local-minima span, so each member
    of a K-fold symmetric combination carries a share of about 1/K and
    clears the threshold even when the crossing is broad and much of the
    raw weight has spread to neighboring states.
    """
    if obs.swap_lambda is None:
        return ()
    after = trace.lambdas[trace.lambdas > obs.swap_lambda]
    lam_probe = float(after[0]) if after.size else float(trace.lambdas[-1])
    _, vecs = eigensolve_lowest(inst, lam_probe, k, seed=seed)
    ground = vecs[:, 0]
    weights = {s: ground[s] ** 2 for s in local_states}
    total = sum(weights.values())
    if total < 1e-12:
        return ()
    return tuple(s for s in local_states if weights[s] / total > VISIT_WEIGHT_THRESHOLD)
