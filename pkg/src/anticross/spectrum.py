"""Exact low-lying spectra over a driver-strength grid.

This is the verification side of the package: instead of trusting the
second-order formulas, diagonalize H(lam) on a grid, watch the ground
state's character (weight on the global-minimum basis states versus the
tracked local minima), refine around sharp features, and locate the
minimum gap.  Dense diagonalization covers dimensions up to 4096; larger
instances use Lanczos with full reorthogonalization on the matrix-free
matvec, with deflation passes so degenerate clusters are not missed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .model import AnnealInstance, diagonal_energies, hamiltonian_matvec
from .perturb import PredictedCrossing

DENSE_DIM_LIMIT = 4096
RESIDUAL_TOL = 1e-10
LAMBDA_RESOLUTION = 1e-4
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class SolverConvergenceError(RuntimeError):
    """Lanczos failed to reach the residual tolerance within its budget."""

    def __init__(self, residual: float, budget: int):
        super().__init__(
            f"eigensolver did not converge within {budget} iterations; "
            f"worst residual {residual:.3e}"
        )
        self.residual = residual


def dense_hamiltonian_matrix(inst: AnnealInstance, lam: float) -> np.ndarray:
    """H(lam) as a dense array, for the small-dimension solver path."""
    dim = inst.dim
    h = np.zeros((dim, dim))
    idx = np.arange(dim)
    h[idx, idx] = diagonal_energies(inst.graph, inst.c)
    for i in range(inst.graph.n):
        h[idx, idx ^ (1 << i)] -= lam * inst.driver.amplitudes[i]
    return h


def eigensolve_lowest(
    inst: AnnealInstance,
    lam: float,
    k: int,
    method: str = "auto",
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """k lowest eigenpairs of H(lam), eigenvalues ascending.

    Returns (values, vectors) with vectors in columns.  method picks
    "dense" (full diagonalization) or "lanczos" explicitly; "auto" uses
    dense up to dimension 4096.
    """
    dim = inst.dim
    if not 1 <= k <= dim:
        raise ValueError(f"k must be in [1, {dim}], got {k}")
    if method == "auto":
        method = "dense" if dim <= DENSE_DIM_LIMIT else "lanczos"
    if method == "dense":
        vals, vecs = np.linalg.eigh(dense_hamiltonian_matrix(inst, lam))
        return vals[:k], vecs[:, :k]
    if method == "lanczos":
        return _lanczos_lowest(hamiltonian_matvec(inst, lam), dim, k, seed)
    raise ValueError(f"unknown method {method!r}")


def _tridiag_eigh(alphas, betas):
    m = len(alphas)
    t = np.diag(alphas)
    if m > 1:
        off = np.array(betas[: m - 1])
        t[np.arange(m - 1), np.arange(1, m)] = off
        t[np.arange(1, m), np.arange(m - 1)] = off
    return np.linalg.eigh(t)


def _lanczos_run(matvec, dim, need, rng, frozen, budget):
    """One Lanczos sweep with full reorthogonalization.

    frozen holds already-converged eigenvectors (columns); the run is
    deflated against them so it explores the orthogonal complement.
    Returns the maximal bottom-consecutive run of converged Ritz pairs
    (residual < tolerance), plus the worst residual among the `need`
    lowest Ritz pairs.  Only the bottom-consecutive converged prefix is
    safe to report as "the lowest eigenvalues": any direction still
    unconverged corresponds to a Ritz value above that prefix.
    """
    steps = min(dim, budget)
    qmat = np.empty((dim, steps + 1))

    def orthogonalize(w, m):
        if frozen is not None and frozen.shape[1]:
            w = w - frozen @ (frozen.T @ w)
        if m:
            cols = qmat[:, :m]
            w = w - cols @ (cols.T @ w)
        return w

    q = orthogonalize(rng.standard_normal(dim), 0)
    norm = np.linalg.norm(q)
    if norm < 1e-12:
        return np.empty(0), np.empty((dim, 0)), 0.0
    qmat[:, 0] = q / norm
    alphas: list[float] = []
    betas: list[float] = []
    check_at = need + 2
    for it in range(steps):
        w = matvec(qmat[:, it])
        alphas.append(float(qmat[:, it] @ w))
        w = orthogonalize(w, it + 1)
        w = orthogonalize(w, it + 1)  # second pass repairs rounding loss
        beta = float(np.linalg.norm(w))
        if beta < 1e-13:
            break  # Krylov space exhausted in this component
        betas.append(beta)
        qmat[:, it + 1] = w / beta
        if len(alphas) >= check_at:
            # cheap bound |beta_m * bottom component| on the lowest pairs
            _, tvecs = _tridiag_eigh(alphas, betas)
            bounds = abs(betas[-1]) * np.abs(tvecs[-1, :need])
            if np.all(bounds < RESIDUAL_TOL / 10):
                break
            check_at += 8 if len(alphas) < 120 else 24
    m = len(alphas)
    tvals, tvecs = _tridiag_eigh(alphas, betas)
    vecs = qmat[:, :m] @ tvecs
    prefix_vals, prefix_vecs = [], []
    worst_low = 0.0
    for idx in range(m):
        v = vecs[:, idx]
        resid = float(np.linalg.norm(matvec(v) - tvals[idx] * v))
        if idx < need:
            worst_low = max(worst_low, resid)
        if resid < RESIDUAL_TOL:
            prefix_vals.append(tvals[idx])
            prefix_vecs.append(v)
        else:
            break
    if not prefix_vals:
        return np.empty(0), np.empty((dim, 0)), worst_low
    return np.array(prefix_vals), np.stack(prefix_vecs, axis=1), worst_low


def _lanczos_lowest(matvec, dim, k, seed):
    """k lowest eigenpairs via Lanczos plus deflated restart passes.

    A single Krylov run finds one vector per distinct eigenvalue reachable
    from its start vector; restarting against everything already converged
    picks up the remaining copies of degenerate clusters.  The loop stops
    once a fresh deflated pass cannot produce anything below the current
    kth value.  Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    budget = min(dim, max(60 * k, 700))
    vals = np.empty(0)
    vecs = np.empty((dim, 0))
    worst = np.inf
    for _ in range(2 * k + 4):
        need = min(k, dim - vecs.shape[1])
        if need <= 0:
            break
        new_vals, new_vecs, worst = _lanczos_run(matvec, dim, need, rng, vecs, budget)
        if new_vals.size == 0:
            raise SolverConvergenceError(worst, budget)
        lowest_new = float(new_vals[0])
        vals = np.concatenate([vals, new_vals])
        vecs = np.concatenate([vecs, new_vecs], axis=1)
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        if vals.size >= k and lowest_new > vals[k - 1] + 1e-12:
            break  # the complement holds nothing below the kth value
    if vals.size < k:
        raise SolverConvergenceError(worst, budget)
    return vals[:k], vecs[:, :k]


def default_grid(lo: float = 0.01, hi: float = 1.0, points: int = 64) -> np.ndarray:
    """Geometrically spaced driver strengths covering the trusted window."""
    if not 0 < lo < hi:
        raise ValueError("grid bounds must satisfy 0 < lo < hi")
    if points < 2:
        raise ValueError("grid needs at least 2 points")
    return np.geomspace(lo, hi, points)


@dataclass(frozen=True)
class SpectrumTrace:
    """Low-lying spectrum and ground-state character along the grid.

    overlap_mis is the squared projection of the ground eigenvector onto
    the span of the global-minimum basis states; overlap_locals the same
    for the tracked local minima.  Rows are sorted by lam and include any
    points inserted by sharp-feature refinement.
    """

    lambdas: np.ndarray
    eigenvalues: np.ndarray
    overlap_mis: np.ndarray
    overlap_locals: np.ndarray
    mis_states: tuple[int, ...]
    local_states: tuple[int, ...]

    @property
    def gaps(self) -> np.ndarray:
        return self.eigenvalues[:, 1] - self.eigenvalues[:, 0]


@dataclass(frozen=True)
class CrossingObservation:
    """Exact-spectrum verdict on an avoided crossing.

    swap is True when the ground state was global-minimum dominated
    (overlap above 1/2) at small lam and becomes locals dominated later;
    swap_lambda is where the global-minimum overlap falls through 1/2.
    """

    g_min: float
    lambda_min: float
    swap: bool
    swap_lambda: float | None
    predicted_lambda_star: float | None = None
    prediction_agrees: bool | None = None


def sweep(
    inst: AnnealInstance,
    lam_grid,
    k: int = 4,
    mis_states: tuple[int, ...] = (),
    local_states: tuple[int, ...] = (),
    method: str = "auto",
    seed: int = 0,
) -> SpectrumTrace:
    """Eigenvalues and ground-state character at every grid point.

    Adjacent points whose global-minimum overlap jumps by 0.5 or more get
    midpoints inserted (down to a lam resolution of 1e-4) so anticrossings
    show up as resolved steps rather than single-point jumps.
    """
    grid = np.asarray(lam_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("grid must be a 1-d array of driver strengths")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be ascending and positive")

    rows: dict[float, tuple[np.ndarray, float, float]] = {}

    def solve(lam: float):
        if lam not in rows:
            vals, vecs = eigensolve_lowest(inst, lam, k, method=method, seed=seed)
            ground = vecs[:, 0]
            om = float(sum(ground[s] ** 2 for s in mis_states))
            ol = float(sum(ground[s] ** 2 for s in local_states))
            rows[lam] = (vals, om, ol)
        return rows[lam]

    for lam in grid:
        solve(float(lam))

    # bisect any jump in ground character sharper than 0.5
    pending = list(zip(grid[:-1], grid[1:]))
    while pending:
        lo, hi = pending.pop()
        if hi - lo <= LAMBDA_RESOLUTION:
            continue
        if abs(solve(lo)[1] - solve(hi)[1]) < 0.5:
            continue
        mid = 0.5 * (lo + hi)
        solve(mid)
        pending.append((lo, mid))
        pending.append((mid, hi))

    lams = np.array(sorted(rows))
    eigenvalues = np.stack([rows[l][0] for l in lams])
    overlap_mis = np.array([rows[l][1] for l in lams])
    overlap_locals = np.array([rows[l][2] for l in lams])
    return SpectrumTrace(
        lams, eigenvalues, overlap_mis, overlap_locals,
        tuple(mis_states), tuple(local_states),
    )


def min_gap(
    trace: SpectrumTrace,
    inst: AnnealInstance,
    method: str = "auto",
    seed: int = 0,
) -> tuple[float, float]:
    """(g_min, lam_min): smallest first gap, golden-section refined.

    The coarse grid minimum brackets the search; endpoints are returned
    as-is since a boundary minimum has nothing to refine against.
    """
    if trace.eigenvalues.shape[1] < 2:
        raise ValueError("trace must hold at least 2 eigenvalues per point")
    gaps = trace.gaps
    j = int(np.argmin(gaps))
    if j == 0 or j == len(gaps) - 1:
        return float(gaps[j]), float(trace.lambdas[j])

    def gap_at(lam: float) -> float:
        vals, _ = eigensolve_lowest(inst, lam, 2, method=method, seed=seed)
        return float(vals[1] - vals[0])

    lo, hi = float(trace.lambdas[j - 1]), float(trace.lambdas[j + 1])
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = gap_at(x1), gap_at(x2)
    while hi - lo > LAMBDA_RESOLUTION:
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = gap_at(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = gap_at(x2)
    lam_best = 0.5 * (lo + hi)
    return gap_at(lam_best), lam_best


def swap_verdict(trace: SpectrumTrace) -> tuple[bool, float | None]:
    """Character-swap decision from the overlap curves alone.

    A swap needs the ground state to be global-minimum dominated early
    (overlap above 1/2), lose that majority, and end up carrying more
    weight on the tracked local minima than on the global minimum; a mere
    loss of weight to delocalization, with the local minima never taking
    over, does not count.  The returned location interpolates where the
    global overlap falls through 1/2.
    """
    om, ol, lams = trace.overlap_mis, trace.overlap_locals, trace.lambdas
    dominated = np.flatnonzero(ol > om)
    if not dominated.size:
        return False, None
    t1 = int(dominated[0])
    before = np.flatnonzero(om[:t1] > 0.5)
    if not before.size:
        return False, None
    # last half-majority point before dominance flips
    t0 = int(before[-1])
    for t in range(t0, t1):
        if om[t] > 0.5 >= om[t + 1]:
            frac = (om[t] - 0.5) / (om[t] - om[t + 1])
            return True, float(lams[t] + frac * (lams[t + 1] - lams[t]))
    return True, float(lams[t1])


def detect_anticrossing(
    trace: SpectrumTrace,
    inst: AnnealInstance,
    predicted: PredictedCrossing | None = None,
    method: str = "auto",
    seed: int = 0,
) -> CrossingObservation:
    """Locate the minimum gap and decide whether the character swapped.

    The swap rule is swap_verdict's; on top of it this refines the gap
    minimum and, when a perturbative prediction is supplied, records
    whether the exact sweep agrees with it.
    """
    g, lam_min = min_gap(trace, inst, method=method, seed=seed)
    swap, swap_lambda = swap_verdict(trace)
    obs = CrossingObservation(g, lam_min, swap, swap_lambda)
    if predicted is not None:
        agrees = swap == predicted.within_radius
        obs = replace(
            obs,
            predicted_lambda_star=predicted.lambda_star,
            prediction_agrees=agrees,
        )
    return obs
