"""Price-adjustment processes over box or simplex price spaces.

Mirror extratatonnement runs the mirror extragradient method on the
variational inequality (price space, -Z); mirror tatonnement runs the plain
mirror gradient method. Both return a PriceRun carrying the solver trace,
per-iteration equilibrium residuals, and a certificate at the best iterate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSolution, InvalidInput
from .kernels import (
    BOX,
    SIMPLEX,
    FeasibleSet,
    Kernel,
    bregman_divergence,
    linear_max,
)
from .vi import (
    RunTrace,
    SolverConfig,
    VIProblem,
    minty_certificate,
    mirror_extragradient_solve,
    mirror_gradient_solve,
)

#: Number of random pairs probed by the automatic step-size rule.
PROBE_PAIRS = 32

#: Sample count for the post-hoc weak-solution check in simplex mode.
MINTY_SAMPLES = 256


@dataclass(frozen=True)
class EquilibriumCertificate:
    """Residuals of the approximate-equilibrium conditions at a price vector.

    eps_feasibility is the positive part of max_j Z_j (excess of demand over
    supply); walras_residual is |p . Z(p)|; gap_value is the strong gap of the
    VI (price space, -Z) at the same point.
    """

    eps_feasibility: float
    walras_residual: float
    gap_value: float

    def passes(self, eps: float) -> bool:
        return self.eps_feasibility <= eps and self.walras_residual <= eps


@dataclass
class PriceRun:
    """A completed price-adjustment run with its certificate.

    feasibility_series and walras_series hold the per-recorded-iteration
    residuals at p_{k+0.5}; eta is the step size the run actually started with
    (after automatic selection, when requested). minty_violation is the
    post-hoc sampled weak-solution check in simplex mode, None on the box.
    """

    economy: object
    price_space: FeasibleSet
    trace: RunTrace
    certificate: EquilibriumCertificate
    normalized_equilibrium: np.ndarray | None
    feasibility_series: np.ndarray
    walras_series: np.ndarray
    eta: float
    minty_violation: float | None = None

    @property
    def converged(self) -> bool:
        return self.trace.converged


def _price_problem(economy, space: FeasibleSet) -> VIProblem:
    return VIProblem(
        set=space,
        operator=lambda p: -np.asarray(economy.excess(p), dtype=float),
        operator_label="-Z",
    )


def equilibrium_certificate(economy, p_hat, space: FeasibleSet) -> EquilibriumCertificate:
    """Evaluate Z once at p_hat and fill all certificate fields."""
    prices = np.asarray(p_hat, dtype=float)
    if not space.contains(prices):
        raise InvalidInput("p_hat lies outside the price space")
    z = np.asarray(economy.excess(prices), dtype=float)
    feasibility = max(float(z.max()), 0.0)
    walras = abs(float(prices.dot(z)))
    # gap of (space, -Z): <-Z, p> + max_x <Z, x>
    value, _ = linear_max(space, z)
    gap_value = -float(z.dot(prices)) + value
    return EquilibriumCertificate(feasibility, walras, gap_value)


def scale_to_equilibrium(p) -> np.ndarray:
    """Scale a box solution to the representative with max coordinate 1.

    Degree-0 homogeneity makes every positive multiple of an equilibrium an
    equilibrium; the all-zero vector is the trivial solution and is reported
    as DegenerateSolution instead of scaled.
    """
    arr = np.asarray(p, dtype=float)
    peak = float(np.max(np.abs(arr)))
    if peak == 0.0:
        raise DegenerateSolution("cannot normalize the all-zero price vector")
    return arr / peak


def recommended_step_size(n_goods: int, elasticity_bound: float, demand_bound: float) -> float:
    """Simplex-mode step size 1 / (2 * sqrt(2) * n * elasticity * demand bound)."""
    if n_goods <= 0 or elasticity_bound <= 0.0 or demand_bound <= 0.0:
        raise InvalidInput("recommended_step_size needs positive arguments")
    return 1.0 / (2.0 * np.sqrt(2.0) * n_goods * elasticity_bound * demand_bound)


def _interior_sample(rng: np.random.Generator, space: FeasibleSet) -> np.ndarray:
    if space.kind == BOX:
        return space.lo + (space.hi - space.lo) * rng.beta(2.0, 2.0, space.n)
    return rng.dirichlet(np.full(space.n, 2.0))


def probe_modulus(problem: VIProblem, kernel: Kernel, pairs: int = PROBE_PAIRS, seed=0) -> float:
    """Estimate the Bregman-continuity modulus on random interior point pairs.

    Sampling is interior-biased (Beta(2,2) per box coordinate; Dirichlet(2) on
    the simplex) because the modulus is only needed along iterate paths, which
    the floor/projection keep away from the boundary blow-up of Z.
    """
    rng = np.random.default_rng(seed)
    largest = 0.0
    for _ in range(pairs):
        x = _interior_sample(rng, problem.set)
        y = _interior_sample(rng, problem.set)
        div = bregman_divergence(kernel, x, y)
        if div <= 1e-16:
            continue
        delta = float(np.linalg.norm(problem.evaluate(x) - problem.evaluate(y)))
        largest = max(largest, delta / np.sqrt(2.0 * div))
    return largest


def auto_step_size(problem: VIProblem, kernel: Kernel, pairs: int = PROBE_PAIRS, seed=0) -> float:
    """Probe the modulus and return eta = 1 / (2 * sqrt(2) * L_hat).

    A constant operator probes to zero; any step works then, so 1.0 is
    returned. Runs started this way should enable modulus backoff, which
    halves the step if the path reveals a larger modulus than the probe.
    """
    modulus = probe_modulus(problem, kernel, pairs, seed)
    if modulus == 0.0:
        return 1.0
    return 1.0 / (2.0 * np.sqrt(2.0) * modulus)


def _run(economy, space: FeasibleSet, kernel: Kernel, eta, horizon: int, p0, *,
         extragradient: bool, stop_gap: float | None, record_every: int, seed) -> PriceRun:
    problem = _price_problem(economy, space)
    if isinstance(eta, str):
        if eta != "auto":
            raise InvalidInput(f"eta must be a positive number or 'auto', got {eta!r}")
        eta_value = auto_step_size(problem, kernel, seed=seed)
        backoff = True
    else:
        eta_value = float(eta)
        backoff = False
    config = SolverConfig(
        eta=eta_value,
        horizon=horizon,
        kernel=kernel,
        record_every=record_every,
        stop_gap=stop_gap,
        modulus_backoff=backoff,
    )
    solve = mirror_extragradient_solve if extragradient else mirror_gradient_solve
    trace = solve(problem, config, p0)

    feasibility = np.empty(len(trace.iterates))
    walras = np.empty(len(trace.iterates))
    for i, (_, _, p_half) in enumerate(trace.iterates):
        z = np.asarray(economy.excess(p_half), dtype=float)
        feasibility[i] = max(float(z.max()), 0.0)
        walras[i] = abs(float(p_half.dot(z)))

    certificate = equilibrium_certificate(economy, trace.best_iterate, space)
    try:
        normalized = scale_to_equilibrium(trace.best_iterate)
    except DegenerateSolution:
        normalized = None
    minty = None
    if space.kind == SIMPLEX:
        minty = minty_certificate(problem, trace.best_iterate, MINTY_SAMPLES, seed)[0]
    return PriceRun(
        economy=economy,
        price_space=space,
        trace=trace,
        certificate=certificate,
        normalized_equilibrium=normalized,
        feasibility_series=feasibility,
        walras_series=walras,
        eta=eta_value,
        minty_violation=minty,
    )


def mirror_extratatonnement(economy, space: FeasibleSet, kernel: Kernel, eta, horizon: int,
                            p0, *, stop_gap: float | None = None, record_every: int = 1,
                            seed=0) -> PriceRun:
    """Extragradient price adjustment on (space, -Z); eta may be 'auto'.

    The reported equilibrium is the best iterate (minimal D_h(p_{k+0.5}, p_k)
    among recorded iterations), not the last one.
    """
    return _run(economy, space, kernel, eta, horizon, p0, extragradient=True,
                stop_gap=stop_gap, record_every=record_every, seed=seed)


def mirror_tatonnement(economy, space: FeasibleSet, kernel: Kernel, eta, horizon: int,
                       p0, *, stop_gap: float | None = None, record_every: int = 1,
                       seed=0) -> PriceRun:
    """Plain mirror-gradient price adjustment on (space, -Z); eta may be 'auto'."""
    return _run(economy, space, kernel, eta, horizon, p0, extragradient=False,
                stop_gap=stop_gap, record_every=record_every, seed=seed)
