"""Variational-inequality problems, mirror solvers, gaps, and certificates.

A problem is a pair (set, F) of a feasible region and a single-valued operator.
Two solvers are provided: the mirror gradient method and the mirror
extragradient method (two prox steps per iteration, both centered at x_k).
Solution quality is measured by the strong gap max_x <F(x_hat), x_hat - x>.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EvaluationError, InsufficientData, InvalidInput
from .kernels import (
    BOX,
    FeasibleSet,
    Kernel,
    bregman_divergence,
    linear_max,
    mirror_step,
)

#: Steps with divergence at or below this carry no continuity information and
#: are skipped when estimating the pathwise modulus.
DEGENERATE_STEP_TOL = 1e-16

MIRROR_GRADIENT = "mirror_gradient"
MIRROR_EXTRAGRADIENT = "mirror_extragradient"


@dataclass(frozen=True)
class VIProblem:
    """A variational inequality (set, F) with a single-valued operator."""

    set: FeasibleSet
    operator: Callable[[np.ndarray], np.ndarray]
    operator_label: str = "F"

    def evaluate(self, x) -> np.ndarray:
        """Evaluate F(x), checking shape and finiteness."""
        out = np.asarray(self.operator(np.asarray(x, dtype=float)), dtype=float)
        if out.shape != (self.set.n,):
            raise EvaluationError(
                f"operator {self.operator_label!r} returned shape {out.shape}, "
                f"expected ({self.set.n},)"
            )
        if not np.all(np.isfinite(out)):
            raise EvaluationError(
                f"operator {self.operator_label!r} returned non-finite values"
            )
        return out


@dataclass(frozen=True)
class SolverConfig:
    """Step size, horizon, kernel, and recording/stopping options for a run.

    With modulus_backoff enabled, the step size is halved whenever a recorded
    iteration's modulus sample exceeds 1/(2 * sqrt(2) * current step): the
    effective Euclidean step is twice eta, so this keeps the run within the
    pathwise step-size condition 2 * eta <= 1/(sqrt(2) * L).
    """

    eta: float
    horizon: int
    kernel: Kernel
    record_every: int = 1
    stop_gap: float | None = None
    modulus_backoff: bool = False

    def __post_init__(self) -> None:
        if not (self.eta > 0.0):
            raise InvalidInput(f"eta must be positive, got {self.eta}")
        if self.horizon < 1:
            raise InvalidInput(f"horizon must be >= 1, got {self.horizon}")
        if self.record_every < 1:
            raise InvalidInput(f"record_every must be >= 1, got {self.record_every}")


@dataclass
class RunTrace:
    """Recorded trajectory of a solver run.

    iterates holds (k, x_k, x_{k+0.5}) triples at the recording cadence; the
    mirror gradient method stores x_{k+1} in the half slot (see `method`).
    best_index is the absolute iteration index minimizing D_h(x_{k+0.5}, x_k)
    among recorded iterations, lowest index on ties; best_iterate is that
    iteration's x_{k+0.5}.
    """

    method: str
    iterates: list[tuple[int, np.ndarray, np.ndarray]]
    gaps: np.ndarray
    divergences: np.ndarray
    operator_deltas: np.ndarray
    modulus_samples: np.ndarray
    best_index: int
    best_iterate: np.ndarray
    wall_time: float
    elapsed: np.ndarray
    converged: bool = False
    final_eta: float = 0.0

    @property
    def indices(self) -> np.ndarray:
        """Absolute iteration indices of the recorded iterations."""
        return np.array([k for k, _, _ in self.iterates], dtype=int)

    @property
    def final_gap(self) -> float:
        return float(self.gaps[-1])


def _solve(problem: VIProblem, config: SolverConfig, x0, extragradient: bool) -> RunTrace:
    space = problem.set
    x = np.asarray(x0, dtype=float)
    if not space.contains(x):
        raise InvalidInput("x0 lies outside the feasible set")

    start = time.perf_counter()
    iterates: list[tuple[int, np.ndarray, np.ndarray]] = []
    gaps: list[float] = []
    divergences: list[float] = []
    deltas: list[float] = []
    samples: list[float] = []
    elapsed: list[float] = []
    converged = False
    eta = config.eta

    for k in range(config.horizon):
        fx = problem.evaluate(x)
        x_half = mirror_step(space, config.kernel, eta, x, fx)
        record = k % config.record_every == 0
        if extragradient:
            f_half = problem.evaluate(x_half)
            x_next = mirror_step(space, config.kernel, eta, x, f_half)
        else:
            x_next = x_half
            f_half = problem.evaluate(x_half) if record else None

        if record:
            div = bregman_divergence(config.kernel, x_half, x)
            delta = float(np.linalg.norm(f_half - fx))
            value, _ = linear_max(space, -f_half)
            gap_value = float(f_half.dot(x_half)) + value
            sample = delta / np.sqrt(2.0 * div) if div > DEGENERATE_STEP_TOL else 0.0
            iterates.append((k, x, x_half))
            gaps.append(gap_value)
            divergences.append(div)
            deltas.append(delta)
            samples.append(sample)
            elapsed.append(time.perf_counter() - start)
            if config.stop_gap is not None and gap_value <= config.stop_gap:
                converged = True
                break
            if config.modulus_backoff and sample > 1.0 / (2.0 * np.sqrt(2.0) * eta):
                # The effective Euclidean step is 2*eta, so the step-size
                # premise 2*eta <= 1/(sqrt(2)*L) caps the modulus at this value.
                eta *= 0.5
        x = x_next

    best_pos = int(np.argmin(divergences))
    return RunTrace(
        method=MIRROR_EXTRAGRADIENT if extragradient else MIRROR_GRADIENT,
        iterates=iterates,
        gaps=np.array(gaps),
        divergences=np.array(divergences),
        operator_deltas=np.array(deltas),
        modulus_samples=np.array(samples),
        best_index=iterates[best_pos][0],
        best_iterate=iterates[best_pos][2],
        wall_time=time.perf_counter() - start,
        elapsed=np.array(elapsed),
        converged=converged,
        final_eta=eta,
    )


def mirror_gradient_solve(problem: VIProblem, config: SolverConfig, x0) -> RunTrace:
    """Run x_{k+1} = mirror_step(set, kernel, eta, x_k, F(x_k)) for the horizon."""
    return _solve(problem, config, x0, extragradient=False)


def mirror_extragradient_solve(problem: VIProblem, config: SolverConfig, x0) -> RunTrace:
    """Run the two-step method: probe with F(x_k), move with F(x_{k+0.5}).

    Both prox steps are centered at x_k. The returned trace's best iterate is
    the x_{k+0.5} minimizing D_h(x_{k+0.5}, x_k) among recorded iterations.
    """
    return _solve(problem, config, x0, extragradient=True)


def gap(problem: VIProblem, x_hat) -> float:
    """Strong gap max_{x in set} <F(x_hat), x_hat - x>, via closed-form linear_max.

    Nonnegative up to floating error; a strong solution gives a value at 0.
    """
    x = np.asarray(x_hat, dtype=float)
    if not problem.set.contains(x):
        raise InvalidInput("x_hat lies outside the feasible set")
    fx = problem.evaluate(x)
    value, _ = linear_max(problem.set, -fx)
    return float(fx.dot(x)) + value


def is_epsilon_strong(problem: VIProblem, x_hat, eps: float) -> bool:
    """True iff gap(problem, x_hat) <= eps (no flooring of small negatives)."""
    return gap(problem, x_hat) <= eps


def minty_certificate(
    problem: VIProblem, candidate, samples: int, seed
) -> tuple[float, np.ndarray | None]:
    """Sampled check of the weak-solution inequality <F(x), candidate - x> <= 0.

    Draws `samples` uniform points in the set (box: per-coordinate uniform;
    simplex: flat Dirichlet) and returns the largest violation together with
    the violating point, or None when no sampled point gives a positive value.
    """
    cand = np.asarray(candidate, dtype=float)
    if not problem.set.contains(cand):
        raise InvalidInput("candidate lies outside the feasible set")
    if samples < 1:
        raise InvalidInput(f"samples must be >= 1, got {samples}")
    rng = np.random.default_rng(seed)
    space = problem.set
    max_violation = -np.inf
    witness: np.ndarray | None = None
    for _ in range(samples):
        if space.kind == BOX:
            x = rng.uniform(space.lo, space.hi)
        else:
            x = rng.dirichlet(np.ones(space.n))
        value = float(problem.evaluate(x).dot(cand - x))
        if value > max_violation:
            max_violation = value
            witness = x
    return max_violation, (witness if max_violation > 0.0 else None)


def pathwise_modulus(trace: RunTrace, kernel: Kernel) -> float:
    """Largest observed ||F(x_{k+0.5}) - F(x_k)|| / sqrt(2 D_h(x_{k+0.5}, x_k)).

    Iterations with D_h <= 1e-16 are skipped (a zero step carries no
    continuity information); returns 0 when no iteration is eligible.
    """
    best = 0.0
    for (_, x, x_half), delta in zip(trace.iterates, trace.operator_deltas):
        div = bregman_divergence(kernel, x_half, x)
        if div <= DEGENERATE_STEP_TOL:
            continue
        best = max(best, float(delta) / np.sqrt(2.0 * div))
    return best


def rate_slope(trace: RunTrace) -> float:
    """Least-squares slope of log(running-min gap) against log(iteration + 1).

    Checks the O(1/sqrt(T)) best-iterate rate: a slope at or below -0.5 (plus
    margin) is consistent with the guarantee. Entries after the running min
    reaches zero or below are dropped (their logs are undefined).
    """
    if len(trace.iterates) == 0:
        raise InsufficientData("trace has no recorded iterations")
    running = np.minimum.accumulate(trace.gaps)
    positive = running > 0.0
    if not positive.all():
        cutoff = int(np.argmin(positive))
        running = running[:cutoff]
    if running.size < 16:
        raise InsufficientData(
            f"rate fit needs >= 16 recorded iterations with positive running-min "
            f"gaps, got {running.size}"
        )
    t = trace.indices[: running.size] + 1.0
    slope = np.polyfit(np.log(t), np.log(running), 1)[0]
    return float(slope)


def rotation_operator() -> Callable[[np.ndarray], np.ndarray]:
    """The planar rotation field F(x, y) = (-y, x)."""

    def operator(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return np.array([-v[1], v[0]])

    return operator


def scalar_nonminty_operator() -> Callable[[np.ndarray], np.ndarray]:
    """The scalar field F(x) = 1 - x^2 (strong solutions at -1 and 1)."""

    def operator(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return 1.0 - v * v

    return operator
