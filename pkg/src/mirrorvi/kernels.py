"""Distance-generating kernels, Bregman divergences, and closed-form mirror steps.

Two kernels are supported: the squared Euclidean norm h(x) = 0.5*||x||^2 and the
negative entropy h(x) = sum_j x_j*log(x_j) (floored away from the boundary).
Feasible regions are axis-aligned boxes and the unit simplex; every mirror step
has a closed form on these sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

#: Absolute tolerance for set-membership checks everywhere in the library.
MEMBERSHIP_TOL = 1e-12

EUCLIDEAN = "euclidean"
ENTROPY = "entropy"

BOX = "box"
SIMPLEX = "simplex"


def _as_vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise InvalidInput(f"{name} must be a one-dimensional vector, got shape {arr.shape}")
    return arr


def _require_finite(arr: np.ndarray, name: str) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} must be finite")
    return arr


@dataclass(frozen=True)
class Kernel:
    """A 1-strongly-convex distance-generating function.

    kind: "euclidean" (h = 0.5*||x||^2) or "entropy" (h = sum x*log x).
    floor: positivity floor nu for the entropy kernel; coordinates below nu are
    clamped before any entropy evaluation and after every entropy step.
    """

    kind: str
    floor: float = 1e-8

    def __post_init__(self) -> None:
        if self.kind not in (EUCLIDEAN, ENTROPY):
            raise InvalidInput(f"unknown kernel kind {self.kind!r}")
        if not (0.0 < self.floor < 1.0):
            raise InvalidInput(f"kernel floor must be in (0, 1), got {self.floor}")

    @property
    def strong_convexity(self) -> float:
        return 1.0

    @property
    def smoothness(self) -> float:
        """Smoothness constant: 1 for Euclidean, 1/nu for floored entropy."""
        return 1.0 if self.kind == EUCLIDEAN else 1.0 / self.floor

    def clamp_domain(self, x: np.ndarray) -> np.ndarray:
        """Clamp a point into the kernel's domain (entropy: coordinates >= nu)."""
        if self.kind == ENTROPY:
            return np.maximum(x, self.floor)
        return x


def squared_euclidean() -> Kernel:
    return Kernel(EUCLIDEAN)


def negative_entropy(floor: float = 1e-8) -> Kernel:
    return Kernel(ENTROPY, floor)


@dataclass(frozen=True, eq=False)
class FeasibleSet:
    """An axis-aligned box or the unit simplex, with closed-form primitives."""

    kind: str
    n: int
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        arr = np.asarray(x, dtype=float)
        if arr.shape != (self.n,) or not np.all(np.isfinite(arr)):
            return False
        if self.kind == BOX:
            return bool(np.all(arr >= self.lo - tol) and np.all(arr <= self.hi + tol))
        return bool(np.all(arr >= -tol) and abs(arr.sum() - 1.0) <= tol)

    def diameter(self) -> float:
        """Euclidean diameter of the set."""
        if self.kind == BOX:
            return float(np.linalg.norm(self.hi - self.lo))
        return float(np.sqrt(2.0))


def box(lo, hi) -> FeasibleSet:
    """Box {x : lo <= x <= hi} with lo_j < hi_j in every coordinate."""
    lo_arr = _require_finite(_as_vector(lo, "lo"), "lo")
    hi_arr = _require_finite(_as_vector(hi, "hi"), "hi")
    if lo_arr.shape != hi_arr.shape:
        raise InvalidInput("lo and hi must have the same length")
    if not np.all(lo_arr < hi_arr):
        raise InvalidInput("box requires lo_j < hi_j in every coordinate")
    return FeasibleSet(BOX, lo_arr.size, lo_arr, hi_arr)


def unit_box(n: int) -> FeasibleSet:
    """[0, 1]^n."""
    return box(np.zeros(n), np.ones(n))


def simplex(n: int) -> FeasibleSet:
    """Unit simplex {p >= 0 : sum p = 1} in dimension n >= 1."""
    if n < 1:
        raise InvalidInput(f"simplex dimension must be >= 1, got {n}")
    return FeasibleSet(SIMPLEX, int(n))


def bregman_divergence(kernel: Kernel, x, y) -> float:
    """D_h(x, y) = h(x) - h(y) - <grad h(y), x - y>, nonnegative by convexity."""
    x_arr = _require_finite(_as_vector(x, "x"), "x")
    y_arr = _require_finite(_as_vector(y, "y"), "y")
    if x_arr.shape != y_arr.shape:
        raise InvalidInput(f"dimension mismatch: {x_arr.shape} vs {y_arr.shape}")
    if kernel.kind == EUCLIDEAN:
        d = x_arr - y_arr
        return float(0.5 * d.dot(d))
    xf = np.maximum(x_arr, kernel.floor)
    yf = np.maximum(y_arr, kernel.floor)
    return float(np.sum(xf * np.log(xf / yf) - xf + yf))


def simplex_projection(v) -> np.ndarray:
    """Euclidean projection onto the unit simplex via sort-and-threshold."""
    arr = _require_finite(_as_vector(v, "v"), "v")
    u = np.sort(arr)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, arr.size + 1)
    rho = np.nonzero(u * idx > css - 1.0)[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    w = np.maximum(arr - theta, 0.0)
    return w / w.sum()


def mirror_step(space: FeasibleSet, kernel: Kernel, eta: float, x0, g) -> np.ndarray:
    """argmin_{x in space} <g, x> + (1/(2*eta)) * D_h(x, x0), in closed form.

    With the canonical divergence the Euclidean step moves by 2*eta*g before
    projecting, so the effective Euclidean step size is 2*eta.
    """
    if not (eta > 0.0):
        raise InvalidInput(f"eta must be positive, got {eta}")
    x0_arr = _as_vector(x0, "x0")
    g_arr = _as_vector(g, "g")
    if x0_arr.shape != g_arr.shape or x0_arr.size != space.n:
        raise InvalidInput("x0 and g must match the set dimension")
    _require_finite(g_arr, "g")
    if not space.contains(x0_arr):
        raise InvalidInput("x0 lies outside the feasible set")

    if kernel.kind == EUCLIDEAN:
        target = x0_arr - (2.0 * eta) * g_arr
        if space.kind == BOX:
            return np.clip(target, space.lo, space.hi)
        return simplex_projection(target)

    # Entropy: multiplicative update x0 * exp(-2*eta*g), evaluated in log space.
    nu = kernel.floor
    if space.kind == SIMPLEX:
        logw = np.log(np.maximum(x0_arr, nu)) - (2.0 * eta) * g_arr
        logw -= logw.max()
        w = np.exp(logw)
        p = w / w.sum()
        if p.min() < nu:
            p = np.maximum(p, nu)
            p = p / p.sum()
        return p
    lo_eff = np.maximum(space.lo, nu)
    logw = np.log(np.maximum(x0_arr, lo_eff)) - (2.0 * eta) * g_arr
    # Cap the exponent at the upper bound's log so huge negative gradients
    # cannot overflow before the clamp.
    logw = np.minimum(logw, np.log(space.hi))
    return np.clip(np.exp(logw), lo_eff, space.hi)


def linear_max(space: FeasibleSet, c) -> tuple[float, np.ndarray]:
    """max_{x in space} <c, x> with its argmax (ties broken to the lowest index)."""
    c_arr = _require_finite(_as_vector(c, "c"), "c")
    if c_arr.size != space.n:
        raise InvalidInput("c must match the set dimension")
    if space.kind == BOX:
        argmax = np.where(c_arr > 0.0, space.hi, space.lo)
        return float(c_arr.dot(argmax)), argmax
    j = int(np.argmax(c_arr))
    vertex = np.zeros(space.n)
    vertex[j] = 1.0
    return float(c_arr[j]), vertex
