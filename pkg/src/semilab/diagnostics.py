"""Measurements on semigroup orbits and on moving subspaces Y_t.

Limits (``-> 0``, divergence) are only ever witnessed on finite windows:
every routine returns the curve it looked at together with the
threshold it used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateBasisError, UnsupportedDimensionError, UnsupportedScenarioError
from .semigroup import SemigroupScenario, product_vector
from .space import (
    DEFAULT_SPHERE_SAMPLES,
    Subspace,
    Vector,
    angle,
    norm,
    normalize,
    unit_sphere_samples,
)
from .specialfn import finite_diff

DECAYING = "decaying"
NON_DECAYING = "non-decaying"
INCONCLUSIVE = "inconclusive"

ANGLE_MEASURE = "angle"
INCREMENT_MEASURE = "increment"

CLOSED_FORM = "closed-form"
FINITE_DIFF = "finite-diff"
GENERATOR_TOL = {CLOSED_FORM: 1e-8, FINITE_DIFF: 1e-4}
INVARIANCE_TOL = 1e-3

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# records -----------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayCurve:
    """``verdict`` is decaying iff every norm on ``window`` is <= ``threshold``."""

    times: np.ndarray
    norms: np.ndarray
    verdict: str
    threshold: float
    window: tuple


@dataclass(frozen=True)
class AngleTrajectory:
    T_grid: np.ndarray
    s_grid: np.ndarray
    angles: np.ndarray
    sup_profile: np.ndarray

    def rows(self):
        """(T, s, angle, sup_profile) rows in T-major order."""
        for i, T in enumerate(self.T_grid):
            for j, s in enumerate(self.s_grid):
                yield float(T), float(s), float(self.angles[i, j]), float(self.sup_profile[i])


@dataclass(frozen=True)
class SeriesLedger:
    k_max: int
    terms: np.ndarray
    partial_sums: np.ndarray
    measure: str = ANGLE_MEASURE

    @property
    def ks(self) -> np.ndarray:
        return np.arange(1, self.k_max + 1)

    def partial_sum(self, k: int) -> float:
        """Sum of terms 1..k (0 for k = 0)."""
        if k < 0 or k > self.k_max:
            raise IndexError(f"k={k} outside 0..{self.k_max}")
        return 0.0 if k == 0 else float(self.partial_sums[k - 1])

    def block_sum(self, k_lo: int, k_hi: int) -> float:
        return self.partial_sum(k_hi) - self.partial_sum(k_lo)


@dataclass(frozen=True)
class InvarianceReport:
    kind: str
    residuals: Dict[str, float]
    tolerances: Dict[str, float]
    passed: bool = field(init=False)

    def __post_init__(self):
        ok = all(self.residuals[k] <= self.tolerances[k] for k in self.residuals)
        object.__setattr__(self, "passed", bool(ok))

    @property
    def worst(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "residuals": dict(self.residuals),
            "tolerances": dict(self.tolerances),
        }


# helpers -----------------------------------------------------------------------------


def evolved_subspace(sem: SemigroupScenario, Y: Subspace, t) -> Subspace:
    """Y_t with each evolved basis vector scaled to unit norm."""
    vecs = []
    for b in Y.basis:
        bt = sem.apply(b, t)
        if norm(bt) == 0.0:
            raise DegenerateBasisError(f"{sem.name}: a basis vector vanishes at t={t}", time=float(t))
        vecs.append(normalize(bt))
    try:
        return Subspace.span(*vecs)
    except DegenerateBasisError as exc:
        raise DegenerateBasisError(f"{sem.name}: evolved basis degenerates at t={t}", time=float(t)) from exc


class _SubspaceCache:
    def __init__(self, sem, Y):
        self.sem, self.Y, self.store = sem, Y, {}

    def __call__(self, t):
        key = round(float(t), 12)
        if key not in self.store:
            self.store[key] = self.Y if key == 0.0 else evolved_subspace(self.sem, self.Y, key)
        return self.store[key]


def _x0_distance(sem: SemigroupScenario, x0_distance=None):
    fn = x0_distance or sem.x0_distance
    if fn is None:
        raise UnsupportedScenarioError(f"{sem.name}: no closed-form distance to X0")
    return fn


# orbit decay and the m-functional ------------------------------------------------------


def orbit_decay(sem: SemigroupScenario, v: Vector, t_grid, threshold: float = 1e-3) -> DecayCurve:
    """Sample |v_t| and classify the tail window [T_max/2, T_max].

    ``inconclusive`` means the window is still above threshold but its last
    value is below 0.8 of its first, i.e. visibly decreasing (a 1/t tail
    halves over the window).
    """
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or ts.size == 0 or np.any(np.diff(ts) <= 0):
        raise ValueError("t_grid must be nonempty and increasing")
    norms = np.array([norm(sem.apply(v, t)) for t in ts])
    t_max = float(ts[-1])
    t_half = 0.5 * t_max
    win = norms[ts >= t_half]
    if win.max() <= threshold:
        verdict = DECAYING
    elif win[-1] < 0.8 * win[0]:
        verdict = INCONCLUSIVE
    else:
        verdict = NON_DECAYING
    return DecayCurve(ts, norms, verdict, float(threshold), (t_half, t_max))


def m_functional(
    sem: SemigroupScenario,
    v: Vector,
    T_max: float,
    x0_distance: Optional[Callable[[Vector], float]] = None,
    n_grid: int = 2001,
    tol: float = 1e-10,
) -> float:
    """inf over t in [0, T_max] of the distance from v_t to X0.

    Grid search followed by golden-section refinement between the
    neighbours of the best grid point (integers only for discrete scenarios).
    """
    dist = _x0_distance(sem, x0_distance)
    f = lambda t: float(dist(sem.apply(v, t)))  # noqa: E731
    if sem.discrete:
        ts = np.arange(0, int(T_max) + 1, dtype=float)
    else:
        ts = np.linspace(0.0, float(T_max), max(int(n_grid), 3))
    vals = np.array([f(t) for t in ts])
    i = int(np.argmin(vals))
    best = float(vals[i])
    if sem.discrete or best == 0.0:
        return best
    lo = ts[max(i - 1, 0)]
    hi = ts[min(i + 1, len(ts) - 1)]
    a, b = lo + (1 - _GOLDEN) * (hi - lo), lo + _GOLDEN * (hi - lo)
    fa, fb = f(a), f(b)
    while hi - lo > tol * max(1.0, abs(hi)):
        if fa <= fb:
            hi, b, fb = b, a, fa
            a = lo + (1 - _GOLDEN) * (hi - lo)
            fa = f(a)
        else:
            lo, a, fa = a, b, fb
            b = lo + _GOLDEN * (hi - lo)
            fb = f(b)
    return min(best, fa, fb)


# moving subspaces -----------------------------------------------------------------------


def angle_trajectory(
    sem: SemigroupScenario,
    Y: Subspace,
    T_grid,
    s_grid,
    M: int = DEFAULT_SPHERE_SAMPLES,
    tol: float = 1e-6,
) -> AngleTrajectory:
    """angles[i, j] = angle(Y_{T_i}, Y_{T_i + s_j}); sup_profile is the row max."""
    if Y.dim > 2:
        raise UnsupportedDimensionError("angle trajectories need dim <= 2")
    Ts = np.asarray(T_grid, dtype=float)
    ss = np.asarray(s_grid, dtype=float)
    at = _SubspaceCache(sem, Y)
    angles = np.empty((Ts.size, ss.size))
    for i, T in enumerate(Ts):
        base = at(T)
        for j, s in enumerate(ss):
            angles[i, j] = 0.0 if s == 0.0 else angle(base, at(T + s), M=M, tol=tol)
    return AngleTrajectory(Ts, ss, angles, angles.max(axis=1) if ss.size else np.zeros(Ts.size))


def _dim1_generator(sem, Y):
    if Y.dim != 1:
        raise UnsupportedDimensionError("the increment measure applies to one-dimensional Y")
    return Y.basis[0]


def cauchy_series(
    sem: SemigroupScenario,
    Y: Subspace,
    k_max: int,
    measure: str = ANGLE_MEASURE,
    M: int = DEFAULT_SPHERE_SAMPLES,
    tol: float = 1e-6,
) -> SeriesLedger:
    """Terms for k = 1..k_max and their prefix sums.

    ``measure="angle"``: angle(Y_{k+1}, Y_k).
    ``measure="increment"``: |e_{k+1} - e_k| for the orbit of the single
    basis vector e of a one-dimensional Y (the unnormalized step length).
    """
    k_max = int(k_max)
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    terms = np.empty(k_max)
    if measure == ANGLE_MEASURE:
        if Y.dim > 2:
            raise UnsupportedDimensionError("angle series need dim <= 2")
        prev = evolved_subspace(sem, Y, 1)
        for k in range(1, k_max + 1):
            nxt = evolved_subspace(sem, Y, k + 1)
            terms[k - 1] = angle(nxt, prev, M=M, tol=tol)
            prev = nxt
    elif measure == INCREMENT_MEASURE:
        e = _dim1_generator(sem, Y)
        prev = sem.apply(e, 1)
        for k in range(1, k_max + 1):
            nxt = sem.apply(e, k + 1)
            terms[k - 1] = norm(nxt - prev)
            prev = nxt
    else:
        raise ValueError(f"unknown measure {measure!r}")
    return SeriesLedger(k_max, terms, np.cumsum(terms), measure)


def estimate_limit_subspace(sem: SemigroupScenario, Y: Subspace, T_probe: float, M: int = DEFAULT_SPHERE_SAMPLES):
    """Return (Y_{T_probe}, angle(Y_{T_probe}, Y_{T_probe/2}))."""
    if Y.dim > 2:
        raise UnsupportedDimensionError("limit estimation needs dim <= 2")
    late = evolved_subspace(sem, Y, T_probe)
    half = 0.5 * float(T_probe)
    if sem.discrete:
        half = float(math.floor(half))
    mid = evolved_subspace(sem, Y, half) if half > 0 else Y
    return late, angle(late, mid, M=M)


def _sphere_coeffs(dim: int, M: int):
    if dim == 1:
        return np.ones((1, 1))
    if dim == 2:
        th = np.pi * np.arange(M) / M
        return np.column_stack([np.cos(th), np.sin(th)])
    raise UnsupportedDimensionError("coefficient probes need dim <= 2")


def coefficient_bound_probe(sem: SemigroupScenario, Y: Subspace, t_grid, M: int = 180) -> float:
    """min over t and sampled directions beta of |sum beta_i e^i_t| / sum |beta_i|.

    The coefficients of ``y_t`` in the evolved basis equal those of ``y`` in
    the original basis (linearity), so no projection is needed.
    """
    coeffs = _sphere_coeffs(Y.dim, M)
    best = math.inf
    for t in np.asarray(t_grid, dtype=float):
        ev = [sem.apply(b, t) for b in Y.basis]
        for beta in coeffs:
            y = ev[0] * beta[0]
            for c, e in zip(beta[1:], ev[1:]):
                y = y + e * c
            best = min(best, norm(y) / float(np.sum(np.abs(beta))))
    return float(best)


def growth_profile(sem: SemigroupScenario, probes: Sequence[Vector], T_grid) -> np.ndarray:
    """Rows (t, max_probe |phi_t v| / |v|): a lower envelope of the operator norm."""
    base = [norm(p) for p in probes]
    if not probes or min(base) == 0.0:
        raise ValueError("probes must be nonzero")
    out = []
    for t in np.asarray(T_grid, dtype=float):
        out.append((t, max(norm(sem.apply(p, t)) / n for p, n in zip(probes, base))))
    return np.array(out, dtype=float).reshape(-1, 2)


def x0_angle(sem: SemigroupScenario, Y: Subspace, t, M: int = DEFAULT_SPHERE_SAMPLES) -> float:
    """sup over unit y in Y_t of the distance from y to X0.

    X0 is infinite dimensional in the product scenarios, so only this
    deficiency is meaningful (the other side is ~1 for any finite Y).
    """
    dist = _x0_distance(sem)
    Yt = evolved_subspace(sem, Y, t)
    return max(float(dist(u)) for u in unit_sphere_samples(Yt, M))


def parallel_projection_gap(sem: SemigroupScenario, t: float) -> float:
    """|phi_t(0, -t, 1) - phi_{t+1}(0, -t-1, 1)| for the Jordan-coupled product scenario.

    Both vectors have finite block (0, 1), so their difference is the jump of
    ``phi_t(0, -t, 1)`` onto Y_{t+1} along the core space.
    """
    if sem.space.fin_dim != 2:
        raise UnsupportedScenarioError("needs a product scenario with a two-dimensional finite block")
    zero = lambda x: np.zeros(np.shape(x))  # noqa: E731
    a = sem.apply(product_vector(sem.space, zero, [-t, 1.0]), t)
    b = sem.apply(product_vector(sem.space, zero, [-(t + 1.0), 1.0]), t + 1.0)
    return norm(a - b)


# invariance -------------------------------------------------------------------------------


def generator_conditions_check(
    g: Callable,
    k: Callable,
    l: Callable,
    grid,
    mode: str = CLOSED_FORM,
    dk: Optional[Callable] = None,
    dl: Optional[Callable] = None,
    h: float = 1e-4,
) -> InvarianceReport:
    """Residuals |k' + g|_inf and |l' - k|_inf on ``grid``.

    These are the conditions under which span{(k, 1, 0), (l, 0, 1)} is
    invariant for translations coupled through g. In closed-form mode the
    derivatives ``dk``, ``dl`` must be given; finite-diff mode uses forward
    differences with step ``h``.
    """
    x = np.asarray(grid, dtype=float)
    if mode == CLOSED_FORM:
        if dk is None or dl is None:
            raise ValueError("closed-form mode needs dk and dl")
        kp, lp = np.asarray(dk(x), dtype=float), np.asarray(dl(x), dtype=float)
    elif mode == FINITE_DIFF:
        kp = np.asarray(finite_diff(lambda s: np.asarray(k(x + s), dtype=float), 0.0, h))
        lp = np.asarray(finite_diff(lambda s: np.asarray(l(x + s), dtype=float), 0.0, h))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    res = {
        "k_prime_plus_g": float(np.max(np.abs(kp + np.asarray(g(x), dtype=float)))),
        "l_prime_minus_k": float(np.max(np.abs(lp - np.asarray(k(x), dtype=float)))),
    }
    tol = GENERATOR_TOL[mode]
    return InvarianceReport("generator", res, {name: tol for name in res})


def invariance_residual(
    sem: SemigroupScenario,
    S: Subspace,
    t_grid: Iterable[float],
    tol: float = INVARIANCE_TOL,
    M: int = DEFAULT_SPHERE_SAMPLES,
) -> InvarianceReport:
    """angle(S, S_t) for each t; passes iff all are <= tol."""
    if S.dim > 2:
        raise UnsupportedDimensionError("invariance residuals need dim <= 2")
    res = {}
    for t in t_grid:
        res[f"t={float(t):g}"] = angle(S, evolved_subspace(sem, S, t), M=M)
    return InvarianceReport("trajectory", res, {name: float(tol) for name in res})
