"""Discretised normed spaces, finite-dimensional subspaces and the angle metric.

Four ambient kinds are supported:

``grid-sup``
    continuous functions sampled on a uniform grid, sup norm over the grid.
``grid-sup-with-limit``
    as above, plus the value at infinity, which takes part in the sup.
``seq-l2-truncated``
    the first ``trunc_len`` coordinates of a sequence, Euclidean norm.
``product-sum``
    ``core x R^n`` with ``|(x, y)| = |x|_core + max_i |y_i|``.

Distances to a subspace in the sup-type spaces are Chebyshev problems
``min_beta max_j |v_j - sum_i beta_i e_ij|`` (plus a second max for the
finite block of a product space). One-dimensional targets are handled by a
golden-section search on the convex objective; higher dimensions by a
cutting-plane linear programme that only ever hands the LP solver the rows
that are currently binding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DegenerateBasisError,
    MalformedVectorError,
    SolverFailure,
    SpaceMismatchError,
    UnsupportedDimensionError,
)

GRID_SUP = "grid-sup"
GRID_SUP_LIMIT = "grid-sup-with-limit"
SEQ_L2 = "seq-l2-truncated"
PRODUCT_SUM = "product-sum"
KINDS = (GRID_SUP, GRID_SUP_LIMIT, SEQ_L2, PRODUCT_SUM)

MAX_SUBSPACE_DIM = 4
DEFAULT_SPHERE_SAMPLES = 720
INDEPENDENCE_TOL = 1e-8
ZERO_NORM = 1e-15

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AmbientSpace:
    kind: str
    x_min: float = 0.0
    x_max: float = 1.0
    step: float = 1e-4
    trunc_len: Optional[int] = None
    core: Optional["AmbientSpace"] = None
    fin_dim: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind in (GRID_SUP, GRID_SUP_LIMIT):
            if not self.step > 0:
                raise ValueError("grid step must be positive")
            span = self.x_max - self.x_min
            if span <= 0:
                raise ValueError("grid needs x_max > x_min")
            cells = span / self.step
            if abs(cells - round(cells)) > 1e-12 * max(cells, 1.0) or round(cells) < 1:
                raise ValueError(f"step {self.step} does not divide [{self.x_min}, {self.x_max}]")
        elif self.kind == SEQ_L2:
            if self.trunc_len is None or self.trunc_len < 1:
                raise ValueError("seq-l2-truncated needs a positive trunc_len")
        else:
            if self.core is None or self.core.kind not in (GRID_SUP, GRID_SUP_LIMIT):
                raise ValueError("product-sum needs a grid core space")
            if self.fin_dim < 0:
                raise ValueError("fin_dim must be non-negative")

    # constructors -----------------------------------------------------------------

    @classmethod
    def grid(cls, x_min, x_max, step, with_limit=False):
        return cls(GRID_SUP_LIMIT if with_limit else GRID_SUP, x_min=x_min, x_max=x_max, step=step)

    @classmethod
    def sequence(cls, trunc_len):
        return cls(SEQ_L2, trunc_len=trunc_len)

    @classmethod
    def product(cls, core, fin_dim):
        return cls(PRODUCT_SUM, core=core, fin_dim=fin_dim)

    @classmethod
    def sup_rn(cls, n):
        """R^n with the max norm, realised as an n-point grid."""
        return cls(GRID_SUP, x_min=0.0, x_max=float(n - 1), step=1.0)

    # geometry ---------------------------------------------------------------------

    @cached_property
    def points(self) -> np.ndarray:
        """Sample positions: grid nodes, sequence indices 1..L, or the core grid."""
        if self.kind == PRODUCT_SUM:
            return self.core.points
        if self.kind == SEQ_L2:
            return np.arange(1, self.trunc_len + 1, dtype=float)
        n = int(round((self.x_max - self.x_min) / self.step)) + 1
        return np.linspace(self.x_min, self.x_max, n)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def has_limit(self) -> bool:
        base = self.core if self.kind == PRODUCT_SUM else self
        return base.kind == GRID_SUP_LIMIT

    @property
    def euclidean(self) -> bool:
        return self.kind == SEQ_L2

    def zero(self) -> "Vector":
        return Vector(
            self,
            evaluator=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            limit_at_inf=0.0 if self.has_limit else None,
            fin_part=np.zeros(self.fin_dim) if self.kind == PRODUCT_SUM else None,
        )

    def describe(self) -> str:
        if self.kind == SEQ_L2:
            return f"{self.kind}(L={self.trunc_len})"
        if self.kind == PRODUCT_SUM:
            return f"{self.core.describe()} x R^{self.fin_dim} (sum norm)"
        return f"{self.kind}[{self.x_min}, {self.x_max}; h={self.step}]"


Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Vector:
    """Element of an ambient space.

    For product spaces ``samples``/``evaluator``/``limit_at_inf`` describe
    the core component and ``fin_part`` the finite block. Samples are
    computed lazily from the evaluator when not given.
    """

    space: AmbientSpace
    samples: Optional[np.ndarray] = None
    evaluator: Optional[Evaluator] = field(default=None, repr=False)
    limit_at_inf: Optional[float] = None
    fin_part: Optional[np.ndarray] = None
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        sp = self.space
        if self.samples is None and self.evaluator is None:
            raise MalformedVectorError("vector needs samples or an evaluator")
        if self.samples is not None:
            s = np.asarray(self.samples, dtype=float)
            if s.shape != (sp.size,):
                raise MalformedVectorError(
                    f"expected {sp.size} samples for {sp.describe()}, got shape {s.shape}"
                )
            object.__setattr__(self, "samples", s)
        if sp.kind == PRODUCT_SUM:
            if self.fin_part is None:
                raise MalformedVectorError("product-space vector needs fin_part")
            fin = np.asarray(self.fin_part, dtype=float).reshape(-1)
            if fin.shape != (sp.fin_dim,):
                raise MalformedVectorError(f"fin_part must have length {sp.fin_dim}")
            object.__setattr__(self, "fin_part", fin)
        elif self.fin_part is not None:
            raise MalformedVectorError("fin_part only applies to product spaces")
        if sp.has_limit:
            if self.limit_at_inf is None:
                raise MalformedVectorError("grid-sup-with-limit vectors carry limit_at_inf")
            object.__setattr__(self, "limit_at_inf", float(self.limit_at_inf))
        elif self.limit_at_inf is not None:
            raise MalformedVectorError("limit_at_inf only applies to grid-sup-with-limit")
        if self.check and self.samples is not None and self.evaluator is not None:
            ev = np.asarray(self.evaluator(sp.points), dtype=float)
            gap = np.max(np.abs(ev - self.samples))
            if gap > 1e-10 * max(1.0, np.max(np.abs(self.samples))):
                raise MalformedVectorError(f"samples and evaluator disagree by {gap:.3e}")

    @classmethod
    def from_function(cls, space, fn, limit_at_inf=None, fin_part=None):
        return cls(space, evaluator=fn, limit_at_inf=limit_at_inf, fin_part=fin_part)

    @cached_property
    def values(self) -> np.ndarray:
        if self.samples is not None:
            return self.samples
        vals = np.asarray(self.evaluator(self.space.points), dtype=float)
        if vals.shape != (self.space.size,):
            vals = np.broadcast_to(vals, (self.space.size,)).astype(float)
        return vals

    def __call__(self, x):
        """Evaluate the (core) function off-grid; needs an evaluator."""
        if self.evaluator is None:
            raise MalformedVectorError("vector has no closed-form evaluator")
        return self.evaluator(np.asarray(x, dtype=float))

    @property
    def limit_gap(self) -> Optional[float]:
        """|f(x_max) - limit|: how far the sampled window is from the limit."""
        if self.limit_at_inf is None:
            return None
        return float(abs(self.values[-1] - self.limit_at_inf))

    def core(self) -> "Vector":
        """Core component of a product-space vector as a vector of the core space."""
        if self.space.kind != PRODUCT_SUM:
            return self
        return Vector(
            self.space.core,
            samples=self.samples,
            evaluator=self.evaluator,
            limit_at_inf=self.limit_at_inf,
            check=False,
        )

    @classmethod
    def pair(cls, space, core_vec: "Vector", fin) -> "Vector":
        """Assemble a product-space vector from a core vector and a finite block."""
        if space.kind != PRODUCT_SUM or core_vec.space != space.core:
            raise SpaceMismatchError("pair() needs a product space and a vector of its core")
        return cls(
            space,
            samples=core_vec.samples,
            evaluator=core_vec.evaluator,
            limit_at_inf=core_vec.limit_at_inf,
            fin_part=np.asarray(fin, dtype=float),
            check=False,
        )

    # linear structure ---------------------------------------------------------------

    def lincomb(self, a: float, other: "Vector", b: float) -> "Vector":
        """Return ``a * self + b * other``."""
        if other.space != self.space:
            raise SpaceMismatchError("vectors live in different spaces")
        ev = None
        if self.evaluator is not None and other.evaluator is not None:
            e1, e2 = self.evaluator, other.evaluator
            ev = lambda x: a * e1(x) + b * e2(x)  # noqa: E731
        samples = None
        if ev is None or (self.samples is not None and other.samples is not None):
            samples = a * self.values + b * other.values
        lim = None
        if self.space.has_limit:
            lim = a * self.limit_at_inf + b * other.limit_at_inf
        fin = None
        if self.space.kind == PRODUCT_SUM:
            fin = a * self.fin_part + b * other.fin_part
        return Vector(self.space, samples=samples, evaluator=ev, limit_at_inf=lim, fin_part=fin, check=False)

    def scale(self, a: float) -> "Vector":
        ev = None
        if self.evaluator is not None:
            e = self.evaluator
            ev = lambda x: a * e(x)  # noqa: E731
        have = self.samples is not None or "values" in self.__dict__
        return Vector(
            self.space,
            samples=a * self.values if (have or ev is None) else None,
            evaluator=ev,
            limit_at_inf=None if self.limit_at_inf is None else a * self.limit_at_inf,
            fin_part=None if self.fin_part is None else a * self.fin_part,
            check=False,
        )

    def __add__(self, other):
        return self.lincomb(1.0, other, 1.0)

    def __sub__(self, other):
        return self.lincomb(1.0, other, -1.0)

    def __mul__(self, a):
        return self.scale(float(a))

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1.0)

    def __truediv__(self, a):
        return self.scale(1.0 / float(a))


# norms and block representation -----------------------------------------------------


def _blocks(v: Vector):
    """(sup block, max block) whose norm is ``max|a| + max|b|``."""
    a = v.values
    if v.limit_at_inf is not None:
        a = np.append(a, v.limit_at_inf)
    b = v.fin_part if v.fin_part is not None else np.empty(0)
    return a, b


def _block_norm(a, b) -> float:
    n = float(np.max(np.abs(a))) if a.size else 0.0
    if b.size:
        n += float(np.max(np.abs(b)))
    return n


def norm(v: Vector) -> float:
    """Norm of ``v`` in its ambient space; values at or below 1e-15 are reported as 0."""
    if v.space.euclidean:
        n = float(np.linalg.norm(v.values))
    else:
        n = _block_norm(*_blocks(v))
    return 0.0 if n <= ZERO_NORM else n


def normalize(v: Vector) -> Vector:
    n = norm(v)
    if n == 0.0:
        raise DegenerateBasisError("cannot normalise a zero vector")
    return v / n


# minimax machinery -----------------------------------------------------------------


def _golden_minimax(a, A, b, B, tol):
    """min over scalar beta of max|a - beta A| + max|b - beta B| (convex)."""
    A = A[:, 0]
    Bc = B[:, 0] if B.size else B.reshape(-1)

    def obj(beta):
        val = np.max(np.abs(a - beta * A))
        if b.size:
            val += np.max(np.abs(b - beta * Bc))
        return float(val)

    vnorm = _block_norm(a, b)
    enorm = _block_norm(A, Bc)
    if vnorm == 0.0:
        return 0.0, np.zeros(1)
    radius = 2.0 * vnorm / enorm * (1.0 + 1e-9)
    lo, hi = -radius, radius
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = obj(x1), obj(x2)
    best_x, best_f = 0.0, obj(0.0)
    width_tol = max(tol * 1e-3, 1e-14) * radius
    while hi - lo > width_tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = obj(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = obj(x2)
    for x, fx in ((x1, f1), (x2, f2)):
        if fx < best_f:
            best_x, best_f = x, fx
    return best_f, np.array([best_x])


def _lp_minimax(a, A, b, B, tol, max_iter, hint=None):
    """Cutting-plane LP for min_beta max|a - A beta| + max|b - B beta|.

    Returns (value, beta, active_rows). ``value`` is attained by ``beta``
    and exceeds the restricted-LP lower bound by at most the tolerance.
    """
    N, n = A.shape
    K = b.size
    scale = max(_block_norm(a, b), 1e-300)
    stacked = np.vstack([A, B]) if K else A
    rhs = np.concatenate([a, b]) if K else a
    beta = np.linalg.lstsq(stacked, rhs, rcond=None)[0]
    resid = np.abs(a - A @ beta)
    k0 = min(N, 4 * (n + 1))
    active = set(np.argpartition(-resid, k0 - 1)[:k0].tolist()) if N > k0 else set(range(N))
    if hint is not None:
        active.update(int(i) for i in hint if 0 <= i < N)

    # variables: beta (n), s, [r]
    nv = n + 1 + (1 if K else 0)
    c = np.zeros(nv)
    c[n] = 1.0
    if K:
        c[n + 1] = 1.0
    bounds = [(None, None)] * n + [(0, None)] * (nv - n)
    if K:
        fin_rows = np.zeros((2 * K, nv))
        fin_rows[:K, :n] = -B
        fin_rows[K:, :n] = B
        fin_rows[:, n + 1] = -1.0
        fin_rhs = np.concatenate([-b, b])

    best_val, best_beta = None, None
    for _ in range(max_iter):
        idx = np.fromiter(sorted(active), dtype=int)
        m = idx.size
        rows = np.zeros((2 * m, nv))
        rows[:m, :n] = -A[idx]
        rows[m:, :n] = A[idx]
        rows[:, n] = -1.0
        rhs_ub = np.concatenate([-a[idx], a[idx]])
        if K:
            rows = np.vstack([rows, fin_rows])
            rhs_ub = np.concatenate([rhs_ub, fin_rhs])
        res = linprog(c, A_ub=rows, b_ub=rhs_ub, bounds=bounds, method="highs", options=_HIGHS_OPTIONS)
        if res.status != 0:
            raise SolverFailure(f"LP sub-problem failed: {res.message}", best=best_val)
        beta = res.x[:n]
        lower = float(res.fun)
        s_level = float(res.x[n])
        core_res = np.abs(a - A @ beta)
        upper = float(np.max(core_res)) + (float(np.max(np.abs(b - B @ beta))) if K else 0.0)
        if best_val is None or upper < best_val:
            best_val, best_beta = upper, beta.copy()
        if upper - lower <= tol * upper + 1e-11 * scale:
            binding = idx[np.abs(a[idx] - A[idx] @ beta) >= s_level - 1e-9 * scale]
            return best_val, best_beta, binding
        viol = np.flatnonzero(core_res > s_level + 1e-12 * scale)
        viol = viol[~np.isin(viol, idx)]
        if viol.size == 0:
            # LP tolerance noise: the restricted solution is globally feasible
            return best_val, best_beta, idx
        take = min(viol.size, 4 * (n + 1))
        worst = viol[np.argpartition(-core_res[viol], take - 1)[:take]]
        active.update(worst.tolist())
    raise SolverFailure(f"minimax did not converge in {max_iter} rounds", best=best_val)


class _Target:
    """A subspace prepared for repeated distance queries (normalised columns)."""

    def __init__(self, S: "Subspace", tol=1e-6, max_iter=200):
        self.space = S.space
        self.tol = tol
        self.max_iter = max_iter
        self.scales = np.array([norm(e) for e in S.basis])
        cols = [_blocks(e) for e in S.basis]
        self.A = np.column_stack([c[0] for c in cols]) / self.scales
        self.B = (np.column_stack([c[1] for c in cols]) / self.scales) if cols[0][1].size else np.empty((0, S.dim))
        if self.space.euclidean:
            self.A = np.column_stack([e.values for e in S.basis]) / self.scales

    def solve(self, a, b, hint=None):
        """Distance of the block vector (a, b); returns (value, beta, residual blocks, hint)."""
        n = self.A.shape[1]
        if self.space.euclidean:
            beta = np.linalg.lstsq(self.A, a, rcond=None)[0]
            r = a - self.A @ beta
            return float(np.linalg.norm(r)), beta / self.scales, (r, b), None
        if n == 1:
            val, beta = _golden_minimax(a, self.A, b, self.B, self.tol)
            active = None
        else:
            val, beta, active = _lp_minimax(a, self.A, b, self.B, self.tol, self.max_iter, hint)
        r_a = a - self.A @ beta
        r_b = b - self.B @ beta if b.size else b
        return val, beta / self.scales, (r_a, r_b), active

    def residual_norm(self, r):
        if self.space.euclidean:
            return float(np.linalg.norm(r[0]))
        return _block_norm(*r)


def _vector_blocks(v: Vector):
    if v.space.euclidean:
        return v.values, np.empty(0)
    return _blocks(v)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Span of a finite, linearly independent list of vectors."""

    space: AmbientSpace
    basis: tuple

    def __post_init__(self):
        basis = tuple(self.basis)
        if not basis:
            raise DegenerateBasisError("subspace basis is empty")
        for e in basis:
            if e.space != self.space:
                raise SpaceMismatchError("basis vector outside the subspace's ambient space")
        object.__setattr__(self, "basis", basis)
        _check_independent(basis)

    @classmethod
    def span(cls, *vectors: Vector) -> "Subspace":
        if not vectors:
            raise DegenerateBasisError("span() of nothing")
        return cls(vectors[0].space, tuple(vectors))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def normalized(self) -> "Subspace":
        return Subspace(self.space, tuple(normalize(e) for e in self.basis))

    def vector(self, coeffs: Sequence[float]) -> Vector:
        out = self.basis[0] * float(coeffs[0])
        for c, e in zip(coeffs[1:], self.basis[1:]):
            out = out.lincomb(1.0, e, float(c))
        return out


def _check_independent(basis):
    norms = [norm(e) for e in basis]
    for i, (e, n) in enumerate(zip(basis, norms)):
        if n == 0.0:
            raise DegenerateBasisError(f"basis vector {i} is zero")
    if len(basis) == 1:
        return
    if len(basis) > MAX_SUBSPACE_DIM + 1:
        raise UnsupportedDimensionError(f"subspaces of dimension > {MAX_SUBSPACE_DIM} are not supported")
    for i, e in enumerate(basis):
        others = basis[:i] + basis[i + 1:]
        tgt = _target_from_vectors(others)
        a, b = _vector_blocks(e)
        d = tgt.solve(a, b)[0]
        if d <= INDEPENDENCE_TOL * norms[i]:
            raise DegenerateBasisError(
                f"basis vector {i} lies within {d:.3e} of the span of the others"
            )


def _target_from_vectors(vectors, tol=1e-6, max_iter=200):
    """_Target for a vector list without re-running the independence test."""
    S = object.__new__(Subspace)
    object.__setattr__(S, "space", vectors[0].space)
    object.__setattr__(S, "basis", tuple(vectors))
    return _Target(S, tol=tol, max_iter=max_iter)


# public operations -----------------------------------------------------------------


def _same_space(v_space, S):
    if v_space != S.space:
        raise SpaceMismatchError("operands live in different ambient spaces")


def distance_to_subspace(v: Vector, S: Subspace, tol: float = 1e-6, max_iter: int = 200):
    """Distance from ``v`` to ``span(S)`` and the minimising coefficients.

    Returns:
        ``(distance, beta)`` with ``|v - sum beta_i e_i|`` equal to ``distance``
        and within ``tol`` (relative) of the discrete minimum.

    Raises:
        SolverFailure: the cutting-plane loop ran out of rounds.
    """
    _same_space(v.space, S)
    if S.dim > MAX_SUBSPACE_DIM:
        raise UnsupportedDimensionError(f"target dimension {S.dim} exceeds {MAX_SUBSPACE_DIM}")
    tgt = _Target(S, tol=tol, max_iter=max_iter)
    a, b = _vector_blocks(v)
    val, beta, _, _ = tgt.solve(a, b)
    return val, beta


def unit_sphere_samples(S: Subspace, M: int = DEFAULT_SPHERE_SAMPLES):
    """Unit vectors of ``S``: the normalised basis vector (dim 1) or M directions (dim 2)."""
    if S.dim == 1:
        return [normalize(S.basis[0])]
    if S.dim != 2:
        raise UnsupportedDimensionError("unit-sphere sampling handles dimensions 1 and 2")
    # unit basis vectors make the sample set independent of basis scaling
    e1, e2 = (normalize(e) for e in S.basis)
    out = []
    for j in range(M):
        th = math.pi * j / M
        out.append(normalize(e1.lincomb(math.cos(th), e2, math.sin(th))))
    return out


def deficiency(A: Subspace, B: Subspace, M: int = DEFAULT_SPHERE_SAMPLES, tol: float = 1e-6) -> float:
    """``sup`` over sampled unit vectors ``a`` of ``A`` of ``rho(a, B)``.

    For dim-2 ``A`` the directions ``cos t e1 + sin t e2``, ``t = j pi / M``,
    are used, with ``e1``, ``e2`` the basis scaled to unit norm. Exact solves are only run where a convexity bound (built
    from neighbouring solved directions) could beat the current maximum,
    so the value equals the brute-force maximum over all M directions.
    """
    _same_space(A.space, B)
    if A.dim > 2:
        raise UnsupportedDimensionError("deficiency samples unit spheres of dimension <= 2 only")
    tgt = _Target(B, tol=tol)
    if A.dim == 1:
        u = normalize(A.basis[0])
        return tgt.solve(*_vector_blocks(u))[0]

    (a1, b1), (a2, b2) = (_vector_blocks(normalize(e)) for e in A.basis)
    thetas = math.pi * np.arange(M) / M
    cs, sn = np.cos(thetas), np.sin(thetas)

    def direction(j):
        return cs[j] * a1 + sn[j] * a2, cs[j] * b1 + sn[j] * b2

    def dnorm(blk):
        return float(np.linalg.norm(blk[0])) if A.space.euclidean else _block_norm(*blk)

    stride = max(1, min(8, M // 16))
    coarse = list(range(0, M, stride))
    solved = {}
    best = 0.0
    hint = None
    for j in coarse:
        blk = direction(j)
        val, _, resid, hint = tgt.solve(*blk, hint=hint)
        ratio = val / dnorm(blk)
        solved[j] = (resid, ratio)
        best = max(best, ratio)
    if stride == 1:
        return best

    # upper bounds for the remaining directions from the two solved neighbours
    bounds = []
    for pos, jl in enumerate(coarse):
        jr = coarse[pos + 1] if pos + 1 < len(coarse) else M
        rl = solved[jl][0]
        if jr == M:  # direction M is the antipode of direction 0
            rr = tuple(-x for x in solved[0][0])
        else:
            rr = solved[jr][0]
        thl, thr = thetas[jl], math.pi * jr / M
        den = math.sin(thr - thl)
        for j in range(jl + 1, jr):
            wl = math.sin(thr - thetas[j]) / den
            wr = math.sin(thetas[j] - thl) / den
            r = (wl * rl[0] + wr * rr[0], wl * rl[1] + wr * rr[1])
            blk = direction(j)
            bounds.append((tgt.residual_norm(r) / dnorm(blk), j))
    bounds.sort(reverse=True)
    for ub, j in bounds:
        if ub <= best * (1.0 + tol) + 1e-13:
            break
        blk = direction(j)
        val, _, _, hint = tgt.solve(*blk, hint=hint)
        best = max(best, val / dnorm(blk))
    return best


def angle(A: Subspace, B: Subspace, M: int = DEFAULT_SPHERE_SAMPLES, tol: float = 1e-6) -> float:
    """Angle (gap) between subspaces: the smaller of the two one-sided deficiencies.

    Both deficiencies are evaluated in a fixed order so the result is
    symmetric bit for bit.
    """
    d1 = deficiency(A, B, M, tol)
    d2 = deficiency(B, A, M, tol)
    return min(d1, d2)


def deficiency_pair(A: Subspace, B: Subspace, M: int = DEFAULT_SPHERE_SAMPLES, tol: float = 1e-6):
    """Both one-sided deficiencies ``(A -> B, B -> A)``."""
    return deficiency(A, B, M, tol), deficiency(B, A, M, tol)
