"""Semigroup scenarios and the triangular (Duhamel) extension.

A scenario bundles an ambient space with an evolution law ``apply(v, t)``
plus declared metadata (growth class, a known invariant subspace, how to
measure the distance to the decaying subspace X0). All built-in laws are
closed form except :func:`duhamel_extension`, which integrates the coupling
block numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, MalformedVectorError, QuadratureFailure, SpaceMismatchError
from .space import PRODUCT_SUM, AmbientSpace, Subspace, Vector, norm
from .specialfn import composite_simpson_weights, si, sinc

CONTINUOUS = "continuous"
DISCRETE = "discrete"
GROWTH_CLASSES = ("bounded", "slow", "linear", "unbounded-exponential")

HALF_LINE_MAX = 400.0
HALF_LINE_STEP = 0.02
UNIT_STEP = 1e-4


@dataclass(frozen=True)
class SemigroupScenario:
    name: str
    space: AmbientSpace
    evolve: Callable[[Vector, float], Vector] = field(repr=False)
    time_domain: str = CONTINUOUS
    growth_class: str = "bounded"
    known_invariant: Optional[Subspace] = field(default=None, repr=False)
    x0_description: str = ""
    x0_distance: Optional[Callable[[Vector], float]] = field(default=None, repr=False)
    law_tol: float = 1e-8

    def __post_init__(self):
        if self.time_domain not in (CONTINUOUS, DISCRETE):
            raise ValueError(f"unknown time domain {self.time_domain!r}")
        if self.growth_class not in GROWTH_CLASSES:
            raise ValueError(f"unknown growth class {self.growth_class!r}")

    @property
    def discrete(self) -> bool:
        return self.time_domain == DISCRETE

    def check_time(self, t) -> float:
        t = float(t)
        if not t >= 0.0:
            raise DomainError(f"{self.name}: negative time {t}")
        if self.discrete and not t.is_integer():
            raise DomainError(f"{self.name}: discrete scenario evaluated at fractional time {t}")
        return t

    def apply(self, v: Vector, t) -> Vector:
        t = self.check_time(t)
        if v.space != self.space:
            raise SpaceMismatchError(f"{self.name}: vector is not in {self.space.describe()}")
        if t == 0.0:
            return v
        return self.evolve(v, t)


def apply(sem: SemigroupScenario, v: Vector, t) -> Vector:
    return sem.apply(v, t)


def semigroup_law_residual(sem: SemigroupScenario, v: Vector, t, q) -> float:
    """|phi_q(phi_t v) - phi_{t+q} v|."""
    lhs = sem.apply(sem.apply(v, t), q)
    rhs = sem.apply(v, float(t) + float(q))
    return norm(lhs - rhs)


def _fin_norm(v: Vector) -> float:
    return float(np.max(np.abs(v.fin_part))) if v.fin_part.size else 0.0


def _require_evaluator(v: Vector, who: str):
    if v.evaluator is None:
        raise MalformedVectorError(f"{who} reads beyond the grid and needs a closed-form evaluator")
    return v.evaluator


# elementary scenarios -------------------------------------------------------------


def multiplication_semigroup(step: float = UNIT_STEP) -> SemigroupScenario:
    """``(phi_t f)(x) = x**t f(x)`` on C[0, 1]."""
    space = AmbientSpace.grid(0.0, 1.0, step)
    pts = space.points

    def evolve(v, t):
        ev = None
        if v.evaluator is not None:
            e = v.evaluator
            ev = lambda x: np.power(x, t) * e(x)  # noqa: E731
        return Vector(space, samples=np.power(pts, t) * v.values, evaluator=ev, check=False)

    return SemigroupScenario(
        name="ex2-multiplication",
        space=space,
        evolve=evolve,
        growth_class="bounded",
        x0_description="{f in C[0,1] : f(1) = 0}",
        x0_distance=lambda v: abs(float(v.values[-1])),
    )


def translation_semigroup(space: AmbientSpace, name: str = "translation") -> SemigroupScenario:
    """Left translation ``f(x) -> f(x + t)`` on a half-line grid space."""
    if space.kind == PRODUCT_SUM or space.euclidean:
        raise ValueError("translation acts on grid function spaces")

    def evolve(v, t):
        e = _require_evaluator(v, "translation")
        return Vector(space, evaluator=lambda x: e(x + t), limit_at_inf=v.limit_at_inf, check=False)

    if space.has_limit:
        x0 = "functions tending to zero"
        dist = lambda v: abs(v.limit_at_inf)  # noqa: E731
    else:
        x0 = "the whole space C0(R+)"
        dist = lambda v: 0.0  # noqa: E731
    return SemigroupScenario(
        name=name,
        space=space,
        evolve=evolve,
        growth_class="bounded",
        x0_description=x0,
        x0_distance=dist,
    )


def constant_function(space: AmbientSpace, c: float = 1.0) -> Vector:
    return Vector(
        space,
        evaluator=lambda x: np.full(np.shape(x), float(c)),
        limit_at_inf=float(c) if space.has_limit else None,
    )


def example3_vector(space: AmbientSpace) -> Vector:
    """``1 + sin(pi x)/x``, limit 1."""
    return Vector(space, evaluator=lambda x: 1.0 + math.pi * np.sinc(x), limit_at_inf=1.0)


def translation_limit_semigroup(domain_max: float = HALF_LINE_MAX, step: float = HALF_LINE_STEP) -> SemigroupScenario:
    """Translation on functions with a limit at infinity; constants are invariant."""
    space = AmbientSpace.grid(0.0, domain_max, step, with_limit=True)
    base = translation_semigroup(space, name="ex3-translation-limit")
    return SemigroupScenario(
        name=base.name,
        space=space,
        evolve=base.evolve,
        growth_class="bounded",
        known_invariant=Subspace.span(constant_function(space)),
        x0_description=base.x0_description,
        x0_distance=base.x0_distance,
    )


def shift_double_discrete(trunc_len: int = 64) -> SemigroupScenario:
    """Powers of ``T(x1, x2, ...) = (2 x2, 2 x3, ...)`` on truncated l2.

    Coordinates shifted in from beyond ``trunc_len`` are unknown and set to
    zero, so orbits are faithful for ``n <= trunc_len / 2`` only when the
    tail is negligible.
    """
    if trunc_len < 8:
        raise ValueError("trunc_len must be at least 8")
    space = AmbientSpace.sequence(trunc_len)

    def evolve(v, n):
        n = int(n)
        out = np.zeros(trunc_len)
        if n < trunc_len:
            out[: trunc_len - n] = v.values[n:] * 2.0 ** n
        return Vector(space, samples=out, check=False)

    return SemigroupScenario(
        name="ex1-shift-double",
        space=space,
        evolve=evolve,
        time_domain=DISCRETE,
        growth_class="unbounded-exponential",
        x0_description="contains all finite sequences; dense, not closed",
        x0_distance=None,
    )


def jordan_block_Q(coords, t):
    """``(y, z) -> (y + t z, z)``."""
    y, z = coords
    return np.array([y + t * z, z], dtype=float)


def jordan_semigroup() -> SemigroupScenario:
    """The Jordan flow on Euclidean R^2; X0 = {0}."""
    space = AmbientSpace.sequence(2)

    def evolve(v, t):
        return Vector(space, samples=jordan_block_Q(v.values, t), check=False)

    return SemigroupScenario(
        name="remark2-jordan",
        space=space,
        evolve=evolve,
        growth_class="linear",
        known_invariant=Subspace.span(Vector(space, samples=[1.0, 0.0])),
        x0_description="{0}",
        x0_distance=norm,
    )


def expm_small(A) -> np.ndarray:
    """exp(A) for a small dense matrix: scaling and squaring around a 12-term Taylor sum."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    nrm = np.linalg.norm(A, 1)
    squarings = 0
    if nrm > 0.25:
        squarings = int(math.ceil(math.log2(nrm / 0.25)))
    B = A / (2.0 ** squarings)
    n = A.shape[0]
    term = np.eye(n)
    total = np.eye(n)
    for k in range(1, 13):
        term = term @ B / k
        total = total + term
    for _ in range(squarings):
        total = total @ total
    return total


def matrix_semigroup(A, growth_class: str = "unbounded-exponential", name: str = "matrix") -> SemigroupScenario:
    """``Q_t = exp(t A)`` on Euclidean R^n, n <= 3."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1] or A.shape[0] > 3:
        raise ValueError("matrix_semigroup takes a square matrix of size <= 3")
    space = AmbientSpace.sequence(A.shape[0])

    def evolve(v, t):
        return Vector(space, samples=expm_small(t * A) @ v.values, check=False)

    return SemigroupScenario(
        name=name,
        space=space,
        evolve=evolve,
        growth_class=growth_class,
        x0_description="vectors of the stable spectral subspace",
    )


# Example 4: translations on C0(R+) coupled to the Jordan block -------------------------


def ex4_g(x):
    return sinc(x)


def ex4_k(x):
    """pi/2 - Si(x): minus the antiderivative of sin x / x vanishing at infinity."""
    return 0.5 * math.pi - si(x)


def ex4_l(x):
    """x (pi/2 - Si(x)) - cos x: antiderivative of ``ex4_k`` vanishing at infinity."""
    x = np.asarray(x, dtype=float)
    return x * (0.5 * math.pi - si(x)) - np.cos(x)


def sinc_integral(x, t):
    """int_0^t sin(x+s)/(x+s) ds = Si(x+t) - Si(x)."""
    return si(np.asarray(x, dtype=float) + t) - si(x)


def sinc_moment(x, t):
    """int_0^t sin(x+s)/(x+s) s ds = cos x - cos(x+t) - x (Si(x+t) - Si(x))."""
    x = np.asarray(x, dtype=float)
    return np.cos(x) - np.cos(x + t) - x * sinc_integral(x, t)


def ex4_h(x, t, a, b):
    """Core part of the vector of Y_t whose finite block is (a, b)."""
    return a * sinc_integral(x, t) - b * sinc_moment(x, t)


def half_line_space(domain_max: float = HALF_LINE_MAX, step: float = HALF_LINE_STEP) -> AmbientSpace:
    return AmbientSpace.grid(0.0, domain_max, step)


def product_vector(space: AmbientSpace, fn, fin) -> Vector:
    return Vector(space, evaluator=fn, fin_part=np.asarray(fin, dtype=float))


def _zero_fn(x):
    return np.zeros(np.shape(x))


def example4_invariant_subspace(space: AmbientSpace) -> Subspace:
    """span{(k, 1, 0), (l, 0, 1)}: the invariant complement built from Si."""
    return Subspace.span(product_vector(space, ex4_k, [1.0, 0.0]), product_vector(space, ex4_l, [0.0, 1.0]))


def example4_coordinate_plane(space: AmbientSpace) -> Subspace:
    """Y = 0 x R^2."""
    return Subspace.span(product_vector(space, _zero_fn, [1.0, 0.0]), product_vector(space, _zero_fn, [0.0, 1.0]))


def example4_semigroup(domain_max: float = HALF_LINE_MAX, step: float = HALF_LINE_STEP) -> SemigroupScenario:
    """Translations on C0(R+) x R^2 driven by the Jordan block through g = sin x / x.

    ``phi_t(f, y, z) = (f(x+t) + y I(x,t) + z (t I(x,t) - J(x,t)), y + t z, z)``
    with ``I = int_0^t g(x+s) ds`` and ``J = int_0^t g(x+s) s ds``.
    """
    space = AmbientSpace.product(half_line_space(domain_max, step), 2)

    def evolve(v, t):
        f = _require_evaluator(v, "example 4")
        y, z = v.fin_part

        def ev(x):
            x = np.asarray(x, dtype=float)
            I = sinc_integral(x, t)
            J = np.cos(x) - np.cos(x + t) - x * I
            return f(x + t) + y * I + z * (t * I - J)

        return Vector(space, evaluator=ev, fin_part=jordan_block_Q((y, z), t), check=False)

    return SemigroupScenario(
        name="ex4-nonstabilizable",
        space=space,
        evolve=evolve,
        growth_class="linear",
        known_invariant=example4_invariant_subspace(space),
        x0_description="C0(R+) x {0}",
        x0_distance=_fin_norm,
    )


# Example 5: slowly increasing semigroup -------------------------------------------------


def ex5_g(x):
    return 1.0 / (np.asarray(x, dtype=float) + 1.0)


def example5_semigroup(domain_max: float = HALF_LINE_MAX, step: float = HALF_LINE_STEP) -> SemigroupScenario:
    """``phi_t(f, y) = (f(x+t) + y ln((x+1+t)/(x+1)), y)`` on C0(R+) x R."""
    space = AmbientSpace.product(half_line_space(domain_max, step), 1)

    def evolve(v, t):
        f = _require_evaluator(v, "example 5")
        y = float(v.fin_part[0])

        def ev(x):
            x = np.asarray(x, dtype=float)
            return f(x + t) + y * np.log1p(t / (x + 1.0))

        return Vector(space, evaluator=ev, fin_part=v.fin_part.copy(), check=False)

    return SemigroupScenario(
        name="ex5-log-growth",
        space=space,
        evolve=evolve,
        growth_class="slow",
        x0_description="C0(R+) x {0}",
        x0_distance=_fin_norm,
    )


# triangular extension ------------------------------------------------------------------


def default_quad_step(t: float) -> float:
    return min(max(1e-3 * t, 1e-4), 1e-2)


@dataclass(frozen=True)
class TriangularSpec:
    """Data of the block generator [[alpha, P], [0, Q]].

    ``P(b) = sum_i b_i P_columns[i]``. ``quad_step=None`` selects
    ``default_quad_step(t)`` per evaluation.
    """

    alpha: SemigroupScenario
    Q_dim: int
    Q_apply: Callable[[np.ndarray, float], np.ndarray]
    P_columns: Sequence[Optional[Vector]]
    quad_step: Optional[float] = None
    quad_tol: float = 1e-7

    def __post_init__(self):
        if not 1 <= self.Q_dim <= 3:
            raise ValueError("Q_dim must be between 1 and 3")
        cols = tuple(self.P_columns)
        if len(cols) != self.Q_dim:
            raise ValueError("need one P column per coordinate of Q")
        for g in cols:
            if g is not None and g.space != self.alpha.space:
                raise SpaceMismatchError("P columns must lie in the core space")
        object.__setattr__(self, "P_columns", cols)
        if self.quad_step is not None and not self.quad_step > 0:
            raise ValueError("quad_step must be positive")
        rng = np.random.default_rng(0)
        b = rng.standard_normal(self.Q_dim)
        for t, q in ((0.3, 0.9), (1.0, 2.5)):
            lhs = np.asarray(self.Q_apply(np.asarray(self.Q_apply(b, t)), q), dtype=float)
            rhs = np.asarray(self.Q_apply(b, t + q), dtype=float)
            if np.max(np.abs(lhs - rhs)) > 1e-12 * max(1.0, np.max(np.abs(rhs))):
                raise ValueError("Q_apply violates the semigroup law")


def identity_Q(coords, t):
    return np.asarray(coords, dtype=float).copy()


def duhamel_extension(spec: TriangularSpec, name: str = "duhamel") -> SemigroupScenario:
    """Semigroup on core x R^n generated by the triangular block generator.

    ``phi_t(x, b) = (alpha_t x + int_0^t alpha_s P Q_{t-s} b ds, Q_t b)``;
    the integral is composite Simpson, checked against the same rule on
    every other node (Richardson). The off-grid evaluator re-runs the
    quadrature at the requested points.

    Raises (from ``apply``):
        QuadratureFailure: the Richardson estimate exceeds ``spec.quad_tol``.
    """
    alpha = spec.alpha
    core = alpha.space
    space = AmbientSpace.product(core, spec.Q_dim)
    cols = [(i, g) for i, g in enumerate(spec.P_columns) if g is not None]

    def coupling(b, t):
        step = spec.quad_step or default_quad_step(t)
        nodes, w = composite_simpson_weights(t, step)
        coef = np.array([np.asarray(spec.Q_apply(b, t - s), dtype=float) for s in nodes])
        return nodes, w, coef

    def integrate(nodes, weights, coef, where=None):
        acc = None
        lim = 0.0
        for s, wj, cj in zip(nodes, weights, coef):
            for i, g in cols:
                c = wj * cj[i]
                if c == 0.0:
                    continue
                moved = alpha.apply(g, s)
                vals = moved.values if where is None else moved(where)
                acc = c * vals if acc is None else acc + c * vals
                if moved.limit_at_inf is not None:
                    lim += c * moved.limit_at_inf
        if acc is None:
            n = core.size if where is None else np.shape(where)
            acc = np.zeros(n)
        return acc, lim

    def evolve(v, t):
        base = alpha.apply(v.core(), t)
        b = v.fin_part
        fin = np.asarray(spec.Q_apply(b, t), dtype=float)
        if not np.any(b) or not cols:
            return Vector.pair(space, base, fin)
        nodes, w, coef = coupling(b, t)
        fine, lim = integrate(nodes, w, coef)
        # Simpson on every other node, spacing 2h (panel count is a multiple of 4)
        w2 = np.full(nodes[::2].size, 2.0)
        w2[1::2] = 4.0
        w2[0] = w2[-1] = 1.0
        w2 *= 2.0 * (nodes[1] - nodes[0]) / 3.0
        coarse, _ = integrate(nodes[::2], w2, coef[::2])
        est = float(np.max(np.abs(fine - coarse))) / 15.0
        if est > spec.quad_tol:
            raise QuadratureFailure(f"{name}: Richardson estimate {est:.3e} at t={t}", estimate=est)
        ev = None
        if base.evaluator is not None:
            bev = base.evaluator
            ev = lambda x: bev(x) + integrate(nodes, w, coef, where=np.asarray(x, dtype=float))[0]  # noqa: E731
        return Vector(
            space,
            samples=base.values + fine,
            evaluator=ev,
            limit_at_inf=None if base.limit_at_inf is None else base.limit_at_inf + lim,
            fin_part=fin,
            check=False,
        )

    return SemigroupScenario(
        name=name,
        space=space,
        evolve=evolve,
        growth_class="linear",
        x0_description=f"{alpha.x0_description} x {{0}}",
        x0_distance=_fin_norm,
        law_tol=1e-5,
    )


def example4_duhamel(domain_max: float = HALF_LINE_MAX, step: float = HALF_LINE_STEP, quad_step=None, quad_tol=1e-7):
    """Example 4 rebuilt from its generator data (translation, Jordan Q, P(y, z) = y g)."""
    core = half_line_space(domain_max, step)
    alpha = translation_semigroup(core, name="translation-c0")
    g = Vector(core, evaluator=ex4_g)
    spec = TriangularSpec(alpha=alpha, Q_dim=2, Q_apply=jordan_block_Q, P_columns=(g, None), quad_step=quad_step, quad_tol=quad_tol)
    return duhamel_extension(spec, name="ex4-duhamel")


def example5_duhamel(domain_max: float = HALF_LINE_MAX, step: float = HALF_LINE_STEP, quad_step=None, quad_tol=1e-7):
    """Example 5 rebuilt from its generator data (translation, Q = id, P(y) = y/(x+1))."""
    core = half_line_space(domain_max, step)
    alpha = translation_semigroup(core, name="translation-c0")
    g = Vector(core, evaluator=ex5_g)
    spec = TriangularSpec(alpha=alpha, Q_dim=1, Q_apply=identity_Q, P_columns=(g,), quad_step=quad_step, quad_tol=quad_tol)
    sem = duhamel_extension(spec, name="ex5-duhamel")
    return SemigroupScenario(
        name=sem.name,
        space=sem.space,
        evolve=sem.evolve,
        growth_class="slow",
        x0_description=sem.x0_description,
        x0_distance=sem.x0_distance,
        law_tol=sem.law_tol,
    )
