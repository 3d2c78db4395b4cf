"""Command line runner: ``semilab run <scenario>`` and ``semilab list``.

Every scenario runs a fixed bundle of diagnostics and writes

* ``decay.csv``      t, norm
* ``angles.csv``     T, s, angle, sup_profile
* ``series.csv``     k, term, partial_sum
* ``growth.csv``     t, ratio
* ``invariance.json`` residual map plus the pass/fail checks of the bundle

(``.json`` tables instead of ``.csv`` with ``--format json``).

Exit codes: 0 all checks passed, 1 a check failed, 2 unknown scenario or bad
arguments, 3 numerical failure inside a diagnostic, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from . import diagnostics as dg
from . import semigroup as sg
from .errors import DegenerateBasisError, NumericalFailure
from .space import AmbientSpace, Subspace, Vector, angle, norm

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

NUMERIC_KEYS = (
    "t_max",
    "t_step",
    "s_max",
    "s_step",
    "grid_step",
    "domain_max",
    "k_max",
    "decay_threshold",
    "angle_threshold",
    "sphere_samples",
)
INT_KEYS = ("k_max", "sphere_samples")


# configuration ------------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    t_max: float = 10.0
    t_step: float = 1.0
    s_max: float = 1.0
    s_step: float = 0.25
    grid_step: float = 0.02
    domain_max: float = 400.0
    k_max: int = 100
    decay_threshold: float = 1e-3
    angle_threshold: float = 0.05
    sphere_samples: int = 720
    out_dir: Path = Path("semilab-out")
    format: str = "csv"
    plot: bool = False

    def __post_init__(self):
        for key in ("t_step", "s_step", "grid_step"):
            if not getattr(self, key) > 0:
                raise ValueError(f"{key} must be positive")
        if self.t_max < self.t_step:
            raise ValueError("t_max must be at least t_step")
        if self.s_max < 0 or self.domain_max <= 0:
            raise ValueError("s_max must be >= 0 and domain_max > 0")
        if self.k_max < 1 or self.sphere_samples < 1:
            raise ValueError("k_max and sphere_samples must be positive")
        if self.format not in ("csv", "json"):
            raise ValueError("format is csv or json")


def read_config_file(path) -> Dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _coerce(key: str, value):
    if key in INT_KEYS:
        return int(float(value))
    if key in NUMERIC_KEYS:
        return float(value)
    if key == "plot":
        return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes", "on")
    if key == "out_dir":
        return Path(value)
    return value


def build_config(scenario: str, file_values: Dict[str, str], flag_values: Dict[str, object]) -> RunConfig:
    """Scenario defaults, then the config file, then command-line flags."""
    merged = dict(REGISTRY[scenario].defaults)
    env_out = os.environ.get("SEMILAB_OUT")
    if env_out:
        merged["out_dir"] = env_out
    for source in (file_values, flag_values):
        for key, value in source.items():
            if value is None:
                continue
            if key not in RunConfig.__dataclass_fields__ or key == "scenario":
                raise ValueError(f"unknown configuration key {key!r}")
            merged[key] = value
    return RunConfig(scenario=scenario, **{k: _coerce(k, v) for k, v in merged.items()})


def uniform_grid(start: float, stop: float, step: float) -> np.ndarray:
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(max(n, 1))


# bundle results -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    bound: float
    relation: str  # "<=" or ">="

    @property
    def passed(self) -> bool:
        if self.relation == "<=":
            return bool(self.value <= self.bound)
        return bool(self.value >= self.bound)

    def to_dict(self):
        return {"name": self.name, "value": self.value, "relation": self.relation, "bound": self.bound, "passed": self.passed}


@dataclass
class Bundle:
    decay: Optional[dg.DecayCurve] = None
    angles: Optional[dg.AngleTrajectory] = None
    series: Optional[dg.SeriesLedger] = None
    growth: Optional[np.ndarray] = None
    residuals: Dict[str, float] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)

    def check(self, name, value, relation, bound):
        self.checks.append(Check(name, float(value), float(bound), relation))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


class DiagnosticFailure(Exception):
    def __init__(self, diagnostic: str, cause: Exception):
        super().__init__(f"diagnostic '{diagnostic}' failed: {cause}")
        self.diagnostic = diagnostic
        self.cause = cause


def stage(name: str, fn: Callable, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (NumericalFailure, DegenerateBasisError) as exc:
        raise DiagnosticFailure(name, exc) from exc


def _standard_bundle(sem, cfg, probe, Y, growth_probes, T_start=None, measure=dg.ANGLE_MEASURE, k_max=None):
    """decay of ``probe``, angle trajectory and series of ``Y``, growth of ``growth_probes``."""
    b = Bundle()
    step = cfg.t_step
    ts = uniform_grid(0.0, cfg.t_max, step)
    b.decay = stage("orbit_decay", dg.orbit_decay, sem, probe, ts, cfg.decay_threshold)
    Ts = uniform_grid(step if T_start is None else T_start, cfg.t_max, step)
    ss = uniform_grid(cfg.s_step, cfg.s_max, cfg.s_step) if cfg.s_max >= cfg.s_step else np.array([cfg.s_step])
    b.angles = stage("angle_trajectory", dg.angle_trajectory, sem, Y, Ts, ss, M=cfg.sphere_samples)
    b.series = stage("cauchy_series", dg.cauchy_series, sem, Y, k_max or cfg.k_max, measure=measure, M=cfg.sphere_samples)
    b.growth = stage("growth_profile", dg.growth_profile, sem, growth_probes, ts)
    return b


def _zero(x):
    return np.zeros(np.shape(x))


def _law_residual(sem, v, pairs=((0.7, 2.5), (1.0, 0.1))):
    return max(sg.semigroup_law_residual(sem, v, t, q) / (1.0 + norm(v)) for t, q in pairs)


# scenario bundles ---------------------------------------------------------------------------


def bundle_ex1(cfg: RunConfig) -> Bundle:
    L = int(cfg.domain_max)
    sem = sg.shift_double_discrete(L)
    space = sem.space
    horizon = min(int(cfg.t_max), L // 2)
    geo = Vector(space, samples=2.0 ** -np.arange(1, L + 1))
    cfg_d = replace(cfg, t_max=float(horizon), t_step=1.0, s_step=1.0, s_max=max(1.0, math.floor(cfg.s_max)))
    units = [Vector(space, samples=np.eye(L)[j]) for j in range(L)]
    b = _standard_bundle(
        sem, cfg_d, geo, Subspace.span(geo), units, measure=dg.INCREMENT_MEASURE, k_max=min(cfg.k_max, horizon)
    )
    annihilated = max(norm(sem.apply(units[k - 1], k)) for k in range(1, L + 1))
    spread = float(np.ptp(b.decay.norms))
    b.residuals.update({"unit_vector_after_k_steps": annihilated, "geometric_orbit_norm_spread": spread})
    b.check("e_k maps to zero after k steps", annihilated, "<=", 0.0)
    b.check("geometric orbit norm constant", spread, "<=", 1e-12)
    b.check("geometric orbit not decaying", float(b.decay.verdict == dg.NON_DECAYING), ">=", 1.0)
    return b


def bundle_ex2(cfg: RunConfig) -> Bundle:
    sem = sg.multiplication_semigroup(cfg.grid_step)
    space = sem.space
    one = sg.constant_function(space)
    probe = Vector(space, evaluator=lambda x: 1.0 - x)
    Y = Subspace.span(one)
    b = _standard_bundle(
        sem, cfg, probe, Y, [one, probe, Vector(space, evaluator=lambda x: x * (1 - x))], measure=dg.INCREMENT_MEASURE
    )
    ks = np.arange(1, min(200, cfg.k_max) + 1)
    exact = (1.0 / (ks + 1.0)) * (ks / (ks + 1.0)) ** ks
    b.residuals["series_term_vs_closed_form"] = float(np.max(np.abs(b.series.terms[: ks.size] - exact)))
    b.residuals["m(1)"] = dg.m_functional(sem, one, cfg.t_max)
    b.residuals["m(1-x)"] = dg.m_functional(sem, probe, cfg.t_max)
    b.residuals["law"] = _law_residual(sem, probe)
    b.check("f=1-x decays", float(b.decay.verdict == dg.DECAYING), ">=", 1.0)
    b.check("series terms match closed form", b.residuals["series_term_vs_closed_form"], "<=", 1e-4)
    if cfg.k_max >= 2:
        K = cfg.k_max // 2
        b.check("dyadic block sum", b.series.block_sum(K, 2 * K), ">=", 0.2)
    b.check("final sup_profile", b.angles.sup_profile[-1], "<=", cfg.angle_threshold)
    b.check("bounded growth", float(b.growth[:, 1].max()), "<=", 1.0 + 1e-9)
    b.check("m(1) equals |f(1)|", abs(b.residuals["m(1)"] - 1.0), "<=", 1e-9)
    b.check("law residual", b.residuals["law"], "<=", sem.law_tol)
    return b


def bundle_ex3(cfg: RunConfig) -> Bundle:
    sem = sg.translation_limit_semigroup(cfg.domain_max, cfg.grid_step)
    space = sem.space
    f = sg.example3_vector(space)
    wave = Vector(space, evaluator=lambda x: f(x) - 1.0, limit_at_inf=0.0)
    Y = Subspace.span(f)
    b = _standard_bundle(sem, cfg, wave, Y, [f, sg.constant_function(space)], measure=dg.INCREMENT_MEASURE)
    consts = sem.known_invariant
    lo, hi = 50, min(200, cfg.k_max)
    if hi >= lo:
        scaled = np.arange(lo, hi + 1) * b.series.terms[lo - 1 : hi]
        b.residuals["k*term min"] = float(scaled.min())
        b.residuals["k*term max"] = float(scaled.max())
        b.check("k*|f_k+1 - f_k| >= 1.8", scaled.min(), ">=", 1.8)
        b.check("k*|f_k+1 - f_k| <= 2.2", scaled.max(), "<=", 2.2)
    if cfg.k_max >= 2:
        K = cfg.k_max // 2
        b.check("dyadic block sum", b.series.block_sum(K, 2 * K), ">=", 0.5)
    est, gap = stage("estimate_limit_subspace", dg.estimate_limit_subspace, sem, Y, cfg.t_max, M=cfg.sphere_samples)
    b.residuals["limit_estimate_gap"] = gap
    b.residuals["limit_estimate_vs_constants"] = angle(est, consts)
    inv = stage("invariance_residual", dg.invariance_residual, sem, consts, [0.5, 1.0, 5.0, 10.0])
    b.residuals["constants_invariance"] = inv.worst
    b.residuals["coefficient_bound"] = dg.coefficient_bound_probe(sem, Y, uniform_grid(0.0, cfg.t_max, cfg.t_step))
    b.residuals["law"] = _law_residual(sem, f)
    b.check("final sup_profile", b.angles.sup_profile[-1], "<=", cfg.angle_threshold)
    b.check("limit estimate near constants", b.residuals["limit_estimate_vs_constants"], "<=", cfg.angle_threshold)
    b.check("constants invariant", inv.worst, "<=", 1e-8)
    b.check("coefficient bound", b.residuals["coefficient_bound"], ">=", 0.4)
    b.check("law residual", b.residuals["law"], "<=", sem.law_tol)
    return b


def _windows_ok(Ts, values, width, bound):
    """Every window [a, a + width] inside the T range contains a value >= bound."""
    Ts = np.asarray(Ts)
    starts = [a for a in Ts if a + width <= Ts[-1] + 1e-9] or [Ts[0]]
    worst = math.inf
    for a in starts:
        sel = (Ts >= a - 1e-9) & (Ts <= a + width + 1e-9)
        worst = min(worst, float(np.max(values[sel])))
    return worst


def bundle_ex4(cfg: RunConfig) -> Bundle:
    sem = sg.example4_semigroup(cfg.domain_max, cfg.grid_step)
    space = sem.space
    Y = sg.example4_coordinate_plane(space)
    z = sg.product_vector(space, _zero, [0.0, 1.0])
    T0 = 20.0 if cfg.t_max > 20.0 else cfg.t_step
    cfg_a = replace(cfg, s_step=1.0, s_max=1.0)
    b = _standard_bundle(sem, cfg_a, z, Y, [z, sg.product_vector(space, _zero, [1.0, 0.0])], T_start=T0)
    step_angles = b.angles.angles[:, -1]
    b.check(
        "angle(Y_t, Y_t+1) >= 0.1 in every 2*pi window",
        _windows_ok(b.angles.T_grid, step_angles, 2 * math.pi, 0.1),
        ">=",
        0.1,
    )
    b.check("sup_profile never below 0.1", float(b.angles.sup_profile.min()), ">=", 0.1)
    margins = [
        dg.parallel_projection_gap(sem, t) - abs(math.cos(t) - math.cos(t + 1.0)) for t in b.angles.T_grid
    ]
    b.residuals["projection_gap_margin_min"] = float(min(margins))
    b.check("|R(v(t))| >= |cos t - cos(t+1)| - 1e-3", min(margins), ">=", -1e-3)
    x = space.core.points
    gen = dg.generator_conditions_check(sg.ex4_g, sg.ex4_k, sg.ex4_l, x, dk=lambda s: -sg.ex4_g(s), dl=sg.ex4_k)
    b.residuals.update({f"generator {k}": v for k, v in gen.residuals.items()})
    b.check("generator conditions", gen.worst, "<=", dg.GENERATOR_TOL[dg.CLOSED_FORM])
    inv = stage("invariance_residual", dg.invariance_residual, sem, sem.known_invariant, [0.5, 1, 2, 5, 10], M=cfg.sphere_samples)
    b.residuals.update({f"Y_inf {k}": v for k, v in inv.residuals.items()})
    b.check("Y_inf invariant", inv.worst, "<=", dg.INVARIANCE_TOL)
    moved = stage("invariance_residual", dg.invariance_residual, sem, Y, [1.0], M=cfg.sphere_samples)
    b.residuals["coordinate plane moved"] = moved.worst
    b.check("0 x R^2 not invariant", moved.worst, ">=", 0.1)
    v = sg.product_vector(space, lambda s: np.exp(-s) * np.cos(3 * s), [0.7, -1.3])
    b.residuals["law"] = _law_residual(sem, v)
    b.check("law residual", b.residuals["law"], "<=", sem.law_tol)
    b.check("linear growth", float(b.growth[-1, 1] / max(b.growth[-1, 0], 1.0)), ">=", 0.5)
    return b


def _bump(x):
    x = np.asarray(x, dtype=float)
    return np.where((x > 0) & (x < 10), x * (10 - x) / 25.0, 0.0)


def bundle_ex5(cfg: RunConfig) -> Bundle:
    sem = sg.example5_semigroup(cfg.domain_max, cfg.grid_step)
    space = sem.space
    y = sg.product_vector(space, _zero, [1.0])
    Y = Subspace.span(y)
    b = _standard_bundle(sem, cfg, sg.product_vector(space, _bump, [0.0]), Y, [y])
    ts = uniform_grid(0.0, cfg.t_max, cfg.t_step)
    core0 = max(abs(float(sem.apply(y, t)(np.array([0.0]))[0]) - math.log1p(t)) for t in ts)
    b.residuals["core(0) - ln(1+t)"] = core0
    b.check("core at x=0 equals ln(1+t)", core0, "<=", 1e-10)
    for t in (10.0, 100.0):
        if t <= cfg.t_max:
            got = dg.x0_angle(sem, Y, t)
            rel = abs(got / (1.0 / (1.0 + math.log1p(t))) - 1.0)
            b.residuals[f"x0 angle rel err t={t:g}"] = rel
            b.check(f"x0 angle t={t:g}", rel, "<=", 0.1)
    ratio = float(b.growth[-1, 1] / b.growth[-1, 0]) if b.growth[-1, 0] > 0 else math.inf
    b.residuals["growth(t_max)/t_max"] = ratio
    # sublinear growth: growth/t at the horizon is well below its value at a quarter of it
    t_end = b.growth[-1, 0]
    i = int(np.argmin(np.abs(b.growth[:, 0] - t_end / 4)))
    early = float(b.growth[i, 1] / b.growth[i, 0]) if b.growth[i, 0] > 0 else math.inf
    b.check("growth/t shrinks from t_max/4 to t_max", ratio / early, "<=", 0.5)
    b.check("compact bump decays", float(b.decay.verdict == dg.DECAYING), ">=", 1.0)
    b.check("final sup_profile", b.angles.sup_profile[-1], "<=", cfg.angle_threshold)
    b.residuals["law"] = _law_residual(sem, sg.product_vector(space, _bump, [0.9]))
    b.check("law residual", b.residuals["law"], "<=", sem.law_tol)
    return b


def bundle_remark2(cfg: RunConfig) -> Bundle:
    sem = sg.jordan_semigroup()
    space = sem.space
    e1 = Vector(space, samples=[1.0, 0.0])
    e2 = Vector(space, samples=[0.0, 1.0])
    b = _standard_bundle(sem, cfg, e1, Subspace.span(e2), [e2])
    for eps in (0.0, 0.1, 0.01):
        m = dg.m_functional(sem, Vector(space, samples=[1.0, -eps]), cfg.t_max)
        key = "m(1,0)" if eps == 0.0 else f"m(1,-{eps:g})"
        b.residuals[key] = m
        if eps == 0.0 or 1.0 / eps <= cfg.t_max:
            b.check(key, abs(m - (eps if eps else 1.0)), "<=", 1e-6)
    inv = dg.invariance_residual(sem, sem.known_invariant, [1.0, 10.0])
    b.residuals["span(1,0) invariance"] = inv.worst
    b.check("span(1,0) invariant", inv.worst, "<=", 1e-8)
    b.check("linear growth", float(b.growth[-1, 1]), ">=", float(b.growth[-1, 0]))
    b.check("final sup_profile", b.angles.sup_profile[-1], "<=", cfg.angle_threshold)
    return b


ORDER_STEPS = (0.0625, 0.03125)


def bundle_duhamel(cfg: RunConfig) -> Bundle:
    closed4 = sg.example4_semigroup(cfg.domain_max, cfg.grid_step)
    closed5 = sg.example5_semigroup(cfg.domain_max, cfg.grid_step)
    rep4 = sg.example4_duhamel(cfg.domain_max, cfg.grid_step)
    rep5 = sg.example5_duhamel(cfg.domain_max, cfg.grid_step)
    w = lambda x: np.exp(-x) * np.cos(3 * x)  # noqa: E731
    v4 = sg.product_vector(closed4.space, w, [0.7, -1.3])
    v5 = sg.product_vector(closed5.space, w, [0.9])
    y5 = sg.product_vector(closed5.space, _zero, [1.0])
    b = _standard_bundle(rep5, cfg, y5, Subspace.span(y5), [y5])
    ts = uniform_grid(cfg.t_step, cfg.t_max, cfg.t_step)
    for t in ts:
        d4 = stage("duhamel_extension", lambda: norm(closed4.apply(v4, t) - rep4.apply(v4, t)))
        d5 = stage("duhamel_extension", lambda: norm(closed5.apply(v5, t) - rep5.apply(v5, t)))
        b.residuals[f"ex4 replica t={t:g}"] = d4
        b.residuals[f"ex5 replica t={t:g}"] = d5
        b.check(f"ex4 replica t={t:g}", d4, "<=", 1e-5)
        b.check(f"ex5 replica t={t:g}", d5, "<=", 1e-5)
    t = 1.0
    errs = []
    for qs in ORDER_STEPS:
        rep = sg.example4_duhamel(cfg.domain_max, cfg.grid_step, quad_step=qs, quad_tol=1.0)
        errs.append(norm(closed4.apply(v4, t) - rep.apply(v4, t)))
    b.residuals["halving ratio"] = errs[0] / errs[1]
    b.check("halving quad_step reduces error", errs[0] / errs[1], ">=", 4.0)
    b.residuals["law ex5 replica"] = stage("semigroup_law", _law_residual, rep5, v5, ((1.0, 1.0),))
    b.check("law residual", b.residuals["law ex5 replica"], "<=", rep5.law_tol)
    return b


@dataclass(frozen=True)
class ScenarioEntry:
    name: str
    anchor: str
    run: Callable[[RunConfig], Bundle]
    defaults: Dict[str, object]


REGISTRY: Dict[str, ScenarioEntry] = {
    e.name: e
    for e in (
        ScenarioEntry(
            "ex1-shift-double",
            "Example 1: T(x1, x2, ...) = (2 x2, 2 x3, ...) on truncated l2 (domain_max = trunc_len)",
            bundle_ex1,
            dict(t_max=32, t_step=1, s_max=1, s_step=1, domain_max=64, k_max=32),
        ),
        ScenarioEntry(
            "ex2-multiplication",
            "Example 2: (phi_t f)(x) = x^t f(x) on C[0,1]",
            bundle_ex2,
            dict(t_max=1000, t_step=10, grid_step=1e-4, domain_max=1.0, k_max=1000),
        ),
        ScenarioEntry(
            "ex3-translation-limit",
            "Example 3: translations of functions with a limit, f = 1 + sin(pi x)/x",
            bundle_ex3,
            dict(t_max=200, t_step=5, k_max=200, decay_threshold=0.02),
        ),
        ScenarioEntry(
            "ex4-nonstabilizable",
            "Example 4: translations on C0(R+) x R^2 coupled by g = sin x / x through a Jordan block",
            bundle_ex4,
            dict(t_max=60, t_step=0.5, k_max=10),
        ),
        ScenarioEntry(
            "ex5-log-growth",
            "Example 5: slowly increasing semigroup with g = 1/(x+1)",
            bundle_ex5,
            dict(t_max=1000, t_step=10, k_max=200),
        ),
        ScenarioEntry(
            "remark2-jordan",
            "Remark 2: Jordan flow (y + t z, z) on R^2, m(1,0) = 1 and m(1,-eps) = eps",
            bundle_remark2,
            dict(t_max=1000, t_step=10, k_max=100),
        ),
        ScenarioEntry(
            "duhamel-vs-closed-form",
            "Examples 4 and 5 rebuilt from generator data by the Duhamel integral",
            bundle_duhamel,
            dict(t_max=5, t_step=1.25, s_step=0.5, k_max=4),
        ),
    )
}


# output ---------------------------------------------------------------------------------------


def _fmt(x) -> str:
    return format(float(x), ".17g")


def bundle_tables(b: Bundle):
    tables = {}
    if b.decay is not None:
        tables["decay"] = (("t", "norm"), list(zip(b.decay.times, b.decay.norms)))
    if b.angles is not None:
        tables["angles"] = (("T", "s", "angle", "sup_profile"), list(b.angles.rows()))
    if b.series is not None:
        tables["series"] = (("k", "term", "partial_sum"), list(zip(b.series.ks, b.series.terms, b.series.partial_sums)))
    if b.growth is not None:
        tables["growth"] = (("t", "ratio"), [tuple(r) for r in b.growth])
    return tables


def write_outputs(cfg: RunConfig, b: Bundle) -> List[Path]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for stem, (header, rows) in bundle_tables(b).items():
        path = out / f"{stem}.{cfg.format}"
        if cfg.format == "csv":
            with path.open("w", newline="") as fh:
                wr = csv.writer(fh, lineterminator="\n")
                wr.writerow(header)
                for r in rows:
                    wr.writerow([str(int(v)) if h == "k" else _fmt(v) for h, v in zip(header, r)])
        else:
            recs = [{h: (int(v) if h == "k" else float(v)) for h, v in zip(header, r)} for r in rows]
            path.write_text(json.dumps(recs, indent=1) + "\n")
        written.append(path)
    report = {
        "scenario": cfg.scenario,
        "passed": b.passed,
        "decay_verdict": None if b.decay is None else b.decay.verdict,
        "residuals": {k: float(v) for k, v in b.residuals.items()},
        "checks": [c.to_dict() for c in b.checks],
    }
    path = out / "invariance.json"
    path.write_text(json.dumps(report, indent=1) + "\n")
    written.append(path)
    if cfg.plot:
        from .plotting import render_all

        written.extend(render_all(out, cfg.format))
    return written


def run(cfg: RunConfig, stream=sys.stdout) -> int:
    entry = REGISTRY[cfg.scenario]
    try:
        bundle = entry.run(cfg)
    except DiagnosticFailure as exc:
        print(f"semilab: {cfg.scenario}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NumericalFailure, DegenerateBasisError) as exc:
        print(f"semilab: {cfg.scenario}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        paths = write_outputs(cfg, bundle)
    except OSError as exc:
        print(f"semilab: cannot write results to {cfg.out_dir}: {exc}", file=sys.stderr)
        return EXIT_IO
    for c in bundle.checks:
        mark = "PASS" if c.passed else "FAIL"
        print(f"[{mark}] {c.name}: {c.value:.6g} {c.relation} {c.bound:.6g}", file=stream)
    print(f"wrote {len(paths)} files to {cfg.out_dir}", file=stream)
    return EXIT_OK if bundle.passed else EXIT_CHECK


def list_scenarios(stream=None):
    stream = sys.stdout if stream is None else stream
    for name, entry in REGISTRY.items():
        print(f"{name:24s} {entry.anchor}", file=stream)
    return list(REGISTRY)


FLAG_HELP = {
    "t_max": "horizon for decay, angle and growth tables",
    "t_step": "spacing of the time grid",
    "s_max": "largest look-ahead s in angle(Y_T, Y_T+s)",
    "s_step": "spacing of the look-ahead grid",
    "grid_step": "spatial step of the discretized space",
    "domain_max": "right end of the half-line window (sequence length for ex1)",
    "k_max": "number of terms in the series table",
    "decay_threshold": "orbit norm counted as decayed",
    "angle_threshold": "largest final sup_profile accepted as settled",
    "sphere_samples": "unit-sphere directions per deficiency (dimension 2)",
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semilab", description="Numerical experiments on operator semigroups.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list registered scenarios")
    r = sub.add_parser("run", help="run one scenario's diagnostic bundle")
    r.add_argument("scenario")
    for key in NUMERIC_KEYS:
        r.add_argument(
            "--" + key.replace("_", "-"), dest=key, type=int if key in INT_KEYS else float, default=None, help=FLAG_HELP[key]
        )
    r.add_argument("--out", dest="out_dir", default=None, help="output directory (default $SEMILAB_OUT or ./semilab-out)")
    r.add_argument("--format", choices=("csv", "json"), default=None, help="table format (default csv)")
    r.add_argument("--plot", action="store_true", default=None, help="also write SVG charts")
    r.add_argument("--config", default=None, help="key=value file; flags override it")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        list_scenarios()
        return EXIT_OK
    if args.scenario not in REGISTRY:
        print(f"semilab: unknown scenario {args.scenario!r}; known: {', '.join(REGISTRY)}", file=sys.stderr)
        return EXIT_USAGE
    flags = {k: getattr(args, k) for k in (*NUMERIC_KEYS, "out_dir", "format", "plot")}
    try:
        file_values = read_config_file(args.config) if args.config else {}
    except OSError as exc:
        print(f"semilab: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = build_config(args.scenario, file_values, flags)
    except ValueError as exc:
        print(f"semilab: bad configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
