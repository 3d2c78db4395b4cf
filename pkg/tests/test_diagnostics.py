import math

import numpy as np
import pytest

from conftest import smooth_core, zero_core
from semilab import diagnostics as dg
from semilab import semigroup as sg
from semilab.errors import DegenerateBasisError, UnsupportedDimensionError, UnsupportedScenarioError
from semilab.space import AmbientSpace, Subspace, Vector, angle, norm

W_INV_E = 0.27846454276107380  # Lambert W(1/e)


# orbit decay ------------------------------------------------------------------------------------


def test_decay_compact_translation():
    sem = sg.translation_semigroup(AmbientSpace.grid(0.0, 50.0, 0.05))
    f = Vector(sem.space, evaluator=lambda x: np.where(x < 10, np.sin(x) ** 2, 0.0))
    curve = dg.orbit_decay(sem, f, np.arange(0, 21.0))
    assert curve.verdict == dg.DECAYING
    assert np.all(curve.norms[curve.times > 10] == 0.0)
    assert curve.window == (10.0, 20.0)


def test_decay_shift_geometric_is_not_decaying():
    sem = sg.shift_double_discrete(64)
    geo = Vector(sem.space, samples=2.0 ** -np.arange(1, 65))
    curve = dg.orbit_decay(sem, geo, np.arange(0, 33.0))
    assert curve.verdict == dg.NON_DECAYING


def test_decay_multiplication(ex2):
    f = Vector(ex2.space, evaluator=lambda x: 1 - x)
    curve = dg.orbit_decay(ex2, f, np.linspace(0, 1000, 101))
    assert curve.verdict == dg.DECAYING
    one = sg.constant_function(ex2.space)
    assert dg.orbit_decay(ex2, one, np.linspace(0, 1000, 11)).verdict == dg.NON_DECAYING


def test_decay_inconclusive_when_still_falling(ex2):
    f = Vector(ex2.space, evaluator=lambda x: 1 - x)
    curve = dg.orbit_decay(ex2, f, np.linspace(0, 100, 11), threshold=1e-6)
    assert curve.verdict == dg.INCONCLUSIVE


def test_decay_verdicts_respect_sums(ex2):
    f = Vector(ex2.space, evaluator=lambda x: 1 - x)
    g = Vector(ex2.space, evaluator=lambda x: np.sin(np.pi * x))
    ts = np.linspace(0, 4000, 41)
    vs = [dg.orbit_decay(ex2, u, ts).verdict for u in (f, g, f + g)]
    assert vs == [dg.DECAYING] * 3


def test_decay_rejects_bad_grid(ex2):
    with pytest.raises(ValueError):
        dg.orbit_decay(ex2, sg.constant_function(ex2.space), [1.0, 0.5])


# m-functional ------------------------------------------------------------------------------


def test_m_functional_remark2(jordan):
    sp = jordan.space
    assert dg.m_functional(jordan, Vector(sp, samples=[1.0, 0.0]), 1000) == pytest.approx(1.0, abs=1e-12)
    assert dg.m_functional(jordan, Vector(sp, samples=[1.0, -0.1]), 100) == pytest.approx(0.1, abs=1e-6)
    assert dg.m_functional(jordan, sp.zero(), 10) == 0.0


def test_m_functional_refines_off_grid(jordan):
    # minimum at t = 1/eps = 7.3 is between grid points
    v = Vector(jordan.space, samples=[1.0, -1 / 7.3])
    assert dg.m_functional(jordan, v, 100, n_grid=11) == pytest.approx(1 / 7.3, abs=1e-9)


def test_m_functional_needs_x0_distance():
    sem = sg.shift_double_discrete(16)
    with pytest.raises(UnsupportedScenarioError):
        dg.m_functional(sem, sem.space.zero(), 4)


@pytest.mark.parametrize("seed", range(4))
def test_m_functional_lipschitz(jordan, ex2, seed):
    rng = np.random.default_rng(seed)
    T = 20.0
    u = Vector(jordan.space, samples=rng.uniform(-1, 1, 2))
    v = Vector(jordan.space, samples=rng.uniform(-1, 1, 2))
    ts = np.linspace(0, T, 201)
    C = dg.growth_profile(jordan, [u - v], ts)[:, 1].max()
    assert abs(dg.m_functional(jordan, u, T) - dg.m_functional(jordan, v, T)) <= C * norm(u - v) + 1e-6
    a = Vector(ex2.space, evaluator=lambda x, c=rng.uniform(-1, 1): c + x * x)
    b = Vector(ex2.space, evaluator=lambda x, c=rng.uniform(-1, 1): c * np.cos(x))
    C2 = dg.growth_profile(ex2, [a, b, a - b], np.linspace(0, 50, 11))[:, 1].max()
    assert abs(dg.m_functional(ex2, a, 50) - dg.m_functional(ex2, b, 50)) <= C2 * norm(a - b) + 1e-9


# angle trajectories ---------------------------------------------------------------------------


def test_trajectory_of_invariant_constants(ex3):
    traj = dg.angle_trajectory(ex3, ex3.known_invariant, [1.0, 10.0, 50.0], [0.25, 0.5, 1.0])
    assert traj.sup_profile.max() <= 1e-6
    np.testing.assert_array_equal(traj.sup_profile, traj.angles.max(axis=1))


def test_trajectory_example3_stabilises(ex3):
    Y = Subspace.span(sg.example3_vector(ex3.space))
    Ts = np.arange(10.0, 101.0, 10.0)
    traj = dg.angle_trajectory(ex3, Y, Ts, np.linspace(0.0, 1.0, 11))
    prof = traj.sup_profile
    assert np.all(np.diff(prof[1:]) <= 1e-9)
    assert prof[-1] <= 0.05


def test_trajectory_example4_never_settles(ex4):
    # M=180 directions are a subset of the default 720, so these angles are lower bounds
    Y = sg.example4_coordinate_plane(ex4.space)
    Ts = np.arange(20.0, 60.0 + 1e-9, 0.5)
    traj = dg.angle_trajectory(ex4, Y, Ts, [1.0], M=180)
    step = traj.angles[:, 0]
    width = 2 * math.pi
    for a in Ts[Ts + width <= 60.0 + 1e-9]:
        sel = (Ts >= a) & (Ts <= a + width)
        assert step[sel].max() >= 0.1
    assert traj.sup_profile.min() >= 0.1


def test_trajectory_degenerate_basis_reports_time():
    sem = sg.shift_double_discrete(16)
    Y = Subspace.span(Vector(sem.space, samples=np.eye(16)[2]))
    with pytest.raises(DegenerateBasisError) as info:
        dg.angle_trajectory(sem, Y, [1.0, 2.0, 3.0], [1.0])
    assert info.value.time == 3.0


def test_sphere_resolution_doubling(ex4, ex5):
    Y = sg.example4_coordinate_plane(ex4.space)
    A, B = dg.evolved_subspace(ex4, Y, 20.0), dg.evolved_subspace(ex4, Y, 21.0)
    assert abs(angle(A, B, 1440) - angle(A, B, 720)) < 1e-3
    Yi = ex4.known_invariant
    assert abs(angle(Yi, dg.evolved_subspace(ex4, Yi, 1.0), 1440) - angle(Yi, dg.evolved_subspace(ex4, Yi, 1.0), 720)) < 1e-3


# Cauchy series ------------------------------------------------------------------------------


def test_series_invariant_is_flat(ex3):
    led = dg.cauchy_series(ex3, ex3.known_invariant, 20)
    assert led.terms.max() <= 1e-6
    np.testing.assert_allclose(led.partial_sums, np.cumsum(led.terms))


def test_series_example2_increments(ex2):
    led = dg.cauchy_series(ex2, Subspace.span(sg.constant_function(ex2.space)), 50, measure=dg.INCREMENT_MEASURE)
    ks = np.arange(1, 51)
    np.testing.assert_allclose(led.terms, (1 / (ks + 1)) * (ks / (ks + 1)) ** ks, atol=1e-4)
    assert led.terms[3] == pytest.approx(0.08192, abs=1e-4)


@pytest.fixture(scope="module")
def ex2_angle_series():
    sem = sg.multiplication_semigroup()
    return dg.cauchy_series(sem, Subspace.span(sg.constant_function(sem.space)), 2000)


def test_series_example2_angle_measure(ex2_angle_series):
    led = ex2_angle_series
    assert np.all(led.terms >= 0)
    # angle terms behave like W(1/e)/k, so dyadic blocks approach W(1/e) ln 2
    for K in (250, 500, 1000):
        assert led.block_sum(K, 2 * K) == pytest.approx(W_INV_E * math.log(2), rel=0.02)


def test_series_dyadic_divergence_example3(ex3):
    Y = Subspace.span(sg.example3_vector(ex3.space))
    led = dg.cauchy_series(ex3, Y, 2000, measure=dg.INCREMENT_MEASURE)
    for K in (250, 500, 1000):
        assert led.block_sum(K, 2 * K) >= 0.5


def test_series_example4_dyadic_blocks(ex4):
    led = dg.cauchy_series(ex4, sg.example4_coordinate_plane(ex4.space), 12, M=180)
    for K in (3, 6):
        assert led.block_sum(K, 2 * K) >= 0.5


def test_series_increment_needs_dim1(jordan):
    Y = Subspace.span(Vector(jordan.space, samples=[1.0, 0.0]), Vector(jordan.space, samples=[0.0, 1.0]))
    with pytest.raises(UnsupportedDimensionError):
        dg.cauchy_series(jordan, Y, 3, measure=dg.INCREMENT_MEASURE)
    with pytest.raises(ValueError):
        dg.cauchy_series(jordan, Y, 3, measure="volume")


# limit subspace, coefficient bound, growth -----------------------------------------------------


def test_limit_subspace_example3(ex3):
    est, gap = dg.estimate_limit_subspace(ex3, Subspace.span(sg.example3_vector(ex3.space)), 200.0)
    assert angle(est, ex3.known_invariant) <= 0.05
    assert gap <= 0.05
    _, gap_inv = dg.estimate_limit_subspace(ex3, ex3.known_invariant, 200.0)
    assert gap_inv <= 1e-6


def test_limit_subspace_example4_does_not_converge(ex4):
    _, gap = dg.estimate_limit_subspace(ex4, sg.example4_coordinate_plane(ex4.space), 40.0, M=180)
    assert gap >= 0.1


def test_coefficient_bounds(ex2, ex3, jordan):
    assert dg.coefficient_bound_probe(ex3, ex3.known_invariant, [0.0, 5.0, 50.0]) == pytest.approx(1.0)
    Y3 = Subspace.span(sg.example3_vector(ex3.space))
    assert dg.coefficient_bound_probe(ex3, Y3, np.arange(0, 201.0, 5.0)) >= 0.4
    assert dg.coefficient_bound_probe(ex2, Subspace.span(sg.constant_function(ex2.space)), np.arange(0, 51.0)) > 0
    Y2 = Subspace.span(Vector(jordan.space, samples=[1.0, 0.0]), Vector(jordan.space, samples=[0.0, 1.0]))
    assert dg.coefficient_bound_probe(jordan, Y2, [0.0, 1.0, 3.0], M=90) > 0


def test_growth_profiles(ex2, ex5, jordan):
    probes = [sg.constant_function(ex2.space), Vector(ex2.space, evaluator=lambda x: np.sin(7 * x) + 0.2)]
    assert dg.growth_profile(ex2, probes, np.linspace(0, 100, 21))[:, 1].max() <= 1 + 1e-9
    y = sg.product_vector(ex5.space, zero_core, [1.0])
    prof = dg.growth_profile(ex5, [y], [10.0, 100.0, 1000.0])
    assert np.all(prof[:, 1] >= np.log1p(prof[:, 0]))
    assert prof[-1, 1] / prof[-1, 0] < 0.01
    assert np.all(np.diff(prof[:, 1] / prof[:, 0]) < 0)
    z = Vector(jordan.space, samples=[0.0, 1.0])
    pj = dg.growth_profile(jordan, [z], [10.0, 100.0, 1000.0])
    np.testing.assert_allclose(pj[:, 1] / pj[:, 0], 1.0, rtol=1e-2)
    with pytest.raises(ValueError):
        dg.growth_profile(jordan, [jordan.space.zero()], [1.0])


def test_x0_angle_example5(ex5):
    Y = Subspace.span(sg.product_vector(ex5.space, zero_core, [1.0]))
    for t in (10.0, 100.0):
        assert dg.x0_angle(ex5, Y, t) == pytest.approx(1 / (1 + math.log1p(t)), rel=0.1)


def test_projection_gap_lower_bound(ex4):
    for t in (0.0, 3.0, 20.0, 41.5):
        assert dg.parallel_projection_gap(ex4, t) >= abs(math.cos(t) - math.cos(t + 1)) - 1e-12


# invariance ------------------------------------------------------------------------------------


def test_generator_conditions_closed_form():
    x = np.arange(0.0, 400.0 + 1e-9, 0.02)
    rep = dg.generator_conditions_check(sg.ex4_g, sg.ex4_k, sg.ex4_l, x, dk=lambda s: -sg.ex4_g(s), dl=sg.ex4_k)
    assert rep.passed and rep.kind == "generator"
    zero = lambda s: np.zeros_like(s)  # noqa: E731
    rep0 = dg.generator_conditions_check(zero, zero, zero, x, dk=zero, dl=zero)
    assert rep0.worst == 0.0 and rep0.passed
    bad = dg.generator_conditions_check(np.sin, sg.ex4_k, sg.ex4_l, x, dk=lambda s: -sg.ex4_g(s), dl=sg.ex4_k)
    assert not bad.passed
    assert bad.residuals["k_prime_plus_g"] > 0.5
    with pytest.raises(ValueError):
        dg.generator_conditions_check(sg.ex4_g, sg.ex4_k, sg.ex4_l, x)


def test_generator_conditions_finite_difference_rate():
    x = np.arange(0.0, 400.0 + 1e-9, 0.02)
    r3 = dg.generator_conditions_check(sg.ex4_g, sg.ex4_k, sg.ex4_l, x, mode=dg.FINITE_DIFF, h=1e-3)
    r4 = dg.generator_conditions_check(sg.ex4_g, sg.ex4_k, sg.ex4_l, x, mode=dg.FINITE_DIFF, h=1e-4)
    assert r4.passed
    for key in r4.residuals:
        assert r3.residuals[key] / r4.residuals[key] >= 5.0
    bad = dg.generator_conditions_check(np.sin, sg.ex4_k, sg.ex4_l, x, mode=dg.FINITE_DIFF)
    assert not bad.passed


def test_invariance_residuals(ex3, ex4):
    rep = dg.invariance_residual(ex4, ex4.known_invariant, [0.5, 1.0, 2.0, 5.0, 10.0])
    assert rep.passed and rep.worst <= 1e-3
    const = dg.invariance_residual(ex3, ex3.known_invariant, [0.5, 3.0])
    assert const.worst <= 1e-8
    moved = dg.invariance_residual(ex4, sg.example4_coordinate_plane(ex4.space), [1.0], M=180)
    assert not moved.passed and moved.worst >= 0.1


def test_report_pass_logic():
    rep = dg.InvarianceReport("trajectory", {"a": 0.1, "b": 2.0}, {"a": 1.0, "b": 1.0})
    assert not rep.passed
    assert rep.to_dict()["residuals"] == {"a": 0.1, "b": 2.0}
