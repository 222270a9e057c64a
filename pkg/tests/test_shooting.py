import math

import numpy as np
import pytest

from polyharmonic import _kernel, _rk_py
from polyharmonic.core import ProblemSpec
from polyharmonic.profile import OutcomeKind, RadialProfile
from polyharmonic.radial_calculus import (
    RadialPolynomial,
    bubble_family,
    constant_form,
    exp_gaussian,
    polynomial_form,
    profile_consistency,
    sample_profile,
)
from polyharmonic.shooting import (
    ShootOptions,
    compare_check,
    extend,
    growth_series,
    pizzetti_check,
    shoot_search,
    sign_cascade_check,
    solve_ivp,
    sphere_area,
    unit_ball_volume,
)

SIN = ProblemSpec(3, 1, 1, -1)

# first zeros of the Lane-Emden functions in R^3 (standard tabulated values)
LANE_EMDEN_ZEROS = {0: math.sqrt(6), 1: math.pi, 2: 4.35287460, 3: 6.89684862, 4: 14.9715463}


def test_constant_forcing_matches_quadratic():
    p, o = solve_ivp(ProblemSpec(3, 1, 0, 1), [1.0], 10, tol=1e-9)
    assert o.kind == OutcomeKind.SURVIVED and o.r_star == 10
    assert np.max(np.abs(p.u - (1 + p.r ** 2 / 6))) < 1e-8


def test_sinc_and_zero_touch():
    p, o = solve_ivp(SIN, [1.0], 10, tol=1e-9)
    assert o.kind == OutcomeKind.ZERO_TOUCH
    assert abs(o.r_star - math.pi) < 1e-6
    lo, hi = o.bracket
    assert lo <= o.r_star <= hi and hi - lo <= 1e-9
    r = p.r[1:]
    assert np.max(np.abs(p.u[1:] - np.sin(r) / r)) < 1e-8
    assert p.r_max == pytest.approx(o.r_star)


@pytest.mark.parametrize("alpha, zero", sorted(LANE_EMDEN_ZEROS.items()))
def test_lane_emden_first_zeros(alpha, zero):
    _, o = solve_ivp(ProblemSpec(3, 1, alpha, -1), [1.0], 20, tol=1e-10)
    assert o.kind == OutcomeKind.ZERO_TOUCH
    assert o.r_star == pytest.approx(zero, abs=2e-7)


def test_critical_lane_emden_closed_form():
    p, o = solve_ivp(ProblemSpec(3, 1, 5, -1), [1.0], 50, tol=1e-9)
    assert o.kind == OutcomeKind.SURVIVED
    assert np.max(np.abs(p.u - (1 + p.r ** 2 / 3) ** -0.5)) < 1e-8


def test_zero_touch_scaling():
    # u_a(r) = a u_1(a^{(alpha-1)/2} r), so the zero moves like a^{-(alpha-1)/2}
    _, o1 = solve_ivp(ProblemSpec(3, 1, 3, -1), [1.0], 50)
    _, o4 = solve_ivp(ProblemSpec(3, 1, 3, -1), [4.0], 50)
    assert o4.r_star == pytest.approx(o1.r_star / 4, rel=1e-7)


def test_integrator_order_under_tolerance_halving():
    errs, steps = [], []
    for k in range(12):
        p, _ = solve_ivp(SIN, [1.0], 3.0, tol=1e-5 / 2 ** k)
        r = p.r[1:]
        errs.append(np.max(np.abs(p.u[1:] - np.sin(r) / r)))
        steps.append(p.meta["n_accept"])
    assert all(b < a for a, b in zip(errs, errs[1:]))
    slope = np.polyfit(np.log(steps), np.log(errs), 1)[0]
    assert -slope >= 4


def test_series_start_and_origin_node():
    spec = ProblemSpec(5, 2, 2, 1)
    p, _ = solve_ivp(spec, [1.0, -0.5], 1.0)
    assert p.r[0] == 0.0
    assert np.all(p.slopes[0] == 0.0)
    assert p.initial_data() == (1.0, -0.5)
    assert p.r[1] == pytest.approx(1e-4)
    # two-term series of v_0 at r0
    r0 = p.r[1]
    assert p.u[1] == pytest.approx(1 - 0.5 * r0 ** 2 / 10 + r0 ** 4 / 120, rel=1e-15)


def test_profile_discrete_consistency():
    p, _ = solve_ivp(ProblemSpec(5, 3, 2, -1), [1.0, -0.2, 0.3], 2.0, tol=1e-11)
    for i, (err, stencil) in enumerate(profile_consistency(p)):
        assert err < 1e-5 + 10 * stencil


def test_blowup_keller_osserman():
    spec = ProblemSpec(3, 1, 2, 1)
    for a0 in (0.1, 1.0, 10.0):
        _, o = solve_ivp(spec, [a0], 100, tol=1e-9)
        _, o2 = solve_ivp(spec, [a0], 100, tol=5e-10)
        assert o.kind == OutcomeKind.BLOW_UP and o.r_star < 100
        assert o2.r_star == pytest.approx(o.r_star, rel=5e-4)


def test_blowup_values_frozen():
    spec = ProblemSpec(3, 1, 2, 1)
    got = [solve_ivp(spec, [a0], 100, tol=1e-9)[1].r_star for a0 in (0.1, 1.0, 10.0)]
    assert got == pytest.approx([12.5368756, 3.96434068, 1.25346710], rel=1e-6)


def test_negative_alpha_stops_at_zero():
    p, o = solve_ivp(ProblemSpec(3, 1, -2, -1), [1.0], 30)
    assert o.kind == OutcomeKind.ZERO_TOUCH
    assert p.u[-1] >= 0 and p.u[-1] < 1e-6


def test_non_integer_alpha_stops_before_negative_base():
    p, o = solve_ivp(ProblemSpec(3, 1, "1/2", -1), [1.0], 30)
    assert o.kind == OutcomeKind.ZERO_TOUCH
    assert not p.meta["left_positivity"]


def test_continue_past_zero_for_integer_alpha():
    p, o = solve_ivp(SIN, [1.0], 10, options=ShootOptions(continue_past_zero=True))
    assert o.kind == OutcomeKind.SURVIVED
    assert p.meta["left_positivity"]
    assert p.u[-1] == pytest.approx(math.sin(10) / 10, abs=1e-8)
    assert p.meta["first_zero"] == pytest.approx(math.pi, abs=1e-8)


@pytest.mark.parametrize(
    "spec, init, kwargs",
    [
        (SIN, [math.nan], {}),
        (SIN, [1.0, 2.0], {}),
        (ProblemSpec(3, 1, "1/2", -1), [0.0], {}),
        (ProblemSpec(3, 1, -1, 1), [-1.0], {}),
        (SIN, [1.0], {"tol": 0.0}),
    ],
)
def test_invalid_input(spec, init, kwargs):
    with pytest.raises(ValueError):
        solve_ivp(spec, init, 10, **kwargs)


def test_event_determinism():
    spec = ProblemSpec(5, 2, 3, -1)
    runs = [solve_ivp(spec, [1.0, 0.3], 20) for _ in range(3)]
    assert len({(o.kind, o.r_star) for _, o in runs}) == 1
    assert all(np.array_equal(runs[0][0].values, p.values) for p, _ in runs)


@pytest.mark.skipif("compiled" not in _kernel.BACKENDS, reason="extension not built")
@pytest.mark.parametrize(
    "spec, init",
    [(SIN, [1.0]), (ProblemSpec(5, 2, 9, 1), [1.0, -0.4]), (ProblemSpec(7, 3, "1/3", -1),
                                                            [1.0, 0.1, -0.2])],
)
def test_backends_agree(spec, init):
    outs = {}
    for name in ("python", "compiled"):
        outs[name] = solve_ivp(spec, init, 20, options=ShootOptions(backend=name))
    (pp, op), (pc, oc) = outs["python"], outs["compiled"]
    assert op.kind == oc.kind
    assert op.r_star == pytest.approx(oc.r_star, rel=1e-12)
    assert pp.meta["n_accept"] == pc.meta["n_accept"]
    assert np.allclose(pp.values, pc.values, rtol=1e-11, atol=1e-13)


def test_kernel_dense_output_reproduces_step_end():
    res = _rk_py.integrate(3, 1, -1.0, 1.0, _rk_py.POW_PLAIN, [1.0, 0.0], 0.5, 5.0, 1e-9,
                           1e-9, 1e-3, 1e8, 1e-13, 10 ** 6)
    assert res["status"] == _rk_py.CROSSED
    ynew = res["y"][-1]
    powers = np.ones(4)
    end = res["y_last"] + res["h_last"] * ((_rk_py.DENSE_P @ powers) @ res["K"])
    assert np.allclose(end, ynew, rtol=1e-14, atol=1e-16)


def test_unknown_backend():
    with pytest.raises(ValueError):
        solve_ivp(SIN, [1.0], 1, options=ShootOptions(backend="fortran"))


# ---------------------------------------------------------------------------
# search


def test_search_identical_outcomes_subcritical():
    # every a_0 in the bracket touches zero before the target radius
    with pytest.raises(ValueError, match="identical outcomes"):
        shoot_search(ProblemSpec(3, 1, 3, -1), [1.0], 0, (0.5, 100.0), 50)


def test_search_degenerate_bracket():
    with pytest.raises(ValueError):
        shoot_search(SIN, [1.0], 0, (1.0, 1.0), 10)


def test_search_separates_zero_touch_from_survival():
    res = shoot_search(ProblemSpec(5, 2, 9, 1), [1.0, 0.0], 1, (-20.0, 0.0), 50,
                       resolution=1e-12)
    kinds = {res.outcome_lo.kind, res.outcome_hi.kind}
    assert OutcomeKind.ZERO_TOUCH in kinds
    assert kinds & {OutcomeKind.SURVIVED, OutcomeKind.BLOW_UP}
    lo, hi = res.bracket
    assert hi - lo <= 1e-12 * max(1, abs(lo))
    assert lo == pytest.approx(-0.488006145, abs=1e-7)
    assert res.profile_lo.initial_data()[1] == lo


# ---------------------------------------------------------------------------
# comparison


def test_compare_with_constant_subsolution():
    spec = ProblemSpec(4, 2, 2, 1)
    p, _ = solve_ivp(spec, [1.0, 0.5], 3.0)
    ones = sample_profile(constant_form(4, 1.0), spec, p.r)
    assert compare_check(p, ones)
    assert not compare_check(ones, p)


@pytest.mark.parametrize("alpha", [0, "1/2", 1])
def test_compare_with_exponential_supersolution(alpha):
    spec = ProblemSpec(3, 3, alpha, 1)
    init = [1.0, 2.0, 0.5]
    p, o = solve_ivp(spec, init, 4.0)
    lam = max(1.0, *init[1:])
    star = sample_profile(exp_gaussian(3, lam), spec, p.r)
    assert compare_check(star, p)


def test_compare_reflexive():
    p, _ = solve_ivp(SIN, [1.0], 3.0)
    rep = compare_check(p, p)
    assert rep and rep.min_gap == 0.0


def test_compare_rejects_mismatched_profiles():
    p, _ = solve_ivp(SIN, [1.0], 3.0)
    q, _ = solve_ivp(ProblemSpec(3, 2, 1, -1), [1.0, 0.0], 3.0)
    with pytest.raises(ValueError):
        compare_check(p, q)


@pytest.mark.parametrize("spec", [ProblemSpec(3, 1, 2, 1), ProblemSpec(5, 2, "1/2", 1),
                                  ProblemSpec(4, 3, 3, 1)])
def test_comparison_monotone_in_initial_data(spec):
    rng = np.random.default_rng(7)
    for _ in range(10):
        low = rng.uniform(0.2, 1.0, spec.m)
        high = low + rng.uniform(0.0, 0.5, spec.m)
        p_hi, o_hi = solve_ivp(spec, high, 3.0)
        p_lo, o_lo = solve_ivp(spec, low, 3.0)
        assert compare_check(p_hi, p_lo), (low, high)


# ---------------------------------------------------------------------------
# cascade and majorant


def test_cascade_positive_run_high_order():
    # decaying witness in the existence regime -u^alpha with alpha < -1/(m-1)
    p, o = solve_ivp(ProblemSpec(3, 2, -3, -1), [1.0, 2.0], 30)
    assert o.kind == OutcomeKind.SURVIVED
    rep = sign_cascade_check(p)
    assert rep.applicable and rep.top_positive and not rep.violation


def test_cascade_zero_touch_resolves_negative_top():
    p, o = solve_ivp(ProblemSpec(7, 3, 13, -1), [1.0, -1.0, 1.0], 50)
    assert o.kind == OutcomeKind.ZERO_TOUCH
    rep = sign_cascade_check(p)
    assert not rep.top_positive and not rep.violation
    assert rep.first_nonpositive_r < o.r_star


def test_cascade_continuation_finds_zero():
    # negative top level in a run that ends before u reaches zero
    p, o = solve_ivp(ProblemSpec(5, 2, 2, -1), [1.0, -0.001], 2.0)
    assert o.kind == OutcomeKind.SURVIVED
    rep = sign_cascade_check(p)
    assert not rep.top_positive and not rep.violation
    assert "continued run touched zero" in rep.resolution


def test_cascade_vacuous_for_m1_and_report_only_for_plus():
    p, _ = solve_ivp(ProblemSpec(3, 1, 7, -1), [1.0], 20)
    assert not sign_cascade_check(p).violation
    q, _ = solve_ivp(ProblemSpec(3, 2, 2, 1), [1.0, -3.0], 5)
    rep = sign_cascade_check(q)
    assert not rep.applicable and len(rep.level_min) == 2


def test_pizzetti_sinc():
    p, _ = solve_ivp(SIN, [1.0], 10)
    rep = pizzetti_check(p)
    assert rep.applicable and rep.holds


def test_pizzetti_higher_order_and_plus_sign():
    p, _ = solve_ivp(ProblemSpec(5, 2, 3, -1), [1.0, 0.4], 30)
    rep = pizzetti_check(p)
    assert rep.applicable and rep.holds and rep.min_slack >= -1e-9
    q, _ = solve_ivp(ProblemSpec(5, 2, 3, 1), [1.0, 0.4], 3)
    assert not pizzetti_check(q).applicable


# ---------------------------------------------------------------------------
# growth


def _sampled(form, spec, r):
    return sample_profile(form, spec, r)


def test_sphere_area_and_ball_volume():
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_growth_constant_is_ball_volume():
    r = np.linspace(0, 16, 200)
    spec = ProblemSpec(4, 1, 0, 1)
    for R, val in growth_series(_sampled(constant_form(4, 1.0), spec, r)):
        assert val == pytest.approx(unit_ball_volume(4), rel=1e-12)


def test_growth_quadratic_grows_like_r_squared():
    n = 3
    r = np.linspace(0, 16, 1000)
    prof = _sampled(polynomial_form(RadialPolynomial({2: 1}), n), ProblemSpec(n, 1, 0, 1), r)
    for R, val in growth_series(prof, [1.0, 2.0, 4.0, 8.0, 16.0]):
        assert val == pytest.approx(sphere_area(n) * R ** 2 / (n + 2), rel=1e-7)


def test_growth_bubble_decreases():
    r = np.concatenate([[0.0], np.geomspace(1e-3, 1024, 4000)])
    prof = _sampled(bubble_family(5, 1, 1.0), ProblemSpec(5, 1, "7/3", -1), r)
    seq = [v for R, v in growth_series(prof) if R >= 1]
    assert all(b < a for a, b in zip(seq, seq[1:]))
    assert seq[-1] < 1e-5


def test_liouville_decay_witness():
    # supercritical -u^alpha, m = 1: F(R) ~ R^{n - 2m/(alpha-1)}
    n, m, alpha = 3, 1, 7
    p, o = solve_ivp(ProblemSpec(n, m, alpha, -1), [1.0], 2048, tol=1e-10)
    assert o.kind == OutcomeKind.SURVIVED
    series = [(R, v) for R, v in growth_series(p) if R >= 2048 / 10]
    R = np.log([s[0] for s in series])
    F = np.log([s[1] * s[0] ** n for s in series])
    slope = np.polyfit(R, F, 1)[0]
    assert abs(slope - (n - 2 * m / (alpha - 1))) < 0.2


def test_extend_continues_run():
    p, o = solve_ivp(SIN, [1.0], 2.0)
    q, o2 = extend(p, 10.0)
    assert o2.kind == OutcomeKind.ZERO_TOUCH
    assert o2.r_star == pytest.approx(math.pi, abs=1e-6)
    assert isinstance(q, RadialProfile) and q.r[0] == 0.0
