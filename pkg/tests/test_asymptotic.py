import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from stackstop.asymptotic import (
    INV_E,
    LogPoly,
    asymptotic_q,
    lower_bound,
    memory_one_closed_form,
    threshold,
    truncation_bound,
    upper_bound,
    w_approx_t,
)


def test_q_examples():
    assert asymptotic_q(1.0) == 0
    t1 = threshold(1)
    assert asymptotic_q(t1) == pytest.approx(0.5, abs=1e-12)
    assert asymptotic_q(INV_E) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        asymptotic_q(0.3)


def test_thresholds():
    t1 = threshold(1)
    assert abs(t1 - 0.567143) < 1e-6
    assert t1 == pytest.approx(math.exp(-t1), abs=1e-12)
    ts = [threshold(m) for m in range(1, 200)]
    assert all(b < a for a, b in zip(ts, ts[1:]))
    assert abs(threshold(10) - 0.3910) < 5e-5
    assert abs(threshold(10**6) - INV_E) < 1e-6


@pytest.mark.parametrize("m", [1, 2, 5, 50, 1000])
def test_threshold_is_where_count_floor_meets_q(m):
    t = threshold(m)
    assert m / (m + 1) == pytest.approx(asymptotic_q(t), abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(0, 3)), st.floats(-5, 5), max_size=5),
       st.floats(0.2, 0.6), st.floats(0.65, 1.0))
def test_logpoly_antiderivative(terms, lo, hi):
    f = LogPoly(terms)
    ref, _ = quad(f, lo, hi, epsabs=1e-12, epsrel=1e-12)
    assert f.integral(lo, hi) == pytest.approx(ref, abs=1e-8, rel=1e-8)


def test_upper_bound_constants():
    ub = upper_bound()
    assert abs(ub.c1 - 0.272031) < 5e-6
    assert abs(ub.c2 + 0.050398) < 5e-6
    assert abs(ub.c3 + 0.611700) < 5e-6
    assert abs(ub.t0 - 0.199548) < 5e-6


def test_upper_bound_pieces():
    ub = upper_bound()
    for t in (ub.t1, 0.7, 0.9, 1.0):
        assert ub.u_searching(t) == pytest.approx(t * (t - 1 - math.log(t)))
        assert ub.u_rank2(t) == pytest.approx(t * (1 - t))
    for b in (ub.t1, INV_E, ub.t0):
        assert ub.u_searching(b - 1e-10) == pytest.approx(ub.u_searching(b), abs=1e-8)
    assert ub.u_rank2(ub.t1 - 1e-10) == pytest.approx(ub.u_rank2(ub.t1), abs=1e-8)
    assert ub.u_searching(0.05) == ub.t0


def test_memory_one_constants():
    c = memory_one_closed_form()
    assert abs(c["c1"] - 0.330366) < 5e-6
    assert abs(c["c3"] - 0.301210) < 5e-6
    assert abs(c["c6"] + 0.614019) < 5e-6
    assert abs(c["t0"] - 0.199086) < 5e-6


def test_memory_one_matches_closed_form():
    c, lb = memory_one_closed_form(), lower_bound(1)
    t1, t2 = c["t1"], c["t2"]
    for t in (0.5, 0.52, 0.55):
        assert t2 <= t < t1
        lt = math.log(t)
        assert lb.v(t, 0) == pytest.approx(t * t * lt - t * lt + c["c1"] * t * t, abs=1e-12)
        assert lb.v(t, -1) == pytest.approx(t * lt**2 / 2 - t * t * lt + (1 - c["c1"]) * t * t + c["c2"] * t, abs=1e-12)
    for t in (0.38, 0.42, 0.47):
        assert lb.v(t, 1) == pytest.approx(c["c3"], abs=1e-12)
        assert lb.v(t, 0) == pytest.approx(c["c3"] + c["c4"] * t * t, abs=1e-12)
        assert lb.v(t, -1) == pytest.approx(c["c3"] - c["c4"] * t * t + c["c5"] * t, abs=1e-12)
    assert lb.pre_constant == pytest.approx(c["c6"], abs=1e-12)
    assert lb.value == pytest.approx(c["t0"], abs=1e-12)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 5])
def test_lower_bound_integral_equations(k):
    lb = lower_bound(k)
    for m in range(k - 1, -1, -1):
        p = m / (m + 1)
        top = threshold(m + 1)

        def rhs(t):
            def cont(s):
                return (t * p / s**2 + 2 * t * t * (1 - p) / s**3) * lb.v(s, m + 1)

            def stop(s):
                return t * p / s + t * t * (1 - p) / s**2

            lo = min(t, top)
            a = quad(cont, lo, top, points=lb.thresholds, epsabs=1e-13, limit=200)[0] if lo < top else 0.0
            return a + quad(stop, max(t, top), 1.0, epsabs=1e-13)[0]

        for t in (INV_E + 1e-6, 0.4, 0.45, 0.5, 0.6, 0.8):
            assert lb.v(t, m) == pytest.approx(rhs(t), abs=1e-9)
        assert lb.v(0.8, m) == pytest.approx(w_approx_t(0.8, m), abs=1e-12)
    for t in (INV_E, 0.45, 0.6, 0.9):
        ref = t * quad(lambda s: lb.v(s, 0) / s**2, t, 1.0, points=lb.thresholds, epsabs=1e-13, limit=200)[0]
        assert lb.v(t, -1) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("k", range(0, 9))
def test_lower_bound_continuity_and_range(k):
    lb = lower_bound(k)
    for m, f in lb.values.items():
        for i in range(1, len(f.breaks) - 1):
            assert abs(f.left_limit(i) - f.pieces[i](f.breaks[i])) < 1e-9
        for j in range(101):
            t = INV_E + (1 - INV_E) * j / 100
            assert 0 <= f(t) <= 1
    # the pre-1/e piece joins continuously and peaks at t0
    assert lb.v(INV_E - 1e-12, -1) == pytest.approx(lb.v(INV_E, -1), abs=1e-9)
    assert lb.v(lb.t0, -1) == pytest.approx(lb.t0, abs=1e-12)
    assert lb.v(lb.t0 / 2, -1) == lb.t0


def test_lower_bounds_increase_and_sit_below_upper():
    values = [lower_bound(k).value for k in range(0, 9)]
    assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))
    assert values[-1] < upper_bound().t0
    for k, ref in {0: 0.195684, 1: 0.199086, 2: 0.199214, 3: 0.199217}.items():
        assert abs(values[k] - ref) < 5e-6


def test_truncation_bound_against_series():
    for k in range(0, 6):
        t = threshold(k + 1)
        lam = 2 * (1 - t) / (k + 1)
        tail = 1 - sum(math.exp(-lam) * lam**j / math.factorial(j) for j in range(k + 2))
        assert truncation_bound(k) == pytest.approx((k * t + t * t) / (k + 1) ** 2 * tail, rel=1e-9)
    assert abs(truncation_bound(0) - 6.915e-2) < 5e-5
    with pytest.raises(ValueError):
        truncation_bound(-1)


def test_lower_bound_domain():
    with pytest.raises(ValueError):
        lower_bound(9)
    with pytest.raises(ValueError):
        threshold(0)
