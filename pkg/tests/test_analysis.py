import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specpriv import analysis as an
from specpriv import graph as gr
from specpriv import mechanism as m
from specpriv import specfun
from specpriv.mechanism import PrivacySpec, calibrate
from conftest import bfs_oracle


def quad_moment(g, lam, b, n):
    """E[g(X)] for the bounded Laplace law by adaptive Simpson."""
    c = m.normalizer(lam, b, n)
    f = lambda x: g(x) * math.exp(-abs(x - lam) / b) / (2 * b * c)
    return specfun.integrate(f, 0.0, n, tol=1e-12, knots=(lam,)).value


def mp_moment(g, lam, b, n):
    mpmath.mp.dps = 30
    c = 1 - (mpmath.exp(-lam / mpmath.mpf(b)) + mpmath.exp(-(n - lam) / mpmath.mpf(b))) / 2
    f = lambda x: g(x) * mpmath.exp(-abs(x - lam) / b) / (2 * b * c)
    return float(mpmath.quad(f, [0, lam, n]))


# --------------------------------------------------------------- accuracy


@pytest.mark.parametrize("lam, b, n", [(0.0, 1.0, 10), (1.0, 7.39, 10), (5.0, 0.3, 10),
                                       (10.0, 10.57, 50), (48.0, 2.0, 50), (50.0, 100.0, 50)])
def test_expected_private_eigenvalue_against_quadrature(lam, b, n):
    assert an.expected_private_eigenvalue(lam, b, n) == pytest.approx(quad_moment(lambda x: x, lam, b, n), abs=1e-9)


def test_bias_signs():
    b = calibrate(PrivacySpec(0.6, 0.05, "edge", 2), 50).b
    assert an.bias_report(2.0, b, 50).bias > 0
    assert an.bias_report(48.0, b, 50).bias < 0
    assert an.bias_report(25.0, b, 50).bias == pytest.approx(0.0, abs=1e-12)


def test_bias_vanishes_as_b_shrinks():
    assert abs(an.bias_report(3.0, 0.01, 10).bias) < 1e-12


def test_trace_bias_is_sum_of_biases(fixture_graph):
    sp = gr.spectrum(fixture_graph)
    b = 5.0
    direct = sum(an.bias_report(float(v), b, 50).bias for v in sp.values[1:])
    assert an.trace_bias(sp, b) == pytest.approx(direct)
    assert an.trace_bias(sp, b, include_first=True) > an.trace_bias(sp, b)


@pytest.mark.parametrize("lam, b, n", [(1.0, 7.39, 10), (0.05, 2.0, 10), (10.0, 10.57, 50),
                                       (30.0, 0.05, 50), (2.0, 1e-3, 10), (5.0, 1e4, 10)])
def test_expected_inv_sqrt_against_mpmath(lam, b, n):
    ref = mp_moment(lambda x: 1 / mpmath.sqrt(x), lam, b, n)
    assert an.expected_inv_sqrt_lambda2(lam, b, n) == pytest.approx(ref, rel=1e-10)


def test_inv_sqrt_quadrature_fallback_agrees():
    for lam, b, n in [(1.0, 7.39, 10), (10.0, 10.57, 50)]:
        assert an._inv_sqrt_by_quadrature(lam, b, n) == pytest.approx(an.expected_inv_sqrt_lambda2(lam, b, n), rel=1e-9)


def test_inv_sqrt_limits():
    # b -> 0 collapses to 1/sqrt(lambda)
    assert an.expected_inv_sqrt_lambda2(4.0, 1e-4, 10) == pytest.approx(0.5, rel=1e-3)
    # Jensen: E[1/sqrt X] >= 1/sqrt(E X)
    v = an.expected_inv_sqrt_lambda2(2.0, 3.0, 10)
    assert v >= 1 / math.sqrt(an.expected_private_eigenvalue(2.0, 3.0, 10))


# ----------------------------------------------------------------- bounds


def test_minimize_alpha_finds_interior_minimum():
    a, v = an.minimize_alpha(lambda x: (math.log(x) - 1.3) ** 2 + 2.0)
    assert a == pytest.approx(math.exp(1.3), rel=1e-4)
    assert v == pytest.approx(2.0, abs=1e-8)


def test_minimize_alpha_beats_dense_scan():
    scale, n = math.sqrt(30 / 1.4), 30
    a, v = an.minimize_alpha(lambda x: an.diameter_upper(scale, n, x))
    dense = min(an.diameter_upper(scale, n, x) for x in np.linspace(1.001, 64, 200_000))
    assert v <= dense + 1e-9


def test_bounds_argument_checks():
    with pytest.raises(ValueError):
        an.diameter_bounds(0.0, 3.0, 10)
    with pytest.raises(ValueError):
        an.mean_distance_bounds(4.0, 3.0, 10)


@pytest.mark.parametrize("g", [gr.generate("cycle", 14), gr.generate("path", 9), gr.generate("complete", 7),
                               gr.generate("erdos_renyi", 30, p=0.2, seed=7),
                               gr.generate("erdos_renyi", 40, p=0.15, seed=3)])
def test_exact_bounds_contain_truth(g):
    d = bfs_oracle(g)
    sp = gr.spectrum(g)
    db = an.diameter_bounds(sp.lambda2, sp.lambda_n, g.n)
    rb = an.mean_distance_bounds(sp.lambda2, sp.lambda_n, g.n)
    assert db.lower <= d.max() <= db.upper
    assert rb.lower <= d.sum() / (g.n * (g.n - 1)) <= rb.upper


def test_expected_bounds_approach_exact_as_b_shrinks():
    l2, ln, n = 1.36, 30.0, 30
    ex = an.diameter_bounds(l2, ln, n)
    pr = an.expected_diameter_bounds(l2, ln, n, 1e-3)
    assert pr.upper == pytest.approx(ex.upper, rel=1e-3)
    assert pr.lower == pytest.approx(ex.lower, rel=1e-3)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 20), st.floats(0, 1), st.floats(0.05, 30))
def test_bound_intervals_well_formed(l2, frac, b):
    n = 30
    ln = l2 + frac * (n - l2)
    for f in (an.diameter_bounds, an.mean_distance_bounds):
        iv = f(l2, ln, n)
        assert 0 < iv.lower < iv.upper and 1 < iv.alpha_used <= 64
    for f in (an.expected_diameter_bounds, an.expected_mean_distance_bounds):
        iv = f(l2, ln, n, b)
        assert 0 < iv.lower < iv.upper


# -------------------------------------------------------------- consensus


@pytest.mark.parametrize("t", [0.01, 0.1, 0.5, 1.0, 1 / 7.39, 3.0, 20.0, 200.0])
def test_concentration_bound_equals_markov_bound(t):
    """The bound is E|exp(-X t) - exp(-lambda2 t)| / a, checked by quadrature."""
    lam, b, n, a = 1.0, 7.39, 10, 0.2
    ref = quad_moment(lambda x: abs(math.exp(-x * t) - math.exp(-lam * t)), lam, b, n) / a
    assert an.consensus_concentration_bound(a, t, lam, b, n) == pytest.approx(ref, rel=1e-8, abs=1e-13)


def test_rho1_continuous_across_singular_point():
    b = 4.0
    vals = [sum(an.rho_terms(t, 1.5, b, 10)[:1]) for t in (0.25 - 1e-5, 0.25 - 1e-7, 0.25, 0.25 + 1e-7, 0.25 + 1e-5)]
    slope = (vals[4] - vals[0]) / 2e-5
    # the series branch must sit on the line through the direct branch
    for k, dt in ((1, -1e-7), (2, 0.0), (3, 1e-7)):
        assert vals[k] == pytest.approx(vals[0] + slope * (dt + 1e-5), abs=1e-10)


def test_clip_option():
    raw = an.consensus_concentration_bound(0.2, 0.3, 1.0, 7.39, 10)
    assert raw > 1
    assert an.consensus_concentration_bound(0.2, 0.3, 1.0, 7.39, 10, clip=True) == 1.0


@pytest.mark.parametrize("lam2, b, n, a, eta", [(1.0, 7.39, 10, 0.2, 0.1), (8.0, 7.39, 10, 0.2, 0.1),
                                                (5.0, 3.0, 10, 0.1, 0.05), (10.0, 10.57, 50, 0.05, 0.2)])
def test_time_threshold_is_valid(lam2, b, n, a, eta):
    t_star = an.consensus_time_threshold(a, eta, lam2, b, n)
    for t in np.linspace(t_star, 20 * t_star, 400):
        assert an.consensus_concentration_bound(a, t, lam2, b, n) <= eta


def test_time_threshold_frozen():
    # frozen after checking against the bound curve above
    assert an.consensus_time_threshold(0.2, 0.1, 1.0, 7.39, 10) == pytest.approx(21.0692549, rel=1e-7)


def test_concentration_curve_records():
    c = an.concentration_curve(0.2, [0.1, 1.0], 1.0, 7.39, 10)
    recs = c.to_records()
    assert [r["t"] for r in recs] == [0.1, 1.0]
    assert all(0 <= r["lower_bound_within_a"] <= 1 for r in recs)


# ------------------------------------------------------------- estimators


def test_exact_estimators_on_true_spectrum(fixture_graph):
    sp = gr.spectrum(fixture_graph)
    assert an.trace_estimate(sp) == pytest.approx(2 * fixture_graph.m)
    assert an.average_degree_estimate(sp) == pytest.approx(2 * fixture_graph.m / 50)
    # Kemeny through the walk matrix P = I - gamma L
    gamma = 1 / 50
    P = np.eye(50) - gamma * gr.laplacian(fixture_graph)
    mu = np.linalg.eigvalsh(P)
    assert an.kemeny_constant(sp, gamma) == pytest.approx(np.sum(1 / (1 - np.sort(mu)[:-1])), rel=1e-9)


def test_kemeny_floor_warns():
    vals = np.array([0.0, 1e-12, 3.0])
    with pytest.warns(an.FlooredValuesWarning):
        k = an.kemeny_estimate(vals, 0.5)
    assert k == pytest.approx((1e9 + 1 / 3) / 0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        an.kemeny_estimate(np.array([0.0, 1.0, 2.0]), 0.5)


def test_cheeger_values():
    g = gr.generate("cycle", 14)
    sp = gr.spectrum(g)
    assert an.cheeger_upper_bound(sp.lambda2, 2) == pytest.approx(math.sqrt(sp.lambda2 * (4 - sp.lambda2)))
    assert an.cheeger_upper_bound(sp.lambda2, 2) == pytest.approx(0.8678, abs=1e-4)
    # with the exact spectrum the mean eigenvalue is the average degree
    assert an.cheeger_estimate(sp) == pytest.approx(an.cheeger_upper_bound(sp.lambda2, 2))


def test_cheeger_degenerate_raises():
    with pytest.raises(ValueError):
        an.cheeger_estimate(np.array([0.0, 9.0, 0.1, 0.1]))


def test_estimators_need_full_release(fixture_graph):
    rel = m.privatize_lambda2(fixture_graph, PrivacySpec(0.4, 0.05, "node"), seed=1)
    with pytest.raises(ValueError):
        an.trace_estimate(rel)
