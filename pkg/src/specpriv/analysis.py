"""Closed-form accuracy results and estimators built on private eigenvalues."""

from dataclasses import dataclass
import logging
import math
import warnings

import numpy as np

from specpriv import specfun
from specpriv._config import DEFAULTS
from specpriv.mechanism import normalizer

log = logging.getLogger(__name__)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class FlooredValuesWarning(UserWarning):
    """A reciprocal estimator met private eigenvalues below the division floor."""


@dataclass(frozen=True)
class BiasReport:
    lam: float
    b: float
    n: int
    expected_private: float
    bias: float


@dataclass(frozen=True)
class IntervalBound:
    lower: float
    upper: float
    alpha_used: float


@dataclass(frozen=True)
class ConcentrationCurve:
    t_grid: np.ndarray
    bound: np.ndarray
    a: float
    lambda2: float
    b: float
    n: int

    def to_records(self):
        return [{"t": float(t), "bound": float(v), "lower_bound_within_a": float(max(0.0, 1.0 - v))}
                for t, v in zip(self.t_grid, self.bound)]


def _check(lam, b, n):
    if not b > 0:
        raise ValueError("b must be positive")
    if not 0 <= lam <= n:
        raise ValueError(f"lambda={lam} outside [0, {n}]")


# ------------------------------------------------------------ accuracy


def expected_private_eigenvalue(lam, b, n):
    """Mean of the bounded Laplace release of ``lam``."""
    _check(lam, b, n)
    c = normalizer(lam, b, n)
    return (2.0 * lam + b * math.exp(-lam / b) - (n + b) * math.exp(-(n - lam) / b)) / (2.0 * c)


def bias_report(lam, b, n):
    e = expected_private_eigenvalue(lam, b, n)
    return BiasReport(lam=float(lam), b=float(b), n=int(n), expected_private=e, bias=e - lam)


def trace_bias(spec_values, b, include_first=False):
    """Expected overshoot of the private trace, summed eigenvalue by eigenvalue.

    ``spec_values`` is a :class:`~specpriv.graph.Spectrum` (or anything with
    ``values`` and ``n``). lambda_1 is released exactly, so its term is left
    out unless ``include_first`` is set.
    """
    vals = np.asarray(spec_values.values, dtype=np.float64)
    n = spec_values.n
    start = 0 if include_first else 1
    return float(sum(expected_private_eigenvalue(float(v), b, n) - v for v in vals[start:]))


def expected_inv_sqrt_lambda2(lambda2, b, n):
    """``E[1 / sqrt(private lambda_2)]`` in closed form.

    Written through Dawson's integral and the scaled complementary error
    function, so the ``exp(+-lambda_2/b)`` factors cancel analytically and
    nothing overflows for small b.
    """
    if not lambda2 > 0:
        raise ValueError("lambda2 must be positive")
    _check(lambda2, b, n)
    c = normalizer(lambda2, b, n)
    x = math.sqrt(lambda2 / b)
    y = math.sqrt(n / b)
    inner = (2.0 * specfun.dawson(x) + specfun.SQRT_PI * specfun.erfcx(x)
             - specfun.SQRT_PI * specfun.erfcx(y) * math.exp(x * x - y * y))
    value = inner / (2.0 * math.sqrt(b) * c)
    if not (math.isfinite(value) and value > 0):
        log.warning("closed form for E[1/sqrt(lambda2)] failed at (%g, %g, %d); using quadrature", lambda2, b, n)
        value = _inv_sqrt_by_quadrature(lambda2, b, n)
    return value


def _inv_sqrt_by_quadrature(lambda2, b, n):
    # x = u^2 removes the 1/sqrt(x) singularity: integrand 2 e^{-|u^2 - lam|/b}
    c = normalizer(lambda2, b, n)
    f = lambda u: 2.0 * math.exp(-abs(u * u - lambda2) / b)
    r = specfun.integrate(f, 0.0, math.sqrt(n), tol=1e-12, knots=(math.sqrt(lambda2),))
    return r.value / (2.0 * b * c)


# ------------------------------------------------- diameter / mean distance


def _alpha_factor(alpha):
    return math.sqrt((alpha * alpha - 1.0) / (4.0 * alpha))


def diameter_upper(scale, n, alpha):
    """Upper diameter bound with ``scale = sqrt(lambda_n / lambda_2)``."""
    return (2.0 * scale * _alpha_factor(alpha) + 2.0) * (math.log(n / 2.0) / math.log(alpha))


def mean_distance_upper(scale, n, alpha):
    return (scale * _alpha_factor(alpha) + 1.0) * (n / (n - 1.0)) * (0.5 + math.log(n / 2.0) / math.log(alpha))


def minimize_alpha(fun, alpha_max=DEFAULTS.alpha_max, tol=DEFAULTS.golden):
    """Minimise ``fun`` over ``alpha`` in ``(1, alpha_max]``.

    A log-spaced scan locates the basin, then golden-section search refines
    it. Returns ``(alpha, fun(alpha))``.
    """
    grid = 1.0 + np.logspace(-6, math.log10(alpha_max - 1.0), 241)
    vals = [fun(a) for a in grid]
    k = int(np.argmin(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    while hi - lo > tol * max(1.0, lo):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = fun(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = fun(x2)
    best = min((vals[k], grid[k]), (f1, x1), (f2, x2))
    return float(best[1]), float(best[0])


def _check_bounds_args(lambda2, lambda_n, n):
    if not lambda2 > 0:
        raise ValueError("lambda2 must be positive")
    if lambda_n < lambda2:
        raise ValueError("lambda_n must be >= lambda2")
    if n < 3:
        raise ValueError("need n >= 3")


def diameter_bounds(lambda2, lambda_n, n):
    """Spectral interval for the diameter, upper end minimised over alpha."""
    _check_bounds_args(lambda2, lambda_n, n)
    scale = math.sqrt(lambda_n / lambda2)
    alpha, upper = minimize_alpha(lambda a: diameter_upper(scale, n, a))
    return IntervalBound(4.0 / (n * lambda2), upper, alpha)


def mean_distance_bounds(lambda2, lambda_n, n):
    _check_bounds_args(lambda2, lambda_n, n)
    scale = math.sqrt(lambda_n / lambda2)
    alpha, upper = minimize_alpha(lambda a: mean_distance_upper(scale, n, a))
    lower = 2.0 / ((n - 1) * lambda2) + (n - 2) / (2.0 * (n - 1))
    return IntervalBound(lower, upper, alpha)


def expected_diameter_bounds(lambda2, lambda_n, n, b):
    """Interval on the expected private diameter estimate."""
    _check_bounds_args(lambda2, lambda_n, n)
    mean = expected_private_eigenvalue(lambda2, b, n)
    scale = math.sqrt(lambda_n) * expected_inv_sqrt_lambda2(lambda2, b, n)
    alpha, upper = minimize_alpha(lambda a: diameter_upper(scale, n, a))
    return IntervalBound(4.0 / (n * mean), upper, alpha)


def expected_mean_distance_bounds(lambda2, lambda_n, n, b):
    _check_bounds_args(lambda2, lambda_n, n)
    mean = expected_private_eigenvalue(lambda2, b, n)
    scale = math.sqrt(lambda_n) * expected_inv_sqrt_lambda2(lambda2, b, n)
    alpha, upper = minimize_alpha(lambda a: mean_distance_upper(scale, n, a))
    lower = 2.0 / ((n - 1) * mean) + (n - 2) / (2.0 * (n - 1))
    return IntervalBound(lower, upper, alpha)


# ------------------------------------------------------------ consensus


def _exprel(z):
    if abs(z) < 1e-8:
        return 1.0 + 0.5 * z
    return math.expm1(z) / z


def rho_terms(t, lambda2, b, n, band=DEFAULTS.rho1_series_band):
    """The three terms of the convergence-rate bound at time ``t``."""
    lam = lambda2
    bt = b * t
    e_lt = math.exp(-lam * t)
    e_lb = math.exp(-lam / b)
    if abs(bt - 1.0) >= band:
        # printed numerator multiplied through by e^{-lam(1/b + t)}
        num = -bt * e_lt + bt * e_lb * e_lt + e_lb - e_lb * e_lt
        rho1 = num / (bt - 1.0)
    else:
        # removable singularity at bt = 1
        rho1 = (lam / b) * e_lb * _exprel(lam * (1.0 / b - t)) - e_lt * (1.0 - e_lb)
    rho2 = e_lt * (1.0 - math.exp((lam - n) / b))
    rho3 = (e_lt - math.exp((lam - n * (bt + 1.0)) / b)) / (bt + 1.0)
    return rho1, rho2, rho3


def consensus_concentration_bound(a, t, lambda2, b, n, clip=False):
    """Upper bound on ``P(|exp(-lam2~ t) - exp(-lam2 t)| >= a)``."""
    if not a > 0:
        raise ValueError("a must be positive")
    if not t > 0:
        raise ValueError("t must be positive")
    if not lambda2 > 0:
        raise ValueError("lambda2 must be positive")
    _check(lambda2, b, n)
    r1, r2, r3 = rho_terms(t, lambda2, b, n)
    value = (r1 + r2 - r3) / (2.0 * a * normalizer(lambda2, b, n))
    return min(value, 1.0) if clip else value


def concentration_curve(a, t_grid, lambda2, b, n):
    t_grid = np.asarray(t_grid, dtype=np.float64)
    bound = np.array([consensus_concentration_bound(a, t, lambda2, b, n) for t in t_grid])
    return ConcentrationCurve(t_grid=t_grid, bound=bound, a=a, lambda2=lambda2, b=b, n=n)


def consensus_time_threshold(a, eta, lambda2, b, n):
    """Time after which the concentration bound stays below ``eta``.

    Two branches depending on whether lambda_2 sits below or above n/2; on
    the boundary both are evaluated and the larger time is returned.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    if not lambda2 > 0:
        raise ValueError("lambda2 must be positive")
    _check(lambda2, b, n)
    c = normalizer(lambda2, b, n)
    k = 2.0 * a * c * eta
    upper_branch = (k + 1.0) / (k * b)
    extra = (math.exp(-lambda2 / b) - math.exp((lambda2 - n) / b)) * b / (lambda2 * math.e)
    lower_branch = (extra + k + 1.0) / (k * b)
    if lambda2 < n / 2.0:
        return lower_branch
    if lambda2 > n / 2.0:
        return upper_branch
    return max(lower_branch, upper_branch)


# ---------------------------------------------------------- estimators


def _private_values(release):
    vals = np.asarray(release.values if hasattr(release, "values") else release, dtype=np.float64)
    if getattr(release, "n", vals.size) != vals.size or vals.size < 2:
        raise ValueError("estimates need a full-spectrum release")
    return vals


def trace_estimate(release):
    return float(np.sum(_private_values(release)))


def average_degree_estimate(release):
    vals = _private_values(release)
    return float(np.sum(vals)) / vals.size


def kemeny_constant(values, gamma):
    """``(1/gamma) * sum_{i>=2} 1/lambda_i`` for an exact ascending spectrum."""
    vals = np.asarray(getattr(values, "values", values), dtype=np.float64)
    return float(np.sum(1.0 / vals[1:])) / gamma


def kemeny_estimate(release, gamma, floor=DEFAULTS.div_floor):
    """Kemeny constant from a private spectrum.

    ``gamma`` must be a valid consensus step (at most one over the maximum
    degree); that cannot be checked from the release. Private values below
    ``floor`` are raised to it and a :class:`FlooredValuesWarning` is issued.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    vals = _private_values(release)[1:]
    if vals.size and np.any(vals < floor):
        warnings.warn(f"{int(np.sum(vals < floor))} private eigenvalue(s) floored at {floor:g}",
                      FlooredValuesWarning, stacklevel=2)
        vals = np.maximum(vals, floor)
    return float(np.sum(1.0 / vals)) / gamma


def cheeger_upper_bound(lambda2, max_degree):
    """Non-private isoperimetric bound ``sqrt(lambda2 (2 max_degree - lambda2))``."""
    rad = lambda2 * (2.0 * max_degree - lambda2)
    if rad < 0:
        raise ValueError("negative radicand")
    return math.sqrt(rad)


def cheeger_estimate(release):
    """Private isoperimetric estimate; twice the mean private eigenvalue stands in for 2 * max degree."""
    vals = _private_values(release)
    lam2 = float(vals[1])
    d_avg = float(np.mean(vals))
    rad = lam2 * (2.0 * d_avg - lam2)
    if rad < 0:
        raise ValueError(f"degenerate release: 2*mean - lambda2 = {2.0 * d_avg - lam2:.4g} < 0")
    return math.sqrt(rad)
