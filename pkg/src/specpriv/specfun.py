"""erf, erfc, erfi, Dawson, Gamma(1/2, x) and an adaptive Simpson integrator.

Scalar implementations on top of :mod:`math`; accurate to a few ulps in
double precision over the ranges used by the analysis module.
"""

from dataclasses import dataclass
import math

from specpriv._config import DEFAULTS

SQRT_PI = math.sqrt(math.pi)
_TWO_OVER_SQRT_PI = 2.0 / SQRT_PI


class QuadratureError(RuntimeError):
    pass


# ------------------------------------------------------------------ erf


def _erf_series(x):
    # erf(x) = 2x/sqrt(pi) e^{-x^2} sum (2x^2)^k / (2k+1)!!  (all terms positive)
    x2 = x * x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= 2.0 * x2 / (2 * k + 1)
        total += term
        if term < 1e-17 * total or k > 500:
            break
    return _TWO_OVER_SQRT_PI * x * math.exp(-x2) * total


def _erfcx_cf(x):
    """e^{x^2} erfc(x) for x >= 2 by modified Lentz on the Laplace continued fraction."""
    tiny = 1e-300
    f = x
    c = x
    d = 0.0
    for k in range(1, 5000):
        a = 0.5 * k
        d = x + a * d
        d = 1.0 / (d if d != 0.0 else tiny)
        c = x + a / c
        if c == 0.0:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return 1.0 / (SQRT_PI * f)


def erf(x):
    x = float(x)
    if x < 0:
        return -erf(-x)
    if x <= 3.0:
        return _erf_series(x)
    return 1.0 - erfc(x)


def erfc(x):
    x = float(x)
    if x < 0:
        return 2.0 - erfc(-x)
    if x <= 2.0:
        return 1.0 - _erf_series(x)
    if x > 27.3:
        return 0.0
    return math.exp(-x * x) * _erfcx_cf(x)


def erfcx(x):
    """Scaled complement ``exp(x^2) * erfc(x)`` for ``x >= 0``."""
    x = float(x)
    if x < 0:
        raise ValueError("erfcx implemented for x >= 0 only")
    if x <= 2.0:
        return math.exp(x * x) * (1.0 - _erf_series(x))
    return _erfcx_cf(x)


# ----------------------------------------------------------------- erfi


def _erfi_sum(x):
    # sum_k x^{2k+1} / (k! (2k+1)), positive terms
    x2 = x * x
    power = x  # x^{2k+1}/k!
    total = x
    k = 0
    while True:
        k += 1
        power *= x2 / k
        term = power / (2 * k + 1)
        total += term
        if term < 1e-17 * total or k > 2000:
            break
    return total


def dawson(x):
    """Dawson's integral ``F(x) = exp(-x^2) * int_0^x exp(t^2) dt``."""
    x = float(x)
    if x < 0:
        return -dawson(-x)
    if x <= 6.0:
        return math.exp(-x * x) * _erfi_sum(x)
    # asymptotic: 1/(2x) * sum (2k-1)!! / (2x^2)^k, truncated at the smallest term
    inv = 1.0 / (2.0 * x * x)
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        nxt = term * (2 * k - 1) * inv
        if nxt >= term or nxt < 1e-17 * total:
            break
        term = nxt
        total += term
    return total / (2.0 * x)


def erfi(x):
    """Imaginary error function ``2/sqrt(pi) * int_0^x exp(t^2) dt``.

    Raises :class:`OverflowError` once ``exp(x^2)`` is not representable;
    use :func:`dawson` for the scaled value.
    """
    x = float(x)
    if x < 0:
        return -erfi(-x)
    if x <= 6.0:
        return _TWO_OVER_SQRT_PI * _erfi_sum(x)
    if x * x > 709.0:
        raise OverflowError(f"erfi({x}) overflows double precision")
    return _TWO_OVER_SQRT_PI * math.exp(x * x) * dawson(x)


def upper_gamma_half(x):
    """``Gamma(1/2, x) = sqrt(pi) * erfc(sqrt(x))``."""
    if x < 0:
        raise ValueError("Gamma(1/2, x) needs x >= 0")
    return SQRT_PI * erfc(math.sqrt(x))


# ----------------------------------------------------------- quadrature


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


def integrate(f, a, b, tol=DEFAULTS.quad, knots=(), max_depth=DEFAULTS.quad_max_depth):
    """Adaptive Simpson quadrature of ``f`` over ``[a, b]``.

    Interior ``knots`` (e.g. a density kink) split the range first so each
    piece is smooth. The tolerance is shared between pieces in proportion to
    their length; each accepted panel is Richardson-corrected.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if b < a:
        raise ValueError("need a <= b")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    cuts = [a] + sorted(k for k in knots if a < k < b) + [b]
    total = 0.0
    err = 0.0
    evals = 0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        v, e, k = _simpson(f, lo, hi, tol * (hi - lo) / (b - a), max_depth)
        total += v
        err += e
        evals += k
    return QuadratureResult(total, err, evals)


def _simpson(f, a, b, tol, max_depth):
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    evals = 3
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = 0.0
    err = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, s, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        evals += 2
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        diff = left + right - s
        if abs(diff) <= 15.0 * eps or (depth >= 8 and abs(diff) <= 1e-15 * abs(left + right)):
            total += left + right + diff / 15.0
            err += abs(diff) / 15.0
        elif depth >= max_depth:
            raise QuadratureError(f"subdivision depth {max_depth} exhausted near x={mid:.6g}")
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    if not math.isfinite(total):
        raise QuadratureError("non-finite integrand")
    return total, err, evals
