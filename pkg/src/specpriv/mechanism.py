"""Bounded Laplace mechanism for Laplacian eigenvalues.

Calibration solves the implicit scale condition

    b >= sens / (eps - log(C(sens, b) / C(0, b)) - log(1 - delta))

by bisection, where ``C(lam, b)`` is the mass a Laplace(lam, b) density puts
on ``[0, n]``.
"""

from dataclasses import dataclass, asdict
import json
import math

import numpy as np

from specpriv import _kernels
from specpriv._config import DEFAULTS
from specpriv.graph import is_connected, spectrum

#: composed epsilon above which a release is reported as degenerate
DEGENERATE_EPSILON = 10.0


class PrivacyError(ValueError):
    pass


class InfeasibleCalibration(PrivacyError):
    pass


@dataclass(frozen=True)
class PrivacySpec:
    epsilon: float
    delta: float
    adjacency: str = "edge"
    A: int = 1

    def __post_init__(self):
        if not self.epsilon > 0:
            raise PrivacyError(f"epsilon must be > 0, got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise PrivacyError(f"delta must lie in (0, 1), got {self.delta}")
        if self.adjacency not in ("edge", "node"):
            raise PrivacyError(f"adjacency must be 'edge' or 'node', got {self.adjacency!r}")
        if self.adjacency == "edge" and (int(self.A) != self.A or self.A < 1):
            raise PrivacyError(f"edge adjacency needs integer A >= 1, got {self.A}")

    def sensitivity(self, n):
        if self.adjacency == "edge":
            return edge_sensitivity(self.A)
        return node_sensitivity(n)


@dataclass(frozen=True)
class CalibratedMechanism:
    n: int
    b: float
    spec: PrivacySpec
    sensitivity: float

    def normalizer(self, lam):
        return normalizer(lam, self.b, self.n)

    def pdf(self, x, lam):
        return pdf(x, lam, self.b, self.n)

    def cdf(self, x, lam):
        return cdf(x, lam, self.b, self.n)


@dataclass(frozen=True)
class PrivateRelease:
    n: int
    values: tuple
    epsilon: float
    delta: float
    adjacency: str
    A: int
    b: float
    composed_epsilon: float
    composed_delta: float
    seed: int
    sorted: bool
    budget_degenerate: bool

    @property
    def array(self):
        return np.asarray(self.values, dtype=np.float64)

    def to_dict(self):
        d = asdict(self)
        d["values"] = list(self.values)
        if self.adjacency != "edge":
            d.pop("A")
        return d

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d.setdefault("A", 0)
        d["values"] = tuple(float(v) for v in d["values"])
        return cls(**d)


# ---------------------------------------------------------- sensitivities


def edge_sensitivity(A):
    """Bound ``2A`` on how far any eigenvalue moves when up to A edges flip."""
    if int(A) != A or A < 1:
        raise PrivacyError(f"A must be an integer >= 1, got {A}")
    return 2.0 * A


def node_sensitivity(n):
    """Bound ``n - 1`` on the change of lambda_2 when one node is added or removed."""
    if n < 3:
        raise PrivacyError(f"need n >= 3, got {n}")
    return float(n - 1)


# ------------------------------------------------------------ normalizer


def normalizer(lam, b, n):
    """Mass of a Laplace(lam, b) density on ``[0, n]``."""
    if not 0 <= lam <= n:
        raise PrivacyError(f"lambda={lam} outside [0, {n}]")
    if not b > 0:
        raise PrivacyError("b must be positive")
    return 1.0 - 0.5 * (math.exp(-lam / b) + math.exp(-(n - lam) / b))


def delta_C(b, sensitivity, n):
    """Ratio ``C(sensitivity, b) / C(0, b)``."""
    if not 0 <= sensitivity <= n:
        raise PrivacyError(f"sensitivity={sensitivity} outside [0, {n}]")
    # both numerator and denominator written with expm1 so b >> n stays accurate
    num = -0.5 * (math.expm1(-sensitivity / b) + math.expm1(-(n - sensitivity) / b))
    den = -0.5 * math.expm1(-n / b)
    return num / den


def necessary_lower_bound(spec, n):
    """Closed-form bound ``sens / (eps - log(1 - delta))`` that any valid b must exceed."""
    return spec.sensitivity(n) / (spec.epsilon - math.log1p(-spec.delta))


def calibration_gap(b, spec, n):
    """``b * (eps - log dC(b) - log(1-delta)) - sens``; non-negative iff b is private."""
    sens = spec.sensitivity(n)
    return b * (spec.epsilon - math.log(delta_C(b, sens, n)) - math.log1p(-spec.delta)) - sens


def calibrate(spec, n, tol=DEFAULTS):
    """Smallest scale b satisfying the privacy condition, by bisection.

    The bracket starts at :func:`necessary_lower_bound` (where the condition
    fails unless the sensitivity equals n) and doubles upward until it holds. The returned value is
    the feasible end of the final bracket, so it always satisfies the
    condition.
    """
    if n < 3:
        raise PrivacyError(f"need n >= 3, got {n}")
    sens = spec.sensitivity(n)
    if sens > n:
        raise InfeasibleCalibration(
            f"sensitivity {sens:g} exceeds the output range n={n}; "
            "the mechanism is only defined for sensitivity <= n"
        )
    lo = necessary_lower_bound(spec, n)
    if calibration_gap(lo, spec, n) >= 0:
        # only when sens == n: dC = 1 and the necessary bound is already sufficient
        return CalibratedMechanism(n=int(n), b=lo, spec=spec, sensitivity=sens)
    hi = 2.0 * lo
    for _ in range(tol.bracket_doublings):
        if calibration_gap(hi, spec, n) >= 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise InfeasibleCalibration("no feasible b found while expanding the bracket")
    while hi - lo > tol.bisect * hi:
        mid = 0.5 * (lo + hi)
        if calibration_gap(mid, spec, n) >= 0:
            hi = mid
        else:
            lo = mid
    return CalibratedMechanism(n=int(n), b=hi, spec=spec, sensitivity=sens)


# ------------------------------------------------------------- sampling


def pdf(x, lam, b, n):
    x = np.asarray(x, dtype=np.float64)
    c = normalizer(lam, b, n)
    inside = (x >= 0) & (x <= n)
    return np.where(inside, np.exp(-np.abs(x - lam) / b) / (2.0 * b * c), 0.0)


def cdf(x, lam, b, n):
    """Piecewise-exponential CDF of the bounded Laplace law."""
    x = np.clip(np.asarray(x, dtype=np.float64), 0.0, n)
    c = normalizer(lam, b, n)
    el = math.exp(-lam / b)
    below = (np.exp(-(lam - np.minimum(x, lam)) / b) - el) / (2.0 * c)
    above = (1.0 - el + 1.0 - np.exp(-(np.maximum(x, lam) - lam) / b)) / (2.0 * c)
    return np.where(x < lam, below, above)


def sample(mech, lam, rng, size=None):
    """Draw from the bounded Laplace law centred at ``lam`` by inverse CDF."""
    lam_arr = np.asarray(lam, dtype=np.float64)
    if np.any(lam_arr < 0) or np.any(lam_arr > mech.n):
        raise PrivacyError(f"lambda outside [0, {mech.n}]")
    if size is None and lam_arr.ndim == 0:
        u = rng.random()
        return float(_kernels.bounded_laplace_icdf(lam_arr, u, mech.b, mech.n))
    shape = size if size is not None else lam_arr.shape
    u = rng.random(shape)
    return _kernels.bounded_laplace_icdf(lam_arr, u, mech.b, mech.n)


def stream(seed, *key):
    """Counter-based generator for the substream ``(seed, *key)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def _compose(spec, k):
    eps, delta = k * spec.epsilon, k * spec.delta
    return eps, delta, bool(eps > DEGENERATE_EPSILON or delta >= 1.0)


def privatize_values(lams, mech, seed):
    """Privatize each entry of ``lams`` with its own stream ``(seed, i)``."""
    u = np.array([stream(seed, i).random() for i in range(len(lams))])
    return _kernels.bounded_laplace_icdf(np.asarray(lams, dtype=np.float64), u, mech.b, mech.n)


def privatize_spectrum(g, spec, seed, sort=False, mech=None):
    """Edge-private release of the whole spectrum.

    lambda_1 = 0 is released exactly; lambda_2..lambda_n each go through an
    independent mechanism, so the composed budget is ``((n-1) eps, (n-1) delta)``.
    """
    if spec.adjacency != "edge":
        raise PrivacyError("node adjacency covers lambda_2 only; use privatize_lambda2")
    if not is_connected(g):
        raise PrivacyError("graph is disconnected")
    mech = mech or calibrate(spec, g.n)
    lam = spectrum(g).values
    noisy = privatize_values(lam[1:], mech, seed)
    vals = np.concatenate([[0.0], noisy])
    if sort:
        vals = np.sort(vals)
    eps, delta, degenerate = _compose(spec, g.n - 1)
    return PrivateRelease(
        n=g.n, values=tuple(float(v) for v in vals), epsilon=spec.epsilon, delta=spec.delta,
        adjacency=spec.adjacency, A=int(spec.A), b=mech.b, composed_epsilon=eps,
        composed_delta=delta, seed=int(seed), sorted=bool(sort), budget_degenerate=degenerate,
    )


def privatize_lambda2(g, spec, seed, mech=None):
    """Single private lambda_2 under either adjacency notion."""
    if not is_connected(g):
        raise PrivacyError("graph is disconnected")
    mech = mech or calibrate(spec, g.n)
    lam2 = spectrum(g).lambda2
    val = privatize_values([lam2], mech, seed)[0]
    eps, delta, degenerate = _compose(spec, 1)
    return PrivateRelease(
        n=g.n, values=(float(val),), epsilon=spec.epsilon, delta=spec.delta,
        adjacency=spec.adjacency, A=int(spec.A) if spec.adjacency == "edge" else 0, b=mech.b,
        composed_epsilon=eps, composed_delta=delta, seed=int(seed), sorted=False,
        budget_degenerate=degenerate,
    )
