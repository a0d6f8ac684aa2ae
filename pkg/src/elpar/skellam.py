"""Skellam distribution primitives for goal-differential models.

The difference Z = X - Y of two independent Poisson counts X ~ Pois(lambda1),
Y ~ Pois(lambda2) follows a Skellam distribution with

    P(Z = z) = exp(-(lambda1 + lambda2)) * (lambda1 / lambda2) ** (z / 2)
               * I_|z|(2 * sqrt(lambda1 * lambda2))

where I_v is the modified Bessel function of the first kind.  Everything here
works in log space so the PMF stays usable far into the tails and for
extreme rates.  The Bessel term uses the power series for moderate arguments
and switches to asymptotic expansions for large ones to keep evaluation cost
bounded.

poisson_diff_oracle computes the same PMF by direct convolution of the two
Poisson laws, never touching the Bessel path.  It exists so tests can pin the
two routes against each other; production code should not call it.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import DomainError, OraclePrecisionError

__all__ = [
    "SkellamParams",
    "OutcomeProbs",
    "log_bessel_i",
    "skellam_log_pmf",
    "skellam_log_pmf_raw",
    "poisson_diff_oracle",
    "outcome_probs",
    "outcome_probs_batch",
    "dispersion_statistic",
    "support_bound",
]

_SERIES_TOL = 1e-18
_SERIES_MAX_X = 50.0
_RENORM_LIMIT = 1e280
_LOG_RENORM = math.log(_RENORM_LIMIT)


@dataclasses.dataclass(frozen=True)
class SkellamParams:
    """Rates of the two Poisson components; both strictly positive."""

    lambda1: float
    lambda2: float

    def __post_init__(self) -> None:
        for name in ("lambda1", "lambda2"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise DomainError(f"{name} must be positive and finite, got {value!r}")

    @property
    def mean(self) -> float:
        return self.lambda1 - self.lambda2

    @property
    def variance(self) -> float:
        return self.lambda1 + self.lambda2


@dataclasses.dataclass(frozen=True)
class OutcomeProbs:
    """Win / draw / loss probabilities from the first team's perspective."""

    p_win: float
    p_draw: float
    p_loss: float

    def as_dict(self) -> dict[str, float]:
        return {"p_win": self.p_win, "p_draw": self.p_draw, "p_loss": self.p_loss}


# ---------------------------------------------------------------------------
# modified Bessel function of the first kind, log scale
# ---------------------------------------------------------------------------

def _log_iv_series(order: int, x: float) -> float:
    # I_v(x) = sum_k (x/2)^(2k+v) / (k! (k+v)!).  Terms are accumulated
    # relative to the k = 0 term via the exact ratio recurrence; the running
    # sum is renormalized if it approaches the float ceiling so the routine
    # stays valid for any x, not just the fast region.
    half = 0.5 * x
    q = half * half
    total = 1.0
    term = 1.0
    shift = 0.0
    k = 0.0
    while True:
        term *= q / ((k + 1.0) * (k + 1.0 + order))
        total += term
        k += 1.0
        if term < _SERIES_TOL * total:
            break
        if total > _RENORM_LIMIT:
            total /= _RENORM_LIMIT
            term /= _RENORM_LIMIT
            shift += _LOG_RENORM
    return order * math.log(half) - math.lgamma(order + 1.0) + shift + math.log(total)


def _log_iv_large_argument(order: int, x: float) -> float:
    # Asymptotic expansion in 1/x, accurate once x dominates 4 * order^2:
    # I_v(x) ~ e^x / sqrt(2 pi x) * [1 - (mu-1)/(8x) + ...], mu = 4 v^2.
    mu = 4.0 * order * order
    total = 1.0
    term = 1.0
    for k in range(1, 60):
        nxt = term * -(mu - (2.0 * k - 1.0) ** 2) / (8.0 * k * x)
        if abs(nxt) >= abs(term):
            break  # divergent tail of the asymptotic series
        term = nxt
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return x - 0.5 * math.log(2.0 * math.pi * x) + math.log(total)


# Polynomials U_k(t) of the uniform large-order expansion, stored as
# coefficient tuples for powers t^k, t^(k+2), ..., t^(3k).
_UNIFORM_POLYS = (
    (1.0 / 8, -5.0 / 24),
    (9.0 / 128, -77.0 / 192, 385.0 / 1152),
    (75.0 / 1024, -4563.0 / 5120, 17017.0 / 9216, -85085.0 / 82944),
    (
        4465125.0 / 39813120,
        -94121676.0 / 39813120,
        349922430.0 / 39813120,
        -446185740.0 / 39813120,
        185910725.0 / 39813120,
    ),
    (
        1519035525.0 / 6688604160,
        -49286948607.0 / 6688604160,
        284499769554.0 / 6688604160,
        -614135872350.0 / 6688604160,
        566098157625.0 / 6688604160,
        -188699385875.0 / 6688604160,
    ),
    (
        2757049477875.0 / 4815794995200,
        -127577298354750.0 / 4815794995200,
        1050760774457901.0 / 4815794995200,
        -3369032068261860.0 / 4815794995200,
        5104696716244125.0 / 4815794995200,
        -3685299006138750.0 / 4815794995200,
        1023694168371875.0 / 4815794995200,
    ),
)


def _log_iv_large_order(order: int, x: float) -> float:
    # Uniform expansion I_v(v z) ~ e^(v eta) / (sqrt(2 pi v) (1+z^2)^(1/4))
    # * sum_k U_k(t) / v^k with t = 1/sqrt(1+z^2); valid for large order at
    # any argument ratio.
    v = float(order)
    z = x / v
    root = math.sqrt(1.0 + z * z)
    eta = root + math.log(z / (1.0 + root))
    t = 1.0 / root
    t2 = t * t
    total = 1.0
    scale = 1.0
    tpow = 1.0
    for coeffs in _UNIFORM_POLYS:
        scale /= v
        tpow *= t
        poly = 0.0
        power = tpow
        for c in coeffs:
            poly += c * power
            power *= t2
        total += poly * scale
    return v * eta - 0.5 * math.log(2.0 * math.pi * v) - 0.25 * math.log(1.0 + z * z) + math.log(total)


def log_bessel_i(order: int, x: float) -> float:
    """Natural log of I_order(x) for integer order >= 0 and x >= 0.

    Uses the power series up to x = 50 and asymptotic expansions beyond, so
    no intermediate quantity overflows even for x in the thousands.
    """
    if order != int(order) or order < 0:
        raise DomainError(f"order must be a nonnegative integer, got {order!r}")
    order = int(order)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    if x < 0.0:
        raise DomainError(f"x must be nonnegative, got {x!r}")
    if x == 0.0:
        return 0.0 if order == 0 else -math.inf
    if x <= _SERIES_MAX_X:
        return _log_iv_series(order, x)
    if 4.0 * order * order <= x:
        return _log_iv_large_argument(order, x)
    if order >= 25:
        return _log_iv_large_order(order, x)
    # between the two asymptotic regimes the series is still exact and,
    # since x < 4 * 25^2 here, needs at most a few thousand terms
    return _log_iv_series(order, x)


def _log_iv_elementwise(orders: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Vectorized log I_v over aligned integer orders and arguments."""
    orders = np.asarray(orders)
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape)
    zero = x == 0.0
    if zero.any():
        out[zero] = np.where(orders[zero] == 0, 0.0, -np.inf)
    small = (x > 0.0) & (x <= _SERIES_MAX_X)
    if small.any():
        v = orders[small].astype(float)
        half = 0.5 * x[small]
        q = half * half
        total = np.ones_like(q)
        term = np.ones_like(q)
        k = 0.0
        while True:
            term = term * (q / ((k + 1.0) * (k + 1.0 + v)))
            total += term
            k += 1.0
            if not (term >= _SERIES_TOL * total).any():
                break
        lgam = np.array([math.lgamma(i + 1.0) for i in range(int(orders[small].max()) + 1)])
        out[small] = v * np.log(half) + lgam[np.asarray(orders[small], dtype=int)] * -1.0 + np.log(total)
    large = x > _SERIES_MAX_X
    if large.any():
        idx = np.nonzero(large.ravel())[0]
        flat_o = orders.ravel()
        flat_x = x.ravel()
        flat_out = out.ravel()
        for i in idx:
            flat_out[i] = log_bessel_i(int(flat_o[i]), float(flat_x[i]))
        out = flat_out.reshape(x.shape)
    return out


def _log_iv_grid(orders: np.ndarray, x: np.ndarray) -> np.ndarray:
    """log I_v for every (argument, order) pair; shape (len(x), len(orders))."""
    xs = np.asarray(x, dtype=float)[:, None]
    vs = np.broadcast_to(np.asarray(orders), (xs.shape[0], len(orders)))
    return _log_iv_elementwise(vs, np.broadcast_to(xs, vs.shape))


# ---------------------------------------------------------------------------
# Skellam PMF
# ---------------------------------------------------------------------------

def _poisson_log_pmf(k: int, lam: float) -> float:
    if k < 0:
        return -math.inf
    if lam == 0.0:
        return 0.0 if k == 0 else -math.inf
    return k * math.log(lam) - lam - math.lgamma(k + 1.0)


def _check_rate(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise DomainError(f"{name} must be finite and nonnegative, got {value!r}")
    return value


def skellam_log_pmf_raw(z: int, lambda1: float, lambda2: float) -> float:
    """log P(Z = z) for rates given directly; rates may be zero.

    With one rate at zero the difference degenerates to a (reflected) Poisson
    count, which is handled explicitly instead of through the Bessel term.
    """
    if z != int(z):
        raise DomainError(f"z must be an integer, got {z!r}")
    z = int(z)
    lambda1 = _check_rate("lambda1", lambda1)
    lambda2 = _check_rate("lambda2", lambda2)
    if lambda1 == 0.0 and lambda2 == 0.0:
        return 0.0 if z == 0 else -math.inf
    if lambda2 == 0.0:
        return _poisson_log_pmf(z, lambda1)
    if lambda1 == 0.0:
        return _poisson_log_pmf(-z, lambda2)
    s = 2.0 * math.sqrt(lambda1 * lambda2)
    return (
        -(lambda1 + lambda2)
        + 0.5 * z * (math.log(lambda1) - math.log(lambda2))
        + log_bessel_i(abs(z), s)
    )


def skellam_log_pmf(z: int, params: SkellamParams) -> float:
    """log P(Z = z) under the given rate pair."""
    return skellam_log_pmf_raw(z, params.lambda1, params.lambda2)


def poisson_diff_oracle(z: int, lambda1: float, lambda2: float, truncation: int = 200) -> float:
    """P(Z = z) by direct convolution: sum_k P(X = k + z) P(Y = k).

    Independent of the Bessel implementation by construction.  Raises if the
    final summand is still above 1e-15, i.e. the truncation was too short for
    these rates.
    """
    if z != int(z):
        raise DomainError(f"z must be an integer, got {z!r}")
    z = int(z)
    lambda1 = _check_rate("lambda1", lambda1)
    lambda2 = _check_rate("lambda2", lambda2)
    if truncation < 1:
        raise DomainError("truncation must be at least 1")
    total = 0.0
    last = 0.0
    for k in range(max(0, -z), truncation + 1):
        last = math.exp(_poisson_log_pmf(k + z, lambda1) + _poisson_log_pmf(k, lambda2))
        total += last
    if last > 1e-15:
        raise OraclePrecisionError(
            f"truncation {truncation} too small for rates ({lambda1}, {lambda2}): "
            f"final summand {last:.3e}"
        )
    return total


# ---------------------------------------------------------------------------
# outcome probabilities
# ---------------------------------------------------------------------------

def support_bound(lambda1: float, lambda2: float) -> int:
    """Half-width of the goal-difference support used for tail sums.

    Twelve standard deviations past the mean difference leaves well under
    1e-9 of mass outside; a floor of 30 covers tiny rates.
    """
    spread = abs(lambda1 - lambda2) + 12.0 * math.sqrt(lambda1 + lambda2)
    return max(30, int(math.ceil(spread)))


def outcome_probs(params: SkellamParams) -> OutcomeProbs:
    """Win / draw / loss probabilities, renormalized to sum to one exactly.

    Win is P(Z > 0), draw P(Z = 0), loss P(Z < 0).  The two tails accumulate
    in mirrored order, so swapping the rates swaps win and loss exactly.
    """
    zmax = support_bound(params.lambda1, params.lambda2)
    p_draw = math.exp(skellam_log_pmf(0, params))
    p_win = 0.0
    p_loss = 0.0
    for z in range(1, zmax + 1):
        p_win += math.exp(skellam_log_pmf(z, params))
        p_loss += math.exp(skellam_log_pmf(-z, params))
    # fsum is order-independent, keeping the renormalized swap exact too
    total = math.fsum((p_win, p_draw, p_loss))
    return OutcomeProbs(p_win / total, p_draw / total, p_loss / total)


def outcome_probs_batch(
    lambda1: np.ndarray, lambda2: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized outcome probabilities for aligned rate arrays.

    Returns (p_win, p_draw, p_loss) arrays; agrees with outcome_probs on
    every element up to summation-order rounding.
    """
    l1 = np.asarray(lambda1, dtype=float)
    l2 = np.asarray(lambda2, dtype=float)
    if l1.shape != l2.shape:
        raise DomainError("rate arrays must have the same shape")
    if not (np.isfinite(l1).all() and np.isfinite(l2).all()):
        raise DomainError("rates must be finite")
    if (l1 <= 0).any() or (l2 <= 0).any():
        raise DomainError("rates must be strictly positive")
    zmax = max(support_bound(float(a), float(b)) for a, b in zip(l1.ravel(), l2.ravel()))
    orders = np.arange(zmax + 1)
    s = 2.0 * np.sqrt(l1 * l2)
    log_iv = _log_iv_grid(orders, s.ravel())
    base = -(l1 + l2).ravel()[:, None]
    half_diff = (0.5 * (np.log(l1) - np.log(l2))).ravel()[:, None]
    lp_pos = base + half_diff * orders[None, :] + log_iv
    lp_neg = base - half_diff * orders[None, :] + log_iv
    p_draw = np.exp(lp_pos[:, 0])
    p_win = np.exp(lp_pos[:, 1:]).sum(axis=1)
    p_loss = np.exp(lp_neg[:, 1:]).sum(axis=1)
    total = p_win + p_draw + p_loss
    shape = l1.shape
    return (
        (p_win / total).reshape(shape),
        (p_draw / total).reshape(shape),
        (p_loss / total).reshape(shape),
    )


# ---------------------------------------------------------------------------
# dispersion
# ---------------------------------------------------------------------------

def dispersion_statistic(counts) -> float:
    """Variance-to-mean ratio estimate sum((y - ybar)^2 / ybar) / (n - 1).

    Values near 1 are consistent with Poisson counts; materially above 1
    indicates overdispersion.
    """
    arr = np.asarray(counts, dtype=float)
    if arr.ndim != 1:
        raise DomainError("counts must be one-dimensional")
    if arr.size < 2:
        raise DomainError("need at least two counts")
    if (arr < 0).any():
        raise DomainError("counts must be nonnegative")
    mean = float(arr.mean())
    if mean <= 0.0:
        raise DomainError("mean count must be positive")
    return float(np.sum((arr - mean) ** 2 / mean) / (arr.size - 1))
