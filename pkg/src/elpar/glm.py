"""Skellam regression of goal differentials on line-level rating differences.

Each match contributes one observation: the home-minus-away difference in
average overall rating per line (defense, midfield, attack, goalkeeper) and
the home-minus-away goal count.  Both Poisson rates get a log link onto the
same four features plus an intercept:

    log lambda1 = b1 . (1, x)        log lambda2 = b2 . (1, x)

and the coefficients maximize the Skellam likelihood of the observed goal
differences.  Fitting is a plain BFGS with backtracking line search and an
analytic gradient; everything is deterministic, including summation order,
so refits on permuted data reproduce coefficients bit for bit.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import (
    CollinearityError,
    DegenerateDataError,
    DomainError,
    IllConditionedFitError,
    InsufficientDataError,
    NotConvergedError,
)
from .skellam import OutcomeProbs, SkellamParams, _log_iv_elementwise, outcome_probs

__all__ = [
    "FeatureVector",
    "FitConfig",
    "SkellamGlmModel",
    "FEATURE_ORDER",
    "negative_log_likelihood",
    "nll_gradient",
    "fit",
    "standard_errors",
    "predict_lambdas",
    "predict_outcome",
]

FEATURE_ORDER = ("x_def", "x_mid", "x_att", "x_gk")

_FEATURE_BOUND = 100.0
_MIN_OBSERVATIONS = 50
_GRAM_CONDITION_LIMIT = 1e10
_LINEAR_PREDICTOR_CAP = 690.0  # exp() overflows just past 709
_HESSIAN_STEP = 1e-4
_ARMIJO_C1 = 1e-4


@dataclasses.dataclass(frozen=True)
class FeatureVector:
    """Per-line rating differences for one match, home minus away."""

    x_def: float
    x_mid: float
    x_att: float
    x_gk: float

    def __post_init__(self) -> None:
        for name in FEATURE_ORDER:
            value = getattr(self, name)
            if not math.isfinite(value) or abs(value) > _FEATURE_BOUND:
                raise DomainError(
                    f"{name} must be finite with |value| <= {_FEATURE_BOUND:g}, got {value!r}"
                )

    def as_array(self) -> np.ndarray:
        return np.array([self.x_def, self.x_mid, self.x_att, self.x_gk])


@dataclasses.dataclass(frozen=True)
class FitConfig:
    """Fitting knobs; defaults converge on every dataset we generate."""

    max_iterations: int = 200
    gradient_tolerance: float = 1e-6
    initial_coefficients: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    seed: int = 0  # reserved for stochastic restarts; current fit path is deterministic

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be positive")
        if not (0.0 < self.gradient_tolerance < 1.0):
            raise DomainError("gradient_tolerance must lie in (0, 1)")


@dataclasses.dataclass
class SkellamGlmModel:
    """Fitted coefficient pair with uncertainty and fit diagnostics.

    b1/b2 and se1/se2 are length-5 arrays ordered (intercept, x_def, x_mid,
    x_att, x_gk).  Standard errors are +inf for coordinates the data carry
    no information about (identically zero feature columns).
    """

    b1: np.ndarray
    b2: np.ndarray
    se1: np.ndarray
    se2: np.ndarray
    n_obs: int
    final_nll: float
    converged: bool

    def __post_init__(self) -> None:
        self.b1 = np.asarray(self.b1, dtype=float)
        self.b2 = np.asarray(self.b2, dtype=float)
        self.se1 = np.asarray(self.se1, dtype=float)
        self.se2 = np.asarray(self.se2, dtype=float)
        for name in ("b1", "b2", "se1", "se2"):
            if getattr(self, name).shape != (5,):
                raise DomainError(f"{name} must have length 5")
        if not (np.isfinite(self.b1).all() and np.isfinite(self.b2).all()):
            raise DomainError("coefficients must be finite")
        if (self.se1 < 0).any() or (self.se2 < 0).any():
            raise DomainError("standard errors must be nonnegative")
        if self.n_obs < 0:
            raise DomainError("n_obs must be nonnegative")


# ---------------------------------------------------------------------------
# likelihood
# ---------------------------------------------------------------------------

def _design(data) -> tuple[np.ndarray, np.ndarray]:
    if len(data) == 0:
        raise InsufficientDataError("empty dataset")
    rows = np.empty((len(data), 5))
    diffs = np.empty(len(data))
    for i, (features, goal_diff) in enumerate(data):
        if goal_diff != int(goal_diff):
            raise DomainError(f"goal difference must be an integer, got {goal_diff!r}")
        rows[i, 0] = 1.0
        rows[i, 1:] = features.as_array()
        diffs[i] = int(goal_diff)
    return rows, diffs


def _stable_sum(values: np.ndarray) -> float:
    # fsum returns the correctly rounded true sum, which makes the reduction
    # independent of observation order and exactly additive under dataset
    # duplication; plain (pairwise) summation guarantees neither
    return math.fsum(values.tolist())


def _stable_column_sums(matrix: np.ndarray) -> np.ndarray:
    return np.array([math.fsum(matrix[:, j].tolist()) for j in range(matrix.shape[1])])


def _check_coefficients(b1, b2) -> np.ndarray:
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    if b1.shape != (5,) or b2.shape != (5,):
        raise DomainError("coefficient vectors must have length 5")
    if not (np.isfinite(b1).all() and np.isfinite(b2).all()):
        raise DomainError("coefficients must be finite")
    return np.concatenate([b1, b2])


def _nll(theta: np.ndarray, X: np.ndarray, z: np.ndarray) -> float:
    eta1 = X @ theta[:5]
    eta2 = X @ theta[5:]
    if max(eta1.max(), eta2.max()) > _LINEAR_PREDICTOR_CAP:
        return math.inf  # rates this size are off the representable scale
    l1 = np.exp(eta1)
    l2 = np.exp(eta2)
    s = 2.0 * np.sqrt(l1 * l2)
    log_iv = _log_iv_elementwise(np.abs(z).astype(int), s)
    log_pmf = -(l1 + l2) + 0.5 * z * (eta1 - eta2) + log_iv
    if not np.isfinite(log_pmf).all():
        return math.inf
    return -_stable_sum(log_pmf)


def _nll_gradient(theta: np.ndarray, X: np.ndarray, z: np.ndarray) -> np.ndarray:
    eta1 = X @ theta[:5]
    eta2 = X @ theta[5:]
    l1 = np.exp(eta1)
    l2 = np.exp(eta2)
    s = 2.0 * np.sqrt(l1 * l2)
    v = np.abs(z).astype(int)
    log_mid = _log_iv_elementwise(v, s)
    log_low = _log_iv_elementwise(np.abs(v - 1), s)
    log_high = _log_iv_elementwise(v + 1, s)
    # d/ds log I_v(s) = (I_{v-1}(s) + I_{v+1}(s)) / (2 I_v(s)); what enters
    # the chain rule is that ratio times s/2 = sqrt(l1 l2), whose log is
    # (eta1 + eta2)/2 exactly
    log_half_s = 0.5 * (eta1 + eta2)
    bessel_pull = 0.5 * (
        np.exp(log_half_s + log_low - log_mid) + np.exp(log_half_s + log_high - log_mid)
    )
    c1 = -l1 + 0.5 * z + bessel_pull
    c2 = -l2 - 0.5 * z + bessel_pull
    g1 = -_stable_column_sums(X * c1[:, None])
    g2 = -_stable_column_sums(X * c2[:, None])
    return np.concatenate([g1, g2])


def negative_log_likelihood(b1, b2, data) -> float:
    """Total NLL of the dataset under the given coefficient pair."""
    theta = _check_coefficients(b1, b2)
    X, z = _design(data)
    return _nll(theta, X, z)


def nll_gradient(b1, b2, data) -> np.ndarray:
    """Analytic NLL gradient, length 10: d/db1 then d/db2."""
    theta = _check_coefficients(b1, b2)
    X, z = _design(data)
    return _nll_gradient(theta, X, z)


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------

def _guard_design(X: np.ndarray, z: np.ndarray) -> None:
    if X.shape[0] < _MIN_OBSERVATIONS:
        raise InsufficientDataError(
            f"need at least {_MIN_OBSERVATIONS} observations, got {X.shape[0]}"
        )
    constant_features = [
        j for j in range(1, 5) if np.all(X[:, j] == X[0, j])
    ]
    if len(constant_features) == 4 and np.all(z == z[0]):
        raise DegenerateDataError(
            "all goal differences identical with constant features: "
            "the likelihood has no interior maximum"
        )
    # identically zero columns carry no information but are harmless; any
    # other near-dependence among the active columns is a modeling error
    active = [0] + [j for j in range(1, 5) if not np.all(X[:, j] == 0.0)]
    gram = X[:, active].T @ X[:, active]
    condition = np.linalg.cond(gram)
    if not np.isfinite(condition) or condition > _GRAM_CONDITION_LIMIT:
        raise CollinearityError(
            f"design matrix condition number {condition:.3e} exceeds "
            f"{_GRAM_CONDITION_LIMIT:.0e}; features are collinear"
        )


def _initial_theta(config: FitConfig, z: np.ndarray) -> np.ndarray:
    if config.initial_coefficients is not None:
        b1, b2 = config.initial_coefficients
        return _check_coefficients(b1, b2)
    # method of moments on the marginal difference: mean = l1 - l2,
    # variance = l1 + l2; slopes start at zero
    mean = float(z.mean())
    var = max(float(z.var()), 0.1)
    l1 = max((var + mean) / 2.0, 0.05)
    l2 = max((var - mean) / 2.0, 0.05)
    theta = np.zeros(10)
    theta[0] = math.log(l1)
    theta[5] = math.log(l2)
    return theta


def fit(data, config: FitConfig | None = None) -> SkellamGlmModel:
    """Maximum-likelihood fit of the coefficient pair.

    BFGS on the joint 10-vector with Armijo backtracking.  Converged means
    the gradient norm fell under the configured tolerance; if the iteration
    budget runs out first the model is returned with converged=False and
    whatever coefficients the last step reached.
    """
    config = config or FitConfig()
    X, z = _design(data)
    _guard_design(X, z)

    theta = _initial_theta(config, z)
    n_params = theta.size
    inv_hessian = np.eye(n_params)
    value = _nll(theta, X, z)
    if not math.isfinite(value):
        raise DomainError("likelihood not finite at the starting point")
    gradient = _nll_gradient(theta, X, z)
    converged = False
    first_step = True

    for _ in range(config.max_iterations):
        grad_norm = float(np.linalg.norm(gradient))
        if grad_norm < config.gradient_tolerance:
            converged = True
            break
        direction = -inv_hessian @ gradient
        slope = float(direction @ gradient)
        if slope >= 0.0:  # curvature information went stale; restart
            inv_hessian = np.eye(n_params)
            direction = -gradient
            slope = -grad_norm**2
        step = 1.0 if not first_step else min(1.0, 1.0 / max(grad_norm, 1.0))
        new_theta = theta
        new_value = value
        while True:
            candidate = theta + step * direction
            candidate_value = _nll(candidate, X, z)
            if candidate_value <= value + _ARMIJO_C1 * step * slope:
                new_theta, new_value = candidate, candidate_value
                break
            step *= 0.5
            if step < 1e-20:
                break
        if step < 1e-20:
            break  # line search stalled; report non-convergence
        new_gradient = _nll_gradient(new_theta, X, z)
        delta_theta = new_theta - theta
        delta_grad = new_gradient - gradient
        curvature = float(delta_theta @ delta_grad)
        if first_step and curvature > 0.0:
            inv_hessian *= curvature / float(delta_grad @ delta_grad)
            first_step = False
        if curvature > 1e-12 * float(
            np.linalg.norm(delta_theta) * np.linalg.norm(delta_grad)
        ):
            rho = 1.0 / curvature
            outer = np.outer(delta_theta, delta_grad)
            left = np.eye(n_params) - rho * outer
            inv_hessian = left @ inv_hessian @ left.T + rho * np.outer(
                delta_theta, delta_theta
            )
        theta, value, gradient = new_theta, new_value, new_gradient

    else:
        grad_norm = float(np.linalg.norm(gradient))
        converged = grad_norm < config.gradient_tolerance

    se1 = np.zeros(5)
    se2 = np.zeros(5)
    model = SkellamGlmModel(
        b1=theta[:5].copy(),
        b2=theta[5:].copy(),
        se1=se1,
        se2=se2,
        n_obs=X.shape[0],
        final_nll=value,
        converged=converged,
    )
    if converged:
        errors = standard_errors(model, data)
        model.se1 = errors[:5]
        model.se2 = errors[5:]
    return model


def standard_errors(model: SkellamGlmModel, data) -> np.ndarray:
    """Asymptotic standard errors from the inverse observed information.

    The Hessian comes from central differences of the analytic gradient
    (step 1e-4), symmetrized before inversion.  Coordinates with no sample
    information (identically zero feature columns) get +inf.
    """
    X, z = _design(data)
    theta = np.concatenate([model.b1, model.b2])
    n = theta.size
    hessian = np.empty((n, n))
    for i in range(n):
        bumped = theta.copy()
        bumped[i] = theta[i] + _HESSIAN_STEP
        upper = _nll_gradient(bumped, X, z)
        bumped[i] = theta[i] - _HESSIAN_STEP
        lower = _nll_gradient(bumped, X, z)
        hessian[:, i] = (upper - lower) / (2.0 * _HESSIAN_STEP)
    hessian = 0.5 * (hessian + hessian.T)

    inert = np.zeros(n, dtype=bool)
    for j in range(1, 5):
        if np.all(X[:, j] == 0.0):
            inert[j] = True
            inert[5 + j] = True
    active = ~inert
    block = hessian[np.ix_(active, active)]
    condition = np.linalg.cond(block)
    if not np.isfinite(condition) or condition > 1e12:
        raise IllConditionedFitError(
            f"observed information is singular (condition {condition:.3e})"
        )
    covariance = np.linalg.inv(block)
    diag = np.diag(covariance)
    if (diag <= 0).any():
        raise IllConditionedFitError("observed information is not positive definite")
    errors = np.full(n, np.inf)
    errors[active] = np.sqrt(diag)
    return errors


# ---------------------------------------------------------------------------
# prediction
# ---------------------------------------------------------------------------

def _require_converged(model: SkellamGlmModel) -> None:
    if not model.converged:
        raise NotConvergedError("model did not converge; refusing to predict")


def predict_lambdas(model: SkellamGlmModel, features: FeatureVector) -> SkellamParams:
    """Rate pair for one feature vector under the fitted model."""
    _require_converged(model)
    row = np.concatenate([[1.0], features.as_array()])
    return SkellamParams(
        float(np.exp(row @ model.b1)), float(np.exp(row @ model.b2))
    )


def predict_lambdas_batch(
    model: SkellamGlmModel, feature_rows: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Rate arrays for a (n, 4) feature matrix."""
    _require_converged(model)
    rows = np.asarray(feature_rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != 4:
        raise DomainError("feature matrix must have shape (n, 4)")
    X = np.hstack([np.ones((rows.shape[0], 1)), rows])
    return np.exp(X @ model.b1), np.exp(X @ model.b2)


def predict_outcome(model: SkellamGlmModel, features: FeatureVector) -> OutcomeProbs:
    """Win/draw/loss probabilities for one feature vector."""
    return outcome_probs(predict_lambdas(model, features))
