"""Diagonal-covariance Gaussian mixtures: EM fitting and AIC/BIC selection."""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

VARIANCE_FLOOR = 1e-6


@dataclass
class GaussianMixture:
    """Mixture of diagonal Gaussians.

    weights sum to 1; every variance is at least VARIANCE_FLOOR.
    """

    weights: np.ndarray    # (M,)
    means: np.ndarray      # (M, d)
    variances: np.ndarray  # (M, d)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, float)
        self.means = np.atleast_2d(np.asarray(self.means, float))
        self.variances = np.atleast_2d(np.asarray(self.variances, float))
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        if np.any(self.variances < VARIANCE_FLOOR):
            raise ValueError(f"variances must be >= {VARIANCE_FLOOR}")

    @property
    def n_components(self):
        return self.means.shape[0]

    @property
    def dim(self):
        return self.means.shape[1]


@dataclass
class FitReport:
    log_likelihood_trace: list
    n_iters: int
    converged: bool
    seed: int


def _check_data(model, X):
    X = np.atleast_2d(np.asarray(X, float))
    if X.size == 0:
        raise ValueError("empty data")
    if X.shape[1] != model.dim:
        raise ValueError(f"data dim {X.shape[1]} != model dim {model.dim}")
    return X


def _log_joint(model, X):
    """(n, M) matrix of log(w_m) + log N(x; mu_m, diag sigma2_m)."""
    inv_var = 1.0 / model.variances  # (M, d)
    log_det = np.sum(np.log(2.0 * np.pi * model.variances), axis=1)  # (M,)
    # expand (x - mu)^2 / var into three matmul-friendly terms
    quad = (
        (X * X) @ inv_var.T
        - 2.0 * X @ (model.means * inv_var).T
        + np.sum(model.means * model.means * inv_var, axis=1)[None, :]
    )
    with np.errstate(divide="ignore"):  # zero weights map to -inf cleanly
        return np.log(model.weights)[None, :] - 0.5 * (log_det[None, :] + quad)


def log_likelihood(model, X):
    """Total log-likelihood of the rows of X under the mixture."""
    X = _check_data(model, X)
    return float(np.sum(logsumexp(_log_joint(model, X), axis=1)))


def responsibilities(model, X):
    """Posterior component probabilities per row; rows sum to 1."""
    X = _check_data(model, X)
    lj = _log_joint(model, X)
    return np.exp(lj - logsumexp(lj, axis=1, keepdims=True))


def fit_em(X, n_components, max_iters=200, tol=1e-4, seed=0):
    """Fit a diagonal GMM by EM from a seeded random-row initialization.

    Means start at n_components distinct data rows, variances at the
    global per-dimension variance, weights uniform.  Stops when the
    log-likelihood gain drops below tol.
    """
    X = np.atleast_2d(np.asarray(X, float))
    n, d = X.shape
    if n < n_components:
        raise ValueError(f"{n} rows cannot support {n_components} components")

    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=n_components, replace=False)
    means = X[idx].copy()
    global_var = X.var(axis=0)
    if np.any(global_var < VARIANCE_FLOOR):
        warnings.warn("near-zero variance dimension; flooring")
    variances = np.tile(np.maximum(global_var, VARIANCE_FLOOR), (n_components, 1))
    weights = np.full(n_components, 1.0 / n_components)
    model = GaussianMixture(weights, means, variances)

    trace = []
    converged = False
    for it in range(max_iters):
        lj = _log_joint(model, X)
        norm = logsumexp(lj, axis=1, keepdims=True)
        trace.append(float(norm.sum()))
        resp = np.exp(lj - norm)  # (n, M)

        nk = resp.sum(axis=0)  # (M,)
        nk = np.maximum(nk, 1e-300)
        means = resp.T @ X / nk[:, None]
        sq = resp.T @ (X * X) / nk[:, None]
        variances = np.maximum(sq - means * means, VARIANCE_FLOOR)
        weights = nk / nk.sum()
        model = GaussianMixture(weights, means, variances)

        if len(trace) >= 2 and trace[-1] - trace[-2] < tol:
            converged = True
            break

    return model, FitReport(trace, len(trace), converged, seed)


def n_params(model):
    """Free parameters: (M-1) weights + M*d means + M*d variances."""
    m, d = model.n_components, model.dim
    return m * (2 * d + 1) - 1


def aic(model, X):
    """Akaike information criterion: 2k - 2*LL (lower is better)."""
    return 2.0 * n_params(model) - 2.0 * log_likelihood(model, X)


def bic(model, X):
    """Bayesian information criterion: k*ln(n) - 2*LL (lower is better)."""
    X = _check_data(model, X)
    return n_params(model) * np.log(X.shape[0]) - 2.0 * log_likelihood(model, X)


def select_n_components(X, m_lo, m_hi, criterion="bic", max_iters=200,
                        tol=1e-4, seed=0, n_init=3):
    """Fit each candidate component count and pick the criterion argmin.

    Returns (best_m, curve) where curve rows are (m, aic, bic).  Each
    candidate runs n_init seeded EM restarts (seeds derived from the
    shared base seed) and keeps the best-likelihood fit; random-row
    initialization alone lands in bad local optima too often for
    reliable count selection.  Ties go to the smaller component count.
    """
    if criterion not in ("aic", "bic"):
        raise ValueError(f"unknown criterion {criterion!r}")
    if m_lo < 1 or m_hi < m_lo:
        raise ValueError("need 1 <= m_lo <= m_hi")
    X = np.atleast_2d(np.asarray(X, float))
    if X.shape[0] < m_hi:
        raise ValueError("fewer rows than the largest candidate count")

    curve = []
    best_m, best_score = None, np.inf
    for m in range(m_lo, m_hi + 1):
        model = None
        model_ll = -np.inf
        for r in range(n_init):
            cand, _ = fit_em(X, m, max_iters=max_iters, tol=tol,
                             seed=seed + m + 1000 * r)
            ll = log_likelihood(cand, X)
            if ll > model_ll:
                model, model_ll = cand, ll
        a, b = aic(model, X), bic(model, X)
        curve.append((m, a, b))
        score = a if criterion == "aic" else b
        if score < best_score:
            best_m, best_score = m, score
    return best_m, curve


def write_gmm(model, sink):
    """Serialize as versioned flat text, round-trippable bit-faithfully."""
    sink.write(f"gmm v1 {model.n_components} {model.dim}\n")
    fmt = lambda row: " ".join(f"{v:.17g}" for v in row)
    sink.write(fmt(model.weights) + "\n")
    for row in model.means:
        sink.write(fmt(row) + "\n")
    for row in model.variances:
        sink.write(fmt(row) + "\n")


def read_gmm(source):
    """Inverse of write_gmm."""
    lines = [ln for ln in source.read().splitlines() if ln.strip()]
    head = lines[0].split()
    if head[:2] != ["gmm", "v1"]:
        raise ValueError("not a gmm v1 file")
    m, d = int(head[2]), int(head[3])
    weights = np.array([float(v) for v in lines[1].split()])
    means = np.array([[float(v) for v in lines[2 + i].split()] for i in range(m)])
    variances = np.array(
        [[float(v) for v in lines[2 + m + i].split()] for i in range(m)]
    )
    if means.shape != (m, d) or variances.shape != (m, d):
        raise ValueError("inconsistent gmm file dimensions")
    return GaussianMixture(weights, means, variances)
