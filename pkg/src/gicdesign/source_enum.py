"""Estimating the number of signals from multi-sensor samples.

Given p sensors and n snapshots collected in a p x n matrix Y, the number of
signals is estimated by penalized likelihood over the eigenvalues of the
sample covariance matrix (1/n) Y Yᴴ.  The likelihood term at candidate order
k is the classical eigenvalue-ratio form (Wax-Kailath):

    -2 ln f = -2 n (p-k) ln( g_k / a_k )

with g_k and a_k the geometric and arithmetic means of the p-k smallest
eigenvalues, and phi(k) = k(2p-k) + 1 free parameters.

The high-SNR probability of overestimation depends only on the noise
eigenvalues, which behave like a white complex Wishart spectrum.  The
pairwise comparison of orders q and q+1 reduces to a threshold test on
u = l1/t for the (p-q)-dimensional noise block, giving a closed route from
penalty weight to overestimation probability and back.  The designer walks
that route in reverse: pick the u-quantile at the target probability, invert
the threshold equation for nu at each candidate true order, and keep the
worst case.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .criteria import LikelihoodProfile, PenaltyRule, SelectionResult, select_order
from .wishart import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    ShiftedGamma,
    WishartSpec,
    u_model,
)

__all__ = [
    "DesignError",
    "EnumDesignResult",
    "scm_eigenvalues",
    "wk_minus2loglik",
    "enum_free_params",
    "enum_profile",
    "estimate_num_signals",
    "overest_threshold",
    "ratio_root",
    "pover_highsnr",
    "design_nu_enum",
]


class DesignError(ValueError):
    """Raised when a requested penalty design is infeasible."""


def _check_batch(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=complex)
    if y.ndim != 2:
        raise ValueError(f"sensor batch must be 2-d (p x n), got shape {y.shape}")
    p, n = y.shape
    if p < 2:
        raise ValueError(f"need at least 2 sensors, got p={p}")
    if n < p:
        raise ValueError(f"need n >= p snapshots for a full-rank SCM, got p={p}, n={n}")
    if not np.all(np.isfinite(y)):
        raise ValueError("sensor batch contains non-finite entries")
    return y


def scm_eigenvalues(y: np.ndarray) -> np.ndarray:
    """Eigenvalues of the sample covariance matrix (1/n) Y Yᴴ, descending.

    Parameters
    ----------
    y : array, shape (p, n)
        Complex sensor batch: p sensors, n snapshots.

    Returns
    -------
    array, shape (p,)
        Nonnegative eigenvalues sorted in descending order.  Tiny negative
        rounding is clipped to zero (the SCM is PSD by construction).
    """
    y = _check_batch(y)
    n = y.shape[1]
    scm = (y @ y.conj().T) / n
    vals = np.linalg.eigvalsh(scm)
    return np.maximum(vals[::-1], 0.0)


def wk_minus2loglik(eigs: np.ndarray, k: int, n: int) -> float:
    """Eigenvalue likelihood term -2n(p-k) ln(g_k / a_k) at candidate order k.

    g_k and a_k are the geometric and arithmetic means of the p-k smallest
    eigenvalues.  Nonnegative by the AM-GM inequality; zero when the tail is
    a single eigenvalue (k = p-1) or when the tail is flat.  A zero tail
    eigenvalue with k < p-1 signals a degenerate SCM and returns +inf so the
    hypothesis is never selected.
    """
    eigs = np.asarray(eigs, dtype=float)
    p = eigs.size
    if not 0 <= k <= p - 1:
        raise ValueError(f"order k must be in [0, {p - 1}], got {k}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if k == p - 1:
        return 0.0
    tail = eigs[k:]
    if np.any(tail <= 0):
        return math.inf
    ln_g = float(np.mean(np.log(tail)))
    ln_a = float(np.log(np.mean(tail)))
    return max(-2.0 * n * (p - k) * (ln_g - ln_a), 0.0)


def enum_free_params(k: int, p: int) -> int:
    """Free parameter count phi(k) = k(2p-k) + 1 for the k-signal hypothesis."""
    if not 0 <= k <= p - 1:
        raise ValueError(f"order k must be in [0, {p - 1}], got {k}")
    return k * (2 * p - k) + 1


def enum_profile(eigs: np.ndarray, n: int, q_max: int) -> LikelihoodProfile:
    """Likelihood profile over candidate orders 0..q_max from an eigenvalue set."""
    eigs = np.asarray(eigs, dtype=float)
    p = eigs.size
    if not 1 <= q_max <= p - 1:
        raise ValueError(f"q_max must be in [1, {p - 1}], got {q_max}")
    m2l = np.array([wk_minus2loglik(eigs, k, n) for k in range(q_max + 1)])
    phi = np.array([enum_free_params(k, p) for k in range(q_max + 1)])
    return LikelihoodProfile(m2l, phi)


def estimate_num_signals(y: np.ndarray, rule: PenaltyRule, q_max: int) -> SelectionResult:
    """Estimate the number of signals in a sensor batch.

    Assembles the eigenvalue likelihood profile over orders 0..q_max and
    delegates to the criterion minimizer.
    """
    y = _check_batch(y)
    n = y.shape[1]
    eigs = scm_eigenvalues(y)
    return select_order(enum_profile(eigs, n, q_max), rule, n)


# ---------------------------------------------------------------------------
# high-SNR overestimation probability and the penalty designer
# ---------------------------------------------------------------------------


def _peak(m: int) -> float:
    # maximum of v(1-v)^(m-1) on [1/m, 1], attained at v = 1/m
    return (m - 1) ** (m - 1) / m**m


def overest_threshold(q: int, p: int, n: int, nu: float) -> float:
    """Threshold level for the order-(q vs q+1) eigenvalue-ratio test.

    Equals C * exp(-nu (2(p-q)-1) / (2n)) with C = (m-1)^(m-1)/m^m and
    m = p-q; the exponent is the free-parameter difference phi(q)-phi(q+1)
    times nu over 2n.  At nu = 0 this is exactly the peak C, and it decays
    to 0 as nu grows.
    """
    if not 0 <= q <= p - 2:
        raise ValueError(f"q must be in [0, {p - 2}], got {q}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if nu < 0:
        raise ValueError(f"nu must be nonnegative, got {nu}")
    m = p - q
    return _peak(m) * math.exp(-nu * (2 * m - 1) / (2 * n))


def ratio_root(xi: float, m: int) -> float:
    """Unique v in [1/m, 1] with v(1-v)^(m-1) = xi.

    The map is strictly decreasing on [1/m, 1] from its peak C down to 0,
    so the root exists iff 0 < xi <= C.  Solved by bracketed root finding;
    residual below 1e-12.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    c = _peak(m)
    if not 0 < xi <= c * (1 + 1e-12):
        raise ValueError(f"xi={xi} outside (0, {c}]; no root in [1/m, 1]")
    if xi >= c:
        return 1.0 / m

    def f(v):
        return v * (1 - v) ** (m - 1) - xi

    return float(brentq(f, 1.0 / m, 1.0, xtol=1e-15, rtol=8.9e-16))


def pover_highsnr(
    q: int,
    p: int,
    n: int,
    nu: float,
    backend: str = "mc",
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    model: ShiftedGamma | None = None,
) -> float:
    """High-SNR probability of overestimating the number of signals.

    Single-comparison approximation: the probability that order q+1 beats
    the true order q, evaluated through the fitted u = l1/t model of the
    (p-q)-dimensional noise block.  Independent of SNR and of the signal
    model.  Pass `model` to reuse a fitted ShiftedGamma; otherwise one is
    built with the given backend, trials and seed.
    """
    m = p - q
    if model is None:
        model = u_model(WishartSpec(m, n), backend, trials, seed)
    v = ratio_root(overest_threshold(q, p, n, nu), m)
    return 1.0 - model.cdf(v)


@dataclass(frozen=True)
class EnumDesignResult:
    """Designed penalty weight for source enumeration, with diagnostics."""

    nu: float
    q_star: int
    v_threshold: float
    predicted_pover: float
    backend: str
    per_q: list[dict] = field(repr=False, default_factory=list)


def design_nu_enum(
    p: int,
    n: int,
    q_max: int,
    pover_max: float,
    backend: str = "mc",
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
) -> EnumDesignResult:
    """Smallest penalty weight capping high-SNR overestimation at pover_max.

    For each candidate true order q in 0..q_max, the u-model quantile at
    1 - pover_max fixes the threshold the eigenvalue-ratio test must hit,
    and the threshold equation is inverted for the required nu:

        nu_q = (2n / (2(p-q)-1)) * [ln C_q - ln(v (1-v)^(p-q-1))]

    The returned nu is the worst case max_q nu_q (overestimation is
    decreasing in nu, so the max guards every scanned q); a negative max is
    clamped to 0 with a warning.  The predicted probability at (q*, nu) is
    recomputed from the same fitted model and equals pover_max up to solver
    tolerance whenever no clamping occurred.

    Raises DesignError when the requested pover_max puts the quantile
    outside the feasible interval (1/(p-q), 1).
    """
    if not 1 <= q_max <= p - 2:
        raise ValueError(f"q_max must be in [1, {p - 2}], got {q_max}")
    if not 0 < pover_max < 1:
        raise ValueError(f"pover_max must be in (0, 1), got {pover_max}")

    per_q = []
    models = {}
    for q in range(q_max + 1):
        m = p - q
        model = u_model(WishartSpec(m, n), backend, trials, seed)
        models[q] = model
        v = model.quantile(1.0 - pover_max)
        if v <= 1.0 / m or v >= 1.0:
            raise DesignError(
                f"pover_max={pover_max} infeasible at q={q}: "
                f"quantile {v:.6g} outside (1/{m}, 1)"
            )
        ln_level = math.log(v) + (m - 1) * math.log1p(-v)
        nu_q = (2.0 * n / (2 * m - 1)) * (math.log(_peak(m)) - ln_level)
        per_q.append({"q": q, "nu": nu_q, "v": v})

    best = max(per_q, key=lambda r: r["nu"])
    nu = best["nu"]
    if nu < 0:
        warnings.warn(
            "designed nu is negative (cap already met at nu=0); clamping to 0",
            stacklevel=2,
        )
        nu = 0.0
    q_star = best["q"]
    predicted = pover_highsnr(q_star, p, n, nu, model=models[q_star])
    return EnumDesignResult(
        nu=nu,
        q_star=q_star,
        v_threshold=best["v"],
        predicted_pover=predicted,
        backend=backend,
        per_q=per_q,
    )
