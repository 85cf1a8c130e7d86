"""Information-criterion core: penalty rules and order selection.

A model-order criterion scores each candidate order k by

    total(k) = minus2loglik(k) + phi(k) * nu

where phi(k) counts the free parameters of hypothesis k and nu is the
penalty weight.  AIC uses nu = 2, BIC uses nu = ln n, and the generalized
criterion (GIC) takes nu as a free design parameter.  The selected order
minimizes the total, with ties broken toward the smallest order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PenaltyRule",
    "LikelihoodProfile",
    "SelectionResult",
    "resolve_nu",
    "select_order",
]


@dataclass(frozen=True)
class PenaltyRule:
    """Penalty specification: 'aic', 'bic', or 'gic' with an explicit weight."""

    kind: str
    nu: float | None = None

    def __post_init__(self):
        if self.kind not in ("aic", "bic", "gic"):
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if self.kind == "gic":
            if self.nu is None or not math.isfinite(self.nu) or self.nu < 0:
                raise ValueError("gic rule needs a finite penalty weight nu >= 0")
        elif self.nu is not None:
            raise ValueError(f"{self.kind} takes no explicit nu")

    @classmethod
    def aic(cls) -> "PenaltyRule":
        return cls("aic")

    @classmethod
    def bic(cls) -> "PenaltyRule":
        return cls("bic")

    @classmethod
    def gic(cls, nu: float) -> "PenaltyRule":
        return cls("gic", float(nu))

    @classmethod
    def from_string(cls, text: str) -> "PenaltyRule":
        """Parse 'aic', 'bic', or 'gic:<nu>' (case-insensitive)."""
        t = text.strip().lower()
        if t == "aic":
            return cls.aic()
        if t == "bic":
            return cls.bic()
        if t.startswith("gic:"):
            try:
                return cls.gic(float(t[4:]))
            except ValueError as e:
                raise ValueError(f"bad penalty spec {text!r}: {e}") from None
        raise ValueError(f"bad penalty spec {text!r} (want aic | bic | gic:<nu>)")

    def label(self) -> str:
        return self.kind if self.kind != "gic" else f"gic:{self.nu:g}"


def resolve_nu(rule: PenaltyRule, n: int) -> float:
    """Resolve a penalty rule to its numeric weight for sample size n."""
    if rule.kind == "aic":
        return 2.0
    if rule.kind == "bic":
        if n < 2:
            raise ValueError("BIC needs n >= 2 (ln n degenerate below that)")
        return math.log(n)
    return float(rule.nu)


@dataclass(frozen=True, eq=False)
class LikelihoodProfile:
    """Per-order scan of -2 log-likelihood and free-parameter counts.

    Orders run contiguously 0..q_max.  minus2loglik entries may carry the
    +inf sentinel (degenerate hypothesis, never selected unless all are)
    or the -inf sentinel (perfect fit); NaN is rejected.  free_params must
    be strictly increasing.
    """

    minus2loglik: np.ndarray
    free_params: np.ndarray

    def __post_init__(self):
        m2l = np.asarray(self.minus2loglik, dtype=float)
        phi = np.asarray(self.free_params, dtype=int)
        if m2l.ndim != 1 or phi.shape != m2l.shape or m2l.size == 0:
            raise ValueError("profile arrays must be 1-d, equal length, non-empty")
        if np.any(np.isnan(m2l)):
            raise ValueError("NaN in likelihood profile")
        if np.any(np.diff(phi) <= 0):
            raise ValueError("free_params must be strictly increasing in order")
        object.__setattr__(self, "minus2loglik", m2l)
        object.__setattr__(self, "free_params", phi)

    @property
    def q_max(self) -> int:
        return self.minus2loglik.size - 1

    @property
    def orders(self) -> np.ndarray:
        return np.arange(self.minus2loglik.size)


@dataclass(frozen=True, eq=False)
class SelectionResult:
    """Outcome of an order selection: chosen order plus the full score table."""

    selected: int
    orders: np.ndarray
    minus2loglik: np.ndarray
    penalty: np.ndarray
    total: np.ndarray
    rule: PenaltyRule
    nu: float

    def table(self) -> list[dict]:
        """Score table as a list of per-order records (JSON-friendly)."""
        return [
            {
                "order": int(k),
                "minus2loglik": float(self.minus2loglik[i]),
                "penalty": float(self.penalty[i]),
                "total": float(self.total[i]),
            }
            for i, k in enumerate(self.orders)
        ]


def select_order(profile: LikelihoodProfile, rule: PenaltyRule, n: int) -> SelectionResult:
    """Pick the order minimizing minus2loglik(k) + phi(k) * nu.

    Ties (including -inf totals from perfect fits) resolve to the smallest
    order; np.argmin returns the first minimizer, which is exactly that.
    """
    nu = resolve_nu(rule, n)
    penalty = profile.free_params * nu
    # -inf likelihood dominates any finite penalty; adding the two is safe
    # because phi * nu is always finite.
    total = profile.minus2loglik + penalty
    k_hat = int(np.argmin(total))
    return SelectionResult(
        selected=k_hat,
        orders=profile.orders,
        minus2loglik=profile.minus2loglik,
        penalty=penalty,
        total=total,
        rule=rule,
        nu=nu,
    )
