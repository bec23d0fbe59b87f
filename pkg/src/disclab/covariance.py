"""Covariance of signed vector sums under finite-support signing distributions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distribution import SigningDistribution
from .errors import DimensionError, ValidationError

SYM_TOL = 1e-9
POWER_TOL = 1e-9
POWER_MAX_ITER = 10_000


def as_matrix(family) -> np.ndarray:
    """The d x N column matrix of a family object or array."""
    if hasattr(family, "vectors"):
        return np.asarray(family.vectors, dtype=float)
    V = np.asarray(family, dtype=float)
    if V.ndim != 2:
        raise DimensionError("vector family must be a 2-d array (d x N)")
    return V


@dataclass(frozen=True)
class CovarianceReport:
    cov: np.ndarray
    op_norm: float
    trace: float
    signed_sums: np.ndarray  # one row w per support atom

    @property
    def d(self) -> int:
        return self.cov.shape[0]

    @property
    def trace_lower_bound(self) -> float:
        return self.trace / self.d if self.d else 0.0

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "cov": [float(v) for v in self.cov.ravel()],
            "op_norm": float(self.op_norm),
            "trace": float(self.trace),
            "trace_lower_bound": float(self.trace_lower_bound),
        }


def _report(cov, W):
    cov = 0.5 * (cov + cov.T)
    return CovarianceReport(cov, operator_norm(cov), float(np.trace(cov)), W)


def covariance_of(family, dist: SigningDistribution) -> CovarianceReport:
    """Cov = sum_k p_k w_k w_k^T with w_k = sum_i (x_k(i) - x0(i)) v_i."""
    V = as_matrix(family)
    if V.shape[1] != dist.N:
        raise DimensionError(f"family has N={V.shape[1]} vectors, distribution has N={dist.N}")
    if abs(dist.probs.sum() - 1.0) > 1e-12:
        raise ValidationError("probabilities do not sum to 1")
    W = (dist.signings - dist.target_mean) @ V.T
    # fixed summation order: atoms in support order
    cov = (W.T * dist.probs) @ W
    return _report(cov, W)


def operator_norm(S) -> float:
    """Largest eigenvalue magnitude of a symmetric matrix."""
    S = np.asarray(S, dtype=float)
    if S.size == 0:
        return 0.0
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError("operator_norm needs a square matrix")
    scale = max(1.0, float(np.max(np.abs(S))))
    if np.max(np.abs(S - S.T)) > SYM_TOL * scale:
        raise ValidationError("matrix is not symmetric")
    ev = np.linalg.eigvalsh(0.5 * (S + S.T))
    return float(max(abs(ev[0]), abs(ev[-1])))


def power_norm(S, tol=POWER_TOL, max_iter=POWER_MAX_ITER) -> float:
    """Operator norm of a symmetric PSD matrix by power iteration.

    Deterministic start (normalized all-ones, with a fixed perturbation so it
    is not orthogonal to the top eigenvector of structured inputs).
    """
    S = np.asarray(S, dtype=float)
    d = S.shape[0]
    if d == 0 or not np.any(S):
        return 0.0
    v = np.ones(d) + np.arange(d) / (10.0 * d)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        u = S @ v
        new = float(np.linalg.norm(u))
        if new == 0.0:
            return 0.0
        v = u / new
        if abs(new - lam) <= tol * new:
            return new
        lam = new
    return lam


def independent_baseline(family, x0) -> CovarianceReport:
    """Closed-form covariance when each x(i) is independent with mean x0(i)."""
    V = as_matrix(family)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (V.shape[1],):
        raise DimensionError("x0 length does not match the family")
    if np.any(np.abs(x0) > 1):
        raise ValidationError("x0 entries must lie in [-1, 1]")
    cov = (V * (1.0 - x0**2)) @ V.T
    return _report(cov, np.zeros((0, V.shape[0])))
