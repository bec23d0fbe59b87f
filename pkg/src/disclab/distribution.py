"""Finite-support distributions over sign vectors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError

PROB_TOL = 1e-12
MEAN_TOL = 1e-10


@dataclass(frozen=True)
class SigningDistribution:
    """Atoms ``signings[k]`` (rows of +-1) with weights ``probs[k]``.

    ``target_mean`` is the mean the distribution is meant to realize; the
    constructor rejects supports whose weighted mean misses it.
    """

    signings: np.ndarray
    probs: np.ndarray
    target_mean: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.signings, dtype=np.int8))
        p = np.asarray(self.probs, dtype=np.float64).ravel()
        mu = np.asarray(self.target_mean, dtype=np.float64).ravel()
        if X.shape[0] != p.shape[0] or X.shape[1] != mu.shape[0]:
            raise DimensionError(f"support {X.shape}, probs {p.shape}, mean {mu.shape} disagree")
        if not np.all(np.abs(X) == 1):
            raise ValidationError("signing entries must be +1 or -1")
        if np.any(p < 0):
            raise ValidationError("negative probability")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValidationError(f"probabilities sum to {p.sum()!r}")
        if np.any(np.abs(mu) > 1 + 1e-12):
            raise ValidationError("target mean outside [-1, 1]")
        err = np.max(np.abs(p @ X - mu), initial=0.0)
        if err > MEAN_TOL:
            raise ValidationError(f"weighted mean misses target by {err:.3g}")
        for arr in (X, p, mu):
            arr.setflags(write=False)
        object.__setattr__(self, "signings", X)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "target_mean", mu)

    @property
    def N(self) -> int:
        return self.signings.shape[1]

    @property
    def support_size(self) -> int:
        return self.signings.shape[0]

    def mean(self) -> np.ndarray:
        return self.probs @ self.signings

    def negated(self) -> "SigningDistribution":
        return SigningDistribution(-self.signings.astype(np.int16), self.probs, -self.target_mean)

    @classmethod
    def point_mass(cls, x) -> "SigningDistribution":
        x = np.asarray(x)
        return cls(x[None, :], [1.0], x.astype(float))

    def to_json(self) -> dict:
        return {
            "support": [{"x": [int(v) for v in x], "p": float(q)} for x, q in zip(self.signings, self.probs)],
            "mean": [float(v) for v in self.target_mean],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SigningDistribution":
        support = data["support"]
        X = np.array([a["x"] for a in support])
        p = np.array([a["p"] for a in support], dtype=float)
        return cls(X, p, np.array(data["mean"], dtype=float))


def polish(X, p, target, drop=1e-14):
    """Clean up an LP solution into a valid SigningDistribution.

    Drops atoms below ``drop``, then applies the least-norm correction that
    restores the mean and total-mass constraints exactly, if that keeps every
    weight nonnegative.
    """
    X = np.asarray(X)
    p = np.asarray(p, dtype=float)
    keep = p > drop
    X, p = X[keep], np.clip(p[keep], 0.0, None)
    B = np.vstack([X.T.astype(float), np.ones(len(p))])
    rhs = np.r_[target, 1.0]
    delta = np.linalg.lstsq(B, rhs - B @ p, rcond=None)[0]
    q = p + delta
    if np.all(q >= 0):
        p = q
    p = p / p.sum()
    return SigningDistribution(X, p, target)
