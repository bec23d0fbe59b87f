"""Biased-mean reduction: block matrix M, projector Pi, target mean x0.

M = [[A, -2I, -2I], [0, Pi, 0], [0, 0, Pi]] with Pi = I - J/m, acting on
signings laid out as (elements, +beta block, -beta block). The family's
vectors are the columns of M divided by the largest column norm; exact
checks use m*M, which is an integer matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .distribution import SigningDistribution
from .errors import DimensionError, ParameterError, PreconditionError, ValidationError
from .setsplit import Assignment, SetSplitInstance


def projector(m: int) -> np.ndarray:
    return np.eye(m) - np.full((m, m), 1.0 / m)


def block_matrix(A: np.ndarray, denominator: int = 1) -> np.ndarray:
    """M scaled by ``denominator``; with denominator m the result is integral."""
    m, n = A.shape
    k = denominator
    I = np.eye(m, dtype=np.int64)
    J = np.ones((m, m), dtype=np.int64)
    if k == m:
        pi = m * I - J
        M = np.zeros((3 * m, n + 2 * m), dtype=np.int64)
    else:
        pi = k * projector(m)
        M = np.zeros((3 * m, n + 2 * m), dtype=float)
    M[:m, :n] = k * A
    M[:m, n:n + m] = -2 * k * I
    M[:m, n + m:] = -2 * k * I
    M[m:2 * m, n:n + m] = pi
    M[2 * m:, n + m:] = pi
    return M


def x0_exact(n: int, m: int, p, q) -> list:
    """x0 as Fractions of the given p, q (exact binary values for floats)."""
    p, q = Fraction(p), Fraction(q)
    beta = (1 - abs(p)) * q
    return [p] * n + [p + beta] * m + [p - beta] * m


@dataclass(frozen=True)
class BiasedFamily:
    instance: SetSplitInstance
    A: np.ndarray
    M: np.ndarray
    Pi: np.ndarray
    p: float
    q: float
    beta: float
    x0: np.ndarray
    scale: float

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def D(self) -> int:
        return 3 * self.m

    @property
    def d(self) -> int:
        return self.D

    @property
    def N(self) -> int:
        return self.n + 2 * self.m

    @property
    def vectors(self) -> np.ndarray:
        return self.M / self.scale

    def integer_M(self) -> np.ndarray:
        """m * M, exact."""
        return block_matrix(self.A, denominator=self.m)

    def blocks(self, X):
        """Split signings (rows) into (x1, x2, x3)."""
        X = np.atleast_2d(X)
        n, m = self.n, self.m
        return X[:, :n], X[:, n:n + m], X[:, n + m:]

    def to_json(self) -> dict:
        cols = []
        for c in range(self.N):
            nz = np.flatnonzero(self.M[:, c])
            cols.append([[int(r), float(self.M[r, c])] for r in nz])
        return {
            "kind": "biased",
            "d": self.D,
            "N": self.N,
            "scale": float(self.scale),
            "p": float(self.p),
            "q": float(self.q),
            "beta": float(self.beta),
            "x0": [float(v) for v in self.x0],
            "columns": cols,
            "maps": {
                "n": self.n,
                "m": self.m,
                "b": self.instance.b,
                "sets": [[i + 1 for i in s] for s in self.instance.sets],
                "blocks": ["elements", "plus_beta", "minus_beta"],
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "BiasedFamily":
        maps = data["maps"]
        inst = SetSplitInstance.from_json({"n": maps["n"], "b": maps["b"], "sets": maps["sets"]})
        fam = build(inst, data["p"], data["q"])
        M = np.zeros((data["d"], data["N"]))
        for c, entries in enumerate(data["columns"]):
            for r, v in entries:
                M[r, c] = v
        if M.shape != fam.M.shape or np.max(np.abs(M - fam.M)) > 1e-12:
            raise ValidationError("family columns do not match the construction for its instance")
        return fam


def build(instance: SetSplitInstance, p: float, q: float) -> BiasedFamily:
    """Assemble M and x0 and verify M x0 = 0 in exact arithmetic.

    For p < 0 the mean is the negation of the (|p|, -q) construction, which
    keeps x0 = (p, p + beta, p - beta) blockwise with beta = (1 - |p|) q.
    """
    if not (-1 <= p <= 1 and -1 <= q <= 1):
        raise ParameterError(f"p and q must lie in [-1, 1] (got p={p}, q={q})")
    if instance.m < 1:
        raise ParameterError("instance has no sets")
    A = instance.incidence()
    m, n = A.shape
    if not np.all(A.sum(axis=1) == 4):
        raise ValidationError("incidence rows must sum to 4")
    exact = x0_exact(n, m, p, q)
    Mi = block_matrix(A, denominator=m)
    if any(sum(int(Mi[r, c]) * exact[c] for c in range(n + 2 * m)) != 0 for r in range(3 * m)):
        raise ValidationError("M x0 != 0")  # unreachable for valid instances
    x0 = np.array([float(v) for v in exact])
    M = block_matrix(A).astype(float)
    scale = float(np.max(np.linalg.norm(M, axis=0)))
    beta = float((1 - abs(Fraction(p))) * Fraction(q))
    return BiasedFamily(instance, A, M, projector(m), float(p), float(q), beta, x0, scale)


def five_point_distribution(family: BiasedFamily, z: Assignment) -> SigningDistribution:
    """Zero-covariance distribution with mean x0 built from a splitting assignment."""
    if len(z) != family.n:
        raise DimensionError("assignment length does not match the family")
    if np.any(family.A @ z.values):
        raise PreconditionError("assignment does not split every set (A z != 0)")
    p, q = family.p, family.q
    sign = 1
    if p < 0:
        p, q, sign = -p, -q, -1
    n, m = family.n, family.m
    zz = z.values
    one, mone = np.ones(m, dtype=np.int64), -np.ones(m, dtype=np.int64)
    X = np.stack([
        np.ones(n + 2 * m, dtype=np.int64),
        np.r_[zz, one, mone],
        np.r_[-zz, one, mone],
        np.r_[-zz, mone, one],
        np.r_[zz, mone, one],
    ])
    hi = (1 - p) * (1 + q) / 4
    lo = (1 - p) * (1 - q) / 4
    probs = np.array([p, hi, hi, lo, lo])
    return SigningDistribution(sign * X, probs, family.x0)


def three_term_decomposition(family: BiasedFamily, dist: SigningDistribution, check_mean: bool = True):
    """(E||A x1 - 2(x2 + x3)||^2, E||Pi x2||^2, E||Pi x3||^2).

    Their sum is E||Mx||^2, so ||Cov(Mx)|| >= max(terms) / D when the mean is x0.
    """
    if dist.N != family.N:
        raise DimensionError("distribution length does not match the family")
    if check_mean and np.max(np.abs(dist.target_mean - family.x0)) > 1e-10:
        raise ValidationError("distribution mean differs from the family's x0")
    x1, x2, x3 = family.blocks(dist.signings.astype(float))
    top = x1 @ family.A.T - 2 * (x2 + x3)
    pr = dist.probs
    t1 = float(pr @ np.sum(top**2, axis=1))
    t2 = float(pr @ np.sum((x2 @ family.Pi) ** 2, axis=1))
    t3 = float(pr @ np.sum((x3 @ family.Pi) ** 2, axis=1))
    return t1, t2, t3


def alpha(y) -> float:
    """Mean entry of a +-1 vector; ||Pi y||^2 = (1 - alpha^2) m."""
    y = np.asarray(y)
    if y.size == 0 or not np.all(np.abs(y) == 1):
        raise ValidationError("alpha needs a nonempty +-1 vector")
    return float(y.mean())
