"""Numerical checks of the alpha-tail inequalities and the event-E chain.

Everything is evaluated exactly over a finite support. The chain is checked
inequality by inequality with the constants 24, 10, 12 and 2 as written,
never as asymptotic statements.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .covariance import operator_norm
from .distribution import SigningDistribution
from .errors import ParameterError, ValidationError
from .reduce_biased import BiasedFamily

TOL = 1e-9
BLOCKS = ("second", "third")


@dataclass(frozen=True)
class AlphaStats:
    mean_alpha: float
    mean_alpha_sq: float
    delta: float
    pi_mid: float  # Pr(|alpha| <= delta)
    pi_plus: float  # Pr(alpha > delta)
    pi_minus: float  # Pr(alpha < -delta)

    @classmethod
    def from_values(cls, alphas, probs, delta: float) -> "AlphaStats":
        """Stats of a finite distribution of alpha values in [-1, 1]."""
        if not 0 < delta < 1:
            raise ParameterError(f"delta must lie in (0, 1), got {delta}")
        a = np.asarray(alphas, dtype=float)
        w = np.asarray(probs, dtype=float)
        if np.any(np.abs(a) > 1 + 1e-12):
            raise ValidationError("alpha values must lie in [-1, 1]")
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
            raise ValidationError("weights must form a probability vector")
        plus = float(w[a > delta].sum())
        minus = float(w[a < -delta].sum())
        return cls(
            mean_alpha=float(w @ a),
            mean_alpha_sq=float(w @ a**2),
            delta=float(delta),
            pi_mid=float(1.0 - plus - minus),
            pi_plus=plus,
            pi_minus=minus,
        )


def block_alphas(dist: SigningDistribution, family: BiasedFamily, block: str) -> np.ndarray:
    if block not in BLOCKS:
        raise ParameterError(f"block must be one of {BLOCKS}, got {block!r}")
    _, x2, x3 = family.blocks(dist.signings)
    y = x2 if block == "second" else x3
    return y.mean(axis=1)


def alpha_stats(dist: SigningDistribution, family: BiasedFamily, block: str, delta: float) -> AlphaStats:
    if dist.N != family.N:
        raise ValidationError("distribution length does not match the family")
    return AlphaStats.from_values(block_alphas(dist, family, block), dist.probs, delta)


def markov_alpha_rhs(stats: AlphaStats) -> float:
    return (1.0 - stats.mean_alpha_sq) / (1.0 - stats.delta**2)


def check_markov_alpha(stats: AlphaStats, tol: float = 1e-12) -> bool:
    """Pr(|alpha| <= delta) <= (1 - E[alpha^2]) / (1 - delta^2)."""
    return stats.pi_mid <= markov_alpha_rhs(stats) + tol


def tail_rhs(stats: AlphaStats):
    d, pi = stats.delta, stats.pi_mid
    plus = (stats.mean_alpha + d * (1 - 2 * pi)) / (1 + d)
    minus = (-stats.mean_alpha + d * (1 - 2 * pi)) / (1 + d)
    return plus, minus


def check_tail_bounds(stats: AlphaStats, tol: float = 1e-12):
    """(Pr(alpha > delta) bound holds, Pr(alpha < -delta) bound holds)."""
    plus, minus = tail_rhs(stats)
    return stats.pi_plus >= plus - tol, stats.pi_minus >= minus - tol


@dataclass(frozen=True)
class ClaimCheck:
    claim: str
    lhs: float
    rhs: float
    passed: bool

    def to_json(self) -> dict:
        return {"claim": self.claim, "lhs": self.lhs, "rhs": self.rhs, "pass": self.passed}


def _ge(claim, lhs, rhs, tol=TOL):
    return ClaimCheck(claim, float(lhs), float(rhs), bool(lhs >= rhs - tol))


@dataclass
class EventReport:
    branch: str  # "event" | "small_alpha" | "trivial"
    prob_E: float
    chain_lower: float
    delta: float
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "branch": self.branch,
            "prob_E": self.prob_E,
            "chain_lower": self.chain_lower,
            "delta": self.delta,
            "pass": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


def choose_delta(gamma: float, beta: float) -> float:
    return 1.0 - gamma * beta / 10.0


def _unscaled_cov_norm(family: BiasedFamily, dist: SigningDistribution) -> float:
    MX = dist.signings.astype(float) @ family.M.T
    return operator_norm((MX.T * dist.probs) @ MX)


def event_E_bound(dist: SigningDistribution, family: BiasedFamily, gamma: float) -> EventReport:
    """Probability of E = {alpha(x2) > delta, alpha(x3) < -delta} and the chain
    bounding it below by (beta/2)(1 - gamma/10), with delta = 1 - gamma*beta/10.

    ``gamma`` is the unsplit fraction the source instance is known to force.
    Norms are in the unscaled M convention (D = 3m). If either block has
    E[alpha^2] below 1 - gamma beta^2 / 24, the small-alpha branch is
    reported instead, with its own inequality.
    """
    if np.max(np.abs(dist.target_mean - family.x0)) > 1e-10:
        raise ValidationError("distribution mean differs from the family's x0")
    if not 0 <= gamma <= 1:
        raise ParameterError("gamma must lie in [0, 1]")
    beta = abs(family.beta)
    if family.p < 0 or family.beta < 0:
        # the chain is written for p >= 0 and beta >= 0; negate signings, or swap blocks
        dist, family = _normalize(dist, family)
    m, D = family.m, family.D
    chain_lower = beta / 2 * (1 - gamma / 10)
    if beta == 0 or gamma == 0:
        return EventReport("trivial", float("nan"), chain_lower, 1.0, [_ge("trivial_bound", 0.0, chain_lower)])
    delta = choose_delta(gamma, beta)
    a2 = block_alphas(dist, family, "second")
    a3 = block_alphas(dist, family, "third")
    pr = dist.probs
    in_E = (a2 > delta) & (a3 < -delta)
    prob_E = float(pr[in_E].sum())
    s2 = AlphaStats.from_values(a2, pr, delta)
    s3 = AlphaStats.from_values(a3, pr, delta)
    threshold = 1 - gamma * beta**2 / 24
    cov_norm = _unscaled_cov_norm(family, dist)
    checks = [
        _ge("markov_second", markov_alpha_rhs(s2), s2.pi_mid),
        _ge("markov_third", markov_alpha_rhs(s3), s3.pi_mid),
        _ge("tail_plus_second", s2.pi_plus, tail_rhs(s2)[0]),
        _ge("tail_minus_third", s3.pi_minus, tail_rhs(s3)[1]),
    ]
    small = [(name, s) for name, s in (("second", s2), ("third", s3)) if s.mean_alpha_sq < threshold]
    if small:
        for name, s in small:
            bound = (1 - s.mean_alpha_sq) * m / D
            checks.append(_ge(f"small_alpha_{name}_cov", cov_norm, bound))
            checks.append(_ge(f"small_alpha_{name}_gap", bound, gamma * beta**2 / 72))
        return EventReport("small_alpha", prob_E, chain_lower, delta, checks)

    g = gamma * beta / 10
    chain = [
        prob_E,
        s2.pi_plus + s3.pi_minus - 1,
        (s2.mean_alpha - s3.mean_alpha + 2 * delta - 2 * delta * (s2.pi_mid + s3.pi_mid)) / (1 + delta) - 1,
        (2 * beta + 2 * delta - 2 * delta / (1 - delta**2) * (2 - s2.mean_alpha_sq - s3.mean_alpha_sq))
        / (1 + delta) - 1,
        (2 * beta + 1 - g - 4 * (1 - g) * (gamma * beta**2 / 24) / (1 - (1 - g) ** 2) - 1) / (1 + delta),
        (2 * beta - g - (1 - g) * beta) / (1 + delta),
        chain_lower,
    ]
    for k in range(len(chain) - 1):
        checks.append(_ge(f"event_chain_{k}", chain[k], chain[k + 1]))

    x1, x2, x3 = family.blocks(dist.signings.astype(float))
    top = x1 @ family.A.T - 2 * (x2 + x3)
    energy = np.sum(top**2, axis=1)
    per_atom = 4 * gamma * (1 - beta / 12) * m
    for k in np.flatnonzero(in_E):
        zero_frac = np.count_nonzero(x2[k] + x3[k] == 0) / m
        checks.append(_ge(f"event_zero_fraction[{k}]", zero_frac, 1 - gamma * beta / 12))
        checks.append(_ge(f"event_energy[{k}]", energy[k], per_atom))
    t1 = float(pr @ energy)
    checks += [
        _ge("cov_vs_first_term", cov_norm, t1 / D),
        _ge("first_term_vs_event", t1 / D, prob_E * per_atom / D),
        _ge("event_vs_final", prob_E * per_atom / D, chain_lower * per_atom / (5 * m)),
    ]
    return EventReport("event", prob_E, chain_lower, delta, checks)


def _normalize(dist: SigningDistribution, family: BiasedFamily):
    """Map to the p >= 0, beta >= 0 form of the same problem."""
    from .reduce_biased import build

    X = dist.signings.astype(np.int64)
    sign = 1
    p, q = family.p, family.q
    if p < 0:
        X, p, q, sign = -X, -p, -q, -1
    if q < 0:
        n, m = family.n, family.m
        X = np.hstack([X[:, :n], X[:, n + m:], X[:, n:n + m]])
        q = -q
    fam = build(family.instance, p, q)
    return SigningDistribution(X, dist.probs, fam.x0), fam
