"""Desk-scale oracle for C(V, x0), the least covariance operator norm over
signing distributions with mean x0.

All routines enumerate the 2**N signings, so N is capped.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import cvxopt
from scipy.linalg import qr
from scipy.optimize import linprog

from . import _kernels
from .covariance import as_matrix, covariance_of
from .distribution import SigningDistribution, polish
from .errors import CapacityError, DimensionError, ValidationError

CERTIFY_CAP = 20
MINIMIZE_CAP = 14
MAX_CUTS = 200
SDP_POOL = 150
SDP_DROP = 1e-9
LP_TOL = 1e-9
_HIGHS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


@dataclass
class OracleResult:
    value: float
    lower_bound: float
    upper_bound: float
    witness: SigningDistribution
    status: str  # exact_zero | converged | iteration_cap | stalled
    history: list = field(default_factory=list)  # (lower, upper) per cut round

    @property
    def gap(self) -> float:
        return self.upper_bound - self.lower_bound

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "status": self.status,
            "support_size": self.witness.support_size,
            "witness": self.witness.to_json(),
            "history": [{"lower": lo, "upper": up} for lo, up in self.history],
        }


def _prepare(family, x0, cap, what):
    V = as_matrix(family)
    N = V.shape[1]
    if x0 is None:
        x0 = getattr(family, "x0", None)
    x0 = np.zeros(N) if x0 is None else np.asarray(x0, dtype=float)
    if x0.shape != (N,):
        raise DimensionError(f"x0 has shape {x0.shape}, family has N={N}")
    if np.any(np.abs(x0) > 1):
        raise ValidationError("x0 entries must lie in [-1, 1]")
    if N > cap:
        raise CapacityError(what, N, cap)
    return V, x0


def all_signings(N: int) -> np.ndarray:
    return _kernels.decode_signs(np.arange(1 << N, dtype=np.int64), N)


def _linprog(c, **kw):
    """HiGHS with tight tolerances, falling back to defaults on solver trouble."""
    res = None
    for method, options in (("highs", _HIGHS), ("highs", {}), ("highs-ipm", {})):
        res = linprog(c, method=method, options=options, **kw)
        if res.status in (0, 2):  # optimal or infeasible are both answers
            return res
    return res


def _mean_constraints(X, x0):
    """Rows: the N mean constraints, then total mass."""
    return np.vstack([X.T.astype(float), np.ones(X.shape[0])]), np.r_[x0, 1.0]


def certify_zero(family, x0=None, cap: int = CERTIFY_CAP, tol: float = 1e-9, use_numba=None):
    """Decide C(V, x0) == 0.

    Zero covariance forces every atom into K = {x : V(x - x0) = 0}, so the
    answer is whether x0 is a convex combination of K. Returns
    ``(is_zero, witness_or_None)``.
    """
    V, x0 = _prepare(family, x0, cap, "certify_zero")
    thresh = tol * max(1.0, float(np.max(np.abs(V), initial=0.0)))
    idx = _kernels.kernel_signings(V, x0, thresh, use_numba=use_numba)
    if len(idx) == 0:
        return False, None
    K = _kernels.decode_signs(idx, V.shape[1])
    Aeq, beq = _mean_constraints(K, x0)
    res = _linprog(np.zeros(len(K)), A_eq=Aeq, b_eq=beq, bounds=(0, None))
    if res.status != 0:
        return False, None
    if np.max(np.abs(Aeq @ res.x - beq)) > 1e-8:
        return False, None
    return True, polish(K, res.x, x0)


def trace_lp_bound(family, x0=None, cap: int = MINIMIZE_CAP) -> float:
    """min over mean-x0 distributions of E||w||^2 / d, an exact LP.

    Since ||Cov|| >= tr(Cov)/d, this is a certified lower bound on C(V, x0).
    """
    V, x0 = _prepare(family, x0, cap, "trace_lp_bound")
    d = V.shape[0]
    X = all_signings(V.shape[1])
    W = (X - x0) @ V.T
    cost = np.sum(W**2, axis=1) / d
    Aeq, beq = _mean_constraints(X, x0)
    res = _linprog(cost, A_eq=Aeq, b_eq=beq, bounds=(0, None))
    if res.status != 0:  # pragma: no cover - x0 in the cube is always feasible
        raise ValidationError(f"trace LP failed: {res.message}")
    return max(0.0, float(res.fun))


def threshold_coupling(x0):
    """At most N+1 signings with weights realizing mean x0 exactly.

    Uses one uniform threshold U: x(i) = +1 iff U < (1 + x0(i)) / 2.
    """
    a = (1.0 + np.asarray(x0, dtype=float)) / 2.0
    cuts = np.unique(np.r_[0.0, a[(a > 0) & (a < 1)], 1.0])
    X, w = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        X.append(np.where(mid < a, 1, -1))
        w.append(hi - lo)
    return np.array(X, dtype=np.int8), np.array(w)


def _unit_sign(u):
    nz = np.flatnonzero(np.abs(u) > 1e-12)
    return -u if len(nz) and u[nz[0]] < 0 else u


def _solve_master(G, Xf, x0, cols):
    """Restricted master LP on columns ``cols``: min t s.t. G[cols]^T p <= t."""
    k = len(cols)
    ncut = G.shape[1]
    c = np.zeros(k + 1)
    c[-1] = 1.0
    A_ub = np.hstack([G[cols].T, -np.ones((ncut, 1))])
    Aeq, beq = _mean_constraints(Xf[cols], x0)
    A_eq = np.hstack([Aeq, np.zeros((Aeq.shape[0], 1))])
    bounds = [(0, None)] * k + [(None, None)]
    res = _linprog(c, A_ub=A_ub, b_ub=np.zeros(ncut), A_eq=A_eq, b_eq=beq, bounds=bounds)
    if res.status != 0:
        raise ValidationError(f"master LP failed: {res.message}")
    return res.x[:k], res.ineqlin.marginals, res.eqlin.marginals, res.x[-1]


def _generate(solve, G, Xf, N, cols, price_batch):
    """Column generation: re-solve on ``cols`` until no signing prices out.

    ``solve(cols)`` returns (p, cut duals, mean duals, ...). The reduced cost
    of signing x is -(G[x] . cut duals) - x . mean duals - mass dual.
    """
    while True:
        out = solve(cols)
        if out is None:
            return None, cols
        p, mu_ub, y_eq = out[0], out[1], out[2]
        reduced = -(G @ mu_ub) - Xf @ y_eq[:N] - y_eq[N]
        reduced[cols] = np.inf
        cand = np.flatnonzero(reduced < -LP_TOL)
        if len(cand) == 0:
            return out, cols
        order = cand[np.argsort(reduced[cand], kind="stable")][:price_batch]
        cols = cols + sorted(order.tolist())


def _cuts(ev, vecs, t):
    hot = [j for j in range(len(ev)) if ev[j] > t + LP_TOL * max(1.0, abs(t))] or [len(ev) - 1]
    return [_unit_sign(vecs[:, j]) for j in hot]


def _independent_rows(A, b, tol=1e-10):
    """Drop linearly dependent equality rows (cvxopt needs full row rank)."""
    _, R, piv = qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.count_nonzero(diag > tol * max(1.0, diag[0] if len(diag) else 1.0)))
    keep = np.sort(piv[:rank])
    return A[keep], b[keep]


def _restricted_sdp(W, Xf, x0, cols):
    """min lambda_max(sum_s p_s w_s w_s^T) over mean-x0 p on the given columns.

    Solved as an SDP with cvxopt. Returns (p, dual matrix Y) or None if the
    interior-point solver does not reach optimality.
    """
    Wc = W[cols]
    k, d = Wc.shape
    outer = np.einsum("si,sj->sij", Wc, Wc).reshape(k, d * d)
    Gs = np.hstack([outer.T, -np.eye(d).reshape(d * d, 1)])
    Gl = cvxopt.spmatrix(-1.0, range(k), range(k), (k, k + 1))
    Aeq, beq = _mean_constraints(Xf[cols], x0)
    Aeq, beq = _independent_rows(Aeq, beq)
    Aeq = np.hstack([Aeq, np.zeros((Aeq.shape[0], 1))])
    c = np.zeros(k + 1)
    c[-1] = 1.0
    try:
        sol = cvxopt.solvers.sdp(
            cvxopt.matrix(c), Gl=Gl, hl=cvxopt.matrix(np.zeros(k)),
            Gs=[cvxopt.matrix(Gs)], hs=[cvxopt.matrix(np.zeros((d, d)))],
            A=cvxopt.matrix(Aeq), b=cvxopt.matrix(beq),
            options={"show_progress": False, "abstol": 1e-11, "reltol": 1e-11, "feastol": 1e-11,
                     "maxiters": 100},
        )
    except (ValueError, ArithmeticError):
        return None
    if sol["x"] is None or sol["zs"][0] is None:
        return None
    p = np.clip(np.array(sol["x"]).ravel()[:k], 0.0, None)
    Y = np.array(sol["zs"][0])
    return p, 0.5 * (Y + Y.T)


def _fresh(U, new, tol=1e-9):
    """Directions in ``new`` not already (up to sign) in U or earlier in ``new``."""
    out = []
    for u in new:
        basis = np.vstack([U] + out) if out else U
        if np.max(np.abs(basis @ u)) < 1 - tol:
            out.append(u)
    return out


def _top(W, cols, p):
    Wc = W[cols]
    cov = (Wc.T * p) @ Wc
    return np.linalg.eigh(0.5 * (cov + cov.T))


def minimize(family, x0=None, tol: float = 1e-7, cap: int = MINIMIZE_CAP, max_cuts: int = MAX_CUTS,
             price_batch: int = 256, recover: bool = True) -> OracleResult:
    """Cutting-plane minimization of lambda_max(sum_x p_x w_x w_x^T).

    Each round solves the LP min t s.t. sum_x p_x (u_k . w_x)^2 <= t for the
    accumulated directions u_k, over mean-x0 distributions p, by column
    generation over all 2**N signings; then every eigenvector of the current
    covariance with eigenvalue above t is added as a new direction. The LP
    value is a lower bound on C(V, x0) and the best covariance seen is an
    upper bound. Starting directions are the coordinate axes, so the lower
    bound never falls below the trace LP bound.

    With ``recover`` set, each round also solves the eigenvalue problem
    exactly (as a small SDP) on the signings the LP found useful. That
    supplies a better primal point when the optimal top eigenvalue is
    degenerate, and its dual eigenvectors become extra cuts. Bounds are
    still certified only by the LP and by direct eigendecomposition.
    """
    V, x0 = _prepare(family, x0, cap, "minimize")
    d, N = V.shape
    X = all_signings(N)
    Xf = X.astype(float)
    W = (Xf - x0) @ V.T
    U = [np.eye(d)[j] for j in range(d)]
    G = W**2  # G[x, k] = (u_k . w_x)^2
    X0, _ = threshold_coupling(x0)
    cols = list(np.unique(_kernels.encode_signs(X0)))
    best = (np.inf, None, None)
    history = []
    lower = 0.0
    status = "iteration_cap"
    for _ in range(max_cuts):
        master, cols = _generate(lambda cs: _solve_master(G, Xf, x0, cs), G, Xf, N, cols, price_batch)
        p, t = master[0], float(master[3])
        lower = max(lower, t)
        ev, vecs = _top(W, cols, p)
        if ev[-1] < best[0]:
            pos = p > 0
            best = (float(ev[-1]), np.asarray(cols)[pos], p[pos])
        new = _cuts(ev, vecs, t)
        if recover and best[0] - lower > tol:
            reduced = -(G @ master[1]) - Xf @ master[2][:N] - master[2][N]
            cheap = np.argsort(reduced, kind="stable")[:SDP_POOL]
            pool = np.union1d(np.union1d(np.asarray(cols)[p > 0], best[1]), cheap)
            rec = _restricted_sdp(W, Xf, x0, pool)
            if rec is not None:
                p_sdp, Y = rec
                try:
                    q = polish(X[pool], p_sdp, x0, drop=SDP_DROP)
                except ValidationError:
                    q = None
                if q is not None:
                    qcols = np.asarray(_kernels.encode_signs(q.signings))
                    ev2, vecs2 = _top(W, qcols, q.probs)
                    if ev2[-1] < best[0]:
                        best = (float(ev2[-1]), qcols, q.probs.copy())
                    new += _cuts(ev2, vecs2, t)
                yv, yvecs = np.linalg.eigh(Y)
                new += [_unit_sign(yvecs[:, j]) for j in range(d) if yv[j] > 1e-9 * max(yv[-1], 1e-300)]
        history.append((lower, best[0]))
        if best[0] - lower <= tol:
            status = "converged"
            break
        new = _fresh(np.array(U), new)
        if not new:
            status = "stalled"
            break
        U.extend(new)
        G = np.hstack([G, (W @ np.array(new).T) ** 2])
    witness = polish(X[best[1]], best[2], x0)
    upper = covariance_of(V, witness).op_norm
    if upper <= 1e-12:
        status = "exact_zero"
    lower = min(lower, upper)
    return OracleResult(value=upper, lower_bound=lower, upper_bound=upper, witness=witness,
                        status=status, history=history)
