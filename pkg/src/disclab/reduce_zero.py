"""Unit-norm vector family whose zero-mean signings mirror a (3,2-2) instance.

Columns are stored as an integer pattern (entries in {-1, 0, 1}) times the
common scalar 1/sqrt(3), so every cancellation check is integer-exact.

Coordinate layout: the m original sets first, then one gadget block per
element of occurrence 1 (4 coordinates) or 2 (5 coordinates), in element
order. Column layout: the n element vectors, then the auxiliary vectors of
each gadget in element order.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .distribution import SigningDistribution
from .errors import ConstructionError, DimensionError, ParameterError, PreconditionError, ValidationError
from .setsplit import Assignment, SetSplitInstance, evaluate

SCALE = 1.0 / sqrt(3.0)

# rows: element vector, then auxiliary vectors; columns: the gadget block
_GADGET = {
    1: np.array([[1, 1, 0, 0],
                 [1, 0, 1, 1],
                 [0, -1, 1, 1]], dtype=np.int64),
    2: np.array([[1, 0, 0, 0, 0],
                 [1, 1, 1, 0, 0],
                 [0, 1, 0, 1, 1],
                 [0, 0, -1, 1, 1]], dtype=np.int64),
}
# auxiliary signs as multiples of z(i)
_COMPLETION = {1: (-1, 1), 2: (-1, 1, -1)}


@dataclass(frozen=True)
class VectorFamily:
    instance: SetSplitInstance
    pattern: np.ndarray  # d x N int64, entries in {-1, 0, 1}
    element_of_column: np.ndarray  # owning element per column
    aux_slot: np.ndarray  # 0 for element vectors, h for u_{i,h}
    block_start: np.ndarray  # first gadget coordinate per element, -1 if none
    degrees: np.ndarray

    @property
    def d(self) -> int:
        return self.pattern.shape[0]

    @property
    def N(self) -> int:
        return self.pattern.shape[1]

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def m(self) -> int:
        return self.instance.m

    @property
    def n1(self) -> int:
        return int(np.count_nonzero(self.degrees == 1))

    @property
    def n2(self) -> int:
        return int(np.count_nonzero(self.degrees == 2))

    @property
    def vectors(self) -> np.ndarray:
        return self.pattern * SCALE

    def to_json(self) -> dict:
        cols = []
        for c in range(self.N):
            nz = np.flatnonzero(self.pattern[:, c])
            cols.append([[int(r), int(self.pattern[r, c])] for r in nz])
        return {
            "kind": "zero",
            "d": self.d,
            "N": self.N,
            "scale": "1/sqrt3",
            "columns": cols,
            "maps": {
                "n": self.n,
                "m": self.m,
                "b": self.instance.b,
                "sets": [[i + 1 for i in s] for s in self.instance.sets],
                "element_of_column": [int(e) + 1 for e in self.element_of_column],
                "aux_slot": [int(h) for h in self.aux_slot],
                "block_start": [int(s) for s in self.block_start],
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "VectorFamily":
        maps = data["maps"]
        inst = SetSplitInstance.from_json({"n": maps["n"], "b": maps["b"], "sets": maps["sets"]})
        fam = build(inst)
        P = np.zeros((data["d"], data["N"]), dtype=np.int64)
        for c, entries in enumerate(data["columns"]):
            for r, v in entries:
                P[r, c] = v
        if P.shape != fam.pattern.shape or not np.array_equal(P, fam.pattern):
            raise ValidationError("family columns do not match the construction for its instance")
        return fam


def build(instance: SetSplitInstance) -> VectorFamily:
    deg = instance.degrees()
    bad = np.flatnonzero((deg < 1) | (deg > 3))
    if len(bad):
        i = int(bad[0])
        raise ConstructionError(f"element {i + 1} occurs {deg[i]} times; need 1, 2 or 3")
    n, m = instance.n, instance.m
    n1 = int(np.count_nonzero(deg == 1))
    n2 = int(np.count_nonzero(deg == 2))
    d = m + 4 * n1 + 5 * n2
    N = n + 2 * n1 + 3 * n2
    P = np.zeros((d, N), dtype=np.int64)
    owner = np.empty(N, dtype=np.int64)
    slot = np.zeros(N, dtype=np.int64)
    block_start = -np.ones(n, dtype=np.int64)
    owner[:n] = np.arange(n)
    A = instance.incidence()
    P[:m, :n] = A
    row, col = m, n
    for i in range(n):
        k = int(deg[i])
        if k == 3:
            continue
        g = _GADGET[k]
        width = g.shape[1]
        block_start[i] = row
        P[row:row + width, i] = g[0]
        for h in range(1, g.shape[0]):
            P[row:row + width, col] = g[h]
            owner[col], slot[col] = i, h
            col += 1
        row += width
    return VectorFamily(instance, P, owner, slot, block_start, deg)


def complete_signing(family: VectorFamily, z: Assignment) -> np.ndarray:
    """Extend z to all N columns so every gadget coordinate of the signed sum is 0."""
    if len(z) != family.n:
        raise DimensionError(f"assignment has length {len(z)}, family has n={family.n}")
    y = np.empty(family.N, dtype=np.int64)
    y[: family.n] = z.values
    aux = np.arange(family.n, family.N)
    owners = family.element_of_column[aux]
    signs = np.array([_COMPLETION[int(family.degrees[e])][h - 1]
                      for e, h in zip(owners, family.aux_slot[aux])], dtype=np.int64)
    y[aux] = signs * z.values[owners]
    return y


def signed_sum_pattern(family: VectorFamily, y) -> np.ndarray:
    """Integer signed sum; the real signed sum is this times 1/sqrt(3)."""
    return family.pattern @ np.asarray(y, dtype=np.int64)


def zero_cov_distribution(family: VectorFamily, z: Assignment) -> SigningDistribution:
    report = evaluate(family.instance, z)
    if report.unsplit_count:
        raise PreconditionError(f"assignment leaves {report.unsplit_count} set(s) unsplit")
    y = complete_signing(family, z)
    return SigningDistribution(np.stack([y, -y]), [0.5, 0.5], np.zeros(family.N))


def trace_gap_bound(family: VectorFamily, gamma) -> float:
    """gamma * N / d, the gap constant of the trace argument (>= 4 gamma / 23)."""
    gamma = float(gamma)
    if not 0 <= gamma <= 1:
        raise ParameterError("gamma must lie in [0, 1]")
    return gamma * family.N / family.d


def unsplit_energy_bound(family: VectorFamily, gamma) -> float:
    """(4/3) * gamma * m / d.

    Every signing of a gamma-unsatisfiable family has at least gamma*m
    nonzero top coordinates, each of magnitude >= 2/sqrt(3), so this lower
    bounds E||w||^2 / d and hence the covariance operator norm at x0 = 0.
    """
    gamma = float(gamma)
    if not 0 <= gamma <= 1:
        raise ParameterError("gamma must lie in [0, 1]")
    return 4.0 / 3.0 * gamma * family.m / family.d
