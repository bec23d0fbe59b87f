"""(b,2-2) Set-Splitting instances: representation, generation, exhaustive search.

Element indices are 0-based internally and 1-based in JSON.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import CapacityError, DimensionError, GenerationError, ParameterError, ValidationError

DEFAULT_ENUM_CAP = 24


@dataclass(frozen=True)
class SetSplitInstance:
    n: int
    sets: tuple  # tuple of sorted 0-based 4-tuples
    b: int

    def __post_init__(self):
        sets = tuple(tuple(int(i) for i in s) for s in self.sets)
        object.__setattr__(self, "sets", sets)
        if self.n < 1 or self.b < 1:
            raise ValidationError("n and b must be positive")
        for s in sets:
            if len(s) != 4 or len(set(s)) != 4:
                raise ValidationError(f"set {s} must hold 4 distinct elements")
            if min(s) < 0 or max(s) >= self.n:
                raise ValidationError(f"set {s} has an element outside 0..{self.n - 1}")
        deg = self.degrees()
        if len(deg) and deg.max(initial=0) > self.b:
            raise ValidationError(f"an element occurs {deg.max()} times, bound b={self.b}")

    @property
    def m(self) -> int:
        return len(self.sets)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for s in self.sets:
            deg[list(s)] += 1
        return deg

    def incidence(self) -> np.ndarray:
        """m x n 0/1 incidence matrix (int64)."""
        A = np.zeros((self.m, self.n), dtype=np.int64)
        for j, s in enumerate(self.sets):
            A[j, list(s)] = 1
        return A

    def to_json(self) -> dict:
        return {"n": self.n, "b": self.b, "sets": [[i + 1 for i in s] for s in self.sets]}

    @classmethod
    def from_json(cls, data: dict) -> "SetSplitInstance":
        try:
            return cls(int(data["n"]), tuple(tuple(int(i) - 1 for i in s) for s in data["sets"]), int(data["b"]))
        except KeyError as exc:
            raise ValidationError(f"instance JSON is missing field {exc}") from None


@dataclass(frozen=True, eq=False)
class Assignment:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int64).ravel()
        if not np.all(np.abs(v) == 1):
            raise ValidationError("assignment entries must be +1 or -1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)

    def __neg__(self):
        return Assignment(-self.values)

    def __eq__(self, other):
        return isinstance(other, Assignment) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    def to_json(self) -> dict:
        return {"values": [int(x) for x in self.values]}

    @classmethod
    def from_json(cls, data: dict) -> "Assignment":
        return cls(np.array(data["values"]))


@dataclass(frozen=True)
class SplitReport:
    split_count: int
    unsplit_count: int
    per_set_sums: np.ndarray = field(repr=False)

    @property
    def unsplit_fraction(self) -> Fraction:
        m = self.split_count + self.unsplit_count
        return Fraction(self.unsplit_count, m) if m else Fraction(0)


def evaluate(instance: SetSplitInstance, a: Assignment) -> SplitReport:
    if len(a) != instance.n:
        raise DimensionError(f"assignment has length {len(a)}, instance has n={instance.n}")
    sums = instance.incidence() @ a.values if instance.m else np.zeros(0, dtype=np.int64)
    split = int(np.count_nonzero(sums == 0))
    return SplitReport(split, instance.m - split, sums)


def exhaustive_min_unsplit(instance: SetSplitInstance, cap: int = DEFAULT_ENUM_CAP, use_numba=None):
    """Best assignment over all 2**n, and the minimum unsplit fraction.

    Ties go to the lexicographically smallest assignment with +1 ordered
    before -1.
    """
    if instance.n > cap:
        raise CapacityError("exhaustive_min_unsplit", instance.n, cap)
    if instance.m == 0:
        return Assignment(np.ones(instance.n)), Fraction(0)
    masks = _kernels.set_masks(instance.sets, instance.n)
    count, index = _kernels.min_unsplit(masks, instance.n, use_numba=use_numba)
    best = Assignment(_kernels.decode_signs([index], instance.n)[0])
    return best, Fraction(count, instance.m)


def _check_params(n, m, b):
    if n < 4 or m < 1 or b < 1:
        raise ParameterError(f"need n >= 4, m >= 1, b >= 1 (got n={n}, m={m}, b={b})")
    if 4 * m > b * n:
        raise ParameterError(f"4m > bn ({4 * m} > {b * n})")


def _sample(rng, n, m, b, groups, per_group, cover, max_restarts):
    """Draw m distinct sets, ``per_group[g]`` elements from ``groups[g]`` each."""
    for _ in range(max_restarts):
        deg = np.zeros(n, dtype=np.int64)
        seen = set()
        sets = []
        for _ in range(m):
            members = []
            for g, k in zip(groups, per_group):
                open_ = g[deg[g] < b]
                if len(open_) < k:
                    break
                members.extend(rng.choice(open_, size=k, replace=False).tolist())
            else:
                s = tuple(sorted(members))
                if s not in seen:
                    seen.add(s)
                    sets.append(s)
                    deg[list(s)] += 1
                    continue
            break
        if len(sets) == m and (not cover or deg.min() >= 1):
            return tuple(sets)
    raise GenerationError(f"no instance found within {max_restarts} restarts (n={n}, m={m}, b={b})")


def generate_random(n: int, m: int, b: int, seed: int, cover: bool = False,
                    max_restarts: int = 20000) -> SetSplitInstance:
    """Random instance with m distinct 4-sets and occurrence bound b.

    With ``cover=True`` every element is required to occur at least once
    (needed by the zero-mean reduction, which rejects unused elements).
    """
    _check_params(n, m, b)
    rng = np.random.default_rng(seed)
    sets = _sample(rng, n, m, b, [np.arange(n)], [4], cover, max_restarts)
    return SetSplitInstance(n, sets, b)


def generate_satisfiable(n: int, m: int, b: int, seed: int, cover: bool = False,
                         max_restarts: int = 20000) -> tuple[SetSplitInstance, Assignment]:
    """Planted instance: every set takes two elements from each side of a hidden assignment."""
    _check_params(n, m, b)
    rng = np.random.default_rng(seed)
    plus = rng.permutation(n)[: n // 2]
    z = -np.ones(n, dtype=np.int64)
    z[plus] = 1
    groups = [np.flatnonzero(z == 1), np.flatnonzero(z == -1)]
    sets = _sample(rng, n, m, b, groups, [2, 2], cover, max_restarts)
    return SetSplitInstance(n, sets, b), Assignment(z)


def load_instance(path) -> SetSplitInstance:
    with open(path) as fh:
        return SetSplitInstance.from_json(json.load(fh))


def instance_from_sets(n: int, sets: Sequence[Sequence[int]], b: int = 3) -> SetSplitInstance:
    """Build from 1-indexed sets, as written in the JSON schema."""
    return SetSplitInstance(n, tuple(tuple(i - 1 for i in s) for s in sets), b)
