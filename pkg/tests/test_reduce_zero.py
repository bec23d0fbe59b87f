import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from disclab import reduce_zero, setsplit
from disclab.covariance import covariance_of
from disclab.errors import ConstructionError, DimensionError, PreconditionError, ValidationError
from disclab.setsplit import Assignment


def _gadget_rows(fam, i):
    k = int(fam.degrees[i])
    width = 4 if k == 1 else 5
    rows = slice(fam.block_start[i], fam.block_start[i] + width)
    cols = [i] + [c for c in range(fam.n, fam.N) if fam.element_of_column[c] == i]
    cols = [i] + sorted(cols[1:], key=lambda c: fam.aux_slot[c])
    return fam.pattern[rows][:, cols].T


def test_single_set_dimensions(single_set):
    fam = reduce_zero.build(single_set)
    assert (fam.d, fam.N, fam.n1, fam.n2) == (17, 12, 4, 0)


def test_degree_one_gadget(single_set):
    fam = reduce_zero.build(single_set)
    g = _gadget_rows(fam, 0)
    assert g.tolist() == [[1, 1, 0, 0], [1, 0, 1, 1], [0, -1, 1, 1]]


def test_degree_two_gadget():
    inst = setsplit.instance_from_sets(6, [[1, 2, 3, 4], [1, 2, 5, 6]])
    fam = reduce_zero.build(inst)
    assert fam.degrees[0] == 2
    g = _gadget_rows(fam, 0)
    assert g.tolist() == [[1, 0, 0, 0, 0], [1, 1, 1, 0, 0], [0, 1, 0, 1, 1], [0, 0, -1, 1, 1]]


def test_degree_three_has_no_gadget(unsat6):
    fam = reduce_zero.build(unsat6)
    assert fam.block_start[1] == -1  # element 2 occurs three times


def test_columns_unit_norm():
    inst = setsplit.generate_random(16, 11, 3, seed=8, cover=True)
    fam = reduce_zero.build(inst)
    V = fam.vectors
    assert np.allclose(np.linalg.norm(V, axis=0), 1.0, atol=1e-12)
    assert np.all(np.count_nonzero(fam.pattern, axis=0) == 3)
    assert set(np.unique(np.abs(fam.pattern))) == {0, 1}
    d = inst.m + 4 * fam.n1 + 5 * fam.n2
    assert fam.d == d and fam.N == inst.n + 2 * fam.n1 + 3 * fam.n2


def test_rejects_unused_element():
    inst = setsplit.instance_from_sets(5, [[1, 2, 3, 4]])
    with pytest.raises(ConstructionError, match="element 5"):
        reduce_zero.build(inst)


def test_rejects_degree_four():
    inst = setsplit.instance_from_sets(7, [[1, 2, 3, 4], [1, 5, 6, 7], [1, 2, 5, 6], [1, 3, 4, 7]], b=4)
    with pytest.raises(ConstructionError):
        reduce_zero.build(inst)


def test_completion_signs_degree_one(single_set):
    fam = reduce_zero.build(single_set)
    y = reduce_zero.complete_signing(fam, Assignment([1, -1, 1, -1]))
    aux = [y[c] for c in range(4, 12) if fam.element_of_column[c] == 0]
    assert aux == [-1, 1]


def test_completion_signs_degree_two():
    inst = setsplit.instance_from_sets(6, [[1, 2, 3, 4], [1, 2, 5, 6]])
    fam = reduce_zero.build(inst)
    y = reduce_zero.complete_signing(fam, Assignment([-1, 1, 1, -1, 1, -1]))
    aux = [y[c] for c in range(fam.n, fam.N) if fam.element_of_column[c] == 0]
    assert aux == [1, -1, 1]
    w = reduce_zero.signed_sum_pattern(fam, y)
    assert not np.any(w[inst.m:])


def test_completion_dimension(single_set):
    fam = reduce_zero.build(single_set)
    with pytest.raises(DimensionError):
        reduce_zero.complete_signing(fam, Assignment([1, 1]))


@settings(max_examples=80, deadline=None)
@given(st.integers(6, 16), st.integers(0, 2**31), st.data())
def test_completion_zeroes_gadget_coordinates(n, seed, data):
    m = data.draw(st.integers((n + 1) // 2, (3 * n) // 4))
    inst = setsplit.generate_random(n, m, 3, seed, cover=True)
    fam = reduce_zero.build(inst)
    z = Assignment(data.draw(st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n)))
    w = reduce_zero.signed_sum_pattern(fam, reduce_zero.complete_signing(fam, z))
    assert not np.any(w[inst.m:])
    assert np.array_equal(w[: inst.m], setsplit.evaluate(inst, z).per_set_sums)


def test_zero_cov_distribution(single_set):
    fam = reduce_zero.build(single_set)
    dist = reduce_zero.zero_cov_distribution(fam, Assignment([1, 1, -1, -1]))
    assert dist.support_size == 2
    assert np.array_equal(dist.mean(), np.zeros(12))
    rep = covariance_of(fam, dist)
    assert rep.op_norm <= 1e-12


def test_zero_cov_requires_split(single_set):
    fam = reduce_zero.build(single_set)
    with pytest.raises(PreconditionError):
        reduce_zero.zero_cov_distribution(fam, Assignment([1, 1, 1, 1]))


def test_trace_gap_bound(single_set):
    fam = reduce_zero.build(single_set)
    assert reduce_zero.trace_gap_bound(fam, 1) == pytest.approx(12 / 17)
    assert reduce_zero.trace_gap_bound(fam, 0) == 0
    for seed in range(20):
        inst = setsplit.generate_random(12, 8, 3, seed, cover=True)
        assert reduce_zero.trace_gap_bound(reduce_zero.build(inst), 1) >= 4 / 23


def test_unsplit_energy_bound_is_pointwise(unsat6):
    # every signing leaves >= gamma*m top coordinates nonzero
    fam = reduce_zero.build(unsat6)
    gamma = setsplit.exhaustive_min_unsplit(unsat6)[1]
    from disclab.oracle import all_signings

    X = all_signings(fam.N)
    energy = np.sum((X @ fam.vectors.T) ** 2, axis=1)
    assert energy.min() / fam.d >= reduce_zero.unsplit_energy_bound(fam, gamma) - 1e-12


def test_family_json_round_trip():
    inst = setsplit.generate_random(10, 7, 3, 2, cover=True)
    fam = reduce_zero.build(inst)
    data = fam.to_json()
    assert data["scale"] == "1/sqrt3" and data["kind"] == "zero"
    back = reduce_zero.VectorFamily.from_json(data)
    assert np.array_equal(back.pattern, fam.pattern)
    data["columns"][0][0][1] = -data["columns"][0][0][1]
    with pytest.raises(ValidationError):
        reduce_zero.VectorFamily.from_json(data)
