import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensorlattice.errors import MismatchError, NonFiniteError, RangeError, ShapeError
from tensorlattice.partitions import Partition, enumerate_partitions, is_refinement
from tensorlattice.tensor import (
    Tensor,
    frobenius,
    inner_product,
    make_tensor,
    multilinear_apply,
    multilinear_matrix_mult,
    outer_rank1,
    refold,
    unfold,
    unfold_index,
    unfolded_dims,
)


def P(text, k=None):
    return Partition.parse(text, k)


def all_indices(dims):
    return itertools.product(*[range(1, d + 1) for d in dims])


def brute_unfold(tensor, part):
    """Entry-by-entry unfolding driven by the index map."""
    out = np.zeros(unfolded_dims(tensor.dims, part))
    for idx in all_indices(tensor.dims):
        m = unfold_index(part, tensor.dims, idx)
        out[tuple(v - 1 for v in m)] = tensor.data[tuple(i - 1 for i in idx)]
    return out


def test_make_tensor_layout():
    a = make_tensor((2, 2), (1, 0, 1, 4))
    np.testing.assert_array_equal(a.data, [[1, 1], [0, 4]])
    assert make_tensor((3,), [1, 2, 3]).order == 1
    with pytest.raises(ShapeError):
        make_tensor((2, 2), [1, 2, 3])
    with pytest.raises(NonFiniteError):
        make_tensor((2,), [1, float("nan")])
    with pytest.raises(NonFiniteError):
        Tensor(np.array([np.inf, 1.0]))


def test_linear_offset_formula(rng):
    dims = (2, 3, 4)
    a = make_tensor(dims, rng.standard_normal(24))
    for idx in all_indices(dims):
        off = 1 + sum((i - 1) * math.prod(dims[:r]) for r, i in enumerate(idx))
        assert a.values[off - 1] == a.data[tuple(i - 1 for i in idx)]


def test_tensor_is_immutable():
    a = make_tensor((2,), [1, 2])
    with pytest.raises(ValueError):
        a.data[0] = 5


def test_unfold_index_examples():
    assert unfold_index(Partition.bottom(3), (2, 3, 4), (2, 3, 1)) == (2, 3, 1)
    assert unfold_index(P("1,2|3,4"), (2, 2, 2, 2), (2, 1, 1, 2)) == (2, 3)
    assert unfold_index(Partition.top(2), (2, 3), (2, 3)) == (6,)
    with pytest.raises(RangeError):
        unfold_index(P("1,2"), (2, 3), (3, 1))


def test_unfold_index_bijective():
    for k in range(1, 5):
        dims = (3, 2, 3, 2)[:k]
        for part in enumerate_partitions(k):
            images = {unfold_index(part, dims, idx) for idx in all_indices(dims)}
            target = set(all_indices(unfolded_dims(dims, part)))
            assert images == target


def test_unfold_examples(rng):
    a = make_tensor((2, 2, 2, 2), rng.standard_normal(16))
    np.testing.assert_array_equal(unfold(a, Partition.bottom(4)).data, a.data)
    assert unfold(a, P("1,2,3|4")).dims == (8, 2)
    assert unfold(a, P("1,2|3,4")).dims == (4, 4)
    assert unfold(a, P("1,2|3|4")).dims == (4, 2, 2)
    vec = unfold(a, Partition.top(4))
    assert vec.dims == (16,)
    np.testing.assert_array_equal(vec.data, a.values)
    # (2,3) entry of the 4x4 matricization is a_{2112}
    assert unfold(a, P("1,2|3,4")).data[1, 2] == a.data[1, 0, 0, 1]
    with pytest.raises(MismatchError):
        unfold(a, Partition.bottom(3))


def test_unfold_matches_index_map(rng):
    dims = (2, 3, 2, 3)
    a = make_tensor(dims, rng.standard_normal(math.prod(dims)))
    for part in enumerate_partitions(4):
        np.testing.assert_array_equal(unfold(a, part).data, brute_unfold(a, part))


def test_refold_round_trip(rng):
    a = make_tensor((2, 3, 2), rng.standard_normal(12))
    for part in enumerate_partitions(3):
        np.testing.assert_array_equal(refold(unfold(a, part), part, a.dims).data, a.data)
    b = make_tensor((2, 3, 2, 3), rng.standard_normal(36))
    for part in enumerate_partitions(4):
        np.testing.assert_array_equal(refold(unfold(b, part), part, b.dims).data, b.data)
    with pytest.raises(ShapeError):
        refold(unfold(a, P("1,2|3")), P("1,2|3"), (3, 3, 2))
    with pytest.raises(ShapeError):
        refold(unfold(a, P("1,2|3")), P("1|2,3"), a.dims)


def test_inner_product_examples(rng):
    a = make_tensor((2, 3), rng.standard_normal(6))
    b = make_tensor((2, 3), rng.standard_normal(6))
    assert inner_product(a, a) == pytest.approx(frobenius(a) ** 2, rel=1e-14)
    e1, e2 = np.eye(2)
    assert inner_product(outer_rank1(e1, e1), outer_rank1(e1, e2)) == 0
    assert inner_product(a, b) == pytest.approx(inner_product(b, a), rel=1e-15)
    with pytest.raises(MismatchError):
        inner_product(a, make_tensor((3, 2), np.zeros(6)))


def test_frobenius_examples():
    assert frobenius(make_tensor((2, 2), (1, 0, 1, 4))) == pytest.approx(math.sqrt(18), rel=1e-15)
    e1, e2 = np.eye(2)
    remark = outer_rank1(e1, e1) * 2 + outer_rank1(e1, e2)
    assert frobenius(remark) == pytest.approx(math.sqrt(5), rel=1e-15)


def test_unfolding_invariance(rng):
    dims = (2, 3, 2, 3)
    for _ in range(10):
        a = make_tensor(dims, rng.standard_normal(36))
        b = make_tensor(dims, rng.standard_normal(36))
        fa, ab = frobenius(a), inner_product(a, b)
        for part in enumerate_partitions(4):
            ua, ub = unfold(a, part), unfold(b, part)
            assert abs(frobenius(ua) - fa) <= 1e-12 * max(1, fa)
            assert abs(inner_product(ua, ub) - ab) <= 1e-12 * max(1, abs(ab))


def _compatible(fine, coarse):
    # concatenating fine blocks inside each coarse block keeps modes ascending
    for cblock in coarse.blocks:
        modes = [m for b in fine.blocks if b[0] in cblock for m in b]
        if modes != sorted(modes):
            return False
    return True


def test_successive_unfolding_composes(rng):
    dims = (2, 3, 2, 2)
    a = make_tensor(dims, rng.standard_normal(math.prod(dims)))
    parts = enumerate_partitions(4)
    for fine in parts:
        first = unfold(a, fine)
        for coarse in parts:
            if not is_refinement(fine, coarse):
                continue
            induced = Partition.from_rgs([coarse.block_of(b[0]) for b in fine.blocks])
            second = unfold(first, induced)
            direct = unfold(a, coarse)
            assert second.dims == direct.dims
            if _compatible(fine, coarse):
                np.testing.assert_array_equal(second.data, direct.data)
            # in general the two agree after relabelling indices within each merged mode
            relabel = [dict() for _ in coarse.blocks]
            for idx in all_indices(dims):
                via = unfold_index(induced, first.dims, unfold_index(fine, dims, idx))
                to = unfold_index(coarse, dims, idx)
                for j, (s, t) in enumerate(zip(via, to)):
                    assert relabel[j].setdefault(s, t) == t
                assert second.data[tuple(v - 1 for v in via)] == direct.data[tuple(v - 1 for v in to)]


def test_multilinear_apply_examples(rng):
    u, v = rng.standard_normal(3), rng.standard_normal(4)
    x1, x2 = rng.standard_normal(3), rng.standard_normal(4)
    got = multilinear_apply(outer_rank1(u, v), x1, x2)
    assert got == pytest.approx((u @ x1) * (v @ x2), rel=1e-13)
    e1 = np.eye(2)[0]
    assert multilinear_apply(Tensor(np.eye(2)), e1, e1) == 1
    with pytest.raises(MismatchError):
        multilinear_apply(Tensor(np.eye(2)), e1)
    with pytest.raises(MismatchError):
        multilinear_apply(Tensor(np.eye(2)), e1, np.ones(3))


def test_multilinear_matrix_mult(rng):
    a = make_tensor((2, 3, 4), rng.standard_normal(24))
    same = multilinear_matrix_mult(a, np.eye(2), np.eye(3), np.eye(4))
    np.testing.assert_allclose(same.data, a.data, rtol=0, atol=1e-15)
    m = Tensor(rng.standard_normal((3, 4)))
    m1, m2 = rng.standard_normal((3, 2)), rng.standard_normal((4, 5))
    np.testing.assert_allclose(multilinear_matrix_mult(m, m1, m2).data, m1.T @ m.data @ m2, rtol=1e-13)
    xs = [rng.standard_normal(d) for d in a.dims]
    wrapped = multilinear_matrix_mult(a, *[x[:, None] for x in xs])
    assert wrapped.dims == (1, 1, 1)
    assert wrapped.data.item() == pytest.approx(multilinear_apply(a, *xs), rel=1e-14)
    with pytest.raises(MismatchError):
        multilinear_matrix_mult(a, np.eye(3), np.eye(3), np.eye(4))


def test_outer_rank1(rng):
    e1 = np.eye(2)[0]
    np.testing.assert_array_equal(outer_rank1(e1, e1).data, [[1, 0], [0, 0]])
    xs = [rng.standard_normal(d) for d in (2, 3, 4)]
    t = outer_rank1(*xs)
    assert frobenius(t) == pytest.approx(math.prod(np.linalg.norm(x) for x in xs), rel=1e-14)
    a = make_tensor((2, 3, 4), rng.standard_normal(24))
    assert inner_product(a, t) == pytest.approx(multilinear_apply(a, *xs), rel=1e-13)


def test_json_round_trip(tmp_path, rng):
    from tensorlattice.tensor import load_tensor, save_tensor

    a = make_tensor((2, 3), rng.standard_normal(6))
    save_tensor(a, tmp_path / "a.json")
    b = load_tensor(tmp_path / "a.json")
    np.testing.assert_array_equal(a.data, b.data)
    with pytest.raises(ShapeError):
        Tensor.from_json({"dims": [2, 2], "data": [1, 2, 3]})
    with pytest.raises(NonFiniteError):
        Tensor.from_json({"dims": [2], "data": [1, float("inf")]})


@settings(max_examples=60, deadline=None)
@given(
    dims=st.lists(st.integers(1, 3), min_size=1, max_size=4),
    seed=st.integers(0, 2**32 - 1),
    data=st.data(),
)
def test_unfold_properties(dims, seed, data):
    parts = enumerate_partitions(len(dims))
    part = data.draw(st.sampled_from(parts))
    rng = np.random.default_rng(seed)
    a = make_tensor(dims, rng.standard_normal(math.prod(dims)))
    b = make_tensor(dims, rng.standard_normal(math.prod(dims)))
    u = unfold(a, part)
    assert u.size == a.size
    np.testing.assert_array_equal(refold(u, part, a.dims).data, a.data)
    assert abs(frobenius(u) - frobenius(a)) <= 1e-12 * max(1, frobenius(a))
    ip = inner_product(a, b)
    assert abs(inner_product(u, unfold(b, part)) - ip) <= 1e-12 * max(1, abs(ip))
    xs = [rng.standard_normal(d) for d in dims]
    direct = multilinear_apply(a, *xs)
    via = multilinear_matrix_mult(a, *[x[:, None] for x in xs]).data.item()
    assert abs(direct - via) <= 1e-14 * max(1, abs(direct)) * 10
