import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigre.tensor_algebra import (TruncatedTensor, apply_permutation, check_group_like, compose,
                                  flat_dim, group_like_defect, shuffle_mul, shuffles, tensor_exp,
                                  tensor_mul, word_index, words)


def _random_tensor(rng, d, N, unit=True):
    levels = [np.array(1.0 if unit else rng.standard_normal())]
    levels += [rng.standard_normal((d,) * k) for k in range(1, N + 1)]
    return TruncatedTensor(levels, d=d)


def _basis(d, word):
    a = np.zeros((d,) * len(word))
    a[tuple(i - 1 for i in word)] = 1.0
    return a


def test_coefficient_count():
    for d, N in [(1, 3), (2, 4), (3, 2)]:
        t = TruncatedTensor.unit(d, N)
        assert t.flat().size == flat_dim(d, N) == sum(d**k for k in range(N + 1))


def test_word_order_matches_flat_index():
    ws = list(words(2, 3))
    assert ws[:4] == [(), (1,), (2,), (1, 1)]
    assert [word_index(w, 2) for w in ws] == list(range(len(ws)))


def test_word_index_rejects_bad_letter():
    with pytest.raises(ValueError):
        word_index((3,), 2)


def test_tensor_mul_small():
    a = TruncatedTensor([np.array(1.0), np.array([1.0, 0.0]), np.zeros((2, 2))])
    b = TruncatedTensor([np.array(1.0), np.array([0.0, 1.0]), np.zeros((2, 2))])
    c = tensor_mul(a, b, 2)
    assert c[(1,)] == 1 and c[(2,)] == 1
    assert c[(1, 2)] == 1 and c[(2, 1)] == 0 and c[(1, 1)] == 0


def test_unit_is_identity(rng):
    a = _random_tensor(rng, 2, 4, unit=False)
    u = TruncatedTensor.unit(2, 4)
    np.testing.assert_array_equal(tensor_mul(a, u).flat(), a.flat())
    np.testing.assert_array_equal(tensor_mul(u, a).flat(), a.flat())


def test_associative(rng):
    a, b, c = (_random_tensor(rng, 2, 4, unit=False) for _ in range(3))
    lhs = tensor_mul(tensor_mul(a, b), c).flat()
    rhs = tensor_mul(a, tensor_mul(b, c)).flat()
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(lhs))


def test_mul_dimension_mismatch():
    with pytest.raises(ValueError):
        tensor_mul(TruncatedTensor.unit(2, 2), TruncatedTensor.unit(3, 2))


def test_mul_degree_too_high():
    with pytest.raises(ValueError):
        tensor_mul(TruncatedTensor.unit(2, 2), TruncatedTensor.unit(2, 3), N=3)


def test_shuffle_e1_e2():
    out = shuffle_mul(_basis(2, (1,)), _basis(2, (2,)))
    np.testing.assert_array_equal(out, _basis(2, (1, 2)) + _basis(2, (2, 1)))


def test_shuffle_scalar_is_identity(rng):
    a = rng.standard_normal((2, 2, 2))
    np.testing.assert_allclose(shuffle_mul(np.array(1.0), a), a)


def test_shuffle_e1_e1e2():
    out = shuffle_mul(_basis(2, (1,)), _basis(2, (1, 2)))
    np.testing.assert_array_equal(out, 2 * _basis(2, (1, 1, 2)) + _basis(2, (1, 2, 1)))


def _brute_shuffle(a, b):
    d = a.shape[0] if a.ndim else b.shape[0]
    m, n = a.ndim, b.ndim
    out = np.zeros((d,) * (m + n))
    for w in itertools.product(range(d), repeat=m + n):
        for pos in itertools.combinations(range(m + n), m):
            u = tuple(w[p] for p in pos)
            v = tuple(w[p] for p in range(m + n) if p not in pos)
            out[w] += a[u] * b[v]
    return out


@pytest.mark.parametrize("m,n", [(1, 1), (1, 2), (2, 2), (3, 1)])
def test_shuffle_matches_bruteforce(rng, m, n):
    a, b = rng.standard_normal((2,) * m), rng.standard_normal((2,) * n)
    np.testing.assert_allclose(shuffle_mul(a, b), _brute_shuffle(a, b), atol=1e-13)


def test_shuffle_commutative_associative(rng):
    a, b, c = rng.standard_normal((2,)), rng.standard_normal((2, 2)), rng.standard_normal((2,))
    np.testing.assert_allclose(shuffle_mul(a, b), shuffle_mul(b, a), atol=1e-13)
    np.testing.assert_allclose(shuffle_mul(shuffle_mul(a, b), c), shuffle_mul(a, shuffle_mul(b, c)),
                               atol=1e-12)


def test_shuffle_count():
    assert len(shuffles(2, 3)) == 10
    assert all(sorted(s) == list(range(5)) for s in shuffles(2, 3))


def test_group_like_exp():
    assert check_group_like(tensor_exp([1.0, 2.0], 4), 1e-10)


def test_group_like_fails_without_level_two():
    a = TruncatedTensor([np.array(1.0), np.array([1.0, 0.0]), np.zeros((2, 2))])
    assert not check_group_like(a, 1e-9)


def test_group_like_requires_unit():
    a = TruncatedTensor([np.array(2.0), np.zeros(2), np.zeros((2, 2))])
    with pytest.raises(ValueError):
        check_group_like(a, 1e-9)


def test_group_like_defect_is_convention_sensitive(rng):
    g = tensor_mul(tensor_exp(rng.standard_normal(2), 4), tensor_exp(rng.standard_normal(2), 4))
    assert group_like_defect(g) < 1e-12
    assert group_like_defect(g, convention="inverse") > 1e-3


def test_permutation_identity_and_swap(rng):
    a = rng.standard_normal((2, 2, 2))
    np.testing.assert_array_equal(apply_permutation(a, (0, 1, 2)), a)
    b = _basis(2, (1, 2))
    np.testing.assert_array_equal(apply_permutation(b, (1, 0)), _basis(2, (2, 1)))


def test_permutation_order_mismatch():
    with pytest.raises(ValueError):
        apply_permutation(np.zeros((2, 2)), (0, 1, 2))


@settings(max_examples=40, deadline=None)
@given(st.permutations(range(4)), st.permutations(range(4)), st.integers(0, 2**32 - 1))
def test_permutation_right_action(s, t, seed):
    a = np.random.default_rng(seed).standard_normal((2, 2, 2, 2))
    lhs = apply_permutation(apply_permutation(a, t), s)
    np.testing.assert_array_equal(lhs, apply_permutation(a, compose(t, s)))
