import itertools

import numpy as np
import pytest

from sigre.lifted_path import (LiftedPath, eval_lifted_point, lifted_coefficient, lifted_level_quadrature,
                               lifted_signature_eq46)
from sigre.signature_core import path_signature

from conftest import random_path


def _rel(a, b):
    return np.abs(a - b).max() / max(1.0, np.abs(b).max())


def test_lifted_point_endpoints(lpath):
    y = LiftedPath(lpath, 3)
    assert y.dim == 15
    np.testing.assert_allclose(eval_lifted_point(y, 0.0), np.eye(15)[0])
    np.testing.assert_allclose(eval_lifted_point(y, 1.0), path_signature(lpath, 3).tensor.flat(), atol=1e-15)


def test_joint_continuity(rng):
    x = random_path(rng, segments=4)
    y = LiftedPath(x, 3)
    c = y.curve
    for k in range(1, c.n_segments):
        left = c.seg_eval(k - 1, np.array([1.0]))
        right = c.seg_eval(k, np.array([0.0]))
        np.testing.assert_allclose(left, right, atol=1e-12)


def test_quadrature_level_one_is_increment(rng):
    x = random_path(rng)
    y = LiftedPath(x, 3)
    for i in (1, 2, 3):
        lvl = lifted_level_quadrature(y, (i,), 0.2, 0.7)
        inc = y(0.7)[y.level_slice(i)] - y(0.2)[y.level_slice(i)]
        np.testing.assert_allclose(lvl.coefficients.ravel(), inc, atol=1e-13)


def test_zero_label_vanishes(lpath):
    y = LiftedPath(lpath, 2)
    assert not lifted_level_quadrature(y, (1, 0, 2)).coefficients.any()
    assert not lifted_signature_eq46(path_signature(lpath, 3), (0, 3)).coefficients.any()


def test_label_above_degree_rejected(lpath):
    with pytest.raises(ValueError):
        lifted_level_quadrature(LiftedPath(lpath, 2), (3,))


def test_quadrature_chen(rng):
    x = random_path(rng, segments=4)
    y = LiftedPath(x, 2)
    labels = (1, 2, 1)
    s, t, u = 0.1, 0.45, 0.9
    whole = lifted_level_quadrature(y, labels, s, u).coefficients
    acc = np.zeros_like(whole)
    for k in range(len(labels) + 1):
        left = lifted_level_quadrature(y, labels[:k], s, t).coefficients if k else np.array(1.0)
        right = lifted_level_quadrature(y, labels[k:], t, u).coefficients if k < 3 else np.array(1.0)
        acc += np.multiply.outer(left, right)
    assert _rel(acc, whole) < 1e-10


def test_quadrature_against_dense_sum(rng):
    # independent oracle: left Riemann sums on a fine grid converge to the same value
    x = random_path(rng, segments=3)
    y = LiftedPath(x, 2)
    t = np.linspace(0, 1, 20001)
    pts = y(t)
    a, b = pts[:, y.level_slice(1)], pts[:, y.level_slice(2)]
    mid = 0.5 * (a[1:] + a[:-1]) - a[0]
    ref = np.einsum("ti,tj->ij", mid, np.diff(b, axis=0)).reshape(2, 2, 2)
    got = lifted_level_quadrature(y, (1, 2)).coefficients
    assert np.abs(got - ref).max() < 1e-6


def test_closed_form_single_label_is_signature_level(rng):
    g = path_signature(random_path(rng), 3)
    np.testing.assert_array_equal(lifted_signature_eq46(g, (3,)).coefficients, g.tensor.levels[3])


def test_closed_form_one_one_is_level_two(rng):
    x = random_path(rng)
    g = path_signature(x, 2)
    np.testing.assert_allclose(lifted_signature_eq46(g, (1, 1)).coefficients, g.tensor.levels[2])
    q = lifted_level_quadrature(LiftedPath(x, 1), (1, 1)).coefficients
    assert _rel(q, g.tensor.levels[2]) < 1e-10


@pytest.mark.parametrize("labels", [(1, 2), (2, 1), (2, 2), (1, 1, 2), (2, 1, 2), (1, 3, 1)])
def test_closed_form_matches_quadrature(rng, labels):
    x = random_path(rng, segments=4)
    g = path_signature(x, sum(labels))
    q = lifted_level_quadrature(LiftedPath(x, max(labels)), labels).coefficients
    assert _rel(lifted_signature_eq46(g, labels).coefficients, q) < 1e-10


@pytest.mark.parametrize("composition,convention", [("inner", "positions"), ("outer", "inverse"),
                                                    ("inner", "inverse")])
def test_alternative_conventions_disagree(rng, composition, convention):
    x = random_path(rng, segments=4)
    labels = (2, 2, 2)
    g = path_signature(x, 6)
    q = lifted_level_quadrature(LiftedPath(x, 2), labels).coefficients
    alt = lifted_signature_eq46(g, labels, composition=composition, convention=convention).coefficients
    assert _rel(alt, q) > 1e-3


def test_closed_form_insufficient_degree(lpath):
    with pytest.raises(ValueError):
        lifted_signature_eq46(path_signature(lpath, 2), (1, 2))


def test_lifted_shuffle_identity(rng):
    # shuffle identity over E_N letters: S(L1) S(L2 L3) = sum over interleavings
    x = random_path(rng, segments=4)
    g = path_signature(x, 6)
    letters = [(1,), (2, 1), (1, 2)]
    for a, b, c in itertools.permutations(letters):
        lhs = lifted_coefficient(g, [a]) * lifted_coefficient(g, [b, c])
        rhs = sum(lifted_coefficient(g, w) for w in ([a, b, c], [b, a, c], [b, c, a]))
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs))
