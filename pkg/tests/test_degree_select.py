import itertools
import math

import numpy as np
import pytest

from sigre.degree_select import (DEFAULT_DELTAS, degree_blocks, level_maxima, lift_stabilization,
                                 oracle_degree, projection_is_zero, projection_stabilized_degree,
                                 prop61_check, relative_signature_curve, route_in_halfint_scheme)
from sigre.generators import figure_eight
from sigre.geometry import HalfIntScheme, RouteWord, validate_disjoint
from sigre.path_model import PiecewiseLinearPath
from sigre.signature_core import path_signature


@pytest.fixture(scope="module")
def eight():
    x = figure_eight()
    return x, projection_stabilized_degree(x)


def test_degree_blocks():
    b = degree_blocks(2, 3)
    assert [(s.start, s.stop) for s in b] == [(0, 1), (1, 3), (3, 7), (7, 15)]


def test_projection_is_zero_reports_worst_degree():
    # d = 2, degrees 0..2: flat size 7
    r = RouteWord(((0,) * 7, (0, 1, 0, 0, 0, 0, 0), (0, 0, 0, 0, 0, -1, 0)), (0.0, 0.2, 0.5))
    assert projection_is_zero(r, 2, 1) == (False, 2)
    assert projection_is_zero(r, 2, 2) == (True, None)
    assert projection_is_zero(RouteWord((), ()), 2, 1) == (True, None)


@pytest.mark.parametrize("v", [(0.3, -0.8), (1.2, 0.5), (-0.4, 0.1)])
def test_level_maxima_segment(v):
    x = PiecewiseLinearPath.from_points([[0.0, 0.0], v])
    m = max(abs(v[0]), abs(v[1]))
    want = [0.0] + [m**k / math.factorial(k) for k in range(1, 5)]
    np.testing.assert_allclose(level_maxima(x, 4), want, atol=1e-12)


def test_level_maxima_dominate_final_signature(rng):
    x = PiecewiseLinearPath(np.linspace(0, 1, 5), np.cumsum(rng.standard_normal((5, 2)), axis=0))
    M = level_maxima(x, 3)
    g = path_signature(x, 3)
    for k in range(1, 4):
        final = max(abs(g.tensor[w]) for w in itertools.product((1, 2), repeat=k))
        assert M[k] >= final - 1e-12


def test_relative_curve_starts_at_zero():
    c = relative_signature_curve(figure_eight(), 3)
    np.testing.assert_array_equal(c.coeffs[0, 0], np.zeros(c.dim))


def test_tiny_path_selects_minimum():
    x = PiecewiseLinearPath.from_points([[0.0, 0.0], [0.05, 0.02], [0.03, 0.07]])
    sel = projection_stabilized_degree(x, N_max=4)
    assert sel.N_g == 1
    for rts in sel.routes.values():
        for r in rts.values():
            assert r.labels == ((0,) * len(r.labels[0]),)


def test_figure_eight_degree(eight):
    x, sel = eight
    assert sel.N_g == 2
    assert set(sel.per_delta) == set(DEFAULT_DELTAS)


@pytest.mark.parametrize("delta", DEFAULT_DELTAS)
def test_oracle_bounds_selection(eight, delta):
    x, sel = eight
    assert sel.per_delta[delta] <= oracle_degree(x, delta)


def test_post_check_holds_beyond_selection(eight):
    x, sel = eight
    res = prop61_check(x, sel.N_g)
    assert res["ok"]
    assert max(res["max_by_degree"].values()) <= 0.5


def test_route_letters_lie_in_admissible_lattice(eight):
    x, sel = eight
    for rts in sel.routes.values():
        for r in rts.values():
            for lab in r.labels:
                assert all(k == 0 for k in lab) or any(abs(k) == 1 for k in lab)


def test_halfint_cubes_disjoint(eight):
    x, sel = eight
    r = sel.routes[DEFAULT_DELTAS[0]][3]
    sch = HalfIntScheme(DEFAULT_DELTAS[0], len(r.labels[0]))
    labs = sorted(set(r.labels))
    # add every admissible neighbour of the visited letters in the first three coordinates
    extra = set()
    for lab in labs:
        for I in range(1, 4):
            for k in (-2, -1, 1, 2):
                cand = list(lab)
                cand[I] = k
                if sch.leaf_ok(tuple(cand)):
                    extra.add(tuple(cand))
    rep = validate_disjoint([(None, sch, l) for l in set(labs) | extra])
    assert rep.ok


def _in_box(sch, p, lab):
    return bool(np.all(np.abs(p - sch.center(lab)) < sch.widths(lab)))


def test_halfint_covering_spot_check(rng):
    # a point in the gap between two integer cubes is covered by the half-integer cube between them
    sch = HalfIntScheme(0.1, 3)
    for _ in range(50):
        p = rng.uniform(-0.4, 0.4, 3)
        I = rng.integers(3)
        p[I] = 0.5 + rng.uniform(-0.04, 0.04)
        lab = [0, 0, 0]
        lab[I] = 1
        assert _in_box(sch, p, tuple(lab))
        assert not _in_box(sch, p, (0, 0, 0))


def test_lift_stabilization_default_eight(eight):
    x, sel = eight
    st = lift_stabilization(x, sel.N_g, N_max=5)
    assert st.all_equal
    assert st.N1 == sel.N_g
    assert st.routes[sel.N_g + 1].labels == st.routes[sel.N_g + 3].labels


def test_lift_stabilization_needs_post_check():
    # large loop: degree-three coordinates exceed 1/2, so lifting to N(g) = 2 is not enough
    x = figure_eight(1.6, 0.5)
    assert not prop61_check(x, 2)["ok"]
    st = lift_stabilization(x, 2, N_max=5)
    assert not st.all_equal


def test_runtime_error_when_nmax_too_small():
    with pytest.raises(RuntimeError):
        projection_stabilized_degree(figure_eight(1.6, 0.5), deltas=(1 / 8,), N_max=2)


def test_nmax_must_exceed_nmin():
    with pytest.raises(ValueError):
        projection_stabilized_degree(figure_eight(), N_min=3, N_max=3)


def test_selection_json(eight):
    _, sel = eight
    js = sel.to_json()
    assert js["N_g"] == 2
    assert set(js["per_delta"]) == {repr(float(d)) for d in DEFAULT_DELTAS}


def test_halfint_route_empty_levels_when_small():
    x = PiecewiseLinearPath.from_points([[0.0, 0.0], [0.1, 0.0]])
    r = route_in_halfint_scheme(x, 0.125, 3)
    assert len(r.labels) == 1
