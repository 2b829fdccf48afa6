"""Iterated integrals of the truncated signature path over ``E_N``.

Two independent routes to the lifted levels ``Y^{n; i_1..i_n}`` are provided:

* :func:`lifted_level_quadrature` integrates ``h_j = int h_{j-1} (x) dy^{(i_j)}``
  segment by segment with a Gauss-Legendre cumulative rule. Integrands are
  polynomial on each base segment, so the rule is exact once its order reaches
  ``i_1 + ... + i_n``.
* :func:`lifted_signature_eq46` evaluates the closed form over ``[0, 1]`` as a
  sum over chained shuffles of permuted top-level signature coefficients.

Permutation convention
----------------------
``P^sigma`` is :func:`~sigre.tensor_algebra.apply_permutation` (a right action,
``P^s P^t = P^{t o s}``). The shuffle ``sigma_j`` of the ``j``-th factor acts on
the first ``i_1 + ... + i_{j+1} - 1`` positions and fixes the remaining
``i_{j+2} + ... + i_n + 1``. The composite ``sigma_{n-1} o ... o sigma_1`` is
ordinary function composition. Both choices are pinned by agreement with the
quadrature oracle (see the test-suite, which also shows that the alternatives
disagree).
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from ._quadrature import cumulative_matrix, gauss_nodes
from .path_model import PiecewiseLinearPath
from .signature_core import SignatureResult, signature_path_curve
from .tensor_algebra import TruncatedTensor, apply_permutation, compose, flat_dim, shuffles

__all__ = [
    "LiftedPath",
    "LiftedLevel",
    "lifted_level_quadrature",
    "lifted_signature_eq46",
    "eval_lifted_point",
    "lifted_coefficient",
]


class LiftedPath:
    """A piecewise-linear base path together with a truncation degree ``N``.

    Parameters
    ----------
    base : PiecewiseLinearPath
        Path in ``R^d`` starting anywhere; only increments matter.
    N : int
        Truncation degree of the signature path ``y_t = X^(N)_{0,t}``.
    """

    def __init__(self, base: PiecewiseLinearPath, N: int):
        if N < 1:
            raise ValueError("lifted degree must be at least 1")
        self.base = base
        self.N = int(N)
        self.d = base.dim
        self.curve = signature_path_curve(base, self.N)

    @property
    def dim(self) -> int:
        """Dimension ``D_N = 1 + d + ... + d^N`` of ``E_N``."""
        return flat_dim(self.d, self.N)

    def __call__(self, t):
        return self.curve(t)

    def level_slice(self, i: int) -> slice:
        start = flat_dim(self.d, i - 1) if i > 0 else 0
        return slice(start, start + self.d**i)

    def as_pl(self) -> PiecewiseLinearPath:
        """Exact PL representation, available when ``N = 1``."""
        if self.N != 1:
            raise ValueError("the signature path is only piecewise linear for N = 1")
        return PiecewiseLinearPath(self.curve.times, self.curve.vertices())

    def relative_curve(self):
        """The signature path minus the unit, i.e. coordinates relative to ``y_0``."""
        from .path_model import PolyCurve

        c = np.array(self.curve.coeffs)
        c[:, 0, 0] -= 1.0
        return PolyCurve(self.curve.times, c)


def eval_lifted_point(y: LiftedPath, t: float) -> np.ndarray:
    """Point of ``E_N`` reached by the signature path at time ``t``."""
    return y(t)


@dataclass(frozen=True)
class LiftedLevel:
    """Coefficients of ``Y^{n; labels}`` over words of length ``sum(labels)``."""

    labels: tuple
    coefficients: np.ndarray

    @property
    def n(self) -> int:
        return len(self.labels)


def _validate_labels(labels: Sequence[int], N: int | None) -> tuple[int, ...]:
    labels = tuple(int(i) for i in labels)
    if not labels:
        raise ValueError("need at least one degree label")
    if any(i < 0 for i in labels):
        raise ValueError("degree labels must be non-negative")
    if N is not None and any(i > N for i in labels):
        raise ValueError(f"degree label exceeds the lifted degree {N}")
    return labels


def lifted_level_quadrature(y: LiftedPath, labels: Sequence[int], s: float = 0.0,
                            t: float = 1.0, quad_order: int | None = None) -> LiftedLevel:
    """Quadrature oracle for ``Y^{n; i_1..i_n}_{s,t}``.

    Parameters
    ----------
    y : LiftedPath
    labels : sequence of int
        Degree labels ``(i_1, ..., i_n)``, each in ``0..N``.
    s, t : float
        Time window, ``s <= t``.
    quad_order : int, optional
        Gauss-Legendre order per base segment. Defaults to ``sum(labels) + 1``,
        which integrates every intermediate polynomial exactly.

    Returns
    -------
    LiftedLevel
    """
    labels = _validate_labels(labels, y.N)
    if not 0.0 <= s <= t <= 1.0:
        raise ValueError("need 0 <= s <= t <= 1")
    d = y.d
    K = sum(labels)
    shape = (d,) * K
    if any(i == 0 for i in labels) or s == t:
        return LiftedLevel(labels, np.zeros(shape))
    M = quad_order if quad_order is not None else K + 1
    C = cumulative_matrix(M)
    curve = y.curve
    # running values at the current time: h[j] flattened over d^(i_1+..+i_j)
    h = [np.ones(1)] + [np.zeros(d ** sum(labels[: j + 1])) for j in range(len(labels))]
    slices = [y.level_slice(i) for i in labels]
    times = curve.times
    for k in range(curve.n_segments):
        a, b = max(s, times[k]), min(t, times[k + 1])
        if b <= a:
            continue
        width = times[k + 1] - times[k]
        ua, ub = (a - times[k]) / width, (b - times[k]) / width
        nodes, _ = gauss_nodes(M)
        u = ua + (ub - ua) * nodes
        dy = curve.seg_deriv(k, u) * (ub - ua)
        prev_nodes = np.ones((M, 1))
        for j, sl in enumerate(slices, start=1):
            integrand = (prev_nodes[:, :, None] * dy[:, None, sl]).reshape(M, -1)
            vals = C @ integrand
            at_nodes = h[j][None, :] + vals[:-1]
            h[j] = h[j] + vals[-1]
            prev_nodes = at_nodes
    return LiftedLevel(labels, h[-1].reshape(shape))


@lru_cache(maxsize=4096)
def _closed_form_permutations(labels: tuple, composition: str) -> tuple:
    """Multiset of composite permutations appearing in the closed form."""
    K = sum(labels)
    factors = []
    acc = labels[0]
    for j in range(1, len(labels)):
        m, n = acc, labels[j] - 1
        span = m + n
        full = [tuple(sig) + tuple(range(span, K)) for sig in shuffles(m, n)]
        factors.append(full)
        acc += labels[j]
    counts: Counter = Counter()
    ident = tuple(range(K))
    for chain in itertools.product(*factors):
        perm = ident
        for sig in chain:
            # function composition sigma_j o (previous composite)
            perm = compose(sig, perm) if composition == "outer" else compose(perm, sig)
        counts[perm] += 1
    return tuple(sorted(counts.items()))


def lifted_signature_eq46(g, labels: Sequence[int], composition: str = "outer",
                          convention: str = "positions") -> LiftedLevel:
    """Closed form of ``S(Y)^{n; i_1..i_n}_{0,1}`` from the base signature.

    Parameters
    ----------
    g : SignatureResult or TruncatedTensor
        Base signature with degree at least ``sum(labels)``.
    labels : sequence of int
    composition : {"outer", "inner"}
        ``"outer"`` builds ``sigma_{n-1} o ... o sigma_1`` (the validated reading);
        ``"inner"`` builds ``sigma_1 o ... o sigma_{n-1}`` and exists for testing.
    convention : {"positions", "inverse"}
        Passed to :func:`apply_permutation`.
    """
    tensor = g.tensor if isinstance(g, SignatureResult) else g
    labels = _validate_labels(labels, None)
    K = sum(labels)
    if any(i == 0 for i in labels):
        return LiftedLevel(labels, np.zeros((tensor.d,) * K))
    if tensor.degree < K:
        raise ValueError(f"signature degree {tensor.degree} is below the required {K}")
    if composition not in ("outer", "inner"):
        raise ValueError(f"unknown composition {composition!r}")
    top = tensor.levels[K]
    acc = np.zeros(top.shape)
    for perm, mult in _closed_form_permutations(labels, composition):
        acc += mult * apply_permutation(top, perm, convention)
    return LiftedLevel(labels, acc)


def lifted_coefficient(g, en_word: Sequence[Sequence[int]]) -> float:
    """``S(Y)`` at a word over ``E_N`` coordinates.

    Each letter of ``en_word`` is itself a non-empty word over ``{1..d}``
    naming a coordinate of ``E_N``; the value is the closed form at the
    concatenated index.
    """
    letters = [tuple(L) for L in en_word]
    if not letters:
        return 1.0
    if any(len(L) == 0 for L in letters):
        return 0.0
    lvl = lifted_signature_eq46(g, [len(L) for L in letters])
    flat = tuple(i - 1 for L in letters for i in L)
    return float(lvl.coefficients[flat])
