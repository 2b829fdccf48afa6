"""Admissible chains, the stable quantity and the choice of tunnel widths.

For a piecewise-linear path the route through a family of schemes indexed by
``delta`` only changes at finitely many values. Each (segment, domain) pair is
entered exactly for ``delta`` below a threshold ``delta*`` obtained from a
one-dimensional linear programme, and the route is constant between
consecutive thresholds. Domains grow as ``delta`` decreases, so coarser
routes are subwords of finer ones and the stable quantity is monotone; the
supremum of its constancy region is therefore found by bisection over the
sorted thresholds.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (CubeScheme, HullEnvelope, HullScheme, RouteWord, _halfline_interval,
                       extract_route)
from .path_model import PolyCurve

__all__ = [
    "AdmissibleChainResult",
    "stable_quantity",
    "LevelFamily",
    "route_change_thresholds",
    "candidate_thresholds",
    "DeltaSelection",
    "select_delta",
    "grid_selection",
]


@dataclass(frozen=True)
class AdmissibleChainResult:
    length: int
    witness: tuple


def stable_quantity(labels, D: int) -> AdmissibleChainResult:
    """Longest subword whose consecutive letters are at least ``2 sqrt(D)`` apart.

    Parameters
    ----------
    labels : sequence of tuple of int
        Doubled lattice labels (``2 z``), compared exactly in integers.
    D : int
        Ambient dimension.

    Returns
    -------
    AdmissibleChainResult
        ``length`` is 0 for the empty word and 1 when no pair qualifies;
        ``witness`` holds the indices of one maximal chain.
    """
    labels = [np.asarray(l, dtype=np.int64) for l in labels]
    n = len(labels)
    if n == 0:
        return AdmissibleChainResult(0, ())
    Z = np.vstack(labels)
    # |dz|^2 >= 4D  <=>  |2 dz|^2 >= 16 D
    far = ((Z[:, None, :] - Z[None, :, :]) ** 2).sum(axis=2) >= 16 * D
    f = np.ones(n, dtype=int)
    back = np.full(n, -1)
    for k in range(1, n):
        prev = np.nonzero(far[k, :k])[0]
        if prev.size:
            j = prev[np.argmax(f[prev])]
            f[k], back[k] = f[j] + 1, j
    k = int(np.argmax(f))
    chain = [k]
    while back[chain[-1]] >= 0:
        chain.append(int(back[chain[-1]]))
    return AdmissibleChainResult(int(f[k]), tuple(reversed(chain)))


class LevelFamily:
    """Schemes of one skeleton level indexed by the tunnel parameter ``delta``.

    ``level == dim`` gives the top-level cubes with ``delta`` in ``(0, eps)``;
    lower levels give hulls with outer parameter ``delta_outer`` and
    ``delta`` in ``(0, delta_outer)``.
    """

    def __init__(self, eps: float, level: int, dim: int, delta_outer: float | None = None,
                 origin=None):
        self.eps = float(eps)
        self.level = int(level)
        self.dim = int(dim)
        self.origin = origin
        if self.level == self.dim:
            self.delta_outer = None
            self.upper = self.eps
        else:
            if delta_outer is None:
                raise ValueError("hull levels need an outer parameter")
            self.delta_outer = float(delta_outer)
            self.upper = self.delta_outer

    def at(self, delta: float) -> HullScheme:
        if self.delta_outer is None:
            return CubeScheme(self.eps, delta, self.dim, self.origin)
        return HullScheme(self.eps, self.level, delta, self.delta_outer, self.dim, self.origin)

    def envelope(self) -> HullEnvelope:
        outer = self.delta_outer if self.delta_outer is not None else self.eps / 2
        return HullEnvelope(self.eps, self.level, outer, outer, self.dim, self.origin)

    def threshold(self, p0: np.ndarray, p1: np.ndarray, center: np.ndarray, label) -> float | None:
        """Supremum of ``delta`` for which the segment ``p0 -> p1`` enters ``C_label``."""
        a = p0 - center
        b = p1 - p0
        mask = np.array([k % 2 == 0 for k in label])
        aJ, bJ = a[mask], b[mask]
        aH, bH = a[~mask], b[~mask]
        if aH.size:
            A, B = [], []
            for s_ in (1, -1):
                A.append(4 * s_ * aH - self.delta_outer)
                B.append(4 * s_ * bH)
                for t in (1, -1):
                    A.append((4 * s_ * aH[:, None] + 2 * t * aJ[None, :] - self.eps).ravel())
                    B.append((4 * s_ * bH[:, None] + 2 * t * bJ[None, :]).ravel())
            iv = _halfline_interval(np.concatenate(A), np.concatenate(B))
            if iv is None:
                return None
        else:
            iv = (0.0, 1.0)
        # maximise the concave function min_{j,t} (eps - 2 t (aJ + bJ u)) over iv
        alpha = np.concatenate([self.eps - 2 * aJ, self.eps + 2 * aJ])
        beta = np.concatenate([-2 * bJ, 2 * bJ])
        cands = [iv[0], iv[1]]
        for i in range(alpha.size):
            db = beta[i] - beta[i + 1:]
            ok = db != 0
            u = (alpha[i + 1:][ok] - alpha[i]) / db[ok]
            cands.extend(u[(u > iv[0]) & (u < iv[1])].tolist())
        cands = np.array(cands)
        vals = np.min(alpha[:, None] + beta[:, None] * cands[None, :], axis=0)
        best = float(vals.max())
        return best if best > 0 else None


def candidate_thresholds(curve: PolyCurve, family: LevelFamily) -> list:
    """Sorted distinct values ``delta*`` in ``(0, upper)`` over all (segment, domain) pairs."""
    if curve.degree != 1:
        raise NotImplementedError("thresholds are computed for piecewise-linear curves")
    env = family.envelope()
    out = set()
    for s in range(curve.n_segments):
        p0 = curve.coeffs[s, 0]
        p1 = p0 + curve.coeffs[s, 1]
        for _, _, label in env.segment_hits(curve, s):
            th = family.threshold(p0, p1, env.center(label), label)
            # values within rounding of ``upper`` come from points at a centre
            if th is not None and 0 < th < family.upper * (1 - 1e-12):
                out.add(th)
    vals = sorted(out)
    merged = []
    for v in vals:
        if merged and v - merged[-1] <= 1e-14 * family.upper:
            continue
        merged.append(v)
    return merged


def _reps(cands: list, upper: float) -> list:
    edges = [0.0] + list(cands) + [upper]
    return [0.5 * (a + b) for a, b in zip(edges[:-1], edges[1:])]


def _route(curve, family, delta) -> RouteWord:
    return extract_route(curve, family.at(delta), require_start=family.delta_outer is None)


def route_change_thresholds(curve: PolyCurve, family: LevelFamily,
                            below: float | None = None) -> list:
    """The ``delta`` values at which the route word changes.

    Between consecutive returned values (and below the first one) the route
    through ``family.at(delta)`` is constant. Only thresholds up to ``below``
    are examined when it is given.
    """
    cands = candidate_thresholds(curve, family)
    if below is not None:
        cands = [c for c in cands if c <= below]
    reps = _reps(cands, family.upper if below is None else min(family.upper, 2 * below))
    words = [_route(curve, family, r).labels for r in reps]
    return [c for c, w0, w1 in zip(cands, words[:-1], words[1:]) if w0 != w1]


@dataclass(frozen=True)
class DeltaSelection:
    """Outcome of :func:`select_delta`."""

    level: int
    delta: float
    s_value: int
    supremum: float
    thresholds: tuple
    route: RouteWord = field(compare=False)


def select_delta(curve: PolyCurve, family: LevelFamily, D: int | None = None,
                 certificate: bool = True) -> DeltaSelection:
    """Half the supremum of the region ``(0, delta]`` on which the stable quantity is constant.

    Parameters
    ----------
    curve : PolyCurve
        Piecewise-linear path in the family's ambient space.
    family : LevelFamily
    D : int, optional
        Dimension used in the admissibility distance; defaults to ``family.dim``.
    certificate : bool
        Also list the route-change thresholds below the supremum.

    Raises
    ------
    RuntimeError
        If the supremum falls below ``2**-40 * eps``.
    """
    D = family.dim if D is None else D
    cands = candidate_thresholds(curve, family)
    reps = _reps(cands, family.upper)

    def s_at(k):
        return stable_quantity(_route(curve, family, reps[k]).labels, D).length

    s0 = s_at(0)
    lo, hi = 1, len(reps)  # first k with s_at(k) != s0, or len(reps) if none
    while lo < hi:
        mid = (lo + hi) // 2
        if s_at(mid) != s0:
            hi = mid
        else:
            lo = mid + 1
    sup = cands[lo - 1] if lo < len(reps) else family.upper
    if sup < 2.0**-40 * family.eps:
        raise RuntimeError(f"no stabilization above 2^-40 eps (supremum {sup!r}); geometry bug?")
    delta = sup / 2
    ths = ()
    if certificate:
        below = [c for c in cands if c < sup]
        r = _reps(below, sup)
        words = [_route(curve, family, x).labels for x in r]
        ths = tuple(c for c, w0, w1 in zip(below, words[:-1], words[1:]) if w0 != w1)
    route = _route(curve, family, delta)
    return DeltaSelection(family.level, delta, s0, sup, ths, route)


def grid_selection(curve: PolyCurve, family: LevelFamily, D: int | None = None,
                   depth: int = 10) -> tuple[float, list]:
    """Grid oracle: stable-quantity values at ``k * upper / 2**depth``.

    Returns the first grid point where the value differs from the finest one
    (or ``upper``) together with the list of values.
    """
    D = family.dim if D is None else D
    n = 2**depth
    grid = [k * family.upper / n for k in range(1, n)]
    vals = [stable_quantity(_route(curve, family, g).labels, D).length for g in grid]
    for g, v in zip(grid, vals):
        if v != vals[0]:
            return g, vals
    return family.upper, vals
