"""Geometric schemes, exact entry detection and discrete routes.

Domains are axis-aligned boxes or convex hulls of two concentric boxes. Lattice
labels are stored as tuples of *doubled* coordinates (``2 z``), so integer and
half-integer lattice points are both exact integers; ``label_to_z`` converts back.

Every scheme is anchored at an ``origin`` (the unit of ``E_N`` for lifted
paths), and centers sit at ``origin + unit * z``.

For a hull ``C_z`` with inner parameter ``delta`` and outer ``delta_outer``,
widths are affine in the parameter, so the hull is the union of the boxes
``H_z^{delta'}`` over ``delta' in [delta, delta_outer]``. Writing
``lo(a) = max_half 4|a^I - c^I|`` and ``hi(a) = min_int (eps - 2|a^I - c^I|)``,
``a`` is in the open hull iff ``lo < hi``, ``hi > delta`` and ``lo < delta_outer``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .path_model import PiecewiseLinearPath, PolyCurve

__all__ = [
    "RouteWord",
    "skeleton_level",
    "label_to_z",
    "z_to_label",
    "hull_membership",
    "CubeScheme",
    "HullEnvelope",
    "HullScheme",
    "HalfIntScheme",
    "CylinderScheme",
    "BoxFamily",
    "occupancy",
    "extract_route",
    "route_from_occupancy",
    "tunnel_intervals",
    "validate_disjoint",
    "DisjointReport",
    "is_subword",
]

# positive-length threshold for an entry, in local segment parameter
_MIN_LEN = 1e-13


def label_to_z(label: Sequence[int]) -> tuple:
    """Doubled integer label to lattice coordinates (ints stay ints)."""
    return tuple(k // 2 if k % 2 == 0 else k / 2 for k in label)


def z_to_label(z: Sequence[float]) -> tuple:
    out = []
    for v in z:
        k = 2 * v
        if abs(k - round(k)) > 1e-12:
            raise ValueError(f"{v} is not an integer or half-integer")
        out.append(int(round(k)))
    return tuple(out)


def skeleton_level(label: Sequence[int]) -> int:
    """Number of integer coordinates of a (doubled) lattice label."""
    return sum(1 for k in label if k % 2 == 0)


def is_subword(small: Sequence, big: Sequence) -> bool:
    """Whether ``small`` is a (not necessarily contiguous) subsequence of ``big``."""
    it = iter(big)
    return all(any(a == b for b in it) for a in small)


@dataclass(frozen=True)
class RouteWord:
    """Discrete route: visited domain labels with entry times.

    ``occupancy[k]`` lists the open time intervals spent inside domain
    ``labels[k]`` during the ``k``-th visit (revisits before entering another
    domain are folded into the same visit).
    """

    labels: tuple
    entry_times: tuple
    occupancy: tuple = field(default=(), compare=False)

    @property
    def L(self) -> int:
        return len(self.labels) - 1

    def __len__(self) -> int:
        return len(self.labels)

    def to_json(self, lattice: bool = True) -> dict:
        labs = [list(label_to_z(l)) if lattice else l for l in self.labels]
        return {"labels": labs, "entry_times": list(self.entry_times)}


# ---------------------------------------------------------------------------
# interval helpers (lists of disjoint sorted open intervals in [0, 1])


def _intersect(A, B):
    out, i, j = [], 0, 0
    while i < len(A) and j < len(B):
        lo, hi = max(A[i][0], B[j][0]), min(A[i][1], B[j][1])
        if hi - lo > 0:
            out.append((lo, hi))
        if A[i][1] < B[j][1]:
            i += 1
        else:
            j += 1
    return out


def _poly_range(c: np.ndarray) -> tuple[float, float]:
    """Range of a power-basis polynomial on [0, 1]."""
    if c.size <= 2:
        a, b = float(c[0]), float(c[0] + (c[1] if c.size == 2 else 0.0))
        return (a, b) if a <= b else (b, a)
    crit = [0.0, 1.0]
    dc = P.polyder(c)
    if np.any(dc != 0):
        r = P.polyroots(dc)
        crit += [float(v.real) for v in r if abs(v.imag) < 1e-9 and 0 < v.real < 1]
    vals = P.polyval(np.array(crit), c)
    return float(vals.min()), float(vals.max())


def _slab(c: np.ndarray, center: float, w: float, closed: bool = False) -> list:
    """``{u in [0, 1] : |p(u) - center| < w}`` as sorted open intervals."""
    c = np.trim_zeros(np.asarray(c, dtype=float), "b")
    if c.size == 0:
        c = np.zeros(1)
    if c.size == 1:
        inside = abs(c[0] - center) <= w if closed else abs(c[0] - center) < w
        return [(0.0, 1.0)] if inside else []
    if c.size == 2:
        a, b = c[0] - center, c[1]
        # |a + b u| < w  <=>  (-w - a)/b < u < (w - a)/b for b > 0
        r1, r2 = (-w - a) / b, (w - a) / b
        lo, hi = (r1, r2) if b > 0 else (r2, r1)
        lo, hi = max(lo, 0.0), min(hi, 1.0)
        return [(lo, hi)] if hi - lo > 0 else []
    pts = [0.0, 1.0]
    for shift in (center - w, center + w):
        cc = c.copy()
        cc[0] -= shift
        for r in P.polyroots(cc):
            if abs(r.imag) < 1e-9 and 0 < r.real < 1:
                pts.append(float(r.real))
    pts = sorted(pts)
    out = []
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 0:
            continue
        mid = 0.5 * (a + b)
        if abs(P.polyval(mid, c) - center) < w:
            if out and out[-1][1] == a:
                out[-1] = (out[-1][0], b)
            else:
                out.append((a, b))
    return out


def _halfline_interval(a: np.ndarray, b: np.ndarray) -> tuple[float, float] | None:
    """``{u in [0, 1] : a_k + b_k u < 0 for all k}`` as ``(lo, hi)`` or None."""
    lo, hi = 0.0, 1.0
    pos = b > 0
    neg = b < 0
    zero = ~(pos | neg)
    if np.any(a[zero] >= 0):
        return None
    if np.any(pos):
        hi = min(hi, float(np.min(-a[pos] / b[pos])))
    if np.any(neg):
        lo = max(lo, float(np.max(-a[neg] / b[neg])))
    return (lo, hi) if hi - lo > 0 else None


def hull_membership(a, center, int_mask, eps: float, delta: float, delta_outer: float,
                    closed: bool = False) -> bool:
    """Membership of ``a`` in the hull of two concentric boxes.

    Parameters
    ----------
    a, center : array_like
        Point and hull center (absolute coordinates).
    int_mask : array_like of bool
        True where the center coordinate is an integer lattice value.
    eps, delta, delta_outer : float
        Scale, inner and outer tunnel parameters (``delta <= delta_outer``).
    closed : bool
        Test the closure instead of the open hull.
    """
    dev = np.abs(np.asarray(a, dtype=float) - np.asarray(center, dtype=float))
    int_mask = np.asarray(int_mask, dtype=bool)
    lo = float(np.max(4 * dev[~int_mask])) if np.any(~int_mask) else -math.inf
    hi = float(np.min(eps - 2 * dev[int_mask])) if np.any(int_mask) else math.inf
    if closed:
        return lo <= hi and hi >= delta and lo <= delta_outer
    return lo < hi and hi > delta and lo < delta_outer


# ---------------------------------------------------------------------------
# schemes


class _LatticeScheme:
    """Shared machinery for lattice-labelled box and hull schemes."""

    unit: float = 1.0
    origin_label: Hashable | None = None

    def __init__(self, dim: int, origin=None):
        self.dim = int(dim)
        self.origin = np.zeros(self.dim) if origin is None else np.asarray(origin, dtype=float)
        if self.origin.shape != (self.dim,):
            raise ValueError("origin has the wrong dimension")

    # hooks -----------------------------------------------------------------
    def int_width(self, I: int) -> float:
        raise NotImplementedError

    def half_width(self, I: int) -> float:
        raise NotImplementedError

    def allows(self, I: int, k: int) -> bool:
        return True

    def partial_ok(self, n_int: int, n_half: int) -> bool:
        return True

    def leaf_ok(self, label: tuple) -> bool:
        return True

    def refine(self, curve: PolyCurve, s: int, label: tuple, intervals: list) -> list:
        return intervals

    # geometry ----------------------------------------------------------------
    def center(self, label) -> np.ndarray:
        return self.origin + self.unit * np.asarray(label, dtype=float) / 2.0

    def widths(self, label) -> np.ndarray:
        """Half-widths of the (outer, relaxed) box around the center."""
        return np.array([self.int_width(I) if k % 2 == 0 else self.half_width(I)
                         for I, k in enumerate(label)])

    def _options(self, I: int, lo: float, hi: float, closed: bool):
        """Lattice values of coordinate ``I`` whose slab meets ``[lo, hi]``."""
        out = []
        o = self.origin[I]
        for parity, w in ((0, self.int_width(I)), (1, self.half_width(I))):
            if w <= 0:
                continue
            # centers unit*k/2 with k of the given parity in (lo - w, hi + w)
            kmin = math.ceil(2 * (lo - o - w) / self.unit)
            kmax = math.floor(2 * (hi - o + w) / self.unit)
            for k in range(kmin, kmax + 1):
                if k % 2 != parity or not self.allows(I, k):
                    continue
                c = o + self.unit * k / 2
                if closed:
                    if c - w <= hi and c + w >= lo:
                        out.append((k, c, w))
                elif c - w < hi and c + w > lo:
                    out.append((k, c, w))
        return out

    def segment_hits(self, curve: PolyCurve, s: int, closed: bool = False) -> list:
        """Open local-parameter intervals on segment ``s`` inside each domain.

        Returns a list of ``(u0, u1, label)``; with ``closed=True`` only the
        candidate labels of the relaxed closed boxes are enumerated (intervals
        are then those of the relaxed boxes).
        """
        coeffs = curve.coeffs[s]
        opts = []
        free = []
        # |sum_b c_b u^b| <= sum_b |c_b| on [0, 1]: a cheap enclosure that settles most
        # coordinates of high-dimensional lifts without root finding
        spread = np.abs(coeffs[1:]).sum(axis=0)
        cheap_lo, cheap_hi = coeffs[0] - spread, coeffs[0] + spread
        for I in range(self.dim):
            c = coeffs[:, I]
            o = self._options(I, cheap_lo[I], cheap_hi[I], closed)
            if not o:
                return []
            if len(o) == 1 and o[0][1] - o[0][2] < cheap_lo[I] and cheap_hi[I] < o[0][1] + o[0][2]:
                free.append((I, o[0][0]))
                continue
            lo, hi = _poly_range(c)
            o = self._options(I, lo, hi, closed)
            if not o:
                return []
            sets = []
            for k, ctr, w in o:
                st = [(0.0, 1.0)] if closed else _slab(c, ctr, w)
                if st:
                    sets.append((k, st))
            if not sets:
                return []
            if len(sets) == 1 and sets[0][1] == [(0.0, 1.0)]:
                free.append((I, sets[0][0]))
            else:
                opts.append((I, sets))
        opts.sort(key=lambda item: len(item[1]))
        base = [0] * self.dim
        n_int0 = sum(1 for _, k in free if k % 2 == 0)
        n_half0 = len(free) - n_int0
        for I, k in free:
            base[I] = k
        if not self.partial_ok(n_int0, n_half0):
            return []
        hits = []

        def dfs(pos, current, n_int, n_half):
            if pos == len(opts):
                label = tuple(base)
                if self.leaf_ok(label):
                    for u0, u1 in self.refine(curve, s, label, current) if not closed else current:
                        if u1 - u0 > _MIN_LEN or closed:
                            hits.append((u0, u1, label))
                return
            I, sets = opts[pos]
            for k, st in sets:
                ni, nh = (n_int + 1, n_half) if k % 2 == 0 else (n_int, n_half + 1)
                if not self.partial_ok(ni, nh):
                    continue
                nxt = _intersect(current, st)
                if not nxt:
                    continue
                base[I] = k
                dfs(pos + 1, nxt, ni, nh)
            base[I] = 0

        dfs(0, [(0.0, 1.0)], n_int0, n_half0)
        return hits

    def disjoint_data(self, label):
        """Center, affine width data ``A + B * t`` and the parameter range ``[t0, t1]``."""
        raise NotImplementedError


class HullScheme(_LatticeScheme):
    """Hulls ``C_z`` over skeleton level ``level`` on the ``eps``-lattice.

    Parameters
    ----------
    eps : float
        Lattice spacing.
    level : int
        Number of integer coordinates of admissible centers.
    delta, delta_outer : float
        Inner and outer tunnel parameters. ``delta == delta_outer`` gives the
        plain box ``H_z^{delta}``; ``level == dim`` gives the top-level cubes.
    dim : int
    origin : array_like, optional
    """

    def __init__(self, eps: float, level: int, delta: float, delta_outer: float, dim: int,
                 origin=None):
        super().__init__(dim, origin)
        if not 0 < delta <= delta_outer < eps:
            raise ValueError(f"need 0 < delta <= delta_outer < eps, got {delta}, {delta_outer}, {eps}")
        if not 0 <= level <= dim:
            raise ValueError("skeleton level out of range")
        self.eps = float(eps)
        self.unit = self.eps
        self.level = int(level)
        self.delta = float(delta)
        self.delta_outer = float(delta_outer)
        if self.level == self.dim:
            self.origin_label = (0,) * self.dim

    def __repr__(self) -> str:
        return (f"HullScheme(eps={self.eps!r}, level={self.level}, delta={self.delta!r}, "
                f"delta_outer={self.delta_outer!r}, dim={self.dim})")

    def int_width(self, I):
        return (self.eps - self.delta) / 2

    def half_width(self, I):
        return self.delta_outer / 4 if self.level < self.dim else 0.0

    def partial_ok(self, n_int, n_half):
        return n_int <= self.level and n_half <= self.dim - self.level

    def leaf_ok(self, label):
        return skeleton_level(label) == self.level

    def refine(self, curve, s, label, intervals):
        if self.level == self.dim:
            return intervals
        if curve.degree != 1:
            raise NotImplementedError("hull entry detection needs a piecewise-linear curve")
        c = self.center(label)
        a = curve.coeffs[s, 0] - c
        b = curve.coeffs[s, 1]
        iv = self.exact_interval(a, b, label)
        if iv is None:
            return []
        return _intersect(intervals, [iv])

    def _split(self, label):
        mask = np.array([k % 2 == 0 for k in label])
        return mask

    def exact_interval(self, a: np.ndarray, b: np.ndarray, label) -> tuple | None:
        """Open parameter interval where ``a + b u`` (relative to the center) is in the hull."""
        mask = self._split(label)
        aJ, bJ = a[mask], b[mask]
        aH, bH = a[~mask], b[~mask]
        A, B = [], []
        # hi > delta
        for t in (1, -1):
            A.append(2 * t * aJ - (self.eps - self.delta))
            B.append(2 * t * bJ)
        if aH.size:
            for s_ in (1, -1):
                # lo < delta_outer
                A.append(4 * s_ * aH - self.delta_outer)
                B.append(4 * s_ * bH)
                if aJ.size:
                    for t in (1, -1):
                        # lo < hi
                        A.append((4 * s_ * aH[:, None] + 2 * t * aJ[None, :] - self.eps).ravel())
                        B.append((4 * s_ * bH[:, None] + 2 * t * bJ[None, :]).ravel())
        return _halfline_interval(np.concatenate(A), np.concatenate(B))

    def contains(self, point, label, closed: bool = False) -> bool:
        mask = self._split(label)
        return hull_membership(point, self.center(label), mask, self.eps, self.delta,
                               self.delta_outer, closed=closed)

    def disjoint_data(self, label):
        mask = self._split(label)
        A = np.where(mask, self.eps / 2, 0.0)
        B = np.where(mask, -0.5, 0.25)
        return self.center(label), A, B, self.delta, self.delta_outer


class HullEnvelope(HullScheme):
    """Union over all inner parameters ``delta -> 0`` of the hulls: the open box
    with half-widths ``eps/2`` (integer coordinates) and ``delta_outer/4``.

    Every segment that enters ``C_z`` for some ``delta`` meets this box, so its
    labels are the candidate set for threshold computations.
    """

    def int_width(self, I):
        return self.eps / 2

    def refine(self, curve, s, label, intervals):
        return intervals


class CubeScheme(HullScheme):
    """Top-level cubes ``H_z^{delta; D}``: all coordinates integer, half-width ``(eps - delta)/2``."""

    def __init__(self, eps: float, delta: float, dim: int, origin=None):
        super().__init__(eps, dim, delta, delta, dim, origin)

    def __repr__(self) -> str:
        return f"CubeScheme(eps={self.eps!r}, delta={self.delta!r}, dim={self.dim})"


class HalfIntScheme(_LatticeScheme):
    """Unit-lattice cubes ``Q_z^{delta; N}`` centered at ``origin + z`` for ``z`` in ``A^N``.

    Integer coordinates get half-width ``1/2 - delta``, half-integer ones ``delta/2``.
    Admissible centers are ``z = 0`` and those with some coordinate exactly ``+-1/2``.
    """

    def __init__(self, delta: float, dim: int, origin=None):
        super().__init__(dim, origin)
        if not 0 < delta < 0.25:
            raise ValueError("delta must lie in (0, 1/4)")
        self.delta = float(delta)
        self.unit = 1.0
        self.origin_label = (0,) * self.dim

    def __repr__(self) -> str:
        return f"HalfIntScheme(delta={self.delta!r}, dim={self.dim})"

    def int_width(self, I):
        return 0.5 - self.delta

    def half_width(self, I):
        return self.delta / 2

    def leaf_ok(self, label):
        return all(k == 0 for k in label) or any(abs(k) == 1 for k in label)

    def disjoint_data(self, label):
        mask = np.array([k % 2 == 0 for k in label])
        A = np.where(mask, 0.5 - self.delta, self.delta / 2)
        return self.center(label), A, np.zeros(self.dim), 0.0, 0.0


class CylinderScheme(_LatticeScheme):
    """Product ``C_i x U`` of a box-type base scheme on the leading coordinates with
    the cube ``|a^I| < radius`` on the remaining ones.

    Labels are those of the base scheme, so routes share the base alphabet.
    """

    def __init__(self, base: _LatticeScheme, dim: int, radius: float = 1.0, origin=None):
        if isinstance(base, HullScheme) and base.level < base.dim:
            raise NotImplementedError("cylinders are built over box-type base schemes")
        if origin is None:
            origin = np.concatenate([base.origin, np.zeros(dim - base.dim)])
        super().__init__(dim, origin)
        self.base = base
        self.radius = float(radius)
        self.unit = base.unit
        self.origin_label = base.origin_label

    def __repr__(self) -> str:
        return f"CylinderScheme(base={self.base!r}, dim={self.dim}, radius={self.radius!r})"

    def segment_hits(self, curve, s, closed=False):
        nb = self.base.dim
        sub = PolyCurve(curve.times[s:s + 2] * 0 + np.array([0.0, 1.0]), curve.coeffs[s:s + 1, :, :nb])
        hits = self.base.segment_hits(sub, 0, closed)
        if not hits:
            return []
        extra = [(0.0, 1.0)]
        for I in range(nb, self.dim):
            extra = _intersect(extra, _slab(curve.coeffs[s, :, I], self.origin[I], self.radius))
            if not extra:
                return []
        out = []
        for u0, u1, label in hits:
            for a, b in _intersect([(u0, u1)], extra):
                if b - a > _MIN_LEN:
                    out.append((a, b, label))
        return out

    def center(self, label):
        return np.concatenate([self.base.center(label), self.origin[self.base.dim:]])

    def disjoint_data(self, label):
        c, A, B, t0, t1 = self.base.disjoint_data(label)
        k = self.dim - self.base.dim
        return (np.concatenate([c, self.origin[self.base.dim:]]),
                np.concatenate([A, np.full(k, self.radius)]), np.concatenate([B, np.zeros(k)]), t0, t1)


class BoxFamily:
    """Explicit finite family of labelled open boxes.

    Parameters
    ----------
    boxes : dict
        ``label -> (center, half_widths)``.
    origin_label : hashable
        Label of the domain containing the start point.
    """

    def __init__(self, boxes: dict, origin_label=0):
        self.boxes = {k: (np.asarray(c, dtype=float), np.asarray(w, dtype=float))
                      for k, (c, w) in boxes.items()}
        dims = {c.size for c, _ in self.boxes.values()}
        if len(dims) != 1:
            raise ValueError("boxes must share a dimension")
        self.dim = dims.pop()
        self.origin_label = origin_label

    def segment_hits(self, curve, s, closed=False):
        coeffs = curve.coeffs[s]
        out = []
        for label, (c, w) in self.boxes.items():
            cur = [(0.0, 1.0)]
            for I in range(self.dim):
                cur = _intersect(cur, _slab(coeffs[:, I], c[I], w[I], closed))
                if not cur:
                    break
            for u0, u1 in cur:
                if u1 - u0 > _MIN_LEN:
                    out.append((u0, u1, label))
        return out

    def center(self, label):
        return self.boxes[label][0]

    def disjoint_data(self, label):
        c, w = self.boxes[label]
        return c, w, np.zeros_like(w), 0.0, 0.0


# ---------------------------------------------------------------------------
# routes


def occupancy(curve: PolyCurve, scheme) -> list:
    """All open time intervals spent inside each domain, sorted by start time.

    Intervals that abut across a segment boundary inside the same domain are merged.
    """
    raw = []
    for s in range(curve.n_segments):
        t0, t1 = curve.times[s], curve.times[s + 1]
        for u0, u1, label in scheme.segment_hits(curve, s):
            a = t0 + u0 * (t1 - t0) if u0 > 0 else t0
            b = t0 + u1 * (t1 - t0) if u1 < 1 else t1
            raw.append((float(a), float(b), label))
    raw.sort(key=lambda r: (r[0], r[1]))
    merged = []
    open_by_label: dict = {}
    for a, b, label in raw:
        j = open_by_label.get(label)
        if j is not None and merged[j][1] >= a:
            merged[j] = (merged[j][0], max(merged[j][1], b), label)
            continue
        open_by_label[label] = len(merged)
        merged.append((a, b, label))
    merged.sort(key=lambda r: (r[0], r[1]))
    return merged


def route_from_occupancy(occ: list, origin_label=None, require_start: bool = False) -> RouteWord:
    """Fold sorted occupancy intervals into a route (consecutive repeats merged)."""
    if require_start:
        if not occ or occ[0][0] > 0.0 or occ[0][2] != origin_label:
            raise ValueError("path does not start inside the domain labelled as the origin")
    labels, entries, occs = [], [], []
    for a, b, label in occ:
        if labels and labels[-1] == label:
            occs[-1].append((a, b))
            continue
        labels.append(label)
        entries.append(a)
        occs.append([(a, b)])
    return RouteWord(tuple(labels), tuple(float(e) for e in entries),
                     tuple(tuple(o) for o in occs))


def extract_route(curve: PolyCurve, scheme, require_start: bool | None = None) -> RouteWord:
    """Ordered sequence of domains entered by ``curve``, with entry times.

    Parameters
    ----------
    curve : PolyCurve
        Usually a :class:`PiecewiseLinearPath` in the scheme's ambient space.
    scheme : scheme object
    require_start : bool, optional
        Insist that the curve starts inside the origin domain. Defaults to
        True for schemes that have one.
    """
    if require_start is None:
        require_start = getattr(scheme, "origin_label", None) is not None
    return route_from_occupancy(occupancy(curve, scheme), getattr(scheme, "origin_label", None),
                                require_start)


def tunnel_intervals(occ: list, t0: float = 0.0, t1: float = 1.0) -> list:
    """Complement in ``[t0, t1]`` of the union of occupancy intervals."""
    out, cur = [], t0
    for a, b, _ in sorted(occ, key=lambda r: r[0]):
        if a > cur:
            out.append((cur, a))
        cur = max(cur, b)
    if cur < t1:
        out.append((cur, t1))
    return out


# ---------------------------------------------------------------------------
# disjointness


@dataclass(frozen=True)
class DisjointReport:
    ok: bool
    checked_pairs: int
    witness: tuple | None = None


def _lp_feasible(rows) -> bool:
    """Exact feasibility of ``p + q x + r y >= 0`` for all rows (Fractions)."""
    lines = [r for r in rows if r[1] != 0 or r[2] != 0]
    for p, q, r in rows:
        if q == 0 and r == 0 and p < 0:
            return False
    pts = []
    for i in range(len(lines)):
        p1, q1, r1 = lines[i]
        for j in range(i + 1, len(lines)):
            p2, q2, r2 = lines[j]
            det = q1 * r2 - q2 * r1
            if det == 0:
                continue
            x = (-p1 * r2 + p2 * r1) / det
            y = (-q1 * p2 + q2 * p1) / det
            pts.append((x, y))
    for x, y in pts:
        if all(p + q * x + r * y >= 0 for p, q, r in rows):
            return True
    return False


def closures_intersect(dA, dB) -> bool:
    """Exact test whether two closed hull/box domains share a point."""
    cA, AA, BA, sA, tA = dA
    cB, AB, BB, sB, tB = dB
    F = Fraction
    rows = [(-F(sA), F(1), F(0)), (F(tA), F(-1), F(0)), (-F(sB), F(0), F(1)), (F(tB), F(0), F(-1))]
    for I in range(len(cA)):
        gap = abs(F(float(cA[I])) - F(float(cB[I])))
        rows.append((F(float(AA[I])) + F(float(AB[I])) - gap, F(float(BA[I])), F(float(BB[I]))))
    return _lp_feasible(rows)


def _domain_extent(data) -> np.ndarray:
    c, A, B, t0, t1 = data
    return np.maximum(A + B * t0, A + B * t1)


def validate_disjoint(domains: Iterable) -> DisjointReport:
    """Check pairwise disjointness of closed domains.

    Parameters
    ----------
    domains : iterable of (tag, scheme, label)
        Materialized domains, e.g. every candidate near a path.

    Returns
    -------
    DisjointReport
        ``witness`` names the first intersecting pair.
    """
    from scipy.spatial import cKDTree

    items = list(domains)
    if len(items) < 2:
        return DisjointReport(True, 0)
    data = [scheme.disjoint_data(label) for _, scheme, label in items]
    centers = np.array([d[0] for d in data])
    ext = np.array([_domain_extent(d) for d in data])
    radius = float(2 * ext.max()) * (1 + 1e-9)
    pairs = sorted(cKDTree(centers).query_pairs(radius, p=np.inf))
    checked = 0
    for i, j in pairs:
        gap = np.abs(centers[i] - centers[j]) - ext[i] - ext[j]
        if np.any(gap > 1e-12 * (1 + np.abs(centers[i]).max())):
            continue
        checked += 1
        if closures_intersect(data[i], data[j]):
            return DisjointReport(False, checked, (items[i], items[j]))
    return DisjointReport(True, checked)


def materialize(curve: PolyCurve, scheme, tag=None) -> list:
    """Domains whose relaxed closed box meets the curve's per-segment bounding box."""
    seen = {}
    for s in range(curve.n_segments):
        for _, _, label in scheme.segment_hits(curve, s, closed=True):
            seen.setdefault(label, None)
    return [(tag, scheme, label) for label in seen]
