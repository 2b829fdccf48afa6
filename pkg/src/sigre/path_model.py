"""Piecewise-linear and piecewise-polynomial paths, p-variation and a
reparametrization-invariant distance.

Notes
-----
All paths live on the time interval [0, 1]. A :class:`PolyCurve` stores, for
every segment, the power-basis coefficients of each coordinate in the local
parameter ``u`` in [0, 1]; :class:`PiecewiseLinearPath` is the degree-one case
and is what users normally build.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "PolyCurve",
    "PiecewiseLinearPath",
    "PVarResult",
    "p_variation",
    "reparam_distance",
    "concat",
    "resample",
    "load_path_json",
    "dump_path_json",
    "path_from_records",
    "path_to_records",
]


class PolyCurve:
    """Continuous piecewise-polynomial curve ``[0, 1] -> R^D``.

    Parameters
    ----------
    times : array_like, shape (S + 1,)
        Segment boundaries, strictly increasing from 0 to 1.
    coeffs : array_like, shape (S, K + 1, D)
        ``coeffs[s, b]`` multiplies ``u**b`` on segment ``s``.
    """

    def __init__(self, times, coeffs):
        times = np.asarray(times, dtype=float)
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim != 3 or coeffs.shape[0] != times.size - 1:
            raise ValueError("coeffs must have shape (segments, degree + 1, dim)")
        _check_times(times)
        self.times = times
        self.coeffs = coeffs
        self.times.setflags(write=False)
        self.coeffs.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[2]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def n_segments(self) -> int:
        return self.coeffs.shape[0]

    def seg_eval(self, s: int, u) -> np.ndarray:
        """Points at local parameters ``u`` on segment ``s``; shape ``(len(u), D)``."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        powers = u[:, None] ** np.arange(self.degree + 1)[None, :]
        return powers @ self.coeffs[s]

    def seg_deriv(self, s: int, u) -> np.ndarray:
        """``d/du`` of the segment polynomial (not ``d/dt``)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        K = self.degree
        if K == 0:
            return np.zeros((u.size, self.dim))
        b = np.arange(1, K + 1)
        powers = u[:, None] ** (b - 1)[None, :]
        return powers @ (b[:, None] * self.coeffs[s, 1:])

    def locate(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Segment index and local parameter for each time in ``t``."""
        t = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), 0.0, 1.0)
        s = np.searchsorted(self.times, t, side="right") - 1
        s = np.clip(s, 0, self.n_segments - 1)
        u = (t - self.times[s]) / (self.times[s + 1] - self.times[s])
        return s, u

    def __call__(self, t) -> np.ndarray:
        scalar = np.ndim(t) == 0
        s, u = self.locate(t)
        powers = u[:, None] ** np.arange(self.degree + 1)[None, :]
        out = np.einsum("nk,nkd->nd", powers, self.coeffs[s])
        return out[0] if scalar else out

    def vertices(self) -> np.ndarray:
        """Values at every segment boundary."""
        start = self.coeffs[:, 0, :]
        end = self.coeffs[-1].sum(axis=0)
        return np.vstack([start, end[None, :]])

    def chordal(self, per_segment: int) -> "PiecewiseLinearPath":
        """Piecewise-linear interpolant with ``per_segment`` chords per segment."""
        if per_segment < 1:
            raise ValueError("per_segment must be positive")
        ts, pts = [], []
        grid = np.linspace(0.0, 1.0, per_segment + 1)[:-1]
        for s in range(self.n_segments):
            ts.append(self.times[s] + grid * (self.times[s + 1] - self.times[s]))
            pts.append(self.seg_eval(s, grid))
        ts.append(np.array([1.0]))
        pts.append(self.vertices()[-1:])
        return PiecewiseLinearPath(np.concatenate(ts), np.vstack(pts))


def _check_times(times: np.ndarray) -> None:
    if times.ndim != 1 or times.size < 2:
        raise ValueError("need at least two time stamps")
    if times[0] != 0.0 or times[-1] != 1.0:
        raise ValueError(f"times must run from 0 to 1, got [{times[0]!r}, {times[-1]!r}]")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")


class PiecewiseLinearPath(PolyCurve):
    """Time-stamped vertex list with linear interpolation.

    Parameters
    ----------
    times : array_like, shape (M + 1,)
        Strictly increasing, from 0 to 1.
    points : array_like, shape (M + 1, m)
        Vertices.

    Examples
    --------
    >>> x = PiecewiseLinearPath.from_points([[0, 0], [1, 0], [1, 1]])
    >>> x(0.75)
    array([1. , 0.5])
    """

    def __init__(self, times, points):
        times = np.asarray(times, dtype=float)
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[0] != times.size:
            raise ValueError("points must have shape (len(times), dim)")
        coeffs = np.stack([points[:-1], points[1:] - points[:-1]], axis=1)
        super().__init__(times, coeffs)
        self.points = points
        self.points.setflags(write=False)

    @classmethod
    def from_points(cls, points, parametrization: str = "arclength") -> "PiecewiseLinearPath":
        """Build a path through ``points``; times follow arc length or are uniform."""
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 2:
            raise ValueError("need at least two points of shape (n, dim)")
        if parametrization == "uniform":
            times = np.linspace(0.0, 1.0, points.shape[0])
        elif parametrization == "arclength":
            lengths = np.linalg.norm(np.diff(points, axis=0), axis=1)
            if np.any(lengths == 0):
                raise ValueError("repeated consecutive points; use parametrization='uniform'")
            cum = np.concatenate([[0.0], np.cumsum(lengths)])
            times = cum / cum[-1]
            times[-1] = 1.0
        else:
            raise ValueError(f"unknown parametrization {parametrization!r}")
        return cls(times, points)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.points, axis=0)

    def length(self) -> float:
        return float(np.linalg.norm(self.increments, axis=1).sum())

    def reparametrize(self, phi) -> "PiecewiseLinearPath":
        """Same vertices at times ``phi(t_k)``; ``phi`` increasing with fixed end points."""
        return PiecewiseLinearPath(np.asarray(phi(self.times), dtype=float), self.points)

    def restrict(self, s: float, t: float) -> "PiecewiseLinearPath":
        """The path on ``[s, t]``, rescaled to unit time."""
        if not 0.0 <= s < t <= 1.0:
            raise ValueError("need 0 <= s < t <= 1")
        inner = self.times[(self.times > s) & (self.times < t)]
        ts = np.concatenate([[s], inner, [t]])
        return PiecewiseLinearPath((ts - s) / (t - s), self(ts))

    def __repr__(self) -> str:
        return f"PiecewiseLinearPath(dim={self.dim}, segments={self.n_segments})"


def concat(x: PiecewiseLinearPath, y: PiecewiseLinearPath, tol: float = 1e-12) -> PiecewiseLinearPath:
    """Concatenate ``x`` then ``y``; each half gets time proportional to its segment count."""
    if x.dim != y.dim:
        raise ValueError("dimension mismatch")
    if np.max(np.abs(x.points[-1] - y.points[0])) > tol:
        raise ValueError("end point of x differs from start point of y")
    a = x.n_segments / (x.n_segments + y.n_segments)
    times = np.concatenate([a * x.times, a + (1 - a) * y.times[1:]])
    times[-1] = 1.0
    return PiecewiseLinearPath(times, np.vstack([x.points, y.points[1:]]))


def resample(x: PiecewiseLinearPath, grid) -> PiecewiseLinearPath:
    """Insert the times of ``grid`` as extra vertices; the trace is unchanged."""
    grid = np.asarray(grid, dtype=float)
    ts = np.union1d(x.times, grid[(grid >= 0) & (grid <= 1)])
    return PiecewiseLinearPath(ts, x(ts))


@dataclass(frozen=True)
class PVarResult:
    """Outcome of :func:`p_variation`."""

    value: float
    partition: tuple
    p: float


def p_variation(x: PolyCurve, p: float, samples: int = 2000) -> PVarResult:
    """p-variation of ``x`` over partitions drawn from a sample grid.

    The grid is the union of the vertex times and ``samples`` uniform times.
    An O(n^2) dynamic programme finds the best partition on that grid, which
    is exact for p = 1 and a lower bound converging under refinement otherwise.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    if samples < x.n_segments + 1:
        raise ValueError("samples must be at least the number of vertices")
    ts = np.union1d(x.times, np.linspace(0.0, 1.0, samples))
    pts = x(ts)
    n = ts.size
    best = np.zeros(n)
    back = np.zeros(n, dtype=int)
    for j in range(1, n):
        cand = best[:j] + np.linalg.norm(pts[j] - pts[:j], axis=1) ** p
        i = int(np.argmax(cand))
        best[j], back[j] = cand[i], i
    path = [n - 1]
    while path[-1] != 0:
        path.append(int(back[path[-1]]))
    part = tuple(float(ts[k]) for k in reversed(path))
    return PVarResult(value=float(best[-1] ** (1.0 / p)), partition=part, p=float(p))


def _sample(x: PolyCurve, samples: int) -> np.ndarray:
    return x(np.union1d(x.times, np.linspace(0.0, 1.0, samples)))


def discrete_frechet(P: np.ndarray, Q: np.ndarray) -> float:
    """Discrete Fréchet distance between point sequences, by anti-diagonal sweeps."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    n, m = len(P), len(Q)
    prev2 = None
    prev = np.array([np.linalg.norm(P[0] - Q[0])])
    # diagonal k holds cells (i, k - i) for i in [lo_k, hi_k]
    lo_prev, hi_prev = 0, 0
    for k in range(1, n + m - 1):
        lo, hi = max(0, k - m + 1), min(k, n - 1)
        i = np.arange(lo, hi + 1)
        d = np.linalg.norm(P[i] - Q[k - i], axis=1)
        best = np.full(i.size, np.inf)
        # from (i-1, j): previous diagonal index i-1
        idx = i - 1 - lo_prev
        ok = (idx >= 0) & (idx <= hi_prev - lo_prev)
        best[ok] = np.minimum(best[ok], prev[idx[ok]])
        # from (i, j-1): previous diagonal index i
        idx = i - lo_prev
        ok = (idx >= 0) & (idx <= hi_prev - lo_prev)
        best[ok] = np.minimum(best[ok], prev[idx[ok]])
        # from (i-1, j-1): diagonal k-2, index i-1
        if prev2 is not None:
            lo2, hi2, arr2 = prev2
            idx = i - 1 - lo2
            ok = (idx >= 0) & (idx <= hi2 - lo2)
            best[ok] = np.minimum(best[ok], arr2[idx[ok]])
        cur = np.maximum(best, d)
        prev2 = (lo_prev, hi_prev, prev)
        prev, lo_prev, hi_prev = cur, lo, hi
    return float(prev[-1])


def reparam_distance(x: PolyCurve, y: PolyCurve, samples: int = 500) -> float:
    """Monotone-matching distance between the traces of ``x`` and ``y``.

    Both curves are sampled at their vertex times plus ``samples`` uniform
    times, and the discrete Fréchet distance of the two sequences is returned.
    This upper-bounds the infimum over increasing time changes up to the
    sampling mesh and converges to it under refinement.
    """
    if x.dim != y.dim:
        raise ValueError("dimension mismatch")
    return discrete_frechet(_sample(x, samples), _sample(y, samples))


def path_from_records(records) -> PiecewiseLinearPath:
    """Records ``[t, x_1, ..., x_m]`` to a path (the JSON path format)."""
    arr = np.asarray(records, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < 2 or arr.shape[0] < 2:
        raise ValueError("path records must be a list of [t, x1, ..., xm] with at least two rows")
    return PiecewiseLinearPath(arr[:, 0], arr[:, 1:])


def path_to_records(x: PiecewiseLinearPath) -> list:
    return np.column_stack([x.times, x.points]).tolist()


def load_path_json(fname) -> PiecewiseLinearPath:
    with open(fname) as fh:
        return path_from_records(json.load(fh))


def dump_path_json(x: PiecewiseLinearPath, fname) -> None:
    with open(fname, "w") as fh:
        json.dump(path_to_records(x), fh)
