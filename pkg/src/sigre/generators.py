"""Named test paths used by the CLI, the demos and the test-suite."""
from __future__ import annotations

import numpy as np

from .geometry import BoxFamily
from .path_model import PiecewiseLinearPath, concat

__all__ = [
    "NAMED_PATHS",
    "l_path",
    "spiral",
    "figure_eight",
    "example_2_1",
    "example_3_1",
    "example_3_1_eps",
    "tunnel_runner",
    "random_pl_path",
    "random_simple_path",
    "six_boxes",
]


def l_path() -> PiecewiseLinearPath:
    """``(0,0) -> (1,0) -> (1,1)`` with arclength timing."""
    return PiecewiseLinearPath.from_points([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])


def spiral(turns: int = 5, r0: float = 0.1, r1: float = 1.0, n: int = 400) -> PiecewiseLinearPath:
    """Archimedean spiral sampled at ``n + 1`` points, from radius ``r0`` out to ``r1``."""
    th = np.linspace(0.0, 2 * np.pi * turns, n + 1)
    r = r0 + (r1 - r0) * th / th[-1]
    return PiecewiseLinearPath.from_points(np.c_[r * np.cos(th), r * np.sin(th)])


def figure_eight(ax: float = 1.0, ay: float = 0.12, n: int = 128) -> PiecewiseLinearPath:
    """Lissajous loop ``(ax sin t, ay sin 2t)``, ``t`` in ``[0, 2 pi]``.

    The default size keeps every signature coordinate of degree three and
    above below ``0.38`` while degree two reaches ``1/2``.
    """
    t = np.linspace(0.0, 2 * np.pi, n + 1)
    return PiecewiseLinearPath.from_points(np.c_[ax * np.sin(t), ay * np.sin(2 * t)])


def _arc(theta_a: float, theta_b: float, n: int) -> np.ndarray:
    th = np.linspace(theta_a, theta_b, n + 1)
    return np.c_[np.cos(th), np.sin(th)]


def example_2_1(theta0: float = 0.2, spike: float = 1e-3, n: int = 1024
                ) -> tuple[PiecewiseLinearPath, PiecewiseLinearPath]:
    """The arc ``y`` and the arc with a radial out-and-back spike ``x``.

    Both are chordal approximations with ``n`` chords on the arc; ``A`` and
    ``B`` sit at angles ``-theta0/2`` and ``theta0/2`` of the unit circle.
    """
    if n % 2:
        raise ValueError("n must be even")
    h = theta0 / 2
    y = PiecewiseLinearPath.from_points(_arc(-h, h, n))
    first = _arc(-h, 0.0, n // 2)
    C = first[-1]
    D = (1.0 + spike) * C
    second = _arc(0.0, h, n // 2)
    x = PiecewiseLinearPath.from_points(np.vstack([first, D[None, :], C[None, :], second[1:]]))
    return x, y


def example_3_1(n: int) -> tuple[PiecewiseLinearPath, float]:
    """The L-path with the scale ``eps_n = 2/(2n+1)``."""
    return l_path(), example_3_1_eps(n)


def example_3_1_eps(n: int) -> float:
    return 2.0 / (2 * n + 1)


def tunnel_runner(eps: float = 0.1, offset: float = 0.7, length: float = 200.0) -> PiecewiseLinearPath:
    """Step ``offset * eps`` sideways, then run ``length * eps`` along a tunnel line.

    With cubes of half-width ``(eps - delta)/2`` and ``delta = eps/2`` the
    vertical leg at ``x = 0.7 eps`` stays in the gap between two columns.
    """
    return PiecewiseLinearPath.from_points([[0.0, 0.0], [offset * eps, 0.0], [offset * eps, length * eps]])


def random_pl_path(rng: np.random.Generator, d: int = 2, segments: int = 5,
                   scale: float = 1.0) -> PiecewiseLinearPath:
    """Gaussian increments from the origin, uniform timing."""
    pts = np.vstack([np.zeros(d), np.cumsum(scale * rng.standard_normal((segments, d)), axis=0)])
    return PiecewiseLinearPath(np.linspace(0.0, 1.0, segments + 1), pts)


def random_simple_path(rng: np.random.Generator, segments: int = 4, step: float = 1.0,
                       d: int = 2) -> PiecewiseLinearPath:
    """Monotone staircase in the positive orthant; never self-intersects."""
    pts = [np.zeros(d)]
    for k in range(segments):
        v = np.zeros(d)
        v[k % d] = step * rng.uniform(0.5, 1.0)
        v[(k + 1) % d] = step * rng.uniform(0.0, 0.3)
        pts.append(pts[-1] + v)
    return PiecewiseLinearPath.from_points(np.array(pts))


def six_boxes() -> tuple[PiecewiseLinearPath, BoxFamily]:
    """Six unit-spaced planar boxes and a path visiting them as ``0 3 4 5 0 1 0 3``."""
    w = (0.5, 0.5)
    boxes = {0: ((0, 0), w), 1: ((0, -2), w), 2: ((-2, 0), w), 3: ((2, 0), w),
             4: ((2, 2), w), 5: ((0, 2), w)}
    pts = [(0, 0), (2, 0), (2, 2), (0, 2), (0, 0), (0, -2), (0, 0), (2.2, 0.1)]
    return PiecewiseLinearPath.from_points(np.array(pts, dtype=float)), BoxFamily(boxes, 0)


NAMED_PATHS = {
    "l-path": l_path,
    "spiral": spiral,
    "figure-eight": figure_eight,
    "tunnel-runner": tunnel_runner,
    "example-2-1": lambda: example_2_1()[0],
    "example-3-1": l_path,
}
