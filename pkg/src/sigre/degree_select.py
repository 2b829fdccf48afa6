"""Truncation degree for self-intersecting paths.

The signature path ``X^(N)`` is routed through unit-lattice cubes ``Q_z`` whose
centres have some coordinate equal to ``+-1/2``. ``N(g; delta)`` is the least
degree beyond which no route letter has a nonzero coordinate of higher degree,
and ``N(g)`` is its maximum over a grid of ``delta``. Beyond ``N(g)`` every
signature-path coordinate stays within ``1/2``, so routes through cylinders
``C x U`` over a scheme on ``E_{N(g)}`` do not depend on the lifting degree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import CubeScheme, CylinderScheme, HalfIntScheme, RouteWord, _poly_range, extract_route
from .lifted_path import LiftedPath
from .path_model import PiecewiseLinearPath, PolyCurve
from .tensor_algebra import flat_dim

__all__ = [
    "DEFAULT_DELTAS",
    "DegreeSelection",
    "LiftStabilization",
    "relative_signature_curve",
    "route_in_halfint_scheme",
    "degree_blocks",
    "projection_is_zero",
    "level_maxima",
    "projection_stabilized_degree",
    "prop61_check",
    "oracle_degree",
    "lift_scheme_route",
    "lift_stabilization",
]

DEFAULT_DELTAS = (1 / 8, 1 / 16, 1 / 32, 1 / 64)


def relative_signature_curve(x: PiecewiseLinearPath, N: int) -> PolyCurve:
    """``X^(N)_{0,t} - 1``: the signature path in coordinates centred at the unit."""
    return LiftedPath(x, N).relative_curve()


def route_in_halfint_scheme(x: PiecewiseLinearPath, delta: float, N: int) -> RouteWord:
    """Route of the degree-``N`` signature path through ``Q^{delta; N}``."""
    curve = relative_signature_curve(x, N)
    return extract_route(curve, HalfIntScheme(delta, curve.dim))


def degree_blocks(d: int, N: int) -> list:
    """Slices of the flat coordinates of each degree ``0..N``."""
    out, start = [], 0
    for k in range(N + 1):
        out.append(slice(start, start + d**k))
        start += d**k
    return out


def projection_is_zero(route: RouteWord, d: int, N: int) -> tuple[bool, int | None]:
    """Whether every letter vanishes in degrees above ``N``; also the largest offending degree."""
    if not route.labels:
        return True, None
    L = np.array(route.labels)
    top = 0
    while flat_dim(d, top) < L.shape[1]:
        top += 1
    blocks = degree_blocks(d, top)
    worst = None
    for k in range(N + 1, len(blocks)):
        if np.any(L[:, blocks[k]] != 0):
            worst = k
    return worst is None, worst


def level_maxima(x: PiecewiseLinearPath, N: int) -> np.ndarray:
    """``max_t max_{|I| = k} |X^I_{0,t}|`` for ``k = 0..N`` (exact per polynomial piece)."""
    curve = relative_signature_curve(x, N)
    blocks = degree_blocks(x.dim, N)
    out = np.zeros(N + 1)
    for s in range(curve.n_segments):
        c = curve.coeffs[s]
        for k, sl in enumerate(blocks):
            for I in range(sl.start, sl.stop):
                lo, hi = _poly_range(c[:, I])
                out[k] = max(out[k], abs(lo), abs(hi))
    return out


@dataclass
class DegreeSelection:
    """Outcome of :func:`projection_stabilized_degree`."""

    N_g: int
    per_delta: dict
    evidence: dict = field(default_factory=dict)
    routes: dict = field(default_factory=dict, repr=False)

    def to_json(self) -> dict:
        return {
            "N_g": self.N_g,
            "per_delta": {repr(float(k)): v for k, v in self.per_delta.items()},
            "evidence": {repr(float(k)): {str(n): w for n, w in v.items()}
                         for k, v in self.evidence.items()},
        }


def projection_stabilized_degree(x: PiecewiseLinearPath, deltas=DEFAULT_DELTAS, N_min: int = 1,
                                 N_max: int = 6) -> DegreeSelection:
    """``N(g) = max_delta N(g; delta)`` over a finite grid.

    ``N(g; delta)`` is the least ``N >= N_min`` such that for every tested
    ``N'`` in ``(N, N_max]`` all letters of ``m^{delta; N'}`` vanish in degrees
    ``N + 1 .. N'``.

    Raises
    ------
    RuntimeError
        If some ``delta`` needs ``N_max`` itself, i.e. there is no evidence
        that the projections have stabilised below ``N_max``.
    """
    if N_max < N_min + 1:
        raise ValueError("N_max must exceed N_min")
    d = x.dim
    per_delta, evidence, routes = {}, {}, {}
    for delta in deltas:
        rts = {Np: route_in_halfint_scheme(x, delta, Np) for Np in range(N_min + 1, N_max + 1)}
        routes[delta] = rts
        worst = {Np: projection_is_zero(r, d, N_min)[1] for Np, r in rts.items()}
        evidence[delta] = worst
        # least N with no offending degree above N in any tested N'
        top = max((w for w in worst.values() if w is not None), default=None)
        n = N_min if top is None else top
        if n >= N_max:
            raise RuntimeError(f"no stabilisation below N_max={N_max} at delta={delta} "
                               f"(offending degree {top})")
        per_delta[delta] = n
    return DegreeSelection(max(per_delta.values()), per_delta, evidence, routes)


def prop61_check(x: PiecewiseLinearPath, N_g: int, extra: int = 3) -> dict:
    """``max_t |X^I_t| <= 1/2`` for ``N_g < |I| <= N_g + extra``."""
    top = N_g + extra
    M = level_maxima(x, top)
    per = {k: float(M[k]) for k in range(N_g + 1, top + 1)}
    return {"ok": all(v <= 0.5 for v in per.values()), "max_by_degree": per}


def oracle_degree(x: PiecewiseLinearPath, delta: float, N_min: int = 1, N_max: int = 6) -> int:
    """Least ``N`` with ``max |X^I| <= 1/2 - delta/2`` for every degree in ``(N, N_max]``.

    A route letter with a nonzero degree-``k`` coordinate forces some
    ``|X^I_t| > 1/2 - delta/2`` with ``|I| = k``, so this bounds ``N(g; delta)`` from above.
    """
    M = level_maxima(x, N_max)
    n = N_min
    for k in range(N_min + 1, N_max + 1):
        if M[k] > 0.5 - delta / 2:
            n = k
    return n


def _base_scheme(eps: float, delta: float, dim: int) -> CubeScheme:
    return CubeScheme(eps, delta, dim, np.zeros(dim))


def lift_scheme_route(x: PiecewiseLinearPath, base, N: int, radius: float = 1.0) -> RouteWord:
    """Route of ``X^(N)`` through the cylinders ``C_i x U_N`` over ``base`` on ``E_{N(g)}``."""
    curve = relative_signature_curve(x, N)
    return extract_route(curve, CylinderScheme(base, curve.dim, radius=radius))


@dataclass
class LiftStabilization:
    """Routes through lifted cylinder schemes for ``N = N(g), ..., N_max``."""

    N_g: int
    base_route: RouteWord
    routes: dict
    N1: int | None

    @property
    def all_equal(self) -> bool:
        return all(r.labels == self.base_route.labels for r in self.routes.values())


def lift_stabilization(x: PiecewiseLinearPath, N_g: int, eps: float = 0.25, delta: float | None = None,
                       N_max: int = 6, radius: float = 1.0) -> LiftStabilization:
    """Compare base and lifted routes; ``N1`` is the least ``N`` from which the word stays fixed."""
    delta = eps / 4 if delta is None else delta
    base = _base_scheme(eps, delta, flat_dim(x.dim, N_g))
    base_route = extract_route(relative_signature_curve(x, N_g), base)
    routes = {N: lift_scheme_route(x, base, N, radius) for N in range(N_g + 1, N_max + 1)}
    words = [base_route.labels] + [routes[N].labels for N in range(N_g + 1, N_max + 1)]
    N1 = None
    for i in range(len(words)):
        if all(w == words[-1] for w in words[i:]):
            N1 = N_g + i
            break
    return LiftStabilization(N_g, base_route, routes, N1)
