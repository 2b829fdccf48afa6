"""Scheme stacks on the ``eps``-scale and the polygonal reconstruction.

The stack has one scheme per skeleton level ``D, D-1, ..., 1``. The top level
uses cubes whose tunnel width ``delta_1`` is selected from the stability of
the admissible-chain length; every lower level uses hulls whose outer
parameter is the previous level's width. The merged route over all levels
gives the vertices ``origin + eps * z`` of the polygonal path, parametrised by
entry times and held constant after the last entry.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist

from .geometry import (CubeScheme, DisjointReport, HullScheme, RouteWord, label_to_z, materialize,
                       occupancy, route_from_occupancy, tunnel_intervals, validate_disjoint)
from .path_model import PiecewiseLinearPath, PolyCurve, reparam_distance
from .stability import DeltaSelection, LevelFamily, select_delta

__all__ = [
    "SchemeStack",
    "ReconstructionResult",
    "ExcursionReport",
    "build_scheme_stack",
    "naive_stack",
    "stack_route",
    "polygon_from_route",
    "sup_error",
    "reconstruct_polygonal",
    "check_excursion_bound",
    "naive_reconstruct",
    "theorem_bound",
    "excursion_threshold",
]

log = logging.getLogger(__name__)


def theorem_bound(D: int, eps: float) -> float:
    """``68 D^{3/2} eps``."""
    return 68.0 * D**1.5 * eps


def excursion_threshold(D: int, eps: float) -> float:
    """``33 D^{3/2} eps``."""
    return 33.0 * D**1.5 * eps


@dataclass
class SchemeStack:
    """The ``D`` schemes of one ``eps``-scale, top level first."""

    eps: float
    D: int
    origin: np.ndarray
    deltas: tuple
    schemes: list
    selections: list = field(default_factory=list)
    disjoint: DisjointReport | None = None

    def levels(self) -> list:
        return [s.level for s in self.schemes]


def _default_origin(curve: PolyCurve, origin) -> np.ndarray:
    return np.asarray(curve(0.0) if origin is None else origin, dtype=float)


def build_scheme_stack(curve: PolyCurve, eps: float, origin=None, validate: bool = True,
                       certificate: bool = False) -> SchemeStack:
    """Select ``delta_1 > ... > delta_D`` level by level and assemble the stack.

    Parameters
    ----------
    curve : PolyCurve
        Piecewise-linear path in the ambient space; must start in the origin cube.
    eps : float
        Lattice spacing.
    origin : array_like, optional
        Lattice origin (the unit for lifted paths). Defaults to ``curve(0)``.
    validate : bool
        Check closed-domain disjointness over every domain the path touches.
    certificate : bool
        Store the route-change thresholds of each selection.

    Raises
    ------
    RuntimeError
        If the assembled domains are not disjoint.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    origin = _default_origin(curve, origin)
    D = curve.dim
    selections, schemes = [], []
    fam = LevelFamily(eps, D, D, origin=origin)
    for i in range(D):
        sel = select_delta(curve, fam, D=D, certificate=certificate)
        selections.append(sel)
        schemes.append(fam.at(sel.delta))
        log.debug("level %d: delta=%.6g s=%d", fam.level, sel.delta, sel.s_value)
        if i + 1 < D:
            fam = LevelFamily(eps, D - i - 1, D, delta_outer=sel.delta, origin=origin)
    stack = SchemeStack(eps, D, origin, tuple(s.delta for s in selections), schemes, selections)
    if validate:
        stack.disjoint = validate_stack(curve, stack)
        if not stack.disjoint.ok:
            raise RuntimeError(f"scheme stack is not disjoint: {stack.disjoint.witness}")
    return stack


def naive_stack(curve: PolyCurve, eps: float, delta: float | None = None, origin=None) -> SchemeStack:
    """Stack without stabilisation: every level uses the same ``delta`` (default ``eps/2``)."""
    origin = _default_origin(curve, origin)
    D = curve.dim
    delta = eps / 2 if delta is None else float(delta)
    schemes = [CubeScheme(eps, delta, D, origin)]
    schemes += [HullScheme(eps, D - i, delta, delta, D, origin) for i in range(1, D)]
    return SchemeStack(eps, D, origin, (delta,) * D, schemes)


def validate_stack(curve: PolyCurve, stack: SchemeStack) -> DisjointReport:
    doms = []
    for k, sch in enumerate(stack.schemes):
        doms.extend(materialize(curve, sch, tag=k))
    return validate_disjoint(doms)


def _stack_occupancy(curve: PolyCurve, stack: SchemeStack) -> list:
    occ = []
    for sch in stack.schemes:
        occ.extend(occupancy(curve, sch))
    occ.sort(key=lambda r: (r[0], r[1]))
    return occ


def stack_route(curve: PolyCurve, stack: SchemeStack) -> RouteWord:
    """Chronological route over the merged domains of all levels."""
    return route_from_occupancy(_stack_occupancy(curve, stack), stack.schemes[0].origin_label,
                                require_start=True)


def polygon_from_route(route: RouteWord, eps: float, origin) -> PiecewiseLinearPath:
    """Join ``origin + eps z_k`` at the entry times; constant after the last entry."""
    origin = np.asarray(origin, dtype=float)
    pts = [origin + eps * np.asarray(label_to_z(l)) for l in route.labels]
    times = list(route.entry_times)
    times[0] = 0.0
    if times[-1] < 1.0:
        times.append(1.0)
        pts.append(pts[-1])
    if len(times) == 1:
        times, pts = [0.0, 1.0], [pts[0], pts[0]]
    return PiecewiseLinearPath(np.array(times), np.array(pts))


def sup_error(a: PolyCurve, b: PolyCurve, grid: int = 4096) -> float:
    """``sup_t |a_t - b_t|`` over breakpoints of both curves and a uniform grid."""
    t = np.unique(np.concatenate([np.linspace(0.0, 1.0, grid + 1), a.times, b.times]))
    if b.degree > 1:
        # polynomial pieces: refine inside each segment as well
        t = np.unique(np.concatenate([t, np.linspace(0.0, 1.0, 16 * grid + 1)]))
    return float(np.linalg.norm(a(t) - b(t), axis=1).max())


@dataclass
class ReconstructionResult:
    """Polygonal reconstruction on one ``eps``-scale."""

    eps: float
    D: int
    route: RouteWord
    polygon: PiecewiseLinearPath
    sup_error: float
    bound: float
    d_metric: float
    deltas: tuple = ()
    stack: SchemeStack | None = field(default=None, repr=False)

    @property
    def L(self) -> int:
        return self.route.L

    @property
    def within_bound(self) -> bool:
        return self.sup_error <= self.bound

    def max_step(self) -> float:
        """Largest lattice displacement between consecutive route letters."""
        z = np.array([label_to_z(l) for l in self.route.labels], dtype=float)
        if len(z) < 2:
            return 0.0
        return float(np.linalg.norm(np.diff(z, axis=0), axis=1).max())


def _result(curve, route, stack, eps, reference, samples) -> ReconstructionResult:
    poly = polygon_from_route(route, eps, stack.origin)
    ref = curve if reference is None else reference
    err = sup_error(poly, ref)
    dm = reparam_distance(poly, ref, samples=samples)
    return ReconstructionResult(eps, curve.dim, route, poly, err, theorem_bound(curve.dim, eps),
                                dm, stack.deltas, stack)


def reconstruct_polygonal(curve: PolyCurve, eps: float, origin=None, reference: PolyCurve | None = None,
                          samples: int = 500, validate: bool = True) -> ReconstructionResult:
    """Full pipeline on one scale.

    Parameters
    ----------
    curve : PolyCurve
        Piecewise-linear path whose routes define the stack.
    eps : float
    origin : array_like, optional
    reference : PolyCurve, optional
        Path the errors are measured against (defaults to ``curve``), e.g. an
        exact polynomial signature path when ``curve`` is a chordal approximation.
    samples : int
        Resolution of the reparametrisation distance.
    """
    stack = build_scheme_stack(curve, eps, origin, validate=validate)
    route = stack_route(curve, stack)
    return _result(curve, route, stack, eps, reference, samples)


@dataclass(frozen=True)
class ExcursionReport:
    ok: bool
    threshold: float
    max_excursion: float
    witness: tuple | None = None


def _diameter(curve: PolyCurve, a: float, b: float) -> float:
    inner = curve.times[(curve.times > a) & (curve.times < b)]
    ts = np.concatenate([[a], inner, [b]])
    if curve.degree > 1:
        ts = np.unique(np.concatenate([ts, np.linspace(a, b, 257)]))
    pts = curve(ts)
    return float(pdist(pts).max()) if len(pts) > 1 else 0.0


def check_excursion_bound(curve: PolyCurve, stack: SchemeStack) -> ExcursionReport:
    """Largest displacement during a maximal stay in the tunnels, against ``33 D^{3/2} eps``."""
    thr = excursion_threshold(stack.D, stack.eps)
    worst, witness = 0.0, None
    for a, b in tunnel_intervals(_stack_occupancy(curve, stack)):
        diam = _diameter(curve, a, b)
        if diam > worst:
            worst = diam
            if diam >= thr:
                witness = (a, b)
    return ExcursionReport(witness is None, thr, worst, witness)


def naive_reconstruct(curve: PolyCurve, eps: float, delta: float, origin=None,
                      samples: int = 500) -> ReconstructionResult:
    """Single top-level cube scheme with a fixed tunnel width, no skeleton recursion."""
    if not 0 < delta < eps:
        raise ValueError("need 0 < delta < eps")
    origin = _default_origin(curve, origin)
    sch = CubeScheme(eps, delta, curve.dim, origin)
    stack = SchemeStack(eps, curve.dim, origin, (delta,), [sch])
    route = stack_route(curve, stack)
    return _result(curve, route, stack, eps, None, samples)
