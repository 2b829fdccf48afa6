"""One-forms on ``E_N``, extended signatures and route verification.

Two kinds of forms are provided.

* :class:`PolynomialOneForm` has polynomial coefficients in the increments
  ``y^J - y^J_0``. Its extended signatures are finite linear combinations of
  lifted-signature coefficients, so they are computed from the base signature
  alone (:func:`polynomial_extended_signature_from_g`).
* Bump forms (:class:`BumpOneForm`, :class:`GenericBumpForm`) are built from
  ``C^alpha`` smoothstep profiles on boxes and integrated along the path by
  adaptive Gauss-Legendre quadrature split at every profile knot.

:func:`build_route_oneforms` constructs one form per visited domain whose
integral over every visit is exactly one; :func:`verify_route` evaluates the
route indicator on a candidate word.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from ._quadrature import cumulative_matrix, gauss_nodes
from .geometry import RouteWord, _poly_range, _slab, extract_route
from .lifted_path import LiftedPath, lifted_signature_eq46
from .path_model import PolyCurve
from .signature_core import SignatureResult
from .tensor_algebra import word_index

__all__ = [
    "smoothstep",
    "BoxBump",
    "BoxUnion",
    "PolynomialOneForm",
    "BumpOneForm",
    "GenericBumpForm",
    "RouteVerdict",
    "FormConstructionError",
    "QuadratureEngine",
    "extended_signature_quadrature",
    "polynomial_extended_signature_from_g",
    "en_word_expansion",
    "build_route_oneforms",
    "generic_forms",
    "verify_route",
    "RouteVerifier",
]


# ---------------------------------------------------------------------------
# smooth profiles


@lru_cache(maxsize=16)
def _smoothstep_poly(alpha: int) -> tuple[np.ndarray, np.ndarray]:
    # x^{a+1} sum_k C(a+k, k) (1-x)^k: value 0/1 at the ends, a vanishing derivatives
    c = np.zeros(1)
    for k in range(alpha + 1):
        term = math.comb(alpha + k, k) * P.polypow([1.0, -1.0], k)
        c = P.polyadd(c, term)
    c = P.polymul(c, P.polypow([0.0, 1.0], alpha + 1))
    return c, P.polyder(c)


def smoothstep(x, alpha: int = 2, deriv: bool = False):
    """``C^alpha`` step from 0 (``x <= 0``) to 1 (``x >= 1``), polynomial of degree ``2 alpha + 1``."""
    c, dc = _smoothstep_poly(int(alpha))
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, 0.0, 1.0)
    val = P.polyval(xc, c)
    val = np.where(x <= 0, 0.0, np.where(x >= 1, 1.0, val))
    if not deriv:
        return val
    dval = np.where((x > 0) & (x < 1), P.polyval(xc, dc), 0.0)
    return val, dval


def _sub_poly(coeffs: np.ndarray, u0: float, u1: float) -> np.ndarray:
    """Coefficients of ``p(u0 + (u1 - u0) v)`` in ``v``, column-wise."""
    K = coeffs.shape[0]
    out = np.zeros_like(coeffs)
    lin = np.array([u0, u1 - u0])
    power = np.array([1.0])
    for b in range(K):
        out[: power.size] += np.outer(power, coeffs[b])
        power = P.polymul(power, lin)
    return out


def _piece_bbox(curve: PolyCurve, s: int, u0: float, u1: float) -> tuple[np.ndarray, np.ndarray]:
    c = _sub_poly(curve.coeffs[s], u0, u1)
    lo, hi = np.empty(curve.dim), np.empty(curve.dim)
    for I in range(curve.dim):
        lo[I], hi[I] = _poly_range(c[:, I])
    return lo, hi


def _pieces(curve: PolyCurve, t0: float, t1: float):
    """``(s, u0, u1)`` pieces of ``[t0, t1]`` split at segment boundaries."""
    out = []
    for s in range(curve.n_segments):
        a, b = max(t0, curve.times[s]), min(t1, curve.times[s + 1])
        if b <= a:
            continue
        w = curve.times[s + 1] - curve.times[s]
        out.append((s, (a - curve.times[s]) / w, (b - curve.times[s]) / w))
    return out


def _crossings(c: np.ndarray, level: float) -> list:
    """Roots in (0, 1) of ``p(u) = level``."""
    c = np.trim_zeros(np.asarray(c, dtype=float), "b")
    if c.size <= 1:
        return []
    if c.size == 2:
        u = (level - c[0]) / c[1]
        return [float(u)] if 0 < u < 1 else []
    cc = c.copy()
    cc[0] -= level
    return [float(r.real) for r in P.polyroots(cc) if abs(r.imag) < 1e-10 and 0 < r.real < 1]


class BoxBump:
    """Product of smoothsteps: 1 on the core box, 0 outside the core inflated by ``margin``.

    Parameters
    ----------
    center, core : array_like
        Center and core half-widths.
    margin : float or array_like
        Width of the transition band per coordinate.
    alpha : int
        Smoothness order of the profile.
    """

    def __init__(self, center, core, margin, alpha: int = 2):
        self.center = np.asarray(center, dtype=float)
        self.core = np.asarray(core, dtype=float)
        self.margin = np.broadcast_to(np.asarray(margin, dtype=float), self.center.shape).copy()
        if np.any(self.margin <= 0) or np.any(self.core < 0):
            raise ValueError("margins must be positive and core widths non-negative")
        self.alpha = alpha

    @property
    def outer(self) -> np.ndarray:
        return self.core + self.margin

    def _factors(self, pts):
        dev = pts - self.center
        r = np.abs(dev)
        v, dv = smoothstep((r - self.core) / self.margin, self.alpha, deriv=True)
        phi = 1.0 - v
        dphi = -dv / self.margin * np.sign(dev)
        return phi, dphi

    def value(self, pts) -> np.ndarray:
        phi, _ = self._factors(np.atleast_2d(pts))
        return phi.prod(axis=1)

    def value_grad(self, pts):
        pts = np.atleast_2d(pts)
        phi, dphi = self._factors(pts)
        n, D = phi.shape
        pre = np.ones((n, D + 1))
        suf = np.ones((n, D + 1))
        pre[:, 1:] = np.cumprod(phi, axis=1)
        suf[:, :-1] = np.cumprod(phi[:, ::-1], axis=1)[:, ::-1]
        others = pre[:, :-1] * suf[:, 1:]
        return pre[:, -1], dphi * others

    def knots(self, curve: PolyCurve, s: int) -> list:
        out = []
        c = curve.coeffs[s]
        for I in range(curve.dim):
            for lev in (self.core[I], self.outer[I]):
                out += _crossings(c[:, I], self.center[I] + lev)
                out += _crossings(c[:, I], self.center[I] - lev)
        return out


class BoxUnion:
    """Smooth indicator ``1 - prod_k (1 - b_k)`` of a union of box bumps."""

    def __init__(self, boxes: Sequence[BoxBump]):
        self.boxes = list(boxes)
        if not self.boxes:
            raise ValueError("empty union")
        self.lo = np.min([b.center - b.outer for b in self.boxes], axis=0)
        self.hi = np.max([b.center + b.outer for b in self.boxes], axis=0)

    def _active(self, pts):
        return np.all((pts > self.lo) & (pts < self.hi), axis=1)

    def value_grad(self, pts):
        pts = np.atleast_2d(pts)
        n, D = pts.shape
        val = np.zeros(n)
        grad = np.zeros((n, D))
        act = self._active(pts)
        if not act.any():
            return val, grad
        q = pts[act]
        comp = np.ones(q.shape[0])
        g = np.zeros(q.shape)
        for b in self.boxes:
            inside = np.all(np.abs(q - b.center) < b.outer, axis=1)
            if not inside.any():
                continue
            bv, bg = b.value_grad(q[inside])
            # d(1 - comp) with comp -> comp (1 - b)
            g[inside] = g[inside] * (1 - bv)[:, None] + comp[inside, None] * bg
            comp[inside] *= 1 - bv
        val[act] = 1 - comp
        grad[act] = g
        return val, grad

    def knots(self, curve: PolyCurve, s: int) -> list:
        lo, hi = _piece_bbox(curve, s, 0.0, 1.0)
        if np.any(hi < self.lo) or np.any(lo > self.hi):
            return []
        out = []
        for b in self.boxes:
            if np.any(hi < b.center - b.outer) or np.any(lo > b.center + b.outer):
                continue
            out += b.knots(curve, s)
        return out


# ---------------------------------------------------------------------------
# forms


class PolynomialOneForm:
    """``sum coeff * prod_k (y^{J_k} - y^{J_k}_0) dy^{I_0}`` on ``E_N``.

    Parameters
    ----------
    terms : sequence of (coefficient, monomial, target)
        ``monomial`` is a sequence of words (letters in ``1..d``, each non-empty)
        and ``target`` a non-empty word.
    d : int
        Base dimension.
    """

    def __init__(self, terms, d: int):
        self.d = int(d)
        norm = []
        for coeff, mono, target in terms:
            mono = tuple(tuple(int(i) for i in J) for J in mono)
            target = tuple(int(i) for i in target)
            if not target or any(not J for J in mono):
                raise ValueError("monomial factors and targets must be non-empty words")
            for w in mono + (target,):
                word_index(w, self.d)
            norm.append((float(coeff), mono, target))
        self.terms = tuple(norm)

    @classmethod
    def coordinate(cls, word, d: int) -> "PolynomialOneForm":
        """``dy^I``."""
        return cls([(1.0, (), word)], d)

    @property
    def max_word_length(self) -> int:
        return max(max((len(w) for w in m + (t,)), default=0) for _, m, t in self.terms)

    @property
    def demand(self) -> int:
        """Largest total word length of a single term."""
        return max(sum(len(J) for J in m) + len(t) for _, m, t in self.terms)

    def covector(self, pts, y0) -> np.ndarray:
        pts = np.atleast_2d(pts)
        out = np.zeros_like(pts)
        for coeff, mono, target in self.terms:
            v = np.full(pts.shape[0], coeff)
            for J in mono:
                k = word_index(J, self.d)
                v = v * (pts[:, k] - y0[k])
            out[:, word_index(target, self.d)] += v
        return out

    def knots(self, curve, s) -> list:
        return []


@dataclass
class BumpOneForm:
    """``sum_v G_v dF_v`` over the visits ``v`` of one domain.

    ``F_v`` is the smooth indicator of a tube around the late part of the visit
    and ``G_v`` that of a tube around the middle part.
    """

    label: object
    pieces: list  # list of (G: BoxUnion, F: BoxUnion)
    margin: float
    times: list = field(default_factory=list)  # (s, s', t', t) per visit

    def covector(self, pts, y0=None) -> np.ndarray:
        pts = np.atleast_2d(pts)
        out = np.zeros_like(pts)
        for G, F in self.pieces:
            g, _ = G.value_grad(pts)
            nz = g != 0
            if nz.any():
                _, fg = F.value_grad(pts[nz])
                out[nz] += g[nz, None] * fg
        return out

    def knots(self, curve, s) -> list:
        out = []
        for G, F in self.pieces:
            out += G.knots(curve, s) + F.knots(curve, s)
        return out


@dataclass
class GenericBumpForm:
    """``b(y) <c, dy>`` for a box bump ``b`` inside a domain and a fixed covector ``c``."""

    label: object
    bump: BoxBump
    direction: np.ndarray

    def covector(self, pts, y0=None) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return self.bump.value(pts)[:, None] * self.direction[None, :]

    def knots(self, curve, s) -> list:
        return self.bump.knots(curve, s)


# ---------------------------------------------------------------------------
# quadrature


class QuadratureEngine:
    """Adaptive piecewise Gauss-Legendre integration of iterated form integrals.

    The time axis is cut at every knot of every form, so each piece carries a
    polynomial integrand. A piece is bisected until ``M`` and ``2M`` point
    rules agree on every single-form integral to ``tol``; chains are then
    integrated with the cumulative ``2M`` rule.

    Parameters
    ----------
    curve : PolyCurve or LiftedPath
    forms : mapping
        Key to form; every form provides ``covector(pts, y0)`` and ``knots(curve, s)``.
    tol : float
    order : int
        Base order ``M``.
    """

    def __init__(self, curve, forms: dict, tol: float = 1e-13, order: int = 8, max_depth: int = 40):
        self.curve = curve.curve if isinstance(curve, LiftedPath) else curve
        self.keys = list(forms)
        self.index = {k: i for i, k in enumerate(self.keys)}
        self.forms = [forms[k] for k in self.keys]
        self.tol = tol
        self.M = int(order)
        self.max_depth = max_depth
        self.y0 = self.curve(0.0)
        self.pieces = []  # (s, u0, u1, phi (n_forms, 2M))
        for s in range(self.curve.n_segments):
            ks = {0.0, 1.0}
            for f in self.forms:
                ks.update(k for k in f.knots(self.curve, s) if 0 < k < 1)
            ks = sorted(ks)
            for u0, u1 in zip(ks[:-1], ks[1:]):
                if u1 - u0 > 1e-15:
                    self._adapt(s, u0, u1, 0)

    def _phi(self, s, u0, u1, M):
        nodes, _ = gauss_nodes(M)
        u = u0 + (u1 - u0) * nodes
        pts = self.curve.seg_eval(s, u)
        dp = self.curve.seg_deriv(s, u) * (u1 - u0)
        return np.array([np.einsum("nd,nd->n", f.covector(pts, self.y0), dp) for f in self.forms])

    def _adapt(self, s, u0, u1, depth):
        M = self.M
        lo = self._phi(s, u0, u1, M)
        hi = self._phi(s, u0, u1, 2 * M)
        if not lo.any() and not hi.any():
            return
        a = lo @ gauss_nodes(M)[1]
        b = hi @ gauss_nodes(2 * M)[1]
        if depth >= self.max_depth or np.max(np.abs(a - b)) <= self.tol * (1 + np.max(np.abs(b))):
            self.pieces.append((s, u0, u1, hi))
            return
        m = 0.5 * (u0 + u1)
        self._adapt(s, u0, m, depth + 1)
        self._adapt(s, m, u1, depth + 1)

    def integrate(self, keys: Sequence) -> float:
        """``int_{t_1 < ... < t_n} Phi^1(dy) ... Phi^n(dy)`` for the forms named by ``keys``."""
        rows = [self.index[k] for k in keys]
        n = len(rows)
        if n == 0:
            return 1.0
        C = cumulative_matrix(2 * self.M)
        h = np.zeros(n + 1)
        h[0] = 1.0
        for _, _, _, phi in sorted(self.pieces, key=lambda p: (p[0], p[1])):
            sub = phi[rows]
            if not sub.any():
                continue
            prev = np.ones(2 * self.M)
            for j in range(n):
                vals = C @ (prev * sub[j])
                at = h[j + 1] + vals[:-1]
                h[j + 1] += vals[-1]
                prev = at
        return float(h[n])


def extended_signature_quadrature(y, forms: Sequence, tol: float = 1e-13, order: int = 8) -> float:
    """Extended signature of ``y`` along ``forms`` by adaptive quadrature.

    Parameters
    ----------
    y : LiftedPath or PolyCurve
        Path in ``E_N`` (or any ambient space matching the forms).
    forms : sequence of forms
    """
    if not forms:
        return 1.0
    eng = QuadratureEngine(y, {i: f for i, f in enumerate(forms)}, tol=tol, order=order)
    return eng.integrate(range(len(forms)))


# ---------------------------------------------------------------------------
# signature-only route for polynomial forms


def _insert_letter(word: tuple, letter) -> list:
    return [word[:k] + (letter,) + word[k:] for k in range(len(word) + 1)]


def en_word_expansion(forms: Sequence[PolynomialOneForm]) -> dict:
    """Linear combination of ``E_N``-words equal to the extended signature.

    Each term ``prod_k (y^{J_k} - y^{J_k}_0) dy^{I_0}`` multiplies the running
    word combination by the shuffle with the single letters ``J_k`` and then
    appends ``I_0``.
    """
    acc = {(): 1.0}
    for form in forms:
        nxt: dict = defaultdict(float)
        for coeff, mono, target in form.terms:
            cur = dict(acc)
            for J in mono:
                sh: dict = defaultdict(float)
                for w, c in cur.items():
                    for w2 in _insert_letter(w, J):
                        sh[w2] += c
                cur = sh
            for w, c in cur.items():
                nxt[w + (target,)] += coeff * c
        acc = {w: c for w, c in nxt.items() if c != 0.0}
    return acc


def polynomial_extended_signature_from_g(g, forms: Sequence[PolynomialOneForm]) -> float:
    """Extended signature along polynomial forms from the base signature only.

    Every ``E_N``-word ``(L_1, ..., L_k)`` in :func:`en_word_expansion` is
    evaluated by the lifted closed form with labels ``(|L_1|, ..., |L_k|)`` at
    the concatenated index.

    Raises
    ------
    ValueError
        If the signature degree is below the largest total word length.
    """
    tensor = g.tensor if isinstance(g, SignatureResult) else g
    expansion = en_word_expansion(forms)
    need = max((sum(len(L) for L in w) for w in expansion), default=0)
    if need > tensor.degree:
        raise ValueError(f"signature degree {tensor.degree} is below the required {need}")
    cache: dict = {}
    total = 0.0
    for w, c in sorted(expansion.items()):
        if not w:
            total += c
            continue
        labels = tuple(len(L) for L in w)
        if labels not in cache:
            cache[labels] = lifted_signature_eq46(tensor, labels).coefficients
        total += c * float(cache[labels][tuple(i - 1 for L in w for i in L)])
    return total


# ---------------------------------------------------------------------------
# route forms


class FormConstructionError(ValueError):
    """No admissible tube margin was found; ``pair`` names the offending regions."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


def _domain_inner_box(scheme, label) -> tuple[np.ndarray, np.ndarray]:
    c, A, B, t0, _ = scheme.disjoint_data(label)
    return np.asarray(c, dtype=float), np.asarray(A + B * t0, dtype=float)


def _domain_contains(scheme, label, pts) -> bool:
    if hasattr(scheme, "contains"):
        return all(scheme.contains(p, label) for p in pts)
    c, w = _domain_inner_box(scheme, label)
    return bool(np.all(np.abs(np.asarray(pts) - c) < w))


def _tube(curve, t0, t1, margin, alpha) -> BoxUnion:
    boxes = []
    for s, u0, u1 in _pieces(curve, t0, t1):
        lo, hi = _piece_bbox(curve, s, u0, u1)
        n = max(1, int(math.ceil(np.linalg.norm(hi - lo) / (margin / 2))))
        for k in range(n):
            a, b = u0 + (u1 - u0) * k / n, u0 + (u1 - u0) * (k + 1) / n
            lo, hi = _piece_bbox(curve, s, a, b)
            boxes.append(BoxBump((lo + hi) / 2, (hi - lo) / 2 + margin, margin, alpha))
    return BoxUnion(boxes)


def _corners(center, half):
    D = center.size
    signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * D, indexing="ij")).reshape(D, -1).T
    return center + signs * half


def _meets_outer(curve, t0, t1, union: BoxUnion) -> bool:
    """Whether the path on ``[t0, t1]`` meets the closure of the union's support."""
    for s, u0, u1 in _pieces(curve, t0, t1):
        lo, hi = _piece_bbox(curve, s, u0, u1)
        if np.any(hi < union.lo) or np.any(lo > union.hi):
            continue
        c = _sub_poly(curve.coeffs[s], u0, u1)
        for b in union.boxes:
            if np.any(hi < b.center - b.outer) or np.any(lo > b.center + b.outer):
                continue
            cur = [(0.0, 1.0)]
            for I in range(curve.dim):
                st = _slab(c[:, I], b.center[I], b.outer[I] * (1 + 1e-9) + 1e-15)
                cur = [(max(x0, y0), min(x1, y1)) for x0, x1 in cur for y0, y1 in st
                       if min(x1, y1) >= max(x0, y0)]
                if not cur:
                    break
            if cur:
                return True
    return False


def _visit_form(curve, scheme, label, visits, margin, alpha):
    pieces, times = [], []
    for k, (a, b) in visits:
        s, s1, t1, t = (a + (b - a) * f for f in (0.2, 0.4, 0.6, 0.8))
        U1 = (s, s1)
        U2 = _tube(curve, t1, t, margin, alpha)
        V1 = _tube(curve, s1, t1, margin, alpha)
        for box in V1.boxes:
            if not _domain_contains(scheme, label, _corners(box.center, box.outer)):
                return None, (label, k, "V1 support leaves the domain")
        if _meets_outer(curve, 0.0, s, V1) or _meets_outer(curve, t, 1.0, V1):
            return None, (label, k, "path outside the visit meets V1")
        if _meets_outer(curve, *U1, U2):
            return None, (label, k, "U1 meets U2")
        pieces.append((V1, U2))
        times.append((s, s1, t1, t))
    return BumpOneForm(label, pieces, margin, times), None


def build_route_oneforms(curve, route: RouteWord, scheme, margin: float | None = None,
                         alpha: int = 2, max_halvings: int = 12) -> dict:
    """One form per visited domain integrating to 1 over each of its visits.

    Parameters
    ----------
    curve : PolyCurve or LiftedPath
    route : RouteWord
        Route with occupancy intervals (from :func:`extract_route`).
    scheme : scheme object
        Supplies domain geometry through ``disjoint_data`` / ``contains``.
    margin : float, optional
        Initial tube margin; defaults to an eighth of the smallest inner half-width.
    alpha : int
        Smoothness of the profiles (``floor(p) + 1``).

    Raises
    ------
    FormConstructionError
        If no margin down to ``margin * 2**-max_halvings`` satisfies the
        separation requirements.
    """
    curve = curve.curve if isinstance(curve, LiftedPath) else curve
    by_label: dict = defaultdict(list)
    for k, (label, occ) in enumerate(zip(route.labels, route.occupancy)):
        by_label[label].append((k, occ[0]))
    out = {}
    for label, visits in by_label.items():
        _, inner = _domain_inner_box(scheme, label)
        m = margin if margin is not None else float(np.min(inner[inner > 0])) / 8
        for _ in range(max_halvings + 1):
            form, why = _visit_form(curve, scheme, label, visits, m, alpha)
            if form is not None:
                out[label] = form
                break
            m /= 2
        else:
            raise FormConstructionError(f"no admissible margin for domain {label}: {why[2]}", why)
    return out


def generic_forms(scheme, label, count: int, seed: int = 0, alpha: int = 2) -> list:
    """``count`` seeded bump forms supported inside the domain ``label``."""
    c, inner = _domain_inner_box(scheme, label)
    parts = [int(k) for k in np.atleast_1d(np.asarray(label, dtype=np.int64))]
    rng = np.random.default_rng([seed] + [k + 2**20 for k in parts])
    out = []
    for _ in range(count):
        center = c + inner * rng.uniform(-0.1, 0.1, size=c.size)
        core = 0.45 * inner
        margin = np.where(inner > 0, 0.35 * inner, 1.0)
        core = np.where(inner > 0, core, 0.0)
        direction = rng.standard_normal(c.size)
        out.append(GenericBumpForm(label, BoxBump(center, core, margin, alpha), direction))
    return out


@dataclass(frozen=True)
class RouteVerdict:
    """Route indicator of a candidate word with the witnessing family and value."""

    candidate: tuple
    chi: int
    witness: str | None
    magnitude: float
    values: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {"candidate": [list(np.atleast_1d(l).tolist()) for l in self.candidate],
                "chi": self.chi, "witness": self.witness, "magnitude": self.magnitude}


class RouteVerifier:
    """Evaluates the route indicator for many candidate words on one path and scheme.

    The tested families are the constructed route forms (when every letter of
    the candidate is a visited domain) and ``n_generic`` seeded generic bump
    forms per domain, the ``k``-th family using the ``k``-th form of each domain.
    """

    def __init__(self, y, scheme, route: RouteWord | None = None, n_generic: int = 3, seed: int = 0,
                 tol: float = 1e-9, margin: float | None = None):
        self.curve = y.curve if isinstance(y, LiftedPath) else y
        self.scheme = scheme
        self.route = extract_route(self.curve, scheme) if route is None else route
        self.constructed = build_route_oneforms(self.curve, self.route, scheme, margin=margin)
        self.n_generic = n_generic
        self.seed = seed
        self.tol = tol
        self._forms: dict = {("c", l): f for l, f in self.constructed.items()}
        self._engine = None

    def _ensure(self, labels):
        new = False
        for l in labels:
            if ("g", l, 0) not in self._forms and self.n_generic:
                for k, f in enumerate(generic_forms(self.scheme, l, self.n_generic, self.seed)):
                    self._forms[("g", l, k)] = f
                new = True
        if new or self._engine is None:
            self._engine = QuadratureEngine(self.curve, self._forms)

    def verdict(self, candidate) -> RouteVerdict:
        candidate = tuple(candidate)
        if any(a == b for a, b in zip(candidate[:-1], candidate[1:])):
            raise ValueError("candidate words may not repeat a letter immediately")
        self._ensure(candidate)
        values = {}
        if all(l in self.constructed for l in candidate):
            values["constructed"] = self._engine.integrate([("c", l) for l in candidate])
        for k in range(self.n_generic):
            values[f"generic-{k}"] = self._engine.integrate([("g", l, k) for l in candidate])
        name, mag = max(values.items(), key=lambda kv: abs(kv[1]), default=(None, 0.0))
        chi = int(abs(mag) > self.tol)
        return RouteVerdict(candidate, chi, name if chi else None, abs(mag), values)

    def verdicts(self, candidates) -> list:
        """Verdicts for many words; the quadrature engine is built once for their joint alphabet."""
        candidates = [tuple(c) for c in candidates]
        self._ensure(sorted({l for c in candidates for l in c}))
        return [self.verdict(c) for c in candidates]


def verify_route(y, scheme, candidate, tol: float = 1e-9, n_generic: int = 3, seed: int = 0,
                 route: RouteWord | None = None) -> RouteVerdict:
    """Route indicator ``chi`` of ``candidate`` (see :class:`RouteVerifier`)."""
    return RouteVerifier(y, scheme, route, n_generic, seed, tol).verdict(candidate)
