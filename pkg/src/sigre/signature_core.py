"""Signatures of piecewise-linear paths and the truncated signature path."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .path_model import PiecewiseLinearPath, PolyCurve
from .tensor_algebra import TruncatedTensor, check_group_like, flat_dim, tensor_exp, tensor_mul

__all__ = [
    "SignatureResult",
    "segment_signature",
    "path_signature",
    "check_factorial_decay",
    "signature_path_point",
    "signature_path_curve",
    "prefix_signatures",
]


@dataclass(frozen=True)
class SignatureResult:
    """Signature over [0, 1] together with the control ``omega(0, 1)`` (arc length)."""

    tensor: TruncatedTensor
    omega: float

    @property
    def degree(self) -> int:
        return self.tensor.degree

    def is_group_like(self, tol: float = 1e-9) -> bool:
        return check_group_like(self.tensor, tol)


def segment_signature(v, N: int) -> TruncatedTensor:
    """Signature of the straight segment with increment ``v``: ``exp(v)``."""
    if N < 0:
        raise ValueError("degree must be non-negative")
    return tensor_exp(v, N)


def prefix_signatures(x: PiecewiseLinearPath, N: int) -> list[TruncatedTensor]:
    """``X_{0, t_k}`` for every vertex time ``t_k``."""
    out = [TruncatedTensor.unit(x.dim, N)]
    for v in x.increments:
        out.append(tensor_mul(out[-1], segment_signature(v, N)))
    return out


def path_signature(x: PiecewiseLinearPath, N: int) -> SignatureResult:
    """Chen fold of the per-segment exponentials."""
    if x.n_segments < 1:
        raise ValueError("path needs at least one segment")
    sig = TruncatedTensor.unit(x.dim, N)
    for v in x.increments:
        sig = tensor_mul(sig, segment_signature(v, N))
    return SignatureResult(tensor=sig, omega=x.length())


def check_factorial_decay(sig: TruncatedTensor, omega: float, p: float = 1.0,
                          slack: float = 1e-12) -> bool:
    """Check ``|X^i| <= omega^i / i!`` on every level (Euclidean norm of the level).

    Only ``p = 1`` is supported; there the constant is 1.
    """
    if p != 1:
        raise NotImplementedError("only the bounded-variation case p = 1 is supported")
    for i in range(1, sig.degree + 1):
        bound = omega**i / math.factorial(i)
        if float(np.linalg.norm(sig.levels[i])) > bound * (1 + slack) + slack:
            return False
    return True


def signature_path_curve(x: PiecewiseLinearPath, N: int) -> PolyCurve:
    """The truncated signature path ``t -> X^(N)_{0,t}`` as an exact polynomial curve.

    On segment ``k`` with increment ``v`` and prefix ``A = X_{0,t_k}``, level ``j``
    equals ``sum_b A^{j-b} (x) v^{(x)b} u^b / b!``, a polynomial of degree ``j``
    in the local parameter ``u``. Coordinates are the flattened words
    (degree-0 coordinate identically 1).
    """
    d = x.dim
    prefixes = prefix_signatures(x, N)
    D = flat_dim(d, N)
    coeffs = np.zeros((x.n_segments, N + 1, D))
    for k, v in enumerate(x.increments):
        A = prefixes[k].levels
        powers = [np.ones(())]
        for b in range(1, N + 1):
            powers.append(np.multiply.outer(powers[-1], v) / b)
        start = 0
        for j in range(N + 1):
            size = d**j
            for b in range(j + 1):
                coeffs[k, b, start:start + size] += np.multiply.outer(A[j - b], powers[b]).ravel()
            start += size
    return PolyCurve(x.times, coeffs)


def signature_path_point(x: PiecewiseLinearPath, N: int, t: float) -> np.ndarray:
    """``X^(N)_{0,t}`` flattened into word coordinates."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    return signature_path_curve(x, N)(t)
