"""Truncated tensor series, tensor and shuffle products, permutation actions.

A level-``k`` tensor over ``R^d`` is stored as a dense numpy array of shape
``(d,) * k``. Letter ``i`` of a word (1-based in the maths) is axis index
``i - 1``, so the row-major flattening of a level is the base-``d`` numeric
order of words. Levels are concatenated length-major to give the flat
coordinate vector used by the geometry of ``E_N``.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "TruncatedTensor",
    "words",
    "word_index",
    "flat_dim",
    "tensor_mul",
    "shuffle_mul",
    "shuffles",
    "apply_permutation",
    "compose",
    "check_group_like",
    "tensor_exp",
]


def flat_dim(d: int, N: int) -> int:
    """Number of coordinates ``1 + d + ... + d^N``."""
    return sum(d**k for k in range(N + 1))


def words(d: int, N: int) -> Iterator[tuple[int, ...]]:
    """Enumerate words of length ``<= N`` over ``{1..d}`` in coordinate order."""
    for k in range(N + 1):
        yield from itertools.product(range(1, d + 1), repeat=k)


def word_index(word: Sequence[int], d: int) -> int:
    """Flat coordinate index of ``word`` (length-major, then base ``d``)."""
    offset = flat_dim(d, len(word) - 1) if word else 0
    pos = 0
    for letter in word:
        if not 1 <= letter <= d:
            raise ValueError(f"letter {letter} outside alphabet 1..{d}")
        pos = pos * d + (letter - 1)
    return offset + pos


class TruncatedTensor:
    """Element of the truncated tensor algebra ``T^(N)(R^d)``.

    Parameters
    ----------
    levels : sequence of array_like
        ``levels[k]`` has shape ``(d,) * k``; ``levels[0]`` is a scalar.
    d : int, optional
        Alphabet size, required when only the scalar level is given.
    """

    __slots__ = ("levels", "d")

    def __init__(self, levels: Sequence, d: int | None = None):
        lv = [np.asarray(a, dtype=float) for a in levels]
        if not lv:
            raise ValueError("need at least the scalar level")
        if d is None:
            if len(lv) < 2:
                raise ValueError("dimension d must be given for a degree-0 tensor")
            d = lv[1].shape[0]
        for k, a in enumerate(lv):
            if a.shape != (d,) * k:
                raise ValueError(f"level {k} has shape {a.shape}, expected {(d,) * k}")
            a.setflags(write=False)
        self.levels = tuple(lv)
        self.d = int(d)

    @property
    def degree(self) -> int:
        return len(self.levels) - 1

    @classmethod
    def unit(cls, d: int, N: int) -> "TruncatedTensor":
        return cls([np.ones(())] + [np.zeros((d,) * k) for k in range(1, N + 1)], d=d)

    @classmethod
    def from_flat(cls, flat, d: int, N: int) -> "TruncatedTensor":
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (flat_dim(d, N),):
            raise ValueError("flat vector has the wrong length")
        levels, start = [], 0
        for k in range(N + 1):
            levels.append(flat[start:start + d**k].reshape((d,) * k))
            start += d**k
        return cls(levels, d=d)

    def flat(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.levels])

    def truncate(self, N: int) -> "TruncatedTensor":
        if N > self.degree:
            raise ValueError(f"cannot truncate degree {self.degree} tensor to {N}")
        return TruncatedTensor(self.levels[: N + 1], d=self.d)

    def __getitem__(self, word) -> float:
        word = tuple(word)
        a = self.levels[len(word)]
        return float(a[tuple(i - 1 for i in word)]) if word else float(a)

    def __add__(self, other):
        _check_same(self, other)
        n = min(self.degree, other.degree)
        return TruncatedTensor([a + b for a, b in zip(self.levels[: n + 1], other.levels)], d=self.d)

    def __sub__(self, other):
        _check_same(self, other)
        n = min(self.degree, other.degree)
        return TruncatedTensor([a - b for a, b in zip(self.levels[: n + 1], other.levels)], d=self.d)

    def __mul__(self, scalar):
        return TruncatedTensor([scalar * a for a in self.levels], d=self.d)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return tensor_mul(self, other)

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(a))) for a in self.levels)

    def __repr__(self) -> str:
        return f"TruncatedTensor(d={self.d}, N={self.degree})"


def _check_same(a: TruncatedTensor, b: TruncatedTensor) -> None:
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")


def tensor_mul(a: TruncatedTensor, b: TruncatedTensor, N: int | None = None) -> TruncatedTensor:
    """Truncated tensor product; the coefficient of ``uv`` collects ``a(u) b(v)``."""
    _check_same(a, b)
    top = min(a.degree, b.degree)
    if N is None:
        N = top
    elif N > top:
        raise ValueError(f"requested degree {N} exceeds operand degree {top}")
    out = []
    for k in range(N + 1):
        acc = np.zeros((a.d,) * k)
        for i in range(k + 1):
            acc = acc + np.multiply.outer(a.levels[i], b.levels[k - i])
        out.append(acc)
    return TruncatedTensor(out, d=a.d)


def tensor_exp(v, N: int) -> TruncatedTensor:
    """``exp(v)`` for a level-one element ``v``: level ``k`` is ``v^{(x)k} / k!``."""
    v = np.asarray(v, dtype=float)
    levels = [np.ones(())]
    for k in range(1, N + 1):
        levels.append(np.multiply.outer(levels[-1], v) / k)
    return TruncatedTensor(levels, d=v.shape[0])


@lru_cache(maxsize=None)
def shuffles(m: int, n: int) -> tuple[tuple[int, ...], ...]:
    """All ``(m, n)``-shuffles as 0-based permutation tuples.

    ``sigma`` is increasing on ``0..m-1`` and on ``m..m+n-1``; ``sigma[:m]``
    are the positions taken by the first factor.
    """
    out = []
    for first in itertools.combinations(range(m + n), m):
        rest = [p for p in range(m + n) if p not in first]
        out.append(tuple(first) + tuple(rest))
    return tuple(out)


def apply_permutation(a, sigma: Sequence[int], convention: str = "positions") -> np.ndarray:
    """Permutation operator ``P^sigma`` on a homogeneous tensor.

    With the default ``"positions"`` convention,
    ``P^sigma(v_1 (x) ... (x) v_m) = v_sigma(1) (x) ... (x) v_sigma(m)``, i.e.
    ``out[j] = a[i]`` with ``i[sigma[p]] = j[p]``. This is a right action:
    ``P^s(P^t(a)) = P^{t o s}(a)``. ``"inverse"`` applies ``sigma^{-1}`` instead
    and exists only so the alternative can be ruled out against an oracle.
    """
    a = np.asarray(a, dtype=float)
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(a.ndim)):
        raise ValueError(f"permutation of order {len(sigma)} does not match tensor order {a.ndim}")
    if convention == "positions":
        return np.transpose(a, sigma)
    if convention == "inverse":
        return np.transpose(a, np.argsort(sigma))
    raise ValueError(f"unknown convention {convention!r}")


def compose(s: Sequence[int], t: Sequence[int]) -> tuple[int, ...]:
    """Function composition ``(s o t)(p) = s[t[p]]``."""
    return tuple(s[p] for p in t)


def shuffle_mul(a, b) -> np.ndarray:
    """Shuffle product of homogeneous tensors of orders ``m`` and ``n``.

    The coefficient of a word ``w`` is the sum of ``a(u) b(v)`` over the ways
    of splitting ``w`` into interleaved subwords ``u`` and ``v``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim and b.ndim and a.shape[0] != b.shape[0]:
        raise ValueError("shape mismatch between shuffle factors")
    m, n = a.ndim, b.ndim
    outer = np.multiply.outer(a, b)
    acc = np.zeros(outer.shape)
    for sigma in shuffles(m, n):
        # result axis sigma[k] carries outer axis k
        acc += np.transpose(outer, np.argsort(sigma))
    return acc


def shuffle_image(a_top, m: int, n: int, convention: str = "positions") -> np.ndarray:
    """``sum_{sigma in S(m, n)} P^sigma(a_top)`` for ``a_top`` of order ``m + n``."""
    acc = np.zeros(np.shape(a_top))
    for sigma in shuffles(m, n):
        acc += apply_permutation(a_top, sigma, convention)
    return acc


def group_like_defect(a: TruncatedTensor, convention: str = "positions") -> float:
    """Largest violation of ``a^m (x) a^n = sum_sigma P^sigma(a^{m+n})``."""
    worst = 0.0
    N = a.degree
    for m in range(1, N):
        for n in range(1, N - m + 1):
            lhs = np.multiply.outer(a.levels[m], a.levels[n])
            rhs = shuffle_image(a.levels[m + n], m, n, convention)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def check_group_like(a: TruncatedTensor, tol: float) -> bool:
    """Test membership of the group of exponentials via the shuffle identity."""
    if abs(float(a.levels[0]) - 1.0) > 0.0:
        raise ValueError(f"empty-word coefficient is {float(a.levels[0])!r}, expected 1")
    return group_like_defect(a) <= tol


def iter_levels(a: TruncatedTensor) -> Iterable[tuple[int, np.ndarray]]:
    return enumerate(a.levels)


def factorial(k: int) -> int:
    return math.factorial(k)
