"""Block reflection matrices L, M, the CMV matrix U = LM and the pencil K(lam) = L + lam*M.

Matrices are finite truncations of semi-infinite operators.  Truncating a
tridiagonal matrix is exact entrywise, but a product of truncations differs
from the truncated product in its trailing rows and columns, so identities
involving products are only checked on a leading interior block (see
:func:`interior`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import check_finite, format_rational
from .errors import DegenerateReflection
from .opuc import ReflectionSequence

SINGLE_PRODUCT_MARGIN = 2
DOUBLE_PRODUCT_MARGIN = 4


def interior(mat: np.ndarray, margin: int) -> np.ndarray:
    """Leading ``(n - margin) x (n - margin)`` block of a square matrix."""
    k = mat.shape[0] - margin
    if k <= 0:
        raise ValueError(f"dimension {mat.shape[0]} leaves no interior for margin {margin}")
    return mat[:k, :k]


def interior_residual(mat: np.ndarray, margin: int) -> float:
    return float(np.max(np.abs(interior(mat, margin))))


@dataclass(frozen=True)
class Tridiagonal:
    """Tridiagonal matrix stored by diagonals (not necessarily symmetric)."""

    diag: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    interior_margin: int = 0

    def __post_init__(self):
        n = len(self.diag)
        if len(self.upper) != max(n - 1, 0) or len(self.lower) != max(n - 1, 0):
            raise ValueError("off-diagonals must have length n - 1")

    @classmethod
    def symmetric(cls, diag, off, interior_margin=0) -> "Tridiagonal":
        off = np.asarray(off, dtype=float)
        return cls(np.asarray(diag, dtype=float), off, off.copy(), interior_margin)

    @property
    def n(self) -> int:
        return len(self.diag)

    @property
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.upper, self.lower))

    @property
    def off(self) -> np.ndarray:
        if not self.is_symmetric:
            raise ValueError("off-diagonal is ambiguous for a non-symmetric matrix")
        return self.upper

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.upper, 1) + np.diag(self.lower, -1)

    def eigvalsh(self) -> np.ndarray:
        from scipy.linalg import eigh_tridiagonal

        return eigh_tridiagonal(self.diag, self.off, eigvals_only=True)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "diag": [float(v) for v in self.diag],
            "super": [float(v) for v in self.upper],
            "sub": [float(v) for v in self.lower],
        }


@dataclass(frozen=True)
class BlockReflectionMatrix:
    """Dense truncation of L or M, built from 2x2 blocks ``[[a, r], [eps*r, -a]]``."""

    kind: str
    matrix: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "rows": self.matrix.tolist()}


def _r(seq: ReflectionSequence, k: int) -> float:
    rsq = seq.rsq(k)
    if rsq == 0:
        raise DegenerateReflection(k)
    return math.sqrt(rsq)


def _blocks(seq: ReflectionSequence, n: int, first: int, offset: int) -> np.ndarray:
    out = np.zeros((n, n))
    if offset:
        out[0, 0] = 1.0
    k, i = first, offset
    while i < n:
        a = float(seq[k])
        out[i, i] = a
        if i + 1 < n:
            r = _r(seq, k)
            out[i, i + 1] = r
            out[i + 1, i] = seq.epsilon(k) * r
            out[i + 1, i + 1] = -a
        k += 2
        i += 2
    return check_finite(out, "reflection blocks")


def build_l(seq: ReflectionSequence, n: int) -> BlockReflectionMatrix:
    """``n x n`` truncation of L (blocks carry a_0, a_2, ...)."""
    return BlockReflectionMatrix("L", _blocks(seq, n, first=0, offset=0))


def build_m(seq: ReflectionSequence, n: int) -> BlockReflectionMatrix:
    """``n x n`` truncation of M (leading 1, then blocks with a_1, a_3, ...)."""
    return BlockReflectionMatrix("M", _blocks(seq, n, first=1, offset=1))


def valid_dimension(n: int) -> int:
    """Round a requested truncation size up to the next even size (at least 2)."""
    n = max(int(n), 2)
    return n + (n % 2)


def build_lm(seq: ReflectionSequence, n: int) -> tuple[BlockReflectionMatrix, BlockReflectionMatrix]:
    """Truncations of L and M at the even size ``valid_dimension(n)``.

    At an even cut L is exact (it is an involution on the whole truncation);
    M loses the partner row of its last block, so ``M^2 = I`` fails in the
    bottom-right corner only.
    """
    n = valid_dimension(n)
    for k in range(n):
        if seq.rsq(k) == 0:
            raise DegenerateReflection(k)
    return build_l(seq, n), build_m(seq, n)


def build_cmv(seq: ReflectionSequence, n: int) -> np.ndarray:
    """Five-diagonal CMV matrix ``U = L M`` (truncated)."""
    L, M = build_lm(seq, n)
    return L.matrix @ M.matrix


@dataclass(frozen=True)
class PencilRecurrence:
    """Exact coefficients of ``Q_{n+1} + b_n Q_n + u_n Q_{n-1} = x Q_n`` for K(lam)."""

    b: tuple[Fraction, ...]
    u: tuple[Fraction, ...]
    lam: Fraction

    def to_json(self) -> dict:
        return {
            "lambda": format_rational(self.lam),
            "b": [format_rational(v) for v in self.b],
            "u": [format_rational(v) for v in self.u],
        }


def pencil_recurrence(seq: ReflectionSequence, lam, n: int) -> PencilRecurrence:
    """Recurrence coefficients ``b_k(lam), u_k(lam)`` for ``k < n``.

    Even k: ``b = a_k - lam a_{k-1}``, ``u = lam^2 (1 - a_{k-1}^2)``;
    odd k:  ``b = lam a_k - a_{k-1}``, ``u = 1 - a_{k-1}^2``.
    ``u_0 = 0`` follows from ``a_{-1} = -1``.
    """
    lam = Fraction(lam)
    b, u = [], []
    for k in range(n):
        a, prev = seq[k], seq[k - 1]
        if k % 2 == 0:
            b.append(a - lam * prev)
            u.append(lam * lam * (1 - prev * prev))
        else:
            b.append(lam * a - prev)
            u.append(1 - prev * prev)
    return PencilRecurrence(tuple(b), tuple(u), lam)


def pencil_offdiag_products(seq: ReflectionSequence, lam, n: int) -> tuple[Fraction, ...]:
    """Exact products ``super_k * sub_k`` of K(lam) for ``k < n - 1``.

    Computed from the block structure, i.e. ``eps_k r_k^2`` times ``lam^2``
    on M-blocks, without taking any square root.
    """
    lam = Fraction(lam)
    out = []
    for k in range(n - 1):
        scale = lam * lam if k % 2 else Fraction(1)
        out.append(scale * seq.epsilon(k) * seq.rsq(k))
    return tuple(out)


def build_pencil_matrix(seq: ReflectionSequence, lam: float, x: float, n: int) -> Tridiagonal:
    """``K(lam) - x I`` as a tridiagonal matrix of size ``n``.

    Diagonal ``(a_0 + lam - x, -a_0 + lam a_1 - x, a_2 - lam a_1 - x, ...)``,
    super-diagonal ``(r_0, lam r_1, r_2, lam r_3, ...)``; the sub-diagonal
    carries the extra sign ``eps_k`` when ``|a_k| > 1``.
    """
    lam, x = float(lam), float(x)
    diag = np.empty(n)
    upper = np.empty(max(n - 1, 0))
    lower = np.empty(max(n - 1, 0))
    for k in range(n):
        a, prev = float(seq[k]), float(seq[k - 1])
        diag[k] = (a - lam * prev if k % 2 == 0 else lam * a - prev) - x
    for k in range(n - 1):
        scale = lam if k % 2 else 1.0
        r = _r(seq, k)
        upper[k] = scale * r
        lower[k] = scale * seq.epsilon(k) * r
    check_finite(diag, "pencil diagonal")
    check_finite(upper, "pencil off-diagonal")
    return Tridiagonal(diag, upper, lower, interior_margin=SINGLE_PRODUCT_MARGIN)


def pencil_dense(seq: ReflectionSequence, lam: float, n: int) -> np.ndarray:
    return build_pencil_matrix(seq, lam, 0.0, n).dense()
