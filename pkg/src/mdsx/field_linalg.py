"""Prime-field arithmetic and exact dense linear algebra.

Matrices are plain ``numpy`` ``int64`` arrays whose entries lie in ``[0, q)``.
The modulus is capped below 2**31 so that a single product of two reduced
elements fits in a signed 64-bit integer; matrix products reduce in chunks
along the inner dimension to keep partial sums in range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivideByZero, NotPrime, Singular

MAX_MODULUS = 2**31
_INT64_MAX = 2**63 - 1


def is_prime(q: int) -> bool:
    """Trial division; fine for moduli below 2**31."""
    if q < 2:
        return False
    if q < 4:
        return True
    if q % 2 == 0:
        return False
    d = 3
    while d * d <= q:
        if q % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Field:
    """The prime field F_q."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or self.q < 2:
            raise NotPrime(f"modulus must be an integer >= 2, got {self.q!r}")
        if self.q >= MAX_MODULUS:
            raise ValueError(f"modulus {self.q} exceeds 2**31")
        if not is_prime(int(self.q)):
            raise NotPrime(f"{self.q} is not prime")
        object.__setattr__(self, "q", int(self.q))

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def neg(self, a: int) -> int:
        return (-a) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.q)
        return pow(a % self.q, e, self.q)

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise DivideByZero(f"0 has no inverse in F_{self.q}")
        return pow(a, self.q - 2, self.q)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def array(self, values) -> np.ndarray:
        """Coerce ``values`` to a reduced int64 array."""
        return np.mod(np.asarray(values, dtype=np.int64), self.q)

    def random(self, shape, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, self.q, size=shape, dtype=np.int64)


def field_make(q: int) -> Field:
    return Field(q)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def _chunk_size(q: int) -> int:
    # largest c with c*(q-1)**2 + (q-1) <= INT64_MAX
    return max(1, (_INT64_MAX - (q - 1)) // max(1, (q - 1) ** 2))


def matmul(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product ``a @ b`` over F_q.

    Works for any operands ``numpy.matmul`` accepts; the contraction is split
    into chunks small enough that int64 accumulation never overflows.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    q = field.q
    inner = a.shape[-1]
    step = _chunk_size(q)
    if inner <= step:
        return np.mod(a @ b, q)
    if b.ndim == 1:
        return matmul(field, a, b[:, None])[..., 0]
    out = np.mod(a[..., :step] @ b[..., :step, :], q)
    for lo in range(step, inner, step):
        out = np.mod(out + np.mod(a[..., lo:lo + step] @ b[..., lo:lo + step, :], q), q)
    return out


def row_reduce(field: Field, m: np.ndarray, pivot_cols: int | None = None):
    """Reduced row-echelon form of ``m`` over F_q.

    Pivots are searched only in the first ``pivot_cols`` columns (all by
    default); row operations always span the full width, so an augmented
    matrix can be reduced in place of a separate back-substitution.

    Returns ``(R, pivots)`` where ``pivots`` lists pivot column indices.
    """
    q = field.q
    r = np.mod(np.array(m, dtype=np.int64, copy=True), q)
    if r.ndim != 2:
        raise ValueError("row_reduce expects a 2-D matrix")
    rows, cols = r.shape
    if pivot_cols is None:
        pivot_cols = cols
    pivots: list[int] = []
    prow = 0
    for col in range(pivot_cols):
        if prow == rows:
            break
        nz = np.flatnonzero(r[prow:, col])
        if nz.size == 0:
            continue
        found = prow + int(nz[0])
        if found != prow:
            r[[prow, found]] = r[[found, prow]]
        piv = int(r[prow, col])
        if piv != 1:
            r[prow] = np.mod(r[prow] * field.inv(piv), q)
        factors = r[:, col].copy()
        factors[prow] = 0
        idx = np.flatnonzero(factors)
        if idx.size:
            r[idx] = np.mod(r[idx] - factors[idx, None] * r[prow], q)
        pivots.append(col)
        prow += 1
    return r, pivots


def mat_rank(field: Field, a: np.ndarray) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(row_reduce(field, a)[1])


def mat_solve(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a @ x = b`` for square nonsingular ``a``.

    ``b`` may be a vector or a matrix of right-hand sides; the result has the
    same shape as ``b``.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"coefficient matrix must be square, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"rhs has {b.shape[0]} rows, expected {a.shape[0]}")
    n = a.shape[0]
    vector = b.ndim == 1
    rhs = b.reshape(n, -1)
    reduced, pivots = row_reduce(field, np.hstack([a, rhs]), pivot_cols=n)
    if len(pivots) < n:
        raise Singular(f"matrix has rank {len(pivots)} < {n}")
    x = reduced[:, n:]
    return x.reshape(n) if vector else x.reshape(b.shape)


def mat_inverse(field: Field, a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    return mat_solve(field, a, identity(a.shape[0]))
