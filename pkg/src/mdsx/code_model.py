"""Block parity-check codes: representation, MDS check, encode and decode.

A code is stored as a 4-D array ``blocks[t, i]`` of ``N x N`` matrices, one
per parity-check group ``t`` and node ``i``.  A codeword is an ``(n, N)``
array of node shards (or ``(n, N, S)`` for ``S`` stripes encoded at once)
satisfying ``sum_i blocks[t, i] @ shards[i] == 0`` for every ``t``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CodeMismatch, FieldTooSmall, Singular
from .field_linalg import Field, mat_inverse, mat_rank, matmul


@dataclass(frozen=True, eq=False)
class BlockParityCheckCode:
    field: Field
    n: int
    k: int
    N: int
    blocks: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        if not 1 <= self.k < self.n:
            raise ValueError(f"need 1 <= k < n, got n={self.n}, k={self.k}")
        blocks = np.asarray(self.blocks, dtype=np.int64)
        expected = (self.n - self.k, self.n, self.N, self.N)
        if blocks.shape != expected:
            raise ValueError(f"blocks have shape {blocks.shape}, expected {expected}")
        if blocks.size and (blocks.min() < 0 or blocks.max() >= self.field.q):
            raise ValueError("block entries must lie in [0, q)")
        blocks = blocks.copy()
        blocks.flags.writeable = False
        object.__setattr__(self, "blocks", blocks)

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def q(self) -> int:
        return self.field.q

    def block(self, t: int, i: int) -> np.ndarray:
        return self.blocks[t, i]

    def stacked(self, nodes: Sequence[int]) -> np.ndarray:
        """The ``rN x len(nodes)*N`` parity-check submatrix on ``nodes``."""
        sub = self.blocks[:, list(nodes)]  # (r, m, N, N)
        r, m, N, _ = sub.shape
        return sub.transpose(0, 2, 1, 3).reshape(r * N, m * N)

    def syndrome(self, shards: np.ndarray) -> np.ndarray:
        """PCG residuals ``sum_i A_{t,i} f_i``, shape ``(r, N[, S])``."""
        shards = np.asarray(shards, dtype=np.int64)
        flat = shards.reshape(self.n * self.N, -1)
        res = matmul(self.field, self.stacked(range(self.n)), flat)
        return res.reshape((self.r, self.N) + shards.shape[2:])

    def is_codeword(self, shards: np.ndarray) -> bool:
        return not np.any(self.syndrome(shards))

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "k": self.k,
            "N": self.N,
            "blocks": self.blocks.tolist(),
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "BlockParityCheckCode":
        try:
            return cls(Field(int(doc["q"])), int(doc["n"]), int(doc["k"]), int(doc["N"]),
                       np.asarray(doc["blocks"], dtype=np.int64))
        except KeyError as exc:
            raise CodeMismatch(f"code document is missing {exc}") from None


def vandermonde_code(n_prime: int, r: int, field: Field,
                     points: Sequence[int] | None = None) -> BlockParityCheckCode:
    """Scalar code with ``A_{t,i} = alpha_i ** t``.

    Default evaluation points are ``alpha_i = i + 1``, which needs
    ``q >= n_prime + 1``.  Custom ``points`` must be distinct field elements.
    """
    if points is None:
        if field.q < n_prime + 1:
            raise FieldTooSmall(f"q={field.q} < n'+1={n_prime + 1}")
        points = [i + 1 for i in range(n_prime)]
    else:
        points = [int(p) % field.q for p in points]
        if len(points) != n_prime:
            raise ValueError(f"need {n_prime} evaluation points, got {len(points)}")
        if len(set(points)) != n_prime:
            raise FieldTooSmall("evaluation points are not distinct in the field")
    if not 1 <= r < n_prime:
        raise ValueError(f"need 1 <= r < n', got r={r}, n'={n_prime}")
    coeffs = np.array([[field.pow(a, t) for a in points] for t in range(r)], dtype=np.int64)
    return BlockParityCheckCode(field, n_prime, n_prime - r, 1, coeffs[:, :, None, None])


@dataclass(frozen=True)
class MdsResult:
    ok: bool
    checked: int
    witness: tuple[int, ...] | None = None

    def __bool__(self):
        return self.ok


def is_mds(code: BlockParityCheckCode) -> MdsResult:
    """Check that every r-subset of nodes has a nonsingular block submatrix.

    Subsets are visited in lexicographic order; the first failure is
    returned as the witness.
    """
    full = code.r * code.N
    checked = 0
    for subset in itertools.combinations(range(code.n), code.r):
        checked += 1
        if mat_rank(code.field, code.stacked(subset)) < full:
            return MdsResult(False, checked, subset)
    return MdsResult(True, checked)


def _solve_erased(code: BlockParityCheckCode, known: Sequence[int],
                  known_shards: np.ndarray) -> tuple[list[int], np.ndarray]:
    """Recover the shards of the r nodes outside ``known``."""
    erased = [i for i in range(code.n) if i not in set(known)]
    lhs = code.stacked(erased)
    rhs = matmul(code.field, code.stacked(known), known_shards.reshape(code.k * code.N, -1))
    try:
        inv = mat_inverse(code.field, lhs)
    except Singular:
        raise Singular(f"parity-check submatrix on nodes {erased} is singular") from None
    sol = matmul(code.field, inv, np.mod(-rhs, code.q))
    return erased, sol


def encode(code: BlockParityCheckCode, message: np.ndarray,
           systematic_nodes: Iterable[int] | None = None) -> np.ndarray:
    """Encode ``k*N`` message symbols (or a ``(k*N, S)`` batch) into a codeword.

    The message is written verbatim, ``N`` symbols per node, into
    ``systematic_nodes`` (default ``0..k-1``) and the remaining nodes are
    solved from the parity checks.
    """
    nodes = list(range(code.k)) if systematic_nodes is None else sorted(systematic_nodes)
    if len(set(nodes)) != code.k or any(not 0 <= i < code.n for i in nodes):
        raise ValueError(f"need {code.k} distinct systematic nodes in [0, {code.n})")
    message = np.asarray(message, dtype=np.int64)
    if message.shape[0] != code.k * code.N:
        raise ValueError(f"message has {message.shape[0]} symbols, expected {code.k * code.N}")
    if message.size and (message.min() < 0 or message.max() >= code.q):
        raise ValueError("message symbols must lie in [0, q)")
    tail = message.shape[1:]
    data = message.reshape((code.k, code.N) + tail)
    erased, sol = _solve_erased(code, nodes, data)
    shards = np.zeros((code.n, code.N) + tail, dtype=np.int64)
    shards[nodes] = data
    shards[erased] = sol.reshape((code.r, code.N) + tail)
    return shards


def decode_any_k(code: BlockParityCheckCode, available: Mapping[int, np.ndarray]) -> np.ndarray:
    """Rebuild the full codeword from the shards of at least ``k`` nodes.

    When more than ``k`` are supplied the lowest ``k`` indices are used.
    """
    nodes = sorted(int(i) for i in available)
    if len(nodes) < code.k:
        raise ValueError(f"need {code.k} shards, got {len(nodes)}")
    if any(not 0 <= i < code.n for i in nodes):
        raise ValueError(f"node index outside [0, {code.n})")
    nodes = nodes[:code.k]
    known = np.stack([np.asarray(available[i], dtype=np.int64) for i in nodes])
    if known.shape[1] != code.N:
        raise ValueError(f"shards must have {code.N} symbols")
    tail = known.shape[2:]
    erased, sol = _solve_erased(code, nodes, known)
    shards = np.zeros((code.n, code.N) + tail, dtype=np.int64)
    shards[nodes] = known
    shards[erased] = sol.reshape((code.r, code.N) + tail)
    return shards
