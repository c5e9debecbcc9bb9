"""Two-node transformation of a block parity-check code.

Given an ``(n', k')`` code with sub-packetization ``N`` and a coupling width
``delta``, the last ``delta`` nodes are dropped, ``delta`` instances of what
remains are stacked (instance ``u`` occupies symbols ``u*N .. u*N+N-1`` of
each node), and the two goal nodes are coupled across instances through the
parity-check blocks of the dropped nodes.  The result is an
``(n'-delta, k'-delta)`` code with sub-packetization ``delta*N`` in which both
goal nodes can be repaired from ``N`` symbols per helper.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .code_model import BlockParityCheckCode, is_mds
from .errors import DeltaOutOfRange, GoalPairInvalid


@dataclass(frozen=True)
class TransformSpec:
    delta: int
    goal_pair: tuple[int, int] = (0, 1)

    def validate(self, base: BlockParityCheckCode) -> None:
        r = base.r
        if not 2 <= self.delta <= r:
            raise DeltaOutOfRange(f"delta={self.delta} outside [2, r={r}]")
        if base.k - self.delta < 1:
            raise DeltaOutOfRange(f"delta={self.delta} leaves no data nodes (k'={base.k})")
        g0, g1 = self.goal_pair
        n = base.n - self.delta
        if g0 == g1 or not (0 <= g0 < n and 0 <= g1 < n):
            raise GoalPairInvalid(f"goal pair {self.goal_pair} invalid for {n} surviving nodes")


def apply_transform(base: BlockParityCheckCode, spec: TransformSpec) -> BlockParityCheckCode:
    spec.validate(base)
    q = base.q
    delta = spec.delta
    N = base.N
    n = base.n - delta
    r = base.r
    g0, g1 = spec.goal_pair

    # canonical position p -> base node; goals first, deleted nodes keep their tail slots
    order = [g0, g1] + [j for j in range(n) if j not in (g0, g1)] + list(range(n, base.n))
    A = base.blocks[:, order]  # canonical base blocks, shape (r, n', N, N)
    neg = np.mod(-A, q)

    out = np.zeros((r, n, delta * N, delta * N), dtype=np.int64)

    def put(t, p, a, b, blk):
        out[t, order[p], a * N:(a + 1) * N, b * N:(b + 1) * N] = blk

    for t in range(r):
        # goal node 0
        put(t, 0, 0, 0, A[t, 0])
        for u in range(1, delta):
            put(t, 0, 0, u, neg[t, n + u])
        put(t, 0, 1, 1, A[t, n + 1])
        # goal node 1
        put(t, 1, 0, 0, A[t, n])
        put(t, 1, 1, 0, neg[t, n])
        put(t, 1, 1, 1, A[t, 1])
        for u in range(2, delta):
            put(t, 1, 1, u, neg[t, n + u])
        for a in range(2, delta):
            put(t, 0, a, a, A[t, 0])
            put(t, 1, a, a, A[t, 1])
        # remainder nodes
        for p in range(2, n):
            for a in range(delta):
                put(t, p, a, a, A[t, p])

    return BlockParityCheckCode(base.field, n, base.k - delta, delta * N, out)


def step1_code(base: BlockParityCheckCode, delta: int) -> BlockParityCheckCode:
    """The punctured code obtained by dropping the last ``delta`` nodes."""
    return BlockParityCheckCode(base.field, base.n - delta, base.k - delta, base.N,
                                base.blocks[:, :base.n - delta])


def verify_transform_mds(base: BlockParityCheckCode, spec: TransformSpec) -> bool:
    return is_mds(apply_transform(base, spec)).ok
