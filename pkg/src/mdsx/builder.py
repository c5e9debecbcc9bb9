"""Recursive construction of codes with delta-optimal access for every node.

Starting from a scalar Vandermonde code with ``n + tau*delta`` nodes, the
two-node transformation is applied ``tau = ceil(n/2)`` times, with goal pairs
``(0,1), (2,3), ...`` and finally ``(n-2, n-1)``.  Each round stacks
``delta`` instances as the next base-``delta`` digit of the symbol index
(least significant digit first), so a node made a goal node in round
``rho`` as goal ``g`` is repaired from the symbols whose ``rho``-th digit is
``g``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Mapping

from .code_model import BlockParityCheckCode, vandermonde_code
from .errors import CodeMismatch, DeltaOutOfRange, FieldSearchFailed, NodeOutOfRange
from .field_linalg import MAX_MODULUS, Field, is_prime
from .transform import TransformSpec, apply_transform


@dataclass(frozen=True)
class RepairPlan:
    """Symbols downloaded from each helper, and PCG rows used, to repair ``node``.

    ``accessed`` and ``selected_rows`` are equal for every plan this module
    produces; both are kept so a plan reads like a (repair, select) pair.
    """

    node: int
    round: int
    goal_index: int
    accessed: tuple[int, ...]
    selected_rows: tuple[int, ...]

    def to_json(self) -> dict:
        return {"node": self.node, "round": self.round, "goal_index": self.goal_index,
                "accessed": list(self.accessed)}

    @classmethod
    def from_json(cls, doc: Mapping) -> "RepairPlan":
        acc = tuple(int(a) for a in doc["accessed"])
        rows = tuple(int(a) for a in doc.get("selected_rows", acc))
        return cls(int(doc["node"]), int(doc["round"]), int(doc["goal_index"]), acc, rows)


def digit_indices(N: int, delta: int, stride: int, value: int) -> tuple[int, ...]:
    """Indices ``a < N`` whose digit ``(a // stride) % delta`` equals ``value``."""
    return tuple(a for a in range(N) if (a // stride) % delta == value)


def make_plan(node: int, rnd: int, goal_index: int, N: int, delta: int) -> RepairPlan:
    acc = digit_indices(N, delta, delta ** rnd, goal_index)
    return RepairPlan(node, rnd, goal_index, acc, acc)


@dataclass(frozen=True, eq=False)
class AccessOptimalCode:
    code: BlockParityCheckCode
    plans: tuple[RepairPlan, ...]
    delta: int
    tau: int
    intermediates: tuple[BlockParityCheckCode, ...] = dc_field(default=(), repr=False)

    def __post_init__(self):
        if self.code.N != self.delta ** self.tau:
            raise CodeMismatch(f"N={self.code.N} != delta**tau={self.delta ** self.tau}")
        if sorted(p.node for p in self.plans) != list(range(self.code.n)):
            raise CodeMismatch("every node needs exactly one repair plan")
        object.__setattr__(self, "plans", tuple(sorted(self.plans, key=lambda p: p.node)))

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def N(self) -> int:
        return self.code.N

    def plan_map(self) -> dict[int, RepairPlan]:
        return {p.node: p for p in self.plans}

    def to_json(self) -> dict:
        doc = self.code.to_json()
        doc["delta"] = self.delta
        doc["tau"] = self.tau
        doc["plans"] = [p.to_json() for p in self.plans]
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "AccessOptimalCode":
        code = BlockParityCheckCode.from_json(doc)
        try:
            plans = tuple(RepairPlan.from_json(p) for p in doc["plans"])
            return cls(code, plans, int(doc["delta"]), int(doc["tau"]))
        except KeyError as exc:
            raise CodeMismatch(f"code document is missing {exc}") from None


def smallest_prime_at_least(m: int, cap: int = MAX_MODULUS) -> int:
    p = max(2, m)
    while p < cap:
        if is_prime(p):
            return p
        p += 1
    raise FieldSearchFailed(f"no prime in [{m}, {cap})")


def goal_schedule(n: int) -> list[tuple[int, int]]:
    tau = -(-n // 2)
    return [(2 * t, 2 * t + 1) for t in range(tau - 1)] + [(n - 2, n - 1)]


def check_parameters(n: int, k: int, delta: int) -> None:
    if k < 1 or n <= k:
        raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
    if n < 2:
        raise ValueError("need at least two nodes")
    r = n - k
    if not 2 <= delta <= r:
        raise DeltaOutOfRange(f"delta={delta} outside [2, r={r}]")


def build(n: int, k: int, delta: int, keep_intermediates: bool = True,
          field: Field | None = None) -> AccessOptimalCode:
    """Build an ``(n, k)`` code with delta-optimal access for all nodes.

    ``field`` overrides the default (smallest prime ``q >= n + tau*delta + 1``).
    """
    check_parameters(n, k, delta)
    r = n - k
    tau = -(-n // 2)
    n_prime = n + tau * delta
    if field is None:
        field = Field(smallest_prime_at_least(n_prime + 1))
    code = vandermonde_code(n_prime, r, field)
    inter = []
    plans: dict[int, RepairPlan] = {}
    for rnd, pair in enumerate(goal_schedule(n)):
        code = apply_transform(code, TransformSpec(delta, pair))
        if rnd < tau - 1 and keep_intermediates:
            inter.append(code)
        # later rounds overwrite: the last transformation that names a node wins
        for g, node in enumerate(pair):
            plans[node] = (rnd, g)
    final = tuple(make_plan(node, rnd, g, code.N, delta) for node, (rnd, g) in sorted(plans.items()))
    return AccessOptimalCode(code, final, delta, tau, tuple(inter))


def repair_plan(built: AccessOptimalCode, node: int) -> RepairPlan:
    if not 0 <= node < built.n:
        raise NodeOutOfRange(f"node {node} outside [0, {built.n})")
    return built.plans[node]


def transform_goal_plans(base: BlockParityCheckCode, spec: TransformSpec) -> tuple[BlockParityCheckCode, dict[int, RepairPlan]]:
    """Apply one transformation and return the repair plans of its goal pair.

    The new instance digit sits above all of ``base``'s symbol indices, so the
    goal node ``g`` plan selects the symbols in instance ``g``.
    """
    code = apply_transform(base, spec)
    plans = {}
    for g, node in enumerate(spec.goal_pair):
        acc = digit_indices(code.N, spec.delta, base.N, g)
        plans[node] = RepairPlan(node, 0, g, acc, acc)
    return code, plans
