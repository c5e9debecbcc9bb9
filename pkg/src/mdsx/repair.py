"""Plan-driven single-node repair with exact bandwidth accounting.

For a failed node ``i`` with plan rows ``T``, the rows ``T`` of every parity
check group are used.  Because a plan is a row selection, the requirement that
helper interference be cancellable by the downloaded symbols becomes a
structural fact: the selected rows of every other node's block may only touch
columns inside ``T``.  That is asserted, the blocks are restricted to those
columns, and the resulting square system in the failed node's ``N`` symbols
plus the ``T``-projections of the non-contacted survivors is solved.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .builder import AccessOptimalCode, RepairPlan
from .code_model import BlockParityCheckCode
from .errors import BadHelperSet, NotAccessOptimalPlan, Singular
from .field_linalg import mat_inverse, mat_rank, matmul


@dataclass(frozen=True)
class BandwidthReport:
    failed: int
    helpers: tuple[int, ...]
    downloaded_per_helper: int
    accessed_per_helper: int
    total_downloaded: int
    bound: int

    @property
    def optimal(self) -> bool:
        return self.total_downloaded == self.bound


def bandwidth_bound(d: int, k: int, N: int) -> int:
    """Minimum repair download ``d*N/(d-k+1)`` in symbols (exact division required)."""
    num, den = d * N, d - k + 1
    if den <= 0 or num % den:
        raise ValueError(f"bound d*N/(d-k+1) = {num}/{den} is not a whole number of symbols")
    return num // den


def restricted_blocks(code: BlockParityCheckCode, plan: RepairPlan, failed: int) -> np.ndarray:
    """Column-restricted selected blocks ``S B_{t,j}[:, T]`` for every node.

    Returns an array ``(r, n, |T|, |T|)``; the failed node's slot is left
    zero.  Raises :class:`NotAccessOptimalPlan` if any selected row of
    another node has support outside ``T``.
    """
    rows = np.asarray(plan.selected_rows)
    cols = np.asarray(plan.accessed)
    outside = np.ones(code.N, dtype=bool)
    outside[cols] = False
    sel = code.blocks[:, :, rows, :]  # (r, n, |T|, N)
    bad = np.any(sel[:, :, :, outside] != 0, axis=(2, 3))
    bad[:, failed] = False
    if bad.any():
        t, j = map(int, np.argwhere(bad)[0])
        raise NotAccessOptimalPlan(
            f"repairing node {failed}: PCG {t} row selection of node {j} touches symbols outside the plan")
    out = sel[:, :, :, cols].copy()
    out[:, failed] = 0
    return out


def repair_matrix(code: BlockParityCheckCode, plan: RepairPlan, failed: int,
                  excluded: Sequence[int], tilde: np.ndarray | None = None) -> np.ndarray:
    """The ``rN/delta``-square coefficient matrix of the reduced repair system.

    Unknown order: the failed node's ``N`` symbols, then each excluded node's
    ``T``-projection in ascending node order.
    """
    if tilde is None:
        tilde = restricted_blocks(code, plan, failed)
    rows = list(plan.selected_rows)
    self_part = code.blocks[:, failed][:, rows, :]  # (r, |T|, N)
    parts = [self_part] + [tilde[:, j] for j in sorted(excluded)]
    per_t = np.concatenate(parts, axis=2)  # (r, |T|, N + |D||T|)
    return per_t.reshape(-1, per_t.shape[2])


def _validate_helpers(code: BlockParityCheckCode, delta: int, failed: int,
                      helpers: Iterable[int]) -> tuple[int, ...]:
    helpers = tuple(sorted(set(int(h) for h in helpers)))
    d = code.k + delta - 1
    if failed in helpers:
        raise BadHelperSet(f"failed node {failed} cannot be a helper")
    if any(not 0 <= h < code.n for h in helpers):
        raise BadHelperSet(f"helper index outside [0, {code.n})")
    if len(helpers) != d:
        raise BadHelperSet(f"need exactly d=k+delta-1={d} helpers, got {len(helpers)}")
    return helpers


def repair_from_downloads(code: BlockParityCheckCode, plan: RepairPlan, delta: int,
                          failed: int, downloads: Mapping[int, np.ndarray]):
    """Recover node ``failed`` from the ``T``-projections downloaded from helpers.

    ``downloads[j]`` has shape ``(|T|,)`` or ``(|T|, S)``.  Returns the
    recovered ``(N[, S])`` shard and a :class:`BandwidthReport` for one stripe.
    """
    helpers = _validate_helpers(code, delta, failed, downloads)
    size = len(plan.accessed)
    excluded = [j for j in range(code.n) if j != failed and j not in helpers]
    tilde = restricted_blocks(code, plan, failed)
    lhs = repair_matrix(code, plan, failed, excluded, tilde)
    first = np.asarray(downloads[helpers[0]], dtype=np.int64)
    tail = first.shape[1:]
    for h in helpers:
        if np.asarray(downloads[h]).shape[0] != size:
            raise BadHelperSet(f"helper {h} sent {np.asarray(downloads[h]).shape[0]} symbols, plan needs {size}")
    known = np.concatenate([np.asarray(downloads[h], dtype=np.int64).reshape(size, -1) for h in helpers])
    coeff = np.concatenate([tilde[:, h] for h in helpers], axis=2)  # (r, |T|, d|T|)
    rhs = matmul(code.field, coeff.reshape(-1, coeff.shape[2]), known)
    try:
        inv = mat_inverse(code.field, lhs)
    except Singular:
        raise Singular(f"repair system for node {failed} with excluded {excluded} is singular") from None
    sol = matmul(code.field, inv, np.mod(-rhs, code.q))
    recovered = sol[:code.N].reshape((code.N,) + tail)
    report = BandwidthReport(
        failed=failed,
        helpers=helpers,
        downloaded_per_helper=size,
        accessed_per_helper=size,
        total_downloaded=size * len(helpers),
        bound=bandwidth_bound(len(helpers), code.k, code.N),
    )
    return recovered, report


def repair(built: AccessOptimalCode, codeword: np.ndarray, failed: int,
           helpers: Iterable[int] | None = None):
    """Repair ``failed`` of ``codeword`` by reading only its plan's symbols from helpers.

    Default helpers are the ``d`` lowest-indexed survivors.
    """
    code = built.code
    plan = built.plans[failed]
    if helpers is None:
        helpers = [j for j in range(code.n) if j != failed][:code.k + built.delta - 1]
    helpers = _validate_helpers(code, built.delta, failed, helpers)
    idx = list(plan.accessed)
    downloads = {h: np.asarray(codeword[h])[idx] for h in helpers}
    return repair_from_downloads(code, plan, built.delta, failed, downloads)


@dataclass(frozen=True)
class RepairCheck:
    ok: bool
    checked: int
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def check_repair_systems(code: BlockParityCheckCode, plans: Mapping[int, RepairPlan] | Sequence[RepairPlan],
                         delta: int) -> RepairCheck:
    """Every planned node's repair system is nonsingular for every excluded set.

    A support violation is reported as a failure with witness
    ``(node, "support", message)``; a singular system as ``(node, excluded)``.
    """
    if not isinstance(plans, Mapping):
        plans = {p.node: p for p in plans}
    full_rank = code.r * code.N // delta
    checked = 0
    for node in sorted(plans):
        plan = plans[node]
        try:
            tilde = restricted_blocks(code, plan, node)
        except NotAccessOptimalPlan as exc:
            return RepairCheck(False, checked, (node, "support", str(exc)))
        others = [j for j in range(code.n) if j != node]
        for excluded in itertools.combinations(others, code.r - delta):
            checked += 1
            m = repair_matrix(code, plan, node, excluded, tilde)
            if m.shape != (full_rank, full_rank) or mat_rank(code.field, m) < full_rank:
                return RepairCheck(False, checked, (node, excluded))
    return RepairCheck(True, checked)


@dataclass(frozen=True)
class AuditRow:
    node: int
    round: int
    goal_index: int
    accessed: tuple[int, ...]
    rows: tuple[int, ...]
    per_helper: int
    total: int
    bound: int

    @property
    def optimal(self) -> bool:
        return self.total == self.bound

    def to_json(self) -> str:
        doc = asdict(self)
        doc["accessed"] = list(self.accessed)
        doc["rows"] = list(self.rows)
        doc["optimal"] = self.optimal
        return json.dumps(doc)


def audit(built: AccessOptimalCode) -> list[AuditRow]:
    d = built.k + built.delta - 1
    bound = bandwidth_bound(d, built.k, built.N)
    out = []
    for p in built.plans:
        per = len(p.accessed)
        out.append(AuditRow(p.node, p.round, p.goal_index, p.accessed, p.selected_rows,
                            per, per * d, bound))
    return out


def format_audit(rows: Sequence[AuditRow], paper_indexing: bool = False) -> str:
    """Aligned text table; ``paper_indexing`` prints PCG rows 1-indexed."""
    shift = 1 if paper_indexing else 0
    head = ("node", "round", "goal", "accessed", "rows", "per_helper", "total", "bound", "optimal")
    body = [
        (str(r.node), str(r.round), str(r.goal_index),
         "{" + ",".join(map(str, r.accessed)) + "}",
         "{" + ",".join(str(x + shift) for x in r.rows) + "}",
         str(r.per_helper), str(r.total), str(r.bound), "yes" if r.optimal else "NO")
        for r in rows
    ]
    widths = [max(len(h), *(len(b[c]) for b in body)) if body else len(h) for c, h in enumerate(head)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(b, widths)) for b in body]
    return "\n".join(line.rstrip() for line in lines)
