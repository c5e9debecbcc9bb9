import itertools
import json

import numpy as np
import pytest

from mdsx.builder import RepairPlan, build
from mdsx.code_model import decode_any_k, encode
from mdsx.errors import BadHelperSet, NotAccessOptimalPlan
from mdsx.repair import (audit, bandwidth_bound, check_repair_systems, format_audit, repair,
                         repair_from_downloads, repair_matrix)


def codeword(built, rng, stripes=None):
    shape = (built.k * built.N,) if stripes is None else (built.k * built.N, stripes)
    return encode(built.code, built.code.field.random(shape, rng))


def test_bound_arithmetic():
    assert bandwidth_bound(6, 5, 16) == 48
    assert bandwidth_bound(10, 8, 3) == 10
    with pytest.raises(ValueError):
        bandwidth_bound(5, 3, 1)


def test_all_helper_sets_852(built_852, rng):
    cw = codeword(built_852, rng)
    cases = 0
    for failed in range(8):
        others = [j for j in range(8) if j != failed]
        for helpers in itertools.combinations(others, 6):
            rec, rep = repair(built_852, cw, failed, helpers)
            assert np.array_equal(rec, cw[failed])
            assert rep.downloaded_per_helper == rep.accessed_per_helper == 8
            assert rep.total_downloaded == rep.bound == 48
            cases += 1
    assert cases == 56


def test_repair_equals_decoder_oracle(rng):
    b = build(8, 4, 2)
    cw = codeword(b, rng)
    for failed in range(8):
        others = [j for j in range(8) if j != failed]
        for helpers in itertools.combinations(others, 5):
            rec, rep = repair(b, cw, failed, helpers)
            survivors = {j: cw[j] for j in others[:4]}
            assert np.array_equal(rec, decode_any_k(b.code, survivors)[failed])
            assert rep.total_downloaded == 5 * 16 // 2


def test_delta_equals_r(rng):
    b = build(6, 4, 2)
    cw = codeword(b, rng)
    for failed in range(6):
        rec, rep = repair(b, cw, failed)
        assert np.array_equal(rec, cw[failed])
        assert len(rep.helpers) == 5
    plan = b.plans[0]
    m = repair_matrix(b.code, plan, 0, [])
    assert m.shape == (b.N, b.N)


def test_batched_stripes(built_852, rng):
    cw = codeword(built_852, rng, stripes=7)
    rec, rep = repair(built_852, cw, 5, [0, 1, 2, 3, 4, 6])
    assert np.array_equal(rec, cw[5])
    assert rep.total_downloaded == 48


def test_code_12_8_goal_node(code_12_8, rng):
    _, code, plans = code_12_8
    cw = encode(code, code.field.random((code.k * code.N,), rng))
    for failed in (0, 1):
        plan = plans[failed]
        helpers = list(range(2, 12))
        downloads = {h: cw[h][list(plan.accessed)] for h in helpers}
        rec, rep = repair_from_downloads(code, plan, 3, failed, downloads)
        assert np.array_equal(rec, cw[failed])
        assert rep.total_downloaded == rep.bound == 10


def test_check_repair_systems(built_852, code_12_8):
    res = check_repair_systems(built_852.code, built_852.plans, 2)
    assert res.ok and res.checked == 56
    _, code, plans = code_12_8
    res = check_repair_systems(code, plans, 3)
    assert res.ok and res.checked == 2 * 11


def test_support_violation_detected(built_852):
    code = built_852.code
    bad = RepairPlan(0, 0, 0, tuple(range(8)), tuple(range(8)))
    with pytest.raises(NotAccessOptimalPlan):
        repair_matrix(code, bad, 0, [])
    res = check_repair_systems(code, {0: bad}, 2)
    assert not res.ok and res.witness[1] == "support"


def test_helper_validation(built_852, rng):
    cw = codeword(built_852, rng)
    with pytest.raises(BadHelperSet):
        repair(built_852, cw, 0, [1, 2, 3, 4, 5])
    with pytest.raises(BadHelperSet):
        repair(built_852, cw, 0, [0, 1, 2, 3, 4, 5])
    with pytest.raises(BadHelperSet):
        repair(built_852, cw, 0, [1, 2, 3, 4, 5, 9])


def test_audit_852(built_852):
    rows = audit(built_852)
    assert [r.node for r in rows] == list(range(8))
    assert all(r.optimal and r.per_helper == 8 and r.bound == 48 for r in rows)
    assert rows[2].accessed == (0, 1, 4, 5, 8, 9, 12, 13) == rows[2].rows
    line = json.loads(rows[7].to_json())
    assert set(line) == {"node", "round", "goal_index", "accessed", "rows", "per_helper",
                         "total", "bound", "optimal"}
    text = format_audit(rows, paper_indexing=True)
    assert "{9,10,11,12,13,14,15,16}" in text


def test_audit_633():
    b = build(6, 3, 3)
    rows = audit(b)
    assert all(r.per_helper == 3 ** 3 // 3 for r in rows)
    assert all(r.total == r.bound == 5 * 9 for r in rows)


def small_params():
    for n in range(3, 11):
        for r in range(2, min(4, n - 1) + 1):
            for delta in range(2, r + 1):
                yield n, n - r, delta


@pytest.mark.slow
@pytest.mark.parametrize("n,k,delta", list(small_params()))
def test_repair_systems_all_small_codes(n, k, delta):
    b = build(n, k, delta, keep_intermediates=False)
    res = check_repair_systems(b.code, b.plans, delta)
    assert res.ok
    assert res.checked == n * len(list(itertools.combinations(range(n - 1), n - k - delta)))


@pytest.mark.parametrize("n,k,delta", [p for p in small_params() if (p[0] - p[1]) * p[2] ** (-(-p[0] // 2)) <= 256])
def test_repair_exact_all_nodes(n, k, delta, rng):
    b = build(n, k, delta, keep_intermediates=False)
    cw = codeword(b, rng)
    for failed in range(n):
        rec, rep = repair(b, cw, failed)
        assert np.array_equal(rec, cw[failed])
        assert rep.optimal
