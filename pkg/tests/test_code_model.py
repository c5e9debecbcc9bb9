import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdsx.code_model import BlockParityCheckCode, decode_any_k, encode, is_mds, vandermonde_code
from mdsx.errors import FieldTooSmall, Singular
from mdsx.field_linalg import Field

F17 = Field(17)


def test_vandermonde_coefficients():
    code = vandermonde_code(16, 3, F17)
    assert (code.n, code.k, code.N) == (16, 13, 1)
    assert code.block(1, 1)[0, 0] == 2
    assert code.block(1, 15)[0, 0] == 16
    assert code.block(2, 15)[0, 0] == pow(16, 2, 17) == 1
    assert np.all(code.blocks[0] == 1)


def test_vandermonde_field_too_small():
    with pytest.raises(FieldTooSmall):
        vandermonde_code(17, 3, F17)
    with pytest.raises(FieldTooSmall):
        vandermonde_code(3, 1, F17, points=[1, 18, 5])
    # point 0 is allowed when supplied explicitly
    assert is_mds(vandermonde_code(17, 3, F17, points=range(17)))


def test_is_mds_vandermonde_and_duplicates():
    res = is_mds(vandermonde_code(16, 3, F17))
    assert res.ok and res.checked == 560
    dup = vandermonde_code(6, 2, F17, points=[1, 2, 3, 4, 5, 6]).blocks.copy()
    dup[:, 4] = dup[:, 1]
    bad = is_mds(BlockParityCheckCode(F17, 6, 4, 1, dup))
    assert not bad.ok
    assert bad.witness == (1, 4)


@given(st.integers(3, 12), st.data())
def test_vandermonde_is_mds(n_prime, data):
    r = data.draw(st.integers(1, n_prime - 1))
    assert is_mds(vandermonde_code(n_prime, r, Field(13)))


def test_encode_zero_and_systematic(built_852, rng):
    code = built_852.code
    assert not np.any(encode(code, np.zeros(5 * 16, dtype=np.int64)))
    msg = code.field.random((5 * 16,), rng)
    cw = encode(code, msg)
    assert code.is_codeword(cw)
    assert np.array_equal(cw[:5].reshape(-1), msg)
    other = encode(code, msg, systematic_nodes=[1, 3, 4, 6, 7])
    assert code.is_codeword(other)
    assert np.array_equal(other[[1, 3, 4, 6, 7]].reshape(-1), msg)


def test_encode_batch_matches_single(built_852, rng):
    code = built_852.code
    msgs = code.field.random((80, 4), rng)
    batch = encode(code, msgs)
    for s in range(4):
        assert np.array_equal(batch[..., s], encode(code, msgs[:, s]))


def test_decode_every_erasure_pattern(built_852, rng):
    code = built_852.code
    cw = encode(code, code.field.random((80,), rng))
    for keep in itertools.combinations(range(8), 5):
        assert np.array_equal(decode_any_k(code, {i: cw[i] for i in keep}), cw)


def test_decode_with_both_first_round_goals_missing(built_852, rng):
    code = built_852.code
    cw = encode(code, code.field.random((80,), rng))
    keep = [i for i in range(8) if i not in (0, 1, 7)]
    assert np.array_equal(decode_any_k(code, {i: cw[i] for i in keep}), cw)


def test_encode_non_mds_raises():
    blocks = np.ones((2, 4, 1, 1), dtype=np.int64)
    code = BlockParityCheckCode(F17, 4, 2, 1, blocks)
    with pytest.raises(Singular):
        encode(code, np.array([1, 2]))


def test_json_roundtrip(built_852):
    doc = json.loads(json.dumps(built_852.code.to_json()))
    assert list(doc) == ["q", "n", "k", "N", "blocks"]
    back = BlockParityCheckCode.from_json(doc)
    assert np.array_equal(back.blocks, built_852.code.blocks)
    assert (back.q, back.n, back.k, back.N) == (17, 8, 5, 16)


def test_code_rejects_bad_shapes():
    with pytest.raises(ValueError):
        BlockParityCheckCode(F17, 4, 2, 1, np.ones((3, 4, 1, 1), dtype=np.int64))
    with pytest.raises(ValueError):
        BlockParityCheckCode(F17, 4, 4, 1, np.ones((0, 4, 1, 1), dtype=np.int64))
    with pytest.raises(ValueError):
        BlockParityCheckCode(F17, 4, 2, 1, np.full((2, 4, 1, 1), 17))
