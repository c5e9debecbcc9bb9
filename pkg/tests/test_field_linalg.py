import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mdsx.errors import DivideByZero, NotPrime, Singular
from mdsx.field_linalg import (Field, field_make, identity, is_prime, mat_inverse, mat_rank,
                               mat_solve, matmul)

F17 = Field(17)


def naive_pow(a, e, q):
    acc = 1
    for _ in range(e):
        acc = acc * a % q
    return acc


def brute_det(m, q):
    m = [list(map(int, row)) for row in m]
    if len(m) == 1:
        return m[0][0] % q
    return sum((-1) ** j * m[0][j] * brute_det([row[:j] + row[j + 1:] for row in m[1:]], q)
               for j in range(len(m))) % q


def test_field_make():
    assert field_make(17).q == 17
    assert field_make(2).q == 2
    with pytest.raises(NotPrime):
        field_make(16)
    with pytest.raises(NotPrime):
        field_make(1)


@pytest.mark.parametrize("q", range(2, 200))
def test_is_prime_matches_sieve(q):
    assert is_prime(q) == all(q % d for d in range(2, q))


def test_pow_and_inverse_oracles():
    assert F17.pow(16, 2) == naive_pow(16, 2, 17) == 1
    assert F17.inv(1) == 1
    two_inv = [x for x in range(17) if 2 * x % 17 == 1]
    assert two_inv == [9]
    assert F17.inv(2) == 9
    with pytest.raises(DivideByZero):
        F17.inv(0)


elements = st.integers(0, 16)


@given(elements, elements, elements)
def test_field_laws(a, b, c):
    f = F17
    assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.sub(f.add(a, b), b) == a
    if a:
        assert f.mul(a, f.inv(a)) == 1
        assert f.div(f.mul(a, b), a) == b


def test_solve_identity_and_singular(rng):
    b = F17.random((4, 3), rng)
    assert np.array_equal(mat_solve(F17, identity(4), b), b)
    a = F17.random((4, 4), rng)
    a[2] = a[0]
    with pytest.raises(Singular):
        mat_solve(F17, a, b)


def test_solve_roundtrip(rng):
    for _ in range(20):
        a = F17.random((6, 6), rng)
        if brute_det(a, 17) == 0:
            continue
        x0 = F17.random((6,), rng)
        assert np.array_equal(mat_solve(F17, a, matmul(F17, a, x0)), x0)
        assert np.array_equal(matmul(F17, a, mat_inverse(F17, a)), identity(6))


def test_rank_examples():
    assert mat_rank(F17, np.zeros((3, 5), dtype=np.int64)) == 0
    assert mat_rank(F17, identity(7)) == 7
    v = np.array([[pow(i + 1, t, 17) for i in range(16)] for t in range(3)])
    # a nonzero 3x3 minor certifies full row rank
    assert any(brute_det(v[:, list(c)], 17) for c in itertools.combinations(range(16), 3))
    assert mat_rank(F17, v) == 3


def test_rank_against_determinant_oracle(rng):
    for _ in range(30):
        a = rng.integers(0, 3, size=(4, 4)).astype(np.int64)
        assert (mat_rank(F17, a) == 4) == (brute_det(a, 17) != 0)


@given(st.lists(st.lists(elements, min_size=5, max_size=5), min_size=1, max_size=6),
       st.randoms(use_true_random=False), st.integers(1, 16))
def test_rank_invariant_under_permutation_and_scaling(rows, rnd, scale):
    a = np.array(rows, dtype=np.int64)
    perm = list(range(len(rows)))
    rnd.shuffle(perm)
    b = a[perm].copy()
    b[0] = b[0] * scale % 17
    assert mat_rank(F17, a) == mat_rank(F17, b)


def test_matmul_large_modulus_is_exact(rng):
    f = Field(2147483647)
    a = f.random((3, 40), rng)
    b = f.random((40, 2), rng)
    expect = [[sum(int(a[i, k]) * int(b[k, j]) for k in range(40)) % f.q for j in range(2)]
              for i in range(3)]
    assert matmul(f, a, b).tolist() == expect
    x = f.random((40,), rng)
    assert matmul(f, a, x).tolist() == [sum(int(a[i, k]) * int(x[k]) for k in range(40)) % f.q
                                        for i in range(3)]
