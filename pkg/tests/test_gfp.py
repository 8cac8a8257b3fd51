import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nbldpc.errors import OutOfDomain, ZeroInverse
from nbldpc.gfp import FieldSpec, is_prime


def test_field_ops_examples():
    f3, f5 = FieldSpec(3), FieldSpec(5)
    assert f3.mul(2, 2) == 1
    assert f3.add(2, 2) == 1
    assert f5.neg(3) == 2


@pytest.mark.parametrize("p,a,expected", [(3, 2, 2), (5, 3, 2), (7, 4, 2)])
def test_inverse_examples(p, a, expected):
    assert FieldSpec(p).inv(a) == expected


def test_zero_has_no_inverse():
    with pytest.raises(ZeroInverse):
        FieldSpec(5).inv(0)


@pytest.mark.parametrize("y,k,p,d", [(5, 2, 3, 0), (5, 0, 3, 1), (7, 0, 5, 2)])
def test_residue_distance_examples(y, k, p, d):
    assert FieldSpec(p).residue_distance(y, k) == d


@pytest.mark.parametrize("bad", [1, 2, 4, 9, 15, 1 << 17, 65537, -3, 3.0])
def test_rejects_bad_moduli(bad):
    with pytest.raises(OutOfDomain):
        FieldSpec(bad)


def test_is_prime_matches_sieve():
    sieve = [True] * 2000
    sieve[0] = sieve[1] = False
    for i in range(2, 2000):
        if sieve[i]:
            for j in range(i * i, 2000, i):
                sieve[j] = False
    assert [is_prime(n) for n in range(2000)] == sieve


def test_symbol_reduces_negatives():
    f = FieldSpec(5)
    assert f.symbol(-1) == 4
    assert f.symbol(-12) == 3
    np.testing.assert_array_equal(f.symbol(np.array([-1, 5, 6])), [4, 0, 1])


@pytest.mark.parametrize("p", [3, 5, 7])
def test_field_axioms_exhaustive(p):
    f = FieldSpec(p)
    el = range(p)
    for a, b, c in itertools.product(el, el, el):
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    for a, b in itertools.product(el, el):
        assert f.add(a, b) == f.add(b, a)
        assert f.mul(a, b) == f.mul(b, a)
        assert f.sub(a, b) == f.add(a, f.neg(b))
    for a in el:
        assert f.add(a, f.neg(a)) == 0
        assert f.add(a, 0) == a and f.mul(a, 1) == a
        if a:
            assert f.mul(a, f.inv(a)) == 1


@pytest.mark.parametrize("p", [3, 5, 7, 11, 65521])
def test_inverse_table(p):
    f = FieldSpec(p)
    tab = f.inverse_table()
    a = np.arange(1, p)
    assert np.all((a * tab[1:]) % p == 1)


primes = st.sampled_from([3, 5, 7, 11, 13, 257, 65521])


@given(primes, st.integers(-10**12, 10**12))
def test_distance_properties(p, y):
    f = FieldSpec(p)
    assert f.residue_distance(y, y % p) == 0
    for k in {0, 1, p - 1, p // 2}:
        d = f.residue_distance(y, k)
        assert 0 <= d <= p // 2
        assert d == f.residue_distance(y + p, k)
        # brute force over the nearby congruent integers
        z0 = y - (y - k) % p
        assert d == min(abs(y - z0), abs(y - z0 - p))


@given(primes, st.integers(-10**12, 10**12), st.integers(0, 10**6))
def test_interpret_is_nearest_congruent(p, y, k):
    f = FieldSpec(p)
    k %= p
    z = f.interpret(y, k)
    assert z % p == k
    assert abs(y - z) == f.residue_distance(y, k)
    assert f.interpret(y, y % p) == y


@given(primes, st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_ops_never_overflow(p, a, b):
    f = FieldSpec(p)
    a, b = f.symbol(a), f.symbol(b)
    assert f.mul(a, b) == (a * b) % p
    assert 0 <= f.add(a, b) < p
