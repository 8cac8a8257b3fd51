import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from nbldpc.codec import MEMORY, PIM, ReceivedWord, encode, is_clean, syndrome
from nbldpc.errors import OutOfDomain, ShapeMismatch

from oracles import dense_syndrome


def test_worked_encode(worked_pair):
    g, h = worked_pair
    np.testing.assert_array_equal(encode([1, 2], g), [1, 2, 1, 2])
    np.testing.assert_array_equal(encode([0, 0], g), [0, 0, 0, 0])
    assert is_clean(syndrome(encode([1, 2], g), h))


def test_encode_is_systematic(mid_code, rng):
    g, h = mid_code
    w = rng.integers(0, 3, (50, g.m))
    cw = encode(w, g)
    np.testing.assert_array_equal(cw[:, g.info_positions], w)
    assert not syndrome(cw, h).any()


def test_encode_shape_mismatch(worked_pair):
    with pytest.raises(ShapeMismatch):
        encode([1, 2, 0], worked_pair[0])


def test_syndrome_matches_dense_oracle(mid_code, rng):
    g, h = mid_code
    hd = h.to_dense().tolist()
    for _ in range(20):
        r = rng.integers(-50, 50, g.l)
        assert syndrome(ReceivedWord(r, PIM), h).tolist() == dense_syndrome(r, hd, 3)


def test_single_bump_gives_column(mid_code, rng):
    g, h = mid_code
    hd = h.to_dense()
    cw = encode(rng.integers(0, 3, g.m), g)
    for i in rng.choice(g.l, 20, replace=False):
        r = cw.copy()
        r[i] = (r[i] + 1) % 3
        np.testing.assert_array_equal(syndrome(r, h), hd[:, i])


def test_pim_mode_mac_is_clean(mid_code, rng):
    g, h = mid_code
    w = rng.integers(0, 3, (16, g.m))
    x = rng.integers(0, 256, 16)
    y = x @ encode(w, g)
    assert is_clean(syndrome(ReceivedWord(y, PIM), h))


def test_is_clean():
    assert is_clean(np.zeros(5, dtype=int))
    assert not is_clean(np.array([0, 0, 2]))


def test_shift_by_p_is_invisible(mid_code, rng):
    g, h = mid_code
    cw = encode(rng.integers(0, 3, g.m), g)
    assert is_clean(syndrome(ReceivedWord(cw + 3, PIM), h))


def test_memory_mode_domain(worked_pair):
    g, h = worked_pair
    with pytest.raises(OutOfDomain):
        syndrome(ReceivedWord([0, 1, 2, 3], MEMORY), h)
    with pytest.raises(ShapeMismatch):
        syndrome([0, 1, 2], h)
    with pytest.raises(ValueError):
        ReceivedWord([0, 1], "flash")


def test_huge_pim_values_do_not_overflow(worked_pair):
    g, h = worked_pair
    big = 3 ** 35  # x . W' beyond 2^53, exact in int64
    r = ReceivedWord(big * encode([1, 2], g), PIM)
    assert is_clean(syndrome(r, h))


@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_linearity(data, mid_code):
    g, h = mid_code
    u = data.draw(hnp.arrays(np.int64, g.l, elements=st.integers(-1000, 1000)))
    v = data.draw(hnp.arrays(np.int64, g.l, elements=st.integers(-1000, 1000)))
    a, b = data.draw(st.integers(0, 2)), data.draw(st.integers(0, 2))
    lhs = syndrome(ReceivedWord(a * u + b * v, PIM), h)
    rhs = (a * syndrome(ReceivedWord(u, PIM), h) + b * syndrome(ReceivedWord(v, PIM), h)) % 3
    np.testing.assert_array_equal(lhs, rhs)


@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_single_error_always_detected(data, mid_code):
    g, h = mid_code
    w = data.draw(hnp.arrays(np.int64, g.m, elements=st.integers(0, 2)))
    i = data.draw(st.integers(0, g.l - 1))
    e = data.draw(st.integers(-100, 100).filter(lambda e: e % 3))
    r = encode(w, g)
    r[i] += e
    assert not is_clean(syndrome(ReceivedWord(r, PIM), h))


@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_encode_mac_commutes(data, mid_code):
    g, h = mid_code
    n = data.draw(st.integers(1, 6))
    W = data.draw(hnp.arrays(np.int64, (n, g.m), elements=st.integers(-50, 50)))
    x = data.draw(hnp.arrays(np.int64, n, elements=st.integers(0, 255)))
    y = x @ encode(W % 3, g)
    np.testing.assert_array_equal(y % 3, encode((x @ (W % 3)) % 3, g))
