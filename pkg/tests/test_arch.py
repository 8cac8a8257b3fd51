import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nbldpc.arch import ArchParams, beta, estimate_cycles, sweep_fom

# n_va=256, n_ca=16 gives beta = 272/288, so 4 cores x 9 columns feed exactly 34 VNs
BASE = dict(n_p=4, c_p=9, n_vi=34, n_va=256, n_ci=8, n_ca=16, d_v=3, d_c=6)


def test_beta_examples():
    assert beta(1024, 256) == Fraction(1280, 1536)
    assert float(beta(1024, 256)) == pytest.approx(0.8333333333)
    assert beta(100, 0) == 1
    assert beta(64, 64) == Fraction(2, 3)


def test_iter_cycles_example():
    est = estimate_cycles(ArchParams(**{**BASE, "n_ci": 16}), m=240, iters=1)
    assert est.iter_cycles == 13


def test_balanced_feed_utilization():
    p = ArchParams(**BASE)
    assert p.feed_ratio == 1
    assert estimate_cycles(p, 240, 4).vn_utilization == 1.0


def test_formulas_by_hand():
    p = ArchParams(**{**BASE, "n_vi": 68, "n_ci": 4})
    est = estimate_cycles(p, 240, 3)
    assert est.init_cycles == math.ceil(256 / 34)
    assert est.iter_cycles == 3 * 4 * 13
    assert est.total_cycles_per_codeword == est.init_cycles + est.iter_cycles
    assert est.vn_utilization == pytest.approx(0.5)
    thr = 240 / est.total_cycles_per_codeword
    assert est.throughput == pytest.approx(thr)
    assert est.fom_proxy == pytest.approx(thr / (68 + 61.83 * 4))


def test_prototype_point_is_finite():
    est = estimate_cycles(ArchParams(n_p=1, c_p=288, n_vi=288, n_va=288, n_ci=1, n_ca=96), 192, 4)
    assert all(math.isfinite(v) and v >= 0 for v in vars(est).values())


def test_param_validation():
    with pytest.raises(ValueError):
        ArchParams(**{**BASE, "n_vi": 300})
    with pytest.raises(ValueError):
        ArchParams(**{**BASE, "n_ci": 17})
    with pytest.raises(ValueError):
        ArchParams(**{**BASE, "n_p": 0})


def test_interior_fom_optimum():
    grid = [ArchParams(**{**BASE, "n_ci": n}) for n in (1, 2, 4, 8, 16)]
    res = sweep_fom(grid, 240, 4)
    assert res.best["n_ci"] not in (1, 16)


def test_fom_best_at_full_utilization():
    grid = [ArchParams(**{**BASE, "n_vi": v}) for v in (8, 17, 34, 68, 136)]
    res = sweep_fom(grid, 240, 4)
    assert res.best["vn_utilization"] == 1.0
    top = max(r["fom_proxy"] for r in res.rows)
    assert all(r["vn_utilization"] == 1.0 for r in res.rows if r["fom_proxy"] == top)


@pytest.mark.parametrize("field,values", [("n_vi", (17, 34, 68, 136)), ("n_p", (1, 2, 4, 8, 16))])
def test_node_throughput_peaks_at_balanced_feed(field, values):
    grid = [ArchParams(**{**BASE, field: v}) for v in values]
    res = sweep_fom(grid, 240, 4, key="node_throughput")
    assert res.best["feed_ratio"] == 1.0


def test_single_point_grid():
    p = ArchParams(**BASE)
    res = sweep_fom([p], 240, 4)
    assert res.best_index == 0 and res.best["n_vi"] == 34
    with pytest.raises(ValueError):
        sweep_fom([], 240, 4)


@given(st.integers(1, 16), st.integers(1, 15), st.integers(1, 255), st.integers(1, 255),
       st.integers(1, 8))
def test_monotone_in_hardware(n_p, n_ci, n_vi, n_vi2, iters):
    lo, hi = sorted((n_vi, n_vi2))
    a = estimate_cycles(ArchParams(n_p, 9, lo, 256, n_ci, 16), 240, iters)
    b = estimate_cycles(ArchParams(n_p, 9, hi, 256, n_ci, 16), 240, iters)
    c = estimate_cycles(ArchParams(n_p, 9, lo, 256, n_ci + 1, 16), 240, iters)
    assert b.total_cycles_per_codeword <= a.total_cycles_per_codeword
    assert c.total_cycles_per_codeword <= a.total_cycles_per_codeword
    assert 0 <= a.vn_utilization <= 1
    assert (a.vn_utilization == 1) == (ArchParams(n_p, 9, lo, 256, n_ci, 16).feed_rate >= lo)
