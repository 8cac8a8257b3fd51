import math

import pytest

from nbldpc.bench import (ExperimentConfig, TrialRecord, read_csv, run_ber_sweep, wilson_interval,
                          write_csv, write_jsonl)
from nbldpc.pim import CELL_SUBSTITUTION


def small_cfg(**kw):
    base = dict(l=200, m=120, d_v=3, rates=[0.0, 0.02], trials=120, chunk_size=40, seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


@pytest.fixture(scope="module")
def small_code():
    return small_cfg().load_or_build_code()


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(rates=[])
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(workers=0)
    with pytest.raises(ValueError):
        ExperimentConfig(mode="pim", fault_kind="symbol-substitution")
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"bogus": 1})
    cfg = ExperimentConfig.from_dict({"l": 100, "m": 50, "rates": [1e-3]})
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_rate_zero(small_code):
    rec = run_ber_sweep(small_cfg(rates=[0.0]), small_code)[0]
    assert rec.post_ecc_ber == 0 and rec.pre_ecc_ber == 0
    assert rec.mean_iterations == 0 and rec.frame_errors == 0


@pytest.mark.parametrize("mode", ["memory", "pim"])
def test_workers_do_not_change_results(small_code, mode):
    cfg = small_cfg(mode=mode, rates=[0.02, 0.06], min_error_events=50)
    a = run_ber_sweep(cfg, small_code)
    b = run_ber_sweep(small_cfg(mode=mode, rates=[0.02, 0.06], min_error_events=50, workers=3),
                      small_code)
    assert [r.deterministic_part() for r in a] == [r.deterministic_part() for r in b]


def test_chunking_does_not_change_full_runs(small_code):
    a = run_ber_sweep(small_cfg(min_error_events=10**9), small_code)
    b = run_ber_sweep(small_cfg(min_error_events=10**9, chunk_size=7), small_code)
    assert [r.deterministic_part() for r in a] == [r.deterministic_part() for r in b]


def test_stops_after_enough_error_events(small_code):
    rec = run_ber_sweep(small_cfg(rates=[0.1], trials=10_000, chunk_size=20), small_code)[0]
    assert rec.post_symbol_errors >= 100
    assert rec.trials < 10_000 and rec.trials % 20 == 0


def test_accounting(small_code):
    cfg = small_cfg(rates=[0.01, 0.05, 0.08], min_error_events=10**9)
    for rec in run_ber_sweep(cfg, small_code):
        assert rec.info_symbols == rec.trials * 120
        assert rec.pre_ecc_ber == rec.pre_symbol_errors / rec.info_symbols
        assert (rec.frame_errors == 0) == (rec.post_symbol_errors == 0)
        assert rec.pre_ci_low <= rec.pre_ecc_ber <= rec.pre_ci_high
        assert rec.post_ci_low <= rec.post_ecc_ber <= rec.post_ci_high
        # a wrong GF(3) symbol flips one or both of its two bits
        assert rec.pre_ecc_ber / 2 <= rec.pre_bit_ber <= rec.pre_ecc_ber
        assert abs(rec.pre_ecc_ber - rec.rate_in) < 5 * math.sqrt(rec.rate_in / rec.info_symbols)


def test_pim_cell_faults_run(small_code):
    cfg = small_cfg(mode="pim", fault_kind=CELL_SUBSTITUTION, rates=[0.002], pim_rows=4)
    rec = run_ber_sweep(cfg, small_code)[0]
    assert rec.mode == "pim" and rec.pre_symbol_errors > 0
    assert math.isnan(rec.pre_bit_ber)


def test_wilson_matches_formula():
    k, n = 37, 1000
    z = 1.959963984540054
    ph = k / n
    centre = (ph + z * z / (2 * n)) / (1 + z * z / n)
    half = z / (1 + z * z / n) * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n))
    lo, hi = wilson_interval(k, n)
    assert lo == pytest.approx(centre - half, rel=1e-9)
    assert hi == pytest.approx(centre + half, rel=1e-9)
    lo0, hi0 = wilson_interval(0, 10**6)
    assert lo0 == 0 and hi0 == pytest.approx(3.84e-6, rel=0.01)


def test_csv_jsonl_round_trip(tmp_path, small_code):
    recs = run_ber_sweep(small_cfg(mode="pim"), small_code)
    write_csv(recs, tmp_path / "r.csv")
    write_jsonl(recs, tmp_path / "r.jsonl")
    back = read_csv(tmp_path / "r.csv")
    assert [r.deterministic_part() for r in back] == [r.deterministic_part() for r in recs]
    assert len((tmp_path / "r.jsonl").read_text().splitlines()) == len(recs)


def _resolvably_worse(a: TrialRecord, b: TrialRecord) -> bool:
    """True when b's post BER is above a's with disjoint 95% intervals."""
    return b.post_ci_low > a.post_ci_high


def test_longer_words_decode_better():
    # below the decoding threshold; past it (around 1% here) the order reverses
    rate = 0.002
    recs = []
    for l in (40, 160, 640):
        cfg = ExperimentConfig(l=l, m=l * 4 // 5, d_v=3, rates=[rate], trials=1000,
                               chunk_size=250, seed=11, min_error_events=10**9)
        recs.append(run_ber_sweep(cfg)[0])
    for short, long_ in zip(recs, recs[1:]):
        assert not _resolvably_worse(short, long_)
    assert recs[-1].post_ci_high < recs[0].post_ci_low
