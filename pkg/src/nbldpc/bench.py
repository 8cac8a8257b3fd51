"""Seeded Monte-Carlo BER sweeps.

Every trial draws from its own generator seeded with
``(seed, rate_index, trial_index)``, so results do not depend on chunking or
on the number of worker processes. Trials run in fixed-size chunks; chunks
are merged in index order and a rate point stops at the first chunk boundary
where either the trial budget or the post-decoding error-event target is
reached.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy.stats import binomtest

from .code_builder import CodeParams, build_code, default_check_degree
from .codec import MEMORY, PIM, encode
from .codefile import load_code
from .decoder import Decoder, DecoderConfig
from .gfp import FieldSpec
from .pim import (CELL_SUBSTITUTION, OUTPUT_OFFSET, SYMBOL_SUBSTITUTION, FaultModel)

logger = logging.getLogger(__name__)


@dataclass
class ExperimentConfig:
    p: int = 3
    l: int = 1280
    m: int = 1024
    d_v: int = 3
    d_c: int | None = None
    code_seed: int = 1
    code_file: str | None = None
    mode: str = MEMORY
    fault_kind: str | None = None
    rates: list = field(default_factory=lambda: [1e-3])
    trials: int = 1000
    min_error_events: int = 100
    max_iters: int = 16
    l_max: int = 63
    vn_messages: str = "temporal"
    seed: int = 0
    workers: int = 1
    chunk_size: int = 256
    pim_rows: int = 8
    pim_input_max: int = 1
    offset_magnitude: int = 1

    def __post_init__(self):
        if self.mode not in (MEMORY, PIM):
            raise ValueError(f"mode must be {MEMORY!r} or {PIM!r}")
        if self.fault_kind is None:
            self.fault_kind = SYMBOL_SUBSTITUTION if self.mode == MEMORY else OUTPUT_OFFSET
        if self.mode == MEMORY and self.fault_kind != SYMBOL_SUBSTITUTION:
            raise ValueError("memory mode supports symbol-substitution faults only")
        if self.mode == PIM and self.fault_kind not in (OUTPUT_OFFSET, CELL_SUBSTITUTION):
            raise ValueError("pim mode supports output-offset or cell-substitution faults")
        self.rates = [float(r) for r in self.rates]
        if not self.rates:
            raise ValueError("at least one raw error rate is required")
        if any(not 0.0 <= r <= 1.0 for r in self.rates):
            raise ValueError("raw error rates must lie in [0, 1]")
        if self.trials < 1 or self.workers < 1 or self.chunk_size < 1:
            raise ValueError("trials, workers and chunk_size must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)

    def decoder_config(self) -> DecoderConfig:
        return DecoderConfig(self.max_iters, self.l_max, self.vn_messages)

    def load_or_build_code(self):
        if self.code_file:
            return load_code(self.code_file)
        d_c = self.d_c or default_check_degree(self.l, self.m, self.d_v)
        params = CodeParams(FieldSpec(self.p), self.l, self.m, self.d_v, d_c, self.code_seed)
        g, h, _ = build_code(params)
        return g, h


@dataclass
class TrialRecord:
    rate_in: float
    mode: str
    trials: int
    info_symbols: int
    pre_symbol_errors: int
    post_symbol_errors: int
    pre_ecc_ber: float
    post_ecc_ber: float
    pre_ci_low: float
    pre_ci_high: float
    post_ci_low: float
    post_ci_high: float
    pre_bit_ber: float
    post_bit_ber: float
    frame_errors: int
    unconverged_frames: int
    mean_iterations: float
    wall_time: float

    @property
    def improvement(self) -> float:
        if self.post_ecc_ber == 0:
            return math.inf if self.pre_ecc_ber > 0 else 1.0
        return self.pre_ecc_ber / self.post_ecc_ber

    def deterministic_part(self) -> dict:
        d = asdict(self)
        d.pop("wall_time")
        # NaN never compares equal; map it to None so records can be compared
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()}


def wilson_interval(k: int, n: int, confidence: float = 0.95):
    """Wilson score interval for a binomial proportion ``k / n``."""
    if n == 0:
        return 0.0, 1.0
    ci = binomtest(int(k), int(n)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


# ---------------------------------------------------------------------------
# trial generation and evaluation


class _Runner:
    """Holds the code and decoder for one sweep; reused by worker processes."""

    def __init__(self, cfg: ExperimentConfig, g, h):
        self.cfg = cfg
        self.g, self.h = g, h
        self.spec = h.spec
        self.decoder = Decoder(h, cfg.decoder_config())
        self.bits = max(1, math.ceil(math.log2(self.spec.p)))

    def chunk(self, rate_index: int, start: int, stop: int) -> dict:
        cfg = self.cfg
        rate = cfg.rates[rate_index]
        if cfg.mode == MEMORY:
            truth, received = self._memory_trials(rate_index, rate, start, stop)
            res = self.decoder.decode_batch(received, MEMORY)
            decoded = res.symbols
        else:
            truth, received = self._pim_trials(rate_index, rate, start, stop)
            res = self.decoder.decode_batch(received, PIM)
            decoded = res.integers
        info = self.g.info_positions
        t, r, d = truth[:, info], received[:, info], decoded[:, info]
        pre = t != r
        post = t != d
        out = {
            "trials": stop - start,
            "pre": int(pre.sum()),
            "post": int(post.sum()),
            "frame_errors": int(post.any(axis=1).sum()),
            "unconverged": int((~res.converged).sum()),
            "iterations": int(res.iterations.sum()),
            "pre_bits": None,
            "post_bits": None,
        }
        if cfg.mode == MEMORY:
            out["pre_bits"] = int(np.bitwise_count(t ^ r).sum())
            out["post_bits"] = int(np.bitwise_count(t ^ d).sum())
        return out

    def _memory_trials(self, rate_index, rate, start, stop):
        p, l, m = self.spec.p, self.g.l, self.g.m
        words = np.empty((stop - start, m), dtype=np.int64)
        deltas = np.zeros((stop - start, l), dtype=np.int64)
        for row, t in enumerate(range(start, stop)):
            rng = np.random.default_rng([self.cfg.seed, rate_index, t])
            words[row] = rng.integers(0, p, m)
            hits = rng.random(l) < rate
            deltas[row, hits] = rng.integers(1, p, int(hits.sum()))
        truth = encode(words, self.g)
        return truth, (truth + deltas) % p

    def _pim_trials(self, rate_index, rate, start, stop):
        cfg = self.cfg
        p, l, m, n = self.spec.p, self.g.l, self.g.m, cfg.pim_rows
        offsets = FaultModel(OUTPUT_OFFSET, rate, cfg.offset_magnitude).offsets(p)
        truth = np.empty((stop - start, l), dtype=np.int64)
        received = np.empty_like(truth)
        for row, t in enumerate(range(start, stop)):
            rng = np.random.default_rng([self.cfg.seed, rate_index, t])
            weights = rng.integers(0, p, (n, m))
            x = rng.integers(0, cfg.pim_input_max + 1, n)
            cells = encode(weights, self.g)
            truth[row] = x @ cells
            if cfg.fault_kind == CELL_SUBSTITUTION:
                hits = rng.random(cells.shape) < rate
                faulty = cells.copy()
                faulty[hits] = (faulty[hits] + rng.integers(1, p, int(hits.sum()))) % p
                received[row] = x @ faulty
            else:
                hits = rng.random(l) < rate
                received[row] = truth[row]
                received[row, hits] += rng.choice(offsets, int(hits.sum()))
        return truth, received


_worker_runner = None


def _init_worker(cfg, g, h):
    global _worker_runner
    _worker_runner = _Runner(cfg, g, h)


def _run_chunk(args):
    return _worker_runner.chunk(*args)


def run_ber_sweep(cfg: ExperimentConfig, code=None, progress=None) -> list[TrialRecord]:
    """Run the sweep described by ``cfg``; one :class:`TrialRecord` per rate."""
    g, h = code if code is not None else cfg.load_or_build_code()
    runner = _Runner(cfg, g, h)
    pool = None
    if cfg.workers > 1:
        pool = ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(cfg, g, h))
    records = []
    try:
        for ri, rate in enumerate(cfg.rates):
            t0 = time.perf_counter()
            bounds = [(s, min(s + cfg.chunk_size, cfg.trials))
                      for s in range(0, cfg.trials, cfg.chunk_size)]
            acc = dict(trials=0, pre=0, post=0, frame_errors=0, unconverged=0,
                       iterations=0, pre_bits=0, post_bits=0)
            wave = cfg.workers if pool else 1
            done = False
            for w0 in range(0, len(bounds), wave):
                jobs = [(ri, s, e) for s, e in bounds[w0:w0 + wave]]
                results = pool.map(_run_chunk, jobs) if pool else [runner.chunk(*jobs[0])]
                for part in results:
                    if done:
                        break
                    for k in acc:
                        if part[k] is not None:
                            acc[k] += part[k]
                    if acc["post"] >= cfg.min_error_events:
                        done = True
                if done:
                    break
            records.append(_make_record(cfg, rate, g.m, runner.bits, acc,
                                        time.perf_counter() - t0))
            if progress:
                progress(records[-1])
    finally:
        if pool:
            pool.shutdown()
    return records


def _make_record(cfg, rate, m, bits, acc, wall) -> TrialRecord:
    n = acc["trials"] * m
    pre_lo, pre_hi = wilson_interval(acc["pre"], n)
    post_lo, post_hi = wilson_interval(acc["post"], n)
    if cfg.mode == MEMORY:
        pre_bit = acc["pre_bits"] / (n * bits)
        post_bit = acc["post_bits"] / (n * bits)
    else:
        pre_bit = post_bit = float("nan")
    return TrialRecord(
        rate_in=rate, mode=cfg.mode, trials=acc["trials"], info_symbols=n,
        pre_symbol_errors=acc["pre"], post_symbol_errors=acc["post"],
        pre_ecc_ber=acc["pre"] / n, post_ecc_ber=acc["post"] / n,
        pre_ci_low=pre_lo, pre_ci_high=pre_hi, post_ci_low=post_lo, post_ci_high=post_hi,
        pre_bit_ber=pre_bit, post_bit_ber=post_bit,
        frame_errors=acc["frame_errors"], unconverged_frames=acc["unconverged"],
        mean_iterations=acc["iterations"] / acc["trials"], wall_time=wall,
    )


# ---------------------------------------------------------------------------
# record I/O

RECORD_FIELDS = [f.name for f in fields(TrialRecord)]


def write_jsonl(records, path) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(asdict(r)) + "\n")


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RECORD_FIELDS)
        writer.writeheader()
        for r in records:
            writer.writerow(asdict(r))


def read_csv(path) -> list[TrialRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            kw = {}
            for f in fields(TrialRecord):
                v = row[f.name]
                kw[f.name] = v if f.name == "mode" else (
                    int(v) if f.type == "int" else float(v))
            out.append(TrialRecord(**kw))
    return out
