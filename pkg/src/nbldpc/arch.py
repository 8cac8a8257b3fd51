"""Cycle-count and area-proxy model of a shared NB-LDPC decoder.

Only relative trends are meaningful. The model knows how fast PIM cores
deliver codeword symbols (``beta * n_p * c_p`` per cycle), how many VNs and
CNs are instantiated, and what a CN activation costs. Area is counted in VN
units, with one CN unit worth ``area_ratio_cn_vn`` VN units.
"""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

CN_AREA_RATIO = 61.83


@dataclass(frozen=True)
class ArchParams:
    n_p: int
    c_p: int
    n_vi: int
    n_va: int
    n_ci: int
    n_ca: int
    d_v: int = 3
    d_c: int = 6
    area_ratio_cn_vn: float = CN_AREA_RATIO
    # cycles per CN activation = fbp_passes * d_c + cn_extra_cycles
    fbp_passes: int = 2
    cn_extra_cycles: int = 1

    def __post_init__(self):
        for name in ("n_p", "c_p", "n_vi", "n_va", "n_ci", "n_ca", "d_v", "d_c"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n_vi > self.n_va:
            raise ValueError("n_vi cannot exceed n_va")
        if self.n_ci > self.n_ca:
            raise ValueError("n_ci cannot exceed n_ca")

    @property
    def beta(self) -> Fraction:
        return beta(self.n_va, self.n_ca)

    @property
    def feed_rate(self) -> Fraction:
        """Codeword symbols delivered per cycle by the PIM cores, ``beta * n_p * c_p``."""
        return self.beta * self.n_p * self.c_p

    @property
    def feed_ratio(self) -> Fraction:
        """``beta * n_p * c_p / n_vi``; 1 means neither side idles during init."""
        return self.feed_rate / self.n_vi


@dataclass(frozen=True)
class CycleEstimate:
    init_cycles: int
    iter_cycles: int
    total_cycles_per_codeword: int
    vn_utilization: float
    throughput: float          # information symbols per cycle
    node_throughput: float     # throughput per provisioned input node
    fom_proxy: float           # throughput per area unit


def beta(n_va: int, n_ca: int) -> Fraction:
    """VN count over partial sums per codeword; a check symbol needs 2 partial sums."""
    if n_va < 1 or n_ca < 0:
        raise ValueError("need n_va >= 1 and n_ca >= 0")
    return Fraction(n_va + n_ca, n_va + 2 * n_ca)


def estimate_cycles(params: ArchParams, m: int, iters: int) -> CycleEstimate:
    """Cycles to initialize and decode one codeword of ``m`` information symbols.

    ``node_throughput`` divides by ``max(n_vi, beta*n_p*c_p)``: whichever side
    of the VN input interface is over-provisioned sits idle but still counts.
    """
    if m < 1 or iters < 0:
        raise ValueError("need m >= 1 and iters >= 0")
    feed = params.feed_rate
    init = math.ceil(Fraction(params.n_va) / min(Fraction(params.n_vi), feed))
    per_activation = params.fbp_passes * params.d_c + params.cn_extra_cycles
    iter_cycles = iters * math.ceil(params.n_ca / params.n_ci) * per_activation
    total = init + iter_cycles
    throughput = m / total
    util = float(min(Fraction(1), params.feed_ratio))
    area = params.n_vi + params.area_ratio_cn_vn * params.n_ci
    return CycleEstimate(
        init_cycles=init,
        iter_cycles=iter_cycles,
        total_cycles_per_codeword=total,
        vn_utilization=util,
        throughput=throughput,
        node_throughput=throughput / float(max(Fraction(params.n_vi), feed)),
        fom_proxy=throughput / area,
    )


@dataclass
class SweepResult:
    rows: list
    best_index: int
    key: str

    @property
    def best(self) -> dict:
        return self.rows[self.best_index]


def sweep_fom(grid, m: int, iters: int, key: str = "fom_proxy") -> SweepResult:
    """Evaluate every ``ArchParams`` in ``grid``; ``best_index`` maximizes ``key``.

    Ties keep the first grid point.
    """
    rows = []
    for params in grid:
        est = estimate_cycles(params, m, iters)
        row = asdict(params)
        row["beta"] = float(params.beta)
        row["feed_ratio"] = float(params.feed_ratio)
        row.update(asdict(est))
        rows.append(row)
    if not rows:
        raise ValueError("empty grid")
    best = max(range(len(rows)), key=lambda i: (rows[i][key], -i))
    return SweepResult(rows, best, key)


def write_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
