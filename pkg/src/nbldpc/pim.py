"""Behavioural model of a PIM macro holding NB-LDPC encoded weights.

Every row of the array is a codeword, so any integer combination of rows
(a MAC output) still has a zero syndrome. Device effects are abstracted into
three fault kinds:

``symbol-substitution``
    a stored/read symbol is replaced by a uniformly random *different* residue;
``cell-substitution``
    the same, applied to cells of a programmed :class:`PimArray`;
``output-offset``
    a MAC output gets a uniform offset from ``[-M, M]`` that is nonzero mod p
    (zero-mod-p offsets are undetectable and only drawn when explicitly
    enabled).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .code_builder import GeneratorMatrix
from .codec import MEMORY, PIM, ReceivedWord, encode
from .errors import OutOfDomain, ShapeMismatch
from .gfp import FieldSpec

SYMBOL_SUBSTITUTION = "symbol-substitution"
CELL_SUBSTITUTION = "cell-substitution"
OUTPUT_OFFSET = "output-offset"
FAULT_KINDS = (SYMBOL_SUBSTITUTION, CELL_SUBSTITUTION, OUTPUT_OFFSET)

PLAIN = "plain"
DIFFERENTIAL = "differential"

# keeps |x . cells| far from int64 overflow
MAC_BOUND = 1 << 62


@dataclass(frozen=True, eq=False)
class PimArray:
    spec: FieldSpec
    cells: np.ndarray
    code: GeneratorMatrix | None = None

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.int64)
        if cells.ndim != 2:
            raise ShapeMismatch("cells must be a 2-D array")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def n(self) -> int:
        return self.cells.shape[0]

    @property
    def l(self) -> int:
        return self.cells.shape[1]


@dataclass(frozen=True)
class FaultModel:
    kind: str
    rate: float
    offset_magnitude: int = 1
    seed: int = 0
    allow_zero_offsets: bool = False

    def __post_init__(self):
        if self.kind not in FAULT_KINDS:
            raise ValueError(f"fault kind must be one of {FAULT_KINDS}, got {self.kind!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"fault rate {self.rate} outside [0, 1]")
        if self.kind == OUTPUT_OFFSET and self.offset_magnitude < 1:
            raise ValueError("offset_magnitude must be >= 1")

    def offsets(self, p: int) -> np.ndarray:
        m = self.offset_magnitude
        d = np.arange(-m, m + 1)
        d = d[d != 0]
        if not self.allow_zero_offsets:
            d = d[d % p != 0]
        if d.size == 0:
            raise ValueError(f"no admissible offsets in [-{m}, {m}] for p={p}")
        return d


@dataclass(frozen=True)
class Fault:
    position: tuple
    old: int
    new: int


@dataclass
class FaultLog:
    faults: list = field(default_factory=list)

    def __len__(self):
        return len(self.faults)

    def __iter__(self):
        return iter(self.faults)

    def to_jsonl(self) -> str:
        return "".join(json.dumps({"position": list(f.position), "old": f.old, "new": f.new}) + "\n"
                       for f in self.faults)

    @classmethod
    def from_jsonl(cls, text: str) -> "FaultLog":
        out = []
        for ln in text.splitlines():
            if ln.strip():
                d = json.loads(ln)
                out.append(Fault(tuple(d["position"]), d["old"], d["new"]))
        return cls(out)


def diff_map(t) -> int:
    """Map a differential ternary weight {-1, 0, 1} onto GF(3) as {2, 0, 1}."""
    t_arr = np.asarray(t)
    if not np.isin(t_arr, (-1, 0, 1)).all():
        raise OutOfDomain(f"differential weights must be -1, 0 or 1, got {t!r}")
    out = np.mod(t_arr, 3)
    return int(out) if out.ndim == 0 else out


def program_weights(W, g: GeneratorMatrix, mode: str = PLAIN) -> PimArray:
    """Encode each row of the ``n x m`` weight matrix and store the codewords."""
    W = np.asarray(W, dtype=np.int64)
    if W.ndim != 2 or W.shape[1] != g.m:
        raise ShapeMismatch(f"weights must be n x {g.m}, got {W.shape}")
    p = g.spec.p
    if mode == DIFFERENTIAL:
        if p != 3:
            raise OutOfDomain("differential mapping requires GF(3)")
        W = diff_map(W) if W.size else W
    elif mode == PLAIN:
        if np.any((W < 0) | (W >= p)):
            raise OutOfDomain(f"plain-mode weights must be residues in [0, {p})")
    else:
        raise ValueError(f"mode must be {PLAIN!r} or {DIFFERENTIAL!r}")
    return PimArray(g.spec, encode(W, g), g)


def mac(arr: PimArray, x) -> ReceivedWord:
    """Exact integer MAC ``x . cells`` along the bitlines."""
    x = np.asarray(x, dtype=np.int64)
    if x.ndim != 1 or x.shape[0] != arr.n:
        raise ShapeMismatch(f"input length {x.shape}, array has {arr.n} rows")
    if np.any(x < 0):
        raise OutOfDomain("PIM inputs must be nonnegative")
    if int(x.sum()) * (arr.spec.p - 1) >= MAC_BOUND:
        raise OutOfDomain("input magnitudes could overflow the accumulator")
    return ReceivedWord(x @ arr.cells, PIM)


def inject_faults(target, fm: FaultModel, spec: FieldSpec | None = None,
                  rng: np.random.Generator | None = None):
    """Return a faulty copy of ``target`` and the :class:`FaultLog`.

    ``target`` is a :class:`PimArray` (cell faults), a :class:`ReceivedWord`
    or a bare memory-mode vector; the latter two need ``spec``.
    ``symbol-substitution`` on words is memory-mode only, ``output-offset``
    works in either mode. Draws come from ``rng`` when given, otherwise from
    a generator seeded with ``fm.seed``.
    """
    if rng is None:
        rng = np.random.default_rng(fm.seed)
    if isinstance(target, PimArray):
        if fm.kind == OUTPUT_OFFSET:
            raise ValueError("output-offset applies to MAC outputs, not to a PIM array")
        new, hits = _substitute(target.cells, fm.rate, target.spec.p, rng)
        log = FaultLog([Fault(tuple(int(i) for i in pos), int(target.cells[tuple(pos)]),
                              int(new[tuple(pos)])) for pos in np.argwhere(hits)])
        return PimArray(target.spec, new, target.code), log

    if spec is None:
        raise ValueError("faulting a received word needs the field spec")
    if isinstance(target, ReceivedWord):
        values, mode = target.values, target.mode
    else:
        values, mode = np.asarray(target, dtype=np.int64), MEMORY
    p = spec.p
    if fm.kind == OUTPUT_OFFSET:
        new, hits = _offset(values, fm.rate, fm.offsets(p), rng)
        if mode == MEMORY:
            new %= p
    elif fm.kind == SYMBOL_SUBSTITUTION:
        if mode != MEMORY:
            raise ValueError("symbol-substitution applies to memory-mode words")
        new, hits = _substitute(values, fm.rate, p, rng)
    else:
        raise ValueError("cell-substitution applies to PIM arrays, not received words")
    log = FaultLog([Fault((int(i),), int(values[i]), int(new[i])) for i in np.flatnonzero(hits)])
    out = ReceivedWord(new, mode) if isinstance(target, ReceivedWord) else new
    return out, log


def _substitute(values, rate, p, rng):
    hits = rng.random(values.shape) < rate
    delta = rng.integers(1, p, size=int(hits.sum()))
    new = np.array(values, dtype=np.int64)
    new[hits] = (new[hits] + delta) % p
    return new, hits


def _offset(values, rate, choices, rng):
    hits = rng.random(values.shape) < rate
    delta = rng.choice(choices, size=int(hits.sum()))
    new = np.array(values, dtype=np.int64)
    new[hits] += delta
    return new, hits
