"""Systematic encoding and syndrome-based error detection.

Detection works identically on stored symbols (memory mode) and on integer
MAC outputs (PIM mode): only residues mod p enter the syndrome, and sums are
accumulated in int64 (or Python ints for huge values) before one final
reduction per check. An error whose magnitude is a multiple of p leaves
every residue unchanged, so it is invisible to the syndrome.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .code_builder import CheckMatrix, GeneratorMatrix
from .errors import OutOfDomain, ShapeMismatch

MEMORY = "memory"
PIM = "pim"
MODES = (MEMORY, PIM)


@dataclass(frozen=True, eq=False)
class ReceivedWord:
    """A length-l word entering detection or decoding.

    Memory-mode values must be residues in ``[0, p)``; PIM-mode values are
    arbitrary signed integers.
    """

    values: np.ndarray
    mode: str = MEMORY

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        vals = np.array(self.values, dtype=np.int64)
        if vals.ndim != 1:
            raise ShapeMismatch("received word must be one-dimensional")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def check_domain(self, p: int):
        if self.mode == MEMORY and (np.any(self.values < 0) or np.any(self.values >= p)):
            raise OutOfDomain(f"memory-mode symbols must lie in [0, {p})")

    def __len__(self):
        return len(self.values)


def encode(w, g: GeneratorMatrix) -> np.ndarray:
    """Codeword (natural column order) for information word(s) ``w``.

    ``w`` may be a single length-m word or a ``(batch, m)`` array. The
    information symbols land unchanged on ``g.info_positions``.
    """
    p = g.spec.p
    w = np.mod(np.asarray(w, dtype=np.int64), p)
    if w.shape[-1] != g.m:
        raise ShapeMismatch(f"information word length {w.shape[-1]}, expected {g.m}")
    out = np.empty(w.shape[:-1] + (g.l,), dtype=np.int64)
    out[..., g.info_positions] = w
    out[..., g.parity_positions] = (w @ g.parity) % p
    return out


def _as_values(r, h: CheckMatrix) -> np.ndarray:
    if isinstance(r, ReceivedWord):
        r.check_domain(h.spec.p)
        vals = r.values
    else:
        vals = np.asarray(r)
    if vals.shape[-1] != h.n_cols:
        raise ShapeMismatch(f"word length {vals.shape[-1]}, expected {h.n_cols}")
    return vals


def syndrome(r, h: CheckMatrix) -> np.ndarray:
    """Syndrome entries ``sum_i (r_i mod p) * H[j, i] mod p`` over sparse rows.

    Accepts a :class:`ReceivedWord`, a plain length-l vector, or a
    ``(batch, l)`` array (returns ``(batch, n_rows)``).
    """
    p = h.spec.p
    res = np.mod(_as_values(r, h), p).astype(np.int64)
    cols, coefs, _ = h.row_layout
    return np.sum(res[..., cols] * coefs, axis=-1) % p


def is_clean(s) -> bool:
    """True iff every syndrome entry is zero."""
    return not np.any(s)
