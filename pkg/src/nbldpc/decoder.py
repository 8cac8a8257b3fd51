"""Iterative NB-LDPC decoder over GF(p) with integer log-likelihood values.

Each codeword position keeps a length-p vector of integer LLVs (higher means
more likely). One iteration of the flooding schedule:

1. every variable node (VN) sends its LLVs to its check nodes (CNs), with
   the candidate index scaled by the edge coefficient so that the CN sees
   the symbol ``h * c``;
2. each CN runs forward-backward propagation: max-plus convolutions chained
   left to right (forward messages) and right to left (backward messages);
   edge ``i`` gets the combination of everything except its own input,
   reflected to ``-sum``, which is the value the check demands of it;
3. the answers are un-scaled and added to the VN priors; the argmax is the
   new hard decision and the iteration stops once every check is satisfied.

All LLV helpers act on the last axis, so they accept a single vector or any
stack of vectors.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .code_builder import CheckMatrix
from .codec import MEMORY, PIM, ReceivedWord
from .errors import DegreeMismatch, OutOfDomain, ShapeMismatch, ZeroCoefficient
from .gfp import FieldSpec

TEMPORAL = "temporal"
EXTRINSIC = "extrinsic"


@dataclass(frozen=True)
class DecoderConfig:
    max_iters: int = 16
    l_max: int = 63
    # "temporal": VNs forward their full updated LLVs to every CN.
    # "extrinsic": VNs subtract the target CN's previous answer first.
    vn_messages: str = TEMPORAL

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.l_max < 1:
            raise ValueError("l_max must be >= 1")
        if self.vn_messages not in (TEMPORAL, EXTRINSIC):
            raise ValueError(f"vn_messages must be {TEMPORAL!r} or {EXTRINSIC!r}")


@dataclass
class DecodeResult:
    corrected_symbols: np.ndarray
    corrected_integers: np.ndarray | None
    iterations_used: int
    converged: bool


@dataclass
class BatchDecodeResult:
    """Per-frame results of :meth:`Decoder.decode_batch` (leading axis = frame)."""

    symbols: np.ndarray
    integers: np.ndarray | None
    iterations: np.ndarray
    converged: np.ndarray

    def __getitem__(self, i) -> DecodeResult:
        ints = None if self.integers is None else self.integers[i]
        return DecodeResult(self.symbols[i], ints, int(self.iterations[i]),
                            bool(self.converged[i]))


# ---------------------------------------------------------------------------
# LLV primitives


def init_llvs(values, spec: FieldSpec) -> np.ndarray:
    """Prior LLVs: ``llv[..., k] = -residue_distance(y, k)``."""
    if isinstance(values, ReceivedWord):
        values.check_domain(spec.p)
        values = values.values
    y = np.asarray(values, dtype=np.int64)[..., None]
    return -spec.residue_distance(y, np.arange(spec.p))


def certain(symbol: int, spec: FieldSpec, l_max: int = 63) -> np.ndarray:
    """LLV vector asserting ``symbol`` with full confidence."""
    v = np.full(spec.p, -l_max, dtype=np.int64)
    v[symbol] = 0
    return v


def normalize(v, l_max: int):
    """Shift so that ``v[..., 0] == 0``, then clip to ``[-l_max, l_max]``."""
    v = np.asarray(v)
    return np.clip(v - v[..., :1], -l_max, l_max)


def maxplus(a, b) -> np.ndarray:
    """Cyclic max-plus convolution ``out[k] = max_j a[k - j] + b[j]``."""
    a = np.asarray(a)
    b = np.asarray(b)
    p = a.shape[-1]
    out = a + b[..., :1]
    for j in range(1, p):
        np.maximum(out, np.roll(a, j, axis=-1) + b[..., j:j + 1], out=out)
    return out


def llv_combine(a, b, spec: FieldSpec, l_max: int = 63) -> np.ndarray:
    """Log-domain "sum" of two symbol beliefs, normalized and saturated."""
    a = np.asarray(a)
    if a.shape[-1] != spec.p or np.shape(b)[-1] != spec.p:
        raise ShapeMismatch(f"LLV vectors must have length {spec.p}")
    return normalize(maxplus(a, b), l_max)


def reflect(v) -> np.ndarray:
    """``out[k] = v[-k mod p]``: belief in ``x`` becomes belief in ``-x``."""
    v = np.asarray(v)
    p = v.shape[-1]
    return v[..., (-np.arange(p)) % p]


def _scale_index(h: int, spec: FieldSpec) -> np.ndarray:
    if h % spec.p == 0:
        raise ZeroCoefficient("edge coefficient must be nonzero")
    return (np.arange(spec.p) * h) % spec.p


def permute_to_cn(v, h: int, spec: FieldSpec) -> np.ndarray:
    """``out[k * h mod p] = v[k]``: belief in ``c`` becomes belief in ``h * c``."""
    v = np.asarray(v)
    out = np.empty_like(v)
    out[..., _scale_index(h, spec)] = v
    return out


def permute_from_cn(v, h: int, spec: FieldSpec) -> np.ndarray:
    """``out[k] = v[k * h mod p]``; inverse of :func:`permute_to_cn`."""
    return np.asarray(v)[..., _scale_index(h, spec)]


def cn_process(incoming, spec: FieldSpec, l_max: int = 63) -> np.ndarray:
    """Forward-backward propagation inside one check node.

    ``incoming`` is a ``(..., D_C, p)`` array already in the CN domain. Returns
    the same shape; row ``i`` depends on every input row except ``i``.
    """
    x = np.asarray(incoming)
    if x.ndim < 2 or x.shape[-1] != spec.p:
        raise ShapeMismatch(f"expected (..., D_C, {spec.p}) LLVs, got {x.shape}")
    d = x.shape[-2]
    if d < 2:
        raise DegreeMismatch(f"check node degree must be >= 2, got {d}")
    return _fbp(np.moveaxis(x, -2, 0), l_max, out_axis=x.ndim - 2)


def _fbp(x, l_max, out_axis=0):
    """FBP over edges stacked on axis 0; the output edge axis goes to ``out_axis``."""
    d = x.shape[0]
    # fwd[i] covers inputs 0..i, bwd[i] covers inputs d-1-i..d-1
    fwd = [normalize(x[0], l_max)]
    bwd = [normalize(x[d - 1], l_max)]
    for i in range(1, d - 1):
        fwd.append(normalize(maxplus(fwd[-1], x[i]), l_max))
        bwd.append(normalize(maxplus(bwd[-1], x[d - 1 - i]), l_max))
    out = np.empty_like(x)
    out[0] = bwd[d - 2]
    out[d - 1] = fwd[d - 2]
    for i in range(1, d - 1):
        out[i] = normalize(maxplus(fwd[i - 1], bwd[d - 2 - i]), l_max)
    out = reflect(out)
    out = normalize(out, l_max)
    return np.moveaxis(out, 0, out_axis)


def cn_local_check(hard, spec: FieldSpec) -> bool:
    """True iff CN-domain hard decisions sum to zero mod p."""
    return int(np.sum(np.asarray(hard, dtype=np.int64))) % spec.p == 0


def vn_update(prior, extrinsics, l_max: int = 63) -> np.ndarray:
    """Prior plus the plain sum of all incoming CN answers, normalized."""
    total = np.asarray(prior) + np.sum(np.asarray(extrinsics), axis=-2)
    return normalize(total, l_max)


def hard_decision(temporal) -> np.ndarray | int:
    """Argmax per LLV vector; ties go to the smallest symbol."""
    out = np.argmax(np.asarray(temporal), axis=-1)
    return int(out) if np.ndim(out) == 0 else out


def interpret_integer(y, k, spec: FieldSpec):
    """The integer congruent to ``k`` nearest to ``y``."""
    return spec.interpret(y, k)


# ---------------------------------------------------------------------------
# graph decoder


class Decoder:
    """Flooding-schedule decoder bound to one check matrix.

    Index tables for the edge permutations and the CN/VN message layouts
    are built once; :meth:`decode_batch` then runs independent frames in
    lockstep, retiring each frame as soon as its syndrome clears.
    """

    def __init__(self, h: CheckMatrix, config: DecoderConfig | None = None):
        self.h = h
        self.spec = h.spec
        self.config = config or DecoderConfig()
        p = self.spec.p
        cols, coefs, mask = h.row_layout
        self.cols, self.coefs, self.mask = cols, coefs, mask
        n_rows, width = cols.shape
        inv = self.spec.inverse_table()
        k = np.arange(p)
        safe = np.where(mask, coefs, 1)
        # VN -> CN: out[j] = v[j * h^-1]; CN -> VN: out[k] = v[k * h]
        self.to_cn = (k * inv[safe][..., None]) % p
        self.from_cn = (k * safe[..., None]) % p
        # VN view: flat CN-slot indices feeding each column, padded with a
        # sentinel slot that always holds zeros
        flat = np.flatnonzero(mask.ravel())
        flat_cols = cols.ravel()[flat]
        order = np.argsort(flat_cols, kind="stable")
        degs = np.bincount(flat_cols, minlength=h.n_cols)
        if np.any(degs == 0):
            raise ShapeMismatch("check matrix has an all-zero column")
        sentinel = n_rows * width
        vn_slots = np.full((h.n_cols, degs.max()), sentinel, dtype=np.int64)
        starts = np.concatenate([[0], np.cumsum(degs)[:-1]])
        for pos, e in enumerate(order):
            c = flat_cols[e]
            vn_slots[c, pos - starts[c]] = flat[e]
        self.vn_slots = vn_slots
        # FBP runs per group of equal-degree checks, so no padding enters it
        row_deg = mask.sum(axis=1)
        if np.any(row_deg < 2):
            raise DegreeMismatch("every check node needs degree >= 2")
        self.degree_groups = [(int(d), np.flatnonzero(row_deg == d))
                              for d in np.unique(row_deg)]

    def decode(self, r, trace=None) -> DecodeResult:
        """Decode one :class:`ReceivedWord` (or plain memory-mode vector).

        ``trace``, if given, is a text stream receiving JSON lines with the
        LLVs exchanged in every iteration.
        """
        if not isinstance(r, ReceivedWord):
            r = ReceivedWord(r, MEMORY)
        if len(r) != self.h.n_cols:
            raise ShapeMismatch(f"word length {len(r)}, expected {self.h.n_cols}")
        r.check_domain(self.spec.p)
        res = self.decode_batch(r.values[None, :], mode=r.mode, trace=trace)
        return res[0]

    def decode_batch(self, values, mode: str = MEMORY, trace=None) -> BatchDecodeResult:
        values = np.asarray(values, dtype=np.int64)
        if values.ndim != 2 or values.shape[1] != self.h.n_cols:
            raise ShapeMismatch(f"expected (batch, {self.h.n_cols}) values, got {values.shape}")
        if mode == MEMORY and (np.any(values < 0) or np.any(values >= self.spec.p)):
            raise OutOfDomain(f"memory-mode symbols must lie in [0, {self.spec.p})")
        cfg = self.config
        p, l_max = self.spec.p, cfg.l_max
        n_frames = values.shape[0]
        n_rows, width = self.cols.shape

        prior = init_llvs(values, self.spec).astype(np.int32)
        symbols = hard_decision(prior)
        iterations = np.zeros(n_frames, dtype=np.int64)
        converged = ~self._syndrome(symbols).any(axis=1)
        if trace is not None:
            _trace(trace, 0, "vn", prior[0])

        active = np.flatnonzero(~converged)
        temporal = prior[active]
        c2v = None  # previous CN -> VN answers, VN domain, (B, R, W, p)
        to_cn = self.to_cn[None]
        from_cn = self.from_cn[None]
        pad_mask = ~self.mask[None, :, :, None]
        for it in range(1, cfg.max_iters + 1):
            if active.size == 0:
                break
            msg = temporal[:, self.cols, :]
            if cfg.vn_messages == EXTRINSIC and c2v is not None:
                msg = normalize(msg - c2v, l_max)
            msg = np.take_along_axis(msg, np.broadcast_to(to_cn, msg.shape), axis=-1)
            ans = np.zeros_like(msg)
            for d, rows in self.degree_groups:
                group = np.moveaxis(msg[:, rows, :d], 2, 0)
                ans[:, rows, :d] = _fbp(group, l_max, out_axis=2)
            ans = np.take_along_axis(ans, np.broadcast_to(from_cn, ans.shape), axis=-1)
            ans = np.where(pad_mask, 0, ans).astype(np.int32)
            c2v = ans
            slots = np.concatenate(
                [ans.reshape(len(active), n_rows * width, p),
                 np.zeros((len(active), 1, p), dtype=np.int32)], axis=1)
            temporal = normalize(prior[active] + slots[:, self.vn_slots].sum(axis=2), l_max)
            temporal = temporal.astype(np.int32)
            hard = hard_decision(temporal)
            if trace is not None and n_frames == 1:
                _trace(trace, it, "cn", ans[0][self.mask])
                _trace(trace, it, "vn", temporal[0])
            symbols[active] = hard
            iterations[active] = it
            done = ~self._syndrome(hard).any(axis=1)
            if done.any():
                converged[active[done]] = True
                keep = ~done
                active = active[keep]
                temporal = temporal[keep]
                c2v = c2v[keep]

        integers = None
        if mode == PIM:
            integers = interpret_integer(values, symbols, self.spec)
        return BatchDecodeResult(symbols, integers, iterations, converged)

    def _syndrome(self, hard):
        return np.sum(hard[:, self.cols] * self.coefs, axis=-1) % self.spec.p


def decode(r, code, config: DecoderConfig | None = None, trace=None) -> DecodeResult:
    """Decode one received word with a ``(generator, check matrix)`` pair or a bare check matrix."""
    h = code[1] if isinstance(code, tuple) else code
    return Decoder(h, config).decode(r, trace=trace)


def _trace(fh, iteration, node, llvs):
    for idx, v in enumerate(np.asarray(llvs)):
        fh.write(json.dumps({"iteration": iteration, "node": node, "index": idx,
                             "llv": [int(x) for x in v]}) + "\n")
