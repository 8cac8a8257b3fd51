"""Reading and writing code files (extended alist, text).

Layout::

    # construction=peg-uniform seed=7 girth=6     (optional comment lines)
    p l n_rows
    max_col_deg max_row_deg
    <l column degrees>
    <n_rows row degrees>
    <one line per row: col:val pairs, 1-based columns>
    perm
    <l-entry column permutation, 1-based>
    G
    <m lines of l-m parity residues>
    crc32 <hex>

The CRC-32 covers every byte before the ``crc32`` line. Loading checks
syntax and checksum only; ``validate_code_pair`` is a separate step.
"""
from __future__ import annotations

import os
import zlib

import numpy as np

from .code_builder import CheckMatrix, GeneratorMatrix
from .errors import ChecksumMismatch, ParseError, ShapeMismatch
from .gfp import FieldSpec


def dumps_code(g: GeneratorMatrix, h: CheckMatrix) -> str:
    if g.spec != h.spec or g.l != h.n_cols or g.m + h.n_rows != g.l:
        raise ShapeMismatch("generator and check matrix do not belong together")
    col_deg, row_deg = h.col_degrees, h.row_degrees
    girth = "none" if h.girth is None else h.girth
    lines = [
        f"# construction={h.construction} seed={h.seed} girth={girth}",
        f"{h.spec.p} {h.n_cols} {h.n_rows}",
        f"{max(col_deg, default=0)} {max(row_deg, default=0)}",
        " ".join(map(str, col_deg)),
        " ".join(map(str, row_deg)),
    ]
    for row in h.rows:
        lines.append(" ".join(f"{c + 1}:{v}" for c, v in row))
    lines.append("perm")
    lines.append(" ".join(str(int(c) + 1) for c in g.perm))
    lines.append("G")
    for prow in g.parity:
        lines.append(" ".join(map(str, prow.tolist())))
    body = "\n".join(lines) + "\n"
    return body + f"crc32 {zlib.crc32(body.encode()):08x}\n"


def save_code(g: GeneratorMatrix, h: CheckMatrix, path) -> None:
    text = dumps_code(g, h)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(text)
    os.replace(tmp, path)


def load_code(path):
    """Parse a code file into ``(GeneratorMatrix, CheckMatrix)``.

    Raises :class:`ParseError` (with line/column) on malformed content and
    :class:`ChecksumMismatch` when the trailing CRC does not match.
    """
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        text = fh.read()
    return loads_code(text)


class _Lines:
    """Cursor over non-comment lines that remembers physical line numbers."""

    def __init__(self, lines):
        self.items = [(i + 1, ln) for i, ln in enumerate(lines)
                      if ln.strip() and not ln.lstrip().startswith("#")]
        self.pos = 0
        self.meta = {}
        for ln in lines:
            if ln.lstrip().startswith("#"):
                for tok in ln.lstrip("# ").split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        self.meta[k] = v

    def next(self, what):
        if self.pos >= len(self.items):
            last = self.items[-1][0] if self.items else 0
            raise ParseError(f"unexpected end of file, expected {what}", line=last + 1)
        self.pos += 1
        return self.items[self.pos - 1]

    def ints(self, what, count=None):
        lineno, ln = self.next(what)
        out = []
        col = 1
        for tok in ln.split():
            col = ln.index(tok, col - 1) + 1
            try:
                out.append(int(tok))
            except ValueError:
                raise ParseError(f"expected integer in {what}, got {tok!r}",
                                 line=lineno, column=col) from None
            col += len(tok)
        if count is not None and len(out) != count:
            raise ParseError(f"{what}: expected {count} entries, found {len(out)}", line=lineno)
        return lineno, out


def loads_code(text: str):
    lines = text.splitlines()
    crc_idx = None
    for i in range(len(lines) - 1, -1, -1):
        if lines[i].strip():
            crc_idx = i
            break
    if crc_idx is None or not lines[crc_idx].startswith("crc32 "):
        raise ParseError("missing trailing crc32 line",
                         line=(crc_idx + 1) if crc_idx is not None else 1)
    stated = lines[crc_idx].split()[1] if len(lines[crc_idx].split()) == 2 else ""
    body = "".join(ln + "\n" for ln in lines[:crc_idx])
    try:
        stated_val = int(stated, 16)
    except ValueError:
        raise ParseError(f"bad crc32 value {stated!r}", line=crc_idx + 1, column=7) from None
    actual = zlib.crc32(body.encode())
    if stated_val != actual:
        raise ChecksumMismatch(f"crc32 {stated} does not match content ({actual:08x})")

    cur = _Lines(lines[:crc_idx])
    lineno, head = cur.ints("header 'p l n_rows'", 3)
    p, l, n_rows = head
    try:
        spec = FieldSpec(p)
    except ValueError as exc:
        raise ParseError(str(exc), line=lineno) from None
    if not 0 < n_rows < l:
        raise ParseError(f"need 0 < n_rows < l, got n_rows={n_rows}, l={l}", line=lineno)
    m = l - n_rows
    _, maxdeg = cur.ints("max degrees", 2)
    col_ln, col_deg = cur.ints("column degrees", l)
    row_ln, row_deg = cur.ints("row degrees", n_rows)

    rows = []
    for j in range(n_rows):
        lineno, ln = cur.next(f"check row {j + 1}")
        entries = []
        pos = 0
        for tok in ln.split():
            pos = ln.index(tok, pos)
            try:
                c_s, v_s = tok.split(":")
                c, v = int(c_s), int(v_s)
            except ValueError:
                raise ParseError(f"expected col:val, got {tok!r}",
                                 line=lineno, column=pos + 1) from None
            if not 1 <= c <= l:
                raise ParseError(f"column {c} out of range 1..{l}", line=lineno, column=pos + 1)
            if not 1 <= v < p:
                raise ParseError(f"coefficient {v} out of range 1..{p - 1}",
                                 line=lineno, column=pos + 1)
            entries.append((c - 1, v))
            pos += len(tok)
        entries.sort()
        if len({c for c, _ in entries}) != len(entries):
            raise ParseError("duplicate column in row", line=lineno)
        if len(entries) != row_deg[j]:
            raise ParseError(f"row {j + 1} has {len(entries)} entries, "
                             f"row degree list says {row_deg[j]}", line=lineno)
        rows.append(tuple(entries))

    h = CheckMatrix(spec, n_rows, l, tuple(rows),
                    girth=_meta_int(cur.meta.get("girth")),
                    construction=cur.meta.get("construction", "unknown"),
                    seed=_meta_int(cur.meta.get("seed")))
    if h.col_degrees != col_deg:
        raise ParseError("column degree list disagrees with row entries", line=col_ln)
    if [max(col_deg, default=0), max(row_deg, default=0)] != maxdeg:
        raise ParseError("max degree line disagrees with degree lists", line=col_ln - 1)

    lineno, ln = cur.next("'perm'")
    if ln.strip() != "perm":
        raise ParseError(f"expected 'perm', got {ln.strip()!r}", line=lineno)
    lineno, perm = cur.ints("permutation", l)
    if sorted(perm) != list(range(1, l + 1)):
        raise ParseError("perm is not a permutation of 1..l", line=lineno)

    lineno, ln = cur.next("'G'")
    if ln.strip() != "G":
        raise ParseError(f"expected 'G', got {ln.strip()!r}", line=lineno)
    parity = np.zeros((m, n_rows), dtype=np.int64)
    for i in range(m):
        lineno, vals = cur.ints(f"generator row {i + 1}", n_rows)
        if any(not 0 <= v < p for v in vals):
            raise ParseError(f"generator entries must lie in 0..{p - 1}", line=lineno)
        parity[i] = vals
    if cur.pos != len(cur.items):
        raise ParseError("trailing content after generator section", line=cur.items[cur.pos][0])
    g = GeneratorMatrix(spec, m, l, parity, np.array(perm) - 1)
    return g, h


def _meta_int(v):
    try:
        return int(v)
    except (TypeError, ValueError):
        return None
