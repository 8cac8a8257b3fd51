"""Construction of sparse NB-LDPC check matrices and matched generators.

Check matrices are grown with progressive edge growth (PEG): each new edge of
a variable node goes to the lowest-degree check node that is as far away as
possible in the current Tanner graph. Nonzero coefficients are drawn
uniformly from ``{1, ..., p-1}``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InfeasibleDegrees, RankDeficient, ShapeMismatch
from .gfp import FieldSpec

logger = logging.getLogger(__name__)

CONSTRUCTION_NAME = "peg-uniform"

DV_TYPICAL = range(2, 5)
DC_TYPICAL = range(6, 19)


@dataclass(frozen=True)
class CodeParams:
    spec: FieldSpec
    l: int
    m: int
    d_v: int
    d_c: int
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.m < self.l:
            raise ValueError(f"need 0 < m < l, got m={self.m}, l={self.l}")

    @property
    def rate(self) -> float:
        return self.m / self.l

    @property
    def n_checks(self) -> int:
        return self.l - self.m

    @property
    def atypical_degrees(self) -> bool:
        """True when degrees fall outside the usual hardware ranges (2..4, 6..18)."""
        return self.d_v not in DV_TYPICAL or self.d_c not in DC_TYPICAL

    @property
    def edge_balance(self) -> int:
        """Slack between row capacity and required edges, ``d_c*(l-m) - l*d_v``."""
        return self.d_c * self.n_checks - self.l * self.d_v

    def reseeded(self, seed: int) -> "CodeParams":
        return CodeParams(self.spec, self.l, self.m, self.d_v, self.d_c, seed)


@dataclass(frozen=True, eq=False)
class CheckMatrix:
    """Sparse check matrix H_C over GF(p).

    ``rows[j]`` is a sorted tuple of ``(column, coefficient)`` pairs with
    0-based columns and nonzero coefficients.
    """

    spec: FieldSpec
    n_rows: int
    n_cols: int
    rows: tuple
    girth: int | None = None  # None: no cycles found
    construction: str = CONSTRUCTION_NAME
    seed: int | None = None

    def __post_init__(self):
        if len(self.rows) != self.n_rows:
            raise ShapeMismatch(f"{len(self.rows)} rows given, n_rows={self.n_rows}")
        p = self.spec.p
        for j, row in enumerate(self.rows):
            cols = [c for c, _ in row]
            if cols != sorted(set(cols)):
                raise ValueError(f"row {j}: columns must be sorted and unique")
            for c, v in row:
                if not 0 <= c < self.n_cols:
                    raise ValueError(f"row {j}: column {c} out of range")
                if not 0 < v < p:
                    raise ValueError(f"row {j}: coefficient {v} not a nonzero residue")

    @property
    def n_edges(self) -> int:
        return sum(len(r) for r in self.rows)

    @property
    def row_degrees(self) -> list[int]:
        return [len(r) for r in self.rows]

    @property
    def col_degrees(self) -> list[int]:
        deg = [0] * self.n_cols
        for row in self.rows:
            for c, _ in row:
                deg[c] += 1
        return deg

    def edges(self):
        """Edge arrays ``(row, col, coef)`` ordered by row, then column."""
        r, c, v = [], [], []
        for j, row in enumerate(self.rows):
            for col, coef in row:
                r.append(j)
                c.append(col)
                v.append(coef)
        return (np.array(r, dtype=np.int64), np.array(c, dtype=np.int64),
                np.array(v, dtype=np.int64))

    @cached_property
    def row_layout(self):
        """Padded ``(n_rows, max_row_degree)`` column and coefficient arrays.

        Padding slots carry column 0 and coefficient 0, plus a False mask.
        """
        width = max(self.row_degrees, default=0)
        cols = np.zeros((self.n_rows, width), dtype=np.int64)
        coefs = np.zeros((self.n_rows, width), dtype=np.int64)
        mask = np.zeros((self.n_rows, width), dtype=bool)
        for j, row in enumerate(self.rows):
            for t, (c, v) in enumerate(row):
                cols[j, t], coefs[j, t], mask[j, t] = c, v, True
        for a in (cols, coefs, mask):
            a.setflags(write=False)
        return cols, coefs, mask

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.n_rows, self.n_cols), dtype=np.int64)
        for j, row in enumerate(self.rows):
            for c, v in row:
                h[j, c] = v
        return h

    @classmethod
    def from_dense(cls, spec: FieldSpec, h, **kw) -> "CheckMatrix":
        h = np.mod(np.asarray(h, dtype=np.int64), spec.p)
        rows = tuple(tuple((int(c), int(h[j, c])) for c in np.flatnonzero(h[j]))
                     for j in range(h.shape[0]))
        return cls(spec, h.shape[0], h.shape[1], rows, **kw)

    def __eq__(self, other):
        if not isinstance(other, CheckMatrix):
            return NotImplemented
        return (self.spec == other.spec and self.n_rows == other.n_rows
                and self.n_cols == other.n_cols and self.rows == other.rows)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GeneratorMatrix:
    """Systematic generator ``[I | P]`` with a column permutation.

    ``perm`` lists the natural (check-matrix) column of every codeword
    position in systematic order: ``perm[:m]`` hold the information symbols,
    ``perm[m:]`` the parity symbols. ``parity`` is the dense ``m x (l-m)``
    block P.
    """

    spec: FieldSpec
    m: int
    l: int
    parity: np.ndarray
    perm: np.ndarray = field(default=None)

    def __post_init__(self):
        parity = np.mod(np.asarray(self.parity, dtype=np.int64), self.spec.p)
        if parity.shape != (self.m, self.l - self.m):
            raise ShapeMismatch(f"parity block shape {parity.shape}, "
                                f"expected {(self.m, self.l - self.m)}")
        parity.setflags(write=False)
        object.__setattr__(self, "parity", parity)
        perm = np.arange(self.l) if self.perm is None else np.asarray(self.perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.l)):
            raise ValueError("perm is not a permutation of range(l)")
        perm.setflags(write=False)
        object.__setattr__(self, "perm", perm)

    @property
    def info_positions(self) -> np.ndarray:
        return self.perm[:self.m]

    @property
    def parity_positions(self) -> np.ndarray:
        return self.perm[self.m:]

    def to_dense(self) -> np.ndarray:
        """Full ``m x l`` generator in natural column order."""
        g = np.zeros((self.m, self.l), dtype=np.int64)
        g[np.arange(self.m), self.info_positions] = 1
        g[:, self.parity_positions] = self.parity
        return g

    def __eq__(self, other):
        if not isinstance(other, GeneratorMatrix):
            return NotImplemented
        return (self.spec == other.spec and self.m == other.m and self.l == other.l
                and np.array_equal(self.parity, other.parity)
                and np.array_equal(self.perm, other.perm))

    __hash__ = None


def build_check_matrix(params: CodeParams) -> CheckMatrix:
    """Grow a check matrix edge by edge with PEG.

    Every column receives exactly ``d_v`` edges; a row never exceeds ``d_c``
    edges. Ties between equally distant, equally loaded check nodes are
    broken uniformly at random from ``params.seed``.
    """
    l, n_rows, d_v, d_c = params.l, params.n_checks, params.d_v, params.d_c
    if d_v < 1 or d_c < 1:
        raise InfeasibleDegrees(f"degrees must be positive (d_v={d_v}, d_c={d_c})")
    if d_v > n_rows:
        raise InfeasibleDegrees(f"d_v={d_v} exceeds the {n_rows} available check nodes")
    if params.edge_balance < 0:
        raise InfeasibleDegrees(
            f"{n_rows} checks of degree <= {d_c} cannot host {l}*{d_v} edges")
    if params.atypical_degrees:
        logger.warning("degrees d_v=%d, d_c=%d are outside the typical ranges", d_v, d_c)

    rng = np.random.default_rng(params.seed)
    p = params.spec.p
    adj = np.zeros((n_rows, l), dtype=bool)
    row_deg = np.zeros(n_rows, dtype=np.int64)
    girth = math.inf

    for j in range(l):
        for k in range(d_v):
            avail = row_deg < d_c
            avail &= ~adj[:, j]
            if not avail.any():
                raise InfeasibleDegrees(f"no free check node left for column {j}")
            if k == 0:
                candidates, depth = avail, None
            else:
                candidates, depth = _peg_candidates(adj, j, avail)
            pool = np.flatnonzero(candidates)
            loads = row_deg[pool]
            pool = pool[loads == loads.min()]
            c = int(pool[rng.integers(len(pool))])
            if depth is not None and depth[c] >= 0:
                girth = min(girth, 2 * int(depth[c]) + 2)
            adj[c, j] = True
            row_deg[c] += 1

    coef = rng.integers(1, p, size=adj.shape)
    h = np.where(adj, coef, 0)
    return CheckMatrix.from_dense(
        params.spec, h, girth=None if girth == math.inf else int(girth),
        construction=CONSTRUCTION_NAME, seed=params.seed)


def _peg_candidates(adj: np.ndarray, j: int, avail: np.ndarray):
    """Expand the Tanner tree rooted at variable node ``j``.

    Returns the admissible check nodes at maximal distance, plus an array of
    the BFS level at which every check was first reached (-1 if never).
    """
    n_rows, l = adj.shape
    depth = np.full(n_rows, -1, dtype=np.int64)
    reached = adj[:, j].copy()
    depth[reached] = 0
    seen_vars = np.zeros(l, dtype=bool)
    seen_vars[j] = True
    frontier = reached.copy()
    level = 0
    while True:
        if not (avail & ~reached).any():
            # every admissible check is already within reach; take the ones
            # first reached at the deepest level
            return avail & (depth == level), depth
        new_vars = adj[frontier].any(axis=0) & ~seen_vars
        seen_vars |= new_vars
        new_checks = adj[:, new_vars].any(axis=1) & ~reached
        if not new_checks.any():
            return avail & ~reached, depth
        level += 1
        depth[new_checks] = level
        reached |= new_checks
        frontier = new_checks


def derive_generator(h: CheckMatrix) -> GeneratorMatrix:
    """Systematic generator for ``h`` by Gauss-Jordan elimination over GF(p).

    Pivots are searched from the last column backwards so that the natural
    trailing columns become the parity positions whenever they are
    invertible; otherwise earlier columns are swapped in via ``perm``.
    """
    p = h.spec.p
    a = h.to_dense()
    n_rows, l = a.shape
    m = l - n_rows
    inv = h.spec.inverse_table()
    pivot_cols = []
    r = 0
    for col in range(l - 1, -1, -1):
        if r == n_rows:
            break
        nz = np.flatnonzero(a[r:, col])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * inv[a[r, col]]) % p
        others = np.flatnonzero(a[:, col])
        others = others[others != r]
        if others.size:
            a[others] = (a[others] - np.outer(a[others, col], a[r])) % p
        pivot_cols.append(col)
        r += 1
    if r < n_rows:
        raise RankDeficient(f"check matrix rank {r} < {n_rows} rows")

    # row i of `a` now has a 1 in pivot_cols[i] and zeros in other pivots
    pivot_set = set(pivot_cols)
    info_cols = [c for c in range(l) if c not in pivot_set]
    parity_cols = sorted(pivot_cols)
    row_of = {c: i for i, c in enumerate(pivot_cols)}
    order = [row_of[c] for c in parity_cols]
    # c_parity = -A_info c_info  =>  P = -(A_info)^T
    parity = (-a[np.ix_(order, info_cols)].T) % p
    assert parity.shape == (m, n_rows)
    return GeneratorMatrix(h.spec, m, l, parity, np.array(info_cols + parity_cols))


def validate_code_pair(g: GeneratorMatrix, h: CheckMatrix) -> bool:
    """True iff ``H_G . H_C^T`` vanishes mod p (exact integer arithmetic)."""
    if g.spec != h.spec:
        raise ShapeMismatch("generator and check matrix use different fields")
    if g.l != h.n_cols or g.m + h.n_rows != g.l:
        raise ShapeMismatch(
            f"generator {g.m}x{g.l} does not match check matrix {h.n_rows}x{h.n_cols}")
    gd = g.to_dense()
    p = h.spec.p
    for row in h.rows:
        acc = np.zeros(g.m, dtype=np.int64)
        for c, v in row:
            acc += gd[:, c] * v
        if np.any(acc % p):
            return False
    return True


def build_code(params: CodeParams, max_retries: int = 20):
    """Build a validated ``(generator, check matrix)`` pair, reseeding on failure.

    Seeds are ``params.seed``, then ``params.seed + 1``, ... Returns
    ``(g, h, attempts)``; re-raises the last construction error after
    ``max_retries`` attempts.
    """
    last = None
    for attempt in range(max_retries):
        trial = params.reseeded(params.seed + attempt)
        try:
            h = build_check_matrix(trial)
            g = derive_generator(h)
        except (RankDeficient, InfeasibleDegrees) as exc:
            last = exc
            if isinstance(exc, InfeasibleDegrees) and params.edge_balance < 0:
                raise
            logger.info("seed %d failed: %s", trial.seed, exc)
            continue
        if not validate_code_pair(g, h):  # pragma: no cover - derive_generator guarantees this
            last = RankDeficient("derived generator failed validation")
            continue
        return g, h, attempt + 1
    raise last


def default_check_degree(l: int, m: int, d_v: int) -> int:
    """Smallest row degree that can host ``l*d_v`` edges on ``l-m`` checks."""
    return -(-l * d_v // (l - m))
