"""Coset codes with near-linear-time decoding.

The secret ``s`` is restricted to cosets spanned by a sparse matrix ``G1``:
the transmitted word is ``x = s G1 + v G`` for uniform ``v``.  Writing
``w = [v s]`` and ``H_star = [G; G1]`` gives ``x = w H_star``, and decoding
means solving that system for ``w``.

Each column of ``H_star`` is one equation in the unknowns ``w``; the solver
keeps ``n(1 - t)`` of them.  A greedy pass (erasure peeling on the
transposed system) orders most unknowns so that their equations form a
unit-lower-triangular block ``T``; the ``g`` unknowns it cannot place form
the gap.  In the reordered system

    [B T] [U1; U2] = X1        (triangle equations)
    [D E] [U1; U2] = X2        (completion equations)

the gap unknowns satisfy ``(E T^-1 B + D) U1 = E T^-1 X1 + X2``, a dense
``g x g`` solve, and the rest follow by back substitution:
``U2 = T^-1 (X1 + B U1)``.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from . import gf2
from .gf2 import BinaryMatrix, as_bits
from .seeding import make_rng


@dataclass(frozen=True)
class TriangulationResult:
    """Outcome of greedy approximate triangulation of a matrix.

    Diagonal entry ``i`` sits at ``(diag_rows[i], diag_cols[i])``: apart from
    rows in ``gap_rows``, column ``diag_cols[i]`` only touches rows placed at
    or before step ``i``.
    """

    n_rows: int
    n_cols: int
    diag_rows: np.ndarray
    diag_cols: np.ndarray
    gap_rows: np.ndarray

    @property
    def achieved_triangular_columns(self) -> int:
        return int(self.diag_cols.size)

    @property
    def gap(self) -> int:
        return int(self.gap_rows.size)

    @property
    def row_perm(self) -> np.ndarray:
        """Rows in solve order: gap rows first, then diagonal rows."""
        return np.concatenate([self.gap_rows, self.diag_rows])

    @property
    def col_perm(self) -> np.ndarray:
        """Diagonal columns in order, then every other column by index."""
        rest = np.setdiff1d(np.arange(self.n_cols), self.diag_cols)
        return np.concatenate([self.diag_cols, rest])


def greedy_triangulate(m: BinaryMatrix) -> TriangulationResult:
    """Greedy approximate triangulation, one diagonal entry per row of ``m``.

    A column with exactly one live row places that row on the diagonal and
    retires it.  When no such column exists, the live column of smallest
    residual weight (lowest index on ties) is taken: all but the last of its
    live rows move to the gap, and the last one goes on the diagonal.
    """
    n_rows, n_cols = m.shape
    rptr, ridx = m.csr
    cptr, cidx = m.csc
    weight = np.diff(cptr).astype(np.int64)
    alive = np.ones(n_rows, bool)
    used = np.zeros(n_cols, bool)
    ones = deque(np.flatnonzero(weight == 1).tolist())
    heap = [(int(w), int(c)) for c, w in enumerate(weight) if w >= 2]
    heapq.heapify(heap)
    diag_rows: list[int] = []
    diag_cols: list[int] = []
    gap_rows: list[int] = []
    remaining = n_rows

    def retire(r: int) -> None:
        alive[r] = False
        for c in ridx[rptr[r] : rptr[r + 1]].tolist():
            if used[c]:
                continue
            weight[c] -= 1
            w = int(weight[c])
            if w == 1:
                ones.append(c)
            elif w >= 2:
                heapq.heappush(heap, (w, c))

    def live_rows(c: int) -> list[int]:
        rows = cidx[cptr[c] : cptr[c + 1]]
        return rows[alive[rows]].tolist()

    def place(r: int, c: int) -> None:
        used[c] = True
        diag_rows.append(r)
        diag_cols.append(c)
        retire(r)

    while remaining:
        while ones:
            c = ones.popleft()
            if used[c] or weight[c] != 1:
                continue
            place(live_rows(c)[0], c)
            remaining -= 1
        if not remaining:
            break
        chosen = -1
        while heap:
            w, c = heapq.heappop(heap)
            if not used[c] and weight[c] == w:
                chosen = c
                break
        if chosen < 0:
            # Live rows with no usable column left; they can only sit in the gap.
            rest = np.flatnonzero(alive).tolist()
            gap_rows.extend(rest)
            for r in rest:
                alive[r] = False
            remaining = 0
            break
        rows = live_rows(chosen)
        for r in rows[:-1]:
            gap_rows.append(r)
            retire(r)
        place(rows[-1], chosen)
        remaining -= len(rows)
    as_arr = lambda xs: np.asarray(xs, dtype=np.int64)  # noqa: E731
    return TriangulationResult(n_rows, n_cols, as_arr(diag_rows), as_arr(diag_cols), as_arr(gap_rows))


def _block(rows, cols, n_eq: int, n_unk: int, eq_pos, unk_pos) -> BinaryMatrix:
    keep = (eq_pos[cols] >= 0) & (unk_pos[rows] >= 0)
    return BinaryMatrix.from_coords(n_eq, n_unk, eq_pos[cols[keep]], unk_pos[rows[keep]])


@dataclass(frozen=True)
class LtSecrecyCode:
    """Restricted coset code with its precomputed staged solver.

    Block shapes: ``B`` is ``a x g``, ``T`` is ``a x a``, ``D`` is ``g x g``
    and ``E`` is ``g x a`` where ``a`` is the triangle size and ``g`` the gap.
    ``retained_positions`` lists the transmitted positions the decoder reads:
    triangle equations first, then the completion equations.
    """

    G: BinaryMatrix
    G1: BinaryMatrix
    H_star: BinaryMatrix
    triangulation: TriangulationResult
    retained_positions: np.ndarray
    B: BinaryMatrix
    T: BinaryMatrix
    D: BinaryMatrix
    E: BinaryMatrix
    phi_inverse: BinaryMatrix
    unknown_order: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.G.n_cols

    @property
    def secret_bits(self) -> int:
        return self.G1.n_rows

    @property
    def gap(self) -> int:
        return self.triangulation.gap

    @property
    def gap_fraction(self) -> float:
        return self.gap / self.n

    @property
    def r(self) -> Fraction:
        """Rate of the base code ``C``."""
        return 1 - Fraction(self.G.n_rows, self.n)

    @property
    def t(self) -> Fraction:
        """Rate of the code whose parity checks are ``H_star``."""
        return 1 - Fraction(self.H_star.n_rows, self.n)

    @property
    def secrecy_rate(self) -> Fraction:
        return self.r - self.t


def build_lt_code(G: BinaryMatrix, G1: BinaryMatrix) -> LtSecrecyCode:
    """Triangulate ``[G; G1]`` and precompute the staged solver.

    Completion equations are picked greedily by position index among the
    columns outside the triangle, keeping each one that raises the rank, so
    the retained square system is invertible.  Raises ``ValueError`` if the
    stack ``[G; G1]`` does not have full row rank.
    """
    if G.n_cols != G1.n_cols:
        raise ValueError("G and G1 have different lengths")
    H_star = BinaryMatrix.vstack(G, G1)
    n_unk = H_star.n_rows
    tri = greedy_triangulate(H_star)
    a, g = tri.achieved_triangular_columns, tri.gap

    unk_order = tri.row_perm  # gap unknowns, then triangle unknowns
    gap_pos = np.full(n_unk, -1, np.int64)
    gap_pos[tri.gap_rows] = np.arange(g)
    tri_pos = np.full(n_unk, -1, np.int64)
    tri_pos[tri.diag_rows] = np.arange(a)
    eq_tri = np.full(H_star.n_cols, -1, np.int64)
    eq_tri[tri.diag_cols] = np.arange(a)

    rows, cols = H_star.rows, H_star.cols
    T = _block(rows, cols, a, a, eq_tri, tri_pos)
    B = _block(rows, cols, a, g, eq_tri, gap_pos)

    candidates = np.setdiff1d(np.arange(H_star.n_cols), tri.diag_cols)
    eq_cand = np.full(H_star.n_cols, -1, np.int64)
    eq_cand[candidates] = np.arange(candidates.size)
    D_all = _block(rows, cols, candidates.size, g, eq_cand, gap_pos)
    E_all = _block(rows, cols, candidates.size, a, eq_cand, tri_pos)

    if g:
        tptr, tidx = T.csr
        Z = _kernels.lower_solve_packed(tptr, tidx, np.array(B.packed))
        eptr, eidx = E_all.csr
        phi_all = BinaryMatrix(
            candidates.size, g, packed=D_all.packed ^ _kernels.gather_xor_rows(eptr, eidx, Z)
        )
        chosen = gf2.independent_rows(phi_all)[:g]
        if chosen.size < g:
            raise ValueError(
                f"[G; G1] is rank deficient: only {a + chosen.size} of {n_unk} unknowns determined"
            )
        phi_inverse = gf2.inverse(phi_all.select_rows(chosen))
    else:
        chosen = np.zeros(0, np.int64)
        phi_inverse = BinaryMatrix.zeros(0, 0)
    extra = candidates[chosen]
    D = _select_block_rows(D_all, chosen)
    E = _select_block_rows(E_all, chosen)
    return LtSecrecyCode(
        G=G,
        G1=G1,
        H_star=H_star,
        triangulation=tri,
        retained_positions=np.concatenate([tri.diag_cols, extra]),
        B=B,
        T=T,
        D=D,
        E=E,
        phi_inverse=phi_inverse,
        unknown_order=unk_order,
    )


def _select_block_rows(m: BinaryMatrix, rows: np.ndarray) -> BinaryMatrix:
    pos = np.full(m.n_rows, -1, np.int64)
    pos[rows] = np.arange(rows.size)
    keep = pos[m.rows] >= 0
    return BinaryMatrix.from_coords(rows.size, m.n_cols, pos[m.rows[keep]], m.cols[keep])


def lt_encode(code: LtSecrecyCode, s, seed) -> np.ndarray:
    """``s G1 + v G`` with ``v`` drawn uniformly from ``seed``."""
    s = as_bits(s, code.secret_bits)
    v = make_rng(seed).integers(0, 2, code.G.n_rows, dtype=np.uint8)
    return gf2.vec_mat(s, code.G1) ^ gf2.vec_mat(v, code.G)


def _count_mat_vec(m: BinaryMatrix, v, ops):
    if ops is not None:
        ops["sparse"] = ops.get("sparse", 0) + m.nnz
    return gf2.mat_vec(m, v)


def lt_decode(code: LtSecrecyCode, x, *, ops: dict | None = None, check: bool = True) -> np.ndarray:
    """Recover the secret from a noiselessly received word.

    ``ops``, when given, accumulates the work done: ``sparse`` counts ones of
    the sparse blocks touched and ``dense`` the bits of the gap inverse used.
    With ``check`` the recovered unknowns are re-encoded on the retained
    positions and compared against the input.
    """
    x = as_bits(x, code.n)
    a, g = code.triangulation.achieved_triangular_columns, code.gap
    x1 = x[code.triangulation.diag_cols]
    x2 = x[code.retained_positions[a:]]
    tptr, tidx = code.T.csr
    if ops is not None:
        ops["sparse"] = ops.get("sparse", 0) + code.T.nnz
    if g:
        y2 = _count_mat_vec(code.E, _kernels.lower_solve(tptr, tidx, x1), ops) ^ x2
        if ops is not None:
            ops["dense"] = ops.get("dense", 0) + g * g
        u1 = gf2.dense_mat_vec(code.phi_inverse, y2)
        rhs = x1 ^ _count_mat_vec(code.B, u1, ops)
        if ops is not None:
            ops["sparse"] = ops.get("sparse", 0) + code.T.nnz
        u2 = _kernels.lower_solve(tptr, tidx, rhs)
    else:
        u1 = np.zeros(0, np.uint8)
        u2 = _kernels.lower_solve(tptr, tidx, x1)
    w = np.empty(code.H_star.n_rows, np.uint8)
    w[code.unknown_order] = np.concatenate([u1, u2])
    if check:
        kept = code.retained_positions
        again = gf2.vec_mat(w, code.H_star)[kept]
        if not np.array_equal(again, x[kept]):
            raise AssertionError("staged solve does not reproduce the received word")
    return w[code.G.n_rows :]


def direct_decode(code: LtSecrecyCode, x) -> np.ndarray:
    """Reference decoder: Gaussian elimination on ``w H_star = x``."""
    sol = gf2.solve(code.H_star.T, as_bits(x, code.n))
    if sol is None:
        raise ValueError("word is not a valid transmission")
    return sol.particular[code.G.n_rows :]
