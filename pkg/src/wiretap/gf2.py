"""Linear algebra over GF(2).

Matrices are held as :class:`BinaryMatrix`, which keeps a bit-packed dense
form (``uint64`` words, 64 columns per word) and a sorted coordinate form
side by side, building whichever one is missing on first use.  Bit vectors
are plain 1-D ``uint8`` numpy arrays of zeros and ones.

Elimination is deterministic: pivots are taken at the first nonzero entry in
column order, so every derived object (complements, syndrome formers,
solvers) is reproducible from the input matrix alone.
"""

from __future__ import annotations

from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import _kernels

WORD = 64


def _n_words(n_cols: int) -> int:
    return max(1, -(-n_cols // WORD))


def pack_rows(a: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into ``uint64`` words along its rows."""
    a = np.ascontiguousarray(a, dtype=np.uint8)
    n_rows, n_cols = a.shape
    width = _n_words(n_cols) * WORD
    padded = np.zeros((n_rows, width), dtype=np.uint8)
    padded[:, :n_cols] = a
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack_rows(packed: np.ndarray, n_cols: int) -> np.ndarray:
    """Inverse of :func:`pack_rows`."""
    as_bytes = np.ascontiguousarray(packed, dtype="<u8").view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :n_cols]


def as_bits(v, length: int | None = None) -> np.ndarray:
    """Validate and return ``v`` as a ``uint8`` bit vector."""
    arr = np.asarray(v)
    if arr.ndim != 1:
        raise ValueError("bit vectors are one-dimensional")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("bit vectors hold only 0 and 1")
    if length is not None and arr.shape[0] != length:
        raise ValueError(f"expected a bit vector of length {length}, got {arr.shape[0]}")
    return arr.astype(np.uint8, copy=False)


class BinaryMatrix:
    """Immutable matrix over GF(2).

    Build with :meth:`from_dense`, :meth:`from_coords`, :meth:`zeros` or
    :meth:`identity`.  ``packed`` (dense words) and ``rows``/``cols``
    (coordinates of the ones, sorted row-major) are both always available.
    """

    __slots__ = ("n_rows", "n_cols", "_packed", "_coords", "__dict__")

    def __init__(self, n_rows: int, n_cols: int, *, packed=None, coords=None):
        if packed is None and coords is None:
            raise ValueError("need packed rows or coordinates")
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self._packed = packed
        self._coords = coords
        if packed is not None:
            packed.setflags(write=False)
        if coords is not None:
            for arr in coords:
                arr.setflags(write=False)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_dense(cls, a) -> BinaryMatrix:
        arr = np.asarray(a)
        if arr.ndim != 2:
            raise ValueError("dense input must be two-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() > 1):
            raise ValueError("entries must be 0 or 1")
        return cls(arr.shape[0], arr.shape[1], packed=pack_rows(arr))

    @classmethod
    def from_coords(cls, n_rows: int, n_cols: int, rows, cols) -> BinaryMatrix:
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        if rows.shape != cols.shape:
            raise ValueError("rows and cols differ in length")
        if rows.size:
            if rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols:
                raise IndexError("coordinate out of range")
        key = rows * n_cols + cols
        order = np.argsort(key, kind="stable")
        key = key[order]
        if key.size > 1 and np.any(key[1:] == key[:-1]):
            raise ValueError("duplicate (row, col) entries")
        return cls(n_rows, n_cols, coords=(rows[order], cols[order]))

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> BinaryMatrix:
        return cls(n_rows, n_cols, packed=np.zeros((n_rows, _n_words(n_cols)), np.uint64))

    @classmethod
    def identity(cls, n: int) -> BinaryMatrix:
        idx = np.arange(n)
        return cls.from_coords(n, n, idx, idx)

    @classmethod
    def vstack(cls, *blocks: BinaryMatrix) -> BinaryMatrix:
        if not blocks:
            raise ValueError("nothing to stack")
        n_cols = blocks[0].n_cols
        if any(b.n_cols != n_cols for b in blocks):
            raise ValueError("column counts differ")
        rows, cols, offset = [], [], 0
        for b in blocks:
            rows.append(b.rows + offset)
            cols.append(b.cols)
            offset += b.n_rows
        return cls(offset, n_cols, coords=(np.concatenate(rows), np.concatenate(cols)))

    # -- views -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    @cached_property
    def packed(self) -> np.ndarray:
        if self._packed is not None:
            return self._packed
        packed = np.zeros((self.n_rows, _n_words(self.n_cols)), np.uint64)
        rows, cols = self._coords
        if rows.size:
            words = (cols >> 6).astype(np.int64)
            bits = np.left_shift(np.uint64(1), (cols & 63).astype(np.uint64))
            np.bitwise_or.at(packed, (rows, words), bits)
        packed.setflags(write=False)
        return packed

    @cached_property
    def _coo(self) -> tuple[np.ndarray, np.ndarray]:
        if self._coords is not None:
            return self._coords
        rows, cols = np.nonzero(self.to_array())
        rows = rows.astype(np.int64)
        cols = cols.astype(np.int64)
        rows.setflags(write=False)
        cols.setflags(write=False)
        return rows, cols

    @property
    def rows(self) -> np.ndarray:
        return self._coo[0]

    @property
    def cols(self) -> np.ndarray:
        return self._coo[1]

    @property
    def nnz(self) -> int:
        return int(self.rows.size)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` with column indices sorted within each row."""
        ptr = np.zeros(self.n_rows + 1, np.int64)
        np.cumsum(np.bincount(self.rows, minlength=self.n_rows), out=ptr[1:])
        return ptr, self.cols

    @cached_property
    def csc(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` with row indices sorted within each column."""
        order = np.lexsort((self.rows, self.cols))
        ptr = np.zeros(self.n_cols + 1, np.int64)
        np.cumsum(np.bincount(self.cols, minlength=self.n_cols), out=ptr[1:])
        return ptr, self.rows[order]

    def to_array(self) -> np.ndarray:
        """Unpacked ``uint8`` copy of shape ``(n_rows, n_cols)``."""
        if self._packed is None and self._coords is not None:
            out = np.zeros(self.shape, np.uint8)
            out[self._coords] = 1
            return out
        return unpack_rows(self.packed, self.n_cols)

    @cached_property
    def T(self) -> BinaryMatrix:
        return BinaryMatrix.from_coords(self.n_cols, self.n_rows, self.cols, self.rows)

    def row_weights(self) -> np.ndarray:
        return np.bincount(self.rows, minlength=self.n_rows)

    def col_weights(self) -> np.ndarray:
        return np.bincount(self.cols, minlength=self.n_cols)

    def row(self, i: int) -> np.ndarray:
        return unpack_rows(self.packed[i : i + 1], self.n_cols)[0]

    def select_columns(self, indices) -> BinaryMatrix:
        return select_columns(self, indices)

    def select_rows(self, indices) -> BinaryMatrix:
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_rows):
            raise IndexError("row index out of range")
        return BinaryMatrix(idx.size, self.n_cols, packed=self.packed[idx].copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.packed, other.packed)

    __hash__ = None

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"


# -- basic products --------------------------------------------------------


def select_columns(m: BinaryMatrix, indices) -> BinaryMatrix:
    """Submatrix made of the named columns, in the given (increasing) order."""
    idx = np.asarray(indices, dtype=np.int64).ravel()
    if idx.size:
        if idx.min() < 0 or idx.max() >= m.n_cols:
            raise IndexError("column index out of range")
        if np.any(np.diff(idx) <= 0):
            raise ValueError("column indices must be strictly increasing")
    position = np.full(m.n_cols, -1, np.int64)
    position[idx] = np.arange(idx.size)
    keep = position[m.cols] >= 0
    return BinaryMatrix(m.n_rows, idx.size, coords=(m.rows[keep], position[m.cols[keep]]))


def mat_vec(m: BinaryMatrix, v) -> np.ndarray:
    """``m @ v`` over GF(2); the cost is proportional to ``m.nnz``."""
    v = as_bits(v, m.n_cols)
    counts = np.bincount(m.rows, weights=v[m.cols], minlength=m.n_rows)
    return (counts.astype(np.int64) & 1).astype(np.uint8)


def vec_mat(v, m: BinaryMatrix) -> np.ndarray:
    """``v @ m`` over GF(2), i.e. the XOR of the rows of ``m`` selected by ``v``."""
    v = as_bits(v, m.n_rows)
    counts = np.bincount(m.cols, weights=v[m.rows], minlength=m.n_cols)
    return (counts.astype(np.int64) & 1).astype(np.uint8)


def dense_mat_vec(m: BinaryMatrix, v) -> np.ndarray:
    """``m @ v`` through the packed words (for dense ``m``)."""
    v = as_bits(v, m.n_cols)
    vp = pack_rows(v[None, :])[0]
    return (np.bitwise_count(m.packed & vp).sum(axis=1) & 1).astype(np.uint8)


def mat_mul(a: BinaryMatrix, b: BinaryMatrix) -> BinaryMatrix:
    """Matrix product over GF(2)."""
    if a.n_cols != b.n_rows:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    out = np.zeros((a.n_rows, b.packed.shape[1]), np.uint64)
    ptr, idx = a.csr
    bp = b.packed
    for i in range(a.n_rows):
        sel = idx[ptr[i] : ptr[i + 1]]
        if sel.size:
            out[i] = np.bitwise_xor.reduce(bp[sel], axis=0)
    return BinaryMatrix(a.n_rows, b.n_cols, packed=out)


# -- elimination -----------------------------------------------------------


def _eliminate(m: BinaryMatrix, *, from_right: bool = False, reduced: bool = True):
    work = np.array(m.packed, dtype=np.uint64, copy=True)
    r, pivots = _kernels.echelon(work, m.n_cols, from_right, reduced)
    return work[:r], np.asarray(pivots, dtype=np.int64)


def rank(m: BinaryMatrix) -> int:
    """GF(2) rank."""
    if m.n_rows == 0 or m.n_cols == 0:
        return 0
    # Eliminating along the shorter side does fewer row operations.
    target = m if m.n_rows <= m.n_cols else m.T
    _, pivots = _eliminate(target, reduced=False)
    return int(pivots.size)


def rref(m: BinaryMatrix, *, from_right: bool = False) -> tuple[BinaryMatrix, np.ndarray]:
    """Reduced row echelon form.

    Returns the ``rank x n_cols`` matrix of nonzero rows and the pivot column
    of each row.  With ``from_right`` pivots are searched from the last
    column backwards, which makes the pivot set the lexicographically last
    information set of the row space.
    """
    work, pivots = _eliminate(m, from_right=from_right, reduced=True)
    return BinaryMatrix(work.shape[0], m.n_cols, packed=work), pivots


def independent_rows(m: BinaryMatrix) -> np.ndarray:
    """Indices of a maximal independent set of rows, chosen greedily in order."""
    if m.n_rows == 0:
        return np.zeros(0, np.int64)
    _, pivots = _eliminate(m.T, reduced=False)
    return np.sort(pivots)


def nullspace(m: BinaryMatrix) -> BinaryMatrix:
    """Basis of ``{x : m x = 0}``, one basis vector per row."""
    r, pivots = rref(m)
    free = np.setdiff1d(np.arange(m.n_cols), pivots)
    basis = np.zeros((free.size, m.n_cols), np.uint8)
    basis[np.arange(free.size), free] = 1
    if pivots.size and free.size:
        basis[:, pivots] = r.to_array()[:, free].T
    return BinaryMatrix.from_dense(basis)


def row_space_complement(m: BinaryMatrix, size: int | None = None) -> BinaryMatrix:
    """Unit vectors extending the row space of ``m``.

    Unit vectors ``e_0, e_1, ...`` are taken greedily in index order,
    skipping any that already lie in the span of the rows of ``m`` and of
    the vectors chosen so far.  ``e_j`` is skipped exactly when ``j`` is a
    pivot column of the elimination run from the right, so the result is
    the unit vectors on the complement of that pivot set.  ``size`` keeps
    only the first vectors of the full extension.
    """
    _, pivots = rref(m, from_right=True)
    chosen = np.setdiff1d(np.arange(m.n_cols), pivots)
    if size is not None:
        if size > chosen.size:
            raise ValueError(
                f"complement has at most {chosen.size} vectors, {size} requested"
            )
        chosen = chosen[:size]
    return BinaryMatrix.from_coords(chosen.size, m.n_cols, np.arange(chosen.size), chosen)


class Solution(NamedTuple):
    particular: np.ndarray
    nullspace: BinaryMatrix


class Solver:
    """Reusable solver for ``a x = b`` with a fixed left-hand side.

    The elimination is done once, tracking the row operations, so each
    right-hand side costs one dense matrix-vector product.
    """

    def __init__(self, a: BinaryMatrix):
        self.a = a
        augmented = np.zeros((a.n_rows, a.n_cols + a.n_rows), np.uint8)
        augmented[:, : a.n_cols] = a.to_array()
        augmented[:, a.n_cols :] = np.eye(a.n_rows, dtype=np.uint8)
        work = pack_rows(augmented)
        rank_, pivots = _kernels.echelon(work, a.n_cols, False, True)
        bits = unpack_rows(work, a.n_cols + a.n_rows)
        self.rank = int(rank_)
        self.pivots = np.asarray(pivots, dtype=np.int64)
        self.free = np.setdiff1d(np.arange(a.n_cols), self.pivots)
        self._reduced = BinaryMatrix.from_dense(bits[: self.rank, : a.n_cols])
        # Rows past the rank combine to zero on the left; they test consistency.
        self._transform = BinaryMatrix.from_dense(bits[: self.rank, a.n_cols :])
        self._checks = BinaryMatrix.from_dense(bits[self.rank :, a.n_cols :])

    @cached_property
    def nullspace(self) -> BinaryMatrix:
        basis = np.zeros((self.free.size, self.a.n_cols), np.uint8)
        basis[np.arange(self.free.size), self.free] = 1
        if self.rank and self.free.size:
            basis[:, self.pivots] = self._reduced.to_array()[:, self.free].T
        return BinaryMatrix.from_dense(basis)

    def particular(self, b) -> np.ndarray | None:
        """One solution (free variables zero), or ``None`` if inconsistent."""
        b = as_bits(b, self.a.n_rows)
        if self._checks.n_rows and dense_mat_vec(self._checks, b).any():
            return None
        x = np.zeros(self.a.n_cols, np.uint8)
        if self.rank:
            x[self.pivots] = dense_mat_vec(self._transform, b)
        return x

    def random_solution(self, b, rng: np.random.Generator) -> np.ndarray | None:
        """A solution drawn uniformly from the full solution set."""
        x = self.particular(b)
        if x is None:
            return None
        if self.free.size:
            y = np.zeros(self.a.n_cols, np.uint8)
            y[self.free] = rng.integers(0, 2, self.free.size, dtype=np.uint8)
            # Pivot columns of the reduced form are unit columns, so R y only
            # picks up the free part.
            if self.rank:
                y[self.pivots] = dense_mat_vec(self._reduced, y)
            x ^= y
        return x

    def solve(self, b) -> Solution | None:
        x = self.particular(b)
        if x is None:
            return None
        return Solution(x, self.nullspace)


def solve(a: BinaryMatrix, b) -> Solution | None:
    """Solve ``a x = b``.

    Returns a particular solution together with a kernel basis (the full
    solution set is ``particular + span(nullspace)``), or ``None`` when the
    system is inconsistent.
    """
    return Solver(a).solve(b)


def inverse(m: BinaryMatrix) -> BinaryMatrix:
    """Inverse of a square invertible matrix."""
    if m.n_rows != m.n_cols:
        raise ValueError("only square matrices have inverses")
    solver = Solver(m)
    if solver.rank != m.n_rows:
        raise np.linalg.LinAlgError("matrix is singular over GF(2)")
    # With full rank every column is a pivot in order, so the tracked
    # transform is the inverse itself.
    return solver._transform


def back_substitute(t: BinaryMatrix, y) -> np.ndarray:
    """Solve ``t u = y`` for square unit-lower-triangular ``t``.

    Runs in time proportional to ``t.nnz``.
    """
    if t.n_rows != t.n_cols:
        raise ValueError("triangular system must be square")
    y = as_bits(y, t.n_rows)
    rows, cols = t.rows, t.cols
    if np.any(cols > rows):
        raise ValueError("matrix has entries above the diagonal")
    if np.count_nonzero(rows == cols) != t.n_rows:
        raise ValueError("zero on the diagonal")
    ptr, idx = t.csr
    return _kernels.lower_solve(ptr, idx, y)


# -- sparse text format ----------------------------------------------------


def write_sparse(m: BinaryMatrix, path) -> None:
    """Write ``n_rows n_cols nnz`` then one ``row col`` line per one."""
    lines = [f"{m.n_rows} {m.n_cols} {m.nnz}"]
    lines.extend(f"{r} {c}" for r, c in zip(m.rows.tolist(), m.cols.tolist()))
    Path(path).write_text("\n".join(lines) + "\n")


def read_sparse(path) -> BinaryMatrix:
    text = Path(path).read_text().split()
    if len(text) < 3:
        raise ValueError(f"{path}: missing header")
    n_rows, n_cols, nnz = (int(t) for t in text[:3])
    body = np.array(text[3:], dtype=np.int64)
    if body.size != 2 * nnz:
        raise ValueError(f"{path}: header announces {nnz} entries, found {body.size / 2:g}")
    pairs = body.reshape(-1, 2)
    return BinaryMatrix.from_coords(n_rows, n_cols, pairs[:, 0], pairs[:, 1])
