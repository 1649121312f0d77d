"""Coset coding of secrets over a linear code.

A ``k``-bit secret ``s`` selects a coset of a linear code ``C`` of dimension
``n - k``; the transmitted word is a uniformly random member of that coset.
With a noiseless main channel the receiver reads the secret back as the
syndrome ``H x``.  An eavesdropper who sees the positions in ``revealed``
learns nothing about ``s`` exactly when the columns of the generator ``G``
at those positions are linearly independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from . import gf2
from .gf2 import BinaryMatrix, as_bits
from .seeding import make_rng, trial_rng


@dataclass(frozen=True)
class WiretapCode:
    """Coset code defined by the generator ``G`` of the base code.

    ``G_star`` holds the coset representatives (unit vectors on the positions
    ``J``), and ``H`` is the syndrome former with ``H G^T = 0`` and
    ``H G_star^T = I``.  ``P`` lists the pivot position of each row of the
    reduced form of ``G``; ``P`` and ``J`` partition ``range(n)``.
    """

    G: BinaryMatrix
    G_star: BinaryMatrix
    H: BinaryMatrix
    J: np.ndarray
    P: np.ndarray

    @property
    def n(self) -> int:
        return self.G.n_cols

    @property
    def k(self) -> int:
        return self.G_star.n_rows

    @property
    def rate(self) -> float:
        return self.k / self.n


def build_code(G: BinaryMatrix) -> WiretapCode:
    """Set up coset coding over the row space of ``G``.

    Raises ``ValueError`` when ``G`` has dependent rows.
    """
    n = G.n_cols
    reduced, pivots = gf2.rref(G, from_right=True)
    if reduced.n_rows != G.n_rows:
        raise ValueError(
            f"generator has rank {reduced.n_rows} but {G.n_rows} rows; remove dependent rows first"
        )
    J = np.setdiff1d(np.arange(n), pivots)
    k = J.size
    G_star = BinaryMatrix.from_coords(k, n, np.arange(k), J)
    h = np.zeros((k, n), np.uint8)
    h[np.arange(k), J] = 1
    if pivots.size and k:
        h[:, pivots] = reduced.to_array()[:, J].T
    H = BinaryMatrix.from_dense(h)
    return WiretapCode(G, G_star, H, J, np.asarray(pivots))


def encode(code: WiretapCode, s, seed) -> np.ndarray:
    """Uniformly random word of the coset selected by ``s``."""
    s = as_bits(s, code.k)
    v = make_rng(seed).integers(0, 2, code.G.n_rows, dtype=np.uint8)
    return encode_with(code, s, v)


def encode_with(code: WiretapCode, s, v) -> np.ndarray:
    """``s G_star + v G`` for explicit randomness ``v``."""
    s = as_bits(s, code.k)
    x = gf2.vec_mat(as_bits(v, code.G.n_rows), code.G)
    x[code.J] ^= s
    return x


def bob_decode(code: WiretapCode, x) -> np.ndarray:
    """Syndrome ``H x``, which is the secret for a noiselessly received word."""
    return gf2.dense_mat_vec(code.H, as_bits(x, code.n))


def _positions(n: int, revealed) -> np.ndarray:
    arr = np.asarray(revealed)
    if arr.dtype == bool:
        if arr.shape != (n,):
            raise ValueError(f"reveal mask must have length {n}")
        return np.flatnonzero(arr)
    idx = np.unique(arr.astype(np.int64))
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError("revealed position out of range")
    return idx


def column_rank(G: BinaryMatrix, columns) -> int:
    """Rank of ``G`` restricted to ``columns``.

    Columns that peeling (on ``G`` read as a parity-check matrix with those
    columns erased) resolves each add one to the rank; only the stopping set
    left over needs dense elimination.
    """
    cols = _positions(G.n_cols, columns)
    if cols.size == 0:
        return 0
    erased = np.zeros(G.n_cols, np.uint8)
    erased[cols] = 1
    values = np.zeros(G.n_cols, np.uint8)
    cptr, cidx = G.csr
    vptr, vidx = G.csc
    _, resolved = _kernels.peel(cptr, cidx, vptr, vidx, values, erased)
    rest = np.flatnonzero(erased)
    if rest.size == 0:
        return int(resolved)
    return int(resolved) + gf2.rank(gf2.select_columns(G, rest))


def is_secured(code: WiretapCode, revealed) -> bool:
    """True when the revealed positions leave every coset equally likely."""
    cols = _positions(code.n, revealed)
    return column_rank(code.G, cols) == cols.size


def equivocation(code: WiretapCode, revealed) -> int:
    """``H(S | Z = z)`` in bits for uniform secrets: ``k - mu + rank(G_mu)``."""
    cols = _positions(code.n, revealed)
    return code.k - cols.size + column_rank(code.G, cols)


@dataclass(frozen=True)
class SecurityReport:
    trials: int
    secured_fraction: float
    equivocation_samples: np.ndarray
    mean_equivocation_rate: float

    @property
    def mean_equivocation(self) -> float:
        return float(self.equivocation_samples.mean())


def monte_carlo_security(code: WiretapCode, leak_prob: float, trials: int, seed: int) -> SecurityReport:
    """Security statistics over random erasure-wiretap observations.

    Each position is revealed independently with probability ``leak_prob``.
    Trial ``i`` uses its own stream derived from ``(seed, i)``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if not 0.0 <= leak_prob <= 1.0:
        raise ValueError(f"leak probability {leak_prob} outside [0, 1]")
    samples = np.empty(trials, np.int64)
    for i in range(trials):
        mask = trial_rng(seed, i).random(code.n) < leak_prob
        samples[i] = equivocation(code, mask)
    secured = float(np.mean(samples == code.k))
    return SecurityReport(trials, secured, samples, float(samples.mean()) / code.n)
