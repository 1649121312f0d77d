"""Nested LDPC codes for an erasure main channel and an erasure wiretap.

``H1 = [H2; H2_bar]`` is the parity-check matrix of the fine code ``C1``;
``H2`` alone defines the coarse code ``C2``, which the legitimate receiver
decodes by peeling.  A secret ``s`` is sent as a random solution of
``H2 x = 0, H2_bar x = s``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import gf2
from .degrees import EnsembleLike, design_rate, split_residual
from .gf2 import BinaryMatrix, as_bits
from .ldpc import TannerGraph, peel_decode, sample_graph
from .seeding import make_rng


@dataclass(frozen=True)
class NestedCode:
    H2: BinaryMatrix
    H2_bar: BinaryMatrix
    design_r1: Fraction | float | None = None
    design_r2: Fraction | float | None = None

    @property
    def n(self) -> int:
        return self.H2.n_cols

    @property
    def secret_bits(self) -> int:
        return self.H2_bar.n_rows

    @cached_property
    def H1(self) -> BinaryMatrix:
        return BinaryMatrix.vstack(self.H2, self.H2_bar)

    @property
    def r1(self) -> Fraction:
        return 1 - Fraction(self.H1.n_rows, self.n)

    @property
    def r2(self) -> Fraction:
        return 1 - Fraction(self.H2.n_rows, self.n)

    @property
    def secrecy_rate(self) -> Fraction:
        return self.r2 - self.r1

    @cached_property
    def graph(self) -> TannerGraph:
        return TannerGraph(self.H2)

    @cached_property
    def solver(self) -> gf2.Solver:
        return gf2.Solver(self.H1)


def _independent_extension(H2: BinaryMatrix, H2_bar: BinaryMatrix) -> BinaryMatrix:
    """Rows of ``H2_bar`` that each add to the rank of ``[H2; earlier rows]``."""
    keep = gf2.independent_rows(BinaryMatrix.vstack(H2, H2_bar))
    return H2_bar.select_rows(keep[keep >= H2.n_rows] - H2.n_rows)


def build_nested(d1: EnsembleLike, d2: EnsembleLike, n: int, seed, *, eps_w: float | None = None) -> NestedCode:
    """Sample ``H2`` from ``d2`` and ``H2_bar`` from the residual ensemble.

    Stacking the two gives an ``H1`` whose degree structure follows ``d1``.
    Rows of ``H2_bar`` that are linearly dependent on earlier rows of the
    stack are dropped so that every secret has the same number of encodings.
    ``eps_w``, if given, is checked against ``1 - r2`` and a warning is issued
    when no equivocation can be guaranteed.
    """
    residual = split_residual(d1, d2)
    if residual is None:
        raise ValueError("no residual ensemble splits d1 into d2 plus extra rows")
    rng = make_rng(seed)
    H2 = sample_graph(d2, n, rng).matrix
    H2_bar = sample_graph(residual, n, rng).matrix
    code = NestedCode(
        H2, _independent_extension(H2, H2_bar), design_rate(d1), design_rate(d2)
    )
    if eps_w is not None and eps_w <= 1 - float(code.r2):
        warnings.warn(
            f"wiretap erasure probability {eps_w} does not exceed 1 - r2 = {1 - float(code.r2):.4f};"
            " no equivocation is guaranteed",
            stacklevel=2,
        )
    return code


def nested_encode(code: NestedCode, s, seed) -> np.ndarray:
    """Uniformly random ``x`` with ``H2 x = 0`` and ``H2_bar x = s``."""
    s = as_bits(s, code.secret_bits)
    rhs = np.concatenate([np.zeros(code.H2.n_rows, np.uint8), s])
    x = code.solver.random_solution(rhs, make_rng(seed))
    if x is None:
        raise RuntimeError("H1 is rank deficient; the secret has no encoding")
    return x


def nested_decode(code: NestedCode, received, erased=None) -> np.ndarray | None:
    """Peel on the graph of ``H2``, then read ``s = H2_bar x``.

    ``received`` may carry erasures as ``-1`` or come with an explicit
    ``erased`` mask.  Returns None when peeling stalls.
    """
    received = np.asarray(received)
    if erased is None:
        erased = received < 0
    result = peel_decode(code.graph, np.where(received < 0, 0, received), erased)
    if not result.success:
        return None
    return gf2.mat_vec(code.H2_bar, result.word)


def nested_equivocation_bound(code: NestedCode, eps_w: float) -> float:
    """Guaranteed equivocation ``n (eps_w - (1 - r2))`` in bits, or 0."""
    return code.n * max(0.0, float(eps_w) - (1.0 - float(code.r2)))


def exact_equivocation(code: NestedCode, erased) -> int:
    """``H(S | Z)`` in bits when the wiretap erases the given positions.

    Equals ``rank(H1[:, E]) - rank(H2[:, E])`` for a uniform secret.
    """
    mask = np.asarray(erased)
    cols = np.flatnonzero(mask) if mask.dtype == bool else np.unique(mask.astype(np.int64))
    if cols.size == 0:
        return 0
    return gf2.rank(gf2.select_columns(code.H1, cols)) - gf2.rank(gf2.select_columns(code.H2, cols))
