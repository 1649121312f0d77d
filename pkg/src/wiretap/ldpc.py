"""Tanner graphs: ensemble sampling and peeling erasure decoding."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .degrees import EnsembleLike, as_ensemble
from .gf2 import BinaryMatrix, as_bits
from .seeding import make_rng


class TannerGraph:
    """Bipartite check/variable graph of a parity-check matrix."""

    def __init__(self, matrix: BinaryMatrix):
        self.matrix = matrix
        self.socket_var_degrees: np.ndarray | None = None
        self.socket_check_degrees: np.ndarray | None = None

    @property
    def n_vars(self) -> int:
        return self.matrix.n_cols

    @property
    def n_checks(self) -> int:
        return self.matrix.n_rows

    @cached_property
    def check_adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        return self.matrix.csr

    @cached_property
    def var_adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        return self.matrix.csc

    def neighbors_of_check(self, c: int) -> np.ndarray:
        ptr, idx = self.check_adjacency
        return idx[ptr[c] : ptr[c + 1]]

    def var_degrees(self) -> np.ndarray:
        return self.matrix.col_weights()

    def check_degrees(self) -> np.ndarray:
        return self.matrix.row_weights()

    def __repr__(self) -> str:
        return f"TannerGraph(n_vars={self.n_vars}, n_checks={self.n_checks}, edges={self.matrix.nnz})"


def _largest_remainder(fractions: dict, total: int) -> dict:
    degs = list(fractions)
    raw = np.array([float(fractions[d]) * total for d in degs])
    counts = np.floor(raw).astype(np.int64)
    short = total - int(counts.sum())
    order = np.argsort(-(raw - counts), kind="stable")
    counts[order[:short]] += 1
    return dict(zip(degs, counts.tolist()))


def degree_sequences(ensemble: EnsembleLike, n_vars: int) -> tuple[np.ndarray, np.ndarray]:
    """Node degree sequences (variables, checks) realizing the ensemble.

    Variable counts per degree are rounded by largest remainder.  Check counts
    are rounded down, the shortfall is first filled with checks of the largest
    degree, and whatever is left (fewer sockets than one such check) is
    removed from the variable side by lowering the degree of that many
    variables of the largest degree by one.
    """
    ens = as_ensemble(ensemble)
    var_counts = _largest_remainder(ens.nodes.v, n_vars)
    var_deg = np.repeat(
        np.array(list(var_counts), dtype=np.int64), np.array(list(var_counts.values()))
    )
    n_edges = int(var_deg.sum())
    if n_edges == 0:
        return var_deg, np.zeros(0, dtype=np.int64)
    check_counts = {j: int(np.floor(n_edges * float(c) / j)) for j, c in ens.rho.items()}
    deficit = n_edges - sum(j * k for j, k in check_counts.items())
    top = max(check_counts)
    check_counts[top] += deficit // top
    extra = deficit % top
    if extra:
        # var_deg is sorted ascending, so the tail holds the largest degrees
        var_deg[-extra:] -= 1
        if var_deg[-extra] < 0:
            raise ValueError("too few variable sockets to balance the check side")
        var_deg = np.sort(var_deg)
    check_deg = np.repeat(
        np.array(list(check_counts), dtype=np.int64), np.array(list(check_counts.values()))
    )
    if int(check_deg.sum()) != int(var_deg.sum()):
        raise ValueError("could not balance variable and check sockets")
    return var_deg, check_deg


def sample_graph(ensemble: EnsembleLike, n_vars: int, seed) -> TannerGraph:
    """Configuration-model sample from the ensemble.

    Variable degrees are assigned to columns in random order and sockets are
    matched by a uniform permutation.  A repeated (check, variable) pair is an
    entry added to itself over GF(2), so pairs of parallel edges cancel and
    only odd multiplicities leave a one in the matrix.  The degree sequences
    before that cancellation are kept on the graph as ``socket_var_degrees``
    and ``socket_check_degrees``.
    """
    rng = make_rng(seed)
    var_deg, check_deg = degree_sequences(ensemble, n_vars)
    var_deg = rng.permutation(var_deg)
    var_sockets = rng.permutation(np.repeat(np.arange(n_vars, dtype=np.int64), var_deg))
    n_checks = check_deg.size
    check_sockets = np.repeat(np.arange(n_checks, dtype=np.int64), check_deg)
    key = check_sockets * n_vars + var_sockets
    uniq, mult = np.unique(key, return_counts=True)
    keep = uniq[(mult & 1) == 1]
    graph = TannerGraph(BinaryMatrix.from_coords(n_checks, n_vars, keep // n_vars, keep % n_vars))
    graph.socket_var_degrees = var_deg
    graph.socket_check_degrees = check_deg
    return graph


def sample_matrix(ensemble: EnsembleLike, n_vars: int, seed) -> BinaryMatrix:
    return sample_graph(ensemble, n_vars, seed).matrix


class PeelStatus(enum.Enum):
    OK = "ok"
    STUCK = "stuck"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class PeelResult:
    status: PeelStatus
    word: np.ndarray
    erased: np.ndarray
    resolved: int

    @property
    def success(self) -> bool:
        return self.status is PeelStatus.OK


def peel_decode(graph: TannerGraph | BinaryMatrix, received, erased) -> PeelResult:
    """Iterative erasure decoding.

    Checks with a single erased neighbor fix that neighbor, processed in FIFO
    order.  ``received`` holds the known bits (values at erased positions are
    ignored) and ``erased`` is a boolean mask or an index array.  A check whose
    neighbors are all known but whose parity is odd reports ``INCONSISTENT``;
    that takes precedence over ``STUCK``.
    """
    if isinstance(graph, BinaryMatrix):
        graph = TannerGraph(graph)
    n = graph.n_vars
    mask = np.asarray(erased)
    if mask.dtype != bool:
        idx = mask.astype(np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise IndexError("erased position out of range")
        mask = np.zeros(n, bool)
        mask[idx] = True
    elif mask.shape != (n,):
        raise ValueError(f"erasure mask must have length {n}")
    values = np.where(mask, 0, as_bits(np.where(mask, 0, received), n)).astype(np.uint8)
    still = mask.astype(np.uint8)
    cptr, cidx = graph.check_adjacency
    vptr, vidx = graph.var_adjacency
    status, resolved = _kernels.peel(cptr, cidx, vptr, vidx, values, still)
    return PeelResult(
        (PeelStatus.OK, PeelStatus.STUCK, PeelStatus.INCONSISTENT)[status],
        values,
        still.astype(bool),
        int(resolved),
    )
