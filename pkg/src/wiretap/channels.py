"""Discrete memoryless channels, capacities and secrecy capacities.

A wiretap setup pairs a main channel (to the legitimate receiver) with a
wiretap channel (to the eavesdropper).  Erasure outputs are written as
``-1`` in sampled words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .seeding import make_rng

ERASURE = -1


class UnsupportedChannelPair(ValueError):
    """No closed-form secrecy capacity is implemented for this pair."""


def binary_entropy(p: float) -> float:
    """``h(p)`` in bits, with ``h(0) = h(1) = 0``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _check_prob(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} {p} outside [0, 1]")
    return p


def _binary_input(x) -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim != 1 or (arr.size and (arr.min() < 0 or arr.max() > 1)):
        raise ValueError("binary channels take a 1-D vector of 0/1 symbols")
    return arr.astype(np.int8)


@dataclass(frozen=True)
class BEC:
    """Binary erasure channel; outputs 0, 1 or ``ERASURE``."""

    erasure_prob: float

    def __post_init__(self):
        _check_prob("erasure probability", self.erasure_prob)

    @property
    def transition(self) -> np.ndarray:
        e = self.erasure_prob
        # output order: 0, 1, erasure
        return np.array([[1 - e, 0.0, e], [0.0, 1 - e, e]])

    def capacity(self) -> float:
        return 1.0 - self.erasure_prob

    def transmit(self, x, seed) -> np.ndarray:
        x = _binary_input(x)
        erased = make_rng(seed).random(x.size) < self.erasure_prob
        return np.where(erased, ERASURE, x).astype(np.int8)

    def __str__(self) -> str:
        return f"bec:{self.erasure_prob:g}"


@dataclass(frozen=True)
class BSC:
    """Binary symmetric channel."""

    flip_prob: float

    def __post_init__(self):
        _check_prob("flip probability", self.flip_prob)

    @property
    def transition(self) -> np.ndarray:
        p = self.flip_prob
        return np.array([[1 - p, p], [p, 1 - p]])

    def capacity(self) -> float:
        return 1.0 - binary_entropy(self.flip_prob)

    def transmit(self, x, seed) -> np.ndarray:
        x = _binary_input(x)
        flips = make_rng(seed).random(x.size) < self.flip_prob
        return (x ^ flips).astype(np.int8)

    def __str__(self) -> str:
        return f"bsc:{self.flip_prob:g}" if self.flip_prob else "noiseless"


def noiseless() -> BSC:
    return BSC(0.0)


def ewt(leak_prob: float) -> BEC:
    """Erasure wiretap that reveals each symbol with probability ``leak_prob``."""
    return BEC(1.0 - _check_prob("leak probability", leak_prob))


class DMC:
    """General discrete memoryless channel given by ``P[k, j] = P(j | k)``."""

    def __init__(self, transition):
        p = np.array(transition, dtype=np.float64)
        if p.ndim != 2 or p.size == 0:
            raise ValueError("transition matrix must be a non-empty 2-D array")
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError("transition probabilities must lie in [0, 1]")
        if np.any(np.abs(p.sum(axis=1) - 1) > 1e-12):
            raise ValueError("each row of the transition matrix must sum to 1")
        p.setflags(write=False)
        self._p = p

    @property
    def transition(self) -> np.ndarray:
        return self._p

    @property
    def n_inputs(self) -> int:
        return self._p.shape[0]

    @property
    def n_outputs(self) -> int:
        return self._p.shape[1]

    def capacity(self, tol: float = 1e-6) -> float:
        if is_symmetric(self):
            return mutual_information(np.full(self.n_inputs, 1 / self.n_inputs), self)
        return blahut_arimoto(self._p, tol)[0]

    def transmit(self, x, seed) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if x.ndim != 1 or (x.size and (x.min() < 0 or x.max() >= self.n_inputs)):
            raise ValueError(f"inputs must be symbols 0..{self.n_inputs - 1}")
        cdf = np.cumsum(self._p, axis=1)[x]
        u = make_rng(seed).random(x.size)[:, None]
        return np.minimum((u >= cdf).sum(axis=1), self.n_outputs - 1)

    def __eq__(self, other):
        return isinstance(other, DMC) and np.array_equal(self._p, other._p)

    def __hash__(self):
        return hash(self._p.tobytes())

    def __repr__(self) -> str:
        return f"DMC({self._p.tolist()})"


ChannelModel = BEC | BSC | DMC


def transition_matrix(c: ChannelModel) -> np.ndarray:
    return c.transition


def mutual_information(q, c: ChannelModel) -> float:
    """``I(X; Y)`` in bits for input distribution ``q``."""
    p = transition_matrix(c)
    q = np.asarray(q, dtype=np.float64)
    py = q @ p
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log2(p / py[None, :]), 0.0)
    return float(q @ terms.sum(axis=1))


def blahut_arimoto(p: np.ndarray, tol: float = 1e-6, max_iter: int = 100_000):
    """Capacity (bits) and optimal input of a DMC by alternating maximization.

    Stops once the upper and lower capacity bounds differ by less than ``tol``.
    """
    k = p.shape[0]
    q = np.full(k, 1.0 / k)
    lower = 0.0
    for _ in range(max_iter):
        py = q @ p
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(p > 0, p * np.log2(p / py[None, :]), 0.0).sum(axis=1)
        lower = float(q @ d)
        upper = float(d.max())
        if upper - lower < tol:
            break
        q = q * np.exp2(d)
        q /= q.sum()
    return lower, q


def is_symmetric(c: ChannelModel) -> bool:
    """Symmetric in Gallager's sense, so the uniform input achieves capacity.

    The outputs must split into groups where, inside each group, every row is
    a permutation of every other row and every column a permutation of every
    other column.  Output symbols that share a column multiset are grouped.
    """
    p = np.round(transition_matrix(c), 12)
    cols = [tuple(sorted(p[:, j])) for j in range(p.shape[1])]
    groups: dict[tuple, list[int]] = {}
    for j, key in enumerate(cols):
        groups.setdefault(key, []).append(j)
    for members in groups.values():
        sub = p[:, members]
        first = sorted(sub[0])
        if any(sorted(row) != first for row in sub):
            return False
    return True


def capacity(c: ChannelModel) -> float:
    return c.capacity()


def _as_bsc(c):
    if isinstance(c, BSC):
        return min(c.flip_prob, 1 - c.flip_prob)
    return None


def secrecy_capacity(main: ChannelModel, wiretap: ChannelModel) -> float:
    """Secrecy capacity in bits per channel use.

    Closed forms are available when one of the channels is degraded (or less
    noisy) with respect to the other and both share the uniform input as
    capacity achiever: BEC/BEC, BSC/BSC (noiseless counts as ``BSC(0)``) and
    mixed BEC/BSC pairs in their less-noisy regime.  In those cases the value
    is the capacity difference, clipped at zero.
    """
    if isinstance(main, DMC) or isinstance(wiretap, DMC):
        raise UnsupportedChannelPair("secrecy capacity of general DMC pairs is not implemented")
    cm, cw = main.capacity(), wiretap.capacity()
    if type(main) is type(wiretap):
        return max(cm - cw, 0.0)
    bec, bsc = (main, wiretap) if isinstance(main, BEC) else (wiretap, main)
    e, p = bec.erasure_prob, _as_bsc(bsc)
    # BEC(e) is less noisy than BSC(p) iff e <= 4p(1-p).  The converse order
    # only holds in the degenerate cases p = 0 or e = 1.
    bec_less_noisy = e <= 4 * p * (1 - p) + 1e-15
    bsc_less_noisy = p == 0 or e == 1
    main_better = bec_less_noisy if bec is main else bsc_less_noisy
    wiretap_better = bsc_less_noisy if bec is main else bec_less_noisy
    if main_better:
        return max(cm - cw, 0.0)
    if wiretap_better:
        return 0.0
    raise UnsupportedChannelPair(
        f"{main} and {wiretap} are not ordered as less noisy; no closed form"
    )


def parse_channel(text: str) -> ChannelModel:
    """``bec:<e>``, ``bsc:<p>``, ``noiseless`` or ``dmc:<file>``.

    A DMC file holds one row of the transition matrix per line.
    """
    text = text.strip()
    if text == "noiseless":
        return noiseless()
    kind, sep, arg = text.partition(":")
    if not sep:
        raise ValueError(f"unrecognized channel {text!r}")
    kind = kind.lower()
    if kind == "bec":
        return BEC(float(arg))
    if kind == "bsc":
        return BSC(float(arg))
    if kind == "dmc":
        rows = [
            [float(t) for t in line.replace(",", " ").split()]
            for line in Path(arg).read_text().splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        ]
        return DMC(rows)
    raise ValueError(f"unknown channel kind {kind!r} in {text!r}")
