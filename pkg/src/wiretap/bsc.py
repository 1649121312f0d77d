"""Security of coset codes against a binary symmetric wiretap.

The eavesdropper sees ``x + e`` with ``e`` i.i.d. Bernoulli(``p``).  The
probability that ``e`` lands in the coset ``w + C`` follows from the dual
code by the MacWilliams transform::

    P(e in w + C) = 2^-k * sum_{d in dual(C)} (-1)^<d, w> (1 - 2p)^wt(d)

Grouping the dual words by weight gives the signed counts ``A'_i(w)`` and,
for ``w = 0``, the dual weight enumerator ``A'_i``.  The secret is safe when
every coset is nearly equally likely, which the sum
``sum_{i >= 1} A'_i (1 - 2p)^i`` controls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from . import gf2
from .channels import binary_entropy
from .coset import WiretapCode
from .gf2 import BinaryMatrix, as_bits

MAX_ENUMERATION_DIM = 26
LOG_DOMAIN_LENGTH = 40


class EnumerationTooLarge(ValueError):
    """The code has too many words to enumerate exhaustively."""


@dataclass(frozen=True)
class WeightEnumerator:
    """``counts[i]`` codewords of weight ``i`` in a length-``n`` code."""

    n: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.zeros(self.n + 1, np.int64)
        counts[: len(self.counts)] = self.counts
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def dimension(self) -> int:
        return int(self.counts.sum()).bit_length() - 1

    def as_dict(self) -> dict[int, int]:
        return {i: int(c) for i, c in enumerate(self.counts) if c}


def _independent(m: BinaryMatrix) -> BinaryMatrix:
    return m.select_rows(gf2.independent_rows(m))


def span_weights(generator: BinaryMatrix) -> np.ndarray:
    """Weight of ``u @ generator`` for every message ``u`` (rows must be independent)."""
    d = generator.n_rows
    if d > MAX_ENUMERATION_DIM:
        raise EnumerationTooLarge(
            f"dimension {d} exceeds {MAX_ENUMERATION_DIM}; use a closed-form family"
            " (repetition_dual_enumerator or simplex_enumerator)"
        )
    return _kernels.span_weights(np.ascontiguousarray(generator.packed))


def weight_enumerator(generator: BinaryMatrix) -> WeightEnumerator:
    """Exact weight distribution of the row space of ``generator``."""
    weights = span_weights(_independent(generator))
    return WeightEnumerator(generator.n_cols, np.bincount(weights, minlength=generator.n_cols + 1))


def dual_weight_enumerator(G_dual: BinaryMatrix) -> WeightEnumerator:
    """Weight distribution ``A'_i`` of the dual code, given its generator."""
    return weight_enumerator(G_dual)


def repetition_dual_enumerator(n: int) -> WeightEnumerator:
    """Dual of the single-parity-check code: the repetition code."""
    counts = np.zeros(n + 1, np.int64)
    counts[0] += 1
    counts[n] += 1
    return WeightEnumerator(n, counts)


def simplex_enumerator(m: int) -> WeightEnumerator:
    """Dual of the length ``2^m - 1`` Hamming code: all nonzero words have weight ``2^(m-1)``."""
    n = 2**m - 1
    counts = np.zeros(n + 1, np.int64)
    counts[0] = 1
    counts[(n + 1) // 2] = n
    return WeightEnumerator(n, counts)


def _power_terms(counts: np.ndarray, p: float) -> float:
    gamma = 1.0 - 2.0 * p
    idx = np.flatnonzero(counts)
    idx = idx[idx >= 1]
    if gamma == 0.0 or idx.size == 0:
        return 0.0
    if counts.size - 1 <= LOG_DOMAIN_LENGTH:
        return float(sum(float(counts[i]) * gamma ** int(i) for i in idx))
    # Signed counts need the sign kept apart from the logarithm.
    c = counts[idx].astype(np.float64)
    signs = np.sign(c) * np.where(idx % 2 == 1, np.sign(gamma), 1.0)
    logs = np.log(np.abs(c)) + idx * math.log(abs(gamma))
    top = logs.max()
    return float(math.exp(top) * np.sum(signs * np.exp(logs - top)))


def security_sum(w: WeightEnumerator, p: float) -> float:
    """``sum_{i >= 1} A'_i (1 - 2p)^i``."""
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"flip probability {p} outside [0, 0.5]")
    return _power_terms(w.counts, p)


def log_security_sum(w: WeightEnumerator, p: float) -> float:
    """Natural log of :func:`security_sum`, usable when the sum underflows."""
    gamma = 1.0 - 2.0 * p
    idx = np.flatnonzero(w.counts)
    idx = idx[idx >= 1]
    if gamma <= 0.0 or idx.size == 0:
        return -math.inf
    logs = np.log(w.counts[idx].astype(np.float64)) + idx * math.log(gamma)
    top = logs.max()
    return float(top + math.log(np.sum(np.exp(logs - top))))


def _syndrome_index(code: WiretapCode, w) -> int:
    s = gf2.dense_mat_vec(code.H, as_bits(w, code.n))
    return int(np.dot(s.astype(np.int64), 1 << np.arange(code.k, dtype=np.int64)))


def _dual_weights(code: WiretapCode) -> np.ndarray:
    # The rows of H span the dual of C, and u @ H pairs with a word w through
    # the syndrome: <u H, w> = <u, H w>.
    return span_weights(code.H)


def signed_dual_counts(code: WiretapCode, w) -> np.ndarray:
    """``A'_i(w)``: dual words of weight ``i`` counted with sign ``(-1)^<d, w>``."""
    weights = _dual_weights(code)
    syn = _syndrome_index(code, w)
    u = np.arange(weights.size, dtype=np.int64)
    signs = 1 - 2 * (np.bitwise_count(u & syn) & 1).astype(np.int64)
    return np.bincount(weights, weights=signs, minlength=code.n + 1).astype(np.int64)


def coset_probability(code: WiretapCode, w, p: float) -> float:
    """Probability that BSC(``p``) noise falls in the coset ``w + C``."""
    counts = signed_dual_counts(code, w)
    return 2.0 ** (-code.k) * (1.0 + _power_terms(counts, p))


def coset_probabilities(code: WiretapCode, p: float) -> np.ndarray:
    """Probabilities of all ``2^k`` cosets, indexed by syndrome.

    Bit ``j`` of the index is syndrome bit ``j``.  One Walsh-Hadamard
    transform of ``(1 - 2p)^wt(u H)`` gives every coset at once.
    """
    weights = _dual_weights(code)
    f = (1.0 - 2.0 * p) ** weights.astype(np.float64)
    return _kernels.walsh_hadamard(f) * 2.0 ** (-code.k)


def max_coset_deviation(code: WiretapCode, p: float) -> float:
    """``max_w |P(e in w + C) - 2^-k|``."""
    return float(np.max(np.abs(coset_probabilities(code, p) - 2.0 ** (-code.k))))


def detection_error_probability(G: BinaryMatrix, p: float) -> float:
    """Probability that BSC(``p``) noise is a nonzero codeword of ``C = rowspace(G)``."""
    a = weight_enumerator(G).counts
    n = G.n_cols
    i = np.arange(1, n + 1)
    mask = a[1:] > 0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return float(a[n] > 0) if n else 0.0
    logs = np.log(a[1:][mask].astype(np.float64)) + i[mask] * math.log(p) + (n - i[mask]) * math.log1p(-p)
    return float(np.sum(np.exp(logs)))


@dataclass(frozen=True)
class DetectionBoundReport:
    """Check of the error-detection route to security for one code.

    If noise goes undetected with probability at most ``2^-k``, the security
    sum is at most ``2^k (1 - p)^n``; this is useful when the rate ``k / n``
    stays below ``-log2(1 - p)``.
    """

    n: int
    k: int
    p: float
    detection_error: float
    hypothesis_holds: bool
    security_sum: float
    bound: float
    conclusion_holds: bool
    rate: float
    rate_limit: float

    @property
    def rate_condition(self) -> bool:
        return self.rate < self.rate_limit


def detection_bound_report(G: BinaryMatrix, p: float) -> DetectionBoundReport:
    """Evaluate hypothesis and conclusion of the detection-error bound for ``C = rowspace(G)``."""
    code_dim = gf2.rank(G)
    n = G.n_cols
    k = n - code_dim
    det = detection_error_probability(G, p)
    dual = dual_weight_enumerator(gf2.nullspace(G))
    total = security_sum(dual, p)
    bound = 2.0**k * (1.0 - p) ** n
    slack = 1e-12
    return DetectionBoundReport(
        n=n,
        k=k,
        p=p,
        detection_error=det,
        hypothesis_holds=det <= 2.0 ** (-k) + slack,
        security_sum=total,
        bound=bound,
        conclusion_holds=total <= bound + slack,
        rate=k / n,
        rate_limit=construction_rate_limit(p),
    )


def construction_rate_limit(p: float) -> float:
    """``-log2(1 - p)``, the largest secrecy rate this route can certify."""
    return -math.log2(1.0 - p)


def min_flip_for_rate(rate: float) -> float:
    """Smallest ``p`` for which a secrecy rate ``rate`` is within the limit: ``1 - 2^-R``."""
    return 1.0 - 2.0 ** (-rate)


def bsc_secrecy_capacity(p: float) -> float:
    """Secrecy capacity with a noiseless main channel: ``h(p)``."""
    return binary_entropy(p)


# -- code families ---------------------------------------------------------


def spc_generator(n: int) -> BinaryMatrix:
    """Generator of the even-weight code of length ``n`` (``e_i + e_{n-1}``)."""
    if n < 2:
        raise ValueError("single-parity-check codes need n >= 2")
    idx = np.arange(n - 1)
    rows = np.concatenate([idx, idx])
    cols = np.concatenate([idx, np.full(n - 1, n - 1)])
    return BinaryMatrix.from_coords(n - 1, n, rows, cols)


def hamming_parity_check(m: int) -> BinaryMatrix:
    """``m x (2^m - 1)`` parity-check matrix; column ``j`` is ``j + 1`` in binary."""
    if m < 2:
        raise ValueError("Hamming codes need m >= 2")
    n = 2**m - 1
    cols = np.arange(1, n + 1)
    bits = (cols[None, :] >> np.arange(m)[:, None]) & 1
    return BinaryMatrix.from_dense(bits.astype(np.uint8))


def hamming_generator(m: int) -> BinaryMatrix:
    return gf2.nullspace(hamming_parity_check(m))


def hamming_order(n: int) -> int:
    m = (n + 1).bit_length() - 1
    if 2**m - 1 != n or m < 2:
        raise ValueError(f"no Hamming code of length {n}; lengths are 2^m - 1")
    return m
