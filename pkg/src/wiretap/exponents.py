"""Gallager random-coding exponents and the two-channel ensemble bound.

All exponents and rates are in nats unless a name says otherwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .channels import ChannelModel, is_symmetric, mutual_information, transition_matrix

LN2 = math.log(2.0)
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _as_distribution(q, k: int) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (k,):
        raise ValueError(f"input distribution must have {k} entries")
    if np.any(q < 0) or abs(q.sum() - 1.0) > 1e-12:
        raise ValueError("input distribution must be nonnegative and sum to 1")
    return q


def gallager_e0(c: ChannelModel, q, rho: float) -> float:
    """``-ln sum_j [sum_k q(k) P(j|k)^(1/(1+rho))]^(1+rho)``."""
    p = transition_matrix(c)
    q = _as_distribution(q, p.shape[0])
    inner = q @ np.power(p, 1.0 / (1.0 + rho))
    return float(-math.log(np.sum(np.power(inner, 1.0 + rho))))


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-6) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(argmax, max)``.

    The end points are compared too, since the maximum of ``E0(rho) - rho R``
    often sits on the boundary.
    """
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
    best = max([(f1, x1), (f2, x2), (f(lo), lo), (f(hi), hi)])
    return best[1], best[0]


@dataclass(frozen=True)
class ExponentResult:
    exponent: float
    rho: float
    q: np.ndarray


def exponent_for_input(c: ChannelModel, rate: float, q, tol: float = 1e-6) -> ExponentResult:
    """``max_{0 <= rho <= 1} E0(rho, q) - rho * rate`` for a fixed input ``q``."""
    q = _as_distribution(q, transition_matrix(c).shape[0])
    rho, value = golden_section_max(lambda r: gallager_e0(c, q, r) - r * rate, 0.0, 1.0, tol)
    return ExponentResult(value if value > 0.0 else 0.0, rho, q)


def _simplex_grid(k: int, step: float):
    m = int(round(1.0 / step))
    for parts in itertools.combinations(range(m + k - 1), k - 1):
        edges = (-1,) + parts + (m + k - 1,)
        yield np.array([edges[i + 1] - edges[i] - 1 for i in range(k)], dtype=np.float64) / m


def _refine(c, rate, q, value, step, tol):
    """Pattern search moving probability mass between pairs of inputs."""
    k = q.size
    while step > 1e-6:
        improved = False
        for i, j in itertools.permutations(range(k), 2):
            if q[i] < step:
                continue
            trial = q.copy()
            trial[i] -= step
            trial[j] += step
            trial = np.clip(trial, 0.0, None)
            trial /= trial.sum()
            res = exponent_for_input(c, rate, trial, tol)
            if res.exponent > value + 1e-15:
                q, value, improved = res.q, res.exponent, True
        if not improved:
            step /= 2
    return q, value


def random_coding_exponent(
    c: ChannelModel, rate: float, *, grid_step: float = 0.01, tol: float = 1e-6
) -> ExponentResult:
    """``E(R) = max_Q max_{0 <= rho <= 1} [E0(rho, Q) - rho R]``.

    Symmetric channels use the uniform input directly.  Otherwise the input
    simplex is scanned on a grid with spacing ``grid_step`` and the best grid
    point is refined locally.
    """
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    k = transition_matrix(c).shape[0]
    if is_symmetric(c):
        return exponent_for_input(c, rate, np.full(k, 1.0 / k), tol)
    best = None
    for q in _simplex_grid(k, grid_step):
        res = exponent_for_input(c, rate, q, tol)
        if best is None or res.exponent > best.exponent:
            best = res
    q, _ = _refine(c, rate, best.q, best.exponent, grid_step / 2, tol)
    return exponent_for_input(c, rate, q, tol)


@dataclass(frozen=True)
class EnsembleBoundReport:
    """Two-channel random-coding bound for a binned code ensemble.

    ``bound = exp(-n E_main) + exp(-n E_wiretap)`` with both exponents taken
    at the wiretap-optimal input ``q``.  Mutual informations and the
    frontier are in bits.
    """

    n: int
    r1: float
    r2: float
    q: np.ndarray
    e_wiretap: float
    rho_wiretap: float
    e_main: float
    rho_main: float
    log_bound: float
    i_main_bits: float
    i_wiretap_bits: float
    c_wiretap_bits: float

    @property
    def bound(self) -> float:
        return math.exp(self.log_bound) if self.log_bound < 700 else math.inf

    @property
    def frontier_bits(self) -> float:
        """Secrecy rate reachable with this input: ``I(q; main) - C_wiretap``."""
        return self.i_main_bits - self.c_wiretap_bits

    @property
    def r1_achievable(self) -> bool:
        return self.r1 < self.i_main_bits * LN2


def _logaddexp(a: float, b: float) -> float:
    return float(np.logaddexp(a, b))


def ensemble_bound_report(
    main: ChannelModel, wiretap: ChannelModel, r1: float, r2: float, n: int, *, grid_step: float = 0.01
) -> EnsembleBoundReport:
    """Evaluate the bound at block length ``n`` for rates ``r1`` (total) and ``r2`` (per bin)."""
    w = random_coding_exponent(wiretap, r2, grid_step=grid_step)
    m = exponent_for_input(main, r1, w.q)
    return EnsembleBoundReport(
        n=n,
        r1=r1,
        r2=r2,
        q=w.q,
        e_wiretap=w.exponent,
        rho_wiretap=w.rho,
        e_main=m.exponent,
        rho_main=m.rho,
        log_bound=_logaddexp(-n * m.exponent, -n * w.exponent),
        i_main_bits=mutual_information(w.q, main),
        i_wiretap_bits=mutual_information(w.q, wiretap),
        c_wiretap_bits=wiretap.capacity(),
    )


def e0_slope_at_zero(c: ChannelModel, q, h: float = 1e-4) -> float:
    """One-sided second-order finite difference of ``E0`` at ``rho = 0``."""
    f = lambda r: gallager_e0(c, q, r)  # noqa: E731
    return (-3.0 * f(0.0) + 4.0 * f(h) - f(2.0 * h)) / (2.0 * h)
