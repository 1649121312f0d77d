"""Reference scenarios with pass/fail checks.

Each ``check_*`` function builds its scenario from a seed, measures the
quantities of interest and compares them with fixed targets.  ``quick=True``
shrinks block lengths and trial counts for smoke runs; the targets are not
changed, so quick runs may fail checks that need large ``n``.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import bsc, coset, exponents, gf2, lt, nested
from .channels import BEC, BSC, mutual_information, secrecy_capacity
from .degrees import (
    DegreeDistribution,
    Ensemble,
    NodeDistribution,
    as_ensemble,
    combine_stacked,
    combine_stacked_nodes,
    de_threshold,
    design_rate,
    format_polynomial,
    parse_polynomial,
    split_residual,
)
from .gf2 import BinaryMatrix
from .ldpc import peel_decode, sample_graph
from .seeding import trial_rng


@dataclass
class CheckResult:
    number: int
    name: str
    items: list[tuple[str, bool, str]] = field(default_factory=list)
    seconds: float = 0.0

    def add(self, label: str, passed: bool, detail: str) -> None:
        self.items.append((label, bool(passed), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.items)


# -- shared ensembles ------------------------------------------------------

REG36 = DegreeDistribution.regular(3, 6)
REG26 = DegreeDistribution.regular(2, 6)
REG56 = DegreeDistribution.regular(5, 6)
LTD_G = DegreeDistribution(parse_polynomial("0.6087x+0.3913x^2"), parse_polynomial("x^6"))
LTD_G1 = Ensemble(NodeDistribution(parse_polynomial("0.7+0.3x", shift=0)), parse_polynomial("x^6"))


def _stream(seed: int, label: str) -> np.random.Generator:
    """Independent generator per named scenario."""
    tag = int.from_bytes(label.encode(), "little") % (2**63)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(tag,)))


def full_rank_generator(ensemble, n: int, rng) -> BinaryMatrix:
    """Sampled matrix with linearly dependent rows removed (first kept)."""
    m = sample_graph(ensemble, n, rng).matrix
    return m.select_rows(gf2.independent_rows(m))


def stacked_pair(g_ens, g1_ens, n: int, rng) -> tuple[BinaryMatrix, BinaryMatrix]:
    """``G`` and ``G1`` such that ``[G; G1]`` has full row rank."""
    G = full_rank_generator(g_ens, n, rng)
    G1 = sample_graph(g1_ens, n, rng).matrix
    keep = gf2.independent_rows(BinaryMatrix.vstack(G, G1))
    return G, G1.select_rows(keep[keep >= G.n_rows] - G.n_rows)


# -- 1: thresholds ---------------------------------------------------------


def check_thresholds(seed: int = 0, quick: bool = False) -> CheckResult:
    res = CheckResult(1, "density-evolution thresholds")
    cases = [
        ("(3,6)-regular", REG36, 0.4294, 0.001),
        ("(5,6)-regular", REG56, 0.551, 0.002),
        ("irregular lambda_G", LTD_G, 0.2625, 0.001),
    ]
    for label, d, target, tol in cases:
        start = time.perf_counter()
        value = de_threshold(d)
        elapsed = time.perf_counter() - start
        res.add(label, abs(value - target) <= tol and elapsed < 5.0, f"{value:.4f} vs {target}+-{tol}")
    return res


# -- 2: equivocation closed form -------------------------------------------


def small_code_corpus(seed: int = 0) -> list[tuple[str, BinaryMatrix]]:
    """Generators (full row rank) of small codes, all with ``n <= 10``."""
    rng = np.random.default_rng(seed)
    corpus = [
        ("repetition-2", BinaryMatrix.from_dense([[1, 1]])),
        ("hamming-7", bsc.hamming_generator(3)),
        ("simplex-7", bsc.hamming_parity_check(3)),
        ("spc-6", bsc.spc_generator(6)),
        ("repetition-5", BinaryMatrix.from_dense(np.ones((1, 5), np.uint8))),
        ("ldpc-(3,6)-10", full_rank_generator(REG36, 10, rng)),
    ]
    for n, l in ((8, 3), (9, 5), (10, 4), (10, 6)):
        while True:
            m = BinaryMatrix.from_dense(rng.integers(0, 2, (l, n), dtype=np.uint8))
            if gf2.rank(m) == l:
                break
        corpus.append((f"random-({n},{l})", m))
    return corpus


def brute_force_equivocations(code: coset.WiretapCode, observed=None) -> np.ndarray:
    """``log2`` of the number of cosets consistent with each reveal pattern.

    Pattern ``p`` reveals the positions of the set bits of ``p``; the revealed
    values are taken from ``observed`` (all zeros by default).
    """
    n = code.n
    words = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(np.uint8)
    syndromes = (words @ code.H.to_array().T) % 2 @ (1 << np.arange(code.k))
    z = np.zeros(n, np.uint8) if observed is None else np.asarray(observed, np.uint8)
    mismatch = words ^ z  # bit j set where word disagrees with the observation
    mismatch_mask = mismatch @ (1 << np.arange(n))
    out = np.empty(2**n)
    for pattern in range(2**n):
        ok = (mismatch_mask & pattern) == 0
        out[pattern] = math.log2(np.unique(syndromes[ok]).size)
    return out


def check_equivocation_closed_form(seed: int = 0, quick: bool = False) -> CheckResult:
    res = CheckResult(2, "equivocation closed form vs exhaustive coset count")
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    for label, G in small_code_corpus(seed):
        code = coset.build_code(G)
        n = code.n
        observed = rng.integers(0, 2, n, dtype=np.uint8)
        brute = brute_force_equivocations(code, observed)
        closed = np.array(
            [coset.equivocation(code, [j for j in range(n) if (p >> j) & 1]) for p in range(2**n)]
        )
        bad = int(np.sum(closed != brute))
        res.add(label, bad == 0, f"{2**n} patterns, {bad} mismatches")
    res.seconds = time.perf_counter() - start
    res.add("runtime", res.seconds < 60.0, "under 60 s")
    return res


# -- 3: erasure wiretap phase transition -----------------------------------


def check_ewt_transition(seed: int = 0, quick: bool = False) -> CheckResult:
    res = CheckResult(3, "erasure-wiretap security transition")
    n, trials = (2000, 50) if quick else (10_000, 500)
    start = time.perf_counter()
    rng = _stream(seed, "ewt")
    code = coset.build_code(full_rank_generator(REG36, n, rng))
    low = coset.monte_carlo_security(code, 0.40, trials, seed)
    high = coset.monte_carlo_security(code, 0.46, trials, seed + 1)
    res.seconds = time.perf_counter() - start
    res.add("leak 0.40", low.secured_fraction >= 0.99, f"secured {low.secured_fraction:.3f} (need >= 0.99)")
    res.add("leak 0.46", high.secured_fraction <= 0.50, f"secured {high.secured_fraction:.3f} (need <= 0.50)")
    res.add("runtime", res.seconds < 300.0, "under 5 min")
    return res


# -- 4 and 5: linear-time decodable codes ----------------------------------


def build_v5c6_example(n: int, seed: int) -> lt.LtSecrecyCode:
    G, G1 = stacked_pair(REG36, REG26, n, _stream(seed, f"v5c6-{n}"))
    return lt.build_lt_code(G, G1)


def build_ltd_example(n: int, seed: int) -> lt.LtSecrecyCode:
    G, G1 = stacked_pair(LTD_G, LTD_G1, n, _stream(seed, f"ltd-{n}"))
    return lt.build_lt_code(G, G1)


def check_lt_numbers(seed: int = 0, quick: bool = False) -> CheckResult:
    res = CheckResult(4, "linear-time code parameters")
    n = 2000 if quick else 4000
    t_design = design_rate(combine_stacked_nodes(REG36, REG26))
    secrecy_design = design_rate(REG36) - t_design
    res.add("t", t_design == Fraction(1, 6), f"design t = {t_design}")
    res.add("secrecy rate", secrecy_design == Fraction(1, 3), f"design secrecy rate = {secrecy_design}")
    code = build_v5c6_example(n, seed)
    res.add(
        "gap fraction",
        abs(code.gap_fraction - 0.283) <= 0.03,
        f"n={n} gap {code.gap} = {code.gap_fraction:.4f} vs 0.283+-0.03"
        f" (built t={float(code.t):.4f}, secrecy={float(code.secrecy_rate):.4f})",
    )
    n_ltd = 3000
    ltd = build_ltd_example(n_ltd, seed)
    rate = float(ltd.secrecy_rate)
    res.add("irregular secrecy rate", abs(rate - 0.0429) <= 0.0005, f"n={n_ltd} {rate:.4f} vs 0.0429+-0.0005")
    res.add("irregular gap fraction", ltd.gap_fraction <= 0.02, f"{ltd.gap_fraction:.4f} (need <= 0.02)")
    return res


def check_lt_equivalence(seed: int = 0, quick: bool = False) -> CheckResult:
    res = CheckResult(5, "staged decoder equals direct elimination")
    n = 2000
    messages = 20 if quick else 100
    for label, code in (("v5c6", build_v5c6_example(n, seed)), ("ltd", build_ltd_example(3000, seed))):
        mismatches = 0
        for i in range(messages):
            rng = trial_rng(seed, i)
            s = rng.integers(0, 2, code.secret_bits, dtype=np.uint8)
            x = lt.lt_encode(code, s, rng)
            staged = lt.lt_decode(code, x)
            direct = lt.direct_decode(code, x)
            mismatches += not (np.array_equal(staged, direct) and np.array_equal(staged, s))
        res.add(label, mismatches == 0, f"{messages} messages, {mismatches} mismatches, gap {code.gap}")
    return res


# -- 6: nested erasure codes -----------------------------------------------


def check_nested_example(seed: int = 0, quick: bool = False) -> CheckResult:
    res = CheckResult(6, "nested erasure-channel construction")
    residual = split_residual(REG56, REG36)
    edge = residual.to_edge() if residual is not None else None
    exact = edge is not None and edge.lam == {2: 1} and edge.rho == {6: 1}
    shown = f"lambda={format_polynomial(edge.lam)} rho={format_polynomial(edge.rho)}" if edge else "no residual"
    res.add("residual", exact, shown)
    n, trials = (2000, 60) if quick else (4000, 200)
    code = nested.build_nested(REG56, REG36, n, _stream(seed, "nested"))
    bound = nested.nested_equivocation_bound(code, 0.55)
    res.add("equivocation bound", math.isclose(bound, 0.05 * n, rel_tol=1e-9), f"{bound / n:.4f} n")
    ok = 0
    for i in range(trials):
        rng = trial_rng(seed, i)
        s = rng.integers(0, 2, code.secret_bits, dtype=np.uint8)
        x = nested.nested_encode(code, s, rng)
        y = BEC(0.35).transmit(x, rng)
        decoded = nested.nested_decode(code, y)
        ok += decoded is not None and np.array_equal(decoded, s)
    res.add("decode at eps_m=0.35", ok / trials >= 0.99, f"n={n} success {ok}/{trials}")
    return res


# -- 7 and 8: BSC wiretap --------------------------------------------------


def brute_force_coset_probability(code: coset.WiretapCode, w, p: float) -> float:
    G = code.G.to_array()
    msgs = ((np.arange(2 ** G.shape[0])[:, None] >> np.arange(G.shape[0])) & 1).astype(np.uint8)
    words = (msgs @ G + np.asarray(w)) % 2
    weights = words.sum(axis=1)
    return float(np.sum(p**weights * (1 - p) ** (code.n - weights)))


def check_macwilliams(seed: int = 0, quick: bool = False) -> CheckResult:
    res = CheckResult(7, "coset probabilities from the dual code")
    rng = np.random.default_rng(seed)
    while True:
        g = BinaryMatrix.from_dense(rng.integers(0, 2, (6, 12), dtype=np.uint8))
        if gf2.rank(g) == 6:
            break
    codes = [
        ("n=2 repetition", BinaryMatrix.from_dense([[1, 1]])),
        ("simplex (dual of Hamming 7)", bsc.hamming_parity_check(3)),
        ("random (12,6)", g),
    ]
    for label, G in codes:
        code = coset.build_code(G)
        for p in (0.1, 0.25):
            worst = 0.0
            total = 0.0
            for syn in range(2**code.k):
                s = ((syn >> np.arange(code.k)) & 1).astype(np.uint8)
                w = coset.encode_with(code, s, np.zeros(code.G.n_rows, np.uint8))
                identity = bsc.coset_probability(code, w, p)
                worst = max(worst, abs(identity - brute_force_coset_probability(code, w, p)))
                total += identity
            res.add(
                f"{label} p={p}",
                worst <= 1e-12 and abs(total - 1.0) <= 1e-12,
                f"max error {worst:.1e}, sum-1 {total - 1.0:.1e}",
            )
    return res


def check_family_sums(seed: int = 0, quick: bool = False) -> CheckResult:
    res = CheckResult(8, "security sums of code families")
    ps = (0.05, 0.2, 0.4)
    for n in (7, 15, 31):
        spc = coset.build_code(bsc.spc_generator(n))
        enumerated = bsc.dual_weight_enumerator(spc.H)
        same = np.array_equal(enumerated.counts, bsc.repetition_dual_enumerator(n).counts)
        sums = all(bsc.security_sum(enumerated, p) == (1 - 2 * p) ** n for p in ps)
        res.add(f"spc n={n}", same and sums, f"A'={enumerated.as_dict()}")
        m = bsc.hamming_order(n)
        ham = coset.build_code(bsc.hamming_generator(m))
        enumerated = bsc.dual_weight_enumerator(ham.H)
        same = np.array_equal(enumerated.counts, bsc.simplex_enumerator(m).counts)
        sums = all(bsc.security_sum(enumerated, p) == n * (1 - 2 * p) ** ((n + 1) // 2) for p in ps)
        res.add(f"hamming n={n}", same and sums, f"A'={enumerated.as_dict()}")
    return res


# -- 9: exponents ----------------------------------------------------------


def check_exponents(seed: int = 0, quick: bool = False) -> CheckResult:
    res = CheckResult(9, "random-coding exponent properties")
    u = np.array([0.5, 0.5])
    channels = (BSC(0.1), BEC(0.3))
    res.add(
        "E0(0)=0",
        all(exponents.gallager_e0(c, u, 0.0) == 0.0 for c in channels),
        "BSC(0.1), BEC(0.3)",
    )
    for c in channels:
        slope = exponents.e0_slope_at_zero(c, u)
        info = mutual_information(u, c) * exponents.LN2
        res.add(f"slope {c}", abs(slope - info) <= 1e-5, f"{slope:.8f} vs I={info:.8f}")
        at_cap = exponents.random_coding_exponent(c, c.capacity() * exponents.LN2).exponent
        res.add(f"E(C) {c}", abs(at_cap) <= 1e-4, f"{at_cap:.2e}")
    report = exponents.ensemble_bound_report(BSC(0.05), BSC(0.2), 0.6 * exponents.LN2, 0.25 * exponents.LN2, 1000)
    cs = secrecy_capacity(BSC(0.05), BSC(0.2))
    res.add(
        "symmetric frontier",
        abs(report.frontier_bits - cs) <= 1e-6,
        f"{report.frontier_bits:.8f} vs {cs:.8f}",
    )
    return res


# -- 10: degree histograms -------------------------------------------------


def histogram_within_3sigma(degrees: np.ndarray, predicted: dict) -> tuple[bool, str]:
    """Per-degree counts against ``N p +- 3 sqrt(N p (1 - p))``."""
    total = degrees.size
    observed = np.bincount(degrees)
    worst = 0.0
    ok = True
    for d in sorted(set(range(observed.size)) | set(predicted)):
        p = float(predicted.get(d, 0.0))
        count = int(observed[d]) if d < observed.size else 0
        sigma = math.sqrt(total * p * (1 - p))
        dev = abs(count - total * p)
        if dev > 3 * sigma + 1e-9:
            ok = False
        if sigma > 0:
            worst = max(worst, dev / sigma)
        elif dev > 1e-9:
            worst = math.inf
    return ok, f"max deviation {worst:.2f} sigma"


def check_counts(var_degrees, check_degrees, ens) -> tuple[bool, str]:
    ens = as_ensemble(ens)
    ok_v, msg_v = histogram_within_3sigma(var_degrees, ens.nodes.v)
    integral = sum(float(c) / j for j, c in ens.rho.items())
    check_nodes = {j: float(c) / j / integral for j, c in ens.rho.items()}
    ok_c, msg_c = histogram_within_3sigma(check_degrees, check_nodes)
    return ok_v and ok_c, f"variables {msg_v}; checks {msg_c}"


def check_degree_empirics(seed: int = 0, quick: bool = False) -> CheckResult:
    res = CheckResult(10, "degree combination empirics")
    stacked = combine_stacked(LTD_G, LTD_G1)
    coeffs = [float(stacked.lam.get(d, 0)) for d in (2, 3, 4)]
    target = [0.3769, 0.4846, 0.1385]
    res.add(
        "convolution coefficients",
        all(abs(a - b) <= 1e-4 for a, b in zip(coeffs, target)),
        " ".join(f"{c:.4f}" for c in coeffs),
    )
    n = 1000 if quick else 6000
    rng = _stream(seed, "histograms")
    mixed_g1 = Ensemble(LTD_G1.nodes, parse_polynomial("x^5"))
    for label, g_ens, g1_ens in (("irregular pair", LTD_G, LTD_G1), ("mixed check degrees", LTD_G, mixed_g1)):
        a = sample_graph(g_ens, n, rng)
        b = sample_graph(g1_ens, n, rng)
        ok, msg = check_counts(
            a.socket_var_degrees + b.socket_var_degrees,
            np.concatenate([a.socket_check_degrees, b.socket_check_degrees]),
            combine_stacked_nodes(g_ens, g1_ens),
        )
        res.add(f"stacked {label}", ok, msg)
        # splitting the stacked ensemble back must predict the extra rows
        residual = split_residual(combine_stacked_nodes(g_ens, g1_ens), g_ens)
        c = sample_graph(residual, n, rng)
        ok, msg = check_counts(c.socket_var_degrees, c.socket_check_degrees, residual)
        res.add(f"residual {label}", ok, msg)
        ok, msg = check_counts(
            a.socket_var_degrees + c.socket_var_degrees,
            np.concatenate([a.socket_check_degrees, c.socket_check_degrees]),
            combine_stacked_nodes(g_ens, g1_ens),
        )
        res.add(f"restacked {label}", ok, msg)
    return res


CHECKS = (
    check_thresholds,
    check_equivocation_closed_form,
    check_ewt_transition,
    check_lt_numbers,
    check_lt_equivalence,
    check_nested_example,
    check_macwilliams,
    check_family_sums,
    check_exponents,
    check_degree_empirics,
)


def run_all(seed: int = 0, quick: bool = False) -> list[CheckResult]:
    return [check(seed=seed, quick=quick) for check in CHECKS]
