import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wiretap import bsc, coset, gf2
from wiretap.gf2 import BinaryMatrix
from wiretap.reproduce import brute_force_coset_probability

REP2 = coset.build_code(BinaryMatrix.from_dense([[1, 1]]))


def random_code(rng, k, n):
    while True:
        g = BinaryMatrix.from_dense(rng.integers(0, 2, (k, n), dtype=np.uint8))
        if gf2.rank(g) == k:
            return coset.build_code(g)


def all_vectors(n):
    return ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(np.uint8)


# -- weight enumerators ----------------------------------------------------


def test_enumerator_examples():
    rep = bsc.dual_weight_enumerator(BinaryMatrix.from_dense(np.ones((1, 9), np.uint8)))
    assert rep.as_dict() == {0: 1, 9: 1}
    simplex = bsc.dual_weight_enumerator(bsc.hamming_parity_check(3))
    assert simplex.as_dict() == {0: 1, 4: 7}
    zero = bsc.dual_weight_enumerator(BinaryMatrix.zeros(0, 5))
    assert zero.as_dict() == {0: 1}


def test_enumerator_of_random_code_by_brute_force():
    rng = np.random.default_rng(0)
    g = rng.integers(0, 2, (5, 11), dtype=np.uint8)
    words = (all_vectors(5) @ g) % 2
    distinct = np.unique(words, axis=0)
    expected = np.bincount(distinct.sum(axis=1), minlength=12)
    assert np.array_equal(bsc.weight_enumerator(BinaryMatrix.from_dense(g)).counts, expected)


def test_closed_form_families_match_enumeration():
    for n in (5, 8, 13):
        code = coset.build_code(bsc.spc_generator(n))
        assert np.array_equal(bsc.dual_weight_enumerator(code.H).counts, bsc.repetition_dual_enumerator(n).counts)
    for m in (2, 3, 4):
        code = coset.build_code(bsc.hamming_generator(m))
        assert np.array_equal(bsc.dual_weight_enumerator(code.H).counts, bsc.simplex_enumerator(m).counts)


def test_enumeration_limit():
    big = BinaryMatrix.identity(bsc.MAX_ENUMERATION_DIM + 1)
    with pytest.raises(bsc.EnumerationTooLarge):
        bsc.weight_enumerator(big)


# -- security sum ----------------------------------------------------------


def test_security_sum_examples():
    assert bsc.security_sum(bsc.simplex_enumerator(3), 0.5) == 0
    for n in (7, 15, 31):
        for p in (0.05, 0.2, 0.45):
            assert bsc.security_sum(bsc.repetition_dual_enumerator(n), p) == (1 - 2 * p) ** n
            m = bsc.hamming_order(n)
            assert bsc.security_sum(bsc.simplex_enumerator(m), p) == n * (1 - 2 * p) ** ((n + 1) // 2)
    with pytest.raises(ValueError):
        bsc.security_sum(bsc.simplex_enumerator(3), 0.6)


@given(st.floats(0, 0.5), st.floats(0, 0.5))
def test_security_sum_nonincreasing_in_p(a, b):
    lo, hi = sorted((a, b))
    w = bsc.simplex_enumerator(4)
    assert bsc.security_sum(w, hi) <= bsc.security_sum(w, lo) + 1e-15


def test_long_codes_use_log_domain():
    n = 2**10 - 1
    w = bsc.simplex_enumerator(10)
    p = 0.3
    expected = math.log(n) + (n + 1) // 2 * math.log(1 - 2 * p)
    assert bsc.log_security_sum(w, p) == pytest.approx(expected, rel=1e-12)
    assert bsc.security_sum(w, p) == pytest.approx(math.exp(expected), rel=1e-9)
    assert bsc.log_security_sum(bsc.repetition_dual_enumerator(4000), 0.45) == pytest.approx(4000 * math.log(0.1))
    assert bsc.security_sum(bsc.repetition_dual_enumerator(4000), 0.45) == 0.0


# -- coset probabilities ---------------------------------------------------


def test_two_bit_example():
    assert bsc.coset_probability(REP2, [0, 1], 0.25) == pytest.approx(0.375, abs=1e-15)
    assert list(bsc.signed_dual_counts(REP2, [0, 1])) == [1, 0, -1]
    assert bsc.coset_probability(REP2, [0, 0], 0.25) == pytest.approx(0.625, abs=1e-15)


def test_zero_coset_recovers_security_sum():
    code = coset.build_code(bsc.hamming_generator(3))
    w = bsc.dual_weight_enumerator(code.H)
    for p in (0.05, 0.2):
        expected = 2.0**-code.k * (1 + bsc.security_sum(w, p))
        assert bsc.coset_probability(code, np.zeros(7, np.uint8), p) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("k, n", [(4, 7), (3, 7), (6, 12), (5, 14), (10, 16)])
def test_coset_probability_matches_enumeration(k, n):
    rng = np.random.default_rng(k * 100 + n)
    code = random_code(rng, k, n)
    table = bsc.coset_probabilities(code, 0.1)
    assert table.sum() == pytest.approx(1.0, abs=1e-12)
    for s in all_vectors(code.k)[:64]:
        w = coset.encode_with(code, s, np.zeros(code.G.n_rows, np.uint8))
        brute = brute_force_coset_probability(code, w, 0.1)
        assert abs(bsc.coset_probability(code, w, 0.1) - brute) <= 1e-12
        index = int(np.dot(s.astype(np.int64), 1 << np.arange(code.k)))
        assert abs(table[index] - brute) <= 1e-12


def test_hamming_cosets_match_enumeration():
    code = coset.build_code(bsc.hamming_generator(3))
    assert code.k == 3
    for s in all_vectors(3):
        w = coset.encode_with(code, s, np.zeros(4, np.uint8))
        assert abs(bsc.coset_probability(code, w, 0.1) - brute_force_coset_probability(code, w, 0.1)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0, 0.5))
def test_coset_identity_properties(seed, p):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 12))
    code = random_code(rng, int(rng.integers(1, n)), n)
    full = bsc.dual_weight_enumerator(code.H).counts
    w = rng.integers(0, 2, n, dtype=np.uint8)
    assert np.all(np.abs(bsc.signed_dual_counts(code, w)) <= full)
    probs = bsc.coset_probabilities(code, p)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    bound = 2.0**-code.k * bsc.security_sum(bsc.WeightEnumerator(n, full), p)
    assert bsc.max_coset_deviation(code, p) <= bound + 1e-12


# -- error-detection route -------------------------------------------------


def test_detection_error_by_enumeration():
    G = bsc.hamming_generator(3)
    weights = ((all_vectors(4) @ G.to_array()) % 2).sum(axis=1)
    p = 0.2
    brute = sum(p**w * (1 - p) ** (7 - w) for w in weights if w)
    assert bsc.detection_error_probability(G, p) == pytest.approx(brute, abs=1e-15)


def test_detection_bound_report_for_hamming():
    r = bsc.detection_bound_report(bsc.hamming_generator(3), 0.2)
    assert r.n == 7 and r.k == 3
    if r.hypothesis_holds:
        assert r.conclusion_holds
    assert r.security_sum == pytest.approx(7 * 0.6**4)
    assert r.bound == pytest.approx(8 * 0.8**7)
    zero = bsc.detection_bound_report(bsc.hamming_generator(3), 0.0)
    assert zero.detection_error == 0 and zero.hypothesis_holds and zero.conclusion_holds


def test_rate_frontier():
    assert bsc.min_flip_for_rate(0.2) == pytest.approx(1 - 2**-0.2)
    assert abs(bsc.min_flip_for_rate(0.2) - 0.1294) < 1e-4
    assert bsc.construction_rate_limit(bsc.min_flip_for_rate(0.2)) == pytest.approx(0.2)
    assert bsc.bsc_secrecy_capacity(0.11) > bsc.construction_rate_limit(0.11)
