import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wiretap import coset, gf2, lt
from wiretap.degrees import (
    DegreeDistribution,
    combine_stacked,
    combine_stacked_nodes,
    de_threshold,
    design_rate,
    swapped,
)
from wiretap.gf2 import BinaryMatrix
from wiretap.reproduce import REG26, REG36, build_ltd_example, build_v5c6_example, stacked_pair
from wiretap.seeding import trial_rng


def check_triangle(m: BinaryMatrix, tri: lt.TriangulationResult) -> None:
    a = m.to_array()
    rows, cols = tri.diag_rows, tri.diag_cols
    assert tri.achieved_triangular_columns + tri.gap == m.n_rows
    assert sorted(np.concatenate([rows, tri.gap_rows])) == list(range(m.n_rows))
    assert len(set(cols.tolist())) == cols.size
    # T[i, j] = a[rows[j], cols[i]] must be unit lower triangular
    T = a[np.ix_(rows, cols)].T
    assert np.all(np.diag(T) == 1)
    assert not np.triu(T, 1).any()


def min_gap_brute_force(a: np.ndarray) -> int:
    """Smallest gap over every choice of triangle rows, columns and order."""
    n_rows, n_cols = a.shape
    for size in range(min(n_rows, n_cols), 0, -1):
        for rows in itertools.permutations(range(n_rows), size):
            for cols in itertools.combinations(range(n_cols), size):
                for order in itertools.permutations(cols):
                    T = a[np.ix_(rows, order)].T
                    if np.all(np.diag(T) == 1) and not np.triu(T, 1).any():
                        return n_rows - size
    return n_rows


def test_identity_has_no_gap():
    tri = lt.greedy_triangulate(BinaryMatrix.identity(6))
    assert tri.gap == 0
    check_triangle(BinaryMatrix.identity(6), tri)


def test_all_ones_gap():
    a = np.ones((4, 8), np.uint8)
    tri = lt.greedy_triangulate(BinaryMatrix.from_dense(a))
    assert tri.gap == 3 == min_gap_brute_force(a)
    check_triangle(BinaryMatrix.from_dense(a), tri)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_triangulation_structure_on_random_matrices(seed):
    rng = np.random.default_rng(seed)
    a = (rng.random((rng.integers(1, 5), rng.integers(2, 7))) < 0.5).astype(np.uint8)
    m = BinaryMatrix.from_dense(a)
    tri = lt.greedy_triangulate(m)
    check_triangle(m, tri)
    assert tri.gap >= min_gap_brute_force(a)


def toy_code():
    # H* = [I | R]: every unknown has its own weight-one column
    rng = np.random.default_rng(3)
    h = np.hstack([np.eye(4, dtype=np.uint8), rng.integers(0, 2, (4, 4), dtype=np.uint8)])
    return BinaryMatrix.from_dense(h[:3]), BinaryMatrix.from_dense(h[3:])


def test_toy_code_without_gap():
    G, G1 = toy_code()
    code = lt.build_lt_code(G, G1)
    assert code.gap == 0
    assert code.phi_inverse.shape == (0, 0) and code.D.shape == (0, 0)
    for s in ([0], [1]):
        for seed in range(8):
            x = lt.lt_encode(code, s, seed)
            ops = {}
            assert list(lt.lt_decode(code, x, ops=ops)) == s
            assert "dense" not in ops
            assert np.array_equal(lt.direct_decode(code, x), s)


def test_rank_deficient_stack_rejected():
    G = BinaryMatrix.from_dense([[1, 1, 0, 0], [0, 0, 1, 1]])
    G1 = BinaryMatrix.from_dense([[1, 1, 1, 1]])
    with pytest.raises(ValueError):
        lt.build_lt_code(G, G1)


@pytest.fixture(scope="module")
def v5c6():
    return build_v5c6_example(2000, 0)


@pytest.fixture(scope="module")
def ltd():
    return build_ltd_example(3000, 0)


def test_block_shapes_and_triangle(v5c6):
    code = v5c6
    a, g = code.triangulation.achieved_triangular_columns, code.gap
    assert a + g == code.H_star.n_rows
    assert code.B.shape == (a, g) and code.T.shape == (a, a)
    assert code.D.shape == (g, g) and code.E.shape == (g, a)
    T = code.T.to_array()
    assert np.all(np.diag(T) == 1) and not np.triu(T, 1).any()
    assert gf2.rank(code.H_star) == code.H_star.n_rows
    assert code.retained_positions.size == code.H_star.n_rows
    # the dense block really is E T^-1 B + D
    Z = np.array([gf2.back_substitute(code.T, col) for col in code.B.to_array().T]).T
    phi = (code.E.to_array().astype(int) @ Z + code.D.to_array()) % 2
    assert gf2.mat_mul(BinaryMatrix.from_dense(phi), code.phi_inverse) == BinaryMatrix.identity(g)


def test_design_rates_of_v5c6_example(v5c6):
    t = design_rate(combine_stacked_nodes(REG36, REG26))
    assert t == Fraction(1, 6)
    assert design_rate(REG36) - t == Fraction(1, 3)
    # the sampled (2,6) rows sum to zero, so the built stack loses a row or so
    assert abs(float(v5c6.t) - 1 / 6) < 0.002
    assert abs(float(v5c6.secrecy_rate) - 1 / 3) < 0.002


def test_v5c6_gap_matches_reference(v5c6):
    gap = v5c6.gap_fraction
    assert abs(gap - 0.283) <= 0.03


def test_v5c6_gap_matches_swapped_threshold(v5c6):
    stacked = combine_stacked(REG36, REG26)
    delta = de_threshold(swapped(stacked))
    gap = v5c6.gap_fraction
    assert abs(gap - (1 - 1 / 6 - delta)) <= 0.03


def test_irregular_example(ltd):
    assert abs(float(ltd.secrecy_rate) - 0.0429) <= 0.0005
    assert ltd.gap_fraction <= 0.02


@pytest.mark.parametrize("which", ["v5c6", "ltd"])
def test_decoders_agree(which, request):
    code = request.getfixturevalue(which)
    for i in range(100):
        rng = trial_rng(0, i)
        s = rng.integers(0, 2, code.secret_bits, dtype=np.uint8)
        x = lt.lt_encode(code, s, rng)
        staged = lt.lt_decode(code, x)
        assert np.array_equal(staged, s)
        assert np.array_equal(staged, lt.direct_decode(code, x))


def test_decode_cost_linear_for_gap_free_codes():
    counts = {}
    for n in (2000, 4000, 8000):
        for seed in range(20):
            code = build_ltd_example(n, seed)
            if code.gap == 0:
                break
        assert code.gap == 0
        ops = {}
        x = lt.lt_encode(code, np.ones(code.secret_bits, np.uint8), seed)
        lt.lt_decode(code, x, ops=ops, check=False)
        assert "dense" not in ops
        counts[n] = ops["sparse"]
    for small, big in ((2000, 4000), (4000, 8000)):
        ratio = (counts[big] / counts[small]) / (big / small)
        assert 1 / 1.3 <= ratio <= 1.3


def test_restricted_code_security_matches_unrestricted():
    rng = np.random.default_rng(4)
    G, G1 = stacked_pair(DegreeDistribution.regular(3, 6), DegreeDistribution.regular(2, 6), 12, rng)
    code = lt.build_lt_code(G, G1)
    full = coset.build_code(G)
    msgs = ((np.arange(2**G.n_rows)[:, None] >> np.arange(G.n_rows)) & 1).astype(np.uint8)
    words_v = (msgs @ G.to_array()) % 2
    secrets = ((np.arange(2**G1.n_rows)[:, None] >> np.arange(G1.n_rows)) & 1).astype(np.uint8)
    for pattern in range(0, 2**12, 7):
        revealed = np.array([(pattern >> j) & 1 for j in range(12)], bool)
        z = lt.lt_encode(code, secrets[rng.integers(len(secrets))], rng)[revealed]
        counts = []
        for s in secrets:
            words = words_v ^ gf2.vec_mat(s, G1)
            counts.append(int(np.all(words[:, revealed] == z, axis=1).sum()))
        uniform = len(set(counts)) == 1
        if coset.is_secured(full, revealed):
            assert uniform
