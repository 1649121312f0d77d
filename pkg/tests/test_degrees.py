import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wiretap.degrees import (
    DegreeDistribution,
    Ensemble,
    NodeDistribution,
    as_ensemble,
    coefficients_close,
    combine_stacked,
    combine_stacked_nodes,
    de_converges,
    de_threshold,
    design_rate,
    edge_to_node,
    format_polynomial,
    node_to_edge,
    parse_polynomial,
    read_distribution,
    split_residual,
    swapped,
    write_distribution,
)
from wiretap.ldpc import sample_graph

LAMBDA_G = DegreeDistribution(parse_polynomial("0.6087x+0.3913x^2"), parse_polynomial("x^6"))
V_G1 = NodeDistribution(parse_polynomial("0.7+0.3x", shift=0))


def distributions(max_degree=8):
    coeffs = st.dictionaries(st.integers(1, max_degree), st.integers(1, 20), min_size=1, max_size=4)

    def build(lam, rho):
        return DegreeDistribution(
            {d: Fraction(c, sum(lam.values())) for d, c in lam.items()},
            {d: Fraction(c, sum(rho.values())) for d, c in rho.items()},
        )

    return st.builds(build, coeffs, coeffs)


# -- types -----------------------------------------------------------------


def test_validation():
    with pytest.raises(ValueError):
        DegreeDistribution({2: 0.5}, {6: 1})
    with pytest.raises(ValueError):
        DegreeDistribution({0: 1}, {6: 1})
    with pytest.raises(ValueError):
        DegreeDistribution({2: 1.2, 3: -0.2}, {6: 1})
    with pytest.raises(ValueError):
        DegreeDistribution({3: 1}, {})
    assert NodeDistribution({0: 0.5, 1: 0.5}).mean_degree == 0.5


def test_parse_and_format():
    assert parse_polynomial("x^2") == {3: 1}
    assert parse_polynomial("0.7+0.3x", shift=0) == {0: Fraction(7, 10), 1: Fraction(3, 10)}
    assert parse_polynomial("1/2 x + 1/2x^5") == {2: Fraction(1, 2), 6: Fraction(1, 2)}
    poly = {2: Fraction(1, 4), 4: Fraction(3, 4)}
    assert parse_polynomial(format_polynomial(poly)) == poly
    with pytest.raises(ValueError):
        parse_polynomial("x^^2")


def test_distribution_file_roundtrip(tmp_path):
    d = DegreeDistribution({2: Fraction(1, 3), 3: Fraction(2, 3)}, {6: 1})
    write_distribution(d, tmp_path / "d.txt")
    assert read_distribution(tmp_path / "d.txt") == d
    e = Ensemble(V_G1, {6: 1})
    write_distribution(e, tmp_path / "e.txt")
    assert read_distribution(tmp_path / "e.txt") == e


# -- conversions -----------------------------------------------------------


def test_edge_to_node_examples():
    assert edge_to_node(DegreeDistribution.regular(3, 6)).v == {3: 1}
    v = edge_to_node(LAMBDA_G).v
    assert coefficients_close(v, {2: 0.7, 3: 0.3}, 1e-4)


@given(distributions())
def test_edge_node_roundtrip(d):
    assert node_to_edge(edge_to_node(d)) == d.lam


def test_node_to_edge_drops_degree_zero():
    assert node_to_edge(V_G1) == {1: 1}
    with pytest.raises(ValueError):
        node_to_edge({0: 1})


def test_design_rate_examples():
    assert design_rate(DegreeDistribution.regular(3, 6)) == Fraction(1, 2)
    assert design_rate(DegreeDistribution.regular(5, 6)) == Fraction(1, 6)
    assert design_rate(DegreeDistribution.regular(2, 2)) == 0


# -- combine and split -----------------------------------------------------


def test_stacking_regular_codes():
    d = combine_stacked(DegreeDistribution.regular(3, 6), DegreeDistribution.regular(2, 6))
    assert d == DegreeDistribution.regular(5, 6)


def test_stacking_irregular_example():
    d = combine_stacked(LAMBDA_G, Ensemble(V_G1, {7: 1}))
    assert coefficients_close(d.lam, {2: 0.3769, 3: 0.4846, 4: 0.1385}, 1e-4)
    assert d.rho == {7: 1}


def test_stacking_irregular_secrecy_rate():
    stacked = combine_stacked_nodes(LAMBDA_G, Ensemble(V_G1, {7: 1}))
    drop = float(design_rate(LAMBDA_G) - design_rate(stacked))
    assert abs(drop - 0.0429) <= 0.0005


def test_stacking_with_empty_matrix():
    g = DegreeDistribution.regular(3, 6)
    assert combine_stacked(g, DegreeDistribution()) == g


def test_split_examples():
    residual = split_residual(DegreeDistribution.regular(5, 6), DegreeDistribution.regular(3, 6))
    assert residual.to_edge() == DegreeDistribution({2: 1}, {6: 1})
    same = split_residual(DegreeDistribution.regular(3, 6), DegreeDistribution.regular(3, 6))
    assert same.to_edge().is_empty
    assert split_residual(DegreeDistribution.regular(3, 6), DegreeDistribution.regular(5, 6)) is None


@settings(max_examples=80)
@given(distributions(), distributions())
def test_split_inverts_stack(g, g1):
    stacked = combine_stacked_nodes(g, g1)
    residual = split_residual(stacked, g)
    assert residual is not None
    assert coefficients_close(residual.nodes.v, as_ensemble(g1).nodes.v)
    assert coefficients_close(residual.rho, g1.rho)


def test_pooled_stack_histogram_1000_samples():
    # socket degrees of [G; G1] pooled over 1000 independent samples
    g = LAMBDA_G
    g1 = Ensemble(V_G1, {6: 1})
    predicted = combine_stacked_nodes(g, g1).nodes.v
    rng = np.random.default_rng(2024)
    n = 600
    counts = np.zeros(8, np.int64)
    for _ in range(1000):
        a = sample_graph(g, n, rng)
        b = sample_graph(g1, n, rng)
        counts += np.bincount(a.socket_var_degrees + b.socket_var_degrees, minlength=8)
    total = counts.sum()
    for d in range(8):
        p = float(predicted.get(d, 0))
        sigma = math.sqrt(total * p * (1 - p))
        assert abs(counts[d] - total * p) <= 3 * sigma + 1e-9, (d, counts[d], total * p)


# -- density evolution -----------------------------------------------------


@pytest.mark.parametrize(
    "d, expected, tol",
    [
        (DegreeDistribution.regular(3, 6), 0.4294, 0.001),
        (DegreeDistribution.regular(5, 6), 0.551, 0.002),
        (DegreeDistribution.regular(2, 6), 0.2000, 0.001),
    ],
)
def test_threshold_values(d, expected, tol):
    start = time.perf_counter()
    assert abs(de_threshold(d) - expected) <= tol
    assert time.perf_counter() - start < 5.0


def test_threshold_of_irregular_code():
    assert abs(de_threshold(LAMBDA_G) - 0.2625) <= 0.001


def test_threshold_brackets_fixed_point():
    d = DegreeDistribution.regular(3, 6)
    t = de_threshold(d)
    assert de_converges(d, t)
    assert not de_converges(d, t + 2e-4)


@pytest.mark.parametrize("dv", [2, 3, 4])
def test_threshold_monotone_in_check_degree(dv):
    values = [de_threshold(DegreeDistribution.regular(dv, dc)) for dc in range(dv + 1, dv + 6)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    mixed = de_threshold(DegreeDistribution({dv: 1}, {6: Fraction(1, 2), 8: Fraction(1, 2)}))
    assert mixed <= de_threshold(DegreeDistribution.regular(dv, 6))


def test_swapped():
    d = DegreeDistribution({2: 1}, {5: Fraction(1, 2), 6: Fraction(1, 2)})
    assert swapped(swapped(d)) == d
    assert swapped(d).lam == d.rho
