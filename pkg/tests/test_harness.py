"""Quadrature and the numeric invariants it is built to check."""

from fractions import Fraction

import numpy as np
import pytest

from capbound.harness import (
    jacobi_rule,
    kernel_reproduce_test,
    mass_report,
    orthogonality_report,
    positivity_sample_test,
    quadrature_rule,
    random_interior_point,
    sphere_integral_crosscheck,
    total_mass,
)
from capbound.polyalg import TriPoly


def gauss_moment(exponent: Fraction, power: int) -> Fraction:
    # E[x^power] under (1-x^2)^exponent via the beta-function recurrence
    # m_{2k} = m_{2k-2} * (2k-1) / (2k + 2e + 1), m_0 = 1
    if power % 2:
        return Fraction(0)
    m = Fraction(1)
    for k in range(1, power // 2 + 1):
        m = m * (2 * k - 1) / (2 * k + 2 * exponent + 1)
    return m


def test_jacobi_rule_matches_exact_moments():
    # dimension 5 projects to the weight (1-x^2)^1
    nodes, weights = jacobi_rule(1.0, 6)
    for power in range(0, 12):
        exact = gauss_moment(Fraction(1), power)
        approx = float(np.sum(weights * nodes**power))
        assert approx == pytest.approx(float(exact), abs=1e-14)
    assert float(gauss_moment(Fraction(1), 2)) == pytest.approx(1 / 5)


def test_jacobi_rule_is_symmetric_and_normalized():
    nodes, weights = jacobi_rule(0.5, 9)
    assert np.allclose(nodes, -nodes[::-1])
    assert np.allclose(weights, weights[::-1])
    assert np.sum(weights) == pytest.approx(1.0)
    _, raw = jacobi_rule(0.0, 4, normalized=False)
    # unnormalized mass of (1-x^2)^0 on [-1, 1]
    assert np.sum(raw) == pytest.approx(2.0)


def test_jacobi_rule_rejects_bad_input():
    with pytest.raises(ValueError):
        jacobi_rule(-1.0, 4)
    with pytest.raises(ValueError):
        jacobi_rule(0.0, 0)


def test_total_mass_is_one_across_dimensions():
    report = mass_report(range(3, 11), degree=12)
    for n, dev in report.items():
        assert dev < 1e-13, f"mass deviates by {dev} at n={n}"


def test_orthogonality_of_normalized_family():
    report = orthogonality_report(4, 3)
    assert report["max_deviation"] < 1e-9
    assert report["entries"] == 16 + 9 + 4 + 1


def test_kernel_reproduces_point_evaluation():
    assert kernel_reproduce_test(4, 2, trials=50, seed=0) <= 1e-8


def test_positivity_of_sampled_pair_sums():
    assert positivity_sample_test(3, 2, trials=20, seed=0) >= -1e-9
    # determinism: the sweep is seeded
    a = positivity_sample_test(4, 2, trials=5, seed=3)
    b = positivity_sample_test(4, 2, trials=5, seed=3)
    assert a == b


def test_random_interior_point_is_inside_the_domain():
    rng = np.random.default_rng(12)
    for _ in range(200):
        u, v, t = random_interior_point(rng)
        assert -1 < u < 1 and -1 < v < 1
        gram = 1 + 2 * u * v * t - u * u - v * v - t * t
        assert gram > -1e-12


def test_quadrature_matches_monte_carlo():
    P = TriPoly({(1, 1, 0): 1.0, (0, 0, 2): 0.5, (0, 0, 0): -0.25})
    report = sphere_integral_crosscheck(P, n=5, samples=20000, seed=1)
    assert report["agrees"]


def test_quadrature_rule_rejects_bad_input():
    with pytest.raises(ValueError):
        quadrature_rule(2, 4)
    with pytest.raises(ValueError):
        quadrature_rule(4, -1)
    rule = quadrature_rule(6, 4)
    assert total_mass(rule) == pytest.approx(1.0)
