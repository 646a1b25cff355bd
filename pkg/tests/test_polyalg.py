"""Exact polynomial arithmetic: known series, ring laws, serialization."""

from fractions import Fraction

import numpy as np
import pytest

from capbound.polyalg import (
    TriPoly,
    UniPoly,
    gegenbauer,
    gegenbauer_expand,
    rational,
    tripoly_from_json,
    tripoly_to_json,
)

F = Fraction


def random_tripoly(rng, max_deg=3, terms=6):
    out = {}
    for _ in range(terms):
        e = tuple(int(x) for x in rng.integers(0, max_deg + 1, size=3))
        out[e] = F(int(rng.integers(-9, 10)), int(rng.integers(1, 7)))
    return TriPoly(out)


def test_unipoly_basics():
    p = UniPoly((F(1), F(0), F(-2)))
    assert p.degree == 2
    assert p.coefficient(0) == 1
    assert p.coefficient(5) == 0
    assert UniPoly().degree == -1
    assert UniPoly((F(0),)).is_zero()
    q = UniPoly.x() ** 3
    assert q.coeffs == (0, 0, 0, 1)
    assert (p * q).degree == 5
    assert p(F(2)) == 1 - 2 * 4


def test_unipoly_numpy_evaluation():
    p = UniPoly((F(-1), F(0), F(2)))
    xs = np.linspace(-1.0, 1.0, 7)
    np.testing.assert_allclose(np.asarray(p(xs), dtype=float), 2 * xs**2 - 1)


def test_gegenbauer_known_values():
    assert gegenbauer(4, 2) == UniPoly((F(-1, 3), F(0), F(4, 3)))
    assert gegenbauer(2, 3) == UniPoly((F(0), F(-3), F(0), F(4)))


def test_gegenbauer_matches_legendre_for_n3():
    legendre = {
        2: UniPoly((F(-1, 2), F(0), F(3, 2))),
        3: UniPoly((F(0), F(-3, 2), F(0), F(5, 2))),
        4: UniPoly((F(3, 8), F(0), F(-30, 8), F(0), F(35, 8))),
    }
    for k, expected in legendre.items():
        assert gegenbauer(3, k) == expected


def test_gegenbauer_matches_chebyshev_u_for_n4():
    # U_k via its own recurrence, then normalized by U_k(1) = k + 1
    u_prev, u_cur = UniPoly.constant(F(1)), UniPoly((F(0), F(2)))
    for k in range(2, 7):
        u_next = UniPoly((F(0), F(2))) * u_cur - u_prev
        u_prev, u_cur = u_cur, u_next
        assert gegenbauer(4, k) == u_cur.scale(F(1, k + 1))


def test_gegenbauer_value_one_at_one():
    for n in range(2, 11):
        for k in range(0, 9):
            assert gegenbauer(n, k)(F(1)) == 1


def test_gegenbauer_orthogonality_under_weight():
    from capbound.harness import jacobi_rule

    n = 5
    nodes, weights = jacobi_rule((n - 3) / 2, 24, normalized=True)
    for j in range(5):
        for k in range(5):
            pj = gegenbauer(n, j)(nodes)
            pk = gegenbauer(n, k)(nodes)
            val = float(np.dot(weights, pj * pk))
            if j != k:
                assert abs(val) < 1e-13
            else:
                assert val > 0


def test_gegenbauer_expand_round_trip():
    n = 6
    p = UniPoly((F(2), F(-1), F(0), F(5, 3), F(7)))
    g = gegenbauer_expand(p, n)
    total = UniPoly()
    for i, gi in enumerate(g):
        total = total + gegenbauer(n, i).scale(gi)
    assert total == p
    basis_coeffs = gegenbauer_expand(gegenbauer(n, 3), n)
    assert basis_coeffs == [0, 0, 0, 1]


def test_gegenbauer_rejects_bad_arguments():
    with pytest.raises(ValueError):
        gegenbauer(1, 2)
    with pytest.raises(ValueError):
        gegenbauer(3, -1)


def test_tripoly_ring_laws():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a, b, c = (random_tripoly(rng) for _ in range(3))
        assert a * b == b * a
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        assert a - a == TriPoly.zero()


def test_tripoly_cancellation_strips_terms():
    a = TriPoly({(1, 0, 0): F(1), (0, 0, 1): F(2)})
    b = TriPoly({(1, 0, 0): F(-1)})
    assert (a + b).terms == {(0, 0, 1): F(2)}
    assert TriPoly({(2, 0, 0): F(0)}).is_zero()


def test_swap_is_an_involution_and_detects_symmetry():
    rng = np.random.default_rng(11)
    for _ in range(10):
        a = random_tripoly(rng)
        assert a.swap_uv().swap_uv() == a
        sym = a + a.swap_uv()
        assert sym.is_symmetric()
    asym = TriPoly({(2, 0, 1): F(1)})
    assert not asym.is_symmetric()


def test_restrict_diagonal_agrees_with_substitution():
    rng = np.random.default_rng(13)
    samples = [F(0), F(1), F(-1, 2), F(3, 5)]
    for _ in range(10):
        a = random_tripoly(rng)
        diag = a.restrict_diagonal()
        for x in samples:
            assert diag(x) == a(x, x, F(1))


def test_degree_reports():
    p = TriPoly({(2, 1, 3): F(1), (0, 4, 0): F(-2)})
    assert p.deg_u == 2 and p.deg_v == 4 and p.deg_t == 3
    assert p.deg_total == 6
    assert p.deg_ut() == 5
    assert TriPoly.zero().deg_total == -1


def test_monomial_order_is_graded_lex():
    p = TriPoly({(0, 0, 1): F(1), (1, 0, 0): F(1), (0, 1, 0): F(1), (2, 0, 0): F(1)})
    order = [e for e, _ in p.sorted_terms()]
    assert order == [(2, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_json_round_trip_is_exact_and_deterministic():
    rng = np.random.default_rng(17)
    for _ in range(10):
        p = random_tripoly(rng)
        text = tripoly_to_json(p)
        assert tripoly_from_json(text) == p
        assert tripoly_to_json(tripoly_from_json(text)) == text


def test_json_serializes_floats_as_exact_binary_fractions():
    p = TriPoly({(1, 1, 0): 0.1})
    q = tripoly_from_json(tripoly_to_json(p))
    assert q.coefficient(1, 1, 0) == F(0.1)


def test_json_rejects_foreign_documents():
    with pytest.raises(ValueError):
        tripoly_from_json('{"format": "something.else", "terms": []}')


def test_rational_coercions():
    assert rational("3/4") == F(3, 4)
    assert rational(2) == 2
    assert rational(0.5) == F(1, 2)
