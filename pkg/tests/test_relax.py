"""Relaxation assembly: layouts, row coefficients, exact substitution."""

from fractions import Fraction

import pytest

from capbound.relax import (
    CapParams,
    SdpProblem,
    LinearConstraint,
    assemble_distance_lp_comparison,
    build_cap_sdp,
    domain_system,
    fix_variables,
    lp_formula_bound,
    monomial_basis,
    radial_scales,
)
from capbound.zonal import zonal_family

F = Fraction


def desk_params(**kw):
    base = dict(n=3, cos_theta=F(1, 2), cos_phi=F(0), d=2, N=2)
    base.update(kw)
    return CapParams(**base)


def test_params_validation():
    with pytest.raises(ValueError):
        desk_params(n=2)
    with pytest.raises(ValueError):
        desk_params(cos_theta=F(1))
    with pytest.raises(ValueError):
        desk_params(cos_phi=F(-1))
    with pytest.raises(ValueError):
        desk_params(d=0)
    with pytest.raises(ValueError):
        desk_params(N=1)
    with pytest.raises(ValueError):
        desk_params(radial_margin=-1)
    assert desk_params().describe()["radial_margin"] == 1


def test_monomial_basis_graded_order():
    assert monomial_basis(1, 4) == [(0,), (1,), (2,), (3,), (4,)]
    assert monomial_basis(3, 2) == [
        (0, 0, 0),
        (1, 0, 0),
        (0, 1, 0),
        (0, 0, 1),
        (2, 0, 0),
        (1, 1, 0),
        (1, 0, 1),
        (0, 2, 0),
        (0, 1, 1),
        (0, 0, 2),
    ]


def test_domain_system_generators():
    dom = domain_system(desk_params())
    # p(u) = -(u - cos phi)(u - 1) at cos phi = 0 is u - u^2
    assert list(dom.p.coeffs) == [F(0), F(1), F(-1)]
    # p3 = -(t + 1)(t - cos theta) at cos theta = 1/2
    assert dom.p3.evaluate(F(0), F(0), F(1, 2)) == 0
    assert dom.p3.evaluate(F(0), F(0), F(-1)) == 0
    assert dom.p3.evaluate(F(0), F(0), F(0)) == F(1, 2)
    # p4 is the pairwise Gram determinant, zero at coplanar triples
    assert dom.p4.evaluate(F(1), F(1), F(1)) == 0
    assert dom.p4.evaluate(F(0), F(0), F(0)) == 1
    # p5 orders the pole inner products
    assert dom.p5.evaluate(F(1, 4), F(3, 4), F(0)) == F(1, 2)


def test_block_inventory_default_margin():
    prob = build_cap_sdp(desk_params())
    assert prob.block_sizes() == {
        "F_0": 4,
        "F_1": 3,
        "F_2": 2,
        "Gram(q_0)": 3,
        "Gram(q_1)": 2,
        "Gram(r_0)": 10,
        "Gram(r_1)": 4,
        "Gram(r_2)": 4,
        "Gram(r_3)": 4,
        "Gram(r_4)": 4,
        "Gram(r_5)": 4,
    }
    assert prob.scalars == ["M"]
    uni = [c for c in prob.constraints if c.tag.startswith("diag:")]
    full = [c for c in prob.constraints if c.tag.startswith("full:")]
    assert (len(uni), len(full), len(prob.constraints)) == (7, 44, 51)


def test_block_inventory_paper_margin():
    prob = build_cap_sdp(desk_params(radial_margin=0))
    sizes = prob.block_sizes()
    assert (sizes["F_0"], sizes["F_1"], sizes["F_2"]) == (3, 2, 1)
    assert sizes["Gram(r_0)"] == 10
    uni = [c for c in prob.constraints if c.tag.startswith("diag:")]
    assert (len(uni), len(prob.constraints)) == (5, 46)


def test_problem_metadata():
    prob = build_cap_sdp(desk_params())
    md = prob.metadata
    assert md["kind"] == "cap_sdp"
    assert md["bound"] == "1 + M"
    assert (md["n"], md["d"], md["N"], md["radial_margin"]) == (3, 2, 2, 1)
    assert md["gram_bases"]["Gram(q_1)"] == [[0], [1]]
    assert md["gram_bases"]["Gram(r_1)"] == [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
    scales = md["radial_scale"]
    assert scales == radial_scales(desk_params())
    assert [len(row) for row in scales] == [4, 3, 2]
    assert prob.objective == {("s", "M"): F(1)}
    assert prob.objective_offset == 0


def test_objective_and_constant_rows():
    prob = build_cap_sdp(desk_params())
    rows = {c.tag: c for c in prob.constraints}
    diag0 = rows["diag:u^0"]
    assert diag0.rhs == 0
    assert diag0.coeffs[("s", "M")] == -1
    full0 = rows["full:u^0v^0t^0"]
    assert full0.rhs == -1
    assert ("s", "M") not in full0.coeffs


def test_diag_rows_match_restricted_entries():
    # the coefficient of F_k[i][j] across diag rows is the rescaled
    # coefficient vector of sym_entry(k, i, j)(u, u, 1), doubled off-diagonal
    params = desk_params()
    prob = build_cap_sdp(params)
    fam = zonal_family(3, 2 + 1)
    scales = prob.metadata["radial_scale"]
    rows = {c.tag: c for c in prob.constraints}
    degree = max(
        int(c.tag.split("^")[1]) for c in prob.constraints if c.tag.startswith("diag:")
    )
    for k, exps in enumerate(scales):
        size = len(exps)
        for i in range(size):
            for j in range(i, size):
                poly = fam.sym_entry(k, i, j).restrict_diagonal()
                mult = F(2) ** (exps[i] + exps[j]) * (1 if i == j else 2)
                for m in range(degree + 1):
                    got = rows[f"diag:u^{m}"].coeffs.get(("b", f"F_{k}", i, j), F(0))
                    assert got == poly.coefficient(m) * mult


def test_full_rows_match_entries():
    params = desk_params()
    prob = build_cap_sdp(params)
    fam = zonal_family(3, 2 + 1)
    scales = prob.metadata["radial_scale"]
    rows = {c.tag: c for c in prob.constraints}
    for k, exps in enumerate(scales):
        size = len(exps)
        for i in range(size):
            for j in range(i, size):
                poly = fam.sym_entry(k, i, j)
                mult = F(2) ** (exps[i] + exps[j]) * (1 if i == j else 2)
                seen = F(0)
                for (a, b, c), x in poly.terms.items():
                    tag = f"full:u^{a}v^{b}t^{c}"
                    got = rows[tag].coeffs.get(("b", f"F_{k}", i, j), F(0))
                    assert got == x * mult
                    seen += abs(got)
                assert seen != 0


def test_low_degree_multiplier_space_is_infeasible():
    # at N=2 no multiplier combination can witness a finite bound and the
    # solver's ray detector reports that instead of a spurious optimum
    from capbound.conic import SolverConfig, solve

    sol = solve(build_cap_sdp(desk_params()), SolverConfig(tolerance=1e-8))
    assert sol.status == "infeasible"
    assert not sol.converged


def test_bound_tightens_with_degree():
    from capbound.conic import SolverConfig, solve

    values = []
    for d in (3, 4):
        prob = build_cap_sdp(desk_params(d=d, N=d))
        sol = solve(prob, SolverConfig(tolerance=1e-8))
        assert sol.converged
        values.append(sol.objective_value + 1)
    assert values[1] <= values[0] + 1e-6


def test_fix_variables_consistent_and_inconsistent():
    rows = [
        LinearConstraint(
            coeffs={("b", "A", 0, 0): F(1), ("s", "c"): F(1)}, rhs=F(5), tag="r0"
        ),
        LinearConstraint(coeffs={("s", "c"): F(2)}, rhs=F(4), tag="r1"),
    ]
    prob = SdpProblem(
        blocks=[("A", 1)],
        scalars=["c"],
        objective={("s", "c"): F(1)},
        objective_offset=F(0),
        constraints=rows,
        metadata={},
    )
    reduced = fix_variables(prob, scalar_values={"c": F(2)})
    assert reduced.scalars == []
    assert len(reduced.constraints) == 1
    assert reduced.constraints[0].rhs == F(3)
    with pytest.raises(ValueError):
        fix_variables(prob, scalar_values={"c": F(1)})


def test_fix_variables_detects_inconsistent_witness():
    prob = build_cap_sdp(desk_params())
    values = {label: [[F(0)] * s for _ in range(s)] for label, s in prob.block_sizes().items()}
    values["Gram(q_0)"][0][0] = F(4)
    values["Gram(r_0)"][0][0] = F(1)
    with pytest.raises(ValueError):
        fix_variables(prob, block_values=values, scalar_values={"M": F(5)})


def test_lp_formula_bound():
    assert lp_formula_bound(3, F(1, 4)) == 18
    assert lp_formula_bound(4, F(0)) == 8
    assert lp_formula_bound(3, F(1, 2)) is None
    assert lp_formula_bound(3, F(1, 3)) is None


def test_distance_lp_assembly():
    prob = assemble_distance_lp_comparison(desk_params())
    assert prob.metadata["kind"] == "distance_lp"
    sizes = prob.block_sizes()
    assert all(sizes[f"f_{k}"] == 1 for k in range(1, 5))
    assert len(sizes) == 6
