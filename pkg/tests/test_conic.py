"""Interior-point solver on problems with known optima, plus SDPA round trips."""

import math
from fractions import Fraction

import numpy as np
import pytest

from capbound.conic import SolverConfig, export_sdpa, import_sdpa, solve
from capbound.relax import LinearConstraint, SdpProblem

F = Fraction


def make_problem(blocks, scalars, objective, rows, offset=F(0)):
    return SdpProblem(
        blocks=blocks,
        scalars=scalars,
        objective=objective,
        objective_offset=offset,
        constraints=[LinearConstraint(coeffs=c, rhs=r, tag=t) for c, r, t in rows],
        metadata={},
    )


def test_single_variable_equality():
    prob = make_problem(
        blocks=[("X", 1)],
        scalars=[],
        objective={("b", "X", 0, 0): F(1)},
        rows=[({("b", "X", 0, 0): F(1)}, F(3), "fix")],
    )
    sol = solve(prob, SolverConfig(tolerance=1e-9))
    assert sol.status == "optimal"
    assert sol.converged
    assert abs(sol.objective_value - 3.0) < 1e-7
    assert abs(sol.dual_objective - 3.0) < 1e-7
    assert sol.block_values["X"][0][0] == pytest.approx(3.0, abs=1e-7)


def test_smallest_eigenvalue_problem():
    # min <C, X> with tr X = 1 picks out the smallest eigenvalue of C
    c11, c12, c22 = 2.0, 1.0, 3.0
    prob = make_problem(
        blocks=[("X", 2)],
        scalars=[],
        objective={
            ("b", "X", 0, 0): F(2),
            ("b", "X", 0, 1): F(2),
            ("b", "X", 1, 1): F(3),
        },
        rows=[({("b", "X", 0, 0): F(1), ("b", "X", 1, 1): F(1)}, F(1), "trace")],
    )
    lam_min = (c11 + c22) / 2 - math.hypot((c11 - c22) / 2, c12)
    sol = solve(prob, SolverConfig(tolerance=1e-9))
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(lam_min, abs=1e-7)
    assert sol.dual_objective == pytest.approx(lam_min, abs=1e-7)
    X = np.array(sol.block_values["X"])
    assert min(np.linalg.eigvalsh(X)) > -1e-9


def test_free_scalar_and_offset():
    # min m subject to m - X_00 = 0, X_00 = 2, shifted by a constant
    prob = make_problem(
        blocks=[("X", 1)],
        scalars=["m"],
        objective={("s", "m"): F(1)},
        rows=[
            ({("s", "m"): F(1), ("b", "X", 0, 0): F(-1)}, F(0), "link"),
            ({("b", "X", 0, 0): F(1)}, F(2), "pin"),
        ],
        offset=F(7),
    )
    sol = solve(prob, SolverConfig(tolerance=1e-9))
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(9.0, abs=1e-6)
    assert sol.scalars["m"] == pytest.approx(2.0, abs=1e-6)


def test_weak_duality_and_replay():
    rng = np.random.default_rng(3)
    A1 = rng.normal(size=(3, 3))
    A1 = (A1 + A1.T) / 2
    prob = make_problem(
        blocks=[("X", 3)],
        scalars=[],
        objective={
            ("b", "X", i, j): F(str(round(A1[i][j] + (3.0 if i == j else 0.0), 3)))
            for i in range(3)
            for j in range(i, 3)
        },
        rows=[
            ({("b", "X", i, i): F(1) for i in range(3)}, F(1), "trace"),
            ({("b", "X", 0, 1): F(1)}, F(1, 10), "pin"),
        ],
    )
    config = SolverConfig(tolerance=1e-8)
    sol = solve(prob, config)
    assert sol.converged
    # dual never exceeds primal beyond the residual allowance
    assert sol.dual_objective <= sol.objective_value + 1e-6
    # replay of the equality rows from the returned matrices stays within
    # ten times the solver tolerance
    X = np.array(sol.block_values["X"])
    assert abs(X.trace() - 1.0) <= 10 * config.tolerance
    assert abs(X[0, 1] - 0.1) <= 10 * config.tolerance
    assert sol.residuals["primal_infeasibility"] <= 10 * config.tolerance


def test_deterministic_reruns():
    prob = make_problem(
        blocks=[("X", 2)],
        scalars=[],
        objective={("b", "X", 0, 0): F(1), ("b", "X", 1, 1): F(2)},
        rows=[
            ({("b", "X", 0, 0): F(1), ("b", "X", 1, 1): F(1)}, F(1), "trace"),
        ],
    )
    first = solve(prob, SolverConfig(tolerance=1e-9))
    second = solve(prob, SolverConfig(tolerance=1e-9))
    assert first.objective_value == second.objective_value
    assert first.iterations == second.iterations


def test_infeasible_equalities_detected():
    # tr X = -1 cannot hold for a PSD matrix
    prob = make_problem(
        blocks=[("X", 2)],
        scalars=[],
        objective={("b", "X", 0, 0): F(1)},
        rows=[
            ({("b", "X", 0, 0): F(1), ("b", "X", 1, 1): F(1)}, F(-1), "trace"),
        ],
    )
    sol = solve(prob, SolverConfig(tolerance=1e-8))
    assert sol.status == "infeasible"
    assert not sol.converged


def test_unknown_backend_rejected():
    prob = make_problem(
        blocks=[("X", 1)],
        scalars=[],
        objective={("b", "X", 0, 0): F(1)},
        rows=[({("b", "X", 0, 0): F(1)}, F(1), "fix")],
    )
    with pytest.raises(ValueError):
        solve(prob, SolverConfig(backend="mystery"))


def test_sdpa_round_trip(tmp_path):
    prob = make_problem(
        blocks=[("X", 2), ("Y", 1)],
        scalars=["m"],
        objective={("s", "m"): F(1)},
        rows=[
            (
                {("s", "m"): F(1), ("b", "X", 0, 0): F(-1), ("b", "X", 0, 1): F(-1)},
                F(0),
                "link",
            ),
            ({("b", "X", 0, 0): F(1), ("b", "X", 1, 1): F(1)}, F(2), "trace"),
            ({("b", "Y", 0, 0): F(1), ("b", "X", 0, 1): F(-1)}, F(0), "tie"),
        ],
        offset=F(1),
    )
    path = tmp_path / "toy.dat-s"
    export_sdpa(prob, str(path))
    back = import_sdpa(str(path))
    direct = solve(prob, SolverConfig(tolerance=1e-9))
    again = solve(back, SolverConfig(tolerance=1e-9))
    assert direct.converged and again.converged
    assert direct.objective_value == pytest.approx(again.objective_value, abs=1e-6)


def test_sdpa_reexport_idempotent_without_scalars(tmp_path):
    # free scalars are split into a diagonal block on export and stay that
    # way, so byte-level idempotence is promised only for pure cone data
    prob = make_problem(
        blocks=[("X", 2)],
        scalars=[],
        objective={("b", "X", 0, 0): F(1), ("b", "X", 1, 1): F(3, 2)},
        rows=[
            ({("b", "X", 0, 0): F(1), ("b", "X", 1, 1): F(1)}, F(1), "trace"),
            ({("b", "X", 0, 1): F(2)}, F(1, 4), "pin"),
        ],
    )
    path = tmp_path / "pure.dat-s"
    path2 = tmp_path / "pure2.dat-s"
    export_sdpa(prob, str(path))
    export_sdpa(import_sdpa(str(path)), str(path2))
    assert path.read_text() == path2.read_text()


def test_sdpa_export_of_cap_problem(tmp_path):
    from capbound.relax import CapParams, build_cap_sdp

    prob = build_cap_sdp(CapParams(n=3, cos_theta=F(1, 2), cos_phi=0, d=3, N=3))
    path = tmp_path / "cap.dat-s"
    export_sdpa(prob, str(path))
    back = import_sdpa(str(path))
    assert [s for _, s in back.blocks[: len(prob.blocks)]] == [
        s for _, s in prob.blocks
    ]
    a = solve(prob, SolverConfig(tolerance=1e-8))
    b = solve(back, SolverConfig(tolerance=1e-8))
    assert a.converged and b.converged
    assert a.objective_value == pytest.approx(b.objective_value, abs=1e-5)
