import numpy as np
import pytest

from ris_crn.sdp import (SdpConstraint, SdpProblem, check_hermitian,
                         hermitian_to_real, principal_eigpair, solve)


def _random_hermitian(n, rng):
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (m + m.conj().T)


def _random_psd(n, rng):
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return m @ m.conj().T


# -- real embedding -------------------------------------------------------

def test_embedding_real_scalar():
    np.testing.assert_array_equal(hermitian_to_real(np.array([[1.0 + 0j]])),
                                  np.eye(2))


def test_embedding_pauli_spectrum():
    c = np.array([[0, -1j], [1j, 0]])
    vals = np.sort(np.linalg.eigvalsh(hermitian_to_real(c)))
    np.testing.assert_allclose(vals, [-1, -1, 1, 1], atol=1e-12)


def test_embedding_doubles_spectrum(rng):
    c = _random_hermitian(3, rng)
    vals = np.sort(np.linalg.eigvalsh(hermitian_to_real(c)))
    expected = np.sort(np.repeat(np.linalg.eigvalsh(c), 2))
    np.testing.assert_allclose(vals, expected, atol=1e-10)


def test_embedding_preserves_inner_products(rng):
    a = _random_hermitian(4, rng)
    b = _random_hermitian(4, rng)
    lhs = 0.5 * np.trace(hermitian_to_real(a) @ hermitian_to_real(b))
    rhs = np.trace(a @ b).real
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_embedding_rejects_non_hermitian(rng):
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    with pytest.raises(ValueError):
        hermitian_to_real(m)


def test_check_hermitian(rng):
    check_hermitian(_random_hermitian(3, rng))
    with pytest.raises(ValueError):
        check_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


# -- solver ---------------------------------------------------------------

def test_rank_one_objective_trace_ball(rng):
    a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    p = 4.0
    problem = SdpProblem(np.outer(a, a.conj()),
                         [SdpConstraint(np.eye(3), "<=", p)])
    sol = solve(problem)
    assert sol.status == "optimal"
    norm2 = np.vdot(a, a).real
    assert sol.objective == pytest.approx(p * norm2, rel=1e-6)
    np.testing.assert_allclose(sol.x, p * np.outer(a, a.conj()) / norm2,
                               atol=1e-5 * p * norm2)


def test_contradictory_trace_constraints_infeasible():
    problem = SdpProblem(np.eye(2),
                         [SdpConstraint(np.eye(2), "<=", 1.0),
                          SdpConstraint(np.eye(2), ">=", 2.0)])
    sol = solve(problem)
    assert sol.status == "infeasible"


def test_unit_diagonal_equalities(rng):
    n = 4
    c = _random_hermitian(n, rng)
    cons = [SdpConstraint(np.outer(np.eye(n)[i], np.eye(n)[i]), "=", 1.0)
            for i in range(n)]
    sol = solve(SdpProblem(c, cons))
    assert sol.status == "optimal"
    np.testing.assert_allclose(np.diag(sol.x).real, 1.0, atol=1e-6)
    assert np.min(np.linalg.eigvalsh(sol.x)) >= -1e-7 * np.trace(sol.x).real


def test_constraint_scaling_invariance(rng):
    a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    base = [SdpConstraint(np.outer(b, b.conj()), "<=", 0.5),
            SdpConstraint(np.eye(4), "<=", 2.0)]
    scaled = [SdpConstraint(37.0 * np.outer(b, b.conj()), "<=", 37.0 * 0.5),
              SdpConstraint(0.01 * np.eye(4), "<=", 0.01 * 2.0)]
    c = np.outer(a, a.conj())
    s1 = solve(SdpProblem(c, base))
    s2 = solve(SdpProblem(c, scaled))
    assert s1.status == s2.status == "optimal"
    assert s2.objective == pytest.approx(s1.objective, rel=1e-5)
    np.testing.assert_allclose(s2.x, s1.x, atol=1e-5 * (1 + abs(s1.objective)))


def test_solution_certificates(rng):
    a = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    b = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    problem = SdpProblem(np.outer(a, a.conj()),
                         [SdpConstraint(np.outer(b, b.conj()), "<=", 1.0),
                          SdpConstraint(np.eye(5), "<=", 10.0)])
    sol = solve(problem)
    assert sol.status == "optimal"
    assert problem.constraint_violation(sol.x) <= 1e-6 * (1 + sol.objective)
    assert sol.gap <= 1e-6 * (1 + abs(sol.objective))
    assert np.min(np.linalg.eigvalsh(sol.x)) >= -1e-7 * np.trace(sol.x).real


def test_solver_deterministic(rng):
    c = _random_hermitian(4, rng)
    problem = SdpProblem(c, [SdpConstraint(np.eye(4), "<=", 3.0),
                             SdpConstraint(_random_psd(4, rng), "<=", 5.0)])
    s1 = solve(problem)
    s2 = solve(problem)
    np.testing.assert_array_equal(s1.x, s2.x)
    assert s1.objective == s2.objective


def test_problem_json_round_trip(rng):
    problem = SdpProblem(_random_hermitian(3, rng),
                         [SdpConstraint(_random_hermitian(3, rng), "<=", 2.0),
                          SdpConstraint(np.eye(3), "=", 1.0)])
    back = SdpProblem.from_json(problem.to_json())
    np.testing.assert_allclose(back.c, problem.c, atol=1e-15)
    for c1, c2 in zip(back.constraints, problem.constraints):
        np.testing.assert_allclose(c1.a, c2.a, atol=1e-15)
        assert c1.relation == c2.relation
        assert c1.b == c2.b


# -- principal eigenpair --------------------------------------------------

def test_eigpair_identity():
    lam, q = principal_eigpair(np.eye(2, dtype=complex))
    assert lam == pytest.approx(1.0)
    assert np.linalg.norm(np.eye(2) @ q - lam * q) <= 1e-8 * (1 + lam)


def test_eigpair_diagonal():
    lam, q = principal_eigpair(np.diag([3.0, 1.0]).astype(complex))
    assert lam == pytest.approx(3.0)
    np.testing.assert_allclose(np.abs(q), [1.0, 0.0], atol=1e-12)


def test_eigpair_matches_dense_oracle(rng):
    x = _random_psd(6, rng)
    lam, q = principal_eigpair(x)
    vals = np.linalg.eigvalsh(x)
    assert lam == pytest.approx(vals[-1], rel=1e-9)
    assert np.linalg.norm(x @ q - lam * q) <= 1e-8 * (1 + lam)
    assert np.linalg.norm(q) == pytest.approx(1.0, rel=1e-12)


def test_eigpair_canonical_phase(rng):
    x = _random_psd(5, rng)
    _, q = principal_eigpair(x)
    first = q[np.flatnonzero(np.abs(q) > 1e-9)[0]]
    assert abs(first.imag) <= 1e-12 * abs(first)
    assert first.real > 0
