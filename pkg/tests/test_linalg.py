import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from actplace import linalg
from actplace.errors import DimensionError, InvalidInputError, ParameterError, StabilityError
from oracles import kronecker_lyapunov, taylor_expm, trace_inverse

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@given(arrays(float, (4, 4), elements=finite))
def test_expm_matches_taylor_oracle(M):
    ref = taylor_expm(M)
    assert np.allclose(linalg.expm(M), ref, rtol=1e-10, atol=1e-12 * np.abs(ref).max())


def test_expm_of_nilpotent_is_polynomial():
    N = np.diag([1.0, 1.0, 1.0], -1)
    expected = np.eye(4) + N + N @ N / 2 + N @ N @ N / 6
    assert np.allclose(linalg.expm(N), expected, rtol=0, atol=1e-15)


def test_expm_rejects_bad_input():
    with pytest.raises(DimensionError):
        linalg.expm(np.ones((2, 3)))
    with pytest.raises(InvalidInputError):
        linalg.expm(np.array([[np.nan]]))


def _stable(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    return A - (np.max(np.linalg.eigvals(A).real) + 0.5) * np.eye(n)


@pytest.mark.parametrize('n', [1, 3, 8, 20])
def test_small_lyapunov_agrees_with_bartels_stewart(n):
    A = _stable(n, n)
    Q = np.eye(n)
    G = linalg.solve_lyapunov(A, Q)
    ref = scipy.linalg.solve_continuous_lyapunov(A, -Q)
    assert np.linalg.norm(G - ref) <= 1e-10 * np.linalg.norm(ref)
    assert linalg.lyapunov_residual(A, G, Q) < 1e-12


def test_large_lyapunov_agrees_with_kronecker_oracle():
    n = linalg.KRONECKER_MAX_N + 5
    A = _stable(n, 7)
    Q = np.zeros((n, n))
    Q[3, 3] = 1.0
    G = linalg.solve_lyapunov(A, Q)
    ref = kronecker_lyapunov(A, Q)
    assert np.linalg.norm(G - ref) <= 1e-9 * np.linalg.norm(ref)
    assert np.array_equal(G, G.T)


def test_lyapunov_many_matches_single_solves():
    A = _stable(6, 2)
    Qs = np.zeros((6, 6, 6))
    Qs[np.arange(6), np.arange(6), np.arange(6)] = 1.0
    G = linalg.solve_lyapunov_many(A, Qs)
    for k in range(6):
        assert np.allclose(G[k], linalg.solve_lyapunov(A, Qs[k]), rtol=1e-13, atol=0)
    # additivity: the per-node solutions sum to the all-node one
    assert np.allclose(G.sum(axis=0), linalg.solve_lyapunov(A, np.eye(6)), rtol=1e-12)


def test_lyapunov_rejects_unstable_and_reports_eigenvalue():
    A = np.array([[0.5, 1.0], [0.0, -1.0]])
    with pytest.raises(StabilityError) as info:
        linalg.solve_lyapunov(A, np.eye(2))
    assert info.value.eigenvalue == pytest.approx(0.5)
    with pytest.raises(StabilityError):
        linalg.check_hurwitz(np.zeros((2, 2)))


def test_lyapunov_shape_mismatch():
    with pytest.raises(DimensionError):
        linalg.solve_lyapunov(-np.eye(2), np.eye(3))
    with pytest.raises(DimensionError):
        linalg.solve_lyapunov_many(-np.eye(2), np.eye(2))


def test_symmetrize_and_psd_checks():
    assert np.array_equal(linalg.symmetrize(np.array([[1.0, 2.0], [2.0, 1.0]])),
                          np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        linalg.symmetrize(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        linalg.psd_eigh(np.diag([1.0, -0.5]))
    lam, _ = linalg.psd_eigh(np.diag([1.0, -1e-12, 1e-13]))
    assert lam[0] == 0.0 and lam[1] == 1e-13
    lam, _ = linalg.psd_eigh(np.diag([1.0, -1e-12, 1e-13]), zero_tol=1e-12)
    assert np.array_equal(lam, [0.0, 0.0, 1.0])


@given(arrays(float, (5, 3), elements=finite), st.floats(1e-3, 10))
def test_trace_perturbed_inverse_matches_explicit_inverse(X, eps):
    M = X @ X.T
    assert linalg.trace_perturbed_inverse(M, eps) == pytest.approx(trace_inverse(M, eps), rel=1e-9)


def test_trace_perturbed_inverse_counts_zero_directions():
    M = np.diag([0.0, 0.0, 4.0])
    assert linalg.trace_perturbed_inverse(M, 0.5) == pytest.approx(2 / 0.5 + 1 / 4.5)
    # eigenvalues under the tolerance count as zeros
    assert linalg.trace_perturbed_inverse(np.diag([1e-20, 4.0]), 0.5, zero_tol=1e-12) \
        == pytest.approx(1 / 0.5 + 1 / 4.5)
    with pytest.raises(ParameterError):
        linalg.trace_perturbed_inverse(M, 0.0)


def test_min_eigenvalue():
    assert linalg.min_eigenvalue(np.diag([3.0, -2.0])) == -2.0
