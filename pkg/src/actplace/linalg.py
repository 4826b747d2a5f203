"""Dense matrix kernel: exponential, Lyapunov solves and spectral traces.

All functions are pure and operate on real ``numpy`` arrays.
"""

import numpy as np
import scipy.linalg

from .errors import DimensionError, InvalidInputError, ParameterError, StabilityError

__all__ = [
    'HURWITZ_MARGIN',
    'KRONECKER_MAX_N',
    'expm',
    'solve_lyapunov',
    'solve_lyapunov_many',
    'lyapunov_residual',
    'symmetrize',
    'psd_eigh',
    'trace_perturbed_inverse',
    'min_eigenvalue',
    'check_hurwitz',
]

HURWITZ_MARGIN = 1e-9
KRONECKER_MAX_N = 50
SYMMETRY_RTOL = 1e-8
PSD_RTOL = 1e-8


def _as_square(M, name='M'):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionError(f'{name} must be a non-empty square matrix, got shape {M.shape}')
    if not np.all(np.isfinite(M)):
        raise InvalidInputError(f'{name} has non-finite entries')
    return M


def expm(M):
    """Matrix exponential by scaling and squaring with a Pade approximant."""
    M = _as_square(M)
    return scipy.linalg.expm(M)


def symmetrize(M, rtol=SYMMETRY_RTOL):
    """Return ``(M + M.T) / 2`` after checking ``M`` is symmetric up to `rtol`."""
    M = _as_square(M)
    scale = max(1.0, np.abs(M).max())
    asym = np.abs(M - M.T).max()
    if asym > rtol * scale:
        raise InvalidInputError(f'matrix is not symmetric (max |M - M.T| = {asym:.3g})')
    return 0.5 * (M + M.T)


def psd_eigh(M, zero_tol=0.0):
    """Eigendecomposition of a symmetric PSD matrix with round-off negatives clipped.

    Eigenvalues below ``-PSD_RTOL * ||M||_2`` are rejected; those up to
    `zero_tol` are treated as exact zeros.
    """
    lam, Q = np.linalg.eigh(symmetrize(M))
    tol = PSD_RTOL * max(abs(lam[0]), abs(lam[-1]))
    if lam[0] < -tol:
        raise InvalidInputError(
            f'matrix is not positive semidefinite (min eigenvalue {lam[0]:.3g})')
    lam = lam.copy()
    lam[lam <= zero_tol] = 0.0
    return lam, Q


def check_hurwitz(A, margin=HURWITZ_MARGIN):
    """Raise `StabilityError` unless every eigenvalue has real part below ``-margin``."""
    ev = np.linalg.eigvals(A)
    k = int(np.argmax(ev.real))
    if ev[k].real >= -margin:
        raise StabilityError(
            f'state matrix is not Hurwitz: eigenvalue {ev[k]:.6g} has real part >= -{margin:g}',
            eigenvalue=complex(ev[k]))
    return ev


def _kronecker_operator(A):
    n = A.shape[0]
    eye = np.eye(n)
    return np.kron(eye, A) + np.kron(A, eye)


def solve_lyapunov(A, Q):
    """Solve ``A G + G A^T = -Q`` for Hurwitz `A`.

    Small problems (n <= 50) use a direct solve of the Kronecker-vectorized
    system; larger ones go through the Schur-based Bartels-Stewart solver in
    scipy. The result is symmetrized.
    """
    A = _as_square(A, 'A')
    Q = _as_square(Q, 'Q')
    if Q.shape != A.shape:
        raise DimensionError(f'A is {A.shape} but Q is {Q.shape}')
    return solve_lyapunov_many(A, Q[None])[0]


def solve_lyapunov_many(A, Qs):
    """Solve ``A G_k + G_k A^T = -Q_k`` for a stack of right-hand sides.

    The Kronecker operator (or the Schur form, for large n) is factored once
    and reused across the stack.
    """
    A = _as_square(A, 'A')
    Qs = np.asarray(Qs, dtype=float)
    n = A.shape[0]
    if Qs.ndim != 3 or Qs.shape[1:] != (n, n):
        raise DimensionError(f'expected a stack of {n}x{n} matrices, got shape {Qs.shape}')
    check_hurwitz(A)
    if n <= KRONECKER_MAX_N:
        lu = scipy.linalg.lu_factor(_kronecker_operator(A))
        rhs = -Qs.reshape(len(Qs), n * n).T
        G = scipy.linalg.lu_solve(lu, rhs).T.reshape(Qs.shape)
    else:
        G = np.stack([scipy.linalg.solve_continuous_lyapunov(A, -Q) for Q in Qs])
    return 0.5 * (G + G.transpose(0, 2, 1))


def lyapunov_residual(A, G, Q):
    """Relative residual ``||A G + G A^T + Q||_F / (1 + ||Q||_F)``."""
    R = A @ G + G @ A.T + Q
    return np.linalg.norm(R) / (1.0 + np.linalg.norm(Q))


def trace_perturbed_inverse(M, eps, zero_tol=0.0):
    """``tr((M + eps I)^-1)`` for symmetric PSD `M`, via its spectrum.

    Never forms the inverse; zero eigenvalues (and any up to `zero_tol`)
    contribute ``1/eps`` each.
    """
    if not eps > 0:
        raise ParameterError(f'eps must be positive, got {eps!r}')
    lam, _ = psd_eigh(M, zero_tol)
    return float(np.sum(1.0 / (lam + eps)))


def min_eigenvalue(M):
    M = symmetrize(M)
    return float(np.linalg.eigvalsh(M)[0])
