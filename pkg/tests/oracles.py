"""Reference computations that share no code path with the package."""

import math

import numpy as np


def taylor_expm(M, terms=40):
    """exp(M) by scaling, a truncated Taylor series and repeated squaring."""
    M = np.asarray(M, dtype=float)
    norm = np.abs(M).sum(axis=1).max()
    s = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0 else 0
    X = M / 2.0 ** s
    term = np.eye(len(M))
    out = np.eye(len(M))
    for k in range(1, terms):
        term = term @ X / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def _simpson(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    err = np.abs(left + right - whole).max()
    if depth <= 0 or err <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return (_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + _simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1))


def adaptive_simpson(f, a, b, tol=1e-10, depth=30):
    """Adaptive Simpson quadrature of an array-valued integrand."""
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson(f, a, b, fa, fm, fb, whole, tol, depth)


def quadrature_gramian(A, Q, tau, tol=1e-12):
    """int_0^tau e^{At} Q e^{A^T t} dt with the Taylor exponential."""
    def integrand(t):
        E = taylor_expm(A * t)
        return E @ Q @ E.T
    return adaptive_simpson(integrand, 0.0, tau, tol=tol)


def kronecker_lyapunov(A, Q):
    """Solve A G + G A^T = -Q through the column-stacked Kronecker system."""
    n = len(A)
    K = np.kron(np.eye(n), A) + np.kron(A, np.eye(n))
    g = np.linalg.solve(K, -Q.reshape(-1, order='F'))
    return g.reshape(n, n, order='F')


def trace_inverse(W, eps=0.0):
    return float(np.trace(np.linalg.inv(W + eps * np.eye(len(W)))))


def kalman_controllable(A, nodes):
    n = len(A)
    B = np.eye(n)[:, [i - 1 for i in nodes]]
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(A @ blocks[-1])
    return np.linalg.matrix_rank(np.hstack(blocks)) == n
