"""Self-contained dense complex linear algebra.

Everything is built from scratch on top of numpy array arithmetic: no
``numpy.linalg`` / LAPACK calls anywhere in this package.  The test suite
cross-checks against ``numpy.linalg`` as an independent oracle.

Algorithms
----------
eigenvalues        Householder Hessenberg reduction + implicit single-shift
                   QR with Wilkinson shift (complex arithmetic throughout).
singular_values    Householder bidiagonalization (or Givens band reduction
                   for banded upper-triangular input) + bidiagonal QR with
                   relative-accuracy safeguards, so exponentially small
                   singular values keep full relative precision.
log_abs_det        LU with partial pivoting, accumulating log|pivot|.
smallest_singular  dense SVD, or inverse iteration on A^H A via the LU of A.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import (
    _band_reduce,
    _bidiag_svd,
    _hessenberg_qr,
    _lu_inplace,
)
from .rng import RandomStream

__all__ = [
    "ConvergenceError",
    "EigenResult",
    "hessenberg",
    "eigenvalues",
    "singular_values",
    "bidiagonal_singular_values",
    "smallest_singular",
    "log_abs_det",
    "logdet_complex",
    "lu_factor",
    "lu_solve",
    "lu_solve_herm",
    "qr_orthonormal",
    "jacobi_svd",
]

# bandwidth above which the Givens band path stops paying off
_MAX_FAST_BAND = 12


class ConvergenceError(RuntimeError):
    """An iterative factorization hit its sweep cap."""


@dataclass
class EigenResult:
    """Eigenvalues with multiplicity plus iteration diagnostics."""

    values: np.ndarray
    iterations: int
    converged: bool


def _as_square_complex(a, name="A"):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    return a


def _norm2(x):
    """Euclidean norm, scaled against overflow on extreme inputs."""
    m = float(np.max(np.abs(x))) if np.size(x) else 0.0
    if m == 0.0 or not np.isfinite(m):
        return m
    if m > 1e140 or m < 1e-140:
        return m * float(np.sqrt(np.sum(np.abs(x / m) ** 2)))
    return float(np.sqrt(np.sum(np.abs(x) ** 2)))


def _householder(x):
    """Reflector data (v, beta, alpha) with (I - beta v v^H) x = alpha e1.

    v is returned unit-normalized with beta = 2, so applying the reflector
    never produces intermediates above the matrix scale; alpha =
    -phase(x[0]) * ||x|| avoids cancellation.  beta == 0 signals the
    identity (x already of the desired form).
    """
    normx = _norm2(x)
    if normx == 0.0:
        return x, 0.0, 0.0 + 0.0j
    x0 = x[0]
    phase = x0 / abs(x0) if x0 != 0 else 1.0 + 0.0j
    alpha = -phase * normx
    v = x / normx
    v[0] -= alpha / normx
    vnorm = _norm2(v)
    if vnorm == 0.0:
        return v, 0.0, alpha
    return v / vnorm, 2.0, alpha


def hessenberg(a):
    """Upper Hessenberg form of a square complex matrix.

    Returns H unitarily similar to ``a`` (same spectrum), with exact zeros
    below the first subdiagonal.
    """
    a = _as_square_complex(a)
    n = a.shape[0]
    h = a.copy()
    for k in range(n - 2):
        v, beta, _ = _householder(h[k + 1 :, k])
        if beta != 0.0:
            w = v.conj() @ h[k + 1 :, k:]
            h[k + 1 :, k:] -= beta * np.outer(v, w)
            w2 = h[:, k + 1 :] @ v
            h[:, k + 1 :] -= beta * np.outer(w2, v.conj())
        h[k + 2 :, k] = 0.0
    return h


def _balance(a):
    """Parlett-Reinsch balancing (diagonal similarity, powers of 2 only).

    Guarded against over/underflow on extremely graded inputs: scale
    factors are capped, scalings that would push entries out of range are
    skipped, and the outer loop is bounded.
    """
    a = a.copy()
    n = a.shape[0]
    radix = 2.0
    fmax = 2.0**500
    fmin = 2.0**-500
    for _ in range(100):
        done = True
        for i in range(n):
            r = float(np.sum(np.abs(a[i, :]))) - abs(a[i, i])
            c = float(np.sum(np.abs(a[:, i]))) - abs(a[i, i])
            if r == 0.0 or c == 0.0 or not np.isfinite(c + r):
                continue
            f = 1.0
            s = c + r
            while np.isfinite(c) and c < r / radix and f < fmax:
                c *= radix
                r /= radix
                f *= radix
            while np.isfinite(r) and c >= r * radix and f > fmin:
                c /= radix
                r *= radix
                f /= radix
            if (c + r) < 0.95 * s and f != 1.0:
                col_max = float(np.max(np.abs(a[:, i]))) * f
                row_max = float(np.max(np.abs(a[i, :]))) / f
                if col_max > 1e290 or row_max > 1e290:
                    continue  # would leave the representable range
                done = False
                a[i, :] /= f
                a[:, i] *= f
        if done:
            break
    return a


def eigenvalues(a, balance=True, max_sweeps_per_eig=40):
    """All eigenvalues of a square complex matrix, with multiplicity.

    Parameters
    ----------
    a : (n, n) array_like
    balance : bool
        Apply Parlett-Reinsch scaling first (exact similarity).
    max_sweeps_per_eig : int
        QR sweep cap per eigenvalue; on hitting it a partial result is
        returned with ``converged=False``.

    Returns
    -------
    EigenResult
    """
    a = _as_square_complex(a)
    n = a.shape[0]
    if n == 0:
        return EigenResult(np.empty(0, dtype=np.complex128), 0, True)
    if n == 1:
        return EigenResult(a.ravel().copy(), 0, True)
    if not np.any(np.tril(a, -1)):
        # exactly triangular: spectrum is the diagonal
        return EigenResult(np.diag(a).copy(), 0, True)
    b = _balance(a) if balance else a
    h = hessenberg(b)
    its, conv = _hessenberg_qr(h, max_sweeps_per_eig)
    return EigenResult(np.diag(h).copy(), int(its), bool(conv))


def _upper_bandwidth(a):
    """Upper bandwidth if ``a`` is exactly upper-triangular banded, else -1."""
    if np.any(np.tril(a, -1)):
        return -1
    n = a.shape[0]
    bw = 0
    for k in range(n - 1, 0, -1):
        if np.any(np.diag(a, k)):
            bw = k
            break
    return bw


def _dense_bidiagonalize(a):
    """Householder reduction to real bidiagonal (d, e), values-only.

    The complex bidiagonal that Householder reflections produce is phase-
    equivalent to the real non-negative one (absorb phases in diagonal
    unitaries), so (|diag|, |super|) has the same singular values.
    """
    b = a.copy()
    n = b.shape[0]
    for k in range(n):
        v, beta, _ = _householder(b[k:, k])
        if beta != 0.0:
            b[k:, k:] -= beta * np.outer(v, v.conj() @ b[k:, k:])
        b[k + 1 :, k] = 0.0
        if k < n - 2:
            v, beta, _ = _householder(b[k, k + 1 :].conj())
            if beta != 0.0:
                b[k:, k + 1 :] -= beta * np.outer(b[k:, k + 1 :] @ v, v.conj())
            b[k, k + 2 :] = 0.0
    d = np.abs(np.diag(b))
    e = np.abs(np.diag(b, 1))
    return d, e


def _band_bidiagonalize(a, bw):
    """Bidiagonal (d, e) of an exactly banded upper-triangular matrix."""
    n = a.shape[0]
    bnd = np.zeros((bw + 3, n), dtype=np.complex128)
    for s in range(bw + 1):
        bnd[s + 1, : n - s] = np.diag(a, s)
    _band_reduce(bnd, n, bw)
    d = np.abs(bnd[1, :])
    e = np.abs(bnd[2, : n - 1]) if n > 1 else np.empty(0)
    return d, e


def bidiagonal_singular_values(diag, sup):
    """Singular values (descending) of an upper bidiagonal matrix.

    Accepts complex inputs; phases do not affect singular values.  Computed
    to high relative accuracy, so results are meaningful even for values
    far below eps * ||A||.
    """
    d = np.abs(np.asarray(diag)).astype(np.float64)
    e = np.abs(np.asarray(sup)).astype(np.float64)
    if e.shape[0] != max(d.shape[0] - 1, 0):
        raise ValueError("superdiagonal must have length n-1")
    d = d.copy()
    e = e.copy()
    if _bidiag_svd(d, e) != 0:
        raise ConvergenceError("bidiagonal QR did not converge")
    d.sort()
    return d[::-1]


def singular_values(a):
    """All singular values of a square complex matrix, descending.

    Exactly banded upper-triangular inputs take a Givens band-reduction
    fast path; anything else goes through dense Householder
    bidiagonalization.  Both feed the same relative-accuracy bidiagonal QR.
    """
    a = _as_square_complex(a)
    n = a.shape[0]
    if n == 0:
        return np.empty(0)
    bw = _upper_bandwidth(a)
    if bw == 0:
        s = np.abs(np.diag(a)).astype(np.float64)
        s.sort()
        return s[::-1]
    if 1 <= bw <= _MAX_FAST_BAND:
        if bw == 1:
            d, e = np.abs(np.diag(a)), np.abs(np.diag(a, 1))
        else:
            d, e = _band_bidiagonalize(a, bw)
    else:
        d, e = _dense_bidiagonalize(a)
    d = d.astype(np.float64).copy()
    e = e.astype(np.float64).copy()
    if _bidiag_svd(d, e) != 0:
        raise ConvergenceError("bidiagonal QR did not converge")
    d.sort()
    return d[::-1]


def lu_factor(a):
    """LU with partial pivoting: returns (lu, piv, info).

    ``lu`` packs L (unit lower) and U; ``piv[k]`` is the row swapped into
    position k at step k; ``info`` is 1 + index of the first exactly zero
    pivot, or 0 if the factorization is nonsingular.
    """
    lu = np.array(_as_square_complex(a), dtype=np.complex128, order="C", copy=True)
    piv, info = _lu_inplace(lu)
    return lu, piv, int(info)


def lu_solve(lu, piv, b):
    """Solve A x = b given lu_factor output."""
    n = lu.shape[0]
    x = np.asarray(b, dtype=np.complex128).copy()
    for k in range(n):
        p = piv[k]
        if p != k:
            x[k], x[p] = x[p], x[k]
    for k in range(n - 1):
        x[k + 1 :] -= lu[k + 1 :, k] * x[k]
    for k in range(n - 1, -1, -1):
        x[k] /= lu[k, k]
        if k:
            x[:k] -= lu[:k, k] * x[k]
    return x


def lu_solve_herm(lu, piv, b):
    """Solve A^H y = b given lu_factor output for A."""
    n = lu.shape[0]
    w = np.asarray(b, dtype=np.complex128).copy()
    for k in range(n):
        w[k] = (w[k] - np.dot(lu[:k, k].conj(), w[:k])) / np.conj(lu[k, k])
    for k in range(n - 1, -1, -1):
        w[k] -= np.dot(lu[k + 1 :, k].conj(), w[k + 1 :])
    y = w
    for k in range(n - 1, -1, -1):
        p = piv[k]
        if p != k:
            y[k], y[p] = y[p], y[k]
    return y


def log_abs_det(a):
    """log|det A| via LU pivots; -inf on an exactly zero pivot."""
    lu, piv, info = lu_factor(a)
    if info != 0:
        return -np.inf
    return float(np.sum(np.log(np.abs(np.diag(lu)))))


def logdet_complex(a):
    """(log|det A|, phase) with phase = det A / |det A| (0 if singular)."""
    lu, piv, info = lu_factor(a)
    if info != 0:
        return -np.inf, 0.0 + 0.0j
    dg = np.diag(lu)
    phase = np.prod(dg / np.abs(dg))
    swaps = int(np.sum(piv != np.arange(lu.shape[0])))
    if swaps % 2:
        phase = -phase
    return float(np.sum(np.log(np.abs(dg)))), complex(phase)


def smallest_singular(a, mode="auto"):
    """Smallest singular value of a square matrix.

    mode='dense' takes the tail of :func:`singular_values`;
    mode='inverse_iteration' runs power iteration on (A^H A)^{-1} using one
    LU of A (returns 0.0 for an exactly singular A); 'auto' picks dense for
    n <= 300.
    """
    a = _as_square_complex(a)
    n = a.shape[0]
    if mode not in ("auto", "dense", "inverse_iteration"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "auto":
        mode = "dense" if n <= 300 else "inverse_iteration"
    if mode == "dense":
        return float(singular_values(a)[-1])

    lu, piv, info = lu_factor(a)
    if info != 0:
        return 0.0
    stream = RandomStream(0x5EED5EED)
    v = stream.complex_gaussians(n)
    v /= _norm2(v)
    sig_old = np.inf
    sig = np.inf
    for _ in range(200):
        t = lu_solve_herm(lu, piv, v)
        w = lu_solve(lu, piv, t)
        nw = _norm2(w)
        if not np.isfinite(nw):
            return 0.0
        if nw == 0.0:
            break
        sig = 1.0 / np.sqrt(nw)
        v = w / nw
        if abs(sig - sig_old) <= 1e-13 * sig:
            break
        sig_old = sig
    return _norm2(a @ v)


def qr_orthonormal(a):
    """Orthonormal basis Q (economy QR) for the columns of ``a`` (m x k)."""
    a = np.asarray(a, dtype=np.complex128)
    m, k = a.shape
    if k > m:
        raise ValueError("need at least as many rows as columns")
    r = a.copy()
    vs = []
    for j in range(k):
        v, beta, _ = _householder(r[j:, j])
        vs.append((v, beta))
        if beta != 0.0:
            r[j:, j:] -= beta * np.outer(v, v.conj() @ r[j:, j:])
    q = np.zeros((m, k), dtype=np.complex128)
    q[:k, :k] = np.eye(k)
    for j in range(k - 1, -1, -1):
        v, beta = vs[j]
        if beta != 0.0:
            q[j:, :] -= beta * np.outer(v, v.conj() @ q[j:, :])
    return q


def jacobi_svd(a, max_sweeps=60, tol=1e-14):
    """One-sided Jacobi SVD: returns (sigma descending, V) with A = U S V^H.

    Right singular vectors come out orthonormal even for clustered values;
    singular values carry high relative accuracy.  Intended for modest n.
    """
    a = _as_square_complex(a)
    n = a.shape[0]
    w = a.copy()
    v = np.eye(n, dtype=np.complex128)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                app = float(np.sum(np.abs(w[:, p]) ** 2))
                aqq = float(np.sum(np.abs(w[:, q]) ** 2))
                apq = np.dot(w[:, p].conj(), w[:, q])
                if abs(apq) <= tol * np.sqrt(app * aqq) or abs(apq) == 0.0:
                    continue
                rotated = True
                tau = (aqq - app) / (2.0 * abs(apq))
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                if tau == 0.0:
                    t = 1.0
                cs = 1.0 / np.sqrt(1.0 + t * t)
                s = (t * cs) * (apq / abs(apq))
                wp = cs * w[:, p] - np.conj(s) * w[:, q]
                w[:, q] = s * w[:, p] + cs * w[:, q]
                w[:, p] = wp
                vp = cs * v[:, p] - np.conj(s) * v[:, q]
                v[:, q] = s * v[:, p] + cs * v[:, q]
                v[:, p] = vp
        if not rotated:
            break
    sigma = np.sqrt(np.sum(np.abs(w) ** 2, axis=0))
    order = np.argsort(sigma)[::-1]
    return sigma[order], v[:, order]
