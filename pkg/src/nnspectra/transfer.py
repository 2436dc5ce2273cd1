"""Transfer matrices of the banded recurrence and their Lyapunov spectra.

For block coefficients t = (t0, ..., td) with td != 0, the transfer matrix
propagates solutions x of ((M - z Id) x)_j = 0 along the band.  Its
eigenvalues are exactly the roots of the shifted symbol
t_d u^d + ... + t_1 u + (t0 - z), with explicit Vandermonde eigenvectors.
Products of transfer matrices give Lyapunov exponents; summing their
positive parts plus log|t_d| recovers the limit log potential
(a Thouless-type formula).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .limitlaw import _effective_degree, poly_roots
from .linalg import qr_orthonormal
from .models import RegularizedModel

__all__ = [
    "TransferMatrix",
    "transfer_matrix",
    "transfer_eigenvector",
    "LyapunovSpectrum",
    "lyapunov_spectrum",
    "thouless_logpot",
    "scalar_transfer_sequence",
    "BadZReport",
    "bad_z_check",
]


@dataclass(frozen=True)
class TransferMatrix:
    """Companion-form propagator of the band recurrence at one block."""

    matrix: np.ndarray
    z: complex
    coeffs: tuple
    block: int | None = None

    @property
    def dim(self):
        return self.matrix.shape[0]


def transfer_matrix(t, z, block=None):
    """Transfer matrix for block coefficients t = (t0, ..., td).

    Top row is (-t_{dh-1}/t_dh, ..., -t_1/t_dh, (z - t0)/t_dh) with the
    identity on the subdiagonal block; dh is the trimmed top degree and
    must be >= 1 with t_dh != 0.
    """
    t = np.asarray(t, dtype=np.complex128)
    dh = _effective_degree(t)
    if dh < 1:
        raise ValueError("transfer matrix needs effective band degree >= 1")
    lead = t[dh]
    m = np.zeros((dh, dh), dtype=np.complex128)
    for j in range(dh - 1):
        m[0, j] = -t[dh - 1 - j] / lead
    m[0, dh - 1] = (z - t[0]) / lead
    if dh > 1:
        m[1:, :-1] = np.eye(dh - 1)
    return TransferMatrix(matrix=m, z=complex(z), coeffs=tuple(t[: dh + 1]), block=block)


def transfer_eigenvector(root, dim):
    """The eigenvector (root^{dim-1}, ..., root, 1) attached to a symbol root."""
    return root ** np.arange(dim - 1, -1, -1).astype(np.complex128)


@dataclass
class LyapunovSpectrum:
    """Exponents (descending), product length, and jackknife standard errors."""

    exponents: np.ndarray
    length: int
    std_errors: np.ndarray


def lyapunov_spectrum(matrices, length, segments=10):
    """Lyapunov exponents of a matrix product by QR renormalization.

    Parameters
    ----------
    matrices : iterable of (m, m) arrays
        The transfer sequence; consumed `length` times.
    length : int
        Number of factors in the product.
    segments : int
        Contiguous segments used for the jackknife standard error.

    Returns
    -------
    LyapunovSpectrum
        exponents[j] = (1/length) sum_steps log|R_jj|, sorted descending.

    Raises
    ------
    ValueError
        If a factor is singular (zero R diagonal), reporting its index.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    it = iter(matrices)
    q = None
    logs = None
    for step in range(length):
        t = np.asarray(next(it), dtype=np.complex128)
        if t.ndim == 0:
            t = t.reshape(1, 1)
        if q is None:
            dim = t.shape[0]
            q = np.eye(dim, dtype=np.complex128)
            logs = np.empty((length, dim))
        y = t @ q
        q = qr_orthonormal(y)
        rdiag = np.abs(np.sum(q.conj() * y, axis=0))
        if np.any(rdiag == 0.0) or not np.all(np.isfinite(rdiag)):
            raise ValueError(f"singular transfer matrix at index {step}")
        logs[step] = np.log(rdiag)

    exps = logs.sum(axis=0) / length
    # jackknife over contiguous segment means
    nseg = min(segments, length)
    chunks = np.array_split(logs, nseg, axis=0)
    tot = logs.sum(axis=0)
    loo = np.array(
        [(tot - c.sum(axis=0)) / (length - len(c)) if length > len(c) else tot * 0.0
         for c in chunks]
    )
    se = np.sqrt((nseg - 1) / nseg * np.sum((loo - loo.mean(axis=0)) ** 2, axis=0))
    order = np.argsort(exps)[::-1]
    return LyapunovSpectrum(exponents=exps[order], length=length, std_errors=se[order])


def scalar_transfer_sequence(diag, z):
    """1x1 transfer factors (z - d_i) for the bidiagonal model D + J."""
    for d in np.asarray(diag, dtype=np.complex128):
        yield np.array([[z - d]])


def thouless_logpot(a, z, length=10000):
    """Limit log potential of a constant symbol from its Lyapunov spectrum:
    sum of positive exponents plus log|a_dh| (degenerate degree falls back
    to log|a0 - z|)."""
    a = np.asarray(a, dtype=np.complex128)
    dh = _effective_degree(a)
    if dh == 0:
        return float(np.log(abs(a[0] - z))) if a[0] != z else -np.inf
    tm = transfer_matrix(a[: dh + 1], z)
    spec = lyapunov_spectrum(itertools.repeat(tm.matrix), length)
    return float(np.sum(np.maximum(spec.exponents, 0.0)) + np.log(abs(a[dh])))


@dataclass
class BadZReport:
    """Outcome of the ill-conditioning screen of a regularized model at z."""

    flagged: bool
    reasons: frozenset
    diagnostics: list = field(default_factory=list)


def bad_z_check(model, z, delta1, n=None):
    """Screen z against the regularized model's blocks.

    Flags z when for some block k with effective degree dh > 0 either
    (i)  |t_dh|^{dh-1} * |det V(k)|^2 <= n^{-2 delta1 d}, with V(k) the
         Vandermonde of the shifted-symbol roots (near-multiple roots), or
    (ii) some root modulus lies within n^{-3 delta1} of 1.
    """
    if not isinstance(model, RegularizedModel):
        raise TypeError("model must come from build_regularized")
    if n is None:
        n = int(model.boundaries[-1])
    d = model.coeffs.shape[1] - 1
    thresh_i = float(n) ** (-2.0 * delta1 * max(d, 1))
    band = float(n) ** (-3.0 * delta1)
    reasons = set()
    diagnostics = []
    for k, t in enumerate(model.coeffs):
        dh = _effective_degree(t)
        if dh == 0:
            continue
        c = t[: dh + 1].astype(np.complex128).copy()
        c[0] -= z
        roots = poly_roots(c)
        detv2 = 1.0
        for i, j in itertools.combinations(range(dh), 2):
            detv2 *= abs(roots[i] - roots[j]) ** 2
        crit_i = abs(t[dh]) ** (dh - 1) * detv2 <= thresh_i
        moduli = np.abs(roots)
        crit_ii = bool(np.any(np.abs(moduli - 1.0) <= band))
        if crit_i:
            reasons.add("discriminant-small")
        if crit_ii:
            reasons.add("root-near-circle")
        diagnostics.append(
            {
                "block": k,
                "effective_degree": dh,
                "vandermonde_sq": detv2,
                "discriminant_value": abs(t[dh]) ** (dh - 1) * detv2,
                "discriminant_threshold": thresh_i,
                "root_moduli": moduli,
                "circle_margin": float(np.min(np.abs(moduli - 1.0))),
                "circle_band": band,
                "flagged_i": crit_i,
                "flagged_ii": crit_ii,
            }
        )
    return BadZReport(flagged=bool(reasons), reasons=frozenset(reasons),
                      diagnostics=diagnostics)
