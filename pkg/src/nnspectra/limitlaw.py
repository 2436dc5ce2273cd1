"""Predicted limit laws of the noisy models and their log potentials.

For a banded upper-triangular symbol P(u) = sum_l a_l u^l the noisy
spectrum converges to the law of P(U), U uniform on the unit circle; for
twisted symbols the coefficients are sampled at X ~ Unif(0,1).  The log
potential of those laws has a Thouless-type closed form in the symbol's
roots, an equivalent circle-average integral form, and (for the bidiagonal
i.i.d. model) the form (E log|z - d|) v 0.  All of them live here, plus a
sampler of the limit law itself.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import eigenvalues
from .models import DiagonalLaw, TwistedSymbol
from .rng import RandomStream

__all__ = [
    "SingularityProximityError",
    "SymbolAtX",
    "symbol_at",
    "poly_roots",
    "symbol_roots",
    "limit_logpot_toeplitz",
    "limit_logpot_quadrature",
    "limit_logpot_twisted",
    "limit_logpot_iid",
    "sample_limit_law",
]

_TRIM = 1e-14


class SingularityProximityError(ValueError):
    """Requested evaluation point sits (numerically) on a log singularity."""

    def __init__(self, message, distance):
        super().__init__(message)
        self.distance = distance


@dataclass(frozen=True)
class SymbolAtX:
    """Coefficients (f0(x) - z, f1(x), ..., fd(x)) with trimmed top degree."""

    coeffs: np.ndarray
    effective_degree: int


def _effective_degree(coeffs):
    """Largest l with |c_l| >= 1e-14 * max|c| (0 for the all-tiny case)."""
    mx = float(np.max(np.abs(coeffs)))
    if mx == 0.0:
        return 0
    dh = len(coeffs) - 1
    while dh >= 1 and abs(coeffs[dh]) < _TRIM * mx:
        dh -= 1
    return dh


def symbol_at(sym, z, x):
    """Shifted symbol coefficients at parameter x (constant symbols: any x)."""
    sym = sym if isinstance(sym, TwistedSymbol) else TwistedSymbol(tuple(sym))
    c = sym.coeff_columns([float(x)])[:, 0]
    c[0] -= z
    return SymbolAtX(coeffs=c, effective_degree=_effective_degree(c))


def poly_roots(coeffs):
    """All roots of c0 + c1 u + ... + cm u^m (cm != 0), via the companion
    matrix and the in-house balanced QR eigensolver."""
    c = np.asarray(coeffs, dtype=np.complex128)
    m = len(c) - 1
    if m < 1:
        raise ValueError("need degree >= 1")
    if c[m] == 0:
        raise ValueError("leading coefficient must be nonzero")
    if m == 1:
        return np.array([-c[0] / c[1]])
    comp = np.zeros((m, m), dtype=np.complex128)
    comp[1:, :-1] = np.eye(m - 1)
    comp[:, -1] = -c[:m] / c[m]
    res = eigenvalues(comp, balance=True)
    return res.values


def symbol_roots(sym_at_x):
    """The effective_degree roots of the shifted symbol, multiplicities kept."""
    dh = sym_at_x.effective_degree
    if dh < 1:
        raise ValueError("degenerate symbol (effective degree 0); use the "
                         "diagonal branch log|f0(x) - z| instead")
    return poly_roots(sym_at_x.coeffs[: dh + 1])


def _thouless_value(coeffs):
    """sum log+|roots| + log|leading| for trimmed coefficients, or the
    degree-0 fallback log|c0|; -inf if everything vanishes."""
    dh = _effective_degree(coeffs)
    if dh == 0:
        a0 = abs(coeffs[0])
        return float(np.log(a0)) if a0 > 0 else -np.inf
    roots = poly_roots(coeffs[: dh + 1])
    return float(
        np.sum(np.maximum(np.log(np.abs(roots)), 0.0)) + np.log(abs(coeffs[dh]))
    )


def limit_logpot_toeplitz(a, z):
    """Log potential of the limit law of sum_l a_l U^l at z (closed form).

    Equals sum_i log+|lambda_i(z)| + log|a_dhat| over the roots of
    P(u) = z, which matches the circle average of log|P(u) - z|.
    """
    c = np.asarray(a, dtype=np.complex128).copy()
    c[0] -= z
    return _thouless_value(c)


def limit_logpot_quadrature(a, z, nodes=4096):
    """Circle average (1/2pi) int log|P(e^{i t}) - z| dt by the trapezoid
    rule on `nodes` equispaced angles.

    Exponentially accurate in `nodes` while z stays away from the symbol
    curve; refuses (SingularityProximityError) if any node value of
    |P(e^{it}) - z| drops below 1e-12.
    """
    c = np.asarray(a, dtype=np.complex128)
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    u = np.exp(1j * theta)
    vals = np.zeros_like(u)
    for ck in c[::-1]:
        vals = vals * u + ck
    vals -= z
    dmin = float(np.min(np.abs(vals)))
    if dmin < 1e-12:
        raise SingularityProximityError(
            f"z within {dmin:.3e} of the symbol curve; integrand singular", dmin
        )
    return float(np.mean(np.log(np.abs(vals))))


def limit_logpot_twisted(sym, z, x_nodes=2048):
    """Log potential of the twisted limit law: midpoint-rule x-average of
    the per-x Thouless value.

    Panels whose coefficients degenerate to degree 0 with |f0(x) - z| below
    1e-12 are refused (dropped, with a warning recording the refused mass).
    """
    sym = sym if isinstance(sym, TwistedSymbol) else TwistedSymbol(tuple(sym))
    xs = (np.arange(x_nodes) + 0.5) / x_nodes
    cols = sym.coeff_columns(xs)
    cols[0, :] -= z
    total = 0.0
    refused = 0
    for j in range(x_nodes):
        c = cols[:, j]
        dh = _effective_degree(c)
        if dh == 0:
            av = abs(c[0])
            if av < 1e-12:
                refused += 1
                continue
            total += np.log(av)
        elif dh == 1:
            r = abs(c[0] / c[1])
            total += (np.log(r) if r > 1.0 else 0.0) + np.log(abs(c[1]))
        else:
            roots = poly_roots(c[: dh + 1])
            total += np.sum(np.maximum(np.log(np.abs(roots)), 0.0)) + np.log(
                abs(c[dh])
            )
    if refused:
        warnings.warn(
            f"dropped {refused}/{x_nodes} quadrature panels within 1e-12 of the "
            f"log singularity (mass {refused / x_nodes:.3g})",
            RuntimeWarning,
        )
        if refused == x_nodes:
            return -np.inf  # degenerate on the whole x-range
    return float(total / x_nodes)


def _integral_log_abs(a, b, z, order=24):
    """int_a^b log|t - z| dt by Gauss-Legendre on panels graded toward the
    (possible) singularity at Re z; accurate to ~1e-12 even for real z
    inside [a, b]."""
    if b <= a:
        return 0.0
    u, v = z.real, z.imag
    uc = min(max(u, a), b)
    nodes, weights = np.polynomial.legendre.leggauss(order)

    def side(lo, hi, sing_at_lo):
        # integrate [lo, hi] with geometric grading toward the lo end
        width = hi - lo
        if width <= 0:
            return 0.0
        anchor = abs(lo) if sing_at_lo else abs(hi)
        # stop grading once offsets would be absorbed by the anchor's ulp;
        # the dropped core contributes O(eps |log eps|)
        smin = max(1e-30 * max(1.0, width), 8e-16 * anchor)
        edges = [width]
        w = width
        while w > smin:
            w *= 0.5
            edges.append(w)
        # the core [0, edges[-1]] is dropped; its mass is O(smin log smin)
        total = 0.0
        for k in range(len(edges) - 1):
            w1, w0 = edges[k + 1], edges[k]
            mid = 0.5 * (w0 + w1)
            half = 0.5 * (w0 - w1)
            if half == 0.0:
                continue
            s = mid + half * nodes
            t = (lo + s) if sing_at_lo else (hi - s)
            total += half * np.sum(weights * np.log(np.abs(t - z)))
        return total

    return side(uc, b, True) + side(a, uc, False)


def limit_logpot_iid(law, z):
    """(E log|z - d|) v 0 for the bidiagonal model with i.i.d. diagonal.

    Discrete laws are summed exactly; interval laws are integrated by
    graded Gauss-Legendre quadrature.  The positive-part clamp applies to
    the expectation, not the integrand.
    """
    if not isinstance(law, DiagonalLaw):
        raise TypeError("law must be a DiagonalLaw")
    z = complex(z)
    if law.kind == "discrete":
        pts = np.asarray(law.points, dtype=np.complex128)
        w = np.asarray(law.weights, dtype=float)
        dist = np.abs(z - pts)
        with np.errstate(divide="ignore"):
            logs = np.log(dist)
        ev = float(np.dot(w[dist > 0], logs[dist > 0]))
        if np.any((dist == 0) & (w > 0)):
            ev = -np.inf
        return max(ev, 0.0)
    if law.kind == "uniform":
        ev = _integral_log_abs(law.a, law.b, z) / (law.b - law.a)
        return max(float(ev), 0.0)
    if law.kind == "profile":
        raise ValueError(
            "deterministic profiles are not an i.i.d. law; use the twisted "
            "log potential instead"
        )
    raise ValueError(f"unknown law kind {law.kind!r}")


def sample_limit_law(sym, count, seed):
    """i.i.d. samples of sum_l f_l(X) U^l, X ~ Unif(0,1), U uniform on the
    unit circle, independent."""
    if count < 1:
        raise ValueError("count must be >= 1")
    sym = sym if isinstance(sym, TwistedSymbol) else TwistedSymbol(tuple(sym))
    stream = RandomStream(seed)
    x = stream.uniforms(count)
    u = np.exp(2j * np.pi * stream.uniforms(count))
    cols = sym.coeff_columns(x)
    out = np.zeros(count, dtype=np.complex128)
    for ell in range(sym.d, -1, -1):
        out = out * u + cols[ell]
    return out
