"""Hot numerical kernels, JIT-compiled with numba when available.

The pure-Python definitions below are the reference semantics; numba only
compiles them.  Everything here works on raw float64/complex128 arrays and
is deliberately scalar-loop style (what the JIT wants).

Kernels:
  _bidiag_svd          singular values of a real bidiagonal matrix, computed
                       to high *relative* accuracy (Demmel-Kahan style QR,
                       zero-shift when a shift would wash out tiny values).
                       This matters: the matrices in this package have
                       singular values like |z|^N ~ 1e-60 that a naive
                       absolute-accuracy sweep would destroy.
  _hessenberg_qr       eigenvalues of a complex upper Hessenberg matrix via
                       implicit single-shift QR with Wilkinson shift.
  _band_reduce         Givens reduction of an upper-triangular banded matrix
                       to bidiagonal form (bulge chasing), used as the fast
                       SVD path for the banded models.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(f):
            return f

        return deco


_EPS = 2.220446049250313e-16
_UNFL = 2.2250738585072014e-308


@njit(cache=True)
def _rotg(f, g):
    """Real Givens rotation: returns (cs, sn, r) with cs*f + sn*g = r >= 0."""
    if g == 0.0:
        return 1.0, 0.0, f
    if f == 0.0:
        return 0.0, 1.0, g
    if abs(f) > abs(g):
        t = g / f
        u = np.sqrt(1.0 + t * t)
        if f < 0.0:
            u = -u
        cs = 1.0 / u
        return cs, t * cs, f * u
    t = f / g
    u = np.sqrt(1.0 + t * t)
    if g < 0.0:
        u = -u
    sn = 1.0 / u
    return t * sn, sn, g * u


@njit(cache=True)
def _svd2x2(f, g, h):
    """Singular values (ssmin, ssmax) of [[f, g], [0, h]] (LAPACK slas2)."""
    fa = abs(f)
    ga = abs(g)
    ha = abs(h)
    fhmn = min(fa, ha)
    fhmx = max(fa, ha)
    if fhmn == 0.0:
        if fhmx == 0.0:
            return 0.0, ga
        t = min(fhmx, ga) / max(fhmx, ga)
        return 0.0, max(fhmx, ga) * np.sqrt(1.0 + t * t)
    if ga < fhmx:
        as_ = 1.0 + fhmn / fhmx
        at = (fhmx - fhmn) / fhmx
        au = (ga / fhmx) ** 2
        c = 2.0 / (np.sqrt(as_ * as_ + au) + np.sqrt(at * at + au))
        return fhmn * c, fhmx / c
    au = fhmx / ga
    if au == 0.0:
        # ga is so huge that fhmx/ga underflows
        return (fhmn * fhmx) / ga, ga
    as_ = 1.0 + fhmn / fhmx
    at = (fhmx - fhmn) / fhmx
    c = 1.0 / (np.sqrt(1.0 + (as_ * au) ** 2) + np.sqrt(1.0 + (at * au) ** 2))
    ssmin = 2.0 * ((fhmn * c) * au)
    return ssmin, ga / (c + c)


@njit(cache=True)
def _bidiag_svd(d, e):
    """Singular values of the upper bidiagonal matrix (diag d, super e).

    In-place: on success d holds the singular values (unordered, >= 0) and
    the return value is 0; returns 1 if the sweep cap is hit.
    """
    n = d.shape[0]
    if n == 0:
        return 0
    if n == 1:
        d[0] = abs(d[0])
        return 0

    tolmul = max(10.0, min(100.0, _EPS ** (-0.125)))
    tol = tolmul * _EPS

    smax = 0.0
    for i in range(n):
        smax = max(smax, abs(d[i]))
    for i in range(n - 1):
        smax = max(smax, abs(e[i]))
    if smax == 0.0:
        return 0

    # lower bound on the smallest singular value (Demmel-Kahan recurrence)
    sminoa = abs(d[0])
    if sminoa != 0.0:
        mu = sminoa
        for i in range(1, n):
            mu = abs(d[i]) * (mu / (mu + abs(e[i - 1])))
            if mu < sminoa:
                sminoa = mu
            if sminoa == 0.0:
                break
    sminoa = sminoa / np.sqrt(n)
    maxit = 6 * n * n
    thresh = max(tol * sminoa, maxit * _UNFL)

    iters = 0
    m = n - 1
    oldll = -2
    oldm = -2
    idir = 0
    while m > 0:
        # locate the active block [lo..m]: first negligible e below it
        ll = -1
        for lll in range(m - 1, -1, -1):
            if abs(e[lll]) <= thresh:
                e[lll] = 0.0
                ll = lll
                break
        lo = ll + 1
        if lo == m:
            m -= 1
            continue
        if lo == m - 1:
            ssmin, ssmax = _svd2x2(d[m - 1], e[m - 1], d[m])
            d[m - 1] = ssmax
            d[m] = ssmin
            e[m - 1] = 0.0
            m -= 2
            continue
        if iters >= maxit:
            return 1

        smax_blk = 0.0
        for i in range(lo, m + 1):
            smax_blk = max(smax_blk, abs(d[i]))
        for i in range(lo, m):
            smax_blk = max(smax_blk, abs(e[i]))

        # keep the chase direction while working the same block
        if lo != oldll or m != oldm:
            if abs(d[lo]) >= abs(d[m]):
                idir = 1
            else:
                idir = 2

        sminl = 0.0
        if idir == 1:
            # bottom-of-block convergence test, then running relative test
            if abs(e[m - 1]) <= tol * abs(d[m]):
                e[m - 1] = 0.0
                continue
            mu = abs(d[lo])
            sminl = mu
            deflated = False
            for lll in range(lo, m):
                if abs(e[lll]) <= tol * mu:
                    e[lll] = 0.0
                    deflated = True
                    break
                mu = abs(d[lll + 1]) * (mu / (mu + abs(e[lll])))
                if mu < sminl:
                    sminl = mu
            if deflated:
                continue
        else:
            if abs(e[lo]) <= tol * abs(d[lo]):
                e[lo] = 0.0
                continue
            mu = abs(d[m])
            sminl = mu
            deflated = False
            for lll in range(m - 1, lo - 1, -1):
                if abs(e[lll]) <= tol * mu:
                    e[lll] = 0.0
                    deflated = True
                    break
                mu = abs(d[lll]) * (mu / (mu + abs(e[lll])))
                if mu < sminl:
                    sminl = mu
            if deflated:
                continue
        oldll = lo
        oldm = m

        # shift: zero when it would spoil relative accuracy
        shift = 0.0
        if not (n * tol * (sminl / smax_blk) <= max(_EPS, 0.01 * tol)):
            if idir == 1:
                sll = abs(d[lo])
                shift, _ = _svd2x2(d[m - 1], e[m - 1], d[m])
            else:
                sll = abs(d[m])
                shift, _ = _svd2x2(d[lo], e[lo], d[lo + 1])
            if sll > 0.0 and (shift / sll) ** 2 < _EPS:
                shift = 0.0

        iters += m - lo
        if shift == 0.0:
            if idir == 1:
                cs = 1.0
                oldcs = 1.0
                oldsn = 0.0
                for i in range(lo, m):
                    cs, sn, r = _rotg(d[i] * cs, e[i])
                    if i > lo:
                        e[i - 1] = oldsn * r
                    oldcs, oldsn, dnew = _rotg(oldcs * r, d[i + 1] * sn)
                    d[i] = dnew
                h = d[m] * cs
                d[m] = h * oldcs
                e[m - 1] = h * oldsn
                if abs(e[m - 1]) <= thresh:
                    e[m - 1] = 0.0
            else:
                cs = 1.0
                oldcs = 1.0
                oldsn = 0.0
                for i in range(m, lo, -1):
                    cs, sn, r = _rotg(d[i] * cs, e[i - 1])
                    if i < m:
                        e[i] = oldsn * r
                    oldcs, oldsn, dnew = _rotg(oldcs * r, d[i - 1] * sn)
                    d[i] = dnew
                h = d[lo] * cs
                d[lo] = h * oldcs
                e[lo] = h * oldsn
                if abs(e[lo]) <= thresh:
                    e[lo] = 0.0
        else:
            if idir == 1:
                f = (abs(d[lo]) - shift) * (
                    (1.0 if d[lo] >= 0.0 else -1.0) + shift / d[lo]
                )
                g = e[lo]
                for i in range(lo, m):
                    cs, sn, r = _rotg(f, g)
                    if i > lo:
                        e[i - 1] = r
                    f = cs * d[i] + sn * e[i]
                    e[i] = cs * e[i] - sn * d[i]
                    g = sn * d[i + 1]
                    d[i + 1] = cs * d[i + 1]
                    cs, sn, r = _rotg(f, g)
                    d[i] = r
                    f = cs * e[i] + sn * d[i + 1]
                    d[i + 1] = cs * d[i + 1] - sn * e[i]
                    if i < m - 1:
                        g = sn * e[i + 1]
                        e[i + 1] = cs * e[i + 1]
                e[m - 1] = f
                if abs(e[m - 1]) <= thresh:
                    e[m - 1] = 0.0
            else:
                f = (abs(d[m]) - shift) * (
                    (1.0 if d[m] >= 0.0 else -1.0) + shift / d[m]
                )
                g = e[m - 1]
                for i in range(m, lo, -1):
                    cs, sn, r = _rotg(f, g)
                    if i < m:
                        e[i] = r
                    f = cs * d[i] + sn * e[i - 1]
                    e[i - 1] = cs * e[i - 1] - sn * d[i]
                    g = sn * d[i - 1]
                    d[i - 1] = cs * d[i - 1]
                    cs, sn, r = _rotg(f, g)
                    d[i] = r
                    f = cs * e[i - 1] + sn * d[i - 1]
                    d[i - 1] = cs * d[i - 1] - sn * e[i - 1]
                    if i > lo + 1:
                        g = sn * e[i - 2]
                        e[i - 2] = cs * e[i - 2]
                e[lo] = f
                if abs(e[lo]) <= thresh:
                    e[lo] = 0.0

    for i in range(n):
        d[i] = abs(d[i])
    return 0


@njit(cache=True)
def _hessenberg_qr(h, max_sweeps_per_eig):
    """Implicit single-shift QR on a complex upper Hessenberg matrix.

    Works in place; on return the diagonal holds the eigenvalues.  Returns
    (total_sweeps, converged).  Deflation tolerance is
    1e-14 * (|h[k-1,k-1]| + |h[k,k]|) with a tiny absolute floor.
    """
    n = h.shape[0]
    defl = 1e-14
    floor = 1e-291
    total = 0
    converged = True
    hi = n - 1
    its = 0
    while hi > 0:
        lo = 0
        for k in range(hi, 0, -1):
            tolk = defl * (abs(h[k - 1, k - 1]) + abs(h[k, k]))
            if tolk < floor:
                tolk = floor
            if abs(h[k, k - 1]) <= tolk:
                h[k, k - 1] = 0.0
                lo = k
                break
        if lo == hi:
            hi -= 1
            its = 0
            continue
        if its >= max_sweeps_per_eig:
            converged = False
            break
        its += 1
        total += 1

        if its % 10 == 0:
            # exceptional shift to break symmetry-induced stalls
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            # Wilkinson: eigenvalue of the trailing 2x2 closest to h[hi,hi]
            a = h[hi - 1, hi - 1]
            b = h[hi - 1, hi]
            c = h[hi, hi - 1]
            dd = h[hi, hi]
            t = 0.5 * (a + dd)
            disc = (t * t - (a * dd - b * c)) ** 0.5
            l1 = t + disc
            l2 = t - disc
            if abs(l1 - dd) <= abs(l2 - dd):
                mu = l1
            else:
                mu = l2

        x = h[lo, lo] - mu
        y = h[lo + 1, lo]
        for k in range(lo, hi):
            if k > lo:
                x = h[k, k - 1]
                y = h[k + 1, k - 1]
            r = np.sqrt(abs(x) ** 2 + abs(y) ** 2)
            if r == 0.0:
                continue
            cx = np.conj(x) / r
            cy = np.conj(y) / r
            sx = x / r
            sy = y / r
            jlo = k - 1
            if jlo < lo:
                jlo = lo
            for j in range(jlo, hi + 1):
                h1 = h[k, j]
                h2 = h[k + 1, j]
                h[k, j] = cx * h1 + cy * h2
                h[k + 1, j] = -sy * h1 + sx * h2
            if k > lo:
                h[k + 1, k - 1] = 0.0
            itop = min(k + 2, hi)
            for i in range(lo, itop + 1):
                h1 = h[i, k]
                h2 = h[i, k + 1]
                h[i, k] = sx * h1 + sy * h2
                h[i, k + 1] = -cy * h1 + cx * h2
    return total, converged


@njit(cache=True)
def _band_right_rot(bnd, n, bw, p, q, pr):
    """Right Givens on columns (p, q=p+1) zeroing entry (pr, q) of the band.

    bnd[s+1, r] stores A[r, r+s] for s in [-1, bw+1].
    """
    x = bnd[p - pr + 1, pr]
    y = bnd[q - pr + 1, pr]
    r = np.sqrt(abs(x) ** 2 + abs(y) ** 2)
    if r == 0.0:
        return
    cx = np.conj(x) / r
    cy = np.conj(y) / r
    sx = x / r
    sy = y / r
    rlo = q - bw - 2
    if rlo < 0:
        rlo = 0
    for row in range(rlo, q + 1):
        sp = p - row
        sq = q - row
        a = bnd[sp + 1, row] if -1 <= sp <= bw + 1 else 0.0 + 0.0j
        b = bnd[sq + 1, row] if -1 <= sq <= bw + 1 else 0.0 + 0.0j
        na = cx * a + cy * b
        nb = -sy * a + sx * b
        if -1 <= sp <= bw + 1:
            bnd[sp + 1, row] = na
        if -1 <= sq <= bw + 1:
            bnd[sq + 1, row] = nb
    bnd[q - pr + 1, pr] = 0.0


@njit(cache=True)
def _band_left_rot(bnd, n, bw, r0, r1):
    """Left Givens on rows (r0, r1=r0+1) zeroing the subdiagonal entry (r1, r0)."""
    x = bnd[1, r0]  # A[r0, r0]
    y = bnd[0, r1]  # A[r1, r0], the subdiagonal bulge slot
    r = np.sqrt(abs(x) ** 2 + abs(y) ** 2)
    if r == 0.0:
        return
    cx = np.conj(x) / r
    cy = np.conj(y) / r
    sx = x / r
    sy = y / r
    chi = r1 + bw + 1
    if chi > n - 1:
        chi = n - 1
    for col in range(r0, chi + 1):
        s0 = col - r0
        s1 = col - r1
        a = bnd[s0 + 1, r0] if -1 <= s0 <= bw + 1 else 0.0 + 0.0j
        b = bnd[s1 + 1, r1] if -1 <= s1 <= bw + 1 else 0.0 + 0.0j
        na = cx * a + cy * b
        nb = -sy * a + sx * b
        if -1 <= s0 <= bw + 1:
            bnd[s0 + 1, r0] = na
        if -1 <= s1 <= bw + 1:
            bnd[s1 + 1, r1] = nb
    bnd[0, r1] = 0.0


@njit(cache=True)
def _band_reduce(bnd, n, nbw):
    """Reduce an upper-triangular band matrix to bidiagonal form in place.

    bnd has shape (nbw+3, n); slot s+1 holds diagonal s (s=-1 is the bulge
    subdiagonal, s=nbw+1 the bulge superdiagonal).  Classic bulge chasing:
    annihilate the outermost diagonal entry by a column rotation, then chase
    the fill down the band.
    """
    for curb in range(nbw, 1, -1):
        for i in range(0, n - curb):
            if bnd[curb + 1, i] == 0.0:
                continue
            j = i + curb
            _band_right_rot(bnd, n, nbw, j - 1, j, i)
            rsub = j
            while True:
                if bnd[0, rsub] == 0.0:
                    break
                _band_left_rot(bnd, n, nbw, rsub - 1, rsub)
                cbul = rsub + curb
                if cbul > n - 1:
                    break
                if bnd[curb + 2, rsub - 1] == 0.0:
                    break
                _band_right_rot(bnd, n, nbw, cbul - 1, cbul, rsub - 1)
                rsub = cbul


@njit(cache=True)
def _lu_inplace(a):
    """LU with partial pivoting, in place; returns (piv, info).

    piv[k] is the row swapped into position k at step k; info is the index
    of the first exactly-zero pivot plus one, or 0 if none.
    """
    n = a.shape[0]
    piv = np.empty(n, dtype=np.int64)
    info = 0
    for k in range(n):
        p = k
        big = abs(a[k, k])
        for i in range(k + 1, n):
            m = abs(a[i, k])
            if m > big:
                big = m
                p = i
        piv[k] = p
        if p != k:
            for j in range(n):
                tmp = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = tmp
        pivval = a[k, k]
        if pivval == 0.0:
            if info == 0:
                info = k + 1
            continue
        for i in range(k + 1, n):
            lik = a[i, k] / pivval
            a[i, k] = lik
            if lik != 0.0:
                for j in range(k + 1, n):
                    a[i, j] -= lik * a[k, j]
    return piv, info
