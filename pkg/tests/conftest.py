"""Shared test helpers: random matrices and independent oracles."""

import mpmath as mp
import numpy as np
import pytest


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def match_multisets(a, b):
    """Greedy nearest-neighbour matching of two complex multisets; returns
    the largest matched distance."""
    a = list(np.asarray(a, dtype=complex))
    b = list(np.asarray(b, dtype=complex))
    assert len(a) == len(b)
    worst = 0.0
    for x in a:
        j = int(np.argmin(np.abs(np.asarray(b) - x)))
        worst = max(worst, abs(b[j] - x))
        b.pop(j)
    return worst


def sturm_min_singular(diag, sup, dps=50, iters=200):
    """Smallest singular value of a real bidiagonal matrix via Sturm
    bisection on B^T B in mpmath (independent high-precision oracle)."""
    with mp.workdps(dps):
        d = [mp.mpf(float(x)) for x in diag]
        e = [mp.mpf(float(x)) for x in sup]
        n = len(d)
        tdiag = [d[i] ** 2 + (e[i - 1] ** 2 if i > 0 else mp.mpf(0)) for i in range(n)]
        toff = [d[i] * e[i] for i in range(n - 1)]

        def count_less(x):
            cnt = 0
            q = tdiag[0] - x
            if q < 0:
                cnt += 1
            for i in range(1, n):
                prev = q if q != 0 else mp.mpf(10) ** (-dps)
                q = tdiag[i] - x - (toff[i - 1] ** 2) / prev
                if q < 0:
                    cnt += 1
            return cnt

        lo = mp.mpf(0)
        hi = max(tdiag) + 2 * (max(toff) if toff else mp.mpf(0)) + 1
        for _ in range(iters):
            mid = (lo + hi) / 2
            if count_less(mid) >= 1:
                hi = mid
            else:
                lo = mid
        return float(mp.sqrt((lo + hi) / 2))


def char_poly_coeffs(a):
    """Characteristic polynomial coefficients (monic, descending) by the
    Faddeev-LeVerrier recursion: independent of any eigensolver."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    coeffs = [1.0 + 0.0j]
    m = np.zeros_like(a)
    c = 1.0 + 0.0j
    for k in range(1, n + 1):
        m = a @ m + c * np.eye(n)
        c = -np.trace(a @ m) / k
        coeffs.append(c)
    return np.array(coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
