"""Empirical spectra, log potentials, pseudospectrum grids, comparisons."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import ConvergenceError, eigenvalues, log_abs_det, smallest_singular

__all__ = [
    "SpectrumSample",
    "esd",
    "empirical_logpot",
    "GridSpec",
    "GridField",
    "pseudospectrum_grid",
    "CompareReport",
    "compare_measures",
    "wasserstein1",
    "kolmogorov_distance",
    "write_esd_csv",
    "write_grid_csv",
    "write_compare_csv",
]


@dataclass
class SpectrumSample:
    """Eigenvalue multiset of one realization plus its provenance."""

    points: np.ndarray
    n: int
    gamma: float | None = None
    seed: int | None = None
    model: str = ""


def esd(m, gamma=None, seed=None, model=""):
    """Empirical spectral sample of a matrix (eigenvalues with metadata).

    Raises ConvergenceError if the eigensolver fails to converge.
    """
    m = np.asarray(m, dtype=np.complex128)
    res = eigenvalues(m)
    if not res.converged:
        raise ConvergenceError(
            f"eigensolver did not converge after {res.iterations} sweeps"
        )
    return SpectrumSample(points=res.values, n=m.shape[0], gamma=gamma, seed=seed,
                          model=model)


def empirical_logpot(m, z):
    """(1/N) log|det(M - z Id)| via LU (never through eigenvalues);
    -inf when z is an exact eigenvalue."""
    m = np.asarray(m, dtype=np.complex128)
    n = m.shape[0]
    return log_abs_det(m - z * np.eye(n, dtype=np.complex128)) / n


@dataclass(frozen=True)
class GridSpec:
    x0: float
    x1: float
    nx: int
    y0: float
    y1: float
    ny: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid must be non-empty")
        if (self.nx > 1 and self.x1 <= self.x0) or (self.ny > 1 and self.y1 <= self.y0):
            raise ValueError("grid ranges must increase")

    @property
    def xs(self):
        return np.linspace(self.x0, self.x1, self.nx)

    @property
    def ys(self):
        return np.linspace(self.y0, self.y1, self.ny)


@dataclass
class GridField:
    """sigma_min(M - z Id) sampled on a rectangular grid.

    values[iy, ix] belongs to z = xs[ix] + 1i*ys[iy]; failed nodes hold NaN.
    """

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    failures: int = 0


def pseudospectrum_grid(m, grid, mode="auto"):
    """Smallest singular value of M - z Id over the grid.

    mode 'dense' | 'inverse_iteration' | 'auto' follows
    :func:`nnspectra.linalg.smallest_singular`.  Per-node failures are
    recorded as NaN and counted; results are independent of traversal
    order.
    """
    m = np.asarray(m, dtype=np.complex128)
    n = m.shape[0]
    if not isinstance(grid, GridSpec):
        grid = GridSpec(*grid)
    eye = np.eye(n, dtype=np.complex128)
    xs, ys = grid.xs, grid.ys
    vals = np.empty((grid.ny, grid.nx))
    failures = 0
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            try:
                vals[iy, ix] = smallest_singular(m - (x + 1j * y) * eye, mode=mode)
            except ConvergenceError:
                vals[iy, ix] = np.nan
                failures += 1
    return GridField(xs=xs, ys=ys, values=vals, failures=failures)


def wasserstein1(x, y):
    """Exact 1-Wasserstein distance of two 1-d empirical measures."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    allv = np.sort(np.concatenate([x, y]))
    if allv.size < 2:
        return 0.0
    deltas = np.diff(allv)
    fx = np.searchsorted(x, allv[:-1], side="right") / x.size
    fy = np.searchsorted(y, allv[:-1], side="right") / y.size
    return float(np.sum(np.abs(fx - fy) * deltas))


def kolmogorov_distance(x, y):
    """Two-sample Kolmogorov statistic sup_t |F_x(t) - F_y(t)|."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    allv = np.concatenate([x, y])
    fx = np.searchsorted(x, allv, side="right") / x.size
    fy = np.searchsorted(y, allv, side="right") / y.size
    return float(np.max(np.abs(fx - fy)))


@dataclass
class CompareReport:
    logpot_rmse: float
    logpot_max: float
    radial_wasserstein: float
    angular_kolmogorov: float
    support_coverage: float
    excluded_test_points: list = field(default_factory=list)


def compare_measures(sample_a, sample_b, test_z, clearance=0.1):
    """Quantitative comparison of two point samples in the plane.

    Log-potential discrepancies use (1/n) sum log|z - p| per sample at the
    given test points; points within `clearance` of either support are
    excluded (and reported).  Radial distance is the exact 1-Wasserstein
    distance of the modulus samples, angular the Kolmogorov distance of
    the arguments, and support_coverage the fraction of sample_a within
    `clearance` of sample_b's 0.999-quantile hull.
    """
    a = np.asarray(sample_a).astype(np.complex128).ravel()
    b = np.asarray(sample_b).astype(np.complex128).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("samples must be non-empty")

    kept = []
    diffs = []
    excluded = []
    for z in np.asarray(test_z, dtype=np.complex128).ravel():
        da = np.abs(z - a)
        db = np.abs(z - b)
        if min(da.min(), db.min()) < clearance:
            excluded.append(complex(z))
            continue
        diffs.append(float(np.mean(np.log(da)) - np.mean(np.log(db))))
        kept.append(z)
    diffs = np.asarray(diffs)
    rmse = float(np.sqrt(np.mean(diffs**2))) if diffs.size else np.nan
    dmax = float(np.max(np.abs(diffs))) if diffs.size else np.nan

    wass = wasserstein1(np.abs(a), np.abs(b))
    kolm = kolmogorov_distance(np.angle(a), np.angle(b))

    center = complex(np.median(b.real), np.median(b.imag))
    radii = np.abs(b - center)
    hull = b[radii <= np.quantile(radii, 0.999, method="higher")]
    covered = 0
    chunk = max(1, 200_000 // max(hull.size, 1))
    for i in range(0, a.size, chunk):
        seg = a[i : i + chunk]
        dmin = np.min(np.abs(seg[:, None] - hull[None, :]), axis=1)
        covered += int(np.sum(dmin <= clearance))
    return CompareReport(
        logpot_rmse=rmse,
        logpot_max=dmax,
        radial_wasserstein=wass,
        angular_kolmogorov=kolm,
        support_coverage=covered / a.size,
        excluded_test_points=excluded,
    )


def write_esd_csv(sample, path):
    """CSV `re,im`, one row per eigenvalue, 17 significant digits."""
    with open(path, "w") as fh:
        fh.write("re,im\n")
        for p in sample.points:
            fh.write(f"{p.real:.17g},{p.imag:.17g}\n")


def write_grid_csv(field, path):
    """CSV `x,y,sigma_min`, row-major over the grid."""
    with open(path, "w") as fh:
        fh.write("x,y,sigma_min\n")
        for iy, y in enumerate(field.ys):
            for ix, x in enumerate(field.xs):
                fh.write(f"{x:.17g},{y:.17g},{field.values[iy, ix]:.17g}\n")


def write_compare_csv(report, path):
    """One-row CSV with the CompareReport metrics."""
    with open(path, "w") as fh:
        fh.write(
            "logpot_rmse,logpot_max,radial_wasserstein,angular_kolmogorov,"
            "support_coverage,excluded_test_points\n"
        )
        fh.write(
            f"{report.logpot_rmse:.17g},{report.logpot_max:.17g},"
            f"{report.radial_wasserstein:.17g},{report.angular_kolmogorov:.17g},"
            f"{report.support_coverage:.17g},{len(report.excluded_test_points)}\n"
        )
