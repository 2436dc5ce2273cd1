"""Acceptance suite: one function per criterion, shared by pytest and the CLI.

Each criterion returns a CriterionResult with a pass flag and a one-line
detail; ``run_all`` prints a table and reports overall success.  Heavy
intermediate results (the N = 1000 models, their per-seed empirical log
potentials on the test ring, deterministic equivalents) are cached at
module level so the criteria can share them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import detequiv, limitlaw, linalg, models, rigidity, spectra, transfer
from .rng import RandomStream

N_DESK = 1000
GAMMA = 2.0
ETA = 0.1
NOISE_SEEDS = (101, 202, 303)
IID_DIAG_SEED = 7
RING_COUNT = 32
RING_RADIUS = 4.0

TOEPLITZ_COEFFS = (0.0, 1.0, 1.0)  # M = J + J^2
WILKINSON_SYM = models.TwistedSymbol((models.Affine(-1.0, 2.0), models.Constant(1.0)))
IID_LAW = models.DiagonalLaw.uniform(-2.0, 2.0)

_cache: dict = {}


@dataclass
class CriterionResult:
    cid: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"[{self.cid:2d}] {flag}  {self.name}  ({self.seconds:.1f}s)  {self.detail}"


def ring_points(count=RING_COUNT, radius=RING_RADIUS):
    k = np.arange(count)
    return radius * np.exp(2j * np.pi * k / count)


def _model_matrix(name):
    key = ("matrix", name)
    if key not in _cache:
        if name == "toeplitz":
            m = models.build_banded_toeplitz(
                models.TwistedSymbol.constant(TOEPLITZ_COEFFS), N_DESK
            )
        elif name == "wilkinson":
            m = models.build_twisted(WILKINSON_SYM, N_DESK)
        elif name == "iid":
            diag = models.sample_diagonal(IID_LAW, N_DESK, IID_DIAG_SEED)
            m = models.build_bidiagonal(diag)
        else:
            raise KeyError(name)
        _cache[key] = m
    return _cache[key]


def _empirical_ring(name, seed):
    """Empirical log potentials of the perturbed model on the test ring."""
    key = ("empirical", name, seed)
    if key not in _cache:
        m = _model_matrix(name)
        noisy = models.perturb(m, models.NoiseSpec(gamma=GAMMA, seed=seed))
        vals = np.array(
            [spectra.empirical_logpot(noisy, z) for z in ring_points()]
        )
        _cache[key] = vals
    return _cache[key]


def _limit_ring(name):
    key = ("limit", name)
    if key not in _cache:
        zs = ring_points()
        if name == "toeplitz":
            vals = np.array(
                [limitlaw.limit_logpot_toeplitz(TOEPLITZ_COEFFS, z) for z in zs]
            )
        elif name == "wilkinson":
            vals = np.array(
                [limitlaw.limit_logpot_twisted(WILKINSON_SYM, z) for z in zs]
            )
        elif name == "iid":
            vals = np.array([limitlaw.limit_logpot_iid(IID_LAW, z) for z in zs])
        else:
            raise KeyError(name)
        _cache[key] = vals
    return _cache[key]


def _g_ring(name):
    key = ("g", name)
    if key not in _cache:
        m = _model_matrix(name)
        cfg = detequiv.TruncationConfig(gamma=GAMMA, eta=ETA)
        _cache[key] = np.array(
            [detequiv.g_value(m, z, cfg).g_value for z in ring_points()]
        )
    return _cache[key]


def criterion_1():
    """Thouless/Jensen equivalence of the two limit log-potential routes."""
    t0 = time.time()
    coeffs = np.asarray(TOEPLITZ_COEFFS, dtype=complex)
    stream = RandomStream(2024)
    pts = []
    worst = 0.0
    theta = 2.0 * np.pi * np.arange(4096) / 4096
    curve = np.exp(1j * theta) + np.exp(2j * theta)
    while len(pts) < 100:
        u = stream.uniforms(2)
        z = 3.0 * np.sqrt(u[0]) * np.exp(2j * np.pi * u[1])
        # keep well clear of the symbol curve (>= 1e-3 required; 0.05 keeps
        # the trapezoid rule in its exponential-convergence regime)
        if np.min(np.abs(curve - z)) < 0.05:
            continue
        pts.append(z)
        diff = abs(
            limitlaw.limit_logpot_toeplitz(coeffs, z)
            - limitlaw.limit_logpot_quadrature(coeffs, z, nodes=4096)
        )
        worst = max(worst, diff)
    secs = time.time() - t0
    ok = worst <= 1e-8 and secs < 5.0
    return CriterionResult(
        1, "Thouless vs circle-average quadrature", ok,
        f"max |diff| = {worst:.2e} over 100 points (tol 1e-8)", secs,
    )


def criterion_2():
    """Banded Toeplitz limit at desk scale: J + J^2, N=1000, gamma=2."""
    t0 = time.time()
    limit = _limit_ring("toeplitz")
    worst = 0.0
    for seed in NOISE_SEEDS:
        emp = _empirical_ring("toeplitz", seed)
        worst = max(worst, float(np.max(np.abs(emp - limit))))
    secs = time.time() - t0
    ok = worst <= 0.05 and secs < 600.0
    return CriterionResult(
        2, "noisy J+J^2 log potential vs limit", ok,
        f"max |emp - limit| = {worst:.4f} over ring x {len(NOISE_SEEDS)} seeds "
        f"(tol 0.05)", secs,
    )


def criterion_3():
    """Wilkinson model: ring log potential + support coverage of the ESD."""
    t0 = time.time()
    limit = _limit_ring("wilkinson")
    worst = 0.0
    for seed in NOISE_SEEDS:
        emp = _empirical_ring("wilkinson", seed)
        worst = max(worst, float(np.max(np.abs(emp - limit))))

    m = _model_matrix("wilkinson")
    noisy = models.perturb(m, models.NoiseSpec(gamma=GAMMA, seed=NOISE_SEEDS[0]))
    sample = spectra.esd(noisy, gamma=GAMMA, seed=NOISE_SEEDS[0], model="wilkinson")
    dists = _dist_to_circle_union(sample.points)
    frac = float(np.mean(dists <= 0.1))
    secs = time.time() - t0
    ok = worst <= 0.05 and frac >= 0.99
    return CriterionResult(
        3, "Wilkinson log potential + ESD support", ok,
        f"max |emp - limit| = {worst:.4f} (tol 0.05); "
        f"{100 * frac:.2f}% of eigenvalues within 0.1 of the support (need 99%)",
        secs,
    )


def _dist_to_circle_union(w):
    """Distance to the union of unit circles centered on [-1, 1]."""
    w = np.asarray(w, dtype=complex)
    x = np.clip(w.real, -1.0, 1.0)
    d_seg = np.abs(w - x)
    far = np.maximum(np.abs(w - 1.0), np.abs(w + 1.0))
    return np.where(d_seg > 1.0, d_seg - 1.0, np.where(far >= 1.0, 0.0, 1.0 - far))


def criterion_4():
    """Bidiagonal i.i.d. model: ring log potential + one interior point."""
    t0 = time.time()
    limit = _limit_ring("iid")
    worst = 0.0
    for seed in NOISE_SEEDS:
        emp = _empirical_ring("iid", seed)
        worst = max(worst, float(np.max(np.abs(emp - limit))))

    z0 = 0.1 + 0.1j
    interior_limit = limitlaw.limit_logpot_iid(IID_LAW, z0)
    m = _model_matrix("iid")
    noisy = models.perturb(m, models.NoiseSpec(gamma=GAMMA, seed=NOISE_SEEDS[0]))
    interior_emp = spectra.empirical_logpot(noisy, z0)
    interior_err = abs(interior_emp - interior_limit)
    secs = time.time() - t0
    ok = worst <= 0.05 and interior_err <= 0.1
    return CriterionResult(
        4, "i.i.d. diagonal log potential (ring + interior)", ok,
        f"ring max = {worst:.4f} (tol 0.05); interior |err| = {interior_err:.4f} "
        f"(tol 0.1)", secs,
    )


def criterion_5():
    """Deterministic equivalent matches the noisy log determinant per seed."""
    t0 = time.time()
    worst = 0.0
    details = []
    for name in ("toeplitz", "wilkinson", "iid"):
        g = _g_ring(name)
        w_model = 0.0
        for seed in NOISE_SEEDS:
            emp = _empirical_ring(name, seed)
            w_model = max(w_model, float(np.max(np.abs(emp - g))))
        details.append(f"{name}: {w_model:.4f}")
        worst = max(worst, w_model)
    secs = time.time() - t0
    ok = worst <= 0.05
    return CriterionResult(
        5, "empirical log potential vs deterministic equivalent", ok,
        "max |emp - g| per model: " + ", ".join(details) + " (tol 0.05)", secs,
    )


def criterion_6():
    """Noise block leaves det(B) unbiased with the predicted variance."""
    t0 = time.time()
    n_ctx, block, reps = 200, 20, 2000
    b = detequiv.threshold_diagonal(n_ctx, block, gamma=1.0, eta=ETA, factor=2.0)
    rep = detequiv.schur_experiment(b, gamma=1.0, n_context=n_ctx, reps=reps,
                                    seed=909, eta=ETA)
    secs = time.time() - t0
    ok = rep.mean_within_4se and rep.variance_within_bound and secs < 60.0
    return CriterionResult(
        6, "determinant ratio Monte Carlo (mean/variance)", ok,
        f"|mean - 1| = {abs(rep.mean_ratio - 1):.4f} vs 4 SE = "
        f"{4 * rep.std_error:.4f}; var = {rep.sample_variance:.4f} vs "
        f"1.5 x bound = {1.5 * rep.variance_bound:.4f}", secs,
    )


def _sandwich_instances():
    """20 bidiagonal instances: Jordan, i.i.d. uniform, Holder profiles."""
    instances = []
    for z in (0.5, 0.9, 1.5):
        for n in (60, 150):
            d = np.full(n, complex(z))
            instances.append((f"jordan|z|={z},N={n}", d, rigidity.BlockPartition([0, n])))
    # i.i.d. uniform [-2,2] shifted by z (negative drift: beta < 0,
    # p_beta = E|d - z| by the closed form for the uniform law)
    for idx, z in enumerate((0.3, 0.3j, -0.5 + 0.2j, 0.8, 1.1j, -1.2, 0.05 + 0.6j)):
        n = 200
        diag = models.sample_diagonal(IID_LAW, n, 50 + idx) - z
        p1 = _uniform_abs_moment(z)
        part = rigidity.iid_partition(diag, delta=0.25, beta=-1.0, p_beta=p1)
        instances.append((f"iid z={z}", diag, part))
    profiles = [
        (models.Affine(-1.0, 2.0), 0.2j),
        (models.Affine(-1.0, 2.0), 0.5 + 0.1j),
        (models.Polynomial((0.3, 0.0, 1.0)), 0.4),
        (models.Affine(0.2, 1.5), 0.9),
        (models.Tabulated((-1.0, 0.5j, 1.2, 0.3)), 0.25),
        (models.Affine(-2.0, 4.0), 1.5),
        (models.Polynomial((-0.5, 2.0, -1.0)), 0.1 + 0.3j),
        (models.Affine(-1.0, 2.0), -0.7),
    ]
    for gen, z in profiles:
        n = 200
        shifted = lambda t, g=gen, zz=z: g(t) - zz
        diag = gen(np.arange(1, n + 1) / n) - z
        part = rigidity.holder_partition(shifted, n, delta=0.25)
        instances.append((f"holder {gen.__class__.__name__} z={z}", diag, part))
    return instances


def _uniform_abs_moment(z):
    """E |d - z| for d ~ Unif[-2, 2] (via quadrature; used as p_beta)."""
    t, w = np.polynomial.legendre.leggauss(200)
    t = 2.0 * t
    w = 2.0 * w / 4.0
    return float(np.sum(w * np.abs(t - z)))


def criterion_7():
    """Rigidity sandwich + floor on 20 mixed instances vs exact SVD."""
    t0 = time.time()
    instances = _sandwich_instances()
    assert len(instances) >= 20
    failures = []
    worst_c = 0.0
    for label, diag, part in instances:
        rep = rigidity.sandwich_check(diag, part)
        if not rep.all_ok:
            failures.append(label)
        if np.isfinite(rep.achieved_constant):
            worst_c = max(worst_c, rep.achieved_constant)
    secs = time.time() - t0
    ok = not failures and secs < 120.0
    detail = (
        f"{len(instances)} instances, worst achieved constant {worst_c:.3f} "
        f"(bound 8)" if ok else f"failed: {failures}"
    )
    return CriterionResult(7, "singular-value sandwich and floor", ok, detail, secs)


def criterion_8():
    """Smallest singular value of the Jordan block decays at rate |z|^N."""
    t0 = time.time()
    worst = 0.0
    details = []
    for z in (0.5, 0.9):
        for n in (20, 40, 80):
            d = np.full(n, complex(z))
            m = models.build_bidiagonal(d)
            smin = linalg.singular_values(m)[-1]
            err = abs(np.log(smin) / n - np.log(z))
            rel = err / abs(np.log(z))
            worst = max(worst, rel)
            details.append(f"z={z},N={n}: {rel:.3f}")
    secs = time.time() - t0
    ok = worst <= 0.1
    return CriterionResult(
        8, "Jordan smallest singular value rate", ok,
        f"max relative log-rate error {worst:.3f} (tol 0.1)", secs,
    )


def criterion_9():
    """Transfer-matrix eigenvector identity at random symbols."""
    t0 = time.time()
    stream = RandomStream(777)
    worst = 0.0
    done = 0
    while done < 200:
        u = stream.uniforms(3)
        d = 1 + int(u[0] * 5)  # band degree 1..5
        g = stream.complex_gaussians(d + 1)
        if abs(g[d]) < 0.05 * float(np.max(np.abs(g))):
            continue  # keep the companion matrix well scaled
        z = 2.0 * np.sqrt(u[2]) * np.exp(2j * np.pi * u[1])
        coeffs = g.copy()
        tm = transfer.transfer_matrix(coeffs, z)
        dh = tm.dim
        shifted = np.asarray(tm.coeffs, dtype=complex).copy()
        shifted[0] -= z
        roots = limitlaw.poly_roots(shifted)
        tnorm = float(linalg.singular_values(tm.matrix)[0])
        for r in roots:
            v = transfer.transfer_eigenvector(r, dh)
            resid = float(np.max(np.abs(tm.matrix @ v - r * v)))
            worst = max(worst, resid / (1.0 + tnorm))
        done += 1
    secs = time.time() - t0
    ok = worst <= 1e-10
    return CriterionResult(
        9, "transfer eigenvector identity (200 draws)", ok,
        f"max residual / (1 + ||T||) = {worst:.2e} (tol 1e-10)", secs,
    )


def criterion_10():
    """Linear-algebra oracle suite: eigen identities, SVD oracle, frames."""
    t0 = time.time()
    stream = RandomStream(4242)
    worst_tr = 0.0
    worst_svd = 0.0
    for _ in range(50):
        n = 2 + int(stream.uniforms(1)[0] * 49)
        a = stream.complex_gaussians(n * n).reshape(n, n)
        res = linalg.eigenvalues(a)
        fro = float(np.sqrt(np.sum(np.abs(a) ** 2)))
        worst_tr = max(
            worst_tr, abs(np.sum(res.values) - np.trace(a)) / (1.0 + fro)
        )
        sig = linalg.singular_values(a)
        gram = linalg.eigenvalues(a.conj().T @ a)
        lam = np.sqrt(np.maximum(np.sort(gram.values.real)[::-1], 0.0))
        worst_svd = max(
            worst_svd, float(np.max(np.abs(sig - lam))) / (1.0 + sig[0])
        )
    worst_frame_gap = 0.0   # how far any frame dips below prod sigma (must be >= -tol)
    worst_frame_eq = 0.0    # singular-frame equality error
    for t in range(100):
        n = 5 + int(stream.uniforms(1)[0] * 11)
        k = min(1 + int(stream.uniforms(1)[0] * n), n)
        a = stream.complex_gaussians(n * n).reshape(n, n)
        sig = linalg.singular_values(a)
        prod_small = float(np.prod(sig[n - k :]))
        inf_val = rigidity.frame_product_infimum(a, k, trials=20, seed=1000 + t)
        worst_frame_gap = max(
            worst_frame_gap, (prod_small - inf_val) / (1e-300 + prod_small)
        )
        worst_frame_eq = max(
            worst_frame_eq, abs(inf_val - prod_small) / (1e-300 + prod_small)
        )
    secs = time.time() - t0
    ok = (
        worst_tr <= 1e-9
        and worst_svd <= 1e-8
        and worst_frame_gap <= 1e-8
        and worst_frame_eq <= 1e-8
    )
    return CriterionResult(
        10, "linalg oracle suite", ok,
        f"trace {worst_tr:.1e} (tol 1e-9); svd-vs-gram {worst_svd:.1e} "
        f"(tol 1e-8); frame gap {worst_frame_gap:.1e} (tol 1e-8), "
        f"singular-frame dev {worst_frame_eq:.1e}", secs,
    )


ALL_CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
)


def run_all(cids=None, printer=print):
    """Run criteria (all by default), print one line each, return results."""
    results = []
    for fn in ALL_CRITERIA:
        cid = int(fn.__name__.split("_")[1])
        if cids is not None and cid not in cids:
            continue
        res = fn()
        results.append(res)
        if printer is not None:
            printer(res.line())
    if printer is not None and results:
        n_pass = sum(r.passed for r in results)
        printer(f"{n_pass}/{len(results)} criteria passed")
    return results
