"""Matrix families and their Gaussian perturbations, with reproducible noise.

Builders for banded upper-triangular Toeplitz matrices, their twisted
(slowly varying diagonal) variants, piecewise-constant regularized versions,
and bidiagonal matrices; plus complex Ginibre sampling and the
``M + N^{-gamma} G`` perturbation.

Convention: the standard complex Gaussian here has E g = 0, E|g|^2 = 1
(real and imaginary parts independent N(0, 1/2)).  Some libraries use
variance 1 per part; that is a different normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import qr_orthonormal
from .rng import RandomStream

__all__ = [
    "Generator",
    "Constant",
    "Affine",
    "Polynomial",
    "Tabulated",
    "as_generator",
    "TwistedSymbol",
    "DiagonalLaw",
    "NoiseSpec",
    "RegularizationParams",
    "RegularizedModel",
    "build_banded_toeplitz",
    "build_twisted",
    "build_regularized",
    "build_bidiagonal",
    "sample_diagonal",
    "sample_ginibre",
    "perturb",
    "random_unitary",
    "dump_matrix_csv",
]


class Generator:
    """A diagonal generator: evaluate f at x in [0, 1] (vectorized)."""

    is_constant = False

    def __call__(self, x):
        raise NotImplementedError

    def spec(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Generator):
    value: complex

    is_constant = True

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape, complex(self.value), dtype=np.complex128)

    def spec(self):
        return {"kind": "constant", "value": _c2pair(self.value)}


@dataclass(frozen=True)
class Affine(Generator):
    """f(x) = intercept + slope * x."""

    intercept: complex
    slope: complex

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return complex(self.intercept) + complex(self.slope) * x.astype(np.complex128)

    def spec(self):
        return {
            "kind": "affine",
            "intercept": _c2pair(self.intercept),
            "slope": _c2pair(self.slope),
        }


@dataclass(frozen=True)
class Polynomial(Generator):
    """f(x) = sum_k coeffs[k] * x^k."""

    coeffs: tuple

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=np.complex128)
        for c in reversed(self.coeffs):
            out = out * x + complex(c)
        return out

    def spec(self):
        return {"kind": "polynomial", "coeffs": [_c2pair(c) for c in self.coeffs]}


@dataclass(frozen=True)
class Tabulated(Generator):
    """Linear interpolation of values at equispaced nodes on [0, 1].

    x is clamped to [0, 1], which keeps Holder continuity of the table.
    """

    values: tuple

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValueError("tabulated generator needs at least two nodes")

    def __call__(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        nodes = np.linspace(0.0, 1.0, len(self.values))
        vals = np.asarray(self.values, dtype=np.complex128)
        return np.interp(x, nodes, vals.real) + 1j * np.interp(x, nodes, vals.imag)

    def spec(self):
        return {"kind": "tabulated", "values": [_c2pair(c) for c in self.values]}


def _c2pair(c):
    c = complex(c)
    return [c.real, c.imag]


def as_generator(obj):
    """Coerce a scalar or Generator into a Generator."""
    if isinstance(obj, Generator):
        return obj
    if isinstance(obj, (int, float, complex, np.integer, np.floating, np.complexfloating)):
        return Constant(complex(obj))
    raise TypeError(f"cannot interpret {obj!r} as a diagonal generator")


def generator_from_spec(spec):
    """Inverse of Generator.spec() (used by config files)."""
    kind = spec["kind"]
    if kind == "constant":
        return Constant(_pair2c(spec["value"]))
    if kind == "affine":
        return Affine(_pair2c(spec["intercept"]), _pair2c(spec["slope"]))
    if kind == "polynomial":
        return Polynomial(tuple(_pair2c(c) for c in spec["coeffs"]))
    if kind == "tabulated":
        return Tabulated(tuple(_pair2c(c) for c in spec["values"]))
    raise ValueError(f"unknown generator kind {kind!r}")


def _pair2c(p):
    if isinstance(p, (int, float)):
        return complex(p)
    return complex(p[0], p[1])


@dataclass(frozen=True)
class TwistedSymbol:
    """Band coefficients: generators[l] supplies diagonal l (l = 0..d)."""

    generators: tuple

    def __post_init__(self):
        gens = tuple(as_generator(g) for g in self.generators)
        if len(gens) == 0:
            raise ValueError("symbol needs at least the main diagonal (d >= 0)")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def constant(cls, coeffs):
        return cls(tuple(Constant(complex(c)) for c in coeffs))

    @property
    def d(self):
        return len(self.generators) - 1

    @property
    def is_constant(self):
        return all(g.is_constant for g in self.generators)

    def constant_coeffs(self):
        if not self.is_constant:
            raise ValueError("symbol has non-constant generators")
        return np.array([g.value for g in self.generators], dtype=np.complex128)

    def coeff_columns(self, x):
        """Array (d+1, len(x)) with row l holding f_l evaluated at x."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.vstack([g(x) for g in self.generators])


@dataclass(frozen=True)
class DiagonalLaw:
    """Law of the bidiagonal model's diagonal entries."""

    kind: str
    a: float = 0.0
    b: float = 0.0
    points: tuple = ()
    weights: tuple = ()
    profile_gen: Generator | None = None

    @classmethod
    def uniform(cls, a, b):
        if not b > a:
            raise ValueError("uniform interval must be non-degenerate")
        return cls(kind="uniform", a=float(a), b=float(b))

    @classmethod
    def discrete(cls, points, weights):
        points = tuple(complex(p) for p in points)
        weights = tuple(float(w) for w in weights)
        if len(points) != len(weights) or not points:
            raise ValueError("points and weights must be non-empty, same length")
        if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
            raise ValueError("weights must be non-negative and sum to 1")
        return cls(kind="discrete", points=points, weights=weights)

    @classmethod
    def profile(cls, f):
        return cls(kind="profile", profile_gen=as_generator(f))


@dataclass(frozen=True)
class NoiseSpec:
    """Perturbation strength N^{-gamma} and the noise seed."""

    gamma: float
    seed: int

    def __post_init__(self):
        if not self.gamma > 0.5:
            raise ValueError(f"gamma must exceed 1/2, got {self.gamma}")


@dataclass(frozen=True)
class RegularizationParams:
    """Block/threshold exponents for the piecewise-constant model.

    delta1 controls the block mesh N^{1-delta1}, delta2 the coefficient
    truncation threshold N^{-delta2}, delta3 the sub-block refinement used
    downstream.  Requires each in (0, 1/2) and delta1 < delta3/4; the
    gamma-dependent constraint is checked by :meth:`check_against`.
    """

    delta1: float
    delta2: float
    delta3: float

    def __post_init__(self):
        for name in ("delta1", "delta2", "delta3"):
            v = getattr(self, name)
            if not 0.0 < v < 0.5:
                raise ValueError(f"{name} must lie in (0, 1/2), got {v}")
        if not self.delta1 < self.delta3 / 4.0:
            raise ValueError("need delta1 < delta3 / 4")

    def check_against(self, gamma, d):
        """Validate max(deltas) <= (gamma - 1/2) / (20 d^2) for bandwidth d."""
        if d < 1:
            return
        bound = (gamma - 0.5) / (20.0 * d * d)
        worst = max(self.delta1, self.delta2, self.delta3)
        if worst > bound:
            raise ValueError(
                f"deltas must not exceed (gamma-1/2)/(20 d^2) = {bound:.4g}; "
                f"got max delta {worst:.4g}"
            )


@dataclass
class RegularizedModel:
    """Piecewise-constant model: matrix plus its block structure.

    boundaries[k] is the 0-based start row of block k (boundaries[-1] = N);
    coeffs[k, l] is the value taken by diagonal l throughout block k.
    """

    matrix: np.ndarray
    boundaries: np.ndarray
    coeffs: np.ndarray

    @property
    def n_blocks(self):
        return len(self.boundaries) - 1


def build_banded_toeplitz(sym, n):
    """M = sum_l a_l J^l for a constant symbol: entry (i, i+l) = a_l."""
    sym = _as_symbol(sym)
    a = sym.constant_coeffs()
    _check_size(n, sym.d)
    m = np.zeros((n, n), dtype=np.complex128)
    for ell, c in enumerate(a):
        if c != 0:
            m += c * np.eye(n, k=ell, dtype=np.complex128)
    return m


def build_twisted(sym, n):
    """Twisted variant: entry (i, i+l) = f_l(i/n), rows indexed 1..n."""
    sym = _as_symbol(sym)
    _check_size(n, sym.d)
    m = np.zeros((n, n), dtype=np.complex128)
    for ell, g in enumerate(sym.generators):
        rows = np.arange(n - ell)
        m[rows, rows + ell] = g((rows + 1) / n)
    return m


def build_bidiagonal(diag):
    """M = D + J: entry (i,i) = diag[i], entry (i,i+1) = 1."""
    d = np.asarray(diag, dtype=np.complex128)
    if d.ndim != 1 or d.size < 1:
        raise ValueError("diagonal must be a non-empty vector")
    n = d.size
    return np.diag(d) + np.eye(n, k=1, dtype=np.complex128)


def block_index(n, delta1):
    """Block label floor(i * n^{delta1 - 1}) for rows i = 1..n."""
    return np.floor(np.arange(1, n + 1) * float(n) ** (delta1 - 1.0)).astype(np.int64)


def build_regularized(sym, n, params):
    """Piecewise-constant regularization of the twisted model.

    Diagonal l takes the value f_l(k n^{-delta1}), zeroed when its modulus
    falls below n^{-delta2}, constant on each block
    b_k = {i : floor(i n^{delta1-1}) = k}; the last two blocks are merged
    with their coefficient values averaged so every block length lands in
    [n^{1-delta1}/2, 2 n^{1-delta1}].
    """
    sym = _as_symbol(sym)
    _check_size(n, sym.d)
    if not isinstance(params, RegularizationParams):
        raise TypeError("params must be RegularizationParams")
    ks = block_index(n, params.delta1)
    labels, starts = np.unique(ks, return_index=True)
    order = np.argsort(starts)
    starts = starts[order]
    labels = labels[order]

    xs = labels.astype(float) * float(n) ** (-params.delta1)
    coeffs = sym.coeff_columns(xs).T  # (n_blocks, d+1)
    thresh = float(n) ** (-params.delta2)
    coeffs = np.where(np.abs(coeffs) >= thresh, coeffs, 0.0)

    if len(starts) >= 2:
        merged = 0.5 * (coeffs[-2] + coeffs[-1])
        coeffs = np.vstack([coeffs[:-2], merged])
        starts = starts[:-1]
    boundaries = np.concatenate([starts, [n]]).astype(np.int64)

    block_of_row = np.searchsorted(boundaries, np.arange(n), side="right") - 1
    m = np.zeros((n, n), dtype=np.complex128)
    for ell in range(sym.d + 1):
        rows = np.arange(n - ell)
        m[rows, rows + ell] = coeffs[block_of_row[rows], ell]
    return RegularizedModel(matrix=m, boundaries=boundaries, coeffs=coeffs)


def sample_diagonal(law, n, seed):
    """Draw the diagonal, reproducibly: i.i.d. for random laws, f(i/n) exact
    for deterministic profiles."""
    if not isinstance(law, DiagonalLaw):
        raise TypeError("law must be a DiagonalLaw")
    if law.kind == "profile":
        return law.profile_gen((np.arange(1, n + 1)) / n)
    stream = RandomStream(seed)
    if law.kind == "uniform":
        u = stream.uniforms(n)
        return (law.a + (law.b - law.a) * u).astype(np.complex128)
    if law.kind == "discrete":
        cw = np.cumsum(np.asarray(law.weights, dtype=float))
        cw[-1] = 1.0
        idx = np.searchsorted(cw, stream.uniforms(n), side="right")
        idx = np.minimum(idx, len(law.points) - 1)
        return np.asarray(law.points, dtype=np.complex128)[idx]
    raise ValueError(f"unknown law kind {law.kind!r}")


def sample_ginibre(n, seed):
    """n x n matrix of i.i.d. standard complex Gaussians (E|g|^2 = 1)."""
    return RandomStream(seed).complex_gaussians(n * n).reshape(n, n)


def perturb(m, noise):
    """The noisy model M + n^{-gamma} G with G Ginibre from noise.seed."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("M must be square")
    n = m.shape[0]
    if not isinstance(noise, NoiseSpec):
        raise TypeError("noise must be a NoiseSpec")
    return m + float(n) ** (-noise.gamma) * sample_ginibre(n, noise.seed)


def random_unitary(n, seed):
    """Haar-ish unitary from the QR of a Ginibre sample."""
    return qr_orthonormal(sample_ginibre(n, seed))


def dump_matrix_csv(m, path):
    """Write a matrix as zero-suppressed `i,j,re,im` rows (0-based indices,
    17 significant digits)."""
    m = np.asarray(m, dtype=np.complex128)
    with open(path, "w") as fh:
        fh.write("i,j,re,im\n")
        nz = np.argwhere(m != 0)
        for i, j in nz:
            v = m[i, j]
            fh.write(f"{i},{j},{v.real:.17g},{v.imag:.17g}\n")


def _as_symbol(sym):
    if isinstance(sym, TwistedSymbol):
        return sym
    return TwistedSymbol(tuple(sym))


def _check_size(n, d):
    if n <= d:
        raise ValueError(f"matrix size {n} must exceed the band width {d}")
