"""Command-line front door: reproducible experiment runs emitting CSV + JSON.

Subcommands: simulate, predict, detequiv, rigidity, pseudospec, compare,
accept.  Configuration comes from an optional JSON file (--config) with
flat ``--key value`` flags overriding file entries; unknown keys are
rejected.  Every run writes a metadata sidecar sufficient to reproduce it.
Exit codes: 0 success, 1 assertion/criterion failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, acceptance, detequiv, limitlaw, models, rigidity, spectra

OUT_ENV = "NNSPECTRA_OUT"

_KNOWN_KEYS = {
    "model", "coeffs", "generators", "law", "profile", "z0",
    "n", "gamma", "seeds", "eta", "delta1", "delta2", "delta3",
    "grid", "test_points", "out", "workers", "count",
    "sample_a", "sample_b", "mode", "z",
}

_MODELS = ("toeplitz", "twisted", "bidiagonal-iid", "bidiagonal-profile", "jordan")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Validated experiment configuration (see module docstring)."""

    model: str = "toeplitz"
    coeffs: list = field(default_factory=lambda: [[0.0, 0.0], [1.0, 0.0]])
    generators: list = field(default_factory=list)
    law: dict = field(default_factory=lambda: {"kind": "uniform", "a": -2.0, "b": 2.0})
    profile: dict = field(default_factory=dict)
    z0: list = field(default_factory=lambda: [0.0, 0.0])
    n: int = 200
    gamma: float = 2.0
    seeds: list = field(default_factory=lambda: [1])
    eta: float = 0.1
    delta1: float = 0.02
    delta2: float = 0.05
    delta3: float = 0.09
    grid: dict = field(default_factory=lambda: {
        "x0": -1.5, "x1": 1.5, "nx": 41, "y0": -1.5, "y1": 1.5, "ny": 41})
    test_points: dict = field(default_factory=lambda: {"radius": 4.0, "count": 32})
    out: str = ""
    workers: int = 1
    count: int = 10000
    sample_a: str = ""
    sample_b: str = ""
    mode: str = "auto"
    z: list = field(default_factory=lambda: [3.0, 0.0])

    def __post_init__(self):
        if self.model not in _MODELS:
            raise ConfigError(f"unknown model {self.model!r}; pick from {_MODELS}")
        if not self.gamma > 0.5:
            raise ConfigError(f"gamma must exceed 1/2, got {self.gamma}")
        if self.n < 1:
            raise ConfigError("n must be positive")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if self.eta <= 0:
            raise ConfigError("eta must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            models.RegularizationParams(self.delta1, self.delta2, self.delta3)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, config_path, overrides):
        data = {}
        if config_path:
            with open(config_path) as fh:
                data.update(json.load(fh))
        data.update(overrides)
        unknown = set(data) - _KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def symbol(self):
        if self.model == "twisted":
            if not self.generators:
                raise ConfigError("twisted model needs 'generators'")
            return models.TwistedSymbol(
                tuple(models.generator_from_spec(g) for g in self.generators)
            )
        return models.TwistedSymbol.constant([_cplx(c) for c in self.coeffs])

    def diagonal_law(self):
        law = dict(self.law)
        kind = law.pop("kind", "uniform")
        if kind == "uniform":
            return models.DiagonalLaw.uniform(law["a"], law["b"])
        if kind == "discrete":
            return models.DiagonalLaw.discrete(
                [_cplx(p) for p in law["points"]], law["weights"]
            )
        raise ConfigError(f"unknown law kind {kind!r}")

    def build_matrix(self, seed=None):
        if self.model == "toeplitz":
            return models.build_banded_toeplitz(self.symbol(), self.n)
        if self.model == "twisted":
            return models.build_twisted(self.symbol(), self.n)
        if self.model == "bidiagonal-iid":
            dseed = seed if seed is not None else self.seeds[0]
            diag = models.sample_diagonal(self.diagonal_law(), self.n, dseed)
            return models.build_bidiagonal(diag)
        if self.model == "bidiagonal-profile":
            if not self.profile:
                raise ConfigError("bidiagonal-profile model needs 'profile'")
            gen = models.generator_from_spec(self.profile)
            diag = models.sample_diagonal(models.DiagonalLaw.profile(gen), self.n, 0)
            return models.build_bidiagonal(diag)
        if self.model == "jordan":
            return models.build_bidiagonal(np.full(self.n, _cplx(self.z0)))
        raise ConfigError(self.model)

    def ring(self):
        r = float(self.test_points.get("radius", 4.0))
        c = int(self.test_points.get("count", 32))
        return acceptance.ring_points(count=c, radius=r)

    def grid_spec(self):
        g = self.grid
        return spectra.GridSpec(g["x0"], g["x1"], g["nx"], g["y0"], g["y1"], g["ny"])


def _cplx(v):
    if isinstance(v, (int, float)):
        return complex(v)
    return complex(v[0], v[1])


def _outdir(cfg, default_name):
    base = cfg.out or os.environ.get(OUT_ENV, ".")
    path = Path(base) / default_name if cfg.out == "" else Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_metadata(path, cfg, command, extra, seconds):
    meta = {
        "command": command,
        "config": {k: getattr(cfg, k) for k in (
            "model", "coeffs", "generators", "law", "profile", "z0", "n",
            "gamma", "seeds", "eta", "delta1", "delta2", "delta3", "grid",
            "test_points", "workers", "count", "mode", "z",
        )},
        "version": __version__,
        "wall_seconds": seconds,
    }
    meta.update(extra)
    with open(path / "metadata.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)


def _map_ordered(fn, items, workers):
    """Apply fn over items; results in input order regardless of workers."""
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def cmd_simulate(cfg):
    t0 = time.time()
    out = _outdir(cfg, "simulate")
    m = cfg.build_matrix()

    def one(seed):
        noisy = models.perturb(m, models.NoiseSpec(gamma=cfg.gamma, seed=seed))
        sample = spectra.esd(noisy, gamma=cfg.gamma, seed=seed, model=cfg.model)
        spectra.write_esd_csv(sample, out / f"esd_seed{seed}.csv")
        return seed

    done = _map_ordered(one, cfg.seeds, cfg.workers)
    _write_metadata(out, cfg, "simulate", {"written_seeds": done}, time.time() - t0)
    print(f"simulate: wrote {len(done)} ESD file(s) to {out}")
    return 0


def cmd_predict(cfg):
    t0 = time.time()
    out = _outdir(cfg, "predict")
    if cfg.model in ("toeplitz", "twisted"):
        sym = cfg.symbol()
        samples = limitlaw.sample_limit_law(sym, cfg.count, cfg.seeds[0])
        predictor = (
            (lambda z: limitlaw.limit_logpot_toeplitz(sym.constant_coeffs(), z))
            if sym.is_constant
            else (lambda z: limitlaw.limit_logpot_twisted(sym, z))
        )
    elif cfg.model == "bidiagonal-iid":
        from .rng import RandomStream

        law = cfg.diagonal_law()
        d_pts = models.sample_diagonal(law, cfg.count, cfg.seeds[0])
        u = np.exp(2j * np.pi * RandomStream(cfg.seeds[0], task=1).uniforms(cfg.count))
        samples = d_pts + u  # limit law of D + J: d + uniform circle point
        predictor = lambda z: limitlaw.limit_logpot_iid(law, z)
    elif cfg.model in ("bidiagonal-profile", "jordan"):
        if cfg.model == "jordan":
            gen = models.Constant(_cplx(cfg.z0))
        else:
            gen = models.generator_from_spec(cfg.profile)
        sym = models.TwistedSymbol((gen, models.Constant(1.0)))
        samples = limitlaw.sample_limit_law(sym, cfg.count, cfg.seeds[0])
        predictor = lambda z: limitlaw.limit_logpot_twisted(sym, z)
    else:
        raise ConfigError(cfg.model)

    with open(out / "limit_samples.csv", "w") as fh:
        fh.write("re,im\n")
        for p in samples:
            fh.write(f"{p.real:.17g},{p.imag:.17g}\n")
    refused = 0
    with open(out / "limit_logpot.csv", "w") as fh:
        fh.write("z_re,z_im,logpot\n")
        for z in cfg.ring():
            try:
                v = predictor(z)
            except limitlaw.SingularityProximityError:
                refused += 1
                continue
            fh.write(f"{z.real:.17g},{z.imag:.17g},{v:.17g}\n")
    _write_metadata(out, cfg, "predict", {"refused_points": refused}, time.time() - t0)
    print(f"predict: wrote samples and log potentials to {out}")
    return 0


def cmd_detequiv(cfg):
    t0 = time.time()
    out = _outdir(cfg, "detequiv")
    m = cfg.build_matrix()
    tcfg = detequiv.TruncationConfig(gamma=cfg.gamma, eta=cfg.eta)
    ring = cfg.ring()

    def one(iz):
        z = ring[iz]
        rep = detequiv.equivalence_report(m, z, tcfg, cfg.seeds)
        detequiv.write_equivalence_csv(rep, out / f"detequiv_z{iz:03d}.csv")
        return rep.max_abs_discrepancy

    worst = max(_map_ordered(one, range(len(ring)), cfg.workers))
    _write_metadata(out, cfg, "detequiv", {"max_abs_discrepancy": worst},
                    time.time() - t0)
    print(f"detequiv: max |discrepancy| = {worst:.4g}; reports in {out}")
    return 0


def cmd_rigidity(cfg):
    t0 = time.time()
    out = _outdir(cfg, "rigidity")
    reports = []
    for seed in cfg.seeds:
        if cfg.model == "jordan":
            diag = np.full(cfg.n, _cplx(cfg.z0))
            part = rigidity.BlockPartition([0, cfg.n])
        elif cfg.model == "bidiagonal-iid":
            diag = models.sample_diagonal(cfg.diagonal_law(), cfg.n, seed)
            part = rigidity.iid_partition(diag, delta=0.25, beta=-1.0,
                                          p_beta=float(np.mean(np.abs(diag))))
        elif cfg.model == "bidiagonal-profile":
            gen = models.generator_from_spec(cfg.profile)
            diag = gen(np.arange(1, cfg.n + 1) / cfg.n)
            part = rigidity.holder_partition(gen, cfg.n, delta=0.25)
        else:
            raise ConfigError("rigidity needs a bidiagonal/jordan model")
        reports.append(rigidity.sandwich_check(diag, part))
    rigidity.write_sandwich_csv(reports, out / "sandwich.csv")
    ok = all(r.all_ok for r in reports)
    _write_metadata(out, cfg, "rigidity", {"all_ok": ok}, time.time() - t0)
    print(f"rigidity: {sum(r.all_ok for r in reports)}/{len(reports)} instances ok; "
          f"CSV in {out}")
    return 0 if ok else 1


def cmd_pseudospec(cfg):
    t0 = time.time()
    out = _outdir(cfg, "pseudospec")
    m = cfg.build_matrix()
    gs = cfg.grid_spec()
    field_rows = _map_ordered(
        lambda iy: spectra.pseudospectrum_grid(
            m,
            spectra.GridSpec(gs.x0, gs.x1, gs.nx, gs.ys[iy], gs.ys[iy], 1),
            mode=cfg.mode,
        ),
        range(gs.ny),
        cfg.workers,
    )
    values = np.vstack([fr.values for fr in field_rows])
    failures = sum(fr.failures for fr in field_rows)
    field = spectra.GridField(xs=gs.xs, ys=gs.ys, values=values, failures=failures)
    spectra.write_grid_csv(field, out / "grid.csv")
    _write_metadata(out, cfg, "pseudospec", {"failures": failures}, time.time() - t0)
    print(f"pseudospec: {gs.nx}x{gs.ny} grid written to {out} "
          f"({failures} failed nodes)")
    return 0


def _read_points_csv(path):
    pts = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header[:2] != ["re", "im"]:
            raise ConfigError(f"{path}: expected header re,im")
        for line in fh:
            re_s, im_s = line.strip().split(",")
            pts.append(complex(float(re_s), float(im_s)))
    if not pts:
        raise ConfigError(f"{path}: no points")
    return np.array(pts)


def cmd_compare(cfg):
    t0 = time.time()
    out = _outdir(cfg, "compare")
    if not cfg.sample_a or not cfg.sample_b:
        raise ConfigError("compare needs sample_a and sample_b CSV paths")
    a = _read_points_csv(cfg.sample_a)
    b = _read_points_csv(cfg.sample_b)
    rep = spectra.compare_measures(a, b, cfg.ring())
    spectra.write_compare_csv(rep, out / "compare.csv")
    _write_metadata(out, cfg, "compare", {}, time.time() - t0)
    print(
        f"compare: logpot rmse {rep.logpot_rmse:.4g}, radial W1 "
        f"{rep.radial_wasserstein:.4g}, angular K {rep.angular_kolmogorov:.4g}, "
        f"coverage {rep.support_coverage:.3f}"
    )
    return 0


def cmd_accept(_cfg):
    results = acceptance.run_all()
    return 0 if all(r.passed for r in results) else 1


_COMMANDS = {
    "simulate": cmd_simulate,
    "predict": cmd_predict,
    "detequiv": cmd_detequiv,
    "rigidity": cmd_rigidity,
    "pseudospec": cmd_pseudospec,
    "compare": cmd_compare,
    "accept": cmd_accept,
}


def _parse_override(raw):
    """Flag values: JSON when it parses, bare string otherwise."""
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="nnspectra",
        description="Noisy non-normal matrix spectra laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default="", help="JSON config file")
    args, extra = parser.parse_known_args(argv)

    overrides = {}
    tokens = list(extra)
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--"):
            parser.error(f"expected --key, got {tok!r}")
        if i + 1 >= len(tokens):
            parser.error(f"missing value for {tok}")
        overrides[tok[2:].replace("-", "_")] = _parse_override(tokens[i + 1])
        i += 2

    try:
        cfg = RunConfig.load(args.config, overrides)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
