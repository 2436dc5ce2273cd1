"""Counter-based random streams for reproducible, order-independent sampling.

Every stream is a pure function of ``(master_seed, task)``: drawing n values
then m values gives the same numbers as drawing n+m at once, and distinct
tasks produce statistically independent streams.  This makes parallel
sampling over seeds/tasks deterministic regardless of scheduling.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U53 = float(1 << 53)


def _mix64(x):
    """SplitMix64 finalizer on uint64 scalars/arrays (full avalanche)."""
    x = np.uint64(x) if np.isscalar(x) else x.astype(np.uint64)
    x = x ^ (x >> np.uint64(30))
    x = x * _MIX1
    x = x ^ (x >> np.uint64(27))
    x = x * _MIX2
    x = x ^ (x >> np.uint64(31))
    return x


class RandomStream:
    """Counter-based generator: value i of stream (seed, task) is
    mix64(key + (i+1)*golden) with key = mix64(seed ^ mix64(task+1)).
    """

    def __init__(self, seed, task=0):
        with np.errstate(over="ignore"):
            key = _mix64(np.uint64(seed) ^ _mix64(np.uint64(task) + np.uint64(1)))
        self._key = key
        self._counter = np.uint64(0)

    def _raw(self, n):
        with np.errstate(over="ignore"):
            idx = self._counter + np.uint64(1) + np.arange(n, dtype=np.uint64)
            out = _mix64(self._key + idx * _GOLDEN)
        self._counter += np.uint64(n)
        return out

    def uniforms(self, n):
        """n uniforms in [0, 1) built from the top 53 bits."""
        return (self._raw(n) >> np.uint64(11)).astype(np.float64) / _U53

    def uniforms_open(self, n):
        """n uniforms in (0, 1], safe as log / Box-Muller radial inputs."""
        return ((self._raw(n) >> np.uint64(11)).astype(np.float64) + 1.0) / _U53

    def complex_gaussians(self, n):
        """n standard complex Gaussians: E g = 0, E|g|^2 = 1.

        Uses the polar Box-Muller form g = sqrt(-log u1) * exp(2*pi*i*u2),
        which makes Re g, Im g independent N(0, 1/2).
        """
        u1 = self.uniforms_open(n)
        u2 = self.uniforms(n)
        r = np.sqrt(-np.log(u1))
        return r * np.exp(2j * np.pi * u2)

    def gaussians(self, n):
        """n real standard normals (variance 1) via Box-Muller pairs."""
        m = (n + 1) // 2
        u1 = self.uniforms_open(m)
        u2 = self.uniforms(m)
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
        return out[:n]
