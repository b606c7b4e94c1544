"""Deterministic samplers for the unit sphere of a weighted l^p norm.

Every strategy is a prefix-stable stream: the first ``N`` points of a request
for ``N' > N`` points are exactly the points of a request for ``N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.stats import qmc

from .algebra import NormSpec, SpecificationError

STRATEGIES = ("mixed", "gaussian", "structured")
TIE_ANGLES = 64


@dataclass(frozen=True)
class SphereSampler:
    strategy: str = "mixed"
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise SpecificationError(f"unknown sampling strategy {self.strategy!r}")

    def sample(self, norm_spec: NormSpec, count: int) -> np.ndarray:
        if count < 0:
            raise SpecificationError("sample count must be non-negative")
        if self.strategy == "gaussian":
            raw = _gaussian(norm_spec.dim, count, self.seed)
        elif self.strategy == "structured":
            raw = _structured(norm_spec, count, self.seed)
        else:
            n_struct = (count + 1) // 2
            raw = np.empty((count, norm_spec.dim), dtype=complex)
            raw[0::2] = _structured(norm_spec, n_struct, self.seed)
            raw[1::2] = _gaussian(norm_spec.dim, count - n_struct, self.seed)
        return normalize(norm_spec, raw)


def normalize(norm_spec: NormSpec, x: np.ndarray) -> np.ndarray:
    nx = np.asarray(norm_spec(x))
    if np.any(nx == 0):
        raise SpecificationError("cannot normalize the zero vector")
    return x / nx[..., None]


def _gaussian(dim: int, count: int, seed: int) -> np.ndarray:
    g = np.random.default_rng([seed, 1]).standard_normal((count, 2 * dim))
    x = g[:, :dim] + 1j * g[:, dim:]
    if dim > 2:
        # a quarter of the draws get a random sparse support
        u = np.random.default_rng([seed, 2]).random((count, dim + 1))
        sparse = u[:, -1] < 0.25
        keep = u[:, :dim] < 0.5
        keep[np.arange(count), np.argmax(np.abs(x), axis=1)] = True
        x = np.where(sparse[:, None] & ~keep, 0, x)
    return x


def _magnitudes(norm_spec: NormSpec, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pair magnitudes (before weights) on the unit sphere of the unweighted 2-d norm."""
    if norm_spec.is_inf:
        # 40% of the stream lands exactly on ties |x_i| = |x_j|
        lo = t < 0.5
        s = np.where(lo, np.minimum(1.0, 2.5 * t), np.minimum(1.0, 2.5 * (1 - t)))
        return np.where(lo, 1.0, s), np.where(lo, s, 1.0)
    p = norm_spec.p
    return t ** (1 / p), (1 - t) ** (1 / p)


def _structured(norm_spec: NormSpec, count: int, seed: int) -> np.ndarray:
    n = norm_spec.dim
    w = np.asarray(norm_spec.weights)
    out = np.zeros((count, n), dtype=complex)
    if count == 0:
        return out
    pos = 0
    # coordinate axes
    for i in range(min(n, count)):
        out[pos, i] = 1.0 / w[i]
        pos += 1
    pairs = list(combinations(range(n), 2))
    # equal-magnitude pairs over a phase grid
    psi = -np.pi + 2 * np.pi * np.arange(TIE_ANGLES) / TIE_ANGLES
    half = np.array([0.5])
    mi, mj = _magnitudes(norm_spec, half) if not norm_spec.is_inf else (np.ones(1), np.ones(1))
    for i, j in pairs:
        for ph in psi:
            if pos >= count:
                return out
            out[pos, i] = mi[0] / w[i]
            out[pos, j] = mj[0] * np.exp(1j * ph) / w[j]
            pos += 1
    rest = count - pos
    if rest <= 0 or not pairs:
        if rest > 0:
            out[pos:, 0] = 1.0 / w[0]
        return out
    u = qmc.Halton(d=3, scramble=True, seed=seed).random(rest)
    which = np.minimum((u[:, 0] * len(pairs)).astype(int), len(pairs) - 1)
    ai, aj = _magnitudes(norm_spec, u[:, 1])
    phase = np.exp(1j * (2 * np.pi * u[:, 2] - np.pi))
    idx = np.array(pairs)
    rows = np.arange(pos, count)
    out[rows, idx[which, 0]] = ai / w[idx[which, 0]]
    out[rows, idx[which, 1]] = aj * phase / w[idx[which, 1]]
    return out
