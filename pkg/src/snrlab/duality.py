"""Norming functionals of weighted, scaled l^p norms.

A functional ``h`` acts by the bilinear pairing ``phi_h(x) = sum_i h_i x_i``
(no conjugation). The set ``D(x)`` of norm-one functionals with ``phi_h(x) = 1``
is convex; it is represented here by (a finite grid of) its extreme points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from math import comb
from typing import Iterator

import numpy as np

from .algebra import NormSpec, PreconditionError, SpecificationError

UNIT_TOL = 1e-10
TIE_TOL = 1e-12
VERIFY_TOL = 1e-9
DEFAULT_BUDGET = 4096


def pairing(h, x) -> complex | np.ndarray:
    return np.sum(np.asarray(h) * np.asarray(x), axis=-1)


def dual_norm(norm_spec: NormSpec, h) -> float | np.ndarray:
    m = np.abs(np.asarray(h)) / np.asarray(norm_spec.weights)
    p = norm_spec.p
    if norm_spec.is_inf:
        base = m.sum(axis=-1)
    elif p == 1:
        base = m.max(axis=-1)
    else:
        q = p / (p - 1)
        top = m.max(axis=-1, keepdims=True)
        safe = np.where(top > 0, top, 1.0)
        base = np.squeeze(safe, -1) * ((m / safe) ** q).sum(axis=-1) ** (1 / q)
    out = base / norm_spec.scale
    return float(out) if np.ndim(out) == 0 else out


def verify_functional(norm_spec: NormSpec, x, h, tol: float = VERIFY_TOL) -> bool:
    """True iff ``h`` is a norming functional of the unit vector ``x``."""
    x = np.asarray(x, dtype=complex)
    if abs(norm_spec(x) - 1) > max(tol, UNIT_TOL):
        raise PreconditionError(f"x must be a unit vector, ||x|| = {norm_spec(x)!r}")
    return bool(abs(pairing(h, x) - 1) <= tol and abs(dual_norm(norm_spec, h) - 1) <= tol)


def angle_grid(k: int) -> np.ndarray:
    """``k`` equispaced angles in [-pi, pi), starting at 0."""
    theta = 2 * np.pi * np.arange(k) / k
    return np.where(theta >= np.pi, theta - 2 * np.pi, theta)


def _torus_grid(free: int, k: int, budget: int, seed: int) -> np.ndarray:
    """Angle tuples for ``free`` independent circles, capped at ``budget`` rows."""
    theta = angle_grid(k)
    if free == 0:
        return np.zeros((1, 0))
    if k**free <= budget:
        idx = np.array(list(product(range(k), repeat=free)), dtype=int)
    else:
        rng = np.random.default_rng([seed, free, k])
        idx = rng.integers(0, k, size=(budget, free))
        idx[0] = 0
    return theta[idx]


def _compositions(parts: int, k: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for tail in _compositions(parts - 1, k - first):
            yield (first,) + tail


def simplex_grid(parts: int, k: int, budget: int, seed: int) -> np.ndarray:
    """Barycentric weights at resolution ``k``: vertices first, then the lattice."""
    k = max(k, 1)
    eye = np.eye(parts)
    if comb(k + parts - 1, parts - 1) <= budget:
        lattice = np.array(list(_compositions(parts, k)), dtype=float) / k
        inner = lattice[lattice.max(axis=1) < 1]
        return np.vstack([eye, inner])
    rng = np.random.default_rng([seed, parts, k])
    draws = rng.multinomial(k, np.full(parts, 1 / parts), size=max(budget - parts, 0)) / k
    return np.vstack([eye, draws])


@dataclass(frozen=True, eq=False)
class FunctionalFamily:
    """Extreme norming functionals of one unit vector.

    ``kind`` is ``"singleton"``, ``"circle-product"`` (p = 1: support values fixed,
    each free coordinate runs over a circle) or ``"simplex"`` (p = inf: convex
    combinations of the max-coordinate functionals).
    """

    kind: str
    base: np.ndarray
    free: np.ndarray
    radii: np.ndarray
    vertices: np.ndarray
    k: int
    budget: int
    seed: int

    def samples(self) -> np.ndarray:
        if self.kind == "singleton":
            return self.base[None, :].copy()
        if self.kind == "circle-product":
            grid = _torus_grid(len(self.free), self.k, self.budget, self.seed)
            out = np.repeat(self.base[None, :], len(grid), axis=0)
            out[:, self.free] = self.radii * np.exp(1j * grid)
            return out
        weights = simplex_grid(len(self.vertices), self.k, self.budget, self.seed)
        return weights @ self.vertices

    def __len__(self) -> int:
        if self.kind == "singleton":
            return 1
        if self.kind == "circle-product":
            return len(_torus_grid(len(self.free), self.k, self.budget, self.seed))
        return len(simplex_grid(len(self.vertices), self.k, self.budget, self.seed))


def _check_unit(norm_spec: NormSpec, x: np.ndarray) -> None:
    if x.shape[-1] != norm_spec.dim:
        raise SpecificationError("dimension mismatch between norm and vector")
    if not np.all(np.isfinite(x)):
        raise SpecificationError("vector has non-finite entries")
    nx = np.asarray(norm_spec(x))
    if np.any(nx == 0):
        raise PreconditionError("the zero vector has no norming functional")
    if np.any(np.abs(nx - 1) > UNIT_TOL):
        raise PreconditionError(f"x must be a unit vector (max deviation {np.abs(nx - 1).max():.3e})")


def _smooth(norm_spec: NormSpec, u: np.ndarray) -> np.ndarray:
    p = norm_spec.p
    w = np.asarray(norm_spec.weights)
    mag = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = w**p * np.where(mag > 0, mag ** (p - 2), 0.0) * np.conj(u)
    return np.where(mag > 0, h, 0)


def norming_functionals(
    norm_spec: NormSpec,
    x,
    k: int = 64,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> FunctionalFamily:
    """The family ``D(x)`` for a unit vector ``x``.

    A scaled norm ``c ||.||`` is reduced to the unscaled case via
    ``D_{c||.||}(x) = c D_{||.||}(c x)``.
    """
    x = np.asarray(x, dtype=complex)
    _check_unit(norm_spec, x)
    c = norm_spec.scale
    u = c * x
    w = np.asarray(norm_spec.weights)
    n = len(x)
    empty_i = np.zeros(0, dtype=int)
    empty_v = np.zeros((0, n), dtype=complex)
    if norm_spec.is_inf:
        m = w * np.abs(u)
        top = np.flatnonzero(m >= m.max() - TIE_TOL)
        verts = np.zeros((len(top), n), dtype=complex)
        verts[np.arange(len(top)), top] = c * w[top] * np.conj(u[top]) / np.abs(u[top])
        if len(top) == 1:
            return FunctionalFamily("singleton", verts[0], empty_i, np.zeros(0), empty_v, k, budget, seed)
        return FunctionalFamily("simplex", np.zeros(n, dtype=complex), empty_i, np.zeros(0), verts, k, budget, seed)
    if norm_spec.p == 1:
        nz = u != 0
        base = np.zeros(n, dtype=complex)
        base[nz] = c * w[nz] * np.conj(u[nz]) / np.abs(u[nz])
        free = np.flatnonzero(~nz)
        if len(free) == 0:
            return FunctionalFamily("singleton", base, empty_i, np.zeros(0), empty_v, k, budget, seed)
        return FunctionalFamily("circle-product", base, free, c * w[free], empty_v, k, budget, seed)
    return FunctionalFamily("singleton", c * _smooth(norm_spec, u), empty_i, np.zeros(0), empty_v, k, budget, seed)


def functional_batches(
    norm_spec: NormSpec,
    X: np.ndarray,
    k: int = 64,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    max_entries: int = 2_000_000,
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Vectorized ``norming_functionals`` over the rows of ``X``.

    Yields ``(rows, H)`` with ``H[r, m, :]`` the m-th family sample of ``X[rows[r]]``;
    row groups share a family shape. Sample order matches ``FunctionalFamily.samples``.
    """
    X = np.asarray(X, dtype=complex)
    _check_unit(norm_spec, X)
    c = norm_spec.scale
    U = c * X
    w = np.asarray(norm_spec.weights)
    N, n = X.shape
    if not norm_spec.is_inf and norm_spec.p != 1:
        yield np.arange(N), (c * _smooth(norm_spec, U))[:, None, :]
        return
    if norm_spec.is_inf:
        m = w * np.abs(U)
        mask = m >= m.max(axis=1, keepdims=True) - TIE_TOL
        phase = np.where(np.abs(U) > 0, np.conj(U) / np.where(np.abs(U) > 0, np.abs(U), 1), 0)
        vert_all = c * w * phase  # row i, coordinate j: vertex value at j
    else:
        mask = U == 0
        phase = np.where(~mask, np.conj(U) / np.where(mask, 1, np.abs(U)), 0)
        fixed = c * w * phase
    single = mask.sum(axis=1) == (1 if norm_spec.is_inf else 0)
    rows = np.flatnonzero(single)
    if len(rows):
        if norm_spec.is_inf:
            H = np.where(mask[rows], vert_all[rows], 0)
        else:
            H = fixed[rows]
        yield rows, H[:, None, :]
    multi = np.flatnonzero(~single)
    if not len(multi):
        return
    keys, inverse = np.unique(mask[multi], axis=0, return_inverse=True)
    inverse = np.ravel(inverse)
    for g, key in enumerate(keys):
        grp = multi[inverse == g]
        idx = np.flatnonzero(key)
        if norm_spec.is_inf:
            weights = simplex_grid(len(idx), k, budget, seed)
            # H[r, m, idx[v]] = weights[m, v] * vertex_value[r, idx[v]]
            H_shape = (len(weights), n)
        else:
            grid = _torus_grid(len(idx), k, budget, seed)
            H_shape = (len(grid), n)
        step = max(1, max_entries // (H_shape[0] * n))
        for s in range(0, len(grp), step):
            part = grp[s : s + step]
            H = np.zeros((len(part),) + H_shape, dtype=complex)
            if norm_spec.is_inf:
                H[:, :, idx] = weights[None, :, :] * vert_all[part][:, None, idx]
            else:
                H[:, :, :] = fixed[part][:, None, :]
                H[:, :, idx] = (c * w[idx]) * np.exp(1j * grid)[None, :, :]
            yield part, H

