"""Sampling estimates of the spatial numerical range.

``V(a) = union over unit x of {phi(a x) : phi in D(x)}``. The estimator samples
unit vectors, evaluates the extreme norming functionals of each on ``a x`` and
returns the union: an inner approximation of ``V(a)``.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import AlgebraSpec, PreconditionError, SpecificationError, left_matrix
from .duality import DEFAULT_BUDGET, functional_batches, norming_functionals
from .geometry import convex_hull, dedupe
from .sampling import SphereSampler

DEFAULT_SAMPLES = 50_000
DEFAULT_K = 64
RADIUS_SLACK = 1e-8
CHUNK = 8192
CHUNK_VALUES = 4_000_000


@dataclass(eq=False)
class PointCloud:
    points: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    def to_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["re", "im"])
            for z in self.points:
                out.writerow([f"{z.real:.17g}", f"{z.imag:.17g}"])

    @classmethod
    def from_csv(cls, path: str | os.PathLike) -> "PointCloud":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["re", "im"]:
            raise SpecificationError(f"{path}: expected header 're,im'")
        pts = []
        for line, row in enumerate(rows[1:], start=2):
            try:
                pts.append(complex(float(row[0]), float(row[1])))
            except (IndexError, ValueError) as exc:
                raise SpecificationError(f"{path}:{line}: {exc}") from exc
        return cls(np.array(pts, dtype=complex), {"source": str(path)})

    def to_json(self) -> dict[str, Any]:
        return {"meta": self.meta, "points": [[float(z.real), float(z.imag)] for z in self.points]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "PointCloud":
        try:
            pts = np.array([complex(float(a), float(b)) for a, b in data["points"]], dtype=complex)
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecificationError(f"malformed cloud document: {exc}") from exc
        return cls(pts, dict(data.get("meta", {})))

    def save(self, path: str | os.PathLike) -> None:
        if str(path).endswith(".json"):
            Path(path).write_text(json.dumps(self.to_json(), sort_keys=True))
        else:
            self.to_csv(path)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "PointCloud":
        if str(path).endswith(".json"):
            try:
                data = json.loads(Path(path).read_text())
            except json.JSONDecodeError as exc:
                raise SpecificationError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
            return cls.from_json(data)
        return cls.from_csv(path)


def snr_at(A: AlgebraSpec, a, x, k: int = DEFAULT_K, budget: int = DEFAULT_BUDGET, seed: int = 0) -> np.ndarray:
    """Values ``phi(a x)`` over the extreme norming functionals of the unit vector ``x``."""
    x = np.asarray(x, dtype=complex)
    family = norming_functionals(A.norm, x, k, budget, seed)
    ax = left_matrix(A, a) @ x
    return family.samples() @ ax


def _evaluate(A, L, X, k, budget, seed, fill_levels) -> np.ndarray:
    """Values for the rows of ``X``, ordered by row so that streams are prefix-stable."""
    Y = X @ L.T
    parts, order = [], []
    for rows, H in functional_batches(A.norm, X, k, budget, seed):
        vals = np.einsum("rmn,rn->rm", H, Y[rows])
        blocks = [vals]
        if fill_levels > 0 and vals.shape[1] > 1:
            centre = vals.mean(axis=1, keepdims=True)
            blocks += [centre + (j / fill_levels) * (vals - centre) for j in range(fill_levels)]
        block = np.concatenate(blocks, axis=1)
        parts.append(block.ravel())
        order.append(np.repeat(rows, block.shape[1]))
    if not parts:
        return np.zeros(0, dtype=complex)
    values, owner = np.concatenate(parts), np.concatenate(order)
    return values[np.argsort(owner, kind="stable")]


def _threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("SNR_LAB_THREADS", "1") or 1)
    return max(1, threads)


def estimate_snr(
    A: AlgebraSpec,
    a,
    n_samples: int = DEFAULT_SAMPLES,
    k: int = DEFAULT_K,
    sampler: SphereSampler | None = None,
    budget: int = DEFAULT_BUDGET,
    fill_levels: int = 0,
    threads: int | None = None,
    resolution: float = 1e-6,
) -> PointCloud:
    """Union of ``snr_at`` over ``n_samples`` sphere samples.

    ``fill_levels > 0`` adds, for every sample with several functionals, shrunken
    copies of its value set towards their centroid; those points lie in the
    (convex) set ``V(a; x)`` and keep clouds free of holes between extreme values.
    Output is independent of ``threads``.
    """
    if n_samples < 1:
        raise SpecificationError("need at least one sample")
    a = np.asarray(a, dtype=complex)
    sampler = sampler or SphereSampler()
    X = sampler.sample(A.norm, n_samples)
    L = left_matrix(A, a)
    # values arrive in sample order and dedupe keeps first occurrences, so the
    # chunk size only bounds memory and never changes the cloud
    step = max(16, min(CHUNK, CHUNK_VALUES // (budget * (1 + fill_levels))))
    chunks = [X[s : s + step] for s in range(0, len(X), step)]

    def work(chunk):
        return dedupe(_evaluate(A, L, chunk, k, budget, sampler.seed, fill_levels), resolution)

    n_workers = _threads(threads)
    if n_workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(n_workers) as pool:
            values = list(pool.map(work, chunks))
    else:
        values = [work(c) for c in chunks]
    pts = dedupe(np.concatenate(values), resolution)
    meta = {
        "algebra": A.digest(),
        "element": [[float(v.real), float(v.imag)] for v in a],
        "samples": int(n_samples),
        "k": int(k),
        "seed": int(sampler.seed),
        "strategy": sampler.strategy,
        "fill_levels": int(fill_levels),
        "element_norm": float(A.norm(a)),
    }
    return PointCloud(pts, meta)


def numerical_radius(cloud: PointCloud | np.ndarray) -> float:
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud)
    if len(pts) == 0:
        raise SpecificationError("numerical radius of an empty cloud")
    return float(np.abs(pts).max())


def radius_bound_holds(cloud: PointCloud, element_norm: float, slack: float = RADIUS_SLACK) -> bool:
    return numerical_radius(cloud) <= element_norm * (1 + slack)


@dataclass
class UnitalReport:
    max_distance: float
    tolerance: float
    passed: bool
    at_identity: np.ndarray
    cloud_size: int


def unital_reduction_check(
    A: AlgebraSpec,
    a,
    n_samples: int = DEFAULT_SAMPLES,
    k: int = DEFAULT_K,
    tol: float = 0.02,
    seed: int = 0,
) -> UnitalReport:
    """Compare the full estimate with the values at the identity alone."""
    if A.identity is None:
        raise PreconditionError("algebra has no identity")
    if abs(A.identity_norm - 1) > 1e-10:
        raise PreconditionError(f"identity has norm {A.identity_norm}, not 1")
    cloud = estimate_snr(A, a, n_samples, k, SphereSampler(seed=seed))
    at_one = snr_at(A, a, A.identity, k)
    dist = float(convex_hull(at_one).distance(cloud.points).max())
    return UnitalReport(dist, tol, dist <= tol, at_one, len(cloud))
