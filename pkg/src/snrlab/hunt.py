"""Randomized search for algebra elements whose numerical range looks non-convex.

Candidates are random associative structure tensors on C^n with an l^p norm
rescaled to be submultiplicative. Unital algebras whose identity has norm one
always have convex ranges, so a large defect there is an estimator artifact.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .algebra import (
    AlgebraSpec,
    NormSpec,
    SpecificationError,
    associativity_residual,
    is_associative,
    rescaled,
    submultiplicative_scale,
)
from .engine import PointCloud, estimate_snr
from .geometry import convexity_defect
from .sampling import SphereSampler

IDENTITY_TOL = 1e-8
UNIT_NORM_TOL = 1e-6


@dataclass
class HuntConfig:
    dim: int = 2
    pool: str = "integer"  # "integer": nonzero integers in [-3, 3]; "real": uniform in [-1, 1]
    sparsity: int = 4
    p_choices: tuple[float, ...] = (1.0, 2.0, math.inf)
    elements: int = 2
    n_samples: int = 50_000
    k: int = 32
    probes: int = 2000
    threshold: float = 0.1
    seed: int = 0
    budget: int = 100
    fill_levels: int = 4
    tables_only: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.budget < 0:
            raise SpecificationError("budget must be >= 0")
        if self.dim < 1:
            raise SpecificationError("dim must be >= 1")
        if self.pool not in ("integer", "real"):
            raise SpecificationError(f"unknown coefficient pool {self.pool!r}")
        if self.threshold <= 0:
            raise SpecificationError("threshold must be positive")
        self.p_choices = tuple(math.inf if p in ("inf", math.inf) else float(p) for p in self.p_choices)

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "HuntConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise SpecificationError(f"unknown hunt config field(s): {sorted(unknown)}")
        data = dict(data)
        if "p_choices" in data:
            data["p_choices"] = tuple(data["p_choices"])
        try:
            return cls(**data)
        except TypeError as exc:
            raise SpecificationError(str(exc)) from exc

    def to_json(self) -> dict[str, Any]:
        out = asdict(self)
        out["p_choices"] = ["inf" if math.isinf(p) else p for p in self.p_choices]
        return out


@dataclass
class HuntReport:
    candidate: int
    tensor: list
    norm: dict
    element: list
    defect: float
    defect_at_4x: float
    associativity_residual: float
    scale: float
    identity: list | None
    identity_norm: float | None
    unital_norm_one: bool
    probes: int = 0
    probe_seed: int = 0
    row: int | None = None
    p: float | str | None = None
    cloud: PointCloud | None = field(default=None, repr=False)

    def to_json(self) -> dict[str, Any]:
        out = {k: v for k, v in asdict(self).items() if k != "cloud"}
        return out


@dataclass
class HuntResult:
    reports: list[HuntReport]
    candidates: int
    associative: int
    artifacts: list[dict]
    defects: list[float]

    def histogram(self, bins: int = 10) -> dict[str, list]:
        if not self.defects:
            return {"edges": [], "counts": []}
        counts, edges = np.histogram(self.defects, bins=bins)
        return {"edges": [float(e) for e in edges], "counts": [int(c) for c in counts]}


def random_tensor(config: HuntConfig, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    n = config.dim
    t = np.zeros(n**3, dtype=complex)
    if config.sparsity <= 0:
        return t.reshape(n, n, n)
    count = int(rng.integers(1, min(config.sparsity, n**3) + 1))
    where = rng.choice(n**3, size=count, replace=False)
    if config.pool == "integer":
        vals = rng.choice(np.array([-3, -2, -1, 1, 2, 3]), size=count)
    else:
        vals = rng.uniform(-1, 1, size=count)
    t[where] = vals
    return t.reshape(n, n, n)


def detect_identity_tensor(t: np.ndarray, tol: float = IDENTITY_TOL) -> np.ndarray | None:
    """Solve ``e x = x = x e`` on basis vectors; ``None`` when inconsistent."""
    t = np.asarray(t, dtype=complex)
    n = t.shape[0]
    eye = np.eye(n)
    left = t.transpose(1, 2, 0).reshape(n * n, n)  # rows (j, k): sum_i t[i, j, k] e_i
    right = t.transpose(0, 2, 1).reshape(n * n, n)  # rows (i, k): sum_j t[i, j, k] e_j
    M = np.vstack([left, right])
    b = np.concatenate([eye.ravel(), eye.ravel()]).astype(complex)
    e, *_ = np.linalg.lstsq(M, b, rcond=None)
    if np.abs(M @ e - b).max() > tol:
        return None
    e = np.where(np.abs(e - np.round(e.real)) < 1e-12, np.round(e.real), e)
    return e.astype(complex)


def detect_identity(A: AlgebraSpec) -> tuple[np.ndarray, float] | None:
    e = detect_identity_tensor(A.tensor)
    if e is None:
        return None
    return e, float(A.norm(e))


def _random_element(rng: np.random.Generator, A: AlgebraSpec) -> np.ndarray:
    """Complex Gaussian direction scaled to unit norm.

    Ranges scale linearly with the element, so the defect threshold is only
    meaningful at a fixed element norm.
    """
    a = rng.standard_normal(A.dim) + 1j * rng.standard_normal(A.dim)
    return a / A.norm(a)


def _candidates(config: HuntConfig) -> list[tuple[int | None, float | None]]:
    if not config.tables_only:
        return [(None, None)] * config.budget
    from .oracles import TABLE, compatible_ps

    combos = [(row.index, p) for row in TABLE for p in compatible_ps(row.index, config.p_choices)]
    return combos[: config.budget]


def _evaluate(config: HuntConfig, index: int, row: int | None, p: float | None) -> dict[str, Any]:
    rng = np.random.default_rng([config.seed, index])
    if row is not None:
        from .oracles import table_algebra

        A = table_algebra(row, p)
        scale = 1.0
    else:
        t = random_tensor(config, [config.seed, index, 0])
        if not is_associative(t):
            return {"associative": False}
        p = float(config.p_choices[int(rng.integers(len(config.p_choices)))])
        A = AlgebraSpec(t, NormSpec.lp(p, config.dim))
        scale = submultiplicative_scale(A, 1000, seed=config.seed + index)
        A = rescaled(A, scale)
    ident = detect_identity(A)
    unital_one = ident is not None and abs(ident[1] - 1) <= UNIT_NORM_TOL
    out: dict[str, Any] = {"associative": True, "defects": [], "reports": [], "artifacts": []}
    for e in range(config.elements):
        a = _random_element(rng, A)
        seed = config.seed * 1_000_003 + index * 101 + e
        cloud = estimate_snr(A, a, config.n_samples, config.k, SphereSampler(seed=seed), fill_levels=config.fill_levels)
        defect = convexity_defect(cloud.points, config.probes, seed)
        out["defects"].append(defect)
        if defect <= config.threshold:
            continue
        if unital_one:
            out["artifacts"].append({"candidate": index, "row": row, "element": _cj(a), "defect": defect})
            continue
        big = estimate_snr(A, a, 4 * config.n_samples, config.k, SphereSampler(seed=seed), fill_levels=config.fill_levels)
        defect4 = convexity_defect(big.points, config.probes, seed)
        if defect4 <= config.threshold:
            continue
        out["reports"].append(
            HuntReport(
                candidate=index,
                tensor=[[[_cj(c) for c in r] for r in plane] for plane in A.tensor],
                norm=A.norm.to_json(),
                element=_cj(a),
                defect=defect,
                defect_at_4x=defect4,
                associativity_residual=associativity_residual(A.tensor),
                scale=scale,
                identity=None if ident is None else _cj(ident[0]),
                identity_norm=None if ident is None else ident[1],
                unital_norm_one=unital_one,
                probes=config.probes,
                probe_seed=seed,
                row=row,
                p=None if p is None else ("inf" if math.isinf(p) else p),
                cloud=big,
            )
        )
    return out


def _cj(z) -> list:
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        return [float(z.real), float(z.imag)]
    return [[float(v.real), float(v.imag)] for v in z]


def hunt_nonconvex(config: HuntConfig) -> HuntResult:
    """Run the search; reports are sorted by persisted defect, largest first."""
    cands = _candidates(config)
    jobs = [(i, row, p) for i, (row, p) in enumerate(cands)]
    run = lambda job: _evaluate(config, *job)  # noqa: E731
    if config.threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(config.threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    reports, artifacts, defects = [], [], []
    associative = 0
    for res in results:
        if not res["associative"]:
            continue
        associative += 1
        reports.extend(res["reports"])
        artifacts.extend(res["artifacts"])
        defects.extend(res["defects"])
    reports.sort(key=lambda r: (-r.defect_at_4x, r.candidate))
    return HuntResult(reports, len(jobs), associative, artifacts, defects)
