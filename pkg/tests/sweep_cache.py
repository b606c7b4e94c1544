"""Memoized heavy runs shared by the oracle, hunt and acceptance tests."""

from __future__ import annotations

import functools
import math

import numpy as np

from snrlab.algebra import NormSpec
from snrlab.engine import estimate_snr, numerical_radius
from snrlab.geometry import convexity_defect, hull_hausdorff, region_sample
from snrlab.hunt import HuntConfig, hunt_nonconvex
from snrlab.oracles import (
    TABLE,
    compatible_ps,
    direct_sum,
    lp_pointwise_oracle,
    pointwise_algebra,
    product_rule,
    table_algebra,
    table_oracle,
)

ELEMENT = np.array([1 + 1j, 2])
SAMPLES = 50_000
K = 64
DENSITY = 200

CASES = [(row.index, p) for row in TABLE for p in compatible_ps(row.index)]

POINTWISE_PS = (1.0, 1.5, 2.0, 3.0)
# a larger exponent for each base exponent
POINTWISE_RS = {1.0: 2.0, 1.5: 3.0, 2.0: 4.0, 3.0: math.inf}


def case_id(case) -> str:
    row, p = case
    return f"row{row}-p{'inf' if math.isinf(p) else int(p)}"


def _radius(cloud, A, a) -> tuple[float, float]:
    return numerical_radius(cloud), float(A.norm(a))


@functools.lru_cache(maxsize=None)
def sweep_case(row: int, p: float) -> dict:
    A = table_algebra(row, p)
    region = table_oracle(row, p, ELEMENT)
    cloud = estimate_snr(A, ELEMENT, SAMPLES, K)
    samples = region_sample(region, DENSITY)
    return {
        "outside": float(region.distance(cloud.points).max()),
        "hausdorff": hull_hausdorff(cloud.points, samples),
        "oracle_defect": convexity_defect(samples, 4000, 0),
        "radius": numerical_radius(cloud),
        "element_norm": A.norm(ELEMENT),
    }


@functools.lru_cache(maxsize=None)
def direct_sum_case(seed: int) -> dict:
    r = np.random.default_rng(seed)
    A, B = table_algebra(1, 1), table_algebra(4, 1)
    a = r.normal(size=2) + 1j * r.normal(size=2)
    b = r.normal(size=2) + 1j * r.normal(size=2)
    S = direct_sum(A, B)
    ab = np.concatenate([a, b])
    cloud = estimate_snr(S, ab, 20_000, 32)
    expected = product_rule(table_oracle(1, 1, a), table_oracle(4, 1, b), density=100)
    return {"hausdorff": hull_hausdorff(cloud.points, expected), "radius": _radius(cloud, S, ab)}


def pointwise_instance(i: int):
    r = np.random.default_rng([2024, i])
    f = r.normal(size=5) + 1j * r.normal(size=5)
    w = tuple(1 + r.random(5))
    return f, w, POINTWISE_PS[i % len(POINTWISE_PS)]


@functools.lru_cache(maxsize=None)
def pointwise_case(i: int, larger_exponent: bool = False) -> dict:
    f, w, p = pointwise_instance(i)
    if larger_exponent:
        p = POINTWISE_RS[p]
    A = pointwise_algebra(NormSpec(p, w))
    cloud = estimate_snr(A, f, SAMPLES, K, budget=512)
    region = lp_pointwise_oracle(f, A)
    return {
        "p": p,
        "hausdorff": hull_hausdorff(cloud.points, region_sample(region, DENSITY)),
        "outside": float(region.distance(cloud.points).max()),
        "radius": _radius(cloud, A, f),
    }


@functools.lru_cache(maxsize=None)
def hunt_calibration():
    return hunt_nonconvex(HuntConfig(tables_only=True, budget=1000))


@functools.lru_cache(maxsize=None)
def random_hunt(threads: int = 1):
    return hunt_nonconvex(HuntConfig(budget=1000, seed=0, threads=threads))
