import math

import numpy as np
import pytest
from sweep_cache import CASES, case_id, direct_sum_case, pointwise_case, pointwise_instance, sweep_case

from snrlab.algebra import AlgebraSpec, NormSpec, SpecificationError, is_associative
from snrlab.geometry import Disk, FiniteHull, Point, Segment, hull_hausdorff, region_sample
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


def test_table_has_35_associative_rows():
    assert [r.index for r in TABLE] == list(range(1, 36))
    assert all(is_associative(r.tensor) for r in TABLE)


def test_any_norm_rows_ignore_p():
    a = [1 + 1j, 2]
    for row in (14, 18):
        pts = [region_sample(table_oracle(row, p, a), 10) for p in (1, 2, math.inf)]
        assert np.allclose(pts[0], pts[1]) and np.allclose(pts[1], pts[2])


def test_oracle_examples():
    seg = table_oracle(1, 2, [1 + 1j, 2])
    assert isinstance(seg, Segment)
    assert {complex(seg.z1), complex(seg.z2)} == {0, 1 + 1j}
    row27 = table_oracle(27, 1, [1, -1])
    assert np.allclose(region_sample(row27, 20), 0)
    row34 = table_oracle(34, 1, [2, 3])
    assert isinstance(row34, Point) and row34.z == 5


def test_oracle_errors():
    with pytest.raises(SpecificationError):
        table_oracle(36, 1, [1, 1])
    with pytest.raises(SpecificationError):
        table_oracle(0, 1, [1, 1])
    only_l1 = next(r.index for r in TABLE if compatible_ps(r.index) == [1.0])
    with pytest.raises(SpecificationError):
        table_oracle(only_l1, 2, [1, 1])


def test_region_kinds():
    a = [1 + 1j, 2]
    kinds = {
        "segment": [1, 4, 5, 8, 9, 12, 23],
        "param": [2, 3, 6, 7, 10, 11, 13, 15, 17, 19, 20, 21, 22, 24, 32],
        "point": [14, 18, 34],
        "finite_hull": [16],
        "minkowski": [25, 26, 29, 30, 31, 33, 35],
        "disk": [27, 28],
    }
    for kind, rows in kinds.items():
        for row in rows:
            assert table_oracle(row, compatible_ps(row)[0], a).kind == kind, row


@pytest.mark.parametrize("case", CASES, ids=case_id)
def test_estimator_sound(case):
    res = sweep_case(*case)
    assert res["outside"] <= 1e-6, f"cloud point {res['outside']:.3g} outside the oracle region"


@pytest.mark.parametrize("case", CASES, ids=case_id)
def test_estimator_complete(case):
    assert sweep_case(*case)["hausdorff"] <= 0.05


@pytest.mark.parametrize("case", CASES, ids=case_id)
def test_oracle_region_convex(case):
    assert sweep_case(*case)["oracle_defect"] <= 0.02


@pytest.mark.parametrize("case", CASES, ids=case_id)
def test_sweep_radius_bound(case):
    res = sweep_case(*case)
    assert res["radius"] <= res["element_norm"] * (1 + 1e-8)


def test_product_rule_examples():
    seg = product_rule(np.array([0j]), np.array([1 + 0j]), density=50)
    assert np.allclose(np.sort(seg.real), np.linspace(0, 1, 51))
    assert np.allclose(seg.imag, 0)
    assert np.allclose(product_rule(np.array([1 + 0j]), np.array([1 + 0j])), 1)
    disk = Disk(0, 1)
    filled = product_rule(region_sample(disk, 40), region_sample(disk, 40), density=40)
    assert hull_hausdorff(filled, region_sample(disk, 200)) <= 0.03


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_direct_sum_matches_product_rule(seed):
    assert is_associative(direct_sum(table_algebra(1, 1), table_algebra(4, 1)).tensor)
    assert direct_sum_case(seed)["hausdorff"] <= 0.05


def test_direct_sum_needs_l1():
    with pytest.raises(SpecificationError):
        direct_sum(table_algebra(1, 2), table_algebra(4, 1))


def test_pointwise_oracle_examples():
    tri = lp_pointwise_oracle([1, 1j, -1], NormSpec.lp(2, 3))
    assert isinstance(tri, FiniteHull)
    assert set(map(complex, tri.generators)) == {1, 1j, -1}
    assert lp_pointwise_oracle([2j, 2j, 2j], NormSpec.lp(1, 3)) == Point(2j)
    seg = lp_pointwise_oracle([2, 0], pointwise_algebra(NormSpec.lp(1, 2)))
    pts = region_sample(seg, 50)
    assert np.allclose(pts.imag, 0) and pts.real.min() == 0 and pts.real.max() == 2


def test_pointwise_oracle_rejects_non_diagonal():
    with pytest.raises(SpecificationError):
        lp_pointwise_oracle([1, 2], table_algebra(25, 1))


@pytest.mark.parametrize("i", range(20))
def test_pointwise_lp_range_is_hull_of_values(i):
    res = pointwise_case(i)
    assert res["hausdorff"] <= 0.05
    assert res["outside"] <= 1e-9


@pytest.mark.parametrize("i", range(20))
def test_pointwise_range_larger_exponent(i):
    res = pointwise_case(i, larger_exponent=True)
    assert res["p"] > pointwise_instance(i)[2]
    assert res["hausdorff"] <= 0.05
    assert res["outside"] <= 1e-9


def test_pointwise_algebra_is_unital():
    A = pointwise_algebra(NormSpec(2.0, (1, 1.5, 2)))
    assert np.array_equal(A.identity, [1, 1, 1])
    assert isinstance(A, AlgebraSpec)
