import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snrlab.algebra import (
    MIN_SCALE,
    AlgebraSpec,
    NormSpec,
    SpecificationError,
    basis_tensor,
    coordinatewise,
    is_associative,
    multiply,
    norm,
    parse_complex,
    rescaled,
    submultiplicative_scale,
)
from snrlab.oracles import TABLE, compatible_ps, table_algebra
from snrlab.sampling import SphereSampler


def brute_associative(t) -> bool:
    """Independent check: loop over all basis index tuples with plain Python arithmetic."""
    n = len(t)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        lhs = sum(t[i][j][m] * t[m][k][l] for m in range(n))
        rhs = sum(t[j][k][m] * t[i][m][l] for m in range(n))
        if lhs != rhs:
            return False
    return True


def test_multiply_coordinatewise():
    A = AlgebraSpec(coordinatewise(2), NormSpec.lp(1, 2))
    assert np.array_equal(multiply(A, [1, 2], [3, 4]), [3, 8])


def test_multiply_row33_is_complex_multiplication():
    A = table_algebra(33, 1)
    x = np.array([1.5 - 2j, 0.5 + 1j])
    y = np.array([-1 + 0.25j, 2 - 1j])
    expected = [x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0]]
    assert np.allclose(multiply(A, x, y), expected, atol=1e-14)
    assert np.array_equal(multiply(A, [0, 1], [0, 1]), [-1, 0])


def test_multiply_by_zero(rng):
    t = rng.normal(size=(3, 3, 3))
    A = AlgebraSpec(t, NormSpec.lp(2, 3))
    assert np.array_equal(multiply(A, np.zeros(3), rng.normal(size=3)), np.zeros(3))


def test_multiply_dimension_mismatch():
    A = AlgebraSpec(coordinatewise(2), NormSpec.lp(1, 2))
    with pytest.raises(SpecificationError):
        multiply(A, [1, 2, 3], [1, 2])


@pytest.mark.parametrize(
    "p, weights, scale, x, expected",
    [
        (1, (1, 1), 1, [3, 4j], 7),
        (2, (1, 1), 3, [3, 4], 15),
        (math.inf, (1, 2), 1, [5, 3], 6),
    ],
)
def test_norm_examples(p, weights, scale, x, expected):
    A = AlgebraSpec(coordinatewise(2), NormSpec(p, weights, scale))
    assert norm(A, x) == pytest.approx(expected, rel=1e-15)


def test_norm_spec_validation():
    with pytest.raises(SpecificationError):
        NormSpec(0.5, (1, 1))
    with pytest.raises(SpecificationError):
        NormSpec(2, (0.5, 1))
    with pytest.raises(SpecificationError):
        NormSpec(2, (1, 1), scale=0)


def test_associativity_examples():
    assert is_associative(coordinatewise(2))
    assert is_associative(TABLE[32].tensor)
    bad = basis_tensor(2, {(0, 0, 0): 1, (0, 0, 1): 1, (1, 1, 0): 1})
    assert brute_associative(bad.real.astype(int).tolist()) is False
    assert is_associative(bad) is False


def test_all_table_tensors_associative():
    for row in TABLE:
        ints = row.tensor.real.astype(int).tolist()
        assert brute_associative(ints), row.index
        assert is_associative(row.tensor), row.index


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=8, max_size=8))
def test_associativity_matches_random_triples(entries):
    t = np.array(entries, dtype=complex).reshape(2, 2, 2)
    A = AlgebraSpec(t, NormSpec.lp(1, 2))
    r = np.random.default_rng(abs(hash(tuple(entries))) % 2**32)
    xs = r.normal(size=(100, 3, 2)) + 1j * r.normal(size=(100, 3, 2))
    x, y, z = xs[:, 0], xs[:, 1], xs[:, 2]
    gap = np.abs(multiply(A, multiply(A, x, y), z) - multiply(A, x, multiply(A, y, z))).max()
    assert is_associative(t) == (gap <= 1e-9)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(1, 4),
    st.integers(0, 2**31),
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
)
def test_bilinear(n, seed, alpha, beta):
    r = np.random.default_rng(seed)
    t = r.normal(size=(n, n, n)) + 1j * r.normal(size=(n, n, n))
    A = AlgebraSpec(t, NormSpec.lp(2, n))
    x, x2, y = (r.normal(size=n) + 1j * r.normal(size=n) for _ in range(3))
    lhs = multiply(A, alpha * x + beta * x2, y)
    rhs = alpha * multiply(A, x, y) + beta * multiply(A, x2, y)
    scale = max(1.0, np.abs(lhs).max(), np.abs(rhs).max())
    assert np.abs(lhs - rhs).max() <= 1e-12 * scale


def test_identity_is_identity_map(rng):
    for row in TABLE:
        A = table_algebra(row.index, 1)
        if A.identity is None:
            continue
        x = rng.normal(size=(20, 2)) + 1j * rng.normal(size=(20, 2))
        assert np.abs(multiply(A, A.identity, x) - x).max() <= 1e-12
        assert np.abs(multiply(A, x, A.identity) - x).max() <= 1e-12


def test_bad_identity_rejected():
    with pytest.raises(SpecificationError):
        AlgebraSpec(coordinatewise(2), NormSpec.lp(1, 2), identity=[1, 0])


@pytest.mark.parametrize("case", [(r.index, p) for r in TABLE for p in compatible_ps(r.index)])
def test_table_norms_submultiplicative(case):
    row, p = case
    A = table_algebra(row, p)
    x = SphereSampler(seed=1).sample(A.norm, 3000)
    y = SphereSampler(seed=2).sample(A.norm, 3000)
    prod = A.norm(multiply(A, x, y))
    assert prod.max() <= 1 + 1e-9


def test_scale_coordinatewise_inf():
    A = AlgebraSpec(coordinatewise(2), NormSpec.lp(math.inf, 2))
    M = submultiplicative_scale(A, 2000, seed=0)
    assert 1.0 <= M <= 1.02 * (1 + 1e-9)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0, math.inf])
def test_scale_row13(p):
    A = AlgebraSpec(TABLE[12].tensor, NormSpec.lp(p, 2))
    M = submultiplicative_scale(A, 2000, seed=0)
    target = 2 ** (0 if math.isinf(p) else 1 / p)
    assert target * (1 - 1e-6) <= M / 1.02 <= target * (1 + 1e-9)
    B = rescaled(A, M)
    x = SphereSampler(seed=5).sample(B.norm, 2000)
    y = SphereSampler(seed=6).sample(B.norm, 2000)
    assert B.norm(multiply(B, x, y)).max() <= 1 + 1e-12


def test_scale_zero_tensor():
    A = AlgebraSpec(np.zeros((2, 2, 2)), NormSpec.lp(2, 2))
    assert submultiplicative_scale(A, 10) == MIN_SCALE


def test_json_roundtrip():
    A = table_algebra(26, 1)
    B = AlgebraSpec.from_json(A.to_json())
    assert np.array_equal(A.tensor, B.tensor)
    assert B.norm == A.norm
    assert np.array_equal(A.identity, B.identity)
    assert A.digest() == B.digest()


def test_json_errors_name_the_field():
    doc = table_algebra(1, 2).to_json()
    del doc["norm"]
    with pytest.raises(SpecificationError, match="norm"):
        AlgebraSpec.from_json(doc)
    doc = table_algebra(1, 2).to_json()
    doc["tensor"] = [[1, 2], [3, 4]]
    with pytest.raises(SpecificationError, match="tensor"):
        AlgebraSpec.from_json(doc)


@pytest.mark.parametrize(
    "text, value",
    [("2", 2), ("3i", 3j), ("1-2i", 1 - 2j), ("-i", -1j), ("1+1i", 1 + 1j), ("1e-3-2.5i", 0.001 - 2.5j), ("-4", -4)],
)
def test_parse_complex(text, value):
    assert parse_complex(text) == value
