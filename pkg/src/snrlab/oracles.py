"""Exact numerical-range regions: the 35 products on C^2, l^1-sums and pointwise l^p algebras."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .algebra import AlgebraSpec, NormSpec, SpecificationError, basis_tensor
from .geometry import Disk, FiniteHull, convex_hull, Minkowski, Param, Point, Region, Segment, Term

P_CHOICES = (1.0, 2.0, math.inf)


@dataclass(frozen=True)
class TableRow:
    index: int
    product: str
    entries: dict
    family: str  # "p": c*||.||_p for every p; "one": c*||.||_1 only; "any": any p-norm
    scale: Callable[[float], float]
    region: Callable[[complex, complex, float, float], Region]

    @property
    def tensor(self) -> np.ndarray:
        return basis_tensor(2, self.entries)

    def compatible(self, p: float) -> bool:
        return self.family != "one" or p == 1


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


def _conj_inv(p: float) -> float:
    # 1/q with 1/p + 1/q = 1
    return 1.0 - _inv(p)


def _circle(*terms: tuple[complex, str, str, int]):
    """Build a Param region from (coeff, r-exponent, (1-r)-exponent, spin) with exponents
    named "1", "0", "p" (meaning 1/p) or "q" (meaning 1/q)."""

    def build(a1, a2, p, q_inv, label):
        pick = {"0": 0.0, "1": 1.0, "p": _inv(p), "q": q_inv}
        return Param(tuple(Term(c(a1, a2), pick[re], pick[se], spin) for c, re, se, spin in terms), label)

    return build


def _row(index, product, entries, family, scale, region):
    return TableRow(index, product, entries, family, scale, region)


one = lambda p: 1.0  # noqa: E731
const = lambda c: (lambda p: float(c))  # noqa: E731
root2 = lambda p: 2.0 ** _inv(p)  # noqa: E731


def _param(*terms):
    b = _circle(*terms)
    return lambda a1, a2, p, label: b(a1, a2, p, _conj_inv(p), label)


def _disk_family(scale_k: int, which: str, pexp_first: bool):
    """Rows 2/3 and their scaled copies: ``c a r^(1/q) (1-r)^(1/p) e^{i theta}``."""
    first, second = ("p", "q") if pexp_first else ("q", "p")
    coeff = (lambda a1, a2: scale_k * a1) if which == "a1" else (lambda a1, a2: scale_k * a2)
    return _param((coeff, first, second, 1))


def _seg(f):
    return lambda a1, a2, p, label: Segment(0j, f(a1, a2))


TABLE: tuple[TableRow, ...] = (
    _row(1, "(x1y1, 0)", {(0, 0, 0): 1}, "p", one, _seg(lambda a1, a2: a1)),
    _row(2, "(x2y2, 0)", {(1, 1, 0): 1}, "p", one, _disk_family(1, "a2", False)),
    _row(3, "(0, x1y1)", {(0, 0, 1): 1}, "p", one, _disk_family(1, "a1", True)),
    _row(4, "(0, x2y2)", {(1, 1, 1): 1}, "p", one, _seg(lambda a1, a2: a2)),
    _row(5, "(2x1y1, 0)", {(0, 0, 0): 2}, "p", const(2), _seg(lambda a1, a2: 2 * a1)),
    _row(6, "(2x2y2, 0)", {(1, 1, 0): 2}, "p", const(2), _disk_family(2, "a2", False)),
    _row(7, "(0, 2x1y1)", {(0, 0, 1): 2}, "p", const(2), _disk_family(2, "a1", True)),
    _row(8, "(0, 2x2y2)", {(1, 1, 1): 2}, "p", const(2), _seg(lambda a1, a2: 2 * a2)),
    _row(9, "(3x1y1, 0)", {(0, 0, 0): 3}, "p", const(3), _seg(lambda a1, a2: 3 * a1)),
    _row(10, "(3x2y2, 0)", {(1, 1, 0): 3}, "p", const(3), _disk_family(3, "a2", False)),
    _row(11, "(0, 3x1y1)", {(0, 0, 1): 3}, "p", const(3), _disk_family(3, "a1", True)),
    _row(12, "(0, 3x2y2)", {(1, 1, 1): 3}, "p", const(3), _seg(lambda a1, a2: 3 * a2)),
    _row(
        13, "(x1y1, x1y1)", {(0, 0, 0): 1, (0, 0, 1): 1}, "p", root2,
        _param((lambda a1, a2: a1, "1", "0", 0), (lambda a1, a2: a1, "p", "q", 1)),
    ),
    _row(14, "(x1y1, x1y2)", {(0, 0, 0): 1, (0, 1, 1): 1}, "any", one, lambda a1, a2, p, label: Point(a1)),
    _row(
        15, "(x1y1, x2y1)", {(0, 0, 0): 1, (1, 0, 1): 1}, "p", one,
        _param((lambda a1, a2: a1, "1", "0", 0), (lambda a1, a2: a2, "p", "q", 1)),
    ),
    _row(16, "(x1y1, x2y2)", {(0, 0, 0): 1, (1, 1, 1): 1}, "p", one, lambda a1, a2, p, label: FiniteHull((a1, a2))),
    _row(
        17, "(x1y2, x2y2)", {(0, 1, 0): 1, (1, 1, 1): 1}, "p", one,
        _param((lambda a1, a2: a1, "q", "p", 1), (lambda a1, a2: a2, "0", "1", 0)),
    ),
    _row(18, "(x2y1, x2y2)", {(1, 0, 0): 1, (1, 1, 1): 1}, "any", one, lambda a1, a2, p, label: Point(a2)),
    _row(
        19, "(x2y2, x2y2)", {(1, 1, 0): 1, (1, 1, 1): 1}, "p", root2,
        _param((lambda a1, a2: a2, "q", "p", 1), (lambda a1, a2: a2, "0", "1", 0)),
    ),
    _row(
        20, "(2x1y1, x1y1)", {(0, 0, 0): 2, (0, 0, 1): 1}, "p", const(3),
        _param((lambda a1, a2: 2 * a1, "1", "0", 0), (lambda a1, a2: a1, "p", "q", 1)),
    ),
    _row(
        21, "(2x2y2, x2y2)", {(1, 1, 0): 2, (1, 1, 1): 1}, "p", const(3),
        _param((lambda a1, a2: 2 * a2, "q", "p", 1), (lambda a1, a2: a2, "0", "1", 0)),
    ),
    _row(
        22, "(x1y1, 2x1y1)", {(0, 0, 0): 1, (0, 0, 1): 2}, "p", const(3),
        _param((lambda a1, a2: a1, "1", "0", 0), (lambda a1, a2: 2 * a1, "p", "q", 1)),
    ),
    _row(
        23, "(x1y1, 2x2y2)", {(0, 0, 0): 1, (1, 1, 1): 2}, "p", const(2),
        lambda a1, a2, p, label: Segment(2 * a2, a1),
    ),
    _row(
        24, "(x2y2, 2x2y2)", {(1, 1, 0): 1, (1, 1, 1): 2}, "p", const(3),
        _param((lambda a1, a2: a2, "q", "p", 1), (lambda a1, a2: 2 * a2, "0", "1", 0)),
    ),
    _row(
        25, "(x1y2 + x2y1, x2y2)", {(0, 1, 0): 1, (1, 0, 0): 1, (1, 1, 1): 1}, "one", one,
        lambda a1, a2, p, label: Minkowski(a2, a1),
    ),
    _row(
        26, "(x1y1, x1y2 + x2y1)", {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1}, "one", one,
        lambda a1, a2, p, label: Minkowski(a1, a2),
    ),
    _row(
        27, "(x1y1 + x1y2 + x2y1 + x2y2, 0)", {(i, j, 0): 1 for i in range(2) for j in range(2)}, "one", one,
        lambda a1, a2, p, label: Disk(0j, abs(a1 + a2)),
    ),
    _row(
        28, "(0, x1y1 + x1y2 + x2y1 + x2y2)", {(i, j, 1): 1 for i in range(2) for j in range(2)}, "one", one,
        lambda a1, a2, p, label: Disk(0j, abs(a1 + a2)),
    ),
    _row(
        29, "(x1y1 + x1y2 + x2y1, x2y2)", {(0, 0, 0): 1, (0, 1, 0): 1, (1, 0, 0): 1, (1, 1, 1): 1}, "one", one,
        lambda a1, a2, p, label: Minkowski(a2, a1),
    ),
    _row(
        30, "(x1y2 + x2y1 + x2y2, x2y2)", {(0, 1, 0): 1, (1, 0, 0): 1, (1, 1, 0): 1, (1, 1, 1): 1}, "one", const(2),
        lambda a1, a2, p, label: Minkowski(a2, a1 + a2),
    ),
    _row(
        31, "(x1y1 + x2y2, x1y2 + x2y1)", {(0, 0, 0): 1, (1, 1, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1}, "one", one,
        lambda a1, a2, p, label: Minkowski(a1, a2),
    ),
    _row(
        32, "(x1y1 + x1y2, x2y1 + x2y2)", {(0, 0, 0): 1, (0, 1, 0): 1, (1, 0, 1): 1, (1, 1, 1): 1}, "one", one,
        _param(
            (lambda a1, a2: a1, "1", "0", 0),
            (lambda a1, a2: a2, "1", "0", 1),
            (lambda a1, a2: a1, "0", "1", 1),
            (lambda a1, a2: a2, "0", "1", 0),
        ),
    ),
    _row(
        33, "(x1y1 - x2y2, x1y2 + x2y1)", {(0, 0, 0): 1, (1, 1, 0): -1, (0, 1, 1): 1, (1, 0, 1): 1}, "one", one,
        lambda a1, a2, p, label: Minkowski(a1, a2),
    ),
    _row(
        34, "(x1y1 + x2y1, x1y2 + x2y2)", {(0, 0, 0): 1, (1, 0, 0): 1, (0, 1, 1): 1, (1, 1, 1): 1}, "one", one,
        lambda a1, a2, p, label: Point(a1 + a2),
    ),
    _row(
        35, "(x1y2 + x2y1, x1y1 + x2y2)", {(0, 1, 0): 1, (1, 0, 0): 1, (0, 0, 1): 1, (1, 1, 1): 1}, "one", one,
        lambda a1, a2, p, label: Minkowski(a2, a1),
    ),
)


def table_row(index: int) -> TableRow:
    if not 1 <= index <= len(TABLE):
        raise SpecificationError(f"table row must lie in 1..{len(TABLE)}, got {index}")
    return TABLE[index - 1]


def _check_p(row: TableRow, p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1:
        raise SpecificationError(f"p must lie in [1, inf], got {p}")
    if not row.compatible(p):
        raise SpecificationError(f"row {row.index} is only defined for the l^1 norm (got p={p})")
    return p


def table_algebra(index: int, p: float) -> AlgebraSpec:
    """C^2 with the row's product and its prescribed (scaled) norm."""
    row = table_row(index)
    p = _check_p(row, p)
    ns = NormSpec(p, (1.0, 1.0), row.scale(p))
    identity = _known_identity(row.tensor)
    return AlgebraSpec(row.tensor, ns, identity, name=f"table-row-{index}", meta={"row": index, "p": p})


def _known_identity(t: np.ndarray) -> np.ndarray | None:
    from .hunt import detect_identity_tensor

    return detect_identity_tensor(t)


def table_oracle(index: int, p: float, a) -> Region:
    row = table_row(index)
    p = _check_p(row, p)
    a1, a2 = (complex(v) for v in np.asarray(a, dtype=complex).ravel())
    return row.region(a1, a2, p, f"row {index}")


def compatible_ps(index: int, choices: Iterable[float] = P_CHOICES) -> list[float]:
    row = table_row(index)
    if row.family == "one":
        return [1.0]
    return [float(p) for p in choices]


def _region_points(v, density: int) -> np.ndarray:
    if isinstance(v, Region):
        return v.sample(density)
    z = np.asarray(v, dtype=complex).ravel()
    if z.size == 0:
        raise SpecificationError("empty value set")
    return z


def _thin(z: np.ndarray, limit: int) -> np.ndarray:
    if z.size <= limit:
        return z
    verts = convex_hull(z).vertices
    if verts.size >= limit // 2:
        verts = verts[:: math.ceil(2 * verts.size / limit)]
    stride = math.ceil(z.size / (limit - verts.size))
    return np.concatenate([verts, z[::stride]])


def product_rule(va, vb, density: int = 200, max_points: int = 2_000_000) -> np.ndarray:
    """Points ``r z + (1 - r) w`` representing the range of ``(a, b)`` in an l^1-sum.

    ``va`` and ``vb`` are regions or point sets for the two factors; ``r`` runs over
    ``density + 1`` equispaced values. Large factor sets are thinned to their hull
    vertices plus an even stride.
    """
    za, zb = _region_points(va, density), _region_points(vb, density)
    r = np.linspace(0.0, 1.0, density + 1)
    per = max(int(math.sqrt(max_points / r.size)), 8)
    za, zb = _thin(za, per), _thin(zb, per)
    Z, W = np.meshgrid(za, zb, indexing="ij")
    Z, W = Z.ravel(), W.ravel()
    return (r[None, :] * Z[:, None] + (1 - r[None, :]) * W[:, None]).ravel()


def direct_sum(A: AlgebraSpec, B: AlgebraSpec) -> AlgebraSpec:
    """``A x B`` with coordinatewise product and the norm ``||a|| + ||b||``.

    Only l^1 factors are representable as a single weighted l^1 norm; their scales
    fold into the weights.
    """
    na, nb = A.norm, B.norm
    if not (na.p == 1 and nb.p == 1):
        raise SpecificationError("the l^1-sum is only representable for l^1 factors")
    n, m = A.dim, B.dim
    t = np.zeros((n + m,) * 3, dtype=complex)
    t[:n, :n, :n] = A.tensor
    t[n:, n:, n:] = B.tensor
    weights = tuple(na.scale * w for w in na.weights) + tuple(nb.scale * w for w in nb.weights)
    if min(weights) < 1:
        raise SpecificationError("scaled weights must stay >= 1")
    return AlgebraSpec(t, NormSpec(1.0, weights), name="direct-sum")


def pointwise_algebra(norm_spec: NormSpec) -> AlgebraSpec:
    n = norm_spec.dim
    t = basis_tensor(n, {(i, i, i): 1 for i in range(n)})
    return AlgebraSpec(t, norm_spec, np.ones(n, dtype=complex), name="pointwise")


def lp_pointwise_oracle(f, A: AlgebraSpec | NormSpec) -> Region:
    """Convex hull of the coordinate values of ``f`` in a pointwise-product l^p algebra."""
    if isinstance(A, AlgebraSpec):
        t = A.tensor
        diag = np.zeros_like(t)
        idx = np.arange(A.dim)
        diag[idx, idx, idx] = 1
        if not np.array_equal(t, diag):
            raise SpecificationError("lp_pointwise_oracle needs the pointwise (diagonal) product")
    f = np.asarray(f, dtype=complex).ravel()
    if f.size == 0:
        raise SpecificationError("empty element")
    if np.all(f == f[0]):
        return Point(complex(f[0]))
    return FiniteHull(tuple(f))
