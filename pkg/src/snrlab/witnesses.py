"""Explicit (g, h) constructions for convolution algebras.

Each witness builds a unit vector ``g`` and a norming functional ``h`` of ``g``
such that ``phi_h(f * g)`` hits a prescribed target, then evaluates that pairing
numerically. A returned value equal to the target shows the target lies in the
spatial numerical range of ``f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .algebra import AlgebraSpec, NormSpec, PreconditionError, SpecificationError
from .duality import dual_norm, pairing, verify_functional

FUNCTIONAL_TOL = 1e-10
SIMPSON_NODES = 2001


class HypothesisError(PreconditionError):
    """The semigroup or element violates a hypothesis the construction relies on."""


# ---------------------------------------------------------------------------
# discrete semigroups


@dataclass(eq=False)
class DiscreteSemigroup:
    """A finite window of a semigroup with a partial product.

    ``op(u, v)`` returns the product label, or ``None`` when the product falls
    outside the window. Dropped products contribute nothing to convolutions.
    """

    labels: tuple
    op: Callable[[Any, Any], Any]
    name: str = ""
    _index: dict = field(init=False, repr=False)
    _table: np.ndarray | None = field(init=False, default=None, repr=False)

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self._index = {s: i for i, s in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise SpecificationError("semigroup labels must be distinct")

    def __contains__(self, s) -> bool:
        return s in self._index

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, s) -> int:
        return self._index[s]

    def product(self, u, v):
        w = self.op(u, v)
        return w if w in self._index else None

    @property
    def table(self) -> np.ndarray:
        """``table[i, j]`` is the index of ``labels[i] * labels[j]``, or -1 if dropped."""
        if self._table is None:
            n = len(self.labels)
            t = np.full((n, n), -1, dtype=int)
            for i, u in enumerate(self.labels):
                for j, v in enumerate(self.labels):
                    w = self.product(u, v)
                    if w is not None:
                        t[i, j] = self._index[w]
            self._table = t
        return self._table

    @property
    def right_cancellative(self) -> bool:
        # u t = v t with both defined forces u = v: each column has distinct defined entries
        for col in self.table.T:
            hit = col[col >= 0]
            if len(hit) != len(np.unique(hit)):
                return False
        return True

    @property
    def right_identities(self) -> list:
        t = self.table
        rows = np.arange(len(self.labels))
        return [self.labels[e] for e in range(len(self.labels)) if np.array_equal(t[:, e], rows)]

    @property
    def has_right_identity(self) -> bool:
        return bool(self.right_identities)

    @classmethod
    def naturals(cls, size: int) -> "DiscreteSemigroup":
        """``{1, ..., size}`` under addition."""
        return cls(tuple(range(1, size + 1)), lambda u, v: u + v, "N")

    @classmethod
    def nonnegative(cls, size: int) -> "DiscreteSemigroup":
        """``{0, ..., size}`` under addition (unital: 0 is the identity)."""
        return cls(tuple(range(0, size + 1)), lambda u, v: u + v, "Z+")

    @classmethod
    def right_zero(cls, size: int) -> "DiscreteSemigroup":
        """``{1, ..., size}`` with ``m . n = n``."""
        return cls(tuple(range(1, size + 1)), lambda u, v: v, "N_r")


Weight = Callable[[Any], float] | Mapping[Any, float] | None


def _weight_fn(weight: Weight) -> Callable[[Any], float]:
    if weight is None:
        return lambda s: 1.0
    if isinstance(weight, Mapping):
        return lambda s: float(weight.get(s, 1.0))
    return lambda s: float(weight(s))


def l1_norm(f: Mapping, weight: Weight = None) -> float:
    w = _weight_fn(weight)
    return float(sum(abs(v) * w(s) for s, v in f.items()))


def discrete_convolve(S: DiscreteSemigroup, f: Mapping, g: Mapping) -> dict:
    """``(f * g)(s) = sum over u v = s of f(u) g(v)``; products outside the window vanish."""
    for s in list(f) + list(g):
        if s not in S:
            raise SpecificationError(f"label {s!r} is outside the semigroup window")
    out: dict = {}
    for u, fu in f.items():
        if fu == 0:
            continue
        for v, gv in g.items():
            w = S.product(u, v)
            if w is not None and gv != 0:
                out[w] = out.get(w, 0) + fu * gv
    return out


def semigroup_algebra(S: DiscreteSemigroup, weight: Weight = None) -> AlgebraSpec:
    """The truncated weighted convolution algebra on the window as a structure tensor."""
    n = len(S)
    t = np.zeros((n, n, n), dtype=complex)
    tab = S.table
    i, j = np.nonzero(tab >= 0)
    t[i, j, tab[i, j]] = 1
    w = _weight_fn(weight)
    weights = tuple(w(s) for s in S.labels)
    ident = None
    lefts = [e for e in S.right_identities if np.array_equal(tab[S.index(e)], np.arange(n))]
    if lefts:
        ident = np.zeros(n, dtype=complex)
        ident[S.index(lefts[0])] = 1
    return AlgebraSpec(t, NormSpec(1, weights), identity=ident, name=f"l1({S.name})")


def delta(S: DiscreteSemigroup, s) -> np.ndarray:
    v = np.zeros(len(S), dtype=complex)
    v[S.index(s)] = 1
    return v


# ---------------------------------------------------------------------------
# witness records


@dataclass
class Witness:
    value: complex
    target: complex
    functional_ok: bool
    g_pairing: complex
    h_dual_norm: float
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __complex__(self) -> complex:
        return complex(self.value)

    @property
    def error(self) -> float:
        return abs(self.value - self.target)

    def to_json(self) -> dict[str, Any]:
        return {
            "value": [self.value.real, self.value.imag],
            "target": [self.target.real, self.target.imag],
            "error": self.error,
            "functional_ok": self.functional_ok,
            "g_pairing": [self.g_pairing.real, self.g_pairing.imag],
            "h_dual_norm": self.h_dual_norm,
            "violations": [str(v) for v in self.violations],
        }


def _vectors(labels: Sequence, g: Mapping, h: Mapping) -> tuple[np.ndarray, np.ndarray]:
    gx = np.array([g.get(s, 0) for s in labels], dtype=complex)
    hx = np.array([h.get(s, 0) for s in labels], dtype=complex)
    return gx, hx


def _check_functional(labels: Sequence, weights: Sequence[float], g: Mapping, h: Mapping):
    norm_spec = NormSpec(1, tuple(weights))
    gx, hx = _vectors(labels, g, h)
    return (
        verify_functional(norm_spec, gx, hx, FUNCTIONAL_TOL),
        complex(pairing(hx, gx)),
        float(dual_norm(norm_spec, hx)),
    )


def _pair(u: Mapping, h: Mapping) -> complex:
    return complex(sum(v * h.get(s, 0) for s, v in u.items()))


# ---------------------------------------------------------------------------
# weighted l1 over a semigroup


def semigroup_witness(
    S: DiscreteSemigroup,
    weight: Weight,
    f: Mapping,
    t,
    z: complex,
    require_unit_weight: bool = True,
) -> Witness:
    """Realize ``z`` (with ``|z| <= ||f||``) as ``phi_h(f * delta_t)``.

    With ``require_unit_weight=False`` and ``weight(t) > 1`` the construction is
    still carried out with ``g = delta_t / weight(t)``; labels where ``h`` then
    exceeds the dual unit ball are listed in ``violations``.
    """
    w = _weight_fn(weight)
    z = complex(z)
    f = {s: complex(v) for s, v in f.items() if v != 0}
    if t not in S:
        raise SpecificationError(f"t = {t!r} is outside the window")
    wt = w(t)
    if require_unit_weight and abs(wt - 1) > 1e-12:
        raise HypothesisError(f"weight(t) = {wt}, need 1")
    if not S.right_cancellative:
        raise HypothesisError(f"{S.name or 'semigroup'} is not right cancellative on its window")
    if S.has_right_identity:
        raise HypothesisError(f"{S.name or 'semigroup'} has a right identity {S.right_identities[0]!r}")
    norm_f = l1_norm(f, w)
    if abs(z) > norm_f * (1 + 1e-12):
        raise PreconditionError(f"|z| = {abs(z)} exceeds ||f|| = {norm_f}")
    shifted = {}
    for s in f:
        st = S.product(s, t)
        if st is None:
            raise HypothesisError(f"{s!r} . {t!r} leaves the window; enlarge it")
        if st == t:
            raise HypothesisError(f"{s!r} . {t!r} = t")
        shifted[s] = st
    g = {t: 1 / wt}
    h = {t: complex(wt)}
    for s, st in shifted.items():
        h[st] = wt * z * np.conj(f[s]) * w(s) / (norm_f * abs(f[s]))
    value = _pair(discrete_convolve(S, f, g), h)
    labels = sorted(set(h) | set(g) | set(f), key=S.index)
    weights = [w(s) for s in labels]
    ok, gp, hn = _check_functional(labels, weights, g, h)
    violations = [s for s in labels if abs(h.get(s, 0)) / w(s) > 1 + FUNCTIONAL_TOL]
    return Witness(value, z, ok, gp, hn, violations, {"t": t, "norm": norm_f})


def volterra_discrete_witness(f: Mapping, z: complex) -> Witness:
    """Discrete Volterra algebra on rationals in (0, 1): realize ``|z| < ||f||``.

    Labels are ``Fraction`` values; sums reaching 1 are dropped.
    """
    z = complex(z)
    f = {Fraction(s): complex(v) for s, v in f.items() if v != 0}
    if not f:
        raise PreconditionError("f must be nonzero")
    if any(not 0 < s < 1 for s in f):
        raise PreconditionError("support of f must lie in (0, 1)")
    total = sum(abs(v) for v in f.values())
    if abs(z) >= total:
        raise PreconditionError(f"|z| = {abs(z)} must be < ||f|| = {total}")
    order = list(f)
    partial = 0.0
    for n0, s in enumerate(order, start=1):
        partial += abs(f[s])
        if abs(z) < partial:
            break
    head = order[:n0]
    t = (1 - max(head)) / 2
    g = {t: 1.0}
    h = {t: 1.0 + 0j}
    for s in head:
        h[s + t] = z * np.conj(f[s]) / (partial * abs(f[s]))
    conv = {}
    for s, v in f.items():
        if s + t < 1:
            conv[s + t] = conv.get(s + t, 0) + v
    value = _pair(conv, h)
    labels = sorted(set(h) | set(f))
    ok, gp, hn = _check_functional(labels, [1.0] * len(labels), g, h)
    return Witness(value, z, ok, gp, hn, details={"t": str(t), "n0": n0, "partial_norm": partial})


# ---------------------------------------------------------------------------
# step functions and L^1 witnesses


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Piecewise constant: ``values[i]`` on ``[breaks[i], breaks[i+1])``, zero outside."""

    breaks: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breaks, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if b.ndim != 1 or len(b) != len(v) + 1:
            raise SpecificationError("need len(breaks) == len(values) + 1")
        if np.any(np.diff(b) <= 0):
            raise SpecificationError("breakpoints must increase strictly")
        if not np.all(np.isfinite(b)):
            raise SpecificationError("breakpoints must be finite")
        object.__setattr__(self, "breaks", b)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple[float, float, complex]]) -> "StepFunction":
        """Sum of ``value * indicator[lo, hi)`` over the pieces."""
        pieces = list(pieces)
        if not pieces:
            raise SpecificationError("need at least one piece")
        b = np.unique([x for lo, hi, _ in pieces for x in (lo, hi)])
        vals = np.zeros(len(b) - 1, dtype=complex)
        mids = (b[:-1] + b[1:]) / 2
        for lo, hi, v in pieces:
            if hi <= lo:
                raise SpecificationError(f"empty piece [{lo}, {hi})")
            vals[(mids >= lo) & (mids < hi)] += v
        return cls(b, vals)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        i = np.searchsorted(self.breaks, x, side="right") - 1
        inside = (i >= 0) & (i < len(self.values))
        return np.where(inside, self.values[np.clip(i, 0, len(self.values) - 1)], 0)

    def antiderivative(self, x) -> np.ndarray:
        """``F(x) = integral of the function over (-inf, x]``."""
        x = np.asarray(x, dtype=float)
        cum = np.concatenate([[0], np.cumsum(self.values * np.diff(self.breaks))])
        xc = np.clip(x, self.breaks[0], self.breaks[-1])
        i = np.clip(np.searchsorted(self.breaks, xc, side="right") - 1, 0, len(self.values) - 1)
        return cum[i] + self.values[i] * (xc - self.breaks[i])

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values) * np.diff(self.breaks)))

    @property
    def nonnegative(self) -> bool:
        return bool(np.all(np.abs(self.values.imag) == 0) and np.all(self.values.real >= 0))

    def support_pieces(self) -> list[tuple[float, float]]:
        nz = np.flatnonzero(self.values != 0)
        return [(float(self.breaks[i]), float(self.breaks[i + 1])) for i in nz]


def _box_convolution_integral(f: StepFunction, height: float, width: float, h: StepFunction) -> complex:
    """``integral of (f * g)(s) h(s) ds`` with ``g = height * indicator[0, width]``, exactly.

    ``(f * g)(s) = height * (F(s) - F(s - width))`` is piecewise linear with kinks at
    ``breaks`` and ``breaks + width``; against the step function ``h`` the trapezoid
    rule on the merged breakpoints is exact.
    """
    knots = np.unique(np.concatenate([f.breaks, f.breaks + width, h.breaks]))
    conv = height * (f.antiderivative(knots) - f.antiderivative(knots - width))
    mids = (knots[:-1] + knots[1:]) / 2
    trapezoid = (conv[:-1] + conv[1:]) / 2 * np.diff(knots)
    return complex(np.sum(trapezoid * h(mids)))


def _composite_simpson(fn: Callable, knots: np.ndarray, per: int) -> complex:
    """Simpson's rule on every interval between consecutive ``knots``.

    Nodes at interval ends are nudged inwards so one-sided limits are used at jumps.
    """
    knots = np.unique(knots)
    lo, hi = knots[:-1, None], knots[1:, None]
    u = np.linspace(0.0, 1.0, per)[None, :]
    eps = 1e-12 * np.maximum(1.0, np.abs(knots).max())
    nodes = np.clip(lo + (hi - lo) * u, lo + eps, hi - eps)
    w = np.ones(per)
    w[1:-1:2], w[2:-1:2] = 4, 2
    step = (hi - lo)[:, 0] / (per - 1)
    return complex(np.sum(fn(nodes) * w[None, :] * step[:, None] / 3))


def _box_convolution_simpson(
    f: Callable, height: float, width: float, h: StepFunction, lo: float, hi: float, nodes: int
) -> complex:
    """Nested composite Simpson for ``integral of (f * g) h`` with a box ``g``.

    Known breakpoints of step-function inputs become interval ends, where the
    rule needs no smoothness across jumps; other densities get a uniform grid.
    """
    per = 9
    breaks = getattr(f, "breaks", None)
    if breaks is None:
        f_knots = np.linspace(lo - width, hi, max(2, nodes // per))
        outer = np.linspace(lo, hi, max(2, nodes // per))
    else:
        f_knots = breaks
        outer = np.concatenate([[lo, hi], breaks, breaks + width])
    outer = np.concatenate([outer, h.breaks])
    outer = outer[(outer >= lo) & (outer <= hi)]

    def conv(s: np.ndarray) -> np.ndarray:
        out = np.empty(s.shape, dtype=complex)
        for idx, x in np.ndenumerate(s):
            inside = f_knots[(f_knots > x - width) & (f_knots < x)]
            out[idx] = _composite_simpson(f, np.concatenate([[x - width, x], inside]), per)
        return height * out

    return _composite_simpson(lambda s: conv(s) * h(s), outer, per)


def _cells_check(g: StepFunction, h: StepFunction):
    """Check ``h`` against ``g`` through cell masses: exact for step functions."""
    knots = np.unique(np.concatenate([g.breaks, h.breaks]))
    mids = (knots[:-1] + knots[1:]) / 2
    mass = g(mids) * np.diff(knots)
    hv = h(mids)
    return _check_functional(range(len(mids)), [1.0] * len(mids), dict(enumerate(mass)), dict(enumerate(hv)))


def _check_z(z: complex) -> complex:
    z = complex(z)
    if abs(z) > 1 + 1e-12:
        raise PreconditionError(f"|z| = {abs(z)} must be <= 1")
    return z


def l1_line_witness(f: StepFunction, z: complex, a: float | None = None, quad: str = "exact") -> Witness:
    """On ``L^1(R)``: realize ``z ||f||`` for ``f >= 0`` vanishing on ``(-a, a)``."""
    z = _check_z(z)
    if not f.nonnegative:
        raise PreconditionError("f must be nonnegative")
    pieces = f.support_pieces()
    if not pieces:
        raise PreconditionError("f must be nonzero")
    gap = min(0.0 if lo < 0 < hi else min(abs(lo), abs(hi)) for lo, hi in pieces)
    if a is None:
        a = gap
    if a <= 0 or any(lo < a and hi > -a for lo, hi in pieces):
        raise PreconditionError(f"support of f meets (-{a}, {a})")
    half = a / 2
    g = StepFunction([0.0, half], [2 / a])
    lo_edge = min(f.breaks[0], -half) - 1.0
    hi_edge = max(f.breaks[-1] + half, half) + 1.0
    h = StepFunction([lo_edge, -half, 0.0, half, hi_edge], [z, 0, 1, z])
    # h is z on all of R outside [-a/2, a/2]; f * g vanishes beyond the edges above
    if quad == "exact":
        value = _box_convolution_integral(f, 2 / a, half, h)
    elif quad == "simpson":
        value = _box_convolution_simpson(f, 2 / a, half, h, lo_edge, hi_edge, SIMPSON_NODES)
    else:
        raise SpecificationError(f"unknown quadrature {quad!r}")
    ok, gp, hn = _cells_check(g, h)
    return Witness(value, z * f.l1_norm(), ok, gp, hn, details={"a": a, "quad": quad})


def volterra_l1_witness(f: StepFunction, z: complex, delta: float | None = None, quad: str = "exact") -> Witness:
    """On ``L^1[0, 1]`` with Volterra convolution: realize ``z ||f||`` for ``f >= 0`` supported in ``[delta, 1 - delta]``."""
    z = _check_z(z)
    if not f.nonnegative:
        raise PreconditionError("f must be nonnegative")
    pieces = f.support_pieces()
    if not pieces:
        raise PreconditionError("f must be nonzero")
    lo, hi = min(p[0] for p in pieces), max(p[1] for p in pieces)
    if delta is None:
        delta = min(lo, 1 - hi)
    if delta <= 0 or lo < delta or hi > 1 - delta:
        raise PreconditionError(f"support of f must lie in [delta, 1 - delta] with delta > 0, got [{lo}, {hi}]")
    half = delta / 2
    g = StepFunction([0.0, half], [2 / delta])
    h = StepFunction([0.0, half, 1.0], [1, z])
    # f vanishes below delta, so the Volterra integral over [0, s] equals the full-line one
    if quad == "exact":
        value = _box_convolution_integral(f, 2 / delta, half, h)
    elif quad == "simpson":
        value = _box_convolution_simpson(f, 2 / delta, half, h, 0.0, 1.0, SIMPSON_NODES)
    else:
        raise SpecificationError(f"unknown quadrature {quad!r}")
    ok, gp, hn = _cells_check(g, h)
    return Witness(value, z * f.l1_norm(), ok, gp, hn, details={"delta": delta, "quad": quad})


def polar_grid(radius: float, angles: int = 16, rings: int = 8, closed: bool = True) -> np.ndarray:
    """Targets on ``rings`` circles times ``angles`` directions inside ``radius * D``.

    ``closed=False`` keeps every target strictly inside the disk.
    """
    theta = 2 * np.pi * np.arange(angles) / angles
    if closed:
        rad = radius * np.arange(1, rings + 1) / rings
    else:
        rad = radius * (np.arange(rings) + 0.5) / rings
    return (rad[:, None] * np.exp(1j * theta)[None, :]).ravel()


def sweep(witness: Callable[[complex], Witness], targets: Iterable[complex]) -> list[Witness]:
    return [witness(z) for z in targets]


def max_error(results: Sequence[Witness]) -> float:
    return max((w.error for w in results), default=0.0)


def all_functionals_ok(results: Sequence[Witness]) -> bool:
    return all(w.functional_ok for w in results)


def unit_weight_labels(S: DiscreteSemigroup, weight: Weight) -> list:
    w = _weight_fn(weight)
    return [s for s in S.labels if math.isclose(w(s), 1.0, abs_tol=1e-12)]
