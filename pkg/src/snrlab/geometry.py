"""Plane geometry on complex point sets: hulls, Hausdorff distances, regions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from .algebra import SpecificationError

COLLINEAR_TOL = 1e-12
CONTAINS_TOL = 1e-9
GOLDEN = (math.sqrt(5) - 1) / 2


def _as_points(points) -> np.ndarray:
    z = np.asarray(points, dtype=complex).ravel()
    if z.size == 0:
        raise SpecificationError("empty point set")
    return z


def _cross(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a - o).real * (b - o).imag - (a - o).imag * (b - o).real


def _prefilter(z: np.ndarray, directions: int = 32) -> np.ndarray:
    """Drop points strictly inside the polygon of extreme points along fixed directions."""
    if z.size < 2000:
        return z
    u = np.exp(2j * np.pi * np.arange(directions) / directions)
    proj = (z[:, None] * np.conj(u)[None, :]).real
    ext = np.unique(np.argmax(proj, axis=0))
    poly = z[ext]
    poly = poly[np.argsort(np.angle(poly - poly.mean()))]
    if len(poly) < 3:
        return z
    inside = np.ones(z.size, dtype=bool)
    for a, b in zip(poly, np.roll(poly, -1)):
        scale = max(abs(b - a), 1e-300)
        inside &= _cross(a, b, z) > 1e-9 * scale
    return np.concatenate([poly, z[~inside]])


@dataclass(frozen=True, eq=False)
class HullPolygon:
    """Convex polygon, vertices counterclockwise, collinear vertices removed."""

    vertices: np.ndarray

    @property
    def area(self) -> float:
        v = self.vertices
        if len(v) < 3:
            return 0.0
        w = np.roll(v, -1)
        return 0.5 * float(np.sum(v.real * w.imag - w.real * v.imag))

    def distance(self, z) -> np.ndarray:
        """Euclidean distance from each point to the filled polygon (0 inside)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        v = self.vertices
        if len(v) == 1:
            return np.abs(z - v[0])
        if len(v) == 2:
            return segment_distance(z, v[0], v[1])
        out = np.empty(z.shape, dtype=float)
        step = max(1, 4_000_000 // len(v))
        a, b = v, np.roll(v, -1)
        for s in range(0, z.size, step):
            zz = z[s : s + step, None]
            cr = _cross(a[None, :], b[None, :], zz)
            inside = np.all(cr >= -1e-12 * np.abs(b - a)[None, :], axis=1)
            d = segment_distance(zz, a[None, :], b[None, :]).min(axis=1)
            out[s : s + step] = np.where(inside, 0.0, d)
        return out

    def contains(self, z, tol: float = CONTAINS_TOL) -> np.ndarray:
        return self.distance(z) <= tol


def segment_distance(z, a, b) -> np.ndarray:
    d = b - a
    den = np.abs(d) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(den > 0, ((z - a) * np.conj(d)).real / np.where(den > 0, den, 1), 0.0)
    t = np.clip(t, 0, 1)
    return np.abs(a + t * d - z)


def convex_hull(points) -> HullPolygon:
    """Andrew's monotone chain; degenerate inputs give a 1- or 2-vertex polygon."""
    z = _prefilter(_as_points(points))
    xy = np.unique(np.column_stack([z.real, z.imag]), axis=0)  # sorted by (x, y)
    pts = xy[:, 0] + 1j * xy[:, 1]
    if len(pts) <= 2:
        return HullPolygon(pts)
    span = max(float(np.ptp(xy[:, 0])), float(np.ptp(xy[:, 1])), 1e-300)
    eps = COLLINEAR_TOL * span * span

    def chain(seq):
        out: list[complex] = []
        for p in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                cr = (a.real - o.real) * (p.imag - o.imag) - (a.imag - o.imag) * (p.real - o.real)
                if cr <= eps:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = chain(pts.tolist())
    upper = chain(pts[::-1].tolist())
    verts = np.array(lower[:-1] + upper[:-1], dtype=complex)
    if len(verts) < 2:
        verts = np.array([pts[0], pts[-1]])
    return HullPolygon(verts)


def hausdorff(a, b) -> float:
    """Hausdorff distance between two finite point sets."""
    a, b = _as_points(a), _as_points(b)
    ta = cKDTree(np.column_stack([a.real, a.imag]))
    tb = cKDTree(np.column_stack([b.real, b.imag]))
    dab, _ = tb.query(np.column_stack([a.real, a.imag]))
    dba, _ = ta.query(np.column_stack([b.real, b.imag]))
    return float(max(dab.max(), dba.max()))


def hull_hausdorff(a, b) -> float:
    """Hausdorff distance between the filled convex hulls of two point sets.

    The distance to a convex set is convex, so each directed part is attained
    at a vertex of the other hull.
    """
    ha = a if isinstance(a, HullPolygon) else convex_hull(a)
    hb = b if isinstance(b, HullPolygon) else convex_hull(b)
    return float(max(hb.distance(ha.vertices).max(), ha.distance(hb.vertices).max()))


def hull_probes(hull: HullPolygon, count: int, seed: int = 0) -> np.ndarray:
    """Points of the hull: random convex combinations plus a triangulation grid.

    The grid fans out from the vertex centroid, so deep interior points are always probed.
    """
    v = hull.vertices
    if len(v) == 1:
        return v.copy()
    if len(v) == 2:
        return v[0] + np.linspace(0, 1, max(count, 2)) * (v[1] - v[0])
    rng = np.random.default_rng(seed)
    half = max(count // 2, 1)
    pick = rng.integers(0, len(v), size=(half, 3))
    lam = rng.dirichlet(np.ones(3), size=half)
    random_part = (v[pick] * lam).sum(axis=1)
    centre = v.mean()
    per = max(half // len(v), 3)
    level = max(int((math.sqrt(8 * per + 1) - 1) / 2) - 1, 1)
    i, j = np.meshgrid(np.arange(level + 1), np.arange(level + 1), indexing="ij")
    ok = i + j <= level
    bi, bj = i[ok] / level, j[ok] / level
    b, c = v, np.roll(v, -1)
    grid = centre + bi[:, None] * (b - centre)[None, :] + bj[:, None] * (c - centre)[None, :]
    return np.concatenate([random_part, grid.ravel()])


def _nearest(tree: cKDTree, q: np.ndarray) -> np.ndarray:
    d, _ = tree.query(np.column_stack([q.real, q.imag]))
    return d


def convexity_defect(points, probes: int = 4000, seed: int = 0, refine: int = 8) -> float:
    """Largest distance from a point of the convex hull to the set itself.

    The best ``refine`` probes are polished by a shrinking random search kept inside the hull.
    """
    z = _as_points(points)
    hull = convex_hull(z)
    if len(hull.vertices) == 1:
        return 0.0
    q = hull_probes(hull, probes, seed)
    tree = cKDTree(np.column_stack([z.real, z.imag]))
    d = _nearest(tree, q)
    if refine and len(hull.vertices) > 2:
        rng = np.random.default_rng([seed, 1])
        top = np.argsort(d)[-refine:]
        best, best_d = q[top], d[top]
        step = best_d / 2
        for _ in range(30):
            trial = best + step * np.exp(2j * np.pi * rng.random(len(best)))
            td = np.where(hull.distance(trial) == 0, _nearest(tree, trial), -1.0)
            better = td > best_d
            best = np.where(better, trial, best)
            best_d = np.where(better, td, best_d)
            step = np.where(better, step, step * 0.7)
        return float(max(d.max(), best_d.max()))
    return float(d.max())


# --------------------------------------------------------------------------- regions


def _pw(base: np.ndarray, exp: float) -> np.ndarray:
    # 0**0 == 1 by convention, including at base 0
    if exp == 0:
        return np.ones_like(base)
    return base**exp


def _cjson(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _cload(v) -> complex:
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise SpecificationError(f"expected a [re, im] pair, got {v!r}")


class Region:
    kind = "region"

    def distance(self, z) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def contains(self, z, tol: float = CONTAINS_TOL) -> np.ndarray:
        return self.distance(z) <= tol

    def sample(self, density: int = 200) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def to_json(self) -> dict[str, Any]:  # pragma: no cover - interface
        raise NotImplementedError


def _check_density(density) -> int:
    if density < 1:
        raise SpecificationError("density must be >= 1")
    return int(density)


def _disk_points(center: complex, radius: float, density: int) -> np.ndarray:
    if radius == 0:
        return np.array([center])
    nb = max(8, math.ceil(2 * math.pi * radius * density))
    ring = center + radius * np.exp(1j * (2 * np.pi * np.arange(nb) / nb))
    h = 1.0 / density
    g = np.arange(-radius, radius + h / 2, h)
    gx, gy = np.meshgrid(g, g)
    inner = (gx + 1j * gy).ravel()
    inner = inner[np.abs(inner) < radius]
    return np.concatenate([ring, center + inner])


@dataclass(frozen=True)
class Point(Region):
    z: complex
    kind = "point"

    def distance(self, z):
        return np.abs(np.atleast_1d(np.asarray(z, dtype=complex)) - self.z)

    def sample(self, density=200):
        _check_density(density)
        return np.array([complex(self.z)])

    def to_json(self):
        return {"type": self.kind, "z": _cjson(self.z)}


@dataclass(frozen=True)
class Segment(Region):
    z1: complex
    z2: complex
    kind = "segment"

    def distance(self, z):
        return segment_distance(np.atleast_1d(np.asarray(z, dtype=complex)), complex(self.z1), complex(self.z2))

    def sample(self, density=200):
        density = _check_density(density)
        n = max(2, math.ceil(abs(self.z2 - self.z1) * density) + 1)
        return self.z1 + np.linspace(0, 1, n) * (self.z2 - self.z1)

    def to_json(self):
        return {"type": self.kind, "z1": _cjson(self.z1), "z2": _cjson(self.z2)}


@dataclass(frozen=True)
class Disk(Region):
    center: complex
    radius: float
    kind = "disk"

    def __post_init__(self):
        if not self.radius >= 0:
            raise SpecificationError("disk radius must be >= 0")

    def distance(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.maximum(np.abs(z - self.center) - self.radius, 0.0)

    def sample(self, density=200):
        return _disk_points(complex(self.center), float(self.radius), _check_density(density))

    def to_json(self):
        return {"type": self.kind, "center": _cjson(self.center), "radius": float(self.radius)}


@dataclass(frozen=True)
class Minkowski(Region):
    """``translate + factor * D`` with D the closed unit disk."""

    translate: complex
    factor: complex
    kind = "minkowski"

    def as_disk(self) -> Disk:
        return Disk(complex(self.translate), abs(self.factor))

    def distance(self, z):
        return self.as_disk().distance(z)

    def sample(self, density=200):
        return self.as_disk().sample(density)

    def to_json(self):
        return {"type": self.kind, "translate": _cjson(self.translate), "factor": _cjson(self.factor)}


@dataclass(frozen=True, eq=False)
class FiniteHull(Region):
    generators: tuple[complex, ...]
    kind = "finite_hull"

    def __post_init__(self):
        gens = tuple(complex(g) for g in np.ravel(np.asarray(self.generators, dtype=complex)))
        if not gens:
            raise SpecificationError("finite hull needs at least one generator")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "_hull", convex_hull(np.array(gens)))

    @property
    def hull(self) -> HullPolygon:
        return self._hull

    def distance(self, z):
        return self.hull.distance(z)

    def sample(self, density=200):
        density = _check_density(density)
        v = self.hull.vertices
        if len(v) == 1:
            return v.copy()
        if len(v) == 2:
            return Segment(v[0], v[1]).sample(density)
        edges = [Segment(a, b).sample(density) for a, b in zip(v, np.roll(v, -1))]
        h = 1.0 / density
        xs = np.arange(v.real.min(), v.real.max() + h / 2, h)
        ys = np.arange(v.imag.min(), v.imag.max() + h / 2, h)
        gx, gy = np.meshgrid(xs, ys)
        g = (gx + 1j * gy).ravel()
        g = g[self.hull.distance(g) == 0]
        return np.concatenate(edges + [g])

    def to_json(self):
        return {"type": self.kind, "points": [_cjson(g) for g in self.generators]}


@dataclass(frozen=True)
class Term:
    """``coeff * r**r_exp * (1 - r)**s_exp * exp(i * spin * theta)``."""

    coeff: complex
    r_exp: float = 0.0
    s_exp: float = 0.0
    spin: int = 0

    def __call__(self, r: np.ndarray) -> np.ndarray:
        return self.coeff * _pw(r, self.r_exp) * _pw(1 - r, self.s_exp)


@dataclass(frozen=True, eq=False)
class Param(Region):
    """Closed-form family ``{g(r, theta) : r in [0, 1], theta in [-pi, pi)}``, g a sum of terms."""

    terms: tuple[Term, ...]
    label: str = ""
    kind = "param"

    def __post_init__(self):
        if not self.terms:
            raise SpecificationError("param region needs at least one term")
        spins = {t.spin for t in self.terms}
        if not spins <= {-1, 0, 1}:
            raise SpecificationError("term spins must be -1, 0 or 1")

    @property
    def circle_family(self) -> bool:
        """True when g(r, .) traces one circle for each r (a single rotating direction)."""
        return len({t.spin for t in self.terms} - {0}) <= 1

    def center(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return sum((t(r) for t in self.terms if t.spin == 0), np.zeros(r.shape, dtype=complex))

    def rotor(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return sum((t(r) for t in self.terms if t.spin != 0), np.zeros(r.shape, dtype=complex))

    def generator(self, r, theta) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        return sum(t(r) * np.exp(1j * t.spin * theta) for t in self.terms)

    def distance(self, z, grid: int = 1024, iters: int = 60) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if not self.circle_family:
            return self._distance_2d(z)
        r = np.sin(0.5 * np.pi * np.arange(grid + 1) / grid) ** 2
        c, rho = self.center(r), np.abs(self.rotor(r))
        out = np.empty(z.shape)
        step = max(1, 500_000 // (grid + 1))
        rows = np.arange(step)
        for s in range(0, z.size, step):
            zz = z[s : s + step]
            idx = rows[: len(zz)]
            signed = np.abs(zz[:, None] - c[None, :]) - rho[None, :]
            # a sign change means some circle in between passes through z
            crossed = np.any(signed[:, :-1] * signed[:, 1:] <= 0, axis=1)
            f = np.abs(signed)
            best = f.min(axis=1)
            # refine around the few smallest local minima of the gap
            interior = np.full(f.shape, True)
            interior[:, 1:] &= f[:, 1:] <= f[:, :-1]
            interior[:, :-1] &= f[:, :-1] <= f[:, 1:]
            ranked = np.where(interior, f, np.inf)
            for i in np.argsort(ranked, axis=1)[:, :3].T:
                lo = r[np.maximum(i - 1, 0)]
                hi = r[np.minimum(i + 1, grid)]
                usable = np.isfinite(ranked[idx, i])
                refined = np.where(usable, self._golden(zz, lo, hi, iters), np.inf)
                best = np.minimum(best, refined)
            out[s : s + step] = np.where(crossed, 0.0, best)
        return out

    def _circle_gap(self, z, r):
        return np.abs(np.abs(z - self.center(r)) - np.abs(self.rotor(r)))

    def _golden(self, z, lo, hi, iters):
        a, b = lo.copy(), hi.copy()
        c = b - GOLDEN * (b - a)
        d = a + GOLDEN * (b - a)
        fc, fd = self._circle_gap(z, c), self._circle_gap(z, d)
        for _ in range(iters):
            left = fc < fd
            b = np.where(left, d, b)
            a = np.where(left, a, c)
            new_c = b - GOLDEN * (b - a)
            new_d = a + GOLDEN * (b - a)
            c_next = np.where(left, new_c, d)
            d_next = np.where(left, c, new_d)
            fc_next = np.where(left, self._circle_gap(z, new_c), fd)
            fd_next = np.where(left, fc, self._circle_gap(z, new_d))
            c, d, fc, fd = c_next, d_next, fc_next, fd_next
        return np.minimum(fc, fd)

    def _distance_2d(self, z):
        r = np.linspace(0, 1, 129)
        th = np.linspace(-np.pi, np.pi, 256, endpoint=False)
        R, T = np.meshgrid(r, th, indexing="ij")
        G = self.generator(R, T).ravel()
        out = np.empty(z.shape)
        for n, zz in enumerate(z):
            k = int(np.argmin(np.abs(G - zz)))
            r0, t0 = R.ravel()[k], T.ravel()[k]
            res = minimize(
                lambda v: abs(self.generator(np.clip(v[0], 0, 1), v[1]) - zz),
                [r0, t0],
                method="Nelder-Mead",
                options={"xatol": 1e-12, "fatol": 1e-14},
            )
            out[n] = min(float(res.fun), float(np.abs(G[k] - zz)))
        return out

    def sample(self, density: int = 200) -> np.ndarray:
        """Generator grid, adaptive in r so that neighbouring circles lie within 1/density."""
        density = _check_density(density)
        if not self.circle_family:
            r = np.linspace(0, 1, density + 1)
            th = np.linspace(-np.pi, np.pi, 256, endpoint=False)
            R, T = np.meshgrid(r, th, indexing="ij")
            return self.generator(R, T).ravel()
        fine = np.sin(0.5 * np.pi * np.arange(8193) / 8192) ** 2
        c, rot = self.center(fine), self.rotor(fine)
        move = np.abs(np.diff(c)) + np.abs(np.diff(np.abs(rot)))
        cum = np.concatenate([[0.0], np.cumsum(move)])
        ticks = np.floor(cum * density)
        keep = np.concatenate([[True], ticks[1:] != ticks[:-1]])
        keep[-1] = True
        spin = next((t.spin for t in self.terms if t.spin != 0), 1)
        out = []
        for cc, rr in zip(c[keep], rot[keep]):
            m = max(1, math.ceil(2 * math.pi * abs(rr) * density)) if rr != 0 else 1
            th = 2 * np.pi * np.arange(m) / m
            out.append(cc + rr * np.exp(1j * spin * th))
        return np.concatenate(out)

    def to_json(self):
        return {
            "type": self.kind,
            "label": self.label,
            "terms": [
                {"coeff": _cjson(t.coeff), "r_exp": t.r_exp, "s_exp": t.s_exp, "spin": t.spin}
                for t in self.terms
            ],
        }


def region_from_json(data: dict[str, Any]) -> Region:
    try:
        kind = data["type"]
        if kind == "point":
            return Point(_cload(data["z"]))
        if kind == "segment":
            return Segment(_cload(data["z1"]), _cload(data["z2"]))
        if kind == "disk":
            return Disk(_cload(data["center"]), float(data["radius"]))
        if kind == "minkowski":
            return Minkowski(_cload(data["translate"]), _cload(data["factor"]))
        if kind == "finite_hull":
            return FiniteHull(tuple(_cload(v) for v in data["points"]))
        if kind == "param":
            terms = tuple(
                Term(_cload(t["coeff"]), float(t["r_exp"]), float(t["s_exp"]), int(t["spin"]))
                for t in data["terms"]
            )
            return Param(terms, data.get("label", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecificationError(f"malformed region: {exc}") from exc
    raise SpecificationError(f"unknown region type {data.get('type')!r}")


def region_contains(region: Region, z, tol: float = CONTAINS_TOL) -> np.ndarray:
    return region.contains(z, tol)


def region_sample(region: Region, density: int = 200) -> np.ndarray:
    return region.sample(density)


def dedupe(points: Sequence[complex] | np.ndarray, resolution: float = 1e-6) -> np.ndarray:
    """Unique points on a ``resolution`` grid, keeping the first representative, sorted by key."""
    z = np.asarray(points, dtype=complex).ravel()
    if z.size == 0:
        return z
    keys = np.column_stack([np.round(z.real / resolution), np.round(z.imag / resolution)]).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    return z[first]
