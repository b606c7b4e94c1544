"""Finite-dimensional complex algebras given by a structure tensor and a weighted l^p norm.

The product convention is ``(x*y)_k = sum_{i,j} c[i, j, k] x_i y_j`` with the
first index belonging to the left factor.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.optimize import minimize

__all__ = [
    "SpecificationError",
    "PreconditionError",
    "NormSpec",
    "AlgebraSpec",
    "as_tensor",
    "multiply",
    "left_matrix",
    "norm",
    "is_associative",
    "associativity_residual",
    "submultiplicative_scale",
    "rescaled",
    "parse_complex",
]

ASSOC_TOL = 1e-10
SAFETY_FACTOR = 1.02
MIN_SCALE = 1e-6


class SpecificationError(ValueError):
    """Malformed algebra, norm, region or configuration data."""


class PreconditionError(ValueError):
    """Valid inputs that violate an operation's mathematical precondition."""


@dataclass(frozen=True)
class NormSpec:
    """``c * (sum_i |x_i|^p w_i^p)^(1/p)``; ``p = math.inf`` gives ``c * max_i w_i |x_i|``."""

    p: float
    weights: tuple[float, ...]
    scale: float = 1.0

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1:
            raise SpecificationError(f"norm exponent must lie in [1, inf], got {self.p!r}")
        object.__setattr__(self, "p", p)
        w = tuple(float(v) for v in self.weights)
        if not w:
            raise SpecificationError("norm needs at least one weight")
        if any(not math.isfinite(v) or v < 1 for v in w):
            raise SpecificationError(f"weights must be finite and >= 1, got {w}")
        object.__setattr__(self, "weights", w)
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise SpecificationError(f"scale must be a positive real, got {self.scale!r}")
        object.__setattr__(self, "scale", float(self.scale))

    @classmethod
    def lp(cls, p: float, dim: int, scale: float = 1.0) -> "NormSpec":
        return cls(p, (1.0,) * dim, scale)

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.p)

    @property
    def conjugate(self) -> float:
        """Conjugate exponent q with 1/p + 1/q = 1."""
        if self.p == 1:
            return math.inf
        if self.is_inf:
            return 1.0
        return self.p / (self.p - 1)

    def __call__(self, x) -> np.ndarray | float:
        """Norm along the last axis."""
        x = np.asarray(x)
        m = np.abs(x) * np.asarray(self.weights)
        if self.is_inf:
            base = m.max(axis=-1)
        elif self.p == 1:
            base = m.sum(axis=-1)
        elif self.p == 2:
            base = np.sqrt((m * m).sum(axis=-1))
        else:
            # factor out the max for stability
            top = m.max(axis=-1, keepdims=True)
            safe = np.where(top > 0, top, 1.0)
            base = np.squeeze(safe, -1) * ((m / safe) ** self.p).sum(axis=-1) ** (1 / self.p)
        out = self.scale * base
        return float(out) if np.ndim(out) == 0 else out

    def to_json(self) -> dict[str, Any]:
        return {
            "p": "inf" if self.is_inf else self.p,
            "weights": list(self.weights),
            "scale": self.scale,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "NormSpec":
        try:
            p = data["p"]
            p = math.inf if p in ("inf", "Infinity", "infinity") else float(p)
            return cls(p, tuple(data["weights"]), float(data.get("scale", 1.0)))
        except (KeyError, TypeError) as exc:
            raise SpecificationError(f"bad norm object: {exc}") from exc


def as_tensor(coeffs) -> np.ndarray:
    t = np.asarray(coeffs, dtype=complex)
    if t.ndim != 3 or not (t.shape[0] == t.shape[1] == t.shape[2]) or t.shape[0] < 1:
        raise SpecificationError(f"structure tensor must have shape (n, n, n), got {t.shape}")
    if not np.all(np.isfinite(t)):
        raise SpecificationError("structure tensor has non-finite entries")
    return t


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    tensor: np.ndarray
    norm: NormSpec
    identity: np.ndarray | None = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = as_tensor(self.tensor)
        t.setflags(write=False)
        object.__setattr__(self, "tensor", t)
        if self.norm.dim != t.shape[0]:
            raise SpecificationError(
                f"norm has {self.norm.dim} weights but tensor dimension is {t.shape[0]}"
            )
        if self.identity is not None:
            e = np.asarray(self.identity, dtype=complex)
            if e.shape != (t.shape[0],):
                raise SpecificationError("identity has the wrong dimension")
            basis = np.eye(t.shape[0], dtype=complex)
            left = np.einsum("ijk,i,bj->bk", t, e, basis)
            right = np.einsum("ijk,bi,j->bk", t, basis, e)
            if not (np.allclose(left, basis, atol=1e-12, rtol=0) and np.allclose(right, basis, atol=1e-12, rtol=0)):
                raise SpecificationError("declared identity is not a two-sided identity")
            e.setflags(write=False)
            object.__setattr__(self, "identity", e)

    @property
    def dim(self) -> int:
        return self.tensor.shape[0]

    @property
    def identity_norm(self) -> float | None:
        return None if self.identity is None else float(self.norm(self.identity))

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "dim": self.dim,
            "tensor": [[[_encode(c) for c in row] for row in plane] for plane in self.tensor],
            "norm": self.norm.to_json(),
        }
        if self.identity is not None:
            out["identity"] = [[float(v.real), float(v.imag)] for v in self.identity]
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "AlgebraSpec":
        for key in ("dim", "tensor", "norm"):
            if key not in data:
                raise SpecificationError(f"algebra document is missing field '{key}'")
        try:
            tensor = np.array(
                [[[_decode(c) for c in row] for row in plane] for plane in data["tensor"]],
                dtype=complex,
            )
        except (TypeError, ValueError) as exc:
            raise SpecificationError(f"field 'tensor': {exc}") from exc
        if tensor.shape != (data["dim"],) * 3:
            raise SpecificationError(
                f"field 'tensor': expected shape {(data['dim'],) * 3}, got {tensor.shape}"
            )
        identity = data.get("identity")
        if identity is not None:
            identity = np.array([_decode(v) for v in identity], dtype=complex)
        return cls(tensor, NormSpec.from_json(data["norm"]), identity, data.get("name", ""))

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def with_norm(self, norm_spec: NormSpec) -> "AlgebraSpec":
        return AlgebraSpec(self.tensor, norm_spec, self.identity, self.name, dict(self.meta))


def _encode(c: complex):
    c = complex(c)
    return c.real if c.imag == 0 else [c.real, c.imag]


def _decode(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex entries are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return parse_complex(v)
    return complex(v)


def parse_complex(text: str) -> complex:
    """Parse ``"1+2i"``, ``"-3i"``, ``"2"``, ``"1e-3-2.5i"``."""
    s = text.strip().replace("I", "i").replace("j", "i")
    if not s:
        raise ValueError("empty complex literal")
    if s.endswith("i"):
        body = s[:-1]
        # find the split between real and imaginary parts (last sign not part of an exponent)
        cut = -1
        for pos in range(len(body) - 1, 0, -1):
            if body[pos] in "+-" and body[pos - 1] not in "eE":
                cut = pos
                break
        if cut == -1:
            re_part, im_part = "0", body
        else:
            re_part, im_part = body[:cut], body[cut:]
        if im_part in ("", "+"):
            im_part = "1"
        elif im_part == "-":
            im_part = "-1"
        return complex(float(re_part), float(im_part))
    return complex(float(s), 0.0)


def _check_dim(A: AlgebraSpec, *xs) -> None:
    for x in xs:
        if np.shape(x)[-1] != A.dim:
            raise SpecificationError(f"element of dimension {np.shape(x)[-1]} in a {A.dim}-dimensional algebra")


def multiply(A: AlgebraSpec, x, y) -> np.ndarray:
    """Product ``x * y``; broadcasts over leading axes."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    _check_dim(A, x, y)
    return np.einsum("ijk,...i,...j->...k", A.tensor, x, y)


def left_matrix(A: AlgebraSpec, a) -> np.ndarray:
    """Matrix ``L`` with ``a * x = L @ x``."""
    a = np.asarray(a, dtype=complex)
    _check_dim(A, a)
    return np.einsum("ijk,i->kj", A.tensor, a)


def norm(A: AlgebraSpec, x) -> float:
    _check_dim(A, x)
    return A.norm(x)


def _is_integral(t: np.ndarray) -> bool:
    return bool(np.all(t.real == np.round(t.real)) and np.all(t.imag == np.round(t.imag)))


def associativity_residual(t) -> float:
    t = as_tensor(t)
    lhs = np.einsum("ijm,mkl->ijkl", t, t)
    rhs = np.einsum("jkm,iml->ijkl", t, t)
    return float(np.abs(lhs - rhs).max())


def is_associative(t, tol: float = ASSOC_TOL) -> bool:
    """Check ``(e_i e_j) e_k = e_i (e_j e_k)`` on all basis triples.

    Integer (Gaussian-integer) tensors are compared exactly; their products are
    exact in double precision.
    """
    t = as_tensor(t)
    lhs = np.einsum("ijm,mkl->ijkl", t, t)
    rhs = np.einsum("jkm,iml->ijkl", t, t)
    if _is_integral(t) and np.abs(t).max(initial=0) < 2**20:
        return bool(np.array_equal(lhs, rhs))
    scale = max(1.0, float(np.abs(t).max(initial=0)) ** 2)
    return bool(np.abs(lhs - rhs).max(initial=0) <= tol * scale)


def _ratio(A: AlgebraSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return A.norm(multiply(A, x, y)) / (A.norm(x) * A.norm(y))


def submultiplicative_scale(
    A: AlgebraSpec,
    n_samples: int = 4000,
    seed: int = 0,
    safety: float = SAFETY_FACTOR,
    min_scale: float = MIN_SCALE,
    polish: bool = True,
) -> float:
    """Smallest sampled ``M`` with ``||x*y|| <= M ||x|| ||y||``, inflated by ``safety``.

    Multiplying the norm by the returned value makes it submultiplicative on every
    tested pair. Sampling only bounds the supremum from below, so the best pair is
    polished locally before the safety factor is applied.
    """
    if n_samples < 1:
        raise SpecificationError("need at least one sample")
    if not np.any(A.tensor):
        return min_scale
    from .sampling import SphereSampler

    n = A.dim
    xs = SphereSampler(seed=seed).sample(A.norm, n_samples)
    ys = SphereSampler(seed=seed + 1).sample(A.norm, n_samples)
    r = _ratio(A, xs, ys)
    best = int(np.argmax(r))
    bx, by, sup = xs[best], ys[best], float(r[best])
    # all pairs among the leading (structured, sparse) samples
    head = xs[: min(n_samples, 256)]
    cross = _ratio(A, head[:, None, :], head[None, :, :])
    i, j = np.unravel_index(np.argmax(cross), cross.shape)
    if cross[i, j] > sup:
        bx, by, sup = head[i], head[j], float(cross[i, j])

    if polish and sup > 0:

        def objective(v):
            x = v[:n] + 1j * v[n : 2 * n]
            y = v[2 * n : 3 * n] + 1j * v[3 * n :]
            nx, ny = A.norm(x), A.norm(y)
            if nx == 0 or ny == 0:
                return 0.0
            return -float(A.norm(multiply(A, x, y)) / (nx * ny))

        v0 = np.concatenate([bx.real, bx.imag, by.real, by.imag])
        res = minimize(objective, v0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        sup = max(sup, -float(res.fun))
    if sup <= 0:
        return min_scale
    return max(sup * safety, min_scale)


def rescaled(A: AlgebraSpec, factor: float) -> AlgebraSpec:
    """Same algebra with the norm multiplied by ``factor``."""
    ns = NormSpec(A.norm.p, A.norm.weights, A.norm.scale * factor)
    return A.with_norm(ns)


def basis_tensor(dim: int, entries: dict[tuple[int, int, int], complex]) -> np.ndarray:
    t = np.zeros((dim, dim, dim), dtype=complex)
    for (i, j, k), c in entries.items():
        t[i, j, k] = c
    return t


def coordinatewise(dim: int) -> np.ndarray:
    return basis_tensor(dim, {(i, i, i): 1 for i in range(dim)})


def elements(values: Sequence) -> np.ndarray:
    return np.asarray(values, dtype=complex)
