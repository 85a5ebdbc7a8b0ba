"""Bregman spheres of separable divergences, parameterised orthant by orthant.

A sphere {x : sum_i d(c_i : x_i) = r} of a separable divergence splits the
radius into per-coordinate budgets u_i >= 0 with sum u_i = r. Each scalar
equation d(c : x) = u has one root on either side of c, found in closed form
with the two real Lambert W branches for the KL and IS divergences.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np

from ._validation import as_coords, check_positive_int
from .exceptions import DomainError
from .generator import EXTENDED_KL, ITAKURA_SAITO, ExtendedKL, ItakuraSaito
from .numeric import lambert_w0, lambert_w_minus1


def _check_cu(c: float, u: float) -> tuple[float, float]:
    c, u = float(c), float(u)
    if not (np.isfinite(c) and c > 0):
        raise DomainError(f"center coordinate must be positive, got {c!r}")
    if not (np.isfinite(u) and u >= 0):
        raise DomainError(f"divergence budget must be non-negative, got {u!r}")
    return c, u


def _branch_argument(s: float) -> float:
    a = -np.exp(-s - 1.0)
    if a == 0.0:
        raise DomainError(f"budget ratio {s:.6g} is too large; the small root underflows")
    return a


def scalar_solve_kl(c: float, u: float) -> tuple[float, float]:
    """Both roots x of c log(c / x) + x - c = u, smaller first."""
    c, u = _check_cu(c, u)
    if u == 0.0:
        return c, c
    a = _branch_argument(u / c)
    return -c * lambert_w0(a), -c * lambert_w_minus1(a)


def scalar_solve_is(c: float, u: float) -> tuple[float, float]:
    """Both roots x of c / x - log(c / x) - 1 = u, smaller first."""
    c, u = _check_cu(c, u)
    if u == 0.0:
        return c, c
    a = _branch_argument(u)
    return -c / lambert_w_minus1(a), -c / lambert_w0(a)


def scalar_kl(c, x):
    return c * np.log(c / x) + x - c


def scalar_is(c, x):
    ratio = c / x
    return (ratio - 1.0) - np.log(ratio)


_BUILTIN = {
    EXTENDED_KL: (scalar_solve_kl, scalar_kl, ExtendedKL),
    ITAKURA_SAITO: (scalar_solve_is, scalar_is, ItakuraSaito),
}


@dataclass(frozen=True, eq=False)
class SphereSpec:
    """Center, radius and separable divergence of a Bregman sphere.

    ``kind`` names a built-in divergence; alternatively pass ``solver``
    (c, u) -> (x_minus, x_plus) together with the scalar ``divergence``
    (c, x) -> d(c : x) it inverts.
    """

    kind: str
    center: np.ndarray
    radius: float
    solver: Callable | None = None
    divergence: Callable | None = None

    def __post_init__(self):
        center = np.array(as_coords(self.center, name="center"), dtype=float)
        if center.ndim != 1:
            raise ValueError("center must be a vector")
        radius = float(self.radius)
        if not (np.isfinite(radius) and radius >= 0):
            raise DomainError(f"radius must be non-negative, got {self.radius!r}")
        if self.solver is None:
            kind = str(self.kind).lower().replace("-", "_")
            if kind not in _BUILTIN:
                raise ValueError(f"sphere kind must be one of {sorted(_BUILTIN)}, got {self.kind!r}")
            object.__setattr__(self, "kind", kind)
            if np.any(center <= 0):
                i = int(np.argmax(center <= 0))
                raise DomainError(f"center[{i}] = {float(center[i])!r} must be positive")
        elif self.divergence is None:
            raise ValueError("a custom solver needs the matching scalar divergence")
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)

    @property
    def dim(self) -> int:
        return self.center.size

    def scalar_solve(self, c, u):
        if self.solver is not None:
            return tuple(self.solver(c, u))
        return _BUILTIN[self.kind][0](c, u)

    def scalar_divergence(self, c, x):
        if self.divergence is not None:
            return self.divergence(c, x)
        return _BUILTIN[self.kind][1](c, x)

    def generator(self):
        """The separable generator whose Bregman divergence this sphere uses."""
        if self.solver is not None:
            raise TypeError("custom spheres have no built-in generator")
        return _BUILTIN[self.kind][2](self.dim)


def sphere_residual(spec: SphereSpec, x) -> np.ndarray:
    """sum_i d(c_i : x_i) - r for points stacked on the last axis."""
    x = np.asarray(x, dtype=float)
    return np.sum(spec.scalar_divergence(spec.center, x), axis=-1) - spec.radius


def simplex_grid(dim: int, total: float, m: int) -> np.ndarray:
    """Budgets u >= 0 with sum u = total, m values per free coordinate.

    u_1 runs over m evenly spaced values in [0, total], u_2 over m values
    in [0, total - u_1], and so on; the last coordinate takes the rest.
    Boundary values are included.
    """
    dim = check_positive_int(dim, "dim")
    m = check_positive_int(m, "m")
    total = float(total)
    rows = [np.zeros(0)]
    rest = [total]
    for _ in range(dim - 1):
        new_rows, new_rest = [], []
        for row, rem in zip(rows, rest):
            vals = np.linspace(0.0, rem, m) if m > 1 else np.array([0.0])
            for v in vals:
                new_rows.append(np.append(row, v))
                new_rest.append(max(rem - v, 0.0))
        rows, rest = new_rows, new_rest
    return np.array([np.append(row, rem) for row, rem in zip(rows, rest)])


def orthants(dim: int) -> list[tuple[int, ...]]:
    return list(product((-1, 1), repeat=check_positive_int(dim, "dim")))


def _check_orthant(spec: SphereSpec, orthant) -> np.ndarray:
    o = np.asarray(orthant)
    if o.shape != (spec.dim,) or not np.all(np.isin(o, (-1, 1))):
        raise ValueError(f"orthant must hold {spec.dim} signs from {{-1, +1}}, got {orthant!r}")
    return o


def _point_for(spec: SphereSpec, u, o) -> np.ndarray:
    x = np.empty(spec.dim)
    for i, (c, ui, oi) in enumerate(zip(spec.center, u, o)):
        lo, hi = spec.scalar_solve(c, ui)
        x[i] = hi if oi > 0 else lo
    return x


def sphere_samples(spec: SphereSpec, orthant, m: int) -> tuple[np.ndarray, np.ndarray]:
    """(u, x) arrays for one orthant patch of the sphere."""
    o = _check_orthant(spec, orthant)
    if spec.radius == 0.0:
        return np.zeros((1, spec.dim)), spec.center[None, :].copy()
    u = simplex_grid(spec.dim, spec.radius, m)
    return u, np.array([_point_for(spec, row, o) for row in u])


def sphere_points(spec: SphereSpec, orthant, m: int) -> np.ndarray:
    """Points of the orthant patch with sign ``orthant`` (one +/-1 per coordinate)."""
    return sphere_samples(spec, orthant, m)[1]


def all_sphere_samples(spec: SphereSpec, m: int):
    """(orthant, u, x) for each of the 2^D orthant patches."""
    return [(o, *sphere_samples(spec, o, m)) for o in orthants(spec.dim)]


def tangent_box(spec: SphereSpec, u) -> np.ndarray:
    """The 2^D corners of the axis-parallel box touching the sphere for budgets u."""
    u = as_coords(u, spec.dim, "u")
    if np.any(u < 0):
        raise DomainError(f"budgets must be non-negative, got {u.tolist()}")
    if abs(np.sum(u) - spec.radius) > 1e-12 * (1.0 + spec.radius):
        raise DomainError(f"budgets sum to {np.sum(u)!r}, not the radius {spec.radius!r}")
    sides = [spec.scalar_solve(c, ui) for c, ui in zip(spec.center, u)]
    return np.array([[sides[i][0 if o < 0 else 1] for i, o in enumerate(signs)]
                     for signs in orthants(spec.dim)])
