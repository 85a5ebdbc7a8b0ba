"""Points in both affine charts, tangent vectors and the dual transports."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import BasePointMismatch, DegenerateVector
from .generator import BregmanGenerator

EPS_DEGENERATE = 1e-12


@dataclass(frozen=True, eq=False)
class Point:
    """A manifold point carrying its theta and eta coordinates."""

    generator: BregmanGenerator
    theta: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        for arr in (self.theta, self.eta):
            arr.setflags(write=False)

    @classmethod
    def from_theta(cls, generator: BregmanGenerator, theta) -> "Point":
        theta = np.array(generator.check_theta(theta), dtype=float)
        if theta.ndim != 1:
            raise ValueError("a Point holds a single coordinate vector")
        return cls(generator, theta, np.array(generator._gradient(theta)))

    @classmethod
    def from_eta(cls, generator: BregmanGenerator, eta) -> "Point":
        eta = np.array(generator.check_eta(eta), dtype=float)
        if eta.ndim != 1:
            raise ValueError("a Point holds a single coordinate vector")
        theta = np.array(generator.check_theta(generator._conjugate_gradient(eta)))
        return cls(generator, theta, eta)

    @property
    def dim(self) -> int:
        return self.generator.dim

    def coords(self, chart: str = "theta") -> np.ndarray:
        return self.theta if _chart(chart) == "theta" else self.eta

    def metric(self) -> np.ndarray:
        return self.generator._hessian(self.theta)

    def dual_metric(self) -> np.ndarray:
        return self.generator._conjugate_hessian(self.eta)

    def same_as(self, other: "Point") -> bool:
        return (self.generator == other.generator
                and np.array_equal(self.theta, other.theta))

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self.same_as(other)

    def __hash__(self):
        return hash(self.theta.tobytes())

    def __repr__(self):
        return f"Point(theta={self.theta.tolist()}, eta={self.eta.tolist()})"


def _chart(chart: str) -> str:
    c = str(chart).lower()
    if c in ("theta", "primal", "θ"):
        return "theta"
    if c in ("eta", "dual", "η"):
        return "eta"
    raise ValueError(f"unknown chart {chart!r}; expected 'theta' or 'eta'")


def as_point(generator: BregmanGenerator, x, chart: str = "theta") -> Point:
    """Accept a Point or raw coordinates in ``chart``."""
    if isinstance(x, Point):
        return x
    if _chart(chart) == "theta":
        return Point.from_theta(generator, x)
    return Point.from_eta(generator, x)


def lower_index(point: Point, contravariant) -> np.ndarray:
    """v_i = g_ij v^j with g the primal Hessian."""
    v = np.asarray(contravariant, dtype=float)
    return point.metric() @ v


def raise_index(point: Point, covariant) -> np.ndarray:
    """v^i = g*^ij v_j with g* the dual Hessian."""
    v = np.asarray(covariant, dtype=float)
    return point.dual_metric() @ v


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector with both component sets kept in sync."""

    base: Point
    contravariant: np.ndarray
    covariant: np.ndarray = field(repr=False)

    def __post_init__(self):
        for arr in (self.contravariant, self.covariant):
            arr.setflags(write=False)

    @classmethod
    def from_contravariant(cls, base: Point, components) -> "TangentVector":
        v = np.array(components, dtype=float).reshape(base.dim)
        return cls(base, v, np.array(lower_index(base, v)))

    @classmethod
    def from_covariant(cls, base: Point, components) -> "TangentVector":
        v = np.array(components, dtype=float).reshape(base.dim)
        return cls(base, np.array(raise_index(base, v)), v)

    def __mul__(self, c: float) -> "TangentVector":
        return TangentVector(self.base, c * self.contravariant, c * self.covariant)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def _same_base(u: TangentVector, v: TangentVector) -> Point:
    if not u.base.same_as(v.base):
        raise BasePointMismatch(
            f"tangent vectors based at {u.base.theta.tolist()} and {v.base.theta.tolist()}")
    return u.base


def inner_product(u: TangentVector, v: TangentVector) -> float:
    """g_p(u, v), averaged over the two mixed pairings so it is exactly symmetric."""
    _same_base(u, v)
    return float(0.5 * (u.covariant @ v.contravariant + u.contravariant @ v.covariant))


def inner_product_forms(u: TangentVector, v: TangentVector) -> np.ndarray:
    """The four equivalent expressions of g_p(u, v)."""
    p = _same_base(u, v)
    return np.array([
        u.contravariant @ p.metric() @ v.contravariant,
        u.covariant @ p.dual_metric() @ v.covariant,
        u.covariant @ v.contravariant,
        u.contravariant @ v.covariant,
    ])


def norm(v: TangentVector) -> float:
    return float(np.sqrt(max(inner_product(v, v), 0.0)))


def cosine(u: TangentVector, v: TangentVector) -> float:
    nu, nv = norm(u), norm(v)
    if nu < EPS_DEGENERATE or nv < EPS_DEGENERATE:
        raise DegenerateVector(f"vector norms {nu:.3g}, {nv:.3g} below {EPS_DEGENERATE:g}")
    return float(np.clip(inner_product(u, v) / (nu * nv), -1.0, 1.0))


def angle(u: TangentVector, v: TangentVector) -> float:
    """Metric angle in [0, pi] between two vectors at the same point."""
    return float(np.arccos(cosine(u, v)))


def primal_transport(v: TangentVector, to: Point) -> TangentVector:
    """Flat transport of the primal connection: contravariant components are kept."""
    return TangentVector.from_contravariant(to, v.contravariant)


def dual_transport(v: TangentVector, to: Point) -> TangentVector:
    """Flat transport of the dual connection: covariant components are kept."""
    return TangentVector.from_covariant(to, v.covariant)
