"""Primal and dual geodesics, affine flats, and 2D flat intersection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import Point, TangentVector, _chart, as_point
from .exceptions import DegenerateVector, DomainError, EmptyIntersection, SingularSystem
from .generator import BregmanGenerator

PRIMAL = "primal"
DUAL = "dual"
DEFAULT_SAMPLES = 256
DEFAULT_WINDOW = ((1e-6, 50.0), (1e-6, 50.0))
GRID_CELLS = 1024
BISECT_TOL = 1e-13


def _kind(kind: str) -> str:
    k = str(kind).lower()
    if k in (PRIMAL, "p", "theta"):
        return PRIMAL
    if k in (DUAL, "d", "eta"):
        return DUAL
    raise ValueError(f"unknown geodesic kind {kind!r}; expected 'primal' or 'dual'")


class Geodesic:
    """Segment from ``a`` to ``b``, straight in theta (primal) or eta (dual)."""

    def __init__(self, a: Point, b: Point, kind: str = PRIMAL):
        if not a.generator == b.generator:
            raise ValueError("endpoints live on different manifolds")
        self.a = a
        self.b = b
        self.kind = _kind(kind)
        self.generator = a.generator
        ca, cb = self._ends()
        if np.linalg.norm(cb - ca) <= 1e-12:
            raise DegenerateVector(f"geodesic endpoints coincide at {a.theta.tolist()}")

    @classmethod
    def from_theta(cls, gen: BregmanGenerator, a, b, kind: str = PRIMAL) -> "Geodesic":
        return cls(as_point(gen, a), as_point(gen, b), kind)

    def _ends(self):
        if self.kind == PRIMAL:
            return self.a.theta, self.b.theta
        return self.a.eta, self.b.eta

    def reversed(self) -> "Geodesic":
        return Geodesic(self.b, self.a, self.kind)

    def point_at(self, t: float) -> Point:
        ca, cb = self._ends()
        c = (1.0 - t) * ca + t * cb
        if self.kind == PRIMAL:
            return Point.from_theta(self.generator, c)
        return Point.from_eta(self.generator, c)

    def tangent_at_start(self) -> TangentVector:
        if self.kind == PRIMAL:
            return TangentVector.from_contravariant(self.a, self.b.theta - self.a.theta)
        return TangentVector.from_covariant(self.a, self.b.eta - self.a.eta)

    def tangent_at(self, t: float) -> TangentVector:
        """Velocity at parameter t; it is the start tangent carried by the matching flat transport."""
        base = self.point_at(t)
        if self.kind == PRIMAL:
            return TangentVector.from_contravariant(base, self.b.theta - self.a.theta)
        return TangentVector.from_covariant(base, self.b.eta - self.a.eta)

    def sample(self, n: int = DEFAULT_SAMPLES, chart: str = "theta") -> np.ndarray:
        """Coordinates of ``point_at(i / n)``, i = 0..n, in the requested chart."""
        if int(n) < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        n = int(n)
        t = np.linspace(0.0, 1.0, n + 1)[:, None]
        ca, cb = self._ends()
        c = (1.0 - t) * ca + t * cb
        c[0], c[-1] = ca, cb
        gen = self.generator
        if self.kind == PRIMAL:
            theta = gen.check_theta(c)
            return theta if _chart(chart) == "theta" else gen._gradient(theta)
        eta = gen.check_eta(c)
        return eta if _chart(chart) == "eta" else gen.check_theta(gen._conjugate_gradient(eta))

    def __repr__(self):
        return f"Geodesic({self.a.theta.tolist()} -> {self.b.theta.tolist()}, {self.kind})"


@dataclass(frozen=True, eq=False)
class Flat:
    """Affine hyperplane ``normal . x = offset`` in the theta or eta chart."""

    chart: str
    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "chart", _chart(self.chart))
        normal = np.array(self.normal, dtype=float)
        if normal.ndim != 1:
            raise ValueError("normal must be a vector")
        if np.linalg.norm(normal) <= 1e-12:
            raise DegenerateVector("flat normal vanishes")
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))

    def residual(self, x):
        """``normal . x - offset`` for a Point (read in this chart) or raw coordinates."""
        if isinstance(x, Point):
            x = x.coords(self.chart)
        return np.asarray(x, dtype=float) @ self.normal - self.offset

    def relative_residual(self, x):
        if isinstance(x, Point):
            x = x.coords(self.chart)
        x = np.asarray(x, dtype=float)
        scale = 1.0 + np.abs(x) @ np.abs(self.normal) + abs(self.offset)
        return self.residual(x) / scale

    def contains(self, x, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(self.relative_residual(x)) < tol))

    def to_dict(self) -> dict:
        return {"chart": self.chart, "normal": self.normal.tolist(), "offset": self.offset}


def _segment_in_box(x0, d, box):
    """Parameter interval of ``x0 + s d`` inside an axis-aligned box."""
    lo, hi = -np.inf, np.inf
    for i, (a, b) in enumerate(box):
        if d[i] == 0.0:
            if not a <= x0[i] <= b:
                return None
            continue
        s1, s2 = (a - x0[i]) / d[i], (b - x0[i]) / d[i]
        lo, hi = max(lo, min(s1, s2)), min(hi, max(s1, s2))
    if not lo < hi:
        return None
    return lo, hi


def intersect_flats_2d(gen: BregmanGenerator, f_theta: Flat, f_eta: Flat,
                       window=DEFAULT_WINDOW) -> list[Point]:
    """All points of a theta-flat whose eta coordinates also lie on an eta-flat.

    The theta-flat (a line) is parameterised by arclength inside ``window``;
    the eta-flat residual along it is scanned on a 1024-cell grid and every
    sign change is refined by bisection.
    """
    if gen.dim != 2:
        raise ValueError("intersect_flats_2d needs a 2D manifold")
    if f_theta.chart != "theta" or f_eta.chart != "eta":
        raise ValueError("expected a theta-flat and an eta-flat, in that order")
    n = f_theta.normal
    x0 = n * f_theta.offset / (n @ n)
    d = np.array([-n[1], n[0]]) / np.linalg.norm(n)
    seg = _segment_in_box(x0, d, window)
    if seg is None:
        raise EmptyIntersection("the theta-flat misses the search window")

    s = np.linspace(seg[0], seg[1], GRID_CELLS + 1)
    xs = x0 + s[:, None] * d
    inside = gen.in_domain(xs)
    if not np.all(inside):
        bad = xs[np.argmin(inside)]
        raise DomainError(f"the theta-flat leaves the domain at {bad.tolist()} inside the window")

    def h(sv):
        return gen._gradient(x0 + np.multiply.outer(sv, d)) @ f_eta.normal - f_eta.offset

    hs = h(s)
    scale = 1.0 + np.abs(f_eta.offset) + np.max(np.abs(hs))
    if np.all(np.abs(hs) <= 1e-14 * scale):
        raise SingularSystem("the flats coincide along the window; the intersection is not discrete")

    roots = [s[i] for i in np.flatnonzero(hs == 0.0)]
    for i in np.flatnonzero(hs[:-1] * hs[1:] < 0):
        a, b, ha = s[i], s[i + 1], hs[i]
        for _ in range(200):
            if b - a <= BISECT_TOL * (1.0 + abs(a)):
                break
            m = 0.5 * (a + b)
            hm = float(h(np.array(m)))
            if hm == 0.0:
                a = b = m
                break
            if (hm < 0) == (ha < 0):
                a, ha = m, hm
            else:
                b = m
        roots.append(0.5 * (a + b))

    if not roots:
        raise EmptyIntersection("no crossing of the two flats inside the window")
    return [Point.from_theta(gen, x0 + r * d) for r in sorted(roots)]
