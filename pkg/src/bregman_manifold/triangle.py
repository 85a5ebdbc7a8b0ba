"""Geodesic triangles on a Bregman manifold and the right-angle constructions.

A triangle carries one primal/dual tag per edge in the order (pq, qr, rp),
written as a three-letter string such as ``"ppp"`` or ``"pdp"``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from ._validation import check_positive_int, check_random_state
from .chart import Point, TangentVector, angle, as_point, cosine
from .divergence import PythagorasReport, check_pythagoras
from .exceptions import (BothRootsAtQ, DegenerateQuadratic, DegenerateVector, DomainError,
                         NoConvergence, SingularJacobian, SingularSystem)
from .generator import BregmanGenerator, ItakuraSaito
from .geodesic import DEFAULT_WINDOW, Flat, intersect_flats_2d
from .numeric import NewtonConfig, newton_solve, newton_solve_batch, solve_quadratic

EDGE_TYPES = tuple("".join(t) for t in product("pd", repeat=3))
VERTEX_SEPARATION = 1e-10
ROOT_SEPARATION = 1e-8
RIGHT_ANGLE_TOL = 1e-8
MAX_ASPECT = 1e6


def _edges(edges: str) -> str:
    e = str(edges).lower()
    if e not in EDGE_TYPES:
        raise ValueError(f"edges must be three letters from 'p'/'d', got {edges!r}")
    return e


@dataclass(frozen=True, eq=False)
class GeodesicTriangle:
    p: Point
    q: Point
    r: Point
    edges: str = "ppp"

    def __post_init__(self):
        object.__setattr__(self, "edges", _edges(self.edges))
        gen = self.p.generator
        if not (self.q.generator == gen and self.r.generator == gen):
            raise ValueError("triangle vertices live on different manifolds")
        for na, a, nb, b in (("p", self.p, "q", self.q), ("q", self.q, "r", self.r),
                             ("r", self.r, "p", self.p)):
            if np.linalg.norm(a.theta - b.theta) <= VERTEX_SEPARATION:
                raise DegenerateVector(f"vertices {na} and {nb} coincide")

    @classmethod
    def from_theta(cls, gen: BregmanGenerator, p, q, r, edges: str = "ppp") -> "GeodesicTriangle":
        return cls(as_point(gen, p), as_point(gen, q), as_point(gen, r), edges)

    @property
    def generator(self) -> BregmanGenerator:
        return self.p.generator

    def vertices(self) -> tuple[Point, Point, Point]:
        return self.p, self.q, self.r

    def edge_list(self):
        """(start, end, tag) for the three edges."""
        return [(self.p, self.q, self.edges[0]), (self.q, self.r, self.edges[1]),
                (self.r, self.p, self.edges[2])]

    def with_edges(self, edges: str) -> "GeodesicTriangle":
        return GeodesicTriangle(self.p, self.q, self.r, edges)

    def to_dict(self) -> dict:
        return {"p": self.p.theta.tolist(), "q": self.q.theta.tolist(),
                "r": self.r.theta.tolist(), "edges": self.edges}

    @classmethod
    def from_dict(cls, gen: BregmanGenerator, obj: dict) -> "GeodesicTriangle":
        missing = [k for k in ("p", "q", "r") if k not in obj]
        if missing:
            raise ValueError(f"triangle JSON lacks vertices {missing}")
        return cls.from_theta(gen, obj["p"], obj["q"], obj["r"], obj.get("edges", "ppp"))


@dataclass(frozen=True)
class AngleReport:
    alpha_p: float
    alpha_q: float
    alpha_r: float

    @property
    def total(self) -> float:
        return self.alpha_p + self.alpha_q + self.alpha_r

    @property
    def excess(self) -> float:
        return self.total - np.pi

    def degrees(self) -> dict:
        return {k: float(np.degrees(v)) for k, v in self.as_dict(degrees=False).items()}

    def as_dict(self, degrees: bool = False) -> dict:
        out = {"alpha_p": self.alpha_p, "alpha_q": self.alpha_q, "alpha_r": self.alpha_r,
               "total": self.total, "excess": self.excess}
        if degrees:
            return {k: float(np.degrees(v)) for k, v in out.items()}
        return out


def edge_tangent(start: Point, end: Point, tag: str) -> TangentVector:
    """Velocity at ``start`` of the primal ('p') or dual ('d') geodesic toward ``end``."""
    if tag == "p":
        return TangentVector.from_contravariant(start, end.theta - start.theta)
    return TangentVector.from_covariant(start, end.eta - start.eta)


def _vertex_tangents(T: GeodesicTriangle):
    e_pq, e_qr, e_rp = T.edges
    return (
        (edge_tangent(T.p, T.q, e_pq), edge_tangent(T.p, T.r, e_rp)),
        (edge_tangent(T.q, T.r, e_qr), edge_tangent(T.q, T.p, e_pq)),
        (edge_tangent(T.r, T.p, e_rp), edge_tangent(T.r, T.q, e_qr)),
    )


def interior_angles(T: GeodesicTriangle) -> AngleReport:
    """Metric angles at p, q and r between the two incident edges."""
    a = [angle(u, v) for u, v in _vertex_tangents(T)]
    return AngleReport(*a)


def angle_sum(T: GeodesicTriangle) -> float:
    return interior_angles(T).total


def dual_triangle(T: GeodesicTriangle) -> GeodesicTriangle:
    flipped = "".join("d" if e == "p" else "p" for e in T.edges)
    return T.with_edges(flipped)


def orientation_signs(T: GeodesicTriangle) -> np.ndarray:
    """Signed turn direction at each vertex, measured in a metric-orthonormal frame.

    With g = L L^T (Cholesky), L^T maps tangents isometrically onto the
    Euclidean plane; the sign of the 2D cross product of the two edge
    tangents there says whether the interior angle is swept counterclockwise.
    """
    if T.generator.dim != 2:
        raise ValueError("orientation is defined here for 2D manifolds only")
    signs = []
    for u, v in _vertex_tangents(T):
        L = np.linalg.cholesky(u.base.metric())
        a, b = L.T @ u.contravariant, L.T @ v.contravariant
        signs.append(np.sign(a[0] * b[1] - a[1] * b[0]))
    return np.array(signs)


def orientation_consistent(T: GeodesicTriangle) -> bool:
    """True when T and its dual triangle turn the same way at all six corners."""
    s = np.concatenate([orientation_signs(T), orientation_signs(dual_triangle(T))])
    return bool(np.all(s == s[0]) and s[0] != 0)


# ---------------------------------------------------------------------------
# Right angles
# ---------------------------------------------------------------------------

def right_angle_flat(gen: BregmanGenerator, p, q) -> Flat:
    """theta-flat of all r whose primal edge from q meets the primal edge qp at a right angle."""
    p, q = as_point(gen, p), as_point(gen, q)
    d = p.theta - q.theta
    if np.linalg.norm(d) <= VERTEX_SEPARATION:
        raise DegenerateVector("p and q coincide")
    normal = gen._hessian(q.theta) @ d
    return Flat("theta", normal, float(q.theta @ normal))


def double_right_flats(gen: BregmanGenerator, p, q) -> tuple[Flat, Flat]:
    """The two theta-flats whose intersection holds every r with right angles at q and p."""
    return right_angle_flat(gen, p, q), right_angle_flat(gen, q, p)


def _right_angle_check(gen, p, q, r):
    T = GeodesicTriangle.from_theta(gen, p, q, r, "ppp")
    rep = interior_angles(T)
    return rep, max(abs(rep.alpha_p - np.pi / 2), abs(rep.alpha_q - np.pi / 2))


def solve_double_right(gen: BregmanGenerator, p, q) -> np.ndarray:
    """theta(r) making the primal triangle pqr right-angled at both p and q.

    The two right-angle flats are linear in theta(r); their 2x2 system is
    solved by Cramer's rule and the two angles are re-measured afterwards.
    """
    if gen.dim != 2:
        raise ValueError("solve_double_right needs a 2D manifold; use double_right_flats")
    fq, fp = double_right_flats(gen, p, q)
    A = np.array([fq.normal, fp.normal])
    b = np.array([fq.offset, fp.offset])
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if abs(det) < 1e-12 * np.sum(A * A):
        raise SingularSystem(f"right-angle flats are parallel (det={det:.3e})")
    r = np.array([(b[0] * A[1, 1] - A[0, 1] * b[1]) / det,
                  (A[0, 0] * b[1] - b[0] * A[1, 0]) / det])
    r = gen.check_theta(r, "theta_r")
    _, err = _right_angle_check(gen, p, q, r)
    if err > RIGHT_ANGLE_TOL:
        raise SingularSystem(f"Cramer solution misses the right angles by {err:.3e} rad")
    return r


def _angle_residuals(gen, p: Point, q: Point, alpha_q: float, alpha_p: float):
    cq, cp = np.cos(alpha_q), np.cos(alpha_p)

    def f(r):
        rp = Point.from_theta(gen, r)
        at_q = cosine(edge_tangent(q, p, "p"), edge_tangent(q, rp, "p"))
        at_p = cosine(edge_tangent(p, q, "p"), edge_tangent(p, rp, "p"))
        return np.array([at_q - cq, at_p - cp])

    return f


def solve_prescribed_angles(gen: BregmanGenerator, p, q, alpha_q: float, alpha_p: float,
                            initial, config: NewtonConfig | None = None) -> np.ndarray:
    """theta(r) such that the primal triangle pqr has the given angles at q and p."""
    if gen.dim != 2:
        raise ValueError("solve_prescribed_angles needs a 2D manifold")
    for name, a in (("alpha_q", alpha_q), ("alpha_p", alpha_p)):
        if not 0.0 < a < np.pi:
            raise ValueError(f"{name} must lie in (0, pi), got {a}")
    p, q = as_point(gen, p), as_point(gen, q)
    r0 = gen.check_theta(initial, "initial")
    f = _angle_residuals(gen, p, q, alpha_q, alpha_p)

    base = np.linalg.norm(p.theta - q.theta)
    reach = MAX_ASPECT * max(base, np.linalg.norm(r0 - q.theta))

    escaped = []

    def guard(r):
        if not gen.in_domain(r):
            return False
        # iterates may not run off to infinity, where every angle tends to its limit
        if np.linalg.norm(r - q.theta) >= reach:
            escaped.append(True)
            return False
        return (np.linalg.norm(r - p.theta) > VERTEX_SEPARATION
                and np.linalg.norm(r - q.theta) > VERTEX_SEPARATION)

    try:
        r = newton_solve(f, r0, config=config or NewtonConfig(), domain_guard=guard)
    except SingularJacobian as exc:
        raise NoConvergence(f"angle system has no regular solution here: {exc}") from exc
    except DomainError as exc:
        if escaped:
            raise NoConvergence("iterates diverge; the prescribed angles look infeasible") from exc
        raise
    rep = interior_angles(GeodesicTriangle(p, q, Point.from_theta(gen, r), "ppp"))
    err = max(abs(rep.alpha_q - alpha_q), abs(rep.alpha_p - alpha_p))
    if err > 1e-7:
        raise NoConvergence(f"achieved angles miss the targets by {err:.3e} rad")
    return r


# ---------------------------------------------------------------------------
# Triple right angles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Found:
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    max_residual: float
    start: int

    found = True


@dataclass(frozen=True)
class NotFound:
    best_residual: float
    starts_used: int
    best_vertices: tuple | None = None

    found = False


def _batched_cos(gen, a, b, c):
    """Cosine at a between the primal edges toward b and c, for stacked points."""
    H = gen._hessian(a)
    u, v = b - a, c - a
    Hu, Hv = np.einsum("nij,nj->ni", H, u), np.einsum("nij,nj->ni", H, v)
    uv = np.sum(u * Hv, axis=1)
    uu = np.sum(u * Hu, axis=1)
    vv = np.sum(v * Hv, axis=1)
    return uv / np.sqrt(uu * vv)


def search_triple_right(gen: BregmanGenerator, box=((0.0, 10.0), (0.0, 10.0)),
                        budget: int = 10_000, seed=0, tol: float = 1e-9,
                        config: NewtonConfig | None = None):
    """Multi-start search for a primal triangle with three right angles.

    Each start pins p and the first coordinate of q at seeded uniform draws
    from ``box`` and runs Newton on the three angle cosines in the remaining
    unknowns (q_y, r_x, r_y). Returns :class:`Found` for the best start whose
    residual is within ``tol`` with distinct in-box vertices, else
    :class:`NotFound`.
    """
    if gen.dim != 2:
        raise ValueError("search_triple_right needs a 2D manifold")
    budget = check_positive_int(budget, "budget")
    rng = check_random_state(seed)
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    if lo.shape != (2,) or not np.all(hi > lo):
        raise ValueError("box must be two (low, high) pairs with low < high")

    draws = rng.uniform(size=(budget, 6))
    P = lo + draws[:, 0:2] * (hi - lo)
    qx = lo[0] + draws[:, 2] * (hi[0] - lo[0])
    x0 = np.column_stack([lo[1] + draws[:, 3] * (hi[1] - lo[1]),
                          lo + draws[:, 4:6] * (hi - lo)])
    x0 = x0.reshape(budget, 3)

    def unpack(x, rows):
        q = np.column_stack([qx[rows], x[:, 0]])
        return P[rows], q, x[:, 1:3]

    def separated(p, q, r):
        sep = VERTEX_SEPARATION
        return ((np.linalg.norm(p - q, axis=1) > sep) & (np.linalg.norm(q - r, axis=1) > sep)
                & (np.linalg.norm(r - p, axis=1) > sep))

    def guard(x, rows):
        p, q, r = unpack(x, rows)
        return gen.in_domain(q) & gen.in_domain(r) & separated(p, q, r)

    def f(x, rows):
        p, q, r = unpack(x, rows)
        with np.errstate(all="ignore"):
            return np.column_stack([_batched_cos(gen, p, q, r), _batched_cos(gen, q, r, p),
                                    _batched_cos(gen, r, p, q)])

    keep = gen.in_domain(P) & guard(x0, np.arange(budget))
    rows = np.flatnonzero(keep)
    if rows.size == 0:
        return NotFound(best_residual=float("inf"), starts_used=0)

    res = newton_solve_batch(lambda x, idx: f(x, rows[idx]), x0[rows],
                             config=config or NewtonConfig(tol=tol * 1e-3),
                             domain_guard=lambda x, idx: guard(x, rows[idx]))
    p, q, r = unpack(res.x, rows)
    in_box = np.all((q > lo) & (q < hi) & (r > lo) & (r < hi), axis=1)
    ok = (res.residual <= tol) & in_box & separated(p, q, r)
    if np.any(ok):
        cand = np.flatnonzero(ok)
        best = cand[np.argmin(res.residual[cand])]
        return Found(p=p[best], q=q[best], r=r[best],
                     max_residual=float(res.residual[best]), start=int(rows[best]))
    if not np.any(np.isfinite(res.residual)):
        return NotFound(best_residual=float("inf"), starts_used=int(rows.size))
    b = int(np.argmin(np.where(np.isfinite(res.residual), res.residual, np.inf)))
    return NotFound(best_residual=float(res.residual[b]), starts_used=int(rows.size),
                    best_vertices=(p[b], q[b], r[b]))


# ---------------------------------------------------------------------------
# Simultaneous dual Pythagoras
# ---------------------------------------------------------------------------

def dual_pythagoras_flats(gen: BregmanGenerator, p, q) -> tuple[Flat, Flat]:
    """(eta-flat, theta-flat) through q on which each Pythagorean identity holds.

    An r on the eta-flat meets the primal edge qp orthogonally with a dual
    edge qr; an r on the theta-flat does the same with roles exchanged.
    """
    p, q = as_point(gen, p), as_point(gen, q)
    d_theta = p.theta - q.theta
    d_eta = p.eta - q.eta
    if np.linalg.norm(d_theta) <= VERTEX_SEPARATION:
        raise DegenerateVector("p and q coincide")
    return (Flat("eta", d_theta, float(d_theta @ q.eta)),
            Flat("theta", d_eta, float(d_eta @ q.theta)))


def solve_dual_pythagoras_is2d(p, q) -> np.ndarray:
    """theta(r) on 2D Itakura-Saito where both Pythagorean identities hold at q.

    Substituting the theta-flat line into the eta-flat equation gives a
    quadratic in r_x; one root is q itself and the other is returned.
    """
    gen = ItakuraSaito(2)
    p, q = as_point(gen, p), as_point(gen, q)
    t_pq = q.theta - p.theta
    e_pq = q.eta - p.eta
    if np.linalg.norm(t_pq) <= VERTEX_SEPARATION:
        raise DegenerateVector("p and q coincide")
    swap = abs(e_pq[1]) <= 1e-12 * np.max(np.abs(e_pq))
    order = [1, 0] if swap else [0, 1]
    tq, eq = q.theta[order], q.eta[order]
    tpq, epq = t_pq[order], e_pq[order]

    a = -epq[0] / epq[1]
    b = (epq @ tq) / epq[1]
    k = tpq @ eq
    A = -k * a
    B = -tpq[0] * a - tpq[1] - b * k
    C = -tpq[0] * b

    def far_from_q(x):
        r = np.array([x, a * x + b])
        return np.linalg.norm(r - tq) > ROOT_SEPARATION, r

    if abs(A) < 1e-14:
        if B == 0.0:
            raise DegenerateQuadratic("quadratic collapsed to a constant")
        far, r = far_from_q(-C / B)
        if not far:
            raise DegenerateQuadratic("leading coefficient vanishes and the linear root is q")
        roots = [r]
    else:
        roots = [r for far, r in map(far_from_q, solve_quadratic(A, B, C)) if far]
        if not roots:
            raise BothRootsAtQ("both roots of the quadratic coincide with q")
    r = max(roots, key=lambda z: np.linalg.norm(z - tq))
    r = r[order]
    return gen.check_theta(r, "theta_r")


def solve_dual_pythagoras(gen: BregmanGenerator, p, q, window=DEFAULT_WINDOW) -> list[np.ndarray]:
    """Generic 2D solve: points of both flats other than q, found by bracketing."""
    p, q = as_point(gen, p), as_point(gen, q)
    f_eta, f_theta = dual_pythagoras_flats(gen, p, q)
    pts = intersect_flats_2d(gen, f_theta, f_eta, window)
    return [x.theta for x in pts if np.linalg.norm(x.theta - q.theta) > ROOT_SEPARATION]


def dual_pythagoras_report(gen: BregmanGenerator, p, q, r) -> dict:
    """Both orthogonality bilinear forms at q (relative) and the Pythagoras report."""
    p, q, r = (as_point(gen, x) for x in (p, q, r))
    f_eta, f_theta = dual_pythagoras_flats(gen, p, q)
    rep: PythagorasReport = check_pythagoras(gen, p, q, r)
    return {"eta_flat": float(f_eta.relative_residual(r)),
            "theta_flat": float(f_theta.relative_residual(r)),
            "pythagoras": rep}
