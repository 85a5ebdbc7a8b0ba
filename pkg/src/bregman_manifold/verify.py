"""Seeded invariant suites: each check reports its worst residual against a tolerance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int, check_random_state
from .chart import (Point, TangentVector, dual_transport, inner_product, inner_product_forms,
                    lower_index, primal_transport, raise_index)
from .divergence import (bregman, check_pythagoras, dual_bregman, fenchel_young,
                         four_param_residual, jensen, jensen_bregman, parallelogram_residual,
                         three_param_residual)
from .exceptions import DegenerateVector
from .generator import BregmanGenerator, ItakuraSaito
from .triangle import GeodesicTriangle, angle_sum, dual_triangle, orientation_consistent

SUITES = ("identities", "transport", "pythagoras", "two-pi")
TWO_PI_TRIPLE = ((0.5, 0.5), (0.75, 0.75), (0.95, 0.25))


@dataclass
class CheckResult:
    name: str
    worst: float
    tol: float
    passed: bool
    skipped: bool = False
    detail: str = ""

    def line(self) -> str:
        status = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        text = f"{status} {self.name}: worst={self.worst:.3e} tol={self.tol:.1e}"
        return text + (f" ({self.detail})" if self.detail else "")


def _check(name, values, tol, detail=""):
    values = np.abs(np.asarray(values, dtype=float))
    worst = float(np.max(values)) if values.size else 0.0
    ok = bool(np.all(np.isfinite(values)) and worst < tol)
    return CheckResult(name, worst, tol, ok, detail=detail)


def _rel(a, b):
    return np.abs(a - b) / (1.0 + np.abs(a) + np.abs(b))


def random_spd(rng, dim: int) -> np.ndarray:
    A = rng.normal(size=(dim, dim))
    Q = A @ A.T + dim * np.eye(dim)
    return 0.5 * (Q + Q.T)


def identities_suite(gen: BregmanGenerator, n: int = 1000, seed=0) -> list[CheckResult]:
    n = check_positive_int(n, "n")
    rng = check_random_state(seed)
    t1, t2, t3, t4 = (gen.sample_theta(rng, n) for _ in range(4))
    e1, e2 = gen.gradient(t1), gen.gradient(t2)
    D = gen.dim
    out = [
        _check("three-parameter", three_param_residual(gen, t1, t2, t3, relative=True), 1e-10),
        _check("four-parameter", four_param_residual(gen, t1, t2, t3, t4, relative=True), 1e-10),
        _check("parallelogram", parallelogram_residual(gen, t1, t2, t3, relative=True), 1e-10),
        _check("jensen-bregman", _rel(jensen(gen, t1, t2), jensen_bregman(gen, t1, t2)), 1e-11),
        _check("duality", _rel(bregman(gen, t1, t2), dual_bregman(gen, e2, e1)), 1e-10),
        _check("fenchel-young", _rel(fenchel_young(gen, t1, e2), bregman(gen, t1, t2)), 1e-10),
        _check("fenchel-equality", gen.potential(t1) + gen.conjugate_potential(e1)
               - np.sum(t1 * e1, axis=-1), 1e-11),
        _check("crouzeix", np.max(np.abs(gen.hessian(t1) @ gen.conjugate_hessian(e1)
                                         - np.eye(D)), axis=(-2, -1)), 1e-9),
        _check("legendre-round-trip", np.max(np.abs(gen.conjugate_gradient(e1) - t1)
                                             / (1.0 + np.abs(t1)), axis=-1), 1e-10),
        _check("non-negativity", np.minimum(bregman(gen, t1, t2), 0.0), 1e-12),
    ]
    return out


def transport_suite(gen: BregmanGenerator, n: int = 1000, seed=0) -> list[CheckResult]:
    n = check_positive_int(n, "n")
    rng = check_random_state(seed)
    compat, forms, trips = [], [], []
    for _ in range(n):
        a, b = gen.sample_theta(rng, 2)
        p, q = Point.from_theta(gen, a), Point.from_theta(gen, b)
        u = TangentVector.from_contravariant(p, rng.normal(size=gen.dim))
        v = TangentVector.from_contravariant(p, rng.normal(size=gen.dim))
        g_p = inner_product(u, v)
        g_q = inner_product(primal_transport(u, q), dual_transport(v, q))
        compat.append(_rel(g_q, g_p))
        f = inner_product_forms(u, v)
        forms.append((f.max() - f.min()) / (1.0 + np.abs(f).max()))
        w = rng.normal(size=gen.dim)
        trips.append(np.max(np.abs(raise_index(p, lower_index(p, w)) - w)) / (1 + np.abs(w).max()))
    return [_check("metric-compatibility", compat, 1e-9),
            _check("inner-product-forms", forms, 1e-10),
            _check("raise-lower-round-trip", trips, 1e-10)]


def _orthogonal_eta(gen, rng, q: Point, direction: np.ndarray):
    """A dual-domain eta(r) with (eta(r) - eta(q)) orthogonal to ``direction``."""
    w = rng.normal(size=gen.dim)
    w -= direction * (w @ direction) / (direction @ direction)
    if np.linalg.norm(w) < 1e-12:
        return None
    w *= 0.5 * min(1.0, np.min(np.abs(q.eta)) + 1e-3) / np.linalg.norm(w)
    for _ in range(60):
        eta = q.eta + w
        if gen.in_dual_domain(eta):
            return eta
        w *= 0.5
    return None


def pythagoras_suite(gen: BregmanGenerator, n: int = 1000, seed=0) -> list[CheckResult]:
    """Residual/inner-product agreement, plus orthogonal triples moved along their edges.

    For an orthogonal triple, p slides along the primal edge qp and r along
    the dual edge qr; the primal identity must keep holding.
    """
    n = check_positive_int(n, "n")
    rng = check_random_state(seed)
    agree, ortho = [], []
    ts = (0.25, 0.5, 0.75)
    for _ in range(n):
        a, b, c = gen.sample_theta(rng, 3)
        try:
            rep = check_pythagoras(gen, a, b, c)
        except DegenerateVector:
            continue
        agree.append(abs(rep.primal_residual - rep.primal_cos) / rep.primal_scale)
        agree.append(abs(rep.dual_residual - rep.dual_cos) / rep.dual_scale)

        p, q = Point.from_theta(gen, a), Point.from_theta(gen, b)
        eta_r = _orthogonal_eta(gen, rng, q, p.theta - q.theta)
        if eta_r is None:
            continue
        r = Point.from_eta(gen, eta_r)
        for t in ts:
            pt = Point.from_theta(gen, (1 - t) * q.theta + t * p.theta)
            for t2 in ts:
                rt = Point.from_eta(gen, (1 - t2) * q.eta + t2 * r.eta)
                ortho.append(check_pythagoras(gen, pt, q, rt).primal_relative)
    return [_check("residual-equals-inner-product", agree, 1e-9),
            _check("orthogonal-triples-along-edges", ortho, 1e-10)]


def two_pi_suite(gen: BregmanGenerator, n: int = 100, seed=0, tol: float = 1e-6) -> list[CheckResult]:
    """Angle sums of a primal triangle and its dual adding up to 2 pi.

    Only meaningful on the 2D Itakura-Saito manifold; other manifolds are
    skipped. Random triangles whose primal and dual versions turn in
    opposite directions are counted and reported rather than failed.
    """
    if not (isinstance(gen, ItakuraSaito) and gen.dim == 2):
        return [CheckResult("two-pi", 0.0, tol, True, skipped=True,
                            detail="defined for the 2D Itakura-Saito manifold only")]
    n = check_positive_int(n, "n")
    rng = check_random_state(seed)
    T = GeodesicTriangle.from_theta(gen, *TWO_PI_TRIPLE)
    ref = angle_sum(T) + angle_sum(dual_triangle(T)) - 2 * np.pi
    errs, violations, inconsistent = [], 0, 0
    while len(errs) + inconsistent < n:
        try:
            T = GeodesicTriangle.from_theta(gen, *rng.uniform(0.0, 1.0, size=(3, 2)))
        except DegenerateVector:
            continue
        err = angle_sum(T) + angle_sum(dual_triangle(T)) - 2 * np.pi
        violations += abs(err) >= tol
        if orientation_consistent(T):
            errs.append(err)
        else:
            inconsistent += 1
    detail = f"{violations}/{n} random triangles violate; {inconsistent} have mismatched orientation"
    return [_check("two-pi-reference-triple", [ref], tol),
            _check("two-pi-orientation-consistent", errs, tol, detail)]


def run_suite(name: str, gen: BregmanGenerator, n: int | None = None, seed=0) -> list[CheckResult]:
    if name == "identities":
        return identities_suite(gen, n or 1000, seed)
    if name == "transport":
        return transport_suite(gen, n or 1000, seed)
    if name == "pythagoras":
        return pythagoras_suite(gen, n or 1000, seed)
    if name == "two-pi":
        return two_pi_suite(gen, n or 100, seed)
    raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
