"""Bregman divergences and the identities they satisfy.

All functions accept raw theta coordinates (vectorised over leading axes)
or :class:`~bregman_manifold.chart.Point` objects. The reverse divergence
D*(p:q) = D(q:p) is just an argument swap and gets no function of its own.

Identity residuals are returned raw by default; ``relative=True`` divides
by ``1 + sum of |terms|`` so one tolerance fits every coordinate range.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chart import Point, TangentVector, inner_product
from .generator import BregmanGenerator


def _theta(gen: BregmanGenerator, x, name="theta") -> np.ndarray:
    if isinstance(x, Point):
        return x.theta
    return gen.check_theta(x, name)


def _eta(gen: BregmanGenerator, x, name="eta") -> np.ndarray:
    if isinstance(x, Point):
        return x.eta
    return gen.check_eta(x, name)


def _finish(value, terms, relative):
    if not relative:
        return value
    scale = 1.0 + sum(np.abs(t) for t in terms)
    return value / scale


def bregman(gen: BregmanGenerator, theta1, theta2):
    """B_F(theta1 : theta2)."""
    return gen.divergence(_theta(gen, theta1, "theta1"), _theta(gen, theta2, "theta2"))


def dual_bregman(gen: BregmanGenerator, eta1, eta2):
    """B_{F*}(eta1 : eta2), equal to B_F(theta(eta2) : theta(eta1))."""
    return gen.dual_divergence(_eta(gen, eta1, "eta1"), _eta(gen, eta2, "eta2"))


def fenchel_young(gen: BregmanGenerator, theta1, eta2):
    """Canonical divergence F(theta1) + F*(eta2) - theta1 . eta2 in mixed coordinates."""
    t = _theta(gen, theta1, "theta1")
    e = _eta(gen, eta2, "eta2")
    return gen._potential(t) + gen._conjugate_potential(e) - np.sum(t * e, axis=-1)


def jensen(gen: BregmanGenerator, theta1, theta2):
    """Jensen gap (F(t1) + F(t2)) / 2 - F((t1 + t2) / 2)."""
    t1 = _theta(gen, theta1, "theta1")
    t2 = _theta(gen, theta2, "theta2")
    mid = 0.5 * (t1 + t2)
    return 0.5 * (gen._potential(t1) + gen._potential(t2)) - gen._potential(mid)


def jensen_bregman(gen: BregmanGenerator, theta1, theta2):
    """Mean Bregman divergence of the two points to their midpoint."""
    t1 = _theta(gen, theta1, "theta1")
    t2 = _theta(gen, theta2, "theta2")
    mid = 0.5 * (t1 + t2)
    return 0.5 * (gen.divergence(t1, mid) + gen.divergence(t2, mid))


def three_param_residual(gen: BregmanGenerator, theta1, theta2, theta3, relative=False):
    """B(1:2) - B(1:3) - B(3:2) + (t1 - t3) . (grad F(t2) - grad F(t3))."""
    t1 = _theta(gen, theta1, "theta1")
    t2 = _theta(gen, theta2, "theta2")
    t3 = _theta(gen, theta3, "theta3")
    terms = (gen.divergence(t1, t2), -gen.divergence(t1, t3), -gen.divergence(t3, t2),
             np.sum((t1 - t3) * (gen._gradient(t2) - gen._gradient(t3)), axis=-1))
    return _finish(sum(terms), terms, relative)


def four_param_residual(gen: BregmanGenerator, p1, p2, q1, q2, relative=False):
    """B(p1:q1) + B(p2:q2) - B(p1:q2) - B(p2:q1) - (p2 - p1) . (eta(q1) - eta(q2))."""
    p1 = _theta(gen, p1, "p1")
    p2 = _theta(gen, p2, "p2")
    q1 = _theta(gen, q1, "q1")
    q2 = _theta(gen, q2, "q2")
    terms = (gen.divergence(p1, q1), gen.divergence(p2, q2),
             -gen.divergence(p1, q2), -gen.divergence(p2, q1),
             -np.sum((p2 - p1) * (gen._gradient(q1) - gen._gradient(q2)), axis=-1))
    return _finish(sum(terms), terms, relative)


def parallelogram_residual(gen: BregmanGenerator, theta1, theta2, theta, relative=False):
    """B(t1:t) + B(t2:t) - 2 J(t1, t2) - 2 B((t1 + t2) / 2 : t)."""
    t1 = _theta(gen, theta1, "theta1")
    t2 = _theta(gen, theta2, "theta2")
    t = _theta(gen, theta, "theta")
    mid = 0.5 * (t1 + t2)
    terms = (gen.divergence(t1, t), gen.divergence(t2, t),
             -2.0 * jensen(gen, t1, t2), -2.0 * gen.divergence(mid, t))
    return _finish(sum(terms), terms, relative)


def _classify(value: float, tol: float) -> str:
    if abs(value) <= tol:
        return "right"
    return "acute" if value > 0 else "obtuse"


@dataclass(frozen=True)
class PythagorasReport:
    """Pythagorean residuals at q and the inner products that predict them.

    ``primal_residual`` is D(p:q) + D(q:r) - D(p:r) and ``primal_cos`` the
    inner product at q of the primal tangent toward p with the dual tangent
    toward r; the ``dual_`` fields swap the roles of the two geodesics.
    Residual and inner product agree identically, so their sign tells
    whether the corresponding angle at q is acute, right or obtuse.
    """

    primal_residual: float
    dual_residual: float
    primal_cos: float
    dual_cos: float
    primal_scale: float
    dual_scale: float

    @property
    def primal_relative(self) -> float:
        return self.primal_residual / self.primal_scale

    @property
    def dual_relative(self) -> float:
        return self.dual_residual / self.dual_scale

    def primal_class(self, tol: float = 1e-9) -> str:
        return _classify(self.primal_relative, tol)

    def dual_class(self, tol: float = 1e-9) -> str:
        return _classify(self.dual_relative, tol)

    def holds(self, tol: float = 1e-9) -> bool:
        """Both Pythagorean identities hold to ``tol`` relative to their scales."""
        return abs(self.primal_relative) < tol and abs(self.dual_relative) < tol

    def as_dict(self) -> dict:
        return {
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "primal_cos": self.primal_cos,
            "dual_cos": self.dual_cos,
            "primal_relative": self.primal_relative,
            "dual_relative": self.dual_relative,
        }


def check_pythagoras(gen: BregmanGenerator, p, q, r) -> PythagorasReport:
    p, q, r = (x if isinstance(x, Point) else Point.from_theta(gen, x) for x in (p, q, r))
    d_pq = float(gen.divergence(p.theta, q.theta))
    d_qr = float(gen.divergence(q.theta, r.theta))
    d_pr = float(gen.divergence(p.theta, r.theta))
    d_qp = float(gen.divergence(q.theta, p.theta))
    d_rq = float(gen.divergence(r.theta, q.theta))
    d_rp = float(gen.divergence(r.theta, p.theta))

    v_qp = TangentVector.from_contravariant(q, p.theta - q.theta)
    v_qr = TangentVector.from_contravariant(q, r.theta - q.theta)
    w_qp = TangentVector.from_covariant(q, p.eta - q.eta)
    w_qr = TangentVector.from_covariant(q, r.eta - q.eta)

    return PythagorasReport(
        primal_residual=d_pq + d_qr - d_pr,
        dual_residual=d_qp + d_rq - d_rp,
        primal_cos=inner_product(v_qp, w_qr),
        dual_cos=inner_product(w_qp, v_qr),
        primal_scale=1.0 + abs(d_pq) + abs(d_qr) + abs(d_pr),
        dual_scale=1.0 + abs(d_qp) + abs(d_rq) + abs(d_rp),
    )
