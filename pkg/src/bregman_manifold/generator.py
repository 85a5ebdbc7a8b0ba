"""Bregman generators: a convex potential together with its Legendre dual.

Every generator exposes six maps, all vectorised over leading axes
(coordinates live on the last axis):

* ``potential`` F, ``gradient`` (theta -> eta), ``hessian`` (the metric),
* ``conjugate_potential`` F*, ``conjugate_gradient`` (eta -> theta),
  ``conjugate_hessian`` (the dual metric).

Four closed-form manifolds are built in; :class:`CustomGenerator` derives
whatever maps a user leaves out.
"""
from __future__ import annotations

import json
from typing import Callable

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ._validation import as_coords, check_positive_int, first_violation
from .exceptions import DomainError, NoConvergence, SingularJacobian
from .numeric import NewtonConfig, fd_gradient, fd_hessian, fd_jacobian, newton_solve

EPS_DOMAIN = 1e-12

MAHALANOBIS = "mahalanobis"
EXTENDED_KL = "extended_kl"
ITAKURA_SAITO = "itakura_saito"
MULTINOULLI = "multinoulli"
KINDS = (MAHALANOBIS, EXTENDED_KL, ITAKURA_SAITO, MULTINOULLI)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


class BregmanGenerator:
    """Base class. Subclasses implement the underscored raw maps."""

    kind = "custom"

    def __init__(self, dim: int):
        self.dim = check_positive_int(dim, "dim")

    # -- domain handling ---------------------------------------------------

    def _primal_violation(self, theta: np.ndarray) -> tuple[np.ndarray, str] | None:
        return None

    def _dual_violation(self, eta: np.ndarray) -> tuple[np.ndarray, str] | None:
        return None

    def check_theta(self, theta, name: str = "theta") -> np.ndarray:
        """Validate primal coordinates and return them as a float array."""
        theta = as_coords(theta, self.dim, name)
        bad = self._primal_violation(theta)
        if bad is not None:
            first_violation(bad[0], theta, name, bad[1])
        return theta

    def check_eta(self, eta, name: str = "eta") -> np.ndarray:
        eta = as_coords(eta, self.dim, name)
        bad = self._dual_violation(eta)
        if bad is not None:
            first_violation(bad[0], eta, name, bad[1])
        return eta

    def in_domain(self, theta) -> np.ndarray | bool:
        """Boolean mask (over leading axes) of points inside the primal domain."""
        theta = np.asarray(theta, dtype=float)
        ok = np.all(np.isfinite(theta), axis=-1)
        bad = self._primal_violation(np.where(np.isfinite(theta), theta, 0.0))
        if bad is not None:
            mask = bad[0]
            if mask.shape == theta.shape:
                mask = np.any(mask, axis=-1)
            ok &= ~mask
        return ok

    def in_dual_domain(self, eta) -> np.ndarray | bool:
        eta = np.asarray(eta, dtype=float)
        ok = np.all(np.isfinite(eta), axis=-1)
        bad = self._dual_violation(np.where(np.isfinite(eta), eta, 0.0))
        if bad is not None:
            mask = bad[0]
            if mask.shape == eta.shape:
                mask = np.any(mask, axis=-1)
            ok &= ~mask
        return ok

    # -- public maps -------------------------------------------------------

    def potential(self, theta):
        return self._potential(self.check_theta(theta))

    def gradient(self, theta) -> np.ndarray:
        return self._gradient(self.check_theta(theta))

    def hessian(self, theta) -> np.ndarray:
        return self._hessian(self.check_theta(theta))

    def conjugate_potential(self, eta):
        return self._conjugate_potential(self.check_eta(eta))

    def conjugate_gradient(self, eta) -> np.ndarray:
        return self._conjugate_gradient(self.check_eta(eta))

    def conjugate_hessian(self, eta) -> np.ndarray:
        return self._conjugate_hessian(self.check_eta(eta))

    # -- divergences (closed forms may override) ----------------------------

    def divergence(self, theta1, theta2):
        """Bregman divergence ``F(t1) - F(t2) - <t1 - t2, grad F(t2)>``."""
        t1 = self.check_theta(theta1, "theta1")
        t2 = self.check_theta(theta2, "theta2")
        return self._potential(t1) - self._potential(t2) - _dot(t1 - t2, self._gradient(t2))

    def dual_divergence(self, eta1, eta2):
        e1 = self.check_eta(eta1, "eta1")
        e2 = self.check_eta(eta2, "eta2")
        return (self._conjugate_potential(e1) - self._conjugate_potential(e2)
                - _dot(e1 - e2, self._conjugate_gradient(e2)))

    # -- misc --------------------------------------------------------------

    def sample_theta(self, rng: np.random.Generator, size: int | tuple = ()) -> np.ndarray:
        """Draw well-conditioned interior points, used by property suites."""
        shape = (size,) if isinstance(size, int) else tuple(size)
        return rng.normal(size=shape + (self.dim,))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}

    def __eq__(self, other):
        if not isinstance(other, BregmanGenerator):
            return NotImplemented
        if self is other:
            return True
        return (type(self) is type(other) and self.kind != "custom"
                and self.to_dict() == other.to_dict())

    def __hash__(self):
        return hash((self.kind, self.dim))

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class Mahalanobis(BregmanGenerator):
    """F(theta) = 1/2 theta^T Q theta. Self-dual; Q = I gives Euclidean geometry."""

    kind = MAHALANOBIS

    def __init__(self, q):
        q = np.array(q, dtype=float, ndmin=2)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError(f"q must be a square matrix, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("q must be finite")
        if np.max(np.abs(q - q.T)) != 0.0:
            raise ValueError("q must be exactly symmetric")
        try:
            self._cho = cho_factor(q, lower=True)
        except np.linalg.LinAlgError as exc:
            raise ValueError("q must be positive definite") from exc
        if np.any(np.diag(self._cho[0]) <= 0):
            raise ValueError("q must be positive definite")
        super().__init__(q.shape[0])
        q.setflags(write=False)
        self.q = q
        q_inv = cho_solve(self._cho, np.eye(self.dim))
        self._q_inv = 0.5 * (q_inv + q_inv.T)
        self._q_inv.setflags(write=False)

    def _solve(self, eta):
        flat = eta.reshape(-1, self.dim).T
        return cho_solve(self._cho, flat).T.reshape(eta.shape)

    def _potential(self, theta):
        return 0.5 * _dot(theta, theta @ self.q)

    def _gradient(self, theta):
        return theta @ self.q

    def _hessian(self, theta):
        return np.broadcast_to(self.q, theta.shape[:-1] + (self.dim, self.dim)).copy()

    def _conjugate_potential(self, eta):
        return 0.5 * _dot(eta, self._solve(eta))

    def _conjugate_gradient(self, eta):
        return self._solve(eta)

    def _conjugate_hessian(self, eta):
        return np.broadcast_to(self._q_inv, eta.shape[:-1] + (self.dim, self.dim)).copy()

    def divergence(self, theta1, theta2):
        d = self.check_theta(theta1, "theta1") - self.check_theta(theta2, "theta2")
        return 0.5 * _dot(d, d @ self.q)

    def dual_divergence(self, eta1, eta2):
        d = self.check_eta(eta1, "eta1") - self.check_eta(eta2, "eta2")
        return 0.5 * _dot(d, self._solve(d))

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "q": self.q.tolist()}

    def __repr__(self):
        return f"Mahalanobis(q={self.q.tolist()})"


def euclidean(dim: int) -> Mahalanobis:
    return Mahalanobis(np.eye(check_positive_int(dim, "dim")))


class _SeparablePositive(BregmanGenerator):
    def _primal_violation(self, theta):
        return theta <= EPS_DOMAIN, f"theta > {EPS_DOMAIN:g} ({self.kind} domain)"

    def sample_theta(self, rng, size=()):
        shape = (size,) if isinstance(size, int) else tuple(size)
        return np.exp(rng.uniform(-2.0, 2.0, size=shape + (self.dim,)))

    @staticmethod
    def _diag(values):
        out = np.zeros(values.shape + (values.shape[-1],))
        idx = np.arange(values.shape[-1])
        out[..., idx, idx] = values
        return out


class ExtendedKL(_SeparablePositive):
    """Extended Shannon negentropy, F(theta) = sum theta log theta - theta."""

    kind = EXTENDED_KL

    def _potential(self, theta):
        return np.sum(theta * np.log(theta) - theta, axis=-1)

    def _gradient(self, theta):
        return np.log(theta)

    def _hessian(self, theta):
        return self._diag(1.0 / theta)

    def _conjugate_potential(self, eta):
        return np.sum(np.exp(eta), axis=-1)

    def _conjugate_gradient(self, eta):
        return np.exp(eta)

    def _conjugate_hessian(self, eta):
        return self._diag(np.exp(eta))

    def divergence(self, theta1, theta2):
        t1 = self.check_theta(theta1, "theta1")
        t2 = self.check_theta(theta2, "theta2")
        return np.sum(t1 * np.log(t1 / t2) + t2 - t1, axis=-1)


class ItakuraSaito(_SeparablePositive):
    """Burg negentropy, F(theta) = -sum log theta; its divergence is Itakura-Saito."""

    kind = ITAKURA_SAITO

    def _dual_violation(self, eta):
        return eta >= -EPS_DOMAIN, f"eta < {-EPS_DOMAIN:g} ({self.kind} dual domain)"

    def _potential(self, theta):
        return -np.sum(np.log(theta), axis=-1)

    def _gradient(self, theta):
        return -1.0 / theta

    def _hessian(self, theta):
        return self._diag(1.0 / theta ** 2)

    def _conjugate_potential(self, eta):
        return -self.dim - np.sum(np.log(-eta), axis=-1)

    def _conjugate_gradient(self, eta):
        return -1.0 / eta

    def _conjugate_hessian(self, eta):
        return self._diag(1.0 / eta ** 2)

    def divergence(self, theta1, theta2):
        ratio = self.check_theta(theta1, "theta1") / self.check_theta(theta2, "theta2")
        return np.sum((ratio - 1.0) - np.log(ratio), axis=-1)

    def dual_divergence(self, eta1, eta2):
        ratio = self.check_eta(eta1, "eta1") / self.check_eta(eta2, "eta2")
        return np.sum((ratio - 1.0) - np.log(ratio), axis=-1)


class Multinoulli(BregmanGenerator):
    """Log-normalizer of the categorical family with D + 1 outcomes."""

    kind = MULTINOULLI

    def _dual_violation(self, eta):
        rest = 1.0 - np.sum(eta, axis=-1, keepdims=True)
        mask = (eta <= EPS_DOMAIN) | (rest <= EPS_DOMAIN)
        return mask, f"eta > {EPS_DOMAIN:g} and sum(eta) < 1 - {EPS_DOMAIN:g}"

    @staticmethod
    def _shifted(theta):
        # log(1 + sum exp theta) with the largest exponent (including the implicit 0) factored out
        m = np.maximum(np.max(theta, axis=-1, keepdims=True), 0.0)
        e = np.exp(theta - m)
        z = np.exp(-m) + np.sum(e, axis=-1, keepdims=True)
        return m, e, z

    def _potential(self, theta):
        m, _, z = self._shifted(theta)
        return (m + np.log(z))[..., 0]

    def _gradient(self, theta):
        _, e, z = self._shifted(theta)
        return e / z

    def _hessian(self, theta):
        eta = self._gradient(theta)
        hess = -eta[..., :, None] * eta[..., None, :]
        idx = np.arange(self.dim)
        hess[..., idx, idx] += eta
        return hess

    def _conjugate_potential(self, eta):
        rest = 1.0 - np.sum(eta, axis=-1)
        return np.sum(eta * np.log(eta), axis=-1) + rest * np.log(rest)

    def _conjugate_gradient(self, eta):
        rest = 1.0 - np.sum(eta, axis=-1, keepdims=True)
        return np.log(eta / rest)

    def _conjugate_hessian(self, eta):
        rest = 1.0 - np.sum(eta, axis=-1)
        hess = np.broadcast_to((1.0 / rest)[..., None, None],
                               eta.shape[:-1] + (self.dim, self.dim)).copy()
        idx = np.arange(self.dim)
        hess[..., idx, idx] += 1.0 / eta
        return hess


class CustomGenerator(BregmanGenerator):
    """A generator from user callables; any missing map is derived numerically.

    Only ``potential`` is required. Gradients and Hessians fall back to
    central differences; the conjugate gradient inverts ``gradient`` by
    Newton's method (tolerance 1e-12, at most 100 iterations) starting from
    ``theta0``; the conjugate Hessian is the inverse primal Hessian.
    Domain predicates default to "all finite points".
    """

    def __init__(self, dim: int, potential: Callable, gradient: Callable | None = None,
                 hessian: Callable | None = None, conjugate_potential: Callable | None = None,
                 conjugate_gradient: Callable | None = None,
                 conjugate_hessian: Callable | None = None,
                 domain: Callable | None = None, dual_domain: Callable | None = None,
                 theta0=None):
        super().__init__(dim)
        self._f = potential
        self._grad = gradient
        self._hess = hessian
        self._fstar = conjugate_potential
        self._gradstar = conjugate_gradient
        self._hessstar = conjugate_hessian
        self._domain = domain
        self._dual_domain = dual_domain
        self._theta0 = np.zeros(self.dim) if theta0 is None else as_coords(theta0, self.dim)

    def _primal_violation(self, theta):
        if self._domain is None:
            return None
        ok = np.array([bool(self._domain(t)) for t in theta.reshape(-1, self.dim)])
        mask = np.broadcast_to(~ok.reshape(theta.shape[:-1])[..., None], theta.shape)
        return mask, "the user-supplied domain"

    def _dual_violation(self, eta):
        if self._dual_domain is None:
            return None
        ok = np.array([bool(self._dual_domain(e)) for e in eta.reshape(-1, self.dim)])
        mask = np.broadcast_to(~ok.reshape(eta.shape[:-1])[..., None], eta.shape)
        return mask, "the user-supplied dual domain"

    def _rowwise(self, fn, x, out_shape):
        flat = x.reshape(-1, self.dim)
        vals = np.array([fn(row) for row in flat], dtype=float)
        return vals.reshape(x.shape[:-1] + out_shape)

    def _potential(self, theta):
        return self._rowwise(lambda t: float(self._f(t)), theta, ())

    def _gradient(self, theta):
        if self._grad is not None:
            return self._rowwise(lambda t: np.asarray(self._grad(t), float), theta, (self.dim,))
        return self._rowwise(lambda t: fd_gradient(self._f, t), theta, (self.dim,))

    def _hessian(self, theta):
        dd = (self.dim, self.dim)
        if self._hess is not None:
            return self._rowwise(lambda t: np.asarray(self._hess(t), float), theta, dd)
        if self._grad is not None:
            def jac(t):
                j = fd_jacobian(self._grad, t)
                return 0.5 * (j + j.T)
            return self._rowwise(jac, theta, dd)
        return self._rowwise(lambda t: fd_hessian(self._f, t), theta, dd)

    def _invert_gradient(self, eta_row):
        guard = None
        if self._domain is not None:
            guard = lambda t: bool(self._domain(t))  # noqa: E731
        return newton_solve(lambda t: self._gradient(t) - eta_row, self._theta0,
                            jac=lambda t: self._hessian(t),
                            config=NewtonConfig(tol=1e-12, max_iter=100), domain_guard=guard)

    def _conjugate_gradient(self, eta):
        if self._gradstar is not None:
            return self._rowwise(lambda e: np.asarray(self._gradstar(e), float), eta, (self.dim,))
        try:
            return self._rowwise(self._invert_gradient, eta, (self.dim,))
        except (NoConvergence, SingularJacobian) as exc:
            raise DomainError(f"cannot invert the gradient at eta={eta.tolist()}: {exc}") from exc

    def _conjugate_potential(self, eta):
        if self._fstar is not None:
            return self._rowwise(lambda e: float(self._fstar(e)), eta, ())
        theta = self._conjugate_gradient(eta)
        return _dot(eta, theta) - self._potential(theta)

    def _conjugate_hessian(self, eta):
        if self._hessstar is not None:
            return self._rowwise(lambda e: np.asarray(self._hessstar(e), float), eta,
                                 (self.dim, self.dim))
        return np.linalg.inv(self._hessian(self._conjugate_gradient(eta)))

    def to_dict(self):
        raise TypeError("custom generators cannot be serialised")


def make_generator(kind: str, dim: int | None = None, q=None) -> BregmanGenerator:
    """Build a built-in generator by kind name."""
    kind = str(kind).lower().replace("-", "_")
    if kind == MAHALANOBIS:
        if q is None:
            if dim is None:
                raise ValueError("mahalanobis needs q or dim")
            q = np.eye(check_positive_int(dim, "dim"))
        gen = Mahalanobis(q)
        if dim is not None and gen.dim != dim:
            raise ValueError(f"q is {gen.dim}x{gen.dim} but dim={dim}")
        return gen
    if dim is None:
        raise ValueError(f"{kind} needs dim")
    if kind == EXTENDED_KL:
        return ExtendedKL(dim)
    if kind == ITAKURA_SAITO:
        return ItakuraSaito(dim)
    if kind == MULTINOULLI:
        return Multinoulli(dim)
    raise ValueError(f"unknown generator kind {kind!r}; expected one of {KINDS}")


def generator_from_dict(obj: dict) -> BregmanGenerator:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError("generator JSON must be an object with a 'kind' field")
    return make_generator(obj["kind"], obj.get("dim"), obj.get("q"))


def generator_from_json(text: str) -> BregmanGenerator:
    return generator_from_dict(json.loads(text))
