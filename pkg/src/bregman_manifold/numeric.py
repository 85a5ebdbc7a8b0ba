"""Small numeric kernels: Lambert W, stable quadratics, damped Newton, finite differences."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import DomainError, NoConvergence, SingularJacobian

INV_E = math.exp(-1.0)
# inputs this far below -1/e are rounding noise and get clamped onto the branch point
BRANCH_SLACK = 1e-16

_HALLEY_TOL = 1e-15
_HALLEY_MAX_ITER = 50


# ---------------------------------------------------------------------------
# Lambert W
# ---------------------------------------------------------------------------

def _branch_point_offset(a: float) -> float:
    """Return p = sqrt(2 (e a + 1)), the natural expansion variable at -1/e."""
    q = math.e * a + 1.0
    return math.sqrt(2.0 * q) if q > 0.0 else 0.0


def _branch_series(p: float) -> float:
    # Puiseux expansion around the branch point; p > 0 gives W0, p < 0 gives W-1.
    return (-1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3 - 43.0 / 540.0 * p ** 4
            + 769.0 / 17280.0 * p ** 5 - 221.0 / 8505.0 * p ** 6)


def _halley(w: float, a: float) -> float:
    for _ in range(_HALLEY_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - a
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= dw
        if abs(dw) <= _HALLEY_TOL * (1.0 + abs(w)):
            break
    return w


def _clamp_to_branch(a: float, name: str) -> float:
    if math.isnan(a):
        raise DomainError(f"{name}: argument is NaN")
    if a < -INV_E:
        if a >= -INV_E - BRANCH_SLACK:
            return -INV_E
        raise DomainError(f"{name}: argument {a!r} is below -1/e")
    return a


def lambert_w0(a: float) -> float:
    """Principal branch W0 of the Lambert W function (``w e^w = a``, ``w >= -1``).

    Uses a branch-point series or a logarithmic asymptote as the initial
    guess, then Halley iteration.
    """
    a = _clamp_to_branch(float(a), "lambert_w0")
    if a == 0.0:
        return 0.0
    if math.isinf(a):
        return math.inf
    p = _branch_point_offset(a)
    if p < 1e-3:
        return _branch_series(p)
    if a < -0.25:
        w = _branch_series(p)
    elif a < 3.0:
        w = math.log1p(a)
    else:
        la = math.log(a)
        lla = math.log(la)
        w = la - lla + lla / la
    return _halley(w, a)


def lambert_w_minus1(a: float) -> float:
    """Lower real branch W-1 of the Lambert W function, defined on [-1/e, 0)."""
    a = _clamp_to_branch(float(a), "lambert_w_minus1")
    if a >= 0.0:
        raise DomainError(f"lambert_w_minus1: argument {a!r} must be negative")
    p = _branch_point_offset(a)
    if p < 1e-3:
        return _branch_series(-p)
    if a < -0.25:
        w = _branch_series(-p)
    else:
        l1 = math.log(-a)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1
    return _halley(w, a)


# ---------------------------------------------------------------------------
# Quadratic equations
# ---------------------------------------------------------------------------

def solve_quadratic(A: float, B: float, C: float) -> tuple[float, ...]:
    """Real roots of ``A x^2 + B x + C = 0`` in ascending order.

    The cancellation-free form ``q = -(B + sign(B) sqrt(disc)) / 2`` gives the
    roots ``q / A`` and ``C / q``. ``A == 0`` falls back to the linear root.
    """
    A, B, C = float(A), float(B), float(C)
    if A == 0.0:
        if B == 0.0:
            return ()
        return (-C / B,)
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        return ()
    if disc == 0.0:
        return (-B / (2.0 * A),)
    q = -0.5 * (B + math.copysign(math.sqrt(disc), B))
    roots = sorted((q / A, C / q))
    return tuple(roots)


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

def _fd_steps(x: np.ndarray, h) -> np.ndarray:
    if h is None:
        return 1e-5 * (1.0 + np.abs(x))
    return np.broadcast_to(np.asarray(h, dtype=float), x.shape).copy()


def fd_gradient(f: Callable, x, h=None) -> np.ndarray:
    """Central-difference gradient of a scalar function."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    steps = _fd_steps(x, h)
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = steps[i]
        grad[i] = (f(x + e) - f(x - e)) / (2.0 * steps[i])
    return grad


def fd_jacobian(f: Callable, x, h=None) -> np.ndarray:
    """Central-difference Jacobian of a vector function, shape (m, n)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    steps = _fd_steps(x, h)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = steps[i]
        cols.append((np.atleast_1d(f(x + e)) - np.atleast_1d(f(x - e))) / (2.0 * steps[i]))
    return np.stack(cols, axis=-1)


def fd_hessian(f: Callable, x, h=None) -> np.ndarray:
    """Central-difference Hessian of a scalar function (symmetrised)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    steps = _fd_steps(x, h)
    n = x.size
    hess = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = steps[i]
        for j in range(i, n):
            ej = np.zeros(n)
            ej[j] = steps[j]
            val = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (
                4.0 * steps[i] * steps[j])
            hess[i, j] = hess[j, i] = val
    return hess


# ---------------------------------------------------------------------------
# Damped Newton
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-12
    max_iter: int = 200
    damping: int = 30

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.damping < 0:
            raise ValueError("damping must be >= 0")


def _newton_jacobian(f, x):
    return fd_jacobian(f, x, h=1e-7 * (1.0 + np.abs(x)))


def _singular(J: np.ndarray) -> bool:
    det = np.linalg.det(J)
    scale = np.prod(np.max(np.abs(J), axis=-1))
    return not np.isfinite(det) or abs(det) <= 1e-14 * scale


def newton_solve(f: Callable, x0, jac: Callable | None = None,
                 config: NewtonConfig | None = None,
                 domain_guard: Callable | None = None):
    """Solve ``f(x) = 0`` for a small square system by damped Newton.

    Parameters
    ----------
    f : callable
        Maps a k-vector (k <= 6) to a k-vector.
    x0 : array_like
        Starting point. A scalar start returns a scalar root.
    jac : callable, optional
        Analytic Jacobian; central differences are used when omitted.
    config : NewtonConfig, optional
    domain_guard : callable, optional
        Predicate on trial iterates. Steps failing it are halved up to
        ``config.damping`` times.

    Raises
    ------
    NoConvergence
        The iteration budget ran out or the line search stalled.
    SingularJacobian
        ``|det J|`` fell below ``1e-14`` times the product of its row scales.
    DomainError
        Every halved step left the guarded domain.
    """
    cfg = config or NewtonConfig()
    scalar = np.ndim(x0) == 0
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    if x.size > 6:
        raise ValueError("newton_solve handles systems of at most 6 unknowns")
    if domain_guard is not None:
        guard = domain_guard
        domain_guard = lambda z: bool(guard(z[0] if scalar else z))  # noqa: E731
        if not domain_guard(x):
            raise DomainError("newton_solve: starting point fails the domain guard")

    def F(z):
        return np.atleast_1d(np.asarray(f(z[0] if scalar else z), dtype=float))

    def J(z):
        if jac is None:
            return _newton_jacobian(F, z)
        return np.atleast_2d(np.asarray(jac(z[0] if scalar else z), dtype=float))

    fx = F(x)
    norm = np.max(np.abs(fx))
    for _ in range(cfg.max_iter):
        if norm <= cfg.tol:
            break
        Jx = J(x)
        if _singular(Jx):
            raise SingularJacobian("newton_solve: Jacobian is numerically singular")
        step = np.linalg.solve(Jx, -fx)
        t = 1.0
        accepted = False
        saw_domain = False
        for _ in range(cfg.damping + 1):
            trial = x + t * step
            if domain_guard is None or domain_guard(trial):
                saw_domain = True
                ft = F(trial)
                nt = np.max(np.abs(ft))
                if np.isfinite(nt) and (nt < norm or nt <= cfg.tol):
                    x, fx, norm = trial, ft, nt
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            if not saw_domain:
                raise DomainError("newton_solve: every damped step left the domain")
            raise NoConvergence(f"newton_solve: line search stalled at residual {norm:.3e}")
    if norm > cfg.tol:
        raise NoConvergence(f"newton_solve: residual {norm:.3e} after {cfg.max_iter} iterations")
    return float(x[0]) if scalar else x


@dataclass
class BatchNewtonResult:
    x: np.ndarray
    residual: np.ndarray
    converged: np.ndarray
    iterations: int


def newton_solve_batch(f: Callable, x0, config: NewtonConfig | None = None,
                       domain_guard: Callable | None = None) -> BatchNewtonResult:
    """Run independent damped Newton iterations on N starts at once.

    ``f(x, rows)`` maps an (m, k) array of iterates to an (m, k) residual
    array, where ``rows`` holds the indices of those iterates among the N
    starts (so per-start constants can be looked up). ``domain_guard(x,
    rows)`` returns a boolean mask of length m. Rows whose
    Jacobian turns singular, or whose line search stalls, are frozen where
    they stand. Every row is processed exactly as if solved alone, so the
    result does not depend on the batch composition.
    """
    cfg = config or NewtonConfig()
    x = np.array(x0, dtype=float, copy=True)
    n, k = x.shape
    all_rows = np.arange(n)
    fx = f(x, all_rows)
    norm = np.max(np.abs(fx), axis=1)
    norm[~np.isfinite(norm)] = np.inf
    active = np.isfinite(norm)
    if domain_guard is not None:
        active &= domain_guard(x, all_rows)
    it = 0
    for it in range(1, cfg.max_iter + 1):
        active &= norm > cfg.tol
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        xa = x[idx]
        fa = fx[idx]
        steps = 1e-7 * (1.0 + np.abs(xa))
        cols = []
        for j in range(k):
            e = np.zeros_like(xa)
            e[:, j] = steps[:, j]
            cols.append((f(xa + e, idx) - f(xa - e, idx)) / (2.0 * steps[:, j:j + 1]))
        Jac = np.stack(cols, axis=-1)
        with np.errstate(all="ignore"):
            det = np.linalg.det(Jac)
            scale = np.prod(np.max(np.abs(Jac), axis=-1), axis=-1)
            ok = np.isfinite(det) & (np.abs(det) > 1e-14 * scale)
        step = np.zeros_like(xa)
        if np.any(ok):
            step[ok] = np.linalg.solve(Jac[ok], -fa[ok][..., None])[..., 0]
        pending = ok.copy()
        t = np.ones(idx.size)
        accepted = np.zeros(idx.size, dtype=bool)
        for _ in range(cfg.damping + 1):
            rows = np.flatnonzero(pending)
            if rows.size == 0:
                break
            trial = xa[rows] + t[rows, None] * step[rows]
            good = np.ones(rows.size, dtype=bool)
            if domain_guard is not None:
                good &= domain_guard(trial, idx[rows])
            ft = np.full_like(trial, np.inf)
            if np.any(good):
                with np.errstate(all="ignore"):
                    ft[good] = f(trial[good], idx[rows][good])
            nt = np.max(np.abs(ft), axis=1)
            nt[~np.isfinite(nt)] = np.inf
            take = good & ((nt < norm[idx[rows]]) | (nt <= cfg.tol))
            sel = rows[take]
            x[idx[sel]] = trial[take]
            fx[idx[sel]] = ft[take]
            norm[idx[sel]] = nt[take]
            accepted[sel] = True
            pending[sel] = False
            t[rows] *= 0.5
        active[idx[~accepted]] = False
    return BatchNewtonResult(x=x, residual=norm, converged=norm <= cfg.tol, iterations=it)
