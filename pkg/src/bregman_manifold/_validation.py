"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""
from __future__ import annotations

import numbers

import numpy as np

from .exceptions import DomainError


def as_coords(x, dim: int | None = None, name: str = "x") -> np.ndarray:
    """Convert ``x`` to a float array whose last axis holds coordinates.

    Scalars are promoted to 1-vectors. Non-finite entries raise
    :class:`DomainError`, a wrong trailing dimension raises ``ValueError``.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if dim is not None and arr.shape[-1] != dim:
        raise ValueError(f"{name} has {arr.shape[-1]} coordinates, expected {dim}")
    if not np.all(np.isfinite(arr)):
        idx = _first_index(~np.isfinite(arr))
        raise DomainError(f"{name}{list(idx)} = {float(arr[idx])!r} is not finite")
    return arr


def first_violation(mask: np.ndarray, values: np.ndarray, name: str, rule: str) -> None:
    """Raise :class:`DomainError` naming the first coordinate where ``mask`` holds."""
    if np.any(mask):
        idx = _first_index(mask)
        raise DomainError(f"{name}{list(idx)} = {float(values[idx])!r} violates {rule}")


def _first_index(mask: np.ndarray) -> tuple:
    return tuple(int(i) for i in np.argwhere(mask)[0])


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_random_state(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
