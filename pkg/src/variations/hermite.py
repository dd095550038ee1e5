"""Probabilists' Hermite polynomials and the Mehler covariance identity."""

import math
from typing import Union

import numpy as np

from src.errors import FbmVarError

ArrayLike = Union[float, np.ndarray]


def validate_order(q: int, minimum: int = 1) -> int:
    """Return q as an int, rejecting non-integers and orders below ``minimum``."""
    if isinstance(q, bool) or int(q) != q:
        raise FbmVarError(f"Hermite order must be an integer, got {q!r}", q=q)
    q = int(q)
    if q < minimum:
        raise FbmVarError(f"Hermite order must be >= {minimum}, got {q}", q=q)
    return q


def hermite_eval(q: int, x: ArrayLike) -> ArrayLike:
    """
    Evaluate H_q(x) with H_{k+1} = x H_k - k H_{k-1}, H_0 = 1, H_1 = x.

    Works elementwise on arrays. The recurrence is used instead of expanded
    coefficients so large |x| does not suffer cancellation.
    """
    q = validate_order(q, minimum=0)
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.ones_like(x)
    if q == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = x.copy()
    for k in range(1, q):
        h_prev, h = h, x * h - k * h_prev
    return h if h.ndim else float(h)


def hermite_mehler_cov(q: int, rho: float) -> float:
    """E[H_q(X) H_q(Y)] = q! rho^q for standard Gaussians with correlation rho."""
    q = validate_order(q, minimum=0)
    if not -1.0 <= rho <= 1.0:
        raise FbmVarError(f"correlation must lie in [-1, 1], got {rho}", rho=rho)
    return math.factorial(q) * rho ** q
