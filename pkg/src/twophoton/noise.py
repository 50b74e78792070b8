"""Averaging over the Gaussian phase-noise model by Gauss-Hermite quadrature.

The frequency-dependent shift ``eps`` and constant phase ``theta`` are
independent zero-mean Gaussians with standard deviations ``eta_eps`` and
``eta_theta``.  This module is deliberately independent of the closed-form
noise-averaged expressions in :mod:`twophoton.hom` and :mod:`twophoton.noon`,
which it is used to check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .types import NoiseParams

DEFAULT_ORDER = 64
_PI_M4 = math.pi ** -0.25


class NoiseAveragingError(ArithmeticError):
    pass


@dataclass(frozen=True)
class GaussHermiteRule:
    """Physicists' rule: integrates ``g(x) exp(-x**2)`` over the real line."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return self.nodes.size


def _hermite_eval(z: float, n: int):
    # Orthonormal Hermite recurrence keeps values O(1) for large n.
    p1, p2 = _PI_M4, 0.0
    for j in range(n):
        p3, p2 = p2, p1
        p1 = z * math.sqrt(2.0 / (j + 1)) * p2 - math.sqrt(j / (j + 1)) * p3
    return p1, math.sqrt(2.0 * n) * p2


def _hermite_newton(z: float, n: int, found, tol: float = 3e-14, maxit: int = 200):
    """Newton iteration with Maehly deflation against the roots in ``found``."""
    for _ in range(maxit):
        p, dp = _hermite_eval(z, n)
        deflate = sum(1.0 / (z - r) for r in found)
        step = p / (dp - p * deflate)
        z -= step
        if abs(step) <= tol * max(1.0, abs(z)):
            break
    else:
        raise NoiseAveragingError(f"Hermite root did not converge near {z}")
    _, dp = _hermite_eval(z, n)
    return z, 2.0 / (dp * dp)


@lru_cache(maxsize=None)
def _rule_arrays(order: int):
    n = order
    m = (n + 1) // 2
    x = np.zeros(n)
    w = np.zeros(n)
    z = 0.0
    for i in range(m):
        # Initial guesses for the largest roots first (Numerical Recipes).
        if i == 0:
            z = math.sqrt(2 * n + 1) - 1.85575 * (2 * n + 1) ** (-1.0 / 6.0)
        elif i == 1:
            z -= 1.14 * n**0.426 / z
        elif i == 2:
            z = 1.86 * z - 0.86 * x[0]
        elif i == 3:
            z = 1.91 * z - 0.91 * x[1]
        else:
            z = 2.0 * z - x[i - 2]
        try:
            z, wi = _hermite_newton(z, n, x[:i])
            ok = i == 0 or z < x[i - 1]
        except NoiseAveragingError:
            ok = False
        if not ok:
            # Newton from just below the last root approaches the next one
            # monotonically from the right.
            z, wi = _hermite_newton(x[i - 1] - 1e-6 * max(1.0, x[i - 1]), n, x[:i])
        x[i], x[n - 1 - i] = z, -z
        w[i] = w[n - 1 - i] = wi
    if n % 2:
        x[m - 1] = 0.0
    order_idx = np.argsort(x)
    x, w = x[order_idx], w[order_idx]
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_hermite_rule(order: int) -> GaussHermiteRule:
    if not 2 <= int(order) <= 200 or int(order) != order:
        raise ValueError(f"order must be an integer in [2, 200], got {order!r}")
    x, w = _rule_arrays(int(order))
    return GaussHermiteRule(x, w)


def _normal_nodes(sigma: float, order: int):
    """Nodes and probability weights for N(0, sigma**2); one node if sigma=0."""
    if sigma == 0.0:
        return np.zeros(1), np.ones(1)
    rule = gauss_hermite_rule(order)
    return math.sqrt(2.0) * sigma * rule.nodes, rule.weights / math.sqrt(math.pi)


def average_over_noise(f, noise: NoiseParams, order: int = DEFAULT_ORDER):
    """Expectation of ``f(eps, theta)`` over the noise distribution.

    ``f`` is called once with two equal-length 1-D arrays covering the
    tensor-product grid and must return an array whose last axis runs over
    those nodes (leading axes are kept, so a stacked outcome triple works).
    A zero noise strength collapses that dimension to a single node, so
    zero noise returns ``f(0, 0)`` exactly.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    eps, w_eps = _normal_nodes(noise.eta_eps, order)
    theta, w_theta = _normal_nodes(noise.eta_theta, order)
    ee, tt = np.meshgrid(eps, theta, indexing="ij")
    weights = np.outer(w_eps, w_theta).ravel()
    values = np.asarray(f(ee.ravel(), tt.ravel()), dtype=float)
    if values.ndim == 0:
        values = np.full(weights.size, float(values))
    elif values.shape[-1] != weights.size:
        raise ValueError("f must return one value per node on its last axis")
    bad = ~np.isfinite(values)
    if bad.any():
        k = int(np.argwhere(bad)[0][-1])
        raise NoiseAveragingError(
            f"non-finite sample at node eps={ee.ravel()[k]!r}, theta={tt.ravel()[k]!r}")
    if weights.size == 1:
        return values[..., 0]
    return values @ weights
