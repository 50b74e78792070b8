"""Model-agnostic Fisher information and Cramer-Rao bookkeeping.

These routines only see outcome probabilities (or densities) as functions of
the delay and differentiate them numerically, so they serve as an oracle for
the closed forms in :mod:`twophoton.hom` and :mod:`twophoton.noon`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import integrate
from .types import FisherMethod, FisherResult, Interferometer, SpectralParams, qcrb

# Terms with p below P_FLOOR and |dp| below DP_FLOOR are exact zeros.
P_FLOOR = 1e-300
DP_FLOOR = 1e-150


def _richardson(model_array, tau, step):
    """Central difference with one Richardson level; returns (best, coarse)."""
    d_h = (model_array(tau + step) - model_array(tau - step)) / (2.0 * step)
    half = 0.5 * step
    d_h2 = (model_array(tau + half) - model_array(tau - half)) / (2.0 * half)
    return (4.0 * d_h2 - d_h) / 3.0, d_h2


def _fisher_sum(p, dp):
    if np.any(p < 0):
        raise ValueError("negative outcome probability")
    if not np.all(np.isfinite(dp)):
        raise ValueError("non-finite derivative")
    zero = (p < P_FLOOR) & (np.abs(dp) < DP_FLOOR)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(zero, 0.0, np.square(dp) / np.where(zero, 1.0, p))
    return terms.sum(axis=0)


def fi_from_triple(model, tau, step: float, omega_p: float = 1.0) -> FisherResult:
    """Fisher information sum_i (d p_i / d tau)^2 / p_i by finite differences.

    ``model(tau)`` must return an :class:`OutcomeTriple`; array ``tau`` is
    supported when the model broadcasts.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    tau = np.asarray(tau, dtype=float)

    def arr(t):
        return model(t).as_array()

    p = arr(tau)
    best, coarse = _richardson(arr, tau, step)
    value = _fisher_sum(p, best)
    err = np.abs(value - _fisher_sum(p, coarse))
    if value.ndim == 0:
        value, err = float(value), float(err)
    return FisherResult(value, value / omega_p**2, FisherMethod.FINITE_DIFFERENCE, err)


@dataclass(frozen=True)
class QuadSpec:
    lower: float
    upper: float
    rtol: float = 1e-10
    n_init: int | None = None


def fi_from_spectral_triple(model, tau, quad_spec: QuadSpec, step: float,
                            omega_p: float = 1.0) -> FisherResult:
    """Integrate the pointwise Fisher information of resolved densities.

    ``model(tau, omega)`` returns a :class:`SpectralOutcomeTriple` and must
    broadcast ``tau`` (shape ``(n, 1)``) against ``omega`` (shape ``(m,)``).
    Where a density and its difference quotient are both exactly zero (ideal
    HOM at tau = 0) the term is a 0/0 limit that differencing cannot see, and
    it is dropped; the closed-form integrands handle that limit analytically.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    tau = np.asarray(tau, dtype=float)
    block = tau.reshape(-1, 1)

    def integrand(w):
        def arr(t):
            return model(t, w).as_array()
        d = arr(block)
        best, _ = _richardson(arr, block, step)
        return _fisher_sum(d, best)

    span = quad_spec.upper - quad_spec.lower
    n_init = quad_spec.n_init
    if n_init is None:
        n_init = 8 + int(math.ceil(span * float(np.abs(block).max()) / math.pi))
    res = integrate(integrand, quad_spec.lower, quad_spec.upper,
                    rtol=quad_spec.rtol, n_init=n_init)
    value = np.asarray(res.value).reshape(tau.shape)
    err = np.asarray(res.error).reshape(tau.shape)
    if tau.ndim == 0:
        value, err = float(value), float(err)
    return FisherResult(value, value / omega_p**2, FisherMethod.FREQ_QUADRATURE, err,
                        res.converged)


@dataclass(frozen=True)
class CrbReport:
    fisher: FisherResult
    n_repetitions: int
    delta_tau_crb: float
    qcrb_value: float
    saturation: float

    @property
    def unbounded(self) -> bool:
        """True when the Fisher information vanishes and the bound is infinite."""
        return math.isinf(self.delta_tau_crb)


def crb(fisher: FisherResult, n: int, interferometer: Interferometer,
        spectral: SpectralParams) -> CrbReport:
    """Cramer-Rao bound 1/sqrt(N F) and saturation F / QCRB."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    value = float(fisher.value)
    if value < 0 or not math.isfinite(value):
        raise ValueError(f"invalid Fisher information {value!r}")
    bound = qcrb(interferometer, spectral)
    delta = math.inf if value == 0.0 else 1.0 / math.sqrt(n * value)
    return CrbReport(fisher, int(n), delta, bound, value / bound)
