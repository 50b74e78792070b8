"""Hong-Ou-Mandel interferometer: outcome probabilities and Fisher information.

The interference term depends on the biphoton frequency difference, so the
constant phase ``theta`` never enters.  All functions broadcast over array
arguments.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import integrate
from .types import (ChannelParams, FisherMethod, FisherResult, NoiseParams,
                    OutcomeTriple, SpectralOutcomeTriple, SpectralParams)

# Resolved quadrature covers omega_- in [-c, c], c = ENVELOPE_SPAN * (2 sigma_-).
ENVELOPE_SPAN = 8.0
QUAD_RTOL = 1e-10
CLOSED_FORM_RTOL = 1e-14
_CHUNK = 128


def noise_factor(spectral: SpectralParams, noise: NoiseParams) -> float:
    """A = 1 + 4 sigma_-^2 eta_eps^2."""
    return 1.0 + 4.0 * spectral.sigma_minus**2 * noise.eta_eps**2


def _one_minus_inv_sqrt(a_minus_1: float) -> float:
    # 1 - 1/sqrt(A) without cancellation for A close to 1.
    root = math.sqrt(1.0 + a_minus_1)
    return a_minus_1 / (root * (1.0 + root))


def _triple(dt, channel: ChannelParams, sigma: float, a_minus_1: float) -> OutcomeTriple:
    gamma, vis = channel.gamma, channel.visibility
    a = 1.0 + a_minus_1
    contrast = vis / math.sqrt(a)
    one_minus_contrast = (1.0 - vis) + vis * _one_minus_inv_sqrt(a_minus_1)
    x = 2.0 * sigma**2 * np.square(dt) / a
    pref = 0.5 * (1.0 - gamma) ** 2
    p2 = pref * (one_minus_contrast - contrast * np.expm1(-x))
    p1 = 0.5 * (1.0 - gamma) * (1.0 + 3.0 * gamma) + pref * contrast * np.exp(-x)
    p0 = np.full(np.shape(p2), gamma**2) if np.ndim(p2) else gamma**2
    return OutcomeTriple(p0, p1, p2)


def probs_noiseless(tau, eps, channel: ChannelParams, spectral: SpectralParams,
                    theta=0.0) -> OutcomeTriple:
    """Outcome probabilities for one noise realization.

    ``theta`` is accepted for signature parity with the N00N model and has
    no effect.
    """
    del theta
    return _triple(np.subtract(tau, eps), channel, spectral.sigma_minus, 0.0)


def probs_noisy(tau, channel: ChannelParams, spectral: SpectralParams,
                noise: NoiseParams) -> OutcomeTriple:
    """Probabilities averaged over Gaussian eps: contrast V/sqrt(A), width sqrt(A)."""
    a_minus_1 = 4.0 * spectral.sigma_minus**2 * noise.eta_eps**2
    return _triple(tau, channel, spectral.sigma_minus, a_minus_1)


def _envelope(omega, sigma):
    return np.exp(-np.square(omega) / (8.0 * sigma**2)) / math.sqrt(2.0 * math.pi * sigma**2)


def _density(omega, half_phase, attenuation_m1, channel, sigma, normalized):
    """Densities with fringe ``a V cos(2 half_phase)``, ``a = 1 + attenuation_m1``."""
    gamma, vis = channel.gamma, channel.visibility
    att = 1.0 + attenuation_m1
    env = _envelope(omega, sigma)
    if normalized:
        env = 0.5 * env
    pref = 0.5 * (1.0 - gamma) ** 2 * env
    sin2 = np.square(np.sin(half_phase))
    cos_full = 1.0 - 2.0 * sin2
    one_minus_fringe = (1.0 - vis) - vis * attenuation_m1 + 2.0 * vis * att * sin2
    d2 = pref * one_minus_fringe
    d1 = pref * (channel.k_ratio + vis * att * cos_full)
    d0 = gamma**2 * env * np.ones_like(d2)
    return SpectralOutcomeTriple(d0, d1, d2, omega)


def resolved_density(tau, omega, eps, channel: ChannelParams, spectral: SpectralParams,
                     normalized: bool = False) -> SpectralOutcomeTriple:
    """Outcome densities over the frequency difference omega_-.

    With ``normalized=False`` the three densities integrate to 2 over the
    real line, the convention under which the published expressions are
    written (each pair appears at +omega_- and -omega_-).  ``normalized=True``
    halves them to a proper probability density; its Fisher information is
    the one returned by :func:`fi_resolved`.
    """
    omega = np.asarray(omega, dtype=float)
    half_phase = 0.5 * omega * np.subtract(tau, eps)
    return _density(omega, half_phase, 0.0, channel, spectral.sigma_minus, normalized)


def resolved_density_noisy(tau, omega, channel: ChannelParams, spectral: SpectralParams,
                           noise: NoiseParams, normalized: bool = False) -> SpectralOutcomeTriple:
    """Noise-averaged densities: fringe damped by exp(-omega^2 eta_eps^2 / 2)."""
    omega = np.asarray(omega, dtype=float)
    att_m1 = np.expm1(-0.5 * np.square(omega * noise.eta_eps))
    half_phase = 0.5 * omega * np.asarray(tau, dtype=float)
    return _density(omega, half_phase, att_m1, channel, spectral.sigma_minus, normalized)


def _x_over_one_minus_exp(x):
    """x / (1 - exp(-x)), equal to 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(x == 0.0, 1.0, x / -np.expm1(-x))
    return out


def fi_nonresolved(tau, channel: ChannelParams, spectral: SpectralParams,
                   noise: NoiseParams) -> FisherResult:
    """Closed-form Fisher information for spectrally non-resolved detection."""
    gamma, vis = channel.gamma, channel.visibility
    sigma = spectral.sigma_minus
    a_minus_1 = 4.0 * sigma**2 * noise.eta_eps**2
    a = 1.0 + a_minus_1
    tau = np.asarray(tau, dtype=float)
    contrast = vis / math.sqrt(a)
    one_minus_contrast = (1.0 - vis) + vis * _one_minus_inv_sqrt(a_minus_1)
    x = 2.0 * sigma**2 * np.square(tau) / a
    g = contrast * np.exp(-x)
    k = channel.k_ratio
    if one_minus_contrast == 0.0:
        # V = 1 and no noise: tau^2 / (1 - g) has a finite limit at tau = 0.
        tau2_over = a / (2.0 * sigma**2) * _x_over_one_minus_exp(x)
    else:
        tau2_over = np.square(tau) / (one_minus_contrast - contrast * np.expm1(-x))
    value = (16.0 * (1.0 - gamma**2) * vis**2 * sigma**4 * np.exp(-2.0 * x)
             * tau2_over / (a**3 * (k + g)))
    value = value if value.ndim else float(value)
    return FisherResult(value, value / spectral.omega_p**2, FisherMethod.CLOSED_FORM,
                        CLOSED_FORM_RTOL * value)


def fi_resolved_integrand(omega, tau, channel: ChannelParams, spectral: SpectralParams,
                          noise: NoiseParams):
    """Fisher-information density over omega_- (broadcasts omega against tau)."""
    gamma, vis = channel.gamma, channel.visibility
    sigma = spectral.sigma_minus
    k = channel.k_ratio
    omega = np.asarray(omega, dtype=float)
    phase = omega * np.asarray(tau, dtype=float)
    pref = (1.0 - gamma**2) * vis**2 / (2.0 * math.sqrt(2.0 * math.pi) * sigma)
    weight = pref * np.square(omega) * np.exp(-np.square(omega) / (8.0 * sigma**2))
    if vis == 0.0:
        return np.zeros(np.broadcast(omega, phase).shape)
    if vis == 1.0 and noise.eta_eps == 0.0:
        # sin^2 / ((1 - cos)(k + cos)) reduces exactly to (1 + cos)/(k + cos).
        if k == 1.0:
            return weight * np.ones_like(phase)
        cos = np.cos(phase)
        return weight * (1.0 + cos) / (k + cos)
    sin_half2 = np.square(np.sin(0.5 * phase))
    cos_half2 = 1.0 - sin_half2
    # Strong noise overflows den to inf, which correctly sends the ratio to 0.
    with np.errstate(invalid="ignore", over="ignore"):
        em1 = np.expm1(0.5 * np.square(omega * noise.eta_eps))
        lower = em1 + (1.0 - vis) + 2.0 * vis * sin_half2
        upper = k * em1 + (k - 1.0) + (1.0 - vis) + 2.0 * vis * cos_half2
        den = lower * upper
        ratio = np.where(den > 0, np.square(np.sin(phase)) / den, 0.0)
    return weight * ratio


def _batched_fi(integrand, tau, lo, hi, width, omega_p, rtol):
    tau = np.asarray(tau, dtype=float)
    flat = tau.ravel()
    order = np.argsort(np.abs(flat), kind="stable")
    value = np.empty(flat.size)
    err = np.empty(flat.size)
    converged = True
    for start in range(0, flat.size, _CHUNK):
        idx = order[start:start + _CHUNK]
        block = flat[idx][:, None]
        n_init = 8 + int(math.ceil(width * float(np.abs(block).max()) / math.pi))
        res = integrate(lambda w: integrand(w, block), lo, hi, rtol=rtol, n_init=n_init)
        value[idx] = res.value
        err[idx] = res.error
        converged = converged and res.converged
    value = value.reshape(tau.shape)
    err = err.reshape(tau.shape)
    if not tau.ndim:
        value, err = float(value), float(err)
    return FisherResult(value, value / omega_p**2, FisherMethod.FREQ_QUADRATURE, err, converged)


def fi_resolved(tau, channel: ChannelParams, spectral: SpectralParams, noise: NoiseParams,
                rtol: float = QUAD_RTOL) -> FisherResult:
    """Fisher information for spectrally resolved detection, by quadrature.

    The integrand is even in omega_-, so only [0, c] is integrated.
    """
    c = ENVELOPE_SPAN * 2.0 * spectral.sigma_minus

    def integrand(w, t):
        return 2.0 * fi_resolved_integrand(w, t, channel, spectral, noise)

    return _batched_fi(integrand, tau, 0.0, c, c, spectral.omega_p, rtol)
