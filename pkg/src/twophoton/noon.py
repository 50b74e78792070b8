"""Two-photon N00N interferometer: outcome probabilities and Fisher information.

The fringe oscillates at the pump frequency and is shifted by both the
frequency-dependent delay ``eps`` and the constant phase ``theta``.
"""

from __future__ import annotations

import math

import numpy as np

from .hom import CLOSED_FORM_RTOL, ENVELOPE_SPAN, QUAD_RTOL, _batched_fi
from .types import (ChannelParams, FisherMethod, FisherResult, NoiseParams,
                    OutcomeTriple, SpectralOutcomeTriple, SpectralParams)


def noise_factor(spectral: SpectralParams, noise: NoiseParams) -> float:
    """A' = 1 + 4 sigma_+^2 eta_eps^2."""
    return 1.0 + 4.0 * spectral.sigma_plus**2 * noise.eta_eps**2


def _triple(fringe, channel: ChannelParams) -> OutcomeTriple:
    gamma = channel.gamma
    pref = 0.5 * (1.0 - gamma) ** 2
    p2 = pref * (1.0 + fringe)
    p1 = 0.5 * (1.0 - gamma) * (1.0 + 3.0 * gamma) - pref * fringe
    p0 = np.full(np.shape(p2), gamma**2) if np.ndim(p2) else gamma**2
    return OutcomeTriple(p0, p1, p2)


def probs_noiseless(tau, eps, theta, channel: ChannelParams,
                    spectral: SpectralParams) -> OutcomeTriple:
    dt = np.subtract(tau, eps)
    fringe = (channel.visibility * np.exp(-2.0 * spectral.sigma_plus**2 * np.square(dt))
              * np.cos(spectral.omega_p * dt + 2.0 * np.asarray(theta)))
    return _triple(fringe, channel)


def _noisy_log_attenuation(tau, spectral: SpectralParams, noise: NoiseParams):
    """Log of the fringe amplitude factor exp(-2 eta_t^2 - (2 s^2 tau^2 + eta^2 wp^2 / 2) / A')."""
    ap = noise_factor(spectral, noise)
    return (-2.0 * noise.eta_theta**2
            - (2.0 * spectral.sigma_plus**2 * np.square(tau)
               + 0.5 * (noise.eta_eps * spectral.omega_p) ** 2) / ap)


def probs_noisy(tau, channel: ChannelParams, spectral: SpectralParams,
                noise: NoiseParams) -> OutcomeTriple:
    """Probabilities averaged over Gaussian ``eps`` and ``theta``.

    Averaging the fringe over ``eps`` narrows the effective spectrum, which
    shifts its centre to omega_p / A'; the fringe therefore oscillates as
    cos(omega_p tau / A'), not cos(omega_p tau).  The two agree when
    eta_eps = 0.
    """
    tau = np.asarray(tau, dtype=float)
    ap = noise_factor(spectral, noise)
    log_att = _noisy_log_attenuation(tau, spectral, noise)
    fringe = (channel.visibility / math.sqrt(ap) * np.cos(spectral.omega_p * tau / ap)
              * np.exp(log_att))
    return _triple(fringe, channel)


def _envelope(omega, spectral: SpectralParams):
    s = spectral.sigma_plus
    return (np.exp(-np.square(omega - spectral.omega_p) / (8.0 * s**2))
            / (4.0 * math.sqrt(2.0 * math.pi * s**2)))


def _density(omega, fringe, channel: ChannelParams, spectral: SpectralParams):
    gamma = channel.gamma
    env = _envelope(omega, spectral)
    pref = (1.0 - gamma) ** 2 * env
    d2 = pref * (1.0 + fringe)
    d1 = pref * (channel.k_ratio - fringe)
    d0 = 2.0 * gamma**2 * env * np.ones_like(d2)
    return SpectralOutcomeTriple(d0, d1, d2, omega)


def resolved_density(tau, omega, eps, theta, channel: ChannelParams,
                     spectral: SpectralParams) -> SpectralOutcomeTriple:
    """Densities over the frequency sum omega_+; they integrate to one."""
    omega = np.asarray(omega, dtype=float)
    fringe = channel.visibility * np.cos(omega * np.subtract(tau, eps) + 2.0 * np.asarray(theta))
    return _density(omega, fringe, channel, spectral)


def resolved_density_noisy(tau, omega, channel: ChannelParams, spectral: SpectralParams,
                           noise: NoiseParams) -> SpectralOutcomeTriple:
    omega = np.asarray(omega, dtype=float)
    att = np.exp(-2.0 * noise.eta_theta**2 - 0.5 * np.square(omega * noise.eta_eps))
    fringe = channel.visibility * att * np.cos(omega * np.asarray(tau, dtype=float))
    return _density(omega, fringe, channel, spectral)


def fi_nonresolved(tau, channel: ChannelParams, spectral: SpectralParams,
                   noise: NoiseParams) -> FisherResult:
    """Closed-form Fisher information for spectrally non-resolved detection.

    Exact for the probabilities of :func:`probs_noisy`.  Written with the
    fringe amplitude ``exp(E) <= 1`` rather than its reciprocal, so strong
    noise underflows to zero instead of overflowing.  The denominator (1 + h)(k - h) is expanded into
    non-negative pieces to avoid cancellation near the ideal fringe peak.
    """
    gamma, vis = channel.gamma, channel.visibility
    s, wp = spectral.sigma_plus, spectral.omega_p
    tau = np.asarray(tau, dtype=float)
    ap_m1 = 4.0 * s**2 * noise.eta_eps**2
    ap = 1.0 + ap_m1
    log_att = _noisy_log_attenuation(tau, spectral, noise)
    att2 = np.exp(2.0 * log_att)
    cos, sin = np.cos(wp * tau / ap), np.sin(wp * tau / ap)
    slope = 4.0 * s**2 * tau * cos + wp * sin
    h = vis / math.sqrt(ap) * cos * np.exp(log_att)
    v2 = vis**2 / ap
    one_minus_v2 = (1.0 - vis**2) + vis**2 * ap_m1 / ap
    one_minus_h2 = one_minus_v2 + v2 * (np.square(sin) - np.square(cos) * np.expm1(2.0 * log_att))
    k_minus_1 = 4.0 * gamma / (1.0 - gamma)
    den = k_minus_1 * (1.0 + h) + one_minus_h2
    num = (1.0 - gamma**2) * vis**2 * att2 * np.square(slope) / ap**3
    limit = 4.0 * s**2 + wp**2
    with np.errstate(invalid="ignore", divide="ignore"):
        # den vanishes only at tau = 0 in the ideal noiseless case.
        value = np.where(den > 0, num / np.where(den > 0, den, 1.0), limit)
    value = value if value.ndim else float(value)
    return FisherResult(value, value / wp**2, FisherMethod.CLOSED_FORM, CLOSED_FORM_RTOL * value)


def fi_resolved_integrand(omega, tau, channel: ChannelParams, spectral: SpectralParams,
                          noise: NoiseParams):
    """Fisher-information density over omega_+, derived from the noise-averaged densities.

    The fringe amplitude is exp(-2 eta_t^2 - eta^2 w^2 / 2); its reciprocal
    ``u`` appears in the denominator (u + V cos)(u k - V cos).
    """
    gamma, vis = channel.gamma, channel.visibility
    s = spectral.sigma_plus
    k = channel.k_ratio
    omega = np.asarray(omega, dtype=float)
    phase = omega * np.asarray(tau, dtype=float)
    pref = (1.0 - gamma**2) * vis**2 / (2.0 * math.sqrt(2.0 * math.pi) * s)
    weight = pref * np.square(omega) * np.exp(-np.square(omega - spectral.omega_p) / (8.0 * s**2))
    if vis == 0.0:
        return np.zeros(np.broadcast(omega, phase).shape)
    if vis == 1.0 and noise.is_zero:
        # sin^2 / ((1 + cos)(k - cos)) reduces exactly to (1 - cos)/(k - cos).
        if k == 1.0:
            return weight * np.ones_like(phase)
        cos = np.cos(phase)
        return weight * (1.0 - cos) / (k - cos)
    sin_half2 = np.square(np.sin(0.5 * phase))
    cos_half2 = 1.0 - sin_half2
    # Strong noise overflows den to inf, which correctly sends the ratio to 0.
    with np.errstate(invalid="ignore", over="ignore"):
        em1 = np.expm1(2.0 * noise.eta_theta**2 + 0.5 * np.square(omega * noise.eta_eps))
        plus = em1 + (1.0 - vis) + 2.0 * vis * cos_half2
        minus = k * em1 + (k - 1.0) + (1.0 - vis) + 2.0 * vis * sin_half2
        den = plus * minus
        ratio = np.where(den > 0, np.square(np.sin(phase)) / den, 0.0)
    return weight * ratio


def fi_resolved(tau, channel: ChannelParams, spectral: SpectralParams, noise: NoiseParams,
                rtol: float = QUAD_RTOL) -> FisherResult:
    """Fisher information for spectrally resolved detection, by quadrature over omega_+."""
    c = ENVELOPE_SPAN * 2.0 * spectral.sigma_plus
    lo, hi = spectral.omega_p - c, spectral.omega_p + c

    def integrand(w, t):
        return fi_resolved_integrand(w, t, channel, spectral, noise)

    return _batched_fi(integrand, tau, lo, hi, hi - lo, spectral.omega_p, rtol)
