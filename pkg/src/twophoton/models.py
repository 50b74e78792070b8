"""Dispatch from an :class:`ExperimentConfig` to the matching model functions."""

from __future__ import annotations

import numpy as np

from . import hom, noon
from .types import (Detection, ExperimentConfig, FisherResult, Interferometer,
                    OutcomeTriple, SpectralOutcomeTriple)


def is_hom(config: ExperimentConfig) -> bool:
    return Interferometer(config.interferometer) is Interferometer.HOM


def outcome_probs(config: ExperimentConfig, tau) -> OutcomeTriple:
    """Noise-averaged, spectrally non-resolved outcome probabilities."""
    mod = hom if is_hom(config) else noon
    return mod.probs_noisy(tau, config.channel, config.spectral, config.noise)


def spectral_density(config: ExperimentConfig, tau, omega,
                     normalized: bool = True) -> SpectralOutcomeTriple:
    """Noise-averaged resolved densities; ``normalized`` only affects HOM."""
    if is_hom(config):
        return hom.resolved_density_noisy(tau, omega, config.channel, config.spectral,
                                          config.noise, normalized=normalized)
    return noon.resolved_density_noisy(tau, omega, config.channel, config.spectral,
                                       config.noise)


def frequency_window(config: ExperimentConfig) -> tuple[float, float]:
    """Integration range for the detected frequency: centre +- 8 envelope widths."""
    sp = config.spectral
    if is_hom(config):
        c = hom.ENVELOPE_SPAN * 2.0 * sp.sigma_minus
        return -c, c
    c = noon.ENVELOPE_SPAN * 2.0 * sp.sigma_plus
    return sp.omega_p - c, sp.omega_p + c


def envelope(config: ExperimentConfig) -> tuple[float, float]:
    """Mean and standard deviation of the detected-frequency marginal."""
    sp = config.spectral
    if is_hom(config):
        return 0.0, 2.0 * sp.sigma_minus
    return sp.omega_p, 2.0 * sp.sigma_plus


def fisher_information(config: ExperimentConfig, tau,
                       detection: Detection | None = None) -> FisherResult:
    det = Detection(detection if detection is not None else config.detection)
    mod = hom if is_hom(config) else noon
    fn = mod.fi_resolved if det is Detection.RESOLVED else mod.fi_nonresolved
    return fn(tau, config.channel, config.spectral, config.noise)


def feature_time(config: ExperimentConfig) -> float:
    """Shortest time scale on which the outcome model varies."""
    sp = config.spectral
    if is_hom(config):
        return 1.0 / sp.sigma_minus
    return 1.0 / max(sp.omega_p, 2.0 * sp.sigma_plus)


def default_fd_step(config: ExperimentConfig) -> float:
    return 1e-3 * feature_time(config)


def as_float(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x
