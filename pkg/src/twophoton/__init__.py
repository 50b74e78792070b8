"""Delay estimation with two-photon HOM and N00N interferometers under phase noise."""

from .types import (ChannelParams, ConfigError, Detection, ExperimentConfig, FisherResult,
                    Interferometer, NoiseParams, OutcomeTriple, SpectralOutcomeTriple,
                    SpectralParams, qcrb, validate)

__all__ = [
    "ChannelParams", "ConfigError", "Detection", "ExperimentConfig", "FisherResult",
    "Interferometer", "NoiseParams", "OutcomeTriple", "SpectralOutcomeTriple",
    "SpectralParams", "qcrb", "validate",
]
