"""Parameter and result types shared by every model.

Units: angular frequencies in rad/s, delays and ``eta_eps`` in seconds,
``eta_theta`` in radians.  Model functions are scale covariant, so any
consistent unit system works; the CLI uses ``omega_p = 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np


class ConfigError(ValueError):
    """A parameter lies outside its documented range."""

    def __init__(self, field_name: str, message: str):
        super().__init__(message)
        self.field = field_name


class Interferometer(str, enum.Enum):
    HOM = "hom"
    NOON = "noon"


class Detection(str, enum.Enum):
    NON_RESOLVED = "nonresolved"
    RESOLVED = "resolved"


class FisherMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    FREQ_QUADRATURE = "freq_quadrature"
    NOISE_QUADRATURE = "noise_quadrature"
    FINITE_DIFFERENCE = "finite_difference"


@dataclass(frozen=True)
class SpectralParams:
    sigma_minus: float
    sigma_plus: float
    omega_p: float


@dataclass(frozen=True)
class ChannelParams:
    gamma: float = 0.0
    visibility: float = 1.0

    @property
    def k_ratio(self) -> float:
        """(1 + 3 gamma) / (1 - gamma), the single-click offset."""
        return (1.0 + 3.0 * self.gamma) / (1.0 - self.gamma)


@dataclass(frozen=True)
class NoiseParams:
    eta_eps: float = 0.0
    eta_theta: float = 0.0

    @property
    def is_zero(self) -> bool:
        return self.eta_eps == 0.0 and self.eta_theta == 0.0


@dataclass(frozen=True)
class NoiseRealization:
    eps: float = 0.0
    theta: float = 0.0


@dataclass(frozen=True)
class OutcomeTriple:
    """No-click, single-click and coincidence probabilities.

    Fields may be numpy arrays when the model was evaluated on a grid.
    """

    p0: float | np.ndarray
    p1: float | np.ndarray
    p2: float | np.ndarray

    def total(self):
        return self.p0 + self.p1 + self.p2

    def as_array(self) -> np.ndarray:
        """Stack as ``[p0, p1, p2]`` along a new leading axis."""
        return np.stack(np.broadcast_arrays(self.p0, self.p1, self.p2))


@dataclass(frozen=True)
class SpectralOutcomeTriple:
    """Outcome densities per unit detected frequency at ``freq``."""

    d0: float | np.ndarray
    d1: float | np.ndarray
    d2: float | np.ndarray
    freq: float | np.ndarray

    def total(self):
        return self.d0 + self.d1 + self.d2

    def as_array(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(self.d0, self.d1, self.d2))


@dataclass(frozen=True)
class FisherResult:
    value: float | np.ndarray
    value_scaled: float | np.ndarray
    method: FisherMethod
    err_estimate: float | np.ndarray = 0.0
    converged: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    spectral: SpectralParams
    channel: ChannelParams = field(default_factory=ChannelParams)
    noise: NoiseParams = field(default_factory=NoiseParams)
    interferometer: Interferometer = Interferometer.HOM
    detection: Detection = Detection.NON_RESOLVED

    def with_noise(self, **changes) -> "ExperimentConfig":
        return replace(self, noise=replace(self.noise, **changes))


def _finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ConfigError(name, f"{name} must be finite, got {value!r}")


def validate(config: ExperimentConfig) -> ExperimentConfig:
    """Return ``config`` unchanged, or raise :class:`ConfigError`."""
    sp, ch, nz = config.spectral, config.channel, config.noise
    for name in ("sigma_minus", "sigma_plus", "omega_p"):
        value = getattr(sp, name)
        _finite(name, value)
        if not value > 0:
            raise ConfigError(name, f"{name} must be > 0, got {value!r}")
    _finite("gamma", ch.gamma)
    if not 0.0 <= ch.gamma < 1.0:
        raise ConfigError("gamma", "gamma must lie in [0,1)")
    _finite("visibility", ch.visibility)
    if not 0.0 <= ch.visibility <= 1.0:
        raise ConfigError("visibility", "visibility must lie in [0,1]")
    for name in ("eta_eps", "eta_theta"):
        value = getattr(nz, name)
        _finite(name, value)
        if value < 0:
            raise ConfigError(name, f"{name} must be >= 0, got {value!r}")
    try:
        Interferometer(config.interferometer)
        Detection(config.detection)
    except ValueError as exc:
        raise ConfigError("interferometer/detection", str(exc)) from None
    return config


@dataclass(frozen=True)
class DimensionlessParams:
    """A config rescaled so the pump frequency is one.

    ``sigma_*`` are in units of omega_p, ``eta_eps_wp`` is eta_eps * omega_p,
    delays become ``x = omega_p * tau`` and Fisher information F / omega_p**2.
    """

    omega_p: float
    sigma_minus: float
    sigma_plus: float
    eta_eps_wp: float
    eta_theta: float
    gamma: float
    visibility: float
    interferometer: Interferometer
    detection: Detection

    def to_config(self) -> ExperimentConfig:
        wp = self.omega_p
        return ExperimentConfig(
            spectral=SpectralParams(self.sigma_minus * wp, self.sigma_plus * wp, wp),
            channel=ChannelParams(self.gamma, self.visibility),
            noise=NoiseParams(self.eta_eps_wp / wp, self.eta_theta),
            interferometer=self.interferometer,
            detection=self.detection,
        )

    def unit_config(self) -> ExperimentConfig:
        """The same scenario expressed with omega_p = 1."""
        return replace(self, omega_p=1.0).to_config()

    def tau_from_x(self, x):
        return x / self.omega_p

    def x_from_tau(self, tau):
        return tau * self.omega_p


def dimensionless_view(config: ExperimentConfig) -> DimensionlessParams:
    sp = config.spectral
    return DimensionlessParams(
        omega_p=sp.omega_p,
        sigma_minus=sp.sigma_minus / sp.omega_p,
        sigma_plus=sp.sigma_plus / sp.omega_p,
        eta_eps_wp=config.noise.eta_eps * sp.omega_p,
        eta_theta=config.noise.eta_theta,
        gamma=config.channel.gamma,
        visibility=config.channel.visibility,
        interferometer=Interferometer(config.interferometer),
        detection=Detection(config.detection),
    )


def qcrb(interferometer: Interferometer, spectral: SpectralParams) -> float:
    """Quantum Fisher information bound: 4 s-^2 (HOM), 4 s+^2 + wp^2 (N00N)."""
    if Interferometer(interferometer) is Interferometer.HOM:
        return 4.0 * spectral.sigma_minus**2
    return 4.0 * spectral.sigma_plus**2 + spectral.omega_p**2
