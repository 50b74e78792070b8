import numpy as np
import pytest

from twophoton.types import (ChannelParams, Detection, ExperimentConfig, Interferometer,
                             NoiseParams, SpectralParams)

# omega_p = 1 throughout, so tau below is omega_p * tau.
FIG_SPECTRAL = SpectralParams(sigma_minus=0.01, sigma_plus=0.01, omega_p=1.0)
IDEAL = ChannelParams(0.0, 1.0)
LOSSY = ChannelParams(0.4, 0.9)
QUIET = NoiseParams()


@pytest.fixture
def spectral():
    return FIG_SPECTRAL


def make_config(ifo="hom", det="nonresolved", gamma=0.0, visibility=1.0,
                eta_eps=0.0, eta_theta=0.0, spectral=FIG_SPECTRAL):
    return ExperimentConfig(spectral, ChannelParams(gamma, visibility),
                            NoiseParams(eta_eps, eta_theta), Interferometer(ifo), Detection(det))


def rel(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.abs(b)))


# One summary line per acceptance criterion, printed after the test run.
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
