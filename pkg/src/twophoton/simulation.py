"""Monte Carlo measurement records and maximum-likelihood delay estimation.

Randomness comes from counter-based Philox streams keyed by
``(seed, *stream)``, so trial ``i`` of a campaign draws the same numbers
regardless of execution order or worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import models, noon
from .types import Detection, ExperimentConfig, OutcomeTriple

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
POINTS_PER_SCALE = 40


def generator(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))


@dataclass(frozen=True)
class OutcomeCounts:
    n0: int
    n1: int
    n2: int

    @property
    def n_total(self) -> int:
        return self.n0 + self.n1 + self.n2

    def as_array(self) -> np.ndarray:
        return np.array([self.n0, self.n1, self.n2])


@dataclass(frozen=True)
class SpectralRecord:
    """Detected frequency and click outcome (0, 1 or 2) for each pair."""

    freq: np.ndarray
    outcome: np.ndarray

    def __len__(self) -> int:
        return self.freq.size


def sample_counts(triple: OutcomeTriple, n_pairs: int, rng_seed: int,
                  stream: tuple[int, ...] = ()) -> OutcomeCounts:
    p = np.array([triple.p0, triple.p1, triple.p2], dtype=float)
    if p.shape != (3,):
        raise ValueError("sample_counts needs a scalar outcome triple")
    if np.any(p < -1e-15) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"outcome triple is not normalized: {p.tolist()}")
    p = np.clip(p, 0.0, None)
    n0, n1, n2 = generator(rng_seed, *stream).multinomial(int(n_pairs), p / p.sum())
    return OutcomeCounts(int(n0), int(n1), int(n2))


def sample_spectral(config: ExperimentConfig, tau: float, n_pairs: int, rng_seed: int,
                    stream: tuple[int, ...] = ()) -> SpectralRecord:
    """Draw frequencies from the Gaussian marginal, then outcomes given frequency.

    The marginal does not depend on the delay or on noise, because the
    fringe terms cancel in d0 + d1 + d2.
    """
    rng = generator(rng_seed, *stream)
    mean, std = models.envelope(config)
    u = rng.random(int(n_pairs))
    v = rng.random(int(n_pairs))
    # Keep u inside (0, 1) so ndtri stays finite.
    u = np.clip(u, np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg)
    freq = mean + std * ndtri(u)
    d = models.spectral_density(config, tau, freq).as_array()
    cdf = np.cumsum(d, axis=0) / d.sum(axis=0)
    outcome = (v[None, :] >= cdf[:2]).sum(axis=0).astype(np.int8)
    return SpectralRecord(freq, outcome)


def log_likelihood(data, config: ExperimentConfig, tau) -> np.ndarray:
    """Log-likelihood of counts or a spectral record, on scalar or array ``tau``."""
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    if isinstance(data, OutcomeCounts):
        n = data.as_array().astype(float)
        p = models.outcome_probs(config, tau_arr).as_array()
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(n[:, None] > 0, n[:, None] * np.log(p), 0.0)
        out = terms.sum(axis=0)
    elif isinstance(data, SpectralRecord):
        out = np.empty(tau_arr.size)
        idx = np.arange(len(data))
        for j, t in enumerate(tau_arr):
            d = models.spectral_density(config, t, data.freq).as_array()
            with np.errstate(divide="ignore"):
                out[j] = np.sum(np.log(d[data.outcome, idx]) - np.log(d.sum(axis=0)))
    else:
        raise TypeError(f"unsupported data type {type(data).__name__}")
    return out if np.ndim(tau) else float(out[0])


def golden_section_max(f, a: float, b: float, tol: float) -> float:
    """Maximize a unimodal ``f`` on ``[a, b]`` to an absolute tolerance."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class MleResult:
    tau: float
    log_likelihood: float
    on_boundary: bool  # maximum sits on the window edge: not identifiable


def likelihood_scale(config: ExperimentConfig) -> float:
    """Length that the coarse grid samples with POINTS_PER_SCALE points."""
    sp = config.spectral
    if models.is_hom(config):
        return 1.0 / sp.sigma_minus
    return 2.0 * math.pi / sp.omega_p


def default_window(config: ExperimentConfig, tau_center: float) -> tuple[float, float]:
    """Search window used by campaigns.

    HOM likelihoods are even in the delay, so the window is ``[0, tau + 3/sigma_-]``
    and only ``|tau|`` is estimated.  N00N likelihoods repeat every half
    fringe, so the window is the half-fringe segment (length pi A'/omega_p)
    that contains ``tau_center``; the fringe extrema bound it.
    """
    sp = config.spectral
    if models.is_hom(config):
        return 0.0, abs(tau_center) + 3.0 / sp.sigma_minus
    period = math.pi * noon.noise_factor(sp, config.noise) / sp.omega_p
    k = math.floor(tau_center / period)
    return k * period, (k + 1) * period


def envelope_window(config: ExperimentConfig, tau_center: float,
                    widths: float = 2.0) -> tuple[float, float]:
    """A wide window spanning several fringes, for multi-start estimation."""
    sp = config.spectral
    s = sp.sigma_minus if models.is_hom(config) else sp.sigma_plus
    return tau_center - widths / s, tau_center + widths / s


def mle_tau(data, config: ExperimentConfig, search_window: tuple[float, float],
            points_per_scale: int = POINTS_PER_SCALE) -> MleResult:
    """Coarse grid search for the global maximum, then golden-section refinement."""
    lo, hi = map(float, search_window)
    if not hi > lo:
        raise ValueError("search window must have hi > lo")
    width = hi - lo
    n = max(points_per_scale + 1,
            int(math.ceil(width / likelihood_scale(config) * points_per_scale)) + 1)
    grid = np.linspace(lo, hi, n)
    ll = log_likelihood(data, config, grid)
    if not np.any(np.isfinite(ll)):
        raise ValueError("likelihood is zero over the whole window")
    i = int(np.argmax(ll))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, n - 1)]
    tau_hat = golden_section_max(lambda t: log_likelihood(data, config, t), a, b, 1e-10 * width)
    best = log_likelihood(data, config, tau_hat)
    if best < ll[i]:
        tau_hat, best = float(grid[i]), float(ll[i])
    # HOM likelihoods are even, so a maximum at a window edge of 0 is interior.
    even_edge = i == 0 and lo == 0.0 and models.is_hom(config)
    on_boundary = i in (0, n - 1) and not even_edge
    return MleResult(float(tau_hat), float(best), on_boundary)


@dataclass(frozen=True)
class EstimationReport:
    tau_true: float
    tau_hat_mean: float
    tau_hat_std: float
    crb_std: float
    saturation_ratio: float | None
    n_trials: int
    n_pairs_per_trial: int
    seed: int
    fisher_information: float
    n_boundary: int
    crb_infinite: bool

    def to_dict(self) -> dict:
        return {
            "tau_true": self.tau_true,
            "tau_hat_mean": self.tau_hat_mean,
            "tau_hat_std": self.tau_hat_std,
            "crb_std": None if self.crb_infinite else self.crb_std,
            "saturation_ratio": self.saturation_ratio,
            "n_trials": self.n_trials,
            "n_pairs_per_trial": self.n_pairs_per_trial,
            "seed": self.seed,
            "fisher_information": self.fisher_information,
            "n_boundary": self.n_boundary,
            "crb_infinite": self.crb_infinite,
        }


def _one_trial(config, tau_true, n_pairs, seed, trial, window):
    if Detection(config.detection) is Detection.RESOLVED:
        data = sample_spectral(config, tau_true, n_pairs, seed, (trial,))
    else:
        triple = models.outcome_probs(config, tau_true)
        data = sample_counts(triple, n_pairs, seed, (trial,))
    return mle_tau(data, config, window)


def run_campaign(config: ExperimentConfig, tau_true: float, n_trials: int, n_pairs: int,
                 rng_seed: int, window: tuple[float, float] | None = None,
                 workers: int = 1) -> EstimationReport:
    """Repeat sampling and estimation; compare the spread with 1/sqrt(n F)."""
    if n_trials < 2:
        raise ValueError("need at least two trials for a spread")
    if window is None:
        window = default_window(config, tau_true)
    fi = float(models.fisher_information(config, tau_true).value)

    def trial(i):
        return _one_trial(config, tau_true, n_pairs, rng_seed, i, window)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(trial, range(n_trials)))
    else:
        results = [trial(i) for i in range(n_trials)]
    taus = [r.tau for r in results]
    mean = math.fsum(taus) / n_trials
    std = math.sqrt(math.fsum((t - mean) ** 2 for t in taus) / (n_trials - 1))
    infinite = fi == 0.0
    crb_std = math.inf if infinite else 1.0 / math.sqrt(n_pairs * fi)
    return EstimationReport(
        tau_true=float(tau_true),
        tau_hat_mean=mean,
        tau_hat_std=std,
        crb_std=crb_std,
        saturation_ratio=None if infinite else std / crb_std,
        n_trials=int(n_trials),
        n_pairs_per_trial=int(n_pairs),
        seed=int(rng_seed),
        fisher_information=fi,
        n_boundary=sum(r.on_boundary for r in results),
        crb_infinite=infinite,
    )
