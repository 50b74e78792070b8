"""Oracle-equivalence checks run by ``twophoton validate`` and the acceptance tests.

Each check compares a closed form against an independent route: direct
quadrature of the densities, Gauss-Hermite averaging over the noise, or
finite-difference Fisher information.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import fisher, hom, models, noon
from .noise import average_over_noise
from .quadrature import integrate
from .types import (ChannelParams, Detection, ExperimentConfig, Interferometer,
                    NoiseParams, SpectralParams, qcrb)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    n_cases: int
    seconds: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: worst={self.worst:.3g} tol={self.tolerance:.3g} "
                f"cases={self.n_cases} time={self.seconds:.2f}s {self.detail}").rstrip()


def random_config(rng: np.random.Generator, interferometer: Interferometer,
                  detection: Detection = Detection.NON_RESOLVED) -> ExperimentConfig:
    """A random scenario at omega_p = 1 spanning the parameter ranges of interest."""
    s_minus, s_plus = np.exp(rng.uniform(math.log(0.003), math.log(0.3), 2))
    return ExperimentConfig(
        spectral=SpectralParams(float(s_minus), float(s_plus), 1.0),
        channel=ChannelParams(float(rng.uniform(0.0, 0.9)), float(rng.uniform(0.0, 1.0))),
        noise=NoiseParams(float(rng.uniform(0.0, 3.0)), float(rng.uniform(0.0, 1.0))),
        interferometer=interferometer,
        detection=detection,
    )


def random_tau(rng: np.random.Generator, config: ExperimentConfig) -> float:
    sp = config.spectral
    s = sp.sigma_minus if models.is_hom(config) else sp.sigma_plus
    return float(rng.uniform(-3.0, 3.0) / s)


def _rel(a, b) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    scale = np.max(np.abs(b))
    return float(np.max(np.abs(a - b)) / scale) if scale > 0 else float(np.max(np.abs(a)))


def _result(name, errors, tol, t0, detail=""):
    worst = max(errors) if errors else 0.0
    return CheckResult(name, worst <= tol, worst, tol, len(errors), time.perf_counter() - t0, detail)


def check_normalization(n_draws: int = 1000, seed: int = 1) -> list[CheckResult]:
    """Triples sum to one; resolved densities integrate to 1 (N00N) and 2 (HOM)."""
    rng = np.random.default_rng(seed)
    out = []
    for ifo in Interferometer:
        t0 = time.perf_counter()
        sums, integrals = [], []
        target = 2.0 if ifo is Interferometer.HOM else 1.0
        for _ in range(n_draws):
            cfg = random_config(rng, ifo)
            tau = random_tau(rng, cfg)
            sums.append(abs(float(models.outcome_probs(cfg, tau).total()) - 1.0))
            lo, hi = models.frequency_window(cfg)
            span = (hi - lo) * abs(tau)

            def dens(w, cfg=cfg, tau=tau):
                return models.spectral_density(cfg, tau, w, normalized=False).total()

            res = integrate(dens, lo, hi, rtol=1e-12, n_init=8 + int(math.ceil(span / math.pi)))
            integrals.append(abs(float(res.value) - target))
        out.append(_result(f"normalization/{ifo.value}/triple", sums, 1e-12, t0))
        out.append(_result(f"normalization/{ifo.value}/resolved", integrals, 1e-8, t0,
                           f"target={target:g}"))
    return out


def _oracle_triple(cfg, tau, order):
    ch, sp = cfg.channel, cfg.spectral
    if models.is_hom(cfg):
        def f(e, t):
            return hom.probs_noiseless(tau, e, ch, sp, t).as_array()
    else:
        def f(e, t):
            return noon.probs_noiseless(tau, e, t, ch, sp).as_array()
    return average_over_noise(f, cfg.noise, order)


def _oracle_density(cfg, tau, omega, order):
    ch, sp = cfg.channel, cfg.spectral
    if models.is_hom(cfg):
        def f(e, t):
            return hom.resolved_density(tau, omega, e, ch, sp).as_array()
    else:
        def f(e, t):
            return noon.resolved_density(tau, omega, e, t, ch, sp).as_array()
    return average_over_noise(f, cfg.noise, order)


def check_noise_oracle(n_draws: int = 200, seed: int = 2, tol: float = 1e-8) -> list[CheckResult]:
    """Closed-form noise averages against Gauss-Hermite averaging at orders 64 and 96."""
    rng = np.random.default_rng(seed)
    out = []
    for ifo in Interferometer:
        for resolved in (False, True):
            t0 = time.perf_counter()
            errors, spread = [], []
            for _ in range(n_draws):
                cfg = random_config(rng, ifo)
                tau = random_tau(rng, cfg)
                if resolved:
                    mean, std = models.envelope(cfg)
                    omega = float(mean + std * rng.uniform(-3.0, 3.0))
                    closed = models.spectral_density(cfg, tau, omega, normalized=False).as_array()
                    o64 = _oracle_density(cfg, tau, omega, 64)
                    o96 = _oracle_density(cfg, tau, omega, 96)
                else:
                    closed = models.outcome_probs(cfg, tau).as_array()
                    o64 = _oracle_triple(cfg, tau, 64)
                    o96 = _oracle_triple(cfg, tau, 96)
                spread.append(_rel(o64, o96))
                errors.append(_rel(closed, o96))
            kind = "resolved" if resolved else "nonresolved"
            res = _result(f"noise-oracle/{ifo.value}/{kind}", errors, tol, t0,
                          f"order64-vs-96={max(spread):.2g}")
            if max(spread) > tol:
                res = CheckResult(res.name, False, res.worst, tol, res.n_cases, res.seconds,
                                  res.detail + " (oracle orders disagree)")
            out.append(res)
    return out


def check_qcrb_anchors(n_tau: int = 20) -> list[CheckResult]:
    """Ideal noiseless Fisher information equals the quantum bound at every delay."""
    sp = SpectralParams(0.01, 0.01, 1.0)
    ideal = ChannelParams(0.0, 1.0)
    quiet = NoiseParams()
    out = []
    for ifo, mod, s in ((Interferometer.HOM, hom, sp.sigma_minus),
                        (Interferometer.NOON, noon, sp.sigma_plus)):
        bound = qcrb(ifo, sp)
        t0 = time.perf_counter()
        closed = mod.fi_nonresolved(0.0, ideal, sp, quiet).value
        out.append(_result(f"qcrb/{ifo.value}/closed-form-limit", [abs(closed / bound - 1.0)],
                           1e-9, t0, f"F={closed:.12g} bound={bound:.12g}"))
        t0 = time.perf_counter()
        taus = np.linspace(0.0, 5.0 / s, n_tau)
        res = mod.fi_resolved(taus, ideal, sp, quiet)
        errors = list(np.abs(np.asarray(res.value) / bound - 1.0))
        out.append(_result(f"qcrb/{ifo.value}/resolved", errors, 1e-6, t0))
    return out


def check_fisher_cross(n_draws: int = 200, seed: int = 4, tol: float = 1e-6) -> list[CheckResult]:
    """Closed-form non-resolved Fisher information against finite differences."""
    rng = np.random.default_rng(seed)
    out = []
    for ifo in Interferometer:
        t0 = time.perf_counter()
        errors = []
        while len(errors) < n_draws:
            cfg = random_config(rng, ifo)
            tau = random_tau(rng, cfg)
            closed = float(models.fisher_information(cfg, tau, Detection.NON_RESOLVED).value)
            if closed <= 1e-8 * qcrb(ifo, cfg.spectral):
                continue
            fd = fisher.fi_from_triple(lambda t, cfg=cfg: models.outcome_probs(cfg, t), tau,
                                       models.default_fd_step(cfg)).value
            errors.append(abs(closed / fd - 1.0))
        out.append(_result(f"fisher-cross/{ifo.value}/nonresolved", errors, tol, t0))
    return out


def run_all(quick: bool = False) -> list[CheckResult]:
    n = 50 if quick else None
    return (check_normalization(n or 1000)
            + check_noise_oracle(n or 200)
            + check_qcrb_anchors()
            + check_fisher_cross(n or 200))
