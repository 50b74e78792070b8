"""Rank interferometer and detection choices by the peak Fisher information they reach."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hom, noon
from .types import ChannelParams, Interferometer, NoiseParams, SpectralParams

# Fixed order, also used to break exact ties.
STRATEGIES = ("noon_resolved", "noon_nonresolved", "hom_resolved", "hom_nonresolved")
DEFAULT_GRID_POINTS = 2001
DEFAULT_GRID_STOP = 400.0  # in units of 1/omega_p
CROSSOVER_RTOL = 1e-3
SCAN_POINTS = 13

_FUNCS = {
    "noon_resolved": noon.fi_resolved,
    "noon_nonresolved": noon.fi_nonresolved,
    "hom_resolved": hom.fi_resolved,
    "hom_nonresolved": hom.fi_nonresolved,
}


def default_tau_grid(spectral: SpectralParams, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    return np.linspace(0.0, DEFAULT_GRID_STOP / spectral.omega_p, points)


def interferometer_of(strategy: str) -> Interferometer:
    return Interferometer.NOON if strategy.startswith("noon") else Interferometer.HOM


@dataclass(frozen=True)
class StrategyScore:
    strategy: str
    peak_fi: float
    argmax_tau: float
    converged: bool = True


@dataclass(frozen=True)
class Ranking:
    entries: tuple[StrategyScore, ...]
    no_information: bool

    @property
    def top(self) -> StrategyScore:
        return self.entries[0]

    @property
    def converged(self) -> bool:
        return all(e.converged for e in self.entries)

    def peak(self, strategy: str) -> float:
        return next(e.peak_fi for e in self.entries if e.strategy == strategy)


def _score(name, tau_grid, channel, spectral, noise) -> StrategyScore:
    res = _FUNCS[name](tau_grid, channel, spectral, noise)
    values = np.asarray(res.value, dtype=float)
    if not np.all(np.isfinite(values)):
        raise FloatingPointError(f"{name}: non-finite Fisher information on the grid")
    i = int(np.argmax(values))
    return StrategyScore(name, float(values[i]), float(tau_grid[i]), bool(res.converged))


def rank_strategies(channel: ChannelParams, spectral: SpectralParams, noise: NoiseParams,
                    tau_grid=None) -> Ranking:
    """Peak Fisher information of every option, best first."""
    tau_grid = default_tau_grid(spectral) if tau_grid is None else np.asarray(tau_grid, float)
    if tau_grid.ndim != 1 or tau_grid.size == 0:
        raise ValueError("tau_grid must be a non-empty 1-D array")
    scores = [_score(name, tau_grid, channel, spectral, noise) for name in STRATEGIES]
    # sorted() is stable, so equal peaks keep the fixed order.
    ranked = tuple(sorted(scores, key=lambda s: -s.peak_fi))
    return Ranking(ranked, all(s.peak_fi == 0.0 for s in scores))


@dataclass(frozen=True)
class CrossoverResult:
    found: bool
    eta_star: float | None  # eta_eps where the top interferometer switches
    n_switches: int
    eta_grid: np.ndarray
    hom_peak: np.ndarray  # best HOM peak FI at each eta_grid point
    noon_peak: np.ndarray
    message: str


def _peaks(channel, spectral, eta_eps, eta_theta, tau_grid):
    r = rank_strategies(channel, spectral, NoiseParams(eta_eps, eta_theta), tau_grid)
    h = max(r.peak("hom_resolved"), r.peak("hom_nonresolved"))
    n = max(r.peak("noon_resolved"), r.peak("noon_nonresolved"))
    return h, n, interferometer_of(r.top.strategy)


def crossover_noise(channel: ChannelParams, spectral: SpectralParams, tau_grid=None,
                    eta_range: tuple[float, float] | None = None, eta_theta: float = 0.0,
                    scan_points: int = SCAN_POINTS, rtol: float = CROSSOVER_RTOL) -> CrossoverResult:
    """Locate the eta_eps at which the best interferometer changes.

    The range is scanned on ``scan_points`` values and the first bracket
    with a switch is bisected until its width is ``rtol`` of its upper end.
    Without a switch the result says so and ``eta_star`` is None.
    """
    if eta_range is None:
        eta_range = (0.0, 3.0 / spectral.omega_p)
    lo, hi = map(float, eta_range)
    if not hi > lo >= 0.0:
        raise ValueError("eta_range must satisfy 0 <= lo < hi")
    tau_grid = default_tau_grid(spectral) if tau_grid is None else np.asarray(tau_grid, float)
    etas = np.linspace(lo, hi, scan_points)
    rows = [_peaks(channel, spectral, e, eta_theta, tau_grid) for e in etas]
    hom_peak = np.array([r[0] for r in rows])
    noon_peak = np.array([r[1] for r in rows])
    tops = [r[2] for r in rows]
    switches = [i for i in range(scan_points - 1) if tops[i] is not tops[i + 1]]
    if not switches:
        return CrossoverResult(False, None, 0, etas, hom_peak, noon_peak,
                               f"no crossover: {tops[0].value} leads over the whole range")
    a, b = etas[switches[0]], etas[switches[0] + 1]
    top_a = tops[switches[0]]
    while b - a > rtol * b:
        m = 0.5 * (a + b)
        if _peaks(channel, spectral, m, eta_theta, tau_grid)[2] is top_a:
            a = m
        else:
            b = m
    eta_star = 0.5 * (a + b)
    msg = f"{top_a.value} leads below eta_eps={eta_star:.6g}"
    if len(switches) > 1:
        msg += f"; {len(switches)} switches in range, first reported"
    return CrossoverResult(True, eta_star, len(switches), etas, hom_peak, noon_peak, msg)


def crossover_is_stable(first: CrossoverResult, second: CrossoverResult, tol: float) -> bool:
    if not (first.found and second.found):
        return first.found == second.found
    return math.isclose(first.eta_star, second.eta_star, rel_tol=0.0, abs_tol=tol)
