"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test records one PASS/FAIL line, printed in the pytest terminal
summary (and directly when this file is run as a script).
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest
from scipy.signal import argrelmax

from twophoton import hom, models, noon, simulation, strategy, validation
from twophoton.types import ChannelParams, NoiseParams, SpectralParams

from conftest import ACCEPTANCE_LINES, make_config

SP = SpectralParams(0.01, 0.01, 1.0)
GRID = np.linspace(0.0, 400.0, 2001)
PRESET_CHANNELS = {"fig1a": ChannelParams(0.0, 1.0), "fig1b": ChannelParams(0.0, 0.9),
                   "fig1c": ChannelParams(0.4, 0.9)}
CAMPAIGN_SEED = 2025


def record(n, passed, text, seconds, budget):
    ok = passed and seconds < budget
    line = (f"criterion {n:>2}: {'PASS' if ok else 'FAIL'} {text} "
            f"[{seconds:.1f}s, budget {budget:g}s]")
    ACCEPTANCE_LINES[n] = line
    print(line)
    return ok


def _checks(n, checks, seconds, budget):
    text = "; ".join(f"{c.name} worst={c.worst:.2g}" for c in checks)
    assert record(n, all(c.passed for c in checks), text, seconds, budget), \
        "\n".join(c.line() for c in checks)


def test_criterion_01_normalization():
    t0 = time.perf_counter()
    checks = validation.check_normalization(1000)
    _checks(1, checks, time.perf_counter() - t0, 10)


def test_criterion_02_noise_oracle():
    t0 = time.perf_counter()
    checks = validation.check_noise_oracle(200)
    _checks(2, checks, time.perf_counter() - t0, 30)


def test_criterion_03_qcrb_anchors():
    t0 = time.perf_counter()
    checks = validation.check_qcrb_anchors(20)
    _checks(3, checks, time.perf_counter() - t0, 10)


def test_criterion_04_fisher_cross_validation():
    t0 = time.perf_counter()
    checks = validation.check_fisher_cross(200)
    _checks(4, checks, time.perf_counter() - t0, 30)


def test_criterion_05_hom_noise_insensitivity():
    """Pointwise relative change of F on the fig1c grid between eta_eps*omega_p = 0 and 3."""
    t0 = time.perf_counter()
    ch = PRESET_CHANNELS["fig1c"]
    worst, peak_change, dominance = {}, {}, True
    for det, fn in (("nonresolved", hom.fi_nonresolved), ("resolved", hom.fi_resolved)):
        f0 = np.asarray(fn(GRID, ch, SP, NoiseParams(0.0)).value)
        f3 = np.asarray(fn(GRID, ch, SP, NoiseParams(3.0)).value)
        live = f0 > 0
        worst[det] = float(np.max(np.abs(f3[live] - f0[live]) / f0[live]))
        peak_change[det] = abs(f3.max() / f0.max() - 1)
    for eta in (0.0, 1.0, 3.0):
        r = hom.fi_resolved(GRID, ch, SP, NoiseParams(eta))
        n = hom.fi_nonresolved(GRID, ch, SP, NoiseParams(eta))
        dominance &= bool(np.all(r.value + r.err_estimate >= n.value))
    passed = max(worst.values()) <= 0.02 and dominance
    text = ("max pointwise |dF|/F: " + ", ".join(f"{k}={v:.3%}" for k, v in worst.items())
            + " (limit 2%); peak change: "
            + ", ".join(f"{k}={v:.3%}" for k, v in peak_change.items())
            + f"; resolved>=nonresolved on all 2001 points: {dominance}")
    assert record(5, passed, text, time.perf_counter() - t0, 60), text


def test_criterion_06_noon_noise_suppression():
    t0 = time.perf_counter()
    ideal = ChannelParams(0.0, 1.0)
    parts, ok = [], True
    for det, fn in (("nonresolved", noon.fi_nonresolved), ("resolved", noon.fi_resolved)):
        peak = {lv: float(np.max(fn(GRID, ideal, SP, NoiseParams(*lv)).value))
                for lv in ((0.0, 0.0), (1.0, 0.0), (3.0, 0.0), (0.0, 1.0))}
        r1 = peak[(1.0, 0.0)] / peak[(0.0, 0.0)]
        r3 = peak[(3.0, 0.0)] / peak[(0.0, 0.0)]
        rt = peak[(0.0, 1.0)] / peak[(0.0, 0.0)]
        ok &= 0.3 <= r1 <= 0.45 and r3 <= 1e-3 and rt < 1.0
        parts.append(f"{det}: eta1={r1:.4f} eta3={r3:.2e} theta1={rt:.4f}")
    fine = np.linspace(1.0, 50.0, 49001)
    curves = [noon.fi_nonresolved(fine, ChannelParams(0.0, 0.9), SP, NoiseParams()).value]
    for lv in ((1.0, 0.0), (3.0, 0.0), (0.0, 1.0)):
        curves.append(noon.fi_nonresolved(fine, ideal, SP, NoiseParams(*lv)).value)
        curves.append(noon.fi_resolved(fine, ideal, SP, NoiseParams(*lv)).value)
    spacing_err = max(float(np.max(np.abs(np.diff(fine[argrelmax(c)[0]]) / math.pi - 1)))
                      for c in curves)
    ok &= spacing_err <= 0.01
    parts.append(f"maxima spacing vs pi: worst {spacing_err:.3%}")
    text = "; ".join(parts)
    assert record(6, ok, text, time.perf_counter() - t0, 60), text


def test_criterion_07_peak_ratio():
    t0 = time.perf_counter()
    ratios = {}
    for name, ch in PRESET_CHANNELS.items():
        for det, fh, fn in (("nonresolved", hom.fi_nonresolved, noon.fi_nonresolved),
                            ("resolved", hom.fi_resolved, noon.fi_resolved)):
            h = np.max(fh(GRID, ch, SP, NoiseParams()).value)
            n = np.max(fn(GRID, ch, SP, NoiseParams()).value)
            ratios[f"{name}/{det}"] = float(n / h)
    passed = all(5e3 <= r <= 5e4 for r in ratios.values())
    text = ("N00N/HOM peak ratio " + ", ".join(f"{k}={v:.0f}" for k, v in ratios.items())
            + " (band [5e3, 5e4])")
    assert record(7, passed, text, time.perf_counter() - t0, 10), text


def test_criterion_08_crb_saturation():
    t0 = time.perf_counter()
    cfg = make_config("hom", "nonresolved", gamma=0.0, visibility=0.9)
    taus = np.linspace(0.0, 3.0 / SP.sigma_minus, 20001)
    tau_star = float(taus[np.argmax(models.fisher_information(cfg, taus).value)])
    rep = simulation.run_campaign(cfg, tau_star, 200, 10_000, CAMPAIGN_SEED)
    bias = abs(rep.tau_hat_mean - tau_star)
    bias_limit = 3 * rep.crb_std / math.sqrt(rep.n_trials)
    passed = 0.95 <= rep.saturation_ratio <= 1.35 and bias <= bias_limit
    text = (f"seed={CAMPAIGN_SEED} omega_p*tau*={tau_star:g} saturation={rep.saturation_ratio:.4f} "
            f"(band [0.95, 1.35]); |bias|={bias:.4f} limit={bias_limit:.4f}")
    assert record(8, passed, text, time.perf_counter() - t0, 120), text


def test_criterion_09_strategy_crossover():
    t0 = time.perf_counter()
    ch = PRESET_CHANNELS["fig1c"]
    quiet = strategy.rank_strategies(ch, SP, NoiseParams(0.0), GRID)
    loud = strategy.rank_strategies(ch, SP, NoiseParams(3.0), GRID)
    coarse = strategy.crossover_noise(ch, SP, GRID, (0.0, 3.0))
    fine = strategy.crossover_noise(ch, SP, np.linspace(0.0, 400.0, 4001), (0.0, 3.0))
    step = coarse.eta_grid[1] - coarse.eta_grid[0]
    stable = coarse.found and fine.found and abs(coarse.eta_star - fine.eta_star) <= step
    passed = (quiet.top.strategy.startswith("noon") and loud.top.strategy.startswith("hom")
              and coarse.n_switches == 1 and fine.n_switches == 1 and stable)
    text = (f"top at 0: {quiet.top.strategy}; top at 3: {loud.top.strategy}; "
            f"crossover eta_eps*omega_p={coarse.eta_star:.6g} (2001 pts) "
            f"vs {fine.eta_star:.6g} (4001 pts); switches={coarse.n_switches}")
    assert record(9, passed, text, time.perf_counter() - t0, 60), text


def _cli(*args):
    out = subprocess.run([sys.executable, "-m", "twophoton.cli", *args], check=True,
                         capture_output=True)
    return out.stdout


def test_criterion_10_determinism():
    t0 = time.perf_counter()
    sim_args = ("simulate", "--visibility", "0.9", "--tau-stop", "300", "--tau-points", "3001",
                "--seed", "11", "--n-trials", "50")
    sweep_args = ("sweep", "--preset", "fig1c", "--tau-points", "401")
    same_sim = _cli(*sim_args) == _cli(*sim_args)
    same_sweep = _cli(*sweep_args) == _cli(*sweep_args)
    json_sweep = _cli(*sweep_args, "--format", "json")
    same_json = json_sweep == _cli(*sweep_args, "--format", "json")
    json.loads(json_sweep)
    passed = same_sim and same_sweep and same_json
    text = f"simulate identical={same_sim}; sweep csv identical={same_sweep}, json={same_json}"
    assert record(10, passed, text, time.perf_counter() - t0, 120), text


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
