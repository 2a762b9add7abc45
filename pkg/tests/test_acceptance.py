"""Thirteen end-to-end checks, one per shipping criterion.

Each test prints one ``criterion NN: PASS/FAIL`` line with the measured
values so a plain ``pytest -v -s`` run doubles as the sign-off record.
Thresholds live inline next to the quantity they gate.
"""

import time

import numpy as np
import pytest
from scipy.special import jv

from mtsfm import (
    DelayDopplerRegion,
    GbfArgs,
    ModulationIndices,
    OptimizeOptions,
    StudyConfig,
    TaperSpec,
    acf_closed_form,
    acf_direct,
    af_closed_form,
    af_direct,
    af_direct_point,
    build_objective,
    bundled_preset,
    can_optimize,
    delay_band,
    first_null,
    gbf_coefficients,
    gbf_oracle,
    isr,
    mainlobe_width,
    minimize_af_volume,
    minimize_isr,
    mseq,
    pc_synthesize,
    periodic_acf,
    pmepr,
    random_thumbtack_init,
    snap_delays,
    spectral_efficiency,
    swept_bandwidth,
    synthesize,
    trial_study,
    truncation_order,
)


def _report(num, checks, limit_s, elapsed):
    """One line per criterion; checks is a list of (ok, detail) pairs."""
    checks = list(checks) + [(elapsed < limit_s,
                              f"elapsed {elapsed:.1f}s < {limit_s:.0f}s")]
    ok = all(c[0] for c in checks)
    detail = "; ".join(c[1] for c in checks)
    line = f"criterion {num:02d}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    assert ok, line


TABLE1 = bundled_preset("table1")
TABLE1_BW = swept_bandwidth(TABLE1)
TABLE1_BAND = TABLE1_BW + 32.0 / TABLE1.T


def test_criterion_01_reference_spectral_efficiency():
    t0 = time.perf_counter()
    w = synthesize(TABLE1, fs=10.0 * TABLE1_BW, taper=TaperSpec("tukey", 0.05))
    se = spectral_efficiency(w, TABLE1_BAND)
    _report(1, [(abs(se - 0.9954) <= 0.0015,
                 f"SE {100 * se:.3f}% vs 99.54 +- 0.15")],
            5.0, time.perf_counter() - t0)


def test_criterion_02_reference_initial_isr():
    t0 = time.perf_counter()
    tau_m = first_null(TABLE1)
    val = isr(TABLE1, delay_band(tau_m / TABLE1.T, 0.2))
    _report(2, [(abs(val - (-2.56)) <= 0.2,
                 f"sub-band ISR {val:.3f} dB vs -2.56 +- 0.2")],
            10.0, time.perf_counter() - t0)


def test_criterion_03_pmepr_by_taper():
    t0 = time.perf_counter()
    fs = 10.0 * TABLE1_BW
    rect = pmepr(synthesize(TABLE1, fs=fs))
    tuk = pmepr(synthesize(TABLE1, fs=fs, taper=TaperSpec("tukey", 0.05)))
    hann = pmepr(synthesize(TABLE1, fs=fs, taper=TaperSpec("tukey", 1.0)))
    _report(3, [(abs(rect) < 1e-12, f"rect {rect:.2e} dB"),
                (abs(tuk - 0.14) <= 0.01, f"tukey(0.05) {tuk:.3f} dB vs 0.14"),
                (abs(hann - 4.26) <= 0.02, f"hann {hann:.3f} dB vs 4.26")],
            30.0, time.perf_counter() - t0)


def test_criterion_04_coefficient_engine():
    t0 = time.perf_counter()
    cases = [
        GbfArgs(alphas=np.array([1.2]), betas=np.array([0.4])),
        GbfArgs(alphas=np.array([0.8, 1.7]), betas=np.array([0.0, 0.6])),
        GbfArgs(alphas=np.array([1.5, 0.3, 0.9]),
                betas=np.array([0.2, 1.1, 0.5])),
    ]
    worst_quad = 0.0
    worst_parseval = 0.0
    for args in cases:
        coef = gbf_coefficients(args, 20)
        for m in (-20, -7, -1, 0, 2, 13, 20):
            worst_quad = max(worst_quad, abs(coef.order(m) - gbf_oracle(args, m)))
        full = gbf_coefficients(args, truncation_order(args, 1e-9))
        worst_parseval = max(worst_parseval, full.parseval_residual())
    worst_bessel = 0.0
    for a in (0.5, 2.0, 5.0):
        single = GbfArgs(alphas=np.array([a]), betas=np.array([0.0]))
        coef = gbf_coefficients(single, 12)
        for m in range(-10, 11):
            worst_bessel = max(worst_bessel, abs(coef.order(m) - jv(m, a)))
    _report(4, [(worst_quad < 1e-9, f"quadrature max err {worst_quad:.2e}"),
                (worst_bessel < 1e-10, f"bessel max err {worst_bessel:.2e}"),
                (worst_parseval < 1e-9,
                 f"parseval residual {worst_parseval:.2e}")],
            5.0, time.perf_counter() - t0)


def test_criterion_05_closed_form_matches_samples():
    t0 = time.perf_counter()
    fs = 16000.0
    w = synthesize(TABLE1, fs=fs)
    tau = snap_delays(w, np.linspace(-0.99, 0.99, 1024) * TABLE1.T)
    r_closed = acf_closed_form(TABLE1, tau, tol=1e-11)
    _, r_direct = acf_direct(w, tau)
    acf_err = float(np.max(np.abs(r_closed - r_direct)))
    rng = np.random.default_rng(11)
    taus = snap_delays(w, rng.uniform(-0.9, 0.9, 100) * TABLE1.T)
    nus = rng.uniform(-8.0, 8.0, 100) / TABLE1.T
    af_err = 0.0
    for tv, nv in zip(taus, nus):
        closed = af_closed_form(TABLE1, np.array([tv]), np.array([nv]),
                                tol=1e-11).values[0, 0]
        af_err = max(af_err, abs(closed - af_direct_point(w, tv, nv)))
    _report(5, [(acf_err < 1e-6, f"ACF max err {acf_err:.2e} over 1024 lags"),
                (af_err < 1e-4, f"AF max err {af_err:.2e} at 100 points")],
            60.0, time.perf_counter() - t0)


def test_criterion_06_ambiguity_surface_properties():
    t0 = time.perf_counter()
    idx = random_thumbtack_init(4, 16, "full", seed=5)
    idx = ModulationIndices(a0=1.5, alphas=idx.alphas, betas=idx.betas, T=idx.T)
    peak = af_closed_form(idx, np.array([0.0]), np.array([0.0])).values[0, 0]
    peak_err = abs(peak - 1.0)
    rng = np.random.default_rng(6)
    sym_err = 0.0
    for tv, nv in zip(rng.uniform(-0.9, 0.9, 25), rng.uniform(-6.0, 6.0, 25)):
        pos = af_closed_form(idx, np.array([tv]), np.array([nv])).values[0, 0]
        neg = af_closed_form(idx, np.array([-tv]), np.array([-nv])).values[0, 0]
        sym_err = max(sym_err, abs(abs(pos) - abs(neg)))
    vol = af_direct(synthesize(idx)).volume()
    _report(6, [(peak_err <= 1e-9, f"|chi(0,0)-1| {peak_err:.2e}"),
                (sym_err <= 1e-9, f"symmetry err {sym_err:.2e}"),
                (abs(vol - 1.0) <= 1e-3, f"grid volume {vol:.6f}")],
            60.0, time.perf_counter() - t0)


def _fd_gradient_error(idx, kind, region):
    eng = build_objective(idx, kind=kind, region=region)
    x0 = eng.pack(idx)
    _, grad = eng.value_grad(x0)
    fd = np.empty_like(grad)
    for i in range(len(x0)):
        h = 1e-6 * max(1.0, abs(x0[i]))
        xp, xm = x0.copy(), x0.copy()
        xp[i] += h
        xm[i] -= h
        fd[i] = (eng.value(xp) - eng.value(xm)) / (2.0 * h)
    return float(np.max(np.abs(grad - fd)) / np.max(np.abs(fd)))


def test_criterion_07_gradients_match_finite_differences():
    t0 = time.perf_counter()
    tau_m = first_null(TABLE1)
    worst = _fd_gradient_error(TABLE1, "isr",
                               delay_band(tau_m / TABLE1.T, 0.2))
    detail = f"reference point rel err {worst:.2e}"
    ell = DelayDopplerRegion(kind="ellipse", center=(0.0, 0.0),
                             semi_axes=(0.1, 1.0))
    rand_worst = 0.0
    for trial in range(10):
        idx = random_thumbtack_init(6, 24, "full" if trial % 2 else "even",
                                    seed=100 + trial)
        kind = "isr" if trial % 2 else "af_volume"
        if kind == "isr":
            region = delay_band(first_null(idx) / idx.T, 0.5)
        else:
            region = ell
        rand_worst = max(rand_worst, _fd_gradient_error(idx, kind, region))
    _report(7, [(worst < 1e-5, detail),
                (rand_worst < 1e-5, f"10 random points rel err {rand_worst:.2e}")],
            120.0, time.perf_counter() - t0)


def test_criterion_08_sidelobe_ratio_optimization():
    t0 = time.perf_counter()
    tau_m = first_null(TABLE1)
    rep = minimize_isr(TABLE1, delay_band(tau_m / TABLE1.T, 0.2), delta=0.2,
                       options=OptimizeOptions(seed=0))
    width0 = mainlobe_width(TABLE1)
    width1 = mainlobe_width(rep.idx_opt)
    width_change = abs(width1 - width0) / width0
    _report(8, [(rep.isr_final_db <= -10.0,
                 f"final ISR {rep.isr_final_db:.2f} dB <= -10"),
                (rep.constraint_residual <= 1e-6,
                 f"corridor residual {rep.constraint_residual:.2e}"),
                (width_change < 0.10,
                 f"mainlobe width change {100 * width_change:.2f}%")],
            600.0, time.perf_counter() - t0)


def test_criterion_09_volume_clearing_three_region_types():
    t0 = time.perf_counter()
    regions = [
        ("origin ellipse", DelayDopplerRegion(
            kind="ellipse", center=(0.0, 0.0), semi_axes=(0.05, 1.0))),
        ("offset ellipse", DelayDopplerRegion(
            kind="ellipse", center=(0.08, 1.5), semi_axes=(0.03, 0.8))),
        ("annulus", DelayDopplerRegion(
            kind="annulus", inner=(0.012, 1.9), outer=(0.04, 2.1))),
    ]
    width0 = mainlobe_width(TABLE1)
    checks = []
    for name, region in regions:
        rep = minimize_af_volume(TABLE1, region, delta=0.2,
                                 options=OptimizeOptions(seed=0))
        width = mainlobe_width(rep.idx_opt)
        change = abs(width - width0) / width0
        checks.append((rep.gain >= 10.0 and rep.feasible,
                       f"{name} gain {rep.gain:.1f}x"))
        checks.append((change < 0.10,
                       f"{name} width change {100 * change:.2f}%"))
    _report(9, checks, 1800.0, time.perf_counter() - t0)


def test_criterion_10_trial_study_statistics():
    t0 = time.perf_counter()
    small = trial_study(StudyConfig(num_tones=32, tbp=64.0, symmetry="even",
                                    num_trials=10, seed=0, threads=4))
    median_gain = small.aggregates["gain"]["median"]
    feasible = small.aggregates["all_feasible"]
    even = trial_study(StudyConfig(num_tones=32, tbp=64.0, symmetry="even",
                                   num_trials=20, seed=0, threads=4))
    odd = trial_study(StudyConfig(num_tones=32, tbp=64.0, symmetry="odd",
                                  num_trials=20, seed=0, threads=4))
    med_even = even.aggregates["isr_final_db"]["median"]
    med_odd = odd.aggregates["isr_final_db"]["median"]
    _report(10, [(median_gain > 2.0, f"median G {median_gain:.2f} > 2"),
                 (feasible, "all trials feasible"),
                 (med_odd <= med_even,
                  f"odd median ISR {med_odd:.2f} <= even {med_even:.2f} dB")],
            3600.0, time.perf_counter() - t0)


def test_criterion_11_time_scaling_symmetry():
    t0 = time.perf_counter()
    base = random_thumbtack_init(4, 16, "full", seed=7)
    base = ModulationIndices(a0=3.0, alphas=base.alphas, betas=base.betas,
                             T=base.T)
    squeezed = ModulationIndices(a0=2.0 * base.a0, alphas=base.alphas,
                                 betas=base.betas, T=base.T / 2.0)
    fs = 2048.0
    lags = np.arange(int(fs * base.T))
    _, r_base = acf_direct(synthesize(base, fs=fs), lags / fs)
    _, r_half = acf_direct(synthesize(squeezed, fs=2.0 * fs), lags / (2.0 * fs))
    dev = float(np.max(np.abs(r_base - r_half)))
    _report(11, [(dev < 1e-9, f"ACF(tau) vs scaled ACF(2 tau) max dev {dev:.2e}")],
            60.0, time.perf_counter() - t0)


def _physical_isr_db(code):
    n = len(code.thetas)
    pc = pc_synthesize(code, T=1.0, fs=16.0 * n)
    tau, r = acf_direct(pc.waveform, np.linspace(-1.0, 1.0, 4 * n + 1))
    mag2 = np.abs(r) ** 2
    main = np.abs(tau) <= pc.chip_duration
    ratio = (np.trapezoid(mag2[~main], tau[~main])
             / np.trapezoid(mag2[main], tau[main]))
    return 10.0 * np.log10(ratio)


def test_criterion_12_phase_code_baselines():
    t0 = time.perf_counter()
    offpeak_exact = all(
        np.all(periodic_acf(mseq(d))[1:] == -1) for d in range(2, 11))
    start = can_optimize(64, seed=0, max_iters=0)
    tuned = can_optimize(64, seed=0)
    can_gain = _physical_isr_db(start) - _physical_isr_db(tuned)
    code = mseq(8)
    n = len(code.thetas)
    band = (n + 32.0) / 1.0
    pc_se = spectral_efficiency(pc_synthesize(code, T=1.0, fs=8.0 * n).waveform,
                                band)
    fm = synthesize(TABLE1, fs=10.0 * TABLE1_BW, taper=TaperSpec("tukey", 0.05))
    fm_se = spectral_efficiency(fm, TABLE1_BAND)
    gap_points = 100.0 * (fm_se - pc_se)
    _report(12, [(offpeak_exact, "m-seq periodic off-peak -1 exact, degrees 2-10"),
                 (can_gain >= 5.0, f"CAN-64 physical ISR gain {can_gain:.2f} dB"),
                 (abs(100.0 * pc_se - 88.97) <= 2.0,
                  f"PC SE {100 * pc_se:.2f}% vs 88.97 +- 2"),
                 (gap_points >= 8.0, f"SE gap {gap_points:.2f} points >= 8")],
            120.0, time.perf_counter() - t0)


def test_criterion_13_two_tone_landscape():
    t0 = time.perf_counter()
    fs, T = 512.0, 1.0
    n = int(fs * T)
    t = -T / 2.0 + (np.arange(n) + 0.5) / fs
    grid = np.linspace(0.0, 10.0, 200)
    a1g, a2g = np.meshgrid(grid, grid, indexing="ij")
    tau = np.arange(n) / fs
    side = (tau >= 0.1) & (tau <= 0.5)
    tone1 = np.sin(2.0 * np.pi * t / T)
    tone2 = np.sin(4.0 * np.pi * t / T)
    flat1, flat2 = a1g.ravel(), a2g.ravel()
    area = np.empty(flat1.size)
    for lo in range(0, flat1.size, 200):
        block = np.exp(1j * (flat1[lo:lo + 200, None] * tone1
                             + flat2[lo:lo + 200, None] * tone2))
        spec = np.fft.fft(block, 2 * n, axis=1)
        r = np.fft.ifft(np.abs(spec) ** 2, axis=1)[:, :n]
        r /= r[:, :1].real
        area[lo:lo + 200] = np.sum(np.abs(r[:, side]) ** 2, axis=1) / fs
    area = area.reshape(200, 200)

    from numpy.lib.stride_tricks import sliding_window_view
    wins = sliding_window_view(area, (3, 3))
    center = wins[:, :, 1, 1]
    is_min = np.ones(center.shape, dtype=bool)
    for di in range(3):
        for dj in range(3):
            if (di, dj) != (1, 1):
                is_min &= center < wins[:, :, di, dj]
    ii, jj = np.nonzero(is_min)
    count = len(ii)
    order = np.argsort(area[ii + 1, jj + 1])

    finals = []
    feasible = True
    for k in order[:3]:
        start = ModulationIndices(
            a0=0.0, alphas=np.array([grid[ii[k] + 1], grid[jj[k] + 1]]),
            betas=np.zeros(2), T=T)
        rep = minimize_isr(start, delay_band(0.1, 0.5), delta=0.2,
                           options=OptimizeOptions(free="alphas", seed=0))
        feasible &= rep.feasible and rep.objective_final <= rep.objective_init
        finals.append(np.asarray(rep.idx_opt.alphas, dtype=float))
    min_sep = min(np.linalg.norm(finals[a] - finals[b])
                  for a in range(3) for b in range(a + 1, 3))
    _report(13, [(count >= 3, f"{count} strict grid minima >= 3"),
                 (feasible, "descent and corridor hold at all three starts"),
                 (min_sep > 0.2,
                  f"distinct minimizers, min separation {min_sep:.2f}")],
            300.0, time.perf_counter() - t0)
