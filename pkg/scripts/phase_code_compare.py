#!/usr/bin/env python3
"""Put the multi-tone FM design next to classic phase-coded pulses.

Builds a maximal-length sequence and a CAN-refined polyphase code, then
tabulates spectral efficiency, PMEPR, and the physical integrated-sidelobe
ratio of each against the bundled 32-tone FM design.
"""

import argparse

import numpy as np

from mtsfm import (TaperSpec, acf_direct, bundled_preset, can_optimize,
                   delay_band, first_null, isr, merit_factor, mseq,
                   pc_synthesize, pmepr, spectral_efficiency,
                   swept_bandwidth, synthesize)


def physical_isr_db(code) -> float:
    n = len(code.thetas)
    pc = pc_synthesize(code, T=1.0, fs=16.0 * n)
    tau, r = acf_direct(pc.waveform, np.linspace(-1.0, 1.0, 4 * n + 1))
    mag2 = np.abs(r) ** 2
    main = np.abs(tau) <= pc.chip_duration
    return 10.0 * np.log10(np.trapezoid(mag2[~main], tau[~main])
                           / np.trapezoid(mag2[main], tau[main]))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degree", type=int, default=8,
                    help="shift-register degree for the m-sequence")
    ap.add_argument("--can-n", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    idx = bundled_preset("table1")
    bw = swept_bandwidth(idx)
    band = bw + 32.0 / idx.T
    w = synthesize(idx, fs=10.0 * bw, taper=TaperSpec("tukey", 0.05))
    tau_m = first_null(idx)
    rows = [("mtsfm table1",
             spectral_efficiency(w, band),
             pmepr(w),
             isr(idx, delay_band(tau_m / idx.T, 1.0)),
             np.nan)]

    for label, code in ((f"mseq degree {args.degree}", mseq(args.degree)),
                        (f"can N={args.can_n}",
                         can_optimize(args.can_n, seed=args.seed))):
        n = len(code.thetas)
        pc = pc_synthesize(code, T=1.0, fs=max(8.0 * n, 2.0 * band))
        rows.append((label,
                     spectral_efficiency(pc.waveform, band),
                     pmepr(pc.waveform),
                     physical_isr_db(code),
                     merit_factor(code)))

    print(f"band: {band:.1f} cycles per pulse")
    print(f"{'waveform':18s} {'SE':>7s} {'PMEPR dB':>9s} {'ISR dB':>8s} "
          f"{'merit':>7s}")
    for label, se, pm, isr_db, mf in rows:
        merit = f"{mf:7.2f}" if np.isfinite(mf) else "      -"
        print(f"{label:18s} {100 * se:6.2f}% {pm:9.3f} {isr_db:8.2f} {merit}")


if __name__ == "__main__":
    main()
