"""Phase-coded baseline waveforms: m-sequences and CAN polyphase codes.

These provide the comparison points for the FM designs: classic bi-phase
maximal-length sequences generated by a linear-feedback shift register, and
polyphase codes refined by the cyclic FFT-projection algorithm that drives
the zero-padded code spectrum toward constant modulus.  A small synthesis
routine turns any code into a sampled waveform with rectangular chips so the
usual pulse metrics apply unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .waveform import RECTANGULAR, SampledWaveform, TaperSpec

# Primitive-polynomial exponents per register degree.  Entry [d, a, b, ...]
# stands for x^d + x^a + x^b + ... + 1 over GF(2).
_PRIMITIVE_TAPS = {
    2: (2, 1),
    3: (3, 1),
    4: (4, 1),
    5: (5, 2),
    6: (6, 1),
    7: (7, 1),
    8: (8, 6, 5, 4),
    9: (9, 4),
    10: (10, 3),
    11: (11, 2),
    12: (12, 6, 4, 1),
}


@dataclass(frozen=True)
class PhaseCode:
    """Chip phases of a phase-coded pulse, in radians."""

    thetas: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        thetas = np.atleast_1d(np.asarray(self.thetas, dtype=float))
        if thetas.ndim != 1 or len(thetas) < 2:
            raise ValueError("a phase code needs at least two chips")
        object.__setattr__(self, "thetas", thetas)

    def __len__(self) -> int:
        return len(self.thetas)

    @property
    def chips(self) -> np.ndarray:
        """Unit-modulus chip values exp(j thetas)."""
        return np.exp(1j * self.thetas)

    def to_dict(self) -> dict:
        return {"thetas": self.thetas.tolist(), "provenance": self.provenance}

    @classmethod
    def from_dict(cls, d: dict) -> "PhaseCode":
        return cls(thetas=np.asarray(d["thetas"], dtype=float),
                   provenance=d.get("provenance", {}))


def mseq(degree: int, seed_state: int = 1) -> PhaseCode:
    """Maximal-length bi-phase sequence from a Fibonacci shift register.

    The register uses a built-in primitive polynomial for the degree, so the
    output period is 2**degree - 1 and the periodic autocorrelation equals
    -1 at every nonzero lag.  ``seed_state`` is the initial register fill
    (any nonzero degree-bit integer); different seeds give cyclic shifts of
    the same sequence.
    """
    if degree not in _PRIMITIVE_TAPS:
        raise ValueError("degree must be between 2 and 12")
    state = int(seed_state)
    if not 0 < state < 2 ** degree:
        raise ValueError("seed state must be a nonzero value below 2**degree")
    taps = _PRIMITIVE_TAPS[degree]
    # recurrence straight from the polynomial: with state[j] = b_{m+j},
    # x^d + x^a + ... + 1 = 0 reads b_{m+d} = b_m xor b_{m+a} xor ...
    fb_idx = [0] + [e for e in taps if e < degree]
    regs = [(state >> i) & 1 for i in range(degree)]
    n = 2 ** degree - 1
    bits = np.empty(n, dtype=np.int64)
    for i in range(n):
        bits[i] = regs[0]
        fb = 0
        for j in fb_idx:
            fb ^= regs[j]
        regs = regs[1:] + [fb]
    thetas = np.where(bits == 1, 0.0, np.pi)
    return PhaseCode(thetas=thetas,
                     provenance={"kind": "mseq", "degree": degree,
                                 "taps": list(taps), "seed_state": state})


def pad_to_power_of_two(code: PhaseCode) -> PhaseCode:
    """Repeat the final chip until the code length is a power of two.

    Length-(2^d - 1) register sequences land on power-of-two time-bandwidth
    grids this way; the padding is recorded in provenance.
    """
    n = len(code)
    target = 1
    while target < n:
        target *= 2
    if target == n:
        return code
    thetas = np.concatenate([code.thetas,
                             np.full(target - n, code.thetas[-1])])
    prov = dict(code.provenance)
    prov["padded_from"] = n
    return PhaseCode(thetas=thetas, provenance=prov)


def periodic_acf(code: PhaseCode) -> np.ndarray:
    """Cyclic autocorrelation of the chip sequence at lags 0..N-1."""
    x = code.chips
    spec = np.fft.fft(x)
    r = np.fft.ifft(spec * np.conj(spec))
    if np.allclose(x.imag, 0.0):
        return np.round(r.real).astype(np.int64)
    return r


def aperiodic_acf(code: PhaseCode) -> np.ndarray:
    """Linear (zero-padded) chip autocorrelation at lags -(N-1)..N-1."""
    x = code.chips
    n = len(x)
    nfft = 1
    while nfft < 2 * n:
        nfft *= 2
    spec = np.fft.fft(x, nfft)
    r = np.fft.ifft(np.abs(spec) ** 2)
    return np.concatenate([r[-(n - 1):], r[:n]])


def isl(code: PhaseCode) -> float:
    """Integrated sidelobe level sum_{l != 0} |r_l|^2 of the chip ACF."""
    r = aperiodic_acf(code).astype(complex)
    n = len(code)
    mag2 = np.abs(r) ** 2
    return float(mag2.sum() - mag2[n - 1])


def merit_factor(code: PhaseCode) -> float:
    """Golay merit factor N^2 / (2 sum_{l>0} |r_l|^2)."""
    return len(code) ** 2 / isl(code)


def can_optimize(n: int, seed: int = 0, max_iters: int = 10_000,
                 tol: float = 1e-5) -> PhaseCode:
    """Polyphase code with low aperiodic sidelobes via cyclic FFT projection.

    Starting from uniformly random phases, alternate between projecting the
    length-2N spectrum of the zero-padded code onto constant modulus and
    projecting the resulting time series back onto unimodular chips.  Each
    half-step cannot increase the fit criterion || |spectrum| - sqrt(N) ||^2,
    so the criterion history is non-increasing.  Iteration stops when the
    largest per-chip phase change drops below ``tol`` or at ``max_iters``.

    The returned provenance carries the criterion and sidelobe histories;
    the returned code never has worse integrated sidelobes than the start.
    """
    if n < 4:
        raise ValueError("need at least four chips")
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(0.0, 2.0 * np.pi, n)
    root_n = np.sqrt(n)
    surrogate_hist = []
    isl_hist = []
    best_thetas = thetas.copy()
    best_isl = np.inf
    iters = 0
    converged = False
    for iters in range(1, max_iters + 1):
        x = np.exp(1j * thetas)
        spec = np.fft.fft(x, 2 * n)
        mag = np.abs(spec)
        surrogate_hist.append(float(np.sum((mag - root_n) ** 2)))
        # aperiodic correlation falls out of the already-computed spectrum
        r = np.fft.ifft(mag ** 2)
        mag2 = np.abs(r) ** 2
        isl_now = float(np.sum(mag2) - mag2[0])
        isl_hist.append(isl_now)
        if isl_now < best_isl:
            best_isl = isl_now
            best_thetas = thetas.copy()
        v = np.where(mag > 0.0, spec / np.where(mag > 0.0, mag, 1.0), 1.0)
        g = np.fft.ifft(v)[:n]
        thetas_new = np.angle(g)
        delta = np.angle(np.exp(1j * (thetas_new - thetas)))
        thetas = thetas_new
        if np.max(np.abs(delta)) < tol:
            converged = True
            break
    final = PhaseCode(thetas=thetas, provenance={})
    if isl_hist and isl(final) > isl_hist[0]:
        thetas = best_thetas
    return PhaseCode(thetas=thetas,
                     provenance={"kind": "can", "seed": seed,
                                 "iterations": iters, "converged": converged,
                                 "tol": tol,
                                 "surrogate_history": surrogate_hist,
                                 "isl_history": isl_hist})


def barker13() -> PhaseCode:
    """The length-13 Barker code (peak aperiodic sidelobe 1/13 of the peak)."""
    signs = np.array([1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1])
    return PhaseCode(thetas=np.where(signs == 1, 0.0, np.pi),
                     provenance={"kind": "barker", "length": 13})


@dataclass(frozen=True)
class PcWaveform:
    """A sampled phase-coded pulse plus its chip geometry."""

    waveform: SampledWaveform
    num_chips: int
    chip_duration: float


def pc_synthesize(code: PhaseCode, T: float, fs: float,
                  taper: TaperSpec = RECTANGULAR) -> PcWaveform:
    """Sample a phase code as a rectangular-chip pulse of length T.

    Chips are ideal rectangles, so the phase is piecewise constant on the
    grid and the rectangular-taper pulse has exactly 0 dB PMEPR.  Requires
    at least 4 samples per chip.
    """
    n_chips = len(code)
    if fs * T / n_chips < 4.0:
        raise ValueError(
            f"undersampled chips: fs*T/N = {fs * T / n_chips:.2f} < 4")
    num = int(round(fs * T))
    t = -T / 2.0 + (np.arange(num) + 0.5) / fs
    chip_idx = np.floor((t + T / 2.0) * n_chips / T).astype(int)
    chip_idx = np.clip(chip_idx, 0, n_chips - 1)
    samples = np.exp(1j * code.thetas[chip_idx])
    samples = samples * taper.amplitude((t + T / 2.0) / T)
    energy = np.sum(np.abs(samples) ** 2) / fs
    samples = samples / np.sqrt(energy)
    wf = SampledWaveform(
        t=t, samples=samples, fs=float(fs), T=float(T),
        provenance={"kind": "phase_code", "num_chips": n_chips,
                    "code": code.provenance,
                    "taper": {"kind": taper.kind, "alpha": taper.alpha}})
    return PcWaveform(waveform=wf, num_chips=n_chips,
                      chip_duration=T / n_chips)
