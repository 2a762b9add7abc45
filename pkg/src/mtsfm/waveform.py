"""Multi-tone sinusoidal FM waveform synthesis and frequency-domain metrics.

The pulse model is a constant-modulus complex exponential on t in [-T/2, T/2):

    s(t) = a(t)/sqrt(T) * exp{j phi(t)}
    phi(t) = pi*a0*t + sum_k alpha_k sin(2 pi k t / T) - beta_k cos(2 pi k t / T)

where a(t) is an optional amplitude taper.  The instantaneous-frequency
(modulation) function is the trigonometric series m(t) = a0/2
+ sum_k a_k cos(2 pi k t/T) + b_k sin(2 pi k t/T) with a_k = alpha_k * k / T
and b_k = beta_k * k / T; designs are stated in terms of the dimensionless
modulation indices alpha_k, beta_k so that stretching T leaves them unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gbf import GbfArgs, gbf_coefficients, truncation_order

BANDWIDTH_GRID = 4096  # samples of m(t) used for the swept-bandwidth estimate
DEFAULT_OVERSAMPLE = 10.0  # default fs as a multiple of the swept bandwidth


@dataclass(frozen=True)
class ModulationIndices:
    """Design vector of an MTSFM pulse.

    Attributes:
        a0: constant frequency-offset coefficient (Hz scale, often zero).
        alphas: indices of the sine phase tones, one per harmonic k = 1..K.
        betas: indices of the cosine phase tones, same length as alphas.
        T: pulse length in seconds.
    """

    a0: float
    alphas: np.ndarray
    betas: np.ndarray
    T: float

    def __post_init__(self):
        alphas = np.atleast_1d(np.asarray(self.alphas, dtype=float))
        betas = np.atleast_1d(np.asarray(self.betas, dtype=float))
        if alphas.shape != betas.shape or alphas.ndim != 1:
            raise ValueError("alphas and betas must be 1-D and equal length")
        if not np.all(np.isfinite(alphas)) or not np.all(np.isfinite(betas)):
            raise ValueError("modulation indices must be finite")
        if not (self.T > 0 and np.isfinite(self.T)):
            raise ValueError("pulse length T must be positive and finite")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "T", float(self.T))

    @property
    def num_tones(self) -> int:
        return len(self.alphas)

    def gbf_args(self) -> GbfArgs:
        return GbfArgs(alphas=self.alphas, betas=self.betas)

    def to_dict(self) -> dict:
        return {
            "a0": self.a0,
            "alphas": self.alphas.tolist(),
            "betas": self.betas.tolist(),
            "T": self.T,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModulationIndices":
        return cls(a0=d["a0"], alphas=np.asarray(d["alphas"], dtype=float),
                   betas=np.asarray(d["betas"], dtype=float), T=d["T"])


@dataclass(frozen=True)
class TaperSpec:
    """Amplitude taper over the full pulse.

    ``kind`` is "rectangular" or "tukey".  For the Tukey taper, ``alpha`` is
    the total fraction of the pulse occupied by the two cosine ramps (half at
    each edge); alpha = 0 degenerates to rectangular and alpha = 1 is a Hann
    window.
    """

    kind: str = "rectangular"
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("rectangular", "tukey"):
            raise ValueError(f"unknown taper kind {self.kind!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("taper alpha must lie in [0, 1]")

    def amplitude(self, x: np.ndarray) -> np.ndarray:
        """Taper amplitude at normalized pulse positions x in [0, 1]."""
        x = np.asarray(x, dtype=float)
        w = np.ones_like(x)
        if self.kind == "rectangular" or self.alpha == 0.0:
            return w
        edge = self.alpha / 2.0
        lo = x < edge
        hi = x > 1.0 - edge
        w[lo] = 0.5 * (1.0 + np.cos(np.pi * (2.0 * x[lo] / self.alpha - 1.0)))
        w[hi] = 0.5 * (1.0 + np.cos(np.pi * (2.0 * (1.0 - x[hi]) / self.alpha - 1.0)))
        return w


RECTANGULAR = TaperSpec()


@dataclass(frozen=True)
class SampledWaveform:
    """Unit-energy baseband samples of a pulse on a half-offset time grid.

    The grid is t_n = -T/2 + (n + 1/2)/fs, which keeps every sample strictly
    inside the pulse and makes the grid symmetric about t = 0, so time
    reversal maps samples onto samples.
    """

    t: np.ndarray
    samples: np.ndarray
    fs: float
    T: float
    provenance: dict = field(default_factory=dict)

    @property
    def num_samples(self) -> int:
        return len(self.samples)

    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) / self.fs)


def phase_function(idx: ModulationIndices, t: np.ndarray) -> np.ndarray:
    """Instantaneous phase phi(t) in radians."""
    t = np.asarray(t, dtype=float)
    k = np.arange(1, idx.num_tones + 1)
    arg = 2.0 * np.pi * np.multiply.outer(t, k) / idx.T
    return (np.pi * idx.a0 * t
            + np.sin(arg) @ idx.alphas - np.cos(arg) @ idx.betas)


def modulation_function(idx: ModulationIndices, t: np.ndarray) -> np.ndarray:
    """Instantaneous frequency m(t) = phi'(t) / (2 pi) in Hz."""
    t = np.asarray(t, dtype=float)
    k = np.arange(1, idx.num_tones + 1)
    a = idx.alphas * k / idx.T
    b = idx.betas * k / idx.T
    arg = 2.0 * np.pi * np.multiply.outer(t, k) / idx.T
    return idx.a0 / 2.0 + np.cos(arg) @ a + np.sin(arg) @ b


def swept_bandwidth(idx: ModulationIndices) -> float:
    """Peak-to-peak excursion of m(t), evaluated on a fixed 4096-point grid.

    This operational definition is what "swept bandwidth" means everywhere
    in the package (sampling-rate defaults, bandwidth rescaling, quadrature
    densities).
    """
    t = -idx.T / 2.0 + idx.T * np.arange(BANDWIDTH_GRID) / BANDWIDTH_GRID
    m = modulation_function(idx, t)
    return float(m.max() - m.min())


def scale_to_bandwidth(idx: ModulationIndices, delta_f: float) -> ModulationIndices:
    """Rescale all tone indices by one factor so the swept bandwidth is delta_f.

    The constant offset a0 is left untouched since it does not contribute to
    the peak-to-peak excursion.  Scaling is idempotent: applying it twice
    with the same target returns the same indices.
    """
    if delta_f <= 0:
        raise ValueError("target bandwidth must be positive")
    current = swept_bandwidth(idx)
    if current == 0.0:
        raise ValueError("zero modulation: cannot rescale an unmodulated pulse")
    factor = delta_f / current
    return ModulationIndices(a0=idx.a0, alphas=idx.alphas * factor,
                             betas=idx.betas * factor, T=idx.T)


def synthesize(idx: ModulationIndices, fs: float | None = None,
               taper: TaperSpec = RECTANGULAR) -> SampledWaveform:
    """Sample the pulse at rate fs and normalize to unit energy.

    fs defaults to 10x the swept bandwidth.  A rate below twice the swept
    bandwidth cannot represent the modulation and is rejected.
    """
    bw = swept_bandwidth(idx)
    if fs is None:
        fs = DEFAULT_OVERSAMPLE * bw if bw > 0 else 64.0 / idx.T
    if bw > 0 and fs < 2.0 * bw:
        raise ValueError(f"undersampled: fs={fs:g} is below twice the swept "
                         f"bandwidth {bw:g}")
    n = int(round(fs * idx.T))
    if n < 2:
        raise ValueError("fewer than two samples per pulse")
    t = -idx.T / 2.0 + (np.arange(n) + 0.5) / fs
    s = np.exp(1j * phase_function(idx, t))
    s *= taper.amplitude((t + idx.T / 2.0) / idx.T)
    s /= np.sqrt(np.sum(np.abs(s) ** 2) / fs)
    prov = {"kind": "mtsfm", "indices": idx.to_dict(), "fs": float(fs),
            "taper": {"kind": taper.kind, "alpha": taper.alpha}}
    return SampledWaveform(t=t, samples=s, fs=float(fs), T=idx.T,
                           provenance=prov)


def pmepr(w: SampledWaveform) -> float:
    """Peak-to-mean envelope power ratio over the pulse, in dB."""
    p = np.abs(w.samples) ** 2
    return float(10.0 * np.log10(p.max() / p.mean()))


def spectral_efficiency(w: SampledWaveform, width: float,
                        pad_factor: int = 8) -> float:
    """Fraction of total energy inside the band |f| <= width/2.

    Computed from a zero-padded FFT of the samples; the denominator is the
    total energy across the sampled band, so the result lies in (0, 1].
    """
    if not 0 < width <= w.fs:
        raise ValueError("band width must lie in (0, fs]")
    if pad_factor < 8:
        raise ValueError("pad_factor below 8 under-resolves the band edge")
    nfft = pad_factor * w.num_samples
    power = np.abs(np.fft.fft(w.samples, nfft)) ** 2
    f = np.fft.fftfreq(nfft, 1.0 / w.fs)
    return float(power[np.abs(f) <= width / 2.0].sum() / power.sum())


def rms_bandwidth_sq(idx: ModulationIndices) -> float:
    """Mean-square bandwidth (2 pi / T)^2 sum_k k^2 (alpha_k^2 + beta_k^2) / 2.

    Units are rad^2/s^2.  This is the second moment of the modulation's line
    spectrum; the rectangular pulse edges are excluded by definition, and the
    a0 offset shifts the spectrum without broadening it.
    """
    k = np.arange(1, idx.num_tones + 1)
    return float((2.0 * np.pi / idx.T) ** 2
                 * np.sum(k ** 2 * (idx.alphas ** 2 + idx.betas ** 2)) / 2.0)


def spectrum_closed_form(idx: ModulationIndices, freqs: np.ndarray,
                         tol: float = 1e-9) -> np.ndarray:
    """Pulse spectrum S(f) as a coefficient-weighted sum of shifted sincs.

    The rectangular-taper pulse is a finite Fourier series inside its
    support, so its transform is exactly

        S(f) = sqrt(T) * sum_m c_m sinc(pi T (f - m/T - a0/2))

    with the tone coefficients c_m truncated at the Parseval order for
    ``tol``.  np.sinc handles the normalized form sin(pi x)/(pi x).
    """
    freqs = np.asarray(freqs, dtype=float)
    args = idx.gbf_args()
    order = truncation_order(args, tol)
    coeffs = gbf_coefficients(args, order)
    m = coeffs.orders
    x = np.multiply.outer(freqs - idx.a0 / 2.0, np.ones_like(m, dtype=float))
    x = idx.T * x - m  # T*f - m, the normalized sinc argument
    return np.sqrt(idx.T) * (np.sinc(x) @ coeffs.values)


def random_thumbtack_init(num_tones: int, tbp: float, symmetry: str,
                          seed: int, T: float = 1.0) -> ModulationIndices:
    """Draw a pseudo-random thumbtack design with a prescribed TBP.

    Indices are i.i.d. standard normal draws on the tone set selected by
    ``symmetry`` ("even" fills alphas, "odd" fills betas, "full" fills both),
    then rescaled so the swept bandwidth is tbp/T.  The same seed always
    returns the same design.
    """
    if symmetry not in ("even", "odd", "full"):
        raise ValueError("symmetry must be 'even', 'odd', or 'full'")
    if num_tones < 1:
        raise ValueError("need at least one tone")
    if tbp <= 0:
        raise ValueError("time-bandwidth product must be positive")
    rng = np.random.default_rng(seed)
    alphas = np.zeros(num_tones)
    betas = np.zeros(num_tones)
    if symmetry in ("even", "full"):
        alphas = rng.standard_normal(num_tones)
    if symmetry in ("odd", "full"):
        betas = rng.standard_normal(num_tones)
    idx = ModulationIndices(a0=0.0, alphas=alphas, betas=betas, T=T)
    return scale_to_bandwidth(idx, tbp / T)


def extend_tones(idx: ModulationIndices, num_tones: int) -> ModulationIndices:
    """Zero-pad the tone vectors out to ``num_tones`` harmonics.

    The waveform is unchanged (the new indices are zero); this only widens
    the design space handed to an optimizer.
    """
    if num_tones < idx.num_tones:
        raise ValueError("cannot shrink the tone set")
    pad = num_tones - idx.num_tones
    return ModulationIndices(a0=idx.a0,
                             alphas=np.pad(idx.alphas, (0, pad)),
                             betas=np.pad(idx.betas, (0, pad)), T=idx.T)


# Bundled 32-tone even-symmetric thumbtack design with TBP 200, used by the
# CLI preset "table1" and throughout the test suite as a known-good input.
_TABLE1_ALPHAS = (
    -4.2909, 2.5581, -2.4357, -2.7362, 4.8250, 0.3325, -0.2497, 1.5560,
    1.2757, 2.2940, -1.3832, 0.0763, -0.0372, 1.1292, 0.7528, 0.6234,
    -0.0817, 1.3951, 0.2267, -0.1998, -0.1366, 0.7981, -0.1766, 0.7064,
    0.3201, -0.0695, 0.0384, -0.6179, -0.8159, -0.2587, 0.4640, -0.2167,
)


def bundled_preset(name: str) -> ModulationIndices:
    """Return a named built-in design.  Currently only "table1"."""
    if name != "table1":
        raise ValueError(f"unknown preset {name!r}")
    alphas = np.array(_TABLE1_ALPHAS)
    return ModulationIndices(a0=0.0, alphas=alphas,
                             betas=np.zeros_like(alphas), T=1.0)
