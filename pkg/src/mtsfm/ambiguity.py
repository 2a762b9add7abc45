"""Delay-Doppler analysis: autocorrelation, ambiguity surfaces, sidelobe metrics.

All quantities follow the symmetric-argument narrowband convention

    chi(tau, nu) = integral s(t - tau/2) s*(t + tau/2) exp(j 2 pi nu t) dt

whose zero-Doppler cut is the autocorrelation R(tau).  Two computation paths
are implemented for both: a closed form that expands the pulse in its tone
coefficients (exact up to coefficient truncation), and a direct path that
works on waveform samples with no knowledge of the modulation structure.
Having both lets every surface be cross-checked by construction.

Conventions: delays are in seconds and Doppler shifts in Hz at the public
interfaces; region geometry uses the normalized coordinates tau/T and nu*T,
in which the mainlobe of any unit-energy pulse occupies order-one extent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .gbf import GbfArgs, GbfCoefficients, gbf_coefficients, truncation_order
from .waveform import ModulationIndices, SampledWaveform, swept_bandwidth

HOFSTETTER_AREA_LIMIT = 4.0  # normalized clear-region area with no volume bound
DEFAULT_TAU_DENSITY = 10.0   # quadrature samples per 1/bandwidth in delay
DEFAULT_NU_DENSITY = 8.0     # quadrature samples per 1/T in Doppler


# ---------------------------------------------------------------------------
# closed-form engine
# ---------------------------------------------------------------------------

class CoefficientKernel:
    """Evaluates closed-form ACF/AF values from a tone-coefficient set.

    The double sum over coefficient orders collapses, for each delay, to a
    lag correlation of phase-rotated coefficient vectors followed by a sinc
    interpolation in the Doppler variable.  The correlation is computed with
    FFTs of fixed length, so evaluation cost is independent of how many
    Doppler points share a delay column.
    """

    def __init__(self, coeffs: GbfCoefficients, T: float, a0: float = 0.0):
        self.T = float(T)
        self.a0 = float(a0)
        self.values = coeffs.values
        self.order_max = coeffs.order_max
        n = len(self.values)
        self.lags = np.arange(-(n - 1), n)
        self.fft_len = 1
        while self.fft_len < 2 * n:
            self.fft_len *= 2
        self._m = coeffs.orders

    @classmethod
    def from_indices(cls, idx: ModulationIndices,
                     tol: float = 1e-9) -> "CoefficientKernel":
        args = idx.gbf_args()
        order = truncation_order(args, tol)
        return cls(gbf_coefficients(args, order), idx.T, idx.a0)

    def lag_correlation(self, tau: float) -> np.ndarray:
        """Correlation r_d = sum_m v_m conj(w_{m-d}) of the rotated vectors."""
        rot = np.exp(-1j * np.pi * self._m * tau / self.T)
        v = self.values * rot
        w = self.values * np.conj(rot)
        spec = (np.fft.fft(v, self.fft_len)
                * np.conj(np.fft.fft(w, self.fft_len)))
        return np.fft.ifft(spec)[self.lags % self.fft_len]

    def af_column(self, tau: float, nu: np.ndarray) -> np.ndarray:
        """chi(tau, nu_i) for one delay and a vector of Doppler shifts."""
        nu = np.atleast_1d(np.asarray(nu, dtype=float))
        u = (self.T - abs(tau)) / self.T
        if u <= 0.0:
            return np.zeros(len(nu), dtype=complex)
        r = self.lag_correlation(tau)
        sinc = np.sinc(u * (np.add.outer(nu * self.T, self.lags)))
        return u * np.exp(-1j * np.pi * self.a0 * tau) * (sinc @ r)

    def _acf_batch(self, taus: np.ndarray) -> np.ndarray:
        u = (self.T - np.abs(taus)) / self.T
        rot = np.exp(-1j * np.pi * np.outer(taus, self._m) / self.T)
        v = self.values[None, :] * rot
        w = self.values[None, :] * np.conj(rot)
        spec = (np.fft.fft(v, self.fft_len, axis=1)
                * np.conj(np.fft.fft(w, self.fft_len, axis=1)))
        r = np.fft.ifft(spec, axis=1)[:, self.lags % self.fft_len]
        sinc = np.sinc(np.maximum(u, 0.0)[:, None] * self.lags[None, :])
        vals = u * np.einsum("ij,ij->i", sinc, r)
        vals *= np.exp(-1j * np.pi * self.a0 * taus)
        vals[u <= 0.0] = 0.0
        return vals

    def acf(self, tau_grid: np.ndarray) -> np.ndarray:
        taus = np.asarray(tau_grid, dtype=float)
        flat = taus.ravel()
        out = np.empty(len(flat), dtype=complex)
        for start in range(0, len(flat), 256):  # bound batch FFT memory
            stop = min(start + 256, len(flat))
            out[start:stop] = self._acf_batch(flat[start:stop])
        return out.reshape(taus.shape)

    def af(self, tau_grid: np.ndarray, nu_grid: np.ndarray) -> np.ndarray:
        tau_grid = np.asarray(tau_grid, dtype=float)
        nu_grid = np.asarray(nu_grid, dtype=float)
        out = np.empty((len(tau_grid), len(nu_grid)), dtype=complex)
        for i, tau in enumerate(tau_grid):
            out[i] = self.af_column(float(tau), nu_grid)
        return out


def acf_closed_form(idx: ModulationIndices, tau_grid: np.ndarray,
                    tol: float = 1e-9) -> np.ndarray:
    """Complex autocorrelation on a delay grid from the tone coefficients."""
    return CoefficientKernel.from_indices(idx, tol).acf(tau_grid)


def af_closed_form(idx: ModulationIndices, tau_grid: np.ndarray,
                   nu_grid: np.ndarray, tol: float = 1e-9) -> "AmbiguitySurface":
    """Ambiguity surface on a delay-Doppler product grid."""
    kernel = CoefficientKernel.from_indices(idx, tol)
    values = kernel.af(tau_grid, nu_grid)
    return AmbiguitySurface(tau_grid=np.asarray(tau_grid, dtype=float),
                            nu_grid=np.asarray(nu_grid, dtype=float),
                            values=values,
                            provenance={"path": "closed_form", "tol": tol,
                                        "indices": idx.to_dict()})


# ---------------------------------------------------------------------------
# direct (sample-domain) path
# ---------------------------------------------------------------------------

def _lag_product(w: SampledWaveform, lag: int):
    """Lag product z_n = s_n conj(s_{n+lag}) and its midpoint time stamps."""
    s = w.samples
    n = len(s)
    if abs(lag) >= n:
        return np.zeros(0, dtype=complex), np.zeros(0)
    if lag >= 0:
        z = s[: n - lag] * np.conj(s[lag:])
        mid = w.t[: n - lag] + lag / (2.0 * w.fs)
    else:
        z = s[-lag:] * np.conj(s[: n + lag])
        mid = w.t[-lag:] + lag / (2.0 * w.fs)
    return z, mid


def snap_delays(w: SampledWaveform, tau_grid: np.ndarray) -> np.ndarray:
    """Round delays to the waveform's sample lattice (multiples of 1/fs)."""
    lags = np.round(np.asarray(tau_grid, dtype=float) * w.fs).astype(int)
    return lags / w.fs


def acf_direct(w: SampledWaveform, tau_grid: np.ndarray):
    """Autocorrelation from samples; returns (snapped delays, complex values).

    Delays are quantized to the sample lattice, where the lag-product sum is
    an exact midpoint rule for the correlation integral.  Values at opposite
    delays are exact conjugates by construction.
    """
    tau = snap_delays(w, tau_grid)
    out = np.empty(len(tau), dtype=complex)
    for i, tv in enumerate(tau):
        z, _ = _lag_product(w, int(round(tv * w.fs)))
        out[i] = z.sum() / w.fs
    return tau, out


def af_direct_point(w: SampledWaveform, tau: float, nu: float) -> complex:
    """Single ambiguity value from samples (delay snapped to the lattice)."""
    lag = int(round(tau * w.fs))
    z, mid = _lag_product(w, lag)
    return complex(np.sum(z * np.exp(2j * np.pi * nu * mid)) / w.fs)


def af_direct(w: SampledWaveform, tau_grid: np.ndarray | None = None,
              nu_grid: np.ndarray | None = None,
              pad_factor: int = 1) -> "AmbiguitySurface":
    """Ambiguity surface from samples via per-delay FFTs.

    Delays snap to the sample lattice and Doppler values snap to FFT bins
    (bin spacing fs / (pad_factor * num_samples)).  With both grids omitted
    the surface covers every lag in (-T, T) and the full band (-fs/2, fs/2],
    on which the discrete volume identity sum |chi|^2 dtau dnu = 1 holds
    exactly for a unit-energy waveform.
    """
    n = w.num_samples
    nfft = pad_factor * n
    if tau_grid is None:
        lags = np.arange(-(n - 1), n)
    else:
        lags = np.unique(np.round(np.asarray(tau_grid, dtype=float)
                                  * w.fs).astype(int))
    bins = np.fft.fftfreq(nfft, 1.0 / w.fs)
    if nu_grid is None:
        sel = np.argsort(bins)
    else:
        want = np.asarray(nu_grid, dtype=float)
        sel = np.unique(np.argmin(np.abs(bins[None, :] - want[:, None]), axis=1))
    nu = bins[sel]
    values = np.zeros((len(lags), len(sel)), dtype=complex)
    for i, lag in enumerate(lags):
        z, mid = _lag_product(w, int(lag))
        if len(z) == 0:
            continue
        spec = nfft * np.fft.ifft(z, nfft)  # sum_n z_n e^{+j 2 pi p n / nfft}
        phase = np.exp(2j * np.pi * nu * mid[0])
        values[i] = spec[sel] * phase / w.fs
    return AmbiguitySurface(tau_grid=lags / w.fs, nu_grid=nu, values=values,
                            provenance={"path": "direct", "fs": w.fs,
                                        "pad_factor": pad_factor,
                                        "waveform": w.provenance})


# ---------------------------------------------------------------------------
# surface container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmbiguitySurface:
    """Complex ambiguity values on a delay-Doppler product grid."""

    tau_grid: np.ndarray
    nu_grid: np.ndarray
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != (len(self.tau_grid), len(self.nu_grid)):
            raise ValueError("values shape must be (len(tau_grid), len(nu_grid))")

    def magnitude_db(self, floor_db: float = -300.0) -> np.ndarray:
        mag = np.abs(self.values)
        peak = mag.max()
        if peak == 0.0:
            return np.full_like(mag, floor_db)
        with np.errstate(divide="ignore"):
            db = 20.0 * np.log10(mag / peak)
        return np.maximum(db, floor_db)

    def volume(self) -> float:
        """Riemann sum of |chi|^2 over the grid (uniform spacing assumed)."""
        dtau = self.tau_grid[1] - self.tau_grid[0] if len(self.tau_grid) > 1 else 1.0
        dnu = self.nu_grid[1] - self.nu_grid[0] if len(self.nu_grid) > 1 else 1.0
        return float(np.sum(np.abs(self.values) ** 2) * dtau * dnu)


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DelayDopplerRegion:
    """Sub-region of the delay-Doppler plane in normalized coordinates.

    Kinds:
        delay_band: delays tau/T in [tau_lo, tau_hi] at zero Doppler; with
            two_sided=True the mirrored band of negative delays is included.
        ellipse: (tau/T, nu*T) inside an ellipse at ``center`` with
            ``semi_axes``.
        annulus: between two concentric ellipses ``inner`` and ``outer``.
    """

    kind: str
    tau_lo: float = 0.0
    tau_hi: float = 0.0
    two_sided: bool = True
    center: tuple = (0.0, 0.0)
    semi_axes: tuple = (0.0, 0.0)
    inner: tuple = (0.0, 0.0)
    outer: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("delay_band", "ellipse", "annulus"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.kind == "delay_band":
            if not 0.0 <= self.tau_lo < self.tau_hi:
                raise ValueError("need 0 <= tau_lo < tau_hi")
        if self.kind == "ellipse" and min(self.semi_axes) <= 0:
            raise ValueError("ellipse semi-axes must be positive")
        if self.kind == "annulus":
            if min(self.inner) < 0 or min(self.outer) <= 0:
                raise ValueError("annulus semi-axes must be nonnegative")
            if (self.inner[0] >= self.outer[0]
                    or self.inner[1] >= self.outer[1]):
                raise ValueError("annulus inner axes must be inside outer axes")

    def contains(self, tau_n: np.ndarray, nu_n: np.ndarray) -> np.ndarray:
        """Membership of points given as (tau/T, nu*T) arrays."""
        tau_n = np.asarray(tau_n, dtype=float)
        nu_n = np.asarray(nu_n, dtype=float)
        if self.kind == "delay_band":
            inside = (tau_n >= self.tau_lo) & (tau_n <= self.tau_hi)
            if self.two_sided:
                inside |= (tau_n <= -self.tau_lo) & (tau_n >= -self.tau_hi)
            return inside
        dx = tau_n - self.center[0]
        dy = nu_n - self.center[1]
        if self.kind == "ellipse":
            a, b = self.semi_axes
            return (dx / a) ** 2 + (dy / b) ** 2 <= 1.0
        ao, bo = self.outer
        out_ok = (dx / ao) ** 2 + (dy / bo) ** 2 <= 1.0
        ai, bi = self.inner
        if ai == 0.0 or bi == 0.0:
            return out_ok
        return out_ok & ((dx / ai) ** 2 + (dy / bi) ** 2 >= 1.0)

    def area_normalized(self) -> float:
        """Region area in (tau/T) x (nu*T) units; zero for a delay band."""
        if self.kind == "delay_band":
            return 0.0
        if self.kind == "ellipse":
            return float(np.pi * self.semi_axes[0] * self.semi_axes[1])
        return float(np.pi * (self.outer[0] * self.outer[1]
                              - self.inner[0] * self.inner[1]))

    def bounding_box(self) -> tuple:
        """(tau_lo, tau_hi, nu_lo, nu_hi) in normalized coordinates."""
        if self.kind == "delay_band":
            lo = -self.tau_hi if self.two_sided else self.tau_lo
            return (lo, self.tau_hi, 0.0, 0.0)
        if self.kind == "ellipse":
            a, b = self.semi_axes
        else:
            a, b = self.outer
        cx, cy = self.center
        return (cx - a, cx + a, cy - b, cy + b)

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "delay_band":
            d.update(tau_lo=self.tau_lo, tau_hi=self.tau_hi,
                     two_sided=self.two_sided)
        elif self.kind == "ellipse":
            d.update(center=list(self.center), semi_axes=list(self.semi_axes))
        else:
            d.update(center=list(self.center), inner=list(self.inner),
                     outer=list(self.outer))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DelayDopplerRegion":
        kind = d["kind"]
        if kind == "delay_band":
            return cls(kind=kind, tau_lo=d["tau_lo"], tau_hi=d["tau_hi"],
                       two_sided=d.get("two_sided", True))
        if kind == "ellipse":
            return cls(kind=kind, center=tuple(d.get("center", (0.0, 0.0))),
                       semi_axes=tuple(d["semi_axes"]))
        return cls(kind=kind, center=tuple(d.get("center", (0.0, 0.0))),
                   inner=tuple(d["inner"]), outer=tuple(d["outer"]))


def delay_band(tau_lo: float, tau_hi: float,
               two_sided: bool = True) -> DelayDopplerRegion:
    return DelayDopplerRegion(kind="delay_band", tau_lo=tau_lo, tau_hi=tau_hi,
                              two_sided=two_sided)


# ---------------------------------------------------------------------------
# scalar metrics
# ---------------------------------------------------------------------------

def first_null(idx: ModulationIndices, tol: float = 1e-9,
               kernel: CoefficientKernel | None = None) -> float:
    """Delay of the first ACF magnitude null, located on a dense grid.

    Scans |R(tau)| for the first local minimum more than 6 dB below the peak
    and refines it with a parabolic fit through the bracketing samples.  A
    pulse whose magnitude decays monotonically to the support edge (the
    unmodulated pulse, for instance) returns the edge delay T.  If the scan
    finds no null and cannot reach the support edge it raises.
    """
    if kernel is None:
        kernel = CoefficientKernel.from_indices(idx, tol)
    bw = swept_bandwidth(idx)
    step = idx.T / 256.0 if bw <= 0 else min(1.0 / (32.0 * bw), idx.T / 256.0)
    n = int(np.ceil(idx.T / step))
    tau = np.linspace(0.0, idx.T, n + 1)
    floor = 10.0 ** (-6.0 / 20.0)  # unit-energy pulse: |R(0)| = 1
    # scan outward in overlapping windows; the null usually sits within a
    # few 1/bandwidth of the origin, so most of the grid is never touched
    chunk = 512
    pos = 0
    while pos <= n - 2:
        stop = min(pos + chunk, n + 1)
        mag = np.abs(kernel.acf(tau[pos:stop]))
        interior = np.where((mag[1:-1] <= mag[:-2]) & (mag[1:-1] <= mag[2:])
                            & (mag[1:-1] < floor))[0]
        if len(interior) > 0:
            i = interior[0] + 1
            y0, y1, y2 = mag[i - 1], mag[i], mag[i + 1]
            denom = y0 - 2.0 * y1 + y2
            offset = 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom
            return float(tau[pos + i] + offset * step)
        if stop > n:
            break
        pos = stop - 2  # two-sample overlap keeps boundary minima visible
    # |R(T)| = 0 at the support edge counts as the (trivial) first null.
    if float(np.abs(kernel.acf(np.array([idx.T])))[0]) < floor:
        return idx.T
    raise RuntimeError("no mainlobe null within the pulse support")


def mainlobe_width(idx: ModulationIndices, level_db: float = -3.0,
                   tol: float = 1e-9,
                   kernel: CoefficientKernel | None = None) -> float:
    """Full width of the ACF mainlobe at a magnitude level below the peak.

    Near the origin |R(tau)| = 1 - beta_rms^2 tau^2 / 2 + O(tau^4), so this
    width is the mainlobe measure that an RMS-bandwidth constraint actually
    pins; the first null, by contrast, is free to move when sidelobe energy
    is rearranged.  The crossing is located by scanning outward and linearly
    interpolating the bracketing samples.
    """
    if kernel is None:
        kernel = CoefficientKernel.from_indices(idx, tol)
    level = 10.0 ** (level_db / 20.0)
    bw = max(swept_bandwidth(idx), 1.0 / idx.T)
    step = min(1.0 / (64.0 * bw), idx.T / 512.0)
    n = int(np.ceil(idx.T / step))
    tau = np.linspace(0.0, idx.T, n + 1)
    chunk = 512
    pos = 0
    prev_mag = None
    while pos <= n:
        stop = min(pos + chunk, n + 1)
        mag = np.abs(kernel.acf(tau[pos:stop]))
        if prev_mag is not None:
            mag = np.concatenate([[prev_mag], mag])
            lo_idx = pos - 1
        else:
            lo_idx = pos
        below = np.where(mag < level)[0]
        if len(below) > 0:
            i = below[0]
            if i == 0:
                return 0.0  # pulse too short to resolve the level crossing
            m0, m1 = mag[i - 1], mag[i]
            frac = (m0 - level) / (m0 - m1)
            return 2.0 * (tau[lo_idx + i - 1] + frac * step)
        prev_mag = mag[-1]
        pos = stop
    raise RuntimeError("ACF magnitude never falls below the requested level")


def _acf_band_integral(kernel: CoefficientKernel, lo: float, hi: float,
                       n_nodes: int) -> float:
    """Trapezoid integral of |R|^2 over [lo, hi] (one side, seconds)."""
    tau = np.linspace(lo, hi, n_nodes)
    mag2 = np.abs(kernel.acf(tau)) ** 2
    return float(np.trapezoid(mag2, tau))


def isr(idx: ModulationIndices, region: DelayDopplerRegion,
        tau_m: float | None = None, tol: float = 1e-9,
        tau_density: float = DEFAULT_TAU_DENSITY,
        kernel: CoefficientKernel | None = None) -> float:
    """Integrated-sidelobe ratio of the ACF over a delay band, in dB.

    The numerator integrates |R|^2 over the band (doubled when two-sided);
    the denominator integrates over the mainlobe (-tau_m, tau_m).  tau_m
    defaults to the measured first null.  The band must not reach inside the
    mainlobe.
    """
    if region.kind != "delay_band":
        raise ValueError("isr is defined over a delay_band region")
    if kernel is None:
        kernel = CoefficientKernel.from_indices(idx, tol)
    if tau_m is None:
        tau_m = first_null(idx, tol, kernel=kernel)
    lo = region.tau_lo * idx.T
    hi = region.tau_hi * idx.T
    if lo < 0.999 * tau_m:
        raise ValueError("region overlaps the ACF mainlobe")
    bw = max(swept_bandwidth(idx), 1.0 / idx.T)
    n_num = max(16, int(np.ceil(tau_density * bw * (hi - lo))) + 1)
    n_den = max(12, int(np.ceil(tau_density * bw * tau_m)) + 1)
    num = _acf_band_integral(kernel, lo, hi, n_num)
    num *= 2.0 if region.two_sided else 1.0
    den = 2.0 * _acf_band_integral(kernel, 0.0, tau_m, n_den)
    return float(10.0 * np.log10(num / den))


def mainlobe_mask(tau_n: np.ndarray, nu_n: np.ndarray, tau_m_norm: float
                  ) -> np.ndarray:
    """True where a point lies inside the mainlobe exclusion ellipse.

    The ellipse has semi-axes tau_m in delay and 1/T in Doppler, which in
    normalized coordinates are (tau_m/T, 1).
    """
    return ((np.asarray(tau_n) / tau_m_norm) ** 2
            + np.asarray(nu_n) ** 2) <= 1.0


def af_region_volume(idx: ModulationIndices, region: DelayDopplerRegion,
                     tau_m: float | None = None,
                     exclude_mainlobe: bool = True, tol: float = 1e-9,
                     tau_density: float = DEFAULT_TAU_DENSITY,
                     nu_density: float = DEFAULT_NU_DENSITY,
                     kernel: CoefficientKernel | None = None) -> float:
    """Volume of |chi|^2 over a region, by masked 2-D trapezoid quadrature.

    Warns when the region's normalized area reaches the bound above which a
    delay-Doppler region cannot be cleared of volume.  The mainlobe ellipse
    is masked out by default so the result is a pure sidelobe measure.
    """
    area = region.area_normalized()
    if area >= HOFSTETTER_AREA_LIMIT:
        warnings.warn(f"region area {area:.2f} reaches the clear-region bound "
                      f"{HOFSTETTER_AREA_LIMIT:g}; volume cannot vanish there",
                      stacklevel=2)
    if kernel is None:
        kernel = CoefficientKernel.from_indices(idx, tol)
    if tau_m is None:
        tau_m = first_null(idx, tol, kernel=kernel)
    t_lo, t_hi, n_lo, n_hi = region.bounding_box()
    t_lo = max(t_lo, -1.0)
    t_hi = min(t_hi, 1.0)
    bw = max(swept_bandwidth(idx), 1.0 / idx.T)
    # densities are per 1/bandwidth in delay and per 1/T in Doppler
    dtau_n = 1.0 / (tau_density * bw * idx.T)
    dnu_n = 1.0 / nu_density
    n_tau = max(8, int(np.ceil((t_hi - t_lo) / dtau_n)) + 1)
    n_nu = max(8, int(np.ceil((n_hi - n_lo) / dnu_n)) + 1)
    tau_n = np.linspace(t_lo, t_hi, n_tau)
    nu_n = np.linspace(n_lo, n_hi, n_nu)
    wt = np.ones(n_tau)
    wt[0] = wt[-1] = 0.5
    wn = np.ones(n_nu)
    wn[0] = wn[-1] = 0.5
    tt, nn = np.meshgrid(tau_n, nu_n, indexing="ij")
    mask = region.contains(tt, nn)
    if exclude_mainlobe:
        mask &= ~mainlobe_mask(tt, nn, tau_m / idx.T)
    weights = np.outer(wt, wn) * mask
    dA = (tau_n[1] - tau_n[0]) * (nu_n[1] - nu_n[0]) if n_tau > 1 and n_nu > 1 else 0.0
    total = 0.0
    for i, tn in enumerate(tau_n):
        if not mask[i].any():
            continue
        col = kernel.af_column(tn * idx.T, nu_n / idx.T)
        total += np.sum(weights[i] * np.abs(col) ** 2)
    return float(total * dA)
