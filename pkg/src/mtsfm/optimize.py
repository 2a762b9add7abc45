"""Constrained shaping of delay-Doppler sidelobes over the tone indices.

The optimizer minimizes a quadrature discretization of either the
integrated-sidelobe ratio of the autocorrelation or the ambiguity volume
over a delay-Doppler region, subject to a two-sided corridor on the RMS
bandwidth (which pins the mainlobe width).  The discretization is frozen
when the problem is built: quadrature nodes, the mainlobe edge used to
separate sidelobes, and the coefficient work order never move during a
solve, so the objective is a smooth deterministic function of the tone
indices and its analytic gradient can be validated against finite
differences to tight tolerance.

Gradients use the coefficient shift recurrence directly in the FFT domain:
differentiating a tone index multiplies the lag-correlation spectrum by a
sinusoidal twiddle, so one objective-plus-gradient evaluation costs five
batched FFTs over the delay columns regardless of the number of tones.

The solve itself is an augmented-Lagrangian outer loop around a bounded
quasi-Newton inner minimizer.  Starts are feasible by construction (the
corridor is centered on the starting RMS bandwidth), and the report tracks
the best feasible iterate, so the returned design is never worse than the
start.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import as_strided
from scipy.optimize import minimize as _qn_minimize

from .ambiguity import (DEFAULT_NU_DENSITY, DEFAULT_TAU_DENSITY,
                        HOFSTETTER_AREA_LIMIT, DelayDopplerRegion, delay_band,
                        first_null, mainlobe_mask)
from .gbf import GbfArgs, TRUNCATION_CAP, gbf_coefficients, truncation_order
from .waveform import (ModulationIndices, extend_tones, random_thumbtack_init,
                       swept_bandwidth)

_CHUNK = 256  # delay columns per batched FFT, bounds working memory


@dataclass(frozen=True)
class OptimizeOptions:
    """Solver configuration shared by all objective kinds."""

    free: str = "auto"            # "alphas" | "betas" | "both" | "auto"
    gradient_tol: float = 1e-6    # scaled KKT stationarity target
    step_tol: float = 1e-10       # relative step size giving up
    max_iters: int = 500          # total inner quasi-Newton iterations
    max_outer: int = 12           # multiplier updates
    inner_max: int = 150          # inner iterations per outer round
    constraint_tol: float = 1e-6  # allowed relative corridor violation
    coeff_tol: float = 1e-9       # coefficient truncation tolerance
    tau_density: float = DEFAULT_TAU_DENSITY
    nu_density: float = DEFAULT_NU_DENSITY
    exclude_mainlobe: bool = True
    seed: int = 0                 # for the zero-coordinate perturbation


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def _resolve_free(idx: ModulationIndices, free: str) -> str:
    if free != "auto":
        if free not in ("alphas", "betas", "both"):
            raise ValueError(f"unknown free-parameter spec {free!r}")
        return free
    a_nz = bool(np.any(idx.alphas != 0.0))
    b_nz = bool(np.any(idx.betas != 0.0))
    if a_nz and not b_nz:
        return "alphas"
    if b_nz and not a_nz:
        return "betas"
    return "both"


class _ColumnSet:
    """Delay columns of one quadrature integral, with per-column Doppler
    structure and everything precomputable frozen at build time."""

    def __init__(self, taus_sec, T, a0, m, num_tones):
        self.taus = np.asarray(taus_sec, dtype=float)
        self.u = (T - np.abs(self.taus)) / T
        self.rot = np.exp(-1j * np.pi * np.outer(self.taus, m) / T)
        self.phase = np.exp(-1j * np.pi * a0 * self.taus)
        k = np.arange(1, num_tones + 1)
        self.sin_k = np.sin(np.pi * np.outer(self.taus, k) / T)
        # row mode (single zero-Doppler value per column)
        self.rows = None
        self.w = None
        # lattice mode (vector of Doppler values per column)
        self.lattices = None
        self.wcols = None
        self.s_nu = None
        self.nu_count = None

    @classmethod
    def zero_doppler(cls, taus_sec, weights, T, a0, m, num_tones, dd):
        cs = cls(taus_sec, T, a0, m, num_tones)
        cs.rows = np.sinc(cs.u[:, None] * dd[None, :])
        cs.w = np.asarray(weights, dtype=float)
        return cs

    @classmethod
    def doppler_lattice(cls, taus_sec, weight_cols, T, a0, m, num_tones,
                        n, s_nu, j0, nu_count):
        cs = cls(taus_sec, T, a0, m, num_tones)
        cs.s_nu = s_nu
        cs.nu_count = nu_count
        cs.wcols = [np.asarray(w, dtype=float) for w in weight_cols]
        b0 = j0 - s_nu * (n - 1)
        ell = np.arange(nu_count + s_nu * (2 * n - 2))
        cs.lattices = [np.sinc((u / s_nu) * (b0 + ell)) for u in cs.u]
        return cs


class QuadratureObjective:
    """Frozen discretization of a sidelobe objective with analytic gradient.

    ``value(x)`` and ``value_grad(x)`` treat the packed free tone indices as
    an ordinary smooth vector argument; everything else (quadrature nodes,
    work order, frozen index components) is baked in at construction.
    """

    def __init__(self, idx0: ModulationIndices, kind: str,
                 region: DelayDopplerRegion, free: str, tol: float,
                 tau_density: float, nu_density: float,
                 exclude_mainlobe: bool = True,
                 tau_m: float | None = None):
        if kind not in ("isr", "af_volume"):
            raise ValueError(f"unknown objective kind {kind!r}")
        self.kind = kind
        self.idx0 = idx0
        self.T = idx0.T
        self.a0 = idx0.a0
        self.K = idx0.num_tones
        self.tol = tol
        self.free = _resolve_free(idx0, free)
        self._alphas0 = idx0.alphas.copy()
        self._betas0 = idx0.betas.copy()

        M0 = truncation_order(idx0.gbf_args(), tol)
        self.order_work = min(TRUNCATION_CAP,
                              M0 + self.K + max(16, M0 // 4))
        self.n = 2 * self.order_work + 1
        self.fft_len = _next_pow2(2 * self.n)
        self.m = np.arange(-self.order_work, self.order_work + 1)
        self.dd = np.arange(-(self.n - 1), self.n)
        self.dd_mod = self.dd % self.fft_len

        self.tau_m = first_null(idx0, tol) if tau_m is None else float(tau_m)
        bw = max(swept_bandwidth(idx0), 1.0 / self.T)

        if kind == "isr":
            if region is None:
                region = delay_band(self.tau_m / self.T, 1.0, two_sided=True)
            if region.kind != "delay_band":
                raise ValueError("isr objective needs a delay_band region")
            lo = region.tau_lo * self.T
            hi = region.tau_hi * self.T
            if lo < 0.999 * self.tau_m:
                raise ValueError("region overlaps the ACF mainlobe")
            self.region = region
            fold = 2.0 if region.two_sided else 1.0
            self._set_num = self._band_set(lo, hi, bw, tau_density,
                                           min_nodes=16, fold=fold)
            self._set_den = self._band_set(0.0, self.tau_m, bw, tau_density,
                                           min_nodes=12, fold=2.0)
        else:
            if region is None or region.kind == "delay_band":
                raise ValueError("af_volume needs an ellipse or annulus region")
            area = region.area_normalized()
            if area >= HOFSTETTER_AREA_LIMIT:
                warnings.warn(
                    f"region area {area:.2f} reaches the clear-region bound "
                    f"{HOFSTETTER_AREA_LIMIT:g}; volume cannot vanish there",
                    stacklevel=3)
            self.region = region
            self._set_num = self._area_set(region, bw, tau_density, nu_density,
                                           exclude_mainlobe)
            self._set_den = None

    # -- column-set builders ------------------------------------------------

    def _band_set(self, lo, hi, bw, tau_density, min_nodes, fold):
        n_nodes = max(min_nodes, int(np.ceil(tau_density * bw * (hi - lo))) + 1)
        taus = np.linspace(lo, hi, n_nodes)
        w = np.full(n_nodes, taus[1] - taus[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return _ColumnSet.zero_doppler(taus, w * fold, self.T, self.a0,
                                       self.m, self.K, self.dd)

    def _area_set(self, region, bw, tau_density, nu_density, exclude_mainlobe):
        t_lo, t_hi, n_lo, n_hi = region.bounding_box()
        t_lo = max(t_lo, -1.0)
        t_hi = min(t_hi, 1.0)
        s_nu = int(np.ceil(nu_density))
        j0 = int(np.ceil(n_lo * s_nu))
        j1 = int(np.floor(n_hi * s_nu))
        if j1 <= j0:
            j0 -= 1
            j1 = j0 + 2
        nus_n = np.arange(j0, j1 + 1) / s_nu
        dt_n = 1.0 / (tau_density * bw * self.T)
        n_tau = max(8, int(np.ceil((t_hi - t_lo) / dt_n)) + 1)
        taus_n = np.linspace(t_lo, t_hi, n_tau)
        wt = np.ones(n_tau)
        wt[0] = wt[-1] = 0.5
        wn = np.ones(len(nus_n))
        wn[0] = wn[-1] = 0.5
        dA = (taus_n[1] - taus_n[0]) * (1.0 / s_nu)
        tt, nn = np.meshgrid(taus_n, nus_n, indexing="ij")
        mask = region.contains(tt, nn)
        if exclude_mainlobe:
            mask &= ~mainlobe_mask(tt, nn, self.tau_m / self.T)
        keep = mask.any(axis=1)
        weight_cols = [dA * wt[i] * wn * mask[i] for i in
                       range(n_tau) if keep[i]]
        taus_sec = taus_n[keep] * self.T
        return _ColumnSet.doppler_lattice(taus_sec, weight_cols, self.T,
                                          self.a0, self.m, self.K, self.n,
                                          s_nu, j0, len(nus_n))

    # -- packing ------------------------------------------------------------

    def pack(self, idx: ModulationIndices) -> np.ndarray:
        parts = []
        if self.free in ("alphas", "both"):
            parts.append(idx.alphas)
        if self.free in ("betas", "both"):
            parts.append(idx.betas)
        return np.concatenate(parts).astype(float)

    def unpack(self, x: np.ndarray):
        a = self._alphas0.copy()
        b = self._betas0.copy()
        if self.free == "alphas":
            a = np.asarray(x, dtype=float)
        elif self.free == "betas":
            b = np.asarray(x, dtype=float)
        else:
            a = np.asarray(x[: self.K], dtype=float)
            b = np.asarray(x[self.K:], dtype=float)
        return a, b

    def to_indices(self, x: np.ndarray) -> ModulationIndices:
        a, b = self.unpack(x)
        return ModulationIndices(a0=self.a0, alphas=a, betas=b, T=self.T)

    def _project(self, galpha: np.ndarray, gbeta: np.ndarray) -> np.ndarray:
        if self.free == "alphas":
            return galpha
        if self.free == "betas":
            return gbeta
        return np.concatenate([galpha, gbeta])

    # -- RMS-bandwidth constraint pieces -------------------------------------

    def rms_sq(self, x: np.ndarray) -> float:
        a, b = self.unpack(x)
        k = np.arange(1, self.K + 1)
        return float((2.0 * np.pi / self.T) ** 2
                     * np.sum(k ** 2 * (a ** 2 + b ** 2)) / 2.0)

    def rms_sq_grad(self, x: np.ndarray) -> np.ndarray:
        a, b = self.unpack(x)
        k2 = np.arange(1, self.K + 1) ** 2
        scale = (2.0 * np.pi / self.T) ** 2
        return self._project(scale * k2 * a, scale * k2 * b)

    # -- evaluation ----------------------------------------------------------

    def _coefficients(self, x: np.ndarray) -> np.ndarray:
        a, b = self.unpack(x)
        return gbf_coefficients(GbfArgs(alphas=a, betas=b),
                                self.order_work).values

    def _eval_set(self, cs: _ColumnSet, values: np.ndarray, need_grad: bool):
        L = self.fft_len
        total = 0.0
        galpha = np.zeros(self.K)
        gbeta = np.zeros(self.K)
        ks = np.arange(1, self.K + 1)
        n_cols = len(cs.taus)
        for start in range(0, n_cols, _CHUNK):
            sl = slice(start, min(start + _CHUNK, n_cols))
            rot = cs.rot[sl]
            v = values[None, :] * rot
            w = values[None, :] * np.conj(rot)
            fv = np.fft.fft(v, L, axis=1)
            fw = np.fft.fft(w, L, axis=1)
            rhat = fv * np.conj(fw)
            rsel = np.fft.ifft(rhat, axis=1)[:, self.dd_mod]
            scale = cs.u[sl] * cs.phase[sl]
            if cs.rows is not None:
                chi = scale * np.einsum("cd,cd->c", cs.rows[sl], rsel)
                total += float(np.sum(cs.w[sl] * np.abs(chi) ** 2))
                if need_grad:
                    xi = (scale * cs.w[sl] * np.conj(chi))[:, None] \
                        * cs.rows[sl]
            else:
                xi = np.zeros((sl.stop - sl.start, 2 * self.n - 1),
                              dtype=complex) if need_grad else None
                item = 8  # float64 stride unit in the lattice views
                for j in range(sl.start, sl.stop):
                    lat = cs.lattices[j]
                    view = as_strided(
                        lat, shape=(cs.nu_count, 2 * self.n - 1),
                        strides=(item, cs.s_nu * item), writeable=False)
                    chi_col = scale[j - sl.start] * (view @ rsel[j - sl.start])
                    wc = cs.wcols[j]
                    total += float(np.sum(wc * np.abs(chi_col) ** 2))
                    if need_grad:
                        xi[j - sl.start] = (scale[j - sl.start]
                                            * ((wc * np.conj(chi_col)) @ view))
            if not need_grad:
                continue
            xi_arr = np.zeros((sl.stop - sl.start, L), dtype=complex)
            xi_arr[:, self.dd_mod] = xi
            xi_t = L * np.fft.ifft(xi_arr, axis=1)
            zhat = np.fft.fft(rhat * xi_t, axis=1)
            plus = zhat[:, ks] + zhat[:, L - ks]
            minus = zhat[:, ks] - zhat[:, L - ks]
            galpha += (2.0 / L) * np.sum(cs.sin_k[sl] * plus.imag, axis=0)
            gbeta += -(2.0 / L) * np.sum(cs.sin_k[sl] * minus.real, axis=0)
        if need_grad:
            return total, self._project(galpha, gbeta)
        return total, None

    def value_parts(self, x: np.ndarray):
        """(numerator, denominator) of the objective; denominator 1 for
        the volume kind."""
        values = self._coefficients(x)
        num, _ = self._eval_set(self._set_num, values, need_grad=False)
        if self._set_den is None:
            return num, 1.0
        den, _ = self._eval_set(self._set_den, values, need_grad=False)
        return num, den

    def value(self, x: np.ndarray) -> float:
        num, den = self.value_parts(x)
        return num / den

    def value_grad(self, x: np.ndarray):
        values = self._coefficients(x)
        num, gnum = self._eval_set(self._set_num, values, need_grad=True)
        if self._set_den is None:
            return num, gnum
        den, gden = self._eval_set(self._set_den, values, need_grad=True)
        return num / den, (gnum * den - num * gden) / den ** 2


def build_objective(idx0: ModulationIndices, kind: str = "isr",
                    region: DelayDopplerRegion | None = None,
                    options: OptimizeOptions | None = None,
                    tau_m: float | None = None) -> QuadratureObjective:
    """Construct the frozen discretized objective for a design point."""
    opts = options or OptimizeOptions()
    return QuadratureObjective(idx0, kind, region, opts.free, opts.coeff_tol,
                               opts.tau_density, opts.nu_density,
                               opts.exclude_mainlobe, tau_m=tau_m)


def objective_gradient(idx: ModulationIndices, kind: str = "isr",
                       region: DelayDopplerRegion | None = None,
                       options: OptimizeOptions | None = None):
    """Objective value and analytic gradient at a design point.

    The gradient differentiates exactly the discretized objective that
    ``build_objective`` freezes, so central finite differences of
    ``QuadratureObjective.value`` must reproduce it.
    """
    engine = build_objective(idx, kind, region, options)
    return engine.value_grad(engine.pack(idx))


# ---------------------------------------------------------------------------
# augmented-Lagrangian solve
# ---------------------------------------------------------------------------

@dataclass
class OptimizeReport:
    """Everything a solve produced, including enough to reproduce it."""

    kind: str
    problem: dict
    idx_init: ModulationIndices
    idx_opt: ModulationIndices
    objective_init: float
    objective_final: float
    objective_history: list
    area_init: float
    area_final: float
    gain: float
    isr_init_db: Optional[float]
    isr_final_db: Optional[float]
    volume_init: Optional[float]
    volume_final: Optional[float]
    rms_ratio_final: float
    constraint_residual: float
    feasible: bool
    iterations: int
    outer_iterations: int
    stop_reason: str
    kkt_residual: float
    outer_history: list = field(default_factory=list)
    wall_time_s: float = 0.0


def _perturb_zeros(x: np.ndarray, seed: int) -> np.ndarray:
    """Nudge exactly-zero free coordinates so the start is not pinned to a
    symmetry-invariant manifold of the objective."""
    x = x.copy()
    zero = x == 0.0
    if zero.any():
        rng = np.random.default_rng(seed)
        noise = rng.standard_normal(len(x)) * 1e-8
        x[zero] += noise[zero]
    return x


def _solve(engine: QuadratureObjective, delta: float,
           opts: OptimizeOptions) -> OptimizeReport:
    t_start = time.perf_counter()
    x = _perturb_zeros(engine.pack(engine.idx0), opts.seed)
    target = engine.rms_sq(x)
    hi = 1.0 + delta
    lo = 1.0 - delta

    f, g = engine.value_grad(x)
    f_init = f
    num0, den0 = engine.value_parts(x)
    idx_init = engine.to_indices(x)

    lam = np.zeros(2)
    rho = 10.0 * max(1.0, abs(f))
    best_f, best_x = f, x.copy()
    history = [f]
    outer_history = []
    viol_prev = np.inf
    total_inner = 0
    stop = "max_outer"
    kkt = np.inf
    outer_done = 0

    for outer in range(opts.max_outer):
        lam_o = lam.copy()
        rho_o = rho

        def al_fun(xv):
            fv, gv = engine.value_grad(xv)
            q = engine.rms_sq(xv) / target
            dq = engine.rms_sq_grad(xv) / target
            phi = fv
            dphi = gv.copy()
            for gi, dgi, i in ((q - hi, dq, 0), (lo - q, -dq, 1)):
                t = lam_o[i] + rho_o * gi
                if t > 0.0:
                    phi += (t * t - lam_o[i] ** 2) / (2.0 * rho_o)
                    dphi += t * dgi
                else:
                    phi -= lam_o[i] ** 2 / (2.0 * rho_o)
            return phi, dphi

        budget = min(opts.inner_max, opts.max_iters - total_inner)
        res = _qn_minimize(al_fun, x, jac=True, method="L-BFGS-B",
                           options={"maxiter": budget,
                                    "gtol": 0.1 * opts.gradient_tol})
        total_inner += int(res.nit)
        step = float(np.max(np.abs(res.x - x))) if len(x) else 0.0
        x = res.x
        outer_done = outer + 1

        f, g = engine.value_grad(x)
        q = engine.rms_sq(x) / target
        g1, g2 = q - hi, lo - q
        viol = max(g1, g2, 0.0)
        if viol <= opts.constraint_tol and f < best_f:
            best_f, best_x = f, x.copy()
            history.append(f)

        lam[0] = max(0.0, lam[0] + rho * g1)
        lam[1] = max(0.0, lam[1] + rho * g2)
        dq = engine.rms_sq_grad(x) / target
        kkt_vec = g + (lam[0] - lam[1]) * dq
        kkt = float(np.max(np.abs(kkt_vec))) / max(1.0, abs(f))
        outer_history.append({"outer": outer, "objective": f, "rms_ratio": q,
                              "violation": viol, "kkt": kkt,
                              "inner_iterations": int(res.nit)})

        if viol <= opts.constraint_tol and kkt <= opts.gradient_tol:
            stop = "gradient_tol"
            break
        if step <= opts.step_tol * max(1.0, float(np.max(np.abs(x)))):
            stop = "step_tol"
            break
        if total_inner >= opts.max_iters:
            stop = "max_iters"
            break
        if viol > 0.25 * viol_prev and viol > opts.constraint_tol:
            rho = min(rho * 10.0, 1e14)
        viol_prev = max(viol, opts.constraint_tol)

    x_star = best_x
    f_star = best_f
    num_f, den_f = engine.value_parts(x_star)
    q_star = engine.rms_sq(x_star) / target
    residual = max(q_star - hi, lo - q_star, 0.0)

    if engine.kind == "isr":
        isr_i, isr_f = 10.0 * np.log10(f_init), 10.0 * np.log10(f_star)
        vol_i = vol_f = None
        area_i, area_f = num0, num_f
    else:
        isr_i = isr_f = None
        vol_i, vol_f = f_init, f_star
        area_i, area_f = num0, num_f

    problem = {"kind": engine.kind, "region": engine.region.to_dict(),
               "delta": delta, "free": engine.free, "tau_m": engine.tau_m,
               "order_work": engine.order_work,
               "coeff_tol": engine.tol, "seed": opts.seed}
    return OptimizeReport(
        kind=engine.kind, problem=problem,
        idx_init=idx_init, idx_opt=engine.to_indices(x_star),
        objective_init=f_init, objective_final=f_star,
        objective_history=history,
        area_init=area_i, area_final=area_f,
        gain=area_i / area_f if area_f > 0 else np.inf,
        isr_init_db=isr_i, isr_final_db=isr_f,
        volume_init=vol_i, volume_final=vol_f,
        rms_ratio_final=q_star, constraint_residual=residual,
        feasible=bool(residual <= opts.constraint_tol),
        iterations=total_inner, outer_iterations=outer_done,
        stop_reason=stop, kkt_residual=kkt, outer_history=outer_history,
        wall_time_s=time.perf_counter() - t_start)


def minimize_isr(idx0: ModulationIndices,
                 region: DelayDopplerRegion | None = None,
                 delta: float = 0.2,
                 options: OptimizeOptions | None = None) -> OptimizeReport:
    """Minimize the ACF integrated-sidelobe ratio inside an RMS-bandwidth
    corridor of relative half-width ``delta``.

    With no region the full sidelobe band from the measured first null out
    to the pulse edge is used, mirrored to negative delays.
    """
    opts = options or OptimizeOptions()
    engine = build_objective(idx0, "isr", region, opts)
    return _solve(engine, delta, opts)


def minimize_af_volume(idx0: ModulationIndices, region: DelayDopplerRegion,
                       delta: float = 0.2,
                       options: OptimizeOptions | None = None
                       ) -> OptimizeReport:
    """Minimize ambiguity volume over a delay-Doppler region inside an
    RMS-bandwidth corridor of relative half-width ``delta``."""
    opts = options or OptimizeOptions()
    engine = build_objective(idx0, "af_volume", region, opts)
    return _solve(engine, delta, opts)


# ---------------------------------------------------------------------------
# randomized trial studies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StudyConfig:
    """Randomized multi-start study over thumbtack initializations."""

    num_tones: int
    tbp: float
    symmetry: str = "even"
    num_trials: int = 10
    seed: int = 0
    delta: float = 0.2
    zero_pad_to: int | None = None
    T: float = 1.0
    options: OptimizeOptions = field(default_factory=OptimizeOptions)
    threads: int = 1


@dataclass
class StudyReport:
    config: StudyConfig
    rows: list
    aggregates: dict
    wall_time_s: float = 0.0


def box_stats(values) -> dict:
    """Five-number summary with Tukey whiskers, as used for trial spreads."""
    v = np.sort(np.asarray(values, dtype=float))
    if len(v) == 0:
        return {"median": np.nan, "q1": np.nan, "q3": np.nan,
                "lo": np.nan, "hi": np.nan, "outliers": []}
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = v[(v >= lo_fence) & (v <= hi_fence)]
    lo = float(inside.min()) if len(inside) else float(v.min())
    hi = float(inside.max()) if len(inside) else float(v.max())
    outliers = [float(x) for x in v[(v < lo_fence) | (v > hi_fence)]]
    return {"median": float(med), "q1": float(q1), "q3": float(q3),
            "lo": lo, "hi": hi, "outliers": outliers}


def _run_trial(cfg: StudyConfig, i: int) -> dict:
    seed = cfg.seed + i
    row = {"trial": i, "seed": seed, "error": ""}
    try:
        idx = random_thumbtack_init(cfg.num_tones, cfg.tbp, cfg.symmetry,
                                    seed, T=cfg.T)
        if cfg.zero_pad_to is not None:
            idx = extend_tones(idx, cfg.zero_pad_to)
        opts = replace(cfg.options, seed=seed)
        rep = minimize_isr(idx, delta=cfg.delta, options=opts)
        row.update(area_init=rep.area_init, area_opt=rep.area_final,
                   gain=rep.gain, isr_init_db=rep.isr_init_db,
                   isr_final_db=rep.isr_final_db,
                   rms_ratio=rep.rms_ratio_final,
                   iterations=rep.iterations, feasible=rep.feasible,
                   stop_reason=rep.stop_reason)
    except Exception as exc:  # a failed trial is data, not a crash
        row.update(area_init=np.nan, area_opt=np.nan, gain=np.nan,
                   isr_init_db=np.nan, isr_final_db=np.nan,
                   rms_ratio=np.nan, iterations=0, feasible=False,
                   stop_reason="error", error=str(exc))
    return row


def trial_study(cfg: StudyConfig) -> StudyReport:
    """Run seeded random-start optimizations and summarize their spread.

    Trial i uses seed ``cfg.seed + i`` for both its initialization and its
    zero-coordinate perturbation, so results are reproducible and
    independent of the thread count.
    """
    t0 = time.perf_counter()
    indices = list(range(cfg.num_trials))
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(_run_trial, [cfg] * len(indices), indices))
    else:
        rows = [_run_trial(cfg, i) for i in indices]

    ok = [r for r in rows if not r["error"]]
    best_area = min((r["area_opt"] for r in ok), default=np.nan)
    for r in rows:
        r["gain_rel_best"] = (best_area / r["area_opt"]
                              if r in ok and r["area_opt"] > 0 else np.nan)
    aggregates = {
        "num_ok": len(ok),
        "all_feasible": bool(ok) and all(r["feasible"] for r in ok),
        "gain": box_stats([r["gain"] for r in ok]),
        "isr_final_db": box_stats([r["isr_final_db"] for r in ok]),
    }
    return StudyReport(config=cfg, rows=rows, aggregates=aggregates,
                       wall_time_s=time.perf_counter() - t0)
