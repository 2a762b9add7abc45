"""Fourier coefficients of multi-tone FM phase exponentials.

A unit-amplitude pulse whose phase is a finite trigonometric series is, as a
function of the normalized angle theta = 2*pi*t/T, the periodic signal

    f(theta) = exp{j * sum_k [alpha_k sin(k theta) - beta_k cos(k theta)]}.

Its Fourier coefficients c_m generalize the ordinary Bessel functions: with a
single sine tone (K=1, beta=0) they reduce to J_m(alpha_1) exactly.  Every
closed-form expression in this package (spectrum, autocorrelation, ambiguity
surface) is a short sum over these coefficients, so this module is the
numerical foundation for everything else.

Two independent evaluation paths are provided.  ``gbf_coefficients`` samples
f(theta) on a uniform grid and reads all orders off one FFT; it is the fast
production path.  ``gbf_oracle`` evaluates the defining integral for a single
order with adaptive quadrature and serves as the reference the FFT path is
tested against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

# Hard ceiling on the truncation search.  A waveform needing more orders than
# this has a time-bandwidth product far beyond anything this toolkit targets.
TRUNCATION_CAP = 2 ** 16

_MIN_OVERSAMPLE = 8  # FFT grid points per retained Fourier order span


@dataclass(frozen=True)
class GbfArgs:
    """Modulation-index arguments of a generalized Bessel evaluation.

    ``alphas[k-1]`` multiplies sin(k theta) and ``betas[k-1]`` multiplies
    cos(k theta) in the phase.  The two arrays must have equal length.
    """

    alphas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        alphas = np.atleast_1d(np.asarray(self.alphas, dtype=float))
        betas = np.atleast_1d(np.asarray(self.betas, dtype=float))
        if alphas.ndim != 1 or betas.ndim != 1:
            raise ValueError("alphas and betas must be one-dimensional")
        if alphas.shape != betas.shape:
            raise ValueError("alphas and betas must have the same length")
        if not (np.all(np.isfinite(alphas)) and np.all(np.isfinite(betas))):
            raise ValueError("modulation indices must be finite")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)

    @property
    def num_tones(self) -> int:
        return len(self.alphas)

    def phase(self, theta: np.ndarray) -> np.ndarray:
        """Phase angle sum_k alpha_k sin(k theta) - beta_k cos(k theta)."""
        theta = np.asarray(theta, dtype=float)
        k = np.arange(1, self.num_tones + 1)
        arg = np.multiply.outer(theta, k)
        return np.sin(arg) @ self.alphas - np.cos(arg) @ self.betas


@dataclass(frozen=True)
class GbfCoefficients:
    """Coefficients c_m for m in [-order_max, order_max], plus their arguments.

    ``values[i]`` holds the coefficient of order ``i - order_max``.
    """

    order_max: int
    values: np.ndarray
    args: GbfArgs

    def __post_init__(self):
        if len(self.values) != 2 * self.order_max + 1:
            raise ValueError("values length must be 2*order_max + 1")

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.order_max, self.order_max + 1)

    def order(self, m: int) -> complex:
        if abs(m) > self.order_max:
            raise ValueError(f"order {m} outside computed range +-{self.order_max}")
        return complex(self.values[m + self.order_max])

    def parseval_residual(self) -> float:
        """Energy 1 - sum |c_m|^2 left outside the retained order range."""
        return float(1.0 - np.sum(np.abs(self.values) ** 2))


def _fft_grid_size(order_max: int) -> int:
    n = 1
    while n < _MIN_OVERSAMPLE * (2 * order_max + 1):
        n *= 2
    return n


def gbf_coefficients(args: GbfArgs, order_max: int) -> GbfCoefficients:
    """Evaluate c_m for all |m| <= order_max with a single FFT.

    The phase exponential is sampled on a uniform theta grid over [-pi, pi)
    of power-of-two length at least 8 * (2*order_max + 1), and the DFT
    normalized by the grid length gives the coefficients.  Because the grid
    starts at -pi rather than 0, each DFT bin carries an alternating-sign
    factor that is folded back in before returning.
    """
    if order_max < 0:
        raise ValueError("order_max must be nonnegative")
    n = _fft_grid_size(order_max)
    theta = -np.pi + 2.0 * np.pi * np.arange(n) / n
    f = np.exp(1j * args.phase(theta))
    spectrum = np.fft.fft(f) / n
    m = np.arange(-order_max, order_max + 1)
    values = spectrum[m % n] * np.where(m % 2 == 0, 1.0, -1.0)
    return GbfCoefficients(order_max=order_max, values=values, args=args)


def gbf_oracle(args: GbfArgs, m: int, abs_tol: float = 1e-11) -> complex:
    """Reference value of a single coefficient by adaptive quadrature.

    Integrates (1/2pi) * exp{j[phase(theta) - m*theta]} over [-pi, pi],
    splitting real and imaginary parts.  Raises if the quadrature error
    estimate exceeds ``abs_tol``; the failure message reports the achieved
    tolerance so the caller can decide whether to retry with looser demands.
    """

    def integrand_re(theta):
        return np.cos(args.phase(np.atleast_1d(theta))[0] - m * theta)

    def integrand_im(theta):
        return np.sin(args.phase(np.atleast_1d(theta))[0] - m * theta)

    # Oscillation grows with both m and the index magnitudes; give quad
    # enough subintervals to resolve it.
    cycles = abs(m) + np.sum(np.arange(1, args.num_tones + 1)
                             * (np.abs(args.alphas) + np.abs(args.betas)))
    limit = int(200 + 20 * cycles)
    re, err_re = integrate.quad(integrand_re, -np.pi, np.pi,
                                epsabs=abs_tol, epsrel=0.0, limit=limit)
    im, err_im = integrate.quad(integrand_im, -np.pi, np.pi,
                                epsabs=abs_tol, epsrel=0.0, limit=limit)
    achieved = (err_re + err_im) / (2.0 * np.pi)
    if achieved > abs_tol:
        raise RuntimeError(
            f"quadrature non-convergence: achieved tolerance {achieved:.3e} "
            f"exceeds requested {abs_tol:.3e}")
    return complex(re, im) / (2.0 * np.pi)


def truncation_order(args: GbfArgs, tol: float = 1e-9) -> int:
    """Smallest order M whose retained energy satisfies Parseval to ``tol``.

    Starting from a Carson-style guess sum_k k*(|alpha_k| + |beta_k|), the
    order is doubled until the residual 1 - sum_{|m|<=M} |c_m|^2 drops below
    ``tol``, then the final coefficient set is scanned for the smallest M
    that already meets the bound.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = np.arange(1, args.num_tones + 1)
    guess = int(np.ceil(np.sum(k * (np.abs(args.alphas) + np.abs(args.betas)))))
    m = max(8, guess)
    while True:
        if m > TRUNCATION_CAP:
            raise RuntimeError("truncation cap exceeded")
        coeffs = gbf_coefficients(args, m)
        if coeffs.parseval_residual() < tol:
            break
        m *= 2
    power = np.abs(coeffs.values) ** 2
    orders = np.abs(coeffs.orders)
    # cumulative energy by increasing |m|
    by_order = np.zeros(m + 1)
    np.add.at(by_order, orders, power)
    residual = 1.0 - np.cumsum(by_order)
    return int(np.argmax(residual < tol))


def gbf_partial(coeffs: GbfCoefficients, k: int, wrt: str) -> GbfCoefficients:
    """Partial derivatives of the coefficients with respect to one index.

    Uses the exact recurrences

        d c_m / d alpha_k = (c_{m-k} - c_{m+k}) / 2
        d c_m / d beta_k  = -j (c_{m-k} + c_{m+k}) / 2

    which follow from differentiating the generating function.  The result
    covers orders |m| <= order_max - k, since each derivative consumes a
    margin of k orders at both ends of the input range.
    """
    if wrt not in ("alpha", "beta"):
        raise ValueError("wrt must be 'alpha' or 'beta'")
    if not 1 <= k <= coeffs.args.num_tones:
        raise ValueError(f"tone number {k} outside 1..{coeffs.args.num_tones}")
    reduced = coeffs.order_max - k
    if reduced < 0:
        raise ValueError("order margin too small")
    c = coeffs.values
    lower = c[: len(c) - 2 * k]   # c_{m-k} for the reduced range
    upper = c[2 * k:]             # c_{m+k}
    if wrt == "alpha":
        values = 0.5 * (lower - upper)
    else:
        values = -0.5j * (lower + upper)
    return GbfCoefficients(order_max=reduced, values=values, args=coeffs.args)
