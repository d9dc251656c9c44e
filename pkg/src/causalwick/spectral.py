"""Uniform time grids, DFT frequency projectors and the δ^(±) kernels.

Convention: a frequency-positive signal is a superposition of e^{-iωt}, ω > 0.
With numpy's FFT this is bin k > 0 of ``ifft``.  The zero and Nyquist bins are
self-conjugate and are split half/half between the two parts, so P⁺ + P⁻ = 1
and P⁻ is the reflection of P⁺.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import GridMismatch, NyquistViolation


@dataclass(frozen=True)
class Grid:
    t0: float
    dt: float
    n: int
    eps: float = 0.0
    damping: str = "auto"     # auto | always | never

    def __post_init__(self):
        if self.n <= 0 or self.n & (self.n - 1):
            raise GridMismatch(f"n = {self.n} is not a power of two")
        if not self.dt > 0:
            raise GridMismatch("dt must be positive")
        if self.damping not in ("auto", "always", "never"):
            raise GridMismatch(f"unknown damping mode {self.damping!r}")

    @property
    def period(self):
        return self.n * self.dt

    @property
    def times(self):
        return self.t0 + np.arange(self.n) * self.dt

    @property
    def taus(self):
        """Half-offset lag grid, symmetric under τ → -τ (index reversal)."""
        return (np.arange(self.n) - self.n / 2 + 0.5) * self.dt

    def index_of(self, t):
        j = (t - self.t0) / self.dt
        k = int(round(j))
        if abs(j - k) > 1e-9 or not 0 <= k < self.n:
            raise GridMismatch(f"time {t!r} is not a grid sample")
        return k

    def bin_of(self, omega):
        """Fractional DFT bin of angular frequency omega."""
        return omega * self.period / (2 * np.pi)

    def on_grid(self, omega):
        b = self.bin_of(omega)
        return abs(b - round(b)) < 1e-9 and 0 < round(b) < self.n // 2

    def check_nyquist(self, omegas):
        w = max(omegas, default=0.0)
        if w * self.dt > np.pi / 4 * (1 + 1e-12):
            raise NyquistViolation(f"ω·dt = {w * self.dt:.4g} exceeds π/4 (4x Nyquist margin)")

    def damping_applied(self, omegas):
        if self.damping == "never" or self.eps == 0:
            return False
        if self.damping == "always":
            return True
        return not all(self.on_grid(w) for w in omegas)


def commensurate_base(omegas, max_den=64):
    """Largest ω₀ with every ω an integer multiple of it, or None."""
    wmin = min(omegas)
    den = 1
    for w in omegas:
        r = Fraction(w / wmin).limit_denominator(max_den)
        if abs(float(r) - w / wmin) > 1e-12 * max(1.0, w / wmin):
            return None
        den = den * r.denominator // math.gcd(den, r.denominator)
    return wmin / den


def default_grid(omegas, n=1024, damping="auto", t0=None, dt=None):
    """Grid with max ω·dt ≤ π/4; dt snapped so commensurate ω sit on DFT bins."""
    omegas = list(omegas)
    wmax = max(omegas)
    if dt is None:
        dt = np.pi / (4 * wmax)
        base = commensurate_base(omegas)
        if base is not None:
            m = int(math.floor(n * base / (8 * wmax) + 1e-9))
            if m >= 1:
                dt = 2 * np.pi * m / base / n
    if t0 is None:
        t0 = -(n // 2) * dt
    return Grid(t0, dt, n, eps=4.0 / (n * dt), damping=damping)


def masks(n):
    k = np.fft.fftfreq(n) * n
    plus = np.where(k > 0, 1.0, np.where(k < 0, 0.0, 0.5))
    plus[n // 2] = 0.5
    return plus, 1.0 - plus


def project(values, sign, axis=-1):
    """Frequency part of sampled values along ``axis``."""
    values = np.asarray(values, dtype=complex)
    n = values.shape[axis]
    mp, mm = masks(n)
    m = mp if sign == "+" else mm
    shape = [1] * values.ndim
    shape[axis] = n
    return np.fft.fft(np.fft.ifft(values, axis=axis) * m.reshape(shape), axis=axis)


def projector_matrix(n, sign):
    return project(np.eye(n), sign, axis=0)


@dataclass
class SampledSignal:
    values: np.ndarray
    grid: Grid
    eps: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape[-1] != self.grid.n:
            raise GridMismatch("signal length differs from grid size")

    def damped(self):
        if self.eps == 0:
            return self.values
        return self.values * np.exp(-self.eps * np.abs(self.grid.times))


def freq_part(s: SampledSignal, sign: str) -> SampledSignal:
    return SampledSignal(project(s.damped(), sign), s.grid)


def projected_derivative(values, dt, sign):
    """Time derivative composed with a frequency projection (constrained variation)."""
    return project(np.gradient(np.asarray(values, dtype=complex), dt, axis=-1), sign)


def delta_part(t, sign, eps):
    """Closed form of the damped δ^(±)(t) = ±1/(2πi(t ∓ iε))."""
    t = np.asarray(t, dtype=float)
    if sign == "+":
        return 1.0 / (2j * np.pi * (t - 1j * eps))
    return -1.0 / (2j * np.pi * (t + 1j * eps))


def delta_part_fourier(n, dt, sign, eps):
    """δ^(±) from its Fourier definition ∫dω/2π θ(±ω) e^{-ε|ω|} e^{-iωt}, on a
    centred grid t_j = (j - n/2) dt.  Returns (t, values)."""
    k = np.fft.fftfreq(n) * n
    omega = 2 * np.pi * k / (n * dt)
    mp, mm = masks(n)
    m = mp if sign == "+" else mm
    t = (np.arange(n) - n // 2) * dt
    spec = m * np.exp(-eps * np.abs(omega)) / (n * dt)
    # Σ_k spec_k e^{-iω_k t_j} with t_j = (j - n/2) dt is a forward FFT
    vals = np.fft.fft(spec * np.exp(1j * np.pi * k))
    return t, vals
