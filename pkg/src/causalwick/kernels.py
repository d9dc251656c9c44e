"""Closed-form Green-function kernels from a mode table.

All kernels are mode sums.  θ(0) follows ``spec.theta0`` (1/2 by default).
Passing ``period`` evaluates the periodized kernel used on DFT grids: τ is
wrapped into [-L/2, L/2) and θ is also 1/2 at the self-reflective point -L/2.
"""
from __future__ import annotations

import numpy as np

THETA_KINDS = {"DF", "tDF", "DR", "tDR", "GF", "GR", "gF"}
KERNEL_KINDS = ("D+", "D-", "D", "DF", "tDF", "DR", "tDR", "GF", "G+", "GR", "G", "gF", "g+")
# friendlier aliases accepted on input
ALIASES = {"Δ+": "D+", "Δ-": "D-", "Δ": "D", "Δ_F": "DF", "Δ̃_F": "tDF", "Δ_R": "DR",
           "Δ̃_R": "tDR", "G_F": "GF", "G_R": "GR", "g_F": "gF"}


def wrap(tau, period):
    tau = np.asarray(tau, dtype=float)
    return (tau + period / 2) % period - period / 2


def theta(tau, theta0=0.5, period=None):
    tau = np.asarray(tau, dtype=float)
    out = np.where(tau > 0, 1.0, np.where(tau < 0, 0.0, theta0))
    if period is not None:
        edge = np.isclose(np.abs(tau), period / 2, rtol=0, atol=1e-9 * period)
        out = np.where(edge, 0.5, out)
    return out


def _plus(spec, xi, xj, tau, modes=None):
    """Δ⁺(x,x',τ) = i Σ u(x) ũ(x') e^{-iωτ} / 2ω."""
    tau = np.asarray(tau, dtype=float)
    out = np.zeros(tau.shape, dtype=complex)
    for k, m in enumerate(spec.modes):
        if modes is not None and k not in modes:
            continue
        out += 1j * m.u[xi] * m.tu[xj] * np.exp(-1j * m.omega * tau) / (2 * m.omega)
    return out


def _minus(spec, xi, xj, tau, modes=None):
    """Δ⁻(x,x',τ) = -iε Σ v(x') ṽ(x) e^{iωτ} / 2ω."""
    tau = np.asarray(tau, dtype=float)
    out = np.zeros(tau.shape, dtype=complex)
    if spec.nonrel:
        return out
    for k, m in enumerate(spec.modes):
        if modes is not None and k not in modes:
            continue
        out += -1j * spec.eps * m.v[xj] * m.tv[xi] * np.exp(1j * m.omega * tau) / (2 * m.omega)
    return out


def kernel_eval(kind, spec, x, x2, tau, period=None, modes=None):
    """Evaluate kernel ``kind`` at (x, x', τ); τ may be an array.

    For the mode kernels gF / g+ the labels x, x2 are ignored and ``modes``
    must name a single mode index.
    """
    kind = ALIASES.get(kind, kind)
    scalar = np.ndim(tau) == 0
    tau = np.asarray(tau, dtype=float)
    if period is not None:
        tau = wrap(tau, period)
    th0 = spec.theta0
    th = theta(tau, th0, period)
    thm = theta(-tau, th0, period)
    if kind in ("gF", "g+"):
        (k,) = modes
        g = 1j * np.exp(-1j * spec.modes[k].omega * tau)
        val = g * th if kind == "gF" else g
        return complex(val) if scalar else val
    xi = spec.xi(x) if isinstance(x, str) else x
    xj = spec.xi(x2) if isinstance(x2, str) else x2

    def plus(a, b, t):
        return _plus(spec, a, b, t, modes)

    def minus(a, b, t):
        return _minus(spec, a, b, t, modes)

    if kind == "D+" or kind == "G+":
        val = plus(xi, xj, tau)
    elif kind == "D-":
        val = minus(xi, xj, tau)
    elif kind == "D":
        val = plus(xi, xj, tau) + minus(xi, xj, tau)
    elif kind == "DF":
        val = th * plus(xi, xj, tau) - thm * minus(xi, xj, tau)
    elif kind == "tDF":
        val = th * minus(xi, xj, tau) - thm * plus(xi, xj, tau)
    elif kind == "DR":
        val = th * (plus(xi, xj, tau) + minus(xi, xj, tau))
    elif kind == "tDR":
        val = -thm * (plus(xi, xj, tau) + minus(xi, xj, tau))
    elif kind == "GF":
        val = th * plus(xi, xj, tau) + thm * plus(xj, xi, -tau)
    elif kind == "G":
        val = plus(xi, xj, tau) - plus(xj, xi, -tau)
    elif kind == "GR":
        val = th * (plus(xi, xj, tau) - plus(xj, xi, -tau))
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    return complex(val) if scalar else val


def uses_theta0(kind, tau):
    kind = ALIASES.get(kind, kind)
    return kind in THETA_KINDS and np.any(np.asarray(tau) == 0)


def commutator_delta(spec, x, x2, tau):
    """Commutator kernel: Δ = Δ⁺ + Δ⁻ for channels, G⁺(τ) - G⁺(x',x,-τ) for real fields."""
    if spec.field == "real":
        return kernel_eval("G", spec, x, x2, tau)
    return kernel_eval("D", spec, x, x2, tau)


def mode_sum_pair(spec, a, b):
    """⟨T_C a b⟩ for a ψ/ψ̃ pair assembled mode by mode from ladder propagators.

    Independent of the whole-field kernels: mode κ contributes
    (ħ/2ω)[u ũ' P(ψ later) ⟨b b†⟩ + ε ṽ v' P(ψ̃ later) ⟨c c†⟩] with the
    ladder propagators written through g⁺.
    """
    if {a.kind, b.kind} != {"psi", "tpsi"}:
        return 0j
    eps = spec.eps
    p, tp, swap = (a, b, 1) if a.kind == "psi" else (b, a, eps)
    xi, xj = spec.xi(p.x), spec.xi(tp.x)
    tau = p.t - tp.t
    if p.branch == tp.branch:
        s = tau if p.branch == "+" else -tau
        p_later = float(theta(s, spec.theta0))
        tp_later = float(theta(-s, spec.theta0))
    else:
        p_later = 1.0 if p.branch == "-" else 0.0
        tp_later = 1.0 - p_later
    total = 0j
    for k, m in enumerate(spec.modes):
        bb = -1j * kernel_eval("g+", spec, None, None, tau, modes=[k])
        cc = -1j * kernel_eval("g+", spec, None, None, -tau, modes=[k])
        val = m.u[xi] * m.tu[xj] * p_later * bb
        if not spec.nonrel:
            val += eps * m.tv[xi] * m.v[xj] * tp_later * cc
        total += spec.hbar / (2 * m.omega) * val
    return swap * total
