"""Numerical certification of the response-transformation identities.

Each identity expresses a contour kernel through frequency parts of the
retarded kernels.  Both sides are sampled on the half-offset lag grid of a
``Grid`` and compared bin by bin.
"""
from __future__ import annotations

import numpy as np

from .kernels import kernel_eval
from .spectral import project


def _sampler(spec, grid):
    tau = grid.taus
    damp = grid.damping_applied(spec.omegas)
    weight = np.exp(-grid.eps * np.abs(tau)) if damp else np.ones_like(tau)

    def sample(kind, xa, xb):
        return weight * kernel_eval(kind, spec, xa, xb, tau)

    return sample, damp


def _entry(name, err, tol):
    return {"identity": name, "max_error": float(err), "tol": float(tol),
            "pass": bool(err <= tol)}


def verify_response_identities(spec, grid, tol=1e-6, tol_exact=1e-12):
    """Check the response identities for every (x, x') pair of ``spec``."""
    grid.check_nyquist(spec.omegas)
    sample, damp = _sampler(spec, grid)
    P = lambda v, s: project(v, s)   # noqa: E731
    R = lambda v: v[::-1]            # τ → -τ on the half-offset grid  # noqa: E731
    xs = spec.x_labels
    worst = {}

    def record(name, err):
        worst[name] = max(worst.get(name, 0.0), float(err))

    if spec.field == "real":
        gr = {(a, b): sample("GR", a, b) for a in xs for b in xs}
        for a in xs:
            for b in xs:
                lhs = sample("GF", a, b)
                rhs = P(gr[a, b], "+") + R(P(gr[b, a], "+"))
                record("GF = GR+(x,x',τ) + GR+(x',x,-τ)", np.max(np.abs(lhs - rhs)))
                lhs = sample("G+", a, b)
                rhs = P(gr[a, b], "+") - R(P(gr[b, a], "-"))
                record("G+ = GR+(x,x',τ) - GR-(x',x,-τ)", np.max(np.abs(lhs - rhs)))
        entries = [_entry(k, v, tol) for k, v in worst.items()]
    else:
        for a in xs:
            for b in xs:
                dr = sample("DR", a, b)
                tdr = sample("tDR", a, b)
                dp, dm = sample("D+", a, b), sample("D-", a, b)
                df, tdf = sample("DF", a, b), sample("tDF", a, b)
                record("D+ = DR+ - tDR+", np.max(np.abs(dp - (P(dr, "+") - P(tdr, "+")))))
                record("D- = DR- - tDR-", np.max(np.abs(dm - (P(dr, "-") - P(tdr, "-")))))
                record("DF = DR+ + tDR-", np.max(np.abs(df - (P(dr, "+") + P(tdr, "-")))))
                record("tDF = DR- + tDR+", np.max(np.abs(tdf - (P(dr, "-") + P(tdr, "+")))))
        entries = [_entry(k, v, tol) for k, v in worst.items()]
        if spec.nonrel:
            entries += verify_nonrel_identities(spec, grid.taus, tol_exact)
    tau_ref = grid.dt * 1.5
    a = xs[0]
    b = xs[-1]
    report = {
        "grid": {"t0": grid.t0, "dt": grid.dt, "n": grid.n, "eps": grid.eps,
                 "damping_applied": damp,
                 "modes_on_grid": [bool(grid.on_grid(w)) for w in spec.omegas]},
        "identities": entries,
        "pass": all(e["pass"] for e in entries),
    }
    if spec.field == "channel":
        report["tilde_retarded_conventions"] = {
            "tau": tau_ref, "x": a, "x2": b,
            "tDR(x,x2,tau)": complex(kernel_eval("tDR", spec, a, b, tau_ref)),
            "tDR(x,x2,-tau)": complex(kernel_eval("tDR", spec, a, b, -tau_ref)),
            "tDR(x2,x,-tau) untransposed": complex(kernel_eval("tDR", spec, b, a, -tau_ref)),
        }
    return report


def verify_nonrel_identities(spec, taus, tol=1e-12):
    """Pointwise algebraic identities of the nonrel channel (no projection)."""
    worst = {"DF = DR": 0.0, "tDF = tDR": 0.0, "D+ = DR - tDR": 0.0, "D = D+": 0.0}
    for a in spec.x_labels:
        for b in spec.x_labels:
            dr = kernel_eval("DR", spec, a, b, taus)
            tdr = kernel_eval("tDR", spec, a, b, taus)
            worst["DF = DR"] = max(worst["DF = DR"],
                                   np.max(np.abs(kernel_eval("DF", spec, a, b, taus) - dr)))
            worst["tDF = tDR"] = max(worst["tDF = tDR"],
                                     np.max(np.abs(kernel_eval("tDF", spec, a, b, taus) - tdr)))
            dp = kernel_eval("D+", spec, a, b, taus)
            worst["D+ = DR - tDR"] = max(worst["D+ = DR - tDR"], np.max(np.abs(dp - (dr - tdr))))
            worst["D = D+"] = max(worst["D = D+"],
                                  np.max(np.abs(kernel_eval("D", spec, a, b, taus) - dp)))
    return [_entry("nonrel " + k, v, tol) for k, v in worst.items()]
