"""Response substitutions, reordering forms on grids and the causal Wick route.

Regimes: "real" (oscillator / real field, alias "osc"), "semirel" (channel,
projector-based substitution) and "nonrel" (channel without antiparticles,
purely algebraic substitution).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridMismatch, InvariantViolation, SpecMismatch
from .fields import FieldOp
from .functional import FunctionalPolynomial
from .grassmann import GrassmannPoly, gp_exp
from .kernels import kernel_eval, wrap
from .spectral import project

REGIMES = ("real", "semirel", "nonrel")


def normalize_regime(regime, spec=None):
    regime = "real" if regime == "osc" else regime
    if regime not in REGIMES:
        raise InvariantViolation(f"unknown regime {regime!r}")
    if spec is not None:
        if (regime == "real") != (spec.field == "real"):
            raise SpecMismatch(f"regime {regime} does not fit a {spec.field} spec")
        if regime == "nonrel" and not spec.nonrel:
            raise SpecMismatch("nonrel regime needs a nonrel spec")
    return regime


def _P(a, sign):
    return project(a, sign, axis=1)


# ------------------------------------------------------------------ signals

@dataclass
class BranchSources:
    """Branch source densities, arrays of shape (X, n) or (X, n, G) for fermions.

    For real fields only eta_p / eta_m are used.
    """
    eta_p: np.ndarray
    eta_m: np.ndarray
    teta_p: Optional[np.ndarray] = None
    teta_m: Optional[np.ndarray] = None


@dataclass
class CausalSources:
    """Probe η (and η̃) and external sources j_e or σ_e (and σ̃_e)."""
    eta: np.ndarray
    src: np.ndarray
    teta: Optional[np.ndarray] = None
    tsrc: Optional[np.ndarray] = None


@dataclass
class BranchFields:
    psi_p: np.ndarray
    psi_m: np.ndarray
    tpsi_p: Optional[np.ndarray] = None
    tpsi_m: Optional[np.ndarray] = None


@dataclass
class CausalFields:
    zeta: np.ndarray
    e: np.ndarray
    tzeta: Optional[np.ndarray] = None
    te: Optional[np.ndarray] = None


def _same_shape(*arrays):
    shapes = {np.shape(a) for a in arrays if a is not None}
    if len(shapes) > 1:
        raise GridMismatch(f"component shapes differ: {sorted(shapes)}")


def to_causal_sources(regime, s: BranchSources, hbar=1.0) -> CausalSources:
    regime = normalize_regime(regime)
    _same_shape(s.eta_p, s.eta_m, s.teta_p, s.teta_m)
    if regime == "real":
        return CausalSources(s.eta_p - s.eta_m, hbar * (_P(s.eta_p, "+") + _P(s.eta_m, "-")))
    if regime == "semirel":
        return CausalSources(s.eta_m - s.eta_p, hbar * (_P(s.eta_p, "+") + _P(s.eta_m, "-")),
                             s.teta_p - s.teta_m,
                             hbar * (_P(s.teta_p, "+") + _P(s.teta_m, "-")))
    return CausalSources(s.eta_m - s.eta_p, hbar * s.eta_p, s.teta_p - s.teta_m, hbar * s.teta_m)


def from_causal_sources(regime, c: CausalSources, hbar=1.0) -> BranchSources:
    regime = normalize_regime(regime)
    _same_shape(c.eta, c.src, c.teta, c.tsrc)
    if regime == "real":
        return BranchSources(c.src / hbar + _P(c.eta, "-"), c.src / hbar - _P(c.eta, "+"))
    if regime == "semirel":
        return BranchSources(c.src / hbar - _P(c.eta, "-"), c.src / hbar + _P(c.eta, "+"),
                             c.tsrc / hbar + _P(c.teta, "-"), c.tsrc / hbar - _P(c.teta, "+"))
    return BranchSources(c.src / hbar, c.eta + c.src / hbar,
                         c.teta + c.tsrc / hbar, c.tsrc / hbar)


def to_causal_fields(regime, f: BranchFields, hbar=1.0) -> CausalFields:
    regime = normalize_regime(regime)
    _same_shape(f.psi_p, f.psi_m, f.tpsi_p, f.tpsi_m)
    if regime == "real":
        return CausalFields((f.psi_p - f.psi_m) / hbar, _P(f.psi_p, "+") + _P(f.psi_m, "-"))
    if regime == "semirel":
        return CausalFields((f.psi_m - f.psi_p) / hbar, _P(f.psi_p, "+") + _P(f.psi_m, "-"),
                            (f.tpsi_p - f.tpsi_m) / hbar,
                            _P(f.tpsi_p, "+") + _P(f.tpsi_m, "-"))
    return CausalFields((f.psi_m - f.psi_p) / hbar, f.psi_p, (f.tpsi_p - f.tpsi_m) / hbar, f.tpsi_m)


def from_causal_fields(regime, c: CausalFields, hbar=1.0) -> BranchFields:
    regime = normalize_regime(regime)
    _same_shape(c.zeta, c.e, c.tzeta, c.te)
    if regime == "real":
        return BranchFields(c.e + hbar * _P(c.zeta, "-"), c.e - hbar * _P(c.zeta, "+"))
    if regime == "semirel":
        return BranchFields(c.e - hbar * _P(c.zeta, "-"), c.e + hbar * _P(c.zeta, "+"),
                            c.te + hbar * _P(c.tzeta, "-"), c.te - hbar * _P(c.tzeta, "+"))
    return BranchFields(c.e, c.e + hbar * c.zeta, c.te + hbar * c.tzeta, c.te)


# ------------------------------------------------------- grid bilinear forms

def kernel_vector(kind, spec, grid, xa, xb, conj=False):
    """k[m] = K(x, x', wrap(m dt)), the first column of the circulant grid kernel."""
    tau = wrap(np.arange(grid.n) * grid.dt, grid.period)
    k = kernel_eval(kind, spec, xa, xb, tau, period=grid.period)
    if grid.damping_applied(spec.omegas):
        k = k * np.exp(-grid.eps * np.abs(tau))
    return np.conj(k) if conj else k


def apply_kernel(kind, spec, grid, g, conj=False):
    """(K g)(x, t_j) = Σ_{x', l} dt K(x, x', t_j - t_l) g(x', t_l) on the periodic grid."""
    g = np.asarray(g, dtype=complex)
    out = np.zeros_like(g)
    G = np.fft.fft(g, axis=1)
    for a, xa in enumerate(spec.x_labels):
        for b, xb in enumerate(spec.x_labels):
            kf = np.fft.fft(kernel_vector(kind, spec, grid, xa, xb, conj))
            shape = (grid.n,) + (1,) * (g.ndim - 2)
            out[a] += np.fft.ifft(kf.reshape(shape) * G[b], axis=0)
    return out * grid.dt


def bilinear(f, kind, spec, grid, g, conj=False):
    """Quadrature of ∫∫ f K g; complex for c-number samples, GrassmannPoly for
    Grassmann-linear samples (last axis = generator index - 1)."""
    kg = apply_kernel(kind, spec, grid, g, conj)
    f = np.asarray(f, dtype=complex)
    if f.ndim == 2:
        return complex(np.sum(f * kg) * grid.dt)
    m = np.einsum("xjk,xjl->kl", f, kg) * grid.dt
    return _pairs_to_gp(m)


def _pairs_to_gp(m):
    terms = {}
    G = m.shape[0]
    for k in range(G):
        for l in range(G):
            if k == l or m[k, l] == 0:
                continue
            key = (k + 1, l + 1) if k < l else (l + 1, k + 1)
            sign = 1 if k < l else -1
            terms[key] = terms.get(key, 0) + sign * m[k, l]
    return GrassmannPoly(terms, G)


def z_form_eval(regime, spec, grid, s: BranchSources):
    """Reordering bilinear form evaluated on grid sources."""
    normalize_regime(regime, spec)
    grid.check_nyquist(spec.omegas)
    hb = spec.hbar
    if spec.field == "real":
        return -0.5j * hb * (bilinear(s.eta_p, "GF", spec, grid, s.eta_p)
                             - bilinear(s.eta_m, "GF", spec, grid, s.eta_m, conj=True)
                             + 2 * bilinear(s.eta_m, "G+", spec, grid, s.eta_p))
    # argument order (f̃₊, f₊, f̃₋, f₋)
    return -1j * spec.eps * hb * (bilinear(s.teta_p, "DF", spec, grid, s.eta_p)
                                  - bilinear(s.teta_m, "tDF", spec, grid, s.eta_m)
                                  + bilinear(s.teta_m, "D+", spec, grid, s.eta_p)
                                  - bilinear(s.teta_p, "D-", spec, grid, s.eta_m))


def _test_case_args(s: BranchSources):
    if s.teta_p is None:
        return BranchSources(1j * s.eta_p, -1j * s.eta_m)
    return BranchSources(1j * s.eta_p, -1j * s.eta_m, 1j * s.teta_p, -1j * s.teta_m)


def test_case_exponent(regime, spec, grid, s: BranchSources):
    """ε_f Z_C(iη̃₊, iη₊, -iη̃₋, -iη₋), or Z_C(iη₊, -iη₋) for real fields."""
    z = z_form_eval(regime, spec, grid, _test_case_args(s))
    return z if spec.field == "real" else spec.eps * z


def retarded_exponent(spec, grid, c: CausalSources):
    """iηG_R j_e, or iη̃Δ_Rσ_e - iσ̃_eΔ̃_Rη for channels."""
    if spec.field == "real":
        return 1j * bilinear(c.eta, "GR", spec, grid, c.src)
    return 1j * (bilinear(c.teta, "DR", spec, grid, c.src)
                 - bilinear(c.tsrc, "tDR", spec, grid, c.eta))


def verify_bilinear_identity(regime, spec, grid, c: CausalSources, tol=1e-6):
    """Compare the test-case exponent in branch variables with its retarded
    form in causal variables.  The error is reported absolute and relative to
    max(1, largest coefficient), since source normalization is arbitrary."""
    regime = normalize_regime(regime, spec)
    b = from_causal_sources(regime, c, spec.hbar)
    lhs = test_case_exponent(regime, spec, grid, b)
    rhs = retarded_exponent(spec, grid, c)
    if isinstance(lhs, GrassmannPoly) or isinstance(rhs, GrassmannPoly):
        lhs = lhs if isinstance(lhs, GrassmannPoly) else GrassmannPoly.const(lhs)
        rhs = rhs if isinstance(rhs, GrassmannPoly) else GrassmannPoly.const(rhs)
        err = lhs.max_abs_diff(rhs)
        scale = max([1.0] + [abs(v) for v in rhs.terms.values()])
    else:
        err = abs(lhs - rhs)
        scale = max(1.0, abs(rhs))
    rel = err / scale
    return {"regime": regime, "abs_error": float(err), "max_error": float(rel),
            "scale": float(scale), "tol": tol, "pass": bool(rel <= tol)}


def random_band_limited(rng, shape, n, band=None, generators=0):
    """Random smooth signals: random Fourier content in |k| ≤ band (default n/8)."""
    band = n // 8 if band is None else band
    full = tuple(shape) + (n,) + ((generators,) if generators else ())
    spec = rng.normal(size=full) + 1j * rng.normal(size=full)
    k = np.fft.fftfreq(n) * n
    keep = (np.abs(k) <= band) & (k != 0)
    shape_k = [1] * len(full)
    shape_k[len(shape)] = n
    spec = spec * keep.reshape(shape_k)
    return np.fft.ifft(spec, axis=len(shape)) * np.sqrt(n)


def random_causal_sources(rng, regime, spec, grid, generators=0):
    X = len(spec.x_labels)
    mk = lambda: random_band_limited(rng, (X,), grid.n, generators=generators)  # noqa: E731
    if spec.field == "real":
        return CausalSources(mk(), mk())
    return CausalSources(mk(), mk(), mk(), mk())


# ------------------------------------------------------------ test case

def phi_vac_closed_form(regime, spec, sources, grid=None, order_cap=4):
    """Closed-form vacuum generating functional.

    ``sources`` may be BranchSources or CausalSources on ``grid`` (returns a
    complex number, or a GrassmannPoly for Grassmann-linear samples), or a list
    of SourcePoint (returns the Taylor polynomial up to ``order_cap`` in the
    point amplitudes; GrassmannPoly for fermions, generator j+1 at point j).
    """
    regime = normalize_regime(regime, spec)
    if isinstance(sources, (list, tuple)):
        return _phi_vac_points(spec, list(sources), order_cap)
    if isinstance(sources, CausalSources):
        x = retarded_exponent(spec, grid, sources)
    else:
        x = test_case_exponent(regime, spec, grid, sources)
    return gp_exp(x) if isinstance(x, GrassmannPoly) else complex(np.exp(x))


def exponent_points(spec, points):
    """The test-case exponent for point sources as a degree-2 polynomial in
    the point amplitudes v_j (variables are the integers j)."""
    hb = spec.hbar
    fermi = spec.statistics == "fermi"
    terms = {}

    def add(i, j, c):
        terms[(i, j)] = terms.get((i, j), 0) + c

    if spec.field == "real":
        for i, a in enumerate(points):
            for j, b in enumerate(points):
                tau = a.t - b.t
                if a.kind == "eta+" and b.kind == "eta+":
                    add(i, j, 0.5j * hb * kernel_eval("GF", spec, a.x, b.x, tau))
                elif a.kind == "eta-" and b.kind == "eta-":
                    add(i, j, -0.5j * hb * np.conj(kernel_eval("GF", spec, a.x, b.x, tau)))
                elif a.kind == "eta-" and b.kind == "eta+":
                    add(i, j, -1j * hb * kernel_eval("G+", spec, a.x, b.x, tau))
        return FunctionalPolynomial(terms, False)
    for i, a in enumerate(points):
        if not a.kind.startswith("t"):
            continue
        for j, b in enumerate(points):
            if b.kind.startswith("t"):
                continue
            tau = a.t - b.t
            ba, bb = a.kind[-1], b.kind[-1]
            if ba == "+" and bb == "+":
                c = kernel_eval("DF", spec, a.x, b.x, tau)
            elif ba == "-" and bb == "-":
                c = -kernel_eval("tDF", spec, a.x, b.x, tau)
            elif ba == "-":
                c = -kernel_eval("D+", spec, a.x, b.x, tau)
            else:
                c = kernel_eval("D-", spec, a.x, b.x, tau)
            add(i, j, 1j * hb * c)
    return FunctionalPolynomial(terms, fermi)


def _phi_vac_points(spec, points, order_cap):
    x = exponent_points(spec, points)
    total = FunctionalPolynomial.const(1.0, x.fermionic)
    power = total
    m = 1
    while 2 * m <= order_cap:
        power = power * x * (1.0 / m)
        if not power.terms:
            break
        total = total + power
        m += 1
    if not x.fermionic:
        return total
    return poly_to_grassmann(total)


def poly_to_grassmann(p):
    """Fermionic polynomial in integer variables j → GrassmannPoly with γ_{j+1}."""
    out = GrassmannPoly()
    for mono, c in p.canonical().terms.items():
        out = out + GrassmannPoly({tuple(j + 1 for j in mono): c})
    return out


# -------------------------------------------------------- causal Wick route

_CAUSAL_NAME = {"qe": "Q", "psie": "psi", "tpsie": "tpsi"}


def to_field_values(poly):
    """Rename causal fields q_e, ψ_e, ψ̃_e to the single fields Q, ψ, ψ̃."""
    return poly.rename(lambda v: FieldOp(_CAUSAL_NAME[v.kind], v.x, v.t)).canonical()


def _slots(op, regime, hb):
    """(e-variable, z-part) for a branch field; z-part = (kind, proj, coeff) or None."""
    e_kind = {"Q": "qe", "psi": "psie", "tpsi": "tpsie"}[op.kind]
    e = FieldOp(e_kind, op.x, op.t)
    plus = op.branch == "+"
    if regime == "real":
        z = ("zeta", "-", hb) if plus else ("zeta", "+", -hb)
    elif regime == "semirel":
        if op.kind == "psi":
            z = ("zeta", "-", -hb) if plus else ("zeta", "+", hb)
        else:
            z = ("tzeta", "-", hb) if plus else ("tzeta", "+", -hb)
    else:
        if op.kind == "psi":
            z = None if plus else ("zeta", None, hb)
        else:
            z = ("tzeta", None, hb) if plus else None
    return e, z


class _RetardedPairs:
    """Pair values of the retarded derivative form, with projections cached."""

    def __init__(self, regime, spec, grid):
        self.regime, self.spec, self.grid = regime, spec, grid
        self.cache = {}

    def _projected(self, kind, xa, ta, xb, sign, reverse):
        key = (kind, xa, ta, xb, sign, reverse)
        if key not in self.cache:
            g = self.grid
            tl = g.times
            tau = (tl - ta) if reverse else (ta - tl)
            if reverse:     # h_l = K(x_b, x_a, t_l - t_a)
                f = kernel_eval(kind, self.spec, xb, xa, wrap(tau, g.period), period=g.period)
            else:           # f_l = K(x_a, x_b, t_a - t_l)
                f = kernel_eval(kind, self.spec, xa, xb, wrap(tau, g.period), period=g.period)
            if g.damping_applied(self.spec.omegas):
                f = f * np.exp(-g.eps * np.abs(wrap(tau, g.period)))
            self.cache[key] = project(f, sign)
        return self.cache[key]

    def kernel(self, kind, e, z_op, sign, reverse):
        """Σ_l K(...) P^s[b, l] for e-sample ``e`` and z-sample ``z_op``."""
        if sign is None:
            if reverse:
                return kernel_eval(kind, self.spec, z_op.x, e.x, z_op.t - e.t)
            return kernel_eval(kind, self.spec, e.x, z_op.x, e.t - z_op.t)
        arr = self._projected(kind, e.x, e.t, z_op.x, sign, reverse)
        return arr[self.grid.index_of(z_op.t)]

    def value(self, e_pos, e, z_pos, z_op, z):
        """Contribution of contracting e-slot ``e`` with z-slot ``z``."""
        zkind, sign, coeff = z
        eps = self.spec.eps
        if self.regime == "real":
            if e.kind != "qe":
                return None
            return -1j * self.kernel("GR", e, z_op, sign, False) * coeff
        if zkind == "tzeta" and e.kind == "psie":
            order = eps if e_pos < z_pos else 1
            return order * (-1j * eps) * self.kernel("DR", e, z_op, sign, False) * coeff
        if zkind == "zeta" and e.kind == "tpsie":
            order = eps if z_pos < e_pos else 1
            return order * (1j * eps) * self.kernel("tDR", e, z_op, sign, True) * coeff
        return None


def _check_samples(F, regime, grid):
    if regime == "nonrel":
        return
    if grid is None:
        raise GridMismatch(f"regime {regime} needs a grid")
    pts = {(v.x, v.t) for v in F.variables()}
    for _, t in pts:
        grid.index_of(t)
    times = [t for _, t in pts]
    if times and max(times) - min(times) >= grid.period / 2:
        raise GridMismatch("sample points must lie within half a grid period")


def causal_normal_form(F, regime, spec, grid=None, degree_cap=4):
    """Causal route: substitute causal fields, apply the retarded derivative
    exponent by matching enumeration, set ζ = ζ̃ = 0."""
    regime = normalize_regime(regime, spec)
    F.check_degree(degree_cap)
    _check_samples(F, regime, grid)
    if grid is not None and regime != "nonrel":
        grid.check_nyquist(spec.omegas)
    pairs = _RetardedPairs(regime, spec, grid)
    hb = spec.hbar
    fermi = spec.statistics == "fermi"
    out = {}
    for mono, c in F.terms.items():
        slots = [_slots(op, regime, hb) for op in mono]
        n = len(mono)
        for choice in itertools.product((0, 1), repeat=n):
            if any(ch and slots[i][1] is None for i, ch in enumerate(choice)):
                continue
            zs = [i for i in range(n) if choice[i]]
            es = [i for i in range(n) if not choice[i]]
            if len(zs) > len(es):
                continue
            for match, val in _match_z(zs, es, mono, slots, pairs):
                sign = 1
                if fermi:
                    from .wick import matching_sign
                    sign = matching_sign([True] * n, sorted(match), -1)
                used = {i for p in match for i in p}
                key = tuple(slots[i][0] for i in es if i not in used)
                out[key] = out.get(key, 0) + c * sign * val
    return FunctionalPolynomial(out, fermi).canonical()


def _match_z(zs, es, mono, slots, pairs):
    """Assign every z-slot an e-slot partner; yields (pairs (i<j), value)."""
    if not zs:
        yield [], 1.0 + 0j
        return
    z = zs[0]
    for e in es:
        v = pairs.value(e, slots[e][0], z, mono[z], slots[z][1])
        if v is None:
            continue
        rest = [k for k in es if k != e]
        for m, w in _match_z(zs[1:], rest, mono, slots, pairs):
            yield [(min(e, z), max(e, z))] + m, v * w


# ------------------------------------------------- derivative transport

def substitution_matrices(regime, n, nx, hbar=1.0):
    """Explicit linear maps (branch → causal) as block matrices on the grid.

    Returns (S, S_tilde, S_inv, S_tilde_inv); column blocks are (+, -) branch
    samples and row blocks (e, ζ) causal samples, each block nx·n wide.
    """
    from .spectral import projector_matrix
    if regime == "nonrel":
        Pp = Pm = None
    else:
        Pp, Pm = projector_matrix(n, "+"), projector_matrix(n, "-")
    I = np.eye(nx * n)

    def blk(m):
        return np.kron(np.eye(nx), m)

    if regime == "real":
        S = np.block([[blk(Pp), blk(Pm)], [I / hbar, -I / hbar]])
        Sinv = np.block([[I, hbar * blk(Pm)], [I, -hbar * blk(Pp)]])
        return S, S, Sinv, Sinv
    if regime == "semirel":
        S = np.block([[blk(Pp), blk(Pm)], [-I / hbar, I / hbar]])
        St = np.block([[blk(Pp), blk(Pm)], [I / hbar, -I / hbar]])
        Sinv = np.block([[I, -hbar * blk(Pm)], [I, hbar * blk(Pp)]])
        Stinv = np.block([[I, hbar * blk(Pm)], [I, -hbar * blk(Pp)]])
        return S, St, Sinv, Stinv
    Z = np.zeros_like(I)
    S = np.block([[I, Z], [-I / hbar, I / hbar]])
    St = np.block([[Z, I], [I / hbar, -I / hbar]])
    Sinv = np.block([[I, Z], [I, hbar * I]])
    Stinv = np.block([[I, hbar * I], [I, Z]])
    return S, St, Sinv, Stinv


def kernel_matrix(kind, spec, grid, conj=False):
    """Dense (x, t) × (x', t') matrix of a periodic grid kernel."""
    n = grid.n
    X = len(spec.x_labels)
    M = np.zeros((X * n, X * n), dtype=complex)
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    for a, xa in enumerate(spec.x_labels):
        for b, xb in enumerate(spec.x_labels):
            k = kernel_vector(kind, spec, grid, xa, xb, conj)
            M[a * n:(a + 1) * n, b * n:(b + 1) * n] = k[idx]
    return M


def derivative_transport_check(regime, spec, grid, tol=1e-6):
    """Transport the derivative reordering form through the substitution and
    compare with the retarded form, entrywise."""
    regime = normalize_regime(regime, spec)
    grid.check_nyquist(spec.omegas)
    hb = spec.hbar
    n, X = grid.n, len(spec.x_labels)
    S, St, Sinv, Stinv = substitution_matrices(regime, n, X, hb)
    N = X * n
    zero = np.zeros((N, N), dtype=complex)
    if regime == "real":
        GF = kernel_matrix("GF", spec, grid)
        GFc = kernel_matrix("GF", spec, grid, conj=True)
        Gp = kernel_matrix("G+", spec, grid)
        # symmetric matrix of the quadratic derivative form over (∂₊, ∂₋)
        Z = -0.5j * hb * np.block([[GF, Gp.T], [Gp, -GFc]])
        GR = kernel_matrix("GR", spec, grid)
        R = 0.5 * np.block([[zero, -1j * GR], [-1j * GR.T, zero]])
        T = S @ Z @ S.T
    else:
        eps = spec.eps
        k = {kind: kernel_matrix(kind, spec, grid) for kind in ("DF", "tDF", "D+", "D-", "DR", "tDR")}
        # rows (∂ψ₊, ∂ψ₋), columns (∂ψ̃₊, ∂ψ̃₋)
        Z = -1j * eps * hb * np.block([[k["DF"], -k["D-"]], [k["D+"], -k["tDF"]]])
        R = np.block([[zero, -1j * eps * k["DR"]], [1j * eps * k["tDR"], zero]])
        T = S @ Z @ St.T
    err = float(np.max(np.abs(T - R)))
    inv_err = max(float(np.max(np.abs(S @ Sinv - np.eye(2 * N)))),
                  float(np.max(np.abs(St @ Stinv - np.eye(2 * N)))))
    return {"regime": regime, "max_error": err, "inverse_error": inv_err, "tol": tol,
            "pass": bool(err <= tol and inv_err <= 1e-10)}


def mixed_only_check(spec, grid, tol=1e-9):
    """In causal variables the order-2 log of Φ_vac couples η only to j_e:
    the η-η and j_e-j_e blocks of the transported form vanish (real fields)."""
    n, X = grid.n, len(spec.x_labels)
    hb = spec.hbar
    GF = kernel_matrix("GF", spec, grid)
    GFc = kernel_matrix("GF", spec, grid, conj=True)
    Gp = kernel_matrix("G+", spec, grid)
    dt2 = grid.dt ** 2
    # exponent Z_C(iη₊, -iη₋) as a symmetric matrix over (η₊, η₋)
    A = 0.5j * hb * dt2 * np.block([[GF, -Gp.T], [-Gp, -GFc]])
    _, _, Sinv, _ = substitution_matrices("real", n, X, hb)
    # (η₊, η₋) = M (η, j_e): η± = j_e/ħ ± P^∓η
    N = X * n
    from .spectral import projector_matrix
    blk = lambda m: np.kron(np.eye(X), m)  # noqa: E731
    M = np.block([[blk(projector_matrix(n, "-")), np.eye(N) / hb],
                  [-blk(projector_matrix(n, "+")), np.eye(N) / hb]])
    B = M.T @ A @ M
    scale = max(1.0, float(np.max(np.abs(B))))
    ee = float(np.max(np.abs(B[:N, :N]))) / scale
    jj = float(np.max(np.abs(B[N:, N:]))) / scale
    return {"eta_eta": ee, "je_je": jj, "pass": bool(ee <= tol and jj <= tol)}


# ------------------------------------------- block structure of the test case

BLOCKS = (("teta+", "eta+", "DF", 1), ("teta-", "eta-", "tDF", -1),
          ("teta-", "eta+", "D+", -1), ("teta+", "eta-", "D-", 1))


def block_polynomials(spec, points):
    """B1 = η̃₊Δ_Fη₊, B2 = η̃₋Δ̃_Fη₋, B3 = η̃₋Δ⁺η₊, B4 = η̃₊Δ⁻η₋ for point sources."""
    fermi = spec.statistics == "fermi"
    out = []
    for ka, kb, kernel, _ in BLOCKS:
        terms = {}
        for i, a in enumerate(points):
            if a.kind != ka:
                continue
            for j, b in enumerate(points):
                if b.kind == kb:
                    terms[(i, j)] = kernel_eval(kernel, spec, a.x, b.x, a.t - b.t)
        out.append(FunctionalPolynomial(terms, fermi))
    return out


def block_multi_indices(order=2):
    for total in range(order + 1):
        for m in itertools.product(range(total + 1), repeat=4):
            if sum(m) == total:
                yield m


def exact_c_array(hbar=1.0, order=2):
    """C_m = Π (iħ s_k)^{m_k} / m_k!, s = (+1, -1, -1, +1)."""
    from math import factorial
    out = {}
    for m in block_multi_indices(order):
        c = 1.0 + 0j
        for (_, _, _, s), mk in zip(BLOCKS, m):
            c *= (1j * hbar * s) ** mk / factorial(mk)
        out[m] = c
    return out


def extract_c_array(spec, points, phi, order=2):
    """Least-squares fit of Φ = Σ_m C_m B1^m1 B2^m2 B3^m3 B4^m4, |m| ≤ order.

    ``phi`` is a FunctionalPolynomial in point indices (bose) or a
    GrassmannPoly with generator j+1 at point j (fermi).  Returns
    (C dict, relative residual); multi-indices whose basis product vanishes
    identically (Δ⁻ blocks of nonrel channels) are left out.
    """
    fermi = spec.statistics == "fermi"
    blocks = block_polynomials(spec, points)
    ms = list(block_multi_indices(order))
    basis = []
    for m in ms:
        p = FunctionalPolynomial.const(1.0, fermi)
        for b, mk in zip(blocks, m):
            for _ in range(mk):
                p = p * b
        basis.append(poly_to_grassmann(p) if fermi else p.canonical())
    target = phi if fermi else phi.canonical()
    keys = sorted({k for b in basis for k in b.terms} | set(target.terms), key=lambda k: (len(k), k))
    A = np.array([[b.terms.get(k, 0) for b in basis] for k in keys], dtype=complex)
    y = np.array([target.terms.get(k, 0) for k in keys], dtype=complex)
    # blocks that vanish identically (Δ⁻ for nonrel channels) leave their C undetermined
    live = [k for k in range(len(ms)) if np.any(A[:, k] != 0)]
    sol, *_ = np.linalg.lstsq(A[:, live], y, rcond=None)
    resid = float(np.linalg.norm(A[:, live] @ sol - y) / max(1.0, np.linalg.norm(y)))
    return {ms[k]: c for k, c in zip(live, sol)}, resid


def block_source_points(spec, rng, per_kind=2):
    """``per_kind`` point sources of every kind at distinct random times."""
    from .fock import SourcePoint, SOURCE_KINDS
    kinds = [k for k in SOURCE_KINDS for _ in range(per_kind)]
    times = rng.permutation(np.linspace(-2.0, 2.0, 3 * len(kinds)))[:len(kinds)]
    return [SourcePoint(k, str(rng.choice(spec.x_labels)), float(np.round(t, 6)))
            for k, t in zip(kinds, times)]
