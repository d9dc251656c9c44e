"""Verification suites run by the CLI (and reused by the acceptance tests).

Every check yields a record ``{"check", "max_error", "tol", "pass", ...}``.
"""
from __future__ import annotations

import itertools

import numpy as np

from .causal import (block_source_points, causal_normal_form, derivative_transport_check,
                     exact_c_array, extract_c_array, mixed_only_check, phi_vac_closed_form,
                     random_causal_sources, to_field_values, verify_bilinear_identity)
from .fields import FieldOp
from .fock import SourcePoint, build_space, phi_vac_oracle, tc_vev
from .functional import FunctionalPolynomial
from .grassmann import (GrassmannPoly, Parity, gp_left_deriv, gp_linear_subst, gp_mul,
                        gp_parity, gp_uniqueness_probe)
from .kernels import commutator_delta, mode_sum_pair
from .response import verify_response_identities
from .spectral import default_grid, delta_part, delta_part_fourier, masks, project
from .wick import (contraction_value, normal_form_literal, normal_form_polynomial,
                   vacuum_value, wick_expand)

SUITES = ("kernels", "causal", "wick", "grassmann")


def check(name, err, tol, **extra):
    err = float(err)
    return {"check": name, "max_error": err, "tol": float(tol), "pass": bool(err <= tol), **extra}


def regime_of(spec):
    if spec.field == "real":
        return "real"
    return "nonrel" if spec.nonrel else "semirel"


def op_kinds(spec):
    return ["Q"] if spec.field == "real" else ["psi", "tpsi"]


# ------------------------------------------------------------ random inputs

def random_product(rng, spec, max_ops=6, min_ops=1, t_range=3.0):
    """Random operator product with pairwise distinct times."""
    n = int(rng.integers(min_ops, max_ops + 1))
    times = rng.permutation(np.round(np.linspace(-t_range, t_range, 4 * max_ops + 1), 6))[:n]
    kinds = op_kinds(spec)
    return tuple(FieldOp(str(rng.choice(kinds)), str(rng.choice(spec.x_labels)), float(t),
                         str(rng.choice(["+", "-"]))) for t in times)


def random_polynomial(rng, spec, grid=None, n_points=4, n_terms=3, degree=4):
    """Random branch-field polynomial over ``n_points`` sample points.

    With a grid, the points sit on grid samples in the middle quarter so that
    all separations stay below half the period.
    """
    if grid is None:
        times = np.round(rng.uniform(-3, 3, n_points), 3)
    else:
        times = grid.times[rng.integers(grid.n * 3 // 8, grid.n * 5 // 8, n_points)]
    pts = [(str(rng.choice(spec.x_labels)), float(t)) for t in times]
    kinds = op_kinds(spec)
    terms = {}
    for _ in range(n_terms):
        d = int(rng.integers(0, degree + 1))
        mono = tuple(FieldOp(str(rng.choice(kinds)), *pts[rng.integers(n_points)],
                             str(rng.choice(["+", "-"]))) for _ in range(d))
        terms[mono] = terms.get(mono, 0) + rng.normal() + 1j * rng.normal()
    return FunctionalPolynomial(terms, spec.statistics == "fermi")


def random_grassmann(rng, k_max=12, n_terms=6, max_len=4, parity=None):
    terms = {}
    for _ in range(n_terms):
        length = int(rng.integers(0, max_len + 1))
        if parity is not None and length % 2 != (0 if parity == Parity.EVEN else 1):
            length = max(0, length - 1) if length else (1 if parity == Parity.ODD else 0)
        key = tuple(sorted(rng.choice(np.arange(1, k_max + 1), size=length, replace=False)))
        terms[tuple(int(k) for k in key)] = rng.normal() + 1j * rng.normal()
    return GrassmannPoly(terms)


# ------------------------------------------------------------------ kernels

def projector_checks(n=256, tol=1e-12, delta_n=8192, delta_tol=1e-4, rng=None):
    rng = rng or np.random.default_rng(0)
    out = []
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    pp, pm = project(x, "+"), project(x, "-")
    out.append(check("P+ + P- = 1", np.max(np.abs(pp + pm - x)), tol))
    spec_pp = np.fft.ifft(project(pp, "+"))
    spec_pm = np.fft.ifft(project(pm, "+"))
    mp, _ = masks(n)
    inner = (mp != 0.5)
    out.append(check("P+P+ = P+ off self-conjugate bins",
                     np.max(np.abs(spec_pp - np.fft.ifft(pp))[inner]), tol))
    out.append(check("P+P- = 0 off self-conjugate bins", np.max(np.abs(spec_pm[inner])), tol))
    half = np.fft.ifft(project(project(np.ones(n), "-"), "+"))[0]
    out.append(check("P+P- = 1/4 on the zero bin", abs(half - 0.25), tol))
    # transfer identities for on-grid exponentials without self-conjugate content
    t = np.arange(n)
    k = rng.choice(np.r_[1:n // 2, n // 2 + 1:n], size=(2, 5))
    f = sum(c * np.exp(-2j * np.pi * kk * t / n) for c, kk in zip(rng.normal(size=5), k[0]))
    g = sum(c * np.exp(-2j * np.pi * kk * t / n) for c, kk in zip(rng.normal(size=5), k[1]))
    P = project
    sums = [np.sum(P(f, "+") * g), np.sum(f * P(g, "-")), np.sum(P(f, "+") * P(g, "-"))]
    scale = max(1.0, float(np.max(np.abs(f))) * float(np.max(np.abs(g))) * n)
    out.append(check("sum f+ g = sum f g- = sum f+ g-",
                     max(abs(a - b) for a in sums for b in sums) / scale, tol))
    out.append(check("sum f+ g+ = sum f- g- = 0",
                     max(abs(np.sum(P(f, "+") * P(g, "+"))), abs(np.sum(P(f, "-") * P(g, "-"))))
                     / scale, tol))
    dt, eps = 0.05, 0.5
    err = 0.0
    for s in "+-":
        tt, vals = delta_part_fourier(delta_n, dt, s, eps)
        sel = np.abs(tt) <= 10
        err = max(err, float(np.max(np.abs(vals[sel] - delta_part(tt[sel], s, eps)))))
    out.append(check("delta parts match their Fourier definition", err, delta_tol,
                     n=delta_n, dt=dt, eps=eps))
    return out


def kernel_oracle_checks(spec, rng, samples=10, tol=1e-9):
    """Kernel-built pair values against Fock-space pair expectations."""
    space = build_space(spec, truncation=min(spec.truncation, 2))
    worst_pair, worst_mode, worst_comm = 0.0, 0.0, 0.0
    kinds = op_kinds(spec)
    for _ in range(samples):
        ta, tb = rng.uniform(-3, 3, 2)
        xa, xb = (str(rng.choice(spec.x_labels)) for _ in range(2))
        for ka, kb in itertools.product(kinds, kinds):
            for ba, bb in itertools.product("+-", "+-"):
                a, b = FieldOp(ka, xa, float(ta), ba), FieldOp(kb, xb, float(tb), bb)
                ref = tc_vev(spec, [a, b], space)
                worst_pair = max(worst_pair, abs(contraction_value(a, b, spec) - ref))
                if spec.field == "channel":
                    worst_mode = max(worst_mode, abs(mode_sum_pair(spec, a, b) - ref))
        if spec.field == "real":
            # a reverse-branch Q always stands to the left: Q-(t) Q+(t') = Q(t) Q(t')
            ab = tc_vev(spec, [FieldOp("Q", xa, float(ta), "-"), FieldOp("Q", xb, float(tb), "+")],
                        space)
            ba = tc_vev(spec, [FieldOp("Q", xb, float(tb), "-"), FieldOp("Q", xa, float(ta), "+")],
                        space)
            comm = ab - ba
            val = -1j * spec.hbar * commutator_delta(spec, xa, xb, ta - tb)
            worst_comm = max(worst_comm, abs(comm - val))
    out = [check("contraction values = Fock pair expectations", worst_pair, tol)]
    if spec.field == "channel":
        out.append(check("mode-wise pair values = whole-field values", worst_mode, tol))
    else:
        out.append(check("commutator kernel = Fock commutator", worst_comm, tol))
    return out


def suite_kernels(parsed, tol=None, rng=None):
    spec, v = parsed.spec, parsed.verify
    rng = rng or np.random.default_rng(v["seed"])
    grid = parsed.grid()
    t_proj = tol if tol is not None else v["tol_projector"]
    t_exact = tol if tol is not None else v["tol_exact"]
    t_kernel = tol if tol is not None else v["tol_kernel"]
    rep = verify_response_identities(spec, grid, tol=t_proj, tol_exact=t_exact)
    out = [check(e["identity"], e["max_error"], e["tol"]) for e in rep["identities"]]
    out += kernel_oracle_checks(spec, rng, tol=t_kernel)
    small = default_grid(spec.omegas, n=128)
    tr = derivative_transport_check(regime_of(spec), spec, small, tol=t_proj)
    out.append(check("transported derivative form = retarded form", tr["max_error"], t_proj,
                     inverse_error=tr["inverse_error"]))
    out += projector_checks(tol=t_exact, delta_tol=1e-4 if tol is None else tol, rng=rng)
    return out, {"grid": rep["grid"],
                 "tilde_retarded_conventions": rep.get("tilde_retarded_conventions")}


# -------------------------------------------------------------------- wick

def complete_matching_count(n_ops, spec):
    from math import factorial, prod
    if spec.field == "real":
        return prod(range(n_ops - 1, 0, -2)) if n_ops % 2 == 0 else 0
    return factorial(n_ops // 2)


def term_count_checks(spec):
    """Matching counts for real-field and channel products of distinct times."""
    from math import comb, factorial, prod
    bad = 0
    for n in range(1, 5):
        if spec.field == "real":
            ops = [FieldOp("Q", spec.x_labels[0], float(k), "+-"[k % 2]) for k in range(2 * n)]
            e = wick_expand(ops, spec)
            full = sum(1 for t in e.terms if not t.residual)
            total = sum(comb(2 * n, 2 * m) * prod(range(2 * m - 1, 0, -2)) for m in range(n + 1))
            bad += (full != prod(range(2 * n - 1, 0, -2))) + (len(e.terms) != total)
        else:
            ops = []
            for k in range(n):
                ops.append(FieldOp("psi", spec.x_labels[0], float(2 * k), "+"))
                ops.append(FieldOp("tpsi", spec.x_labels[-1], float(2 * k + 1), "-"))
            e = wick_expand(ops, spec)
            full = sum(1 for t in e.terms if not t.residual)
            bad += full != factorial(n)
    return check("matching counts", bad, 0)


def sign_law_check(spec, rng, samples=50):
    worst = 0.0
    for _ in range(samples):
        ops = list(random_product(rng, spec, max_ops=6, min_ops=2))
        i = int(rng.integers(0, len(ops) - 1))
        swapped = ops[:]
        swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
        ea, eb = wick_expand(ops, spec), wick_expand(swapped, spec)
        perm = {i: i + 1, i + 1: i}

        def key(term, relabel):
            return frozenset(frozenset((relabel.get(p, p), relabel.get(q, q)))
                             for p, q in term.pairs)
        ta = {key(t, {}): t.coeff for t in ea.terms}
        tb = {key(t, perm): t.coeff for t in eb.terms}
        for k, c in ta.items():
            worst = max(worst, abs(c + tb.get(k, 0)))
    return check("adjacent fermionic swap negates every term", worst, 1e-12)


def wick_oracle_check(spec, rng, samples=200, tol=1e-9, max_ops=6):
    space = build_space(spec)
    worst = 0.0
    for _ in range(samples):
        ops = random_product(rng, spec, max_ops=max_ops)
        val = vacuum_value(wick_expand(ops, spec))
        worst = max(worst, abs(val - tc_vev(spec, list(ops), space)))
    return check("Wick vacuum values = Fock oracle", worst, tol, samples=samples)


def hori_literal_check(spec, rng, samples=20, tol=1e-12):
    worst = 0.0
    for _ in range(samples):
        F = random_polynomial(rng, spec, n_points=3)
        worst = max(worst, normal_form_polynomial(F, spec).max_abs_diff(normal_form_literal(F, spec)))
    return check("matching enumeration = literal derivative exponent", worst, tol)


def suite_wick(parsed, tol=None, rng=None):
    spec, v = parsed.spec, parsed.verify
    rng = rng or np.random.default_rng(v["seed"])
    fermi = spec.statistics == "fermi"
    t_or = tol if tol is not None else (v["tol_oracle_fermi"] if fermi else v["tol_oracle_bose"])
    out = [wick_oracle_check(spec, rng, samples=max(v["samples"], 1) * 10, tol=t_or),
           term_count_checks(spec),
           hori_literal_check(spec, rng, tol=tol if tol is not None else v["tol_exact"])]
    if fermi:
        out.append(sign_law_check(spec, rng))
    return out, {}


# ------------------------------------------------------------------ causal

def route_equivalence_check(spec, rng, samples=50, tol=1e-9):
    regime = regime_of(spec)
    grid = None if regime == "nonrel" else default_grid(spec.omegas)
    worst = 0.0
    for _ in range(samples):
        F = random_polynomial(rng, spec, grid)
        hori = normal_form_polynomial(F, spec)
        causal = to_field_values(causal_normal_form(F, regime, spec, grid))
        worst = max(worst, hori.max_abs_diff(causal))
    return check("causal route = Hori route", worst, tol, regime=regime, samples=samples)


def bilinear_check(spec, grid, rng, samples=20, tol=1e-6):
    regime = regime_of(spec)
    gens = 3 if spec.statistics == "fermi" else 0
    worst = 0.0
    for _ in range(samples):
        c = random_causal_sources(rng, regime, spec, grid, generators=gens)
        worst = max(worst, verify_bilinear_identity(regime, spec, grid, c, tol)["max_error"])
    return check("test-case exponent = retarded exponent", worst, tol, samples=samples)


def moment_check(spec, rng, order_cap=4, tol=1e-9):
    kinds = ["eta+", "eta-"] if spec.field == "real" else ["eta+", "eta-", "teta+", "teta-"]
    n = 3 if spec.field == "real" else 4
    times = rng.permutation(np.linspace(-2, 2, 3 * n))[:n]
    pts = [SourcePoint(kinds[k % len(kinds)], str(rng.choice(spec.x_labels)), float(t))
           for k, t in enumerate(times)]
    closed = phi_vac_closed_form(regime_of(spec), spec, pts, order_cap=order_cap)
    oracle = phi_vac_oracle(spec, pts, order_cap=order_cap)
    return check("closed-form generating functional = oracle moments",
                 closed.max_abs_diff(oracle), tol, order_cap=order_cap)


def c_array_check(spec, rng, tol=1e-9):
    pts = block_source_points(spec, rng)
    phi = phi_vac_oracle(spec, pts, order_cap=4)
    C, resid = extract_c_array(spec, pts, phi)
    exact = exact_c_array(spec.hbar)
    err = max(abs(C[m] - exact[m]) for m in C)
    return check("block coefficients C = statistics-independent values", max(err, resid), tol)


def suite_causal(parsed, tol=None, rng=None):
    spec, v = parsed.spec, parsed.verify
    rng = rng or np.random.default_rng(v["seed"])
    regime = regime_of(spec)
    fermi = spec.statistics == "fermi"
    t_exact = tol if tol is not None else v["tol_exact"]
    t_proj = tol if tol is not None else v["tol_projector"]
    t_kernel = tol if tol is not None else v["tol_kernel"]
    t_or = tol if tol is not None else (v["tol_oracle_fermi"] if fermi else v["tol_oracle_bose"])
    grid = parsed.grid()
    out = [bilinear_check(spec, grid, rng, v["samples"], t_exact if regime == "nonrel" else t_proj),
           route_equivalence_check(spec, rng, 50, t_exact if regime == "nonrel" else t_kernel),
           moment_check(spec, rng, v["order_cap"], t_or)]
    if spec.field == "channel":
        out.append(c_array_check(spec, rng, t_kernel))
    else:
        m = mixed_only_check(spec, default_grid(spec.omegas, n=128), tol=t_kernel)
        out.append(check("retarded exponent couples probes only to sources",
                         max(m["eta_eta"], m["je_je"]), t_kernel))
    return out, {"regime": regime}


# --------------------------------------------------------------- grassmann

def grassmann_checks(rng, samples=40, k_max=12, tol=1e-12):
    anti = nil = prod = chain = 0.0
    probe_bad = 0
    for _ in range(samples):
        i, j = (int(k) for k in rng.choice(np.arange(1, k_max + 1), 2, replace=False))
        gi, gj = GrassmannPoly.gen(i), GrassmannPoly.gen(j)
        anti = max(anti, (gi * gj + gj * gi).max_abs_diff(GrassmannPoly()))
        nil = max(nil, (gi * gi).max_abs_diff(GrassmannPoly()))
        par = Parity.EVEN if rng.integers(2) else Parity.ODD
        a = random_grassmann(rng, k_max, parity=par)
        b = random_grassmann(rng, k_max)
        k = int(rng.integers(1, k_max + 1))
        sign = 1 if gp_parity(a) == Parity.EVEN else -1
        lhs = gp_left_deriv(gp_mul(a, b), k)
        rhs = gp_mul(gp_left_deriv(a, k), b) + sign * gp_mul(a, gp_left_deriv(b, k))
        prod = max(prod, lhs.max_abs_diff(rhs))
        chain = max(chain, chain_rule_error(rng))
        fam = {f"p{m}": random_grassmann(rng, k_max) for m in range(3)}
        status, label, _ = gp_uniqueness_probe(fam)
        nonzero = [lab for lab, p in fam.items() if not p.is_zero()]
        probe_bad += (status == "witness") != bool(nonzero)
        probe_bad += status == "witness" and label not in nonzero
        zero_fam = {"z": GrassmannPoly(), "w": a - a}
        probe_bad += gp_uniqueness_probe(zero_fam)[0] != "all-zero"
    return [check("anticommutativity", anti, tol), check("nilpotency", nil, tol),
            check("graded product rule", prod, tol), check("linear-substitution chain rule", chain, tol),
            check("uniqueness probe soundness and completeness", probe_bad, 0)]


def chain_rule_error(rng, n_phi=3, n_psi=3):
    """∂/∂ψ_j F(Kψ) = Σ_i K[i, j] (∂F/∂φ_i)(Kψ) for fermionic polynomials."""
    phi = [FieldOp("psi", f"a{i}", 0.0) for i in range(n_phi)]
    psi = [FieldOp("psi", f"b{j}", 0.0) for j in range(n_psi)]
    K = rng.normal(size=(n_phi, n_psi)) + 1j * rng.normal(size=(n_phi, n_psi))
    terms = {}
    for _ in range(4):
        d = int(rng.integers(1, 4))
        mono = tuple(phi[k] for k in rng.choice(n_phi, d, replace=False))
        terms[mono] = rng.normal() + 1j * rng.normal()
    F = FunctionalPolynomial(terms, True)
    G = gp_linear_subst(F, K, phi, psi)
    err = 0.0
    for j, pj in enumerate(psi):
        lhs = G.left_deriv(pj)
        rhs = FunctionalPolynomial({}, True)
        for i, pi in enumerate(phi):
            rhs = rhs + gp_linear_subst(F.left_deriv(pi), K, phi, psi) * K[i, j]
        err = max(err, lhs.max_abs_diff(rhs))
    return err


def suite_grassmann(parsed, tol=None, rng=None):
    rng = rng or np.random.default_rng(parsed.verify["seed"])
    return grassmann_checks(rng, tol=tol if tol is not None else parsed.verify["tol_exact"]), {}


RUNNERS = {"kernels": suite_kernels, "causal": suite_causal, "wick": suite_wick,
           "grassmann": suite_grassmann}


def run_suite(name, parsed, tol=None, seed=None):
    names = SUITES if name == "all" else (name,)
    report = {}
    for n in names:
        seed_n = parsed.verify["seed"] if seed is None else seed
        rng = np.random.default_rng([seed_n, SUITES.index(n)])
        checks, meta = RUNNERS[n](parsed, tol=tol, rng=rng)
        report[n] = {"checks": checks, "pass": all(c["pass"] for c in checks), **meta}
    return report
