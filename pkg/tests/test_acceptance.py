"""Acceptance criteria, one test each; every test records a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` (or plain pytest, the lines are
also repeated in the terminal summary) or ``python3 tests/test_acceptance.py``.
"""
import time
from math import comb, factorial, prod

import numpy as np
import pytest

from causalwick.causal import (block_source_points, causal_normal_form, exact_c_array,
                               extract_c_array, phi_vac_closed_form, random_causal_sources,
                               to_field_values, verify_bilinear_identity)
from causalwick.fields import FieldOp, oscillator_spec, random_channel_spec, random_real_spec
from causalwick.fock import SourcePoint, build_space, phi_vac_oracle, tc_vev
from causalwick.response import verify_response_identities
from causalwick.spectral import default_grid
from causalwick.verify import (grassmann_checks, projector_checks, random_polynomial,
                               random_product, sign_law_check)
from causalwick.wick import contraction_value, normal_form_polynomial, vacuum_value, wick_expand

RESULTS = {}


def record(n, name, ok, detail):
    line = f"[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {name}: {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def test_c01_pair_products():
    t0 = time.perf_counter()
    spec = oscillator_spec(truncation=8)
    space = build_space(spec)
    rng = np.random.default_rng(101)
    worst = 0.0
    for t, t2 in rng.uniform(-5, 5, (20, 2)):
        # both on the forward branch, both on the reverse branch, straddling the turn
        for ba, bb in (("+", "+"), ("-", "-"), ("-", "+")):
            a, b = FieldOp("Q", "x1", float(t), ba), FieldOp("Q", "x1", float(t2), bb)
            worst = max(worst, abs(contraction_value(a, b, spec) - tc_vev(spec, [a, b], space)))
    dt = time.perf_counter() - t0
    record(1, "pair-product identities", worst <= 1e-10 and dt < 1,
           f"max err {worst:.2e} (tol 1e-10), {dt:.2f}s (< 1s)")


def test_c02_wick_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(102)
    out = []
    for stat, trunc, tol in (("bose", 6, 1e-9), ("fermi", 1, 1e-12)):
        spec = random_channel_spec(rng, n_modes=2, statistics=stat, truncation=trunc)
        space = build_space(spec)
        worst = 0.0
        for _ in range(200):
            ops = random_product(rng, spec, max_ops=6)
            worst = max(worst, abs(vacuum_value(wick_expand(ops, spec)) - tc_vev(spec, list(ops), space)))
        out.append((stat, space.dim, worst, tol))
    dt = time.perf_counter() - t0
    ok = all(w <= tol for _, _, w, tol in out) and dt < 30
    detail = "; ".join(f"{s} dim {d} max err {w:.2e} (tol {tol:g})" for s, d, w, tol in out)
    record(2, "Wick-oracle equivalence", ok, f"{detail}, {dt:.2f}s (< 30s)")


def test_c03_term_counting():
    real = random_real_spec(np.random.default_rng(0))
    chan = random_channel_spec(np.random.default_rng(0))
    bad = []
    for n in range(1, 5):
        ops = [FieldOp("Q", "x1", float(k), "+-"[k % 2]) for k in range(2 * n)]
        terms = wick_expand(ops, real).terms
        full = sum(1 for t in terms if not t.residual)
        total = sum(comb(2 * n, 2 * m) * prod(range(2 * m - 1, 0, -2)) for m in range(n + 1))
        if full != prod(range(2 * n - 1, 0, -2)) or len(terms) != total:
            bad.append(f"real n={n}")
        ops = []
        for k in range(n):
            ops += [FieldOp("psi", "x1", 2.0 * k, "+"), FieldOp("tpsi", "x2", 2.0 * k + 1, "-")]
        full = sum(1 for t in wick_expand(ops, chan).terms if not t.residual)
        if full != factorial(n):
            bad.append(f"channel n={n}")
    record(3, "term counting", not bad,
           "(2n-1)!!, sum C(2n,2m)(2m-1)!! and n! for n <= 4" + (f"; mismatches {bad}" if bad else ""))


def test_c04_fermionic_sign_law():
    spec = random_channel_spec(np.random.default_rng(104), statistics="fermi")
    c = sign_law_check(spec, np.random.default_rng(105), samples=50)
    record(4, "fermionic sign law", c["pass"], f"50 products, max |T + T'| {c['max_error']:.2e}")


def test_c05_response_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(105)
    cases = [("nonrel", random_channel_spec(rng, nonrel=True, statistics="fermi"), 1e-12),
             ("oscillator", oscillator_spec(), 1e-6),
             ("real field", random_real_spec(rng), 1e-6),
             ("channel", random_channel_spec(rng), 1e-6)]
    parts, ok = [], True
    for name, spec, tol in cases:
        g = default_grid(spec.omegas, n=1024)
        rep = verify_response_identities(spec, g, tol=tol, tol_exact=1e-12)
        err = max(e["max_error"] for e in rep["identities"])
        ok &= rep["pass"] and err <= tol and g.eps == pytest.approx(4 / (g.n * g.dt))
        parts.append(f"{name} {err:.1e}")
    dt = time.perf_counter() - t0
    ok &= dt < 10
    record(5, "response-transformation identities", ok,
           ", ".join(parts) + f" (n=1024, eps=4/(n dt)), {dt:.2f}s (< 10s)")


def test_c06_bilinear_identity():
    rng = np.random.default_rng(106)
    cases = [("nonrel", random_channel_spec(rng, nonrel=True), 1e-12, 0),
             ("nonrel fermi", random_channel_spec(rng, nonrel=True, statistics="fermi"), 1e-12, 3),
             ("osc", oscillator_spec(), 1e-6, 0),
             ("semirel", random_channel_spec(rng), 1e-6, 0),
             ("semirel fermi", random_channel_spec(rng, statistics="fermi"), 1e-6, 3)]
    parts, ok = [], True
    for name, spec, tol, gens in cases:
        regime = name.split()[0]
        g = default_grid(spec.omegas, n=1024)
        worst = 0.0
        for _ in range(20):
            c = random_causal_sources(rng, regime, spec, g, generators=gens)
            worst = max(worst, verify_bilinear_identity(regime, spec, g, c, tol)["max_error"])
        ok &= worst <= tol
        parts.append(f"{name} {worst:.1e}")
    record(6, "bilinear-form identity", ok, ", ".join(parts) + " (20 source sets each, relative error)")


def test_c07_route_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(107)
    cases = [("osc", oscillator_spec(), 1e-9),
             ("real", random_real_spec(rng), 1e-9),
             ("semirel bose", random_channel_spec(rng), 1e-9),
             ("semirel fermi", random_channel_spec(rng, statistics="fermi"), 1e-9),
             ("nonrel bose", random_channel_spec(rng, nonrel=True), 1e-12),
             ("nonrel fermi", random_channel_spec(rng, nonrel=True, statistics="fermi"), 1e-12)]
    parts, ok = [], True
    for name, spec, tol in cases:
        regime = name.split()[0]
        g = None if regime == "nonrel" else default_grid(spec.omegas)
        worst = 0.0
        for _ in range(50):
            F = random_polynomial(rng, spec, g, n_points=4, degree=4)
            hori = normal_form_polynomial(F, spec)
            worst = max(worst, hori.max_abs_diff(to_field_values(causal_normal_form(F, regime, spec, g))))
        ok &= worst <= tol
        parts.append(f"{name} {worst:.1e}")
    dt = time.perf_counter() - t0
    ok &= dt < 60
    record(7, "causal Wick theorem route equivalence", ok,
           ", ".join(parts) + f" (50 polynomials each), {dt:.2f}s (< 60s)")


def test_c08_test_case_formulas():
    rng = np.random.default_rng(108)
    bose = random_channel_spec(rng, n_modes=1, x_labels=("x1",), truncation=4)
    kinds = ["teta+", "eta+", "teta-", "eta-"]
    pts = [SourcePoint(k, "x1", float(t)) for k, t in zip(kinds, rng.permutation(np.linspace(-2, 2, 8))[:4])]
    bose_err = phi_vac_closed_form("semirel", bose, pts).max_abs_diff(phi_vac_oracle(bose, pts))
    osc = oscillator_spec(truncation=4)
    opts = [SourcePoint(k, "x1", t) for k, t in (("eta+", 0.3), ("eta-", -1.1), ("eta+", 1.7))]
    bose_err = max(bose_err, phi_vac_closed_form("osc", osc, opts).max_abs_diff(phi_vac_oracle(osc, opts)))
    fermi = random_channel_spec(rng, statistics="fermi")
    fpts = [SourcePoint(k, str(rng.choice(fermi.x_labels)), float(t))
            for k, t in zip(kinds * 2, rng.permutation(np.linspace(-2, 2, 16))[:8])]
    fermi_err = phi_vac_closed_form("semirel", fermi, fpts, order_cap=8).max_abs_diff(
        phi_vac_oracle(fermi, fpts, order_cap=8))
    arrays = {}
    for stat, spec in (("bose", bose), ("fermi", fermi)):
        p = block_source_points(spec, rng)
        arrays[stat], _ = extract_c_array(spec, p, phi_vac_oracle(spec, p, order_cap=4))
    c_diff = max(abs(arrays["bose"][m] - arrays["fermi"][m]) for m in arrays["bose"])
    c_exact = max(abs(arrays["bose"][m] - v) for m, v in exact_c_array().items())
    ok = bose_err <= 1e-9 and fermi_err <= 1e-12 and c_diff <= 1e-12
    record(8, "test-case formulas", ok,
           f"bose moments {bose_err:.1e} (tol 1e-9), fermi coefficients {fermi_err:.1e} (tol 1e-12), "
           f"C bose vs fermi {c_diff:.1e}, C vs closed values {c_exact:.1e}")


def test_c09_grassmann_suite():
    t0 = time.perf_counter()
    checks = grassmann_checks(np.random.default_rng(109), samples=100, k_max=12)
    dt = time.perf_counter() - t0
    ok = all(c["pass"] for c in checks) and dt < 5
    record(9, "Grassmann suite", ok,
           f"{len(checks)} properties, K <= 12, worst {max(c['max_error'] for c in checks):.1e}, "
           f"{dt:.2f}s (< 5s)")


def test_c10_projector_suite():
    checks = projector_checks(n=1024, tol=1e-12, delta_n=8192, delta_tol=1e-4,
                              rng=np.random.default_rng(110))
    ok = all(c["pass"] for c in checks)
    worst_delta = checks[-1]["max_error"]
    record(10, "projector suite", ok,
           f"decomposition/annihilation/transfer <= 1e-12 (self-conjugate bins: 1/4), "
           f"delta parts {worst_delta:.1e} (tol 1e-4)")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
