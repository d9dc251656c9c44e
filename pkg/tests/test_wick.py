import numpy as np
import pytest

from causalwick.errors import OverlappingPairs
from causalwick.fields import FieldOp, oscillator_spec, random_channel_spec, random_real_spec
from causalwick.functional import FunctionalPolynomial
from causalwick.kernels import kernel_eval
from causalwick.verify import (hori_literal_check, random_product, sign_law_check,
                               term_count_checks, wick_oracle_check)
from causalwick.wick import (contraction_value, matching_sign, normal_form_polynomial,
                             partial_matchings, vacuum_value, wick_expand)


def Q(t, b, x="x1"):
    return FieldOp("Q", x, t, b)


def test_channel_contractions():
    spec = random_channel_spec(np.random.default_rng(0))
    a, b = FieldOp("psi", "x1", 1.0, "+"), FieldOp("tpsi", "x2", 0.2, "+")
    assert contraction_value(a, b, spec) == pytest.approx(-1j * kernel_eval("DF", spec, "x1", "x2", 0.8))
    assert contraction_value(a, FieldOp("psi", "x2", 0.0, "+"), spec) == 0


def test_oscillator_equal_time_pair():
    assert contraction_value(Q(0.7, "-"), Q(0.7, "+"), oscillator_spec()) == pytest.approx(0.5)


def test_matching_signs():
    assert matching_sign([True] * 4, [(0, 1), (2, 3)]) == 1
    assert matching_sign([True] * 4, [(0, 3), (1, 2)]) == 1
    assert matching_sign([True] * 4, [(0, 2), (1, 3)]) == -1
    assert matching_sign([True] * 4, [(0, 2), (1, 3)], eps=1) == 1
    with pytest.raises(OverlappingPairs):
        matching_sign([True] * 4, [(0, 2), (2, 3)])


def test_term_counts_small():
    spec = oscillator_spec()
    assert len(wick_expand([Q(1.0, "+"), Q(0.0, "-")], spec).terms) == 2
    assert len(wick_expand([Q(float(t), "+") for t in range(4)], spec).terms) == 10
    ops = [FieldOp("psi", "x1", 0.0, "+"), FieldOp("tpsi", "x1", 1.0, "+"),
           FieldOp("psi", "x2", 2.0, "-"), FieldOp("tpsi", "x2", 3.0, "-")]
    full = [m for m in partial_matchings(ops) if len(m) == 2]
    assert len(full) == 2


@pytest.mark.parametrize("spec", [oscillator_spec(), random_real_spec(np.random.default_rng(1)),
                                  random_channel_spec(np.random.default_rng(1))])
def test_term_count_formulas(spec):
    assert term_count_checks(spec)["pass"]


def test_vacuum_values_trivial():
    spec = oscillator_spec()
    assert vacuum_value(wick_expand([], spec)) == 1
    assert vacuum_value(wick_expand([Q(0.0, "+"), Q(1.0, "+"), Q(2.0, "-")], spec)) == 0


def test_random_products_match_oracle(any_spec):
    rng = np.random.default_rng(3)
    tol = 1e-12 if any_spec.statistics == "fermi" else 1e-9
    assert wick_oracle_check(any_spec, rng, samples=30, tol=tol, max_ops=4)["pass"]


def test_sign_law():
    spec = random_channel_spec(np.random.default_rng(4), statistics="fermi")
    assert sign_law_check(spec, np.random.default_rng(5), samples=20)["pass"]


def test_hori_matches_literal_derivatives(any_spec):
    assert hori_literal_check(any_spec, np.random.default_rng(6), samples=8)["pass"]


def test_normal_form_of_feynman_pair():
    spec = oscillator_spec()
    F = FunctionalPolynomial({(Q(1.3, "+"), Q(0.2, "+")): 1.0})
    out = normal_form_polynomial(F, spec)
    const = out.terms[()]
    assert const == pytest.approx(-1j * kernel_eval("GF", spec, "x1", "x1", 1.1))
    assert out.terms[(Q(0.2, None), Q(1.3, None))] == 1


def test_normal_form_trivial_inputs():
    spec = oscillator_spec()
    assert normal_form_polynomial(FunctionalPolynomial.const(2.5), spec).terms == {(): 2.5}
    lin = FunctionalPolynomial({(Q(0.1, "-"),): 3.0})
    assert normal_form_polynomial(lin, spec).terms == {(Q(0.1, None),): 3.0}


def test_equal_time_pairs_are_flagged():
    e = wick_expand([Q(0.5, "+"), Q(0.5, "+")], oscillator_spec())
    assert e.flags and "theta(0)" in e.flags[0]


def test_random_product_times_distinct():
    spec = oscillator_spec()
    ops = random_product(np.random.default_rng(0), spec, max_ops=6, min_ops=6)
    assert len({op.t for op in ops}) == 6
