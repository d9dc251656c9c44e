import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalwick.errors import MixedParity
from causalwick.fields import FieldOp
from causalwick.functional import FunctionalPolynomial
from causalwick.grassmann import (GeneratorAllocator, GrassmannPoly, Parity, gp_exp,
                                  gp_left_deriv, gp_linear_subst, gp_mul, gp_parity,
                                  gp_uniqueness_probe)
from causalwick.verify import chain_rule_error

g = GrassmannPoly.gen
ZERO = GrassmannPoly()

coeffs = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
monomials = st.lists(st.integers(1, 8), max_size=4, unique=True).map(lambda m: tuple(sorted(m)))
polys = st.dictionaries(monomials, coeffs, max_size=5).map(GrassmannPoly)


def test_generators_anticommute():
    assert gp_mul(g(2), g(1)) == -gp_mul(g(1), g(2))
    assert gp_mul(g(2), g(1)).coefficient((1, 2)) == -1


def test_nilpotent():
    assert gp_mul(g(1), g(1)).is_zero()


def test_distributive_example():
    p = (2 + g(1)) * (3 + g(2))
    assert p == GrassmannPoly({(): 6, (1,): 3, (2,): 2, (1, 2): 1})


def test_zero_coefficients_are_pruned():
    p = GrassmannPoly({(1,): 1.0}) - GrassmannPoly({(1,): 1.0})
    assert p.terms == {}


def test_unsorted_keys_are_canonicalised():
    assert GrassmannPoly({(3, 1): 2.0}) == GrassmannPoly({(1, 3): -2.0})
    assert GrassmannPoly({(2, 2): 1.0}).is_zero()


def test_left_derivative_examples():
    p = g(1) * g(2)
    assert gp_left_deriv(p, 1) == g(2)
    assert gp_left_deriv(p, 2) == -g(1)
    assert gp_left_deriv(GrassmannPoly.const(5), 3).is_zero()


def test_parity():
    assert gp_parity(g(1) * g(2)) == Parity.EVEN
    assert gp_parity(g(1)) == Parity.ODD
    assert gp_parity(GrassmannPoly.const(3)) == Parity.EVEN
    with pytest.raises(MixedParity):
        gp_parity(1 + g(1))


def test_exp_truncates_by_nilpotency():
    x = g(1) * g(2) + g(3) * g(4)
    e = gp_exp(x)
    assert e.coefficient((1, 2, 3, 4)) == pytest.approx(1.0)
    assert e.coefficient(()) == 1
    assert gp_exp(GrassmannPoly.const(1.0) + g(1) * g(2)).coefficient(()) == pytest.approx(np.e)


@given(polys, polys, polys)
def test_associative(a, b, c):
    assert ((a * b) * c).max_abs_diff(a * (b * c)) < 1e-9


@given(polys, polys)
def test_odd_elements_anticommute(a, b):
    odd = lambda p: GrassmannPoly({k: v for k, v in p.terms.items() if len(k) % 2})  # noqa: E731
    a, b = odd(a), odd(b)
    assert (a * b + b * a).max_abs_diff(ZERO) < 1e-9


@given(polys, polys, st.integers(1, 8))
def test_graded_product_rule(a, b, k):
    a = GrassmannPoly({m: c for m, c in a.terms.items() if len(m) % 2 == 0})
    lhs = gp_left_deriv(a * b, k)
    rhs = gp_left_deriv(a, k) * b + a * gp_left_deriv(b, k)
    assert lhs.max_abs_diff(rhs) < 1e-9
    a_odd = a * g(9)
    lhs = gp_left_deriv(a_odd * b, k)
    rhs = gp_left_deriv(a_odd, k) * b - a_odd * gp_left_deriv(b, k)
    assert lhs.max_abs_diff(rhs) < 1e-9


@given(polys, st.integers(1, 8), st.integers(1, 8))
def test_derivatives_anticommute(p, j, k):
    a = gp_left_deriv(gp_left_deriv(p, j), k)
    b = gp_left_deriv(gp_left_deriv(p, k), j)
    assert (a + b).max_abs_diff(ZERO) < 1e-9


def test_uniqueness_probe_examples():
    assert gp_uniqueness_probe({"a": ZERO, "b": ZERO})[0] == "all-zero"
    top = GrassmannPoly({tuple(range(1, 7)): 1.0})
    status, label, probe = gp_uniqueness_probe({("x1", 0.0): ZERO, ("x1", 1.0): top})
    assert (status, label, probe) == ("witness", ("x1", 1.0), 7)
    status, label, _ = gp_uniqueness_probe({"a": ZERO, "b": GrassmannPoly.const(2.0), "c": ZERO})
    assert (status, label) == ("witness", "b")


@settings(max_examples=50)
@given(st.dictionaries(st.integers(0, 5), polys, min_size=1, max_size=4))
def test_uniqueness_probe_sound_and_complete(family):
    status, label, probe = gp_uniqueness_probe(family)
    nonzero = [k for k, p in family.items() if not p.is_zero()]
    if nonzero:
        assert status == "witness" and label in nonzero
    else:
        assert status == "all-zero"
    assert probe > max(p.max_generator for p in family.values())


def _slots(n, tag):
    return [FieldOp("psi", f"{tag}{i}", 0.0) for i in range(n)]


def test_linear_subst_identity_and_swap():
    phi = _slots(2, "a")
    F = FunctionalPolynomial({(phi[0], phi[1]): 1.0, (): 2.0}, True)
    assert gp_linear_subst(F, np.eye(2), phi, phi).max_abs_diff(F) == 0
    swapped = gp_linear_subst(F, np.array([[0, 1], [1, 0]]), phi, phi)
    assert swapped.max_abs_diff(FunctionalPolynomial({(phi[0], phi[1]): -1.0, (): 2.0}, True)) == 0


def test_linear_subst_shape_mismatch():
    phi = _slots(2, "a")
    with pytest.raises(ValueError):
        gp_linear_subst(FunctionalPolynomial({}, True), np.eye(3), phi, phi)


def test_chain_rule_random_kernels():
    rng = np.random.default_rng(3)
    assert max(chain_rule_error(rng) for _ in range(10)) < 1e-12


def test_allocator_hands_out_unique_indices():
    alloc = GeneratorAllocator()
    got = []

    def work():
        got.extend(alloc.fresh_many(50))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(got) == list(range(1, 401))
