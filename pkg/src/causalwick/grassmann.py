"""Finite Grassmann algebra with complex coefficients.

Monomials are strictly increasing tuples of positive generator indices.
Derivatives act from the left.
"""
from __future__ import annotations

import itertools
import threading
from enum import Enum

import numpy as np

from .errors import MixedParity


class Parity(Enum):
    EVEN = 0
    ODD = 1


def merge_sign(a, b):
    """Sign and merged tuple for the product of monomials a and b.

    Returns (0, None) when an index repeats.
    """
    if set(a) & set(b):
        return 0, None
    # count inversions: pairs (i in a, j in b) with i > j
    inv = 0
    for i in a:
        for j in b:
            if i > j:
                inv += 1
    return (-1) ** inv, tuple(sorted(a + b))


def sort_sign(seq):
    """Sign of the permutation sorting seq, and the sorted tuple; 0 on repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0, None
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return (-1) ** inv, tuple(sorted(seq))


class GrassmannPoly:
    """Polynomial in anticommuting generators γ1, γ2, ..."""

    __slots__ = ("terms", "max_generator")

    def __init__(self, terms=None, max_generator=0):
        clean = {}
        top = max_generator
        for key, c in (terms or {}).items():
            key = tuple(key)
            if any(b <= a for a, b in zip(key, key[1:])):
                s, key = sort_sign(key)
                if s == 0:
                    continue
                c = s * c
            if c == 0:
                continue
            clean[key] = clean.get(key, 0) + complex(c)
            if clean[key] == 0:
                del clean[key]
            if key:
                top = max(top, key[-1])
        self.terms = clean
        self.max_generator = top

    @classmethod
    def const(cls, c):
        return cls({(): c})

    @classmethod
    def gen(cls, k, c=1.0):
        if k < 1:
            raise ValueError("generator indices start at 1")
        return cls({(k,): c})

    def copy(self):
        return GrassmannPoly(dict(self.terms), self.max_generator)

    def is_zero(self):
        return not self.terms

    def coefficient(self, key):
        return self.terms.get(tuple(key), 0j)

    def __add__(self, other):
        other = _lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return GrassmannPoly(out, max(self.max_generator, other.max_generator))

    __radd__ = __add__

    def __neg__(self):
        return GrassmannPoly({k: -c for k, c in self.terms.items()}, self.max_generator)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        if isinstance(other, GrassmannPoly):
            return gp_mul(self, other)
        return GrassmannPoly({k: c * other for k, c in self.terms.items()}, self.max_generator)

    def __rmul__(self, other):
        if isinstance(other, GrassmannPoly):
            return gp_mul(other, self)
        return self * other

    def __eq__(self, other):
        if not isinstance(other, GrassmannPoly):
            other = _lift(other)
        return self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "GrassmannPoly(0)"
        parts = []
        for k in sorted(self.terms, key=lambda m: (len(m), m)):
            mono = "".join(f"γ{i}" for i in k) or "1"
            parts.append(f"({self.terms[k]:.6g}){mono}")
        return "GrassmannPoly(" + " + ".join(parts) + ")"

    def max_abs_diff(self, other):
        keys = set(self.terms) | set(other.terms)
        if not keys:
            return 0.0
        return max(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) for k in keys)

    def allclose(self, other, tol=1e-12):
        return self.max_abs_diff(_lift(other)) <= tol

    def deriv(self, k):
        return gp_left_deriv(self, k)

    def parity(self):
        return gp_parity(self)

    def exp(self):
        return gp_exp(self)


def _lift(x):
    if isinstance(x, GrassmannPoly):
        return x
    return GrassmannPoly.const(x)


def gp_mul(a: GrassmannPoly, b: GrassmannPoly) -> GrassmannPoly:
    out = {}
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            s, key = merge_sign(ka, kb)
            if s == 0:
                continue
            out[key] = out.get(key, 0) + s * ca * cb
    return GrassmannPoly(out, max(a.max_generator, b.max_generator))


def gp_left_deriv(p: GrassmannPoly, k: int) -> GrassmannPoly:
    out = {}
    for key, c in p.terms.items():
        if k not in key:
            continue
        q = key.index(k)
        out[key[:q] + key[q + 1:]] = (-1) ** q * c
    return GrassmannPoly(out, p.max_generator)


def gp_parity(p: GrassmannPoly) -> Parity:
    parities = {len(k) % 2 for k in p.terms}
    if len(parities) > 1:
        raise MixedParity("polynomial mixes even and odd monomials")
    return Parity.ODD if parities == {1} else Parity.EVEN


def gp_exp(x: GrassmannPoly) -> GrassmannPoly:
    """exp of a polynomial; the nilpotent part makes the series finite."""
    c0 = x.coefficient(())
    nil = x - c0
    total = GrassmannPoly.const(1.0)
    power = GrassmannPoly.const(1.0)
    m = 1
    while True:
        power = power * nil * (1.0 / m)
        if power.is_zero():
            break
        total = total + power
        m += 1
    return total * np.exp(c0)


def gp_uniqueness_probe(family):
    """Probe a labelled family {label: GrassmannPoly} for a nonzero member.

    Pairs each member with δψ = γ_{K+1}, K the largest generator in use, so
    no monomial of the member can be annihilated by the probe.
    Returns ("all-zero", None, gen) or ("witness", label, gen).
    """
    top = max((g.max_generator for g in family.values()), default=0)
    probe = top + 1
    delta = GrassmannPoly.gen(probe)
    for label in family:
        if not gp_mul(family[label], delta).is_zero():
            return "witness", label, probe
    return "all-zero", None, probe


def gp_linear_subst(poly, kernel, phi_vars, psi_vars):
    """Substitute φ_i = Σ_j K[i, j] ψ_j into a fermionic FunctionalPolynomial."""
    kernel = np.asarray(kernel)
    if kernel.shape != (len(phi_vars), len(psi_vars)):
        raise ValueError(f"kernel shape {kernel.shape} does not match "
                         f"{len(phi_vars)} x {len(psi_vars)} sample slots")
    mapping = {}
    for i, phi in enumerate(phi_vars):
        mapping[phi] = [(psi_vars[j], kernel[i, j]) for j in range(len(psi_vars))
                        if kernel[i, j] != 0]
    return poly.substitute(mapping)


class GeneratorAllocator:
    """Thread-safe source of fresh generator indices."""

    def __init__(self, start=1):
        self._count = itertools.count(start)
        self._lock = threading.Lock()

    def fresh(self):
        with self._lock:
            return next(self._count)

    def fresh_many(self, n):
        with self._lock:
            return [next(self._count) for _ in range(n)]
