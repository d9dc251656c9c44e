"""Formal polynomials in field samples.

Variables are hashable objects (usually FieldOp instances).  Bosonic
polynomials keep monomials sorted; fermionic ones keep the written order and
are only brought to canonical order, with signs, by ``canonical``.
"""
from __future__ import annotations

from .errors import DegreeCap


def var_key(v):
    return v.sort_key() if hasattr(v, "sort_key") else v


def _sorted_with_sign(mono, fermionic):
    keys = [var_key(v) for v in mono]
    order = sorted(range(len(mono)), key=lambda i: keys[i])
    out = tuple(mono[i] for i in order)
    if not fermionic:
        return 1, out
    if len(set(out)) != len(out):
        return 0, out
    inv = 0
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b]:
                inv += 1
    return (-1) ** inv, out


class FunctionalPolynomial:
    __slots__ = ("terms", "fermionic")

    def __init__(self, terms=None, fermionic=False):
        self.fermionic = bool(fermionic)
        out = {}
        for mono, c in (terms or {}).items():
            mono = tuple(mono)
            if not self.fermionic:
                _, mono = _sorted_with_sign(mono, False)
            elif len(set(mono)) != len(mono):
                continue        # a repeated Grassmann variable squares to zero
            out[mono] = out.get(mono, 0) + complex(c)
        self.terms = {k: c for k, c in out.items() if c != 0}

    @classmethod
    def const(cls, c, fermionic=False):
        return cls({(): c}, fermionic)

    @classmethod
    def var(cls, v, fermionic=False, c=1.0):
        return cls({(v,): c}, fermionic)

    @classmethod
    def monomial(cls, vars_, c=1.0, fermionic=False):
        return cls({tuple(vars_): c}, fermionic)

    def _like(self, terms):
        return FunctionalPolynomial(terms, self.fermionic)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        if isinstance(other, FunctionalPolynomial):
            out = {}
            for ka, ca in self.terms.items():
                for kb, cb in other.terms.items():
                    key = ka + kb
                    out[key] = out.get(key, 0) + ca * cb
            return self._like(out)
        return self._like({k: c * other for k, c in self.terms.items()})

    def __rmul__(self, other):
        return self * other

    def _lift(self, x):
        if isinstance(x, FunctionalPolynomial):
            return x
        return FunctionalPolynomial.const(x, self.fermionic)

    def __repr__(self):
        return f"FunctionalPolynomial({self.terms!r}, fermionic={self.fermionic})"

    def degree(self):
        return max((len(k) for k in self.terms), default=0)

    def variables(self):
        seen = {}
        for k in self.terms:
            for v in k:
                seen[v] = None
        return list(seen)

    def canonical(self):
        """Same polynomial with every monomial in canonical variable order."""
        out = {}
        for mono, c in self.terms.items():
            s, key = _sorted_with_sign(mono, self.fermionic)
            if s == 0:
                continue
            out[key] = out.get(key, 0) + s * c
        res = FunctionalPolynomial.__new__(FunctionalPolynomial)
        res.fermionic = self.fermionic
        res.terms = {k: c for k, c in out.items() if c != 0}
        return res

    def max_abs_diff(self, other):
        a = self.canonical().terms
        b = other.canonical().terms
        keys = set(a) | set(b)
        return max((abs(a.get(k, 0) - b.get(k, 0)) for k in keys), default=0.0)

    def rename(self, fn):
        out = {}
        for k, c in self.terms.items():
            key = tuple(fn(v) for v in k)
            if not self.fermionic:
                key = tuple(sorted(key, key=var_key))
            out[key] = out.get(key, 0) + c
        return self._like(out)

    def left_deriv(self, v):
        """Left derivative with respect to variable v."""
        out = {}
        for mono, c in self.terms.items():
            if self.fermionic:
                if v not in mono:
                    continue
                q = mono.index(v)
                key = mono[:q] + mono[q + 1:]
                out[key] = out.get(key, 0) + (-1) ** q * c
            else:
                n = mono.count(v)
                if n == 0:
                    continue
                q = mono.index(v)
                key = mono[:q] + mono[q + 1:]
                out[key] = out.get(key, 0) + n * c
        return self._like(out)

    def substitute(self, mapping):
        """Replace each mapped variable by a linear combination [(var, coeff), ...]."""
        result = self._like({})
        for mono, c in self.terms.items():
            acc = self._like({(): c})
            for v in mono:
                if v in mapping:
                    factor = self._like({(w,): k for w, k in mapping[v]})
                else:
                    factor = self._like({(v,): 1.0})
                acc = acc * factor
            result = result + acc
        return result

    def drop_containing(self, predicate):
        return self._like({k: c for k, c in self.terms.items()
                           if not any(predicate(v) for v in k)})

    def check_degree(self, cap):
        if self.degree() > cap:
            raise DegreeCap(f"degree {self.degree()} exceeds cap {cap}")


def apply_derivative_form(poly, form):
    """Apply Σ c ∂_A ∂_B to poly; ``form`` is a list of (c, A, B)."""
    out = poly._like({})
    for c, a, b in form:
        d = poly.left_deriv(b)
        if not d.terms:
            continue
        d = d.left_deriv(a)
        if d.terms:
            out = out + d * c
    return out


def exp_derivative_form(poly, form):
    """exp(Σ c ∂_A ∂_B) applied literally through repeated differentiation."""
    total = poly
    power = poly
    m = 1
    while True:
        power = apply_derivative_form(power, form) * (1.0 / m)
        if not power.terms:
            break
        total = total + power
        m += 1
    return total
