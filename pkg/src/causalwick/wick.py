"""Wick expansion on the closed-time contour.

Contraction patterns are enumerated directly (one term per partial matching);
the literal derivative form of the reordering exponent is kept alongside as an
independent check.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OverlappingPairs, SpecMismatch
from .functional import FunctionalPolynomial, exp_derivative_form
from .kernels import kernel_eval


@dataclass
class WickTerm:
    coeff: complex
    contractions: tuple          # ((i, j, value), ...)
    residual: tuple              # FieldOps in canonical order
    residual_indices: tuple

    @property
    def pairs(self):
        return frozenset((i, j) for i, j, _ in self.contractions)


@dataclass
class WickExpansion:
    product: tuple
    terms: list
    flags: list = field(default_factory=list)


def contraction_value(a, b, spec):
    """⟨0|T_C a b|0⟩ with a written before b."""
    hb = spec.hbar
    if a.kind == "Q" and b.kind == "Q":
        if spec.field != "real":
            raise SpecMismatch("Q needs a real-field spec")
        tau = a.t - b.t
        if a.branch == "+" and b.branch == "+":
            return -1j * hb * kernel_eval("GF", spec, a.x, b.x, tau)
        if a.branch == "-" and b.branch == "-":
            return 1j * hb * np.conj(kernel_eval("GF", spec, a.x, b.x, tau))
        if a.branch == "-":
            return -1j * hb * kernel_eval("G+", spec, a.x, b.x, tau)
        return -1j * hb * kernel_eval("G+", spec, b.x, a.x, -tau)
    kinds = {a.kind, b.kind}
    if not kinds <= {"psi", "tpsi"}:
        raise SpecMismatch(f"no contraction rule for {a.kind}, {b.kind}")
    if spec.field != "channel":
        raise SpecMismatch("psi/tpsi need a channel spec")
    if a.kind == b.kind:
        return 0j
    if a.kind == "tpsi":
        return spec.eps * contraction_value(b, a, spec)
    tau = a.t - b.t
    if a.branch == "+" and b.branch == "+":
        return -1j * hb * kernel_eval("DF", spec, a.x, b.x, tau)
    if a.branch == "-" and b.branch == "-":
        return 1j * hb * kernel_eval("tDF", spec, a.x, b.x, tau)
    if a.branch == "-":
        return -1j * hb * kernel_eval("D+", spec, a.x, b.x, tau)
    return 1j * hb * kernel_eval("D-", spec, a.x, b.x, tau)


def matching_sign(fermionic, matching, eps=-1):
    """Sign of bringing contracted partners together; ``fermionic`` flags each op."""
    used = set()
    for i, j in matching:
        if i >= j or i in used or j in used:
            raise OverlappingPairs(f"bad pair ({i}, {j})")
        used.update((i, j))
    if eps == 1:
        return 1
    alive = [True] * len(fermionic)
    partner = {}
    for i, j in matching:
        partner[i] = j
        partner[j] = i
    sign = 1
    for i in range(len(fermionic)):
        if not alive[i] or i not in partner:
            continue
        j = partner[i]
        between = sum(1 for k in range(i + 1, j) if alive[k] and fermionic[k])
        sign *= eps ** between
        alive[i] = alive[j] = False
    return sign


def _allowed(a, b):
    if a.kind == "Q":
        return b.kind == "Q"
    return {a.kind, b.kind} == {"psi", "tpsi"}


def partial_matchings(ops):
    """All partial matchings of allowed pairs, leftmost-operator recursion."""
    n = len(ops)

    def rec(i, free):
        while i < n and i not in free:
            i += 1
        if i >= n:
            yield []
            return
        rest = free - {i}
        yield from rec(i + 1, rest)
        for j in sorted(rest):
            if _allowed(ops[i], ops[j]):
                for m in rec(i + 1, rest - {j}):
                    yield [(i, j)] + m

    yield from rec(0, frozenset(range(n)))


def canonical_residual(ops, indices, spec):
    """Sort residual ops into the normal-symbol order; returns (sign, ops, indices)."""
    order = sorted(range(len(indices)), key=lambda k: ops[indices[k]].sort_key())
    sign = 1
    if spec.eps == -1:
        ferm = [spec.is_fermionic(ops[indices[k]]) for k in range(len(indices))]
        for a in range(len(order)):
            for b in range(a + 1, len(order)):
                if order[a] > order[b] and ferm[order[a]] and ferm[order[b]]:
                    sign = -sign
    idx = tuple(indices[k] for k in order)
    return sign, tuple(ops[k] for k in idx), idx


def wick_expand(product, spec):
    ops = tuple(product)
    for op in ops:
        spec.check_op(op)
    ferm = [spec.is_fermionic(op) for op in ops]
    values = {}
    terms = []
    flags = []
    for m in partial_matchings(ops):
        coeff = complex(matching_sign(ferm, m, spec.eps))
        contr = []
        for i, j in m:
            if (i, j) not in values:
                values[i, j] = contraction_value(ops[i], ops[j], spec)
                if ops[i].branch == ops[j].branch and ops[i].t == ops[j].t:
                    flags.append(f"pair ({i},{j}) at equal time on branch {ops[i].branch}: "
                                 f"theta(0) = {spec.theta0}")
            coeff *= values[i, j]
            contr.append((i, j, values[i, j]))
        used = {k for p in m for k in p}
        rest = [k for k in range(len(ops)) if k not in used]
        s, res, idx = canonical_residual(ops, rest, spec)
        terms.append(WickTerm(coeff * s, tuple(contr), res, idx))
    return WickExpansion(ops, terms, sorted(set(flags)))


def vacuum_value(e: WickExpansion) -> complex:
    return complex(sum(t.coeff for t in e.terms if not t.residual))


def normal_form_polynomial(F, spec, degree_cap=6):
    """Hori form: apply the reordering exponent and identify branches."""
    F.check_degree(degree_cap)
    out = {}
    for mono, c in F.terms.items():
        for term in wick_expand(mono, spec).terms:
            key = tuple(op.with_branch(None) for op in term.residual)
            out[key] = out.get(key, 0) + c * term.coeff
    return FunctionalPolynomial(out, F.fermionic).canonical()


def reordering_form(spec, variables):
    """Literal reordering exponent as [(coeff, A, B)] meaning coeff ∂_A ∂_B."""
    hb = spec.hbar
    form = []
    if spec.field == "real":
        pts = sorted({(v.x, v.t) for v in variables})
        for xa, ta in pts:
            for xb, tb in pts:
                tau = ta - tb
                a = lambda br: _op("Q", xa, ta, br)   # noqa: E731
                b = lambda br: _op("Q", xb, tb, br)   # noqa: E731
                form.append((-0.5j * hb * kernel_eval("GF", spec, xa, xb, tau), a("+"), b("+")))
                form.append((0.5j * hb * np.conj(kernel_eval("GF", spec, xa, xb, tau)),
                             a("-"), b("-")))
                form.append((-1j * hb * kernel_eval("G+", spec, xa, xb, tau), a("-"), b("+")))
        return form
    pre = -1j * spec.eps * hb
    ps = sorted({(v.x, v.t) for v in variables if v.kind == "psi"})
    tps = sorted({(v.x, v.t) for v in variables if v.kind == "tpsi"})
    for xa, ta in ps:
        for xb, tb in tps:
            tau = ta - tb
            k = {kind: kernel_eval(kind, spec, xa, xb, tau) for kind in ("DF", "tDF", "D+", "D-")}
            form.append((pre * k["DF"], _op("psi", xa, ta, "+"), _op("tpsi", xb, tb, "+")))
            form.append((-pre * k["tDF"], _op("psi", xa, ta, "-"), _op("tpsi", xb, tb, "-")))
            form.append((pre * k["D+"], _op("psi", xa, ta, "-"), _op("tpsi", xb, tb, "+")))
            form.append((-pre * k["D-"], _op("psi", xa, ta, "+"), _op("tpsi", xb, tb, "-")))
    return form


def _op(kind, x, t, branch):
    from .fields import FieldOp
    return FieldOp(kind, x, t, branch)


def normal_form_literal(F, spec):
    """Hori form through literal repeated differentiation (test oracle)."""
    form = reordering_form(spec, F.variables())
    res = exp_derivative_form(F, form)
    return res.rename(lambda v: v.with_branch(None)).canonical()
