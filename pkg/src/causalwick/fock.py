"""Brute-force operator oracle on truncated (bose) or exact (fermi) Fock spaces."""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionCap, OrderCap, TieAtEqualTime, TruncationError
from .fields import FieldOp
from .grassmann import GrassmannPoly
from .functional import FunctionalPolynomial

DEFAULT_DIM_CAP = 4096


_configured_cap = None


def set_dim_cap(cap):
    """Cap from a spec file; the KW_DIM_CAP environment variable still wins."""
    global _configured_cap
    _configured_cap = None if cap is None else int(cap)


def dim_cap():
    if "KW_DIM_CAP" in os.environ:
        return int(os.environ["KW_DIM_CAP"])
    return DEFAULT_DIM_CAP if _configured_cap is None else _configured_cap


@dataclass
class FockSpace:
    spec: object
    ladders: list          # [("b", mode_index), ("c", mode_index), ...]
    d: int                 # local dimension
    truncation: int
    fermionic: bool

    @property
    def dim(self):
        return self.d ** len(self.ladders)

    def ladder_index(self, which, k):
        return self.ladders.index((which, k))

    def local_annihilator(self):
        return np.diag(np.sqrt(np.arange(1, self.d)), 1).astype(complex)

    def vacuum(self):
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v


def build_space(spec, truncation=None, cap=None):
    cap = dim_cap() if cap is None else cap
    n = spec.truncation if truncation is None else truncation
    ladders = []
    for k in range(len(spec.modes)):
        ladders.append(("b", k))
        if not spec.nonrel:
            ladders.append(("c", k))
    fermionic = spec.statistics == "fermi"
    d = 2 if fermionic else n + 1
    dim = d ** len(ladders)
    if dim > cap:
        raise DimensionCap(f"space dimension {dim} exceeds cap {cap}")
    return FockSpace(spec, ladders, d, n, fermionic)


def apply_ladder(space, idx, dagger, state):
    """Apply one ladder operator (with its parity string) to a state vector."""
    a = space.local_annihilator()
    local = a.T if dagger else a
    L = len(space.ladders)
    d = space.d
    psi = state.reshape(d ** idx, d, d ** (L - idx - 1))
    out = np.einsum("ij,ajb->aib", local, psi)
    if space.fermionic and idx > 0:
        occ = np.arange(d ** idx)
        parity = np.zeros(d ** idx, dtype=int)
        for _ in range(idx):
            parity += occ % 2
            occ //= 2
        out = out * ((-1.0) ** parity)[:, None, None]
    return out.reshape(-1)


def mode_operator(space, which, k):
    """Dense matrix of b, bdag, c or cdag for mode index (or label) k."""
    if isinstance(k, str):
        k = space.spec.mode_index(k)
    dagger = which.endswith("dag")
    idx = space.ladder_index(which[0], k)
    a = space.local_annihilator()
    z = np.diag((-1.0) ** np.arange(space.d))
    eye = np.eye(space.d)
    mat = np.ones((1, 1), dtype=complex)
    for i in range(len(space.ladders)):
        if i < idx:
            f = z if space.fermionic else eye
        elif i == idx:
            f = a.T if dagger else a
        else:
            f = eye
        mat = np.kron(mat, f)
    return mat


def field_terms(space, op):
    """Expansion of a field operator into [(ladder index, dagger, coefficient)]."""
    spec = space.spec
    spec.check_op(op)
    hb = spec.hbar
    terms = []
    if op.kind in ("b", "bdag", "c", "cdag"):
        k = spec.mode_index(op.x)
        w = spec.modes[k].omega
        dagger = op.kind.endswith("dag")
        phase = np.exp(1j * w * op.t) if dagger else np.exp(-1j * w * op.t)
        return [(space.ladder_index(op.kind[0], k), dagger, phase)]
    xi = spec.xi(op.x)
    for k, m in enumerate(spec.modes):
        amp = math.sqrt(hb / (2 * m.omega))
        em = np.exp(-1j * m.omega * op.t)
        ep = np.exp(1j * m.omega * op.t)
        bi = space.ladder_index("b", k)
        if op.kind == "Q":
            terms.append((bi, False, amp * m.u[xi] * em))
            terms.append((bi, True, amp * np.conj(m.u[xi]) * ep))
        elif op.kind == "psi":
            terms.append((bi, False, amp * m.u[xi] * em))
            if not spec.nonrel:
                terms.append((space.ladder_index("c", k), True, amp * m.tv[xi] * ep))
        elif op.kind == "tpsi":
            if not spec.nonrel:
                terms.append((space.ladder_index("c", k), False, amp * m.v[xi] * em))
            terms.append((bi, True, amp * m.tu[xi] * ep))
    return [t for t in terms if t[2] != 0]


def apply_field(space, op, state):
    out = np.zeros_like(state)
    for idx, dagger, c in field_terms(space, op):
        out += c * apply_ladder(space, idx, dagger, state)
    return out


def field_operator(space, spec, kind, x, t):
    """Dense matrix of a field operator at (x, t)."""
    op = FieldOp(kind, x, t)
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for idx, dagger, c in field_terms(space, op):
        which = space.ladders[idx][0] + ("dag" if dagger else "")
        mat += c * mode_operator(space, which, space.ladders[idx][1])
    return mat


def creation_count(spec, op):
    if op.kind in ("Q", "tpsi", "bdag", "cdag"):
        return 1
    if op.kind == "psi":
        return 0 if spec.nonrel else 1
    return 0


def tc_sort(ops, spec):
    """Contour ordering: returns (permutation, sign), contour-later leftmost."""
    keys = [op.contour_time.key() for op in ops]
    ferm = [spec.is_fermionic(op) for op in ops]
    for i, j in itertools.combinations(range(len(ops)), 2):
        if ferm[i] and ferm[j] and keys[i] == keys[j] and ops[i] != ops[j]:
            raise TieAtEqualTime(f"fermionic {ops[i]} and {ops[j]} share a contour time")
    perm = sorted(range(len(ops)), key=lambda i: keys[i], reverse=True)
    inv = 0
    for a in range(len(perm)):
        if not ferm[perm[a]]:
            continue
        for b in range(a + 1, len(perm)):
            if ferm[perm[b]] and perm[a] > perm[b]:
                inv += 1
    return perm, spec.eps ** inv


def tc_vev(spec, ops, space=None):
    """⟨0|T_C ops|0⟩ by direct matrix arithmetic."""
    for op in ops:
        spec.check_op(op)
    if space is None:
        space = build_space(spec)
    if not space.fermionic:
        need = sum(creation_count(spec, op) for op in ops)
        if need > space.truncation:
            raise TruncationError(f"{need} creation-type insertions need truncation >= {need}")
    if not ops:
        return 1.0 + 0j
    perm, sign = tc_sort(ops, spec)
    state = space.vacuum()
    for i in reversed(perm):
        state = apply_field(space, ops[i], state)
    return complex(sign * state[0])


# ---------------------------------------------------------------- sources

SOURCE_KINDS = ("eta+", "eta-", "teta+", "teta-")


@dataclass(frozen=True)
class SourcePoint:
    """A point source; ``kind`` names which source density carries it."""
    kind: str
    x: str
    t: float

    def operator(self, spec):
        branch = self.kind[-1]
        if spec.field == "real":
            if self.kind.startswith("t"):
                raise ValueError("real fields have untilded sources only")
            return FieldOp("Q", self.x, self.t, branch)
        # η̃ couples to ψ, η couples to ψ̃
        return FieldOp("psi" if self.kind.startswith("t") else "tpsi", self.x, self.t, branch)

    def phase(self):
        return 1j if self.kind.endswith("+") else -1j

    def grassmann_sign(self):
        """-1 for the ψ̃η coupling (source written to the right)."""
        return 1 if self.kind.startswith("t") else -1


def moment_vev(spec, points, alpha, order_cap=4, space=None):
    """Taylor coefficient of the vacuum generating functional at multi-index alpha.

    Bose: complex coefficient of Π s_j^{α_j}.  Fermi: the GrassmannPoly term
    for the subset {j : α_j = 1}, generator j+1 attached to point j.
    """
    alpha = list(alpha)
    if sum(alpha) > order_cap:
        raise OrderCap(f"total order {sum(alpha)} exceeds {order_cap}")
    ops = []
    coeff = 1.0 + 0j
    for p, a in zip(points, alpha):
        op = p.operator(spec)
        ops.extend([op] * a)
        coeff *= p.phase() ** a / math.factorial(a)
    if spec.statistics == "bose":
        return coeff * tc_vev(spec, ops, space)
    if any(a > 1 for a in alpha):
        return GrassmannPoly()
    chosen = [j for j, a in enumerate(alpha) if a]
    m = len(chosen)
    for j in chosen:
        coeff *= points[j].grassmann_sign()
    coeff *= (-1) ** (m * (m - 1) // 2)
    val = coeff * tc_vev(spec, ops, space)
    return GrassmannPoly({tuple(j + 1 for j in chosen): val})


def phi_vac_oracle(spec, points, order_cap=4):
    """All moments up to order_cap assembled into a polynomial.

    Bose: FunctionalPolynomial in point indices.  Fermi: GrassmannPoly.
    """
    space = build_space(spec)
    n = len(points)
    if spec.statistics == "fermi":
        total = GrassmannPoly.const(1.0)
        for r in range(1, min(n, order_cap) + 1):
            for sub in itertools.combinations(range(n), r):
                alpha = [1 if j in sub else 0 for j in range(n)]
                total = total + moment_vev(spec, points, alpha, order_cap, space)
        return total
    terms = {}
    for alpha in _multi_indices(n, order_cap):
        c = moment_vev(spec, points, alpha, order_cap, space)
        if c != 0:
            mono = tuple(j for j, a in enumerate(alpha) for _ in range(a))
            terms[mono] = c
    return FunctionalPolynomial(terms)


def _multi_indices(n, order):
    for total in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(n), total):
            alpha = [0] * n
            for j in combo:
                alpha[j] += 1
            yield alpha
