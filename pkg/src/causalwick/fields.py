"""Mode tables and field-operator occurrences."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvariantViolation, SpecMismatch, UnknownLabel

OPERATOR_KINDS = ("Q", "psi", "tpsi", "b", "bdag", "c", "cdag")
# variables that only live inside polynomials (causal fields)
CAUSAL_KINDS = ("qe", "zeta", "psie", "tpsie", "tzeta")

_KIND_RANK = {"tpsi": 0, "tpsie": 0, "tzeta": 1, "Q": 2, "qe": 2, "psi": 2, "psie": 2,
              "zeta": 3, "b": 4, "bdag": 4, "c": 5, "cdag": 5}
_BRANCH_RANK = {"+": 0, "-": 1, None: 2}


@dataclass(frozen=True)
class ContourTime:
    t: float
    branch: str

    def key(self):
        """Larger key = later on the contour."""
        return (0, self.t) if self.branch == "+" else (1, -self.t)


@dataclass(frozen=True)
class FieldOp:
    """One field occurrence: kind, spatial (or mode) label, time, branch.

    ``branch`` is "+" or "-" for contour operators and None for single
    (branch-identified) fields.
    """
    kind: str
    x: str
    t: float
    branch: Optional[str] = None

    @property
    def contour_time(self):
        return ContourTime(self.t, self.branch)

    def sort_key(self):
        return (_KIND_RANK.get(self.kind, 9), self.kind, self.x, self.t,
                _BRANCH_RANK[self.branch])

    def with_branch(self, branch):
        return FieldOp(self.kind, self.x, self.t, branch)

    def with_kind(self, kind, branch=None):
        return FieldOp(kind, self.x, self.t, branch)

    def __str__(self):
        return f"{self.kind}{self.branch or ''}({self.x},{self.t!r})"


@dataclass
class Mode:
    label: str
    omega: float
    u: np.ndarray
    v: np.ndarray
    tu: np.ndarray
    tv: np.ndarray


@dataclass
class ChannelSpec:
    """Free-field mode table.

    ``field`` is "real" for a hermitian field Q (bosonic, no antiparticle
    ladders, Q built from u and u*) or "channel" for a tilde-conjugate pair.
    """
    modes: list
    x_labels: list
    statistics: str = "bose"
    nonrel: bool = False
    hbar: float = 1.0
    field: str = "channel"
    theta0: float = 0.5
    truncation: int = 6

    def __post_init__(self):
        if self.statistics not in ("bose", "fermi"):
            raise InvariantViolation(f"unknown statistics {self.statistics!r}")
        if self.field not in ("real", "channel"):
            raise InvariantViolation(f"unknown field type {self.field!r}")
        if self.field == "real":
            if self.statistics != "bose":
                raise InvariantViolation("a real field is bosonic")
            self.nonrel = True
        if self.hbar <= 0:
            raise InvariantViolation("hbar must be positive")
        nx = len(self.x_labels)
        if len(set(self.x_labels)) != nx:
            raise InvariantViolation("duplicate x label")
        seen = set()
        for m in self.modes:
            if m.label in seen:
                raise InvariantViolation(f"duplicate mode label {m.label!r}")
            seen.add(m.label)
            if not m.omega > 0:
                raise InvariantViolation(f"mode {m.label}: omega must be positive")
            for name in ("u", "v", "tu", "tv"):
                arr = np.asarray(getattr(m, name), dtype=complex)
                if arr.shape != (nx,):
                    raise InvariantViolation(f"mode {m.label}: {name} must cover every x label")
                setattr(m, name, arr)
            if self.field == "real":
                m.tu = np.conj(m.u)
            if self.nonrel and (np.any(m.v != 0) or np.any(m.tv != 0)):
                raise InvariantViolation(f"mode {m.label}: nonrel requires v = tv = 0")

    @property
    def eps(self):
        return 1 if self.statistics == "bose" else -1

    def xi(self, x):
        try:
            return self.x_labels.index(x)
        except ValueError:
            raise UnknownLabel(f"unknown x label {x!r}") from None

    def mode_index(self, label):
        for i, m in enumerate(self.modes):
            if m.label == label:
                return i
        raise UnknownLabel(f"unknown mode label {label!r}")

    @property
    def omegas(self):
        return np.array([m.omega for m in self.modes])

    def is_fermionic(self, op):
        return self.statistics == "fermi" and op.kind not in ("Q", "qe", "zeta")

    def check_op(self, op):
        if op.kind == "Q" and self.field != "real":
            raise SpecMismatch("Q operators need a real-field spec")
        if op.kind in ("psi", "tpsi") and self.field != "channel":
            raise SpecMismatch("psi/tpsi operators need a channel spec")
        if op.kind in ("Q", "psi", "tpsi"):
            self.xi(op.x)
        elif op.kind in ("b", "bdag", "c", "cdag"):
            self.mode_index(op.x)
            if op.kind in ("c", "cdag") and self.nonrel:
                raise SpecMismatch("no antiparticle ladders in a nonrel spec")
        else:
            raise SpecMismatch(f"unknown operator kind {op.kind!r}")


def oscillator_spec(omega=1.0, hbar=1.0, truncation=8):
    one = np.ones(1, dtype=complex)
    zero = np.zeros(1, dtype=complex)
    return ChannelSpec([Mode("k1", omega, one, zero, one, zero)], ["x1"],
                       statistics="bose", hbar=hbar, field="real", truncation=truncation)


def random_channel_spec(rng, n_modes=2, x_labels=("x1", "x2"), statistics="bose",
                        nonrel=False, omegas=None, truncation=6, hbar=1.0):
    """Channel with random complex mode functions; handy for property tests."""
    nx = len(x_labels)
    if omegas is None:
        omegas = [1.0 + 0.5 * k for k in range(n_modes)]
    modes = []
    for k in range(n_modes):
        def rnd():
            return rng.normal(size=nx) + 1j * rng.normal(size=nx)
        u, tu = rnd(), rnd()
        v, tv = (np.zeros(nx), np.zeros(nx)) if nonrel else (rnd(), rnd())
        modes.append(Mode(f"k{k + 1}", float(omegas[k]), u, v, tu, tv))
    return ChannelSpec(modes, list(x_labels), statistics=statistics, nonrel=nonrel,
                       truncation=truncation, hbar=hbar)


def random_real_spec(rng, n_modes=2, x_labels=("x1", "x2"), omegas=None, truncation=6):
    nx = len(x_labels)
    if omegas is None:
        omegas = [1.0 + 0.5 * k for k in range(n_modes)]
    modes = []
    for k in range(n_modes):
        u = rng.normal(size=nx) + 1j * rng.normal(size=nx)
        z = np.zeros(nx)
        modes.append(Mode(f"k{k + 1}", float(omegas[k]), u, z, np.conj(u), z))
    return ChannelSpec(modes, list(x_labels), field="real", truncation=truncation)
