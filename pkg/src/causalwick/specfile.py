"""Channel spec files.

A small INI-like format::

    [channel]
    field = real            # real | channel
    statistics = bose       # bose | fermi
    nonrel = true
    hbar = 1.0
    truncation = 8

    [xlabels]
    x1

    [modes]
    # label omega, then per x label: u.re u.im v.re v.im tu.re tu.im tv.re tv.im
    k1 1.0 1 0 0 0 1 0 0 0

    [grid]
    n = 1024
    dt = auto

    [verify]
    tol_exact = 1e-12

Real-field mode rows may list only u (two numbers per x label).  ``#`` starts
a comment.  Unknown sections and keys are rejected with the offending line.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InputError, InvariantViolation, SpecSyntaxError
from .fields import ChannelSpec, Mode
from .spectral import default_grid

CHANNEL_KEYS = {"field": str, "statistics": str, "nonrel": "bool", "hbar": float,
                "truncation": int}
GRID_KEYS = {"t0": "auto_float", "dt": "auto_float", "n": int, "epsilon": "auto_float",
             "damping": str}
VERIFY_KEYS = {"tol_exact": float, "tol_kernel": float, "tol_projector": float,
               "tol_oracle_bose": float, "tol_oracle_fermi": float, "seed": int,
               "samples": int, "dim_cap": int, "degree_cap": int, "order_cap": int}

DEFAULT_VERIFY = {"tol_exact": 1e-12, "tol_kernel": 1e-9, "tol_projector": 1e-6,
                  "tol_oracle_bose": 1e-9, "tol_oracle_fermi": 1e-12, "seed": 0,
                  "samples": 20, "dim_cap": 4096, "degree_cap": 4, "order_cap": 4}


@dataclass
class ParsedSpec:
    spec: ChannelSpec
    grid_options: dict = field(default_factory=dict)
    verify: dict = field(default_factory=lambda: dict(DEFAULT_VERIFY))
    text_hash: str = ""

    def grid(self):
        """Grid from the [grid] section; unset entries use the default grid."""
        o = self.grid_options
        g = default_grid(self.spec.omegas, n=o.get("n", 1024), damping=o.get("damping", "auto"),
                         t0=o.get("t0"), dt=o.get("dt"))
        if o.get("epsilon") is not None:
            g = replace(g, eps=o["epsilon"])
        return g


def spec_hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _convert(kind, value, lineno, key):
    try:
        if kind == "bool":
            low = value.lower()
            if low not in ("true", "false"):
                raise ValueError
            return low == "true"
        if kind == "auto_float":
            return None if value == "auto" else float(value)
        return kind(value)
    except ValueError:
        raise SpecSyntaxError(f"bad value {value!r} for {key}", lineno) from None


def parse_spec(text) -> ParsedSpec:
    sections = {"channel": {}, "xlabels": [], "modes": [], "grid": {}, "verify": {}}
    tables = {"channel": CHANNEL_KEYS, "grid": GRID_KEYS, "verify": VERIFY_KEYS}
    seen = set()
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise SpecSyntaxError(f"malformed section header {line!r}", lineno)
            current = line[1:-1].strip()
            if current not in sections:
                raise SpecSyntaxError(f"unknown section [{current}]", lineno)
            if current in seen:
                raise SpecSyntaxError(f"duplicate section [{current}]", lineno)
            seen.add(current)
            continue
        if current is None:
            raise SpecSyntaxError("content before the first section", lineno)
        if current == "xlabels":
            sections["xlabels"].extend((tok, lineno) for tok in line.split())
        elif current == "modes":
            sections["modes"].append((line.split(), lineno))
        else:
            if "=" not in line:
                raise SpecSyntaxError(f"expected key = value in [{current}]", lineno)
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in tables[current]:
                raise SpecSyntaxError(f"unknown key {key!r} in [{current}]", lineno)
            if key in sections[current]:
                raise SpecSyntaxError(f"duplicate key {key!r}", lineno)
            sections[current][key] = _convert(tables[current][key], value, lineno, key)

    ch = sections["channel"]
    labels = [tok for tok, _ in sections["xlabels"]]
    if not labels:
        raise SpecSyntaxError("no x labels given")
    if not sections["modes"]:
        raise SpecSyntaxError("no modes given")
    real = ch.get("field", "channel") == "real"
    nx = len(labels)
    modes = []
    for toks, lineno in sections["modes"]:
        modes.append(_parse_mode(toks, nx, real, lineno))
    try:
        spec = ChannelSpec(modes, labels, statistics=ch.get("statistics", "bose"),
                           nonrel=ch.get("nonrel", False), hbar=ch.get("hbar", 1.0),
                           field=ch.get("field", "channel"), truncation=ch.get("truncation", 6))
    except InvariantViolation:
        raise
    except InputError as e:
        raise InvariantViolation(str(e)) from None
    verify = dict(DEFAULT_VERIFY)
    verify.update(sections["verify"])
    return ParsedSpec(spec, sections["grid"], verify, spec_hash(text))


def _parse_mode(toks, nx, real, lineno):
    if len(toks) < 2:
        raise SpecSyntaxError("mode row needs a label and a frequency", lineno)
    label = toks[0]
    try:
        nums = [float(t) for t in toks[1:]]
    except ValueError:
        raise SpecSyntaxError(f"non-numeric entry in mode row {label!r}", lineno) from None
    omega, rest = nums[0], nums[1:]
    if real and len(rest) == 2 * nx:
        u = np.array(rest[0::2]) + 1j * np.array(rest[1::2])
        z = np.zeros(nx, dtype=complex)
        return Mode(label, omega, u, z, np.conj(u), z)
    if len(rest) != 8 * nx:
        raise SpecSyntaxError(f"mode {label!r}: expected {8 * nx} numbers after omega, "
                              f"got {len(rest)}", lineno)
    arr = np.array(rest).reshape(nx, 4, 2)
    c = arr[..., 0] + 1j * arr[..., 1]
    if not omega > 0:
        raise InvariantViolation(f"line {lineno}: mode {label}: omega must be positive")
    return Mode(label, omega, c[:, 0], c[:, 1], c[:, 2], c[:, 3])


def load_spec(path) -> ParsedSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def bundled_spec_path(name):
    from importlib.resources import files
    return str(files("causalwick") / "specs" / f"{name}.kw")
