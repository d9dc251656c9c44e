import cmath
import math

import numpy as np
import pytest

from causalwick.errors import DimensionCap, TieAtEqualTime, TruncationError
from causalwick.fields import ChannelSpec, FieldOp, Mode, oscillator_spec, random_channel_spec
from causalwick.fock import (SourcePoint, build_space, field_operator, mode_operator, moment_vev,
                             tc_sort, tc_vev)
from causalwick.grassmann import GrassmannPoly


def one_mode(statistics="bose", nonrel=True, truncation=3, n=1):
    one, zero = np.ones(1), np.zeros(1)
    modes = [Mode(f"k{i}", 1.0 + i, one, zero if nonrel else one, one, zero if nonrel else one)
             for i in range(n)]
    return ChannelSpec(modes, ["x1"], statistics=statistics, nonrel=nonrel, truncation=truncation)


def test_space_dimensions():
    assert build_space(one_mode(truncation=3)).dim == 4
    assert build_space(one_mode("fermi", nonrel=False)).dim == 4
    with pytest.raises(DimensionCap):
        build_space(one_mode("fermi", n=10, nonrel=False))


def test_dim_cap_env_override(monkeypatch):
    monkeypatch.setenv("KW_DIM_CAP", "8")
    with pytest.raises(DimensionCap):
        build_space(one_mode("fermi", n=2, nonrel=False))


def test_ladder_matrices():
    space = build_space(one_mode(truncation=4))
    b, bd = mode_operator(space, "b", 0), mode_operator(space, "bdag", 0)
    vac = space.vacuum()
    assert vac @ b @ bd @ vac == pytest.approx(1.0)
    comm = b @ bd - bd @ b
    assert np.allclose(np.diag(comm)[:4], 1.0)
    fspace = build_space(one_mode("fermi", nonrel=False))
    f = mode_operator(fspace, "b", 0)
    assert np.allclose(f @ f, 0)
    c = mode_operator(fspace, "c", 0)
    assert np.allclose(f @ c + c @ f, 0)


def test_oscillator_field_matrix():
    spec = oscillator_spec(truncation=4)
    space = build_space(spec)
    Q = field_operator(space, spec, "Q", "x1", 0.0)
    a = mode_operator(space, "b", 0)
    assert np.allclose(Q, (a + a.T) / math.sqrt(2))
    vac = space.vacuum()
    assert vac @ Q @ Q @ vac == pytest.approx(0.5)


def test_fermionic_field_squares_to_zero():
    spec = one_mode("fermi")
    space = build_space(spec)
    psi = field_operator(space, spec, "psi", "x1", 0.3)
    assert np.allclose(psi @ psi, 0)


def test_contour_sort():
    spec = oscillator_spec()
    perm, sign = tc_sort([FieldOp("Q", "x1", 1.0, "+"), FieldOp("Q", "x1", 3.0, "+")], spec)
    assert perm == [1, 0] and sign == 1
    for t, t2 in [(1.0, 2.0), (2.0, 1.0)]:
        perm, sign = tc_sort([FieldOp("Q", "x1", t, "-"), FieldOp("Q", "x1", t2, "+")], spec)
        assert perm == [0, 1] and sign == 1
    fspec = random_channel_spec(np.random.default_rng(0), statistics="fermi")
    perm, sign = tc_sort([FieldOp("tpsi", "x1", 1.0, "+"), FieldOp("psi", "x1", 2.0, "+")], fspec)
    assert perm == [1, 0] and sign == -1
    with pytest.raises(TieAtEqualTime):
        tc_sort([FieldOp("tpsi", "x1", 1.0, "+"), FieldOp("psi", "x1", 1.0, "+")], fspec)


def test_oscillator_pair_value():
    spec = oscillator_spec()
    for t, t2 in [(2.0, 1.0), (0.3, 1.7)]:
        val = tc_vev(spec, [FieldOp("Q", "x1", t, "-"), FieldOp("Q", "x1", t2, "+")])
        assert val == pytest.approx(0.5 * cmath.exp(-1j * (t - t2)), abs=1e-14)


def test_vanishing_vevs():
    spec = oscillator_spec()
    assert tc_vev(spec, [FieldOp("Q", "x1", 0.4, "+")]) == 0
    fspec = random_channel_spec(np.random.default_rng(0), statistics="fermi")
    ops = [FieldOp("psi", "x1", 0.1, "+"), FieldOp("tpsi", "x2", 0.2, "-"),
           FieldOp("psi", "x2", 0.3, "+")]
    assert tc_vev(fspec, ops) == 0


def test_truncation_guard():
    spec = oscillator_spec(truncation=2)
    ops = [FieldOp("Q", "x1", float(t), "+") for t in range(3)]
    with pytest.raises(TruncationError):
        tc_vev(spec, ops)


def test_moments():
    spec = oscillator_spec()
    pts = [SourcePoint("eta+", "x1", 1.0), SourcePoint("eta-", "x1", 2.0)]
    assert moment_vev(spec, pts, [0, 0]) == 1
    assert moment_vev(spec, pts, [1, 0]) == 0
    ref = 1j * (-1j) * tc_vev(spec, [FieldOp("Q", "x1", 2.0, "-"), FieldOp("Q", "x1", 1.0, "+")])
    assert moment_vev(spec, pts, [1, 1]) == pytest.approx(ref)
    fspec = random_channel_spec(np.random.default_rng(0), statistics="fermi")
    fpts = [SourcePoint("teta+", "x1", 1.0), SourcePoint("eta+", "x2", 0.0)]
    m = moment_vev(fspec, fpts, [1, 1])
    assert isinstance(m, GrassmannPoly) and set(m.terms) == {(1, 2)}
