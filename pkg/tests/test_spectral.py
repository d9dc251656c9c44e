import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalwick.errors import GridMismatch, NyquistViolation
from causalwick.spectral import (Grid, SampledSignal, default_grid, delta_part, delta_part_fourier,
                                 freq_part, masks, project, projected_derivative)
from causalwick.verify import projector_checks


def test_default_grid_snaps_to_bins():
    g = default_grid([1.0])
    assert g.dt == pytest.approx(np.pi / 4) and g.on_grid(1.0)
    g = default_grid([1.0, 1.5, 2.0])
    assert g.dt == pytest.approx(np.pi / 8)
    assert all(g.on_grid(w) for w in (1.0, 1.5, 2.0))
    assert g.eps == pytest.approx(4 / (g.n * g.dt))
    assert not g.damping_applied([1.0, 1.5, 2.0])
    assert default_grid([1.0, np.sqrt(2)]).damping_applied([1.0, np.sqrt(2)])


def test_grid_validation():
    with pytest.raises(GridMismatch):
        Grid(0.0, 0.1, 1000)
    with pytest.raises(NyquistViolation):
        Grid(0.0, 1.0, 64).check_nyquist([1.0])
    with pytest.raises(GridMismatch):
        Grid(0.0, 0.1, 64).index_of(0.05)


def test_positive_exponential_is_kept():
    g = default_grid([1.0], n=256)
    s = SampledSignal(np.exp(-1j * g.times), g)
    assert np.allclose(freq_part(s, "+").values, s.values)
    assert np.allclose(freq_part(s, "-").values, 0, atol=1e-12)


def test_cosine_splits_in_half():
    g = default_grid([1.0], n=256)
    s = SampledSignal(np.cos(g.times), g)
    assert np.allclose(freq_part(s, "+").values, 0.5 * np.exp(-1j * g.times))


def test_self_conjugate_bins_split_half_half():
    mp, mm = masks(16)
    assert mp[0] == mp[8] == 0.5 and mm[0] == mm[8] == 0.5
    assert np.all(mp + mm == 1)


@settings(max_examples=30)
@given(st.integers(3, 9), st.integers(0, 2 ** 31 - 1))
def test_decomposition_and_annihilation(logn, seed):
    n = 2 ** logn
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    assert np.allclose(project(x, "+") + project(x, "-"), x, atol=1e-12)
    inner = masks(n)[0] != 0.5
    cross = np.fft.ifft(project(project(x, "-"), "+"))
    assert np.max(np.abs(cross[inner])) < 1e-12


def test_projector_suite():
    for c in projector_checks():
        assert c["pass"], c


def test_delta_parts_against_fourier_definition():
    t, vals = delta_part_fourier(8192, 0.05, "+", 0.5)
    sel = np.abs(t) <= 10
    assert np.max(np.abs(vals[sel] - delta_part(t[sel], "+", 0.5))) < 1e-4
    # frozen reference values of the closed form
    assert delta_part(0.0, "+", 0.5) == pytest.approx(1 / np.pi)
    assert delta_part(1.0, "-", 0.5) == pytest.approx(-1 / (2j * np.pi * (1 + 0.5j)))


def test_projected_derivative_of_exponential():
    g = Grid(0.0, np.pi / 64, 512)          # four whole periods, dt²/6 ≈ 4e-4
    x = np.exp(-1j * g.times) + np.exp(1j * g.times)
    d = projected_derivative(x, g.dt, "+")
    assert np.max(np.abs(d[100:-100] + 1j * np.exp(-1j * g.times[100:-100]))) < 2e-3
