import numpy as np
import pytest

from lacelab.fields import (FourierGrid, LatticeField, convolution_power,
                            convolve, delta_field, export_csv, field_from_dict,
                            fourier_eval, load_field, save_field,
                            weighted_field)
from lacelab.steps import nn_step


def random_field(d, L, seed=0, symmetric=True):
    rng = np.random.default_rng(seed)
    f = LatticeField(d, L, rng.random((L,) * d), symmetric=False)
    return f.symmetrized() if symmetric else f


def test_delta_is_identity_for_convolution():
    f = random_field(2, 7, seed=1)
    out = convolve(delta_field(2, 7), f)
    np.testing.assert_allclose(out.values, f.values, rtol=0, atol=1e-15)


def test_convolve_matches_direct_double_sum():
    # d=1, L=5, f=g=half weights at +-1: (f*g)(0)=1/2, (f*g)(+-2)=1/4
    f = field_from_dict(1, 5, {(1,): 0.5, (-1,): 0.5})
    out = convolve(f, f, method="fft")
    assert out.at((0,)) == pytest.approx(0.5, abs=1e-15)
    assert out.at((2,)) == pytest.approx(0.25, abs=1e-15)
    assert out.at((-2,)) == pytest.approx(0.25, abs=1e-15)
    direct = convolve(f, f, method="direct")
    np.testing.assert_allclose(out.values, direct.values, atol=1e-15)


def test_fft_agrees_with_direct_on_random_fields():
    f = random_field(2, 9, seed=2)
    g = random_field(2, 9, seed=3)
    a = convolve(f, g, method="fft")
    b = convolve(f, g, method="direct")
    np.testing.assert_allclose(a.values, b.values, rtol=1e-13, atol=1e-13)


def test_convolution_commutative_associative_and_mass():
    f = random_field(2, 7, seed=4)
    g = random_field(2, 7, seed=5)
    h = random_field(2, 7, seed=6)
    np.testing.assert_allclose(convolve(f, g).values, convolve(g, f).values,
                               rtol=1e-12, atol=1e-13)
    lhs = convolve(convolve(f, g), h)
    rhs = convolve(f, convolve(g, h))
    np.testing.assert_allclose(lhs.values, rhs.values, rtol=1e-12, atol=1e-12)
    assert convolve(f, g).total() == pytest.approx(f.total() * g.total(), rel=1e-12)


def test_symmetry_flag_and_orbit_check():
    f = random_field(3, 5, seed=7)
    g = random_field(3, 5, seed=8)
    assert convolve(f, g).symmetric
    assert convolve(f, g).check_symmetry()
    asym = random_field(2, 5, seed=9, symmetric=False)
    sym = random_field(2, 5, seed=10)
    assert not convolve(sym, asym).symmetric
    assert not asym.check_symmetry()


def test_shape_mismatch_raises():
    with pytest.raises(ValueError):
        convolve(delta_field(2, 5), delta_field(2, 7))
    with pytest.raises(ValueError):
        convolve(delta_field(2, 5), delta_field(3, 5))


def test_convolution_power():
    D = nn_step(2).to_field(9)
    assert convolution_power(D, 0).at((0, 0)) == 1.0
    np.testing.assert_allclose(convolution_power(D, 1).values, D.values)
    # two-step return probability is 1/(2d)
    assert convolution_power(D, 2).at((0, 0)) == pytest.approx(0.25, abs=1e-15)
    # repeated squaring agrees with the n-fold product
    p5 = convolution_power(D, 5)
    ref = D
    for _ in range(4):
        ref = convolve(ref, D)
    np.testing.assert_allclose(p5.values, ref.values, atol=1e-15)


def test_weighted_field():
    f = random_field(2, 7, seed=10)
    assert weighted_field(f, 0.0) is f
    w = weighted_field(f, 2.0)
    assert w.at((0, 0)) == 0.0
    assert w.at((1, 2)) == pytest.approx(5.0 * f.at((1, 2)))
    wa = weighted_field(f, 2.0, axis=0)
    assert wa.at((1, 2)) == pytest.approx(1.0 * f.at((1, 2)))
    with pytest.raises(ValueError):
        weighted_field(f, -1.0)


def test_weighted_sup_monotone_in_box():
    J = nn_step(2)
    small = weighted_field(convolution_power(J.to_field(9), 4), 2.0).values.max()
    large = weighted_field(convolution_power(J.to_field(15), 4), 2.0).values.max()
    assert large >= small - 1e-15


def test_fourier_grid_excludes_origin():
    grid = FourierGrid(3, 8)
    assert grid.origin_excluded
    nodes = grid.nodes()
    assert np.min(np.abs(nodes)) > 0
    with pytest.raises(ValueError):
        FourierGrid(2, 1)


def test_fourier_eval_delta_and_nn():
    grid = FourierGrid(2, 16)
    fhat = fourier_eval(delta_field(2, 9), grid)
    np.testing.assert_allclose(fhat, np.ones((16, 16)), atol=1e-15)
    D = nn_step(2).to_field(9)
    got = fourier_eval(D, grid)
    k = grid.axis_nodes()
    want = 0.5 * (np.cos(k)[:, None] + np.cos(k)[None, :])
    np.testing.assert_allclose(got, want, atol=1e-14)


def test_fourier_eval_matches_direct_sum_and_convolution_theorem():
    f = random_field(2, 5, seed=11)
    g = random_field(2, 5, seed=12)
    grid = FourierGrid(2, 8)
    fhat = fourier_eval(f, grid)
    # direct summation oracle at one node
    k = grid.axis_nodes()
    direct = sum(v * np.cos(k[3] * x[0]) * np.cos(k[5] * x[1])
                 for x, v in f.support_points())
    assert fhat[3, 5] == pytest.approx(direct, rel=1e-12)
    # product rule on a padded box (no wrap of supports)
    fp = field_from_dict(2, 17, dict(f.support_points()))
    gp = field_from_dict(2, 17, dict(g.support_points()))
    conv = convolve(fp, gp)
    lhs = fourier_eval(conv, grid)
    rhs = fourier_eval(fp, grid) * fourier_eval(gp, grid)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-11, atol=1e-11)


def test_small_k_taylor():
    # mass-1 field: fhat near origin deviates from 1 by O(|k|^2)
    D = nn_step(3).to_field(7)
    grid = FourierGrid(3, 64)
    fhat = fourier_eval(D, grid)
    k = grid.axis_nodes()
    i = np.argmin(np.abs(k))
    knear = np.array([k[i]] * 3)
    dev = abs(fhat[i, i, i] - 1.0)
    assert dev <= np.dot(knear, knear) / (2 * 3) * 1.0001  # K_2 |k|^2 / (2d)


def test_serialization_roundtrip(tmp_path):
    f = random_field(3, 5, seed=13)
    path = tmp_path / "field.npz"
    save_field(f, str(path))
    g = load_field(str(path))
    assert g.d == f.d and g.L == f.L and g.symmetric == f.symmetric
    np.testing.assert_array_equal(g.values, f.values)
    csv_path = tmp_path / "field.csv"
    export_csv(f, str(csv_path))
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "x1,x2,x3,value"
    assert len(lines) == 1 + 5**3


def test_convolution_overflow_raises():
    big = field_from_dict(1, 5, {(0,): 1e200, (1,): 1e200, (-1,): 1e200})
    with pytest.raises(FloatingPointError):
        convolution_power(big, 4)


def test_mass_multiplicativity_property():
    from hypothesis import given, settings, strategies as st

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def inner(seed):
        f = random_field(2, 5, seed=seed)
        g = random_field(2, 5, seed=seed + 1)
        assert convolve(f, g).total() == pytest.approx(
            f.total() * g.total(), rel=1e-11
        )

    inner()


def test_convolution_power_additivity_property():
    from hypothesis import given, settings, strategies as st

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 4), st.integers(0, 4))
    def inner(n, m):
        D = nn_step(2).to_field(11)
        lhs = convolution_power(D, n + m)
        rhs = convolve(convolution_power(D, n), convolution_power(D, m))
        np.testing.assert_allclose(lhs.values, rhs.values, atol=1e-14)

    inner()
