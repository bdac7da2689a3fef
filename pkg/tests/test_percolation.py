import numpy as np
import pytest

from lacelab.percolation import (exhaustive_two_point, perc_diagram_bridge,
                                 sample_two_point)


def test_p0_and_p1():
    e0 = sample_two_point(2, 3, 0.0, 100, seed=1)
    assert e0.mean.at((0, 0)) == 1.0
    assert e0.mean.total() == 1.0
    assert e0.stderr.values.max() == 0.0
    e1 = sample_two_point(2, 3, 1.0, 100, seed=1)
    assert np.all(e1.mean.values == 1.0)


def test_probability_range_and_origin():
    est = sample_two_point(2, 5, 0.35, 500, seed=3)
    assert est.mean.at((0, 0)) == 1.0
    assert np.all(est.mean.values >= 0) and np.all(est.mean.values <= 1)
    assert est.mean.check_symmetry()


def test_budget_guard():
    with pytest.raises(ValueError, match="budget"):
        sample_two_point(3, 21, 0.3, 10**9, seed=0)


def test_invalid_p():
    with pytest.raises(ValueError):
        sample_two_point(2, 3, 1.2, 10, seed=0)


def test_determinism_bit_identical():
    a = sample_two_point(2, 3, 0.37, 300, seed=42)
    b = sample_two_point(2, 3, 0.37, 300, seed=42)
    assert np.array_equal(a.mean.values, b.mean.values)
    assert np.array_equal(a.stderr.values, b.stderr.values)
    c = sample_two_point(2, 3, 0.37, 300, seed=43)
    assert not np.array_equal(a.mean.values, c.mean.values)


def test_serialization_roundtrip(tmp_path):
    est = sample_two_point(2, 3, 0.3, 50, seed=9)
    path = str(tmp_path / "est.npz")
    est.save(path)
    from lacelab.percolation import PercEstimate

    back = PercEstimate.load(path)
    assert back.d == est.d and back.L == est.L and back.p == est.p
    assert back.n_samples == est.n_samples and back.seed == est.seed
    np.testing.assert_array_equal(back.mean.values, est.mean.values)


def test_exhaustive_oracle_within_3_sigma():
    for p in (0.2, 0.5):
        exact = exhaustive_two_point(2, 3, p)
        mc = sample_two_point(2, 3, p, 20_000, seed=7)
        sig = np.maximum(mc.stderr.values, 1e-12)
        dev = np.abs(mc.mean.values - exact.values) / sig
        dev[0, 0] = 0.0
        assert dev.max() < 3.0


def test_exhaustive_cap():
    with pytest.raises(ValueError, match="exceed"):
        exhaustive_two_point(2, 5, 0.3)


def test_monotonicity_in_p_crn():
    # common random numbers: occupied sets are nested, means monotone
    lo = sample_two_point(2, 3, 0.25, 2_000, seed=5)
    hi = sample_two_point(2, 3, 0.45, 2_000, seed=5)
    assert np.all(hi.mean.values >= lo.mean.values - 1e-12)
    # and within 3 sigma even without CRN
    hi2 = sample_two_point(2, 3, 0.45, 2_000, seed=6)
    sig = np.sqrt(hi2.stderr.values**2 + lo.stderr.values**2) + 1e-12
    assert np.all(hi2.mean.values - lo.mean.values >= -3 * sig)


def test_diagram_bridge_p0_and_envelopes():
    est0 = sample_two_point(2, 3, 0.0, 50, seed=1)
    out0 = perc_diagram_bridge(est0)
    assert out0["bars"]["B"] == 0.0
    est = sample_two_point(2, 5, 0.3, 800, seed=11)
    out = perc_diagram_bridge(est, weights=((0.0, 0.0), (2.0, 0.0)))
    for key in ((0.0, 0.0), (2.0, 0.0)):
        assert (out["bars_lo"]["W"][key] <= out["bars"]["W"][key]
                <= out["bars_hi"]["W"][key])
    assert out["bars_lo"]["B"] <= out["bars"]["B"] <= out["bars_hi"]["B"]


def test_higher_dimension_smoke():
    est = sample_two_point(7, 3, 0.05, 40, seed=2)
    assert est.mean.at((0,) * 7) == 1.0
    out = perc_diagram_bridge(est)
    assert np.isfinite(out["bars"]["T"][(0.0, 0.0)])


def test_d7_triangle_bar_vs_smallness_reference():
    # high-d small-p estimate feeds the diagram bridge; the triangle bar is
    # finite and far below the 0.493 smallness line at p = 0.05
    est = sample_two_point(7, 5, 0.05, 60, seed=4)
    out = perc_diagram_bridge(est, weights=((0.0, 0.0), (2.0, 0.0)))
    tbar = out["bars"]["T"][(0.0, 0.0)]
    assert np.isfinite(tbar)
    assert tbar < 0.493
    assert out["bars"]["W"][(2.0, 0.0)] < 0.493
