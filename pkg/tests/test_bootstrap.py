import pytest

from lacelab.bootstrap import gate_table, run_bootstrap


def test_saw_d7_trace_values():
    t = run_bootstrap("saw", 7, 0.01)
    phis = [s[3] for s in t.steps]
    assert phis[0] == 2.0
    assert phis[1] == pytest.approx(3.99)
    assert phis[2] == pytest.approx(4.99)
    assert phis[-1] == pytest.approx(4.99)  # fixed point d-2-eps
    assert t.terminal_alpha == pytest.approx(7 - 2 - 0.01)
    assert t.threshold == pytest.approx(3.0)
    assert t.verdict == "pass"
    assert t.rho == 2 * (7 - 4)


def test_saw_d5_passes():
    t = run_bootstrap("saw", 5, 0.01)
    assert t.terminal_alpha == pytest.approx(2.99)
    assert t.threshold == pytest.approx(7 / 3)
    assert t.verdict == "pass"


def test_saw_fails_only_at_low_d():
    # pass exactly when d > 4 + 3 eps/2
    eps = 0.01
    assert run_bootstrap("saw", 4, eps).verdict == "fail"
    assert run_bootstrap("saw", 5, eps).verdict == "pass"


def test_percolation_gate():
    assert run_bootstrap("percolation", 10, 0.01).verdict == "fail"
    t10 = run_bootstrap("percolation", 10, 0.01)
    assert t10.terminal_alpha == pytest.approx(5.99)
    assert t10.threshold == pytest.approx(6.0)
    t11 = run_bootstrap("percolation", 11, 0.01)
    assert t11.verdict == "pass"
    assert t11.rho == 11 - 6


def test_ltla_gate():
    assert run_bootstrap("ltla", 26, 0.01).verdict == "fail"
    assert run_bootstrap("ltla", 27, 0.01).verdict == "pass"


def test_gate_table_values():
    gates = gate_table(0.01)
    assert gates == {"saw": 5, "percolation": 11, "ltla": 27}


def test_gate_table_monotone_ordering():
    for eps in (0.005, 0.01, 0.05):
        gates = gate_table(eps)
        assert gates["saw"] <= gates["percolation"] <= gates["ltla"]


def test_phi_increases_by_one_per_step_presaturation():
    t = run_bootstrap("saw", 12, 0.01)
    phis = [s[3] for s in t.steps]
    diffs = [round(b - a, 10) for a, b in zip(phis[1:-2], phis[2:-1])]
    assert all(dv == 1.0 for dv in diffs)


def test_terminal_alpha_eps_shift_only():
    a = run_bootstrap("saw", 9, 0.01).terminal_alpha
    b = run_bootstrap("saw", 9, 0.02).terminal_alpha
    assert a - b == pytest.approx(0.01)


def test_validation_errors():
    with pytest.raises(ValueError):
        run_bootstrap("ising", 7, 0.01)
    with pytest.raises(ValueError):
        run_bootstrap("saw", 2, 0.01)
    with pytest.raises(ValueError):
        run_bootstrap("saw", 7, 1.5)


def test_knife_edge_warning_silent_for_generic_eps():
    t = run_bootstrap("saw", 7, 0.01)
    assert not any("knife-edge" in w for w in t.warnings)
