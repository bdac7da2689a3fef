"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; the whole suite is also part of the default pytest run.
"""

import math

import numpy as np
import pytest

from lacelab.bootstrap import gate_table, run_bootstrap
from lacelab.diagrams import diagram_oracle, diagram_suite
from lacelab.fields import LatticeField
from lacelab.frackernel import FracKernel, kernel_eval, kernel_fourier_identity
from lacelab.green import (counterexample_experiment,
                           exp_power_inequality_holds, gaussian_constant,
                           gaussian_tail_bound_holds, green_quadrature,
                           green_series, lace_two_point, resolvent_residual)
from lacelab.heat import AxisHeatEngine
from lacelab.percolation import exhaustive_two_point, sample_two_point
from lacelab.saw import (canonical, enumerate_saw, enumerate_saw_naive,
                         estimate_pc, extract_pi_series, simple_walk_series)
from lacelab.steps import CounterexampleParams, StepDistribution, nn_step

WATSON_D3 = 1.5163860591519780


def report(num, ok, detail):
    print(f"ACCEPTANCE {num:>2}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def test_criterion_01_gaussian_constants():
    a3 = gaussian_constant(3)
    a5 = gaussian_constant(5)
    ok3 = abs(a3 - 3 / (2 * math.pi)) < 1e-12
    ok5 = abs(a5 - 0.12665147955292222) < 1e-10
    report(1, ok3 and ok5,
           f"a_3 = {a3:.14f} (3/(2 pi) to 1e-12: {ok3}); "
           f"a_5 = {a5:.12f} (0.1266515 to 1e-10: {ok5})")


def test_criterion_02_method_triangle_d3():
    J = nn_step(3)
    quad = green_quadrature(J, L=61, M=192)
    ser = green_series(J, L=61, n_max=1 << 22, pad_to=160, extrapolate=True)
    eng = AxisHeatEngine(J)
    pts = [(0, 0, 0), (1, 0, 0), (2, 1, 0), (4, 0, 0), (4, 3, 1),
           (6, 2, 0), (8, 0, 0), (5, 5, 3)]
    heat_vals, _ = eng.green(np.array(pts, dtype=np.int64))
    worst = 0.0
    for x, h in zip(pts, heat_vals):
        vals = (quad.value(x), float(h), ser.value(x))
        for a in vals:
            for b in vals:
                worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    c0 = quad.value((0, 0, 0))
    ok = worst < 1e-5 and abs(c0 - WATSON_D3) < 1e-4
    report(2, ok,
           f"max pairwise rel dev {worst:.2e} (tol 1e-5) on |x| <= 8, L=61; "
           f"C(0) = {c0:.7f} vs {WATSON_D3:.6f} (tol 1e-4)")


@pytest.fixture(scope="module")
def d5_points():
    J = nn_step(5)
    pts = [(r, 0, 0, 0, 0) for r in range(8, 21)]
    return J, pts, green_quadrature(J, M=128, points=pts)


def test_criterion_03_gaussian_asymptote_d5(d5_points):
    J, pts, res = d5_points
    a5 = gaussian_constant(5) / J.k1()
    devs = []
    for r in range(8, 21):
        c = res.value((r, 0, 0, 0, 0))
        devs.append(abs(r**3 * c - a5) / a5)
    within = all(dv < 0.08 for dv in devs)
    shrinking = all(b < a for a, b in zip(devs, devs[1:]))
    report(3, within and shrinking,
           f"|x|^3 C deviations from a_5/K_1 = {a5:.6f} on |x| in [8,20]: "
           f"max {max(devs):.4f} (tol 0.08), strictly shrinking: {shrinking}")


def test_criterion_04_convolution_asymptote_d5(d5_points):
    J, pts, _ = d5_points
    a5 = gaussian_constant(5)
    H, A = lace_two_point(J, J, M=128, points=pts, richardson=False)
    target = a5 * 1.0 / J.k1()  # sum g = 1 for g = D
    devs = [abs(r**3 * H.value((r, 0, 0, 0, 0)) - target) / target
            for r in range(8, 21)]
    ok_pos = all(dv < 0.10 for dv in devs)
    # zero-sum g: |x|^3 H -> 0
    shell = {}
    for j in range(5):
        for s in (1, -1):
            x = [0] * 5
            x[j] = 2 * s
            shell[tuple(x)] = 0.1
    g0 = StepDistribution(5, {(0, 0, 0, 0, 0): -1.0, **shell})
    sub = [(8, 0, 0, 0, 0), (14, 0, 0, 0, 0), (20, 0, 0, 0, 0)]
    H0, A0 = lace_two_point(g0, J, M=128, points=sub, richardson=False)
    scaled0 = [abs(r**3 * H0.value(x)) for x, r in zip(sub, (8, 14, 20))]
    ok_zero = (A0 == pytest.approx(0.0, abs=1e-12)
               and scaled0[2] < scaled0[0] and scaled0[2] < 0.02 * target)
    report(4, ok_pos and ok_zero,
           f"g=D: max dev {max(devs):.4f} (tol 0.10); zero-sum g: |x|^3 H at "
           f"|x|=20 is {scaled0[2]:.2e} (vanishing: {ok_zero})")


def test_criterion_05_fractional_kernels():
    worst_resid = 0.0
    for eps in (0.25, 0.5, 0.75):
        for parity in ("odd", "even"):
            kern = FracKernel(parity, eps)
            for x in range(-50, 51):
                if x == 0 and parity == "odd":
                    continue
                worst_resid = max(worst_resid, kernel_fourier_identity(kern, x))
    rng = np.random.default_rng(0)
    ps = rng.uniform(1e-4, math.pi, size=1000)
    h = 1e-6
    bounds_ok = True
    for eps in (0.25, 0.5, 0.75):
        ko, ke = FracKernel("odd", eps), FracKernel("even", eps)
        vo = np.abs(kernel_eval(ko, ps))
        ve = kernel_eval(ke, ps).real
        do = np.abs((kernel_eval(ko, ps + h) - kernel_eval(ko, ps - h)) / (2 * h))
        de = np.abs((kernel_eval(ke, ps + h) - kernel_eval(ke, ps - h)) / (2 * h))
        bounds_ok &= bool(np.all(vo <= 0.5 * ps ** (eps - 1) * (1 + 1e-10)))
        bounds_ok &= bool(np.all(ve >= -math.log(2) / math.pi - 1e-12))
        bounds_ok &= bool(np.all(do <= ps ** (eps - 2) + 1e-4))
        bounds_ok &= bool(np.all(de <= ps ** (eps - 2) / math.pi + 1e-4))
    ok = worst_resid < 1e-6 and bounds_ok
    report(5, ok, f"identity residual max {worst_resid:.2e} (tol 1e-6) for "
                  f"eps in {{0.25,0.5,0.75}}, x in [-50,50]; "
                  f"kernel/derivative bounds at 1000 samples: {bounds_ok}")


def test_criterion_06_resolvent_identity():
    results = []
    J3 = nn_step(3)
    ser = green_series(J3, L=15, n_max=1 << 20, pad_to=128, extrapolate=True)
    tol_s = ser.diagnostics["truncation_estimate"] + ser.diagnostics["wrap_estimate"]
    results.append(("series", resolvent_residual(ser, J3), max(tol_s, 1e-8)))
    quad = green_quadrature(J3, L=21, M=144)
    results.append(("quadrature", resolvent_residual(quad, J3),
                    max(quad.diagnostics["wrap_estimate"], 1e-6)))
    J2 = nn_step(4)
    q4 = green_quadrature(J2, L=13, M=32)
    results.append(("quadrature-d4", resolvent_residual(q4, J2),
                    max(q4.diagnostics["wrap_estimate"], 1e-6)))
    ok = all(resid <= tol for _, resid, tol in results)
    report(6, ok, "; ".join(f"{name}: residual {resid:.2e} <= {tol:.2e}"
                            for name, resid, tol in results))


def test_criterion_07_diagram_oracle_L7():
    rng = np.random.default_rng(2024)
    G = LatticeField(2, 7, rng.random((7, 7)), symmetric=False).symmetrized()
    weights = [(0.0, 0.0), (2.0, 0.0), (1.0, 1.0)]
    ds = diagram_suite(G, weights=weights, h_betas=(), h_samples=())
    oracle = diagram_oracle(G, weights=weights)

    def worst(field, table):
        return max(abs(field.at(a) - v) / max(abs(v), 1e-300)
                   for a, v in table.items())

    worsts = [worst(ds.B, oracle["B"]), worst(ds.P, oracle["P"])]
    for key in weights:
        worsts.append(worst(ds.W[key], oracle["W"][key]))
        worsts.append(worst(ds.T[key], oracle["T"][key]))
    for gamma in {g for _, g in weights}:
        worsts.append(worst(ds.S[gamma], oracle["S"][gamma]))
    ok = max(worsts) < 1e-12
    report(7, ok, f"all B/W/T/S/P entries vs nested-loop oracle: "
                  f"max rel dev {max(worsts):.2e} (tol 1e-12)")


def test_criterion_08_saw_enumeration_and_pc():
    ok_counts = True
    for d in range(2, 7):
        s = enumerate_saw(d, 2)
        ok_counts &= s.total(1) == 2 * d and s.total(2) == 2 * d * (2 * d - 1)
    s10 = enumerate_saw(2, 10)
    naive = enumerate_saw_naive(2, 10)
    table = {}
    for (n, y), v in naive.items():
        table[(n, canonical(y))] = v
    ok_naive = table == s10.counts

    from lacelab.fields import convolve

    s8 = enumerate_saw(2, 8)
    pi = extract_pi_series(s8)
    g = [s8.order_field(n, pi.L) for n in range(9)]
    ok_roundtrip = True
    for n in range(9):
        acc = g[n].values.copy()
        for m in range(1, n + 1):
            acc -= convolve(pi.j_fields[m], g[n - m]).values
        if n == 0:
            acc[(0, 0)] -= 1.0
        ok_roundtrip &= np.abs(acc).max() == 0.0

    band_ok = True
    tested = []
    for d, N in ((3, 7), (4, 5), (5, 5)):
        out = estimate_pc(enumerate_saw(d, N))
        band_ok &= out["status"] == "ok" and out["two_d_pc"] >= 1.0
        tested.append((d, N, round(out.get("two_d_pc", float("nan")), 4)))
    out0 = estimate_pc(simple_walk_series(3, 5))
    band_ok &= out0["two_d_pc"] == 1.0
    ok = ok_counts and ok_naive and ok_roundtrip and band_ok
    report(8, ok, f"c1/c2 exact d=2..6: {ok_counts}; d=2 N=10 table == naive: "
                  f"{ok_naive}; series round-trip exact: {ok_roundtrip}; "
                  f"2d p_c >= 1 on {tested}: {band_ok}")


def test_criterion_09_bootstrap_gates():
    gates = gate_table(0.01)
    ok_gates = gates == {"saw": 5, "percolation": 11, "ltla": 27}
    t = run_bootstrap("saw", 7, 0.01)
    phis = [round(s[3], 10) for s in t.steps[:3]]
    ok_trace = phis == [2.0, 3.99, 4.99] and t.steps[-1][3] == pytest.approx(4.99)
    report(9, ok_gates and ok_trace,
           f"gates at eps=0.01: {gates}; d=7 saw phi trace {phis} + fixed point")


def test_criterion_10_counterexample_trend():
    params = CounterexampleParams(d=5, eps=0.03, l_list=(12, 24, 48),
                                  g_amp=2400.0)
    rep = counterexample_experiment(params)
    rs = [row["r"] for row in rep.rows]
    ok_grow = rep.verdict == "increasing"
    rep0 = counterexample_experiment(
        CounterexampleParams(d=5, eps=0.03, l_list=()), probes=[12, 24, 48]
    )
    a5 = gaussian_constant(5)
    devs0 = [abs(row["r"] - a5) / a5 for row in rep0.rows]
    ok_const = all(dv < 0.05 for dv in devs0)
    report(10, ok_grow and ok_const,
           f"r_n = {[round(r, 3) for r in rs]} strictly increasing: {ok_grow}; "
           f"empty l_list within 5% of a_5/K_1: max dev {max(devs0):.4f}")


def test_criterion_11_percolation_mc():
    ok_sigma = True
    for p in (0.2, 0.5):
        exact = exhaustive_two_point(2, 3, p)
        mc = sample_two_point(2, 3, p, 100_000, seed=11)
        sig = np.maximum(mc.stderr.values, 1e-12)
        dev = np.abs(mc.mean.values - exact.values) / sig
        dev[0, 0] = 0.0
        ok_sigma &= float(dev.max()) < 3.0
    a = sample_two_point(2, 3, 0.37, 500, seed=21)
    b = sample_two_point(2, 3, 0.37, 500, seed=21)
    ok_det = (np.array_equal(a.mean.values, b.mean.values)
              and np.array_equal(a.stderr.values, b.stderr.values))
    lo = sample_two_point(2, 3, 0.25, 3000, seed=31)
    hi = sample_two_point(2, 3, 0.40, 3000, seed=31)
    sig = np.sqrt(lo.stderr.values**2 + hi.stderr.values**2) + 1e-12
    ok_mono = bool(np.all(hi.mean.values - lo.mean.values >= -3 * sig))
    ok = ok_sigma and ok_det and ok_mono
    report(11, ok, f"MC within 3 sigma of exhaustive at p=0.2, 0.5: {ok_sigma}; "
                   f"bit-identical reruns: {ok_det}; monotone in p (3 sigma): {ok_mono}")


def test_criterion_12_convolution_asymptote_lemma():
    d, alpha, A = 5, 3.0, 1.0
    rng = np.random.default_rng(5)
    g = {}
    for x in np.ndindex(3, 3, 3, 3, 3):
        pt = tuple(int(c) - 1 for c in x)
        g[tuple(sorted(abs(c) for c in pt))] = float(rng.random())
    gmap = {}
    for x in np.ndindex(5, 5, 5, 5, 5):
        pt = tuple(int(c) - 2 for c in x)
        if max(abs(c) for c in pt) <= 1:
            gmap[pt] = g[tuple(sorted(abs(c) for c in pt))]
    gsum = sum(gmap.values())
    x0 = np.array([40, 0, 0, 0, 0])
    val = 0.0
    for z, w in gmap.items():
        y = x0 - np.array(z)
        r = max(np.linalg.norm(y), 1.0)
        val += w * A / r**alpha
    ratio = 40.0**alpha * val / (A * gsum)
    ok = 0.98 <= ratio <= 1.02
    report(12, ok, f"|x|^3 (f*g)(x) / (A sum g) = {ratio:.5f} at |x|=40 "
                   f"(window [0.98, 1.02])")


def test_criterion_13_helper_inequalities():
    rng = np.random.default_rng(6)
    ok_exp = all(
        exp_power_inequality_holds(*np.exp(rng.uniform(-3, 3, size=3)))
        for _ in range(10_000)
    )
    ok_tail = True
    for _ in range(10_000):
        a = float(np.exp(rng.uniform(-2, 2)))
        b = float(np.exp(rng.uniform(-2, 1)))
        dd = int(rng.integers(1, 9))
        ok_tail &= gaussian_tail_bound_holds(a, b, dd)[0]
    report(13, ok_exp and ok_tail,
           f"y^-b e^(-a/y) <= (b/(a e))^b on 1e4 draws: {ok_exp}; "
           f"Gaussian k-tail bound on 1e4 draws: {ok_tail}")
