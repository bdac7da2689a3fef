"""Diagrammatic quantities built from a two-point field G: the open bubble B,
the weighted two/three/four/five-line convolutions W, T, S, P, the
two-displacement eight-line quantity H, their sup ("bar") values, and the
assembled diagram bounds used to control the expansion kernel.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .fields import LatticeField, axis_coords, convolve, field_from_dict, weighted_field

__all__ = [
    "DiagramSet",
    "diagram_suite",
    "pi_sum_bound_saw",
    "pi_pointwise_exponent",
    "pivot_factor",
    "diagram_oracle",
]

DEFAULT_H_SAMPLES = tuple(
    (a, b)
    for a in range(-4, 5)
    for b in range(-4, 5)
)


@dataclass
class DiagramSet:
    d: int
    L: int
    weights: list
    B: LatticeField
    W: dict
    T: dict
    S: dict
    P: LatticeField
    H: dict  # beta -> {(a, b): value} on axis-sample displacements
    bars: dict = dc_field(default_factory=dict)
    notes: dict = dc_field(default_factory=dict)


def _gbar(G: LatticeField, alpha: float) -> float:
    return float(weighted_field(G, alpha).values.max())


def diagram_suite(G: LatticeField, weights=((0.0, 0.0),), h_betas=(0.0,),
                  h_samples=DEFAULT_H_SAMPLES, h_box: int | None = 9,
                  method: str = "auto") -> DiagramSet:
    """All diagram quantities of a symmetric two-point field.

    B(a) excludes the y=0 term; T and S subtract the coincident-point cube
    and fourth-power terms exactly.  H is evaluated on the (a, b) axis sample
    set over a truncated sub-box of side h_box (bars over the sample are
    lower estimates of the true sup).
    """
    d, L = G.d, G.L
    g0 = float(G.at((0,) * d))
    GG = convolve(G, G, method=method)

    B = LatticeField(d, L, GG.values - g0 * G.values, symmetric=G.symmetric)

    W: dict = {}
    T: dict = {}
    S: dict = {}
    weighted = {}

    def gw(alpha):
        if alpha not in weighted:
            weighted[alpha] = weighted_field(G, alpha)
        return weighted[alpha]

    for beta, gamma in weights:
        Wf = convolve(gw(beta), gw(gamma), method=method)
        W[(beta, gamma)] = Wf
        Tv = convolve(Wf, G, method=method).values.copy()
        if beta == 0 and gamma == 0:
            Tv[(0,) * d] -= g0**3
        T[(beta, gamma)] = LatticeField(d, L, Tv, symmetric=G.symmetric)
    for gamma in sorted({g for _, g in weights}):
        Sv = convolve(convolve(gw(gamma), GG, method=method), G, method=method).values.copy()
        if gamma == 0:
            Sv[(0,) * d] -= g0**4
        S[gamma] = LatticeField(d, L, Sv, symmetric=G.symmetric)
    P = convolve(convolve(GG, GG, method=method), G, method=method)

    H = {beta: _h_table(G, beta, h_samples, h_box) for beta in h_betas}

    bars = {
        "B": float(B.values.max()),
        "P": float(P.values.max()),
        "G2": _gbar(G, 2.0),
        "W": {k: float(v.values.max()) for k, v in W.items()},
        "T": {k: float(v.values.max()) for k, v in T.items()},
        "S": {k: float(v.values.max()) for k, v in S.items()},
        "H": {beta: max(tab.values()) for beta, tab in H.items()},
    }
    notes = {"H_is_lower_estimate": True, "h_box": h_box,
             "odd_integer_weights": sorted(
                 {w for pair in weights for w in pair
                  if w > 0 and float(w).is_integer() and int(w) % 2 == 1})}
    return DiagramSet(d=d, L=L, weights=list(weights), B=B, W=W, T=T, S=S,
                      P=P, H=H, bars=bars, notes=notes)


def _truncate(G: LatticeField, Lh: int) -> LatticeField:
    if Lh >= G.L:
        return G
    coords = axis_coords(Lh)
    vals = G.values
    for j in range(G.d):
        vals = np.take(vals, coords % G.L, axis=j)
    return LatticeField(G.d, Lh, vals.copy(), symmetric=G.symmetric)


def _h_table(G: LatticeField, beta: float, samples, h_box) -> dict:
    """H^{(beta)}(a, b) by contraction:

    H = sum_{x,u,v} g1(u) G(x-u) G(v-u) Gb(x) W0(a-v) W0(x-v+b)
    with W0 = G*G; the u-sum is one BLAS product, each (a,b) costs n^2.
    """
    Gh = _truncate(G, h_box) if h_box else G
    d, L = Gh.d, Gh.L
    n = L**d
    coords = list(itertools.product(range(L), repeat=d))
    idx = {c: i for i, c in enumerate(coords)}
    flat = Gh.values.reshape(n)
    W0 = convolve(Gh, Gh).values.reshape(n)
    Gb = weighted_field(Gh, beta).values.reshape(n)

    # displacement matrix D[i, j] = value(x_j - x_i), built by rolling
    def disp_matrix(values_nd):
        M = np.empty((n, n))
        for i, c in enumerate(coords):
            M[i] = np.roll(values_nd, c, axis=range(d)).reshape(n)
        return M

    MG = disp_matrix(Gh.values)   # MG[u, x] = G(x - u)
    MW = disp_matrix(W0.reshape((L,) * d))
    P1 = MG.T @ (flat[:, None] * MG)  # P1[x, v] = sum_u G(u) G(x-u) G(v-u)

    def wrap(c):
        return tuple(ci % L for ci in c)

    out = {}
    for a, b in samples:
        av = (a,) + (0,) * (d - 1) if np.isscalar(a) else tuple(a)
        bv = (b,) + (0,) * (d - 1) if np.isscalar(b) else tuple(b)
        w0av = np.array([W0[idx[wrap(tuple(np.subtract(av, x)))]] for x in coords])
        # MW_b[x, v] = W0(x - v + b): index lookup via rolled matrix
        MWb = np.empty((n, n))
        for i, x in enumerate(coords):
            shift = wrap(tuple(np.add(np.negative(x), bv)))
            # W0(x - v + b) over v = roll of W0 reversed in v
            MWb[i] = np.roll(W0.reshape((L,) * d)[tuple(slice(None, None, -1) for _ in range(d))],
                             tuple((x[j] + bv[j] + 1) % L for j in range(d)),
                             axis=range(d)).reshape(n)
        out[(av, bv)] = float(Gb @ ((P1 * MWb) @ w0av))
    return out


# ---------------------------------------------------------------------------
# assembled bounds


def pi_sum_bound_saw(diag: DiagramSet, G: LatticeField, N: int,
                     weights=(0.0, 0.0, 0.0)) -> dict:
    """Assembled diagram bounds on the N-loop kernel sums.

    unweighted: (sup_{x!=0} G) * Bbar^{N-1}; weighted: the segment-count
    factor N^2 times N^{alpha+beta+gamma} times Gbar^{(alpha)} times
    max(Wbar^{(beta,gamma)}, Wbar^{(beta,0)} Wbar^{(0,gamma)}) times the
    leftover bubbles Bbar^{N-3}.
    """
    if N < 2:
        raise ValueError("diagram bounds start at N = 2")
    d = G.d
    vals = G.values.copy()
    vals[(0,) * d] = -np.inf
    sup_off = float(vals.max())
    Bbar = diag.bars["B"]
    unweighted = sup_off * Bbar ** (N - 1)
    alpha, beta, gamma = weights
    out = {"N": N, "unweighted": unweighted}
    if any(w > 0 for w in weights):
        need = [(beta, gamma), (beta, 0.0), (0.0, gamma)]
        Wb = {}
        for pair in need:
            if pair in diag.W:
                Wb[pair] = diag.bars["W"][pair]
            else:  # compute the missing bar directly from G
                Wf = convolve(weighted_field(G, pair[0]), weighted_field(G, pair[1]))
                Wb[pair] = float(Wf.values.max())
        wfac = max(Wb[(beta, gamma)], Wb[(beta, 0.0)] * Wb[(0.0, gamma)])
        out["weighted"] = (
            N ** (alpha + beta + gamma + 2)
            * _gbar(G, alpha) * wfac * Bbar ** max(N - 3, 0)
        )
    return out


_EXPONENTS = {
    "saw": (lambda a, d: 3 * a, "beta^3", lambda d: (d + 2) / 3),
    "percolation": (lambda a, d: 2 * a, "beta^2", lambda d: (d + 2) / 2),
    "ltla": (lambda a, d: 4 * a - 2 * d, "beta^2 v beta^4", lambda d: (3 * d + 2) / 4),
}


def pi_pointwise_exponent(model: str, alpha: float, d: int) -> dict:
    """Decay exponent of the kernel bound given G(x) <= beta/|||x|||^alpha,
    with the model's sufficiency threshold for alpha."""
    model = model.lower()
    if model not in _EXPONENTS:
        raise ValueError(f"unknown model {model!r}")
    if not 0 < alpha < d:
        raise ValueError("need 0 < alpha < d")
    if model == "ltla" and alpha <= d / 2:
        raise ValueError("lattice-tree/animal bound needs alpha > d/2")
    expf, coeff, thr = _EXPONENTS[model]
    return {
        "model": model,
        "exponent": expf(alpha, d),
        "coefficient": coeff,
        "threshold_alpha": thr(d),
        "sufficient": alpha >= thr(d),
    }


def pivot_factor(G: LatticeField, p: float, Tbar_0gamma: float | None = None,
                 lam: float | None = None) -> tuple[LatticeField, dict]:
    """2dp (D*G): the bond factor attached at pivotal bonds.

    The near-coincidence correction is reported (not folded in): with the
    critical-point band 2dp <= 1 + c4 lam, a unit-distance displacement is
    bounded by (1 + c4 lam)[Tbar^{(0,gamma)} + 1/(2d)].
    """
    if p <= 0:
        raise ValueError("need p > 0")
    d = G.d
    Dvals = {}
    for j in range(d):
        for s in (1, -1):
            x = [0] * d
            x[j] = s
            Dvals[tuple(x)] = 1.0 / (2 * d)
    D = field_from_dict(d, G.L, Dvals)
    out = convolve(D, G)
    out = LatticeField(d, G.L, 2 * d * p * out.values, symmetric=G.symmetric)
    note = {"flag": "unit-distance adjustment", "two_dp": 2 * d * p}
    if Tbar_0gamma is not None:
        factor = 1.0 + (lam or 0.0)
        note["adjusted_bound"] = factor * (Tbar_0gamma + 1.0 / (2 * d))
    return out, note


# ---------------------------------------------------------------------------
# brute-force oracle (direct nested sums; used by the tests)


def diagram_oracle(G: LatticeField, weights=((0.0, 0.0),)) -> dict:
    """Direct nested-sum evaluation of B, W, T, S, P on the full box.

    O(L^{2d})-and-worse loops; intended for small boxes only.
    """
    d, L = G.d, G.L
    coords = list(itertools.product(range(-(L // 2), L // 2 + 1), repeat=d))

    def wr(x):
        return tuple((int(c) + L // 2) % L - L // 2 for c in x)

    def gv(x):
        return G.at(x)

    def gw(x, alpha):
        if alpha == 0:
            return gv(x)
        return sum(c * c for c in x) ** (alpha / 2) * gv(x)

    out = {"B": {}, "W": {}, "T": {}, "S": {}, "P": {}}
    for a in coords:
        out["B"][a] = math.fsum(
            gv(y) * gv(wr(np.subtract(a, y))) for y in coords if any(y)
        )
    for beta, gamma in weights:
        Wt = {
            a: math.fsum(
                gw(y, beta) * gw(wr(np.subtract(a, y)), gamma) for y in coords
            )
            for a in coords
        }
        Tt = {
            a: math.fsum(Wt[wr(np.subtract(a, y))] * gv(y) for y in coords)
            for a in coords
        }
        if beta == 0 and gamma == 0:
            Tt[(0,) * d] -= gv((0,) * d) ** 3
        out["W"][(beta, gamma)] = Wt
        out["T"][(beta, gamma)] = Tt
    for gamma in sorted({g for _, g in weights}):
        Wg = {a: math.fsum(gw(y, gamma) * gv(wr(np.subtract(a, y))) for y in coords)
              for a in coords}
        W3 = {a: math.fsum(Wg[wr(np.subtract(a, y))] * gv(y) for y in coords)
              for a in coords}
        St = {a: math.fsum(W3[wr(np.subtract(a, y))] * gv(y) for y in coords)
              for a in coords}
        if gamma == 0:
            St[(0,) * d] -= gv((0,) * d) ** 4
        out["S"][gamma] = St
    W0 = {a: math.fsum(gv(y) * gv(wr(np.subtract(a, y))) for y in coords)
          for a in coords}
    W4 = {a: math.fsum(W0[y] * W0[wr(np.subtract(a, y))] for y in coords)
          for a in coords}
    for a in coords:
        out["P"][a] = math.fsum(W4[wr(np.subtract(a, y))] * gv(y) for y in coords)
    return out


def h_oracle(G: LatticeField, beta: float, a, b) -> float:
    """Five-fold nested loop for H^{(beta)}(a, b); tiny boxes only."""
    d, L = G.d, G.L
    coords = list(itertools.product(range(-(L // 2), L // 2 + 1), repeat=d))

    def gv(x):
        return G.at(x)

    def gb(x):
        return sum(c * c for c in x) ** (beta / 2) * gv(x) if beta else gv(x)

    tot = 0.0
    av, bv = a, b
    for x in coords:
        gbx = gb(x)
        if gbx == 0:
            continue
        for y in coords:
            gyx = gv(tuple(np.subtract(y, x)))
            if gyx == 0:
                continue
            for z in coords:
                gz = gv(z)
                if gz == 0:
                    continue
                for u in coords:
                    guxu = gv(u) * gv(tuple(np.subtract(x, u)))
                    if guxu == 0:
                        continue
                    for v in coords:
                        tot += (
                            gz * guxu * gbx * gyx
                            * gv(tuple(np.subtract(v, u)))
                            * gv(tuple(np.add(np.subtract(z, v), av)))
                            * gv(tuple(np.add(np.subtract(y, v), bv)))
                        )
    return tot