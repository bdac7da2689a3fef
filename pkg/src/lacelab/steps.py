"""Step distributions J(x): nearest-neighbor, the heavy-cluster counterexample,
and their moment constants K_0..K_3.

A StepDistribution is a finitely supported, Z^d-symmetric weight with
Jhat(0) = 1.  Support is kept sparse (dict point -> weight) because the
counterexample clusters live far from the origin.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .fields import FourierGrid, LatticeField, field_from_dict

__all__ = [
    "StepDistribution",
    "CounterexampleParams",
    "MomentReport",
    "BoundReport",
    "nn_step",
    "counterexample_step",
    "moments",
    "jhat_bounds_check",
]


@dataclass(frozen=True)
class StepDistribution:
    d: int
    weights: dict
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for x in self.weights:
            if len(x) != self.d:
                raise ValueError(f"support point {x} has wrong dimension (d={self.d})")

    # -- basic functionals ----------------------------------------------

    def mass(self) -> float:
        return float(sum(self.weights.values()))

    def k1(self) -> float:
        return float(sum(_norm2(x) * w for x, w in self.weights.items()))

    def k2(self) -> float:
        return float(sum(_norm2(x) * abs(w) for x, w in self.weights.items()))

    def k2prime(self, rho: float) -> float:
        return float(
            sum(_norm2(x) ** (1 + rho / 2.0) * abs(w) for x, w in self.weights.items())
        )

    def k3(self, rho: float = 0.0) -> float:
        """sup over x of |||x|||^{d+2+rho} |J(x)|."""
        best = 0.0
        for x, w in self.weights.items():
            n = max(math.sqrt(_norm2(x)), 1.0)
            best = max(best, n ** (self.d + 2 + rho) * abs(w))
        return best

    def support_radius(self) -> float:
        return max((math.sqrt(_norm2(x)) for x in self.weights), default=0.0)

    # -- Fourier transform ----------------------------------------------

    def jhat(self, k: np.ndarray) -> np.ndarray:
        """Jhat at rows of k (shape (..., d)); real by symmetry."""
        k = np.asarray(k, dtype=float)
        out = np.zeros(k.shape[:-1])
        for x, w in self.weights.items():
            phase = np.ones(k.shape[:-1])
            for j, c in enumerate(x):
                if c:
                    phase = phase * np.cos(k[..., j] * c)
            out += w * phase
        return out

    def jhat_grid(self, grid: FourierGrid) -> np.ndarray:
        """Jhat on the full tensor grid, shape (M,)*d."""
        ax = grid.axis_nodes()
        prof = self.axis_profile()
        if prof is not None:
            out = np.zeros((grid.M,) * self.d)
            phi = _profile_eval(prof, ax)
            for j in range(self.d):
                shape = [1] * self.d
                shape[j] = grid.M
                out = out + phi.reshape(shape)
            return out
        out = np.zeros((grid.M,) * self.d)
        for x, w in self.weights.items():
            term = np.array(w)
            for j, c in enumerate(x):
                shape = [1] * self.d
                shape[j] = grid.M
                term = term * np.cos(ax * c).reshape(shape)
            out = out + term
        return out

    # -- structure -------------------------------------------------------

    def axis_profile(self) -> dict | None:
        """If the support lies on the coordinate axes, the transform splits as
        Jhat(k) = sum_j phi(k_j).  Returns {m: c_m} with
        phi(u) = sum_m c_m cos(m u), or None when no axis split exists.
        """
        prof: dict[int, float] = {}
        for x, w in self.weights.items():
            nz = [c for c in x if c]
            if len(nz) > 1:
                return None
            m = abs(nz[0]) if nz else 0
            prof[m] = prof.get(m, 0.0) + w
        # prof[m] now sums J over all 2d axis sites at distance m (m >= 1),
        # i.e. 2d * J(m e_1); the per-axis cosine coefficient is prof[m]/d
        return {m: tot / self.d for m, tot in prof.items()} or {0: 0.0}

    def to_field(self, L: int) -> LatticeField:
        if self.support_radius() > (L - 1) // 2:
            raise ValueError(
                f"support radius {self.support_radius():.1f} exceeds box radius {(L-1)//2}"
            )
        return field_from_dict(self.d, L, self.weights, symmetric=True)

    def validate(self, tol: float = 1e-12):
        if abs(self.mass() - 1.0) > tol:
            raise ValueError(f"Jhat(0) = {self.mass()!r} is not 1 within {tol}")
        groups: dict[tuple, float] = {}
        for x, w in self.weights.items():
            key = tuple(sorted(abs(c) for c in x))
            ref = groups.setdefault(key, w)
            if not math.isclose(w, ref, rel_tol=1e-9, abs_tol=1e-300):
                raise ValueError(f"weights not Z^d-symmetric at {x}")
        return self

    def save(self, path: str) -> None:
        payload = {
            "d": self.d,
            "kind": self.kind,
            "params": self.params,
            "moments": {"mass": self.mass(), "K1": self.k1(), "K2": self.k2()},
            "support": [[list(x), w] for x, w in sorted(self.weights.items())],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh)


def _norm2(x) -> float:
    return float(sum(c * c for c in x))


def _profile_eval(prof: dict, u: np.ndarray) -> np.ndarray:
    """phi(u) = c_0 + sum_{m>=1} c_m cos(m u), coefficients as stored."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    for m, c in prof.items():
        out = out + (c if m == 0 else c * np.cos(m * u))
    return out


def profile_phi(prof: dict):
    """Return phi(u) as a callable (vectorized)."""
    return lambda u: _profile_eval(prof, np.asarray(u, dtype=float))


# -- constructors ----------------------------------------------------------


def nn_step(d: int) -> StepDistribution:
    """Nearest-neighbor step: weight 1/(2d) on the 2d unit vectors; K_1 = 1."""
    if d < 1:
        raise ValueError("need d >= 1")
    w = 1.0 / (2 * d)
    weights = {}
    for j in range(d):
        for s in (1, -1):
            x = [0] * d
            x[j] = s
            weights[tuple(x)] = w
    return StepDistribution(d, weights, kind="nearest-neighbor")


@dataclass(frozen=True)
class CounterexampleParams:
    """Parameters of the heavy-axial-cluster step law (d > 4).

    g(x) = g_amp * log(2+|x|)^g_pow  (slowly varying, divergent), and the
    cluster halo around +-l e_j has radius h(x)|x| with h = g^{-(1+eps)/d}.
    """

    d: int
    eps: float
    l_list: tuple
    g_amp: float = 1.0
    g_pow: float = 1.0

    def __post_init__(self):
        if self.d <= 4:
            raise ValueError("counterexample construction needs d > 4")
        if not 0 < self.eps < (self.d - 4) / 4:
            raise ValueError(
                f"need 0 < eps < (d-4)/4 = {(self.d-4)/4}, got {self.eps}"
            )
        if list(self.l_list) != sorted(set(int(l) for l in self.l_list)):
            raise ValueError("l_list must be strictly increasing positive integers")
        if self.l_list and self.l_list[0] < 2:
            raise ValueError("cluster sites must satisfy l >= 2")
        if self.g_amp <= 0:
            raise ValueError("g_amp must be positive")

    def g(self, r: float) -> float:
        return self.g_amp * math.log(2.0 + r) ** self.g_pow

    def h(self, r: float) -> float:
        return self.g(r) ** (-(1.0 + self.eps) / self.d)


def counterexample_step(params: CounterexampleParams) -> StepDistribution:
    """J = (1-delta)/(2d) on |x|=1 plus g(x)/|x|^{d+2} on the cluster set.

    The cluster set is the union of Euclidean balls of radius h(l)*l around
    the axis sites +-l e_j; delta is solved so the total mass is 1.
    Infeasible parameter sets raise with the violated constraint named.
    """
    d = params.d
    per_scale = cluster_site_map(params)
    cluster: dict[tuple, float] = {}
    scale_masses: dict[int, float] = {}
    for l, sites in per_scale.items():
        cluster.update(sites)
        scale_masses[l] = float(sum(sites.values()))
    delta = float(sum(cluster.values()))
    if delta >= 1.0:
        raise ValueError(
            f"cluster mass delta = {delta:.4f} >= 1: normalization infeasible "
            "(J >= 0 violated); shrink l_list halos or raise g_amp"
        )
    weights = dict(cluster)
    wnn = (1.0 - delta) / (2 * d)
    for j in range(d):
        for s in (1, -1):
            x = [0] * d
            x[j] = s
            x = tuple(x)
            if x in weights:
                raise ValueError("cluster halo overlaps the nearest-neighbor shell")
            weights[x] = wnn
    out = StepDistribution(
        d,
        weights,
        kind="counterexample",
        params={
            "eps": params.eps,
            "l_list": list(params.l_list),
            "g_amp": params.g_amp,
            "g_pow": params.g_pow,
            "delta": delta,
            "scale_masses": scale_masses,
        },
    )
    if out.k2() == math.inf:
        raise ValueError("K_2 diverges")  # unreachable on finite support; kept explicit
    return out


def cluster_site_map(params: CounterexampleParams) -> dict:
    """Per-scale halo sites: {l: {site: weight}} with the halo around all
    +-l e_j; overlaps across scales resolved first-claim (set union)."""
    d = params.d
    claimed: set = set()
    out: dict[int, dict] = {}
    for l in params.l_list:
        r_halo = params.h(l) * l
        if r_halo >= l - 1.5:
            raise ValueError(
                f"halo radius {r_halo:.2f} at l={l} reaches the origin/nn shell "
                "(violates J decomposition); increase g_amp or eps"
            )
        R = int(math.floor(r_halo))
        sites: dict[tuple, float] = {}
        for y in _ball_offsets(d, R, r_halo):
            z = (l + y[0],) + y[1:]
            r = math.sqrt(_norm2(z))
            w = params.g(r) / r ** (d + 2)
            for img in _axis_images(z):
                if img not in claimed:
                    claimed.add(img)
                    sites[img] = w
        out[l] = sites
    return out


def _ball_offsets(d: int, R: int, radius: float):
    """Integer offsets y with |y| <= radius (Euclidean), |y_i| <= R."""
    r2 = radius * radius
    for y in itertools.product(range(-R, R + 1), repeat=d):
        if sum(c * c for c in y) <= r2:
            yield y


def _axis_images(z: tuple):
    """Map a point near +l e_1 to its images near all +-l e_j: the axial
    coordinate z_0 moves to axis j with sign s, transverse ones fill the rest."""
    d = len(z)
    rest = list(z[1:])
    seen = set()
    for j in range(d):
        for s in (1, -1):
            img = rest[:j] + [s * z[0]] + rest[j:]
            seen.add(tuple(img))
    return seen


# -- moments and transform bounds ------------------------------------------


@dataclass(frozen=True)
class MomentReport:
    K0: float
    K1: float
    K2: float
    K2prime: float
    K3: float
    K3prime: float
    rho: float
    K0_argmin: tuple


def moments(J: StepDistribution, rho: float = 0.0, M: int = 32) -> MomentReport:
    """Moment constants; K_0 is the empirical grid infimum of
    2d (Jhat(0) - Jhat(k)) / |k|^2 over an origin-free k-sample."""
    ks = _k0_sample(J.d, M)
    budget = 50_000_000  # cap support * k evaluations; K_0 is a surrogate anyway
    if len(J.weights) * len(ks) > budget:
        stride = math.ceil(len(J.weights) * len(ks) / budget)
        ks = ks[::stride]
    vals = 2 * J.d * (J.mass() - J.jhat(ks)) / (ks**2).sum(axis=-1)
    i = int(np.argmin(vals))
    return MomentReport(
        K0=float(vals[i]),
        K1=J.k1(),
        K2=J.k2(),
        K2prime=J.k2prime(rho),
        K3=J.k3(0.0),
        K3prime=J.k3(rho),
        rho=rho,
        K0_argmin=tuple(float(c) for c in ks[i]),
    )


def _k0_sample(d: int, M: int) -> np.ndarray:
    grid = FourierGrid(d, M)
    if M**d <= 2_000_000:
        return grid.nodes()
    # large d: axis rays, low-|k| shell, and a deterministic bulk sample
    ax = grid.axis_nodes()
    chunks = []
    for j in range(d):
        rays = np.zeros((M, d))
        rays[:, j] = ax
        rays[:, (j + 1) % d] = ax[M // 2]  # keep off the excluded origin
        chunks.append(rays)
    rng = np.random.default_rng(12345)
    bulk = ax[rng.integers(0, M, size=(200_000, d))]
    chunks.append(bulk)
    small = ax[M // 2] * (rng.integers(0, 2, size=(20_000, d)) * 2 - 1)
    chunks.append(small)
    return np.concatenate(chunks, axis=0)


@dataclass(frozen=True)
class BoundReport:
    upper_ok: bool
    lower_ok: bool
    witness: tuple | None
    max_ratio_upper: float
    r2_over_k2_near_zero: float
    deriv1_ok: bool
    deriv2_ok: bool


def jhat_bounds_check(J: StepDistribution, grid: FourierGrid) -> BoundReport:
    """Verify 0 <= 1 - Jhat(k) <= K_2 |k|^2 / (2d) on every grid node,
    report the small-k remainder ratio and finite-difference derivative bounds.
    """
    d = J.d
    K2 = J.k2()
    if grid.M**d > 2_000_000:
        raise ValueError("grid too large for the exhaustive bound check")
    ks = grid.nodes()
    k2 = (ks**2).sum(axis=-1)
    one_minus = J.mass() - J.jhat(ks)
    upper = K2 * k2 / (2 * d)
    bad = np.where((one_minus < -1e-12) | (one_minus > upper + 1e-12))[0]
    witness = tuple(float(c) for c in ks[bad[0]]) if len(bad) else None

    # remainder Rhat_2 = (1 - Jhat) - K_1 |k|^2/(2d), looked at near k=0
    R2 = one_minus - J.k1() * k2 / (2 * d)
    near = k2 <= np.partition(k2, 2 * d)[2 * d] + 1e-12
    ratio_near = float(np.max(np.abs(R2[near]) / k2[near]))

    # derivative bounds (2.15) by central differences along axis 1
    h = 1e-6
    sample = ks[:: max(1, len(ks) // 512)].copy()
    e1 = np.zeros(d)
    e1[0] = h
    d1 = (J.jhat(sample + e1) - J.jhat(sample - e1)) / (2 * h)
    d2 = (J.jhat(sample + e1) - 2 * J.jhat(sample) + J.jhat(sample - e1)) / h**2
    k1abs = np.abs(sample[:, 0])
    deriv1_ok = bool(np.all(np.abs(d1) <= K2 / d * k1abs + 1e-6))
    deriv2_ok = bool(np.all(np.abs(d2) <= K2 / d + 1e-4))

    return BoundReport(
        upper_ok=bool(np.all(one_minus <= upper + 1e-12)),
        lower_ok=bool(np.all(one_minus >= -1e-12)),
        witness=witness,
        max_ratio_upper=float(np.max(one_minus / np.maximum(upper, 1e-300))),
        r2_over_k2_near_zero=ratio_near,
        deriv1_ok=deriv1_ok,
        deriv2_ok=deriv2_ok,
    )
