"""Heat-kernel machinery for axis-supported step distributions.

For a step J whose Fourier transform splits as Jhat(k) = sum_j phi(k_j),
the heat factor e^{-t(1 - Jhat(k))} factorizes over axes, so

    I_t(x) = e^{-t mu} prod_j b_t(x_j),      mu = 1 - Jhat(0),
    b_t(n) = (1/2pi) int_{-pi}^{pi} cos(n k) e^{t(phi(k) - phi(0))} dk.

The b_t(n) tables are computed for all n at once by an rFFT of the periodic
integrand: the trapezoid rule on an analytic periodic function is spectrally
accurate.  Green-type values follow from 1/A^{m+1} = int t^m/m! e^{-tA} dt:

    C^{*(m+1)}(x) = int_0^inf t^m/m! e^{-t mu} I~_t(x) dt,

integrated on Gauss-Legendre panels (one panel at [0, t0], geometric above)
with an analytic local-CLT Gaussian tail beyond the table.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

from .steps import StepDistribution, _profile_eval

__all__ = ["AxisHeatEngine", "heat_kernel_gaussian"]


def heat_kernel_gaussian(d: int, K1: float, t, x_norm2) -> np.ndarray:
    """Leading local-CLT form (d/(2 pi K1 t))^{d/2} exp(-d |x|^2 / (2 t K1))."""
    t = np.asarray(t, dtype=float)
    return (d / (2 * np.pi * K1 * t)) ** (d / 2) * np.exp(-d * x_norm2 / (2 * t * K1))


def _panel_nodes(t_min: float, t_max: float, t_geo: float, n_panels: int, order: int):
    """Gauss-Legendre nodes/weights on [t_min, t_max]: a single panel up to
    t_geo, geometric panels after (the integrand is analytic in t)."""
    lo = max(t_min, 0.0)
    edges = [lo]
    start = max(lo, t_geo)
    if lo < t_geo:
        edges.append(min(t_geo, t_max))
    if t_max > start:
        edges.extend(np.geomspace(start, t_max, n_panels + 1)[1:])
    edges = np.unique(np.asarray(edges, dtype=float))
    x, w = leggauss(order)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (a + b))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


class AxisHeatEngine:
    """Per-axis heat factors and t-integrals for an axis-supported step."""

    def __init__(self, J: StepDistribution, t_geo=1e-2, t_hi=1e6,
                 n_panels=72, order=16, n_fft=8192):
        prof = J.axis_profile()
        if prof is None:
            raise ValueError("step distribution is not axis-supported")
        self.J = J
        self.d = J.d
        self.profile = prof
        self.mu = 1.0 - J.mass()
        if self.mu < -1e-12:
            raise ValueError(f"supercritical mass {J.mass()}")
        self.n_fft = n_fft
        self.t_geo, self.t_hi = float(t_geo), float(t_hi)
        self.n_panels, self.order = n_panels, order
        k = 2 * np.pi * np.arange(n_fft) / n_fft
        self.phi0 = float(_profile_eval(prof, np.array([0.0]))[0])
        self._phi_shift = _profile_eval(prof, k) - self.phi0  # <= 0
        self.axis_var = float(sum(m * m * c for m, c in prof.items()))
        self.K1 = self.J.k1()
        self._tables: dict = {}

    # -- tables -------------------------------------------------------------

    def _table(self, t_min: float, t_max: float):
        key = (round(float(t_min), 12), round(float(t_max), 12))
        if key not in self._tables:
            ts, tw = _panel_nodes(t_min, t_max, self.t_geo, self.n_panels, self.order)
            b = np.fft.rfft(np.exp(np.outer(ts, self._phi_shift)), axis=1).real / self.n_fft
            if len(self._tables) > 16:
                self._tables.clear()
            self._tables[key] = (ts, tw, b)
        return self._tables[key]

    def heat_kernel(self, t: float, points) -> np.ndarray:
        """I_t(x) (exact at this t, not interpolated)."""
        pts = self._as_points(points)
        b = np.fft.rfft(np.exp(t * self._phi_shift)).real / self.n_fft
        out = np.full(len(pts), math.exp(-t * self.mu))
        for j in range(self.d):
            out *= b[pts[:, j]]
        return out

    def _as_points(self, points) -> np.ndarray:
        pts = np.abs(np.asarray(points, dtype=np.int64))
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.size and pts.max() >= self.n_fft // 2:
            raise ValueError("coordinate exceeds heat-table resolution; raise n_fft")
        return pts

    # -- Green-type integrals -------------------------------------------------

    def green_m_fold(self, points, m: int = 0, t_min: float = 0.0,
                     t_max: float | None = None, with_tail: bool | None = None,
                     chunk: int = 16384):
        """int_{t_min}^{t_max} t^m/m! e^{-t mu} I~_t(x) dt (+ Gaussian tail).

        m=0 gives C(x); m=1 gives (C*C)(x).  Returns (values, diagnostics).
        """
        pts = self._as_points(points)
        capped = t_max is not None and t_max < self.t_hi
        hi = t_max if capped else self.t_hi
        if with_tail is None:
            with_tail = not capped
        ts, tw, b = self._table(t_min, hi)
        damp = np.exp(-ts * self.mu) if self.mu > 0 else np.ones_like(ts)
        integ = tw * ts**m / math.factorial(m) * damp
        vals = np.empty(len(pts))
        for lo_i in range(0, len(pts), chunk):
            blk = pts[lo_i:lo_i + chunk]
            fac = np.ones((len(ts), len(blk)))
            for j in range(self.d):
                fac *= b[:, blk[:, j]]
            vals[lo_i:lo_i + chunk] = integ @ fac
        tail = np.zeros(len(pts))
        if with_tail:
            tail = self._gaussian_tail(pts, m, hi)
            vals = vals + tail
        diag = {"tail_max": float(tail.max(initial=0.0)),
                "t_range": (float(t_min), float(hi)), "tail_added": bool(with_tail)}
        return vals, diag

    def _gaussian_tail(self, pts, m, T):
        """int_T^inf t^m/m! e^{-t mu} (2 pi t v)^{-d/2} e^{-|x|^2/(2tv)} dt,
        closed incomplete-gamma form.  With a mass defect the exponential
        kills the tail outright; at criticality it needs m < d/2 - 1."""
        v = self.axis_var
        x2 = (pts.astype(float) ** 2).sum(axis=1)
        s = self.d / 2 - m
        pref = (2 * np.pi * v) ** (-self.d / 2) / math.factorial(m)
        if self.mu > 1e-12:
            if self.mu * T > 50:
                return np.zeros(len(pts))
            # drop e^{-beta/t} <= 1: int_T^inf t^{-s} e^{-mu t} dt per point
            from scipy.integrate import quad

            val, _ = quad(lambda t: t**-s * math.exp(-t * self.mu), T, np.inf,
                          limit=200)
            return pref * val * np.ones(len(pts))
        if s <= 1:
            raise ValueError(
                "tail integral diverges at criticality: need m < d/2 - 1"
            )
        beta = x2 / (2 * v)
        safe = np.where(beta == 0, 1.0, beta)  # avoid 0^(1-s) in the dead branch
        out = np.where(
            beta == 0,
            T ** (1 - s) / (s - 1),
            safe ** (1 - s) * special.gammainc(s - 1, beta / T) * special.gamma(s - 1),
        )
        return pref * out

    def green(self, points):
        return self.green_m_fold(points, m=0)

    def green_split(self, x, T: float):
        """(C_<, C_>): t-integral split at T with panel edges aligned to T."""
        x = np.asarray(x, dtype=np.int64)
        less, _ = self.green_m_fold(x[None, :], m=0, t_min=0.0, t_max=T)
        greater, diag = self.green_m_fold(x[None, :], m=0, t_min=T, with_tail=True)
        return float(less[0]), float(greater[0]), diag
