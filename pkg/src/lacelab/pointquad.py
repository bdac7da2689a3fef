"""Symmetry-reduced midpoint-grid quadrature for axis-split integrands.

Evaluates sums of the form

    S(x) = (1/M^d) sum_{k in midpoint grid} [prod_j cos(k_j x_j)] Psi(k)

where Psi depends on k only through per-axis profile sums
A_p(k) = sum_j phi_p(k_j) (one A per registered profile).  This covers
1/(1 - Jhat) and ghat/(1 - Jhat) for axis-supported J, g.

The passive axes (x_j = 0) are collapsed into a weighted multiset of the
(d - p)-fold sums of phi over the positive half-grid: combinations with
repetition, counted with multinomial permutation weights and the 2^(d-p)
sign factor.  Points with at most two nonzero coordinates are supported;
the per-node inner sums are cached so any number of points along an axis
(or a 2-axis diagonal) costs O(M) after the first.
"""

from __future__ import annotations

import math

import numpy as np

from .steps import _profile_eval

__all__ = ["AxisPointQuadrature"]

_COMBO_CACHE: dict = {}


def _combinations_with_replacement(n: int, q: int) -> np.ndarray:
    """All nondecreasing q-tuples over range(n), shape (C(n+q-1, q), q)."""
    key = (n, q)
    if key in _COMBO_CACHE:
        return _COMBO_CACHE[key]
    rows = np.arange(n, dtype=np.int32)[:, None]
    for _ in range(1, q):
        last = rows[:, -1]
        reps = n - last
        total = int(reps.sum())
        expanded = np.repeat(rows, reps, axis=0)
        offsets = np.zeros(len(rows), dtype=np.int64)
        np.cumsum(reps[:-1], out=offsets[1:])
        newcol = (np.arange(total, dtype=np.int64)
                  - np.repeat(offsets, reps)
                  + np.repeat(last.astype(np.int64), reps)).astype(np.int32)
        rows = np.concatenate([expanded, newcol[:, None]], axis=1)
    if len(_COMBO_CACHE) > 8:
        _COMBO_CACHE.clear()
    _COMBO_CACHE[key] = rows
    return rows


def _permutation_counts(rows: np.ndarray) -> np.ndarray:
    """q!/prod(multiplicity!) for each nondecreasing row."""
    q = rows.shape[1]
    denom = np.ones(len(rows))
    run = np.ones(len(rows))
    for t in range(1, q):
        eq = rows[:, t] == rows[:, t - 1]
        run = np.where(eq, run + 1, 1.0)
        denom *= np.where(eq, run, 1.0)
    return math.factorial(q) / denom


class AxisPointQuadrature:
    """Point evaluator on the d-dimensional midpoint grid of order M (even).

    profiles: list of axis profiles ({m: cos-coefficient} dicts); psi maps a
    tuple of per-profile sum arrays to the integrand values.
    """

    def __init__(self, d: int, M: int, profiles, psi, chunk: int = 4_000_000):
        if M % 2:
            raise ValueError("points-mode quadrature needs even M")
        self.d, self.M = d, M
        self.psi = psi
        self.chunk = chunk
        m = np.arange(M // 2)
        self.kappa = 2.0 * np.pi * (m + 0.5) / M  # positive half-nodes
        self.phi = [np.ascontiguousarray(_profile_eval(p, self.kappa))
                    for p in profiles]
        self._inner: dict = {}
        self._passive: dict = {}

    # -- passive-axis multisets ---------------------------------------------

    def _passive_sums(self, q: int):
        """(weights, [per-profile sums]) over the q-fold positive half-grid."""
        if q not in self._passive:
            if q == 0:
                self._passive[q] = (np.ones(1), [np.zeros(1) for _ in self.phi])
            else:
                rows = _combinations_with_replacement(self.M // 2, q)
                w = _permutation_counts(rows) * 2.0**q
                sums = [phi[rows].sum(axis=1) for phi in self.phi]
                self._passive[q] = (w, sums)
        return self._passive[q]

    # -- inner tables ---------------------------------------------------------

    def _inner1(self) -> np.ndarray:
        """inner[i] = sum over passive multisets of w * Psi(u_i + V)."""
        if 1 not in self._inner:
            w, sums = self._passive_sums(self.d - 1)
            out = np.empty(self.M // 2)
            for i in range(self.M // 2):
                args = [phi[i] + V for phi, V in zip(self.phi, sums)]
                acc = 0.0
                for lo in range(0, len(w), self.chunk):
                    sl = slice(lo, lo + self.chunk)
                    acc += float(np.dot(w[sl], self.psi(*[a[sl] for a in args])))
                out[i] = acc
            self._inner[1] = out
        return self._inner[1]

    def _inner2(self) -> np.ndarray:
        """inner[i, i'] for two active axes (symmetric)."""
        if 2 not in self._inner:
            w, sums = self._passive_sums(self.d - 2)
            n = self.M // 2
            out = np.empty((n, n))
            for i in range(n):
                for lo in range(0, len(w), self.chunk):
                    sl = slice(lo, lo + self.chunk)
                    block = 0.0
                    args = [phi[i] + V[sl][None, :] + phi[:, None]
                            for phi, V in zip(self.phi, sums)]
                    block = self.psi(*args) @ w[sl]
                    if lo == 0:
                        acc = block
                    else:
                        acc += block
                out[i] = acc
            self._inner[2] = out
        return self._inner[2]

    # -- evaluation ------------------------------------------------------------

    def value(self, x) -> float:
        """S(x) for a point with at most two nonzero coordinates."""
        nz = [int(c) for c in x if c]
        norm = float(self.M) ** self.d
        if len(nz) == 0:
            w, sums = self._passive_sums(self.d)
            acc = 0.0
            for lo in range(0, len(w), self.chunk):
                sl = slice(lo, lo + self.chunk)
                acc += float(np.dot(w[sl], self.psi(*[V[sl] for V in sums])))
            return acc / norm
        if len(nz) == 1:
            inner = self._inner1()
            cosv = 2.0 * np.cos(self.kappa * abs(nz[0]))
            return float(np.dot(cosv, inner)) / norm
        if len(nz) == 2:
            inner = self._inner2()
            c1 = 2.0 * np.cos(self.kappa * abs(nz[0]))
            c2 = 2.0 * np.cos(self.kappa * abs(nz[1]))
            return float(c1 @ inner @ c2) / norm
        raise ValueError(
            "points-mode quadrature supports at most 2 nonzero coordinates; "
            f"got {x} (use the heat-kernel solver for general points)"
        )

    def values(self, points) -> np.ndarray:
        return np.array([self.value(x) for x in points])
