"""Finite representations of Z^d-symmetric functions on a periodic box.

A field lives on the torus {-(L-1)/2, ..., (L-1)/2}^d with odd side L and
periodic wrap.  Values are stored in "wrapped" index order (coordinate x maps
to array index x mod L), which makes circular convolution via the FFT exact.
Everything here is immutable after construction and pure.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LatticeField",
    "FourierGrid",
    "delta_field",
    "convolve",
    "convolution_power",
    "weighted_field",
    "fourier_eval",
    "save_field",
    "load_field",
    "export_csv",
]

#: boxes at most this many sites use the direct double sum (the oracle path)
DIRECT_CONV_CUTOFF = 4096


def axis_coords(L: int) -> np.ndarray:
    """Signed coordinates along one axis, in wrapped storage order."""
    c = np.arange(L)
    return np.where(c <= (L - 1) // 2, c, c - L)


def _coord_grids(d: int, L: int):
    return np.meshgrid(*([axis_coords(L)] * d), indexing="ij", sparse=True)


@dataclass(frozen=True)
class LatticeField:
    d: int
    L: int
    values: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        if self.L % 2 == 0 or self.L < 1:
            raise ValueError(f"side length must be odd and positive, got L={self.L}")
        if self.values.shape != (self.L,) * self.d:
            raise ValueError(
                f"values shape {self.values.shape} does not match (L,)*d = {(self.L,)*self.d}"
            )
        if not np.all(np.isfinite(self.values)):
            raise FloatingPointError("field contains non-finite values")

    # -- access ---------------------------------------------------------

    @property
    def radius(self) -> int:
        return (self.L - 1) // 2

    def at(self, x) -> float:
        """Value at lattice point x (any integers; wrapped onto the torus)."""
        idx = tuple(int(c) % self.L for c in x)
        return float(self.values[idx])

    def total(self) -> float:
        return float(self.values.sum())

    def norm_grid(self) -> np.ndarray:
        """|x| on the box, wrapped storage order."""
        grids = _coord_grids(self.d, self.L)
        return np.sqrt(sum(g.astype(float) ** 2 for g in grids))

    def support_points(self):
        """Iterate (point, value) over nonzero sites."""
        it = np.nditer(self.values, flags=["multi_index"])
        coords = axis_coords(self.L)
        for v in it:
            if v != 0:
                yield tuple(int(coords[i]) for i in it.multi_index), float(v)

    def support_radius(self) -> float:
        """Max |x| over the support (0 for the zero field)."""
        r = 0.0
        for x, _ in self.support_points():
            r = max(r, math.sqrt(sum(c * c for c in x)))
        return r

    # -- symmetry -------------------------------------------------------

    def check_symmetry(self, n_samples: int = 256, rng=None, rtol: float = 1e-12) -> bool:
        """Sampled orbit check of Z^d-symmetry (permutations and sign flips)."""
        rng = np.random.default_rng(0 if rng is None else rng)
        R = self.radius
        for _ in range(n_samples):
            x = tuple(int(v) for v in rng.integers(-R, R + 1, size=self.d))
            ref = self.at(x)
            perm = rng.permutation(self.d)
            signs = rng.integers(0, 2, size=self.d) * 2 - 1
            y = tuple(int(signs[i]) * x[perm[i]] for i in range(self.d))
            if not math.isclose(self.at(y), ref, rel_tol=rtol, abs_tol=1e-300):
                return False
        return True

    def symmetrized(self) -> "LatticeField":
        """Average over the full Z^d-symmetry group (use for small d only)."""
        acc = np.zeros_like(self.values, dtype=float)
        count = 0
        for perm in itertools.permutations(range(self.d)):
            transposed = np.transpose(self.values, perm)
            for signs in itertools.product((1, -1), repeat=self.d):
                v = transposed
                for ax, s in enumerate(signs):
                    if s < 0:
                        v = np.flip(v, axis=ax)
                        v = np.roll(v, 1, axis=ax)  # keep index 0 at coordinate 0
                acc += v
                count += 1
        return LatticeField(self.d, self.L, acc / count, symmetric=True)


def delta_field(d: int, L: int) -> LatticeField:
    v = np.zeros((L,) * d)
    v[(0,) * d] = 1.0
    return LatticeField(d, L, v, symmetric=True)


def field_from_dict(d: int, L: int, weights: dict, symmetric: bool = True) -> LatticeField:
    v = np.zeros((L,) * d)
    R = (L - 1) // 2
    for x, w in weights.items():
        if any(abs(c) > R for c in x):
            raise ValueError(f"point {x} outside box of radius {R}")
        v[tuple(int(c) % L for c in x)] += w
    return LatticeField(d, L, v, symmetric=symmetric)


# -- convolution ---------------------------------------------------------


def _check_match(f: LatticeField, g: LatticeField):
    if f.d != g.d or f.L != g.L:
        raise ValueError(
            f"field shape mismatch: (d={f.d}, L={f.L}) vs (d={g.d}, L={g.L})"
        )


def convolve(f: LatticeField, g: LatticeField, method: str = "auto") -> LatticeField:
    """Periodic convolution (f*g)(x) = sum_y f(x-y) g(y) on the shared torus."""
    _check_match(f, g)
    n = f.L**f.d
    if method == "auto":
        method = "direct" if n <= DIRECT_CONV_CUTOFF else "fft"
    if method == "direct":
        out = _convolve_direct(f.values, g.values)
    elif method == "fft":
        out = np.fft.ifftn(np.fft.fftn(f.values) * np.fft.fftn(g.values)).real
    else:
        raise ValueError(f"unknown convolution method {method!r}")
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("convolution overflowed to non-finite values")
    return LatticeField(f.d, f.L, out, symmetric=f.symmetric and g.symmetric)


def _convolve_direct(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Direct double sum; exact up to roundoff, used as the oracle."""
    out = np.zeros_like(a, dtype=float)
    it = np.nditer(b, flags=["multi_index"])
    with np.errstate(over="ignore"):  # overflow surfaces as the error below
        for v in it:
            if v != 0:
                out += float(v) * np.roll(a, it.multi_index, axis=range(a.ndim))
    return out


def convolution_power(f: LatticeField, n: int, method: str = "auto") -> LatticeField:
    """n-fold convolution f^{(*n)} by repeated squaring; n=0 gives delta_0."""
    if n < 0:
        raise ValueError("convolution power needs n >= 0")
    result = delta_field(f.d, f.L)
    base = f
    k = n
    while k:
        if k & 1:
            result = convolve(result, base, method=method)
        k >>= 1
        if k:
            base = convolve(base, base, method=method)
    return result


# -- pointwise weights ----------------------------------------------------


def weighted_field(f: LatticeField, alpha: float, axis: int | None = None) -> LatticeField:
    """Multiply pointwise by |x|^alpha (axis=None) or |x_axis|^alpha.

    alpha=0 returns f unchanged; for alpha>0 the origin weight is 0.
    """
    if alpha < 0:
        raise ValueError(f"weight exponent must be nonnegative, got {alpha}")
    if alpha == 0:
        return f
    if axis is None:
        w = f.norm_grid() ** alpha
        sym = f.symmetric
    else:
        if not 0 <= axis < f.d:
            raise ValueError(f"axis {axis} out of range for d={f.d}")
        shape = [1] * f.d
        shape[axis] = f.L
        w = np.abs(axis_coords(f.L)).astype(float).reshape(shape) ** alpha
        w = np.broadcast_to(w, f.values.shape)
        sym = False
    return LatticeField(f.d, f.L, f.values * w, symmetric=sym)


# -- Fourier grid ---------------------------------------------------------


@dataclass(frozen=True)
class FourierGrid:
    """Midpoint k-grid: k_j in {2*pi*(m+1/2)/M - pi}, m = 0..M-1.

    No node ever equals 0, so 1/(1-Jhat) is safe to evaluate everywhere.
    """

    d: int
    M: int
    origin_excluded: bool = field(default=True, init=False)

    def __post_init__(self):
        if self.M < 2:
            raise ValueError("need at least M=2 points per axis")

    def axis_nodes(self) -> np.ndarray:
        m = np.arange(self.M)
        return 2.0 * np.pi * (m + 0.5) / self.M - np.pi

    def positive_nodes(self) -> np.ndarray:
        """For even M the nodes pair as +-k; return the positive half."""
        if self.M % 2:
            raise ValueError("positive-half reduction needs even M")
        nodes = self.axis_nodes()
        return nodes[self.M // 2:]

    def nodes(self) -> np.ndarray:
        """Full tensor grid, shape (M^d, d). Only for small M^d."""
        ax = self.axis_nodes()
        grids = np.meshgrid(*([ax] * self.d), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)


def fourier_eval(f: LatticeField, grid: FourierGrid) -> np.ndarray:
    """fhat(k) = sum_x f(x) e^{-i k.x} on the tensor grid, shape (M,)*d.

    For symmetric f the imaginary part vanishes and a real array is returned.
    """
    if grid.d != f.d:
        raise ValueError(f"grid dimension {grid.d} != field dimension {f.d}")
    coords = axis_coords(f.L).astype(float)
    k = grid.axis_nodes()
    if f.symmetric:
        mats = [np.cos(np.outer(coords, k))]  # same matrix for every axis
        out = f.values.astype(float)
    else:
        mats = [np.exp(-1j * np.outer(coords, k))]
        out = f.values.astype(complex)
    E = mats[0]
    for _ in range(f.d):
        # contract leading coordinate axis against the node matrix;
        # the transformed axis moves to the end, restoring order after d steps
        out = np.tensordot(out, E, axes=([0], [0]))
    return out


# -- serialization --------------------------------------------------------


def save_field(f: LatticeField, path: str) -> None:
    """Self-describing .npz: header (d, L, symmetric) plus row-major values."""
    header = json.dumps({"d": f.d, "L": f.L, "symmetric": bool(f.symmetric)})
    np.savez_compressed(path, header=np.array(header), values=f.values)


def load_field(path: str) -> LatticeField:
    with np.load(path, allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        values = np.array(data["values"])
    return LatticeField(header["d"], header["L"], values, symmetric=header["symmetric"])


def export_csv(f: LatticeField, path: str, skip_zeros: bool = False) -> None:
    """Rows (x_1, ..., x_d, value) for plotting."""
    coords = axis_coords(f.L)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{i+1}" for i in range(f.d)] + ["value"])
        it = np.nditer(f.values, flags=["multi_index"])
        for v in it:
            if skip_zeros and v == 0:
                continue
            w.writerow([int(coords[i]) for i in it.multi_index] + [repr(float(v))])
