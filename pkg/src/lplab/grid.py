"""Band-limited periodic fields stored as Fourier coefficients.

The whole-space setting is discretized as a large periodic box of side
``period``; a field is the finite Fourier series

    f(x) = sum_k c_k exp(i xi_k . x),     xi_k = (2 pi / period) k,

with integer lattice indices k in [-n/2, n/2) per axis, stored in numpy
FFT order.  Physical samples are recovered as ``ifftn(c) * n**dim``.  The
unitary continuum Fourier transform corresponds to these coefficients via
``fhat(xi_k) = (2 pi)**(dim/2) * (period / 2 pi)**dim * c_k``; every
operation below that quotes a continuum formula states which convention
it uses.

All operations are pure: fields are never mutated, and everything here is
safe to share between threads.
"""
from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass

import numpy as np

FIELD_MAGIC = b"SPECFLD1"


class AliasingError(ValueError):
    """Raised when an operation would push frequency content past Nyquist."""


@dataclass(frozen=True)
class GridSpec:
    """Periodic grid: ``points_per_axis`` samples per axis on a box of side ``period``."""
    dim: int
    points_per_axis: int
    period: float

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        n = self.points_per_axis
        if n < 8 or (n & (n - 1)) != 0:
            raise ValueError(f"points_per_axis must be a power of two >= 8, got {n}")
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period}")

    @property
    def n(self) -> int:
        return self.points_per_axis

    @property
    def freq_step(self) -> float:
        return 2.0 * np.pi / self.period

    @property
    def nyquist_index(self) -> int:
        return self.points_per_axis // 2

    @property
    def nyquist(self) -> float:
        return self.nyquist_index * self.freq_step

    @property
    def half_nyquist_index(self) -> int:
        # strict bound: sums of two such indices stay below n/2 per axis,
        # so bilinear outputs never wrap around the lattice
        return self.points_per_axis // 4 - 1

    @property
    def cell_volume(self) -> float:
        return (self.period / self.points_per_axis) ** self.dim

    @property
    def box_volume(self) -> float:
        return self.period ** self.dim

    def k_axis(self) -> np.ndarray:
        """Integer lattice indices along one axis, FFT order."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)

    def k_components(self):
        """dim arrays of shape (n,)*dim with the integer index of each axis."""
        return _grid_cache(self)["k_components"]

    def freq_components(self):
        """dim arrays with the physical frequency of each lattice point."""
        return tuple(self.freq_step * k for k in self.k_components())

    def freq_radii_sq(self) -> np.ndarray:
        """|xi|^2 on the lattice, shape (n,)*dim."""
        return _grid_cache(self)["radii_sq"]

    def freq_radii(self) -> np.ndarray:
        return _grid_cache(self)["radii"]

    def k_chebyshev(self) -> np.ndarray:
        """max_i |k_i| per lattice point (controls aliasing of products)."""
        return _grid_cache(self)["k_cheb"]


_GRID_CACHE: dict = {}


def _grid_cache(grid: GridSpec) -> dict:
    key = (grid.dim, grid.points_per_axis, grid.period)
    entry = _GRID_CACHE.get(key)
    if entry is None:
        k = grid.k_axis()
        mesh = np.meshgrid(*([k] * grid.dim), indexing="ij")
        radii_sq = sum((grid.freq_step * m.astype(float)) ** 2 for m in mesh)
        entry = {
            "k_components": tuple(mesh),
            "radii_sq": radii_sq,
            "radii": np.sqrt(radii_sq),
            "k_cheb": np.maximum.reduce([np.abs(m) for m in mesh]),
        }
        _GRID_CACHE[key] = entry
    return entry


@dataclass
class SpectralField:
    """Fourier coefficients of a band-limited field on a periodic grid.

    ``coef`` has shape (ncomp,) + (n,)*dim in FFT index order, with
    ncomp = 1 for scalar fields and ncomp = dim for vector fields.
    """
    grid: GridSpec
    coef: np.ndarray
    tag: str = "scalar"

    def __post_init__(self):
        n = self.grid.n
        expected = (1 if self.tag == "scalar" else self.grid.dim,) + (n,) * self.grid.dim
        if self.tag not in ("scalar", "vector"):
            raise ValueError(f"tag must be scalar or vector, got {self.tag!r}")
        if self.coef.shape != expected:
            raise ValueError(f"coef shape {self.coef.shape}, expected {expected}")

    @property
    def ncomp(self) -> int:
        return self.coef.shape[0]

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coef.copy(), self.tag)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same_layout(self, other)
        return SpectralField(self.grid, self.coef + other.coef, self.tag)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same_layout(self, other)
        return SpectralField(self.grid, self.coef - other.coef, self.tag)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.grid, self.coef * scalar, self.tag)

    __rmul__ = __mul__


def _check_same_layout(a: SpectralField, b: SpectralField):
    if a.grid != b.grid or a.tag != b.tag:
        raise ValueError("fields live on different grids or have different tags")


def make_grid(dim: int, points_per_axis: int, period: float) -> GridSpec:
    """Grid whose frequency lattice is (2 pi / period) Z^dim, truncated symmetrically."""
    return GridSpec(dim, points_per_axis, period)


def zero_field(grid: GridSpec, tag: str = "scalar") -> SpectralField:
    ncomp = 1 if tag == "scalar" else grid.dim
    return SpectralField(grid, np.zeros((ncomp,) + (grid.n,) * grid.dim, dtype=complex), tag)


def field_from_coef(grid: GridSpec, coef: np.ndarray, tag: str = "scalar") -> SpectralField:
    coef = np.asarray(coef, dtype=complex)
    if coef.ndim == grid.dim:
        coef = coef[None]
    return SpectralField(grid, coef, tag)


def mode_field(grid: GridSpec, k, amplitude=1.0, tag: str = "scalar",
               component: int = 0, real: bool = False) -> SpectralField:
    """Single Fourier mode at integer lattice index ``k`` (plus conjugate if real)."""
    f = zero_field(grid, tag)
    idx = tuple(int(ki) % grid.n for ki in k)
    f.coef[(component,) + idx] = amplitude
    if real:
        idx_neg = tuple((-int(ki)) % grid.n for ki in k)
        f.coef[(component,) + idx_neg] += np.conj(amplitude)
    return f


def to_physical(f: SpectralField) -> np.ndarray:
    """Physical samples on the grid, shape (ncomp,) + (n,)*dim (complex)."""
    axes = tuple(range(1, f.grid.dim + 1))
    return np.fft.ifftn(f.coef, axes=axes) * f.grid.n ** f.grid.dim


def from_physical(grid: GridSpec, samples: np.ndarray, tag: str = "scalar") -> SpectralField:
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim == grid.dim:
        samples = samples[None]
    axes = tuple(range(1, grid.dim + 1))
    coef = np.fft.fftn(samples, axes=axes) / grid.n ** grid.dim
    return SpectralField(grid, coef, tag)


def heat_propagate(f: SpectralField, t: float) -> SpectralField:
    """Multiply each coefficient by exp(-t |xi|^2); t = 0 is the identity."""
    if t < 0:
        raise ValueError(f"heat time must be nonnegative, got {t}")
    damp = np.exp(-t * f.grid.freq_radii_sq())
    return SpectralField(f.grid, f.coef * damp[None], f.tag)


def leray_project(f: SpectralField) -> SpectralField:
    """Project onto divergence-free fields: c(xi) -> c - xi (xi . c) / |xi|^2.

    The zero mode is left untouched (P(0) := identity); a nonzero mean on a
    vector field triggers a warning since divergence-free periodic
    surrogates are taken mean-free.  Conjugate symmetry (real-valuedness)
    is preserved below the Nyquist shell; the unpaired Nyquist rows alias
    +-nyquist and the projector does not treat them symmetrically.
    """
    if f.tag != "vector":
        raise ValueError("leray_project requires a vector-tagged field")
    freqs = f.grid.freq_components()
    r2 = f.grid.freq_radii_sq().copy()
    origin = (0,) * f.grid.dim
    dc = np.max(np.abs(f.coef[(slice(None),) + origin]))
    peak = np.max(np.abs(f.coef))
    if dc > 1e-12 * max(peak, 1e-300):
        warnings.warn("leray_project: nonzero mean mode is left unprojected (P(0) = Id)")
    r2[origin] = 1.0  # avoid 0/0; numerator vanishes at the origin anyway
    dot = sum(freqs[i] * f.coef[i] for i in range(f.grid.dim))
    out = f.coef - np.stack([freqs[i] * dot / r2 for i in range(f.grid.dim)])
    return SpectralField(f.grid, out, f.tag)


def lp_norm(f: SpectralField, p: float) -> float:
    """Discrete L^p norm: Riemann sum over physical samples (sup for p = inf).

    Vector fields use the pointwise Euclidean magnitude.  For p = 2 this is
    Parseval-consistent: ||f||_2^2 = sum |c_k|^2 * period^dim.
    """
    if not (p >= 1):
        raise ValueError(f"p must be in [1, inf], got {p}")
    phys = to_physical(f)
    mag = np.sqrt(np.sum(np.abs(phys) ** 2, axis=0))
    if np.isinf(p):
        return float(mag.max())
    return float((np.sum(mag ** p) * f.grid.cell_volume) ** (1.0 / p))


def divergence_ratio(f: SpectralField) -> float:
    """max_xi |xi . c(xi)| / max_xi |c(xi)| (0 for the zero field)."""
    if f.tag != "vector":
        raise ValueError("divergence_ratio requires a vector field")
    freqs = f.grid.freq_components()
    dot = sum(freqs[i] * f.coef[i] for i in range(f.grid.dim))
    peak = np.max(np.abs(f.coef))
    if peak == 0:
        return 0.0
    return float(np.max(np.abs(dot)) / peak)


def _negated_index(n: int) -> np.ndarray:
    return (-np.arange(n)) % n


def reflected_coef(f: SpectralField) -> np.ndarray:
    """Coefficient array sampled at -xi (component-wise), FFT order."""
    idx = _negated_index(f.grid.n)
    out = f.coef
    for axis in range(1, f.grid.dim + 1):
        out = np.take(out, idx, axis=axis)
    return out


def conj_asymmetry(f: SpectralField) -> float:
    """max |c(-xi) - conj(c(xi))|, the deviation from real-valuedness."""
    return float(np.max(np.abs(reflected_coef(f) - np.conj(f.coef))))


def symmetrize_real(f: SpectralField) -> SpectralField:
    """Nearest conjugate-symmetric field (projects onto real physical fields)."""
    sym = 0.5 * (f.coef + np.conj(reflected_coef(f)))
    return SpectralField(f.grid, sym, f.tag)


def band_limit_chebyshev(f: SpectralField) -> int:
    """Largest per-axis |k_i| carrying a nonzero coefficient."""
    cheb = f.grid.k_chebyshev()
    mask = np.any(np.abs(f.coef) > 0, axis=0)
    if not mask.any():
        return 0
    return int(cheb[mask].max())


def require_half_nyquist(*fields: SpectralField):
    """Reject inputs whose bilinear products could alias past Nyquist."""
    for f in fields:
        limit = f.grid.half_nyquist_index
        got = band_limit_chebyshev(f)
        if got > limit:
            raise AliasingError(
                f"field occupies |k_i| <= {got}, beyond the half-Nyquist bound {limit}")


def band_limit_ball(f: SpectralField, k_radius: float) -> SpectralField:
    """Zero all coefficients with |k| > k_radius (integer-lattice radius)."""
    r = np.sqrt(sum(k.astype(float) ** 2 for k in f.grid.k_components()))
    keep = (r <= k_radius)
    return SpectralField(f.grid, f.coef * keep[None], f.tag)


def save_field(f: SpectralField, path):
    """Binary container: magic, JSON header, raw float64 re/im pairs.

    Coefficients are written component by component in row-major FFT index
    order, interleaved real/imaginary.
    """
    header = json.dumps({
        "dim": f.grid.dim,
        "points_per_axis": f.grid.points_per_axis,
        "period": f.grid.period,
        "tag": f.tag,
    }).encode()
    flat = np.empty(f.coef.size * 2, dtype="<f8")
    flat[0::2] = f.coef.real.ravel(order="C")
    flat[1::2] = f.coef.imag.ravel(order="C")
    with open(path, "wb") as fh:
        fh.write(FIELD_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(flat.tobytes())


def load_field(path) -> SpectralField:
    with open(path, "rb") as fh:
        magic = fh.read(len(FIELD_MAGIC))
        if magic != FIELD_MAGIC:
            raise ValueError(f"{path}: not a spectral field container")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode())
        raw = np.frombuffer(fh.read(), dtype="<f8")
    grid = GridSpec(header["dim"], header["points_per_axis"], header["period"])
    ncomp = 1 if header["tag"] == "scalar" else grid.dim
    shape = (ncomp,) + (grid.n,) * grid.dim
    coef = (raw[0::2] + 1j * raw[1::2]).reshape(shape)
    return SpectralField(grid, coef.copy(), header["tag"])
