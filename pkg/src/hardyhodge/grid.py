"""Fields sampled on uniform periodic grids, their spectra, and L^p norms.

The flat torus [0, L_1) x ... x [0, L_n) stands in for R^n. Forward DFTs are
unnormalized and inverse DFTs carry the 1/N factor (numpy convention); every
norm includes the cell volume so that Parseval reads

    lp_norm(f, 2)**2 == cell_volume / N * sum(|fft(f)|**2).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft

from .errors import DimensionMismatch, GridError, KindMismatch

KINDS = ("scalar", "paravector", "vector", "quaternion", "multivector")


def fft_workers() -> int:
    """Thread cap for FFTs, read from ``HHL_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("HHL_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class GridSpec:
    shape: tuple[int, ...]
    lengths: tuple[float, ...] | None = None

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        if not shape:
            raise GridError("grid needs at least one axis")
        for s in shape:
            if s < 4 or s % 2:
                raise GridError(f"every axis needs an even sample count >= 4, got {shape}")
        lengths = self.lengths
        if lengths is None:
            lengths = (2 * math.pi,) * len(shape)
        lengths = tuple(float(v) for v in lengths)
        if len(lengths) != len(shape):
            raise GridError("shape and lengths disagree in dimension")
        if any(not v > 0 for v in lengths):
            raise GridError(f"periods must be positive, got {lengths}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "lengths", lengths)

    @property
    def n(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / N for L, N in zip(self.lengths, self.shape))

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @property
    def volume(self) -> float:
        return math.prod(self.lengths)

    def axes(self) -> list[np.ndarray]:
        return [np.arange(N) * (L / N) for N, L in zip(self.shape, self.lengths)]

    def coordinates(self) -> list[np.ndarray]:
        """Sample coordinates as n broadcastable arrays."""
        return np.meshgrid(*self.axes(), indexing="ij", sparse=True)

    def mode_indices(self) -> list[np.ndarray]:
        """Signed integer mode index per axis, Nyquist at -N/2."""
        out = []
        for j, N in enumerate(self.shape):
            m = np.fft.fftfreq(N, d=1.0 / N).astype(np.int64)
            s = [1] * self.n
            s[j] = N
            out.append(m.reshape(s))
        return out

    def wavenumbers(self) -> list[np.ndarray]:
        """Angular wavenumbers kappa_j = 2 pi m_j / L_j, broadcastable."""
        return [2 * math.pi * m / L for m, L in zip(self.mode_indices(), self.lengths)]

    def to_dict(self) -> dict:
        return {"n": self.n, "shape": list(self.shape), "lengths": list(self.lengths)}

    @classmethod
    def from_dict(cls, d: dict) -> GridSpec:
        return cls(tuple(d["shape"]), tuple(d["lengths"]))

    def scaled(self, factor: int) -> GridSpec:
        """Same resolution over a period ``factor`` times larger."""
        return GridSpec(tuple(s * factor for s in self.shape), tuple(L * factor for L in self.lengths))


def component_count(kind: str, n: int) -> int:
    if kind == "scalar":
        return 1
    if kind in ("paravector", "vector"):
        return n + 1
    if kind == "quaternion":
        return 4
    if kind == "multivector":
        return 1 << n
    raise KindMismatch(f"unknown field kind {kind!r}")


@dataclass(frozen=True, eq=False)
class SampledField:
    """Real field on a grid, one array per algebra component.

    Component order by kind:

    * ``scalar``: ``[f]``
    * ``paravector``: ``[f_0, f_1, ..., f_n]`` (coefficients of 1, e_1, ..., e_n)
    * ``vector``: ``[f_1, ..., f_{n+1}]`` (coefficients of e_1, ..., e_{n+1})
    * ``quaternion``: ``[q_0, q_1, q_2, q_3]`` with e_3 = e_1 e_2
    * ``multivector``: all 2**n blades, bitmask order
    """

    spec: GridSpec
    kind: str
    components: np.ndarray

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=float)
        want = (component_count(self.kind, self.spec.n),) + self.spec.shape
        if comps.shape != want:
            raise DimensionMismatch(f"{self.kind} field on {self.spec.shape} needs shape {want}, got {comps.shape}")
        comps = np.array(comps, copy=True)
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)

    @classmethod
    def zeros(cls, spec: GridSpec, kind: str) -> SampledField:
        return cls(spec, kind, np.zeros((component_count(kind, spec.n),) + spec.shape))

    @property
    def n(self) -> int:
        return self.spec.n

    def __len__(self):
        return self.components.shape[0]

    def __getitem__(self, i):
        return self.components[i]

    def _like(self, comps) -> SampledField:
        return SampledField(self.spec, self.kind, comps)

    def _compatible(self, other: SampledField):
        if not isinstance(other, SampledField):
            raise TypeError(f"cannot combine SampledField with {type(other).__name__}")
        if other.spec != self.spec:
            raise DimensionMismatch("fields live on different grids")
        if other.kind != self.kind:
            raise KindMismatch(f"{self.kind} vs {other.kind}")

    def __add__(self, other):
        self._compatible(other)
        return self._like(self.components + other.components)

    def __sub__(self, other):
        self._compatible(other)
        return self._like(self.components - other.components)

    def __neg__(self):
        return self._like(-self.components)

    def __mul__(self, a):
        if not np.isscalar(a):
            return NotImplemented
        return self._like(self.components * a)

    __rmul__ = __mul__

    def means(self) -> np.ndarray:
        return self.components.reshape(len(self), -1).mean(axis=1)

    def norm(self, p: float = 2.0) -> float:
        return lp_norm(self, p)

    def pointwise_norm(self) -> np.ndarray:
        return np.sqrt(np.sum(self.components ** 2, axis=0))


@dataclass(frozen=True, eq=False)
class SpectralField:
    spec: GridSpec
    kind: str
    components: np.ndarray

    def to_sampled(self, check_real: bool = True, tol: float = 1e-13) -> SampledField:
        return SampledField(self.spec, self.kind, inverse_real(self.components, self.spec, check_real, tol))


def forward(arr: np.ndarray, n: int) -> np.ndarray:
    """Unnormalized DFT over the trailing ``n`` axes."""
    return scipy.fft.fftn(arr, axes=tuple(range(-n, 0)), workers=fft_workers())


def inverse(arr: np.ndarray, n: int) -> np.ndarray:
    return scipy.fft.ifftn(arr, axes=tuple(range(-n, 0)), workers=fft_workers())


class ImaginaryResidue(ArithmeticError):
    pass


def inverse_real(arr: np.ndarray, spec: GridSpec, check: bool = True, tol: float = 1e-13) -> np.ndarray:
    """Inverse DFT that must come back real; the imaginary residue is dropped."""
    out = inverse(arr, spec.n)
    if check:
        scale = float(np.max(np.abs(out.real), initial=0.0))
        resid = float(np.max(np.abs(out.imag), initial=0.0))
        if resid > tol * max(scale, 1e-300) and resid > 1e-300:
            raise ImaginaryResidue(f"imaginary residue {resid:.3e} exceeds {tol:g} x {scale:.3e}")
    return np.ascontiguousarray(out.real)


def to_spectral(f: SampledField) -> SpectralField:
    return SpectralField(f.spec, f.kind, forward(f.components, f.n))


def lp_norm(f: SampledField, p: float = 2.0) -> float:
    """Discrete L^p norm with the pointwise Clifford norm across components."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    mag = f.pointwise_norm()
    if math.isinf(p):
        return float(mag.max(initial=0.0))
    top = float(mag.max(initial=0.0))
    if top == 0.0:
        return 0.0
    # scale out the maximum so large p does not overflow
    return top * float(np.sum((mag / top) ** p) * f.spec.cell_volume) ** (1.0 / p)


def spectral_l2(hat: np.ndarray, spec: GridSpec) -> float:
    """L^2 norm of a grid function given by its (stacked) unnormalized DFT."""
    return math.sqrt(float(np.sum(np.abs(hat) ** 2)) * spec.cell_volume / spec.size)


def field_inner(f: SampledField, g: SampledField) -> float:
    """Euclidean L^2 pairing of coefficient fields."""
    f._compatible(g)
    return float(np.sum(f.components * g.components)) * f.spec.cell_volume


def relative(num: float, den: float) -> float:
    return num / den if den > 0 else num


@dataclass
class FieldProvenance:
    recipe: dict
    seed: int | None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"recipe": self.recipe, "seed": self.seed, "params": self.params}
