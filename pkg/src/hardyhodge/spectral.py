"""Fourier multipliers: Riesz transforms, the Clifford Hilbert transform H,
the Plemelj projections (I +- H)/2, and a direct-DFT reference.

R_k has multiplier ``-1j * kappa_k / |kappa|``. Conventions on the grid:

* DC (kappa = 0): every Riesz multiplier is 0.
* Nyquist: wavenumbers use the signed representative -N/2. On the plane
  ``kappa_k = -N_k/2`` the multiplier of R_k cannot be made odd, so it is set
  to 0 there; this is what keeps real inputs mapping to real outputs.
  Mean-zero fields without Nyquist content therefore satisfy H**2 = I exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .clifford import QUAT_TABLE, product_table
from .errors import DCViolation, KindMismatch, OracleSizeError
from .grid import GridSpec, SampledField, forward, inverse_real

DC_POLICIES = ("zero", "error", "tolerate")
ORACLE_MAX_POINTS = 4096


@dataclass(frozen=True, eq=False)
class MultiplierPlan:
    spec: GridSpec
    dc_policy: str
    eps: float
    kappa: tuple[np.ndarray, ...]
    kmag: np.ndarray
    unit: tuple[np.ndarray, ...]
    nyquist: tuple[np.ndarray, ...]

    def riesz_multiplier(self, k: int) -> np.ndarray:
        return -1j * self.unit[k - 1]

    def derivative_multiplier(self, k: int) -> np.ndarray:
        """Spectral d/dx_k, with the unsymmetrizable Nyquist plane zeroed."""
        return np.where(self.nyquist[k - 1], 0.0, 1j * self.kappa[k - 1])

    def check_dc(self, f: SampledField, components=None) -> None:
        """Raise DCViolation if the policy forbids the means found in ``f``."""
        if self.dc_policy == "zero":
            return
        comps = range(len(f)) if components is None else components
        scale = float(np.max(np.abs(f.components), initial=0.0))
        means = f.means()
        for c in comps:
            if abs(means[c]) > self.eps * max(scale, 1e-300) and abs(means[c]) > 0:
                raise DCViolation(
                    f"component {c} of {f.kind} field has mean {means[c]:.3e}; "
                    f"dc policy {self.dc_policy!r} allows at most {self.eps:g} relative"
                )


@lru_cache(maxsize=32)
def _build(spec: GridSpec, dc_policy: str, eps: float) -> MultiplierPlan:
    kappa = tuple(np.broadcast_to(k, spec.shape).astype(float) for k in spec.wavenumbers())
    kmag = np.sqrt(sum(k ** 2 for k in kappa))
    safe = np.where(kmag == 0, 1.0, kmag)
    nyquist = tuple(np.broadcast_to(m == -(N // 2), spec.shape)
                    for m, N in zip(spec.mode_indices(), spec.shape))
    unit = tuple(np.where((kmag == 0) | nyq, 0.0, k / safe) for k, nyq in zip(kappa, nyquist))
    for a in kappa + unit + nyquist + (kmag,):
        a.setflags(write=False)
    return MultiplierPlan(spec, dc_policy, eps, kappa, kmag, unit, nyquist)


def make_plan(spec: GridSpec, dc_policy: str = "zero", eps: float = 1e-12) -> MultiplierPlan:
    if dc_policy not in DC_POLICIES:
        raise ValueError(f"dc policy must be one of {DC_POLICIES}, got {dc_policy!r}")
    return _build(spec, dc_policy, float(eps))


def _plan(f: SampledField, plan: MultiplierPlan | None) -> MultiplierPlan:
    if plan is None:
        return make_plan(f.spec)
    if plan.spec != f.spec:
        raise KindMismatch("plan was built for a different grid")
    return plan


def riesz(f: SampledField, k: int, plan: MultiplierPlan | None = None) -> SampledField:
    """k-th Riesz transform, applied to every component of ``f``."""
    plan = _plan(f, plan)
    if not 1 <= k <= f.n:
        raise ValueError(f"Riesz index {k} outside [1, {f.n}]")
    plan.check_dc(f)
    hat = forward(f.components, f.n) * plan.riesz_multiplier(k)
    return SampledField(f.spec, f.kind, inverse_real(hat, f.spec))


def embed_multivector(f: SampledField) -> SampledField:
    """Scalar or paravector field as a full multivector field."""
    if f.kind == "multivector":
        return f
    n = f.n
    out = np.zeros(((1 << n),) + f.spec.shape)
    if f.kind == "scalar":
        out[0] = f.components[0]
    elif f.kind == "paravector":
        out[0] = f.components[0]
        for k in range(1, n + 1):
            out[1 << (k - 1)] = f.components[k]
    else:
        raise KindMismatch(f"cannot embed a {f.kind} field in Cl({n})")
    return SampledField(f.spec, "multivector", out)


def paravector_part(f: SampledField) -> SampledField:
    """Grades 0 and 1 of a multivector field."""
    if f.kind == "paravector":
        return f
    if f.kind != "multivector":
        raise KindMismatch(f"expected a multivector field, got {f.kind}")
    comps = [f.components[0]] + [f.components[1 << (k - 1)] for k in range(1, f.n + 1)]
    return SampledField(f.spec, "paravector", np.stack(comps))


def grade_residual(f: SampledField, min_grade: int = 2) -> float:
    """Largest |coefficient| among blades of grade >= ``min_grade``."""
    if f.kind != "multivector":
        return 0.0
    masks = [m for m in range(1 << f.n) if bin(m).count("1") >= min_grade]
    if not masks:
        return 0.0
    return float(np.max(np.abs(f.components[masks])))


def hilbert_hat(hat: np.ndarray, kind: str, plan: MultiplierPlan) -> np.ndarray:
    """H = sum_k (-e_k) R_k on stacked spectra of a multivector or quaternion field."""
    n = plan.spec.n
    out = np.zeros_like(hat, dtype=complex)
    if kind == "multivector":
        sign, target = product_table(n)
        for k in range(1, n + 1):
            ek = 1 << (k - 1)
            mk = plan.riesz_multiplier(k)
            for s in range(1 << n):
                out[target[ek, s]] -= sign[ek, s] * mk * hat[s]
    elif kind == "quaternion":
        if n != 3:
            raise KindMismatch("the quaternionic Hilbert transform lives on R^3")
        for k in range(1, 4):
            mk = plan.riesz_multiplier(k)
            for s in range(4):
                sg, c = QUAT_TABLE[k][s]
                out[c] -= sg * mk * hat[s]
    else:
        raise KindMismatch(f"Hilbert transform needs a multivector or quaternion field, got {kind}")
    return out


def hilbert(f: SampledField, plan: MultiplierPlan | None = None) -> SampledField:
    """Clifford (or quaternionic) Hilbert transform.

    Scalar and paravector inputs are promoted to multivector fields since Hf
    generally has a bivector part.
    """
    plan = _plan(f, plan)
    plan.check_dc(f)
    if f.kind in ("scalar", "paravector"):
        f = embed_multivector(f)
    hat = hilbert_hat(forward(f.components, f.n), f.kind, plan)
    return SampledField(f.spec, f.kind, inverse_real(hat, f.spec))


def plemelj(f: SampledField, sign: int, plan: MultiplierPlan | None = None) -> SampledField:
    """(f + sign * Hf) / 2."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    hf = hilbert(f, plan)
    if f.kind in ("scalar", "paravector"):
        f = embed_multivector(f)
    return SampledField(f.spec, f.kind, 0.5 * (f.components + sign * hf.components))


def chi(sign: int, plan: MultiplierPlan) -> list[np.ndarray]:
    """Clifford multiplier (1 + sign * i xi/|xi|)/2 as blade-coefficient arrays.

    Index 0 is the scalar part 1/2, index k the coefficient of e_k.
    """
    return [np.full(plan.spec.shape, 0.5, dtype=complex)] + [
        0.5 * sign * 1j * plan.unit[k] for k in range(plan.spec.n)
    ]


def riesz_oracle_dft(f: SampledField, k: int, chunk: int = 512) -> SampledField:
    """Riesz transform by explicit O(N^2) DFT sums.

    Rebuilds wavenumbers and the DC/Nyquist conventions from integer index
    arithmetic, without the FFT or the cached plan.
    """
    spec = f.spec
    if spec.size > ORACLE_MAX_POINTS:
        raise OracleSizeError(f"direct DFT oracle capped at {ORACLE_MAX_POINTS} points, got {spec.size}")
    if not 1 <= k <= spec.n:
        raise ValueError(f"Riesz index {k} outside [1, {spec.n}]")
    idx = np.indices(spec.shape).reshape(spec.n, -1).T
    shape = np.array(spec.shape)
    lengths = np.array(spec.lengths)
    x = idx * (lengths / shape)
    modes = np.where(idx < shape // 2, idx, idx - shape)
    kap = 2 * math.pi * modes / lengths
    mag = np.sqrt(np.sum(kap ** 2, axis=1))
    mult = np.zeros(len(kap), dtype=complex)
    ok = (mag > 0) & (modes[:, k - 1] != -(shape[k - 1] // 2))
    mult[ok] = -1j * kap[ok, k - 1] / mag[ok]

    vals = f.components.reshape(len(f), -1)
    total = vals.shape[1]
    spectrum = np.empty((len(f), total), dtype=complex)
    for start in range(0, total, chunk):
        phase = np.exp(-1j * (kap[start:start + chunk] @ x.T))
        spectrum[:, start:start + chunk] = vals @ phase.T
    spectrum *= mult
    out = np.empty((len(f), total))
    for start in range(0, total, chunk):
        phase = np.exp(1j * (x[start:start + chunk] @ kap.T))
        out[:, start:start + chunk] = (spectrum @ phase.T).real / total
    return SampledField(spec, f.kind, out.reshape((len(f),) + spec.shape))
