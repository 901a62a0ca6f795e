"""Extensions of boundary data into the half-spaces.

Two independent routes:

* spectral: multiply each mode by exp(-|x0| |kappa|) (periodic Poisson extension);
* quadrature: trapezoidal sums of the Cauchy and differentiated Newton kernels
  over one period cell, using the nearest periodic image of every sample.

The half-space coordinate is called x0 throughout; for vector-type data it
plays the role of x_{n+1}.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import gamma

from .clifford import Multivector, clifford_product_arrays
from .errors import KindMismatch, ProbeError, SlabError
from .grid import GridSpec, SampledField, forward, inverse_real, lp_norm, spectral_l2
from .spectral import MultiplierPlan, embed_multivector, make_plan

SYSTEMS = ("paravector", "vector", "quaternion", "clifford")
DEFAULT_SYSTEM = {"paravector": "paravector", "vector": "vector", "quaternion": "quaternion"}

# Sign choice in the Newton-potential representation of Hardy functions that
# agrees with the Cauchy integral; recorded in every slab manifest.
NEWTON_SIGN_CONVENTION = "cauchy: prefactor -2/((n-1) omega_n) above, +2/((n-1) omega_n) below"


def omega_n(n: int) -> float:
    """Surface measure of the unit sphere S^n in R^(n+1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 2 * math.pi ** ((n + 1) / 2) / gamma((n + 1) / 2)


@dataclass(frozen=True, eq=False)
class SlabSample:
    boundary_spec: GridSpec
    heights: np.ndarray
    values: tuple[SampledField, ...]
    side: int = 1

    def __post_init__(self):
        h = np.asarray(self.heights, dtype=float)
        if h.ndim != 1 or len(h) != len(self.values):
            raise SlabError("one field per height required")
        if np.any(h <= 0):
            raise SlabError(f"heights must be positive, got {h}")
        if np.any(np.diff(h) <= 0):
            raise SlabError("heights must be strictly increasing")
        for v in self.values:
            if v.spec != self.boundary_spec:
                raise SlabError("every slice must share the boundary grid")
        if self.side not in (1, -1):
            raise SlabError("side must be +1 or -1")
        object.__setattr__(self, "heights", h)
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def kind(self) -> str:
        return self.values[0].kind


def _plan(spec: GridSpec, plan: MultiplierPlan | None) -> MultiplierPlan:
    if plan is None:
        return make_plan(spec)
    if plan.spec != spec:
        raise KindMismatch("plan was built for a different grid")
    return plan


def poisson_extend(f: SampledField, heights, plan: MultiplierPlan | None = None, side: int = 1) -> SlabSample:
    """Spectral Poisson extension of every component to the given heights.

    The DC mode extends as a constant.
    """
    plan = _plan(f.spec, plan)
    heights = np.atleast_1d(np.asarray(heights, dtype=float))
    if np.any(heights <= 0):
        raise SlabError(f"extension heights must be positive, got {heights}")
    hat = forward(f.components, f.n)
    values = [SampledField(f.spec, f.kind, inverse_real(hat * np.exp(-t * plan.kmag), f.spec)) for t in heights]
    return SlabSample(f.spec, heights, values, side)


def poisson_extend_at(f: SampledField, points, plan: MultiplierPlan | None = None) -> np.ndarray:
    """Spectral extension evaluated off-grid by trigonometric interpolation.

    ``points`` has shape (P, n+1) with columns (x0, x_1, ..., x_n); the
    sign of x0 only selects the half-space. Returns (P, components).
    """
    plan = _plan(f.spec, plan)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != f.n + 1:
        raise ProbeError(f"points need {f.n + 1} coordinates")
    hat = forward(f.components, f.n).reshape(len(f), -1) / f.spec.size
    kap = np.stack([k.ravel() for k in plan.kappa], axis=1)
    kmag = plan.kmag.ravel()
    out = np.empty((len(pts), len(f)))
    for i, p in enumerate(pts):
        phase = np.exp(1j * (kap @ p[1:]) - abs(p[0]) * kmag)
        out[i] = (hat @ phase).real
    return out


def _displacements(spec: GridSpec, x_tan) -> list[np.ndarray]:
    """x_k - y_k to the nearest periodic image, for every grid sample y."""
    out = []
    for xk, yk, L in zip(x_tan, spec.coordinates(), spec.lengths):
        d = (xk - yk + L / 2) % L - L / 2
        out.append(np.broadcast_to(d, spec.shape))
    return out


def _check_point(spec: GridSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size != spec.n + 1:
        raise ProbeError(f"evaluation point needs {spec.n + 1} coordinates (x0, x_1..x_n)")
    if x[0] == 0.0:
        raise ProbeError("evaluation point lies on the boundary hyperplane")
    return x


def cauchy_integral(g: SampledField, x) -> Multivector:
    """Cauchy integral of paravector boundary data at x = (x0, x_1, ..., x_n).

    Upper half-space (x0 > 0) uses the outer normal -e_0, the lower one +e_0,
    so both cases reduce to
        sign(x0) / omega_n * sum_y (x0 - sum_k (x_k - y_k) e_k) / |x - y|^(n+1) g(y) dV.
    """
    if g.kind not in ("paravector", "scalar"):
        raise KindMismatch(f"Cauchy integral expects paravector boundary data, got {g.kind}")
    spec = g.spec
    n = spec.n
    x = _check_point(spec, x)
    d = _displacements(spec, x[1:])
    r2 = x[0] ** 2 + sum(dk ** 2 for dk in d)
    w = 1.0 / (omega_n(n) * r2 ** ((n + 1) / 2))
    kernel = np.zeros(((1 << n),) + spec.shape)
    kernel[0] = x[0] * w
    for k in range(1, n + 1):
        kernel[1 << (k - 1)] = -d[k - 1] * w
    data = embed_multivector(g).components
    prod = clifford_product_arrays(kernel, data, n)
    total = prod.reshape(len(prod), -1).sum(axis=1) * spec.cell_volume
    return Multivector(n, np.sign(x[0]) * total)


def cauchy_boundary_limit(g: SampledField, x_tan, steps=(2, 3, 4), side: int = 1) -> Multivector:
    """Boundary value of the Cauchy integral at tangential point ``x_tan``.

    Evaluates at heights side * steps * spacing (the quadrature is unreliable
    within a cell or so of the plane) and extrapolates polynomially to 0.
    """
    h = max(g.spec.spacing)
    ts = side * np.asarray(steps, dtype=float) * h
    vals = np.array([cauchy_integral(g, np.concatenate([[t], np.ravel(x_tan)])).coeffs for t in ts])
    coef = np.linalg.solve(np.vander(ts, len(ts)), vals)
    return Multivector(g.n, coef[-1])


def newton_gradient(g0: SampledField, x, side: int | None = None, convention: str = "cauchy") -> Multivector:
    """Hardy function rebuilt from its scalar trace via the Newton potential.

    N(x) = s * 2/((n-1) omega_n) * sum_y g0(y) / |x - y|^(n-1) dV, with
    s = -side under the ``cauchy`` convention (the one that reproduces the
    Cauchy integral) and s = +side under ``flipped``. Returns
    d0 N - sum_k d_k N e_k (a paravector).
    """
    if g0.kind != "scalar":
        raise KindMismatch(f"Newton potential needs a scalar density, got {g0.kind}")
    spec = g0.spec
    n = spec.n
    if n < 2:
        raise ValueError("the |x|^(1-n) Newton kernel needs n >= 2")
    x = _check_point(spec, x)
    point_side = 1 if x[0] > 0 else -1
    if side is not None and side != point_side:
        raise ProbeError(f"point with x0={x[0]} is not in the side {side:+d} half-space")
    if convention == "cauchy":
        s = -point_side
    elif convention == "flipped":
        s = point_side
    else:
        raise ValueError(f"unknown convention {convention!r}")
    pref = s * 2.0 / ((n - 1) * omega_n(n))
    d = _displacements(spec, x[1:])
    r2 = x[0] ** 2 + sum(dk ** 2 for dk in d)
    # d/dx_j |x-y|^(1-n) = -(n-1) (x_j - y_j) / |x-y|^(n+1)
    dk_kernel = -(n - 1) / r2 ** ((n + 1) / 2)
    g = g0.components[0]
    dv = spec.cell_volume
    grad0 = pref * float(np.sum(dk_kernel * x[0] * g)) * dv
    grads = [pref * float(np.sum(dk_kernel * dj * g)) * dv for dj in d]
    return Multivector.paravector([grad0] + [-v for v in grads])


def _tangential_derivatives(f: SampledField, plan: MultiplierPlan) -> np.ndarray:
    """d_j f_c for every component c and tangential axis j: shape (n, comps, *shape)."""
    hat = forward(f.components, f.n)
    return np.stack([inverse_real(plan.derivative_multiplier(j) * hat, f.spec, check=False)
                     for j in range(1, f.n + 1)])


def _equations(system: str, f: np.ndarray, d_tan: np.ndarray, d_nrm: np.ndarray) -> list[np.ndarray]:
    """Residual arrays of one first-order system at one height.

    ``f`` components, ``d_tan[j-1][c]`` = d_j f_c, ``d_nrm[c]`` = normal derivative.
    """
    n = d_tan.shape[0]
    eqs = []
    if system in ("paravector", "clifford"):
        # d0 f0 = sum d_j f_j ; d0 f_j = -d_j f0 ; d_j f_k = d_k f_j
        eqs.append(d_nrm[0] - sum(d_tan[j - 1][j] for j in range(1, n + 1)))
        for j in range(1, n + 1):
            eqs.append(d_nrm[j] + d_tan[j - 1][0])
        for j in range(1, n + 1):
            for k in range(j + 1, n + 1):
                eqs.append(d_tan[j - 1][k] - d_tan[k - 1][j])
    elif system == "vector":
        # components f_1..f_{n+1} stored at 0..n; x_{n+1} is the normal axis
        eqs.append(sum(d_tan[j][j] for j in range(n)) + d_nrm[n])
        for j in range(n):
            for k in range(j + 1, n):
                eqs.append(d_tan[j][k] - d_tan[k][j])
            eqs.append(d_tan[j][n] - d_nrm[j])
    elif system == "quaternion":
        if n != 3:
            raise KindMismatch("the quaternionic system lives on R^3")
        d = lambda c, axis: d_nrm[c] if axis == 0 else d_tan[axis - 1][c]  # noqa: E731
        eqs.append(d(0, 0) - (d(1, 1) + d(2, 2) + d(3, 3)))
        eqs.append(d(1, 2) - (d(3, 0) + d(0, 3) + d(2, 1)))
        eqs.append(d(2, 3) - (d(1, 0) + d(0, 1) + d(3, 2)))
        eqs.append(d(3, 1) - (d(2, 0) + d(0, 2) + d(1, 3)))
    else:
        raise ValueError(f"unknown system {system!r}; choose from {SYSTEMS}")
    return eqs


def _uniform_step(slab: SlabSample) -> float:
    if len(slab.heights) < 3:
        raise SlabError("need at least 3 heights for centered differences")
    steps = np.diff(slab.heights)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise SlabError("heights must be uniformly spaced")
    return float(steps[0])


def monogenicity_residual(slab: SlabSample, system: str | None = None, plan: MultiplierPlan | None = None) -> float:
    """Max over interior heights of the L^2 norm of all system residuals.

    Tangential derivatives are spectral; the normal derivative is a centered
    difference in the signed coordinate side * height.
    """
    system = system or DEFAULT_SYSTEM.get(slab.kind)
    if system is None:
        raise KindMismatch(f"no first-order system for {slab.kind} slabs")
    if system == "clifford" and slab.kind != "quaternion":
        raise KindMismatch("the 'clifford' system reads quaternion slabs as paravectors")
    if system == "quaternion" and slab.kind != "quaternion":
        raise KindMismatch("the quaternionic system needs a quaternion slab")
    if system == "paravector" and slab.kind != "paravector":
        raise KindMismatch("the paravector system needs a paravector slab")
    if system == "vector" and slab.kind != "vector":
        raise KindMismatch("the vector system needs a vector slab")
    h = _uniform_step(slab)
    plan = _plan(slab.boundary_spec, plan)
    spec = slab.boundary_spec
    worst = 0.0
    for i in range(1, len(slab.heights) - 1):
        d_nrm = (slab.values[i + 1].components - slab.values[i - 1].components) / (2 * h * slab.side)
        d_tan = _tangential_derivatives(slab.values[i], plan)
        eqs = _equations(system, slab.values[i].components, d_tan, d_nrm)
        total = math.sqrt(sum(float(np.sum(e ** 2)) for e in eqs) * spec.cell_volume)
        worst = max(worst, total)
    return worst


def laplace_residual(slab: SlabSample, plan: MultiplierPlan | None = None) -> float:
    """Max over interior heights of || d_nn f + Laplacian_tan f ||_2, all components."""
    h = _uniform_step(slab)
    plan = _plan(slab.boundary_spec, plan)
    worst = 0.0
    for i in range(1, len(slab.heights) - 1):
        d2 = (slab.values[i + 1].components - 2 * slab.values[i].components + slab.values[i - 1].components) / h ** 2
        hat = forward(d2, slab.boundary_spec.n) - plan.kmag ** 2 * forward(slab.values[i].components, slab.boundary_spec.n)
        worst = max(worst, spectral_l2(hat, slab.boundary_spec))
    return worst


def monogenicity_order(
    f: SampledField,
    height: float,
    step: float,
    system: str | None = None,
    plan: MultiplierPlan | None = None,
    side: int = 1,
) -> dict:
    """Residuals at steps h and h/2 around ``height`` and the observed order."""
    res = []
    for h in (step, step / 2):
        slab = poisson_extend(f, [height - h, height, height + h], plan, side)
        res.append(monogenicity_residual(slab, system, plan))
    order = math.log2(res[0] / res[1]) if res[1] > 0 and res[0] > 0 else float("nan")
    return {"residual": res[0], "residual_half": res[1], "ratio": res[0] / res[1] if res[1] else float("inf"),
            "order": order}


@dataclass(frozen=True)
class NormProfile:
    heights: tuple[float, ...]
    norms: tuple[float, ...]
    nonincreasing: bool

    def rows(self):
        return list(zip(self.heights, self.norms))


def hardy_norm_profile(slab: SlabSample, p: float = 2.0, rtol: float = 1e-12) -> NormProfile:
    """L^p norm at each height and whether it never increases with height."""
    norms = [lp_norm(v, p) for v in slab.values]
    scale = max(norms, default=0.0)
    flag = all(b <= a + rtol * scale for a, b in zip(norms, norms[1:]))
    return NormProfile(tuple(float(h) for h in slab.heights), tuple(norms), flag)


def write_slab(slab: SlabSample, outdir, summary: dict | None = None) -> Path:
    """One HHF1 file per height plus ``manifest.json``."""
    from .fieldio import write_field

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = []
    for i, (t, v) in enumerate(zip(slab.heights, slab.values)):
        name = f"height_{i:03d}.hhf"
        write_field(v, outdir / name)
        files.append({"file": name, "height": float(t)})
    manifest = {
        "boundaryGrid": slab.boundary_spec.to_dict(),
        "kind": slab.kind,
        "side": slab.side,
        "heights": [float(t) for t in slab.heights],
        "slices": files,
        "newtonSignConvention": NEWTON_SIGN_CONVENTION,
    }
    if summary:
        manifest.update(summary)
    path = outdir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
