"""Divergence-form potentials of densities on a hyperplane and their silence.

The plane is the boundary grid at x0 = 0. For a paravector density psi,
read as the vector (psi_0, psi_1, ..., psi_n) in R^(n+1),

    P(x) = (n-1)/omega_n * integral psi(y) . (x - y) / |x - y|^(n+1) dy,

evaluated by trapezoidal quadrature over one period cell (nearest image).
Spectrally the same potential is (n-1) u(h+) above the plane and
-(n-1) u(h-) below, where u is the Poisson extension and
h+- = (psi_0 +- sum_k R_k psi_k)/2; this is why the minus and zero parts of
the Hardy-Hodge split are invisible from above, and plus and zero from below.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import KindMismatch, ProbeError
from .extension import _displacements, omega_n, poisson_extend_at
from .grid import GridSpec, SampledField, forward, inverse_real
from .hodge import decompose_paravector
from .spectral import make_plan
from .synth import normalize_recipe, synth_field

SILENCE_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class PotentialProbe:
    points: np.ndarray
    values: np.ndarray = field(default=None)

    @property
    def side(self) -> np.ndarray:
        return np.where(self.points[:, 0] > 0, 1, -1)

    def with_values(self, values) -> "PotentialProbe":
        return PotentialProbe(self.points, np.asarray(values, dtype=float))


def check_probes(spec: GridSpec, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != spec.n + 1:
        raise ProbeError(f"probe points need {spec.n + 1} coordinates (x0, x_1..x_n)")
    cell = max(spec.spacing)
    close = np.abs(pts[:, 0]) < cell
    if np.any(close):
        raise ProbeError(f"{int(close.sum())} probe(s) closer to the plane than one grid cell ({cell:.3g})")
    return pts


def default_probes(spec: GridSpec, width: float, center=None, factors=(0.5, 1.0, 2.0),
                   count: int = 5, span: float = 1.5, sides=(1, -1)) -> np.ndarray:
    """count x count tangential grid (first two axes) at heights factor*width.

    Remaining tangential axes sit at the center. For n = 1 the tangential
    grid is a single row of ``count`` points.
    """
    n = spec.n
    if center is None:
        center = [L / 2 for L in spec.lengths]
    offs = np.linspace(-span * width, span * width, count)
    tang = []
    if n == 1:
        tang = [[center[0] + a] for a in offs]
    else:
        for a in offs:
            for b in offs:
                tang.append([center[0] + a, center[1] + b] + list(center[2:]))
    pts = [[s * f * width] + t for s in sides for f in factors for t in tang]
    return np.array(pts, dtype=float)


def potential_kernels(spec: GridSpec, x: np.ndarray) -> np.ndarray:
    """Quadrature weights (n+1, *shape) pairing psi components with P(x)."""
    n = spec.n
    d = _displacements(spec, x[1:])
    r2 = x[0] ** 2 + sum(dk ** 2 for dk in d)
    w = (n - 1) / omega_n(n) * spec.cell_volume / r2 ** ((n + 1) / 2)
    return np.stack([x[0] * w] + [dk * w for dk in d])


def _densities(psis) -> tuple[GridSpec, np.ndarray]:
    spec = psis[0].spec
    for p in psis:
        if p.kind != "paravector":
            raise KindMismatch(f"potential densities are paravector fields, got {p.kind}")
        if p.spec != spec:
            raise KindMismatch("all densities must share one grid")
        if spec.n < 2:
            raise ValueError("divergence-form potentials need n >= 2")
    return spec, np.stack([p.components.reshape(spec.n + 1, -1) for p in psis])


def potential_many(psis, points) -> np.ndarray:
    """Potentials of several densities on one grid: shape (len(psis), P)."""
    spec, dens = _densities(list(psis))
    pts = check_probes(spec, points)
    out = np.empty((len(dens), len(pts)))
    for i, x in enumerate(pts):
        ker = potential_kernels(spec, x).reshape(spec.n + 1, -1)
        out[:, i] = np.einsum("pcy,cy->p", dens, ker)
    return out


def potential_div_form(psi: SampledField, probes) -> PotentialProbe:
    """Quadrature of the divergence-form potential at each probe point."""
    pts = probes.points if isinstance(probes, PotentialProbe) else probes
    pts = check_probes(psi.spec, pts)
    return PotentialProbe(pts, potential_many([psi], pts)[0])


def potential_spectral(psi: SampledField, points) -> np.ndarray:
    """Same potential via Poisson extension of the scalar Hardy generators."""
    spec, _ = _densities([psi])
    pts = check_probes(spec, points)
    plan = make_plan(spec)
    hat = forward(psi.components, spec.n)
    rsum = sum(plan.riesz_multiplier(k) * hat[k] for k in range(1, spec.n + 1))
    out = np.empty(len(pts))
    for s in (1, -1):
        sel = np.sign(pts[:, 0]) == s
        if not np.any(sel):
            continue
        h = SampledField(spec, "scalar", inverse_real((0.5 * (hat[0] + s * rsum))[None], spec))
        out[sel] = s * (spec.n - 1) * poisson_extend_at(h, pts[sel], plan)[:, 0]
    return out


def hyperplane_frame(u, a: float = 0.0):
    """Isometry taking {x . u = a} to {x0 = 0}: returns reduce(points) callable.

    A Householder reflection maps the unit normal u onto e_0; the signed
    distance x . u - a becomes the height.
    """
    u = np.asarray(u, dtype=float)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise ValueError("hyperplane normal must be nonzero")
    u = u / norm
    e0 = np.zeros_like(u)
    e0[0] = 1.0
    v = u - e0
    if np.linalg.norm(v) < 1e-15:
        R = np.eye(len(u))
    else:
        R = np.eye(len(u)) - 2 * np.outer(v, v) / (v @ v)
    shift = a / norm * u

    def reduce(points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (pts - shift) @ R.T

    return reduce


def _max_abs(a) -> float:
    return float(np.max(np.abs(a), initial=0.0))


def _ratio(num, den) -> float:
    den = _max_abs(den)
    return _max_abs(num) / den if den > 0 else float("inf")


def silence_report(psi: SampledField, probes=None, width: float | None = None, tol: float = SILENCE_TOL,
                   dc_policy: str = "strip", center=None) -> dict:
    """Decompose ``psi``, evaluate every part on both sides of the plane.

    Ratios are max |silent potential| / max |matched control| over the probes
    of one side; the control is the Hardy part visible from that side.
    """
    spec = psi.spec
    if width is None:
        width = min(spec.lengths) / 16
    res = decompose_paravector(psi, dc_policy=dc_policy)
    pts = check_probes(spec, default_probes(spec, width, center) if probes is None else probes)
    vals = potential_many([res.f_plus, res.f_minus, res.f_zero, psi], pts)
    plus, minus, zero, total = vals
    up = pts[:, 0] > 0
    lo = ~up
    ratios = {}
    if np.any(up):
        ratios.update(upperMinusZero=_ratio((minus + zero)[up], plus[up]), zeroUpper=_ratio(zero[up], plus[up]),
                      totalMinusPlusUpper=_ratio((total - plus)[up], plus[up]))
    if np.any(lo):
        ratios.update(lowerPlusZero=_ratio((plus + zero)[lo], minus[lo]), zeroLower=_ratio(zero[lo], minus[lo]),
                      totalMinusMinusLower=_ratio((total - minus)[lo], minus[lo]))
    failing = [k for k, v in ratios.items() if not v <= tol]
    parts = {name: {"upper": _max_abs(v[up]), "lower": _max_abs(v[lo])}
             for name, v in zip(("plus", "minus", "zero", "total"), vals)}
    return {
        "parts": parts,
        "side": {"upper": {"silent": ["minus", "zero"], "control": "plus", "probes": int(up.sum())},
                 "lower": {"silent": ["plus", "zero"], "control": "minus", "probes": int(lo.sum())}},
        "ratios": ratios,
        "tolerance": tol,
        "passed": not failing,
        "failing": failing,
        "probes": [{"x": [float(c) for c in p], "plus": float(a), "minus": float(b), "zero": float(c0),
                    "total": float(t)} for p, a, b, c0, t in zip(pts, plus, minus, zero, total)],
        "bumpParams": {"width": width, "gridSpec": spec.to_dict()},
    }


def silent_experiment(spec: GridSpec, recipe="localized_random", seed: int = 0, probes=None,
                      tol: float = SILENCE_TOL, dc_policy: str = "strip") -> dict:
    """Synthesize a density from ``recipe`` and run :func:`silence_report` on it."""
    recipe = normalize_recipe(recipe)
    width = float(recipe.get("width", min(spec.lengths) / 16))
    recipe.setdefault("width", width)
    psi = synth_field(spec, "paravector", recipe, seed)
    report = silence_report(psi, probes, width, tol, dc_policy, recipe.get("center"))
    report["bumpParams"].update(recipe=recipe, seed=seed)
    return report


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
