"""Reference field factory.

Randomness comes from ``numpy.random.Generator(PCG64(seed))``. Stream order:
one ``standard_normal(shape)`` draw per component, in component order, then
(for ``localized_random``) per component an amplitude followed by n offsets.
Fixtures are therefore reproducible from (spec, kind, recipe, seed) alone.

Recipes are plain dicts with a ``name`` key; see :data:`RECIPES`.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import KindMismatch
from .grid import GridSpec, SampledField, component_count, forward, inverse_real
from .spectral import make_plan

RECIPES = (
    "single_mode",
    "bandlimited_random",
    "gaussian_bump",
    "hardy_plus",
    "hardy_minus",
    "divfree_random",
    "localized_random",
)


def rng_for(seed: int | None) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def normalize_recipe(recipe) -> dict:
    if isinstance(recipe, str):
        recipe = {"name": recipe}
    recipe = dict(recipe)
    recipe["name"] = recipe["name"].replace("-", "_")
    if recipe["name"] not in RECIPES:
        raise ValueError(f"unknown recipe {recipe['name']!r}; choose from {RECIPES}")
    return recipe


def lowpass_mask(spec: GridSpec, max_freq: int | None = None) -> np.ndarray:
    """Modes with every |m_j| <= max_freq, DC and Nyquist planes excluded."""
    keep = np.ones(spec.shape, dtype=bool)
    for m, N in zip(spec.mode_indices(), spec.shape):
        lim = N // 2 - 1 if max_freq is None else min(int(max_freq), N // 2 - 1)
        keep &= np.abs(m) <= lim
    keep[(0,) * spec.n] = False
    return keep


def project_clean(arr: np.ndarray, spec: GridSpec) -> np.ndarray:
    """Remove the mean and all Nyquist content of each component."""
    hat = forward(arr, spec.n) * lowpass_mask(spec)
    return inverse_real(hat, spec, check=False)


def _random_components(spec: GridSpec, count: int, rng: np.random.Generator, max_freq) -> np.ndarray:
    noise = np.stack([rng.standard_normal(spec.shape) for _ in range(count)])
    hat = forward(noise, spec.n) * lowpass_mask(spec, max_freq)
    return inverse_real(hat, spec, check=False)


def bump_profile(spec: GridSpec, center, width: float, profile: str = "gauss") -> np.ndarray:
    """Gaussian bump (or its Mexican-hat variant) with nearest-image distance."""
    if center is None:
        center = [L / 2 for L in spec.lengths]
    r2 = 0.0
    for x, c, L in zip(spec.coordinates(), center, spec.lengths):
        d = (x - c + L / 2) % L - L / 2
        r2 = r2 + d ** 2
    r2 = np.broadcast_to(r2, spec.shape)
    g = np.exp(-r2 / (2 * width ** 2))
    if profile == "gauss":
        return g
    if profile == "mexican_hat":
        # -width**2 * Laplacian of the Gaussian: zero mean and zero first moments
        return (spec.n - r2 / width ** 2) * g
    raise ValueError(f"unknown bump profile {profile!r}")


def _scalar_seed(spec: GridSpec, recipe: dict, rng: np.random.Generator) -> np.ndarray:
    sub = normalize_recipe(recipe.get("h", {"name": "bandlimited_random"}))
    if sub["name"] in ("hardy_plus", "hardy_minus", "divfree_random"):
        raise ValueError(f"{sub['name']} cannot seed a Hardy field")
    h = _build(spec, "scalar", sub, rng).components[0]
    return project_clean(h[None], spec)[0]


def hardy_components(spec: GridSpec, kind: str, h: np.ndarray, sign: int) -> np.ndarray:
    """Boundary Hardy field generated by the scalar ``h`` (mean-zero).

    paravector/quaternion: (I + sign*H) h = (h, -sign R_1 h, ..., -sign R_n h)
    vector:                (sign R_1 h, ..., sign R_n h, h)
    """
    plan = make_plan(spec)
    hh = forward(h, spec.n)
    riesz = [inverse_real(plan.riesz_multiplier(k) * hh, spec) for k in range(1, spec.n + 1)]
    if kind in ("paravector", "quaternion"):
        if kind == "quaternion" and spec.n != 3:
            raise KindMismatch("quaternion Hardy fields live on R^3")
        return np.stack([h] + [-sign * r for r in riesz])
    if kind == "vector":
        return np.stack([sign * r for r in riesz] + [h])
    raise KindMismatch(f"no Hardy construction for {kind} fields")


def _build(spec: GridSpec, kind: str, recipe: dict, rng: np.random.Generator) -> SampledField:
    name = recipe["name"]
    ncomp = component_count(kind, spec.n)
    if name == "single_mode":
        modes = recipe.get("modes", recipe.get("kappa", [1] + [0] * (spec.n - 1)))
        if len(modes) != spec.n:
            raise ValueError(f"single_mode needs {spec.n} mode indices")
        comp = int(recipe.get("component", 0))
        if not 0 <= comp < ncomp:
            raise KindMismatch(f"component {comp} does not exist for {kind}")
        phase = sum(2 * math.pi * m * x / L for m, x, L in zip(modes, spec.coordinates(), spec.lengths))
        wave = np.cos(phase) if recipe.get("phase", "cos") == "cos" else np.sin(phase)
        out = np.zeros((ncomp,) + spec.shape)
        out[comp] = float(recipe.get("amplitude", 1.0)) * np.broadcast_to(wave, spec.shape)
        return SampledField(spec, kind, out)
    if name == "bandlimited_random":
        return SampledField(spec, kind, _random_components(spec, ncomp, rng, recipe.get("max_freq")))
    if name == "gaussian_bump":
        comp = int(recipe.get("component", 0))
        if not 0 <= comp < ncomp:
            raise KindMismatch(f"component {comp} does not exist for {kind}")
        width = float(recipe.get("width", min(spec.lengths) / 16))
        out = np.zeros((ncomp,) + spec.shape)
        out[comp] = float(recipe.get("amplitude", 1.0)) * bump_profile(
            spec, recipe.get("center"), width, recipe.get("profile", "gauss"))
        return SampledField(spec, kind, out)
    if name in ("hardy_plus", "hardy_minus"):
        h = _scalar_seed(spec, recipe, rng)
        return SampledField(spec, kind, hardy_components(spec, kind, h, 1 if name == "hardy_plus" else -1))
    if name == "divfree_random":
        if kind == "paravector":
            tangential = list(range(1, spec.n + 1))
        elif kind == "vector":
            tangential = list(range(spec.n))
        else:
            raise KindMismatch(f"divfree_random needs a paravector or vector field, got {kind}")
        plan = make_plan(spec)
        raw = forward(_random_components(spec, spec.n, rng, recipe.get("max_freq")), spec.n)
        div = sum(plan.unit[k] * raw[k] for k in range(spec.n))
        proj = np.stack([raw[k] - plan.unit[k] * div for k in range(spec.n)])
        out = np.zeros((ncomp,) + spec.shape)
        out[tangential] = inverse_real(proj, spec)
        return SampledField(spec, kind, out)
    if name == "localized_random":
        width = float(recipe.get("width", min(spec.lengths) / 16))
        center = recipe.get("center") or [L / 2 for L in spec.lengths]
        skip = set(recipe.get("zero_components", []))
        out = np.zeros((ncomp,) + spec.shape)
        for c in range(ncomp):
            amp = rng.standard_normal()
            offset = rng.uniform(-0.5, 0.5, size=spec.n) * width
            if c in skip:
                continue
            out[c] = amp * bump_profile(spec, np.asarray(center) + offset, width, "mexican_hat")
        return SampledField(spec, kind, project_clean(out, spec))
    raise ValueError(f"unknown recipe {name!r}")


def synth_field(spec: GridSpec, kind: str, recipe, seed: int | None = 0) -> SampledField:
    """Deterministic test field for ``(spec, kind, recipe, seed)``."""
    recipe = normalize_recipe(recipe)
    if kind not in ("scalar", "paravector", "vector", "quaternion"):
        raise KindMismatch(f"cannot synthesize {kind} fields")
    return _build(spec, kind, recipe, rng_for(seed))
