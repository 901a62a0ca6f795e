"""Invariant suites with pinned tolerances.

Each check reduces a batch of runs to one worst-case number and compares it
to a fixed bound. Suites: ``core`` (decomposition identities and operator
identities), ``quaternion``, ``extension`` (extension kernels and
monogenicity), ``silence`` (divergence-form potentials).
"""

from __future__ import annotations

import time
from functools import partial
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.signal

from .clifford import clifford_product_arrays
from .extension import (
    cauchy_integral,
    hardy_norm_profile,
    monogenicity_order,
    newton_gradient,
    poisson_extend,
    poisson_extend_at,
)
from .grid import GridSpec, SampledField, lp_norm, relative
from .hodge import decompose_homogeneous, decompose_paravector, decompose_quaternionic, hodge_tangential_check
from .spectral import (
    ORACLE_MAX_POINTS,
    chi,
    embed_multivector,
    hilbert,
    make_plan,
    plemelj,
    riesz,
    riesz_oracle_dft,
)
from .silent import silent_experiment
from .synth import lowpass_mask, synth_field

SUITES = ("core", "quaternion", "extension", "silence")

TOL = {
    "identity": 1e-12,
    "extension": 1e-2,
    "contraction": 1e-12,
    "order": 2.0,
    "orderSlack": 0.2,
    "silence": 1e-3,
    "theta": 0.1,
}

CORE_DIMS = (1, 2, 3)
CORE_SIZES = (16, 32)
CORE_SEEDS = 4


@dataclass
class Check:
    name: str
    value: float
    bound: float
    passed: bool
    detail: dict = field(default_factory=dict)

    @classmethod
    def at_most(cls, name, value, bound, **detail):
        value = float(value)
        return cls(name, value, bound, bool(value <= bound), detail)

    @classmethod
    def at_least(cls, name, value, bound, **detail):
        value = float(value)
        return cls(name, value, bound, bool(value >= bound), {"direction": ">=", **detail})

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        if "range" in self.detail:
            lo, hi = self.detail["range"]
            return f"{tag} {self.name}: {self.value:.3f} in [{lo:.2f}, {hi:.2f}]"
        op = ">=" if self.detail.get("direction") == ">=" else "<="
        return f"{tag} {self.name}: {self.value:.3e} {op} {self.bound:.1e}"

    def usage(self) -> float:
        """Fraction of the allowed budget consumed; above 1 means failure."""
        if "range" in self.detail:
            lo, hi = self.detail["range"]
            return abs(self.value - (lo + hi) / 2) / ((hi - lo) / 2)
        if self.detail.get("direction") == ">=":
            return self.bound / self.value if self.value > 0 else float("inf")
        return self.value / self.bound

    def to_dict(self) -> dict:
        return asdict(self)


def _grids(dims, sizes, lengths=None):
    for n in dims:
        for N in sizes:
            yield GridSpec((N,) * n, lengths if lengths is None else tuple(lengths)[:n])


def corpus(dims=CORE_DIMS, sizes=CORE_SIZES, seeds=CORE_SEEDS, kind="paravector", recipe="bandlimited_random"):
    """Seeded mean-zero Nyquist-free fields over every (n, N) combination."""
    for spec in _grids(dims, sizes):
        if kind == "quaternion" and spec.n != 3:
            continue
        for seed in range(seeds):
            yield synth_field(spec, kind, recipe, seed)


def _part_error(result, expect, norm_f) -> float:
    worst = 0.0
    for got, want in zip(result.parts(), expect):
        diff = got.components if want is None else got.components - want.components
        worst = max(worst, lp_norm(SampledField(got.spec, got.kind, diff)))
    return relative(worst, norm_f)


def decomposition_checks(fields, tol=TOL["identity"]) -> list[Check]:
    """Reconstruction, uniqueness, energy, orthogonality and Hodge checks."""
    worst = {k: 0.0 for k in ("reconstruction", "uniqueness", "pythagoras", "orthogonality",
                               "divergence", "curl")}
    count = 0
    label = "paravector"
    for f in fields:
        count += 1
        label = "paravector" if f.kind == "paravector" else "homogeneous"
        plan = make_plan(f.spec)
        if f.kind == "paravector":
            res = decompose_paravector(f, plan)
            decomp = partial(decompose_paravector, cross_check=False)
        else:
            res = decomp = decompose_homogeneous
            res = decomp(f, plan)
        rep = res.report["residuals"]
        norm_f = res.report["norms"]["input"]
        worst["reconstruction"] = max(worst["reconstruction"], rep["reconstruction"])
        worst["pythagoras"] = max(worst["pythagoras"], rep["pythagoras"])
        cross = res.report["crossTerms"]
        orth = max(cross.values()) / norm_f ** 2
        worst["orthogonality"] = max(worst["orthogonality"], orth)
        hodge = hodge_tangential_check(res, plan)
        worst["divergence"] = max(worst["divergence"], relative(hodge["divResidual"], norm_f))
        worst["curl"] = max(worst["curl"], relative(hodge["curlResidual"], norm_f))
        fp, fm, f0 = res.parts()
        for i, part in enumerate((fp, fm, f0)):
            again = decomp(part, plan)
            expect = [None, None, None]
            expect[i] = part
            worst["uniqueness"] = max(worst["uniqueness"], _part_error(again, expect, norm_f))
    return [Check.at_most(f"{label}.{k}", v, tol, fields=count) for k, v in worst.items()] if count else []


def quaternion_checks(fields, tol=TOL["identity"]) -> list[Check]:
    worst = {"reconstruction": 0.0, "pythagoras": 0.0, "orthogonality": 0.0, "uniqueness": 0.0}
    count = 0
    for f in fields:
        count += 1
        split = decompose_quaternionic(f)
        rep = split.report
        norm_f = rep["norms"]["input"]
        worst["reconstruction"] = max(worst["reconstruction"], rep["residuals"]["reconstruction"])
        worst["pythagoras"] = max(worst["pythagoras"], rep["residuals"]["pythagoras"])
        worst["orthogonality"] = max(worst["orthogonality"], rep["crossTerms"]["c12"] / norm_f ** 2)
        again = decompose_quaternionic(split.f_plus)
        worst["uniqueness"] = max(worst["uniqueness"], relative(lp_norm(again.f_minus), norm_f),
                                  relative(lp_norm(again.f_plus - split.f_plus), norm_f))
    return [Check.at_most(f"quaternion.{k}", v, tol, fields=count) for k, v in worst.items()]


def operator_checks(dims=CORE_DIMS, sizes=CORE_SIZES, seeds=2, tol=TOL["identity"]) -> list[Check]:
    """H^2 = I, chi+ chi- = 0, FFT path vs direct DFT, n = 1 conjugate function."""
    worst = {"hilbertSquare": 0.0, "chiProduct": 0.0, "chiMultiplier": 0.0, "dftOracle": 0.0}
    for spec in _grids(dims, sizes):
        plan = make_plan(spec)
        # multiplier level: chi+ chi- as Clifford-valued symbols
        cp = np.stack(_embed_symbol(chi(1, plan), spec.n))
        cm = np.stack(_embed_symbol(chi(-1, plan), spec.n))
        prod = clifford_product_arrays(cp, cm, spec.n)
        # the symbol identity needs |xi/|xi|| = 1: skip DC and the Nyquist planes
        prod[:, ~lowpass_mask(spec)] = 0.0
        worst["chiMultiplier"] = max(worst["chiMultiplier"], float(np.max(np.abs(prod))))
        for seed in range(seeds):
            f = embed_multivector(synth_field(spec, "paravector", "bandlimited_random", seed))
            norm_f = lp_norm(f)
            hh = hilbert(hilbert(f, plan), plan)
            worst["hilbertSquare"] = max(worst["hilbertSquare"], relative(lp_norm(hh - f), norm_f))
            pm = plemelj(plemelj(f, -1, plan), 1, plan)
            worst["chiProduct"] = max(worst["chiProduct"], relative(lp_norm(pm), norm_f))
            if seed == 0 and spec.size <= ORACLE_MAX_POINTS:
                g = synth_field(spec, "scalar", "bandlimited_random", seed)
                for k in range(1, spec.n + 1):
                    a, b = riesz(g, k, plan), riesz_oracle_dft(g, k)
                    worst["dftOracle"] = max(worst["dftOracle"], relative(lp_norm(a - b), lp_norm(g)))
    checks = [Check.at_most(f"operators.{k}", v, tol) for k, v in worst.items()]
    checks.append(Check.at_most("operators.conjugateFunction", conjugate_function_error(), tol))
    return checks


def _embed_symbol(coeffs, n):
    out = [np.zeros_like(coeffs[0]) for _ in range(1 << n)]
    out[0] = coeffs[0]
    for k in range(1, n + 1):
        out[1 << (k - 1)] = coeffs[k]
    return out


def conjugate_function_error(sizes=(16, 32, 64), seeds=3) -> float:
    """max |R_1 g - Im analytic_signal(g)| / max |g| on 1-D grids."""
    worst = 0.0
    for N in sizes:
        spec = GridSpec((N,))
        for seed in range(seeds):
            g = synth_field(spec, "scalar", "bandlimited_random", seed)
            ours = riesz(g, 1).components[0]
            classical = np.imag(scipy.signal.hilbert(g.components[0]))
            worst = max(worst, float(np.max(np.abs(ours - classical)) / np.max(np.abs(g.components[0]))))
    return worst


def core_suite(dims=CORE_DIMS, sizes=CORE_SIZES, seeds=CORE_SEEDS) -> list[Check]:
    checks = decomposition_checks(list(corpus(dims, sizes, seeds)))
    checks += decomposition_checks(list(corpus(dims, sizes, seeds, kind="vector")))
    checks += operator_checks(dims, sizes)
    return checks


def quaternion_suite(sizes=CORE_SIZES, seeds=CORE_SEEDS) -> list[Check]:
    checks = quaternion_checks(list(corpus((3,), sizes, seeds, kind="quaternion")))
    checks += monogenicity_checks(systems=("quaternion",))
    return checks


def localized_hardy(spec: GridSpec, width: float, sign: int = 1) -> SampledField:
    recipe = {"name": "hardy_plus" if sign > 0 else "hardy_minus",
              "h": {"name": "gaussian_bump", "width": width, "profile": "mexican_hat"}}
    return synth_field(spec, "paravector", recipe)


def extension_probes(spec: GridSpec, width: float, side: int, count: int = 5, factors=(0.5, 1.0, 2.0)):
    from .silent import default_probes

    return default_probes(spec, width, factors=factors, count=count, span=1.0, sides=(side,))


def _paravector_coeffs(mv, n) -> np.ndarray:
    return np.array([mv.coeffs[0]] + [mv.coeffs[1 << (k - 1)] for k in range(1, n + 1)])


def extension_agreement(spec: GridSpec, width: float) -> dict:
    """Worst pairwise relative disagreement of the three representations, both sides."""
    n = spec.n
    plan = make_plan(spec)
    out = {}
    for side in (1, -1):
        g = localized_hardy(spec, width, side)
        g0 = SampledField(spec, "scalar", g.components[:1])
        pts = extension_probes(spec, width, side)
        poisson = poisson_extend_at(g, pts, plan)
        cauchy = np.array([_paravector_coeffs(cauchy_integral(g, x), n) for x in pts])
        # Cauchy of the opposite-side data must vanish on this side
        other = localized_hardy(spec, width, -side)
        leak = np.array([_paravector_coeffs(cauchy_integral(other, x), n) for x in pts])
        scale = np.max(np.abs(poisson))
        tag = "upper" if side > 0 else "lower"
        out[f"{tag}.cauchyPoisson"] = float(np.max(np.abs(cauchy - poisson)) / scale)
        out[f"{tag}.cauchyLeak"] = float(np.max(np.abs(leak)) / np.max(np.abs(poisson_extend_at(other, pts * [[-1] + [1] * n], plan))))
        if n >= 2:
            newton = np.array([_paravector_coeffs(newton_gradient(g0, x, side), n) for x in pts])
            out[f"{tag}.newtonPoisson"] = float(np.max(np.abs(newton - poisson)) / scale)
            out[f"{tag}.newtonCauchy"] = float(np.max(np.abs(newton - cauchy)) / np.max(np.abs(cauchy)))
    return out


def contraction_ratios(spec: GridSpec, width: float, ps=(4 / 3, 2.0, 4.0), seed: int = 0) -> dict:
    """max over heights of ||Sc u(t)||_p / ||phi||_p for a localized scalar phi."""
    phi = synth_field(spec, "scalar", {"name": "localized_random", "width": width}, seed)
    heights = np.array([0.5, 1.0, 2.0]) * width
    slab = poisson_extend(phi, heights)
    out = {}
    for p in ps:
        base = lp_norm(phi, p)
        prof = hardy_norm_profile(slab, p)
        out[f"p={p:.4g}"] = max(prof.norms) / base
    return out


def extension_checks(configs=(((2, 64), 8), ((3, 32), 8)), tol=TOL["extension"]) -> list[Check]:
    checks = []
    for (n, N), frac in configs:
        spec = GridSpec((N,) * n)
        width = min(spec.lengths) / frac
        agree = extension_agreement(spec, width)
        checks.append(Check.at_most(f"extension.n{n}.agreement", max(agree.values()), tol, **agree))
        ratios = contraction_ratios(spec, width)
        checks.append(Check.at_most(f"extension.n{n}.contraction", max(ratios.values()),
                                    1 + TOL["contraction"], **ratios))
    return checks


def monogenicity_checks(systems=("paravector", "vector", "quaternion"), size: int = 16,
                        height: float = 0.5, step: float = 0.1) -> list[Check]:
    """Order-2 convergence for Hardy data; Theta(1) residuals for the controls."""
    lo, hi = TOL["order"] * (1 - TOL["orderSlack"]), TOL["order"] * (1 + TOL["orderSlack"])
    checks = []
    for system in systems:
        dims = (3,) if system == "quaternion" else (1, 2, 3)
        kind = system
        for n in dims:
            spec = GridSpec((size,) * n)
            f = synth_field(spec, kind, "hardy_plus", seed=n)
            if system == "quaternion":
                q = synth_field(spec, "quaternion", "bandlimited_random", seed=11)
                f = decompose_quaternionic(q).f_plus
            res = monogenicity_order(f, height, step, system)
            checks.append(Check(f"monogenicity.{system}.n{n}.order", res["order"], TOL["order"],
                                bool(lo <= res["order"] <= hi), {"range": [lo, hi], **res}))
            ctrl = synth_field(spec, kind, "hardy_minus", seed=n) if system != "quaternion" else \
                decompose_quaternionic(synth_field(spec, "quaternion", "bandlimited_random", seed=11)).f_minus
            bad = monogenicity_order(ctrl, height, step, system)
            scale = _derivative_scale(ctrl, height)
            checks.append(Check.at_least(f"monogenicity.{system}.n{n}.control", bad["residual_half"] / scale,
                                         TOL["theta"], **bad))
        if system == "quaternion":
            spec = GridSpec((size,) * 3)
            q = synth_field(spec, "quaternion", "bandlimited_random", seed=11)
            fp = decompose_quaternionic(q).f_plus
            res = monogenicity_order(fp, height, step, "clifford")
            scale = _derivative_scale(fp, height)
            checks.append(Check.at_least("monogenicity.quaternion.cliffordSystemGap", res["residual_half"] / scale,
                                         TOL["theta"], **res))
    return checks


def _derivative_scale(f: SampledField, height: float) -> float:
    """L^2 norm of the normal derivative of the extension at ``height``."""
    plan = make_plan(f.spec)
    from .grid import forward, spectral_l2

    hat = forward(f.components, f.n) * plan.kmag * np.exp(-height * plan.kmag)
    return spectral_l2(hat, f.spec)


def extension_suite() -> list[Check]:
    return extension_checks() + monogenicity_checks()


def silence_checks(configs=(((2, 64), 16), ((3, 64), 16)), doubling=(((2, 64), 16), ((3, 32), 8)),
                   seed: int = 5, tol=TOL["silence"]) -> list[Check]:
    checks = []
    for (n, N), frac in configs:
        spec = GridSpec((N,) * n)
        rep = silent_experiment(spec, {"name": "localized_random", "width": min(spec.lengths) / frac}, seed)
        for key, val in rep["ratios"].items():
            checks.append(Check.at_most(f"silence.n{n}.{key}", val, tol))
    for (n, N), frac in doubling:
        spec = GridSpec((N,) * n)
        width = min(spec.lengths) / frac
        recipe = {"name": "localized_random", "width": width}
        base = silent_experiment(spec, recipe, seed)["ratios"]
        big = silent_experiment(spec.scaled(2), recipe, seed)["ratios"]
        worst = max(big[k] / base[k] for k in ("upperMinusZero", "lowerPlusZero"))
        checks.append(Check.at_most(f"silence.n{n}.periodDoubling", worst, 0.5,
                                    base={k: base[k] for k in ("upperMinusZero", "lowerPlusZero")},
                                    doubled={k: big[k] for k in ("upperMinusZero", "lowerPlusZero")}))
    return checks


def run_suite(name: str, **kw) -> list[Check]:
    if name == "all":
        out = []
        for s in SUITES:
            out += run_suite(s, **kw)
        return out
    if name == "core":
        dims = (kw["n"],) if kw.get("n") else CORE_DIMS
        sizes = (kw["size"],) if kw.get("size") else CORE_SIZES
        return core_suite(dims, sizes, kw.get("seeds") or CORE_SEEDS)
    if name == "quaternion":
        return quaternion_suite(seeds=kw.get("seeds") or CORE_SEEDS)
    if name == "extension":
        return extension_suite()
    if name == "silence":
        return silence_checks()
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def first_failure(checks) -> Check | None:
    return next((c for c in checks if not c.passed), None)
