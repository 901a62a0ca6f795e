"""Hardy-Hodge decompositions of sampled fields.

Three variants:

* paravector fields f = f_0 + sum f_k e_k  ->  f+ + f- + f0
* vector fields (f_1, ..., f_{n+1})        ->  f+ + f- + f0   (homogeneous)
* quaternion fields on R^3                 ->  f+ + f-

The boundary Hardy pieces are built from one scalar each: for paravectors
f+- = (I +- H) h+-, h+- = Sc{(I +- H) f}/2; for vectors the traces of upper and
lower harmonic gradients are (+-R_1 h, ..., +-R_n h, h). The remainder f0 is
tangent and divergence free.

Everything is evaluated on stacked DFTs; each output field costs one inverse
transform.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .clifford import clifford_product_arrays, grades
from .errors import DCViolation, KindMismatch
from .grid import SampledField, forward, inverse_real, lp_norm, relative, spectral_l2
from .spectral import MultiplierPlan, hilbert_hat, make_plan

DECOMPOSE_DC_POLICIES = ("error", "strip", "tolerate")
CLIFFORD_PATH_MAX_N = 4
REPORT_EXPONENTS = (4 / 3, 4.0)


@dataclass
class HardyHodgeResult:
    f_plus: SampledField
    f_minus: SampledField
    f_zero: SampledField | None
    report: dict = field(default_factory=dict)

    def parts(self) -> tuple[SampledField, ...]:
        if self.f_zero is None:
            return (self.f_plus, self.f_minus)
        return (self.f_plus, self.f_minus, self.f_zero)

    def to_json(self) -> str:
        return json.dumps(self.report, indent=2, sort_keys=True)


class QuaternionSplit(NamedTuple):
    f_plus: SampledField
    f_minus: SampledField
    report: dict


def _resolve_plan(f: SampledField, plan: MultiplierPlan | None) -> MultiplierPlan:
    if plan is None:
        return make_plan(f.spec)
    if plan.spec != f.spec:
        raise KindMismatch("plan was built for a different grid")
    return plan


def _apply_dc(f: SampledField, normal: list[int], policy: str, eps: float) -> tuple[np.ndarray, list[float]]:
    """Handle means in the normal-type components; returns (components, means)."""
    if policy not in DECOMPOSE_DC_POLICIES:
        raise ValueError(f"dc policy must be one of {DECOMPOSE_DC_POLICIES}, got {policy!r}")
    comps = np.array(f.components)
    means = [float(m) for m in f.means()]
    if policy == "strip":
        for c in normal:
            comps[c] -= means[c]
        return comps, means
    scale = float(np.max(np.abs(comps), initial=0.0))
    for c in normal:
        if abs(means[c]) > eps * max(scale, 1e-300) and means[c] != 0.0:
            raise DCViolation(
                f"component {c} has mean {means[c]:.3e}; no Hardy or divergence-free field on the "
                f"torus carries a constant there (use --dc-policy strip)"
            )
    return comps, means


def _nyquist_fraction(hat: np.ndarray, plan: MultiplierPlan) -> float:
    mask = np.zeros(plan.spec.shape, dtype=bool)
    for nyq in plan.nyquist:
        mask |= nyq
    total = float(np.sum(np.abs(hat) ** 2))
    if total == 0:
        return 0.0
    return math.sqrt(float(np.sum(np.abs(hat[:, mask]) ** 2)) / total)


def divergence_hat(hat_tangent: np.ndarray, plan: MultiplierPlan) -> np.ndarray:
    return sum(plan.kappa[k] * hat_tangent[k] for k in range(plan.spec.n))


def _tangential(f: SampledField, tol: float = 1e-12) -> np.ndarray:
    if f.kind == "paravector":
        normal, tang = f.components[0], f.components[1:]
    elif f.kind == "vector":
        normal, tang = f.components[-1], f.components[:-1]
    else:
        raise KindMismatch(f"divergence needs a tangent paravector or vector field, got {f.kind}")
    scale = float(np.max(np.abs(f.components), initial=0.0))
    if np.max(np.abs(normal), initial=0.0) > tol * max(scale, 1e-300):
        raise KindMismatch("field is not tangent: its normal component is nonzero")
    return tang


def divergence_residual(f: SampledField, plan: MultiplierPlan | None = None) -> float:
    """L^2 norm of sum_k kappa_k f_k^ (Parseval-scaled) of a tangent field."""
    plan = _resolve_plan(f, plan)
    hat = forward(_tangential(f), f.n)
    return spectral_l2(divergence_hat(hat, plan), f.spec)


def curl_residual(tangent: np.ndarray, plan: MultiplierPlan) -> float:
    """max over j < k of || kappa_j g_k^ - kappa_k g_j^ ||_2."""
    n = plan.spec.n
    hat = forward(tangent, n)
    worst = 0.0
    for j in range(n):
        for k in range(j + 1, n):
            worst = max(worst, spectral_l2(plan.kappa[j] * hat[k] - plan.kappa[k] * hat[j], plan.spec))
    return worst


def _embed_hat(hat_para: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(((1 << n),) + hat_para.shape[1:], dtype=complex)
    out[0] = hat_para[0]
    for k in range(1, n + 1):
        out[1 << (k - 1)] = hat_para[k]
    return out


def scalar_product(f: SampledField, g: SampledField) -> float:
    """<f, g> = Sc integral of f times the conjugate of g."""
    f._compatible(g)
    if f.kind == "paravector":
        n = f.n
        a = _embed_hat(f.components, n).real
        b = _embed_hat(g.components, n).real
        conj = np.where(grades(n) & 1, -1.0, 1.0).reshape((-1,) + (1,) * n)
        prod = clifford_product_arrays(a, b * conj, n)
        return float(np.sum(prod[0])) * f.spec.cell_volume
    # vector and quaternion kinds: Sc(f conj(g)) is the Euclidean dot product
    return float(np.sum(f.components * g.components)) * f.spec.cell_volume


def _clifford_pair_integral(f: SampledField, g: SampledField) -> np.ndarray:
    """Full multivector integral of f conj(g) for paravector fields."""
    n = f.n
    a = _embed_hat(f.components, n).real
    b = _embed_hat(g.components, n).real
    conj = np.where(grades(n) & 1, -1.0, 1.0).reshape((-1,) + (1,) * n)
    prod = clifford_product_arrays(a, b * conj, n)
    return prod.reshape(len(prod), -1).sum(axis=1) * f.spec.cell_volume


def orthogonality_report(f_plus: SampledField, f_minus: SampledField, f_zero: SampledField | None) -> dict:
    """Pairwise |<a, b>| plus, for paravectors, the full Clifford integrals."""
    out = {"c12": abs(scalar_product(f_plus, f_minus))}
    if f_zero is None:
        out["c13"] = out["c23"] = 0.0
    else:
        out["c13"] = abs(scalar_product(f_plus, f_zero))
        out["c23"] = abs(scalar_product(f_minus, f_zero))
    if f_plus.kind == "paravector":
        out["equality1"] = float(np.linalg.norm(_clifford_pair_integral(f_plus, f_minus)))
        if f_zero is not None:
            sym13 = _clifford_pair_integral(f_plus, f_zero) + _clifford_pair_integral(f_zero, f_plus)
            sym23 = _clifford_pair_integral(f_minus, f_zero) + _clifford_pair_integral(f_zero, f_minus)
            out["equality3"] = float(max(np.linalg.norm(sym13), np.linalg.norm(sym23)))
        else:
            out["equality3"] = 0.0
    return out


def _report(f: SampledField, parts: list[SampledField], plan: MultiplierPlan, means, extra: dict) -> dict:
    norm_f = lp_norm(f)
    norms = [lp_norm(p) for p in parts]
    recon = parts[0].components.copy()
    for p in parts[1:]:
        recon = recon + p.components
    recon_res = lp_norm(SampledField(f.spec, f.kind, f.components - recon))
    energy = sum(v ** 2 for v in norms)
    report = {
        "norms": {
            "input": norm_f,
            "plus": norms[0],
            "minus": norms[1],
            "zero": norms[2] if len(norms) > 2 else 0.0,
        },
        "residuals": {
            "reconstruction": relative(recon_res, norm_f),
            "pythagoras": relative(abs(norm_f ** 2 - energy), norm_f ** 2),
        },
        # the split is p-independent; other exponents are reported, not asserted
        "lpNorms": {
            f"p={p:.4g}": {name: lp_norm(g, p) for name, g in zip(("input", "plus", "minus", "zero"), [f] + parts)}
            for p in REPORT_EXPONENTS
        },
        "dcMeans": list(means),
        "gridSpec": plan.spec.to_dict(),
        "kind": f.kind,
    }
    cross = orthogonality_report(parts[0], parts[1], parts[2] if len(parts) > 2 else None)
    report["crossTerms"] = cross
    report["residuals"]["crossTerms"] = relative(max(cross["c12"], cross["c13"], cross["c23"]), norm_f ** 2)
    if len(parts) > 2:
        div = divergence_residual(parts[2], plan)
        report["residuals"]["divergence"] = div
        report["residuals"]["divergenceRelative"] = relative(div, norm_f)
    report["residuals"].update(extra)
    return report


def _paravector_hats(hat: np.ndarray, plan: MultiplierPlan):
    n = plan.spec.n
    m = [plan.riesz_multiplier(k) for k in range(1, n + 1)]
    # Sc{Hf} = sum_k R_k f_k
    sc_h = sum(m[k - 1] * hat[k] for k in range(1, n + 1))
    h_plus = 0.5 * (hat[0] + sc_h)
    h_minus = 0.5 * (hat[0] - sc_h)
    plus = np.stack([h_plus] + [-m[k] * h_plus for k in range(n)])
    minus = np.stack([h_minus] + [m[k] * h_minus for k in range(n)])
    # f0 = sum_k [ (sum_{l != k} -R_l^2) f_k + R_k sum_{l != k} R_l f_l ] e_k
    zero = np.zeros_like(hat)
    for k in range(1, n + 1):
        others = [l for l in range(1, n + 1) if l != k]
        term = sum((-(m[l - 1] ** 2) for l in others), np.zeros(plan.spec.shape)) * hat[k]
        term = term + m[k - 1] * sum((m[l - 1] * hat[l] for l in others), np.zeros(plan.spec.shape))
        zero[k] = term
    # tangential means are divergence free and belong to f0
    dc = (0,) * n
    zero[(slice(1, None),) + dc] = hat[(slice(1, None),) + dc]
    return plus, minus, zero


def zero_part_single_formula(f: SampledField, plan: MultiplierPlan | None = None) -> SampledField:
    """f0 = tangential part of f minus its gradient part -R_k sum_l R_l f_l."""
    plan = _resolve_plan(f, plan)
    n = f.n
    hat = forward(f.components, n)
    m = [plan.riesz_multiplier(k) for k in range(1, n + 1)]
    s = sum(m[l] * hat[l + 1] for l in range(n))
    zero = np.zeros_like(hat)
    for k in range(1, n + 1):
        zero[k] = hat[k] + m[k - 1] * s
    return SampledField(f.spec, "paravector", inverse_real(zero, f.spec))


def clifford_path(f: SampledField, plan: MultiplierPlan | None = None) -> tuple[SampledField, float]:
    """f0 recovered through full Clifford arithmetic.

    Evaluates (I+H)/2 Nsc{(I+H)f/2} + (I-H)/2 Nsc{(I-H)f/2}, which equals
    (f + f0)/2. Returns ``(f0, grade2)`` where ``grade2`` is the largest
    bivector-or-higher coefficient of that expression (zero in exact arithmetic).
    """
    plan = _resolve_plan(f, plan)
    n = f.n
    mv = _embed_hat(forward(f.components, n), n)
    hmv = hilbert_hat(mv, "multivector", plan)
    total = np.zeros_like(mv)
    for s in (1, -1):
        half = 0.5 * (mv + s * hmv)
        half[0] = 0.0
        total += 0.5 * (half + s * hilbert_hat(half, "multivector", plan))
    space = inverse_real(total, f.spec)
    high = [b for b in range(1 << n) if bin(b).count("1") >= 2]
    grade2 = float(np.max(np.abs(space[high]), initial=0.0)) if high else 0.0
    para = np.stack([space[0]] + [space[1 << (k - 1)] for k in range(1, n + 1)])
    zero = 2.0 * para - f.components
    # H vanishes at DC, so the constant tangential part has to be put back by hand
    zero[1:] += f.means()[1:, None].reshape((n,) + (1,) * n)
    return SampledField(f.spec, "paravector", zero), grade2


def decompose_paravector(
    f: SampledField,
    plan: MultiplierPlan | None = None,
    dc_policy: str = "error",
    eps: float = 1e-12,
    cross_check: bool = True,
) -> HardyHodgeResult:
    """Split a paravector field into upper Hardy, lower Hardy and divergence-free parts.

    Parameters
    ----------
    f : SampledField
        Paravector field ``[f_0, ..., f_n]``.
    plan : MultiplierPlan, optional
        Riesz multipliers for ``f.spec``; built on demand.
    dc_policy : {"error", "strip", "tolerate"}
        What to do with a nonzero mean of ``f_0``. ``strip`` subtracts it
        (reported under ``dcMeans``); ``tolerate`` accepts means up to ``eps``
        relative. Tangential means always go to ``f0``.
    cross_check : bool
        Also evaluate ``f0`` by the single-formula and full-Clifford routes and
        report their disagreement.

    Returns
    -------
    HardyHodgeResult
    """
    if f.kind != "paravector":
        raise KindMismatch(f"decompose_paravector needs a paravector field, got {f.kind}")
    plan = _resolve_plan(f, plan)
    comps, means = _apply_dc(f, [0], dc_policy, eps)
    f = SampledField(f.spec, "paravector", comps)
    hat = forward(comps, f.n)
    plus, minus, zero = _paravector_hats(hat, plan)
    parts = [SampledField(f.spec, "paravector", inverse_real(h, f.spec)) for h in (plus, minus, zero)]
    extra = {"nyquistFraction": _nyquist_fraction(hat, plan)}
    if cross_check:
        norm_f = lp_norm(f)
        alt = zero_part_single_formula(f, plan)
        extra["termAgreement"] = relative(lp_norm(alt - parts[2]), norm_f)
        if f.n <= CLIFFORD_PATH_MAX_N:
            cl, g2 = clifford_path(f, plan)
            extra["cliffordPathAgreement"] = relative(lp_norm(cl - parts[2]), norm_f)
            extra["grade2"] = relative(g2, float(np.max(np.abs(comps), initial=0.0)))
    report = _report(f, parts, plan, means, extra)
    return HardyHodgeResult(*parts, report=report)


def decompose_homogeneous(
    f: SampledField,
    plan: MultiplierPlan | None = None,
    dc_policy: str = "error",
    eps: float = 1e-12,
) -> HardyHodgeResult:
    """Split (f_1, ..., f_{n+1}) into traces of upper/lower harmonic gradients plus f0.

    With h+- = (f_{n+1} -+ sum_k R_k f_k)/2 the Hardy parts are
    (R_1 h+, ..., R_n h+, h+) and (-R_1 h-, ..., -R_n h-, h-).
    """
    if f.kind != "vector":
        raise KindMismatch(f"decompose_homogeneous needs a vector field, got {f.kind}")
    plan = _resolve_plan(f, plan)
    n = f.n
    comps, means = _apply_dc(f, [n], dc_policy, eps)
    f = SampledField(f.spec, "vector", comps)
    hat = forward(comps, n)
    m = [plan.riesz_multiplier(k) for k in range(1, n + 1)]
    s = sum(m[k] * hat[k] for k in range(n))
    h_plus = 0.5 * (hat[n] - s)
    h_minus = 0.5 * (hat[n] + s)
    plus = np.stack([m[k] * h_plus for k in range(n)] + [h_plus])
    minus = np.stack([-m[k] * h_minus for k in range(n)] + [h_minus])
    zero = hat - plus - minus
    zero[n] = 0.0
    parts = [SampledField(f.spec, "vector", inverse_real(h, f.spec)) for h in (plus, minus, zero)]
    report = _report(f, parts, plan, means, {"nyquistFraction": _nyquist_fraction(hat, plan)})
    return HardyHodgeResult(*parts, report=report)


def vector_to_factored(f: SampledField) -> SampledField:
    """Right-factor e_{n+1} out of a vector field and conjugate.

    f = F e_{n+1} with F = f_{n+1} + sum f_k e_k e_{n+1}^{-1}; since
    e_{n+1} F = conj(F) e_{n+1}, f is monogenic in x_{n+1} > 0 exactly when
    conj(F) = (f_{n+1}, -f_1, ..., -f_n) is a paravector Hardy function in
    x_0 > 0 (with e_k e_{n+1}^{-1} playing the role of e_k).
    """
    if f.kind != "vector":
        raise KindMismatch(f"expected a vector field, got {f.kind}")
    n = f.n
    return SampledField(f.spec, "paravector", np.concatenate([f.components[n:], -f.components[:n]]))


def factored_to_vector(g: SampledField) -> SampledField:
    if g.kind != "paravector":
        raise KindMismatch(f"expected a paravector field, got {g.kind}")
    return SampledField(g.spec, "vector", np.concatenate([-g.components[1:], g.components[:1]]))


def decompose_homogeneous_by_factoring(f: SampledField, plan: MultiplierPlan | None = None, **kw) -> HardyHodgeResult:
    """Reference route: reduce to the paravector decomposition via e_{n+1}."""
    res = decompose_paravector(vector_to_factored(f), plan, cross_check=False, **kw)
    parts = [factored_to_vector(p) for p in res.parts()]
    return HardyHodgeResult(*parts, report=res.report)


def decompose_quaternionic(
    f: SampledField,
    plan: MultiplierPlan | None = None,
    dc_policy: str = "error",
    eps: float = 1e-12,
) -> QuaternionSplit:
    """f = f+ + f- with f+- = (I +- H) f / 2, quaternionic H on R^3."""
    if f.kind != "quaternion":
        raise KindMismatch(f"decompose_quaternionic needs a quaternion field, got {f.kind}")
    if f.n != 3:
        raise KindMismatch(f"quaternionic decomposition lives on R^3, got n={f.n}")
    plan = _resolve_plan(f, plan)
    comps, means = _apply_dc(f, [0, 1, 2, 3], dc_policy, eps)
    f = SampledField(f.spec, "quaternion", comps)
    hat = forward(comps, 3)
    hh = hilbert_hat(hat, "quaternion", plan)
    plus = SampledField(f.spec, "quaternion", inverse_real(0.5 * (hat + hh), f.spec))
    minus = SampledField(f.spec, "quaternion", inverse_real(0.5 * (hat - hh), f.spec))
    report = _report(f, [plus, minus], plan, means, {"nyquistFraction": _nyquist_fraction(hat, plan)})
    return QuaternionSplit(plus, minus, report)


def hodge_tangential_check(result: HardyHodgeResult, plan: MultiplierPlan | None = None) -> dict:
    """Curl of the tangential part of f+ + f- (a gradient) and divergence of f0."""
    g = result.f_plus + result.f_minus
    plan = _resolve_plan(g, plan)
    if g.kind == "paravector":
        tangent = g.components[1:]
    elif g.kind == "vector":
        tangent = g.components[:-1]
    else:
        raise KindMismatch(f"no tangential part for {g.kind} fields")
    div = divergence_residual(result.f_zero, plan) if result.f_zero is not None else 0.0
    return {"curlResidual": curl_residual(tangent, plan), "divResidual": div}


def decompose(f: SampledField, plan: MultiplierPlan | None = None, **kw):
    """Dispatch on field kind."""
    if f.kind == "paravector":
        return decompose_paravector(f, plan, **kw)
    if f.kind == "vector":
        return decompose_homogeneous(f, plan, **kw)
    if f.kind == "quaternion":
        return decompose_quaternionic(f, plan, **kw)
    raise KindMismatch(f"no decomposition for {f.kind} fields")
