import json
import math

import numpy as np
import pytest

from hardyhodge.clifford import conjugate
from hardyhodge.errors import KindMismatch, ProbeError, SlabError
from hardyhodge.extension import (
    SlabSample,
    cauchy_boundary_limit,
    cauchy_integral,
    hardy_norm_profile,
    laplace_residual,
    monogenicity_order,
    monogenicity_residual,
    newton_gradient,
    omega_n,
    poisson_extend,
    poisson_extend_at,
    write_slab,
)
from hardyhodge.fieldio import read_field
from hardyhodge.grid import GridSpec, SampledField, lp_norm
from hardyhodge.hodge import decompose_quaternionic
from hardyhodge.spectral import plemelj
from hardyhodge.synth import synth_field
from hardyhodge.verify import extension_agreement, localized_hardy


def test_omega_values():
    assert omega_n(1) == pytest.approx(2 * math.pi, rel=1e-15)
    assert omega_n(2) == pytest.approx(4 * math.pi, rel=1e-15)
    assert omega_n(3) == pytest.approx(2 * math.pi ** 2, rel=1e-15)
    with pytest.raises(ValueError):
        omega_n(0)


def test_single_mode_extension():
    spec = GridSpec((32, 32))
    f = synth_field(spec, "scalar", {"name": "single_mode", "modes": [1, 0]})
    slab = poisson_extend(f, [0.3, 1.0])
    for t, v in zip(slab.heights, slab.values):
        assert np.max(np.abs(v.components - math.exp(-t) * f.components)) <= 1e-15


def test_dc_extends_as_constant():
    spec = GridSpec((8, 8))
    f = SampledField(spec, "scalar", np.full((1, 8, 8), 2.0))
    assert np.allclose(poisson_extend(f, [5.0]).values[0].components, 2.0, rtol=0, atol=1e-15)


def test_heights_validated():
    spec = GridSpec((8, 8))
    f = synth_field(spec, "scalar", "bandlimited_random")
    with pytest.raises(SlabError):
        poisson_extend(f, [0.0, 0.1])
    with pytest.raises(SlabError):
        poisson_extend(f, [-1.0])
    with pytest.raises(SlabError):
        poisson_extend(f, [0.2, 0.1])
    with pytest.raises(SlabError):
        SlabSample(spec, np.array([0.1]), (synth_field(GridSpec((8, 4)), "scalar", "bandlimited_random"),))


def test_small_heights_recover_boundary():
    spec = GridSpec((32, 32))
    f = synth_field(spec, "paravector", {"name": "bandlimited_random", "max_freq": 4}, seed=1)
    slab = poisson_extend(f, [0.025, 0.05, 0.1])
    errs = [lp_norm(v - f) for v in slab.values]
    assert errs[0] < errs[1] < errs[2]
    assert errs[0] < 0.1 * lp_norm(f)


def test_semigroup():
    spec = GridSpec((16, 16, 16))
    f = synth_field(spec, "paravector", "bandlimited_random", seed=2)
    once = poisson_extend(f, [0.7]).values[0]
    twice = poisson_extend(poisson_extend(f, [0.3]).values[0], [0.4]).values[0]
    assert lp_norm(once - twice) <= 1e-12 * lp_norm(f)


def test_off_grid_evaluation_matches_grid():
    spec = GridSpec((16, 16))
    f = synth_field(spec, "paravector", "bandlimited_random", seed=3)
    slab = poisson_extend(f, [0.4])
    x = spec.coordinates()
    i, j = 5, 11
    at = poisson_extend_at(f, [[0.4, x[0].ravel()[i], x[1].ravel()[j]], [-0.4, x[0].ravel()[i], x[1].ravel()[j]]])
    assert np.allclose(at[0], slab.values[0].components[:, i, j], atol=1e-13)
    assert np.allclose(at[1], at[0], atol=0)


@pytest.mark.parametrize("p", [4 / 3, 2.0, 4.0])
def test_contraction(p):
    spec = GridSpec((64, 64))
    width = spec.lengths[0] / 8
    phi = synth_field(spec, "scalar", {"name": "localized_random", "width": width}, seed=4)
    prof = hardy_norm_profile(poisson_extend(phi, np.array([0.5, 1.0, 2.0]) * width), p)
    assert max(prof.norms) <= lp_norm(phi, p) * (1 + 1e-12)
    assert prof.nonincreasing


def test_profile_of_zero_field():
    spec = GridSpec((8, 8))
    prof = hardy_norm_profile(poisson_extend(SampledField.zeros(spec, "paravector"), [0.1, 0.2]), 2)
    assert prof.norms == (0.0, 0.0) and prof.nonincreasing


def test_profile_sup_at_smallest_height():
    spec = GridSpec((32, 32))
    f = synth_field(spec, "paravector", {"name": "hardy_plus", "h": {"name": "bandlimited_random", "max_freq": 4}}, seed=5)
    prof = hardy_norm_profile(poisson_extend(f, [0.01, 0.1, 0.5, 1.0]), 2)
    assert prof.norms[0] == max(prof.norms)
    assert prof.norms[0] <= lp_norm(f)
    assert lp_norm(f) - prof.norms[0] < 0.1 * lp_norm(f)


def test_cauchy_zero_data():
    spec = GridSpec((16, 16))
    val = cauchy_integral(SampledField.zeros(spec, "paravector"), [0.5, 1.0, 1.0])
    assert not np.any(val.coeffs)


def test_cauchy_rejects_boundary_points():
    spec = GridSpec((16, 16))
    g = synth_field(spec, "paravector", "hardy_plus")
    with pytest.raises(ProbeError):
        cauchy_integral(g, [0.0, 1.0, 1.0])
    with pytest.raises(ProbeError):
        cauchy_integral(g, [0.5, 1.0])


@pytest.mark.parametrize("n,N", [(2, 64), (3, 32)])
def test_three_representations_agree(n, N):
    spec = GridSpec((N,) * n)
    agree = extension_agreement(spec, spec.lengths[0] / 8)
    assert max(agree.values()) <= 1e-2, agree


def test_cauchy_matches_poisson_in_one_dimension():
    spec = GridSpec((512,))
    agree = extension_agreement(spec, spec.lengths[0] / 32)
    assert max(agree.values()) <= 1e-2, agree


def test_newton_sign_conventions():
    spec = GridSpec((64, 64))
    width = spec.lengths[0] / 8
    g = localized_hardy(spec, width)
    g0 = SampledField(spec, "scalar", g.components[:1])
    x = [width, spec.lengths[0] / 2 + 0.2, spec.lengths[1] / 2]
    ref = conjugate(cauchy_integral(g, x)).coeffs
    good = conjugate(newton_gradient(g0, x, side=1)).coeffs
    bad = conjugate(newton_gradient(g0, x, side=1, convention="flipped")).coeffs
    scale = np.max(np.abs(ref))
    assert np.max(np.abs(good - ref)) <= 1e-2 * scale
    assert np.max(np.abs(bad - ref)) >= 0.5 * scale


def test_newton_errors_and_zero():
    spec = GridSpec((16, 16))
    zero = SampledField.zeros(spec, "scalar")
    assert not np.any(newton_gradient(zero, [0.3, 1.0, 1.0]).coeffs)
    with pytest.raises(ProbeError):
        newton_gradient(zero, [0.0, 1.0, 1.0])
    with pytest.raises(ProbeError):
        newton_gradient(zero, [0.3, 1.0, 1.0], side=-1)
    with pytest.raises(ValueError):
        newton_gradient(SampledField.zeros(GridSpec((16,)), "scalar"), [0.3, 1.0])
    with pytest.raises(ValueError):
        newton_gradient(zero, [0.3, 1.0, 1.0], convention="other")


def test_newton_far_field():
    spec = GridSpec((64, 64), (40.0, 40.0))
    width = 1.0
    g0 = synth_field(spec, "scalar", {"name": "gaussian_bump", "width": width})
    diam = 6 * width
    x0 = 4 * diam
    n = spec.n
    bound = 2 / omega_n(n) * np.sum(np.abs(g0.components)) * spec.cell_volume / x0 ** n
    val = newton_gradient(g0, [x0, 20.0, 20.0])
    assert np.linalg.norm(val.paravector_part()) <= 10 * bound


def test_plemelj_boundary_recovery():
    spec = GridSpec((256, 256))
    g = synth_field(spec, "paravector", {"name": "localized_random", "width": spec.lengths[0] / 8}, seed=2)
    target = plemelj(g, 1).components
    i = 129
    x = spec.coordinates()
    limit = cauchy_boundary_limit(g, [x[0].ravel()[i], x[1].ravel()[i]])
    assert np.max(np.abs(limit.coeffs - target[:, i, i])) <= 1e-2 * np.max(np.abs(target))


@pytest.mark.parametrize("kind", ["paravector", "vector"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_monogenicity_order(kind, n):
    spec = GridSpec((16,) * n)
    f = synth_field(spec, kind, "hardy_plus", seed=n)
    res = monogenicity_order(f, 0.5, 0.1)
    assert abs(res["order"] - 2) <= 0.4
    down = synth_field(spec, kind, "hardy_minus", seed=n)
    assert abs(monogenicity_order(down, 0.5, 0.1, side=-1)["order"] - 2) <= 0.4
    # lower Hardy data pushed upward never satisfies the system
    bad = monogenicity_order(down, 0.5, 0.1)
    assert bad["ratio"] < 1.2
    assert bad["residual_half"] > 10 * res["residual_half"]


def test_quaternion_counterexample():
    spec = GridSpec((16, 16, 16))
    q = synth_field(spec, "quaternion", "bandlimited_random", seed=11)
    fp = decompose_quaternionic(q).f_plus
    quat = monogenicity_order(fp, 0.5, 0.1, "quaternion")
    cliff = monogenicity_order(fp, 0.5, 0.1, "clifford")
    assert abs(quat["order"] - 2) <= 0.4
    assert cliff["ratio"] < 1.2
    assert cliff["residual_half"] > 50 * quat["residual_half"]


def test_paravector_hardy_data_satisfies_quaternion_system():
    # the paravector system implies the quaternionic one on R^3
    spec = GridSpec((16, 16, 16))
    f = synth_field(spec, "quaternion", "hardy_plus", seed=1)
    assert abs(monogenicity_order(f, 0.5, 0.1, "clifford")["order"] - 2) <= 0.4
    assert abs(monogenicity_order(f, 0.5, 0.1, "quaternion")["order"] - 2) <= 0.4


def test_monogenicity_input_checks():
    spec = GridSpec((8, 8))
    f = synth_field(spec, "paravector", "hardy_plus")
    with pytest.raises(SlabError):
        monogenicity_residual(poisson_extend(f, [0.1, 0.2]))
    with pytest.raises(SlabError):
        monogenicity_residual(poisson_extend(f, [0.1, 0.2, 0.4]))
    with pytest.raises(KindMismatch):
        monogenicity_residual(poisson_extend(f, [0.1, 0.2, 0.3]), "vector")
    with pytest.raises(KindMismatch):
        monogenicity_residual(poisson_extend(f, [0.1, 0.2, 0.3]), "quaternion")
    with pytest.raises(KindMismatch):
        monogenicity_residual(poisson_extend(synth_field(spec, "scalar", "bandlimited_random"), [0.1, 0.2, 0.3]))


def test_laplace_residual_is_second_order():
    spec = GridSpec((16, 16))
    f = synth_field(spec, "paravector", "bandlimited_random", seed=1)
    r1 = laplace_residual(poisson_extend(f, [0.4, 0.5, 0.6]))
    r2 = laplace_residual(poisson_extend(f, [0.45, 0.5, 0.55]))
    assert abs(math.log2(r1 / r2) - 2) <= 0.4


def test_write_slab(tmp_path):
    spec = GridSpec((8, 8))
    f = synth_field(spec, "paravector", "hardy_plus")
    slab = poisson_extend(f, [0.1, 0.2, 0.3])
    path = write_slab(slab, tmp_path, {"monogenicityResidual": monogenicity_residual(slab)})
    manifest = json.loads(path.read_text())
    assert manifest["heights"] == [0.1, 0.2, 0.3]
    assert "cauchy" in manifest["newtonSignConvention"]
    again = read_field(tmp_path / manifest["slices"][1]["file"])
    assert np.array_equal(again.components, slab.values[1].components)
