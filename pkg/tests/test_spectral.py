import math

import numpy as np
import pytest
import scipy.signal

from hardyhodge.errors import DCViolation, KindMismatch, OracleSizeError
from hardyhodge.grid import GridSpec, SampledField, field_inner, lp_norm
from hardyhodge.spectral import (
    embed_multivector,
    grade_residual,
    hilbert,
    make_plan,
    paravector_part,
    plemelj,
    riesz,
    riesz_oracle_dft,
)
from hardyhodge.synth import synth_field

SHAPES = [(16,), (32,), (16, 16), (32, 32), (16, 16, 16)]


def mode(spec, modes, phase="cos", kind="scalar", component=0):
    return synth_field(spec, kind, {"name": "single_mode", "modes": modes, "phase": phase, "component": component})


def err(a, b):
    return np.max(np.abs(a.components - b.components))


def test_riesz_single_mode():
    spec = GridSpec((32, 32))
    assert err(riesz(mode(spec, [1, 0]), 1), mode(spec, [1, 0], "sin")) <= 1e-14
    assert np.max(np.abs(riesz(mode(spec, [0, 1]), 1).components)) <= 1e-15


def test_riesz_oblique_mode():
    # kappa = (1, 1): R_1 cos = sin / sqrt(2)
    spec = GridSpec((16, 16))
    got = riesz(mode(spec, [1, 1]), 1)
    assert err(got, mode(spec, [1, 1], "sin") * (1 / math.sqrt(2))) <= 1e-14


@pytest.mark.parametrize("shape", SHAPES)
def test_sum_of_squares_is_minus_identity(shape):
    spec = GridSpec(shape)
    f = synth_field(spec, "scalar", "bandlimited_random", seed=1)
    total = SampledField.zeros(spec, "scalar")
    for k in range(1, spec.n + 1):
        total = total + riesz(riesz(f, k), k)
    assert lp_norm(total + f) <= 1e-12 * lp_norm(f)


def test_riesz_commute():
    spec = GridSpec((16, 16, 16))
    f = synth_field(spec, "scalar", "bandlimited_random", seed=2)
    for j in range(1, 4):
        for k in range(j + 1, 4):
            assert lp_norm(riesz(riesz(f, j), k) - riesz(riesz(f, k), j)) <= 1e-13 * lp_norm(f)


def test_riesz_skew_adjoint():
    spec = GridSpec((32, 32))
    f = synth_field(spec, "scalar", "bandlimited_random", seed=3)
    g = synth_field(spec, "scalar", "bandlimited_random", seed=4)
    for k in (1, 2):
        a = field_inner(riesz(f, k), g)
        b = field_inner(f, riesz(g, k))
        assert abs(a + b) <= 1e-12 * lp_norm(f) * lp_norm(g)


@pytest.mark.parametrize("shape", [(8, 8), (16,), (4, 6, 8), (16, 16, 16)])
def test_fft_matches_direct_dft(shape):
    spec = GridSpec(shape, tuple(1.0 + 0.5 * i for i in range(len(shape))))
    rng = np.random.default_rng(7)
    # raw noise, including DC and Nyquist content
    f = SampledField(spec, "paravector", rng.standard_normal((len(shape) + 1,) + shape))
    for k in range(1, spec.n + 1):
        assert lp_norm(riesz(f, k) - riesz_oracle_dft(f, k)) <= 1e-12 * lp_norm(f)


def test_oracle_linearity_and_single_mode():
    spec = GridSpec((8, 8))
    f = synth_field(spec, "scalar", "bandlimited_random", seed=1)
    g = synth_field(spec, "scalar", "bandlimited_random", seed=2)
    lhs = riesz_oracle_dft(f * 2.0 + g * (-3.0), 2)
    rhs = riesz_oracle_dft(f, 2) * 2.0 + riesz_oracle_dft(g, 2) * (-3.0)
    assert lp_norm(lhs - rhs) <= 1e-12 * lp_norm(lhs)
    assert err(riesz_oracle_dft(mode(spec, [1, 0]), 1), mode(spec, [1, 0], "sin")) <= 1e-13


def test_oracle_size_cap():
    with pytest.raises(OracleSizeError):
        riesz_oracle_dft(SampledField.zeros(GridSpec((128, 64)), "scalar"), 1)


def test_nyquist_plane_is_annihilated():
    # cos(N/2 x_1) alternates sign on the grid; the multiplier there is zero
    spec = GridSpec((8, 8))
    f = mode(spec, [4, 1])
    assert np.max(np.abs(riesz(f, 1).components)) <= 1e-14
    # R_2 still acts on the kappa_2 = 1 part
    assert np.max(np.abs(riesz(f, 2).components)) > 0.1


@pytest.mark.parametrize("N", [16, 32, 64])
def test_conjugate_function_reduction(N):
    spec = GridSpec((N,))
    g = synth_field(spec, "scalar", "bandlimited_random", seed=N)
    classical = np.imag(scipy.signal.hilbert(g.components[0]))
    assert np.max(np.abs(riesz(g, 1).components[0] - classical)) <= 1e-12 * np.max(np.abs(g.components))
    # H g = -e_1 R_1 g
    hg = hilbert(g)
    assert np.max(np.abs(hg.components[1] + classical)) <= 1e-12 * np.max(np.abs(g.components))
    assert np.max(np.abs(hg.components[0])) == 0.0


def test_hilbert_of_cosine():
    spec = GridSpec((16, 16))
    hphi = hilbert(mode(spec, [1, 0]))
    want = np.zeros((4, 16, 16))
    want[1] = -mode(spec, [1, 0], "sin").components[0]
    assert np.max(np.abs(hphi.components - want)) <= 1e-14


@pytest.mark.parametrize("shape", SHAPES)
@pytest.mark.parametrize("seed", range(4))
def test_hilbert_squares_to_identity(shape, seed):
    spec = GridSpec(shape)
    f = embed_multivector(synth_field(spec, "paravector", "bandlimited_random", seed))
    assert lp_norm(hilbert(hilbert(f)) - f) <= 1e-12 * lp_norm(f)


def test_hilbert_of_paravector_has_grades_up_to_two():
    spec = GridSpec((8, 8, 8))
    hf = hilbert(synth_field(spec, "paravector", "bandlimited_random", seed=5))
    assert grade_residual(hf, 3) == 0.0
    assert grade_residual(hf, 2) > 1e-3


def test_plemelj_projections():
    spec = GridSpec((16, 16))
    f = embed_multivector(synth_field(spec, "paravector", "bandlimited_random", seed=6))
    p, m = plemelj(f, 1), plemelj(f, -1)
    assert lp_norm(plemelj(p, 1) - p) <= 1e-12 * lp_norm(f)
    assert lp_norm(plemelj(m, -1) - m) <= 1e-12 * lp_norm(f)
    assert lp_norm(p + m - f) <= 1e-15 * lp_norm(f)
    assert lp_norm(plemelj(p, -1)) <= 1e-12 * lp_norm(f)
    with pytest.raises(ValueError):
        plemelj(f, 0)


def test_quaternion_hilbert():
    spec = GridSpec((16, 16, 16))
    q = synth_field(spec, "quaternion", "bandlimited_random", seed=1)
    assert lp_norm(hilbert(hilbert(q)) - q) <= 1e-12 * lp_norm(q)
    assert lp_norm(plemelj(plemelj(q, 1), -1)) <= 1e-12 * lp_norm(q)
    with pytest.raises(KindMismatch):
        hilbert(SampledField.zeros(GridSpec((8, 8)), "quaternion"))


def test_dc_policies():
    spec = GridSpec((8, 8))
    f = SampledField(spec, "scalar", np.ones((1, 8, 8)) + mode(spec, [1, 0]).components)
    # default policy drops the mean silently
    assert err(riesz(f, 1), mode(spec, [1, 0], "sin")) <= 1e-14
    with pytest.raises(DCViolation):
        riesz(f, 1, make_plan(spec, "error"))
    tolerant = make_plan(spec, "tolerate", eps=0.5)
    with pytest.raises(DCViolation):
        riesz(f * 1.0 + SampledField(spec, "scalar", np.ones((1, 8, 8))), 1, tolerant)
    riesz(f, 1, tolerant)
    with pytest.raises(ValueError):
        make_plan(spec, "whatever")


def test_plan_invariants():
    plan = make_plan(GridSpec((8, 6, 4)))
    for u in plan.unit:
        assert u[0, 0, 0] == 0.0
        assert np.max(np.abs(u)) <= 1.0
    assert make_plan(GridSpec((8, 6, 4))) is plan


def test_paravector_part_round_trip():
    spec = GridSpec((8, 8))
    f = synth_field(spec, "paravector", "bandlimited_random", seed=2)
    assert err(paravector_part(embed_multivector(f)), f) == 0.0
