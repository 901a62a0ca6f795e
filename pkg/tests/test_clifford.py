import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardyhodge.clifford import (
    MAX_DIM,
    QUAT_E1,
    QUAT_E2,
    QUAT_E3,
    QUAT_ONE,
    Multivector,
    Quaternion,
    blade_product,
    blade_product_reference,
    clifford_norm,
    conjugate,
    grade,
    inner,
    mv_mul,
    nsc_part,
    sc_part,
)
from hardyhodge.errors import DimensionMismatch

E = Multivector.basis


def close(a, b, tol=1e-14):
    return np.allclose(a.coeffs, b.coeffs, rtol=0, atol=tol)


def test_blade_square_is_minus_one():
    assert blade_product(0b1, 0b1) == (-1, 0)


def test_blade_canonical_pair():
    assert blade_product(0b01, 0b10) == (1, 0b11)


def test_blade_e12_e1():
    # e1 e2 e1 = -e1 e1 e2 = e2
    assert blade_product(0b11, 0b01) == (1, 0b10)


def test_blade_dimension_check():
    with pytest.raises(DimensionMismatch):
        blade_product(0b100, 0b1, n=2)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_blade_product_matches_reference(n):
    for a in range(1 << n):
        for b in range(1 << n):
            assert blade_product(a, b, n) == blade_product_reference(a, b)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_anticommutation(n):
    for i in range(1, n + 1):
        assert close(E(n, i) * E(n, i), Multivector.scalar(n, -1.0))
        for j in range(i + 1, n + 1):
            assert close(E(n, i) * E(n, j), -(E(n, j) * E(n, i)))


def test_paravector_times_conjugate():
    x = Multivector.paravector([1.0, 1.0])
    assert close(x * conjugate(x), Multivector.scalar(1, 2.0))


def test_sum_times_difference():
    a = E(2, 1) + E(2, 2)
    b = E(2, 1) - E(2, 2)
    assert close(a * b, -2.0 * E(2, 1, 2))


def test_conjugate_examples():
    assert close(conjugate(Multivector.paravector([1.0, 2.0])), Multivector.paravector([1.0, -2.0]))
    assert close(conjugate(Multivector.scalar(3, 4.0)), Multivector.scalar(3, 4.0))
    # grade 2 is fixed by the (-1)^|S| rule
    assert close(conjugate(E(2, 1, 2)), E(2, 1, 2))


def test_parts_and_grades():
    x = Multivector.scalar(2, 3.0) + E(2, 1)
    assert sc_part(x) == 3.0
    assert close(nsc_part(x), E(2, 1))
    y = Multivector.scalar(2, 1.0) + E(2, 1) + 5.0 * E(2, 1, 2)
    assert close(grade(y, 2), 5.0 * E(2, 1, 2))
    with pytest.raises(DimensionMismatch):
        grade(y, 3)


def test_norms_and_inner():
    assert clifford_norm(Multivector.paravector([1.0, 1.0, 1.0])) == pytest.approx(math.sqrt(3), abs=1e-15)
    assert inner(E(2, 1), E(2, 2)) == 0.0
    assert clifford_norm(E(2, 1, 2) - E(2, 1)) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_dimension_limits():
    with pytest.raises(DimensionMismatch):
        Multivector.zero(MAX_DIM + 1)
    with pytest.raises(DimensionMismatch):
        mv_mul(Multivector.zero(2), Multivector.zero(3))
    with pytest.raises(DimensionMismatch):
        Multivector(2, np.zeros(3))


def test_basis_reorders_factors():
    # e2 e1 = -e1 e2
    assert close(E(3, 2, 1), -E(3, 1, 2))


def test_repr_names_blades():
    assert "e12" in repr(E(2, 1, 2))


def test_quaternion_table():
    assert QUAT_E1 * QUAT_E2 == QUAT_E3
    assert QUAT_E2 * QUAT_E3 == QUAT_E1
    assert QUAT_E3 * QUAT_E1 == QUAT_E2
    for q in (QUAT_E1, QUAT_E2, QUAT_E3):
        assert q * q == -QUAT_ONE


def test_quaternion_conjugate_norm():
    q = Quaternion(1.0, 2.0, -1.0, 0.5)
    assert (q * q.conjugate()).as_array() == pytest.approx([q.norm() ** 2, 0, 0, 0], abs=1e-14)


coef = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def multivectors(draw, n):
    return Multivector(n, np.array(draw(st.lists(coef, min_size=1 << n, max_size=1 << n))))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(multivectors(n), multivectors(n), multivectors(n))))
def test_associativity(triple):
    x, y, z = triple
    left = (x * y) * z
    right = x * (y * z)
    scale = max(1.0, clifford_norm(x) * clifford_norm(y) * clifford_norm(z))
    assert np.max(np.abs(left.coeffs - right.coeffs)) <= 1e-14 * scale * 8


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.lists(coef, min_size=n + 1, max_size=n + 1)))
def test_paravector_identity(values):
    x = Multivector.paravector(values)
    prod = x * conjugate(x)
    norm2 = clifford_norm(x) ** 2
    assert prod.coeffs[0] == pytest.approx(norm2, rel=1e-14, abs=1e-300)
    assert np.max(np.abs(prod.coeffs[1:]), initial=0.0) <= 1e-14 * max(norm2, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(st.just(n), st.lists(coef, min_size=n + 1, max_size=n + 1),
                                                     st.lists(coef, min_size=n + 1, max_size=n + 1))))
def test_paravector_product_parts(case):
    # scalar part of x y is x0 y0 - sum x_k y_k; the bivector part is the wedge of the vector parts
    n, a, b = case
    x, y = Multivector.paravector(a), Multivector.paravector(b)
    prod = x * y
    assert prod.coeffs[0] == pytest.approx(a[0] * b[0] - sum(a[k] * b[k] for k in range(1, n + 1)), abs=1e-11)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            mask = (1 << (i - 1)) | (1 << (j - 1))
            assert prod.coeffs[mask] == pytest.approx(a[i] * b[j] - a[j] * b[i], abs=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(multivectors))
def test_scalar_split_is_exact(x):
    back = Multivector.scalar(x.n, sc_part(x)) + nsc_part(x)
    assert np.array_equal(back.coeffs, x.coeffs)
    assert np.array_equal(nsc_part(nsc_part(x)).coeffs, nsc_part(x).coeffs)
