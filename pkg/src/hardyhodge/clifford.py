"""Real Clifford algebra Cl(n, R) with e_j**2 = -1, plus the real quaternions.

Basis blades are addressed by bitmask: bit ``j - 1`` set means ``e_j`` is a
factor, mask 0 is the scalar ``e_0 = 1``. Factors are always kept in
increasing index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch

MAX_DIM = 10


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def blade_product(a: int, b: int, n: int | None = None) -> tuple[int, int]:
    """Product of two basis blades.

    Returns ``(sign, c)`` with ``e_a e_b = sign * e_c``.
    """
    if a < 0 or b < 0:
        raise DimensionMismatch("blade masks must be nonnegative")
    if n is not None and (a >> n or b >> n):
        raise DimensionMismatch(f"blade mask exceeds algebra dimension n={n}")
    # moving each factor of b leftwards past the higher factors of a
    swaps = 0
    rest = a >> 1
    while rest:
        swaps += popcount(rest & b)
        rest >>= 1
    sign = -1 if swaps & 1 else 1
    # e_j e_j = -1 for each shared factor
    if popcount(a & b) & 1:
        sign = -sign
    return sign, a ^ b


def blade_product_reference(a: int, b: int) -> tuple[int, int]:
    """Slow blade product via explicit factor lists and bubble sort.

    Kept independent of :func:`blade_product` so it can serve as a test oracle.
    """
    factors = [j for j in range(64) if a >> j & 1] + [j for j in range(64) if b >> j & 1]
    sign = 1
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(factors) - 1:
            if factors[i] > factors[i + 1]:
                factors[i], factors[i + 1] = factors[i + 1], factors[i]
                sign = -sign
                changed = True
                i += 1
            elif factors[i] == factors[i + 1]:
                del factors[i:i + 2]
                sign = -sign
                changed = True
            else:
                i += 1
    mask = 0
    for j in factors:
        mask |= 1 << j
    return sign, mask


@lru_cache(maxsize=None)
def product_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(sign, target)`` arrays of shape (2**n, 2**n) for all blade pairs."""
    size = 1 << n
    sign = np.empty((size, size), dtype=np.int8)
    target = np.empty((size, size), dtype=np.int64)
    for a in range(size):
        for b in range(size):
            sign[a, b], target[a, b] = blade_product(a, b)
    sign.setflags(write=False)
    target.setflags(write=False)
    return sign, target


@lru_cache(maxsize=None)
def grades(n: int) -> np.ndarray:
    g = np.array([popcount(m) for m in range(1 << n)], dtype=np.int64)
    g.setflags(write=False)
    return g


def clifford_product_arrays(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    """Clifford product of coefficient arrays with the blade axis first.

    Trailing axes broadcast, so this works pointwise on sampled fields.
    Zero blocks are skipped, which keeps paravector-sized inputs cheap.
    """
    size = 1 << n
    if x.shape[0] != size or y.shape[0] != size:
        raise DimensionMismatch(f"expected leading axis of length {size}")
    sign, target = product_table(n)
    out_shape = (size,) + np.broadcast_shapes(x.shape[1:], y.shape[1:])
    out = np.zeros(out_shape, dtype=np.result_type(x, y))
    live_x = [a for a in range(size) if np.any(x[a])]
    live_y = [b for b in range(size) if np.any(y[b])]
    for a in live_x:
        for b in live_y:
            out[target[a, b]] += sign[a, b] * (x[a] * y[b])
    return out


@dataclass(frozen=True, eq=False)
class Multivector:
    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIM:
            raise DimensionMismatch(f"algebra dimension must be in [1, {MAX_DIM}], got {self.n}")
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (1 << self.n,):
            raise DimensionMismatch(f"Cl({self.n}) needs {1 << self.n} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, n: int) -> Multivector:
        return cls(n, np.zeros(1 << n))

    @classmethod
    def scalar(cls, n: int, value: float) -> Multivector:
        c = np.zeros(1 << n)
        c[0] = value
        return cls(n, c)

    @classmethod
    def blade(cls, n: int, mask: int, value: float = 1.0) -> Multivector:
        c = np.zeros(1 << n)
        c[mask] = value
        return cls(n, c)

    @classmethod
    def basis(cls, n: int, *indices: int) -> Multivector:
        """The blade ``e_{i1} e_{i2} ...`` (indices may be unordered)."""
        out = cls.scalar(n, 1.0)
        for i in indices:
            if not 1 <= i <= n:
                raise DimensionMismatch(f"e_{i} does not exist in Cl({n})")
            out = out * cls.blade(n, 1 << (i - 1))
        return out

    @classmethod
    def paravector(cls, values) -> Multivector:
        """Build ``x_0 + x_1 e_1 + ... + x_n e_n`` from ``[x_0, ..., x_n]``."""
        values = np.asarray(values, dtype=float)
        n = values.size - 1
        c = np.zeros(1 << n)
        c[0] = values[0]
        for k in range(1, n + 1):
            c[1 << (k - 1)] = values[k]
        return cls(n, c)

    def paravector_part(self) -> np.ndarray:
        """Coefficients ``[x_0, x_1, ..., x_n]`` of grades 0 and 1."""
        return np.array([self.coeffs[0]] + [self.coeffs[1 << (k - 1)] for k in range(1, self.n + 1)])

    def _check(self, other: Multivector):
        if not isinstance(other, Multivector):
            return NotImplemented
        if other.n != self.n:
            raise DimensionMismatch(f"Cl({self.n}) vs Cl({other.n})")
        return None

    def __add__(self, other):
        if isinstance(other, (int, float)):
            return self + Multivector.scalar(self.n, other)
        self._check(other)
        return Multivector(self.n, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * other

    def __neg__(self):
        return Multivector(self.n, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return Multivector(self.n, self.coeffs * other)
        return mv_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return Multivector(self.n, self.coeffs * other)
        return NotImplemented

    def __repr__(self):
        terms = []
        for mask, c in enumerate(self.coeffs):
            if c != 0:
                name = "1" if mask == 0 else "e" + "".join(str(j + 1) for j in range(self.n) if mask >> j & 1)
                terms.append(f"{c:g}*{name}")
        return f"Multivector(n={self.n}, " + (" + ".join(terms) or "0") + ")"


def mv_mul(x: Multivector, y: Multivector) -> Multivector:
    if x.n != y.n:
        raise DimensionMismatch(f"Cl({x.n}) vs Cl({y.n})")
    return Multivector(x.n, clifford_product_arrays(x.coeffs, y.coeffs, x.n))


def conjugate(x: Multivector) -> Multivector:
    """Coefficient of blade S multiplied by (-1)**|S|."""
    signs = np.where(grades(x.n) & 1, -1.0, 1.0)
    return Multivector(x.n, x.coeffs * signs)


def sc_part(x: Multivector) -> float:
    return float(x.coeffs[0])


def nsc_part(x: Multivector) -> Multivector:
    c = x.coeffs.copy()
    c[0] = 0.0
    return Multivector(x.n, c)


def grade(x: Multivector, k: int) -> Multivector:
    if not 0 <= k <= x.n:
        raise DimensionMismatch(f"grade {k} outside [0, {x.n}]")
    return Multivector(x.n, np.where(grades(x.n) == k, x.coeffs, 0.0))


def clifford_norm(x: Multivector) -> float:
    return float(np.sqrt(np.sum(x.coeffs ** 2)))


def inner(x: Multivector, y: Multivector) -> float:
    # real coefficients, so the coefficient-wise conjugate is the identity
    if x.n != y.n:
        raise DimensionMismatch(f"Cl({x.n}) vs Cl({y.n})")
    return float(np.dot(x.coeffs, y.coeffs))


# Quaternions: basis (1, e1, e2, e3) with e3 = e1 e2.
# QUAT_TABLE[a][b] = (sign, c) such that q_a q_b = sign * q_c.
QUAT_TABLE = (
    ((1, 0), (1, 1), (1, 2), (1, 3)),
    ((1, 1), (-1, 0), (1, 3), (-1, 2)),
    ((1, 2), (-1, 3), (-1, 0), (1, 1)),
    ((1, 3), (1, 2), (-1, 1), (-1, 0)),
)


def quaternion_product_arrays(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Pointwise quaternion product of arrays with a leading axis of length 4."""
    if p.shape[0] != 4 or q.shape[0] != 4:
        raise DimensionMismatch("quaternion arrays need a leading axis of length 4")
    out = np.zeros((4,) + np.broadcast_shapes(p.shape[1:], q.shape[1:]), dtype=np.result_type(p, q))
    for a in range(4):
        if not np.any(p[a]):
            continue
        for b in range(4):
            s, c = QUAT_TABLE[a][b]
            out[c] += s * (p[a] * q[b])
    return out


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, a) -> Quaternion:
        w, x, y, z = (float(v) for v in a)
        return cls(w, x, y, z)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion.from_array(self.as_array() * other)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return Quaternion.from_array(quaternion_product_arrays(self.as_array(), other.as_array()))

    def __add__(self, other):
        return Quaternion.from_array(self.as_array() + other.as_array())

    def __neg__(self):
        return Quaternion.from_array(-self.as_array())

    def conjugate(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


QUAT_ONE = Quaternion(1.0)
QUAT_E1 = Quaternion(0.0, 1.0)
QUAT_E2 = Quaternion(0.0, 0.0, 1.0)
QUAT_E3 = Quaternion(0.0, 0.0, 0.0, 1.0)
