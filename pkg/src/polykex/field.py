"""Scalar arithmetic backends: exact prime field F_p and complex floats.

Every higher layer (linear algebra, the exchange, both attacks) is written
against the small interface shared by :class:`PrimeField` and
:class:`ComplexField`, so the same code runs exactly over F_p and
approximately over C with a configurable zero tolerance.

Matrices and vectors are plain numpy arrays whose entries belong to the
field: canonical residues (int64, or Python ints above 2^20 so products
never overflow) for the prime kind, complex128 for the complex kind.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .opcount import tally

# Name recorded in transcript metadata; numpy's PCG64 is deterministic
# across platforms for a given 64-bit seed.
RNG_NAME = "numpy-pcg64"

DEFAULT_MODULUS = 1_000_003
DEFAULT_ZERO_TOL = 1e-9

# int64 matrix products stay exact while n * (p-1)^2 < 2^63; capping the
# int64 fast path at p <= 2^20 leaves room for n up to ~2^22.
_INT64_MODULUS_LIMIT = 1 << 20
# numpy integer sampling is the reason for the hard cap.
_MODULUS_LIMIT = 1 << 62


class FieldError(Exception):
    """Base class for scalar-arithmetic failures."""


class InversionOfZero(FieldError, ZeroDivisionError):
    """Multiplicative inverse requested for zero (or below tolerance)."""


class NonFiniteResult(FieldError, ArithmeticError):
    """A complex operation produced NaN or Inf."""


class ModulusTooSmall(FieldError, ValueError):
    """Prime modulus too small for the requested matrix size."""


def make_rng(seed: int) -> np.random.Generator:
    """The named deterministic generator recorded in transcripts."""
    return np.random.Generator(np.random.PCG64(int(seed)))


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    # Deterministic Miller-Rabin; the base set is exact far beyond 2^62.
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldConfig:
    """Declarative field choice; serialized into every transcript."""

    kind: str
    modulus: int | None = None
    zero_tol: float | None = None

    def __post_init__(self):
        if self.kind == "prime":
            p = self.modulus if self.modulus is not None else DEFAULT_MODULUS
            if not isinstance(p, int) or not _is_prime(p):
                raise ValueError(f"modulus {p!r} is not prime")
            if p >= _MODULUS_LIMIT:
                raise ValueError(f"modulus {p} exceeds the supported bound 2^62")
            object.__setattr__(self, "modulus", p)
            object.__setattr__(self, "zero_tol", None)
        elif self.kind == "complex":
            tol = self.zero_tol if self.zero_tol is not None else DEFAULT_ZERO_TOL
            if not tol > 0:
                raise ValueError("zero_tol must be positive")
            object.__setattr__(self, "zero_tol", float(tol))
            object.__setattr__(self, "modulus", None)
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @staticmethod
    def prime(modulus: int = DEFAULT_MODULUS) -> "FieldConfig":
        return FieldConfig("prime", modulus=modulus)

    @staticmethod
    def complex_(zero_tol: float = DEFAULT_ZERO_TOL) -> "FieldConfig":
        return FieldConfig("complex", zero_tol=zero_tol)

    @staticmethod
    def parse(spec: str) -> "FieldConfig":
        """Parse the CLI grammar: ``prime:<p>`` or ``complex[:<zero_tol>]``."""
        kind, _, arg = spec.partition(":")
        if kind == "prime":
            return FieldConfig.prime(int(arg) if arg else DEFAULT_MODULUS)
        if kind == "complex":
            return FieldConfig.complex_(float(arg) if arg else DEFAULT_ZERO_TOL)
        raise ValueError(f"unknown field spec {spec!r}")

    def validate_for_size(self, n: int) -> None:
        """Headroom check for protocol instances of size n.

        Characteristic-polynomial work needs the modulus comfortably above
        the matrix size; the exchange driver enforces modulus > 2n.
        """
        if self.kind == "prime" and self.modulus <= 2 * n:
            raise ModulusTooSmall(
                f"modulus {self.modulus} must exceed 2n = {2 * n}")

    def build(self):
        if self.kind == "prime":
            return PrimeField(self.modulus)
        return ComplexField(self.zero_tol)

    def to_dict(self) -> dict:
        if self.kind == "prime":
            return {"kind": "prime", "modulus": self.modulus}
        return {"kind": "complex", "zero_tol": self.zero_tol}

    @staticmethod
    def from_dict(d: dict) -> "FieldConfig":
        return FieldConfig(d["kind"], modulus=d.get("modulus"),
                           zero_tol=d.get("zero_tol"))


class PrimeField:
    """Exact arithmetic in F_p on canonical residues in [0, p)."""

    kind = "prime"

    def __init__(self, modulus: int):
        if not _is_prime(modulus):
            raise ValueError(f"{modulus} is not prime")
        self.p = int(modulus)
        self.dtype: Any = np.int64 if self.p <= _INT64_MODULUS_LIMIT else object
        self.zero = self._wrap(0)
        self.one = self._wrap(1)

    def _wrap(self, x: int):
        return np.int64(x) if self.dtype is np.int64 else int(x)

    @property
    def config(self) -> FieldConfig:
        return FieldConfig.prime(self.p)

    # scalar arithmetic ------------------------------------------------

    def add(self, x, y):
        tally(adds=1)
        return (x + y) % self.p

    def sub(self, x, y):
        tally(adds=1)
        return (x - y) % self.p

    def neg(self, x):
        tally(adds=1)
        return (-x) % self.p

    def mul(self, x, y):
        tally(muls=1)
        return (x * y) % self.p

    def inv(self, x):
        x = int(x) % self.p
        if x == 0:
            raise InversionOfZero(f"0 has no inverse mod {self.p}")
        tally(invs=1)
        return self._wrap(pow(x, -1, self.p))

    def from_int(self, k: int):
        return self._wrap(k % self.p)

    def is_zero(self, x) -> bool:
        return x % self.p == 0

    def eq(self, x, y) -> bool:
        return (x - y) % self.p == 0

    # arrays -------------------------------------------------------------

    def canon(self, a: np.ndarray) -> np.ndarray:
        return a % self.p

    def asarray(self, data) -> np.ndarray:
        return np.array(data, dtype=self.dtype) % self.p

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            return np.zeros(shape, dtype=np.int64).astype(object)
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        e = np.eye(n, dtype=np.int64)
        return e.astype(object) if self.dtype is object else e

    def arr_dot(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # np.dot handles both int64 and object entries; the modulus cap
        # guarantees int64 accumulation cannot overflow.
        return np.dot(a, b) % self.p

    def sample_array(self, rng: np.random.Generator, shape) -> np.ndarray:
        raw = rng.integers(0, self.p, size=shape, dtype=np.int64)
        return raw.astype(object) if self.dtype is object else raw

    def sample_scalar(self, rng: np.random.Generator):
        return self.sample_array(rng, ())[()]

    # predicates and policies ---------------------------------------------

    def vec_is_zero(self, v: np.ndarray) -> bool:
        return not np.any(v % self.p)

    def nonzero_mask(self, v: np.ndarray) -> np.ndarray:
        return (v % self.p) != 0

    def first_nonzero(self, v: np.ndarray) -> int | None:
        nz = np.flatnonzero(v % self.p)
        return int(nz[0]) if nz.size else None

    # Exact arithmetic: any nonzero entry serves as pivot; take the first
    # for determinism.
    pivot_index = first_nonzero

    def mats_equal(self, x: np.ndarray, y: np.ndarray) -> bool:
        return x.shape == y.shape and not np.any((x - y) % self.p)

    # text forms -----------------------------------------------------------

    def scalar_to_text(self, x):
        return int(x) % self.p

    def scalar_from_text(self, t):
        return self._wrap(int(t))

    def __repr__(self):
        return f"PrimeField({self.p})"


class ComplexField:
    """Double-precision complex arithmetic with a magnitude zero-threshold.

    The zero tolerance drives every rank decision (pivot admissibility,
    span membership); arithmetic itself is plain IEEE.  Any NaN/Inf is an
    error, surfaced as NonFiniteResult.
    """

    kind = "complex"

    def __init__(self, zero_tol: float = DEFAULT_ZERO_TOL):
        if not zero_tol > 0:
            raise ValueError("zero_tol must be positive")
        self.zero_tol = float(zero_tol)
        self.dtype = np.complex128
        self.zero = np.complex128(0)
        self.one = np.complex128(1)

    @property
    def config(self) -> FieldConfig:
        return FieldConfig.complex_(self.zero_tol)

    # scalar arithmetic ------------------------------------------------

    def _check(self, x):
        if not np.all(np.isfinite(x)):
            raise NonFiniteResult("complex operation produced NaN/Inf")
        return x

    def add(self, x, y):
        tally(adds=1)
        return self._check(x + y)

    def sub(self, x, y):
        tally(adds=1)
        return self._check(x - y)

    def neg(self, x):
        tally(adds=1)
        return -x

    def mul(self, x, y):
        tally(muls=1)
        return self._check(x * y)

    def inv(self, x):
        if abs(x) <= self.zero_tol:
            raise InversionOfZero(
                f"magnitude {abs(x):.3e} is below zero_tol {self.zero_tol:.3e}")
        tally(invs=1)
        return self._check(np.complex128(1) / x)

    def from_int(self, k: int):
        return np.complex128(k)

    def is_zero(self, x) -> bool:
        return abs(x) <= self.zero_tol

    def eq(self, x, y) -> bool:
        return abs(x - y) <= self.zero_tol

    # arrays -------------------------------------------------------------

    def canon(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.complex128)
        return self._check(a)

    def asarray(self, data) -> np.ndarray:
        return self.canon(np.array(data, dtype=np.complex128))

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.complex128)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.complex128)

    def arr_dot(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self._check(a @ b)

    def sample_array(self, rng: np.random.Generator, shape) -> np.ndarray:
        re = rng.uniform(-1.0, 1.0, size=shape)
        im = rng.uniform(-1.0, 1.0, size=shape)
        return re + 1j * im

    def sample_scalar(self, rng: np.random.Generator):
        return np.complex128(self.sample_array(rng, ())[()])

    # predicates and policies ---------------------------------------------

    def vec_is_zero(self, v: np.ndarray) -> bool:
        return v.size == 0 or float(np.abs(v).max()) <= self.zero_tol

    def nonzero_mask(self, v: np.ndarray) -> np.ndarray:
        return np.abs(v) > self.zero_tol

    def first_nonzero(self, v: np.ndarray) -> int | None:
        nz = np.flatnonzero(np.abs(v) > self.zero_tol)
        return int(nz[0]) if nz.size else None

    def pivot_index(self, v: np.ndarray) -> int | None:
        # Partial pivoting: largest magnitude wins.
        if v.size == 0:
            return None
        i = int(np.argmax(np.abs(v)))
        return i if abs(v[i]) > self.zero_tol else None

    def mats_equal(self, x: np.ndarray, y: np.ndarray) -> bool:
        if x.shape != y.shape:
            return False
        d = np.abs(x - y)
        return d.size == 0 or float(d.max()) <= self.zero_tol

    # text forms -----------------------------------------------------------

    def scalar_to_text(self, x):
        return [float(np.real(x)), float(np.imag(x))]

    def scalar_from_text(self, t):
        re, im = t
        return np.complex128(complex(re, im))

    def __repr__(self):
        return f"ComplexField(zero_tol={self.zero_tol})"


Field = PrimeField | ComplexField


def field_arith(f: Field, op: str, x, y=None):
    """Dispatch form of the scalar arithmetic contract.

    ``op`` is one of add/sub/mul/neg/inv; neg and inv are unary.
    """
    if op in ("neg", "inv"):
        if y is not None:
            raise TypeError(f"{op} is unary")
        return getattr(f, op)(x)
    if op in ("add", "sub", "mul"):
        return getattr(f, op)(x, y)
    raise ValueError(f"unknown op {op!r}")
