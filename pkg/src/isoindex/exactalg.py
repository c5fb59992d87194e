"""Exact scalar and matrix arithmetic over Z, Q, GF(p) and small GF(p^k).

Ring elements are plain Python values: ``int`` for Z, ``Fraction`` for Q and
an ``int`` in ``[0, q)`` for finite fields.  Elements of GF(p^k) are encoded
as ``c0 + c1*p + ... + c_{k-1}*p^(k-1)`` where ``c_i`` is the coefficient of
``x^i`` in the polynomial representative modulo the defining modulus.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "RingError",
    "RingSpec",
    "FieldTables",
    "field_tables",
    "Matrix",
    "rref",
    "kernel_basis",
    "tensor_pair",
    "rank_one_match",
    "is_prime",
]

MAX_PRIME = 97
MAX_EXT_ORDER = 16


class RingError(ValueError):
    """Illegal ring name or ring mismatch."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


# -- polynomial helpers over GF(p), coefficient lists low -> high ---------------

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _poly_trim([x % p for x in a])
    m = _poly_trim([x % p for x in m])
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _poly_trim(a)
    return a


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    deg = len(modulus) - 1
    for d in range(1, deg // 2 + 1):
        for tail in product(range(p), repeat=d):
            if not _poly_mod(modulus, list(tail) + [1], p):
                return False
    return True


def _default_modulus(p: int, k: int) -> tuple[int, ...]:
    for tail in product(range(p), repeat=k):
        cand = tuple(reversed(tail)) + (1,)
        if cand[0] != 0 and _is_irreducible(cand, p):
            return cand
    raise RingError(f"no irreducible polynomial of degree {k} over GF({p})")


@dataclass(frozen=True)
class RingSpec:
    """Coefficient domain: ``Z``, ``Q``, ``GF(p)`` or ``GF(p, k)``.

    ``modulus`` lists the coefficients of the monic defining polynomial from
    the constant term upward; it is empty except for extension fields.
    """

    kind: str
    p: int = 0
    k: int = 1
    modulus: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind in ("Z", "Q"):
            if self.p or self.k != 1 or self.modulus:
                raise RingError(f"{self.kind} takes no field parameters")
            return
        if self.kind != "GF":
            raise RingError(f"unknown ring kind {self.kind!r}")
        if not is_prime(self.p):
            raise RingError(f"{self.p} is not prime")
        if self.k < 1:
            raise RingError("extension degree must be >= 1")
        if self.k == 1:
            if self.p > MAX_PRIME:
                raise RingError(f"prime fields are supported up to p={MAX_PRIME}")
            if self.modulus:
                raise RingError("prime fields take no modulus")
            return
        if self.p**self.k > MAX_EXT_ORDER:
            raise RingError(f"extension fields are supported up to order {MAX_EXT_ORDER}")
        mod = self.modulus or _default_modulus(self.p, self.k)
        mod = tuple(int(c) % self.p for c in mod)
        if len(mod) != self.k + 1 or mod[-1] != 1:
            raise RingError(f"modulus must be monic of degree {self.k}")
        if not _is_irreducible(mod, self.p):
            raise RingError(f"modulus {mod} is reducible over GF({self.p})")
        object.__setattr__(self, "modulus", mod)

    # -- constructors ---------------------------------------------------------
    @classmethod
    def integers(cls) -> RingSpec:
        return cls("Z")

    @classmethod
    def rationals(cls) -> RingSpec:
        return cls("Q")

    @classmethod
    def prime_field(cls, p: int) -> RingSpec:
        return cls("GF", p)

    @classmethod
    def ext_field(cls, p: int, k: int, modulus: Sequence[int] | None = None) -> RingSpec:
        if k == 1:
            return cls.prime_field(p)
        return cls("GF", p, k, tuple(modulus or ()))

    @classmethod
    def parse(cls, text: str) -> RingSpec:
        """Parse ``Z``, ``Q``, ``GF(p)`` or ``GF(p,k)``."""
        s = text.replace(" ", "")
        if s in ("Z", "ZZ"):
            return cls.integers()
        if s in ("Q", "QQ"):
            return cls.rationals()
        m = re.fullmatch(r"GF\((\d+)(?:,(\d+))?\)", s)
        if not m:
            raise RingError(f"cannot parse ring {text!r}")
        p = int(m.group(1))
        k = int(m.group(2) or 1)
        return cls.ext_field(p, k)

    def __str__(self) -> str:
        if self.kind != "GF":
            return self.kind
        return f"GF({self.p})" if self.k == 1 else f"GF({self.p},{self.k})"

    # -- properties -----------------------------------------------------------
    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def is_finite(self) -> bool:
        return self.kind == "GF"

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "GF" else 0

    @property
    def order(self) -> int:
        return self.p**self.k if self.kind == "GF" else 0

    def field_of_fractions(self) -> RingSpec:
        return RingSpec.rationals() if self.kind == "Z" else self

    # -- element arithmetic ---------------------------------------------------
    @property
    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def coerce(self, x):
        """Normalise ``x`` (int, Fraction or ``"a/b"`` string) into this ring."""
        if self.kind == "Q":
            return Fraction(x)
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise RingError(f"{x} is not integral")
            x = x.numerator
        if not isinstance(x, (int, np.integer)):
            raise RingError(f"cannot coerce {x!r} into {self}")
        x = int(x)
        if self.kind == "Z":
            return x
        if self.k == 1:
            return x % self.p
        if not 0 <= x < self.order:
            raise RingError(f"{x} is not an encoded element of {self}")
        return x

    def from_int(self, n: int):
        """Image of the integer ``n`` under the canonical map Z -> ring."""
        if self.kind == "GF":
            return n % self.p
        return self.coerce(n)

    def add(self, a, b):
        if self.kind != "GF":
            return a + b
        if self.k == 1:
            return (a + b) % self.p
        return field_tables(self).add_list[a][b]

    def neg(self, a):
        if self.kind != "GF":
            return -a
        if self.k == 1:
            return -a % self.p
        return field_tables(self).neg_list[a]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.kind != "GF":
            return a * b
        if self.k == 1:
            return a * b % self.p
        return field_tables(self).mul_list[a][b]

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        if self.kind == "Z":
            if a in (1, -1):
                return a
            raise RingError(f"{a} is not a unit in Z")
        if self.kind == "Q":
            return 1 / a
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return field_tables(self).inv_list[a]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == 0

    def elements(self) -> range:
        if self.kind != "GF":
            raise RingError(f"{self} is infinite")
        return range(self.order)

    def sqrt_char2(self, a):
        """Inverse of the Frobenius ``x -> x^2`` on GF(2^k)."""
        if self.p != 2:
            raise RingError("Frobenius square root needs characteristic 2")
        r = a
        for _ in range(self.k - 1):
            r = self.mul(r, r)
        return r

    def coefficients(self, a) -> tuple[int, ...]:
        """Coefficient vector (length k) of an encoded GF(p^k) element."""
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return tuple(out)

    def format(self, a) -> str:
        return str(a)


@dataclass(frozen=True, eq=False)
class FieldTables:
    """Dense operation tables of a finite field, shared by the numeric kernels."""

    q: int
    p: int
    k: int
    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray
    add_list: list = field(repr=False)
    mul_list: list = field(repr=False)
    neg_list: list = field(repr=False)
    inv_list: list = field(repr=False)


@lru_cache(maxsize=None)
def field_tables(ring: RingSpec) -> FieldTables:
    if not ring.is_finite:
        raise RingError(f"{ring} has no finite tables")
    p, k, q = ring.p, ring.k, ring.order
    digits = [RingSpec.coefficients(ring, a) for a in range(q)]

    def encode(cs):
        return sum(c * p**i for i, c in enumerate(cs))

    add = [[encode((x + y) % p for x, y in zip(digits[a], digits[b])) for b in range(q)] for a in range(q)]
    if k == 1:
        mul = [[a * b % p for b in range(q)] for a in range(q)]
    else:
        mul = []
        for a in range(q):
            row = []
            for b in range(q):
                prod_ = [0] * (2 * k - 1)
                for i, x in enumerate(digits[a]):
                    for j, y in enumerate(digits[b]):
                        prod_[i + j] += x * y
                red = _poly_mod(prod_, ring.modulus, p)
                row.append(encode(red + [0] * (k - len(red))))
            mul.append(row)
    neg = [add[a].index(0) for a in range(q)]
    inv = [0] + [mul[a].index(1) for a in range(1, q)]
    return FieldTables(
        q=q, p=p, k=k,
        add=np.array(add, dtype=np.int64),
        mul=np.array(mul, dtype=np.int64),
        neg=np.array(neg, dtype=np.int64),
        inv=np.array(inv, dtype=np.int64),
        add_list=add, mul_list=mul, neg_list=neg, inv_list=inv,
    )


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix with entries in ``ring``."""

    ring: RingSpec
    rows: int
    cols: int
    entries: tuple[tuple, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry grid does not match the declared shape")

    @classmethod
    def from_rows(cls, ring: RingSpec, rows: Iterable[Iterable], cols: int | None = None) -> Matrix:
        grid = tuple(tuple(ring.coerce(x) for x in r) for r in rows)
        if cols is None:
            if not grid:
                raise ValueError("column count required for a matrix with no rows")
            cols = len(grid[0])
        return cls(ring, len(grid), cols, grid)

    @classmethod
    def zeros(cls, ring: RingSpec, rows: int, cols: int) -> Matrix:
        return cls(ring, rows, cols, tuple((ring.zero,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, ring: RingSpec, n: int) -> Matrix:
        return cls(ring, n, n, tuple(
            tuple(ring.one if i == j else ring.zero for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def transpose(self) -> Matrix:
        return Matrix(self.ring, self.cols, self.rows,
                      tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols)))

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ring != other.ring:
            raise RingError("ring mismatch")
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        R = self.ring
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = R.zero
                for t in range(self.cols):
                    acc = R.add(acc, R.mul(self.entries[i][t], other.entries[t][j]))
                row.append(acc)
            out.append(tuple(row))
        return Matrix(R, self.rows, other.cols, tuple(out))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def promote(self) -> Matrix:
        """Move integer matrices to Q; other rings are returned unchanged."""
        if self.ring.kind != "Z":
            return self
        Q = RingSpec.rationals()
        return Matrix(Q, self.rows, self.cols, tuple(tuple(Fraction(x) for x in r) for r in self.entries))


def rref(m: Matrix) -> tuple[Matrix, int, tuple[int, ...]]:
    """Reduced row echelon form with first-nonzero pivoting.

    Integer matrices are reduced over Q.  Zero rows are kept at the bottom so
    the shape is preserved.
    """
    m = m.promote()
    R = m.ring
    a = [list(r) for r in m.entries]
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        if r == m.rows:
            break
        piv = next((i for i in range(r, m.rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = R.inv(a[r][c])
        a[r] = [R.mul(inv, x) for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][c] != 0:
                f = R.neg(a[i][c])
                a[i] = [R.add(x, R.mul(f, y)) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return Matrix(R, m.rows, m.cols, tuple(tuple(x) for x in a)), r, tuple(pivots)


def kernel_basis(m: Matrix) -> Matrix:
    """Basis (as RREF rows) of the right null space ``{x : m x = 0}``."""
    red, rank, pivots = rref(m)
    R = red.ring
    free = [c for c in range(m.cols) if c not in pivots]
    vecs = []
    for f in free:
        v = [R.zero] * m.cols
        v[f] = R.one
        for i, pc in enumerate(pivots):
            v[pc] = R.neg(red[i, f])
        vecs.append(tuple(v))
    if not vecs:
        return Matrix(R, 0, m.cols, ())
    basis, _, _ = rref(Matrix(R, len(vecs), m.cols, tuple(vecs)))
    return basis


def tensor_pair(u: Sequence, v: Sequence, ring: RingSpec) -> tuple:
    """Coordinates of ``u (x) v``; index ``i*len(v) + j`` holds ``u_i v_j``."""
    return tuple(ring.mul(a, b) for a in u for b in v)


def rank_one_match(x: Sequence, v: Sequence, u: Sequence, y: Sequence, ring: RingSpec):
    """Return ``a`` with ``u = a x`` and ``v = a y`` when ``x (x) v == u (x) y``.

    Returns ``None`` when the two tensors differ.  ``x`` and ``y`` must be
    nonzero.
    """
    F = ring.field_of_fractions()
    x, v, u, y = ([F.coerce(c) for c in w] for w in (x, v, u, y))
    if all(c == 0 for c in x) or all(c == 0 for c in y):
        raise ValueError("x and y must be nonzero")
    if len(x) != len(u) or len(v) != len(y):
        raise ValueError("dimension mismatch")
    if tensor_pair(x, v, F) != tensor_pair(u, y, F):
        return None
    i = next(i for i, c in enumerate(x) if c != 0)
    a = F.div(u[i], x[i])
    assert all(F.mul(a, xi) == ui for xi, ui in zip(x, u))
    assert all(F.mul(a, yj) == vj for yj, vj in zip(y, v))
    return a
