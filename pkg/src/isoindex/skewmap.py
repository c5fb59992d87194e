"""Skew-symmetric bilinear maps, isotropic subspaces and the isotropy index.

A map ``phi: L x L -> V`` is stored as a Gram tensor in fixed bases:
``gram[t][i][j]`` is the ``t``-th coordinate of ``phi(e_i, e_j)``.
In characteristic 2 the diagonal may be nonzero (``phi(x, x) != 0`` is
allowed), so isotropy always checks ``phi(x, x)`` as well.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

import numpy as np

from .exactalg import Matrix, RingError, RingSpec, field_tables, kernel_basis, rref, tensor_pair
from .kernels import BudgetExceeded, enumerate_maximal

__all__ = [
    "AntisymmetryError",
    "NotIsotropicError",
    "RankSetUnavailable",
    "SkewBilinearMap",
    "Subspace",
    "RankSet",
    "IsotropyReport",
    "Bounds",
    "DEFAULT_BUDGET",
    "MAX_ENUM_DIM",
    "evaluate",
    "kernel",
    "orthogonal",
    "is_isotropic",
    "is_maximal_isotropic",
    "enumerate_maximal_isotropic",
    "rank_set",
    "isotropy_index",
    "greedy_maximal",
    "direct_sum",
    "product_map",
    "rank_set_sum_law",
    "rank_set_product_law",
    "extend_scalars",
    "bounds",
    "image_rank",
    "is_alternating",
]

MAX_ENUM_DIM = 10


def _env_budget() -> int:
    return int(os.environ.get("ISOINDEX_BUDGET", 10**7))


DEFAULT_BUDGET = _env_budget()


class AntisymmetryError(ValueError):
    """Gram tensor violates ``gram[t][j][i] == -gram[t][i][j]`` (or a zero diagonal)."""

    def __init__(self, t: int, i: int, j: int, msg: str):
        super().__init__(f"gram[{t}][{i}][{j}]: {msg}")
        self.t, self.i, self.j = t, i, j


class NotIsotropicError(ValueError):
    pass


class RankSetUnavailable(ValueError):
    """No exact rank-set algorithm applies; use :func:`isotropy_index` instead."""


@dataclass(frozen=True)
class SkewBilinearMap:
    ring: RingSpec
    dim_l: int
    dim_v: int
    gram: tuple[tuple[tuple, ...], ...]

    def __post_init__(self):
        R = self.ring
        n, m = self.dim_l, self.dim_v
        if n < 0 or m < 0:
            raise ValueError("dimensions must be non-negative")
        if len(self.gram) != m:
            raise ValueError(f"expected {m} Gram matrices, got {len(self.gram)}")
        grid = []
        for t, G in enumerate(self.gram):
            if len(G) != n or any(len(r) != n for r in G):
                raise ValueError(f"gram[{t}] is not {n}x{n}")
            grid.append(tuple(tuple(R.coerce(x) for x in r) for r in G))
        for t, G in enumerate(grid):
            for i in range(n):
                if R.characteristic != 2 and G[i][i] != 0:
                    raise AntisymmetryError(t, i, i, "diagonal must vanish outside characteristic 2")
                for j in range(i + 1, n):
                    if G[j][i] != R.neg(G[i][j]):
                        raise AntisymmetryError(t, i, j, f"{G[i][j]} vs transposed entry {G[j][i]}")
        object.__setattr__(self, "gram", tuple(grid))

    @classmethod
    def from_lists(cls, ring: RingSpec, gram: Sequence, dim_l: int | None = None) -> SkewBilinearMap:
        gram = [[list(r) for r in G] for G in gram]
        if dim_l is None:
            if not gram:
                raise ValueError("dim_l required when the codomain is zero")
            dim_l = len(gram[0])
        return cls(ring, dim_l, len(gram), tuple(tuple(tuple(r) for r in G) for G in gram))

    @classmethod
    def zero(cls, ring: RingSpec, n: int, m: int = 0) -> SkewBilinearMap:
        z = tuple(tuple(ring.zero for _ in range(n)) for _ in range(n))
        return cls(ring, n, m, (z,) * m)

    @classmethod
    def symplectic(cls, ring: RingSpec, g: int) -> SkewBilinearMap:
        """Single form with blocks ``[[0, 1], [-1, 0]]`` on ``(a_i, b_i)``."""
        n = 2 * g
        G = [[ring.zero] * n for _ in range(n)]
        for i in range(g):
            G[2 * i][2 * i + 1] = ring.one
            G[2 * i + 1][2 * i] = ring.neg(ring.one)
        if n == 0:
            return cls.zero(ring, 0, 1)
        return cls.from_lists(ring, [G])

    @property
    def field(self) -> RingSpec:
        return self.ring.field_of_fractions()

    def matrices(self) -> list[Matrix]:
        return [Matrix(self.ring, self.dim_l, self.dim_l, G) for G in self.gram]

    def promote(self) -> SkewBilinearMap:
        if self.ring.kind != "Z":
            return self
        return extend_scalars(self, RingSpec.rationals())

    def is_zero(self) -> bool:
        return all(x == 0 for G in self.gram for r in G for x in r)

    def as_array(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64).reshape(self.dim_v, self.dim_l, self.dim_l)


@dataclass(frozen=True)
class Subspace:
    """Submodule of ``F^n`` stored as its RREF basis (no zero rows)."""

    ring: RingSpec
    ambient_dim: int
    basis: Matrix

    @classmethod
    def span(cls, ring: RingSpec, n: int, vectors: Iterable[Sequence]) -> Subspace:
        F = ring.field_of_fractions()
        rows = [tuple(F.coerce(x) for x in v) for v in vectors]
        if any(len(r) != n for r in rows):
            raise ValueError("vector length does not match ambient dimension")
        if not rows:
            return cls(F, n, Matrix(F, 0, n, ()))
        red, rank, _ = rref(Matrix(F, len(rows), n, tuple(rows)))
        return cls(F, n, Matrix(F, rank, n, red.entries[:rank]))

    @classmethod
    def whole(cls, ring: RingSpec, n: int) -> Subspace:
        F = ring.field_of_fractions()
        return cls(F, n, Matrix.identity(F, n))

    @property
    def rank(self) -> int:
        return self.basis.rows

    @property
    def vectors(self) -> tuple[tuple, ...]:
        return self.basis.entries

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(r) if x != 0) for r in self.basis.entries)

    def contains(self, v: Sequence) -> bool:
        return Subspace.span(self.ring, self.ambient_dim, self.vectors + (tuple(v),)).rank == self.rank

    def issubspace(self, other: Subspace) -> bool:
        return all(other.contains(v) for v in self.vectors)

    def __add__(self, other: Subspace) -> Subspace:
        return Subspace.span(self.ring, self.ambient_dim, self.vectors + other.vectors)

    def __str__(self) -> str:
        if not self.rank:
            return "<0>"
        return "<" + ", ".join("(" + ",".join(str(x) for x in r) + ")" for r in self.vectors) + ">"


@dataclass(frozen=True)
class RankSet:
    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(sorted(set(int(v) for v in self.values)))
        if not vals:
            raise ValueError("a rank set is never empty")
        if vals[0] < 0:
            raise ValueError("ranks are non-negative")
        if 0 in vals and vals != (0,):
            raise ValueError(f"rank set {set(vals)} contains 0 but is not {{0}}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, *values: int) -> RankSet:
        return cls(tuple(values))

    @property
    def max(self) -> int:
        return self.values[-1]

    def __iter__(self):
        return iter(self.values)

    def __contains__(self, x) -> bool:
        return x in self.values

    def __len__(self) -> int:
        return len(self.values)

    def __str__(self) -> str:
        return "{" + ", ".join(map(str, self.values)) + "}"


@dataclass(frozen=True)
class IsotropyReport:
    h_lower: int
    h_upper: int
    rank_set: RankSet | None
    witnesses: tuple[Subspace, ...]
    method: str

    def __post_init__(self):
        if self.h_lower > self.h_upper:
            raise ValueError("h_lower exceeds h_upper")
        if self.rank_set is not None and not (self.h_lower == self.h_upper == self.rank_set.max):
            raise ValueError("rank set inconsistent with the interval")

    @property
    def exact(self) -> bool:
        return self.h_lower == self.h_upper

    @property
    def h(self) -> int | None:
        return self.h_lower if self.exact else None


@dataclass(frozen=True)
class Bounds:
    lo: int
    hi: int
    exception: bool = False
    surjective_hi: int | None = None
    radicand_negative: bool = False

    def holds(self, h: int) -> bool:
        if self.exception:
            return h <= self.hi
        return self.lo <= h <= self.hi


# -- basic evaluation ---------------------------------------------------------

def _check_vec(phi: SkewBilinearMap, x: Sequence) -> tuple:
    if len(x) != phi.dim_l:
        raise ValueError(f"vector of length {len(x)} for a map on rank {phi.dim_l}")
    return tuple(phi.field.coerce(c) for c in x)


def evaluate(phi: SkewBilinearMap, x: Sequence, y: Sequence) -> tuple:
    """Coordinates of ``phi(x, y)``: ``x^T gram[t] y`` for each ``t``."""
    R = phi.field
    x, y = _check_vec(phi, x), _check_vec(phi, y)
    out = []
    for G in phi.gram:
        acc = R.zero
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, yj in enumerate(y):
                if yj != 0 and G[i][j] != 0:
                    acc = R.add(acc, R.mul(xi, R.mul(R.coerce(G[i][j]), yj)))
        out.append(acc)
    return tuple(out)


def _apply(phi: SkewBilinearMap, G, h: Sequence) -> tuple:
    """Row vector ``a -> sum_b G[a][b] h[b]`` so that ``phi_t(v, h) = v . row``."""
    R = phi.field
    return tuple(
        _dot(R, [R.coerce(g) for g in G[a]], h) for a in range(phi.dim_l))


def _dot(R: RingSpec, u: Sequence, v: Sequence):
    acc = R.zero
    for a, b in zip(u, v):
        if a != 0 and b != 0:
            acc = R.add(acc, R.mul(a, b))
    return acc


def kernel(phi: SkewBilinearMap) -> Subspace:
    """``{l : phi(l, l') = 0 for all l'}``."""
    R = phi.field
    n = phi.dim_l
    rows = []
    for G in phi.gram:
        for j in range(n):
            rows.append(tuple(R.coerce(G[i][j]) for i in range(n)))
    if not rows:
        return Subspace.whole(R, n)
    K = kernel_basis(Matrix(R, len(rows), n, tuple(rows)))
    return Subspace(R, n, K)


def orthogonal(phi: SkewBilinearMap, H: Subspace) -> Subspace:
    """``W = {v : phi(v, h) = 0 for all h in H}``."""
    R = phi.field
    n = phi.dim_l
    rows = [_apply(phi, G, h) for h in H.vectors for G in phi.gram]
    if not rows:
        return Subspace.whole(R, n)
    return Subspace(R, n, kernel_basis(Matrix(R, len(rows), n, tuple(rows))))


def is_isotropic(phi: SkewBilinearMap, H: Subspace) -> bool:
    if H.ambient_dim != phi.dim_l:
        raise ValueError("subspace and map live on different ranks")
    vs = H.vectors
    for i in range(len(vs)):
        for j in range(i, len(vs)):
            if any(c != 0 for c in evaluate(phi, vs[i], vs[j])):
                return False
    return True


def _quadratic_rank(phi: SkewBilinearMap, vectors: Sequence[Sequence]) -> int:
    """Rank of the matrix of diagonal values ``phi(u_r, u_r)`` (columns indexed by r)."""
    if not vectors or not phi.dim_v:
        return 0
    R = phi.field
    cols = [evaluate(phi, u, u) for u in vectors]
    M = Matrix(R, phi.dim_v, len(cols), tuple(tuple(c[t] for c in cols) for t in range(phi.dim_v)))
    return rref(M)[1]


def _complement(phi: SkewBilinearMap, H: Subspace) -> list[tuple]:
    """Basis of ``W'``: vectors orthogonal to ``H`` that vanish on the pivots of ``H``."""
    R = phi.field
    n = phi.dim_l
    W = orthogonal(phi, H)
    piv = H.pivots
    out = []
    for w in W.vectors:
        w = list(w)
        for h, p in zip(H.vectors, piv):
            if w[p] != 0:
                f = R.neg(w[p])
                w = [R.add(a, R.mul(f, b)) for a, b in zip(w, h)]
        out.append(tuple(w))
    S = Subspace.span(R, n, out)
    return list(S.vectors)


def is_maximal_isotropic(phi: SkewBilinearMap, H: Subspace) -> bool:
    """Whether the isotropic ``H`` admits no isotropic one-step extension.

    With ``W' `` a complement of ``H`` inside ``W = H^perp`` and basis
    ``u_r``, ``phi(sum c_r u_r, same) = sum c_r^2 phi(u_r, u_r)``.  Outside
    characteristic 2 every term vanishes, so maximality means ``W = H``; in
    characteristic 2 squaring is bijective on a finite field and maximality
    means the diagonal values are linearly independent.
    """
    if not is_isotropic(phi, H):
        raise NotIsotropicError(f"{H} is not isotropic")
    if phi.ring.characteristic == 2 and not phi.ring.is_finite:
        raise RingError("characteristic 2 requires a finite field")
    U = _complement(phi, H)
    return _quadratic_rank(phi, U) == len(U)


# -- enumeration --------------------------------------------------------------

def _compressed_array(phi: SkewBilinearMap) -> np.ndarray:
    """Gram tensor reduced to a basis of its image span (same isotropy data)."""
    n = phi.dim_l
    R = phi.ring
    if not phi.dim_v or not n:
        return np.zeros((0, n, n), dtype=np.int64)
    flat = Matrix(R, phi.dim_v, n * n, tuple(tuple(x for r in G for x in r) for G in phi.gram))
    red, rank, _ = rref(flat)
    return np.array([red.entries[t] for t in range(rank)], dtype=np.int64).reshape(rank, n, n)


def image_rank(phi: SkewBilinearMap) -> int:
    """Dimension of the span of all values ``phi(e_i, e_j)``."""
    if not phi.dim_v or not phi.dim_l:
        return 0
    n = phi.dim_l
    flat = Matrix(phi.ring, phi.dim_v, n * n, tuple(tuple(x for r in G for x in r) for G in phi.gram))
    return rref(flat)[1]


def is_alternating(phi: SkewBilinearMap) -> bool:
    return all(G[i][i] == 0 for G in phi.gram for i in range(phi.dim_l))


def enumerate_maximal_isotropic(phi: SkewBilinearMap, budget: int | None = None,
                                backend: str | None = None) -> list[Subspace]:
    """Every maximal isotropic subspace, as canonical RREF subspaces, sorted."""
    R = phi.ring
    if not R.is_finite:
        raise RingError(f"enumeration needs a finite field, got {R}")
    budget = DEFAULT_BUDGET if budget is None else budget
    n = phi.dim_l
    if n > MAX_ENUM_DIM:
        raise BudgetExceeded(R.order**n, budget, f"vectors (rank {n} > {MAX_ENUM_DIM})")
    if R.order**n > budget:
        raise BudgetExceeded(R.order**n, budget, "vectors")
    found = enumerate_maximal(_compressed_array(phi), n, field_tables(R), budget, backend)
    subs = [Subspace(R, n, Matrix(R, b.shape[0], n, tuple(tuple(int(x) for x in r) for r in b)))
            for b in found]
    subs.sort(key=lambda s: s.vectors)
    return subs


def _single_form_rank(phi: SkewBilinearMap) -> int | None:
    """``h`` for alternating maps whose image has rank <= 1, else ``None``."""
    if not is_alternating(phi):
        return None
    r = image_rank(phi)
    if r == 0:
        return phi.dim_l
    if r > 1:
        return None
    G = next(M for M in phi.matrices() if not M.is_zero())
    s2 = rref(G)[1]
    return phi.dim_l - s2 // 2


def rank_set(phi: SkewBilinearMap, budget: int | None = None, backend: str | None = None) -> RankSet:
    """The set of ranks of maximal isotropic submodules.

    Finite fields use exhaustive enumeration.  Over Q or Z only the zero map
    and the single-form case are exact here.
    """
    if phi.ring.is_finite:
        subs = enumerate_maximal_isotropic(phi, budget, backend)
        return RankSet(tuple(s.rank for s in subs))
    if phi.dim_l == 0:
        return RankSet.of(0)
    h = _single_form_rank(phi)
    if h is None:
        raise RankSetUnavailable(
            f"no exact rank-set algorithm over {phi.ring} for image rank {image_rank(phi)}; "
            "use isotropy_index for a certified interval")
    return RankSet.of(h)


def greedy_maximal(phi: SkewBilinearMap, seed: int = 0, box: int = 2) -> Subspace:
    """A maximal isotropic subspace built by random admissible extensions.

    Starts from the kernel.  Over Q the admissible vectors are drawn with
    integer coefficients in ``[-box, box]`` on a basis of the admissible
    subspace.
    """
    rng = random.Random(seed)
    R = phi.field
    n = phi.dim_l
    H = kernel(phi)
    while True:
        U = _complement(phi, H)
        if not U:
            return H
        if R.characteristic == 2:
            # admissible vectors: sum c_r u_r with sum c_r^2 q(u_r) = 0
            qs = [evaluate(phi, u, u) for u in U]
            M = Matrix(R, phi.dim_v, len(U), tuple(tuple(q[t] for q in qs) for t in range(phi.dim_v)))
            N = kernel_basis(M) if phi.dim_v else Matrix.identity(R, len(U))
            U = [tuple(_combine(R, [R.sqrt_char2(c) for c in row], U)) for row in N.entries]
            if not U:
                return H
        while True:
            if R.is_finite:
                coeffs = [rng.randrange(R.order) for _ in U]
            else:
                coeffs = [Fraction(rng.randint(-box, box)) for _ in U]
            if any(c != 0 for c in coeffs):
                break
        v = _combine(R, coeffs, U)
        H = H + Subspace.span(R, n, [v])


def _combine(R: RingSpec, coeffs: Sequence, vectors: Sequence[Sequence]) -> tuple:
    n = len(vectors[0])
    out = [R.zero] * n
    for c, v in zip(coeffs, vectors):
        if c != 0:
            out = [R.add(a, R.mul(c, b)) for a, b in zip(out, v)]
    return tuple(out)


def isotropy_index(phi: SkewBilinearMap, seed: int = 0, restarts: int = 32,
                   budget: int | None = None, backend: str | None = None) -> IsotropyReport:
    """Isotropy index with the strongest method available for ``phi``."""
    n = phi.dim_l
    R = phi.ring
    if R.is_finite:
        try:
            subs = enumerate_maximal_isotropic(phi, budget, backend)
        except BudgetExceeded:
            subs = None
        if subs is not None:
            rs = RankSet(tuple(s.rank for s in subs))
            witnesses = tuple(next(s for s in subs if s.rank == r) for r in rs)
            return IsotropyReport(rs.max, rs.max, rs, witnesses, "bruteforce")
    h = _single_form_rank(phi) if n else 0
    if h is not None:
        w = greedy_maximal(phi, seed)
        assert w.rank == h
        return IsotropyReport(h, h, RankSet.of(h), (w,), "single-form")
    found: dict[int, Subspace] = {}
    for i in range(restarts):
        w = greedy_maximal(phi, seed + i)
        found.setdefault(w.rank, w)
    lo = max(found)
    k = kernel(phi).rank
    b = bounds(n, image_rank(phi), k, char2=R.characteristic == 2, surjective=True)
    hi = min(b.hi, n)
    if lo > hi:  # pragma: no cover - would contradict the upper bound
        raise AssertionError(f"witness of rank {lo} exceeds upper bound {hi}")
    witnesses = tuple(found[r] for r in sorted(found))
    return IsotropyReport(lo, hi, None, witnesses, "bounds+greedy")


# -- constructions ------------------------------------------------------------

def _require_same_ring(a: SkewBilinearMap, b: SkewBilinearMap) -> RingSpec:
    if a.ring != b.ring:
        raise RingError(f"ring mismatch: {a.ring} vs {b.ring}")
    return a.ring


def _embed(R: RingSpec, G, n: int, offset: int):
    k = len(G)
    out = [[R.zero] * n for _ in range(n)]
    for i in range(k):
        for j in range(k):
            out[offset + i][offset + j] = G[i][j]
    return out


def direct_sum(phi1: SkewBilinearMap, phi2: SkewBilinearMap) -> SkewBilinearMap:
    """Component-wise sum on ``L1 + L2`` into ``V1 + V2``; cross terms vanish."""
    R = _require_same_ring(phi1, phi2)
    n = phi1.dim_l + phi2.dim_l
    gram = [_embed(R, G, n, 0) for G in phi1.gram]
    gram += [_embed(R, G, n, phi1.dim_l) for G in phi2.gram]
    return SkewBilinearMap.from_lists(R, gram, dim_l=n)


def product_map(phi1: SkewBilinearMap, phi2: SkewBilinearMap) -> SkewBilinearMap:
    """Künneth-type map ``phi1 + phi2 + (x1 (x) y2 - y1 (x) x2)`` into ``V1 + V2 + L1 (x) L2``."""
    R = _require_same_ring(phi1, phi2)
    n1, n2 = phi1.dim_l, phi2.dim_l
    n = n1 + n2
    gram = [_embed(R, G, n, 0) for G in phi1.gram]
    gram += [_embed(R, G, n, n1) for G in phi2.gram]
    unit = lambda k, i: tuple(R.one if j == i else R.zero for j in range(k))  # noqa: E731
    cross = [[[R.zero] * n for _ in range(n)] for _ in range(n1 * n2)]
    for i in range(n1):
        for j in range(n2):
            coords = tensor_pair(unit(n1, i), unit(n2, j), R)
            for t, c in enumerate(coords):
                if c != 0:
                    cross[t][i][n1 + j] = R.add(cross[t][i][n1 + j], c)
                    cross[t][n1 + j][i] = R.sub(cross[t][n1 + j][i], c)
    return SkewBilinearMap.from_lists(R, gram + cross, dim_l=n)


def rank_set_sum_law(s1: RankSet, s2: RankSet) -> RankSet:
    return RankSet(tuple(a + b for a in s1 for b in s2))


def rank_set_product_law(s1: RankSet, s2: RankSet, h1: int | None = None, h2: int | None = None) -> RankSet:
    h1 = s1.max if h1 is None else h1
    h2 = s2.max if h2 is None else h2
    if h1 == 0:
        return s2
    if h2 == 0:
        return s1
    return RankSet((1,) + s1.values + s2.values)


def extend_scalars(phi: SkewBilinearMap, target: RingSpec) -> SkewBilinearMap:
    """Base change Z -> Q, reduction Z -> GF(p), or embedding GF(p) -> GF(p^k)."""
    src = phi.ring
    if src == target:
        return phi
    if src.kind == "Z" and target.kind == "Q":
        conv = Fraction
    elif src.kind == "Z" and target.is_finite and target.k == 1:
        conv = target.from_int
    elif src.is_finite and src.k == 1 and target.is_finite and target.p == src.p:
        conv = int  # prime-field residues keep their encoding in GF(p^k)
    else:
        raise RingError(f"cannot change scalars from {src} to {target}")
    gram = tuple(tuple(tuple(conv(x) for x in r) for r in G) for G in phi.gram)
    return SkewBilinearMap(target, phi.dim_l, phi.dim_v, gram)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def bounds(b1: int, b2: int, k: int, char2: bool = False, surjective: bool = False) -> Bounds:
    """Betti-number bounds on ``h`` in exact integer arithmetic.

    ``lo = ceil((b1 + k b2) / (b2 + 1))`` and ``hi = floor((b1 b2 + k) / (b2 + 1))``.
    When the cup-type map is surjective, ``hi`` is tightened to the largest
    ``h`` with ``h <= k`` or ``(2h - 2k - 1)^2 <= (2 b1 - 2k - 1)^2 - 8 b2``.
    For ``char 2, b1 = 1, k = 0`` only the upper bound is asserted.
    """
    if not 0 <= k <= b1 or b2 < 0:
        raise ValueError(f"need 0 <= k <= b1 and b2 >= 0, got b1={b1} b2={b2} k={k}")
    lo = _ceil_div(b1 + k * b2, b2 + 1)
    hi = (b1 * b2 + k) // (b2 + 1)
    exception = char2 and b1 == 1 and k == 0
    if exception:
        return Bounds(0, hi, exception=True)
    surj_hi = None
    negative = False
    if surjective:
        disc = (2 * b1 - 2 * k - 1) ** 2 - 8 * b2
        if disc < 0:
            negative = True
        else:
            surj_hi = (isqrt(disc) + 2 * k + 1) // 2
            hi = min(hi, surj_hi)
    return Bounds(lo, hi, False, surj_hi, negative)
