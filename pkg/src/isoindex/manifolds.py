"""Manifold expressions built from model atoms by connected sum and product.

Each atom carries its Betti numbers and a model of the cup product on
``H^1``.  Expressions can be evaluated structurally (rank sets combine by
the sum law under ``#`` and the product law under ``x``) or compiled into an
explicit :class:`~isoindex.skewmap.SkewBilinearMap` and enumerated.

Grammar::

    expr    := product ('#' product)*
    product := atom ('x' atom)*
    atom    := 'S(' n ')' | 'Sg(' g ')' | 'T(' n ')' | 'RP3' | 'Heis' | 'KT' | '(' expr ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Union

from .exactalg import RingError, RingSpec
from .skewmap import (
    Bounds,
    RankSet,
    SkewBilinearMap,
    bounds,
    direct_sum,
    image_rank,
    kernel,
    product_map,
    rank_set_product_law,
    rank_set_sum_law,
)

__all__ = [
    "ExprError",
    "ExprSyntaxError",
    "Sphere",
    "Surface",
    "Torus",
    "RP3",
    "Heisenberg",
    "KodairaThurston",
    "ConnSum",
    "Product",
    "ManifoldExpr",
    "CohomologyModel",
    "EvalResult",
    "BoundsReport",
    "dim",
    "normalize",
    "to_text",
    "parse_expr",
    "atom_model",
    "betti",
    "eval_structural",
    "compile_expr",
    "realize",
    "realize_dim3_mod2",
    "realize_rank_set",
    "corank",
    "bounds_check",
]


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, msg: str, pos: int, text: str = ""):
        where = f" at position {pos}"
        if text:
            where += f"\n  {text}\n  {' ' * pos}^"
        super().__init__(msg + where)
        self.pos = pos


# -- AST ----------------------------------------------------------------------

@dataclass(frozen=True)
class Sphere:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ExprError(f"sphere dimension must be >= 1, got {self.n}")


@dataclass(frozen=True)
class Surface:
    g: int

    def __post_init__(self):
        if self.g < 0:
            raise ExprError(f"genus must be >= 0, got {self.g}")


@dataclass(frozen=True)
class Torus:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ExprError(f"torus dimension must be >= 1, got {self.n}")


@dataclass(frozen=True)
class RP3:
    pass


@dataclass(frozen=True)
class Heisenberg:
    pass


@dataclass(frozen=True)
class KodairaThurston:
    pass


@dataclass(frozen=True)
class ConnSum:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ExprError("connected sum needs at least two summands")
        dims = [dim(c) for c in self.children]
        if any(d != dims[0] for d in dims):
            bad = next(d for d in dims if d != dims[0])
            raise ExprError(f"conn-sum dimension mismatch ({dims[0]} vs {bad})")
        if dims[0] < 2:
            raise ExprError(f"conn-sum needs dimension >= 2, got {dims[0]}")


@dataclass(frozen=True)
class Product:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ExprError("product needs at least two factors")


ATOMS = (Sphere, Surface, Torus, RP3, Heisenberg, KodairaThurston)
ManifoldExpr = Union[Sphere, Surface, Torus, RP3, Heisenberg, KodairaThurston, ConnSum, Product]


def dim(e: ManifoldExpr) -> int:
    if isinstance(e, (Sphere, Torus)):
        return e.n
    if isinstance(e, Surface):
        return 2
    if isinstance(e, (RP3, Heisenberg)):
        return 3
    if isinstance(e, KodairaThurston):
        return 4
    if isinstance(e, ConnSum):
        return dim(e.children[0])
    if isinstance(e, Product):
        return sum(dim(c) for c in e.children)
    raise TypeError(f"not a manifold expression: {e!r}")


def normalize(e: ManifoldExpr) -> ManifoldExpr:
    """Rewrite tori as products of circles, KT as Heis x S^1, Sg(0) as S^2."""
    if isinstance(e, Torus):
        return Sphere(1) if e.n == 1 else Product(tuple(Sphere(1) for _ in range(e.n)))
    if isinstance(e, KodairaThurston):
        return Product((Heisenberg(), Sphere(1)))
    if isinstance(e, Surface) and e.g == 0:
        return Sphere(2)
    if isinstance(e, ConnSum):
        return ConnSum(tuple(normalize(c) for c in e.children))
    if isinstance(e, Product):
        return Product(tuple(normalize(c) for c in e.children))
    return e


def to_text(e: ManifoldExpr) -> str:
    if isinstance(e, Sphere):
        return f"S({e.n})"
    if isinstance(e, Surface):
        return f"Sg({e.g})"
    if isinstance(e, Torus):
        return f"T({e.n})"
    if isinstance(e, RP3):
        return "RP3"
    if isinstance(e, Heisenberg):
        return "Heis"
    if isinstance(e, KodairaThurston):
        return "KT"
    if isinstance(e, ConnSum):
        return " # ".join(f"({to_text(c)})" if isinstance(c, ConnSum) else to_text(c) for c in e.children)
    if isinstance(e, Product):
        return " x ".join(f"({to_text(c)})" if isinstance(c, (ConnSum, Product)) else to_text(c)
                          for c in e.children)
    raise TypeError(f"not a manifold expression: {e!r}")


# -- parser -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(Heis|RP3|Sg|KT|S|T)|(x)|(#)|(\()|(\))|(\d+))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    kinds = ("name", "x", "#", "(", ")", "int")
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", start, text)
        kind = next(k for k, g in zip(kinds, m.groups()) if g is not None)
        toks.append((kind, m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind: str):
        tok = self.toks[self.i]
        if tok[0] != kind:
            shown = repr(tok[1]) if tok[1] else "end of input"
            raise ExprSyntaxError(f"expected {kind!r}, found {shown}", tok[2], self.text)
        self.i += 1
        return tok

    def expr(self):
        start = self.peek()[2]
        items = [self.product()]
        while self.peek()[0] == "#":
            self.take("#")
            items.append(self.product())
        if len(items) == 1:
            return items[0]
        try:
            return ConnSum(tuple(items))
        except ExprError as exc:
            raise ExprSyntaxError(str(exc), start, self.text) from None

    def product(self):
        items = [self.atom()]
        while self.peek()[0] == "x":
            self.take("x")
            items.append(self.atom())
        return items[0] if len(items) == 1 else Product(tuple(items))

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "(":
            self.take("(")
            e = self.expr()
            self.take(")")
            return e
        if kind != "name":
            shown = repr(val) if val else "end of input"
            raise ExprSyntaxError(f"expected a manifold, found {shown}", pos, self.text)
        self.take("name")
        if val == "RP3":
            return RP3()
        if val == "Heis":
            return Heisenberg()
        if val == "KT":
            return KodairaThurston()
        self.take("(")
        n = int(self.take("int")[1])
        self.take(")")
        try:
            return {"S": Sphere, "Sg": Surface, "T": Torus}[val](n)
        except ExprError as exc:
            raise ExprSyntaxError(str(exc), pos, self.text) from None

    def parse(self):
        e = self.expr()
        self.take("end")
        return e


def parse_expr(text: str) -> ManifoldExpr:
    """Parse the expression grammar; ``#`` binds looser than ``x``."""
    return _Parser(text).parse()


# -- cohomology models ----------------------------------------------------------

@dataclass(frozen=True)
class CohomologyModel:
    betti: tuple[int, ...]
    phi: SkewBilinearMap
    labels: tuple[str, ...] = ()


def _working_ring(R: RingSpec) -> RingSpec:
    return R.field_of_fractions()


def _check_atom_ring(e, R: RingSpec) -> None:
    if isinstance(e, (Heisenberg, KodairaThurston)) and R.is_finite:
        raise RingError(f"{to_text(e)} is only modeled over Z or Q, not {R}")


def atom_model(atom, R: RingSpec) -> CohomologyModel:
    _check_atom_ring(atom, R)
    F = _working_ring(R)
    if isinstance(atom, Sphere):
        b = [1] + [0] * (atom.n - 1) + [1]
        if atom.n == 1:
            b = [1, 1]
        return CohomologyModel(tuple(b), SkewBilinearMap.zero(F, b[1], 0),
                               ("t",) if atom.n == 1 else ())
    if isinstance(atom, Surface):
        labels = tuple(s for i in range(1, atom.g + 1) for s in (f"a{i}", f"b{i}"))
        return CohomologyModel((1, 2 * atom.g, 1), SkewBilinearMap.symplectic(F, atom.g), labels)
    if isinstance(atom, RP3):
        if F.characteristic == 2:
            return CohomologyModel((1, 1, 1, 1), SkewBilinearMap.from_lists(F, [[[F.one]]]), ("alpha",))
        return CohomologyModel((1, 0, 0, 1), SkewBilinearMap.zero(F, 0, 0))
    if isinstance(atom, Heisenberg):
        return CohomologyModel((1, 2, 2, 1), SkewBilinearMap.zero(F, 2, 2), ("x", "y"))
    raise ExprError(f"{atom!r} is not an atom after normalization")


def betti(e: ManifoldExpr, R: RingSpec) -> tuple[int, ...]:
    e = normalize(e)
    if isinstance(e, ConnSum):
        parts = [betti(c, R) for c in e.children]
        n = len(parts[0]) - 1
        return tuple(1 if i in (0, n) else sum(p[i] for p in parts) for i in range(n + 1))
    if isinstance(e, Product):
        return reduce(_convolve, (betti(c, R) for c in e.children))
    return atom_model(e, R).betti


def _convolve(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


def compile_expr(e: ManifoldExpr, R: RingSpec) -> SkewBilinearMap:
    """Explicit cup-product model on ``H^1`` with the formal codomain.

    Connected sums use the component-wise sum; products add the
    ``L1 (x) L2`` block.  Integer coefficients compile over Q.
    """
    e = normalize(e)
    if isinstance(e, ConnSum):
        return reduce(direct_sum, (compile_expr(c, R) for c in e.children))
    if isinstance(e, Product):
        return reduce(product_map, (compile_expr(c, R) for c in e.children))
    return atom_model(e, R).phi


# -- structural evaluation ------------------------------------------------------

@dataclass(frozen=True)
class EvalResult:
    b1: int
    rank_set: RankSet
    h: int
    corank: int | None
    exceptions_applied: tuple[str, ...] = ()

    def __post_init__(self):
        if self.h != self.rank_set.max:
            raise ValueError("h must equal max of the rank set")


def _atom_rank_set(e, R: RingSpec) -> RankSet:
    if isinstance(e, Sphere):
        return RankSet.of(1 if e.n == 1 else 0)
    if isinstance(e, Surface):
        return RankSet.of(e.g)
    if isinstance(e, RP3):
        return RankSet.of(0)
    if isinstance(e, Heisenberg):
        return RankSet.of(2)
    raise ExprError(f"{e!r} is not an atom after normalization")


def _structural(e, R: RingSpec, tags: list[str]) -> tuple[RankSet, int]:
    """(rank set, b1) of a normalized expression."""
    if isinstance(e, ConnSum):
        parts = [_structural(c, R, tags) for c in e.children]
        return reduce(rank_set_sum_law, (p[0] for p in parts)), sum(p[1] for p in parts)
    if isinstance(e, Product):
        s, b = _structural(e.children[0], R, tags)
        for c in e.children[1:]:
            s2, b2 = _structural(c, R, tags)
            for hj, bj in ((s.max, b), (s2.max, b2)):
                if hj == 0:
                    tags.append(_exception_tag(bj, R))
            s, b = rank_set_product_law(s, s2), b + b2
        return s, b
    _check_atom_ring(e, R)
    return _atom_rank_set(e, R), atom_model(e, R).betti[1]


def _exception_tag(b1: int, R: RingSpec) -> str:
    if b1 == 0:
        return "product:b1=0"
    if b1 == 1 and R.characteristic == 2:
        return "product:b1=1,char2,cup!=0"
    return "product:h=0"


def eval_structural(e: ManifoldExpr, R: RingSpec) -> EvalResult:
    """Rank set and ``h`` from the atom table and the sum/product laws.

    Over Z the rational answer is returned.  The product law drops a factor
    whose index is zero; each such use is recorded in ``exceptions_applied``.
    """
    F = _working_ring(R)
    tags: list[str] = []
    s, b1 = _structural(normalize(e), F, tags)
    return EvalResult(b1, s, s.max, corank(e), tuple(tags))


def corank(e: ManifoldExpr) -> int:
    """Co-rank of the fundamental group from the atom table.

    Additive under ``#`` and the maximum under ``x``.
    """
    if isinstance(e, Sphere):
        return 1 if e.n == 1 else 0
    if isinstance(e, Surface):
        return e.g
    if isinstance(e, Torus):
        return 1
    if isinstance(e, RP3):
        return 0
    if isinstance(e, (Heisenberg, KodairaThurston)):
        return 1
    if isinstance(e, ConnSum):
        return sum(corank(c) for c in e.children)
    if isinstance(e, Product):
        return max(corank(c) for c in e.children)
    raise TypeError(f"not a manifold expression: {e!r}")


# -- realization ----------------------------------------------------------------

def _balanced(b: int, h: int) -> list[int]:
    q, r = divmod(b, h)
    return [q + 1] * r + [q] * (h - r)


def _conn_sum(parts: list) -> ManifoldExpr:
    return parts[0] if len(parts) == 1 else ConnSum(tuple(parts))


def realize(h: int, b: int, ring: RingSpec | None = None) -> ManifoldExpr:
    """A manifold with index ``h`` and first Betti number ``b``.

    For ``1 <= h <= b`` this is the connected sum of ``T^{m_i} x S^{n - m_i}``
    over a balanced partition of ``b`` into ``h`` parts, in the smallest
    dimension ``n = 2 + ceil(b / h)`` the construction allows.  ``(0, 0)``
    gives ``S^3``; ``(0, 1)`` gives ``RP^3`` and only holds in characteristic 2,
    so it is refused when ``ring`` has another characteristic.
    """
    if h == 0 and b == 0:
        return Sphere(3)
    if h == 0 and b == 1:
        if ring is not None and ring.characteristic != 2:
            raise ExprError(f"(h, b) = (0, 1) needs characteristic 2, got {ring}")
        return RP3()
    if not 1 <= h <= b:
        raise ExprError(f"inadmissible (h, b) = ({h}, {b}): need 1 <= h <= b, h = b = 0, "
                        "or h = 0, b = 1 in characteristic 2")
    parts = _balanced(b, h)
    n = 2 + -(-b // h)
    return _conn_sum([Product((Torus(m), Sphere(n - m))) for m in parts])


def realize_dim3_mod2(h: int, b: int) -> ManifoldExpr:
    """A 3-manifold with index ``h`` and ``b_1 = b`` over GF(2).

    ``h`` copies of ``S^1 x S^2`` summed with ``b - h`` copies of ``RP^3``.
    """
    if h == 0 and b == 0:
        return Sphere(3)
    if not (0 <= h <= b and b >= 1):
        raise ExprError(f"inadmissible (h, b) = ({h}, {b}): need 0 <= h <= b with b >= 1")
    parts = [Product((Sphere(1), Sphere(2))) for _ in range(h)] + [RP3() for _ in range(b - h)]
    return _conn_sum(parts)


def realize_rank_set(values) -> ManifoldExpr:
    """A manifold whose rank set is exactly ``values``.

    Admissible sets are ``{0}`` or finite sets of positive integers.  With
    ``m = min S`` and ``N = |S| >= 2`` the result is the connected sum of
    ``prod_i M_{s_i - m + 1}`` (rank set ``{s_i - m + 1}``, which contains 1)
    with ``M_{m-1} x S^{2N-2}`` (rank set ``{m - 1}``), both of dimension 2N.
    """
    S = RankSet(tuple(values))
    if S.values == (0,):
        return Sphere(3)
    if len(S) == 1:
        return Surface(S.max)
    m, N = S.values[0], len(S)
    first = Product(tuple(Surface(s - m + 1) for s in S.values))
    second = Product((Surface(m - 1), Sphere(2 * N - 2)))
    return ConnSum((first, second))


# -- bounds -------------------------------------------------------------------

@dataclass(frozen=True)
class BoundsReport:
    b1: int
    b2: int
    k: int
    surjective: bool
    h: int
    bounds: Bounds

    @property
    def lo(self) -> int:
        return self.bounds.lo

    @property
    def hi(self) -> int:
        return self.bounds.hi

    @property
    def exception(self) -> bool:
        return self.bounds.exception

    @property
    def passed(self) -> bool:
        return self.bounds.holds(self.h)


def bounds_check(e: ManifoldExpr, R: RingSpec) -> BoundsReport:
    """Check ``lo <= h <= hi`` with the true ``b_2`` and the compiled kernel rank.

    The cup product counts as surjective when the span of its values has
    rank at least ``b_2``.
    """
    F = _working_ring(R)
    bv = betti(e, R)
    b1 = bv[1]
    b2 = bv[2] if len(bv) > 2 else 0
    phi = compile_expr(e, R)
    k = kernel(phi).rank
    surj = image_rank(phi) >= b2
    h = eval_structural(e, R).h
    bd = bounds(b1, b2, k, char2=F.characteristic == 2, surjective=surj)
    return BoundsReport(b1, b2, k, surj, h, bd)
