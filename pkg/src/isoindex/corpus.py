"""Reference fixtures and the pairwise expression corpus used by selftest and the tests."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

from .exactalg import RingSpec
from .manifolds import (
    ConnSum,
    Heisenberg,
    KodairaThurston,
    Product,
    RP3,
    Sphere,
    Surface,
    Torus,
    betti,
    dim,
    parse_expr,
)

__all__ = ["Fixture", "KNOWN_VALUES", "ATOMS", "corpus"]


@dataclass(frozen=True)
class Fixture:
    name: str
    expr: str
    ring: str
    rank_set: tuple[int, ...] | None = None
    h: int | None = None
    b1: int | None = None
    corank: int | None = None

    def parsed(self):
        return parse_expr(self.expr)

    @property
    def ringspec(self) -> RingSpec:
        return RingSpec.parse(self.ring)


KNOWN_VALUES: tuple[Fixture, ...] = (
    *(Fixture(f"surface genus {g}", f"Sg({g})", "Q", (g,), g, 2 * g) for g in range(5)),
    *(Fixture(f"torus T^{n}", f"T({n})", "Q", (1,), 1, n) for n in range(1, 6)),
    Fixture("genus-2 surface times circle", "Sg(2) x S(1)", "Z", (1, 2), 2, 5),
    Fixture("product of genus-2 and genus-3 surfaces", "Sg(2) x Sg(3)", "Q", (1, 2, 3), 3, 10),
    Fixture("sum of two (genus-2 x circle)", "Sg(2) x S(1) # Sg(2) x S(1)", "Z", (2, 3, 4), 4, 10),
    Fixture("sum of two (genus-2 x genus-3)", "Sg(2) x Sg(3) # Sg(2) x Sg(3)", "Q",
            (2, 3, 4, 5, 6), 6, 20),
    Fixture("real projective 3-space mod 2", "RP3", "GF(2)", (0,), 0, 1),
    Fixture("Heisenberg nilmanifold", "Heis", "Q", None, 2, 2, 1),
    Fixture("Kodaira-Thurston manifold", "KT", "Q", None, 2, 3, 1),
)


ATOMS = (
    Sphere(1), Sphere(2), Sphere(3), Sphere(4),
    Surface(1), Surface(2), Surface(3),
    Torus(2), Torus(3), Torus(4),
    RP3(), Heisenberg(), KodairaThurston(),
)


def _allowed(e, ring: RingSpec) -> bool:
    if not ring.is_finite:
        return True
    return not _mentions(e, (Heisenberg, KodairaThurston))


def _mentions(e, kinds) -> bool:
    if isinstance(e, kinds):
        return True
    return any(_mentions(c, kinds) for c in getattr(e, "children", ()))


def corpus(ring: RingSpec, max_b1: int = 6) -> list:
    """All atoms plus pairwise sums and products with ``b1 <= max_b1``.

    Atoms not modeled over ``ring`` are skipped.
    """
    atoms = [a for a in ATOMS if _allowed(a, ring)]
    out = [a for a in atoms if betti(a, ring)[1] <= max_b1]
    for a, b in combinations_with_replacement(atoms, 2):
        b1 = betti(a, ring)[1] + betti(b, ring)[1]
        if b1 > max_b1:
            continue
        out.append(Product((a, b)))
        if dim(a) == dim(b) >= 2:
            out.append(ConnSum((a, b)))
    return out
