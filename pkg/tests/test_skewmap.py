from __future__ import annotations

import pytest

from isoindex import (
    AntisymmetryError,
    BudgetExceeded,
    NotIsotropicError,
    RankSet,
    RankSetUnavailable,
    RingError,
    RingSpec,
    SkewBilinearMap,
    Subspace,
    bounds,
    direct_sum,
    enumerate_maximal_isotropic,
    evaluate,
    extend_scalars,
    greedy_maximal,
    is_isotropic,
    is_maximal_isotropic,
    isotropy_index,
    kernel,
    product_map,
    rank_set,
    rank_set_product_law,
    rank_set_sum_law,
)
from isoindex.manifolds import compile_expr, parse_expr
from oracle import naive_maximal

Q = RingSpec.rationals()
Z = RingSpec.integers()
F2 = RingSpec.prime_field(2)
F3 = RingSpec.prime_field(3)
F5 = RingSpec.prime_field(5)
F4 = RingSpec.ext_field(2, 2)


def cross_product(R):
    """phi(x, y) = [[x, y], e3] on a 3-space."""
    return SkewBilinearMap.from_lists(R, [
        [[0, 0, -1], [0, 0, 0], [1, 0, 0]],
        [[0, 0, 0], [0, 0, -1], [0, 1, 0]],
        [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    ])


def rp3(R=F2):
    return SkewBilinearMap.from_lists(R, [[[1]]])


def span(R, n, *vs):
    return Subspace.span(R, n, vs)


class TestConstruction:
    def test_antisymmetry_violation_names_entry(self):
        with pytest.raises(AntisymmetryError) as exc:
            SkewBilinearMap.from_lists(Q, [[[0, 1], [1, 0]]])
        assert (exc.value.t, exc.value.i, exc.value.j) == (0, 0, 1)

    def test_diagonal_rejected_outside_char2(self):
        with pytest.raises(AntisymmetryError):
            SkewBilinearMap.from_lists(Q, [[[1]]])
        with pytest.raises(AntisymmetryError):
            SkewBilinearMap.from_lists(F3, [[[0, 1], [2, 1]]])

    def test_char2_diagonal_allowed(self):
        assert rp3().gram == (((1,),),)

    def test_rank_set_invariant(self):
        with pytest.raises(ValueError):
            RankSet.of(0, 2)
        with pytest.raises(ValueError):
            RankSet(())
        assert RankSet.of(3, 1, 3).values == (1, 3)


class TestEvaluate:
    def test_defining_entry(self):
        assert evaluate(SkewBilinearMap.symplectic(Q, 1), (1, 0), (0, 1)) == (1,)

    def test_alternating_odd_char(self):
        phi = cross_product(F3)
        for x in [(1, 2, 0), (2, 2, 1), (0, 1, 1)]:
            assert evaluate(phi, x, x) == (0, 0, 0)

    def test_rp3_square_nonzero(self):
        assert evaluate(rp3(), (1,), (1,)) == (1,)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            evaluate(rp3(), (1, 0), (1,))


class TestKernel:
    def test_zero_map(self):
        assert kernel(SkewBilinearMap.zero(Q, 3, 1)).rank == 3

    def test_symplectic(self):
        assert kernel(SkewBilinearMap.symplectic(Q, 3)).rank == 0

    def test_cross_product(self):
        # 9x3 system: columns of the stacked Gram rows have full rank.
        assert kernel(cross_product(Q)).rank == 0


class TestIsotropy:
    def test_kernel_isotropic(self):
        for phi in [cross_product(Q), SkewBilinearMap.zero(Q, 2, 1), rp3()]:
            assert is_isotropic(phi, kernel(phi))

    def test_symplectic_whole_space(self):
        assert not is_isotropic(SkewBilinearMap.symplectic(Q, 1), Subspace.whole(Q, 2))

    def test_rp3_whole_space(self):
        assert not is_isotropic(rp3(), Subspace.whole(F2, 1))

    def test_lagrangian_maximal(self):
        g = 3
        H = span(Q, 2 * g, *[[1 if j == 2 * i else 0 for j in range(2 * g)] for i in range(g)])
        assert is_maximal_isotropic(SkewBilinearMap.symplectic(Q, g), H)

    def test_cross_product_both_ranks_maximal(self):
        phi = cross_product(Q)
        assert is_maximal_isotropic(phi, span(Q, 3, (0, 0, 1)))
        assert is_maximal_isotropic(phi, span(Q, 3, (1, 0, 0), (0, 1, 0)))

    def test_zero_map_line_not_maximal(self):
        assert not is_maximal_isotropic(SkewBilinearMap.zero(Q, 2, 1), span(Q, 2, (1, 0)))

    def test_non_isotropic_input(self):
        with pytest.raises(NotIsotropicError):
            is_maximal_isotropic(rp3(), Subspace.whole(F2, 1))

    def test_char2_extension_through_diagonal(self):
        # phi(e1,e1) = phi(e2,e2) = 1 in one coordinate: e1 + e2 is isotropic.
        phi = SkewBilinearMap.from_lists(F2, [[[1, 0], [0, 1]]])
        assert is_maximal_isotropic(phi, span(F2, 2, (1, 1)))
        assert not is_maximal_isotropic(phi, Subspace(F2, 2, span(F2, 2).basis))


class TestEnumeration:
    def test_symplectic_gf2(self):
        subs = enumerate_maximal_isotropic(SkewBilinearMap.symplectic(F2, 1))
        assert [s.vectors for s in subs] == [((0, 1),), ((1, 0),), ((1, 1),)]

    def test_zero_map_gf3(self):
        subs = enumerate_maximal_isotropic(SkewBilinearMap.zero(F3, 2, 1))
        assert [s.vectors for s in subs] == [((1, 0), (0, 1))]

    def test_genus2_times_circle_gf3(self):
        phi = compile_expr(parse_expr("Sg(2) x S(1)"), F3)
        subs = enumerate_maximal_isotropic(phi)
        # frozen from the naive reference enumeration
        assert len(subs) == 121
        assert sorted({s.rank for s in subs}) == [1, 2]

    def test_cross_product_gf5_matches_reference(self):
        phi = cross_product(F5)
        subs = enumerate_maximal_isotropic(phi)
        assert len(subs) == 26
        ref = naive_maximal(F5, [list(map(list, G)) for G in phi.gram], 3)
        assert [s.vectors for s in subs] == ref

    def test_infinite_ring_rejected(self):
        with pytest.raises(RingError):
            enumerate_maximal_isotropic(cross_product(Q))

    def test_budget_guard(self):
        with pytest.raises(BudgetExceeded) as exc:
            enumerate_maximal_isotropic(SkewBilinearMap.zero(F3, 5, 0), budget=100)
        assert exc.value.required == 3**5
        with pytest.raises(BudgetExceeded):
            enumerate_maximal_isotropic(SkewBilinearMap.zero(F2, 11, 0))


class TestRankSet:
    def test_rp3(self):
        assert rank_set(rp3()) == RankSet.of(0)

    def test_cross_product_gf5(self):
        assert rank_set(cross_product(F5)) == RankSet.of(1, 2)

    def test_genus2_over_q(self):
        assert rank_set(SkewBilinearMap.symplectic(Q, 2)) == RankSet.of(2)

    def test_zero_codomain_over_q(self):
        assert rank_set(SkewBilinearMap.zero(Q, 3, 0)) == RankSet.of(3)
        assert rank_set(SkewBilinearMap.zero(Q, 0, 0)) == RankSet.of(0)

    def test_general_q_refused(self):
        with pytest.raises(RankSetUnavailable, match="isotropy_index"):
            rank_set(cross_product(Q))


class TestIsotropyIndex:
    @pytest.mark.parametrize("g", range(5))
    def test_genus(self, g):
        rep = isotropy_index(SkewBilinearMap.symplectic(Q, g))
        assert rep.exact and rep.h == g and rep.rank_set == RankSet.of(g)

    @pytest.mark.parametrize("n", [0, 1, 4])
    def test_zero_map(self, n):
        rep = isotropy_index(SkewBilinearMap.zero(Q, n, 1))
        assert rep.h == n and rep.rank_set == RankSet.of(n)

    def test_heisenberg(self):
        assert isotropy_index(SkewBilinearMap.zero(Q, 2, 2)).h == 2

    def test_single_form_rank(self):
        phi = SkewBilinearMap.from_lists(Q, [[[0, 1, 2], [-1, 0, 3], [-2, -3, 0]]])
        rep = isotropy_index(phi)
        assert rep.method == "single-form" and rep.h == 2

    def test_finite_field_exact(self):
        rep = isotropy_index(cross_product(F5))
        assert rep.method == "bruteforce" and rep.rank_set == RankSet.of(1, 2)
        assert [w.rank for w in rep.witnesses] == [1, 2]
        for w in rep.witnesses:
            assert is_maximal_isotropic(cross_product(F5), w)

    def test_interval_over_q(self):
        rep = isotropy_index(cross_product(Q))
        assert rep.method == "bounds+greedy"
        assert rep.h_lower <= 2 <= rep.h_upper
        for w in rep.witnesses:
            assert is_maximal_isotropic(cross_product(Q), w)

    def test_integer_map(self):
        phi = SkewBilinearMap.from_lists(Z, [[[0, 2], [-2, 0]]])
        assert isotropy_index(phi).h == 1


class TestGreedy:
    def test_zero_map(self):
        assert greedy_maximal(SkewBilinearMap.zero(Q, 3, 1), seed=4).rank == 3

    @pytest.mark.parametrize("seed", range(5))
    def test_symplectic(self, seed):
        phi = SkewBilinearMap.symplectic(Q, 3)
        H = greedy_maximal(phi, seed)
        assert H.rank == 3 and is_maximal_isotropic(phi, H)

    @pytest.mark.parametrize("seed", range(8))
    def test_cross_product(self, seed):
        phi = cross_product(Q)
        H = greedy_maximal(phi, seed)
        assert H.rank in (1, 2) and is_maximal_isotropic(phi, H)

    @pytest.mark.parametrize("R", [F2, F4])
    def test_char2(self, R):
        phi = SkewBilinearMap.from_lists(R, [[[1, 0, 0], [0, 1, 1], [0, 1, 0]], [[0, 1, 0], [1, 1, 0], [0, 0, 1]]])
        for seed in range(6):
            assert is_maximal_isotropic(phi, greedy_maximal(phi, seed))


class TestConstructions:
    def test_two_tori_make_genus_two(self):
        phi = direct_sum(SkewBilinearMap.symplectic(Q, 1), SkewBilinearMap.symplectic(Q, 1))
        assert phi.dim_l == 4 and phi.dim_v == 2
        # both coordinates together carry the genus-2 form
        total = [[phi.gram[0][i][j] + phi.gram[1][i][j] for j in range(4)] for i in range(4)]
        assert total == [list(r) for r in SkewBilinearMap.symplectic(Q, 2).gram[0]]
        assert isotropy_index(phi).h == 2

    def test_sum_with_empty(self):
        phi = cross_product(Q)
        assert direct_sum(phi, SkewBilinearMap.zero(Q, 0, 0)) == phi

    def test_rp3_sum_gf2(self):
        # frozen from the naive reference enumeration
        assert rank_set(direct_sum(rp3(), rp3())) == RankSet.of(0)
        assert naive_maximal(F2, [[[1, 0], [0, 0]], [[0, 0], [0, 1]]], 2) == [()]

    def test_circle_times_circle(self):
        c = SkewBilinearMap.zero(Q, 1, 0)
        phi = product_map(c, c)
        assert (phi.dim_l, phi.dim_v) == (2, 1)
        assert phi.gram == (((0, 1), (-1, 0)),)

    def test_product_with_point(self):
        phi = cross_product(Q)
        assert product_map(phi, SkewBilinearMap.zero(Q, 0, 0)) == phi

    def test_genus2_times_circle_gf3(self):
        phi = product_map(SkewBilinearMap.symplectic(F3, 2), SkewBilinearMap.zero(F3, 1, 0))
        assert (phi.dim_l, phi.dim_v) == (5, 1 + 4)
        assert rank_set(phi) == RankSet.of(1, 2)

    def test_ring_mismatch(self):
        with pytest.raises(RingError):
            direct_sum(rp3(), SkewBilinearMap.zero(F3, 1, 0))


class TestLaws:
    def test_sum_examples(self):
        assert rank_set_sum_law(RankSet.of(1, 2), RankSet.of(1, 2)) == RankSet.of(2, 3, 4)
        assert rank_set_sum_law(RankSet.of(2), RankSet.of(3)) == RankSet.of(5)
        s = RankSet.of(1, 2, 3)
        assert rank_set_sum_law(s, s) == RankSet.of(2, 3, 4, 5, 6)

    def test_product_examples(self):
        assert rank_set_product_law(RankSet.of(2), RankSet.of(3)) == RankSet.of(1, 2, 3)
        assert rank_set_product_law(RankSet.of(0), RankSet.of(1)) == RankSet.of(1)
        assert rank_set_product_law(RankSet.of(1), RankSet.of(1)) == RankSet.of(1)
        assert rank_set_product_law(RankSet.of(2, 4), RankSet.of(0), 4, 0) == RankSet.of(2, 4)


class TestExtendScalars:
    def test_example_k2(self):
        phi = SkewBilinearMap.from_lists(Z, [[[0, 2], [-2, 0]]])
        assert extend_scalars(phi, F2).is_zero()
        assert isotropy_index(extend_scalars(phi, F2)).h == 2
        assert isotropy_index(extend_scalars(phi, F3)).h == 1
        assert isotropy_index(extend_scalars(phi, Q)).h == 1

    def test_gf2_to_gf4(self):
        phi = SkewBilinearMap.from_lists(F2, [[[1, 0], [0, 1]], [[0, 1], [1, 0]]])
        assert rank_set(phi).max <= rank_set(extend_scalars(phi, F4)).max

    def test_illegal_pairs(self):
        with pytest.raises(RingError):
            extend_scalars(cross_product(Q), F3)
        with pytest.raises(RingError):
            extend_scalars(rp3(), RingSpec.ext_field(3, 2))


class TestBounds:
    @pytest.mark.parametrize("g", range(1, 6))
    def test_surface(self, g):
        b = bounds(2 * g, 1, 0)
        assert (b.lo, b.hi) == (g, g)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_torus_surjective(self, n):
        b = bounds(n, n * (n - 1) // 2, 0, surjective=True)
        assert b.hi == 1 and b.surjective_hi == 1

    def test_rp3_exception(self):
        b = bounds(1, 1, 0, char2=True, surjective=True)
        assert (b.lo, b.hi, b.exception) == (0, 0, True)
        assert b.holds(0)

    def test_radicand_negative(self):
        b = bounds(2, 2, 0, surjective=True)
        assert b.radicand_negative and b.surjective_hi is None

    def test_surjective_closed_form(self):
        # largest h > k with (2h - 2k - 1)^2 <= D, by direct search
        for b1 in range(0, 9):
            for b2 in range(0, 10):
                for k in range(0, b1 + 1):
                    b = bounds(b1, b2, k, surjective=True)
                    D = (2 * b1 - 2 * k - 1) ** 2 - 8 * b2
                    if D < 0:
                        assert b.radicand_negative
                        continue
                    best = max([h for h in range(k + 1, 4 * b1 + 3) if (2 * h - 2 * k - 1) ** 2 <= D],
                               default=k)
                    assert b.surjective_hi == best

    def test_invalid(self):
        with pytest.raises(ValueError):
            bounds(2, 1, 3)
