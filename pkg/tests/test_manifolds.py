from __future__ import annotations

import pytest

from isoindex import RankSet, RingError, RingSpec, SkewBilinearMap, kernel, rank_set
from isoindex.corpus import ATOMS, corpus
from isoindex.manifolds import (
    RP3,
    ConnSum,
    ExprError,
    ExprSyntaxError,
    Heisenberg,
    KodairaThurston,
    Product,
    Sphere,
    Surface,
    Torus,
    atom_model,
    betti,
    bounds_check,
    compile_expr,
    corank,
    dim,
    eval_structural,
    normalize,
    parse_expr,
    realize,
    realize_dim3_mod2,
    realize_rank_set,
    to_text,
)

Q = RingSpec.rationals()
Z = RingSpec.integers()
F2 = RingSpec.prime_field(2)
F3 = RingSpec.prime_field(3)


class TestAst:
    def test_dims(self):
        assert [dim(a) for a in (Sphere(4), Surface(3), Torus(5), RP3(), Heisenberg(), KodairaThurston())] == [
            4, 2, 5, 3, 3, 4]
        assert dim(Product((Surface(1), Sphere(3)))) == 5

    def test_conn_sum_validation(self):
        with pytest.raises(ExprError, match="2 vs 1"):
            ConnSum((Surface(1), Sphere(1)))
        with pytest.raises(ExprError):
            ConnSum((Sphere(1), Sphere(1)))

    def test_normalize(self):
        assert normalize(Torus(3)) == Product((Sphere(1),) * 3)
        assert normalize(KodairaThurston()) == Product((Heisenberg(), Sphere(1)))
        assert normalize(Surface(0)) == Sphere(2)


class TestParser:
    def test_product(self):
        assert parse_expr("Sg(2) x S(1)") == Product((Surface(2), Sphere(1)))

    def test_precedence(self):
        e = parse_expr("T(2) x S(3) # T(3) x S(2)")
        assert e == ConnSum((Product((Torus(2), Sphere(3))), Product((Torus(3), Sphere(2)))))
        assert dim(e) == 5

    def test_whitespace_and_parens(self):
        assert parse_expr("(Sg(1)#Sg(2))x S(1)") == Product((ConnSum((Surface(1), Surface(2))), Sphere(1)))
        assert parse_expr("  RP3 # Heis ") == ConnSum((RP3(), Heisenberg()))

    def test_dimension_mismatch(self):
        with pytest.raises(ExprSyntaxError, match=r"conn-sum dimension mismatch \(2 vs 1\)"):
            parse_expr("Sg(1) # S(1)")

    @pytest.mark.parametrize("text,pos", [("S(1) x", 6), ("T(2) y", 5), ("Sg(", 3), ("(S(1)", 5), ("", 0)])
    def test_syntax_errors(self, text, pos):
        with pytest.raises(ExprSyntaxError) as exc:
            parse_expr(text)
        assert exc.value.pos == pos

    @pytest.mark.parametrize("text", ["Sg(2) x S(1) # Sg(2) x S(1)", "(Sg(1) # Sg(2)) x T(3)", "KT x RP3",
                                      "((S(2) # S(2)) # S(2)) x S(1)"])
    def test_round_trip(self, text):
        e = parse_expr(text)
        assert parse_expr(to_text(e)) == e


class TestAtoms:
    def test_surface(self):
        m = atom_model(Surface(2), Q)
        assert m.betti == (1, 4, 1)
        assert m.phi == SkewBilinearMap.symplectic(Q, 2)

    def test_rp3(self):
        m = atom_model(RP3(), F2)
        assert m.betti == (1, 1, 1, 1) and m.phi.gram == (((1,),),)
        m = atom_model(RP3(), Q)
        assert m.betti == (1, 0, 0, 1) and m.phi.dim_l == 0

    def test_heisenberg_only_char0(self):
        assert atom_model(Heisenberg(), Z).betti == (1, 2, 2, 1)
        with pytest.raises(RingError):
            atom_model(Heisenberg(), F3)
        with pytest.raises(RingError):
            eval_structural(KodairaThurston(), F2)


class TestBetti:
    def test_torus(self):
        assert betti(Torus(3), Q) == (1, 3, 3, 1)

    def test_conn_sum_mod2(self):
        assert betti(ConnSum((RP3(), Torus(3))), F2)[1] == 4

    def test_kodaira_thurston(self):
        assert betti(KodairaThurston(), Q)[1] == 3

    @pytest.mark.parametrize("R", [Q, F2, F3], ids=str)
    def test_b1_additive_matches_compiled(self, R):
        for e in corpus(R):
            assert betti(e, R)[1] == compile_expr(e, R).dim_l == eval_structural(e, R).b1


class TestStructural:
    def test_examples(self):
        assert eval_structural(parse_expr("Sg(2) x S(1)"), Z).rank_set == RankSet.of(1, 2)
        assert eval_structural(parse_expr("Sg(2) x Sg(3)"), Q).rank_set == RankSet.of(1, 2, 3)
        e = parse_expr("Sg(2) x S(1) # Sg(2) x S(1)")
        assert eval_structural(e, Z).rank_set == RankSet.of(2, 3, 4)

    def test_exception_tags(self):
        assert eval_structural(parse_expr("S(2) x S(1)"), Q).exceptions_applied == ("product:b1=0",)
        assert eval_structural(parse_expr("RP3 x S(1)"), F2).exceptions_applied == ("product:b1=1,char2,cup!=0",)
        assert eval_structural(parse_expr("(RP3 # RP3) x S(1)"), F2).exceptions_applied == ("product:h=0",)
        assert eval_structural(parse_expr("Sg(1) x S(1)"), Q).exceptions_applied == ()

    @pytest.mark.parametrize("R", [F2, F3], ids=str)
    def test_compiled_agrees(self, R):
        for e in corpus(R):
            assert rank_set(compile_expr(e, R)) == eval_structural(e, R).rank_set, to_text(e)

    def test_z_equals_q(self):
        for e in corpus(Q):
            assert eval_structural(e, Z) == eval_structural(e, Q)

    def test_sandwich_chain(self):
        for e in corpus(Q):
            r = eval_structural(e, Q)
            assert r.corank <= r.h <= r.b1

    def test_kernel_contained_in_witnesses(self):
        phi = compile_expr(parse_expr("Sg(1) x S(2) # T(2) x S(2)"), Q)
        assert kernel(phi).rank == 0


class TestCompile:
    def test_torus_is_genus_one(self):
        phi = compile_expr(Torus(2), Q)
        assert phi.gram == (((0, 1), (-1, 0)),)

    def test_surface_times_sphere(self):
        phi = compile_expr(parse_expr("Sg(1) x S(2)"), F3)
        assert phi.dim_l == 2 and rank_set(phi) == RankSet.of(1)

    def test_genus2_times_circle(self):
        phi = compile_expr(parse_expr("Sg(2) x S(1)"), F3)
        assert phi.dim_l == 5 and rank_set(phi) == RankSet.of(1, 2)


class TestRealize:
    def test_two_five(self):
        e = realize(2, 5)
        assert e == ConnSum((Product((Torus(3), Sphere(2))), Product((Torus(2), Sphere(3)))))
        r = eval_structural(e, Q)
        assert (r.h, r.b1) == (2, 5)

    def test_zero_zero(self):
        assert realize(0, 0) == Sphere(3)

    def test_three_three(self):
        e = realize(3, 3)
        assert e == ConnSum((Product((Torus(1), Sphere(2))),) * 3)
        assert dim(e) == 3

    def test_rp3_char2_only(self):
        assert realize(0, 1) == RP3()
        assert realize(0, 1, F2) == RP3()
        with pytest.raises(ExprError):
            realize(0, 1, Q)

    @pytest.mark.parametrize("hb", [(3, 2), (0, 2), (-1, 1)])
    def test_inadmissible(self, hb):
        with pytest.raises(ExprError):
            realize(*hb)

    def test_minimal_dimension(self):
        for b in range(1, 8):
            for h in range(1, b + 1):
                assert dim(realize(h, b)) == 2 + -(-b // h)

    def test_dim3_mod2(self):
        e = realize_dim3_mod2(2, 3)
        assert e == ConnSum((Product((Sphere(1), Sphere(2))),) * 2 + (RP3(),))
        assert eval_structural(realize_dim3_mod2(0, 2), F2).h == 0
        assert realize_dim3_mod2(1, 1) == Product((Sphere(1), Sphere(2)))
        assert realize_dim3_mod2(0, 0) == Sphere(3)
        with pytest.raises(ExprError):
            realize_dim3_mod2(3, 2)

    def test_rank_set_constructor(self):
        assert realize_rank_set([0]) == Sphere(3)
        assert realize_rank_set([4]) == Surface(4)
        e = realize_rank_set([2, 3, 5])
        assert eval_structural(e, Q).rank_set == RankSet.of(2, 3, 5)
        with pytest.raises(ValueError):
            realize_rank_set([0, 1])


class TestCorank:
    def test_atoms(self):
        assert corank(Heisenberg()) == 1
        assert corank(KodairaThurston()) == 1
        assert corank(Surface(3)) == 3
        assert corank(RP3()) == 0
        assert corank(Torus(4)) == 1

    def test_gaps(self):
        r = eval_structural(Heisenberg(), Q)
        assert (r.corank, r.h, r.b1) == (1, 2, 2)
        r = eval_structural(KodairaThurston(), Q)
        assert r.corank < r.h < r.b1


class TestBoundsCheck:
    @pytest.mark.parametrize("g", range(1, 5))
    def test_surface(self, g):
        rep = bounds_check(Surface(g), Q)
        assert (rep.lo, rep.hi, rep.h) == (g, g, g) and rep.passed

    @pytest.mark.parametrize("n", range(2, 6))
    def test_torus(self, n):
        rep = bounds_check(Torus(n), Q)
        assert rep.surjective and rep.hi == 1 == rep.h

    def test_rp3(self):
        rep = bounds_check(RP3(), F2)
        assert rep.exception and rep.h == 0 and rep.passed

    def test_corpus_char0(self):
        for e in corpus(Q):
            assert bounds_check(e, Q).passed, to_text(e)
