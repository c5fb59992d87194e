"""Command-line front end: ``isoindex eval|map|realize|selftest``.

Exit codes: 0 success, 2 usage, 3 input schema, 4 budget exceeded,
5 verification disagreement.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass

from .corpus import KNOWN_VALUES, corpus
from .exactalg import RingError, RingSpec
from .kernels import BudgetExceeded
from .manifolds import (
    ExprError,
    betti,
    bounds_check,
    compile_expr,
    eval_structural,
    parse_expr,
    realize,
    realize_dim3_mod2,
    realize_rank_set,
    to_text,
)
from .mapio import SchemaError, load
from .skewmap import (
    AntisymmetryError,
    RankSet,
    SkewBilinearMap,
    bounds,
    direct_sum,
    enumerate_maximal_isotropic,
    extend_scalars,
    image_rank,
    isotropy_index,
    kernel,
    product_map,
    rank_set,
    rank_set_product_law,
    rank_set_sum_law,
)

EXIT_OK, EXIT_USAGE, EXIT_SCHEMA, EXIT_BUDGET, EXIT_DISAGREE = 0, 2, 3, 4, 5


@dataclass(frozen=True)
class JobConfig:
    command: str
    ring: str | None
    brute_check: bool = False
    witnesses: bool = False
    json: bool = False
    budget: int = 10**7
    seed: int = 0
    restarts: int = 32

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.ring is not None:
            RingSpec.parse(self.ring)

    def ringspec(self, default: str = "Q") -> RingSpec:
        return RingSpec.parse(self.ring or default)


def _emit(cfg: JobConfig, doc: dict, lines: list[str]) -> None:
    if cfg.json:
        print(json.dumps(doc, sort_keys=True))
    else:
        print("\n".join(lines))


def _fmt_set(values) -> str:
    return "{" + ", ".join(str(v) for v in values) + "}"


def _subspace_rows(S) -> list[list[str]]:
    return [[str(x) for x in r] for r in S.vectors]


# -- eval ---------------------------------------------------------------------

def cmd_eval(cfg: JobConfig, text: str) -> int:
    R = cfg.ringspec()
    expr = parse_expr(text)
    res = eval_structural(expr, R)
    bc = bounds_check(expr, R)
    oracle = None
    verdict = None
    if cfg.brute_check:
        if not R.is_finite:
            raise RingError(f"--brute-check needs a finite field, got {R}")
        subs = enumerate_maximal_isotropic(compile_expr(expr, R), cfg.budget)
        got = RankSet(tuple(s.rank for s in subs))
        oracle = {"rank_set": list(got.values), "h": got.max, "count": len(subs)}
        if cfg.witnesses:
            oracle["witnesses"] = [_subspace_rows(next(s for s in subs if s.rank == r)) for r in got]
        verdict = "AGREE" if got == res.rank_set else "DISAGREE"
    doc = {
        "expr": to_text(expr),
        "ring": str(R),
        "b1": res.b1,
        "rank_set": list(res.rank_set.values),
        "h": res.h,
        "h_interval": [res.h, res.h],
        "corank": res.corank,
        "exceptions": list(res.exceptions_applied),
        "bounds": {"lo": bc.lo, "hi": bc.hi, "exception": bc.exception, "holds": bc.passed},
        "oracle": oracle,
        "verdict": verdict,
    }
    lines = [
        f"expr        {doc['expr']}",
        f"ring        {R}",
        f"b1          {res.b1}",
        f"rank set    {_fmt_set(res.rank_set)}",
        f"h           {res.h}",
        f"corank      {res.corank}",
        f"bounds      lo={bc.lo} hi={bc.hi}" + (" (upper only)" if bc.exception else "")
        + (" ok" if bc.passed else " VIOLATED"),
    ]
    if res.exceptions_applied:
        lines.append(f"exceptions  {', '.join(res.exceptions_applied)}")
    if oracle is not None:
        lines.append(f"oracle      {_fmt_set(oracle['rank_set'])} ({oracle['count']} maximal subspaces) {verdict}")
        for w in oracle.get("witnesses", []):
            lines.append("  witness   " + "; ".join("(" + ",".join(r) + ")" for r in w))
    _emit(cfg, doc, lines)
    return EXIT_DISAGREE if verdict == "DISAGREE" else EXIT_OK


# -- map ----------------------------------------------------------------------

def cmd_map(cfg: JobConfig, path: str) -> int:
    phi = load(path)
    if cfg.ring is not None:
        phi = extend_scalars(phi, cfg.ringspec())
    rep = isotropy_index(phi, seed=cfg.seed, restarts=cfg.restarts, budget=cfg.budget)
    k = kernel(phi).rank
    r = image_rank(phi)
    bd = bounds(phi.dim_l, phi.dim_v, k, char2=phi.ring.characteristic == 2,
                surjective=phi.dim_v > 0 and r == phi.dim_v)
    doc = {
        "ring": str(phi.ring),
        "dim_l": phi.dim_l,
        "dim_v": phi.dim_v,
        "image_rank": r,
        "kernel_rank": k,
        "rank_set": list(rep.rank_set.values) if rep.rank_set else None,
        "h": rep.h,
        "h_interval": [rep.h_lower, rep.h_upper],
        "method": rep.method,
        "bounds": {"lo": bd.lo, "hi": bd.hi, "exception": bd.exception},
    }
    if cfg.witnesses:
        doc["witnesses"] = [_subspace_rows(w) for w in rep.witnesses]
    h_txt = str(rep.h) if rep.exact else f"in [{rep.h_lower}, {rep.h_upper}]"
    lines = [
        f"ring        {phi.ring}",
        f"dims        L={phi.dim_l} V={phi.dim_v} (image rank {r}, kernel rank {k})",
        f"rank set    {_fmt_set(rep.rank_set) if rep.rank_set else 'unknown'}",
        f"h           {h_txt}  [{rep.method}]",
        f"bounds      lo={bd.lo} hi={bd.hi}" + (" (upper only)" if bd.exception else ""),
    ]
    if cfg.witnesses:
        lines += ["  witness   " + str(w) for w in rep.witnesses]
    _emit(cfg, doc, lines)
    return EXIT_OK


# -- realize --------------------------------------------------------------------

def cmd_realize(cfg: JobConfig, h: int, b: int, dim3_mod2: bool = False) -> int:
    if dim3_mod2:
        R = RingSpec.prime_field(2)
        expr = realize_dim3_mod2(h, b)
    else:
        R = cfg.ringspec()
        expr = realize(h, b, R)
    res = eval_structural(expr, R)
    ok = res.h == h and res.b1 == b
    text = to_text(expr)
    doc = {"expr": text, "ring": str(R), "h": res.h, "b1": res.b1, "rank_set": list(res.rank_set.values),
           "corank": res.corank, "dim": len(betti(expr, R)) - 1, "verified": ok}
    lines = [text, f"verified over {R}: h={res.h} b1={res.b1} " + ("ok" if ok else "MISMATCH")]
    _emit(cfg, doc, lines)
    return EXIT_OK if ok else EXIT_DISAGREE


# -- selftest -------------------------------------------------------------------

def _random_map(rng: random.Random, R: RingSpec, n: int, m: int) -> SkewBilinearMap:
    gram = []
    for _ in range(m):
        G = [[0] * n for _ in range(n)]
        for i in range(n):
            if R.characteristic == 2:
                G[i][i] = rng.randrange(R.order)
            for j in range(i + 1, n):
                a = rng.randrange(R.order)
                G[i][j], G[j][i] = a, R.neg(a)
        gram.append(G)
    return SkewBilinearMap.from_lists(R, gram, dim_l=n)


def _selftest_checks(cfg: JobConfig):
    """Yield ``(name, callable)`` pairs; each callable returns ``None`` or a failure message."""
    for fx in KNOWN_VALUES:
        def check(fx=fx):
            res = eval_structural(fx.parsed(), fx.ringspec)
            got = (res.rank_set.values if fx.rank_set else None, res.h, res.b1,
                   res.corank if fx.corank is not None else None)
            want = (fx.rank_set, fx.h, fx.b1, fx.corank)
            return None if got == want else f"got {got}, expected {want}"
        yield f"fixture {fx.name}", check

    rings = [cfg.ringspec()] if cfg.ring else [RingSpec.prime_field(2), RingSpec.prime_field(3)]
    for R in rings:
        if not R.is_finite:
            continue
        for e in corpus(R):
            def check(e=e, R=R):
                want = eval_structural(e, R).rank_set
                got = rank_set(compile_expr(e, R), cfg.budget)
                return None if got == want else f"oracle {got} vs structural {want}"
            yield f"oracle {R} {to_text(e)}", check

    def realizations():
        Q = RingSpec.rationals()
        for b in range(1, 7):
            for h in range(1, b + 1):
                res = eval_structural(realize(h, b), Q)
                if (res.h, res.b1, res.corank) != (h, b, h):
                    return f"realize({h},{b}) gave h={res.h} b1={res.b1} corank={res.corank}"
        F2 = RingSpec.prime_field(2)
        for b in range(1, 6):
            for h in range(0, b + 1):
                res = eval_structural(realize_dim3_mod2(h, b), F2)
                if (res.h, res.b1) != (h, b):
                    return f"realize_dim3_mod2({h},{b}) gave h={res.h} b1={res.b1}"
        return None
    yield "realization round trips", realizations

    def rank_sets():
        Q = RingSpec.rationals()
        for mask in range(1, 32):
            S = tuple(i + 1 for i in range(5) if mask >> i & 1)
            got = eval_structural(realize_rank_set(S), Q).rank_set.values
            if got != S:
                return f"{S} realized as {got}"
        return None
    yield "rank set realization", rank_sets

    rng = random.Random(cfg.seed)
    for R in rings:
        if not R.is_finite:
            continue
        for idx in range(20):
            n1, n2 = rng.randint(0, 3), rng.randint(0, 3)
            p1 = _random_map(rng, R, n1, rng.randint(0, 2))
            p2 = _random_map(rng, R, n2, rng.randint(0, 2))

            def sum_law(p1=p1, p2=p2):
                s1, s2 = rank_set(p1, cfg.budget), rank_set(p2, cfg.budget)
                got = rank_set(direct_sum(p1, p2), cfg.budget)
                want = rank_set_sum_law(s1, s2)
                return None if got == want else f"{got} vs {want}"
            yield f"sum law {R} #{idx}", sum_law

            def product_law(p1=p1, p2=p2):
                s1, s2 = rank_set(p1, cfg.budget), rank_set(p2, cfg.budget)
                got = rank_set(product_map(p1, p2), cfg.budget)
                want = rank_set_product_law(s1, s2)
                return None if got == want else f"{got} vs {want}"
            yield f"product law {R} #{idx}", product_law


def cmd_selftest(cfg: JobConfig) -> int:
    failed = budget_hits = total = 0
    for name, check in _selftest_checks(cfg):
        total += 1
        try:
            msg = check()
        except BudgetExceeded as exc:
            msg = f"budget exceeded ({exc})"
            budget_hits += 1
        if msg is None:
            if not cfg.json:
                print(f"PASS  {name}")
        else:
            failed += 1
            print(f"FAIL  {name}: {msg}")
    print(f"{total - failed}/{total} checks passed")
    if failed == 0:
        return EXIT_OK
    return EXIT_BUDGET if budget_hits == failed else EXIT_DISAGREE


# -- entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", default=None, help="Z, Q, GF(p) or GF(p,k)")
    common.add_argument("--json", action="store_true", help="emit sorted-key JSON")
    common.add_argument("--budget", type=int, default=int(os.environ.get("ISOINDEX_BUDGET", 10**7)),
                        help="enumeration budget (default: $ISOINDEX_BUDGET or 10^7)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=int, default=32)
    common.add_argument("--witnesses", action="store_true", help="print one witness per rank")

    ap = argparse.ArgumentParser(prog="isoindex", description="Isotropy indices of cup products.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("eval", parents=[common], help="evaluate a manifold expression")
    p.add_argument("expr")
    p.add_argument("--brute-check", action="store_true", help="cross-check by enumeration")
    p = sub.add_parser("map", parents=[common], help="analyse a map stored as JSON")
    p.add_argument("path")
    p = sub.add_parser("realize", parents=[common], help="build a manifold with given (h, b1)")
    p.add_argument("h", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--dim3-mod2", action="store_true", help="3-manifold realization over GF(2)")
    sub.add_parser("selftest", parents=[common], help="run the fixture corpus and law checks")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = JobConfig(args.command, args.ring, getattr(args, "brute_check", False), args.witnesses,
                        args.json, args.budget, args.seed, args.restarts)
    except (ValueError, RingError) as exc:
        ap.error(str(exc))
    try:
        if cfg.command == "eval":
            return cmd_eval(cfg, args.expr)
        if cfg.command == "map":
            return cmd_map(cfg, args.path)
        if cfg.command == "realize":
            return cmd_realize(cfg, args.h, args.b, args.dim3_mod2)
        return cmd_selftest(cfg)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (SchemaError, AntisymmetryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (ExprError, RingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
