"""Command line front door: build families, emit certificates, re-check them.

Workflows are batch constructions and verifications; there is no interactive
mode.  All structured output is canonical JSON (sorted keys, ASCII, LF), so a
run with the same parameters and seed produces byte-identical files.

Exit status: 0 on success, 1 when a verification or re-check fails, 2 for
usage errors (bad flags, unreadable inputs, pairs outside the chain order).
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .certificates import DEFAULT_SEED, canonical_dumps, read_json, write_json
from .closed_families import (
    ClosedFamilySpec,
    build_closed_family,
    certify_combo_batch,
    certify_cross_batch,
    certify_extract_batch,
    pointwise_convergence_audit,
    random_combo,
)
from .dense_families import (
    DenseFamilySpec,
    build_dense_family,
    certify_density,
    certify_independence,
    certify_not_in_y_batch,
    certify_union_span,
)
from .dyadic import UndecidableComparison
from .indexsets import (
    BranchId,
    Explicit,
    IndexSet,
    MaterializationLimit,
    Progression,
    Ray,
    branch_set,
    partition_cell,
    sparsify,
)
from .recheck import mutation_candidates, apply_mutation, recheck
from .scalars import Scalar, parse_rational
from .spaces import ChainParams, chain, parse_space
from .witnesses import NotAChainPair, certify_witness

_DENSE_KINDS = ("independence", "not-in-y", "density", "union-span")
_CLOSED_KINDS = ("extract", "combo-not-in-y", "cross-independence")
_VERIFY_KINDS = _DENSE_KINDS + _CLOSED_KINDS + ("pointwise",)

_SUPPORT_HELP = (
    "index set shorthand: full | evens | odds | ray:N | step:S:N | "
    "set:n1,n2,... | branch:<prefix|period> | cell:J:<rest> | sparse:<rest> | "
    "raw JSON starting with '{'"
)


def parse_support(text: str) -> IndexSet:
    """Parse the --support shorthand (see _SUPPORT_HELP)."""
    t = text.strip()
    if t.startswith("{"):
        return IndexSet.from_json(json.loads(t))
    if t == "full":
        return Ray(0)
    if t == "evens":
        return Progression(0, 2)
    if t == "odds":
        return Progression(1, 2)
    if t.startswith("ray:"):
        return Ray(int(t[4:]))
    if t.startswith("step:"):
        _, step, start = t.split(":")
        return Progression(int(start), int(step))
    if t.startswith("set:"):
        return Explicit(tuple(sorted(int(x) for x in t[4:].split(","))))
    if t.startswith("branch:"):
        return branch_set(BranchId.parse(t[7:]))
    if t.startswith("cell:"):
        _, j, rest = t.split(":", 2)
        return partition_cell(parse_support(rest), int(j))
    if t.startswith("sparse:"):
        return sparsify(parse_support(t[7:]))
    raise ValueError(f"cannot parse index set {text!r}")


def _params(args) -> ChainParams:
    return ChainParams(parse_rational(args.a), parse_rational(args.b))


def _emit(obj, out_path: str | None) -> None:
    if out_path:
        write_json(out_path, obj)
    else:
        sys.stdout.write(canonical_dumps(obj) + "\n")


def _definition(space, params: ChainParams) -> str:
    kind = space.kind
    if kind == "c00":
        return "finitely supported sequences"
    if kind == "Ainf":
        return ("sequences with Sum (n+1)^k |x(n)| finite for every k "
                "(disc functions smooth up to the boundary)")
    if kind == "cap0":
        return "intersection of all l(q) with q > 0"
    if kind == "lp":
        return f"sequences with Sum |x(n)|^({space.p}) finite"
    if kind == "cap":
        return f"intersection of l(q) over q > {space.p}"
    if kind == "c0":
        return "sequences converging to 0"
    if kind == "linf":
        return "bounded sequences"
    if kind == "H":
        return "power series coefficients with radius of convergence >= 1"
    return "all complex sequences"


def _metric(space) -> str:
    kind = space.kind
    if kind == "lp":
        if space.p >= 1:
            return f"d(x,y) = (Sum |x(n)-y(n)|^p)^(1/p), p = {space.p}"
        return f"d(x,y) = Sum |x(n)-y(n)|^p, p = {space.p}"
    if kind in ("linf", "c0", "c00"):
        return "d(x,y) = sup |x(n)-y(n)|"
    if kind in ("cap", "cap0"):
        p = space.p if kind == "cap" else Fraction(0)
        return (f"d(x,y) = Sum_k 2^-k t_k/(1+t_k) with t_k the "
                f"l({p}+1/k) distance")
    if kind in ("Ainf", "full"):
        return "d(x,y) = Sum_n 2^-n |z(n)|/(1+|z(n)|), z = x-y"
    return "d(x,y) = Sum_k 2^-k min(1, Sum_n |z(n)| (k/(k+1))^n), z = x-y"


def cmd_chain_list(args) -> int:
    params = _params(args)
    rows = []
    for i, s in enumerate(chain(params)):
        rows.append({
            "order": i,
            "space": s.text(params),
            "id": s.to_json(),
            "definition": _definition(s, params),
            "metric": _metric(s),
        })
    _emit({"params": params.to_json(), "spaces": rows}, args.out)
    return 0


def cmd_witness(args) -> int:
    params = _params(args)
    small = parse_space(args.Y, params)
    large = parse_space(args.X, params)
    support = parse_support(args.support)
    cert = certify_witness(small, large, support, params, seed=args.seed)
    _emit(cert, args.out)
    return 0


def cmd_family_gen(args) -> int:
    params = _params(args)
    small = parse_space(args.Y, params)
    large = parse_space(args.X, params)
    branches = [BranchId.parse(t) for t in args.branches.split(",")]
    build = build_dense_family if args.mode == "dense" else build_closed_family
    fam = build(small, large, branches, args.depth, params)
    _emit(fam.to_json(), args.out)
    return 0


def _load_family(path: str):
    spec = read_json(path)
    mode = spec.get("mode")
    if mode == "dense":
        return DenseFamilySpec.from_json(spec)
    if mode == "closed":
        return ClosedFamilySpec.from_json(spec)
    raise ValueError(f"spec file has unknown mode {mode!r}")


def _pointwise_pairs(fam, trials: int, seed: int) -> list:
    """Sample metric-close pairs from a family for the pointwise audit."""
    rng = random.Random(seed)
    pairs = []
    if isinstance(fam, DenseFamilySpec):
        slots = [(c.branch, c.j) for c in fam.cells]
        for _ in range(trials):
            br, j = slots[rng.randrange(len(slots))]
            pairs.append((fam.generator(br, j), fam.x(j)))
    else:
        for i in range(trials):
            f = random_combo(fam, rng)
            x = f.sequence()
            w = fam.cell(f.branch, f.coefficients[0][0]).witness_seq()
            bump = Scalar(Fraction(1, 2 ** (8 + i % 8)), Fraction(0))
            pairs.append((x, x.add(w.scale(bump))))
    return pairs


def cmd_verify(args) -> int:
    params = _params(args)
    fam = _load_family(args.spec)
    kind = args.kind
    if kind in _DENSE_KINDS and not isinstance(fam, DenseFamilySpec):
        raise ValueError(f"{kind} verification needs a dense-mode spec")
    if kind in _CLOSED_KINDS and not isinstance(fam, ClosedFamilySpec):
        raise ValueError(f"{kind} verification needs a closed-mode spec")
    if fam.params != params and (args.a, args.b) != ("1", "2"):
        raise ValueError("--a/--b disagree with the spec file's parameters")

    if kind == "independence":
        cert = certify_independence(fam, args.trials, seed=args.seed)
    elif kind == "not-in-y":
        cert = certify_not_in_y_batch(fam, args.trials, seed=args.seed)
    elif kind == "density":
        cert = certify_density(fam)
    elif kind == "union-span":
        cert = certify_union_span(fam, args.trials, seed=args.seed)
    elif kind == "extract":
        cert = certify_extract_batch(fam, args.trials, seed=args.seed)
    elif kind == "combo-not-in-y":
        cert = certify_combo_batch(fam, args.trials, seed=args.seed)
    elif kind == "cross-independence":
        cert = certify_cross_batch(fam, args.trials, seed=args.seed)
    else:
        pairs = _pointwise_pairs(fam, args.trials, args.seed)
        cert = pointwise_convergence_audit(
            fam.large, pairs, fam.params, n_max=args.n_max, seed=args.seed,
            tol0=parse_rational(args.tol))
    _emit(cert, args.out)
    return 0


def cmd_recheck(args) -> int:
    results = []
    for path in args.certs:
        r = recheck(read_json(path))
        results.append({"path": path, "kind": r["kind"], "ok": r["ok"],
                        "errors": r["errors"]})
    ok = all(r["ok"] for r in results)
    _emit({"ok": ok, "checked": len(results), "results": results}, args.out)
    return 0 if ok else 1


def cmd_selftest(args) -> int:
    """Desk-scale sweep of every construction and verification path."""
    params = _params(args)
    checks: list[dict] = []

    def run(name, fn):
        try:
            fn()
            checks.append({"check": name, "ok": True})
        except Exception as exc:
            checks.append({"check": name, "ok": False, "error": str(exc)})

    def accept(name, cert):
        def body():
            r = recheck(cert)
            if not r["ok"]:
                raise RuntimeError("; ".join(r["errors"][:3]))
        run(name, body)

    def check_order():
        spaces = chain(params)
        if len(spaces) != 11:
            raise RuntimeError("chain must list eleven spaces")
        ChainParams(Fraction(1, 2), Fraction(3))
        try:
            ChainParams(Fraction(2), Fraction(1))
        except ValueError:
            return
        raise RuntimeError("a >= b must be rejected")
    run("chain order and parameter validation", check_order)

    wit_pairs = [("l(a)", "l(b)", Ray(0)), ("c00", "Ainf", Ray(5)),
                 ("cap(b)", "c0", Ray(0)), ("c0", "linf", Ray(0)),
                 ("H", "full", Ray(0))]
    for y, x, sup in wit_pairs:
        try:
            c = certify_witness(parse_space(y, params), parse_space(x, params),
                                sup, params, seed=args.seed)
            accept(f"witness {y} -> {x}", c)
        except Exception as exc:
            checks.append({"check": f"witness {y} -> {x}", "ok": False,
                           "error": str(exc)})

    branches = [BranchId.parse("|0"), BranchId.parse("|1")]
    try:
        dfam = build_dense_family(parse_space("l(a)", params),
                                  parse_space("l(b)", params),
                                  branches, 3, params)
        accept("dense independence",
               certify_independence(dfam, 3, seed=args.seed))
        accept("dense not-in-y", certify_not_in_y_batch(dfam, 2, seed=args.seed))
        accept("dense density", certify_density(dfam))
        accept("dense union-span", certify_union_span(dfam, 2, seed=args.seed))
        ind1 = certify_independence(dfam, 3, seed=args.seed)
        ind2 = certify_independence(dfam, 3, seed=args.seed)

        def determinism():
            if canonical_dumps(ind1) != canonical_dumps(ind2):
                raise RuntimeError("same seed produced different certificates")
        run("determinism (same seed, same bytes)", determinism)

        def mutations():
            for cand in mutation_candidates(ind1)[:12]:
                mut, label = apply_mutation(ind1, cand)
                if recheck(mut)["ok"]:
                    raise RuntimeError(f"mutation accepted: {label}")
        run("mutations rejected", mutations)
    except Exception as exc:
        checks.append({"check": "dense family build", "ok": False,
                       "error": str(exc)})

    try:
        cfam = build_closed_family(parse_space("c0", params),
                                   parse_space("linf", params),
                                   branches, 3, params)
        accept("closed extract", certify_extract_batch(cfam, 2, seed=args.seed))
        accept("closed combo-not-in-y",
               certify_combo_batch(cfam, 2, seed=args.seed))
        accept("closed cross-independence",
               certify_cross_batch(cfam, 2, seed=args.seed))
        pw = pointwise_convergence_audit(
            cfam.large, _pointwise_pairs(cfam, 2, args.seed), params,
            n_max=12, seed=args.seed)
        accept("pointwise audit", pw)
    except Exception as exc:
        checks.append({"check": "closed family build", "ok": False,
                       "error": str(exc)})

    failures = sum(1 for c in checks if not c["ok"])
    _emit({"ok": failures == 0, "checks": checks, "failures": failures},
          args.out)
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--a", default="1", metavar="P/Q",
                        help="chain parameter a as a rational (default 1)")
    shared.add_argument("--b", default="2", metavar="P/Q",
                        help="chain parameter b as a rational (default 2); needs 0 < a < b")
    shared.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="PRNG seed; identical runs are byte-identical")
    shared.add_argument("--tol", default="1/64", metavar="P/Q",
                        help="starting tolerance for metric refinements")
    shared.add_argument("--out", default=None, metavar="PATH",
                        help="write output JSON here (atomic); default stdout")

    top = argparse.ArgumentParser(
        prog="chaincert",
        description="Exact-arithmetic constructions over the eleven-space "
                    "sequence chain, with machine-checkable certificates.")
    sub = top.add_subparsers(dest="command", required=True)

    chain_p = sub.add_parser("chain", help="chain-level queries")
    chain_sub = chain_p.add_subparsers(dest="subcommand", required=True)
    lst = chain_sub.add_parser(
        "list", parents=[shared],
        help="print the eleven spaces in inclusion order with their metrics")
    lst.set_defaults(func=cmd_chain_list)

    wit = sub.add_parser(
        "witness", parents=[shared],
        help="build an element of X outside Y on a prescribed support",
        description="Builds one sequence supported in the given index set, "
                    "certified inside X and outside Y, and emits the "
                    "certificate (sequence JSON plus both membership "
                    "verdicts).")
    wit.add_argument("--Y", required=True, metavar="SPACE",
                     help="the smaller space (strictly below X in the chain)")
    wit.add_argument("--X", required=True, metavar="SPACE",
                     help="the larger space")
    wit.add_argument("--support", required=True, metavar="SET",
                     help=_SUPPORT_HELP)
    wit.set_defaults(func=cmd_witness)

    fam = sub.add_parser("family", help="family construction")
    fam_sub = fam.add_subparsers(dest="subcommand", required=True)
    gen = fam_sub.add_parser(
        "gen", parents=[shared],
        help="construct a branch-indexed family and write its spec",
        description="Builds one witness family per branch up to the given "
                    "depth and writes the self-contained family spec. Dense "
                    "mode spans a dense subspace of X, so X must be "
                    "separable: linf is rejected as the ambient space there "
                    "(use closed mode, or a separable X).")
    gen.add_argument("--mode", required=True, choices=("dense", "closed"))
    gen.add_argument("--Y", required=True, metavar="SPACE")
    gen.add_argument("--X", required=True, metavar="SPACE")
    gen.add_argument("--branches", required=True, metavar="ID,ID,...",
                     help="comma-separated branch ids, e.g. '|0,|1,0|1'")
    gen.add_argument("--depth", required=True, type=int,
                     help="slots per branch (j = 1..depth)")
    gen.set_defaults(func=cmd_family_gen)

    ver = sub.add_parser(
        "verify", parents=[shared],
        help="run one verification over a family spec, emit a certificate",
        description="Re-derives the claimed property on fresh random trials "
                    "and writes a cert-v1 document embedding the family and "
                    "every trace needed to re-check it offline.")
    ver.add_argument("kind", choices=_VERIFY_KINDS)
    ver.add_argument("--spec", required=True, metavar="PATH",
                     help="family spec from 'family gen'")
    ver.add_argument("--trials", type=int, default=20, metavar="T",
                     help="number of random trials (ignored by density)")
    ver.add_argument("--n-max", dest="n_max", type=int, default=50,
                     help="pointwise: largest coordinate index audited")
    ver.set_defaults(func=cmd_verify)

    rec = sub.add_parser(
        "recheck", parents=[shared],
        help="independently re-verify certificate files",
        description="Walks each certificate using only term evaluation and "
                    "index-set membership; never calls the construction-side "
                    "decision procedures. Exit 1 if any file fails.")
    rec.add_argument("certs", nargs="+", metavar="CERT")
    rec.set_defaults(func=cmd_recheck)

    st = sub.add_parser(
        "selftest", parents=[shared],
        help="desk-scale sweep of all constructions and re-checks")
    st.set_defaults(func=cmd_selftest)
    return top


def main(argv: list[str] | None = None) -> int:
    # deep supports serialize as huge ints; keep json round-trips safe
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(200000)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NotAChainPair, MaterializationLimit, ValueError, KeyError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AssertionError, RuntimeError, ArithmeticError,
            UndecidableComparison) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
