"""Independent re-verification of emitted certificates.

The walker does not call the membership or distance decision procedures.
It reconstructs every derivable trace field from the embedded family
(separating indices, intersection cutoffs, exclusion lists), re-evaluates
the claimed value identities coordinate by coordinate through the symbolic
term evaluator, and replays membership evidence against bounds of its own:
termwise certified partial sums for convergence claims, grouped bit-length
floors for the log-reciprocal series, and exact rational recomputation for
cutoff and checkpoint schedules.  The trusted kernel is therefore the
dyadic interval arithmetic, the term evaluator and the index-set
combinatorics; everything a certificate asserts on top of those is checked
here a second time, by a different route where one exists.

`mutation_candidates` enumerates trace fields whose corruption this module
is guaranteed to reject, and `apply_mutation` produces the corrupted
document, so test suites can exercise the reject path systematically.
"""

from __future__ import annotations

import copy
from fractions import Fraction

from .certificates import CERT_KINDS, SCHEMA_CERT, canonical_dumps, content_hash
from .closed_families import ClosedFamilySpec
from .dense_families import DenseFamilySpec
from .dyadic import (
    dy_cmp,
    dy_cmp_frac,
    dy_from_fraction,
    frac_pow_enclosure,
    frac_pow_exact,
    interval_sum,
    parse_dy_text,
)
from .indexsets import BranchId, IndexSet, branch_intersection, branch_set, ray_cut
from .scalars import Scalar, format_rational, parse_rational
from .sequences import (
    SymbolicSequence,
    SymValue,
    Tail,
    tail_abs_p_partial,
    term_value,
)
from .spaces import EVIDENCE_TARGETS, ChainParams, SpaceId, chain_lt

__all__ = ["apply_mutation", "mutation_candidates", "recheck"]

# positions re-evaluated per restriction/extraction identity; the emitters
# check 1000, but every coordinate is an independent exact equality, so a
# smaller replay still rules out any single-coordinate fabrication
VALUE_SAMPLE = 48
SERIES_HEAD = 6
CHECKPOINT_TERMWISE_LIMIT = 4096
_PREC = 96


def recheck(cert) -> dict:
    """Re-verify a certificate document; report instead of raising.

    Returns {"ok": bool, "kind": str | None, "errors": [str, ...]}.  Any
    exception inside a walker counts as a failed recheck: a document that
    cannot even be walked certifies nothing.
    """
    errors: list[str] = []
    kind = cert.get("kind") if isinstance(cert, dict) else None
    try:
        if not isinstance(cert, dict):
            errors.append("certificate must be a JSON object")
        else:
            _check_envelope(cert, errors)
        if not errors:
            _WALKERS[kind](cert, errors)
    except Exception as exc:
        errors.append(f"walk failed: {exc!r}")
    return {"ok": not errors, "kind": kind, "errors": errors}


def _check_envelope(cert: dict, errors: list) -> None:
    if cert.get("schema") != SCHEMA_CERT:
        errors.append(f"schema is {cert.get('schema')!r}, expected {SCHEMA_CERT!r}")
        return
    if cert.get("kind") not in CERT_KINDS:
        errors.append(f"unknown certificate kind {cert.get('kind')!r}")
        return
    ChainParams.from_json(cert["params"])
    if not isinstance(cert.get("claim"), dict):
        errors.append("claim must be an object")
    if not isinstance(cert.get("notes"), list):
        errors.append("notes must be a list")
    if "family" in cert:
        if cert.get("family_sha256") != content_hash(cert["family"]):
            errors.append("family_sha256 does not match the embedded family")
        if cert["family"].get("params") != cert["params"]:
            errors.append("family parameters differ from certificate parameters")
    if "trials" in cert and not isinstance(cert["trials"], list):
        errors.append("trials must be a list")


def _err(errors: list, where: str, msg: str) -> None:
    errors.append(f"{where}: {msg}")


def _canon_eq(a, b) -> bool:
    return canonical_dumps(a) == canonical_dumps(b)


def _values_equal(u: SymValue, v: SymValue) -> bool:
    return u.add(v.neg()).is_zero()


def _unit(tail: Tail) -> Tail:
    return Tail(tail.term.with_coeff(Scalar.one()), tail.support,
                tail.min_position, tail.max_position, tail.filters)


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _pow_upper(x: Fraction, e: Fraction) -> Fraction:
    exact = frac_pow_exact(x, e)
    if exact is not None:
        return exact
    return frac_pow_enclosure(x, e, 128).upper_fraction()


# --- span-element walkers (dense families) ---


def _parse_dense_coeffs(rows, errors, where):
    coeffs = []
    for br_text, j, sc in rows:
        t = Scalar.from_json(sc)
        if t.is_zero():
            _err(errors, where, "stored coefficient is zero")
        coeffs.append((BranchId.parse(br_text), j, t))
    if not coeffs:
        _err(errors, where, "empty coefficient list")
    return coeffs


def _verify_span_trace(fam: DenseFamilySpec, run: dict, errors: list,
                       where: str, want_restriction: bool) -> None:
    coeffs = _parse_dense_coeffs(run["coeffs"], errors, where)
    if errors:
        return
    tr = run["trace"]
    k0 = BranchId.parse(tr["k0"])
    m = tr["M"]

    t_lead = next((t for br, j, t in coeffs if br == k0 and j == m), None)
    if t_lead is None:
        _err(errors, where, "leading slot is absent from the coefficients")
        return
    if not _canon_eq(tr["coefficient"], t_lead.to_json()):
        _err(errors, where, "stored leading coefficient differs from the element")

    max_m = max(j for _, j, _ in coeffs)
    n1 = 1 + max(fam.x(j).max_finite_position() for j in range(1, max_m + 1))
    if tr["N1"] != n1:
        _err(errors, where, f"N1 is {tr['N1']}, recomputed {n1}")
    used = []
    for br, _, _ in coeffs:
        if br not in used:
            used.append(br)
    n2 = 0
    for i in range(len(used)):
        for l in range(i + 1, len(used)):
            shared = branch_intersection(used[i], used[l])
            n2 = max(n2, 1 + shared.max_element())
    if tr["N2"] != n2:
        _err(errors, where, f"N2 is {tr['N2']}, recomputed {n2}")

    lead = fam.cell(k0, m)
    if tr["scale_log2"] != lead.scale_log2:
        _err(errors, where, "scale exponent differs from the family slot")
    bound = max(n1, n2)
    n0 = lead.cell.element(lead.cell.first_rank_at_or_above(bound))
    if tr["n0"] != n0:
        _err(errors, where, f"n0 is {tr['n0']}, recomputed {n0}")
        return

    expected_excl = []
    for br, j, _ in coeffs:
        if br == k0 and j == m:
            continue
        if fam.cell(br, j).cell.contains(n0):
            _err(errors, where, f"cell ({br.text()}, {j}) contains n0")
        expected_excl.append([br.text(), j])
    if tr["excluded_slots"] != expected_excl:
        _err(errors, where, "excluded slot list does not match the element")

    y_val = lead.witness_seq().value_at(n0)
    if not _canon_eq(tr["witness_value_n0"], y_val.to_json()):
        _err(errors, where, "witness value at n0 differs from re-evaluation")
    total = None
    for br, j, t in coeffs:
        part = fam.generator(br, j).value_at(n0).scale(t)
        total = part if total is None else total.add(part)
    if not _canon_eq(tr["value_n0"], total.to_json()):
        _err(errors, where, "element value at n0 differs from re-evaluation")
    claimed = y_val.scale(t_lead).scale(Scalar(lead.scale, Fraction(0)))
    if not _values_equal(total, claimed):
        _err(errors, where, "value at n0 is not the single surviving term")
    if total.is_zero():
        _err(errors, where, "value at the separating index vanishes")

    if not want_restriction:
        return
    n_cut = max(n1, n2)
    if tr["N"] != n_cut:
        _err(errors, where, f"N is {tr['N']}, recomputed {n_cut}")
    b_set = ray_cut(lead.cell, n_cut)
    if not _canon_eq(tr["B"], b_set.to_json()):
        _err(errors, where, "restriction set differs from ray_cut of the cell")
    if not (isinstance(tr["restriction_samples"], int) and tr["restriction_samples"] > 0):
        _err(errors, where, "restriction sample count must be a positive integer")
    if not isinstance(tr["restriction_symbolic_equal"], bool):
        _err(errors, where, "symbolic-equality flag must be boolean")
    factor = t_lead.mul_frac(lead.scale)
    wit = lead.witness_seq()
    for r in range(VALUE_SAMPLE):
        n = b_set.element(r)
        lhs = None
        for br, j, t in coeffs:
            part = fam.generator(br, j).value_at(n).scale(t)
            lhs = part if lhs is None else lhs.add(part)
        rhs = wit.value_at(n).scale(factor)
        if not _values_equal(lhs, rhs):
            _err(errors, where, f"restriction identity fails at coordinate {n}")
            return
    _verify_membership((lead.tail,), fam.small, tr["witness_out_of_Y"],
                       "Out", errors, f"{where} witness")


def _walk_independence(cert: dict, errors: list) -> None:
    fam = DenseFamilySpec.from_json(cert["family"])
    trials = cert["trials"]
    if cert["claim"].get("trials") != len(trials):
        _err(errors, "claim", "trial count differs from the trials list")
    for i, run in enumerate(trials):
        _verify_span_trace(fam, run, errors, f"trial {i}", want_restriction=False)


def _trial_count_ok(cert: dict, errors: list) -> bool:
    """At least one trial; the claimed count, when stated, matches."""
    trials = cert["trials"]
    if not trials:
        _err(errors, "trials", "certificate carries no trials")
        return False
    claimed = cert["claim"].get("trials")
    if claimed is not None and claimed != len(trials):
        _err(errors, "claim", "trial count differs from the trials list")
    return True


def _walk_not_in_y(cert: dict, errors: list) -> None:
    fam = DenseFamilySpec.from_json(cert["family"])
    if not _trial_count_ok(cert, errors):
        return
    for i, run in enumerate(cert["trials"]):
        _verify_span_trace(fam, run, errors, f"element {i}", want_restriction=True)


def _walk_union_span(cert: dict, errors: list) -> None:
    fam = DenseFamilySpec.from_json(cert["family"])
    trials = cert["trials"]
    if cert["claim"].get("trials") != len(trials):
        _err(errors, "claim", "trial count differs from the trials list")
    if not any("dimension" in note.lower() for note in cert["notes"]):
        _err(errors, "notes", "missing the dimension corollary note")
    for i, run in enumerate(trials):
        branches = {row[0] for row in run["coeffs"]}
        if len(branches) < 2:
            _err(errors, f"trial {i}", "cross-branch element uses a single branch")
        _verify_span_trace(fam, run, errors, f"trial {i}", want_restriction=True)


def _walk_density(cert: dict, errors: list) -> None:
    fam = DenseFamilySpec.from_json(cert["family"])
    rows = cert["trials"]
    if cert["claim"].get("checked") != len(rows):
        _err(errors, "claim", "checked count differs from the row count")
    if not rows:
        _err(errors, "trials", "no density rows")
        return
    upto = max(r["j"] for r in rows)
    expected = [(c.branch.text(), c.j) for c in fam.cells if c.j <= upto]
    stored = [(r["branch"], r["j"]) for r in rows]
    if stored != expected:
        _err(errors, "trials", "row slots do not enumerate the family cells")
    for i, row in enumerate(rows):
        thr = Fraction(1, row["j"])
        for label in ("direct", "translated"):
            lo = parse_dy_text(row[label][0])
            hi = parse_dy_text(row[label][1])
            if dy_cmp_frac(lo, Fraction(0)) < 0:
                _err(errors, f"row {i}", f"{label} lower endpoint is negative")
            if dy_cmp(lo, hi) > 0:
                _err(errors, f"row {i}", f"{label} interval is empty")
            if dy_cmp_frac(hi, thr) >= 0:
                _err(errors, f"row {i}", f"{label} bound does not clear 1/j")
        d_lo, d_hi = (parse_dy_text(s) for s in row["direct"])
        t_lo, t_hi = (parse_dy_text(s) for s in row["translated"])
        if dy_cmp(d_lo, t_hi) > 0 or dy_cmp(t_lo, d_hi) > 0:
            _err(errors, f"row {i}", "direct and translated intervals are disjoint")


# --- combo walkers (closed families) ---


def _parse_combo_coeffs(rows, errors, where):
    coeffs = []
    for j, sc in rows:
        c = Scalar.from_json(sc)
        if c.is_zero():
            _err(errors, where, "stored coefficient is zero")
        coeffs.append((j, c))
    if not coeffs:
        _err(errors, where, "empty coefficient list")
    return coeffs


def _combo_value_at(fam: ClosedFamilySpec, branch: BranchId, coeffs, n: int):
    total = None
    for j, c in coeffs:
        part = fam.cell(branch, j).witness_seq().value_at(n).scale(c)
        total = part if total is None else total.add(part)
    return total


def _verify_extract_trace(fam: ClosedFamilySpec, trial: dict, errors: list,
                          where: str) -> None:
    branch = BranchId.parse(trial["branch"])
    coeffs = _parse_combo_coeffs(trial["coeffs"], errors, where)
    if errors:
        return
    tr = trial["trace"]
    j0 = tr["j0"]
    c0 = next((c for j, c in coeffs if j == j0), None)
    if c0 is None:
        _err(errors, where, f"no coefficient at the extracted index {j0}")
        return
    if not _canon_eq(tr["coefficient"], c0.to_json()):
        _err(errors, where, "stored coefficient differs from the combination")
    cell = fam.cell(branch, j0)
    if not _canon_eq(tr["cell"], cell.cell.to_json()):
        _err(errors, where, "stored cell differs from the family slot")
    if not (isinstance(tr["samples"], int) and tr["samples"] > 0):
        _err(errors, where, "sample count must be a positive integer")
    if not isinstance(tr["symbolic_equal"], bool):
        _err(errors, where, "symbolic-equality flag must be boolean")
    wit = cell.witness_seq()
    for r in range(VALUE_SAMPLE):
        n = cell.cell.element(r)
        lhs = _combo_value_at(fam, branch, coeffs, n)
        rhs = wit.value_at(n).scale(c0)
        if not _values_equal(lhs, rhs):
            _err(errors, where, f"extraction identity fails at coordinate {n}")
            return


def _walk_extract(cert: dict, errors: list) -> None:
    fam = ClosedFamilySpec.from_json(cert["family"])
    if not _trial_count_ok(cert, errors):
        return
    for i, trial in enumerate(cert["trials"]):
        _verify_extract_trace(fam, trial, errors, f"combination {i}")


def _walk_combo_not_in_y(cert: dict, errors: list) -> None:
    fam = ClosedFamilySpec.from_json(cert["family"])
    if not _trial_count_ok(cert, errors):
        return
    for i, trial in enumerate(cert["trials"]):
        where = f"combination {i}"
        mark = len(errors)
        _verify_extract_trace(fam, trial, errors, where)
        if len(errors) > mark:
            continue
        tr = trial["trace"]
        if not isinstance(tr.get("conclusion"), str):
            _err(errors, where, "missing conclusion")
        branch = BranchId.parse(trial["branch"])
        tail = fam.cell(branch, tr["j0"]).tail
        _verify_membership((tail,), fam.small, tr["witness_out_of_Y"],
                           "Out", errors, f"{where} witness")


def _walk_cross_independence(cert: dict, errors: list) -> None:
    fam = ClosedFamilySpec.from_json(cert["family"])
    if not _trial_count_ok(cert, errors):
        return
    for i, trial in enumerate(cert["trials"]):
        _verify_cross_trial(fam, trial, errors, f"tuple {i}")


def _verify_cross_trial(fam: ClosedFamilySpec, trial: dict, errors: list,
                        where: str) -> None:
    tr = trial["trace"]
    combos = []
    mark = len(errors)
    for row in trial["combos"]:
        br = BranchId.parse(row["branch"])
        coeffs = _parse_combo_coeffs(row["coeffs"], errors,
                                     f"{where} branch {row['branch']}")
        combos.append((br, coeffs))
    if len(errors) > mark:
        return
    k0 = BranchId.parse(tr["k0"])
    designated = next((cs for br, cs in combos if br == k0), None)
    if designated is None:
        _err(errors, where, "designated branch is absent from the tuple")
        return

    n_cut = 0
    for i in range(len(combos)):
        for l in range(i + 1, len(combos)):
            shared = branch_intersection(combos[i][0], combos[l][0])
            n_cut = max(n_cut, 1 + shared.max_element())
    if tr["N"] != n_cut:
        _err(errors, where, f"N is {tr['N']}, recomputed {n_cut}")

    lead = fam.cell(k0, designated[0][0])
    others = [br for br, _ in combos if br != k0]
    rank = lead.cell.first_rank_at_or_above(n_cut)
    n0 = None
    for r in range(rank, rank + 64):
        cand = lead.cell.element(r)
        if all(not branch_set(br).contains(cand) for br in others):
            n0 = cand
            break
    if tr["n0"] != n0:
        _err(errors, where, f"n0 is {tr['n0']}, recomputed {n0}")
        return
    if tr["excluded_branches"] != [br.text() for br in others]:
        _err(errors, where, "excluded branch list does not match the tuple")

    component = _combo_value_at(fam, k0, designated, n0)
    for br, coeffs in combos:
        if br == k0:
            continue
        val = _combo_value_at(fam, br, coeffs, n0)
        if not val.is_zero():
            _err(errors, where, f"branch {br.text()} is supported at n0")
    if not _canon_eq(tr["value_n0"], component.to_json()):
        _err(errors, where, "value at n0 differs from re-evaluation")
    if component.is_zero():
        _err(errors, where, "designated component vanishes at n0")


# --- pointwise convergence walker ---


def _modulus(space: SpaceId, n: int, dist: Fraction) -> Fraction | None:
    """Coordinate bound at index n when the metric distance is <= dist.

    Restates the per-space formulas; None means the supplied distance is
    too coarse for the formula to say anything at this index.
    """
    if dist < 0:
        raise ValueError("distances are nonnegative")
    kind = space.kind
    if kind in ("linf", "c0", "c00"):
        return dist
    if kind == "lp":
        if space.p >= 1:
            return dist
        return _pow_upper(dist, 1 / space.p)
    if kind in ("cap", "cap0"):
        if 2 * dist >= 1:
            return None
        return 2 * dist / (1 - 2 * dist)
    if kind in ("Ainf", "full"):
        w = (1 << n) * dist
        if w >= 1:
            return None
        return w / (1 - w)
    if kind == "H":
        best = None
        k = 1
        while True:
            scale = (1 << k) * dist
            if scale >= 1:
                break
            cand = scale * Fraction(k + 1, k) ** n
            if best is None or cand < best:
                best = cand
            k += 1
        return best
    raise ValueError(kind)


def _walk_pointwise(cert: dict, errors: list) -> None:
    space = SpaceId.from_json(cert["claim"]["space"])
    rows = cert["trials"]
    if cert["claim"].get("pairs") != len(rows):
        _err(errors, "claim", "pair count differs from the row count")
    substantive = sum(1 for r in rows if "distance_upper" in r)
    if cert["claim"].get("checked") != substantive:
        _err(errors, "claim", "checked count differs from the substantive rows")
    for i, row in enumerate(rows):
        where = f"row {i}"
        x = SymbolicSequence.from_json(row["x"])
        y = SymbolicSequence.from_json(row["y"])
        n_max = row["n_max"]
        if "distance_upper" not in row:
            text = row.get("modulus")
            d_lo = parse_rational(row["distance_lower"])
            if text == "unbounded at this distance":
                if _modulus(space, n_max, d_lo) is not None:
                    _err(errors, where, "modulus formula applies at the stored lower bound")
            elif text != "undecided at the formula boundary":
                _err(errors, where, f"unknown vacuous-row marker {text!r}")
            continue
        d = parse_rational(row["distance_upper"])
        worst_n = row["tightest_n"]
        if not 0 <= worst_n <= n_max:
            _err(errors, where, "tightest index outside the checked range")
            continue
        mod_at_worst = _modulus(space, worst_n, d)
        if mod_at_worst is None:
            _err(errors, where, "modulus formula fails at the stored distance")
            continue
        if parse_rational(row["tightest_modulus_sq"]) != mod_at_worst * mod_at_worst:
            _err(errors, where, "stored modulus square differs from the formula")
        if parse_rational(row["tightest_gap_sq_upper"]) > parse_rational(row["tightest_modulus_sq"]):
            _err(errors, where, "stored gap exceeds the stored modulus")
        for n in range(n_max + 1):
            mod = _modulus(space, n, d)
            if mod is None:
                _err(errors, where, f"modulus formula fails at coordinate {n}")
                break
            gap = x.value_at(n).add(y.value_at(n).neg())
            prec = 64
            verdict = None
            while prec <= 4096:
                verdict = gap.abs_sq_enclosure(prec).cmp_frac(mod * mod)
                if verdict is not None:
                    break
                prec *= 2
            if verdict is None:
                _err(errors, where, f"gap enclosure undecidable at coordinate {n}")
                break
            if verdict > 0:
                _err(errors, where, f"modulus violated at coordinate {n}")
                break


# --- witness walker ---


def _walk_witness(cert: dict, errors: list) -> None:
    params = ChainParams.from_json(cert["params"])
    trials = cert["trials"]
    if len(trials) != 1:
        _err(errors, "trials", "a witness certificate carries exactly one tail")
        return
    trial = trials[0]
    small = SpaceId.from_json(trial["Y"])
    large = SpaceId.from_json(trial["X"])
    if not chain_lt(small, large, params):
        _err(errors, "pair", "Y is not strictly below X in the chain")
        return
    if cert["claim"].get("pair") != [small.text(params), large.text(params)]:
        _err(errors, "claim", "pair label differs from the trial spaces")
    requested = IndexSet.from_json(trial["support"])
    tail = Tail.from_json(trial["witness"])
    samples = list(tail.positions(16))
    if trial["support_samples"] != samples:
        _err(errors, "support", "stored samples differ from the tail's positions")
    for n in samples:
        if not requested.contains(n):
            _err(errors, "support", f"position {n} escapes the requested set")
    _verify_membership((tail,), large, trial["in_X"], "In", errors, "in-X")
    _verify_membership((tail,), small, trial["out_Y"], "Out", errors, "out-Y")


# --- membership evidence replay ---


def _verify_membership(tails, space: SpaceId, evidence: dict, want: str,
                       errors: list, where: str) -> None:
    if not isinstance(evidence, dict):
        _err(errors, where, "evidence must be an object")
        return
    if evidence.get("space") != space.to_json():
        _err(errors, where, "evidence space differs from the claimed space")
    reports = evidence.get("tails")
    if not isinstance(reports, list) or len(reports) != len(tails):
        _err(errors, where, "evidence does not cover the sequence's tails")
        return
    statuses = []
    for i, (t, rep) in enumerate(zip(tails, reports)):
        statuses.append(_verify_tail_report(t, space, rep, errors, f"{where} tail {i}"))
    n_out = statuses.count("Out")
    n_bad = len(statuses) - statuses.count("In")
    if want == "In":
        if n_bad:
            _err(errors, where, "an In verdict needs every tail In")
        return
    if n_out < 1:
        _err(errors, where, "an Out verdict needs at least one tail Out")
        return
    agg = evidence.get("aggregation")
    if n_bad == 1:
        if agg != "single-offender":
            _err(errors, where, "expected single-offender aggregation")
        return
    if agg != "solid-restriction":
        _err(errors, where, "expected solid-restriction aggregation")
        return
    effs = [ray_cut(t.support, t.min_position) for t in tails]
    for i in range(len(effs)):
        for l in range(i + 1, len(effs)):
            if not effs[i].known_disjoint(effs[l]):
                _err(errors, where, "tail supports are not certifiably disjoint")
                return


_DECAY_KINDS = ("geom-decay", "power-rank", "recip-position", "log-recip-rank")
_GROWTH_KINDS = ("constant", "linear-rank", "geom-growth")


def _verify_tail_report(tail: Tail, space: SpaceId, rep: dict, errors: list,
                        where: str) -> str:
    verdict = rep.get("verdict")
    if verdict not in ("In", "Out", "Undecidable"):
        _err(errors, where, f"unknown verdict {verdict!r}")
        return "Undecidable"
    if rep.get("term") != tail.term.kind:
        _err(errors, where, "report term differs from the tail")
    if rep.get("space") != space.text():
        _err(errors, where, "report space label differs")
    if rep.get("filtered"):
        if not tail.filters:
            _err(errors, where, "filtered flag on an unfiltered tail")
        if verdict != "In":
            _err(errors, where, "filtered reports only support In")
        inner = {k: v for k, v in rep.items() if k != "filtered"}
        plain = Tail(tail.term, tail.support, tail.min_position, tail.max_position, ())
        _verify_tail_report(plain, space, inner, errors, where)
        return verdict

    rule = rep.get("rule")
    kind = space.kind
    ok = True
    if rule == "finite-window":
        ok = verdict == "In" and tail.max_position is not None
    elif rule == "filtered-tail":
        ok = verdict == "Undecidable" and bool(tail.filters)
    elif rule == "always":
        ok = verdict == "In" and kind == "full"
    elif rule == "infinite-support":
        ok = (verdict == "Out" and kind == "c00"
              and rep.get("sample_positions") == list(tail.positions(3)))
    elif kind == "lp":
        _verify_lp_rule(tail, space.p, rep, verdict, errors, where)
    elif kind in ("cap", "cap0"):
        _verify_cap_rule(tail, space.p if kind == "cap" else Fraction(0),
                         rep, verdict, errors, where)
    elif kind == "c0":
        _verify_c0_rule(tail, rep, verdict, errors, where)
    elif kind == "linf":
        _verify_linf_rule(tail, rep, verdict, errors, where)
    elif kind == "H":
        _verify_h_rule(tail, rep, verdict, errors, where)
    elif kind == "Ainf":
        _verify_ainf_rule(tail, rep, verdict, errors, where)
    else:
        ok = False
    if not ok:
        _err(errors, where, f"rule {rule!r} does not support the verdict")
    return verdict


def _verify_lp_rule(tail: Tail, p: Fraction, rep: dict, verdict: str,
                    errors: list, where: str) -> None:
    rule = rep.get("rule")
    kind = tail.term.kind
    if rule == "geometric-series":
        if verdict != "In" or kind != "geom-decay":
            _err(errors, where, "geometric-series needs an In geometric tail")
            return
        _check_series_bound(tail, p, rep, errors, where)
    elif rule == "critical-exponent":
        if kind != "power-rank":
            _err(errors, where, "critical-exponent needs a power-rank tail")
            return
        s = parse_rational(rep["s"])
        if s != tail.term.alpha * p:
            _err(errors, where, "stored exponent differs from alpha * p")
        if verdict == "In":
            if s <= 1:
                _err(errors, where, "convergence claimed at exponent <= 1")
            _check_series_bound(tail, p, rep, errors, where)
        elif verdict == "Out":
            if s > 1:
                _err(errors, where, "divergence claimed at exponent > 1")
            _check_divergence(tail, p, rep, errors, where)
        else:
            _err(errors, where, "critical-exponent cannot be undecidable")
    elif rule == "exp-support-reciprocal":
        if (verdict != "In" or kind != "recip-position"
                or tail.support.growth_kind() != "exp"):
            _err(errors, where, "exp-support-reciprocal preconditions fail")
            return
        _check_series_bound(tail, p, rep, errors, where)
    elif rule == "linear-support-reciprocal":
        if kind != "recip-position" or tail.support.linear_form() is None:
            _err(errors, where, "linear-support-reciprocal needs linear positions")
            return
        if verdict == "In":
            if p <= 1:
                _err(errors, where, "convergence claimed at p <= 1")
            _check_series_bound(tail, p, rep, errors, where)
        elif verdict == "Out":
            if p > 1:
                _err(errors, where, "divergence claimed at p > 1")
            _check_divergence(tail, p, rep, errors, where)
        else:
            _err(errors, where, "linear-support-reciprocal cannot be undecidable")
    elif rule == "reciprocal-growth-unknown":
        if (verdict != "Undecidable" or kind != "recip-position"
                or tail.support.linear_form() is not None
                or tail.support.growth_kind() == "exp"):
            _err(errors, where, "reciprocal-growth-unknown preconditions fail")
    elif rule == "log-decay-divergence":
        if verdict != "Out" or kind != "log-recip-rank":
            _err(errors, where, "log-decay-divergence needs an Out log tail")
            return
        _check_divergence(tail, p, rep, errors, where)
    elif rule == "non-null-terms":
        if verdict != "Out" or kind not in _GROWTH_KINDS:
            _err(errors, where, "non-null-terms needs a non-decaying tail")
            return
        _check_divergence(tail, p, rep, errors, where)
    else:
        _err(errors, where, f"unknown lp rule {rule!r}")


def _verify_cap_rule(tail: Tail, p0: Fraction, rep: dict, verdict: str,
                     errors: list, where: str) -> None:
    rule = rep.get("rule")
    kind = tail.term.kind
    if verdict == "In":
        if parse_rational(rep["all_q_above"]) != p0:
            _err(errors, where, "stored cap threshold differs from the space")
        q = parse_rational(rep["sample_q"])
        if q != p0 + 1:
            _err(errors, where, "sample exponent is not threshold + 1")
        if rule == "geometric-series":
            ok = kind == "geom-decay"
        elif rule == "critical-exponent":
            ok = kind == "power-rank" and tail.term.alpha * p0 >= 1
        elif rule == "exp-support-reciprocal":
            ok = kind == "recip-position" and tail.support.growth_kind() == "exp"
        elif rule == "linear-support-reciprocal":
            ok = (kind == "recip-position" and p0 >= 1
                  and tail.support.linear_form() is not None)
        else:
            ok = False
        if not ok:
            _err(errors, where, f"cap rule {rule!r} preconditions fail")
            return
        inner = dict(rep["sample"])
        inner.setdefault("rule", rule)
        _verify_lp_rule(tail, q, inner, "In", errors, f"{where} sample")
    elif verdict == "Out":
        q = parse_rational(rep["witness_q"])
        if q <= p0:
            _err(errors, where, "witness exponent does not exceed the threshold")
        if rule == "critical-exponent":
            ok = kind == "power-rank" and tail.term.alpha * p0 < 1
            expect_q = (p0 + 1 / tail.term.alpha) / 2 if kind == "power-rank" else None
        elif rule == "linear-support-reciprocal":
            ok = (kind == "recip-position" and p0 < 1
                  and tail.support.linear_form() is not None)
            expect_q = (p0 + 1) / 2
        elif rule == "every-exponent-fails":
            ok = kind in ("log-recip-rank",) + _GROWTH_KINDS
            expect_q = p0 + 1
        else:
            ok = False
            expect_q = None
        if not ok:
            _err(errors, where, f"cap rule {rule!r} preconditions fail")
            return
        if expect_q is not None and q != expect_q:
            _err(errors, where, "witness exponent differs from the recipe")
        inner = dict(rep["witness"])
        if rule == "every-exponent-fails":
            inner_rule = inner.get("rule")
        else:
            inner.setdefault("rule", rule)
            inner_rule = rule
        if inner_rule is None:
            _err(errors, where, "witness report lacks a rule")
            return
        _verify_lp_rule(tail, q, inner, "Out", errors, f"{where} witness")
    elif rule == "reciprocal-growth-unknown":
        if (kind != "recip-position" or tail.support.linear_form() is not None
                or tail.support.growth_kind() == "exp"):
            _err(errors, where, "reciprocal-growth-unknown preconditions fail")
    else:
        _err(errors, where, "cap reports cannot be undecidable here")


def _verify_c0_rule(tail: Tail, rep: dict, verdict: str, errors: list,
                    where: str) -> None:
    rule = rep.get("rule")
    kind = tail.term.kind
    if rule == "value-decay":
        if verdict != "In" or kind not in _DECAY_KINDS:
            _err(errors, where, "value-decay needs an In decaying tail")
            return
        if rep.get("cutoffs") != _expected_decay_cutoffs(tail):
            _err(errors, where, "decay cutoffs differ from recomputation")
    elif rule == "uniform-floor":
        if verdict != "Out" or kind != "constant":
            _err(errors, where, "uniform-floor needs an Out constant tail")
            return
        if parse_rational(rep["floor_abs_sq"]) != tail.term.coeff.abs_sq():
            _err(errors, where, "stored floor differs from the coefficient")
        if rep.get("sample_position") != next(iter(tail.positions(1))):
            _err(errors, where, "stored sample position differs")
    elif rule == "unbounded":
        _check_unbounded(tail, rep, verdict, errors, where)
    else:
        _err(errors, where, f"unknown c0 rule {rule!r}")


def _verify_linf_rule(tail: Tail, rep: dict, verdict: str, errors: list,
                      where: str) -> None:
    rule = rep.get("rule")
    kind = tail.term.kind
    if rule == "bounded":
        if verdict != "In" or kind not in _DECAY_KINDS + ("constant",):
            _err(errors, where, "bounded needs an In non-growing tail")
            return
        if parse_rational(rep["bound_abs_sq"]) != tail.term.coeff.abs_sq():
            _err(errors, where, "stored bound differs from the coefficient")
    elif rule == "unbounded":
        _check_unbounded(tail, rep, verdict, errors, where)
    else:
        _err(errors, where, f"unknown sup-norm rule {rule!r}")


def _check_unbounded(tail: Tail, rep: dict, verdict: str, errors: list,
                     where: str) -> None:
    if verdict != "Out" or tail.term.kind not in ("linear-rank", "geom-growth"):
        _err(errors, where, "unbounded needs an Out growing tail")
        return
    if rep.get("normalized") is not True:
        _err(errors, where, "unbounded evidence must be unit-normalized")
    if parse_rational(rep["coeff_abs_sq"]) != tail.term.coeff.abs_sq():
        _err(errors, where, "stored coefficient square differs")
    if rep.get("checkpoints") != _expected_unbounded_checkpoints(tail):
        _err(errors, where, "growth checkpoints differ from recomputation")


def _verify_h_rule(tail: Tail, rep: dict, verdict: str, errors: list,
                   where: str) -> None:
    rule = rep.get("rule")
    kind = tail.term.kind
    if rule == "bounded-coefficients":
        if verdict != "In" or kind not in _DECAY_KINDS + ("constant",):
            _err(errors, where, "bounded-coefficients needs an In non-growing tail")
            return
        if parse_rational(rep["bound_abs_sq"]) != tail.term.coeff.abs_sq():
            _err(errors, where, "stored bound differs from the coefficient")
    elif rule == "poly-coefficients":
        if verdict != "In" or kind != "linear-rank" or rep.get("degree") != 1:
            _err(errors, where, "poly-coefficients needs a degree-1 In tail")
            return
        if parse_rational(rep["scale_abs_sq"]) != tail.term.coeff.abs_sq():
            _err(errors, where, "stored scale differs from the coefficient")
    elif rule == "root-limsup-exceeds":
        if verdict != "Out" or kind != "geom-growth" or tail.term.ratio <= 1:
            _err(errors, where, "root-limsup-exceeds needs growing geometry")
            return
        expected = _expected_root_limsup(tail)
        got = {k: rep.get(k) for k in ("r", "n_star", "sample_position")}
        if got != expected:
            _err(errors, where, "limsup threshold differs from recomputation")
    else:
        _err(errors, where, f"unknown disc-space rule {rule!r}")


def _verify_ainf_rule(tail: Tail, rep: dict, verdict: str, errors: list,
                      where: str) -> None:
    rule = rep.get("rule")
    kind = tail.term.kind
    if rule == "geometric-weighted-bound":
        if verdict != "In" or kind != "geom-decay":
            _err(errors, where, "geometric-weighted-bound needs an In geometric tail")
            return
        samples = rep.get("samples")
        if not isinstance(samples, list) or [s.get("k") for s in samples] != [0, 1]:
            _err(errors, where, "weighted samples must cover k = 0, 1")
            return
        for s in samples:
            bound = parse_dy_text(s["sum_upper"])
            partial = _weighted_partial(tail, s["k"], SERIES_HEAD)
            if dy_cmp(partial.lo, bound) > 0:
                _err(errors, where, f"k={s['k']} partial sum exceeds the stored bound")
    elif rule == "poly-weight-divergence":
        if verdict != "Out":
            _err(errors, where, "poly-weight-divergence is an Out rule")
            return
        if kind == "power-rank":
            if tail.support.growth_kind() == "exp":
                k = 1
            else:
                k = max(1, _ceil_frac(tail.term.alpha) - 1)
        elif kind == "recip-position":
            k = 1
        elif kind in ("log-recip-rank",) + _GROWTH_KINDS:
            k = 0
        else:
            _err(errors, where, f"no weight recipe for {kind}")
            return
        if rep.get("k") != k:
            _err(errors, where, "stored weight differs from the recipe")
        _check_divergence(tail, Fraction(1), rep, errors, where, weight_k=k)
    else:
        _err(errors, where, f"unknown product-space rule {rule!r}")


# --- series evidence: certified partial sums and upper cross-checks ---


def _check_series_bound(tail: Tail, p: Fraction, rep: dict, errors: list,
                        where: str) -> None:
    if parse_rational(rep["p"]) != p:
        _err(errors, where, "stored exponent differs from the space")
    bound = parse_dy_text(rep["sum_upper"])
    partial = tail_abs_p_partial(tail, p, tail.first_rank(), SERIES_HEAD, _PREC)
    if dy_cmp(partial.lo, bound) > 0:
        _err(errors, where, "head partial sum already exceeds the stored bound")


def _check_divergence(tail: Tail, p: Fraction, rep: dict, errors: list,
                      where: str, weight_k: int | None = None) -> None:
    if rep.get("normalized") is not True:
        _err(errors, where, "divergence evidence must be unit-normalized")
    if parse_rational(rep["coeff_abs_sq"]) != tail.term.coeff.abs_sq():
        _err(errors, where, "stored coefficient square differs")
    if weight_k is None and parse_rational(rep["p"]) != p:
        _err(errors, where, "stored exponent differs from the space")
    checkpoints = rep.get("checkpoints")
    if not isinstance(checkpoints, list) or not checkpoints:
        _err(errors, where, "divergence evidence needs checkpoints")
        return
    for cp in checkpoints:
        target = parse_rational(cp["target"])
        lower = parse_rational(cp["partial_lower"])
        count = cp["count"]
        if lower < target:
            _err(errors, where, f"checkpoint lower bound misses target {cp['target']}")
            continue
        upper = _unit_partial_upper(tail, p, count, weight_k or 0)
        if upper is None:
            _err(errors, where, f"checkpoint of {count} terms too large to re-verify")
        elif dy_cmp_frac(upper, lower) < 0:
            _err(errors, where, "checkpoint lower bound exceeds a certified upper bound")


def _unit_partial_upper(tail: Tail, p: Fraction, count: int, weight_k: int):
    """Certified upper bound (dyadic) for the unit-coefficient partial sum.

    None when the count exceeds the termwise budget and no grouped bound
    applies.  The log-reciprocal grouping covers the one series whose
    divergence checkpoints legitimately run to tens of thousands of terms.
    """
    if not isinstance(count, int) or count <= 0:
        return None
    unit = _unit(tail)
    start = unit.first_rank()
    if (unit.term.kind == "log-recip-rank" and weight_k == 0 and start == 0
            and not unit.filters and unit.max_position is None):
        # log2(j+2) >= g on the g-th block, so each term is at most g**-p;
        # block sizes double, so the walk is logarithmic in count
        total = Fraction(0)
        j = 0
        while j < count:
            g = (j + 2).bit_length() - 1
            block_end = (1 << (g + 1)) - 2
            size = min(count, block_end) - j
            total += size * _pow_upper(Fraction(1, g), p)
            j += size
        return dy_from_fraction(total, 128, True)
    if count > CHECKPOINT_TERMWISE_LIMIT:
        return None
    if weight_k == 0:
        return tail_abs_p_partial(unit, p, start, count, _PREC).hi
    return _weighted_partial(unit, weight_k, count).hi


def _weighted_partial(tail: Tail, k: int, count: int):
    """Certified Sum (n+1)**k |value| over the first `count` ranks."""
    start = tail.first_rank()
    limit = tail.rank_limit()
    if limit is not None:
        count = max(0, min(count, limit - start))
    parts = []
    for i, pos in enumerate(tail.support.elements(count, start)):
        if tail.filters and not all(f.contains(pos) for f in tail.filters):
            continue
        val = term_value(tail.term, start + i, pos)
        part = val.abs_p_enclosure(Fraction(1), _PREC)
        parts.append(part.mul_frac(Fraction(pos + 1) ** k))
    return interval_sum(parts, _PREC)


# --- exact replicas of the evidence schedules ---


def _expected_decay_cutoffs(tail: Tail) -> list[dict]:
    kind = tail.term.kind
    c_sq = tail.term.coeff.abs_sq()
    out = []
    for target in EVIDENCE_TARGETS:
        m_sq = target * target
        if kind == "geom-decay":
            r2 = tail.term.ratio * tail.term.ratio
            n = 0
            acc = c_sq
            while acc * m_sq > 1:
                acc *= r2
                n += 1
            cutoff = max(n, tail.min_position)
        elif kind == "power-rank":
            alpha = tail.term.alpha
            j = 0
            while Fraction(j + 1) ** (2 * alpha.numerator) < (m_sq * c_sq) ** alpha.denominator:
                j += 1
            cutoff = tail.support.element(max(j, tail.first_rank()))
        elif kind == "recip-position":
            n = 1
            while Fraction(n * n) < m_sq * c_sq:
                n += 1
            cutoff = max(n, tail.min_position)
        else:  # log-recip-rank
            t = 1
            while Fraction(t * t) < m_sq * c_sq:
                t += 1
            j = (1 << t) - 2
            cutoff = tail.support.element(max(j, tail.first_rank()))
        out.append({"target": format_rational(target), "position": cutoff})
    return out


def _expected_unbounded_checkpoints(tail: Tail) -> list[dict]:
    kind = tail.term.kind
    out = []
    for target in EVIDENCE_TARGETS:
        if kind == "linear-rank":
            rank = max(_ceil_frac(target) - 1, tail.first_rank())
        else:
            ratio = tail.term.ratio
            n = 0
            acc = Fraction(1)
            while acc < target:
                acc *= ratio
                n += 1
            rank = tail.support.first_rank_at_or_above(max(n, tail.min_position))
        out.append({"target": format_rational(target), "rank": rank})
    return out


def _expected_root_limsup(tail: Tail) -> dict:
    ratio = tail.term.ratio
    r = (1 + ratio) / 2
    grow = (ratio / r) * (ratio / r)
    acc = tail.term.coeff.abs_sq()
    n_star = 0
    while acc < 1:
        acc *= grow
        n_star += 1
    n_star = max(n_star, tail.min_position)
    return {
        "r": format_rational(r),
        "n_star": n_star,
        "sample_position": tail.support.element(tail.support.first_rank_at_or_above(n_star)),
    }


_WALKERS = {
    "witness": _walk_witness,
    "independence": _walk_independence,
    "not-in-y": _walk_not_in_y,
    "density": _walk_density,
    "union-span": _walk_union_span,
    "extract": _walk_extract,
    "combo-not-in-y": _walk_combo_not_in_y,
    "cross-independence": _walk_cross_independence,
    "pointwise": _walk_pointwise,
}


# --- guaranteed-reject mutations ---


def mutation_candidates(cert: dict) -> list[tuple[tuple, str]]:
    """Paths whose mutation `recheck` must reject, with a mutator tag each.

    Only fields the walkers recompute exactly (or bound strictly) are
    listed; inequality slack that a mutation could legally absorb is left
    out, so every candidate is a guaranteed rejection, not a likely one.
    """
    out: list[tuple[tuple, str]] = [(("schema",), "schema_break")]
    if "family_sha256" in cert:
        out.append((("family_sha256",), "hex_flip"))
    if "family" in cert:
        out.append((("family", "depth"), "int_bump"))
    kind = cert.get("kind")
    trials = cert.get("trials", [])
    if kind in ("independence", "not-in-y", "union-span"):
        if "trials" in cert.get("claim", {}):
            out.append((("claim", "trials"), "int_bump"))
        for i, run in enumerate(trials[:4]):
            tr = run["trace"]
            base = ("trials", i, "trace")
            out += [
                (base + ("n0",), "int_bump"),
                (base + ("N1",), "int_bump"),
                (base + ("N2",), "int_bump"),
                (base + ("M",), "int_bump"),
                (base + ("scale_log2",), "int_bump"),
                (base + ("coefficient", 0), "rational_bump"),
                (base + ("witness_value_n0", "rational", 0), "rational_bump"),
                (base + ("value_n0", "rational", 0), "rational_bump"),
            ]
            if tr.get("excluded_slots"):
                out.append((base + ("excluded_slots",), "drop_first"))
            if "N" in tr:
                out.append((base + ("N",), "int_bump"))
            if "witness_out_of_Y" in tr:
                out += _evidence_targets(base + ("witness_out_of_Y",),
                                         tr["witness_out_of_Y"])
    elif kind == "density":
        out.append((("claim", "checked"), "int_bump"))
        for i in range(min(len(trials), 6)):
            out += [
                (("trials", i, "direct", 1), "dy_three"),
                (("trials", i, "translated", 1), "dy_three"),
                (("trials", i, "j"), "int_bump"),
            ]
    elif kind in ("extract", "combo-not-in-y"):
        if "trials" in cert.get("claim", {}):
            out.append((("claim", "trials"), "int_bump"))
        for i, run in enumerate(trials[:4]):
            base = ("trials", i, "trace")
            out += [(base + ("j0",), "int_bump"),
                    (base + ("coefficient", 0), "rational_bump")]
            tr = run["trace"]
            if "witness_out_of_Y" in tr:
                out += _evidence_targets(base + ("witness_out_of_Y",),
                                         tr["witness_out_of_Y"])
    elif kind == "cross-independence":
        if "trials" in cert.get("claim", {}):
            out.append((("claim", "trials"), "int_bump"))
        for i, run in enumerate(trials[:4]):
            base = ("trials", i, "trace")
            tr = run["trace"]
            out += [
                (base + ("n0",), "int_bump"),
                (base + ("N",), "int_bump"),
                (base + ("value_n0", "rational", 0), "rational_bump"),
            ]
            if tr.get("excluded_branches"):
                out.append((base + ("excluded_branches",), "drop_first"))
    elif kind == "pointwise":
        for i, row in enumerate(trials):
            b = ("trials", i)
            if "distance_upper" in row:
                out += [(b + ("tightest_modulus_sq",), "rational_bump"),
                        (b + ("tightest_gap_sq_upper",), "above_modulus")]
            elif row.get("modulus") == "unbounded at this distance":
                out.append((b + ("distance_lower",), "tiny_distance"))
    elif kind == "witness":
        t0 = ("trials", 0)
        out.append((t0 + ("support_samples", 0), "int_bump"))
        out += _evidence_targets(t0 + ("in_X",), trials[0]["in_X"])
        out += _evidence_targets(t0 + ("out_Y",), trials[0]["out_Y"])
    return out


def _evidence_targets(path: tuple, ev: dict) -> list[tuple[tuple, str]]:
    out = []
    for i, rep in enumerate(ev.get("tails", [])):
        base = path + ("tails", i)
        out.append((base + ("verdict",), "flip_verdict"))
        out += _report_targets(base, rep)
    return out


def _report_targets(base: tuple, rep: dict) -> list[tuple[tuple, str]]:
    out = []
    cps = rep.get("checkpoints")
    if isinstance(cps, list) and cps:
        if "partial_lower" in cps[0]:
            out.append((base + ("checkpoints", 0, "partial_lower"), "rational_zero"))
        elif "rank" in cps[0]:
            out.append((base + ("checkpoints", 0, "rank"), "int_bump"))
    if rep.get("cutoffs"):
        out.append((base + ("cutoffs", 0, "position"), "int_bump"))
    for f in ("floor_abs_sq", "coeff_abs_sq", "bound_abs_sq", "scale_abs_sq",
              "witness_q", "sample_q", "s"):
        if f in rep:
            out.append((base + (f,), "rational_bump"))
    if "n_star" in rep:
        out.append((base + ("n_star",), "int_bump"))
    if "sum_upper" in rep:
        out.append((base + ("sum_upper",), "dy_zero"))
    if rep.get("sample_positions"):
        out.append((base + ("sample_positions", 0), "int_bump"))
    if isinstance(rep.get("samples"), list) and rep["samples"]:
        first = rep["samples"][0]
        if isinstance(first, dict) and "sum_upper" in first:
            out.append((base + ("samples", 0, "sum_upper"), "dy_zero"))
    for nested in ("sample", "witness"):
        if isinstance(rep.get(nested), dict):
            out += _report_targets(base + (nested,), rep[nested])
    return out


def apply_mutation(cert: dict, candidate: tuple[tuple, str]) -> tuple[dict, str]:
    """A deep copy of `cert` with the candidate's field corrupted."""
    path, tag = candidate
    doc = copy.deepcopy(cert)
    parent = doc
    for key in path[:-1]:
        parent = parent[key]
    k = path[-1]
    if tag == "int_bump":
        parent[k] = parent[k] + 1
    elif tag == "rational_bump":
        parent[k] = format_rational(parse_rational(parent[k]) + 1)
    elif tag == "rational_zero":
        parent[k] = "0"
    elif tag == "dy_zero":
        parent[k] = "0"
    elif tag == "dy_three":
        parent[k] = "3"
    elif tag == "hex_flip":
        s = parent[k]
        parent[k] = ("0" if s[:1] != "0" else "1") + s[1:]
    elif tag == "schema_break":
        parent[k] = "cert-v0"
    elif tag == "drop_first":
        parent[k] = parent[k][1:]
    elif tag == "flip_verdict":
        parent[k] = "In" if parent[k] == "Out" else "Out"
    elif tag == "above_modulus":
        bigger = 2 * parse_rational(parent["tightest_modulus_sq"]) + 1
        parent[k] = format_rational(bigger)
    elif tag == "tiny_distance":
        parent[k] = format_rational(Fraction(1, 1 << (parent["n_max"] + 8)))
    else:
        raise ValueError(f"unknown mutator {tag!r}")
    label = "/".join(str(p) for p in path) + ":" + tag
    return doc, label
