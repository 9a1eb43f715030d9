"""Per-branch closed-span families and their finite representatives.

Here every branch carries the span of its own witnesses alone, with no
dense correction term, so the construction survives a non-separable
ambient space (the sup-norm space is allowed).  A finite combination
f = sum_j c_j y_j^k lives on the branch vertex set; restricting to the
j0-th partition cell recovers c_j0 * y_j0 exactly because distinct cells
never meet.  That extraction identity, together with a witness certified
outside Y and Y's closure under scalars, forces f itself outside Y.
Cross-branch independence falls out of almost disjointness the same way
as in the dense construction, only without the x_j heads.

Certificates never claim anything about genuine closure limit points:
they speak for span representatives, and the pointwise convergence audit
records the one analytic fact (metric convergence controls coordinates)
that the closure argument needs on top of them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .certificates import DEFAULT_SEED, make_certificate
from .dense_families import (ZeroElement, _paired_tail_values, _sym_eq,
                             _witness_out_evidence)
from .indexsets import BranchId, IndexSet, branch_intersection, branch_set, partition_cell
from .metrics import TooCoarse, distance, pointwise_modulus
from .scalars import Scalar, format_rational
from .sequences import SymbolicSequence, Tail
from .spaces import ChainParams, SpaceId, chain_lt, member
from .witnesses import witness_tail

__all__ = [
    "ClosedFamilySpec",
    "ComboElement",
    "WitnessCell",
    "ZeroCoefficient",
    "ZeroDesignated",
    "build_closed_family",
    "certify_combo_batch",
    "certify_combo_not_in_y",
    "certify_cross_batch",
    "certify_cross_branch_independence",
    "certify_extract",
    "certify_extract_batch",
    "extract_component",
    "pointwise_convergence_audit",
    "random_combo",
]

EXTRACT_SAMPLE = 1000


class ZeroCoefficient(ValueError):
    """Extraction was requested at an index whose coefficient vanishes."""


class ZeroDesignated(ValueError):
    """The designated element of a cross-branch tuple is zero."""


@dataclass(frozen=True)
class WitnessCell:
    """One (branch, j) slot: the partition cell and its witness tail."""

    branch: BranchId
    j: int
    cell: IndexSet
    tail: Tail

    def witness_seq(self) -> SymbolicSequence:
        return SymbolicSequence.from_tail(self.tail)

    def to_json(self) -> dict:
        return {
            "branch": self.branch.text(),
            "j": self.j,
            "cell": self.cell.to_json(),
            "witness": self.tail.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "WitnessCell":
        return WitnessCell(
            BranchId.parse(obj["branch"]),
            obj["j"],
            IndexSet.from_json(obj["cell"]),
            Tail.from_json(obj["witness"]),
        )


@dataclass(frozen=True)
class ClosedFamilySpec:
    params: ChainParams
    small: SpaceId
    large: SpaceId
    branches: tuple[BranchId, ...]
    depth: int
    cells: tuple[WitnessCell, ...]  # ordered by (branch position, j)

    @cached_property
    def _by_slot(self) -> dict:
        return {(c.branch, c.j): c for c in self.cells}

    def cell(self, branch: BranchId, j: int) -> WitnessCell:
        return self._by_slot[(branch, j)]

    def to_json(self) -> dict:
        return {
            "schema": "family-v1",
            "mode": "closed",
            "params": self.params.to_json(),
            "Y": self.small.to_json(),
            "X": self.large.to_json(),
            "branches": [b.text() for b in self.branches],
            "depth": self.depth,
            "cells": [c.to_json() for c in self.cells],
        }

    @staticmethod
    def from_json(obj: dict) -> "ClosedFamilySpec":
        if obj.get("schema") != "family-v1" or obj.get("mode") != "closed":
            raise ValueError("not a closed family-v1 document")
        return ClosedFamilySpec(
            ChainParams.from_json(obj["params"]),
            SpaceId.from_json(obj["Y"]),
            SpaceId.from_json(obj["X"]),
            tuple(BranchId.parse(t) for t in obj["branches"]),
            obj["depth"],
            tuple(WitnessCell.from_json(c) for c in obj["cells"]),
        )


def build_closed_family(small: SpaceId, large: SpaceId, branches,
                        depth: int, params: ChainParams | None = None) -> ClosedFamilySpec:
    """Witnesses on all (branch, j) slots, each certified In X and Out Y."""
    params = params or ChainParams()
    if not chain_lt(small, large, params):
        raise ValueError("need Y strictly below X in the chain")
    branches = tuple(branches)
    if len(set(branches)) != len(branches):
        raise ValueError("duplicate branch")
    if depth < 1:
        raise ValueError("depth >= 1")
    cells = []
    for br in branches:
        vertex_set = branch_set(br)
        row = []
        for j in range(1, depth + 1):
            cell = partition_cell(vertex_set, j)
            tail = witness_tail(small, large, cell, params)
            y = SymbolicSequence.from_tail(tail)
            if not member(y, large).is_in:
                raise RuntimeError(f"witness not certified In {large.text(params)}")
            if not member(y, small).is_out:
                raise RuntimeError(f"witness not certified Out {small.text(params)}")
            row.append(WitnessCell(br, j, cell, tail))
        for i in range(len(row)):
            for l in range(i + 1, len(row)):
                if not row[i].cell.known_disjoint(row[l].cell):
                    raise RuntimeError("partition cells fail disjointness")
        cells.extend(row)
    return ClosedFamilySpec(params, small, large, branches, depth, tuple(cells))


@dataclass(frozen=True)
class ComboElement:
    """f = sum_j c_j y_j^k on a single branch, finitely many c_j != 0."""

    family: ClosedFamilySpec
    branch: BranchId
    coefficients: tuple[tuple[int, Scalar], ...]  # (j, c_j), c_j != 0

    def __post_init__(self) -> None:
        seen = set()
        for j, c in self.coefficients:
            if j in seen:
                raise ValueError("duplicate index in combination")
            seen.add(j)
            if c.is_zero():
                raise ValueError("zero coefficients are not stored")

    def sequence(self) -> SymbolicSequence:
        out = SymbolicSequence.zero()
        for j, c in self.coefficients:
            out = out.add(self.family.cell(self.branch, j).witness_seq().scale(c))
        return out

    def coefficient(self, j: int) -> Scalar:
        for jj, c in self.coefficients:
            if jj == j:
                return c
        return Scalar.zero()

    def coeffs_json(self) -> list:
        return [[j, c.to_json()] for j, c in self.coefficients]


def random_combo(family: ClosedFamilySpec, rng: random.Random,
                 branch: BranchId | None = None) -> ComboElement:
    if branch is None:
        branch = family.branches[rng.randrange(len(family.branches))]
    js = rng.sample(range(1, family.depth + 1),
                    rng.randint(1, min(4, family.depth)))
    coefficients = []
    for j in sorted(js):
        num = rng.choice([-3, -2, -1, 1, 2, 3])
        den = rng.choice([1, 2, 3, 7])
        im = rng.choice([0, 0, 0, 1, -1])
        coefficients.append((j, Scalar(Fraction(num, den), Fraction(im, den))))
    return ComboElement(family, branch, tuple(coefficients))


def extract_component(f: ComboElement, j0: int,
                      samples: int = EXTRACT_SAMPLE) -> dict:
    """Trace for: f restricted to the j0-th cell is c_j0 * y_j0 exactly."""
    c0 = f.coefficient(j0)
    if c0.is_zero():
        raise ZeroCoefficient(f"coefficient at j = {j0} vanishes")
    cell = f.family.cell(f.branch, j0)
    lhs = f.sequence().restrict(cell.cell)
    rhs = cell.witness_seq().scale(c0)
    symbolic_equal = lhs == rhs
    checked = 0
    paired = _paired_tail_values(lhs, rhs, samples)
    if paired is not None:
        for n, u, w in paired:
            if not _sym_eq(u, w):
                raise RuntimeError(f"extraction identity fails at {n}")
            checked += 1
    else:
        for r in range(samples):
            n = cell.cell.element(r)
            if not _sym_eq(lhs.value_at(n), rhs.value_at(n)):
                raise RuntimeError(f"extraction identity fails at {n}")
            checked += 1
    return {
        "j0": j0,
        "coefficient": c0.to_json(),
        "cell": cell.cell.to_json(),
        "symbolic_equal": symbolic_equal,
        "samples": checked,
    }


_EXTRACT_STATEMENT = ("multiplying by the indicator of one partition cell "
                      "recovers that cell's witness term exactly")


def certify_extract(f: ComboElement, j0: int, seed: int | None = None) -> dict:
    trace = extract_component(f, j0)
    claim = {"statement": _EXTRACT_STATEMENT}
    return make_certificate("extract", f.family.params, claim, seed=seed,
                            family=f.family.to_json(),
                            trials=[{"branch": f.branch.text(),
                                     "coeffs": f.coeffs_json(),
                                     "trace": trace}])


def certify_extract_batch(family: ClosedFamilySpec, trials: int,
                          seed: int = DEFAULT_SEED) -> dict:
    """One certificate holding `trials` random extraction traces."""
    rng = random.Random(seed)
    runs = []
    for _ in range(trials):
        f = random_combo(family, rng)
        j0 = f.coefficients[rng.randrange(len(f.coefficients))][0]
        runs.append({"branch": f.branch.text(), "coeffs": f.coeffs_json(),
                     "trace": extract_component(f, j0)})
    claim = {"statement": _EXTRACT_STATEMENT, "trials": trials}
    return make_certificate("extract", family.params, claim, seed=seed,
                            family=family.to_json(), trials=runs)


def combo_not_in_y(f: ComboElement) -> dict:
    """Extraction at a nonzero index plus the witness verdict keep f out of Y.

    If f were in Y then so would f * indicator(cell) be, Y absorbing
    restrictions of its members along the chain's coordinate structure;
    but that restriction is a nonzero multiple of a witness certified
    outside Y, and Y is closed under scalars.
    """
    if not f.coefficients:
        raise ZeroElement("all coefficients vanish")
    j0 = f.coefficients[0][0]
    trace = extract_component(f, j0)
    fam = f.family
    trace["witness_out_of_Y"] = _witness_out_evidence(
        fam.cell(f.branch, j0).tail, fam.small)
    trace["conclusion"] = (
        "restriction to the cell is a nonzero scalar multiple of a witness "
        "outside Y; Y is closed under scalar multiplication, so f is not in Y"
    )
    return trace


_COMBO_STATEMENT = ("the finite combination stays outside Y: one extracted "
                    "component already does, and membership would descend "
                    "to it")


def certify_combo_not_in_y(f: ComboElement, seed: int | None = None) -> dict:
    trace = combo_not_in_y(f)
    claim = {"statement": _COMBO_STATEMENT}
    return make_certificate("combo-not-in-y", f.family.params, claim, seed=seed,
                            family=f.family.to_json(),
                            trials=[{"branch": f.branch.text(),
                                     "coeffs": f.coeffs_json(),
                                     "trace": trace}])


def certify_combo_batch(family: ClosedFamilySpec, trials: int,
                        seed: int = DEFAULT_SEED) -> dict:
    """One certificate holding `trials` random within-branch combinations."""
    rng = random.Random(seed)
    runs = []
    for _ in range(trials):
        f = random_combo(family, rng)
        runs.append({"branch": f.branch.text(), "coeffs": f.coeffs_json(),
                     "trace": combo_not_in_y(f)})
    claim = {"statement": _COMBO_STATEMENT, "trials": trials}
    return make_certificate("combo-not-in-y", family.params, claim, seed=seed,
                            family=family.to_json(), trials=runs)


def cross_branch_independence(combos: dict, k0: BranchId) -> dict:
    """One coordinate where the designated branch survives all the others.

    Past the pairwise intersections the branch vertex sets are disjoint,
    and the designated combination has infinite support, so some support
    point n0 >= N avoids every other branch; there the sum of all the
    combinations equals the designated one's value.
    """
    v0 = combos.get(k0)
    if v0 is None or not v0.coefficients:
        raise ZeroDesignated("the designated combination is zero")
    used = list(combos)
    for br in used:
        if combos[br].branch != br:
            raise ValueError("combination filed under the wrong branch")
    n_cut = 0
    for i in range(len(used)):
        for l in range(i + 1, len(used)):
            shared = branch_intersection(used[i], used[l])
            n_cut = max(n_cut, 1 + shared.max_element())

    lead = v0.family.cell(k0, v0.coefficients[0][0])
    others = [br for br in used if br != k0]
    rank = lead.cell.first_rank_at_or_above(n_cut)
    n0 = None
    for r in range(rank, rank + 64):
        cand = lead.cell.element(r)
        if all(not branch_set(br).contains(cand) for br in others):
            n0 = cand
            break
    if n0 is None:
        raise RuntimeError("no separating coordinate found past the cut")

    component = v0.sequence().value_at(n0)
    total = component
    excluded = []
    for br in others:
        other_val = combos[br].sequence().value_at(n0)
        if not other_val.is_zero():
            raise RuntimeError("foreign branch is supported at n0")
        total = total.add(other_val)
        excluded.append(br.text())
    if not _sym_eq(total, component):
        raise RuntimeError("sum at n0 differs from the designated component")
    if component.is_zero():
        raise RuntimeError("designated component vanishes at n0")
    return {
        "k0": k0.text(),
        "N": n_cut,
        "n0": n0,
        "excluded_branches": excluded,
        "value_n0": component.to_json(),
    }


_CROSS_STATEMENT = ("one combination per branch, designated one nonzero: "
                    "the sum is nonzero at a coordinate only the designated "
                    "branch reaches")


def _cross_trial(combos: dict, k0: BranchId) -> dict:
    trace = cross_branch_independence(combos, k0)
    rows = [{"branch": br.text(), "coeffs": combos[br].coeffs_json()}
            for br in combos]
    return {"combos": rows, "trace": trace}


def certify_cross_branch_independence(combos: dict, k0: BranchId,
                                      seed: int | None = None) -> dict:
    fam = combos[k0].family
    claim = {"statement": _CROSS_STATEMENT}
    return make_certificate("cross-independence", fam.params, claim, seed=seed,
                            family=fam.to_json(),
                            trials=[_cross_trial(combos, k0)])


def certify_cross_batch(family: ClosedFamilySpec, trials: int,
                        seed: int = DEFAULT_SEED) -> dict:
    """One certificate holding `trials` random cross-branch tuples."""
    if len(family.branches) < 2:
        raise ValueError("cross-branch sampling needs at least two branches")
    rng = random.Random(seed)
    runs = []
    for _ in range(trials):
        n_br = rng.randint(2, min(len(family.branches), 3))
        chosen = [family.branches[i]
                  for i in rng.sample(range(len(family.branches)), n_br)]
        combos = {br: random_combo(family, rng, br) for br in chosen}
        runs.append(_cross_trial(combos, chosen[0]))
    claim = {"statement": _CROSS_STATEMENT, "trials": trials}
    return make_certificate("cross-independence", family.params, claim,
                            seed=seed, family=family.to_json(), trials=runs)


def pointwise_convergence_audit(space: SpaceId, pairs, params: ChainParams | None = None,
                                n_max: int = 50, seed: int | None = None,
                                tol0: Fraction = Fraction(1, 64)) -> dict:
    """Coordinates move no more than the metric's pointwise modulus allows.

    For each pair a certified distance upper bound is refined (starting at
    tol0) until the modulus formula applies, then |x(n) - y(n)| <=
    modulus(n, bound) is checked exactly at every n <= n_max.
    """
    params = params or ChainParams()
    rows = []
    for x, y in pairs:
        tol = tol0
        bound = None
        vacuous = False
        while tol >= Fraction(1, 1 << 32):
            enc = distance(space, x, y, tol)
            cand = enc.upper_fraction()
            try:
                pointwise_modulus(space, n_max, cand)
            except TooCoarse:
                lower = enc.lower_fraction()
                if lower > 0:
                    try:
                        pointwise_modulus(space, n_max, lower)
                    except TooCoarse:
                        # the true distance is already past the formula's
                        # range, so no coordinate bound is claimed
                        vacuous = True
                        break
                    tol = min(tol / 16, lower / 4)
                else:
                    tol /= 16
                continue
            bound = cand
            break
        if bound is None:
            # provably past the formula's range, or pinned on its boundary:
            # either way no coordinate bound is claimed for this pair
            rows.append({
                "x": x.to_json(),
                "y": y.to_json(),
                "distance_lower": format_rational(enc.lower_fraction()),
                "n_max": n_max,
                "modulus": "unbounded at this distance" if vacuous
                           else "undecided at the formula boundary",
            })
            continue
        worst = None
        for n in range(n_max + 1):
            gap = x.value_at(n).add(y.value_at(n).neg())
            mod = pointwise_modulus(space, n, bound)
            prec = 64
            while True:
                gap_sq = gap.abs_sq_enclosure(prec)
                verdict = gap_sq.cmp_frac(mod * mod)
                if verdict is not None:
                    break
                prec *= 2
                if prec > 4096:
                    raise RuntimeError(f"gap enclosure stuck at coordinate {n}")
            if verdict > 0:
                raise RuntimeError(f"modulus violated at coordinate {n}")
            gap_hi = gap_sq.upper_fraction()
            if worst is None or gap_hi * worst[1] > worst[0] * (mod * mod):
                worst = (gap_hi, mod * mod, n)
        rows.append({
            "x": x.to_json(),
            "y": y.to_json(),
            "distance_upper": format_rational(bound),
            "n_max": n_max,
            "tightest_n": worst[2],
            "tightest_gap_sq_upper": format_rational(worst[0]),
            "tightest_modulus_sq": format_rational(worst[1]),
        })
    substantive = sum(1 for r in rows if "distance_upper" in r)
    claim = {
        "statement": "convergence in the metric forces coordinatewise "
                     "convergence at the displayed modulus",
        "space": space.to_json(),
        "pairs": len(rows),
        "checked": substantive,
    }
    return make_certificate("pointwise", params, claim, seed=seed,
                            trials=rows)
