"""The chain of sequence spaces and decidable membership for tail sequences.

The chain, for rational parameters 0 < a < b:

    c00 < Ainf < cap0 < l(a) < cap(a) < l(b) < cap(b) < c0 < linf < H < full

where Ainf is the space of coefficient sequences whose polynomially weighted
sums all converge, cap0 is the intersection of every l(p) for p > 0, cap(p)
the intersection of l(q) over q > p, H the coefficient sequences of functions
analytic on the open unit disc, and full the space of all sequences.

Membership of a tail sequence is decided per tail from the term class, the
coefficient, and the support's growth class, and every verdict carries
finitely checkable evidence: convergent series get certified upper bounds,
divergent ones get partial-sum checkpoints at targets 1 and 3 (computed for
the unit-coefficient series so tiny coefficients cannot blow up the
checkpoint length), floors and decay cutoffs get explicit positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dyadic import CertifiedReal, dy_text, interval_sum
from .indexsets import ray_cut
from .scalars import Scalar, format_rational, parse_rational
from .sequences import (
    SymbolicSequence,
    SymValue,
    Tail,
    divergence_checkpoint,
    series_tail_bound,
    tail_abs_p_partial,
    term_value,
)

EVIDENCE_TARGETS = (Fraction(1), Fraction(3))


@dataclass(frozen=True)
class ChainParams:
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(2)

    def __post_init__(self) -> None:
        if not 0 < self.a < self.b:
            raise ValueError("chain parameters need 0 < a < b")

    @staticmethod
    def parse(a_text: str, b_text: str) -> "ChainParams":
        return ChainParams(parse_rational(a_text), parse_rational(b_text))

    def to_json(self) -> dict:
        return {"a": format_rational(self.a), "b": format_rational(self.b)}

    @staticmethod
    def from_json(obj: dict) -> "ChainParams":
        return ChainParams(parse_rational(obj["a"]), parse_rational(obj["b"]))


_PARAMETRIC = ("lp", "cap")
_KINDS = ("c00", "Ainf", "cap0", "lp", "cap", "c0", "linf", "H", "full")


@dataclass(frozen=True)
class SpaceId:
    kind: str
    p: Fraction | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        if (self.kind in _PARAMETRIC) != (self.p is not None):
            raise ValueError(f"space {self.kind!r} and parameter {self.p!r} mismatch")
        if self.p is not None and self.p <= 0:
            raise ValueError("space exponent must be positive")

    def text(self, params: ChainParams | None = None) -> str:
        if self.kind == "lp":
            if params and self.p == params.a:
                return "l(a)"
            if params and self.p == params.b:
                return "l(b)"
            return f"l({self.p})"
        if self.kind == "cap":
            if params and self.p == params.a:
                return "cap(a)"
            if params and self.p == params.b:
                return "cap(b)"
            return f"cap({self.p})"
        return self.kind

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.p is not None:
            out["p"] = format_rational(self.p)
        return out

    @staticmethod
    def from_json(obj: dict) -> "SpaceId":
        p = parse_rational(obj["p"]) if "p" in obj else None
        return SpaceId(obj["kind"], p)


def chain(params: ChainParams) -> tuple[SpaceId, ...]:
    return (
        SpaceId("c00"),
        SpaceId("Ainf"),
        SpaceId("cap0"),
        SpaceId("lp", params.a),
        SpaceId("cap", params.a),
        SpaceId("lp", params.b),
        SpaceId("cap", params.b),
        SpaceId("c0"),
        SpaceId("linf"),
        SpaceId("H"),
        SpaceId("full"),
    )


def parse_space(text: str, params: ChainParams) -> SpaceId:
    t = text.strip()
    plain = {"c00": "c00", "Ainf": "Ainf", "cap0": "cap0", "c0": "c0", "linf": "linf", "H": "H", "full": "full"}
    if t in plain:
        return SpaceId(plain[t])
    for prefix, kind in (("l(", "lp"), ("cap(", "cap")):
        if t.startswith(prefix) and t.endswith(")"):
            arg = t[len(prefix) : -1]
            if arg == "a":
                return SpaceId(kind, params.a)
            if arg == "b":
                return SpaceId(kind, params.b)
            return SpaceId(kind, parse_rational(arg))
    raise ValueError(f"cannot parse space {text!r}")


def chain_index(space: SpaceId, params: ChainParams) -> int:
    try:
        return chain(params).index(space)
    except ValueError:
        raise ValueError(f"{space.text(params)} is not in the chain for {params}") from None


def chain_lt(y: SpaceId, x: SpaceId, params: ChainParams) -> bool:
    return chain_index(y, params) < chain_index(x, params)


def successor(space: SpaceId, params: ChainParams) -> SpaceId:
    i = chain_index(space, params)
    link = chain(params)
    if i + 1 >= len(link):
        raise ValueError("the last space has no successor")
    return link[i + 1]


# --- membership ---


@dataclass
class MembershipVerdict:
    verdict: str  # "In" | "Out" | "Undecidable"
    evidence: dict

    @property
    def is_in(self) -> bool:
        return self.verdict == "In"

    @property
    def is_out(self) -> bool:
        return self.verdict == "Out"


def member(seq: SymbolicSequence, space: SpaceId, prec: int = 128) -> MembershipVerdict:
    """Decide seq in space; the finite part never matters (every space in the
    chain contains the finitely supported sequences)."""
    reports = []
    n_out = n_und = 0
    for t in seq.tails:
        verdict, ev = tail_member(t, space, prec)
        reports.append({"verdict": verdict, **ev})
        if verdict == "Out":
            n_out += 1
        elif verdict == "Undecidable":
            n_und += 1
    evidence = {"space": space.to_json(), "tails": reports}
    if n_out == 0 and n_und == 0:
        return MembershipVerdict("In", evidence)
    # a single bad tail cannot be repaired by members, and with pairwise
    # disjoint supports no cancellation between tails is possible either
    if n_out >= 1 and (n_out + n_und == 1 or _pairwise_disjoint(seq.tails)):
        evidence["aggregation"] = "solid-restriction" if n_out + n_und > 1 else "single-offender"
        return MembershipVerdict("Out", evidence)
    return MembershipVerdict("Undecidable", evidence)


def _pairwise_disjoint(tails: tuple[Tail, ...]) -> bool:
    effs = [ray_cut(t.support, t.min_position) for t in tails]
    return all(
        effs[i].known_disjoint(effs[j]) for i in range(len(effs)) for j in range(i + 1, len(effs))
    )


def tail_member(tail: Tail, space: SpaceId, prec: int = 128) -> tuple[str, dict]:
    base = {"term": tail.term.kind, "space": space.text()}
    if tail.max_position is not None:
        return "In", {**base, "rule": "finite-window"}
    if tail.filters:
        verdict, ev = tail_member(_unfiltered(tail), space, prec)
        if verdict == "In":
            return "In", {**ev, "filtered": True}
        return "Undecidable", {**base, "rule": "filtered-tail"}
    kind = space.kind
    if kind == "full":
        return "In", {**base, "rule": "always"}
    if kind == "c00":
        return _member_c00(tail, base)
    if kind == "lp":
        return _member_lp(tail, space.p, base, prec)
    if kind in ("cap", "cap0"):
        p = space.p if kind == "cap" else Fraction(0)
        return _member_cap(tail, p, base, prec)
    if kind == "c0":
        return _member_c0(tail, base, prec)
    if kind == "linf":
        return _member_linf(tail, base, prec)
    if kind == "H":
        return _member_h(tail, base, prec)
    if kind == "Ainf":
        return _member_ainf(tail, base, prec)
    raise ValueError(kind)


def _unfiltered(tail: Tail) -> Tail:
    return Tail(tail.term, tail.support, tail.min_position, tail.max_position, ())


def _unit(tail: Tail) -> Tail:
    return Tail(
        tail.term.with_coeff(Scalar.one()),
        tail.support,
        tail.min_position,
        tail.max_position,
        tail.filters,
    )


def _coeff_abs_sq(tail: Tail) -> Fraction:
    return tail.term.coeff.abs_sq()


def _divergence_evidence(tail: Tail, p: Fraction, prec: int) -> dict:
    """Partial-sum checkpoints for the unit-coefficient series."""
    unit = _unit(tail)
    checkpoints = []
    for target in EVIDENCE_TARGETS:
        got = divergence_checkpoint(unit, p, target, prec)
        if got is None:
            raise RuntimeError(f"divergence checkpoint at {target} ran out of budget")
        count, lower = got
        checkpoints.append({"target": format_rational(target), "count": count, "partial_lower": format_rational(lower)})
    return {
        "normalized": True,
        "coeff_abs_sq": format_rational(_coeff_abs_sq(tail)),
        "p": format_rational(p),
        "checkpoints": checkpoints,
    }


def _bound_evidence(tail: Tail, p: Fraction, prec: int) -> dict:
    sb = series_tail_bound(tail, p, tail.first_rank(), prec)
    if sb.kind != "convergent":
        raise RuntimeError(f"expected a convergent bound for {tail.term.kind} at p={p}")
    # dy_text keeps deep-support bounds printable: the exponent can be
    # astronomically negative even though the value itself is tiny.
    return {"p": format_rational(p), "sum_upper": dy_text(sb.bound.hi)}


def _member_c00(tail: Tail, base: dict) -> tuple[str, dict]:
    positions = list(tail.positions(3))
    return "Out", {**base, "rule": "infinite-support", "sample_positions": positions}


def _member_lp(tail: Tail, p: Fraction, base: dict, prec: int) -> tuple[str, dict]:
    kind = tail.term.kind
    if kind == "geom-decay":
        return "In", {**base, "rule": "geometric-series", **_bound_evidence(tail, p, prec)}
    if kind == "power-rank":
        s = tail.term.alpha * p
        if s > 1:
            return "In", {**base, "rule": "critical-exponent", "s": format_rational(s), **_bound_evidence(tail, p, prec)}
        return "Out", {**base, "rule": "critical-exponent", "s": format_rational(s), **_divergence_evidence(tail, p, prec)}
    if kind == "recip-position":
        growth = tail.support.growth_kind()
        if growth == "exp":
            return "In", {**base, "rule": "exp-support-reciprocal", **_bound_evidence(tail, p, prec)}
        form = tail.support.linear_form()
        if form is None:
            return "Undecidable", {**base, "rule": "reciprocal-growth-unknown"}
        if p > 1:
            return "In", {**base, "rule": "linear-support-reciprocal", **_bound_evidence(tail, p, prec)}
        return "Out", {**base, "rule": "linear-support-reciprocal", **_divergence_evidence(tail, p, prec)}
    if kind == "log-recip-rank":
        return "Out", {**base, "rule": "log-decay-divergence", **_divergence_evidence(tail, p, prec)}
    if kind in ("constant", "linear-rank", "geom-growth"):
        return "Out", {**base, "rule": "non-null-terms", **_divergence_evidence(tail, p, prec)}
    raise ValueError(kind)


def _member_cap(tail: Tail, p: Fraction, base: dict, prec: int) -> tuple[str, dict]:
    """Intersection of l(q) over q > p (p = 0 gives the q > 0 intersection)."""
    kind = tail.term.kind
    sample_q = p + 1

    def in_evidence(rule: str) -> tuple[str, dict]:
        _, inner = _member_lp(tail, sample_q, {}, prec)
        return "In", {
            **base,
            "rule": rule,
            "all_q_above": format_rational(p),
            "sample_q": format_rational(sample_q),
            "sample": inner,
        }

    def out_evidence(rule: str, q: Fraction) -> tuple[str, dict]:
        verdict, inner = _member_lp(tail, q, {}, prec)
        if verdict != "Out":
            raise RuntimeError("cap witness exponent did not fail as expected")
        return "Out", {**base, "rule": rule, "witness_q": format_rational(q), "witness": inner}

    if kind == "geom-decay":
        return in_evidence("geometric-series")
    if kind == "power-rank":
        alpha = tail.term.alpha
        if alpha * p >= 1:
            return in_evidence("critical-exponent")
        return out_evidence("critical-exponent", (p + 1 / alpha) / 2)
    if kind == "recip-position":
        growth = tail.support.growth_kind()
        if growth == "exp":
            return in_evidence("exp-support-reciprocal")
        if tail.support.linear_form() is None:
            return "Undecidable", {**base, "rule": "reciprocal-growth-unknown"}
        if p >= 1:
            return in_evidence("linear-support-reciprocal")
        return out_evidence("linear-support-reciprocal", (p + 1) / 2)
    if kind in ("log-recip-rank", "constant", "linear-rank", "geom-growth"):
        return out_evidence("every-exponent-fails", p + 1)
    raise ValueError(kind)


def _decay_cutoffs(tail: Tail) -> list[dict]:
    """For each target M: a position cutoff beyond which |value| <= 1/M."""
    kind = tail.term.kind
    c_sq = _coeff_abs_sq(tail)
    out = []
    for target in EVIDENCE_TARGETS:
        m_sq = target * target
        if kind == "geom-decay":
            # |c| r^n <= 1/M  iff  c_sq * r^(2n) <= 1/M^2
            r2 = tail.term.ratio * tail.term.ratio
            n = 0
            acc = c_sq
            while acc * m_sq > 1:
                acc *= r2
                n += 1
            cutoff = max(n, tail.min_position)
        elif kind == "power-rank":
            # (j+1)^(2 alpha v) >= (M^2 c_sq)^v with alpha = u/v
            alpha = tail.term.alpha
            j = 0
            while Fraction(j + 1) ** (2 * alpha.numerator) < (m_sq * c_sq) ** alpha.denominator:
                j += 1
            cutoff = tail.support.element(max(j, tail.first_rank()))
        elif kind == "recip-position":
            # |c|/n <= 1/M iff n^2 >= M^2 c_sq
            n = 1
            while Fraction(n * n) < m_sq * c_sq:
                n += 1
            cutoff = max(n, tail.min_position)
        elif kind == "log-recip-rank":
            # log2(j+2) >= M |c|: crude j = 2^ceil(M|c|) - 2 via squares
            t = 1
            while Fraction(t * t) < m_sq * c_sq:
                t += 1
            j = (1 << t) - 2
            cutoff = tail.support.element(max(j, tail.first_rank()))
        else:
            raise ValueError(f"no decay cutoff for {kind}")
        out.append({"target": format_rational(target), "position": cutoff})
    return out


def _member_c0(tail: Tail, base: dict, prec: int) -> tuple[str, dict]:
    kind = tail.term.kind
    if kind in ("geom-decay", "power-rank", "recip-position", "log-recip-rank"):
        return "In", {**base, "rule": "value-decay", "cutoffs": _decay_cutoffs(tail)}
    if kind == "constant":
        return "Out", {
            **base,
            "rule": "uniform-floor",
            "floor_abs_sq": format_rational(_coeff_abs_sq(tail)),
            "sample_position": next(iter(tail.positions(1))),
        }
    if kind in ("linear-rank", "geom-growth"):
        _, ev = _member_linf(tail, {}, prec)
        return "Out", {**base, "rule": "unbounded", **{k: v for k, v in ev.items() if k not in ("rule",)}}
    raise ValueError(kind)


def _unbounded_checkpoints(tail: Tail) -> list[dict]:
    """Ranks where the unit-coefficient value reaches each target."""
    kind = tail.term.kind
    out = []
    for target in EVIDENCE_TARGETS:
        if kind == "linear-rank":
            rank = max(_ceil_frac(target) - 1, tail.first_rank())
        else:  # geom-growth: ratio^n >= M
            ratio = tail.term.ratio
            n = 0
            acc = Fraction(1)
            while acc < target:
                acc *= ratio
                n += 1
            rank = tail.support.first_rank_at_or_above(max(n, tail.min_position))
        out.append({"target": format_rational(target), "rank": rank})
    return out


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _member_linf(tail: Tail, base: dict, prec: int) -> tuple[str, dict]:
    kind = tail.term.kind
    if kind in ("geom-decay", "power-rank", "recip-position", "log-recip-rank", "constant"):
        return "In", {
            **base,
            "rule": "bounded",
            "bound_abs_sq": format_rational(_coeff_abs_sq(tail)),
        }
    if kind in ("linear-rank", "geom-growth"):
        return "Out", {
            **base,
            "rule": "unbounded",
            "normalized": True,
            "coeff_abs_sq": format_rational(_coeff_abs_sq(tail)),
            "checkpoints": _unbounded_checkpoints(tail),
        }
    raise ValueError(kind)


def _member_h(tail: Tail, base: dict, prec: int) -> tuple[str, dict]:
    kind = tail.term.kind
    if kind in ("geom-decay", "power-rank", "recip-position", "log-recip-rank", "constant"):
        return "In", {
            **base,
            "rule": "bounded-coefficients",
            "bound_abs_sq": format_rational(_coeff_abs_sq(tail)),
        }
    if kind == "linear-rank":
        # |value at position n| <= |c| (n+1), and (n+1)^(1/n) -> 1
        return "In", {
            **base,
            "rule": "poly-coefficients",
            "degree": 1,
            "scale_abs_sq": format_rational(_coeff_abs_sq(tail)),
        }
    if kind == "geom-growth":
        ratio = tail.term.ratio
        r = (1 + ratio) / 2
        c_sq = _coeff_abs_sq(tail)
        grow = (ratio / r) * (ratio / r)
        acc = c_sq
        n_star = 0
        while acc < 1:
            acc *= grow
            n_star += 1
            if n_star > 1 << 20:
                raise RuntimeError("runaway search for the limsup threshold")
        n_star = max(n_star, tail.min_position)
        return "Out", {
            **base,
            "rule": "root-limsup-exceeds",
            "r": format_rational(r),
            "n_star": n_star,
            "sample_position": tail.support.element(tail.support.first_rank_at_or_above(n_star)),
        }
    raise ValueError(kind)


def weighted_l1_partial(tail: Tail, k: int, start_rank: int, count: int, prec: int) -> CertifiedReal:
    """Certified Sum (n_j + 1)**k |value at rank j| over a rank range."""
    limit = tail.rank_limit()
    if limit is not None:
        count = max(0, min(count, limit - start_rank))
    parts = []
    for i, pos in enumerate(tail.support.elements(count, start_rank)):
        if tail.filters and not all(f.contains(pos) for f in tail.filters):
            continue
        val = term_value(tail.term, start_rank + i, pos)
        w = Fraction(pos + 1) ** k
        parts.append(val.abs_p_enclosure(Fraction(1), prec).mul_frac(w, prec))
    return interval_sum(parts, prec)


def weighted_divergence_checkpoint(
    tail: Tail, k: int, target: Fraction, prec: int = 128, max_terms: int = 1 << 20
) -> tuple[int, Fraction] | None:
    start = tail.first_rank()
    total = CertifiedReal.zero()
    count = 0
    batch = 8
    while count < max_terms:
        part = weighted_l1_partial(tail, k, start + count, batch, prec)
        total = total.add(part, prec)
        count += batch
        lower = total.lower_fraction()
        if lower >= target:
            return count, lower
        batch = min(batch * 2, 1 << 14)
    return None


def _member_ainf(tail: Tail, base: dict, prec: int) -> tuple[str, dict]:
    kind = tail.term.kind
    if kind == "geom-decay":
        samples = []
        for k in (0, 1):
            bound = _geom_weighted_bound(tail, k, prec)
            samples.append({"k": k, "sum_upper": dy_text(bound.hi)})
        return "In", {**base, "rule": "geometric-weighted-bound", "samples": samples}
    if kind == "power-rank":
        alpha = tail.term.alpha
        if tail.support.growth_kind() == "exp":
            k = 1
        else:
            k = max(1, _ceil_frac(alpha) - 1)
        return "Out", {**base, "rule": "poly-weight-divergence", "k": k, **_weighted_divergence_evidence(tail, k, prec)}
    if kind == "recip-position":
        return "Out", {**base, "rule": "poly-weight-divergence", "k": 1, **_weighted_divergence_evidence(tail, 1, prec)}
    if kind in ("log-recip-rank", "constant", "linear-rank", "geom-growth"):
        return "Out", {**base, "rule": "poly-weight-divergence", "k": 0, **_weighted_divergence_evidence(tail, 0, prec)}
    raise ValueError(kind)


def _weighted_divergence_evidence(tail: Tail, k: int, prec: int) -> dict:
    unit = _unit(tail)
    checkpoints = []
    for target in EVIDENCE_TARGETS:
        got = weighted_divergence_checkpoint(unit, k, target, prec)
        if got is None:
            raise RuntimeError(f"weighted divergence checkpoint at {target} ran out of budget")
        count, lower = got
        checkpoints.append({"target": format_rational(target), "count": count, "partial_lower": format_rational(lower)})
    return {
        "normalized": True,
        "coeff_abs_sq": format_rational(_coeff_abs_sq(tail)),
        "checkpoints": checkpoints,
    }


def _geom_weighted_bound(tail: Tail, k: int, prec: int) -> CertifiedReal:
    """Upper bound for Sum (n+1)**k |c| ratio**n over the support window."""
    ratio = tail.term.ratio
    n0 = tail.support.element(tail.first_rank())
    coeff_abs = SymValue(tail.term.coeff).abs_p_enclosure(Fraction(1), prec)
    r = CertifiedReal.from_fraction(ratio)
    if k == 0:
        total = r.ipow(n0, prec).div(CertifiedReal.from_int(1).sub(r, prec), prec)
    elif k == 1:
        # Sum_{n >= n0} (n+1) r^n = r^n0 ((n0+1) - n0 r) / (1-r)^2
        one_minus = CertifiedReal.from_int(1).sub(r, prec)
        numer = CertifiedReal.from_fraction(Fraction(n0 + 1)).sub(r.mul_frac(Fraction(n0), prec), prec)
        total = r.ipow(n0, prec).mul(numer, prec).div(one_minus.mul(one_minus, prec), prec)
    else:
        raise ValueError("only weights k = 0, 1 are sampled")
    return coeff_abs.mul(total, prec)
