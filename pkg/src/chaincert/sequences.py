"""Symbolic sequences: a finite part plus "tails" supported on infinite index
sets, evaluable exactly at any position and summable with certified bounds.

A tail assigns to the rank-j element n_j of its support a value drawn from a
small catalog of term shapes (geometric in the position, power decay in the
rank, reciprocal of the position, and so on).  Values are exact complex
rationals whenever that is affordable; otherwise they are linear combinations
of irrational atoms such as (j+1)**(-1/2) or 1/log2(j+2), kept symbolic so
that equality tests stay decidable and enclosures stay cheap.

Ranks are always computed against the tail's base support.  Windowing by
[min_position, max_position] and evaluation-only filters never re-rank, which
is what makes restriction an honest pointwise operation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .dyadic import (
    EXACT_POW_BIT_BUDGET,
    CertifiedReal,
    frac_pow_exact,
    interval_sum,
    log2_enclosure,
)
from .indexsets import IndexSet, Ray, RayCut, rank_of, ray_cut
from .scalars import Scalar, format_rational, parse_rational

TERM_KINDS = (
    "geom-decay",
    "power-rank",
    "recip-position",
    "log-recip-rank",
    "constant",
    "linear-rank",
    "geom-growth",
)


class UndecidableZeroTest(Exception):
    """A symbolic value could not be proved zero or nonzero."""


@dataclass(frozen=True)
class TailTerm:
    """Value shape for the rank-j element n_j of a support.

    geom-decay      coeff * ratio**n_j   with 0 < ratio < 1
    power-rank      coeff * (j+1)**(-alpha)
    recip-position  coeff / n_j          (support must avoid 0)
    log-recip-rank  coeff / log2(j+2)
    constant        coeff
    linear-rank     coeff * (j+1)
    geom-growth     coeff * ratio**n_j   with ratio > 1
    """

    kind: str
    coeff: Scalar
    ratio: Fraction | None = None
    alpha: Fraction | None = None

    def __post_init__(self) -> None:
        if self.kind not in TERM_KINDS:
            raise ValueError(f"unknown term kind {self.kind!r}")
        if self.kind == "geom-decay" and not (self.ratio and 0 < self.ratio < 1):
            raise ValueError("geom-decay needs ratio in (0, 1)")
        if self.kind == "geom-growth" and not (self.ratio and self.ratio > 1):
            raise ValueError("geom-growth needs ratio > 1")
        if self.kind == "power-rank" and not (self.alpha and self.alpha > 0):
            raise ValueError("power-rank needs alpha > 0")

    def with_coeff(self, coeff: Scalar) -> "TailTerm":
        return TailTerm(self.kind, coeff, self.ratio, self.alpha)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "coeff": self.coeff.to_json()}
        if self.ratio is not None:
            out["ratio"] = format_rational(self.ratio)
        if self.alpha is not None:
            out["alpha"] = format_rational(self.alpha)
        return out

    @staticmethod
    def from_json(obj: dict) -> "TailTerm":
        return TailTerm(
            obj["kind"],
            Scalar.from_json(obj["coeff"]),
            parse_rational(obj["ratio"]) if "ratio" in obj else None,
            parse_rational(obj["alpha"]) if "alpha" in obj else None,
        )


@dataclass(frozen=True)
class Tail:
    term: TailTerm
    support: IndexSet
    min_position: int = 0
    max_position: int | None = None
    filters: tuple[IndexSet, ...] = ()

    def __post_init__(self) -> None:
        if self.support.is_finite:
            raise ValueError("tail supports are infinite; use the finite part")
        if 0 < self.min_position <= self.support.min_element():
            # vacuous window; normalizing keeps equal tails structurally equal
            object.__setattr__(self, "min_position", 0)
        if self.term.kind == "recip-position":
            if max(self.min_position, self.support.min_element()) < 1:
                raise ValueError("reciprocal-position tails must avoid position 0")

    def first_rank(self) -> int:
        return self.support.first_rank_at_or_above(self.min_position)

    def rank_limit(self) -> int | None:
        """Exclusive upper rank bound from the window, None when unbounded."""
        if self.max_position is None:
            return None
        return self.support.first_rank_at_or_above(self.max_position + 1)

    def admits(self, n: int) -> bool:
        if n < self.min_position:
            return False
        if self.max_position is not None and n > self.max_position:
            return False
        if not self.support.contains(n):
            return False
        return all(f.contains(n) for f in self.filters)

    def positions(self, count: int, start_rank: int | None = None):
        start = self.first_rank() if start_rank is None else start_rank
        limit = self.rank_limit()
        if limit is not None:
            count = max(0, min(count, limit - start))
        return self.support.elements(count, start)

    def merge_key(self):
        return (
            self.term.kind,
            self.term.ratio,
            self.term.alpha,
            self.support,
            self.min_position,
            self.max_position,
            self.filters,
        )

    def scaled(self, c: Scalar) -> "Tail":
        return Tail(
            self.term.with_coeff(self.term.coeff * c),
            self.support,
            self.min_position,
            self.max_position,
            self.filters,
        )

    def to_json(self) -> dict:
        out = {
            "term": self.term.to_json(),
            "support": self.support.to_json(),
            "min_position": self.min_position,
        }
        if self.max_position is not None:
            out["max_position"] = self.max_position
        if self.filters:
            out["filters"] = [f.to_json() for f in self.filters]
        return out

    @staticmethod
    def from_json(obj: dict) -> "Tail":
        return Tail(
            TailTerm.from_json(obj["term"]),
            IndexSet.from_json(obj["support"]),
            obj.get("min_position", 0),
            obj.get("max_position"),
            tuple(IndexSet.from_json(f) for f in obj.get("filters", ())),
        )


# --- symbolic values ---
#
# Atom keys name positive real units:
#   ("pow", ratio, n)    ratio**n for a rational ratio, n possibly huge
#   ("rpow", m, q)       m**q for integer m >= 2 and non-integer rational q
#   ("log", m)           1/log2(m) for integer m >= 3, m not a power of two


@dataclass
class SymValue:
    rational: Scalar = field(default_factory=Scalar.zero)
    atoms: dict[tuple, Scalar] = field(default_factory=dict)

    def add_atom(self, key: tuple, coeff: Scalar) -> None:
        cur = self.atoms.get(key)
        new = cur + coeff if cur is not None else coeff
        if new.is_zero():
            self.atoms.pop(key, None)
        else:
            self.atoms[key] = new

    def add(self, other: "SymValue") -> "SymValue":
        out = SymValue(self.rational + other.rational, dict(self.atoms))
        for key, coeff in other.atoms.items():
            out.add_atom(key, coeff)
        return out

    def scale(self, c: Scalar) -> "SymValue":
        if c.is_zero():
            return SymValue()
        return SymValue(self.rational * c, {k: v * c for k, v in self.atoms.items()})

    def neg(self) -> "SymValue":
        return self.scale(Scalar.of(-1))

    def exact(self) -> Scalar | None:
        return self.rational if not self.atoms else None

    def enclosure(self, prec: int) -> tuple[CertifiedReal, CertifiedReal]:
        """(real part, imaginary part) as certified intervals."""
        re = CertifiedReal.from_fraction(self.rational.re)
        im = CertifiedReal.from_fraction(self.rational.im)
        for key, coeff in self.atoms.items():
            unit = atom_enclosure(key, prec)
            re = re.add(unit.mul_frac(coeff.re), prec)
            im = im.add(unit.mul_frac(coeff.im), prec)
        return re, im

    def abs_sq_enclosure(self, prec: int) -> CertifiedReal:
        ex = self.exact()
        if ex is not None:
            return CertifiedReal.from_fraction(ex.abs_sq())
        re, im = self.enclosure(prec)
        out = re.mul(re, prec).add(im.mul(im, prec), prec)
        return out.clamp_nonneg()

    def abs_p_enclosure(self, p: Fraction, prec: int) -> CertifiedReal:
        """|value| ** p as a certified interval."""
        ex = self.exact()
        if ex is not None:
            sq = ex.abs_sq()
            if sq == 0:
                return CertifiedReal.zero()
            exact = frac_pow_exact(sq, p / 2)
            if exact is not None:
                return CertifiedReal.from_fraction(exact)
        return self.abs_sq_enclosure(prec).powq(p / 2, prec)

    def is_zero(self) -> bool:
        if not self.atoms:
            return self.rational.is_zero()
        prec = 64
        while prec <= 4096:
            re, im = self.enclosure(prec)
            if not (re.contains_zero() and im.contains_zero()):
                return False
            prec *= 2
        folded = self._fold_exact()
        if folded is not None:
            return folded.is_zero()
        raise UndecidableZeroTest(f"cannot decide zero-ness of {self}")

    def _fold_exact(self) -> Scalar | None:
        total = self.rational
        for key, coeff in self.atoms.items():
            unit = atom_exact(key)
            if unit is None:
                return None
            total = total + coeff.mul_frac(unit)
        return total

    def to_json(self) -> dict:
        atoms = []
        for key, coeff in sorted(self.atoms.items(), key=lambda kv: repr(kv[0])):
            if key[0] == "pow":
                kj = ["pow", format_rational(key[1]), key[2]]
            elif key[0] == "rpow":
                kj = ["rpow", key[1], format_rational(key[2])]
            else:
                kj = ["log", key[1]]
            atoms.append([kj, coeff.to_json()])
        return {"rational": self.rational.to_json(), "atoms": atoms}

    @staticmethod
    def from_json(obj: dict) -> "SymValue":
        out = SymValue(Scalar.from_json(obj["rational"]))
        for kj, coeff in obj["atoms"]:
            if kj[0] == "pow":
                key = ("pow", parse_rational(kj[1]), kj[2])
            elif kj[0] == "rpow":
                key = ("rpow", kj[1], parse_rational(kj[2]))
            else:
                key = ("log", kj[1])
            out.add_atom(key, Scalar.from_json(coeff))
        return out


def atom_exact(key: tuple) -> Fraction | None:
    kind = key[0]
    if kind == "pow":
        _, ratio, n = key
        bits = n * (ratio.numerator.bit_length() + ratio.denominator.bit_length())
        if bits <= 16 * EXACT_POW_BIT_BUDGET:
            return ratio**n
        return None
    if kind == "rpow":
        _, m, q = key
        return frac_pow_exact(Fraction(m), q)
    return None


def atom_enclosure(key: tuple, prec: int) -> CertifiedReal:
    kind = key[0]
    if kind == "pow":
        _, ratio, n = key
        return CertifiedReal.from_fraction(ratio).ipow(n, prec)
    if kind == "rpow":
        _, m, q = key
        return CertifiedReal.from_fraction(Fraction(m)).powq(q, prec)
    if kind == "log":
        return log2_enclosure(Fraction(key[1]), prec).recip(prec)
    raise ValueError(f"unknown atom {key!r}")


def tail_values(tail: Tail, count: int, start_rank: int | None = None):
    """Yield (position, value) along the support without membership lookups.

    Walking ranks in order sidesteps the per-position rank_of cost that
    value_at pays; positions a filter rejects contribute zero, matching
    value_at's semantics.
    """
    start = tail.first_rank() if start_rank is None else start_rank
    limit = tail.rank_limit()
    if limit is not None:
        count = max(0, min(count, limit - start))
    rank = start
    for n in tail.support.elements(count, start):
        if tail.filters and not all(f.contains(n) for f in tail.filters):
            yield n, SymValue()
        else:
            yield n, term_value(tail.term, rank, n)
        rank += 1


def term_value(term: TailTerm, rank: int, position: int) -> SymValue:
    """Exact symbolic value of a tail term at (rank, position)."""
    c = term.coeff
    kind = term.kind
    if kind in ("geom-decay", "geom-growth"):
        ratio = term.ratio
        bits = position * (ratio.numerator.bit_length() + ratio.denominator.bit_length())
        if bits <= EXACT_POW_BIT_BUDGET:
            return SymValue(c.mul_frac(ratio**position))
        out = SymValue()
        out.add_atom(("pow", ratio, position), c)
        return out
    if kind == "power-rank":
        base = rank + 1
        q = -term.alpha
        if base == 1:
            return SymValue(c)
        exact = frac_pow_exact(Fraction(base), q)
        if exact is not None:
            return SymValue(c.mul_frac(exact))
        out = SymValue()
        out.add_atom(("rpow", base, q), c)
        return out
    if kind == "recip-position":
        return SymValue(c.mul_frac(Fraction(1, position)))
    if kind == "log-recip-rank":
        m = rank + 2
        if m & (m - 1) == 0:
            return SymValue(c.mul_frac(Fraction(1, m.bit_length() - 1)))
        out = SymValue()
        out.add_atom(("log", m), c)
        return out
    if kind == "constant":
        return SymValue(c)
    if kind == "linear-rank":
        return SymValue(c.mul_frac(Fraction(rank + 1)))
    raise ValueError(kind)


# --- sequences ---


@dataclass(frozen=True)
class SymbolicSequence:
    """finite part + sum of tails; overlaps add."""

    finite: tuple[tuple[int, Scalar], ...] = ()
    tails: tuple[Tail, ...] = ()

    def __post_init__(self) -> None:
        cleaned = tuple(sorted((n, v) for n, v in self.finite if not v.is_zero()))
        if len({n for n, _ in cleaned}) != len(cleaned):
            raise ValueError("duplicate positions in finite part")
        object.__setattr__(self, "finite", cleaned)

    @staticmethod
    def zero() -> "SymbolicSequence":
        return SymbolicSequence()

    @staticmethod
    def from_finite(pairs) -> "SymbolicSequence":
        return SymbolicSequence(tuple(pairs), ())

    @staticmethod
    def from_tail(tail: Tail) -> "SymbolicSequence":
        if tail.term.coeff.is_zero():
            return SymbolicSequence()
        return SymbolicSequence((), (tail,))

    def is_zero_sequence(self) -> bool:
        return not self.finite and not self.tails

    def add(self, other: "SymbolicSequence") -> "SymbolicSequence":
        vals = dict(self.finite)
        for n, v in other.finite:
            w = vals.get(n, Scalar.zero()) + v
            if w.is_zero():
                vals.pop(n, None)
            else:
                vals[n] = w
        merged: dict[tuple, Tail] = {}
        for t in self.tails + other.tails:
            key = t.merge_key()
            if key in merged:
                coeff = merged[key].term.coeff + t.term.coeff
                merged[key] = Tail(
                    t.term.with_coeff(coeff),
                    t.support,
                    t.min_position,
                    t.max_position,
                    t.filters,
                )
            else:
                merged[key] = t
        tails = tuple(t for t in merged.values() if not t.term.coeff.is_zero())
        return SymbolicSequence(tuple(vals.items()), tails)

    def neg(self) -> "SymbolicSequence":
        return self.scale(Scalar.of(-1))

    def sub(self, other: "SymbolicSequence") -> "SymbolicSequence":
        return self.add(other.neg())

    def scale(self, c: Scalar) -> "SymbolicSequence":
        if c.is_zero():
            return SymbolicSequence()
        return SymbolicSequence(
            tuple((n, v * c) for n, v in self.finite),
            tuple(t.scaled(c) for t in self.tails),
        )

    def value_at(self, n: int) -> SymValue:
        out = SymValue()
        for pos, v in self.finite:
            if pos == n:
                out = out.add(SymValue(v))
                break
        for t in self.tails:
            if t.admits(n):
                j = rank_of(t.support, n)
                out = out.add(term_value(t.term, j, n))
        return out

    def max_finite_position(self) -> int:
        """Largest position of the finite part, -1 when empty."""
        return self.finite[-1][0] if self.finite else -1

    def restrict(self, B: IndexSet) -> "SymbolicSequence":
        """Pointwise product with the indicator of B."""
        finite = tuple((n, v) for n, v in self.finite if B.contains(n))
        tails = []
        for t in self.tails:
            eff = ray_cut(t.support, t.min_position)
            if isinstance(B, Ray) or (isinstance(B, RayCut) and B.parent == t.support):
                # over this tail's own support, [start, inf) cuts act as a
                # plain window, so no filter is needed
                lo = max(t.min_position, B.start)
                if t.max_position is not None and lo > t.max_position:
                    continue
                tails.append(Tail(t.term, t.support, lo, t.max_position, t.filters))
            elif eff.is_subset_of(B):
                tails.append(t)
            elif eff.known_disjoint(B):
                continue
            else:
                tails.append(Tail(t.term, t.support, t.min_position, t.max_position, t.filters + (B,)))
        return SymbolicSequence(finite, tuple(tails))

    def to_json(self) -> dict:
        return {
            "finite": [[n, v.to_json()] for n, v in self.finite],
            "tails": [t.to_json() for t in self.tails],
        }

    @staticmethod
    def from_json(obj: dict) -> "SymbolicSequence":
        return SymbolicSequence(
            tuple((n, Scalar.from_json(v)) for n, v in obj["finite"]),
            tuple(Tail.from_json(t) for t in obj["tails"]),
        )


# --- certified sums of |tail value| ** p over rank ranges ---


@dataclass(frozen=True)
class SeriesBound:
    kind: str  # "convergent" | "divergent" | "unknown"
    bound: CertifiedReal | None = None


def tail_abs_p_partial(tail: Tail, p: Fraction, start_rank: int, count: int, prec: int) -> CertifiedReal:
    """Certified Sum |value at rank j| ** p over j in [start, start+count)."""
    limit = tail.rank_limit()
    if limit is not None:
        count = max(0, min(count, limit - start_rank))
    parts = []
    positions = tail.support.elements(count, start_rank)
    for i, pos in enumerate(positions):
        if tail.filters and not all(f.contains(pos) for f in tail.filters):
            continue
        val = term_value(tail.term, start_rank + i, pos)
        parts.append(val.abs_p_enclosure(p, prec))
    return interval_sum(parts, prec)


def series_tail_bound(tail: Tail, p: Fraction, start_rank: int, prec: int) -> SeriesBound:
    """Classify Sum_{ranks >= start_rank in window} |value| ** p.

    "convergent" comes with a certified upper bound (valid under filters,
    which only remove terms).  "divergent" is only asserted for unfiltered,
    unbounded windows.  Everything else is "unknown".
    """
    if p <= 0:
        raise ValueError("p must be positive")
    limit = tail.rank_limit()
    if limit is not None and start_rank >= limit:
        return SeriesBound("convergent", CertifiedReal.zero())
    kind = tail.term.kind
    coeff_p = _coeff_abs_p(tail.term.coeff, p, prec)

    if kind == "geom-decay":
        return SeriesBound("convergent", _geom_tail_bound(tail, p, start_rank, coeff_p, prec))
    if kind == "power-rank":
        s = tail.term.alpha * p
        if s > 1:
            return SeriesBound("convergent", _power_tail_bound(s, start_rank, coeff_p, prec))
        return _divergent_or_unknown(tail)
    if kind == "recip-position":
        growth = tail.support.growth_kind()
        if growth == "exp":
            return SeriesBound("convergent", _recip_exp_tail_bound(p, start_rank, coeff_p, prec))
        form = tail.support.linear_form()
        if form is not None and p > 1:
            return SeriesBound("convergent", _recip_linear_tail_bound(form, p, start_rank, coeff_p, prec))
        if form is not None and p <= 1:
            return _divergent_or_unknown(tail)
        return SeriesBound("unknown")
    if kind == "constant":
        if limit is not None:
            # filters only remove terms, the count bound stays valid
            return SeriesBound("convergent", coeff_p.mul_frac(Fraction(limit - start_rank)))
        return _divergent_or_unknown(tail)
    if kind in ("log-recip-rank", "linear-rank", "geom-growth"):
        if limit is not None:
            capped = _capped_direct_sum(tail, p, start_rank, limit, prec)
            if capped is not None:
                return SeriesBound("convergent", capped)
            return SeriesBound("unknown")
        return _divergent_or_unknown(tail)
    return SeriesBound("unknown")


def _divergent_or_unknown(tail: Tail) -> SeriesBound:
    if tail.max_position is None and not tail.filters:
        return SeriesBound("divergent")
    if tail.max_position is not None:
        return SeriesBound("unknown")
    return SeriesBound("unknown")


def _coeff_abs_p(coeff: Scalar, p: Fraction, prec: int) -> CertifiedReal:
    return SymValue(coeff).abs_p_enclosure(p, prec)


def _geom_tail_bound(tail: Tail, p: Fraction, start_rank: int, coeff_p: CertifiedReal, prec: int) -> CertifiedReal:
    # positions increase by >= 1 per rank, so the terms are dominated by the
    # geometric series with ratio r**p starting at r**(p * n_start)
    ratio = tail.term.ratio
    n_start = tail.support.element(start_rank)
    rp = CertifiedReal.from_fraction(ratio).powq(p, prec)
    lead = CertifiedReal.from_fraction(ratio).ipow(n_start, prec).powq(p, prec)
    denom = CertifiedReal.from_int(1).sub(rp, prec)
    return coeff_p.mul(lead.div(denom, prec), prec)


def _power_tail_bound(s: Fraction, start_rank: int, coeff_p: CertifiedReal, prec: int) -> CertifiedReal:
    # integral test: Sum_{j >= j0} (j+1)**(-s) <= (j0+1)**(-s) + (j0+1)**(1-s)/(s-1)
    j1 = Fraction(start_rank + 1)
    head = CertifiedReal.from_fraction(j1).powq(-s, prec)
    integral = CertifiedReal.from_fraction(j1).powq(1 - s, prec).mul_frac(1 / (s - 1))
    return coeff_p.mul(head.add(integral, prec), prec)


def _recip_exp_tail_bound(p: Fraction, start_rank: int, coeff_p: CertifiedReal, prec: int) -> CertifiedReal:
    # exp growth gives n_j >= 2**j - 1 >= 2**(j-1) for j >= 1, so
    # Sum_{j >= j0} n_j**(-p) <= Sum_{j >= j0} 2**(-(j-1)p) = 2**(-(j0-1)p)/(1 - 2**(-p))
    j0 = max(start_rank, 1)
    half_p = CertifiedReal.from_fraction(Fraction(1, 2)).powq(p, prec)
    lead = half_p.ipow(j0 - 1, prec)
    denom = CertifiedReal.from_int(1).sub(half_p, prec)
    out = coeff_p.mul(lead.div(denom, prec), prec)
    if start_rank == 0:
        # the rank-0 term has position >= 1, bound it by |c|**p
        out = out.add(coeff_p, prec)
    return out


def _recip_linear_tail_bound(
    form: tuple[int, int], p: Fraction, start_rank: int, coeff_p: CertifiedReal, prec: int
) -> CertifiedReal:
    # positions are start + step*j; integral test for p > 1
    s0, d = form
    n0 = Fraction(s0 + d * start_rank)
    if n0 < 1:
        raise ValueError("reciprocal tail hit position < 1")
    head = CertifiedReal.from_fraction(n0).powq(-p, prec)
    integral = CertifiedReal.from_fraction(n0).powq(1 - p, prec).mul_frac(Fraction(1, d) / (p - 1))
    return coeff_p.mul(head.add(integral, prec), prec)


def _capped_direct_sum(tail: Tail, p: Fraction, start_rank: int, limit: int, prec: int) -> CertifiedReal | None:
    if limit - start_rank > (1 << 16):
        return None
    return tail_abs_p_partial(tail, p, start_rank, limit - start_rank, prec)


def _coeff_p_lower(coeff: Scalar, p: Fraction, prec: int) -> Fraction:
    """Rational lower bound of |coeff|**p."""
    sq = coeff.abs_sq()
    exact = frac_pow_exact(sq, p / 2)
    if exact is not None:
        return exact
    enc = CertifiedReal.from_fraction(sq).powq(p / 2, prec)
    return max(Fraction(0), enc.lower_fraction())


def logrecip_divergence_count(coeff_p_lower: Fraction, p: Fraction, target: Fraction) -> tuple[int, Fraction] | None:
    """Rank count N with N * coeff_p_lower / bitlen(N+1)**ceil(p) >= target.

    For j < N we have log2(j+2) <= bitlen(N+1) =: t, so every term of the
    log-reciprocal series is at least coeff_p_lower / t**ceil(p); the grouped
    bound avoids evaluating half a million log enclosures one by one.
    """
    if coeff_p_lower <= 0:
        return None
    q = -(-p.numerator // p.denominator)
    n = 1
    while True:
        t = (n + 1).bit_length()
        lower = n * coeff_p_lower / Fraction(t) ** q
        if lower >= target:
            return n, lower
        if n > 1 << 62:
            return None
        n *= 2


def divergence_checkpoint(
    tail: Tail, p: Fraction, target: Fraction, prec: int = 128, max_terms: int = 1 << 20
) -> tuple[int, Fraction] | None:
    """Smallest checked rank count whose certified partial sum reaches target.

    Returns (count, certified rational lower bound >= target) with the sum
    taken over ranks [first_rank, first_rank + count), or None if the budget
    runs out first.
    """
    start = tail.first_rank()
    if (tail.term.kind == "log-recip-rank" and not tail.filters
            and tail.max_position is None and start == 0):
        cp = _coeff_p_lower(tail.term.coeff, p, prec)
        hit = logrecip_divergence_count(cp, p, target)
        if hit is not None:
            return hit
    total = CertifiedReal.zero()
    count = 0
    batch = 8
    while count < max_terms:
        step = min(batch, max_terms - count)
        part = tail_abs_p_partial(tail, p, start + count, step, prec)
        total = total.add(part, prec)
        count += step
        lower = total.lower_fraction()
        if lower >= target:
            return count, lower
        batch = min(batch * 2, 1 << 14)
        limit = tail.rank_limit()
        if limit is not None and start + count >= limit:
            return None
    return None
