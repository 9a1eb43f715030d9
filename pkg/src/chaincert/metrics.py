"""Certified metric computations on symbolic sequences.

Each space in the chain carries a concrete metric:

    l(p), p >= 1    d(x,y) = (Sum |x-y|^p)^(1/p)
    l(p), p < 1     d(x,y) = Sum |x-y|^p
    linf, c0, c00   d(x,y) = sup |x-y|
    cap(p), cap0    delta(x,y) = Sum_k 2^-k t_k/(1+t_k), t_k = d_{p+1/k}(x,y)
    Ainf, full      d(x,y) = Sum_n 2^-n |z(n)|/(1+|z(n)|)
    H               d(x,y) = Sum_k 2^-k min(1, Sum_n |z(n)| (k/(k+1))^n)

Distances come back as certified intervals of requested width.  Heads are
evaluated pointwise (overlapping supports add before taking absolute values);
remainders use per-term-class closed forms that work on ranks alone, so a
tight enclosure never materialises a deep tree vertex.
"""

from __future__ import annotations

from fractions import Fraction

from .dyadic import (
    DZERO,
    CertifiedReal,
    UndecidableComparison,
    dy_add,
    dy_cmp,
    dy_div,
    dy_sign,
    frac_pow_enclosure,
    frac_pow_exact,
    interval_max,
    interval_sum,
    log2_enclosure,
)
from .indexsets import ray_cut
from .sequences import SymbolicSequence, SymValue, Tail, tail_abs_p_partial
from .spaces import SpaceId


class NotInSpace(Exception):
    """Distance requested between points not both in the space."""


class TooCoarse(Exception):
    """No certified bound is available at the requested quality."""


_BIG_RANK_CAP = 64  # beyond this, position-exponential remainders underflow anyway


def distance(space: SpaceId, x: SymbolicSequence, y: SymbolicSequence, tol: Fraction) -> CertifiedReal:
    """Certified enclosure of d(x, y) with width at most tol."""
    z = x.sub(y)
    kind = space.kind
    if kind == "lp":
        out = _lp_distance(z, space.p, tol)
    elif kind in ("linf", "c0", "c00"):
        out = _sup_distance(z, tol)
    elif kind in ("cap", "cap0"):
        p = space.p if kind == "cap" else Fraction(0)
        out = _cap_distance(z, p, tol)
    elif kind in ("Ainf", "full"):
        out = _product_distance(z, tol)
    elif kind == "H":
        out = _disc_distance(z, tol)
    else:
        raise ValueError(kind)
    return out


def distance_cmp_frac(
    space: SpaceId, x: SymbolicSequence, y: SymbolicSequence, threshold: Fraction
) -> int:
    """-1/0/1 comparison of d(x, y) against threshold, certified.

    Raises UndecidableComparison when refinement bottoms out (callers treat
    that as "not provably below").
    """
    tol = threshold / 4
    floor = Fraction(1, 1 << 64)
    while True:
        try:
            enc = distance(space, x, y, tol)
        except TooCoarse as exc:
            raise UndecidableComparison(str(exc)) from exc
        got = enc.cmp_frac(threshold)
        if got is not None:
            return got
        if tol < floor:
            raise UndecidableComparison(f"d vs {threshold} undecided at width {tol}")
        tol /= 16


# --- head/remainder decomposition for sums over the support ---


def _collect_heads(z: SymbolicSequence, depth: int):
    """Positions to evaluate pointwise, plus per-tail remainder start ranks.

    Every position not evaluated lies strictly beyond every evaluated one, so
    remainder regions never overlap the head.
    """
    finite_positions = [n for n, _ in z.finite]
    cut = max(finite_positions, default=-1)
    heads = []
    for t in z.tails:
        fr = t.first_rank()
        lim = t.rank_limit()
        cnt = depth if lim is None else min(depth, lim - fr)
        pos = list(t.support.elements(cnt, fr))
        if pos:
            cut = max(cut, pos[-1])
        heads.append([t, fr, pos])
    for h in heads:
        t, fr, pos = h
        lim = t.rank_limit()
        guard = 0
        while True:
            nxt_rank = fr + len(pos)
            if lim is not None and nxt_rank >= lim:
                break
            nxt = t.support.element(nxt_rank)
            if nxt > cut:
                break
            pos.append(nxt)
            guard += 1
            if guard > 100_000:
                raise TooCoarse("support shapes too entangled to separate a head")
    all_positions = set(finite_positions)
    for _, _, pos in heads:
        all_positions.update(pos)
    rem = [(t, fr + len(pos)) for t, fr, pos in heads]
    return sorted(all_positions), rem


def _remainders_disjoint(rem, cut_hint: int) -> bool:
    infinite = []
    for t, r in rem:
        lim = t.rank_limit()
        if lim is not None and r >= lim:
            continue
        infinite.append(ray_cut(t.support, t.support.element(min(r, _BIG_RANK_CAP)) if r <= _BIG_RANK_CAP else cut_hint + 1))
    return all(
        infinite[i].known_disjoint(infinite[j])
        for i in range(len(infinite))
        for j in range(i + 1, len(infinite))
    )


def _position_floor(tail: Tail, rank: int, cap: int = _BIG_RANK_CAP) -> int:
    """Cheap lower bound for the support position at the given rank."""
    if tail.support.growth_kind() == "exp":
        return (1 << min(rank, cap)) - 1
    form = tail.support.linear_form()
    if form is not None:
        s0, d = form
        return s0 + d * rank
    return max(rank, tail.min_position)  # n_j >= j always


def _remainder_abs_p(tail: Tail, p: Fraction, rank: int, prec: int, ext: int = 0) -> CertifiedReal:
    """Enclosure of Sum_{j >= rank, j in window} |value at rank j| ** p.

    ext > 0 lets the slowly converging classes sum that many terms exactly
    before switching to the integral sandwich; those terms depend on the rank
    only, so no tree position is ever materialised."""
    lim = tail.rank_limit()
    if lim is not None and rank >= lim:
        return CertifiedReal.zero()
    kind = tail.term.kind
    coeff_p = _coeff_abs_p(tail, p, prec)
    lower_ok = lim is None and not tail.filters

    if kind == "geom-decay":
        nlow = _position_floor(tail, rank)
        ratio = tail.term.ratio
        rp = CertifiedReal.from_fraction(ratio).powq(p, prec)
        lead = CertifiedReal.from_fraction(ratio).ipow(nlow, prec).powq(p, prec)
        upper = coeff_p.mul(lead.div(CertifiedReal.from_int(1).sub(rp, prec), prec), prec)
        return _zero_to(upper)
    if kind == "power-rank":
        s = tail.term.alpha * p
        if s <= 1:
            raise NotInSpace(f"power-rank tail diverges in l({p})")
        mid, rank = _rank_only_midsum(tail, rank, ext, prec, lambda j: Fraction(j + 1), -s, coeff_p, lower_ok)
        j1 = Fraction(rank + 1)
        integral = CertifiedReal.from_fraction(j1).powq(1 - s, prec).mul_frac(1 / (s - 1))
        first = CertifiedReal.from_fraction(j1).powq(-s, prec)
        hi = coeff_p.mul(first.add(integral, prec), prec)
        tail_part = _span(coeff_p.mul(integral, prec), hi) if lower_ok else _zero_to(hi)
        return mid.add(tail_part, prec)
    if kind == "recip-position":
        growth = tail.support.growth_kind()
        if growth == "exp":
            r0 = max(rank, 1)
            half_p = CertifiedReal.from_fraction(Fraction(1, 2)).powq(p, prec)
            upper = coeff_p.mul(half_p.ipow(r0 - 1, prec).div(CertifiedReal.from_int(1).sub(half_p, prec), prec), prec)
            if rank == 0:
                upper = upper.add(coeff_p, prec)
            return _zero_to(upper)
        form = tail.support.linear_form()
        if form is None:
            raise TooCoarse("reciprocal tail with unknown growth")
        if p <= 1:
            raise NotInSpace(f"reciprocal tail on a linear support diverges in l({p})")
        s0, d = form
        mid, rank = _rank_only_midsum(tail, rank, ext, prec, lambda j: Fraction(s0 + d * j), -p, coeff_p, lower_ok)
        n0 = Fraction(s0 + d * rank)
        integral = CertifiedReal.from_fraction(n0).powq(1 - p, prec).mul_frac(Fraction(1, d) / (p - 1))
        first = CertifiedReal.from_fraction(n0).powq(-p, prec)
        hi = coeff_p.mul(first.add(integral, prec), prec)
        tail_part = _span(coeff_p.mul(integral, prec), hi) if lower_ok else _zero_to(hi)
        return mid.add(tail_part, prec)
    if kind == "constant":
        if lim is None:
            raise NotInSpace(f"constant tail diverges in l({p})")
        count = lim - rank
        if tail.filters:
            return _zero_to(coeff_p.mul_frac(Fraction(count)))
        return coeff_p.mul_frac(Fraction(count))
    if kind in ("log-recip-rank", "linear-rank", "geom-growth"):
        if lim is None:
            raise NotInSpace(f"{kind} tail diverges in l({p})")
        if lim - rank > (1 << 16):
            raise TooCoarse("windowed tail too long to sum directly")
        return tail_abs_p_partial(tail, p, rank, lim - rank, prec)
    raise ValueError(kind)


def _rank_only_midsum(
    tail: Tail, rank: int, ext: int, prec: int, base_of, expo: Fraction, coeff_p: CertifiedReal, lower_ok: bool
):
    """Sum ext terms coeff_p * base(j)**expo starting at rank.  The factors
    depend on the rank alone, so this is cheap at any depth."""
    if ext <= 0:
        return CertifiedReal.zero(), rank
    lim = tail.rank_limit()
    count = ext if lim is None else min(ext, lim - rank)
    parts = [frac_pow_enclosure(base_of(j), expo, prec) for j in range(rank, rank + count)]
    scaled = coeff_p.mul(interval_sum(parts, prec), prec)
    if not lower_ok:
        scaled = _zero_to(scaled)
    return scaled, rank + count


def _coeff_abs_p(tail: Tail, p: Fraction, prec: int):
    return SymValue(tail.term.coeff).abs_p_enclosure(p, prec)


def _zero_to(upper: CertifiedReal) -> CertifiedReal:
    return CertifiedReal(DZERO, upper.hi)


def _span(lo: CertifiedReal, hi: CertifiedReal) -> CertifiedReal:
    lo_end = lo.lo if dy_cmp(lo.lo, hi.hi) <= 0 else hi.hi
    return CertifiedReal(lo_end, hi.hi)


def _head_abs_p(z: SymbolicSequence, positions, p: Fraction, prec: int) -> CertifiedReal:
    parts = [z.value_at(n).abs_p_enclosure(p, prec) for n in positions]
    return interval_sum(parts, prec)


def _fast_const_window(z: SymbolicSequence, p: Fraction, prec: int) -> CertifiedReal | None:
    """Exact closed form for a single windowed constant tail over a linear
    support (this is how uniform averages of growing length stay cheap)."""
    if len(z.tails) != 1:
        return None
    t = z.tails[0]
    if t.term.kind != "constant" or t.filters or t.max_position is None:
        return None
    if t.support.linear_form() is None:
        return None
    if any(t.admits(n) for n, _ in z.finite):
        return None
    count = t.rank_limit() - t.first_rank()
    tail_sum = _coeff_abs_p(t, p, prec).mul_frac(Fraction(count))
    finite_sum = interval_sum(
        [SymbolicSequence.from_finite([(n, v)]).value_at(n).abs_p_enclosure(p, prec) for n, v in z.finite],
        prec,
    )
    return tail_sum.add(finite_sum, prec)


def _lp_distance(z: SymbolicSequence, p: Fraction, tol: Fraction) -> CertifiedReal:
    depth = 16
    prec = 128
    ext = 0
    for _ in range(24):
        fast = _fast_const_window(z, p, prec)
        if fast is not None:
            dist = _root_if_needed(fast.clamp_nonneg(), p, prec)
            if dist.width_leq(tol):
                return dist
            prec = min(prec * 2, 4096)
            continue
        positions, rem = _collect_heads(z, depth)
        head = _head_abs_p(z, positions, p, prec)
        rems = [_remainder_abs_p(t, p, r, prec, ext) for t, r in rem]
        if p > 1 and not _remainders_disjoint(rem, positions[-1] if positions else 0):
            # Minkowski fallback: d <= head^(1/p) + Sum rem_i^(1/p)
            head_root = _root_if_needed(head.clamp_nonneg(), p, prec)
            hi = head_root
            for rb in rems:
                hi = hi.add(_root_if_needed(rb.clamp_nonneg(), p, prec), prec)
            dist = CertifiedReal(head_root.lo, hi.hi)
        else:
            total = head
            for rb in rems:
                total = total.add(rb, prec)
            dist = _root_if_needed(total.clamp_nonneg(), p, prec)
        if dist.width_leq(tol):
            return dist
        depth = min(depth * 4, 4096)
        prec = min(prec * 2, 4096)
        ext = min(max(4096, ext * 4), 1 << 17)
    raise TooCoarse(f"l({p}) distance did not reach width {tol}")


def _root_if_needed(total: CertifiedReal, p: Fraction, prec: int) -> CertifiedReal:
    if p < 1:
        return total
    return total.powq(1 / p, prec)


def _sup_distance(z: SymbolicSequence, tol: Fraction) -> CertifiedReal:
    depth = 16
    prec = 128
    for _ in range(80):
        positions, rem = _collect_heads(z, depth)
        parts = []
        if not positions and not rem:
            return CertifiedReal.zero()
        for n in positions:
            parts.append(z.value_at(n).abs_sq_enclosure(prec).powq(Fraction(1, 2), prec))
        for t, r in rem:
            bound = _remainder_sup(t, r, prec)
            if bound is not None:
                parts.append(bound)
        sup = interval_max(parts) if parts else CertifiedReal.zero()
        if sup.width_leq(tol):
            return sup
        depth = min(depth * 4, 1 << 62)
        prec = min(prec * 2, 4096)
    raise TooCoarse(f"sup distance did not reach width {tol}")


def _remainder_sup(tail: Tail, rank: int, prec: int) -> CertifiedReal | None:
    lim = tail.rank_limit()
    if lim is not None and rank >= lim:
        return None
    kind = tail.term.kind
    coeff_abs = _coeff_abs_p(tail, Fraction(1), prec)
    if kind == "geom-decay":
        nlow = _position_floor(tail, rank)
        upper = coeff_abs.mul(CertifiedReal.from_fraction(tail.term.ratio).ipow(nlow, prec), prec)
        return _zero_to(upper)
    if kind == "power-rank":
        upper = coeff_abs.mul(CertifiedReal.from_fraction(Fraction(rank + 1)).powq(-tail.term.alpha, prec), prec)
        return _zero_to(upper)
    if kind == "recip-position":
        nlow = max(_position_floor(tail, rank), 1)
        return _zero_to(coeff_abs.mul_frac(Fraction(1, nlow)))
    if kind == "log-recip-rank":
        upper = coeff_abs.mul(log2_enclosure(Fraction(rank + 2), prec).recip(prec), prec)
        return _zero_to(upper)
    if kind == "constant":
        if tail.filters:
            return _zero_to(coeff_abs)
        return coeff_abs  # the sup over the remainder is exactly |c|
    raise NotInSpace(f"{kind} tail is unbounded")


def _phi(enc: CertifiedReal, prec: int) -> CertifiedReal:
    """t -> t/(1+t), applied endpoint-wise (it is increasing)."""
    one = (1, 0)
    lo = dy_div(enc.lo, dy_add(enc.lo, one, prec, True), prec, False)
    hi = dy_div(enc.hi, dy_add(enc.hi, one, prec, False), prec, True)
    ex = None
    if enc.exact is not None:
        ex = enc.exact / (1 + enc.exact)
    if dy_sign(lo) < 0:
        lo = DZERO
    if dy_cmp(lo, hi) > 0:
        lo = hi
    return CertifiedReal(lo, hi, exact=ex)


def _cap_distance(z: SymbolicSequence, p: Fraction, tol: Fraction) -> CertifiedReal:
    K = max(2, (Fraction(2) / tol).numerator.bit_length())
    inner_tol = tol / (4 * K)
    parts = []
    for k in range(1, K + 1):
        dk = _lp_distance(z, p + Fraction(1, k), inner_tol)
        parts.append(_phi(dk.clamp_nonneg(), 192).mul_frac(Fraction(1, 1 << k)))
    total = interval_sum(parts, 192)
    return total.add(CertifiedReal((0, 0), (1, -K)), 192)


def _product_distance(z: SymbolicSequence, tol: Fraction) -> CertifiedReal:
    N = max(2, (Fraction(2) / tol).numerator.bit_length() + 1)
    prec = max(128, 2 * N)
    positions = {n for n, _ in z.finite if n <= N}
    for t in z.tails:
        fr = t.first_rank()
        stop = t.support.first_rank_at_or_above(N + 1)
        lim = t.rank_limit()
        if lim is not None:
            stop = min(stop, lim)
        positions.update(t.support.elements(max(0, stop - fr), fr))
    parts = []
    for n in sorted(positions):
        val = z.value_at(n).abs_sq_enclosure(prec).powq(Fraction(1, 2), prec)
        parts.append(_phi(val, prec).mul_frac(Fraction(1, 1 << n)))
    total = interval_sum(parts, prec)
    return total.add(CertifiedReal((0, 0), (1, -N)), prec)


def _disc_weighted_l1(z: SymbolicSequence, k: int, depth: int, prec: int) -> tuple[CertifiedReal, bool]:
    """Enclosure of Sum_n |z(n)| r^n with r = k/(k+1); flag means the upper
    bound is honest (False: some tail's envelope diverges, upper is +inf)."""
    r = Fraction(k, k + 1)
    positions, rem = _collect_heads(z, depth)
    parts = []
    for n in positions:
        val = z.value_at(n).abs_sq_enclosure(prec).powq(Fraction(1, 2), prec)
        parts.append(val.mul(CertifiedReal.from_fraction(r).ipow(n, prec), prec))
    head = interval_sum(parts, prec)
    bounded = True
    total = head
    for t, rank in rem:
        env = _disc_envelope(t, r, rank, prec)
        if env is None:
            bounded = False
        else:
            total = total.add(env, prec)
    if not bounded:
        return CertifiedReal(head.lo, head.hi), False
    return total, True


def _disc_envelope(tail: Tail, r: Fraction, rank: int, prec: int) -> CertifiedReal | None:
    """Upper bound on the remainder of Sum |value| r^n, None if divergent."""
    lim = tail.rank_limit()
    if lim is not None and rank >= lim:
        return CertifiedReal.zero()
    kind = tail.term.kind
    coeff_abs = _coeff_abs_p(tail, Fraction(1), prec)
    nlow = _position_floor(tail, rank)
    rr = CertifiedReal.from_fraction(r)
    if kind in ("power-rank", "recip-position", "log-recip-rank", "constant"):
        # per-term factor besides |c| r^n is at most 1 on the remainder
        upper = coeff_abs.mul(rr.ipow(nlow, prec).div(CertifiedReal.from_int(1).sub(rr, prec), prec), prec)
        return _zero_to(upper)
    if kind == "geom-decay" or kind == "geom-growth":
        q = tail.term.ratio * r
        if q >= 1:
            return None
        qq = CertifiedReal.from_fraction(q)
        upper = coeff_abs.mul(qq.ipow(nlow, prec).div(CertifiedReal.from_int(1).sub(qq, prec), prec), prec)
        return _zero_to(upper)
    if kind == "linear-rank":
        # (j+1) <= n_j + 1, and Sum_{n >= n0} (n+1) r^n has a closed form
        one_minus = CertifiedReal.from_int(1).sub(rr, prec)
        numer = CertifiedReal.from_fraction(Fraction(nlow + 1)).sub(rr.mul_frac(Fraction(nlow), prec), prec)
        upper = coeff_abs.mul(rr.ipow(nlow, prec).mul(numer, prec).div(one_minus.mul(one_minus, prec), prec), prec)
        return _zero_to(upper)
    raise ValueError(kind)


def _disc_distance(z: SymbolicSequence, tol: Fraction) -> CertifiedReal:
    K = max(2, (Fraction(2) / tol).numerator.bit_length())
    prec = 192
    depth = 16
    for _ in range(60):
        parts = []
        width_ok = True
        for k in range(1, K + 1):
            inner, bounded = _disc_weighted_l1(z, k, depth, prec)
            inner = inner.clamp_nonneg()
            term = _min_with_one(inner, bounded)
            parts.append(term.mul_frac(Fraction(1, 1 << k)))
        total = interval_sum(parts, prec).add(CertifiedReal((0, 0), (1, -K)), prec)
        if total.width_leq(tol):
            return total
        depth = min(depth * 4, 1 << 20)
        prec = min(prec * 2, 4096)
    raise TooCoarse(f"disc distance did not reach width {tol}")


def _min_with_one(inner: CertifiedReal, bounded: bool) -> CertifiedReal:
    one = (1, 0)
    lo = inner.lo if dy_cmp(inner.lo, one) < 0 else one
    if not bounded:
        return CertifiedReal(lo, one)
    hi = inner.hi if dy_cmp(inner.hi, one) < 0 else one
    return CertifiedReal(lo, hi)


# --- pointwise modulus ---


def pointwise_modulus(space: SpaceId, n: int, dist: Fraction) -> Fraction:
    """An upper bound for |x(n) - y(n)| valid whenever d(x, y) <= dist."""
    if dist < 0:
        raise ValueError("distances are nonnegative")
    kind = space.kind
    if kind in ("linf", "c0", "c00"):
        return dist
    if kind == "lp":
        if space.p >= 1:
            return dist
        # |z(n)|^p <= dist, so |z(n)| <= dist^(1/p)
        return _frac_pow_upper(dist, 1 / space.p)
    if kind in ("cap", "cap0"):
        # the k = 1 term: 2^-1 t/(1+t) <= dist with t the l(p+1) distance
        if 2 * dist >= 1:
            raise TooCoarse("cap-metric modulus needs d < 1/2")
        return 2 * dist / (1 - 2 * dist)
    if kind in ("Ainf", "full"):
        w = (1 << n) * dist
        if w >= 1:
            raise TooCoarse("product-metric modulus needs 2^n d < 1")
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
        if best is None:
            raise TooCoarse("disc-metric modulus needs 2 d < 1")
        return best
    raise ValueError(kind)


def _frac_pow_upper(x: Fraction, e: Fraction) -> Fraction:
    exact = frac_pow_exact(x, e)
    if exact is not None:
        return exact
    return frac_pow_enclosure(x, e, 128).upper_fraction()
