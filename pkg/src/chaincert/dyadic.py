"""Certified real arithmetic on dyadic intervals.

A dyadic number is a pair (m, e) of integers denoting m * 2**e.  Keeping the
exponent as a plain integer (rather than materialising the fraction) lets the
library work with quantities like 2**(-2**500), which show up as soon as
geometric terms are evaluated deep inside a binary-tree index set.

Every rounded operation takes an explicit precision (mantissa bits) and a
direction, and rounds outward, so intervals built from these primitives always
enclose the true value.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

Dyadic = tuple[int, int]

DZERO: Dyadic = (0, 0)

# Comparisons refine until decided or the interval width drops below this.
WIDTH_FLOOR_BITS = 64


class UndecidableComparison(Exception):
    """Interval comparison still ambiguous at the precision floor."""


def dy_normalize(m: int, e: int) -> Dyadic:
    if m == 0:
        return DZERO
    shift = (m & -m).bit_length() - 1
    if shift:
        return (m >> shift, e + shift)
    return (m, e)


def dy_round(m: int, e: int, prec: int, up: bool) -> Dyadic:
    """Round m*2**e to at most prec mantissa bits, toward -inf or +inf."""
    if m == 0:
        return DZERO
    bl = m.bit_length() if m > 0 else (-m).bit_length()
    if bl <= prec:
        return dy_normalize(m, e)
    shift = bl - prec
    q, r = divmod(m, 1 << shift)
    if r and up:
        q += 1
    return dy_normalize(q, e + shift)


def dy_neg(a: Dyadic) -> Dyadic:
    return (-a[0], a[1])


def dy_sign(a: Dyadic) -> int:
    return (a[0] > 0) - (a[0] < 0)


def dy_mul2exp(a: Dyadic, k: int) -> Dyadic:
    return a if a[0] == 0 else (a[0], a[1] + k)


def dy_add(a: Dyadic, b: Dyadic, prec: int, up: bool) -> Dyadic:
    m1, e1 = a
    m2, e2 = b
    if m1 == 0:
        return dy_round(m2, e2, prec, up)
    if m2 == 0:
        return dy_round(m1, e1, prec, up)
    if e1 < e2:
        m1, e1, m2, e2 = m2, e2, m1, e1
    gap = e1 - e2
    bl2 = m2.bit_length() if m2 > 0 else (-m2).bit_length()
    if gap <= prec + bl2 + 8:
        return dy_round((m1 << gap) + m2, e2, prec, up)
    # b is negligible at this precision: round a and nudge one ulp outward
    # when dropping b would otherwise move the result the wrong way.
    q, eq = dy_round(m1, e1, prec, up)
    if up and m2 > 0:
        q += 1
    elif not up and m2 < 0:
        q -= 1
    return dy_normalize(q, eq)


def dy_sub(a: Dyadic, b: Dyadic, prec: int, up: bool) -> Dyadic:
    return dy_add(a, dy_neg(b), prec, up)


def dy_mul(a: Dyadic, b: Dyadic, prec: int, up: bool) -> Dyadic:
    if a[0] == 0 or b[0] == 0:
        return DZERO
    return dy_round(a[0] * b[0], a[1] + b[1], prec, up)


def dy_div(a: Dyadic, b: Dyadic, prec: int, up: bool) -> Dyadic:
    if a[0] == 0:
        return DZERO
    if b[0] == 0:
        raise ZeroDivisionError("dyadic division by zero")
    m1, e1 = a
    m2, e2 = b
    if m2 < 0:
        m1, m2 = -m1, -m2
    bl1 = m1.bit_length() if m1 > 0 else (-m1).bit_length()
    s = max(0, prec + m2.bit_length() - bl1 + 4)
    q, r = divmod(m1 << s, m2)
    if r and up:
        q += 1
    return dy_round(q, e1 - e2 - s, prec, up)


def dy_cmp(a: Dyadic, b: Dyadic) -> int:
    """Exact comparison; never materialises huge shifts."""
    s1, s2 = dy_sign(a), dy_sign(b)
    if s1 != s2:
        return (s1 > s2) - (s1 < s2)
    if s1 == 0:
        return 0
    m1, e1 = a
    m2, e2 = b
    # magnitude order: value in [2**(o-1), 2**o)
    o1 = e1 + (m1 if m1 > 0 else -m1).bit_length()
    o2 = e2 + (m2 if m2 > 0 else -m2).bit_length()
    if o1 != o2:
        mag = 1 if o1 > o2 else -1
        return mag * s1
    # equal orders: exponent gap is bounded by mantissa sizes, safe to align
    if e1 >= e2:
        m1 <<= e1 - e2
    else:
        m2 <<= e2 - e1
    return (m1 > m2) - (m1 < m2)


def dy_cmp_frac(a: Dyadic, x: Fraction) -> int:
    """Exact comparison of m*2**e with a fraction."""
    p, q = x.numerator, x.denominator
    s1 = dy_sign(a)
    s2 = (p > 0) - (p < 0)
    if s1 != s2:
        return (s1 > s2) - (s1 < s2)
    if s1 == 0:
        return 0
    m, e = a
    # compare m*q*2**e with p
    o1 = e + (m if m > 0 else -m).bit_length() + q.bit_length()
    o2 = (p if p > 0 else -p).bit_length()
    if o1 < o2 - 1:
        return -s1
    if o1 > o2 + 1:
        return s1
    lhs = m * q
    if e >= 0:
        lhs <<= e
        rhs = p
    else:
        rhs = p << -e
    return (lhs > rhs) - (lhs < rhs)


def dy_from_fraction(x: Fraction, prec: int, up: bool) -> Dyadic:
    p, q = x.numerator, x.denominator
    if p == 0:
        return DZERO
    if q == 1:
        return dy_round(p, 0, prec, up)
    s = max(0, prec + q.bit_length() - (p if p > 0 else -p).bit_length() + 4)
    m, r = divmod(p << s, q)
    if r and up:
        m += 1
    return dy_round(m, -s, prec, up)


def dy_to_fraction(a: Dyadic) -> Fraction:
    m, e = a
    if e >= 0:
        return Fraction(m << e, 1)
    return Fraction(m, 1 << -e)


def dy_text(a: Dyadic, prec: int = 64, up: bool = True) -> str:
    """Render as ``m*2^e`` with the mantissa rounded outward to prec bits.

    The exponent stays an integer no matter how extreme, so values like
    2**(-2**500) print in a few hundred characters instead of overflowing
    the interpreter's digit limit.
    """
    m, e = dy_round(a[0], a[1], prec, up)
    if m == 0:
        return "0"
    if e == 0:
        return str(m)
    return f"{m}*2^{e}"


def parse_dy_text(s: str) -> Dyadic:
    if "*2^" in s:
        ms, es = s.split("*2^", 1)
        return dy_normalize(int(ms), int(es))
    return dy_normalize(int(s), 0)


def dy_iroot(a: Dyadic, n: int, prec: int, up: bool) -> Dyadic:
    """n-th root of a nonnegative dyadic, directed rounding."""
    m, e = a
    if m < 0:
        raise ValueError("root of negative dyadic")
    if m == 0:
        return DZERO
    r = e % n
    m <<= r
    e -= r
    s = max(0, ((prec + 2) * n - m.bit_length()) // n + 1)
    t = m << (n * s)
    root, exact = gmpy2.iroot(gmpy2.mpz(t), n)
    root = int(root)
    if up and not exact:
        root += 1
    return dy_round(root, e // n - s, prec, up)


def dy_ipow(a: Dyadic, k: int, prec: int, up: bool) -> Dyadic:
    """a**k for integer k >= 0 and a >= 0, directed rounding per step.

    k may be astronomically large; cost is O(log k) rounded multiplies.
    """
    if k == 0:
        return (1, 0)
    if a[0] < 0:
        raise ValueError("dy_ipow expects a nonnegative base")
    if a[0] == 0:
        return DZERO
    # error budget: ~2*bit_length(k) rounded multiplies, each off by at most
    # one ulp, so guard bits need only the log of that count
    work = prec + 2 * k.bit_length().bit_length() + 8
    result: Dyadic = (1, 0)
    base = a
    kk = k
    while kk:
        # a power of two stays exact under exponent arithmetic alone
        if base[0] == 1:
            result = dy_mul(result, (1, base[1] * kk), work, up)
            break
        # once the base underflows the working precision, finish with pure
        # exponent bounds: 2**(top-1) <= base < 2**top, so base**kk is
        # squeezed between two explicit powers of two (both positive, which
        # keeps tiny values distinguishable from zero downstream)
        top = base[1] + base[0].bit_length()
        if top < -(work + 8) and result[0] > 0:
            r_top = result[1] + result[0].bit_length()
            if up:
                return (1, r_top + top * kk)
            return (1, r_top - 1 + (top - 1) * kk)
        if kk & 1:
            result = dy_mul(result, base, work, up)
        kk >>= 1
        if kk:
            base = dy_mul(base, base, work, up)
    return dy_round(result[0], result[1], prec, up)


@dataclass(frozen=True)
class CertifiedReal:
    """Closed interval [lo, hi] with dyadic endpoints enclosing a real."""

    lo: Dyadic
    hi: Dyadic
    exact: Fraction | None = None  # set when the enclosed value is known exactly

    def __post_init__(self) -> None:
        if dy_cmp(self.lo, self.hi) > 0:
            raise ValueError(f"empty interval: {self.lo} > {self.hi}")

    # --- constructors ---

    @staticmethod
    def from_fraction(x: Fraction, prec: int = 64) -> "CertifiedReal":
        if x.denominator & (x.denominator - 1) == 0:
            d = dy_normalize(x.numerator, -(x.denominator.bit_length() - 1))
            return CertifiedReal(d, d, exact=x)
        return CertifiedReal(
            dy_from_fraction(x, prec, False), dy_from_fraction(x, prec, True), exact=x
        )

    @staticmethod
    def from_int(n: int) -> "CertifiedReal":
        return CertifiedReal.from_fraction(Fraction(n))

    @staticmethod
    def zero() -> "CertifiedReal":
        return CertifiedReal(DZERO, DZERO, exact=Fraction(0))

    @staticmethod
    def point(d: Dyadic) -> "CertifiedReal":
        return CertifiedReal(d, d, exact=dy_to_fraction(d) if abs(d[1]) < 4096 else None)

    # --- arithmetic ---

    def add(self, other: "CertifiedReal", prec: int = 64) -> "CertifiedReal":
        ex = None
        if self.exact is not None and other.exact is not None:
            ex = self.exact + other.exact
        return CertifiedReal(
            dy_add(self.lo, other.lo, prec, False),
            dy_add(self.hi, other.hi, prec, True),
            exact=ex,
        )

    def sub(self, other: "CertifiedReal", prec: int = 64) -> "CertifiedReal":
        ex = None
        if self.exact is not None and other.exact is not None:
            ex = self.exact - other.exact
        return CertifiedReal(
            dy_sub(self.lo, other.hi, prec, False),
            dy_sub(self.hi, other.lo, prec, True),
            exact=ex,
        )

    def neg(self) -> "CertifiedReal":
        ex = -self.exact if self.exact is not None else None
        return CertifiedReal(dy_neg(self.hi), dy_neg(self.lo), exact=ex)

    def mul(self, other: "CertifiedReal", prec: int = 64) -> "CertifiedReal":
        cands_lo = []
        cands_hi = []
        for x in (self.lo, self.hi):
            for y in (other.lo, other.hi):
                cands_lo.append(dy_mul(x, y, prec, False))
                cands_hi.append(dy_mul(x, y, prec, True))
        lo = min(cands_lo, key=_dy_key)
        hi = max(cands_hi, key=_dy_key)
        ex = None
        if self.exact is not None and other.exact is not None:
            ex = self.exact * other.exact
        return CertifiedReal(lo, hi, exact=ex)

    def mul_frac(self, c: Fraction, prec: int = 64) -> "CertifiedReal":
        return self.mul(CertifiedReal.from_fraction(c, prec), prec)

    def div(self, other: "CertifiedReal", prec: int = 64) -> "CertifiedReal":
        if dy_sign(other.lo) <= 0 <= dy_sign(other.hi):
            raise ZeroDivisionError("division by interval containing zero")
        cands_lo = []
        cands_hi = []
        for x in (self.lo, self.hi):
            for y in (other.lo, other.hi):
                cands_lo.append(dy_div(x, y, prec, False))
                cands_hi.append(dy_div(x, y, prec, True))
        ex = None
        if self.exact is not None and other.exact is not None and other.exact != 0:
            ex = self.exact / other.exact
        return CertifiedReal(min(cands_lo, key=_dy_key), max(cands_hi, key=_dy_key), exact=ex)

    def recip(self, prec: int = 64) -> "CertifiedReal":
        return CertifiedReal.from_int(1).div(self, prec)

    def abs(self) -> "CertifiedReal":
        if dy_sign(self.lo) >= 0:
            return self
        if dy_sign(self.hi) <= 0:
            return self.neg()
        hi = max(dy_neg(self.lo), self.hi, key=_dy_key)
        ex = abs(self.exact) if self.exact is not None else None
        return CertifiedReal(DZERO, hi, exact=ex)

    def clamp_nonneg(self) -> "CertifiedReal":
        """Raise the lower endpoint to 0 for quantities known to be >= 0."""
        if dy_sign(self.lo) >= 0:
            return self
        if dy_sign(self.hi) < 0:
            raise ValueError("clamp_nonneg on a surely negative interval")
        ex = self.exact if self.exact is not None and self.exact >= 0 else None
        return CertifiedReal(DZERO, self.hi, exact=ex)

    def root(self, n: int, prec: int = 64) -> "CertifiedReal":
        if dy_sign(self.lo) < 0:
            raise ValueError("root of an interval with negative part")
        ex = None
        if self.exact is not None:
            ex = _frac_root_exact(self.exact, n)
        return CertifiedReal(
            dy_iroot(self.lo, n, prec, False), dy_iroot(self.hi, n, prec, True), exact=ex
        )

    def ipow(self, k: int, prec: int = 64) -> "CertifiedReal":
        """Integer power for a nonnegative interval; k may be negative."""
        if dy_sign(self.lo) < 0:
            raise ValueError("ipow expects a nonnegative interval")
        if k == 0:
            return CertifiedReal.from_int(1)
        if k < 0:
            return self.ipow(-k, prec).recip(prec)
        ex = None
        if self.exact is not None and k * max(
            self.exact.numerator.bit_length(), self.exact.denominator.bit_length()
        ) <= 4096:
            ex = self.exact ** k
        return CertifiedReal(
            dy_ipow(self.lo, k, prec, False), dy_ipow(self.hi, k, prec, True), exact=ex
        )

    def powq(self, expo: Fraction, prec: int = 64) -> "CertifiedReal":
        """Rational power for a nonnegative interval."""
        u, v = expo.numerator, expo.denominator
        if v == 1:
            return self.ipow(u, prec)
        if u >= 0:
            return self.ipow(u, prec + 8).root(v, prec)
        return self.ipow(-u, prec + 8).root(v, prec + 8).recip(prec)

    # --- queries ---

    def width_leq(self, tol: Fraction) -> bool:
        w = dy_sub(self.hi, self.lo, 128, True)
        return dy_cmp_frac(w, tol) <= 0

    def contains_zero(self) -> bool:
        return dy_sign(self.lo) <= 0 <= dy_sign(self.hi)

    def overlaps(self, other: "CertifiedReal") -> bool:
        return dy_cmp(self.lo, other.hi) <= 0 and dy_cmp(other.lo, self.hi) <= 0

    def cmp_frac(self, x: Fraction) -> int | None:
        """-1 if surely < x, 1 if surely > x, 0 if exactly x, None if unresolved."""
        if self.exact is not None:
            d = self.exact - x
            return (d > 0) - (d < 0)
        if dy_cmp_frac(self.hi, x) < 0:
            return -1
        if dy_cmp_frac(self.lo, x) > 0:
            return 1
        if dy_cmp_frac(self.lo, x) == 0 and dy_cmp_frac(self.hi, x) == 0:
            return 0
        return None

    def lower_fraction(self) -> Fraction:
        return dy_to_fraction(self.lo)

    def upper_fraction(self) -> Fraction:
        return dy_to_fraction(self.hi)

    def to_json(self) -> dict:
        return {"lo": [str(self.lo[0]), self.lo[1]], "hi": [str(self.hi[0]), self.hi[1]]}

    @staticmethod
    def from_json(obj: dict) -> "CertifiedReal":
        lo = (int(obj["lo"][0]), int(obj["lo"][1]))
        hi = (int(obj["hi"][0]), int(obj["hi"][1]))
        return CertifiedReal(lo, hi)


_dy_key = functools.cmp_to_key(dy_cmp)


def interval_sum(parts: list[CertifiedReal], prec: int = 64) -> CertifiedReal:
    lo = DZERO
    hi = DZERO
    exact: Fraction | None = Fraction(0)
    for p in parts:
        lo = dy_add(lo, p.lo, prec, False)
        hi = dy_add(hi, p.hi, prec, True)
        exact = exact + p.exact if (exact is not None and p.exact is not None) else None
    return CertifiedReal(lo, hi, exact=exact)


def interval_max(parts: list[CertifiedReal]) -> CertifiedReal:
    if not parts:
        return CertifiedReal.zero()
    lo = parts[0].lo
    hi = parts[0].hi
    for p in parts[1:]:
        if dy_cmp(p.lo, lo) > 0:
            lo = p.lo
        if dy_cmp(p.hi, hi) > 0:
            hi = p.hi
    return CertifiedReal(lo, hi)


def interval_min_with_one(x: CertifiedReal) -> CertifiedReal:
    one = (1, 0)
    lo = x.lo if dy_cmp(x.lo, one) < 0 else one
    hi = x.hi if dy_cmp(x.hi, one) < 0 else one
    return CertifiedReal(lo, hi)


def _frac_root_exact(x: Fraction, n: int) -> Fraction | None:
    if x < 0:
        return None
    if x == 0:
        return Fraction(0)
    pn, pe = gmpy2.iroot(gmpy2.mpz(x.numerator), n)
    qn, qe = gmpy2.iroot(gmpy2.mpz(x.denominator), n)
    if pe and qe:
        return Fraction(int(pn), int(qn))
    return None


EXACT_POW_BIT_BUDGET = 4096


def frac_pow_exact(base: Fraction, expo: Fraction) -> Fraction | None:
    """base**expo as an exact fraction, or None when irrational/too large."""
    if base < 0:
        raise ValueError("negative base")
    if base == 0:
        if expo <= 0:
            raise ZeroDivisionError("0 ** nonpositive")
        return Fraction(0)
    u, v = expo.numerator, expo.denominator
    size = max(base.numerator.bit_length(), base.denominator.bit_length())
    if abs(u) * size > EXACT_POW_BIT_BUDGET:
        return None
    powed = base ** u
    if v == 1:
        return powed
    return _frac_root_exact(powed, v)


def frac_pow_enclosure(base: Fraction, expo: Fraction, prec: int = 64) -> CertifiedReal:
    """Certified enclosure of base**expo for base >= 0.

    The exponent numerator may be a huge integer (positions deep in a branch);
    cost stays logarithmic in it.
    """
    ex = frac_pow_exact(base, expo)
    if ex is not None:
        return CertifiedReal.from_fraction(ex, prec)
    return CertifiedReal.from_fraction(base, prec + 8).powq(expo, prec)


def log2_enclosure(x: Fraction, prec: int = 64) -> CertifiedReal:
    """Certified enclosure of log2(x) for rational x > 0.

    Bit-by-bit extraction: square a dyadic interval for y in [1, 4), emit a
    bit per halving.  Working precision is doubled on the rare ambiguous
    crossing; powers of two short-circuit to the exact answer.
    """
    if x <= 0:
        raise ValueError("log2 of nonpositive value")
    p, q = x.numerator, x.denominator
    if p == 1 and q & (q - 1) == 0:
        return CertifiedReal.from_fraction(Fraction(-(q.bit_length() - 1)))
    if q == 1 and p & (p - 1) == 0:
        return CertifiedReal.from_fraction(Fraction(p.bit_length() - 1))

    # integer part e0: largest e with 2**e <= x
    e0 = p.bit_length() - q.bit_length()
    if e0 >= 0:
        if (q << e0) > p:
            e0 -= 1
    else:
        if q > (p << -e0):
            e0 -= 1
    y0 = x / Fraction(2) ** e0
    assert 1 <= y0 < 2

    work = 2 * prec + 16
    for _attempt in range(8):
        y = CertifiedReal.from_fraction(y0, work)
        bits = 0
        ok = True
        for _i in range(prec):
            y = y.mul(y, work)
            two = (1, 1)
            if dy_cmp(y.lo, two) >= 0:
                bits = bits * 2 + 1
                y = CertifiedReal(dy_mul2exp(y.lo, -1), dy_mul2exp(y.hi, -1))
            elif dy_cmp(y.hi, two) < 0:
                bits = bits * 2
            else:
                ok = False
                break
        if ok:
            lo = Fraction(e0) + Fraction(bits, 1 << prec)
            return CertifiedReal(
                dy_from_fraction(lo, prec + 8, False),
                dy_from_fraction(lo + Fraction(1, 1 << prec), prec + 8, True),
            )
        work *= 2
    raise UndecidableComparison(f"log2({x}) bit extraction failed to converge")


def refine_cmp_frac(evaluate, threshold: Fraction, start_prec: int = 32) -> int:
    """Refine evaluate(prec) -> CertifiedReal until its order against
    threshold is decided.  Returns -1/0/1; raises UndecidableComparison at the
    width floor."""
    prec = start_prec
    floor = Fraction(1, 1 << WIDTH_FLOOR_BITS)
    while True:
        val = evaluate(prec)
        c = val.cmp_frac(threshold)
        if c is not None:
            return c
        if val.width_leq(floor):
            raise UndecidableComparison(
                f"comparison against {threshold} unresolved at width 2^-{WIDTH_FLOOR_BITS}"
            )
        prec *= 2
