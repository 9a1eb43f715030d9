"""Bijective enumeration of the finitely supported rational-complex sequences.

Code 1 is the zero sequence.  Any other code j peels apart as follows:
j - 2 splits into (length - 1, payload); the payload splits into one code per
coordinate; a coordinate code splits into codes for the real and imaginary
parts; and each part indexes the canonical fractions (sign-folded numerator
paired with denominator - 1, non-reduced pairs skipped).  The final
coordinate's code is shifted by one so that it can never be zero, which makes
the map onto sequences-with-nonzero-last-entry injective.

Everything is exact integer arithmetic; the canonical-fraction walk is
memoized globally so decoding the first ten thousand codes stays cheap.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .indexsets import pairing, unpair
from .scalars import Scalar
from .sequences import SymbolicSequence

__all__ = ["decode", "encode"]


def _pair0(x: int, y: int) -> int:
    return pairing(x + 1, y + 1)


def _unpair0(m: int) -> tuple[int, int]:
    i, j = unpair(m)
    return i - 1, j - 1


def _unfold_sign(m: int) -> int:
    # 0, 1, 2, 3, 4, ... -> 0, 1, -1, 2, -2, ...
    if m == 0:
        return 0
    half, odd = divmod(m, 2)
    return half + 1 if odd else -half


def _fold_sign(z: int) -> int:
    if z == 0:
        return 0
    return 2 * z - 1 if z > 0 else -2 * z


# Growing table of canonical fractions in pair-index order, plus the inverse
# map.  _CANON[r] is the fraction of rank r; _SCAN is the next pair index to
# inspect.
_CANON: list[Fraction] = []
_RANK: dict[Fraction, int] = {}
_SCAN = 0


def _extend_canonical(pair_limit: int) -> None:
    global _SCAN
    while _SCAN < pair_limit:
        num_code, den_code = _unpair0(_SCAN)
        num = _unfold_sign(num_code)
        den = den_code + 1
        if math.gcd(abs(num), den) == 1:
            q = Fraction(num, den)
            _RANK[q] = len(_CANON)
            _CANON.append(q)
        _SCAN += 1


def _fraction_by_rank(rank: int) -> Fraction:
    while len(_CANON) <= rank:
        _extend_canonical(_SCAN + 256 + 2 * _SCAN)
    return _CANON[rank]


def _rank_of_fraction(q: Fraction) -> int:
    if q not in _RANK:
        target = _pair0(_fold_sign(q.numerator), q.denominator - 1)
        _extend_canonical(target + 1)
    return _RANK[q]


def _scalar_by_code(code: int) -> Scalar:
    re_rank, im_rank = _unpair0(code)
    return Scalar(_fraction_by_rank(re_rank), _fraction_by_rank(im_rank))


def _code_of_scalar(v: Scalar) -> int:
    return _pair0(_rank_of_fraction(v.re), _rank_of_fraction(v.im))


def decode(j: int) -> SymbolicSequence:
    """The j-th finitely supported rational sequence, j >= 1."""
    if j < 1:
        raise ValueError("codes start at 1")
    if j == 1:
        return SymbolicSequence.zero()
    length_code, payload = _unpair0(j - 2)
    length = length_code + 1
    codes = []
    for _ in range(length - 1):
        head, payload = _unpair0(payload)
        codes.append(head)
    codes.append(payload)
    values = [_scalar_by_code(c) for c in codes[:-1]]
    values.append(_scalar_by_code(codes[-1] + 1))
    return SymbolicSequence.from_finite(
        (n, v) for n, v in enumerate(values) if not v.is_zero())


def encode(seq: SymbolicSequence) -> int:
    """Inverse of decode; the sequence must have no symbolic tails."""
    if seq.tails:
        raise ValueError("only finitely supported sequences have codes")
    if not seq.finite:
        return 1
    length = seq.max_finite_position() + 1
    by_pos = dict(seq.finite)
    codes = [_code_of_scalar(by_pos.get(n, Scalar.zero())) for n in range(length)]
    if codes[-1] == 0:
        raise AssertionError("nonzero last entry cannot have code 0")
    payload = codes[-1] - 1
    for head in reversed(codes[:-1]):
        payload = _pair0(head, payload)
    return _pair0(length - 1, payload) + 2
