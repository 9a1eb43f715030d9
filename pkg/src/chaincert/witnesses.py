"""Witness sequences for chain pairs.

For every pair of chain spaces Y strictly below X and every infinite index
set A, build a sequence supported inside A that belongs to X but not to Y.
Each adjacent pair has a fixed single-tail recipe; a non-adjacent pair reuses
the recipe of (Y, successor(Y)), which lands in a smaller space than X and
therefore still works.
"""

from __future__ import annotations

from fractions import Fraction

from .certificates import make_certificate
from .indexsets import IndexSet, sparsify
from .scalars import Scalar
from .sequences import SymbolicSequence, Tail, TailTerm
from .spaces import ChainParams, SpaceId, chain_index, chain_lt, member

__all__ = ["NotAChainPair", "certify_witness", "witness", "witness_tail"]


class NotAChainPair(ValueError):
    """The two spaces are not in strict chain order."""


_ONE = Fraction(1)
_HALF = Fraction(1, 2)
_TWO = Fraction(2)


def _recipe(step: int, params: ChainParams) -> tuple[TailTerm, bool]:
    """Term template and sparsify flag for the adjacent pair at chain index `step`.

    `step` is the index of Y; the partner is the successor space.  Rank-based
    exponents follow the midpoint choices: to escape an intersection space
    while staying in the next lp we aim halfway between the two exponents.
    """
    a, b = params.a, params.b
    if step == 0:
        # c00 -> Ainf: geometric decay has infinite support but all
        # weighted sums (n+1)^k 2^(-n) converge.
        return TailTerm(kind="geom-decay", coeff=Scalar.one(), ratio=_HALF), False
    if step == 1:
        # Ainf -> cap0: 1/n_j on a sparsified set. n_j >= 2^j kills every
        # lp sum, while (n_j+1)/n_j stays near 1, so the k=1 weight fails.
        return TailTerm(kind="recip-position", coeff=Scalar.one()), True
    if step == 2:
        return TailTerm(kind="power-rank", coeff=Scalar.one(), alpha=_TWO / a), False
    if step == 3:
        return TailTerm(kind="power-rank", coeff=Scalar.one(), alpha=_ONE / a), False
    if step == 4:
        return TailTerm(kind="power-rank", coeff=Scalar.one(), alpha=_TWO / (a + b)), False
    if step == 5:
        return TailTerm(kind="power-rank", coeff=Scalar.one(), alpha=_ONE / b), False
    if step == 6:
        # cap(b) -> c0: 1/log2(j+2) tends to zero slower than any power.
        return TailTerm(kind="log-recip-rank", coeff=Scalar.one()), False
    if step == 7:
        return TailTerm(kind="constant", coeff=Scalar.one()), False
    if step == 8:
        # linf -> H: coefficients j+1 grow, but (j+1)^(1/n_j) -> 1 because
        # positions grow at least linearly in rank.
        return TailTerm(kind="linear-rank", coeff=Scalar.one()), False
    if step == 9:
        return TailTerm(kind="geom-growth", coeff=Scalar.one(), ratio=_TWO), False
    raise AssertionError(f"no adjacent recipe at chain index {step}")


def witness_tail(small: SpaceId, large: SpaceId, support: IndexSet,
                 params: ChainParams | None = None) -> Tail:
    """The single tail realizing `witness`; see there."""
    params = params or ChainParams()
    if not chain_lt(small, large, params):
        raise NotAChainPair(
            f"{small.text(params)} is not strictly below {large.text(params)}")
    step = chain_index(small, params)
    term, sparse = _recipe(step, params)
    if sparse:
        support = sparsify(support)
    return Tail(term=term, support=support)


def witness(small: SpaceId, large: SpaceId, support: IndexSet,
            params: ChainParams | None = None) -> SymbolicSequence:
    """A sequence in `large` but not in `small`, supported inside `support`.

    `support` must be infinite.  The result is a single symbolic tail whose
    membership verdicts (In `large`, Out `small`) are checkable by
    `spaces.member`; for a pair that is not adjacent in the chain the recipe
    of (small, successor(small)) is returned, which is contained in every
    space above the successor.
    """
    return SymbolicSequence.from_tail(
        witness_tail(small, large, support, params))


def certify_witness(small: SpaceId, large: SpaceId, support: IndexSet,
                    params: ChainParams | None = None,
                    seed: int | None = None) -> dict:
    """Certificate for one witness: In X, Out Y, supported inside `support`.

    The membership evidence is embedded verbatim so an independent checker
    can replay it; the support samples pin the containment claim to concrete
    coordinates (the tail's support may be a sparsified subset of the
    requested set).
    """
    params = params or ChainParams()
    tail = witness_tail(small, large, support, params)
    seq = SymbolicSequence.from_tail(tail)
    in_x = member(seq, large)
    if not in_x.is_in:
        raise RuntimeError(f"witness not certified In {large.text(params)}")
    out_y = member(seq, small)
    if not out_y.is_out:
        raise RuntimeError(f"witness not certified Out {small.text(params)}")
    samples = list(tail.positions(16))
    for n in samples:
        if not support.contains(n):
            raise RuntimeError(f"support sample {n} escapes the requested set")
    trial = {
        "Y": small.to_json(),
        "X": large.to_json(),
        "support": support.to_json(),
        "witness": tail.to_json(),
        "in_X": in_x.evidence,
        "out_Y": out_y.evidence,
        "support_samples": samples,
    }
    claim = {
        "statement": "the displayed tail lies in X but not in Y and is "
                     "supported inside the requested index set",
        "pair": [small.text(params), large.text(params)],
    }
    return make_certificate("witness", params, claim, seed=seed, trials=[trial])
