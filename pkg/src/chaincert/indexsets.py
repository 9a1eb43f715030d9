"""Index sets over N0: explicit sets, rays, progressions, and the binary-tree
families used to build uncountably many almost-disjoint infinite supports.

Tree vertices are heap-coded: code(root) = 0, code(s + "0") = 2c + 1,
code(s + "1") = 2c + 2.  Equivalently the vertex reached by bit string s of
length d has code 2**d - 1 + int(s, 2), which is what makes deep vertices
cheap to materialise and to test for branch membership.

Every infinite index set enumerates strictly increasingly with rank-j element
n_j >= j.  Sets carry a certified growth class: "exp" guarantees
n_j >= 2**j - 1, which is what makes reciprocal-position tails summable in
every ell^p.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from math import gcd, isqrt

MATERIALIZE_BIT_BUDGET = 1 << 21


class MaterializationLimit(Exception):
    """Asked to materialise a vertex too deep to hold as an integer."""


class SameBranch(Exception):
    """Branch intersection is only defined for distinct branches."""


# --- Cantor pairing on N x N (1-based), onto N0 ---


def pairing(i: int, j: int) -> int:
    if i < 1 or j < 1:
        raise ValueError("pairing is defined for i, j >= 1")
    s = i + j - 2
    return s * (s + 1) // 2 + (i - 1)


def unpair(m: int) -> tuple[int, int]:
    if m < 0:
        raise ValueError("unpair is defined on N0")
    s = (isqrt(8 * m + 1) - 1) // 2
    r = m - s * (s + 1) // 2
    return (r + 1, s - r + 1)


# --- heap coding of tree vertices ---


def tree_code(bits: str) -> int:
    d = len(bits)
    return (1 << d) - 1 + (int(bits, 2) if d else 0)


def node_depth_and_path(code: int) -> tuple[int, str]:
    if code < 0:
        raise ValueError("vertex codes live in N0")
    d = (code + 1).bit_length() - 1
    offset = code - ((1 << d) - 1)
    return d, format(offset, f"0{d}b") if d else ""


# --- eventually periodic branches ---


def _primitive_word(w: str) -> str:
    n = len(w)
    for d in range(1, n + 1):
        if n % d == 0 and w == w[:d] * (n // d):
            return w[:d]
    return w


@dataclass(frozen=True)
class BranchId:
    """Eventually periodic 0/1 branch, stored in canonical form.

    Canonical means the period is primitive and the prefix is shortest: any
    prefix bit equal to the period's last bit is absorbed by rotating the
    period.  Text form is "prefix|period", e.g. "01|10" or "|0".
    """

    prefix: str
    period: str

    def __post_init__(self) -> None:
        if not self.period or set(self.prefix + self.period) - {"0", "1"}:
            raise ValueError(f"bad branch data {self.prefix!r}|{self.period!r}")
        p, w = self.prefix, _primitive_word(self.period)
        while p and p[-1] == w[-1]:
            w = w[-1] + w[:-1]
            p = p[:-1]
        object.__setattr__(self, "prefix", p)
        object.__setattr__(self, "period", w)

    @staticmethod
    def parse(text: str) -> "BranchId":
        if "|" not in text:
            raise ValueError(f"branch text must look like 'prefix|period': {text!r}")
        pre, per = text.split("|", 1)
        return BranchId(pre, per)

    def text(self) -> str:
        return f"{self.prefix}|{self.period}"

    def bit(self, i: int) -> int:
        if i < len(self.prefix):
            return int(self.prefix[i])
        return int(self.period[(i - len(self.prefix)) % len(self.period)])

    def bits(self, count: int) -> str:
        if count <= len(self.prefix):
            return self.prefix[:count]
        reps = (count - len(self.prefix)) // len(self.period) + 1
        return (self.prefix + self.period * reps)[:count]

    def bits_range(self, lo: int, hi: int) -> str:
        """Bits lo..hi (exclusive) of the infinite branch word, O(hi - lo)."""
        if hi <= lo:
            return ""
        pre, per = self.prefix, self.period
        head = pre[lo:hi]
        if hi <= len(pre):
            return head
        start = max(lo, len(pre)) - len(pre)
        delta = hi - len(pre) - start
        phase = start % len(per)
        return head + (per[phase:] + per * (delta // len(per) + 1))[:delta]

    def path_int(self, depth: int) -> int:
        """The first `depth` bits as an integer, amortized O(growth).

        Vertex codes at depth d are 2**d - 1 + path_int(d), and membership
        tests compare against this integer, so it is cached per branch and
        only ever extended by the missing bit range.
        """
        if depth <= 0:
            return 0
        cur = _PATH_INTS.get(self)
        if cur is None:
            cur = [0, 0]
            _PATH_INTS[self] = cur
        if cur[0] < depth:
            chunk = self.bits_range(cur[0], depth)
            cur[1] = (cur[1] << len(chunk)) | int(chunk, 2)
            cur[0] = depth
            return cur[1]
        return cur[1] >> (cur[0] - depth)

    def __str__(self) -> str:
        return self.text()


_PATH_INTS: dict["BranchId", list] = {}


def node_to_branch(code: int) -> BranchId:
    """A branch passing through the given vertex: its path continued by 0s."""
    _, path = node_depth_and_path(code)
    return BranchId(path, "0")


def first_divergence(k1: BranchId, k2: BranchId) -> int | None:
    """Index of the first differing bit, or None when the branches coincide."""
    if k1 == k2:
        return None
    l0 = max(len(k1.prefix), len(k2.prefix))
    period = len(k1.period) * len(k2.period) // gcd(len(k1.period), len(k2.period))
    for i in range(l0 + period):
        if k1.bit(i) != k2.bit(i):
            return i
    return None


# --- index sets ---


class IndexSet:
    """Base for decidable subsets of N0 with ranked enumeration."""

    is_finite = False

    def contains(self, n: int) -> bool:
        raise NotImplementedError

    def element(self, rank: int) -> int:
        raise NotImplementedError

    def elements(self, count: int, start_rank: int = 0):
        for r in range(start_rank, start_rank + count):
            yield self.element(r)

    def min_element(self) -> int:
        return self.element(0)

    def first_rank_at_or_above(self, n: int) -> int:
        """Smallest rank whose element is >= n."""
        rank = 0
        for el in self.elements_unbounded():
            if el >= n:
                return rank
            rank += 1
        raise RuntimeError("unreachable for infinite sets")

    def elements_unbounded(self):
        r = 0
        while True:
            yield self.element(r)
            r += 1

    def growth_kind(self) -> str:
        """"exp" certifies n_j >= 2**j - 1; "lin" only n_j >= j."""
        return "lin"

    def linear_form(self) -> tuple[int, int] | None:
        """(start, step) when the enumeration is exactly start + step*rank."""
        return None

    def enclosing_branch(self) -> BranchId | None:
        return None

    def is_subset_of(self, other: "IndexSet") -> bool:
        """Sound but incomplete structural subset test."""
        if self == other:
            return True
        if isinstance(other, Ray):
            return self.min_element() >= other.start
        if isinstance(other, Explicit):
            if not self.is_finite:
                return False
            return all(other.contains(x) for x in self.all_elements())
        if isinstance(other, RayCut):
            return self.min_element() >= other.start and self.is_subset_of(other.parent)
        if isinstance(self, Explicit):
            return all(other.contains(x) for x in self.elems)
        if isinstance(self, (PartitionCell, Sparsified)):
            return self.parent.is_subset_of(other)
        if isinstance(self, RayCut):
            return self.parent.is_subset_of(other)
        if isinstance(self, Progression) and isinstance(other, Progression):
            return (
                self.step % other.step == 0
                and self.start >= other.start
                and (self.start - other.start) % other.step == 0
            )
        if isinstance(self, Ray) and isinstance(other, Progression):
            return other.step == 1 and self.start >= other.start
        return False

    def known_disjoint(self, other: "IndexSet") -> bool:
        """Sound but incomplete disjointness test."""
        if isinstance(self, Explicit):
            return not any(other.contains(x) for x in self.elems)
        if isinstance(other, Explicit):
            return other.known_disjoint(self)
        if (
            isinstance(self, PartitionCell)
            and isinstance(other, PartitionCell)
            and self.parent == other.parent
            and self.index != other.index
        ):
            return True
        b1 = self.enclosing_branch()
        b2 = other.enclosing_branch()
        if b1 is not None and b2 is not None and b1 != b2:
            shared_max = branch_intersection(b1, b2).max_element()
            if self.min_element() > shared_max or other.min_element() > shared_max:
                return True
        if isinstance(self, (Sparsified, RayCut)) and self.parent.known_disjoint(other):
            return True
        if isinstance(other, (Sparsified, RayCut)) and other.parent.known_disjoint(self):
            return True
        if isinstance(self, (Ray, Progression)) and isinstance(other, (Ray, Progression)):
            s1, d1 = self.linear_form()
            s2, d2 = other.linear_form()
            g = gcd(d1, d2)
            return (s1 - s2) % g != 0
        return False

    def all_elements(self) -> tuple[int, ...]:
        raise ValueError("not a finite set")

    def to_json(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_json(obj: dict) -> "IndexSet":
        kind = obj["kind"]
        if kind == "explicit":
            return Explicit(tuple(obj["elements"]))
        if kind == "ray":
            return Ray(obj["start"])
        if kind == "progression":
            return Progression(obj["start"], obj["step"])
        if kind == "branch":
            return BranchSet(BranchId.parse(obj["branch"]))
        if kind == "cell":
            return PartitionCell(IndexSet.from_json(obj["parent"]), obj["index"])
        if kind == "sparsified":
            return Sparsified(IndexSet.from_json(obj["parent"]))
        if kind == "ray-cut":
            return ray_cut(IndexSet.from_json(obj["parent"]), obj["start"])
        raise ValueError(f"unknown index set kind {kind!r}")


@dataclass(frozen=True)
class Explicit(IndexSet):
    elems: tuple[int, ...]

    is_finite = True

    def __post_init__(self) -> None:
        if list(self.elems) != sorted(set(self.elems)):
            object.__setattr__(self, "elems", tuple(sorted(set(self.elems))))
        if any(x < 0 for x in self.elems):
            raise ValueError("index sets live in N0")

    def contains(self, n: int) -> bool:
        return n in self.elems

    def element(self, rank: int) -> int:
        return self.elems[rank]

    def size(self) -> int:
        return len(self.elems)

    def max_element(self) -> int:
        return self.elems[-1] if self.elems else -1

    def all_elements(self) -> tuple[int, ...]:
        return self.elems

    def first_rank_at_or_above(self, n: int) -> int:
        for r, el in enumerate(self.elems):
            if el >= n:
                return r
        return len(self.elems)

    def to_json(self) -> dict:
        return {"kind": "explicit", "elements": list(self.elems)}


@dataclass(frozen=True)
class Ray(IndexSet):
    start: int

    def contains(self, n: int) -> bool:
        return n >= self.start

    def element(self, rank: int) -> int:
        return self.start + rank

    def first_rank_at_or_above(self, n: int) -> int:
        return max(0, n - self.start)

    def linear_form(self) -> tuple[int, int]:
        return (self.start, 1)

    def to_json(self) -> dict:
        return {"kind": "ray", "start": self.start}


@dataclass(frozen=True)
class Progression(IndexSet):
    start: int
    step: int

    def __post_init__(self) -> None:
        if self.step < 1:
            raise ValueError("progression step must be >= 1")

    def contains(self, n: int) -> bool:
        return n >= self.start and (n - self.start) % self.step == 0

    def element(self, rank: int) -> int:
        return self.start + self.step * rank

    def first_rank_at_or_above(self, n: int) -> int:
        if n <= self.start:
            return 0
        return -((self.start - n) // self.step)

    def linear_form(self) -> tuple[int, int]:
        return (self.start, self.step)

    def to_json(self) -> dict:
        return {"kind": "progression", "start": self.start, "step": self.step}


@dataclass(frozen=True)
class BranchSet(IndexSet):
    branch: BranchId

    def contains(self, n: int) -> bool:
        d = (n + 1).bit_length() - 1
        return n + 1 - (1 << d) == self.branch.path_int(d)

    def element(self, rank: int) -> int:
        if rank > MATERIALIZE_BIT_BUDGET:
            raise MaterializationLimit(f"branch vertex at depth {rank}")
        return (1 << rank) - 1 + self.branch.path_int(rank)

    def elements(self, count: int, start_rank: int = 0):
        e = self.element(start_rank)
        for i in range(count):
            yield e
            e = 2 * e + 1 + self.branch.bit(start_rank + i)

    def first_rank_at_or_above(self, n: int) -> int:
        if n <= 0:
            return 0
        d = n.bit_length()
        # element(d) >= 2**d - 1; walk down while still above n
        while d > 0 and self.element(d - 1) >= n:
            d -= 1
        while self.element(d) < n:
            d += 1
        return d

    def growth_kind(self) -> str:
        return "exp"

    def enclosing_branch(self) -> BranchId:
        return self.branch

    def to_json(self) -> dict:
        return {"kind": "branch", "branch": self.branch.text()}


def branch_set(branch: BranchId) -> BranchSet:
    return BranchSet(branch)


@functools.lru_cache(maxsize=None)
def branch_intersection(k1: BranchId, k2: BranchId) -> Explicit:
    """Shared vertices of two distinct branches: the codes of their common
    prefix.  Size is always lcp_length + 1 since the root is shared."""
    d = first_divergence(k1, k2)
    if d is None:
        raise SameBranch(f"{k1} and {k2} are the same branch")
    return Explicit(tuple(BranchSet(k1).elements(d + 1)))


@dataclass(frozen=True)
class PartitionCell(IndexSet):
    """Cell j >= 1 of the canonical partition of an infinite set into
    infinitely many infinite pieces: cell j keeps the parent elements whose
    rank is pairing(i, j) for some i >= 1."""

    parent: IndexSet
    index: int

    def __post_init__(self) -> None:
        if self.parent.is_finite:
            raise ValueError("partition cells need an infinite parent")
        if self.index < 1:
            raise ValueError("cell index starts at 1")

    def contains(self, n: int) -> bool:
        r = _rank_of(self.parent, n)
        if r is None:
            return False
        return unpair(r)[1] == self.index

    def element(self, rank: int) -> int:
        return self.parent.element(pairing(rank + 1, self.index))

    def first_rank_at_or_above(self, n: int) -> int:
        # smallest m with pairing(m+1, index) >= parent rank of the cutoff
        target = self.parent.first_rank_at_or_above(n)
        lo, hi = 0, 1
        while pairing(hi + 1, self.index) < target:
            hi *= 2
        while lo < hi:
            mid = (lo + hi) // 2
            if pairing(mid + 1, self.index) >= target:
                hi = mid
            else:
                lo = mid + 1
        return lo

    def growth_kind(self) -> str:
        return self.parent.growth_kind()

    def enclosing_branch(self) -> BranchId | None:
        return self.parent.enclosing_branch()

    def to_json(self) -> dict:
        return {"kind": "cell", "parent": self.parent.to_json(), "index": self.index}


def partition_cell(parent: IndexSet, j: int) -> PartitionCell:
    return PartitionCell(parent, j)


@dataclass(frozen=True)
class Sparsified(IndexSet):
    """Increasing subsequence of the parent whose rank-m element is >= 2**m."""

    parent: IndexSet

    def __post_init__(self) -> None:
        if self.parent.is_finite:
            raise ValueError("sparsification needs an infinite parent")

    def contains(self, n: int) -> bool:
        if not self.parent.contains(n):
            return False
        for el in _sparse_elements(self):
            if el == n:
                return True
            if el > n:
                return False

    def element(self, rank: int) -> int:
        it = _sparse_elements(self)
        for _ in range(rank):
            next(it)
        return next(it)

    def elements(self, count: int, start_rank: int = 0):
        it = _sparse_elements(self)
        for _ in range(start_rank):
            next(it)
        for _ in range(count):
            yield next(it)

    def elements_unbounded(self):
        return _sparse_elements(self)

    def growth_kind(self) -> str:
        return "exp"

    def enclosing_branch(self) -> BranchId | None:
        return self.parent.enclosing_branch()

    def to_json(self) -> dict:
        return {"kind": "sparsified", "parent": self.parent.to_json()}


def _sparse_elements(s: Sparsified):
    """Yields the sparsified enumeration; rank-m element >= 2**m."""
    m = 0
    floor = 1  # max(2**0, previous + 1)
    while True:
        # jump, don't walk: the floor doubles every step
        el = s.parent.element(s.parent.first_rank_at_or_above(floor))
        yield el
        m += 1
        floor = max(1 << m, el + 1)


def sparsify(parent: IndexSet) -> Sparsified:
    return Sparsified(parent)


@dataclass(frozen=True)
class RayCut(IndexSet):
    """parent intersected with [start, infinity)."""

    parent: IndexSet
    start: int

    def contains(self, n: int) -> bool:
        return n >= self.start and self.parent.contains(n)

    def element(self, rank: int) -> int:
        return self.parent.element(rank + _cut_rank(self))

    def elements(self, count: int, start_rank: int = 0):
        return self.parent.elements(count, start_rank + _cut_rank(self))

    def first_rank_at_or_above(self, n: int) -> int:
        return max(0, self.parent.first_rank_at_or_above(n) - _cut_rank(self))

    def growth_kind(self) -> str:
        return self.parent.growth_kind()

    def enclosing_branch(self) -> BranchId | None:
        return self.parent.enclosing_branch()

    def to_json(self) -> dict:
        return {"kind": "ray-cut", "parent": self.parent.to_json(), "start": self.start}


@functools.lru_cache(maxsize=None)
def _cut_rank(rc: RayCut) -> int:
    return rc.parent.first_rank_at_or_above(rc.start)


def ray_cut(parent: IndexSet, start: int) -> IndexSet:
    """parent ∩ [start, ∞), normalised for the simple shapes."""
    if isinstance(parent, Explicit):
        return Explicit(tuple(x for x in parent.elems if x >= start))
    if isinstance(parent, Ray):
        return Ray(max(parent.start, start))
    if isinstance(parent, Progression):
        if start <= parent.start:
            return parent
        k = -((parent.start - start) // parent.step)
        return Progression(parent.start + k * parent.step, parent.step)
    if isinstance(parent, RayCut):
        return ray_cut(parent.parent, max(parent.start, start))
    if start <= parent.min_element():
        return parent
    return RayCut(parent, start)


def _rank_of(s: IndexSet, n: int) -> int | None:
    """Rank of n in s, or None; cost is fine for the shapes used here."""
    if isinstance(s, Ray):
        return n - s.start if n >= s.start else None
    if isinstance(s, Progression):
        if not s.contains(n):
            return None
        return (n - s.start) // s.step
    if isinstance(s, Explicit):
        try:
            return s.elems.index(n)
        except ValueError:
            return None
    if isinstance(s, BranchSet):
        return (n + 1).bit_length() - 1 if s.contains(n) else None
    if isinstance(s, PartitionCell):
        r = _rank_of(s.parent, n)
        if r is None:
            return None
        i, j = unpair(r)
        return i - 1 if j == s.index else None
    if isinstance(s, Sparsified):
        m = 0
        for el in _sparse_elements(s):
            if el == n:
                return m
            if el > n:
                return None
            m += 1
    if isinstance(s, RayCut):
        if n < s.start:
            return None
        r = _rank_of(s.parent, n)
        return None if r is None else r - _cut_rank(s)
    raise TypeError(f"rank_of unsupported for {type(s).__name__}")


def rank_of(s: IndexSet, n: int) -> int | None:
    return _rank_of(s, n)
