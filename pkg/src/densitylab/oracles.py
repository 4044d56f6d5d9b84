"""Prefix oracles for infinite sets, permutations, partitions, and slaloms.

Every infinite object is represented by deterministic, memoized oracles with
an explicit validity bound.  Queries past the bound raise HorizonError rather
than guessing.  Memoization is append-only, so repeated queries always return
identical answers and objects can be shared across threads.
"""

from __future__ import annotations

import random
from bisect import bisect_left, bisect_right
from typing import Callable, Iterable, Iterator

from .errors import HorizonError, IntegrityError, PreconditionError

DEFAULT_HINT = 1 << 20

# Prefix inspected when an operation insists on an infinite-coinfinite input.
# Legitimate density-0 sets have only ~log(H) members below H, so the audit
# window is small and the per-side quota scales with the window, not with the
# set's horizon hint.
AUDIT_WINDOW = 256


def _check_natural(n: int, what: str = "argument") -> None:
    if not isinstance(n, int) or n < 0:
        raise PreconditionError(f"{what} must be a natural number, got {n!r}")


class LazySet:
    """An infinite subset of the naturals behind memoized prefix oracles.

    The canonical queries are `contains(n)`, `count_below(n)` (= |A ∩ [0,n)|)
    and `element(i)` (the i-th member in increasing order).  A set may be
    backed by a membership oracle, an enumeration oracle, closed-form
    element/count formulas, or a fully materialized prefix; all backends
    answer the same queries and agree with each other by construction.
    """

    def __init__(
        self,
        *,
        name: str = "",
        valid_below: int | None = None,
        horizon_hint: int = DEFAULT_HINT,
        membership_fn: Callable[[int], bool] | None = None,
        enumeration_fn: Callable[[int], int] | None = None,
        element_fn: Callable[[int], int] | None = None,
        count_fn: Callable[[int], int] | None = None,
        elements: list[int] | None = None,
    ):
        self.name = name
        self.valid_below = valid_below
        self.horizon_hint = horizon_hint
        self._mem_fn = membership_fn
        self._enum_fn = enumeration_fn
        self._element_fn = element_fn
        self._count_fn = count_fn
        self._elems: list[int] = list(elements) if elements else []
        # membership is decided for every n < _decided
        if elements is not None and valid_below is not None:
            self._decided = valid_below
        else:
            self._decided = 0
        if self._elems and any(
            self._elems[i] >= self._elems[i + 1] for i in range(len(self._elems) - 1)
        ):
            raise IntegrityError(f"{name or 'set'}: prefix elements not strictly increasing")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_membership(
        cls, fn: Callable[[int], bool], valid_below: int, name: str = ""
    ) -> "LazySet":
        """Set given by a membership oracle, decidable below `valid_below`."""
        return cls(membership_fn=fn, valid_below=valid_below, name=name,
                   horizon_hint=valid_below)

    @classmethod
    def from_enumeration(
        cls,
        fn: Callable[[int], int],
        name: str = "",
        valid_below: int | None = None,
        horizon_hint: int = DEFAULT_HINT,
    ) -> "LazySet":
        """Set given by a strictly increasing enumeration oracle i -> i-th element."""
        return cls(enumeration_fn=fn, name=name, valid_below=valid_below,
                   horizon_hint=horizon_hint)

    @classmethod
    def from_formula(
        cls,
        element_fn: Callable[[int], int],
        count_fn: Callable[[int], int],
        name: str = "",
        valid_below: int | None = None,
    ) -> "LazySet":
        """Set with closed-form element and count oracles (O(1) queries)."""
        return cls(element_fn=element_fn, count_fn=count_fn, name=name,
                   valid_below=valid_below)

    @classmethod
    def from_finite_prefix(
        cls, elements: Iterable[int], valid_below: int, name: str = ""
    ) -> "LazySet":
        """Set whose trace below `valid_below` is known exactly and completely."""
        elems = sorted(elements)
        if elems and elems[-1] >= valid_below:
            raise PreconditionError(
                f"prefix element {elems[-1]} not below the validity bound {valid_below}"
            )
        return cls(elements=elems, valid_below=valid_below, name=name,
                   horizon_hint=valid_below)

    # -- queries -----------------------------------------------------------

    def _guard(self, n: int) -> None:
        if self.valid_below is not None and n > self.valid_below:
            raise HorizonError(
                f"{self.name or 'set'}: query at {n} exceeds validity bound "
                f"{self.valid_below}"
            )

    def contains(self, n: int) -> bool:
        _check_natural(n)
        self._guard(n + 1)
        if self._count_fn is not None:
            return self._count_fn(n + 1) - self._count_fn(n) == 1
        self._decide_to(n + 1)
        i = bisect_left(self._elems, n)
        return i < len(self._elems) and self._elems[i] == n

    def count_below(self, n: int) -> int:
        """|A ∩ [0, n)| computed exactly."""
        _check_natural(n)
        self._guard(n)
        if self._count_fn is not None:
            return self._count_fn(n)
        self._decide_to(n)
        return bisect_left(self._elems, n)

    def count_absent_below(self, n: int) -> int:
        return n - self.count_below(n)

    def element(self, i: int) -> int:
        """The i-th member in increasing order."""
        _check_natural(i, "index")
        if self._element_fn is not None:
            return self._element_fn(i)
        while len(self._elems) <= i:
            if not self._pull_next():
                raise HorizonError(
                    f"{self.name or 'set'}: fewer than {i + 1} elements realized "
                    f"below bound {self.valid_below}"
                )
        return self._elems[i]

    def absent_element(self, k: int) -> int:
        """The k-th natural NOT in the set, in increasing order."""
        m = index_where_count_reaches(self.count_absent_below, k + 1,
                                      cap=self.valid_below)
        return m

    def iter_below(self, n: int) -> Iterator[int]:
        """All members < n, increasing.  One shared sweep feeds every caller."""
        if self._element_fn is not None and self._count_fn is not None:
            for i in range(self._count_fn(n)):
                yield self._element_fn(i)
            return
        self._guard(n)
        self._decide_to(n)
        yield from self._elems[: bisect_left(self._elems, n)]

    # -- realization internals --------------------------------------------

    def _pull_next(self) -> bool:
        """Extend the realized element list by one; False if bound reached."""
        if self._enum_fn is not None:
            e = self._enum_fn(len(self._elems))
            if not isinstance(e, int) or e < 0:
                raise IntegrityError(f"{self.name}: enumeration returned {e!r}")
            if self._elems and e <= self._elems[-1]:
                raise IntegrityError(
                    f"{self.name}: enumeration not strictly increasing "
                    f"({e} after {self._elems[-1]})"
                )
            if self.valid_below is not None and e >= self.valid_below:
                self._decided = self.valid_below
                return False
            self._elems.append(e)
            self._decided = e + 1
            return True
        if self._mem_fn is not None:
            start = self._decided
            stop = self.valid_below if self.valid_below is not None else self.horizon_hint
            for k in range(start, stop):
                self._decided = k + 1
                if self._mem_fn(k):
                    self._elems.append(k)
                    return True
            self._decided = stop
            return False
        return False  # finite prefix: nothing to pull

    def _decide_to(self, n: int) -> None:
        if self._decided >= n:
            return
        if self._enum_fn is not None:
            while self._decided < n:
                if not self._pull_next():
                    break
            return
        if self._mem_fn is not None:
            fn = self._mem_fn
            append = self._elems.append
            for k in range(self._decided, n):
                if fn(k):
                    append(k)
            self._decided = n
            return
        if self._decided < n:
            raise HorizonError(
                f"{self.name or 'set'}: membership undecided at {n - 1} "
                f"(decided below {self._decided})"
            )

    def __repr__(self) -> str:  # pragma: no cover
        return f"LazySet({self.name or hex(id(self))})"


def index_where_count_reaches(
    count_fn: Callable[[int], int], target: int, cap: int | None = None,
    hint: int = 64,
) -> int:
    """Least m with count_fn(m+1) >= target, for a monotone prefix counter.

    count_fn increases by at most 1 per step, so the found m is exactly the
    (target-1)-indexed witness of the counted property.
    """
    hi = max(hint, 2)
    while count_fn(min(hi, cap) if cap is not None else hi) < target:
        if cap is not None and hi >= cap:
            raise HorizonError(
                f"count never reaches {target} below the bound {cap}"
            )
        hi *= 2
    lo = 0
    hi = min(hi, cap) if cap is not None else hi
    # invariant: count_fn(hi) >= target, count_fn(lo) < target or lo == 0
    while lo < hi:
        mid = (lo + hi) // 2
        if count_fn(mid + 1) >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


class IncreasingFilter:
    """Lazily realized increasing list {n : pred(n)}; ascending element
    queries are amortized O(1), random access costs a forward scan."""

    def __init__(self, pred: Callable[[int], bool]):
        self._pred = pred
        self._found: list[int] = []
        self._next = 0

    def element(self, k: int) -> int:
        while len(self._found) <= k:
            m = self._next
            self._next = m + 1
            if self._pred(m):
                self._found.append(m)
        return self._found[k]


def audit_infinite_coinfinite(a: LazySet, window: int = AUDIT_WINDOW) -> None:
    """Reject finite-looking and cofinite-looking sets on a small prefix.

    Requires at least window/64 members and window/64 non-members below the
    audit window (clipped to the set's validity bound).
    """
    w = window
    if a.valid_below is not None:
        w = min(w, a.valid_below)
    need = max(1, w // 64)
    members = a.count_below(w)
    if members < need:
        raise PreconditionError(
            f"{a.name or 'set'}: only {members} members below {w}; "
            f"needs >= {need} to pass the infinite audit"
        )
    if w - members < need:
        raise PreconditionError(
            f"{a.name or 'set'}: only {w - members} non-members below {w}; "
            f"needs >= {need} to pass the coinfinite audit"
        )


def complement_set(a: LazySet, name: str = "") -> LazySet:
    """The complement of `a`, sharing its validity bound."""
    filt = IncreasingFilter(lambda n: not a.contains(n))
    return LazySet.from_formula(
        filt.element,
        lambda n: n - a.count_below(n),
        name=name or f"complement({a.name})",
        valid_below=a.valid_below,
    )


# -- stock sets -------------------------------------------------------------

def naturals() -> LazySet:
    return LazySet.from_formula(lambda i: i, lambda n: n, name="naturals")


def evens() -> LazySet:
    return LazySet.from_formula(lambda i: 2 * i, lambda n: (n + 1) // 2, name="evens")


def odds() -> LazySet:
    return LazySet.from_formula(lambda i: 2 * i + 1, lambda n: n // 2, name="odds")


def multiples(q: int) -> LazySet:
    if q <= 0:
        raise PreconditionError("modulus must be positive")
    return LazySet.from_formula(
        lambda i: q * i, lambda n: (n + q - 1) // q, name=f"multiples-of-{q}"
    )


def doubling_blocks() -> LazySet:
    """Union of the blocks [4^k, 2*4^k); its density profile oscillates."""

    def count(n: int) -> int:
        total = 0
        k = 0
        while 4**k < n:
            lo, hi = 4**k, 2 * 4**k
            total += max(0, min(n, hi) - lo)
            k += 1
        return total

    def member(n: int) -> bool:
        if n == 0:
            return False
        k = 0
        while 4 ** (k + 1) <= n:
            k += 1
        return n < 2 * 4**k

    def element(i: int) -> int:
        return index_where_count_reaches(count, i + 1)

    s = LazySet.from_formula(element, count, name="doubling-blocks")
    s._mem_fn = member  # exact fast membership, agrees with count
    return s


# -- permutations ------------------------------------------------------------

class LazyPermutation:
    """A bijection of the naturals behind memoized forward/inverse oracles."""

    def __init__(
        self,
        forward_fn: Callable[[int], int],
        inverse_fn: Callable[[int], int],
        *,
        name: str = "",
        closed_prefix_fn: Callable[[int], bool] | None = None,
        valid_below: int | None = None,
    ):
        self._fwd_fn = forward_fn
        self._inv_fn = inverse_fn
        self.name = name
        self.valid_below = valid_below
        self._closed_fn = closed_prefix_fn
        self._fwd: dict[int, int] = {}
        self._inv: dict[int, int] = {}

    def _guard(self, n: int) -> None:
        if self.valid_below is not None and n >= self.valid_below:
            raise HorizonError(
                f"{self.name or 'permutation'}: query at {n} exceeds realized "
                f"bound {self.valid_below}"
            )

    def forward(self, n: int) -> int:
        _check_natural(n)
        self._guard(n)
        v = self._fwd.get(n)
        if v is None:
            v = self._fwd_fn(n)
            if not isinstance(v, int) or v < 0:
                raise IntegrityError(f"{self.name}: forward({n}) returned {v!r}")
            self._fwd[n] = v
        return v

    def inverse(self, n: int) -> int:
        _check_natural(n)
        self._guard(n)
        v = self._inv.get(n)
        if v is None:
            v = self._inv_fn(n)
            if not isinstance(v, int) or v < 0:
                raise IntegrityError(f"{self.name}: inverse({n}) returned {v!r}")
            self._inv[n] = v
        return v

    def bijectivity_audit(self, prefix: int) -> bool:
        """Check forward∘inverse = inverse∘forward = id on [0, prefix)."""
        for n in range(prefix):
            f = self.forward(n)
            if self.inverse(f) != n:
                raise IntegrityError(
                    f"{self.name}: inverse(forward({n}))={self.inverse(f)} != {n}"
                )
            i = self.inverse(n)
            if self.forward(i) != n:
                raise IntegrityError(
                    f"{self.name}: forward(inverse({n}))={self.forward(i)} != {n}"
                )
        return True

    def image_prefix_closed(self, h: int) -> bool:
        """True if the permutation provably maps [0, h) onto [0, h)."""
        if self._closed_fn is not None:
            return self._closed_fn(h)
        return False

    def __repr__(self) -> str:  # pragma: no cover
        return f"LazyPermutation({self.name or hex(id(self))})"


def identity_permutation() -> LazyPermutation:
    return LazyPermutation(lambda n: n, lambda n: n, name="identity",
                           closed_prefix_fn=lambda h: True)


def swap_adjacent_pairs() -> LazyPermutation:
    """2k <-> 2k+1, an involution."""
    return LazyPermutation(lambda n: n ^ 1, lambda n: n ^ 1,
                           name="swap-adjacent",
                           closed_prefix_fn=lambda h: h % 2 == 0)


def from_mapping(mapping: dict[int, int]) -> LazyPermutation:
    """Finitely supported permutation: `mapping` on its support, identity off it."""
    inv = {v: k for k, v in mapping.items()}
    if len(inv) != len(mapping):
        raise PreconditionError("mapping is not injective")
    if sorted(mapping.keys()) != sorted(mapping.values()):
        raise PreconditionError("mapping is not a permutation of its support")
    bound = max(mapping, default=0) + 1

    return LazyPermutation(
        lambda n: mapping.get(n, n),
        lambda n: inv.get(n, n),
        name="finite-support",
        closed_prefix_fn=lambda h: h >= bound or all(
            k < h and v < h or k >= h and v >= h for k, v in mapping.items()
        ),
    )


def _is_power_of_two(h: int) -> bool:
    return h > 0 and (h & (h - 1)) == 0


def block_permutation(
    rule: Callable[[int, int], list[int]], name: str = "block"
) -> LazyPermutation:
    """Permutation fixing each dyadic block [2^j, 2^(j+1)) setwise; 0 is fixed.

    `rule(j, size)` returns the within-block offset permutation for block j.
    Forward and inverse are both cheap because blocks are materialized lazily.
    """
    fwd_blocks: dict[int, list[int]] = {}
    inv_blocks: dict[int, list[int]] = {}

    def _block(j: int) -> list[int]:
        blk = fwd_blocks.get(j)
        if blk is None:
            size = 1 << j
            blk = list(rule(j, size))
            if sorted(blk) != list(range(size)):
                raise IntegrityError(f"{name}: rule for block {j} is not a permutation")
            fwd_blocks[j] = blk
            inv = [0] * size
            for t, v in enumerate(blk):
                inv[v] = t
            inv_blocks[j] = inv
        return blk

    def forward(n: int) -> int:
        if n == 0:
            return 0
        j = n.bit_length() - 1
        base = 1 << j
        return base + _block(j)[n - base]

    def inverse(n: int) -> int:
        if n == 0:
            return 0
        j = n.bit_length() - 1
        base = 1 << j
        _block(j)
        return base + inv_blocks[j][n - base]

    return LazyPermutation(
        forward, inverse, name=name,
        closed_prefix_fn=lambda h: h <= 1 or _is_power_of_two(h),
    )


def seeded_block_permutation(seed: int) -> LazyPermutation:
    """Deterministic pseudo-random shuffle of each dyadic block."""

    def rule(j: int, size: int) -> list[int]:
        rnd = random.Random(seed * 1_000_003 + j)
        p = list(range(size))
        rnd.shuffle(p)
        return p

    return block_permutation(rule, name=f"block-shuffle-{seed}")


def block_reversal_permutation() -> LazyPermutation:
    """Reverses each dyadic block [2^j, 2^(j+1)); an involution."""
    return block_permutation(
        lambda j, size: list(range(size - 1, -1, -1)), name="block-reversal"
    )


def partitioned_permutation(cut_fn: Callable[[int], int],
                            rule: Callable[[int, int], list[int]],
                            name: str = "partitioned") -> LazyPermutation:
    """Permutation fixing each interval [cut(k), cut(k+1)) setwise, for an
    arbitrary increasing cut schedule with cut(0) = 0."""
    cuts = [0]
    fwd_blocks: dict[int, list[int]] = {}
    inv_blocks: dict[int, list[int]] = {}

    def _block_of(n: int) -> int:
        while cuts[-1] <= n:
            nxt = cut_fn(len(cuts))
            if nxt <= cuts[-1]:
                raise IntegrityError(f"{name}: cut schedule not increasing")
            cuts.append(nxt)
        return bisect_right(cuts, n) - 1

    def _block(k: int) -> list[int]:
        blk = fwd_blocks.get(k)
        if blk is None:
            size = cuts[k + 1] - cuts[k]
            blk = list(rule(k, size))
            if sorted(blk) != list(range(size)):
                raise IntegrityError(f"{name}: rule for block {k} is not a permutation")
            fwd_blocks[k] = blk
            inv = [0] * size
            for t, v in enumerate(blk):
                inv[v] = t
            inv_blocks[k] = inv
        return blk

    def forward(n: int) -> int:
        k = _block_of(n)
        return cuts[k] + _block(k)[n - cuts[k]]

    def inverse(n: int) -> int:
        k = _block_of(n)
        _block(k)
        return cuts[k] + inv_blocks[k][n - cuts[k]]

    def closed(h: int) -> bool:
        if h == 0:
            return True
        _block_of(h - 1)
        return h in cuts

    return LazyPermutation(forward, inverse, name=name, closed_prefix_fn=closed)


def seeded_offset_block_permutation(seed: int) -> LazyPermutation:
    """Seeded shuffle of the blocks [0,3), [3,6), [6,12), [12,24), ...: the
    cuts avoid powers of two, so prefix images genuinely straddle dyadic
    boundaries."""

    def cut(k: int) -> int:
        return 3 << (k - 1)  # 3, 6, 12, 24, ...

    def rule(k: int, size: int) -> list[int]:
        rnd = random.Random(seed * 7_368_787 + k)
        p = list(range(size))
        rnd.shuffle(p)
        return p

    return partitioned_permutation(cut, rule, name=f"offset-shuffle-{seed}")


def even_odd_split_permutation() -> LazyPermutation:
    """Within each dyadic block, sends even offsets first, then odd offsets.

    The inverse image of a prefix mid-block is a union of ~size/2 singletons,
    so interval counts grow without bound.
    """

    def rule(j: int, size: int) -> list[int]:
        p = [0] * size
        half = size // 2
        for t in range(size):
            p[t] = t // 2 if t % 2 == 0 else half + t // 2
        return p

    return block_permutation(rule, name="even-odd-split")


# -- interval partitions -----------------------------------------------------

class IntervalPartition:
    """Increasing cut points 0 = c_0 < c_1 < ... tiling the naturals.

    Interval n is [cuts(n), cuts(n+1)).  The superincreasing regime maintains
    |I_{n+1}| >= n * sum(|I_i| for i <= n) and is audited as cuts realize.
    """

    GEOMETRIC = "geometric"
    SUPERINCREASING = "superincreasing"
    CUSTOM = "custom"

    def __init__(self, size_fn: Callable[[int, list[int]], int], regime: str,
                 name: str = ""):
        self._size_fn = size_fn
        self.regime = regime
        self.name = name or regime
        self._cuts: list[int] = [0]
        self._sizes: list[int] = []

    def _extend(self) -> None:
        n = len(self._sizes)
        size = self._size_fn(n, self._sizes)
        if size <= 0:
            raise IntegrityError(f"{self.name}: interval {n} has size {size}")
        if self.regime == self.SUPERINCREASING and n >= 1:
            if size < (n - 1) * sum(self._sizes):
                raise IntegrityError(
                    f"{self.name}: interval {n} violates superincreasing growth"
                )
        self._sizes.append(size)
        self._cuts.append(self._cuts[-1] + size)

    def cut(self, i: int) -> int:
        while len(self._cuts) <= i:
            self._extend()
        return self._cuts[i]

    def size(self, n: int) -> int:
        while len(self._sizes) <= n:
            self._extend()
        return self._sizes[n]

    def interval_of(self, x: int) -> int:
        """Index n with cuts(n) <= x < cuts(n+1)."""
        _check_natural(x)
        while self._cuts[-1] <= x:
            self._extend()
        return bisect_right(self._cuts, x) - 1

    def interval(self, n: int) -> tuple[int, int]:
        return self.cut(n), self.cut(n + 1)


def superincreasing_partition() -> IntervalPartition:
    """|I_0| = 1, |I_{n+1}| = (n+1) * sum(|I_i| : i <= n) + 1."""

    def size(n: int, sizes: list[int]) -> int:
        if n == 0:
            return 1
        return n * sum(sizes) + 1

    return IntervalPartition(size, IntervalPartition.SUPERINCREASING)


def geometric_partition() -> IntervalPartition:
    """|I_n| = 2^n."""
    return IntervalPartition(lambda n, _s: 1 << n, IntervalPartition.GEOMETRIC)


# -- slaloms -----------------------------------------------------------------

class Slalom:
    """n -> finite slot set, with |slots(n)| <= width(n) audited per query."""

    def __init__(self, width_fn: Callable[[int], int],
                 slots_fn: Callable[[int], frozenset[int]], name: str = ""):
        self._width_fn = width_fn
        self._slots_fn = slots_fn
        self.name = name

    def width(self, n: int) -> int:
        return self._width_fn(n)

    def slots(self, n: int) -> frozenset[int]:
        s = frozenset(self._slots_fn(n))
        if len(s) > self._width_fn(n):
            raise IntegrityError(
                f"{self.name or 'slalom'}: {len(s)} slots at {n} exceed width "
                f"{self._width_fn(n)}"
            )
        return s
