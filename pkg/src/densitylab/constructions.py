"""Explicit set and permutation constructions that steer asymptotic density.

Everything is deterministic: given the same inputs and seeds, the realized
schedules and oracles are bit-identical.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .density import as_fraction, closure_bound
from .errors import HorizonError, IntegrityError, PreconditionError
from .oracles import (
    IncreasingFilter,
    IntervalPartition,
    LazyPermutation,
    LazySet,
    audit_infinite_coinfinite,
    index_where_count_reaches,
)


# -- sparse sets --------------------------------------------------------------

def canonical_gap_rule(n: int) -> int:
    return (1 << n) + 1


def sparse_set(gap_rule: Callable[[int], int] = canonical_gap_rule,
               name: str = "sparse") -> LazySet:
    """The set {a_n} with a_0 = 0 and a_{n+1} = a_n + gap(n), gap(n) > 2^n.

    Gaps beyond 2^n force density 0: below any horizon H there are only
    about log2(H) members.
    """
    cache = [0]

    def enum(i: int) -> int:
        while len(cache) <= i:
            n = len(cache) - 1
            g = gap_rule(n)
            if g <= (1 << n):
                raise PreconditionError(
                    f"gap rule returned {g} at n={n}; must exceed 2^{n}"
                )
            cache.append(cache[-1] + g)
        return cache[i]

    return LazySet.from_enumeration(enum, name=name)


def canonical_sparse_positions() -> LazySet:
    """{0, 2, 5, 10, 19, 36, ...}: the default density-0 position schedule."""
    return sparse_set()


# -- diagonalization -----------------------------------------------------------

@dataclass
class DiagonalWitness:
    """Greedy schedule a_0=1, a_{n+1} = least b > a_n with
    π_i(b) >= π_i(a_n) + 2^n for every family member in play."""

    family: list[LazyPermutation]
    set: LazySet
    schedule: list[int]
    hit_horizon: bool

    def audit_gaps(self) -> bool:
        """Direct check of the defining inequality over the realized schedule."""
        for n in range(len(self.schedule) - 1):
            a, b = self.schedule[n], self.schedule[n + 1]
            for i in range(min(n + 1, len(self.family))):
                gap = self.family[i].forward(b) - self.family[i].forward(a)
                if gap < (1 << n):
                    raise IntegrityError(
                        f"family[{i}] moved only {gap} < 2^{n} between "
                        f"a_{n}={a} and a_{n + 1}={b}"
                    )
        return True


def diagonal_set(family: Sequence[LazyPermutation], horizon: int) -> DiagonalWitness:
    """Diagonalize against finitely many permutations at once.

    The resulting set has, below the horizon, so few elements that every
    family image estimates to density 0.  The witness is flagged when the
    greedy search for the next term ran out of room below the horizon.
    """
    if not family:
        raise PreconditionError("family must be nonempty")
    if horizon < 4:
        raise PreconditionError("horizon too small for the greedy schedule")
    family = list(family)
    schedule = [1]
    hit_horizon = False
    n = 0
    while True:
        a = schedule[-1]
        active = min(n + 1, len(family))
        targets = [family[i].forward(a) + (1 << n) for i in range(active)]
        found = None
        for b in range(a + 1, horizon):
            ok = True
            for i in range(active):
                if family[i].forward(b) < targets[i]:
                    ok = False
                    break
            if ok:
                found = b
                break
        if found is None:
            hit_horizon = True
            break
        schedule.append(found)
        n += 1
    witness = LazySet.from_finite_prefix(schedule, valid_below=horizon,
                                         name="diagonal")
    return DiagonalWitness(family, witness, schedule, hit_horizon)


# -- slot machinery for steering permutations ---------------------------------

class _RationalSlots:
    """Positions where floor(r*(n+1)) increments; exactly floor(r*n) below n."""

    def __init__(self, r: Fraction):
        self.p, self.q = r.numerator, r.denominator

    def count(self, n: int) -> int:
        return self.p * n // self.q

    def index(self, k: int) -> int:
        return (self.q * (k + 1) + self.p - 1) // self.p - 1

    def is_slot(self, n: int) -> bool:
        return self.count(n + 1) > self.count(n)


class _SetSlots:
    """Slots given by an explicit lazy set of positions."""

    def __init__(self, positions: LazySet):
        self._pos = positions

    def count(self, n: int) -> int:
        return self._pos.count_below(n)

    def index(self, k: int) -> int:
        return self._pos.element(k)

    def is_slot(self, n: int) -> bool:
        return self._pos.contains(n)


class _ComplementSlots:
    """Slots = complement of an explicit sparse position set."""

    def __init__(self, excluded: LazySet):
        self._ex = excluded
        self._filter = IncreasingFilter(lambda n: not excluded.contains(n))

    def count(self, n: int) -> int:
        return n - self._ex.count_below(n)

    def index(self, k: int) -> int:
        return self._filter.element(k)

    def is_slot(self, n: int) -> bool:
        return not self._ex.contains(n)


def _interleave_permutation(a: LazySet, slots, name: str) -> LazyPermutation:
    """Order-preserving interleave: k-th member of A to the k-th slot, k-th
    non-member to the k-th non-slot."""
    comp = IncreasingFilter(lambda n: not a.contains(n))
    nonslots = IncreasingFilter(lambda n: not slots.is_slot(n))

    def forward(x: int) -> int:
        below = a.count_below(x)
        if a.contains(x):
            return slots.index(below)
        return nonslots.element(x - below)

    def inverse(p: int) -> int:
        k = slots.count(p)
        if slots.count(p + 1) > k:
            return a.element(k)
        return comp.element(p - k)

    return LazyPermutation(forward, inverse, name=name)


def to_density_permutation(a: LazySet, r, horizon: int) -> LazyPermutation:
    """Permutation whose image of A tracks density r.

    For r in (0,1) the member count below n equals floor(r*n) exactly.  For
    r = 0 the members land on the canonical sparse positions, for r = 1
    everywhere else, so the image profile pins to 0 resp. 1: exact floor(r*n)
    tracking is impossible for a bijection at the endpoints because the other
    class still has to embed.
    """
    r = as_fraction(r)
    if not 0 <= r <= 1:
        raise PreconditionError(f"target density {r} outside [0, 1]")
    audit_infinite_coinfinite(a)
    if r == 0:
        slots = _SetSlots(canonical_sparse_positions())
    elif r == 1:
        slots = _ComplementSlots(canonical_sparse_positions())
    else:
        slots = _RationalSlots(r)
    return _interleave_permutation(a, slots, name=f"steer[{r}]({a.name})")


class _PhaseSlots:
    """Two-threshold phase machine: pack member slots until the running
    profile exceeds `hi`, then non-slots until it drops below `lo`."""

    def __init__(self, hi=Fraction(24, 25), lo=Fraction(1, 25)):
        self._hi_num, self._hi_den = hi.numerator, hi.denominator
        self._lo_num, self._lo_den = lo.numerator, lo.denominator
        self.positions: list[int] = []  # member-slot positions, increasing
        self._n = 0
        self._c = 0
        self._member_phase = True

    def _generate_to(self, bound: int) -> None:
        n, c = self._n, self._c
        hn, hd = self._hi_num, self._hi_den
        ln, ld = self._lo_num, self._lo_den
        member = self._member_phase
        pos = self.positions
        while n < bound:
            if member:
                pos.append(n)
                c += 1
                n += 1
                if c * hd > hn * n:
                    member = False
            else:
                n += 1
                if c * ld < ln * n:
                    member = True
        self._n, self._c, self._member_phase = n, c, member

    def count(self, n: int) -> int:
        self._generate_to(n)
        return bisect_left(self.positions, n)

    def index(self, k: int) -> int:
        while len(self.positions) <= k:
            self._generate_to(max(2 * self._n, 64))
        return self.positions[k]

    def is_slot(self, n: int) -> bool:
        return self.count(n + 1) > self.count(n)


OSC_HI = Fraction(24, 25)
OSC_LO = Fraction(1, 25)


def to_oscillation_permutation(a: LazySet, horizon: int) -> LazyPermutation:
    """Permutation whose image of A has a profile swinging between the
    thresholds 1/25 and 24/25, crossing 1/2 at every phase change."""
    audit_infinite_coinfinite(a)
    slots = _PhaseSlots(OSC_HI, OSC_LO)
    return _interleave_permutation(a, slots, name=f"oscillate({a.name})")


def audit_density_tracking(pi: LazyPermutation, a: LazySet, r, horizon: int) -> int:
    """Max |count of image members below n - floor(r*n)| over 1 <= n <= horizon,
    counted through the public oracles."""
    r = as_fraction(r)
    num, den = r.numerator, r.denominator
    count = 0
    worst = 0
    inverse = pi.inverse
    contains = a.contains
    for p in range(horizon):
        if contains(inverse(p)):
            count += 1
        dev = count - num * (p + 1) // den
        if dev < 0:
            dev = -dev
        if dev > worst:
            worst = dev
    return worst


def audit_density_pinning(pi: LazyPermutation, a: LazySet, r: int, horizon: int,
                          tol=Fraction(1, 100)) -> bool:
    """For endpoint targets: image profile stays below tol (r=0) or above
    1-tol (r=1) at every n past the burn-in."""
    if r not in (0, 1):
        raise PreconditionError("pinning audit only applies to r in {0, 1}")
    tol = as_fraction(tol)
    burn_in = horizon // 4
    count = 0
    inverse = pi.inverse
    contains = a.contains
    for p in range(horizon):
        if contains(inverse(p)):
            count += 1
        n = p + 1
        if n <= burn_in:
            continue
        if r == 0 and count * tol.denominator > tol.numerator * n:
            return False
        if r == 1 and (n - count) * tol.denominator > tol.numerator * n:
            return False
    return True


def count_half_crossings(pi: LazyPermutation, a: LazySet, horizon: int) -> int:
    """Number of strict sign changes of (profile - 1/2) along the full sweep."""
    count = 0
    side = 0  # -1 below, +1 above, 0 undecided
    crossings = 0
    inverse = pi.inverse
    contains = a.contains
    for p in range(horizon):
        if contains(inverse(p)):
            count += 1
        n = p + 1
        new = 1 if 2 * count > n else (-1 if 2 * count < n else 0)
        if new != 0:
            if side != 0 and new != side:
                crossings += 1
            side = new
    return crossings


# -- (j,k)-sets and disruption -------------------------------------------------

@dataclass(frozen=True)
class JKSetSpec:
    """Band constraint: on every realized interval past the exempt prefix,
    |A ∩ I_n| / |I_n| must lie in [j/k, (j+1)/k]."""

    j: int
    k: int
    partition: IntervalPartition
    exceptions: int = 0

    def __post_init__(self):
        if not (0 < self.j < self.k - 1):
            raise PreconditionError(f"need 0 < j < k-1, got j={self.j}, k={self.k}")
        if self.exceptions < 0:
            raise PreconditionError("exceptions must be >= 0")

    @property
    def band(self) -> tuple[Fraction, Fraction]:
        return Fraction(self.j, self.k), Fraction(self.j + 1, self.k)


def strided_jk_set(spec: JKSetSpec) -> LazySet:
    """Members of I_n at offsets t with t mod k < j.

    Per-interval counts are closed-form, so profiles stay exact even at
    astronomically large checkpoints.
    """
    j, k, part = spec.j, spec.k, spec.partition

    def prefix_count(upto: int) -> int:
        # members among the first `upto` offsets of an interval
        return (upto // k) * j + min(upto % k, j)

    def count(x: int) -> int:
        total = 0
        n = 0
        while part.cut(n) < x:
            lo, hi = part.interval(n)
            total += prefix_count(min(x, hi) - lo)
            n += 1
        return total

    def element(i: int) -> int:
        return index_where_count_reaches(count, i + 1)

    s = LazySet.from_formula(element, count, name=f"stride-{j}-{k}")
    s._mem_fn = lambda x: (x - part.cut(part.interval_of(x))) % k < j
    return s


@dataclass(frozen=True)
class JKCheckReport:
    ok: bool
    checked: int
    violation: tuple[int, Fraction] | None = None  # (interval index, ratio)


def interval_trace_count(a: LazySet, part: IntervalPartition, n: int) -> int:
    lo, hi = part.interval(n)
    return a.count_below(hi) - a.count_below(lo)


def jk_set_check(a: LazySet, spec: JKSetSpec, realized_intervals: int) -> JKCheckReport:
    """Exact band check on intervals exceptions..realized_intervals-1; reports
    the first violating interval with its ratio."""
    if realized_intervals < spec.exceptions + 1:
        raise PreconditionError(
            "must realize at least one interval past the exempt prefix"
        )
    lo_band, hi_band = spec.band
    checked = 0
    for n in range(spec.exceptions, realized_intervals):
        size = spec.partition.size(n)
        ratio = Fraction(interval_trace_count(a, spec.partition, n), size)
        checked += 1
        if not (lo_band <= ratio <= hi_band):
            return JKCheckReport(False, checked, (n, ratio))
    return JKCheckReport(True, checked)


def _designated_below(designated_fn: Callable[[int], int], bound: int) -> set[int]:
    out: set[int] = set()
    i = 0
    prev = -1
    while True:
        n = designated_fn(i)
        if n <= prev:
            raise PreconditionError("designated index oracle must be strictly increasing")
        if n >= bound:
            return out
        out.add(n)
        prev = n
        i += 1


def disrupting_permutation(
    a: LazySet,
    spec: JKSetSpec,
    designated_fn: Callable[[int], int],
    horizon: int,
) -> LazyPermutation:
    """Interval-fixing permutation sending A's trace on each designated
    interval to that interval's initial segment, order-preserving on both
    halves, identity elsewhere."""
    part = spec.partition
    if horizon < 2:
        raise PreconditionError("horizon too small to realize any interval")
    # only intervals lying fully below the horizon are realized
    realized = part.interval_of(horizon - 1)
    if part.cut(realized + 1) == horizon:
        realized += 1
    if realized < spec.exceptions + 1:
        raise PreconditionError("horizon realizes no interval past the exempt prefix")
    check = jk_set_check(a, spec, realized)
    if not check.ok:
        n, ratio = check.violation
        raise PreconditionError(
            f"input is not a ({spec.j},{spec.k})-set: interval {n} has ratio {ratio}"
        )
    bound = part.cut(realized)
    designated = _designated_below(designated_fn, realized)

    def forward(x: int) -> int:
        n = part.interval_of(x)
        if n not in designated:
            return x
        lo, hi = part.interval(n)
        before = a.count_below(lo)
        cnt_in = a.count_below(hi) - before
        inside = a.count_below(x) - before
        if a.contains(x):
            return lo + inside
        return lo + cnt_in + (x - lo - inside)

    def inverse(y: int) -> int:
        n = part.interval_of(y)
        if n not in designated:
            return y
        lo, hi = part.interval(n)
        before = a.count_below(lo)
        cnt_in = a.count_below(hi) - before
        off = y - lo
        if off < cnt_in:
            return a.element(before + off)
        # (off - cnt_in)-th non-member of the interval
        want = off - cnt_in + 1
        lo_s, hi_s = lo, hi
        while lo_s < hi_s:
            mid = (lo_s + hi_s) // 2
            absent = (mid + 1 - lo) - (a.count_below(mid + 1) - before)
            if absent >= want:
                hi_s = mid
            else:
                lo_s = mid + 1
        return lo_s

    def closed(h: int) -> bool:
        if h == 0:
            return True
        if h > bound:
            return False
        n = part.interval_of(h - 1)
        return part.cut(n + 1) == h

    return LazyPermutation(forward, inverse, name=f"disrupt({a.name})",
                           closed_prefix_fn=closed, valid_below=bound)


def disrupted_image(a: LazySet, spec: JKSetSpec,
                    designated_fn: Callable[[int], int]) -> LazySet:
    """Count-level image of A under the disruption map; exact at any scale."""
    part = spec.partition
    state = {"limit": 0, "cache": set()}

    def _designated(n: int) -> bool:
        if state["limit"] <= n:
            state["limit"] = 2 * n + 2
            state["cache"] = _designated_below(designated_fn, state["limit"])
        return n in state["cache"]

    def count(x: int) -> int:
        if x == 0:
            return 0
        n = part.interval_of(x - 1)
        lo, hi = part.interval(n)
        before = a.count_below(lo)
        if not _designated(n):
            return a.count_below(x)
        cnt_in = a.count_below(hi) - before
        return before + min(x - lo, cnt_in)

    def element(i: int) -> int:
        return index_where_count_reaches(count, i + 1)

    return LazySet.from_formula(element, count, name=f"disrupted({a.name})")


@dataclass(frozen=True)
class DisruptionRow:
    interval: int
    checkpoint: int
    profile: Fraction
    lemma_bound: Fraction


def disruption_checkpoints(
    a: LazySet,
    spec: JKSetSpec,
    designated_fn: Callable[[int], int],
    intervals: int,
) -> list[DisruptionRow]:
    """Exact image profile at the checkpoint just past each designated
    interval's relocated trace, with the growth-driven lower bound
    j*n / (j*n + k)."""
    part = spec.partition
    image = disrupted_image(a, spec, designated_fn)
    designated = _designated_below(designated_fn, intervals)
    rows = []
    for n in sorted(designated):
        if n < max(spec.exceptions, 1):
            continue
        lo, hi = part.interval(n)
        before = a.count_below(lo)
        cnt_in = a.count_below(hi) - before
        checkpoint = lo + cnt_in
        profile = Fraction(image.count_below(checkpoint), checkpoint)
        bound = Fraction(spec.j * n, spec.j * n + spec.k)
        rows.append(DisruptionRow(n, checkpoint, profile, bound))
    return rows


# -- block sets ----------------------------------------------------------------

def unrank_combination(n: int, k: int, v: int) -> list[int]:
    """v-th k-subset of range(n) in lexicographic order; v=0 gives range(k)."""
    if not 0 <= v < math.comb(n, k):
        raise PreconditionError(f"rank {v} out of range for C({n},{k})")
    out: list[int] = []
    x = 0
    while len(out) < k:
        c = math.comb(n - x - 1, k - len(out) - 1)
        if v < c:
            out.append(x)
        else:
            v -= c
        x += 1
    return out


def block_set(c: int, v: int, ell: Callable[[int], int],
              horizon: int = 1 << 20) -> LazySet:
    """Set filling, in every length-2^b interval of the dyadic grid (b >= c),
    the chunks selected by the v-th ell(c)-subset of 2^c; empty below the
    c-th grid cut.  Density is exactly ell(c)/2^c on interval boundaries.

    Grid: J_b = [j_b, j_{b+1}) with j_{b+1} = j_b + 4^b, split into 2^b
    intervals of length 2^b, each split into 2^c chunks of length 2^(b-c).
    """
    lc = ell(c)
    if not 1 <= lc <= (1 << c):
        raise PreconditionError(f"ell({c}) = {lc} outside [1, 2^{c}]")
    if not 0 <= v < math.comb(1 << c, lc):
        raise PreconditionError(
            f"variant {v} out of range: only C(2^{c}, {lc}) block patterns exist"
        )
    chosen = sorted(unrank_combination(1 << c, lc, v))
    chosen_set = frozenset(chosen)

    def j_cut(b: int) -> int:
        return ((1 << (2 * b)) - 1) // 3  # sum of 4^i for i < b

    def locate(x: int) -> int:
        b = 0
        while j_cut(b + 1) <= x:
            b += 1
        return b

    def member(x: int) -> bool:
        b = locate(x)
        if b < c:
            return False
        pos = (x - j_cut(b)) & ((1 << b) - 1)
        return (pos >> (b - c)) in chosen_set

    def count(x: int) -> int:
        from bisect import bisect_left
        total = 0
        b = c
        while j_cut(b) < x:
            lo = j_cut(b)
            span = min(x, j_cut(b + 1)) - lo
            full_intervals, rem = divmod(span, 1 << b)
            total += full_intervals * (lc << (b - c))
            if rem:
                chunk = 1 << (b - c)
                dfull, tail = divmod(rem, chunk)
                total += bisect_left(chosen, dfull) * chunk
                if dfull in chosen_set:
                    total += tail
            b += 1
        return total

    def element(i: int) -> int:
        return index_where_count_reaches(count, i + 1)

    s = LazySet.from_formula(element, count, name=f"blockset[{c},{v}]")
    s._mem_fn = member
    s.horizon_hint = horizon
    return s


# -- prefix mixing --------------------------------------------------------------

@dataclass
class MixerResult:
    sigma: LazyPermutation
    identity_witnesses: list[int]
    image_witnesses: list[int]
    complete: bool  # at least 3 witnesses of each kind realized


def sigma_mixer(pi: LazyPermutation, horizon: int) -> MixerResult:
    """Permutation agreeing with the identity on infinitely many prefixes and
    with π on infinitely many prefixes, both as set images.

    Alternates stages: map [0, q) onto [0, q), then onto π[[0, q')].  Within
    each stage the target map (identity resp. π) is copied pointwise wherever
    its value is still unassigned; only the few blocked positions (at most
    the previous boundary many) are patched order-preservingly.  Stage
    boundaries at least quadruple, so the pointwise copy dominates and the
    image's density behavior transfers along with the set equality.
    """
    pi.bijectivity_audit(min(horizon, 1 << 10))
    fwd: dict[int, int] = {}
    inv: dict[int, int] = {}
    p = 0
    prev_image: list[int] = []  # sorted image of [0, p)
    id_wit: list[int] = []
    pi_wit: list[int] = []
    kind = "identity"
    while True:
        if kind == "identity":
            q = max(p + 1, 4 * p, (prev_image[-1] + 1) if prev_image else 1)
            if q > horizon:
                break
            image = list(range(q))
            stage_map = lambda x: x
            id_wit.append(q)
        else:
            # π[[0, q)] must cover the already-assigned prefix [0, p)
            q = max(4 * p, closure_bound(pi, p) if p else 1, 1)
            if q > horizon:
                break
            image = sorted(pi.forward(x) for x in range(q))
            stage_map = pi.forward
            pi_wit.append(q)
        taken = set(prev_image)
        used: set[int] = set()
        blocked: list[int] = []
        for x in range(p, q):
            y = stage_map(x)
            if y in taken:
                blocked.append(x)
            else:
                fwd[x] = y
                inv[y] = x
                used.add(y)
        leftovers = [m for m in image if m not in taken and m not in used]
        for x, y in zip(blocked, leftovers):
            fwd[x] = y
            inv[y] = x
        prev_image = image
        p = q
        kind = "image" if kind == "identity" else "identity"

    def forward(n: int) -> int:
        if n in fwd:
            return fwd[n]
        raise HorizonError(f"sigma assigned below {p} only")

    def inverse(n: int) -> int:
        if n in inv:
            return inv[n]
        raise HorizonError(f"sigma inverse not yet determined at {n}")

    sigma = LazyPermutation(forward, inverse, name=f"mix({pi.name})")
    sigma.realized_below = p
    return MixerResult(sigma, id_wit, pi_wit,
                       complete=len(id_wit) >= 3 and len(pi_wit) >= 3)
