"""Executable two-sided reduction maps and their finite-horizon audits.

Each classical reduction is realized as a pair of maps plus an implication
checker.  A checker never claims refutation lightly: "inconclusive" is a
first-class outcome whenever the finite horizon cannot settle an
almost-everywhere or infinitely-often hypothesis.  A genuine "refuted" on a
hypothesis-satisfying instance is a build-breaking event.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .density import (
    DensityEstimate,
    VERDICT_OSC,
    VERDICT_VALUE,
    as_fraction,
    closure_bound,
    estimate_density,
    forward_closure_bound,
    image_set,
)
from .errors import (
    HorizonError,
    InconclusiveError,
    PreconditionError,
    ResourceError,
)
from .oracles import (
    IncreasingFilter,
    LazyPermutation,
    LazySet,
    Slalom,
    index_where_count_reaches,
    seeded_block_permutation,
)

CONFIRMED = "confirmed"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"


@dataclass
class ReductionVerdict:
    status: str
    detail: str = ""
    first_hit: int | None = None
    schedule: list[int] = field(default_factory=list)
    image_estimate: DensityEstimate | None = None


# -- slalom reduction ---------------------------------------------------------

def slalom_width(n: int) -> int:
    return (1 << n) + n + 1


def slalom_phi_plus(pi: LazyPermutation, n: int) -> set[int]:
    """[0, 2^n) together with the inverse images of 0..n; size <= 2^n + n + 1."""
    if n > 24:
        raise ResourceError(f"refusing to materialize 2^{n} slots; use the membership form")
    return set(range(1 << n)) | {pi.inverse(k) for k in range(n + 1)}


def slalom_phi_plus_slalom(pi: LazyPermutation) -> Slalom:
    return Slalom(slalom_width, lambda n: frozenset(slalom_phi_plus(pi, n)),
                  name=f"slalom+({pi.name})")


def _slalom_contains(pi: LazyPermutation, n: int, x: int) -> bool:
    if x.bit_length() <= n:  # x < 2^n
        return True
    return any(pi.inverse(k) == x for k in range(n + 1))


def _suffix_threshold(g: Callable[[int], int], ok: Callable[[int], bool],
                      audit_hi: int, what: str) -> int:
    """Least n0 <= audit_hi with ok(k) for every k in [n0, audit_hi]."""
    last_fail = -1
    for k in range(audit_hi + 1):
        if not ok(k):
            last_fail = k
    if last_fail >= audit_hi:
        raise PreconditionError(f"{what} fails through the audited prefix")
    return last_fail + 1


def slalom_phi_minus(g: Callable[[int], int], horizon: int,
                     audit_hi: int = 32) -> tuple[LazySet, list[int], int]:
    """Recursion a_0 = 0, a_{n+1} = 2^(a_n) below the domination threshold and
    g(a_n) past it; realized strictly below the horizon."""
    n0 = _suffix_threshold(g, lambda k: g(k).bit_length() > k, audit_hi,
                           "g(n) >= 2^n")
    schedule = [0]
    bits = horizon.bit_length()
    while True:
        n = len(schedule) - 1
        a = schedule[-1]
        if n < n0:
            if a >= bits:
                break
            nxt = 1 << a
        else:
            nxt = g(a)
            if nxt.bit_length() <= a:
                raise PreconditionError(
                    f"g({a}) = {nxt} dropped below 2^{a} during the recursion"
                )
        if nxt >= horizon:
            break
        schedule.append(nxt)
    s = LazySet.from_finite_prefix(schedule, valid_below=horizon,
                                   name="slalom-minus")
    return s, schedule, n0


def check_slalom_reduction(pi: LazyPermutation, g: Callable[[int], int],
                           horizon: int, tol=Fraction(1, 100),
                           audit_hi: int = 24) -> ReductionVerdict:
    """Audit the evasion hypothesis, the push-forward inequality
    π(a_{n+1}) > a_n on the realized tail, and the image's density-0 verdict."""
    for n in range(audit_hi + 1):
        if _slalom_contains(pi, n, g(n)):
            return ReductionVerdict(INCONCLUSIVE, f"evasion hypothesis hit at n={n}",
                                    first_hit=n)
    a_set, schedule, n0 = slalom_phi_minus(g, horizon, audit_hi)
    for idx in range(max(n0, 0), len(schedule) - 1):
        a, b = schedule[idx], schedule[idx + 1]
        if a > audit_hi and _slalom_contains(pi, a, b):
            return ReductionVerdict(INCONCLUSIVE,
                                    f"evasion hypothesis hit at used argument {a}",
                                    first_hit=a, schedule=schedule)
        if pi.forward(b) <= a:
            return ReductionVerdict(REFUTED,
                                    f"pi(a_{idx + 1}) = {pi.forward(b)} <= a_{idx} = {a}",
                                    schedule=schedule)
    est = estimate_density(image_set(pi, a_set, horizon), horizon, tol=tol)
    if est.verdict == VERDICT_VALUE and est.value <= as_fraction(tol):
        return ReductionVerdict(CONFIRMED, schedule=schedule, image_estimate=est)
    return ReductionVerdict(INCONCLUSIVE, "image density did not settle at 0",
                            schedule=schedule, image_estimate=est)


def evading_slalom_function(jitter: int = 0) -> Callable[[int], int]:
    """g(n) = 2^n + n + 2 + (jitter mod 3): never meets the slalom of a
    dyadic-block permutation (inverse images of k <= n stay below 2n + 2)."""
    off = 2 + jitter % 3

    def g(n: int) -> int:
        return (1 << n) + n + off

    return g


# -- displacement reduction ----------------------------------------------------

def banakh_width(n: int) -> int:
    return 3 * (n + 1)


def banakh_phi_plus(pi: LazyPermutation, n: int) -> set[int]:
    """[0, n] together with forward and inverse images of 0..n; size <= 3(n+1)."""
    out = set(range(n + 1))
    for k in range(n + 1):
        out.add(pi.forward(k))
        out.add(pi.inverse(k))
    return out


def banakh_phi_plus_slalom(pi: LazyPermutation) -> Slalom:
    return Slalom(banakh_width, lambda n: frozenset(banakh_phi_plus(pi, n)),
                  name=f"displacement+({pi.name})")


def _banakh_contains(pi: LazyPermutation, n: int, x: int) -> bool:
    if x <= n:
        return True
    return any(pi.forward(k) == x or pi.inverse(k) == x for k in range(n + 1))


def check_banakh_reduction(pi: LazyPermutation, g: Callable[[int], int],
                           horizon: int, audit_hi: int = 24) -> ReductionVerdict:
    """Audit that, past the threshold, displaced members leave the set: the
    tail of {a in x : a != pi(a) in x} is empty on the realized prefix."""
    for n in range(audit_hi + 1):
        if _banakh_contains(pi, n, g(n)):
            return ReductionVerdict(INCONCLUSIVE, f"evasion hypothesis hit at n={n}",
                                    first_hit=n)
    n0 = _suffix_threshold(g, lambda k: g(k) >= k + 1, audit_hi, "g(n) >= n+1")
    schedule = [0]
    while True:
        n = len(schedule) - 1
        a = schedule[-1]
        nxt = a + 1 if n < n0 else g(a)
        if nxt <= a:
            raise PreconditionError(f"g({a}) = {nxt} is not increasing")
        if nxt >= horizon:
            break
        schedule.append(nxt)
    x = LazySet.from_finite_prefix(schedule, valid_below=horizon,
                                   name="displacement-minus")
    members = set(schedule)
    for idx in range(n0 + 1, len(schedule)):
        a = schedule[idx]
        if a > audit_hi and _banakh_contains(pi, schedule[idx - 1], a):
            return ReductionVerdict(INCONCLUSIVE,
                                    f"evasion hypothesis hit at used argument "
                                    f"{schedule[idx - 1]}",
                                    first_hit=schedule[idx - 1], schedule=schedule)
        v = pi.forward(a)
        if v != a and v < horizon and v in members:
            return ReductionVerdict(REFUTED,
                                    f"displaced member pi({a}) = {v} stayed in the set",
                                    schedule=schedule)
    return ReductionVerdict(CONFIRMED, schedule=schedule)


def evading_banakh_function(jitter: int = 0) -> Callable[[int], int]:
    """g(n) = 2n + 3 + (jitter mod 3): clears [0, n] and both image columns of
    a dyadic-block permutation."""
    off = 3 + jitter % 3

    def g(n: int) -> int:
        return 2 * n + off

    return g


# -- unbounding reduction --------------------------------------------------------

def unbounding_phi_plus(pi: LazyPermutation, n: int) -> int:
    """max of both images on 0..n, plus 2^n; monotone in n."""
    m = 0
    for k in range(n + 1):
        f, i = pi.forward(k), pi.inverse(k)
        if f > m:
            m = f
        if i > m:
            m = i
    return m + (1 << n)


@dataclass
class BoundaryAudit:
    boundary: int
    image_count: int
    set_count: int

    @property
    def equal(self) -> bool:
        return self.image_count == self.set_count


@dataclass
class UnboundingReport:
    status: str
    i_values: list[int]  # realized recursion values (last one may exceed horizon)
    blocks: LazySet
    boundary_audits: list[BoundaryAudit]
    set_estimate: DensityEstimate | None = None
    image_estimate: DensityEstimate | None = None
    detail: str = ""


def _alternating_blocks(i_values: Sequence[int], horizon: int) -> LazySet:
    """Union of [i_{4t}, i_{4t+2}): membership decided below the last realized
    i-value (which is at least the horizon)."""
    ivals = list(i_values)

    def member(m: int) -> bool:
        j = bisect_right(ivals, m) - 1
        return j % 4 in (0, 1)

    def count(x: int) -> int:
        total = 0
        for j in range(0, len(ivals) - 1, 4):
            lo = ivals[j]
            hi = ivals[j + 2] if j + 2 < len(ivals) else ivals[-1]
            if lo >= x:
                break
            total += max(0, min(x, hi) - lo)
        return total

    def element(i: int) -> int:
        total = 0
        for j in range(0, len(ivals) - 1, 4):
            lo = ivals[j]
            hi = ivals[j + 2] if j + 2 < len(ivals) else ivals[-1]
            size = hi - lo
            if i < total + size:
                return lo + (i - total)
            total += size
        raise HorizonError(f"only {total} block elements realized")

    s = LazySet.from_formula(element, count, name="alternating-blocks",
                             valid_below=min(ivals[-1], 1 << 62))
    s._mem_fn = member
    return s


def unbounding_osc_witness(pi: LazyPermutation, g: Callable[[int], int],
                           horizon: int, tol=Fraction(1, 100),
                           gap=Fraction(1, 4), burn_in: int | None = None,
                           audit_hi: int = 16) -> UnboundingReport:
    """Build the alternating block set from the escape recursion and audit
    that π moves it rigidly: counts agree at the realized odd boundaries and
    the image's density evidence oscillates."""
    for n in range(audit_hi + 1):
        if g(n) < unbounding_phi_plus(pi, n):
            return UnboundingReport(INCONCLUSIVE, [], None, [],
                                    detail=f"domination fails at n={n}")
    n0 = _suffix_threshold(g, lambda k: g(k).bit_length() > k, audit_hi,
                           "g(n) >= 2^n")
    i_values = [0]
    while i_values[-1] < horizon:
        n = len(i_values) - 1
        cur = i_values[-1]
        if n < n0:
            if cur > (1 << 26):
                raise ResourceError(
                    f"tower step 2^{cur} is too large to materialize"
                )
            nxt = 1 << cur
        else:
            nxt = g(cur)
            if nxt.bit_length() <= cur:
                return UnboundingReport(INCONCLUSIVE, i_values, None, [],
                                        detail=f"g({cur}) fell below 2^{cur}")
        if nxt <= cur:
            return UnboundingReport(INCONCLUSIVE, i_values, None, [],
                                    detail=f"recursion stalled at {cur}")
        i_values.append(nxt)
    blocks = _alternating_blocks(i_values, horizon)
    audits = []
    for j in range(1, len(i_values), 2):
        v = i_values[j]
        if v > horizon:
            break
        img_count = sum(1 for m in range(v) if blocks.contains(pi.inverse(m)))
        audits.append(BoundaryAudit(v, img_count, blocks.count_below(v)))
    if burn_in is None:
        burn_in = horizon // 64
    set_est = estimate_density(blocks, horizon, tol=tol, gap=gap, burn_in=burn_in)
    img = image_set(pi, blocks, horizon)
    img_est = estimate_density(img, horizon, tol=tol, gap=gap, burn_in=burn_in)
    ok = all(a.equal for a in audits) and img_est.verdict == VERDICT_OSC
    if all(a.equal for a in audits):
        status = CONFIRMED if ok else INCONCLUSIVE
        detail = "" if ok else "image estimate did not oscillate in the window"
    else:
        status = REFUTED
        detail = "rigid-count audit failed at a realized boundary"
    return UnboundingReport(status, i_values, blocks, audits,
                            set_estimate=set_est, image_estimate=img_est,
                            detail=detail)


def seeded_unbounding_pair(seed: int, dip_base: int = 11000
                           ) -> tuple[LazyPermutation, Callable[[int], int]]:
    """A dyadic-block permutation with a dominating g whose single tuned value
    parks one block gap inside the observation window."""
    pi = seeded_block_permutation(seed)
    memo: dict[int, int] = {}

    def phi(n: int) -> int:
        v = memo.get(n)
        if v is None:
            v = unbounding_phi_plus(pi, n)
            memo[n] = v
        return v

    i1 = phi(0)
    i2 = phi(i1)
    i3 = phi(i2)
    dip = max(dip_base + (seed * 37) % 500, phi(i3))
    override = {i3: dip}

    def g(n: int) -> int:
        v = override.get(n)
        return v if v is not None else phi(n)

    return pi, g


# -- prefix extension game -------------------------------------------------------

@dataclass(frozen=True)
class ExtensionStep:
    j: int
    case: int  # 1..4 on (π(2j) in target, π(2j+1) in target)
    bit: int
    c: int
    d: int


@dataclass
class ExtensionGameReport:
    bits: tuple[int, ...]
    start: int  # prefix length the game began from
    n: int      # target boundary: the count identity is about [0, 2n)
    m: int      # final bit-string length
    direction: str
    steps: list[ExtensionStep]
    c_final: int
    d_final: int
    image_count: int  # |π[φ₋(t)] ∩ 2n| counted independently

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.image_count, 2 * self.n)

    @property
    def count_identity_holds(self) -> bool:
        return self.d_final == 2 * self.n and self.c_final == self.image_count


def doubled_bits_set(bits: Sequence[int]) -> LazySet:
    """Position 2i is in iff bits[i] = 1, position 2i+1 iff bits[i] = 0."""
    elems = [2 * i if b else 2 * i + 1 for i, b in enumerate(bits)]
    return LazySet.from_finite_prefix(elems, valid_below=2 * len(bits),
                                      name="doubled-bits")


def covmeager_extension_game(pi: LazyPermutation, s: Sequence[int], n0: int,
                             horizon: int, direction: str = "high"
                             ) -> ExtensionGameReport:
    """Extend the bit string s so the doubled-bit set's image fills at least
    (direction="high") or at most ("low") half of [0, 2n).

    The extension is forced on split steps: when exactly one of π(2j),
    π(2j+1) lands below the target boundary, the bit is chosen so the landing
    position carries a member (resp. non-member).  The per-step invariant
    c/d >= 1/2 (resp. <=) holds along the whole log.
    """
    if direction not in ("high", "low"):
        raise PreconditionError("direction must be 'high' or 'low'")
    if n0 < 1:
        raise PreconditionError("n0 must be >= 1")
    bits = list(s)
    if len(bits) < n0:
        bits = bits + [0] * (n0 - len(bits))
    n0 = len(bits)
    fb = forward_closure_bound(pi, 2 * n0)
    n = max(n0, (fb + 1) // 2)
    ib = closure_bound(pi, 2 * n)
    m = max(n, (ib + 1) // 2)
    if 2 * m > horizon:
        raise HorizonError(
            f"closure chain needs {2 * m} realized positions, horizon is {horizon}"
        )
    c, d = n0, 2 * n0
    steps: list[ExtensionStep] = []
    for j in range(n0, m):
        in0 = pi.forward(2 * j) < 2 * n
        in1 = pi.forward(2 * j + 1) < 2 * n
        if in0 and in1:
            case, bit = 1, 0
        elif not in0 and not in1:
            case, bit = 2, 0
        elif in0:
            case, bit = 3, 1 if direction == "high" else 0
        else:
            case, bit = 4, 0 if direction == "high" else 1
        bits.append(bit)
        if in0 and bit == 1:
            c += 1
        if in1 and bit == 0:
            c += 1
        d += (1 if in0 else 0) + (1 if in1 else 0)
        steps.append(ExtensionStep(j, case, bit, c, d))
    phi = doubled_bits_set(bits)
    image_count = sum(1 for p in range(2 * n) if phi.contains(pi.inverse(p)))
    return ExtensionGameReport(tuple(bits), n0, n, m, direction, steps, c, d,
                               image_count)


# -- order-preserving transplant (reaping map) ------------------------------------

def reaping_phi_plus(y: LazySet, z: LazySet, horizon: int) -> LazyPermutation:
    """The unique permutation sending the square-indexed members of y onto z
    and everything else onto the complement of z, order-preserving on both
    parts.

    The selected subset y' = {y_(k^2)} has density 0 (|y' ∩ n| grows like
    sqrt), so the image of any x ⊇ y picks up all of z on top of the
    transplanted remainder.
    """
    est = estimate_density(z, horizon)
    if est.verdict != VERDICT_VALUE:
        raise InconclusiveError(
            f"density of z did not stabilize at horizon {horizon}: {est.verdict}"
        )
    if est.value <= 0:
        raise PreconditionError("z must have positive density")

    def yprime_count(m: int) -> int:
        # #{k : y.element(k^2) < m}, by doubling+bisection on k
        if m <= y.element(0):
            return 0
        hi = 1
        while y.element(hi * hi) < m:
            hi *= 2
        lo = 0
        while lo < hi:
            mid = (lo + hi) // 2
            if y.element(mid * mid) < m:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def in_yprime(x: int) -> int | None:
        if not y.contains(x):
            return None
        rank = y.count_below(x)
        k = math.isqrt(rank)
        return k if k * k == rank else None

    non_yprime = IncreasingFilter(lambda n: in_yprime(n) is None)

    def forward(x: int) -> int:
        k = in_yprime(x)
        if k is not None:
            return z.element(k)
        rank = x - yprime_count(x)
        return z.absent_element(rank)

    def inverse(p: int) -> int:
        if z.contains(p):
            k = z.count_below(p)
            return y.element(k * k)
        rank = p - z.count_below(p)
        return non_yprime.element(rank)

    return LazyPermutation(forward, inverse,
                           name=f"transplant({y.name}->{z.name})")


# -- random characteristic sequences ----------------------------------------------

@dataclass(frozen=True)
class SampleStats:
    trials: int
    horizon: int
    checkpoint: int
    within_at_horizon: float
    permuted_within_at_horizon: float
    permuted_within_at_checkpoint: float


def _numpy_block_permutation(horizon: int, seed: int) -> np.ndarray:
    fwd = np.arange(horizon, dtype=np.int64)
    j = 0
    while (1 << j) < horizon:
        lo = 1 << j
        hi = min(1 << (j + 1), horizon)
        rng = np.random.default_rng(seed * 1_000_003 + j)
        fwd[lo:hi] = lo + rng.permutation(hi - lo)
        j += 1
    return fwd


def bernoulli_density_sample(r: float, trials: int, horizon: int, seed: int,
                             tol: float = 0.02, perm_seed: int = 1) -> SampleStats:
    """Sample Bernoulli(r) characteristic sequences and report how often the
    profile sits within tol of r, before and after a fixed seeded block
    permutation (the permuted profile is also read at an interior checkpoint,
    where the block permutation genuinely rearranges the count)."""
    if not 0 < r < 1:
        raise PreconditionError("r must lie strictly between 0 and 1")
    if trials < 1:
        raise PreconditionError("need at least one trial")
    rng = np.random.default_rng(seed)
    fwd = _numpy_block_permutation(horizon, perm_seed)
    checkpoint = max(1, (3 * horizon) // 4)
    hit = hit_perm = hit_perm_cp = 0
    for _ in range(trials):
        x = rng.random(horizon) < r
        count = int(x.sum())
        if abs(count / horizon - r) <= tol:
            hit += 1
        images = fwd[x]
        if abs(int((images < horizon).sum()) / horizon - r) <= tol:
            hit_perm += 1
        if abs(int((images < checkpoint).sum()) / checkpoint - r) <= tol:
            hit_perm_cp += 1
    return SampleStats(trials, horizon, checkpoint, hit / trials,
                       hit_perm / trials, hit_perm_cp / trials)


# -- almost disjoint witnesses -----------------------------------------------------

def _branch_codes(count: int, seed: int) -> tuple[int, list[int]]:
    depth = max(1, (2 * count - 1).bit_length())
    rnd = random.Random(seed)
    return depth, rnd.sample(range(1 << depth), count)


def _node_index(code: int, level: int, depth: int) -> int:
    prefix = code & ((1 << min(level, depth)) - 1)
    return (1 << level) - 1 + prefix


def almost_disjoint_witnesses(count: int, base: LazySet | None, seed: int,
                              horizon: int = 1 << 16) -> tuple[list[LazySet], int]:
    """Branch-coded almost disjoint family; returns (witnesses, split_depth).

    With a base set, witness i consists of the base elements indexed along
    branch i of the binary tree, so two witnesses share at most split_depth
    elements and each inherits the base's sparseness.  Without a base, each
    witness is a union of doubling blocks along its branch, so its profile
    oscillates while intersections stay confined to the shared prefix.
    """
    if not 2 <= count <= 1 << 12:
        raise PreconditionError("count must be between 2 and 4096")
    depth, codes = _branch_codes(count, seed)
    witnesses: list[LazySet] = []
    if base is not None:
        cap = base.valid_below if base.valid_below is not None else horizon
        for w, code in enumerate(codes):
            elems = []
            level = 0
            while True:
                idx = _node_index(code, level, depth)
                try:
                    e = base.element(idx)
                except HorizonError:
                    break
                if e >= cap:
                    break
                elems.append(e)
                level += 1
            witnesses.append(LazySet.from_finite_prefix(
                elems, valid_below=cap, name=f"branch-{w}"))
        return witnesses, depth

    for w, code in enumerate(codes):
        nodes: list[int] = []
        level = 0
        while 4 ** _node_index(code, level, depth) < horizon:
            nodes.append(_node_index(code, level, depth))
            level += 1
        node_set = sorted(set(nodes))

        def make(nodes_sorted: list[int]) -> LazySet:
            def count_fn(x: int) -> int:
                total = 0
                for u in nodes_sorted:
                    lo = 4 ** u
                    if lo >= x:
                        break
                    total += max(0, min(x, 2 * lo) - lo)
                return total

            def element(i: int) -> int:
                return index_where_count_reaches(count_fn, i + 1)

            s = LazySet.from_formula(element, count_fn)
            return s

        s = make(node_set)
        s.name = f"osc-branch-{w}"
        witnesses.append(s)
    return witnesses, depth


def pairwise_intersection_matrix(witnesses: Sequence[LazySet],
                                 bound: int) -> list[list[int]]:
    """Brute-force |W_i ∩ W_j ∩ [0, bound)| for every pair."""
    realized = [set(w.iter_below(bound)) for w in witnesses]
    k = len(realized)
    return [[len(realized[i] & realized[j]) if i != j else -1 for j in range(k)]
            for i in range(k)]


# -- registry ----------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionPair:
    """Named two-sided reduction with a per-instance implication checker."""

    name: str
    run_trial: Callable[[int, int], ReductionVerdict]  # (seed, horizon)


def _slalom_trial(seed: int, horizon: int) -> ReductionVerdict:
    pi = seeded_block_permutation(seed)
    return check_slalom_reduction(pi, evading_slalom_function(seed), horizon)


def _banakh_trial(seed: int, horizon: int) -> ReductionVerdict:
    pi = seeded_block_permutation(seed)
    return check_banakh_reduction(pi, evading_banakh_function(seed), horizon)


def _unbounding_trial(seed: int, horizon: int) -> ReductionVerdict:
    pi, g = seeded_unbounding_pair(seed)
    report = unbounding_osc_witness(pi, g, horizon)
    est = report.image_estimate
    return ReductionVerdict(report.status, report.detail,
                            schedule=report.i_values, image_estimate=est)


REDUCTIONS: dict[str, ReductionPair] = {
    "slalom": ReductionPair("slalom", _slalom_trial),
    "banakh": ReductionPair("banakh", _banakh_trial),
    "unbounding": ReductionPair("unbounding", _unbounding_trial),
}


def run_reduction(name: str, trials: int, horizon: int, seed: int) -> dict:
    """Run seeded trials of a named reduction; aggregation is order-independent."""
    if name not in REDUCTIONS:
        raise PreconditionError(f"unknown reduction {name!r}")
    pair = REDUCTIONS[name]
    tally = {CONFIRMED: 0, REFUTED: 0, INCONCLUSIVE: 0}
    witnesses = []
    for t in range(trials):
        verdict = pair.run_trial(seed + t, horizon)
        tally[verdict.status] += 1
        witnesses.append({
            "seed": seed + t,
            "status": verdict.status,
            "detail": verdict.detail,
            "schedule_prefix": [str(v) for v in verdict.schedule[:8]],
        })
    return {
        "reduction": name,
        "trials": trials,
        "horizon": horizon,
        "confirmed": tally[CONFIRMED],
        "refuted": tally[REFUTED],
        "inconclusive": tally[INCONCLUSIVE],
        "witnesses": witnesses,
    }
