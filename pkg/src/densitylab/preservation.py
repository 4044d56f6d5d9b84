"""Decide the two finite combinatorial conditions that characterize density
preservation, and realize the explicit non-preserving block permutation with
its exact relative-density checkpoints.
"""

from __future__ import annotations

import random
from bisect import bisect_left, insort
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .density import (
    DensityEstimate,
    VERDICT_OSC,
    VERDICT_UNDETERMINED,
    VERDICT_VALUE,
    estimate_relative_density,
    image_set,
    relative_density_profile,
)
from .errors import PreconditionError, ResourceError
from .oracles import LazyPermutation, LazySet

# -- interval decompositions ---------------------------------------------------

@dataclass(frozen=True)
class IntervalDecomposition:
    """π⁻¹[[0, m)] written as maximal disjoint intervals [lo, hi)."""

    m: int
    intervals: tuple[tuple[int, int], ...]

    def audit(self) -> bool:
        total = 0
        for (lo, hi), nxt in zip(self.intervals, self.intervals[1:] + ((None, None),)):
            if hi <= lo:
                raise PreconditionError("empty or inverted interval in decomposition")
            total += hi - lo
            if nxt[0] is not None and nxt[0] <= hi:
                raise PreconditionError("adjacent or overlapping intervals; not maximal")
        if total != self.m:
            raise PreconditionError(
                f"decomposition covers {total} elements, expected {self.m}"
            )
        return True


def interval_count(pi: LazyPermutation, m: int) -> IntervalDecomposition:
    """Exact maximal-interval decomposition of the inverse image of [0, m)."""
    if m < 1:
        raise PreconditionError("m must be >= 1")
    xs = sorted(pi.inverse(k) for k in range(m))
    intervals = []
    lo = prev = xs[0]
    for x in xs[1:]:
        if x == prev + 1:
            prev = x
        else:
            intervals.append((lo, prev + 1))
            lo = prev = x
    intervals.append((lo, prev + 1))
    return IntervalDecomposition(m, tuple(intervals))


def interval_count_profile(pi: LazyPermutation, horizon: int) -> list[int]:
    """counts[m-1] = number of maximal intervals of π⁻¹[[0, m)] for each
    m <= horizon, by an incremental sweep."""
    top = max(closure := [pi.inverse(k) for k in range(horizon)]) + 2
    present = bytearray(top + 1)
    counts = []
    current = 0
    for k in range(horizon):
        x = closure[k]
        left = present[x - 1] if x > 0 else 0
        right = present[x + 1]
        present[x] = 1
        current += 1 - left - right
        counts.append(current)
    return counts


# -- collated-pair condition (bounded inverse-interval counts) -------------------

@dataclass
class ConditionReport:
    condition: str
    k: int
    horizon: int
    passed: bool
    max_violation: int  # largest witnessed pair size (0 when none found)
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None = None  # (M, N)

    @property
    def label(self) -> str:
        return f"{'pass' if self.passed else 'fail'}@{self.horizon}"


def condition_a_check(pi: LazyPermutation, k: int, horizon: int) -> ConditionReport:
    """Pass iff every collated pair M, N with π[M] < π[N] inside the prefix
    has size at most k; equivalently max interval count of π⁻¹[[0, m)] over
    m <= horizon is at most k.  A violating pair is reconstructed from the
    worst decomposition."""
    if k < 1:
        raise PreconditionError("k must be >= 1")
    counts = interval_count_profile(pi, horizon)
    worst = max(counts)
    m_star = counts.index(worst) + 1
    if worst <= k:
        return ConditionReport("A", k, horizon, True, worst)
    decomp = interval_count(pi, m_star)
    m_part = tuple(hi - 1 for lo, hi in decomp.intervals)
    n_part = tuple(hi for lo, hi in decomp.intervals)
    # audit the reconstruction: collated, with π[M] < π[N]
    collated = all(a < b for a, b in zip(m_part, n_part)) and all(
        b < a2 for b, a2 in zip(n_part, m_part[1:])
    )
    ordered = max(pi.forward(x) for x in m_part) < min(pi.forward(x) for x in n_part)
    if not (collated and ordered):
        raise PreconditionError("reconstructed collated pair failed its audit")
    return ConditionReport("A", k, horizon, False, worst, (m_part, n_part))


def _max_separated_violation(pi: LazyPermutation, horizon: int
                             ) -> tuple[int, int | None]:
    """Largest s such that some split p admits M ⊆ [0, p), N ⊆ [p, horizon)
    with |M| = |N| = s and π[N] < π[M]; order-statistic scan over splits."""
    values = [pi.forward(x) for x in range(horizon)]
    below: list[int] = []
    above = sorted(values)
    best_s, best_p = 0, None
    for p in range(1, horizon):
        v = values[p - 1]
        insort(below, v)
        del above[bisect_left(above, v)]
        cap = min(len(below), len(above))
        lo, hi = 0, cap
        # largest s with below[-s] > above[s-1]
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if mid and below[-mid] > above[mid - 1]:
                lo = mid
            else:
                hi = mid - 1
        if lo > best_s:
            best_s, best_p = lo, p
    return best_s, best_p


def condition_b_check(pi: LazyPermutation, k: int, horizon: int) -> ConditionReport:
    """Pass iff every fully separated pair M < N with π[N] < π[M] inside the
    prefix has size at most k.

    For each split point, comparing the s largest forward values below the
    split against the s smallest at-or-above it witnesses a violation iff one
    exists there, so the scan is exact without enumerating pairs.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    best_s, best_p = _max_separated_violation(pi, horizon)
    if best_s <= k:
        return ConditionReport("B", k, horizon, True, best_s)
    s, p = best_s, best_p
    below = sorted(range(p), key=pi.forward)[-s:]
    above = sorted(range(p, horizon), key=pi.forward)[:s]
    m_part = tuple(sorted(below))
    n_part = tuple(sorted(above))
    if not max(pi.forward(x) for x in n_part) < min(pi.forward(x) for x in m_part):
        raise PreconditionError("reconstructed separated pair failed its audit")
    return ConditionReport("B", k, horizon, False, best_s, (m_part, n_part))


# -- the explicit non-preserving permutation -------------------------------------

@dataclass
class CounterexampleBlocks:
    """Layout of the block permutation separating the two conditions' flavors
    of preservation, with its exact relative-density checkpoints."""

    depth: int
    k_sizes: list[int]          # k_i
    ell_sizes: list[int]        # ℓ_i = k_0 + ... + k_{i-1}
    m_blocks: list[tuple[int, int]]
    n_blocks: list[tuple[int, int]]
    prefix_end: int
    high_checkpoints: list[int]   # image ratio exactly 2/3 here
    half_checkpoints: list[int]   # image ratio exactly 1/2 here


MAX_COUNTEREXAMPLE_DEPTH = 6


def counterexample_blocks(depth: int) -> tuple[
    CounterexampleBlocks, LazyPermutation, LazySet, LazySet
]:
    """Realize the nested blocks M_i < N_i with π-images in swapped order.

    Source layout is contiguous: M_0 N_0 M_1 N_1 ...; the permutation shifts
    each N_i block in front of its M_i block and is the identity beyond the
    realized prefix.  The relative density of A in B tends to 1/2, while the
    image ratios hit exactly 2/3 just past each relocated A_i and exactly 1/2
    at the start of each π[M_i].
    """
    if not 1 <= depth <= MAX_COUNTEREXAMPLE_DEPTH:
        raise ResourceError(
            f"depth must be between 1 and {MAX_COUNTEREXAMPLE_DEPTH}"
        )
    k_sizes = [2]
    for i in range(1, depth):
        k_sizes.append((1 << i) * sum(k_sizes))
    ell = [0]
    for i in range(depth):
        ell.append(ell[-1] + k_sizes[i])
    m_blocks, n_blocks = [], []
    cursor = 0
    for i in range(depth):
        m_blocks.append((cursor, cursor + k_sizes[i]))
        cursor += k_sizes[i]
        n_blocks.append((cursor, cursor + k_sizes[i]))
        cursor += k_sizes[i]
    prefix_end = cursor

    m_starts = [lo for lo, _ in m_blocks]

    def forward(x: int) -> int:
        if x >= prefix_end:
            return x
        i = bisect_left(m_starts, x + 1) - 1
        lo, hi = m_blocks[i]
        if x < hi:
            return x + k_sizes[i]  # M_i shifts right past N_i's image
        return x - k_sizes[i]      # N_i shifts left to the front

    pair_boundaries = frozenset(m_starts)
    pi = LazyPermutation(forward, forward, name=f"counterexample-depth-{depth}",
                         closed_prefix_fn=lambda h: h >= prefix_end or
                         h in pair_boundaries)

    a_elems: list[int] = []
    for i in range(depth):
        m_lo, m_hi = m_blocks[i]
        n_lo, n_hi = n_blocks[i]
        li = ell[i]
        # A_i: the first ℓ_i of N_i (image becomes an initial segment);
        # B_i is the next ℓ_i (in B automatically); the tail alternates.
        a_elems.extend(range(n_lo, n_lo + li))
        tail_lo = n_lo + 2 * li
        a_elems.extend(range(tail_lo, n_hi, 2))
        a_elems.extend(range(m_lo, m_hi, 2))
    a_set = LazySet.from_finite_prefix(sorted(a_elems), valid_below=prefix_end,
                                       name=f"cx-A-{depth}")
    b_set = LazySet.from_formula(lambda i: i, lambda n: min(n, prefix_end),
                                 name=f"cx-B-{depth}", valid_below=prefix_end)

    high = [3 * ell[i] for i in range(1, depth)]
    half = [2 * ell[i] + k_sizes[i] for i in range(1, depth)]
    record = CounterexampleBlocks(depth, k_sizes, ell[1:], m_blocks, n_blocks,
                                  prefix_end, high, half)
    return record, pi, a_set, b_set


def counterexample_checkpoint_rows(
    record: CounterexampleBlocks, pi: LazyPermutation, a_set: LazySet,
    b_set: LazySet
) -> list[tuple[str, int, Fraction]]:
    """Exact image-side relative ratios at the designated checkpoints,
    computed through the generic profile machinery."""
    bound = record.prefix_end
    image_a = LazySet.from_finite_prefix(
        sorted(pi.forward(x) for x in a_set.iter_below(bound)), bound,
        name="cx-image-A")
    image_b = LazySet.from_finite_prefix(
        sorted(pi.forward(x) for x in b_set.iter_below(bound)), bound,
        name="cx-image-B")
    rows = []
    for label, points in (("high", record.high_checkpoints),
                          ("half", record.half_checkpoints)):
        profile = relative_density_profile(image_a, image_b, points)
        for n, v in zip(profile.checkpoints, profile.values):
            rows.append((label, n, v))
    return rows


# -- preservation audit ------------------------------------------------------------

def _verdict_interval(est: DensityEstimate) -> tuple[Fraction, Fraction] | None:
    if est.verdict == VERDICT_VALUE:
        return est.value, est.value
    if est.verdict in (VERDICT_OSC, VERDICT_UNDETERMINED):
        return est.lo, est.hi
    return None


def estimate_discrepancy(before: DensityEstimate, after: DensityEstimate) -> Fraction:
    """Hausdorff-style distance between the two verdict intervals."""
    b = _verdict_interval(before)
    a = _verdict_interval(after)
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


@dataclass
class PreservationAudit:
    trials: int
    skipped: int
    max_discrepancy: Fraction
    rows: list[tuple[str, Fraction]]


def seeded_subset_pair(seed: int, horizon: int, outer: float = 0.75,
                       inner: float = 0.5) -> tuple[LazySet, LazySet]:
    """B ~ Bernoulli(outer), A ⊆ B keeping each member with probability inner."""
    rng = np.random.default_rng(seed)
    draws = rng.random(horizon)
    keep = rng.random(horizon)
    b_pos = np.flatnonzero(draws < outer)
    a_pos = b_pos[keep[b_pos] < inner]
    b = LazySet.from_finite_prefix([int(x) for x in b_pos], horizon,
                                   name=f"pair-B-{seed}")
    a = LazySet.from_finite_prefix([int(x) for x in a_pos], horizon,
                                   name=f"pair-A-{seed}")
    return a, b


def preservation_audit(
    pi: LazyPermutation,
    pairs: Sequence[tuple[LazySet, LazySet]] | None,
    horizon: int,
    seed: int = 0,
    trials: int = 4,
    tol=Fraction(1, 100),
) -> PreservationAudit:
    """Compare relative-density estimates before and after π on subset pairs
    with stabilized relative density; report the worst spread."""
    if pairs is None:
        pairs = [seeded_subset_pair(seed + t, horizon) for t in range(trials)]
    rows: list[tuple[str, Fraction]] = []
    skipped = 0
    worst = Fraction(0)
    for idx, (a, b) in enumerate(pairs):
        before = estimate_relative_density(a, b, horizon)
        if before.verdict == VERDICT_UNDETERMINED:
            skipped += 1
            continue
        img_a = image_set(pi, a, horizon)
        img_b = image_set(pi, b, horizon)
        after = estimate_relative_density(img_a, img_b, horizon)
        d = estimate_discrepancy(before, after)
        rows.append((f"pair-{idx}", d))
        if d > worst:
            worst = d
    return PreservationAudit(len(pairs), skipped, worst, rows)


def seeded_condition_suite(seed: int, count: int = 4) -> list[LazyPermutation]:
    """The seeded permutations the acceptance criteria quantify over."""
    from .oracles import (
        block_reversal_permutation,
        even_odd_split_permutation,
        identity_permutation,
        seeded_block_permutation,
        swap_adjacent_pairs,
    )

    perms = [
        identity_permutation(),
        swap_adjacent_pairs(),
        block_reversal_permutation(),
        even_odd_split_permutation(),
    ]
    perms.extend(seeded_block_permutation(seed + t) for t in range(count))
    return perms
