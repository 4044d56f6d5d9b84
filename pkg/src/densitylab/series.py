"""Series-side constructions: p.c.c. evidence, greedy rearrangement to a
target, padding, absolutely convergent shifts, and mean rearrangement.

Series arithmetic is floating point with compensated summation; comparisons
against targets use strict thresholds so runs reproduce bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import HorizonError, PreconditionError
from .oracles import LazyPermutation, LazySet


class NeumaierSum:
    """Compensated accumulator; adding an exact zero leaves the state
    untouched, so padded runs reproduce the unpadded partial sums exactly."""

    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, v: float) -> None:
        if v == 0.0:
            return
        t = self.s + v
        if abs(self.s) >= abs(v):
            self.c += (self.s - t) + v
        else:
            self.c += (v - t) + self.s
        self.s = t

    @property
    def value(self) -> float:
        return self.s + self.c


@dataclass(frozen=True)
class SeriesSpec:
    """Deterministic term oracle with a working tolerance for partial sums."""

    term: Callable[[int], float]
    name: str = ""
    precision: float = 1e-12

    def partial_sum(self, n: int) -> float:
        acc = NeumaierSum()
        for i in range(n):
            acc.add(self.term(i))
        return acc.value

    def partial_sums(self, checkpoints: Sequence[int]) -> list[float]:
        out = []
        acc = NeumaierSum()
        prev = 0
        for n in checkpoints:
            for i in range(prev, n):
                acc.add(self.term(i))
            prev = n
            out.append(acc.value)
        return out


def alternating_harmonic() -> SeriesSpec:
    return SeriesSpec(lambda n: (1.0 if n % 2 == 0 else -1.0) / (n + 1),
                      name="alternating-harmonic")


# -- p.c.c. classification -------------------------------------------------------

@dataclass(frozen=True)
class Evidence:
    ok: bool
    attained: float
    threshold: float
    horizon: int


@dataclass(frozen=True)
class PccVerdict:
    terms_to_zero: Evidence
    positive_part_diverges: Evidence
    negative_part_diverges: Evidence

    @property
    def likely(self) -> bool:
        return (self.terms_to_zero.ok and self.positive_part_diverges.ok
                and self.negative_part_diverges.ok)


def pcc_classify(s: SeriesSpec, horizon: int, divergence_bar: float = 4.0,
                 term_tail_bound: float = 0.05) -> PccVerdict:
    """Evidence triple: tail terms small, positive and negative parts past the
    divergence bar.  Verdicts are horizon evidence, not proofs."""
    if horizon < 1000:
        raise PreconditionError("horizon must be >= 1000")
    pos = NeumaierSum()
    neg = NeumaierSum()
    tail_start = horizon - horizon // 4
    tail_max = 0.0
    for n in range(horizon):
        t = s.term(n)
        if t >= 0:
            pos.add(t)
        else:
            neg.add(t)
        if n >= tail_start and abs(t) > tail_max:
            tail_max = abs(t)
    return PccVerdict(
        Evidence(tail_max <= term_tail_bound, tail_max, term_tail_bound, horizon),
        Evidence(pos.value >= divergence_bar, pos.value, divergence_bar, horizon),
        Evidence(-neg.value >= divergence_bar, neg.value, -divergence_bar, horizon),
    )


# -- rearrangement targets ---------------------------------------------------------

@dataclass(frozen=True)
class RearrangementTarget:
    kind: str  # finite | plus_infinity | minus_infinity | oscillation
    value: float | None = None
    lo: float | None = None
    hi: float | None = None

    @classmethod
    def finite(cls, r: float) -> "RearrangementTarget":
        return cls("finite", value=float(r))

    @classmethod
    def plus_infinity(cls) -> "RearrangementTarget":
        return cls("plus_infinity")

    @classmethod
    def minus_infinity(cls) -> "RearrangementTarget":
        return cls("minus_infinity")

    @classmethod
    def oscillation(cls, lo: float, hi: float) -> "RearrangementTarget":
        if not lo < hi:
            raise PreconditionError("oscillation needs lo < hi")
        return cls("oscillation", lo=float(lo), hi=float(hi))


class _Pool:
    """In-order stream of term indices matching a sign predicate."""

    def __init__(self, s: SeriesSpec, want_nonneg: bool, scan_bound: int):
        self._s = s
        self._want = want_nonneg
        self._bound = scan_bound
        self._next = 0

    def take(self) -> tuple[int, float]:
        while self._next < self._bound:
            i = self._next
            self._next += 1
            t = self._s.term(i)
            if (t >= 0) == self._want:
                return i, t
        raise HorizonError(
            f"{'nonnegative' if self._want else 'negative'} term pool exhausted "
            f"below index {self._bound}"
        )


@dataclass(frozen=True)
class PhaseBoundary:
    position: int      # output length when the phase switched
    partial_sum: float
    last_term: float


def riemann_rearrange(s: SeriesSpec, target: RearrangementTarget,
                      horizon: int) -> LazyPermutation:
    """Greedy threshold rearrangement: consume nonnegative terms in order
    until the running sum strictly exceeds the current goal, then negative
    terms until strictly below, and so on.

    The emitted permutation carries `.phase_boundaries`; at each recorded
    switch the overshoot is at most the magnitude of the last consumed term.
    """
    verdict = pcc_classify(s, min(horizon, 1 << 17))
    if not verdict.likely:
        raise PreconditionError(
            "series did not classify as potentially conditionally convergent"
        )
    scan_bound = 8 * horizon + 64
    pos = _Pool(s, True, scan_bound)
    neg = _Pool(s, False, scan_bound)
    out: list[int] = []
    acc = NeumaierSum()
    boundaries: list[PhaseBoundary] = []
    last = 0.0

    def emit(idx: int, t: float) -> None:
        nonlocal last
        out.append(idx)
        acc.add(t)
        last = t

    if target.kind == "finite":
        goal_hi = goal_lo = target.value
        taking_pos = True
        while len(out) < horizon:
            if taking_pos:
                idx, t = pos.take()
                emit(idx, t)
                if acc.value > goal_hi:
                    boundaries.append(PhaseBoundary(len(out), acc.value, last))
                    taking_pos = False
            else:
                idx, t = neg.take()
                emit(idx, t)
                if acc.value < goal_lo:
                    boundaries.append(PhaseBoundary(len(out), acc.value, last))
                    taking_pos = True
    elif target.kind in ("plus_infinity", "minus_infinity"):
        sign = 1.0 if target.kind == "plus_infinity" else -1.0
        milestone = 1
        main = pos if sign > 0 else neg
        other = neg if sign > 0 else pos
        while len(out) < horizon:
            idx, t = main.take()
            emit(idx, t)
            if sign * acc.value > milestone:
                boundaries.append(PhaseBoundary(len(out), acc.value, last))
                if len(out) < horizon:
                    idx, t = other.take()
                    emit(idx, t)
                milestone += 1
    else:  # oscillation
        lo, hi = target.lo, target.hi
        taking_pos = True
        while len(out) < horizon:
            if taking_pos:
                idx, t = pos.take()
                emit(idx, t)
                if acc.value > hi:
                    boundaries.append(PhaseBoundary(len(out), acc.value, last))
                    taking_pos = False
            else:
                idx, t = neg.take()
                emit(idx, t)
                if acc.value < lo:
                    boundaries.append(PhaseBoundary(len(out), acc.value, last))
                    taking_pos = True

    inverse = {src: p for p, src in enumerate(out)}

    def fwd(p: int) -> int:
        if p < len(out):
            return out[p]
        raise HorizonError(f"rearrangement realized to {len(out)} positions")

    def inv(n: int) -> int:
        p = inverse.get(n)
        if p is None:
            raise HorizonError(f"source index {n} not consumed within the horizon")
        return p

    pi = LazyPermutation(fwd, inv, name=f"rearrange[{target.kind}]({s.name})",
                         valid_below=len(out))
    pi.phase_boundaries = boundaries
    pi.final_sum = acc.value
    return pi


def rearranged_partial_sums(s: SeriesSpec, pi: LazyPermutation,
                            checkpoints: Sequence[int]) -> list[float]:
    """Partial sums of n -> term(pi(n)) at the checkpoints."""
    acc = NeumaierSum()
    out = []
    prev = 0
    for n in checkpoints:
        for p in range(prev, n):
            acc.add(s.term(pi.forward(p)))
        prev = n
        out.append(acc.value)
    return out


# -- padding and shifting -----------------------------------------------------------

def pad_with_zeroes(s: SeriesSpec, zero_positions: LazySet) -> SeriesSpec:
    """Original terms at the complement positions, exact zeroes elsewhere."""

    def term(n: int) -> float:
        if zero_positions.contains(n):
            return 0.0
        return s.term(n - zero_positions.count_below(n))

    return SeriesSpec(term, name=f"padded({s.name})", precision=s.precision)


def padded_milestone(zero_positions: LazySet, k: int) -> int:
    """Padded position holding the original index k (the k-th non-zero slot)."""
    from .oracles import index_where_count_reaches

    return index_where_count_reaches(
        lambda n: n - zero_positions.count_below(n), k + 1,
        cap=zero_positions.valid_below,
    )


def shift_series(s: SeriesSpec, sum_evidence: float, t: float) -> SeriesSpec:
    """Add the geometric-weight absolutely convergent series summing to
    t - sum_evidence; the result's sum evidence lands at t."""
    delta = t - sum_evidence

    def term(n: int) -> float:
        return s.term(n) + delta * (0.5 ** (n + 1))

    return SeriesSpec(term, name=f"shift[{t}]({s.name})", precision=s.precision)


# -- asymptotic means ------------------------------------------------------------------

def cesaro_profile(term: Callable[[int], float],
                   checkpoints: Sequence[int]) -> list[float]:
    acc = NeumaierSum()
    out = []
    prev = 0
    for n in checkpoints:
        for i in range(prev, n):
            acc.add(term(i))
        prev = n
        out.append(acc.value / n)
    return out


def cesaro_mean(term: Callable[[int], float], horizon: int) -> float:
    return cesaro_profile(term, [horizon])[0]


@dataclass
class EmbeddingResult:
    merged: SeriesSpec
    slots: LazySet        # positions carrying the second sequence
    placed: int           # how many of its terms were embedded


def sparse_embed(x_term: Callable[[int], float], y_term: Callable[[int], float],
                 horizon: int) -> EmbeddingResult:
    """Merge y into x along positions chosen so slowly that the running mean
    is unaffected: the count placed by position N is
    floor(sqrt(N) / (1 + max placed |y|)), clamped to grow one at a time."""
    terms: list[float] = []
    positions: list[int] = []
    ell = 0
    ymax = 0.0
    x_next = 0
    for n in range(horizon):
        cand = int(math.isqrt(n) / (1.0 + ymax))
        if cand > ell:
            y_val = y_term(ell)
            terms.append(y_val)
            positions.append(n)
            if abs(y_val) > ymax:
                ymax = abs(y_val)
            ell += 1
        else:
            terms.append(x_term(x_next))
            x_next += 1

    def term(n: int) -> float:
        if n < len(terms):
            return terms[n]
        raise HorizonError(f"embedding realized to {len(terms)} positions")

    merged = SeriesSpec(term, name="sparse-embed")
    slots = LazySet.from_finite_prefix(positions, valid_below=horizon,
                                       name="embed-slots")
    return EmbeddingResult(merged, slots, ell)


def _tail_extremes(term: Callable[[int], float], horizon: int) -> tuple[float, float]:
    lo = math.inf
    hi = -math.inf
    for n in range(horizon // 4, horizon):
        v = term(n)
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    return lo, hi


def mean_rearrange(r: SeriesSpec, m: float, horizon: int) -> LazyPermutation:
    """Rearrange the sequence so its running mean tends to m, provided the
    tail extremes bracket m.

    Interior targets alternate between terms picked near the two extremes
    until the mean crosses m, with the leftover terms embedded sparsely;
    boundary targets keep the near-extreme subsequence and embed everything
    else sparsely.
    """
    lo_ev, hi_ev = _tail_extremes(r.term, horizon)
    if not lo_ev <= m <= hi_ev:
        raise PreconditionError(
            f"target mean {m} outside the witnessed tail extremes "
            f"[{lo_ev}, {hi_ev}]"
        )
    spread = hi_ev - lo_ev
    interior = lo_ev < m < hi_ev and spread > 0

    scan_bound = 8 * horizon + 64
    if interior:
        band = min(spread / 8, (hi_ev - m) / 2, (m - lo_ev) / 2)
        in_u = lambda v: v <= lo_ev + band
        in_v = lambda v: v >= hi_ev - band
    else:
        band = spread / 8 if spread > 0 else 0.0
        near_hi = m >= hi_ev
        if near_hi:
            in_v = lambda v: v >= hi_ev - band
            in_u = lambda v: False
        else:
            in_u = lambda v: v <= lo_ev + band
            in_v = lambda v: False

    class _ValuePool:
        def __init__(self, pred, bound, label):
            self.pred = pred
            self.bound = bound
            self.label = label
            self.next = 0

        def take(self) -> int:
            while self.next < self.bound:
                i = self.next
                self.next += 1
                if self.pred(r.term(i)):
                    return i
            raise HorizonError(f"{self.label} pool exhausted below {self.bound}")

    u_pool = _ValuePool(in_u, scan_bound, "low-band")
    v_pool = _ValuePool(in_v, scan_bound, "high-band")
    z_pool = _ValuePool(lambda v: not in_u(v) and not in_v(v), horizon,
                        "remainder")

    out: list[int] = []
    acc = NeumaierSum()
    taken = 0
    ell = 0
    zmax = 0.0
    z_done = False

    def x_take() -> int:
        nonlocal taken
        if interior:
            mean = acc.value / taken if taken else m
            pool = v_pool if mean <= m else u_pool
        else:
            pool = v_pool if m >= hi_ev else u_pool
        return pool.take()

    for n in range(horizon):
        cand = int(math.isqrt(n) / (1.0 + zmax))
        idx = None
        if cand > ell and not z_done:
            try:
                idx = z_pool.take()
            except HorizonError:
                z_done = True
        if idx is not None:
            ell += 1
            val = r.term(idx)
            if abs(val) > zmax:
                zmax = abs(val)
        else:
            idx = x_take()
            acc.add(r.term(idx))
            taken += 1
        out.append(idx)

    inverse = {src: p for p, src in enumerate(out)}

    def fwd(p: int) -> int:
        if p < len(out):
            return out[p]
        raise HorizonError(f"rearrangement realized to {len(out)} positions")

    def inv(n: int) -> int:
        p = inverse.get(n)
        if p is None:
            raise HorizonError(f"source index {n} not placed within the horizon")
        return p

    pi = LazyPermutation(fwd, inv, name=f"mean[{m}]({r.name})",
                         valid_below=len(out))
    pi.branch = "interior" if interior else ("endpoint-high" if m >= hi_ev
                                             else "endpoint-low")
    return pi
