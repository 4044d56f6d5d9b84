"""Exact density profiles and finite-horizon verdicts.

Density counts are exact integer ratios, so everything here uses Fraction.
A verdict is always a statement about the inspected horizon, never a claim
about the true limit; serialized output carries the horizon for that reason.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    ContainmentError,
    DegenerateCheckpointError,
    HorizonError,
    InconclusiveError,
    IntegrityError,
    PreconditionError,
)
from .oracles import LazyPermutation, LazySet

DEFAULT_TOL = Fraction(1, 100)
DEFAULT_GAP = Fraction(1, 4)

VERDICT_VALUE = "value"
VERDICT_OSC = "osc-evidence"
VERDICT_UNDETERMINED = "undetermined"

FINITIZATION_NOTE = (
    "horizon evidence only; the burn-in/gap scheme finitizes limit talk and "
    "the verdict makes no claim about the true limit"
)


def as_fraction(x) -> Fraction:
    """Exact conversion; floats go through their decimal string form."""
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def checkpoint_schedule(horizon: int, burn_in: int = 0) -> list[int]:
    """Deduplicated ceil((5/4)^k) checkpoints in (burn_in, horizon], plus the
    horizon itself."""
    pts: set[int] = {horizon}
    k = 0
    while True:
        v = (5**k + 4**k - 1) // (4**k)
        if v > horizon:
            break
        if v > burn_in:
            pts.add(v)
        k += 1
    return sorted(pts)


@dataclass(frozen=True)
class DensityProfile:
    """Exact values |A ∩ n| / n (or a relative variant) at given checkpoints."""

    checkpoints: tuple[int, ...]
    values: tuple[Fraction, ...]

    def to_csv(self) -> str:
        lines = ["checkpoint,numerator,denominator"]
        for n, v in zip(self.checkpoints, self.values):
            lines.append(f"{n},{v.numerator},{v.denominator}")
        return "\n".join(lines) + "\n"

    def value_at(self, n: int) -> Fraction:
        return self.values[self.checkpoints.index(n)]


@dataclass(frozen=True)
class DensityEstimate:
    """Horizon verdict: a stabilized value, two-sided oscillation evidence,
    or no verdict at all."""

    verdict: str
    horizon: int
    tol: Fraction
    gap: Fraction
    burn_in: int
    tail_window: int  # number of checkpoints inspected after burn-in
    value: Fraction | None = None
    lo: Fraction | None = None
    hi: Fraction | None = None

    def to_json(self) -> str:
        payload = {
            "verdict": self.verdict,
            "value": str(self.value) if self.value is not None else None,
            "lo": str(self.lo) if self.lo is not None else None,
            "hi": str(self.hi) if self.hi is not None else None,
            "horizon": self.horizon,
            "tol": str(self.tol),
            "gap": str(self.gap),
            "burn_in": self.burn_in,
            "tail_window": self.tail_window,
            "note": FINITIZATION_NOTE,
        }
        return json.dumps(payload, sort_keys=True)


def _validate_checkpoints(checkpoints: Sequence[int]) -> list[int]:
    pts = list(checkpoints)
    if not pts:
        raise PreconditionError("checkpoint list is empty")
    if any(n < 1 for n in pts):
        raise PreconditionError("checkpoints must be >= 1")
    if any(a >= b for a, b in zip(pts, pts[1:])):
        raise PreconditionError("checkpoints must be strictly increasing")
    return pts


def density_profile(a: LazySet, checkpoints: Iterable[int]) -> DensityProfile:
    """Exact d_n(A) = |A ∩ n| / n at each checkpoint, one ascending sweep."""
    pts = _validate_checkpoints(list(checkpoints))
    counts = [a.count_below(n) for n in pts]
    if counts[-1] == 0:
        raise IntegrityError(
            f"{a.name or 'set'}: no members below {pts[-1]}; "
            "an infinite set was promised"
        )
    values = tuple(Fraction(c, n) for c, n in zip(counts, pts))
    return DensityProfile(tuple(pts), values)


def _verdict_from_values(
    values: Sequence[Fraction], horizon: int, tol: Fraction, gap: Fraction,
    burn_in: int,
) -> DensityEstimate:
    vmin, vmax = min(values), max(values)
    spread = vmax - vmin
    common = dict(horizon=horizon, tol=tol, gap=gap, burn_in=burn_in,
                  tail_window=len(values))
    if spread >= gap:
        return DensityEstimate(verdict=VERDICT_OSC, lo=vmin, hi=vmax, **common)
    if spread <= 2 * tol:
        mid = (vmin + vmax) / 2
        return DensityEstimate(verdict=VERDICT_VALUE, value=mid, **common)
    return DensityEstimate(verdict=VERDICT_UNDETERMINED, lo=vmin, hi=vmax, **common)


def estimate_density(
    a: LazySet,
    horizon: int,
    tol=DEFAULT_TOL,
    gap=DEFAULT_GAP,
    burn_in: int | None = None,
) -> DensityEstimate:
    """Horizon verdict for d(A) from tail-window checkpoints.

    Default burn-in is horizon/4.  Oscillation witnesses need a wider window
    than value stabilization (profile values are slow-moving: within a window
    spanning a factor q the profile can move by at most a 1 - 1/q shift), so
    callers hunting oscillation pass a smaller burn_in explicitly.
    """
    if horizon < 64:
        raise PreconditionError("horizon must be >= 64")
    tol, gap = as_fraction(tol), as_fraction(gap)
    if not (0 < tol < gap < 1):
        raise PreconditionError("need 0 < tol < gap < 1")
    if burn_in is None:
        burn_in = horizon // 4
    pts = checkpoint_schedule(horizon, burn_in)
    values = [Fraction(a.count_below(n), n) for n in pts]
    return _verdict_from_values(values, horizon, tol, gap, burn_in)


def image_set(pi: LazyPermutation, a: LazySet, horizon: int) -> LazySet:
    """The image π[A] as a lazy set, valid below `horizon`.

    Membership of m is decided by π⁻¹(m) ∈ A.  When π provably maps the
    prefix [0, horizon) onto itself and A's trace below horizon is fully
    realized, the image is materialized directly (same answers, one pass).
    """
    name = f"{pi.name}[{a.name}]"
    if pi.image_prefix_closed(horizon):
        try:
            members = sorted(pi.forward(x) for x in a.iter_below(horizon))
            return LazySet.from_finite_prefix(members, horizon, name=name)
        except HorizonError:
            pass

    def member(m: int) -> bool:
        return a.contains(pi.inverse(m))

    return LazySet.from_membership(member, valid_below=horizon, name=name)


def closure_bound(pi: LazyPermutation, m: int) -> int:
    """Least u with π⁻¹[[0, m)] ⊆ [0, u), by direct query of the inverse."""
    if m < 1:
        raise PreconditionError("m must be >= 1")
    return max(pi.inverse(k) for k in range(m)) + 1


def forward_closure_bound(pi: LazyPermutation, m: int) -> int:
    """Least u with π[[0, m)] ⊆ [0, u)."""
    if m < 1:
        raise PreconditionError("m must be >= 1")
    return max(pi.forward(k) for k in range(m)) + 1


def _check_containment(a: LazySet, b: LazySet, bound: int) -> None:
    for x in a.iter_below(bound):
        if not b.contains(x):
            raise ContainmentError("A is not contained in B on the swept prefix", x)


def relative_density_profile(
    a: LazySet, b: LazySet, checkpoints: Iterable[int]
) -> DensityProfile:
    """Exact |A ∩ n| / |B ∩ n| at each checkpoint; A ⊆ B checked on the sweep."""
    pts = _validate_checkpoints(list(checkpoints))
    _check_containment(a, b, pts[-1])
    values = []
    for n in pts:
        denom = b.count_below(n)
        if denom == 0:
            raise DegenerateCheckpointError(
                f"B has no members below checkpoint {n}"
            )
        values.append(Fraction(a.count_below(n), denom))
    return DensityProfile(tuple(pts), tuple(values))


def estimate_relative_density(
    a: LazySet,
    b: LazySet,
    horizon: int,
    tol=DEFAULT_TOL,
    gap=DEFAULT_GAP,
    burn_in: int | None = None,
) -> DensityEstimate:
    """Horizon verdict for the relative density of A in B."""
    if horizon < 64:
        raise PreconditionError("horizon must be >= 64")
    tol, gap = as_fraction(tol), as_fraction(gap)
    if not (0 < tol < gap < 1):
        raise PreconditionError("need 0 < tol < gap < 1")
    if burn_in is None:
        burn_in = horizon // 4
    pts = checkpoint_schedule(horizon, burn_in)
    profile = relative_density_profile(a, b, pts)
    return _verdict_from_values(profile.values, horizon, tol, gap, burn_in)


@dataclass(frozen=True)
class StrongDensityReport:
    """Outcome of the all-long-windows relative density check."""

    passed: bool
    windows_checked: int
    min_window: int
    violating_window: tuple[int, int, int] | None = None  # (n, m, count)

    @property
    def violation_ratio(self) -> Fraction | None:
        if self.violating_window is None:
            return None
        n, m, c = self.violating_window
        return Fraction(c, m - n)


def strong_density_check(
    a: LazySet, b: LazySet, r, eps, min_window: int, horizon: int
) -> StrongDensityReport:
    """Check |count/(m-n) - r| < eps over every window {b_n, ..., b_{m-1}}
    of B's enumeration with m - n > min_window, inside the horizon.

    Returns the first violating window otherwise.  Linear sweep: a violation
    |Q_m - Q_n| >= eps (m-n) for the centered prefix sums Q is witnessed
    against a running extremum, so no pair enumeration happens.
    """
    r, eps = as_fraction(r), as_fraction(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    _check_containment(a, b, horizon)
    bs = list(b.iter_below(horizon))
    k = len(bs)
    if k < min_window + 1:
        raise InconclusiveError(
            f"only {k} enumerated members below {horizon}; no window longer "
            f"than {min_window} exists"
        )
    p, q = r.numerator, r.denominator
    e, f = eps.numerator, eps.denominator
    # scaled sums: W_i = qf * count_i - pf * i ; violation iff
    # |W_m - W_n| >= eq (m - n) for some m - n > min_window
    w = [0] * (k + 1)
    c = 0
    for i, x in enumerate(bs):
        if a.contains(x):
            c += 1
        w[i + 1] = q * f * c - p * f * (i + 1)
    eq = e * q
    best_min = None  # (value, index) of min over U = W - eq*i
    best_max = None  # of max over V = W + eq*i
    windows = 0
    for m in range(min_window + 1, k + 1):
        n = m - min_window - 1
        u_n = w[n] - eq * n
        v_n = w[n] + eq * n
        if best_min is None or u_n < best_min[0]:
            best_min = (u_n, n)
        if best_max is None or v_n > best_max[0]:
            best_max = (v_n, n)
        windows += m - min_window
        u_m = w[m] - eq * m
        if u_m >= best_min[0]:
            n0 = best_min[1]
            count = (w[m] - w[n0] + p * f * (m - n0)) // (q * f)
            return StrongDensityReport(False, windows, min_window, (n0, m, count))
        v_m = w[m] + eq * m
        if v_m <= best_max[0]:
            n0 = best_max[1]
            count = (w[m] - w[n0] + p * f * (m - n0)) // (q * f)
            return StrongDensityReport(False, windows, min_window, (n0, m, count))
    return StrongDensityReport(True, windows, min_window)
