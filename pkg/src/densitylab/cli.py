"""Command line surface: every construction behind a subcommand, with seeds,
horizons, machine-readable artifacts, and a replayable run manifest.

Exit codes: 0 success, 1 refuted verify invariant, 2 usage error, 3 horizon
or resource error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .density import (
    as_fraction,
    checkpoint_schedule,
    density_profile,
    estimate_density,
    image_set,
)
from .errors import DensityLabError, HorizonError, ResourceError
from .oracles import LazySet, evens, naturals, odds, multiples, doubling_blocks, \
    seeded_block_permutation, identity_permutation
from .constructions import (
    canonical_sparse_positions,
    diagonal_set,
    sparse_set,
    to_density_permutation,
    to_oscillation_permutation,
)
from .preservation import (
    condition_a_check,
    condition_b_check,
    counterexample_blocks,
    counterexample_checkpoint_rows,
    interval_count_profile,
)
from .reductions import run_reduction
from .series import (
    RearrangementTarget,
    SeriesSpec,
    alternating_harmonic,
    riemann_rearrange,
)


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    seed: int | None
    horizon: int | None
    version: str
    output_digest: str

    def to_json(self) -> str:
        return json.dumps({
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "seed": self.seed,
            "horizon": self.horizon,
            "version": self.version,
            "output_digest": self.output_digest,
        }, sort_keys=True, indent=2)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _write_artifacts(out_dir: Path, stem: str, payload: str, suffix: str,
                     subcommand: str, parameters: dict, seed, horizon) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    artifact = out_dir / f"{stem}.{suffix}"
    artifact.write_text(payload)
    manifest = RunManifest(subcommand, parameters, seed, horizon, __version__,
                           _digest(payload))
    (out_dir / f"{stem}.manifest.json").write_text(manifest.to_json())
    return artifact


def make_set(spec: str, seed: int, horizon: int) -> LazySet:
    """Named set registry for the CLI; bernoulli:<p> uses the run seed."""
    if spec == "evens":
        return evens()
    if spec == "odds":
        return odds()
    if spec == "naturals":
        return naturals()
    if spec == "sparse":
        return sparse_set()
    if spec == "osc-blocks":
        return doubling_blocks()
    if spec.startswith("multiples:"):
        return multiples(int(spec.split(":", 1)[1]))
    if spec.startswith("bernoulli:"):
        import numpy as np

        p = float(spec.split(":", 1)[1])
        rng = np.random.default_rng(seed)
        positions = np.flatnonzero(rng.random(4 * horizon) < p)
        pos = positions.tolist()
        return LazySet.from_finite_prefix(pos, valid_below=4 * horizon,
                                          name=f"bernoulli-{p}-{seed}")
    raise DensityLabError(f"unknown set {spec!r}")


def make_series(spec: str, horizon: int) -> SeriesSpec:
    if spec == "altharm":
        return alternating_harmonic()
    if spec.startswith("custom:"):
        path = Path(spec.split(":", 1)[1])
        terms = [float(line) for line in path.read_text().split()]
        if len(terms) < 8 * horizon + 64:
            raise HorizonError(
                f"custom series file must supply at least {8 * horizon + 64} terms"
            )

        def term(n: int) -> float:
            return terms[n]

        return SeriesSpec(term, name=f"custom:{path.name}")
    raise DensityLabError(f"unknown series {spec!r}")


def parse_target(spec: str) -> RearrangementTarget:
    if spec == "+inf":
        return RearrangementTarget.plus_infinity()
    if spec == "-inf":
        return RearrangementTarget.minus_infinity()
    if spec.startswith("value:"):
        return RearrangementTarget.finite(float(spec.split(":", 1)[1]))
    if spec.startswith("osc:"):
        lo, hi = spec.split(":", 1)[1].split(",")
        return RearrangementTarget.oscillation(float(lo), float(hi))
    raise DensityLabError(f"unknown target {spec!r}")


# -- subcommands ----------------------------------------------------------------

def cmd_density(args) -> int:
    a = make_set(args.set, args.seed, args.horizon)
    est = estimate_density(a, args.horizon, tol=as_fraction(args.tol),
                           gap=as_fraction(args.gap))
    pts = checkpoint_schedule(args.horizon, args.horizon // 4)
    profile = density_profile(a, pts)
    params = {"set": args.set, "tol": str(args.tol), "gap": str(args.gap)}
    out = Path(args.out)
    if args.emit == "csv":
        _write_artifacts(out, "profile", profile.to_csv(), "csv", "density",
                         params, args.seed, args.horizon)
    _write_artifacts(out, "estimate", est.to_json() + "\n", "json", "density",
                     params, args.seed, args.horizon)
    print(est.to_json())
    return 0


def cmd_permute(args) -> int:
    a = make_set(args.set, args.seed, args.horizon)
    if args.construction == "steer":
        pi = to_density_permutation(a, Fraction(args.r), args.horizon)
        schedule = [pi.forward(x) for x in list(a.iter_below(64))[:16]]
        params = {"construction": "steer", "set": args.set, "r": args.r}
    elif args.construction == "oscillate":
        pi = to_oscillation_permutation(a, args.horizon)
        schedule = [pi.forward(x) for x in list(a.iter_below(64))[:16]]
        params = {"construction": "oscillate", "set": args.set}
    elif args.construction == "diagonal":
        family = [identity_permutation()] + [
            seeded_block_permutation(args.seed + t) for t in range(args.family)
        ]
        witness = diagonal_set(family, args.horizon)
        schedule = witness.schedule[:24]
        params = {"construction": "diagonal", "family": args.family}
        payload = json.dumps({
            "construction": "diagonal",
            "parameters": params,
            "seed": args.seed,
            "horizon": args.horizon,
            "realized_schedule_prefix": schedule,
        }, sort_keys=True, indent=2) + "\n"
        _write_artifacts(Path(args.out), "construction", payload, "json",
                         "permute", params, args.seed, args.horizon)
        print(payload, end="")
        return 0
    else:
        raise DensityLabError(f"unknown construction {args.construction!r}")
    img = image_set(pi, a, args.horizon)
    est = estimate_density(img, args.horizon, burn_in=args.horizon // 64)
    payload = json.dumps({
        "construction": params["construction"],
        "parameters": params,
        "seed": args.seed,
        "horizon": args.horizon,
        "realized_schedule_prefix": schedule,
        "image_estimate": json.loads(est.to_json()),
    }, sort_keys=True, indent=2) + "\n"
    _write_artifacts(Path(args.out), "construction", payload, "json", "permute",
                     params, args.seed, args.horizon)
    print(payload, end="")
    return 0


def cmd_rearrange(args) -> int:
    s = make_series(args.series, args.horizon)
    target = parse_target(args.target)
    pi = riemann_rearrange(s, target, args.horizon)
    lines = ["position,term,partial_sum"]
    from .series import NeumaierSum

    acc = NeumaierSum()
    step = max(1, args.horizon // 4096)
    for p in range(args.horizon):
        t = s.term(pi.forward(p))
        acc.add(t)
        if p % step == 0 or p == args.horizon - 1:
            lines.append(f"{p},{t!r},{acc.value!r}")
    payload = "\n".join(lines) + "\n"
    params = {"series": args.series, "target": args.target}
    _write_artifacts(Path(args.out), "rearrangement", payload, "csv",
                     "rearrange", params, args.seed, args.horizon)
    print(f"final partial sum at {args.horizon}: {acc.value}")
    return 0


def cmd_reduce(args) -> int:
    result = run_reduction(args.reduction, args.trials, args.horizon, args.seed)
    payload = json.dumps(result, sort_keys=True, indent=2) + "\n"
    params = {"reduction": args.reduction, "trials": args.trials}
    _write_artifacts(Path(args.out), "reduction", payload, "json", "reduce",
                     params, args.seed, args.horizon)
    print(payload, end="")
    return 0 if result["refuted"] == 0 else 1


def cmd_preserve(args) -> int:
    if args.counterexample:
        record, pi, a, b = counterexample_blocks(args.depth)
        rows = counterexample_checkpoint_rows(record, pi, a, b)
        lines = ["label,checkpoint,numerator,denominator"]
        for label, n, v in rows:
            lines.append(f"{label},{n},{v.numerator},{v.denominator}")
        payload = "\n".join(lines) + "\n"
        params = {"counterexample": True, "depth": args.depth}
        _write_artifacts(Path(args.out), "counterexample", payload, "csv",
                         "preserve", params, args.seed, None)
        print(payload, end="")
        return 0
    pi = seeded_block_permutation(args.seed)
    check = condition_a_check if args.check == "A" else condition_b_check
    report = check(pi, args.k, args.horizon)
    payload = json.dumps({
        "condition": report.condition,
        "k": report.k,
        "result": report.label,
        "max_violation": report.max_violation,
        "witness": report.witness,
    }, sort_keys=True, indent=2) + "\n"
    params = {"check": args.check, "k": args.k}
    _write_artifacts(Path(args.out), "condition", payload, "json", "preserve",
                     params, args.seed, args.horizon)
    print(payload, end="")
    return 0


def _verify_checks(quick: bool):
    """Yield (name, callable) pairs; callables return True on pass."""
    h_small = 1 << 14 if quick else 1 << 16
    h_mid = 1 << 16 if quick else 1 << 18

    def check_sparse():
        est = estimate_density(sparse_set(), 1 << 16, tol=Fraction(1, 100))
        return est.verdict == "value" and est.value <= Fraction(1, 100)

    def check_diagonal():
        family = [identity_permutation()] + [seeded_block_permutation(s)
                                             for s in (1, 2)]
        wit = diagonal_set(family, h_small)
        wit.audit_gaps()
        return all(
            estimate_density(image_set(p, wit.set, h_small), h_small).value
            <= Fraction(1, 100)
            for p in family
        )

    def check_steering():
        from .constructions import audit_density_tracking

        pi = to_density_permutation(evens(), Fraction(1, 3), 1 << 14)
        return audit_density_tracking(pi, evens(), Fraction(1, 3), 1 << 14) <= 1

    def check_oscillation():
        pi = to_oscillation_permutation(evens(), h_small)
        img = image_set(pi, evens(), h_small)
        est = estimate_density(img, h_small, burn_in=h_small // 64)
        return est.verdict == "osc-evidence"

    def check_slalom():
        r = run_reduction("slalom", 5, h_small, seed=11)
        return r["refuted"] == 0 and r["confirmed"] == 5

    def check_banakh():
        r = run_reduction("banakh", 5, h_small, seed=11)
        return r["refuted"] == 0 and r["confirmed"] == 5

    def check_extension_game():
        from .reductions import covmeager_extension_game

        for s in range(5):
            pi = seeded_block_permutation(s)
            rep = covmeager_extension_game(pi, (), 4, 1 << 16, "high")
            if not rep.count_identity_holds or rep.ratio < Fraction(1, 2):
                return False
        return True

    def check_conditions():
        pi = identity_permutation()
        ra = condition_a_check(pi, 1, 1 << 10)
        rb = condition_b_check(pi, 1, 1 << 10)
        return ra.passed and rb.passed

    def check_counterexample():
        record, pi, a, b = counterexample_blocks(4)
        rows = counterexample_checkpoint_rows(record, pi, a, b)
        return all(v == Fraction(2, 3) for lab, n, v in rows if lab == "high") and \
            all(v == Fraction(1, 2) for lab, n, v in rows if lab == "half")

    def check_riemann():
        s = alternating_harmonic()
        pi = riemann_rearrange(s, RearrangementTarget.finite(0.0), 1 << 17)
        return abs(pi.final_sum) <= 0.01

    def check_mean():
        from .series import cesaro_mean, mean_rearrange

        seq = SeriesSpec(lambda n: 1.0 if n % 2 == 0 else -1.0, name="pm1")
        pi = mean_rearrange(seq, 0.5, 1 << 17)
        return abs(cesaro_mean(lambda n: seq.term(pi.forward(n)), 1 << 17) - 0.5) <= 0.02

    def check_montecarlo():
        from .reductions import bernoulli_density_sample

        stats = bernoulli_density_sample(0.5, 50, h_small, seed=5)
        return stats.within_at_horizon >= 0.9 and \
            stats.permuted_within_at_checkpoint >= 0.9

    checks = [
        ("sparse-set-density-0", check_sparse),
        ("diagonal-family-density-0", check_diagonal),
        ("density-steering-exact-tracking", check_steering),
        ("oscillation-forcing", check_oscillation),
        ("slalom-reduction", check_slalom),
        ("displacement-reduction", check_banakh),
        ("extension-game", check_extension_game),
        ("preservation-conditions", check_conditions),
        ("counterexample-ratios", check_counterexample),
        ("riemann-rearrangement", check_riemann),
        ("mean-rearrangement", check_mean),
        ("monte-carlo-density", check_montecarlo),
    ]
    return checks


def cmd_verify(args) -> int:
    failures = 0
    started = time.monotonic()
    for name, check in _verify_checks(args.quick):
        try:
            ok = check()
        except DensityLabError as exc:
            ok = False
            name = f"{name} ({exc})"
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        if not ok:
            failures += 1
    print(f"verify finished in {time.monotonic() - started:.1f}s")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densitylab",
        description="Finite-horizon density and rearrangement experiments",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--horizon", type=int, default=1 << 16)
        p.add_argument("--tol", default="1/100")
        p.add_argument("--gap", default="1/4")
        p.add_argument("--emit", choices=["csv", "json"], default="csv")
        p.add_argument("--out", default="out")

    p = sub.add_parser("density", help="profile and estimate a named set")
    common(p)
    p.add_argument("--set", required=True)
    p.set_defaults(fn=cmd_density)

    p = sub.add_parser("permute", help="build a steering/oscillation/diagonal permutation")
    common(p)
    p.add_argument("--construction", choices=["steer", "oscillate", "diagonal"],
                   required=True)
    p.add_argument("--set", default="evens")
    p.add_argument("--r", default="1/2")
    p.add_argument("--family", type=int, default=4)
    p.set_defaults(fn=cmd_permute)

    p = sub.add_parser("rearrange", help="rearrange a series to a target")
    common(p)
    p.add_argument("--series", default="altharm")
    p.add_argument("--target", default="value:0")
    p.set_defaults(fn=cmd_rearrange)

    p = sub.add_parser("reduce", help="run seeded reduction trials")
    common(p)
    p.add_argument("--reduction", required=True,
                   choices=["slalom", "banakh", "unbounding"])
    p.add_argument("--trials", type=int, default=10)
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("preserve", help="condition checks and the counterexample")
    common(p)
    p.add_argument("--check", choices=["A", "B"], default="A")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--counterexample", action="store_true")
    p.add_argument("--depth", type=int, default=4)
    p.set_defaults(fn=cmd_preserve)

    p = sub.add_parser("verify", help="run the property suite")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(fn=cmd_verify)

    return parser


def replay(manifest_path: str | Path, out_dir: str | Path) -> bool:
    """Re-execute the run recorded in a manifest; True iff the fresh artifact
    digest matches the recorded one."""
    data = json.loads(Path(manifest_path).read_text())
    args = [data["subcommand"]]
    params = data["parameters"]
    flag_map = {
        "set": "--set", "tol": "--tol", "gap": "--gap", "r": "--r",
        "construction": "--construction", "series": "--series",
        "target": "--target", "reduction": "--reduction", "trials": "--trials",
        "check": "--check", "k": "--k", "depth": "--depth", "family": "--family",
    }
    for key, value in params.items():
        if key == "counterexample" and value:
            args.append("--counterexample")
            continue
        if key in flag_map:
            args.extend([flag_map[key], str(value)])
    if data.get("seed") is not None:
        args.extend(["--seed", str(data["seed"])])
    if data.get("horizon") is not None:
        args.extend(["--horizon", str(data["horizon"])])
    args.extend(["--out", str(out_dir)])
    code = main(args)
    if code != 0:
        return False
    stem = Path(manifest_path).name.replace(".manifest.json", "")
    fresh = json.loads((Path(out_dir) / f"{stem}.manifest.json").read_text())
    return fresh["output_digest"] == data["output_digest"]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (HorizonError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DensityLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
