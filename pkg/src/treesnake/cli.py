"""Command-line front end for the samplers, verifiers, and comparisons.

Every randomized subcommand takes an explicit --seed so that a run is
fully determined by its flags; there is no wall-clock fallback.  Worker
parallelism is expressed as a deterministic split of the sample budget
over per-worker generator streams, merged back in worker order, so data
files are byte-identical for a given manifest.  Timing lives only in the
manifest printed to stdout, never in the files written to --out.

Exit status: 0 when the requested checks pass (or a pure sampling run
completes), 1 when a verification or comparison fails, 2 for usage
errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from collections import Counter
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from treesnake.exact_enum import (
    count_well_labelled,
    verify_reroot_identity,
    verify_reroot_identity_closed,
    verify_size_law,
)
from treesnake.gw_sampler import (
    MEASURES,
    OffspringDistribution,
    SampleConfig,
    StepDistribution,
    draw_measure,
    sample_conditioned_batch,
    sample_label_extrema,
    spawn_rngs,
)
from treesnake.plane_tree import PlaneTree, tree_to_line
from treesnake.quadmap import (
    canonical_code,
    cvs_build,
    cvs_inverse,
    distances,
    enumerate_well_labelled,
)
from treesnake.snake_limit import ks_report, sample_extrema, samples_csv

CATALAN = (1, 1, 2, 5, 14, 42, 132, 429, 1430)

KS_THRESHOLD = 0.05

SIZED_MEASURES = {"Pi-n", "P-n-x", "Pbar-n-x", "Q-n", "Qbar-n"}


class UsageError(ValueError):
    """Bad parameter combination caught before any work starts."""


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run and find what it wrote."""

    subcommand: str
    config: dict
    seed: int | None
    outputs: tuple[str, ...]
    elapsed_seconds: float


def _print_json(obj: dict) -> None:
    print(json.dumps(obj, indent=2, default=str))


def _offspring(name: str) -> OffspringDistribution:
    if name != "geometric":
        raise UsageError(f"unknown offspring law {name!r}")
    return OffspringDistribution.geometric_half()


def _step(name: str) -> StepDistribution:
    if name == "uniform3":
        return StepDistribution.uniform3()
    if name == "pm1":
        return StepDistribution.uniform_pm1()
    if name == "normal":
        return StepDistribution.normal()
    raise UsageError(f"unknown step law {name!r}")


def _split_budget(total: int, workers: int) -> list[int]:
    if total < 1:
        raise UsageError("need a positive sample count")
    if workers < 1:
        raise UsageError("need at least one worker")
    base, extra = divmod(total, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _write_text(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def _finish(args, subcommand: str, config: dict, artifact: str, t0: float,
            summary: dict | None = None) -> None:
    """Route the data artifact and print the manifest.

    The artifact goes to --out when given, otherwise to stdout; the
    manifest (with timing, hence never byte-stable) is printed only when
    the artifact went to a file, keeping stdout single-purpose.
    """
    outputs = ()
    if args.out:
        _write_text(args.out, artifact)
        outputs = (args.out,)
    else:
        sys.stdout.write(artifact)
    manifest = RunManifest(
        subcommand, config, getattr(args, "seed", None), outputs,
        time.perf_counter() - t0,
    )
    if args.out:
        payload = {"manifest": asdict(manifest)}
        if summary:
            payload["summary"] = summary
        _print_json(payload)


def _cmd_sample(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    if args.measure in SIZED_MEASURES and args.n is None:
        raise UsageError(f"measure {args.measure} needs --n")
    mu = _offspring(args.mu)
    gamma = _step(args.gamma)
    config = SampleConfig(measure=args.measure, seed=args.seed, n=args.n, x=args.x)

    rows = []
    for rng, share in zip(spawn_rngs(args.seed, args.workers),
                          _split_budget(args.samples, args.workers)):
        for _ in range(share):
            drawn = draw_measure(config, mu, gamma, rng)
            if isinstance(drawn, PlaneTree):
                rows.append((tree_to_line(drawn),))
            else:
                labels = ";".join(
                    repr(v) if isinstance(v, float) else str(v) for v in drawn.labels
                )
                rows.append((tree_to_line(drawn.tree), labels))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("tree",) if len(rows[0]) == 1 else ("tree", "labels"))
    writer.writerows(rows)
    _finish(
        args, "sample",
        {"measure": args.measure, "n": args.n, "x": args.x, "mu": args.mu,
         "gamma": args.gamma, "samples": args.samples, "workers": args.workers},
        buf.getvalue(), t0, {"rows": len(rows)},
    )
    return 0


def _census_report(n: int) -> dict:
    entries = []
    for k in range(1, n + 1):
        total, positive, ratio = count_well_labelled(k)
        want_total = 3**k * CATALAN[k]
        entries.append(
            {
                "n": k,
                "labelled": total,
                "labelled_expected": want_total,
                "well_labelled": positive,
                "ratio": f"{ratio.numerator}/{ratio.denominator}",
                "ratio_expected": str(Fraction(2, k + 2)),
                "equal": total == want_total and ratio == Fraction(2, k + 2),
            }
        )
    return {
        "identity": "census",
        "n": n,
        "equal": all(e["equal"] for e in entries),
        "entries": entries,
    }


def _quad_battery_report(n: int) -> dict:
    checked = 0
    failures = []
    for wt in enumerate_well_labelled(n):
        try:
            q = cvs_build(wt)
            q.validate()
            prof = distances(q)
            got = dict(prof.counts)
            want = dict(Counter(wt.labels) + Counter({0: 1}))
            back = cvs_inverse(q)
            if got != want or back.tree != wt.tree or tuple(back.labels) != tuple(wt.labels):
                failures.append(tree_to_line(wt.tree))
        except Exception as exc:  # noqa: BLE001 - collect and report, don't stop the sweep
            failures.append(f"{tree_to_line(wt.tree)}: {exc}")
        checked += 1
    return {
        "identity": "quad",
        "n": n,
        "checked": checked,
        "failures": failures[:20],
        "equal": not failures,
    }


def _cmd_verify(args: argparse.Namespace) -> int:
    mu = _offspring(args.mu)
    gamma = _step(args.gamma)
    if args.n < 1:
        raise UsageError("need --n at least 1")
    if args.identity == "reroot":
        report = verify_reroot_identity(args.n, mu, gamma)
    elif args.identity == "reroot-closed":
        report = verify_reroot_identity_closed(args.n, mu, gamma)
    elif args.identity == "size-law":
        report = verify_size_law(mu, args.n)
    elif args.identity == "census":
        report = _census_report(args.n)
    else:
        report = _quad_battery_report(args.n)
    text = json.dumps(report, indent=2, default=str) + "\n"
    if args.out:
        _write_text(args.out, text)
    sys.stdout.write(text)
    return 0 if report["equal"] else 1


def _cmd_quad(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    mu = _offspring(args.mu)
    gamma = _step("uniform3")
    codes: Counter = Counter()
    attempts = 0
    for rng, share in zip(spawn_rngs(args.seed, args.workers),
                          _split_budget(args.samples, args.workers)):
        trees, tries = sample_conditioned_batch(mu, gamma, args.n, 1, share, rng)
        attempts += tries
        for wt in trees:
            codes[canonical_code(cvs_build(wt)).decode()] += 1

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("code", "count"))
    for code in sorted(codes):
        writer.writerow((code, codes[code]))
    _finish(
        args, "quad",
        {"n": args.n, "samples": args.samples, "workers": args.workers},
        buf.getvalue(), t0,
        {"distinct_codes": len(codes), "attempts": attempts},
    )
    return 0


def _cmd_snake(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    if args.grid < 2:
        raise UsageError("need --grid at least 2")
    parts = []
    for rng, share in zip(spawn_rngs(args.seed, args.workers),
                          _split_budget(args.samples, args.workers)):
        sups, infs = sample_extrema(args.grid, share, rng)
        parts.append(sups - infs)
    ranges = np.concatenate(parts)
    _finish(
        args, "snake",
        {"grid": args.grid, "samples": args.samples, "workers": args.workers},
        samples_csv(ranges), t0,
        {"mean_range": float(ranges.mean()), "sd_range": float(ranges.std())},
    )
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    mu = _offspring(args.mu)
    gamma = _step("uniform3")
    sigma = math.sqrt(float(mu.variance))
    kappa = math.sqrt(sigma / 2.0) / gamma.rho
    workers = args.workers
    streams = spawn_rngs(args.seed, 2 * workers)
    shares = _split_budget(args.samples, workers)

    disc_parts = []
    for rng, share in zip(streams[:workers], shares):
        mins, maxs = sample_label_extrema(mu, gamma, args.discrete_n, 0, share, rng)
        disc_parts.append((maxs - mins) / args.discrete_n**0.25)
    cont_parts = []
    for rng, share in zip(streams[workers:], shares):
        sups, infs = sample_extrema(args.grid, share, rng)
        cont_parts.append((sups - infs) / kappa)

    report = ks_report(np.concatenate(disc_parts), np.concatenate(cont_parts), KS_THRESHOLD)
    report["discrete_n"] = args.discrete_n
    report["grid"] = args.grid
    text = json.dumps(report, indent=2, default=str) + "\n"
    if args.out:
        _write_text(args.out, text)
    sys.stdout.write(text)
    return 0 if report["pass"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treesnake",
        description="samplers and verifiers for labelled plane trees, "
        "quadrangulations, and the discretized Brownian snake",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("sample", help="draw trees from one of the measure families")
    p.add_argument("--measure", choices=MEASURES, required=True)
    p.add_argument("--n", type=int, default=None, help="edge count for sized measures")
    p.add_argument("--x", type=int, default=0, help="root label")
    p.add_argument("--mu", default="geometric", choices=["geometric"])
    p.add_argument("--gamma", default="uniform3", choices=["uniform3", "pm1", "normal"])
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("verify", help="run an exact enumeration check")
    p.add_argument(
        "--identity",
        required=True,
        choices=["reroot", "reroot-closed", "size-law", "census", "quad"],
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", default="geometric", choices=["geometric"])
    p.add_argument("--gamma", default="uniform3", choices=["uniform3", "pm1"])
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("quad", help="sample uniform quadrangulations by rejection")
    p.add_argument("--n", type=int, required=True, help="number of faces")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--mu", default="geometric", choices=["geometric"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="frequency table CSV over canonical codes")
    p.set_defaults(func=_cmd_quad)

    p = sub.add_parser("snake", help="sample the discretized snake's range")
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="single-column CSV of range samples")
    p.set_defaults(func=_cmd_snake)

    p = sub.add_parser("compare", help="KS comparison of tree labels vs snake head")
    p.add_argument("--discrete-n", type=int, required=True, dest="discrete_n")
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--mu", default="geometric", choices=["geometric"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_compare)

    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> None:
    raise SystemExit(run(argv))


if __name__ == "__main__":
    main()
