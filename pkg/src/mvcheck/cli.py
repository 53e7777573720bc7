"""Command-line harness: decide, pvalue, grid, and bench subcommands.

Exit codes for ``decide``: 0 INTERSECT, 1 DISJOINT, 2 UNCERTAIN, 3 and up
for usage or runtime errors. The other subcommands exit 0 on success.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from .engine import Decision, DecisionConfig, Verdict, decide_with_faces
from .errors import MvcheckError
from .multinomial import (
    SimplexPoint,
    enumerate_outcomes,
    exact_p_value,
    grid_pvalues,
    oracle_max_min_pvalue,
    simplex_centroid_grid,
)
from .wilks import WilksRegion, _grid_deviance

EXIT_BY_VERDICT = {Verdict.INTERSECT: 0, Verdict.DISJOINT: 1, Verdict.UNCERTAIN: 2}
USAGE_EXIT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default, which collides with UNCERTAIN
    def error(self, message: str):
        raise UsageError(message)


def parse_counts(text: str) -> tuple[int, ...]:
    try:
        counts = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"counts must be comma-separated integers, got {text!r}") from None
    if len(counts) < 2:
        raise UsageError(f"need at least 2 categories, got {text!r}")
    if any(c < 0 for c in counts):
        raise UsageError(f"counts must be non-negative, got {text!r}")
    if sum(counts) < 1:
        raise UsageError(f"counts must sum to a positive sample size, got {text!r}")
    return counts


def parse_probs(text: str) -> tuple[float, ...]:
    try:
        probs = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"probabilities must be comma-separated decimals, got {text!r}") from None
    return probs


def format_pvalue(value: float) -> str:
    # fixed point keeps 12 significant digits on [0.1, 1]; scientific
    # notation preserves them for small tail values
    if value != 0.0 and abs(value) < 0.1:
        return f"{value:.11e}"
    return f"{value:.12f}"


@dataclass(frozen=True)
class RunReport:
    """Serializable record of one decide run; round-trips through JSON."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    config: DecisionConfig
    verdict: str
    witness: tuple[float, ...] | None
    face: tuple[int, ...] | None
    cells_processed: int
    cells_pruned: int
    unresolved_count: int
    cache_hits: int
    cache_misses: int
    budget_exhausted: bool
    wall_time_s: float
    faces: tuple[tuple[tuple[int, ...], str, int, int, bool], ...] | None

    @classmethod
    def from_decision(
        cls,
        a: tuple[int, ...],
        b: tuple[int, ...],
        config: DecisionConfig,
        decision: Decision,
        wall_time_s: float,
    ) -> "RunReport":
        faces = None
        if decision.face_results is not None:
            faces = tuple(
                (s.dropped, s.verdict.value, s.cells_processed, s.unresolved_count, s.budget_exhausted)
                for s in decision.face_results
            )
        return cls(
            a=a,
            b=b,
            config=config,
            verdict=decision.verdict.value,
            witness=decision.witness.probs if decision.witness is not None else None,
            face=decision.face,
            cells_processed=decision.cells_processed,
            cells_pruned=decision.cells_pruned,
            unresolved_count=decision.unresolved_count,
            cache_hits=decision.cache_hits,
            cache_misses=decision.cache_misses,
            budget_exhausted=decision.budget_exhausted,
            wall_time_s=wall_time_s,
            faces=faces,
        )

    def to_dict(self) -> dict:
        return {
            "instance": {"a": list(self.a), "b": list(self.b)},
            "config": dataclasses.asdict(self.config),
            "verdict": self.verdict,
            "witness": list(self.witness) if self.witness is not None else None,
            "face": list(self.face) if self.face is not None else None,
            "statistics": {
                "cells_processed": self.cells_processed,
                "cells_pruned": self.cells_pruned,
                "unresolved_count": self.unresolved_count,
                "cache_hits": self.cache_hits,
                "cache_misses": self.cache_misses,
                "budget_exhausted": self.budget_exhausted,
                "wall_time_s": self.wall_time_s,
            },
            "faces": (
                [
                    {
                        "dropped": list(dropped),
                        "verdict": verdict,
                        "cells_processed": cells,
                        "unresolved_count": unresolved,
                        "budget_exhausted": exhausted,
                    }
                    for dropped, verdict, cells, unresolved, exhausted in self.faces
                ]
                if self.faces is not None
                else None
            ),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        stats = data["statistics"]
        faces = None
        if data["faces"] is not None:
            faces = tuple(
                (
                    tuple(entry["dropped"]),
                    entry["verdict"],
                    entry["cells_processed"],
                    entry["unresolved_count"],
                    entry["budget_exhausted"],
                )
                for entry in data["faces"]
            )
        return cls(
            a=tuple(data["instance"]["a"]),
            b=tuple(data["instance"]["b"]),
            config=DecisionConfig(**data["config"]),
            verdict=data["verdict"],
            witness=tuple(data["witness"]) if data["witness"] is not None else None,
            face=tuple(data["face"]) if data["face"] is not None else None,
            cells_processed=stats["cells_processed"],
            cells_pruned=stats["cells_pruned"],
            unresolved_count=stats["unresolved_count"],
            cache_hits=stats["cache_hits"],
            cache_misses=stats["cache_misses"],
            budget_exhausted=stats["budget_exhausted"],
            wall_time_s=stats["wall_time_s"],
            faces=faces,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        if self.witness is not None:
            lines.append("witness: " + " ".join(f"{x:.12g}" for x in self.witness))
            dropped = ",".join(str(i) for i in self.face) if self.face else "none"
            lines.append(f"witness face (dropped categories): {dropped}")
        lines.append(
            f"cells: {self.cells_processed} processed, {self.cells_pruned} pruned, "
            f"{self.unresolved_count} unresolved"
        )
        lines.append(f"cache: {self.cache_hits} hits, {self.cache_misses} misses")
        if self.budget_exhausted:
            lines.append("cell budget exhausted")
        if self.faces is not None:
            for dropped, verdict, cells, unresolved, _ in self.faces:
                label = "{" + ",".join(str(i) for i in dropped) + "}"
                lines.append(f"  face {label}: {verdict} ({cells} cells, {unresolved} unresolved)")
        lines.append(f"wall time: {self.wall_time_s:.3f}s")
        return "\n".join(lines)


def _add_instance_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--a", required=True, help="first outcome, comma-separated counts, e.g. 1,6,1")
    sub.add_argument("--b", required=True, help="second outcome, comma-separated counts")
    sub.add_argument("--alpha", type=float, required=True, help="confidence level parameter in (0, 1)")


def build_parser() -> _Parser:
    parser = _Parser(prog="mvcheck", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    decide = subs.add_parser("decide", help="certified intersection decision")
    _add_instance_args(decide)
    decide.add_argument("--tau", type=float, default=1e-3, help="robustness margin (default 1e-3)")
    decide.add_argument("--eps", type=float, default=1e-3, help="refinement floor on cell diameter")
    decide.add_argument("--max-cells", type=int, default=500_000, help="cell budget per face")
    decide.add_argument("--format", choices=("text", "json"), default="text")
    decide.add_argument("--trace", metavar="PATH", default=None, help="write the refinement log as JSON")
    decide.add_argument("--workers", type=int, default=1,
                        help="accepted for compatibility; cells are processed serially, "
                             "results never depend on this value")

    pvalue = subs.add_parser("pvalue", help="exact multinomial p-value at a parameter")
    pvalue.add_argument("--outcome", required=True, help="observed counts, e.g. 1,6,1")
    pvalue.add_argument("--p", required=True, help="parameter, comma-separated decimals summing to 1")

    grid = subs.add_parser("grid", help="membership grid over the simplex (3 categories)")
    _add_instance_args(grid)
    grid.add_argument("--resolution", type=int, required=True, help="grid cells per axis")
    grid.add_argument("--method", choices=("mvc", "chisq"), required=True)
    grid.add_argument("--out", required=True, metavar="PATH", help="CSV output path")
    grid.add_argument("--svg", metavar="PATH", default=None, help="optional ternary figure")

    bench = subs.add_parser("bench", help="random instances: engine vs brute-force reference")
    bench.add_argument("--suite", choices=("random",), default="random")
    bench.add_argument("--count", type=int, required=True)
    bench.add_argument("--n-max", type=int, default=10)
    bench.add_argument("--k", type=int, default=3)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--alpha", type=float, default=0.17)
    bench.add_argument("--tau", type=float, default=1e-3)
    bench.add_argument("--eps", type=float, default=1e-3)
    bench.add_argument("--resolution", type=int, default=300, help="reference grid resolution")
    return parser


def cmd_decide(args) -> int:
    a, b = parse_counts(args.a), parse_counts(args.b)
    if len(a) != len(b):
        raise UsageError(f"outcomes have different category counts: {len(a)} vs {len(b)}")
    if sum(a) != sum(b):
        raise UsageError(f"outcomes have different sample sizes: {sum(a)} vs {sum(b)}")
    if args.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {args.workers}")
    config = DecisionConfig(alpha=args.alpha, tau=args.tau, epsilon=args.eps, max_cells=args.max_cells)
    started = time.perf_counter()
    decision = decide_with_faces(a, b, config, collect_trace=args.trace is not None)
    elapsed = time.perf_counter() - started
    report = RunReport.from_decision(a, b, config, decision, elapsed)
    if args.trace is not None:
        with open(args.trace, "w") as fh:
            json.dump(list(decision.trace or ()), fh, indent=2)
    print(report.to_json() if args.format == "json" else report.to_text())
    return EXIT_BY_VERDICT[decision.verdict]


def cmd_pvalue(args) -> int:
    outcome = parse_counts(args.outcome)
    probs = parse_probs(args.p)
    if len(probs) != len(outcome):
        raise UsageError(f"outcome has {len(outcome)} categories, parameter has {len(probs)}")
    try:
        point = SimplexPoint(probs)
        value = exact_p_value(outcome, point)
    except (ValueError, MvcheckError) as exc:
        raise UsageError(str(exc)) from None
    print(format_pvalue(value))
    return 0


def cmd_grid(args) -> int:
    a, b = parse_counts(args.a), parse_counts(args.b)
    if len(a) != 3 or len(b) != 3:
        raise UsageError("grid output is defined for exactly 3 categories")
    if sum(a) != sum(b):
        raise UsageError(f"outcomes have different sample sizes: {sum(a)} vs {sum(b)}")
    if args.resolution < 1:
        raise UsageError(f"--resolution must be >= 1, got {args.resolution}")
    if not 0.0 < args.alpha < 1.0:
        raise UsageError(f"--alpha must lie in (0, 1), got {args.alpha}")

    points = simplex_centroid_grid(3, args.resolution)
    if args.method == "mvc":
        table = enumerate_outcomes(sum(a), 3)
        in_a = grid_pvalues(table, a, points) >= args.alpha
        in_b = grid_pvalues(table, b, points) >= args.alpha
        region_label = "exact"
    else:
        threshold = WilksRegion.build(a, args.alpha).threshold
        in_a = _grid_deviance(a, points) <= threshold
        in_b = _grid_deviance(b, points) <= threshold
        region_label = "chi-square"

    with open(args.out, "w") as fh:
        fh.write("p1,p2,p3,in_A,in_B\n")
        for row, fa, fb in zip(points, in_a, in_b):
            coords = ",".join(f"{x:.12g}" for x in row)
            fh.write(f"{coords},{int(fa)},{int(fb)}\n")

    if args.svg is not None:
        from .plotting import render_membership

        render_membership(
            points, in_a, in_b,
            label_a=f"A={','.join(map(str, a))}",
            label_b=f"B={','.join(map(str, b))}",
            title=f"{region_label} regions at alpha={args.alpha:g}",
            path=args.svg,
        )
    return 0


def cmd_bench(args) -> int:
    if args.count < 0:
        raise UsageError(f"--count must be >= 0, got {args.count}")
    if args.k < 2 or args.n_max < 1:
        raise UsageError("bench needs --k >= 2 and --n-max >= 1")
    config = DecisionConfig(alpha=args.alpha, tau=args.tau, epsilon=args.eps)
    rng = np.random.default_rng(args.seed)
    rows = []
    totals = {"cells": 0, "hits": 0, "misses": 0, "uncertain": 0, "agree": 0, "decided": 0}
    started = time.perf_counter()
    for i in range(args.count):
        n = int(rng.integers(1, args.n_max + 1))
        table = enumerate_outcomes(n, args.k)
        a = tuple(int(c) for c in table.counts[int(rng.integers(table.m))])
        b = tuple(int(c) for c in table.counts[int(rng.integers(table.m))])
        decision = decide_with_faces(a, b, config)
        reference = oracle_max_min_pvalue(a, b, args.resolution)
        totals["cells"] += decision.cells_processed
        totals["hits"] += decision.cache_hits
        totals["misses"] += decision.cache_misses
        if decision.verdict is Verdict.UNCERTAIN:
            totals["uncertain"] += 1
            agreement = "-"
        else:
            totals["decided"] += 1
            ok = (decision.verdict is Verdict.INTERSECT) == (reference >= args.alpha)
            totals["agree"] += int(ok)
            agreement = "yes" if ok else "NO"
        rows.append((i, n, a, b, decision.verdict.value, f"{reference:.6f}", agreement))
    elapsed = time.perf_counter() - started

    print(f"{'idx':>4} {'n':>3} {'A':>14} {'B':>14} {'verdict':>10} {'reference':>10} {'agree':>6}")
    for idx, n, a, b, verdict, ref, agreement in rows:
        sa, sb = ",".join(map(str, a)), ",".join(map(str, b))
        print(f"{idx:>4} {n:>3} {sa:>14} {sb:>14} {verdict:>10} {ref:>10} {agreement:>6}")
    decided = totals["decided"]
    lookups = totals["hits"] + totals["misses"]
    print(f"instances: {args.count}, decided: {decided}, "
          f"agreement: {totals['agree']}/{decided if decided else 0}, "
          f"uncertain rate: {totals['uncertain'] / args.count if args.count else 0.0:.3f}")
    print(f"mean cells: {totals['cells'] / args.count if args.count else 0.0:.1f}, "
          f"cache hit rate: {totals['hits'] / lookups if lookups else 0.0:.3f}")
    print(f"wall time: {elapsed:.3f}s")
    if decided and totals["agree"] != decided:
        return 4
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "decide":
            return cmd_decide(args)
        if args.command == "pvalue":
            return cmd_pvalue(args)
        if args.command == "grid":
            return cmd_grid(args)
        return cmd_bench(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except MvcheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT + 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT + 1


if __name__ == "__main__":
    sys.exit(main())
