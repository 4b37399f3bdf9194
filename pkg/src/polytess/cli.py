"""Command-line front end: ``polytess {analytic,simulate,typical,render,quadrature,replay}``.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import platform
import shlex
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import scipy

from . import __version__
from . import analytic as an
from .arrangement import build_arrangement
from .directional import DiscreteDirections, DistributionError, SpecParseError, parse_distribution
from .lines import SimulationConfig, sample_disk_arrays
from .parallel import default_threads
from .render import render_svg
from .rng import replicate_stream
from .typical import audit_rows, estimate_p3_by_weighting, typical_cell_vertex_distribution
from .window import CSV_HEADER, pooled_proportion, simulate_window

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3
AUDIT_HEADER = ["sample", "config_case", "phi0", "phi1", "z1", "phi2", "weight", "is_triangle"]


class UsageError(Exception):
    pass


class OutputError(Exception):
    pass


def fmt12(x: float) -> str:
    return f"{x:.12g}"


# --- output plumbing ----------------------------------------------------------------

def manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.csv")


def write_text(path: Path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from None


def write_manifest(args, argv: Sequence[str], outputs: List[Path]) -> None:
    """Record how the outputs were produced; the only place timestamps appear."""
    rows = [
        ("command_line", shlex.join(["polytess", *argv])),
        ("command", args.command),
        ("dist", getattr(args, "dist", "") or ""),
        ("seed", getattr(args, "seed", "")),
        ("replicates", getattr(args, "reps", "")),
        ("samples", getattr(args, "samples", "")),
        ("polytess_version", __version__),
        ("python_version", platform.python_version()),
        ("numpy_version", np.__version__),
        ("scipy_version", scipy.__version__),
        ("timestamp_utc", datetime.now(timezone.utc).isoformat(timespec="seconds")),
        ("outputs", ";".join(str(p) for p in outputs)),
    ]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    w.writerows(rows)
    for p in outputs:
        write_text(manifest_path(p), buf.getvalue())


def read_manifest(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror or exc}") from None
    if not rows or rows[0] != ["key", "value"]:
        raise UsageError(f"{path} is not a run manifest")
    return {k: v for k, v in rows[1:]}


def emit(args, argv, text: str, out: Optional[str]) -> List[Path]:
    if out is None:
        sys.stdout.write(text)
        return []
    path = Path(out)
    write_text(path, text)
    return [path]


def table(header: Sequence[str], rows: Sequence[Sequence], fmt: str) -> str:
    if fmt == "pretty":
        cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t" if fmt == "tsv" else ",", lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def distribution(spec: str):
    try:
        return parse_distribution(spec)
    except SpecParseError as exc:
        raise UsageError(f"invalid distribution {spec!r}: {exc}") from None


# --- commands -----------------------------------------------------------------------

def analytic_for(g):
    if isinstance(g, DiscreteDirections):
        if g.name.startswith("g3:"):
            return an.p3_g3(g.weights[0], g.weights[1])
        if g.name.startswith("gk:") and len(g.angles) >= 3:
            return an.p3_gk(len(g.angles))
        # g4 and general laws: exact enumeration (the printed g4 display is only
        # reliable at equal weights)
        return an.p3_discrete(g)
    return an.p3_uniform()


def cmd_analytic(args, argv) -> List[Path]:
    if args.dist is not None:
        if args.k_min is not None or args.k_max is not None:
            raise UsageError("use either --dist or --k-min/--k-max")
        g = distribution(args.dist)
        v = analytic_for(g)
        rows = [[args.dist, "p3", fmt12(v.value), v.form]]
        if not isinstance(g, DiscreteDirections):
            p4 = an.p4_uniform()
            rows.append([args.dist, "p4", fmt12(p4.value), p4.form])
        text = table(["dist", "quantity", "value", "form"], rows, args.format)
    else:
        lo = 3 if args.k_min is None else args.k_min
        hi = lo if args.k_max is None else args.k_max
        if lo < 3 or hi < lo:
            raise UsageError(f"need 3 <= k-min <= k-max, got {lo}..{hi}")
        rows = []
        for k in range(lo, hi + 1):
            closed = an.P3_GK_CLOSED.get(k)
            rows.append([k, fmt12(an.p3_gk(k).value), "" if closed is None else fmt12(closed)])
        text = table(["k", "p3_exact", "p3_formula_closed"], rows, args.format)
    return emit(args, argv, text, args.out)


def sim_config(args) -> SimulationConfig:
    try:
        return SimulationConfig(args.gamma, args.radius, args.seed, getattr(args, "reps", 1))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args, argv) -> List[Path]:
    g = distribution(args.dist)
    cfg = sim_config(args)
    results = simulate_window(g, cfg, args.threads)
    text = CSV_HEADER + "\n" + "".join(r.csv_row() + "\n" for r in results)
    paths = emit(args, argv, text, args.out)
    est = pooled_proportion(results)
    summary = (f"pooled_proportion={fmt12(est.estimate)} stderr={fmt12(est.standard_error)} "
               f"cells={est.n_samples} replicates={len(results)}\n")
    bad = [r.replicate for r in results if not r.euler_ok or r.area_defect > 1e-6]
    (sys.stdout if paths else sys.stderr).write(summary)
    if bad:
        sys.stderr.write(f"warning: topology or area check failed on replicates {bad}\n")
    return paths


def cmd_typical(args, argv) -> List[Path]:
    g = distribution(args.dist)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if not args.gamma > 0:
        raise UsageError("--gamma must be positive")
    ref = analytic_for(g).value
    rows = []
    paths: List[Path] = []
    if args.mode == "weight":
        est = estimate_p3_by_weighting(g, args.samples, args.seed, args.threads)
        rows.append(["p3", fmt12(est.estimate), fmt12(est.standard_error), fmt12(ref), args.samples])
        if args.audit:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(AUDIT_HEADER)
            for r in audit_rows(g, args.samples, args.seed):
                w.writerow([r[0], r[1], *(fmt12(x) for x in r[2:7]), r[7]])
            path = Path(args.audit)
            write_text(path, buf.getvalue())
            paths.append(path)
    else:
        if args.audit:
            raise UsageError("--audit is only available with --mode weight")
        vd = typical_cell_vertex_distribution(g, args.gamma, args.samples, args.seed, args.threads)
        m = vd.mean_vertices
        rows.append(["mean_vertices", fmt12(m.estimate), fmt12(m.standard_error), "4", vd.n_samples])
        s3 = vd.share(3)
        rows.append(["p3", fmt12(s3.estimate), fmt12(s3.standard_error), fmt12(ref), vd.n_samples])
        s4 = vd.share(4)
        p4 = "" if isinstance(g, DiscreteDirections) else fmt12(an.p4_uniform().value)
        rows.append(["p4", fmt12(s4.estimate), fmt12(s4.standard_error), p4, vd.n_samples])
        for k, c in vd.histogram.items():
            rows.append([f"vertices_{k}", c, "", "", vd.n_samples])
        rows.append(["overflow", vd.overflow, "", "", args.samples])
    text = table(["quantity", "estimate", "stderr", "reference", "n"], rows, "csv")
    paths = emit(args, argv, text, args.out) + paths
    return paths


def cmd_render(args, argv) -> List[Path]:
    g = distribution(args.dist)
    cfg = sim_config(args)
    lines = sample_disk_arrays(g, cfg.gamma, cfg.window_radius, replicate_stream(cfg.seed, 0))
    svg = render_svg(build_arrangement(lines, cfg.window_radius))
    path = Path(args.out)
    write_text(path, svg)
    return [path]


QUADRATURE_REFERENCE = an.P3_UNIFORM


def cmd_quadrature(args, argv) -> List[Path]:
    if args.grid < 16:
        raise UsageError("--grid must be at least 16")
    if args.which == "limit":
        v = an.limit_integral(args.grid)
    else:
        double, single = an.iso_integral_reduction_check(args.grid)
        v = double if args.which == "iso-double" else single
    rows = [[args.which, args.grid, fmt12(v.value), f"{v.error_bound:.3e}", fmt12(QUADRATURE_REFERENCE),
             f"{abs(v.value - QUADRATURE_REFERENCE):.3e}"]]
    text = table(["which", "grid", "value", "error_bound", "reference", "abs_diff"], rows, args.format)
    return emit(args, argv, text, args.out)


def cmd_replay(args, argv) -> List[Path]:
    m = read_manifest(Path(args.manifest))
    recorded = shlex.split(m.get("command_line", ""))[1:]
    if not recorded or recorded[0] == "replay":
        raise UsageError("manifest holds no replayable command")
    code = main(recorded)
    if code:
        raise SystemExit(code)
    return []


# --- parser -------------------------------------------------------------------------

def positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {s!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polytess", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--threads", type=positive_int, default=default_threads(),
                        help="worker processes (default: $POLYTESS_THREADS or 1)")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    a = sub.add_parser("analytic", help="exact triangle probabilities")
    a.add_argument("--dist")
    a.add_argument("--k-min", type=int)
    a.add_argument("--k-max", type=int)
    a.add_argument("--format", choices=["csv", "tsv", "pretty"], default="pretty")
    a.add_argument("--out")
    common(a, seed=False)

    s = sub.add_parser("simulate", help="window simulation, per-replicate CSV")
    s.add_argument("--dist", required=True)
    s.add_argument("--radius", type=float, required=True)
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--reps", type=positive_int, default=1)
    s.add_argument("--out")
    common(s)

    t = sub.add_parser("typical", help="typical-cell estimators")
    t.add_argument("--dist", required=True)
    t.add_argument("--samples", type=int, required=True)
    t.add_argument("--mode", choices=["weight", "full-cell"], default="weight")
    t.add_argument("--gamma", type=float, default=1.0)
    t.add_argument("--audit", help="per-sample CSV (weight mode)")
    t.add_argument("--out")
    common(t)

    r = sub.add_parser("render", help="SVG picture of one window")
    r.add_argument("--dist", required=True)
    r.add_argument("--radius", type=float, required=True)
    r.add_argument("--gamma", type=float, default=1.0)
    r.add_argument("--out", required=True)
    common(r)

    q = sub.add_parser("quadrature", help="numerical integrals for the isotropic constant")
    q.add_argument("--which", choices=["limit", "iso-double", "iso-single"], default="limit")
    q.add_argument("--grid", type=int, default=256)
    q.add_argument("--format", choices=["csv", "tsv", "pretty"], default="pretty")
    q.add_argument("--out")
    common(q, seed=False)

    rp = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    rp.add_argument("manifest")
    return p


COMMANDS = {
    "analytic": cmd_analytic,
    "simulate": cmd_simulate,
    "typical": cmd_typical,
    "render": cmd_render,
    "quadrature": cmd_quadrature,
    "replay": cmd_replay,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        outputs = COMMANDS[args.command](args, argv)
        if outputs:
            write_manifest(args, argv, outputs)
    except (UsageError, DistributionError, an.DomainError) as exc:
        print(f"polytess {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutputError as exc:
        print(f"polytess {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
