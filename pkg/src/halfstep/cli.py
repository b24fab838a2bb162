"""Command-line entry point: certify, counterexample, scan.

Every run emits a machine-readable report (JSON canonical, CSV as a flat
projection) that embeds its manifest: tool version, subcommand, parsed
parameters, and seed.  Reports are byte-identical across reruns with the
same manifest; wall-clock timing goes to stderr and is embedded only
when --timing is passed (which opts out of byte-identity).

Exit codes: 0 all checks passed; 1 usage or configuration error (the
diagnostic names the offending flag or field); 2 mathematical refusal or
violation (a certificate could not be established, or an exact/MC gate
failed).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .certificates import DEFAULT_EPS_GRID, certify
from .errors import (
    DimensionMismatch,
    EnumerationTooLarge,
    ExponentOutOfRange,
    IndexOutOfRange,
    PrefixTooShort,
)
from .jsonio import config_number, dumps_report, rational_str
from .probability import (
    ENUMERATION_CAP,
    RNG_NAME,
    IndicatorSum,
    McConfig,
    convergence_in_probability_scan,
    drive_rv,
    prob_metric_exact,
    prob_metric_mc,
    solution_rv,
    tail_probability_exact,
    tail_probability_mc,
    union_probability_exact,
    verify_recurrence_identity,
)
from .seminorms import SeminormFamily
from .sequences import exact_vector, spec_from_config

# exact metric enumerations above this many events are skipped by the CLI
# (cost and memory grow like 2**T; the library cap stays ENUMERATION_CAP)
METRIC_CLI_CAP = 20

_USAGE_ERRORS = (
    ExponentOutOfRange,
    DimensionMismatch,
    PrefixTooShort,
    IndexOutOfRange,
    EnumerationTooLarge,
    ValueError,
    TypeError,
    OSError,
)


def _parse_index_list(text):
    """Parse "1..10" / "3,5,9" / "1..4,8" into a list of indices."""
    out = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ".." in chunk:
            lo, _, hi = chunk.partition("..")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError(f"empty index range {chunk!r} in --n")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(chunk))
    if not out:
        raise ValueError("--n must list at least one index")
    if any(n < 1 for n in out):
        raise ValueError("--n indices must be >= 1")
    return out


def _parse_eps_list(text):
    out = [float(chunk) for chunk in text.split(",") if chunk.strip()]
    if not out:
        raise ValueError("--eps must list at least one value")
    if any(not e > 0 for e in out):
        raise ValueError("--eps values must be positive")
    return out


def _emit(report_obj, csv_rows, ns):
    """Write the report (JSON canonical or CSV projection) to --out/stdout."""
    if ns.timing:
        elapsed = (time.perf_counter() - ns._t0) * 1000.0
        report_obj["manifest"]["runtime_ms"] = round(elapsed, 3)
    if ns.format == "json":
        text = dumps_report(report_obj)
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in csv_rows:
            writer.writerow(row)
        text = buf.getvalue()
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _manifest(ns, subcommand, parameters):
    # deliberately excludes the output path: the same run written to two
    # different files must produce byte-identical reports
    manifest = {
        "tool": "halfstep",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": parameters,
    }
    if getattr(ns, "seed", None) is not None:
        manifest["seed"] = ns.seed
        manifest["rng"] = RNG_NAME
    return manifest


def run_certify(ns):
    """Certify a configured sequence/limit against a seminorm family."""
    with open(ns.config, "r", encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ValueError("config must be a JSON object")
    for field in ("family", "sequence", "limit"):
        if field not in cfg:
            raise ValueError(f"config is missing field {field!r}")
    family = SeminormFamily.from_config(cfg["family"])
    spec = spec_from_config(cfg["sequence"])
    limit = cfg["limit"]
    if not isinstance(limit, (list, tuple)):
        raise ValueError("field 'limit' must be a list of numbers")
    eps_grid = ns.eps if ns.eps is not None else list(DEFAULT_EPS_GRID)
    report = certify(
        family, spec, limit, eps_grid=eps_grid, prefix_len=ns.prefix
    )
    manifest = _manifest(
        ns,
        "certify",
        {
            "config_path": ns.config,
            "eps": eps_grid,
            "prefix": ns.prefix,
            "format": ns.format,
        },
    )
    manifest["config"] = {
        "family": family.to_config(),
        "sequence": spec.to_config(),
        "limit": [config_number(v) for v in exact_vector(limit)],
    }
    report_obj = {"manifest": manifest, "certify": report.to_report()}
    csv_rows = [["seminorm_index", "epsilon", "m", "observed", "bound", "pass"]]
    for cert in report.certificates:
        for row in cert.rows:
            csv_rows.append(
                [cert.seminorm_index, cert.epsilon, row.m, row.observed,
                 row.bound, row.passed]
            )
    _emit(report_obj, csv_rows, ns)
    return 0 if report.all_certified else 2


def _mc_block(estimate, oracle):
    """Report fields for one MC estimate, gated against its oracle."""
    block = {
        "mean": estimate.mean,
        "stderr": estimate.stderr,
        "samples": estimate.samples,
    }
    if oracle is not None:
        block["exact"] = rational_str(oracle)
        block["within_4_stderr"] = (
            abs(estimate.mean - float(oracle)) <= 4 * estimate.stderr
        )
    return block


def run_counterexample(ns):
    """Reproduce the counterexample identities for each requested index."""
    half = Fraction(1, 2)
    want_mc = ns.mode in ("mc", "both")
    want_exact = ns.mode in ("exact", "both")
    if want_mc and ns.seed is None:
        raise ValueError("--seed is required in mc/both mode")
    cfg = McConfig(seed=ns.seed, samples=ns.samples) if want_mc else None
    rows = []
    all_ok = True
    for n in ns.n:
        union = union_probability_exact(n)
        identity = verify_recurrence_identity(n)
        row = {
            "n": n,
            "union_probability": rational_str(union),
            "union_is_half": union == half,
            "recurrence_identity": identity,
        }
        ok = row["union_is_half"] and identity
        zero = IndicatorSum()
        drive = drive_rv(n)
        solution = solution_rv(2 * n + 1)
        # exact oracles are computed in every mode (they gate MC estimates);
        # mode only controls which report fields appear and whether we sample
        tail_drive = tail_probability_exact(drive, half)
        metric_drive = prob_metric_exact(drive, zero)
        tail_solution = None
        metric_solution = None
        if 2 * n <= ENUMERATION_CAP:
            tail_solution = tail_probability_exact(solution, half)
            ok = ok and tail_solution >= half
        if 2 * n <= METRIC_CLI_CAP:
            metric_solution = prob_metric_exact(solution, zero)
        if want_exact:
            row["tail_drive_exact"] = rational_str(tail_drive)
            row["metric_drive_exact"] = rational_str(metric_drive)
            if tail_solution is not None:
                row["tail_solution_exact"] = rational_str(tail_solution)
                row["tail_solution_at_least_half"] = tail_solution >= half
            if metric_solution is not None:
                row["metric_solution_exact"] = rational_str(metric_solution)
        if want_mc:
            est = tail_probability_mc(drive, 0.5, cfg)
            row["tail_drive_mc"] = _mc_block(est, tail_drive)
            ok = ok and row["tail_drive_mc"].get("within_4_stderr", True)
            est = tail_probability_mc(solution, 0.5, cfg)
            row["tail_solution_mc"] = _mc_block(est, tail_solution)
            ok = ok and row["tail_solution_mc"].get("within_4_stderr", True)
            if tail_solution is None:
                # no oracle past the cap; report the 1/2 lower bound check
                row["tail_solution_mc"]["above_half_lower_bound"] = (
                    est.mean >= 0.5 - 4 * est.stderr
                )
            est = prob_metric_mc(drive, zero, cfg)
            row["metric_drive_mc"] = _mc_block(est, metric_drive)
            ok = ok and row["metric_drive_mc"].get("within_4_stderr", True)
            est = prob_metric_mc(solution, zero, cfg)
            row["metric_solution_mc"] = _mc_block(est, metric_solution)
            ok = ok and row["metric_solution_mc"].get("within_4_stderr", True)
        row["ok"] = ok
        all_ok = all_ok and ok
        rows.append(row)
    manifest = _manifest(
        ns,
        "counterexample",
        {
            "n": ns.n,
            "mode": ns.mode,
            "samples": ns.samples if want_mc else None,
            "format": ns.format,
        },
    )
    report_obj = {"manifest": manifest, "all_ok": all_ok, "rows": rows}
    csv_rows = [["n", "union_probability", "recurrence_identity",
                 "tail_drive_exact", "tail_solution_exact", "ok"]]
    for row in rows:
        csv_rows.append(
            [row["n"], row["union_probability"], row["recurrence_identity"],
             row.get("tail_drive_exact", ""),
             row.get("tail_solution_exact", ""), row["ok"]]
        )
    _emit(report_obj, csv_rows, ns)
    return 0 if all_ok else 2


_SCAN_FAMILIES = {
    "drive": (drive_rv, "drive_rv(n)"),
    "solution-odd": (lambda n: solution_rv(2 * n + 1), "solution_rv(2n+1)"),
}


def run_scan(ns):
    """Tabulate tail probabilities along a family of variables."""
    if ns.seed is None:
        raise ValueError("--seed is required for scan (MC fallback)")
    maker, label = _SCAN_FAMILIES[ns.family]
    cfg = McConfig(seed=ns.seed, samples=ns.samples)
    table = convergence_in_probability_scan(maker, ns.eps_single, ns.n, cfg)
    manifest = _manifest(
        ns,
        "scan",
        {
            "family": ns.family,
            "variable": label,
            "eps": ns.eps_single,
            "n": ns.n,
            "samples": ns.samples,
            "format": ns.format,
        },
    )
    rows = [
        {
            "n": r.index,
            "value": r.value,
            "stderr": r.stderr,
            "mode": r.mode,
            "exact": rational_str(r.exact) if r.exact is not None else None,
        }
        for r in table.rows
    ]
    report_obj = {
        "manifest": manifest,
        "scan": {"eps": table.eps, "verdict": table.verdict, "rows": rows},
    }
    csv_rows = [["n", "value", "stderr", "mode"]]
    for r in table.rows:
        csv_rows.append([r.index, r.value, "" if r.stderr is None else r.stderr,
                         r.mode])
    _emit(report_obj, csv_rows, ns)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="halfstep",
        description=(
            "Convergence certificates for the averaged recurrence "
            "2*x[n+1] - x[n], and an exact probabilistic counterexample lab."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser(
        "certify", help="certify convergence of a configured sequence"
    )
    p.add_argument("--config", required=True, help="JSON config path")
    p.add_argument("--eps", type=_parse_eps_list, default=None,
                   help="comma-separated eps grid (default: built-in grid)")
    p.add_argument("--prefix", type=int, default=64,
                   help="prefix length to materialize (default 64)")
    _common_output_flags(p)
    p.set_defaults(handler=run_certify)

    p = sub.add_parser(
        "counterexample",
        help="reproduce the exact counterexample identities",
    )
    p.add_argument("--n", required=True, type=_parse_index_list,
                   help="indices, e.g. '1..10' or '2,5,8'")
    p.add_argument("--mode", choices=("exact", "mc", "both"), default="exact")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None,
                   help="sampling seed (required in mc/both mode)")
    _common_output_flags(p)
    p.set_defaults(handler=run_counterexample)

    p = sub.add_parser(
        "scan", help="tail probabilities along a family of variables"
    )
    p.add_argument("--family", choices=tuple(_SCAN_FAMILIES), default="drive")
    p.add_argument("--eps", dest="eps_single", type=float, default=0.5)
    p.add_argument("--n", required=True, type=_parse_index_list)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None)
    _common_output_flags(p)
    p.set_defaults(handler=run_scan)
    return parser


def _common_output_flags(p):
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--timing", action="store_true",
                   help="embed wall-clock runtime in the report "
                        "(breaks byte-identical reruns)")


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; map onto the 0/1 contract
        return 0 if exc.code == 0 else 1
    t0 = time.perf_counter()
    ns._t0 = t0
    try:
        code = ns.handler(ns)
    except _USAGE_ERRORS as exc:
        print(f"halfstep: error: {exc}", file=sys.stderr)
        return 1
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    print(f"halfstep {ns.subcommand}: exit {code}, {runtime_ms:.1f} ms",
          file=sys.stderr)
    return code


def script():
    raise SystemExit(main())
