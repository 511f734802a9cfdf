"""Command-line harness: seeded, reproducible experiment drivers around the
library, with JSON manifests, optional CSV tables, and flat-file result
persistence.

Subcommands

    certify   random search for a vector whose switching certificate beats a
              threshold
    gap       character spectrum and gap of the hyperplane Cayley graph, with
              an optional dense-eigensolver cross-check
    diam      BFS diameters of the semidirect product for one or more primes,
              with the centered-l1 lower bound
    tail      empirical tail frequency of the support-one sum against its
              proven bound
    kazhdan   certified Kazhdan interval (and optional explicit-vector upper
              bound) for a catalog group
    verify    the non-falsification suite: switching sweeps plus the catalog
              group checks

Exit codes: 0 success, 1 usage or configuration error, 2 mathematical
falsification, 3 resource cap hit. A config file (--config, JSON) supplies
defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import expsum, kazhdan, semidirect, spectral
from .groups import CatalogEntry, from_elements, load_catalog, permutation_group, semidirect_parts
from .manifest import ResultManifest, write_manifest
from .modp import FpVector
from .spectral import hyperplane_characters

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FALSIFIED = 2
EXIT_CAP = 3

SWEEP_PRIMES = (2, 3, 5)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D401 - argparse hook
        raise UsageError(message)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    sub.add_argument("--out", default=None, help="also write the manifest (or CSV) here")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--results-dir", default=None, help="override the results directory")


def build_parser() -> _Parser:
    parser = _Parser(prog="expander-forge", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("certify", help="search for a certifiable vector")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--max-trials", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)

    p = subs.add_parser("gap", help="character spectrum of the hyperplane graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--v", default=None, help="comma-separated entries, default (1,-1,0,...)")
    p.add_argument("--crosscheck", choices=("none", "dense"), default="none")
    _add_common(p)

    p = subs.add_parser("diam", help="BFS diameter of the semidirect product")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--p-list", default=None, help="comma-separated primes for a sweep")
    p.add_argument("--set", dest="genset", choices=("Y", "X"), default="Y")
    p.add_argument("--order-cap", type=int, default=semidirect.DEFAULT_ORDER_CAP)
    p.add_argument("--threshold", type=float, default=0.5, help="X-set certificate threshold")
    p.add_argument("--max-trials", type=int, default=100, help="X-set search trials")
    _add_common(p)

    p = subs.add_parser("tail", help="tail frequency of the support-one sum")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--u", type=int, default=1)
    _add_common(p)

    p = subs.add_parser("kazhdan", help="certified Kazhdan interval for a catalog group")
    p.add_argument("--group", required=True)
    p.add_argument("--gens", default=None,
                   help="comma-separated indices into the entry's generator list")
    p.add_argument("--catalog", default=None)
    p.add_argument("--opt", action="store_true", help="also run the explicit-vector optimizer")
    p.add_argument("--restarts", type=int, default=20)
    _add_common(p)

    p = subs.add_parser("verify", help="non-falsification suite")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--all", action="store_true")
    group.add_argument("--group", default=None)
    p.add_argument("--trials", type=int, default=1000, help="random vectors per group")
    p.add_argument("--max-sweep-n", type=int, default=4,
                   help="switching sweeps run for 2 <= n <= this (0 disables)")
    p.add_argument("--catalog", default=None)
    _add_common(p)

    return parser


def _inject_config(argv: List[str]) -> List[str]:
    """Fold a --config JSON file into argv as leading flags; explicit flags,
    coming later, win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config requires a path")
    path = argv[i + 1]
    argv = argv[:i] + argv[i + 2 :]
    try:
        cfg = json.loads(open(path).read())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    command = argv[0] if argv and not argv[0].startswith("-") else cfg.get("command")
    if command is None:
        raise UsageError("no command given on the command line or in the config file")
    rest = argv[1:] if argv and not argv[0].startswith("-") else argv
    injected: List[str] = []
    for key in sorted(cfg):
        if key == "command":
            continue
        flag = "--" + key.replace("_", "-")
        value = cfg[key]
        if isinstance(value, bool):
            if value:
                injected.append(flag)
        else:
            injected += [flag, str(value)]
    return [command] + injected + rest


def _parse_vector(text: str, n: int, p: int) -> FpVector:
    try:
        entries = [int(tok) for tok in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}") from None
    if len(entries) != n:
        raise UsageError(f"vector has {len(entries)} entries, expected n = {n}")
    return FpVector(entries, p)


def _parse_primes(args) -> List[int]:
    if args.p_list:
        try:
            return [int(tok) for tok in args.p_list.split(",")]
        except ValueError:
            raise UsageError(f"cannot parse --p-list {args.p_list!r}") from None
    if args.p is None:
        raise UsageError("give --p or --p-list")
    return [args.p]


def _config_echo(args, keys: Sequence[str]) -> Dict[str, Any]:
    echo = {"command": args.command, "seed": args.seed, "format": args.format}
    for key in keys:
        echo[key] = getattr(args, key)
    return echo


# ----------------------------------------------------------------------
# command implementations
# ----------------------------------------------------------------------

def _cmd_certify(args, manifest: ResultManifest) -> int:
    result = expsum.search_vector(
        args.n, args.p, threshold=args.threshold, max_trials=args.max_trials,
        seed=args.seed, workers=args.workers,
    )
    cert = result.certificate
    manifest.results = {
        "found": result.found,
        "trials": result.trials,
        # union bound on one trial failing the sweep threshold; vacuous at
        # desk scale, informative once n dwarfs log p
        "per_trial_failure_bound": args.p * expsum.tail_bound(args.n, args.threshold),
        "certificate": None
        if cert is None
        else {
            "v": cert.v,
            "max_support_one": cert.max_support_one,
            "u_argmax": cert.u_argmax,
            "spectral_bound": cert.spectral_bound,
        },
    }
    manifest.record(
        "spectral_bound",
        "expsum.search_vector",
        {"n": args.n, "p": args.p, "threshold": args.threshold,
         "max_trials": args.max_trials, "seed": args.seed},
    )
    if result.found:
        print(f"certify n={args.n} p={args.p}: success in {result.trials} trial(s), "
              f"bound {cert.spectral_bound:.6f}")
    else:
        best = "none" if cert is None else f"{cert.max_support_one:.6f}"
        print(f"certify n={args.n} p={args.p}: no certificate below {args.threshold} "
              f"in {result.trials} trials (best sweep max {best})")
    return EXIT_OK


def _cmd_gap(args, manifest: ResultManifest) -> int:
    if args.n % args.p == 0:
        raise UsageError(
            f"p = {args.p} divides n = {args.n}: the all-ones vector is sum-zero there "
            "and the coset bookkeeping degenerates; this command refuses the case"
        )
    v = (_parse_vector(args.v, args.n, args.p) if args.v
         else semidirect.unimaginative_vector(args.n, args.p))
    if not v.is_sum_zero:
        raise UsageError("v must be sum-zero")
    if v.is_zero or v.is_constant:
        raise UsageError("v must be nonconstant (a constant vector generates nothing)")
    result = spectral.abelian_spectrum(v)
    wmat = hyperplane_characters(args.n, args.p)
    lam = spectral.character_values(v, wmat).real
    extremal = int(np.argmax(lam[1:])) + 1
    counts, edges = np.histogram(result.eigenvalues, bins=40, range=(-1.0, 1.0))
    from .perm import orbit_span_rank

    manifest.results = {
        "gap": result.gap,
        "second_largest": result.second_largest,
        "character_count": result.graph_order,
        "extremal_w": wmat[extremal],
        "spanning": orbit_span_rank(v) == args.n - 1,
        "v": v,
        "histogram": {"bin_edges": edges, "counts": counts},
    }
    manifest.record(
        "gap", "spectral.abelian_spectrum", {"n": args.n, "p": args.p, "v": v},
    )
    if args.crosscheck == "dense":
        diff = _dense_crosscheck(v)
        manifest.results["crosscheck"] = {"method": "dense", "max_abs_diff": diff,
                                          "agree": diff <= 1e-8}
        manifest.record("crosscheck.max_abs_diff", "spectral.dense_spectrum",
                        {"n": args.n, "p": args.p, "v": v})
    print(f"gap n={args.n} p={args.p} v={list(v)}: gap={result.gap:.6f} "
          f"({result.graph_order} eigenvalues)")
    return EXIT_OK


def _dense_crosscheck(v: FpVector) -> float:
    from .expsum import enumerate_v0
    from .perm import orbit

    rows = enumerate_v0(v.n, v.p)
    if rows.shape[0] > spectral.DENSE_MAX_DIM:
        raise UsageError("hyperplane too large for the dense cross-check")
    group = from_elements(
        f"V0_{v.n}_{v.p}",
        [FpVector(r, v.p) for r in rows],
        lambda a, b: FpVector((a.entries + b.entries) % v.p, v.p),
    )
    gens = orbit(v)
    dense = spectral.cayley_spectrum(group, gens)
    char = spectral.abelian_spectrum(v)
    return float(np.max(np.abs(dense.eigenvalues - char.eigenvalues)))


def _cmd_diam(args, manifest: ResultManifest) -> int:
    primes = _parse_primes(args)
    rows = []
    truncated_any = False
    for p in primes:
        if args.genset == "Y":
            gen = semidirect.build_Y(args.n, p)
            search = None
        else:
            search = expsum.search_vector(args.n, p, threshold=args.threshold,
                                          max_trials=args.max_trials, seed=args.seed)
            if not search.found:
                raise UsageError(
                    f"no certificate below {args.threshold} for p={p}; cannot build the X set"
                )
            gen = semidirect.build_X(args.n, p, search.certificate)
        res = semidirect.bfs_diameter(gen, order_cap=args.order_cap)
        truncated_any |= res.truncated
        order = semidirect.group_order(args.n, p)
        row = {
            "p": p,
            "group_order": order,
            "diameter": res.diameter,
            "order_reached": res.order,
            "l1_lower_bound": semidirect.l1_lower_bound(args.n, p),
            "log2_group_order": math.log2(order),
            "polylog_ref": math.log2(order) ** 2,
            "layer_sizes": res.layer_sizes,
            "truncated": res.truncated,
            "set": gen.label,
        }
        if search is not None:
            row["certificate_bound"] = search.certificate.spectral_bound
        rows.append(row)
        flag = " (truncated)" if res.truncated else ""
        print(f"diam n={args.n} p={p} set={gen.label}: diameter={res.diameter} "
              f"order={res.order}/{order} l1_bound={row['l1_lower_bound']}{flag}")
    manifest.results = {"instances": rows}
    manifest.record("diameter", "semidirect.bfs_diameter",
                    {"n": args.n, "primes": primes, "set": args.genset,
                     "order_cap": args.order_cap})
    return EXIT_CAP if truncated_any else EXIT_OK


def _cmd_tail(args, manifest: ResultManifest) -> int:
    try:
        result = expsum.tail_experiment(args.n, args.p, args.eps, args.trials,
                                        args.u, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    within = result.empirical_rate <= result.bound
    manifest.results = {
        "empirical_rate": result.empirical_rate,
        "bound": result.bound,
        "exceed_count": result.exceed_count,
        "trials": result.trials,
        "within_bound": within,
    }
    manifest.record("empirical_rate", "expsum.tail_experiment",
                    {"n": args.n, "p": args.p, "eps": args.eps, "u": args.u,
                     "trials": args.trials, "seed": args.seed})
    print(f"tail n={args.n} p={args.p} eps={args.eps}: rate={result.empirical_rate:.6g} "
          f"bound={result.bound:.6g} ({result.exceed_count}/{result.trials})")
    return EXIT_OK if within else EXIT_FALSIFIED


def _catalog_entry(args) -> CatalogEntry:
    catalog = load_catalog(args.catalog)
    if args.group not in catalog:
        raise UsageError(f"unknown group {args.group!r}; catalog has {sorted(catalog)}")
    return catalog[args.group]


def _cmd_kazhdan(args, manifest: ResultManifest) -> int:
    entry = _catalog_entry(args)
    group = entry.build()
    gens = group.generator_indices
    if args.gens is not None:
        try:
            picks = [int(tok) for tok in args.gens.split(",")]
        except ValueError:
            raise UsageError(f"cannot parse --gens {args.gens!r}") from None
        if any(not 0 <= i < len(gens) for i in picks):
            raise UsageError(f"--gens indices must be in 0..{len(gens) - 1}")
        gens = [gens[i] for i in picks]
    interval = kazhdan.kazhdan_interval(group, gens)
    manifest.results = {
        "group": group.name,
        "order": group.order,
        "generator_count": len(gens),
        "gap": interval.gap,
        "generating": interval.generating,
        "interval": {"lower": interval.lower, "upper": interval.upper,
                     "source": interval.source},
    }
    manifest.record("interval", "kazhdan.kazhdan_interval",
                    {"group": group.name, "generators": len(gens)})
    if args.opt:
        value, _ = kazhdan.kazhdan_upper_opt(group, gens, restarts=args.restarts,
                                             seed=args.seed)
        manifest.results["restricted_upper"] = value
        manifest.record("restricted_upper", "kazhdan.kazhdan_upper_opt",
                        {"group": group.name, "restarts": args.restarts,
                         "seed": args.seed})
    print(f"kazhdan {group.name} (order {group.order}): gap={interval.gap:.6f} "
          f"interval=[{interval.lower:.6f}, {interval.upper:.6f}]")
    return EXIT_OK


def _symmetric3_chain() -> kazhdan.VerificationReport:
    """The 6-element sanity case: S3 as a semidirect product of its rotation
    subgroup by a reflection."""
    group = permutation_group("S3_as_product", [(1, 2, 0), (1, 0, 2)])
    rot = group.index_of((1, 2, 0))
    swap = group.index_of((1, 0, 2))
    return kazhdan.verify_inequality_chain(
        group, group.closure([rot]), group.closure([swap]), [rot], [swap]
    )


def _cmd_verify(args, manifest: ResultManifest) -> int:
    catalog = load_catalog(args.catalog)
    if args.all:
        entries = list(catalog.values())
    else:
        if args.group not in catalog:
            raise UsageError(f"unknown group {args.group!r}; catalog has {sorted(catalog)}")
        entries = [catalog[args.group]]

    sweeps = []
    if args.all and args.max_sweep_n >= 2:
        for n in range(2, args.max_sweep_n + 1):
            for p in SWEEP_PRIMES:
                sweep = expsum.switching_sweep(n, p)
                sweeps.append(sweep)
                status = "ok" if sweep.violations() == 0 else "FALSIFIED"
                print(f"verify switching n={n} p={p}: margin_plain={sweep.min_margin_plain:.3e} "
                      f"margin_sharp={sweep.min_margin_sharp:.3e} [{status}]")

    reports: List[kazhdan.VerificationReport] = []
    for entry in entries:
        group = entry.build()
        gens = group.generator_indices
        reports.append(kazhdan.verify_basic_bounds(group, gens))
        reports.append(kazhdan.verify_almost_invariant_projection(
            group, gens, trials=args.trials, seed=args.seed))
        if entry.kind == "semidirect":
            n_idx, h_idx, s_gens, t_gens = semidirect_parts(group)
            reports.append(kazhdan.verify_inequality_chain(group, n_idx, h_idx,
                                                           s_gens, t_gens))
    if args.all:
        reports.append(_symmetric3_chain())

    for report in reports:
        status = "ok" if report.passed else "FALSIFIED"
        print(f"verify {report.group} {report.title}: "
              f"{len(report.checks)} checks [{status}]")

    falsifications = sum(len(r.failures) for r in reports)
    falsifications += sum(s.violations() for s in sweeps)
    manifest.results = {
        "sweeps": sweeps,
        "reports": reports,
        "falsifications": falsifications,
    }
    manifest.record("falsifications", "kazhdan.verify_*",
                    {"groups": [e.name for e in entries], "trials": args.trials,
                     "max_sweep_n": args.max_sweep_n, "seed": args.seed})
    print(f"verify: {falsifications} falsification(s)")
    return EXIT_FALSIFIED if falsifications else EXIT_OK


# ----------------------------------------------------------------------
# CSV rendering (column sets are pinned by golden tests)
# ----------------------------------------------------------------------

CSV_COLUMNS = {
    "certify": ["n", "p", "threshold", "max_trials", "seed", "found", "trials",
                "max_support_one", "u_argmax", "spectral_bound", "v"],
    "gap": ["n", "p", "v", "gap", "second_largest", "extremal_w",
            "character_count", "crosscheck_max_abs_diff"],
    "diam": ["p", "group_order", "diameter", "l1_lower_bound",
             "log2_group_order", "polylog_ref", "truncated"],
    "tail": ["n", "p", "eps", "u", "trials", "exceed_count", "empirical_rate",
             "bound", "within_bound", "seed"],
    "kazhdan": ["group", "order", "generator_count", "gap", "lower", "upper",
                "restricted_upper"],
    "verify": ["group", "suite", "check", "passed", "lhs", "rhs"],
}


def _vec_cell(value: Any) -> str:
    if isinstance(value, dict):
        value = value["entries"]
    return " ".join(str(int(x)) for x in value)


def render_csv(command: str, body: Dict[str, Any]) -> str:
    """RFC-4180 table for a manifest body."""
    config = body["config"]
    results = body["results"]
    columns = CSV_COLUMNS[command]
    rows: List[Dict[str, Any]] = []
    if command == "certify":
        cert = results["certificate"] or {}
        rows.append({
            "n": config["n"], "p": config["p"], "threshold": config["threshold"],
            "max_trials": config["max_trials"], "seed": config["seed"],
            "found": results["found"], "trials": results["trials"],
            "max_support_one": cert.get("max_support_one", ""),
            "u_argmax": cert.get("u_argmax", ""),
            "spectral_bound": cert.get("spectral_bound", ""),
            "v": _vec_cell(cert["v"]) if cert else "",
        })
    elif command == "gap":
        cross = results.get("crosscheck", {})
        rows.append({
            "n": config["n"], "p": config["p"], "v": _vec_cell(results["v"]),
            "gap": results["gap"], "second_largest": results["second_largest"],
            "extremal_w": _vec_cell(results["extremal_w"]),
            "character_count": results["character_count"],
            "crosscheck_max_abs_diff": cross.get("max_abs_diff", ""),
        })
    elif command == "diam":
        for inst in results["instances"]:
            rows.append({key: inst[key] for key in columns})
    elif command == "tail":
        rows.append({
            "n": config["n"], "p": config["p"], "eps": config["eps"],
            "u": config["u"], "trials": results["trials"],
            "exceed_count": results["exceed_count"],
            "empirical_rate": results["empirical_rate"], "bound": results["bound"],
            "within_bound": results["within_bound"], "seed": config["seed"],
        })
    elif command == "kazhdan":
        rows.append({
            "group": results["group"], "order": results["order"],
            "generator_count": results["generator_count"], "gap": results["gap"],
            "lower": results["interval"]["lower"],
            "upper": results["interval"]["upper"],
            "restricted_upper": results.get("restricted_upper", ""),
        })
    elif command == "verify":
        for sweep in results["sweeps"]:
            for kind in ("plain", "sharp"):
                rows.append({
                    "group": f"sweep_n{sweep['n']}_p{sweep['p']}",
                    "suite": "switching", "check": kind,
                    "passed": sweep[f"min_margin_{kind}"] >= -1e-9,
                    "lhs": sweep[f"min_margin_{kind}"], "rhs": 0.0,
                })
        for report in results["reports"]:
            for check in report["checks"]:
                rows.append({
                    "group": report["group"], "suite": report["title"],
                    "check": check["name"], "passed": check["passed"],
                    "lhs": check["lhs"], "rhs": check["rhs"],
                })
    else:
        raise ValueError(f"no CSV rendering for {command!r}")

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns)
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

_HANDLERS = {
    "certify": (_cmd_certify, ["n", "p", "threshold", "max_trials", "workers"]),
    "gap": (_cmd_gap, ["n", "p", "v", "crosscheck"]),
    "diam": (_cmd_diam, ["n", "p", "p_list", "genset", "order_cap", "threshold",
                         "max_trials"]),
    "tail": (_cmd_tail, ["n", "p", "eps", "trials", "u"]),
    "kazhdan": (_cmd_kazhdan, ["group", "gens", "opt", "restarts"]),
    "verify": (_cmd_verify, ["all", "group", "trials", "max_sweep_n"]),
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _inject_config(argv)
        args = build_parser().parse_args(argv)
        handler, config_keys = _HANDLERS[args.command]
        manifest = ResultManifest(
            command=args.command,
            config=_config_echo(args, config_keys),
            results={},
        )
        manifest.timestamp = datetime.now(timezone.utc).isoformat()
        start = time.perf_counter()
        code = handler(args, manifest)
        manifest.duration_s = time.perf_counter() - start
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.format == "csv":
        table = render_csv(args.command, manifest.body())
        sys.stdout.write(table)
        write_manifest(manifest, results_dir=args.results_dir)
        if args.out:
            Path(args.out).parent.mkdir(parents=True, exist_ok=True)
            Path(args.out).write_text(table)
    else:
        path = write_manifest(manifest, results_dir=args.results_dir, out=args.out)
        print(f"manifest: {path}")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
