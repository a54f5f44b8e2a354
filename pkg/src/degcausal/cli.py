"""Command-line entry point: ``degcausal <command> --config run.json --out DIR``.

Every run writes ``manifest.json`` (resolved config, seed, versions, status)
plus ``data/``, ``graphs/`` and ``metrics/`` under the output directory.  A
failed run leaves ``error.json`` next to a manifest marked ``failed``.
"""
from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
from importlib import metadata
from pathlib import Path

from . import __version__
from .config import KINDS, RunConfig, parse_config
from .dataset import DegradationDataset
from .discovery import METHODS, discover
from .errors import ConfigError, DegCausalError
from .evaluation import (derive_seed, run_benchmark, run_sweep, write_emr_csv, write_errors_csv,
                         write_results_csv, write_tallies_csv)
from .graph import CausalGraph, graphs_equal, skeleton_of
from .ingest import bootstrap_units, edge_frequencies, extract_last_window, majority_vote, parse_cmapss
from .presets import filter_components, filter_truth
from .simulate import FilterComponentSpec, center_frequency, peak_gain, simulate_filter_case, simulate_system
from .strategy import STRATEGIES, build_matrix

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_MISSING = 0, 1, 2, 3


def _versions() -> dict:
    out = {"degcausal": __version__, "python": platform.python_version()}
    for dist in ("numpy", "scipy", "scikit-learn", "pydantic"):
        try:
            out[dist] = metadata.version(dist)
        except metadata.PackageNotFoundError:
            out[dist] = None
    return out


class _Run:
    def __init__(self, cfg: RunConfig, out: Path, jobs: int):
        self.cfg, self.out, self.jobs = cfg, out, jobs
        self.artifacts: list[str] = []
        for sub in ("data", "graphs", "metrics"):
            (out / sub).mkdir(parents=True, exist_ok=True)

    def path(self, rel: str) -> Path:
        self.artifacts.append(rel)
        return self.out / rel

    def graph(self, rel: str, g: CausalGraph) -> None:
        g.to_json(self.path(rel))

    def manifest(self, status: str) -> None:
        config = {k: v for k, v in self.cfg.to_dict().items() if k != "jobs"}
        doc = {"kind": self.cfg.kind, "seed": self.cfg.seed, "status": status, "config": config,
               "versions": _versions(), "artifacts": sorted(set(self.artifacts))}
        (self.out / "manifest.json").write_text(json.dumps(doc, indent=2) + "\n")


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _method_seed(seed: int, *coords) -> int:
    return derive_seed(seed, *coords)


# -- pipelines ------------------------------------------------------------------

def _simulate(run: _Run) -> int:
    cfg = run.cfg
    spec = cfg.system_spec()
    d = simulate_system(spec, cfg.n, cfg.seed)
    d.to_csv(run.path("data/dataset.csv"))
    run.path("data/system.json").write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
    for s in cfg.strategies:
        rel = f"data/matrix_{s}.csv"
        build_matrix(d, s).to_csv(run.path(rel))
        run.artifacts.append(rel + ".json")
    run.graph("graphs/truth.json", cfg.truth_graph())
    return EXIT_OK


def _discover(run: _Run) -> int:
    cfg = run.cfg
    if cfg.data:
        d = DegradationDataset.from_csv(cfg.data)
    else:
        d = simulate_system(cfg.system_spec(), cfg.n, cfg.seed)
        d.to_csv(run.path("data/dataset.csv"))
    truth = cfg.truth_graph()
    if truth is not None:
        if truth.labels != d.labels:
            raise ConfigError(f"truth graph labels {truth.labels} differ from data labels {d.labels}")
        run.graph("graphs/truth.json", truth)
    mcfg = cfg.method_config()
    rows, failures = [], []
    for method in cfg.methods:
        for s in cfg.strategies:
            seed = _method_seed(cfg.seed, METHODS.index(method), STRATEGIES.index(s))
            try:
                g = discover(method, d, mcfg, seed=seed, strategy=s)
            except DegCausalError as exc:
                failures.append({"method": method, "strategy": s, "error_type": type(exc).__name__,
                                 "message": str(exc)})
                rows.append([method, s, "", "", f"{type(exc).__name__}: {exc}"])
                continue
            run.graph(f"graphs/{method}_{s}.json", g)
            match = "" if truth is None else int(graphs_equal(g, truth))
            rows.append([method, s, len(g.skeleton_edges()), match, ""])
    _write_rows(run.path("metrics/discover.csv"), ["method", "strategy", "adjacencies", "match", "error"], rows)
    if failures:
        raise _MethodFailures(failures)
    return EXIT_OK


class _MethodFailures(Exception):
    def __init__(self, failures):
        super().__init__(f"{len(failures)} method run(s) failed")
        self.failures = failures


def _benchmark_outputs(run: _Run, result, factor: str) -> None:
    write_results_csv(result.cells, run.path("metrics/results.csv"), run.cfg.timings)
    write_emr_csv(result, run.path("metrics/emr.csv"), factor)
    write_tallies_csv(result, run.path("metrics/tallies.csv"), factor)
    write_errors_csv(result.cells, run.path("metrics/errors.csv"))


def _benchmark(run: _Run) -> int:
    cfg = run.cfg
    spec = cfg.system_spec()
    run.path("data/system.json").write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
    truth = cfg.truth_graph()
    run.graph("graphs/truth.json", truth)
    result = run_benchmark(spec, truth, cfg.methods, cfg.strategies, cfg.n_range, cfg.N, cfg.seed,
                           cfg.method_config(), run.jobs)
    _benchmark_outputs(run, result, "")
    return EXIT_OK


def _sweep(run: _Run) -> int:
    cfg = run.cfg
    scfg = cfg.sweep_config()
    run.path("data/system.json").write_text(json.dumps(scfg.base.to_dict(), indent=2) + "\n")
    run.graph("graphs/truth.json", cfg.truth_graph())
    result = run_sweep(scfg, cfg.seed, cfg.method_config(), run.jobs)
    _benchmark_outputs(run, result, scfg.factor)
    return EXIT_OK


def _filter_case(run: _Run) -> int:
    cfg = run.cfg
    fs = cfg.filter
    comps = filter_components()
    spec = FilterComponentSpec(comps, fs.n_units, fs.interval, fs.horizon, fs.performance_from)
    truth = filter_truth()
    run.graph("graphs/truth.json", truth)
    nominal = [p.mu_x0 for p in comps]
    r1, r2, r3, c1, c2 = nominal
    run.path("metrics/nominal.json").write_text(json.dumps(
        {"f0_hz": float(center_frequency(r1, r2, r3, c1, c2)), "gain_db": float(peak_gain(r1, r3, c1, c2))},
        indent=2) + "\n")
    mcfg = cfg.method_config()
    skel = skeleton_of(truth)
    rows = []
    for r in range(fs.replications):
        d = simulate_filter_case(spec, derive_seed(cfg.seed, r))
        d.to_csv(run.path(f"data/filter_r{r}.csv"))
        for method in cfg.methods:
            for s in cfg.strategies:
                seed = _method_seed(cfg.seed, r, METHODS.index(method), STRATEGIES.index(s))
                try:
                    g = discover(method, d, mcfg, seed=seed, strategy=s)
                except DegCausalError as exc:
                    rows.append([r, method, s, 0, 0, f"{type(exc).__name__}: {exc}"])
                    continue
                run.graph(f"graphs/{method}_{s}_r{r}.json", g)
                rows.append([r, method, s, int(skeleton_of(g) == skel), int(graphs_equal(g, truth)), ""])
    _write_rows(run.path("metrics/filter.csv"),
                ["replication", "method", "strategy", "skeleton_match", "exact_match", "error"], rows)
    summary = []
    for method in cfg.methods:
        for s in cfg.strategies:
            sel = [row for row in rows if row[1] == method and row[2] == s]
            summary.append([method, s, len(sel), sum(row[3] for row in sel), sum(row[4] for row in sel)])
    _write_rows(run.path("metrics/filter_summary.csv"),
                ["method", "strategy", "replications", "skeleton_matches", "exact_matches"], summary)
    return EXIT_OK


def _cmapss(run: _Run) -> int:
    cfg = run.cfg
    cm = cfg.cmapss
    d = parse_cmapss(cm.path, cm.constancy_rtol)
    window = extract_last_window(d, cm.window)
    reps = bootstrap_units(window, cm.fraction, cm.repeats, cfg.seed)
    mcfg = cfg.method_config()
    summary = {"units": d.n, "window": cm.window, "replicates": len(reps), "adjacencies": {}}
    majority = {}
    for method in cfg.methods:
        for s in cfg.strategies:
            graphs = []
            for b, rep in enumerate(reps):
                seed = _method_seed(cfg.seed, b, METHODS.index(method), STRATEGIES.index(s))
                g = discover(method, rep, mcfg, seed=seed, strategy=s)
                run.graph(f"graphs/{method}_{s}_b{b}.json", g)
                graphs.append(g)
            maj = majority_vote(graphs, cm.vote_share)
            majority[(method, s)] = maj
            run.graph(f"graphs/{method}_{s}_majority.json", maj)
            freq = edge_frequencies(graphs)
            _write_rows(run.path(f"metrics/edge_frequency_{method}_{s}.csv"), ["from", *d.labels],
                        [[lab, *(repr(float(v)) for v in row)] for lab, row in zip(d.labels, freq)])
            summary["adjacencies"][f"{method}/{s}"] = len(maj.skeleton_edges())
    for s in cfg.strategies:
        if ("ges", s) in majority and ("stable-pc", s) in majority:
            ges_edges = majority[("ges", s)].skeleton_edges()
            pc_edges = majority[("stable-pc", s)].skeleton_edges()
            summary[f"ges_within_stable_pc/{s}"] = ges_edges <= pc_edges
    run.path("metrics/cmapss_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


_PIPELINES = {
    "simulate": _simulate,
    "discover": _discover,
    "benchmark": _benchmark,
    "sweep": _sweep,
    "filter-case": _filter_case,
    "cmapss": _cmapss,
}


def _error_report(exc: BaseException, kind: str | None) -> tuple[int, dict]:
    if isinstance(exc, _MethodFailures):
        return EXIT_FAILED, {"status": "failed", "kind": kind, "error_type": "MethodFailure",
                             "message": str(exc), "failures": exc.failures}
    if isinstance(exc, ConfigError):
        code = EXIT_CONFIG
    elif isinstance(exc, FileNotFoundError):
        code = EXIT_MISSING
    else:
        code = EXIT_FAILED
    return code, {"status": "failed", "kind": kind, "error_type": type(exc).__name__, "message": str(exc)}


def run_command(cfg: RunConfig, out: str | Path, jobs: int | None = None) -> int:
    """Execute one validated run; returns the process exit status."""
    out = Path(out)
    run = _Run(cfg, out, jobs or cfg.jobs)
    run.manifest("running")
    try:
        status = _PIPELINES[cfg.kind](run)
    except Exception as exc:  # reported as error.json, never a traceback
        code, report = _error_report(exc, cfg.kind)
        (out / "error.json").write_text(json.dumps(report, indent=2) + "\n")
        run.manifest("failed")
        print(json.dumps(report), file=sys.stderr)
        return code
    run.manifest("complete")
    return status


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="degcausal", description="Causal discovery between degradation paths.")
    sub = p.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run a {kind} experiment")
        sp.add_argument("--config", type=Path, help="JSON run configuration")
        sp.add_argument("--out", type=Path, required=True, help="output directory")
        sp.add_argument("--seed", type=int, help="overrides the config seed")
        sp.add_argument("--jobs", type=int, help="worker processes (does not change results)")
    rp = sub.add_parser("rerun", help="repeat a run from its manifest.json")
    rp.add_argument("manifest", type=Path)
    rp.add_argument("--out", type=Path, required=True)
    rp.add_argument("--jobs", type=int)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    kind = None if args.command == "rerun" else args.command
    try:
        if args.command == "rerun":
            manifest = json.loads(Path(args.manifest).read_text())
            cfg = parse_config(manifest["config"])
            kind = cfg.kind
        else:
            if args.config is not None:
                obj = json.loads(args.config.read_text()) if args.config.exists() else None
                if obj is None:
                    raise FileNotFoundError(f"config file not found: {args.config}")
            else:
                obj = {}
            if args.seed is not None:
                obj["seed"] = args.seed
            cfg = parse_config(obj, kind)
        if args.jobs is not None and args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
    except (ConfigError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        if isinstance(exc, (json.JSONDecodeError, KeyError)):
            exc = ConfigError(f"unreadable config: {exc}")
        code, report = _error_report(exc, kind)
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "error.json").write_text(json.dumps(report, indent=2) + "\n")
        print(json.dumps(report), file=sys.stderr)
        return code
    return run_command(cfg, args.out, args.jobs)


if __name__ == "__main__":
    sys.exit(main())
