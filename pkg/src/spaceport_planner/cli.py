"""Command-line pipeline: validate -> forecast -> cluster -> scan -> plan
-> sweep -> report.

Exit codes: 0 success, 1 domain error (invalid data or infeasible model),
2 usage error.  All randomized steps take their seeds from the config (or
the --seed override) and print the effective value.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .forecast import HoltParams, demand_total
from .hazard import FeasibleAzimuthSet, HazardConfig, scan_feasible_azimuths
from .ingest import (
    IngestError,
    annual_launch_series,
    load_counties,
    load_flight_tracks,
    load_launch_history,
    load_population_grid,
)
from .missions import kmeans, mission_types_from_clusters, silhouette_score
from .model import (
    ModelInfeasibleError,
    ScenarioWeights,
    build_cost_bundle,
    build_model,
    check_solution,
)
from .mps import export_mps
from .scenario import (
    Configuration,
    ScanCache,
    SweepInputs,
    full_grid,
    run_sweep,
    write_report,
)
from .solve import enumerate_oracle, solve

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class _Pipeline:
    """Lazily loaded datasets and derived artifacts for one config."""

    def __init__(self, cfg: RunConfig, seed: int | None, jobs: int):
        self.cfg = cfg
        self.seed = seed if seed is not None else cfg.cluster.seed
        self.jobs = max(1, jobs)
        self.counties = load_counties(cfg.resolve("counties"))
        self.cells, self.bounds = load_population_grid(cfg.resolve("popgrid"))
        self.launches = load_launch_history(cfg.resolve("launches"))

    def tracks(self, tag: str):
        return load_flight_tracks(self.cfg.resolve(f"flights_{tag}"))

    def total_demand(self) -> int:
        f = self.cfg.forecast
        series = annual_launch_series(self.launches)
        return demand_total(
            series or None, HoltParams(f.alpha, f.beta), f.target_year, f.default_total
        )

    def missions(self):
        points = np.array(
            [[r.semi_major_axis_km, r.inclination_deg] for r in self.launches]
        )
        model = kmeans(
            points, self.cfg.cluster.m, self.seed, self.cfg.cluster.standardize
        )
        return mission_types_from_clusters(model, self.total_demand())

    def feasible_sets(self, hazard_cfg: HazardConfig) -> dict[str, FeasibleAzimuthSet]:
        with ThreadPoolExecutor(max_workers=self.jobs) as pool:
            scans = pool.map(
                lambda c: scan_feasible_azimuths(c, self.cells, self.bounds, hazard_cfg),
                self.counties,
            )
        return {s.fips: s for s in scans}

    def region_map(self) -> dict[str, str]:
        path = self.cfg.resolve("regions")
        mapping: dict[str, str] = {}
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["fips", "region"]:
                raise IngestError(f"{path}: expected header fips,region, got {header}")
            for row in reader:
                if row:
                    mapping[row[0]] = row[1]
        return mapping

    def build(self, traffic: str = "low"):
        """Feasibility scan + cost bundle + model for the configured hazard size."""
        hazard_cfg = self.cfg.hazard
        sets = self.feasible_sets(hazard_cfg)
        live = [c for c in self.counties if not sets[c.fips].empty]
        if not live:
            raise ModelInfeasibleError("no county has a feasible launch azimuth")
        missions = self.missions()
        bundle = build_cost_bundle(
            live,
            missions,
            sets,
            self.tracks(traffic),
            self.bounds,
            hazard_cfg,
            self.cfg.reroute,
            self.cells,
            self.cfg.earth,
        )
        model = build_model(
            bundle,
            missions,
            weights=ScenarioWeights(),
            counties=live,
            capacity=self.cfg.plan.capacity_per_year,
            min_separation_miles=self.cfg.plan.min_separation_miles,
            use_conflict_reformulation=self.cfg.plan.use_conflict_reformulation,
            big_m=self.cfg.plan.big_m,
        )
        return missions, model


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_validate(args, cfg: RunConfig) -> int:
    ok = True
    loaders = [
        ("counties", lambda p: len(load_counties(p)), True),
        ("popgrid", lambda p: len(load_population_grid(p)[0]), True),
        ("launches", lambda p: len(load_launch_history(p)), True),
        ("flights_low", lambda p: len(load_flight_tracks(p)), False),
        ("flights_high", lambda p: len(load_flight_tracks(p)), False),
    ]
    for name, loader, required in loaders:
        path = cfg.resolve(name)
        try:
            count = loader(path)
            print(f"{name}: {count} rows ({path})")
            if count == 0 and not required:
                print(f"{name}: warning, file is empty")
        except FileNotFoundError:
            if required:
                print(f"{name}: MISSING ({path})")
                ok = False
            else:
                print(f"{name}: warning, missing optional file ({path})")
        except IngestError as exc:
            print(f"{name}: INVALID: {exc}")
            ok = False
    return EXIT_OK if ok else EXIT_DOMAIN


def cmd_forecast(args, cfg: RunConfig) -> int:
    pipe = _Pipeline(cfg, args.seed, args.jobs)
    series = annual_launch_series(pipe.launches)
    total = pipe.total_demand()
    print(f"series: {len(series)} years ({series[0][0]}-{series[-1][0]})" if series else "series: empty")
    print(f"forecast total demand for {cfg.forecast.target_year}: {total}")
    return EXIT_OK


def cmd_cluster(args, cfg: RunConfig) -> int:
    pipe = _Pipeline(cfg, args.seed, args.jobs)
    print(f"effective seed: {pipe.seed}")
    points = np.array([[r.semi_major_axis_km, r.inclination_deg] for r in pipe.launches])
    for m in range(2, cfg.cluster.m + 1):
        model = kmeans(points, m, pipe.seed, cfg.cluster.standardize)
        print(f"m={m}: silhouette {silhouette_score(points, model):.4f}")
    missions = pipe.missions()
    print("type  sma_km   inc_deg  weight  demand")
    for mt in missions:
        print(
            f"{mt.index + 1:>4}  {mt.orbit_radius_km:8.2f} {mt.inclination_deg:8.2f}"
            f"  {100 * mt.weight:5.1f}%  {mt.demand:6d}"
        )
    return EXIT_OK


def cmd_scan(args, cfg: RunConfig) -> int:
    pipe = _Pipeline(cfg, args.seed, args.jobs)
    sets = pipe.feasible_sets(cfg.hazard)
    out = _out_dir(args)
    doc = {fips: list(s.azimuths) for fips, s in sorted(sets.items())}
    (out / "feasible_azimuths.json").write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    nonempty = sum(1 for s in sets.values() if not s.empty)
    print(f"{nonempty}/{len(sets)} counties have feasible azimuths (buffer {cfg.hazard.buffer_deg} deg)")
    print(f"wrote {out / 'feasible_azimuths.json'}")
    return EXIT_OK


def cmd_plan(args, cfg: RunConfig) -> int:
    pipe = _Pipeline(cfg, args.seed, args.jobs)
    missions, model = pipe.build()
    solution = solve(model, node_limit=cfg.plan.node_limit)
    violations = check_solution(model, solution.selected_idx, solution.allocation)
    if violations:
        print("plan failed post-hoc validation:")
        for v in violations:
            print(f"  {v}")
        return EXIT_DOMAIN
    if args.oracle:
        oracle = enumerate_oracle(model)
        gap = abs(oracle.objective - solution.objective)
        print(f"oracle objective {oracle.objective:.9f} (|gap| {gap:.2e})")
        if gap > 1e-6:
            print("plan does NOT match the enumeration oracle")
            return EXIT_DOMAIN
    out = _out_dir(args)
    (out / "plan.json").write_text(
        json.dumps(solution.to_dict(), sort_keys=True, indent=2) + "\n"
    )
    print(f"objective {solution.objective:.6f} with sites: {', '.join(solution.selected_fips)}")
    print(f"wrote {out / 'plan.json'}")
    return EXIT_OK


def cmd_sweep(args, cfg: RunConfig) -> int:
    pipe = _Pipeline(cfg, args.seed, args.jobs)
    inputs = SweepInputs(
        counties=pipe.counties,
        cells=pipe.cells,
        bounds=pipe.bounds,
        tracks={tag: pipe.tracks(tag) for tag in ("low", "high")},
        missions=pipe.missions(),
        region_map=pipe.region_map(),
    )
    report = run_sweep(
        inputs,
        full_grid(),
        base_hazard=cfg.hazard,
        base_reroute=cfg.reroute,
        capacity=cfg.plan.capacity_per_year,
        min_separation_miles=cfg.plan.min_separation_miles,
        use_conflict_reformulation=cfg.plan.use_conflict_reformulation,
        consts=cfg.earth,
        cache=ScanCache(),
    )
    out = _out_dir(args)
    write_report(report, out)
    solved = sum(1 for r in report.rows if r.solution is not None)
    print(f"{solved}/{len(report.rows)} configurations solved; report in {out}")
    return EXIT_OK


def cmd_export_mps(args, cfg: RunConfig) -> int:
    pipe = _Pipeline(cfg, args.seed, args.jobs)
    _, model = pipe.build()
    out = _out_dir(args)
    (out / "model.mps").write_text(export_mps(model))
    print(f"wrote {out / 'model.mps'} ({model.n_vars} variables, {len(model.b_ub) + 1} rows)")
    return EXIT_OK


def cmd_report(args, cfg: RunConfig) -> int:
    """Render a previously written sweep directory as a table."""
    out = Path(args.out)
    csv_path = out / "sweep.csv"
    if not csv_path.exists():
        print(f"no sweep.csv under {out}; run `sweep` first")
        return EXIT_DOMAIN
    print(csv_path.read_text().rstrip())
    return EXIT_OK


_COMMANDS = {
    "validate": cmd_validate,
    "forecast": cmd_forecast,
    "cluster": cmd_cluster,
    "scan": cmd_scan,
    "plan": cmd_plan,
    "sweep": cmd_sweep,
    "export-mps": cmd_export_mps,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spaceport-planner",
        description="Spaceport site selection and mission allocation pipeline",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", default="config.toml", help="TOML config file")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--jobs", type=int, default=1, help="parallel hazard scans")
    parser.add_argument("--seed", type=int, default=None, help="override cluster seed")
    parser.add_argument(
        "--oracle",
        action="store_true",
        help="cross-check the plan against exhaustive enumeration (small instances)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sub.add_parser(name)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except FileNotFoundError:
        print(f"config file not found: {args.config}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args, cfg)
    except (IngestError, ModelInfeasibleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
