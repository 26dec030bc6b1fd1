"""Cost assembly and mixed-integer model construction for site selection.

Decision variables: x_i (open a spaceport in county i, binary), y_{i,j}
(launches of mission type j allocated to county i, integer), and, in the
big-M formulation, z_{i,i'} (pair separation indicators, binary, one per
unordered pair).  The four cost families (transport, operation, launch
delta-v, rerouting) are min-max normalized independently before weighting,
since they carry incommensurable units.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .astro import EarthConstants, EARTH, cheapest_azimuth
from .geo import KM_PER_MILE, great_circle_distance
from .hazard import (
    ExposureReport,
    FeasibleAzimuthSet,
    HazardConfig,
    RerouteConfig,
    reroute_cost,
    select_azimuth,
)
from .ingest import CountyRecord, FlightTrack, PopulationCell, PopulationGridBounds
from .missions import MissionType

__all__ = [
    "ModelInfeasibleError",
    "CostMatrixBundle",
    "ScenarioWeights",
    "SpflpModel",
    "required_site_count",
    "build_cost_bundle",
    "build_model",
    "check_solution",
]

DEFAULT_CAPACITY_PER_YEAR = 52
DEFAULT_MIN_SEPARATION_MILES = 300.0
INFEASIBLE_PAIR_PENALTY = 1.0


class ModelInfeasibleError(Exception):
    """The instance cannot be feasible; message names the violated row class."""


@dataclass(frozen=True)
class ScenarioWeights:
    w_transport: float = 1.0
    w_operation: float = 1.0
    w_launch: float = 1.0
    w_reroute: float = 1.0

    def __post_init__(self) -> None:
        if min(self.w_transport, self.w_operation, self.w_launch, self.w_reroute) <= 0:
            raise ValueError("weights must all be positive")


def _minmax(values: np.ndarray, mask: np.ndarray | None = None) -> tuple[np.ndarray, float, float]:
    """Normalize to [0, 1]; a constant family collapses to zeros."""
    if mask is None:
        mask = np.ones(values.shape, dtype=bool)
    pool = values[mask]
    lo, hi = float(pool.min()), float(pool.max())
    if hi == lo:
        return np.zeros_like(values, dtype=float), lo, hi
    return (values - lo) / (hi - lo), lo, hi


@dataclass(frozen=True)
class CostMatrixBundle:
    """Raw and normalized cost families for one instance.

    Infeasible (county, mission) pairs carry a sentinel normalized cost of
    1 + INFEASIBLE_PAIR_PENALTY and get a hard y upper bound of zero.
    """

    fips: tuple[str, ...]
    transport_raw: np.ndarray  # (n,) minutes
    operation_raw: np.ndarray  # (n,) USD
    launch_raw: np.ndarray  # (n, m) km/s
    reroute_raw: np.ndarray  # (n, m) USD per launch
    feasible_pair: np.ndarray  # (n, m) bool
    transport_norm: np.ndarray = field(init=False)
    operation_norm: np.ndarray = field(init=False)
    launch_norm: np.ndarray = field(init=False)
    reroute_norm: np.ndarray = field(init=False)
    norm_ranges: dict = field(init=False)
    chosen_azimuth: np.ndarray | None = None  # (n, m) degrees
    exposure: tuple[ExposureReport, ...] = ()

    def __post_init__(self) -> None:
        if not self.feasible_pair.any(axis=1).all():
            bad = [f for f, ok in zip(self.fips, self.feasible_pair.any(axis=1)) if not ok]
            raise ValueError(f"counties admit no mission at all: {bad}")
        t, t_lo, t_hi = _minmax(self.transport_raw)
        o, o_lo, o_hi = _minmax(self.operation_raw)
        l, l_lo, l_hi = _minmax(self.launch_raw, self.feasible_pair)
        r, r_lo, r_hi = _minmax(self.reroute_raw, self.feasible_pair)
        sentinel = 1.0 + INFEASIBLE_PAIR_PENALTY
        l = np.where(self.feasible_pair, l, sentinel)
        r = np.where(self.feasible_pair, r, sentinel)
        object.__setattr__(self, "transport_norm", t)
        object.__setattr__(self, "operation_norm", o)
        object.__setattr__(self, "launch_norm", l)
        object.__setattr__(self, "reroute_norm", r)
        object.__setattr__(
            self,
            "norm_ranges",
            {
                "transport": (t_lo, t_hi),
                "operation": (o_lo, o_hi),
                "launch": (l_lo, l_hi),
                "reroute": (r_lo, r_hi),
            },
        )

    @property
    def n(self) -> int:
        return len(self.fips)

    @property
    def m(self) -> int:
        return self.launch_raw.shape[1]

    def site_cost(self, weights: ScenarioWeights) -> np.ndarray:
        return weights.w_transport * self.transport_norm + weights.w_operation * self.operation_norm

    def allocation_cost(self, weights: ScenarioWeights) -> np.ndarray:
        return weights.w_launch * self.launch_norm + weights.w_reroute * self.reroute_norm


def required_site_count(demands: list[int], capacity: int) -> int:
    """Number of sites needed: ceil(total demand / per-site capacity)."""
    if capacity <= 0:
        raise ValueError(f"capacity must be positive: {capacity}")
    return math.ceil(sum(demands) / capacity)


def build_cost_bundle(
    counties: list[CountyRecord],
    missions: list[MissionType],
    feasible_sets: dict[str, FeasibleAzimuthSet],
    tracks: list[FlightTrack],
    bounds: PopulationGridBounds,
    hazard_cfg: HazardConfig,
    reroute_cfg: RerouteConfig,
    cells: list[PopulationCell] | None = None,
    consts: EarthConstants = EARTH,
) -> CostMatrixBundle:
    """Assemble the four cost families for counties with feasible azimuths.

    The azimuth used for both the launch and rerouting cost of a pair is the
    one chosen by `hazard.select_azimuth` (minimum delta-v by default).
    """
    for c in counties:
        if feasible_sets[c.fips].empty:
            raise ValueError(f"county {c.fips} has an empty feasible azimuth set")
    n, m = len(counties), len(missions)
    launch = np.zeros((n, m))
    reroute = np.zeros((n, m))
    azimuths = np.zeros((n, m))
    exposure: list[ExposureReport] = []
    for i, county in enumerate(counties):
        feas = feasible_sets[county.fips]
        reports: dict[float, ExposureReport] = {}  # azimuths shared by missions
        for j, mission in enumerate(missions):
            psi = select_azimuth(
                county, mission, feas, reroute_cfg, tracks, bounds, hazard_cfg, consts
            )
            azimuths[i, j] = psi
            _, res = cheapest_azimuth(
                county.centroid.lat, [psi], mission.orbit_radius_km, mission.inclination_deg, consts
            )
            launch[i, j] = res.total
            if psi not in reports:
                reports[psi] = reroute_cost(
                    county, mission, psi, feas, tracks, bounds, hazard_cfg, reroute_cfg, cells
                )
            reroute[i, j] = reports[psi].reroute_cost_per_launch_usd
            exposure.append(reports[psi])
    return CostMatrixBundle(
        fips=tuple(c.fips for c in counties),
        transport_raw=np.array([c.mean_commute_minutes for c in counties], float),
        operation_raw=np.array([c.median_house_value_usd for c in counties], float),
        launch_raw=launch,
        reroute_raw=reroute,
        feasible_pair=np.ones((n, m), dtype=bool),
        chosen_azimuth=azimuths,
        exposure=tuple(exposure),
    )


@dataclass
class SpflpModel:
    """Dense LP/MILP arrays plus index maps; rows follow the formulation order.

    Inequality rows are A_ub @ v <= b_ub; the single cardinality row is the
    equality block.  `row_labels` names each inequality row for diagnostics
    and export.
    """

    bundle: CostMatrixBundle
    demands: np.ndarray  # (m,)
    capacity: int
    site_count: int
    min_separation_miles: float
    dist_miles: np.ndarray  # (n, n)
    weights: ScenarioWeights
    use_conflict_reformulation: bool
    big_m: float
    pairs: list[tuple[int, int]]
    c: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    row_labels: list[str]
    var_names: list[str]

    @property
    def n(self) -> int:
        return self.bundle.n

    @property
    def m(self) -> int:
        return self.bundle.m

    @property
    def n_vars(self) -> int:
        return len(self.c)

    def x_index(self, i: int) -> int:
        return i

    def y_index(self, i: int, j: int) -> int:
        return self.n + i * self.m + j

    def z_index(self, pair: int) -> int:
        return self.n + self.n * self.m + pair


def build_model(
    bundle: CostMatrixBundle,
    missions: list[MissionType],
    weights: ScenarioWeights,
    counties: list[CountyRecord],
    capacity: int = DEFAULT_CAPACITY_PER_YEAR,
    site_count: int | None = None,
    min_separation_miles: float = DEFAULT_MIN_SEPARATION_MILES,
    use_conflict_reformulation: bool = False,
    big_m: float | None = None,
) -> SpflpModel:
    """Emit the full model: cardinality, demand, capacity, coupling, and
    pairwise-separation rows, with the weighted normalized objective."""
    n, m = bundle.n, bundle.m
    if len(counties) != n or [c.fips for c in counties] != list(bundle.fips):
        raise ValueError("counties do not match the cost bundle")
    demands = np.array([mt.demand for mt in missions], dtype=int)
    K = required_site_count(list(demands), capacity) if site_count is None else site_count
    if K * capacity < demands.sum():
        raise ModelInfeasibleError(
            f"demand rows: total demand {demands.sum()} exceeds K*P = {K * capacity}"
        )
    if K > n:
        raise ModelInfeasibleError(f"cardinality row: K={K} sites but only {n} candidates")

    dist = np.zeros((n, n))
    for i, a in enumerate(counties):
        for k, b in enumerate(counties):
            if k > i:
                d = great_circle_distance(a.centroid, b.centroid) / KM_PER_MILE
                dist[i, k] = dist[k, i] = d
    pairs = list(itertools.combinations(range(n), 2))
    if big_m is None:
        big_m = 1.0 + float(dist.max())

    n_z = 0 if use_conflict_reformulation else len(pairs)
    n_vars = n + n * m + n_z

    def xi(i: int) -> int:
        return i

    def yi(i: int, j: int) -> int:
        return n + i * m + j

    def zi(p: int) -> int:
        return n + n * m + p

    var_names = [f"x_{f}" for f in bundle.fips]
    var_names += [f"y_{f}_{j + 1}" for f in bundle.fips for j in range(m)]
    if not use_conflict_reformulation:
        var_names += [f"z_{bundle.fips[i]}_{bundle.fips[k]}" for i, k in pairs]

    c = np.zeros(n_vars)
    c[:n] = bundle.site_cost(weights)
    alloc = bundle.allocation_cost(weights)
    for i in range(n):
        for j in range(m):
            c[yi(i, j)] = alloc[i, j]

    a_eq = np.zeros((1, n_vars))
    a_eq[0, :n] = 1.0
    b_eq = np.array([float(K)])

    rows: list[np.ndarray] = []
    rhs: list[float] = []
    labels: list[str] = []

    def add_row(label: str, coeffs: dict[int, float], bound: float) -> None:
        row = np.zeros(n_vars)
        for idx, v in coeffs.items():
            row[idx] = v
        rows.append(row)
        rhs.append(bound)
        labels.append(label)

    for j in range(m):  # demand: sum_i y_ij >= k_j
        add_row(f"DEM_{j + 1}", {yi(i, j): -1.0 for i in range(n)}, -float(demands[j]))
    for i in range(n):  # capacity: sum_j y_ij <= P
        add_row(f"CAP_{bundle.fips[i]}", {yi(i, j): 1.0 for j in range(m)}, float(capacity))
    for i in range(n):  # coupling (a): (1/KP) sum_j y_ij <= x_i
        coeffs = {yi(i, j): 1.0 / (K * capacity) for j in range(m)}
        coeffs[xi(i)] = -1.0
        add_row(f"CPA_{bundle.fips[i]}", coeffs, 0.0)
    for i in range(n):  # coupling (b): x_i <= sum_j y_ij
        coeffs = {yi(i, j): -1.0 for j in range(m)}
        coeffs[xi(i)] = 1.0
        add_row(f"CPB_{bundle.fips[i]}", coeffs, 0.0)

    D = min_separation_miles
    if use_conflict_reformulation:
        for p, (i, k) in enumerate(pairs):
            if dist[i, k] < D:
                add_row(
                    f"CFL_{bundle.fips[i]}_{bundle.fips[k]}",
                    {xi(i): 1.0, xi(k): 1.0},
                    1.0,
                )
    else:
        for p, (i, k) in enumerate(pairs):
            d = dist[i, k]
            tag = f"{bundle.fips[i]}_{bundle.fips[k]}"
            # (a) D - M(1 - z) <= d   ->   M z <= d - D + M
            add_row(f"SPA_{tag}", {zi(p): big_m}, d - D + big_m)
            # (b) d - M z <= D        ->  -M z <= D - d
            add_row(f"SPB_{tag}", {zi(p): -big_m}, D - d)
            # (c) x_i + x_k <= 1 + z
            add_row(f"SPC_{tag}", {xi(i): 1.0, xi(k): 1.0, zi(p): -1.0}, 1.0)

    lower = np.zeros(n_vars)
    upper = np.ones(n_vars)
    for i in range(n):
        for j in range(m):
            upper[yi(i, j)] = float(capacity) if bundle.feasible_pair[i, j] else 0.0

    return SpflpModel(
        bundle=bundle,
        demands=demands,
        capacity=capacity,
        site_count=K,
        min_separation_miles=D,
        dist_miles=dist,
        weights=weights,
        use_conflict_reformulation=use_conflict_reformulation,
        big_m=big_m,
        pairs=pairs,
        c=c,
        a_ub=np.vstack(rows) if rows else np.zeros((0, n_vars)),
        b_ub=np.array(rhs),
        a_eq=a_eq,
        b_eq=b_eq,
        lower=lower,
        upper=upper,
        row_labels=labels,
        var_names=var_names,
    )


def check_solution(
    model: SpflpModel,
    selected: list[int],
    allocation: np.ndarray,
) -> list[str]:
    """Post-hoc invariant check against the raw data, independent of the rows.

    Returns a list of human-readable violations (empty when the plan is valid).
    """
    violations: list[str] = []
    n, m = model.n, model.m
    sel = set(selected)
    if len(sel) != model.site_count:
        violations.append(f"cardinality: {len(sel)} sites selected, expected {model.site_count}")
    for j in range(m):
        got = int(allocation[:, j].sum())
        if got < model.demands[j]:
            violations.append(f"demand: mission {j + 1} allocated {got} < {model.demands[j]}")
    for i in range(n):
        total = int(allocation[i].sum())
        if total > model.capacity:
            violations.append(f"capacity: county {model.bundle.fips[i]} allocated {total} > {model.capacity}")
        if i in sel and total < 1:
            violations.append(f"coupling: selected county {model.bundle.fips[i]} got no missions")
        if i not in sel and total > 0:
            violations.append(f"coupling: unselected county {model.bundle.fips[i]} got {total} missions")
        for j in range(m):
            if allocation[i, j] > 0 and not model.bundle.feasible_pair[i, j]:
                violations.append(
                    f"feasibility: county {model.bundle.fips[i]} cannot serve mission {j + 1}"
                )
    for i in sorted(sel):
        for k in sorted(sel):
            if k > i and model.dist_miles[i, k] < model.min_separation_miles:
                violations.append(
                    f"separation: {model.bundle.fips[i]} and {model.bundle.fips[k]} are "
                    f"{model.dist_miles[i, k]:.1f} mi apart (< {model.min_separation_miles})"
                )
    return violations
