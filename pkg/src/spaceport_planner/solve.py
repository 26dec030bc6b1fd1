"""Exact solution of the site-selection MILP.

Branch-and-bound with best-bound node selection over LP relaxations
(solved by HiGHS through scipy), branching on the most fractional site
variable first.  For a fixed set of open sites the mission allocation is a
transportation problem; a min-cost-flow subroutine provides integral warm
starts during the search, the exhaustive oracle for small instances, and
the post-hoc cross-check used by the tests.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .flows import FlowInfeasibleError, MinCostFlowProblem
from .model import ModelInfeasibleError, SpflpModel

__all__ = [
    "PlanSolution",
    "solve",
    "allocation_subproblem",
    "enumerate_oracle",
]

INT_TOL = 1e-6
OBJ_TOL = 1e-9
ORACLE_SUBSET_CAP = 5_000_000


@dataclass
class PlanSolution:
    selected_fips: list[str]
    selected_idx: list[int]
    allocation: np.ndarray  # (n, m) integers
    objective: float
    breakdown: dict[str, dict[str, float]]
    nodes_explored: int = 0
    best_bound: float = float("nan")
    gap: float = 0.0
    proven_optimal: bool = True

    def to_dict(self) -> dict:
        """JSON-ready document (deterministic ordering)."""
        return {
            "selected": self.selected_fips,
            "allocation": {
                fips: [int(v) for v in self.allocation[i]]
                for i, fips in zip(self.selected_idx, self.selected_fips)
            },
            "objective": self.objective,
            "breakdown": self.breakdown,
            "solver": {
                "nodes": self.nodes_explored,
                "bound": self.best_bound,
                "gap": self.gap,
                "proven_optimal": self.proven_optimal,
            },
        }


def _breakdown(model: SpflpModel, x: np.ndarray, y: np.ndarray) -> dict[str, dict[str, float]]:
    b = model.bundle
    w = model.weights
    families = {
        "transport": (w.w_transport, float(x @ b.transport_norm), float(x @ b.transport_raw)),
        "operation": (w.w_operation, float(x @ b.operation_norm), float(x @ b.operation_raw)),
        "launch": (w.w_launch, float((y * b.launch_norm).sum()), float((y * b.launch_raw).sum())),
        "reroute": (w.w_reroute, float((y * b.reroute_norm).sum()), float((y * b.reroute_raw).sum())),
    }
    return {
        name: {"weight": weight, "normalized": norm, "raw": raw}
        for name, (weight, norm, raw) in families.items()
    }


def allocation_subproblem(
    selected: list[int],
    costs: np.ndarray,
    demands: np.ndarray,
    capacity: int,
    feasible_pair: np.ndarray,
) -> np.ndarray:
    """Optimal integral mission allocation for a fixed set of open sites.

    Minimizes sum of costs[i, j] * y[i, j] subject to per-type demand
    (>= k_j), per-site capacity (<= P), and each open site serving at least
    one mission.  Solved as a min-cost circulation with lower bounds;
    integrality comes from the network structure.
    """
    n, m = costs.shape
    selected = sorted(set(selected))
    if not selected:
        raise ValueError("no sites selected")
    for i in selected:
        if not feasible_pair[i].any():
            raise FlowInfeasibleError(f"site index {i} admits no mission type")
    s = len(selected)
    total = int(demands.sum())

    # nodes: types 0..m-1, sites m..m+s-1, then source and sink
    src = m + s
    snk = m + s + 1
    net = MinCostFlowProblem(m + s + 2)
    big = total + s + 1
    type_arcs = [net.add_arc(src, j, int(demands[j]), int(demands[j]) + s, 0.0) for j in range(m)]
    pair_arcs: dict[tuple[int, int], int] = {}
    for k, i in enumerate(selected):
        for j in range(m):
            if feasible_pair[i, j]:
                pair_arcs[(i, j)] = net.add_arc(j, m + k, 0, capacity, float(costs[i, j]))
        net.add_arc(m + k, snk, 1, capacity, 0.0)
    net.add_arc(snk, src, 0, big, 0.0)
    net.solve()

    y = np.zeros((n, m), dtype=int)
    for (i, j), arc in pair_arcs.items():
        y[i, j] = net.arc_flow(arc)
    return y


def _independent_set_at_least(conflicts: np.ndarray, k: int) -> bool:
    """Is there a set of k mutually non-conflicting counties?  Exact search."""
    n = len(conflicts)
    order = np.argsort(conflicts.sum(axis=1))

    def grow(chosen: list[int], start: int) -> bool:
        if len(chosen) >= k:
            return True
        for pos in range(start, n):
            i = order[pos]
            if n - pos < k - len(chosen):
                return False
            if all(not conflicts[i, j] for j in chosen):
                if grow(chosen + [i], pos + 1):
                    return True
        return False

    return grow([], 0)


def _diagnose_infeasibility(model: SpflpModel) -> str:
    if model.site_count * model.capacity < model.demands.sum():
        return "demand rows: total demand exceeds aggregate capacity K*P"
    conflicts = model.dist_miles < model.min_separation_miles
    np.fill_diagonal(conflicts, False)
    if not _independent_set_at_least(conflicts, model.site_count):
        return (
            "dispersal rows: no set of "
            f"{model.site_count} candidate counties is pairwise separated by "
            f"{model.min_separation_miles} miles"
        )
    return "coupling/feasibility rows: no integer point satisfies the full row set"


def _greedy_incumbent(model: SpflpModel) -> tuple[list[int], np.ndarray] | None:
    """Cheap feasible plan: greedy site picks respecting separation, then an
    optimal transportation allocation.  Several orderings are tried."""
    n = model.n
    site = model.bundle.site_cost(model.weights)
    alloc_cost = model.bundle.allocation_cost(model.weights)
    orderings = [
        np.argsort(site, kind="stable"),
        np.argsort(alloc_cost.min(axis=1), kind="stable"),
        np.argsort(site + alloc_cost.mean(axis=1), kind="stable"),
    ]
    for order in orderings:
        chosen: list[int] = []
        for i in order:
            if all(
                model.dist_miles[i, j] >= model.min_separation_miles for j in chosen
            ):
                chosen.append(int(i))
            if len(chosen) == model.site_count:
                break
        if len(chosen) != model.site_count:
            continue
        try:
            y = allocation_subproblem(
                chosen, alloc_cost, model.demands, model.capacity, model.bundle.feasible_pair
            )
        except FlowInfeasibleError:
            continue
        return sorted(chosen), y
    return None


def _plan_objective(model: SpflpModel, selected: list[int], y: np.ndarray) -> float:
    site = model.bundle.site_cost(model.weights)
    alloc = model.bundle.allocation_cost(model.weights)
    return float(site[selected].sum() + (alloc * y).sum())


@dataclass(order=True)
class _Node:
    bound: float
    node_id: int
    solution: np.ndarray = field(compare=False)
    lower: np.ndarray = field(compare=False)
    upper: np.ndarray = field(compare=False)


@dataclass
class _SolverArrays:
    """Model rows plus solver-side tightenings that preserve the integer hull.

    Two presolve steps keep the search tree small: the pair indicators are
    data-determined (fixed to 0/1 from the distances, except exactly at the
    separation boundary), and the aggregated capacity cut
    sum_j y_ij <= P x_i (valid: closed sites serve nothing, open ones at
    most P) strengthens the shipped 1/(KP) coupling row in the relaxation.
    """

    a_ub: np.ndarray
    b_ub: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def _solver_arrays(model: SpflpModel) -> _SolverArrays:
    extra_rows = []
    for i in range(model.n):
        row = np.zeros(model.n_vars)
        row[model.x_index(i)] = -float(model.capacity)
        for j in range(model.m):
            row[model.y_index(i, j)] = 1.0
        extra_rows.append(row)
    a_ub = np.vstack([model.a_ub, *extra_rows]) if len(model.b_ub) else np.vstack(extra_rows)
    b_ub = np.concatenate([model.b_ub, np.zeros(len(extra_rows))])

    lower = model.lower.copy()
    upper = model.upper.copy()
    if not model.use_conflict_reformulation:
        for p, (i, k) in enumerate(model.pairs):
            d = model.dist_miles[i, k]
            if d < model.min_separation_miles - 1e-9:
                upper[model.z_index(p)] = 0.0
            elif d > model.min_separation_miles + 1e-9:
                lower[model.z_index(p)] = 1.0
    return _SolverArrays(a_ub=a_ub, b_ub=b_ub, lower=lower, upper=upper)


def _solve_lp(model: SpflpModel, arrays: _SolverArrays, lower: np.ndarray, upper: np.ndarray):
    res = linprog(
        model.c,
        A_ub=arrays.a_ub,
        b_ub=arrays.b_ub,
        A_eq=model.a_eq,
        b_eq=model.b_eq,
        bounds=list(zip(lower, upper)),
        method="highs",
    )
    if res.status == 0:
        return float(res.fun), res.x
    return None


def _most_fractional(model: SpflpModel, v: np.ndarray) -> int | None:
    """Branching variable: x block first, then y, then z; ties to lowest index."""
    blocks = [
        range(model.n),
        range(model.n, model.n + model.n * model.m),
        range(model.n + model.n * model.m, model.n_vars),
    ]
    for block in blocks:
        best, best_frac = None, INT_TOL
        for idx in block:
            frac = abs(v[idx] - round(v[idx]))
            if frac > best_frac + 1e-12 and frac > INT_TOL:
                best, best_frac = idx, frac
        if best is not None:
            return best
    return None


def _incumbent_from_integral_x(
    model: SpflpModel, v: np.ndarray
) -> tuple[list[int], np.ndarray] | None:
    x = np.round(v[: model.n]).astype(int)
    selected = [i for i in range(model.n) if x[i] == 1]
    if len(selected) != model.site_count:
        return None
    for i, k in itertools.combinations(selected, 2):
        if model.dist_miles[i, k] < model.min_separation_miles:
            return None
    try:
        y = allocation_subproblem(
            selected,
            model.bundle.allocation_cost(model.weights),
            model.demands,
            model.capacity,
            model.bundle.feasible_pair,
        )
    except FlowInfeasibleError:
        return None
    return selected, y


def solve(model: SpflpModel, node_limit: int | None = None) -> PlanSolution:
    """Prove an optimal plan by best-bound branch-and-bound.

    Raises ModelInfeasibleError (with the offending row class named) when no
    integer point exists.  If `node_limit` is hit first, the best incumbent
    is returned with a nonzero gap and proven_optimal=False.
    """
    incumbent: tuple[list[int], np.ndarray] | None = _greedy_incumbent(model)
    incumbent_obj = (
        _plan_objective(model, incumbent[0], incumbent[1]) if incumbent else float("inf")
    )

    arrays = _solver_arrays(model)
    root = _solve_lp(model, arrays, arrays.lower, arrays.upper)
    if root is None:
        raise ModelInfeasibleError(_diagnose_infeasibility(model))

    heap: list[_Node] = []
    next_id = 0
    heapq.heappush(heap, _Node(root[0], next_id, root[1], arrays.lower.copy(), arrays.upper.copy()))
    nodes_explored = 0
    best_bound = root[0]

    while heap:
        node = heapq.heappop(heap)
        best_bound = node.bound
        if node.bound >= incumbent_obj - OBJ_TOL:
            break  # best-bound order: nothing left can improve
        nodes_explored += 1
        if node_limit is not None and nodes_explored > node_limit:
            if incumbent is None:
                raise ModelInfeasibleError(
                    "node limit reached before any feasible plan was found"
                )
            sel, y = incumbent
            return PlanSolution(
                selected_fips=[model.bundle.fips[i] for i in sel],
                selected_idx=sel,
                allocation=y,
                objective=incumbent_obj,
                breakdown=_breakdown(
                    model, _selection_vector(model, sel), y.astype(float)
                ),
                nodes_explored=nodes_explored,
                best_bound=best_bound,
                gap=incumbent_obj - best_bound,
                proven_optimal=False,
            )

        branch_var = _most_fractional(model, node.solution)
        if branch_var is None:
            # integral LP point: a feasible plan
            candidate = _incumbent_from_integral_x(model, node.solution)
            if candidate is not None:
                obj = _plan_objective(model, candidate[0], candidate[1])
                if obj < incumbent_obj - OBJ_TOL:
                    incumbent, incumbent_obj = candidate, obj
            continue

        # warm-start incumbents from nodes whose x block is already integral
        if branch_var >= model.n:
            candidate = _incumbent_from_integral_x(model, node.solution)
            if candidate is not None:
                obj = _plan_objective(model, candidate[0], candidate[1])
                if obj < incumbent_obj - OBJ_TOL:
                    incumbent, incumbent_obj = candidate, obj
                # the transportation allocation is optimal for this site set;
                # the node cannot improve on it further
                if obj <= node.bound + OBJ_TOL:
                    continue

        value = node.solution[branch_var]
        for lo_add, hi_add in (
            (None, math.floor(value)),
            (math.ceil(value), None),
        ):
            lower = node.lower.copy()
            upper = node.upper.copy()
            if lo_add is not None:
                lower[branch_var] = lo_add
            if hi_add is not None:
                upper[branch_var] = hi_add
            child = _solve_lp(model, arrays, lower, upper)
            if child is None:
                continue
            if child[0] >= incumbent_obj - OBJ_TOL:
                continue
            next_id += 1
            heapq.heappush(heap, _Node(child[0], next_id, child[1], lower, upper))

    if incumbent is None:
        raise ModelInfeasibleError(_diagnose_infeasibility(model))
    if not heap or best_bound >= incumbent_obj - OBJ_TOL:
        best_bound = incumbent_obj

    sel, y = incumbent
    return PlanSolution(
        selected_fips=[model.bundle.fips[i] for i in sel],
        selected_idx=sel,
        allocation=y,
        objective=incumbent_obj,
        breakdown=_breakdown(model, _selection_vector(model, sel), y.astype(float)),
        nodes_explored=nodes_explored,
        best_bound=best_bound,
        gap=0.0,
        proven_optimal=True,
    )


def _selection_vector(model: SpflpModel, selected: list[int]) -> np.ndarray:
    x = np.zeros(model.n)
    x[selected] = 1.0
    return x


def enumerate_oracle(model: SpflpModel, subset_cap: int = ORACLE_SUBSET_CAP) -> PlanSolution:
    """Ground truth by exhaustion: every separation-respecting K-subset gets
    an optimal transportation allocation; the global minimum wins.

    Refuses instances with more than `subset_cap` subsets.
    """
    n, k = model.n, model.site_count
    if math.comb(n, k) > subset_cap:
        raise ValueError(f"C({n}, {k}) exceeds the oracle cap of {subset_cap}")
    alloc_cost = model.bundle.allocation_cost(model.weights)
    site_cost = model.bundle.site_cost(model.weights)
    conflict = model.dist_miles < model.min_separation_miles
    np.fill_diagonal(conflict, False)
    demands = model.demands.astype(float)
    best: tuple[float, list[int], np.ndarray] | None = None
    subsets = 0
    for subset in itertools.combinations(range(n), k):
        idx = list(subset)
        if conflict[np.ix_(idx, idx)].any():
            continue
        subsets += 1
        # capacity-free relaxation: k_j units at the cheapest in-subset rate
        bound = site_cost[idx].sum() + float(demands @ alloc_cost[idx].min(axis=0))
        if best is not None and bound >= best[0] - OBJ_TOL:
            continue
        try:
            y = allocation_subproblem(
                idx, alloc_cost, model.demands, model.capacity, model.bundle.feasible_pair
            )
        except FlowInfeasibleError:
            continue
        obj = _plan_objective(model, idx, y)
        if best is None or obj < best[0]:
            best = (obj, idx, y)
    if best is None:
        raise ModelInfeasibleError(_diagnose_infeasibility(model))
    obj, sel, y = best
    return PlanSolution(
        selected_fips=[model.bundle.fips[i] for i in sel],
        selected_idx=sel,
        allocation=y,
        objective=obj,
        breakdown=_breakdown(model, _selection_vector(model, sel), y.astype(float)),
        nodes_explored=subsets,
        best_bound=obj,
        gap=0.0,
        proven_optimal=True,
    )
