"""Free-format MPS export of the site-selection MILP, plus a reader.

Rows are written exactly as the in-memory arrays store them: one E row for
the site-cardinality constraint and one L row per inequality, so a re-parse
reproduces the coefficient matrix verbatim.  All variables are integer
(markers) with explicit upper bounds.  The reader understands the subset of
MPS this writer emits; it exists for round-trip checks and for feeding
external solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SpflpModel

__all__ = ["export_mps", "ParsedMps", "parse_mps"]

OBJECTIVE_ROW = "COST"
CARDINALITY_ROW = "CARD"


def _num(v: float) -> str:
    return f"{v:.17g}"


def export_mps(model: SpflpModel, name: str = "SPACEPORT") -> str:
    """Serialize the model to free-format MPS text (objective sense MIN)."""
    lines = [f"NAME {name}", "OBJSENSE", "    MIN", "ROWS", f" N {OBJECTIVE_ROW}", f" E {CARDINALITY_ROW}"]
    for label in model.row_labels:
        lines.append(f" L {label}")

    # column-major coefficient lists
    lines.append("COLUMNS")
    lines.append("    MARKER_INT_BEGIN 'MARKER' 'INTORG'")
    for idx, var in enumerate(model.var_names):
        if model.c[idx] != 0.0:
            lines.append(f"    {var} {OBJECTIVE_ROW} {_num(model.c[idx])}")
        if model.a_eq[0, idx] != 0.0:
            lines.append(f"    {var} {CARDINALITY_ROW} {_num(model.a_eq[0, idx])}")
        for r, label in enumerate(model.row_labels):
            if model.a_ub[r, idx] != 0.0:
                lines.append(f"    {var} {label} {_num(model.a_ub[r, idx])}")
    lines.append("    MARKER_INT_END 'MARKER' 'INTEND'")

    lines.append("RHS")
    if model.b_eq[0] != 0.0:
        lines.append(f"    RHS {CARDINALITY_ROW} {_num(model.b_eq[0])}")
    for r, label in enumerate(model.row_labels):
        if model.b_ub[r] != 0.0:
            lines.append(f"    RHS {label} {_num(model.b_ub[r])}")

    lines.append("BOUNDS")
    for idx, var in enumerate(model.var_names):
        lines.append(f" UP BND {var} {_num(model.upper[idx])}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


@dataclass
class ParsedMps:
    name: str
    minimize: bool
    var_names: list[str]
    c: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integer: np.ndarray
    row_labels: list[str]


def parse_mps(text: str) -> ParsedMps:
    """Parse the MPS subset produced by `export_mps`."""
    name = ""
    minimize = True
    row_types: dict[str, str] = {}
    row_order: list[str] = []
    obj_row: str | None = None
    coeffs: dict[tuple[str, str], float] = {}  # (var, row) -> value
    var_names: list[str] = []
    integer_vars: set[str] = set()
    rhs: dict[str, float] = {}
    upper_bounds: dict[str, float] = {}
    lower_bounds: dict[str, float] = {}

    section = None
    in_integer_block = False
    for raw in text.splitlines():
        line = raw.rstrip()
        if not line or line.startswith("*"):
            continue
        if not line[0].isspace():
            head = line.split()
            section = head[0]
            if section == "NAME":
                name = head[1] if len(head) > 1 else ""
            continue
        fields = line.split()
        if section == "OBJSENSE":
            minimize = fields[0].upper() == "MIN"
        elif section == "ROWS":
            kind, label = fields[0].upper(), fields[1]
            if kind == "N":
                obj_row = label
            else:
                row_types[label] = kind
                row_order.append(label)
        elif section == "COLUMNS":
            if len(fields) >= 3 and fields[1] == "'MARKER'":
                in_integer_block = fields[2] == "'INTORG'"
                continue
            var = fields[0]
            if var not in coeffs and var not in var_names:
                var_names.append(var)
            if in_integer_block:
                integer_vars.add(var)
            for row_label, value in zip(fields[1::2], fields[2::2]):
                coeffs[(var, row_label)] = float(value)
        elif section == "RHS":
            for row_label, value in zip(fields[1::2], fields[2::2]):
                rhs[row_label] = float(value)
        elif section == "BOUNDS":
            kind, var, value = fields[0].upper(), fields[2], float(fields[3]) if len(fields) > 3 else 0.0
            if kind == "UP":
                upper_bounds[var] = value
            elif kind == "LO":
                lower_bounds[var] = value
            elif kind == "FX":
                upper_bounds[var] = value
                lower_bounds[var] = value
            elif kind == "BV":
                upper_bounds[var] = 1.0

    if obj_row is None:
        raise ValueError("MPS text has no objective (N) row")
    n_vars = len(var_names)
    var_index = {v: i for i, v in enumerate(var_names)}
    ub_labels = [r for r in row_order if row_types[r] in ("L", "G")]
    eq_labels = [r for r in row_order if row_types[r] == "E"]
    a_ub = np.zeros((len(ub_labels), n_vars))
    b_ub = np.zeros(len(ub_labels))
    a_eq = np.zeros((len(eq_labels), n_vars))
    b_eq = np.zeros(len(eq_labels))
    c = np.zeros(n_vars)
    for (var, row_label), value in coeffs.items():
        idx = var_index[var]
        if row_label == obj_row:
            c[idx] = value
        elif row_types[row_label] == "E":
            a_eq[eq_labels.index(row_label), idx] = value
        else:
            sign = 1.0 if row_types[row_label] == "L" else -1.0
            a_ub[ub_labels.index(row_label), idx] = sign * value
    for r, label in enumerate(ub_labels):
        sign = 1.0 if row_types[label] == "L" else -1.0
        b_ub[r] = sign * rhs.get(label, 0.0)
    for r, label in enumerate(eq_labels):
        b_eq[r] = rhs.get(label, 0.0)

    lower = np.array([lower_bounds.get(v, 0.0) for v in var_names])
    upper = np.array([upper_bounds.get(v, np.inf) for v in var_names])
    integer = np.array([v in integer_vars for v in var_names])
    return ParsedMps(
        name=name,
        minimize=minimize,
        var_names=var_names,
        c=c,
        a_ub=a_ub,
        b_ub=b_ub,
        a_eq=a_eq,
        b_eq=b_eq,
        lower=lower,
        upper=upper,
        integer=integer,
        row_labels=ub_labels,
    )
