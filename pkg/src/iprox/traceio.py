"""CSV serialization for solver and ODE traces.

The column order and header are a stable external contract:

    solver traces:  k,F,lyapunov,step_sq,residual_sq,descent_slack
    ODE traces:     t,xi_f,speed_sq,accel_ratio

Floats are written with 17 significant digits, which round-trips IEEE
double exactly.  Newlines are always "\\n" so repeated runs are
byte-identical regardless of platform.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ContractViolation

TRACE_HEADER = "k,F,lyapunov,step_sq,residual_sq,descent_slack"
ODE_HEADER = "t,xi_f,speed_sq,accel_ratio"


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def write_trace_csv(path, trace) -> None:
    """Write one solver trace; every value must be finite."""
    cols = [
        np.asarray(trace.ks),
        np.asarray(trace.F),
        np.asarray(trace.lyapunov),
        np.asarray(trace.step_sq),
        np.asarray(trace.residual_sq),
        np.asarray(trace.descent_slack),
    ]
    _write_rows(path, TRACE_HEADER, cols, allow_inf_cols=())


def write_mean_trace_csv(path, traces) -> None:
    """Seed-averaged trace: elementwise mean of each column at matching k.

    Traces are truncated to the shortest common length; iteration grids
    must agree on that prefix.
    """
    if len(traces) == 0:
        raise ContractViolation("need at least one trace to average")
    n = min(len(t.ks) for t in traces)
    ks = np.asarray(traces[0].ks[:n])
    for t in traces:
        if not np.array_equal(np.asarray(t.ks[:n]), ks):
            raise ContractViolation("traces disagree on recorded iteration grid")
    cols = [ks]
    for name in ("F", "lyapunov", "step_sq", "residual_sq", "descent_slack"):
        stack = np.stack([np.asarray(getattr(t, name)[:n], dtype=float) for t in traces])
        cols.append(stack.mean(axis=0))
    _write_rows(path, TRACE_HEADER, cols, allow_inf_cols=())


def write_ode_csv(path, ode_trace) -> None:
    """Write an ODE trace; accel_ratio may hold the documented +inf sentinel."""
    speed_sq = np.sum(np.asarray(ode_trace.vs) ** 2, axis=1)
    cols = [
        np.asarray(ode_trace.ts),
        np.asarray(ode_trace.xi_f),
        speed_sq,
        np.asarray(ode_trace.accel_ratio),
    ]
    _write_rows(path, ODE_HEADER, cols, allow_inf_cols=(3,))


def _write_rows(path, header: str, cols, allow_inf_cols) -> None:
    n = len(cols[0])
    for j, col in enumerate(cols):
        if len(col) != n:
            raise ContractViolation("ragged columns")
        vals = np.asarray(col, dtype=float)
        bad = ~np.isfinite(vals)
        if j in allow_inf_cols:
            bad &= ~np.isposinf(vals)
        if np.any(bad):
            raise ContractViolation(f"non-finite value in CSV column {j}")
    lines = [header]
    is_k = header.startswith("k,")
    for r in range(n):
        fields = []
        for j, col in enumerate(cols):
            if j == 0 and is_k:
                fields.append(str(int(col[r])))
            else:
                fields.append(format_float(col[r]))
        lines.append(",".join(fields))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> dict:
    """Read a trace CSV back into {column_name: ndarray}."""
    with open(path, "r", newline="") as fh:
        text = fh.read()
    lines = [ln for ln in text.split("\n") if ln != ""]
    if not lines:
        raise ContractViolation(f"empty CSV {path}")
    names = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:]]
    if any(len(r) != len(names) for r in rows):
        raise ContractViolation(f"ragged CSV {path}")
    out = {}
    for j, name in enumerate(names):
        vals = [float(r[j]) for r in rows]
        if name == "k":
            out[name] = np.asarray(vals, dtype=np.int64)
        else:
            out[name] = np.asarray(vals, dtype=float)
    return out
