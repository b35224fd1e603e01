"""Serialization of results to JSON and CSV.

Floats are written with 17 significant digits and field order is fixed, so
output is byte-stable for fixed inputs.  JSON has no infinity literal;
infinite values are written as the strings ``"Infinity"`` / ``"-Infinity"``.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .bounds import BoundsReport, SubsetBound, SweepEntry
from .conditional import ConditionalSummary
from .constraints import ConstraintSet
from .iprojection import IProjection
from .measures import Dist, InfoValue, Residual
from .montecarlo import McEstimate
from .verify import Check

SWEEP_COLUMNS = ("n", "exact_rate", "ub_marginal", "ub_iproj", "lb_cross", "lb_maxcross",
                 "tc_slack", "gap", "status")


def real(x) -> float | str | None:
    """A JSON-ready real: a float, or a string for infinities."""
    if x is None:
        return None
    if isinstance(x, InfoValue):
        x = float(x)
    x = float(x)
    if math.isnan(x):
        raise ValueError("NaN cannot be serialized")
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return x + 0.0  # folds -0.0 into 0.0


def reals(xs) -> list:
    if isinstance(xs, Dist):
        xs = xs.probs
    return [real(x) for x in np.asarray(xs, dtype=float).tolist()]


def format_float(x: float) -> str:
    return format(x, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = real(obj)
        return json.dumps(value) if isinstance(value, str) else format_float(value)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def problem_dict(p: Dist, constraints: ConstraintSet) -> dict:
    return {"p": reals(p), "constraints": [
        {"f": reals(c.f), "relation": c.relation.value, "alpha": real(c.alpha)} for c in constraints
    ]}


def summary_dict(s: ConditionalSummary) -> dict:
    residual = s.identity_residual()
    return {
        "n": s.n,
        "log_prob_event": real(s.log_prob_event),
        "prob_event": real(s.prob_event),
        "log10_prob_event": real(s.log10_prob_event),
        "omega": reals(s.omega),
        "total_correlation": real(s.total_correlation),
        "entropy_mu": real(s.entropy_mu),
        "kl_omega_p": real(s.kl_omega_p),
        "identity_residual": real(residual.value),
        "identity_relative_residual": real(residual.relative),
    }


def subset_dict(b: SubsetBound) -> dict:
    return {
        "n": b.n,
        "lhs": real(b.lhs),
        "rhs": real(b.rhs),
        "residual": real(b.residual),
        "kl_mu_b_projection": real(b.kl_mu_b_projection),
        "log_prob_subset": real(b.log_prob_subset),
    }


def bounds_dict(r: BoundsReport) -> dict:
    out = {
        "n": r.n,
        "exact_rate": real(r.exact_rate),
        "log_prob_event": real(r.log_prob_event),
        "log10_prob_event": real(r.log10_prob_event),
        "ub_marginal": real(r.ub_marginal),
        "ub_iproj": real(r.ub_iproj),
        "lb_cross": real(r.lb_cross),
        "lb_maxcross": real(r.lb_maxcross),
        "tc_slack": real(r.tc_slack),
        "ratio_diag": real(r.ratio_diag),
        "gap": real(r.gap),
        "identity_residual": real(r.identity_residual()),
        "ordering_violation": real(r.ordering_violation()),
        "omega": reals(r.omega),
        "q_star": reals(r.q_star),
        "subset_bound": subset_dict(r.subset_bound) if r.subset_bound else None,
    }
    return out


def projection_dict(proj: IProjection) -> dict:
    return {
        "q_star": reals(proj.q_star),
        "duals": reals(proj.duals),
        "divergence": real(proj.divergence),
        "active": list(proj.active),
        "dual_gradient": real(proj.dual_gradient),
        "newton_iterations": proj.newton_iterations,
    }


def residual_dict(point: Dist, r: Residual) -> dict:
    return {"point": reals(point), "residual": real(r.value),
            "matched_infinity": r.matched_infinity}


def check_dict(c: Check) -> dict:
    return {"name": c.name, "status": c.status, "residual": real(c.residual),
            "tolerance": real(c.tolerance), "detail": c.detail}


def mc_dict(e: McEstimate) -> dict:
    return {
        "trials": e.trials,
        "hits": e.hits,
        "p_hat": real(e.p_hat),
        "ci_low": real(e.ci_low),
        "ci_high": real(e.ci_high),
        "confidence": 0.95,
        "one_sided": e.one_sided,
        "seed": e.seed,
        "partitions": e.partitions,
        "generator": e.generator,
    }


def sweep_csv(entries: list[SweepEntry]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for e in entries:
        if e.report is None:
            writer.writerow([e.n] + [""] * (len(SWEEP_COLUMNS) - 2) + ["skipped"])
            continue
        r = e.report
        values = (r.exact_rate, r.ub_marginal, r.ub_iproj, r.lb_cross, r.lb_maxcross,
                  r.tc_slack, r.gap)
        writer.writerow([e.n] + [format_float(v) for v in values] + ["ok"])
    return buf.getvalue()
