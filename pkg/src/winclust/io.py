"""Long-format data ingestion, structured documents, and reports.

Tabular input is delimiter-separated text with a header; default columns
id, trt, cluster, outcome, tier. Tier 0 rows carry the censoring horizon,
tiers 1..K are event rows with larger = higher priority. If a file contains
any tier-0 row, every subject must have exactly one and all tiers are read
as survival times; without censoring rows all tiers are fully observed
scalars and every subject needs a value for each tier.

Structured documents (design inputs, generative specs, estimates, scenario
grids and results) are JSON throughout: pretty-printed, full precision,
accepted back verbatim by every consumer.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Optional

import pandas as pd

from .data import Component, DataError, SubjectRecord, TrialDataset
from .design import CompositeProbs, DesignInputs, DesignResult
from .generative import (
    ClusterSizeSpec,
    CompositeGenSpec,
    DesignInputEstimate,
    OrdinalGenSpec,
)
from .simharness import ScenarioCell, ScenarioGrid, ScenarioResult
from .wincore import WinEstimates

DEFAULT_COLUMNS = {
    "id": "id",
    "trt": "trt",
    "cluster": "cluster",
    "outcome": "outcome",
    "tier": "tier",
}


def parse_long_format(
    path,
    delimiter: str = ",",
    columns: Optional[dict] = None,
) -> TrialDataset:
    """Read a long-format file into a validated TrialDataset, reporting
    offending row numbers (1-based, excluding the header)."""
    cols = dict(DEFAULT_COLUMNS)
    if columns:
        cols.update(columns)
    df = pd.read_csv(path, sep=delimiter, dtype=str, skipinitialspace=True)
    missing = [c for c in cols.values() if c not in df.columns]
    if missing:
        raise DataError(f"missing columns: {', '.join(missing)}")

    def bad(rows, msg):
        nums = ", ".join(str(i + 1) for i in rows[:8])
        raise DataError(f"{msg} (rows {nums})")

    out = pd.DataFrame(
        {
            "id": df[cols["id"]].astype(str),
            "trt": df[cols["trt"]],
            "cluster": df[cols["cluster"]].astype(str),
            "outcome": pd.to_numeric(df[cols["outcome"]], errors="coerce"),
            "tier": pd.to_numeric(df[cols["tier"]], errors="coerce"),
        }
    )
    if out["outcome"].isna().any():
        bad(out.index[out["outcome"].isna()].tolist(), "non-numeric outcome")
    if out["tier"].isna().any() or (out["tier"] % 1 != 0).any():
        bad(
            out.index[out["tier"].isna() | (out["tier"] % 1 != 0)].tolist(),
            "tier must be a nonnegative integer",
        )
    out["tier"] = out["tier"].astype(int)
    if (out["tier"] < 0).any():
        bad(out.index[out["tier"] < 0].tolist(), "negative tier code")
    trt = pd.to_numeric(out["trt"], errors="coerce")
    if trt.isna().any() or (~trt.isin([0, 1])).any():
        bad(out.index[trt.isna() | ~trt.isin([0, 1])].tolist(), "trt must be 0 or 1")
    out["trt"] = trt.astype(int)

    dup = out.duplicated(subset=["id", "tier"], keep=False)
    if dup.any():
        bad(out.index[dup].tolist(), "duplicate (subject, tier) rows")

    arm_by_subject = out.groupby("id")["trt"].nunique()
    if (arm_by_subject > 1).any():
        sid = arm_by_subject.index[arm_by_subject > 1][0]
        bad(out.index[out["id"] == sid].tolist(), f"subject {sid} in both arms")
    cl_by_subject = out.groupby("id")["cluster"].nunique()
    if (cl_by_subject > 1).any():
        sid = cl_by_subject.index[cl_by_subject > 1][0]
        bad(
            out.index[out["id"] == sid].tolist(),
            f"subject {sid} appears in two clusters",
        )
    arms_per_cluster = out.groupby("cluster")["trt"].nunique()
    if (arms_per_cluster > 1).any():
        cl = arms_per_cluster.index[arms_per_cluster > 1][0]
        bad(
            out.index[out["cluster"] == cl].tolist(),
            f"cluster {cl} appears under both arms",
        )

    survival_mode = bool((out["tier"] == 0).any())
    event_tiers = sorted(out.loc[out["tier"] > 0, "tier"].unique())
    if not event_tiers:
        raise DataError("no event tiers found")

    subjects = []
    for sid, rows in out.groupby("id", sort=False):
        tiers_here = dict(zip(rows["tier"], rows["outcome"]))
        arm = int(rows["trt"].iloc[0])
        cluster = rows["cluster"].iloc[0]
        comps = []
        if survival_mode:
            if 0 not in tiers_here:
                bad(rows.index.tolist(), f"subject {sid} lacks a censoring row")
            horizon = float(tiers_here[0])
            for t in event_tiers:
                if t in tiers_here:
                    comps.append(Component(t, float(tiers_here[t]), False))
                else:
                    comps.append(Component(t, horizon, True))
        else:
            for t in event_tiers:
                if t not in tiers_here:
                    bad(
                        rows.index.tolist(),
                        f"subject {sid} lacks a value for tier {t}",
                    )
                comps.append(Component(t, float(tiers_here[t]), False))
        subjects.append(SubjectRecord(sid, cluster, arm, tuple(comps)))
    return TrialDataset(
        subjects,
        survival_tiers=frozenset(event_tiers) if survival_mode else frozenset(),
    )


def write_long_format(data: TrialDataset, path, delimiter: str = ",") -> None:
    """Serialize a dataset back to the long format (inverse of parsing)."""
    rows = []
    survival = bool(data.survival_tiers) or any(
        c.censored for s in data.subjects for c in s.components
    )
    for s in data.subjects:
        if survival:
            horizon = None
            for c in s.components:
                if c.censored:
                    horizon = c.value
            if horizon is None:
                # fully observed subject: censoring horizon beyond all events
                horizon = max(c.value for c in s.components)
            rows.append((s.subject_id, s.arm, s.cluster_id, horizon, 0))
            for c in s.components:
                if not c.censored:
                    rows.append((s.subject_id, s.arm, s.cluster_id, c.value, c.tier))
        else:
            for c in s.components:
                rows.append((s.subject_id, s.arm, s.cluster_id, c.value, c.tier))
    pd.DataFrame(
        rows, columns=["id", "trt", "cluster", "outcome", "tier"]
    ).to_csv(path, sep=delimiter, index=False)


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------


def design_inputs_to_dict(inputs: DesignInputs) -> dict:
    d = dataclasses.asdict(inputs)
    if inputs.composite_probs is None:
        d.pop("composite_probs")
    return d


def design_inputs_from_dict(doc: dict) -> DesignInputs:
    d = dict(doc)
    cp = d.pop("composite_probs", None)
    if cp is not None:
        cp = CompositeProbs(**cp)
    known = {f.name for f in dataclasses.fields(DesignInputs)}
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"unknown design-input fields: {sorted(unknown)}")
    return DesignInputs(composite_probs=cp, **d)


def spec_to_dict(spec) -> dict:
    if isinstance(spec, CompositeGenSpec):
        d = dataclasses.asdict(spec)
        d["model"] = "composite"
    elif isinstance(spec, OrdinalGenSpec):
        d = dataclasses.asdict(spec)
        d["model"] = "ordinal"
        d["control_probs"] = list(spec.control_probs)
    else:
        raise TypeError(f"unknown spec type {type(spec).__name__}")
    return d


def spec_from_dict(doc: dict):
    d = dict(doc)
    model = d.pop("model", None)
    cs = d.pop("cluster_size", None)
    if cs is not None:
        d["cluster_size"] = ClusterSizeSpec(**cs)
    if model == "composite":
        return CompositeGenSpec(**d)
    if model == "ordinal":
        d["control_probs"] = tuple(d["control_probs"])
        return OrdinalGenSpec(**d)
    raise ValueError("spec document needs model: 'composite' or 'ordinal'")


def estimate_doc(est: DesignInputEstimate) -> dict:
    d = dataclasses.asdict(est)
    d["seed"] = None if est.seed is None else str(est.seed)
    return d


def estimate_from_dict(doc: dict) -> DesignInputEstimate:
    return DesignInputEstimate(**doc)


def grid_to_dict(grid: ScenarioGrid) -> dict:
    return {
        "replicates": grid.replicates,
        "alpha": grid.alpha,
        "target_power": grid.target_power,
        "seed": grid.seed,
        "assignment": grid.assignment,
        "input_budget": grid.input_budget,
        "pool_size": grid.pool_size,
        "icc_pairs": grid.icc_pairs,
        "cells": [
            {
                "name": c.name,
                "M": c.M,
                "estimands": list(c.estimands),
                "tests": list(c.tests),
                "spec": spec_to_dict(c.spec),
            }
            for c in grid.cells
        ],
    }


def grid_from_dict(doc: dict) -> ScenarioGrid:
    d = dict(doc)
    cells = [
        ScenarioCell(
            name=c["name"],
            spec=spec_from_dict(c["spec"]),
            M=c.get("M"),
            estimands=tuple(c.get("estimands", ("wd", "logwr", "logwo"))),
            tests=tuple(c.get("tests", ("z", "t"))),
        )
        for c in d.pop("cells")
    ]
    return ScenarioGrid(cells=cells, **d)


def results_table(results: list[ScenarioResult]) -> pd.DataFrame:
    """Summary table with the usual simulation-report columns."""
    return pd.DataFrame(
        [
            {
                "Scenario": r.cell,
                "M": r.M,
                "Estimand": r.estimand,
                "Test": r.test,
                "TrueDelta": r.true_delta,
                "Empirical": r.empirical_power,
                "Predicted": r.predicted_power,
                "MCSE": r.mc_se,
                "MeanEstimate": r.mean_estimate,
                "MeanSE": r.mean_se,
                "MCSD": r.mcsd,
                "Coverage": r.coverage,
                "Replicates": r.replicates,
                "Failed": r.n_failed,
            }
            for r in results
        ]
    )


def save_json(obj: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, default=_json_default)
        fh.write("\n")


def load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _json_default(o):
    if isinstance(o, (bool,)):
        return o
    if hasattr(o, "item"):
        return o.item()
    if dataclasses.is_dataclass(o):
        return dataclasses.asdict(o)
    raise TypeError(f"not JSON-serializable: {type(o).__name__}")


# ---------------------------------------------------------------------------
# analysis report
# ---------------------------------------------------------------------------


@dataclass
class AnalysisReport:
    estimates: WinEstimates
    test: str
    alpha: float
    alternative: str

    def to_dict(self) -> dict:
        e = self.estimates
        per = {}
        for name, r in e.by_estimand.items():
            use_t = self.test == "t"
            per[name] = {
                "defined": r.defined,
                "estimate": r.estimate,
                "se": r.se,
                "statistic": r.t if use_t else r.z,
                "p_value": r.p_t if use_t else r.p_z,
                "ci_lower": (r.ci_t if use_t else r.ci_z)[0],
                "ci_upper": (r.ci_t if use_t else r.ci_z)[1],
                "note": r.note,
            }
        return {
            "test": self.test,
            "alpha": self.alpha,
            "alternative": self.alternative,
            "clusters": {"M1": e.M1, "M0": e.M0, "M": e.M},
            "subjects": {"n1": e.n1, "n0": e.n0},
            "totals": {"wins": e.W, "losses": e.L, "ties": e.T},
            "pi_tie": e.pi_tie_hat,
            "rank_icc": e.rank_icc_hat,
            "df": e.df,
            "estimands": per,
        }

    def render_text(self, estimand: str = "all") -> str:
        """Human-readable summary; numbers at 3 significant decimals."""
        e = self.estimates
        names = (
            ["wd", "logwr", "logwo"] if estimand == "all" else [estimand]
        )
        label = {"wd": "WD", "logwr": "logWR", "logwo": "logWO"}
        lines = [
            f"Win Statistics Summary ({self.test.upper()}-test, "
            f"alpha={_fmt(self.alpha)}, alternative={self.alternative})",
            f"Clusters: M1={e.M1}, M0={e.M0}, M={e.M}",
            f"Subjects: n1={e.n1}, n0={e.n0}",
            f"Totals (between arms): Wins={e.W}, Losses={e.L}, Ties={e.T}",
            f"p_tie: {_fmt(e.pi_tie_hat)}; rho (rank ICC): {_fmt(e.rank_icc_hat)}",
            "",
            f"{'Estimand':>9} {'Estimate':>9} {'SE':>7} {'p-value':>8} "
            f"{'CI':>18}",
        ]
        doc = self.to_dict()["estimands"]
        for name in names:
            r = doc[name]
            if not r["defined"]:
                lines.append(f"{label[name]:>9} {'undefined':>9}  ({r['note']})")
                continue
            ci = f"({_fmt(r['ci_lower'])}, {_fmt(r['ci_upper'])})"
            lines.append(
                f"{label[name]:>9} {_fmt(r['estimate']):>9} {_fmt(r['se']):>7} "
                f"{_fmt(r['p_value']):>8} {ci:>18}"
            )
        return "\n".join(lines)


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "NA"
    if x == 0:
        return "0"
    digits = max(0, 3 - 1 - math.floor(math.log10(abs(x))))
    return f"{round(x, int(digits)):g}"


def design_result_doc(inputs: DesignInputs, result: DesignResult) -> dict:
    return {
        "inputs": design_inputs_to_dict(inputs),
        "variance": result.variance,
        "power": result.power,
        "required_M": result.required_M,
        "vif": result.vif,
        "vif_star": result.vif_star,
        "P": result.P,
        "Q": result.Q,
        "V_of_M": result.V_of_M,
        "diagnostics": result.diagnostics,
    }
