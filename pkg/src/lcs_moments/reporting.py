"""Output payloads, CSV rendering, and the published JSON schemas.

Writers are deterministic: keys are sorted, floats use shortest round-trip
repr, rows follow input order, and no timestamps or host details are
embedded, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json

from .bounds import BoundReport
from .experiments import (
    ExperimentConfig,
    MomentEstimate,
    OracleReport,
    ScalingFit,
    SwapProbabilityResult,
)

_NUMBER = {"type": "number"}
_INT = {"type": "integer"}
_STR = {"type": "string"}

MOMENTS_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["kind", "config", "results"],
    "properties": {
        "kind": {"const": "moments"},
        "config": {"type": "object"},
        "results": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n", "r", "mean_lc", "m_r_hat", "se", "ci99_lo", "ci99_hi", "gamma_hat"],
                "properties": {
                    "n": _INT,
                    "r": _NUMBER,
                    "mean_lc": _NUMBER,
                    "m_r_hat": _NUMBER,
                    "se": _NUMBER,
                    "ci99_lo": _NUMBER,
                    "ci99_hi": _NUMBER,
                    "gamma_hat": _NUMBER,
                },
            },
        },
        "distribution": {"type": "object"},
    },
}

SCALING_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["kind", "config", "points", "fits"],
    "properties": {
        "kind": {"const": "scaling"},
        "config": {"type": "object"},
        "points": MOMENTS_SCHEMA["properties"]["results"],
        "fits": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["r", "slope", "slope_ci_lo", "slope_ci_hi", "intercept", "residuals"],
                "properties": {
                    "r": _NUMBER,
                    "slope": _NUMBER,
                    "slope_ci_lo": _NUMBER,
                    "slope_ci_hi": _NUMBER,
                    "intercept": _NUMBER,
                    "residuals": {"type": "array", "items": _NUMBER},
                },
            },
        },
    },
}

SWAP_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": [
        "kind", "config", "n", "replicates",
        "p_plus", "p_plus_ci_lo", "p_plus_ci_hi",
        "p_minus", "p_minus_ci_lo", "p_minus_ci_hi",
        "p_zero", "diff", "diff_ci_lo", "diff_ci_hi",
    ],
    "properties": {
        "kind": {"const": "swap"},
        "config": {"type": "object"},
        "n": _INT,
        "replicates": _INT,
        "skipped": _INT,
        "p_plus": _NUMBER,
        "p_plus_ci_lo": _NUMBER,
        "p_plus_ci_hi": _NUMBER,
        "p_minus": _NUMBER,
        "p_minus_ci_lo": _NUMBER,
        "p_minus_ci_hi": _NUMBER,
        "p_zero": _NUMBER,
        "diff": _NUMBER,
        "diff_ci_lo": _NUMBER,
        "diff_ci_hi": _NUMBER,
        "conditional_on_bn": {"type": ["object", "null"]},
    },
}

CHAIN_LAW_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["kind", "config", "n", "tv_distances", "max_tv", "mixture_tv"],
    "properties": {
        "kind": {"const": "chain-law"},
        "config": {"type": "object"},
        "n": _INT,
        "tv_distances": {"type": "object", "additionalProperties": _NUMBER},
        "max_tv": _NUMBER,
        "mixture_tv": _NUMBER,
    },
}

BOUNDS_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "array",
    "items": {
        "type": "object",
        "required": ["name", "inputs", "value", "vacuous"],
        "properties": {
            "name": _STR,
            "inputs": {"type": "object"},
            "value": _NUMBER,
            "vacuous": {"type": "boolean"},
        },
    },
}

ORACLE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["kind", "config", "all_passed", "budget_exhausted", "checks"],
    "properties": {
        "kind": {"const": "oracle"},
        "config": {"type": "object"},
        "all_passed": {"type": "boolean"},
        "budget_exhausted": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "passed", "cases"],
                "properties": {
                    "name": _STR,
                    "passed": {"type": "boolean"},
                    "cases": _INT,
                    "detail": _STR,
                    "counterexample": {"type": ["object", "null"]},
                },
            },
        },
    },
}

SCHEMAS = {
    "moments": MOMENTS_SCHEMA,
    "scaling": SCALING_SCHEMA,
    "swap": SWAP_SCHEMA,
    "chain-law": CHAIN_LAW_SCHEMA,
    "bounds": BOUNDS_SCHEMA,
    "oracle": ORACLE_SCHEMA,
}


def _estimate_row(e: MomentEstimate) -> dict:
    return {
        "n": e.n,
        "r": e.r,
        "mean_lc": e.mean_lc,
        "m_r_hat": e.m_r_hat,
        "se": e.se,
        "ci99_lo": e.ci99[0],
        "ci99_hi": e.ci99[1],
        "gamma_hat": e.gamma_hat,
    }


def moments_payload(cfg: ExperimentConfig, estimates: list[MomentEstimate],
                    distribution: dict | None = None) -> dict:
    payload = {
        "kind": "moments",
        "config": cfg.to_dict(),
        "results": [_estimate_row(e) for e in estimates],
    }
    if distribution is not None:
        payload["distribution"] = distribution
    return payload


def scaling_payload(cfg: ExperimentConfig, estimates: list[MomentEstimate],
                    fits: list[ScalingFit]) -> dict:
    return {
        "kind": "scaling",
        "config": cfg.to_dict(),
        "points": [_estimate_row(e) for e in estimates],
        "fits": [
            {
                "r": f.r,
                "slope": f.slope,
                "slope_ci_lo": f.slope_ci[0],
                "slope_ci_hi": f.slope_ci[1],
                "intercept": f.intercept,
                "residuals": list(f.residuals),
            }
            for f in fits
        ],
    }


def swap_payload(cfg: ExperimentConfig, res: SwapProbabilityResult) -> dict:
    return {
        "kind": "swap",
        "config": cfg.to_dict(),
        "n": res.n,
        "replicates": res.replicates,
        "skipped": res.skipped,
        "p_plus": res.p_plus,
        "p_plus_ci_lo": res.p_plus_ci[0],
        "p_plus_ci_hi": res.p_plus_ci[1],
        "p_minus": res.p_minus,
        "p_minus_ci_lo": res.p_minus_ci[0],
        "p_minus_ci_hi": res.p_minus_ci[1],
        "p_zero": res.p_zero,
        "diff": res.diff,
        "diff_ci_lo": res.diff_ci[0],
        "diff_ci_hi": res.diff_ci[1],
        "conditional_on_bn": res.conditional_on_bn,
    }


def chain_law_payload(cfg: ExperimentConfig, result: dict) -> dict:
    return {"kind": "chain-law", "config": cfg.to_dict(), **result}


def bounds_payload(reports: list[BoundReport]) -> list[dict]:
    return [r.to_json_dict() for r in reports]


def oracle_payload(cfg: ExperimentConfig, report: OracleReport) -> dict:
    return {"kind": "oracle", "config": cfg.to_dict(), **report.to_json_dict()}


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv(rows: list[dict], columns: list[str]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


MOMENTS_COLUMNS = ["n", "r", "mean_lc", "m_r_hat", "se", "ci99_lo", "ci99_hi", "gamma_hat"]


def moments_csv(payload: dict) -> str:
    return _csv(payload["results"], MOMENTS_COLUMNS)


def scaling_csv(payload: dict) -> str:
    points = _csv(payload["points"], MOMENTS_COLUMNS)
    summary_cols = ["r", "slope", "slope_ci_lo", "slope_ci_hi"]
    summary = _csv(payload["fits"], summary_cols)
    return points + summary


SWAP_COLUMNS = [
    "n", "p_plus", "p_plus_ci_lo", "p_plus_ci_hi",
    "p_minus", "p_minus_ci_lo", "p_minus_ci_hi",
    "p_zero", "diff", "diff_ci_lo", "diff_ci_hi", "replicates",
]


def swap_csv(payload: dict) -> str:
    return _csv([payload], SWAP_COLUMNS)


def chain_law_csv(payload: dict) -> str:
    rows = [{"k": k, "tv": tv} for k, tv in payload["tv_distances"].items()]
    rows.append({"k": "max", "tv": payload["max_tv"]})
    rows.append({"k": "mixture", "tv": payload["mixture_tv"]})
    return _csv(rows, ["k", "tv"])


def bounds_csv(payload: list[dict]) -> str:
    rows = [
        {"name": r["name"], "value": r["value"], "vacuous": r["vacuous"]}
        for r in payload
    ]
    return _csv(rows, ["name", "value", "vacuous"])


def oracle_csv(payload: dict) -> str:
    rows = [
        {"name": c["name"], "passed": c["passed"], "cases": c["cases"]}
        for c in payload["checks"]
    ]
    return _csv(rows, ["name", "passed", "cases"])


def to_json_text(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


CSV_RENDERERS = {
    "moments": moments_csv,
    "scaling": scaling_csv,
    "swap": swap_csv,
    "chain-law": chain_law_csv,
    "bounds": bounds_csv,
    "oracle": oracle_csv,
}
