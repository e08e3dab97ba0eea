"""Deterministic JSON, CSV and text rendering of results."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import mpmath

from .laurent import LaurentSeries
from .precision import format_decimal, rat_str

FORMATS = ("text", "json", "csv")
RESIDUAL_DIGITS = 6


def dec(x, digits: int) -> str:
    return format_decimal(x, digits)


def series_doc(ls: LaurentSeries, digits: int, **extra) -> dict:
    doc = dict(extra)
    doc.update({
        "center": rat_str(ls.center),
        "lead_exp": ls.lead_exp,
        "trunc_order": ls.trunc_order,
        "zero": ls.is_zero,
        "coeffs": [{"k": k, "value": dec(ls.coeff(k), digits)}
                   for k in range(ls.lead_exp, ls.trunc_order + 1)],
    })
    return doc


def report_doc(rep, digits: int | None = None) -> dict:
    digits = digits or rep.digits
    p = rep.params
    params = {"m": p.get("m"), "r": p.get("r")}
    for k in sorted(p):
        if k not in params:
            params[k] = p[k]
    doc = {
        "id": rep.id,
        "params": params,
        "digits": rep.digits,
        "buckets": [],
        "pass": rep.passed,
    }
    for b in rep.buckets:
        row = {"exponent": b["exponent"], "logdeg": b["logdeg"],
               "residual": dec(b["residual"], RESIDUAL_DIGITS), "status": b["status"]}
        if "atom" in b:
            row["atom"] = b["atom"]
        doc["buckets"].append(row)
    doc["derived"] = {k: _value(v, digits) for k, v in rep.derived.items()}
    doc["comparisons"] = [{
        "name": c["name"], "engine": dec(c["engine"], digits), "reference": dec(c["reference"], digits),
        "rel_err": dec(c["rel_err"], RESIDUAL_DIGITS), "pass": c["pass"], "advisory": c["advisory"],
        **({"note": c["note"]} if "note" in c else {}),
    } for c in rep.comparisons]
    if rep.constant is not None:
        doc["constant"] = dec(rep.constant, digits)
    doc["open"] = len(rep.open)
    doc["notes"] = list(rep.notes)
    doc["log"] = list(rep.log)
    return doc


def _value(v, digits):
    if isinstance(v, bool):
        return v
    if isinstance(v, Fraction):
        return rat_str(v)
    if isinstance(v, (int, float, mpmath.mpf, mpmath.mpc)):
        return dec(v, digits)
    return str(v)


def to_json(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=True) + "\n"


def _flatten(doc: dict) -> list:
    """Rows for CSV: one per bucket of a report, per row of a grid, else one."""
    if "rows" in doc:
        return [_flat_row(r) for r in doc["rows"]]
    if "buckets" in doc and "id" in doc:
        base = {"id": doc["id"], "m": doc["params"].get("m"), "r": doc["params"].get("r"), "pass": doc["pass"]}
        if not doc["buckets"]:
            return [base]
        return [{**base, **b} for b in doc["buckets"]]
    if "coeffs" in doc:
        head = {k: v for k, v in doc.items() if k != "coeffs"}
        return [{**head, **c} for c in doc["coeffs"]] or [head]
    return [_flat_row(doc)]


def _flat_row(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, dict):
            for k2, v2 in v.items():
                out[f"{k}.{k2}"] = v2
        elif isinstance(v, list):
            out[k] = json.dumps(v, sort_keys=True)
        else:
            out[k] = v
    return out


def to_csv(doc) -> str:
    rows = _flatten(doc)
    cols: list = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _csv_cell(r.get(k)) for k in cols})
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def to_text(doc, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    for k, v in doc.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(to_text(v, indent + 1).rstrip("\n"))
        elif isinstance(v, list):
            lines.append(f"{pad}{k}: [{len(v)}]")
            for item in v:
                if isinstance(item, dict):
                    lines.append(pad + "  - " + ", ".join(f"{a}={_txt(b)}" for a, b in item.items()))
                else:
                    lines.append(f"{pad}  - {_txt(item)}")
        else:
            lines.append(f"{pad}{k}: {_txt(v)}")
    return "\n".join(x for x in lines if x) + "\n"


def _txt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "-"
    return str(v)


def emit(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return to_json(doc)
    if fmt == "csv":
        return to_csv(doc)
    if fmt == "text":
        return to_text(doc)
    raise ValueError(f"unknown format {fmt!r}")
