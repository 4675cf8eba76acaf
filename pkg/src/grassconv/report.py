"""Serialization of verification reports (JSON and CSV)."""
import csv
import io
import json

RESULT_COLUMNS = ("estimate", "passed", "failed", "min_eig", "argmin_Z", "argmin_theta")


def to_json(report):
    # repr-based float output round-trips exactly
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def from_json(text):
    return json.loads(text)


def to_csv(report):
    """The ``results`` table, one row per estimate/check; nested values as JSON."""
    buf = io.StringIO()
    extra = sorted({k for r in report["results"] for k in r} - set(RESULT_COLUMNS) - {"argmin"})
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(RESULT_COLUMNS) + extra)
    for r in report["results"]:
        arg = r.get("argmin") or {}
        row = [r["estimate"], r["passed"], r["failed"], _cell(r.get("min_eig")),
               _cell(arg.get("Z")), _cell(arg.get("theta"))]
        row += [_cell(r.get(k)) for k in extra]
        w.writerow(row)
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    return repr(v) if isinstance(v, float) else str(v)


def results_from_csv(text):
    """Parse a CSV report back into result dicts comparable with the JSON ones."""
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        r = {"estimate": row.pop("estimate"), "passed": int(row.pop("passed")),
             "failed": int(row.pop("failed"))}
        r["min_eig"] = _uncell(row.pop("min_eig"))
        Z, th = _uncell(row.pop("argmin_Z")), _uncell(row.pop("argmin_theta"))
        r["argmin"] = None if Z is None else {"Z": Z, "theta": th}
        for k, v in row.items():
            r[k] = _uncell(v)
        out.append(r)
    return out


def _uncell(s):
    if s == "":
        return None
    return json.loads(s)


def diff(a, b, tol=0.0, path=""):
    """Paths at which two parsed reports differ (numbers compared within ``tol``)."""
    if isinstance(a, dict) and isinstance(b, dict):
        out = []
        for k in sorted(set(a) | set(b)):
            if k not in a or k not in b:
                out.append(f"{path}/{k}")
            else:
                out.extend(diff(a[k], b[k], tol, f"{path}/{k}"))
        return out
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            return [f"{path} (length {len(a)} vs {len(b)})"]
        return [d for i, (x, y) in enumerate(zip(a, b)) for d in diff(x, y, tol, f"{path}[{i}]")]
    num = (int, float)
    if isinstance(a, num) and isinstance(b, num) and not isinstance(a, bool) and not isinstance(b, bool):
        return [] if abs(a - b) <= tol * max(1.0, abs(a), abs(b)) else [f"{path}: {a!r} != {b!r}"]
    return [] if a == b else [f"{path}: {a!r} != {b!r}"]
