"""Verification campaigns behind the command-line interface.

Each campaign evaluates independent samples; sample ``i`` draws from its own
sub-seed (see :mod:`grassconv.sampling`) and results are merged by index, so
output does not depend on the number of workers.
"""
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import graphs
from .estimates import ESTIMATES, gap_form
from .grassmann import JordanAngles, in_bjx, metric_gram
from .numerics import gen_sym_eig
from .sampling import (
    angles_sharp,
    angles_uniform_u,
    angles_uniform_v,
    sample_rng,
    scramble,
    straddling_angles,
)
from .scalarfuncs import u_jet, v_jet

V_BASED = ("es1", "es4", "h1", "h2")
H_ESTIMATES = ("h1", "h2", "h3", "h4")
ADVERSARIAL_FRACTION = 10      # one in ten samples sits near the sharp manifold
IDENTITY_RTOL = 1e-4
LAPLACIAN_FD_RTOL = 1e-5
LO_SPREAD_TOL = 1e-8
GRAPH_KINDS = ("affine", "holomorphic-pair", "lawson-osserman")


class ConfigError(ValueError):
    pass


@dataclass
class CampaignConfig:
    n: int = 3
    m: int = 2
    samples: int = 1000
    seed: int = 42
    tolerance: float = 1e-8
    margin: float = 1e-3
    estimates: list = field(default_factory=lambda: list(ESTIMATES))
    output: str = None
    format: str = "json"

    def validate(self):
        if self.n < 1 or self.m < 1:
            raise ConfigError(f"n and m must be >= 1 (got n={self.n}, m={self.m})")
        if max(self.n, self.m) > 8:
            raise ConfigError("n, m are capped at 8 for campaigns")
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1 (got {self.samples})")
        if not self.tolerance > 0:
            raise ConfigError(f"tolerance must be > 0 (got {self.tolerance})")
        if not 0 < self.margin < 0.5:
            raise ConfigError(f"margin must lie in (0, 0.5) (got {self.margin})")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        unknown = [e for e in self.estimates if e not in ESTIMATES]
        if unknown:
            raise ConfigError(f"unknown estimates {unknown}; choose from {list(ESTIMATES)}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv (got {self.format!r})")
        return self

    def echo(self):
        d = asdict(self)
        d.pop("output")
        return d


def worker_count(requested=None):
    cap = os.environ.get("GRASSCONV_THREADS")
    cap = int(cap) if cap else None
    w = requested if requested is not None else (cap or 1)
    if cap is not None:
        w = min(w, cap)
    return max(1, int(w))


def _map(fn, tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _chunks(total, workers):
    k = max(1, workers * 4)
    edges = np.linspace(0, total, min(k, total) + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _as_list(a):
    return np.asarray(a, float).tolist()


# ---------------------------------------------------------------- verify-hessians

def applicable_estimates(cfg):
    """Estimates meaningful for G(n, m); h1..h4 need min(n, m) >= 2."""
    if min(cfg.n, cfg.m) >= 2:
        return list(cfg.estimates), []
    skipped = [e for e in cfg.estimates if e in H_ESTIMATES]
    return [e for e in cfg.estimates if e not in H_ESTIMATES], skipped


def verify_sample(label, cfg, i):
    stream = ESTIMATES.index(label)
    rng = sample_rng(cfg.seed, stream, i)
    base = "v" if label in V_BASED else "u"
    p = min(cfg.n, cfg.m)
    adversarial = p >= 2 and i % ADVERSARIAL_FRACTION == 0
    if adversarial:
        angles = angles_sharp(rng, cfg.n, cfg.m, base, cfg.margin)
    elif base == "v":
        angles = angles_uniform_v(rng, cfg.n, cfg.m, cfg.margin)
    else:
        angles = angles_uniform_u(rng, cfg.n, cfg.m, cfg.margin)
    Z = scramble(rng, angles)
    g = gap_form(label, Z)
    ev = g.eigenvalues()
    scale = 1.0 + float(np.max(np.abs(ev)))
    return {
        "estimate": label,
        "index": i,
        "min_eig": float(ev[0]),
        "scale": scale,
        "passed": bool(ev[0] >= -cfg.tolerance * scale),
        "adversarial": adversarial,
        "Z": _as_list(Z),
        "theta": _as_list(g.angles.theta),
    }


def _verify_chunk(task):
    label, cfg, a, b = task
    return [verify_sample(label, cfg, i) for i in range(a, b)]


def _summary(label, records):
    worst = min(records, key=lambda r: r["min_eig"])
    adv = [r["min_eig"] for r in records if r["adversarial"]]
    out = {
        "estimate": label,
        "passed": sum(r["passed"] for r in records),
        "failed": sum(not r["passed"] for r in records),
        "min_eig": worst["min_eig"],
        "argmin": {"Z": worst["Z"], "theta": worst["theta"]},
    }
    out["sharp_min_eig"] = min(adv) if adv else None
    return out


def run_verify_hessians(cfg, workers=1):
    cfg.validate()
    labels, skipped = applicable_estimates(cfg)
    results, failures = [], []
    for label in labels:
        tasks = [(label, cfg, a, b) for a, b in _chunks(cfg.samples, workers)]
        records = [r for chunk in _map(_verify_chunk, tasks, workers) for r in chunk]
        records.sort(key=lambda r: r["index"])
        results.append(_summary(label, records))
        failures.extend(
            {k: r[k] for k in ("estimate", "index", "min_eig", "scale", "Z", "theta")}
            for r in records if not r["passed"]
        )
    meta = {"command": "verify-hessians", "p": min(cfg.n, cfg.m), "skipped": skipped}
    return {"config": cfg.echo(), "results": results, "failures": failures, "meta": meta}


# ---------------------------------------------------------------- convexity-boundary

BOUNDARY_TOL = 1e-12


def classify_convexity(angles, tol=1e-10):
    """Predicted vs observed convexity of v and u at ``angles``.

    ``region`` is ``"inside"``, ``"outside"`` or ``"boundary"`` (the largest
    pair of angles sums to pi/2 within ``BOUNDARY_TOL``). ``pd_v``/``pd_u``
    report whether the Hessian's smallest eigenvalue relative to the metric
    is positive beyond ``tol`` times its spectral scale.
    """
    th = np.sort(angles.theta)[::-1]
    if th.size >= 2 and abs(th[0] + th[1] - np.pi / 2) <= BOUNDARY_TOL:
        region = "boundary"
    else:
        region = "inside" if in_bjx(angles) else "outside"
    G = metric_gram(angles.diagonal_point())
    out = {"region": region}
    for name, jt in (("v", v_jet(angles)), ("u", u_jet(angles))):
        ev = gen_sym_eig(jt.hessian, G)
        out[f"min_eig_{name}"] = float(ev[0])
        out[f"pd_{name}"] = bool(ev[0] > tol * (1.0 + np.max(np.abs(ev))))
    return out


def boundary_sample(cfg, i):
    rng = sample_rng(cfg.seed, 100, i)
    if min(cfg.n, cfg.m) < 2:
        angles = JordanAngles.from_theta([rng.uniform(0.0, np.pi / 2 - 0.05)], cfg.n, cfg.m)
    else:
        angles = straddling_angles(rng, cfg.n, cfg.m, cfg.margin, inside=(i % 2 == 0))
    rec = classify_convexity(angles)
    rec.update(index=i, theta=_as_list(angles.theta), Z=_as_list(angles.diagonal_point()))
    return rec


def _boundary_chunk(task):
    cfg, a, b = task
    return [boundary_sample(cfg, i) for i in range(a, b)]


def run_convexity_boundary(cfg, workers=1):
    cfg.validate()
    tasks = [(cfg, a, b) for a, b in _chunks(cfg.samples, workers)]
    records = [r for chunk in _map(_boundary_chunk, tasks, workers) for r in chunk]
    records.sort(key=lambda r: r["index"])
    results, failures = [], []
    for name in ("v", "u"):
        judged = [r for r in records if r["region"] != "boundary"]
        agree = [r for r in judged if r[f"pd_{name}"] == (r["region"] == "inside")]
        inside = [r for r in judged if r["region"] == "inside"]
        worst = min(inside, key=lambda r: r[f"min_eig_{name}"]) if inside else None
        outside = [r[f"min_eig_{name}"] for r in judged if r["region"] == "outside"]
        results.append({
            "estimate": f"hess_{name}",
            "passed": len(agree),
            "failed": len(judged) - len(agree),
            "min_eig": worst[f"min_eig_{name}"] if worst else None,
            "argmin": {"Z": worst["Z"], "theta": worst["theta"]} if worst else None,
            "boundary": len(records) - len(judged),
            "max_min_eig_outside": max(outside) if outside else None,
        })
        failures.extend(
            {"estimate": f"hess_{name}", "index": r["index"], "region": r["region"],
             "min_eig": r[f"min_eig_{name}"], "theta": r["theta"]}
            for r in judged if r not in agree
        )
    meta = {"command": "convexity-boundary", "p": min(cfg.n, cfg.m)}
    return {"config": cfg.echo(), "results": results, "failures": failures, "meta": meta}


# ---------------------------------------------------------------- graph-check

def build_graph(kind, cfg):
    """Graph and sample points for ``kind`` (``file:<path>`` handled by the caller)."""
    rng = sample_rng(cfg.seed, 200, 0)
    if kind == "affine":
        C = rng.standard_normal((cfg.n, cfg.m))
        C *= np.sqrt(0.9 / np.sum(C * C))
        g = graphs.affine_graph(C)
        pts = [sample_rng(cfg.seed, 201, i).uniform(-1, 1, cfg.n) for i in range(cfg.samples)]
    elif kind == "holomorphic-pair":
        g = graphs.holomorphic_pair()
        pts = []
        for i in range(cfg.samples):
            r = sample_rng(cfg.seed, 202, i)
            pts.append(0.45 * np.sqrt(r.uniform()) * _unit(r, 2))
    elif kind == "lawson-osserman":
        g = graphs.lawson_osserman_graph()
        pts = [_unit(sample_rng(cfg.seed, 203, i), 4) for i in range(cfg.samples)]
    else:
        raise ConfigError(f"unknown graph kind {kind!r}; expected {GRAPH_KINDS} or file:<path>")
    return g, pts


def _unit(rng, k):
    x = rng.standard_normal(k)
    return x / np.linalg.norm(x)


def graph_point(graph, x, minimal, tol):
    j = graph(x)
    sff = graphs.second_fundamental_form(j)
    lhs, rhs = graphs.gauss_energy_identity(graph, x)
    resid = abs(lhs - rhs)
    rec = {
        "x": _as_list(x),
        "delta_f": graphs.delta_f(j),
        "lambda_f": graphs.lambda_f(j),
        "normB2": sff.normB2,
        "H_norm": sff.mean_curvature_norm,
        "energy_2e": lhs,
        "identity_residual": resid,
        "identity_ok": bool(resid <= IDENTITY_RTOL * abs(rhs) + 1e-12),
        "checks": {},
    }
    is_minimal = sff.mean_curvature_norm <= graphs.MINIMAL_TOL
    rec["minimal_ok"] = bool(is_minimal) if minimal else None
    for kind in H_ESTIMATES:
        if not is_minimal:
            rec["checks"][kind] = {"status": "not-minimal"}
            continue
        c = graphs.composed_laplacian_check(graph, x, kind, tol=tol)
        entry = {"status": c.status}
        if c.status != "out-of-domain":
            entry.update(laplacian=c.laplacian, bound=c.bound, margin=c.margin)
            if np.isfinite(c.laplacian_fd):
                fd_ok = abs(c.laplacian_fd - c.laplacian) <= LAPLACIAN_FD_RTOL * (1 + abs(c.laplacian))
                entry.update(laplacian_fd=c.laplacian_fd, laplacian_fd_ok=bool(fd_ok))
        else:
            entry["reason"] = c.reason
        rec["checks"][kind] = entry
    return rec


def run_graph_check(kind, cfg, graph=None, points=None):
    cfg.validate()
    if graph is None:
        graph, points = build_graph(kind, cfg)
    minimal = kind in GRAPH_KINDS
    records = [graph_point(graph, x, minimal, cfg.tolerance) for x in points]

    def summary(name, oks, extra=None):
        oks = [o for o in oks if o is not None]
        d = {"estimate": name, "passed": sum(oks), "failed": len(oks) - sum(oks),
             "min_eig": None, "argmin": None}
        d.update(extra or {})
        return d

    results = [summary("energy_identity", [r["identity_ok"] for r in records],
                       {"max_residual": max(r["identity_residual"] for r in records)})]
    if minimal:
        results.append(summary("minimality", [r["minimal_ok"] for r in records],
                               {"max_H_norm": max(r["H_norm"] for r in records)}))
    for h in H_ESTIMATES:
        checks = [r["checks"][h] for r in records]
        judged = [c for c in checks if c["status"] in ("pass", "fail")]
        margins = [c["margin"] for c in judged]
        fd = [c["laplacian_fd_ok"] for c in judged if "laplacian_fd_ok" in c]
        results.append(summary(h, [c["status"] == "pass" for c in judged], {
            "out_of_domain": sum(c["status"] == "out-of-domain" for c in checks),
            "min_margin": min(margins) if margins else None,
            "laplacian_fd_failed": len(fd) - sum(fd),
        }))
    dfs = [r["delta_f"] for r in records]
    meta = {
        "command": "graph-check",
        "graph": kind,
        "n": graph.n,
        "m": graph.m,
        "delta_f_min": min(dfs),
        "delta_f_max": max(dfs),
        "lambda_f_max": max(r["lambda_f"] for r in records),
    }
    if kind == "lawson-osserman":
        spread = max(dfs) - min(dfs)
        results.append(summary("lo_delta_f_constant", [spread <= LO_SPREAD_TOL],
                               {"delta_f": dfs[0], "spread": spread}))
    failures = []
    for i, r in enumerate(records):
        bad = [h for h in H_ESTIMATES if r["checks"][h]["status"] == "fail"
               or r["checks"][h].get("laplacian_fd_ok") is False]
        if not r["identity_ok"]:
            bad.append("energy_identity")
        if r["minimal_ok"] is False:
            bad.append("minimality")
        if bad:
            failures.append({"index": i, "x": r["x"], "failed": bad})
    echo = cfg.echo()
    echo.update(n=graph.n, m=graph.m, graph=kind)
    echo.pop("estimates")
    return {"config": echo, "results": results, "failures": failures, "points": records,
            "meta": meta}


def total_failures(report):
    return sum(r["failed"] for r in report["results"])
