"""Batch front end: ``rifourier {norm,transform-weight,check,verify-fourier}``.

Every command reads a YAML config, runs its items (optionally in worker
processes), and writes a JSON report plus one CSV table per item.  Wall-clock
times go to a separate ``<out>.timing.json`` so the report itself is
byte-identical across runs with the same config and seed.

Exit codes: 0 all verdicts hold or complete, 1 any item fails, 2 config
error, 3 quadrature non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .conditions import (check_dilation_integral, check_fundamental_suffix_sup,
                         check_gamma_eq_lambda, check_gamma_fourier_conditions, check_interp_L2,
                         estimate_indices, log_grid)
from .config import (ConfigError, build_family, build_norm, build_nfunction, build_quad,
                     build_steps, build_weight, config_digest, load_config)
from .fourier import reverse_constant, verify_jt, verify_norm_pair, verify_reverse
from .funcore import QuadratureError, cumulative_from_zero
from .norms import norm
from .orlicz import ratio_monotone
from .weights import (Weight, admissible, down_dual_weight, fourier_range_weight, level_weight,
                      reflect_weight)

log = logging.getLogger("rifourier")

EXIT_OK, EXIT_FAILS, EXIT_CONFIG, EXIT_NONCONV = 0, 1, 2, 3
JOBS_ENV = "RIFOURIER_JOBS"

CSV_COLUMNS = {
    "norm": "input, value, error_bound",
    "transform-weight": "t, value[, closed_form][, primitive, bracket, rel_diff]",
    "check": "t plus the sampled ratio (or dilation norm) of the criterion",
    "verify-fourier": "t, lhs, rhs, band, ratio per sample; sample, ratio, ratio_upper, "
                      "running_max for norm pairs",
}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def _slug(s: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", s).strip("_") or "item"


def _grid(cfg_grid, default):
    if not cfg_grid:
        return default
    return log_grid(cfg_grid.get("lo", 1e-8), cfg_grid.get("hi", 1e8),
                    cfg_grid.get("per_decade", 10))


def _per_decade(cfg_grid, default=10):
    return (cfg_grid or {}).get("per_decade", default)


# ------------------------------------------------------------ item runners
# Each runner returns (entry, tables, status) with status in
# {"ok", "fails"}; tables maps a suffix to (header, rows).

def _norm_item(cfg, i, q):
    spec_cfg = cfg["norms"][i]
    spec = build_norm(spec_cfg)
    fine = type(q)(q.rel_tol * 1e-2, q.abs_tol, q.max_panels)
    rows, values = [], []
    for label, f in build_steps(cfg):
        v = norm(spec, f, fine)
        coarse = norm(spec, f, q)
        err = abs(v - coarse) if math.isfinite(v) else math.inf
        err = max(err, fine.rel_tol * abs(v)) if math.isfinite(v) else err
        rows.append([label, v, err])
        values.append({"input": label, "value": v, "error_bound": err})
    entry = {"kind": "norm", "name": spec_cfg.get("name", f"norm{i}"), "spec": spec_cfg,
             "results": values}
    return entry, {"": (["input", "value", "error_bound"], rows)}, "ok"


def _transform_item(cfg, i, q):
    tc = cfg["transforms"][i]
    u = build_weight(tc["weight"])
    p = float(tc["p"])
    t = _grid(cfg.get("grid"), log_grid(1e-4, 1e4, 4))
    op = tc["op"]
    notes = []
    extra = {}
    if op == "reflect":
        w = reflect_weight(u, p)
        vals, closed = w(t), None
    else:
        maker = {"down_dual": down_dual_weight, "level": level_weight,
                 "fourier_range": fourier_range_weight}[op]
        w = maker(u, p, q)
        vals = w(t)
        closed = w.closed_form(t) if isinstance(w.closed_form, Weight) else None
        if op == "level":
            # primitive of the level weight equals the Gamma bracket
            prim = (w.closed_form.primitive(t, q) if isinstance(w.closed_form, Weight)
                    else cumulative_from_zero(w, t, q))
            bracket = u.primitive(t, q) + t ** p * u.tail(t, p, q)
            extra = {"primitive": prim, "bracket": bracket,
                     "rel_diff": np.abs(prim - bracket) / np.abs(bracket)}
    flags = [k for k, v in {"nonfinite": ~np.isfinite(vals), "negative": vals < 0}.items()
             if np.any(v)]
    header = ["t", "value"]
    cols = [t, vals]
    if closed is not None:
        header.append("closed_form")
        cols.append(closed)
        notes.append("closed form available")
    for k, v in extra.items():
        header.append(k)
        cols.append(v)
    entry = {"kind": "transform", "name": tc.get("name", f"{op}{i}"), "op": op, "p": p,
             "weight": u.to_records(), "points": int(t.size), "flags": flags, "notes": notes}
    if closed is not None:
        entry["max_rel_diff_closed_form"] = float(np.max(np.abs(vals - closed) / np.abs(closed)))
    if extra:
        entry["max_rel_diff_identity"] = float(np.max(extra["rel_diff"]))
    rows = np.column_stack(cols).tolist()
    return entry, {"": (header, rows)}, "fails" if flags else "ok"


def _series_table(rep):
    if not rep.series:
        return None
    keys = list(rep.series)
    return keys, np.column_stack([np.asarray(rep.series[k], dtype=float)
                                  for k in keys]).tolist()


def _check_weights(cc):
    if "alphas" in cc:
        return [(f"alpha={a:g}", Weight.power(float(a))) for a in cc["alphas"]]
    if "weight" in cc:
        return [("weight", build_weight(cc["weight"]))]
    raise ConfigError(f"criterion '{cc['criterion']}' needs 'weight' or 'alphas'")


def _need(cc, *keys):
    for k in keys:
        if k not in cc:
            raise ConfigError(f"criterion '{cc['criterion']}' needs '{k}'")


def _check_item(cfg, i, q):
    cc = cfg["checks"][i]
    crit = cc["criterion"]
    name = cc.get("name", f"{crit}{i}")
    pd = _per_decade(cc.get("grid"))
    t = _grid(cc.get("grid"), None)
    tables, results = {}, []

    def run_report(label, fn):
        try:
            rep = fn()
        except ValueError as exc:
            results.append({"label": label, "criterion": crit, "verdict": "fails",
                            "notes": [f"hypothesis violated: {exc}"]})
            return
        d = rep.to_dict()
        d["label"] = label
        results.append(d)
        tab = _series_table(rep)
        if tab:
            tables[_slug(label)] = tab

    if crit in ("gamma_lambda_equivalence", "l2_linf_interpolation", "fundamental_suffix_sup"):
        _need(cc, "p")
        p = float(cc["p"])
        for label, u in _check_weights(cc):
            if crit == "gamma_lambda_equivalence":
                e = float(cc.get("exponent", p))
                run_report(label, lambda u=u, e=e: check_gamma_eq_lambda(e, u, q, t, pd))
            elif crit == "l2_linf_interpolation":
                run_report(label, lambda u=u: check_interp_L2(p, u, q, t, pd))
            else:
                run_report(label, lambda u=u: check_fundamental_suffix_sup(p, u, q, t, pd))
    elif crit in ("gamma_fourier_conditions", "dilation_integral"):
        _need(cc, "p", "q", "u", "v")
        p, qe = float(cc["p"]), float(cc["q"])
        u, v = build_weight(cc["u"]), build_weight(cc["v"])
        if crit == "gamma_fourier_conditions":
            x = _grid(cc.get("grid"), None)
            run_report("pair", lambda: check_gamma_fourier_conditions(
                p, qe, u, v, q, x, _per_decade(cc.get("grid"), 5)))
        else:
            run_report("pair", lambda: check_dilation_integral(qe, v, p, u, q))
    elif crit == "indices":
        _need(cc, "norm")
        idx = estimate_indices(build_norm(cc["norm"]), q)
        results.append({"label": "norm", "criterion": "fundamental_indices",
                        "verdict": "complete", **idx.to_dict()})
    elif crit == "orlicz_monotonicity":
        _need(cc, "phi", "p", "direction")
        phi = build_nfunction(cc["phi"])
        ok = ratio_monotone(phi, float(cc["p"]), cc["direction"], t)
        results.append({"label": "phi", "criterion": "orlicz_power_ratio_monotone",
                        "verdict": "holds" if ok else "fails",
                        "direction": cc["direction"], "exponent": float(cc["p"])})
    else:  # admissible
        _need(cc, "p")
        for label, u in _check_weights(cc):
            cv = admissible(u, float(cc["p"]))
            results.append({"label": label, "criterion": "weight_admissible",
                            "verdict": "holds" if cv.ok else "fails",
                            "at_zero": cv.at_zero, "at_infinity": cv.at_infinity,
                            "decided_by": cv.decided_by})
    status = "fails" if any(r["verdict"] == "fails" for r in results) else "ok"
    entry = {"kind": "check", "name": name, "criterion": crit, "results": results}
    return entry, tables, status


def _fourier_item(cfg, i, q):
    rc = cfg["runs"][i]
    kind = rc["kind"]
    fam = build_family(cfg)
    win = cfg.get("window", {})
    xi_max, ns = win.get("xi_max"), win.get("n_samples", 2 ** 16)
    name = rc.get("name", f"{kind}{i}")
    tables = {}
    status = "ok"
    if kind == "norm_pair":
        _need({"criterion": kind, **rc}, "rho", "sigma")
        rep = verify_norm_pair(build_norm(rc["rho"]), build_norm(rc["sigma"]), fam, xi_max, ns)
        v = rep.values
        if "ratio" in v:
            tables[""] = (["sample", "ratio", "ratio_upper", "running_max"],
                          np.column_stack([v["sample"], v["ratio"], v["ratio_upper"],
                                           v["running_max"]]).tolist())
        entry = {"kind": "verify", "name": name, **rep.to_dict(), "family_size": len(fam)}
        return entry, tables, status
    fn = verify_jt if kind == "jt" else verify_reverse
    t = _grid(rc.get("t_grid"), None)
    reps = [fn(f, t, xi_max, ns) for f in fam]
    consts = np.array([r.constant for r in reps])
    uppers = np.array([r.constant_upper for r in reps])
    k = int(np.argmax(consts))
    for j, r in enumerate(reps):
        v = r.values
        tables[f"sample{j}"] = (["t", "lhs", "rhs", "band", "ratio"],
                                np.column_stack([v["t"], v["lhs"], v["rhs"], v["band"],
                                                 v["ratio"]]).tolist())
    entry = {"kind": "verify", "name": name, "criterion": reps[k].criterion,
             "n": reps[k].n, "family_size": len(fam), "constant": float(consts[k]),
             "constant_upper": float(uppers.max()), "worst_sample": k,
             "witness": reps[k].witness, "median_constant": float(np.median(consts)),
             "samples": [{"sample": j, "constant": r.constant,
                          "constant_upper": r.constant_upper, "witness": r.witness}
                         for j, r in enumerate(reps)]}
    if kind == "reverse":
        bound = reverse_constant(reps[k].n)
        entry["explicit_constant"] = bound
        entry["constant_lower"] = max(r.values["constant_lower"] for r in reps)
        if entry["constant_lower"] > bound:
            status = "fails"
    return entry, tables, status


RUNNERS = {"norm": ("norms", _norm_item), "transform-weight": ("transforms", _transform_item),
           "check": ("checks", _check_item), "verify-fourier": ("runs", _fourier_item)}


def _item_name(command, cfg, i):
    item = cfg[RUNNERS[command][0]][i]
    return item.get("name", f"item{i}") if isinstance(item, dict) else f"item{i}"


def _run_one(args):
    """Worker entry point; returns a picklable outcome."""
    command, cfg, i, tol = args
    start = time.perf_counter()
    try:
        q = build_quad(cfg, tol)
        entry, tables, status = RUNNERS[command][1](cfg, i, q)
    except ConfigError as exc:
        return i, None, {}, "config", str(exc), time.perf_counter() - start
    except QuadratureError as exc:
        return i, None, {}, "nonconvergent", str(exc), time.perf_counter() - start
    except ValueError as exc:
        entry = {"name": _item_name(command, cfg, i), "error": str(exc)}
        return i, entry, {}, "fails", None, time.perf_counter() - start
    return i, _jsonable(entry), tables, status, None, time.perf_counter() - start


def _default_jobs():
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def run(command: str, config_path, out_path, seed=None, tol=None, jobs=None) -> int:
    """Execute one subcommand; returns the process exit code."""
    try:
        cfg = load_config(config_path, command, seed)
        build_quad(cfg, tol)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    jobs = _default_jobs() if jobs is None else max(1, jobs)
    key = RUNNERS[command][0]
    tasks = [(command, cfg, i, tol) for i in range(len(cfg[key]))]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_one, tasks))
    else:
        outcomes = [_run_one(t) for t in tasks]

    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    items, timing, code = [], [], EXIT_OK
    for i, entry, tables, status, err, elapsed in outcomes:
        label = entry["name"] if entry else _item_name(command, cfg, i)
        timing.append({"index": i, "name": label, "seconds": elapsed})
        if status == "config":
            log.error("item %d: %s", i, err)
            return EXIT_CONFIG
        if status == "nonconvergent":
            log.error("item %d: %s", i, err)
            items.append({"index": i, "name": label, "status": "nonconvergent", "error": err})
            code = EXIT_NONCONV
            continue
        files = []
        for suffix, (header, rows) in tables.items():
            fname = f"{out.stem}.{_slug(label)}" + (f".{suffix}" if suffix else "") + ".csv"
            with open(out.parent / fname, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                w.writerows([[_fmt(x) for x in row] for row in rows])
            files.append(fname)
        entry.update(index=i, status=status, tables=files)
        items.append(entry)
        if status == "fails" and code == EXIT_OK:
            code = EXIT_FAILS

    report = {"tool": "rifourier", "version": __version__, "command": command,
              "config_sha256": config_digest(cfg), "seed": cfg.get("seed"),
              "quadrature": _jsonable(vars(build_quad(cfg, tol))),
              "csv_columns": CSV_COLUMNS[command], "items": items}
    out.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    sidecar = out.with_name(out.name + ".timing.json")
    sidecar.write_text(json.dumps({"jobs": jobs, "items": timing}, indent=2) + "\n",
                       encoding="utf-8")
    log.info("wrote %s (exit %d)", out, code)
    return code


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rifourier",
                                 description="Rearrangement-invariant norms, weight "
                                             "transforms, inequality checks and Fourier "
                                             "verification batteries.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {"norm": "evaluate norms on step-function inputs",
             "transform-weight": "tabulate derived weights on a grid",
             "check": "run weighted inequality criteria",
             "verify-fourier": "run Fourier inequality batteries over a family"}
    for name, h in helps.items():
        p = sub.add_parser(name, help=h)
        p.add_argument("--config", required=True, help="YAML config file")
        p.add_argument("--out", required=True, help="JSON report path; CSVs go alongside")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--tol", type=float, default=None, help="relative quadrature tolerance")
        p.add_argument("--jobs", type=int, default=None,
                       help=f"worker processes (default ${JOBS_ENV} or 1)")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(args.command, args.config, args.out, args.seed, args.tol, args.jobs)


if __name__ == "__main__":
    sys.exit(main())
