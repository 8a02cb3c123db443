"""Command-line front end: thresholds, predictions, numerical verification."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from . import galerkin as gk
from .errors import FriedrichsError, NumericalError, SpecError, ValidationError
from .mellin import BesselPQ, is_resonant, kernel_for_kind, normalize_kind, sigma_cs, sigma_l
from .predict import (CountResult, count_bes, count_d1, count_fr, count_total,
                      count_total_closed)

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_DISAGREE = 0, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    params: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"command": self.command, **self.params}


# ------------------------------------------------------------- parsing

def _float_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise SpecError(f"not a comma-separated list of numbers: {text!r}") from exc
    if not vals:
        raise SpecError("empty list", value=text)
    return vals


def _range(text: str) -> list[float]:
    """'a:b:n' (n points inclusive) or a comma list."""
    if ":" in str(text):
        parts = str(text).split(":")
        if len(parts) != 3:
            raise SpecError("range must be start:stop:count", value=text)
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise SpecError("range is empty", value=text)
        return [float(x) for x in np.linspace(a, b, n)]
    return _float_list(text)


def _read_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SpecError(f"config line {lineno} is not key=value", path=path)
            key, val = line.split("=", 1)
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="file of key=value lines mirroring the flags")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=None)


def _add_kernel(p: argparse.ArgumentParser):
    p.add_argument("--kernel", default=None, help="cos | sin | bessel (needs --p, --q)")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--q", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="friedrichs",
        description="Thresholds and negative-eigenvalue counts for x^{2l} + gamma V.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sigma", help="coupling threshold sigma_l")
    _add_common(p)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--kind", default=None)
    p.add_argument("--l", type=float, default=None)
    _add_kernel(p)

    p = sub.add_parser("predict", help="closed-form negative-eigenvalue counts")
    _add_common(p)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--kind", default=None)
    p.add_argument("--l", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)

    p = sub.add_parser("verify", help="Galerkin refinement sweep")
    _add_common(p)
    _add_kernel(p)
    p.add_argument("--l", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--ladder", choices=("window", "doubling"), default=None)
    p.add_argument("--log-step", type=float, default=None)
    p.add_argument("--half-widths", default=None, help="comma list of window half-widths in ln x")
    p.add_argument("--x-min", type=float, default=None)
    p.add_argument("--x-max", type=float, default=None)
    p.add_argument("--cells0", type=int, default=None)
    p.add_argument("--levels", type=int, default=None)
    p.add_argument("--epsilons", default=None)
    p.add_argument("--shift", choices=("relative", "gram"), default=None)
    p.add_argument("--dump", default=None, help="write the finest shifted matrix as a binary dump")

    p = sub.add_parser("table", help="sigma and counts over an (l, gamma) grid")
    _add_common(p)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--kind", default=None)
    p.add_argument("--l-range", default=None, help="start:stop:count or comma list")
    p.add_argument("--gamma-range", default=None, help="start:stop:count or comma list")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("selfcheck", help="predictor-versus-numerics adjudication suite")
    _add_common(p)
    p.add_argument("--quick", action="store_true", default=None,
                   help="shorter ladder (three windows) for a fast run")
    return parser


_DEFAULTS = {
    "format": "json", "d": 1, "kind": "cosine", "kernel": "cos", "ladder": "window",
    "log_step": gk.DEFAULT_LOG_STEP,
    "half_widths": ",".join(str(t) for t in gk.DEFAULT_HALF_WIDTHS),
    "x_min": 1e-5, "x_max": 50.0, "cells0": 64, "levels": 6,
    "epsilons": ",".join(str(e) for e in gk.DEFAULT_EPSILONS),
    "shift": "relative", "workers": 1, "quick": False,
}
_TYPES = {"d": int, "cells0": int, "levels": int, "workers": int, "l": float, "gamma": float,
          "p": float, "q": float, "log_step": float, "x_min": float, "x_max": float,
          "quick": lambda s: str(s).lower() in ("1", "true", "yes", "on")}


def _resolve(args: argparse.Namespace) -> dict[str, Any]:
    """Merge defaults < config file < explicit flags."""
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "command", "output")}
    merged: dict[str, Any] = {}
    file_vals = _read_config(args.config) if args.config else {}
    for key in flags:
        if flags[key] is not None:
            merged[key] = flags[key]
        elif key in file_vals:
            conv = _TYPES.get(key, str)
            try:
                merged[key] = conv(file_vals[key])
            except ValueError as exc:
                raise SpecError(f"bad value for {key} in config", value=file_vals[key]) from exc
        elif key in _DEFAULTS:
            merged[key] = _DEFAULTS[key]
        else:
            merged[key] = None
    unknown = set(file_vals) - set(flags) - {"output"}
    if unknown:
        raise SpecError("unknown config keys", keys=sorted(unknown))
    if args.output is None and "output" in file_vals:
        merged["output"] = file_vals["output"]
    else:
        merged["output"] = args.output
    return merged


def _require(cfg: dict, *keys: str):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise SpecError("missing required parameters", missing=missing)


def _kernel_from(cfg: dict) -> BesselPQ:
    name = str(cfg.get("kernel") or "cos").lower()
    if name in ("cos", "c", "cosine"):
        return kernel_for_kind("cosine")
    if name in ("sin", "s", "sine"):
        return kernel_for_kind("sine")
    if name == "bessel":
        _require(cfg, "p", "q")
        return BesselPQ(cfg["p"], cfg["q"])
    raise SpecError("kernel must be cos, sin or bessel", kernel=name)


def _count(c: CountResult | None):
    return None if c is None else c.to_json()


# ------------------------------------------------------------ commands

def cmd_sigma(cfg: dict) -> dict:
    _require(cfg, "l")
    l = cfg["l"]
    if cfg.get("p") is not None or str(cfg.get("kernel")).lower() == "bessel":
        kernel = _kernel_from({**cfg, "kernel": "bessel"})
        sig = sigma_l(kernel, l, on_resonance="zero")
        return {"sigma": sig, "resonant": is_resonant(kernel, l)}
    kind = normalize_kind(cfg["kind"])
    d = cfg["d"]
    sig = sigma_cs(d, l, kind, on_resonance="zero")
    return {"sigma": sig, "resonant": sig == 0.0}


def _predict_row(d: int, kind: str, l: float, gamma: float) -> dict:
    if d == 1:
        kernel = kernel_for_kind(kind)
        sig = sigma_cs(1, l, kind, on_resonance="zero")
        fr = count_fr(kernel.expansion_terms(l + 1.0), l, gamma,
                      sigma_l(kernel, l, on_resonance="zero"))
        bes = count_bes(kernel.p, kernel.q, l, gamma)
        main = count_d1(l, gamma, kind)
        closed = None
    else:
        sig = sigma_cs(d, l, kind, on_resonance="zero")
        bes = count_total(d, l, gamma, kind, "bes")
        fr = count_total(d, l, gamma, kind, "fr")
        main = bes
        closed = None
        if gamma != 0 and abs(gamma) <= sig:
            closed = count_total_closed(d, l, 1 if gamma > 0 else -1, kind)
    return {"sigma": sig, "resonant": sig == 0.0, "count": _count(main),
            "variant_fr": _count(fr), "variant_bes": _count(bes),
            "count_total_closed": _count(closed)}


def cmd_predict(cfg: dict) -> dict:
    _require(cfg, "l", "gamma")
    if cfg["d"] < 1:
        raise SpecError("d must be >= 1", d=cfg["d"])
    return _predict_row(cfg["d"], normalize_kind(cfg["kind"]), cfg["l"], cfg["gamma"])


def _ladder(cfg: dict) -> list[gk.GridSpec]:
    if cfg["ladder"] == "doubling":
        return gk.doubling_ladder(cfg["x_min"], cfg["x_max"], cfg["cells0"], cfg["levels"])
    return gk.window_ladder(_float_list(cfg["half_widths"]), cfg["log_step"])


def _adjudicate(kernel: BesselPQ, l: float, gamma: float, report: gk.GalerkinReport) -> dict:
    sig = sigma_l(kernel, l, on_resonance="zero")
    preds = {
        "count_fr": count_fr(kernel.expansion_terms(l + 1.0), l, gamma, sig),
        "count_bes": count_bes(kernel.p, kernel.q, l, gamma, sig),
    }
    numeric = report.as_result()
    matches, contradicts = [], []
    if numeric is not None:
        for name, c in preds.items():
            (matches if c == CountResult(numeric.count) else contradicts).append(name)
    return {"predictions": {k: v.to_json() for k, v in preds.items()},
            "matches": matches, "contradicts": contradicts}


def run_verify(kernel: BesselPQ, l: float, gamma: float, specs, epsilons, shift: str,
               dump: str | None = None) -> dict:
    report = gk.refinement_verdict(specs, kernel, l, gamma, epsilons, shift)
    out = {"kernel": {"p": kernel.p, "q": kernel.q}, **report.to_dict(),
           "count": None if report.count is None else report.count}
    out.update(_adjudicate(kernel, l, gamma, report))
    if dump:
        forms = gk.assemble_forms(specs[-1], kernel, l)
        gk.dump_matrix(dump, gk._shifted(forms, gamma, min(epsilons), shift))
    return out


def cmd_verify(cfg: dict) -> dict:
    _require(cfg, "l", "gamma")
    return run_verify(_kernel_from(cfg), cfg["l"], cfg["gamma"], _ladder(cfg),
                      _float_list(cfg["epsilons"]), cfg["shift"], cfg.get("dump"))


def _table_cell(args) -> dict:
    d, kind, l, g = args
    row = {"l": l, "gamma": g}
    pred = _predict_row(d, kind, l, g)
    row.update(sigma=pred["sigma"], resonant=pred["resonant"], count=pred["count"],
               count_fr=pred["variant_fr"], count_bes=pred["variant_bes"],
               count_total_closed=pred["count_total_closed"])
    return row


def cmd_table(cfg: dict) -> dict:
    _require(cfg, "l_range", "gamma_range")
    ls, gs = _range(cfg["l_range"]), _range(cfg["gamma_range"])
    kind = normalize_kind(cfg["kind"])
    d = cfg["d"]
    if d < 1:
        raise SpecError("d must be >= 1", d=d)
    if any(not l > 0 for l in ls):
        raise SpecError("l values must be positive")
    cells = [(d, kind, l, g) for l in ls for g in gs]
    workers = max(1, int(cfg.get("workers") or 1))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_table_cell, cells))
    else:
        rows = [_table_cell(c) for c in cells]
    return {"rows": rows}


SELFCHECK_CASES = (
    ("cosine l=1 gamma=-0.25", -0.5, 0.5, 1.0, -0.25),
    ("cosine l=1 gamma=+0.25", -0.5, 0.5, 1.0, 0.25),
    ("cosine l=3 gamma=-0.45", -0.5, 0.5, 3.0, -0.45),
)


def cmd_selfcheck(cfg: dict) -> tuple[dict, int]:
    widths = gk.DEFAULT_HALF_WIDTHS[:3] if cfg.get("quick") else gk.DEFAULT_HALF_WIDTHS
    specs = gk.window_ladder(widths, gk.DEFAULT_LOG_STEP)
    checks, disagreements = [], []
    for name, p, q, l, g in SELFCHECK_CASES:
        res = run_verify(BesselPQ(p, q), l, g, specs, gk.DEFAULT_EPSILONS, "relative")
        entry = {"case": name, "verdict": res["verdict"], "numerical_count": res["count"],
                 "predictions": res["predictions"], "matches": res["matches"],
                 "contradicts": res["contradicts"], "monotone": res["monotone"],
                 "eigensolve_agrees": res["eigensolve_agrees"]}
        checks.append(entry)
        if res["contradicts"]:
            disagreements.append({
                "case": name, "numerical_count": res["count"],
                "contradicted_predictors": res["contradicts"],
                "supported_predictors": res["matches"],
                "message": (f"numerics give {res['count']} negative eigenvalues; "
                            f"contradicts {', '.join(res['contradicts'])}"),
            })
    status = "disagreement" if disagreements else "agree"
    return ({"status": status, "checks": checks, "disagreements": disagreements},
            EXIT_DISAGREE if disagreements else EXIT_OK)


# --------------------------------------------------------------- output

def _jsonable(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "infinite" if obj > 0 else "-infinite"
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return _jsonable(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _flatten(prefix: str, obj, out: dict):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}{k}." if prefix or True else k, v, out) if isinstance(v, dict) \
                else out.__setitem__(f"{prefix}{k}", v if not isinstance(v, list) else json.dumps(v, sort_keys=True))
    else:
        out[prefix.rstrip(".")] = obj


def render(report: dict, fmt: str) -> str:
    report = _jsonable(report)
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    config = report.get("config", {})
    if "rows" in report and isinstance(report["rows"], list) and report["rows"]:
        rows = report["rows"]
    else:
        flat: dict = {}
        _flatten("", {k: v for k, v in report.items() if k != "config"}, flat)
        rows = [flat]
    keys = sorted({k for r in rows for k in r})
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in keys})
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run_command(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_VALIDATION
    cfg: dict = {}
    try:
        cfg = _resolve(args)
        handlers = {"sigma": cmd_sigma, "predict": cmd_predict, "verify": cmd_verify,
                    "table": cmd_table}
        code = EXIT_OK
        if args.command == "selfcheck":
            body, code = cmd_selfcheck(cfg)
        else:
            body = handlers[args.command](cfg)
        config = RunConfig(args.command, {k: v for k, v in sorted(cfg.items())})
        report = {"command": args.command, "config": config.to_dict(), **body}
        _emit(render(report, cfg["format"]), cfg.get("output"))
        return code
    except ValidationError as exc:
        _report_error(args.command, exc, cfg)
        return EXIT_VALIDATION
    except (NumericalError, OverflowError) as exc:
        _report_error(args.command, exc, cfg)
        return EXIT_NUMERICAL
    except OSError as exc:
        _report_error(args.command, exc, cfg)
        return EXIT_VALIDATION


def _report_error(command: str, exc: Exception, cfg: dict):
    payload = {"command": command, "error": type(exc).__name__, "message": str(exc),
               "params": _jsonable({k: repr(v) if not isinstance(v, (int, float, str, type(None)))
                                    else v for k, v in getattr(exc, "params", {}).items()}),
               "config": _jsonable(cfg)}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
