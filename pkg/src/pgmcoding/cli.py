"""Command-line front end.

Every command writes one report to standard output, as JSON with the fields
``protocol``, ``inputs_digest``, ``values`` and ``diagnostics``, or as CSV
with a header row.  Diagnostics go to standard error.  Exit codes: 0 success,
1 usage error, 2 validation or parse error, 3 property-check failure,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import bounds, discrimination, divergences, simulate
from .checks import BATTERIES
from .errors import NumericalFailure, ParseError, ValidationError
from .models import (
    CQChannel,
    DensityOperator,
    KrausChannel,
    Precoder,
    build_cq_joint,
    cq_source,
    parse_model,
)

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_PROPERTY, EXIT_NUMERICAL = 0, 1, 2, 3, 4
LN2 = math.log(2)


class UsageError(Exception):
    """Bad command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class Report:
    """Command result before formatting.

    ``log_keys`` name the values measured in nats (``log2_keys`` in nats
    squared); ``--bits`` rescales only those.  ``rows`` overrides the single
    CSV row built from ``values``.
    """

    protocol: str
    inputs_digest: str
    values: dict[str, Any]
    diagnostics: dict[str, Any] = field(default_factory=dict)
    rows: list[dict[str, Any]] | None = None
    log_keys: frozenset[str] = frozenset()
    log2_keys: frozenset[str] = frozenset()
    failed: bool = False


# ---------------------------------------------------------------- argument types

def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return v


def _shape(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated dimensions, got {text!r}") from None
    if not dims or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"dimensions must be positive, got {text!r}")
    return dims


# ---------------------------------------------------------------- model loading

def _load(path: str | None, kind: type, flag: str):
    if path is None:
        raise UsageError(f"{flag} is required")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    model = parse_model(text)
    if not isinstance(model, kind):
        raise ParseError(f"{path}: expected a {kind.__name__} model, got {type(model).__name__}")
    return model


def _channel(args) -> CQChannel:
    return _load(args.model, CQChannel, "--model")


def _density(path, flag) -> np.ndarray:
    return _load(path, DensityOperator, flag).matrix


def _require(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


# ---------------------------------------------------------------- bound / simulate

def _bound_values(rep: bounds.BoundReport, suffix: str = "", strengthened: bool = False) -> dict:
    out = {f"bound{suffix}": rep.bound, f"effective{suffix}": rep.effective}
    if strengthened and rep.strengthened_bound is not None:
        out[f"strengthened_bound{suffix}"] = rep.strengthened_bound
    return out


def _bound_row(rep: bounds.BoundReport, strengthened: bool) -> dict:
    row = {"protocol": rep.protocol, "bound": rep.bound, "effective": rep.effective}
    if strengthened:
        row["strengthened_bound"] = rep.strengthened_bound if rep.strengthened_bound is not None else ""
    return row


def _diag(rep: bounds.BoundReport) -> dict:
    return {"trivial": rep.diagnostics.get("trivial"),
            "max_relative_entropy": rep.diagnostics.get("max_relative_entropy"),
            "components": rep.diagnostics.get("components", {})}


def _bound_reports(args) -> list[bounds.BoundReport]:
    p = args.protocol
    if p == "cq":
        return [bounds.cq_bound(_channel(args), _require(args.messages, "--messages"))]
    if p == "cqsw":
        return [bounds.cqsw_bound(cq_source(_channel(args)), _require(args.messages, "--messages"))]
    if p == "packing":
        return [bounds.packing_bound(_density(args.model, "--model"), _require(args.shape, "--shape"),
                                     _density(args.tau, "--tau"), _require(args.messages, "--messages"))]
    if p == "ea":
        kraus = _load(args.channel, KrausChannel, "--channel")
        return [bounds.ea_bound(kraus, _density(args.model, "--model"), _require(args.shape, "--shape"),
                                _require(args.messages, "--messages"))]
    if p == "mac":
        return [bounds.mac_bound(_channel(args), _require(args.ma, "--ma"), _require(args.mb, "--mb"))]
    if p == "broadcast":
        pre = _load(args.precoder, Precoder, "--precoder")
        return list(bounds.broadcast_bounds(_channel(args), _require(args.shape, "--shape"), pre,
                                            _require(args.mb, "--mb"), _require(args.mc, "--mc")))
    pre = _load(args.precoder, Precoder, "--precoder")
    return [bounds.state_info_bound(_channel(args), pre, _require(args.messages, "--messages"))]


def cmd_bound(args) -> Report:
    reps = _bound_reports(args)
    if len(reps) == 1:
        rep = reps[0]
        return Report(rep.protocol, rep.inputs_digest, _bound_values(rep, "", args.strengthened),
                      _diag(rep), [_bound_row(rep, args.strengthened)])
    values, diags = {}, {}
    for rep in reps:
        tag = rep.protocol.rsplit("-", 1)[-1]
        values.update(_bound_values(rep, f"_{tag}", args.strengthened))
        diags[tag] = _diag(rep)
    return Report(args.protocol, reps[0].inputs_digest, values, diags,
                  [_bound_row(r, args.strengthened) for r in reps])


def _sim_values(res: simulate.SimulationResult, suffix: str = "") -> dict:
    return {f"mean_error{suffix}": res.mean_error, f"std_error{suffix}": res.std_error,
            f"bound{suffix}": res.bound_checked, f"certified{suffix}": res.certified}


def _simulations(args) -> list[simulate.SimulationResult]:
    p, mc = args.protocol, args.mode == "mc"
    if mc and args.seed is None:
        raise UsageError("--seed is required in mc mode")
    if mc and p == "packing":
        raise UsageError("packing simulation supports --mode exact only")
    run = dict(trials=args.trials, seed=args.seed, threads=args.threads) if mc else dict(cap=args.cap)
    if p == "cq":
        fn = simulate.cq_random_coding_mc if mc else simulate.cq_random_coding_exact
        return [fn(_channel(args), _require(args.messages, "--messages"), **run)]
    if p == "cqsw":
        fn = simulate.cqsw_mc if mc else simulate.cqsw_exact
        return [fn(cq_source(_channel(args)), _require(args.messages, "--messages"), **run)]
    if p == "packing":
        return [simulate.packing_exact(_density(args.model, "--model"), _require(args.shape, "--shape"),
                                       _density(args.tau, "--tau"), _require(args.messages, "--messages"))]
    if p == "mac":
        fn = simulate.mac_mc if mc else simulate.mac_exact
        return [fn(_channel(args), _require(args.ma, "--ma"), _require(args.mb, "--mb"), **run)]
    if p == "broadcast":
        fn = simulate.broadcast_mc if mc else simulate.broadcast_exact
        pre = _load(args.precoder, Precoder, "--precoder")
        return list(fn(_channel(args), _require(args.shape, "--shape"), pre,
                       _require(args.mb, "--mb"), _require(args.mc, "--mc"), **run))
    fn = simulate.state_info_mc if mc else simulate.state_info_exact
    pre = _load(args.precoder, Precoder, "--precoder")
    return [fn(_channel(args), pre, _require(args.messages, "--messages"), **run)]


def cmd_simulate(args) -> Report:
    results = _simulations(args)
    suffixes = [""] if len(results) == 1 else ["_B", "_C"]
    values: dict[str, Any] = {}
    rows = []
    for res, sfx in zip(results, suffixes):
        values.update(_sim_values(res, sfx))
        rows.append({"receiver": sfx.lstrip("_") or args.protocol, **_sim_values(res)})
    r0 = results[0]
    diag = {"mode": r0.mode, "trials": r0.trials, "seed": r0.seed}
    digest = bounds.inputs_digest("simulate", args.protocol, _file_bytes(args), args.messages,
                                  args.ma, args.mb, args.mc, args.shape, args.mode, args.trials, args.seed)
    return Report(args.protocol, digest, values, diag, rows)


def _file_bytes(args) -> tuple[str, ...]:
    out = []
    for name in ("model", "tau", "channel", "precoder"):
        path = getattr(args, name, None)
        if path is not None:
            with open(path, encoding="utf-8") as fh:
                out.append(fh.read())
    return tuple(out)


# ---------------------------------------------------------------- rates and exponents

def cmd_rate(args) -> Report:
    rep = bounds.cq_rate(_channel(args), args.eps, args.delta)
    values = {"ours": rep.ours, "hayashi_nagaoka": rep.hayashi_nagaoka, "beigi_gohari": rep.beigi_gohari,
              "effective": rep.effective}
    diag = {"ht_divergence": rep.ht_divergence, "is_divergence": rep.is_divergence,
            "eps": rep.eps, "delta": rep.delta}
    return Report("rate", rep.inputs_digest, values, diag,
                  log_keys=frozenset({"ours", "hayashi_nagaoka", "beigi_gohari", "effective",
                                      "ht_divergence", "is_divergence"}))


def cmd_exponent(args) -> Report:
    ch = _channel(args)
    if args.source:
        rep = bounds.cq_exponent_cqsw(cq_source(ch), args.rate, args.grid_steps)
    else:
        rep = bounds.cq_exponent(ch, args.rate, args.grid_steps)
    values = {"rate": rep.rate, "exponent": rep.exponent, "best_alpha": rep.best_alpha,
              "information": rep.information, "positive": rep.positive}
    rows = [{"alpha": a, "integrand": v} for a, v in rep.grid]
    return Report("cqsw-exponent" if args.source else "cq-exponent", rep.inputs_digest, values,
                  {"grid_steps": args.grid_steps}, rows,
                  log_keys=frozenset({"rate", "exponent", "information", "integrand"}))


def cmd_second_order(args) -> Report:
    if args.model is not None:
        state = build_cq_joint(_channel(args))
        info = divergences.cq_mutual_information(state)
        var = divergences.cq_information_variance(state)
    else:
        info, var = _require(args.info, "--model or --info"), _require(args.variance, "--variance")
    rate = bounds.second_order_rate(info, var, args.eps, args.n)
    return Report("second-order", bounds.inputs_digest("second-order", info, var, args.eps, args.n),
                  {"log_m": rate, "information": info, "variance": var},
                  {"eps": args.eps, "n": args.n, "quantile": divergences.inverse_normal_cdf(args.eps)},
                  log_keys=frozenset({"log_m", "information"}), log2_keys=frozenset({"variance"}))


# ---------------------------------------------------------------- divergences and testing

def cmd_divergence(args) -> Report:
    rho, sigma = _density(args.rho, "--rho"), _density(args.sigma, "--sigma")
    kind = args.kind
    if kind == "petz":
        d = divergences.petz_renyi(rho, sigma, _require(args.alpha, "--alpha"))
    elif kind == "kl":
        d = divergences.relative_entropy(rho, sigma)
    elif kind == "variance":
        d = divergences.relative_entropy_variance(rho, sigma)
    elif kind == "collision":
        d = divergences.collision_divergence(rho, sigma)
    elif kind == "max":
        d = divergences.max_relative_entropy(rho, sigma)
    elif kind == "ht":
        d = discrimination.ht_divergence(rho, sigma, _require(args.eps, "--eps"))
    else:
        d = discrimination.is_divergence(rho, sigma, _require(args.eps, "--eps"))
    digest = bounds.inputs_digest("divergence", kind, rho, sigma, args.alpha, args.eps)
    diag = {"kind": d.kind, "order": d.order, "infinite": d.infinite}
    log = frozenset() if kind == "variance" else frozenset({"value"})
    log2 = frozenset({"value"}) if kind == "variance" else frozenset()
    return Report(f"divergence-{kind}", digest, {"value": float(d)}, diag, log_keys=log, log2_keys=log2)


def cmd_hoeffding(args) -> Report:
    rho, sigma = _density(args.rho, "--rho"), _density(args.sigma, "--sigma")
    res = discrimination.hoeffding_pgm(rho, sigma, args.order, args.r)
    values = {"type1_bound": res.type1_bound, "type2_bound": res.type2_bound,
              "type1_actual": res.type1_actual, "type2_actual": res.type2_actual}
    return Report("hoeffding", bounds.inputs_digest("hoeffding", rho, sigma, args.order, args.r),
                  values, {"mu": res.mu, "order": args.order, "r": args.r})


# ---------------------------------------------------------------- property batteries

def cmd_check(args) -> Report:
    rep = BATTERIES[args.battery](args.dim, args.trials, args.seed)
    rows = [{"property": k, "worst_margin": v} for k, v in rep.margins.items()]
    status = "PASS" if rep.passed else "FAIL"
    print(f"{status} {rep.name} dim={rep.dim} trials={rep.trials} worst_margin={rep.worst_margin:.3e}",
          file=sys.stderr)
    return Report(rep.name, bounds.inputs_digest("check", rep.name, rep.dim, rep.trials, rep.seed),
                  {"passed": rep.passed, "worst_margin": rep.worst_margin, "margins": dict(rep.margins)},
                  {"dim": rep.dim, "trials": rep.trials, "seed": rep.seed, "tolerance": rep.tolerance},
                  rows, failed=not rep.passed)


# ---------------------------------------------------------------- output

def _scale(report: Report, bits: bool) -> Report:
    if not bits:
        return report

    def fix(d: dict) -> dict:
        out = {}
        for k, v in d.items():
            if isinstance(v, (int, float)) and not isinstance(v, bool):
                if k in report.log_keys:
                    v = v / LN2
                elif k in report.log2_keys:
                    v = v / LN2 ** 2
            out[k] = v
        return out

    rows = None if report.rows is None else [fix(r) for r in report.rows]
    return Report(report.protocol, report.inputs_digest, fix(report.values), fix(report.diagnostics),
                  rows, report.log_keys, report.log2_keys, report.failed)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            raise NumericalFailure("result is NaN")
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


def format_report(report: Report, fmt: str, bits: bool = False) -> str:
    report = _scale(report, bits)
    if fmt == "json":
        obj = {"protocol": report.protocol, "inputs_digest": report.inputs_digest,
               "values": report.values, "diagnostics": report.diagnostics}
        if bits:
            obj["units"] = "bits"
        return json.dumps(_jsonable(obj), indent=2) + "\n"
    rows = report.rows
    if rows is None:
        rows = [{k: v for k, v in report.values.items() if not isinstance(v, dict)}]
    rows = _jsonable(rows)
    buf = io.StringIO()
    header = list(dict.fromkeys(k for r in rows for k in r))
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--bits", action="store_true", help="display log-valued results in bits")
    common.add_argument("--output", metavar="FILE", help="write the report here instead of stdout")

    models = _Parser(add_help=False)
    models.add_argument("--model", metavar="FILE", help="channel, source or bipartite state model")
    models.add_argument("--messages", type=_positive_int, metavar="M")
    models.add_argument("--ma", type=_positive_int, metavar="M_A")
    models.add_argument("--mb", type=_positive_int, metavar="M_B")
    models.add_argument("--mc", type=_positive_int, metavar="M_C")
    models.add_argument("--tau", metavar="FILE", help="packing reference state on R")
    models.add_argument("--channel", metavar="FILE", help="Kraus channel for entanglement assistance")
    models.add_argument("--shape", type=_shape, metavar="D1,D2")
    models.add_argument("--precoder", metavar="FILE")

    parser = _Parser(prog="pgmcoding", description="One-shot coding bounds from the pretty-good measurement.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", parents=[common, models], help="closed-form error bounds")
    p.add_argument("protocol", choices=("cq", "cqsw", "packing", "ea", "mac", "broadcast", "state-info"))
    p.add_argument("--strengthened", action="store_true", help="also report the strengthened bound")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", parents=[common, models], help="random-coding error simulation")
    p.add_argument("protocol", choices=("cq", "cqsw", "packing", "mac", "broadcast", "state-info"))
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--seed", type=_nonneg_int)
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)
    p.add_argument("--cap", type=_positive_int, default=simulate.ENUMERATION_CAP,
                   help="largest number of codebooks enumerated in exact mode")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rate", parents=[common], help="one-shot rate lower bounds")
    p.add_argument("--model", metavar="FILE", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("exponent", parents=[common], help="random-coding error exponent")
    p.add_argument("--model", metavar="FILE", required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--grid-steps", type=_positive_int, default=bounds.GRID_STEPS)
    p.add_argument("--source", action="store_true", help="source coding with side information")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("divergence", parents=[common], help="quantum divergences")
    p.add_argument("kind", choices=("petz", "kl", "variance", "collision", "max", "ht", "is"))
    p.add_argument("--rho", metavar="FILE", required=True)
    p.add_argument("--sigma", metavar="FILE", required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--eps", type=float)
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("second-order", parents=[common], help="normal approximation of log M")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--model", metavar="FILE", help="channel supplying I(X:B) and V(X:B)")
    p.add_argument("--info", type=float)
    p.add_argument("--variance", type=float)
    p.set_defaults(func=cmd_second_order)

    p = sub.add_parser("hoeffding", parents=[common], help="threshold-PGM Hoeffding test")
    p.add_argument("--rho", metavar="FILE", required=True)
    p.add_argument("--sigma", metavar="FILE", required=True)
    p.add_argument("--order", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.set_defaults(func=cmd_hoeffding)

    p = sub.add_parser("check", parents=[common], help="randomized property batteries")
    p.add_argument("battery", choices=tuple(BATTERIES))
    p.add_argument("--trials", type=_positive_int, default=500)
    p.add_argument("--dim", type=_positive_int, default=3)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.set_defaults(func=cmd_check)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report = args.func(args)
        text = format_report(report, args.format, args.bits)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, ParseError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalFailure, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"usage error: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return EXIT_PROPERTY if report.failed else EXIT_OK


def main() -> None:
    sys.exit(run())
