"""Command-line front end: ``xxqst {spectrum,evolve,sweep,fit,verify}``.

All energies and times are in units of the bulk coupling, J = 1.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .analysis import DEFAULT_THRESHOLD, fit_exponential, fit_power_law, predicted_gap, sweep
from .chain_model import ProtocolKind, protocol_chain
from .errors import ConvergenceFailure, LocalizationNotFound, QSTError, SextetMismatch
from .fidelity import TransferSetup, fidelity_trace
from .spectral import classify_spectrum, diagonalize, localization_weights
from .verify import DEFAULT_XI, oracle_equivalence

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
VERIFY_TOLERANCE = 1e-8
VERIFY_MAX_SITES = 10
DIGITS = 12


class UsageError(Exception):
    pass


def _float_list(text: str) -> list:
    return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]


def _int_list(text: str) -> list:
    return [int(x) for x in text.replace(";", ",").split(",") if x.strip()]


# option name -> (converter, default); None defaults are resolved per subcommand
OPTIONS = {
    "protocol": (ProtocolKind.parse, ProtocolKind.UNIFORM),
    "n": (int, None),
    "xi": (float, None),
    "threshold": (float, DEFAULT_THRESHOLD),
    "t_min": (float, 0.0),
    "t_max": (float, None),
    "points": (int, 1001),
    "n_list": (_int_list, None),
    "xi_list": (_float_list, None),
    "jobs": (int, 1),
    "output": (str, None),
    "class_output": (str, None),
    "input": (str, None),
    "against": (str, None),
    "model": (str, "power"),
    "n_max": (int, VERIFY_MAX_SITES),
    "samples": (int, 20),
    "seed": (int, 0),
    "t_window": (float, 500.0),
}


def read_config(path: str) -> dict:
    """Parse a ``key = value`` file; blank lines and ``#`` comments are ignored."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in OPTIONS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def resolve(args: argparse.Namespace) -> dict:
    """Documented defaults, overridden by the config file, overridden by flags."""
    raw = read_config(args.config) if args.config else {}
    for key in OPTIONS:
        flag = getattr(args, key, None)
        if flag is not None:
            raw[key] = flag
    cfg = {}
    for key, (conv, default) in OPTIONS.items():
        if key in raw:
            try:
                cfg[key] = conv(raw[key]) if isinstance(raw[key], str) or key == "protocol" else raw[key]
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {raw[key]!r} ({exc})") from exc
        else:
            cfg[key] = default
    if cfg["xi"] is None:
        cfg["xi"] = DEFAULT_XI[cfg["protocol"]]
    if cfg["jobs"] < 1:
        raise UsageError("--jobs must be at least 1")
    return cfg


def fmt(value) -> str:
    """Fixed 12-significant-digit text; NaN and None become empty cells."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if not math.isfinite(value):
        return ""
    text = f"{value:.{DIGITS}g}"
    return "0" if text == "-0" else text


def _json_value(value):
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return float(f"{value:.{DIGITS}g}") if math.isfinite(value) else None
    return value


def dump_json(obj) -> str:
    return json.dumps(_json_value(obj), indent=2, sort_keys=True) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def emit(text: str, path: str | None, stream=None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)


def _require_n(cfg) -> int:
    if cfg["n"] is None:
        raise UsageError("--n is required")
    return cfg["n"]


def cmd_spectrum(cfg) -> int:
    n = _require_n(cfg)
    chain = protocol_chain(cfg["protocol"], n, cfg["xi"])
    decomp = diagonalize(chain)
    w1 = localization_weights(decomp, (1,))
    wn = localization_weights(decomp, (n,))
    block = localization_weights(decomp, sorted({1, min(2, n), max(n - 1, 1), n}))
    rows = [(k + 1, decomp.eigenvalues[k], w1[k], wn[k], block[k]) for k in range(n)]
    emit(csv_text(["k", "eigenvalue", "weight_site1", "weight_siteN", "weight_block"], rows), cfg["output"])
    emit(dump_json(classify_spectrum(decomp, n).to_dict()), cfg["class_output"], sys.stderr)
    return EXIT_OK


def cmd_evolve(cfg) -> int:
    n = _require_n(cfg)
    kind = cfg["protocol"]
    chain = protocol_chain(kind, n, cfg["xi"])
    decomp = diagonalize(chain)
    setup = TransferSetup.default(n, kind.qubits)
    t_max = cfg["t_max"]
    if t_max is None:
        gap = predicted_gap(decomp, setup)
        t_max = 2.0 * math.pi / gap if math.isfinite(gap) and gap > 0 else 10.0 * n
    t_min = cfg["t_min"]
    if t_max < t_min or cfg["points"] < 1:
        raise UsageError("need t_max >= t_min and points >= 1")
    times = np.array([t_min]) if t_max == t_min else np.linspace(t_min, t_max, cfg["points"])
    trace = fidelity_trace(decomp, setup, times)
    abs_g = trace.abs_g if trace.abs_g is not None else [None] * times.size
    rows = zip(trace.times, trace.fbar, trace.re_f, trace.abs_f, abs_g)
    emit(csv_text(["time", "fbar", "re_f_s1r1", "abs_f_s1r1", "abs_g"], rows), cfg["output"])
    return EXIT_OK


SWEEP_HEADER = ["protocol", "N", "xi", "threshold", "tau", "fbar_at_tau", "delta_omega", "tau_predicted", "reached"]


def _grid(cfg):
    n_list = cfg["n_list"] if cfg["n_list"] is not None else ([cfg["n"]] if cfg["n"] is not None else None)
    if n_list is None:
        raise UsageError("a sweep needs --n-list or --n")
    xi_list = cfg["xi_list"] if cfg["xi_list"] is not None else [cfg["xi"]]
    for n in n_list:
        if n < cfg["protocol"].min_sites:
            raise UsageError(f"N={n} is too short for {cfg['protocol'].value}")
    return n_list, xi_list


def _run_sweep(cfg) -> dict:
    n_list, xi_list = _grid(cfg)
    return sweep(cfg["protocol"], n_list, xi_list, cfg["threshold"], cfg["t_max"], jobs=cfg["jobs"])


def cmd_sweep(cfg) -> int:
    results = _run_sweep(cfg)
    kind = cfg["protocol"].value
    rows = [
        (kind, n, xi, r.threshold, r.tau, r.fbar_at_tau, r.rabi_gap, r.tau_predicted, r.reached)
        for (n, xi), r in results.items()
    ]
    emit(csv_text(SWEEP_HEADER, rows), cfg["output"])
    return EXIT_OK


def _read_sweep_csv(path: str):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"N", "xi", "tau", "reached"} - set(reader.fieldnames or ())
        if missing:
            raise UsageError(f"{path}: missing columns {sorted(missing)}")
        return [
            (int(row["N"]), float(row["xi"]), float(row["tau"]) if row["tau"] else math.nan, row["reached"] == "true")
            for row in reader
        ]


def cmd_fit(cfg) -> int:
    if cfg["input"]:
        points = _read_sweep_csv(cfg["input"])
    else:
        points = [(n, xi, r.tau, r.reached) for (n, xi), r in _run_sweep(cfg).items()]
    against = cfg["against"]
    if against is None:
        varies_n = len({p[0] for p in points}) > 1
        varies_xi = len({p[1] for p in points}) > 1
        if varies_n and varies_xi:
            raise UsageError("both N and xi vary; choose --against n or --against xi")
        against = "n" if varies_n else "xi"
    against = against.lower()
    if against not in ("n", "xi") or cfg["model"] not in ("power", "exponential"):
        raise UsageError("--against must be n or xi and --model power or exponential")
    pos = 0 if against == "n" else 1
    reached = [(p[pos], p[2]) for p in points if p[3]]
    fitter = fit_power_law if cfg["model"] == "power" else fit_exponential
    result = fitter(reached, n_excluded=len(points) - len(reached))
    emit(dump_json(result.to_dict()), cfg["output"])
    return EXIT_OK


def cmd_verify(cfg) -> int:
    n_max = min(cfg["n_max"], VERIFY_MAX_SITES)
    records = oracle_equivalence(range(4, n_max + 1), cfg["samples"], cfg["t_window"], cfg["seed"])
    amp = max(r.worst_amplitude for r in records)
    fid = max(r.worst_fidelity for r in records)
    worst = max(amp, fid)
    report = {
        "cases": len(records),
        "max_amplitude_deviation": amp,
        "max_fidelity_deviation": fid,
        "max_deviation": worst,
        "tolerance": VERIFY_TOLERANCE,
        "passed": worst <= VERIFY_TOLERANCE,
    }
    emit(dump_json(report), cfg["output"])
    return EXIT_OK if report["passed"] else EXIT_NUMERIC


COMMANDS = {
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xxqst",
        description="State transfer through XX spin chains. Energies and times are in units of J = 1.",
        epilog="Exit codes: 0 ok, 2 usage or invalid configuration, 3 numerical failure.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file ('#' comments); flags override it")
    common.add_argument("--protocol", help="uniform, weak-edge-1q, barrier-edge-1q, barrier-nn-1q, "
                        "weak-block-2q or barrier-block-2q (default uniform)")
    common.add_argument("--n", type=int, help="number of sites")
    common.add_argument("--xi", type=float, help="perturbation strength (default depends on the protocol)")
    common.add_argument("--threshold", type=float, help=f"fidelity threshold (default {DEFAULT_THRESHOLD})")
    common.add_argument("--t-max", dest="t_max", type=float, help="end of the time window")
    common.add_argument("--jobs", type=int, help="worker processes for sweeps (default 1)")
    common.add_argument("--output", help="output file (default stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="single-excitation spectrum and class report")
    p.add_argument("--class-output", dest="class_output", help="file for the class JSON (default stderr)")

    p = sub.add_parser("evolve", parents=[common], help="fidelity trace on a uniform time grid")
    p.add_argument("--t-min", dest="t_min", type=float, help="start of the window (default 0)")
    p.add_argument("--points", type=int, help="grid points (default 1001)")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--n-list", dest="n_list", type=str, help="comma-separated chain lengths")
    grid.add_argument("--xi-list", dest="xi_list", type=str, help="comma-separated perturbation strengths")
    sub.add_parser("sweep", parents=[common, grid], help="transfer times over an (N, xi) grid")

    p = sub.add_parser("fit", parents=[common, grid], help="power-law or exponential fit of transfer times")
    p.add_argument("--input", help="sweep CSV to fit (default: run the sweep)")
    p.add_argument("--against", help="n or xi (default: whichever varies)")
    p.add_argument("--model", help="power or exponential (default power)")

    p = sub.add_parser("verify", parents=[common], help="fast path against the exact-diagonalization oracle")
    p.add_argument("--n-max", dest="n_max", type=int, help=f"largest chain (at most {VERIFY_MAX_SITES})")
    p.add_argument("--samples", type=int, help="random times per chain (default 20)")
    p.add_argument("--seed", type=int, help="seed of the time sampler (default 0)")
    p.add_argument("--t-window", dest="t_window", type=float, help="times drawn from [0, t_window] (default 500)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except (UsageError, OSError) as exc:
        print(f"xxqst: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceFailure, SextetMismatch, LocalizationNotFound, ArithmeticError) as exc:
        print(f"xxqst: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (QSTError, ValueError, IndexError) as exc:
        print(f"xxqst: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
