"""Command-line entry point: ``bitdensity <command> [options]``.

Exit status: 0 on success, 2 when the configuration does not validate,
3 when a numerical routine fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import warnings
from itertools import product
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import ConfigError, config_hash, fields_for, load_file, resolve, SCHEMAS
from .detector import (
    BscChannel,
    DetectorParams,
    approx_threshold,
    detection_probability,
    detection_probability_bsc,
)
from .montecarlo import run_roc
from .numerics import NumericalError
from .scenarios import GaussianScenario, MimoScenario, WsnScenario, db_to_linear

log = logging.getLogger("bitdensity")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _metadata(command: str, cfg: dict) -> dict:
    embedded = {k: v for k, v in cfg.items() if k != "out"}
    return {
        "command": command,
        "version": __version__,
        "seed": cfg["seed"],
        "config_sha256": config_hash(embedded),
        "config": embedded,
    }


def _render(columns: Sequence[str], rows: list[dict], meta: dict, fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "jsonl":
        buf.write(json.dumps({"meta": meta}, sort_keys=True) + "\n")
        for row in rows:
            buf.write(json.dumps({k: row.get(k) for k in columns}) + "\n")
        return buf.getvalue()
    for key in ("command", "version", "seed", "config_sha256"):
        buf.write(f"# {key}={meta[key]}\n")
    buf.write("# config=" + json.dumps(meta["config"], sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if row.get(k) is None else row.get(k) for k in columns])
    return buf.getvalue()


def _write(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_params(cfg: dict):
    n, p_f, c = cfg["n"], cfg["p_f"], cfg["c"]
    det = DetectorParams.design(n, p_f, c)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        gamma_approx = approx_threshold(n, p_f, c)
    for w in caught:
        log.warning("warning: %s", w.message)
    row = {
        "n": n,
        "p_f": p_f,
        "c": c,
        "theta0": det.theta0,
        "gamma": det.gamma,
        "zeta": det.zeta,
        "gamma_approx": gamma_approx,
        "achieved_pf": det.false_alarm(),
    }
    return list(row), [row]


def _sim_columns(baseline: bool) -> list[str]:
    cols = ["theory_pd", "theory_exact", "empirical_pf", "pf_ci", "empirical_pd", "pd_ci"]
    if baseline:
        cols += ["baseline_pf", "baseline_pd", "baseline_theory_pd", "gap_pd"]
    return cols


def _sim_row(report, baseline: bool) -> dict:
    row = {
        "theory_pd": report.theory_pd,
        "theory_exact": int(report.theory_exact),
        "empirical_pf": report.empirical_pf,
        "pf_ci": report.pf_ci,
        "empirical_pd": report.empirical_pd,
        "pd_ci": report.pd_ci,
    }
    if baseline:
        row.update(
            baseline_pf=report.baseline_pf,
            baseline_pd=report.baseline_pd,
            baseline_theory_pd=report.baseline_theory_pd,
            gap_pd=report.baseline_pd - report.empirical_pd,
        )
    return row


def cmd_roc(cfg: dict):
    sc = GaussianScenario(sigma0_sq=1.0, delta_var=cfg["delta_var"], n=cfg["n"])
    c, trials, baseline = cfg["c"], cfg["trials"], cfg["paired_baseline"]
    p_fs = sorted(cfg["p_f"])
    cols = ["p_f", "alpha", "gamma", "zeta", "theory_pd"]
    reports = run_roc(sc, p_fs, trials, cfg["seed"], c=c, baseline=baseline) if trials > 0 else None
    if reports:
        cols += [k for k in _sim_columns(baseline) if k != "theory_pd"]
    rows = []
    for i, p_f in enumerate(p_fs):
        det = DetectorParams.design(sc.n, p_f, c)
        row = {"p_f": p_f, "alpha": sc.alpha, "gamma": det.gamma, "zeta": det.zeta,
               "theory_pd": detection_probability(sc.n, p_f, c, sc.alpha)}
        if reports:
            row.update({k: v for k, v in _sim_row(reports[i], baseline).items() if k != "theory_pd"})
        rows.append(row)
    return cols, rows


def cmd_sweep_c(cfg: dict):
    lo, hi, step = cfg["c_min"], cfg["c_max"], cfg["c_step"]
    if hi < lo:
        raise ConfigError("c_max", "must be >= c_min")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    grid = [round(lo + i * step, 10) for i in range(count)]
    rows = []
    for alpha in cfg["alpha"]:
        pds = [detection_probability(cfg["n"], cfg["p_f"], c, alpha) for c in grid]
        best = int(np.argmax(pds))  # first maximum, i.e. smallest c on ties
        for i, (c, pd) in enumerate(zip(grid, pds)):
            rows.append({"alpha": alpha, "c": c, "theory_pd": pd, "is_optimal": int(i == best)})
    return ["alpha", "c", "theory_pd", "is_optimal"], rows


def _simulate(cfg: dict, points: list[tuple[dict, object, Optional[BscChannel]]]):
    """Shared driver: one report row per (descriptor, scenario, channel) point."""
    baseline, trials, c, p_f = cfg["paired_baseline"], cfg["trials"], cfg["c"], cfg["p_f"]
    rows = []
    for idx, (desc, sc, channel) in enumerate(points):
        det = DetectorParams.design(sc.n, p_f, c, channel)
        row = dict(desc)
        row.update(n=sc.n, alpha=sc.alpha, gamma=det.gamma, zeta=det.zeta)
        if trials == 0:
            if channel is None:
                row["theory_pd"] = detection_probability(sc.n, p_f, c, sc.alpha)
            else:
                row["theory_pd"] = detection_probability_bsc(sc.n, p_f, c, sc.alpha, channel)
            row["theory_exact"] = int(sc.iid)
        else:
            # same seed at every grid point: common random numbers along the sweep
            report = run_roc(sc, [p_f], trials, cfg["seed"], c=c, channel=channel, baseline=baseline)[0]
            log.info("point %d/%d done in %.2fs", idx + 1, len(points), report.wall_time)
            row.update(_sim_row(report, baseline))
        rows.append(row)
    head = list(points[0][0]) + ["n", "alpha", "gamma", "zeta"]
    tail = ["theory_pd", "theory_exact"] if trials == 0 else _sim_columns(baseline)
    return head + tail, rows


def cmd_sim_mimo(cfg: dict):
    points = []
    for M, nj, pj_db in product(cfg["M"], cfg["jammer_antennas"], cfg["jammer_power_db"]):
        sc = MimoScenario(
            M=M, N=cfg["N"], K=cfg["K"], tau=cfg["tau"],
            user_powers=(db_to_linear(cfg["user_power_db"]),) * cfg["K"],
            user_betas=(cfg["user_beta"],) * cfg["K"],
            jammer_power=db_to_linear(pj_db), jammer_beta=cfg["jammer_beta"],
            jammer_antennas=nj, noise_var=cfg["noise_var"], use_all_pilots=cfg["use_all_pilots"],
        )
        points.append(({"M": M, "jammer_antennas": nj, "jammer_power_db": pj_db}, sc, None))
    return _simulate(cfg, points)


def cmd_sim_wsn(cfg: dict):
    points = []
    for ns, snr_db, tau in product(cfg["n_sensors"], cfg["snr_db"], cfg["tau"]):
        sc = WsnScenario(n_sensors=ns, snr=db_to_linear(snr_db), tau=tau, complex_model=cfg["complex_model"])
        points.append(({"n_sensors": ns, "snr_db": snr_db, "tau": tau}, sc, None))
    return _simulate(cfg, points)


def cmd_sim_bsc(cfg: dict):
    sc = GaussianScenario(sigma0_sq=1.0, delta_var=cfg["delta_var"], n=cfg["n"])
    points = [({"epsilon": eps}, sc, BscChannel(eps)) for eps in cfg["epsilon"]]
    return _simulate(cfg, points)


COMMANDS = {
    "params": cmd_params,
    "roc": cmd_roc,
    "sweep-c": cmd_sweep_c,
    "sim-mimo": cmd_sim_mimo,
    "sim-wsn": cmd_sim_wsn,
    "sim-bsc": cmd_sim_bsc,
}


_HELP = {
    "params": "threshold, randomization and null success rate for (n, p_f, c)",
    "roc": "P_D versus P_F for the Gaussian scenario, theory and simulation",
    "sweep-c": "P_D over a grid of window parameters, per variance ratio",
    "sim-mimo": "jamming detection in the massive MIMO uplink",
    "sim-wsn": "probing a weak transmitter with a sensor network",
    "sim-bsc": "detector fed through a binary symmetric channel",
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bitdensity", description="Bit density detection toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SCHEMAS:
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--config", help="YAML or JSON file with keys from this command's schema")
        p.add_argument("--dry-run", action="store_true", help="validate, print resolved parameters, do not simulate")
        p.add_argument("-v", "--verbose", action="store_true")
        for f in fields_for(name):
            flag = "--" + f.name.replace("_", "-")
            if f.kind == "bool":
                p.add_argument(flag, dest=f.name, action=argparse.BooleanOptionalAction, default=None, help=f.help)
            else:
                default = ",".join(map(str, f.default)) if isinstance(f.default, list) else f.default
                p.add_argument(flag, dest=f.name, default=None, help=f"{f.help} (default: {default})")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    command = args.command
    cli_values = {f.name: getattr(args, f.name) for f in fields_for(command)}
    try:
        file_values = load_file(args.config) if args.config else {}
        cfg = resolve(command, file_values, cli_values)
        if args.dry_run:
            cfg["trials"] = 0
        columns, rows = COMMANDS[command](cfg)
        text = _render(columns, rows, _metadata(command, cfg), cfg["format"])
        _write(text, cfg["out"])
    except ConfigError as exc:
        print(f"bitdensity: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"bitdensity: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"bitdensity: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"bitdensity: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
