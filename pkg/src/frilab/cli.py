"""Command-line interface: ``frilab <subcommand> [flags]``.

Every subcommand accepts ``--config FILE`` (JSON object or ``key = value``
lines with the flag names, dashes or underscores); explicit flags override it.
List-valued flags (``--u``, ``--T``, ``--p``) take comma-separated values.
"""
from __future__ import annotations

import argparse
import configparser
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .capacity import DEFAULT_TOL, capacity, escape_probabilities
from .coupling import coupling_intensities, sample_coupled
from .experiment import (
    ExperimentConfig, ReplicaRunner, bernoulli_mode_curve, crossing_curve, estimate_tc,
    high_u_asymptotic, low_u_slope, nondecreasing_up_to_ci, provenance, to_csv, to_json,
    u_phase_curve,
)
from .fri import PaddingPolicy, sample, write_dump
from .lattice import Box, EdgeSet
from .randomness import SeedSpec
from .renorm import (
    ScaleHierarchy, decoupling_envelope, lambda_bound_margin, lambda_count, level_counts,
    probe_crossing, probe_decoupling_defect,
)

SUBCOMMANDS = ("sample", "verify-coupling", "capacity", "crossing-curve", "estimate-tc",
               "bernoulli-curve", "high-u-check", "low-u-slope", "u-curve", "renorm-diag")


def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x.strip()]


# flag name -> (type, help)
COMMON = {
    "d": (int, "lattice dimension"),
    "u": (_floats, "intensity or comma-separated intensities"),
    "T": (_floats, "fiber parameter or comma-separated values"),
    "p": (_floats, "Bernoulli edge probabilities (comma-separated)"),
    "L": (int, "window side"),
    "l0": (int, "scale ratio of the box hierarchy"),
    "L0": (int, "bottom scale of the box hierarchy"),
    "levels": (int, "number of hierarchy levels"),
    "replicas": (int, "Monte Carlo replicas per point"),
    "seed": (int, "master seed"),
    "epsilon": (float, "padding tolerance"),
    "tol": (float, "bisection or solver tolerance"),
    "threshold": (float, "crossing threshold for bisection"),
    "T_lo": (float, "lower end of the T bracket"),
    "T_hi": (float, "upper end of the T bracket"),
    "jobs": (int, "worker processes"),
    "sampler": (str, "edgewise or sitewise"),
}

EXTRA = {
    "T1": (float, "lower fiber parameter of the coupling"),
    "T2": (float, "upper fiber parameter of the coupling"),
    "set": (str, "file of points, one per line, coordinates separated by commas or spaces"),
    "calib_replicas": (int, "replicas per point for the Bernoulli calibration"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frilab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="flat key-value config file")
        sp.add_argument("--out", help="output path (stdout if omitted)")
        sp.add_argument("--format", choices=("json", "csv"), default=None)
        for flag, (typ, help_) in {**COMMON, **EXTRA}.items():
            sp.add_argument("--" + flag.replace("_", "-"), dest=flag, type=typ,
                            default=None, help=help_)
    return parser


def read_config(path: str) -> dict:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("config JSON must be an object")
    except json.JSONDecodeError:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        cp.read_string("[config]\n" + text)
        data = dict(cp["config"])
    out = {}
    types = {**COMMON, **EXTRA, "out": (str, ""), "format": (str, "")}
    for key, value in data.items():
        key = key.replace("-", "_")
        if key not in types:
            raise ValueError(f"unknown config key {key!r}")
        typ = types[key][0]
        if typ is _floats and isinstance(value, (list, tuple)):
            out[key] = [float(v) for v in value]
        else:
            out[key] = typ(value) if isinstance(value, str) else value
    return out


def resolve(args: argparse.Namespace) -> dict:
    opts = read_config(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key in ("config", "command"):
            continue
        if value is not None:
            opts[key] = value
    return opts


def make_config(opts: dict) -> ExperimentConfig:
    keys = set(ExperimentConfig.__dataclass_fields__)
    return ExperimentConfig(**{k: v for k, v in opts.items() if k in keys})


def emit(text: str, opts: dict) -> None:
    out = opts.get("out")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _render(doc: dict, rows: list, opts: dict) -> None:
    if opts.get("format") == "csv":
        emit(to_csv(rows), opts)
    else:
        emit(to_json(doc), opts)


def _points_doc(cfg, kind, results, extra=None):
    rows = [r.row() for r in results]
    doc = provenance(cfg, kind)
    doc["points"] = rows
    doc["nondecreasing_up_to_ci"] = nondecreasing_up_to_ci([r.estimate for r in results])
    if extra:
        doc.update(extra)
    return doc, rows


# ---------------------------------------------------------------------------
# subcommands


def cmd_sample(opts):
    cfg = make_config(opts)
    window = cfg.window
    base = SeedSpec(cfg.seed)
    n = opts.get("replicas", 1)
    # the dump (default) is tab separated; --format json gives per-replica summaries
    samples = [(r, sample(cfg.sampler, window, cfg.u[0], cfg.T[0], cfg.policy, base.child(r)))
               for r in range(n)]
    if opts.get("format") != "json":
        buf = io.StringIO()
        write_dump(samples, buf)
        emit(buf.getvalue(), opts)
        return
    doc = provenance(cfg, "sample")
    doc["replicas"] = [{"replica": r, "pad": s.pad, "n_fibers": s.n_fibers,
                        "open_edges": len(s.open_edges)} for r, s in samples]
    emit(to_json(doc), opts)


def cmd_verify_coupling(opts):
    cfg = make_config(opts)
    u = cfg.u[0]
    T1, T2 = opts.get("T1", 0.5), opts.get("T2", 1.0)
    lam = coupling_intensities(u, T1, T2)
    window = cfg.window
    base = SeedSpec(cfg.seed)
    verdicts = []
    low_sum = np.zeros(window.d * window.volume)
    high_sum = np.zeros_like(low_sum)
    for r in range(cfg.replicas):
        pair = sample_coupled(window, u, T1, T2, cfg.policy, base.child(r), record=False)
        verdicts.append(bool(pair.dominated))
        low_sum += pair.low.open_edges.bits
        high_sum += pair.high.open_edges.bits
    n = cfg.replicas
    # edges with both endpoints in the window
    valid = np.asarray(_valid_edges(window), dtype=bool)
    doc = provenance(cfg, "verify-coupling")
    doc.update({
        "T1": T1, "T2": T2,
        "intensities": {"lambda1": lam.lambda1, "lambda2": lam.lambda2, "lambda3": lam.lambda3},
        "dominated_all": all(verdicts),
        "verdicts": verdicts,
        "mean_open_low": float(low_sum[valid].mean() / n),
        "mean_open_high": float(high_sum[valid].mean() / n),
        "edge_rate_low": lam.low_total,
        "edge_rate_high": lam.high_total,
    })
    emit(to_json(doc), opts)


def _valid_edges(window: Box):
    return EdgeSet.full(window).bits


def read_points(path: str) -> list[tuple[int, ...]]:
    pts = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            pts.append(tuple(int(c) for c in line.replace(",", " ").split()))
    return pts


def cmd_capacity(opts):
    if not opts.get("set"):
        raise SystemExit("capacity needs --set <points file>")
    K = read_points(opts["set"])
    T = opts.get("T", [1.0])[0]
    tol = opts.get("tol", DEFAULT_TOL)
    es = escape_probabilities(K, T, tol)
    d = len(K[0])
    doc = {"experiment": "capacity", "T": T, "tol": tol, "code_version": __version__,
           "points": [{"x": list(x), "escape_probability": v} for x, v in es.items()],
           "capacity": 2 * d * sum(es.values()), "bound": 2 * d * len(es)}
    emit(to_json(doc), opts)


def cmd_crossing_curve(opts):
    cfg = make_config(opts)
    with ReplicaRunner(cfg.jobs) as runner:
        res = crossing_curve(cfg, runner)
    _render(*_points_doc(cfg, "crossing-curve", res), opts)


def cmd_bernoulli_curve(opts):
    cfg = make_config(opts)
    with ReplicaRunner(cfg.jobs) as runner:
        res = bernoulli_mode_curve(cfg.p, cfg, runner)
    _render(*_points_doc(cfg, "bernoulli-curve", res), opts)


def cmd_u_curve(opts):
    cfg = make_config(opts)
    with ReplicaRunner(cfg.jobs) as runner:
        res = u_phase_curve(cfg.T[0], cfg.u, cfg, runner)
    _render(*_points_doc(cfg, "u-curve", res), opts)


def cmd_estimate_tc(opts):
    cfg = make_config(opts)
    with ReplicaRunner(cfg.jobs) as runner:
        pp = estimate_tc(cfg, runner=runner, log_scale=cfg.u[0] < 1.0)
    doc = provenance(cfg, "estimate-tc")
    doc["phase_point"] = pp.to_dict()
    _render(doc, doc["phase_point"]["evaluations"], opts)


def cmd_high_u_check(opts):
    cfg = make_config(opts)
    with ReplicaRunner(cfg.jobs) as runner:
        res = high_u_asymptotic(sorted(cfg.u), cfg, calib_replicas=opts.get("calib_replicas"),
                                runner=runner)
    doc = provenance(cfg, "high-u-check")
    doc.update(res.to_dict())
    rows = [e for r in res.rows for e in r["evaluations"]]
    _render(doc, rows, opts)


def cmd_low_u_slope(opts):
    cfg = make_config(opts)
    with ReplicaRunner(cfg.jobs) as runner:
        res = low_u_slope(sorted(cfg.u, reverse=True), cfg, runner=runner)
    doc = provenance(cfg, "low-u-slope")
    doc.update(res.to_dict())
    _render(doc, res.points, opts)


def cmd_renorm_diag(opts):
    cfg = make_config(opts)
    h = ScaleHierarchy(cfg.L0, cfg.l0, max(cfg.levels, 1), cfg.d)
    base = SeedSpec(cfg.seed)
    doc = provenance(cfg, "renorm-diag")
    doc["H1"], doc["H2"] = {}, {}
    for n in range(1, h.levels + 1):
        a, b = level_counts(n, h)
        doc["H1"][str(n)], doc["H2"][str(n)] = a, b
    doc["lambda_counts"] = {str(n): str(lambda_count(n, h)) for n in range(h.levels + 1)}
    doc["bound_margins"] = {str(n): lambda_bound_margin(n, h) for n in range(1, h.levels + 1)}
    probes = []
    u, T = cfg.u[0], cfg.T[0]
    for n in range(0, h.levels):
        c = probe_crossing(u, T, n, h, cfg.replicas, base.child(0, n), cfg.policy)
        f = probe_decoupling_defect(u, T, n, h, cfg.replicas, base.child(1, n), cfg.policy)
        probes.append({"n": n, "crossing": c.to_dict(), "decoupling_defect": f.to_dict(),
                       "defect_envelope": decoupling_envelope(u, T, n, h)})
    doc["probes"] = probes
    emit(to_json(doc), opts)


COMMANDS = {
    "sample": cmd_sample,
    "verify-coupling": cmd_verify_coupling,
    "capacity": cmd_capacity,
    "crossing-curve": cmd_crossing_curve,
    "estimate-tc": cmd_estimate_tc,
    "bernoulli-curve": cmd_bernoulli_curve,
    "high-u-check": cmd_high_u_check,
    "low-u-slope": cmd_low_u_slope,
    "u-curve": cmd_u_curve,
    "renorm-diag": cmd_renorm_diag,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    opts = resolve(args)
    try:
        COMMANDS[args.command](opts)
    except ValueError as exc:
        print(f"frilab {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
