"""Command-line experiment runner.

Usage::

    isac-sic-lab <command> --config FILE [--seed N] [--trials N] [--out DIR] [--workers N]
    isac-sic-lab render CSV --chart <command> [--svg FILE]

Each experiment writes ``<command>.csv``, ``<command>.svg`` and
``manifest.txt`` into the output directory.

Exit status: 0 on success, 2 on an invalid config or chart spec (nothing is
written), 3 on a filesystem error.
"""
import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, _accel
from .comms import comm_gap, ecr_asymptote
from .config import COMMANDS, load_spec
from .errors import ConfigError, StatisticalError, StructuralError
from .model import C_SIC, FDSAC, S_SIC, SCHEMES, db_to_linear
from .montecarlo import ecr_curves, estimate_wishart_offset, op_curves
from .region import fdsac_boundary, isac_boundary
from .sensing import (
    design_sensing,
    fdsac_sensing_rate,
    max_sensing_rate,
    sensing_gap,
    sr_asymptote,
)
from .svg import ChartError, ChartSpec, render_chart

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3

_TAG = {C_SIC: "csic", S_SIC: "ssic", FDSAC: "fdsac"}


def _num(v):
    # 17 significant digits round-trip a double exactly
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


class Table:
    """Header plus rows, serialized as RFC-4180 CSV."""

    def __init__(self, header):
        self.header = list(header)
        self.rows = []

    def add(self, *values):
        if len(values) != len(self.header):
            raise StructuralError("row length does not match header")
        self.rows.append([_num(v) for v in values])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()


def chart_for(command, alpha_bw=0.5):
    """Default chart layout for the CSV written by `command`."""
    tags = [_TAG[s] for s in SCHEMES]
    if command == "op-curve":
        return ChartSpec(x="pc_db", series=[f"op_{t}" for t in tags], log_y=True,
                         title="Outage probability of the sum rate",
                         x_label="p_c (dB)", y_label="OP")
    if command == "ecr-curve":
        return ChartSpec(x="pc_db",
                         series=[f"ecr_{t}_bps_hz" for t in tags]
                         + [f"asym_{t}_bps_hz" for t in tags],
                         dashed=[f"asym_{t}_bps_hz" for t in tags],
                         title="Ergodic sum rate", x_label="p_c (dB)",
                         y_label="ECR (bit/s/Hz)")
    if command == "sr-curve":
        return ChartSpec(x="ps_db",
                         series=[f"sr_{t}_bits" for t in tags]
                         + [f"asym_{t}_bits" for t in tags],
                         dashed=[f"asym_{t}_bits" for t in tags],
                         title="Sensing rate", x_label="p_s (dB)",
                         y_label="SR (bit/s/Hz)")
    if command == "region":
        return ChartSpec(kind="region", x="sr_bits", series=["cr_bits"], group_by="boundary",
                         title="SR-CR region", x_label="SR (bit/s/Hz)",
                         y_label="CR (bit/s/Hz)")
    if command in ("asymptotics", "table1"):
        return ChartSpec(kind="table", title=command)
    raise ConfigError(f"unknown command {command!r}")


# --- experiments: each returns a Table, computing everything before I/O ---


def run_op_curve(spec):
    sw = spec.sweep
    grid = sw.db_grid()
    curves = op_curves(spec.cfg, sw.rate_target, grid, spec.trials, spec.seed,
                       schemes=SCHEMES, workers=spec.workers)
    tags = [_TAG[s] for s in SCHEMES]
    header = ["pc_db"] + [f"op_{t}" for t in tags]
    for t in tags:
        header += [f"op_{t}_ci95_low", f"op_{t}_ci95_high"]
    header += ["rate_target_bps_hz", "trials"]
    tab = Table(header)
    for i, db in enumerate(grid):
        row = [db] + [curves[s].op[i].point for s in SCHEMES]
        for s in SCHEMES:
            row += [curves[s].op[i].wilson_low, curves[s].op[i].wilson_high]
        tab.add(*row, sw.rate_target, spec.trials)
    return tab


def _fdsac_ecr_asymptote(cfg):
    # alpha_bw * E log2 det(I + p/alpha_bw H H^H) ~ alpha_bw K (log2 p - log2 alpha_bw - offset)
    a = cfg.alpha_bw
    c = ecr_asymptote(cfg, order=C_SIC)
    return lambda p: a * c.slope * (math.log2(p) - math.log2(a) - c.offset)


def run_ecr_curve(spec):
    cfg = spec.cfg
    grid = spec.sweep.db_grid()
    ecr = ecr_curves(cfg, grid, spec.trials, spec.seed, schemes=SCHEMES, workers=spec.workers)
    slot_noise = design_sensing(cfg, S_SIC).slot_noise
    asym = {
        C_SIC: ecr_asymptote(cfg, order=C_SIC),
        S_SIC: ecr_asymptote(cfg, slot_noise=slot_noise, order=S_SIC),
        FDSAC: _fdsac_ecr_asymptote(cfg) if cfg.alpha_bw > 0 else (lambda p: 0.0),
    }
    tags = [_TAG[s] for s in SCHEMES]
    header = (["pc_db"] + [f"ecr_{t}_bps_hz" for t in tags]
              + [f"ecr_{t}_ci95_bps_hz" for t in tags]
              + [f"asym_{t}_bps_hz" for t in tags] + ["trials"])
    tab = Table(header)
    for i, db in enumerate(grid):
        p = float(db_to_linear(db))
        tab.add(db, *[ecr[s][i].point for s in SCHEMES],
                *[ecr[s][i].half_width_95 for s in SCHEMES],
                *[float(asym[s](p)) for s in SCHEMES], spec.trials)
    return tab


def _fdsac_sr_asymptote(cfg, p_s):
    share = 1.0 - cfg.alpha_bw
    if share == 0.0:
        return 0.0
    lam = cfg.eigenvalues
    offset = float(np.mean(np.log2(cfg.N * share / (cfg.L * lam))))
    return share * cfg.N * cfg.M / cfg.L * (math.log2(p_s) - offset)


def run_sr_curve(spec):
    cfg = spec.cfg
    grid = spec.sweep.db_grid()
    tags = [_TAG[s] for s in SCHEMES]
    tab = Table(["ps_db"] + [f"sr_{t}_bits" for t in tags] + [f"asym_{t}_bits" for t in tags])
    for db in grid:
        c = cfg.replace(p_s=float(db_to_linear(db)))
        sr = [max_sensing_rate(c, C_SIC), max_sensing_rate(c, S_SIC), fdsac_sensing_rate(c)]
        asym = [float(sr_asymptote(c, C_SIC)(c.p_s)), float(sr_asymptote(c, S_SIC)(c.p_s)),
                _fdsac_sr_asymptote(c, c.p_s)]
        tab.add(db, *sr, *asym)
    return tab


def run_region(spec):
    cfg, g = spec.cfg, spec.sweep.grid
    bounds = [isac_boundary(cfg, g, spec.trials, spec.seed, spec.workers),
              fdsac_boundary(cfg, g, spec.trials, spec.seed, spec.workers)]
    tab = Table(["boundary", "param", "sr_bits", "cr_bits", "cr_ci95"])
    for b in bounds:
        for prm, (sr, cr), ci in zip(b.params, b.points, b.cr_ci95):
            tab.add(b.label, prm, sr, cr, ci)
    return tab


def run_asymptotics(spec):
    cfg = spec.cfg
    slot_noise = design_sensing(cfg, S_SIC).slot_noise
    sr_c, sr_s = sr_asymptote(cfg, C_SIC), sr_asymptote(cfg, S_SIC)
    ecr_c = ecr_asymptote(cfg, order=C_SIC)
    ecr_s = ecr_asymptote(cfg, slot_noise=slot_noise, order=S_SIC)
    wish = estimate_wishart_offset(cfg, spec.trials, spec.seed)
    tab = Table(["quantity", "value", "ci95"])
    rows = [
        ("sr_slope", sr_c.slope, 0.0),
        ("sr_offset_csic_3db", sr_c.offset, 0.0),
        ("sr_offset_ssic_3db", sr_s.offset, 0.0),
        ("sr_gap_es_bits", sensing_gap(cfg), 0.0),
        ("ecr_slope", ecr_c.slope, 0.0),
        ("ecr_offset_csic_3db", ecr_c.offset, 0.0),
        ("ecr_offset_ssic_3db", ecr_s.offset, 0.0),
        ("ecr_gap_ec_bps_hz", comm_gap(cfg, slot_noise), 0.0),
        ("ecr_offset_wishart_mc_3db", wish.point, wish.half_width_95),
    ]
    for r in rows:
        tab.add(*r)
    return tab


def table1(cfg):
    """Diversity orders and high-SNR slopes in closed form, one row per system."""
    M, N, K, L, a = cfg.M, cfg.N, cfg.K, cfg.L, cfg.alpha_bw
    return [
        ("ISAC (S-SIC)", M * K, K, N * M / L),
        ("ISAC (C-SIC)", M * K, K, N * M / L),
        ("ISAC (Time-Sharing)", M * K, K, N * M / L),
        ("FDSAC", M * K, a * K, (1 - a) * N * M / L),
    ]


def run_table1(spec):
    tab = Table(["system", "cr_diversity_order", "cr_slope_bps_hz_per_3db", "sr_slope_bits_per_3db"])
    for r in table1(spec.cfg):
        tab.add(*r)
    return tab


RUNNERS = {
    "op-curve": run_op_curve,
    "ecr-curve": run_ecr_curve,
    "sr-curve": run_sr_curve,
    "region": run_region,
    "asymptotics": run_asymptotics,
    "table1": run_table1,
}


def manifest_text(spec):
    lines = [
        f"tool: isac-sic-lab {__version__}",
        f"command: {spec.command}",
        f"backend: {_accel.backend()}",
        f"seed: {spec.seed}",
        f"trials: {spec.trials}",
        f"workers: {spec.workers}",
    ]
    for k, v in spec.cfg.as_dict().items():
        lines.append(f"cfg.{k}: {v}")
    sw = spec.sweep
    if sw.start_db is not None:
        lines.append(f"sweep.db: {sw.start_db}:{sw.step_db}:{sw.stop_db}")
    lines.append(f"sweep.rate_target: {sw.rate_target}")
    lines.append("sweep.grid: " + ", ".join(_num(x) for x in sw.grid))
    return "\n".join(lines) + "\n"


def run(spec):
    """Run one experiment and write its artifacts. Returns the table."""
    tab = RUNNERS[spec.command](spec)
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{spec.command}.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write(tab.to_csv())
    render_chart(csv_path, chart_for(spec.command, spec.cfg.alpha_bw), out / f"{spec.command}.svg")
    (out / "manifest.txt").write_text(manifest_text(spec))
    if spec.command == "table1":
        print(format_table(tab))
    return tab


def format_table(tab):
    widths = [max(len(h), *(len(r[j]) for r in tab.rows)) if tab.rows else len(h)
              for j, h in enumerate(tab.header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(tab.header, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)) for r in tab.rows]
    return "\n".join(lines)


def build_parser():
    ap = argparse.ArgumentParser(prog="isac-sic-lab", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="INI experiment file")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--out", help="output directory (default: [run] out_dir or ./out)")
        p.add_argument("--workers", type=int, help="worker processes for Monte Carlo")
    p = sub.add_parser("render", help="re-render an existing CSV as SVG")
    p.add_argument("csv")
    p.add_argument("--chart", required=True, choices=COMMANDS)
    p.add_argument("--svg")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "render":
            render_chart(args.csv, chart_for(args.chart), args.svg)
            return EXIT_OK
        spec = load_spec(args.command, args.config, seed=args.seed, trials=args.trials,
                         out_dir=args.out, workers=args.workers)
        run(spec)
    except (ConfigError, ChartError, StructuralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StatisticalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
