"""Command-line entry points.

Subcommands:

* codegen        emit a parity-check matrix as sparse alist-style text
* ber, msr, fer  Monte-Carlo campaigns writing CSV + PNG reports
* throughput     frame-accounting arithmetic from counter totals
* waveform-demo  synthesize a detector trace and dump CSV + PNG

Campaign commands require --seed.  Every campaign config key is exposed as a
flag of the same name (underscores become hyphens) and can also come from a
flat key=value config file; flags win over the file.  Exit status is 0 on
success and 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .harness import (
    _FIELD_PARSERS,
    CampaignConfig,
    apply_overrides,
    compute_throughput,
    load_config_file,
    run_ber_sweep,
    run_fer_sweep,
    run_msr_sweep,
    save_campaign,
)

PAYLOAD_FRACTION = 1263 / 1344

_THROUGHPUT_PRESETS = {
    "lab": dict(total=20000, missed=50, errors=1),
    "field": dict(total=17000, missed=221, errors=5),
}

_CAMPAIGN_DEFAULTS = {
    "ber": CampaignConfig(),
    "msr": CampaignConfig(lambda_s_grid=(1.0, 2.0, 3.0, 4.0, 5.0)),
    "fer": CampaignConfig(
        code_rates=(0.6,),
        sync_lengths=(64,),
        sync_mode="windowed",
        llr_mode="table",
    ),
}


def _add_campaign_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, required=True,
                   help="master seed for the counter-based trial streams")
    p.add_argument("--config", metavar="FILE",
                   help="flat key = value config file")
    p.add_argument("--set", dest="assignments", action="append", default=[],
                   metavar="KEY=VALUE", help="override one config key")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default="reports", metavar="DIR",
                   help="directory for the CSV and PNG report")
    for name in _FIELD_PARSERS:
        if name in ("master_seed", "threads", "out_dir"):
            continue
        p.add_argument("--" + name.replace("_", "-"), dest="kv_" + name,
                       metavar="V", help=argparse.SUPPRESS)


def _campaign_config(args: argparse.Namespace, metric: str) -> CampaignConfig:
    cfg = _CAMPAIGN_DEFAULTS[metric]
    if args.config:
        cfg = apply_overrides(cfg, load_config_file(args.config))
    overrides: dict[str, str] = {}
    for name in _FIELD_PARSERS:
        value = getattr(args, "kv_" + name, None)
        if value is not None:
            overrides[name] = value
    for item in args.assignments:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got: {item}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    cfg = apply_overrides(cfg, overrides)
    return replace(
        cfg, master_seed=args.seed, threads=args.threads, out_dir=args.out
    )


def _print_records(records) -> None:
    header = f"{'metric':>6} {'rate_param':>10} {'L':>4} {'lam_b':>6} {'lam_s':>6} {'errors':>8} {'trials':>10} {'rate':>12}"
    print(header)
    for r in sorted(
        records, key=lambda r: (r.metric_name, r.code_rate, r.L, r.lambda_b, r.lambda_s)
    ):
        print(
            f"{r.metric_name:>6} {r.code_rate:>10g} {r.L:>4d} {r.lambda_b:>6g} "
            f"{r.lambda_s:>6g} {r.errors:>8d} {r.trials:>10d} {r.rate:>12.3e}"
        )


def _run_campaign(args: argparse.Namespace, metric: str) -> int:
    cfg = _campaign_config(args, metric)
    runner = {"ber": run_ber_sweep, "msr": run_msr_sweep, "fer": run_fer_sweep}[metric]
    result = runner(cfg)
    paths = save_campaign(result, cfg.out_dir, metric)
    _print_records(result.records)
    for path in paths:
        print(f"wrote {path}")
    return 0


def _cmd_codegen(args: argparse.Namespace) -> int:
    from .ldpc import QcLdpcParams, build_code, code_for_rate, export_alist

    custom = [args.j, args.d, args.p]
    if any(v is not None for v in custom):
        if any(v is None for v in custom):
            raise ValueError("custom codes need all of --j, --d, --p")
        params = QcLdpcParams(args.j, args.d, args.p, args.q1, args.q2)
    else:
        params = code_for_rate(args.rate)
    pc = build_code(params)
    out = args.out or f"parity_r{params.rate:g}.alist"
    export_alist(pc, out)
    print(
        f"wrote {out}: ({pc.n_c}, {pc.k_c}) code, rate {params.rate:g}, "
        f"J={params.J} D={params.D} p={params.p}"
    )
    return 0


def _cmd_throughput(args: argparse.Namespace) -> int:
    if args.preset:
        preset = _THROUGHPUT_PRESETS[args.preset]
        total = preset["total"]
        missed = preset["missed"]
        errors = preset["errors"]
    else:
        if None in (args.total, args.missed, args.errors):
            raise ValueError("need --preset or all of --total/--missed/--errors")
        total, missed, errors = args.total, args.missed, args.errors
    report = compute_throughput(
        total, missed, errors, args.payload_fraction, args.code_rate,
        args.symbol_rate,
    )
    print(f"frames          {report.total_frames}")
    print(f"missed sync     {report.miss_sync_frames}")
    print(f"decode errors   {report.error_frames}")
    print(f"payload frac    {report.payload_fraction:.6f}")
    print(f"code rate       {report.code_rate:g}")
    print(f"symbol rate     {report.symbol_rate:g} Hz")
    print(f"throughput      {report.throughput_bps / 1e6:.3f} Mbps")
    return 0


def _cmd_tables(args: argparse.Namespace) -> int:
    from .estimation import LlrTables, dump_phi_csv

    tables = LlrTables(args.p_s, args.p_b, args.cap_s, args.cap_b)
    dump_phi_csv(tables, args.out)
    print(
        f"wrote {args.out}: {tables.i_max}x{tables.j_max} threshold table, "
        f"p_s={args.p_s:g} p_b={args.p_b:g}"
    )
    return 0


def _cmd_waveform_demo(args: argparse.Namespace) -> int:
    import numpy as np

    from .plots import render_waveform_plot
    from .waveform import WaveformConfig, count_pulses, dump_waveform_csv, synthesize

    rng = np.random.default_rng(args.seed)
    cfg = WaveformConfig(noise_sigma=args.noise_sigma)
    chip = 1.0 / (args.symbol_rate * args.chips_per_symbol)
    bits = rng.integers(0, 2, args.symbols)
    arrivals = []
    for s, bit in enumerate(bits):
        for c in range(args.chips_per_symbol):
            lam = (args.lambda_b + bit * args.lambda_s) / args.chips_per_symbol
            n = rng.poisson(lam)
            t0 = (s * args.chips_per_symbol + c) * chip
            arrivals.extend(t0 + rng.random(n) * chip)
    arrivals = np.sort(np.asarray(arrivals))
    duration = args.symbols * args.chips_per_symbol * chip
    w = synthesize(arrivals, cfg, duration=duration, rng=rng)
    spc = int(round(chip * cfg.sample_rate))
    counts = count_pulses(w, cfg.v_thd, samples_per_chip=spc)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "waveform.csv"
    png_path = out / "waveform.png"
    dump_waveform_csv(w, csv_path)
    render_waveform_plot(w, png_path, v_thd=cfg.v_thd)
    print(f"symbols {''.join(str(b) for b in bits)}")
    print(f"true arrivals {arrivals.size}, threshold crossings {int(counts.sum())}")
    print(f"wrote {csv_path}")
    print(f"wrote {png_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pclink",
        description="photon-counting optical link simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("codegen", help="emit a parity-check matrix file")
    p.add_argument("--rate", type=float, default=0.6, choices=(0.6, 0.8))
    p.add_argument("--j", type=int, help="circulant row blocks")
    p.add_argument("--d", type=int, help="circulant column blocks")
    p.add_argument("--p", type=int, help="circulant size (prime)")
    p.add_argument("--q1", type=int, default=2)
    p.add_argument("--q2", type=int, default=3)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=_cmd_codegen)

    for metric, text in (
        ("ber", "coded error rates with perfect synchronization"),
        ("msr", "miss synchronization rate"),
        ("fer", "full-pipeline frame error rate"),
    ):
        p = sub.add_parser(metric, help=text)
        _add_campaign_args(p)
        p.set_defaults(func=lambda a, m=metric: _run_campaign(a, m))

    p = sub.add_parser("tables", help="dump the quantized LLR threshold table")
    p.add_argument("--p-s", dest="p_s", type=float, default=0.5)
    p.add_argument("--p-b", dest="p_b", type=float, default=0.01)
    p.add_argument("--cap-s", dest="cap_s", type=float, default=32.0)
    p.add_argument("--cap-b", dest="cap_b", type=float, default=2.0)
    p.add_argument("--out", default="phi.csv", metavar="FILE")
    p.set_defaults(func=_cmd_tables)

    p = sub.add_parser("throughput", help="frame-accounting arithmetic")
    p.add_argument("--preset", choices=sorted(_THROUGHPUT_PRESETS))
    p.add_argument("--total", type=int)
    p.add_argument("--missed", type=int)
    p.add_argument("--errors", type=int)
    p.add_argument("--payload-fraction", type=float, default=PAYLOAD_FRACTION)
    p.add_argument("--code-rate", type=float, default=0.6)
    p.add_argument("--symbol-rate", type=float, default=2e6)
    p.set_defaults(func=_cmd_throughput)

    p = sub.add_parser("waveform-demo", help="synthesize a detector trace")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--symbols", type=int, default=4)
    p.add_argument("--lambda-s", dest="lambda_s", type=float, default=20.0)
    p.add_argument("--lambda-b", dest="lambda_b", type=float, default=0.5)
    p.add_argument("--symbol-rate", type=float, default=2e6)
    p.add_argument("--chips-per-symbol", type=int, default=10)
    p.add_argument("--noise-sigma", type=float, default=0.02)
    p.add_argument("--out", default="reports", metavar="DIR")
    p.set_defaults(func=_cmd_waveform_demo)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
