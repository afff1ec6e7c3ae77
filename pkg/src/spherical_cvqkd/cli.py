"""Command-line entry point: ``cvqkd {simulate,figure,recon-bench,keyrate,estimate}``.

Exit codes: 0 success (including runs with no positive key rate),
2 usage, 3 numeric/physicality/protocol failure, 4 IO.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import figures
from .config import RunConfig
from .errors import CVQKDError, UsageError
from .estimation import confidence_bounds, estimate
from .gaussian import DetectorModel
from .keyrate import RateParams, optimize_modulation, rate_at
from .ldpc import load_code
from .protocol import simulate
from .reconciliation import benchmark_point

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("spherical_cvqkd")


def _clean(obj):
    """Replace non-finite floats with None so the JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump_json(obj, path: Path | None):
    text = json.dumps(_clean(obj), indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _emit_csv(header, rows, out_dir: str | None, name: str):
    text = _csv_text(header, rows)
    if out_dir is None:
        sys.stdout.write(text)
    else:
        path = Path(out_dir) / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def _key_text(bits: np.ndarray) -> str:
    return f"{bits.size}\n{np.packbits(bits).tobytes().hex()}\n"


def _load_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.out is not None:
        changes["out_dir"] = args.out
    if changes:
        cfg = RunConfig.from_dict({**cfg.to_dict(), **changes})
    return cfg


def _detector(args, cfg: RunConfig) -> DetectorModel:
    eta = args.eta if args.eta is not None else cfg.eta
    v_el = args.v_el if args.v_el is not None else cfg.v_el
    trusted = cfg.trusted if args.untrusted is None else not args.untrusted
    return DetectorModel(eta=eta, v_el=v_el, trusted=trusted)


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    result = simulate(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "key_alice.txt").write_text(_key_text(result.key_alice))
    (out / "key_bob.txt").write_text(_key_text(result.key_bob))
    _dump_json(result.record(), out / "report.json")
    # location and worker count do not affect results; leaving them out keeps
    # run.json identical across otherwise equal runs
    run_cfg = {k: v for k, v in cfg.to_dict().items() if k not in ("out_dir", "workers")}
    _dump_json({"config": run_cfg, "pe_block_indices": result.pe_indices.tolist()},
               out / "run.json")
    if result.key_length == 0:
        print(f"no positive rate: zero-length key ({result.notice})")
    else:
        print(f"key length {result.key_length} bits; keys match")
    return EXIT_OK


def cmd_figure(args) -> int:
    cfg = _load_config(args) if args.config else RunConfig()
    kwargs = {}
    if args.which in (2, 3):
        kwargs["det"] = _detector(args, cfg)
        if args.xi is not None:
            kwargs["xi"] = args.xi
        if args.loss is not None:
            kwargs["loss_db_per_km"] = args.loss
    if args.which == 2 and args.distance is not None:
        kwargs["distance_km"] = args.distance
    if args.which == 3 and args.beta is not None:
        kwargs["beta"] = args.beta[0]
    if args.which == 2 and args.beta is not None:
        kwargs["betas"] = tuple(args.beta)
    header, rows = figures.figure(args.which, **kwargs)
    _emit_csv(header, rows, args.out, f"figure{args.which}.csv")
    return EXIT_OK


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None


def cmd_recon_bench(args) -> int:
    cfg = _load_config(args) if args.config else RunConfig()
    code_id = args.code or cfg.code
    rep = args.repetition or cfg.repetition
    code = load_code(code_id, repetition=rep, max_iter=args.max_iter or cfg.max_iter)
    seed = cfg.seed if args.seed is None else args.seed
    workers = args.workers or cfg.workers
    header = ["snr", "capacity", "frames", "fer", "measured_beta", "code_rate",
              "syndrome_bits", "checksum_bits", "leaked_bits_per_frame", "mean_iterations"]
    rows = []
    for k, s in enumerate(_parse_grid(args.snr)):
        r = benchmark_point(code, s, args.frames, seed=[seed, k], workers=workers)
        summ = r.summary()
        rows.append((s, r.capacity, r.n_frames, r.frame_error_rate, r.measured_beta, r.code_rate,
                     r.syndrome_bits_per_frame, r.checksum_bits_per_frame,
                     r.leaked_bits_per_frame, summ["mean_iterations"]))
        log.info("snr=%g fer=%g beta=%g", s, r.frame_error_rate, r.measured_beta)
    _emit_csv(header, rows, args.out, "recon_bench.csv")
    return EXIT_OK


def cmd_keyrate(args) -> int:
    cfg = _load_config(args) if args.config else RunConfig()
    det = _detector(args, cfg)
    T = args.T if args.T is not None else cfg.T
    dist = args.distance if args.distance is not None else cfg.distance_km
    if T is None and dist is None:
        T = 1.0
    if T is not None and dist is not None:
        raise UsageError("give either --T or --distance")
    p = RateParams(xi=args.xi if args.xi is not None else cfg.xi, det=det,
                   beta=args.beta if args.beta is not None else cfg.beta_target,
                   T=T, distance_km=dist, loss_db_per_km=args.loss or cfg.loss_db_per_km,
                   N=args.N, eps_PE=cfg.eps_PE, eps_PA=cfg.eps_PA, eps_bar=cfg.eps_bar,
                   pe_fraction=cfg.pe_fraction)
    if args.V_A is None:
        report = optimize_modulation(p)
    else:
        report = rate_at(args.V_A, p)
    _dump_json(report.to_dict(), Path(args.out) / "keyrate.json" if args.out else None)
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = _load_config(args) if args.config else RunConfig()
    det = _detector(args, cfg)
    with open(args.input, newline="") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or not {"x", "y"} <= set(reader.fieldnames):
            raise UsageError(f"{args.input}: need CSV columns 'x' and 'y'")
        try:
            pairs = [(float(r["x"]), float(r["y"])) for r in reader]
        except ValueError as exc:
            raise UsageError(f"{args.input}: {exc}") from None
    arr = np.array(pairs, dtype=float).reshape(-1, 2)
    eps = args.eps_pe if args.eps_pe is not None else cfg.eps_PE
    est = confidence_bounds(estimate(arr[:, 0], arr[:, 1]), eps, det)
    _dump_json(est.__dict__, Path(args.out) / "estimation.json" if args.out else None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--workers", type=int, help="parallel reconciliation workers")
    common.add_argument("--out", metavar="DIR", help="output directory (default: stdout or config out_dir)")
    common.add_argument("-v", "--verbose", action="store_true")

    det_opts = argparse.ArgumentParser(add_help=False)
    det_opts.add_argument("--eta", type=float, help="detector efficiency")
    det_opts.add_argument("--v-el", dest="v_el", type=float, help="electronic noise (SNU)")
    det_opts.add_argument("--untrusted", action="store_const", const=True, default=None,
                          help="treat detector noise as untrusted")

    parser = argparse.ArgumentParser(prog="cvqkd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="end-to-end protocol run")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("figure", parents=[common, det_opts], help="figure data as CSV")
    p.add_argument("which", type=int, help="figure number (1, 2 or 3)")
    p.add_argument("--xi", type=float)
    p.add_argument("--beta", type=float, nargs="+")
    p.add_argument("--distance", type=float, help="distance for figure 2 (km)")
    p.add_argument("--loss", type=float, help="fibre loss (dB/km)")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("recon-bench", parents=[common], help="FER and efficiency versus SNR")
    p.add_argument("--code", help="code id (e.g. r1/2-n4096) or code file path")
    p.add_argument("--repetition", type=int)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--snr", default="0.25,0.5,1,2", help="comma-separated SNR grid")
    p.add_argument("--frames", type=int, default=20)
    p.set_defaults(func=cmd_recon_bench)

    p = sub.add_parser("keyrate", parents=[common, det_opts], help="single key-rate report")
    p.add_argument("--V-A", dest="V_A", type=float, help="modulation variance (omit to optimise)")
    p.add_argument("--T", type=float)
    p.add_argument("--distance", type=float)
    p.add_argument("--loss", type=float)
    p.add_argument("--xi", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--N", type=float, help="block length in coordinates (finite-size rate)")
    p.set_defaults(func=cmd_keyrate)

    p = sub.add_parser("estimate", parents=[common, det_opts], help="estimate (T, xi) from a CSV of x,y pairs")
    p.add_argument("--input", required=True, metavar="CSV")
    p.add_argument("--eps-pe", dest="eps_pe", type=float)
    p.set_defaults(func=cmd_estimate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        _report(exc)
        return EXIT_USAGE
    except CVQKDError as exc:
        _report(exc)
        return EXIT_NUMERIC
    except OSError as exc:
        _report(exc)
        return EXIT_IO


def _report(exc: Exception):
    tag = getattr(exc, "stage", None)
    prefix = f"error [{tag}]" if tag else "error"
    print(f"{prefix}: {exc}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
