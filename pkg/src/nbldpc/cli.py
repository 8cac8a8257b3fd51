"""Command-line entry point: ``nbldpc <subcommand> ...``.

Every subcommand accepts ``--config FILE.json``; keys in the file are
defaults for the same-named options and explicit flags override them.

Exit codes: 0 success, 1 decode detected errors it could not correct,
2 usage error, 3 code construction failure, 4 I/O or file-format error.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import arch, bench, plotting
from .code_builder import CodeParams, build_code, default_check_degree
from .codec import MEMORY, MODES, ReceivedWord, encode, syndrome
from .codefile import load_code, save_code
from .decoder import Decoder, DecoderConfig
from .errors import ChecksumMismatch, InfeasibleDegrees, OutOfDomain, ParseError, RankDeficient
from .gfp import FieldSpec
from .pim import CELL_SUBSTITUTION, OUTPUT_OFFSET, SYMBOL_SUBSTITUTION

EXIT_OK = 0
EXIT_UNCORRECTED = 1
EXIT_USAGE = 2
EXIT_CONSTRUCTION = 3
EXIT_IO = 4

log = logging.getLogger("nbldpc")


class UsageError(Exception):
    pass


def _symbols(text: str) -> np.ndarray:
    """Parse ``"0,1,2"`` / ``"0 1 2"`` or ``@file`` into an int array."""
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    try:
        return np.array([int(t) for t in text.replace(",", " ").split()], dtype=np.int64)
    except ValueError as exc:
        raise UsageError(f"cannot parse symbol list: {exc}") from None


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in str(text).replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _float_list(text: str) -> list:
    try:
        return [float(t) for t in str(text).replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_construct(a) -> int:
    if not 0 < a.m < a.l:
        raise UsageError(f"need 0 < m < l (l - m check symbols), got l={a.l}, m={a.m}")
    try:
        spec = FieldSpec(a.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    d_c = a.d_c or default_check_degree(a.l, a.m, a.d_v)
    params = CodeParams(spec, a.l, a.m, a.d_v, d_c, a.seed)
    try:
        g, h, attempts = build_code(params, max_retries=a.max_retries)
    except (InfeasibleDegrees, RankDeficient) as exc:
        print(f"construction failed ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    out = a.out or f"code_p{a.p}_l{a.l}_m{a.m}.code"
    save_code(g, h, out)
    summary = {
        "file": str(out), "p": a.p, "l": a.l, "m": a.m, "rate": round(a.m / a.l, 6),
        "d_v": a.d_v, "d_c": d_c, "girth": h.girth, "seed": h.seed, "attempts": attempts,
        "row_degree_range": [min(h.row_degrees), max(h.row_degrees)],
        "col_degree_range": [min(h.col_degrees), max(h.col_degrees)],
        "validate": True,
    }
    print(json.dumps(summary))
    return EXIT_OK


def cmd_encode(a) -> int:
    g, _ = load_code(a.code)
    if a.word is None:
        rng = np.random.default_rng(a.seed)
        w = rng.integers(0, g.spec.p, g.m)
    else:
        w = _symbols(a.word)
    if w.size != g.m:
        raise UsageError(f"information word has {w.size} symbols, code expects m={g.m}")
    if np.any((w < 0) | (w >= g.spec.p)):
        raise UsageError(f"information symbols must lie in [0, {g.spec.p})")
    print(" ".join(map(str, encode(w, g).tolist())))
    return EXIT_OK


def cmd_decode(a) -> int:
    g, h = load_code(a.code)
    values = _symbols(a.word)
    if values.size != h.n_cols:
        raise UsageError(f"received word has {values.size} symbols, code length is {h.n_cols}")
    try:
        cfg = DecoderConfig(a.max_iters, a.l_max, a.vn_messages)
        r = ReceivedWord(values, a.mode)
        r.check_domain(h.spec.p)
    except (ValueError, OutOfDomain) as exc:
        raise UsageError(str(exc)) from None
    trace = open(a.trace, "w") if a.trace else None
    try:
        res = Decoder(h, cfg).decode(r, trace=trace)
    finally:
        if trace:
            trace.close()
    out = {
        "converged": bool(res.converged),
        "iterations": int(res.iterations_used),
        "initial_syndrome_zero": bool(not syndrome(r, h).any()),
        "symbols": res.corrected_symbols.tolist(),
        "information": res.corrected_symbols[g.info_positions].tolist(),
    }
    if res.corrected_integers is not None:
        out["integers"] = res.corrected_integers.tolist()
    print(json.dumps(out))
    return EXIT_OK if res.converged else EXIT_UNCORRECTED


EXPERIMENT_KEYS = [f for f in bench.ExperimentConfig.__dataclass_fields__]


def cmd_ber_sweep(a) -> int:
    d = {k: getattr(a, k) for k in EXPERIMENT_KEYS if getattr(a, k, None) is not None}
    try:
        cfg = bench.ExperimentConfig.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad experiment config: {exc}") from None
    try:
        code = cfg.load_or_build_code()
    except (InfeasibleDegrees, RankDeficient) as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION

    def progress(rec):
        log.info("rate %.3g: pre %.3e post %.3e (%d trials, %.1fs)", rec.rate_in,
                 rec.pre_ecc_ber, rec.post_ecc_ber, rec.trials, rec.wall_time)

    records = bench.run_ber_sweep(cfg, code, progress=progress)
    prefix = Path(a.out_prefix)
    if prefix.parent != Path("."):
        prefix.parent.mkdir(parents=True, exist_ok=True)
    bench.write_csv(records, f"{prefix}.csv")
    bench.write_jsonl(records, f"{prefix}.jsonl")
    Path(f"{prefix}.config.json").write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
    if a.svg:
        plotting.plot_ber({prefix.name: records}, f"{prefix}.svg")
    for rec in records:
        print(f"rate_in={rec.rate_in:.3g} trials={rec.trials} pre={rec.pre_ecc_ber:.4e} "
              f"post={rec.post_ecc_ber:.4e} [{rec.post_ci_low:.2e}, {rec.post_ci_high:.2e}] "
              f"frames={rec.frame_errors} iters={rec.mean_iterations:.2f}")
    return EXIT_OK


def cmd_arch_sweep(a) -> int:
    grid = []
    for n_p, c_p, n_vi, n_ci in itertools.product(a.n_p, a.c_p, a.n_vi, a.n_ci):
        try:
            grid.append(arch.ArchParams(n_p, c_p, n_vi, a.n_va, n_ci, a.n_ca, a.d_v, a.d_c,
                                        a.area_ratio))
        except ValueError as exc:
            log.info("skipping grid point: %s", exc)
    if not grid:
        raise UsageError("arch grid is empty after validation")
    res = arch.sweep_fom(grid, a.m, a.iters, key=a.key)
    out = Path(a.out)
    arch.write_csv(res.rows, out)
    if a.svg:
        x = "n_ci" if len(a.n_ci) > 1 else "feed_ratio"
        plotting.plot_fom(res.rows, out.with_suffix(".svg"), x=x, y=a.key)
    best = {k: res.best[k] for k in ("n_p", "c_p", "n_vi", "n_ci", "feed_ratio", a.key)}
    print(json.dumps({"points": len(res.rows), "best": best, "csv": str(out)}))
    return EXIT_OK


def cmd_plot(a) -> int:
    rows_by_file = {}
    for path in a.csv:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if rows:
            rows_by_file[path] = rows
    if not rows_by_file:
        raise UsageError("no records in the given CSV file(s); nothing to plot")
    kind = a.kind
    first = next(iter(rows_by_file.values()))[0]
    if kind == "auto":
        kind = "ber" if "post_ecc_ber" in first else "fom"
    if kind == "ber":
        if "post_ecc_ber" not in first:
            raise UsageError("CSV lacks BER columns")
        series = {Path(p).stem: bench.read_csv(p) for p in rows_by_file}
        plotting.plot_ber(series, a.out)
    else:
        if a.y not in first or a.x not in first:
            raise UsageError(f"CSV lacks columns {a.x!r}/{a.y!r}")
        rows = [r for rs in rows_by_file.values() for r in rs]
        plotting.plot_fom(rows, a.out, x=a.x, y=a.y)
    print(a.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _decoder_opts(sp):
    sp.add_argument("--max-iters", dest="max_iters", type=int, default=16)
    sp.add_argument("--l-max", dest="l_max", type=int, default=63)
    sp.add_argument("--vn-messages", dest="vn_messages", choices=["temporal", "extrinsic"],
                    default="temporal")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nbldpc", description="NB-LDPC codes for PIM error correction")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("construct", help="build and save a code")
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--l", type=int, default=1280)
    sp.add_argument("--m", type=int, default=1024)
    sp.add_argument("--dv", dest="d_v", type=int, default=3)
    sp.add_argument("--dc", dest="d_c", type=int, default=None,
                    help="row degree (default: smallest feasible)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-retries", dest="max_retries", type=int, default=20)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("encode", help="encode one information word")
    sp.add_argument("--code", required=True)
    sp.add_argument("--word", default=None, help="m symbols, or @file; random if omitted")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="decode one received word")
    sp.add_argument("--code", required=True)
    sp.add_argument("--word", required=True, help="l values, or @file")
    sp.add_argument("--mode", choices=MODES, default=MEMORY)
    sp.add_argument("--trace", default=None, help="write per-iteration LLVs as JSON lines")
    _decoder_opts(sp)
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("ber-sweep", help="Monte-Carlo BER sweep")
    sp.add_argument("--p", type=int)
    sp.add_argument("--l", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--dv", dest="d_v", type=int)
    sp.add_argument("--dc", dest="d_c", type=int)
    sp.add_argument("--code-seed", dest="code_seed", type=int)
    sp.add_argument("--code", dest="code_file")
    sp.add_argument("--mode", choices=MODES)
    sp.add_argument("--fault", dest="fault_kind",
                    choices=[SYMBOL_SUBSTITUTION, CELL_SUBSTITUTION, OUTPUT_OFFSET])
    sp.add_argument("--rates", type=_float_list)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--min-errors", dest="min_error_events", type=int)
    sp.add_argument("--max-iters", dest="max_iters", type=int)
    sp.add_argument("--l-max", dest="l_max", type=int)
    sp.add_argument("--vn-messages", dest="vn_messages", choices=["temporal", "extrinsic"])
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--chunk-size", dest="chunk_size", type=int)
    sp.add_argument("--pim-rows", dest="pim_rows", type=int)
    sp.add_argument("--pim-input-max", dest="pim_input_max", type=int)
    sp.add_argument("--offset-magnitude", dest="offset_magnitude", type=int)
    sp.add_argument("--out-prefix", dest="out_prefix", default="ber")
    sp.add_argument("--svg", action="store_true", help="also render <prefix>.svg")
    sp.set_defaults(func=cmd_ber_sweep)

    sp = sub.add_parser("arch-sweep", help="cycle/FoM sweep of the decoder architecture")
    sp.add_argument("--n-p", dest="n_p", type=_int_list, default=[4])
    sp.add_argument("--c-p", dest="c_p", type=_int_list, default=[9])
    sp.add_argument("--n-vi", dest="n_vi", type=_int_list, default=[34])
    sp.add_argument("--n-va", dest="n_va", type=int, default=256)
    sp.add_argument("--n-ci", dest="n_ci", type=_int_list, default=[1, 2, 4, 8, 16])
    sp.add_argument("--n-ca", dest="n_ca", type=int, default=16)
    sp.add_argument("--dv", dest="d_v", type=int, default=3)
    sp.add_argument("--dc", dest="d_c", type=int, default=6)
    sp.add_argument("--area-ratio", dest="area_ratio", type=float, default=arch.CN_AREA_RATIO)
    sp.add_argument("--m", type=int, default=240)
    sp.add_argument("--iters", type=int, default=4)
    sp.add_argument("--key", choices=["fom_proxy", "node_throughput", "throughput"],
                    default="fom_proxy")
    sp.add_argument("--out", default="arch.csv")
    sp.add_argument("--svg", action="store_true")
    sp.set_defaults(func=cmd_arch_sweep)

    sp = sub.add_parser("plot", help="render CSV records to SVG")
    sp.add_argument("csv", nargs="+")
    sp.add_argument("--out", default="plot.svg")
    sp.add_argument("--kind", choices=["auto", "ber", "fom"], default="auto")
    sp.add_argument("--x", default="n_ci")
    sp.add_argument("--y", default="fom_proxy")
    sp.set_defaults(func=cmd_plot)

    for p in sub.choices.values():
        p.add_argument("--config", default=None, help="JSON file of option defaults")
    return ap


def _apply_config(ap, argv):
    """Reparse ``argv`` with defaults taken from the ``--config`` JSON file."""
    args = ap.parse_args(argv)
    if not args.config:
        return args
    try:
        with open(args.config) as fh:
            conf = json.load(fh)
    except OSError:
        raise
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {args.config}: {exc}") from None
    if not isinstance(conf, dict):
        raise UsageError("config file must hold a JSON object")
    sp = ap._subparsers._group_actions[0].choices[args.command]
    dests = {a.dest for a in sp._actions}
    unknown = set(conf) - dests
    if unknown:
        raise UsageError(f"unknown config keys for {args.command}: {sorted(unknown)}")
    sp.set_defaults(**conf)
    return ap.parse_args(argv)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = _apply_config(ap, argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    except UsageError as exc:
        print(f"nbldpc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"nbldpc: error: {exc}", file=sys.stderr)
        return EXIT_IO
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"nbldpc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ParseError, ChecksumMismatch) as exc:
        print(f"nbldpc: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
