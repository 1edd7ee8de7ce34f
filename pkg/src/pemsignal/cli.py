"""Command-line front end: ``pemsignal {generate,detect,evaluate}``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import PemError
from .matrix import DEFAULT_GROUP_SIZE, DEFAULT_WINDOW_DAYS, TailPolicy
from .ingest import DEFAULT_MIN_REGISTRATION_DAYS
from .pipeline import run_detection
from .readcode import load_dictionary
from .signal import Method, evaluate_topk, load_reference, read_table, to_json, to_tsv
from .synthgen import SynthConfig, choose_planted, config_from_mapping, generate, load_config

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _alpha(text):
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pemsignal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    gen = sub.add_parser("generate", help="write a synthetic cohort")
    gen.add_argument("--out-dir", required=True, type=Path)
    gen.add_argument("--config", type=Path, help="key=value config file")
    gen.add_argument("--n-patients", type=_nonneg_int)
    gen.add_argument("--n-codes", type=_positive_int)
    gen.add_argument("--drug", dest="drug_code")
    gen.add_argument("--seed", type=_nonneg_int)
    gen.add_argument("--study-span-days", type=_positive_int)
    gen.add_argument("--base-event-rate", type=float)
    gen.add_argument("--window-days", type=_positive_int)
    gen.add_argument("--planted", help="CODE:MULT[,CODE:MULT...]")
    gen.add_argument("--n-planted", type=_nonneg_int,
                     help="pick this many planted codes automatically")
    gen.add_argument("--multiplier", type=float, default=5.0,
                     help="odds multiplier for --n-planted (default 5.0)")

    det = sub.add_parser("detect", help="run the detection pipeline")
    det.add_argument("--patients", required=True, type=Path)
    det.add_argument("--therapy", required=True, type=Path)
    det.add_argument("--medical", required=True, type=Path)
    det.add_argument("--drug", required=True)
    det.add_argument("--level", type=int, choices=(3, 5), default=5)
    det.add_argument("--method", choices=[m.value for m in Method], default="ttest")
    det.add_argument("--window-days", type=_positive_int, default=DEFAULT_WINDOW_DAYS)
    det.add_argument("--group-size", type=_positive_int, default=DEFAULT_GROUP_SIZE)
    det.add_argument("--alpha", type=_alpha, default=0.05)
    det.add_argument("--top-k", type=_positive_int, default=20)
    det.add_argument("--tail-policy", choices=[t.value for t in TailPolicy],
                     default=TailPolicy.BASELINE.value)
    det.add_argument("--min-registration-days", type=_nonneg_int,
                     default=DEFAULT_MIN_REGISTRATION_DAYS)
    det.add_argument("--dictionary", type=Path, help="readcode,description CSV")
    det.add_argument("--format", choices=("tsv", "json"), default="tsv")
    det.add_argument("--out", type=Path)

    ev = sub.add_parser("evaluate", help="top-k accuracy of a signal table")
    ev.add_argument("--table", required=True, type=Path)
    ev.add_argument("--reference", required=True, type=Path)
    ev.add_argument("--k", type=_positive_int, default=20)
    return parser


def _cmd_generate(args):
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = SynthConfig()
    overrides = {key: getattr(args, key) for key in
                 ("n_patients", "n_codes", "drug_code", "seed", "study_span_days",
                  "base_event_rate", "window_days") if getattr(args, key) is not None}
    if args.planted is not None:
        overrides["planted"] = args.planted
    cfg = config_from_mapping(overrides, cfg)
    if args.n_planted:
        if args.planted is not None:
            raise UsageError("pemsignal generate: --planted and --n-planted are exclusive")
        cfg = config_from_mapping(
            {"planted": choose_planted(cfg.n_codes, args.n_planted, args.multiplier, cfg.seed)},
            cfg)
    summary = generate(cfg, args.out_dir)
    print(f"wrote {summary.n_patients} patients, {summary.n_prescriptions} prescriptions, "
          f"{summary.n_events} events to {args.out_dir}", file=sys.stderr)
    return EXIT_OK


def _cmd_detect(args):
    descriptions = load_dictionary(args.dictionary) if args.dictionary else None
    table = run_detection(args.patients, args.therapy, args.medical, args.drug,
                          level=args.level, window_days=args.window_days,
                          group_size=args.group_size, method=args.method, alpha=args.alpha,
                          top_k=args.top_k, tail_policy=args.tail_policy,
                          min_registration_days=args.min_registration_days,
                          descriptions=descriptions)
    text = to_json(table) if args.format == "json" else to_tsv(table)
    if args.out:
        try:
            args.out.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise PemError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_evaluate(args):
    table = read_table(args.table)
    reference = load_reference(args.reference)
    print(f"{evaluate_topk(table, reference, args.k):.2f}")
    return EXIT_OK


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        handler = {"generate": _cmd_generate, "detect": _cmd_detect,
                   "evaluate": _cmd_evaluate}[args.command]
        return handler(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (PemError, ValueError) as exc:
        print(f"pemsignal: error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
