"""Command line entry point ``gfl``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import harness
from .chmorph import SeqS, phi_seq
from .fields import parse_field
from .flags import enumerate_flags


def _seq(text: str) -> SeqS:
    try:
        return SeqS(tuple(int(x) for x in text.split(",") if x))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _field(text: str):
    try:
        return parse_field(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common(p: argparse.ArgumentParser, sweep: bool = True):
    p.add_argument("--field", type=_field, default=_field("2"),
                   help="q, or p,m, or p,m,c0,...,cm (default 2)")
    p.add_argument("--format", choices=harness.FORMATS, default="json", dest="fmt")
    p.add_argument("--out", help="write the report here instead of stdout")
    if sweep:
        p.add_argument("--dmax", type=int, default=4)
        p.add_argument("--rmax", type=int, default=3)
        p.add_argument("--smax", type=int, default=6)
        p.add_argument("--cap", type=int, default=harness.DEFAULT_CAP,
                       help="skip cells whose divided power has larger dimension")
        p.add_argument("--entry-cap", type=int, default=harness.DEFAULT_ENTRY_CAP,
                       help="skip cells whose phi matrix has more entries (0 disables)")
        p.add_argument("--shift-cap", type=int, default=harness.DEFAULT_SHIFT_CAP,
                       help="dimension cap for shifted cells in stabilize runs")
        p.add_argument("--shift-entry-cap", type=int, default=harness.DEFAULT_SHIFT_ENTRY_CAP,
                       help="entry cap for shifted cells in stabilize runs (0 disables)")
        p.add_argument("--weak", action="store_true",
                       help="sweep weakly decreasing sequences as well")
        p.add_argument("--threads", type=int, help="worker threads (default GFL_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gfl", description="Flag modules and divided powers over GF(q).")
    sub = ap.add_subparsers(dest="cmd", required=True)
    for name in ("verify-theorem", "lemmas", "stabilize", "tightness"):
        _common(sub.add_parser(name))
    p = sub.add_parser("ring-of-lines")
    _common(p)
    p.add_argument("--nmax", type=int, default=20)
    p = sub.add_parser("phi", help="build one phi_s matrix")
    _common(p, sweep=False)
    p.add_argument("--seq", type=_seq, required=True, help="comma separated, e.g. 4,2")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--emit-matrix", action="store_true")
    p.add_argument("--hex", action="store_true", help="GF(2): emit packed hex rows")
    p = sub.add_parser("flags", help="enumerate complete flags")
    _common(p, sweep=False)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--list", action="store_true")
    return ap


MODE_OF = {"verify-theorem": "theorem", "lemmas": "lemmas", "stabilize": "stabilize",
           "tightness": "tightness", "ring-of-lines": "ring-of-lines"}


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _phi(args) -> str:
    from .linalg import rank
    M = phi_seq(args.field, args.seq, args.dim)
    info = {"field": args.field.to_json(), "seq": list(args.seq), "dim": args.dim,
            "nrows": M.nrows, "ncols": M.ncols, "rank": rank(M)}
    info["injective"] = info["rank"] == M.ncols
    if args.emit_matrix:
        if args.hex:
            info["hex_rows"] = M.hex_rows()
        else:
            info["matrix"] = M.to_json()
    return json.dumps(info, indent=2, sort_keys=True) + "\n"


def _flags(args) -> str:
    flags = enumerate_flags(args.field, args.dim, args.length)
    out = {"field": args.field.to_json(), "d": args.dim, "r": args.length, "count": len(flags)}
    if args.list:
        out["flags"] = [f.to_json(args.field) for f in flags]
    return json.dumps(out, indent=2, sort_keys=True) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.cmd == "phi":
            if args.hex and args.field.q != 2:
                raise ValueError("--hex needs GF(2)")
            _emit(_phi(args), args.out)
            return harness.EXIT_OK
        if args.cmd == "flags":
            _emit(_flags(args), args.out)
            return harness.EXIT_OK
        cfg = harness.SweepConfig(
            field=args.field, d_max=args.dmax, r_max=args.rmax, s_max=args.smax,
            mode=MODE_OF[args.cmd], fmt=args.fmt, cap=args.cap,
            entry_cap=args.entry_cap or None, weak=args.weak, shift_cap=args.shift_cap,
            shift_entry_cap=args.shift_entry_cap or None,
            n_max=getattr(args, "nmax", 20), threads=args.threads)
    except ValueError as exc:
        print(f"gfl: error: {exc}", file=sys.stderr)
        return harness.EXIT_USAGE
    text, code = harness.execute(cfg)
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
