"""Command-line front end: ``polarmix <command> ...``.

Exit codes: 0 success, 1 usage or input error, 2 domain rejection
(singular or non-mixing kernel, non-symmetric channel).

Every command that writes files also writes ``<first output>.manifest.json``
recording the command, all flags, the seed, library versions and output
paths. Commands that draw random numbers require ``--seed``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from importlib import metadata
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .channel import ChannelModel, parse_channel, posteriors, transmit
from .code import CodeSpec
from .construction import (
    construct_code,
    dumps_code,
    erasure_profile,
    load_code,
    scores_csv,
    simulate_block_errors,
)
from .decoder import decode_fast
from .errors import (
    AlphabetError,
    NotMixingError,
    NotSymmetricError,
    ParseError,
    PolarError,
    SingularError,
)
from .kernel import Kernel, check_mixing
from .polarlab import DEFAULT_GAMMA, DEFAULT_TAUS, polarization_sweep, stats_csv
from .transform import encode

ERASURE_MARK = "e"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# --------------------------------------------------------------------------
# input helpers


def parse_matrix(text: str) -> np.ndarray:
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"matrix literal {text!r} is not of the form [[...],[...]]") from exc
    m = np.array(rows)
    if m.ndim != 2 or m.size == 0 or m.dtype.kind not in "iu":
        raise ParseError(f"matrix literal {text!r} must be a nonempty list of integer rows")
    return m.astype(np.int64)


def _kernel(args) -> Kernel:
    kern = Kernel(parse_matrix(args.kernel), args.q)
    if not kern.mixing:
        raise NotMixingError(f"kernel {kern.matrix.tolist()} is not mixing")
    return kern


def read_symbols(path, erasure: Optional[int] = None) -> np.ndarray:
    out = []
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        tok = line.strip()
        if not tok:
            continue
        if tok == ERASURE_MARK:
            if erasure is None:
                raise AlphabetError(f"{path}:{n}: erasure mark not allowed here")
            out.append(erasure)
            continue
        try:
            out.append(int(tok))
        except ValueError as exc:
            raise ParseError(f"{path}:{n}: expected an integer symbol, got {tok!r}") from exc
    return np.array(out, dtype=np.int64)


def format_symbols(symbols, erasure: Optional[int] = None) -> str:
    return "".join(
        (ERASURE_MARK if erasure is not None and s == erasure else str(int(s))) + "\n" for s in symbols
    )


def _versions() -> dict:
    try:
        own = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        own = "unknown"
    return {"polarmix": own, "numpy": np.__version__}


def write_outputs(args, files: dict) -> None:
    """Write ``files`` (path -> text) and the manifest beside the first one."""
    for path, text in files.items():
        Path(path).write_text(text)
    first = next(iter(files))
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    manifest = {
        "command": args.command,
        "flags": flags,
        "seed": getattr(args, "seed", None),
        "versions": _versions(),
        "outputs": [str(p) for p in files],
    }
    Path(str(first) + ".manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _emit(args, path: Optional[str], text: str, extra: Optional[dict] = None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    files = {path: text}
    files.update(extra or {})
    write_outputs(args, files)


# --------------------------------------------------------------------------
# commands


def cmd_kernel_check(args) -> int:
    matrix = parse_matrix(args.matrix)
    report = check_mixing(matrix, args.q)
    out = {"q": args.q, "matrix": matrix.tolist()}
    out.update(report.to_dict())
    print(json.dumps(out))
    return 0 if report.mixing else 2


def cmd_construct(args) -> int:
    if (args.rate is None) == (args.threshold is None):
        raise UsageError("give exactly one of --rate or --threshold")
    if args.method == "mc" and args.seed is None:
        raise UsageError("--method mc needs --seed")
    ch = parse_channel(args.channel, args.q)
    code, scores = construct_code(
        ch, _kernel(args), args.t, rate=args.rate, threshold=args.threshold,
        method=args.method, trials=args.trials, seed=args.seed or 0, threads=args.threads,
    )
    scores_path = args.scores or str(Path(args.out).with_suffix("")) + ".scores.csv"
    write_outputs(args, {args.out: dumps_code(code), scores_path: scores_csv(scores)})
    return 0


def cmd_encode(args) -> int:
    code = load_code(args.code)
    msg = read_symbols(args.input)
    z = encode(msg, code)
    if args.channel is None:
        _emit(args, args.out, format_symbols(z))
        return 0
    if args.seed is None:
        raise UsageError("passing the codeword through --channel needs --seed")
    ch = parse_channel(args.channel, code.q)
    y = transmit(z, ch, args.seed)
    _emit(args, args.out, format_symbols(y, ch.q if ch.kind == "qec" else None))
    return 0


def cmd_decode(args) -> int:
    code = load_code(args.code)
    ch = parse_channel(args.channel, code.q)
    y = read_symbols(args.input, ch.q if ch.kind == "qec" else None)
    if y.size != code.n:
        raise ParseError(f"received word has {y.size} symbols, code length is {code.n}")
    out = decode_fast(posteriors(y, ch), code)
    _emit(args, args.out, format_symbols(out.u_hat[code.info_indices]))
    return 0


def _entropy_bound(code: CodeSpec, ch: ChannelModel) -> Optional[float]:
    if ch.kind != "qec":
        return None
    z = erasure_profile(code.kernel, ch.param, code.t).values
    return float(z[code.info_indices].sum())


def cmd_simulate(args) -> int:
    code = load_code(args.code)
    ch = parse_channel(args.channel, code.q)
    errors = simulate_block_errors(code, ch, args.trials, args.seed, args.threads)
    bound = _entropy_bound(code, ch)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trials", "block_errors", "bler", "entropy_bound"])
    w.writerow([args.trials, errors, repr(errors / args.trials), "" if bound is None else repr(bound)])
    _emit(args, args.out, buf.getvalue())
    return 0


def cmd_polarize(args) -> int:
    ch = parse_channel(args.channel, args.q)
    if ch.kind != "qec":
        raise UsageError("polarize tracks the exact martingale and needs an erasure channel")
    stats = polarization_sweep(_kernel(args), ch.param, args.t_max, args.gamma, args.tau)
    _emit(args, args.out, stats_csv(stats))
    return 0


# --------------------------------------------------------------------------
# parser


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polarmix", description="Polar codes over prime fields with mixing kernels.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("kernel-check", help="report whether a matrix is a mixing kernel")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--matrix", required=True, help="literal such as [[1,0],[1,1]]")
    s.set_defaults(func=cmd_kernel_check)

    s = sub.add_parser("construct", help="choose the information set of a code")
    s.add_argument("--channel", required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--kernel", required=True)
    s.add_argument("--t", type=_nonneg, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--rate", type=float)
    g.add_argument("--threshold", type=float)
    s.add_argument("--method", choices=("exact", "mc"), default="exact")
    s.add_argument("--trials", type=_nonneg, default=0)
    s.add_argument("--seed", type=int)
    s.add_argument("--threads", type=_positive, default=1)
    s.add_argument("--out", required=True, help="code JSON path")
    s.add_argument("--scores", help="scores CSV path (default: beside --out)")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("encode", help="encode a message file")
    s.add_argument("--code", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.add_argument("--channel", help="optionally pass the codeword through this channel")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("decode", help="SC-decode a received word")
    s.add_argument("--code", required=True)
    s.add_argument("--channel", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_decode)

    s = sub.add_parser("simulate", help="estimate the block error rate")
    s.add_argument("--code", required=True)
    s.add_argument("--channel", required=True)
    s.add_argument("--trials", type=_positive, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--threads", type=_positive, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("polarize", help="exact polarization statistics on an erasure channel")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--kernel", required=True)
    s.add_argument("--channel", required=True)
    s.add_argument("--t-max", type=_positive, required=True)
    s.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    s.add_argument("--tau", type=float, default=DEFAULT_TAUS[0])
    s.add_argument("--out")
    s.set_defaults(func=cmd_polarize)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"polarmix: {exc}", file=sys.stderr)
        return 1
    except (NotMixingError, SingularError, NotSymmetricError) as exc:
        print(f"polarmix: rejected: {exc}", file=sys.stderr)
        return 2
    except (PolarError, OSError, ValueError) as exc:
        print(f"polarmix: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
