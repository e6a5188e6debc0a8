"""Command-line interface: ``sector-count {count,sweep,radial,spatial,ball,verify}``.

Options may also come from a config file of ``key = value`` lines
(``--config``); command-line flags win over the file, the file over
built-in defaults.  Keys are the long option names with dashes or
underscores.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import experiments as ex
from .counting import ball_count, count_sector, count_sweep, picard_config
from .geometry import Point
from .suites import SUITES, oracle_suite, sandwich_suite, sandwich_triples

HEADER = "# sector-count v1"
RECORD_COLUMNS = "kind,X,sample_id,sample_value,err,err_sq"


def fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def row(*vals) -> str:
    return ",".join(fmt(v) for v in vals)


def parse_point(text: str) -> Point:
    try:
        x1, x2, y = (float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x1,x2,y but got {text!r}")
    if not y > 0:
        raise argparse.ArgumentTypeError(f"point needs y > 0, got y={y}")
    return Point(x1, x2, y)


def parse_floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def parse_region(text: str):
    vals = parse_floats(text)
    if len(vals) != 6:
        raise argparse.ArgumentTypeError("region needs x1lo,x1hi,x2lo,x2hi,ylo,yhi")
    return (vals[0], vals[1]), (vals[2], vals[3]), (vals[4], vals[5])


def read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    p.add_argument("--output", "-o", default="-", help="output CSV path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sector-count", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="N(p, X), main term and error")
    p.add_argument("--p", type=parse_point, required=True, help="base point x1,x2,y")
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--mode", choices=("reduced", "full"), default="reduced")
    _add_common(p)

    p = sub.add_parser("sweep", help="counts over an X grid plus fitted exponents")
    p.add_argument("--p", type=parse_point, required=True)
    p.add_argument("--X-min", type=float, default=20.0)
    p.add_argument("--X-max", type=float, default=640.0)
    p.add_argument("--n", type=int, default=12, help="number of grid points")
    p.add_argument("--grid", choices=("geometric", "linear"), default="geometric")
    p.add_argument("--X-list", type=parse_floats, help="explicit X values, overrides the grid")
    _add_common(p)

    p = sub.add_parser("radial", help="radial mean square of e(p, X_k)")
    p.add_argument("--p", type=parse_point, required=True)
    p.add_argument("--X", type=parse_floats, required=True, help="comma-separated X values")
    p.add_argument("--R", type=int, help="samples per X (default ceil(X^(2/3)) + 1)")
    p.add_argument("--eps", type=float, help="spacing (default X/(2R))")
    _add_common(p)

    p = sub.add_parser("spatial", help="spatial mean square of e(p_k, X)")
    p.add_argument("--X", type=parse_floats, required=True)
    p.add_argument("--R", type=int, help="samples per X (default floor(X) + 1)")
    p.add_argument("--eps", type=float, help=f"spacing (default ({ex.SPATIAL_PACKING}/R)^(1/3))")
    p.add_argument("--region", type=parse_region, default=ex.DEFAULT_REGION,
                   help="x1lo,x1hi,x2lo,x2hi,ylo,yhi")
    p.add_argument("--seed", type=int, help="sampling seed (default $SECTOR_COUNT_SEED or built-in)")
    _add_common(p)

    p = sub.add_parser("ball", help="#{gamma : delta(p, gamma q) <= x}")
    p.add_argument("--p", type=parse_point, required=True)
    p.add_argument("--q", type=parse_point, help="defaults to p")
    p.add_argument("--x", type=parse_floats, required=True, help="comma-separated x values")
    _add_common(p)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--depth", type=int, default=5, help="oracle depth")
    p.add_argument("--X", type=float, help="sandwich: single X (default: 50 random triples)")
    p.add_argument("--width", type=float, help="sandwich: smoothing width (default X^(-1/2))")
    p.add_argument("--json", action="store_true", help="JSON lines instead of text")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        cfg = read_config(known.config)
        sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        chosen = [tok for tok in argv if tok in sub.choices]
        for name, sp in sub.choices.items():
            if chosen and name != chosen[0]:
                continue
            converted = {}
            for action in sp._actions:
                if action.dest in cfg:
                    raw = cfg[action.dest]
                    converted[action.dest] = action.type(raw) if action.type else raw
                    action.required = False
            sp.set_defaults(**converted)
    return parser.parse_args(argv)


def _open(path: str):
    return sys.stdout if path == "-" else open(path, "w", encoding="utf-8", newline="\n")


def cmd_count(args, out) -> int:
    if not args.X >= 1:
        raise ValueError(f"X must be >= 1, got {args.X}")
    r = count_sector(args.p, args.X, picard_config(), mode=args.mode, threads=args.threads)
    print(HEADER, file=out)
    print("x1,x2,y,X,N,M,err,candidates,cosets", file=out)
    print(row(args.p.x1, args.p.x2, args.p.y, args.X, r.n, r.main, r.err, r.candidates_scanned, r.cosets_kept),
          file=out)
    return 0


def cmd_sweep(args, out) -> int:
    if args.X_list:
        Xs = args.X_list
    elif args.grid == "geometric":
        Xs = ex.geometric_grid(args.X_min, args.X_max, args.n)
    else:
        Xs = [args.X_min + (args.X_max - args.X_min) * k / (args.n - 1) for k in range(args.n)]
    if min(Xs) < 1:
        raise ValueError("all X must be >= 1")
    results = count_sweep(args.p, Xs, picard_config(), threads=args.threads)
    print(HEADER, file=out)
    print("x1,x2,y,X,N,M,err,candidates,cosets", file=out)
    for X, r in zip(Xs, results):
        print(row(args.p.x1, args.p.x2, args.p.y, X, r.n, r.main, r.err, r.candidates_scanned, r.cosets_kept),
              file=out)
    fit_n = ex.fit_exponent([(X, r.n) for X, r in zip(Xs, results)])
    fit_e = ex.fit_exponent([(X, abs(r.err)) for X, r in zip(Xs, results)])
    print(f"# fit N slope={fmt(fit_n.slope)} stderr={fmt(fit_n.stderr)}", file=out)
    print(f"# fit |err| slope={fmt(fit_e.slope)} stderr={fmt(fit_e.stderr)} dropped={fit_e.dropped}", file=out)
    return 0


def _emit_records(records, out) -> None:
    for r in records:
        print(row(r.kind, r.X, r.sample_id, r.sample_value, r.err, r.err_sq), file=out)


def _summary(kind: str, means: list[tuple[float, float]], out) -> None:
    for X, m in means:
        print(f"# mean_square {kind} X={fmt(X)} value={fmt(m)}", file=out)
    if len(means) >= 3:
        fit = ex.fit_exponent(means)
        print(f"# fit {kind} slope={fmt(fit.slope)} stderr={fmt(fit.stderr)}", file=out)


def cmd_radial(args, out) -> int:
    specs = []
    for X in args.X:
        spec = ex.SpacingSpec.radial_default(X)
        R = args.R or spec.R
        spec = ex.SpacingSpec(R, args.eps or X / (2 * R), "radial")
        spec.validate(X)
        specs.append(spec)
    print(HEADER, file=out)
    print(RECORD_COLUMNS, file=out)
    means = []
    for X, spec in zip(args.X, specs):
        print(f"# spacing radial X={fmt(X)} R={spec.R} eps={fmt(spec.eps)}", file=out)
        m, records = ex.radial_mean_square(args.p, X, spec, picard_config(), threads=args.threads)
        _emit_records(records, out)
        means.append((X, m))
    _summary("radial", means, out)
    return 0


def cmd_spatial(args, out) -> int:
    seed = ex.default_seed() if args.seed is None else args.seed
    specs = []
    for X in args.X:
        R = args.R or ex.SpacingSpec.spatial_default(X).R
        spec = ex.SpacingSpec(R, args.eps or (ex.SPATIAL_PACKING / R) ** (1 / 3), "spatial")
        spec.validate(X)
        specs.append(spec)
    print(HEADER, file=out)
    print(f"# seed {seed}", file=out)
    print(RECORD_COLUMNS, file=out)
    means = []
    for X, spec in zip(args.X, specs):
        print(f"# spacing spatial X={fmt(X)} R={spec.R} eps={fmt(spec.eps)}", file=out)
        m, records = ex.spatial_mean_square(X, spec, args.region, picard_config(), seed=seed, threads=args.threads)
        _emit_records(records, out)
        means.append((X, m))
    _summary("spatial", means, out)
    return 0


def cmd_ball(args, out) -> int:
    q = args.q or args.p
    print(HEADER, file=out)
    print("x,count,ratio", file=out)
    for x in args.x:
        if not x >= 1:
            raise ValueError(f"x must be >= 1, got {x}")
        n = ball_count(args.p, q, x, threads=1)
        print(row(x, n, n / (x * x)), file=out)
    return 0


def cmd_verify(args, out) -> int:
    if args.suite == "oracle":
        checks = oracle_suite(depth=args.depth)
    elif args.suite == "sandwich" and args.X is not None:
        if not args.X >= 2:
            raise ValueError("sandwich needs X >= 2")
        width = args.width if args.width is not None else args.X ** -0.5
        base = sandwich_triples()
        checks = sandwich_suite([(p, args.X, width) for p, _, _ in base])
    else:
        checks = SUITES[args.suite]()
    ok = True
    for c in checks:
        ok &= c.passed
        print(json.dumps(c.record()) if args.json else c.line(), file=out, flush=True)
        if not c.passed:
            print(f"invariant failed: {c.suite}/{c.name} inputs={c.inputs}", file=sys.stderr)
    return 0 if ok else 1


COMMANDS = {"count": cmd_count, "sweep": cmd_sweep, "radial": cmd_radial, "spatial": cmd_spatial,
            "ball": cmd_ball, "verify": cmd_verify}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = _open(getattr(args, "output", "-"))
    try:
        return COMMANDS[args.command](args, out)
    except (ValueError, RuntimeError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
