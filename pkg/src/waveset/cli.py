"""Command-line front end: ``waveset <command> [options]``.

Exit codes: 0 a wavelet set provably exists (or a check passed), 1 provably
none (or a check failed), 2 heuristic or inconclusive, 3 bad input, 4 any
other library error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

EXIT_BAD_INPUT = 3
EXIT_FAILURE = 4

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _cap_threads() -> int | None:
    """Forward ``WAVESET_THREADS`` to the BLAS pools before numpy loads."""
    raw = os.environ.get("WAVESET_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ValueError(f"WAVESET_THREADS must be a positive integer, got {raw!r}")
    for var in _THREAD_VARS:
        os.environ[var] = str(n)
    return n


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which would read as "inconclusive"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_INPUT, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class ProblemSpec:
    matrix: object
    lattice: object
    radius: Fraction
    jmax: int
    mode: str = "auto"

    @classmethod
    def from_json(cls, obj: dict) -> "ProblemSpec":
        from .errors import ValidationError
        from .lattice import Lattice
        from .linalg import Matrix, parse_scalar

        if not isinstance(obj, dict) or "matrix" not in obj:
            raise ValidationError("problem spec must be an object with a 'matrix' field")
        mode = obj.get("mode", "auto")
        rows = _rows(obj["matrix"])
        a = Matrix.from_rows(rows, mode)
        if "lattice" in obj and obj["lattice"] is not None:
            lat = obj["lattice"]
            if isinstance(lat, dict) and "basis" in lat:
                lattice = Lattice.from_rows(_rows(lat["basis"]), lat.get("mode", mode))
            else:
                lattice = Lattice.from_rows(_rows(lat), mode)
        else:
            lattice = Lattice.integer(a.n)
        if lattice.n != a.n:
            raise ValidationError(f"matrix is {a.n}x{a.n} but the lattice has dimension {lattice.n}")
        radius = parse_scalar(obj.get("radius", 1))
        if not radius > 0:
            raise ValidationError("radius must be positive")
        jmax = obj.get("jmax", 20)
        if not isinstance(jmax, int) or isinstance(jmax, bool) or jmax < 1:
            raise ValidationError("jmax must be a positive integer")
        return cls(a, lattice, radius, jmax, mode)


def _rows(value):
    """Accept a scalar (1x1), a flat list (diagonal), or a list of rows."""
    if isinstance(value, dict):
        value = value.get("rows", value.get("basis"))
    if not isinstance(value, list):
        return [[value]]
    if value and not any(isinstance(r, list) for r in value):
        n = len(value)
        return [[value[i] if i == j else 0 for j in range(n)] for i in range(n)]
    return value


def _parse_value(text: str):
    """Inline ``--matrix``/``--lattice`` values: JSON, else a single scalar string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _problem(args) -> ProblemSpec:
    obj: dict = {}
    if args.spec:
        obj = json.loads(Path(args.spec).read_text())
        if not isinstance(obj, dict):
            from .errors import ValidationError

            raise ValidationError("problem spec must be a JSON object")
    if getattr(args, "matrix", None) is not None:
        obj["matrix"] = _parse_value(args.matrix)
    if getattr(args, "lattice", None) is not None:
        obj["lattice"] = _parse_value(args.lattice)
    if args.jmax is not None:
        obj["jmax"] = args.jmax
    if args.radius is not None:
        obj["radius"] = args.radius
    if "matrix" not in obj:
        from .errors import ValidationError

        raise ValidationError("no matrix given (use --spec FILE or --matrix)")
    return ProblemSpec.from_json(obj)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


def _emit(args, name: str, text: str, artifacts: list) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / name
        path.write_text(text)
        artifacts.append(name)
    else:
        sys.stdout.write(text)


def _header(args) -> dict:
    from . import __version__

    return {"tool_version": __version__, "seed": args.seed}


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    from .existence import decide

    p = _problem(args)
    v = decide(p.matrix, p.lattice, radius=p.radius, jmax=p.jmax)
    report = _header(args) | {"problem": _problem_json(p), "verdict": v.to_json()}
    _emit(args, "analysis.json", _dump(report), [])
    return v.exit_code


def _problem_json(p: ProblemSpec) -> dict:
    return {
        "matrix": p.matrix.to_json(),
        "lattice": p.lattice.to_json(),
        "radius": str(p.radius),
        "jmax": p.jmax,
        "mode": p.mode,
    }


def cmd_count(args) -> int:
    from .existence import series_diagnostics
    from .lattice import count_series

    p = _problem(args)
    s = count_series(p.matrix, p.lattice, p.radius, jmax=p.jmax)
    if args.format == "json":
        report = _header(args) | {"series": s.to_json(), "diagnostics": series_diagnostics(s).to_json()}
        _emit(args, "counts.json", _dump(report), [])
    else:
        _emit(args, "counts.csv", s.to_csv(), [])
    return 0


def cmd_growth(args) -> int:
    from .asymptotics import subspace_growth
    from .existence import candidate_subspaces

    p = _problem(args)
    b = p.matrix.inv()
    rows = []
    for tag, v in candidate_subspaces(p.matrix, p.lattice):
        g = subspace_growth(b, v)
        rows.append({"source": tag, "dim": v.dim} | g.to_json())
    report = _header(args) | {"problem": _problem_json(p), "subspaces": rows}
    _emit(args, "growth.json", _dump(report), [])
    return 0


def cmd_construct(args) -> int:
    from .construct import build_wavelet_core, csb_upgrade, verify_wavelet
    from .linalg import parse_scalar
    from .regions import to_svg

    p = _problem(args)
    L = parse_scalar(args.L) if args.L is not None else None
    tol = parse_scalar(args.tol)
    cand = build_wavelet_core(p.matrix, p.lattice, L=L, K=args.K, tol=tol, maxiter=args.maxiter)
    region = cand.region
    extra = {}
    if not args.no_fill:
        up = csb_upgrade(region, p.matrix, p.lattice, tol=tol)
        region = up.region
        extra["fill_trace"] = up.trace.to_json()
    check = verify_wavelet(region, p.matrix, p.lattice, tol=tol)
    artifacts: list = []
    if args.out:
        _emit(args, "region.json", _dump(region.to_json()), artifacts)
        _emit(args, "trace.csv", cand.trace.to_csv(), artifacts)
        if region.dim <= 2:
            _emit(args, "region.svg", to_svg(region), artifacts)
    report = _header(args) | {
        "problem": _problem_json(p),
        "volume": str(region.volume),
        "generator": None if cand.generator is None else cand.generator.to_json(),
        "extra": cand.to_json()["extra"],
        "verification": check.to_json(),
        "artifacts": artifacts,
    } | extra
    if not args.out:
        report["region"] = region.to_json()
        report["trace"] = cand.trace.to_json()
    _emit(args, "report.json", _dump(report), artifacts)
    return 0 if check.passed else 1


def cmd_verify(args) -> int:
    from .construct import verify_wavelet
    from .linalg import parse_scalar
    from .regions import load_region

    p = _problem(args)
    region = load_region(args.region)
    rep = verify_wavelet(region, p.matrix, p.lattice, tol=parse_scalar(args.tol))
    _emit(args, "verification.json", _dump(_header(args) | rep.to_json()), [])
    return 0 if rep.passed else 1


def cmd_render(args) -> int:
    from .regions import load_region, to_svg

    region = load_region(args.region)
    _emit(args, "region.svg", to_svg(region, size=args.size), [])
    return 0


def cmd_demo(args) -> int:
    from . import demos

    kw = {}
    if args.jmax is not None:
        kw["jmax"] = args.jmax
    if args.name == "shannon":
        kw = {}
    if args.name == "lcc" and (args.alpha is not None or args.beta is not None):
        from .linalg import parse_scalar

        if args.alpha is None or args.beta is None:
            from .errors import ValidationError

            raise ValidationError("--alpha and --beta must be given together")
        kw["alpha"] = parse_scalar(args.alpha)
        kw["beta"] = parse_scalar(args.beta)
    report = _header(args) | demos.run(args.name, **kw)
    _emit(args, f"demo-{args.name}.json", _dump(report), [])
    if "passed" in report:
        return 0 if report["passed"] else 1
    if "verdict" not in report:
        return 0
    from .existence import EXIT_CODES

    return EXIT_CODES[report["verdict"]["status"]]


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", metavar="FILE", help="problem spec JSON: matrix, lattice, radius, jmax, mode")
    common.add_argument("--out", metavar="DIR", help="write outputs into DIR instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="recorded in reports; constructions are deterministic")
    common.add_argument("--jmax", type=int, default=None)
    common.add_argument("--radius", default=None, help="ball radius, e.g. 1 or 3/2")
    common.add_argument("--format", choices=("json", "csv", "svg"), default=None)

    problem = argparse.ArgumentParser(add_help=False)
    problem.add_argument("--matrix", help='JSON rows, a diagonal list, or a scalar, e.g. "[[1,1],[-1,1]]" or 2')
    problem.add_argument("--lattice", help="lattice basis rows (JSON); defaults to the integer lattice")

    parser = _Parser(prog="waveset", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common, problem], help="decide whether a wavelet set exists")
    p.set_defaults(func=cmd_analyze)
    p = sub.add_parser("count", parents=[common, problem], help="table of N_j and partial sums")
    p.set_defaults(func=cmd_count)
    p = sub.add_parser("growth", parents=[common, problem], help="section growth of candidate lattice subspaces")
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("construct", parents=[common, problem], help="build a wavelet set candidate")
    p.add_argument("--L", default=None, help="half-width of the generator (nonexpansive matrices)")
    p.add_argument("--K", type=int, default=None, help="number of generator shells to absorb")
    p.add_argument("--tol", default="1/1000", help="target translation deficit")
    p.add_argument("--maxiter", type=int, default=30)
    p.add_argument("--no-fill", action="store_true", help="skip the hole-transport pass that fills translation gaps")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[common, problem], help="check a region tiles both ways")
    p.add_argument("region", help="region JSON file")
    p.add_argument("--tol", default="0")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", parents=[common], help="draw a 1-D or 2-D region as SVG")
    p.add_argument("region", help="region JSON file")
    p.add_argument("--size", type=int, default=400)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("demo", parents=[common], help="reproduce a worked example")
    p.add_argument("name", choices=("shannon", "iw2d", "obvious", "lcc", "quincunx"))
    p.add_argument("--alpha", help="lcc: rational approximant for alpha")
    p.add_argument("--beta", help="lcc: rational approximant for beta")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    try:
        _cap_threads()
    except ValueError as exc:
        print(f"waveset: error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    from .errors import ValidationError, WavesetError

    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # --help exits 0, usage errors exit EXIT_BAD_INPUT
        return exc.code if isinstance(exc.code, int) else EXIT_BAD_INPUT
    if args.format is None:
        args.format = "csv" if args.command == "count" else "json"
    try:
        return args.func(args)
    except (ValidationError, json.JSONDecodeError, ZeroDivisionError, OSError) as exc:
        print(f"waveset: error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (WavesetError, KeyError) as exc:
        print(f"waveset: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
