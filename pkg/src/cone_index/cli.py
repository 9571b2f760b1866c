"""``cone-index`` command line.

Exit status: 0 success, 1 malformed input, 2 computation error, 3 failed
verification. With ``--json`` errors are also written to stderr as a JSON
object.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path
from typing import Sequence

from .errors import ComputationError, ConeIndexError, InvalidInputError
from .index_core import index_lpq, load_problem
from .phase_map import sweep
from .rational import format_rational, parse_rational
from .spectra import Interval, SpectrumModel, enumerate_eigs, spectrum_from_json, sphere_spectrum
from .verify import run_verification
from .zeta_eta import eta_reg

EXIT_INPUT = 1
EXIT_COMPUTATION = 2
EXIT_VERIFY = 3

_SPHERE_NAME = re.compile(r"^sphere(\d+)$")


def _load_spectrum(ref: str) -> SpectrumModel:
    """A spectrum file path, or a builtin name ``sphereN`` (round S^(N-1))."""
    m = _SPHERE_NAME.match(ref)
    if m and not Path(ref).exists():
        return sphere_spectrum(int(m.group(1)))
    try:
        data = json.loads(Path(ref).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InvalidInputError(f"spectrum file {ref!r} not found") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{ref}: invalid JSON ({exc})") from None
    return spectrum_from_json(data)


def _range(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 2:
        raise InvalidInputError(f"range {text!r} must look like lo:hi")
    return tuple(parse_rational(p, what="range bound") for p in parts)


def _threads(arg: int | None) -> int:
    env = os.environ.get("CONE_INDEX_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidInputError("CONE_INDEX_THREADS must be an integer") from None
    if arg is not None:
        return max(1, arg)
    return os.cpu_count() or 1


def cmd_spectrum(args: argparse.Namespace) -> int:
    if args.spectrum:
        s = _load_spectrum(args.spectrum)
    else:
        if args.model != "sphere" or args.n is None:
            raise InvalidInputError("give --spectrum FILE or --model sphere --n N")
        s = sphere_spectrum(args.n)
    interval = Interval.parse(args.interval)
    print("eigenvalue\tmultiplicity")
    total = 0
    for lam, m in enumerate_eigs(s, interval):
        print(f"{format_rational(lam)}\t{m}")
        total += m
    print(f"# N{interval} = {total}")
    return 0


def cmd_eta(args: argparse.Namespace) -> int:
    s = _load_spectrum(args.spectrum)
    value = eta_reg(s, parse_rational(args.cut, what="cut"))
    print(f"eta = {format_rational(value.value)} ({'exact' if value.exact else 'approx'})")
    for line in value.trace:
        print(f"  {line}")
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    prob = load_problem(args.problem)
    result = index_lpq(prob)
    a1, a2 = prob.exponents
    out = result.to_json()
    out["alpha1"] = format_rational(a1)
    out["alpha2"] = format_rational(a2)
    print(json.dumps(out, indent=2))
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    prob = load_problem(args.problem)
    diagram = sweep(
        prob,
        _range(args.p_range),
        _range(args.q_range),
        args.resolution,
        on_loci=args.on_loci,
        threads=_threads(args.threads),
    )
    csv_text = diagram.to_csv()
    if args.out:
        out = Path(args.out)
        out.write_text(csv_text, encoding="utf-8")
        out.with_suffix(".loci.json").write_text(diagram.loci_json() + "\n", encoding="utf-8")
        print(f"wrote {len(diagram.inv_p) * len(diagram.inv_q)} cells to {out}")
    else:
        sys.stdout.write(csv_text)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    prob = load_problem(args.problem)
    results = run_verification(prob, seed=args.seed)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else EXIT_VERIFY


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cone-index", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="machine-readable errors on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="enumerate eigenvalues in an interval")
    sp.add_argument("--model", choices=["sphere"], default="sphere")
    sp.add_argument("--n", type=int)
    sp.add_argument("--spectrum", help="spectrum JSON file or builtin sphereN")
    sp.add_argument("--interval", required=True, help='e.g. "[0,4)"')
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("eta", help="eta invariant at a spectral cut")
    sp.add_argument("--spectrum", required=True, help="spectrum JSON file or builtin sphereN")
    sp.add_argument("--cut", required=True)
    sp.set_defaults(func=cmd_eta)

    sp = sub.add_parser("index", help="index of one problem")
    sp.add_argument("--problem", required=True)
    sp.set_defaults(func=cmd_index)

    sp = sub.add_parser("sweep", help="phase diagram over (1/p, 1/q)")
    sp.add_argument("--problem", required=True)
    sp.add_argument("--p-range", required=True, help="lo:hi")
    sp.add_argument("--q-range", required=True, help="lo:hi")
    sp.add_argument("--resolution", type=int, default=32)
    sp.add_argument("--on-loci", action="store_true", help="do not move grid points off the cut lines")
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--out", help="CSV path; loci go to <out>.loci.json")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run the consistency suites on a problem")
    sp.add_argument("--problem", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_verify)
    return parser


def _fail(args: argparse.Namespace | None, code: int, exc: Exception) -> int:
    print(f"error: {exc}", file=sys.stderr)
    if args is not None and getattr(args, "json", False):
        print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit": code}), file=sys.stderr)
    return code


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        return _fail(args, EXIT_INPUT, exc)
    except ComputationError as exc:
        return _fail(args, EXIT_COMPUTATION, exc)
    except ConeIndexError as exc:
        return _fail(args, EXIT_COMPUTATION, exc)
    except AssertionError as exc:
        return _fail(args, EXIT_COMPUTATION, exc)


def main() -> None:
    sys.exit(run())
