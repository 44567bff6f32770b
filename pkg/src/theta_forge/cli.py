"""Command-line front end: ``theta-forge eval|verify|list|report``.

Exit codes: 0 success, 1 identity failure, 2 usage or parse error, 3 pole.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from typing import Sequence

from .core import nome_from_tau
from .errors import ConvergenceError, DomainError, ParseError, PoleError, ThetaForgeError, UnboundVariableError
from .precision import ops
from .registry import dsl
from .registry.catalog import builtin_catalog, negative_controls
from .registry.evaluate import eval_expr
from .registry.records import BACKENDS, RunConfig, VerificationReport, load_records, run_records, select

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_POLE = 0, 1, 2, 3
COMMANDS = ("eval", "verify", "list", "report")
_COMPLEX_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    command: str
    tau: complex = 1j
    seed: int = 0
    samples: int = 20
    tol: float = 1e-9
    order: int = 40
    filter: str = "*"
    output: str = "text"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.samples < 1:
            raise UsageError("--samples must be at least 1")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.order < 1:
            raise UsageError("--order must be at least 1")
        if not self.tau.imag > 0:
            raise UsageError("--tau must lie in the upper half-plane")


def parse_complex(text: str) -> complex:
    """Literal ``a+bi`` (no spaces), ``bi``, ``i`` or a real number."""
    s = text.strip()
    if not s or " " in s:
        raise UsageError(f"bad complex literal {text!r}")
    if s.endswith("i"):
        body = s[:-1]
        # split at the last sign that is not an exponent sign
        cut = max((k for k, ch in enumerate(body) if ch in "+-" and k > 0 and body[k - 1] not in "eE"), default=0)
        re_part, im_part = body[:cut], body[cut:]
        if im_part in ("", "+", "-"):
            im_part += "1"
        if (re_part and not _COMPLEX_RE.match(re_part)) or not _COMPLEX_RE.match(im_part):
            raise UsageError(f"bad complex literal {text!r}")
        return complex(float(re_part or 0), float(im_part))
    if not _COMPLEX_RE.match(s):
        raise UsageError(f"bad complex literal {text!r}")
    return complex(float(s))


def parse_value(text: str, mp):
    """A binding value: complex literal, else a constant DSL expression such as ``pi/3``."""
    try:
        return parse_complex(text)
    except UsageError:
        pass
    e = dsl.parse_expr(text)
    if dsl.free_vars(e):
        raise UsageError(f"binding value {text!r} must be constant")
    return complex(eval_expr(e, {}, mp))


def format_complex(z, digits: int = 15) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.{digits}g}"
    return f"{z.real:.{digits}g}{z.imag:+.{digits}g}i"


def _format_value(v) -> str:
    o = ops()
    if o.dps > 15:
        import mpmath

        re_s = mpmath.nstr(v.real, o.dps)
        im = v.imag
        if im == 0:
            return re_s
        sign = "-" if im < 0 else "+"
        return f"{re_s}{sign}{mpmath.nstr(abs(im), o.dps)}i"
    return format_complex(v)


# ---------------------------------------------------------------------------
# Commands


def cmd_eval(expr_text: str, bindings: Sequence[str], config: CliConfig, out=None) -> int:
    out = out or sys.stdout
    mp = nome_from_tau(config.tau)
    env: dict = {}
    for b in bindings:
        name, sep, value = b.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"binding {b!r} is not name=value")
        env[name.strip()] = parse_value(value, mp)
    ints = [k for k, v in env.items() if complex(v).imag == 0 and float(complex(v).real).is_integer()]
    e = dsl.parse_expr(expr_text, [k for k in ints if k not in dsl.VARS])
    for k in ints:
        if k not in dsl.VARS:
            env[k] = int(complex(env[k]).real)
    value = eval_expr(e, env, mp)
    print(_format_value(value), file=out)
    return EXIT_OK


def _records(args) -> list:
    recs = load_records(args.identities) if args.identities else builtin_catalog()
    if args.negative:
        recs = recs + negative_controls()
    return recs


def _ok(rep: VerificationReport) -> bool:
    """A report is acceptable when an ordinary record passes or a negative control fails."""
    return rep.passed != rep.negative


def _report_line(rep: VerificationReport) -> str:
    verdict = "PASS" if rep.passed else "FAIL"
    if rep.negative:
        verdict += " (negative control: rejected as expected)" if not rep.passed else " (negative control NOT rejected)"
    if rep.backend == "numeric":
        detail = "" if rep.max_rel_error is None else f"max_err={rep.max_rel_error:.3e} samples={rep.samples}"
    else:
        detail = f"order={rep.order}" + (f" first_mismatch={rep.first_mismatch}" if rep.first_mismatch else "")
    if rep.error:
        detail += f" error={rep.error}"
    return f"{rep.id:34s} {rep.backend:8s} {verdict} {detail}".rstrip()


def _run(args, config: CliConfig):
    backends = tuple(args.backend) if args.backend else BACKENDS
    rc = RunConfig(config.seed, config.samples, config.tol, config.order, config.filter, backends)
    return run_records(_records(args), rc)


def _emit(reps, config: CliConfig, timings: bool, out):
    for rep in reps:
        if config.output == "json-lines":
            print(json.dumps(rep.as_dict(timings), sort_keys=False), file=out)
        else:
            print(_report_line(rep), file=out)


def cmd_verify(args, config: CliConfig, out=None) -> int:
    out = out or sys.stdout
    reps = _run(args, config)
    if not reps:
        print(f"warning: no records match filter {config.filter!r}", file=sys.stderr)
        return EXIT_OK
    _emit(reps, config, args.timings, out)
    return EXIT_OK if all(_ok(r) for r in reps) else EXIT_FAIL


def cmd_list(args, config: CliConfig, out=None) -> int:
    out = out or sys.stdout
    recs = select(_records(args), config.filter)
    for r in recs:
        if config.output == "json-lines":
            row = {"id": r.id, "anchor": r.anchor, "backends": list(r.backends), "negative": r.negative}
            print(json.dumps(row), file=out)
        else:
            print(f"{r.id:34s} {','.join(r.backends):15s} {r.anchor}", file=out)
    if not recs:
        print(f"warning: no records match filter {config.filter!r}", file=sys.stderr)
    return EXIT_OK


def cmd_report(args, config: CliConfig, out=None) -> int:
    """Verification run condensed to a per-backend summary plus the failures."""
    out = out or sys.stdout
    reps = _run(args, config)
    if not reps:
        print(f"warning: no records match filter {config.filter!r}", file=sys.stderr)
        return EXIT_OK
    summary = {}
    for b in BACKENDS:
        rs = [r for r in reps if r.backend == b]
        if not rs:
            continue
        errs = [r.max_rel_error for r in rs if r.max_rel_error is not None and not r.negative]
        summary[b] = {
            "records": len(rs),
            "ok": sum(_ok(r) for r in rs),
            "failed": sorted(r.id for r in rs if not _ok(r)),
            "worst_error": float(f"{max(errs):.3e}") if errs else None,
        }
    if config.output == "json-lines":
        for b, s in summary.items():
            print(json.dumps({"backend": b, **s, "seed": config.seed}), file=out)
    else:
        for b, s in summary.items():
            worst = "" if s["worst_error"] is None else f", worst error {s['worst_error']:.3e}"
            print(f"{b}: {s['ok']}/{s['records']} ok{worst}", file=out)
            for rid in s["failed"]:
                print(f"  failed: {rid}", file=out)
    return EXIT_OK if all(_ok(r) for r in reps) else EXIT_FAIL


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="theta-forge", description="Verify Jacobi and Kronecker theta identities.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("args", nargs="*", help="eval: expression followed by name=value bindings")
    p.add_argument("--tau", default="i", help="modular parameter, e.g. i or 0.5+1.2i (eval)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--order", type=int, default=40, help="formal comparison order in powers of q")
    p.add_argument("--filter", default="*", help="record id glob")
    p.add_argument("--output", choices=("text", "json-lines"), default="text")
    p.add_argument("--identities", help="record file to use instead of the built-in catalog")
    p.add_argument("--backend", action="append", choices=BACKENDS, help="restrict to a backend (repeatable)")
    p.add_argument("--negative", action="store_true", help="include the negative-control records")
    p.add_argument("--timings", action="store_true", help="fill elapsed_ms (makes output run-dependent)")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        config = CliConfig(
            args.command, parse_complex(args.tau), args.seed, args.samples, args.tol,
            args.order, args.filter, args.output,
        )
        if args.command == "eval":
            if not args.args:
                raise UsageError("eval needs an expression")
            return cmd_eval(args.args[0], args.args[1:], config)
        if args.args:
            raise UsageError(f"unexpected arguments {args.args}")
        return {"verify": cmd_verify, "list": cmd_list, "report": cmd_report}[args.command](args, config)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        if exc.text_source and exc.position >= 0:
            print(f"  {exc.text_source}\n  {' ' * exc.position}^", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, UnboundVariableError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PoleError as exc:
        node = ""
        if isinstance(exc.node, dsl.Expr) and dsl.to_text(exc.node) not in str(exc):
            node = f" (at {dsl.to_text(exc.node)})"
        print(f"pole: {exc}{node}", file=sys.stderr)
        return EXIT_POLE
    except (DomainError, ConvergenceError) as exc:
        print(f"evaluation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_POLE
    except ThetaForgeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
