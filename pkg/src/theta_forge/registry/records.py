"""Identity records, the record text format, the sampler and the verification runner.

Record text format (one ``key: value`` per line; indented lines continue the
previous value; ``#`` starts a comment; each ``id:`` line opens a record)::

    id: jacobi-2
    anchor: <citation>
    lhs: <expr>
    rhs: <expr>
    vars: z in cell, y in strip(0.05, 0.95), x = pi/3
    params: n in 1..9 odd; m in -4..4
    where: m % n != 0
    avoid: z, n*z|n*tau
    guard: kronecker(y)
    compare: relative | terms | absolute
    backends: numeric, formal
    order: 10
"""

from __future__ import annotations

import ast
import cmath
import fnmatch
import itertools
import math
import operator
import random
import re
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from ..core import ModularPoint, lattice_distance, nome_from_tau
from ..errors import (
    ConvergenceError,
    NotFormalError,
    ParseError,
    PoleError,
    SamplerExhaustedError,
    ThetaForgeError,
    TruncationError,
)
from . import dsl
from ..precision import is_double, working_precision
from .evaluate import Evaluator, exact_value
from .formal import compare_formal, fmt_q

POLE_MARGIN = 1e-2  # reduced-coordinate distance kept from declared poles
DEGENERACY_TOL = 1e-6
DEGENERACY_KMAX = 10
REL_FLOOR = 1e-30
MAX_ATTEMPTS_PER_SAMPLE = 50
ESCALATE_ABOVE = 1e-12  # double-precision errors above this are re-measured
ESCALATION_DPS = 30
BACKENDS = ("numeric", "formal")
COMPARE_MODES = ("relative", "terms", "absolute")

# ---------------------------------------------------------------------------
# Record pieces


@dataclass(frozen=True)
class VarDomain:
    """Sampling domain of one free variable.

    kind: cell (a*pi + b*pi*tau, a, b in [lo, hi]), strip (a in [-0.45, 0.45],
    b in [lo, hi]), real (uniform in [lo, hi]), annulus (lo < |x| < hi,
    uniform angle) or fixed (``expr`` evaluated from earlier bindings).
    """

    name: str
    kind: str
    lo: float = -0.45
    hi: float = 0.45
    expr: dsl.Expr | None = None

    def text(self) -> str:
        if self.kind == "fixed":
            return f"{self.name} = {dsl.to_text(self.expr)}"
        if self.kind == "cell" and (self.lo, self.hi) == (-0.45, 0.45):
            return f"{self.name} in cell"
        return f"{self.name} in {self.kind}({self.lo:g}, {self.hi:g})"


@dataclass(frozen=True)
class ParamRange:
    name: str
    values: tuple[int, ...]


@dataclass(frozen=True)
class Avoid:
    """Declared pole: the sampler keeps ``expr`` away from the lattice of ``scale``*tau."""

    expr: dsl.Expr
    scale: dsl.Expr = dsl.ONE


@dataclass(frozen=True)
class IdentityRecord:
    id: str
    lhs: dsl.Expr
    rhs: dsl.Expr
    anchor: str = ""
    vars: tuple[VarDomain, ...] = ()
    params: tuple[ParamRange, ...] = ()
    where: str | None = None
    avoid: tuple[Avoid, ...] = ()
    guard: tuple[tuple[str, str], ...] = ()  # (mode, variable)
    compare: str = "relative"
    backends: tuple[str, ...] = ("numeric",)
    order: int | None = None  # cap on the formal order
    negative: bool = False  # negative control, expected to fail

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)

    def param_combos(self) -> list[dict]:
        names = self.param_names
        combos = [dict(zip(names, vals)) for vals in itertools.product(*(p.values for p in self.params))]
        out = []
        for c in combos:
            verdict = eval_where(self.where, c) if self.where else True
            if verdict is not False:
                out.append(c)
        return out


# ---------------------------------------------------------------------------
# where-clauses: a small arithmetic/boolean language evaluated with ast


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Mod: operator.mod,
    ast.Pow: operator.pow,
    ast.FloorDiv: operator.floordiv,
}
_CMPOPS = {
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
}
_FUNCS = {
    "abs": abs,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "re": lambda x: complex(x).real,
    "im": lambda x: complex(x).imag,
}


class _Missing(Exception):
    pass


def _where_eval(node, env):
    if isinstance(node, ast.Expression):
        return _where_eval(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name):
        if node.id == "pi":
            return math.pi
        if node.id not in env:
            raise _Missing(node.id)
        v = env[node.id]
        return complex(v) if not isinstance(v, int) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_where_eval(node.left, env), _where_eval(node.right, env))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd, ast.Not)):
        v = _where_eval(node.operand, env)
        return -v if isinstance(node.op, ast.USub) else (v if isinstance(node.op, ast.UAdd) else not v)
    if isinstance(node, ast.BoolOp):
        vals = [_where_eval(v, env) for v in node.values]
        return all(vals) if isinstance(node.op, ast.And) else any(vals)
    if isinstance(node, ast.Compare):
        left = _where_eval(node.left, env)
        for op, comp in zip(node.ops, node.comparators):
            right = _where_eval(comp, env)
            if type(op) not in _CMPOPS or not _CMPOPS[type(op)](left, right):
                return False
            left = right
        return True
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
        return _FUNCS[node.func.id](*(_where_eval(a, env) for a in node.args))
    raise ParseError(f"unsupported construct in where-clause: {ast.dump(node)}", 0, "")


def eval_where(text: str, env: dict):
    """True/False, or None when the clause mentions names not yet bound."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"bad where-clause: {exc.msg}", (exc.offset or 1) - 1, text) from None
    try:
        return bool(_where_eval(tree, env))
    except _Missing:
        return None


# ---------------------------------------------------------------------------
# Text format


_VAR_RE = re.compile(r"^\s*([a-z]+)\s+in\s+([a-z]+)\s*(?:\(([^)]*)\))?\s*$")
_FIXED_RE = re.compile(r"^\s*([a-z]+)\s*=\s*(.+)$")
_PARAM_RE = re.compile(r"^\s*([a-z])\s+in\s+(-?\d+)\s*\.\.\s*(-?\d+)\s*(odd|even)?\s*$")
_FIELDS = ("id", "anchor", "lhs", "rhs", "vars", "params", "where", "avoid", "guard", "compare", "backends", "order", "negative")


def _split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside parentheses and braces."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out if s.strip()]


def _parse_vars(text: str, symbols) -> tuple[VarDomain, ...]:
    out = []
    for item in _split_top(text):
        m = _FIXED_RE.match(item)
        if m and " in " not in item:
            out.append(VarDomain(m.group(1), "fixed", expr=dsl.parse_expr(m.group(2), symbols)))
            continue
        m = _VAR_RE.match(item)
        if not m:
            raise ParseError(f"bad variable domain {item!r}", 0, text)
        name, kind, args = m.group(1), m.group(2), m.group(3)
        if name not in dsl.FREE_VARS:
            raise ParseError(f"{name!r} is not a variable", 0, text)
        if kind not in ("cell", "strip", "real", "annulus"):
            raise ParseError(f"unknown domain {kind!r}", 0, text)
        if args:
            lo, hi = (float(a) for a in args.split(","))
        elif kind == "cell":
            lo, hi = -0.45, 0.45
        elif kind == "real":
            lo, hi = -math.pi, math.pi
        else:
            raise ParseError(f"domain {kind!r} needs bounds", 0, text)
        out.append(VarDomain(name, kind, lo, hi))
    return tuple(out)


def _parse_params(text: str) -> tuple[ParamRange, ...]:
    out = []
    for item in text.split(";"):
        if not item.strip():
            continue
        m = _PARAM_RE.match(item)
        if not m:
            raise ParseError(f"bad parameter range {item!r}", 0, text)
        lo, hi = int(m.group(2)), int(m.group(3))
        vals = range(lo, hi + 1)
        if m.group(4) == "odd":
            vals = [v for v in vals if v % 2]
        elif m.group(4) == "even":
            vals = [v for v in vals if v % 2 == 0]
        out.append(ParamRange(m.group(1), tuple(vals)))
    return tuple(out)


def record_from_fields(f: dict) -> IdentityRecord:
    rid = f.get("id", "").strip()
    if not rid:
        raise ParseError("record without id", 0, "")
    params = _parse_params(f.get("params", ""))
    symbols = [p.name for p in params]
    lhs = dsl.parse_expr(f["lhs"], symbols)
    rhs = dsl.parse_expr(f["rhs"], symbols)
    avoid = []
    for item in _split_top(f.get("avoid", "")):
        expr_text, _, scale_text = item.partition("|")
        scale = dsl.ONE
        if scale_text:
            scale = dsl.extract_tau_scale(dsl.parse_expr(scale_text, symbols))
            if scale is None:
                raise ParseError(f"bad avoid scale in {item!r}", 0, item)
        avoid.append(Avoid(dsl.parse_expr(expr_text, symbols), scale))
    guard = []
    for item in _split_top(f.get("guard", "")):
        m = re.match(r"^(kronecker|theta3)\((\w+)\)$", item)
        if not m:
            raise ParseError(f"bad guard {item!r}", 0, item)
        guard.append((m.group(1), m.group(2)))
    backends = tuple(b.strip() for b in f.get("backends", "numeric").split(",") if b.strip())
    for b in backends:
        if b not in BACKENDS:
            raise ParseError(f"unknown backend {b!r}", 0, b)
    compare = f.get("compare", "relative").strip()
    if compare not in COMPARE_MODES:
        raise ParseError(f"unknown compare mode {compare!r}", 0, compare)
    order = f.get("order")
    return IdentityRecord(
        id=rid,
        lhs=lhs,
        rhs=rhs,
        anchor=f.get("anchor", "").strip(),
        vars=_parse_vars(f.get("vars", ""), symbols),
        params=params,
        where=f.get("where", "").strip() or None,
        avoid=tuple(avoid),
        guard=tuple(guard),
        compare=compare,
        backends=backends,
        order=int(order) if order else None,
        negative=f.get("negative", "").strip() in ("true", "yes"),
    )


def parse_records(text: str) -> list[IdentityRecord]:
    blocks: list[dict] = []
    key = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line[0].isspace() and key is not None:
            blocks[-1][key] += " " + line.strip()
            continue
        k, sep, v = line.partition(":")
        k = k.strip()
        if not sep or k not in _FIELDS:
            raise ParseError(f"line {lineno}: expected 'key: value'", 0, raw)
        if k == "id":
            blocks.append({})
        elif not blocks:
            raise ParseError(f"line {lineno}: field before the first id", 0, raw)
        if k in blocks[-1]:
            raise ParseError(f"line {lineno}: duplicate field {k!r}", 0, raw)
        blocks[-1][k] = v.strip()
        key = k
    records = []
    for b in blocks:
        try:
            records.append(record_from_fields(b))
        except ParseError as exc:
            raise ParseError(f"record {b.get('id', '?')}: {exc}", exc.position, exc.text_source) from None
    return records


def load_records(path) -> list[IdentityRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_records(fh.read())


def _param_text(p: ParamRange) -> str:
    lo, hi = min(p.values), max(p.values)
    if p.values == tuple(range(lo, hi + 1)):
        return f"{p.name} in {lo}..{hi}"
    parity = "odd" if lo % 2 else "even"
    return f"{p.name} in {lo}..{hi} {parity}"


def record_text(rec: IdentityRecord) -> str:
    lines = [f"id: {rec.id}"]
    if rec.anchor:
        lines.append(f"anchor: {rec.anchor}")
    lines.append(f"lhs: {dsl.to_text(rec.lhs)}")
    lines.append(f"rhs: {dsl.to_text(rec.rhs)}")
    if rec.vars:
        lines.append("vars: " + ", ".join(v.text() for v in rec.vars))
    if rec.params:
        lines.append("params: " + "; ".join(_param_text(p) for p in rec.params))
    if rec.where:
        lines.append(f"where: {rec.where}")
    if rec.backends:
        lines.append("backends: " + ", ".join(rec.backends))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Sampling


@dataclass(frozen=True)
class TauSampler:
    """Uniform tau with im_lo <= Im tau <= im_hi and |Re tau| <= re_max."""

    im_lo: float = 0.5
    im_hi: float = 1.5
    re_max: float = 0.5

    def __call__(self, rng: random.Random) -> complex:
        return complex(rng.uniform(-self.re_max, self.re_max), rng.uniform(self.im_lo, self.im_hi))


def _draw(dom: VarDomain, rng: random.Random, mp: ModularPoint):
    tau = complex(mp.tau)
    if dom.kind == "cell":
        return rng.uniform(dom.lo, dom.hi) * math.pi + rng.uniform(dom.lo, dom.hi) * math.pi * tau
    if dom.kind == "strip":
        return rng.uniform(-0.45, 0.45) * math.pi + rng.uniform(dom.lo, dom.hi) * math.pi * tau
    if dom.kind == "real":
        return complex(rng.uniform(dom.lo, dom.hi))
    if dom.kind == "annulus":
        return cmath.rect(rng.uniform(dom.lo, dom.hi), rng.uniform(-math.pi, math.pi))
    raise ValueError(dom.kind)


def _degenerate(mode: str, y, mp: ModularPoint) -> bool:
    e = cmath.exp(2j * complex(y))
    for k in range(-DEGENERACY_KMAX, DEGENERACY_KMAX + 1):
        target = complex(mp.qpow(k)) if mode == "kronecker" else -complex(mp.qpow(k + 0.5))
        if abs(e - target) <= DEGENERACY_TOL * max(1.0, abs(target)):
            return True
    return False


@dataclass
class Sample:
    tau: complex
    env: dict
    lhs: complex
    rhs: complex
    error: float


def _terms_scale(e: dsl.Expr, env: dict, ev: Evaluator) -> float:
    total = 0.0
    for _, t in dsl.additive_terms(e):
        if isinstance(t, dsl.FiniteSum):
            lo = exact_value(t.lo, env)
            hi = exact_value(t.hi, env)
            inner = dict(env)
            for k in range(int(lo), int(hi) + 1):
                inner[t.index] = k
                total += _terms_scale(t.body, inner, ev)
        else:
            total += abs(complex(ev(t, env)))
    return total


def _error(rec: IdentityRecord, lhs, rhs, env, ev: Evaluator) -> float:
    diff = abs(complex(lhs - rhs))
    if rec.compare == "absolute":
        return diff
    if rec.compare == "terms":
        scale = _terms_scale(rec.lhs, env, ev) + _terms_scale(rec.rhs, env, ev)
        return diff / max(scale, REL_FLOOR)
    return diff / max(abs(complex(lhs)), abs(complex(rhs)), REL_FLOOR)


def draw_samples(
    rec: IdentityRecord,
    samples: int,
    seed: int,
    sampler: Callable[[random.Random], complex] | None = None,
) -> Iterable[Sample]:
    """Seeded, pole-avoiding samples of both sides (``samples`` per parameter combination)."""
    sampler = sampler or TauSampler()
    rng = random.Random(f"{seed}:{rec.id}")
    for combo in rec.param_combos():
        got = 0
        attempts = 0
        while got < samples:
            attempts += 1
            if attempts > MAX_ATTEMPTS_PER_SAMPLE * samples:
                raise SamplerExhaustedError(f"{rec.id}: could not draw {samples} valid samples for {combo}")
            s = _try_sample(rec, combo, rng, sampler)
            if s is not None:
                got += 1
                yield s


def _measure(rec, ev: Evaluator, env: dict):
    lhs = ev(rec.lhs, env)
    rhs = ev(rec.rhs, env)
    return lhs, rhs, _error(rec, lhs, rhs, env, ev)


def _try_sample(rec, combo, rng, sampler) -> Sample | None:
    tau = sampler(rng)
    mp = nome_from_tau(tau)
    ev = Evaluator(mp)
    env: dict = dict(combo)
    for dom in rec.vars:
        if dom.kind == "fixed":
            env[dom.name] = complex(ev(dom.expr, env))
        else:
            env[dom.name] = _draw(dom, rng, mp)
    if rec.where:
        w_env = dict(env, q=complex(mp.q), tau=complex(mp.tau))
        if eval_where(rec.where, w_env) is False:
            return None
    for av in rec.avoid:
        try:
            w = complex(ev(av.expr, env))
            s = exact_value(av.scale, env)
        except PoleError:
            return None
        if lattice_distance(w, complex(mp.tau) * float(s)) < POLE_MARGIN:
            return None
    for mode, name in rec.guard:
        if _degenerate(mode, env[name], mp):
            return None
    try:
        lhs, rhs, err = _measure(rec, ev, env)
        if err > ESCALATE_ABOVE and is_double():
            # cancellation in long sums: re-measure the same point with more digits
            with working_precision(ESCALATION_DPS):
                lhs, rhs, err = _measure(rec, Evaluator(nome_from_tau(tau)), env)
    except (PoleError, ConvergenceError):
        return None
    if not (math.isfinite(abs(complex(lhs))) and math.isfinite(abs(complex(rhs)))):
        return None
    return Sample(complex(tau), env, complex(lhs), complex(rhs), err)


# ---------------------------------------------------------------------------
# Reports


@dataclass
class VerificationReport:
    id: str
    backend: str
    passed: bool
    max_rel_error: float | None = None
    first_mismatch: str | None = None
    samples: int | None = None
    order: int | None = None
    seed: int | None = None
    elapsed_ms: float | None = None
    witness: dict | None = None
    error: str | None = None
    negative: bool = False

    def as_dict(self, timings: bool = False) -> dict:
        return {
            "id": self.id,
            "backend": self.backend,
            "pass": self.passed,
            "max_rel_error": None if self.max_rel_error is None else float(f"{self.max_rel_error:.3e}"),
            "first_mismatch": self.first_mismatch,
            "samples": self.samples,
            "order": self.order,
            "seed": self.seed,
            "elapsed_ms": round(self.elapsed_ms, 1) if timings and self.elapsed_ms is not None else None,
            "witness": self.witness,
            "error": self.error,
        }


def _fmt_c(z) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def _witness(s: Sample) -> dict:
    w = {"tau": _fmt_c(s.tau)}
    for k in sorted(s.env):
        v = s.env[k]
        w[k] = v if isinstance(v, int) else _fmt_c(v)
    w["lhs"] = _fmt_c(s.lhs)
    w["rhs"] = _fmt_c(s.rhs)
    return w


def verify_numeric(
    rec: IdentityRecord,
    samples: int = 20,
    tol: float = 1e-9,
    seed: int = 0,
    sampler: Callable[[random.Random], complex] | None = None,
) -> VerificationReport:
    """max error over seeded samples; pass iff it is at most ``tol``."""
    start = time.perf_counter()
    worst: Sample | None = None
    count = 0
    try:
        for s in draw_samples(rec, samples, seed, sampler):
            count += 1
            if worst is None or not s.error <= worst.error:
                worst = s
    except ThetaForgeError as exc:
        return VerificationReport(
            rec.id, "numeric", False, samples=count, seed=seed,
            elapsed_ms=1000 * (time.perf_counter() - start), error=f"{type(exc).__name__}: {exc}",
            negative=rec.negative,
        )
    err = 0.0 if worst is None else worst.error
    passed = err <= tol
    return VerificationReport(
        rec.id, "numeric", passed, max_rel_error=err, samples=count, seed=seed,
        elapsed_ms=1000 * (time.perf_counter() - start),
        witness=None if passed or worst is None else _witness(worst),
        negative=rec.negative,
    )


def verify_formal(rec: IdentityRecord, order: int = 40) -> VerificationReport:
    """Exact q-series comparison through q^order (capped by the record's own order)."""
    start = time.perf_counter()
    if rec.order is not None:
        order = min(order, rec.order)
    combos = rec.param_combos()
    try:
        for combo in combos:
            res = compare_formal(rec.lhs, rec.rhs, order, combo)
            if not res.equal:
                wit = dict(combo)
                wit.update({"coefficient": fmt_q(res.first_mismatch), "lhs": res.left, "rhs": res.right})
                return VerificationReport(
                    rec.id, "formal", False, first_mismatch=fmt_q(res.first_mismatch), order=order,
                    elapsed_ms=1000 * (time.perf_counter() - start), witness=wit, negative=rec.negative,
                )
    except (NotFormalError, TruncationError) as exc:
        return VerificationReport(
            rec.id, "formal", False, order=order, elapsed_ms=1000 * (time.perf_counter() - start),
            error=f"{type(exc).__name__}: {exc}", negative=rec.negative,
        )
    return VerificationReport(
        rec.id, "formal", True, order=order, elapsed_ms=1000 * (time.perf_counter() - start),
        negative=rec.negative,
    )


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    samples: int = 20
    tol: float = 1e-9
    order: int = 40
    filter: str = "*"
    backends: tuple[str, ...] = BACKENDS
    im_lo: float = 0.5
    im_hi: float = 1.5


def select(records: Sequence[IdentityRecord], pattern: str = "*") -> list[IdentityRecord]:
    return sorted((r for r in records if fnmatch.fnmatchcase(r.id, pattern)), key=lambda r: r.id)


def run_records(records: Sequence[IdentityRecord], config: RunConfig = RunConfig()) -> list[VerificationReport]:
    """Every selected record on every enabled backend, sorted by (id, backend)."""
    sampler = TauSampler(config.im_lo, config.im_hi)
    out = []
    for rec in select(records, config.filter):
        for backend in BACKENDS:
            if backend not in rec.backends or backend not in config.backends:
                continue
            if backend == "numeric":
                out.append(verify_numeric(rec, config.samples, config.tol, config.seed, sampler))
            else:
                out.append(verify_formal(rec, config.order))
    return sorted(out, key=lambda r: (r.id, r.backend))


def run_all(config: RunConfig = RunConfig()) -> list[VerificationReport]:
    from .catalog import builtin_catalog

    return run_records(builtin_catalog(), config)
