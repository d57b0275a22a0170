"""Command-line front end: ``intcpx <command> ...``.

Settings resolve as command-line flag, then environment variable, then
default.  Exit status: 0 success, 1 a checked property failed, 2 usage or
contract error, 3 a needed stability verdict could not be certified under
``--policy strict``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from intcomplexity import kernel
from intcomplexity.complexity import (
    FORMAT_VERSION,
    ComplexityTable,
    best_expression,
    build_table,
    complexity,
)
from intcomplexity.defect import ExactDefect, defect_of
from intcomplexity.errors import IndeterminateError, IntComplexityError
from intcomplexity.ldpoly import (
    LowDefectPair,
    delta_at,
    delta_pair,
    evaluate,
    expr_pair,
    expr_to_tree,
    insubstantiality_gap,
    is_substantial,
    parse_expression,
)
from intcomplexity.represent import (
    exceptional_set,
    leader_decompose,
    leaders,
    minimal_K_degree1,
    verify_covering,
)
from intcomplexity.stability import (
    DEFAULT_HORIZON,
    Policy,
    k_of,
    stability_scan,
    stable_complexity,
)
from intcomplexity.structure import (
    check_class_disjointness,
    convergence_series,
    counterexample_check,
    dragons_check,
    enumerate_defects,
    family_search,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INDETERMINATE = 0, 1, 2, 3

DEFAULT_LIMIT = 1 << 20

ENV = {
    "table_path": "INTCPX_TABLE",
    "table_limit": "INTCPX_LIMIT",
    "horizon": "INTCPX_HORIZON",
    "policy": "INTCPX_POLICY",
    "output": "INTCPX_FORMAT",
    "threads": "INTCPX_THREADS",
}


@dataclass
class Config:
    table_path: str | None = None
    table_limit: int = DEFAULT_LIMIT
    horizon: int = DEFAULT_HORIZON
    policy: str = Policy.ASSUME.value
    threads: int = 1
    output: str = "text"

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        if self.table_limit < 1:
            raise ValueError("table limit must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.output not in ("json", "csv", "text"):
            raise ValueError(f"unknown format {self.output!r}")
        Policy(self.policy)


def resolve_config(args: argparse.Namespace, environ=None) -> Config:
    """Merge flags over environment variables over defaults."""
    environ = os.environ if environ is None else environ
    types = {"table_limit": int, "horizon": int, "threads": int}
    values = {}
    for name, var in ENV.items():
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
        elif environ.get(var):
            values[name] = types.get(name, str)(environ[var])
    return Config(**values)


class Session:
    """Holds the configuration and the lazily built or loaded table."""

    def __init__(self, config: Config):
        self.config = config
        self._table: ComplexityTable | None = None

    @property
    def table(self) -> ComplexityTable:
        if self._table is None:
            path = self.config.table_path
            if path and Path(path).exists():
                self._table = ComplexityTable.load(path)
            else:
                self._table = build_table(self.config.table_limit)
        return self._table

    @property
    def policy(self) -> Policy:
        return Policy(self.config.policy)

    @property
    def horizon(self) -> int:
        return self.config.horizon

    def fan_out(self, fn, items):
        """Apply fn to each item, in input order, over the configured threads."""
        if self.config.threads == 1 or len(items) < 2:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(self.config.threads) as pool:
            return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# output


def _csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()})
    return buf.getvalue().rstrip("\n")


def _text(obj, indent: str = "") -> str:
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, dict) and v or isinstance(v, list) and any(isinstance(x, dict) for x in v):
                lines.append(f"{indent}{k}:")
                lines.append(_text(v, indent + "  "))
            else:
                lines.append(f"{indent}{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(
            f"{indent}-\n{_text(x, indent + '  ')}" if isinstance(x, (dict, list)) else f"{indent}- {x}"
            for x in obj
        )
    return f"{indent}{obj}"


def emit(session: Session, payload, text: str | None = None, rows: list[dict] | None = None, out=None):
    out = out or sys.stdout
    fmt = session.config.output
    if fmt == "json":
        print(json.dumps(payload, indent=2), file=out)
    elif fmt == "csv":
        if rows is None:
            rows = payload if isinstance(payload, list) else [payload]
        print(_csv(rows), file=out)
    else:
        print(text if text is not None else _text(payload), file=out)


# ---------------------------------------------------------------------------
# argument helpers


def _defect_arg(text: str) -> ExactDefect:
    """``C,n`` for the value ``C - 3 log_3 n``; a bare integer k means ``k,1``."""
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected C,n or an integer, got {text!r}") from None
    if len(parts) == 1:
        return ExactDefect(parts[0], 1)
    if len(parts) != 2 or parts[1] < 1:
        raise argparse.ArgumentTypeError(f"expected C,n with n >= 1, got {text!r}")
    return ExactDefect(*parts)


def _int_tuple(text: str) -> tuple[int, ...]:
    if text.strip() == "":
        return ()
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _pair_arg(text: str) -> tuple[int, int]:
    t = _int_tuple(text)
    if len(t) != 2:
        raise argparse.ArgumentTypeError(f"expected A,B, got {text!r}")
    return t


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _pair_from(args, session: Session) -> LowDefectPair:
    p = expr_pair(parse_expression(args.expression), session.table)
    if getattr(args, "C", None) is not None:
        p = LowDefectPair(p.poly, args.C)
    return p


# ---------------------------------------------------------------------------
# commands


def cmd_table(args, session: Session) -> int:
    if args.action == "build":
        table = build_table(session.config.table_limit)
        path = session.config.table_path
        if path:
            table.save(path)
        info = {"limit": table.limit, "path": path, "backend": kernel.BACKEND}
        emit(session, info, f"built table to {table.limit}" + (f", saved to {path}" if path else ""))
        return EXIT_OK
    path = session.config.table_path
    if not path:
        raise IntComplexityError("table info needs --table PATH")
    table = ComplexityTable.load(path)
    info = {
        "path": path,
        "limit": table.limit,
        "format_version": FORMAT_VERSION,
        "max_value": int(table.values.max()),
        "bytes": Path(path).stat().st_size,
    }
    emit(session, info)
    return EXIT_OK


def cmd_cpx(args, session: Session) -> int:
    table = session.table
    values = session.fan_out(lambda n: complexity(n, table), args.n)
    rows = [{"n": str(n), "complexity": c} for n, c in zip(args.n, values)]
    text = str(values[0]) if len(values) == 1 else "\n".join(f"{n} {c}" for n, c in zip(args.n, values))
    emit(session, rows[0] if len(rows) == 1 else rows, text, rows)
    return EXIT_OK


def cmd_expr(args, session: Session) -> int:
    rows = []
    for n in args.n:
        e = best_expression(n, session.table)
        rows.append({"n": str(n), "expression": str(e), "ones": e.ones_count})
    emit(session, rows[0] if len(rows) == 1 else rows, "\n".join(r["expression"] for r in rows), rows)
    return EXIT_OK


def cmd_defect(args, session: Session) -> int:
    table = session.table
    ds = session.fan_out(lambda n: defect_of(n, table) if n in table else ExactDefect(complexity(n, table), n), args.n)
    rows = [{"n": str(n), **d.to_json()} for n, d in zip(args.n, ds)]
    text = "\n".join(f"{n}: {d}" for n, d in zip(args.n, ds))
    emit(session, rows[0] if len(rows) == 1 else rows, text, rows)
    return EXIT_OK


def _verdicts(args, session: Session):
    table, h = session.table, session.horizon
    return session.fan_out(lambda n: stability_scan(n, h, table), args.n)


def _strict_check(session: Session, verdicts, what: str):
    if session.policy is Policy.STRICT:
        bad = [v.n for v in verdicts if not v.certified]
        if bad:
            raise IndeterminateError(f"{what} not certified within horizon {session.horizon}", bad)


def cmd_stable(args, session: Session) -> int:
    vs = _verdicts(args, session)
    _strict_check(session, [v for v in vs if v.kind.value == "UnknownAtHorizon"], "stability")
    rows = [v.to_json() for v in vs]
    text = "\n".join(
        f"{v.n}: {v.kind.value}"
        + (f" K={v.K}{'+' if v.K_lower_bound else ''}" if v.K is not None else "")
        + f" stable_complexity={v.stable_complexity} ({v.certificate})"
        for v in vs
    )
    emit(session, rows[0] if len(rows) == 1 else rows, text, rows)
    return EXIT_OK


def cmd_k_of(args, session: Session) -> int:
    table, h, pol = session.table, session.horizon, session.policy
    res = session.fan_out(lambda n: k_of(n, h, table, pol), args.n)
    rows = [{"n": str(n), "K": k, "certificate": c} for n, (k, c) in zip(args.n, res)]
    emit(session, rows[0] if len(rows) == 1 else rows, "\n".join(f"{r['n']}: {r['K']} ({r['certificate']})" for r in rows), rows)
    return EXIT_OK


def cmd_stable_cpx(args, session: Session) -> int:
    table, h, pol = session.table, session.horizon, session.policy
    res = session.fan_out(lambda n: stable_complexity(n, h, table, pol), args.n)
    rows = [{"n": str(n), "stable_complexity": s, "certificate": c} for n, (s, c) in zip(args.n, res)]
    emit(
        session,
        rows[0] if len(rows) == 1 else rows,
        "\n".join(f"{r['n']}: {r['stable_complexity']} ({r['certificate']})" for r in rows),
        rows,
    )
    return EXIT_OK


def cmd_ldp(args, session: Session) -> int:
    p = _pair_from(args, session)
    table, h, pol = session.table, session.horizon, session.policy
    if args.action == "parse":
        e = parse_expression(args.expression)
        out = {
            "expression": str(e),
            "poly": str(p.poly),
            "C": p.C,
            "degree": p.degree,
            "leading_coefficient": p.leading_coefficient,
            "tree": expr_to_tree(e).to_json(),
        }
    elif args.action == "eval":
        at = args.at if args.at is not None else (0,) * p.degree
        out = {"poly": str(p.poly), "exponents": list(at), "value": str(evaluate(p.poly, at))}
    elif args.action == "delta":
        if args.at is not None:
            out = {"poly": str(p.poly), "C": p.C, "exponents": list(args.at), "delta": delta_at(p, args.at).to_json()}
        else:
            out = {"poly": str(p.poly), "C": p.C, "delta": delta_pair(p).to_json()}
    elif args.action == "substantial":
        v = is_substantial(p, pol, h, table)
        out = {"poly": str(p.poly), "C": p.C, "substantial": v.value, "certificate": v.certificate, "method": v.method}
    else:
        k, gap, cert = insubstantiality_gap(p, pol, h, table)
        out = {"poly": str(p.poly), "C": p.C, "k": k, "gap": gap, "certificate": cert}
    emit(session, out)
    return EXIT_OK


def cmd_exceptions(args, session: Session) -> int:
    p = _pair_from(args, session)
    ex = exceptional_set(p, args.box, session.table, session.policy, args.mode, session.horizon)
    out = {"pair": str(p), "box": list(args.box), **ex.to_json()}
    emit(session, out, rows=[{"exponents": list(t)} for t in sorted(ex.tuples)])
    return EXIT_OK


def cmd_min_k(args, session: Session) -> int:
    p = _pair_from(args, session)
    r = minimal_K_degree1(p, args.k_max, session.table, session.policy, args.mode, session.horizon)
    emit(session, {"pair": str(p), **r.to_json()})
    return EXIT_OK


def cmd_leaders(args, session: Session) -> int:
    table = session.table
    if args.decompose is not None:
        m, k = leader_decompose(args.decompose, table)
        emit(session, {"n": args.decompose, "leader": m, "k": k}, f"{args.decompose} = 3^{k} * {m}")
        return EXIT_OK
    ls = leaders(args.N, table)
    rows = [{"n": n, "complexity": table[n]} for n in ls]
    emit(session, {"N": args.N, "count": len(ls), "leaders": ls}, " ".join(map(str, ls)), rows)
    return EXIT_OK


def _load_candidates(path: str, table: ComplexityTable) -> list[LowDefectPair]:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, list):
        raise IntComplexityError("covering file must hold a JSON list of {expression, C}")
    out = []
    for item in data:
        p = expr_pair(parse_expression(str(item["expression"])), table)
        out.append(LowDefectPair(p.poly, int(item.get("C", p.C))))
    return out


def cmd_verify_covering(args, session: Session) -> int:
    table = session.table
    report = verify_covering(_load_candidates(args.file, table), args.s, args.N, table)
    out = {"check": "good covering, truncated", **report.to_json()}
    emit(session, out)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_enumerate(args, session: Session) -> int:
    cat = enumerate_defects(args.N, args.s, session.table, args.classify, session.horizon, session.policy)
    report = check_class_disjointness(cat)
    if session.config.output == "csv":
        print(cat.to_csv().rstrip("\n"))
    else:
        out = {**cat.to_json(), "disjointness": report.to_json()}
        text = "\n".join(
            f"{e.value.approx()}  n={e.representative} C={e.complexity} class={e.u}"
            + ("" if e.limit_degree is None else f" limit_degree={e.limit_degree} ({e.stable_certificate})")
            for e in cat.entries
        )
        emit(session, out, text)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_counterexample(args, session: Session) -> int:
    if args.q is None and not args.family:
        raise IntComplexityError("give --q or at least one --family A,B")
    witnesses = []
    if args.q is not None:
        witnesses += counterexample_check(args.q, args.m)
    for a, b in args.family or ():
        witnesses += family_search(a, b, args.m)
    out = {
        "check": "m = b(a 3^k + 1) 3^l",
        "q": args.q,
        "families": [list(f) for f in args.family or ()],
        "m": args.m,
        "witnesses": [w.to_json() for w in witnesses],
    }
    text = "none" if not witnesses else "\n".join(
        f"{w.b}*({w.a}*3^{w.k}+1)*3^{w.l}" for w in witnesses
    )
    emit(session, out, text, [w.to_json() for w in witnesses])
    return EXIT_FAIL if (witnesses and args.expect_none) else EXIT_OK


def cmd_converge(args, session: Session) -> int:
    r = convergence_series(args.a, args.b, args.k_max, session.table, session.policy, args.mode, session.horizon)
    out = {"check": "convergence to stable defect of ab plus one", **r.to_json()}
    text = "\n".join(
        f"k={t.k} m={t.m} C={t.complexity} defect≈{t.defect.approx()} below={t.below_target}"
        f"{' exceptional' if t.exceptional else ''}"
        for t in r.terms
    ) + f"\ntarget≈{r.target.approx()} increasing={r.strictly_increasing} bounded={r.bounded_by_target}"
    emit(session, out, text, [t.to_json() for t in r.terms])
    return EXIT_OK


def cmd_dragons(args, session: Session) -> int:
    r = dragons_check(args.a, args.b, args.k_max, session.table, session.policy, session.horizon, args.l_max)
    out = {"check": "off-by-one degree-1 family", **r.to_json()}
    emit(session, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    g = parser.add_argument_group("global options")
    g.add_argument("--table", dest="table_path", default=d, help="table cache file")
    g.add_argument("--limit", dest="table_limit", type=_positive, default=d, help="table size to build")
    g.add_argument("--horizon", type=int, default=d, help="stability scan depth")
    g.add_argument("--policy", choices=[p.value for p in Policy], default=d)
    g.add_argument("--format", dest="output", choices=["json", "csv", "text"], default=d)
    g.add_argument("--threads", type=_positive, default=d)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intcpx", description="Integer complexity toolkit.")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        _global_options(p, suppress=True)
        p.set_defaults(func=fn)
        return p

    p = add("table", cmd_table, "build or inspect a table cache file")
    p.add_argument("action", choices=["build", "info"])

    for name, fn, help in [
        ("cpx", cmd_cpx, "integer complexity"),
        ("expr", cmd_expr, "a shortest expression"),
        ("defect", cmd_defect, "exact defect"),
        ("stable", cmd_stable, "stability verdict"),
        ("k-of", cmd_k_of, "least k making 3^k n stable"),
        ("stable-cpx", cmd_stable_cpx, "stable complexity"),
    ]:
        p = add(name, fn, help)
        p.add_argument("n", type=_positive, nargs="+")

    p = add("ldp", cmd_ldp, "low-defect expressions and pairs")
    p.add_argument("action", choices=["parse", "eval", "delta", "substantial", "gap"])
    p.add_argument("expression")
    p.add_argument("--C", type=int, help="base complexity (default: sum over constants)")
    p.add_argument("--at", type=_int_tuple, help="exponents, comma separated")

    for name, fn, help in [
        ("exceptions", cmd_exceptions, "exceptional set over a box"),
        ("min-k", cmd_min_k, "observed threshold K for a degree-1 pair"),
    ]:
        p = add(name, fn, help)
        p.add_argument("expression")
        p.add_argument("--C", type=int)
        p.add_argument("--mode", choices=["plain", "stable"], default="plain")
        if name == "exceptions":
            p.add_argument("--box", type=_int_tuple, required=True, help="per-variable maxima")
        else:
            p.add_argument("--k-max", type=int, required=True)

    p = add("leaders", cmd_leaders, "leaders up to N, or decompose one number")
    p.add_argument("--N", type=_positive)
    p.add_argument("--decompose", type=_positive)

    p = add("verify-covering", cmd_verify_covering, "check a candidate covering file")
    p.add_argument("file")
    p.add_argument("--s", type=_defect_arg, required=True, help="defect bound as C,n")
    p.add_argument("--N", type=_positive, required=True)

    p = add("enumerate", cmd_enumerate, "defect values up to N below a bound")
    p.add_argument("--N", type=_positive, required=True)
    p.add_argument("--s", type=_defect_arg, required=True, help="defect bound as C,n")
    p.add_argument("--classify", action="store_true", help="attach limit degrees")

    p = add("counterexample", cmd_counterexample, "search m = b(a 3^k + 1) 3^l")
    p.add_argument("--q", type=_positive, help="try every factorization ab = q")
    p.add_argument("--family", type=_pair_arg, action="append", help="a single family A,B")
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--expect-none", action="store_true", help="exit 1 if a witness exists")

    p = add("converge", cmd_converge, "defects of b(a 3^k + 1) against their limit")
    p.add_argument("--a", type=_positive, required=True)
    p.add_argument("--b", type=_positive, default=1)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--mode", choices=["plain", "stable"], default="plain")

    p = add("dragons", cmd_dragons, "off-by-one family check")
    p.add_argument("--a", type=_positive, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--l-max", type=int, default=0)
    return parser


def run(argv=None, environ=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        session = Session(resolve_config(args, environ))
        if args.command == "leaders" and args.N is None and args.decompose is None:
            raise IntComplexityError("leaders needs --N or --decompose")
        return args.func(args, session)
    except IndeterminateError as exc:
        print(f"indeterminate: {exc} {exc.items}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except (IntComplexityError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
