"""
Command-line front end: collocation condition-number tables, figure data,
conjecture scans, lambda_inf, and embedding plans.

Every command produces a :class:`Table` (fixed columns, string-valued rows)
which is rendered as CSV, JSON or aligned text.  Rendering never depends on
locale, timing or worker scheduling, so identical configurations give
byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from gmpy2 import mpfr

from . import __version__
from .scalars import DEFAULT_PRECISION, working_precision
from .spectra import (
    DENSE_ORACLE_MAX_ORDER,
    ConvergenceError,
    SingularMatrixError,
    circulant_condition,
    circulant_eigenvalues,
    dense_symmetric_eigenvalues,
    extreme_eigenvalues_bisection,
    gershgorin_bounds,
    round_significant,
)
from .splines import MAX_DEGREE, symbol
from .theory import (
    audit_circulant,
    lambda_infinity_sum,
    lambda_infinity_theorem,
    scan_cells,
)
from .toeplitz import (
    FactorizationError,
    build_toeplitz,
    dms_plan,
    ferreira_plan,
    newsam_dietrich_plan,
    periodization_plan,
    periodize,
    prime_embedding_order,
)

SCHEMA_VERSION = 1
COMMANDS = ("table31", "table51", "figure51", "figure52", "scan", "lambda-inf", "embed-plan")
FORMATS = ("csv", "json", "text")
TABLE_DIGITS = 7
FIGURE_DIGITS = 16
UNCERTIFIED = "~"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CERTIFICATION = 3
EXIT_COUNTEREXAMPLE = 4

POWERS = (64, 128, 256, 512, 1024, 2048)

DEFAULT_DEGREES = {
    "table31": (2, 3, 4, 5, 6),
    "table51": (2, 5, 6, 9, 21, 30),
    "figure51": (7,),
    "figure52": (9,),
    "scan": tuple(range(2, 31)),
    "lambda-inf": tuple(range(1, 31)),
    "embed-plan": (2, 5, 9),
}

DEFAULT_SIZES = {
    "table31": POWERS,
    "table51": POWERS,
    "figure51": (23, 24),
    "figure52": (16, 24, 32, 48, 64, 96, 128, 192, 256, 384, 512, 768, 1024),
    "scan": (),
    "lambda-inf": (),
    "embed-plan": (64, 256),
}

COLUMNS = {
    "table31": ("kind", "d", "n", "value", "exact", "certified_digits"),
    "table51": ("kind", "d", "n", "m", "value", "exact", "certified_digits"),
    "figure51": ("d", "n", "m", "k", "lambda", "is_min"),
    "figure52": ("d", "n", "m", "kappa_T", "kappa_C", "inv_lambda_inf"),
    "scan": (
        "d", "n", "m", "status", "positive_definite", "min_indices",
        "predicted_indices", "margin", "lambda_min", "exact_half_index",
    ),
    "lambda-inf": ("d", "sequence", "lambda_inf", "lambda_inf_decimal", "inv_lambda_inf", "routes_agree"),
    "embed-plan": ("d", "n", "order", "kind", "target_order", "guarantees", "padded_size"),
}


class ConfigError(ValueError):
    """Invalid command-line configuration."""


class CertificationError(ArithmeticError):
    """A value could not be certified at the requested precision."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    degrees: tuple[int, ...]
    sizes: tuple[int, ...]
    precision: int = DEFAULT_PRECISION
    output_format: str = "csv"
    output_path: str | None = None
    jobs: int = 1
    oracle: bool = False
    max_order: int = 512

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"unknown format {self.output_format!r}")
        if self.precision < 64:
            raise ConfigError(f"precision must be at least 64 bits, got {self.precision}")
        if self.jobs < 1:
            raise ConfigError(f"--jobs must be positive, got {self.jobs}")
        if not self.degrees:
            raise ConfigError("no degrees given")
        for d in self.degrees:
            if not 1 <= d <= MAX_DEGREE:
                raise ConfigError(f"degree {d} outside 1..{MAX_DEGREE}")
        for d in self.degrees:
            r = d // 2
            for n in self.sizes:
                if n - d < r + 1:
                    raise ConfigError(f"size n={n} too small for d={d}: need n - d >= {r + 1}")
        if self.command == "scan":
            for d in self.degrees:
                if self.max_order < 2 * (d // 2) + 1:
                    raise ConfigError(f"--max-order {self.max_order} is below 2r+1 for d={d}")


@dataclass
class Table:
    command: str
    columns: tuple[str, ...]
    rows: list[dict] = field(default_factory=list)
    summary: dict | None = None
    exit_code: int = EXIT_OK
    messages: list[str] = field(default_factory=list)


# -- argument parsing ---------------------------------------------------------------


def parse_int_list(text: str) -> tuple[int, ...]:
    """'2,5,9' or '2..6' or '16..64:8', freely combined with commas."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, _, rest = part.partition("..")
                hi, _, step = rest.partition(":")
                step_v = int(step) if step else 1
                if step_v < 1:
                    raise ValueError
                out.extend(range(int(lo), int(hi) + 1, step_v))
            else:
                out.append(int(part))
        except ValueError:
            raise ConfigError(f"cannot parse integer list item {part!r}") from None
    return tuple(out)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 already; keep the message short
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="cardinal-spectra",
        description="Spectral condition numbers of cardinal B-spline collocation matrices.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--degrees", help="spline degrees, e.g. 2,5,9 or 2..30")
    p.add_argument("--sizes", help="problem sizes n, e.g. 64,128 or 16..64:8")
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="working precision in bits")
    p.add_argument("--format", dest="output_format", choices=FORMATS, default="csv")
    p.add_argument("--out", dest="output_path", help="write output to PATH instead of stdout")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--oracle", action="store_true", help="cross-check small instances densely")
    p.add_argument("--max-order", type=int, default=512, help="largest circulant order for scan")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def config_from_args(argv: Sequence[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    degrees = parse_int_list(ns.degrees) if ns.degrees else DEFAULT_DEGREES[ns.command]
    sizes = parse_int_list(ns.sizes) if ns.sizes else DEFAULT_SIZES[ns.command]
    return RunConfig(
        command=ns.command,
        degrees=tuple(degrees),
        sizes=tuple(sizes),
        precision=ns.precision,
        output_format=ns.output_format,
        output_path=ns.output_path,
        jobs=ns.jobs,
        oracle=ns.oracle,
        max_order=ns.max_order,
    )


# -- cell workers (module level so they pickle) ---------------------------------------


def _mark(value, digits: int | None) -> str:
    text = round_significant(value, TABLE_DIGITS)
    if digits is None or digits < TABLE_DIGITS:
        return UNCERTIFIED + text
    return text


def _oracle_mismatch(T, report, precision: int) -> str | None:
    if T.order > DENSE_ORACLE_MAX_ORDER:
        return None
    eigs = dense_symmetric_eigenvalues(T.to_dense(), precision)
    with working_precision(precision):
        tol = mpfr(2) ** (-(precision // 2) + 28)
        for got, want in ((report.lambda_min, eigs[0]), (report.lambda_max, eigs[-1])):
            if abs(got - want) > tol * abs(want):
                return f"d={T.degree} n={T.size}: bisection {got} vs dense {want}"
    return None


def _kappa_t_cell(args: tuple) -> tuple[str, int | None, str | None]:
    d, n, precision, oracle = args
    T = build_toeplitz(d, n)
    rep = extreme_eigenvalues_bisection(T, precision)
    note = _oracle_mismatch(T, rep, precision) if oracle else None
    return _mark(rep.condition, rep.certified_digits), rep.certified_digits, note


def _kappa_c_cell(args: tuple) -> tuple[str, int | None, str | None]:
    d, n, precision, _oracle = args
    C = periodize(build_toeplitz(d, n))
    rep = circulant_condition(C, precision)
    return _mark(rep.condition, rep.certified_digits), rep.certified_digits, None


def _audit_cell(args: tuple):
    d, m, precision = args
    return audit_circulant(d, m, precision)


def _run(fn: Callable, tasks: list, jobs: int) -> list:
    """Map ``fn`` over ``tasks`` in order, optionally on a process pool."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def _fraction_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _collect_notes(table: Table, notes: Iterable[str | None]) -> None:
    for note in notes:
        if note:
            table.messages.append("oracle mismatch: " + note)
            table.exit_code = EXIT_CERTIFICATION


# -- commands ------------------------------------------------------------------------


def cmd_table31(config: RunConfig) -> Table:
    """kappa_2(T_n^d) grid plus the Gershgorin footer GB(d)."""
    table = Table("table31", COLUMNS["table31"])
    tasks = [(d, n, config.precision, config.oracle) for n in config.sizes for d in config.degrees]
    results = _run(_kappa_t_cell, tasks, config.jobs)
    for (d, n, _, _), (value, digits, _) in zip(tasks, results):
        table.rows.append(
            {"kind": "kappa_T", "d": d, "n": n, "value": value, "exact": "",
             "certified_digits": digits}
        )
    _collect_notes(table, (r[2] for r in results))
    for d in config.degrees:
        gb = gershgorin_bounds(symbol(d)).condition_bound
        table.rows.append(
            {"kind": "gershgorin_bound", "d": d, "n": "",
             "value": "" if gb is None else round_significant(gb, TABLE_DIGITS),
             "exact": "not_dominant" if gb is None else _fraction_text(gb),
             "certified_digits": ""}
        )
    return table


def cmd_table51(config: RunConfig) -> Table:
    """kappa_2(T_n^d), kappa_2(C_m^d) and the footer 1/lambda_inf^d."""
    table = Table("table51", COLUMNS["table51"])
    tasks = [(d, n, config.precision, config.oracle) for n in config.sizes for d in config.degrees]
    t_res = _run(_kappa_t_cell, tasks, config.jobs)
    c_res = _run(_kappa_c_cell, tasks, config.jobs)
    for (d, n, _, _), (tv, td, _), (cv, cd, _) in zip(tasks, t_res, c_res):
        m = n - d + d // 2
        table.rows.append(
            {"kind": "kappa_T", "d": d, "n": n, "m": m, "value": tv, "exact": "", "certified_digits": td}
        )
        table.rows.append(
            {"kind": "kappa_C", "d": d, "n": n, "m": m, "value": cv, "exact": "", "certified_digits": cd}
        )
    _collect_notes(table, (r[2] for r in t_res))
    for d in config.degrees:
        inv = 1 / lambda_infinity_sum(d)
        table.rows.append(
            {"kind": "inv_lambda_inf", "d": d, "n": "", "m": "",
             "value": round_significant(inv, TABLE_DIGITS), "exact": _fraction_text(inv),
             "certified_digits": ""}
        )
    return table


def cmd_figure51(config: RunConfig) -> Table:
    """All eigenvalues lambda_k(C_m^d), k = 0..m-1, flagging the minimal ones."""
    table = Table("figure51", COLUMNS["figure51"])
    for d in config.degrees:
        for n in config.sizes:
            T = build_toeplitz(d, n)
            C = periodize(T)
            verdict = audit_circulant(d, C.order, config.precision)
            for k, lam in enumerate(circulant_eigenvalues(C, config.precision)):
                table.rows.append(
                    {"d": d, "n": n, "m": C.order, "k": k,
                     "lambda": round_significant(lam, FIGURE_DIGITS),
                     "is_min": k in verdict.min_index_set}
                )
    return table


def cmd_figure52(config: RunConfig) -> Table:
    """kappa_2(T_n^d), kappa_2(C_m^d) and the constant 1/lambda_inf^d over n."""
    table = Table("figure52", COLUMNS["figure52"])
    tasks = [(d, n, config.precision, config.oracle) for d in config.degrees for n in config.sizes]
    t_res = _run(_kappa_t_cell, tasks, config.jobs)
    c_res = _run(_kappa_c_cell, tasks, config.jobs)
    for (d, n, _, _), (tv, _, _), (cv, _, _) in zip(tasks, t_res, c_res):
        table.rows.append(
            {"d": d, "n": n, "m": n - d + d // 2, "kappa_T": tv, "kappa_C": cv,
             "inv_lambda_inf": round_significant(1 / lambda_infinity_sum(d), TABLE_DIGITS)}
        )
    _collect_notes(table, (r[2] for r in t_res))
    return table


def _index_text(indices) -> str:
    return " ".join(str(k) for k in sorted(indices))


def cmd_scan(config: RunConfig) -> Table:
    """Audit the minimal-eigenvalue conjecture cell by cell."""
    table = Table("scan", COLUMNS["scan"])
    if config.sizes:
        cells = [(d, n) for d in config.degrees for n in config.sizes]
    else:
        cells = scan_cells(config.degrees, config.max_order)
    tasks = [(d, n - d + d // 2, config.precision) for d, n in cells]
    verdicts = _run(_audit_cell, tasks, config.jobs)
    counts = {"agree": 0, "disagree": 0, "indeterminate": 0}
    for v in verdicts:
        counts[v.status] += 1
        table.rows.append(
            {"d": v.d, "n": v.n, "m": v.m, "status": v.status,
             "positive_definite": v.positive_definite,
             "min_indices": _index_text(v.min_index_set),
             "predicted_indices": _index_text(v.predicted_indices),
             "margin": round_significant(v.margin, TABLE_DIGITS),
             "lambda_min": round_significant(v.lambda_min, FIGURE_DIGITS),
             "exact_half_index": "" if v.exact_half_index is None else v.exact_half_index}
        )
        if v.status == "disagree":
            table.messages.append(
                f"COUNTEREXAMPLE d={v.d} n={v.n} m={v.m}: minima at {sorted(v.min_index_set)}, "
                f"predicted {sorted(v.predicted_indices)}, positive_definite={v.positive_definite}"
            )
    table.summary = {"cells": len(verdicts), **counts}
    if counts["disagree"]:
        table.exit_code = EXIT_COUNTEREXAMPLE
    elif counts["indeterminate"]:
        table.exit_code = EXIT_CERTIFICATION
    return table


def cmd_lambda_inf(config: RunConfig) -> Table:
    """lambda_inf^d exactly, by the alternating symbol sum and by the integer-sequence formula."""
    table = Table("lambda-inf", COLUMNS["lambda-inf"])
    for d in config.degrees:
        lam = lambda_infinity_sum(d)
        agree = lam == lambda_infinity_theorem(d)
        table.rows.append(
            {"d": d, "sequence": "tangent" if d % 2 else "euler",
             "lambda_inf": _fraction_text(lam),
             "lambda_inf_decimal": round_significant(lam, FIGURE_DIGITS),
             "inv_lambda_inf": round_significant(1 / lam, TABLE_DIGITS),
             "routes_agree": agree}
        )
        if not agree:
            table.exit_code = EXIT_CERTIFICATION
            table.messages.append(f"d={d}: symbol sum and integer-sequence formula differ")
    return table


def cmd_embed_plan(config: RunConfig) -> Table:
    """Circulant embedding candidates for each T_n^d."""
    table = Table("embed-plan", COLUMNS["embed-plan"])
    for d in config.degrees:
        for n in config.sizes:
            T = build_toeplitz(d, n)
            kappa = extreme_eigenvalues_bisection(T, config.precision, certify=False).condition
            plans = [
                periodization_plan(T),
                prime_embedding_order(d, n),
                ferreira_plan(T, config.precision),
                dms_plan(T, kappa, config.precision),
                newsam_dietrich_plan(T, kappa, config.precision),
            ]
            for plan in plans:
                table.rows.append(
                    {"d": d, "n": n, "order": T.order, "kind": plan.kind,
                     "target_order": plan.target_order, "guarantees": plan.guarantees,
                     "padded_size": "" if plan.padded_size is None else plan.padded_size}
                )
    return table


DISPATCH = {
    "table31": cmd_table31,
    "table51": cmd_table51,
    "figure51": cmd_figure51,
    "figure52": cmd_figure52,
    "scan": cmd_scan,
    "lambda-inf": cmd_lambda_inf,
    "embed-plan": cmd_embed_plan,
}


# -- rendering -----------------------------------------------------------------------


def _cell_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    return str(v)


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_cell_text(row.get(c)) for c in table.columns])
    return buf.getvalue()


def render_json(table: Table, config: RunConfig) -> str:
    cfg = asdict(config)
    cfg.pop("output_path")
    cfg.pop("jobs")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "rows": [{c: row.get(c, "") for c in table.columns} for row in table.rows],
        "generated_by": f"cardinal-spectra {__version__}",
    }
    if table.summary is not None:
        doc["summary"] = table.summary
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def render_text(table: Table) -> str:
    cells = [list(table.columns)] + [
        [_cell_text(row.get(c)) for c in table.columns] for row in table.rows
    ]
    widths = [max(len(r[i]) for r in cells) for i in range(len(table.columns))]
    lines = ["  ".join(v.rjust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
    if table.summary is not None:
        lines.append("summary: " + ", ".join(f"{k}={v}" for k, v in table.summary.items()))
    return "\n".join(lines) + "\n"


def render(table: Table, config: RunConfig) -> str:
    if config.output_format == "json":
        return render_json(table, config)
    if config.output_format == "text":
        return render_text(table)
    return render_csv(table)


def run(config: RunConfig) -> Table:
    try:
        return DISPATCH[config.command](config)
    except (ConvergenceError, SingularMatrixError, FactorizationError) as exc:
        raise CertificationError(str(exc)) from exc


def main(argv: Sequence[str] | None = None) -> int:
    try:
        config = config_from_args(argv)
    except ConfigError as exc:
        print(f"cardinal-spectra: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = run(config)
    except CertificationError as exc:
        print(f"cardinal-spectra: certification failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    text = render(table, config)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for msg in table.messages:
        print(msg, file=sys.stderr)
    if table.summary is not None and config.output_format == "csv":
        print("summary: " + ", ".join(f"{k}={v}" for k, v in table.summary.items()), file=sys.stderr)
    return table.exit_code


if __name__ == "__main__":
    sys.exit(main())
