"""Instance parsers (DIMACS CNF, OR-Library set cover) and CSV output."""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence

from .problems.sat import CnfFormula
from .problems.scp import ScpInstance
from .records import HistogramRecord, RunRecord, SummaryRecord, TraceRow


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# DIMACS CNF
# ---------------------------------------------------------------------------


def parse_dimacs(text: str, strict: bool = True) -> CnfFormula:
    """Parse DIMACS CNF.

    Comment lines start with ``c``; a line starting with ``%`` ends the
    clause section (SATLIB convention). In strict mode the header's clause
    count and variable count must match the body exactly.
    """
    header = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s[0] == "c":
            continue
        if s[0] == "%":
            break
        if s[0] == "p":
            parts = s.split()
            if header is not None:
                raise ParseError(f"line {lineno}: duplicate header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: bad header {s!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError(f"line {lineno}: bad header {s!r}") from None
            if header[0] < 1 or header[1] < 0:
                raise ParseError(f"line {lineno}: bad header counts")
            continue
        if header is None:
            raise ParseError(f"line {lineno}: clause before 'p cnf' header")
        for tok in s.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                if not current:
                    raise ParseError(f"line {lineno}: empty clause")
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > header[0]:
                    raise ParseError(f"line {lineno}: literal {lit} exceeds {header[0]} variables")
                current.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        raise ParseError("last clause is not zero-terminated")
    n_vars, n_clauses = header
    if strict:
        if len(clauses) != n_clauses:
            raise ParseError(f"header declares {n_clauses} clauses, found {len(clauses)}")
        top = max((abs(l) for c in clauses for l in c), default=0)
        if top != n_vars:
            raise ParseError(f"header declares {n_vars} variables, highest used is {top}")
    return CnfFormula(n_vars, tuple(clauses))


def format_dimacs(formula: CnfFormula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {formula.n_vars} {formula.n_clauses}")
    lines += [" ".join(map(str, c)) + " 0" for c in formula.clauses]
    return "\n".join(lines) + "\n"


def read_dimacs(path, strict: bool = True) -> CnfFormula:
    return parse_dimacs(Path(path).read_text(), strict)


# ---------------------------------------------------------------------------
# OR-Library set covering
# ---------------------------------------------------------------------------


def parse_orlib_scp(text: str) -> ScpInstance:
    """Parse the OR-Library SCP layout.

    ``m n``, then ``n`` column costs, then for every row a count ``k``
    followed by ``k`` one-based column indices. Line breaks are not
    significant.
    """
    tokens = text.split()
    pos = 0

    def take(what: str) -> int | float:
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError(f"truncated file: expected {what}")
        tok = tokens[pos]
        pos += 1
        try:
            return int(tok)
        except ValueError:
            try:
                return float(tok)
            except ValueError:
                raise ParseError(f"bad token {tok!r} for {what}") from None

    def take_int(what: str) -> int:
        v = take(what)
        if not isinstance(v, int):
            raise ParseError(f"expected an integer for {what}, got {v!r}")
        return v

    m = take_int("row count")
    n = take_int("column count")
    if m < 1 or n < 1:
        raise ParseError("row and column counts must be positive")
    costs = []
    for j in range(n):
        c = take(f"cost of column {j + 1}")
        if c <= 0:
            raise ParseError(f"column {j + 1} has non-positive cost {c}")
        costs.append(c)
    cover = []
    for i in range(m):
        k = take_int(f"column count of row {i + 1}")
        if k < 1:
            raise ParseError(f"row {i + 1} is covered by no column")
        row = []
        for _ in range(k):
            j = take_int(f"column index in row {i + 1}")
            if not 1 <= j <= n:
                raise ParseError(f"row {i + 1} references column {j} outside 1..{n}")
            row.append(j - 1)
        cover.append(tuple(row))
    if pos != len(tokens):
        raise ParseError(f"{len(tokens) - pos} trailing tokens after last row")
    return ScpInstance(tuple(costs), tuple(cover))


def format_orlib_scp(instance: ScpInstance, per_line: int = 12) -> str:
    def chunk(values):
        values = list(values)
        return [" ".join(map(str, values[i:i + per_line]))
                for i in range(0, len(values), per_line)]

    lines = [f"{instance.m} {instance.n}"]
    lines += chunk(instance.costs)
    for row in instance.cover:
        lines.append(str(len(row)))
        lines += chunk(j + 1 for j in row)
    return "\n".join(lines) + "\n"


def read_orlib_scp(path) -> ScpInstance:
    return parse_orlib_scp(Path(path).read_text())


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _write(rows: Iterable[Sequence], columns: Sequence[str], destination) -> None:
    if isinstance(destination, (str, Path)):
        with open(destination, "w", newline="") as fh:
            _write(rows, columns, fh)
        return
    w = csv.writer(destination, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])


def write_run_csv(records: Iterable[RunRecord], destination) -> None:
    cols = RunRecord.columns()
    _write(([getattr(r, c) for c in cols] for r in records), cols, destination)


def write_summary_csv(summaries: Iterable[SummaryRecord], destination) -> None:
    cols = SummaryRecord.columns()
    _write(([getattr(r, c) for c in cols] for r in summaries), cols, destination)


def write_histogram_csv(histogram: Iterable[HistogramRecord], destination) -> None:
    rows = sorted(histogram, key=lambda h: h.bin_low)
    _write(((h.bin_low, h.bin_high, h.count) for h in rows), HistogramRecord.columns(), destination)


def write_trace_csv(trace: Iterable[TraceRow], destination) -> None:
    cols = TraceRow.columns()
    _write(([getattr(r, c) for c in cols] for r in trace), cols, destination)


def _num(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        return float(text)


def read_run_csv(source) -> list[RunRecord]:
    """Inverse of :func:`write_run_csv` (reals at 6 significant digits)."""
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_run_csv(fh)
    reader = csv.DictReader(source)
    out = []
    text_cols = {"problem", "selection", "deletion"}
    float_cols = {"pc", "pm", "generations", "best_fitness", "best_raw"}
    for row in reader:
        kw = {}
        for k, v in row.items():
            if k in text_cols:
                kw[k] = v
            elif k in float_cols:
                kw[k] = float(v)
            else:
                kw[k] = _num(v)
        out.append(RunRecord(**kw))
    return out


def read_histogram_csv(source) -> list[HistogramRecord]:
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_histogram_csv(fh)
    return [HistogramRecord(float(r["bin_low"]), float(r["bin_high"]), int(r["count"]))
            for r in csv.DictReader(source)]


def csv_text(writer, items) -> str:
    buf = io.StringIO()
    writer(items, buf)
    return buf.getvalue()
