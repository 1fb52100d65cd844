"""CSV, text-table and plot-data output.

Per-iteration CSV columns, in order::

    k, rel_err_a_norm, true_res_norm, upd_res_norm, residual_gap_norm,
    nu_gap, w_gap_norm, s_gap_norm, lanczos_res_norm, succ_orth,
    alpha, beta, nu, nu_prime

Floats are written with ``repr`` so that reading a file back gives the same
bits; fields that do not apply to a variant are empty cells.

Plot data is long format: ``variant, k, metric, value``.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from .diagnostics import CSV_COLUMNS, IterationRecord, Summary, summarize

INDEX_NAME = "index.csv"
INDEX_COLUMNS = ("problem", "preconditioner", "n", "nnz", "variant", "status", "file")


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _open(target, mode="w"):
    if hasattr(target, "write") or hasattr(target, "read"):
        return target, False
    path = Path(target)
    if "w" in mode or "a" in mode:
        path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, mode, newline=""), True


def emit_csv(history, target):
    """Write the per-iteration records of ``history`` (or a list of records)."""
    records = history.records if hasattr(history, "records") else history
    fh, owned = _open(target)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([_cell(v) for v in rec.as_row()])
    finally:
        if owned:
            fh.close()
    return target


def csv_text(history):
    buf = io.StringIO()
    emit_csv(history, buf)
    return buf.getvalue()


def read_csv(source):
    """Parse a per-iteration CSV back into :class:`IterationRecord` objects."""
    fh, owned = _open(source, "r")
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header!r}")
        records = []
        for row in reader:
            if not row:
                continue
            values = {}
            for name, cell in zip(CSV_COLUMNS, row):
                if cell == "":
                    values[name] = None
                elif name == "k":
                    values[name] = int(cell)
                else:
                    values[name] = float(cell)
            records.append(IterationRecord(**values))
        return records
    finally:
        if owned:
            fh.close()


def emit_plot_data(histories, target, metrics=None):
    """Long-format ``variant,k,metric,value`` rows for every present value.

    ``histories`` is a mapping label -> history or an iterable of histories.
    """
    items = histories.items() if hasattr(histories, "items") else ((h.variant, h) for h in histories)
    metrics = metrics or CSV_COLUMNS[1:]
    fh, owned = _open(target)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("variant", "k", "metric", "value"))
        for label, h in items:
            for rec in h.records:
                for m in metrics:
                    v = getattr(rec, m)
                    if v is not None:
                        writer.writerow((label, rec.k, m, _cell(v)))
    finally:
        if owned:
            fh.close()
    return target


# --- summary tables ----------------------------------------------------------


def _fmt_iter(cell):
    if cell is None:
        return ""
    if cell.dash:
        return "-"
    text = str(cell.iterations)
    return f"*{text}*" if cell.bold_iterations else text


def _fmt_err(cell):
    if cell is None:
        return ""
    text = "-inf" if cell.min_log10_err == -math.inf else f"{cell.min_log10_err:.2f}"
    return f"*{text}*" if cell.bold_error else text


def emit_table(rows, variants=None):
    """Plain-text table: one row per (problem, preconditioner), two columns per variant.

    Values differing from HS by more than ten percent are wrapped in
    ``*...*``; ``-`` marks a variant that never reached the error reduction.
    """
    from .experiment import SummaryTable

    table = rows if isinstance(rows, SummaryTable) else SummaryTable(list(rows))
    if not table.rows:
        raise ValueError("no summary rows to tabulate")
    variants = list(variants or table.variants)
    header = ["problem", "prec", "n", "nnz"]
    for v in variants:
        header += [f"{v} it", f"{v} err"]
    body = []
    for row in table.rows:
        line = [row.problem, row.preconditioner, str(row.n), str(row.nnz)]
        for v in variants:
            cell = row.cells.get(v)
            line += [_fmt_iter(cell), _fmt_err(cell)]
        body.append(line)
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    out = []
    for i, line in enumerate([header] + body):
        out.append("  ".join(c.rjust(w) if j >= 2 else c.ljust(w) for j, (c, w) in enumerate(zip(line, widths))).rstrip())
        if i == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


def append_index(result, out_dir):
    """Record the CSVs of one experiment in ``out_dir/index.csv``."""
    path = Path(out_dir) / INDEX_NAME
    new = not path.exists()
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if new:
            writer.writerow(INDEX_COLUMNS)
        row = result.row
        for label, csv_path in result.csv_paths.items():
            writer.writerow((row.problem, row.preconditioner, row.n, row.nnz, label,
                             result.row.cells[label].status, Path(csv_path).name))
    return path


def table_from_index(path):
    """Rebuild the summary table from an index and the CSVs it lists."""
    from .experiment import SummaryRow, SummaryTable

    path = Path(path)
    if path.is_dir():
        path = path / INDEX_NAME
    groups = {}
    with open(path, newline="") as fh:
        for entry in csv.DictReader(fh):
            key = (entry["problem"], entry["preconditioner"])
            g = groups.setdefault(key, {"n": int(entry["n"]), "nnz": int(entry["nnz"]), "s": {}, "st": {}})
            records = read_csv(path.parent / entry["file"])
            g["s"][entry["variant"]] = summarize(records)
            g["st"][entry["variant"]] = entry["status"]
    rows = [SummaryRow.from_summaries(p, m, g["n"], g["nnz"], g["s"], g["st"]) for (p, m), g in groups.items()]
    return SummaryTable(rows)


__all__ = [
    "CSV_COLUMNS", "INDEX_NAME", "Summary", "append_index", "csv_text", "emit_csv", "emit_plot_data",
    "emit_table", "read_csv", "table_from_index",
]
