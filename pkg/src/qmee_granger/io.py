"""CSV channel ingestion and causality report emission.

Input CSV: a header row of channel names, then one numeric row per sample.
Lines starting with ``#`` are comments and may appear anywhere; a comment of
the form ``# sample_rate: 250`` is kept as metadata.

Report schemas
--------------
JSON::

    {"criterion": ..., "config": {...}, "channels": [...],
     "pairs": [{"from", "to", "f", "order", "warnings"}, ...],
     "matrix": [[...], ...], "errors": [...]}

``matrix[i][j]`` is the index from channel ``i`` to channel ``j``; the
diagonal and failed pairs are ``null``.

CSV: one row per directed pair with columns ``from,to,f,p,criterion``.
Floats are written with ``repr`` so they round-trip exactly.
"""

import csv
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from .exceptions import (
    NonNumericCellError,
    ParseError,
    RaggedRowsError,
    ReportIOError,
)
from .timeseries import TimeSeries

_RATE_RE = re.compile(r"#\s*sample_rate\s*[:=]\s*([0-9.eE+-]+)")


@dataclass(frozen=True)
class ChannelTable:
    names: List[str]
    columns: np.ndarray  # shape (n_samples, n_channels)
    sample_rate: Optional[float] = None

    @property
    def n_samples(self):
        return self.columns.shape[0]

    def series(self):
        return [TimeSeries(self.columns[:, k], name=name) for k, name in enumerate(self.names)]


def parse_csv(path):
    """Read a multichannel CSV file into a :class:`ChannelTable`.

    Raises
    ------
    ParseError
        Missing header, empty data or duplicate names.
    RaggedRowsError
        A row whose cell count differs from the header.
    NonNumericCellError
        A cell that is not a finite number.
    """
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ParseError(f"cannot open {path}: {exc}") from exc

    header = None
    rows = []
    sample_rate = None
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            first = row[0].lstrip()
            if first.startswith("#"):
                m = _RATE_RE.match(",".join(row).strip())
                if m:
                    sample_rate = float(m.group(1))
                continue
            if header is None:
                header = [cell.strip() for cell in row]
                if any(not name for name in header):
                    raise ParseError("empty channel name in header", row=lineno)
                if len(set(header)) != len(header):
                    raise ParseError("duplicate channel names in header", row=lineno)
                continue
            if len(row) != len(header):
                raise RaggedRowsError(
                    f"expected {len(header)} cells, found {len(row)}", row=lineno)
            values = []
            for col, cell in enumerate(row, start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise NonNumericCellError(f"not a number: {cell!r}", row=lineno,
                                              column=col) from None
                if not math.isfinite(v):
                    raise NonNumericCellError(f"non-finite value {cell!r}", row=lineno,
                                              column=col)
                values.append(v)
            rows.append(values)

    if header is None:
        raise ParseError(f"{path}: no header row")
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return ChannelTable(header, np.array(rows, dtype=np.float64), sample_rate)


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def report_payload(analysis, extra_config=None):
    """JSON-ready dict for a :class:`~qmee_granger.causality.ChannelAnalysis`."""
    config = analysis.config.as_dict()
    if extra_config:
        config.update(extra_config)
    pairs = [
        {"from": a, "to": b, "f": _num(f), "order": order, "warnings": list(w)}
        for a, b, f, order, w in analysis.pairs()
    ]
    return {
        "criterion": analysis.config.criterion,
        "config": config,
        "channels": list(analysis.names),
        "pairs": pairs,
        "matrix": [[_num(v) for v in row] for row in analysis.matrix],
        "errors": [
            {"from": analysis.names[i], "to": analysis.names[j], "error": msg}
            for (i, j), msg in sorted(analysis.errors.items())
        ],
    }


def emit_report(analysis, fmt, path, extra_config=None):
    """Write ``analysis`` as ``'json'`` or ``'csv'`` to ``path``.

    Nothing is written when there are no pairs.
    """
    pairs = analysis.pairs()
    if not pairs:
        raise ValueError("no causality pairs to report")
    fmt = fmt.lower()
    if fmt not in ("json", "csv"):
        raise ValueError(f"unknown report format {fmt!r}")
    try:
        if fmt == "json":
            text = json.dumps(report_payload(analysis, extra_config), indent=2)
            Path(path).write_text(text + "\n")
        else:
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["from", "to", "f", "p", "criterion"])
                for a, b, f, order, _ in pairs:
                    writer.writerow([a, b, repr(float(f)), "" if order is None else order,
                                     analysis.config.criterion])
    except OSError as exc:
        raise ReportIOError(f"cannot write report to {path}: {exc}") from exc
