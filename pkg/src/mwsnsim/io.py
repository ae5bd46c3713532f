"""CSV writers for sweep results and snapshot exports.

All files are UTF-8 with LF line endings, numbers are rendered with six
significant digits, and every file is written atomically (temp file plus
rename) so a failed run never leaves a partial CSV behind.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile
from typing import Iterable, Sequence

from .harness import SnapshotExport, SweepRow

SWEEP_HEADER = (
    "model",
    "n_nodes",
    "target_duration_s",
    "detection_mean",
    "detection_stderr",
    "tracking_mean",
    "tracking_stderr",
    "runs",
)
SNAPSHOT_HEADER = ("time_s", "node_index", "x_m", "y_m")
HISTOGRAM_HEADER = ("bin_left_m", "bin_right_m", "count")


def fmt(x: float) -> str:
    s = format(float(x), ".6g")
    return "0" if s == "-0" else s


def _render(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def sweep_csv_text(rows: Iterable[SweepRow]) -> str:
    ordered = sorted(rows, key=lambda r: (r.model.label, r.n_nodes, r.target_duration))
    return _render(SWEEP_HEADER, (
        (
            r.model.label,
            str(r.n_nodes),
            fmt(r.target_duration),
            fmt(r.detection.mean),
            fmt(r.detection.std_error),
            fmt(r.tracking.mean),
            fmt(r.tracking.std_error),
            str(r.detection.runs),
        )
        for r in ordered
    ))


def snapshot_csv_text(export: SnapshotExport) -> str:
    return _render(SNAPSHOT_HEADER, (
        (fmt(t), str(i), fmt(x), fmt(y)) for t, i, x, y in export.positions
    ))


def histogram_csv_text(export: SnapshotExport) -> str:
    counts = export.histogram()
    edges = export.bin_edges
    return _render(HISTOGRAM_HEADER, (
        (fmt(edges[k]), fmt(edges[k + 1]), str(int(counts[k]))) for k in range(len(counts))
    ))


def write_text_atomic(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror or e}") from e
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as e:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise OSError(f"cannot write {path}: {e.strerror or e}") from e


def write_sweep_csv(rows: Iterable[SweepRow], path) -> None:
    write_text_atomic(path, sweep_csv_text(rows))


def write_snapshot_csv(export: SnapshotExport, path) -> None:
    write_text_atomic(path, snapshot_csv_text(export))


def write_histogram_csv(export: SnapshotExport, path) -> None:
    write_text_atomic(path, histogram_csv_text(export))
