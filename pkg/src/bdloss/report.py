"""Evaluation reports and their JSON / CSV serializations."""
import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import IoError
from .metrics import METRICS, rank_table


@dataclass
class ReportRow:
    method: str
    dataset: str
    folds: list  # one {metric: value} dict per fold

    @property
    def metrics(self):
        return list(self.folds[0])

    def mean(self, metric):
        return float(np.mean([f[metric] for f in self.folds]))

    def std(self, metric):
        # population std (ddof=0)
        return float(np.std([f[metric] for f in self.folds]))


@dataclass
class EvalReport:
    rows: list
    metadata: dict = field(default_factory=dict)

    @property
    def metrics(self):
        return self.rows[0].metrics

    def row(self, method, dataset=None):
        for r in self.rows:
            if r.method == method and (dataset is None or r.dataset == dataset):
                return r
        raise KeyError(method)

    def means(self):
        """method -> dataset -> metric -> mean, the input layout of ``rank_table``."""
        out = {}
        for r in self.rows:
            out.setdefault(r.method, {})[r.dataset] = {m: r.mean(m) for m in r.metrics}
        return out

    def ranks(self):
        return rank_table(self.means())

    def to_dict(self):
        ranks, avg = self.ranks()
        rows = []
        for r in self.rows:
            rows.append({
                "method": r.method,
                "dataset": r.dataset,
                "mean": {m: r.mean(m) for m in r.metrics},
                "std": {m: r.std(m) for m in r.metrics},
                "rank": {m: ranks[m][r.dataset][r.method] for m in r.metrics},
                "folds": [{m: float(f[m]) for m in r.metrics} for f in r.folds],
            })
        return {"metadata": self.metadata, "rows": rows, "avg_rank": avg}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def to_json(obj):
    """Stable JSON text; floats use ``repr`` and so round-trip exactly."""
    if hasattr(obj, "to_dict"):
        obj = obj.to_dict()
    return json.dumps(_plain(obj), indent=2, allow_nan=True) + "\n"


def report_csv(report):
    ranks, _ = report.ranks()
    metrics = report.metrics
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["method", "dataset"]
    for m in metrics:
        header += [f"{m}_mean", f"{m}_std", f"{m}_rank"]
    w.writerow(header)
    for r in report.rows:
        line = [r.method, r.dataset]
        for m in metrics:
            line += [f"{r.mean(m):.6g}", f"{r.std(m):.6g}", ranks[m][r.dataset][r.method]]
        w.writerow(line)
    return buf.getvalue()


def write_text(text, path):
    if path is None or path == "-":
        import sys

        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(str(exc)) from exc


def emit_report(report, fmt="json", path=None):
    if fmt == "json":
        text = to_json(report)
    elif fmt == "csv":
        text = report_csv(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    write_text(text, path)
    return text


__all__ = ["ReportRow", "EvalReport", "emit_report", "report_csv", "to_json", "METRICS"]
