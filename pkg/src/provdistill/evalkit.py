"""Detection metrics and run comparison tables.

Malicious is the positive class. Ratios with a zero denominator are reported
as ``None`` (``NA`` in CSV/text) rather than coerced to 0.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import EmptyEvaluation, ShapeMismatch

R_SWEEP = (0.05, 0.03, 0.01, 0.008, 0.006, 0.004, 0.002)
CSV_HEADER = ("method", "r", "accuracy", "precision", "recall", "f1", "train_seconds")
NA = "NA"


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsBlock:
    accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]

    def rounded(self, ndigits: int = 2) -> "MetricsBlock":
        return MetricsBlock(*(None if v is None else round(v, ndigits) for v in self.as_tuple()))

    def as_tuple(self) -> tuple:
        return (self.accuracy, self.precision, self.recall, self.f1)


def confusion(flags: Sequence[bool], malicious: Sequence[bool]) -> ConfusionCounts:
    """Counts from aligned predicted flags and ground-truth malicious markers."""
    if len(flags) != len(malicious):
        raise ShapeMismatch("flags and ground truth differ in length")
    tp = fp = fn = tn = 0
    for f, m in zip(flags, malicious):
        f, m = bool(f), bool(m)
        if f and m:
            tp += 1
        elif f:
            fp += 1
        elif m:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fp, fn, tn)


def confusion_for_ids(flagged_ids: Iterable[str], node_ids: Sequence[str], malicious_ids: Iterable[str]) -> ConfusionCounts:
    flagged = set(flagged_ids)
    bad = set(malicious_ids)
    return confusion([n in flagged for n in node_ids], [n in bad for n in node_ids])


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def metrics(c: ConfusionCounts) -> MetricsBlock:
    if c.total <= 0:
        raise EmptyEvaluation("no nodes were evaluated")
    accuracy = (c.tp + c.tn) / c.total
    precision = _ratio(c.tp, c.tp + c.fp)
    recall = _ratio(c.tp, c.tp + c.fn)
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return MetricsBlock(accuracy, precision, recall, f1)


@dataclass(frozen=True)
class RunResult:
    method: str
    r: Optional[float]
    metrics: MetricsBlock
    train_seconds: Optional[float] = None
    counts: Optional[ConfusionCounts] = None


def _fmt(v) -> str:
    if v is None:
        return NA
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _delta(a: Optional[float], b: Optional[float]) -> Optional[float]:
    return None if a is None or b is None else a - b


@dataclass
class ComparisonTable:
    rows: list[RunResult]
    baseline: Optional[RunResult] = None

    def deltas(self, row: RunResult) -> MetricsBlock:
        """Metric differences of ``row`` against the baseline (``row - baseline``)."""
        if self.baseline is None:
            return MetricsBlock(None, None, None, None)
        return MetricsBlock(*(_delta(a, b) for a, b in zip(row.metrics.as_tuple(), self.baseline.metrics.as_tuple())))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in self.rows:
            secs = None if row.train_seconds is None else f"{row.train_seconds:.6f}"
            w.writerow([row.method, _fmt(row.r), *(_fmt(v) for v in row.metrics.as_tuple()), secs or NA])
        return buf.getvalue()

    def to_text(self, ndigits: int = 2) -> str:
        head = f"{'method':<10} {'r':>7} {'acc':>6} {'prec':>6} {'rec':>6} {'f1':>6} {'t(s)':>9} {'dF1':>7}"
        lines = [head, "-" * len(head)]

        def cell(v, width):
            return f"{NA:>{width}}" if v is None else f"{v:>{width}.{ndigits}f}"

        for row in self.rows:
            m = row.metrics
            r = "-" if row.r is None else f"{row.r:g}"
            t = NA if row.train_seconds is None else f"{row.train_seconds:.2f}"
            lines.append(
                f"{row.method:<10} {r:>7} {cell(m.accuracy, 6)} {cell(m.precision, 6)} "
                f"{cell(m.recall, 6)} {cell(m.f1, 6)} {t:>9} {cell(self.deltas(row).f1, 7)}"
            )
        return "\n".join(lines) + "\n"


def compare_runs(runs: Sequence[RunResult], baseline_method: str = "full") -> ComparisonTable:
    """Tabulate runs ordered by method then descending ``r``; baseline rows go last."""
    baseline = next((r for r in runs if r.method == baseline_method), None)
    rest = sorted((r for r in runs if r.method != baseline_method),
                  key=lambda r: (r.method, -(r.r if r.r is not None else 0.0)))
    rows = rest + ([baseline] if baseline is not None else [])
    return ComparisonTable(rows, baseline)
