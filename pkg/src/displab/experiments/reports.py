"""Experiment configuration echo and machine-readable reports.

A report is a list of statistic rows, each optionally checked against a
bound with three standard errors of Monte Carlo slack. Serialized output
(CSV schema ``experiment,n,trials,seed,label,value,stderr,bound,pass`` or
the JSON mirror) is a pure function of the configuration: wall time is
kept in memory for console display but never written, so reruns produce
byte-identical files.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = ["ExperimentConfig", "StatRow", "ReportRecord", "write_report", "render_csv", "render_json"]

CSV_HEADER = "experiment,n,trials,seed,label,value,stderr,bound,pass"


@dataclass(frozen=True)
class ExperimentConfig:
    """Catalog key plus the knobs every experiment shares."""

    name: str
    n: int
    trials: int
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")


@dataclass(frozen=True)
class StatRow:
    """One measured statistic, optionally judged against a bound.

    ``cmp`` is ``two-sided`` (|value - bound| <= 3 se), ``upper``
    (value <= bound + 3 se) or ``lower`` (value >= bound - 3 se); rows
    without a bound are informational and carry ``passed=None``.
    """

    label: str
    value: float
    stderr: float = 0.0
    bound: float | None = None
    cmp: str | None = None
    passed: bool | None = field(default=None)

    @staticmethod
    def checked(label: str, value: float, stderr: float, bound: float, cmp: str) -> "StatRow":
        if cmp == "two-sided":
            ok = abs(value - bound) <= 3.0 * stderr
        elif cmp == "upper":
            ok = value <= bound + 3.0 * stderr
        elif cmp == "lower":
            ok = value >= bound - 3.0 * stderr
        else:
            raise ValueError(f"unknown comparison {cmp!r}")
        return StatRow(label, float(value), float(stderr), float(bound), cmp, bool(ok))

    @staticmethod
    def info(label: str, value: float, stderr: float = 0.0) -> "StatRow":
        return StatRow(label, float(value), float(stderr))


@dataclass
class ReportRecord:
    """Config echo, statistic rows, aggregate verdict and wall time."""

    config: ExperimentConfig
    statistics: list[StatRow]
    wall_time_s: float = 0.0

    @property
    def passed(self) -> bool | None:
        """True/False over the bounded rows; None if every row is informational."""
        verdicts = [r.passed for r in self.statistics if r.bound is not None]
        if not verdicts:
            return None
        return all(verdicts)

    def verdict_label(self) -> str:
        p = self.passed
        return "informational" if p is None else ("pass" if p else "fail")


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _pass_label(p: bool | None) -> str:
    return "" if p is None else ("pass" if p else "fail")


def render_csv(records: list[ReportRecord]) -> str:
    lines = [CSV_HEADER]
    for rec in records:
        c = rec.config
        for row in rec.statistics:
            lines.append(
                f"{c.name},{c.n},{c.trials},{c.seed},{row.label},"
                f"{_fmt(row.value)},{_fmt(row.stderr)},{_fmt(row.bound)},{_pass_label(row.passed)}"
            )
    return "\n".join(lines) + "\n"


def _record_obj(rec: ReportRecord) -> dict:
    c = rec.config
    return {
        "experiment": c.name,
        "n": c.n,
        "trials": c.trials,
        "seed": c.seed,
        "params": {k: c.params[k] for k in sorted(c.params)},
        "statistics": [
            {
                "label": r.label,
                "value": float(r.value),
                "stderr": float(r.stderr),
                "bound": None if r.bound is None else float(r.bound),
                "cmp": r.cmp,
                "pass": _pass_label(r.passed) or None,
            }
            for r in rec.statistics
        ],
        "pass": rec.verdict_label(),
    }


def render_json(records: list[ReportRecord]) -> str:
    objs = [_record_obj(r) for r in records]
    payload = objs[0] if len(objs) == 1 else objs
    return json.dumps(payload, indent=2) + "\n"


def write_report(records, fmt: str, path) -> None:
    """Serialize one record or a list of records to ``path``.

    CSV rows and JSON fields appear in a stable order and floats are
    serialized via ``repr``, so identical configs give identical bytes.
    """
    if isinstance(records, ReportRecord):
        records = [records]
    if fmt == "csv":
        text = render_csv(records)
    elif fmt == "json":
        text = render_json(records)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def roundtrip_json(text: str) -> list[dict]:
    """Parse a JSON report back into record dictionaries."""
    payload = json.loads(text)
    return payload if isinstance(payload, list) else [payload]
