"""
Reports
Collects published verdicts and writes JSON documents or CSV rows
"""

import csv
import json
import math
import sys
from typing import Any, Dict, Iterable, List, Optional, TextIO

from src.core.events import EventType, subscribe, unsubscribe
from src.core.results import CheckStatus, VerificationResult


class ResultCollector:
    """
    Listens for CHECK_COMPLETED while active and keeps every verdict

    Usage:
        with ResultCollector() as collector:
            run_checks()
        collector.failed
    """

    def __init__(self):
        self.results: List[VerificationResult] = []

    def _on_check(self, event):
        self.results.append(event.data['result'])

    def __enter__(self) -> 'ResultCollector':
        subscribe(EventType.CHECK_COMPLETED, self._on_check)
        return self

    def __exit__(self, *exc):
        unsubscribe(EventType.CHECK_COMPLETED, self._on_check)
        return False

    @property
    def failed(self) -> List[VerificationResult]:
        return [r for r in self.results if r.status is CheckStatus.FAIL]

    @property
    def inconclusive(self) -> List[VerificationResult]:
        return [r for r in self.results if r.status is CheckStatus.INCONCLUSIVE]

    def summary(self) -> Dict[str, int]:
        return {
            'checks': len(self.results),
            'failed': len(self.failed),
            'inconclusive': len(self.inconclusive),
        }


def _clean(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if hasattr(value, 'tolist'):
        return _clean(value.tolist())
    return value


def result_rows(results: Iterable[VerificationResult]) -> List[Dict[str, Any]]:
    return [{'name': r.name, 'lhs': r.lhs, 'rhs': r.rhs, 'slack': r.slack,
             'tolerance': r.tolerance, 'status': r.status.value} for r in results]


def write_json(document: Dict[str, Any], stream: Optional[TextIO] = None):
    stream = stream or sys.stdout
    json.dump(_clean(document), stream, indent=2, sort_keys=False)
    stream.write("\n")


def write_csv(rows: List[Dict[str, Any]], stream: Optional[TextIO] = None):
    """One line per row; columns are the union of keys in first-seen order"""
    stream = stream or sys.stdout
    columns: List[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    writer = csv.DictWriter(stream, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _clean(v) for k, v in row.items()})


def write_report(document: Dict[str, Any], rows: List[Dict[str, Any]], fmt: str = "json",
                 stream: Optional[TextIO] = None):
    """JSON prints the whole document, CSV only its rows"""
    if fmt == "csv":
        write_csv(rows, stream)
    else:
        write_json(document, stream)
