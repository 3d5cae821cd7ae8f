"""Family bookkeeping: selection by conductor, exception counts, persistence.

Discrepancies stored here are lower bounds taken over a fixed ball family, so
every count is "with respect to the scan family" named by ``scan_policy``.
"""

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import EmptyFamilyError, MissingFieldError, SchemaVersionError

SCHEMA_VERSION = "aqe-fam-1"
THRESHOLD_SCALE = 1e12
REPORT_COLUMNS = ("form_id", "t", "lambda", "D_lower", "threshold", "exceeded")


@dataclass(frozen=True)
class FamilyRecord:
    form_id: str
    t: float
    conductor_product: float
    discrepancy_lower_bound: float | None = None
    l_values: dict = field(default_factory=dict)
    thresholds_evaluated: dict = field(default_factory=dict)

    def __post_init__(self):
        d = self.discrepancy_lower_bound
        if d is not None and not 0.0 <= d <= 2.0:
            raise ValueError("discrepancy lower bound must lie in [0, 2]")

    @classmethod
    def from_form(cls, form, discrepancy=None, l_values=None):
        """Level-1 record: conductor product lambda = 1/4 + t^2."""
        return cls(form.form_id, float(form.t), 0.25 + form.t ** 2, discrepancy, dict(l_values or {}))


def select_family(records, Q):
    """Records with lambda q in [Q, 2Q]."""
    if Q < 1:
        raise ValueError("Q must be at least 1")
    return [r for r in records if Q <= r.conductor_product <= 2.0 * Q]


def _require(records):
    for r in records:
        if r.discrepancy_lower_bound is None:
            raise MissingFieldError(f"record {r.form_id} carries no discrepancy value")


def qe_threshold(record, epsilon):
    """(lambda q)^{-epsilon / 10^12}."""
    return record.conductor_product ** (-epsilon / THRESHOLD_SCALE)


def exception_count(family, epsilon):
    """Records whose discrepancy lower bound meets the threshold."""
    _require(family)
    return sum(1 for r in family if r.discrepancy_lower_bound >= qe_threshold(r, epsilon))


def chebyshev_tail(family, alpha):
    """Fraction of records with discrepancy lower bound >= lambda^{-alpha}."""
    if not family:
        raise EmptyFamilyError("empty family")
    _require(family)
    hits = sum(1 for r in family if r.discrepancy_lower_bound >= r.conductor_product ** (-alpha))
    return hits / len(family)


def scan_policy_hash(policy):
    """Short hash naming the ball family used for the discrepancy values."""
    blob = json.dumps(policy, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def persist(records, path, scan_policy=None):
    payload = {"schema": SCHEMA_VERSION, "scan_policy": scan_policy,
               "records": [asdict(r) for r in records]}
    Path(path).write_text(json.dumps(payload, indent=1))


def load(path):
    payload = json.loads(Path(path).read_text())
    if payload.get("schema") != SCHEMA_VERSION:
        raise SchemaVersionError(f"unknown schema {payload.get('schema')!r}")
    return [FamilyRecord(**r) for r in payload["records"]]


def report_rows(family, epsilon):
    rows = []
    for r in family:
        thr = qe_threshold(r, epsilon)
        d = r.discrepancy_lower_bound
        rows.append((r.form_id, r.t, r.conductor_product, d, thr,
                     None if d is None else bool(d >= thr)))
    return rows


def write_report(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(REPORT_COLUMNS)
        for row in rows:
            w.writerow(["" if v is None else (f"{v:.15g}" if isinstance(v, float) else v) for v in row])
