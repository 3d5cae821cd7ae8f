import csv
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aqe import families
from aqe.errors import EmptyFamilyError, MissingFieldError, SchemaVersionError
from aqe.families import FamilyRecord


def _rec(t, d=None, name=None):
    return FamilyRecord(name or f"t{t:.2f}", t, 0.25 + t * t, d)


records = st.lists(st.builds(_rec, st.floats(1.0, 200.0), st.floats(0.0, 2.0)), max_size=30)


def test_from_form(odd_form):
    r = FamilyRecord.from_form(odd_form, 0.3)
    assert abs(r.conductor_product - (0.25 + odd_form.t ** 2)) < 1e-12
    assert r.form_id == odd_form.form_id


def test_record_validation():
    with pytest.raises(ValueError):
        _rec(3.0, 2.5)


def test_select_examples(odd_form):
    recs = [FamilyRecord.from_form(odd_form, 0.1), _rec(13.78, 0.1), _rec(20.0, 0.1)]
    fam = families.select_family(recs, 90)
    assert [r.form_id for r in fam] == [odd_form.form_id]
    assert abs(fam[0].conductor_product - 91.14) < 0.01
    assert families.select_family(recs, 1e6) == []
    assert families.select_family(fam, 90) == fam
    with pytest.raises(ValueError):
        families.select_family(recs, 0.5)


@given(records, st.floats(1.0, 1e4))
def test_select_idempotent_and_disjoint(recs, Q):
    fam = families.select_family(recs, Q)
    assert families.select_family(fam, Q) == fam
    far = families.select_family(recs, 4 * Q)
    assert not {id(r) for r in fam} & {id(r) for r in far}


def test_exception_count_examples():
    fam = [_rec(9.53, 0.4), _rec(12.17, 1.0), _rec(13.78, 2.0)]
    # negative epsilon of size 10^12 makes the threshold lambda > 2
    assert families.exception_count(fam, -1e12) == 0
    # epsilon -> 0+: threshold -> 1, only discrepancies >= 1 count
    assert families.exception_count(fam, 1e-300) == 2
    assert families.exception_count(fam, 1e12) == 3
    with pytest.raises(MissingFieldError):
        families.exception_count([_rec(9.53)], 0.1)


@given(records, st.floats(-1e13, 1e13), st.floats(-1e13, 1e13))
def test_exception_count_monotone_in_threshold(recs, e1, e2):
    # larger epsilon gives a smaller threshold and so at least as many exceptions
    lo, hi = sorted((e1, e2))
    assert families.exception_count(recs, lo) <= families.exception_count(recs, hi)


def test_chebyshev_tail_examples():
    fam = [_rec(9.53, 0.4), _rec(12.17, 1.0), _rec(13.78, 0.0)]
    assert families.chebyshev_tail(fam, 0.0) == pytest.approx(1 / 3)
    assert families.chebyshev_tail(fam, 50.0) == pytest.approx(2 / 3)
    with pytest.raises(EmptyFamilyError):
        families.chebyshev_tail([], 1.0)


@given(records.filter(bool), st.floats(0.0, 10.0))
def test_chebyshev_tail_is_fraction(recs, alpha):
    assert 0.0 <= families.chebyshev_tail(recs, alpha) <= 1.0


def test_persist_round_trip(tmp_path):
    recs = [FamilyRecord("t9.53", 9.53, 0.25 + 9.53 ** 2, 0.51, {"L(1/2)": 0.25}, {"eps=0.1": True})]
    path = tmp_path / "families.json"
    families.persist(recs, path, scan_policy="abc")
    assert families.load(path) == recs
    assert json.loads(path.read_text())["schema"] == "aqe-fam-1"
    families.persist([], path)
    assert families.load(path) == []


def test_load_rejects_unknown_schema(tmp_path):
    path = tmp_path / "families.json"
    path.write_text(json.dumps({"schema": "aqe-fam-0", "records": []}))
    with pytest.raises(SchemaVersionError):
        families.load(path)


def test_scan_policy_hash_stable():
    a = families.scan_policy_hash({"radii": [0.1, 0.25], "grid": [10, 5]})
    b = families.scan_policy_hash({"grid": [10, 5], "radii": [0.1, 0.25]})
    assert a == b and len(a) == 16


def test_report_csv(tmp_path):
    fam = [_rec(9.53, 0.4), _rec(12.17)]
    rows = families.report_rows(fam, 1e-3)
    path = tmp_path / "report.csv"
    families.write_report(rows, path)
    out = list(csv.reader(path.open()))
    assert tuple(out[0]) == families.REPORT_COLUMNS
    assert out[1][-1] == "False" and out[2][3] == "" and out[2][-1] == ""
