import datetime as dt

import pytest

from pemsignal.errors import FileError, SchemaError
from pemsignal.ingest import load_cohort, parse_date
from tests.conftest import write_csvs

PATIENTS_5 = [
    ("P05", "2009-01-01"), ("P01", "2008-03-15"), ("P03", "2010-06-01"),
    ("P02", "2004-01-01"), ("P04", "2010-01-01"),
]
THERAPY_5 = [
    ("P01", "D1", "2010-02-01"), ("P01", "D2", "2009-01-01"), ("P02", "D2", "2010-05-05"),
    ("P03", "D1", "2010-12-01"), ("P03", "D1", "2010-09-01"), ("P04", "D1", "2011-01-01"),
    ("P05", "D2", "2010-01-01"), ("P05", "D1", "2010-01-02"), ("P01", "D1", "2010-01-20"),
]
MEDICAL_5 = [
    ("P01", "N245.16", "2010-01-25"), ("P02", "C10F.00", "2010-06-01"),
    ("P03", "1A55.00", "2010-09-10"), ("P01", "1Z12.00", "2009-12-31"),
    ("P04", "J046.00", "2011-01-05"), ("P05", "N245.17", "2010-01-03"),
]


def test_empty_tables_give_empty_cohort(tmp_path):
    paths = write_csvs(tmp_path, [], [], [])
    cohort = load_cohort(*paths, "X", 365)
    assert cohort.population_size == 0
    assert cohort.members == ()


def test_registration_filter_three_patients(tmp_path):
    paths = write_csvs(
        tmp_path,
        [("A", "2009-01-01"), ("B", "2009-09-23"), ("C", "2008-06-30")],
        [("A", "D1", "2010-01-01"), ("B", "D1", "2010-01-01"), ("C", "D1", "2010-01-01")],
        [])
    # B registered 100 days before first prescription
    assert (dt.date(2010, 1, 1) - dt.date(2009, 9, 23)).days == 100
    cohort = load_cohort(*paths, "D1", 365)
    assert cohort.population_size == 2
    assert cohort.patient_ids == ("A", "C")


def test_filter_boundary_is_inclusive(tmp_path):
    paths = write_csvs(tmp_path, [("A", "2009-01-01")], [("A", "D1", "2010-01-01")], [])
    assert load_cohort(*paths, "D1", 365).population_size == 1
    assert load_cohort(*paths, "D1", 366).population_size == 0


def _oracle_members(drug, min_days):
    reg = {pid: dt.date.fromisoformat(d) for pid, d in PATIENTS_5}
    firsts = {}
    for pid, code, d in THERAPY_5:
        if code == drug:
            d = dt.date.fromisoformat(d)
            firsts[pid] = min(firsts.get(pid, d), d)
    return sorted(pid for pid, first in firsts.items() if (first - reg[pid]).days >= min_days)


@pytest.mark.parametrize("drug", ["D1", "D2"])
@pytest.mark.parametrize("min_days", [0, 30, 365, 500, 2000])
def test_membership_matches_row_filter_oracle(tmp_path, drug, min_days):
    paths = write_csvs(tmp_path, PATIENTS_5, THERAPY_5, MEDICAL_5)
    cohort = load_cohort(*paths, drug, min_days)
    assert list(cohort.patient_ids) == _oracle_members(drug, min_days)


def test_member_contents_sorted_and_linked(tmp_path):
    paths = write_csvs(tmp_path, PATIENTS_5, THERAPY_5, MEDICAL_5)
    cohort = load_cohort(*paths, "D1", 0)
    by_id = {m.patient_id: m for m in cohort.members}
    p01 = by_id["P01"]
    assert p01.prescriptions == (dt.date(2010, 1, 20), dt.date(2010, 2, 1))
    assert [c for _, c in p01.events] == ["1Z12.00", "N245.16"]
    assert by_id["P03"].prescriptions == (dt.date(2010, 9, 1), dt.date(2010, 12, 1))
    expected = {pid: sorted((dt.date.fromisoformat(d), c) for p, c, d in MEDICAL_5 if p == pid)
                for pid in by_id}
    for member in cohort.members:
        assert list(member.events) == expected[member.patient_id]
        assert list(member.prescriptions) == sorted(member.prescriptions)


def test_filter_monotone_in_threshold(tmp_path):
    paths = write_csvs(tmp_path, PATIENTS_5, THERAPY_5, MEDICAL_5)
    previous = None
    for min_days in (3000, 1000, 400, 365, 100, 0):
        ids = set(load_cohort(*paths, "D1", min_days).patient_ids)
        if previous is not None:
            assert previous <= ids
        previous = ids


def test_deterministic(tmp_path):
    paths = write_csvs(tmp_path, PATIENTS_5, THERAPY_5, MEDICAL_5)
    assert load_cohort(*paths, "D1", 0) == load_cohort(*paths, "D1", 0)


def test_duplicate_rows_kept(tmp_path):
    paths = write_csvs(tmp_path, [("A", "2000-01-01")],
                       [("A", "D1", "2010-01-01"), ("A", "D1", "2010-01-01")],
                       [("A", "N245.16", "2010-01-02")] * 2)
    member = load_cohort(*paths, "D1").members[0]
    assert len(member.prescriptions) == 2 and len(member.events) == 2


def test_missing_file(tmp_path):
    paths = write_csvs(tmp_path, [], [], [])
    with pytest.raises(FileError):
        load_cohort(tmp_path / "nope.csv", paths[1], paths[2], "D1")


@pytest.mark.parametrize("table,rows,match", [
    (0, [("A", "2010-13-01")], "row 2"),
    (0, [("", "2010-01-01")], "empty patient_id"),
    (0, [("A", "2010-01-01"), ("A", "2010-01-02")], "duplicate"),
    (0, [("A", "01/02/2010")], "unparseable date"),
    (1, [("ZZ", "D1", "2010-01-01")], "not in patient table"),
    (1, [("A", "", "2010-01-01")], "empty drug_code"),
    (2, [("A", "N2.4.00", "2010-01-01")], "non-trailing"),
    (2, [("A", "N245.16", "2010-1-01")], "unparseable date"),
])
def test_schema_errors_carry_row(tmp_path, table, rows, match):
    tables = [[("A", "2000-01-01")], [("A", "D1", "2010-01-01")], []]
    tables[table] = rows
    paths = write_csvs(tmp_path, *tables)
    with pytest.raises(SchemaError, match=match) as info:
        load_cohort(*paths, "D1")
    assert info.value.row is not None


def test_bad_header(tmp_path):
    paths = write_csvs(tmp_path, [], [], [])
    paths[0].write_text("id,registration_date\n")
    with pytest.raises(SchemaError, match="bad header"):
        load_cohort(*paths, "D1")


@pytest.mark.parametrize("text", ["2010-1-01", "20100101", "2010-01-01T00:00", " 2010/01/01"])
def test_parse_date_strict(text):
    with pytest.raises(ValueError):
        parse_date(text)
