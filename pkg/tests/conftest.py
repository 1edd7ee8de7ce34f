import datetime as dt

import pytest

from pemsignal.ingest import Cohort, Member
from pemsignal.readcode import Readcode

ACCEPTANCE_LINES = []

DAY0 = dt.date(2012, 6, 1)


def day(n):
    return DAY0 + dt.timedelta(days=n)


def make_cohort(spec, drug="D1"):
    """spec: {pid: (prescription day offsets, [(day offset, code), ...])}"""
    members = []
    for pid in sorted(spec):
        rx, events = spec[pid]
        members.append(Member(pid, tuple(day(d) for d in sorted(rx)),
                              tuple(sorted((day(d), Readcode(c)) for d, c in events))))
    return Cohort(drug, tuple(members))


def write_csvs(root, patients, therapy, medical):
    """Write the three input tables from row lists; returns their paths."""
    paths = []
    for name, header, rows in (
            ("patients.csv", "patient_id,registration_date", patients),
            ("therapy.csv", "patient_id,drug_code,prescription_date", therapy),
            ("medical.csv", "patient_id,readcode,event_date", medical)):
        path = root / name
        path.write_text(header + "\n" + "".join(",".join(r) + "\n" for r in rows),
                        encoding="utf-8")
        paths.append(path)
    return paths


@pytest.fixture
def acceptance():
    def record(criterion, passed, detail=""):
        ACCEPTANCE_LINES.append(f"{criterion} {'PASS' if passed else 'FAIL'} {detail}".rstrip())
        assert passed, f"{criterion}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
