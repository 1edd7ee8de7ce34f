"""Load patient, therapy and medical CSV tables and assemble a drug cohort."""
from __future__ import annotations

import csv
import datetime as dt
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

from .errors import FileError, SchemaError
from .readcode import Readcode, parse_readcode

PATIENT_HEADER = ("patient_id", "registration_date")
THERAPY_HEADER = ("patient_id", "drug_code", "prescription_date")
MEDICAL_HEADER = ("patient_id", "readcode", "event_date")

DEFAULT_MIN_REGISTRATION_DAYS = 365


@dataclass(frozen=True)
class PatientRecord:
    patient_id: str
    registration_date: dt.date


@dataclass(frozen=True)
class Prescription:
    patient_id: str
    drug_code: str
    date: dt.date


@dataclass(frozen=True)
class MedicalEventRecord:
    patient_id: str
    code: Readcode
    date: dt.date


@dataclass(frozen=True)
class Member:
    """One cohort patient: the drug's prescription dates and all dated events."""
    patient_id: str
    prescriptions: tuple[dt.date, ...]
    events: tuple[tuple[dt.date, Readcode], ...]


@dataclass(frozen=True)
class Cohort:
    drug_code: str
    members: tuple[Member, ...]

    @property
    def population_size(self) -> int:
        return len(self.members)

    N = population_size

    def __len__(self):
        return len(self.members)

    @property
    def patient_ids(self) -> tuple[str, ...]:
        return tuple(m.patient_id for m in self.members)


def parse_date(text: str) -> dt.date:
    """Strict ``YYYY-MM-DD`` parsing."""
    text = text.strip()
    if len(text) != 10 or text[4] != "-" or text[7] != "-" \
            or not (text[:4] + text[5:7] + text[8:]).isdigit():
        raise ValueError(f"date {text!r} is not YYYY-MM-DD")
    return dt.date.fromisoformat(text)


def _read_table(path, header):
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise FileError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaError("missing header row", path, 1)
    got = tuple(h.strip() for h in rows[0])
    if got != header:
        raise SchemaError(f"bad header {','.join(got)!r}, expected {','.join(header)!r}", path, 1)
    for rowno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise SchemaError(f"expected {len(header)} fields, got {len(row)}", path, rowno)
        yield rowno, [field.strip() for field in row]


def _row_date(text, path, rowno):
    try:
        return parse_date(text)
    except ValueError as exc:
        raise SchemaError(f"unparseable date {text!r}", path, rowno) from exc


def _row_pid(text, path, rowno):
    if not text:
        raise SchemaError("empty patient_id", path, rowno)
    return text


def read_patients(path) -> dict[str, PatientRecord]:
    patients = {}
    for rowno, (pid, reg) in _read_table(path, PATIENT_HEADER):
        pid = _row_pid(pid, path, rowno)
        if pid in patients:
            raise SchemaError(f"duplicate patient_id {pid!r}", path, rowno)
        patients[pid] = PatientRecord(pid, _row_date(reg, path, rowno))
    return patients


def read_therapy(path, patients=None) -> list[Prescription]:
    out = []
    for rowno, (pid, drug, date) in _read_table(path, THERAPY_HEADER):
        pid = _row_pid(pid, path, rowno)
        if not drug:
            raise SchemaError("empty drug_code", path, rowno)
        if patients is not None and pid not in patients:
            raise SchemaError(f"patient_id {pid!r} not in patient table", path, rowno)
        out.append(Prescription(pid, drug, _row_date(date, path, rowno)))
    return out


def read_medical(path, patients=None) -> list[MedicalEventRecord]:
    out = []
    seen = {}
    for rowno, (pid, code, date) in _read_table(path, MEDICAL_HEADER):
        pid = _row_pid(pid, path, rowno)
        if patients is not None and pid not in patients:
            raise SchemaError(f"patient_id {pid!r} not in patient table", path, rowno)
        if code in seen:
            code = seen[code]
        else:
            try:
                code = seen[code] = parse_readcode(code)
            except ValueError as exc:
                raise SchemaError(str(exc), path, rowno) from exc
        out.append(MedicalEventRecord(pid, code, _row_date(date, path, rowno)))
    return out


def load_cohort(patients_path, therapy_path, medical_path, drug_code: str,
                min_registration_days: int = DEFAULT_MIN_REGISTRATION_DAYS) -> Cohort:
    """Build the cohort of ``drug_code`` users from the three CSV tables.

    A patient is included when they have at least one prescription of
    ``drug_code`` and were registered at least ``min_registration_days``
    before their first such prescription. Members are ordered by patient_id.
    An empty cohort is returned as ``N == 0`` rather than raised.
    """
    if min_registration_days < 0:
        raise ValueError("min_registration_days must be >= 0")
    patients = read_patients(patients_path)
    therapy = read_therapy(therapy_path, patients)
    medical = read_medical(medical_path, patients)

    scripts = defaultdict(list)
    for rx in therapy:
        if rx.drug_code == drug_code:
            scripts[rx.patient_id].append(rx.date)

    keep = []
    for pid, dates in scripts.items():
        dates.sort()
        if (dates[0] - patients[pid].registration_date).days >= min_registration_days:
            keep.append(pid)
    keep.sort()
    wanted = set(keep)

    events = defaultdict(list)
    for ev in medical:
        if ev.patient_id in wanted:
            events[ev.patient_id].append((ev.date, ev.code))

    members = tuple(
        Member(pid, tuple(scripts[pid]),
               tuple(sorted(events.get(pid, ()), key=lambda e: (e[0], e[1]))))
        for pid in keep
    )
    return Cohort(drug_code, members)
