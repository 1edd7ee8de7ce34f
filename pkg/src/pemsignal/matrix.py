"""Before/after exposure feature matrices.

Every medical event of a cohort member is classified relative to the
member's prescription dates ``p_1 <= ... <= p_M`` and a window ``W``:

* ``e < p_1 - W``                    -> discarded
* ``p_1 - W <= e < p_1``             -> baseline
* ``p_l <= e < p_l + W`` (latest l)  -> exposed
* otherwise between prescriptions    -> baseline
* ``e >= p_M + W``                   -> baseline, or discarded with
  ``TailPolicy.DISCARD``

Intervals are half open, so an event on a prescription date is exposed.
The baseline matrix A and exposed matrix B are binary patients x codes
matrices; X and Y sum them over consecutive blocks of ``d`` patients.
"""
from __future__ import annotations

import bisect
import csv
import datetime as dt
import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import EmptyCohort, EmptyPrescriptionList, TooFewPatients
from .readcode import Readcode, truncate_to_level3

DEFAULT_WINDOW_DAYS = 60
DEFAULT_GROUP_SIZE = 100


class WindowAssignment(enum.Enum):
    BASELINE = "baseline"
    EXPOSED = "exposed"
    DISCARDED = "discarded"


class TailPolicy(enum.Enum):
    BASELINE = "baseline"
    DISCARD = "discard"


class MatrixKind(enum.Enum):
    BEFORE = "A"
    AFTER = "B"


def _day(value) -> int:
    if isinstance(value, dt.date):
        return value.toordinal()
    return int(value)


def assign_windows(prescriptions, events, window_days=DEFAULT_WINDOW_DAYS,
                   tail_policy=TailPolicy.BASELINE):
    """Classify each event as baseline, exposed or discarded.

    ``prescriptions`` is a sorted sequence of dates (``datetime.date`` or
    integer day numbers). ``events`` is a sequence of ``(date, code)`` pairs.
    Returns a list of ``(event, WindowAssignment)`` in input order.
    """
    days = [_day(p) for p in prescriptions]
    if not days:
        raise EmptyPrescriptionList("at least one prescription is required")
    if any(a > b for a, b in zip(days, days[1:])):
        raise ValueError("prescriptions must be sorted ascending")
    if window_days <= 0:
        raise ValueError("window_days must be positive")
    tail_policy = TailPolicy(tail_policy)
    first, last = days[0], days[-1]

    out = []
    for event in events:
        e = _day(event[0])
        if e < first - window_days:
            label = WindowAssignment.DISCARDED
        elif e < first:
            label = WindowAssignment.BASELINE
        else:
            latest = days[bisect.bisect_right(days, e) - 1]
            if e < latest + window_days:
                label = WindowAssignment.EXPOSED
            elif e >= last + window_days and tail_policy is TailPolicy.DISCARD:
                label = WindowAssignment.DISCARDED
            else:
                label = WindowAssignment.BASELINE
        out.append((event, label))
    return out


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Binary patients x codes matrix stored as CSR (uint8)."""
    kind: MatrixKind
    patient_ids: tuple[str, ...]
    codes: tuple[Readcode, ...]
    data: sp.csr_matrix

    @property
    def shape(self):
        return self.data.shape

    def toarray(self) -> np.ndarray:
        return self.data.toarray()

    def column_sums(self) -> np.ndarray:
        return np.asarray(self.data.sum(axis=0), dtype=np.int64).ravel()

    def column(self, code) -> np.ndarray:
        j = self.codes.index(code)
        return self.data[:, j].toarray().ravel()


@dataclass(frozen=True, eq=False)
class GroupedMatrix:
    """Group x code counts; row k sums patients ``k*d .. k*d + d - 1``."""
    kind: str
    codes: tuple[Readcode, ...]
    counts: np.ndarray
    group_size: int

    @property
    def n_groups(self) -> int:
        return self.counts.shape[0]

    @property
    def shape(self):
        return self.counts.shape


def build_feature_matrices(cohort, window_days=DEFAULT_WINDOW_DAYS,
                           tail_policy=TailPolicy.BASELINE):
    """Return the (A, B) feature matrices of a cohort.

    Columns are all codes with at least one baseline or exposed occurrence,
    sorted by code text; rows follow cohort member order.
    """
    if cohort.population_size == 0:
        raise EmptyCohort(f"cohort for drug {cohort.drug_code!r} has no members")
    hits = {WindowAssignment.BASELINE: set(), WindowAssignment.EXPOSED: set()}
    for i, member in enumerate(cohort.members):
        for (_, code), label in assign_windows(member.prescriptions, member.events,
                                               window_days, tail_policy):
            if label is not WindowAssignment.DISCARDED:
                hits[label].add((i, code))

    codes = tuple(sorted({c for pairs in hits.values() for _, c in pairs}))
    index = {c: j for j, c in enumerate(codes)}
    shape = (cohort.population_size, len(codes))

    def to_csr(pairs):
        pairs = sorted(pairs)
        rows = np.fromiter((i for i, _ in pairs), dtype=np.int64, count=len(pairs))
        cols = np.fromiter((index[c] for _, c in pairs), dtype=np.int64, count=len(pairs))
        vals = np.ones(len(pairs), dtype=np.uint8)
        return sp.csr_matrix((vals, (rows, cols)), shape=shape)

    pids = cohort.patient_ids
    a = FeatureMatrix(MatrixKind.BEFORE, pids, codes, to_csr(hits[WindowAssignment.BASELINE]))
    b = FeatureMatrix(MatrixKind.AFTER, pids, codes, to_csr(hits[WindowAssignment.EXPOSED]))
    return a, b


def merge_to_level3(matrix: FeatureMatrix) -> FeatureMatrix:
    """OR together columns that share a level-3 ancestor."""
    parents = [truncate_to_level3(c) for c in matrix.codes]
    merged_codes = tuple(sorted(set(parents)))
    index = {c: k for k, c in enumerate(merged_codes)}
    n = len(matrix.codes)
    projector = sp.csr_matrix(
        (np.ones(n, dtype=np.int64), (np.arange(n), [index[p] for p in parents])),
        shape=(n, len(merged_codes)))
    summed = matrix.data.astype(np.int64) @ projector
    merged = (summed > 0).astype(np.uint8)
    return FeatureMatrix(matrix.kind, matrix.patient_ids, merged_codes, sp.csr_matrix(merged))


def _check_aligned(a, b):
    if a.patient_ids != b.patient_ids or a.codes != b.codes:
        raise ValueError("A and B must share row and column maps")


def group_patients(a: FeatureMatrix, b: FeatureMatrix, group_size=DEFAULT_GROUP_SIZE):
    """Sum A and B over consecutive blocks of ``group_size`` patients.

    The trailing ``m % group_size`` patients are dropped.
    """
    _check_aligned(a, b)
    if group_size < 1:
        raise ValueError("group_size must be >= 1")
    m = a.shape[0]
    g = m // group_size
    if g == 0:
        raise TooFewPatients(f"{m} patients cannot form a group of {group_size}")
    used = g * group_size
    groups = sp.csr_matrix(
        (np.ones(used, dtype=np.int64), (np.repeat(np.arange(g), group_size), np.arange(used))),
        shape=(g, m))
    x = np.asarray((groups @ a.data.astype(np.int64)).todense())
    y = np.asarray((groups @ b.data.astype(np.int64)).todense())
    return (GroupedMatrix("X", a.codes, x, group_size),
            GroupedMatrix("Y", b.codes, y, group_size))


def write_triplets(a: FeatureMatrix, b: FeatureMatrix, path) -> None:
    """Debug dump of the non-zero cells of A and B as ``patient_id,readcode,matrix``."""
    _check_aligned(a, b)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["patient_id", "readcode", "matrix"])
        for fm in (a, b):
            coo = fm.data.tocoo()
            for i, j in sorted(zip(coo.row.tolist(), coo.col.tolist())):
                writer.writerow([fm.patient_ids[i], fm.codes[j], fm.kind.value])
