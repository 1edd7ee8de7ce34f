"""End-to-end detection: CSV tables in, ranked signal table out."""
from __future__ import annotations

from dataclasses import dataclass

from .ingest import DEFAULT_MIN_REGISTRATION_DAYS, Cohort, load_cohort
from .matrix import (DEFAULT_GROUP_SIZE, DEFAULT_WINDOW_DAYS, FeatureMatrix, GroupedMatrix,
                     TailPolicy, build_feature_matrices, group_patients, merge_to_level3)
from .signal import Method, SignalTable, detect

LEVELS = (3, 5)


@dataclass
class Matrices:
    a: FeatureMatrix
    b: FeatureMatrix
    x: GroupedMatrix
    y: GroupedMatrix


def build_matrices(cohort: Cohort, level=5, window_days=DEFAULT_WINDOW_DAYS,
                   group_size=DEFAULT_GROUP_SIZE, tail_policy=TailPolicy.BASELINE) -> Matrices:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    a, b = build_feature_matrices(cohort, window_days, tail_policy)
    if level == 3:
        # merge precedes grouping
        a, b = merge_to_level3(a), merge_to_level3(b)
    x, y = group_patients(a, b, group_size)
    return Matrices(a, b, x, y)


def run_detection(patients_path, therapy_path, medical_path, drug_code, *, level=5,
                  window_days=DEFAULT_WINDOW_DAYS, group_size=DEFAULT_GROUP_SIZE,
                  method=Method.TTEST, alpha=0.05, top_k=20,
                  tail_policy=TailPolicy.BASELINE,
                  min_registration_days=DEFAULT_MIN_REGISTRATION_DAYS,
                  descriptions=None) -> SignalTable:
    cohort = load_cohort(patients_path, therapy_path, medical_path, drug_code,
                         min_registration_days)
    mats = build_matrices(cohort, level, window_days, group_size, tail_policy)
    method = Method(method)
    metadata = {"drug": drug_code, "level": level, "method": method.value,
                "window_days": window_days, "group_size": group_size,
                "N": cohort.population_size, "g": mats.x.n_groups, "alpha": alpha}
    return detect(mats.x, mats.y, mats.a, mats.b, method, alpha, top_k,
                  descriptions=descriptions, metadata=metadata)
