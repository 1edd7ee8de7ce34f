"""Adverse drug reaction signal detection from prescription event data.

Typical use::

    from pemsignal import load_cohort, build_matrices, detect

    cohort = load_cohort("patients.csv", "therapy.csv", "medical.csv", "D1")
    m = build_matrices(cohort, level=5)
    table = detect(m.x, m.y, m.a, m.b, method="ttest")
"""
from .ingest import Cohort, Member, load_cohort
from .matrix import (FeatureMatrix, GroupedMatrix, TailPolicy, WindowAssignment,
                     assign_windows, build_feature_matrices, group_patients, merge_to_level3)
from .pipeline import build_matrices, run_detection
from .readcode import Readcode, code_level, parse_readcode, truncate_to_level3
from .signal import (Method, ReferenceAdrSet, SignalRow, SignalTable, detect,
                     evaluate_topk, load_reference, read_table, to_json, to_tsv)
from .stats import (RatioPair, TestResult, rank_sum, ratios,
                    regularized_incomplete_beta, welch_t)
from .synthgen import SynthConfig, choose_planted, generate

__version__ = "0.1.0"
