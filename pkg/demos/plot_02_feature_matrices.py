"""
Feature matrices and patient groups
===================================

Build the binary before (A) and after (B) matrices for a synthetic cohort,
then sum them over groups of 100 patients to get X and Y.
"""

import tempfile
from pathlib import Path

from pemsignal import SynthConfig, build_feature_matrices, group_patients, load_cohort
from pemsignal.synthgen import generate

out = Path(tempfile.mkdtemp())
generate(SynthConfig(n_patients=1000, n_codes=60, seed=1), out)
cohort = load_cohort(out / "patients.csv", out / "therapy.csv", out / "medical.csv", "D1")
print("cohort size N =", cohort.population_size)

a, b = build_feature_matrices(cohort, window_days=60)
print("A and B:", a.shape, "nonzeros", a.data.nnz, b.data.nnz)

##############################################################################
# Grouping drops the trailing ``N mod 100`` patients.

x, y = group_patients(a, b, group_size=100)
print("X and Y:", x.shape)
print("first column of X:", x.counts[:, 0])
print("first column of Y:", y.counts[:, 0])

##############################################################################
# N_B and N_A come from the full matrices, not just the grouped rows.

print("N_B, N_A for", a.codes[0], "=", a.column_sums()[0], b.column_sums()[0])
