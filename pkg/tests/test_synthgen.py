import datetime as dt
import hashlib

import numpy as np
import pytest

from pemsignal.errors import InvalidConfig
from pemsignal.ingest import load_cohort, read_medical, read_patients, read_therapy
from pemsignal.synthgen import (SplitMix64, SynthConfig, choose_planted, code_universe,
                                config_from_mapping, generate, load_config)

SMALL = dict(n_patients=300, n_codes=40)


def digest(out):
    return {name: hashlib.sha256((out / name).read_bytes()).hexdigest()
            for name in ("patients.csv", "therapy.csv", "medical.csv", "truth.txt")}


def test_splitmix64_reference_vectors():
    assert SplitMix64(1234567).next_uint64(3).tolist() == [
        6457827717110365317, 3203168211198807973, 9817491932198370423]
    assert int(SplitMix64(0).next_uint64(1)[0]) == 0xE220A8397B1DCDAF


def test_splitmix64_stream_is_chunking_independent():
    a = SplitMix64(99)
    b = SplitMix64(99)
    joined = np.concatenate([a.random(3), a.random(5)])
    np.testing.assert_array_equal(joined, b.random(8))
    ints = SplitMix64(4).integers(2, 5, 10_000)
    assert ints.min() == 2 and ints.max() == 5


def test_same_seed_identical_bytes(tmp_path):
    cfg = SynthConfig(seed=7, planted=choose_planted(40, 3, 5.0, 7), **SMALL)
    generate(cfg, tmp_path / "a")
    generate(cfg, tmp_path / "b")
    assert digest(tmp_path / "a") == digest(tmp_path / "b")
    generate(SynthConfig(seed=8, **SMALL), tmp_path / "c")
    assert digest(tmp_path / "a")["medical.csv"] != digest(tmp_path / "c")["medical.csv"]


def test_output_passes_ingest_and_respects_span(tmp_path):
    cfg = SynthConfig(seed=3, planted=choose_planted(40, 2, 3.0, 3), **SMALL)
    summary = generate(cfg, tmp_path)
    patients = read_patients(tmp_path / "patients.csv")
    therapy = read_therapy(tmp_path / "therapy.csv", patients)
    medical = read_medical(tmp_path / "medical.csv", patients)
    assert len(patients) == cfg.n_patients == summary.n_patients
    assert len(therapy) == summary.n_prescriptions
    assert len(medical) == summary.n_events
    start = cfg.start_date
    end = start + dt.timedelta(days=cfg.study_span_days)
    slack = dt.timedelta(days=3 * cfg.window_days)
    assert all(start <= rx.date < end for rx in therapy)
    assert all(start - slack <= ev.date < end + slack for ev in medical)
    assert set(code_universe(cfg.n_codes)) >= {ev.code for ev in medical}
    truth = (tmp_path / "truth.txt").read_text().split()
    assert truth == [c for c, _ in cfg.planted] == list(summary.planted)
    cohort = load_cohort(tmp_path / "patients.csv", tmp_path / "therapy.csv",
                         tmp_path / "medical.csv", cfg.drug_code)
    assert 0 < cohort.population_size < cfg.n_patients


def test_planted_multiplier_raises_exposed_prevalence(tmp_path):
    planted = choose_planted(40, 2, 8.0, 0)
    generate(SynthConfig(planted=planted, **SMALL), tmp_path)
    medical = read_medical(tmp_path / "medical.csv")
    counts = {}
    for ev in medical:
        counts[ev.code] = counts.get(ev.code, 0) + 1
    others = [v for c, v in counts.items() if c not in dict(planted)]
    for code, _ in planted:
        assert counts[code] > max(others)


def test_code_universe():
    codes = code_universe(10)
    assert codes[:4] == ["A001.00", "A002.00", "A001100", "A00..00"]
    assert len(set(codes)) == 10
    assert len(code_universe(200)) == 200


def test_choose_planted_distinct_families():
    picks = choose_planted(200, 5, 5.0, seed=1)
    assert len({c[:3] for c, _ in picks}) == 5
    assert all(m == 5.0 for _, m in picks)
    assert picks == choose_planted(200, 5, 5.0, seed=1)


def test_config_file(tmp_path):
    path = tmp_path / "synth.cfg"
    path.write_text("# demo\nn_patients = 50\nseed=0x10\nplanted=A001.00:4,B001.00:2.5\n"
                    "prescriptions_per_patient=2-3\nbase_event_rate=0.1\n")
    cfg = load_config(path)
    assert cfg.n_patients == 50 and cfg.seed == 16
    assert cfg.planted == (("A001.00", 4.0), ("B001.00", 2.5))
    assert cfg.prescriptions_per_patient == (2, 3)
    assert cfg.base_event_rate == 0.1


@pytest.mark.parametrize("values", [
    {"n_codes": 0},
    {"base_event_rate": 1.5},
    {"planted": "ZZZ1.00:2"},
    {"planted": "A001.00:-1"},
    {"prescriptions_per_patient": "3-1"},
    {"study_span_days": 30},
])
def test_invalid_config(values, tmp_path):
    with pytest.raises(InvalidConfig):
        generate(config_from_mapping(values), tmp_path)


def test_unknown_config_key():
    with pytest.raises(InvalidConfig):
        config_from_mapping({"colour": "blue"})
