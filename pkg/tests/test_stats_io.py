import io
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import resampled_witnesses
from dimwitness.models import NoiseConfig, NoiseKind, ideal_protocol, noisy_protocol, protocol_table
from dimwitness.stats_io import (
    Dataset,
    DatasetError,
    JobRecord,
    SanityDifferences,
    TableRow,
    _exact_pooled,
    dataset_from_dict,
    emit,
    ingest,
    job_tables,
    pooled_table,
    report,
    sample_counts,
    sanity_differences,
    witness_mode_i,
    witness_mode_ii,
)
from dimwitness.witness import LABELS, ProbTable, WitnessReport, log10_p_value, p_value, variance


def _table(kind=None, strength=0.0):
    if kind is None:
        return protocol_table(ideal_protocol())
    return protocol_table(noisy_protocol(NoiseConfig(kind, strength)))


def _doc(counts, shots=100, reps=1, jobs=1):
    return {
        "device": "dev",
        "qubit": 3,
        "shots": shots,
        "reps_per_job": reps,
        "jobs": [{"counts": dict(zip(LABELS, counts))} for _ in range(jobs)],
    }


def _deterministic_dataset(tables, trials):
    jobs = tuple(JobRecord(trials, tuple(int(round(p * trials)) for p in t.flat())) for t in tables)
    return Dataset("det", 0, jobs, 1)


@pytest.fixture(scope="module")
def ideal():
    return _table()


def test_minimal_document_all_ones():
    d = ingest(json.dumps(_doc([100] * 11)))
    assert d.n_trials == 100
    assert pooled_table(d).flat().tolist() == [1.0] * 11


def test_count_above_trials_names_label():
    counts = [10] * 11
    counts[LABELS.index("2:3")] = 101
    with pytest.raises(DatasetError, match="2:3"):
        ingest(json.dumps(_doc(counts)))


def test_reps_raise_the_count_ceiling():
    d = ingest(json.dumps(_doc([250] * 11, shots=100, reps=3)))
    assert d.trials_per_job == 300
    assert pooled_table(d)["1:0"] == pytest.approx(250 / 300)


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda d: d["jobs"][0]["counts"].pop("1:5"), "1:5"),
        (lambda d: d["jobs"][0]["counts"].update({"3:0": 1}), "3:0"),
        (lambda d: d["jobs"][0]["counts"].update({"1:0": -1}), "jobs"),
        (lambda d: d["jobs"][0]["counts"].update({"1:0": 1.5}), "jobs"),
        (lambda d: d.pop("device"), "device"),
        (lambda d: d.update({"jobs": []}), "jobs"),
        (lambda d: d.update({"shots": 0}), "shots"),
    ],
)
def test_schema_violations(mutate, fragment):
    doc = _doc([5] * 11)
    mutate(doc)
    with pytest.raises(DatasetError, match=fragment.replace("[", r"\[")):
        dataset_from_dict(doc)


def test_malformed_json():
    with pytest.raises(DatasetError, match="malformed"):
        ingest("{not json")


def test_heterogeneous_shots_rejected():
    doc = _doc([5] * 11, jobs=2)
    doc["jobs"][1]["shots"] = 200
    with pytest.raises(DatasetError, match="shots"):
        dataset_from_dict(doc)
    with pytest.raises(DatasetError, match="heterogeneous"):
        Dataset("d", 0, (JobRecord(10, (1,) * 11), JobRecord(20, (1,) * 11)), 1)


def test_round_trip(ideal):
    d = sample_counts(ideal, shots=1000, jobs=16, reps=4, seed=8)
    text = emit(d)
    back = ingest(text)
    assert back == d
    assert ingest(io.StringIO(text)) == d
    assert ingest(text.encode()) == d
    assert emit(back) == text


@pytest.mark.parametrize("seed", [0, 1, 12345])
def test_round_trip_property(seed):
    rng = np.random.default_rng(seed)
    t = ProbTable.from_flat(rng.uniform(0, 1, 11))
    d = sample_counts(t, shots=int(rng.integers(1, 500)), jobs=int(rng.integers(1, 9)), reps=2, seed=seed)
    assert ingest(emit(d)) == d


def test_sampling_extremes():
    t = ProbTable((1, 0, 1, 0, 1, 0), (0, 1, 0, 1, 0))
    d = sample_counts(t, shots=50, jobs=3, reps=7, seed=1)
    for job in d.jobs:
        assert list(job.counts) == [350 if p == 1 else 0 for p in t.flat()]


def test_sampling_frequency():
    t = ProbTable.from_flat([0.5] * 11)
    d = sample_counts(t, shots=10_000, jobs=100, reps=100, seed=3)
    freq = pooled_table(d).flat()
    se = math.sqrt(0.25 / d.n_trials)
    assert np.all(np.abs(freq - 0.5) < 4 * se)


def test_sampling_arguments_validated(ideal):
    with pytest.raises(ValueError):
        sample_counts(ideal, shots=0, jobs=1, reps=1, seed=0)


def test_single_job_modes_coincide(ideal):
    d = sample_counts(ideal, shots=1000, jobs=1, reps=10, seed=2)
    a, b = witness_mode_i(d), witness_mode_ii(d)
    assert a.w == b.w
    assert b.empirical_se is None


def test_identical_jobs_give_identical_modes(ideal):
    one = sample_counts(ideal, shots=1000, jobs=1, reps=1, seed=9)
    d = Dataset("d", 0, one.jobs * 5, 1)
    assert witness_mode_ii(d).w == witness_mode_i(d).w


def test_ideal_data_is_null(ideal):
    d = sample_counts(ideal, shots=10_000, jobs=10, reps=10, seed=42)
    assert d.n_trials == 10**6
    rep = witness_mode_i(d)
    assert abs(rep.w) < 5 * rep.sigma


def test_leak_detectable_at_ten_million():
    # known to fail: at this strength the expected |W| is only ~2 sigma at N = 1e7
    d = sample_counts(_table(NoiseKind.QUTRIT_LEAK, 0.05), shots=10_000, jobs=100, reps=10, seed=42)
    assert d.n_trials == 10**7
    rep = witness_mode_i(d)
    assert abs(rep.w) > 5 * rep.sigma


def test_stronger_leak_detectable_at_ten_million():
    d = sample_counts(_table(NoiseKind.QUTRIT_LEAK, 0.1), shots=10_000, jobs=100, reps=10, seed=42)
    rep = witness_mode_i(d)
    assert abs(rep.w) > 5 * rep.sigma
    assert report(d).faulty


def test_stable_data_modes_agree(ideal):
    d = sample_counts(ideal, shots=10_000, jobs=20, reps=5, seed=77)
    a, b = witness_mode_i(d), witness_mode_ii(d)
    assert abs(a.w - b.w) < 2 * math.hypot(a.sigma, b.sigma)


def test_drift_separates_modes(ideal):
    # each job alone is a valid qubit model, the mixture is not
    shifted = _table(NoiseKind.DEPHASING, 0.3)
    d = _deterministic_dataset([ideal, shifted], 10**6)
    a, b = witness_mode_i(d), witness_mode_ii(d)
    assert abs(b.w) < 1e-5
    assert abs(a.w - b.w) > 5 * a.sigma
    assert b.empirical_se is not None and b.empirical_se >= 0


def test_mode_ii_sigma_scaling(ideal):
    d = sample_counts(ideal, shots=1000, jobs=4, reps=10, seed=4)
    per_job = [variance(t, d.trials_per_job) for t in job_tables(d)]
    assert witness_mode_ii(d).sigma == pytest.approx(math.sqrt(sum(per_job) / 4) / 2, rel=1e-12)


def test_sanity_ideal(ideal):
    d = sample_counts(ideal, shots=10_000, jobs=10, reps=10, seed=5)
    s = sanity_differences(d)
    for v, e in zip(s.values, s.errors):
        assert abs(v) < 4 * e


def test_sanity_over_rotation():
    d = sample_counts(_table(NoiseKind.OVER_ROTATION, 0.01), shots=10_000, jobs=100, reps=10, seed=6)
    s = sanity_differences(d)
    assert abs(s.values[0]) > 5 * s.errors[0]


def test_sanity_deterministic():
    t = ProbTable((0.5, 0.25, 0.5, 0.5, 0.125, 0.75), (1.0, 0.5, 0.5, 0.5, 0.0))
    d = _deterministic_dataset([t], 1000)
    s = sanity_differences(d)
    assert s.values == (0.5 - 0.125, 0.25 - 0.75, 1.0)
    assert s.to_dict()["p20-p24"]["se"] == pytest.approx(0.0)


def _row(z, sigma=1e-4, n=10**7):
    reports = [
        WitnessReport(z * sigma, sigma, p_value(z * sigma, sigma), log10_p_value(z * sigma, sigma), np.zeros(11), n)
        for _ in range(2)
    ]
    return TableRow("dev", 1, *reports, SanityDifferences((0.0, 0.0, 0.0), (1e-4,) * 3))


def test_report_flags_at_7_9_sigma():
    row = _row(7.9)
    assert row.faulty
    assert 1e-15 < row.to_dict()["p_value_i"] < 1e-14
    assert "e-15" in row.to_text()


def test_report_not_flagged_at_one_sigma():
    assert not _row(1.0).faulty
    assert not _row(-1.0).faulty


def test_report_log_form_at_71_sigma():
    row = _row(71.0)
    out = row.to_dict()
    assert out["p_value_i"] == 0.0
    assert out["log10_p_value_i"] < -1000
    assert "10^-1096.6" in row.to_text()


def test_report_json_keys(ideal):
    d = sample_counts(ideal, shots=1000, jobs=3, reps=2, seed=1)
    out = json.loads(report(d).to_json())
    for key in ("W_i", "sigma_i", "W_ii", "sigma_ii", "p10_p14", "p11_p15", "p20_p24", "faulty"):
        assert key in out
    assert out["n_trials"] == 6000


def test_determinism(ideal):
    a = sample_counts(ideal, shots=100, jobs=5, reps=2, seed=11)
    b = sample_counts(ideal, shots=100, jobs=5, reps=2, seed=11)
    assert a == b
    assert witness_mode_i(a).w == witness_mode_i(a).w
    assert sample_counts(ideal, shots=100, jobs=5, reps=2, seed=12) != a


def test_pooled_is_exact_mean():
    rng = np.random.default_rng(0)
    t = ProbTable.from_flat(rng.uniform(0, 1, 11))
    d = sample_counts(t, shots=333, jobs=7, reps=3, seed=5)
    exact = _exact_pooled(d)
    per_job = [[Fraction(c, d.trials_per_job) for c in job.counts] for job in d.jobs]
    for i, label in enumerate(LABELS):
        assert exact[label] == sum(p[i] for p in per_job) / len(per_job)
        assert pooled_table(d)[label] == float(exact[label])


def test_analytic_sigma_matches_resampling(ideal):
    n = 10**5
    sigma = math.sqrt(variance(ideal, n))
    empirical = np.std(resampled_witnesses(ideal.flat(), n, 10**4, seed=21))
    assert 0.95 <= sigma / empirical <= 1.05
