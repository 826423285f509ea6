"""Shot-count datasets: JSON ingestion, synthetic sampling and analysis.

Dataset JSON
------------
::

    {
      "device": "ibm_sherbrooke",
      "qubit": 19,
      "shots": 8000,
      "reps_per_job": 20,
      "jobs": [{"counts": {"1:0": 80012, ..., "2:4": 136611}}, ...]
    }

Each count is the number of outcome-1 results of one experiment in one job,
summed over the job's ``shots * reps_per_job`` executions.  A job may repeat
``"shots"``; if it differs from the top-level value the document is
rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import jsonschema
import numpy as np

from .rng import derive_rng
from .witness import (
    LABELS,
    ProbTable,
    WitnessReport,
    log10_p_value,
    p_value,
    variance,
    witness_report,
    witness_value,
)

__all__ = [
    "DatasetError",
    "DATASET_SCHEMA",
    "JobRecord",
    "Dataset",
    "ingest",
    "dataset_from_dict",
    "emit",
    "dataset_to_dict",
    "sample_counts",
    "pooled_table",
    "job_tables",
    "witness_mode_i",
    "witness_mode_ii",
    "SanityDifferences",
    "sanity_differences",
    "TableRow",
    "report",
]


class DatasetError(ValueError):
    """A dataset document is malformed or violates an invariant."""


_COUNT = {"type": "integer", "minimum": 0}
DATASET_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["device", "qubit", "shots", "reps_per_job", "jobs"],
    "properties": {
        "device": {"type": "string"},
        "qubit": {"type": "integer"},
        "shots": {"type": "integer", "minimum": 1},
        "reps_per_job": {"type": "integer", "minimum": 1},
        "jobs": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["counts"],
                "properties": {
                    "shots": {"type": "integer", "minimum": 1},
                    "counts": {
                        "type": "object",
                        "required": list(LABELS),
                        "properties": {k: _COUNT for k in LABELS},
                        "additionalProperties": False,
                    },
                },
            },
        },
    },
}


@dataclass(frozen=True)
class JobRecord:
    shots: int
    counts: tuple  # in LABELS order


@dataclass(frozen=True)
class Dataset:
    device: str
    qubit: int
    jobs: tuple
    reps_per_job: int

    def __post_init__(self):
        if not self.jobs:
            raise DatasetError("dataset has no jobs")
        shots = {j.shots for j in self.jobs}
        if len(shots) != 1:
            raise DatasetError(f"jobs have heterogeneous shots {sorted(shots)}")
        trials = self.trials_per_job
        for k, job in enumerate(self.jobs):
            for label, c in zip(LABELS, job.counts):
                if not 0 <= c <= trials:
                    raise DatasetError(f"jobs[{k}].counts['{label}']: {c} outside 0..{trials}")

    @property
    def shots(self) -> int:
        return self.jobs[0].shots

    @property
    def trials_per_job(self) -> int:
        return self.shots * self.reps_per_job

    @property
    def n_trials(self) -> int:
        """Total repetitions N of every experiment."""
        return len(self.jobs) * self.trials_per_job


def _path(error: jsonschema.ValidationError) -> str:
    out = "$"
    for part in error.absolute_path:
        out += f"[{part}]" if isinstance(part, int) else f"['{part}']"
    return out


def dataset_from_dict(doc: Any) -> Dataset:
    validator = jsonschema.Draft202012Validator(DATASET_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise DatasetError("; ".join(f"{_path(e)}: {e.message}" for e in errors))
    shots = doc["shots"]
    jobs = []
    for k, job in enumerate(doc["jobs"]):
        if job.get("shots", shots) != shots:
            raise DatasetError(
                f"$['jobs'][{k}]['shots']: {job['shots']} differs from dataset shots {shots}"
            )
        jobs.append(JobRecord(shots, tuple(job["counts"][label] for label in LABELS)))
    try:
        return Dataset(doc["device"], doc["qubit"], tuple(jobs), doc["reps_per_job"])
    except DatasetError as exc:
        raise DatasetError(f"$: {exc}") from None


def ingest(stream) -> Dataset:
    """Parse and validate a dataset from a JSON string, bytes or text file object."""
    if hasattr(stream, "read"):
        stream = stream.read()
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8")
    try:
        doc = json.loads(stream)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"malformed JSON: {exc}") from None
    return dataset_from_dict(doc)


def dataset_to_dict(d: Dataset) -> dict:
    return {
        "device": d.device,
        "qubit": d.qubit,
        "shots": d.shots,
        "reps_per_job": d.reps_per_job,
        "jobs": [{"counts": dict(zip(LABELS, job.counts))} for job in d.jobs],
    }


def emit(d: Dataset, indent: int | None = 2) -> str:
    return json.dumps(dataset_to_dict(d), indent=indent, sort_keys=False)


def sample_counts(
    t: ProbTable,
    shots: int,
    jobs: int,
    reps: int,
    seed: int,
    device: str = "synthetic",
    qubit: int = 0,
) -> Dataset:
    """Binomial counts for every job and experiment.

    Job ``k``, experiment ``e`` draws from ``derive_rng(seed, "counts", k, e)``,
    so any single count can be regenerated on its own.
    """
    if min(shots, jobs, reps) < 1:
        raise ValueError("shots, jobs and reps must be positive")
    probs = t.flat()
    trials = shots * reps
    records = []
    for k in range(jobs):
        counts = tuple(
            int(derive_rng(seed, "counts", k, e).binomial(trials, probs[e])) for e in range(11)
        )
        records.append(JobRecord(shots, counts))
    return Dataset(device, qubit, tuple(records), reps)


def pooled_table(d: Dataset) -> ProbTable:
    totals = np.sum([job.counts for job in d.jobs], axis=0)
    return ProbTable.from_flat(totals / d.n_trials)


def job_tables(d: Dataset) -> list[ProbTable]:
    return [ProbTable.from_flat(np.array(job.counts) / d.trials_per_job) for job in d.jobs]


def witness_mode_i(d: Dataset) -> WitnessReport:
    """Witness of the job-averaged probabilities."""
    return witness_report(pooled_table(d), d.n_trials)


def _shifted_mean(xs) -> float:
    # exact when all values coincide
    x0 = xs[0]
    return x0 + math.fsum(x - x0 for x in xs) / len(xs)


def witness_mode_ii(d: Dataset) -> WitnessReport:
    """Average of per-job witnesses.

    ``sigma`` is the RMS of the analytic per-job sigmas divided by
    ``sqrt(jobs)``; ``empirical_se`` is the standard error of the per-job
    witnesses (``None`` for a single job).
    """
    tables = job_tables(d)
    ws = [witness_value(t) for t in tables]
    n_jobs = len(ws)
    w = _shifted_mean(ws)
    per_job_var = [variance(t, d.trials_per_job) for t in tables]
    sigma = math.sqrt(math.fsum(per_job_var) / n_jobs) / math.sqrt(n_jobs)
    empirical = float(np.std(ws, ddof=1) / math.sqrt(n_jobs)) if n_jobs > 1 else None
    pooled = witness_mode_i(d)
    if sigma <= 0:
        sigma = pooled.sigma
    return WitnessReport(
        w, sigma, p_value(w, sigma), log10_p_value(w, sigma), pooled.cofactors, d.n_trials, empirical
    )


@dataclass(frozen=True)
class SanityDifferences:
    """``p10 - p14``, ``p11 - p15``, ``p20 - p24`` with binomial standard errors."""

    values: tuple
    errors: tuple

    names = ("p10-p14", "p11-p15", "p20-p24")

    def to_dict(self) -> dict:
        return {n: {"value": v, "se": e} for n, v, e in zip(self.names, self.values, self.errors)}


_SANITY_PAIRS = (("1:0", "1:4"), ("1:1", "1:5"), ("2:0", "2:4"))


def sanity_differences(d: Dataset) -> SanityDifferences:
    t = pooled_table(d).as_dict()
    n = d.n_trials
    values, errors = [], []
    for a, b in _SANITY_PAIRS:
        values.append(t[a] - t[b])
        errors.append(math.sqrt((t[a] * (1 - t[a]) + t[b] * (1 - t[b])) / n))
    return SanityDifferences(tuple(values), tuple(errors))


def _exact_pooled(d: Dataset) -> dict[str, Fraction]:
    """Pooled probabilities as exact fractions (for audits)."""
    totals = np.sum([job.counts for job in d.jobs], axis=0)
    return {k: Fraction(int(c), d.n_trials) for k, c in zip(LABELS, totals)}


def _fmt_p(rep: WitnessReport) -> str:
    if rep.p_value > 0 and rep.log10_p_value > -300:
        return f"{rep.p_value:.2e}"
    return f"10^{rep.log10_p_value:.1f}"


@dataclass(frozen=True)
class TableRow:
    """One column of a results table: both averaging modes plus sanity checks."""

    device: str
    qubit: int
    mode_i: WitnessReport
    mode_ii: WitnessReport
    sanity: SanityDifferences
    threshold_sigma: float = 5.0

    @property
    def faulty(self) -> bool:
        return self.mode_i.z > self.threshold_sigma or self.mode_ii.z > self.threshold_sigma

    def to_dict(self) -> dict:
        return {
            "device": self.device,
            "qubit": self.qubit,
            "W_i": self.mode_i.w,
            "sigma_i": self.mode_i.sigma,
            "W_ii": self.mode_ii.w,
            "sigma_ii": self.mode_ii.sigma,
            "empirical_se_ii": self.mode_ii.empirical_se,
            "p_value_i": self.mode_i.p_value,
            "log10_p_value_i": self.mode_i.log10_p_value,
            "p_value_ii": self.mode_ii.p_value,
            "log10_p_value_ii": self.mode_ii.log10_p_value,
            "p10_p14": self.sanity.values[0],
            "p11_p15": self.sanity.values[1],
            "p20_p24": self.sanity.values[2],
            "sanity_se": list(self.sanity.errors),
            "n_trials": self.mode_i.n_trials,
            "threshold_sigma": self.threshold_sigma,
            "faulty": self.faulty,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        rows = [
            ("device", self.device),
            ("qubit", str(self.qubit)),
            ("W^i", f"{self.mode_i.w:.4e}"),
            ("sigma^i", f"{self.mode_i.sigma:.4e}"),
            ("W^ii", f"{self.mode_ii.w:.4e}"),
            ("sigma^ii", f"{self.mode_ii.sigma:.4e}"),
            ("p-value^i", _fmt_p(self.mode_i)),
            ("p-value^ii", _fmt_p(self.mode_ii)),
            ("p10-p14", f"{self.sanity.values[0]:+.3e}"),
            ("p11-p15", f"{self.sanity.values[1]:+.3e}"),
            ("p20-p24", f"{self.sanity.values[2]:+.3e}"),
            ("faulty", "yes" if self.faulty else "no"),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


def report(d: Dataset, threshold_sigma: float = 5.0) -> TableRow:
    return TableRow(
        d.device, d.qubit, witness_mode_i(d), witness_mode_ii(d), sanity_differences(d), threshold_sigma
    )
