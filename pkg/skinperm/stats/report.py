# report.py

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from joblib import Parallel, delayed

from skinperm._version import __version__
from skinperm.artifacts import PathLike, atomic_write_json, atomic_write_text, csv_text
from skinperm.errors import DatasetError
from skinperm.inverse.bank import ModelBank
from skinperm.measurement.dataset import DatasetIndex, align_trace
from skinperm.measurement.touchstone import MeasurementTrace
from skinperm.stats.aggregate import (
    PermittivityTrace,
    cohort_envelope,
    invert_trace,
    location_weighted_mean,
    repeatability,
    variation_report,
    volunteer_mean,
)

logger = logging.getLogger(__name__)

MEAN_COLUMNS = ("freq_hz", "eps_real_mean", "eps_imag_mean")
REPEATABILITY_COLUMNS = ("freq_hz", "rel_dev_real", "rel_dev_imag", "rel_std_real", "rel_std_imag")
VARIATION_COLUMNS = ("freq_hz", "width_real", "width_imag")
ENVELOPE_COLUMNS = ("freq_hz", "eps_real_min", "eps_real_max", "eps_imag_min", "eps_imag_max")
SUMMARY_NAME = "summary.json"


@dataclass
class ReportResult:
    out_dir: Path
    files: List[Path] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


def _invert(bank: ModelBank, trace: MeasurementTrace):
    try:
        return invert_trace(bank, align_trace(trace, bank.frequencies))
    except Exception as e:
        return f"{e.__class__.__name__}: {e}"


def _write_mean(path: Path, trace: PermittivityTrace) -> Path:
    rows = zip(trace.freq.tolist(), trace.eps_real.tolist(), trace.eps_imag.tolist())
    return atomic_write_text(path, csv_text(MEAN_COLUMNS, rows))


def emit_report(
    dataset: DatasetIndex,
    bank: ModelBank,
    out_dir: PathLike,
    *,
    n_jobs: int = 1,
    failures: Optional[List[Any]] = None,
    config: Optional[Dict[str, Any]] = None,
) -> ReportResult:
    """
    Invert every trace of the dataset and write the cohort statistics.

    Files written to `out_dir`:
      - volunteer_<id>_mean.csv: location-weighted mean per volunteer
      - volunteer_<id>_variation.csv: max - min over the volunteer's location means
      - volunteer_<id>_<location>_repeatability.csv: for locations with at least two repeats
      - cohort_mean.csv, cohort_envelope.csv: over the volunteer means
      - summary.json

    :param dataset: indexed measurements
    :param bank: trained model bank; traces are aligned to its frequencies
    :param out_dir: created if missing
    :param n_jobs: joblib workers for the inversions
    :param failures: dataset loading failures to list in the summary
    :param config: effective run configuration to record in the summary
    :raises DatasetError: no trace could be inverted
    """
    out = Path(out_dir)
    entries: List[Tuple[str, str, MeasurementTrace]] = list(dataset.traces())
    inverted = Parallel(n_jobs=n_jobs)(delayed(_invert)(bank, trace) for _, _, trace in entries)

    by_volunteer: Dict[str, Dict[str, List[PermittivityTrace]]] = {}
    skipped = [{"path": str(f.path), "reason": f.reason} for f in failures or []]
    for (volunteer, location, trace), result in zip(entries, inverted):
        if isinstance(result, str):
            logger.warning("cannot invert %s: %s", trace.source, result)
            skipped.append({"path": trace.source, "reason": result})
            continue
        by_volunteer.setdefault(volunteer, {}).setdefault(location, []).append(result)
    if not by_volunteer:
        raise DatasetError("no trace of the dataset could be inverted")

    report = ReportResult(out_dir=out)
    volunteers: Dict[str, Any] = {}
    means: List[PermittivityTrace] = []
    omitted: List[str] = []
    for volunteer, locations in by_volunteer.items():
        mean = location_weighted_mean(locations, source=volunteer)
        means.append(mean)
        report.files.append(_write_mean(out / f"volunteer_{volunteer}_mean.csv", mean))

        location_means = [volunteer_mean(repeats, source=f"{volunteer}/{loc}") for loc, repeats in locations.items()]
        variation = variation_report(location_means)
        rows = zip(variation.freq.tolist(), variation.width_real.tolist(), variation.width_imag.tolist())
        report.files.append(
            atomic_write_text(out / f"volunteer_{volunteer}_variation.csv", csv_text(VARIATION_COLUMNS, rows))
        )

        repeat_summary = {}
        for location, repeats in locations.items():
            if len(repeats) < 2:
                continue
            rep = repeatability(repeats)
            rows = zip(rep.freq.tolist(), rep.rel_dev_real.tolist(), rep.rel_dev_imag.tolist(),
                       rep.rel_std_real.tolist(), rep.rel_std_imag.tolist())
            path = out / f"volunteer_{volunteer}_{location}_repeatability.csv"
            report.files.append(atomic_write_text(path, csv_text(REPEATABILITY_COLUMNS, rows)))
            repeat_summary[location] = {
                "n_repeats": rep.n_repeats,
                "max_rel_dev_real": rep.max_rel_dev_real,
                "max_rel_dev_imag": rep.max_rel_dev_imag,
            }
        if not repeat_summary:
            omitted.append(volunteer)

        volunteers[volunteer] = {
            "n_locations": len(locations),
            "n_traces": sum(len(r) for r in locations.values()),
            "flagged_points": mean.n_flagged,
            "max_width_real": variation.max_width_real,
            "max_width_imag": variation.max_width_imag,
            "repeatability": repeat_summary,
        }

    cohort = volunteer_mean(means, source="cohort")
    report.files.append(_write_mean(out / "cohort_mean.csv", cohort))
    envelope = cohort_envelope(means)
    rows = zip(envelope.freq.tolist(), envelope.real_min.tolist(), envelope.real_max.tolist(),
               envelope.imag_min.tolist(), envelope.imag_max.tolist())
    report.files.append(atomic_write_text(out / "cohort_envelope.csv", csv_text(ENVELOPE_COLUMNS, rows)))

    report.summary = {
        "tool_version": __version__,
        "bank_provenance": bank.provenance,
        "n_frequencies": int(bank.frequencies.size),
        "volunteers": volunteers,
        "repeatability_omitted": omitted,
        "cohort": {
            "n_volunteers": len(means),
            "flagged_points": cohort.n_flagged,
            "eps_real_mean_range": [float(cohort.eps_real.min()), float(cohort.eps_real.max())],
            "eps_imag_mean_range": [float(cohort.eps_imag.min()), float(cohort.eps_imag.max())],
        },
        "failures": skipped,
        "config": config or {},
    }
    report.files.append(atomic_write_json(out / SUMMARY_NAME, report.summary))
    for volunteer in omitted:
        logger.info("volunteer %s has no repeated location; repeatability omitted", volunteer)
    return report
